// Ideal Bose gas: momentum distribution from the residue sum next to the closed form.

use momrep::fluid::{rho1_momentum_fluid, FluidSpec};
use momrep::{Grid, GriddedDistribution, PhysicalParams, Statistics, Vec3};

pub fn run_example() -> momrep::Result<f64> {
    let params = PhysicalParams::new(100.0, 1000.0, 1.0, Statistics::Bose)?;
    let spec = FluidSpec::new(params)?;
    println!("{:>6} {:>22} {:>22}", "|p|", "residues", "closed form");
    for k in 0..6 {
        let p = Vec3::new(0.5 * k as f64, 0.0, 0.0);
        println!("{:6.2} {:22.15e} {:22.15e}", p.x, spec.rho1_via_residues(&p)?, rho1_momentum_fluid(&p, &params)?);
    }
    let grid = Grid::symmetric(3, 0.25, 32)?;
    let rho = GriddedDistribution::from_fn(grid, |p| spec.rho1(p).unwrap_or(f64::NAN));
    let total = rho.quadrature()?;
    println!("A = {:.12}, integral over p = {total:.12}", spec.weights.a);
    Ok(total)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
