// Weak cosine lattice: band gap at the zone boundary and Bragg side lobes in the momentum distribution.

use std::f64::consts::PI;

use momrep::crystal::{BandMode, CrystalModel, PotentialCoefficients, ReciprocalLattice};
use momrep::{Grid, PhysicalParams, Statistics, Vec3};

pub fn run_example() -> momrep::Result<f64> {
    let params = PhysicalParams::new(10.0, 10.0, 1.0, Statistics::Bose)?;
    let lattice = ReciprocalLattice::cubic(1, 2.0 * PI, 8)?;
    let u = 0.05;
    let model = CrystalModel::new(lattice.clone(), PotentialCoefficients::cosine(u), params)?;
    let edge = model.ground_band(&Vec3::new(PI, 0.0, 0.0))?;
    let gap = edge.energies[1] - edge.energies[0];
    println!("gap at the zone edge {gap:.6} (2u = {:.6})", 2.0 * u);

    let strong = CrystalModel::new(lattice, PotentialCoefficients::cosine(0.5), params)?;
    let dist = strong.distribution(&Grid::symmetric(1, 0.1, 300)?, BandMode::Ground)?;
    for n in 0..4 {
        let p = Vec3::new(2.0 * PI * n as f64, 0.0, 0.0);
        println!("rho(p = {:.3}) = {:.6e}", p.x, strong.rho1(&p, dist.a_norm, BandMode::Ground)?);
    }
    println!("integral {:.12}", dist.rho.quadrature()?);
    Ok(gap)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
