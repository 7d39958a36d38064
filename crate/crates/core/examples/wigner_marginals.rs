// One-body Wigner function in a cosine lattice: complex pointwise, real marginals.

use std::f64::consts::PI;

use momrep::contour::WeightConstants;
use momrep::crystal::{BandMode, CrystalModel, CutoffPolicy, PotentialCoefficients, ReciprocalLattice};
use momrep::wigner::{PeriodicResolvent, WignerField};
use momrep::{Grid, PhysicalParams, Statistics};

pub fn run_example() -> momrep::Result<f64> {
    let params = PhysicalParams::new(12.0, 12.0, 1.0, Statistics::Bose)?;
    let lattice = ReciprocalLattice::cubic(1, 2.0 * PI, 12)?;
    let pot = PotentialCoefficients::cosine(0.7);
    let momenta = Grid::symmetric(1, 0.1, 330)?;
    let crystal = CrystalModel::new(lattice.clone(), pot.clone(), params)?
        .with_policy(CutoffPolicy::Fixed)
        .distribution(&momenta, BandMode::AllBands)?;
    let weights = WeightConstants::new(crystal.a_norm * lattice.cell_volume(), 1)?;
    let provider = PeriodicResolvent::new(lattice, pot, params);
    let field = WignerField::compute(Grid::periodic(1, 0.0, 1.0, 16)?, momenta, &provider, &weights, None, &params)?;
    let rho_r = field.marginal_position()?;
    let rho_p = field.marginal_momentum()?;
    let worst = rho_p
        .values
        .iter()
        .zip(&crystal.rho.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("imaginary fraction of W: {:.3}", field.imaginary_fraction());
    println!("density over one cell: {:?}", rho_r.values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    println!("momentum marginal vs band sum, max deviation {worst:.3e}");
    println!("integral of momentum marginal {:.12}", rho_p.quadrature()?);
    Ok(worst / crystal.rho.max_abs())
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
