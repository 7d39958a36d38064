// Gaussian wave packet to momentum space and back; a one-body density matrix keeps its trace.

use std::f64::consts::PI;

use momrep::fourier::{dm_position_to_momentum, momentum_to_wavefunction, wavefunction_to_momentum, DensityMatrixGrid, WaveFunction};
use momrep::{Grid, PhysicalParams, Statistics};
use num_complex::Complex64;

pub fn run_example() -> momrep::Result<f64> {
    let params = PhysicalParams::new(2.0, 24.0, 1.0, Statistics::Bose)?;
    let xg = Grid::symmetric(1, 0.1, 120)?;
    let pg = Grid::symmetric(1, 0.05, 160)?;
    let sigma = 0.9;
    let psi = WaveFunction::from_fn(xg.clone(), |x| {
        let amp = (2.0 * PI * sigma * sigma).powf(-0.25) * (-(x.x + 0.4).powi(2) / (4.0 * sigma * sigma)).exp();
        Complex64::from_polar(amp, 1.5 * x.x)
    });
    let there = wavefunction_to_momentum(&psi, &pg, &params)?;
    let back = momentum_to_wavefunction(&there, &xg, &params)?;
    let err = psi.values.iter().zip(&back.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("norm in x {:.15}, norm in p {:.15}", psi.norm_sq(), there.norm_sq());
    println!("max round-trip error {err:.3e}");
    let dm = DensityMatrixGrid::from_orbital(&psi, params.n_particles)?;
    let dm_p = dm_position_to_momentum(&dm, &pg, &params)?;
    println!("trace in x {:.12}, trace in p {:.12}", dm.trace(), dm_p.trace());
    Ok(err)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
