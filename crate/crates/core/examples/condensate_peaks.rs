// Condensate crystal: delta peaks on the shifted reciprocal lattice and the total momentum.

use std::f64::consts::PI;

use momrep::condensate::{condensate_crystal_distribution, peak_lattice_indices, total_momentum, total_momentum_closed_form, CondensateSpec};
use momrep::crystal::ReciprocalLattice;
use momrep::Vec3;
use num_complex::Complex64;

pub fn run_example() -> momrep::Result<f64> {
    let lattice = ReciprocalLattice::cubic(3, 2.0 * PI, 2)?;
    let spec = CondensateSpec::crystal(
        400.0,
        Vec3::new(0.25, 0.0, 0.0),
        1.0,
        100.0,
        vec![
            ([0, 0, 0], Complex64::new(0.8, 0.0)),
            ([1, 0, 0], Complex64::new(0.0, 0.6)),
        ],
        lattice,
    )?;
    let peaks = condensate_crystal_distribution(&spec)?;
    let indices = peak_lattice_indices(&peaks, &spec)?;
    for (peak, idx) in peaks.peaks().iter().zip(&indices) {
        println!("A = {idx:?}: weight {:.6} at p = {:.6}", peak.weight, peak.location.x);
    }
    let p = total_momentum(&peaks);
    println!("total weight {:.12}", peaks.total_weight());
    println!("total momentum {:.12} (closed form {:.12})", p.x, total_momentum_closed_form(&spec).x);
    Ok(p.x)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
