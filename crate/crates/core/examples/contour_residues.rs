// Boltzmann-weighted resolvent: residue sum against rectangle-contour quadrature.

use momrep::contour::{contour_integral, residue_total, ContourSpec, Pole, PoleSet};
use momrep::{PhysicalParams, Statistics};
use num_complex::Complex64;

pub fn run_example() -> momrep::Result<f64> {
    let poles = PoleSet::new(vec![
        Pole { location: -0.4, residue: Complex64::new(1.0, 0.0) },
        Pole { location: 0.3, residue: Complex64::new(0.5, -0.2) },
        Pole { location: 1.7, residue: Complex64::new(-0.3, 0.1) },
    ])?;
    let params = PhysicalParams::new(1.0, 1.0, 0.8, Statistics::Bose)?;
    let exact = residue_total(&poles, &params)?;
    let contour = ContourSpec::enclosing(-0.4, 1.7);
    let quad = contour_integral(|z| (-z / params.tau).exp() * poles.evaluate(z), &contour)?;
    let diff = (quad - exact).norm();
    println!("residues   {exact:.15}");
    println!("quadrature {quad:.15}");
    println!("|difference| = {diff:.3e} with {} nodes per edge", contour.nodes_per_edge);
    Ok(diff)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
