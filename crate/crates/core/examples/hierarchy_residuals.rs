// Manufactured closure solution: the discrete residual falls by about 16 per grid doubling.

use std::f64::consts::PI;

use momrep::hierarchy::{effective_potential_residual, ClosureInput, GaussianPair};
use momrep::Grid;

pub fn run_example() -> momrep::Result<f64> {
    let pair = GaussianPair { strength: 1.0, width: 0.5 };
    let (len, rho, eps) = (10.0, 1.0, 0.3);
    let a = 2.0 * PI / len;
    let k_hat = pair.strength * (2.0 * PI).sqrt() * pair.width * (-0.5 * a * a * pair.width * pair.width).exp();
    let mut last = f64::NAN;
    for n in [32, 64, 128] {
        let grid = Grid::periodic(1, 0.0, len, n)?;
        let rho1: Vec<f64> = grid.points().map(|x| rho * (1.0 + eps * (a * x.x).cos())).collect();
        let rho2 = rho1.iter().flat_map(|x| rho1.iter().map(move |y| x * y)).collect();
        let u1 = grid.points().map(|x| rho * eps * k_hat * (a * x.x).cos()).collect();
        let input = ClosureInput { order: 1, grid, rho_s: rho1, rho_next: rho2, u_s: u1, pair: &pair };
        let report = effective_potential_residual(&input)?;
        match last.is_finite() {
            true => println!("n = {n:4}: max residual {:.3e}, ratio {:.2}", report.max_abs_residual, last / report.max_abs_residual),
            false => println!("n = {n:4}: max residual {:.3e}", report.max_abs_residual),
        }
        last = report.max_abs_residual;
    }
    Ok(last)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
