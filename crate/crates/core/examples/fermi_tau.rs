// Zero-temperature Fermi gas: tau = 2 eps_F / 5, checked against counting plane-wave modes.

use momrep::cli::validate::fermi_mode_count;
use momrep::fluid::{fermi_energy_spinless, tau_ideal_fermi_zero_temp};
use momrep::{PhysicalParams, Statistics};

pub fn run_example() -> momrep::Result<f64> {
    let n = 200_000;
    let params = PhysicalParams::new(n as f64, n as f64 / 0.8, 1.0, Statistics::Fermi)?.with_temperature(0.0);
    let tau = tau_ideal_fermi_zero_temp(&params)?;
    let eps_f = fermi_energy_spinless(&params);
    let (counted, mean) = fermi_mode_count(n, params.volume.cbrt(), &params);
    println!("eps_F {eps_f:.8} (counted {counted:.8})");
    println!("tau {tau:.8} (2/3 of counted mean energy {:.8})", 2.0 * mean / 3.0);
    println!("tau / eps_F = {}", tau / eps_f);
    Ok(tau / eps_f)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}
