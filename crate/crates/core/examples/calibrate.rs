//! Runs the default (λ, η) sweep and writes the calibration file.
//!
//! `cargo run -p dicke-core --example calibrate [-- OUT]`

use dicke_core::fock::{calibration_sweep, CalibrationGrid};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "calibration/rho_sim.json".into());
    let cal = calibration_sweep(&CalibrationGrid::default()).expect("sweep runs");
    let s = &cal.selected;
    println!(
        "selected lambda={} eta={} fidelity={:.6} p_exact={:.6e} p_event={:.6e}",
        s.lambda, s.eta, s.fidelity, s.p_exact, s.p_event
    );
    std::fs::write(&out, cal.to_json() + "\n").expect("write calibration");
    println!("wrote {out}");
}
