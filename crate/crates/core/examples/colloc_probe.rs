use groundstate::oracle::collocation_dual_alpha_1d;
use groundstate::params::Params;
use groundstate::shooting::{shoot_dual, ShootOptions};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let shot = shoot_dual(&Params::new(1, 9.0).unwrap(), 1.0, &ShootOptions::default()).unwrap();
    println!("shooting α = {:.12} ({:?})", shot.diagnostics.alpha, t0.elapsed());
    let t1 = Instant::now();
    match collocation_dual_alpha_1d(9.0, 1.0, 30.0, 40000) {
        Ok(a) => println!("collocation α = {:.12} diff {:.3e} ({:?})", a, (a - shot.diagnostics.alpha).abs(), t1.elapsed()),
        Err(e) => println!("collocation failed: {e}"),
    }
}
