use num_complex::Complex;
use novikov::numerics::Tolerances;
use novikov::profile::{shoot_profile, GridSpec, WaveParams};
use novikov::operators::coefficient_fields;
use novikov::evans::{asymptotic_splitting, evans_eval, EvansSystem};

fn main() {
    let t = Tolerances::default();
    let p = WaveParams::from_a(3.0 * 3.0f64.sqrt() / 32.0, 1.0, &t).unwrap();
    let w = shoot_profile(&p, &GridSpec::default(), &t).unwrap();
    let f = coefficient_fields(w).unwrap();
    let l = f.profile.l;
    let lam = Complex::new(-10.0, 2.0);
    let split = asymptotic_splitting(lam, &f).unwrap();
    println!("s = {}, p = {}", split.s_plus, split.p_plus);
    for ll in [l, 1.5 * l, 2.0 * l, 3.0 * l] {
        let sys = EvansSystem::with_truncation(&f, ll);
        let d = evans_eval(lam, &sys, &t).unwrap();
        println!("L = {ll:7.3}: value = {:+.6e} {:+.6e}i  renorm = {:.6e}  log|D| = {:.10e}  arg = {:+.8}",
            d.value_re, d.value_im, d.renorm_log, d.log_abs(), d.value().arg());
    }
}
