use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use bhgenus::genus::{ell_genus_numeric, ell_genus_series, GenusOptions, Orbifold};
use bhgenus::potential::parse_potential;
use bhgenus::symmetry::{grading_subgroup, sl_subgroup};
use bhgenus::theta::{theta_value, ThetaParams};

fn orbifold(text: &str, sl: bool) -> Orbifold {
    let p = parse_potential(text).unwrap();
    let g = if sl { sl_subgroup(&p) } else { grading_subgroup(&p).unwrap() };
    Orbifold::new(p, g).unwrap()
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    group.sample_size(10);
    for (name, text, sl, qmax) in [
        ("cubic_sl_q2", "x1^3+x2^3+x3^3", true, 2),
        ("quintic_j_q1", "x1^5+x2^5+x3^5+x4^5+x5^5", false, 1),
        ("chain_j_q1", "x1^3*x2+x2^4+x3^4+x4^4", false, 1),
    ] {
        let orb = orbifold(text, sl);
        let opts = GenusOptions::with_qmax(qmax);
        group.bench_function(name, |b| b.iter(|| ell_genus_series(black_box(&orb), &opts).unwrap()));
    }
    group.finish();
}

fn numeric(c: &mut Criterion) {
    let z = Complex64::new(0.13, 0.07);
    let tau = Complex64::new(0.21, 1.1);
    let params = ThetaParams::default();
    c.bench_function("theta", |b| b.iter(|| theta_value(black_box(z), black_box(tau), &params).unwrap()));
    for (name, text, sl) in [("numeric_quintic_j", "x1^5+x2^5+x3^5+x4^5+x5^5", false), ("numeric_quintic_sl", "x1^5+x2^5+x3^5+x4^5+x5^5", true)] {
        let orb = orbifold(text, sl);
        c.bench_function(name, |b| b.iter(|| ell_genus_numeric(black_box(&orb), z, tau).unwrap()));
    }
}

criterion_group!(benches, series, numeric);
criterion_main!(benches);
