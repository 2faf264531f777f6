use super::*;
use num_traits::{Signed, ToPrimitive, Zero};
use crate::exactmath::{rat, root_of_unity, to_f64};
use crate::genus::{ell_genus_numeric, sector_value_numeric, Orbifold};
use crate::potential::parse_potential;
use crate::symmetry::{grading_subgroup, sl_subgroup};
use num_complex::Complex64;

fn orb(text: &str, sl: bool) -> Orbifold {
    let p = parse_potential(text).unwrap();
    let g = if sl { sl_subgroup(&p) } else { grading_subgroup(&p).unwrap() };
    Orbifold::new(p, g).unwrap()
}

const QUINTIC: &str = "x1^5+x2^5+x3^5+x4^5+x5^5";
const CUBIC: &str = "x1^3+x2^3+x3^3";

#[test]
fn two_squares_is_constant() {
    let o = orb("x1^2+x2^2", false);
    let g = ell_genus_series(&o, &GenusOptions::with_qmax(2)).unwrap();
    assert!(g.series.terms().iter().all(|(q, _, _)| q.is_zero()), "{:?}", g.series);
    assert!(g.integral);
}

/// Untwisted sector: invariant monomials with exponents ≤ 3 in degrees 0, 5, 10, 15 give
/// `1 + 101y + 101y² + y³` (times `y^{−3/2}`); each twisted sector `J^k` adds `−y^{5/2−k}`.
#[test]
fn quintic_ground_level() {
    let o = orb(QUINTIC, false);
    let opts = GenusOptions { ywin: Some(rat_int(4)), ..GenusOptions::with_qmax(0) };
    let g = ell_genus_series(&o, &opts).unwrap();
    let ground = g.series.q_level(&Rat::zero());
    assert!(ground.iter().all(|(y, _)| y.abs() <= rat(3, 2)));
    assert_eq!(ground, vec![(rat(-1, 2), rat_int(100)), (rat(1, 2), rat_int(100))]);
    let mirror = ell_genus_series(&orb(QUINTIC, true), &opts).unwrap();
    assert_eq!(mirror.series, g.series.neg());
}

#[test]
fn literal_and_projected_agree() {
    for (text, sl) in [(CUBIC, false), (CUBIC, true), ("x1^3*x2+x2^4+x3^4+x4^4", false), ("x1^2+x2^2", false)] {
        let o = orb(text, sl);
        let y = default_ywin(o.cbar(), &rat_int(1));
        let (a, pa) = genus_on_window(&o, &rat_int(1), &y, SectorPath::Literal).unwrap();
        let (b, pb) = genus_on_window(&o, &rat_int(1), &y, SectorPath::Projected).unwrap();
        assert_eq!((pa, pb), (SectorPath::Literal, SectorPath::Projected));
        assert_eq!(a, b, "{text}");
        for n in o.group().elements() {
            let s1 = sector_supertrace_series(&o, n, &rat_int(1), &y, SectorPath::Literal).unwrap();
            let s2 = sector_supertrace_series(&o, n, &rat_int(1), &y, SectorPath::Projected).unwrap();
            assert_eq!(s1, s2);
        }
    }
}

#[test]
fn untwisted_sector_has_nonnegative_q() {
    let o = orb(QUINTIC, false);
    let j = o.group().generators()[0].clone();
    let s = sector_supertrace_series(&o, &j, &rat_int(1), &rat_int(3), SectorPath::Auto).unwrap();
    assert!(s.terms().iter().all(|(q, _, _)| *q >= Rat::zero()));
    assert!(!s.is_zero());
}

/// One `(n, n₁)` term of the series, evaluated numerically, against the theta-ratio value.
#[test]
fn sector_pair_matches_theta_ratio() {
    let o = orb(QUINTIC, false);
    let n = o.group().generators()[0].clone();
    let n1 = PhaseVector::zero(5);
    let (z, tau) = (Complex64::new(0.23, 0.04), Complex64::new(0.11, 1.31));
    let qmax = rat_int(3);
    let w = o.internal_window(&qmax, &rat_int(6));
    let den = o.denominator();
    let mut acc = crate::qseries::BiSeries::one(den, w.clone());
    for j in 0..5 {
        let k = (n1.coord(j) * rat_int(5)).to_integer();
        let k = k.to_i64().unwrap();
        let f = variable_factor(&o.charges().q[j], &n.coord(j), &root_of_unity(k, 5), &root_of_unity(-k, 5), den, &w).unwrap();
        acc = acc.mul(&f).unwrap();
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let series = acc.evaluate(z, tau) * (-two_pi_i * z * (o.cbar() as f64 / 2.0)).exp();
    let direct = sector_value_numeric(&o, &n, &n1, z, tau).unwrap();
    assert!((series - direct).norm() < 1e-4 * direct.norm().max(1.0), "{series} vs {direct}");
}

#[test]
fn numeric_matches_series() {
    for (text, sl) in [(CUBIC, false), ("x1^2+x2^2", false), (QUINTIC, false)] {
        let o = orb(text, sl);
        let g = ell_genus_series(&o, &GenusOptions::with_qmax(3)).unwrap();
        let (z, tau) = (Complex64::new(0.17, 0.03), Complex64::new(-0.2, 1.2));
        let s = g.series.evaluate(z, tau);
        let n = ell_genus_numeric(&o, z, tau).unwrap();
        assert!((s - n).norm() < 1e-5 * n.norm().max(1.0), "{text}: {s} vs {n}");
    }
}

#[test]
fn near_pole_is_reported() {
    let o = orb("x1^2+x2^2", false);
    let zero = Complex64::new(0.0, 0.0);
    let tau = Complex64::new(0.0, 1.2);
    let e = PhaseVector::zero(2);
    assert!(matches!(sector_value_numeric(&o, &e, &e, zero, tau), Err(GenusError::NearPole { .. })));
    let r = ell_genus_numeric_retry(&o, zero, tau).unwrap();
    assert_eq!(r.retries, 1);
    assert!(to_f64(&rat_int(1)) > 0.0);
}

#[test]
fn integer_shift_of_phase_representative() {
    let o = orb(CUBIC, false);
    let (z, tau) = (Complex64::new(0.21, 0.02), Complex64::new(0.3, 1.1));
    let n = o.group().generators()[0].clone();
    let params = crate::theta::ThetaParams::default();
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let value = |shift: f64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..3 {
            let (q, t, t1) = (to_f64(&o.charges().q[j]), to_f64(&n.coord(j)), to_f64(&n.coord(j)) + shift);
            let num = crate::theta::theta_value(z * (1.0 - q) - tau * t - t1, tau, &params).unwrap();
            let den = crate::theta::theta_value(z * q + tau * t + t1, tau, &params).unwrap();
            acc *= (-two_pi_i * z * t).exp() * num / den;
        }
        acc
    };
    let base = sector_value_numeric(&o, &n, &n, z, tau).unwrap();
    for s in [1.0, -2.0, 3.0] {
        assert!((value(s) - base).norm() < 1e-10 * base.norm().max(1.0));
    }
}

