use super::*;
use crate::exactmath::{rat, rat_int};
use crate::genus::{GenusOptions, Orbifold};
use crate::potential::{parse_potential, AtomKind};
use crate::symmetry::{grading_subgroup, sl_subgroup};

fn orb(text: &str, sl: bool) -> Orbifold {
    let p = parse_potential(text).unwrap();
    let g = if sl { sl_subgroup(&p) } else { grading_subgroup(&p).unwrap() };
    Orbifold::new(p, g).unwrap()
}

const QUINTIC: &str = "x1^5+x2^5+x3^5+x4^5+x5^5";
const CUBIC: &str = "x1^3+x2^3+x3^3";
const CHAIN: &str = "x1^3*x2+x2^4+x3^4+x4^4";
const LOOP: &str = "x1^3*x2+x2^3*x1+x3^4+x4^4";

#[test]
fn containment_rule() {
    let d = LineFamily::denominator(&rat(1, 5), &rat(2, 5), &rat(1, 5));
    let n = LineFamily::numerator(&rat(1, 5), &rat(2, 5), &rat(1, 5));
    assert!(d.is_contained_in(&n));
    // a half-period shift breaks it
    let off = LineFamily::new(rat(4, 5), rat(-2, 5), rat(3, 10));
    assert!(!d.is_contained_in(&off));
}

#[test]
fn cell_lines_match_the_family() {
    let f = LineFamily::new(rat(1, 2), rat(1, 2), rat(0, 1));
    let lines = f.lines_in_cell(2);
    // u = 2(p − 1/2) ∈ {1, 3,..} ∩ [0, 2) = {1}; v = 2q ∈ {0}
    assert_eq!(lines, vec![(rat_int(1), rat_int(0))]);
    assert_eq!(LineFamily::new(rat(1, 4), rat_int(0), rat_int(0)).lines_in_cell(4).len(), 1);
}

#[test]
fn quintic_certificates() {
    let traces = holomorphy_certificate(&orb(QUINTIC, false)).unwrap();
    assert!(traces.iter().all(|t| t.kind == AtomKind::Fermat));
    for atom in 0..5 {
        let pairs: usize = traces.iter().filter(|t| t.vars == vec![atom]).map(|t| t.multiplicity).sum();
        assert_eq!(pairs, 25);
    }
}

#[test]
fn loop_certificates() {
    let traces = holomorphy_certificate(&orb(LOOP, false)).unwrap();
    let lp: Vec<_> = traces.iter().filter(|t| t.kind == AtomKind::Loop).collect();
    assert!(!lp.is_empty());
    assert!(lp.iter().all(|t| t.cancellations == vec![(0, 1), (1, 0)]));
}

#[test]
fn chain_reduction_is_short() {
    for sl in [false, true] {
        let traces = holomorphy_certificate(&orb(CHAIN, sl)).unwrap();
        let chains: Vec<_> = traces.iter().filter(|t| t.kind == AtomKind::Chain).collect();
        assert!(!chains.is_empty());
        assert!(chains.iter().all(|t| t.steps.len() <= 2 && !t.steps.is_empty()));
        // the identity sector pair goes through the full reduction
        let first = chains.iter().find(|t| t.theta.iter().chain(&t.theta1).all(|x| x == &rat_int(0))).unwrap();
        let s = &first.steps[0];
        assert_eq!((s.m, s.k, s.l), (4, 3, 3));
        assert_eq!(s.pq, Some((0, 0)));
        assert_eq!((s.m_new, s.k_new), (4, 3));
    }
    let dual = orb(CHAIN, false).mirror().unwrap();
    holomorphy_certificate(&dual).unwrap();
}

#[test]
fn deeper_chain_certifies() {
    let o = orb("x1^2*x2+x2^2*x3+x3^3", false);
    let traces = holomorphy_certificate(&o).unwrap();
    assert!(traces.iter().any(|t| t.steps.len() == 2));
    holomorphy_certificate(&o.mirror().unwrap()).unwrap();
}

#[test]
fn two_squares_laws() {
    let o = orb("x1^2+x2^2", false);
    let samples = sample_points(0, 5);
    let r = check_jacobi_transformations(&o, &samples).unwrap();
    assert!(r.worst() < 1e-6, "{r:?}");
    assert!(check_spectral_flow(&o, &samples).unwrap().worst() < 1e-6);
    assert!(check_star_substitution(&o, &samples).unwrap().worst() < 1e-6);
}

#[test]
fn cubic_laws_and_mirror() {
    let o = orb(CUBIC, false);
    let samples = sample_points(3, 5);
    let r = check_jacobi_transformations(&o, &samples).unwrap();
    assert!(r.worst() < 1e-6, "{r:?}");
    assert!(check_spectral_flow(&o, &samples).unwrap().worst() < 1e-6);
    assert!(check_star_substitution(&o, &samples).unwrap().worst() < 1e-6);
    assert!(check_mirror_numeric(&o, &samples).unwrap().worst() < 1e-6);
    let v = check_mirror_series(&o, &GenusOptions::with_qmax(2)).unwrap();
    assert_eq!(v.status, Status::Pass, "{:?}", v.details);
    assert_eq!(v.to_json()["max_residual"], "exact");
}

#[test]
fn broken_law_is_detected() {
    // a half-period shift is not a symmetry
    let o = orb(CHAIN, false);
    let (z, tau) = sample_points(1, 1)[0];
    let a = crate::genus::ell_genus_numeric(&o, z, tau).unwrap();
    let b = crate::genus::ell_genus_numeric(&o, z + 0.5, tau).unwrap();
    assert!(crate::theta::residual(a, b) > 1e-3);
}

#[test]
fn samples_are_reproducible() {
    assert_eq!(sample_points(9, 4), sample_points(9, 4));
    assert_ne!(sample_points(9, 4), sample_points(10, 4));
    for (z, tau) in sample_points(2, 50) {
        assert!(tau.im >= 0.9 && tau.im < 1.5 && z.re.abs() <= 0.5);
    }
}

#[test]
fn oracle_check_on_cubic() {
    let v = check_oracle(&orb(CUBIC, false), 2, &rat_int(2), &rat_int(3)).unwrap();
    assert_eq!(v.status, Status::Pass, "{:?}", v.details);
}

#[test]
fn ladder_is_flat_for_cubic() {
    let o = orb(CUBIC, false);
    let taus = [num_complex::Complex64::new(0.0, 1.2), num_complex::Complex64::new(0.3, 1.7)];
    let r = zero_ladder(&o, &taus, &LADDER).unwrap();
    assert!(r.limit_spread() < 1e-4, "{:?}", r.to_json());
    // the cubic genus vanishes
    assert!(r.limits[0].norm() < 1e-4);
}

#[test]
fn foreign_phase_leaves_poles() {
    // θ = 1/2 is not a symmetry of x³
    assert!(pole_lines_cancel(&[rat(1, 3)], &[rat(1, 2)], &[rat_int(0)]).is_some());
    assert!(pole_lines_cancel(&[rat(1, 3)], &[rat(1, 3)], &[rat(2, 3)]).is_none());
}
