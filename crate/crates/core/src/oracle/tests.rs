use super::*;
use crate::exactmath::{rat, Coeff};
use crate::genus::{cone_supertrace_series, sector_supertrace_series, Orbifold, SectorPath};
use crate::potential::parse_potential;
use crate::symmetry::{grading_subgroup, PhaseVector};

fn count(s: &BiSeries<BigInt>, e_q: Rat, e_y: Rat) -> i64 {
    use num_traits::ToPrimitive;
    s.coefficient_at(&e_q, &e_y).unwrap().to_i64().unwrap()
}

#[test]
fn half_charge_ground_level() {
    let s = free_state_series(&[rat(1, 2)], 0, &rat_int(-3), &rat_int(3), DEFAULT_STATE_CAP).unwrap();
    // (1 − y^{1/2}) Σ_m y^{m/2} telescopes to 1 below the window edge
    assert_eq!(s.terms(), vec![(rat_int(0), rat_int(0), BigInt::one()), (rat_int(0), rat(7, 2), -BigInt::one())]
        .into_iter()
        .filter(|(_, y, _)| *y <= rat_int(3))
        .collect::<Vec<_>>());
    let total: BigInt = s.terms().into_iter().map(|t| t.2).sum();
    assert_eq!(total, BigInt::one());
}

#[test]
fn fifth_charge_ground_level() {
    let s = free_state_series(&[rat(1, 5)], 0, &rat_int(0), &rat(19, 20), DEFAULT_STATE_CAP).unwrap();
    for k in 0..4 {
        assert_eq!(count(&s, rat_int(0), rat(k, 5)), 1);
    }
    assert_eq!(count(&s, rat_int(0), rat(4, 5)), 0);
}

#[test]
fn no_variables() {
    let s = free_state_series(&[], 2, &rat_int(-1), &rat_int(1), DEFAULT_STATE_CAP).unwrap();
    assert_eq!(s.terms(), vec![(rat_int(0), rat_int(0), BigInt::one())]);
}

#[test]
fn cap_is_reported() {
    let err = free_state_series(&vec![rat(1, 5); 5], 3, &rat_int(-6), &rat_int(6), 1000).unwrap_err();
    assert_eq!(err, OracleError::StateCap { cap: 1000 });
}

#[test]
fn mode_weights() {
    let modes = mode_table(&[rat(1, 3)], 1);
    let b0 = modes.iter().find(|m| m.family == ModeFamily::B && m.level == 0).unwrap();
    assert_eq!(b0.charge, rat(1, 3));
    assert!(!modes.iter().any(|m| m.family == ModeFamily::A && m.level == 0));
    let psi0 = modes.iter().find(|m| m.family == ModeFamily::Psi && m.level == 0).unwrap();
    assert_eq!(psi0.charge, rat(2, 3));
    assert!(psi0.fermionic());
    let phi1 = modes.iter().find(|m| m.family == ModeFamily::Phi).unwrap();
    assert_eq!((phi1.level, phi1.charge.clone()), (1, rat(-2, 3)));
}

#[test]
fn matches_cone_product() {
    for q in [vec![rat(1, 2)], vec![rat(1, 5)], vec![rat(1, 4), rat(1, 4)], vec![rat(1, 3), rat(1, 6)]] {
        let den = common_denominator(q.iter());
        let y = rat_int(3);
        let outer = Window::sheared(rat_int(2), -&y - rat_int(3), &y + rat_int(2), rat_int(1));
        let cone = cone_supertrace_series(&q, den, &outer).unwrap();
        let cone = cone.restrict(&Window::rect(rat_int(2), -y.clone(), y.clone())).unwrap();
        let states = free_state_series(&q, 2, &-y.clone(), &y, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(first_mismatch(&states, &cone), None, "{q:?}");
    }
}

fn orbifold(text: &str) -> Orbifold {
    let p = parse_potential(text).unwrap();
    let g = grading_subgroup(&p).unwrap();
    Orbifold::new(p, g).unwrap()
}

#[test]
fn even_occupancy_for_two_squares() {
    let o = orbifold("x1^2+x2^2");
    let s = zero_level_group_average(&o.charges().q, o.group(), &rat_int(0), &rat_int(3), DEFAULT_STATE_CAP).unwrap();
    let free = free_state_series(&o.charges().q, 0, &rat_int(0), &rat_int(3), DEFAULT_STATE_CAP).unwrap();
    // every quantum carries y^{1/2}, so even occupancy means integral y-exponent
    let even = free.filter_keys(|_, ky| ky % 2 == 0);
    assert_eq!(first_mismatch(&s, &even), None);
    assert_eq!(count(&s, rat_int(0), rat_int(0)), 1);
}

#[test]
fn quintic_drops_single_quanta() {
    let o = orbifold("x1^5+x2^5+x3^5+x4^5+x5^5");
    let s = zero_level_group_average(&o.charges().q, o.group(), &rat_int(0), &rat_int(2), DEFAULT_STATE_CAP).unwrap();
    assert_eq!(count(&s, rat_int(0), rat(1, 5)), 0);
    assert_eq!(count(&s, rat_int(0), rat_int(0)), 1);
    assert_eq!(count(&s, rat_int(0), rat_int(1)), 101);
}

#[test]
fn trivial_group_is_free_ground_level() {
    let q = vec![rat(1, 3); 3];
    let g = SymmetryGroup::trivial(3);
    let s = zero_level_group_average(&q, &g, &rat_int(-1), &rat_int(4), DEFAULT_STATE_CAP).unwrap();
    let free = free_state_series(&q, 0, &rat_int(-1), &rat_int(4), DEFAULT_STATE_CAP).unwrap();
    assert_eq!(first_mismatch(&s, &free), None);
}

#[test]
fn matches_untwisted_sector() {
    for text in ["x1^2+x2^2", "x1^3+x2^3+x3^3", "x1^5+x2^5+x3^5+x4^5+x5^5", "x1^3*x2+x2^4+x3^4+x4^4"] {
        let o = orbifold(text);
        let y = rat_int(3);
        let zero = PhaseVector::zero(o.dim());
        let sector = sector_supertrace_series(&o, &zero, &rat_int(0), &y, SectorPath::Auto).unwrap();
        let w = o.internal_window(&rat_int(0), &y);
        let s = zero_level_group_average(&o.charges().q, o.group(), &w.ymin, &w.ymax, DEFAULT_STATE_CAP).unwrap();
        let oracle: Vec<(Rat, Rat)> = s.q_level(&rat_int(0)).into_iter().map(|(y, c)| (y, Rat::from_integer(c))).collect();
        assert_eq!(oracle, sector.q_level(&rat_int(0)), "{text}");
        assert!(!oracle.is_empty());
        assert!(oracle.iter().all(|(_, c)| !c.is_zero_coeff()));
    }
}

#[test]
fn quintic_jacobian_ring() {
    let dims = fermat_jacobian_dims(&[5; 5]);
    assert_eq!(dims[&rat_int(0)], 1);
    assert_eq!(dims[&rat_int(1)], 101);
    assert_eq!(dims.values().sum::<u64>(), 1024);
    assert_eq!(quintic_euler_characteristic(), -200);
}
