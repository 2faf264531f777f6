//! Cancellation of denominator theta zeros, atom by atom and sector pair by sector pair.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactmath::{fmt_rat, is_integer, rat_int, Rat};
use crate::genus::Orbifold;
use crate::potential::{decompose_atoms, Atom, AtomKind};

/// Zero set `{a z + α τ + β ∈ Zτ + Z}` of `Θ(a z + α τ + β, τ)`, a family of lines in `(z, τ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineFamily {
    pub a: Rat,
    pub alpha: Rat,
    pub beta: Rat,
}

impl LineFamily {
    pub fn new(a: Rat, alpha: Rat, beta: Rat) -> Self {
        assert!(!a.is_zero(), "line family with zero slope");
        LineFamily { a, alpha, beta }
    }

    /// Zeros of the denominator `Θ(q z + θ τ + θ₁)`.
    pub fn denominator(q: &Rat, theta: &Rat, theta1: &Rat) -> Self {
        Self::new(q.clone(), theta.clone(), theta1.clone())
    }

    /// Zeros of the numerator `Θ((1−q) z − θ τ − θ₁)`.
    pub fn numerator(q: &Rat, theta: &Rat, theta1: &Rat) -> Self {
        Self::new(Rat::one() - q, -theta.clone(), -theta1.clone())
    }

    /// Every line of `self` is a line of `other`: with `r = a₂/a₁`,
    /// `r ∈ Z`, `rα₁ − α₂ ∈ Z` and `rβ₁ − β₂ ∈ Z`.
    pub fn is_contained_in(&self, other: &LineFamily) -> bool {
        let r = &other.a / &self.a;
        is_integer(&r) && is_integer(&(&r * &self.alpha - &other.alpha)) && is_integer(&(&r * &self.beta - &other.beta))
    }

    /// The lines as `z = uτ + v`, for `(u, v)` in the cell `[0, period)²`.
    pub fn lines_in_cell(&self, period: i64) -> Vec<(Rat, Rat)> {
        let coords = |shift: &Rat| -> Vec<Rat> {
            // u = (p − shift)/a ∈ [0, period)
            let ends = [shift.clone(), shift + &self.a * rat_int(period)];
            let lo = ends.iter().min().unwrap().floor().to_integer().to_i64().unwrap();
            let hi = ends.iter().max().unwrap().ceil().to_integer().to_i64().unwrap();
            (lo..=hi)
                .map(|p| (rat_int(p) - shift) / &self.a)
                .filter(|u| !u.is_negative() && *u < rat_int(period))
                .collect()
        };
        let us = coords(&self.alpha);
        let vs = coords(&self.beta);
        us.iter().flat_map(|u| vs.iter().map(move |v| (u.clone(), v.clone()))).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"a": fmt_rat(&self.a), "alpha": fmt_rat(&self.alpha), "beta": fmt_rat(&self.beta)})
    }
}

impl std::fmt::Display for LineFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})z + ({})τ + ({}) ∈ Zτ + Z", fmt_rat(&self.a), fmt_rat(&self.alpha), fmt_rat(&self.beta))
    }
}

/// One round of the chain reduction: the leftover pole family `(1/m, α₂, β₂)` meets the
/// denominator `(k/(ml), α₃, β₃)`; both sit inside the numerator `(k/m, α₁, β₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionStep {
    pub m: i64,
    pub k: i64,
    pub l: i64,
    pub alpha2: Rat,
    pub beta2: Rat,
    pub alpha3: Rat,
    pub beta3: Rat,
    /// The smallest non-negative `(p′, q′)`; `None` if the two families share no line.
    pub pq: Option<(i64, i64)>,
    pub m_new: i64,
    pub alpha2_new: Rat,
    pub beta2_new: Rat,
    pub k_new: i64,
}

impl ReductionStep {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m, "k": self.k, "l": self.l,
            "alpha2": fmt_rat(&self.alpha2), "beta2": fmt_rat(&self.beta2),
            "alpha3": fmt_rat(&self.alpha3), "beta3": fmt_rat(&self.beta3),
            "pq": self.pq.map(|(p, q)| vec![p, q]),
            "m_new": self.m_new, "alpha2_new": fmt_rat(&self.alpha2_new),
            "beta2_new": fmt_rat(&self.beta2_new), "k_new": self.k_new,
        })
    }
}

/// Certificate for one atom and one class of sector pairs (those with the same
/// phases on the atom's variables).
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTrace {
    pub kind: AtomKind,
    pub vars: Vec<usize>,
    /// A representative sector pair `(n, n₁)`, as group element indices.
    pub sector: (usize, usize),
    /// Number of sector pairs of `G × G` in this class.
    pub multiplicity: usize,
    pub theta: Vec<Rat>,
    pub theta1: Vec<Rat>,
    /// `(denominator variable, numerator variable)` pairs whose zero lines are contained.
    pub cancellations: Vec<(usize, usize)>,
    pub steps: Vec<ReductionStep>,
}

impl CertificateTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "atom": self.kind,
            "vars": self.vars,
            "theta": self.theta.iter().map(fmt_rat).collect::<Vec<_>>(),
            "theta1": self.theta1.iter().map(fmt_rat).collect::<Vec<_>>(),
            "pairs": self.multiplicity,
            "cancellations": self.cancellations,
            "steps": self.steps.iter().map(ReductionStep::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind:?} atom {vars:?}, sector (n, n₁) = ({n}, {n1}): {reason}; uncancelled {family}")]
pub struct CertificateFailure {
    pub kind: AtomKind,
    pub vars: Vec<usize>,
    pub n: String,
    pub n1: String,
    pub family: LineFamily,
    pub reason: String,
}

struct AtomData<'a> {
    atom: &'a Atom,
    q: Vec<Rat>,
    theta: Vec<Rat>,
    theta1: Vec<Rat>,
}

impl AtomData<'_> {
    fn den(&self, i: usize) -> LineFamily {
        LineFamily::denominator(&self.q[i], &self.theta[i], &self.theta1[i])
    }

    fn num(&self, i: usize) -> LineFamily {
        LineFamily::numerator(&self.q[i], &self.theta[i], &self.theta1[i])
    }

    fn fail(&self, family: LineFamily, reason: impl Into<String>) -> (LineFamily, String) {
        (family, reason.into())
    }
}

type Partial = Result<(Vec<(usize, usize)>, Vec<ReductionStep>), (LineFamily, String)>;

fn integral_pairs(d: &AtomData, weights: impl Fn(usize) -> Vec<(i64, usize)>) -> Result<(), (LineFamily, String)> {
    for i in 0..d.q.len() {
        for th in [&d.theta, &d.theta1] {
            let s: Rat = weights(i).iter().map(|&(w, j)| rat_int(w) * &th[j]).sum();
            if !is_integer(&s) {
                return Err(d.fail(d.den(i), format!("phase condition fails at position {i}")));
            }
        }
    }
    Ok(())
}

fn fermat(d: &AtomData) -> Partial {
    let a = d.atom.exponents[0];
    integral_pairs(d, |_| vec![(a, 0)])?;
    if !d.den(0).is_contained_in(&d.num(0)) {
        return Err(d.fail(d.den(0), "denominator lines not among numerator lines"));
    }
    Ok((vec![(d.atom.vars[0], d.atom.vars[0])], Vec::new()))
}

fn cyclic(d: &AtomData) -> Partial {
    let k = d.q.len();
    integral_pairs(d, |i| vec![(d.atom.exponents[i], i), (1, (i + 1) % k)])?;
    let mut pairs = Vec::new();
    for i in 0..k {
        let j = (i + 1) % k;
        if !d.den(i).is_contained_in(&d.num(j)) {
            return Err(d.fail(d.den(i), format!("denominator {i} not inside numerator {j}")));
        }
        pairs.push((d.atom.vars[i], d.atom.vars[j]));
    }
    Ok((pairs, Vec::new()))
}

/// Smallest `x ≥ 0` with `k·x ≡ c (mod l)`, given `gcd(k, l) | c`.
fn solve_congruence(k: i64, c: i64, l: i64) -> i64 {
    let g = k.gcd(&l);
    let (k, c, l) = (k / g, c / g, l / g);
    if l == 1 {
        return 0;
    }
    let inv = num_integer::Integer::extended_gcd(&k.rem_euclid(l), &l).x.rem_euclid(l);
    (inv as i128 * c.rem_euclid(l) as i128 % l as i128) as i64
}

fn as_int(x: &Rat) -> Option<i64> {
    is_integer(x).then(|| x.to_integer().to_i64().unwrap())
}

fn chain(d: &AtomData) -> Partial {
    let len = d.q.len();
    let last = len - 1;
    let ex = &d.atom.exponents;
    integral_pairs(d, |i| if i == last { vec![(ex[i], i)] } else { vec![(ex[i], i), (1, i + 1)] })?;
    let vars = &d.atom.vars;

    let mut m = ex[last];
    let mut k = ex[last] - 1;
    if d.q[last] != Rat::new(1.into(), m.into()) {
        return Err(d.fail(d.den(last), "last charge is not 1/a"));
    }
    let (mut alpha2, mut beta2) = (d.theta[last].clone(), d.theta1[last].clone());
    let mut numerator = d.num(last);
    let mut pairs = Vec::new();
    let mut steps = Vec::new();
    let mut leftover = true;

    for i in (0..last).rev() {
        let residual = LineFamily::new(Rat::new(1.into(), m.into()), alpha2.clone(), beta2.clone());
        if !leftover {
            // the reduction closed; the remaining links cancel pairwise
            if !d.den(i).is_contained_in(&d.num(i + 1)) {
                return Err(d.fail(d.den(i), format!("denominator {i} not inside numerator {}", i + 1)));
            }
            pairs.push((vars[i], vars[i + 1]));
            continue;
        }
        if !(is_integer(&(rat_int(m) * &alpha2)) && is_integer(&(rat_int(m) * &beta2))) || k.gcd(&m) != 1 {
            return Err(d.fail(residual, "standing hypothesis m·α₂, m·β₂ ∈ Z, (m, k) = 1 fails"));
        }
        let l = ex[i];
        let (alpha3, beta3) = (d.theta[i].clone(), d.theta1[i].clone());
        if d.q[i] != Rat::new(k.into(), (m * l).into()) {
            return Err(d.fail(d.den(i), format!("charge {i} is not k/(ml)")));
        }
        if !d.den(i).is_contained_in(&numerator) || !residual.is_contained_in(&numerator) {
            return Err(d.fail(d.den(i), format!("pole families not inside numerator {}", i + 1)));
        }
        pairs.push((vars[i], vars[i + 1]));
        let g = k.gcd(&l);
        let ca = rat_int(k) * &alpha2 - rat_int(l) * &alpha3;
        let cb = rat_int(k) * &beta2 - rat_int(l) * &beta3;
        let meet = match (as_int(&ca), as_int(&cb)) {
            (Some(a), Some(b)) => a % g == 0 && b % g == 0,
            _ => false,
        };
        if !meet {
            steps.push(ReductionStep {
                m,
                k,
                l,
                alpha2: alpha2.clone(),
                beta2: beta2.clone(),
                alpha3,
                beta3,
                pq: None,
                m_new: m,
                alpha2_new: alpha2.clone(),
                beta2_new: beta2.clone(),
                k_new: k,
            });
            leftover = false;
            continue;
        }
        let (ca, cb) = (as_int(&ca).unwrap(), as_int(&cb).unwrap());
        let p1 = solve_congruence(k, ca, l);
        let q1 = solve_congruence(k, cb, l);
        debug_assert_eq!((p1 * k - ca).rem_euclid(l), 0);
        let m_new = m * l / g;
        let gl = Rat::new(g.into(), l.into());
        let alpha2_new = &gl * (&alpha2 - rat_int(p1));
        let beta2_new = &gl * (&beta2 - rat_int(q1));
        let k_new = (m * l - k) / g;
        steps.push(ReductionStep {
            m,
            k,
            l,
            alpha2: alpha2.clone(),
            beta2: beta2.clone(),
            alpha3: alpha3.clone(),
            beta3: beta3.clone(),
            pq: Some((p1, q1)),
            m_new,
            alpha2_new: alpha2_new.clone(),
            beta2_new: beta2_new.clone(),
            k_new,
        });
        // the next round starts from the numerator of variable i
        let next = d.num(i);
        if next.a != Rat::new(k_new.into(), m_new.into())
            || !is_integer(&(rat_int(k_new) * &alpha2_new + &alpha3))
            || !is_integer(&(rat_int(k_new) * &beta2_new + &beta3))
        {
            return Err(d.fail(next, format!("reduced family does not match numerator {i}")));
        }
        m = m_new;
        k = k_new;
        alpha2 = alpha2_new;
        beta2 = beta2_new;
        numerator = next;
    }
    if leftover {
        let residual = LineFamily::new(Rat::new(1.into(), m.into()), alpha2, beta2);
        if !residual.is_contained_in(&numerator) {
            return Err(d.fail(residual, "leftover poles not inside the first numerator"));
        }
        pairs.push((vars[last], vars[0]));
    }
    Ok((pairs, steps))
}

/// Multiset comparison of zero lines in one period cell: every denominator line
/// must occur at least as often among the numerator lines. Returns an offending line.
pub fn pole_lines_cancel(q: &[Rat], theta: &[Rat], theta1: &[Rat]) -> Option<(Rat, Rat)> {
    let period = q.iter().fold(1i64, |l, x| l.lcm(&x.denom().to_i64().unwrap()));
    let mut count: BTreeMap<(Rat, Rat), i64> = BTreeMap::new();
    for i in 0..q.len() {
        for line in LineFamily::numerator(&q[i], &theta[i], &theta1[i]).lines_in_cell(period) {
            *count.entry(line).or_insert(0) += 1;
        }
        for line in LineFamily::denominator(&q[i], &theta[i], &theta1[i]).lines_in_cell(period) {
            *count.entry(line).or_insert(0) -= 1;
        }
    }
    count.into_iter().find(|(_, c)| *c < 0).map(|(line, _)| line)
}

/// Certificates for every atom and every sector pair of `G × G`, grouped by the
/// phases seen by the atom. Also runs [`pole_lines_cancel`] on each class.
pub fn holomorphy_certificate(orb: &Orbifold) -> Result<Vec<CertificateTrace>, CertificateFailure> {
    let atoms = decompose_atoms(orb.potential()).expect("validated potential");
    let elements = orb.group().elements();
    let mut traces = Vec::new();
    for atom in &atoms.atoms {
        // distinct restrictions of θ(n) to the atom, with a representative and a count
        let mut classes: BTreeMap<Vec<Rat>, (usize, usize)> = BTreeMap::new();
        for (idx, n) in elements.iter().enumerate() {
            let key: Vec<Rat> = atom.vars.iter().map(|&v| n.coord(v)).collect();
            classes.entry(key).or_insert((idx, 0)).1 += 1;
        }
        let q: Vec<Rat> = atom.vars.iter().map(|&v| orb.charges().q[v].clone()).collect();
        for (theta, &(n, cn)) in &classes {
            for (theta1, &(n1, cn1)) in &classes {
                let data = AtomData { atom, q: q.clone(), theta: theta.clone(), theta1: theta1.clone() };
                let result = match atom.kind {
                    AtomKind::Fermat => fermat(&data),
                    AtomKind::Loop => cyclic(&data),
                    AtomKind::Chain => chain(&data),
                };
                let failure = |family: LineFamily, reason: String| CertificateFailure {
                    kind: atom.kind,
                    vars: atom.vars.clone(),
                    n: elements[n].to_string(),
                    n1: elements[n1].to_string(),
                    family,
                    reason,
                };
                let (cancellations, steps) = result.map_err(|(f, r)| failure(f, r))?;
                if let Some((u, v)) = pole_lines_cancel(&q, theta, theta1) {
                    let family = data.den(0);
                    return Err(failure(family, format!("pole line z = ({})τ + ({}) survives", fmt_rat(&u), fmt_rat(&v))));
                }
                traces.push(CertificateTrace {
                    kind: atom.kind,
                    vars: atom.vars.clone(),
                    sector: (n, n1),
                    multiplicity: cn * cn1,
                    theta: theta.clone(),
                    theta1: theta1.clone(),
                    cancellations,
                    steps,
                });
            }
        }
    }
    Ok(traces)
}

/// Summary counts: certificates per atom kind and the longest chain reduction.
pub fn certificate_summary(traces: &[CertificateTrace]) -> Value {
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for t in traces {
        *kinds.entry(format!("{:?}", t.kind).to_lowercase()).or_insert(0) += 1;
    }
    let max_steps = traces.iter().map(|t| t.steps.len()).max().unwrap_or(0);
    json!({"certificates": kinds, "max_chain_steps": max_steps})
}
