use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactmath::{common_denominator, fmt_rat, rat_int, Rat};
use crate::genus::{
    cone_supertrace_series, ell_genus_numeric, ell_genus_series, mirror_sign, sector_supertrace_series, GenusError,
    GenusOptions, Orbifold, SectorPath,
};
use crate::oracle::{first_mismatch, free_state_series, zero_level_group_average, DEFAULT_STATE_CAP};
use crate::qseries::Window;
use crate::symmetry::PhaseVector;
use crate::theta::residual;

use super::holomorphy::{certificate_summary, holomorphy_certificate};
use super::{Residual, Status, Verdict};

pub const JACOBI_LAWS: [&str; 4] = ["tau+1", "z+1", "z+tau", "S"];

/// z-ladder for the value at `z = 0`.
pub const LADDER: [f64; 2] = [1e-2, 1e-3];

/// Worst residual per law over the samples; near-pole samples are skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub check: String,
    pub laws: Vec<String>,
    pub max_residual: Vec<f64>,
    /// `(sample index, law index)` pairs that hit a pole.
    pub skipped: Vec<(usize, usize)>,
    pub samples: usize,
}

impl LawReport {
    pub fn worst(&self) -> f64 {
        self.max_residual.iter().cloned().fold(0.0, f64::max)
    }

    pub fn verdict(&self, tol: f64) -> Verdict {
        let evaluated = self.samples * self.laws.len() - self.skipped.len();
        let status = if evaluated == 0 {
            Status::Skipped
        } else if self.max_residual.iter().all(|r| *r < tol) {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut details: Vec<Value> = self
            .laws
            .iter()
            .zip(&self.max_residual)
            .map(|(l, r)| json!({"law": l, "max_residual": r, "tol": tol}))
            .collect();
        if !self.skipped.is_empty() {
            details.push(json!({"skipped": self.skipped}));
        }
        Verdict { check: self.check.clone(), status, max_residual: Residual::Value(self.worst()), details }
    }
}

type Pair = (Complex64, Complex64);

fn run_laws(
    check: &str,
    laws: &[&str],
    samples: &[Pair],
    eval: impl Fn(Complex64, Complex64) -> Vec<Result<Pair, GenusError>> + Sync,
) -> Result<LawReport, GenusError> {
    let rows: Vec<Vec<Result<Pair, GenusError>>> = samples.par_iter().map(|&(z, tau)| eval(z, tau)).collect();
    let mut report = LawReport {
        check: check.to_string(),
        laws: laws.iter().map(|s| s.to_string()).collect(),
        max_residual: vec![0.0; laws.len()],
        skipped: Vec::new(),
        samples: samples.len(),
    };
    for (s, row) in rows.into_iter().enumerate() {
        for (k, r) in row.into_iter().enumerate() {
            match r {
                Ok((lhs, rhs)) => report.max_residual[k] = report.max_residual[k].max(residual(lhs, rhs)),
                Err(GenusError::NearPole { .. }) => report.skipped.push((s, k)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

fn i_pi() -> Complex64 {
    Complex64::new(0.0, PI)
}

fn sign(cbar: i64) -> f64 {
    if cbar.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `τ+1`, `z+1`, `z+τ` and `S`, each compared against `Ell(z, τ)` times its factor.
pub fn check_jacobi_transformations(orb: &Orbifold, samples: &[Pair]) -> Result<LawReport, GenusError> {
    let c = orb.cbar() as f64;
    let s = sign(orb.cbar());
    let one = Complex64::new(1.0, 0.0);
    run_laws("jacobi", &JACOBI_LAWS, samples, |z, tau| {
        let base = ell_genus_numeric(orb, z, tau);
        let with = |lhs: Result<Complex64, GenusError>, factor: Complex64| -> Result<Pair, GenusError> {
            let b = base.clone()?;
            Ok((lhs?, factor * b))
        };
        vec![
            with(ell_genus_numeric(orb, z, tau + one), one),
            with(ell_genus_numeric(orb, z + one, tau), s * one),
            with(ell_genus_numeric(orb, z + tau, tau), s * (-i_pi() * c * (tau + 2.0 * z)).exp()),
            with(ell_genus_numeric(orb, z / tau, -one / tau), (i_pi() * c * z * z / tau).exp()),
        ]
    })
}

/// `Ell(τ−z, τ) = (−1)^ĉ e^{−iπĉ(τ−2z)} Ell(z, τ)`.
pub fn check_spectral_flow(orb: &Orbifold, samples: &[Pair]) -> Result<LawReport, GenusError> {
    let c = orb.cbar() as f64;
    let s = sign(orb.cbar());
    run_laws("flow", &["tau-z"], samples, |z, tau| {
        let r = (|| {
            let lhs = ell_genus_numeric(orb, tau - z, tau)?;
            let rhs = s * (-i_pi() * c * (tau - 2.0 * z)).exp() * ell_genus_numeric(orb, z, tau)?;
            Ok((lhs, rhs))
        })();
        vec![r]
    })
}

/// `Ell(W∨/G∨, z, τ) = y^{−ĉ} q^{ĉ/2} Ell(W/G, τ−z, τ)`.
pub fn check_star_substitution(orb: &Orbifold, samples: &[Pair]) -> Result<LawReport, GenusError> {
    let dual = orb.mirror()?;
    let c = orb.cbar() as f64;
    run_laws("star", &["star"], samples, |z, tau| {
        let r = (|| {
            let lhs = ell_genus_numeric(&dual, z, tau)?;
            let factor = (i_pi() * c * (tau - 2.0 * z)).exp();
            Ok((lhs, factor * ell_genus_numeric(orb, tau - z, tau)?))
        })();
        vec![r]
    })
}

/// `Ell(W/G) = (−1)^ĉ Ell(W∨/G∨)` pointwise.
pub fn check_mirror_numeric(orb: &Orbifold, samples: &[Pair]) -> Result<LawReport, GenusError> {
    let dual = orb.mirror()?;
    let s = sign(orb.cbar());
    run_laws("mirror-numeric", &["mirror"], samples, |z, tau| {
        let r = (|| Ok((ell_genus_numeric(orb, z, tau)?, s * ell_genus_numeric(&dual, z, tau)?)))();
        vec![r]
    })
}

/// Exact coefficientwise comparison of `Ell(W/G)` and `(−1)^ĉ Ell(W∨/G∨)` on the
/// common certified window.
pub fn check_mirror_series(orb: &Orbifold, opts: &GenusOptions) -> Result<Verdict, GenusError> {
    let dual = orb.mirror()?;
    let a = ell_genus_series(orb, opts)?;
    let b = ell_genus_series(&dual, opts)?;
    let y = if a.ywin < b.ywin { a.ywin.clone() } else { b.ywin.clone() };
    let w = Window::symmetric(opts.qmax.clone(), y.clone());
    let lhs = a.series.restrict(&w)?;
    let rhs = b.series.restrict(&w)?.scale(&mirror_sign(orb.cbar()));
    let mut keys: Vec<(Rat, Rat)> = lhs.terms().into_iter().chain(rhs.terms()).map(|(q, y, _)| (q, y)).collect();
    keys.sort();
    keys.dedup();
    let mismatches: Vec<Value> = keys
        .iter()
        .filter_map(|(q, e_y)| {
            let l = lhs.coefficient_at(q, e_y).unwrap();
            let r = rhs.coefficient_at(q, e_y).unwrap();
            (l != r).then(|| json!({"q": fmt_rat(q), "y": fmt_rat(e_y), "lhs": fmt_rat(&l), "rhs": fmt_rat(&r)}))
        })
        .collect();
    let status = if mismatches.is_empty() { Status::Pass } else { Status::Fail };
    let mut details = vec![json!({
        "qmax": fmt_rat(&opts.qmax),
        "ywin": fmt_rat(&y),
        "terms": lhs.term_count(),
        "dual_potential": dual.potential().canonical_text(),
        "dual_group": dual.group().generator_strings(),
    })];
    details.extend(mismatches.into_iter().take(10));
    Ok(Verdict { check: "mirror".into(), status, max_residual: Residual::Exact, details })
}

pub fn check_holomorphy(orb: &Orbifold) -> Verdict {
    match holomorphy_certificate(orb) {
        Ok(traces) => {
            let pairs: usize = traces.iter().map(|t| t.multiplicity).sum();
            let mut summary = certificate_summary(&traces);
            summary["atom_sector_pairs"] = json!(pairs);
            Verdict { check: "holo".into(), status: Status::Pass, max_residual: Residual::Exact, details: vec![summary] }
        }
        Err(f) => Verdict {
            check: "holo".into(),
            status: Status::Fail,
            max_residual: Residual::Exact,
            details: vec![json!({"failure": f.to_string(), "family": f.family.to_json()})],
        },
    }
}

/// Free-state enumeration against the untwisted product through `qmax` on `|e_y| ≤ y`,
/// and the zero-mode group average against the untwisted sector at `q⁰` on the
/// internal window for `y0`.
pub fn check_oracle(orb: &Orbifold, qmax: i64, y: &Rat, y0: &Rat) -> Result<Verdict, GenusError> {
    let q = &orb.charges().q;
    let mut details = Vec::new();
    let mut ok = true;

    let den = common_denominator(q.iter()).max(1);
    let qm = rat_int(qmax);
    let outer = Window::sheared(qm.clone(), -y - &qm - rat_int(1), y + &qm, rat_int(1));
    let cone = cone_supertrace_series(q, den, &outer)?.restrict(&Window::rect(qm, -y.clone(), y.clone()))?;
    match free_state_series(q, qmax, &-y.clone(), y, DEFAULT_STATE_CAP) {
        Ok(states) => {
            let m = first_mismatch(&states, &cone);
            ok &= m.is_none();
            details.push(json!({
                "comparison": "free states vs product",
                "qmax": qmax,
                "ywin": fmt_rat(y),
                "terms": cone.term_count(),
                "mismatch": m,
            }));
        }
        Err(e) => {
            ok = false;
            details.push(json!({"comparison": "free states vs product", "error": e.to_string()}));
        }
    }

    let zero = PhaseVector::zero(orb.dim());
    let sector = sector_supertrace_series(orb, &zero, &rat_int(0), y0, SectorPath::Auto)?;
    let w = orb.internal_window(&rat_int(0), y0);
    match zero_level_group_average(q, orb.group(), &w.ymin, &w.ymax, DEFAULT_STATE_CAP) {
        Ok(avg) => {
            let oracle: Vec<(Rat, Rat)> =
                avg.q_level(&rat_int(0)).into_iter().map(|(e, c): (Rat, BigInt)| (e, Rat::from_integer(c))).collect();
            let series = sector.q_level(&rat_int(0));
            let agree = oracle == series;
            ok &= agree;
            details.push(json!({"comparison": "zero modes vs untwisted sector", "terms": series.len(), "agree": agree}));
        }
        Err(e) => {
            ok = false;
            details.push(json!({"comparison": "zero modes vs untwisted sector", "error": e.to_string()}));
        }
    }
    let status = if ok { Status::Pass } else { Status::Fail };
    Ok(Verdict { check: "oracle".into(), status, max_residual: Residual::Exact, details })
}

/// `Ell(ε, τ)` along the ladder, with the `z = 0` value extrapolated from the last two
/// rungs assuming an even expansion `L + cε² + O(ε⁴)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    pub taus: Vec<Complex64>,
    pub eps: Vec<f64>,
    /// `values[t][e]`.
    pub values: Vec<Vec<Complex64>>,
    pub limits: Vec<Complex64>,
}

impl LadderReport {
    /// Largest difference between two τ at the same rung.
    pub fn rung_spread(&self, e: usize) -> f64 {
        spread(self.values.iter().map(|v| v[e]))
    }

    /// Largest difference between the extrapolated limits.
    pub fn limit_spread(&self) -> f64 {
        spread(self.limits.iter().copied())
    }

    pub fn to_json(&self) -> Value {
        let c = |v: &Complex64| json!([v.re, v.im]);
        json!({
            "eps": self.eps,
            "taus": self.taus.iter().map(c).collect::<Vec<_>>(),
            "values": self.values.iter().map(|r| r.iter().map(c).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "limits": self.limits.iter().map(c).collect::<Vec<_>>(),
            "limit_spread": self.limit_spread(),
        })
    }
}

fn spread(xs: impl Iterator<Item = Complex64> + Clone) -> f64 {
    let v: Vec<Complex64> = xs.collect();
    let mut m: f64 = 0.0;
    for a in &v {
        for b in &v {
            m = m.max((a - b).norm());
        }
    }
    m
}

pub fn zero_ladder(orb: &Orbifold, taus: &[Complex64], eps: &[f64]) -> Result<LadderReport, GenusError> {
    assert!(eps.len() >= 2);
    let values: Vec<Vec<Complex64>> = taus
        .iter()
        .map(|&tau| eps.iter().map(|&e| ell_genus_numeric(orb, Complex64::new(e, 0.0), tau)).collect())
        .collect::<Result<_, _>>()?;
    let n = eps.len();
    let (e1, e2) = (eps[n - 2] * eps[n - 2], eps[n - 1] * eps[n - 1]);
    let limits = values.iter().map(|v| (e1 * v[n - 1] - e2 * v[n - 2]) / (e1 - e2)).collect();
    Ok(LadderReport { taus: taus.to_vec(), eps: eps.to_vec(), values, limits })
}
