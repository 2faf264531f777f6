//! Executable checks: holomorphy certificates, modular and elliptic transformation
//! laws, mirror duality, the star substitution, spectral flow and oracle agreement.

mod holomorphy;
mod laws;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

pub use holomorphy::{
    certificate_summary, holomorphy_certificate, pole_lines_cancel, CertificateFailure, CertificateTrace, LineFamily,
    ReductionStep,
};
pub use laws::{
    check_holomorphy, check_jacobi_transformations, check_mirror_numeric, check_mirror_series, check_oracle,
    check_spectral_flow, check_star_substitution, zero_ladder, LawReport, LadderReport, JACOBI_LAWS, LADDER,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Residual {
    Exact,
    Value(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub max_residual: Residual,
    pub details: Vec<Value>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> Value {
        let r = match self.max_residual {
            Residual::Exact => json!("exact"),
            Residual::Value(x) => json!(x),
        };
        json!({"check": self.check, "status": self.status, "max_residual": r, "details": self.details})
    }
}

/// 1e−6 up to 100 group elements, 1e−5 above.
pub fn default_tolerance(group_order: usize) -> f64 {
    if group_order <= 100 {
        1e-6
    } else {
        1e-5
    }
}

/// Seeded `(z, τ)` pairs: `Re z ∈ [−0.5, 0.5]`, `Im z ∈ [−0.25, 0.25]`,
/// `Re τ ∈ [−0.5, 0.5]`, `Im τ ∈ [0.9, 1.5]`.
pub fn sample_points(seed: u64, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.25..0.25));
            let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.5));
            (z, tau)
        })
        .collect()
}

#[cfg(test)]
mod tests;
