//! Numerical Jacobi theta function
//! `Θ(ν,τ) = i q^{1/8} e^{−iπν}(1 − e^{2πiν}) Π_{n≥1}(1 − qⁿ)(1 − qⁿe^{2πiν})(1 − qⁿe^{−2πiν})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("Im(tau) = {0} is not positive")]
    NotUpperHalfPlane(f64),
}

/// Product truncation and the zero-detection tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParams {
    /// Number of product factors `n = 1..=terms`; `None` picks it per argument.
    pub terms: Option<usize>,
    pub tol: f64,
}

impl Default for ThetaParams {
    fn default() -> Self {
        ThetaParams { terms: None, tol: 1e-12 }
    }
}

impl ThetaParams {
    pub fn fixed(terms: usize) -> Self {
        assert!(terms >= 1);
        ThetaParams { terms: Some(terms), tol: 1e-12 }
    }

    /// Enough factors for `|q|^P < 1e−16` after the `e^{±2πiν}` growth is absorbed.
    pub fn terms_for(&self, nu: Complex64, tau: Complex64) -> usize {
        if let Some(p) = self.terms {
            return p;
        }
        let t = tau.im;
        let base = (16.0 * std::f64::consts::LN_10 / (2.0 * PI * t)).ceil();
        let shift = (nu.im.abs() / t).ceil();
        (base + shift) as usize + 3
    }

    /// `|q|^P`, the size of the first omitted correction.
    pub fn truncation_estimate(&self, nu: Complex64, tau: Complex64) -> f64 {
        (-2.0 * PI * tau.im * self.terms_for(nu, tau) as f64).exp()
    }
}

fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

pub fn theta_value(nu: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64, ThetaError> {
    if tau.im <= 0.0 {
        return Err(ThetaError::NotUpperHalfPlane(tau.im));
    }
    let i = Complex64::i();
    let q = e(tau);
    let x = e(nu);
    let xi = e(-nu);
    let one = Complex64::new(1.0, 0.0);
    let mut prod = i * e(tau / 8.0) * e(-nu / 2.0) * (one - x);
    let mut qn = one;
    for _ in 0..params.terms_for(nu, tau) {
        qn *= q;
        prod *= (one - qn) * (one - qn * x) * (one - qn * xi);
    }
    Ok(prod)
}

/// The four identities, named as in the report.
pub const IDENTITIES: [&str; 4] = ["tau+1", "nu+1", "nu+tau", "S"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    /// Largest residual `|lhs − rhs| / max(1, |rhs|)` per identity.
    pub max_residual: [f64; 4],
    /// Samples skipped for being too close to a zero: `(sample index, identity)`.
    pub skipped: Vec<(usize, usize)>,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.max_residual.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// Residuals of `Θ(ν,τ+1) = e^{iπ/4}Θ`, `Θ(ν+1,τ) = −Θ`, `Θ(ν+τ,τ) = −e^{−2πiν−iπτ}Θ`
/// and `Θ(ν/τ,−1/τ) = −i√(τ/i) e^{iπν²/τ} Θ` (principal root).
pub fn check_theta_identities(samples: &[(Complex64, Complex64)], params: &ThetaParams) -> Result<IdentityReport, ThetaError> {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let mut report = IdentityReport::default();
    for (s, &(nu, tau)) in samples.iter().enumerate() {
        let th = theta_value(nu, tau, params)?;
        let pairs = [
            // q^{1/8} picks up e^{iπ/4} under τ ↦ τ+1; the phase cancels in every theta ratio.
            (theta_value(nu, tau + one, params)?, (i * PI / 4.0).exp() * th),
            (theta_value(nu + one, tau, params)?, -th),
            (theta_value(nu + tau, tau, params)?, -(-2.0 * PI * i * nu - PI * i * tau).exp() * th),
            (
                theta_value(nu / tau, -one / tau, params)?,
                -i * (tau / i).sqrt() * (PI * i * nu * nu / tau).exp() * th,
            ),
        ];
        for (k, (lhs, rhs)) in pairs.into_iter().enumerate() {
            if rhs.norm() < params.tol || th.norm() < params.tol {
                report.skipped.push((s, k));
                continue;
            }
            report.max_residual[k] = report.max_residual[k].max(residual(lhs, rhs));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lattice_zeros() {
        let p = ThetaParams::default();
        assert!(theta_value(c(0.0, 0.0), c(0.0, 1.0), &p).unwrap().norm() < 1e-15);
        assert!(theta_value(c(1.0, 0.0), c(0.3, 1.1), &p).unwrap().norm() < 1e-14);
        assert!(theta_value(c(0.2, 1.3), c(0.2, 1.3), &p).unwrap().norm() < 1e-12);
        assert!(theta_value(c(0.1, 0.0), c(0.0, -1.0), &p).is_err());
    }

    #[test]
    fn named_examples() {
        let p = ThetaParams::default();
        let (nu, tau) = (c(0.3, 0.1), c(0.0, 1.2));
        let a = theta_value(nu + 1.0, tau, &p).unwrap();
        let b = theta_value(nu, tau, &p).unwrap();
        assert!((a + b).norm() < 1e-12);

        let r = check_theta_identities(&[(c(0.3, 0.1), c(0.0, 1.7))], &p).unwrap();
        assert!(r.max_residual[0] < 1e-12);
        let r = check_theta_identities(&[(c(0.2, 0.0), c(0.1, 1.3))], &p).unwrap();
        assert!(r.max_residual[3] < 1e-9, "{r:?}");
    }

    #[test]
    fn random_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<_> = (0..10)
            .map(|_| (c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3)), c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5))))
            .collect();
        let r = check_theta_identities(&samples, &ThetaParams::fixed(40)).unwrap();
        assert!(r.worst() < 1e-9, "{r:?}");
        assert!(r.skipped.is_empty());
    }

    #[test]
    fn odd_and_quasi_periodic() {
        let p = ThetaParams::default();
        let tau = c(0.23, 0.97);
        for nu in [c(0.11, 0.05), c(-0.4, 0.2), c(0.7, -0.3)] {
            let th = theta_value(nu, tau, &p).unwrap();
            assert!((theta_value(-nu, tau, &p).unwrap() + th).norm() < 1e-12);
            for t in -2..=3i32 {
                let shifted = theta_value(nu + t as f64, tau, &p).unwrap();
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                assert!((shifted - th * sign).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn tau_shift_phase() {
        let p = ThetaParams::default();
        let (nu, tau) = (c(0.17, 0.08), c(0.3, 1.1));
        let ratio = theta_value(nu, tau + 1.0, &p).unwrap() / theta_value(nu, tau, &p).unwrap();
        assert!((ratio - (Complex64::i() * PI / 4.0).exp()).norm() < 1e-13);
        let ratio_of_ratios = (theta_value(nu, tau + 1.0, &p).unwrap() / theta_value(2.0 * nu, tau + 1.0, &p).unwrap())
            / (theta_value(nu, tau, &p).unwrap() / theta_value(2.0 * nu, tau, &p).unwrap());
        assert!((ratio_of_ratios - 1.0).norm() < 1e-13);
    }

    #[test]
    fn more_terms_change_little() {
        let (nu, tau) = (c(0.31, 0.12), c(-0.2, 1.05));
        let a = theta_value(nu, tau, &ThetaParams::default()).unwrap();
        let b = theta_value(nu, tau, &ThetaParams::fixed(2 * ThetaParams::default().terms_for(nu, tau))).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
