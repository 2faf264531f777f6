use num_complex::Complex64;

use crate::exactmath::to_f64;
use crate::symmetry::PhaseVector;
use crate::theta::{theta_value, ThetaParams};

use super::{GenusError, Orbifold};

/// Denominator arguments closer than this to `Zτ + Z` count as poles.
pub const POLE_DISTANCE: f64 = 1e-6;
/// Perturbation step for near-pole retries, applied along `e^{iπ/4}`.
pub const RETRY_STEP: f64 = 1e-3;
pub const MAX_RETRIES: u32 = 3;

fn lattice_distance(nu: Complex64, tau: Complex64) -> f64 {
    let a = nu.im / tau.im;
    let b = nu.re - a * tau.re;
    let nearest = tau * a.round() + b.round();
    (nu - nearest).norm()
}

/// `e^{−2πizθ} Θ((1−q)z − θτ − θ₁, τ) / Θ(qz + θτ + θ₁, τ)`, or `None` at a pole.
fn ratio(q: f64, theta: f64, theta1: f64, z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Option<Complex64>, GenusError> {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let num_arg = z * (1.0 - q) - tau * theta - theta1;
    let den_arg = z * q + tau * theta + theta1;
    if lattice_distance(den_arg, tau) < POLE_DISTANCE {
        return Ok(None);
    }
    let num = theta_value(num_arg, tau, params)?;
    let den = theta_value(den_arg, tau, params)?;
    Ok(Some((-two_pi_i * z * theta).exp() * num / den))
}

/// One `(n, n₁)` term of the theta-ratio form of the genus.
pub fn sector_value_numeric(
    orb: &Orbifold,
    n: &PhaseVector,
    n1: &PhaseVector,
    z: Complex64,
    tau: Complex64,
) -> Result<Complex64, GenusError> {
    let params = ThetaParams::default();
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, q) in orb.charges().q.iter().enumerate() {
        let r = ratio(to_f64(q), to_f64(&n.coord(j)), to_f64(&n1.coord(j)), z, tau, &params)?;
        acc *= r.ok_or_else(|| GenusError::NearPole { j, n: n.to_string(), n1: n1.to_string() })?;
    }
    Ok(acc)
}

/// `(1/|G|) Σ_{n,n₁∈G} Π_j e^{−2πizθ_j(n)} Θ(…)/Θ(…)`.
pub fn ell_genus_numeric(orb: &Orbifold, z: Complex64, tau: Complex64) -> Result<Complex64, GenusError> {
    let params = ThetaParams::default();
    let d = orb.dim();
    // Per variable, a table over (θ_j(n), θ_j(n₁)) value indices.
    let mut tables: Vec<Vec<Vec<Option<Complex64>>>> = Vec::with_capacity(d);
    for j in 0..d {
        let q = to_f64(&orb.charges().q[j]);
        let vals: Vec<f64> = orb.theta_values(j).iter().map(to_f64).collect();
        let mut t = Vec::with_capacity(vals.len());
        for &a in &vals {
            let mut row = Vec::with_capacity(vals.len());
            for &b in &vals {
                row.push(ratio(q, a, b, z, tau, &params)?);
            }
            t.push(row);
        }
        tables.push(t);
    }
    let g = orb.group().order();
    let mut total = Complex64::new(0.0, 0.0);
    for n in 0..g {
        for n1 in 0..g {
            let mut acc = Complex64::new(1.0, 0.0);
            for (j, table) in tables.iter().enumerate() {
                match table[orb.theta_index(n, j)][orb.theta_index(n1, j)] {
                    Some(v) => acc *= v,
                    None => {
                        let els = orb.group().elements();
                        return Err(GenusError::NearPole { j, n: els[n].to_string(), n1: els[n1].to_string() });
                    }
                }
            }
            total += acc;
        }
    }
    Ok(total / g as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericValue {
    pub value: Complex64,
    /// The `z` actually used after perturbation.
    pub z: Complex64,
    pub retries: u32,
}

/// [`ell_genus_numeric`], moving `z` by [`RETRY_STEP`]`·e^{iπ/4}` up to [`MAX_RETRIES`] times at poles.
pub fn ell_genus_numeric_retry(orb: &Orbifold, z: Complex64, tau: Complex64) -> Result<NumericValue, GenusError> {
    let step = Complex64::from_polar(RETRY_STEP, std::f64::consts::FRAC_PI_4);
    let mut zz = z;
    let mut retries = 0;
    loop {
        match ell_genus_numeric(orb, zz, tau) {
            Ok(value) => return Ok(NumericValue { value, z: zz, retries }),
            Err(GenusError::NearPole { .. }) if retries < MAX_RETRIES => {
                retries += 1;
                zz += step;
            }
            Err(e) => return Err(e),
        }
    }
}
