use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactmath::{Coeff, Rat};
use crate::qseries::{BiSeries, QSeriesError, Window};

/// Contribution of one variable to a twisted sector, with the sector prefactor
/// `(y⁻¹q)^θ` folded into the `k = 0` numerator:
///
/// `(y^{−θ}q^{θ} − y^{1−q−θ}c̄) Π_{k≥1}(1 − y^{1−q}q^{k−θ}c̄)(1 − y^{q−1}q^{k+θ}c)
///  / Π_{k≥0}(1 − y^{q}q^{k+θ}c) Π_{k≥1}(1 − y^{−q}q^{k−θ}c̄)`.
///
/// `c` is the phase `e^{2πiθ(n₁)}` and `c̄` its inverse.
pub fn variable_factor<C: Coeff>(
    q: &Rat,
    theta: &Rat,
    c: &C,
    c_bar: &C,
    den: i64,
    window: &Window,
) -> Result<BiSeries<C>, QSeriesError> {
    assert!(*theta >= Rat::zero() && *theta < Rat::one());
    let one = Rat::one();
    let mut s = BiSeries::from_terms(
        den,
        window.clone(),
        [(theta.clone(), -theta.clone(), C::coeff_one()), (Rat::zero(), &one - q - theta, c_bar.negated())],
    );
    let qmax = &window.qmax;
    let mut k = one.clone();
    loop {
        let lo = &k - theta;
        if &lo > qmax {
            break;
        }
        s.mul_binomial(&lo, &(&one - q), c_bar);
        s.div_binomial(&lo, &-q.clone(), c_bar)?;
        let hi = &k + theta;
        if &hi <= qmax {
            s.mul_binomial(&hi, &(q - &one), c);
        }
        k += &one;
    }
    let mut k = Rat::zero();
    loop {
        let e = &k + theta;
        if &e > qmax {
            break;
        }
        s.div_binomial(&e, q, c)?;
        k += &one;
    }
    Ok(s)
}

/// Untwisted product over all variables with trivial phases.
pub fn cone_supertrace_series(q: &[Rat], den: i64, window: &Window) -> Result<BiSeries<BigInt>, QSeriesError> {
    let one = BigInt::one();
    let mut acc = BiSeries::one(den, window.clone());
    for qi in q {
        acc = acc.mul(&variable_factor(qi, &Rat::zero(), &one, &one, den, window)?)?;
    }
    Ok(acc)
}
