//! Brute-force state counting: an independent route to the free-field products
//! and to the ground level of the group average. Nothing here expands a series;
//! [`BiSeries`] is only used as a container for the counts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactmath::{common_denominator, fmt_rat, rat_int, Rat};
use crate::qseries::{BiSeries, Window};
use crate::symmetry::SymmetryGroup;

pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("state enumeration exceeded the cap of {cap} states")]
    StateCap { cap: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModeFamily {
    /// `b`: charge `q`, levels `k ≥ 0`.
    B,
    /// `a`: charge `−q`, levels `k ≥ 1`.
    A,
    /// `φ`: charge `q − 1`, levels `k ≥ 1`.
    Phi,
    /// `ψ`: charge `1 − q`, levels `k ≥ 0`.
    Psi,
}

impl ModeFamily {
    pub const ALL: [ModeFamily; 4] = [ModeFamily::B, ModeFamily::A, ModeFamily::Phi, ModeFamily::Psi];

    pub fn is_fermionic(self) -> bool {
        matches!(self, ModeFamily::Phi | ModeFamily::Psi)
    }

    pub fn lowest_level(self) -> i64 {
        match self {
            ModeFamily::B | ModeFamily::Psi => 0,
            ModeFamily::A | ModeFamily::Phi => 1,
        }
    }

    pub fn charge(self, q: &Rat) -> Rat {
        match self {
            ModeFamily::B => q.clone(),
            ModeFamily::A => -q.clone(),
            ModeFamily::Phi => q - Rat::one(),
            ModeFamily::Psi => Rat::one() - q,
        }
    }
}

/// One creation mode with its `(J[0], L[0])` weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpec {
    pub family: ModeFamily,
    pub variable: usize,
    pub level: i64,
    pub charge: Rat,
}

impl ModeSpec {
    pub fn fermionic(&self) -> bool {
        self.family.is_fermionic()
    }
}

/// Every mode of every variable with level at most `qmax`.
pub fn mode_table(q: &[Rat], qmax: i64) -> Vec<ModeSpec> {
    let mut modes = Vec::new();
    for (i, qi) in q.iter().enumerate() {
        for family in ModeFamily::ALL {
            for level in family.lowest_level()..=qmax {
                modes.push(ModeSpec { family, variable: i, level, charge: family.charge(qi) });
            }
        }
    }
    modes
}

struct Enumerator {
    /// `(D·charge, level, fermionic)` per mode, zero modes first.
    modes: Vec<(i64, i64, bool)>,
    /// First mode with positive level.
    first_oscillator: usize,
    den: i64,
    qmax: i64,
    lo: i64,
    hi: i64,
    /// Largest `|D·charge|` per unit of level among oscillators.
    step: i64,
    cap: u64,
    states: u64,
    out: BiSeries<BigInt>,
}

impl Enumerator {
    fn visit(&mut self, idx: usize, level: i64, charge: i64, odd: bool) -> Result<(), OracleError> {
        let reach = self.step * (self.qmax - level);
        // oscillators move the charge by at most `step` per unit of level
        if charge - reach > self.hi || (idx >= self.first_oscillator && charge + reach < self.lo) {
            return Ok(());
        }
        if idx == self.modes.len() {
            self.states += 1;
            if self.states > self.cap {
                return Err(OracleError::StateCap { cap: self.cap });
            }
            if charge >= self.lo && charge <= self.hi {
                let c = if odd { -BigInt::one() } else { BigInt::one() };
                self.out.add_term(&rat_int(level), &Rat::new(charge.into(), self.den.into()), &c);
            }
            return Ok(());
        }
        let (dj, dl, fermionic) = self.modes[idx];
        let (mut l, mut j, mut odd) = (level, charge, odd);
        let mut count = 0;
        loop {
            self.visit(idx + 1, l, j, odd)?;
            count += 1;
            l += dl;
            j += dj;
            odd ^= fermionic;
            if (fermionic && count > 1) || l > self.qmax {
                break;
            }
            // zero modes only raise the charge
            if dl == 0 && j - self.step * (self.qmax - l) > self.hi {
                break;
            }
        }
        Ok(())
    }
}

/// `Σ (−1)^{#fermions} y^{ΣJ} q^{ΣL}` over free states with `ΣL ≤ qmax`, on `[ymin, ymax]`.
pub fn free_state_series(q: &[Rat], qmax: i64, ymin: &Rat, ymax: &Rat, cap: u64) -> Result<BiSeries<BigInt>, OracleError> {
    let den = common_denominator(q.iter()).max(1);
    let key = |x: &Rat| -> i64 { (x * rat_int(den)).to_integer().try_into().expect("charge key fits in i64") };
    let mut modes: Vec<(i64, i64, bool)> =
        mode_table(q, qmax).iter().map(|m| (key(&m.charge), m.level, m.fermionic())).collect();
    modes.sort_by_key(|m| m.1 > 0);
    let first_oscillator = modes.iter().position(|m| m.1 > 0).unwrap_or(modes.len());
    let step = q.iter().map(|x| key(x).max(den - key(x))).max().unwrap_or(0);
    let window = Window::rect(rat_int(qmax), ymin.clone(), ymax.clone());
    let mut e = Enumerator {
        modes,
        first_oscillator,
        den,
        qmax,
        lo: (ymin * rat_int(den)).ceil().to_integer().try_into().expect("window fits in i64"),
        hi: (ymax * rat_int(den)).floor().to_integer().try_into().expect("window fits in i64"),
        step,
        cap,
        states: 0,
        out: BiSeries::zero(den, window),
    };
    e.visit(0, 0, 0, false)?;
    Ok(e.out)
}

/// Ground level of the untwisted group average: zero-mode occupations `c ∈ Z≥0^d`
/// and fermion subsets `S` whose lattice vector `Σ (c_i − [i∈S]) v_i∨` pairs integrally with `G`.
pub fn zero_level_group_average(
    q: &[Rat],
    group: &SymmetryGroup,
    ymin: &Rat,
    ymax: &Rat,
    cap: u64,
) -> Result<BiSeries<BigInt>, OracleError> {
    let d = q.len();
    let den = common_denominator(q.iter()).max(1);
    let window = Window::rect(Rat::zero(), ymin.clone(), ymax.clone());
    let mut out = BiSeries::zero(den, window);
    // Work with integer keys D·charge; the window edges round inwards.
    let key = |x: &Rat| x * rat_int(den);
    let qk: Vec<i64> = q.iter().map(|x| key(x).to_integer().try_into().expect("charge key fits in i64")).collect();
    let lo: i64 = key(ymin).ceil().to_integer().try_into().expect("window fits in i64");
    let hi: i64 = key(ymax).floor().to_integer().try_into().expect("window fits in i64");
    let gens: Vec<(&[i64], i64)> = group.generators().iter().map(|g| (g.numerators(), g.denominator())).collect();
    let mut states = 0u64;
    for mask in 0u32..(1 << d) {
        let fermion = |i: usize| (mask >> i & 1) as i64;
        let base: i64 = (0..d).map(|i| fermion(i) * (den - qk[i])).sum();
        let sign = if mask.count_ones() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let mut occ = vec![0i64; d];
        let mut charge = base;
        loop {
            states += 1;
            if states > cap {
                return Err(OracleError::StateCap { cap });
            }
            let invariant = gens.iter().all(|(num, gd)| {
                let pairing: i128 = (0..d).map(|i| (occ[i] - fermion(i)) as i128 * num[i] as i128).sum();
                pairing % *gd as i128 == 0
            });
            if invariant && charge >= lo && charge <= hi {
                out.add_term(&Rat::zero(), &Rat::new(charge.into(), den.into()), &sign);
            }
            // odometer over occupations, bounded by the top of the window
            let mut i = 0;
            while i < d {
                occ[i] += 1;
                charge += qk[i];
                if charge <= hi {
                    break;
                }
                charge -= occ[i] * qk[i];
                occ[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    Ok(out)
}

/// Dimensions of the Jacobian ring of `Σ x_i^{a_i}` by weighted degree `Σ m_i / a_i`:
/// the monomials with every `m_i ≤ a_i − 2`.
pub fn fermat_jacobian_dims(exponents: &[i64]) -> BTreeMap<Rat, u64> {
    let mut dims = BTreeMap::new();
    let mut m = vec![0i64; exponents.len()];
    loop {
        let deg: Rat = m.iter().zip(exponents).map(|(&mi, &a)| Rat::new(mi.into(), a.into())).sum();
        *dims.entry(deg).or_insert(0) += 1;
        let mut i = 0;
        while i < m.len() {
            m[i] += 1;
            if m[i] <= exponents[i] - 2 {
                break;
            }
            m[i] = 0;
            i += 1;
        }
        if i == m.len() {
            break;
        }
    }
    dims
}

/// `χ = 2(h^{1,1} − h^{2,1})` for the quintic threefold, with `h^{1,1} = 1` and
/// `h^{2,1}` the degree-5 part of the Jacobian ring of `Σ x_i^5`.
pub fn quintic_euler_characteristic() -> i64 {
    let h21 = fermat_jacobian_dims(&[5; 5]).get(&Rat::one()).copied().unwrap_or(0);
    2 * (1 - h21 as i64)
}

/// Coefficientwise difference report between two integer series on one window.
pub fn first_mismatch(a: &BiSeries<BigInt>, b: &BiSeries<BigInt>) -> Option<String> {
    let ta = a.terms();
    let tb = b.terms();
    let mut all: BTreeMap<(Rat, Rat), (BigInt, BigInt)> = BTreeMap::new();
    for (q, y, c) in ta {
        all.entry((q, y)).or_insert((BigInt::zero(), BigInt::zero())).0 = c;
    }
    for (q, y, c) in tb {
        all.entry((q, y)).or_insert((BigInt::zero(), BigInt::zero())).1 = c;
    }
    all.into_iter()
        .find(|(_, (x, y))| x != y)
        .map(|((q, y), (x, z))| format!("q^{} y^{}: {} vs {}", fmt_rat(&q), fmt_rat(&y), x, z))
}

#[cfg(test)]
mod tests;
