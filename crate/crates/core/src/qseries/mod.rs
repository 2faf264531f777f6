//! Truncated bivariate series in `y` and `q` with exponents in `(1/D)·Z`.
//!
//! A [`Window`] keeps `0 ≤ e_q ≤ qmax`, `e_y ≥ ymin` and
//! `e_y + slope·(e_q − qmax) ≤ ymax`. With `slope = 0` this is the plain
//! rectangle. A positive slope turns the upper bound into a bound on the weight
//! `e_y + slope·e_q`, which makes truncated products exact whenever every
//! factor has non-negative weight.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactmath::{fmt_rat, to_f64, Coeff, ComplexValue, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("series windows differ: {0} vs {1}")]
    WindowMismatch(String, String),
    #[error("non-expandable factor 1 - y^{e_y} q^{e_q}")]
    NonExpandable { e_y: String, e_q: String },
    #[error("exponent (q^{e_q}, y^{e_y}) lies outside the window {window}")]
    OutOfWindow { e_q: String, e_y: String, window: String },
    #[error("window {inner} is not contained in {outer}")]
    NotSubwindow { inner: String, outer: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub qmax: Rat,
    pub ymin: Rat,
    pub ymax: Rat,
    pub slope: Rat,
}

impl Window {
    pub fn rect(qmax: Rat, ymin: Rat, ymax: Rat) -> Self {
        Window { qmax, ymin, ymax, slope: Rat::zero() }
    }

    pub fn symmetric(qmax: Rat, y: Rat) -> Self {
        Window::rect(qmax, -y.clone(), y)
    }

    pub fn sheared(qmax: Rat, ymin: Rat, ymax: Rat, slope: Rat) -> Self {
        assert!(slope >= Rat::zero());
        Window { qmax, ymin, ymax, slope }
    }

    pub fn contains(&self, e_q: &Rat, e_y: &Rat) -> bool {
        *e_q >= Rat::zero()
            && e_q <= &self.qmax
            && e_y >= &self.ymin
            && e_y + &self.slope * (e_q - &self.qmax) <= self.ymax
    }

    /// Upper y-bound at level `e_q`.
    pub fn ymax_at(&self, e_q: &Rat) -> Rat {
        &self.ymax + &self.slope * (&self.qmax - e_q)
    }

    /// `self ⊆ outer` as regions of the exponent plane.
    pub fn is_within(&self, outer: &Window) -> bool {
        // Both upper bounds are affine in e_q, so comparing at the two ends suffices.
        let zero = Rat::zero();
        self.qmax <= outer.qmax
            && self.ymin >= outer.ymin
            && self.ymax_at(&zero) <= outer.ymax_at(&zero)
            && self.ymax_at(&self.qmax) <= outer.ymax_at(&self.qmax)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q<={}, y in [{}, {}]", fmt_rat(&self.qmax), fmt_rat(&self.ymin), fmt_rat(&self.ymax))?;
        if !self.slope.is_zero() {
            write!(f, " slope {}", fmt_rat(&self.slope))?;
        }
        Ok(())
    }
}

fn floor_i64(x: &Rat) -> i64 {
    x.floor().to_integer().to_i64().expect("exponent fits in i64")
}

fn ceil_i64(x: &Rat) -> i64 {
    x.ceil().to_integer().to_i64().expect("exponent fits in i64")
}

/// Integer grid of a window at denominator `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Grid {
    ymin: i64,
    /// Inclusive upper y-key per q-key `0..=qmax_k`.
    ymax: Vec<i64>,
}

impl Grid {
    fn new(w: &Window, den: i64) -> Self {
        let d = Rat::from_integer(den.into());
        let qmax_k = floor_i64(&(&w.qmax * &d));
        let ymin = ceil_i64(&(&w.ymin * &d));
        let ymax = (0..=qmax_k.max(-1))
            .map(|k| floor_i64(&(w.ymax_at(&Rat::new(k.into(), den.into())) * &d)))
            .collect();
        Grid { ymin, ymax }
    }

    fn width(&self, kq: usize) -> usize {
        (self.ymax[kq] - self.ymin + 1).max(0) as usize
    }
}

/// Exact truncated series `Σ c · q^{e_q} y^{e_y}`; exponents are stored as `D·e`.
/// Equality compares windows and terms, not the denominator.
#[derive(Clone)]
pub struct BiSeries<C: Coeff> {
    den: i64,
    window: Window,
    grid: Grid,
    /// `levels[kq][ky - grid.ymin]`.
    levels: Vec<Vec<C>>,
}

fn rat_of(k: i64, den: i64) -> Rat {
    Rat::new(k.into(), den.into())
}

fn key_of(x: &Rat, den: i64) -> Option<i64> {
    let s = x * Rat::from_integer(den.into());
    s.is_integer().then(|| s.to_integer().to_i64().unwrap())
}

fn den_of(x: &Rat) -> i64 {
    x.denom().to_i64().expect("denominator fits in i64")
}

impl<C: Coeff> BiSeries<C> {
    pub fn zero(den: i64, window: Window) -> Self {
        assert!(den >= 1);
        let grid = Grid::new(&window, den);
        let levels = (0..grid.ymax.len()).map(|k| vec![C::coeff_zero(); grid.width(k)]).collect();
        BiSeries { den, window, grid, levels }
    }

    pub fn one(den: i64, window: Window) -> Self {
        Self::monomial(den, window, &Rat::zero(), &Rat::zero(), C::coeff_one())
    }

    /// `c · q^{e_q} y^{e_y}`; the denominator is enlarged to fit the exponents.
    /// Terms outside the window give the zero series.
    pub fn monomial(den: i64, window: Window, e_q: &Rat, e_y: &Rat, c: C) -> Self {
        let den = den.lcm(&den_of(e_q)).lcm(&den_of(e_y));
        let mut s = Self::zero(den, window);
        s.add_term(e_q, e_y, &c);
        s
    }

    pub fn from_terms(den: i64, window: Window, terms: impl IntoIterator<Item = (Rat, Rat, C)>) -> Self {
        let terms: Vec<(Rat, Rat, C)> = terms.into_iter().collect();
        let den = terms.iter().fold(den, |d, (q, y, _)| d.lcm(&den_of(q)).lcm(&den_of(y)));
        let mut s = Self::zero(den, window);
        for (q, y, c) in &terms {
            s.add_term(q, y, c);
        }
        s
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    fn slot(&self, kq: i64, ky: i64) -> Option<(usize, usize)> {
        if kq < 0 || kq as usize >= self.levels.len() {
            return None;
        }
        let kq = kq as usize;
        if ky < self.grid.ymin || ky > self.grid.ymax[kq] {
            return None;
        }
        Some((kq, (ky - self.grid.ymin) as usize))
    }

    /// Adds a term if it lies inside the window; the exponents must be multiples of `1/D`.
    pub fn add_term(&mut self, e_q: &Rat, e_y: &Rat, c: &C) {
        let kq = key_of(e_q, self.den).expect("q-exponent not a multiple of 1/D");
        let ky = key_of(e_y, self.den).expect("y-exponent not a multiple of 1/D");
        if let Some((a, b)) = self.slot(kq, ky) {
            self.levels[a][b].add_in_place(c);
        }
    }

    /// Exact coefficient at `(e_q, e_y)`.
    pub fn coefficient_at(&self, e_q: &Rat, e_y: &Rat) -> Result<C, QSeriesError> {
        if !self.window.contains(e_q, e_y) {
            return Err(QSeriesError::OutOfWindow {
                e_q: fmt_rat(e_q),
                e_y: fmt_rat(e_y),
                window: self.window.to_string(),
            });
        }
        match (key_of(e_q, self.den), key_of(e_y, self.den)) {
            (Some(kq), Some(ky)) => Ok(self
                .slot(kq, ky)
                .map(|(a, b)| self.levels[a][b].clone())
                .unwrap_or_else(C::coeff_zero)),
            _ => Ok(C::coeff_zero()),
        }
    }

    /// Nonzero terms as `(D·e_q, D·e_y, c)`, ordered by q then y.
    pub fn key_terms(&self) -> impl Iterator<Item = (i64, i64, &C)> + '_ {
        self.levels.iter().enumerate().flat_map(move |(kq, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero_coeff())
                .map(move |(i, c)| (kq as i64, self.grid.ymin + i as i64, c))
        })
    }

    /// Nonzero terms as `(e_q, e_y, c)`, ordered by q then y.
    pub fn terms(&self) -> Vec<(Rat, Rat, C)> {
        self.key_terms()
            .map(|(kq, ky, c)| (rat_of(kq, self.den), rat_of(ky, self.den), c.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.key_terms().next().is_none()
    }

    pub fn term_count(&self) -> usize {
        self.key_terms().count()
    }

    /// Same series with exponents over a multiple of the current denominator.
    pub fn lift(&self, den: i64) -> Self {
        assert!(den % self.den == 0, "cannot lift denominator {} to {den}", self.den);
        if den == self.den {
            return self.clone();
        }
        let f = den / self.den;
        let mut out = Self::zero(den, self.window.clone());
        for (kq, ky, c) in self.key_terms() {
            if let Some((a, b)) = out.slot(kq * f, ky * f) {
                out.levels[a][b] = c.clone();
            }
        }
        out
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self), QSeriesError> {
        if self.window != other.window {
            return Err(QSeriesError::WindowMismatch(self.window.to_string(), other.window.to_string()));
        }
        let den = self.den.lcm(&other.den);
        Ok((self.lift(den), other.lift(den)))
    }

    pub fn add(&self, other: &Self) -> Result<Self, QSeriesError> {
        let (mut a, b) = self.aligned(other)?;
        for (ra, rb) in a.levels.iter_mut().zip(&b.levels) {
            for (x, y) in ra.iter_mut().zip(rb) {
                if !y.is_zero_coeff() {
                    x.add_in_place(y);
                }
            }
        }
        Ok(a)
    }

    /// In-place sum; panics if the windows or denominators differ.
    pub fn add_assign(&mut self, other: &Self) {
        assert!(self.window == other.window && self.den == other.den, "incompatible series in add_assign");
        for (ra, rb) in self.levels.iter_mut().zip(&other.levels) {
            for (x, y) in ra.iter_mut().zip(rb) {
                if !y.is_zero_coeff() {
                    x.add_in_place(y);
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QSeriesError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map_coeffs(|c| c.times(s))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BiSeries<D> {
        BiSeries {
            den: self.den,
            window: self.window.clone(),
            grid: self.grid.clone(),
            levels: self
                .levels
                .iter()
                .map(|row| row.iter().map(|c| if c.is_zero_coeff() { D::coeff_zero() } else { f(c) }).collect())
                .collect(),
        }
    }

    pub fn try_map_coeffs<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<BiSeries<D>, E> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for row in &self.levels {
            let mut out = Vec::with_capacity(row.len());
            for c in row {
                out.push(if c.is_zero_coeff() { D::coeff_zero() } else { f(c)? });
            }
            levels.push(out);
        }
        Ok(BiSeries { den: self.den, window: self.window.clone(), grid: self.grid.clone(), levels })
    }

    /// Truncated product. Exponent sums are taken exactly; terms leaving the window are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self, QSeriesError> {
        let (a, b) = self.aligned(other)?;
        let mut out = Self::zero(a.den, a.window.clone());
        let ymin = a.grid.ymin;
        for (qa, ra) in a.levels.iter().enumerate() {
            for (ia, ca) in ra.iter().enumerate() {
                if ca.is_zero_coeff() {
                    continue;
                }
                let ya = ymin + ia as i64;
                for (qb, rb) in b.levels.iter().enumerate() {
                    let qr = qa + qb;
                    if qr >= out.levels.len() {
                        break;
                    }
                    // Result y-key ya + yb must lie in [ymin, ymax[qr]].
                    let lo = (ymin - ya).max(ymin);
                    let hi = (out.grid.ymax[qr] - ya).min(b.grid.ymax[qb]);
                    if lo > hi {
                        continue;
                    }
                    let row = &mut out.levels[qr];
                    for yb in lo..=hi {
                        let cb = &rb[(yb - ymin) as usize];
                        if !cb.is_zero_coeff() {
                            row[(ya + yb - ymin) as usize].add_product(ca, cb);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn binomial_keys(&self, e_q: &Rat, e_y: &Rat) -> (i64, i64) {
        let sq = key_of(e_q, self.den).expect("q-exponent not a multiple of 1/D");
        let sy = key_of(e_y, self.den).expect("y-exponent not a multiple of 1/D");
        (sq, sy)
    }

    /// All slots, level by level, in the requested directions.
    fn ordered_keys(&self, q_desc: bool, y_desc: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let levels: Vec<usize> =
            if q_desc { (0..self.levels.len()).rev().collect() } else { (0..self.levels.len()).collect() };
        for kq in levels {
            let w = self.levels[kq].len();
            if y_desc {
                out.extend((0..w).rev().map(|i| (kq, i)));
            } else {
                out.extend((0..w).map(|i| (kq, i)));
            }
        }
        out
    }

    /// `self *= (1 − c·q^{e_q} y^{e_y})` in place.
    pub fn mul_binomial(&mut self, e_q: &Rat, e_y: &Rat, c: &C) {
        let (sq, sy) = self.binomial_keys(e_q, e_y);
        // new[k] = old[k] − c·old[k − s]: visit k before k − s.
        let order = self.ordered_keys(sq >= 0, sq == 0 && sy > 0 || sq > 0);
        let ymin = self.grid.ymin;
        for (kq, i) in order {
            let (sk_q, sk_y) = (kq as i64 - sq, ymin + i as i64 - sy);
            if let Some((a, b)) = self.slot(sk_q, sk_y) {
                if (a, b) == (kq, i) {
                    continue;
                }
                let src = &self.levels[a][b];
                if !src.is_zero_coeff() {
                    let t = src.times(c).negated();
                    self.levels[kq][i].add_in_place(&t);
                }
            }
        }
        if sq == 0 && sy == 0 {
            let mut f = C::coeff_one();
            f.add_in_place(&c.negated());
            for row in &mut self.levels {
                for x in row.iter_mut() {
                    *x = x.times(&f);
                }
            }
        }
    }

    /// `self /= (1 − c·q^{e_q} y^{e_y})` in place, expanding geometrically.
    pub fn div_binomial(&mut self, e_q: &Rat, e_y: &Rat, c: &C) -> Result<(), QSeriesError> {
        let expandable = *e_q > Rat::zero() || (e_q.is_zero() && *e_y > Rat::zero());
        if !expandable {
            return Err(QSeriesError::NonExpandable { e_y: fmt_rat(e_y), e_q: fmt_rat(e_q) });
        }
        let (sq, sy) = self.binomial_keys(e_q, e_y);
        // new[k] = old[k] + c·new[k − s]: visit k − s before k.
        let order = self.ordered_keys(false, false);
        let ymin = self.grid.ymin;
        for (kq, i) in order {
            if let Some((a, b)) = self.slot(kq as i64 - sq, ymin + i as i64 - sy) {
                let src = &self.levels[a][b];
                if !src.is_zero_coeff() {
                    let t = src.times(c);
                    self.levels[kq][i].add_in_place(&t);
                }
            }
        }
        Ok(())
    }

    /// Product of many factors, all on one window.
    pub fn product<'a>(den: i64, window: Window, factors: impl IntoIterator<Item = &'a Self>) -> Result<Self, QSeriesError> {
        let mut acc = Self::one(den, window);
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    /// Multiplies by `q^{e_q} y^{e_y}` and moves the window along, so nothing is lost.
    pub fn shifted(&self, e_q: &Rat, e_y: &Rat) -> Self {
        let den = self.den.lcm(&den_of(e_q)).lcm(&den_of(e_y));
        let src = self.lift(den);
        let w = &src.window;
        // The moved window must keep e_q ≥ 0, so only non-negative q-shifts keep the full shape.
        assert!(*e_q >= Rat::zero(), "negative q-shift");
        let window = Window {
            qmax: &w.qmax + e_q,
            ymin: &w.ymin + e_y,
            ymax: &w.ymax + e_y,
            slope: w.slope.clone(),
        };
        let (sq, sy) = (key_of(e_q, den).unwrap(), key_of(e_y, den).unwrap());
        let mut out = Self::zero(den, window);
        for (kq, ky, c) in src.key_terms() {
            let (a, b) = out.slot(kq + sq, ky + sy).expect("shifted term stays in shifted window");
            out.levels[a][b] = c.clone();
        }
        out
    }

    /// Restriction to a smaller window.
    pub fn restrict(&self, window: &Window) -> Result<Self, QSeriesError> {
        if !window.is_within(&self.window) {
            return Err(QSeriesError::NotSubwindow { inner: window.to_string(), outer: self.window.to_string() });
        }
        let mut out = Self::zero(self.den, window.clone());
        for (kq, ky, c) in self.key_terms() {
            if let Some((a, b)) = out.slot(kq, ky) {
                out.levels[a][b] = c.clone();
            }
        }
        Ok(out)
    }

    /// Keeps the terms satisfying `keep(e_q, e_y)` (given as keys `D·e`).
    pub fn filter_keys(&self, keep: impl Fn(i64, i64) -> bool) -> Self {
        let mut out = self.clone();
        for (kq, row) in out.levels.iter_mut().enumerate() {
            for (i, c) in row.iter_mut().enumerate() {
                if !keep(kq as i64, self.grid.ymin + i as i64) {
                    *c = C::coeff_zero();
                }
            }
        }
        out
    }

    /// Terms of the `q^{e_q}` level as `(e_y, c)`.
    pub fn q_level(&self, e_q: &Rat) -> Vec<(Rat, C)> {
        let Some(kq) = key_of(e_q, self.den) else { return vec![] };
        self.key_terms().filter(|t| t.0 == kq).map(|(_, ky, c)| (rat_of(ky, self.den), c.clone())).collect()
    }

    /// Distinct q-exponents carrying nonzero terms.
    pub fn q_exponents(&self) -> Vec<Rat> {
        let mut out: Vec<i64> = self.key_terms().map(|t| t.0).collect();
        out.dedup();
        out.into_iter().map(|k| rat_of(k, self.den)).collect()
    }
}

impl<C: Coeff + ComplexValue> BiSeries<C> {
    /// Value at `y = e^{2πiz}`, `q = e^{2πiτ}`; fractional powers use these logarithms.
    pub fn evaluate(&self, z: Complex64, tau: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let d = self.den as f64;
        self.key_terms()
            .map(|(kq, ky, c)| c.to_complex() * (two_pi_i * (tau * (kq as f64 / d) + z * (ky as f64 / d))).exp())
            .sum()
    }
}

/// `Σ_{m≥0} c^m y^{m e_y} q^{m e_q}`, truncated to the window.
pub fn geom_expand<C: Coeff>(e_y: &Rat, e_q: &Rat, c: &C, den: i64, window: Window) -> Result<BiSeries<C>, QSeriesError> {
    let expandable = *e_q > Rat::zero() || (e_q.is_zero() && *e_y > Rat::zero());
    if !expandable {
        return Err(QSeriesError::NonExpandable { e_y: fmt_rat(e_y), e_q: fmt_rat(e_q) });
    }
    let den = den.lcm(&den_of(e_q)).lcm(&den_of(e_y));
    let mut s: BiSeries<C> = BiSeries::zero(den, window);
    let (sq, sy) = (key_of(e_q, den).unwrap(), key_of(e_y, den).unwrap());
    let mut power = C::coeff_one();
    let (mut kq, mut ky) = (0i64, 0i64);
    loop {
        if kq >= s.levels.len() as i64 {
            break;
        }
        // Pure-y steps with e_y > 0 leave the window once past the top; q-steps stop at qmax.
        if sq == 0 && ky > s.grid.ymax[kq as usize] {
            break;
        }
        if let Some((a, b)) = s.slot(kq, ky) {
            s.levels[a][b].add_in_place(&power);
        }
        power = power.times(c);
        kq += sq;
        ky += sy;
    }
    Ok(s)
}

impl<C: Coeff> PartialEq for BiSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.window != other.window {
            return false;
        }
        if self.den == other.den {
            return self.key_terms().eq(other.key_terms());
        }
        self.terms() == other.terms()
    }
}

impl<C: Coeff> fmt::Debug for BiSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiSeries(D={}, {}) {{", self.den, self.window)?;
        for (kq, ky, c) in self.key_terms() {
            write!(f, " [{}, {}]: {:?};", fmt_rat(&rat_of(kq, self.den)), fmt_rat(&rat_of(ky, self.den)), c)?;
        }
        write!(f, " }}")
    }
}

/// JSON form `{"D", "qmax", "ywindow", "terms": [{"q","y","re"}]}` of a rational series.
pub fn series_json(s: &BiSeries<Rat>, ywindow: (&Rat, &Rat)) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .into_iter()
        .map(|(q, y, c)| json!({"q": fmt_rat(&q), "y": fmt_rat(&y), "re": fmt_rat(&c)}))
        .collect();
    json!({
        "D": s.denominator(),
        "qmax": fmt_rat(&s.window().qmax),
        "ywindow": [fmt_rat(ywindow.0), fmt_rat(ywindow.1)],
        "terms": terms,
    })
}

/// Largest coefficient magnitude, as a float; handy for diagnostics.
pub fn max_abs(s: &BiSeries<Rat>) -> f64 {
    s.key_terms().map(|(_, _, c)| to_f64(c).abs()).fold(0.0, f64::max)
}

/// Converts integer coefficients to rationals.
pub fn to_rational(s: &BiSeries<BigInt>) -> BiSeries<Rat> {
    s.map_coeffs(|c| Rat::from_integer(c.clone()))
}
