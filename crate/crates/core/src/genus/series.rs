use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactmath::{cyc_to_rational, fmt_rat, rat_int, root_of_unity, CycNum, CyclotomicField, GroupRingElt, Rat};
use crate::qseries::{series_json, BiSeries, Window};
use crate::symmetry::PhaseVector;

use super::{variable_factor, GenusError, Orbifold};

/// How the `n₁` average of a sector is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorPath {
    /// Pick the cheaper of the two by an operation count.
    Auto,
    /// Sum over `n₁ ∈ G` with cyclotomic phases, then convert to rationals.
    Literal,
    /// Track phases in `Z[Z/N_j]` and keep only exponent vectors on which every
    /// character of `G` is trivial; integer arithmetic throughout.
    Projected,
}

#[derive(Clone, Debug)]
pub struct GenusOptions {
    pub qmax: Rat,
    /// Initial half-width of the y-window; defaults to [`default_ywin`].
    pub ywin: Option<Rat>,
    pub path: SectorPath,
    pub max_widenings: u32,
}

impl Default for GenusOptions {
    fn default() -> Self {
        GenusOptions { qmax: rat_int(2), ywin: None, path: SectorPath::Auto, max_widenings: 4 }
    }
}

impl GenusOptions {
    pub fn with_qmax(qmax: i64) -> Self {
        GenusOptions { qmax: rat_int(qmax), ..Default::default() }
    }
}

/// `⌈√(ĉ²/4 + 2ĉ·qmax)⌉ + 1`: the weak Jacobi bound `r² ≤ m² + 4mn` at index `m = ĉ/2`, plus a unit band.
pub fn default_ywin(cbar: i64, qmax: &Rat) -> Rat {
    let c = rat_int(cbar);
    let bound = &c * &c / rat_int(4) + rat_int(2) * &c * qmax;
    let mut r = 0i64;
    while rat_int(r * r) < bound {
        r += 1;
    }
    rat_int(r + 1)
}

/// Exact genus on a certified rectangle `0 ≤ e_q ≤ qmax`, `|e_y| ≤ ywin`.
#[derive(Clone, Debug)]
pub struct GenusSeries {
    pub series: BiSeries<Rat>,
    pub cbar: i64,
    pub qmax: Rat,
    pub ywin: Rat,
    /// Largest `|e_y|` carrying a nonzero coefficient.
    pub support: Rat,
    pub widenings: u32,
    pub integral: bool,
    pub group: Vec<String>,
    pub potential: String,
    pub path: SectorPath,
}

impl GenusSeries {
    pub fn to_json(&self) -> Value {
        let mut v = series_json(&self.series, (&-self.ywin.clone(), &self.ywin));
        v["cbar"] = json!(self.cbar.to_string());
        v["group"] = json!(self.group);
        v["potential"] = json!(self.potential);
        v["certificate"] = json!({
            "band": [fmt_rat(&(&self.ywin - rat_int(1))), fmt_rat(&self.ywin)],
            "vanishes": true,
            "support": fmt_rat(&self.support),
            "widenings": self.widenings,
        });
        v["integral"] = json!(self.integral);
        v
    }
}

struct Plan<'a> {
    orb: &'a Orbifold,
    den: i64,
    window: Window,
    orders: Vec<i64>,
    conductor: i64,
    /// `chars[j][k] = L·θ_j(g_k)` for the generators `g_k`.
    chars: Vec<Vec<i64>>,
    exponent: i64,
    /// Characters reachable from variables `j..d`.
    suffix: Vec<HashSet<Vec<i64>>>,
}

impl<'a> Plan<'a> {
    fn new(orb: &'a Orbifold, qmax: &Rat, y: &Rat) -> Self {
        let d = orb.dim();
        let den = orb.denominator();
        let window = orb.internal_window(qmax, y);
        let orders: Vec<i64> = (0..d).map(|j| orb.phase_order(j)).collect();
        let conductor = orders.iter().fold(1i64, |l, &n| num_integer::lcm(l, n));
        let exponent = orb.group().exponent();
        let gens = orb.group().generators();
        let chars: Vec<Vec<i64>> = (0..d)
            .map(|j| {
                gens.iter()
                    .map(|g| (g.coord(j) * rat_int(exponent)).to_integer().to_i64().unwrap())
                    .collect()
            })
            .collect();
        let mut suffix = vec![HashSet::new(); d + 1];
        suffix[d].insert(vec![0; gens.len()]);
        for j in (0..d).rev() {
            let mut s = HashSet::new();
            for base in &suffix[j + 1] {
                for e in 0..orders[j] {
                    s.insert(add_char(base, &chars[j], e, exponent));
                }
            }
            suffix[j] = s;
        }
        Plan { orb, den, window, orders, conductor, chars, exponent, suffix }
    }

    /// Number of series products in one projected sector.
    fn projected_cost(&self) -> u64 {
        let zero = vec![0; self.chars.first().map_or(0, |c| c.len())];
        let mut count = 0u64;
        self.walk(0, &zero, &mut |depth, _| {
            if depth >= 1 {
                count += 1;
            }
        });
        count
    }

    /// Visits every completable prefix `(e_0..e_j)`.
    fn walk(&self, j: usize, chr: &[i64], f: &mut dyn FnMut(usize, &[i64])) {
        if j == self.orders.len() {
            return;
        }
        for e in 0..self.orders[j] {
            let next = add_char(chr, &self.chars[j], e, self.exponent);
            if self.completable(j + 1, &next) {
                f(j, &next);
                self.walk(j + 1, &next, f);
            }
        }
    }

    fn completable(&self, j: usize, chr: &[i64]) -> bool {
        let need: Vec<i64> = chr.iter().map(|c| (self.exponent - c).rem_euclid(self.exponent)).collect();
        self.suffix[j].contains(&need)
    }

    fn literal_cost(&self) -> u64 {
        let phi = CyclotomicField::get(self.conductor as u32).degree() as u64;
        let weight = if self.conductor <= 2 { 2 } else { 8 * phi * phi };
        let d = self.orders.len() as u64;
        self.orb.group().order() as u64 * d.max(1) * weight
    }

    fn choose(&self, path: SectorPath) -> SectorPath {
        match path {
            SectorPath::Auto if self.projected_cost() <= self.literal_cost() => SectorPath::Projected,
            SectorPath::Auto => SectorPath::Literal,
            p => p,
        }
    }

    /// Components `a_{j,e}` of the group-ring factor of variable `j` at `θ_j(n) = theta`.
    fn projected_table(&self) -> Result<Vec<Vec<Vec<BiSeries<BigInt>>>>, GenusError> {
        let q = &self.orb.charges().q;
        let keys: Vec<(usize, usize)> =
            (0..self.orders.len()).flat_map(|j| (0..self.orb.theta_values(j).len()).map(move |t| (j, t))).collect();
        let built: Vec<Result<Vec<BiSeries<BigInt>>, GenusError>> = keys
            .par_iter()
            .map(|&(j, t)| {
                let n = self.orders[j] as usize;
                let c = GroupRingElt::generator_power(1, n);
                let c_bar = GroupRingElt::generator_power(-1, n);
                let f = variable_factor(&q[j], &self.orb.theta_values(j)[t], &c, &c_bar, self.den, &self.window)?;
                Ok((0..n).map(|e| f.map_coeffs(|g| g.component(e))).collect())
            })
            .collect();
        let mut table: Vec<Vec<Vec<BiSeries<BigInt>>>> = vec![vec![]; self.orders.len()];
        for (&(j, _), b) in keys.iter().zip(built) {
            table[j].push(b?);
        }
        Ok(table)
    }

    fn projected_sector(&self, n: usize, table: &[Vec<Vec<BiSeries<BigInt>>>]) -> BiSeries<BigInt> {
        let d = self.orders.len();
        let mut total = BiSeries::zero(self.den, self.window.clone());
        if d == 0 {
            return BiSeries::one(self.den, self.window.clone());
        }
        let comps: Vec<&Vec<BiSeries<BigInt>>> = (0..d).map(|j| &table[j][self.orb.theta_index(n, j)]).collect();
        let zero = vec![0; self.chars[0].len()];
        self.descend(0, &zero, None, &comps, &mut total);
        total
    }

    fn descend(
        &self,
        j: usize,
        chr: &[i64],
        acc: Option<&BiSeries<BigInt>>,
        comps: &[&Vec<BiSeries<BigInt>>],
        total: &mut BiSeries<BigInt>,
    ) {
        for e in 0..self.orders[j] {
            let a = &comps[j][e as usize];
            if a.is_zero() {
                continue;
            }
            let next = add_char(chr, &self.chars[j], e, self.exponent);
            if !self.completable(j + 1, &next) {
                continue;
            }
            let prod = match acc {
                None => a.clone(),
                Some(s) => s.mul(a).expect("shared window"),
            };
            if j + 1 == self.orders.len() {
                total.add_assign(&prod);
            } else {
                self.descend(j + 1, &next, Some(&prod), comps, total);
            }
        }
    }

    /// `literal[j][t][t1]`: factor of variable `j` at `θ_j(n)`, `θ_j(n₁)` indexed by `t`, `t1`.
    fn literal_table(&self) -> Result<Vec<Vec<Vec<BiSeries<CycNum>>>>, GenusError> {
        let q = &self.orb.charges().q;
        let n = self.conductor;
        let mut keys = Vec::new();
        for j in 0..self.orders.len() {
            let m = self.orb.theta_values(j).len();
            for t in 0..m {
                for t1 in 0..m {
                    keys.push((j, t, t1));
                }
            }
        }
        let built: Vec<Result<BiSeries<CycNum>, GenusError>> = keys
            .par_iter()
            .map(|&(j, t, t1)| {
                let vals = self.orb.theta_values(j);
                let k = (&vals[t1] * rat_int(n)).to_integer().to_i64().unwrap();
                let c = root_of_unity(k, n as u32);
                let c_bar = root_of_unity(-k, n as u32);
                Ok(variable_factor(&q[j], &vals[t], &c, &c_bar, self.den, &self.window)?)
            })
            .collect();
        let mut table: Vec<Vec<Vec<BiSeries<CycNum>>>> = (0..self.orders.len())
            .map(|j| vec![Vec::new(); self.orb.theta_values(j).len()])
            .collect();
        for (&(j, t, _), b) in keys.iter().zip(built) {
            table[j][t].push(b?);
        }
        Ok(table)
    }

    fn literal_sector(&self, n: usize, table: &[Vec<Vec<BiSeries<CycNum>>>]) -> Result<BiSeries<Rat>, GenusError> {
        let d = self.orders.len();
        let mut sum: BiSeries<CycNum> = BiSeries::zero(self.den, self.window.clone());
        for n1 in 0..self.orb.group().order() {
            let mut acc: Option<BiSeries<CycNum>> = None;
            for j in 0..d {
                let f = &table[j][self.orb.theta_index(n, j)][self.orb.theta_index(n1, j)];
                acc = Some(match acc {
                    None => f.clone(),
                    Some(a) => a.mul(f)?,
                });
            }
            let term = acc.unwrap_or_else(|| BiSeries::one(self.den, self.window.clone()));
            sum = sum.add(&term)?;
        }
        let order = rat_int(self.orb.group().order() as i64);
        sum.try_map_coeffs(|c| cyc_to_rational(c).map(|r| r / &order)).map_err(|_| {
            let (e_q, e_y, value) = sum
                .terms()
                .into_iter()
                .find(|(_, _, c)| cyc_to_rational(c).is_err())
                .map(|(q, y, c)| (fmt_rat(&q), fmt_rat(&y), c.to_string()))
                .unwrap_or_default();
            GenusError::NotRational { e_q, e_y, value }
        })
    }
}

fn add_char(base: &[i64], ch: &[i64], e: i64, l: i64) -> Vec<i64> {
    base.iter().zip(ch).map(|(b, c)| (b + e * c).rem_euclid(l)).collect()
}

fn to_rat_series(s: &BiSeries<BigInt>) -> BiSeries<Rat> {
    s.map_coeffs(|c| Rat::from_integer(c.clone()))
}

/// `(1/|G|) Σ_{n₁∈G}` of the twisted sector `n`, on the internal window for `(qmax, y)`.
/// The sector prefactor `(y⁻¹q)^{deg·n}` is included; `y^{−ĉ/2}` is not.
pub fn sector_supertrace_series(
    orb: &Orbifold,
    n: &PhaseVector,
    qmax: &Rat,
    y: &Rat,
    path: SectorPath,
) -> Result<BiSeries<Rat>, GenusError> {
    let idx = orb
        .element_index(n)
        .ok_or_else(|| GenusError::NotAdmissible(format!("{n} is not in the group")))?;
    let plan = Plan::new(orb, qmax, y);
    match plan.choose(path) {
        SectorPath::Literal => plan.literal_sector(idx, &plan.literal_table()?),
        _ => Ok(to_rat_series(&plan.projected_sector(idx, &plan.projected_table()?))),
    }
}

/// `y^{−ĉ/2} Σ_n` sector series, restricted to the rectangle `|e_y| ≤ y`, `e_q ≤ qmax`.
pub fn genus_on_window(orb: &Orbifold, qmax: &Rat, y: &Rat, path: SectorPath) -> Result<(BiSeries<Rat>, SectorPath), GenusError> {
    let plan = Plan::new(orb, qmax, y);
    let path = plan.choose(path);
    let sectors: Vec<usize> = (0..orb.group().order()).collect();
    let parts: Vec<BiSeries<Rat>> = match path {
        SectorPath::Literal => {
            let table = plan.literal_table()?;
            sectors.par_iter().map(|&n| plan.literal_sector(n, &table)).collect::<Result<_, _>>()?
        }
        _ => {
            let table = plan.projected_table()?;
            sectors.par_iter().map(|&n| to_rat_series(&plan.projected_sector(n, &table))).collect()
        }
    };
    let mut total = BiSeries::zero(plan.den, plan.window.clone());
    for p in &parts {
        total.add_assign(p);
    }
    let shifted = total.shifted(&Rat::zero(), &-Rat::new(orb.cbar().into(), 2.into()));
    let rect = Window::symmetric(qmax.clone(), y.clone());
    Ok((shifted.restrict(&rect)?, path))
}

/// The genus through `q^{qmax}`, on a y-window widened until the outermost unit band vanishes.
pub fn ell_genus_series(orb: &Orbifold, opts: &GenusOptions) -> Result<GenusSeries, GenusError> {
    let mut y = opts.ywin.clone().unwrap_or_else(|| default_ywin(orb.cbar(), &opts.qmax));
    let mut widenings = 0;
    loop {
        let (series, path) = genus_on_window(orb, &opts.qmax, &y, opts.path)?;
        let edge = &y - rat_int(1);
        let band_clear = series.terms().iter().all(|(_, e_y, _)| e_y.abs() <= edge);
        if band_clear {
            let support = series.terms().iter().map(|(_, e_y, _)| e_y.abs()).max().unwrap_or_else(Rat::zero);
            let integral = series.terms().iter().all(|(_, _, c)| c.is_integer());
            return Ok(GenusSeries {
                series,
                cbar: orb.cbar(),
                qmax: opts.qmax.clone(),
                ywin: y,
                support,
                widenings,
                integral,
                group: orb.group().generator_strings(),
                potential: orb.potential().canonical_text(),
                path,
            });
        }
        if widenings >= opts.max_widenings {
            return Err(GenusError::WindowNotCertified { ywin: fmt_rat(&y) });
        }
        widenings += 1;
        y = y * rat_int(2);
    }
}

