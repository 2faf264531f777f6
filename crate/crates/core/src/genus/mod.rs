//! The orbifold elliptic genus: exact twisted-sector q-series and theta-ratio values.

mod factors;
mod numeric;
mod series;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactmath::{max_rat, rat_int, Rat};
use crate::potential::{compute_charges, transpose_potential, Charges, Potential, PotentialError};
use crate::qseries::{QSeriesError, Window};
use crate::symmetry::{
    admissible_group, dual_group, grading_element, is_symmetry, PhaseVector, SymmetryError, SymmetryGroup,
};
use crate::theta::ThetaError;

pub use factors::{cone_supertrace_series, variable_factor};
pub use numeric::{ell_genus_numeric, ell_genus_numeric_retry, sector_value_numeric, NumericValue, RETRY_STEP, MAX_RETRIES};
pub use series::{
    default_ywin, ell_genus_series, genus_on_window, sector_supertrace_series, GenusOptions, GenusSeries, SectorPath,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenusError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Series(#[from] QSeriesError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("group is not admissible: {0}")]
    NotAdmissible(String),
    #[error("coefficient at q^{e_q} y^{e_y} is not rational: {value}")]
    NotRational { e_q: String, e_y: String, value: String },
    #[error("negative power of q in a sector series: {0}")]
    NegativeQPower(String),
    #[error("near pole: variable {j}, n = ({n}), n1 = ({n1})")]
    NearPole { j: usize, n: String, n1: String },
    #[error("y-window not certified after widening to {ywin}")]
    WindowNotCertified { ywin: String },
}

/// An admissible pair `(W, G)` with the per-variable data used by both paths.
#[derive(Clone, Debug)]
pub struct Orbifold {
    potential: Potential,
    charges: Charges,
    cbar: i64,
    group: SymmetryGroup,
    /// Distinct `θ_j` values per variable, sorted.
    theta_values: Vec<Vec<Rat>>,
    /// `theta_index[element][j]` indexes into `theta_values[j]`.
    theta_index: Vec<Vec<usize>>,
}

impl Orbifold {
    /// Validates `⟨J_W⟩ ⊆ G ⊆ SL_W` and `G ⊆ Aut(W)`.
    pub fn new(potential: Potential, group: SymmetryGroup) -> Result<Self, GenusError> {
        let charges = compute_charges(&potential)?;
        let cbar = charges.cbar_integer().filter(|_| charges.is_calabi_yau()).ok_or(SymmetryError::NotCalabiYau)?;
        if group.dim() != potential.dim() {
            return Err(GenusError::NotAdmissible(format!("group acts on {} variables", group.dim())));
        }
        for g in group.generators() {
            if !is_symmetry(&potential, g) {
                return Err(GenusError::NotAdmissible(format!("{g} is not a symmetry")));
            }
            if !g.coord_sum().is_integer() {
                return Err(GenusError::NotAdmissible(format!("{g} is not in SL_W")));
            }
        }
        let j = grading_element(&potential)?;
        if !group.contains(&j) {
            return Err(GenusError::NotAdmissible(format!("J_W = {j} is not in the group")));
        }
        let d = potential.dim();
        let mut theta_values: Vec<Vec<Rat>> = vec![vec![]; d];
        for e in group.elements() {
            for (j, t) in e.coords().into_iter().enumerate() {
                theta_values[j].push(t);
            }
        }
        for v in &mut theta_values {
            v.sort();
            v.dedup();
        }
        let theta_index = group
            .elements()
            .iter()
            .map(|e| (0..d).map(|j| theta_values[j].binary_search(&e.coord(j)).unwrap()).collect())
            .collect();
        Ok(Orbifold { potential, charges, cbar, group, theta_values, theta_index })
    }

    /// Closes `generators` and validates admissibility.
    pub fn from_generators(potential: Potential, generators: &[PhaseVector]) -> Result<Self, GenusError> {
        let group = admissible_group(&potential, generators)?;
        Orbifold::new(potential, group)
    }

    /// `(W∨, G∨)`.
    pub fn mirror(&self) -> Result<Orbifold, GenusError> {
        let dual = dual_group(&self.potential, &self.group)?;
        Orbifold::new(transpose_potential(&self.potential), dual)
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn charges(&self) -> &Charges {
        &self.charges
    }

    pub fn cbar(&self) -> i64 {
        self.cbar
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn theta_values(&self, j: usize) -> &[Rat] {
        &self.theta_values[j]
    }

    /// Index of `θ_j(element)` in [`Self::theta_values`].
    pub fn theta_index(&self, element: usize, j: usize) -> usize {
        self.theta_index[element][j]
    }

    pub fn element_index(&self, n: &PhaseVector) -> Option<usize> {
        self.group.elements().binary_search(n).ok()
    }

    /// Order of the phases `e^{2πiθ_j}` over the group.
    pub fn phase_order(&self, j: usize) -> i64 {
        self.theta_values[j].iter().fold(1i64, |l, t| num_integer::lcm(l, t.denom().to_i64().unwrap()))
    }

    /// Common exponent denominator: charges, all θ over the group and 2 (for `y^{ĉ/2}`).
    pub fn denominator(&self) -> i64 {
        let mut d = 2i64;
        for q in &self.charges.q {
            d = num_integer::lcm(d, q.denom().to_i64().unwrap());
        }
        for j in 0..self.dim() {
            d = num_integer::lcm(d, self.phase_order(j));
        }
        d
    }

    /// Shear of the internal window: `max(1, max_{j,n} q_j/(1−θ_j(n)))`.
    pub fn slope(&self) -> Rat {
        let mut s = Rat::one();
        for (j, q) in self.charges.q.iter().enumerate() {
            for t in &self.theta_values[j] {
                s = max_rat(s, q / (Rat::one() - t));
            }
        }
        s
    }

    /// `max_n Σ_j max(0, q_j + θ_j(n) − 1)`: how far below zero a sector's weight can reach.
    pub fn negative_weight(&self) -> Rat {
        let mut worst = Rat::zero();
        for idx in &self.theta_index {
            let mut s = Rat::zero();
            for (j, &i) in idx.iter().enumerate() {
                let v = &self.charges.q[j] + &self.theta_values[j][i] - Rat::one();
                if v.is_positive() {
                    s += v;
                }
            }
            worst = max_rat(worst, s);
        }
        worst
    }

    /// Window on which sector series are computed so that, after `y^{−ĉ/2}`,
    /// the rectangle `0 ≤ e_q ≤ qmax`, `|e_y| ≤ y` is exact.
    pub fn internal_window(&self, qmax: &Rat, y: &Rat) -> Window {
        let half = Rat::new(self.cbar.into(), 2.into());
        let slope = self.slope();
        let neg = self.negative_weight();
        let ymax = y + &half + &neg;
        let floor = -&neg - &slope * qmax - Rat::one();
        let ymin = if floor < &half - y { floor } else { &half - y };
        Window::sheared(qmax.clone(), ymin, ymax, slope)
    }
}

/// `(−1)^ĉ` as a rational sign.
pub fn mirror_sign(cbar: i64) -> Rat {
    if cbar.rem_euclid(2) == 0 {
        rat_int(1)
    } else {
        rat_int(-1)
    }
}

#[cfg(test)]
mod tests;
