//! Orbit engine: breadth-first enumeration of freely reduced words with
//! projective matrix dedup, Poincaré-series growth counting, and
//! critical-exponent estimation from the norm-growth counting function
//! `N(t) = #{g : |g|^{-2} >= t}`.

use crate::groups::GroupPresentation;
use crate::mobius::MobiusElement;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("word length {0} exceeds the supported maximum {MAX_WORD_LEN}")]
    DepthTooLarge(usize),
    #[error("element cap {0} exceeded during enumeration")]
    Capacity(usize),
    #[error("orbit too shallow for exponent fitting (depth {0}, need >= {1})")]
    InsufficientData(usize, usize),
    #[error("some |g21| = {0:e} < 1e-9: infinity is (numerically) in the limit set")]
    InfinityInLimitSet(f64),
}

pub const MAX_WORD_LEN: usize = 24;

/// A deduplicated group element reached by the enumeration.
#[derive(Debug, Clone)]
pub struct OrbitElement {
    /// Freely reduced word in generator indices, matrix product left to
    /// right.
    pub word: Vec<u8>,
    pub matrix: MobiusElement,
    /// Squared operator norm on `C^2`; always `>= 1`.
    pub norm_sq: f64,
    /// `|g21|` of the matrix.
    pub g21_abs: f64,
}

/// Enumeration result. `elements[0]` is always the identity.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub label: String,
    pub max_len: usize,
    pub prune: Option<f64>,
    pub elements: Vec<OrbitElement>,
    /// Elements recorded but not expanded because their norm exceeded the
    /// prune threshold; deep counts are lower bounds when this is nonzero.
    pub pruned_subtrees: usize,
    /// Words discarded because their matrix collided with an earlier one.
    pub dedup_collisions: usize,
    /// Largest squared generator norm, used for completeness bounds.
    pub gen_norm_sq_max: f64,
}

impl Orbit {
    /// Norm-squared ceiling for counting-based fits: the prune threshold.
    /// Above it, counts are severe under-approximations (recorded but
    /// unexpanded subtrees); just below it, the mild fringe bias from
    /// children of pruned parents is absorbed by the 10% decade margins
    /// the exponent fit drops.
    pub fn fit_norm_sq_ceiling(&self) -> f64 {
        let max_norm = self
            .elements
            .iter()
            .map(|e| e.norm_sq)
            .fold(1.0f64, f64::max);
        self.prune.unwrap_or(f64::INFINITY).min(max_norm)
    }
}

#[derive(Debug, Clone)]
pub struct OrbitParams {
    pub max_len: usize,
    pub prune: Option<f64>,
    pub element_cap: usize,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams {
            max_len: 12,
            prune: Some(1e8),
            element_cap: 4_000_000,
        }
    }
}

/// Breadth-first enumeration of freely reduced words up to `max_len`,
/// deduplicated by the sign-insensitive quantized matrix key. Elements
/// whose squared norm exceeds the prune threshold are recorded but their
/// subtrees are not expanded (growth monotonicity makes deep counts an
/// under-approximation, flagged via `pruned_subtrees`).
pub fn enumerate_orbit(
    pres: &GroupPresentation,
    params: &OrbitParams,
) -> Result<Orbit, OrbitError> {
    if params.max_len > MAX_WORD_LEN {
        return Err(OrbitError::DepthTooLarge(params.max_len));
    }
    let gens = &pres.generators;
    let mut elements = vec![OrbitElement {
        word: Vec::new(),
        matrix: MobiusElement::identity(),
        norm_sq: 1.0,
        g21_abs: 0.0,
    }];
    let mut seen: HashSet<[i64; 8]> = HashSet::new();
    seen.insert(elements[0].matrix.quantized_key());
    let mut frontier: Vec<usize> = vec![0];
    let mut pruned_subtrees = 0usize;
    let mut dedup_collisions = 0usize;

    for _depth in 1..=params.max_len {
        let mut next = Vec::new();
        for &idx in &frontier {
            let last = elements[idx].word.last().copied();
            let parent_matrix = elements[idx].matrix;
            for letter in 0..gens.len() as u8 {
                if let Some(l) = last {
                    if letter == l ^ 1 {
                        continue; // free reduction
                    }
                }
                let m = parent_matrix.compose(&gens[letter as usize]);
                if !seen.insert(m.quantized_key()) {
                    dedup_collisions += 1;
                    continue;
                }
                let norm_sq = m.norm_sq();
                let mut word = Vec::with_capacity(elements[idx].word.len() + 1);
                word.extend_from_slice(&elements[idx].word);
                word.push(letter);
                elements.push(OrbitElement {
                    word,
                    matrix: m,
                    norm_sq,
                    g21_abs: m.c.norm(),
                });
                if elements.len() > params.element_cap {
                    return Err(OrbitError::Capacity(params.element_cap));
                }
                if params.prune.is_none_or(|p| norm_sq <= p) {
                    next.push(elements.len() - 1);
                } else {
                    pruned_subtrees += 1;
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let gen_norm_sq_max = gens.iter().map(|g| g.norm_sq()).fold(1.0f64, f64::max);
    Ok(Orbit {
        label: pres.label.clone(),
        max_len: params.max_len,
        prune: params.prune,
        elements,
        pruned_subtrees,
        dedup_collisions,
        gen_norm_sq_max,
    })
}

/// The counting function `N(t) = #{g : |g|^{-2} >= t}` tabulated on a
/// log-spaced grid of `t` values.
#[derive(Debug, Clone)]
pub struct GrowthTable {
    pub points: Vec<(f64, usize)>,
}

pub fn growth_counting(orbit: &Orbit, grid_len: usize) -> GrowthTable {
    let max_norm = orbit
        .elements
        .iter()
        .map(|e| e.norm_sq)
        .fold(1.0f64, f64::max);
    growth_counting_window(orbit, grid_len, 1.0 / max_norm)
}

/// Counting table restricted to `t >= t_min`.
pub fn growth_counting_window(orbit: &Orbit, grid_len: usize, t_min: f64) -> GrowthTable {
    let mut norms: Vec<f64> = orbit.elements.iter().map(|e| e.norm_sq).collect();
    norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lt_min = t_min.min(1.0).ln();
    let points = (0..grid_len.max(2))
        .map(|i| {
            let frac = i as f64 / (grid_len.max(2) - 1) as f64;
            let t = (lt_min * (1.0 - frac)).exp(); // from t_min up to 1
            // N(t) = #{norm_sq <= 1/t}
            let bound = 1.0 / t;
            let n = norms.partition_point(|&x| x <= bound * (1.0 + 1e-12));
            (t, n)
        })
        .collect();
    GrowthTable { points }
}

/// Least-squares fit of `log N(t)` against `-log t`.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ExponentFit {
    pub p_hat: f64,
    pub stderr: f64,
    pub points_used: usize,
}

/// Critical-exponent estimate: the slope of `log N` vs `-log t` over the
/// stable mid-range. The grid is restricted to the completeness window of
/// the enumeration (counts beyond it are prune/depth-biased lower bounds),
/// and the largest and smallest 10% of the remaining `t`-decades are
/// dropped as pre-asymptotic safety margins.
pub fn critical_exponent(orbit: &Orbit) -> Result<ExponentFit, OrbitError> {
    if orbit.max_len < 10 {
        return Err(OrbitError::InsufficientData(orbit.max_len, 10));
    }
    let table = growth_counting_window(orbit, 200, 1.0 / orbit.fit_norm_sq_ceiling());
    fit_counting_slope(&table)
}

/// Slope fit shared by [`critical_exponent`] and the diagnostics.
pub fn fit_counting_slope(table: &GrowthTable) -> Result<ExponentFit, OrbitError> {
    let lg_min = table
        .points
        .iter()
        .map(|&(t, _)| t.log10())
        .fold(f64::INFINITY, f64::min);
    let width = -lg_min; // decades available, grid tops out at t = 1
    let lo = lg_min + 0.1 * width;
    let hi = -0.1 * width;
    let pts: Vec<(f64, f64)> = table
        .points
        .iter()
        .filter(|&&(t, n)| {
            let lg = t.log10();
            lg >= lo && lg <= hi && n > 0
        })
        .map(|&(t, n)| (-t.ln(), (n as f64).ln()))
        .collect();
    if pts.len() < 8 {
        return Err(OrbitError::InsufficientData(pts.len(), 8));
    }
    let (slope, stderr) = least_squares_slope(&pts);
    Ok(ExponentFit {
        p_hat: slope,
        stderr,
        points_used: pts.len(),
    })
}

/// Plain OLS slope with its standard error.
pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>();
    let dof = (pts.len().max(3) - 2) as f64;
    let stderr = (ss_res / dof / sxx).sqrt();
    (slope, stderr)
}

/// Descending sequence of `|g21|^{-2}` over the non-identity elements of
/// the orbit conjugated by `m`. Fails when some conjugated `|g21|` drops
/// below `1e-9`, which signals that infinity lies on (or numerically near)
/// the conjugated limit set.
pub fn g21_tail(orbit: &Orbit, base_conjugation: &MobiusElement) -> Result<Vec<f64>, OrbitError> {
    let m_inv = base_conjugation.inverse();
    let is_id = base_conjugation.is_identity_psl(1e-12);
    let mut vals = Vec::with_capacity(orbit.elements.len().saturating_sub(1));
    for e in orbit.elements.iter().skip(1) {
        let c_abs = if is_id {
            e.g21_abs
        } else {
            base_conjugation.compose(&e.matrix).compose(&m_inv).c.norm()
        };
        if c_abs < 1e-9 {
            return Err(OrbitError::InfinityInLimitSet(c_abs));
        }
        vals.push(1.0 / (c_abs * c_abs));
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}

/// The weak-`l_p` quasi-norm `sup_k (k+1)^{1/p} mu(k)` of a descending
/// nonnegative sequence.
pub fn weak_lp_profile(values: &[f64], p: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &v)| ((k + 1) as f64).powf(1.0 / p) * v)
        .fold(0.0, f64::max)
}

/// The matching lower-bound constant `inf_k (k+1)^{1/p} mu(k)`.
pub fn weak_lp_lower_constant(values: &[f64], p: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &v)| ((k + 1) as f64).powf(1.0 / p) * v)
        .fold(f64::INFINITY, f64::min)
}
