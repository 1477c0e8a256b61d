//! Limit-set sampling through the equivariant boundary correspondence.
//!
//! For matched marked groups (baseline with circular limit set, deformed
//! group), every loxodromic word gives a pair: the argument `t` of its
//! attracting fixed point in the baseline and the attracting fixed point
//! `w` of the same word in the deformed group. Sorting by `t` traces the
//! deformed limit curve in the cyclic order inherited from the circle.

use crate::groups::GroupPresentation;
use crate::mobius::{ExtComplex, MobiusClass};
use crate::orbit::{least_squares_slope, Orbit};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("need at least {1} samples to order a curve, got {0}")]
    TooFew(usize, usize),
    #[error("need >= 5 scales spanning >= 2 decades (got {0} scales, span {1:.2} decades)")]
    InsufficientScales(usize, f64),
    #[error("need >= {1} points for a dimension estimate, got {0}")]
    TooFewPoints(usize, usize),
    #[error("presentations have different generator counts")]
    MarkingMismatch,
}

/// One matched boundary point: circle parameter from the baseline word,
/// limit-set point from the deformed word.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub t: f64,
    pub w: Complex64,
    pub word: Vec<u8>,
}

/// Skip counters from the pairing pass.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairingStats {
    pub non_loxodromic: usize,
    pub infinite_fixed_point: usize,
    pub off_circle: usize,
}

/// Ordered limit-curve samples (strictly increasing `t`, closed).
#[derive(Debug, Clone)]
pub struct CurvePolyline {
    pub samples: Vec<BoundarySample>,
    pub closed: bool,
}

impl CurvePolyline {
    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.w).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest gap in the circle parameter, including the wrap-around.
    pub fn max_parameter_gap(&self) -> f64 {
        let n = self.samples.len();
        let mut max_gap = 0.0f64;
        for i in 0..n {
            let a = self.samples[i].t;
            let b = if i + 1 == n {
                self.samples[0].t + 2.0 * std::f64::consts::PI
            } else {
                self.samples[i + 1].t
            };
            max_gap = max_gap.max(b - a);
        }
        max_gap
    }

    /// Subsample to at most `budget` vertices, uniformly in `t`.
    pub fn subsample(&self, budget: usize) -> CurvePolyline {
        if self.samples.len() <= budget {
            return self.clone();
        }
        let tau = 2.0 * std::f64::consts::PI;
        let mut picked: Vec<BoundarySample> = Vec::with_capacity(budget);
        let mut last_idx = usize::MAX;
        for j in 0..budget {
            let target = j as f64 * tau / budget as f64;
            let idx = match self
                .samples
                .binary_search_by(|s| s.t.partial_cmp(&target).unwrap())
            {
                Ok(i) => i,
                Err(i) => i.min(self.samples.len() - 1),
            };
            if idx != last_idx {
                picked.push(self.samples[idx].clone());
                last_idx = idx;
            }
        }
        CurvePolyline {
            samples: picked,
            closed: true,
        }
    }

    /// Number of crossing pairs among non-adjacent segments. Quadratic;
    /// meant for subsampled curves (a few thousand vertices).
    pub fn crossing_count(&self) -> usize {
        let pts = self.points();
        let n = pts.len();
        let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
        let mut crossings = 0;
        for i in 0..n {
            let (a1, a2) = seg(i);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // adjacent through the wrap-around
                }
                let (b1, b2) = seg(j);
                if segments_cross(a1, a2, b1, b2) {
                    crossings += 1;
                }
            }
        }
        crossings
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Builds boundary samples by matching attracting fixed points of each
/// orbit word evaluated in the baseline and in the deformed group.
/// Non-loxodromic words and words whose deformed fixed point is infinite
/// are skipped and counted.
pub fn fixed_point_pairs(
    base: &GroupPresentation,
    def: &GroupPresentation,
    orbit: &Orbit,
) -> Result<(Vec<BoundarySample>, PairingStats), BoundaryError> {
    if base.generator_count() != def.generator_count() {
        return Err(BoundaryError::MarkingMismatch);
    }
    let reuse_base = orbit.label == base.label;
    let reuse_def = orbit.label == def.label;
    let results: Vec<Result<BoundarySample, u8>> = orbit
        .elements
        .par_iter()
        .skip(1)
        .map(|e| {
            let m_base = if reuse_base {
                e.matrix
            } else {
                base.word_matrix(&e.word)
            };
            if m_base.classify() != MobiusClass::Loxodromic {
                return Err(0);
            }
            let (att_b, _) = m_base.fixed_points().map_err(|_| 0u8)?;
            let wb = match att_b {
                ExtComplex::Finite(z) => z,
                ExtComplex::Infinity => return Err(1),
            };
            if (wb.norm() - 1.0).abs() > 1e-8 {
                return Err(2);
            }
            let m_def = if reuse_def {
                e.matrix
            } else {
                def.word_matrix(&e.word)
            };
            if m_def.classify() != MobiusClass::Loxodromic {
                return Err(0);
            }
            let (att_d, _) = m_def.fixed_points().map_err(|_| 0u8)?;
            let wd = match att_d {
                ExtComplex::Finite(z) => z,
                ExtComplex::Infinity => return Err(1),
            };
            let mut t = wb.arg();
            if t < 0.0 {
                t += 2.0 * std::f64::consts::PI;
            }
            Ok(BoundarySample {
                t,
                w: wd,
                word: e.word.clone(),
            })
        })
        .collect();

    let mut stats = PairingStats::default();
    let mut samples = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(0) => stats.non_loxodromic += 1,
            Err(1) => stats.infinite_fixed_point += 1,
            Err(_) => stats.off_circle += 1,
        }
    }
    Ok((samples, stats))
}

/// Sorts samples by circle parameter and collapses duplicates within
/// `1e-12`, keeping the first.
pub fn order_curve(mut samples: Vec<BoundarySample>) -> Result<CurvePolyline, BoundaryError> {
    if samples.len() < 16 {
        return Err(BoundaryError::TooFew(samples.len(), 16));
    }
    samples.sort_by(|a, b| {
        a.t.partial_cmp(&b.t)
            .unwrap()
            .then_with(|| a.word.cmp(&b.word))
    });
    let mut out: Vec<BoundarySample> = Vec::with_capacity(samples.len());
    for s in samples {
        if let Some(last) = out.last() {
            if (s.t - last.t).abs() <= 1e-12 {
                continue;
            }
        }
        out.push(s);
    }
    Ok(CurvePolyline {
        samples: out,
        closed: true,
    })
}

/// Box-counting dimension estimate with the per-scale counting table.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BoxDimension {
    pub d_hat: f64,
    pub stderr: f64,
    /// `(scale, grid-offset-averaged occupied-box count)` per scale.
    pub counts: Vec<(f64, f64)>,
}

/// Geometric sequence of `n` scales from `s_max` down to `s_min`.
pub fn log_scales(s_min: f64, s_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            (s_max.ln() * (1.0 - f) + s_min.ln() * f).exp()
        })
        .collect()
}

/// Box-counting slope of `log(occupied boxes)` against `log(1/scale)`.
/// Each count is averaged over 4 grid offsets to reduce anchoring bias.
pub fn box_dimension(points: &[Complex64], scales: &[f64]) -> Result<BoxDimension, BoundaryError> {
    if points.len() < 1000 {
        return Err(BoundaryError::TooFewPoints(points.len(), 1000));
    }
    let span = scales.iter().cloned().fold(f64::MIN, f64::max)
        / scales.iter().cloned().fold(f64::MAX, f64::min);
    if scales.len() < 5 || span < 100.0 * (1.0 - 1e-9) {
        return Err(BoundaryError::InsufficientScales(
            scales.len(),
            span.log10(),
        ));
    }
    let anchor_x = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let anchor_y = points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
    let counts: Vec<(f64, f64)> = scales
        .par_iter()
        .map(|&s| {
            let mut total = 0usize;
            for (ox, oy) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
                let mut cells: HashSet<(i64, i64)> = HashSet::new();
                for p in points {
                    let ix = ((p.re - anchor_x) / s + ox).floor() as i64;
                    let iy = ((p.im - anchor_y) / s + oy).floor() as i64;
                    cells.insert((ix, iy));
                }
                total += cells.len();
            }
            (s, total as f64 / 4.0)
        })
        .collect();
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(s, n)| ((1.0 / s).ln(), n.ln()))
        .collect();
    let (slope, stderr) = least_squares_slope(&pts);
    Ok(BoxDimension {
        d_hat: slope,
        stderr,
        counts,
    })
}

/// Result of the equivariance spot-check.
#[derive(Debug, Clone, Copy)]
pub struct EquivarianceReport {
    pub max_error: f64,
    pub matched: usize,
    pub attempted: usize,
}

/// Freely reduces a word (cancels adjacent inverse pairs, convention
/// `inverse(k) = k ^ 1`).
pub fn free_reduce(word: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last().is_some_and(|&last| last == l ^ 1) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Checks that the boundary correspondence intertwines the two group
/// actions: for random generators `g` and samples `(t, w)`, the deformed
/// image `g_def(w)` must coincide with the sample of the conjugated word
/// `g * word * g^{-1}` whenever that sample exists in the curve; its
/// baseline parameter must also sit within `1e-6` of `arg(g_base(e^{it}))`.
pub fn equivariance_check(
    base: &GroupPresentation,
    def: &GroupPresentation,
    curve: &CurvePolyline,
    n_checks: usize,
    seed: u64,
) -> EquivarianceReport {
    let tau = 2.0 * std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    let mut matched = 0usize;
    let by_word: std::collections::HashMap<&[u8], usize> = curve
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| (s.word.as_slice(), i))
        .collect();
    for _ in 0..n_checks {
        let gi = rng.random_range(0..base.generator_count()) as u8;
        let si = rng.random_range(0..curve.samples.len());
        let sample = &curve.samples[si];
        let mut conj = Vec::with_capacity(sample.word.len() + 2);
        conj.push(gi);
        conj.extend_from_slice(&sample.word);
        conj.push(gi ^ 1);
        let conj = free_reduce(&conj);
        let Some(&target) = by_word.get(conj.as_slice()) else {
            continue; // image sample not in the enumerated set
        };
        let expected = &curve.samples[target];
        let src = Complex64::from_polar(1.0, sample.t);
        let img = match base.generators[gi as usize].apply(ExtComplex::Finite(src)) {
            ExtComplex::Finite(z) => z,
            ExtComplex::Infinity => continue,
        };
        let mut t_img = img.arg();
        if t_img < 0.0 {
            t_img += tau;
        }
        let dt = (expected.t - t_img).abs();
        if dt.min(tau - dt) > 1e-6 {
            continue; // baseline parameters disagree: not the same point
        }
        let moved = match def.generators[gi as usize].apply(ExtComplex::Finite(sample.w)) {
            ExtComplex::Finite(z) => z,
            ExtComplex::Infinity => continue,
        };
        matched += 1;
        max_error = max_error.max((moved - expected.w).norm());
    }
    EquivarianceReport {
        max_error,
        matched,
        attempted: n_checks,
    }
}
