//! Exact small-matrix verification of the double-operator-integral
//! identities behind the commutator estimates.
//!
//! The weight function is
//! `g(t) = 1 - sinh(p t/2) / (sinh(t/2) cosh((p-1) t/2))`, `g(0) = 1 - p/2`,
//! a Schwartz function (identically zero for `p = 2`). With `h` its Fourier
//! transform, `g(t) = int h(s) e^{ist} ds`, two identities hold for
//! positive matrices and are checked here to quadrature accuracy:
//!
//! * `X^p - Y^p = V - int X^{is} V Y^{-is} h(s) ds`,
//!   `V = X^{p-1}(X - Y) + (X - Y) Y^{p-1}`;
//! * `B^p A^p - (A^{1/2} B A^{1/2})^p = "T(0)" - int T(s) h(s) ds`
//!   with the four-term `T(s)` built from `[B, A^{p+is}]`, `[A^{1/2}, B]`
//!   and powers of `Y = A^{1/2} B A^{1/2}`.
//!
//! Imaginary powers use spectral calculus with the convention `0^{is} = 0`:
//! zero eigenvalues are mapped to zero for every power.

use crate::linalg::{self, LinalgError};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DoiError {
    #[error("quadrature did not converge: residual {0:e} -> {1:e} under refinement")]
    QuadratureUnconverged(f64, f64),
    #[error("scheme reconstruction error {0:e} above target {1:e} after refinement")]
    SchemeUnconverged(f64, f64),
    #[error("matrix of size {0} exceeds the small-matrix contract (n <= {1})")]
    MatrixTooLarge(usize, usize),
    #[error("input is not Hermitian positive semidefinite (residual {0:e})")]
    NotPositive(f64),
    #[error("exponent p = {0} must exceed 1")]
    BadExponent(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

const VERIFY_MAX_DIM: usize = 8;

/// The even Schwartz weight `g`. Evaluated through the overflow-free form
/// `(e^{(1-p)t} - e^{-t}) / ((1 - e^{-t})(1 + e^{(1-p)t}))` for `t > 0`,
/// with the Taylor value near the removable singularity at `t = 0`.
pub fn g_func(p: f64, t: f64) -> f64 {
    let t = t.abs();
    if t < 1e-3 {
        // g(0) + g''(0)/2 t^2, g''(0)/2 = (p^3 - 3p^2 + 2p)/24
        return (1.0 - p / 2.0) + (p * p * p - 3.0 * p * p + 2.0 * p) / 24.0 * t * t;
    }
    let num = ((1.0 - p) * t).exp() - (-t).exp();
    let den = (1.0 - (-t).exp()) * (1.0 + ((1.0 - p) * t).exp());
    num / den
}

/// Fourier transform of `g` at the given frequencies,
/// `h(s) = (1/pi) int_0^inf g(t) cos(s t) dt`. The integrand is even and
/// exponentially decaying, so the trapezoid sum is spectrally accurate.
pub fn h_func(p: f64, s_nodes: &[f64]) -> Vec<f64> {
    let decay = (p - 1.0).min(1.0).max(0.05);
    let t_cut = (34.0 / decay).max(60.0);
    let dt = 0.005;
    let steps = (t_cut / dt) as usize;
    let g_vals: Vec<f64> = (0..=steps).map(|k| g_func(p, k as f64 * dt)).collect();
    s_nodes
        .iter()
        .map(|&s| {
            let mut acc = 0.5 * g_vals[0];
            for (k, &gv) in g_vals.iter().enumerate().skip(1) {
                acc += gv * (s * k as f64 * dt).cos();
            }
            acc * dt / std::f64::consts::PI
        })
        .collect()
}

/// Trapezoid quadrature scheme for the `h`-integral: nodes, weights and
/// cached `h` values, self-calibrated so that the reconstruction
/// `sum_j w_j h(s_j) e^{i s_j t}` matches `g` on a test grid to `1e-8`.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    pub exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub h_values: Vec<f64>,
    pub s_radius: f64,
    pub reconstruction_error: f64,
}

impl QuadratureScheme {
    /// Scheme for exponent `p`, accurate for spectral log-ratios
    /// `|log(x/y)| <= 12`.
    pub fn build(p: f64) -> Result<Self, DoiError> {
        Self::build_with(p, 12.0, 1e-8)
    }

    /// Scheme accurate on `|t| <= t_max` to `target`, refined by node
    /// doubling until the self-calibration passes.
    pub fn build_with(p: f64, t_max: f64, target: f64) -> Result<Self, DoiError> {
        if p <= 1.0 {
            return Err(DoiError::BadExponent(p));
        }
        let mut s_radius = 14.0f64;
        let mut ds = 0.05f64;
        let mut best: Option<QuadratureScheme> = None;
        for _round in 0..5 {
            let scheme = Self::assemble(p, s_radius, ds, t_max);
            let done = scheme.reconstruction_error <= target;
            let better = best
                .as_ref()
                .is_none_or(|b| scheme.reconstruction_error < b.reconstruction_error);
            if better {
                best = Some(scheme);
            }
            if done {
                return Ok(best.unwrap());
            }
            ds /= 2.0;
            s_radius *= 1.25;
        }
        let b = best.unwrap();
        Err(DoiError::SchemeUnconverged(b.reconstruction_error, target))
    }

    /// Deliberately coarse scheme (for convergence studies).
    pub fn coarse(p: f64, ds: f64, s_radius: f64) -> Self {
        Self::assemble(p, s_radius, ds, 12.0)
    }

    fn assemble(p: f64, s_radius: f64, ds: f64, t_max: f64) -> QuadratureScheme {
        let n = (2.0 * s_radius / ds).round() as usize;
        let nodes: Vec<f64> = (0..=n).map(|j| -s_radius + j as f64 * ds).collect();
        let mut weights = vec![ds; n + 1];
        weights[0] = 0.5 * ds;
        weights[n] = 0.5 * ds;
        let h_values = h_func(p, &nodes);
        let mut scheme = QuadratureScheme {
            exponent: p,
            nodes,
            weights,
            h_values,
            s_radius,
            reconstruction_error: f64::NAN,
        };
        scheme.reconstruction_error = scheme.calibrate(t_max);
        scheme
    }

    /// `sum_j w_j h(s_j) cos(s_j t)`; the sine part cancels since `h` is
    /// even.
    pub fn reconstruct_g(&self, t: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.h_values)
            .map(|((&s, &w), &h)| w * h * (s * t).cos())
            .sum()
    }

    fn calibrate(&self, t_max: f64) -> f64 {
        let mut err: f64 = 0.0;
        let steps = (t_max / 0.25) as usize;
        for k in 0..=steps {
            let t = k as f64 * 0.25;
            err = err.max((self.reconstruct_g(t) - g_func(self.exponent, t)).abs());
        }
        err
    }
}

/// Eigendecomposition of a Hermitian PSD matrix with the `0^z = 0`
/// convention baked into the power map.
struct PsdFactors {
    q: Array2<Complex64>,
    evals: Vec<f64>,
}

impl PsdFactors {
    fn new(m: &Array2<Complex64>) -> Result<Self, DoiError> {
        let herm = linalg::hermitian_residual(m);
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if herm > 1e-8 * scale {
            return Err(DoiError::NotPositive(herm));
        }
        let (evals, q) = linalg::eigh_full(m)?;
        let max = evals.iter().cloned().fold(1.0f64, f64::max);
        if let Some(min) = evals.first() {
            if *min < -1e-10 * max {
                return Err(DoiError::NotPositive(-*min));
            }
        }
        // clamp the numerically-zero part of the spectrum to exact zero
        let cutoff = 1e-12 * max;
        let evals = evals
            .into_iter()
            .map(|l| if l <= cutoff { 0.0 } else { l })
            .collect();
        Ok(PsdFactors { q, evals })
    }

    /// `m^z` by spectral calculus; zero eigenvalues map to zero for every
    /// exponent, including purely imaginary ones.
    fn power(&self, z: Complex64) -> Array2<Complex64> {
        let n = self.evals.len();
        let mut diag = Array2::<Complex64>::zeros((n, n));
        for (i, &l) in self.evals.iter().enumerate() {
            diag[(i, i)] = if l == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (z * l.ln()).exp()
            };
        }
        self.q.dot(&diag).dot(&linalg::adjoint(&self.q))
    }
}

fn comm(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    a.dot(b) - b.dot(a)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Residual (operator norm) of
/// `X^p - Y^p = V - sum_j w_j h(s_j) X^{i s_j} V Y^{-i s_j}` with
/// `V = X^{p-1}(X - Y) + (X - Y) Y^{p-1}`.
pub fn verify_power_difference(
    x: &Array2<Complex64>,
    y: &Array2<Complex64>,
    p: f64,
    quad: &QuadratureScheme,
) -> Result<f64, DoiError> {
    let n = x.nrows();
    if n > VERIFY_MAX_DIM {
        return Err(DoiError::MatrixTooLarge(n, VERIFY_MAX_DIM));
    }
    if p <= 1.0 {
        return Err(DoiError::BadExponent(p));
    }
    let xf = PsdFactors::new(x)?;
    let yf = PsdFactors::new(y)?;
    let diff = x - y;
    let v = xf.power(re(p - 1.0)).dot(&diff) + diff.dot(&yf.power(re(p - 1.0)));
    let mut lhs = xf.power(re(p)) - yf.power(re(p)) - &v;
    for ((&s, &w), &h) in quad.nodes.iter().zip(&quad.weights).zip(&quad.h_values) {
        let term = xf
            .power(Complex64::new(0.0, s))
            .dot(&v)
            .dot(&yf.power(Complex64::new(0.0, -s)));
        lhs = lhs + term.mapv(|z| z * w * h);
    }
    Ok(linalg::op_norm(&lhs)?)
}

/// Residual (operator norm) of the second integral formula
/// `B^p A^p - Y^p = "T(0)" - sum_j w_j h(s_j) T(s_j)`,
/// `Y = A^{1/2} B A^{1/2}`, where
/// `T(s) = B^{p-1+is}[B, A^{p+is}]Y^{-is}
///       + B^{p-1+is} A^{p-1/2+is} [A^{1/2}, B] Y^{-is}
///       + B^{is} [B, A^{1+is}] Y^{p-1-is}
///       + B^{is} A^{1/2+is} [A^{1/2}, B] Y^{p-1-is}`
/// and `"T(0)"` is the same expression at `s = 0` with the identity in
/// place of the support projections `B^{i0}, Y^{-i0}`.
pub fn verify_second_formula(
    a: &Array2<Complex64>,
    b: &Array2<Complex64>,
    p: f64,
    quad: &QuadratureScheme,
) -> Result<f64, DoiError> {
    let n = a.nrows();
    if n > VERIFY_MAX_DIM {
        return Err(DoiError::MatrixTooLarge(n, VERIFY_MAX_DIM));
    }
    if p <= 1.0 {
        return Err(DoiError::BadExponent(p));
    }
    let af = PsdFactors::new(a)?;
    let bf = PsdFactors::new(b)?;
    let a_half = af.power(re(0.5));
    let y_mat = a_half.dot(b).dot(&a_half);
    let yf = PsdFactors::new(&y_mat)?;
    let comm_ahalf_b = comm(&a_half, b);

    let t_at = |s: f64| -> Array2<Complex64> {
        let is = Complex64::new(0.0, s);
        let b_p1 = bf.power(re(p - 1.0) + is);
        let b_is = bf.power(is);
        let y_mis = yf.power(-is);
        let y_p1 = yf.power(re(p - 1.0) - is);
        let t1 = b_p1.dot(&comm(b, &af.power(re(p) + is))).dot(&y_mis);
        let t2 = b_p1
            .dot(&af.power(re(p - 0.5) + is))
            .dot(&comm_ahalf_b)
            .dot(&y_mis);
        let t3 = b_is.dot(&comm(b, &af.power(re(1.0) + is))).dot(&y_p1);
        let t4 = b_is
            .dot(&af.power(re(0.5) + is))
            .dot(&comm_ahalf_b)
            .dot(&y_p1);
        t1 + t2 + t3 + t4
    };

    // "T(0)": no support projections, plain positive powers
    let t_zero = bf.power(re(p - 1.0)).dot(&comm(b, &af.power(re(p))))
        + bf
            .power(re(p - 1.0))
            .dot(&af.power(re(p - 0.5)))
            .dot(&comm_ahalf_b)
        + comm(b, a).dot(&yf.power(re(p - 1.0)))
        + a_half.dot(&comm_ahalf_b).dot(&yf.power(re(p - 1.0)));

    let mut lhs = bf.power(re(p)).dot(&af.power(re(p))) - yf.power(re(p)) - &t_zero;
    for ((&s, &w), &h) in quad.nodes.iter().zip(&quad.weights).zip(&quad.h_values) {
        lhs = lhs + t_at(s).mapv(|z| z * w * h);
    }
    Ok(linalg::op_norm(&lhs)?)
}

/// Runs a verification twice, on the given scheme and on a refined one,
/// and demands the documented convergence: the residual either sits at the
/// roundoff floor or drops by at least 4x under node doubling.
pub fn converged_residual<F>(
    p: f64,
    quad: &QuadratureScheme,
    floor: f64,
    verify: F,
) -> Result<f64, DoiError>
where
    F: Fn(&QuadratureScheme) -> Result<f64, DoiError>,
{
    let r1 = verify(quad)?;
    if r1 <= floor {
        return Ok(r1);
    }
    let refined = QuadratureScheme::coarse(p, quad.nodes[1] - quad.nodes[0], quad.s_radius);
    let refined = QuadratureScheme::coarse(
        p,
        (refined.nodes[1] - refined.nodes[0]) / 2.0,
        refined.s_radius * 1.25,
    );
    let r2 = verify(&refined)?;
    if r2 <= floor || r2 <= r1 / 4.0 {
        Ok(r2)
    } else {
        Err(DoiError::QuadratureUnconverged(r1, r2))
    }
}

/// Singular-value profile of `B^p A^p - (A^{1/2} B A^{1/2})^p` together
/// with the weighted sequence `(k+1) mu(k)`; decay of the latter is the
/// numerical signature of the difference being a higher-order
/// infinitesimal than either factor.
#[derive(Debug, Clone)]
pub struct SmallnessDiag {
    pub singular_values: Vec<f64>,
    pub weighted: Vec<f64>,
}

pub fn commutator_smallness_diag(
    a: &Array2<Complex64>,
    b: &Array2<Complex64>,
    p: f64,
) -> Result<SmallnessDiag, DoiError> {
    if p <= 1.0 {
        return Err(DoiError::BadExponent(p));
    }
    let af = PsdFactors::new(a)?;
    let bf = PsdFactors::new(b)?;
    let a_half = af.power(re(0.5));
    let yf = PsdFactors::new(&a_half.dot(b).dot(&a_half))?;
    let diff = bf.power(re(p)).dot(&af.power(re(p))) - yf.power(re(p));
    let singular_values = linalg::svd_values(&diff)?;
    let weighted = singular_values
        .iter()
        .enumerate()
        .map(|(k, &s)| (k + 1) as f64 * s)
        .collect();
    Ok(SmallnessDiag {
        singular_values,
        weighted,
    })
}

/// Random Hermitian PSD matrix with log-uniform eigenvalues in
/// `[eig_lo, eig_hi]`, rotated by a random unitary.
pub fn random_psd<R: Rng>(n: usize, eig_lo: f64, eig_hi: f64, rng: &mut R) -> Array2<Complex64> {
    let evals: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            (eig_lo.ln() + u * (eig_hi.ln() - eig_lo.ln())).exp()
        })
        .collect();
    let q = random_unitary(n, rng);
    let mut diag = Array2::<Complex64>::zeros((n, n));
    for (i, &l) in evals.iter().enumerate() {
        diag[(i, i)] = Complex64::new(l, 0.0);
    }
    let m = q.dot(&diag).dot(&linalg::adjoint(&q));
    // symmetrize away roundoff
    (&m + &linalg::adjoint(&m)).mapv(|z| 0.5 * z)
}

/// Random rank-deficient orthogonal projector.
pub fn random_projector<R: Rng>(n: usize, rank: usize, rng: &mut R) -> Array2<Complex64> {
    let q = random_unitary(n, rng);
    let mut diag = Array2::<Complex64>::zeros((n, n));
    for i in 0..rank.min(n) {
        diag[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let m = q.dot(&diag).dot(&linalg::adjoint(&q));
    (&m + &linalg::adjoint(&m)).mapv(|z| 0.5 * z)
}

/// Haar-ish random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Array2<Complex64> {
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| Complex64::new(gauss(), gauss())).collect())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj: Complex64 = (0..n).map(|k| cols[i][k].conj() * cols[j][k]).sum();
            for k in 0..n {
                let c = cols[i][k];
                cols[j][k] -= proj * c;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            cols[j][k] /= norm;
        }
    }
    Array2::from_shape_fn((n, n), |(i, j)| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(x: f64) -> Array2<Complex64> {
        Array2::from_elem((1, 1), Complex64::new(x, 0.0))
    }

    #[test]
    fn g_at_zero_and_for_p_two() {
        for p in [1.2, 1.5, 2.5, 3.0] {
            assert_abs_diff_eq!(g_func(p, 0.0), 1.0 - p / 2.0, epsilon = 1e-14);
        }
        for t in [0.0, 0.3, 1.0, 5.0, 20.0] {
            assert_abs_diff_eq!(g_func(2.0, t), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn g_matches_the_hyperbolic_form() {
        // 1 - sinh(p t/2) / (2 sinh(t/2) cosh((p-1) t/2)), writing the
        // exponential-difference form through 2 sinh and 2 cosh
        let alt = |p: f64, t: f64| {
            1.0 - (p * t / 2.0).sinh() / (2.0 * (t / 2.0).sinh() * ((p - 1.0) * t / 2.0).cosh())
        };
        for p in [1.3, 1.5, 2.7] {
            for k in 1..80 {
                let t = k as f64 * 0.25;
                assert_abs_diff_eq!(g_func(p, t), alt(p, t), epsilon = 1e-11);
                assert_abs_diff_eq!(g_func(p, -t), g_func(p, t), epsilon = 1e-15);
            }
            // across the Taylor patch boundary
            for t in [3e-4, 8e-4, 1.2e-3, 3e-3] {
                assert_abs_diff_eq!(g_func(p, t), alt(p, t), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn g_tail_is_exponential() {
        // for p < 2, g(t) e^{(p-1)t} -> 1
        let p = 1.5;
        for t in [30.0, 40.0] {
            assert_abs_diff_eq!(g_func(p, t) * ((p - 1.0) * t).exp(), 1.0, epsilon = 1e-5);
        }
        // for p > 2, g(t) ~ -e^{-t}
        let p = 3.0;
        for t in [30.0, 40.0] {
            assert_abs_diff_eq!(g_func(p, t) * t.exp(), -1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn h_is_even_real_and_integrates_to_g0() {
        let p = 1.5;
        let nodes: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.25).collect();
        let h = h_func(p, &nodes);
        for (k, &s) in nodes.iter().enumerate() {
            let mirrored = nodes.iter().position(|&x| (x + s).abs() < 1e-12).unwrap();
            assert_abs_diff_eq!(h[k], h[mirrored], epsilon = 1e-10);
        }
        let scheme = QuadratureScheme::build(p).unwrap();
        let integral: f64 = scheme
            .weights
            .iter()
            .zip(&scheme.h_values)
            .map(|(w, h)| w * h)
            .sum();
        assert_abs_diff_eq!(integral, 1.0 - p / 2.0, epsilon = 1e-6);
        // p = 2: h vanishes identically
        let h2 = h_func(2.0, &nodes);
        assert!(h2.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn scheme_reconstructs_g_to_target() {
        for p in [1.2, 1.5, 2.5, 3.0] {
            let scheme = QuadratureScheme::build(p).unwrap();
            assert!(
                scheme.reconstruction_error <= 1e-8,
                "p = {p}: reconstruction error {:e}",
                scheme.reconstruction_error
            );
        }
    }

    #[test]
    fn scalar_power_difference_oracle() {
        // x = 2, y = 1, p = 1.5: v (1 - g(log 2)) = x^p - y^p exactly
        let p = 1.5;
        let (x, y) = (2.0f64, 1.0f64);
        let v = x.powf(p - 1.0) * (x - y) + (x - y) * y.powf(p - 1.0);
        let exact = x.powf(p) - y.powf(p);
        assert_abs_diff_eq!(v * (1.0 - g_func(p, (x / y).ln())), exact, epsilon = 1e-12);

        let scheme = QuadratureScheme::build(p).unwrap();
        let r = verify_power_difference(&scalar(x), &scalar(y), p, &scheme).unwrap();
        assert!(r <= 1e-8, "scalar residual {r:e}");
    }

    #[test]
    fn power_difference_trivial_and_random() {
        let scheme = QuadratureScheme::build(1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = random_psd(5, 0.1, 4.0, &mut rng);
        let r0 = verify_power_difference(&x, &x, 1.5, &scheme).unwrap();
        assert!(r0 <= 1e-12, "X = Y residual {r0:e}");

        for p in [1.2, 1.5, 3.0] {
            let scheme = QuadratureScheme::build(p).unwrap();
            for _ in 0..3 {
                let x = random_psd(6, 0.1, 4.0, &mut rng);
                let y = random_psd(6, 0.1, 4.0, &mut rng);
                let r = verify_power_difference(&x, &y, p, &scheme).unwrap();
                assert!(r <= 1e-6, "p = {p}: residual {r:e}");
            }
        }
    }

    #[test]
    fn second_formula_commuting_projector_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);

        // commuting diagonal case: both sides vanish
        let a = Array2::from_shape_fn((4, 4), |(i, j)| {
            if i == j {
                Complex64::new(0.5 + i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let b = Array2::from_shape_fn((4, 4), |(i, j)| {
            if i == j {
                Complex64::new(2.0 - 0.3 * i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let scheme = QuadratureScheme::build(1.5).unwrap();
        let r = verify_second_formula(&a, &b, 1.5, &scheme).unwrap();
        assert!(r <= 1e-10, "commuting residual {r:e}");

        // rank-deficient projector B exercises the 0^{is} = 0 convention
        let a = random_psd(6, 0.5, 2.0, &mut rng);
        let b = random_projector(6, 3, &mut rng);
        let r = verify_second_formula(&a, &b, 1.5, &scheme).unwrap();
        assert!(r <= 1e-6, "projector residual {r:e}");

        let scheme = QuadratureScheme::build(2.5).unwrap();
        let a = random_psd(6, 0.1, 4.0, &mut rng);
        let b = random_psd(6, 0.1, 4.0, &mut rng);
        let r = verify_second_formula(&a, &b, 2.5, &scheme).unwrap();
        assert!(r <= 1e-6, "random residual {r:e}");
    }

    #[test]
    fn residual_drops_under_node_doubling() {
        let p = 1.7;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_psd(5, 0.1, 4.0, &mut rng);
        let y = random_psd(5, 0.1, 4.0, &mut rng);
        let coarse = QuadratureScheme::coarse(p, 0.4, 10.0);
        let r1 = verify_power_difference(&x, &y, p, &coarse).unwrap();
        let finer = QuadratureScheme::coarse(p, 0.2, 12.5);
        let r2 = verify_power_difference(&x, &y, p, &finer).unwrap();
        assert!(
            r2 <= r1 / 4.0 || r2 <= 1e-8,
            "no 4x decrease: {r1:e} -> {r2:e}"
        );
        // and the wrapper agrees
        let r = converged_residual(p, &coarse, 1e-8, |q| {
            verify_power_difference(&x, &y, p, q)
        })
        .unwrap();
        assert!(r <= r1);
    }

    #[test]
    fn smallness_diag_commuting_and_perturbative() {
        let p = 1.5;
        let n = 256;
        let b = Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                Complex64::new(((i + 1) as f64).powf(-1.0 / p), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let id = Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let diag = commutator_smallness_diag(&id, &b, p).unwrap();
        assert!(diag.singular_values[0] <= 1e-12, "commuting case not zero");

        let tri = |eps: f64| {
            Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else if i.abs_diff(j) == 1 {
                    Complex64::new(eps, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let eps = 1e-3;
        let diag1 = commutator_smallness_diag(&tri(eps), &b, p).unwrap();
        let max_weighted = diag1.weighted.iter().cloned().fold(0.0, f64::max);
        assert!(
            max_weighted <= 10.0 * eps,
            "weighted profile {max_weighted:e} above 10 eps"
        );
        // halving eps halves the profile within 20%
        let diag2 = commutator_smallness_diag(&tri(eps / 2.0), &b, p).unwrap();
        let max2 = diag2.weighted.iter().cloned().fold(0.0, f64::max);
        let ratio = max_weighted / max2;
        assert!(
            (ratio - 2.0).abs() <= 0.4,
            "profile not linear in eps: ratio {ratio}"
        );
    }
}
