//! Quaternions and the isometric action of `SL(2, C)` on the unit-ball
//! model of hyperbolic 3-space.
//!
//! An element `g` acts through the quaternion pair `(a, c)` with
//! `a = (g11 + conj(g22))/2 + (g12 - conj(g21))/2 * j` and
//! `c = (g21 + conj(g12))/2 + (g22 - conj(g11))/2 * j`, which satisfies
//! `|a|^2 - |c|^2 = 1`. A ball point `u = (u0, u1, u2)` is identified with
//! the quaternion `u0 + u1 i + u2 j` and moves by
//! `u -> (a u + c') (c u + a')^{-1}`, where the prime involution negates
//! the `i` and `j` components.

use crate::mobius::MobiusElement;

/// Quaternion `q0 + q1 i + q2 j + q3 k` over the reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub fn zero() -> Self {
        Quaternion::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn one() -> Self {
        Quaternion::new(1.0, 0.0, 0.0, 0.0)
    }

    /// Embeds the complex pair `(x, y)` as `x + y j`.
    pub fn from_complex_pair(x: num_complex::Complex64, y: num_complex::Complex64) -> Self {
        Quaternion::new(x.re, x.im, y.re, y.im)
    }

    pub fn norm_sq(&self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Quaternion::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    /// The involution `q -> q'` implemented by conjugation with `k`:
    /// negates the `i` and `j` components and keeps `1` and `k`.
    pub fn prime(&self) -> Self {
        Quaternion::new(self.q0, -self.q1, -self.q2, self.q3)
    }

    pub fn inverse(&self) -> Self {
        let n = self.norm_sq();
        Quaternion::new(self.q0 / n, -self.q1 / n, -self.q2 / n, -self.q3 / n)
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }
}

impl std::ops::Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.q0 + r.q0, self.q1 + r.q1, self.q2 + r.q2, self.q3 + r.q3)
    }
}

impl std::ops::Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.q0 * r.q0 - self.q1 * r.q1 - self.q2 * r.q2 - self.q3 * r.q3,
            self.q0 * r.q1 + self.q1 * r.q0 + self.q2 * r.q3 - self.q3 * r.q2,
            self.q0 * r.q2 - self.q1 * r.q3 + self.q2 * r.q0 + self.q3 * r.q1,
            self.q0 * r.q3 + self.q1 * r.q2 - self.q2 * r.q1 + self.q3 * r.q0,
        )
    }
}

/// Point of the open unit ball of `R^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
}

#[derive(Debug, thiserror::Error)]
#[error("point lies outside the open unit ball (|u| = {0})")]
pub struct OutsideBall(pub f64);

impl BallPoint {
    pub fn new(u0: f64, u1: f64, u2: f64) -> Result<Self, OutsideBall> {
        let n = (u0 * u0 + u1 * u1 + u2 * u2).sqrt();
        if n < 1.0 {
            Ok(BallPoint { u0, u1, u2 })
        } else {
            Err(OutsideBall(n))
        }
    }

    pub fn origin() -> Self {
        BallPoint {
            u0: 0.0,
            u1: 0.0,
            u2: 0.0,
        }
    }

    pub fn euclid_norm(&self) -> f64 {
        (self.u0 * self.u0 + self.u1 * self.u1 + self.u2 * self.u2).sqrt()
    }

    fn to_quaternion(self) -> Quaternion {
        Quaternion::new(self.u0, self.u1, self.u2, 0.0)
    }

    /// Hyperbolic distance to the ball center, `log((1+|u|)/(1-|u|))`.
    pub fn dist0(&self) -> f64 {
        let r = self.euclid_norm();
        ((1.0 + r) / (1.0 - r)).ln()
    }
}

impl MobiusElement {
    /// The quaternion pair `(a, c)` of the hyperbolic 3-space
    /// representation; satisfies `|a|^2 - |c|^2 = 1` for unit determinant.
    pub fn quaternion_rep(&self) -> (Quaternion, Quaternion) {
        let a = Quaternion::from_complex_pair(
            0.5 * (self.a + self.d.conj()),
            0.5 * (self.b - self.c.conj()),
        );
        let c = Quaternion::from_complex_pair(
            0.5 * (self.c + self.b.conj()),
            0.5 * (self.d - self.a.conj()),
        );
        (a, c)
    }

    /// Isometric action on the unit ball, `u -> (a u + c')(c u + a')^{-1}`.
    /// The result of the quaternionic formula has no `k` component (up to
    /// roundoff), which is dropped.
    pub fn h3_translate(&self, u: BallPoint) -> BallPoint {
        let (a, c) = self.quaternion_rep();
        let q = u.to_quaternion();
        let num = a * q + c.prime();
        let den = c * q + a.prime();
        let img = num * den.inverse();
        debug_assert!(
            img.q3.abs() <= 1e-9 * (1.0 + img.norm()),
            "k component leaked: {}",
            img.q3
        );
        let n = (img.q0 * img.q0 + img.q1 * img.q1 + img.q2 * img.q2).sqrt();
        // products of exact isometries can overshoot the open ball by
        // roundoff; nudge back inside
        if n >= 1.0 {
            let s = (1.0 - 1e-15) / n;
            BallPoint {
                u0: img.q0 * s,
                u1: img.q1 * s,
                u2: img.q2 * s,
            }
        } else {
            BallPoint {
                u0: img.q0,
                u1: img.q1,
                u2: img.q2,
            }
        }
    }

    /// Hyperbolic displacement of the ball center, `dist(g 0, 0)`.
    pub fn h3_displacement(&self) -> f64 {
        self.h3_translate(BallPoint::origin()).dist0()
    }
}

/// Hyperbolic distance between two ball points, computed by moving the
/// first to the center with an explicit isometry of the ball model.
pub fn h3_dist(u: BallPoint, v: BallPoint) -> f64 {
    // dist(u, v) = acosh(1 + 2 |u - v|^2 / ((1 - |u|^2)(1 - |v|^2)))
    let du = 1.0 - u.euclid_norm().powi(2);
    let dv = 1.0 - v.euclid_norm().powi(2);
    let d2 = (u.u0 - v.u0).powi(2) + (u.u1 - v.u1).powi(2) + (u.u2 - v.u2).powi(2);
    (1.0 + 2.0 * d2 / (du * dv)).acosh()
}
