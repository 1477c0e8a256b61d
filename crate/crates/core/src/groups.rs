//! Catalog of concrete Kleinian groups: the cocompact genus-2 octagon
//! Fuchsian group, its bending deformations along the separating commutator
//! curve, and Möbius conjugates.
//!
//! Generator lists are closed under inversion with the convention that the
//! inverse of index `k` sits at index `k ^ 1`.

use crate::mobius::{MobiusClass, MobiusElement};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("bending curve element is not loxodromic (tr^2 = {0})")]
    NotLoxodromic(Complex64),
    #[error("bending angle {0} exceeds the certified range |theta| <= {1}")]
    BendTooLarge(f64, f64),
    #[error("marking does not satisfy [g0,g1][g2,g3] = 1; bending would not preserve the group")]
    IncompatibleMarking,
    #[error("generator {0} is {1:?}; all generators must be loxodromic")]
    BadGenerator(usize, MobiusClass),
    #[error("generators {0} and {1} coincide projectively")]
    DuplicateGenerator(usize, usize),
    #[error("unknown group label '{0}' (see `catalog`)")]
    UnknownLabel(String),
    #[error("invalid parameter in group label '{0}': {1}")]
    BadLabel(String, String),
    #[error(transparent)]
    Mobius(#[from] crate::mobius::MobiusError),
}

/// Beyond this bending angle discreteness is not certified; the curve
/// diagnostics are the only guarantee the tool offers.
pub const THETA_MAX: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GroupKind {
    Fuchsian,
    QuasiFuchsian,
    Conjugated,
}

/// A marked generating set. `generators[k ^ 1]` is the inverse of
/// `generators[k]`; base generators live at even indices.
#[derive(Debug, Clone)]
pub struct GroupPresentation {
    pub label: String,
    pub generators: Vec<MobiusElement>,
    pub kind: GroupKind,
    pub bending_angle: f64,
}

impl GroupPresentation {
    fn validated(self) -> Result<Self, GroupError> {
        for (k, g) in self.generators.iter().enumerate() {
            let class = g.classify();
            if class != MobiusClass::Loxodromic {
                return Err(GroupError::BadGenerator(k, class));
            }
        }
        for i in 0..self.generators.len() {
            for j in (i + 1)..self.generators.len() {
                if self.generators[i].psl_eq(&self.generators[j], 1e-8) {
                    return Err(GroupError::DuplicateGenerator(i, j));
                }
            }
        }
        Ok(self)
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Index of the inverse generator.
    pub fn inverse_index(k: usize) -> usize {
        k ^ 1
    }

    /// Matrix of a word (letters are generator indices, applied left to
    /// right as a matrix product).
    pub fn word_matrix(&self, word: &[u8]) -> MobiusElement {
        let mut m = MobiusElement::identity();
        for &l in word {
            m = m.compose(&self.generators[l as usize]);
        }
        m
    }
}

/// The regular-octagon genus-2 Fuchsian group. The pairing translation
/// `T = [[1+sqrt2, sqrt(2+2 sqrt2)], [sqrt(2+2 sqrt2), 1+sqrt2]]` has
/// `det T = 1` and `cosh(l/2) = 1 + sqrt2 = cot(pi/8)`, the classical value
/// for opposite-side pairings of the regular octagon with vertex angle
/// `pi/4`. The four base generators are `T` conjugated by disk rotations of
/// `k pi / 4`, so their axes pass through `+-e^{i k pi/4}` and the eight
/// side pairings are pairwise distinct.
pub fn octagon_fuchsian() -> GroupPresentation {
    let alpha = 1.0 + 2.0f64.sqrt();
    let beta = (2.0 + 2.0 * 2.0f64.sqrt()).sqrt();
    let mut generators = Vec::with_capacity(8);
    for k in 0..4 {
        // disk rotation by k*pi/4 is diag(e^{i k pi/8}, e^{-i k pi/8})
        let phase = Complex64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4);
        let g = MobiusElement {
            a: Complex64::new(alpha, 0.0),
            b: beta * phase,
            c: beta * phase.conj(),
            d: Complex64::new(alpha, 0.0),
        };
        generators.push(g);
        generators.push(g.inverse());
    }
    GroupPresentation {
        label: "octagon".to_string(),
        generators,
        kind: GroupKind::Fuchsian,
        bending_angle: 0.0,
    }
    .validated()
    .expect("octagon generators are loxodromic and distinct")
}

/// Genus-2 Fuchsian group marked for bending: two one-holed-torus groups
/// glued along a common boundary geodesic (Fenchel-Nielsen amalgam), so
/// that `[g0, g1] [g2, g3] = 1` holds exactly.
///
/// The first handle pair `a, b` are hyperbolic translations of equal trace
/// `2 + 2 sqrt2` with perpendicular axes through the disk center; the
/// strongly negative commutator trace puts `<a, b>` in the discrete free
/// holed-torus regime. The second pair is `c = j a j^{-1}`, `d = j b
/// j^{-1}` with `j` the half-turn about the point of `axis([a, b])`
/// closest to the center, which inverts the commutator: `[c, d] = j [a, b]
/// j^{-1} = [a, b]^{-1}`. The two tori lie on opposite sides of the shared
/// axis, so the amalgam is a closed genus-2 group.
pub fn amalgam_fuchsian() -> GroupPresentation {
    amalgam_with_handle_trace(AMALGAM_HANDLE_TRACE)
}

/// Handle trace of the default amalgam marking. Chosen so the separating
/// commutator geodesic is short enough for the limit-set dimension to
/// respond visibly to bending, while keeping the word metric efficient
/// enough for desk-scale orbit enumeration.
pub const AMALGAM_HANDLE_TRACE: f64 = 3.2;

/// Amalgam marking with a custom handle trace `tr(a) = tr(b) > 2 sqrt2`
/// (the discreteness threshold for the perpendicular-axes handle pair).
pub fn amalgam_with_handle_trace(handle_trace: f64) -> GroupPresentation {
    let half_trace = handle_trace / 2.0;
    assert!(
        half_trace * half_trace > 2.0,
        "handle trace below the discrete holed-torus threshold"
    );
    let sh = (half_trace * half_trace - 1.0).sqrt();
    let a = MobiusElement {
        a: Complex64::new(half_trace, 0.0),
        b: Complex64::new(sh, 0.0),
        c: Complex64::new(sh, 0.0),
        d: Complex64::new(half_trace, 0.0),
    };
    let b = MobiusElement {
        a: Complex64::new(half_trace, 0.0),
        b: Complex64::new(0.0, sh),
        c: Complex64::new(0.0, -sh),
        d: Complex64::new(half_trace, 0.0),
    };
    let k = a
        .compose(&b)
        .compose(&a.inverse())
        .compose(&b.inverse());
    let p = axis_foot_from_center(&k);
    let j = half_turn(p);
    let j_inv = j.inverse();
    let c = j.compose(&a).compose(&j_inv);
    let d = j.compose(&b).compose(&j_inv);
    let generators = vec![
        a,
        a.inverse(),
        b,
        b.inverse(),
        c,
        c.inverse(),
        d,
        d.inverse(),
    ];
    GroupPresentation {
        label: "amalgam".to_string(),
        generators,
        kind: GroupKind::Fuchsian,
        bending_angle: 0.0,
    }
    .validated()
    .expect("amalgam generators are loxodromic and distinct")
}

/// Trace of the separating commutator `[g0, g1]` of a marked presentation.
pub fn separating_curve_trace(pres: &GroupPresentation) -> Complex64 {
    pres.word_matrix(&[0, 2, 1, 3]).trace()
}

/// Foot of the perpendicular from the disk center to the axis of a
/// loxodromic disk-preserving element.
fn axis_foot_from_center(k: &MobiusElement) -> Complex64 {
    let (att, rep) = k.fixed_points().expect("axis of a non-loxodromic element");
    let u = att.finite().expect("disk axis endpoint at infinity");
    let v = rep.finite().expect("disk axis endpoint at infinity");
    let u = u / u.norm();
    let v = v / v.norm();
    if (u + v).norm() < 1e-9 {
        return Complex64::new(0.0, 0.0); // axis is a diameter
    }
    // center of the circle through u, v orthogonal to the unit circle
    let zeta = (u + v) / (1.0 + (u.conj() * v).re);
    let r = (zeta.norm_sqr() - 1.0).max(0.0).sqrt();
    zeta * (1.0 - r / zeta.norm())
}

/// Elliptic half-turn about a point of the disk.
fn half_turn(p: Complex64) -> MobiusElement {
    let scale = 1.0 / (1.0 - p.norm_sqr()).sqrt();
    let t = MobiusElement {
        a: Complex64::new(scale, 0.0),
        b: p * scale,
        c: p.conj() * scale,
        d: Complex64::new(scale, 0.0),
    };
    let rot = MobiusElement {
        a: Complex64::new(0.0, 1.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(0.0, -1.0),
    };
    t.compose(&rot).compose(&t.inverse())
}

/// Bends a marked genus-2 group along the separating curve carried by the
/// commutator `K = [g0, g1]`: generators `g2, g3` are conjugated by
/// `E_theta = M diag(e^{i theta/2}, e^{-i theta/2}) M^{-1}` where
/// `K = M diag(lambda, 1/lambda) M^{-1}`, `|lambda| > 1`. For `theta = 0`
/// this is the identity deformation.
///
/// The marking must satisfy `[g0, g1] [g2, g3] = 1` (as in
/// [`amalgam_fuchsian`]); otherwise the conjugation changes the abstract
/// group instead of deforming it, and the call is rejected.
pub fn bend(pres: &GroupPresentation, theta: f64) -> Result<GroupPresentation, GroupError> {
    if theta.abs() > THETA_MAX {
        return Err(GroupError::BendTooLarge(theta, THETA_MAX));
    }
    let k01 = commutator(&pres.generators[0], &pres.generators[2]);
    let k23 = commutator(&pres.generators[4], &pres.generators[6]);
    if !k01.compose(&k23).is_identity_psl(1e-8) {
        return Err(GroupError::IncompatibleMarking);
    }
    let e = bending_conjugator(pres, theta)?;
    let e_inv = e.inverse();
    let mut generators = pres.generators.clone();
    for k in 4..8 {
        generators[k] = e.compose(&pres.generators[k]).compose(&e_inv);
    }
    GroupPresentation {
        label: if theta == 0.0 {
            pres.label.clone()
        } else {
            format!("bent:{theta}")
        },
        generators,
        kind: if theta == 0.0 {
            pres.kind
        } else {
            GroupKind::QuasiFuchsian
        },
        bending_angle: theta,
    }
    .validated()
}

fn commutator(g: &MobiusElement, h: &MobiusElement) -> MobiusElement {
    g.compose(h).compose(&g.inverse()).compose(&h.inverse())
}

/// The elliptic element rotating by `theta` about the axis of `[g0, g1]`.
pub fn bending_conjugator(
    pres: &GroupPresentation,
    theta: f64,
) -> Result<MobiusElement, GroupError> {
    let g0 = &pres.generators[0];
    let g1 = &pres.generators[2];
    let k = g0
        .compose(g1)
        .compose(&pres.generators[1])
        .compose(&pres.generators[3]);
    if k.classify() != MobiusClass::Loxodromic {
        return Err(GroupError::NotLoxodromic(k.trace() * k.trace()));
    }
    let m = eigenframe(&k);
    let half = Complex64::from_polar(1.0, 0.5 * theta);
    let rot = MobiusElement {
        a: half,
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: half.conj(),
    };
    Ok(m.compose(&rot).compose(&m.inverse()))
}

/// Unit-determinant eigenvector frame `M` with `K = M diag(l, 1/l) M^{-1}`,
/// first column the `|l| > 1` eigenvector.
fn eigenframe(k: &MobiusElement) -> MobiusElement {
    let tr = k.trace();
    let disc = (tr * tr - 4.0).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    let (big, small) = if l1.norm() >= l2.norm() {
        (l1, l2)
    } else {
        (l2, l1)
    };
    // eigenvector for eigenvalue l: (b, l - a) or (l - d, c), whichever is
    // better conditioned
    let col = |l: Complex64| -> (Complex64, Complex64) {
        let v1 = (k.b, l - k.a);
        let v2 = (l - k.d, k.c);
        if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() {
            v1
        } else {
            v2
        }
    };
    let (x1, y1) = col(big);
    let (x2, y2) = col(small);
    MobiusElement::new(x1, x2, y1, y2).expect("eigenvectors of a loxodromic element are independent")
}

/// Conjugates every generator by `m`.
pub fn conjugate(pres: &GroupPresentation, m: &MobiusElement) -> GroupPresentation {
    let m_inv = m.inverse();
    let generators = pres
        .generators
        .iter()
        .map(|g| m.compose(g).compose(&m_inv))
        .collect();
    GroupPresentation {
        label: format!("{}-conj", pres.label),
        generators,
        kind: if pres.kind == GroupKind::Fuchsian {
            GroupKind::Conjugated
        } else {
            pres.kind
        },
        bending_angle: pres.bending_angle,
    }
}

/// Default conjugator for the `conjugated` catalog entry: moves the unit
/// circle to a round circle in generic position while keeping infinity in
/// the exterior component.
pub fn default_conjugator() -> MobiusElement {
    MobiusElement::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.3, 0.1),
        Complex64::new(0.2, 0.0),
        Complex64::new(1.06, 0.0),
    )
    .expect("default conjugator is invertible")
}

/// One row of the group catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub summary: &'static str,
}

/// Families constructible by name. Labels accepted by [`build_group`]:
/// `octagon`, `amalgam`, `bent:<theta>`, `conjugated`.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            label: "octagon",
            summary: "genus-2 regular-octagon Fuchsian group; limit set is the unit circle",
        },
        CatalogEntry {
            label: "amalgam",
            summary: "genus-2 Fuchsian group marked as a holed-torus amalgam ([g0,g1][g2,g3] = 1)",
        },
        CatalogEntry {
            label: "bent:<theta>",
            summary: "amalgam group bent by <theta> radians along the separating commutator axis",
        },
        CatalogEntry {
            label: "conjugated",
            summary: "octagon group conjugated by a fixed generic Mobius map; round limit circle",
        },
    ]
}

/// Builds the group named by `label`.
pub fn build_group(label: &str) -> Result<GroupPresentation, GroupError> {
    Ok(build_pair(label)?.1)
}

/// Builds `(baseline, deformed)` for an equivariant family; both share the
/// same marked generator indexing. Bent families use the amalgam marking
/// (the one along which bending preserves the group).
pub fn build_pair(label: &str) -> Result<(GroupPresentation, GroupPresentation), GroupError> {
    if label == "octagon" {
        let base = octagon_fuchsian();
        let def = base.clone();
        return Ok((base, def));
    }
    if label == "amalgam" {
        let base = amalgam_fuchsian();
        let def = base.clone();
        return Ok((base, def));
    }
    if label == "conjugated" {
        let base = octagon_fuchsian();
        let def = conjugate(&base, &default_conjugator());
        return Ok((base, def));
    }
    if let Some(rest) = label.strip_prefix("bent:") {
        let theta: f64 = rest
            .parse()
            .map_err(|e| GroupError::BadLabel(label.to_string(), format!("{e}")))?;
        let base = amalgam_fuchsian();
        let def = bend(&base, theta)?;
        return Ok((base, def));
    }
    Err(GroupError::UnknownLabel(label.to_string()))
}
