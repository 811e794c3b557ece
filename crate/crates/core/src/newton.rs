//! Taylor supports, Newton polygons, the Newton distance and the D-type height
//! bookkeeping. All arithmetic in this module is exact (integer lattice points,
//! rational distances); floats never enter.

use crate::normalform::Inv;
use crate::poly::{BivariatePoly, UniPoly, MAX_TOTAL_DEGREE};
use crate::rat::{rat_int, Rat};
use num::One;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NewtonError {
    #[error("phase has a nonzero constant or linear part (or is zero)")]
    InvalidPhase,
    #[error("Taylor support is empty")]
    EmptySupport,
    #[error("form is identically zero")]
    ZeroForm,
    #[error("form is not homogeneous of degree >= 2")]
    NotHomogeneous,
    #[error("total degree {0} exceeds the supported cap {MAX_TOTAL_DEGREE}")]
    DegreeTooLarge(u32),
}

/// A multi-index in the Taylor support; the origin is excluded (t1 + t2 >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LatticePoint {
    pub t1: u32,
    pub t2: u32,
}

impl LatticePoint {
    pub fn new(t1: u32, t2: u32) -> Self {
        Self { t1, t2 }
    }
}

/// Multi-indices of the nonzero Taylor coefficients, with the coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorSupport {
    coefficients: BTreeMap<LatticePoint, Rat>,
}

impl TaylorSupport {
    pub fn points(&self) -> impl Iterator<Item = &LatticePoint> {
        self.coefficients.keys()
    }

    pub fn coefficient(&self, p: &LatticePoint) -> Option<&Rat> {
        self.coefficients.get(p)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Builds a support directly from lattice points (unit coefficients); test helper
    /// and the entry point for hull idempotence checks.
    pub fn from_points<I: IntoIterator<Item = (u32, u32)>>(pts: I) -> Self {
        Self {
            coefficients: pts
                .into_iter()
                .map(|(a, b)| (LatticePoint::new(a, b), Rat::one()))
                .collect(),
        }
    }
}

/// Compact edge of the polygon with its supporting-line weights κ, normalized so
/// that κ1·t1 + κ2·t2 = 1 holds on the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: LatticePoint,
    pub to: LatticePoint,
    pub normal: (Rat, Rat),
}

/// Newton polygon: the convex hull of ∪ (α + ℝ²₊) over the Taylor support.
/// Vertices are ordered by strictly decreasing t2; edges join consecutive vertices.
/// The two unbounded boundary rays (above the first vertex, right of the last) are
/// implicit. The originating support is retained so faces can name their monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<LatticePoint>,
    pub edges: Vec<Edge>,
    support: TaylorSupport,
}

/// Face of minimal dimension containing the bisectrix intersection (d, d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrincipalFace {
    Vertex(LatticePoint),
    Edge(Edge),
    /// The vertical ray {t1 = const} above the top vertex.
    VerticalRay { t1: u32 },
    /// The horizontal ray {t2 = const} right of the bottom vertex.
    HorizontalRay { t2: u32 },
}

#[derive(Debug, Clone)]
pub struct NewtonDistanceResult {
    pub d: Rat,
    pub principal_face: PrincipalFace,
    pub principal_part: BivariatePoly,
}

/// Height data in the D-type normal form: h from the proposition, the paper's
/// linear-height formula, and the linear-adaptedness test 2m+1 >= n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightReport {
    pub d_given: Rat,
    pub h: Rat,
    pub h_lin_paper: Rat,
    pub adapted_linear: bool,
}

/// Extracts the Taylor support of a phase with a critical point at the origin.
pub fn taylor_support(poly: &BivariatePoly) -> Result<TaylorSupport, NewtonError> {
    if poly.is_zero() {
        return Err(NewtonError::InvalidPhase);
    }
    if poly.total_degree() > MAX_TOTAL_DEGREE {
        return Err(NewtonError::DegreeTooLarge(poly.total_degree()));
    }
    let mut coefficients = BTreeMap::new();
    for (&(i, j), c) in poly.terms() {
        if i + j < 2 {
            return Err(NewtonError::InvalidPhase);
        }
        coefficients.insert(LatticePoint::new(i, j), c.clone());
    }
    Ok(TaylorSupport { coefficients })
}

/// Lower-left staircase hull of ∪ (α + ℝ²₊).
pub fn newton_polygon(support: &TaylorSupport) -> Result<NewtonPolygon, NewtonError> {
    if support.is_empty() {
        return Err(NewtonError::EmptySupport);
    }
    // Keep only non-dominated points; among equal t1 the smallest t2 survives,
    // so the retained t1 values are distinct and t2 is strictly decreasing.
    let pts: Vec<LatticePoint> = support.points().copied().collect();
    let mut candidates: Vec<LatticePoint> = pts
        .iter()
        .filter(|p| {
            !pts.iter()
                .any(|q| *q != **p && q.t1 <= p.t1 && q.t2 <= p.t2)
        })
        .copied()
        .collect();
    candidates.sort_by_key(|p| p.t1);

    // Monotone chain; keep a vertex only while slopes strictly increase
    // (equivalently: edges strictly lose steepness left to right).
    let cross = |a: LatticePoint, b: LatticePoint, c: LatticePoint| -> i64 {
        let ab = (b.t1 as i64 - a.t1 as i64, b.t2 as i64 - a.t2 as i64);
        let bc = (c.t1 as i64 - b.t1 as i64, c.t2 as i64 - b.t2 as i64);
        ab.0 * bc.1 - ab.1 * bc.0
    };
    let mut hull: Vec<LatticePoint> = Vec::new();
    for p in candidates {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }

    let edges = hull
        .windows(2)
        .map(|w| edge_between(w[0], w[1]))
        .collect();
    Ok(NewtonPolygon {
        vertices: hull,
        edges,
        support: support.clone(),
    })
}

fn edge_between(a: LatticePoint, b: LatticePoint) -> Edge {
    let k1 = a.t2 as i64 - b.t2 as i64; // > 0
    let k2 = b.t1 as i64 - a.t1 as i64; // > 0
    let c = k1 * a.t1 as i64 + k2 * a.t2 as i64; // supporting line value, > 0
    Edge {
        from: a,
        to: b,
        normal: (
            Rat::new(k1.into(), c.into()),
            Rat::new(k2.into(), c.into()),
        ),
    }
}

impl NewtonPolygon {
    /// Exact membership test for the (unbounded) polygon.
    pub fn contains(&self, t1: &Rat, t2: &Rat) -> bool {
        let first = self.vertices.first().unwrap();
        let last = self.vertices.last().unwrap();
        if t1 < &rat_int(first.t1 as i64) || t2 < &rat_int(last.t2 as i64) {
            return false;
        }
        self.edges.iter().all(|e| {
            let v = &e.normal.0 * t1 + &e.normal.1 * t2;
            v >= Rat::one()
        })
    }

    pub fn support(&self) -> &TaylorSupport {
        &self.support
    }
}

/// Intersects the bisectrix t1 = t2 with the polygon boundary.
pub fn newton_distance(polygon: &NewtonPolygon) -> NewtonDistanceResult {
    // A vertex on the bisectrix wins (face of minimal dimension).
    for v in &polygon.vertices {
        if v.t1 == v.t2 {
            return NewtonDistanceResult {
                d: rat_int(v.t1 as i64),
                principal_face: PrincipalFace::Vertex(*v),
                principal_part: face_part(polygon, &PrincipalFace::Vertex(*v)),
            };
        }
    }
    for e in &polygon.edges {
        // d solves (κ1 + κ2)·d = 1; it lies on the open segment iff strictly
        // between the endpoint coordinates.
        let d = Rat::one() / (&e.normal.0 + &e.normal.1);
        let lo = rat_int(e.from.t1.max(e.to.t2) as i64);
        let hi = rat_int(e.to.t1.min(e.from.t2) as i64);
        if d > lo && d < hi {
            let face = PrincipalFace::Edge(e.clone());
            return NewtonDistanceResult {
                principal_part: face_part(polygon, &face),
                d,
                principal_face: face,
            };
        }
    }
    let top = polygon.vertices.first().unwrap();
    if top.t1 > top.t2 {
        let face = PrincipalFace::VerticalRay { t1: top.t1 };
        return NewtonDistanceResult {
            d: rat_int(top.t1 as i64),
            principal_part: face_part(polygon, &face),
            principal_face: face,
        };
    }
    let bottom = polygon.vertices.last().unwrap();
    debug_assert!(bottom.t2 > bottom.t1);
    let face = PrincipalFace::HorizontalRay { t2: bottom.t2 };
    NewtonDistanceResult {
        d: rat_int(bottom.t2 as i64),
        principal_part: face_part(polygon, &face),
        principal_face: face,
    }
}

fn face_part(polygon: &NewtonPolygon, face: &PrincipalFace) -> BivariatePoly {
    let support = &polygon.support;
    let on_face = |p: &LatticePoint| -> bool {
        match face {
            PrincipalFace::Vertex(v) => p == v,
            PrincipalFace::Edge(e) => {
                let v = &e.normal.0 * rat_int(p.t1 as i64) + &e.normal.1 * rat_int(p.t2 as i64);
                v == Rat::one()
            }
            PrincipalFace::VerticalRay { t1 } => p.t1 == *t1,
            PrincipalFace::HorizontalRay { t2 } => p.t2 == *t2,
        }
    };
    BivariatePoly::from_terms(
        support
            .coefficients
            .iter()
            .filter(|(p, _)| on_face(p))
            .map(|(p, c)| ((p.t1, p.t2), c.clone())),
    )
}

/// Maximal order of real roots of a homogeneous form on the unit circle;
/// 0 when the form has no real projective zero.
pub fn max_root_multiplicity(form: &BivariatePoly) -> Result<u32, NewtonError> {
    if form.is_zero() {
        return Err(NewtonError::ZeroForm);
    }
    let k = form.total_degree();
    if !form.is_homogeneous() || k < 2 {
        return Err(NewtonError::NotHomogeneous);
    }
    // Dehomogenize along x1 = 1: finite directions (1 : t); the direction (0 : 1)
    // carries the degree deficit as its multiplicity.
    let mut p = UniPoly::zero();
    for (&(i, j), c) in form.terms() {
        debug_assert_eq!(i + j, k);
        p.set_coeff(j as usize, c.clone());
    }
    let deg_p = p.degree().unwrap_or(0) as u32;
    let mut best = k - deg_p; // multiplicity of the root line {x1 = 0}, possibly 0
    for (factor, mult) in p.squarefree_decomposition() {
        if mult as u32 > best && factor.count_real_roots() > 0 {
            best = mult as u32;
        }
    }
    Ok(best)
}

/// Height arithmetic of the D-type normal form: h = 2n/(n+1) (finite n) or 2 (D_inf);
/// the coordinates are linearly adapted iff 2m+1 >= n; when they are not, the paper's
/// remark gives h_lin = (2m+1)/(2m), reported verbatim.
pub fn height_report(m: Inv, n: Inv, d_given: Rat) -> HeightReport {
    let h = match n {
        Inv::Finite(n) => {
            let n = n as i64;
            Rat::new((2 * n).into(), (n + 1).into())
        }
        Inv::Infinite => rat_int(2),
    };
    let adapted_linear = match (m, n) {
        (Inv::Infinite, _) => true,
        (Inv::Finite(_), Inv::Infinite) => false,
        (Inv::Finite(m), Inv::Finite(n)) => 2 * m + 1 >= n,
    };
    let h_lin_paper = if adapted_linear {
        h.clone()
    } else {
        match m {
            Inv::Finite(m) => {
                let m = m as i64;
                Rat::new((2 * m + 1).into(), (2 * m).into())
            }
            Inv::Infinite => h.clone(),
        }
    };
    HeightReport {
        d_given,
        h,
        h_lin_paper,
        adapted_linear,
    }
}
