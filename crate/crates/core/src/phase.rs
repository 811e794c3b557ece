//! Concrete phase families Φ(x,s), their exact derivative jets, critical-point
//! location by Newton iteration from a seed grid, and A₁/A₂/A₃ classification via the
//! Hessian determinant and the restricted cubic/quartic along the kernel direction.

use crate::normalform::Inv;
use crate::poly::BivariatePoly;
use crate::rat::rat_to_f64;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhaseError {
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),
    #[error("no A3 witness found in the search box for m = {m}")]
    WitnessNotFound { m: u32 },
    #[error("dilation scale must be positive")]
    InvalidScale,
    #[error("classification ambiguous: |{value:e}| within 10x of threshold {threshold:e} ({lower:?} vs {upper:?})")]
    AmbiguousClassification {
        value: f64,
        threshold: f64,
        lower: SingularityType,
        upper: SingularityType,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    pub fn factor(&self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }
}

impl fmt::Display for SignBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == SignBranch::Plus { "+" } else { "-" })
    }
}

// ---------------------------------------------------------------------------
// f64 polynomial jets
// ---------------------------------------------------------------------------

/// Sparse f64 polynomial in (x₁, x₂) with all partial derivatives precomputed
/// through total order four. Derivatives are exact coefficient operations; no
/// numerical differentiation anywhere.
#[derive(Debug, Clone)]
pub struct Jet2 {
    terms: Vec<(u32, u32, f64)>,
    derivs: Vec<Vec<(u32, u32, f64)>>, // index 5*i + j for ∂₁^i ∂₂^j, i+j ≤ 4
}

fn deriv_terms(terms: &[(u32, u32, f64)], i: u32, j: u32) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for &(a, b, c) in terms {
        if a < i || b < j {
            continue;
        }
        let mut k = c;
        for t in 0..i {
            k *= (a - t) as f64;
        }
        for t in 0..j {
            k *= (b - t) as f64;
        }
        out.push((a - i, b - j, k));
    }
    out
}

fn eval_terms(terms: &[(u32, u32, f64)], x: [f64; 2]) -> f64 {
    let mut acc = 0.0;
    for &(a, b, c) in terms {
        acc += c * x[0].powi(a as i32) * x[1].powi(b as i32);
    }
    acc
}

impl Jet2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        let mut derivs = vec![Vec::new(); 25];
        for i in 0..=4u32 {
            for j in 0..=(4 - i) {
                derivs[(5 * i + j) as usize] = deriv_terms(&terms, i, j);
            }
        }
        Self { terms, derivs }
    }

    pub fn from_exact(poly: &BivariatePoly) -> Self {
        Self::new(
            poly.terms()
                .map(|(&(i, j), c)| (i, j, rat_to_f64(c)))
                .collect(),
        )
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        eval_terms(&self.terms, x)
    }

    /// ∂₁^i ∂₂^j at x, for i + j ≤ 4.
    pub fn d(&self, i: u32, j: u32, x: [f64; 2]) -> f64 {
        eval_terms(&self.derivs[(5 * i + j) as usize], x)
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }
}

// ---------------------------------------------------------------------------
// Phase families
// ---------------------------------------------------------------------------

/// The D-type phase φ(x) in one of three concrete forms.
#[derive(Debug, Clone)]
pub enum DPhase {
    /// x₁x₂² ± x₁ⁿ (the x₁ⁿ term absent for n = ∞).
    Model { n: Inv, sign: SignBranch },
    /// b₁x₁w² + b₂w⁴ + βx₁ⁿ with w = x₂ − ωx₁^m (constant-coefficient split form).
    NormalForm {
        n: Inv,
        m: Inv,
        omega0: f64,
        beta0: f64,
        b1_0: f64,
        b2_0: f64,
    },
    /// Arbitrary polynomial phase (converted once from the exact representation).
    Polynomial(BivariatePoly),
}

impl DPhase {
    pub fn model(n: u32, sign: SignBranch) -> Self {
        DPhase::Model {
            n: Inv::Finite(n),
            sign,
        }
    }

    /// Expands the phase into monomials.
    pub fn to_terms(&self) -> Result<Vec<(u32, u32, f64)>, PhaseError> {
        match self {
            DPhase::Model { n, sign } => {
                let mut t = vec![(1, 2, 1.0)];
                if let Inv::Finite(n) = n {
                    if *n < 3 {
                        return Err(PhaseError::InvalidInvariants(format!("n = {n} < 3")));
                    }
                    t.push((*n, 0, sign.factor()));
                }
                Ok(t)
            }
            DPhase::NormalForm {
                n,
                m,
                omega0,
                beta0,
                b1_0,
                b2_0,
            } => {
                if *b1_0 == 0.0 {
                    return Err(PhaseError::InvalidInvariants("b1_0 must be nonzero".into()));
                }
                if let Inv::Finite(m) = m {
                    if *m < 2 {
                        return Err(PhaseError::InvalidInvariants(format!("m = {m} < 2")));
                    }
                }
                if let Inv::Finite(n) = n {
                    if *n < 3 {
                        return Err(PhaseError::InvalidInvariants(format!("n = {n} < 3")));
                    }
                }
                // w = x₂ − ω x₁^m; for m = ∞ (flat ψ) w = x₂.
                let (mw, om) = match m {
                    Inv::Finite(m) => (*m, *omega0),
                    Inv::Infinite => (0, 0.0),
                };
                let mut t: Vec<(u32, u32, f64)> = Vec::new();
                // b₁·x₁·w²
                for (p1, p2, c) in expand_w_pow(2, mw, om) {
                    t.push((1 + p1, p2, b1_0 * c));
                }
                if *b2_0 != 0.0 {
                    for (p1, p2, c) in expand_w_pow(4, mw, om) {
                        t.push((p1, p2, b2_0 * c));
                    }
                }
                if let Inv::Finite(n) = n {
                    t.push((*n, 0, *beta0));
                }
                Ok(merge_terms(t))
            }
            DPhase::Polynomial(p) => Ok(p
                .terms()
                .map(|(&(i, j), c)| (i, j, rat_to_f64(c)))
                .collect()),
        }
    }

    pub fn jet(&self) -> Result<Jet2, PhaseError> {
        Ok(Jet2::new(self.to_terms()?))
    }

    /// Canonical one-line description (stable across runs; used for hashing).
    pub fn describe(&self) -> String {
        match self {
            DPhase::Model { n, sign } => format!("model n={n} sign={sign}"),
            DPhase::NormalForm {
                n,
                m,
                omega0,
                beta0,
                b1_0,
                b2_0,
            } => format!(
                "normal_form n={n} m={m} omega0={omega0:.16e} beta0={beta0:.16e} b1_0={b1_0:.16e} b2_0={b2_0:.16e}"
            ),
            DPhase::Polynomial(p) => {
                let terms: Vec<String> = p
                    .terms()
                    .map(|(&(i, j), c)| format!("{i},{j},{}", crate::rat::rat_to_string(c)))
                    .collect();
                format!("polynomial {}", terms.join(";"))
            }
        }
    }
}

/// (x₂ − ω x₁^m)^p expanded to monomials; m = 0 means w = x₂ (flat ψ).
fn expand_w_pow(p: u32, m: u32, omega: f64) -> Vec<(u32, u32, f64)> {
    if m == 0 || omega == 0.0 {
        return vec![(0, p, 1.0)];
    }
    let mut out = Vec::new();
    let mut binom = 1.0f64;
    for k in 0..=p {
        if k > 0 {
            binom *= (p - k + 1) as f64 / k as f64;
        }
        out.push((m * k, p - k, binom * (-omega).powi(k as i32)));
    }
    out
}

fn merge_terms(terms: Vec<(u32, u32, f64)>) -> Vec<(u32, u32, f64)> {
    let mut map = std::collections::BTreeMap::new();
    for (i, j, c) in terms {
        *map.entry((i, j)).or_insert(0.0) += c;
    }
    map.into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((i, j), c)| (i, j, c))
        .collect()
}

/// A family Φ(x, s): either the linear perturbation φ(x) − s·x of a fixed D-phase, or
/// the exceptional-case example family whose s₂ also multiplies an x₁^m term.
#[derive(Debug, Clone)]
pub enum PhaseFamily {
    Linear(DPhase),
    /// Φ = x₁x₂² − x₁^{2m+1}/(4m(2m+1)) − s₁x₁ + s₂x₁^m/(m(m−1)) − s₂x₂, m ≥ 2.
    ExceptionalCurve { m: u32 },
}

impl PhaseFamily {
    pub fn at(&self, s: [f64; 2]) -> Result<PerturbedPhase, PhaseError> {
        let mut terms = match self {
            PhaseFamily::Linear(phase) => phase.to_terms()?,
            PhaseFamily::ExceptionalCurve { m } => {
                if *m < 2 {
                    return Err(PhaseError::InvalidInvariants(format!("m = {m} < 2")));
                }
                let m = *m;
                let mf = m as f64;
                vec![
                    (1, 2, 1.0),
                    (2 * m + 1, 0, -1.0 / (4.0 * mf * (2.0 * mf + 1.0))),
                    (m, 0, s[1] / (mf * (mf - 1.0))),
                ]
            }
        };
        terms.push((1, 0, -s[0]));
        terms.push((0, 1, -s[1]));
        Ok(PerturbedPhase {
            jet: Jet2::new(merge_terms(terms)),
            s,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            PhaseFamily::Linear(p) => p.describe(),
            PhaseFamily::ExceptionalCurve { m } => format!("exceptional_curve m={m}"),
        }
    }
}

/// Φ(x) = φ(x) − s·x at a fixed parameter s, with its full derivative jet.
#[derive(Debug, Clone)]
pub struct PerturbedPhase {
    jet: Jet2,
    pub s: [f64; 2],
}

impl PerturbedPhase {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.jet.eval(x)
    }

    pub fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        [self.jet.d(1, 0, x), self.jet.d(0, 1, x)]
    }

    pub fn hess(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let h11 = self.jet.d(2, 0, x);
        let h12 = self.jet.d(1, 1, x);
        let h22 = self.jet.d(0, 2, x);
        [[h11, h12], [h12, h22]]
    }

    pub fn d2_axis(&self, x: [f64; 2], axis: usize) -> f64 {
        if axis == 0 {
            self.jet.d(2, 0, x)
        } else {
            self.jet.d(0, 2, x)
        }
    }

    /// D³Φ(a,a,b) — third differential contracted with two copies of a and one of b.
    pub fn d3(&self, x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
        let f30 = self.jet.d(3, 0, x);
        let f21 = self.jet.d(2, 1, x);
        let f12 = self.jet.d(1, 2, x);
        let f03 = self.jet.d(0, 3, x);
        f30 * a[0] * a[0] * b[0]
            + f21 * (a[0] * a[0] * b[1] + 2.0 * a[0] * a[1] * b[0])
            + f12 * (2.0 * a[0] * a[1] * b[1] + a[1] * a[1] * b[0])
            + f03 * a[1] * a[1] * b[1]
    }

    /// D⁴Φ(v,v,v,v).
    pub fn d4(&self, x: [f64; 2], v: [f64; 2]) -> f64 {
        let f40 = self.jet.d(4, 0, x);
        let f31 = self.jet.d(3, 1, x);
        let f22 = self.jet.d(2, 2, x);
        let f13 = self.jet.d(1, 3, x);
        let f04 = self.jet.d(0, 4, x);
        f40 * v[0].powi(4)
            + 4.0 * f31 * v[0].powi(3) * v[1]
            + 6.0 * f22 * v[0].powi(2) * v[1].powi(2)
            + 4.0 * f13 * v[0] * v[1].powi(3)
            + f04 * v[1].powi(4)
    }

    pub fn jet(&self) -> &Jet2 {
        &self.jet
    }
}

// ---------------------------------------------------------------------------
// Critical points and classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SingularityType {
    A1,
    A2,
    A3,
    HigherOrOrigin,
}

/// Numerical thresholds for the classification tests. The Hessian threshold is
/// scale-aware (relative to the local Hessian norm); the rest are absolute.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyTols {
    pub tol_grad: f64,
    pub tol_deg: f64,
    pub tol_cubic: f64,
    pub tol_quartic: f64,
    pub tol_dedupe: f64,
}

impl Default for ClassifyTols {
    fn default() -> Self {
        Self {
            tol_grad: 1e-10,
            tol_deg: 1e-8,
            tol_cubic: 1e-8,
            tol_quartic: 1e-8,
            tol_dedupe: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub location: [f64; 2],
    pub gradient_norm: f64,
    pub hess_det: f64,
    pub kind: SingularityType,
    pub kernel_direction: Option<[f64; 2]>,
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Newton search over a uniform seed grid; converged points are deduplicated at
/// `tol_dedupe` and classified. Results are sorted by location, so the output is
/// deterministic regardless of evaluation order.
pub fn critical_points(
    pp: &PerturbedPhase,
    bounds: [[f64; 2]; 2],
    seeds_per_axis: usize,
    tols: &ClassifyTols,
) -> Vec<CriticalPoint> {
    let mut found: Vec<[f64; 2]> = Vec::new();
    let [bx, by] = bounds;
    let n = seeds_per_axis.max(2);
    for i in 0..n {
        for j in 0..n {
            let x0 = [
                bx[0] + (bx[1] - bx[0]) * i as f64 / (n - 1) as f64,
                by[0] + (by[1] - by[0]) * j as f64 / (n - 1) as f64,
            ];
            if let Some(x) = newton_2d(pp, x0, tols.tol_grad) {
                let margin = 1e-9 * (1.0 + (bx[1] - bx[0]).abs() + (by[1] - by[0]).abs());
                if x[0] >= bx[0] - margin
                    && x[0] <= bx[1] + margin
                    && x[1] >= by[0] - margin
                    && x[1] <= by[1] + margin
                {
                    found.push(x);
                }
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut unique: Vec<[f64; 2]> = Vec::new();
    for x in found {
        if !unique
            .iter()
            .any(|u| norm2([x[0] - u[0], x[1] - u[1]]) <= tols.tol_dedupe)
        {
            unique.push(x);
        }
    }
    unique
        .into_iter()
        .map(|x| describe_critical_point(pp, x, tols))
        .collect()
}

fn newton_2d(pp: &PerturbedPhase, mut x: [f64; 2], tol_grad: f64) -> Option<[f64; 2]> {
    // Iterate to stall, not merely to tol_grad: near a degenerate critical point the
    // gradient tolerance is met on a whole fuzzy ball, and polishing to machine
    // scale is what lets dedupe collapse that ball to one point.
    let mut best = x;
    let mut best_g = norm2(pp.grad(x));
    for _ in 0..90 {
        let g = pp.grad(x);
        let gn = norm2(g);
        if gn < best_g {
            best = x;
            best_g = gn;
        }
        if gn == 0.0 {
            break;
        }
        let h = pp.hess(x);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            break;
        }
        let dx = [
            (h[1][1] * g[0] - h[0][1] * g[1]) / det,
            (h[0][0] * g[1] - h[1][0] * g[0]) / det,
        ];
        // Damp when the full step fails to reduce the residual.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = [x[0] - step * dx[0], x[1] - step * dx[1]];
            if cand[0].is_finite() && cand[1].is_finite() && norm2(pp.grad(cand)) < gn {
                x = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        if step * norm2(dx) <= 1e-17 * (1.0 + norm2(x)) {
            break;
        }
    }
    (best_g <= tol_grad).then_some(best)
}

/// Kernel (small-|eigenvalue|) and transverse unit eigenvectors of a symmetric 2×2,
/// plus the transverse eigenvalue.
fn eigen_split(h: [[f64; 2]; 2]) -> ([f64; 2], [f64; 2], f64) {
    let (a, b, c) = (h[0][0], h[0][1], h[1][1]);
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    let (lk, lt) = if l1.abs() <= l2.abs() { (l1, l2) } else { (l2, l1) };
    // Eigenvector for lk: rows of (H − lk·I) are orthogonal to it.
    let r1 = [a - lk, b];
    let r2 = [b, c - lk];
    let row = if norm2(r1) >= norm2(r2) { r1 } else { r2 };
    let mut v = [-row[1], row[0]];
    let nv = norm2(v);
    if nv == 0.0 {
        v = [1.0, 0.0];
    } else {
        v = [v[0] / nv, v[1] / nv];
    }
    // Deterministic sign: largest-magnitude component positive, so quantities odd
    // in v (the restricted cubic) vary continuously between nearby evaluations.
    let lead = if v[0].abs() >= v[1].abs() { v[0] } else { v[1] };
    if lead < 0.0 {
        v = [-v[0], -v[1]];
    }
    let u = [-v[1], v[0]];
    (v, u, lt)
}

fn hess_frobenius(h: [[f64; 2]; 2]) -> f64 {
    (h[0][0] * h[0][0] + 2.0 * h[0][1] * h[0][1] + h[1][1] * h[1][1]).sqrt()
}

/// Classification that never fails: ambiguous cases resolve to the deeper candidate.
pub fn describe_critical_point(
    pp: &PerturbedPhase,
    x: [f64; 2],
    tols: &ClassifyTols,
) -> CriticalPoint {
    let g = pp.grad(x);
    let h = pp.hess(x);
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let (kind, kernel) = match classify_at(pp, x, tols) {
        Ok(pair) => pair,
        Err(PhaseError::AmbiguousClassification { upper, .. }) => {
            (upper, Some(eigen_split(h).0))
        }
        Err(_) => (SingularityType::HigherOrOrigin, None),
    };
    CriticalPoint {
        location: x,
        gradient_norm: norm2(g),
        hess_det: det,
        kind,
        kernel_direction: kernel,
    }
}

/// A1 / A2 / A3 / higher, with an explicit error when a test value falls within a
/// factor of ten of its threshold.
pub fn classify_critical_point(
    pp: &PerturbedPhase,
    x: [f64; 2],
    tols: &ClassifyTols,
) -> Result<SingularityType, PhaseError> {
    classify_at(pp, x, tols).map(|(k, _)| k)
}

fn classify_at(
    pp: &PerturbedPhase,
    x: [f64; 2],
    tols: &ClassifyTols,
) -> Result<(SingularityType, Option<[f64; 2]>), PhaseError> {
    let h = pp.hess(x);
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let hnorm = hess_frobenius(h);
    if hnorm < 1e-14 {
        // Fully degenerate Hessian: the D-point itself (or worse).
        return Ok((SingularityType::HigherOrOrigin, None));
    }
    let t_deg = tols.tol_deg * hnorm;
    let (v, u, lt) = eigen_split(h);
    if det.abs() > 10.0 * t_deg {
        return Ok((SingularityType::A1, None));
    }
    if det.abs() > t_deg {
        // Within the ambiguity window above the threshold.
        let (upper, _) = deeper_than_a1(pp, x, v, u, lt, tols)
            .unwrap_or((SingularityType::HigherOrOrigin, None));
        return Err(PhaseError::AmbiguousClassification {
            value: det,
            threshold: t_deg,
            lower: SingularityType::A1,
            upper,
        });
    }
    let (kind, kernel) = deeper_than_a1(pp, x, v, u, lt, tols)?;
    if det.abs() > t_deg / 10.0 {
        return Err(PhaseError::AmbiguousClassification {
            value: det,
            threshold: t_deg,
            lower: SingularityType::A1,
            upper: kind,
        });
    }
    Ok((kind, kernel))
}

fn deeper_than_a1(
    pp: &PerturbedPhase,
    x: [f64; 2],
    v: [f64; 2],
    u: [f64; 2],
    lt: f64,
    tols: &ClassifyTols,
) -> Result<(SingularityType, Option<[f64; 2]>), PhaseError> {
    let c3 = pp.d3(x, v, v) / 6.0;
    if c3.abs() > tols.tol_cubic {
        if c3.abs() <= 10.0 * tols.tol_cubic {
            return Err(PhaseError::AmbiguousClassification {
                value: c3,
                threshold: tols.tol_cubic,
                lower: SingularityType::A2,
                upper: SingularityType::A3,
            });
        }
        return Ok((SingularityType::A2, Some(v)));
    }
    if lt.abs() < 1e-12 {
        return Ok((SingularityType::HigherOrOrigin, Some(v)));
    }
    // Quartic along the kernel, corrected by eliminating the transverse direction.
    let d3vvu = pp.d3(x, v, u);
    let c4 = pp.d4(x, v) / 24.0 - d3vvu * d3vvu / (8.0 * lt);
    if c4.abs() > tols.tol_quartic {
        return Ok((SingularityType::A3, Some(v)));
    }
    Ok((SingularityType::HigherOrOrigin, Some(v)))
}

// ---------------------------------------------------------------------------
// Exceptional-case A3 membership and witness
// ---------------------------------------------------------------------------

/// Membership in the A₃ parameter set: true iff some t ≠ 0 satisfies
/// β(0) = −t²/(4m(2m+1)b₁) and ω(0) = −t/(m(m−1)b₁). t is eliminated through the
/// second relation and the first is checked to relative tolerance 1e−12.
pub fn a3_membership(beta0: f64, omega0: f64, b1_0: f64, m: u32) -> Result<bool, PhaseError> {
    if b1_0 == 0.0 {
        return Err(PhaseError::InvalidInvariants("b1_0 must be nonzero".into()));
    }
    if m < 2 {
        return Err(PhaseError::InvalidInvariants(format!("m = {m} < 2")));
    }
    let mf = m as f64;
    let t = -mf * (mf - 1.0) * b1_0 * omega0;
    if t == 0.0 {
        return Ok(false);
    }
    let expected_beta = -t * t / (4.0 * mf * (2.0 * mf + 1.0) * b1_0);
    let scale = expected_beta.abs().max(beta0.abs()).max(f64::MIN_POSITIVE);
    Ok((beta0 - expected_beta).abs() <= 1e-12 * scale)
}

/// A degenerate point of the exceptional example family together with the parameter
/// values that produce it.
#[derive(Debug, Clone)]
pub struct A3Witness {
    pub t: f64,
    pub sigma0: [f64; 2],
    pub point: [f64; 2],
    /// Validation diagnostics at the witness: (‖∇Φ‖, |det Hess|, |cubic|, |quartic|).
    pub residuals: [f64; 4],
}

/// Seed box for the witness search.
pub const A3_SEARCH_BOX: [[f64; 2]; 2] = [[0.25, 4.0], [0.125, 4.0]];

/// Solves ∇Φ₁ = 0, det Hess Φ₁ = 0 on the rescaled exceptional family
/// Φ₁(y, σ₁) = y₁y₂² − y₁^{2m+1}/(4m(2m+1)) − σ₁y₁ + y₁^m/(m(m−1)) − y₂
/// for (y⁰, σ₁⁰) by Newton iteration from a seed grid, then verifies third-order
/// degeneracy and fourth-order nondegeneracy along the kernel. σ₁ enters the
/// gradient linearly, so the system reduces to two equations in y.
pub fn find_a3_witness(m: u32) -> Result<A3Witness, PhaseError> {
    if m < 2 {
        return Err(PhaseError::InvalidInvariants(format!("m = {m} < 2")));
    }
    let mf = m as f64;
    // Family with the σ₁ term omitted (it enters neither ∂₂ nor the Hessian).
    let base = PerturbedPhase {
        jet: Jet2::new(merge_terms(vec![
            (1, 2, 1.0),
            (2 * m + 1, 0, -1.0 / (4.0 * mf * (2.0 * mf + 1.0))),
            (m, 0, 1.0 / (mf * (mf - 1.0))),
            (0, 1, -1.0),
        ])),
        s: [0.0, 1.0],
    };
    let g = |y: [f64; 2]| -> [f64; 2] {
        let h = base.hess(y);
        [base.grad(y)[1], h[0][0] * h[1][1] - h[0][1] * h[1][0]]
    };
    let jac = |y: [f64; 2]| -> [[f64; 2]; 2] {
        let j = base.jet();
        let (f20, f11, f02) = (j.d(2, 0, y), j.d(1, 1, y), j.d(0, 2, y));
        let (f30, f21, f12, f03) = (j.d(3, 0, y), j.d(2, 1, y), j.d(1, 2, y), j.d(0, 3, y));
        [
            [f11, f02],
            [
                f30 * f02 + f20 * f12 - 2.0 * f11 * f21,
                f21 * f02 + f20 * f03 - 2.0 * f11 * f12,
            ],
        ]
    };

    let [bx, by] = A3_SEARCH_BOX;
    let mut solutions: Vec<[f64; 2]> = Vec::new();
    let grid = 13;
    for i in 0..grid {
        for jj in 0..grid {
            let mut y = [
                bx[0] + (bx[1] - bx[0]) * i as f64 / (grid - 1) as f64,
                by[0] + (by[1] - by[0]) * jj as f64 / (grid - 1) as f64,
            ];
            let mut ok = false;
            for _ in 0..120 {
                let gv = g(y);
                let r = gv[0].abs() + gv[1].abs();
                if r < 1e-13 {
                    ok = true;
                    break;
                }
                let jm = jac(y);
                let det = jm[0][0] * jm[1][1] - jm[0][1] * jm[1][0];
                if det.abs() < 1e-300 || !det.is_finite() {
                    break;
                }
                let dy = [
                    (jm[1][1] * gv[0] - jm[0][1] * gv[1]) / det,
                    (jm[0][0] * gv[1] - jm[1][0] * gv[0]) / det,
                ];
                y = [y[0] - dy[0], y[1] - dy[1]];
                if !y[0].is_finite() || !y[1].is_finite() {
                    break;
                }
            }
            if ok
                && y[0] >= bx[0] - 1e-9
                && y[0] <= bx[1] + 1e-9
                && y[1] >= by[0] - 1e-9
                && y[1] <= by[1] + 1e-9
            {
                solutions.push(y);
            }
        }
    }
    solutions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    solutions.dedup_by(|a, b| norm2([a[0] - b[0], a[1] - b[1]]) < 1e-6);

    for y0 in solutions {
        // The two located curves (critical set and degeneracy locus) are tangent at
        // an A₃ point, so the 2D Newton above converges only linearly. Polish: solve
        // ∂₂Φ = 0 in y₂ (nondegenerate), then drive the kernel cubic to zero along
        // that curve by a secant iteration (it has a simple zero there).
        let y = polish_a3(&base, y0);
        // σ₁ makes ∂₁Φ₁ vanish: with the σ₁ term omitted, σ₁⁰ = ∂₁Φ₁|no-σ at y.
        let sigma1 = base.grad(y)[0];
        let full = PerturbedPhase {
            jet: Jet2::new(merge_terms(
                base.jet
                    .terms()
                    .iter()
                    .copied()
                    .chain([(1u32, 0u32, -sigma1)])
                    .collect(),
            )),
            s: [sigma1, 1.0],
        };
        let grad_norm = norm2(full.grad(y));
        let h = full.hess(y);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let (v, u, lt) = eigen_split(h);
        let cubic = full.d3(y, v, v) / 6.0;
        let d3vvu = full.d3(y, v, u);
        let quartic = full.d4(y, v) / 24.0 - d3vvu * d3vvu / (8.0 * lt);
        if grad_norm < 1e-10 && det.abs() < 1e-9 && cubic.abs() < 1e-8 && quartic.abs() > 1e-4 {
            return Ok(A3Witness {
                t: 1.0 / y[0].powi(m as i32 + 1),
                sigma0: [sigma1, 1.0],
                point: y,
                residuals: [grad_norm, det.abs(), cubic.abs(), quartic.abs()],
            });
        }
    }
    Err(PhaseError::WitnessNotFound { m })
}

fn polish_a3(base: &PerturbedPhase, y0: [f64; 2]) -> [f64; 2] {
    let solve_y2 = |y1: f64, init: f64| -> f64 {
        let mut y2 = init;
        for _ in 0..60 {
            let f = base.jet().d(0, 1, [y1, y2]);
            let df = base.jet().d(0, 2, [y1, y2]);
            if df == 0.0 || !df.is_finite() {
                break;
            }
            let step = f / df;
            y2 -= step;
            if step.abs() <= 1e-17 * (1.0 + y2.abs()) {
                break;
            }
        }
        y2
    };
    let kernel_cubic = |y1: f64, y2: f64| -> f64 {
        let (v, _, _) = eigen_split(base.hess([y1, y2]));
        base.d3([y1, y2], v, v) / 6.0
    };
    let mut a = y0[0];
    let mut ya = solve_y2(a, y0[1]);
    let mut fa = kernel_cubic(a, ya);
    let mut b = a + 1e-6 * (1.0 + a.abs());
    for _ in 0..60 {
        let yb = solve_y2(b, ya);
        let fb = kernel_cubic(b, yb);
        if fb == fa {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        a = b;
        ya = yb;
        fa = fb;
        b = c;
        if (b - a).abs() <= 1e-16 * (1.0 + b.abs()) || !b.is_finite() {
            break;
        }
    }
    if !b.is_finite() {
        return y0;
    }
    [b, solve_y2(b, ya)]
}

/// The paper's stated constant for σ₁⁰; kept as a claim to compare against, not an oracle.
pub fn a3_sigma1_paper_claim(m: u32) -> f64 {
    let m = m as f64;
    (m + 1.0) * (m + 1.0) * (2.0 * m - 5.0) / (4.0 * m * (m - 1.0) * (2.0 * m + 1.0))
}

// ---------------------------------------------------------------------------
// Anisotropic dilations
// ---------------------------------------------------------------------------

/// δ_r(x) = (r^{κ₁}x₁, r^{κ₂}x₂).
pub fn dilate(x: [f64; 2], r: f64, kappa: [f64; 2]) -> Result<[f64; 2], PhaseError> {
    if !(r > 0.0) {
        return Err(PhaseError::InvalidScale);
    }
    Ok([x[0] * r.powf(kappa[0]), x[1] * r.powf(kappa[1])])
}

/// Weights (1/n, (n−1)/(2n)) of the model-phase scaling x = δ_{1/λ}(y).
pub fn model_weights(n: u32) -> [f64; 2] {
    let nf = n as f64;
    [1.0 / nf, (nf - 1.0) / (2.0 * nf)]
}

/// det Hess(x₁x₂² ± x₁ⁿ − s·x) = −4x₂² ± 2n(n−1)x₁^{n−1} in closed form
/// (test oracle for the model phase).
pub fn model_hess_det(n: u32, sign: SignBranch, x: [f64; 2]) -> f64 {
    let nf = n as f64;
    -4.0 * x[1] * x[1] + sign.factor() * 2.0 * nf * (nf - 1.0) * x[0].powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: u32, sign: SignBranch) -> PhaseFamily {
        PhaseFamily::Linear(DPhase::model(n, sign))
    }

    #[test]
    fn gradient_at_origin_vanishes() {
        let pp = model(3, SignBranch::Plus).at([0.0, 0.0]).unwrap();
        assert_eq!(pp.grad([0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn model_hessian_matches_closed_form() {
        for (n, sign) in [
            (3, SignBranch::Plus),
            (4, SignBranch::Plus),
            (5, SignBranch::Minus),
        ] {
            let pp = model(n, sign).at([0.3, -0.2]).unwrap();
            for &x in &[[0.7, -0.4], [1.1, 0.9], [-0.6, 0.25]] {
                let h = pp.hess(x);
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                let expect = model_hess_det(n, sign, x);
                assert!(
                    (det - expect).abs() <= 1e-9 * expect.abs().max(1.0),
                    "n={n} x={x:?}: {det} vs {expect}"
                );
                assert_eq!(h[0][1], h[1][0]);
            }
        }
    }

    #[test]
    fn model_n3_minus_origin_only() {
        // ∇Φ = (x₂²−3x₁², 2x₁x₂) vanishes only at the origin.
        let pp = model(3, SignBranch::Minus).at([0.0, 0.0]).unwrap();
        let pts = critical_points(&pp, [[-1.0, 1.0], [-1.0, 1.0]], 21, &ClassifyTols::default());
        assert_eq!(pts.len(), 1);
        assert!(norm2(pts[0].location) < 1e-8);
        assert_eq!(pts[0].kind, SingularityType::HigherOrOrigin);
    }

    #[test]
    fn model_odd_minus_perturbed_points_are_saddles() {
        // Lemma case: n odd, minus branch, s ≠ 0 ⟹ det Hess < 0 on the critical set.
        let fam = model(5, SignBranch::Minus);
        for s in [[0.1, 0.2], [-0.3, 0.05], [0.02, -0.4]] {
            let pp = fam.at(s).unwrap();
            let pts =
                critical_points(&pp, [[-1.5, 1.5], [-1.5, 1.5]], 25, &ClassifyTols::default());
            assert!(!pts.is_empty(), "s={s:?}");
            for p in pts {
                assert!(p.hess_det < 0.0);
                assert_eq!(p.kind, SingularityType::A1);
            }
        }
    }

    #[test]
    fn degenerate_point_on_model_n4_is_a2() {
        // Choose the critical point first: a = (a₁, sqrt(6a₁³)) lies on the
        // degeneracy locus of x₁x₂² + x₁⁴; s := ∇φ(a) makes it critical exactly.
        let a1 = 0.5f64;
        let a2 = (6.0 * a1.powi(3)).sqrt();
        let fam = model(4, SignBranch::Plus);
        let s = fam.at([0.0, 0.0]).unwrap().grad([a1, a2]);
        let pp = fam.at(s).unwrap();
        assert!(norm2(pp.grad([a1, a2])) < 1e-12);
        let kind = classify_critical_point(&pp, [a1, a2], &ClassifyTols::default()).unwrap();
        assert_eq!(kind, SingularityType::A2);
        // The kernel is ∝ (a₁, −a₂).
        let (v, _, _) = eigen_split(pp.hess([a1, a2]));
        assert!((v[0] * a2 + v[1] * a1).abs() < 1e-9 * norm2([a1, a2]));
    }

    #[test]
    fn a3_membership_examples() {
        assert!(a3_membership(-1.0 / 40.0, -0.5, 1.0, 2).unwrap());
        assert!(!a3_membership(0.3, 0.0, 1.0, 2).unwrap());
        assert!(!a3_membership(1.0, -0.5, 1.0, 2).unwrap());
        // Flipping the sign of b₁ flips the sign β must take.
        assert!(a3_membership(1.0 / 40.0, 0.5, -1.0, 2).unwrap());
        assert!(a3_membership(-1.0 / 84.0, -1.0 / 6.0, 1.0, 3).unwrap());
        assert!(matches!(
            a3_membership(1.0, 1.0, 0.0, 2),
            Err(PhaseError::InvalidInvariants(_))
        ));
    }

    #[test]
    fn a3_membership_sign_symmetry() {
        // t → −t is realized as ω → −ω with β fixed.
        for (beta, omega) in [(-1.0 / 40.0, -0.5), (-0.05, 0.3)] {
            let a = a3_membership(beta, omega, 1.0, 2).unwrap();
            let b = a3_membership(beta, -omega, 1.0, 2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn witness_m2_matches_reduced_equations() {
        let w = find_a3_witness(2).unwrap();
        // ∂₂Φ₁ = 2y₁y₂ − 1 = 0 forces y₂ = 1/(2y₁).
        assert!((w.point[1] - 1.0 / (2.0 * w.point[0])).abs() < 1e-10);
        assert!(w.residuals[0] < 1e-10);
        assert!(w.residuals[1] < 1e-9);
        assert!(w.residuals[2] < 1e-8);
        assert!(w.residuals[3] > 1e-4);
        assert!(w.t != 0.0);
        // Exact solution of the reduced system at m = 2: y⁰ = (1, 1/2), σ₁⁰ = 9/8.
        assert!((w.point[0] - 1.0).abs() < 1e-10);
        assert!((w.point[1] - 0.5).abs() < 1e-10);
        assert!((w.sigma0[0] - 1.125).abs() < 1e-10);
        // The paper's printed constant differs; record the disagreement.
        assert!((w.sigma0[0] - a3_sigma1_paper_claim(2)).abs() > 0.1);
    }

    #[test]
    fn witness_exists_for_higher_m() {
        for m in [3, 4, 5] {
            let w = find_a3_witness(m).unwrap();
            assert!(w.residuals[3] > 1e-4, "m={m}: quartic degenerate");
            let mf = m as f64;
            let expect = (mf + 1.0) * (mf + 1.0) / (4.0 * mf * (mf - 1.0));
            assert!((w.sigma0[0] - expect).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn dilation_laws() {
        let x = [0.7, -1.3];
        assert_eq!(dilate(x, 1.0, [0.25, 0.5]).unwrap(), x);
        let k = [1.0 / 3.0, 1.0 / 3.0];
        let a = dilate(dilate(x, 2.0, k).unwrap(), 3.0, k).unwrap();
        let b = dilate(x, 6.0, k).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        assert!(matches!(dilate(x, 0.0, k), Err(PhaseError::InvalidScale)));
        assert!(matches!(dilate(x, -1.0, k), Err(PhaseError::InvalidScale)));
    }

    #[test]
    fn normal_form_phase_expands_like_polynomial() {
        // b₁x₁(x₂−x₁²)² + βx₁⁷ with b₁=1, ω=1, β=1 equals the hand expansion.
        let phase = DPhase::NormalForm {
            n: Inv::Finite(7),
            m: Inv::Finite(2),
            omega0: 1.0,
            beta0: 1.0,
            b1_0: 1.0,
            b2_0: 0.0,
        };
        let jet = phase.jet().unwrap();
        for &x in &[[0.4f64, 0.3], [-0.7, 0.2], [0.1, -0.9]] {
            let w = x[1] - x[0] * x[0];
            let expect = x[0] * w * w + x[0].powi(7);
            assert!((jet.eval(x) - expect).abs() < 1e-14);
        }
    }
}
