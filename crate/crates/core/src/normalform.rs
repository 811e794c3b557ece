//! Reduction of a corank-2 polynomial phase to the split form
//! `φ = b(x)·(x₂ − ψ(x₁))² + b₀(x₁)` by a rational linear change of variables plus
//! order-by-order undetermined coefficients, and extraction of the discrete
//! invariants m (order of ψ) and n (order of b₀). Exact rational arithmetic only.

use crate::newton::{self, max_root_multiplicity, HeightReport};
use crate::poly::{BivariatePoly, Mat2, UniPoly};
use crate::rat::{rat_int, Rat};
use num::{BigInt, One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("phase has a nonzero constant or linear part")]
    InvalidPhase,
    #[error("phase is not of D type: {0}")]
    NotDType(String),
    #[error("normal-form reduction failed: {0}")]
    ReductionFailed(String),
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),
}

/// A discrete invariant that may be infinite (detected only up to the truncation order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inv {
    Finite(u32),
    Infinite,
}

impl Inv {
    pub fn finite(&self) -> Option<u32> {
        match self {
            Inv::Finite(v) => Some(*v),
            Inv::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Inv::Infinite)
    }
}

impl fmt::Display for Inv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inv::Finite(v) => write!(f, "{v}"),
            Inv::Infinite => write!(f, "inf"),
        }
    }
}

/// Decay/summability regime determined by the sign of 2m+1−n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// 2m+1 > n: the given coordinates are linearly adapted.
    La,
    /// n = 2m+1.
    Exceptional,
    /// 2m+1 < n < ∞: no linearly adapted coordinates.
    Nla,
    /// n = ∞ with b₀ ≡ 0 (R-condition).
    DInf,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::La => "LA",
            Regime::Exceptional => "EXCEPTIONAL",
            Regime::Nla => "NLA",
            Regime::DInf => "D_INF",
        };
        write!(f, "{s}")
    }
}

/// Truncated exact power series in x₁ (coeffs[k] multiplies x₁^k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCurve {
    pub coeffs: Vec<Rat>,
    pub truncation: u32,
}

impl SeriesCurve {
    pub fn zero(truncation: u32) -> Self {
        Self {
            coeffs: Vec::new(),
            truncation,
        }
    }

    pub fn from_unipoly(p: &UniPoly, truncation: u32) -> Self {
        Self {
            coeffs: p.coeffs().to_vec(),
            truncation,
        }
    }

    pub fn as_unipoly(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.clone())
    }

    /// Index of the first nonzero coefficient, or None when the series vanishes
    /// to the truncation order.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|k| k as u32)
    }

    pub fn coeff(&self, k: u32) -> Rat {
        self.coeffs
            .get(k as usize)
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }
}

/// Everything the split form carries: ψ and b₀ as truncated series, the factor b as a
/// (x₁-truncated) polynomial, the leading data ω(0), β(0), b₁(0,0), the b₂ series, and
/// the linear change that brought the phase into position.
#[derive(Debug, Clone)]
pub struct NormalFormData {
    pub m: Inv,
    pub n: Inv,
    pub psi: SeriesCurve,
    pub b0: SeriesCurve,
    pub omega0: Rat,
    pub beta0: Rat,
    pub b1_0: Rat,
    pub b2_series: SeriesCurve,
    pub b: BivariatePoly,
    pub linear_change: Mat2,
    pub truncation: u32,
}

impl NormalFormData {
    /// Re-expands b·(x₂−ψ)² + b₀ modulo x₁^{truncation+1}; equals the positioned
    /// phase exactly in that quotient ring.
    pub fn reconstruct(&self) -> BivariatePoly {
        let n1 = self.truncation;
        let psi = self.psi.as_unipoly();
        // (x₂ − ψ)² = x₂² − 2ψ·x₂ + ψ²
        let mut sq = BivariatePoly::monomial(0, 2, Rat::one());
        for (k, c) in psi.coeffs().iter().enumerate() {
            sq.add_term(k as u32, 1, c * rat_int(-2));
        }
        let psi2 = psi.mul_trunc(&psi, n1);
        for (k, c) in psi2.coeffs().iter().enumerate() {
            sq.add_term(k as u32, 0, c.clone());
        }
        let mut out = self.b.mul(&sq).truncate_x1(n1);
        for (k, c) in self.b0.coeffs.iter().enumerate() {
            out.add_term(k as u32, 0, c.clone());
        }
        out
    }

    /// Height report for this normal form; the distance is computed from the
    /// re-expanded phase in the normal-form coordinates.
    pub fn height_report(&self) -> HeightReport {
        let poly = self.reconstruct();
        let support = newton::taylor_support(&poly).expect("normal form has a valid support");
        let polygon = newton::newton_polygon(&support).expect("nonempty support");
        let d_given = newton::newton_distance(&polygon).d;
        newton::height_report(self.m, self.n, d_given)
    }
}

/// Corank of the singularity: 2 − rank of the quadratic part.
pub fn corank(poly: &BivariatePoly) -> Result<u32, ReduceError> {
    validate_phase(poly)?;
    let h = poly.quadratic_hessian();
    let det = &h[0][0] * &h[1][1] - &h[0][1] * &h[0][1];
    let rank = if !det.is_zero() {
        2
    } else if h.iter().flatten().any(|c| !c.is_zero()) {
        1
    } else {
        0
    };
    Ok(2 - rank)
}

fn validate_phase(poly: &BivariatePoly) -> Result<(), ReduceError> {
    if poly.is_zero() {
        return Err(ReduceError::InvalidPhase);
    }
    for (&(i, j), _) in poly.terms() {
        if i + j < 2 {
            return Err(ReduceError::InvalidPhase);
        }
    }
    Ok(())
}

/// Rational roots of a univariate rational polynomial, exact, with multiplicities ≥ 1
/// collapsed (each root listed once). Coefficients must fit in i128 after clearing
/// denominators; the cubic parts this is called on are user-scale.
fn rational_roots(p: &UniPoly) -> Result<Vec<Rat>, ReduceError> {
    let mut roots = Vec::new();
    if p.is_zero() {
        return Ok(roots);
    }
    // Multiple roots come out of the square-free decomposition as low-degree factors.
    let mut pending: Vec<UniPoly> = vec![p.clone()];
    let mut simple: Vec<UniPoly> = Vec::new();
    while let Some(q) = pending.pop() {
        let dec = q.squarefree_decomposition();
        if dec.len() == 1 && dec[0].1 == 1 {
            simple.push(dec[0].0.clone());
        } else {
            for (f, _) in dec {
                pending.push(f);
            }
        }
    }
    for q in simple {
        let Some(deg) = q.degree() else { continue };
        if let Some(ord) = q.order() {
            if ord > 0 {
                roots.push(Rat::zero());
            }
        }
        if deg == 0 {
            continue;
        }
        if let Some(1) = q.degree() {
            roots.push(-q.coeff(0) / q.coeff(1));
            continue;
        }
        // Clear denominators and strip the power of x.
        let ord = q.order().unwrap_or(0);
        let mut den_lcm = BigInt::one();
        for c in q.coeffs().iter().skip(ord) {
            let d = c.denom();
            den_lcm = num::integer::lcm(den_lcm.clone(), d.clone());
        }
        let ints: Vec<BigInt> = q
            .coeffs()
            .iter()
            .skip(ord)
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let a0: i128 = int_to_i128(&ints[0])?;
        let alead: i128 = int_to_i128(ints.last().unwrap())?;
        for pn in divisors(a0.unsigned_abs()) {
            for qn in divisors(alead.unsigned_abs()) {
                for sign in [1i128, -1] {
                    let cand = Rat::new(BigInt::from(sign * pn as i128), BigInt::from(qn as i128));
                    if q.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn int_to_i128(v: &BigInt) -> Result<i128, ReduceError> {
    use num::ToPrimitive;
    v.to_i128().ok_or_else(|| {
        ReduceError::ReductionFailed("cubic coefficients too large for root search".into())
    })
}

fn divisors(n: u128) -> Vec<u128> {
    if n == 0 {
        return vec![1];
    }
    let mut out = Vec::new();
    let mut d = 1u128;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
        if d > 3_000_000 {
            // Desk-scale guard; coefficients beyond this are not supported.
            break;
        }
    }
    out
}

/// Primitive integer direction for a rational slope t (direction (1 : t)).
fn primitive_direction(t: &Rat) -> (BigInt, BigInt) {
    let num = t.numer().clone();
    let den = t.denom().clone();
    normalize_direction(den, num)
}

fn normalize_direction(v1: BigInt, v2: BigInt) -> (BigInt, BigInt) {
    let g = num::integer::gcd(v1.clone().abs(), v2.clone().abs());
    let (mut a, mut b) = (v1 / &g, v2 / &g);
    if a.is_negative() || (a.is_zero() && b.is_negative()) {
        a = -a;
        b = -b;
    }
    (a, b)
}

/// Completes a primitive direction v (as second column) to a determinant-one matrix,
/// choosing the canonical smallest completing column.
fn complete_to_unimodular(v: &(BigInt, BigInt)) -> Mat2 {
    // Solve w1·v2 − w2·v1 = 1 by the extended Euclid relation, then reduce w modulo v
    // to the representative with the smallest norm (ties: smaller shift).
    let (g, x, y) = ext_gcd(v.1.clone(), v.0.clone());
    debug_assert!(g.is_one(), "direction must be primitive");
    let w1 = x;
    let w2 = -y;
    let norm = |a: &BigInt, b: &BigInt| a * a + b * b;
    let mut best = (w1.clone(), w2.clone());
    let mut best_norm = norm(&w1, &w2);
    for k in -2i64..=2 {
        let c1 = &w1 + BigInt::from(k) * &v.0;
        let c2 = &w2 + BigInt::from(k) * &v.1;
        let nn = norm(&c1, &c2);
        if nn < best_norm {
            best_norm = nn;
            best = (c1, c2);
        }
    }
    Mat2::new(
        Rat::from_integer(best.0),
        Rat::from_integer(v.0.clone()),
        Rat::from_integer(best.1),
        Rat::from_integer(v.1.clone()),
    )
}

/// Extended gcd: returns (g, x, y) with a·x + b·y = g ≥ 0.
fn ext_gcd(a: BigInt, b: BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a, BigInt::from(-1), BigInt::zero());
        }
        return (a, BigInt::one(), BigInt::zero());
    }
    let (g, x, y) = ext_gcd(b.clone(), &a % &b);
    let q = &a / &b;
    (g, y.clone(), x - q * y)
}

/// Rational linear change bringing a D-type cubic into position: the cubic part of the
/// transformed phase is x₁·Q(x₁,x₂) with Q(0,1) ≠ 0 and both the x₂³ and x₁²x₂
/// coefficients zero. Among admissible real root lines the one maximizing |Q(0,1)| wins,
/// ties broken by the smallest rotation away from the x₂-axis.
pub fn dtype_linear_change(
    poly: &BivariatePoly,
) -> Result<(Mat2, BivariatePoly), ReduceError> {
    if corank(poly)? != 2 {
        return Err(ReduceError::NotDType("corank is not two".into()));
    }
    let cubic = poly.homogeneous_part(3);
    if cubic.is_zero() {
        return Err(ReduceError::NotDType("cubic part vanishes".into()));
    }
    let nn = max_root_multiplicity(&cubic)
        .map_err(|e| ReduceError::NotDType(format!("cubic part: {e}")))?;
    if nn >= 3 {
        return Err(ReduceError::NotDType(
            "cubic part has a root of multiplicity three".into(),
        ));
    }

    // Candidate root directions: rational roots of φ₃(1,t), plus (0,1) when the
    // x₂³ coefficient vanishes.
    let mut p = UniPoly::zero();
    for (&(i, j), c) in cubic.terms() {
        debug_assert_eq!(i + j, 3);
        p.set_coeff(j as usize, c.clone());
    }
    let mut directions: Vec<(BigInt, BigInt)> = Vec::new();
    if cubic.coeff(0, 3).is_zero() {
        directions.push((BigInt::zero(), BigInt::one()));
    }
    for t in rational_roots(&p)? {
        directions.push(primitive_direction(&t));
    }

    let mut best: Option<(Rat, Rat, Mat2, BivariatePoly)> = None;
    for v in directions {
        let m = complete_to_unimodular(&v);
        let transformed = poly.compose_linear(&m);
        let q = transformed.coeff(1, 2);
        if q.is_zero() {
            continue; // multiplicity-two line or residual degenerate: not admissible
        }
        debug_assert!(transformed.coeff(0, 3).is_zero());
        // Rotation proxy: v1²/(v1²+v2²) ∈ [0,1], zero when v is the x₂-axis itself.
        let v1r = Rat::from_integer(v.0.clone());
        let v2r = Rat::from_integer(v.1.clone());
        let angle = (&v1r * &v1r) / (&v1r * &v1r + &v2r * &v2r);
        let qa = q.abs();
        let better = match &best {
            None => true,
            Some((bq, bangle, _, _)) => qa > *bq || (qa == *bq && angle < *bangle),
        };
        if better {
            best = Some((qa, angle, m, transformed));
        }
    }
    let Some((_, _, m, transformed)) = best else {
        return Err(ReduceError::NotDType(
            "no admissible rational real root line of the cubic part".into(),
        ));
    };

    // Shear x₂ → x₂ + α·x₁ killing the x₁²x₂ coefficient (this is what keeps ψ = O(x₁²)).
    let q = transformed.coeff(1, 2);
    let q2 = transformed.coeff(2, 1);
    let alpha = -q2 / (rat_int(2) * &q);
    let shear = Mat2::new(Rat::one(), Rat::zero(), alpha, Rat::one());
    let full = m.mul(&shear);
    let positioned = transformed.compose_linear(&shear);
    debug_assert!(positioned.coeff(0, 3).is_zero());
    debug_assert!(positioned.coeff(2, 1).is_zero());
    debug_assert!(!positioned.coeff(1, 2).is_zero());
    Ok((full, positioned))
}

fn validate_position(poly: &BivariatePoly) -> Result<Rat, ReduceError> {
    validate_phase(poly)?;
    if corank(poly)? != 2 {
        return Err(ReduceError::ReductionFailed("corank is not two".into()));
    }
    let q = poly.coeff(1, 2);
    if q.is_zero() || !poly.coeff(0, 3).is_zero() || !poly.coeff(2, 1).is_zero() {
        return Err(ReduceError::ReductionFailed(
            "phase is not in post-linear-change position".into(),
        ));
    }
    Ok(q)
}

/// Solves ∂₂φ(x₁, ψ(x₁)) ≡ 0 mod x₁^{N+1} for ψ = O(x₁²) by undetermined
/// coefficients, one order at a time. The order-k unknown enters the x₁^{k+1}
/// coefficient linearly with factor 2·q, q the x₁x₂² coefficient.
pub fn extract_psi(poly: &BivariatePoly, trunc: u32) -> Result<SeriesCurve, ReduceError> {
    let q = validate_position(poly)?;
    let d2phi = poly.partial(1);
    let two_q = rat_int(2) * &q;
    let mut psi = UniPoly::zero();
    for k in 2..=trunc {
        let f = d2phi.eval_x2_series(&psi, k + 1);
        let a = f.coeff((k + 1) as usize);
        if !a.is_zero() {
            psi.set_coeff(k as usize, -a / &two_q);
        }
    }
    // Confirm the solve: the defect must vanish through order trunc+1.
    let f = d2phi.eval_x2_series(&psi, trunc + 1);
    if !f.is_zero() {
        return Err(ReduceError::ReductionFailed(
            "critical-curve solve left a low-order defect".into(),
        ));
    }
    Ok(SeriesCurve::from_unipoly(&psi, trunc))
}

/// Splits φ = b·(x₂−ψ)² + b₀ by shifting to w = x₂−ψ and dividing exactly; extracts
/// n, β(0), b₁(0,0), the b₂ series, and validates the D-type constraints.
pub fn extract_b0_b(
    poly: &BivariatePoly,
    psi: &SeriesCurve,
    trunc: u32,
) -> Result<NormalFormData, ReduceError> {
    validate_position(poly)?;
    let psi_poly = psi.as_unipoly();
    let shifted = poly.shift_x2_by_series(&psi_poly, trunc);
    let cols = shifted.x2_columns();
    let b0 = cols.first().cloned().unwrap_or_else(UniPoly::zero);
    let linear = cols.get(1).cloned().unwrap_or_else(UniPoly::zero);
    if !linear.is_zero() {
        return Err(ReduceError::ReductionFailed(
            "division by (x₂−ψ)² leaves a linear remainder; ψ is not the critical curve"
                .into(),
        ));
    }
    // b in shifted coordinates: columns 2.. of the shifted phase.
    let b_shifted_cols: Vec<UniPoly> = cols.iter().skip(2).cloned().collect();
    let b_shifted = BivariatePoly::from_x2_columns(&b_shifted_cols);

    if !b_shifted.coeff(0, 0).is_zero() {
        return Err(ReduceError::ReductionFailed("b(0,0) ≠ 0".into()));
    }
    if !b_shifted.coeff(0, 1).is_zero() {
        return Err(ReduceError::ReductionFailed("∂₂b(0,0) ≠ 0".into()));
    }
    let b1_0 = b_shifted.coeff(1, 0);
    if b1_0.is_zero() {
        return Err(ReduceError::NotDType("b₁(0,0) = 0".into()));
    }

    let n = match b0.order() {
        None => Inv::Infinite,
        Some(n) if n >= 3 => Inv::Finite(n as u32),
        Some(_) => {
            return Err(ReduceError::NotDType(
                "b₀ has order below three".into(),
            ))
        }
    };
    let beta0 = match n {
        Inv::Finite(n) => b0.coeff(n as usize),
        Inv::Infinite => Rat::zero(),
    };
    let m = match psi.order() {
        None => Inv::Infinite,
        Some(m) if m >= 2 => Inv::Finite(m),
        Some(_) => {
            return Err(ReduceError::ReductionFailed(
                "ψ has a nonzero linear part".into(),
            ))
        }
    };
    let omega0 = match m {
        Inv::Finite(m) => psi.coeff(m),
        Inv::Infinite => Rat::zero(),
    };

    // b₂ series: pure-x₂ part of b in shifted coordinates, b(0,w) = w²·b₂(w).
    let b2_coeffs: Vec<Rat> = (0..=shifted.degree_x2().saturating_sub(4))
        .map(|k| shifted.coeff(0, k + 4))
        .collect();
    let b2_series = SeriesCurve {
        coeffs: b2_coeffs,
        truncation: trunc,
    };

    // Back to unshifted coordinates: b(x₁,x₂) = b_shifted(x₁, x₂ − ψ).
    let b = b_shifted.shift_x2_by_series(&psi_poly.neg(), trunc);

    Ok(NormalFormData {
        m,
        n,
        psi: psi.clone(),
        b0: SeriesCurve::from_unipoly(&b0, trunc),
        omega0,
        beta0,
        b1_0,
        b2_series,
        b,
        linear_change: Mat2::identity(),
        truncation: trunc,
    })
}

/// Regime from the invariants: LA (2m+1 > n), EXCEPTIONAL (n = 2m+1),
/// NLA (2m+1 < n < ∞), D_INF (n = ∞).
pub fn classify_regime(m: Inv, n: Inv) -> Result<Regime, ReduceError> {
    match m {
        Inv::Finite(m) if m < 2 => {
            return Err(ReduceError::InvalidInvariants(format!("m = {m} < 2")))
        }
        _ => {}
    }
    match n {
        Inv::Finite(n) if n < 3 => {
            return Err(ReduceError::InvalidInvariants(format!("n = {n} < 3")))
        }
        _ => {}
    }
    match (m, n) {
        (Inv::Infinite, Inv::Infinite) => Err(ReduceError::InvalidInvariants(
            "m and n cannot both be infinite".into(),
        )),
        (_, Inv::Infinite) => Ok(Regime::DInf),
        (Inv::Infinite, Inv::Finite(_)) => Ok(Regime::La),
        (Inv::Finite(m), Inv::Finite(n)) => {
            if 2 * m + 1 > n {
                Ok(Regime::La)
            } else if 2 * m + 1 == n {
                Ok(Regime::Exceptional)
            } else {
                Ok(Regime::Nla)
            }
        }
    }
}

/// Default truncation: 2·degree_bound + 4, so m ≤ N/2 and n ≤ N are detectable.
pub fn default_truncation(poly: &BivariatePoly) -> u32 {
    2 * poly.total_degree() + 4
}

/// Full pipeline: corank and cubic checks, linear change, ψ, then the split.
pub fn reduce(poly: &BivariatePoly, trunc: Option<u32>) -> Result<NormalFormData, ReduceError> {
    if corank(poly)? != 2 {
        return Err(ReduceError::NotDType("corank is not two".into()));
    }
    let (change, positioned) = dtype_linear_change(poly)?;
    let trunc = trunc.unwrap_or_else(|| default_truncation(poly));
    let psi = extract_psi(&positioned, trunc)?;
    let mut nf = extract_b0_b(&positioned, &psi, trunc)?;
    nf.linear_change = change;
    Ok(nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn poly(terms: &[(u32, u32, i64)]) -> BivariatePoly {
        BivariatePoly::from_terms(terms.iter().map(|&(i, j, c)| ((i, j), rat_int(c))))
    }

    /// x₁(x₂ − x₁²)² + x₁⁷
    fn nla_phase() -> BivariatePoly {
        poly(&[(1, 2, 1), (3, 1, -2), (5, 0, 1), (7, 0, 1)])
    }

    #[test]
    fn corank_examples() {
        assert_eq!(corank(&poly(&[(1, 2, 1), (3, 0, 1)])).unwrap(), 2);
        assert_eq!(corank(&poly(&[(2, 0, 1), (0, 3, 1)])).unwrap(), 1);
        assert_eq!(corank(&poly(&[(2, 0, 1), (0, 2, 1)])).unwrap(), 0);
        // Mixed term only: x₁x₂ has full-rank Hessian.
        assert_eq!(corank(&poly(&[(1, 1, 1)])).unwrap(), 0);
    }

    #[test]
    fn linear_change_model_is_identity() {
        let (m, t) = dtype_linear_change(&poly(&[(1, 2, 1), (3, 0, 1)])).unwrap();
        assert_eq!(m, Mat2::identity());
        assert_eq!(t, poly(&[(1, 2, 1), (3, 0, 1)]));
    }

    #[test]
    fn linear_change_swapped_model() {
        // x₂x₁² + x₂³ needs the axes exchanged.
        let (m, t) = dtype_linear_change(&poly(&[(2, 1, 1), (0, 3, 1)])).unwrap();
        assert!(!t.coeff(1, 2).is_zero());
        assert!(t.coeff(0, 3).is_zero());
        assert!(t.coeff(2, 1).is_zero());
        // The x₂-axis image must be the root line {x₂ = 0}: second column ∝ (1, 0).
        assert!(m.d.is_zero());
        assert!(!m.b.is_zero());
    }

    #[test]
    fn linear_change_rejects_triple_root() {
        assert!(matches!(
            dtype_linear_change(&poly(&[(0, 3, 1)])),
            Err(ReduceError::NotDType(_))
        ));
    }

    #[test]
    fn linear_change_shears_away_mixed_quadratic() {
        // x₁x₂² + x₁²x₂ + x₁⁵: the shear must remove the x₁²x₂ term.
        let p = poly(&[(1, 2, 1), (2, 1, 1), (5, 0, 1)]);
        let (m, t) = dtype_linear_change(&p).unwrap();
        assert!(t.coeff(2, 1).is_zero());
        assert_eq!(m.det().abs(), Rat::one());
        // Completing the square of x₁(x₂ + x₁/2)² leaves b₀ = −x₁³/4 + x₁⁵ ⟹ n = 3.
        let nf = reduce(&p, None).unwrap();
        assert_eq!(nf.n, Inv::Finite(3));
        assert_eq!(nf.beta0, rat(-1, 4));
        assert_eq!(nf.m, Inv::Infinite);
    }

    #[test]
    fn psi_of_constructed_curve() {
        let psi = extract_psi(&nla_phase(), 18).unwrap();
        assert_eq!(psi.order(), Some(2));
        assert_eq!(psi.coeff(2), Rat::one());
        // All later coefficients vanish: ψ = x₁² exactly.
        assert!(psi.coeffs.iter().skip(3).all(|c| c.is_zero()));
    }

    #[test]
    fn psi_even_model_is_zero() {
        let psi = extract_psi(&poly(&[(1, 2, 1), (5, 0, 1)]), 14).unwrap();
        assert!(psi.is_zero());
    }

    #[test]
    fn psi_two_term_curve() {
        // x₁(x₂ − x₁² − x₁³)² + x₁⁹
        let base = poly(&[(1, 2, 1)]);
        let curve = UniPoly::from_coeffs(vec![
            Rat::zero(),
            Rat::zero(),
            rat_int(1),
            rat_int(1),
        ]);
        let built = base.shift_x2_by_series(&curve.neg(), 40).add(&poly(&[(9, 0, 1)]));
        let psi = extract_psi(&built, 20).unwrap();
        assert_eq!(psi.coeff(2), Rat::one());
        assert_eq!(psi.coeff(3), Rat::one());
        assert_eq!(psi.order(), Some(2));
        let nf = extract_b0_b(&built, &psi, 20).unwrap();
        assert_eq!(nf.omega0, Rat::one());
        assert_eq!(nf.m, Inv::Finite(2));
        assert_eq!(nf.n, Inv::Finite(9));
    }

    #[test]
    fn split_of_nla_phase() {
        let p = nla_phase();
        let psi = extract_psi(&p, 18).unwrap();
        let nf = extract_b0_b(&p, &psi, 18).unwrap();
        assert_eq!(nf.n, Inv::Finite(7));
        assert_eq!(nf.beta0, Rat::one());
        assert_eq!(nf.b1_0, Rat::one());
        assert_eq!(nf.m, Inv::Finite(2));
        assert_eq!(classify_regime(nf.m, nf.n).unwrap(), Regime::Nla);
        // Reconstruction is exact in the truncated ring.
        assert_eq!(nf.reconstruct(), p.truncate_x1(18));
    }

    #[test]
    fn split_of_model_phase() {
        let nf = reduce(&poly(&[(1, 2, 1), (3, 0, 1)]), None).unwrap();
        assert_eq!(nf.n, Inv::Finite(3));
        assert_eq!(nf.m, Inv::Infinite);
        assert_eq!(classify_regime(nf.m, nf.n).unwrap(), Regime::La);
    }

    #[test]
    fn split_of_d_infinity_phase() {
        // The bare model x₁x₂² has both ψ ≡ 0 and b₀ ≡ 0; the split still goes
        // through and records n = ∞ (R-condition).
        let nf = reduce(&poly(&[(1, 2, 1)]), None).unwrap();
        assert_eq!(nf.n, Inv::Infinite);
        assert!(nf.b0.is_zero());
        // A curved D_inf phase with finite m: x₁(x₂−x₁²)².
        let nf = reduce(&poly(&[(1, 2, 1), (3, 1, -2), (5, 0, 1)]), None).unwrap();
        assert_eq!(nf.n, Inv::Infinite);
        assert_eq!(nf.m, Inv::Finite(2));
        assert_eq!(classify_regime(nf.m, nf.n).unwrap(), Regime::DInf);
    }

    #[test]
    fn regime_table() {
        assert_eq!(
            classify_regime(Inv::Infinite, Inv::Finite(3)).unwrap(),
            Regime::La
        );
        assert_eq!(
            classify_regime(Inv::Finite(2), Inv::Finite(5)).unwrap(),
            Regime::Exceptional
        );
        assert_eq!(
            classify_regime(Inv::Finite(2), Inv::Finite(7)).unwrap(),
            Regime::Nla
        );
        assert_eq!(
            classify_regime(Inv::Finite(4), Inv::Infinite).unwrap(),
            Regime::DInf
        );
        assert!(classify_regime(Inv::Finite(1), Inv::Finite(5)).is_err());
        assert!(classify_regime(Inv::Finite(2), Inv::Finite(2)).is_err());
        assert!(classify_regime(Inv::Infinite, Inv::Infinite).is_err());
    }

    #[test]
    fn psi_extension_is_stable() {
        // Re-running with a larger truncation extends, never changes, coefficients.
        let p = nla_phase();
        let short = extract_psi(&p, 10).unwrap();
        let long = extract_psi(&p, 24).unwrap();
        for (k, c) in short.coeffs.iter().enumerate() {
            assert_eq!(&long.coeff(k as u32), c);
        }
    }

    #[test]
    fn height_report_from_normal_form() {
        let nf = reduce(&nla_phase(), None).unwrap();
        let hr = nf.height_report();
        assert_eq!(hr.h, rat(7, 4));
        assert_eq!(hr.d_given, rat(5, 3));
        assert_eq!(hr.h_lin_paper, rat(5, 4));
        assert!(!hr.adapted_linear);
        assert!(hr.d_given <= hr.h);
    }
}
