//! Exact polynomial arithmetic over ℚ: sparse bivariate polynomials, dense univariate
//! polynomials (Sturm chains, Yun square-free decomposition), and 2×2 rational linear
//! changes of variables. Everything here is exact; floats never enter.

use crate::rat::{rat_int, rat_to_string, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Total-degree cap for supports handled by the lattice-geometry layer.
pub const MAX_TOTAL_DEGREE: u32 = 64;

// ---------------------------------------------------------------------------
// Bivariate polynomials
// ---------------------------------------------------------------------------

/// Sparse exact polynomial in (x₁, x₂); no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in iter {
            p.add_term(i, j, c);
        }
        p
    }

    /// Single monomial c·x₁^i x₂^j.
    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        Self::from_terms([((i, j), c)])
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_x2(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Homogeneous part of total degree k.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, j), _)| i + j == k)
                .map(|(&ij, c)| (ij, c.clone())),
        )
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.total_degree();
        self.terms.keys().all(|&(i, j)| i + j == d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in other.terms.iter() {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in other.terms.iter() {
            out.add_term(i, j, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&ij, c)| (ij, -c.clone())))
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(&ij, c)| (ij, c * k)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c1) in self.terms.iter() {
            for (&(i, j), c2) in other.terms.iter() {
                out.add_term(a + i, b + j, c1 * c2);
            }
        }
        out
    }

    pub fn partial(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in self.terms.iter() {
            match axis {
                0 if i > 0 => out.add_term(i - 1, j, c * rat_int(i as i64)),
                1 if j > 0 => out.add_term(i, j - 1, c * rat_int(j as i64)),
                _ => {}
            }
        }
        out
    }

    /// Symmetric matrix of the quadratic part: [[∂₁²φ(0), ∂₁∂₂φ(0)], [·, ∂₂²φ(0)]].
    pub fn quadratic_hessian(&self) -> [[Rat; 2]; 2] {
        let a = self.coeff(2, 0) * rat_int(2);
        let b = self.coeff(1, 1);
        let d = self.coeff(0, 2) * rat_int(2);
        [[a, b.clone()], [b, d]]
    }

    /// Substitutes x = M·y, i.e. returns φ(M y) as a polynomial in y.
    pub fn compose_linear(&self, m: &Mat2) -> Self {
        // Precompute powers of the two linear images of the variables.
        let lx = Self::from_terms([((1, 0), m.a.clone()), ((0, 1), m.b.clone())]);
        let ly = Self::from_terms([((1, 0), m.c.clone()), ((0, 1), m.d.clone())]);
        let deg = self.total_degree() as usize;
        let pow = |base: &Self| -> Vec<Self> {
            let mut v = Vec::with_capacity(deg + 1);
            v.push(Self::monomial(0, 0, Rat::one()));
            for k in 1..=deg {
                let next = v[k - 1].mul(base);
                v.push(next);
            }
            v
        };
        let px = pow(&lx);
        let py = pow(&ly);
        let mut out = Self::zero();
        for (&(i, j), c) in self.terms.iter() {
            let term = px[i as usize].mul(&py[j as usize]).scale(c);
            out = out.add(&term);
        }
        out
    }

    /// Substitutes x₂ → x₂ + s(x₁) and truncates x₁-degrees above `n1`.
    /// This is the shift used to complete the square along the critical curve.
    pub fn shift_x2_by_series(&self, s: &UniPoly, n1: u32) -> Self {
        // Horner in x₂: φ = Σ_j q_j(x₁) x₂^j evaluated at x₂ + s; acc[k] holds the
        // x₁-series multiplying x₂^k of the partially evaluated result.
        let cols = self.x2_columns();
        let d2 = cols.len();
        let mut acc: Vec<UniPoly> = vec![UniPoly::zero(); d2];
        for j in (0..d2).rev() {
            // acc ← acc·(x₂ + s): new[k] = acc[k-1] + acc[k]·s
            let mut next: Vec<UniPoly> = vec![UniPoly::zero(); d2];
            for k in (0..d2).rev() {
                let mut v = acc[k].mul_trunc(s, n1);
                if k > 0 {
                    v = v.add(&acc[k - 1]);
                }
                next[k] = v.truncate(n1);
            }
            acc = next;
            acc[0] = acc[0].add(&cols[j]).truncate(n1);
        }
        Self::from_x2_columns(&acc)
    }

    /// Splits into columns by x₂-power: index j holds the x₁-polynomial of x₂^j.
    pub fn x2_columns(&self) -> Vec<UniPoly> {
        let d2 = self.degree_x2() as usize;
        let mut cols = vec![UniPoly::zero(); d2 + 1];
        for (&(i, j), c) in self.terms.iter() {
            cols[j as usize].set_coeff(i as usize, c.clone());
        }
        cols
    }

    pub fn from_x2_columns(cols: &[UniPoly]) -> Self {
        let mut p = Self::zero();
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, c.clone());
            }
        }
        p
    }

    /// Drops all terms with x₁-exponent above n1.
    pub fn truncate_x1(&self, n1: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i <= n1)
                .map(|(&ij, c)| (ij, c.clone())),
        )
    }

    /// φ(x₁, s(x₁)) truncated past x₁-degree n1.
    pub fn eval_x2_series(&self, s: &UniPoly, n1: u32) -> UniPoly {
        let cols = self.x2_columns();
        let mut acc = UniPoly::zero();
        for col in cols.iter().rev() {
            acc = acc.mul_trunc(s, n1).add(col).truncate(n1);
        }
        acc
    }
}

impl fmt::Debug for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| format!("{}·x1^{}·x2^{}", rat_to_string(c), i, j))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// 2×2 rational matrices (linear changes of variables)
// ---------------------------------------------------------------------------

/// Row-major 2×2 rational matrix; acts on column vectors: (x₁,x₂) ↦ (a x₁ + b x₂, c x₁ + d x₂).
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl Mat2 {
    pub fn identity() -> Self {
        Self {
            a: Rat::one(),
            b: Rat::zero(),
            c: Rat::zero(),
            d: Rat::one(),
        }
    }

    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Matrix product self·other (apply `other` first when composing substitutions).
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn apply(&self, v: &(Rat, Rat)) -> (Rat, Rat) {
        (
            &self.a * &v.0 + &self.b * &v.1,
            &self.c * &v.0 + &self.d * &v.1,
        )
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            rat_to_string(&self.a),
            rat_to_string(&self.b),
            rat_to_string(&self.c),
            rat_to_string(&self.d)
        )
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials
// ---------------------------------------------------------------------------

/// Dense exact univariate polynomial; coeffs[k] is the x^k coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set_coeff(&mut self, k: usize, c: Rat) {
        if k >= self.coeffs.len() {
            if c.is_zero() {
                return;
            }
            self.coeffs.resize(k + 1, Rat::zero());
        }
        self.coeffs[k] = c;
        self.trim();
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Order of vanishing at 0 (index of first nonzero coefficient).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Rat::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Rat::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] -= c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Product truncated past degree n.
    pub fn mul_trunc(&self, other: &Self, n: u32) -> Self {
        let n = n as usize;
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); (self.coeffs.len() + other.coeffs.len() - 1).min(n + 1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i > n {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Drops all coefficients of degree > n.
    pub fn truncate(&self, n: u32) -> Self {
        let n = n as usize;
        if self.coeffs.len() <= n + 1 {
            return self.clone();
        }
        Self::from_coeffs(self.coeffs[..=n].to_vec())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division: returns (quotient, remainder).
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / &lead;
            let shift = rd - dd;
            let term = Self::monomial(shift, factor);
            rem = rem.sub(&term.mul(divisor));
            quot = quot.add(&term);
        }
        (quot, rem)
    }

    /// Monic gcd via Euclid's algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.leading().cloned() {
            a = a.scale(&(Rat::one() / lead));
        }
        a
    }

    /// Yun's square-free decomposition: returns pairs (factor, multiplicity) with
    /// each factor square-free, non-constant, pairwise coprime, and
    /// `self = lead · Π factorᵢ^multᵢ`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        let Some(deg) = self.degree() else {
            return out;
        };
        if deg == 0 {
            return out;
        }
        let f = {
            let lead = self.leading().unwrap().clone();
            self.scale(&(Rat::one() / lead))
        };
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut mult = 1usize;
        while b.degree().unwrap_or(0) > 0 {
            let d = c.sub(&b.derivative());
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), mult));
            }
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            mult += 1;
        }
        out
    }

    /// Number of distinct real roots, by a Sturm chain over ℚ (exact).
    pub fn count_real_roots(&self) -> usize {
        let Some(deg) = self.degree() else {
            return 0;
        };
        if deg == 0 {
            return 0;
        }
        // Work on the square-free part so the chain terminates in a constant.
        let g = self.gcd(&self.derivative());
        let p = if g.degree().unwrap_or(0) > 0 {
            self.divrem(&g).0
        } else {
            self.clone()
        };
        if p.degree().unwrap_or(0) == 0 {
            return 0;
        }
        // Sturm chain p0, p1, then negated remainders.
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        // Sign at +∞ is the leading sign; at −∞ it flips with odd degree.
        let sign_at = |p: &Self, plus: bool| -> i8 {
            let lead = p.leading().unwrap();
            let mut s = if lead.is_positive() { 1 } else { -1 };
            if !plus && p.degree().unwrap() % 2 == 1 {
                s = -s;
            }
            s
        };
        let changes = |plus: bool| -> usize {
            let mut count = 0;
            let mut prev: Option<i8> = None;
            for p in chain.iter().filter(|p| !p.is_zero()) {
                let s = sign_at(p, plus);
                if let Some(ps) = prev {
                    if ps != s {
                        count += 1;
                    }
                }
                prev = Some(s);
            }
            count
        };
        changes(false) - changes(true)
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{}·x^{}", rat_to_string(c), k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn upoly(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn bivariate_mul_and_partial() {
        // (x1 + x2)·(x1 - x2) = x1² - x2²
        let a = BivariatePoly::from_terms([((1, 0), rat_int(1)), ((0, 1), rat_int(1))]);
        let b = BivariatePoly::from_terms([((1, 0), rat_int(1)), ((0, 1), rat_int(-1))]);
        let p = a.mul(&b);
        assert_eq!(p.coeff(2, 0), rat_int(1));
        assert_eq!(p.coeff(0, 2), rat_int(-1));
        assert_eq!(p.coeff(1, 1), rat_int(0));
        let d1 = p.partial(0);
        assert_eq!(d1.coeff(1, 0), rat_int(2));
    }

    #[test]
    fn compose_linear_swap() {
        // φ = x1·x2² under the swap (x1,x2) → (x2,x1) becomes x2·x1².
        let p = BivariatePoly::monomial(1, 2, rat_int(1));
        let swap = Mat2::new(rat_int(0), rat_int(1), rat_int(1), rat_int(0));
        let q = p.compose_linear(&swap);
        assert_eq!(q.coeff(2, 1), rat_int(1));
        assert_eq!(q.num_terms(), 1);
    }

    #[test]
    fn shift_x2_round_trips() {
        // Shifting by s then by -s is the identity modulo x1^N.
        let p = BivariatePoly::from_terms([
            ((1, 2), rat_int(1)),
            ((7, 0), rat_int(1)),
            ((2, 3), rat(-3, 2)),
        ]);
        let s = UniPoly::from_coeffs(vec![rat_int(0), rat_int(0), rat_int(1), rat(1, 3)]);
        let n1 = 12;
        let shifted = p.shift_x2_by_series(&s, n1);
        let back = shifted.shift_x2_by_series(&s.neg(), n1);
        assert_eq!(back, p.truncate_x1(n1));
    }

    #[test]
    fn divrem_and_gcd() {
        // (x²-1) = (x-1)(x+1)
        let p = upoly(&[-1, 0, 1]);
        let d = upoly(&[-1, 1]);
        let (q, r) = p.divrem(&d);
        assert!(r.is_zero());
        assert_eq!(q, upoly(&[1, 1]));
        let g = p.gcd(&upoly(&[1, 1]));
        assert_eq!(g, upoly(&[1, 1]));
    }

    #[test]
    fn squarefree_decomposition_yun() {
        // x²(x-1)³(x²+1)
        let p = upoly(&[0, 0, 1])
            .mul(&upoly(&[-1, 1]).mul(&upoly(&[-1, 1])).mul(&upoly(&[-1, 1])))
            .mul(&upoly(&[1, 0, 1]));
        let dec = p.squarefree_decomposition();
        let mut mults: Vec<usize> = dec.iter().map(|(_, m)| *m).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 2, 3]);
        for (f, m) in &dec {
            match m {
                2 => assert_eq!(f, &upoly(&[0, 1])),
                3 => assert_eq!(f, &upoly(&[-1, 1])),
                _ => assert_eq!(f, &upoly(&[1, 0, 1])),
            }
        }
    }

    #[test]
    fn sturm_counts_real_roots() {
        assert_eq!(upoly(&[1, 0, 1]).count_real_roots(), 0); // x²+1
        assert_eq!(upoly(&[-1, 0, 1]).count_real_roots(), 2); // x²-1
        assert_eq!(upoly(&[0, 1]).count_real_roots(), 1); // x
        assert_eq!(upoly(&[-2, 0, 0, 1]).count_real_roots(), 1); // x³-2
        assert_eq!(upoly(&[0, -1, 0, 1]).count_real_roots(), 3); // x³-x
    }
}
