//! Exact multilinear (Fourier) expansions over the rationals.
//!
//! Every function `f : {-1,1}^n -> R` has a unique expansion
//! `f = sum_S fhat(S) * chi_S` where `S` ranges over subsets of `[n]`,
//! `chi_S(x) = prod_{i in S} x_i`, and `fhat(S) = E[f * chi_S]` with the
//! expectation uniform over the cube. Subsets are encoded as bit masks
//! (coordinate `i` at bit `i - 1`), and all coefficients are exact
//! `BigRational`s, so every computation here is free of rounding.
//!
//! # Key operations
//!
//! * [`MultilinearPoly::expand`] / [`MultilinearPoly::truth_values`]:
//!   transform a Boolean truth table to its expansion and back, via the
//!   self-inverse Walsh-Hadamard butterfly;
//! * ring operations where multiplication reduces `x_i^2 = 1`, matching
//!   multiplication of functions on the cube;
//! * [`MultilinearPoly::shift`]: the substitution `x -> x + kappa`;
//! * [`MultilinearPoly::compose`]: substitution of inner polynomials on
//!   disjoint variable rows, producing a polynomial on an `n x m` grid;
//! * support queries: dependency set, degree, inclusion-maximal support
//!   sets, and the two-valuedness shape test used by the classifier.
//!
//! The textual form is one line per coefficient, `S=0x<hex> c=<num>/<den>`,
//! with masks strictly ascending.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::boolean_fn::BooleanFunction;
use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Largest polynomial arity; subset masks are stored in `u32`, and grid
/// compositions must fit too.
pub const MAX_POLY_ARITY: usize = 32;

/// Largest arity for which dense point-value vectors are materialized
/// (`truth_values`, Booleanness tests).
pub const MAX_DENSE_ARITY: usize = 20;

/// Convenience constructor for an integer rational.
pub fn rat(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Convenience constructor for the rational `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A multilinear polynomial in `arity` variables with rational coefficients.
///
/// Zero coefficients are never stored, so two polynomials are equal as
/// functions iff they are equal as values of this type.
#[derive(Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    arity: usize,
    coeffs: BTreeMap<u32, Rational>,
}

impl MultilinearPoly {
    /// The zero polynomial.
    pub fn zero(arity: usize) -> Self {
        assert!(arity <= MAX_POLY_ARITY);
        MultilinearPoly {
            arity,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant polynomial `c`.
    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.coeffs.insert(0, c);
        }
        p
    }

    /// The single variable `x_i` (1-based).
    pub fn variable(arity: usize, i: usize) -> Self {
        assert!(1 <= i && i <= arity);
        let mut p = Self::zero(arity);
        p.coeffs.insert(1 << (i - 1), Rational::one());
        p
    }

    /// Builds a polynomial from `(mask, coefficient)` pairs. Masks must fit
    /// the arity and be distinct; zero coefficients are dropped.
    pub fn from_coeffs(
        arity: usize,
        coeffs: impl IntoIterator<Item = (u32, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(arity);
        let limit = if arity == 32 { u64::MAX } else { 1u64 << arity };
        for (mask, c) in coeffs {
            if (mask as u64) >= limit {
                return Err(Error::Validation(format!(
                    "subset mask 0x{mask:x} does not fit arity {arity}"
                )));
            }
            if c.is_zero() {
                continue;
            }
            if p.coeffs.insert(mask, c).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate subset mask 0x{mask:x}"
                )));
            }
        }
        Ok(p)
    }

    /// Number of variables.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The coefficient at subset `mask` (zero if absent).
    pub fn coeff(&self, mask: u32) -> Rational {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates `(mask, coefficient)` pairs in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    /// Number of nonzero coefficients.
    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Whether this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The mean `fhat(emptyset)`.
    pub fn mean(&self) -> Rational {
        self.coeff(0)
    }

    fn add_to(&mut self, mask: u32, delta: Rational) {
        if delta.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(mask) {
            Entry::Vacant(slot) => {
                slot.insert(delta);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += delta;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (mask, c) in other.iter() {
            out.add_to(mask, c.clone());
        }
        out
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (mask, c) in other.iter() {
            out.add_to(mask, -c.clone());
        }
        out
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.arity);
        }
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= factor;
        }
        out
    }

    /// Adds a constant.
    pub fn add_constant(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.add_to(0, c.clone());
        out
    }

    /// Product of functions on the cube: multiplication of expansions with
    /// the reduction `x_i^2 = 1`, i.e. `chi_S * chi_T = chi_{S xor T}`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = Self::zero(self.arity);
        for (s, a) in self.iter() {
            for (t, b) in other.iter() {
                out.add_to(s ^ t, a.clone() * b);
            }
        }
        out
    }

    /// Evaluates at an arbitrary rational point (coordinate `i` at index
    /// `i - 1`).
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.arity);
        let mut total = Rational::zero();
        for (mask, c) in self.iter() {
            let mut term = c.clone();
            let mut bits = mask;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                term *= &point[k];
                bits &= bits - 1;
            }
            total += term;
        }
        total
    }

    /// The exact expansion of a Boolean function. Coefficients are dyadic
    /// rationals `k / 2^arity`.
    pub fn expand(f: &BooleanFunction) -> Self {
        let n = f.arity();
        let points = f.num_points() as usize;
        // The Walsh-Hadamard butterfly turns the value vector into the
        // vector of correlation sums 2^n * fhat(S); i64 is exact since every
        // intermediate is bounded by 2^n in absolute value.
        let mut a: Vec<i64> = (0..points as u32).map(|u| f.eval(u) as i64).collect();
        wht_i64(&mut a);
        let scale = BigInt::from(1u64 << n);
        let mut p = Self::zero(n);
        for (s, &sum) in a.iter().enumerate() {
            if sum != 0 {
                p.coeffs
                    .insert(s as u32, Rational::new(BigInt::from(sum), scale.clone()));
            }
        }
        p
    }

    /// The value vector of the polynomial at all `2^arity` cube points,
    /// indexed like a truth table. Limited to arities of at most
    /// [`MAX_DENSE_ARITY`].
    pub fn truth_values(&self) -> Result<Vec<Rational>> {
        if self.arity > MAX_DENSE_ARITY {
            return Err(Error::Resource(format!(
                "dense evaluation of arity {} exceeds the limit {MAX_DENSE_ARITY}",
                self.arity
            )));
        }
        let points = 1usize << self.arity;
        let mut a = vec![Rational::zero(); points];
        for (mask, c) in self.iter() {
            a[mask as usize] = c.clone();
        }
        // The same butterfly evaluates the expansion: applied to the
        // coefficient vector it yields sum_S fhat(S) chi_S(u) at entry u.
        wht_rational(&mut a);
        Ok(a)
    }

    /// If the polynomial is a Boolean function (all values in `{-1,+1}`),
    /// returns its truth table.
    pub fn as_boolean(&self) -> Result<Option<BooleanFunction>> {
        let values = self.truth_values()?;
        let one = Rational::one();
        let minus_one = -Rational::one();
        let mut f = BooleanFunction::new_false(self.arity);
        for (u, v) in values.iter().enumerate() {
            if *v == minus_one {
                f.set(u as u32, -1);
            } else if *v != one {
                return Ok(None);
            }
        }
        Ok(Some(f))
    }

    /// `sum_S fhat(S)^2`; equals 1 for Boolean functions (Parseval).
    pub fn parseval_norm_sq(&self) -> Rational {
        let mut total = Rational::zero();
        for (_, c) in self.iter() {
            total += c * c;
        }
        total
    }

    /// Splits off the mean: returns `(self - mean, mean)`.
    pub fn balance(&self) -> (Self, Rational) {
        let mean = self.mean();
        let mut out = self.clone();
        out.coeffs.remove(&0);
        (out, mean)
    }

    /// The substitution `x -> x + kappa`: returns `q` with
    /// `q(x) = p(x_1 + kappa_1, ..., x_n + kappa_n)`.
    pub fn shift(&self, kappa: &[Rational]) -> Self {
        assert_eq!(kappa.len(), self.arity);
        // Process one coordinate at a time: writing p = p0 + x_i p1 gives
        // p(.., x_i + k, ..) = (p0 + k p1) + x_i p1, i.e. every subset
        // containing i contributes k * coeff to the subset without i.
        let mut out = self.clone();
        for (idx, k) in kappa.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            let bit = 1u32 << idx;
            let additions: Vec<(u32, Rational)> = out
                .coeffs
                .iter()
                .filter(|(&mask, _)| mask & bit != 0)
                .map(|(&mask, c)| (mask & !bit, k.clone() * c))
                .collect();
            for (mask, delta) in additions {
                out.add_to(mask, delta);
            }
        }
        out
    }

    /// Subset masks with nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<u32> {
        self.coeffs.keys().copied().collect()
    }

    /// Coordinates appearing in some support set (1-based, ascending).
    pub fn dep(&self) -> Vec<usize> {
        let union = self.coeffs.keys().fold(0u32, |acc, &m| acc | m);
        (1..=self.arity)
            .filter(|&i| union & (1 << (i - 1)) != 0)
            .collect()
    }

    /// Largest support-set size; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Support sets not properly contained in another support set,
    /// ascending. Empty only for the zero polynomial.
    pub fn inclusion_maximal_sets(&self) -> Vec<u32> {
        let support = self.support();
        support
            .iter()
            .copied()
            .filter(|&s| {
                !support
                    .iter()
                    .any(|&t| t != s && t & s == s)
            })
            .collect()
    }

    /// Whether the polynomial has the support shape of a two-valued
    /// function:
    ///
    /// * constants qualify;
    /// * a polynomial of degree 1 qualifies only if it is exactly `+-x_i`;
    /// * otherwise every coordinate in the dependency set must appear in a
    ///   support set of size at least 2 (so every inclusion-maximal support
    ///   set has size at least 2).
    pub fn is_two_valued_like(&self) -> bool {
        match self.degree() {
            0 => true,
            1 => {
                if self.coeffs.len() != 1 {
                    return false;
                }
                let (&mask, c) = self.coeffs.iter().next().unwrap();
                mask.count_ones() == 1 && (c.is_one() || (-c).is_one())
            }
            _ => {
                let union_large = self
                    .coeffs
                    .keys()
                    .filter(|m| m.count_ones() >= 2)
                    .fold(0u32, |acc, &m| acc | m);
                self.dep()
                    .into_iter()
                    .all(|i| union_large & (1 << (i - 1)) != 0)
            }
        }
    }

    /// Substitutes inner polynomials into an outer one. `outer` has arity
    /// `n`, and `inners` supplies `n` polynomials of a common arity `m`;
    /// inner `i` is applied to the fresh variables of row `i`, so the result
    /// lives on the `n x m` grid with `z_{i,j}` at variable `(i-1)*m + j`.
    pub fn compose(outer: &Self, inners: &[Self]) -> Result<Self> {
        let n = outer.arity;
        assert_eq!(inners.len(), n);
        let m = inners.first().map_or(0, |p| p.arity);
        assert!(inners.iter().all(|p| p.arity == m));
        let grid = n * m;
        if grid > MAX_POLY_ARITY {
            return Err(Error::Resource(format!(
                "composition needs {grid} grid variables, limit is {MAX_POLY_ARITY}"
            )));
        }
        let mut out = Self::zero(grid);
        for (s, c) in outer.iter() {
            // Product over the rows of S of the embedded inner polynomials;
            // rows use disjoint variables, so masks combine by OR without
            // collisions.
            let mut terms: Vec<(u32, Rational)> = vec![(0, c.clone())];
            let mut bits = s;
            while bits != 0 {
                let row = bits.trailing_zeros() as usize; // 0-based
                bits &= bits - 1;
                let shift = (row * m) as u32;
                let mut next = Vec::with_capacity(terms.len() * inners[row].num_terms());
                for (mask, a) in &terms {
                    for (u, b) in inners[row].iter() {
                        next.push((mask | (u << shift), a.clone() * b));
                    }
                }
                terms = next;
            }
            for (mask, a) in terms {
                out.add_to(mask, a);
            }
        }
        Ok(out)
    }

    /// Reinterprets a polynomial on an `rows x cols` grid as one on the
    /// transposed `cols x rows` grid: variable `(i,j)` becomes `(j,i)`.
    pub fn transpose_grid(&self, rows: usize, cols: usize) -> Self {
        assert_eq!(self.arity, rows * cols);
        let mut out = Self::zero(self.arity);
        for (mask, c) in self.iter() {
            let mut new_mask = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let (i, j) = (v / cols, v % cols);
                new_mask |= 1 << (j * rows + i);
            }
            out.coeffs.insert(new_mask, c.clone());
        }
        out
    }

    /// Renders one line per coefficient: `S=0x<hex> c=<num>/<den>`, masks
    /// ascending, coefficients in lowest terms with positive denominator.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (mask, c) in self.iter() {
            out.push_str(&format!("S=0x{:x} c={}/{}\n", mask, c.numer(), c.denom()));
        }
        out
    }

    /// Parses the textual form produced by [`MultilinearPoly::to_text`].
    /// Masks must be strictly ascending; zero coefficients are dropped.
    pub fn parse(arity: usize, text: &str) -> Result<Self> {
        if arity > MAX_POLY_ARITY {
            return Err(Error::Resource(format!(
                "polynomial arity {arity} exceeds the limit {MAX_POLY_ARITY}"
            )));
        }
        let mut p = Self::zero(arity);
        let mut last_mask: Option<u32> = None;
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let s_tok = tokens.next().unwrap_or("");
            let c_tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing c= field", line_no + 1)))?;
            if tokens.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: unexpected trailing tokens",
                    line_no + 1
                )));
            }
            let hex = s_tok
                .strip_prefix("S=0x")
                .ok_or_else(|| Error::Parse(format!("line {}: expected S=0x<hex>", line_no + 1)))?;
            let mask = u32::from_str_radix(hex, 16)
                .map_err(|_| Error::Parse(format!("line {}: invalid mask {hex:?}", line_no + 1)))?;
            if arity < 32 && (mask as u64) >= (1u64 << arity) {
                return Err(Error::Parse(format!(
                    "line {}: mask 0x{mask:x} does not fit arity {arity}",
                    line_no + 1
                )));
            }
            if let Some(prev) = last_mask {
                if mask <= prev {
                    return Err(Error::Parse(format!(
                        "line {}: masks must be strictly ascending",
                        line_no + 1
                    )));
                }
            }
            last_mask = Some(mask);
            let frac = c_tok
                .strip_prefix("c=")
                .ok_or_else(|| Error::Parse(format!("line {}: expected c=<num>/<den>", line_no + 1)))?;
            let (num_s, den_s) = frac.split_once('/').ok_or_else(|| {
                Error::Parse(format!("line {}: coefficient must be <num>/<den>", line_no + 1))
            })?;
            let numer: BigInt = num_s
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: invalid numerator", line_no + 1)))?;
            let denom: BigInt = den_s
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: invalid denominator", line_no + 1)))?;
            if denom.is_zero() {
                return Err(Error::Parse(format!("line {}: zero denominator", line_no + 1)));
            }
            if !denom.is_positive() {
                return Err(Error::Parse(format!(
                    "line {}: denominator must be positive",
                    line_no + 1
                )));
            }
            let c = Rational::new(numer, denom);
            if !c.is_zero() {
                p.coeffs.insert(mask, c);
            }
        }
        Ok(p)
    }
}

impl fmt::Debug for MultilinearPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "MultilinearPoly(arity={}, {:?})", self.arity, self.coeffs)
    }
}

/// In-place Walsh-Hadamard butterfly on a power-of-two-length vector. The
/// transform is its own inverse up to division by the length.
pub fn wht_i64(a: &mut [i64]) {
    debug_assert!(a.len().is_power_of_two());
    let mut half = 1;
    while half < a.len() {
        let mut base = 0;
        while base < a.len() {
            for z in base..base + half {
                let (s, t) = (a[z], a[z + half]);
                a[z] = s + t;
                a[z + half] = s - t;
            }
            base += half * 2;
        }
        half *= 2;
    }
}

fn wht_rational(a: &mut [Rational]) {
    debug_assert!(a.len().is_power_of_two());
    let mut half = 1;
    while half < a.len() {
        let mut base = 0;
        while base < a.len() {
            for z in base..base + half {
                let s = a[z].clone();
                let t = a[z + half].clone();
                a[z] = s.clone() + t.clone();
                a[z + half] = s - t;
            }
            base += half * 2;
        }
        half *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2_poly() -> MultilinearPoly {
        MultilinearPoly::expand(&BooleanFunction::make_and(2, &[-1, -1], -1))
    }

    #[test]
    fn test_expand_and2() {
        // AND = (1 + x1 + x2 - x1 x2) / 2.
        let p = and2_poly();
        assert_eq!(p.coeff(0b00), ratio(1, 2));
        assert_eq!(p.coeff(0b01), ratio(1, 2));
        assert_eq!(p.coeff(0b10), ratio(1, 2));
        assert_eq!(p.coeff(0b11), ratio(-1, 2));
        assert_eq!(p.num_terms(), 4);
    }

    #[test]
    fn test_expand_xor_is_full_character() {
        let p = MultilinearPoly::expand(&BooleanFunction::make_xor(3));
        assert_eq!(p.support(), vec![0b111]);
        assert_eq!(p.coeff(0b111), rat(1));
    }

    #[test]
    fn test_evaluate_off_cube() {
        let p = and2_poly();
        let half = |v| p.evaluate(&[rat(v), rat(0)]);
        assert_eq!(p.evaluate(&[rat(0), rat(0)]), ratio(1, 2));
        assert_eq!(half(1), rat(1));
        assert_eq!(p.evaluate(&[rat(-1), rat(-1)]), rat(-1));
    }

    #[test]
    fn test_truth_values_round_trip() {
        for f in [
            BooleanFunction::make_and(2, &[-1, -1], -1),
            BooleanFunction::make_xor(4),
            BooleanFunction::parse("n=3 tt=0x96").unwrap(),
        ] {
            let p = MultilinearPoly::expand(&f);
            let values = p.truth_values().unwrap();
            for u in 0..f.num_points() {
                assert_eq!(values[u as usize], rat(f.eval(u) as i64));
            }
            assert_eq!(p.as_boolean().unwrap(), Some(f));
        }
    }

    #[test]
    fn test_as_boolean_rejects_non_boolean() {
        let p = MultilinearPoly::constant(2, ratio(1, 3));
        assert_eq!(p.as_boolean().unwrap(), None);
    }

    #[test]
    fn test_parseval_for_boolean_functions() {
        for text in ["n=2 tt=0x8", "n=3 tt=0x96", "n=4 tt=0x0662"] {
            let f = BooleanFunction::parse(text).unwrap();
            assert_eq!(MultilinearPoly::expand(&f).parseval_norm_sq(), rat(1));
        }
    }

    #[test]
    fn test_mul_reduces_squares() {
        let x1 = MultilinearPoly::variable(2, 1);
        assert_eq!(x1.mul(&x1), MultilinearPoly::constant(2, rat(1)));
        let sum = x1.add(&MultilinearPoly::variable(2, 2));
        let sq = sum.mul(&sum);
        // (x1 + x2)^2 = 2 + 2 x1 x2 on the cube.
        assert_eq!(sq.coeff(0), rat(2));
        assert_eq!(sq.coeff(0b11), rat(2));
        assert_eq!(sq.num_terms(), 2);
    }

    #[test]
    fn test_shift_simple() {
        // (x1 + 1) * x2 = x2 + x1 x2.
        let p = MultilinearPoly::expand(&BooleanFunction::make_xor(2));
        let q = p.shift(&[rat(1), rat(0)]);
        assert_eq!(q.coeff(0b10), rat(1));
        assert_eq!(q.coeff(0b11), rat(1));
        assert_eq!(q.num_terms(), 2);
    }

    #[test]
    fn test_shift_matches_pointwise_substitution() {
        let p = and2_poly();
        let kappa = [ratio(1, 3), ratio(-2, 5)];
        let q = p.shift(&kappa);
        for u in 0..4u32 {
            let x: Vec<Rational> = (0..2)
                .map(|k| if (u >> k) & 1 == 1 { rat(-1) } else { rat(1) })
                .collect();
            let moved: Vec<Rational> =
                x.iter().zip(&kappa).map(|(a, b)| a.clone() + b.clone()).collect();
            assert_eq!(q.evaluate(&x), p.evaluate(&moved));
        }
    }

    #[test]
    fn test_shift_inverse() {
        let p = and2_poly();
        let kappa = [ratio(2, 7), rat(3)];
        let neg: Vec<Rational> = kappa.iter().map(|k| -k.clone()).collect();
        assert_eq!(p.shift(&kappa).shift(&neg), p);
    }

    #[test]
    fn test_balance() {
        let (balanced, mean) = and2_poly().balance();
        assert_eq!(mean, ratio(1, 2));
        assert_eq!(balanced.mean(), rat(0));
        assert_eq!(balanced.num_terms(), 3);
    }

    #[test]
    fn test_support_dep_degree() {
        let p = MultilinearPoly::from_coeffs(
            3,
            [(0b001, rat(1)), (0b110, ratio(1, 2))],
        )
        .unwrap();
        assert_eq!(p.support(), vec![0b001, 0b110]);
        assert_eq!(p.dep(), vec![1, 2, 3]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.inclusion_maximal_sets(), vec![0b001, 0b110]);
        assert_eq!(and2_poly().inclusion_maximal_sets(), vec![0b11]);
    }

    #[test]
    fn test_two_valued_like_shapes() {
        // Boolean expansions qualify.
        assert!(and2_poly().is_two_valued_like());
        // Exact dictators qualify; scaled or translated ones do not.
        assert!(MultilinearPoly::variable(3, 2).is_two_valued_like());
        assert!(!MultilinearPoly::variable(3, 2)
            .add_constant(&ratio(1, 3))
            .is_two_valued_like());
        assert!(!MultilinearPoly::variable(3, 2).scale(&rat(2)).is_two_valued_like());
        // Constants qualify.
        assert!(MultilinearPoly::constant(2, ratio(5, 3)).is_two_valued_like());
        assert!(MultilinearPoly::zero(2).is_two_valued_like());
        // x1 + x2 x3 leaves coordinate 1 outside all larger sets.
        let p = MultilinearPoly::from_coeffs(3, [(0b001, rat(1)), (0b110, rat(1))]).unwrap();
        assert!(!p.is_two_valued_like());
        // A scaled degree-2 monomial qualifies.
        let q = MultilinearPoly::from_coeffs(3, [(0b011, ratio(1, 3))]).unwrap();
        assert!(q.is_two_valued_like());
    }

    #[test]
    fn test_compose_characters() {
        // Outer x1 x2 with inners y1 y2 (row 1) and y1 (row 2) composes to
        // the grid monomial z11 z12 z21.
        let outer = MultilinearPoly::expand(&BooleanFunction::make_xor(2));
        let row1 = MultilinearPoly::from_coeffs(2, [(0b11, rat(1))]).unwrap();
        let row2 = MultilinearPoly::from_coeffs(2, [(0b01, rat(1))]).unwrap();
        let grid = MultilinearPoly::compose(&outer, &[row1, row2]).unwrap();
        assert_eq!(grid.support(), vec![0b0111]);
        assert_eq!(grid.coeff(0b0111), rat(1));
    }

    #[test]
    fn test_compose_matches_pointwise() {
        let outer = and2_poly();
        let g1 = MultilinearPoly::expand(&BooleanFunction::make_xor(2));
        let g2 = MultilinearPoly::expand(&BooleanFunction::make_or(2, &[-1, 1], 1));
        let grid = MultilinearPoly::compose(&outer, &[g1.clone(), g2.clone()]).unwrap();
        for z in 0..16u32 {
            let zp: Vec<Rational> = (0..4)
                .map(|k| if (z >> k) & 1 == 1 { rat(-1) } else { rat(1) })
                .collect();
            let inner1 = g1.evaluate(&zp[0..2]);
            let inner2 = g2.evaluate(&zp[2..4]);
            assert_eq!(grid.evaluate(&zp), outer.evaluate(&[inner1, inner2]));
        }
    }

    #[test]
    fn test_transpose_grid() {
        // z_{1,2} on a 2x2 grid (variable 2) maps to z_{2,1} (variable 3).
        let p = MultilinearPoly::from_coeffs(4, [(0b0010, rat(1))]).unwrap();
        let t = p.transpose_grid(2, 2);
        assert_eq!(t.support(), vec![0b0100]);
        assert_eq!(t.transpose_grid(2, 2), p);
    }

    #[test]
    fn test_text_round_trip() {
        let p = and2_poly();
        let text = p.to_text();
        assert_eq!(
            text,
            "S=0x0 c=1/2\nS=0x1 c=1/2\nS=0x2 c=1/2\nS=0x3 c=-1/2\n"
        );
        assert_eq!(MultilinearPoly::parse(2, &text).unwrap(), p);
    }

    #[test]
    fn test_parse_rejects_malformed_input() {
        for bad in [
            "S=0x0",
            "S=0 c=1/2",
            "S=0x0 c=1",
            "S=0x0 c=1/0",
            "S=0x0 c=1/-2",
            "S=0x4 c=1/2",              // mask outside arity 2
            "S=0x1 c=1/2\nS=0x1 c=1/3", // duplicate mask
            "S=0x2 c=1/2\nS=0x1 c=1/3", // descending masks
            "S=0x0 c=1/2 extra",
        ] {
            assert!(MultilinearPoly::parse(2, bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn test_expand_has_dyadic_coefficients_and_inverts() {
        let f = BooleanFunction::parse("n=4 tt=0x1ee1").unwrap();
        let p = MultilinearPoly::expand(&f);
        for (_, c) in p.iter() {
            // Denominators divide 2^4.
            assert!((BigInt::from(16) % c.denom()).is_zero());
        }
        assert_eq!(p.as_boolean().unwrap(), Some(f));
    }
}
