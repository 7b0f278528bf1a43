//! Boolean functions on the hypercube `{-1,1}^n`, stored as packed truth
//! tables.
//!
//! # Encoding
//!
//! Logical *True* is the value `-1` and *False* is `+1`, so that
//! multiplication of values acts as XOR. An input point
//! `x = (x_1, ..., x_n)` is identified with the integer `u` whose bit
//! `i - 1` is set exactly when `x_i = -1`. The truth table is a bit vector
//! indexed by `u`: bit `u` is set exactly when the function's value at `u`
//! is `-1`.
//!
//! The textual form is `n=<arity> tt=0x<hex>`, where bit `u` of the hex
//! integer is bit `u` of the table and the hex string is zero-padded to
//! `ceil(2^n / 4)` digits.
//!
//! # Key operations
//!
//! * structural queries: [`BooleanFunction::dep`], [`BooleanFunction::degree`],
//!   [`BooleanFunction::dictator_form`], [`BooleanFunction::is_constant`];
//! * cube manipulation: [`BooleanFunction::restrict`],
//!   [`BooleanFunction::restrict_many`], [`BooleanFunction::lift`],
//!   [`BooleanFunction::compose_input_flips`];
//! * canonical families: XOR (character) functions, AND/OR-like functions
//!   that single out one point or its complement, dictators and constants.
//!
//! Coordinates are 1-based throughout the public API.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value in `{-1, +1}`, stored as `i8`.
pub type Sign = i8;

/// Largest supported arity. Truth tables hold `2^arity` bits, so this keeps
/// every table comfortably in memory (2 MiB) while covering everything the
/// exhaustive tooling can reach.
pub const MAX_ARITY: usize = 24;

/// A Boolean function `{-1,1}^arity -> {-1,1}` as a packed truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    arity: usize,
    /// Packed table bits; bit `u` of the vector is set iff the value at
    /// point `u` is `-1`. Bits at positions `>= 2^arity` are always zero.
    words: Vec<u64>,
}

fn words_for(arity: usize) -> usize {
    let points = 1usize << arity;
    points.div_ceil(64)
}

/// Bit masks used by the word-level dependency test: `FLIP_MASKS[k]` marks
/// the positions whose bit `k` is zero, for flip distances below 64.
const FLIP_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

impl BooleanFunction {
    /// The constant `+1` (all-False) function of the given arity.
    pub fn new_false(arity: usize) -> Self {
        assert!(arity <= MAX_ARITY, "arity {arity} exceeds {MAX_ARITY}");
        BooleanFunction {
            arity,
            words: vec![0; words_for(arity)],
        }
    }

    /// Builds a function by evaluating `value` at every point.
    pub fn from_fn(arity: usize, mut value: impl FnMut(u32) -> Sign) -> Self {
        let mut f = Self::new_false(arity);
        for u in 0..f.num_points() {
            let v = value(u);
            debug_assert!(v == 1 || v == -1, "values must be in {{-1,+1}}");
            if v == -1 {
                f.words[(u >> 6) as usize] |= 1u64 << (u & 63);
            }
        }
        f
    }

    /// Builds a function directly from packed table words. Bits beyond
    /// `2^arity` must be zero.
    pub fn from_words(arity: usize, words: Vec<u64>) -> Result<Self> {
        assert!(arity <= MAX_ARITY, "arity {arity} exceeds {MAX_ARITY}");
        if words.len() != words_for(arity) {
            return Err(Error::Validation(format!(
                "expected {} table words for arity {arity}, got {}",
                words_for(arity),
                words.len()
            )));
        }
        let points = 1u64 << arity;
        if points < 64 && (words[0] >> points) != 0 {
            return Err(Error::Validation(
                "table has bits set beyond 2^arity".into(),
            ));
        }
        Ok(BooleanFunction { arity, words })
    }

    /// Number of input coordinates.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of points of the domain, `2^arity`.
    pub fn num_points(&self) -> u32 {
        1u32 << self.arity
    }

    /// Raw table bit at point `u`: `true` means the value is `-1`.
    #[inline]
    pub fn bit(&self, u: u32) -> bool {
        debug_assert!(u < self.num_points());
        (self.words[(u >> 6) as usize] >> (u & 63)) & 1 == 1
    }

    /// Value at point `u`.
    #[inline]
    pub fn eval(&self, u: u32) -> Sign {
        if self.bit(u) {
            -1
        } else {
            1
        }
    }

    /// Sets the value at point `u`.
    pub fn set(&mut self, u: u32, value: Sign) {
        debug_assert!(u < self.num_points());
        debug_assert!(value == 1 || value == -1);
        let (w, b) = ((u >> 6) as usize, u & 63);
        if value == -1 {
            self.words[w] |= 1u64 << b;
        } else {
            self.words[w] &= !(1u64 << b);
        }
    }

    /// Evaluates at an explicit `{-1,+1}` point, given as a slice of length
    /// `arity` (coordinate `i` at index `i - 1`).
    pub fn eval_point(&self, point: &[Sign]) -> Sign {
        assert_eq!(point.len(), self.arity);
        let mut u = 0u32;
        for (idx, &s) in point.iter().enumerate() {
            debug_assert!(s == 1 || s == -1);
            if s == -1 {
                u |= 1 << idx;
            }
        }
        self.eval(u)
    }

    /// Access to the packed table words.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `Some(v)` if the function is constantly `v`.
    pub fn is_constant(&self) -> Option<Sign> {
        let points = self.num_points();
        if self.words.iter().all(|&w| w == 0) {
            return Some(1);
        }
        let full = |idx: usize| -> u64 {
            let remaining = points as u64 - (idx as u64) * 64;
            if remaining >= 64 {
                !0
            } else {
                (1u64 << remaining) - 1
            }
        };
        if self
            .words
            .iter()
            .enumerate()
            .all(|(idx, &w)| w == full(idx))
        {
            return Some(-1);
        }
        None
    }

    /// Whether the function's value depends on coordinate `i` (1-based).
    pub fn depends_on(&self, i: usize) -> bool {
        assert!(1 <= i && i <= self.arity);
        let k = i - 1;
        if k < 6 {
            // Positions with bit k clear pair up with their flip partner d
            // places higher inside the same word; the zero padding beyond
            // 2^arity never produces false positives.
            let mask = FLIP_MASKS[k];
            let d = 1u32 << k;
            self.words.iter().any(|&w| ((w >> d) ^ w) & mask != 0)
        } else {
            let stride = 1usize << (k - 6);
            self.words.iter().enumerate().any(|(idx, &w)| {
                idx & stride == 0 && w != self.words[idx | stride]
            })
        }
    }

    /// The set of coordinates the function depends on, ascending, 1-based.
    pub fn dep(&self) -> Vec<usize> {
        (1..=self.arity).filter(|&i| self.depends_on(i)).collect()
    }

    /// Degree of the function as a multilinear polynomial: the largest
    /// `|S|` with a nonzero Fourier coefficient. Constants have degree 0.
    pub fn degree(&self) -> usize {
        // Integer Walsh-Hadamard transform of the value vector; the
        // coefficient at S is nonzero iff the transformed entry is nonzero.
        let points = self.num_points() as usize;
        let mut a: Vec<i32> = (0..points as u32).map(|u| self.eval(u) as i32).collect();
        let mut half = 1;
        while half < points {
            let mut base = 0;
            while base < points {
                for z in base..base + half {
                    let (s, t) = (a[z], a[z + half]);
                    a[z] = s + t;
                    a[z + half] = s - t;
                }
                base += half * 2;
            }
            half *= 2;
        }
        a.iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(s, _)| (s as u32).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `Some((i, sign))` if the function is exactly `sign * x_i`.
    pub fn dictator_form(&self) -> Option<(usize, Sign)> {
        let dep = self.dep();
        if dep.len() != 1 {
            return None;
        }
        let i = dep[0];
        // A Boolean function depending on exactly one coordinate is +-x_i;
        // its value at u = 0 (where x_i = +1) fixes the sign.
        Some((i, self.eval(0)))
    }

    /// Pointwise negation.
    pub fn negate(&self) -> Self {
        let points = self.num_points();
        let mut out = self.clone();
        for (idx, w) in out.words.iter_mut().enumerate() {
            *w = !*w;
            let remaining = points as u64 - (idx as u64) * 64;
            if remaining < 64 {
                *w &= (1u64 << remaining) - 1;
            }
        }
        out
    }

    /// Restriction `x_i := value`, returning a function of arity
    /// `arity - 1` on the remaining coordinates in their original order.
    pub fn restrict(&self, i: usize, value: Sign) -> Self {
        self.restrict_many(&[(i, value)])
    }

    /// Simultaneous restriction of several coordinates. `pins` must use
    /// distinct 1-based coordinates; the result is a function of the
    /// remaining coordinates in ascending original order.
    pub fn restrict_many(&self, pins: &[(usize, Sign)]) -> Self {
        let mut pin_mask = 0u32;
        let mut pin_bits = 0u32;
        for &(i, s) in pins {
            assert!(1 <= i && i <= self.arity, "pin coordinate out of range");
            let bit = 1u32 << (i - 1);
            assert!(pin_mask & bit == 0, "duplicate pin coordinate");
            pin_mask |= bit;
            if s == -1 {
                pin_bits |= bit;
            }
        }
        let remaining: Vec<usize> = (0..self.arity)
            .filter(|&k| pin_mask & (1 << k) == 0)
            .collect();
        BooleanFunction::from_fn(remaining.len(), |u| {
            let mut full = pin_bits;
            for (t, &k) in remaining.iter().enumerate() {
                if (u >> t) & 1 == 1 {
                    full |= 1 << k;
                }
            }
            self.eval(full)
        })
    }

    /// Projection onto a subset of coordinates: returns the function of
    /// arity `coords.len()` obtained by pinning every other coordinate to
    /// `+1`. The caller must ensure `dep()` is contained in `coords`,
    /// otherwise information is lost.
    pub fn restricted_to(&self, coords: &[usize]) -> Self {
        debug_assert!(self.dep().iter().all(|i| coords.contains(i)));
        let pins: Vec<(usize, Sign)> = (1..=self.arity)
            .filter(|i| !coords.contains(i))
            .map(|i| (i, 1))
            .collect();
        // restrict_many keeps remaining coordinates in ascending original
        // order, which matches the ascending order required of `coords`.
        debug_assert!(coords.windows(2).all(|w| w[0] < w[1]));
        self.restrict_many(&pins)
    }

    /// Inverse of [`BooleanFunction::restricted_to`]: embeds a function of
    /// arity `coords.len()` into arity `new_arity`, reading its `t`-th
    /// input from coordinate `coords[t]` and ignoring all others.
    pub fn lift(&self, new_arity: usize, coords: &[usize]) -> Self {
        assert_eq!(coords.len(), self.arity);
        assert!(coords.iter().all(|&i| 1 <= i && i <= new_arity));
        BooleanFunction::from_fn(new_arity, |u| {
            let mut inner = 0u32;
            for (t, &i) in coords.iter().enumerate() {
                if (u >> (i - 1)) & 1 == 1 {
                    inner |= 1 << t;
                }
            }
            self.eval(inner)
        })
    }

    /// The function `x -> f(s_1 x_1, ..., s_n x_n)` where `s_i = -1` exactly
    /// for the bits set in `flips`. Flipping the sign of an input coordinate
    /// is flipping the corresponding index bit.
    pub fn compose_input_flips(&self, flips: u32) -> Self {
        assert!(flips < self.num_points());
        BooleanFunction::from_fn(self.arity, |u| self.eval(u ^ flips))
    }

    /// The constant function with value `sign`.
    pub fn make_const(arity: usize, sign: Sign) -> Self {
        assert!(sign == 1 || sign == -1);
        let f = Self::new_false(arity);
        if sign == 1 {
            f
        } else {
            f.negate()
        }
    }

    /// The dictator `sign * x_i`.
    pub fn make_dictator(arity: usize, i: usize, sign: Sign) -> Self {
        assert!(1 <= i && i <= arity);
        assert!(sign == 1 || sign == -1);
        BooleanFunction::from_fn(arity, |u| {
            let xi: Sign = if (u >> (i - 1)) & 1 == 1 { -1 } else { 1 };
            sign * xi
        })
    }

    /// The full parity `x_1 * x_2 * ... * x_n` (XOR of all inputs).
    pub fn make_xor(arity: usize) -> Self {
        BooleanFunction::from_fn(arity, |u| if u.count_ones() % 2 == 1 { -1 } else { 1 })
    }

    /// The AND-like function that attains `b` exactly at the point
    /// `x = kappa` and `-b` everywhere else. With `kappa = (-1,...,-1)` and
    /// `b = -1` this is the usual AND.
    pub fn make_and(arity: usize, kappa: &[Sign], b: Sign) -> Self {
        assert_eq!(kappa.len(), arity);
        assert!(b == 1 || b == -1);
        let mut target = 0u32;
        for (idx, &s) in kappa.iter().enumerate() {
            assert!(s == 1 || s == -1);
            if s == -1 {
                target |= 1 << idx;
            }
        }
        BooleanFunction::from_fn(arity, |u| if u == target { b } else { -b })
    }

    /// The OR-like function that attains `b` exactly when some `x_i = kappa_i`
    /// holds, and `-b` at the single remaining point. With
    /// `kappa = (-1,...,-1)` and `b = -1` this is the usual OR.
    pub fn make_or(arity: usize, kappa: &[Sign], b: Sign) -> Self {
        assert_eq!(kappa.len(), arity);
        // f equals -b exactly at the single point x = -kappa, which is the
        // AND-like function with parameters (-kappa, -b).
        let neg: Vec<Sign> = kappa.iter().map(|&s| -s).collect();
        Self::make_and(arity, &neg, -b)
    }

    /// Parses the textual form `n=<arity> tt=0x<hex>`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n_tok = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty function text".into()))?;
        let tt_tok = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing tt= field in {text:?}")))?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse(format!(
                "unexpected trailing token {extra:?} in function text"
            )));
        }
        let arity: usize = n_tok
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected n=<arity>, got {n_tok:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("invalid arity in {n_tok:?}")))?;
        if arity > MAX_ARITY {
            return Err(Error::Resource(format!(
                "arity {arity} exceeds the supported maximum {MAX_ARITY}"
            )));
        }
        let hex = tt_tok
            .strip_prefix("tt=0x")
            .ok_or_else(|| Error::Parse(format!("expected tt=0x<hex>, got {tt_tok:?}")))?;
        let expected_digits = (1usize << arity).div_ceil(4);
        if hex.len() != expected_digits {
            return Err(Error::Parse(format!(
                "table for arity {arity} needs exactly {expected_digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut f = Self::new_false(arity);
        for (pos, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))?
                as u64;
            f.words[pos / 16] |= nibble << ((pos % 16) * 4);
        }
        let points = 1u64 << arity;
        if points < 64 && (f.words[0] >> points) != 0 {
            return Err(Error::Parse(format!(
                "table bits beyond 2^{arity} points must be zero"
            )));
        }
        Ok(f)
    }

    /// Renders the textual form `n=<arity> tt=0x<hex>` with the hex string
    /// zero-padded to `ceil(2^arity / 4)` digits.
    pub fn to_text(&self) -> String {
        let digits = (1usize << self.arity).div_ceil(4);
        let mut hex = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nibble = (self.words[d / 16] >> ((d % 16) * 4)) & 0xf;
            hex.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        format!("n={} tt=0x{}", self.arity, hex)
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "BooleanFunction({})", self.to_text())
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&self.to_text())
    }
}

impl Serialize for BooleanFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for BooleanFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        BooleanFunction::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> BooleanFunction {
        BooleanFunction::make_and(2, &[-1, -1], -1)
    }

    #[test]
    fn test_and2_table_and_text() {
        let f = and2();
        assert_eq!(f.to_text(), "n=2 tt=0x8");
        assert_eq!(f.eval_point(&[-1, -1]), -1);
        assert_eq!(f.eval_point(&[-1, 1]), 1);
        assert_eq!(f.eval_point(&[1, -1]), 1);
        assert_eq!(f.eval_point(&[1, 1]), 1);
    }

    #[test]
    fn test_xor2_table() {
        assert_eq!(BooleanFunction::make_xor(2).to_text(), "n=2 tt=0x6");
        assert_eq!(BooleanFunction::make_xor(0).to_text(), "n=0 tt=0x0");
    }

    #[test]
    fn test_or2_table() {
        let f = BooleanFunction::make_or(2, &[-1, -1], -1);
        assert_eq!(f.to_text(), "n=2 tt=0xe");
        // OR via De Morgan agrees with direct evaluation at every point.
        for u in 0..4 {
            let x1: Sign = if u & 1 == 1 { -1 } else { 1 };
            let x2: Sign = if u & 2 == 2 { -1 } else { 1 };
            let expected = if x1 == -1 || x2 == -1 { -1 } else { 1 };
            assert_eq!(f.eval(u), expected);
        }
    }

    #[test]
    fn test_dictator_tables() {
        assert_eq!(BooleanFunction::make_dictator(3, 2, -1).to_text(), "n=3 tt=0x33");
        assert_eq!(BooleanFunction::make_dictator(1, 1, 1).to_text(), "n=1 tt=0x2");
    }

    #[test]
    fn test_parse_round_trip_and_padding() {
        for text in ["n=0 tt=0x1", "n=1 tt=0x2", "n=2 tt=0x8", "n=3 tt=0x96", "n=5 tt=0x0000ffff"] {
            let f = BooleanFunction::parse(text).unwrap();
            assert_eq!(f.to_text(), text);
        }
    }

    #[test]
    fn test_parse_rejects_malformed_input() {
        for bad in [
            "",
            "n=2",
            "n=2 tt=8",
            "n=2 tt=0x08",  // over-padded
            "n=3 tt=0x9",   // under-padded
            "n=1 tt=0x4",   // bit beyond 2^1 points
            "n=2 tt=0xg",
            "n=x tt=0x8",
            "n=2 tt=0x8 junk",
        ] {
            assert!(BooleanFunction::parse(bad).is_err(), "accepted {bad:?}");
        }
        assert!(matches!(
            BooleanFunction::parse("n=30 tt=0x0"),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn test_dep_and_degree() {
        assert_eq!(and2().dep(), vec![1, 2]);
        assert_eq!(and2().degree(), 2);
        assert_eq!(BooleanFunction::make_xor(3).degree(), 3);
        assert_eq!(BooleanFunction::make_dictator(4, 3, -1).dep(), vec![3]);
        assert_eq!(BooleanFunction::make_dictator(4, 3, -1).degree(), 1);
        assert_eq!(BooleanFunction::make_const(3, 1).dep(), Vec::<usize>::new());
        assert_eq!(BooleanFunction::make_const(3, 1).degree(), 0);
    }

    #[test]
    fn test_depends_on_matches_naive_flip_test() {
        // Exercise both the sub-word and the cross-word code paths.
        for arity in [3usize, 7, 8] {
            let f = BooleanFunction::from_fn(arity, |u| {
                // An arbitrary but fixed function with mixed dependencies:
                // ignores the middle coordinate.
                let mid = arity / 2;
                let masked = u & !(1 << mid);
                if (masked.wrapping_mul(2654435761) >> 7) & 1 == 1 {
                    -1
                } else {
                    1
                }
            });
            for i in 1..=arity {
                let naive = (0..f.num_points()).any(|u| {
                    u & (1 << (i - 1)) == 0 && f.eval(u) != f.eval(u | (1 << (i - 1)))
                });
                assert_eq!(f.depends_on(i), naive, "arity {arity} coordinate {i}");
            }
        }
    }

    #[test]
    fn test_is_constant() {
        assert_eq!(BooleanFunction::make_const(3, -1).is_constant(), Some(-1));
        assert_eq!(BooleanFunction::make_const(7, 1).is_constant(), Some(1));
        assert_eq!(BooleanFunction::make_const(7, -1).is_constant(), Some(-1));
        assert_eq!(and2().is_constant(), None);
    }

    #[test]
    fn test_dictator_form() {
        assert_eq!(
            BooleanFunction::make_dictator(3, 2, -1).dictator_form(),
            Some((2, -1))
        );
        assert_eq!(
            BooleanFunction::make_dictator(5, 5, 1).dictator_form(),
            Some((5, 1))
        );
        assert_eq!(and2().dictator_form(), None);
        assert_eq!(BooleanFunction::make_const(2, 1).dictator_form(), None);
    }

    #[test]
    fn test_restrict_and2() {
        let f = and2();
        assert_eq!(f.restrict(2, -1).to_text(), "n=1 tt=0x2"); // x_1
        assert_eq!(f.restrict(2, 1).to_text(), "n=1 tt=0x0"); // constant +1
        assert_eq!(f.restrict(1, -1).to_text(), "n=1 tt=0x2"); // x_2 (renumbered)
    }

    #[test]
    fn test_restrict_many_and_restricted_to() {
        let f = BooleanFunction::make_xor(4);
        let g = f.restrict_many(&[(2, -1), (4, 1)]);
        // x1 * (-1) * x3 * 1 = -x1*x3
        assert_eq!(g.arity(), 2);
        assert_eq!(g.eval_point(&[1, 1]), -1);
        assert_eq!(g.eval_point(&[-1, 1]), 1);

        let d = BooleanFunction::make_dictator(4, 3, -1);
        let p = d.restricted_to(&[3]);
        assert_eq!(p.to_text(), "n=1 tt=0x1"); // -x_1 in the projected space
    }

    #[test]
    fn test_lift_inverts_restricted_to() {
        let f = BooleanFunction::from_fn(2, |u| if u == 3 { -1 } else { 1 });
        let lifted = f.lift(5, &[2, 4]);
        assert_eq!(lifted.dep(), vec![2, 4]);
        assert_eq!(lifted.restricted_to(&[2, 4]), f);
    }

    #[test]
    fn test_compose_input_flips() {
        let f = and2();
        assert_eq!(f.compose_input_flips(0b01).to_text(), "n=2 tt=0x4");
        assert_eq!(f.compose_input_flips(0b11).compose_input_flips(0b11), f);
    }

    #[test]
    fn test_negate() {
        let f = and2();
        assert_eq!(f.negate().to_text(), "n=2 tt=0x7");
        assert_eq!(f.negate().negate(), f);
        let g = BooleanFunction::make_xor(7);
        assert_eq!(g.negate().negate(), g);
    }

    #[test]
    fn test_serde_as_text() {
        let f = and2();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "\"n=2 tt=0x8\"");
        let back: BooleanFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
