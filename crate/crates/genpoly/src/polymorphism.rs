//! Generalized polymorphism instances and the two independent checkers for
//! their defining identity.
//!
//! An instance is a tuple `f_0, ..., f_m : {-1,1}^n -> {-1,1}` and
//! `g_0, ..., g_n : {-1,1}^m -> {-1,1}`. It is a *generalized polymorphism*
//! when, for every `n x m` matrix `z` over `{-1,1}`,
//!
//! ```text
//! f_0( g_1(row 1 of z), ..., g_n(row n of z) )
//!   = g_0( f_1(column 1 of z), ..., f_m(column m of z) ).
//! ```
//!
//! Grid entries are packed into an integer with `z_{i,j}` at bit
//! `(i-1)*m + (j-1)`, so a row is a contiguous bit group and a column is a
//! strided one.
//!
//! # Key operations
//!
//! * [`check_pointwise`]: brute-force evaluation over all `2^{n*m}` grids
//!   (limited by [`MAX_GRID_BITS`]);
//! * [`check_fourier`]: composes both sides as exact multilinear
//!   polynomials and compares coefficients — a genuinely independent route
//!   that never enumerates grid points;
//! * [`compute_z0`]: the interaction set `Z_0` of (row, column) pairs, with
//!   a consistency check between its two equivalent descriptions;
//! * [`partition_blocks`]: connected components of `Z_0`;
//! * [`balanced_reduction`] and [`verify_support_propagation`]: the
//!   mean-removing change of variables and the support product rule it
//!   enables.
//!
//! The instance text format is a header `n=<n> m=<m>` followed by one line
//! per function, `f0 ... fm` then `g0 ... gn`, each carrying the function's
//! own `n=<arity> tt=0x<hex>` form.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::boolean_fn::BooleanFunction;
use crate::error::{Error, Result};
use crate::fourier::{MultilinearPoly, Rational};

/// Exhaustive grid evaluation is limited to `n*m` of at most this many bits.
pub const MAX_GRID_BITS: usize = 25;

/// A tuple of Boolean functions in the shape of the defining identity.
/// Whether it actually satisfies the identity is what the checkers decide.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolymorphismInstance {
    n: usize,
    m: usize,
    /// `f_0` at index 0, then `f_1, ..., f_m`; all of arity `n`.
    fs: Vec<BooleanFunction>,
    /// `g_0` at index 0, then `g_1, ..., g_n`; all of arity `m`.
    gs: Vec<BooleanFunction>,
}

impl PolymorphismInstance {
    /// Builds an instance, validating counts and arities.
    pub fn new(
        n: usize,
        m: usize,
        fs: Vec<BooleanFunction>,
        gs: Vec<BooleanFunction>,
    ) -> Result<Self> {
        if fs.len() != m + 1 {
            return Err(Error::Validation(format!(
                "expected {} f-functions (f0..f{m}), got {}",
                m + 1,
                fs.len()
            )));
        }
        if gs.len() != n + 1 {
            return Err(Error::Validation(format!(
                "expected {} g-functions (g0..g{n}), got {}",
                n + 1,
                gs.len()
            )));
        }
        for (j, f) in fs.iter().enumerate() {
            if f.arity() != n {
                return Err(Error::Validation(format!(
                    "f{j} must have arity {n}, got {}",
                    f.arity()
                )));
            }
        }
        for (i, g) in gs.iter().enumerate() {
            if g.arity() != m {
                return Err(Error::Validation(format!(
                    "g{i} must have arity {m}, got {}",
                    g.arity()
                )));
            }
        }
        Ok(PolymorphismInstance { n, m, fs, gs })
    }

    /// Number of rows (arity of the `f` side).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns (arity of the `g` side).
    pub fn m(&self) -> usize {
        self.m
    }

    /// `f_j` for `j` in `0..=m`.
    pub fn f(&self, j: usize) -> &BooleanFunction {
        &self.fs[j]
    }

    /// `g_i` for `i` in `0..=n`.
    pub fn g(&self, i: usize) -> &BooleanFunction {
        &self.gs[i]
    }

    /// The instance on the transposed grid: rows and columns, and with them
    /// the `f` and `g` families, swap places. The defining identity is
    /// symmetric under this swap.
    pub fn transpose(&self) -> Self {
        PolymorphismInstance {
            n: self.m,
            m: self.n,
            fs: self.gs.clone(),
            gs: self.fs.clone(),
        }
    }

    /// Parses the instance text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty instance text".into()))?;
        let mut tokens = header.split_whitespace();
        let n_tok = tokens.next().unwrap_or("");
        let m_tok = tokens
            .next()
            .ok_or_else(|| Error::Parse("header must be n=<n> m=<m>".into()))?;
        if tokens.next().is_some() {
            return Err(Error::Parse("unexpected tokens after instance header".into()));
        }
        let n: usize = n_tok
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected n=<n>, got {n_tok:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("invalid n in {n_tok:?}")))?;
        let m: usize = m_tok
            .strip_prefix("m=")
            .ok_or_else(|| Error::Parse(format!("expected m=<m>, got {m_tok:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("invalid m in {m_tok:?}")))?;

        let mut take = |label: String| -> Result<BooleanFunction> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing line for {label}")))?;
            let (got, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("malformed line {line:?}")))?;
            if got != label {
                return Err(Error::Parse(format!(
                    "expected function {label}, got {got}"
                )));
            }
            BooleanFunction::parse(rest)
        };
        let mut fs = Vec::with_capacity(m + 1);
        for j in 0..=m {
            fs.push(take(format!("f{j}"))?);
        }
        let mut gs = Vec::with_capacity(n + 1);
        for i in 0..=n {
            gs.push(take(format!("g{i}"))?);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
        }
        Self::new(n, m, fs, gs)
    }

    /// Renders the instance text format (inverse of [`Self::parse`]).
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} m={}\n", self.n, self.m);
        for (j, f) in self.fs.iter().enumerate() {
            out.push_str(&format!("f{j} {}\n", f.to_text()));
        }
        for (i, g) in self.gs.iter().enumerate() {
            out.push_str(&format!("g{i} {}\n", g.to_text()));
        }
        out
    }
}

/// Extracts row `i` (1-based) of a packed grid as an `m`-bit integer.
#[inline]
pub fn grid_row(z: u64, i: usize, m: usize) -> u32 {
    ((z >> ((i - 1) * m)) & ((1u64 << m) - 1)) as u32
}

/// Extracts column `j` (1-based) of a packed grid as an `n`-bit integer.
#[inline]
pub fn grid_col(z: u64, j: usize, n: usize, m: usize) -> u32 {
    let mut u = 0u32;
    for i in 0..n {
        u |= (((z >> (i * m + (j - 1))) & 1) as u32) << i;
    }
    u
}

#[inline]
fn holds_at(p: &PolymorphismInstance, z: u64) -> bool {
    let (n, m) = (p.n, p.m);
    let mut fin = 0u32;
    for i in 1..=n {
        if p.gs[i].bit(grid_row(z, i, m)) {
            fin |= 1 << (i - 1);
        }
    }
    let mut gin = 0u32;
    for j in 1..=m {
        if p.fs[j].bit(grid_col(z, j, n, m)) {
            gin |= 1 << (j - 1);
        }
    }
    p.fs[0].bit(fin) == p.gs[0].bit(gin)
}

/// Checks the defining identity by evaluating both sides on every grid.
/// Requires `n*m <= MAX_GRID_BITS`.
pub fn check_pointwise(p: &PolymorphismInstance) -> Result<bool> {
    let bits = p.n * p.m;
    if bits > MAX_GRID_BITS {
        return Err(Error::Resource(format!(
            "grid has {bits} cells; exhaustive checking is limited to {MAX_GRID_BITS}"
        )));
    }
    let total = 1u64 << bits;
    if bits >= 20 {
        Ok((0..total).into_par_iter().all(|z| holds_at(p, z)))
    } else {
        Ok((0..total).all(|z| holds_at(p, z)))
    }
}

/// Checks the defining identity by composing both sides as exact
/// multilinear polynomials over the rationals and comparing coefficients.
/// Requires `n*m` to fit the polynomial mask width (32 variables).
pub fn check_fourier(p: &PolymorphismInstance) -> Result<bool> {
    let lhs = MultilinearPoly::compose(
        &MultilinearPoly::expand(&p.fs[0]),
        &p.gs[1..].iter().map(MultilinearPoly::expand).collect::<Vec<_>>(),
    )?;
    let rhs_transposed = MultilinearPoly::compose(
        &MultilinearPoly::expand(&p.gs[0]),
        &p.fs[1..].iter().map(MultilinearPoly::expand).collect::<Vec<_>>(),
    )?;
    // The g-side composition lives on the transposed (m rows, n columns)
    // grid; bring it to the f-side indexing before comparing.
    Ok(lhs == rhs_transposed.transpose_grid(p.m, p.n))
}

/// Checks the defining identity with whichever routine applies: the
/// exhaustive pointwise scan when the grid fits its budget, the Fourier
/// composition otherwise.
pub fn check_auto(p: &PolymorphismInstance) -> Result<bool> {
    if p.n() * p.m() <= MAX_GRID_BITS {
        check_pointwise(p)
    } else {
        check_fourier(p)
    }
}

/// The interaction set: cell `(i,j)` is active when `g_i` depends on `y_j`
/// inside the composition. Computed from both of its equivalent
/// descriptions —
///
/// * rows: `{(i,j) : i in dep(f_0), j in dep(g_i)}`,
/// * columns: `{(i,j) : j in dep(g_0), i in dep(f_j)}` —
///
/// which coincide whenever `f_0, g_0` depend on all their coordinates and
/// all inner functions are non-constant (as in reduced instances). A
/// mismatch is reported as an internal-inconsistency error.
pub fn compute_z0(p: &PolymorphismInstance) -> Result<Vec<(usize, usize)>> {
    let mut by_rows = Vec::new();
    for i in p.fs[0].dep() {
        for j in p.gs[i].dep() {
            by_rows.push((i, j));
        }
    }
    let mut by_cols = Vec::new();
    for j in p.gs[0].dep() {
        for i in p.fs[j].dep() {
            by_cols.push((i, j));
        }
    }
    by_rows.sort_unstable();
    by_cols.sort_unstable();
    if by_rows != by_cols {
        return Err(Error::Internal(format!(
            "interaction-set descriptions disagree: rows give {by_rows:?}, columns give {by_cols:?}"
        )));
    }
    Ok(by_rows)
}

/// One connected component of the interaction set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Cells of the component, sorted lexicographically.
    pub cells: Vec<(usize, usize)>,
    /// Rows meeting the component, ascending.
    pub rows: Vec<usize>,
    /// Columns meeting the component, ascending.
    pub cols: Vec<usize>,
    /// Rows with exactly one cell (dictator rows), ascending.
    pub rows1: Vec<usize>,
    /// Rows with at least two cells, ascending.
    pub rows2: Vec<usize>,
    /// Columns with exactly one cell (dictator columns), ascending.
    pub cols1: Vec<usize>,
    /// Columns with at least two cells, ascending.
    pub cols2: Vec<usize>,
    /// Cells lying in `rows2 x cols2`, sorted lexicographically.
    pub z2_cells: Vec<(usize, usize)>,
}

/// Partitions an interaction set into connected components (blocks), where
/// two cells are adjacent when they share a row or a column. Blocks are
/// ordered by their smallest cell.
pub fn partition_blocks(z0: &[(usize, usize)]) -> Vec<Block> {
    let cells: Vec<(usize, usize)> = {
        let mut c = z0.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    // Union-find over cell indices via shared rows/columns.
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut row_first: BTreeMap<usize, usize> = BTreeMap::new();
    let mut col_first: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, &(i, j)) in cells.iter().enumerate() {
        if let Some(&other) = row_first.get(&i) {
            let (a, b) = (find(&mut parent, idx), find(&mut parent, other));
            parent[a] = b;
        } else {
            row_first.insert(i, idx);
        }
        if let Some(&other) = col_first.get(&j) {
            let (a, b) = (find(&mut parent, idx), find(&mut parent, other));
            parent[a] = b;
        } else {
            col_first.insert(j, idx);
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (idx, &cell) in cells.iter().enumerate() {
        let root = find(&mut parent, idx);
        groups.entry(root).or_default().push(cell);
    }
    let mut blocks: Vec<Block> = groups.into_values().map(make_block).collect();
    blocks.sort_by_key(|b| b.cells[0]);
    blocks
}

fn make_block(mut cells: Vec<(usize, usize)>) -> Block {
    cells.sort_unstable();
    let mut row_count: BTreeMap<usize, usize> = BTreeMap::new();
    let mut col_count: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, j) in &cells {
        *row_count.entry(i).or_default() += 1;
        *col_count.entry(j).or_default() += 1;
    }
    let rows: Vec<usize> = row_count.keys().copied().collect();
    let cols: Vec<usize> = col_count.keys().copied().collect();
    let rows1: Vec<usize> = row_count
        .iter()
        .filter(|&(_, &c)| c == 1)
        .map(|(&i, _)| i)
        .collect();
    let rows2: Vec<usize> = row_count
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&i, _)| i)
        .collect();
    let cols1: Vec<usize> = col_count
        .iter()
        .filter(|&(_, &c)| c == 1)
        .map(|(&j, _)| j)
        .collect();
    let cols2: Vec<usize> = col_count
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&j, _)| j)
        .collect();
    let z2_cells: Vec<(usize, usize)> = cells
        .iter()
        .copied()
        .filter(|&(i, j)| rows2.binary_search(&i).is_ok() && cols2.binary_search(&j).is_ok())
        .collect();
    Block {
        cells,
        rows,
        cols,
        rows1,
        rows2,
        cols1,
        cols2,
        z2_cells,
    }
}

/// The mean-removing change of variables. The inner polynomials are the
/// expansions of `f_j` and `g_i` with their means removed, and the outer
/// polynomials absorb those means:
///
/// * `g0_poly(y) = g_0(y_1 + mean(f_1), ..., y_m + mean(f_m))`,
/// * `f0_poly(x) = f_0(x_1 + mean(g_1), ..., x_n + mean(g_n))`,
///
/// so that composing `f0_poly` with the balanced `g`'s equals composing the
/// original expansions, and likewise on the other side.
#[derive(Clone, Debug)]
pub struct BalancedSystem {
    /// Rows of the grid.
    pub n: usize,
    /// Columns of the grid.
    pub m: usize,
    /// Outer polynomial absorbing the `g` means.
    pub f0: MultilinearPoly,
    /// Balanced `f_1, ..., f_m` (index `j - 1`).
    pub f: Vec<MultilinearPoly>,
    /// Outer polynomial absorbing the `f` means.
    pub g0: MultilinearPoly,
    /// Balanced `g_1, ..., g_n` (index `i - 1`).
    pub g: Vec<MultilinearPoly>,
}

impl BalancedSystem {
    /// The system for the transposed instance: the defining identity is
    /// symmetric, so swapping the two families swaps the roles exactly.
    pub fn transpose(&self) -> Self {
        BalancedSystem {
            n: self.m,
            m: self.n,
            f0: self.g0.clone(),
            f: self.g.clone(),
            g0: self.f0.clone(),
            g: self.f.clone(),
        }
    }
}

/// Computes the mean-removing change of variables for an instance.
pub fn balanced_reduction(p: &PolymorphismInstance) -> BalancedSystem {
    let f_polys: Vec<MultilinearPoly> = p.fs.iter().map(MultilinearPoly::expand).collect();
    let g_polys: Vec<MultilinearPoly> = p.gs.iter().map(MultilinearPoly::expand).collect();
    let f_means: Vec<Rational> = f_polys[1..].iter().map(|q| q.mean()).collect();
    let g_means: Vec<Rational> = g_polys[1..].iter().map(|q| q.mean()).collect();
    BalancedSystem {
        n: p.n,
        m: p.m,
        f0: f_polys[0].shift(&g_means),
        f: f_polys[1..].iter().map(|q| q.balance().0).collect(),
        g0: g_polys[0].shift(&f_means),
        g: g_polys[1..].iter().map(|q| q.balance().0).collect(),
    }
}

/// Result of one application of the support product rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportPropagation {
    /// The union `T` of the chosen column sets; a support set of the outer
    /// `g` polynomial.
    pub t: u32,
    /// For every column `j` of `T`, the set `V_j` of chosen rows whose
    /// column set contains `j`; a support set of `f_j`.
    pub v_sets: BTreeMap<usize, u32>,
}

/// Applies the support product rule to a balanced system.
///
/// Given `S` in the support of the outer `f` polynomial and, for every row
/// `i` of `S`, a set `U_i` in the support of the balanced `g_i`, the union
/// `T` of the `U_i` must appear in the support of the outer `g` polynomial,
/// and for every column `j` of `T` the set `V_j = {i in S : j in U_i}` must
/// appear in the support of the balanced `f_j`. Moreover the coefficients
/// match exactly:
///
/// ```text
/// f0hat(S) * prod_{i in S} gihat(U_i) = g0hat(T) * prod_{j in T} fjhat(V_j)
/// ```
///
/// All of this is verified; `u_sets` maps each row of `S` (1-based) to its
/// `U_i`. Violations of the preconditions or — for tuples that are not
/// generalized polymorphisms — of the conclusions yield validation errors.
pub fn verify_support_propagation(
    sys: &BalancedSystem,
    s: u32,
    u_sets: &BTreeMap<usize, u32>,
) -> Result<SupportPropagation> {
    if !sys.f0.support().contains(&s) {
        return Err(Error::Validation(format!(
            "S=0x{s:x} is not in the support of the outer f polynomial"
        )));
    }
    let s_rows: Vec<usize> = (1..=sys.n).filter(|&i| s & (1 << (i - 1)) != 0).collect();
    if u_sets.keys().copied().collect::<Vec<_>>() != s_rows {
        return Err(Error::Validation(
            "u_sets must contain exactly the rows of S".into(),
        ));
    }
    for (&i, &u) in u_sets {
        if !sys.g[i - 1].support().contains(&u) {
            return Err(Error::Validation(format!(
                "U_{i}=0x{u:x} is not in the support of balanced g_{i}"
            )));
        }
    }

    let t = u_sets.values().fold(0u32, |acc, &u| acc | u);
    let mut v_sets: BTreeMap<usize, u32> = BTreeMap::new();
    for j in 1..=sys.m {
        if t & (1 << (j - 1)) == 0 {
            continue;
        }
        let v = u_sets
            .iter()
            .filter(|&(_, &u)| u & (1 << (j - 1)) != 0)
            .fold(0u32, |acc, (&i, _)| acc | (1 << (i - 1)));
        v_sets.insert(j, v);
    }

    if !sys.g0.support().contains(&t) {
        return Err(Error::Validation(format!(
            "propagated set T=0x{t:x} is missing from the outer g support; \
             the tuple cannot be a generalized polymorphism"
        )));
    }
    for (&j, &v) in &v_sets {
        if !sys.f[j - 1].support().contains(&v) {
            return Err(Error::Validation(format!(
                "propagated set V_{j}=0x{v:x} is missing from the support of balanced f_{j}; \
                 the tuple cannot be a generalized polymorphism"
            )));
        }
    }

    // Exact coefficient identity.
    let mut lhs = sys.f0.coeff(s);
    for (&i, &u) in u_sets {
        lhs *= sys.g[i - 1].coeff(u);
    }
    let mut rhs = sys.g0.coeff(t);
    for (&j, &v) in &v_sets {
        rhs *= sys.f[j - 1].coeff(v);
    }
    if lhs != rhs {
        return Err(Error::Validation(format!(
            "coefficient identity fails: left product {lhs}, right product {rhs}"
        )));
    }
    Ok(SupportPropagation { t, v_sets })
}
