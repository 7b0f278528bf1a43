//! Seeded generation of generalized polymorphisms from random canonical
//! forms, plus an exact-arithmetic generator for the degree-two
//! multilinear family.
//!
//! # Key operations
//!
//! * [`sample_params`] draws a random [`CanonicalForm`] for a requested
//!   grid size and [`Profile`]; the draw is a pure function of the seed.
//! * [`generate`] turns sampled parameters into a function tuple via
//!   [`reconstruct`] and confirms the defining identity.
//! * [`generate_deg2_multilinear`] builds the rational multilinear family
//!   `f_j = A_j * prod (x_i + kappa_ij) + B_j`,
//!   `g_i = C_i * prod (y_j + kappa_ij) + D_i`, with outer functions given
//!   by a multilinear combiner applied to per-block products; both
//!   compositions collapse to the same polynomial in the grid variables,
//!   `sum_K h(K) * prod_{l in K} prod_{(i,j) in Z_l} (z_ij + kappa_ij)`,
//!   which is returned alongside the tuple for exact verification.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolean_fn::{BooleanFunction, Sign, MAX_ARITY};
use crate::classifier::{
    reconstruct, BlockClass, CanonicalBlock, CanonicalForm, DegenerateLedger, IndicatorFunction,
    KappaEntry, SubFunction,
};
use crate::error::{Error, Result};
use crate::fourier::{MultilinearPoly, Rational, MAX_POLY_ARITY};
use crate::polymorphism::{check_auto, partition_blocks, PolymorphismInstance};

/// What kind of instance to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Every block is XOR-shaped; when the grid allows it, every inner
    /// function reads at least two coordinates (pure signed parities).
    XorOnly,
    /// Every block is AND/OR-shaped; when the grid allows it, every inner
    /// function reads at least two coordinates.
    AndOrOnly,
    /// Random mixture of block shapes.
    Mixed,
    /// Like `Mixed`, but with a guaranteed lone-cell block (dictators)
    /// whenever the grid has room for one.
    WithDictators,
    /// Like `Mixed`, but with constant and ignored inner functions and
    /// random off-slice outer values.
    WithDegenerates,
}

/// A sampled generator input: the seed and profile it came from plus the
/// canonical form to reconstruct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    /// Seed the form was drawn from.
    pub seed: u64,
    /// Profile the form was drawn for.
    pub profile: Profile,
    /// The canonical form to build.
    pub form: CanonicalForm,
}

fn random_table(rng: &mut ChaCha8Rng, arity: usize) -> BooleanFunction {
    BooleanFunction::from_fn(arity, |_| if rng.gen_bool(0.5) { -1 } else { 1 })
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        -1
    } else {
        1
    }
}

/// A uniformly random table conditioned on depending on every coordinate;
/// falls back to a signed parity (always fully dependent) if rejection
/// sampling runs long.
fn random_full_dep(rng: &mut ChaCha8Rng, arity: usize) -> BooleanFunction {
    for _ in 0..200 {
        let t = random_table(rng, arity);
        if t.dep().len() == arity {
            return t;
        }
    }
    let parity = BooleanFunction::make_xor(arity);
    if random_sign(rng) == -1 {
        parity.negate()
    } else {
        parity
    }
}

/// A random `{0,1}` indicator that depends on every coordinate and selects
/// at least one point; falls back to a single random selected point.
fn random_indicator(rng: &mut ChaCha8Rng, arity: usize) -> BooleanFunction {
    for _ in 0..200 {
        let t = random_table(rng, arity);
        if t.dep().len() == arity && t.is_constant() != Some(1) {
            return t;
        }
    }
    let mut t = BooleanFunction::new_false(arity);
    t.set(rng.gen_range(0..t.num_points()), -1);
    t
}

fn random_nonconstant(rng: &mut ChaCha8Rng, arity: usize) -> BooleanFunction {
    loop {
        let t = random_table(rng, arity);
        if t.is_constant().is_none() {
            return t;
        }
    }
}

/// Splits `items` (shuffled in place) into `k` groups of at least
/// `min_size` each, distributing the remainder randomly.
fn random_partition(
    rng: &mut ChaCha8Rng,
    mut items: Vec<usize>,
    k: usize,
    min_size: usize,
) -> Vec<Vec<usize>> {
    for idx in (1..items.len()).rev() {
        let other = rng.gen_range(0..=idx);
        items.swap(idx, other);
    }
    let mut sizes = vec![min_size; k];
    let mut rest = items.len() - min_size * k;
    while rest > 0 {
        let idx = rng.gen_range(0..k);
        sizes[idx] += 1;
        rest -= 1;
    }
    let mut groups = Vec::with_capacity(k);
    let mut start = 0;
    for size in sizes {
        let mut group: Vec<usize> = items[start..start + size].to_vec();
        group.sort_unstable();
        groups.push(group);
        start += size;
    }
    groups
}

/// Samples a connected cell pattern on `rows x cols` with at least
/// `min_line` cells in every row and column; falls back to the full grid.
fn sample_block_cells(
    rng: &mut ChaCha8Rng,
    rows: &[usize],
    cols: &[usize],
    min_line: usize,
) -> Vec<(usize, usize)> {
    if rows.len() == 1 && cols.len() == 1 {
        return vec![(rows[0], cols[0])];
    }
    'attempts: for _ in 0..200 {
        let mut cells = Vec::new();
        for &i in rows {
            for &j in cols {
                if rng.gen_bool(0.6) {
                    cells.push((i, j));
                }
            }
        }
        for &i in rows {
            if cells.iter().filter(|&&(r, _)| r == i).count() < min_line {
                continue 'attempts;
            }
        }
        for &j in cols {
            if cells.iter().filter(|&&(_, c)| c == j).count() < min_line {
                continue 'attempts;
            }
        }
        if partition_blocks(&cells).len() == 1 {
            return cells;
        }
    }
    let mut cells = Vec::new();
    for &i in rows {
        for &j in cols {
            cells.push((i, j));
        }
    }
    cells
}

fn geometry_split(cells: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut row_count: BTreeMap<usize, usize> = BTreeMap::new();
    let mut col_count: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, j) in cells {
        *row_count.entry(i).or_default() += 1;
        *col_count.entry(j).or_default() += 1;
    }
    let pick = |counts: &BTreeMap<usize, usize>, single: bool| {
        counts
            .iter()
            .filter(|&(_, &c)| (c == 1) == single)
            .map(|(&x, _)| x)
            .collect::<Vec<_>>()
    };
    (
        pick(&row_count, true),
        pick(&row_count, false),
        pick(&col_count, true),
        pick(&col_count, false),
    )
}

fn sample_block_class(
    rng: &mut ChaCha8Rng,
    cells: &[(usize, usize)],
    profile: Profile,
) -> BlockClass {
    let (rows1, rows2, cols1, cols2) = geometry_split(cells);
    if cells.len() == 1 {
        let (i, j) = cells[0];
        return BlockClass::Singleton {
            i,
            j,
            sgn_f: random_sign(rng),
            sgn_g: random_sign(rng),
        };
    }
    let xor = match profile {
        Profile::XorOnly => true,
        Profile::AndOrOnly => false,
        _ => rng.gen_bool(0.5),
    };
    let rows: Vec<usize> = rows1.iter().chain(&rows2).copied().collect();
    let cols: Vec<usize> = cols1.iter().chain(&cols2).copied().collect();
    let row_cells = |i: usize| -> Vec<usize> {
        cells
            .iter()
            .filter(|&&(r, _)| r == i)
            .map(|&(_, j)| j)
            .collect()
    };
    let col_cells = |j: usize| -> Vec<usize> {
        cells
            .iter()
            .filter(|&&(_, c)| c == j)
            .map(|&(i, _)| i)
            .collect()
    };
    if xor {
        let mut gamma = BTreeMap::new();
        for i in rows.iter().copied().collect::<std::collections::BTreeSet<_>>() {
            let domain: Vec<usize> = row_cells(i)
                .into_iter()
                .filter(|j| cols1.contains(j))
                .collect();
            let table = random_full_dep(rng, domain.len());
            gamma.insert(i, SubFunction { domain, table });
        }
        let mut phi = BTreeMap::new();
        for j in cols.iter().copied().collect::<std::collections::BTreeSet<_>>() {
            let domain: Vec<usize> = col_cells(j)
                .into_iter()
                .filter(|i| rows1.contains(i))
                .collect();
            let table = random_full_dep(rng, domain.len());
            phi.insert(j, SubFunction { domain, table });
        }
        BlockClass::XorLike { gamma, phi }
    } else {
        let mut d = BTreeMap::new();
        let mut gamma01 = BTreeMap::new();
        for &i in &rows2 {
            d.insert(i, random_sign(rng));
            let domain: Vec<usize> = row_cells(i)
                .into_iter()
                .filter(|j| cols1.contains(j))
                .collect();
            let table = random_indicator(rng, domain.len());
            gamma01.insert(i, IndicatorFunction { domain, table });
        }
        let mut b = BTreeMap::new();
        let mut phi01 = BTreeMap::new();
        for &j in &cols2 {
            b.insert(j, random_sign(rng));
            let domain: Vec<usize> = col_cells(j)
                .into_iter()
                .filter(|i| rows1.contains(i))
                .collect();
            let table = random_indicator(rng, domain.len());
            phi01.insert(j, IndicatorFunction { domain, table });
        }
        let kappa = cells
            .iter()
            .filter(|&&(i, j)| rows2.contains(&i) && cols2.contains(&j))
            .map(|&(i, j)| KappaEntry {
                i,
                j,
                sign: random_sign(rng),
            })
            .collect();
        let row_sign = rows1.iter().map(|&i| (i, random_sign(rng))).collect();
        let col_sign = cols1.iter().map(|&j| (j, random_sign(rng))).collect();
        BlockClass::AndOrLike {
            d,
            gamma01,
            b,
            phi01,
            kappa,
            row_sign,
            col_sign,
        }
    }
}

/// Draws a random canonical form for an `n x m` grid under the given
/// profile. The same seed always produces the same form.
pub fn sample_params(seed: u64, n: usize, m: usize, profile: Profile) -> Result<GenParams> {
    if n == 0 || m == 0 {
        return Err(Error::Validation(
            "generation needs at least one row and one column".into(),
        ));
    }
    if n > MAX_ARITY || m > MAX_ARITY {
        return Err(Error::Resource(format!(
            "grid {n} x {m} exceeds the supported arity {MAX_ARITY}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Degenerate carving.
    let mut constant_g: BTreeMap<usize, Sign> = BTreeMap::new();
    let mut constant_f: BTreeMap<usize, Sign> = BTreeMap::new();
    let mut free_rows: Vec<usize> = Vec::new();
    let mut free_cols: Vec<usize> = Vec::new();
    let mut active_rows: Vec<usize> = Vec::new();
    let mut active_cols: Vec<usize> = Vec::new();
    if profile == Profile::WithDegenerates {
        for i in 1..=n {
            match rng.gen_range(0..10) {
                0 | 1 => {
                    constant_g.insert(i, random_sign(&mut rng));
                }
                2 => free_rows.push(i),
                _ => active_rows.push(i),
            }
        }
        for j in 1..=m {
            match rng.gen_range(0..10) {
                0 | 1 => {
                    constant_f.insert(j, random_sign(&mut rng));
                }
                2 => free_cols.push(j),
                _ => active_cols.push(j),
            }
        }
        if constant_g.is_empty() && constant_f.is_empty() {
            // The profile promises at least one constant inner function.
            let i = rng.gen_range(1..=n);
            active_rows.retain(|&r| r != i);
            free_rows.retain(|&r| r != i);
            constant_g.insert(i, random_sign(&mut rng));
        }
        // An empty side forces the other side empty too (no blocks).
        if active_rows.is_empty() {
            free_cols.append(&mut active_cols);
            free_cols.sort_unstable();
        }
        if active_cols.is_empty() {
            free_rows.append(&mut active_rows);
            free_rows.sort_unstable();
        }
    } else {
        active_rows = (1..=n).collect();
        active_cols = (1..=m).collect();
    }

    // Blocks over the active grid.
    let mut blocks: Vec<CanonicalBlock> = Vec::new();
    let h;
    if active_rows.is_empty() {
        h = random_table(&mut rng, 0);
    } else {
        // Pure profiles force every line of every block to carry at least
        // two cells, which needs at least two rows and columns per block.
        let enforce2 = matches!(profile, Profile::XorOnly | Profile::AndOrOnly)
            && active_rows.len() >= 2
            && active_cols.len() >= 2;
        let min_group = if enforce2 { 2 } else { 1 };
        let kmax = (active_rows.len() / min_group)
            .min(active_cols.len() / min_group)
            .max(1);
        let mut k = rng.gen_range(1..=kmax);
        let dictator_block = profile == Profile::WithDictators && kmax >= 2;
        if dictator_block && k < 2 {
            k = 2;
        }
        let (row_groups, col_groups) = if dictator_block {
            // Reserve one row and one column for a guaranteed lone cell.
            let mut rows = active_rows.clone();
            let mut cols = active_cols.clone();
            let lone_row = rows.remove(rng.gen_range(0..rows.len()));
            let lone_col = cols.remove(rng.gen_range(0..cols.len()));
            let mut rg = random_partition(&mut rng, rows, k - 1, 1);
            let mut cg = random_partition(&mut rng, cols, k - 1, 1);
            rg.push(vec![lone_row]);
            cg.push(vec![lone_col]);
            (rg, cg)
        } else {
            (
                random_partition(&mut rng, active_rows.clone(), k, min_group),
                random_partition(&mut rng, active_cols.clone(), k, min_group),
            )
        };
        let min_line = if enforce2 { 2 } else { 1 };
        for (rows, cols) in row_groups.iter().zip(&col_groups) {
            let line = if rows.len() >= 2 && cols.len() >= 2 {
                min_line
            } else {
                1
            };
            let cells = sample_block_cells(&mut rng, rows, cols, line);
            let class = sample_block_class(&mut rng, &cells, profile);
            let mut block_rows: Vec<usize> = cells.iter().map(|&(i, _)| i).collect();
            block_rows.sort_unstable();
            block_rows.dedup();
            let mut block_cols: Vec<usize> = cells.iter().map(|&(_, j)| j).collect();
            block_cols.sort_unstable();
            block_cols.dedup();
            blocks.push(CanonicalBlock {
                rows: block_rows,
                cols: block_cols,
                cells,
                class,
            });
        }
        blocks.sort_by_key(|cb| cb.cells[0]);
        h = random_full_dep(&mut rng, blocks.len());
    }

    // Rows and columns actually covered by blocks (cells may miss some of
    // the group's lines only when the fallback grid was not needed; the
    // sampling keeps every line populated, so coverage equals the groups).
    let rows_reduced: Vec<usize> = {
        let mut v: Vec<usize> = blocks.iter().flat_map(|cb| cb.rows.clone()).collect();
        v.sort_unstable();
        v
    };
    let cols_reduced: Vec<usize> = {
        let mut v: Vec<usize> = blocks.iter().flat_map(|cb| cb.cols.clone()).collect();
        v.sort_unstable();
        v
    };

    let free_g: BTreeMap<usize, BooleanFunction> = free_rows
        .iter()
        .map(|&i| (i, random_nonconstant(&mut rng, m)))
        .collect();
    let free_f: BTreeMap<usize, BooleanFunction> = free_cols
        .iter()
        .map(|&j| (j, random_nonconstant(&mut rng, n)))
        .collect();
    let f0_table = (!constant_g.is_empty()).then(|| random_table(&mut rng, n));
    let g0_table = (!constant_f.is_empty()).then(|| random_table(&mut rng, m));

    let form = CanonicalForm {
        n,
        m,
        rows_reduced,
        cols_reduced,
        blocks,
        h,
        ledger: DegenerateLedger {
            constant_g,
            constant_f,
            free_g,
            free_f,
            f0_table,
            g0_table,
        },
    };
    form.validate()?;
    Ok(GenParams {
        seed,
        profile,
        form,
    })
}

/// Builds the instance described by sampled parameters and confirms the
/// defining identity.
pub fn generate(params: &GenParams) -> Result<PolymorphismInstance> {
    let p = reconstruct(&params.form)?;
    if !check_auto(&p)? {
        return Err(Error::Internal(
            "generated instance violates the defining identity".into(),
        ));
    }
    Ok(p)
}

/// Parameters for the degree-two multilinear family. Rows and columns are
/// 1-based; `cells` is the interaction set (every row and column must
/// appear), `kappa` assigns a rational to each cell, `a`/`b` assign the
/// leading factor and offset to each column's `f_j` (with `a` nonzero),
/// `c`/`d` the same to each row's `g_i`, and `h` is a multilinear combiner
/// with one input per connected component of `cells`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deg2Params {
    /// Grid rows.
    pub n: usize,
    /// Grid columns.
    pub m: usize,
    /// Interaction cells, sorted lexicographically.
    pub cells: Vec<(usize, usize)>,
    /// Leading factor of each `f_j`, nonzero.
    pub a: BTreeMap<usize, Rational>,
    /// Offset of each `f_j`.
    pub b: BTreeMap<usize, Rational>,
    /// Leading factor of each `g_i`, nonzero.
    pub c: BTreeMap<usize, Rational>,
    /// Offset of each `g_i`.
    pub d: BTreeMap<usize, Rational>,
    /// One rational per cell.
    pub kappa: BTreeMap<(usize, usize), Rational>,
    /// Multilinear combiner over the blocks.
    pub h: MultilinearPoly,
}

/// The tuple built from [`Deg2Params`], together with the polynomial both
/// compositions are guaranteed to equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deg2System {
    /// `f_0, f_1, ..., f_m`, each of arity `n`.
    pub fs: Vec<MultilinearPoly>,
    /// `g_0, g_1, ..., g_n`, each of arity `m`.
    pub gs: Vec<MultilinearPoly>,
    /// The common composition, over the grid variables `z_ij` (variable
    /// `(i-1)*m + j`).
    pub product_form: MultilinearPoly,
}

/// Builds the degree-two multilinear family:
/// `f_j = A_j * prod_{(i,j) in cells} (x_i + kappa_ij) + B_j`,
/// `g_i = C_i * prod_{(i,j) in cells} (y_j + kappa_ij) + D_i`, and outer
/// functions obtained by applying `h` to the per-block products
/// `prod_i (x_i - D_i) / C_i` respectively `prod_j (y_j - B_j) / A_j`.
/// Both compositions equal the returned `product_form` exactly.
pub fn generate_deg2_multilinear(params: &Deg2Params) -> Result<Deg2System> {
    let (n, m) = (params.n, params.m);
    if n == 0 || m == 0 {
        return Err(Error::Validation(
            "the grid needs at least one row and one column".into(),
        ));
    }
    if n.max(m) > MAX_POLY_ARITY || n * m > MAX_POLY_ARITY {
        return Err(Error::Resource(format!(
            "grid {n} x {m} needs more than {MAX_POLY_ARITY} composition variables"
        )));
    }
    if params.cells.is_empty() || !params.cells.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Validation(
            "cells must be nonempty, sorted and distinct".into(),
        ));
    }
    for &(i, j) in &params.cells {
        if i == 0 || i > n || j == 0 || j > m {
            return Err(Error::Validation(format!("cell ({i},{j}) out of range")));
        }
    }
    for i in 1..=n {
        if !params.cells.iter().any(|&(r, _)| r == i) {
            return Err(Error::Validation(format!("row {i} has no cell")));
        }
        if !params.c.contains_key(&i) || !params.d.contains_key(&i) {
            return Err(Error::Validation(format!("row {i} needs c and d values")));
        }
        if params.c[&i].is_zero() {
            return Err(Error::Validation(format!("c[{i}] must be nonzero")));
        }
    }
    for j in 1..=m {
        if !params.cells.iter().any(|&(_, c)| c == j) {
            return Err(Error::Validation(format!("column {j} has no cell")));
        }
        if !params.a.contains_key(&j) || !params.b.contains_key(&j) {
            return Err(Error::Validation(format!(
                "column {j} needs a and b values"
            )));
        }
        if params.a[&j].is_zero() {
            return Err(Error::Validation(format!("a[{j}] must be nonzero")));
        }
    }
    let cell_set: std::collections::BTreeSet<(usize, usize)> =
        params.cells.iter().copied().collect();
    if params.kappa.keys().copied().collect::<std::collections::BTreeSet<_>>() != cell_set {
        return Err(Error::Validation(
            "kappa must assign a value to each cell exactly".into(),
        ));
    }

    let blocks = partition_blocks(&params.cells);
    let k = blocks.len();
    if params.h.arity() != k {
        return Err(Error::Validation(format!(
            "the combiner must take {k} inputs, one per block"
        )));
    }

    // Inner functions.
    let mut fs = vec![MultilinearPoly::zero(n)];
    for j in 1..=m {
        let mut poly = MultilinearPoly::constant(n, params.a[&j].clone());
        for &(i, jj) in &params.cells {
            if jj == j {
                poly = poly.mul(
                    &MultilinearPoly::variable(n, i).add_constant(&params.kappa[&(i, j)]),
                );
            }
        }
        fs.push(poly.add_constant(&params.b[&j]));
    }
    let mut gs = vec![MultilinearPoly::zero(m)];
    for i in 1..=n {
        let mut poly = MultilinearPoly::constant(m, params.c[&i].clone());
        for &(ii, j) in &params.cells {
            if ii == i {
                poly = poly.mul(
                    &MultilinearPoly::variable(m, j).add_constant(&params.kappa[&(i, j)]),
                );
            }
        }
        gs.push(poly.add_constant(&params.d[&i]));
    }

    // Per-block products feeding the combiner.
    let mut p_blocks = Vec::with_capacity(k);
    let mut q_blocks = Vec::with_capacity(k);
    for block in &blocks {
        let mut p = MultilinearPoly::constant(n, Rational::one());
        let mut c_prod = Rational::one();
        for &i in &block.rows {
            p = p.mul(&MultilinearPoly::variable(n, i).add_constant(&-params.d[&i].clone()));
            c_prod *= params.c[&i].clone();
        }
        p_blocks.push(p.scale(&c_prod.recip()));
        let mut q = MultilinearPoly::constant(m, Rational::one());
        let mut a_prod = Rational::one();
        for &j in &block.cols {
            q = q.mul(&MultilinearPoly::variable(m, j).add_constant(&-params.b[&j].clone()));
            a_prod *= params.a[&j].clone();
        }
        q_blocks.push(q.scale(&a_prod.recip()));
    }
    let combine = |arity: usize, block_polys: &[MultilinearPoly]| -> MultilinearPoly {
        let mut out = MultilinearPoly::zero(arity);
        for (mask, coeff) in params.h.iter() {
            let mut term = MultilinearPoly::constant(arity, coeff.clone());
            for (idx, bp) in block_polys.iter().enumerate() {
                if (mask >> idx) & 1 == 1 {
                    term = term.mul(bp);
                }
            }
            out = out.add(&term);
        }
        out
    };
    fs[0] = combine(n, &p_blocks);
    gs[0] = combine(m, &q_blocks);

    // The common composition over the grid variables.
    let grid = n * m;
    let mut product_form = MultilinearPoly::zero(grid);
    for (mask, coeff) in params.h.iter() {
        let mut term = MultilinearPoly::constant(grid, coeff.clone());
        for (idx, block) in blocks.iter().enumerate() {
            if (mask >> idx) & 1 == 1 {
                for &(i, j) in &block.cells {
                    let var = (i - 1) * m + j;
                    term = term.mul(
                        &MultilinearPoly::variable(grid, var)
                            .add_constant(&params.kappa[&(i, j)]),
                    );
                }
            }
        }
        product_form = product_form.add(&term);
    }

    Ok(Deg2System {
        fs,
        gs,
        product_form,
    })
}
