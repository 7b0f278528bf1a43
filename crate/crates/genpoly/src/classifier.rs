//! Canonical forms: classification of generalized polymorphisms into their
//! complete structural description, and reconstruction back into function
//! tuples.
//!
//! # The canonical form
//!
//! Every generalized polymorphism decomposes as follows.
//!
//! 1. **Degenerate split.** Constant inner functions pin the corresponding
//!    coordinate of the opposite outer function; inner functions whose
//!    coordinate the (pinned) outer function ignores are completely
//!    arbitrary. Both kinds are recorded verbatim in a ledger, together
//!    with the outer tables (whose values off the pinned slice are
//!    unconstrained). What remains is a *reduced* instance whose outer
//!    functions depend on every coordinate and whose inner functions are
//!    non-constant.
//! 2. **Interaction blocks.** The reduced instance has a well-defined
//!    interaction set `Z_0` (cell `(i,j)` active when `g_i` depends on
//!    `y_j`), whose connected components split the tuple into independent
//!    blocks. Rows and columns belong to at most one block.
//! 3. **Block shapes.** Each block is one of:
//!    * `singleton` — a lone cell `(i,j)`: `f_j` and `g_i` are dictators;
//!    * `xor_like` — every `g_i` is a `{-1,1}`-valued function of its
//!      dictator columns times the parity of its other columns, and
//!      symmetrically for the `f_j`;
//!    * `and_or_like` — every non-dictator `g_i` attains a lone value
//!      `D_i` exactly on a subcube marked by signs `kappa` and an
//!      indicator over its dictator columns, and symmetrically with values
//!      `B_j` for the `f_j`; the `kappa` signs are shared between the two
//!      families.
//! 4. **Combiner.** Each block contributes one canonical `{-1,1}` factor to
//!    either side; an arbitrary Boolean combiner `h`, applied to the block
//!    factors, yields the outer functions on both sides simultaneously.
//!
//! Classification computes this data; [`reconstruct`] maps it back to the
//! exact original tuple (bit-for-bit), and [`canonicalize`] renormalizes
//! any valid form by round-tripping it through reconstruction and
//! classification. Single-row and single-column blocks admit both the XOR
//! and the AND/OR description; classification always reports such blocks as
//! `xor_like`, which is what canonicalization normalizes to.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boolean_fn::{BooleanFunction, Sign};
use crate::error::{Error, Result};
use crate::polymorphism::{
    check_auto, compute_z0, partition_blocks, Block, PolymorphismInstance,
};

/// A `{-1,1}`-valued function on an explicit list of grid coordinates.
/// Input bit `t` of `table` corresponds to coordinate `domain[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubFunction {
    /// Coordinates read by the function, 1-based, strictly ascending.
    pub domain: Vec<usize>,
    /// Truth table over the domain (bit set means value `-1`).
    pub table: BooleanFunction,
}

/// A `{0,1}`-valued indicator on an explicit list of grid coordinates.
/// Input bit `t` of `table` corresponds to coordinate `domain[t]`; a set
/// table bit means the indicator value is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorFunction {
    /// Coordinates read by the indicator, 1-based, strictly ascending.
    pub domain: Vec<usize>,
    /// Table over the domain (bit set means value `1`).
    pub table: BooleanFunction,
}

impl IndicatorFunction {
    /// Indicator value at a packed domain point.
    pub fn val01(&self, u: u32) -> u8 {
        self.table.bit(u) as u8
    }
}

/// One `kappa` sign of an `and_or_like` block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaEntry {
    /// Row of the cell.
    pub i: usize,
    /// Column of the cell.
    pub j: usize,
    /// The sign `kappa_{ij}`.
    pub sign: Sign,
}

/// The shape of one interaction block. Serialized with external tagging:
/// `{"singleton": {...}}`, `{"xor_like": {...}}`, `{"and_or_like": {...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockClass {
    /// A lone cell: `f_j = sgn_f * x_i` and `g_i = sgn_g * y_j`.
    Singleton {
        /// Row of the cell.
        i: usize,
        /// Column of the cell.
        j: usize,
        /// Sign of the dictator `f_j`.
        sgn_f: Sign,
        /// Sign of the dictator `g_i`.
        sgn_g: Sign,
    },
    /// XOR shape: `g_i = gamma_i(y restricted to its dictator columns) *
    /// parity(y over its remaining columns)`, and symmetrically
    /// `f_j = phi_j(...) * parity(...)`. Dictator rows and columns carry
    /// constant `gamma`/`phi` factors (empty domains).
    XorLike {
        /// Per block row `i`, the factor `gamma_i`.
        gamma: BTreeMap<usize, SubFunction>,
        /// Per block column `j`, the factor `phi_j`.
        phi: BTreeMap<usize, SubFunction>,
    },
    /// AND/OR shape: every non-dictator `g_i` equals `D_i` exactly when its
    /// multi-cell columns match the `kappa` signs and the indicator
    /// `gamma01_i` over its dictator columns holds, and `-D_i` otherwise;
    /// symmetrically for the `f_j` with values `B_j` and indicators
    /// `phi01_j`. Dictator rows and columns are plain signed variables.
    AndOrLike {
        /// `D_i` for every multi-cell row `i`.
        d: BTreeMap<usize, Sign>,
        /// Indicator over the dictator columns of each multi-cell row.
        gamma01: BTreeMap<usize, IndicatorFunction>,
        /// `B_j` for every multi-cell column `j`.
        b: BTreeMap<usize, Sign>,
        /// Indicator over the dictator rows of each multi-cell column.
        phi01: BTreeMap<usize, IndicatorFunction>,
        /// Shared subcube signs on cells lying in multi-cell rows and
        /// columns, sorted by cell.
        kappa: Vec<KappaEntry>,
        /// Dictator signs of single-cell rows.
        row_sign: BTreeMap<usize, Sign>,
        /// Dictator signs of single-cell columns.
        col_sign: BTreeMap<usize, Sign>,
    },
}

/// One interaction block together with its shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalBlock {
    /// Rows meeting the block, ascending.
    pub rows: Vec<usize>,
    /// Columns meeting the block, ascending.
    pub cols: Vec<usize>,
    /// Cells of the block, sorted lexicographically.
    pub cells: Vec<(usize, usize)>,
    /// The block's shape.
    pub class: BlockClass,
}

/// Verbatim record of the degenerate parts of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DegenerateLedger {
    /// Rows whose `g_i` is constant, with the constant.
    pub constant_g: BTreeMap<usize, Sign>,
    /// Columns whose `f_j` is constant, with the constant.
    pub constant_f: BTreeMap<usize, Sign>,
    /// Non-constant `g_i` that `f_0` ignores, stored verbatim.
    pub free_g: BTreeMap<usize, BooleanFunction>,
    /// Non-constant `f_j` that `g_0` ignores, stored verbatim.
    pub free_f: BTreeMap<usize, BooleanFunction>,
    /// Full `f_0` table; present exactly when `constant_g` is nonempty
    /// (only then does `f_0` have unconstrained values off the pinned
    /// slice).
    pub f0_table: Option<BooleanFunction>,
    /// Full `g_0` table; present exactly when `constant_f` is nonempty.
    pub g0_table: Option<BooleanFunction>,
}

/// The complete canonical form of a generalized polymorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Rows of the original grid.
    pub n: usize,
    /// Columns of the original grid.
    pub m: usize,
    /// Rows surviving the degenerate split, ascending.
    pub rows_reduced: Vec<usize>,
    /// Columns surviving the degenerate split, ascending.
    pub cols_reduced: Vec<usize>,
    /// Interaction blocks, ordered by smallest cell.
    pub blocks: Vec<CanonicalBlock>,
    /// Boolean combiner applied to the block factors on both sides; its
    /// arity is the number of blocks and it depends on all of them.
    pub h: BooleanFunction,
    /// Degenerate parts.
    pub ledger: DegenerateLedger,
}

impl CanonicalForm {
    /// Compact JSON encoding; field order is fixed, maps are ordered, so
    /// the output is deterministic.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("canonical forms always serialize")
    }

    /// Parses the JSON encoding (structural validation happens in
    /// [`reconstruct`]).
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Result of matching a single function against the generalized monomial
/// shapes relative to a split of its dependencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialMatch {
    /// `f = factor(x over dep1) * parity(x over dep2)`.
    Xor(SubFunction),
    /// `f = b` exactly when `x` matches `kappa` on dep2 and the indicator
    /// holds on dep1; `-b` otherwise. Only reported when dep2 is nonempty.
    AndOr {
        /// The lone value.
        b: Sign,
        /// Subcube signs, one per dep2 coordinate.
        kappa: BTreeMap<usize, Sign>,
        /// Indicator over dep1.
        phi01: IndicatorFunction,
    },
}

/// The affine monomial shapes of a single function over its own
/// dependency set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineMonomialForm {
    /// `f = sign * parity(x over dep(f))`; constants match with empty
    /// dependency set.
    Xor {
        /// The leading sign.
        sign: Sign,
    },
    /// `f = b` exactly at the point `x|dep(f) = kappa`, `-b` elsewhere.
    AndOr {
        /// The lone value.
        b: Sign,
        /// Signs per dependency coordinate, ascending.
        kappa: Vec<(usize, Sign)>,
    },
}

/// Packs the bits of `u` at the (1-based) positions in `coords` into a
/// contiguous value, lowest coordinate first.
fn gather_bits(u: u32, coords: &[usize]) -> u32 {
    let mut v = 0u32;
    for (t, &c) in coords.iter().enumerate() {
        if (u >> (c - 1)) & 1 == 1 {
            v |= 1 << t;
        }
    }
    v
}

/// Spreads the low bits of `v` to the (1-based) positions in `coords`.
fn scatter_bits(v: u32, coords: &[usize]) -> u32 {
    let mut u = 0u32;
    for (t, &c) in coords.iter().enumerate() {
        if (v >> t) & 1 == 1 {
            u |= 1 << (c - 1);
        }
    }
    u
}

fn mask_of(coords: &[usize]) -> u32 {
    coords.iter().fold(0u32, |acc, &c| acc | (1 << (c - 1)))
}

/// Matches `f` against the generalized monomial shapes, relative to the
/// given split of its dependency set into `dep2` (parity / subcube
/// coordinates) and `dep1` (factor coordinates). The XOR shape is tried
/// first; the AND/OR shape is only reported for nonempty `dep2`. Both
/// coordinate lists must be ascending and disjoint, and `f` must not depend
/// on any coordinate outside their union.
pub fn match_generalized_monomial(
    f: &BooleanFunction,
    dep2: &[usize],
    dep1: &[usize],
) -> Option<MonomialMatch> {
    let points = f.num_points();
    let dep2_mask = mask_of(dep2);

    // XOR shape: stripping the parity factor must leave a function of dep1.
    let stripped = BooleanFunction::from_fn(f.arity(), |u| {
        let parity = if (u & dep2_mask).count_ones() % 2 == 1 {
            -1
        } else {
            1
        };
        f.eval(u) * parity
    });
    let dep1_mask = mask_of(dep1);
    if stripped
        .dep()
        .iter()
        .all(|&c| dep1_mask & (1 << (c - 1)) != 0)
    {
        return Some(MonomialMatch::Xor(SubFunction {
            domain: dep1.to_vec(),
            table: stripped.restricted_to(dep1),
        }));
    }

    if dep2.is_empty() {
        return None;
    }
    'candidates: for b in [-1i8, 1] {
        // All points attaining b must share one dep2 assignment.
        let mut kappa_bits: Option<u32> = None;
        for u in 0..points {
            if f.eval(u) == b {
                let masked = u & dep2_mask;
                match kappa_bits {
                    None => kappa_bits = Some(masked),
                    Some(k) if k != masked => continue 'candidates,
                    _ => {}
                }
            }
        }
        let kb = match kappa_bits {
            Some(kb) => kb,
            None => continue, // f never attains b
        };
        let mut indicator = BooleanFunction::new_false(dep1.len());
        for u in 0..points {
            if f.eval(u) == b {
                indicator.set(gather_bits(u, dep1), -1);
            }
        }
        // Verify the reconstructed shape exactly.
        let matches = (0..points).all(|u| {
            let selected = u & dep2_mask == kb && indicator.bit(gather_bits(u, dep1));
            f.eval(u) == if selected { b } else { -b }
        });
        if matches {
            let kappa = dep2
                .iter()
                .map(|&c| {
                    let sign: Sign = if kb & (1 << (c - 1)) != 0 { -1 } else { 1 };
                    (c, sign)
                })
                .collect();
            return Some(MonomialMatch::AndOr {
                b,
                kappa,
                phi01: IndicatorFunction {
                    domain: dep1.to_vec(),
                    table: indicator,
                },
            });
        }
    }
    None
}

/// Matches a single function against the affine monomial shapes over its
/// own dependency set. Dictators and constants match the XOR shape (which
/// is tried first).
pub fn match_affine_monomial(f: &BooleanFunction) -> Option<AffineMonomialForm> {
    let dep = f.dep();
    match match_generalized_monomial(f, &dep, &[])? {
        MonomialMatch::Xor(sub) => Some(AffineMonomialForm::Xor {
            sign: sub.table.eval(0),
        }),
        MonomialMatch::AndOr { b, kappa, .. } => Some(AffineMonomialForm::AndOr {
            b,
            kappa: kappa.into_iter().collect(),
        }),
    }
}

/// Geometric split of a block's rows and columns by cell count.
struct BlockGeometry {
    rows1: Vec<usize>,
    rows2: Vec<usize>,
    cols1: Vec<usize>,
    cols2: Vec<usize>,
    z2_cells: Vec<(usize, usize)>,
}

fn block_geometry(cells: &[(usize, usize)]) -> BlockGeometry {
    let mut row_count: BTreeMap<usize, usize> = BTreeMap::new();
    let mut col_count: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, j) in cells {
        *row_count.entry(i).or_default() += 1;
        *col_count.entry(j).or_default() += 1;
    }
    let rows1 = row_count
        .iter()
        .filter(|&(_, &c)| c == 1)
        .map(|(&i, _)| i)
        .collect::<Vec<_>>();
    let rows2 = row_count
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&i, _)| i)
        .collect::<Vec<_>>();
    let cols1 = col_count
        .iter()
        .filter(|&(_, &c)| c == 1)
        .map(|(&j, _)| j)
        .collect::<Vec<_>>();
    let cols2 = col_count
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&j, _)| j)
        .collect::<Vec<_>>();
    let z2_cells = cells
        .iter()
        .copied()
        .filter(|&(i, j)| rows2.contains(&i) && cols2.contains(&j))
        .collect();
    BlockGeometry {
        rows1,
        rows2,
        cols1,
        cols2,
        z2_cells,
    }
}

fn row_cells(cells: &[(usize, usize)], i: usize) -> Vec<usize> {
    cells
        .iter()
        .filter(|&&(r, _)| r == i)
        .map(|&(_, j)| j)
        .collect()
}

fn col_cells(cells: &[(usize, usize)], j: usize) -> Vec<usize> {
    cells
        .iter()
        .filter(|&&(_, c)| c == j)
        .map(|&(i, _)| i)
        .collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// Classifies one block of a reduced instance. Indices are in the reduced
/// space.
fn classify_block(reduced: &PolymorphismInstance, block: &Block) -> Result<BlockClass> {
    if block.cells.len() == 1 {
        let (i, j) = block.cells[0];
        let (fc, sgn_f) = reduced.f(j).dictator_form().ok_or_else(|| {
            Error::classify("block", format!("f{j} of a lone cell is not a dictator"))
        })?;
        let (gc, sgn_g) = reduced.g(i).dictator_form().ok_or_else(|| {
            Error::classify("block", format!("g{i} of a lone cell is not a dictator"))
        })?;
        if fc != i || gc != j {
            return Err(Error::classify(
                "block",
                format!("lone cell ({i},{j}) dictators read the wrong coordinate"),
            ));
        }
        return Ok(BlockClass::Singleton { i, j, sgn_f, sgn_g });
    }

    // XOR attempt: every member must factor as (dep1 factor) * parity(dep2).
    let try_xor = || -> Option<BlockClass> {
        let mut gamma = BTreeMap::new();
        for &i in &block.rows {
            let cells = row_cells(&block.cells, i);
            let dep2 = intersect(&cells, &block.cols2);
            let dep1 = intersect(&cells, &block.cols1);
            match match_generalized_monomial(reduced.g(i), &dep2, &dep1)? {
                MonomialMatch::Xor(sub) => gamma.insert(i, sub),
                MonomialMatch::AndOr { .. } => return None,
            };
        }
        let mut phi = BTreeMap::new();
        for &j in &block.cols {
            let cells = col_cells(&block.cells, j);
            let dep2 = intersect(&cells, &block.rows2);
            let dep1 = intersect(&cells, &block.rows1);
            match match_generalized_monomial(reduced.f(j), &dep2, &dep1)? {
                MonomialMatch::Xor(sub) => phi.insert(j, sub),
                MonomialMatch::AndOr { .. } => return None,
            };
        }
        Some(BlockClass::XorLike { gamma, phi })
    };
    if let Some(class) = try_xor() {
        return Ok(class);
    }

    // AND/OR attempt.
    let mut d = BTreeMap::new();
    let mut gamma01 = BTreeMap::new();
    let mut row_sign = BTreeMap::new();
    let mut kappa_rows: BTreeMap<(usize, usize), Sign> = BTreeMap::new();
    for &i in &block.rows {
        if block.rows1.contains(&i) {
            let (c, sgn) = reduced.g(i).dictator_form().ok_or_else(|| {
                Error::classify("block", format!("single-cell row {i} is not a dictator"))
            })?;
            debug_assert_eq!(c, row_cells(&block.cells, i)[0]);
            row_sign.insert(i, sgn);
            continue;
        }
        let cells = row_cells(&block.cells, i);
        let dep2 = intersect(&cells, &block.cols2);
        let dep1 = intersect(&cells, &block.cols1);
        match match_generalized_monomial(reduced.g(i), &dep2, &dep1) {
            Some(MonomialMatch::AndOr { b, kappa, phi01 }) => {
                d.insert(i, b);
                gamma01.insert(i, phi01);
                for (j, sgn) in kappa {
                    kappa_rows.insert((i, j), sgn);
                }
            }
            _ => {
                return Err(Error::classify(
                    "block",
                    format!("g{i} matches neither the XOR nor the AND/OR shape"),
                ))
            }
        }
    }
    let mut b_map = BTreeMap::new();
    let mut phi01_map = BTreeMap::new();
    let mut col_sign = BTreeMap::new();
    let mut kappa_cols: BTreeMap<(usize, usize), Sign> = BTreeMap::new();
    for &j in &block.cols {
        if block.cols1.contains(&j) {
            let (r, sgn) = reduced.f(j).dictator_form().ok_or_else(|| {
                Error::classify("block", format!("single-cell column {j} is not a dictator"))
            })?;
            debug_assert_eq!(r, col_cells(&block.cells, j)[0]);
            col_sign.insert(j, sgn);
            continue;
        }
        let cells = col_cells(&block.cells, j);
        let dep2 = intersect(&cells, &block.rows2);
        let dep1 = intersect(&cells, &block.rows1);
        match match_generalized_monomial(reduced.f(j), &dep2, &dep1) {
            Some(MonomialMatch::AndOr { b, kappa, phi01 }) => {
                b_map.insert(j, b);
                phi01_map.insert(j, phi01);
                for (i, sgn) in kappa {
                    kappa_cols.insert((i, j), sgn);
                }
            }
            _ => {
                return Err(Error::classify(
                    "block",
                    format!("f{j} matches neither the XOR nor the AND/OR shape"),
                ))
            }
        }
    }
    if kappa_rows != kappa_cols {
        return Err(Error::classify(
            "block",
            "subcube signs extracted from rows and columns disagree".to_string(),
        ));
    }
    let kappa = kappa_rows
        .into_iter()
        .map(|((i, j), sign)| KappaEntry { i, j, sign })
        .collect();
    Ok(BlockClass::AndOrLike {
        d,
        gamma01,
        b: b_map,
        phi01: phi01_map,
        kappa,
        row_sign,
        col_sign,
    })
}

/// XOR of the sign flips induced on a sub-function's domain: bit `t` set
/// when the sign for coordinate `domain[t]` is `-1`.
fn sign_flip_mask(domain: &[usize], signs: &BTreeMap<usize, Sign>) -> u32 {
    let mut mask = 0u32;
    for (t, c) in domain.iter().enumerate() {
        if signs.get(c) == Some(&-1) {
            mask |= 1 << t;
        }
    }
    mask
}

/// The canonical `{-1,1}` factor a block contributes to the `f_0` side, as
/// a function over the block's rows (in whatever index space the block
/// lives in).
fn block_f0_part(cb: &CanonicalBlock) -> SubFunction {
    let geometry = block_geometry(&cb.cells);
    let rows = cb.rows.clone();
    let table = match &cb.class {
        BlockClass::Singleton { sgn_f, .. } => BooleanFunction::make_dictator(1, 1, *sgn_f),
        BlockClass::XorLike { gamma, phi } => {
            // Dictator-row signs from the constant gamma factors.
            let row_signs: BTreeMap<usize, Sign> = geometry
                .rows1
                .iter()
                .map(|&i| (i, gamma[&i].table.eval(0)))
                .collect();
            let rows2_mask = gather_mask(&rows, &geometry.rows2);
            BooleanFunction::from_fn(rows.len(), |v| {
                let mut val: Sign = if (v & rows2_mask).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                };
                for &j in &geometry.cols2 {
                    let sub = &phi[&j];
                    let local: Vec<usize> = positions(&rows, &sub.domain);
                    let w = gather_local(v, &local) ^ sign_flip_mask(&sub.domain, &row_signs);
                    val *= sub.table.eval(w);
                }
                val
            })
        }
        BlockClass::AndOrLike {
            d,
            phi01,
            row_sign,
            ..
        } => {
            let rows2_mask = gather_mask(&rows, &geometry.rows2);
            let d_bits = {
                let mut bits = 0u32;
                for (t, r) in rows.iter().enumerate() {
                    if d.get(r) == Some(&-1) {
                        bits |= 1 << t;
                    }
                }
                bits
            };
            BooleanFunction::from_fn(rows.len(), |v| {
                let mut selected = v & rows2_mask == d_bits;
                if selected {
                    for &j in &geometry.cols2 {
                        let ind = &phi01[&j];
                        let local: Vec<usize> = positions(&rows, &ind.domain);
                        let w = gather_local(v, &local) ^ sign_flip_mask(&ind.domain, row_sign);
                        if ind.val01(w) == 0 {
                            selected = false;
                            break;
                        }
                    }
                }
                if selected {
                    1
                } else {
                    -1
                }
            })
        }
    };
    SubFunction {
        domain: rows,
        table,
    }
}

/// The canonical factor a block contributes to the `g_0` side, over the
/// block's columns.
fn block_g0_part(cb: &CanonicalBlock) -> SubFunction {
    let geometry = block_geometry(&cb.cells);
    let cols = cb.cols.clone();
    let table = match &cb.class {
        BlockClass::Singleton { sgn_g, .. } => BooleanFunction::make_dictator(1, 1, *sgn_g),
        BlockClass::XorLike { gamma, phi } => {
            let col_signs: BTreeMap<usize, Sign> = geometry
                .cols1
                .iter()
                .map(|&j| (j, phi[&j].table.eval(0)))
                .collect();
            let cols2_mask = gather_mask(&cols, &geometry.cols2);
            BooleanFunction::from_fn(cols.len(), |v| {
                let mut val: Sign = if (v & cols2_mask).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                };
                for &i in &geometry.rows2 {
                    let sub = &gamma[&i];
                    let local: Vec<usize> = positions(&cols, &sub.domain);
                    let w = gather_local(v, &local) ^ sign_flip_mask(&sub.domain, &col_signs);
                    val *= sub.table.eval(w);
                }
                val
            })
        }
        BlockClass::AndOrLike {
            b,
            gamma01,
            col_sign,
            ..
        } => {
            let cols2_mask = gather_mask(&cols, &geometry.cols2);
            let b_bits = {
                let mut bits = 0u32;
                for (t, c) in cols.iter().enumerate() {
                    if b.get(c) == Some(&-1) {
                        bits |= 1 << t;
                    }
                }
                bits
            };
            BooleanFunction::from_fn(cols.len(), |v| {
                let mut selected = v & cols2_mask == b_bits;
                if selected {
                    for &i in &geometry.rows2 {
                        let ind = &gamma01[&i];
                        let local: Vec<usize> = positions(&cols, &ind.domain);
                        let w = gather_local(v, &local) ^ sign_flip_mask(&ind.domain, col_sign);
                        if ind.val01(w) == 0 {
                            selected = false;
                            break;
                        }
                    }
                }
                if selected {
                    1
                } else {
                    -1
                }
            })
        }
    };
    SubFunction {
        domain: cols,
        table,
    }
}

/// Positions (0-based) of the members of `subset` within `all`.
fn positions(all: &[usize], subset: &[usize]) -> Vec<usize> {
    subset
        .iter()
        .map(|c| all.iter().position(|x| x == c).expect("subset member"))
        .collect()
}

/// Bit mask over local positions of `members` within `all`.
fn gather_mask(all: &[usize], members: &[usize]) -> u32 {
    let mut mask = 0u32;
    for (t, c) in all.iter().enumerate() {
        if members.contains(c) {
            mask |= 1 << t;
        }
    }
    mask
}

/// Packs the bits of `v` at the given local positions.
fn gather_local(v: u32, local: &[usize]) -> u32 {
    let mut w = 0u32;
    for (t, &p) in local.iter().enumerate() {
        if (v >> p) & 1 == 1 {
            w |= 1 << t;
        }
    }
    w
}

/// Evaluates a block factor inside a full-width point `u` (1-based
/// coordinates as in the sub-function's domain).
fn eval_part(part: &SubFunction, u: u32) -> Sign {
    part.table.eval(gather_bits(u, &part.domain))
}

/// Classifies a generalized polymorphism into its canonical form. The
/// input must satisfy the defining identity (this is checked first);
/// classification then computes the degenerate ledger, the interaction
/// blocks with their shapes, and the combiner, and finally verifies that
/// [`reconstruct`] returns the input bit-for-bit.
pub fn classify(p: &PolymorphismInstance) -> Result<CanonicalForm> {
    if !check_auto(p)? {
        return Err(Error::NotPolymorphism);
    }
    let (n, m) = (p.n(), p.m());

    // Degenerate split: constants, then coordinates the pinned outers ignore.
    let mut constant_g: BTreeMap<usize, Sign> = BTreeMap::new();
    for i in 1..=n {
        if let Some(c) = p.g(i).is_constant() {
            constant_g.insert(i, c);
        }
    }
    let mut constant_f: BTreeMap<usize, Sign> = BTreeMap::new();
    for j in 1..=m {
        if let Some(c) = p.f(j).is_constant() {
            constant_f.insert(j, c);
        }
    }
    let i_rows: Vec<usize> = (1..=n).filter(|i| !constant_g.contains_key(i)).collect();
    let j_cols: Vec<usize> = (1..=m).filter(|j| !constant_f.contains_key(j)).collect();

    let g_pins: Vec<(usize, Sign)> = constant_g.iter().map(|(&i, &c)| (i, c)).collect();
    let f0_pinned = p.f(0).restrict_many(&g_pins);
    let f0_dep_positions = f0_pinned.dep();
    let rows_reduced: Vec<usize> = f0_dep_positions.iter().map(|&t| i_rows[t - 1]).collect();
    let free_g: BTreeMap<usize, BooleanFunction> = i_rows
        .iter()
        .filter(|i| !rows_reduced.contains(i))
        .map(|&i| (i, p.g(i).clone()))
        .collect();
    let f0_reduced = f0_pinned.restricted_to(&f0_dep_positions);

    let f_pins: Vec<(usize, Sign)> = constant_f.iter().map(|(&j, &c)| (j, c)).collect();
    let g0_pinned = p.g(0).restrict_many(&f_pins);
    let g0_dep_positions = g0_pinned.dep();
    let cols_reduced: Vec<usize> = g0_dep_positions.iter().map(|&t| j_cols[t - 1]).collect();
    let free_f: BTreeMap<usize, BooleanFunction> = j_cols
        .iter()
        .filter(|j| !cols_reduced.contains(j))
        .map(|&j| (j, p.f(j).clone()))
        .collect();
    let g0_reduced = g0_pinned.restricted_to(&g0_dep_positions);

    let ledger = DegenerateLedger {
        constant_g: constant_g.clone(),
        constant_f: constant_f.clone(),
        free_g,
        free_f,
        f0_table: (!constant_g.is_empty()).then(|| p.f(0).clone()),
        g0_table: (!constant_f.is_empty()).then(|| p.g(0).clone()),
    };

    // Support leaks: block functions may only read surviving coordinates.
    for &i in &rows_reduced {
        if !p.g(i).dep().iter().all(|j| cols_reduced.contains(j)) {
            return Err(Error::classify(
                "reduction",
                format!("g{i} reads a column eliminated by the degenerate split"),
            ));
        }
    }
    for &j in &cols_reduced {
        if !p.f(j).dep().iter().all(|i| rows_reduced.contains(i)) {
            return Err(Error::classify(
                "reduction",
                format!("f{j} reads a row eliminated by the degenerate split"),
            ));
        }
    }

    if rows_reduced.is_empty() != cols_reduced.is_empty() {
        return Err(Error::classify(
            "reduction",
            "one outer function reduced to a constant but the other did not",
        ));
    }
    if rows_reduced.is_empty() {
        // No blocks: both outers are constant on the pinned slice.
        if f0_reduced.eval(0) != g0_reduced.eval(0) {
            return Err(Error::classify(
                "reduction",
                "the two constant slice values disagree",
            ));
        }
        let form = CanonicalForm {
            n,
            m,
            rows_reduced: vec![],
            cols_reduced: vec![],
            blocks: vec![],
            h: f0_reduced,
            ledger,
        };
        let rebuilt = reconstruct(&form)?;
        if rebuilt != *p {
            return Err(Error::classify(
                "round-trip",
                "reconstruction does not reproduce the instance",
            ));
        }
        return Ok(form);
    }

    // Reduced instance in contiguous coordinates.
    let n_red = rows_reduced.len();
    let m_red = cols_reduced.len();
    let mut fs_red = Vec::with_capacity(m_red + 1);
    fs_red.push(f0_reduced.clone());
    for &j in &cols_reduced {
        fs_red.push(p.f(j).restricted_to(&rows_reduced));
    }
    let mut gs_red = Vec::with_capacity(n_red + 1);
    gs_red.push(g0_reduced.clone());
    for &i in &rows_reduced {
        gs_red.push(p.g(i).restricted_to(&cols_reduced));
    }
    let reduced = PolymorphismInstance::new(n_red, m_red, fs_red, gs_red)?;
    if !check_auto(&reduced)? {
        return Err(Error::Internal(
            "reduced instance violates the defining identity".into(),
        ));
    }

    // Interaction blocks, classified in the reduced space.
    let z0 = compute_z0(&reduced)?;
    let blocks = partition_blocks(&z0);
    let mut canonical_blocks: Vec<CanonicalBlock> = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let class = classify_block(&reduced, block)?;
        canonical_blocks.push(CanonicalBlock {
            rows: block.rows.clone(),
            cols: block.cols.clone(),
            cells: block.cells.clone(),
            class,
        });
    }

    // Combiner extraction: pick a preimage per block factor value.
    let k = canonical_blocks.len();
    let parts_f: Vec<SubFunction> = canonical_blocks.iter().map(block_f0_part).collect();
    let parts_g: Vec<SubFunction> = canonical_blocks.iter().map(block_g0_part).collect();
    let mut exemplar_plus = Vec::with_capacity(k);
    let mut exemplar_minus = Vec::with_capacity(k);
    for part in &parts_f {
        let points = part.table.num_points();
        let plus = (0..points).find(|&v| part.table.eval(v) == 1);
        let minus = (0..points).find(|&v| part.table.eval(v) == -1);
        match (plus, minus) {
            (Some(pv), Some(mv)) => {
                exemplar_plus.push(pv);
                exemplar_minus.push(mv);
            }
            _ => {
                return Err(Error::classify(
                    "combiner",
                    "a block factor is constant".to_string(),
                ))
            }
        }
    }
    let mut h = BooleanFunction::new_false(k);
    for eps in 0..(1u32 << k) {
        let mut x = 0u32;
        for (idx, part) in parts_f.iter().enumerate() {
            let v = if (eps >> idx) & 1 == 1 {
                exemplar_minus[idx]
            } else {
                exemplar_plus[idx]
            };
            x |= scatter_bits(v, &part.domain);
        }
        h.set(eps, f0_reduced.eval(x));
    }
    // The combiner must explain both outers everywhere.
    for x in 0..(1u32 << n_red) {
        let mut eps = 0u32;
        for (idx, part) in parts_f.iter().enumerate() {
            if eval_part(part, x) == -1 {
                eps |= 1 << idx;
            }
        }
        if f0_reduced.eval(x) != h.eval(eps) {
            return Err(Error::classify(
                "combiner",
                "the block factors do not determine the outer f function",
            ));
        }
    }
    for y in 0..(1u32 << m_red) {
        let mut eps = 0u32;
        for (idx, part) in parts_g.iter().enumerate() {
            if eval_part(part, y) == -1 {
                eps |= 1 << idx;
            }
        }
        if g0_reduced.eval(y) != h.eval(eps) {
            return Err(Error::classify(
                "combiner",
                "the block factors do not determine the outer g function",
            ));
        }
    }
    if h.dep().len() != k {
        return Err(Error::classify(
            "combiner",
            "the combiner ignores one of the blocks",
        ));
    }

    // Map the blocks back to original coordinates.
    let canonical_blocks: Vec<CanonicalBlock> = canonical_blocks
        .iter()
        .map(|cb| remap_block(cb, &rows_reduced, &cols_reduced))
        .collect();

    let form = CanonicalForm {
        n,
        m,
        rows_reduced,
        cols_reduced,
        blocks: canonical_blocks,
        h,
        ledger,
    };
    let rebuilt = reconstruct(&form)?;
    if rebuilt != *p {
        return Err(Error::classify(
            "round-trip",
            "reconstruction does not reproduce the instance",
        ));
    }
    Ok(form)
}

fn remap_indices(indices: &[usize], map: &[usize]) -> Vec<usize> {
    indices.iter().map(|&t| map[t - 1]).collect()
}

fn remap_block(cb: &CanonicalBlock, row_map: &[usize], col_map: &[usize]) -> CanonicalBlock {
    let remap_sub = |sub: &SubFunction, map: &[usize]| SubFunction {
        domain: remap_indices(&sub.domain, map),
        table: sub.table.clone(),
    };
    let remap_ind = |ind: &IndicatorFunction, map: &[usize]| IndicatorFunction {
        domain: remap_indices(&ind.domain, map),
        table: ind.table.clone(),
    };
    let class = match &cb.class {
        BlockClass::Singleton { i, j, sgn_f, sgn_g } => BlockClass::Singleton {
            i: row_map[i - 1],
            j: col_map[j - 1],
            sgn_f: *sgn_f,
            sgn_g: *sgn_g,
        },
        BlockClass::XorLike { gamma, phi } => BlockClass::XorLike {
            gamma: gamma
                .iter()
                .map(|(&i, sub)| (row_map[i - 1], remap_sub(sub, col_map)))
                .collect(),
            phi: phi
                .iter()
                .map(|(&j, sub)| (col_map[j - 1], remap_sub(sub, row_map)))
                .collect(),
        },
        BlockClass::AndOrLike {
            d,
            gamma01,
            b,
            phi01,
            kappa,
            row_sign,
            col_sign,
        } => BlockClass::AndOrLike {
            d: d.iter().map(|(&i, &s)| (row_map[i - 1], s)).collect(),
            gamma01: gamma01
                .iter()
                .map(|(&i, ind)| (row_map[i - 1], remap_ind(ind, col_map)))
                .collect(),
            b: b.iter().map(|(&j, &s)| (col_map[j - 1], s)).collect(),
            phi01: phi01
                .iter()
                .map(|(&j, ind)| (col_map[j - 1], remap_ind(ind, row_map)))
                .collect(),
            kappa: kappa
                .iter()
                .map(|e| KappaEntry {
                    i: row_map[e.i - 1],
                    j: col_map[e.j - 1],
                    sign: e.sign,
                })
                .collect(),
            row_sign: row_sign
                .iter()
                .map(|(&i, &s)| (row_map[i - 1], s))
                .collect(),
            col_sign: col_sign
                .iter()
                .map(|(&j, &s)| (col_map[j - 1], s))
                .collect(),
        },
    };
    CanonicalBlock {
        rows: remap_indices(&cb.rows, row_map),
        cols: remap_indices(&cb.cols, col_map),
        cells: cb
            .cells
            .iter()
            .map(|&(i, j)| (row_map[i - 1], col_map[j - 1]))
            .collect(),
        class,
    }
}

fn is_sorted_strict(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn validate_subfunction(
    sub: &SubFunction,
    expected_domain: &[usize],
    what: &str,
) -> Result<()> {
    if sub.domain != expected_domain {
        return Err(Error::Validation(format!(
            "{what}: domain {:?} must be {:?}",
            sub.domain, expected_domain
        )));
    }
    if sub.table.arity() != sub.domain.len() {
        return Err(Error::Validation(format!(
            "{what}: table arity {} does not match domain size {}",
            sub.table.arity(),
            sub.domain.len()
        )));
    }
    if sub.table.dep().len() != sub.domain.len() {
        return Err(Error::Validation(format!(
            "{what}: factor must depend on its whole domain"
        )));
    }
    Ok(())
}

fn validate_indicator(
    ind: &IndicatorFunction,
    expected_domain: &[usize],
    what: &str,
) -> Result<()> {
    if ind.domain != expected_domain {
        return Err(Error::Validation(format!(
            "{what}: domain {:?} must be {:?}",
            ind.domain, expected_domain
        )));
    }
    if ind.table.arity() != ind.domain.len() {
        return Err(Error::Validation(format!(
            "{what}: table arity {} does not match domain size {}",
            ind.table.arity(),
            ind.domain.len()
        )));
    }
    if ind.table.dep().len() != ind.domain.len() {
        return Err(Error::Validation(format!(
            "{what}: indicator must depend on its whole domain"
        )));
    }
    if ind.table.is_constant() == Some(1) {
        return Err(Error::Validation(format!(
            "{what}: indicator must select at least one point"
        )));
    }
    Ok(())
}

fn validate_sign(s: Sign, what: &str) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what}: sign must be +1 or -1")))
    }
}

impl CanonicalForm {
    /// Validates all structural invariants of the form. [`reconstruct`]
    /// calls this before building functions.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n, self.m);
        if n > crate::boolean_fn::MAX_ARITY || m > crate::boolean_fn::MAX_ARITY {
            return Err(Error::Validation(format!(
                "grid {n} x {m} exceeds the supported arity"
            )));
        }

        // Row categories partition [n]; column categories partition [m].
        let mut row_seen = vec![false; n + 1];
        let mut mark_row = |i: usize, what: &str| -> Result<()> {
            if i == 0 || i > n {
                return Err(Error::Validation(format!("{what}: row {i} out of range")));
            }
            if row_seen[i] {
                return Err(Error::Validation(format!(
                    "{what}: row {i} appears in two categories"
                )));
            }
            row_seen[i] = true;
            Ok(())
        };
        for (&i, &s) in &self.ledger.constant_g {
            mark_row(i, "constant_g")?;
            validate_sign(s, "constant_g")?;
        }
        for (&i, g) in &self.ledger.free_g {
            mark_row(i, "free_g")?;
            if g.arity() != m {
                return Err(Error::Validation(format!("free_g[{i}]: arity must be {m}")));
            }
            if g.is_constant().is_some() {
                return Err(Error::Validation(format!(
                    "free_g[{i}]: constant functions belong in constant_g"
                )));
            }
        }
        for &i in &self.rows_reduced {
            mark_row(i, "rows_reduced")?;
        }
        if let Some(missing) = (1..=n).find(|&i| !row_seen[i]) {
            return Err(Error::Validation(format!(
                "row {missing} is in no category"
            )));
        }
        if !is_sorted_strict(&self.rows_reduced) {
            return Err(Error::Validation("rows_reduced must be ascending".into()));
        }

        let mut col_seen = vec![false; m + 1];
        let mut mark_col = |j: usize, what: &str| -> Result<()> {
            if j == 0 || j > m {
                return Err(Error::Validation(format!("{what}: column {j} out of range")));
            }
            if col_seen[j] {
                return Err(Error::Validation(format!(
                    "{what}: column {j} appears in two categories"
                )));
            }
            col_seen[j] = true;
            Ok(())
        };
        for (&j, &s) in &self.ledger.constant_f {
            mark_col(j, "constant_f")?;
            validate_sign(s, "constant_f")?;
        }
        for (&j, f) in &self.ledger.free_f {
            mark_col(j, "free_f")?;
            if f.arity() != n {
                return Err(Error::Validation(format!("free_f[{j}]: arity must be {n}")));
            }
            if f.is_constant().is_some() {
                return Err(Error::Validation(format!(
                    "free_f[{j}]: constant functions belong in constant_f"
                )));
            }
        }
        for &j in &self.cols_reduced {
            mark_col(j, "cols_reduced")?;
        }
        if let Some(missing) = (1..=m).find(|&j| !col_seen[j]) {
            return Err(Error::Validation(format!(
                "column {missing} is in no category"
            )));
        }
        if !is_sorted_strict(&self.cols_reduced) {
            return Err(Error::Validation("cols_reduced must be ascending".into()));
        }

        // Outer tables accompany pinned slices exactly.
        match (&self.ledger.f0_table, self.ledger.constant_g.is_empty()) {
            (None, false) => {
                return Err(Error::Validation(
                    "constant_g is nonempty, so f0_table is required".into(),
                ))
            }
            (Some(_), true) => {
                return Err(Error::Validation(
                    "f0_table is only allowed when constant_g is nonempty".into(),
                ))
            }
            (Some(t), false) if t.arity() != n => {
                return Err(Error::Validation(format!("f0_table: arity must be {n}")));
            }
            _ => {}
        }
        match (&self.ledger.g0_table, self.ledger.constant_f.is_empty()) {
            (None, false) => {
                return Err(Error::Validation(
                    "constant_f is nonempty, so g0_table is required".into(),
                ))
            }
            (Some(_), true) => {
                return Err(Error::Validation(
                    "g0_table is only allowed when constant_f is nonempty".into(),
                ))
            }
            (Some(t), false) if t.arity() != m => {
                return Err(Error::Validation(format!("g0_table: arity must be {m}")));
            }
            _ => {}
        }

        // Blocks: geometry, ordering, coverage of the reduced coordinates.
        let mut covered_rows: Vec<usize> = Vec::new();
        let mut covered_cols: Vec<usize> = Vec::new();
        let mut prev_min_cell: Option<(usize, usize)> = None;
        for (idx, cb) in self.blocks.iter().enumerate() {
            let what = format!("block {idx}");
            if cb.cells.is_empty() {
                return Err(Error::Validation(format!("{what}: no cells")));
            }
            if !cb.cells.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Validation(format!(
                    "{what}: cells must be sorted and distinct"
                )));
            }
            if let Some(prev) = prev_min_cell {
                if cb.cells[0] <= prev {
                    return Err(Error::Validation(
                        "blocks must be ordered by their smallest cell".into(),
                    ));
                }
            }
            prev_min_cell = Some(cb.cells[0]);
            let mut rows: Vec<usize> = cb.cells.iter().map(|&(i, _)| i).collect();
            rows.sort_unstable();
            rows.dedup();
            let mut cols: Vec<usize> = cb.cells.iter().map(|&(_, j)| j).collect();
            cols.sort_unstable();
            cols.dedup();
            if rows != cb.rows || cols != cb.cols {
                return Err(Error::Validation(format!(
                    "{what}: stored rows/cols do not match the cells"
                )));
            }
            if partition_blocks(&cb.cells).len() != 1 {
                return Err(Error::Validation(format!("{what}: cells are not connected")));
            }
            covered_rows.extend(&rows);
            covered_cols.extend(&cols);

            let geometry = block_geometry(&cb.cells);
            match &cb.class {
                BlockClass::Singleton { i, j, sgn_f, sgn_g } => {
                    if cb.cells.len() != 1 {
                        return Err(Error::Validation(format!(
                            "{what}: singleton class on a multi-cell block"
                        )));
                    }
                    if cb.cells[0] != (*i, *j) {
                        return Err(Error::Validation(format!(
                            "{what}: singleton coordinates do not match the cell"
                        )));
                    }
                    validate_sign(*sgn_f, &what)?;
                    validate_sign(*sgn_g, &what)?;
                }
                BlockClass::XorLike { gamma, phi } => {
                    if cb.cells.len() == 1 {
                        return Err(Error::Validation(format!(
                            "{what}: lone cells must use the singleton class"
                        )));
                    }
                    if gamma.keys().copied().collect::<Vec<_>>() != cb.rows {
                        return Err(Error::Validation(format!(
                            "{what}: gamma must have exactly one entry per block row"
                        )));
                    }
                    if phi.keys().copied().collect::<Vec<_>>() != cb.cols {
                        return Err(Error::Validation(format!(
                            "{what}: phi must have exactly one entry per block column"
                        )));
                    }
                    for (&i, sub) in gamma {
                        let expected = intersect(&row_cells(&cb.cells, i), &geometry.cols1);
                        validate_subfunction(sub, &expected, &format!("{what} gamma[{i}]"))?;
                    }
                    for (&j, sub) in phi {
                        let expected = intersect(&col_cells(&cb.cells, j), &geometry.rows1);
                        validate_subfunction(sub, &expected, &format!("{what} phi[{j}]"))?;
                    }
                }
                BlockClass::AndOrLike {
                    d,
                    gamma01,
                    b,
                    phi01,
                    kappa,
                    row_sign,
                    col_sign,
                } => {
                    if cb.cells.len() == 1 {
                        return Err(Error::Validation(format!(
                            "{what}: lone cells must use the singleton class"
                        )));
                    }
                    if d.keys().copied().collect::<Vec<_>>() != geometry.rows2
                        || gamma01.keys().copied().collect::<Vec<_>>() != geometry.rows2
                    {
                        return Err(Error::Validation(format!(
                            "{what}: d and gamma01 must cover exactly the multi-cell rows"
                        )));
                    }
                    if b.keys().copied().collect::<Vec<_>>() != geometry.cols2
                        || phi01.keys().copied().collect::<Vec<_>>() != geometry.cols2
                    {
                        return Err(Error::Validation(format!(
                            "{what}: b and phi01 must cover exactly the multi-cell columns"
                        )));
                    }
                    if row_sign.keys().copied().collect::<Vec<_>>() != geometry.rows1 {
                        return Err(Error::Validation(format!(
                            "{what}: row_sign must cover exactly the single-cell rows"
                        )));
                    }
                    if col_sign.keys().copied().collect::<Vec<_>>() != geometry.cols1 {
                        return Err(Error::Validation(format!(
                            "{what}: col_sign must cover exactly the single-cell columns"
                        )));
                    }
                    for &s in d.values().chain(b.values()) {
                        validate_sign(s, &what)?;
                    }
                    for &s in row_sign.values().chain(col_sign.values()) {
                        validate_sign(s, &what)?;
                    }
                    for (&i, ind) in gamma01 {
                        let expected = intersect(&row_cells(&cb.cells, i), &geometry.cols1);
                        validate_indicator(ind, &expected, &format!("{what} gamma01[{i}]"))?;
                    }
                    for (&j, ind) in phi01 {
                        let expected = intersect(&col_cells(&cb.cells, j), &geometry.rows1);
                        validate_indicator(ind, &expected, &format!("{what} phi01[{j}]"))?;
                    }
                    let kappa_cells: Vec<(usize, usize)> =
                        kappa.iter().map(|e| (e.i, e.j)).collect();
                    if kappa_cells != geometry.z2_cells {
                        return Err(Error::Validation(format!(
                            "{what}: kappa must cover exactly the cells in multi-cell rows and columns"
                        )));
                    }
                    for e in kappa {
                        validate_sign(e.sign, &what)?;
                    }
                }
            }
        }
        covered_rows.sort_unstable();
        covered_cols.sort_unstable();
        if covered_rows != self.rows_reduced {
            return Err(Error::Validation(
                "blocks must cover each reduced row exactly once".into(),
            ));
        }
        if covered_cols != self.cols_reduced {
            return Err(Error::Validation(
                "blocks must cover each reduced column exactly once".into(),
            ));
        }

        // Combiner.
        if self.h.arity() != self.blocks.len() {
            return Err(Error::Validation(format!(
                "combiner arity {} must equal the number of blocks {}",
                self.h.arity(),
                self.blocks.len()
            )));
        }
        if self.h.dep().len() != self.blocks.len() {
            return Err(Error::Validation(
                "the combiner must depend on every block".into(),
            ));
        }
        Ok(())
    }
}

/// Rebuilds one block member `f_j` as a full-arity function.
fn block_member_f(cb: &CanonicalBlock, j: usize, n: usize) -> BooleanFunction {
    let geometry = block_geometry(&cb.cells);
    match &cb.class {
        BlockClass::Singleton { i, sgn_f, .. } => BooleanFunction::make_dictator(n, *i, *sgn_f),
        BlockClass::XorLike { phi, .. } => {
            let sub = &phi[&j];
            let dep2 = intersect(&col_cells(&cb.cells, j), &geometry.rows2);
            let dep2_mask = mask_of(&dep2);
            let sub = sub.clone();
            BooleanFunction::from_fn(n, move |u| {
                let parity: Sign = if (u & dep2_mask).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                };
                sub.table.eval(gather_bits(u, &sub.domain)) * parity
            })
        }
        BlockClass::AndOrLike {
            b,
            phi01,
            kappa,
            col_sign,
            ..
        } => {
            if let Some(&sgn) = col_sign.get(&j) {
                let row = col_cells(&cb.cells, j)[0];
                return BooleanFunction::make_dictator(n, row, sgn);
            }
            let bj = b[&j];
            let ind = phi01[&j].clone();
            let mut kappa_bits = 0u32;
            let mut kappa_mask = 0u32;
            for e in kappa.iter().filter(|e| e.j == j) {
                kappa_mask |= 1 << (e.i - 1);
                if e.sign == -1 {
                    kappa_bits |= 1 << (e.i - 1);
                }
            }
            BooleanFunction::from_fn(n, move |u| {
                let selected =
                    u & kappa_mask == kappa_bits && ind.val01(gather_bits(u, &ind.domain)) == 1;
                if selected {
                    bj
                } else {
                    -bj
                }
            })
        }
    }
}

/// Rebuilds one block member `g_i` as a full-arity function.
fn block_member_g(cb: &CanonicalBlock, i: usize, m: usize) -> BooleanFunction {
    let geometry = block_geometry(&cb.cells);
    match &cb.class {
        BlockClass::Singleton { j, sgn_g, .. } => BooleanFunction::make_dictator(m, *j, *sgn_g),
        BlockClass::XorLike { gamma, .. } => {
            let sub = gamma[&i].clone();
            let dep2 = intersect(&row_cells(&cb.cells, i), &geometry.cols2);
            let dep2_mask = mask_of(&dep2);
            BooleanFunction::from_fn(m, move |u| {
                let parity: Sign = if (u & dep2_mask).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                };
                sub.table.eval(gather_bits(u, &sub.domain)) * parity
            })
        }
        BlockClass::AndOrLike {
            d,
            gamma01,
            kappa,
            row_sign,
            ..
        } => {
            if let Some(&sgn) = row_sign.get(&i) {
                let col = row_cells(&cb.cells, i)[0];
                return BooleanFunction::make_dictator(m, col, sgn);
            }
            let di = d[&i];
            let ind = gamma01[&i].clone();
            let mut kappa_bits = 0u32;
            let mut kappa_mask = 0u32;
            for e in kappa.iter().filter(|e| e.i == i) {
                kappa_mask |= 1 << (e.j - 1);
                if e.sign == -1 {
                    kappa_bits |= 1 << (e.j - 1);
                }
            }
            BooleanFunction::from_fn(m, move |u| {
                let selected =
                    u & kappa_mask == kappa_bits && ind.val01(gather_bits(u, &ind.domain)) == 1;
                if selected {
                    di
                } else {
                    -di
                }
            })
        }
    }
}

/// Rebuilds the exact function tuple described by a canonical form. The
/// form is validated first; the output of [`classify`] reconstructs to the
/// classified instance bit-for-bit.
pub fn reconstruct(form: &CanonicalForm) -> Result<PolymorphismInstance> {
    form.validate()?;
    let (n, m) = (form.n, form.m);

    let parts_f: Vec<SubFunction> = form.blocks.iter().map(block_f0_part).collect();
    let parts_g: Vec<SubFunction> = form.blocks.iter().map(block_g0_part).collect();

    let combined_f = |u: u32| -> Sign {
        let mut eps = 0u32;
        for (idx, part) in parts_f.iter().enumerate() {
            if eval_part(part, u) == -1 {
                eps |= 1 << idx;
            }
        }
        form.h.eval(eps)
    };
    let combined_g = |u: u32| -> Sign {
        let mut eps = 0u32;
        for (idx, part) in parts_g.iter().enumerate() {
            if eval_part(part, u) == -1 {
                eps |= 1 << idx;
            }
        }
        form.h.eval(eps)
    };

    // f0: combiner output on the slice pinned by the constant g rows,
    // ledger table off it.
    let slice_mask_f = mask_of(&form.ledger.constant_g.keys().copied().collect::<Vec<_>>());
    let slice_bits_f = form
        .ledger
        .constant_g
        .iter()
        .filter(|&(_, &c)| c == -1)
        .fold(0u32, |acc, (&i, _)| acc | (1 << (i - 1)));
    let f0 = BooleanFunction::from_fn(n, |u| {
        if u & slice_mask_f == slice_bits_f {
            combined_f(u)
        } else {
            form.ledger
                .f0_table
                .as_ref()
                .expect("validated: off-slice points imply a stored table")
                .eval(u)
        }
    });

    let slice_mask_g = mask_of(&form.ledger.constant_f.keys().copied().collect::<Vec<_>>());
    let slice_bits_g = form
        .ledger
        .constant_f
        .iter()
        .filter(|&(_, &c)| c == -1)
        .fold(0u32, |acc, (&j, _)| acc | (1 << (j - 1)));
    let g0 = BooleanFunction::from_fn(m, |u| {
        if u & slice_mask_g == slice_bits_g {
            combined_g(u)
        } else {
            form.ledger
                .g0_table
                .as_ref()
                .expect("validated: off-slice points imply a stored table")
                .eval(u)
        }
    });

    let mut fs = vec![f0];
    for j in 1..=m {
        if let Some(&c) = form.ledger.constant_f.get(&j) {
            fs.push(BooleanFunction::make_const(n, c));
        } else if let Some(f) = form.ledger.free_f.get(&j) {
            fs.push(f.clone());
        } else {
            let cb = form
                .blocks
                .iter()
                .find(|cb| cb.cols.contains(&j))
                .expect("validated: every reduced column is in a block");
            fs.push(block_member_f(cb, j, n));
        }
    }
    let mut gs = vec![g0];
    for i in 1..=n {
        if let Some(&c) = form.ledger.constant_g.get(&i) {
            gs.push(BooleanFunction::make_const(m, c));
        } else if let Some(g) = form.ledger.free_g.get(&i) {
            gs.push(g.clone());
        } else {
            let cb = form
                .blocks
                .iter()
                .find(|cb| cb.rows.contains(&i))
                .expect("validated: every reduced row is in a block");
            gs.push(block_member_g(cb, i, m));
        }
    }
    PolymorphismInstance::new(n, m, fs, gs)
}

/// Renormalizes a valid canonical form by reconstructing its instance and
/// classifying the result. The output is the classifier's preferred
/// description (e.g. single-line blocks become `xor_like`); classifier
/// outputs are fixed points.
pub fn canonicalize(form: &CanonicalForm) -> Result<CanonicalForm> {
    classify(&reconstruct(form)?)
}

/// Whether two canonical forms describe the same function tuple.
pub fn forms_equivalent(a: &CanonicalForm, b: &CanonicalForm) -> Result<bool> {
    Ok(reconstruct(a)? == reconstruct(b)?)
}
