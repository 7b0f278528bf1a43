//! Exhaustive and sampled enumeration of generalized polymorphisms on
//! small grids, with classification statistics and catalogue output.
//!
//! # Key operations
//!
//! * [`enumerate_exhaustive`] walks every function tuple on an `n x m`
//!   grid (gated by [`enumeration_cost`] against a budget), decides the
//!   defining identity for each with an occupancy-mask fast path, audits a
//!   deterministic random slice of the verdicts with an independent
//!   Shannon-expansion evaluator, and classifies every passing tuple.
//! * [`enumerate_sampled`] draws random tuples on grids too large to sweep
//!   and runs the same per-instance pipeline on those that pass.
//! * [`write_catalogue`] serializes the collected canonical forms as
//!   newline-delimited JSON, sorted by the instance serialization, which
//!   makes the file byte-identical across runs and thread counts.
//!
//! The fast path fixes the inner functions and collects the set of pairs
//! `(u, v)` — `u` the joint inner-`g` outputs, `v` the joint inner-`f`
//! outputs — reachable as the grid ranges over all points. A tuple passes
//! for outer functions `(f_0, g_0)` exactly when `f_0(u) = g_0(v)` for
//! every reachable pair, which reduces to two mask comparisons per `g_0`
//! table once the reachable `v` sets are folded by `f_0` value.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean_fn::BooleanFunction;
use crate::classifier::{classify, reconstruct, BlockClass};
use crate::error::{Error, Result};
use crate::polymorphism::{check_auto, PolymorphismInstance};

/// Default enumeration budget; admits the grids 1x1, 1x2, 2x1, 2x2, 1x3
/// and 3x1.
pub const DEFAULT_BUDGET: u64 = 24;

/// Cost of exhaustively enumerating an `n x m` grid: the combined truth
/// table bits of one tuple, `(m+1) * 2^n + (n+1) * 2^m`.
pub fn enumeration_cost(n: usize, m: usize) -> u64 {
    (m as u64 + 1) * (1u64 << n) + (n as u64 + 1) * (1u64 << m)
}

/// Knobs for enumeration.
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Budget the grid's [`enumeration_cost`] is checked against.
    pub budget: u64,
    /// Fraction of tuples per prefix re-checked by the independent
    /// evaluator (exhaustive mode only).
    pub audit_fraction: f64,
    /// Seed for drawing the audited tuples; combined with the prefix
    /// index, so the audit set does not depend on thread scheduling.
    pub audit_seed: u64,
    /// Whether to keep per-instance catalogue records.
    pub catalogue: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: DEFAULT_BUDGET,
            audit_fraction: 0.01,
            audit_seed: 0xA0D17,
            catalogue: false,
        }
    }
}

/// Summary of one enumeration run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumReport {
    /// Grid rows.
    pub n: usize,
    /// Grid columns.
    pub m: usize,
    /// `"exhaustive"` or `"sampled"`.
    pub mode: String,
    /// Tuples examined.
    pub total: u64,
    /// Tuples satisfying the defining identity.
    pub passing: u64,
    /// Passing tuples the classifier rejected (must stay zero).
    pub classify_failures: u64,
    /// Classified tuples whose reconstruction differed (must stay zero).
    pub roundtrip_failures: u64,
    /// Tuples re-checked by the independent evaluator.
    pub audited: u64,
    /// Audited tuples where the two evaluators disagreed (must stay zero).
    pub audit_mismatches: u64,
    /// Occurrences of each block shape across passing tuples, plus
    /// `"no_blocks"` for fully degenerate tuples.
    pub block_histogram: BTreeMap<String, u64>,
    /// Up to five serialized instances that failed classification or
    /// round-trip, for debugging.
    pub failure_examples: Vec<String>,
}

/// One catalogue entry: a passing instance and its canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogueRecord {
    /// The instance serialization (sort key for catalogue output).
    pub instance_text: String,
    /// Canonical-form JSON.
    pub canonical_json: String,
}

/// Result of an enumeration: the summary plus catalogue records (empty
/// unless requested).
#[derive(Clone, Debug)]
pub struct EnumOutcome {
    /// Run summary.
    pub report: EnumReport,
    /// Catalogue records of passing tuples, in enumeration order.
    pub records: Vec<CatalogueRecord>,
}

/// Decodes `index` into `count` digits in base `space`, least significant
/// digit first.
fn decode_tables(mut index: u64, count: usize, space: u64) -> Vec<u32> {
    let mut tables = Vec::with_capacity(count);
    for _ in 0..count {
        tables.push((index % space) as u32);
        index /= space;
    }
    tables
}

fn table_to_fn(arity: usize, raw: u32) -> BooleanFunction {
    BooleanFunction::from_words(arity, vec![raw as u64]).expect("raw table fits one word")
}

/// Sign table decoded positionally from a raw truth table, for the
/// independent evaluator.
fn signs_of(raw: u32, arity: usize) -> Vec<i8> {
    (0..1usize << arity)
        .map(|t| if raw >> t & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Shannon-expansion evaluation: split the table on the last variable and
/// recurse. Works on explicit sign vectors; shares no machinery with
/// `BooleanFunction::eval`.
fn shannon_eval(table: &[i8], point: &[i8]) -> i8 {
    if point.is_empty() {
        return table[0];
    }
    let half = table.len() / 2;
    let (plus_half, minus_half) = table.split_at(half);
    let last = point[point.len() - 1];
    let sub = if last == -1 { minus_half } else { plus_half };
    shannon_eval(sub, &point[..point.len() - 1])
}

/// Independent check of the defining identity: walks every grid point as
/// an explicit sign vector and evaluates all functions by Shannon
/// expansion.
fn naive_holds(n: usize, m: usize, f_raw: &[u32], g_raw: &[u32]) -> bool {
    let f_signs: Vec<Vec<i8>> = f_raw.iter().map(|&r| signs_of(r, n)).collect();
    let g_signs: Vec<Vec<i8>> = g_raw.iter().map(|&r| signs_of(r, m)).collect();
    let cells = n * m;
    let mut z = vec![1i8; cells];
    loop {
        let mut g_out = Vec::with_capacity(n);
        for i in 1..=n {
            let row = &z[(i - 1) * m..i * m];
            g_out.push(shannon_eval(&g_signs[i], row));
        }
        let mut f_out = Vec::with_capacity(m);
        for j in 1..=m {
            let col: Vec<i8> = (1..=n).map(|i| z[(i - 1) * m + (j - 1)]).collect();
            f_out.push(shannon_eval(&f_signs[j], &col));
        }
        if shannon_eval(&f_signs[0], &g_out) != shannon_eval(&g_signs[0], &f_out) {
            return false;
        }
        // Odometer over sign vectors.
        let mut idx = 0;
        loop {
            if idx == cells {
                return true;
            }
            if z[idx] == 1 {
                z[idx] = -1;
                break;
            }
            z[idx] = 1;
            idx += 1;
        }
    }
}

/// Per-instance pipeline shared by both modes: classify, round-trip, and
/// record.
struct InstanceStats {
    classify_failures: u64,
    roundtrip_failures: u64,
    block_histogram: BTreeMap<String, u64>,
    failure_examples: Vec<String>,
    records: Vec<CatalogueRecord>,
}

impl InstanceStats {
    fn new() -> Self {
        InstanceStats {
            classify_failures: 0,
            roundtrip_failures: 0,
            block_histogram: BTreeMap::new(),
            failure_examples: Vec::new(),
            records: Vec::new(),
        }
    }

    fn note_failure(&mut self, p: &PolymorphismInstance) {
        if self.failure_examples.len() < 5 {
            self.failure_examples.push(p.to_text());
        }
    }

    fn process(&mut self, p: &PolymorphismInstance, keep_records: bool) {
        let form = match classify(p) {
            Ok(form) => form,
            Err(_) => {
                self.classify_failures += 1;
                self.note_failure(p);
                return;
            }
        };
        match reconstruct(&form) {
            Ok(rebuilt) if rebuilt == *p => {}
            _ => {
                self.roundtrip_failures += 1;
                self.note_failure(p);
                return;
            }
        }
        if form.blocks.is_empty() {
            *self.block_histogram.entry("no_blocks".into()).or_default() += 1;
        }
        for block in &form.blocks {
            let key = match block.class {
                BlockClass::Singleton { .. } => "singleton",
                BlockClass::XorLike { .. } => "xor_like",
                BlockClass::AndOrLike { .. } => "and_or_like",
            };
            *self.block_histogram.entry(key.into()).or_default() += 1;
        }
        if keep_records {
            self.records.push(CatalogueRecord {
                instance_text: p.to_text(),
                canonical_json: form.to_json(),
            });
        }
    }

    fn merge(&mut self, other: InstanceStats) {
        self.classify_failures += other.classify_failures;
        self.roundtrip_failures += other.roundtrip_failures;
        for (key, count) in other.block_histogram {
            *self.block_histogram.entry(key).or_default() += count;
        }
        for example in other.failure_examples {
            if self.failure_examples.len() < 5 {
                self.failure_examples.push(example);
            }
        }
        self.records.extend(other.records);
    }
}

struct PrefixOutcome {
    passing: u64,
    audited: u64,
    audit_mismatches: u64,
    stats: InstanceStats,
}

/// Exhaustively enumerates all function tuples on an `n x m` grid.
/// The work is split over inner-`f` prefixes and parallelized; results
/// are merged in prefix order, so the outcome does not depend on the
/// number of threads.
pub fn enumerate_exhaustive(n: usize, m: usize, opts: &EnumOptions) -> Result<EnumOutcome> {
    if n == 0 || m == 0 {
        return Err(Error::Validation(
            "enumeration needs at least one row and one column".into(),
        ));
    }
    let cost = enumeration_cost(n, m);
    if cost > opts.budget {
        return Err(Error::Resource(format!(
            "exhaustive enumeration of a {n} x {m} grid costs {cost}, budget is {}",
            opts.budget
        )));
    }
    if n > 4 || m > 4 {
        return Err(Error::Resource(
            "exhaustive enumeration supports at most 4 rows and 4 columns".into(),
        ));
    }

    let f_points = 1usize << n; // truth table length of an f
    let g_points = 1usize << m;
    let f_space = 1u64 << f_points; // number of f tables
    let g_space = 1u64 << g_points;
    let prefix_count = f_space.pow(m as u32);
    let g_combo_count = g_space.pow(n as u32);
    let tuples_per_prefix = g_combo_count * f_space * g_space;

    let audit_per_prefix = if opts.audit_fraction > 0.0 {
        ((tuples_per_prefix as f64 * opts.audit_fraction).ceil() as u64).min(tuples_per_prefix)
    } else {
        0
    };

    let outcomes: Vec<PrefixOutcome> = (0..prefix_count)
        .into_par_iter()
        .map(|prefix| {
            process_prefix(
                n,
                m,
                prefix,
                g_combo_count,
                f_space,
                g_space,
                audit_per_prefix,
                opts,
            )
        })
        .collect();

    let mut report = EnumReport {
        n,
        m,
        mode: "exhaustive".into(),
        total: prefix_count * tuples_per_prefix,
        passing: 0,
        classify_failures: 0,
        roundtrip_failures: 0,
        audited: 0,
        audit_mismatches: 0,
        block_histogram: BTreeMap::new(),
        failure_examples: Vec::new(),
    };
    let mut stats = InstanceStats::new();
    for outcome in outcomes {
        report.passing += outcome.passing;
        report.audited += outcome.audited;
        report.audit_mismatches += outcome.audit_mismatches;
        stats.merge(outcome.stats);
    }
    report.classify_failures = stats.classify_failures;
    report.roundtrip_failures = stats.roundtrip_failures;
    report.block_histogram = stats.block_histogram;
    report.failure_examples = stats.failure_examples;
    Ok(EnumOutcome {
        report,
        records: stats.records,
    })
}

#[allow(clippy::too_many_arguments)]
fn process_prefix(
    n: usize,
    m: usize,
    prefix: u64,
    g_combo_count: u64,
    f_space: u64,
    g_space: u64,
    audit_per_prefix: u64,
    opts: &EnumOptions,
) -> PrefixOutcome {
    let f_inner: Vec<u32> = decode_tables(prefix, m, f_space);
    let grid_points = 1u32 << (n * m);
    let row_mask = (1u32 << m) - 1;

    // Audit plan: tuple indices within this prefix, drawn once from a
    // prefix-keyed seed and consumed in enumeration order.
    let tuples_per_prefix = g_combo_count * f_space * g_space;
    let mut audit_plan: Vec<u64> = if audit_per_prefix > 0 {
        let mut rng =
            ChaCha8Rng::seed_from_u64(opts.audit_seed ^ prefix.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        (0..audit_per_prefix)
            .map(|_| rng.gen_range(0..tuples_per_prefix))
            .collect()
    } else {
        Vec::new()
    };
    audit_plan.sort_unstable();
    audit_plan.dedup();
    let mut audit_next = 0usize;

    let mut outcome = PrefixOutcome {
        passing: 0,
        audited: 0,
        audit_mismatches: 0,
        stats: InstanceStats::new(),
    };

    let mut reachable = vec![0u32; 1 << n];
    for g_combo in 0..g_combo_count {
        let g_inner: Vec<u32> = decode_tables(g_combo, n, g_space);

        // Reachable (u, v) pairs over the whole grid.
        for entry in reachable.iter_mut() {
            *entry = 0;
        }
        for z in 0..grid_points {
            let mut u = 0u32;
            for (i, &table) in g_inner.iter().enumerate() {
                let row = (z >> (i * m)) & row_mask;
                u |= ((table >> row) & 1) << i;
            }
            let mut v = 0u32;
            for (j, &table) in f_inner.iter().enumerate() {
                let mut col = 0u32;
                for i in 0..n {
                    col |= ((z >> (i * m + j)) & 1) << i;
                }
                v |= ((table >> col) & 1) << j;
            }
            reachable[u as usize] |= 1 << v;
        }

        for f0 in 0..f_space {
            // Fold reachable v sets by the value f0 assigns to u.
            let mut need_plus = 0u32; // v's where g0 must be +1
            let mut need_minus = 0u32;
            for (u, &vs) in reachable.iter().enumerate() {
                if (f0 >> u) & 1 == 1 {
                    need_minus |= vs;
                } else {
                    need_plus |= vs;
                }
            }
            for g0 in 0..g_space {
                let holds = g0 as u32 & need_plus == 0 && need_minus & !(g0 as u32) == 0;
                let tuple_index = (g_combo * f_space + f0) * g_space + g0;
                if audit_next < audit_plan.len() && audit_plan[audit_next] == tuple_index {
                    audit_next += 1;
                    outcome.audited += 1;
                    let mut f_raw = vec![f0 as u32];
                    f_raw.extend(&f_inner);
                    let mut g_raw = vec![g0 as u32];
                    g_raw.extend(&g_inner);
                    if naive_holds(n, m, &f_raw, &g_raw) != holds {
                        outcome.audit_mismatches += 1;
                    }
                }
                if !holds {
                    continue;
                }
                outcome.passing += 1;
                let mut fs = Vec::with_capacity(m + 1);
                fs.push(table_to_fn(n, f0 as u32));
                fs.extend(f_inner.iter().map(|&raw| table_to_fn(n, raw)));
                let mut gs = Vec::with_capacity(n + 1);
                gs.push(table_to_fn(m, g0 as u32));
                gs.extend(g_inner.iter().map(|&raw| table_to_fn(m, raw)));
                let p = PolymorphismInstance::new(n, m, fs, gs)
                    .expect("enumerated tables have the right arities");
                outcome.stats.process(&p, opts.catalogue);
            }
        }
    }
    outcome
}

/// Draws `samples` random tuples on an `n x m` grid and runs the
/// per-instance pipeline on those satisfying the identity. Used for grids
/// beyond the exhaustive budget; deterministic in the seed.
pub fn enumerate_sampled(
    n: usize,
    m: usize,
    samples: u64,
    seed: u64,
    opts: &EnumOptions,
) -> Result<EnumOutcome> {
    if n == 0 || m == 0 {
        return Err(Error::Validation(
            "enumeration needs at least one row and one column".into(),
        ));
    }
    if n > crate::boolean_fn::MAX_ARITY || m > crate::boolean_fn::MAX_ARITY {
        return Err(Error::Resource(format!(
            "grid {n} x {m} exceeds the supported arity"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_fn = |arity: usize| {
        BooleanFunction::from_fn(arity, |_| if rng.gen_bool(0.5) { -1 } else { 1 })
    };
    let mut passing = 0u64;
    let mut stats = InstanceStats::new();
    for _ in 0..samples {
        let fs: Vec<BooleanFunction> = (0..=m).map(|_| random_fn(n)).collect();
        let gs: Vec<BooleanFunction> = (0..=n).map(|_| random_fn(m)).collect();
        let p = PolymorphismInstance::new(n, m, fs, gs)?;
        if check_auto(&p)? {
            passing += 1;
            stats.process(&p, opts.catalogue);
        }
    }
    let report = EnumReport {
        n,
        m,
        mode: "sampled".into(),
        total: samples,
        passing,
        classify_failures: stats.classify_failures,
        roundtrip_failures: stats.roundtrip_failures,
        audited: 0,
        audit_mismatches: 0,
        block_histogram: stats.block_histogram,
        failure_examples: stats.failure_examples,
    };
    Ok(EnumOutcome {
        report,
        records: stats.records,
    })
}

/// Writes catalogue records as newline-delimited canonical-form JSON,
/// sorted by the instance serialization. The output is byte-identical
/// across runs and thread counts.
pub fn write_catalogue<W: Write>(records: &[CatalogueRecord], mut out: W) -> Result<()> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].instance_text.cmp(&records[b].instance_text));
    for idx in order {
        out.write_all(records[idx].canonical_json.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
