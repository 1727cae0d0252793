//! Small, auditable ensembles of random-looking linear codes measured
//! against the Gilbert–Varshamov rate/distance trade-off.
//!
//! A uniformly random generator matrix meets the GV bound with overwhelming
//! probability, but certifying any single matrix means computing its exact
//! minimum distance. This module materializes a *small* family of candidate
//! generator matrices from a seeded bit source — either a seeded stream
//! cipher or an NW-style design generator driven by a caller-supplied
//! boolean function — computes every member's exact distance by enumeration,
//! and reports the fraction of the family clearing the entropy threshold.
//! The boolean function is an opaque caller choice: nothing here asserts or
//! relies on any hardness property of it.

use crate::caps;
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::lincode::{canonical_field_of_size, LinearCode, QMatrix};
use crate::prand::{nw_generate, NwDesign};
use crate::probdist::hq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// How a seed's bit stream fills its generator matrix: entries are laid out
/// row by row, and multi-bit alphabet symbols take their bits most
/// significant first.
pub const BIT_LAYOUT: &str = "row-major, most significant bit first";

/// A boolean function given extensionally: entry `x` of the table is `f(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    bits: Vec<u8>,
}

impl TruthTable {
    /// Wrap an explicit table of `2^arity` bits.
    pub fn new(arity: usize, bits: Vec<u8>) -> Result<TruthTable> {
        if arity == 0 || arity > 24 {
            return Err(Error::BadParams(format!(
                "truth-table arity must lie in 1..=24, got {arity}"
            )));
        }
        let want = 1usize << arity;
        if bits.len() != want {
            return Err(Error::LengthMismatch { expected: want, got: bits.len() });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::BadParams("truth-table entries must be bits".into()));
        }
        Ok(TruthTable { arity, bits })
    }

    /// Tabulate `f` over all `2^arity` inputs (only the low output bit is kept).
    pub fn from_fn(arity: usize, f: impl Fn(u64) -> u64) -> Result<TruthTable> {
        if arity == 0 || arity > 24 {
            return Err(Error::BadParams(format!(
                "truth-table arity must lie in 1..=24, got {arity}"
            )));
        }
        let bits = (0..1u64 << arity).map(|x| (f(x) & 1) as u8).collect();
        TruthTable::new(arity, bits)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of inputs mapped to 1.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.ones() == self.bits.len()
    }

    /// Evaluate on an `arity`-bit input. Panics outside `0..2^arity`.
    pub fn eval(&self, x: u64) -> u64 {
        u64::from(self.bits[x as usize])
    }

    /// FNV-1a digest of the table, for compact descriptors.
    pub fn fnv64(&self) -> u64 {
        self.bits
            .iter()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
    }
}

/// Where the matrix entries come from.
pub enum GVSource {
    /// A seeded stream cipher; seed `u` of the ensemble reads stream `u` of
    /// the master seed and draws one uniform symbol per entry.
    Rng { seed: u64 },
    /// The design generator: output bit `i` of ensemble seed `u` is
    /// `table(u restricted to design set i)`, one evaluation per bit.
    Nw { table: TruthTable, design: NwDesign },
}

impl GVSource {
    /// Compact JSON descriptor (the table is digested, not inlined).
    pub fn descriptor_json(&self) -> Value {
        match self {
            GVSource::Rng { seed } => json!({ "kind": "rng", "seed": seed }),
            GVSource::Nw { table, design } => json!({
                "kind": "nw",
                "arity": table.arity(),
                "table_ones": table.ones(),
                "table_fnv": format!("{:#018x}", table.fnv64()),
                "universe": design.universe(),
                "set_size": design.set_size(),
                "overlap_cap": design.intersection_cap(),
                "sets": design.sets().len(),
            }),
        }
    }
}

/// The audited ensemble: one exact minimum distance per seed, the entropy
/// threshold for the `(n, k, q)` shape, and the fraction clearing it.
#[derive(Clone, Debug, PartialEq)]
pub struct GVEnsembleReport {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    /// Which bit source produced the matrices (JSON descriptor).
    pub source: Value,
    /// Ensemble size; seeds are `0..count`.
    pub count: usize,
    /// Exact minimum distance per seed. A recorded 0 marks a seed whose
    /// matrix lost its designed dimension: some nonzero message encodes to
    /// the zero word, so no distance-`d >= 1` claim can stand at dimension `k`.
    pub distances: Vec<usize>,
    /// Seeds whose matrices have dependent rows (exactly those recorded 0).
    pub rank_deficient: Vec<usize>,
    /// Threshold distance `d*`.
    pub d_star: usize,
    /// `|{seeds with distance >= d*}| / count`.
    pub fraction: f64,
    /// Design-driven bits consumed per seed, one function evaluation each;
    /// absent for the rng source, which draws symbols rather than bits.
    pub bits_per_seed: Option<usize>,
    /// How the bit stream fills the matrix.
    pub layout: &'static str,
}

impl GVEnsembleReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "q": self.q,
            "source": self.source,
            "count": self.count,
            "distances": self.distances,
            "rank_deficient": self.rank_deficient,
            "d_star": self.d_star,
            "fraction": self.fraction,
            "bits_per_seed": self.bits_per_seed,
            "layout": self.layout,
        })
    }
}

/// The rate the Gilbert–Varshamov bound guarantees at relative distance
/// `delta`: `max(0, 1 - h_q(delta))`.
pub fn gv_rate(q: u64, delta: f64) -> Result<f64> {
    Ok((1.0 - hq(q, delta)?).max(0.0))
}

/// The threshold distance `d*`: the smallest `d` in `[1, n]` with
/// `k >= n(1 - h_q(d/n))`.
///
/// The superlevel sets of the entropy function are single contiguous
/// intervals, so along the rising side of the curve — where every
/// realizable `[n, k]` distance lives — `d >= d*` is equivalent to the
/// displayed inequality; phrasing the audit as a threshold keeps codes that
/// beat the bound outright counted as meeting it.
pub fn gv_threshold(n: usize, k: usize, q: u64) -> Result<usize> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    for d in 1..=n {
        if k as f64 >= n as f64 * (1.0 - hq(q, d as f64 / n as f64)?) {
            return Ok(d);
        }
    }
    Err(Error::Infeasible(format!("no distance in [1, {n}] satisfies the bound at k={k}")))
}

fn guard(what: &str, work: u128) -> Result<()> {
    let cap = caps::current().enumerate;
    if work > cap {
        return Err(Error::TooLarge { what: format!("{what} ({work} steps)"), limit: cap });
    }
    Ok(())
}

/// A source checked against one `(n, k, q)` shape, ready to mint matrices.
enum Compiled<'a> {
    Rng { master: u64 },
    Nw { table: &'a TruthTable, design: NwDesign, bits_per_symbol: usize, need: usize },
}

fn compile<'a>(n: usize, k: usize, q: u64, source: &'a GVSource) -> Result<(FieldCtx, Compiled<'a>)> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let field = canonical_field_of_size(q)?;
    match source {
        GVSource::Rng { seed } => Ok((field, Compiled::Rng { master: *seed })),
        GVSource::Nw { table, design } => {
            if !q.is_power_of_two() {
                return Err(Error::BadParams(format!(
                    "bit-exact symbol packing needs a power-of-two alphabet, got q={q}"
                )));
            }
            let bits_per_symbol = q.trailing_zeros() as usize;
            if table.arity() != design.set_size() {
                return Err(Error::ArityMismatch {
                    expected: table.arity(),
                    got: design.set_size(),
                });
            }
            let need = n * k * bits_per_symbol;
            // Exactly one design set per output bit: a longer design is cut
            // down so evaluations and consumed bits stay in bijection.
            let design = design.prefix(need)?;
            Ok((field, Compiled::Nw { table, design, bits_per_symbol, need }))
        }
    }
}

impl Compiled<'_> {
    fn matrix_for(&self, field: &FieldCtx, n: usize, k: usize, index: usize) -> Result<QMatrix> {
        match self {
            Compiled::Rng { master } => {
                let mut rng = ChaCha20Rng::seed_from_u64(*master);
                rng.set_stream(index as u64);
                let q = field.q();
                let entries: Vec<u64> = (0..n * k).map(|_| rng.gen_range(0..q)).collect();
                Ok(QMatrix::from_fn(field.clone(), k, n, |r, c| entries[r * n + c]))
            }
            Compiled::Nw { table, design, bits_per_symbol, need } => {
                let t = design.universe();
                if t < 128 && (index as u128) >= (1u128 << t) {
                    return Err(Error::BadRange(format!(
                        "seed index {index} lies outside the design's 2^{t} seed space"
                    )));
                }
                let seed: Vec<u64> = (0..t).map(|j| ((index as u128) >> j) as u64 & 1).collect();
                let f = |x: u64| table.eval(x);
                let bits = nw_generate(&f, table.arity(), design, &seed)?;
                debug_assert_eq!(bits.len(), *need);
                Ok(QMatrix::from_fn(field.clone(), k, n, |r, c| {
                    let e = (r * n + c) * bits_per_symbol;
                    bits[e..e + bits_per_symbol].iter().fold(0u64, |acc, &b| (acc << 1) | b)
                }))
            }
        }
    }
}

/// Materialize the `index`-th generator matrix a source would feed into the
/// ensemble: `k` rows, `n` columns, entries laid out per [`BIT_LAYOUT`].
pub fn source_matrix(n: usize, k: usize, q: u64, source: &GVSource, index: usize) -> Result<QMatrix> {
    let (field, compiled) = compile(n, k, q, source)?;
    compiled.matrix_for(&field, n, k, index)
}

/// Run the pipeline: mint `count` generator matrices from the source,
/// compute each member's exact minimum distance, and audit the family
/// against the threshold `d*`. Per-seed distances run in parallel; the
/// report is assembled in seed order and replays bit-for-bit.
pub fn derandomized_ensemble(
    n: usize,
    k: usize,
    q: u64,
    source: &GVSource,
    count: usize,
) -> Result<GVEnsembleReport> {
    if count == 0 {
        return Err(Error::BadParams("an ensemble needs at least one seed".into()));
    }
    let (field, compiled) = compile(n, k, q, source)?;
    let per_code = (q as u128)
        .checked_pow(k as u32)
        .and_then(|cw| cw.checked_mul(n as u128))
        .ok_or(Error::TooLarge {
            what: "codeword enumeration q^k * n".into(),
            limit: caps::current().enumerate,
        })?;
    guard("ensemble distance audit", per_code.saturating_mul(count as u128))?;
    if let Compiled::Nw { design, .. } = &compiled {
        let t = design.universe();
        if t < 128 && (count as u128) > (1u128 << t) {
            return Err(Error::BadParams(format!(
                "count {count} exceeds the 2^{t} seeds the design universe offers"
            )));
        }
    }
    let per: Vec<(usize, bool)> = (0..count)
        .into_par_iter()
        .map(|u| -> Result<(usize, bool)> {
            let mat = compiled.matrix_for(&field, n, k, u)?;
            if mat.rank() < k {
                return Ok((0, true));
            }
            Ok((LinearCode::from_generator(mat)?.min_distance()?, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<usize> = per.iter().map(|&(d, _)| d).collect();
    let rank_deficient: Vec<usize> =
        per.iter().enumerate().filter(|&(_, &(_, bad))| bad).map(|(u, _)| u).collect();
    let d_star = gv_threshold(n, k, q)?;
    let meeting = distances.iter().filter(|&&d| d >= d_star).count();
    let bits_per_seed = match &compiled {
        Compiled::Rng { .. } => None,
        Compiled::Nw { need, .. } => Some(*need),
    };
    Ok(GVEnsembleReport {
        n,
        k,
        q,
        source: source.descriptor_json(),
        count,
        distances,
        rank_deficient,
        d_star,
        fraction: meeting as f64 / count as f64,
        bits_per_seed,
        layout: BIT_LAYOUT,
    })
}

/// Recount the meeting fraction from the raw distances.
pub fn gv_fraction(report: &GVEnsembleReport) -> Result<f64> {
    if report.count == 0 {
        return Err(Error::BadParams("ensemble is empty".into()));
    }
    if report.distances.len() != report.count {
        return Err(Error::LengthMismatch {
            expected: report.count,
            got: report.distances.len(),
        });
    }
    Ok(report.distances.iter().filter(|&&d| d >= report.d_star).count() as f64
        / report.count as f64)
}
