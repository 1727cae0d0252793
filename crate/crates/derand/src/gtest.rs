//! Group-testing measurement matrices: constructions, decoders, and
//! brute-force property verifiers.
//!
//! An `m × n` Boolean *measurement matrix* `M` pools `n` items into `m`
//! tests. A defective set of at most `d` items is a `d`-sparse indicator
//! vector `x ∈ {0,1}^n`, and one round of non-adaptive testing returns the
//! OR-measurement `M[x]`: row `i` fires iff test `i` contains a defective
//! item. Everything in this module revolves around matrices whose
//! combinatorics make `x` recoverable from a (possibly corrupted) `M[x]`:
//!
//! * **Disjunct** `(d, e)`: every column escapes the union of any `d`
//!   others in more than `e` rows. Guarantees exact recovery from
//!   measurements with up to `⌊e/2⌋` flipped rows via [`distance_decode`].
//! * **Strongly disjunct** `(d, e; u)`: every intersection of `u` columns
//!   escapes the union of any `d` others in more than `e` rows — the
//!   `u`-threshold analogue where a test fires only when `u` defectives
//!   meet it.
//! * **Regular** `(d, e; u)`: every critical set `S` (`u ≤ |S| ≤ d`) and
//!   disjoint zero set `Z` (`|Z| ≤ |S|`) leave more than `e` rows that hit
//!   `S` exactly `u` times and miss `Z` entirely. A combinatorial
//!   primitive used to lift classic disjunct matrices to threshold ones.
//! * **Threshold-disjunct** `(d, e; u, g)`: regular, plus every choice of
//!   `g+1` designated columns inside the critical set must be fully
//!   covered by the qualifying rows.
//! * **Resilient** `(e₀, e₁, e'₀, e'₁)` for `d`-sparse vectors: approximate
//!   recovery — measurements that are `(e₀, e₁)`-close force the inputs to
//!   be `(e'₀+e'₁, e'₀+e'₁)`-close (the pairwise form of the guarantee,
//!   which is what the exhaustive verifier checks).
//!
//! Constructions come in four flavours: dense random ensembles
//! ([`random_matrix`]), the Kautz–Singleton symbol-indicator expansion of a
//! linear code ([`ks_matrix`]), codeword graphs of seeded linear maps
//! ([`cond_graph_matrix`], decoded by agreement voting), and the stacked
//! subset-expansion of a condenser family ([`cond_regular_matrix`]), with
//! [`direct_product`] composing a regular and a disjunct matrix into a
//! threshold-disjunct one.
//!
//! Every matrix carries a claims ledger. Constructions record what their
//! parameters promise with status `Claimed`; only [`verify_matrix`] — an
//! exhaustive scan over the defining quantifiers — upgrades a claim to
//! `Verified` or demotes it to `Refuted` with a concrete witness. Scans
//! larger than [`caps::current`]`().enumerate` combinations fail with
//! `TooLarge` rather than silently sampling; a separate
//! [`VerifyMode::Sampled`] mode exists and its outcome is labelled as such
//! (it can refute, but never verifies). Witnesses are deterministic: the
//! scan order is size-ascending then lexicographic, workers race only
//! within strata and the earliest stratum wins.
//!
//! All row and column indices in this module are 0-based, including those
//! inside witnesses and claim/report JSON.

use crate::caps;
use crate::error::{Error, Result};
use crate::lincode::{canonical_field_of_size, LinearCode, QMatrix};
use crate::prand::{digits_of, index_of, Alphabet, Role, SeededMap};
use itertools::Itertools;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD] >> (i % WORD)) & 1 == 1
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / WORD] |= 1u64 << (i % WORD);
}

fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

/// `|supp(a) \ supp(b)|` on packed bit-vectors.
fn and_not_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones() as usize).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn is_disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn contains_all(row: &[u64], mask: &[u64]) -> bool {
    row.iter().zip(mask).all(|(r, m)| r & m == *m)
}

fn pack_indices(idx: &[usize], bits: usize) -> Vec<u64> {
    let mut w = vec![0u64; words_for(bits)];
    for &i in idx {
        set_bit(&mut w, i);
    }
    w
}

fn pack_bools(v: &[bool]) -> Vec<u64> {
    let mut w = vec![0u64; words_for(v.len())];
    for (i, &b) in v.iter().enumerate() {
        if b {
            set_bit(&mut w, i);
        }
    }
    w
}

/// Saturating binomial coefficient; anything that saturates is far beyond
/// every enumeration cap, so the loss of precision is harmless.
fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn guard_cap(what: &str, combos: u128) -> Result<()> {
    let cap = caps::current().enumerate;
    if combos > cap {
        return Err(Error::TooLarge { what: format!("{what} ({combos} combinations)"), limit: cap });
    }
    Ok(())
}

fn alphabet_size(a: &Alphabet) -> u64 {
    match a {
        Alphabet::Field(f) => f.q(),
        Alphabet::Plain(s) => *s,
    }
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A structural property a measurement matrix can claim. All tolerances
/// `e` are strict escape counts: the defining quantity must exceed `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixProperty {
    /// `(d, e)`-disjunct: for every column `C₀` and every `d` other
    /// columns, `|supp(C₀) \ ∪ᵢ supp(Cᵢ)| > e`.
    Disjunct { d: usize, e: usize },
    /// Strongly `(d, e; u)`-disjunct: for every `u` columns and every `d`
    /// further columns, `|∩ᵢ supp(Cᵢ) \ ∪ⱼ supp(C'ⱼ)| > e`.
    StronglyDisjunct { d: usize, e: usize, u: usize },
    /// `(d, e; u)`-regular: for every critical set `S` (`u ≤ |S| ≤ d`) and
    /// every disjoint zero set `Z` (`|Z| ≤ |S|`), more than `e` rows meet
    /// `S` in exactly `u` columns and avoid `Z` entirely.
    Regular { d: usize, e: usize, u: usize },
    /// `(d, e; u, g)`-disjunct: regular, and additionally every `g+1`
    /// designated columns `D ⊆ S` must be fully covered by more than `e`
    /// of the qualifying rows. `g = 0` is the threshold analogue of the
    /// classic property (one distinguished column).
    ThresholdDisjunct { d: usize, e: usize, u: usize, g: usize },
    /// `(e0, e1, ep0, ep1)`-resilient for `d`-sparse vectors, in the
    /// pairwise form: whenever two measurements are `(e0, e1)`-close
    /// (second obtained from first by ≤ `e0` extra ones and ≤ `e1`
    /// missing ones), the inputs are `(ep0+ep1, ep0+ep1)`-close.
    Resilient { e0: usize, e1: usize, ep0: usize, ep1: usize, d: usize },
}

impl fmt::Display for MatrixProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixProperty::Disjunct { d, e } => write!(f, "({d}, {e})-disjunct"),
            MatrixProperty::StronglyDisjunct { d, e, u } => {
                write!(f, "strongly ({d}, {e}; {u})-disjunct")
            }
            MatrixProperty::Regular { d, e, u } => write!(f, "({d}, {e}; {u})-regular"),
            MatrixProperty::ThresholdDisjunct { d, e, u, g } => {
                write!(f, "({d}, {e}; {u}, {g})-disjunct")
            }
            MatrixProperty::Resilient { e0, e1, ep0, ep1, d } => {
                write!(f, "({e0}, {e1}, {ep0}, {ep1})-resilient for {d}-sparse")
            }
        }
    }
}

/// Concrete refutation of a claimed property: the column sets instantiate
/// the failing quantifier (all indices 0-based). For disjunct, `primary`
/// is the escaping column and `secondary` the covering set; for strongly
/// disjunct, the intersected set and the covering set; for regular and
/// threshold-disjunct, the critical set and the zero set; for resilient,
/// the two input supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub primary: Vec<usize>,
    pub secondary: Vec<usize>,
    pub detail: String,
}

/// Lifecycle of a claim. Constructions record `Claimed`; only
/// [`verify_matrix`] ever sets `Verified` or `Refuted`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimStatus {
    Claimed,
    Verified,
    Refuted(Witness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub property: MatrixProperty,
    pub status: ClaimStatus,
}

/// Where a matrix came from: the construction name, its parameters, the
/// RNG seed if randomness was involved, and — for codeword graphs — the
/// seeded map itself, which the agreement decoder needs.
#[derive(Clone)]
pub struct Provenance {
    pub construction: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub map: Option<SeededMap>,
}

impl Provenance {
    fn bare(construction: &str, params: Value) -> Self {
        Provenance { construction: construction.into(), params, seed: None, map: None }
    }
}

/// Boolean `m × n` measurement matrix with packed rows, a claims ledger,
/// and construction provenance. Convertible to and from a `GF(2)`
/// [`QMatrix`] at the I/O boundary.
#[derive(Clone)]
pub struct MeasurementMatrix {
    m: usize,
    n: usize,
    words: usize,
    bits: Vec<u64>,
    pub claims: Vec<Claim>,
    pub provenance: Provenance,
}

impl MeasurementMatrix {
    fn blank(m: usize, n: usize, provenance: Provenance) -> Result<MeasurementMatrix> {
        if m == 0 || n == 0 {
            return Err(Error::BadParams(format!("matrix must be nonempty, got {m} x {n}")));
        }
        guard_cap("measurement matrix entries", (m as u128).saturating_mul(n as u128))?;
        let words = words_for(n);
        Ok(MeasurementMatrix {
            m,
            n,
            words,
            bits: vec![0u64; m * words],
            claims: Vec::new(),
            provenance,
        })
    }

    /// Build from explicit rows (all the same length).
    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Result<MeasurementMatrix> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut mat = MeasurementMatrix::blank(m, n, Provenance::bare("explicit", json!({})))?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for (j, &b) in row.iter().enumerate() {
                if b {
                    mat.set(i, j);
                }
            }
        }
        Ok(mat)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        get_bit(self.row_words(i), j)
    }

    fn set(&mut self, i: usize, j: usize) {
        let w = self.words;
        set_bit(&mut self.bits[i * w..(i + 1) * w], j);
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of ones in column `j`.
    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.m).filter(|&i| self.get(i, j)).count()
    }

    /// Columns as packed bit-vectors over the rows.
    fn column_views(&self) -> Vec<Vec<u64>> {
        let mw = words_for(self.m);
        let mut cols = vec![vec![0u64; mw]; self.n];
        for i in 0..self.m {
            let row = self.row_words(i);
            for (j, col) in cols.iter_mut().enumerate() {
                if get_bit(row, j) {
                    set_bit(col, i);
                }
            }
        }
        cols
    }

    /// Distinct rows with multiplicities; verification scans iterate these
    /// instead of raw rows so that stacked or repeated constructions cost
    /// no more than their distinct content.
    fn dedup_rows(&self) -> (Vec<u64>, Vec<u64>, usize) {
        let mut seen: HashMap<&[u64], usize> = HashMap::new();
        let mut flat: Vec<u64> = Vec::new();
        let mut mult: Vec<u64> = Vec::new();
        for i in 0..self.m {
            let row = self.row_words(i);
            if let Some(&k) = seen.get(row) {
                mult[k] += 1;
            } else {
                let k = mult.len();
                flat.extend_from_slice(row);
                mult.push(1);
                // Key borrows from `bits`, not from `flat`, so it stays valid.
                seen.insert(row, k);
            }
        }
        (flat, mult, self.words)
    }

    /// OR-measurement of the indicator vector with the given support.
    pub fn measure_support(&self, support: &[usize]) -> Result<Vec<bool>> {
        for &j in support {
            if j >= self.n {
                return Err(Error::BadRange(format!("column {j} out of range 0..{}", self.n)));
            }
        }
        let mask = pack_indices(support, self.n);
        Ok((0..self.m).map(|i| !is_disjoint(self.row_words(i), &mask)).collect())
    }

    /// OR-measurement of an explicit indicator vector.
    pub fn measure(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: x.len() });
        }
        let support: Vec<usize> = (0..self.n).filter(|&j| x[j]).collect();
        self.measure_support(&support)
    }

    /// Packed measurement over the rows, used by the verifiers.
    fn measure_words(&self, support_mask: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.m)];
        for i in 0..self.m {
            if !is_disjoint(self.row_words(i), support_mask) {
                set_bit(&mut out, i);
            }
        }
        out
    }

    /// Export as a `GF(2)` matrix (the interchange format).
    pub fn to_qmatrix(&self) -> Result<QMatrix> {
        let f2 = canonical_field_of_size(2)?;
        Ok(QMatrix::from_fn(f2, self.m, self.n, |i, j| u64::from(self.get(i, j))))
    }

    /// Import from a matrix with 0/1 entries (any field).
    pub fn from_qmatrix(q: &QMatrix) -> Result<MeasurementMatrix> {
        let mut mat = MeasurementMatrix::blank(
            q.rows(),
            q.cols(),
            Provenance::bare("imported", json!({})),
        )?;
        for i in 0..q.rows() {
            for j in 0..q.cols() {
                match q.get(i, j) {
                    0 => {}
                    1 => mat.set(i, j),
                    v => {
                        return Err(Error::BadParams(format!(
                            "entry ({i}, {j}) = {v}; measurement matrices are Boolean"
                        )))
                    }
                }
            }
        }
        Ok(mat)
    }

    /// Look up the claim for an exact property, if recorded.
    pub fn find_claim(&self, property: &MatrixProperty) -> Option<&Claim> {
        self.claims.iter().find(|c| &c.property == property)
    }

    fn upsert_claim(&mut self, property: &MatrixProperty, status: ClaimStatus) {
        if let Some(c) = self.claims.iter_mut().find(|c| &c.property == property) {
            c.status = status;
        } else {
            self.claims.push(Claim { property: property.clone(), status });
        }
    }

    /// The claims ledger (plus shape and provenance) as JSON, the payload
    /// of the `.claims.json` side-car written next to exported matrices.
    pub fn claims_json(&self) -> Value {
        let claims: Vec<Value> = self
            .claims
            .iter()
            .map(|c| {
                let prop = match &c.property {
                    MatrixProperty::Disjunct { d, e } => {
                        json!({"property": "disjunct", "d": d, "e": e})
                    }
                    MatrixProperty::StronglyDisjunct { d, e, u } => {
                        json!({"property": "strongly-disjunct", "d": d, "e": e, "u": u})
                    }
                    MatrixProperty::Regular { d, e, u } => {
                        json!({"property": "regular", "d": d, "e": e, "u": u})
                    }
                    MatrixProperty::ThresholdDisjunct { d, e, u, g } => {
                        json!({"property": "threshold-disjunct", "d": d, "e": e, "u": u, "g": g})
                    }
                    MatrixProperty::Resilient { e0, e1, ep0, ep1, d } => json!({
                        "property": "resilient",
                        "e0": e0, "e1": e1, "ep0": ep0, "ep1": ep1, "d": d
                    }),
                };
                let status = match &c.status {
                    ClaimStatus::Claimed => json!("claimed"),
                    ClaimStatus::Verified => json!("verified"),
                    ClaimStatus::Refuted(w) => json!({"refuted": {
                        "primary": w.primary,
                        "secondary": w.secondary,
                        "detail": w.detail,
                    }}),
                };
                json!({"claim": prop, "status": status, "display": c.property.to_string()})
            })
            .collect();
        json!({
            "rows": self.m,
            "cols": self.n,
            "construction": self.provenance.construction,
            "params": self.provenance.params,
            "seed": self.provenance.seed,
            "claims": claims,
        })
    }
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

/// Per-coordinate symbol sets over a common alphabet `0..alphabet`, with
/// the agreement and rate statistics used by the agreement decoder.
/// Coordinate sets may be empty (a coordinate no word can agree with).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mixture {
    sets: Vec<Vec<u64>>,
    alphabet: u64,
}

impl Mixture {
    pub fn new(sets: Vec<Vec<u64>>, alphabet: u64) -> Result<Mixture> {
        if alphabet == 0 || sets.is_empty() {
            return Err(Error::BadParams("mixture needs an alphabet and at least one coordinate".into()));
        }
        let mut clean = Vec::with_capacity(sets.len());
        for s in sets {
            let mut s = s;
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.last() {
                if v >= alphabet {
                    return Err(Error::BadRange(format!("symbol {v} outside alphabet 0..{alphabet}")));
                }
            }
            clean.push(s);
        }
        Ok(Mixture { sets: clean, alphabet })
    }

    pub fn coords(&self) -> usize {
        self.sets.len()
    }

    pub fn alphabet(&self) -> u64 {
        self.alphabet
    }

    pub fn set(&self, i: usize) -> &[u64] {
        &self.sets[i]
    }

    /// Number of coordinates where `w` lands inside the mixture.
    pub fn agreement_count(&self, w: &[u64]) -> Result<usize> {
        if w.len() != self.sets.len() {
            return Err(Error::LengthMismatch { expected: self.sets.len(), got: w.len() });
        }
        Ok(w.iter().zip(&self.sets).filter(|(v, s)| s.binary_search(v).is_ok()).count())
    }

    /// Fraction of coordinates where `w` lands inside the mixture.
    pub fn agreement(&self, w: &[u64]) -> Result<f64> {
        Ok(self.agreement_count(w)? as f64 / self.sets.len() as f64)
    }

    /// Total number of symbols across all coordinate sets.
    pub fn weight(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    /// Expected agreement of a uniformly random word: `weight / (n |Σ|)`.
    pub fn rate(&self) -> f64 {
        self.weight() as f64 / (self.sets.len() as f64 * self.alphabet as f64)
    }

    /// Strict agreement test: agreement must exceed `alpha`; at
    /// `alpha = 1` the threshold means full agreement.
    pub fn passes(&self, w: &[u64], alpha: f64) -> Result<bool> {
        let count = self.agreement_count(w)?;
        Ok(agreement_passes(count, self.sets.len(), alpha))
    }
}

fn agreement_passes(count: usize, total: usize, alpha: f64) -> bool {
    if alpha >= 1.0 - 1e-12 {
        count == total
    } else {
        count as f64 > alpha * total as f64 + 1e-9
    }
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

/// Which dense random ensemble [`random_matrix`] draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    /// Each entry is 1 with probability `1/d`; claims `(d, ⌊p·m·q(1−q)^d⌋)`-
    /// disjunct. `d = 1` degenerates (density 1), so it falls back to the
    /// identity matrix, which is `(n−1, 0)`-disjunct outright.
    Disjunct { n: usize, d: usize },
    /// Stacked scales of `(u+1)`-wise independent rows: `r = max(1,
    /// ⌈log₂(d/u)⌉)` blocks of `m` rows each, block `i ∈ {1..r}` with
    /// density `1/(2^{i+2}u)`. Claims `(d, ⌊p·m/(2^{3u+1}u^u)⌋; u)`-regular.
    /// The independence is realized by thresholding degree-`u` polynomials
    /// over a prime field — exact `(u+1)`-wise independence, with the
    /// density quantized to a multiple of `1/P`.
    Regular { n: usize, d: usize, u: usize },
}

/// Draw a matrix from a random ensemble. `m` is the number of rows (per
/// block, for the regular kind), `p ∈ [0, 1)` the error-tolerance knob in
/// the claimed tolerance, and `seed` fixes the draw. Claims start as
/// `Claimed`: the ensembles deliver their parameters with high probability
/// at scale, not pointwise, so each instance must be checked by
/// [`verify_matrix`] before the claim is trusted.
pub fn random_matrix(kind: RandomKind, m: usize, p: f64, seed: u64) -> Result<MeasurementMatrix> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadParams(format!("tolerance fraction must be in [0, 1), got {p}")));
    }
    if m == 0 {
        return Err(Error::BadParams("need at least one row".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match kind {
        RandomKind::Disjunct { n, d } => {
            if n < 2 || d == 0 || d >= n {
                return Err(Error::BadParams(format!("need 1 <= d < n, got d={d}, n={n}")));
            }
            if d == 1 {
                let mut mat = MeasurementMatrix::blank(
                    n,
                    n,
                    Provenance {
                        construction: "random-disjunct".into(),
                        params: json!({"n": n, "d": 1, "identity_fallback": true}),
                        seed: Some(seed),
                        map: None,
                    },
                )?;
                for j in 0..n {
                    mat.set(j, j);
                }
                mat.claims.push(Claim {
                    property: MatrixProperty::Disjunct { d: n - 1, e: 0 },
                    status: ClaimStatus::Claimed,
                });
                return Ok(mat);
            }
            let q = 1.0 / d as f64;
            let mut mat = MeasurementMatrix::blank(
                m,
                n,
                Provenance {
                    construction: "random-disjunct".into(),
                    params: json!({"n": n, "d": d, "m": m, "p": p, "density": q}),
                    seed: Some(seed),
                    map: None,
                },
            )?;
            for i in 0..m {
                for j in 0..n {
                    if rng.gen::<f64>() < q {
                        mat.set(i, j);
                    }
                }
            }
            let e = (p * m as f64 * q * (1.0 - q).powi(d as i32)).floor() as usize;
            mat.claims.push(Claim {
                property: MatrixProperty::Disjunct { d, e },
                status: ClaimStatus::Claimed,
            });
            Ok(mat)
        }
        RandomKind::Regular { n, d, u } => {
            if u == 0 || d < u || n < 2 || d >= n {
                return Err(Error::BadParams(format!(
                    "need 1 <= u <= d < n, got u={u}, d={d}, n={n}"
                )));
            }
            let r = ((d as f64 / u as f64).log2().ceil() as usize).max(1);
            let prime = next_prime((n as u64).max(1u64 << (r + 2)).saturating_mul(u as u64).max(n as u64) * 64);
            let rows = r
                .checked_mul(m)
                .ok_or_else(|| Error::BadParams("row count overflow".into()))?;
            let mut mat = MeasurementMatrix::blank(
                rows,
                n,
                Provenance {
                    construction: "random-regular".into(),
                    params: json!({
                        "n": n, "d": d, "u": u, "rows_per_block": m, "blocks": r,
                        "p": p, "prime": prime
                    }),
                    seed: Some(seed),
                    map: None,
                },
            )?;
            for block in 1..=r {
                let density = 1.0 / ((1u64 << (block + 2)) as f64 * u as f64);
                let tau = ((prime as f64 * density).round() as u64).max(1);
                for row in 0..m {
                    let coeffs: Vec<u64> =
                        (0..=u).map(|_| rng.gen_range(0..prime)).collect();
                    let i = (block - 1) * m + row;
                    for j in 0..n {
                        let x = j as u64 % prime;
                        let mut h: u64 = 0;
                        for &c in &coeffs {
                            h = ((h as u128 * x as u128 + c as u128) % prime as u128) as u64;
                        }
                        if h < tau {
                            mat.set(i, j);
                        }
                    }
                }
            }
            let c = 1.0 / (2f64.powi(3 * u as i32 + 1) * (u as f64).powi(u as i32));
            let e = (p * m as f64 * c).floor() as usize;
            mat.claims.push(Claim {
                property: MatrixProperty::Regular { d, e, u },
                status: ClaimStatus::Claimed,
            });
            Ok(mat)
        }
    }
}

fn next_prime(from: u64) -> u64 {
    let mut candidate = from.max(2);
    loop {
        if is_prime(candidate) {
            return candidate;
        }
        candidate += 1;
    }
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= x {
        if x % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Kautz–Singleton symbol-indicator expansion of a linear code: each of
/// the `q^k` codewords becomes a column; each code coordinate becomes a
/// bank of `q^u` rows indexed by `u`-tuples over the alphabet, and a row
/// fires for a column iff the codeword's symbol at that coordinate occurs
/// in the row's tuple. For `u = 1` this is the classic unit-vector
/// replacement and the claims are plain disjunctness; for larger `u` every
/// `(d, e)` with `d < (ñ − e)/((ñ − d̃)u)` yields a strongly-disjunct
/// claim (`ñ` the code length, `d̃` its minimum distance). These claims
/// follow from the code's distance alone, but stay `Claimed` here — only
/// [`verify_matrix`] promotes.
pub fn ks_matrix(code: &LinearCode, u: usize) -> Result<MeasurementMatrix> {
    if u == 0 {
        return Err(Error::BadParams("tuple arity u must be at least 1".into()));
    }
    let q = code.field().q();
    let n_outer = code.n();
    let dist = match code.cached_distance() {
        Some(d) => d,
        None => code.min_distance()?,
    };
    let tuples = (q as u128).checked_pow(u as u32).ok_or(Error::TooLarge {
        what: format!("tuple bank q^u = {q}^{u}"),
        limit: caps::current().enumerate,
    })?;
    let n_cols = (q as u128).checked_pow(code.k() as u32).ok_or(Error::TooLarge {
        what: format!("column count q^k = {q}^{}", code.k()),
        limit: caps::current().enumerate,
    })?;
    let rows_u128 = (n_outer as u128).saturating_mul(tuples);
    guard_cap("measurement matrix entries", rows_u128.saturating_mul(n_cols))?;
    let rows = rows_u128 as usize;
    let cols = n_cols as usize;
    let mut mat = MeasurementMatrix::blank(
        rows,
        cols,
        Provenance::bare(
            "kautz-singleton",
            json!({
                "code": code.describe(), "q": q, "u": u,
                "outer_length": n_outer, "k": code.k(), "distance": dist
            }),
        ),
    )?;
    let codewords: Vec<Vec<u64>> = (0..cols)
        .map(|x| code.encode(&code.message_from_index(x as u64)))
        .collect::<Result<_>>()?;
    let tuples = tuples as usize;
    for i in 0..n_outer {
        for t in 0..tuples {
            let tuple = digits_of(t as u128, q, u);
            let row = i * tuples + t;
            for (x, cw) in codewords.iter().enumerate() {
                if tuple.contains(&cw[i]) {
                    mat.set(row, x);
                }
            }
        }
    }
    // One claim per error level e: the largest d with
    // d < (ñ − e)/((ñ − d̃)·u), clamped so d + u columns exist.
    let denom = (n_outer - dist) * u;
    for e in 0..n_outer {
        let d_max = if denom == 0 {
            cols.saturating_sub(u)
        } else {
            (n_outer - e).saturating_sub(1) / denom
        };
        let d_max = d_max.min(cols.saturating_sub(u));
        if d_max == 0 {
            continue;
        }
        let property = if u == 1 {
            MatrixProperty::Disjunct { d: d_max, e }
        } else {
            MatrixProperty::StronglyDisjunct { d: d_max, e, u }
        };
        mat.claims.push(Claim { property, status: ClaimStatus::Claimed });
    }
    Ok(mat)
}

/// Adjacency matrix of the codeword graph of the code induced by a seeded
/// map `f`: columns are inputs `x`, rows are (seed, output-value) pairs in
/// seed-major order, and entry `((y, v), x)` is 1 iff `f(x, y) = v`. Every
/// column has weight exactly `T` (one output per seed). When the map is a
/// lossless condenser for `k` bits with error `ε`, agreement decoding
/// recovers supersets of sparse supports: the matrix claims
/// `(0, 0, 2^k − d, 0)`-resilience for `d`-sparse vectors up to
/// `d = ⌈(1−ε)2^{k'}⌉ − 1` (`k' = k` for lossless condensers, `k' = ℓ̃`
/// the output length for extractors).
pub fn cond_graph_matrix(map: &SeededMap) -> Result<MeasurementMatrix> {
    let t = map.t_seeds();
    let l = map.out_domain();
    let n_cols = map.in_domain();
    let rows_u128 = (t as u128).saturating_mul(l);
    guard_cap("measurement matrix entries", rows_u128.saturating_mul(n_cols))?;
    let (t, l, n_cols) = (t as usize, l as usize, n_cols as usize);
    let in_alpha = alphabet_size(map.in_alphabet());
    let out_alpha = alphabet_size(map.out_alphabet());
    let kprime_bits = match map.role() {
        Role::LosslessCondenser => map.k_bits(),
        Role::Extractor => (l as f64).log2(),
    };
    let mut mat = MeasurementMatrix::blank(
        t * l,
        n_cols,
        Provenance {
            construction: "codeword-graph".into(),
            params: json!({
                "map": map.label(), "seeds": t, "symbols": l,
                "k_bits": map.k_bits(), "eps": map.eps(), "role": map.role().name(),
            }),
            seed: None,
            map: Some(map.clone()),
        },
    )?;
    for x in 0..n_cols {
        let digits = digits_of(x as u128, in_alpha, map.n_in());
        for y in 0..t {
            let out = map.eval(&digits, y as u64)?;
            let v = index_of(&out, out_alpha) as usize;
            mat.set(y * l + v, x);
        }
    }
    let d_max = ((1.0 - map.eps()) * 2f64.powf(kprime_bits)).ceil() as i64 - 1;
    if d_max >= 1 {
        let d_max = d_max as usize;
        let k_round = map.k_bits().round() as u32;
        let ep0 = (1usize << k_round).saturating_sub(d_max);
        mat.claims.push(Claim {
            property: MatrixProperty::Resilient { e0: 0, e1: 0, ep0, ep1: 0, d: d_max },
            status: ClaimStatus::Claimed,
        });
    }
    Ok(mat)
}

/// Row-wise OR product: rows indexed by pairs `(i, j)` (in `i`-major
/// order), row `(i, j)` the bitwise OR of row `i` of `a` and row `j` of
/// `b`. If `a` is verified `(d, e₁; u−1)`-regular and `b` is verified
/// `(2d, e₂)`-disjunct, the product claims `(d, (e₁+1)(e₂+1)−1; u, 0)`-
/// disjunct — regularity supplies rows pinning the critical set, and
/// disjunctness makes enough of them cover the distinguished column.
pub fn direct_product(a: &MeasurementMatrix, b: &MeasurementMatrix) -> Result<MeasurementMatrix> {
    if a.n != b.n {
        return Err(Error::ColumnMismatch(a.n, b.n));
    }
    let rows = (a.m as u128).saturating_mul(b.m as u128);
    guard_cap("measurement matrix entries", rows.saturating_mul(a.n as u128))?;
    let mut mat = MeasurementMatrix::blank(
        a.m * b.m,
        a.n,
        Provenance::bare(
            "direct-product",
            json!({
                "left": a.provenance.construction, "left_rows": a.m,
                "right": b.provenance.construction, "right_rows": b.m,
            }),
        ),
    )?;
    for i in 0..a.m {
        let ra = a.row_words(i);
        for j in 0..b.m {
            let rb = b.row_words(j);
            let dst = i * b.m + j;
            let w = mat.words;
            for k in 0..w {
                mat.bits[dst * w + k] = ra[k] | rb[k];
            }
        }
    }
    for ca in &a.claims {
        let (d1, e1, u1) = match (&ca.property, &ca.status) {
            (MatrixProperty::Regular { d, e, u }, ClaimStatus::Verified) => (*d, *e, *u),
            _ => continue,
        };
        for cb in &b.claims {
            let (d2, e2) = match (&cb.property, &cb.status) {
                (MatrixProperty::Disjunct { d, e }, ClaimStatus::Verified) => (*d, *e),
                _ => continue,
            };
            if d2 >= 2 * d1 {
                mat.claims.push(Claim {
                    property: MatrixProperty::ThresholdDisjunct {
                        d: d1,
                        e: (e1 + 1) * (e2 + 1) - 1,
                        u: u1 + 1,
                        g: 0,
                    },
                    status: ClaimStatus::Claimed,
                });
            }
        }
    }
    Ok(mat)
}

/// Stacked subset-expansion of a family of lossless condensers, one per
/// entropy level `k(i) = log₂ u' + i + 1` for `i = 0..=r`, where `u'` is
/// the smallest power of two ≥ `u` and `r` the smallest integer with
/// `u'·2^r ≥ d`. All maps must share the input length and seed count and
/// use binary alphabets.
///
/// Level `i` expands its condenser `f_i : {0,1}^ñ × [T] → {0,1}^ℓ̃` through
/// an explicit bi-regular bipartite graph: right vertex `v ∈ [2^{k(i)}]`
/// is adjacent to the `min(8u·2^{ℓ̃−k(i)}, 2^ℓ̃)` consecutive output values
/// starting at `v·2^{ℓ̃−k(i)}` (an arithmetic-progression neighbourhood;
/// at desk scale the nominal degree often exceeds `2^ℓ̃` and the
/// neighbourhood saturates to all outputs). Rows of the level are indexed
/// by (seed `y`, right vertex `v`, `u`-subset `U` of the neighbourhood) in
/// that order, and fire for `x` iff `f_i(x, y) ∈ U`. Level `i` is emitted
/// with each row repeated `2^{r−i}` consecutive times, so the total row
/// count is exactly `Σᵢ 2^{r−i}·T·2^{k(i)}·C(nbᵢ, u)`.
///
/// Claims `(d, ⌊p·T⌋; u)`-regular with the scale factor conservatively set
/// to 1 (the ensemble guarantee has an unspecified constant); instances
/// are meant to be checked by [`verify_matrix`].
pub fn cond_regular_matrix(
    d: usize,
    u: usize,
    p: f64,
    condensers: &[SeededMap],
) -> Result<MeasurementMatrix> {
    if u == 0 || d < u {
        return Err(Error::BadParams(format!("need 1 <= u <= d, got u={u}, d={d}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadParams(format!("tolerance fraction must be in [0, 1), got {p}")));
    }
    let u_prime = u.next_power_of_two();
    let mut r = 0usize;
    while u_prime << r < d {
        r += 1;
    }
    if condensers.len() != r + 1 {
        return Err(Error::BadParams(format!(
            "need one condenser per level 0..={r} ({} total), got {}",
            r + 1,
            condensers.len()
        )));
    }
    let n_cols_u128 = condensers[0].in_domain();
    let t = condensers[0].t_seeds();
    struct Level {
        l: usize,
        k: usize,
        stride: usize,
        nb: usize,
        m_rows: u128,
        rep: usize,
    }
    let mut levels = Vec::with_capacity(r + 1);
    let mut total_rows: u128 = 0;
    for (i, map) in condensers.iter().enumerate() {
        if map.role() != Role::LosslessCondenser {
            return Err(Error::BadParams(format!(
                "level {i} map has role {}, need a lossless condenser",
                map.role().name()
            )));
        }
        if alphabet_size(map.in_alphabet()) != 2 || alphabet_size(map.out_alphabet()) != 2 {
            return Err(Error::AlphabetMismatch(
                "condenser family must use binary alphabets".into(),
            ));
        }
        if map.in_domain() != n_cols_u128 || map.t_seeds() != t {
            return Err(Error::BadParams(
                "condenser family must share input length and seed count".into(),
            ));
        }
        let k_i = (u_prime.trailing_zeros() as usize) + i + 1;
        if (map.k_bits() - k_i as f64).abs() > 1e-6 {
            return Err(Error::BadParams(format!(
                "level {i} condenser targets {} entropy bits, need k({i}) = {k_i}",
                map.k_bits()
            )));
        }
        let ell = map.n_out();
        if ell < k_i {
            return Err(Error::Infeasible(format!(
                "level {i}: output length {ell} below entropy level {k_i}, expander degrees don't divide"
            )));
        }
        let l = 1usize << ell;
        let stride = 1usize << (ell - k_i);
        let nb = (8 * u * stride).min(l);
        if nb < u {
            return Err(Error::Infeasible(format!(
                "level {i}: neighbourhood of size {nb} cannot host {u}-subsets"
            )));
        }
        let m_rows = (t as u128)
            .saturating_mul(1u128 << k_i)
            .saturating_mul(binom(nb as u128, u as u128));
        let rep = 1usize << (r - i);
        total_rows = total_rows.saturating_add(m_rows.saturating_mul(rep as u128));
        levels.push(Level { l, k: k_i, stride, nb, m_rows, rep });
    }
    guard_cap("measurement matrix entries", total_rows.saturating_mul(n_cols_u128))?;
    let n_cols = n_cols_u128 as usize;
    let t = t as usize;
    let level_params: Vec<Value> = levels
        .iter()
        .map(|lv| {
            json!({
                "symbols": lv.l, "k": lv.k, "stride": lv.stride,
                "neighbourhood": lv.nb, "rows": lv.m_rows as u64, "repeat": lv.rep
            })
        })
        .collect();
    let mut mat = MeasurementMatrix::blank(
        total_rows as usize,
        n_cols,
        Provenance::bare(
            "condenser-regular-stack",
            json!({"d": d, "u": u, "p": p, "u_prime": u_prime, "levels": level_params, "seeds": t}),
        ),
    )?;
    let mut cursor = 0usize;
    for (map, lv) in condensers.iter().zip(&levels) {
        let in_alpha = alphabet_size(map.in_alphabet());
        let out_alpha = alphabet_size(map.out_alphabet());
        // f(x, y) for all columns and seeds, seed-major.
        let mut value = vec![0usize; t * n_cols];
        for x in 0..n_cols {
            let digits = digits_of(x as u128, in_alpha, map.n_in());
            for y in 0..t {
                let out = map.eval(&digits, y as u64)?;
                value[y * n_cols + x] = index_of(&out, out_alpha) as usize;
            }
        }
        let mut scratch = vec![0u64; mat.words];
        for y in 0..t {
            let vals = &value[y * n_cols..(y + 1) * n_cols];
            for v in 0..(1usize << lv.k) {
                for offsets in (0..lv.nb).combinations(u) {
                    let symbols: Vec<usize> =
                        offsets.iter().map(|&j| (v * lv.stride + j) % lv.l).collect();
                    scratch.iter_mut().for_each(|w| *w = 0);
                    for (x, &val) in vals.iter().enumerate() {
                        if symbols.contains(&val) {
                            set_bit(&mut scratch, x);
                        }
                    }
                    for _ in 0..lv.rep {
                        let w = mat.words;
                        mat.bits[cursor * w..(cursor + 1) * w].copy_from_slice(&scratch);
                        cursor += 1;
                    }
                }
            }
        }
    }
    debug_assert_eq!(cursor, mat.m);
    let e = (p * t as f64).floor() as usize;
    mat.claims.push(Claim {
        property: MatrixProperty::Regular { d, e, u },
        status: ClaimStatus::Claimed,
    });
    Ok(mat)
}

// ---------------------------------------------------------------------------
// Measurement and decoding
// ---------------------------------------------------------------------------

/// What a row reports when its overlap with the defective set falls in the
/// gap `[lo, hi)` of a threshold measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieRule {
    Zeros,
    Ones,
    Rng,
}

/// Threshold measurement: row `i` reports 1 if `|supp(rowᵢ) ∩ supp(x)| ≥
/// hi`, 0 if `< lo`, and follows the tie rule in between. `lo = hi` (and
/// in particular `lo = hi = 1`, the plain OR measurement) is gap-free and
/// deterministic.
pub fn threshold_measure(
    mat: &MeasurementMatrix,
    x: &[bool],
    lo: usize,
    hi: usize,
    rule: TieRule,
    mut rng: Option<&mut dyn RngCore>,
) -> Result<Vec<bool>> {
    if lo == 0 || lo > hi {
        return Err(Error::BadThresholds { lo, hi });
    }
    if x.len() != mat.n {
        return Err(Error::LengthMismatch { expected: mat.n, got: x.len() });
    }
    let mask = pack_bools(x);
    let mut out = Vec::with_capacity(mat.m);
    for i in 0..mat.m {
        let hits = and_count(mat.row_words(i), &mask);
        let bit = if hits >= hi {
            true
        } else if hits < lo {
            false
        } else {
            match rule {
                TieRule::Zeros => false,
                TieRule::Ones => true,
                TieRule::Rng => match rng.as_deref_mut() {
                    Some(r) => r.next_u32() & 1 == 1,
                    None => return Err(Error::RngRequired),
                },
            }
        };
        out.push(bit);
    }
    Ok(out)
}

/// Mismatch decoder for disjunct matrices: returns every column whose
/// support sticks out of `supp(ỹ)` in at most `⌊e/2⌋` rows. For a
/// `(d, e)`-disjunct matrix, a `d`-sparse `x`, and `ỹ` within Hamming
/// distance `⌊e/2⌋` of `M[x]`, the result is exactly `supp(x)`; with no
/// disjunctness guarantee it is still a superset of `supp(x)` whenever the
/// noise only adds rows.
pub fn distance_decode(mat: &MeasurementMatrix, y: &[bool], e: usize) -> Result<Vec<usize>> {
    if y.len() != mat.m {
        return Err(Error::LengthMismatch { expected: mat.m, got: y.len() });
    }
    let ypacked = pack_bools(y);
    let cols = mat.column_views();
    let tol = e / 2;
    Ok((0..mat.n).filter(|&j| and_not_count(&cols[j], &ypacked) <= tol).collect())
}

/// Agreement decoder for codeword-graph matrices: keeps the columns whose
/// per-seed agreement with the mixture read off `ỹ` strictly exceeds
/// `1 − ν/γ` (full agreement when the threshold reaches 1). Requires the
/// matrix to carry its seeded-map provenance.
pub fn agreement_decode(
    mat: &MeasurementMatrix,
    y: &[bool],
    nu: f64,
    gamma: f64,
) -> Result<Vec<usize>> {
    if !(gamma > 0.0) || !(nu >= 0.0) {
        return Err(Error::BadParams(format!(
            "need noise fraction >= 0 and list scale > 0, got nu={nu}, gamma={gamma}"
        )));
    }
    agreement_list(mat, y, 1.0 - nu / gamma)
}

/// Agreement decoder with an explicit strict threshold `alpha`; see
/// [`agreement_decode`]. Equivalent to filtering the induced codewords by
/// [`Mixture::passes`] on [`mixture_of`]`(mat, y)`.
pub fn agreement_list(mat: &MeasurementMatrix, y: &[bool], alpha: f64) -> Result<Vec<usize>> {
    let map = mat.provenance.map.as_ref().ok_or(Error::MissingProvenance)?;
    if y.len() != mat.m {
        return Err(Error::LengthMismatch { expected: mat.m, got: y.len() });
    }
    let t = map.t_seeds() as usize;
    let ypacked = pack_bools(y);
    let cols = mat.column_views();
    Ok((0..mat.n)
        .filter(|&j| agreement_passes(and_count(&cols[j], &ypacked), t, alpha))
        .collect())
}

/// Read a measurement of a codeword-graph matrix as a mixture: coordinate
/// `y` (one per seed) collects the output symbols whose row fired.
pub fn mixture_of(mat: &MeasurementMatrix, y: &[bool]) -> Result<Mixture> {
    let map = mat.provenance.map.as_ref().ok_or(Error::MissingProvenance)?;
    if y.len() != mat.m {
        return Err(Error::LengthMismatch { expected: mat.m, got: y.len() });
    }
    let t = map.t_seeds() as usize;
    let l = map.out_domain() as usize;
    let sets: Vec<Vec<u64>> = (0..t)
        .map(|seed| (0..l).filter(|&v| y[seed * l + v]).map(|v| v as u64).collect())
        .collect();
    Mixture::new(sets, l as u64)
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// How [`verify_matrix`] explores the quantifier space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every combination, with a hard `TooLarge` failure past the cap.
    Exhaustive,
    /// Random probes; can refute but never verifies.
    Sampled { trials: u64, seed: u64 },
}

/// Result of a verification run. `SampledConsistent` is deliberately not
/// `Verified`: it only says the probes found nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Verified,
    Refuted(Witness),
    SampledConsistent { trials: u64 },
}

/// Check a property by brute force and record the outcome in the claims
/// ledger. Exhaustive runs set `Verified` or `Refuted`; sampled runs can
/// only set `Refuted` (a consistent sample leaves the ledger entry as
/// `Claimed`, adding it if absent). The enumeration is ordered — sizes
/// ascending, then lexicographic in each quantifier slot — and parallel
/// workers are merged by earliest stratum, so the reported witness is the
/// smallest one in that order regardless of thread timing.
pub fn verify_matrix(
    mat: &mut MeasurementMatrix,
    property: &MatrixProperty,
    mode: VerifyMode,
) -> Result<VerifyOutcome> {
    let outcome = match mode {
        VerifyMode::Exhaustive => {
            let witness = match property {
                MatrixProperty::Disjunct { d, e } => {
                    check_disjunct_params(mat, *d)?;
                    guard_cap("disjunct scan", disjunct_combos(mat.n, *d))?;
                    disjunct_scan(mat, *d, *e)
                }
                MatrixProperty::StronglyDisjunct { d, e, u } => {
                    check_strong_params(mat, *d, *u)?;
                    guard_cap("strongly-disjunct scan", strong_combos(mat.n, *d, *u))?;
                    strong_scan(mat, *d, *e, *u)
                }
                MatrixProperty::Regular { d, e, u } => {
                    check_regular_params(mat, *d, *u, None)?;
                    guard_cap("regular scan", regular_combos(mat.n, *d, *u, None))?;
                    regular_scan(mat, *d, *e, *u, None)
                }
                MatrixProperty::ThresholdDisjunct { d, e, u, g } => {
                    check_regular_params(mat, *d, *u, Some(*g))?;
                    guard_cap("threshold-disjunct scan", regular_combos(mat.n, *d, *u, Some(*g)))?;
                    regular_scan(mat, *d, *e, *u, Some(*g))
                }
                MatrixProperty::Resilient { e0, e1, ep0, ep1, d } => {
                    guard_cap("resilient scan", resilient_combos(mat.n, *d))?;
                    resilient_scan(mat, *e0, *e1, *ep0, *ep1, *d)
                }
            };
            match witness {
                Some(w) => VerifyOutcome::Refuted(w),
                None => VerifyOutcome::Verified,
            }
        }
        VerifyMode::Sampled { trials, seed } => {
            let witness = sampled_scan(mat, property, trials, seed)?;
            match witness {
                Some(w) => VerifyOutcome::Refuted(w),
                None => VerifyOutcome::SampledConsistent { trials },
            }
        }
    };
    match &outcome {
        VerifyOutcome::Verified => mat.upsert_claim(property, ClaimStatus::Verified),
        VerifyOutcome::Refuted(w) => mat.upsert_claim(property, ClaimStatus::Refuted(w.clone())),
        VerifyOutcome::SampledConsistent { .. } => {
            if mat.find_claim(property).is_none() {
                mat.upsert_claim(property, ClaimStatus::Claimed);
            }
        }
    }
    Ok(outcome)
}

fn check_disjunct_params(mat: &MeasurementMatrix, d: usize) -> Result<()> {
    if d == 0 || d + 1 > mat.n {
        return Err(Error::BadParams(format!(
            "disjunctness needs 1 <= d <= n-1, got d={d}, n={}",
            mat.n
        )));
    }
    Ok(())
}

fn check_strong_params(mat: &MeasurementMatrix, d: usize, u: usize) -> Result<()> {
    if u == 0 || d == 0 || d + u > mat.n {
        return Err(Error::BadParams(format!(
            "strong disjunctness needs u >= 1, d >= 1, d+u <= n, got d={d}, u={u}, n={}",
            mat.n
        )));
    }
    Ok(())
}

fn check_regular_params(mat: &MeasurementMatrix, d: usize, u: usize, g: Option<usize>) -> Result<()> {
    if u == 0 || d < u || d > mat.n {
        return Err(Error::BadParams(format!(
            "regularity needs 1 <= u <= d <= n, got d={d}, u={u}, n={}",
            mat.n
        )));
    }
    if let Some(g) = g {
        if g + 1 > u {
            return Err(Error::BadParams(format!(
                "gap {g} needs u >= g+1 designated columns per row, got u={u}"
            )));
        }
    }
    Ok(())
}

fn disjunct_combos(n: usize, d: usize) -> u128 {
    (n as u128).saturating_mul(binom(n as u128 - 1, d as u128))
}

fn strong_combos(n: usize, d: usize, u: usize) -> u128 {
    binom(n as u128, u as u128).saturating_mul(binom(n as u128 - u as u128, d as u128))
}

fn regular_combos(n: usize, d: usize, u: usize, g: Option<usize>) -> u128 {
    let mut total: u128 = 0;
    for s in u..=d.min(n) {
        let zs: u128 = (0..=s.min(n - s))
            .map(|z| binom((n - s) as u128, z as u128))
            .fold(0u128, |a, b| a.saturating_add(b));
        let mut per = binom(n as u128, s as u128).saturating_mul(zs);
        if let Some(g) = g {
            per = per.saturating_mul(binom(s as u128, g as u128 + 1));
        }
        total = total.saturating_add(per);
    }
    total
}

fn resilient_combos(n: usize, d: usize) -> u128 {
    let supports: u128 = (0..=d.min(n))
        .map(|w| binom(n as u128, w as u128))
        .fold(0u128, |a, b| a.saturating_add(b));
    supports.saturating_mul(supports)
}

/// First `(C₀, S)` in (C₀ ascending, S lexicographic) order where `C₀`
/// escapes the union of `S` in at most `e` rows.
fn disjunct_scan(mat: &MeasurementMatrix, d: usize, e: usize) -> Option<Witness> {
    let cols = mat.column_views();
    let n = mat.n;
    (0..n).into_par_iter().find_map_first(|c0| {
        let pool: Vec<usize> = (0..n).filter(|&j| j != c0).collect();
        for s in pool.into_iter().combinations(d) {
            let mut union = vec![0u64; cols[c0].len()];
            for &j in &s {
                or_into(&mut union, &cols[j]);
            }
            let escape = and_not_count(&cols[c0], &union);
            if escape <= e {
                return Some(Witness {
                    primary: vec![c0],
                    secondary: s,
                    detail: format!("column {c0} escapes the union in only {escape} rows (need > {e})"),
                });
            }
        }
        None
    })
}

/// Minimum over all `(C₀, S)` of the escape count: the matrix is
/// `(d, e)`-disjunct exactly for `e <` this margin.
pub fn disjunct_margin(mat: &MeasurementMatrix, d: usize) -> Result<usize> {
    check_disjunct_params(mat, d)?;
    guard_cap("disjunct margin scan", disjunct_combos(mat.n, d))?;
    let cols = mat.column_views();
    let n = mat.n;
    Ok((0..n)
        .into_par_iter()
        .map(|c0| {
            let pool: Vec<usize> = (0..n).filter(|&j| j != c0).collect();
            let mut best = usize::MAX;
            for s in pool.into_iter().combinations(d) {
                let mut union = vec![0u64; cols[c0].len()];
                for &j in &s {
                    or_into(&mut union, &cols[j]);
                }
                best = best.min(and_not_count(&cols[c0], &union));
            }
            best
        })
        .min()
        .unwrap_or(usize::MAX))
}

/// First `(U, S)` where the intersection of the `u` columns in `U` escapes
/// the union of the `d` columns in `S` in at most `e` rows.
fn strong_scan(mat: &MeasurementMatrix, d: usize, e: usize, u: usize) -> Option<Witness> {
    let cols = mat.column_views();
    let n = mat.n;
    (0..n).into_par_iter().find_map_first(|first| {
        for rest in ((first + 1)..n).combinations(u - 1) {
            let mut uset = vec![first];
            uset.extend(rest);
            let mut inter = cols[first].clone();
            for &j in &uset[1..] {
                for (w, c) in inter.iter_mut().zip(&cols[j]) {
                    *w &= c;
                }
            }
            let pool: Vec<usize> = (0..n).filter(|j| !uset.contains(j)).collect();
            for s in pool.into_iter().combinations(d) {
                let mut union = vec![0u64; inter.len()];
                for &j in &s {
                    or_into(&mut union, &cols[j]);
                }
                let escape = and_not_count(&inter, &union);
                if escape <= e {
                    return Some(Witness {
                        primary: uset,
                        secondary: s,
                        detail: format!(
                            "intersection escapes the union in only {escape} rows (need > {e})"
                        ),
                    });
                }
            }
        }
        None
    })
}

/// Shared scan for regular (`gap = None`) and threshold-disjunct
/// (`gap = Some(g)`) properties. Witness order: critical-set size
/// ascending, then `S` lexicographic, then (for the gap form) designated
/// set `D` lexicographic, then zero-set size ascending, then `Z`
/// lexicographic.
fn regular_scan(
    mat: &MeasurementMatrix,
    d: usize,
    e: usize,
    u: usize,
    gap: Option<usize>,
) -> Option<Witness> {
    let (flat, mult, w) = mat.dedup_rows();
    let rows = mult.len();
    let n = mat.n;
    for s_size in u..=d {
        if s_size > n {
            break;
        }
        let z_max = s_size.min(n - s_size);
        let hit = (0..n).into_par_iter().find_map_first(|first| {
            for rest in ((first + 1)..n).combinations(s_size - 1) {
                let mut sset = vec![first];
                sset.extend(rest);
                let smask = pack_indices(&sset, n);
                // Rows meeting the critical set in exactly u columns.
                let candidates: Vec<usize> = (0..rows)
                    .filter(|&i| and_count(&flat[i * w..(i + 1) * w], &smask) == u)
                    .collect();
                let complement: Vec<usize> = (0..n).filter(|j| !sset.contains(j)).collect();
                match gap {
                    None => {
                        if let Some((z, cnt)) =
                            zero_set_scan(&flat, &mult, w, &candidates, &complement, z_max, e, n)
                        {
                            return Some(Witness {
                                primary: sset,
                                secondary: z,
                                detail: format!(
                                    "only {cnt} rows hit the critical set exactly {u} times while avoiding the zero set (need > {e})"
                                ),
                            });
                        }
                    }
                    Some(g) => {
                        for dset in sset.clone().into_iter().combinations(g + 1) {
                            let dmask = pack_indices(&dset, n);
                            let with_d: Vec<usize> = candidates
                                .iter()
                                .copied()
                                .filter(|&i| contains_all(&flat[i * w..(i + 1) * w], &dmask))
                                .collect();
                            if let Some((z, cnt)) =
                                zero_set_scan(&flat, &mult, w, &with_d, &complement, z_max, e, n)
                            {
                                return Some(Witness {
                                    primary: sset,
                                    secondary: z,
                                    detail: format!(
                                        "designated columns {dset:?}: only {cnt} qualifying rows cover them (need > {e})"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
            None
        });
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Find the first zero set (size ascending, then lexicographic) avoided by
/// at most `e` of the candidate rows; returns it with the offending count.
#[allow(clippy::too_many_arguments)]
fn zero_set_scan(
    flat: &[u64],
    mult: &[u64],
    w: usize,
    candidates: &[usize],
    complement: &[usize],
    z_max: usize,
    e: usize,
    n: usize,
) -> Option<(Vec<usize>, u64)> {
    for z_size in 0..=z_max.min(complement.len()) {
        for z in complement.iter().copied().combinations(z_size) {
            let zmask = pack_indices(&z, n);
            let mut cnt: u64 = 0;
            for &i in candidates {
                if is_disjoint(&flat[i * w..(i + 1) * w], &zmask) {
                    cnt += mult[i];
                    if cnt > e as u64 {
                        break;
                    }
                }
            }
            if cnt <= e as u64 {
                return Some((z, cnt));
            }
        }
    }
    None
}

/// Pairwise resilience scan over ordered support pairs, weights ascending
/// then lexicographic: a violation is a pair whose measurements are
/// `(e0, e1)`-close while the supports differ by more than `ep0 + ep1` in
/// either direction.
fn resilient_scan(
    mat: &MeasurementMatrix,
    e0: usize,
    e1: usize,
    ep0: usize,
    ep1: usize,
    d: usize,
) -> Option<Witness> {
    let n = mat.n;
    let mut supports: Vec<Vec<usize>> = Vec::new();
    for wgt in 0..=d.min(n) {
        for s in (0..n).combinations(wgt) {
            supports.push(s);
        }
    }
    let masks: Vec<Vec<u64>> = supports.par_iter().map(|s| pack_indices(s, n)).collect();
    let meas: Vec<Vec<u64>> = masks.par_iter().map(|m| mat.measure_words(m)).collect();
    let e_pair = ep0 + ep1;
    (0..supports.len()).into_par_iter().find_map_first(|a| {
        for b in 0..supports.len() {
            if a == b {
                continue;
            }
            // (M[x_a], M[x_b]) must be (e0, e1)-close to constrain the pair.
            if and_not_count(&meas[b], &meas[a]) > e0 || and_not_count(&meas[a], &meas[b]) > e1 {
                continue;
            }
            let fresh = and_not_count(&masks[b], &masks[a]);
            let lost = and_not_count(&masks[a], &masks[b]);
            if fresh > e_pair || lost > e_pair {
                return Some(Witness {
                    primary: supports[a].clone(),
                    secondary: supports[b].clone(),
                    detail: format!(
                        "measurements ({e0}, {e1})-close but supports differ by +{fresh}/-{lost} (allowed {e_pair})"
                    ),
                });
            }
        }
        None
    })
}

/// Random-probe refutation search; one quantifier instantiation per trial.
fn sampled_scan(
    mat: &MeasurementMatrix,
    property: &MatrixProperty,
    trials: u64,
    seed: u64,
) -> Result<Option<Witness>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = mat.n;
    let tag = |t: u64, w: Option<Witness>| {
        w.map(|mut w| {
            w.detail = format!("{} [sampled trial {t}]", w.detail);
            w
        })
    };
    match property {
        MatrixProperty::Disjunct { d, e } => {
            check_disjunct_params(mat, *d)?;
            let cols = mat.column_views();
            for t in 0..trials {
                let mut pick = sample_distinct(&mut rng, n, d + 1);
                let c0 = pick.remove(0);
                pick.sort_unstable();
                let mut union = vec![0u64; cols[c0].len()];
                for &j in &pick {
                    or_into(&mut union, &cols[j]);
                }
                let escape = and_not_count(&cols[c0], &union);
                if escape <= *e {
                    return Ok(tag(
                        t,
                        Some(Witness {
                            primary: vec![c0],
                            secondary: pick,
                            detail: format!(
                                "column {c0} escapes the union in only {escape} rows (need > {e})"
                            ),
                        }),
                    ));
                }
            }
            Ok(None)
        }
        MatrixProperty::StronglyDisjunct { d, e, u } => {
            check_strong_params(mat, *d, *u)?;
            let cols = mat.column_views();
            for t in 0..trials {
                let pick = sample_distinct(&mut rng, n, d + u);
                let mut uset = pick[..*u].to_vec();
                let mut sset = pick[*u..].to_vec();
                uset.sort_unstable();
                sset.sort_unstable();
                let mut inter = cols[uset[0]].clone();
                for &j in &uset[1..] {
                    for (w, c) in inter.iter_mut().zip(&cols[j]) {
                        *w &= c;
                    }
                }
                let mut union = vec![0u64; inter.len()];
                for &j in &sset {
                    or_into(&mut union, &cols[j]);
                }
                let escape = and_not_count(&inter, &union);
                if escape <= *e {
                    return Ok(tag(
                        t,
                        Some(Witness {
                            primary: uset,
                            secondary: sset,
                            detail: format!(
                                "intersection escapes the union in only {escape} rows (need > {e})"
                            ),
                        }),
                    ));
                }
            }
            Ok(None)
        }
        MatrixProperty::Regular { d, e, u } | MatrixProperty::ThresholdDisjunct { d, e, u, .. } => {
            let gap = match property {
                MatrixProperty::ThresholdDisjunct { g, .. } => Some(*g),
                _ => None,
            };
            check_regular_params(mat, *d, *u, gap)?;
            let (flat, mult, w) = mat.dedup_rows();
            let rows = mult.len();
            for t in 0..trials {
                let s_size = rng.gen_range(*u..=*d);
                let mut sset = sample_distinct(&mut rng, n, s_size);
                sset.sort_unstable();
                let smask = pack_indices(&sset, n);
                let z_size = rng.gen_range(0..=s_size.min(n - s_size));
                let complement: Vec<usize> = (0..n).filter(|j| !sset.contains(j)).collect();
                let mut z = sample_from(&mut rng, &complement, z_size);
                z.sort_unstable();
                let zmask = pack_indices(&z, n);
                let dset = gap.map(|g| {
                    let mut dset = sample_from(&mut rng, &sset, g + 1);
                    dset.sort_unstable();
                    dset
                });
                let dmask = dset.as_ref().map(|dset| pack_indices(dset, n));
                let mut cnt: u64 = 0;
                for i in 0..rows {
                    let row = &flat[i * w..(i + 1) * w];
                    if and_count(row, &smask) != *u || !is_disjoint(row, &zmask) {
                        continue;
                    }
                    if let Some(dm) = &dmask {
                        if !contains_all(row, dm) {
                            continue;
                        }
                    }
                    cnt += mult[i];
                    if cnt > *e as u64 {
                        break;
                    }
                }
                if cnt <= *e as u64 {
                    let detail = match &dset {
                        Some(dset) => format!(
                            "designated columns {dset:?}: only {cnt} qualifying rows cover them (need > {e})"
                        ),
                        None => format!(
                            "only {cnt} rows hit the critical set exactly {u} times while avoiding the zero set (need > {e})"
                        ),
                    };
                    return Ok(tag(t, Some(Witness { primary: sset, secondary: z, detail })));
                }
            }
            Ok(None)
        }
        MatrixProperty::Resilient { e0, e1, ep0, ep1, d } => {
            let e_pair = ep0 + ep1;
            for t in 0..trials {
                let wa = rng.gen_range(0..=d.min(&n).to_owned());
                let mut a = sample_distinct(&mut rng, n, wa);
                a.sort_unstable();
                // Every other trial, force the second support to stick out
                // of the first when the dimensions allow it — pairs that
                // are far apart are the only ones that can violate.
                let force_far = t % 2 == 1 && e_pair + 1 <= d.min(&n).to_owned();
                let mut b = if force_far {
                    let outside: Vec<usize> = (0..n).filter(|j| !a.contains(j)).collect();
                    if outside.len() < e_pair + 1 {
                        continue;
                    }
                    let extra = rng.gen_range(e_pair + 1..=outside.len().min(*d));
                    sample_from(&mut rng, &outside, extra)
                } else {
                    let wb = rng.gen_range(0..=d.min(&n).to_owned());
                    sample_distinct(&mut rng, n, wb)
                };
                b.sort_unstable();
                let ma = pack_indices(&a, n);
                let mb = pack_indices(&b, n);
                let ya = mat.measure_words(&ma);
                let yb = mat.measure_words(&mb);
                if and_not_count(&yb, &ya) > *e0 || and_not_count(&ya, &yb) > *e1 {
                    continue;
                }
                let fresh = and_not_count(&mb, &ma);
                let lost = and_not_count(&ma, &mb);
                if fresh > e_pair || lost > e_pair {
                    return Ok(tag(
                        t,
                        Some(Witness {
                            primary: a,
                            secondary: b,
                            detail: format!(
                                "measurements ({e0}, {e1})-close but supports differ by +{fresh}/-{lost} (allowed {e_pair})"
                            ),
                        }),
                    ));
                }
            }
            Ok(None)
        }
    }
}

fn sample_distinct(rng: &mut ChaCha20Rng, n: usize, k: usize) -> Vec<usize> {
    let pool: Vec<usize> = (0..n).collect();
    sample_from(rng, &pool, k)
}

fn sample_from(rng: &mut ChaCha20Rng, pool: &[usize], k: usize) -> Vec<usize> {
    let mut pool = pool.to_vec();
    let k = k.min(pool.len());
    for i in 0..k {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

// ---------------------------------------------------------------------------
// Family parameter tables
// ---------------------------------------------------------------------------

/// One line of a family comparison table: measurement count and error
/// tolerance as orders of growth with all hidden constants set to 1.
/// Rows flagged `reference` are information-theoretic floors, not
/// constructions. These are descriptive report lines for comparing
/// regimes — not operational guarantees about any concrete matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRow {
    pub family: &'static str,
    pub measurements: f64,
    pub tolerance: f64,
    pub reference: bool,
}

/// Strongly-disjunct family table: measurement counts for `n` items,
/// sparsity `d`, noise fraction `p`, and threshold `u`, across the outer
/// codes the Kautz–Singleton expansion can be instantiated with, plus the
/// dense random ensemble and the counting lower bound.
pub fn strong_family_table(n: f64, d: f64, p: f64, u: f64) -> Result<Vec<FamilyRow>> {
    check_table_params(n, d, p)?;
    if u < 1.0 {
        return Err(Error::BadParams(format!("need u >= 1, got {u}")));
    }
    let logn = n.log2();
    let e_common = p * d * logn / (1.0 - p);
    let rows = vec![
        FamilyRow {
            family: "random outer code",
            measurements: (d / (1.0 - p)).powf(u + 1.0) * logn,
            tolerance: e_common,
            reference: false,
        },
        FamilyRow {
            family: "reed-solomon outer code",
            measurements: (d * logn / (1.0 - p)).powf(u + 1.0),
            tolerance: e_common,
            reference: false,
        },
        FamilyRow {
            family: "algebraic-geometric outer code",
            measurements: (d / (1.0 - p)).powf(2.0 * u + 1.0) * logn,
            tolerance: e_common,
            reference: false,
        },
        FamilyRow {
            family: "hermitian outer code",
            measurements: (d * logn.sqrt() / (1.0 - p)).powf(u + 1.5),
            tolerance: p * (d * logn.sqrt() / (1.0 - p)).powf(1.5),
            reference: false,
        },
        FamilyRow {
            family: "dense random ensemble",
            measurements: d.powf(u + 1.0) * (n / d).log2() / (1.0 - p).powi(2),
            tolerance: e_common,
            reference: false,
        },
        FamilyRow {
            family: "counting lower bound",
            measurements: d.powf(u + 1.0) * logn / d.max(2.0).log2() + e_common * d.powf(u),
            tolerance: e_common,
            reference: true,
        },
    ];
    Ok(rows)
}

/// Threshold-testing family table with gap `g`: the stacked probabilistic
/// construction against the counting lower bound.
pub fn threshold_family_table(n: f64, d: f64, p: f64, g: f64) -> Result<Vec<FamilyRow>> {
    check_table_params(n, d, p)?;
    if g < 0.0 {
        return Err(Error::BadParams(format!("need g >= 0, got {g}")));
    }
    let logn = n.log2();
    let e_common = p * d * logn / (1.0 - p);
    Ok(vec![
        FamilyRow {
            family: "stacked random ensemble",
            measurements: d.powf(g + 2.0) * d.max(2.0).log2() * (n / d).log2() / (1.0 - p).powi(2),
            tolerance: e_common,
            reference: false,
        },
        FamilyRow {
            family: "counting lower bound",
            measurements: d.powf(g + 2.0) * logn / d.max(2.0).log2() + e_common * d.powf(g + 1.0),
            tolerance: e_common,
            reference: true,
        },
    ])
}

fn check_table_params(n: f64, d: f64, p: f64) -> Result<()> {
    if !(d >= 1.0 && n > d) {
        return Err(Error::BadParams(format!("need 1 <= d < n, got d={d}, n={n}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::BadParams(format!("noise fraction must be in [0, 1), got {p}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincode::make_rs;
    use crate::prand::{code_map, lhl_map, CodeMapMode};

    /// Small 5×8 matrix with nested column supports, reused across the
    /// decoder and refutation tests. Column supports (0-based rows):
    /// c0={1,4} c1={2} c2={0,1,4} c3={0,2} c4={3,4} c5={0,1,2,4}
    /// c6={0,3,4} c7={1,3}.
    fn sample_5x8() -> MeasurementMatrix {
        let rows = [
            [0, 0, 1, 1, 0, 1, 1, 0],
            [1, 0, 1, 0, 0, 1, 0, 1],
            [0, 1, 0, 1, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0, 1, 1],
            [1, 0, 1, 0, 1, 1, 1, 0],
        ];
        let rows: Vec<Vec<bool>> =
            rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
        MeasurementMatrix::from_bool_rows(&rows).unwrap()
    }

    fn identity(n: usize) -> MeasurementMatrix {
        let rows: Vec<Vec<bool>> =
            (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        MeasurementMatrix::from_bool_rows(&rows).unwrap()
    }

    fn bools(support: &[usize], n: usize) -> Vec<bool> {
        let mut v = vec![false; n];
        for &i in support {
            v[i] = true;
        }
        v
    }

    #[test]
    fn mixture_statistics_match_worked_example() {
        // Symbols 1..4 stored 0-based; the first coordinate set is empty.
        let sets: Vec<Vec<u64>> = vec![
            vec![],
            vec![0, 2],
            vec![0, 1],
            vec![0, 3],
            vec![0],
            vec![2],
            vec![3],
            vec![0, 1, 2, 3],
        ];
        let mix = Mixture::new(sets, 4).unwrap();
        let w = [0u64, 2, 1, 2, 3, 2, 3, 3];
        assert_eq!(mix.agreement_count(&w).unwrap(), 5);
        assert!((mix.agreement(&w).unwrap() - 5.0 / 8.0).abs() < 1e-12);
        assert_eq!(mix.weight(), 13);
        assert!((mix.rate() - 13.0 / 32.0).abs() < 1e-12);
        // Strict threshold: exactly 5/8 agreement does not pass alpha = 5/8.
        assert!(!mix.passes(&w, 5.0 / 8.0).unwrap());
        assert!(mix.passes(&w, 0.5).unwrap());
        // Full-agreement convention at alpha = 1.
        assert!(!mix.passes(&w, 1.0).unwrap());
        assert!(Mixture::new(vec![vec![4]], 4).is_err());
    }

    #[test]
    fn or_measurement_matches_hand_computation() {
        let mat = sample_5x8();
        let y = mat.measure_support(&[0, 1, 3]).unwrap();
        assert_eq!(y, bools(&[0, 1, 2, 4], 5));
        assert_eq!(mat.measure(&bools(&[0, 1, 3], 8)).unwrap(), y);
        assert!(mat.measure_support(&[8]).is_err());
        // Monotonicity: adding defectives can only add fired tests.
        let y_more = mat.measure_support(&[0, 1, 3, 6]).unwrap();
        for i in 0..5 {
            assert!(!y[i] || y_more[i]);
        }
    }

    #[test]
    fn one_disjunct_refuted_with_smallest_witness() {
        let mut mat = sample_5x8();
        let out = verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 1, e: 0 }, VerifyMode::Exhaustive)
            .unwrap();
        // supp(c0) = {1,4} ⊆ supp(c2) = {0,1,4} is the first pair in
        // (C₀ ascending, S lexicographic) order.
        match &out {
            VerifyOutcome::Refuted(w) => {
                assert_eq!(w.primary, vec![0]);
                assert_eq!(w.secondary, vec![2]);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
        // A later valid refutation pair: supp(c2) ⊆ supp(c5).
        let c2: Vec<usize> = (0..5).filter(|&i| mat.get(i, 2)).collect();
        let c5: Vec<usize> = (0..5).filter(|&i| mat.get(i, 5)).collect();
        assert!(c2.iter().all(|i| c5.contains(i)));
        // The ledger records the refutation.
        match &mat.find_claim(&MatrixProperty::Disjunct { d: 1, e: 0 }).unwrap().status {
            ClaimStatus::Refuted(w) => assert_eq!(w.primary, vec![0]),
            other => panic!("expected refuted claim, got {other:?}"),
        }
    }

    #[test]
    fn identity_is_maximally_disjunct() {
        let mut mat = identity(5);
        let out = verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 4, e: 0 }, VerifyMode::Exhaustive)
            .unwrap();
        assert_eq!(out, VerifyOutcome::Verified);
        assert_eq!(
            mat.find_claim(&MatrixProperty::Disjunct { d: 4, e: 0 }).unwrap().status,
            ClaimStatus::Verified
        );
    }

    #[test]
    fn distance_decoder_matches_hand_computation() {
        let mat = sample_5x8();
        let y = bools(&[0, 1, 2, 4], 5);
        // At e = 0 the decoder keeps every column inside supp(y): a strict
        // superset of the true support {0,1,3} because this matrix is not
        // 2-disjunct.
        assert_eq!(distance_decode(&mat, &y, 0).unwrap(), vec![0, 1, 2, 3, 5]);
        // All-ones measurement keeps every column.
        let all = vec![true; 5];
        assert_eq!(distance_decode(&mat, &all, 0).unwrap(), (0..8).collect::<Vec<_>>());
        assert!(distance_decode(&mat, &[true], 0).is_err());
    }

    #[test]
    fn random_disjunct_ensemble_usually_verifies() {
        let mut verified = 0u32;
        for seed in 0..100 {
            let mut mat =
                random_matrix(RandomKind::Disjunct { n: 30, d: 2 }, 125, 0.0, seed).unwrap();
            assert_eq!(
                mat.find_claim(&MatrixProperty::Disjunct { d: 2, e: 0 }).unwrap().status,
                ClaimStatus::Claimed
            );
            if verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 2, e: 0 }, VerifyMode::Exhaustive)
                .unwrap()
                == VerifyOutcome::Verified
            {
                verified += 1;
            }
        }
        assert!(verified >= 95, "only {verified}/100 seeds verified");
    }

    #[test]
    fn random_disjunct_identity_fallback_at_d1() {
        let mut mat = random_matrix(RandomKind::Disjunct { n: 6, d: 1 }, 10, 0.0, 7).unwrap();
        assert_eq!(mat.rows(), 6);
        assert_eq!(mat.cols(), 6);
        let prop = MatrixProperty::Disjunct { d: 5, e: 0 };
        assert!(mat.find_claim(&prop).is_some());
        assert_eq!(
            verify_matrix(&mut mat, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
    }

    #[test]
    fn random_regular_instance_verifies_its_claim() {
        let mut mat =
            random_matrix(RandomKind::Regular { n: 20, d: 4, u: 2 }, 12_000, 0.5, 11).unwrap();
        assert_eq!(mat.rows(), 12_000);
        // Claimed tolerance: ⌊0.5 · 12000 / (2^7 · 4)⌋ = 11.
        let prop = MatrixProperty::Regular { d: 4, e: 11, u: 2 };
        assert_eq!(mat.find_claim(&prop).unwrap().status, ClaimStatus::Claimed);
        assert_eq!(
            verify_matrix(&mut mat, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
    }

    #[test]
    fn ks_expansion_of_mds_code_is_three_disjunct() {
        let f4 = canonical_field_of_size(4).unwrap();
        let code = make_rs(&f4, 4, 2, None).unwrap();
        let mut mat = ks_matrix(&code, 1).unwrap();
        assert_eq!(mat.rows(), 16);
        assert_eq!(mat.cols(), 16);
        // Column weight is the outer length for u = 1.
        for j in 0..16 {
            assert_eq!(mat.column_weight(j), 4);
        }
        // Distance 3 ⇒ d < (4−e)/(4−3) claims: (3,0), (2,1), (1,2).
        for (d, e) in [(3usize, 0usize), (2, 1), (1, 2)] {
            assert!(
                mat.find_claim(&MatrixProperty::Disjunct { d, e }).is_some(),
                "missing claim ({d}, {e})"
            );
        }
        assert_eq!(
            verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 3, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        // One past the guarantee fails: four columns can cover a fifth.
        match verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 4, e: 0 }, VerifyMode::Exhaustive)
            .unwrap()
        {
            VerifyOutcome::Refuted(_) => {}
            other => panic!("expected refutation at d = 4, got {other:?}"),
        }
    }

    #[test]
    fn ks_expansion_with_pair_tuples_is_strongly_disjunct() {
        let f4 = canonical_field_of_size(4).unwrap();
        let code = make_rs(&f4, 4, 2, None).unwrap();
        let mut mat = ks_matrix(&code, 2).unwrap();
        assert_eq!(mat.rows(), 64);
        assert_eq!(mat.cols(), 16);
        // Each coordinate bank has q^u − (q−1)^u = 7 tuples containing a
        // given symbol.
        for j in 0..16 {
            assert_eq!(mat.column_weight(j), 4 * 7);
        }
        let prop = MatrixProperty::StronglyDisjunct { d: 1, e: 0, u: 2 };
        assert!(mat.find_claim(&prop).is_some());
        assert!(mat
            .find_claim(&MatrixProperty::StronglyDisjunct { d: 1, e: 1, u: 2 })
            .is_some());
        assert_eq!(
            verify_matrix(&mut mat, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
        // Sampled probing of the same property is consistent and does not
        // upgrade the ledger to Verified on its own.
        let mut fresh = ks_matrix(&code, 2).unwrap();
        let out = verify_matrix(&mut fresh, &prop, VerifyMode::Sampled { trials: 2000, seed: 3 })
            .unwrap();
        assert_eq!(out, VerifyOutcome::SampledConsistent { trials: 2000 });
        assert_eq!(fresh.find_claim(&prop).unwrap().status, ClaimStatus::Claimed);
    }

    #[test]
    fn sampled_mode_finds_refutations() {
        let mut mat = sample_5x8();
        let out = verify_matrix(
            &mut mat,
            &MatrixProperty::Disjunct { d: 1, e: 0 },
            VerifyMode::Sampled { trials: 500, seed: 1 },
        )
        .unwrap();
        match out {
            VerifyOutcome::Refuted(w) => {
                // Any sampled witness must be a genuine containment pair.
                let (c0, c1) = (w.primary[0], w.secondary[0]);
                for i in 0..5 {
                    assert!(!mat.get(i, c0) || mat.get(i, c1));
                }
                assert!(w.detail.contains("sampled trial"));
            }
            other => panic!("expected sampled refutation, got {other:?}"),
        }
    }

    #[test]
    fn codeword_graph_of_seedless_map_is_permutation_like() {
        let f2 = canonical_field_of_size(2).unwrap();
        let code = crate::lincode::LinearCode::from_generator(QMatrix::identity(f2, 6)).unwrap();
        let map = code_map(&code, CodeMapMode::GenExtractor).unwrap();
        let mat = cond_graph_matrix(&map).unwrap();
        assert_eq!(mat.rows(), 64);
        assert_eq!(mat.cols(), 64);
        for j in 0..64 {
            assert_eq!(mat.column_weight(j), 1);
        }
        // Zero-error extractor on the full domain: claims (0,0,1,0) for
        // 63-sparse vectors.
        let prop = MatrixProperty::Resilient { e0: 0, e1: 0, ep0: 1, ep1: 0, d: 63 };
        assert!(mat.find_claim(&prop).is_some());
        // A single defective is recovered exactly at full agreement.
        let y = mat.measure_support(&[37]).unwrap();
        assert_eq!(agreement_decode(&mat, &y, 0.0, 1.0 / 64.0).unwrap(), vec![37]);
        // The pairwise resilience criterion holds outright at d = 1.
        let mut mat = mat;
        assert_eq!(
            verify_matrix(
                &mut mat,
                &MatrixProperty::Resilient { e0: 0, e1: 0, ep0: 1, ep1: 0, d: 1 },
                VerifyMode::Exhaustive
            )
            .unwrap(),
            VerifyOutcome::Verified
        );
    }

    #[test]
    fn codeword_graph_decodes_sparse_supports() {
        // Lossless condenser for 4 entropy bits: 8-bit inputs, 6-bit
        // outputs, error 1/2.
        let map = lhl_map(8, 6, Role::LosslessCondenser, 0.5).unwrap();
        assert!((map.k_bits() - 4.0).abs() < 1e-9);
        let mat = cond_graph_matrix(&map).unwrap();
        let t = map.t_seeds() as usize;
        assert_eq!(mat.rows(), t * 64);
        assert_eq!(mat.cols(), 256);
        for j in [0usize, 17, 255] {
            assert_eq!(mat.column_weight(j), t);
        }
        // d up to ⌈(1−ε)2^k⌉ − 1 = 7; the claim allows output lists up to
        // 2^k − d = 9 supernumerary columns.
        let prop = MatrixProperty::Resilient { e0: 0, e1: 0, ep0: 9, ep1: 0, d: 7 };
        assert!(mat.find_claim(&prop).is_some());
        // Zero-noise agreement decoding of 4-sparse supports: the output
        // contains the support and stays below 2^k = 16 columns.
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let gamma = 4.0 / 64.0;
        for _ in 0..100 {
            let supp = sample_distinct(&mut rng, 256, 4);
            let y = mat.measure_support(&supp).unwrap();
            let out = agreement_decode(&mat, &y, 0.0, gamma).unwrap();
            for s in &supp {
                assert!(out.contains(s), "decoder lost a defective");
            }
            assert!(out.len() < 16, "list of {} exceeds the entropy bound", out.len());
        }
        // Any matrix without map provenance refuses agreement decoding.
        let bare = sample_5x8();
        assert!(matches!(
            agreement_decode(&bare, &vec![false; 5], 0.0, 0.5),
            Err(Error::MissingProvenance)
        ));
    }

    #[test]
    fn agreement_decoder_equals_mixture_list() {
        let map = lhl_map(8, 6, Role::LosslessCondenser, 0.5).unwrap();
        let mat = cond_graph_matrix(&map).unwrap();
        let t = map.t_seeds() as usize;
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for trial in 0..3 {
            // Sparse random measurement (not necessarily a valid M[x]).
            let y: Vec<bool> = (0..mat.rows()).map(|_| rng.gen::<f64>() < 0.03).collect();
            let mix = mixture_of(&mat, &y).unwrap();
            assert_eq!(mix.coords(), t);
            assert_eq!(mix.weight(), y.iter().filter(|&&b| b).count());
            for alpha in [0.6, 1.0] {
                let fast = agreement_list(&mat, &y, alpha).unwrap();
                let mut slow = Vec::new();
                for x in 0..mat.cols() {
                    let digits = digits_of(x as u128, 2, map.n_in());
                    let word: Vec<u64> = (0..t)
                        .map(|s| index_of(&map.eval(&digits, s as u64).unwrap(), 2))
                        .map(|v| v as u64)
                        .collect();
                    if mix.passes(&word, alpha).unwrap() {
                        slow.push(x);
                    }
                }
                assert_eq!(fast, slow, "trial {trial} alpha {alpha}");
            }
            // Agreement-list size bound at threshold ρ·2^{ℓ̃−k'} + ε: the
            // list stays below 2^k = 16 columns.
            let alpha = mix.rate() * 4.0 + 0.5;
            let list = agreement_list(&mat, &y, alpha).unwrap();
            assert!(list.len() < 16, "trial {trial}: list of {}", list.len());
        }
    }

    #[test]
    fn direct_product_composes_regular_and_disjunct() {
        // Verified (2, 0; 1)-regular left factor.
        let mut m1 = random_matrix(RandomKind::Regular { n: 12, d: 2, u: 1 }, 150, 0.0, 5).unwrap();
        assert_eq!(
            verify_matrix(&mut m1, &MatrixProperty::Regular { d: 2, e: 0, u: 1 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        // Verified (4, 0)-disjunct right factor.
        let mut m2 = random_matrix(RandomKind::Disjunct { n: 12, d: 4 }, 300, 0.0, 17).unwrap();
        assert_eq!(
            verify_matrix(&mut m2, &MatrixProperty::Disjunct { d: 4, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        let mut prod = direct_product(&m1, &m2).unwrap();
        assert_eq!(prod.rows(), m1.rows() * m2.rows());
        // Row (i, j) is the OR of the parent rows.
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..20 {
            let i = rng.gen_range(0..m1.rows());
            let j = rng.gen_range(0..m2.rows());
            let col = rng.gen_range(0..12);
            assert_eq!(prod.get(i * m2.rows() + j, col), m1.get(i, col) || m2.get(j, col));
        }
        // Composition claim (d, (e₁+1)(e₂+1)−1; u+1, 0) — here (2, 0; 2, 0)
        // — and the claim survives exhaustive verification.
        let prop = MatrixProperty::ThresholdDisjunct { d: 2, e: 0, u: 2, g: 0 };
        assert_eq!(prod.find_claim(&prop).unwrap().status, ClaimStatus::Claimed);
        assert_eq!(
            verify_matrix(&mut prod, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
        // Mismatched column counts are rejected.
        let other = identity(5);
        assert!(matches!(direct_product(&m1, &other), Err(Error::ColumnMismatch(12, 5))));
    }

    #[test]
    fn threshold_disjunct_at_unit_arity_matches_classic() {
        // With u = 1 and gap 0, (d, e; 1, 0)-disjunctness asks for rows
        // hitting a distinguished column and avoiding |Z| ≤ |S| others —
        // for S = {i} this is exactly classic (1, e)-disjunctness, and in
        // general (d, e; 1, 0) matches classic (2d−1, e).
        let mut eye = identity(6);
        assert_eq!(
            verify_matrix(
                &mut eye,
                &MatrixProperty::ThresholdDisjunct { d: 2, e: 0, u: 1, g: 0 },
                VerifyMode::Exhaustive
            )
            .unwrap(),
            VerifyOutcome::Verified
        );
        assert_eq!(
            verify_matrix(&mut eye, &MatrixProperty::Disjunct { d: 3, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        let mut bad = sample_5x8();
        assert!(matches!(
            verify_matrix(
                &mut bad,
                &MatrixProperty::ThresholdDisjunct { d: 1, e: 0, u: 1, g: 0 },
                VerifyMode::Exhaustive
            )
            .unwrap(),
            VerifyOutcome::Refuted(_)
        ));
        assert!(matches!(
            verify_matrix(&mut bad, &MatrixProperty::Disjunct { d: 1, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Refuted(_)
        ));
    }

    #[test]
    fn threshold_measurement_follows_tie_rules() {
        let rows = [[1, 1, 0, 0], [1, 0, 1, 0], [0, 0, 1, 1]];
        let rows: Vec<Vec<bool>> =
            rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
        let mat = MeasurementMatrix::from_bool_rows(&rows).unwrap();
        let x = bools(&[0, 1], 4);
        // Overlaps per row: 2, 1, 0.
        assert_eq!(
            threshold_measure(&mat, &x, 2, 2, TieRule::Zeros, None).unwrap(),
            vec![true, false, false]
        );
        // Gap [1, 2): the middle row follows the tie rule.
        assert_eq!(
            threshold_measure(&mat, &x, 1, 2, TieRule::Zeros, None).unwrap(),
            vec![true, false, false]
        );
        assert_eq!(
            threshold_measure(&mat, &x, 1, 2, TieRule::Ones, None).unwrap(),
            vec![true, true, false]
        );
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let out = threshold_measure(&mat, &x, 1, 2, TieRule::Rng, Some(&mut rng)).unwrap();
        assert!(out[0] && !out[2]);
        assert!(matches!(
            threshold_measure(&mat, &x, 1, 2, TieRule::Rng, None),
            Err(Error::RngRequired)
        ));
        // lo = hi = 1 is the OR measurement.
        assert_eq!(
            threshold_measure(&mat, &x, 1, 1, TieRule::Zeros, None).unwrap(),
            mat.measure(&x).unwrap()
        );
        // No defectives: all tests stay silent.
        assert_eq!(
            threshold_measure(&mat, &bools(&[], 4), 1, 2, TieRule::Ones, None).unwrap(),
            vec![false; 3]
        );
        assert!(matches!(
            threshold_measure(&mat, &x, 0, 1, TieRule::Zeros, None),
            Err(Error::BadThresholds { lo: 0, hi: 1 })
        ));
        assert!(matches!(
            threshold_measure(&mat, &x, 3, 2, TieRule::Zeros, None),
            Err(Error::BadThresholds { lo: 3, hi: 2 })
        ));
    }

    #[test]
    fn verified_threshold_matrix_separates_threshold_measurements() {
        // Product of a verified (4, 0; 1)-regular matrix and the identity
        // (a (9, 0)-disjunct matrix) at n = 10: verified (4, 0; 2, 0)-
        // disjunct by the composition rule.
        let mut m1 =
            random_matrix(RandomKind::Regular { n: 10, d: 4, u: 1 }, 100, 0.0, 23).unwrap();
        assert_eq!(
            verify_matrix(&mut m1, &MatrixProperty::Regular { d: 4, e: 0, u: 1 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        let mut m2 = identity(10);
        assert_eq!(
            verify_matrix(&mut m2, &MatrixProperty::Disjunct { d: 8, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        let mut prod = direct_product(&m1, &m2).unwrap();
        let prop = MatrixProperty::ThresholdDisjunct { d: 4, e: 0, u: 2, g: 0 };
        assert_eq!(prod.find_claim(&prop).unwrap().status, ClaimStatus::Claimed);
        assert_eq!(
            verify_matrix(&mut prod, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
        // Separation of gap-free threshold measurements at arity u = 2:
        // for all 4-sparse x, x' with wgt(x) ≥ 2, supp(x) ⊄ supp(x'), and
        // wgt(x) ≥ |supp(x') \ supp(x)|, the measurement of x fires in
        // more than e = 0 rows where the measurement of x' stays silent.
        let n = 10usize;
        let mut supports: Vec<Vec<usize>> = Vec::new();
        for w in 0..=4usize {
            for s in (0..n).combinations(w) {
                supports.push(s);
            }
        }
        let meas: Vec<Vec<u64>> = supports
            .iter()
            .map(|s| {
                pack_bools(&threshold_measure(&prod, &bools(s, n), 2, 2, TieRule::Zeros, None).unwrap())
            })
            .collect();
        let mut checked = 0u32;
        for (a, sa) in supports.iter().enumerate() {
            if sa.len() < 2 {
                continue;
            }
            for (b, sb) in supports.iter().enumerate() {
                if a == b {
                    continue;
                }
                let fresh = sb.iter().filter(|j| !sa.contains(j)).count();
                let covered = sa.iter().all(|j| sb.contains(j));
                if covered || sa.len() < fresh {
                    continue;
                }
                checked += 1;
                assert!(
                    and_not_count(&meas[a], &meas[b]) > 0,
                    "no separation for {sa:?} vs {sb:?}"
                );
            }
        }
        assert!(checked > 50_000, "only {checked} qualifying pairs exercised");
        // Converse regime: separation everywhere implies the half-sparsity
        // property, which the verifier confirms directly.
        assert_eq!(
            verify_matrix(
                &mut prod,
                &MatrixProperty::ThresholdDisjunct { d: 2, e: 0, u: 2, g: 0 },
                VerifyMode::Exhaustive
            )
            .unwrap(),
            VerifyOutcome::Verified
        );
    }

    #[test]
    fn classic_disjunct_separation_both_directions() {
        // Forward: a verified (2, 0)-disjunct matrix separates the plain
        // OR measurements of any two sparse supports where the first
        // sticks out of the second.
        let mut mat = random_matrix(RandomKind::Disjunct { n: 10, d: 2 }, 80, 0.0, 3).unwrap();
        assert_eq!(
            verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 2, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        let mut supports: Vec<Vec<usize>> = Vec::new();
        for w in 0..=2usize {
            for s in (0..10).combinations(w) {
                supports.push(s);
            }
        }
        let meas: Vec<Vec<u64>> =
            supports.iter().map(|s| pack_bools(&mat.measure_support(s).unwrap())).collect();
        for (a, sa) in supports.iter().enumerate() {
            for (b, sb) in supports.iter().enumerate() {
                if a == b || sa.iter().all(|j| sb.contains(j)) {
                    continue;
                }
                assert!(and_not_count(&meas[a], &meas[b]) > 0, "{sa:?} vs {sb:?}");
            }
        }
        // Converse at reduced sparsity: separation for all pairs implies
        // (d−1, e)-disjunctness.
        assert_eq!(
            verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 1, e: 0 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        // Contrapositive on the refutable example: the containment witness
        // is exactly a pair with no separation.
        let bad = sample_5x8();
        let ya = pack_bools(&bad.measure_support(&[0]).unwrap());
        let yb = pack_bools(&bad.measure_support(&[2]).unwrap());
        assert_eq!(and_not_count(&ya, &yb), 0);
    }

    #[test]
    fn fixed_input_measurements_distinguish_everything() {
        // At m = 8·d·log₂ n rows (n = 12, d = 2 → 58), a fixed 2-sparse
        // input is distinguished from every other vector by most seeds.
        let n = 12usize;
        let m = (8.0 * 2.0 * (n as f64).log2()).ceil() as usize;
        assert_eq!(m, 58);
        let x_support = [3usize, 7];
        let mut good = 0u32;
        for seed in 0..50 {
            let mat = random_matrix(RandomKind::Disjunct { n, d: 2 }, m, 0.0, seed).unwrap();
            let yx = pack_bools(&mat.measure_support(&x_support).unwrap());
            let x_idx: usize = x_support.iter().map(|&i| 1usize << i).sum();
            let cols = mat.column_views();
            let mut distinguished = true;
            for y in 0..(1usize << n) {
                if y == x_idx {
                    continue;
                }
                let mut yy = vec![0u64; yx.len()];
                for (j, col) in cols.iter().enumerate() {
                    if (y >> j) & 1 == 1 {
                        or_into(&mut yy, col);
                    }
                }
                if yy == yx {
                    distinguished = false;
                    break;
                }
            }
            if distinguished {
                good += 1;
            }
        }
        assert!(good >= 45, "only {good}/50 seeds distinguished the fixed input");
    }

    #[test]
    fn resilience_pairwise_criterion_detects_duplicate_columns() {
        // Two identical columns: their singletons measure identically but
        // differ as supports — refuted at zero slack.
        let rows = [[1, 1, 0], [0, 0, 1]];
        let rows: Vec<Vec<bool>> =
            rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
        let mut dup = MeasurementMatrix::from_bool_rows(&rows).unwrap();
        let prop = MatrixProperty::Resilient { e0: 0, e1: 0, ep0: 0, ep1: 0, d: 1 };
        match verify_matrix(&mut dup, &prop, VerifyMode::Exhaustive).unwrap() {
            VerifyOutcome::Refuted(w) => {
                assert_eq!(w.primary, vec![0]);
                assert_eq!(w.secondary, vec![1]);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
        // The identity has no such collision.
        let mut eye = identity(5);
        assert_eq!(
            verify_matrix(&mut eye, &prop, VerifyMode::Exhaustive).unwrap(),
            VerifyOutcome::Verified
        );
        // Sampled probing agrees on the duplicate-column matrix.
        let mut dup2 = MeasurementMatrix::from_bool_rows(&rows).unwrap();
        assert!(matches!(
            verify_matrix(&mut dup2, &prop, VerifyMode::Sampled { trials: 400, seed: 8 }).unwrap(),
            VerifyOutcome::Refuted(_)
        ));
    }

    #[test]
    fn margin_sets_exact_noisy_decoding_radius() {
        let mat = random_matrix(RandomKind::Disjunct { n: 30, d: 2 }, 200, 0.5, 77).unwrap();
        let margin = disjunct_margin(&mat, 2).unwrap();
        // Measured escape margin of this fixed draw; the matrix is
        // (2, e)-disjunct exactly for e < margin.
        assert_eq!(margin, 10);
        let e_star = margin - 1;
        let mut mat2 = mat.clone();
        assert_eq!(
            verify_matrix(&mut mat2, &MatrixProperty::Disjunct { d: 2, e: e_star }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        assert!(matches!(
            verify_matrix(&mut mat2, &MatrixProperty::Disjunct { d: 2, e: e_star + 1 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Refuted(_)
        ));
        // Flipping up to ⌊e/2⌋ rows never perturbs decoding: 10⁴ random
        // trials of exact recovery.
        let flips = e_star / 2;
        let mut rng = ChaCha20Rng::seed_from_u64(123);
        for _ in 0..10_000 {
            let supp = {
                let mut s = sample_distinct(&mut rng, 30, 2);
                s.sort_unstable();
                s
            };
            let mut y = mat.measure_support(&supp).unwrap();
            for r in sample_distinct(&mut rng, 200, flips) {
                y[r] = !y[r];
            }
            let decoded = distance_decode(&mat, &y, e_star).unwrap();
            assert_eq!(decoded, supp);
        }
    }

    #[test]
    fn stacked_condenser_matrix_has_exact_row_count_and_verifies() {
        let levels =
            vec![lhl_map(6, 4, Role::LosslessCondenser, 0.5).unwrap(),
                 lhl_map(6, 5, Role::LosslessCondenser, 0.5).unwrap()];
        let mut mat = cond_regular_matrix(4, 2, 0.5, &levels).unwrap();
        // Row count: level 0 contributes 2^{r−0}·T·2^{k(0)}·C(nb₀, 2) =
        // 2·64·4·120, level 1 contributes 1·64·8·C(32, 2) = 64·8·496.
        let t = 64usize;
        let expect = 2 * (t * 4 * 120) + t * 8 * 496;
        assert_eq!(mat.rows(), expect);
        assert_eq!(mat.rows(), 315_392);
        assert_eq!(mat.cols(), 64);
        // Claimed tolerance ⌊p·T⌋ = 32 at the requested sparsity.
        assert!(mat.find_claim(&MatrixProperty::Regular { d: 4, e: 32, u: 2 }).is_some());
        // The full quantifier space at d = 4 dwarfs the enumeration cap.
        assert!(matches!(
            verify_matrix(&mut mat, &MatrixProperty::Regular { d: 4, e: 1, u: 2 }, VerifyMode::Exhaustive),
            Err(Error::TooLarge { .. })
        ));
        // Exhaustive at reduced sparsity...
        assert_eq!(
            verify_matrix(&mut mat, &MatrixProperty::Regular { d: 2, e: 1, u: 2 }, VerifyMode::Exhaustive)
                .unwrap(),
            VerifyOutcome::Verified
        );
        // ...and sampled probing at the claimed sparsity, both with e ≥ 1.
        assert_eq!(
            verify_matrix(
                &mut mat,
                &MatrixProperty::Regular { d: 4, e: 1, u: 2 },
                VerifyMode::Sampled { trials: 1500, seed: 4 }
            )
            .unwrap(),
            VerifyOutcome::SampledConsistent { trials: 1500 }
        );
        // Family shape errors.
        assert!(cond_regular_matrix(4, 2, 0.5, &levels[..1]).is_err());
        let wrong =
            vec![lhl_map(6, 5, Role::LosslessCondenser, 0.5).unwrap(),
                 lhl_map(6, 4, Role::LosslessCondenser, 0.5).unwrap()];
        assert!(cond_regular_matrix(4, 2, 0.5, &wrong).is_err());
    }

    #[test]
    fn degenerate_stack_is_a_codeword_graph() {
        // u = 1, d = 1: a single level whose singleton subsets make each
        // row an indicator of one output value — the codeword graph rows,
        // visited once per right vertex.
        let map = lhl_map(6, 3, Role::LosslessCondenser, 0.5).unwrap();
        let mat = cond_regular_matrix(1, 1, 0.0, &[map.clone()]).unwrap();
        let graph = cond_graph_matrix(&map).unwrap();
        let t = 64usize;
        let (l, k, stride) = (8usize, 2usize, 4usize);
        assert_eq!(mat.rows(), t * k * l);
        assert_eq!(graph.rows(), t * l);
        for y in 0..t {
            for v in 0..k {
                for j in 0..l {
                    let stacked_row = y * (k * l) + v * l + j;
                    let graph_row = y * l + (v * stride + j) % l;
                    for x in 0..64 {
                        assert_eq!(mat.get(stacked_row, x), graph.get(graph_row, x));
                    }
                }
            }
        }
        assert!(mat.find_claim(&MatrixProperty::Regular { d: 1, e: 0, u: 1 }).is_some());
    }

    #[test]
    fn exports_round_trip_and_claims_serialize() {
        let mut mat = sample_5x8();
        verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 1, e: 0 }, VerifyMode::Exhaustive)
            .unwrap();
        let q = mat.to_qmatrix().unwrap();
        let text = q.to_text();
        let q2 = QMatrix::from_text(&text, None).unwrap();
        let back = MeasurementMatrix::from_qmatrix(&q2).unwrap();
        assert_eq!(back.rows(), 5);
        for i in 0..5 {
            for j in 0..8 {
                assert_eq!(back.get(i, j), mat.get(i, j));
            }
        }
        let claims = mat.claims_json();
        assert_eq!(claims["rows"], 5);
        let refuted = &claims["claims"][0]["status"]["refuted"];
        assert_eq!(refuted["primary"][0], 0);
        assert_eq!(refuted["secondary"][0], 2);
        // Non-Boolean matrices are rejected on import.
        let f4 = canonical_field_of_size(4).unwrap();
        let bad = QMatrix::from_fn(f4, 2, 2, |i, j| (i + j) as u64 + 1);
        assert!(MeasurementMatrix::from_qmatrix(&bad).is_err());
    }

    #[test]
    fn verification_respects_enumeration_cap() {
        let mat = random_matrix(RandomKind::Disjunct { n: 40, d: 8 }, 50, 0.0, 1).unwrap();
        let mut mat = mat;
        match verify_matrix(&mut mat, &MatrixProperty::Disjunct { d: 8, e: 0 }, VerifyMode::Exhaustive) {
            Err(Error::TooLarge { what, limit }) => {
                assert!(what.contains("disjunct scan"));
                assert!(limit >= 1);
            }
            other => panic!("expected TooLarge, got {other:?}"),
        }
        // The construction's claim is untouched by the failed attempt.
        assert_eq!(
            mat.find_claim(&MatrixProperty::Disjunct { d: 8, e: 0 }).unwrap().status,
            ClaimStatus::Claimed
        );
    }

    #[test]
    fn or_monotonicity_over_random_nested_pairs() {
        let mat = random_matrix(RandomKind::Disjunct { n: 16, d: 3 }, 60, 0.0, 31).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..200 {
            let size = rng.gen_range(1..=8);
            let big = sample_distinct(&mut rng, 16, size);
            let keep = rng.gen_range(0..=big.len());
            let small: Vec<usize> = big[..keep].to_vec();
            let ys = mat.measure_support(&small).unwrap();
            let yb = mat.measure_support(&big).unwrap();
            for i in 0..mat.rows() {
                assert!(!ys[i] || yb[i]);
            }
        }
    }

    #[test]
    fn family_tables_order_regimes_sanely() {
        let rows = strong_family_table(1e6, 32.0, 0.125, 2.0).unwrap();
        assert_eq!(rows.len(), 6);
        let get = |name: &str| rows.iter().find(|r| r.family == name).unwrap();
        // The dense random ensemble beats the algebraic constructions,
        // and nothing beats the counting floor.
        let random = get("dense random ensemble");
        let rs = get("reed-solomon outer code");
        let floor = get("counting lower bound");
        assert!(random.measurements < rs.measurements);
        assert!(floor.reference);
        assert!(floor.measurements <= random.measurements);
        for r in &rows {
            assert!(r.measurements.is_finite() && r.measurements > 0.0);
        }
        let trows = threshold_family_table(1e6, 32.0, 0.125, 1.0).unwrap();
        assert_eq!(trows.len(), 2);
        assert!(trows[1].reference);
        assert!(strong_family_table(10.0, 32.0, 0.125, 2.0).is_err());
        assert!(threshold_family_table(1e6, 32.0, 1.0, 1.0).is_err());
    }
}
