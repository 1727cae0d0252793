//! Channel models and code ensembles driven by seeded linear maps.
//!
//! The module covers the coding side of the toolkit:
//!
//! * [`Channel`] — symbol-erasure, bit-flip, and additive block-noise
//!   channels with deterministic, seedable sampling.
//! * [`CodeEnsemble`] — a family of linear codes indexed by the seed of a
//!   linear [`SeededMap`]: either the per-seed matrices are taken as
//!   parity-check matrices (fixed redundancy, rate bounded below) or as
//!   generator matrices (fixed dimension, exact rate).  Rank-deficient
//!   seeds are replaced by a fixed full-rank surrogate and logged.
//! * [`erasure_pattern_ok`] / [`erased_source_nonuniformity`] — exact
//!   audits of which erasure patterns a code survives and of the
//!   uniform-or-far dichotomy for linear images of erased-coordinate
//!   sources.
//! * [`bsc_brute_decode`] — the brute-force noise-support decoder for
//!   additive noise given as a priority list of flat components, with
//!   pinned tie-breaking, plus [`brute_decoder_exact_error`] which
//!   computes its exact error probability by enumeration.
//! * [`bsc_noise_components`] / [`flat_decomposition`] — convex
//!   decompositions of binomial (bit-flip) noise into flat weight shells
//!   and of arbitrary distributions into flat layers.
//! * [`justesen_encode`] / [`justesen_decode`] — concatenation of an outer
//!   code over `GF(q^k)` with the per-position codes of an ensemble, with
//!   blockwise inner decoding followed by unique decoding of the outer
//!   code (Berlekamp–Welch for Reed–Solomon, brute force otherwise).
//! * [`estimate_error`] — Monte Carlo failure-rate estimation with
//!   per-trial derived random streams and a Wilson 95% interval.
//!
//! Everything here is desk-scale and auditable: enumerations are guarded
//! by [`caps`], sampling is `ChaCha20`-seeded, and repeated runs with the
//! same seed reproduce bit-identical results.

use crate::caps;
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::lincode::{canonical_field_of_size, CodeKind, LinearCode, QMatrix, Solve};
use crate::prand::{digits_of, index_of, SeededMap};
use crate::probdist::Dist;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

fn guard_cost(what: &str, work: u128) -> Result<()> {
    let cap = caps::current().enumerate;
    if work > cap {
        return Err(Error::TooLarge { what: format!("{what} ({work} steps)"), limit: cap });
    }
    Ok(())
}

/// Draw one outcome index from `dist` by inverting the cumulative mass.
fn sample_index(dist: &Dist<f64>, rng: &mut dyn RngCore) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &m) in dist.mass().iter().enumerate() {
        if m > 0.0 {
            last = i;
            acc += m;
            if r < acc {
                return i;
            }
        }
    }
    last
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// What a [`Channel`] does to each transmitted word.
#[derive(Clone, Debug)]
pub enum ChannelKind {
    /// Erase each symbol independently with probability `p`.  With
    /// `max_erasures` set, the erasure pattern is conditioned on having at
    /// most that many erasures (rejection sampling of the pattern).
    Bec { p: f64, max_erasures: Option<usize> },
    /// Flip each bit independently with probability `p`.  Binary only.
    Bsc { p: f64 },
    /// Add one noise draw per consecutive block of `block` symbols.  The
    /// noise distribution ranges over block values, indexed by the base-`q`
    /// digit encoding (coordinate 0 is the least-significant digit).
    Additive { noise: Dist<f64>, block: usize },
}

/// A memoryless channel over a fixed symbol alphabet.
///
/// Erasure and flip channels act independently per symbol; additive
/// channels act independently per block.  `transmit` returns one
/// `Option<u64>` per input symbol, with `None` marking an erasure (only
/// erasure channels produce `None`).
#[derive(Clone, Debug)]
pub struct Channel {
    field: FieldCtx,
    kind: ChannelKind,
}

impl Channel {
    /// Symbol-erasure channel with erasure probability `p` over `field`.
    pub fn bec(field: &FieldCtx, p: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParams(format!("erasure probability must lie in [0,1], got {p}")));
        }
        Ok(Channel { field: field.clone(), kind: ChannelKind::Bec { p, max_erasures: None } })
    }

    /// Erasure channel conditioned on at most `max_erasures` erasures per
    /// transmitted word.
    pub fn bec_truncated(field: &FieldCtx, p: f64, max_erasures: usize) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParams(format!("erasure probability must lie in [0,1], got {p}")));
        }
        Ok(Channel { field: field.clone(), kind: ChannelKind::Bec { p, max_erasures: Some(max_erasures) } })
    }

    /// Bit-flip channel with crossover probability `p`.  Always binary.
    pub fn bsc(p: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParams(format!("crossover probability must lie in [0,1], got {p}")));
        }
        let field = canonical_field_of_size(2)?;
        Ok(Channel { field, kind: ChannelKind::Bsc { p } })
    }

    /// Additive block-noise channel: one draw of `noise` (a distribution
    /// over `q^block` block values) is added coordinate-wise to each
    /// consecutive block of `block` symbols.
    pub fn additive(field: &FieldCtx, block: usize, noise: Dist<f64>) -> Result<Channel> {
        if block == 0 {
            return Err(Error::BadParams("noise block length must be positive".into()));
        }
        let want = (field.q() as u128)
            .checked_pow(block as u32)
            .ok_or_else(|| Error::TooLarge { what: format!("noise domain q^{block}"), limit: u128::MAX })?;
        if noise.n() as u128 != want {
            return Err(Error::SizeMismatch(format!(
                "noise ranges over {} outcomes but blocks of {} symbols over GF({}) have {} values",
                noise.n(),
                block,
                field.q(),
                want
            )));
        }
        Ok(Channel { field: field.clone(), kind: ChannelKind::Additive { noise, block } })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ChannelKind::Bec { p, max_erasures: None } => format!("bec(p={p}) over GF({})", self.field.q()),
            ChannelKind::Bec { p, max_erasures: Some(m) } => {
                format!("bec(p={p}, at most {m} erasures) over GF({})", self.field.q())
            }
            ChannelKind::Bsc { p } => format!("bsc(p={p})"),
            ChannelKind::Additive { block, .. } => {
                format!("additive block noise (block {block}) over GF({})", self.field.q())
            }
        }
    }

    /// Push one word through the channel.  Returns one entry per input
    /// symbol; `None` marks an erasure.
    pub fn transmit(&self, word: &[u64], rng: &mut dyn RngCore) -> Result<Vec<Option<u64>>> {
        let q = self.field.q();
        for &s in word {
            if s >= q {
                return Err(Error::AlphabetMismatch(format!(
                    "symbol {s} outside the channel alphabet of size {q}"
                )));
            }
        }
        match &self.kind {
            ChannelKind::Bec { p, max_erasures } => {
                let n = word.len();
                let mut attempts = 0u32;
                let pattern = loop {
                    let pat: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < *p).collect();
                    let cnt = pat.iter().filter(|&&b| b).count();
                    match max_erasures {
                        Some(mx) if cnt > *mx => {
                            attempts += 1;
                            if attempts > 100_000 {
                                return Err(Error::Infeasible(format!(
                                    "conditioning on at most {mx} erasures rejected 100000 patterns in a row"
                                )));
                            }
                        }
                        _ => break pat,
                    }
                };
                Ok(word
                    .iter()
                    .zip(pattern)
                    .map(|(&s, erased)| if erased { None } else { Some(s) })
                    .collect())
            }
            ChannelKind::Bsc { p } => Ok(word
                .iter()
                .map(|&b| {
                    let flip = rng.gen::<f64>() < *p;
                    Some(if flip { b ^ 1 } else { b })
                })
                .collect()),
            ChannelKind::Additive { noise, block } => {
                if word.len() % block != 0 {
                    return Err(Error::SizeMismatch(format!(
                        "word length {} is not a multiple of the noise block length {}",
                        word.len(),
                        block
                    )));
                }
                let mut out = Vec::with_capacity(word.len());
                for chunk in word.chunks(*block) {
                    let z_idx = sample_index(noise, rng) as u128;
                    let z = digits_of(z_idx, q, *block);
                    for (s, zz) in chunk.iter().zip(z) {
                        out.push(Some(self.field.add(*s, zz)));
                    }
                }
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Noise decompositions
// ---------------------------------------------------------------------------

/// Exact distribution of an i.i.d. bit-flip pattern on `n` bits: outcome
/// `idx` (digit encoding) has mass `p^w (1-p)^(n-w)` where `w` is the
/// Hamming weight of `idx`.
pub fn bsc_noise(n: usize, p: f64) -> Result<Dist<f64>> {
    if n == 0 || n > 63 {
        return Err(Error::BadParams(format!("flip-pattern length must lie in 1..=63, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("crossover probability must lie in [0,1], got {p}")));
    }
    guard_cost("flip-pattern enumeration", 1u128 << n)?;
    let total = 1usize << n;
    let mass: Vec<f64> = (0..total)
        .map(|idx| {
            let w = (idx as u64).count_ones() as i32;
            p.powi(w) * (1.0 - p).powi(n as i32 - w)
        })
        .collect();
    Dist::new(mass)
}

/// A convex decomposition of binomial flip noise into flat weight shells.
///
/// `components[i]` is uniform on the patterns of Hamming weight
/// `shells[i]`, ordered by support size descending (ties broken by smaller
/// weight first); `weights[i]` is the exact binomial mass of that shell.
/// `gamma` is the leftover mass of the weights outside `lo..=hi` and
/// `remainder` the conditioned distribution on that leftover (absent when
/// `gamma` vanishes).
#[derive(Clone, Debug)]
pub struct ConvexParts {
    pub weights: Vec<f64>,
    pub components: Vec<Dist<f64>>,
    pub shells: Vec<usize>,
    pub gamma: f64,
    pub remainder: Option<Dist<f64>>,
    pub eta: f64,
    pub lo: usize,
    pub hi: usize,
}

impl ConvexParts {
    /// Rebuild the full noise distribution from the parts.
    pub fn reassemble(&self) -> Result<Dist<f64>> {
        let mut parts: Vec<(f64, &Dist<f64>)> =
            self.weights.iter().copied().zip(self.components.iter()).collect();
        if let Some(rem) = &self.remainder {
            parts.push((self.gamma, rem));
        }
        Dist::mix(&parts)
    }
}

/// Decompose the flip noise on `n` bits with rate `p` into flat weight
/// shells covering weights within `eta·n` of the mean `p·n`, plus a
/// remainder.  `eta` defaults to `0.1·p`.
pub fn bsc_noise_components(n: usize, p: f64, eta: Option<f64>) -> Result<ConvexParts> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::BadParams(format!("crossover probability must lie in (0,1), got {p}")));
    }
    let eta = eta.unwrap_or(0.1 * p);
    if eta <= 0.0 {
        return Err(Error::BadParams(format!("weight window must be positive, got {eta}")));
    }
    let noise = bsc_noise(n, p)?;
    let lo = ((n as f64) * (p - eta)).ceil().max(0.0) as usize;
    let hi = (((n as f64) * (p + eta)).floor() as usize).min(n);
    if lo > hi {
        return Err(Error::BadParams(format!(
            "weight window ({:.3},{:.3}) around the mean contains no integer",
            (n as f64) * (p - eta),
            (n as f64) * (p + eta)
        )));
    }
    let total = 1usize << n;
    let mut shells: Vec<usize> = (lo..=hi).collect();
    // Largest support (binomial coefficient) first; ties to the smaller weight.
    shells.sort_by(|&a, &b| {
        let ca = binom_u128(n, a);
        let cb = binom_u128(n, b);
        cb.cmp(&ca).then(a.cmp(&b))
    });
    let mut weights = Vec::with_capacity(shells.len());
    let mut components = Vec::with_capacity(shells.len());
    for &w in &shells {
        let support: Vec<usize> = (0..total).filter(|&i| (i as u64).count_ones() as usize == w).collect();
        weights.push(binom_u128(n, w) as f64 * p.powi(w as i32) * (1.0 - p).powi((n - w) as i32));
        components.push(Dist::flat(total, &support)?);
    }
    let covered: f64 = weights.iter().sum();
    let gamma = (1.0 - covered).max(0.0);
    let remainder = if gamma > 1e-15 {
        let mass: Vec<f64> = (0..total)
            .map(|i| {
                let w = (i as u64).count_ones() as usize;
                if w < lo || w > hi {
                    noise.mass()[i] / gamma
                } else {
                    0.0
                }
            })
            .collect();
        Some(Dist::new(mass)?)
    } else {
        None
    };
    Ok(ConvexParts { weights, components, shells, gamma, remainder, eta, lo, hi })
}

/// The pinned tail bound the remainder mass of [`bsc_noise_components`] is
/// audited against: `2·exp(-eta²·n/(3p))`, the multiplicative Chernoff
/// bound with relative deviation `eta/p <= 1`.
pub fn bsc_tail_bound(n: usize, p: f64, eta: f64) -> f64 {
    2.0 * (-(eta * eta) * (n as f64) / (3.0 * p)).exp()
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Write any distribution as a convex combination of flat distributions by
/// mass layers: sort outcomes by mass descending; each distinct mass level
/// contributes the flat distribution on the prefix above it.  Components
/// are returned largest support first, so they can feed
/// [`bsc_brute_decode`] directly.
pub fn flat_decomposition(dist: &Dist<f64>) -> Result<Vec<(f64, Dist<f64>)>> {
    let mut idx: Vec<usize> = (0..dist.n()).filter(|&i| dist.mass()[i] > 0.0).collect();
    idx.sort_by(|&a, &b| {
        dist.mass()[b]
            .partial_cmp(&dist.mass()[a])
            .expect("masses are finite")
            .then(a.cmp(&b))
    });
    let mut parts = Vec::new();
    for j in 0..idx.len() {
        let m_here = dist.mass()[idx[j]];
        let m_next = if j + 1 < idx.len() { dist.mass()[idx[j + 1]] } else { 0.0 };
        if m_here - m_next > 1e-15 {
            let weight = (j as f64 + 1.0) * (m_here - m_next);
            parts.push((weight, Dist::flat(dist.n(), &idx[..=j])?));
        }
    }
    parts.reverse();
    Ok(parts)
}

// ---------------------------------------------------------------------------
// Code ensembles from seeded linear maps
// ---------------------------------------------------------------------------

/// How the per-seed matrices of a linear [`SeededMap`] become codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    /// Each seed's matrix is a parity-check matrix: the code is its right
    /// kernel.  Redundancy is forced to the full row count, so every code
    /// has rate exactly `1 - rows/cols` (in particular at least that).
    ParityFromCondenser,
    /// Each seed's matrix is a generator matrix: the code is its row
    /// space.  Every code has rate exactly `rows/cols`.
    GeneratorFromExtractor,
}

/// A seed-indexed family of linear codes of common length and dimension.
///
/// Rank-deficient seed matrices (for example the all-zero matrix at seed 0
/// of a multiplication-based map) cannot serve as parity or generator
/// matrices of the promised shape, so they are replaced by the fixed
/// full-rank surrogate `[I | 0]` and the seed is recorded in
/// `repaired_seeds`.
#[derive(Clone, Debug)]
pub struct CodeEnsemble {
    kind: EnsembleKind,
    field: FieldCtx,
    n: usize,
    dim: usize,
    codes: Vec<LinearCode>,
    repaired: Vec<u64>,
    label: String,
}

/// Build the code family of `map`: one code per seed.
pub fn ensemble(kind: EnsembleKind, map: &SeededMap) -> Result<CodeEnsemble> {
    if !map.is_linear() {
        return Err(Error::NotLinear);
    }
    let field = map.matrix_field().ok_or(Error::NotLinear)?.clone();
    let t = map.t_seeds();
    let probe = map.matrix_of(0)?;
    let rows = probe.rows();
    let cols = probe.cols();
    let (n, dim) = match kind {
        EnsembleKind::ParityFromCondenser => {
            if rows >= cols {
                return Err(Error::BadParams(format!(
                    "parity-check matrices must have fewer rows than columns, got {rows}x{cols}"
                )));
            }
            (cols, cols - rows)
        }
        EnsembleKind::GeneratorFromExtractor => {
            if rows > cols {
                return Err(Error::BadParams(format!(
                    "generator matrices must have at most as many rows as columns, got {rows}x{cols}"
                )));
            }
            (cols, rows)
        }
    };
    guard_cost("ensemble construction", t as u128 * (rows as u128) * (cols as u128))?;
    let mut codes = Vec::with_capacity(t as usize);
    let mut repaired = Vec::new();
    for u in 0..t {
        let mat = map.matrix_of(u)?;
        if mat.rows() != rows || mat.cols() != cols {
            return Err(Error::SizeMismatch(format!(
                "seed {u} has a {}x{} matrix, expected {rows}x{cols}",
                mat.rows(),
                mat.cols()
            )));
        }
        let mat = if mat.rank() == rows {
            mat
        } else {
            repaired.push(u);
            QMatrix::from_fn(field.clone(), rows, cols, |i, j| u64::from(i == j))
        };
        let code = match kind {
            EnsembleKind::ParityFromCondenser => LinearCode::from_parity(mat)?,
            EnsembleKind::GeneratorFromExtractor => LinearCode::from_generator(mat)?,
        };
        debug_assert_eq!(code.k(), dim);
        codes.push(code);
    }
    Ok(CodeEnsemble { kind, field, n, dim, codes, repaired, label: map.label().to_string() })
}

impl CodeEnsemble {
    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    /// Number of codes in the family.
    pub fn len(&self) -> u64 {
        self.codes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Common block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common dimension (message symbols per block).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Common rate `dim/n`, exact for every member code.
    pub fn rate(&self) -> f64 {
        self.dim as f64 / self.n as f64
    }

    pub fn code_at(&self, seed: u64) -> Result<&LinearCode> {
        self.codes.get(seed as usize).ok_or(Error::BadRange(format!(
            "seed {seed} outside the ensemble of {} codes",
            self.codes.len()
        )))
    }

    pub fn codes(&self) -> &[LinearCode] {
        &self.codes
    }

    /// Seeds whose matrices were rank-deficient and got the surrogate.
    pub fn repaired_seeds(&self) -> &[u64] {
        &self.repaired
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The sub-family of the first `s` seeds, for matching an outer code of
    /// length `s`.
    pub fn restrict(&self, s: u64) -> Result<CodeEnsemble> {
        if s == 0 || s > self.len() {
            return Err(Error::BadParams(format!(
                "cannot restrict an ensemble of {} codes to {s}",
                self.len()
            )));
        }
        Ok(CodeEnsemble {
            kind: self.kind,
            field: self.field.clone(),
            n: self.n,
            dim: self.dim,
            codes: self.codes[..s as usize].to_vec(),
            repaired: self.repaired.iter().copied().filter(|&u| u < s).collect(),
            label: format!("{} (first {s})", self.label),
        })
    }

    pub fn descriptor_json(&self) -> Value {
        json!({
            "kind": match self.kind {
                EnsembleKind::ParityFromCondenser => "parity-from-condenser",
                EnsembleKind::GeneratorFromExtractor => "generator-from-extractor",
            },
            "codes": self.len(),
            "n": self.n,
            "dim": self.dim,
            "rate": self.rate(),
            "repaired_seeds": self.repaired,
            "source": self.label,
        })
    }
}

// ---------------------------------------------------------------------------
// Erasure audits
// ---------------------------------------------------------------------------

/// Can `code` recover every codeword when exactly the positions in
/// `erased` are lost?  True iff the generator columns on the surviving
/// positions have full rank.  The empty pattern is always fine; any
/// pattern keeping fewer than `k` positions never is.
pub fn erasure_pattern_ok(code: &LinearCode, erased: &[usize]) -> Result<bool> {
    let n = code.n();
    let mut gone = vec![false; n];
    for &i in erased {
        if i >= n {
            return Err(Error::BadRange(format!("erased position {i} outside block length {n}")));
        }
        gone[i] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !gone[i]).collect();
    if keep.len() < code.k() {
        return Ok(false);
    }
    Ok(code.generator().select_cols(&keep).rank() == code.k())
}

/// Exact nonuniformity of a linear map's output on an erased-coordinate
/// source.
#[derive(Clone, Debug)]
pub struct AffineImageReport {
    /// Number of free (surviving) input coordinates.
    pub free: usize,
    /// Statistical distance of the output to uniform, as an exact integer
    /// ratio evaluated in floating point.
    pub distance: f64,
    /// The distance is exactly zero (the output is exactly uniform).
    pub exactly_zero: bool,
    /// The distance is at least 1/2 (exact integer comparison).
    pub far: bool,
}

/// Evaluate `map(·, seed)` on the source that is uniform over inputs
/// vanishing on `erased` and report the exact statistical distance of the
/// output to uniform.  For a linear map, fixing the erased coordinates to
/// any other constant translates the output and leaves the distance
/// unchanged, so zero is representative.  Counting is exact (u128), so
/// `exactly_zero`/`far` are decided without rounding; for linear maps the
/// distance is always in `{0} ∪ [1/2, 1]`.
pub fn erased_source_nonuniformity(map: &SeededMap, seed: u64, erased: &[usize]) -> Result<AffineImageReport> {
    let n = map.n_in();
    let q_in = alphabet_size(map.in_alphabet());
    let q_out = alphabet_size(map.out_alphabet());
    let mut gone = vec![false; n];
    for &i in erased {
        if i >= n {
            return Err(Error::BadRange(format!("erased position {i} outside input length {n}")));
        }
        gone[i] = true;
    }
    let free_pos: Vec<usize> = (0..n).filter(|&i| !gone[i]).collect();
    let free = free_pos.len();
    let f_count = (q_in as u128)
        .checked_pow(free as u32)
        .ok_or_else(|| Error::TooLarge { what: format!("source of q^{free} inputs"), limit: u128::MAX })?;
    let out_dom = map.out_domain();
    guard_cost("erased-source image enumeration", f_count.saturating_mul(n as u128))?;
    guard_cost("output histogram", out_dom)?;
    let mut counts = vec![0u64; out_dom as usize];
    let mut word = vec![0u64; n];
    for a in 0..f_count {
        let digs = digits_of(a, q_in, free);
        for (&p, d) in free_pos.iter().zip(digs) {
            word[p] = d;
        }
        let out = map.eval(&word, seed)?;
        counts[index_of(&out, q_out) as usize] += 1;
    }
    // SD to uniform = sum_v |c_v/F - 1/D| / 2 = sum_v |c_v*D - F| / (2*F*D).
    let num: u128 = counts.iter().map(|&c| (c as u128 * out_dom).abs_diff(f_count)).sum();
    let den: u128 = 2u128 * f_count * out_dom;
    Ok(AffineImageReport {
        free,
        distance: num as f64 / den as f64,
        exactly_zero: num == 0,
        far: 2 * num >= den,
    })
}

fn alphabet_size(a: &crate::prand::Alphabet) -> u64 {
    match a {
        crate::prand::Alphabet::Field(f) => f.q(),
        crate::prand::Alphabet::Plain(s) => *s,
    }
}

// ---------------------------------------------------------------------------
// Brute-force noise-support decoding
// ---------------------------------------------------------------------------

/// Check that `components` are distributions over blocks of `n` symbols of
/// the code's field, flat-layer ordered with supports non-increasing, and
/// return the total support size.
fn check_components(code: &LinearCode, components: &[Dist<f64>]) -> Result<u128> {
    let q = code.field().q();
    let dom = (q as u128)
        .checked_pow(code.n() as u32)
        .ok_or_else(|| Error::TooLarge { what: format!("noise domain q^{}", code.n()), limit: u128::MAX })?;
    if components.is_empty() {
        return Err(Error::BadParams("need at least one noise component".into()));
    }
    let mut prev = usize::MAX;
    let mut total: u128 = 0;
    for c in components {
        if c.n() as u128 != dom {
            return Err(Error::SizeMismatch(format!(
                "noise component ranges over {} outcomes, expected q^n = {dom}",
                c.n()
            )));
        }
        let s = c.support().len();
        if s > prev {
            return Err(Error::BadParams(
                "noise components must be ordered with supports non-increasing".into(),
            ));
        }
        prev = s;
        total += s as u128;
    }
    Ok(total)
}

/// The candidate scan shared by decode and its exact-error audit: find the
/// preferred noise word `z` with `received - z` in the code.
///
/// Preference order is pinned: later components first (these have the
/// smallest supports, hence the largest per-word mass), and within one
/// component the lexicographically smallest `z` as a symbol sequence in
/// coordinate order.  Returns the decoded codeword, or the zero codeword
/// when no support word explains the received block.
fn noise_support_scan(code: &LinearCode, components: &[Dist<f64>], received: &[u64]) -> Vec<u64> {
    let field = code.field();
    let n = code.n();
    let q = field.q();
    let h = code.parity();
    for comp in components.iter().rev() {
        let mut words: Vec<Vec<u64>> = comp.support().iter().map(|&i| digits_of(i as u128, q, n)).collect();
        words.sort();
        for z in words {
            let y: Vec<u64> = received.iter().zip(&z).map(|(&r, &zz)| field.sub(r, zz)).collect();
            if h.mul_vec(&y).iter().all(|&v| v == 0) {
                return y;
            }
        }
    }
    vec![0; n]
}

/// Brute-force decoder for additive noise with known support structure.
///
/// `components` lists the flat parts of the noise, largest support first
/// (the order produced by [`bsc_noise_components`] and
/// [`flat_decomposition`]).  The decoder searches for a noise word `z` in
/// the union of supports with `received - z` a codeword and returns that
/// codeword.  When several qualify, the pinned tie rule picks the
/// candidate from the component with the largest index (smallest support),
/// then the lexicographically smallest `z` in coordinate order.  When none
/// qualifies, the zero codeword is returned as the fixed fallback.
pub fn bsc_brute_decode(code: &LinearCode, components: &[Dist<f64>], received: &[u64]) -> Result<Vec<u64>> {
    if received.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: received.len() });
    }
    for &s in received {
        code.field().check(s)?;
    }
    let total = check_components(code, components)?;
    guard_cost(
        "noise-support decoding",
        total * (code.n() as u128) * ((code.n() - code.k() + 1) as u128),
    )?;
    Ok(noise_support_scan(code, components, received))
}

/// Exact error probability of [`bsc_brute_decode`] on `code` under the
/// noise `sum_i weight_i · component_i` (components flat, largest support
/// first; weights need not sum to one, so the truncated part of a convex
/// decomposition can be audited directly).
///
/// By linearity the decoder's success depends only on the noise word, not
/// the transmitted codeword, so the error is the weighted fraction of
/// support words that fail to decode back to themselves.
pub fn brute_decoder_exact_error(code: &LinearCode, noise: &[(f64, Dist<f64>)]) -> Result<f64> {
    let components: Vec<Dist<f64>> = noise.iter().map(|(_, c)| c.clone()).collect();
    let total = check_components(code, &components)?;
    guard_cost(
        "exact decoder-error enumeration",
        total * total * (code.n() as u128) * ((code.n() - code.k() + 1) as u128),
    )?;
    let q = code.field().q();
    let n = code.n();
    let mut err = 0.0;
    for (weight, comp) in noise {
        let supp = comp.support();
        if supp.is_empty() {
            continue;
        }
        let share = weight / supp.len() as f64;
        for &zi in &supp {
            let z = digits_of(zi as u128, q, n);
            let decoded = noise_support_scan(code, &components, &z);
            if decoded.iter().any(|&v| v != 0) {
                err += share;
            }
        }
    }
    Ok(err)
}

// ---------------------------------------------------------------------------
// Unique decoding of the outer code
// ---------------------------------------------------------------------------

fn poly_divmod(field: &FieldCtx, num: &[u64], den: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let ddeg = den.len() - 1;
    debug_assert!(den[ddeg] != 0, "divisor must have a nonzero leading coefficient");
    let mut rem: Vec<u64> = num.to_vec();
    if rem.len() < den.len() {
        return Ok((vec![0], rem));
    }
    let qlen = rem.len() - ddeg;
    let mut quot = vec![0u64; qlen];
    let lead_inv = field.inv(den[ddeg])?;
    for qi in (0..qlen).rev() {
        let c = field.mul(rem[qi + ddeg], lead_inv);
        quot[qi] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[qi + j] = field.sub(rem[qi + j], field.mul(c, dj));
            }
        }
    }
    rem.truncate(ddeg.max(1));
    Ok((quot, rem))
}

/// Unique decoding of a Reed–Solomon code up to half the minimum distance
/// via the Berlekamp–Welch linear system: solve for `Q` of degree below
/// `k+e` and monic `E` of degree `e = (n-k)/2` with `Q(a_i) = y_i E(a_i)`
/// at every evaluation point, then read the message off `Q/E`.  Fails with
/// `OuterDecodingFailed` when more than `e` positions are corrupted.
pub fn rs_unique_decode(code: &LinearCode, received: &[u64]) -> Result<Vec<u64>> {
    let points = match code.kind() {
        CodeKind::Rs { points } => points.clone(),
        _ => {
            return Err(Error::BadParams(
                "algebraic unique decoding needs a Reed-Solomon code with recorded evaluation points".into(),
            ))
        }
    };
    let field = code.field().clone();
    let n = code.n();
    let k = code.k();
    if received.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: received.len() });
    }
    for &v in received {
        field.check(v)?;
    }
    let e = (n - k) / 2;
    let cols = k + 2 * e;
    let m = QMatrix::from_fn(field.clone(), n, cols, |i, j| {
        if j < k + e {
            field.pow(points[i], j as u128)
        } else {
            let jj = (j - (k + e)) as u128;
            field.sub(0, field.mul(received[i], field.pow(points[i], jj)))
        }
    });
    let rhs: Vec<u64> = (0..n).map(|i| field.mul(received[i], field.pow(points[i], e as u128))).collect();
    let sol = match m.solve(&rhs)? {
        Solve::Unique(v) => v,
        Solve::Many { particular, .. } => particular,
        Solve::None => {
            return Err(Error::OuterDecodingFailed(format!(
                "no codeword within the unique-decoding radius {e}"
            )))
        }
    };
    let q_coeffs = &sol[..k + e];
    let mut e_coeffs: Vec<u64> = sol[k + e..].to_vec();
    e_coeffs.push(1); // monic of degree exactly e
    let (quot, rem) = poly_divmod(&field, q_coeffs, &e_coeffs)?;
    if rem.iter().any(|&c| c != 0) {
        return Err(Error::OuterDecodingFailed(format!(
            "no codeword within the unique-decoding radius {e}"
        )));
    }
    let mut msg = quot;
    msg.resize(k, 0);
    let cw = code.encode(&msg)?;
    let dist = cw.iter().zip(received).filter(|(a, b)| a != b).count();
    if dist > e {
        return Err(Error::OuterDecodingFailed(format!(
            "nearest candidate differs in {dist} positions, radius is {e}"
        )));
    }
    Ok(msg)
}

/// Unique decoding up to half the minimum distance for any code:
/// Berlekamp–Welch when the code is Reed–Solomon, otherwise a cap-guarded
/// enumeration of all codewords.  Exactly one codeword can live within the
/// radius, so the first hit is the answer; none means the error is not
/// uniquely correctable.
pub fn unique_decode(code: &LinearCode, received: &[u64]) -> Result<Vec<u64>> {
    if matches!(code.kind(), CodeKind::Rs { .. }) {
        return rs_unique_decode(code, received);
    }
    if received.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: received.len() });
    }
    let d = match code.cached_distance() {
        Some(d) => d,
        None => code.min_distance()?,
    };
    let radius = (d - 1) / 2;
    let total = (code.field().q() as u128)
        .checked_pow(code.k() as u32)
        .ok_or_else(|| Error::TooLarge { what: "codeword enumeration".into(), limit: caps::current().enumerate })?;
    guard_cost("codeword enumeration for unique decoding", total * code.n() as u128)?;
    for idx in 0..total as u64 {
        let msg = code.message_from_index(idx);
        let cw = code.encode(&msg)?;
        let dist = cw.iter().zip(received).filter(|(a, b)| a != b).count();
        if dist <= radius {
            return Ok(msg);
        }
    }
    Err(Error::OuterDecodingFailed(format!("no codeword within radius {radius}")))
}

// ---------------------------------------------------------------------------
// Concatenation
// ---------------------------------------------------------------------------

fn justesen_check(outer: &LinearCode, ens: &CodeEnsemble) -> Result<()> {
    if ens.len() != outer.n() as u64 {
        return Err(Error::SizeMismatch(format!(
            "ensemble has {} codes but the outer code has length {}; restrict the ensemble to match",
            ens.len(),
            outer.n()
        )));
    }
    let inner_messages = (ens.field().q() as u128).checked_pow(ens.dim() as u32);
    if inner_messages != Some(outer.field().q() as u128) {
        return Err(Error::SizeMismatch(format!(
            "outer symbols range over GF({}) but an inner block encodes q^dim = {}^{} values",
            outer.field().q(),
            ens.field().q(),
            ens.dim()
        )));
    }
    Ok(())
}

/// Concatenated encoding: encode `msg` with the outer code, then encode
/// the `i`-th outer symbol (as `dim` base-`q` digits, least significant
/// first) with the `i`-th code of the ensemble.  The output length is
/// `outer.n() * ensemble.n()`.
pub fn justesen_encode(outer: &LinearCode, ens: &CodeEnsemble, msg: &[u64]) -> Result<Vec<u64>> {
    justesen_check(outer, ens)?;
    if msg.len() != outer.k() {
        return Err(Error::LengthMismatch { expected: outer.k(), got: msg.len() });
    }
    let cw = outer.encode(msg)?;
    let q = ens.field().q();
    let mut out = Vec::with_capacity(outer.n() * ens.n());
    for (i, &sym) in cw.iter().enumerate() {
        let bits = digits_of(sym as u128, q, ens.dim());
        out.extend(ens.code_at(i as u64)?.encode(&bits)?);
    }
    Ok(out)
}

/// Concatenated decoding: decode each inner block (erasure solving on
/// erasure channels, noise-support search otherwise — the noise components
/// are derived from the channel), map each decoded block back to an outer
/// symbol (undecodable blocks contribute the fixed guess 0), then uniquely
/// decode the outer word up to half its minimum distance.  Returns the
/// outer message; `OuterDecodingFailed` when too many blocks are wrong.
pub fn justesen_decode(
    outer: &LinearCode,
    ens: &CodeEnsemble,
    received: &[Option<u64>],
    channel: &Channel,
) -> Result<Vec<u64>> {
    justesen_check(outer, ens)?;
    let n_in = ens.n();
    if received.len() != n_in * outer.n() {
        return Err(Error::LengthMismatch { expected: n_in * outer.n(), got: received.len() });
    }
    if channel.field().q() != ens.field().q() {
        return Err(Error::AlphabetMismatch(format!(
            "channel alphabet GF({}) does not match the inner alphabet GF({})",
            channel.field().q(),
            ens.field().q()
        )));
    }
    let q = ens.field().q();
    // Noise components for the inner brute-force decoder, when needed.
    let components: Option<Vec<Dist<f64>>> = match channel.kind() {
        ChannelKind::Bec { .. } => None,
        ChannelKind::Bsc { p } => Some(bsc_noise_components(n_in, *p, None)?.components),
        ChannelKind::Additive { noise, block } => {
            if *block != n_in {
                return Err(Error::SizeMismatch(format!(
                    "additive noise acts on blocks of {block} symbols but inner blocks have {n_in}"
                )));
            }
            Some(flat_decomposition(noise)?.into_iter().map(|(_, c)| c).collect())
        }
    };
    let mut symbols = Vec::with_capacity(outer.n());
    for i in 0..outer.n() {
        let block = &received[i * n_in..(i + 1) * n_in];
        let code = ens.code_at(i as u64)?;
        let sym = match &components {
            None => {
                let erased: Vec<usize> =
                    (0..n_in).filter(|&j| block[j].is_none()).collect();
                if erasure_pattern_ok(code, &erased)? {
                    match code.erasure_decode(block) {
                        Ok(bits) => index_of(&bits, q) as u64,
                        Err(_) => 0,
                    }
                } else {
                    0
                }
            }
            Some(comps) => {
                let vals: Vec<u64> = block
                    .iter()
                    .map(|o| o.ok_or_else(|| Error::BadParams("erasures on a non-erasure channel".into())))
                    .collect::<Result<_>>()?;
                let cw = bsc_brute_decode(code, comps, &vals)?;
                let full: Vec<Option<u64>> = cw.iter().map(|&v| Some(v)).collect();
                match code.erasure_decode(&full) {
                    Ok(bits) => index_of(&bits, q) as u64,
                    Err(_) => 0,
                }
            }
        };
        symbols.push(sym);
    }
    unique_decode(outer, &symbols)
}

// ---------------------------------------------------------------------------
// Monte Carlo error estimation
// ---------------------------------------------------------------------------

/// What to push through a channel in [`estimate_error`].
pub enum System<'a> {
    /// A single linear code (erasure solving on erasure channels, nearest
    /// codeword otherwise).
    Code(&'a LinearCode),
    /// A concatenated scheme.
    Justesen { outer: &'a LinearCode, ensemble: &'a CodeEnsemble },
}

/// Failure-rate estimate with a Wilson 95% confidence interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl ErrorEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "trials": self.trials,
            "failures": self.failures,
            "value": self.rate,
            "interval": [self.wilson_low, self.wilson_high],
        })
    }
}

/// Wilson 95% score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    // The score interval's endpoints are exactly 0 (resp. 1) at the
    // degenerate counts; pin them so floating-point residue cannot leak in.
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn nearest_codeword_message(code: &LinearCode, received: &[u64]) -> Result<Vec<u64>> {
    let total = (code.field().q() as u128)
        .checked_pow(code.k() as u32)
        .ok_or_else(|| Error::TooLarge { what: "codeword enumeration".into(), limit: caps::current().enumerate })?;
    guard_cost("nearest-codeword search", total * code.n() as u128)?;
    let mut best_dist = usize::MAX;
    let mut best_msg = Vec::new();
    for idx in 0..total as u64 {
        let msg = code.message_from_index(idx);
        let cw = code.encode(&msg)?;
        let dist = cw.iter().zip(received).filter(|(a, b)| a != b).count();
        if dist < best_dist {
            best_dist = dist;
            best_msg = msg;
            if dist == 0 {
                break;
            }
        }
    }
    Ok(best_msg)
}

fn run_trial(system: &System, channel: &Channel, rng: &mut ChaCha20Rng) -> Result<bool> {
    match system {
        System::Code(code) => {
            let q = code.field().q();
            let msg: Vec<u64> = (0..code.k()).map(|_| rng.gen_range(0..q)).collect();
            let cw = code.encode(&msg)?;
            let rcv = channel.transmit(&cw, rng)?;
            match channel.kind() {
                ChannelKind::Bec { .. } => Ok(match code.erasure_decode(&rcv) {
                    Ok(m) => m != msg,
                    Err(_) => true,
                }),
                _ => {
                    let vals: Vec<u64> = rcv.into_iter().map(|o| o.expect("non-erasure channel")).collect();
                    Ok(nearest_codeword_message(code, &vals)? != msg)
                }
            }
        }
        System::Justesen { outer, ensemble } => {
            let q = outer.field().q();
            let msg: Vec<u64> = (0..outer.k()).map(|_| rng.gen_range(0..q)).collect();
            let enc = justesen_encode(outer, ensemble, &msg)?;
            let rcv = channel.transmit(&enc, rng)?;
            match justesen_decode(outer, ensemble, &rcv, channel) {
                Ok(m) => Ok(m != msg),
                Err(Error::OuterDecodingFailed(_)) => Ok(true),
                Err(e) => Err(e),
            }
        }
    }
}

/// Monte Carlo failure-rate estimation: `trials` independent trials, each
/// encoding a fresh uniform message, pushing it through `channel`, and
/// decoding.  Trial `t` draws from a `ChaCha20` generator seeded with
/// `rng_seed` on stream `t`, so results are bit-reproducible and
/// independent of the parallel schedule.
pub fn estimate_error(system: &System, channel: &Channel, trials: u64, rng_seed: u64) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::BadParams("need at least one trial".into()));
    }
    let sys_q = match system {
        System::Code(c) => c.field().q(),
        System::Justesen { ensemble, .. } => ensemble.field().q(),
    };
    if sys_q != channel.field().q() {
        return Err(Error::AlphabetMismatch(format!(
            "system alphabet GF({sys_q}) does not match the channel alphabet GF({})",
            channel.field().q()
        )));
    }
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
            rng.set_stream(t);
            Ok(u64::from(run_trial(system, channel, &mut rng)?))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let rate = failures as f64 / trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(failures, trials);
    Ok(ErrorEstimate { trials, failures, rate, wilson_low, wilson_high })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincode::make_rs;
    use crate::prand::{audit_map, lhl_map, Alphabet, Role, SourceSpec};

    fn gf(q: u64) -> FieldCtx {
        canonical_field_of_size(q).unwrap()
    }

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn bec_extremes_are_identity_and_all_erasures() {
        let f = gf(2);
        let word: Vec<u64> = (0..12).map(|i| i % 2).collect();
        let clear = Channel::bec(&f, 0.0).unwrap();
        let out = clear.transmit(&word, &mut rng(1)).unwrap();
        assert_eq!(out, word.iter().map(|&s| Some(s)).collect::<Vec<_>>());
        let gone = Channel::bec(&f, 1.0).unwrap();
        let out = gone.transmit(&word, &mut rng(1)).unwrap();
        assert!(out.iter().all(|o| o.is_none()));
        let err = clear.transmit(&[0, 2, 1], &mut rng(1)).unwrap_err();
        assert!(matches!(err, Error::AlphabetMismatch(_)));
        assert!(matches!(Channel::bec(&f, 1.5), Err(Error::BadParams(_))));
    }

    #[test]
    fn bsc_flip_count_concentrates() {
        let ch = Channel::bsc(0.1).unwrap();
        let word = vec![0u64; 10_000];
        let out = ch.transmit(&word, &mut rng(424242)).unwrap();
        let flips = out.iter().filter(|o| **o == Some(1)).count();
        // Mean 1000, sigma = sqrt(10^4 * 0.1 * 0.9) = 30; allow 3 sigma.
        assert!((910..=1090).contains(&flips), "flip count {flips} outside [910, 1090]");
        let again = ch.transmit(&word, &mut rng(424242)).unwrap();
        assert_eq!(out, again, "same seed must reproduce the same pattern");
    }

    #[test]
    fn additive_channel_adds_blockwise() {
        let f = gf(7);
        let z = index_of(&[1, 2, 3], 7) as usize;
        let noise = Dist::<f64>::point(343, z).unwrap();
        let ch = Channel::additive(&f, 3, noise).unwrap();
        let word = vec![0, 1, 2, 3, 4, 5, 6, 0, 1];
        let out = ch.transmit(&word, &mut rng(5)).unwrap();
        let want: Vec<Option<u64>> = word
            .chunks(3)
            .flat_map(|c| vec![Some(f.add(c[0], 1)), Some(f.add(c[1], 2)), Some(f.add(c[2], 3))])
            .collect();
        assert_eq!(out, want);

        let silent = Channel::additive(&f, 3, Dist::<f64>::point(343, 0).unwrap()).unwrap();
        let out = silent.transmit(&word, &mut rng(5)).unwrap();
        assert_eq!(out, word.iter().map(|&s| Some(s)).collect::<Vec<_>>());

        let err = silent.transmit(&[0, 1], &mut rng(5)).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch(_)), "length not a multiple of the block");
        let err = Channel::additive(&f, 3, Dist::<f64>::point(10, 0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch(_)), "noise domain must be q^block");

        let bsc = Channel::bsc(0.1).unwrap();
        let err = bsc.transmit(&[0, 3, 1], &mut rng(5)).unwrap_err();
        assert!(matches!(err, Error::AlphabetMismatch(_)), "bit-flip channel is binary");
    }

    #[test]
    fn parity_ensemble_has_exact_redundancy_and_logs_repairs() {
        let map = lhl_map(10, 5, Role::LosslessCondenser, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::ParityFromCondenser, &map).unwrap();
        assert_eq!(ens.len(), 1024);
        assert_eq!(ens.n(), 10);
        assert_eq!(ens.dim(), 5);
        assert_eq!(ens.rate(), 0.5);
        // Multiplication by a nonzero field element is invertible, so every
        // nonzero seed's truncated matrix already has full row rank: seed 0
        // (the zero matrix) is the one surrogate.
        assert_eq!(ens.repaired_seeds(), &[0]);
        for u in 0..ens.len() {
            let code = ens.code_at(u).unwrap();
            assert_eq!(code.k(), 5, "seed {u}: redundancy must be exactly the row count");
            assert_eq!(code.parity().rank(), 5, "seed {u}");
        }
        // The surrogate [I | 0] kills the first 5 coordinates.
        let fixed = ens.code_at(0).unwrap();
        for cw_idx in 0..32u64 {
            let msg = fixed.message_from_index(cw_idx);
            let cw = fixed.encode(&msg).unwrap();
            assert!(cw[..5].iter().all(|&b| b == 0));
        }
        assert!(matches!(ens.code_at(5000), Err(Error::BadRange(_))));
    }

    #[test]
    fn generator_ensemble_rate_exact_and_nonlinear_rejected() {
        let map = lhl_map(10, 5, Role::Extractor, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap();
        assert_eq!(ens.len(), 1024);
        assert_eq!(ens.dim(), 5);
        assert_eq!(ens.rate(), 0.5);
        assert_eq!(ens.repaired_seeds(), &[0]);
        for u in 0..ens.len() {
            let code = ens.code_at(u).unwrap();
            assert_eq!(code.k(), 5);
            assert_eq!(code.generator().rank(), 5);
        }
        let sub = ens.restrict(8).unwrap();
        assert_eq!(sub.len(), 8);
        assert_eq!(sub.repaired_seeds(), &[0]);
        assert!(matches!(ens.restrict(0), Err(Error::BadParams(_))));
        assert!(matches!(ens.restrict(2000), Err(Error::BadParams(_))));

        let nonlinear = SeededMap::custom(
            Role::Extractor,
            Alphabet::Plain(2),
            4,
            Alphabet::Plain(2),
            2,
            4,
            1.0,
            0.5,
            false,
            "and-of-bits",
            |w, u| vec![w[0] & w[1], w[2] ^ (u & 1)],
        );
        assert!(matches!(
            ensemble(EnsembleKind::GeneratorFromExtractor, &nonlinear),
            Err(Error::NotLinear)
        ));
    }

    #[test]
    fn erasure_pattern_check_matches_mds_promise() {
        let f = gf(7);
        let code = make_rs(&f, 7, 3, None).unwrap();
        assert!(erasure_pattern_ok(&code, &[]).unwrap());
        // MDS: any 3 surviving Vandermonde columns are independent, so every
        // pattern of at most n-k erasures is fine and every larger one is not.
        use itertools::Itertools;
        for s in (0..7usize).combinations(4) {
            assert!(erasure_pattern_ok(&code, &s).unwrap(), "pattern {s:?}");
        }
        for s in (0..7usize).combinations(5) {
            assert!(!erasure_pattern_ok(&code, &s).unwrap(), "pattern {s:?}");
        }
        assert!(matches!(erasure_pattern_ok(&code, &[9]), Err(Error::BadRange(_))));
    }

    #[test]
    fn erased_sources_are_exactly_uniform_or_far() {
        let map = lhl_map(10, 4, Role::Extractor, 0.5).unwrap();
        let erased = [0usize, 2, 4, 6, 8];
        let keep: Vec<usize> = (0..10).filter(|i| !erased.contains(i)).collect();
        let mut fails = 0u64;
        let mut dist_sum = 0.0;
        for u in 0..1024u64 {
            let rep = erased_source_nonuniformity(&map, u, &erased).unwrap();
            assert_eq!(rep.free, 5);
            // Exact dichotomy for a linear map: exactly uniform or at least
            // 1/2 away, decided by integer counting.
            assert!(rep.exactly_zero || rep.far, "seed {u}: distance {}", rep.distance);
            // The image is exactly uniform iff the surviving generator
            // columns span, i.e. iff the erasure pattern is decodable.
            let full = map.matrix_of(u).unwrap().select_cols(&keep).rank() == 4;
            assert_eq!(rep.exactly_zero, full, "seed {u}");
            if !rep.exactly_zero {
                fails += 1;
            }
            dist_sum += rep.distance;
        }
        let eps_meas = dist_sum / 1024.0;
        let fail_frac = fails as f64 / 1024.0;
        // Failing seeds sit at distance >= 1/2, so the measured average error
        // dominates fail_frac/2 and the 5x bound has slack 2.5x.
        assert!(
            fail_frac <= 5.0 * eps_meas + 1e-12,
            "fail fraction {fail_frac} vs 5 x measured error {eps_meas}"
        );
        assert!(fail_frac < 0.6, "sanity: most patterns of half the coordinates decode ({fail_frac})");
    }

    #[test]
    fn brute_decoder_follows_component_and_index_preferences() {
        let f = gf(2);
        let gen = QMatrix::from_rows(f.clone(), vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
        let code = LinearCode::from_generator(gen).unwrap();
        let idx = |bits: &[u64]| index_of(bits, 2) as usize;

        // Both support words of the single component explain the received
        // block; the lexicographically smaller one (coordinate order) wins.
        let comp_a = Dist::<f64>::flat(16, &[idx(&[1, 0, 0, 0]), idx(&[0, 0, 1, 0])]).unwrap();
        let got = bsc_brute_decode(&code, &[comp_a.clone()], &[1, 0, 0, 0]).unwrap();
        assert_eq!(got, vec![1, 0, 1, 0], "z = 0010 precedes z = 1000 lexicographically");

        // A later (smaller-support) component overrides that choice.
        let comp_b = Dist::<f64>::flat(16, &[idx(&[1, 0, 0, 0])]).unwrap();
        let got = bsc_brute_decode(&code, &[comp_a.clone(), comp_b], &[1, 0, 0, 0]).unwrap();
        assert_eq!(got, vec![0, 0, 0, 0], "the last component is scanned first");

        // No support word explains the block: fixed fallback, the zero word.
        let off = Dist::<f64>::flat(16, &[idx(&[1, 1, 0, 0])]).unwrap();
        let got = bsc_brute_decode(&code, &[off], &[1, 0, 0, 0]).unwrap();
        assert_eq!(got, vec![0, 0, 0, 0]);

        // Zero noise in the support: the received codeword is returned as is.
        let zero = Dist::<f64>::flat(16, &[0]).unwrap();
        let got = bsc_brute_decode(&code, &[zero.clone()], &[1, 1, 1, 1]).unwrap();
        assert_eq!(got, vec![1, 1, 1, 1]);

        // Validation: growing supports and wrong domains are rejected.
        let err = bsc_brute_decode(&code, &[zero, comp_a], &[1, 0, 0, 0]).unwrap_err();
        assert!(matches!(err, Error::BadParams(_)));
        let bad = Dist::<f64>::flat(8, &[1]).unwrap();
        let err = bsc_brute_decode(&code, &[bad], &[1, 0, 0, 0]).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch(_)));
    }

    #[test]
    fn syndrome_decoding_matches_condenser_quality() {
        // Parity-side family from a lossless-condenser map; flat noise with
        // 8 support words (3 bits of entropy): the fraction of seeds whose
        // exact decoder error exceeds sqrt(eps) stays below 2 sqrt(eps),
        // where eps is the measured (not nominal) condensing error on that
        // very source.
        let map = lhl_map(10, 5, Role::LosslessCondenser, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::ParityFromCondenser, &map).unwrap();
        let supp: Vec<usize> = (0..8).map(|b| 1usize << b).collect();
        let words: Vec<Vec<u64>> = supp.iter().map(|&i| digits_of(i as u128, 2, 10)).collect();
        let report = audit_map::<f64>(
            &map,
            3.0,
            &SourceSpec::Explicit(vec![words]),
            0.5,
        )
        .unwrap();
        let eps = report.worst_f64;
        assert!(eps > 0.0 && eps < 0.25, "measured condensing error {eps} out of the expected range");
        let noise = Dist::<f64>::flat(1 << 10, &supp).unwrap();
        let threshold = eps.sqrt();
        let mut bad = 0u64;
        for u in 0..ens.len() {
            let err = brute_decoder_exact_error(ens.code_at(u).unwrap(), &[(1.0, noise.clone())]).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&err));
            if err > threshold + 1e-12 {
                bad += 1;
            }
        }
        let frac = bad as f64 / ens.len() as f64;
        assert!(
            frac <= 2.0 * threshold + 1e-12,
            "fraction {frac} of seeds err above sqrt(eps)={threshold}, bound is {}",
            2.0 * threshold
        );
    }

    #[test]
    fn convex_noise_keeps_most_seeds_good() {
        // Noise = 0.7 x (flat on 8 words) + 0.3 x (flat on 4 words).  The
        // decoder error on the mixture is controlled by the worst measured
        // condensing error over the pairwise support unions: at least
        // 1 - t(t+1) sqrt(eps) of the seeds err at most 2t sqrt(eps), t = 2.
        // Nine syndrome bits keep the measured error small enough for the
        // guarantee to bite (sqrt(eps) must stay below 1/6).
        let map = lhl_map(12, 9, Role::LosslessCondenser, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::ParityFromCondenser, &map).unwrap();
        let supp1: Vec<usize> = (0..8).map(|b| 1usize << b).collect();
        let supp2: Vec<usize> = vec![3, 5, 9, 17];
        let union: Vec<usize> = {
            let mut v = supp1.clone();
            for &s in &supp2 {
                if !v.contains(&s) {
                    v.push(s);
                }
            }
            v
        };
        let to_words = |s: &[usize]| -> Vec<Vec<u64>> {
            s.iter().map(|&i| digits_of(i as u128, 2, 12)).collect()
        };
        let report = audit_map::<f64>(
            &map,
            4.0,
            &SourceSpec::Explicit(vec![to_words(&supp1), to_words(&union), to_words(&supp2)]),
            0.5,
        )
        .unwrap();
        let eps = report.worst_f64;
        assert!(eps > 0.0 && eps < 0.25, "measured pairwise condensing error {eps}");
        let root = eps.sqrt();
        let t = 2.0_f64;
        let comp1 = Dist::<f64>::flat(1 << 12, &supp1).unwrap();
        let comp2 = Dist::<f64>::flat(1 << 12, &supp2).unwrap();
        let noise = [(0.7, comp1), (0.3, comp2)];
        let mut good = 0u64;
        for u in 0..ens.len() {
            let err = brute_decoder_exact_error(ens.code_at(u).unwrap(), &noise).unwrap();
            if err <= 2.0 * t * root + 1e-12 {
                good += 1;
            }
        }
        let good_frac = good as f64 / ens.len() as f64;
        let bound = 1.0 - t * (t + 1.0) * root;
        assert!(
            good_frac >= bound - 1e-12,
            "good fraction {good_frac} below 1 - t(t+1) sqrt(eps) = {bound}"
        );
        assert!(bound > 0.0, "instance must make the guarantee non-vacuous, got bound {bound}");
    }

    #[test]
    fn binomial_noise_decomposes_into_weight_shells() {
        let parts = bsc_noise_components(12, 0.25, Some(0.15)).unwrap();
        assert_eq!((parts.lo, parts.hi), (2, 4));
        assert_eq!(parts.shells, vec![4, 3, 2], "largest shell first: C(12,4) > C(12,3) > C(12,2)");
        let sizes: Vec<usize> = parts.components.iter().map(|c| c.support().len()).collect();
        assert_eq!(sizes, vec![495, 220, 66]);
        for (i, &w) in parts.shells.iter().enumerate() {
            let pmf = binom_u128(12, w) as f64 * 0.25f64.powi(w as i32) * 0.75f64.powi(12 - w as i32);
            assert!((parts.weights[i] - pmf).abs() < 1e-15);
        }
        assert!(parts.gamma > 0.0);
        assert!(
            parts.gamma <= bsc_tail_bound(12, 0.25, 0.15),
            "remainder mass {} above the pinned tail bound {}",
            parts.gamma,
            bsc_tail_bound(12, 0.25, 0.15)
        );
        // Exact reassembly of the product noise.
        let back = parts.reassemble().unwrap();
        let full = bsc_noise(12, 0.25).unwrap();
        for i in 0..full.n() {
            assert!(
                (back.mass()[i] - full.mass()[i]).abs() <= 1e-12,
                "outcome {i}: {} vs {}",
                back.mass()[i],
                full.mass()[i]
            );
        }
        // Default window.
        let dflt = bsc_noise_components(12, 0.25, None).unwrap();
        assert!((dflt.eta - 0.025).abs() < 1e-15);
        assert!(matches!(bsc_noise_components(12, 0.25, Some(-0.1)), Err(Error::BadParams(_))));
    }

    #[test]
    fn layered_decomposition_reassembles_any_distribution() {
        let d = Dist::<f64>::from_counts(&[5, 2, 2, 1]).unwrap();
        let parts = flat_decomposition(&d).unwrap();
        let sizes: Vec<usize> = parts.iter().map(|(_, c)| c.support().len()).collect();
        assert_eq!(sizes, vec![4, 3, 1], "largest layer first");
        let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
        assert!((weights[0] - 0.4).abs() < 1e-12);
        assert!((weights[1] - 0.3).abs() < 1e-12);
        assert!((weights[2] - 0.3).abs() < 1e-12);
        let refs: Vec<(f64, &Dist<f64>)> = parts.iter().map(|(w, c)| (*w, c)).collect();
        let back = Dist::mix(&refs).unwrap();
        for i in 0..d.n() {
            assert!((back.mass()[i] - d.mass()[i]).abs() <= 1e-12);
        }
        // A uniform distribution is a single layer of weight one.
        let u = Dist::<f64>::uniform(6).unwrap();
        let parts = flat_decomposition(&u).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - 1.0).abs() < 1e-12);
        assert_eq!(parts[0].1.support().len(), 6);
    }

    #[test]
    fn parity_ensemble_repackaged_is_a_lossless_condenser() {
        // Build the parity family, measure which seeds decode a fixed flat
        // noise perfectly, then repackage the very same parity maps as a
        // seeded condenser: its measured error on that source is bounded by
        // the fraction of imperfect seeds (perfect syndrome decoding means
        // the support maps injectively, i.e. zero condensing loss).
        let map = lhl_map(8, 4, Role::LosslessCondenser, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::ParityFromCondenser, &map).unwrap();
        assert_eq!(ens.len(), 256);
        let supp: Vec<usize> = vec![1, 2, 3, 4];
        let noise = Dist::<f64>::flat(1 << 8, &supp).unwrap();
        let mut gamma_cnt = 0u64;
        for u in 0..ens.len() {
            let err = brute_decoder_exact_error(ens.code_at(u).unwrap(), &[(1.0, noise.clone())]).unwrap();
            if err > 1e-15 {
                gamma_cnt += 1;
            }
        }
        let gamma = gamma_cnt as f64 / ens.len() as f64;
        assert!(gamma < 0.9, "sanity: some seeds must decode perfectly ({gamma})");

        let mats: Vec<QMatrix> = (0..ens.len())
            .map(|u| ens.code_at(u).unwrap().parity().clone())
            .collect();
        let repack = SeededMap::custom(
            Role::LosslessCondenser,
            Alphabet::Plain(2),
            8,
            Alphabet::Plain(2),
            4,
            ens.len(),
            2.0,
            gamma,
            true,
            "parity family as a condenser",
            move |x, u| mats[u as usize].mul_vec(x),
        );
        let words: Vec<Vec<u64>> = supp.iter().map(|&i| digits_of(i as u128, 2, 8)).collect();
        let report = audit_map::<f64>(&repack, 2.0, &SourceSpec::Explicit(vec![words]), 0.5).unwrap();
        assert!(
            report.worst_f64 <= gamma + 1e-12,
            "measured condensing error {} above the decoder-derived bound {gamma}",
            report.worst_f64
        );
    }

    #[test]
    fn justesen_encodes_blockwise_and_roundtrips() {
        let map = lhl_map(8, 4, Role::Extractor, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap().restrict(8).unwrap();
        let f16 = gf(16);
        let outer = make_rs(&f16, 8, 3, None).unwrap();

        // Shape errors.
        let outer7 = make_rs(&f16, 7, 3, None).unwrap();
        assert!(matches!(justesen_encode(&outer7, &ens, &[1, 2, 3]), Err(Error::SizeMismatch(_))));
        let f8 = gf(8);
        let outer8 = make_rs(&f8, 8, 3, None).unwrap();
        assert!(matches!(justesen_encode(&outer8, &ens, &[1, 2, 3]), Err(Error::SizeMismatch(_))));
        assert!(matches!(
            justesen_encode(&outer, &ens, &[1, 2]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));

        // The zero message encodes to the zero word, and the length is n*s.
        let zero = justesen_encode(&outer, &ens, &[0, 0, 0]).unwrap();
        assert_eq!(zero.len(), 64);
        assert!(zero.iter().all(|&b| b == 0));

        // Noiseless roundtrip.
        let msg = vec![1, 7, 9];
        let enc = justesen_encode(&outer, &ens, &msg).unwrap();
        assert_eq!(enc.len(), 64);
        let rcv: Vec<Option<u64>> = enc.iter().map(|&b| Some(b)).collect();
        let ch = Channel::bec(&gf(2), 0.0).unwrap();
        assert_eq!(justesen_decode(&outer, &ens, &rcv, &ch).unwrap(), msg);
    }

    #[test]
    fn justesen_corrects_up_to_outer_radius() {
        let map = lhl_map(8, 4, Role::Extractor, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap().restrict(8).unwrap();
        let f16 = gf(16);
        let outer = make_rs(&f16, 8, 3, None).unwrap(); // distance 6, radius 2
        let ch = Channel::bec(&gf(2), 0.0).unwrap();
        let msg = vec![4, 11, 2];
        let cw = outer.encode(&msg).unwrap();
        let enc = justesen_encode(&outer, &ens, &msg).unwrap();

        let corrupt = |blocks: &[usize]| -> Vec<Option<u64>> {
            let mut word = enc.clone();
            for &i in blocks {
                let other = (cw[i] + 1) % 16;
                let bits = digits_of(other as u128, 2, 4);
                let block = ens.code_at(i as u64).unwrap().encode(&bits).unwrap();
                word[i * 8..(i + 1) * 8].copy_from_slice(&block);
            }
            word.into_iter().map(Some).collect()
        };

        // Up to radius-many whole-block corruptions are repaired exactly.
        assert_eq!(justesen_decode(&outer, &ens, &corrupt(&[1]), &ch).unwrap(), msg);
        assert_eq!(justesen_decode(&outer, &ens, &corrupt(&[1, 4]), &ch).unwrap(), msg);
        // One more corrupted block leaves no codeword inside the radius.
        assert!(matches!(
            justesen_decode(&outer, &ens, &corrupt(&[1, 4, 6]), &ch),
            Err(Error::OuterDecodingFailed(_))
        ));

        // The algebraic unique decoder agrees on plain outer words.
        let mut hit = cw.clone();
        hit[0] = f16.add(hit[0], 1);
        hit[5] = f16.add(hit[5], 3);
        assert_eq!(rs_unique_decode(&outer, &hit).unwrap(), msg);
        hit[3] = f16.add(hit[3], 7);
        assert!(matches!(rs_unique_decode(&outer, &hit), Err(Error::OuterDecodingFailed(_))));
        // Enumeration agrees with the algebraic decoder on a correctable word.
        let mut two = cw.clone();
        two[2] = f16.add(two[2], 5);
        assert_eq!(unique_decode(&outer, &two).unwrap(), msg);
    }

    #[test]
    fn justesen_failure_decays_with_block_count() {
        let map = lhl_map(8, 4, Role::Extractor, 0.5).unwrap();
        let full = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap();
        let f16 = gf(16);
        let ch = Channel::bec(&gf(2), 0.1).unwrap();
        let mut counts = Vec::new();
        for (s, k) in [(5usize, 2usize), (9, 4), (13, 6)] {
            let outer = make_rs(&f16, s, k, None).unwrap();
            let ens = full.restrict(s as u64).unwrap();
            let est = estimate_error(
                &System::Justesen { outer: &outer, ensemble: &ens },
                &ch,
                2500,
                2024,
            )
            .unwrap();
            counts.push(est.failures);
        }
        assert!(
            counts[0] > counts[1] && counts[1] > counts[2],
            "failures must fall strictly as blocks are added: {counts:?}"
        );
        // Measured once and frozen: the deterministic per-trial streams make
        // the counts bit-reproducible.
        assert_eq!(counts, vec![1172, 861, 484]);
    }

    #[test]
    fn rs_over_truncated_erasure_channel_never_fails() {
        let f = gf(7);
        let code = make_rs(&f, 7, 3, None).unwrap(); // distance 5
        let ch = Channel::bec_truncated(&f, 0.5, 4).unwrap();
        let est = estimate_error(&System::Code(&code), &ch, 400, 7).unwrap();
        assert_eq!(est.failures, 0, "any 4 erasures leave 3 independent columns");
        assert_eq!(est.rate, 0.0);
        assert_eq!(est.wilson_low, 0.0);
        assert!(est.wilson_high < 0.01);
        // Same seed, same answer, bit for bit.
        let again = estimate_error(&System::Code(&code), &ch, 400, 7).unwrap();
        assert_eq!(est, again);
        // Clear channel: trivially zero failures.
        let clear = Channel::bec(&f, 0.0).unwrap();
        let est = estimate_error(&System::Code(&code), &clear, 50, 1).unwrap();
        assert_eq!(est.failures, 0);
        // Alphabet mismatch is rejected up front.
        let bsc = Channel::bsc(0.1).unwrap();
        assert!(matches!(
            estimate_error(&System::Code(&code), &bsc, 10, 1),
            Err(Error::AlphabetMismatch(_))
        ));
        assert!(matches!(
            estimate_error(&System::Code(&code), &ch, 0, 1),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn trial_streams_are_independent_across_blocks() {
        let map = lhl_map(8, 4, Role::Extractor, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap();
        let c0 = ens.code_at(1).unwrap();
        let c1 = ens.code_at(2).unwrap();
        let ch = Channel::bec(&gf(2), 0.25).unwrap();
        let trials = 10_000u64;
        let word = vec![0u64; 16];
        let (mut s0, mut s1, mut s01) = (0u64, 0u64, 0u64);
        for t in 0..trials {
            let mut rng = ChaCha20Rng::seed_from_u64(31);
            rng.set_stream(t);
            let rcv = ch.transmit(&word, &mut rng).unwrap();
            let erased0: Vec<usize> = (0..8).filter(|&j| rcv[j].is_none()).collect();
            let erased1: Vec<usize> = (8..16).filter(|&j| rcv[j].is_none()).map(|j| j - 8).collect();
            let f0 = !erasure_pattern_ok(c0, &erased0).unwrap();
            let f1 = !erasure_pattern_ok(c1, &erased1).unwrap();
            s0 += u64::from(f0);
            s1 += u64::from(f1);
            s01 += u64::from(f0 && f1);
        }
        let m0 = s0 as f64 / trials as f64;
        let m1 = s1 as f64 / trials as f64;
        let m01 = s01 as f64 / trials as f64;
        let v0 = m0 * (1.0 - m0);
        let v1 = m1 * (1.0 - m1);
        assert!(v0 > 0.0 && v1 > 0.0, "both blocks must fail sometimes at p=0.25");
        let corr = (m01 - m0 * m1) / (v0 * v1).sqrt();
        assert!(
            corr.abs() < 0.05,
            "per-block failures should be uncorrelated, got corr {corr} (means {m0}, {m1})"
        );
    }

    #[test]
    fn wilson_interval_brackets_the_rate() {
        let (lo, hi) = wilson_interval(0, 200);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(200, 200);
        assert!(lo > 0.95 && lo < 1.0);
        assert_eq!(hi, 1.0);
        let (lo, hi) = wilson_interval(3, 50);
        assert!(lo < 3.0 / 50.0 && 3.0 / 50.0 < hi);
        // Monotone in the failure count.
        let (lo1, hi1) = wilson_interval(10, 100);
        let (lo2, hi2) = wilson_interval(20, 100);
        assert!(lo2 > lo1 && hi2 > hi1);
    }

    #[test]
    fn estimate_error_replays_bitwise() {
        let map = lhl_map(8, 4, Role::Extractor, 0.5).unwrap();
        let ens = ensemble(EnsembleKind::GeneratorFromExtractor, &map).unwrap().restrict(5).unwrap();
        let outer = make_rs(&gf(16), 5, 2, None).unwrap();
        let ch = Channel::bec(&gf(2), 0.25).unwrap();
        let sys = System::Justesen { outer: &outer, ensemble: &ens };
        let a = estimate_error(&sys, &ch, 500, 99).unwrap();
        let b = estimate_error(&sys, &ch, 500, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.failures, 459, "measured once and frozen");
        assert!(a.wilson_low <= a.rate && a.rate <= a.wilson_high);
        assert_eq!(a.to_json()["trials"], 500);
    }
}
