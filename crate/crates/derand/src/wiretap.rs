//! Secrecy protocols built from invertible extractors: the decoder is an
//! extractor, the encoder is its inverter, and privacy against an intruder
//! who observes part of the transmitted block is audited by exact
//! conditional-distribution computation at desk scale.
//!
//! The audit measures, for every observed position set `S` and every
//! observation `w`, the statistical distance of the conditional message
//! distribution from uniform; the report carries the worst distance, the
//! probability mass of observations exceeding a caller-chosen threshold,
//! and the Shannon equivocation (in message-alphabet symbols).
//!
//! Decoders here never err: decodability is an exhaustively checked
//! construction invariant, not a probabilistic event. Relaxations that
//! allow a small decoding-error probability buy slightly better parameters
//! but are out of scope.
//!
//! Two related notions are documented but deliberately not implemented:
//! an *all-or-nothing transform* is an (often unkeyed) encoding such that
//! missing even a few output symbols reveals essentially nothing about any
//! input symbol, and an *exposure-resilient function* keeps its output
//! pseudo/statistically uniform even when all but a few input bits are
//! leaked. Both are close cousins of the schemes below (set m = n, or
//! drop the message entirely), and the audit machinery would apply, but
//! this module only ships encoder/decoder pairs with explicit messages.

use std::collections::HashMap;

use itertools::Itertools;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::lincode::{make_gabidulin, make_rs, LinearCode, QMatrix};
use crate::prand::{code_map, digits_of, index_of, Alphabet, CodeMapMode, Role, SeededMap};
use crate::probdist::{self, Dist, Scalar};

/// Construction family of a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    /// Reed-Solomon generator extractor: perfect privacy up to `n - k`
    /// observed symbols whenever `q >= n`.
    Mds,
    /// Any invertible extractor supplied as a [`SeededMap`].
    CodeMap,
    /// Maximum-rank-distance generator extractor: privacy also holds
    /// against base-subfield-linear observations of the block symbols.
    Gabidulin,
    /// Strong seeded extractor whose seed travels on a separate side
    /// channel, always assumed fully observed.
    SideChannel,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Mds => "mds",
            SchemeKind::CodeMap => "code-map",
            SchemeKind::Gabidulin => "gabidulin",
            SchemeKind::SideChannel => "side-channel",
        }
    }
}

/// An encoder/decoder pair with claimed resilience `(t, eps, gamma)`:
/// decoding inverts encoding for every message and every randomness tuple,
/// and for every position set of size at most `t`, observations leaving the
/// conditional message distribution more than `eps` from uniform occur with
/// probability at most `gamma`.
///
/// The encoder's randomness is an explicit mixed-radix digit tuple (see
/// [`Self::randomness_radices`]); this keeps every sampled quantity exactly
/// uniform and makes the audits exact.
#[derive(Clone)]
pub struct WiretapScheme {
    map: SeededMap,
    kind: SchemeKind,
    claimed_t: usize,
    claimed_eps: f64,
    claimed_gamma: f64,
    /// Seed symbols appended to the block (side-channel schemes only).
    side_bits: usize,
    radices: Vec<u64>,
    /// Whether the encoder provably induces the exactly uniform
    /// distribution on each decoder fiber (true for all built-in kinds,
    /// whose inverters are exact). Enables block-space audit enumeration.
    fiber_uniform: bool,
    label: String,
}

impl std::fmt::Debug for WiretapScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WiretapScheme")
            .field("label", &self.label)
            .field("kind", &self.kind.name())
            .field("n", &self.block_len())
            .field("m", &self.msg_len())
            .field("t", &self.claimed_t)
            .finish()
    }
}

impl WiretapScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Block alphabet (messages use the same alphabet).
    pub fn alphabet(&self) -> &Alphabet {
        self.map.in_alphabet()
    }

    /// Total transmitted block length, side-channel symbols included.
    pub fn block_len(&self) -> usize {
        self.map.n_in() + self.side_bits
    }

    /// Length of the main-channel part of the block.
    pub fn main_len(&self) -> usize {
        self.map.n_in()
    }

    pub fn side_len(&self) -> usize {
        self.side_bits
    }

    pub fn msg_len(&self) -> usize {
        self.map.n_out()
    }

    pub fn rate(&self) -> f64 {
        self.msg_len() as f64 / self.block_len() as f64
    }

    /// Claimed `(t, eps, gamma)`.
    pub fn claimed(&self) -> (usize, f64, f64) {
        (self.claimed_t, self.claimed_eps, self.claimed_gamma)
    }

    /// Relative resilience `t / n`.
    pub fn delta(&self) -> f64 {
        self.claimed_t as f64 / self.block_len() as f64
    }

    pub fn map(&self) -> &SeededMap {
        &self.map
    }

    /// Radices of the encoder's randomness digits.
    pub fn randomness_radices(&self) -> &[u64] {
        &self.radices
    }

    /// Randomness cost in bits.
    pub fn r_bits(&self) -> f64 {
        self.radices.iter().map(|&r| (r as f64).log2()).sum()
    }

    /// Encode a message with an explicit uniform randomness tuple.
    pub fn encode(&self, msg: &[u64], digits: &[u64]) -> Result<Vec<u64>> {
        if digits.len() != self.radices.len() {
            return Err(Error::LengthMismatch { expected: self.radices.len(), got: digits.len() });
        }
        for (&d, &r) in digits.iter().zip(&self.radices) {
            if d >= r {
                return Err(Error::BadRange(format!("randomness digit {d} out of radix {r}")));
            }
        }
        match self.kind {
            SchemeKind::SideChannel => {
                // First digit selects a nonzero seed; the rest feed the
                // per-seed inverter.
                let z = digits[0] + 1;
                let mut block = self.map.invert_with(msg, z, &digits[1..])?;
                block.extend((0..self.side_bits).map(|i| (z >> i) & 1));
                Ok(block)
            }
            _ => self.map.invert_with(msg, 0, digits),
        }
    }

    /// Encode with randomness drawn from `rng`.
    pub fn encode_rng(&self, msg: &[u64], rng: &mut dyn RngCore) -> Result<Vec<u64>> {
        let digits: Vec<u64> = self.radices.iter().map(|&r| rng.gen_range(0..r)).collect();
        self.encode(msg, &digits)
    }

    /// Decode a block (the extractor itself).
    pub fn decode(&self, block: &[u64]) -> Result<Vec<u64>> {
        if block.len() != self.block_len() {
            return Err(Error::LengthMismatch { expected: self.block_len(), got: block.len() });
        }
        match self.kind {
            SchemeKind::SideChannel => {
                let (main, side) = block.split_at(self.main_len());
                let z = side.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b << i));
                self.map.eval(main, z)
            }
            _ => self.map.eval(block, 0),
        }
    }

    pub fn descriptor_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "q": self.alphabet().size(),
            "n": self.block_len(),
            "m": self.msg_len(),
            "r_bits": self.r_bits(),
            "t": self.claimed_t,
            "eps": self.claimed_eps,
            "gamma": self.claimed_gamma,
            "rate": self.rate(),
            "provenance": self.label,
        })
    }

    /// Exhaustive decodability check over all (message, randomness) pairs,
    /// run at construction whenever the product space is at most `2^22`
    /// (larger schemes skip the check; the per-call validation still
    /// catches length errors).
    fn check_decodability(&self) -> Result<()> {
        let msg_alpha = self.map.out_alphabet().size();
        let msg_count = (msg_alpha as u128).pow(self.msg_len() as u32);
        let r_total: u128 = self.radices.iter().map(|&r| r as u128).product();
        if msg_count.saturating_mul(r_total) > 1 << 22 {
            return Ok(());
        }
        let failures = (0..msg_count as u64)
            .into_par_iter()
            .map(|x_idx| -> Result<u64> {
                let msg = digits_of(x_idx as u128, msg_alpha, self.msg_len());
                let mut bad = 0u64;
                for r_idx in 0..r_total {
                    let digits = tuple_of(r_idx, &self.radices);
                    let block = self.encode(&msg, &digits)?;
                    if self.decode(&block)? != msg {
                        bad += 1;
                    }
                }
                Ok(bad)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        if failures > 0 {
            return Err(Error::Inconsistent);
        }
        Ok(())
    }
}

/// Mixed-radix digits of `idx` (first radix is least significant).
fn tuple_of(idx: u128, radices: &[u64]) -> Vec<u64> {
    let mut rest = idx;
    radices
        .iter()
        .map(|&r| {
            let d = (rest % r as u128) as u64;
            rest /= r as u128;
            d
        })
        .collect()
}

/// Perfect-privacy scheme from a Reed-Solomon generator extractor:
/// block length `n`, message length `k`, claimed `(n - k, 0, 0)` over any
/// field with `q >= n`; rate `k/n = 1 - t/n` is information-theoretically
/// optimal.
pub fn make_mds_scheme(field: &FieldCtx, n: usize, k: usize) -> Result<WiretapScheme> {
    let code = make_rs(field, n, k, None)?;
    let map = code_map(&code, CodeMapMode::GenExtractor)?;
    let radices = map.inverter_radices().expect("code maps carry inverters").to_vec();
    let scheme = WiretapScheme {
        label: format!("mds({}, n={n}, k={k})", field.spec_string()),
        map,
        kind: SchemeKind::Mds,
        claimed_t: n - k,
        claimed_eps: 0.0,
        claimed_gamma: 0.0,
        side_bits: 0,
        radices,
        fiber_uniform: true,
    };
    scheme.check_decodability()?;
    Ok(scheme)
}

/// Scheme from any invertible extractor map. The claim follows the
/// inverter-protocol composition: a `(gamma^2/2)`-invertible `(k, eps)`
/// extractor yields an `(n - k, eps + gamma, gamma)` scheme. Built-in maps
/// carry exact inverters, for which `gamma = 0` is the honest value.
pub fn make_code_scheme(map: SeededMap, gamma: f64) -> Result<WiretapScheme> {
    if map.inverter_radices().is_none() {
        return Err(Error::NoInverter);
    }
    if map.role() != Role::Extractor {
        return Err(Error::BadParams("scheme decoders must be extractors".into()));
    }
    if map.t_seeds() != 1 {
        return Err(Error::BadParams("seeded maps need the side-channel construction".into()));
    }
    let n = map.n_in();
    let log_q = (map.in_alphabet().size() as f64).log2();
    let k_sym = (map.k_bits() / log_q).round() as usize;
    if k_sym > n {
        return Err(Error::BadParams(format!("entropy requirement {k_sym} symbols exceeds n = {n}")));
    }
    let radices = map.inverter_radices().expect("checked").to_vec();
    let scheme = WiretapScheme {
        label: format!("code-scheme({})", map.label()),
        claimed_t: n - k_sym,
        claimed_eps: map.eps() + gamma,
        claimed_gamma: gamma,
        side_bits: 0,
        radices,
        fiber_uniform: gamma == 0.0,
        map,
        kind: SchemeKind::CodeMap,
    };
    scheme.check_decodability()?;
    Ok(scheme)
}

/// Scheme from a maximum-rank-distance generator extractor over
/// `GF(base_p^ext_m)`: claimed `(n - k, 0, 0)`, and additionally private
/// against adversaries observing `GF(base_p)`-linear combinations of the
/// block symbols (see [`ComposedScheme::audit_linear`]).
pub fn make_gabidulin_scheme(base_p: u64, ext_m: u32, n: usize, k: usize) -> Result<WiretapScheme> {
    let code = make_gabidulin(base_p, ext_m, n, k, None)?;
    let map = code_map(&code, CodeMapMode::GenExtractor)?;
    let radices = map.inverter_radices().expect("code maps carry inverters").to_vec();
    let scheme = WiretapScheme {
        label: format!("gabidulin-scheme(GF({base_p}^{ext_m}), n={n}, k={k})"),
        map,
        kind: SchemeKind::Gabidulin,
        claimed_t: n - k,
        claimed_eps: 0.0,
        claimed_gamma: 0.0,
        side_bits: 0,
        radices,
        fiber_uniform: true,
    };
    scheme.check_decodability()?;
    Ok(scheme)
}

/// Scheme for channels with arbitrary intermediate processing: the decoder
/// is a strong seeded extractor (the multiplicative hash family), the
/// encoder draws a nonzero seed, transmits it verbatim on a side channel,
/// and sends a uniform preimage of the message on the main channel. The
/// audit always exposes the entire side channel to the intruder.
///
/// The claimed tuple is `(t, eps_threshold, gamma)` with `gamma` measured
/// by an exhaustive audit at construction: the probability mass of
/// (observation, seed) pairs whose conditional message distribution is
/// farther than `eps_threshold` from uniform.
pub fn make_side_channel_scheme(n: u32, m: u32, t: usize, eps_threshold: f64) -> Result<WiretapScheme> {
    let map = crate::prand::lhl_map(n, m, Role::Extractor, 0.5)?;
    let inv_radices = map.inverter_radices().expect("hash maps carry inverters").to_vec();
    let mut radices = vec![map.t_seeds() - 1];
    radices.extend(inv_radices);
    let mut scheme = WiretapScheme {
        label: format!("side-channel(lhl n={n}, m={m})"),
        side_bits: n as usize,
        map,
        kind: SchemeKind::SideChannel,
        claimed_t: t,
        claimed_eps: eps_threshold,
        claimed_gamma: f64::NAN,
        radices,
        fiber_uniform: true,
    };
    scheme.check_decodability()?;
    let audit: WiretapAudit<f64> = audit_resilience(&scheme, t, AuditMode::Exhaustive, eps_threshold)?;
    scheme.claimed_gamma = audit.gamma_f64;
    Ok(scheme)
}

/// How an audit enumerates.
#[derive(Clone, Copy, Debug)]
pub enum AuditMode {
    /// Every position set, every message, every randomness tuple.
    Exhaustive,
    /// Randomly sampled position sets and encodings (for sizes beyond the
    /// exhaustive cap; distances become estimates).
    Sampled { subsets: usize, encodings: usize, seed: u64 },
}

/// Result of a resilience audit at observation size `t`.
#[derive(Clone, Debug)]
pub struct WiretapAudit<T> {
    pub t: usize,
    /// Bad-observation threshold the `gamma` mass was measured against.
    pub threshold: f64,
    /// Largest conditional distance over all (S, w).
    pub worst: T,
    pub worst_f64: f64,
    /// Largest over S of Pr[observation farther than threshold].
    pub gamma: T,
    pub gamma_f64: f64,
    /// Smallest over S of the Shannon equivocation H(X | Y|_S), in
    /// message-alphabet symbols.
    pub equivocation: f64,
    /// The generic lower bound m(1 - threshold - gamma).
    pub lower_bound: f64,
    /// Main-channel positions of the subset attaining the worst distance.
    pub worst_s: Vec<usize>,
    pub exhaustive: bool,
}

/// Flat table of the joint (block, message) distribution: one row per
/// equally likely outcome.
struct JointTable {
    block_len: usize,
    points: usize,
    /// Row-major block symbols, one byte each.
    digits: Vec<u8>,
    /// Decoded message index per row.
    msg: Vec<u32>,
}

fn build_joint(scheme: &WiretapScheme) -> Result<JointTable> {
    let cap = caps::current().enumerate;
    let alpha = scheme.alphabet().size();
    if alpha > 256 {
        return Err(Error::TooLarge { what: format!("alphabet {alpha} in audit table"), limit: 256 });
    }
    let msg_alpha = scheme.map.out_alphabet().size();
    let msg_count = (msg_alpha as u128).pow(scheme.msg_len() as u32);
    if msg_count > 1 << 20 {
        return Err(Error::TooLarge { what: format!("message space {msg_count}"), limit: 1 << 20 });
    }
    let block_len = scheme.block_len();
    let mut digits: Vec<u8>;
    let mut msg: Vec<u32>;
    let points: u128;
    if scheme.fiber_uniform {
        // The encoder induces the exactly uniform distribution on every
        // decoder fiber, so the joint distribution equals (uniform block,
        // decoded message) — enumerated over the block space (and over the
        // nonzero seeds for side-channel schemes).
        let main_space = (alpha as u128).pow(scheme.main_len() as u32);
        let seeds: Vec<u64> = match scheme.kind {
            SchemeKind::SideChannel => (1..scheme.map.t_seeds()).collect(),
            _ => vec![0],
        };
        points = main_space * seeds.len() as u128;
        if points > cap {
            return Err(Error::TooLarge { what: format!("joint table of {points} rows"), limit: cap });
        }
        digits = Vec::with_capacity(points as usize * block_len);
        msg = Vec::with_capacity(points as usize);
        for &z in &seeds {
            for y_idx in 0..main_space {
                let main = digits_of(y_idx, alpha, scheme.main_len());
                let x = scheme.map.eval(&main, z)?;
                digits.extend(main.iter().map(|&d| d as u8));
                digits.extend((0..scheme.side_bits).map(|i| ((z >> i) & 1) as u8));
                msg.push(index_of(&x, msg_alpha) as u32);
            }
        }
    } else {
        // General path: enumerate the encoder's full (message, randomness)
        // space.
        let r_total: u128 = scheme.radices.iter().map(|&r| r as u128).product();
        points = msg_count * r_total;
        if points > 1 << 20 {
            return Err(Error::TooLarge { what: format!("encoder space of {points} rows"), limit: 1 << 20 });
        }
        digits = Vec::with_capacity(points as usize * block_len);
        msg = Vec::with_capacity(points as usize);
        for x_idx in 0..msg_count {
            let x = digits_of(x_idx, msg_alpha, scheme.msg_len());
            for r_idx in 0..r_total {
                let block = scheme.encode(&x, &tuple_of(r_idx, &scheme.radices))?;
                digits.extend(block.iter().map(|&d| d as u8));
                msg.push(x_idx as u32);
            }
        }
    }
    Ok(JointTable { block_len, points: points as usize, digits, msg })
}

/// Statistics of one observation layout over a joint table.
struct SubsetStats<T> {
    worst: T,
    bad_points: u64,
    equivocation: f64,
}

/// Tabulate conditional message distributions for a fixed observation map
/// `observe: row -> obs_index` and measure distances to uniform.
fn subset_stats<T: Scalar>(
    table: &JointTable,
    msg_count: usize,
    obs_space: usize,
    observe: impl Fn(&[u8]) -> usize,
    threshold: f64,
    msg_alpha: f64,
) -> Result<SubsetStats<T>> {
    let mut counts = vec![0u64; obs_space * msg_count];
    for row in 0..table.points {
        let block = &table.digits[row * table.block_len..(row + 1) * table.block_len];
        let w = observe(block);
        counts[w * msg_count + table.msg[row] as usize] += 1;
    }
    let uniform = Dist::<T>::uniform(msg_count)?;
    let mut worst: Option<T> = None;
    let mut bad_points = 0u64;
    let mut equivocation = 0.0f64;
    for w in 0..obs_space {
        let slice = &counts[w * msg_count..(w + 1) * msg_count];
        let total: u64 = slice.iter().sum();
        if total == 0 {
            continue;
        }
        let dist: Dist<T> = Dist::from_counts(slice)?;
        let d = probdist::stat_distance(&dist, &uniform)?;
        if d.to_f64() > threshold + 1e-12 {
            bad_points += total;
        }
        let p_w = total as f64 / table.points as f64;
        let h: f64 = slice
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total as f64;
                -p * p.ln()
            })
            .sum::<f64>()
            / msg_alpha.ln();
        equivocation += p_w * h;
        worst = Some(match worst {
            None => d,
            Some(cur) => {
                if d > cur {
                    d
                } else {
                    cur
                }
            }
        });
    }
    Ok(SubsetStats { worst: worst.expect("nonempty table"), bad_points, equivocation })
}

/// Measure the scheme's true resilience at observation size `t`.
///
/// Exhaustive mode computes, for every size-`t` subset `S` of the
/// main-channel positions (side-channel symbols are always fully exposed in
/// addition), the exact conditional message distribution given each
/// observation, and reports the worst statistical distance, the worst
/// probability of observations exceeding `threshold`, and the minimum
/// equivocation. Sampled mode estimates the same quantities from random
/// subsets and encodings.
pub fn audit_resilience<T: Scalar + Send + Sync>(
    scheme: &WiretapScheme,
    t: usize,
    mode: AuditMode,
    threshold: f64,
) -> Result<WiretapAudit<T>> {
    let n_obs = scheme.main_len();
    if t > n_obs {
        return Err(Error::BadParams(format!("observation size {t} exceeds main block {n_obs}")));
    }
    let alpha = scheme.alphabet().size();
    let msg_alpha = scheme.map.out_alphabet().size();
    let msg_count = (msg_alpha as u128).pow(scheme.msg_len() as u32) as usize;
    match mode {
        AuditMode::Exhaustive => {
            let table = build_joint(scheme)?;
            let subsets: Vec<Vec<usize>> = (0..n_obs).combinations(t).collect();
            let side_positions: Vec<usize> = (n_obs..scheme.block_len()).collect();
            let obs_side: u128 = match scheme.kind {
                SchemeKind::SideChannel => scheme.map.t_seeds() as u128,
                _ => 1,
            };
            let obs_space = (alpha as u128).pow(t as u32) * obs_side;
            if obs_space * msg_count as u128 > caps::current().enumerate {
                return Err(Error::TooLarge {
                    what: format!("conditional table of {obs_space} x {msg_count}"),
                    limit: caps::current().enumerate,
                });
            }
            let per: Vec<SubsetStats<T>> = subsets
                .par_iter()
                .map(|s| {
                    let positions: Vec<usize> = s.iter().chain(&side_positions).copied().collect();
                    subset_stats(
                        &table,
                        msg_count,
                        obs_space as usize,
                        |block| {
                            positions
                                .iter()
                                .rev()
                                .fold(0usize, |acc, &p| acc * alpha as usize + block[p] as usize)
                        },
                        threshold,
                        msg_alpha as f64,
                    )
                })
                .collect::<Result<_>>()?;
            let mut worst = per[0].worst.clone();
            let mut worst_s = subsets[0].clone();
            let mut bad = per[0].bad_points;
            let mut equiv = per[0].equivocation;
            for (stats, s) in per.iter().zip(&subsets).skip(1) {
                if stats.worst > worst {
                    worst = stats.worst.clone();
                    worst_s = s.clone();
                }
                bad = bad.max(stats.bad_points);
                equiv = equiv.min(stats.equivocation);
            }
            let gamma = T::ratio(bad, table.points as u64);
            let gamma_f64 = gamma.to_f64();
            Ok(WiretapAudit {
                t,
                threshold,
                worst_f64: worst.to_f64(),
                worst,
                gamma,
                gamma_f64,
                equivocation: equiv,
                lower_bound: scheme.msg_len() as f64 * (1.0 - threshold - gamma_f64),
                worst_s,
                exhaustive: true,
            })
        }
        AuditMode::Sampled { subsets, encodings, seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut worst: Option<T> = None;
            let mut worst_s = Vec::new();
            let mut gamma_max = T::ratio(0, 1);
            let mut equiv_min = f64::INFINITY;
            for _ in 0..subsets {
                let mut s: Vec<usize> = (0..n_obs).collect();
                for i in 0..t {
                    let j = rng.gen_range(i..n_obs);
                    s.swap(i, j);
                }
                let mut s: Vec<usize> = s[..t].to_vec();
                s.sort_unstable();
                let positions: Vec<usize> = s.iter().copied().chain(n_obs..scheme.block_len()).collect();
                let mut counts: HashMap<u128, Vec<u64>> = HashMap::new();
                for _ in 0..encodings {
                    let x_idx = rng.gen_range(0..msg_count as u64);
                    let x = digits_of(x_idx as u128, msg_alpha, scheme.msg_len());
                    let digits: Vec<u64> = scheme.radices.iter().map(|&r| rng.gen_range(0..r)).collect();
                    let block = scheme.encode(&x, &digits)?;
                    let w = positions.iter().rev().fold(0u128, |acc, &p| acc * alpha as u128 + block[p] as u128);
                    counts.entry(w).or_insert_with(|| vec![0; msg_count])[x_idx as usize] += 1;
                }
                let uniform = Dist::<T>::uniform(msg_count)?;
                let mut bad = 0u64;
                let mut equiv = 0.0;
                for slice in counts.values() {
                    let total: u64 = slice.iter().sum();
                    let dist: Dist<T> = Dist::from_counts(slice)?;
                    let d = probdist::stat_distance(&dist, &uniform)?;
                    if d.to_f64() > threshold + 1e-12 {
                        bad += total;
                    }
                    let h: f64 = slice
                        .iter()
                        .filter(|&&c| c > 0)
                        .map(|&c| {
                            let p = c as f64 / total as f64;
                            -p * p.ln()
                        })
                        .sum::<f64>()
                        / (msg_alpha as f64).ln();
                    equiv += (total as f64 / encodings as f64) * h;
                    match &worst {
                        Some(cur) if d <= *cur => {}
                        _ => {
                            worst = Some(d);
                            worst_s = s.clone();
                        }
                    }
                }
                let gamma_s = T::ratio(bad, encodings as u64);
                if gamma_s > gamma_max {
                    gamma_max = gamma_s;
                }
                equiv_min = equiv_min.min(equiv);
            }
            let worst = worst.ok_or_else(|| Error::BadParams("no samples drawn".into()))?;
            let gamma_f64 = gamma_max.to_f64();
            Ok(WiretapAudit {
                t,
                threshold,
                worst_f64: worst.to_f64(),
                worst,
                gamma: gamma_max,
                gamma_f64,
                equivocation: equiv_min,
                lower_bound: scheme.msg_len() as f64 * (1.0 - threshold - gamma_f64),
                worst_s,
                exhaustive: false,
            })
        }
    }
}

/// Adversary model for a scheme composed with an inner error-correcting
/// code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adversary {
    /// Observes up to `t` coordinates of the inner codeword.
    SymbolSubset,
    /// Observes up to `t` base-subfield-linear combinations of the inner
    /// codeword symbols (each observation is a full block-alphabet symbol).
    /// Only meaningful for schemes whose extractor stays exact on
    /// subfield-restricted affine sources.
    SubfieldLinear,
}

/// A wiretap scheme wrapped in an inner linear code: the wiretap block is
/// encoded once more for error correction, privacy is audited against the
/// declared adversary, and decoding runs erasure correction before
/// extraction.
pub struct ComposedScheme {
    scheme: WiretapScheme,
    inner: LinearCode,
    adversary: Adversary,
    label: String,
}

/// Compose a scheme with an inner error-correcting code.
///
/// `SymbolSubset` requires the inner code to share the scheme's alphabet
/// and encode whole blocks (`inner.k = n`). `SubfieldLinear` is the
/// linear-transport model (e.g. coded networks): the inner code lives over
/// the base prime subfield and acts coordinate-wise on the block symbols
/// seen as packets; it is accepted only for maximum-rank-distance schemes,
/// whose extractor is exactly uniform on subfield-restricted affine
/// sources.
pub fn compose_ecc(scheme: &WiretapScheme, inner: &LinearCode, adversary: Adversary) -> Result<ComposedScheme> {
    let field = match scheme.alphabet() {
        Alphabet::Field(f) => f.clone(),
        Alphabet::Plain(_) => {
            return Err(Error::BadParams("composition requires a field-alphabet scheme".into()))
        }
    };
    if scheme.side_len() != 0 {
        return Err(Error::BadParams("side-channel schemes transmit on two channels and do not compose".into()));
    }
    match adversary {
        Adversary::SymbolSubset => {
            if inner.field() != &field {
                return Err(Error::AlphabetMismatch(format!(
                    "inner code over {}, scheme over {}",
                    inner.field().spec_string(),
                    field.spec_string()
                )));
            }
        }
        Adversary::SubfieldLinear => {
            if scheme.kind() != SchemeKind::Gabidulin {
                return Err(Error::AdversaryUnsupported);
            }
            if inner.field().q() != field.p() {
                return Err(Error::AlphabetMismatch(format!(
                    "inner code over {}, need the base subfield GF({})",
                    inner.field().spec_string(),
                    field.p()
                )));
            }
        }
    }
    if inner.k() != scheme.block_len() {
        return Err(Error::LengthMismatch { expected: scheme.block_len(), got: inner.k() });
    }
    Ok(ComposedScheme {
        label: format!("{} * {}", scheme.label(), inner.describe()),
        scheme: scheme.clone(),
        inner: inner.clone(),
        adversary,
    })
}

/// Result of auditing composed privacy against linear observation maps.
#[derive(Clone, Debug)]
pub struct LinearAudit<T> {
    pub maps_tested: usize,
    pub worst: T,
    pub worst_f64: f64,
    /// Largest over maps of Pr[observation farther than threshold].
    pub gamma_f64: f64,
    pub equivocation: f64,
}

/// How observation maps are chosen for [`ComposedScheme::audit_linear`].
#[derive(Clone, Copy, Debug)]
pub enum MapSample {
    /// All full-rank maps of the requested rank (enumerated; sizes guarded).
    Exhaustive,
    /// Randomly sampled full-rank maps.
    Random { trials: usize, seed: u64 },
}

impl ComposedScheme {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adversary(&self) -> Adversary {
        self.adversary
    }

    pub fn inner(&self) -> &LinearCode {
        &self.inner
    }

    pub fn scheme(&self) -> &WiretapScheme {
        &self.scheme
    }

    pub fn block_len(&self) -> usize {
        self.inner.n()
    }

    pub fn msg_len(&self) -> usize {
        self.scheme.msg_len()
    }

    /// Message symbols per transmitted symbol; equals the product of the
    /// scheme rate and the inner code rate.
    pub fn rate(&self) -> f64 {
        self.msg_len() as f64 / self.block_len() as f64
    }

    fn field(&self) -> &FieldCtx {
        match self.scheme.alphabet() {
            Alphabet::Field(f) => f,
            Alphabet::Plain(_) => unreachable!("composition is field-only"),
        }
    }

    /// Inner-encode a wiretap block.
    fn inner_encode(&self, block: &[u64]) -> Result<Vec<u64>> {
        match self.adversary {
            Adversary::SymbolSubset => self.inner.encode(block),
            Adversary::SubfieldLinear => {
                // The inner code acts coordinate-wise on packets: encode
                // each base-field coordinate slice separately.
                let f = self.field();
                let e = f.ext_degree() as usize;
                let mut out = vec![vec![0u64; e]; self.inner.n()];
                for c in 0..e {
                    let slice: Vec<u64> = block.iter().map(|&s| f.coeffs_of(s)[c]).collect();
                    for (j, &v) in self.inner.encode(&slice)?.iter().enumerate() {
                        out[j][c] = v;
                    }
                }
                Ok(out.into_iter().map(|coeffs| f.index_of(&coeffs).expect("canonical coeffs")).collect())
            }
        }
    }

    pub fn encode(&self, msg: &[u64], digits: &[u64]) -> Result<Vec<u64>> {
        let block = self.scheme.encode(msg, digits)?;
        self.inner_encode(&block)
    }

    pub fn encode_rng(&self, msg: &[u64], rng: &mut dyn RngCore) -> Result<Vec<u64>> {
        let radices = self.scheme.randomness_radices();
        let digits: Vec<u64> = radices.iter().map(|&r| rng.gen_range(0..r)).collect();
        self.encode(msg, &digits)
    }

    /// Decode a possibly erased channel word: inner erasure correction,
    /// then extraction.
    pub fn decode(&self, channel: &[Option<u64>]) -> Result<Vec<u64>> {
        if channel.len() != self.inner.n() {
            return Err(Error::LengthMismatch { expected: self.inner.n(), got: channel.len() });
        }
        let block = match self.adversary {
            Adversary::SymbolSubset => self.inner.erasure_decode(channel)?,
            Adversary::SubfieldLinear => {
                let f = self.field();
                let e = f.ext_degree() as usize;
                let mut coeffs = vec![vec![0u64; e]; self.scheme.block_len()];
                for c in 0..e {
                    let slice: Vec<Option<u64>> =
                        channel.iter().map(|p| p.map(|s| f.coeffs_of(s)[c])).collect();
                    for (i, &v) in self.inner.erasure_decode(&slice)?.iter().enumerate() {
                        coeffs[i][c] = v;
                    }
                }
                coeffs
                    .into_iter()
                    .map(|cs| self.field().index_of(&cs).expect("canonical coeffs"))
                    .collect()
            }
        };
        self.scheme.decode(&block)
    }

    /// Joint table over the composed codeword.
    fn build_joint(&self) -> Result<JointTable> {
        let base = build_joint(&self.scheme)?;
        let block_len = self.inner.n();
        let mut digits = Vec::with_capacity(base.points * block_len);
        for row in 0..base.points {
            let block: Vec<u64> = base.digits[row * base.block_len..(row + 1) * base.block_len]
                .iter()
                .map(|&d| d as u64)
                .collect();
            digits.extend(self.inner_encode(&block)?.iter().map(|&d| d as u8));
        }
        Ok(JointTable { block_len, points: base.points, digits, msg: base.msg })
    }

    /// Exhaustive conditional audit over subsets of inner-codeword
    /// coordinates (the composed analogue of [`audit_resilience`]).
    pub fn audit_subset<T: Scalar + Send + Sync>(&self, t: usize, threshold: f64) -> Result<WiretapAudit<T>> {
        let n_obs = self.inner.n();
        if t > n_obs {
            return Err(Error::BadParams(format!("observation size {t} exceeds block {n_obs}")));
        }
        let alpha = self.field().q();
        let msg_alpha = self.scheme.map.out_alphabet().size();
        let msg_count = (msg_alpha as u128).pow(self.msg_len() as u32) as usize;
        let table = self.build_joint()?;
        let subsets: Vec<Vec<usize>> = (0..n_obs).combinations(t).collect();
        let obs_space = (alpha as u128).pow(t as u32);
        if obs_space * msg_count as u128 > caps::current().enumerate {
            return Err(Error::TooLarge {
                what: format!("conditional table of {obs_space} x {msg_count}"),
                limit: caps::current().enumerate,
            });
        }
        let per: Vec<SubsetStats<T>> = subsets
            .par_iter()
            .map(|s| {
                subset_stats(
                    &table,
                    msg_count,
                    obs_space as usize,
                    |block| s.iter().rev().fold(0usize, |acc, &p| acc * alpha as usize + block[p] as usize),
                    threshold,
                    msg_alpha as f64,
                )
            })
            .collect::<Result<_>>()?;
        let mut worst = per[0].worst.clone();
        let mut worst_s = subsets[0].clone();
        let mut bad = per[0].bad_points;
        let mut equiv = per[0].equivocation;
        for (stats, s) in per.iter().zip(&subsets).skip(1) {
            if stats.worst > worst {
                worst = stats.worst.clone();
                worst_s = s.clone();
            }
            bad = bad.max(stats.bad_points);
            equiv = equiv.min(stats.equivocation);
        }
        let gamma = T::ratio(bad, table.points as u64);
        let gamma_f64 = gamma.to_f64();
        Ok(WiretapAudit {
            t,
            threshold,
            worst_f64: worst.to_f64(),
            worst,
            gamma,
            gamma_f64,
            equivocation: equiv,
            lower_bound: self.msg_len() as f64 * (1.0 - threshold - gamma_f64),
            worst_s,
            exhaustive: true,
        })
    }

    /// Audit privacy against rank-`t` base-subfield-linear observation
    /// maps applied to the composed codeword (each observation output is a
    /// full block-alphabet symbol). Only the subfield-linear adversary
    /// supports this.
    pub fn audit_linear<T: Scalar + Send + Sync>(
        &self,
        t: usize,
        maps: MapSample,
        threshold: f64,
    ) -> Result<LinearAudit<T>> {
        if self.adversary != Adversary::SubfieldLinear {
            return Err(Error::AdversaryUnsupported);
        }
        let f = self.field();
        let p = f.p();
        let n_cw = self.inner.n();
        if t > n_cw {
            return Err(Error::BadParams(format!("rank {t} exceeds codeword length {n_cw}")));
        }
        let base = self.inner.field().clone();
        let mats: Vec<QMatrix> = match maps {
            MapSample::Exhaustive => {
                let total = (p as u128).checked_pow((t * n_cw) as u32).ok_or(Error::TooLarge {
                    what: "observation map space".into(),
                    limit: caps::current().enumerate,
                })?;
                if total > 1 << 20 {
                    return Err(Error::TooLarge { what: format!("{total} observation maps"), limit: 1 << 20 });
                }
                (0..total)
                    .filter_map(|idx| {
                        let entries = digits_of(idx, p, t * n_cw);
                        let m = QMatrix::from_fn(base.clone(), t, n_cw, |i, j| entries[i * n_cw + j]);
                        (m.rank() == t).then_some(m)
                    })
                    .collect()
            }
            MapSample::Random { trials, seed } => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                (0..trials)
                    .map(|_| loop {
                        let m = QMatrix::from_fn(base.clone(), t, n_cw, |_, _| rng.gen_range(0..p));
                        if m.rank() == t {
                            break m;
                        }
                    })
                    .collect()
            }
        };
        let msg_alpha = self.scheme.map.out_alphabet().size();
        let msg_count = (msg_alpha as u128).pow(self.msg_len() as u32) as usize;
        let q = f.q();
        let obs_space = (q as u128).pow(t as u32);
        if obs_space * msg_count as u128 > caps::current().enumerate {
            return Err(Error::TooLarge {
                what: format!("conditional table of {obs_space} x {msg_count}"),
                limit: caps::current().enumerate,
            });
        }
        let table = self.build_joint()?;
        let per: Vec<SubsetStats<T>> = mats
            .par_iter()
            .map(|m| {
                subset_stats(
                    &table,
                    msg_count,
                    obs_space as usize,
                    |block| {
                        // Observation j is a base-subfield combination of
                        // the packet symbols.
                        (0..t)
                            .rev()
                            .fold(0usize, |acc, j| {
                                let mut sym = 0u64;
                                for (i, &b) in block.iter().enumerate() {
                                    let c = m.get(j, i);
                                    if c != 0 {
                                        sym = f.add(sym, f.mul(c, b as u64));
                                    }
                                }
                                acc * q as usize + sym as usize
                            })
                    },
                    threshold,
                    msg_alpha as f64,
                )
            })
            .collect::<Result<_>>()?;
        let mut worst = per[0].worst.clone();
        let mut bad = per[0].bad_points;
        let mut equiv = per[0].equivocation;
        for stats in per.iter().skip(1) {
            if stats.worst > worst {
                worst = stats.worst.clone();
            }
            bad = bad.max(stats.bad_points);
            equiv = equiv.min(stats.equivocation);
        }
        Ok(LinearAudit {
            maps_tested: mats.len(),
            worst_f64: worst.to_f64(),
            worst,
            gamma_f64: bad as f64 / table.points as f64,
            equivocation: equiv,
        })
    }

    /// Monte-Carlo erasure-channel simulation: each transmitted symbol is
    /// erased independently with probability `p_erase`; a trial succeeds
    /// when the full decode returns the original message. Returns the
    /// success fraction.
    pub fn simulate_bec(&self, p_erase: f64, trials: usize, seed: u64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p_erase) {
            return Err(Error::BadRange(format!("erasure probability {p_erase} outside [0, 1]")));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let msg_alpha = self.scheme.map.out_alphabet().size();
        let mut ok = 0usize;
        for _ in 0..trials {
            let msg: Vec<u64> = (0..self.msg_len()).map(|_| rng.gen_range(0..msg_alpha)).collect();
            let cw = self.encode_rng(&msg, &mut rng)?;
            let channel: Vec<Option<u64>> = cw
                .iter()
                .map(|&s| if rng.gen_range(0.0..1.0) < p_erase { None } else { Some(s) })
                .collect();
            if let Ok(decoded) = self.decode(&channel) {
                if decoded == msg {
                    ok += 1;
                }
            }
        }
        Ok(ok as f64 / trials as f64)
    }
}
