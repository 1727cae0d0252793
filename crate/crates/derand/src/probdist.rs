//! Exact finite probability distributions and the entropy/distance calculus
//! the audits rely on.
//!
//! A [`Dist<T>`] is a mass vector over the domain `0..N`. The scalar type is
//! either [`num::BigRational`] (exact arithmetic, used by the exhaustive
//! audits) or `f64` (used by Monte-Carlo experiments); the [`Scalar`] trait
//! abstracts the two, and [`Backend`] names them at runtime boundaries such
//! as the CLI. Distributions are immutable and all operations here are pure,
//! so everything is parallel-safe.

use num::{BigInt, BigRational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Names the numeric backend a result was computed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Rational,
    Double,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Double => "double",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "rational" => Ok(Backend::Rational),
            "double" => Ok(Backend::Double),
            other => Err(Error::Parse(format!("unknown backend `{other}` (expected rational|double)"))),
        }
    }
}

/// Scalar arithmetic shared by the two backends. `Signed` brings the ring
/// operations plus `abs`; the extra methods cover construction from exact
/// ratios and the backend-specific tolerance policy.
pub trait Scalar: Clone + PartialOrd + Signed + std::fmt::Debug {
    /// The exact ratio `num/den`.
    fn ratio(num: u64, den: u64) -> Self;
    /// `2^(-bits)`.
    fn half_pow(bits: u32) -> Self;
    fn from_u64(n: u64) -> Self {
        Self::ratio(n, 1)
    }
    fn to_f64(&self) -> f64;
    /// Whether a mass total counts as 1 (exact, or within 1e-12 for doubles).
    fn sum_is_one(sum: &Self) -> bool;
    /// Whether `x >= 1`, with a small tolerance in double mode.
    fn ge_one(x: &Self) -> bool;
    /// Turn a bit bound into the cap `2^(-bits)`. The rational backend only
    /// accepts integer bit counts; non-dyadic caps go through
    /// [`dist_to_cap`] directly.
    fn cap_from_bits(bits: f64) -> Result<Self>;
    fn backend() -> Backend;
}

impl Scalar for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn half_pow(bits: u32) -> Self {
        BigRational::new(BigInt::one(), num::pow(BigInt::from(2), bits as usize))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sum_is_one(sum: &Self) -> bool {
        sum.is_one()
    }
    fn ge_one(x: &Self) -> bool {
        !(x.clone() - BigRational::one()).is_negative()
    }
    fn cap_from_bits(bits: f64) -> Result<Self> {
        if bits < 0.0 || bits.fract() != 0.0 || bits > 127.0 {
            return Err(Error::BadRange(format!(
                "rational backend needs an integer bit bound in 0..=127, got {bits}; use dist_to_cap for exact non-dyadic caps"
            )));
        }
        Ok(Self::half_pow(bits as u32))
    }
    fn backend() -> Backend {
        Backend::Rational
    }
}

impl Scalar for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn half_pow(bits: u32) -> Self {
        0.5f64.powi(bits as i32)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sum_is_one(sum: &Self) -> bool {
        (sum - 1.0).abs() <= 1e-12
    }
    fn ge_one(x: &Self) -> bool {
        *x >= 1.0 - 1e-9
    }
    fn cap_from_bits(bits: f64) -> Result<Self> {
        if !bits.is_finite() {
            return Err(Error::BadRange(format!("bit bound must be finite, got {bits}")));
        }
        Ok(2f64.powf(-bits))
    }
    fn backend() -> Backend {
        Backend::Double
    }
}

/// A probability distribution over the domain `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist<T> {
    mass: Vec<T>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> Dist<T> {
    /// Build from a mass vector; masses must be non-negative and sum to 1
    /// (exactly in rational mode, within 1e-12 in double mode).
    pub fn new(mass: Vec<T>) -> Result<Dist<T>> {
        if mass.is_empty() {
            return Err(Error::BadRange("distribution needs a non-empty domain".into()));
        }
        if mass.iter().any(|m| m.is_negative()) {
            return Err(Error::BadRange("masses must be non-negative".into()));
        }
        let sum = mass.iter().fold(T::zero(), |acc, m| acc + m.clone());
        if !T::sum_is_one(&sum) {
            return Err(Error::BadRange(format!("masses must sum to 1, got {:?}", sum)));
        }
        Ok(Dist { mass, labels: None })
    }

    /// Uniform over `0..n`.
    pub fn uniform(n: usize) -> Result<Dist<T>> {
        if n == 0 {
            return Err(Error::BadRange("uniform needs a non-empty domain".into()));
        }
        Dist::new(vec![T::ratio(1, n as u64); n])
    }

    /// Point mass at `at` over `0..n`.
    pub fn point(n: usize, at: usize) -> Result<Dist<T>> {
        if at >= n {
            return Err(Error::BadRange(format!("point {at} outside domain 0..{n}")));
        }
        let mut mass = vec![T::zero(); n];
        mass[at] = T::one();
        Dist::new(mass)
    }

    /// Flat distribution: uniform on `support`, zero elsewhere.
    pub fn flat(n: usize, support: &[usize]) -> Result<Dist<T>> {
        if support.is_empty() {
            return Err(Error::BadRange("flat distribution needs non-empty support".into()));
        }
        let mut mass = vec![T::zero(); n];
        let share = T::ratio(1, support.len() as u64);
        for &i in support {
            if i >= n {
                return Err(Error::BadRange(format!("support point {i} outside domain 0..{n}")));
            }
            if !mass[i].is_zero() {
                return Err(Error::BadRange(format!("support point {i} repeated")));
            }
            mass[i] = share.clone();
        }
        Dist::new(mass)
    }

    /// Empirical distribution `counts / sum(counts)` — the workhorse for
    /// exact counting audits.
    pub fn from_counts(counts: &[u64]) -> Result<Dist<T>> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::BadRange("counts must not all be zero".into()));
        }
        Dist::new(counts.iter().map(|&c| T::ratio(c, total)).collect())
    }

    /// Domain size `N`.
    pub fn n(&self) -> usize {
        self.mass.len()
    }

    /// The mass vector.
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// Indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.mass[i].is_zero()).collect()
    }

    /// The largest single mass.
    pub fn max_mass(&self) -> T {
        let mut best = self.mass[0].clone();
        for m in &self.mass[1..] {
            if *m > best {
                best = m.clone();
            }
        }
        best
    }

    /// Attach display labels for the domain points.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Dist<T>> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Image distribution under `f: 0..N -> 0..n_out`.
    pub fn push_forward(&self, n_out: usize, f: impl Fn(usize) -> usize) -> Result<Dist<T>> {
        let mut out = vec![T::zero(); n_out];
        for (i, m) in self.mass.iter().enumerate() {
            let j = f(i);
            if j >= n_out {
                return Err(Error::BadRange(format!("map sends {i} to {j}, outside 0..{n_out}")));
            }
            out[j] = out[j].clone() + m.clone();
        }
        Dist::new(out)
    }

    /// Convex combination `sum_j w_j * d_j`; weights must be non-negative and
    /// sum to 1, and all parts must share a domain size.
    pub fn mix(parts: &[(T, &Dist<T>)]) -> Result<Dist<T>> {
        let Some(((_, first), _)) = parts.split_first() else {
            return Err(Error::BadRange("mix needs at least one part".into()));
        };
        let n = first.n();
        let wsum = parts.iter().fold(T::zero(), |acc, (w, _)| acc + w.clone());
        if parts.iter().any(|(w, _)| w.is_negative()) || !T::sum_is_one(&wsum) {
            return Err(Error::BadRange("mix weights must be non-negative and sum to 1".into()));
        }
        let mut mass = vec![T::zero(); n];
        for (w, d) in parts {
            if d.n() != n {
                return Err(Error::DomainMismatch(n, d.n()));
            }
            for (slot, m) in mass.iter_mut().zip(d.mass.iter()) {
                *slot = slot.clone() + w.clone() * m.clone();
            }
        }
        Dist::new(mass)
    }
}

impl Dist<BigRational> {
    /// Lossy conversion to the double backend.
    pub fn to_double(&self) -> Dist<f64> {
        Dist { mass: self.mass.iter().map(Scalar::to_f64).collect(), labels: self.labels.clone() }
    }

    /// JSON form: array of `"num/den"` strings.
    pub fn to_json(&self) -> Value {
        Value::Array(self.mass.iter().map(|m| Value::String(format!("{}/{}", m.numer(), m.denom()))).collect())
    }

    /// Parse the `"num/den"` array form (bare integers allowed).
    pub fn from_json(v: &Value) -> Result<Dist<BigRational>> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("expected a JSON array of \"num/den\" strings".into()))?;
        let mut mass = Vec::with_capacity(arr.len());
        for item in arr {
            let s = item.as_str().ok_or_else(|| Error::Parse(format!("expected string mass, got {item}")))?;
            let (num, den) = match s.split_once('/') {
                Some((n, d)) => (n, d),
                None => (s, "1"),
            };
            let num: BigInt = num.trim().parse().map_err(|e| Error::Parse(format!("bad numerator `{num}`: {e}")))?;
            let den: BigInt = den.trim().parse().map_err(|e| Error::Parse(format!("bad denominator `{den}`: {e}")))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            mass.push(BigRational::new(num, den));
        }
        Dist::new(mass)
    }
}

impl Dist<f64> {
    /// JSON form: array of floats.
    pub fn to_json(&self) -> Value {
        Value::Array(self.mass.iter().map(|&m| serde_json::json!(m)).collect())
    }

    /// Parse the float-array form.
    pub fn from_json(v: &Value) -> Result<Dist<f64>> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("expected a JSON array of numbers".into()))?;
        let mass = arr
            .iter()
            .map(|item| item.as_f64().ok_or_else(|| Error::Parse(format!("expected numeric mass, got {item}"))))
            .collect::<Result<Vec<f64>>>()?;
        Dist::new(mass)
    }
}

/// Statistical distance: half the L1 distance, equivalently the largest gap
/// `|Pr_a[T] - Pr_b[T]|` over events `T`.
pub fn stat_distance<T: Scalar>(a: &Dist<T>, b: &Dist<T>) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::DomainMismatch(a.n(), b.n()));
    }
    let l1 = a
        .mass
        .iter()
        .zip(b.mass.iter())
        .fold(T::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs());
    Ok(l1 * T::ratio(1, 2))
}

/// Min-entropy in bits: `-log2` of the largest mass. Returned as a double in
/// both backends, since the logarithm leaves exact arithmetic anyway.
pub fn min_entropy<T: Scalar>(a: &Dist<T>) -> f64 {
    -a.max_mass().to_f64().log2()
}

/// Exact statistical distance from `a` to the nearest distribution whose
/// every mass is at most `cap` (which requires `cap * N >= 1`). The value is
/// the "clip excess" `sum_x max(a(x) - cap, 0)`.
///
/// Why this closed form is the true minimum:
///
/// - **Lower bound.** Let `T = {x : a(x) > cap}` and let `b` be any capped
///   distribution. Then `SD(a, b) >= a(T) - b(T) >= sum_{x in T} (a(x) - cap)`,
///   which is exactly the clip excess `E`.
/// - **Achievability.** Clip every over-cap mass down to `cap`, freeing total
///   mass `E`, and pour it onto under-cap points. The available headroom is
///   `sum_x max(cap - a(x), 0) = E + (N * cap - 1) >= E`, so the pour
///   completes without breaching the cap; the result is a capped distribution
///   at distance exactly `E` from `a`.
pub fn dist_to_cap<T: Scalar>(a: &Dist<T>, cap: &T) -> Result<T> {
    let headroom = cap.clone() * T::from_u64(a.n() as u64);
    if !T::ge_one(&headroom) {
        return Err(Error::Infeasible(format!(
            "no capped distribution exists: cap * N = {:?} < 1",
            headroom
        )));
    }
    Ok(a.mass.iter().fold(T::zero(), |acc, m| {
        let excess = m.clone() - cap.clone();
        if excess.is_negative() {
            acc
        } else {
            acc + excess
        }
    }))
}

/// Exact statistical distance from `a` to the nearest distribution with
/// min-entropy at least `bits`; the cap is `2^(-bits)`. The rational backend
/// accepts integer `bits` only — call [`dist_to_cap`] with an exact cap for
/// non-dyadic bounds such as `log2 6`.
pub fn dist_to_minentropy<T: Scalar>(a: &Dist<T>, bits: f64) -> Result<T> {
    dist_to_cap(a, &T::cap_from_bits(bits)?)
}

/// The `q`-ary entropy function
/// `h_q(x) = x log_q(q-1) - x log_q(x) - (1-x) log_q(1-x)`,
/// with the limit convention `0 * log 0 = 0`.
pub fn hq(q: u64, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::BadRange(format!("entropy alphabet must have q >= 2, got {q}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::BadRange(format!("entropy argument must lie in [0,1], got {x}")));
    }
    let lnq = (q as f64).ln();
    let term = |t: f64| if t == 0.0 { 0.0 } else { t * t.ln() / lnq };
    Ok(x * ((q - 1) as f64).ln() / lnq - term(x) - term(1.0 - x))
}
