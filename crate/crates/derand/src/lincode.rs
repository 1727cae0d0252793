//! Linear codes over finite fields: matrices with exact linear algebra,
//! constructors (Reed-Solomon, Hadamard, random, Gabidulin, concatenation),
//! exhaustive minimum distance, and erasure decoding by elimination.
//!
//! [`QMatrix`] is a dense matrix over a [`FieldCtx`] with row reduction,
//! rank, null spaces, and linear solving — the workhorse for every
//! construction and audit in the crate. [`LinearCode`] couples a full-rank
//! generator with a matching parity-check matrix and caches its minimum
//! distance write-once.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::caps;
use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// Dense matrix over a finite field, row-major, entries stored as canonical
/// element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    field: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solve {
    /// Exactly one solution.
    Unique(Vec<u64>),
    /// An affine family: `particular + span(null_basis rows)`.
    Many { rank: usize, particular: Vec<u64>, null_basis: QMatrix },
    /// No solution.
    None,
}

impl QMatrix {
    /// All-zero matrix.
    pub fn zero(field: FieldCtx, rows: usize, cols: usize) -> QMatrix {
        QMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(field: FieldCtx, n: usize) -> QMatrix {
        let mut m = QMatrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from explicit rows; validates rectangularity and entry ranges.
    pub fn from_rows(field: FieldCtx, rows: Vec<Vec<u64>>) -> Result<QMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::LengthMismatch { expected: c, got: row.len() });
            }
            for &v in row {
                field.check(v)?;
                data.push(v);
            }
        }
        Ok(QMatrix { field, rows: r, cols: c, data })
    }

    /// Build entry-wise from a function (entries must already be canonical).
    pub fn from_fn(field: FieldCtx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> QMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                debug_assert!(v < field.q());
                data.push(v);
            }
        }
        QMatrix { field, rows, cols, data }
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(i < self.rows && j < self.cols && v < self.field.q());
        self.data[i * self.cols + j] = v;
    }

    /// Borrow row `i` as a slice.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.field.clone(), self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.field != rhs.field {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", self.field.spec_string(), rhs.field.spec_string())));
        }
        if self.cols != rhs.rows {
            return Err(Error::SizeMismatch(format!("{}x{} * {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let f = &self.field;
        let mut out = QMatrix::zero(f.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = f.mul(a, rhs.get(l, j));
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, add));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self` (`v` has `rows` entries).
    pub fn left_mul_vec(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.rows);
        let f = &self.field;
        let mut out = vec![0u64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let row = self.row(i);
            for (slot, &g) in out.iter_mut().zip(row) {
                *slot = f.add(*slot, f.mul(vi, g));
            }
        }
        out
    }

    /// Matrix times column vector: `self * v` (`v` has `cols` entries).
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect()
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.field != other.field {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", self.field.spec_string(), other.field.spec_string())));
        }
        if self.cols != other.cols {
            return Err(Error::ColumnMismatch(self.cols, other.cols));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(QMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> QMatrix {
        QMatrix::from_fn(self.field.clone(), self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Reduced row echelon form and the pivot column list.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pivot_row) = (r..m.rows).find(|&i| m.get(i, col) != 0) else { continue };
            // swap rows pivot_row <-> r
            if pivot_row != r {
                for j in 0..m.cols {
                    let a = m.get(r, j);
                    let b = m.get(pivot_row, j);
                    m.set(r, j, b);
                    m.set(pivot_row, j, a);
                }
            }
            let inv = f.inv(m.get(r, col)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    /// Matrix rank.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis (as rows) of the right null space `{x : self * x = 0}`.
    pub fn nullspace(&self) -> QMatrix {
        let (rref, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = self.field.clone();
        let mut basis = QMatrix::zero(f.clone(), free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, 1);
            for (pi, &pc) in pivots.iter().enumerate() {
                basis.set(bi, pc, f.neg(rref.get(pi, fc)));
            }
        }
        basis
    }

    /// Solve `self * x = rhs` exactly.
    pub fn solve(&self, rhs: &[u64]) -> Result<Solve> {
        if rhs.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, got: rhs.len() });
        }
        // Augment with rhs as an extra column and reduce.
        let f = self.field.clone();
        let mut aug = QMatrix::zero(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i]);
        }
        let (rref, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(Solve::None);
        }
        let rank = pivots.len();
        let mut particular = vec![0u64; self.cols];
        for (pi, &pc) in pivots.iter().enumerate() {
            particular[pc] = rref.get(pi, self.cols);
        }
        if rank == self.cols {
            Ok(Solve::Unique(particular))
        } else {
            Ok(Solve::Many { rank, particular, null_basis: self.nullspace() })
        }
    }

    /// Whether the two matrices have the same row space.
    pub fn same_row_space(&self, other: &QMatrix) -> Result<bool> {
        if self.field != other.field {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", self.field.spec_string(), other.field.spec_string())));
        }
        if self.cols != other.cols {
            return Err(Error::ColumnMismatch(self.cols, other.cols));
        }
        let ra = self.rank();
        let rb = other.rank();
        Ok(ra == rb && self.vstack(other)?.rank() == ra)
    }

    /// Serialize to the `qmatrix v1` text format: a header line
    /// `qmatrix v1 q=<q> rows=<r> cols=<c>`, then one line per row — each
    /// symbol a base-36 digit for `q <= 36`, comma-separated integers
    /// otherwise.
    pub fn to_text(&self) -> String {
        let q = self.field.q();
        let mut out = format!("qmatrix v1 q={} rows={} cols={}\n", q, self.rows, self.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            if q <= 36 {
                for &v in row {
                    out.push(char::from_digit(v as u32, 36).expect("entry < q <= 36"));
                }
            } else {
                out.push_str(&row.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the `qmatrix v1` format. The header only carries `q`, so the
    /// element encoding is fixed by `field` when given (its size must match)
    /// and otherwise defaults to the canonical field of size `q` (prime
    /// factorization plus the lexicographically smallest modulus).
    pub fn from_text(s: &str, field: Option<&FieldCtx>) -> Result<QMatrix> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty qmatrix input".into()))?;
        let mut q = None;
        let mut rows = None;
        let mut cols = None;
        let mut words = header.split_whitespace();
        if words.next() != Some("qmatrix") || words.next() != Some("v1") {
            return Err(Error::Parse("expected `qmatrix v1` header".into()));
        }
        for word in words {
            let Some((key, value)) = word.split_once('=') else {
                return Err(Error::Parse(format!("bad header field `{word}`")));
            };
            let n: u64 = value.parse().map_err(|e| Error::Parse(format!("bad header value `{value}`: {e}")))?;
            match key {
                "q" => q = Some(n),
                "rows" => rows = Some(n as usize),
                "cols" => cols = Some(n as usize),
                other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
            }
        }
        let (Some(q), Some(rows), Some(cols)) = (q, rows, cols) else {
            return Err(Error::Parse("header must set q, rows, cols".into()));
        };
        let field = match field {
            Some(f) => {
                if f.q() != q {
                    return Err(Error::AlphabetMismatch(format!("file has q={q}, field is {}", f.spec_string())));
                }
                f.clone()
            }
            None => canonical_field_of_size(q)?,
        };
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {i}")))?;
            let entries: Vec<u64> = if q <= 36 {
                line.trim()
                    .chars()
                    .map(|c| {
                        c.to_ascii_lowercase()
                            .to_digit(36)
                            .map(u64::from)
                            .ok_or_else(|| Error::Parse(format!("bad symbol `{c}` in row {i}")))
                    })
                    .collect::<Result<_>>()?
            } else {
                line.trim()
                    .split(',')
                    .map(|w| w.trim().parse::<u64>().map_err(|e| Error::Parse(format!("bad entry `{w}` in row {i}: {e}"))))
                    .collect::<Result<_>>()?
            };
            if entries.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, got: entries.len() });
            }
            for &v in &entries {
                field.check(v)?;
            }
            data.extend(entries);
        }
        Ok(QMatrix { field, rows, cols, data })
    }
}

/// The canonical field of a prime-power size `q`: smallest prime factor as
/// characteristic, lexicographically smallest modulus.
pub fn canonical_field_of_size(q: u64) -> Result<FieldCtx> {
    if q < 2 {
        return Err(Error::BadParams(format!("field size must be at least 2, got {q}")));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a prime factor");
    let mut m = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::BadParams(format!("{q} is not a prime power")));
    }
    crate::field::make_field(p, m, None)
}

/// Number of nonzero entries.
pub fn hamming_weight(word: &[u64]) -> usize {
    word.iter().filter(|&&v| v != 0).count()
}

/// Rank of the word's matrix form over the prime subfield: each symbol
/// expands to its coefficient column, giving an `m x len` matrix over
/// `GF(p)`.
pub fn rank_weight(field: &FieldCtx, word: &[u64]) -> usize {
    let prime = field.prime_subfield();
    let m = field.ext_degree() as usize;
    let mat = QMatrix::from_fn(prime, m, word.len(), |i, j| field.coeffs_of(word[j])[i]);
    mat.rank()
}

/// What a code is, plus construction metadata the audits need.
#[derive(Clone, Debug, PartialEq)]
pub enum CodeKind {
    /// Reed-Solomon on the recorded evaluation points.
    Rs { points: Vec<u64> },
    /// Hadamard code: all linear forms on `GF(2)^n`.
    Hadamard,
    /// Random generator matrix (resampled to full rank).
    Random,
    /// Gabidulin code over `GF(p^m)`, evaluation points recorded.
    Gabidulin { base_p: u64, points: Vec<u64> },
    /// Concatenation; records both constituents and the basis of the outer
    /// field over the inner one used for symbol expansion.
    Concatenated { outer: String, inner: String, basis: Vec<u64> },
    /// Anything supplied directly as a matrix.
    Raw,
}

impl CodeKind {
    fn tag(&self) -> &'static str {
        match self {
            CodeKind::Rs { .. } => "rs",
            CodeKind::Hadamard => "hadamard",
            CodeKind::Random => "random",
            CodeKind::Gabidulin { .. } => "gabidulin",
            CodeKind::Concatenated { .. } => "concatenated",
            CodeKind::Raw => "raw",
        }
    }
}

/// A linear `[n, k]` code over a finite field. The generator has full row
/// rank `k`, the parity-check matrix full row rank `n - k`, and
/// `generator * parity^T = 0`. Codes are immutable; the minimum distance is
/// cached write-once when first computed.
#[derive(Clone, Debug)]
pub struct LinearCode {
    field: FieldCtx,
    n: usize,
    k: usize,
    generator: QMatrix,
    parity: QMatrix,
    kind: CodeKind,
    min_distance: OnceLock<usize>,
}

impl LinearCode {
    /// Assemble from a full-rank generator; the parity-check matrix is the
    /// generator's null space.
    fn assemble(generator: QMatrix, kind: CodeKind) -> Result<LinearCode> {
        let k = generator.rows();
        let n = generator.cols();
        let rank = generator.rank();
        if rank < k {
            return Err(Error::RankDeficient { rank, need: k });
        }
        let parity = generator.nullspace();
        debug_assert_eq!(parity.rows(), n - k);
        Ok(LinearCode { field: generator.field().clone(), n, k, generator, parity, kind, min_distance: OnceLock::new() })
    }

    /// Build from an explicit generator matrix; errors if the rows are
    /// dependent (callers that want repair must reduce first).
    pub fn from_generator(generator: QMatrix) -> Result<LinearCode> {
        LinearCode::assemble(generator, CodeKind::Raw)
    }

    /// Build from a parity-check matrix. Dependent check rows are legitimate
    /// for machine-generated ensembles, so the matrix is row-reduced and the
    /// dimension is `n - rank` rather than `n - rows`.
    pub fn from_parity(parity: QMatrix) -> Result<LinearCode> {
        let n = parity.cols();
        let (rref, pivots) = parity.rref();
        let rank = pivots.len();
        let reduced = QMatrix::from_fn(parity.field().clone(), rank, n, |i, j| rref.get(i, j));
        let generator = reduced.nullspace();
        debug_assert_eq!(generator.rows(), n - rank);
        Ok(LinearCode {
            field: parity.field().clone(),
            n,
            k: n - rank,
            generator,
            parity: reduced,
            kind: CodeKind::Raw,
            min_distance: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &QMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &QMatrix {
        &self.parity
    }

    pub fn kind(&self) -> &CodeKind {
        &self.kind
    }

    /// Cached minimum distance, if already known.
    pub fn cached_distance(&self) -> Option<usize> {
        self.min_distance.get().copied()
    }

    /// One-line description for reports, e.g. `rs[7,3,d=5] over GF(7)`.
    pub fn describe(&self) -> String {
        match self.cached_distance() {
            Some(d) => format!("{}[{},{},d={}] over {}", self.kind.tag(), self.n, self.k, d, self.field.spec_string()),
            None => format!("{}[{},{}] over {}", self.kind.tag(), self.n, self.k, self.field.spec_string()),
        }
    }

    /// `msg * G`.
    pub fn encode(&self, msg: &[u64]) -> Result<Vec<u64>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: msg.len() });
        }
        for &v in msg {
            self.field.check(v)?;
        }
        Ok(self.generator.left_mul_vec(msg))
    }

    /// The message with index `idx` in `0..q^k`, as base-`q` digits.
    pub fn message_from_index(&self, idx: u64) -> Vec<u64> {
        let q = self.field.q();
        let mut msg = vec![0u64; self.k];
        let mut rest = idx;
        for slot in msg.iter_mut() {
            *slot = rest % q;
            rest /= q;
        }
        msg
    }

    /// Exact minimum nonzero codeword weight by enumeration of all `q^k - 1`
    /// candidates. The result is cached write-once; a cached value is
    /// returned without re-enumeration.
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.min_distance.get() {
            return Ok(d);
        }
        if self.k == 0 {
            return Err(Error::BadParams("zero-dimensional code has no nonzero codewords".into()));
        }
        let q = self.field.q() as u128;
        let total = q
            .checked_pow(self.k as u32)
            .ok_or_else(|| Error::TooLarge { what: "codeword count q^k".into(), limit: caps::current().enumerate })?;
        let work = total.saturating_mul(self.n as u128);
        let cap = caps::current().enumerate;
        if work > cap {
            return Err(Error::TooLarge { what: format!("codeword enumeration q^k * n = {work}"), limit: cap });
        }
        let count = total as u64;
        let weight_of = |idx: u64| -> usize {
            let msg = self.message_from_index(idx);
            hamming_weight(&self.generator.left_mul_vec(&msg))
        };
        let d = if count > 4096 {
            (1..count).into_par_iter().map(weight_of).min().expect("at least one nonzero codeword")
        } else {
            (1..count).map(weight_of).min().expect("at least one nonzero codeword")
        };
        let _ = self.min_distance.set(d);
        Ok(d)
    }

    /// Record an externally known minimum distance (used by constructors
    /// whose distance is a theorem). Write-once: conflicting values panic.
    fn set_distance(&self, d: usize) {
        if let Err(existing) = self.min_distance.set(d) {
            assert_eq!(existing, d, "conflicting cached distances");
        }
    }

    /// Decode from erasures: `None` marks an erased position. Returns the
    /// unique message consistent with the unerased positions.
    pub fn erasure_decode(&self, word: &[Option<u64>]) -> Result<Vec<u64>> {
        if word.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: word.len() });
        }
        let mut idx = Vec::new();
        let mut vals = Vec::new();
        for (i, entry) in word.iter().enumerate() {
            if let Some(v) = entry {
                self.field.check(*v)?;
                idx.push(i);
                vals.push(*v);
            }
        }
        // x * G_S = w  <=>  G_S^T x^T = w^T.
        let system = self.generator.select_cols(&idx).transpose();
        match system.solve(&vals)? {
            Solve::Unique(msg) => Ok(msg),
            Solve::Many { rank, .. } => Err(Error::Ambiguous { rank, need: self.k }),
            Solve::None => Err(Error::Inconsistent),
        }
    }

    /// The dual code: generator and parity-check swap roles.
    pub fn dual(&self) -> LinearCode {
        LinearCode {
            field: self.field.clone(),
            n: self.n,
            k: self.n - self.k,
            generator: self.parity.clone(),
            parity: self.generator.clone(),
            kind: CodeKind::Raw,
            min_distance: OnceLock::new(),
        }
    }
}

/// Reed-Solomon code: messages are polynomial coefficient vectors of degree
/// `< k`, codewords their evaluations at `n` distinct points (default: the
/// first `n` elements in canonical order). Distance `n - k + 1` is exact
/// (roots bound plus Singleton), so it is cached at construction.
pub fn make_rs(field: &FieldCtx, n: usize, k: usize, points: Option<&[u64]>) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if (field.q() as usize) < n {
        return Err(Error::BadParams(format!("Reed-Solomon needs q >= n, got q={}, n={n}", field.q())));
    }
    let points: Vec<u64> = match points {
        Some(p) => {
            if p.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: p.len() });
            }
            for &v in p {
                field.check(v)?;
            }
            let mut sorted = p.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::BadParams("evaluation points must be distinct".into()));
            }
            p.to_vec()
        }
        None => (0..n as u64).collect(),
    };
    let generator = QMatrix::from_fn(field.clone(), k, n, |j, i| field.pow(points[i], j as u128));
    let code = LinearCode::assemble(generator, CodeKind::Rs { points })?;
    code.set_distance(n - k + 1);
    Ok(code)
}

/// Hadamard code of dimension `n`: length `2^n` over `GF(2)`, columns are
/// all binary vectors, every nonzero codeword has weight exactly `2^(n-1)`.
pub fn make_hadamard(n: u32) -> Result<LinearCode> {
    if n == 0 {
        return Err(Error::BadParams("Hadamard dimension must be at least 1".into()));
    }
    let len = 1u128 << n;
    let cap = caps::current().enumerate;
    if len.saturating_mul(n as u128) > cap {
        return Err(Error::TooLarge { what: format!("Hadamard generator 2^{n} * {n}"), limit: cap });
    }
    let f2 = crate::field::make_field(2, 1, None)?;
    let generator = QMatrix::from_fn(f2, n as usize, len as usize, |i, y| ((y >> i) & 1) as u64);
    let code = LinearCode::assemble(generator, CodeKind::Hadamard)?;
    code.set_distance(1usize << (n - 1));
    Ok(code)
}

/// Random linear code: generator entries independent and uniform, resampled
/// (up to 64 times) until the rows are independent.
pub fn make_random<R: rand::Rng>(field: &FieldCtx, n: usize, k: usize, rng: Option<&mut R>) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let rng = rng.ok_or(Error::RngRequired)?;
    let q = field.q();
    let mut last_rank = 0;
    for _ in 0..64 {
        let generator = QMatrix::from_fn(field.clone(), k, n, |_, _| rng.gen_range(0..q));
        match LinearCode::assemble(generator, CodeKind::Random) {
            Ok(code) => return Ok(code),
            Err(Error::RankDeficient { rank, .. }) => last_rank = rank,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RankDeficient { rank: last_rank, need: k })
}

/// Gabidulin code over `GF(p^m)`: generator rows evaluate the linearized
/// monomials `x^(p^j)`, `j < k`, at `n` points linearly independent over
/// `GF(p)` (default: the polynomial basis `1, x, ..., x^(n-1)`). Being
/// maximum-rank-distance, its rank distance is `n - k + 1`; the Hamming
/// distance matches it by the Singleton squeeze, so it is cached.
pub fn make_gabidulin(base_p: u64, ext_m: u32, n: usize, k: usize, points: Option<&[u64]>) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if (ext_m as usize) < n {
        return Err(Error::BadParams(format!("Gabidulin needs extension degree m >= n, got m={ext_m}, n={n}")));
    }
    let field = crate::field::make_field(base_p, ext_m, None)?;
    let points: Vec<u64> = match points {
        Some(p) => {
            if p.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: p.len() });
            }
            for &v in p {
                field.check(v)?;
            }
            p.to_vec()
        }
        None => (0..n).map(|i| base_p.pow(i as u32)).collect(),
    };
    // Points must span an n-dimensional GF(p)-subspace.
    let rank = {
        let prime = field.prime_subfield();
        let m = field.ext_degree() as usize;
        QMatrix::from_fn(prime, m, n, |i, j| field.coeffs_of(points[j])[i]).rank()
    };
    if rank < n {
        return Err(Error::BadParams(format!("evaluation points span rank {rank} < {n} over GF({base_p})")));
    }
    let generator = QMatrix::from_fn(field.clone(), k, n, |j, i| {
        field.pow(points[i], (base_p as u128).pow(j as u32))
    });
    let code = LinearCode::assemble(generator, CodeKind::Gabidulin { base_p, points })?;
    code.set_distance(n - k + 1);
    Ok(code)
}

/// Minimum rank weight over all nonzero codewords (the rank-metric
/// distance), by enumeration.
pub fn min_rank_distance(code: &LinearCode) -> Result<usize> {
    if code.k() == 0 {
        return Err(Error::BadParams("zero-dimensional code has no nonzero codewords".into()));
    }
    let q = code.field().q() as u128;
    let total = q
        .checked_pow(code.k() as u32)
        .filter(|t| t.saturating_mul(code.n() as u128) <= caps::current().enumerate)
        .ok_or_else(|| Error::TooLarge { what: "rank-distance enumeration".into(), limit: caps::current().enumerate })?;
    Ok((1..total as u64)
        .map(|idx| {
            let msg = code.message_from_index(idx);
            rank_weight(code.field(), &code.generator().left_mul_vec(&msg))
        })
        .min()
        .expect("at least one nonzero codeword"))
}

/// Concatenate an outer code over `GF(p^k2)` with an inner code of dimension
/// `k2` over the prime subfield `GF(p)`. Outer symbols expand to their
/// coefficient vectors in the polynomial basis (recorded in the kind tag),
/// each then encoded by the inner code; this makes the composite map
/// `GF(p)`-linear, so the result is a genuine `[n1*n2, k1*k2]` linear code.
pub fn concatenate(outer: &LinearCode, inner: &LinearCode) -> Result<LinearCode> {
    let of = outer.field();
    let inf = inner.field();
    if inf.ext_degree() != 1 || inf.p() != of.p() {
        return Err(Error::AlphabetMismatch(format!(
            "inner code must live over the prime subfield GF({}) of the outer field {}, got {}",
            of.p(),
            of.spec_string(),
            inf.spec_string()
        )));
    }
    let k2 = of.ext_degree() as usize;
    if inner.k() != k2 {
        return Err(Error::AlphabetMismatch(format!(
            "inner dimension {} must match the outer extension degree {k2}",
            inner.k()
        )));
    }
    let (k1, n1, n2) = (outer.k(), outer.n(), inner.n());
    let basis: Vec<u64> = (0..k2).map(|b| of.p().pow(b as u32)).collect();
    let mut rows = Vec::with_capacity(k1 * k2);
    for a in 0..k1 {
        for &b in &basis {
            let mut outer_msg = vec![0u64; k1];
            outer_msg[a] = b;
            let symbols = outer.encode(&outer_msg)?;
            let mut row = Vec::with_capacity(n1 * n2);
            for &sym in &symbols {
                row.extend(inner.encode(&of.coeffs_of(sym))?);
            }
            rows.push(row);
        }
    }
    let generator = QMatrix::from_rows(inf.clone(), rows)?;
    LinearCode::assemble(
        generator,
        CodeKind::Concatenated { outer: outer.describe(), inner: inner.describe(), basis },
    )
}
