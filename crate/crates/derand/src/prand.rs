//! Extractor and condenser constructions with exact audits: the
//! multiplicative hash family, the polynomial-powering condenser,
//! code-derived seedless maps, duality transfers for affine sources,
//! random-walk extractors on consistently labeled graphs, and
//! combinatorial designs with their bit generator.
//!
//! Everything is built around [`SeededMap`]: a total function
//! `(input, seed) -> output` over finite symbol alphabets, carrying its
//! claimed entropy requirement and error so that [`audit_map`] can measure
//! the true worst-case error of the claim by exact joint-distribution
//! computation at desk scale.

use std::collections::HashSet;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::{find_irreducible, make_field, FieldCtx, Poly};
use crate::lincode::{CodeKind, LinearCode, QMatrix, Solve};
use crate::probdist::{self, Dist, Scalar};

/// Symbol alphabet of a map's input or output side.
#[derive(Clone, Debug, PartialEq)]
pub enum Alphabet {
    /// Field elements in canonical encoding.
    Field(FieldCtx),
    /// Plain symbols `0..size` with no arithmetic structure.
    Plain(u64),
}

impl Alphabet {
    pub fn size(&self) -> u64 {
        match self {
            Alphabet::Field(f) => f.q(),
            Alphabet::Plain(d) => *d,
        }
    }

    fn check_word(&self, word: &[u64]) -> Result<()> {
        match self {
            Alphabet::Field(f) => word.iter().try_for_each(|&v| f.check(v)),
            Alphabet::Plain(d) => word
                .iter()
                .try_for_each(|&v| if v < *d { Ok(()) } else { Err(Error::NotInField(v)) }),
        }
    }
}

/// What the map claims to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Extractor,
    LosslessCondenser,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Extractor => "extractor",
            Role::LosslessCondenser => "lossless-condenser",
        }
    }
}

type EvalFn = Arc<dyn Fn(&[u64], u64) -> Vec<u64> + Send + Sync>;
type MatrixFn = Arc<dyn Fn(u64) -> QMatrix + Send + Sync>;
type InverterFn = Arc<dyn Fn(&[u64], u64, &[u64]) -> Result<Vec<u64>> + Send + Sync>;

/// A randomness inverter: a deterministic function of the target output,
/// the seed, and an explicit tuple of uniform digits (one per radix).
/// Splitting the randomness out this way lets audits enumerate the
/// inverter's output distribution exactly instead of sampling it.
#[derive(Clone)]
struct Inverter {
    radices: Vec<u64>,
    det: InverterFn,
}

/// A seeded (or seedless, when `t_seeds = 1`) map between symbol strings,
/// together with the construction's claimed parameters.
///
/// Evaluation is a total deterministic function of `(input, seed)`. Linear
/// maps expose a per-seed matrix over `matrix_field` (the field of the
/// map's linearity — the symbol field itself, or its prime subfield for
/// maps that are only additive over the extension); the matrix acts on the
/// input's coefficient expansion when `matrix_field` is a proper subfield.
#[derive(Clone)]
pub struct SeededMap {
    role: Role,
    in_alpha: Alphabet,
    n_in: usize,
    out_alpha: Alphabet,
    n_out: usize,
    t_seeds: u64,
    k_bits: f64,
    eps: f64,
    linear: bool,
    label: String,
    eval: EvalFn,
    matrix: Option<(FieldCtx, MatrixFn)>,
    inverter: Option<Inverter>,
}

impl std::fmt::Debug for SeededMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeededMap")
            .field("label", &self.label)
            .field("role", &self.role.name())
            .field("n_in", &self.n_in)
            .field("t_seeds", &self.t_seeds)
            .field("n_out", &self.n_out)
            .field("k_bits", &self.k_bits)
            .field("eps", &self.eps)
            .field("linear", &self.linear)
            .finish()
    }
}

impl SeededMap {
    /// Assemble a map from parts. This is also the plug-in point for
    /// externally supplied constructions that should flow through the same
    /// audits.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        role: Role,
        in_alpha: Alphabet,
        n_in: usize,
        out_alpha: Alphabet,
        n_out: usize,
        t_seeds: u64,
        k_bits: f64,
        eps: f64,
        linear: bool,
        label: impl Into<String>,
        eval: impl Fn(&[u64], u64) -> Vec<u64> + Send + Sync + 'static,
    ) -> SeededMap {
        SeededMap {
            role,
            in_alpha,
            n_in,
            out_alpha,
            n_out,
            t_seeds,
            k_bits,
            eps,
            linear,
            label: label.into(),
            eval: Arc::new(eval),
            matrix: None,
            inverter: None,
        }
    }

    fn with_matrix(mut self, field: FieldCtx, f: impl Fn(u64) -> QMatrix + Send + Sync + 'static) -> SeededMap {
        self.matrix = Some((field, Arc::new(f)));
        self
    }

    fn with_inverter(
        mut self,
        radices: Vec<u64>,
        det: impl Fn(&[u64], u64, &[u64]) -> Result<Vec<u64>> + Send + Sync + 'static,
    ) -> SeededMap {
        self.inverter = Some(Inverter { radices, det: Arc::new(det) });
        self
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn in_alphabet(&self) -> &Alphabet {
        &self.in_alpha
    }

    pub fn out_alphabet(&self) -> &Alphabet {
        &self.out_alpha
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn t_seeds(&self) -> u64 {
        self.t_seeds
    }

    /// Seed length in bits, `log2` of the seed count (possibly fractional).
    pub fn t_bits(&self) -> f64 {
        (self.t_seeds as f64).log2()
    }

    pub fn k_bits(&self) -> f64 {
        self.k_bits
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn in_domain(&self) -> u128 {
        (self.in_alpha.size() as u128).pow(self.n_in as u32)
    }

    pub fn out_domain(&self) -> u128 {
        (self.out_alpha.size() as u128).pow(self.n_out as u32)
    }

    /// Evaluate the map on a validated input and seed.
    pub fn eval(&self, x: &[u64], seed: u64) -> Result<Vec<u64>> {
        if x.len() != self.n_in {
            return Err(Error::LengthMismatch { expected: self.n_in, got: x.len() });
        }
        self.in_alpha.check_word(x)?;
        if seed >= self.t_seeds {
            return Err(Error::BadRange(format!("seed {seed} out of range 0..{}", self.t_seeds)));
        }
        Ok((self.eval)(x, seed))
    }

    /// The per-seed matrix of a linear map, over [`Self::matrix_field`].
    pub fn matrix_of(&self, seed: u64) -> Result<QMatrix> {
        if seed >= self.t_seeds {
            return Err(Error::BadRange(format!("seed {seed} out of range 0..{}", self.t_seeds)));
        }
        match &self.matrix {
            Some((_, f)) => Ok(f(seed)),
            None => Err(Error::NotLinear),
        }
    }

    /// The field the per-seed matrices are expressed over.
    pub fn matrix_field(&self) -> Option<&FieldCtx> {
        self.matrix.as_ref().map(|(f, _)| f)
    }

    /// Digit radices of the inverter's randomness tuple, if an inverter is
    /// attached.
    pub fn inverter_radices(&self) -> Option<&[u64]> {
        self.inverter.as_ref().map(|inv| inv.radices.as_slice())
    }

    /// Deterministic inverter core: produces an input that evaluates to `y`
    /// under `seed`, using the given digit tuple as its randomness.
    pub fn invert_with(&self, y: &[u64], seed: u64, digits: &[u64]) -> Result<Vec<u64>> {
        let inv = self.inverter.as_ref().ok_or(Error::NoInverter)?;
        if y.len() != self.n_out {
            return Err(Error::LengthMismatch { expected: self.n_out, got: y.len() });
        }
        self.out_alpha.check_word(y)?;
        if digits.len() != inv.radices.len() {
            return Err(Error::LengthMismatch { expected: inv.radices.len(), got: digits.len() });
        }
        for (&d, &r) in digits.iter().zip(&inv.radices) {
            if d >= r {
                return Err(Error::BadRange(format!("inverter digit {d} out of radix {r}")));
            }
        }
        (inv.det)(y, seed, digits)
    }

    /// Randomized inverter: draws the digit tuple from `rng` and runs
    /// [`Self::invert_with`].
    pub fn invert(&self, y: &[u64], seed: u64, rng: &mut dyn RngCore) -> Result<Vec<u64>> {
        let inv = self.inverter.as_ref().ok_or(Error::NoInverter)?;
        let digits: Vec<u64> = inv.radices.iter().map(|&r| rng.gen_range(0..r)).collect();
        self.invert_with(y, seed, &digits)
    }

    /// Descriptor for reports and files.
    pub fn descriptor_json(&self) -> Value {
        json!({
            "role": self.role.name(),
            "n": self.n_in,
            "t": self.t_seeds,
            "l": self.n_out,
            "k": self.k_bits,
            "eps": self.eps,
            "linear": self.linear,
            "provenance": self.label,
        })
    }

    /// Concatenated `qmatrix v1` dumps of every per-seed matrix.
    pub fn dump_matrices(&self) -> Result<String> {
        if self.matrix.is_none() {
            return Err(Error::NotLinear);
        }
        let cap = caps::current().enumerate;
        if self.t_seeds as u128 > cap {
            return Err(Error::TooLarge { what: format!("{} per-seed matrices", self.t_seeds), limit: cap });
        }
        let mut out = String::new();
        for u in 0..self.t_seeds {
            out.push_str(&self.matrix_of(u)?.to_text());
        }
        Ok(out)
    }
}

/// Little-endian digits of `idx` in the given alphabet size.
pub fn digits_of(idx: u128, alpha: u64, n: usize) -> Vec<u64> {
    let mut rest = idx;
    let mut out = vec![0u64; n];
    for slot in out.iter_mut() {
        *slot = (rest % alpha as u128) as u64;
        rest /= alpha as u128;
    }
    out
}

/// Inverse of [`digits_of`].
pub fn index_of(digits: &[u64], alpha: u64) -> u128 {
    digits.iter().rev().fold(0u128, |acc, &d| acc * alpha as u128 + d as u128)
}

/// Precomputed elimination data for solving `A x = y` repeatedly with
/// uniformly random free variables: `x = particular(y) + sum digits[i] *
/// null_basis[i]`.
struct Eliminator {
    field: FieldCtx,
    pivots: Vec<usize>,
    transform: QMatrix,
    null_basis: QMatrix,
    cols: usize,
}

impl Eliminator {
    /// Build for a full-row-rank matrix `a`.
    fn new(a: &QMatrix) -> Result<Eliminator> {
        let rows = a.rows();
        let f = a.field().clone();
        // Reduce [A | I]: the right block records the row transform B with
        // B*A in reduced echelon form, so a particular solution of A x = y
        // places the entries of B*y at the pivot columns.
        let mut aug = QMatrix::zero(f.clone(), rows, a.cols() + rows);
        for i in 0..rows {
            for j in 0..a.cols() {
                aug.set(i, j, a.get(i, j));
            }
            aug.set(i, a.cols() + i, 1);
        }
        let (rref, pivots_aug) = aug.rref();
        let pivots: Vec<usize> = pivots_aug.into_iter().filter(|&c| c < a.cols()).collect();
        if pivots.len() < rows {
            return Err(Error::RankDeficient { rank: pivots.len(), need: rows });
        }
        let transform = QMatrix::from_fn(f.clone(), rows, rows, |i, j| rref.get(i, a.cols() + j));
        Ok(Eliminator { field: f, pivots, transform, null_basis: a.nullspace(), cols: a.cols() })
    }

    fn free_count(&self) -> usize {
        self.null_basis.rows()
    }

    /// The solution of `A x = y` selected by the digit tuple.
    fn solve_with(&self, y: &[u64], digits: &[u64]) -> Vec<u64> {
        let f = &self.field;
        let by = self.transform.mul_vec(y);
        let mut x = vec![0u64; self.cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = by[i];
        }
        for (i, &c) in digits.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let row = self.null_basis.row(i);
            for (slot, &b) in x.iter_mut().zip(row) {
                *slot = f.add(*slot, f.mul(c, b));
            }
        }
        x
    }
}

/// The multiplicative hash family `h_a(x) = first m bits of a*x` computed
/// in `GF(2^n)`: a universal family, hence a strong extractor when
/// `m <= k - 2 log(1/eps)` and a strong lossless condenser when
/// `m >= k + 2 log(1/eps)`. The claimed `k` is filled in from whichever
/// regime the caller requests; the seed is the multiplier (the all-zero
/// seed is a legitimate family member, retained).
///
/// The per-seed inverter solves the `m` linear constraints and randomizes
/// the free variables; it is defined for every nonzero seed (the zero seed
/// has non-surjective evaluation, so inversion reports `Inconsistent` on
/// targets outside its image).
pub fn lhl_map(n: u32, m: u32, role: Role, eps: f64) -> Result<SeededMap> {
    if m == 0 || m > n {
        return Err(Error::BadLengths(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadParams(format!("error must be in (0, 1], got {eps}")));
    }
    let field = make_field(2, n, None)?;
    let slack = 2.0 * (1.0 / eps).log2();
    let k_bits = match role {
        Role::Extractor => m as f64 + slack,
        Role::LosslessCondenser => m as f64 - slack,
    };
    if k_bits < 0.0 || k_bits > n as f64 {
        return Err(Error::BadLengths(format!(
            "entropy requirement {k_bits} outside 0..={n} for m={m}, eps={eps}"
        )));
    }
    let mask = (1u64 << m) - 1;
    let f_eval = field.clone();
    let nn = n as usize;
    let mm = m as usize;
    let eval = move |x: &[u64], seed: u64| -> Vec<u64> {
        let idx = x.iter().rev().fold(0u64, |acc, &b| (acc << 1) | b);
        let prod = f_eval.mul(seed, idx) & mask;
        (0..mm).map(|i| (prod >> i) & 1).collect()
    };
    let f2 = make_field(2, 1, None)?;
    let f_mat = field.clone();
    let f2m = f2.clone();
    let matrix = move |seed: u64| -> QMatrix {
        QMatrix::from_fn(f2m.clone(), mm, nn, |i, j| (f_mat.mul(seed, 1u64 << j) >> i) & 1)
    };
    let f2i = f2.clone();
    let f_inv = field.clone();
    let det = move |y: &[u64], seed: u64, digits: &[u64]| -> Result<Vec<u64>> {
        let m_seed = QMatrix::from_fn(f2i.clone(), mm, nn, |i, j| (f_inv.mul(seed, 1u64 << j) >> i) & 1);
        match m_seed.solve(y)? {
            Solve::Unique(x) => Ok(x),
            Solve::Many { particular, null_basis, rank } => {
                if rank < mm {
                    // Only the zero seed lands here; its image is {0}.
                    if y.iter().any(|&b| b != 0) {
                        return Err(Error::Inconsistent);
                    }
                }
                let f = &f2i;
                let mut x = particular;
                for (i, &c) in digits.iter().enumerate().take(null_basis.rows()) {
                    if c == 0 {
                        continue;
                    }
                    for (slot, &b) in x.iter_mut().zip(null_basis.row(i)) {
                        *slot = f.add(*slot, f.mul(c, b));
                    }
                }
                Ok(x)
            }
            Solve::None => Err(Error::Inconsistent),
        }
    };
    Ok(SeededMap::custom(
        role,
        Alphabet::Field(f2.clone()),
        nn,
        Alphabet::Field(f2),
        mm,
        field.q(),
        k_bits,
        eps,
        true,
        format!("lhl(n={n},m={m})"),
        eval,
    )
    .with_matrix(make_field(2, 1, None)?, matrix)
    .with_inverter(vec![2; nn - mm], det))
}

/// The polynomial-powering lossless condenser: the input is the coefficient
/// vector of a polynomial `F` of degree `< n` over `GF(q)`, the seed is an
/// evaluation point `z`, and the output is
/// `(F(z), F^h mod g (z), ..., F^(h^(l-1)) mod g (z))` for a fixed
/// irreducible `g` of degree `n` (the lexicographically smallest). It is a
/// strong lossless condenser for entropy up to `l*log2(h)` bits with error
/// `(n-1)(h-1)l/q`, and since `h` must be a power of the characteristic,
/// evaluation is linear over the prime subfield for every fixed seed.
pub fn guv_condenser(ctx: &FieldCtx, n: usize, h: u64, ell: usize) -> Result<SeededMap> {
    if n == 0 || ell == 0 {
        return Err(Error::BadParams(format!("need n >= 1 and l >= 1, got n={n}, l={ell}")));
    }
    if h < 2 {
        return Err(Error::BadParams(format!("power parameter must be at least 2, got {h}")));
    }
    let p = ctx.p();
    let mut rest = h;
    while rest % p == 0 {
        rest /= p;
    }
    if rest != 1 {
        return Err(Error::BadExponentBase { h, p });
    }
    let q = ctx.q();
    let bad_mass = (n as u64 - 1) * (h - 1) * ell as u64;
    if bad_mass >= q {
        return Err(Error::ErrorTooLarge(format!(
            "(n-1)(h-1)l = {bad_mass} must be smaller than q = {q}"
        )));
    }
    let eps = bad_mass as f64 / q as f64;
    let k_bits = ell as f64 * (h as f64).log2();
    let modulus = Arc::new(find_irreducible(ctx, n)?);
    let fx = ctx.clone();
    let g = modulus.clone();
    let eval = move |x: &[u64], seed: u64| -> Vec<u64> {
        let mut out = Vec::with_capacity(ell);
        let mut cur = Poly::from_coeffs(x.to_vec());
        out.push(cur.eval(&fx, seed));
        for _ in 1..ell {
            cur = cur.pow_mod(&fx, h as u128, &g).expect("degree-n modulus is nonzero");
            out.push(cur.eval(&fx, seed));
        }
        out
    };
    let prime = ctx.prime_subfield();
    let e = ctx.ext_degree() as usize;
    let fm = ctx.clone();
    let gm = modulus.clone();
    let prime_m = prime.clone();
    let matrix = move |seed: u64| -> QMatrix {
        // Column (j, c): the prime-subfield expansion of the image of the
        // basis input with x_j = p^c.
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n * e);
        for j in 0..n {
            for c in 0..e {
                let mut x = vec![0u64; n];
                x[j] = fm.p().pow(c as u32);
                let mut cur = Poly::from_coeffs(x);
                let mut outs = Vec::with_capacity(ell);
                outs.push(cur.eval(&fm, seed));
                for _ in 1..ell {
                    cur = cur.pow_mod(&fm, h as u128, &gm).expect("modulus nonzero");
                    outs.push(cur.eval(&fm, seed));
                }
                let mut col = Vec::with_capacity(ell * e);
                for &y in &outs {
                    col.extend(fm.coeffs_of(y));
                }
                cols.push(col);
            }
        }
        QMatrix::from_fn(prime_m.clone(), ell * e, n * e, |i, j| cols[j][i])
    };
    Ok(SeededMap::custom(
        Role::LosslessCondenser,
        Alphabet::Field(ctx.clone()),
        n,
        Alphabet::Field(ctx.clone()),
        ell,
        q,
        k_bits,
        eps,
        true,
        format!("guv({},n={n},h={h},l={ell})", ctx.spec_string()),
        eval,
    )
    .with_matrix(prime, matrix))
}

/// Which matrix of the code a [`code_map`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeMapMode {
    /// `x -> G x^T`: a zero-error extractor for symbol-fixing sources with
    /// `n - d + 1` free symbols — and, when the code is maximum rank
    /// distance, for subfield-restricted affine sources of that dimension.
    GenExtractor,
    /// `x -> H x^T`: a zero-error lossless condenser for sources with up to
    /// `d - 1` free symbols.
    ParityCondenser,
}

/// Seedless linear extractor/condenser read off a linear code with known
/// minimum distance. The inverter solves the linear system by elimination
/// with uniformly random free variables, which makes it an exact 0-inverter.
pub fn code_map(code: &LinearCode, mode: CodeMapMode) -> Result<SeededMap> {
    let d = match code.cached_distance() {
        Some(d) => d,
        None => code.min_distance().map_err(|_| Error::UnknownDistance)?,
    };
    let field = code.field().clone();
    let q = field.q();
    let n = code.n();
    let (mat, role, k_sym, tag) = match mode {
        CodeMapMode::GenExtractor => (code.generator().clone(), Role::Extractor, n - d + 1, "gen"),
        CodeMapMode::ParityCondenser => (code.parity().clone(), Role::LosslessCondenser, d - 1, "parity"),
    };
    let n_out = mat.rows();
    let k_bits = k_sym as f64 * (q as f64).log2();
    let elim = Arc::new(Eliminator::new(&mat)?);
    let m_eval = mat.clone();
    let eval = move |x: &[u64], _seed: u64| -> Vec<u64> { m_eval.mul_vec(x) };
    let m_mat = mat.clone();
    let matrix = move |_seed: u64| -> QMatrix { m_mat.clone() };
    let free = elim.free_count();
    let det = move |y: &[u64], _seed: u64, digits: &[u64]| -> Result<Vec<u64>> {
        Ok(elim.solve_with(y, digits))
    };
    let kind_note = match code.kind() {
        CodeKind::Gabidulin { base_p, .. } => format!(" restricted to GF({base_p})-described sources"),
        _ => String::new(),
    };
    Ok(SeededMap::custom(
        role,
        Alphabet::Field(field.clone()),
        n,
        Alphabet::Field(field.clone()),
        n_out,
        1,
        k_bits,
        0.0,
        true,
        format!("code-{tag}({}){kind_note}", code.describe()),
        eval,
    )
    .with_matrix(field, matrix)
    .with_inverter(vec![q; free], det))
}

/// One entry of a [`dual_map`] entropy-transfer report: if `G` condenses
/// `k`-dimensional affine sources to `kprime` dimensions, the dual matrix
/// condenses the orthogonal `n - k`-dimensional sources to
/// `n - k + kprime - m` dimensions (all in field symbols).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualClaim {
    pub k: usize,
    pub kprime: usize,
    pub dual_k: usize,
    pub dual_kprime: i64,
}

#[derive(Clone, Debug)]
pub struct DualReport {
    pub h: QMatrix,
    pub transfers: Vec<DualClaim>,
}

/// Compute a full-rank dual matrix `H` (rows spanning the right kernel of
/// `G`) and translate each tested `(k, k')` affine-condensing claim for `G`
/// into the claim the duality theorem gives for `H`.
pub fn dual_map(g: &QMatrix, claims: &[(usize, usize)]) -> Result<DualReport> {
    let m = g.rows();
    let n = g.cols();
    let rank = g.rank();
    if rank < m {
        return Err(Error::RankDeficient { rank, need: m });
    }
    let h = g.nullspace();
    let transfers = claims
        .iter()
        .map(|&(k, kprime)| DualClaim {
            k,
            kprime,
            dual_k: n - k,
            dual_kprime: (n - k + kprime) as i64 - m as i64,
        })
        .collect();
    Ok(DualReport { h, transfers })
}

/// A `d`-regular graph on `N` vertices with a consistent edge labeling
/// `L: V x [d] -> V` (each label acts as a permutation of the vertices) and
/// a symmetric edge multiset, plus its exact second eigenvalue.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    n_vertices: u64,
    degree: usize,
    table: Vec<u64>,
    inv_table: Vec<u64>,
    lambda: f64,
    label: String,
}

impl LabeledGraph {
    /// Cayley graph of the cyclic group `Z_n` with the given generator
    /// multiset (must be symmetric: for every `g` it contains `-g` with the
    /// same multiplicity, so the graph is undirected). The second
    /// eigenvalue comes from the exact character sums
    /// `max_j |sum_t cos(2 pi j g_t / n)| / d`.
    pub fn cayley_zn(n: u64, gens: &[i64]) -> Result<LabeledGraph> {
        if n == 0 {
            return Err(Error::BadParams("vertex count must be positive".into()));
        }
        if gens.is_empty() {
            return Err(Error::BadParams("generator list must be nonempty".into()));
        }
        let reduced: Vec<u64> = gens.iter().map(|&g| g.rem_euclid(n as i64) as u64).collect();
        let mut sorted = reduced.clone();
        sorted.sort_unstable();
        let mut negated: Vec<u64> = reduced.iter().map(|&g| (n - g) % n).collect();
        negated.sort_unstable();
        if sorted != negated {
            return Err(Error::BadParams(
                "generator multiset must be symmetric (contain -g for every g)".into(),
            ));
        }
        let d = reduced.len();
        let mut table = Vec::with_capacity(n as usize * d);
        for u in 0..n {
            for &g in &reduced {
                table.push((u + g) % n);
            }
        }
        let mut lambda = 0.0f64;
        for j in 1..n {
            let s: f64 = reduced
                .iter()
                .map(|&g| (std::f64::consts::TAU * j as f64 * g as f64 / n as f64).cos())
                .sum();
            lambda = lambda.max((s / d as f64).abs());
        }
        let label = format!("cayley(Z{n},{} gens)", d);
        LabeledGraph::finish(n, d, table, lambda, label)
    }

    /// Build from an explicit labeling table (`table[u*d + t] = L(u, t)`).
    /// The second eigenvalue is computed by a dense symmetric eigensolve.
    pub fn from_table(n: u64, d: usize, table: Vec<u64>) -> Result<LabeledGraph> {
        if table.len() != (n as usize) * d {
            return Err(Error::LengthMismatch { expected: n as usize * d, got: table.len() });
        }
        if n > 1 << 10 {
            return Err(Error::TooLarge { what: format!("dense eigensolve on {n} vertices"), limit: 1 << 10 });
        }
        for &v in &table {
            if v >= n {
                return Err(Error::BadRange(format!("vertex {v} out of range 0..{n}")));
            }
        }
        let nn = n as usize;
        let mut a = vec![vec![0.0f64; nn]; nn];
        for u in 0..nn {
            for t in 0..d {
                a[u][table[u * d + t] as usize] += 1.0 / d as f64;
            }
        }
        let eigs = symmetric_eigenvalues(a);
        let mut abs: Vec<f64> = eigs.iter().map(|e| e.abs()).collect();
        abs.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
        let lambda = abs.get(1).copied().unwrap_or(0.0);
        LabeledGraph::finish(n, d, table, lambda, format!("table({n} vertices, degree {d})"))
    }

    fn finish(n: u64, d: usize, table: Vec<u64>, lambda: f64, label: String) -> Result<LabeledGraph> {
        // Consistency: every label acts injectively.
        let nn = n as usize;
        let mut seen = vec![false; nn];
        for t in 0..d {
            seen.iter_mut().for_each(|s| *s = false);
            for u in 0..nn {
                let v = table[u * d + t] as usize;
                if seen[v] {
                    return Err(Error::BadParams(format!("labeling is not consistent: label {t} is not injective")));
                }
                seen[v] = true;
            }
        }
        // Undirected: the directed edge multiset is symmetric.
        let mut counts = std::collections::HashMap::new();
        for u in 0..n {
            for t in 0..d {
                *counts.entry((u, table[u as usize * d + t])).or_insert(0i64) += 1;
            }
        }
        for (&(u, v), &c) in &counts {
            if counts.get(&(v, u)).copied().unwrap_or(0) != c {
                return Err(Error::BadParams(format!("graph is not undirected at edge ({u}, {v})")));
            }
        }
        let mut inv_table = vec![0u64; nn * d];
        for u in 0..nn {
            for t in 0..d {
                inv_table[t * nn + table[u * d + t] as usize] = u as u64;
            }
        }
        Ok(LabeledGraph { n_vertices: n, degree: d, table, inv_table, lambda, label })
    }

    pub fn vertices(&self) -> u64 {
        self.n_vertices
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// One walk step: the endpoint of the edge with label `t` at `u`.
    pub fn step(&self, u: u64, t: u64) -> u64 {
        self.table[u as usize * self.degree + t as usize]
    }

    /// The unique `u` with `step(u, t) = v` (labels act as permutations).
    pub fn step_back(&self, v: u64, t: u64) -> u64 {
        self.inv_table[t as usize * self.n_vertices as usize + v as usize]
    }

    /// One exact random-walk smoothing of a probability vector:
    /// `p -> p A` for the normalized adjacency matrix `A`.
    pub fn walk_once(&self, p: &[f64]) -> Vec<f64> {
        let nn = self.n_vertices as usize;
        let mut out = vec![0.0; nn];
        for u in 0..nn {
            let share = p[u] / self.degree as f64;
            for t in 0..self.degree {
                out[self.table[u * self.degree + t] as usize] += share;
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-15 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// The random-walk symbol-fixing extractor on a labeled graph with `d^m`
/// vertices: the first `m` input symbols name the start vertex (most
/// significant digit first), the remaining `n - m` symbols are edge labels,
/// and the output is the digit expansion of the final vertex. The claimed
/// error for sources with `k` free symbols is `2^(s/2)` with
/// `s = m log d + k log lambda^2` when `k <= n - m` and
/// `s = (n-k) log d + (n-m) log lambda^2` otherwise.
///
/// The attached inverter picks the walk portion uniformly at random and
/// back-tracks it from the target vertex (each label acts as a permutation,
/// so the unwinding is exact); it is a 0-inverter.
pub fn walk_map(graph: &LabeledGraph, n: usize, k: usize) -> Result<SeededMap> {
    let d = graph.degree() as u64;
    if d < 2 {
        return Err(Error::BadParams("walks need degree at least 2".into()));
    }
    let mut m = 0usize;
    let mut size = 1u64;
    while size < graph.vertices() {
        size = size.checked_mul(d).ok_or_else(|| Error::SizeMismatch("vertex count overflow".into()))?;
        m += 1;
    }
    if size != graph.vertices() {
        return Err(Error::SizeMismatch(format!(
            "vertex count {} is not a power of the degree {d}",
            graph.vertices()
        )));
    }
    if n <= m {
        return Err(Error::BadParams(format!("need n > m = {m} walk inputs, got n = {n}")));
    }
    if k > n {
        return Err(Error::BadParams(format!("free symbol count {k} exceeds n = {n}")));
    }
    let lambda = graph.lambda();
    let log_d = (d as f64).log2();
    let log_l2 = 2.0 * lambda.log2();
    let term = |c: usize, v: f64| if c == 0 { 0.0 } else { c as f64 * v };
    let s = if k <= n - m {
        term(m, log_d) + term(k, log_l2)
    } else {
        term(n - k, log_d) + term(n - m, log_l2)
    };
    let eps = 2f64.powf(s / 2.0);
    let g_eval = Arc::new(graph.clone());
    let g_inv = g_eval.clone();
    let eval = move |x: &[u64], _seed: u64| -> Vec<u64> {
        let mut v = x[..m].iter().fold(0u64, |acc, &s| acc * d + s);
        for &t in &x[m..] {
            v = g_eval.step(v, t);
        }
        let mut out = vec![0u64; m];
        for i in (0..m).rev() {
            out[i] = v % d;
            v /= d;
        }
        out
    };
    let det = move |y: &[u64], _seed: u64, digits: &[u64]| -> Result<Vec<u64>> {
        let mut v = y.iter().fold(0u64, |acc, &s| acc * d + s);
        for &t in digits.iter().rev() {
            v = g_inv.step_back(v, t);
        }
        let mut x = vec![0u64; m];
        for i in (0..m).rev() {
            x[i] = v % d;
            v /= d;
        }
        x.extend_from_slice(digits);
        Ok(x)
    };
    Ok(SeededMap::custom(
        Role::Extractor,
        Alphabet::Plain(d),
        n,
        Alphabet::Plain(d),
        m,
        1,
        k as f64 * log_d,
        eps,
        false,
        format!("walk({}, n={n}, k={k})", graph.label()),
        eval,
    )
    .with_inverter(vec![d; n - m], det))
}

/// A collection of same-size subsets of a bit universe with bounded
/// pairwise intersections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NwDesign {
    t: usize,
    s: usize,
    r: usize,
    sets: Vec<Vec<usize>>,
}

impl NwDesign {
    pub fn universe(&self) -> usize {
        self.t
    }

    pub fn set_size(&self) -> usize {
        self.s
    }

    pub fn intersection_cap(&self) -> usize {
        self.r
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Exhaustive invariant check: sizes and all pairwise intersections.
    pub fn verify(&self) -> Result<()> {
        for set in &self.sets {
            if set.len() != self.s {
                return Err(Error::BadParams(format!("set size {} != {}", set.len(), self.s)));
            }
            if set.iter().any(|&i| i >= self.t) {
                return Err(Error::BadRange("set element outside the universe".into()));
            }
        }
        for i in 0..self.sets.len() {
            for j in (i + 1)..self.sets.len() {
                let inter = self.sets[i].iter().filter(|x| self.sets[j].contains(x)).count();
                if inter > self.r {
                    return Err(Error::BadParams(format!(
                        "sets {i} and {j} intersect in {inter} > {} elements",
                        self.r
                    )));
                }
            }
        }
        Ok(())
    }

    /// The design made of the first `m` sets. A prefix of a valid design is
    /// a valid design; asking for more sets than exist is the stretch error.
    pub fn prefix(&self, m: usize) -> Result<NwDesign> {
        if m == 0 {
            return Err(Error::BadParams("a design prefix needs at least one set".into()));
        }
        if m > self.sets.len() {
            return Err(Error::InsufficientStretch { need: m, got: self.sets.len() });
        }
        Ok(NwDesign { t: self.t, s: self.s, r: self.r, sets: self.sets[..m].to_vec() })
    }

    /// Build a design from explicit sets (file-driven callers). Elements are
    /// sorted, duplicates rejected, and all invariants re-verified.
    pub fn from_sets(t: usize, r: usize, sets: Vec<Vec<usize>>) -> Result<NwDesign> {
        let Some(first) = sets.first() else {
            return Err(Error::BadParams("a design needs at least one set".into()));
        };
        let s = first.len();
        if s == 0 {
            return Err(Error::BadParams("design sets must be nonempty".into()));
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for mut set in sets {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadParams("design sets may not repeat an element".into()));
            }
            sorted.push(set);
        }
        let design = NwDesign { t, s, r, sets: sorted };
        design.verify()?;
        Ok(design)
    }
}

/// Greedy design construction: enumerate `s`-subsets of the universe in
/// lexicographic order, keeping each subset whose intersection with every
/// kept set is at most `r`, until `m` sets are found. Failure (the universe
/// runs out first) is reported as `Infeasible`, never padded.
pub fn nw_design(t: usize, m: usize, s: usize, r: usize) -> Result<NwDesign> {
    if m == 0 || s == 0 {
        return Err(Error::BadParams("need at least one set of positive size".into()));
    }
    if s > t {
        return Err(Error::Infeasible(format!("set size {s} exceeds the universe {t}")));
    }
    if t > 128 {
        return Err(Error::TooLarge { what: format!("design universe {t}"), limit: 128 });
    }
    let cap = caps::current().enumerate;
    let mut kept: Vec<(Vec<usize>, u128)> = Vec::with_capacity(m);
    let mut inspected = 0u128;
    for cand in (0..t).combinations(s) {
        inspected += 1;
        if inspected > cap {
            return Err(Error::TooLarge { what: "greedy design search".into(), limit: cap });
        }
        let mask: u128 = cand.iter().fold(0, |acc, &b| acc | (1u128 << b));
        if kept.iter().all(|(_, km)| (km & mask).count_ones() as usize <= r) {
            kept.push((cand, mask));
            if kept.len() == m {
                let design = NwDesign { t, s, r, sets: kept.into_iter().map(|(c, _)| c).collect() };
                design.verify()?;
                return Ok(design);
            }
        }
    }
    Err(Error::Infeasible(format!("greedy found only {} of {m} sets in a {t}-bit universe", kept.len())))
}

/// Restriction of a seed to a design set, packed little-endian (the first
/// element of the sorted set is the least significant bit).
fn restrict(seed: &[u64], set: &[usize]) -> u64 {
    set.iter().enumerate().fold(0u64, |acc, (l, &pos)| acc | (seed[pos] << l))
}

/// The design-based bit generator: output bit `i` is `f` evaluated on the
/// seed restricted to set `i`. `arity` is the bit width `f` expects and
/// must equal the design's set size.
pub fn nw_generate(f: &dyn Fn(u64) -> u64, arity: usize, design: &NwDesign, seed: &[u64]) -> Result<Vec<u64>> {
    if arity != design.set_size() {
        return Err(Error::ArityMismatch { expected: design.set_size(), got: arity });
    }
    if seed.len() != design.universe() {
        return Err(Error::LengthMismatch { expected: design.universe(), got: seed.len() });
    }
    if seed.iter().any(|&b| b > 1) {
        return Err(Error::BadParams("seed must be a bit string".into()));
    }
    Ok(design.sets().iter().map(|set| f(restrict(seed, set)) & 1).collect())
}

/// The extractor variant of the generator: the input message is encoded by
/// a binary code of length `2^s`, and output bit `i` is the codeword bit
/// whose position is named by the seed restricted to set `i`.
pub fn nw_trevisan(code: &LinearCode, design: &NwDesign, x: &[u64], seed: &[u64]) -> Result<Vec<u64>> {
    if code.field().q() != 2 {
        return Err(Error::AlphabetMismatch(format!(
            "generator codes must be binary, got {}",
            code.field().spec_string()
        )));
    }
    let want = 1usize
        .checked_shl(design.set_size() as u32)
        .ok_or_else(|| Error::TooLarge { what: "codeword index space".into(), limit: caps::current().enumerate })?;
    if code.n() != want {
        return Err(Error::ArityMismatch { expected: want, got: code.n() });
    }
    let codeword = code.encode(x)?;
    if seed.len() != design.universe() {
        return Err(Error::LengthMismatch { expected: design.universe(), got: seed.len() });
    }
    Ok(design.sets().iter().map(|set| codeword[restrict(seed, set) as usize]).collect())
}

/// Which flat sources an audit runs over.
#[derive(Clone, Debug)]
pub enum SourceSpec {
    /// Every flat source with the given support size (use only on tiny
    /// domains; the count is the binomial coefficient).
    ExhaustiveFlat { support: u64 },
    /// Fixed-seed random flat sources with the given support size.
    RandomFlat { support: u64, trials: usize, seed: u64 },
    /// Every symbol-fixing source with exactly `free` unconstrained
    /// positions (all position sets, all fixings of the rest).
    SymbolFixing { free: usize },
    /// Explicit supports, given as lists of input symbol strings.
    Explicit(Vec<Vec<Vec<u64>>>),
}

/// Audit result. Errors are exact in the chosen scalar backend; aggregate
/// floats are provided for reporting.
#[derive(Clone, Debug)]
pub struct AuditReport<T> {
    /// Measured error per source, in source order.
    pub per_source: Vec<T>,
    /// The largest per-source error.
    pub worst: T,
    pub worst_f64: f64,
    pub mean_f64: f64,
    /// The smallest over sources of the fraction of seeds whose per-seed
    /// error is at most the threshold.
    pub strong_fraction: f64,
    pub threshold: f64,
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

fn enumerate_sources(map: &SeededMap, spec: &SourceSpec) -> Result<Vec<Vec<u128>>> {
    let alpha = map.in_alphabet().size();
    let n = map.n_in();
    let domain = map.in_domain();
    let cap = caps::current().enumerate;
    if domain > cap {
        return Err(Error::TooLarge { what: format!("input domain {domain}"), limit: cap });
    }
    let max_sources: u128 = 1 << 20;
    match spec {
        SourceSpec::ExhaustiveFlat { support } => {
            let count = binomial_u128(domain as u64, *support)
                .ok_or(Error::TooLarge { what: "flat source count".into(), limit: max_sources })?;
            if count > max_sources {
                return Err(Error::TooLarge { what: format!("{count} flat sources"), limit: max_sources });
            }
            if *support == 0 || *support as u128 > domain {
                return Err(Error::BadParams(format!("support {support} outside 1..={domain}")));
            }
            Ok((0..domain as u64)
                .combinations(*support as usize)
                .map(|c| c.into_iter().map(u128::from).collect())
                .collect())
        }
        SourceSpec::RandomFlat { support, trials, seed } => {
            if *support == 0 || *support as u128 > domain {
                return Err(Error::BadParams(format!("support {support} outside 1..={domain}")));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let mut out = Vec::with_capacity(*trials);
            for _ in 0..*trials {
                let mut chosen = HashSet::with_capacity(*support as usize);
                while (chosen.len() as u64) < *support {
                    chosen.insert(rng.gen_range(0..domain as u64));
                }
                let mut support: Vec<u128> = chosen.into_iter().map(u128::from).collect();
                support.sort_unstable();
                out.push(support);
            }
            Ok(out)
        }
        SourceSpec::SymbolFixing { free } => {
            if *free > n {
                return Err(Error::BadParams(format!("free count {free} exceeds n = {n}")));
            }
            let fixings = (alpha as u128).pow((n - free) as u32);
            let positions = binomial_u128(n as u64, *free as u64).expect("small binomial");
            let count = positions * fixings;
            if count > max_sources {
                return Err(Error::TooLarge { what: format!("{count} symbol-fixing sources"), limit: max_sources });
            }
            let mut out = Vec::with_capacity(count as usize);
            for free_set in (0..n).combinations(*free) {
                let fixed: Vec<usize> = (0..n).filter(|i| !free_set.contains(i)).collect();
                for fix_idx in 0..fixings {
                    let fix_digits = digits_of(fix_idx, alpha, fixed.len());
                    let mut support = Vec::with_capacity((alpha as usize).pow(*free as u32));
                    for free_idx in 0..(alpha as u128).pow(*free as u32) {
                        let free_digits = digits_of(free_idx, alpha, *free);
                        let mut x = vec![0u64; n];
                        for (slot, &pos) in free_digits.iter().zip(&free_set) {
                            x[pos] = *slot;
                        }
                        for (slot, &pos) in fix_digits.iter().zip(&fixed) {
                            x[pos] = *slot;
                        }
                        support.push(index_of(&x, alpha));
                    }
                    out.push(support);
                }
            }
            Ok(out)
        }
        SourceSpec::Explicit(sources) => sources
            .iter()
            .map(|strings| {
                strings
                    .iter()
                    .map(|x| {
                        if x.len() != n {
                            return Err(Error::LengthMismatch { expected: n, got: x.len() });
                        }
                        map.in_alphabet().check_word(x)?;
                        Ok(index_of(x, alpha))
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Measure the map's true error against its role, exactly, over a family of
/// flat sources.
///
/// For each source and seed the full output distribution is tabulated. An
/// extractor's per-seed error is the statistical distance to uniform; a
/// lossless condenser's is the distance to the nearest distribution of
/// min-entropy `min(k, log2 |support|)` bits. The per-source error is the
/// average over seeds, which equals the error of the joint (seed, output)
/// distribution against the role's target. `strong_threshold` feeds the
/// strong-seed breakdown: the report carries the worst-case fraction of
/// seeds whose per-seed error stays within the threshold.
pub fn audit_map<T: Scalar + Send + Sync>(
    map: &SeededMap,
    k_bits: f64,
    spec: &SourceSpec,
    strong_threshold: f64,
) -> Result<AuditReport<T>> {
    let cap = caps::current().enumerate;
    let m_out = map.out_domain();
    let t = map.t_seeds();
    if m_out.saturating_mul(t as u128) > cap {
        return Err(Error::TooLarge { what: format!("joint distribution of {t} x {m_out} cells"), limit: cap });
    }
    let sources = enumerate_sources(map, spec)?;
    if sources.is_empty() {
        return Err(Error::BadParams("no sources to audit".into()));
    }
    let k_states = 2f64.powf(k_bits).round();
    if !(k_states >= 1.0 && k_states <= u64::MAX as f64) {
        return Err(Error::BadRange(format!("entropy requirement {k_bits} bits out of range")));
    }
    let k_states = k_states as u64;
    let alpha_in = map.in_alphabet().size();
    let alpha_out = map.out_alphabet().size();
    let per: Vec<(T, f64)> = sources
        .par_iter()
        .map(|support| -> Result<(T, f64)> {
            let k_src = support.len() as u64;
            let mut err_sum: Option<T> = None;
            let mut good = 0u64;
            for u in 0..t {
                let mut counts = vec![0u64; m_out as usize];
                for &x_idx in support {
                    let x = digits_of(x_idx, alpha_in, map.n_in());
                    let y = map.eval(&x, u)?;
                    counts[index_of(&y, alpha_out) as usize] += 1;
                }
                let dist: Dist<T> = Dist::from_counts(&counts)?;
                let err = match map.role() {
                    Role::Extractor => {
                        let uniform = Dist::<T>::uniform(m_out as usize)?;
                        probdist::stat_distance(&dist, &uniform)?
                    }
                    Role::LosslessCondenser => {
                        let cap_mass = if k_states >= k_src {
                            T::ratio(1, k_src)
                        } else {
                            T::ratio(1, k_states)
                        };
                        probdist::dist_to_cap(&dist, &cap_mass)?
                    }
                };
                if err.to_f64() <= strong_threshold + 1e-12 {
                    good += 1;
                }
                err_sum = Some(match err_sum {
                    None => err,
                    Some(acc) => acc + err,
                });
            }
            let total = err_sum.expect("at least one seed") / T::from_u64(t);
            Ok((total, good as f64 / t as f64))
        })
        .collect::<Result<_>>()?;
    let per_source: Vec<T> = per.iter().map(|(e, _)| e.clone()).collect();
    let worst = per_source
        .iter()
        .cloned()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("nonempty");
    let mean_f64 = per_source.iter().map(Scalar::to_f64).sum::<f64>() / per_source.len() as f64;
    let strong_fraction = per.iter().map(|(_, g)| *g).fold(f64::INFINITY, f64::min);
    Ok(AuditReport {
        worst_f64: worst.to_f64(),
        worst,
        mean_f64,
        per_source,
        strong_fraction,
        threshold: strong_threshold,
    })
}

/// Exact uniformity deficit of an inverter: enumerates every (target,
/// randomness-tuple) pair, checks the inversion identity on each, and
/// returns the statistical distance of the inverter's output distribution
/// from uniform over the input domain. A 0-inverter returns exactly zero.
pub fn audit_inverter<T: Scalar>(map: &SeededMap, seed: u64) -> Result<T> {
    let radices = map.inverter_radices().ok_or(Error::NoInverter)?.to_vec();
    let r_total: u128 = radices.iter().map(|&r| r as u128).product();
    let m_out = map.out_domain();
    let n_in = map.in_domain();
    let cap = caps::current().enumerate;
    if m_out.saturating_mul(r_total) > cap || n_in > cap {
        return Err(Error::TooLarge { what: "inverter enumeration".into(), limit: cap });
    }
    let alpha_in = map.in_alphabet().size();
    let alpha_out = map.out_alphabet().size();
    let mut hist = vec![0u64; n_in as usize];
    for y_idx in 0..m_out {
        let y = digits_of(y_idx, alpha_out, map.n_out());
        for tuple_idx in 0..r_total {
            let mut digits = Vec::with_capacity(radices.len());
            let mut rest = tuple_idx;
            for &r in &radices {
                digits.push((rest % r as u128) as u64);
                rest /= r as u128;
            }
            let x = map.invert_with(&y, seed, &digits)?;
            if map.eval(&x, seed)? != y {
                return Err(Error::Inconsistent);
            }
            hist[index_of(&x, alpha_in) as usize] += 1;
        }
    }
    let dist: Dist<T> = Dist::from_counts(&hist)?;
    let uniform = Dist::<T>::uniform(n_in as usize)?;
    probdist::stat_distance(&dist, &uniform)
}
