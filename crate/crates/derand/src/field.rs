//! Finite fields `GF(p^m)` with a canonical integer encoding of elements.
//!
//! An element of `GF(p^m)` is a residue polynomial of degree `< m` over
//! `GF(p)`; it is encoded as the integer `sum_i c_i * p^i` where `c_i` is the
//! coefficient of `x^i`. Indices therefore run over `0..q` with `q = p^m`,
//! `0` and `1` are the additive and multiplicative identities, and `p` is the
//! residue of `x`. For `p = 2` the index is exactly the coefficient bitmask,
//! which the arithmetic exploits.
//!
//! The modulus is a monic irreducible of degree `m` over `GF(p)`. When none
//! is supplied, [`make_field`] picks the lexicographically smallest one:
//! candidates are ordered by reading their coefficient string
//! most-significant-first as a base-`p` integer. For `GF(2^3)` that search
//! yields `x^3 + x + 1`, written `1011`.

use crate::caps;
use crate::error::{Error, Result};

/// Trial-division primality. Desk-scale inputs only (fields are capped at
/// `2^20`, so the scan is at most ~1024 steps).
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// How the element arithmetic is carried out. Chosen once at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    /// `m == 1`: plain integers mod `p`.
    Prime,
    /// `p == 2`: elements are coefficient bitmasks; carry-less arithmetic.
    Bits,
    /// General case: base-`p` digit vectors.
    Digits,
}

/// A finite field `GF(p^m)` together with its modulus polynomial.
///
/// Equality compares `(p, m, modulus)`, so two contexts are interchangeable
/// exactly when they agree as element encodings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    m: u32,
    q: u64,
    /// Little-endian coefficients over `GF(p)`; length `m + 1`, monic.
    modulus: Vec<u64>,
    /// Bitmask form of the modulus when `p == 2` (0 otherwise).
    mod_mask: u64,
    repr: Repr,
}

/// Build `GF(p^m)`. `modulus`, if given, is the little-endian coefficient
/// vector of a monic irreducible of degree exactly `m` over `GF(p)`; when
/// omitted, the lexicographically smallest such polynomial is found by
/// exhaustive search. Fields larger than the `field_enum` cap are refused.
pub fn make_field(p: u64, m: u32, modulus: Option<&[u64]>) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::BadParams("extension degree must be at least 1".into()));
    }
    let cap = caps::current().field_enum;
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q
            .checked_mul(p)
            .filter(|&v| (v as u128) <= cap)
            .ok_or_else(|| Error::TooLarge { what: format!("field size {p}^{m}"), limit: cap })?;
    }
    let prime = FieldCtx::prime_unchecked(p);
    let modulus = match modulus {
        Some(coeffs) => {
            if coeffs.len() != m as usize + 1 || coeffs[m as usize] != 1 {
                return Err(Error::BadParams(format!(
                    "modulus must be monic of degree {m} (need {} little-endian coefficients with leading 1)",
                    m + 1
                )));
            }
            if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
                return Err(Error::NotInField(c));
            }
            let f = Poly::from_coeffs(coeffs.to_vec());
            if let Some(factor) = f.smallest_factor(&prime)? {
                return Err(Error::Reducible { factor: factor.display() });
            }
            coeffs.to_vec()
        }
        None => find_irreducible(&prime, m as usize)?.into_coeffs(),
    };
    let repr = if m == 1 {
        Repr::Prime
    } else if p == 2 {
        Repr::Bits
    } else {
        Repr::Digits
    };
    let mod_mask = if p == 2 {
        modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i))
    } else {
        0
    };
    Ok(FieldCtx { p, m, q, modulus, mod_mask, repr })
}

impl FieldCtx {
    /// `GF(p)` with modulus `x`, skipping validation. Internal helper for
    /// coefficient-field arithmetic during construction.
    fn prime_unchecked(p: u64) -> FieldCtx {
        FieldCtx { p, m: 1, q: p, modulus: vec![0, 1], mod_mask: if p == 2 { 2 } else { 0 }, repr: Repr::Prime }
    }

    /// The characteristic `p`.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The extension degree `m`.
    pub fn ext_degree(&self) -> u32 {
        self.m
    }

    /// The field size `q = p^m`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Little-endian modulus coefficients (length `m + 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The modulus as a [`Poly`] over the prime subfield.
    pub fn modulus_poly(&self) -> Poly {
        Poly::from_coeffs(self.modulus.clone())
    }

    /// The prime subfield `GF(p)` as its own context.
    pub fn prime_subfield(&self) -> FieldCtx {
        FieldCtx::prime_unchecked(self.p)
    }

    /// Validate that `a` is a canonical element index.
    pub fn check(&self, a: u64) -> Result<()> {
        if a < self.q {
            Ok(())
        } else {
            Err(Error::NotInField(a))
        }
    }

    /// Little-endian base-`p` digits of `a` (length `m`): the coefficients of
    /// the residue polynomial.
    pub fn coeffs_of(&self, a: u64) -> Vec<u64> {
        debug_assert!(a < self.q);
        let mut digits = vec![0u64; self.m as usize];
        let mut rest = a;
        for d in digits.iter_mut() {
            *d = rest % self.p;
            rest /= self.p;
        }
        digits
    }

    /// Inverse of [`coeffs_of`](Self::coeffs_of): accepts up to `m`
    /// little-endian digits, each `< p`.
    pub fn index_of(&self, coeffs: &[u64]) -> Result<u64> {
        if coeffs.len() > self.m as usize {
            return Err(Error::LengthMismatch { expected: self.m as usize, got: coeffs.len() });
        }
        let mut acc = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::NotInField(c));
            }
            acc = acc * self.p + c;
        }
        Ok(acc)
    }

    /// `a + b`.
    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        match self.repr {
            Repr::Prime => {
                let s = a + b;
                if s >= self.p { s - self.p } else { s }
            }
            Repr::Bits => a ^ b,
            Repr::Digits => {
                let mut acc = 0u64;
                let mut pow = 1u64;
                let (mut ra, mut rb) = (a, b);
                for _ in 0..self.m {
                    let s = (ra % self.p + rb % self.p) % self.p;
                    acc += s * pow;
                    pow *= self.p;
                    ra /= self.p;
                    rb /= self.p;
                }
                acc
            }
        }
    }

    /// `-a`.
    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.q);
        match self.repr {
            Repr::Prime => {
                if a == 0 { 0 } else { self.p - a }
            }
            Repr::Bits => a,
            Repr::Digits => {
                let mut acc = 0u64;
                let mut pow = 1u64;
                let mut ra = a;
                for _ in 0..self.m {
                    let d = ra % self.p;
                    acc += if d == 0 { 0 } else { (self.p - d) * pow };
                    pow *= self.p;
                    ra /= self.p;
                }
                acc
            }
        }
    }

    /// `a - b`.
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        match self.repr {
            Repr::Bits => a ^ b,
            _ => self.add(a, self.neg(b)),
        }
    }

    /// `a * b`.
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        match self.repr {
            Repr::Prime => ((a as u128 * b as u128) % self.p as u128) as u64,
            Repr::Bits => {
                // Carry-less multiply, then reduce by the modulus bitmask.
                // Operands are < 2^20 so the product fits in 39 bits.
                let mut acc = 0u64;
                let mut bb = b;
                let mut shift = 0u32;
                while bb != 0 {
                    if bb & 1 == 1 {
                        acc ^= a << shift;
                    }
                    bb >>= 1;
                    shift += 1;
                }
                let m = self.m;
                let top = 2 * m.saturating_sub(1);
                for j in (m..=top).rev() {
                    if (acc >> j) & 1 == 1 {
                        acc ^= self.mod_mask << (j - m);
                    }
                }
                acc
            }
            Repr::Digits => {
                let m = self.m as usize;
                let da = self.coeffs_of(a);
                let db = self.coeffs_of(b);
                let mut prod = vec![0u64; 2 * m - 1];
                for (i, &ai) in da.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + ai * bj) % self.p;
                    }
                }
                // Reduce: the modulus is monic, so clearing the top digit
                // subtracts `c * modulus * x^(d-m)`.
                for d in (m..2 * m - 1).rev() {
                    let c = prod[d];
                    if c == 0 {
                        continue;
                    }
                    prod[d] = 0;
                    for j in 0..m {
                        let sub = (c * self.modulus[j]) % self.p;
                        prod[d - m + j] = (prod[d - m + j] + self.p - sub) % self.p;
                    }
                }
                self.index_of(&prod[..m]).expect("reduced digits are canonical")
            }
        }
    }

    /// `a^e` by square-and-multiply. `a^0 = 1` for every `a`, including 0.
    pub fn pow(&self, a: u64, e: u128) -> u64 {
        debug_assert!(a < self.q);
        let mut result = 1u64;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// `a^(-1)`; errors on 0. Uses `a^(q-2)`, fine at desk scale.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivideByZero);
        }
        Ok(self.pow(a, self.q as u128 - 2))
    }

    /// `a / b`; errors when `b = 0`.
    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Frobenius-power of an element: maps the residue polynomial of `a` to
    /// its `h^i`-th power mod the field modulus and returns the element index
    /// of the result. `h` must be a power of the characteristic.
    pub fn frob_elem(&self, a: u64, h: u64, i: u32) -> Result<u64> {
        self.check(a)?;
        let f = Poly::from_coeffs(self.coeffs_of(a));
        let image = frob_pow_mod(self, &f, h, i)?;
        let mut coeffs = image.into_coeffs();
        coeffs.resize(self.m as usize, 0);
        self.index_of(&coeffs)
    }

    /// Validated arithmetic dispatch, the form the CLI uses. `b` carries the
    /// second operand where one is needed; for `Pow` it is the exponent and
    /// is not interpreted as a field element.
    pub fn arith(&self, op: ArithOp, a: u64, b: Option<u64>) -> Result<u64> {
        self.check(a)?;
        let rhs = |b: Option<u64>| -> Result<u64> {
            let b = b.ok_or_else(|| Error::BadParams(format!("{op:?} needs two operands")))?;
            self.check(b)?;
            Ok(b)
        };
        match op {
            ArithOp::Add => Ok(self.add(a, rhs(b)?)),
            ArithOp::Sub => Ok(self.sub(a, rhs(b)?)),
            ArithOp::Mul => Ok(self.mul(a, rhs(b)?)),
            ArithOp::Div => self.div(a, rhs(b)?),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Inv => self.inv(a),
            ArithOp::Pow => {
                let e = b.ok_or_else(|| Error::BadParams("Pow needs an exponent".into()))?;
                Ok(self.pow(a, e as u128))
            }
        }
    }

    /// Canonical text form: `GF(p)` for prime fields, otherwise
    /// `GF(p^m)/<modulus>` with the modulus written most-significant-first —
    /// as a digit string when `p <= 10`, comma-separated otherwise.
    pub fn spec_string(&self) -> String {
        if self.m == 1 {
            return format!("GF({})", self.p);
        }
        let msb: Vec<u64> = self.modulus.iter().rev().copied().collect();
        let coeffs = if self.p <= 10 {
            msb.iter().map(|c| c.to_string()).collect::<String>()
        } else {
            msb.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        };
        format!("GF({}^{})/{}", self.p, self.m, coeffs)
    }
}

/// Operations understood by [`FieldCtx::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow,
}

impl std::str::FromStr for ArithOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<ArithOp> {
        Ok(match s {
            "add" => ArithOp::Add,
            "sub" => ArithOp::Sub,
            "mul" => ArithOp::Mul,
            "div" => ArithOp::Div,
            "neg" => ArithOp::Neg,
            "inv" => ArithOp::Inv,
            "pow" => ArithOp::Pow,
            other => return Err(Error::Parse(format!("unknown field operation `{other}`"))),
        })
    }
}

/// Parse the text form produced by [`FieldCtx::spec_string`]. Accepts
/// `GF(p)`, `GF(p^m)` (modulus searched), and `GF(p^m)/<coeffs>` with the
/// coefficients most-significant-first, either as a digit string or
/// comma-separated.
pub fn parse_spec(s: &str) -> Result<FieldCtx> {
    let s = s.trim();
    let inner = s
        .strip_prefix("GF(")
        .and_then(|rest| rest.split_once(')'))
        .ok_or_else(|| Error::Parse(format!("expected GF(p^m)[/modulus], got `{s}`")))?;
    let (pm, tail) = inner;
    let (p, m) = match pm.split_once('^') {
        Some((p, m)) => (
            p.trim().parse::<u64>().map_err(|e| Error::Parse(format!("bad characteristic: {e}")))?,
            m.trim().parse::<u32>().map_err(|e| Error::Parse(format!("bad extension degree: {e}")))?,
        ),
        None => (pm.trim().parse::<u64>().map_err(|e| Error::Parse(format!("bad characteristic: {e}")))?, 1),
    };
    let modulus = match tail.strip_prefix('/') {
        None if tail.is_empty() => None,
        None => return Err(Error::Parse(format!("unexpected trailing `{tail}`"))),
        Some(coeffs) => {
            let msb: Vec<u64> = if coeffs.contains(',') {
                coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|e| Error::Parse(format!("bad modulus coefficient: {e}"))))
                    .collect::<Result<_>>()?
            } else {
                coeffs
                    .chars()
                    .map(|c| c.to_digit(10).map(u64::from).ok_or_else(|| Error::Parse(format!("bad modulus digit `{c}`"))))
                    .collect::<Result<_>>()?
            };
            Some(msb.into_iter().rev().collect::<Vec<u64>>())
        }
    };
    make_field(p, m, modulus.as_deref())
}

/// A polynomial with coefficients in some [`FieldCtx`], stored little-endian
/// with no trailing zeros (the zero polynomial is the empty vector).
/// Coefficients are element indices of whatever context the operations are
/// given; the polynomial itself does not remember its field.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    /// The constant 1.
    pub fn one() -> Poly {
        Poly { coeffs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x() -> Poly {
        Poly { coeffs: vec![0, 1] }
    }

    /// A constant polynomial.
    pub fn constant(c: u64) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// Build from little-endian coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Little-endian coefficients (no trailing zeros).
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Consume into the coefficient vector.
    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i` (0 beyond the stored length).
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `self + rhs` over `ctx`.
    pub fn add(&self, ctx: &FieldCtx, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ctx.add(self.coeff(i), rhs.coeff(i));
        }
        Poly::from_coeffs(out)
    }

    /// `self - rhs` over `ctx`.
    pub fn sub(&self, ctx: &FieldCtx, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ctx.sub(self.coeff(i), rhs.coeff(i));
        }
        Poly::from_coeffs(out)
    }

    /// `self * rhs` over `ctx` (schoolbook).
    pub fn mul(&self, ctx: &FieldCtx, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Multiply by the scalar `c`.
    pub fn scale(&self, ctx: &FieldCtx, c: u64) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u64; k];
        out.extend_from_slice(&self.coeffs);
        Poly { coeffs: out }
    }

    /// Long division: `self = q * rhs + r` with `deg r < deg rhs`.
    pub fn divmod(&self, ctx: &FieldCtx, rhs: &Poly) -> Result<(Poly, Poly)> {
        let d = rhs.degree().ok_or(Error::DivideByZero)?;
        let lead_inv = ctx.inv(rhs.coeffs[d])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(d)];
        while rem.len() > d {
            let top = rem.len() - 1;
            let c = rem[top];
            if c != 0 {
                let factor = ctx.mul(c, lead_inv);
                quot[top - d] = factor;
                for (j, &mj) in rhs.coeffs.iter().enumerate() {
                    let idx = top - d + j;
                    rem[idx] = ctx.sub(rem[idx], ctx.mul(factor, mj));
                }
            }
            rem.pop();
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Remainder of division by `rhs`.
    pub fn rem(&self, ctx: &FieldCtx, rhs: &Poly) -> Result<Poly> {
        Ok(self.divmod(ctx, rhs)?.1)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, ctx: &FieldCtx, e: u128, modulus: &Poly) -> Result<Poly> {
        if modulus.degree().is_none() || modulus.degree() == Some(0) {
            return Err(Error::BadParams("pow_mod modulus must have degree >= 1".into()));
        }
        let mut result = Poly::one().rem(ctx, modulus)?;
        let mut base = self.rem(ctx, modulus)?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(ctx, &base).rem(ctx, modulus)?;
            }
            base = base.mul(ctx, &base).rem(ctx, modulus)?;
            e >>= 1;
        }
        Ok(result)
    }

    /// Evaluate at `x = point` by Horner's rule.
    pub fn eval(&self, ctx: &FieldCtx, point: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, point), c);
        }
        acc
    }

    /// The lexicographically smallest monic nontrivial factor of degree at
    /// most `deg/2`, or `None` when the polynomial is irreducible. Candidate
    /// order: degree ascending, then coefficient string (read
    /// most-significant-first) ascending. Degree must be at least 1.
    pub fn smallest_factor(&self, ctx: &FieldCtx) -> Result<Option<Poly>> {
        let deg = self
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::BadParams("factor search needs degree >= 1".into()))?;
        let q = ctx.q() as u128;
        let cap = caps::current().enumerate;
        let mut work = 0u128;
        for d in 1..=deg / 2 {
            let count = q.pow(d as u32);
            work = work.saturating_add(count);
            if work > cap {
                return Err(Error::TooLarge { what: format!("factor search over {work} candidates"), limit: cap });
            }
            for t in 0..count {
                let mut coeffs = vec![0u64; d + 1];
                coeffs[d] = 1;
                let mut rest = t;
                for c in coeffs.iter_mut().take(d) {
                    *c = (rest % q) as u64;
                    rest /= q;
                }
                let g = Poly::from_coeffs(coeffs);
                if self.rem(ctx, &g)?.is_zero() {
                    return Ok(Some(g));
                }
            }
        }
        Ok(None)
    }

    /// Whether the polynomial is irreducible over `ctx` (degree >= 1 and no
    /// nontrivial factor).
    pub fn is_irreducible(&self, ctx: &FieldCtx) -> Result<bool> {
        match self.degree() {
            None | Some(0) => Ok(false),
            Some(_) => Ok(self.smallest_factor(ctx)?.is_none()),
        }
    }

    /// Human-readable form, e.g. `x^3 + x + 1` or `2*x^2 + 1`.
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let part = match (c, i) {
                (c, 0) => format!("{c}"),
                (1, 1) => "x".into(),
                (c, 1) => format!("{c}*x"),
                (1, i) => format!("x^{i}"),
                (c, i) => format!("{c}*x^{i}"),
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

/// The lexicographically smallest monic irreducible of the given degree over
/// `ctx` (ordering as in [`make_field`]). Errors with `TooLarge` when the
/// candidate space exceeds the field-enumeration cap.
pub fn find_irreducible(ctx: &FieldCtx, degree: usize) -> Result<Poly> {
    if degree == 0 {
        return Err(Error::BadParams("irreducible search needs degree >= 1".into()));
    }
    let q = ctx.q() as u128;
    let cap = caps::current().field_enum;
    let count = q
        .checked_pow(degree as u32)
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::TooLarge { what: format!("irreducible search over q^{degree} candidates"), limit: cap })?;
    for t in 0..count {
        let mut coeffs = vec![0u64; degree + 1];
        coeffs[degree] = 1;
        let mut rest = t;
        for c in coeffs.iter_mut().take(degree) {
            *c = (rest % q) as u64;
            rest /= q;
        }
        let f = Poly::from_coeffs(coeffs);
        if f.smallest_factor(ctx)?.is_none() {
            return Ok(f);
        }
    }
    Err(Error::BadParams(format!("no irreducible of degree {degree} found; candidate space exhausted")))
}

/// `f^(h^i) mod modulus` over the coefficient field `ctx`, where `h` must be
/// a power of `ctx`'s characteristic (1 counts, giving the identity map).
/// Computed as `i` successive `h`-th powers, so `h^i` never needs to fit in
/// an integer. When `h` is a characteristic power this map is linear over the
/// prime subfield, which is what its callers rely on.
pub fn frob_pow_mod_over(ctx: &FieldCtx, f: &Poly, h: u64, i: u32, modulus: &Poly) -> Result<Poly> {
    let p = ctx.p();
    let mut rest = h;
    while rest > 1 && rest % p == 0 {
        rest /= p;
    }
    if rest != 1 {
        return Err(Error::BadExponentBase { h, p });
    }
    let mut g = f.rem(ctx, modulus)?;
    for _ in 0..i {
        g = g.pow_mod(ctx, h as u128, modulus)?;
    }
    Ok(g)
}

/// `f^(h^i)` in `GF(p^m)` itself: `f` is a residue polynomial over the prime
/// subfield (all coefficients `< p`) and the modulus is the field's own.
pub fn frob_pow_mod(ctx: &FieldCtx, f: &Poly, h: u64, i: u32) -> Result<Poly> {
    if let Some(&c) = f.coeffs().iter().find(|&&c| c >= ctx.p()) {
        return Err(Error::NotInField(c));
    }
    frob_pow_mod_over(&ctx.prime_subfield(), f, h, i, &ctx.modulus_poly())
}
