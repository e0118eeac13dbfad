//! Arithmetic in 𝔽_q and in the polynomial ring 𝔽_q[X].
//!
//! Elements are encoded as integers `0..q`: the base-`p` digits of an element
//! are the coefficients (low-to-high) of its residue polynomial modulo the
//! field's defining polynomial. For prime fields this is the usual residue.
//! Addition, multiplication and inversion go through tables computed once per
//! field, so a [`FieldSpec`] is cheap to clone and to share between threads.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element in its integer encoding.
pub type Elem = u32;

/// Default cap on the field order; keeps every exhaustive check at desk scale.
pub const DEFAULT_ORDER_BOUND: u64 = 256;

/// Largest number of candidates any enumeration in this module will visit.
pub const ENUMERATION_BOUND: u128 = 1 << 20;

#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldTables>,
}

struct FieldTables {
    p: u32,
    m: u32,
    q: u32,
    /// Monic defining polynomial over 𝔽_p, coefficients low-to-high; `None` for prime fields.
    modulus: Option<Vec<u32>>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut t = 2;
    while t * t <= n {
        if n % t == 0 {
            return false;
        }
        t += 1;
    }
    true
}

impl FieldSpec {
    /// The field of order `p^m` under the default order bound.
    pub fn new(p: u64, m: i64) -> Result<Self> {
        Self::with_bound(p, m, DEFAULT_ORDER_BOUND)
    }

    /// The prime field 𝔽_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn with_bound(p: u64, m: i64, bound: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m < 1 {
            return Err(Error::BadExtensionDegree(m));
        }
        let order = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if order > bound as u128 {
            return Err(Error::FieldTooLarge {
                order: order.min(u64::MAX as u128) as u64,
                bound,
            });
        }
        let p = p as u32;
        let m = m as u32;
        if m == 1 {
            return Ok(Self::from_tables(p, 1, None));
        }
        // The lexicographically least monic irreducible of degree m over 𝔽_p.
        let base = Self::from_tables(p, 1, None);
        let modulus = enumerate_irreducibles(&base, m as usize)?
            .into_iter()
            .next()
            .expect("every degree has an irreducible polynomial");
        debug_assert_eq!(modulus.coeffs.len() as u32, m + 1);
        Ok(Self::from_tables(p, m, Some(modulus.coeffs)))
    }

    /// Recovers `(p, m)` from the order `q = p^m`.
    pub fn from_order(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        let p = (2..=q).find(|t| q % t == 0).unwrap();
        let mut rest = q;
        let mut m = 0;
        while rest % p == 0 {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower(q));
        }
        Self::new(p, m)
    }

    fn from_tables(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Self {
        let q = p.pow(m);
        let digits = |mut x: u32| -> Vec<u32> {
            (0..m)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let undigits = |ds: &[u32]| ds.iter().rev().fold(0, |acc, &d| acc * p + d);

        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum);

                // Schoolbook product, then reduce by the monic modulus.
                let mut prod = vec![0u32; (2 * m - 1) as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                if let Some(md) = &modulus {
                    for top in (m as usize..prod.len()).rev() {
                        let c = prod[top];
                        if c == 0 {
                            continue;
                        }
                        for (k, mc) in md.iter().enumerate().take(m as usize) {
                            let idx = top - m as usize + k;
                            prod[idx] = (prod[idx] + (p - c) * mc) % p;
                        }
                        prod[top] = 0;
                    }
                }
                prod.truncate(m as usize);
                mul[(a * q + b) as usize] = undigits(&prod);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap())
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap()
                }
            })
            .collect();
        FieldSpec {
            inner: Arc::new(FieldTables {
                p,
                m,
                q,
                modulus,
                add,
                mul,
                neg,
                inv,
            }),
        }
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn m(&self) -> u32 {
        self.inner.m
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.inner.modulus.as_deref()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.inner.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if a < self.inner.q {
            Ok(a)
        } else {
            Err(Error::InvalidElement {
                value: a,
                order: self.inner.q,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.inner.add[(a * self.inner.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.inner.mul[(a * self.inner.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.inner.neg[a as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::InverseOfZero)
        } else {
            Ok(self.inner.inv[a as usize])
        }
    }

    /// Applies one of the field operations after validating both operands.
    pub fn op(&self, a: Elem, b: Elem, which: FieldOp) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(match which {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Neg => self.neg(a),
            FieldOp::Inv => self.inv(a)?,
        })
    }
}

/// Selector for [`FieldSpec::op`]. `Neg` and `Inv` act on the first operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("m", &self.inner.m)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

/// Renders a symbol sequence over an alphabet of size `q`. Alphabets of at
/// most 36 symbols use one character per symbol (`0-9a-z`); larger ones use
/// dot-separated decimals.
pub fn encode_digits(symbols: &[Elem], q: u32) -> String {
    if q <= 36 {
        symbols
            .iter()
            .map(|&s| std::char::from_digit(s, 36).expect("symbol below 36"))
            .collect()
    } else {
        symbols
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub fn decode_digits(text: &str, q: u32) -> Result<Vec<Elem>> {
    let bad = || Error::Format(format!("{text:?} is not a digit string over {q} symbols"));
    let symbols: Vec<Elem> = if q <= 36 {
        text.chars()
            .map(|c| c.to_digit(36).ok_or_else(bad))
            .collect::<Result<_>>()?
    } else if text.is_empty() {
        Vec::new()
    } else {
        text.split('.')
            .map(|t| t.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if symbols.iter().any(|&s| s >= q) {
        return Err(bad());
    }
    Ok(symbols)
}

/// A polynomial over a [`FieldSpec`], coefficients stored low-to-high with no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: FieldSpec,
    coeffs: Vec<Elem>,
}

impl Polynomial {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<Elem>) -> Result<Self> {
        for &c in &coeffs {
            field.check(c)?;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(Polynomial {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Polynomial {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &FieldSpec, c: Elem) -> Result<Self> {
        Self::new(field, vec![c])
    }

    /// The monomial `X`.
    pub fn x(field: &FieldSpec) -> Self {
        Polynomial {
            field: field.clone(),
            coeffs: vec![0, 1],
        }
    }

    /// Parses a low-to-high coefficient string such as `"101"` (1 + X²).
    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        Self::new(field, decode_digits(text, field.q())?)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(1)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Self::new(f, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Self::new(f, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(f));
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.field, 1).unwrap();
        for _ in 0..e {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    pub fn scale(&self, c: Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        Self::new(&self.field, coeffs).unwrap()
    }

    /// Long division: `(quotient, remainder)` with `deg(remainder) < deg(divisor)`.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.same_field(divisor)?;
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = f.mul(rem[top], lead_inv);
            let shift = top - dd;
            quot[shift] = c;
            for (k, &dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] = f.sub(rem[shift + k], f.mul(c, dc));
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        Ok((Self::new(f, quot)?, Self::new(f, rem)?))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Scales to leading coefficient 1; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(self.field.inv(l).unwrap()),
        }
    }

    /// Irreducibility by trial division against every monic of degree ≤ deg/2.
    pub fn is_irreducible(&self) -> bool {
        let deg = match self.degree() {
            None | Some(0) => return false,
            Some(d) => d,
        };
        for r in 1..=deg / 2 {
            for cand in monics(&self.field, r) {
                if self.rem(&cand).unwrap().is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

/// Human-readable form, e.g. `1 + X + X^3`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, c) => write!(f, "{c}X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c}X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Monic greatest common divisor by Euclid's algorithm.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    a.same_field(b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// Every monic polynomial of degree `r`, lexicographic in the coefficient
/// sequence read low-to-high.
pub(crate) fn monics(field: &FieldSpec, r: usize) -> impl Iterator<Item = Polynomial> + '_ {
    let q = field.q() as u64;
    let total = q.pow(r as u32);
    (0..total).map(move |mut t| {
        // coefficient 0 is the most significant digit of the counter
        let mut coeffs = vec![0; r + 1];
        for i in (0..r).rev() {
            coeffs[i] = (t % q) as Elem;
            t /= q;
        }
        coeffs[r] = 1;
        Polynomial {
            field: field.clone(),
            coeffs,
        }
    })
}

/// Möbius function μ(n).
pub fn mobius(n: i64) -> Result<i8> {
    if n <= 0 {
        return Err(Error::NonPositive(n));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut t = 2;
    while t * t <= n {
        if n % t == 0 {
            n /= t;
            if n % t == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        t += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Number of monic irreducible polynomials of degree `r` over the field,
/// `(1/r) Σ_{t | r} μ(t) q^{r/t}`.
pub fn irreducible_count(field: &FieldSpec, r: i64) -> Result<u64> {
    if r <= 0 {
        return Err(Error::NonPositive(r));
    }
    let q = field.q() as i128;
    let mut sum: i128 = 0;
    for t in (1..=r).filter(|t| r % t == 0) {
        let mu = mobius(t)? as i128;
        if mu == 0 {
            continue;
        }
        let power = q
            .checked_pow((r / t) as u32)
            .ok_or(Error::EnumerationTooLarge(u128::MAX))?;
        sum += mu * power;
    }
    Ok((sum / r as i128) as u64)
}

/// All monic irreducibles of degree `r`, in lexicographic low-to-high
/// coefficient order, found by trial division.
pub fn enumerate_irreducibles(field: &FieldSpec, r: usize) -> Result<Vec<Polynomial>> {
    if r == 0 {
        return Err(Error::NonPositive(0));
    }
    let candidates = (field.q() as u128)
        .checked_pow(r as u32)
        .unwrap_or(u128::MAX);
    if candidates > ENUMERATION_BOUND {
        return Err(Error::EnumerationTooLarge(candidates));
    }
    Ok(monics(field, r).filter(|p| p.is_irreducible()).collect())
}
