//! Local rules and no-boundary cellular automata.
//!
//! A rule of diameter `d` is stored as a lookup table of `q^d` outputs. The
//! neighborhood `(x_1, ..., x_d)` indexes the table as `Σ x_i q^{i-1}`, so
//! `x_1` is the least significant digit. The same little-endian convention
//! encodes vertices of the de Bruijn graph and the rows/columns of Cayley
//! tables.
//!
//! The no-boundary global map applies the rule to every window of the input,
//! so a configuration of `n` cells yields `n - d + 1` cells.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{decode_digits, encode_digits, Elem, FieldSpec, Polynomial};

/// Rule tables larger than this are refused.
pub const TABLE_BOUND: u128 = 1 << 20;

/// Counts local-rule evaluations (table lookups) for complexity accounting.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub rule_evals: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Little-endian value of a word: `Σ w_i q^{i-1}`.
pub fn word_value(word: &[Elem], q: u32) -> usize {
    word.iter()
        .rev()
        .fold(0usize, |acc, &s| acc * q as usize + s as usize)
}

/// Inverse of [`word_value`] for words of length `len`.
pub fn word_from_value(mut value: usize, len: usize, q: u32) -> Vec<Elem> {
    (0..len)
        .map(|_| {
            let s = (value % q as usize) as Elem;
            value /= q as usize;
            s
        })
        .collect()
}

/// A cell array over the field's element encoding.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<Elem>);

impl Configuration {
    pub fn new(field: &FieldSpec, symbols: Vec<Elem>) -> Result<Self> {
        for &s in &symbols {
            field.check(s)?;
        }
        Ok(Configuration(symbols))
    }

    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        Ok(Configuration(decode_digits(text, field.q())?))
    }

    pub(crate) fn from_vec(symbols: Vec<Elem>) -> Self {
        Configuration(symbols)
    }

    pub fn symbols(&self) -> &[Elem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_digits(&self, q: u32) -> String {
        encode_digits(&self.0, q)
    }

    /// Splits into the first `at` cells and the rest.
    pub fn split_at(&self, at: usize) -> (Configuration, Configuration) {
        let (a, b) = self.0.split_at(at);
        (Configuration(a.to_vec()), Configuration(b.to_vec()))
    }

    pub fn concat(&self, other: &Configuration) -> Configuration {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Configuration(v)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({})", self)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.0.iter().all(|&s| s < 36) {
            36
        } else {
            256
        };
        f.write_str(&encode_digits(&self.0, q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutivity {
    pub leftmost: bool,
    pub rightmost: bool,
}

impl Permutivity {
    pub fn bipermutive(&self) -> bool {
        self.leftmost && self.rightmost
    }
}

/// A boolean function given by its truth table, `y_1` least significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    arity: usize,
    table: Vec<Elem>,
}

impl BooleanFunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn eval(&self, inputs: &[Elem]) -> Elem {
        self.table[word_value(inputs, 2)]
    }
}

/// A local rule `f: Σ^d → Σ`.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalRule {
    field: FieldSpec,
    d: usize,
    table: Vec<Elem>,
    linear: Option<Vec<Elem>>,
}

impl LocalRule {
    pub fn from_table(field: &FieldSpec, d: usize, table: Vec<Elem>) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDiameter { got: d, min: 2 });
        }
        let size = (field.q() as u128)
            .checked_pow(d as u32)
            .unwrap_or(u128::MAX);
        if size > TABLE_BOUND {
            return Err(Error::EnumerationTooLarge(size));
        }
        if table.len() as u128 != size {
            return Err(Error::TableLength {
                got: table.len(),
                expected: size as usize,
            });
        }
        for &s in &table {
            field.check(s)?;
        }
        let mut rule = LocalRule {
            field: field.clone(),
            d,
            table,
            linear: None,
        };
        rule.linear = rule.detect_linear();
        Ok(rule)
    }

    /// Binary rule from its Wolfram code; `f(1, ..., 1)` is the most significant bit.
    pub fn from_wolfram(code: u128, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDiameter { got: d, min: 2 });
        }
        let rows = 1usize.checked_shl(d as u32).filter(|&r| r <= 128);
        let rows = rows.ok_or(Error::WolframOutOfRange { code, d })?;
        if rows < 128 && code >> rows != 0 {
            return Err(Error::WolframOutOfRange { code, d });
        }
        let table = (0..rows)
            .map(|t| ((code >> wolfram_bit(t, d)) & 1) as Elem)
            .collect();
        Self::from_table(&FieldSpec::prime(2)?, d, table)
    }

    /// Linear rule `a_1 x_1 + ... + a_d x_d`.
    pub fn from_coefficients(field: &FieldSpec, coeffs: &[Elem]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        let d = coeffs.len();
        if d < 2 {
            return Err(Error::BadDiameter { got: d, min: 2 });
        }
        for &c in coeffs {
            field.check(c)?;
        }
        let q = field.q();
        let size = (q as usize).pow(d as u32);
        let table = (0..size)
            .map(|t| {
                let x = word_from_value(t, d, q);
                x.iter()
                    .zip(coeffs)
                    .fold(0, |acc, (&xi, &ai)| field.add(acc, field.mul(ai, xi)))
            })
            .collect();
        Self::from_table(field, d, table)
    }

    /// Linear rule whose associated polynomial `a_1 + a_2 X + ... + a_d X^{d-1}`
    /// is `poly`, padded with zero coefficients up to diameter `d`.
    pub fn from_polynomial(poly: &Polynomial, d: usize) -> Result<Self> {
        if poly.degree().is_some_and(|k| k + 1 > d) {
            return Err(Error::BadDiameter {
                got: d,
                min: poly.degree().unwrap() + 1,
            });
        }
        let coeffs: Vec<Elem> = (0..d).map(|i| poly.coeff(i)).collect();
        Self::from_coefficients(poly.field(), &coeffs)
    }

    fn detect_linear(&self) -> Option<Vec<Elem>> {
        let q = self.field.q() as usize;
        let coeffs: Vec<Elem> = (0..self.d).map(|i| self.table[q.pow(i as u32)]).collect();
        let consistent = self.table.iter().enumerate().all(|(t, &out)| {
            let x = word_from_value(t, self.d, self.field.q());
            let lin = x.iter().zip(&coeffs).fold(0, |acc, (&xi, &ai)| {
                self.field.add(acc, self.field.mul(ai, xi))
            });
            lin == out
        });
        consistent.then_some(coeffs)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn linear_coeffs(&self) -> Option<&[Elem]> {
        self.linear.as_deref()
    }

    pub fn is_linear(&self) -> bool {
        self.linear.is_some()
    }

    /// `p_f(X) = a_1 + a_2 X + ... + a_d X^{d-1}` for linear rules.
    pub fn associated_polynomial(&self) -> Option<Polynomial> {
        self.linear
            .as_ref()
            .map(|c| Polynomial::new(&self.field, c.clone()).unwrap())
    }

    /// Output for a table index (a neighborhood in little-endian encoding).
    #[inline]
    pub fn output(&self, index: usize) -> Elem {
        self.table[index]
    }

    /// `f(x_1, ..., x_d)`.
    pub fn apply(&self, window: &[Elem]) -> Elem {
        debug_assert_eq!(window.len(), self.d);
        self.table[word_value(window, self.q())]
    }

    pub fn evaluate(&self, x: &Configuration) -> Result<Configuration> {
        self.evaluate_counted(x, &mut OpCounter::new())
    }

    /// The no-boundary map `F(x)_i = f(x_i, ..., x_{i+d-1})`.
    pub fn evaluate_counted(
        &self,
        x: &Configuration,
        ops: &mut OpCounter,
    ) -> Result<Configuration> {
        if x.len() < self.d {
            return Err(Error::ConfigurationTooShort {
                got: x.len(),
                d: self.d,
            });
        }
        for &s in x.symbols() {
            self.field.check(s)?;
        }
        let out: Vec<Elem> = x.symbols().windows(self.d).map(|w| self.apply(w)).collect();
        ops.rule_evals += out.len() as u64;
        Ok(Configuration(out))
    }

    pub fn permutivity(&self) -> Permutivity {
        let q = self.q() as usize;
        let rest = q.pow(self.d as u32 - 1);
        let leftmost =
            (0..rest).all(|r| all_distinct((0..q).map(|x1| self.table[x1 + q * r] as usize), q));
        let rightmost =
            (0..rest).all(|r| all_distinct((0..q).map(|xd| self.table[r + rest * xd] as usize), q));
        Permutivity {
            leftmost,
            rightmost,
        }
    }

    pub fn is_bipermutive(&self) -> bool {
        self.permutivity().bipermutive()
    }

    /// The `g` in `f(x) = x_1 ⊕ g(x_2, ..., x_{d-1}) ⊕ x_d`, read off as `g(y) = f(0, y, 0)`.
    pub fn generating_function(&self) -> Result<BooleanFunction> {
        if self.q() != 2 {
            return Err(Error::NotBinary);
        }
        if self.d < 3 {
            return Err(Error::BadDiameter {
                got: self.d,
                min: 3,
            });
        }
        if !self.is_bipermutive() {
            return Err(Error::NotBipermutive);
        }
        let arity = self.d - 2;
        let table = (0..1usize << arity).map(|y| self.table[y << 1]).collect();
        Ok(BooleanFunction { arity, table })
    }

    pub fn wolfram_code(&self) -> Result<u128> {
        if self.q() != 2 {
            return Err(Error::NotBinary);
        }
        if self.d > 7 {
            return Err(Error::WolframOutOfRange { code: 0, d: self.d });
        }
        Ok(self.table.iter().enumerate().fold(0u128, |acc, (t, &v)| {
            acc | ((v as u128) << wolfram_bit(t, self.d))
        }))
    }

    /// `(n-d+1) × n` matrix whose row `i` carries `a_1..a_d` in columns `i..i+d-1`.
    pub fn transition_matrix(&self, n: usize) -> Result<Vec<Vec<Elem>>> {
        let coeffs = self.linear.as_ref().ok_or(Error::NotLinear)?;
        if n < self.d {
            return Err(Error::ConfigurationTooShort { got: n, d: self.d });
        }
        Ok((0..n - self.d + 1)
            .map(|i| {
                let mut row = vec![0; n];
                row[i..i + self.d].copy_from_slice(coeffs);
                row
            })
            .collect())
    }

    /// Table as a digit string in index order.
    pub fn table_digits(&self) -> String {
        encode_digits(&self.table, self.q())
    }

    /// Short name: the Wolfram code for binary rules of diameter ≤ 4, the
    /// associated polynomial for other linear rules, else the table digits.
    pub fn label(&self) -> String {
        if self.q() == 2 && self.d <= 4 {
            return self.wolfram_code().unwrap().to_string();
        }
        match self.associated_polynomial() {
            Some(p) => format!("[{}]", p),
            None => self.table_digits(),
        }
    }
}

/// True iff the values, all below `bound`, are pairwise distinct.
pub(crate) fn all_distinct(mut vals: impl Iterator<Item = usize>, bound: usize) -> bool {
    let mut seen = vec![false; bound];
    vals.all(|v| !std::mem::replace(&mut seen[v], true))
}

/// Bit position of table index `t` in the Wolfram code: the neighborhood read
/// with `x_1` as the most significant bit.
fn wolfram_bit(t: usize, d: usize) -> usize {
    (0..d).fold(0, |acc, i| (acc << 1) | ((t >> i) & 1))
}

impl fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalRule")
            .field("q", &self.q())
            .field("d", &self.d)
            .field("table", &self.table_digits())
            .field("linear", &self.linear)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn cfg(s: &str) -> Configuration {
        Configuration::parse(&f2(), s).unwrap()
    }

    #[test]
    fn rule_150_from_table() {
        // x indexed 000,100,010,110,001,101,011,111
        let r = LocalRule::from_table(&f2(), 3, vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        assert_eq!(r.wolfram_code(), Ok(150));
        assert_eq!(r.linear_coeffs(), Some(&[1, 1, 1][..]));
    }

    #[test]
    fn constant_rule() {
        let r = LocalRule::from_table(&f2(), 3, vec![0; 8]).unwrap();
        assert!(!r.is_bipermutive());
        assert_eq!(
            r.permutivity(),
            Permutivity {
                leftmost: false,
                rightmost: false
            }
        );
        assert_eq!(r, LocalRule::from_wolfram(0, 3).unwrap());
    }

    #[test]
    fn rule_90_from_table() {
        let table = (0..8)
            .map(|t| {
                let x = word_from_value(t, 3, 2);
                x[0] ^ x[2]
            })
            .collect();
        let r = LocalRule::from_table(&f2(), 3, table).unwrap();
        assert_eq!(r.wolfram_code(), Ok(90));
        assert_eq!(r.linear_coeffs(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn table_errors() {
        assert_eq!(
            LocalRule::from_table(&f2(), 3, vec![0; 7]),
            Err(Error::TableLength {
                got: 7,
                expected: 8
            })
        );
        assert!(LocalRule::from_table(&f2(), 2, vec![0, 1, 2, 0]).is_err());
        assert!(LocalRule::from_wolfram(256, 3).is_err());
        assert!(LocalRule::from_coefficients(&f2(), &[]).is_err());
    }

    #[test]
    fn wolfram_tables() {
        let r150 = LocalRule::from_wolfram(150, 3).unwrap();
        let r90 = LocalRule::from_wolfram(90, 3).unwrap();
        for t in 0..8 {
            let x = word_from_value(t, 3, 2);
            assert_eq!(r150.apply(&x), x[0] ^ x[1] ^ x[2]);
            assert_eq!(r90.apply(&x), x[0] ^ x[2]);
        }
        assert_eq!(LocalRule::from_wolfram(0, 3).unwrap().table(), &[0; 8]);
    }

    #[test]
    fn wolfram_round_trip() {
        for code in 0..256u128 {
            let r = LocalRule::from_wolfram(code, 3).unwrap();
            assert_eq!(r.wolfram_code(), Ok(code));
        }
    }

    #[test]
    fn from_coefficients_examples() {
        assert_eq!(
            LocalRule::from_coefficients(&f2(), &[1, 0, 1]).unwrap(),
            LocalRule::from_wolfram(90, 3).unwrap()
        );
        assert_eq!(
            LocalRule::from_coefficients(&f2(), &[1, 1, 1]).unwrap(),
            LocalRule::from_wolfram(150, 3).unwrap()
        );
        let f3 = FieldSpec::prime(3).unwrap();
        let r = LocalRule::from_coefficients(&f3, &[1, 0, 1]).unwrap();
        assert_eq!(r.apply(&[2, 1, 2]), 1);
        assert_eq!(r.linear_coeffs(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn evaluate_examples() {
        let r90 = LocalRule::from_wolfram(90, 3).unwrap();
        let r150 = LocalRule::from_wolfram(150, 3).unwrap();
        assert_eq!(r90.evaluate(&cfg("0010")).unwrap(), cfg("10"));
        assert_eq!(r150.evaluate(&cfg("0010")).unwrap(), cfg("11"));
        assert_eq!(r150.evaluate(&cfg("0000")).unwrap(), cfg("00"));
        assert_eq!(
            r150.evaluate(&cfg("01")),
            Err(Error::ConfigurationTooShort { got: 2, d: 3 })
        );
    }

    #[test]
    fn permutivity_examples() {
        assert!(LocalRule::from_wolfram(150, 3).unwrap().is_bipermutive());
        assert!(LocalRule::from_wolfram(90, 3).unwrap().is_bipermutive());
        // rule 30 = x_1 ⊕ (x_2 ∨ x_3): leftmost permutive only
        let p = LocalRule::from_wolfram(30, 3).unwrap().permutivity();
        assert!(p.leftmost && !p.rightmost);
    }

    #[test]
    fn bipermutive_census_d3() {
        let codes: Vec<u128> = (0..256)
            .filter(|&c| LocalRule::from_wolfram(c, 3).unwrap().is_bipermutive())
            .collect();
        assert_eq!(codes, vec![90, 105, 150, 165]);
        for c in codes {
            let r = LocalRule::from_wolfram(c, 3).unwrap();
            let g = r.generating_function().unwrap();
            for t in 0..8 {
                let x = word_from_value(t, 3, 2);
                assert_eq!(r.apply(&x), x[0] ^ g.eval(&x[1..2]) ^ x[2]);
            }
        }
    }

    #[test]
    fn generating_function_examples() {
        let g = |c| {
            LocalRule::from_wolfram(c, 3)
                .unwrap()
                .generating_function()
                .unwrap()
        };
        assert_eq!(g(150).table(), &[0, 1]);
        assert_eq!(g(90).table(), &[0, 0]);
        assert_eq!(g(105).table(), &[1, 0]);
        assert_eq!(g(150).arity(), 1);
        assert_eq!(
            LocalRule::from_wolfram(30, 3)
                .unwrap()
                .generating_function(),
            Err(Error::NotBipermutive)
        );
        let f3 = FieldSpec::prime(3).unwrap();
        let r = LocalRule::from_coefficients(&f3, &[1, 0, 1]).unwrap();
        assert_eq!(r.generating_function(), Err(Error::NotBinary));
    }

    #[test]
    fn affine_rules_are_not_linear() {
        assert!(!LocalRule::from_wolfram(105, 3).unwrap().is_linear());
        assert!(!LocalRule::from_wolfram(165, 3).unwrap().is_linear());
        assert!(LocalRule::from_wolfram(0, 3).unwrap().is_linear());
    }

    #[test]
    fn transition_matrix_examples() {
        let r150 = LocalRule::from_wolfram(150, 3).unwrap();
        assert_eq!(
            r150.transition_matrix(4).unwrap(),
            vec![vec![1, 1, 1, 0], vec![0, 1, 1, 1]]
        );
        let r90 = LocalRule::from_wolfram(90, 3).unwrap();
        assert_eq!(
            r90.transition_matrix(4).unwrap(),
            vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]
        );
        let f3 = FieldSpec::prime(3).unwrap();
        let r = LocalRule::from_coefficients(&f3, &[1, 0, 1]).unwrap();
        assert_eq!(
            r.transition_matrix(5).unwrap(),
            vec![
                vec![1, 0, 1, 0, 0],
                vec![0, 1, 0, 1, 0],
                vec![0, 0, 1, 0, 1]
            ]
        );
        assert_eq!(
            LocalRule::from_wolfram(105, 3)
                .unwrap()
                .transition_matrix(4),
            Err(Error::NotLinear)
        );
    }

    #[test]
    fn polynomial_round_trip() {
        let f = f2();
        let p = Polynomial::parse(&f, "101").unwrap();
        let r = LocalRule::from_polynomial(&p, 3).unwrap();
        assert_eq!(r.wolfram_code(), Ok(90));
        assert_eq!(r.associated_polynomial(), Some(p));
    }
}
