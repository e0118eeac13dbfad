//! Latin squares generated by cellular automata.
//!
//! An NBCA `F: Σ^{2(d-1)} → Σ^{d-1}` with a bipermutive rule defines the
//! Cayley table `C_F(i, j) = φ(F(ψ(i) || ψ(j)))`, a Latin square of order
//! `N = q^{d-1}`. Families of such squares that are pairwise orthogonal
//! (MOCA) are the public parameters of both sharing schemes.

use std::fmt::Write;

use crate::ca::{all_distinct, word_from_value, word_value, Configuration, LocalRule};
use crate::debruijn::preimages;
use crate::error::{Error, Result};
use crate::gf::{enumerate_irreducibles, irreducible_count, poly_gcd, Elem, FieldSpec, Polynomial};

/// φ: `Σ^{d-1} → [N]`, `φ(b) = 1 + Σ b_i q^{i-1}`, and the pair codec
/// `(i, j) ↦ N(i-1) + j` onto `[N²]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCodec {
    q: u32,
    d: usize,
    n: usize,
}

impl IndexCodec {
    pub fn new(field: &FieldSpec, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDiameter { got: d, min: 2 });
        }
        Ok(IndexCodec {
            q: field.q(),
            d,
            n: (field.q() as usize).pow(d as u32 - 1),
        })
    }

    /// Order `N = q^{d-1}`.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn phi(&self, word: &[Elem]) -> Result<usize> {
        if word.len() != self.d - 1 {
            return Err(Error::BlockLength {
                got: word.len(),
                expected: self.d - 1,
            });
        }
        if let Some(&s) = word.iter().find(|&&s| s >= self.q) {
            return Err(Error::InvalidElement {
                value: s,
                order: self.q,
            });
        }
        Ok(1 + word_value(word, self.q))
    }

    pub fn psi(&self, index: usize) -> Result<Vec<Elem>> {
        self.check(index, self.n)?;
        Ok(word_from_value(index - 1, self.d - 1, self.q))
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<usize> {
        self.check(i, self.n)?;
        self.check(j, self.n)?;
        Ok(self.n * (i - 1) + j)
    }

    pub fn unpair(&self, cell: usize) -> Result<(usize, usize)> {
        self.check(cell, self.n * self.n)?;
        Ok(((cell - 1) / self.n + 1, (cell - 1) % self.n + 1))
    }

    /// Cell index of `x = ψ(i) || ψ(j)`.
    pub fn cell_of(&self, x: &Configuration) -> Result<usize> {
        let k = self.d - 1;
        if x.len() != 2 * k {
            return Err(Error::BlockLength {
                got: x.len(),
                expected: 2 * k,
            });
        }
        let (left, right) = x.symbols().split_at(k);
        self.pair(self.phi(left)?, self.phi(right)?)
    }

    pub fn config_of(&self, cell: usize) -> Result<Configuration> {
        let (i, j) = self.unpair(cell)?;
        let mut word = self.psi(i)?;
        word.extend(self.psi(j)?);
        Ok(Configuration::from_vec(word))
    }

    fn check(&self, index: usize, max: usize) -> Result<()> {
        if (1..=max).contains(&index) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, max })
        }
    }
}

/// True iff `rows` is an `N × N` matrix over `[N]` whose rows and columns are
/// all permutations.
pub fn is_latin(rows: &[Vec<usize>]) -> Result<bool> {
    let n = rows.len();
    if n == 0
        || rows
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&v| v == 0 || v > n))
    {
        return Err(Error::MalformedMatrix);
    }
    let rows_ok = rows.iter().all(|r| all_distinct(r.iter().copied(), n + 1));
    let cols_ok = (0..n).all(|c| all_distinct(rows.iter().map(|r| r[c]), n + 1));
    Ok(rows_ok && cols_ok)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    order: usize,
    entries: Vec<usize>,
    rule: Option<LocalRule>,
}

impl LatinSquare {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        if !is_latin(&rows)? {
            return Err(Error::NotLatin);
        }
        Ok(LatinSquare {
            order: rows.len(),
            entries: rows.into_iter().flatten().collect(),
            rule: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry at 1-based row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[(i - 1) * self.order + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.entries
            .chunks(self.order)
            .map(|r| r.to_vec())
            .collect()
    }

    /// The rule this square was generated from, if any.
    pub fn rule(&self) -> Option<&LocalRule> {
        self.rule.as_ref()
    }

    pub fn transpose(&self) -> LatinSquare {
        let n = self.order;
        let entries = (0..n * n)
            .map(|t| self.entries[(t % n) * n + t / n])
            .collect();
        LatinSquare {
            order: n,
            entries,
            rule: None,
        }
    }

    /// `N` lines of `N` space-separated entries.
    pub fn render(&self) -> String {
        let width = self.order.to_string().len();
        let mut out = String::new();
        for row in self.entries.chunks(self.order) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }
}

/// Brute force: the `N²` superposed pairs are pairwise distinct.
pub fn are_orthogonal(a: &LatinSquare, b: &LatinSquare) -> Result<bool> {
    if a.order != b.order {
        return Err(Error::OrderMismatch(a.order, b.order));
    }
    let n = a.order;
    let mut seen = vec![false; n * n];
    Ok(a.entries.iter().zip(&b.entries).all(|(&x, &y)| {
        let slot = (x - 1) * n + (y - 1);
        !std::mem::replace(&mut seen[slot], true)
    }))
}

/// `C_F(i, j) = φ(F(ψ(i) || ψ(j)))`.
pub fn cayley_table(rule: &LocalRule) -> Result<LatinSquare> {
    if !rule.is_bipermutive() {
        return Err(Error::NotBipermutive);
    }
    let codec = IndexCodec::new(rule.field(), rule.diameter())?;
    let n = codec.order();
    let mut entries = Vec::with_capacity(n * n);
    for cell in 1..=n * n {
        let x = codec.config_of(cell)?;
        entries.push(codec.phi(rule.evaluate(&x)?.symbols())?);
    }
    Ok(LatinSquare {
        order: n,
        entries,
        rule: Some(rule.clone()),
    })
}

/// Orthogonality of two linear bipermutive rules: `gcd(p_f, p_g) = 1`.
pub fn orthogonal_by_gcd(f: &LocalRule, g: &LocalRule) -> Result<bool> {
    if f.field() != g.field() || f.diameter() != g.diameter() {
        return Err(Error::RuleMismatch);
    }
    let (pf, pg) = match (f.associated_polynomial(), g.associated_polynomial()) {
        (Some(pf), Some(pg)) => (pf, pg),
        _ => return Err(Error::NotLinear),
    };
    if !f.is_bipermutive() || !g.is_bipermutive() {
        return Err(Error::NotBipermutive);
    }
    Ok(poly_gcd(&pf, &pg)?.degree() == Some(0))
}

/// A pairwise-orthogonal family of bipermutive rules with their squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MocaFamily {
    field: FieldSpec,
    d: usize,
    rules: Vec<LocalRule>,
    squares: Vec<LatinSquare>,
}

impl MocaFamily {
    /// Validates every pair: by gcd when both rules are linear, otherwise by
    /// superposing their Cayley tables.
    pub fn new(rules: Vec<LocalRule>) -> Result<Self> {
        if rules.len() < 2 {
            return Err(Error::FamilyTooSmall(rules.len()));
        }
        let field = rules[0].field().clone();
        let d = rules[0].diameter();
        if rules
            .iter()
            .any(|r| r.field() != &field || r.diameter() != d)
        {
            return Err(Error::RuleMismatch);
        }
        let squares = rules.iter().map(cayley_table).collect::<Result<Vec<_>>>()?;
        for i in 0..rules.len() {
            for j in i + 1..rules.len() {
                let ok = if rules[i].is_linear() && rules[j].is_linear() {
                    orthogonal_by_gcd(&rules[i], &rules[j])?
                } else {
                    are_orthogonal(&squares[i], &squares[j])?
                };
                if !ok {
                    return Err(Error::NotOrthogonal(i + 1, j + 1));
                }
            }
        }
        Ok(MocaFamily {
            field,
            d,
            rules,
            squares,
        })
    }

    /// Re-checks Latinness and all-pairs orthogonality on the squares alone.
    pub fn validate_brute_force(&self) -> Result<()> {
        for s in &self.squares {
            if !is_latin(&s.rows())? {
                return Err(Error::NotLatin);
            }
        }
        for i in 0..self.squares.len() {
            for j in i + 1..self.squares.len() {
                if !are_orthogonal(&self.squares[i], &self.squares[j])? {
                    return Err(Error::NotOrthogonal(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[LocalRule] {
        &self.rules
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    pub fn codec(&self) -> IndexCodec {
        IndexCodec::new(&self.field, self.d).expect("diameter validated at construction")
    }
}

fn check_degree(k: i64) -> Result<u64> {
    if k <= 0 {
        Err(Error::NonPositive(k))
    } else {
        Ok(k as u64)
    }
}

/// Largest linear MOCA family for polynomial degree `k = d - 1`:
/// `I_k + Σ_{j=1}^{⌊k/2⌋} I_j`, where every degree-1 count excludes the
/// polynomial `X` (zero constant term) and so equals `q - 1`.
pub fn max_family_size(field: &FieldSpec, k: i64) -> Result<u64> {
    let k = check_degree(k)? as i64;
    let count = |r: i64| -> Result<u64> {
        let c = irreducible_count(field, r)?;
        Ok(if r == 1 { c - 1 } else { c })
    };
    let mut total = count(k)?;
    for j in 1..=k / 2 {
        total += count(j)?;
    }
    Ok(total)
}

/// The same sum with unadjusted counts `I_j`, as the formula is usually printed.
pub fn max_family_size_printed(field: &FieldSpec, k: i64) -> Result<u64> {
    let k = check_degree(k)? as i64;
    let mut total = irreducible_count(field, k)?;
    for j in 1..=k / 2 {
        total += irreducible_count(field, j)?;
    }
    Ok(total)
}

/// `m` pairwise-coprime monic polynomials of degree `k` with nonzero constant term.
///
/// Order: irreducibles of degree `k`, then powers `p^{k/j}` of irreducibles
/// `p ≠ X` with `deg p = j | k` (by `j`, then lexicographic), then products of
/// the remaining irreducibles found by backtracking.
pub fn coprime_polynomials(field: &FieldSpec, k: usize, m: usize) -> Result<Vec<Polynomial>> {
    let max = max_family_size(field, k as i64)? as usize;
    if m > max {
        return Err(Error::FamilyTooLarge { requested: m, max });
    }
    let mut chosen: Vec<Polynomial> = Vec::new();
    for p in enumerate_irreducibles(field, k)? {
        if chosen.len() == m {
            return Ok(chosen);
        }
        if p.coeff(0) != 0 {
            chosen.push(p);
        }
    }
    let mut pool = Vec::new();
    for j in 1..k {
        for p in enumerate_irreducibles(field, j)? {
            if p.coeff(0) == 0 {
                continue;
            }
            if k % j == 0 {
                if chosen.len() < m {
                    chosen.push(p.pow((k / j) as u32));
                }
            } else {
                pool.push(p);
            }
        }
    }
    if chosen.len() < m {
        let need = m - chosen.len();
        let mut used = vec![false; pool.len()];
        let mut packed = Vec::new();
        if !pack(&pool, &mut used, 0, need, k, &mut packed) {
            return Err(Error::FamilyTooLarge { requested: m, max });
        }
        chosen.extend(packed);
    }
    chosen.truncate(m);
    Ok(chosen)
}

/// Finds `need` disjoint products of unused pool members, each of degree `k`.
fn pack(
    pool: &[Polynomial],
    used: &mut [bool],
    from: usize,
    need: usize,
    k: usize,
    out: &mut Vec<Polynomial>,
) -> bool {
    if need == 0 {
        return true;
    }
    let Some(i) = (from..pool.len()).find(|&i| !used[i]) else {
        return false;
    };
    let mut members = Vec::new();
    let one = Polynomial::constant(pool[i].field(), 1).unwrap();
    compose(pool, used, i, k, vec![], one, &mut members);
    for (idxs, poly) in members {
        for &t in &idxs {
            used[t] = true;
        }
        out.push(poly);
        if pack(pool, used, i + 1, need - 1, k, out) {
            return true;
        }
        out.pop();
        for &t in &idxs {
            used[t] = false;
        }
    }
    pack(pool, used, i + 1, need, k, out)
}

/// Products of degree `k` that use `pool[first]` and otherwise only unused
/// members after it.
fn compose(
    pool: &[Polynomial],
    used: &[bool],
    first: usize,
    k: usize,
    idxs: Vec<usize>,
    acc: Polynomial,
    out: &mut Vec<(Vec<usize>, Polynomial)>,
) {
    let deg = acc.degree().unwrap_or(0);
    if deg == k && !idxs.is_empty() {
        out.push((idxs, acc));
        return;
    }
    let start = match idxs.last() {
        None => first,
        Some(&last) => last + 1,
    };
    let candidates: Vec<usize> = if idxs.is_empty() {
        vec![first]
    } else {
        (start..pool.len()).filter(|&t| !used[t]).collect()
    };
    for t in candidates {
        let pd = pool[t].degree().unwrap();
        let mut power = pool[t].clone();
        let mut e = 1;
        while deg + e * pd <= k {
            let mut next = idxs.clone();
            next.push(t);
            compose(pool, used, first, k, next, acc.mul(&power).unwrap(), out);
            power = power.mul(&pool[t]).unwrap();
            e += 1;
        }
    }
}

/// A family of `m` linear MOCA of diameter `d`, validated square by square.
pub fn build_mols(field: &FieldSpec, d: usize, m: usize) -> Result<MocaFamily> {
    if d < 2 {
        return Err(Error::BadDiameter { got: d, min: 2 });
    }
    if m < 2 {
        return Err(Error::FamilyTooSmall(m));
    }
    let rules = coprime_polynomials(field, d - 1, m)?
        .iter()
        .map(|p| LocalRule::from_polynomial(p, d))
        .collect::<Result<Vec<_>>>()?;
    let family = MocaFamily::new(rules)?;
    family.validate_brute_force()?;
    Ok(family)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClass {
    pub output: Vec<Elem>,
    /// Sorted cell indices of the preimages of `output`.
    pub cells: Vec<usize>,
}

/// The partition of `[N²]` into preimage sets of every output block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClassSet {
    rule: LocalRule,
    classes: Vec<ParallelClass>,
}

impl ParallelClassSet {
    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    /// Classes ordered by `φ(y)`.
    pub fn classes(&self) -> &[ParallelClass] {
        &self.classes
    }

    pub fn class_of(&self, output: &[Elem]) -> Option<&ParallelClass> {
        self.classes.iter().find(|c| c.output == output)
    }
}

pub fn parallel_classes(rule: &LocalRule) -> Result<ParallelClassSet> {
    if !rule.is_bipermutive() {
        return Err(Error::NotBipermutive);
    }
    let codec = IndexCodec::new(rule.field(), rule.diameter())?;
    let classes = (1..=codec.order())
        .map(|i| {
            let output = codec.psi(i)?;
            let y = Configuration::from_vec(output.clone());
            let mut cells = preimages(rule, &y)?
                .iter()
                .map(|x| codec.cell_of(x))
                .collect::<Result<Vec<_>>>()?;
            cells.sort_unstable();
            Ok(ParallelClass { output, cells })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParallelClassSet {
        rule: rule.clone(),
        classes,
    })
}

fn format_set(cells: &[usize]) -> String {
    let inner: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Table with one row per output block `y (φ(y))` and one column per rule.
pub fn render_class_table(sets: &[ParallelClassSet]) -> String {
    let Some(first) = sets.first() else {
        return String::new();
    };
    let q = first.rule.q();
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("y".to_string())
        .chain(sets.iter().map(|s| format!("Π_{}", s.rule.label())))
        .collect()];
    for (i, class) in first.classes.iter().enumerate() {
        let mut row = vec![format!(
            "{} ({})",
            crate::gf::encode_digits(&class.output, q),
            i + 1
        )];
        row.extend(sets.iter().map(|s| format_set(&s.classes[i].cells)));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap())
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:<w$}", w = w))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

/// Largest rule-table space `q^{q^d}` the brute-force search will scan.
pub const SEARCH_BOUND: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Stop after the first family found.
    pub first_only: bool,
    /// Keep only families with at least one nonlinear member.
    pub require_nonlinear: bool,
}

/// Every bipermutive rule of diameter `d`, found by scanning all tables.
pub fn bipermutive_rules(field: &FieldSpec, d: usize) -> Result<Vec<LocalRule>> {
    let q = field.q() as u128;
    let rows = field.q().checked_pow(d as u32).unwrap_or(u32::MAX);
    let space = q.checked_pow(rows).unwrap_or(u128::MAX);
    if d < 2 || space > SEARCH_BOUND {
        return Err(Error::SearchInfeasible { q: field.q(), d });
    }
    let mut rules = Vec::new();
    for t in 0..space as usize {
        let table = word_from_value(t, rows as usize, field.q());
        let rule = LocalRule::from_table(field, d, table)?;
        if rule.is_bipermutive() {
            rules.push(rule);
        }
    }
    if field.q() == 2 {
        rules.sort_by_key(|r| r.wolfram_code().unwrap_or(0));
    }
    Ok(rules)
}

/// All families of `size` bipermutive rules whose Cayley tables are pairwise
/// orthogonal, in ascending rule order.
pub fn search_moca_bruteforce(
    field: &FieldSpec,
    d: usize,
    size: usize,
    opts: SearchOptions,
) -> Result<Vec<Vec<LocalRule>>> {
    let rules = bipermutive_rules(field, d)?;
    if size == 0 {
        return Ok(Vec::new());
    }
    let squares = rules.iter().map(cayley_table).collect::<Result<Vec<_>>>()?;
    let n = rules.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let o = are_orthogonal(&squares[i], &squares[j])?;
            adj[i][j] = o;
            adj[j][i] = o;
        }
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut stack = Vec::new();
    cliques(&adj, 0, size, &mut stack, &mut found, &rules, opts);
    Ok(found
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| rules[i].clone()).collect())
        .collect())
}

fn cliques(
    adj: &[Vec<bool>],
    from: usize,
    size: usize,
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    rules: &[LocalRule],
    opts: SearchOptions,
) {
    if opts.first_only && !found.is_empty() {
        return;
    }
    if stack.len() == size {
        if !opts.require_nonlinear || stack.iter().any(|&i| !rules[i].is_linear()) {
            found.push(stack.clone());
        }
        return;
    }
    for v in from..adj.len() {
        if stack.iter().all(|&u| adj[u][v]) {
            stack.push(v);
            cliques(adj, v + 1, size, stack, found, rules, opts);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn w(code: u128) -> LocalRule {
        LocalRule::from_wolfram(code, 3).unwrap()
    }

    fn poly(f: &FieldSpec, s: &str) -> Polynomial {
        Polynomial::parse(f, s).unwrap()
    }

    #[test]
    fn codec_examples() {
        let c = IndexCodec::new(&f2(), 3).unwrap();
        assert_eq!(c.phi(&[0, 0]), Ok(1));
        assert_eq!(c.phi(&[1, 0]), Ok(2));
        assert_eq!(c.phi(&[0, 1]), Ok(3));
        assert_eq!(c.phi(&[1, 1]), Ok(4));
        assert_eq!(c.pair(3, 4), Ok(12));
        assert_eq!(c.pair(1, 1), Ok(1));
        assert_eq!(c.unpair(12), Ok((3, 4)));
        assert_eq!(c.psi(5), Err(Error::IndexOutOfRange { index: 5, max: 4 }));
        assert_eq!(
            c.unpair(0),
            Err(Error::IndexOutOfRange { index: 0, max: 16 })
        );
        for i in 1..=4 {
            assert_eq!(c.phi(&c.psi(i).unwrap()), Ok(i));
        }
        for cell in 1..=16 {
            assert_eq!(c.cell_of(&c.config_of(cell).unwrap()), Ok(cell));
        }
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(
            cayley_table(&w(90)).unwrap().rows(),
            vec![
                vec![1, 2, 3, 4],
                vec![2, 1, 4, 3],
                vec![3, 4, 1, 2],
                vec![4, 3, 2, 1]
            ]
        );
        assert_eq!(
            cayley_table(&w(150)).unwrap().rows(),
            vec![
                vec![1, 4, 3, 2],
                vec![2, 3, 4, 1],
                vec![4, 1, 2, 3],
                vec![3, 2, 1, 4]
            ]
        );
        assert_eq!(cayley_table(&w(90)).unwrap().get(1, 2), 2);
        assert_eq!(cayley_table(&w(30)), Err(Error::NotBipermutive));
    }

    #[test]
    fn is_latin_examples() {
        let square90 = cayley_table(&w(90)).unwrap().rows();
        assert_eq!(is_latin(&square90), Ok(true));
        assert_eq!(is_latin(&vec![vec![1; 4]; 4]), Ok(false));
        assert_eq!(is_latin(&vec![vec![1, 2, 3, 4]; 4]), Ok(false));
        assert_eq!(
            is_latin(&[vec![1, 2], vec![2]]),
            Err(Error::MalformedMatrix)
        );
        assert_eq!(
            is_latin(&[vec![1, 3], vec![3, 1]]),
            Err(Error::MalformedMatrix)
        );
        assert_eq!(
            LatinSquare::from_rows(vec![vec![1, 1], vec![2, 2]]),
            Err(Error::NotLatin)
        );
    }

    #[test]
    fn orthogonality_examples() {
        let s90 = cayley_table(&w(90)).unwrap();
        let s150 = cayley_table(&w(150)).unwrap();
        assert_eq!(are_orthogonal(&s90, &s150), Ok(true));
        assert_eq!(are_orthogonal(&s90, &s90), Ok(false));
        assert_eq!(s90.transpose().rows(), s90.rows());
        assert_eq!(are_orthogonal(&s90, &s90.transpose()), Ok(false));
        let small = LatinSquare::from_rows(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(
            are_orthogonal(&s90, &small),
            Err(Error::OrderMismatch(4, 2))
        );
    }

    #[test]
    fn gcd_criterion_examples() {
        assert_eq!(orthogonal_by_gcd(&w(90), &w(150)), Ok(true));
        assert_eq!(orthogonal_by_gcd(&w(90), &w(90)), Ok(false));
        assert_eq!(orthogonal_by_gcd(&w(90), &w(165)), Err(Error::NotLinear));
    }

    #[test]
    fn build_mols_examples() {
        let f = f2();
        let fam = build_mols(&f, 3, 2).unwrap();
        let codes: Vec<u128> = fam
            .rules()
            .iter()
            .map(|r| r.wolfram_code().unwrap())
            .collect();
        assert_eq!(codes, vec![150, 90]);
        assert_eq!(
            build_mols(&f, 3, 3),
            Err(Error::FamilyTooLarge {
                requested: 3,
                max: 2
            })
        );
        let fam = build_mols(&f, 4, 3).unwrap();
        let polys: Vec<Polynomial> = fam
            .rules()
            .iter()
            .map(|r| r.associated_polynomial().unwrap())
            .collect();
        assert_eq!(
            polys,
            vec![poly(&f, "1011"), poly(&f, "1101"), poly(&f, "1111")]
        );
        assert_eq!(
            build_mols(&f, 1, 2),
            Err(Error::BadDiameter { got: 1, min: 2 })
        );
        assert_eq!(build_mols(&f, 3, 1), Err(Error::FamilyTooSmall(1)));
    }

    #[test]
    fn build_mols_needs_backtracking_for_degree_five() {
        // k = 5 over 𝔽_2: six irreducible quintics, (1+X)^5, and
        // (1+X+X²) times a cubic; 1+X+X² has no power of degree 5.
        let f = f2();
        assert_eq!(max_family_size(&f, 5), Ok(8));
        let fam = build_mols(&f, 6, 8).unwrap();
        let last = fam.rules()[7].associated_polynomial().unwrap();
        assert_eq!(last, poly(&f, "111").mul(&poly(&f, "1011")).unwrap());
    }

    #[test]
    fn build_mols_ternary() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(max_family_size(&f3, 2), Ok(5));
        let fam = build_mols(&f3, 3, 5).unwrap();
        assert_eq!(fam.len(), 5);
        assert!(fam.rules().iter().all(|r| r.is_bipermutive()));
        let f4 = FieldSpec::new(2, 2).unwrap();
        let fam = build_mols(&f4, 3, 4).unwrap();
        fam.validate_brute_force().unwrap();
    }

    #[test]
    fn max_family_size_examples() {
        let f = f2();
        assert_eq!(max_family_size(&f, 1), Ok(1));
        assert_eq!(max_family_size(&f, 2), Ok(2));
        assert_eq!(max_family_size(&f, 3), Ok(3));
        assert_eq!(max_family_size(&f, 4), Ok(5));
        assert_eq!(max_family_size_printed(&f, 2), Ok(3));
        assert_eq!(max_family_size(&f, 0), Err(Error::NonPositive(0)));
    }

    #[test]
    fn parallel_class_examples() {
        let p90 = parallel_classes(&w(90)).unwrap();
        let cells: Vec<Vec<usize>> = p90.classes().iter().map(|c| c.cells.clone()).collect();
        assert_eq!(
            cells,
            vec![
                vec![1, 6, 11, 16],
                vec![2, 5, 12, 15],
                vec![3, 8, 9, 14],
                vec![4, 7, 10, 13]
            ]
        );
        let p150 = parallel_classes(&w(150)).unwrap();
        let cells: Vec<Vec<usize>> = p150.classes().iter().map(|c| c.cells.clone()).collect();
        assert_eq!(
            cells,
            vec![
                vec![1, 8, 10, 15],
                vec![4, 5, 11, 14],
                vec![3, 6, 12, 13],
                vec![2, 7, 9, 16]
            ]
        );
        assert_eq!(p150.class_of(&[0, 1]).unwrap().cells, vec![3, 6, 12, 13]);
        for a in p90.classes() {
            for b in p150.classes() {
                let common = a.cells.iter().filter(|c| b.cells.contains(c)).count();
                assert!(common <= 1);
            }
        }
        assert_eq!(parallel_classes(&w(30)), Err(Error::NotBipermutive));
    }

    #[test]
    fn class_table_layout() {
        let table = render_class_table(&[
            parallel_classes(&w(90)).unwrap(),
            parallel_classes(&w(150)).unwrap(),
        ]);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("y"));
        assert!(lines[2].starts_with("10 (2)"));
        assert!(lines[2].contains("{2,5,12,15}") && lines[2].contains("{4,5,11,14}"));
    }

    #[test]
    fn search_examples() {
        let f = f2();
        let opts = SearchOptions::default();
        let codes = |fams: Vec<Vec<LocalRule>>| -> Vec<Vec<u128>> {
            fams.iter()
                .map(|fam| fam.iter().map(|r| r.wolfram_code().unwrap()).collect())
                .collect()
        };
        assert_eq!(
            codes(search_moca_bruteforce(&f, 3, 1, opts).unwrap()),
            vec![vec![90], vec![105], vec![150], vec![165]]
        );
        let pairs = codes(search_moca_bruteforce(&f, 3, 2, opts).unwrap());
        assert!(pairs.contains(&vec![90, 150]));
        assert!(search_moca_bruteforce(&f, 3, 5, opts).unwrap().is_empty());
        assert_eq!(
            search_moca_bruteforce(&f, 5, 2, opts),
            Err(Error::SearchInfeasible { q: 2, d: 5 })
        );
        let first = SearchOptions {
            first_only: true,
            ..opts
        };
        assert_eq!(search_moca_bruteforce(&f, 3, 2, first).unwrap().len(), 1);
    }
}
