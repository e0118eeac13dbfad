//! De Bruijn graphs of local rules, preimage enumeration and coupled-graph
//! reconstruction.
//!
//! Vertices are the words of `Σ^{d-1}`, numbered by their little-endian value.
//! The edge `u → v` exists when `v` drops the first symbol of `u` and appends
//! a new symbol `s`; its label is `f(u ⊙ v)`. With that numbering the fused
//! word `u ⊙ v` has table index `u + s·q^{d-1}`, so the label array is the
//! rule table itself.

use std::fmt::Write;

use crate::ca::{word_from_value, word_value, Configuration, LocalRule, OpCounter};
use crate::error::{Error, Result};
use crate::gf::{encode_digits, Elem, FieldSpec};

/// `u ⊙ v`: `u` extended by the rightmost symbol of `v`.
pub fn fusion(u: &[Elem], v: &[Elem]) -> Result<Vec<Elem>> {
    let overlap = u.len() == v.len() && !u.is_empty() && u[1..] == v[..v.len() - 1];
    if !overlap {
        return Err(Error::NoOverlap {
            u: u.to_vec(),
            v: v.to_vec(),
        });
    }
    let mut w = u.to_vec();
    w.push(*v.last().unwrap());
    Ok(w)
}

/// Sort key for configurations: cut into blocks of `d-1` cells, each block
/// read little-endian, blocks compared left to right. On `Σ^{2(d-1)}` this
/// orders configurations by their Cayley-table cell index.
pub fn canonical_key(x: &Configuration, q: u32, d: usize) -> Vec<usize> {
    x.symbols()
        .chunks(d - 1)
        .map(|block| word_value(block, q))
        .collect()
}

fn sort_canonical(xs: &mut [Configuration], q: u32, d: usize) {
    xs.sort_by_cached_key(|x| canonical_key(x, q, d));
}

#[derive(Clone)]
pub struct DeBruijnGraph {
    field: FieldSpec,
    d: usize,
    labels: Vec<Elem>,
}

/// A walk `v_0 → v_1 → ... → v_m` in a de Bruijn graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    q: u32,
    d: usize,
    vertices: Vec<usize>,
    labels: Vec<Elem>,
}

impl Path {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn labels(&self) -> &[Elem] {
        &self.labels
    }

    /// Fusion of consecutive vertices: length `m + d - 1`.
    pub fn input_word(&self) -> Configuration {
        let mut word = word_from_value(self.vertices[0], self.d - 1, self.q);
        for &v in &self.vertices[1..] {
            word.push((v / (self.q as usize).pow(self.d as u32 - 2)) as Elem);
        }
        Configuration::from_vec(word)
    }
}

impl DeBruijnGraph {
    pub fn build(rule: &LocalRule) -> Self {
        Self::build_counted(rule, &mut OpCounter::new())
    }

    /// Builds the labelled graph; every one of the `q^d` edges costs one rule evaluation.
    pub fn build_counted(rule: &LocalRule, ops: &mut OpCounter) -> Self {
        let labels: Vec<Elem> = (0..rule.table().len()).map(|t| rule.output(t)).collect();
        ops.rule_evals += labels.len() as u64;
        DeBruijnGraph {
            field: rule.field().clone(),
            d: rule.diameter(),
            labels,
        }
    }

    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        (self.field.q() as usize).pow(self.d as u32 - 1)
    }

    pub fn vertex_word(&self, v: usize) -> Vec<Elem> {
        word_from_value(v, self.d - 1, self.field.q())
    }

    /// Successor of `u` along the edge that appends symbol `s`.
    pub fn successor(&self, u: usize, s: Elem) -> usize {
        let q = self.field.q() as usize;
        u / q + s as usize * q.pow(self.d as u32 - 2)
    }

    pub fn label(&self, u: usize, s: Elem) -> Elem {
        self.labels[u + s as usize * self.vertex_count()]
    }

    /// `(successor, label)` for each of the `q` outgoing edges of `u`.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, Elem)> + '_ {
        self.field
            .elements()
            .map(move |s| (self.successor(u, s), self.label(u, s)))
    }

    /// `(predecessor, label)` for each of the `q` incoming edges of `v`.
    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, Elem)> + '_ {
        let q = self.field.q() as usize;
        let n = self.vertex_count();
        let shifted = v % (n / q);
        let last = (v / (n / q)) as Elem;
        self.field.elements().map(move |t| {
            let u = t as usize + q * shifted;
            (u, self.label(u, last))
        })
    }

    /// Edge list `"u v label"`, one edge per line, vertices in encoding order.
    pub fn edge_list(&self) -> String {
        let q = self.field.q();
        let mut out = String::new();
        for u in 0..self.vertex_count() {
            for (v, l) in self.out_edges(u) {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    encode_digits(&self.vertex_word(u), q),
                    encode_digits(&self.vertex_word(v), q),
                    encode_digits(&[l], q)
                );
            }
        }
        out
    }

    /// Follows from `start` the unique edge carrying each label in turn.
    /// Each step inspects all `q` outgoing labels.
    pub fn path_from(&self, start: usize, labels: &[Elem], ops: &mut OpCounter) -> Result<Path> {
        let mut vertices = Vec::with_capacity(labels.len() + 1);
        vertices.push(start);
        let mut u = start;
        for &want in labels {
            let mut next = None;
            for s in self.field.elements() {
                ops.rule_evals += 1;
                if self.label(u, s) == want {
                    if next.is_some() {
                        return Err(Error::NotBipermutive);
                    }
                    next = Some(self.successor(u, s));
                }
            }
            u = next.ok_or(Error::NotBipermutive)?;
            vertices.push(u);
        }
        Ok(Path {
            q: self.field.q(),
            d: self.d,
            vertices,
            labels: labels.to_vec(),
        })
    }

    /// All preimages of `y`: one labelled path per start vertex, sorted by
    /// [`canonical_key`]. Requires a rightmost-permutive labelling.
    pub fn preimages(&self, y: &Configuration, ops: &mut OpCounter) -> Result<Vec<Configuration>> {
        if y.is_empty() {
            return Err(Error::BlockLength {
                got: 0,
                expected: 1,
            });
        }
        for &s in y.symbols() {
            self.field.check(s)?;
        }
        let mut out = (0..self.vertex_count())
            .map(|v| Ok(self.path_from(v, y.symbols(), ops)?.input_word()))
            .collect::<Result<Vec<_>>>()?;
        sort_canonical(&mut out, self.field.q(), self.d);
        Ok(out)
    }
}

/// `F^{-1}(y)` for a bipermutive rule; exactly `q^{d-1}` configurations.
pub fn preimages(rule: &LocalRule, y: &Configuration) -> Result<Vec<Configuration>> {
    preimages_counted(rule, y, &mut OpCounter::new())
}

pub fn preimages_counted(
    rule: &LocalRule,
    y: &Configuration,
    ops: &mut OpCounter,
) -> Result<Vec<Configuration>> {
    if !rule.is_bipermutive() {
        return Err(Error::NotBipermutive);
    }
    DeBruijnGraph::build_counted(rule, ops).preimages(y, ops)
}

/// Reconstructs the unique `x ∈ Σ^{2(d-1)}` with `F_i(x) = b_i` and
/// `F_j(x) = b_j` by walking the coupled de Bruijn graph: every start vertex
/// follows its `rule_i` path and survives only if the `rule_j` labels match.
pub fn coupled_recover(
    rule_i: &LocalRule,
    rule_j: &LocalRule,
    b_i: &Configuration,
    b_j: &Configuration,
) -> Result<Configuration> {
    coupled_recover_counted(rule_i, rule_j, b_i, b_j, &mut OpCounter::new())
}

pub fn coupled_recover_counted(
    rule_i: &LocalRule,
    rule_j: &LocalRule,
    b_i: &Configuration,
    b_j: &Configuration,
    ops: &mut OpCounter,
) -> Result<Configuration> {
    if rule_i.field() != rule_j.field() || rule_i.diameter() != rule_j.diameter() {
        return Err(Error::RuleMismatch);
    }
    if !rule_i.is_bipermutive() || !rule_j.is_bipermutive() {
        return Err(Error::NotBipermutive);
    }
    let k = rule_i.diameter() - 1;
    for b in [b_i, b_j] {
        if b.len() != k {
            return Err(Error::BlockLength {
                got: b.len(),
                expected: k,
            });
        }
        for &s in b.symbols() {
            rule_i.field().check(s)?;
        }
    }
    let graph = DeBruijnGraph::build_counted(rule_i, ops);
    let mut survivors = Vec::new();
    for start in 0..graph.vertex_count() {
        let x = graph.path_from(start, b_i.symbols(), ops)?.input_word();
        if &rule_j.evaluate_counted(&x, ops)? == b_j {
            survivors.push(x);
        }
    }
    match survivors.len() {
        0 => Err(Error::NoSurvivor),
        1 => Ok(survivors.pop().unwrap()),
        n => Err(Error::MultipleSurvivors(n)),
    }
}
