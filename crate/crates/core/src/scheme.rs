//! The two threshold-2 sharing protocols built on a MOCA family.
//!
//! *Basic scheme.* The secret is a block `S ∈ Σ^{d-1}`. The dealer draws a
//! random block `R`, and player `i` receives `B_i = F_i(S || R)`. Two players
//! `i ≠ j` rebuild `S || R` on the coupled de Bruijn graph of `f_i` and `f_j`.
//!
//! *Anonymous scheme.* The secret is the index of one rule `f_S` of the
//! family. The dealer draws `R` and hands out the `q^{d-1}` preimages
//! `F_S^{-1}(R)`, one per player. Each player, on their own, evaluates every
//! rule on their share and computes the preimage set of the result. Any two
//! such candidate families have exactly one preimage set in common, and its
//! position names the secret rule. Nothing in recovery depends on which
//! player held which share.
//!
//! The intersection step is carried out by a combiner who sees both
//! candidate families in full. Whoever holds a candidate family can recover
//! its owner's share (it is the only configuration common to all of its sets),
//! so this step does not protect the shares from the other participant; a
//! private set intersection protocol would be needed for that.
//!
//! Randomness comes from a seeded ChaCha8 generator ([`dealer_rng`]); the
//! random block `R` is its only consumer, each symbol drawn uniformly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ca::{word_from_value, Configuration, OpCounter};
use crate::debruijn::{canonical_key, coupled_recover_counted, preimages, preimages_counted};
use crate::error::{Error, Result};
use crate::latin::MocaFamily;

pub type DealerRng = ChaCha8Rng;

pub fn dealer_rng(seed: u64) -> DealerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random block of `len` symbols.
pub fn random_block<R: Rng + ?Sized>(family: &MocaFamily, rng: &mut R) -> Configuration {
    let q = family.field().q();
    let symbols = (0..family.diameter() - 1)
        .map(|_| rng.gen_range(0..q))
        .collect();
    Configuration::from_vec(symbols)
}

fn check_block(family: &MocaFamily, block: &Configuration, len: usize) -> Result<()> {
    if block.len() != len {
        return Err(Error::BlockLength {
            got: block.len(),
            expected: len,
        });
    }
    for &s in block.symbols() {
        family.field().check(s)?;
    }
    Ok(())
}

fn check_rule_index(family: &MocaFamily, index: usize) -> Result<()> {
    if (1..=family.len()).contains(&index) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index,
            max: family.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicDeal {
    pub secret: Configuration,
    pub random_block: Configuration,
    /// `shares[i-1]` goes to player `i`.
    pub shares: Vec<Configuration>,
}

pub fn basic_setup<R: Rng + ?Sized>(
    family: &MocaFamily,
    secret: &Configuration,
    rng: &mut R,
) -> Result<BasicDeal> {
    check_block(family, secret, family.diameter() - 1)?;
    let r = random_block(family, rng);
    basic_setup_with_block(family, secret, &r)
}

/// Deal with a caller-chosen random block (reproducing fixed examples).
pub fn basic_setup_with_block(
    family: &MocaFamily,
    secret: &Configuration,
    random_block: &Configuration,
) -> Result<BasicDeal> {
    let k = family.diameter() - 1;
    check_block(family, secret, k)?;
    check_block(family, random_block, k)?;
    let x = secret.concat(random_block);
    let shares = family
        .rules()
        .iter()
        .map(|rule| rule.evaluate(&x))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasicDeal {
        secret: secret.clone(),
        random_block: random_block.clone(),
        shares,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Secret {
    Block(Configuration),
    /// 1-based position of the secret rule in the family.
    RuleIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryTranscript {
    /// Canonical text of the two inputs, sorted so that argument order is irrelevant.
    pub inputs: [String; 2],
    /// Cell indices of the intersection: the preimage set found in both
    /// candidate families, or the single reconstructed cell `S || R`.
    pub intersection: Vec<usize>,
    pub secret: Secret,
    pub ops: OpCounter,
}

fn sorted_pair(a: String, b: String) -> [String; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Rebuilds `S` from the shares of players `i` and `j` (1-based).
pub fn basic_recover(
    family: &MocaFamily,
    i: usize,
    j: usize,
    b_i: &Configuration,
    b_j: &Configuration,
) -> Result<RecoveryTranscript> {
    check_rule_index(family, i)?;
    check_rule_index(family, j)?;
    if i == j {
        return Err(Error::SameRuleIndex(i));
    }
    let k = family.diameter() - 1;
    check_block(family, b_i, k)?;
    check_block(family, b_j, k)?;
    let rules = family.rules();
    let mut ops = OpCounter::new();
    let x = coupled_recover_counted(&rules[i - 1], &rules[j - 1], b_i, b_j, &mut ops)?;
    let q = family.field().q();
    let (secret, _) = x.split_at(k);
    Ok(RecoveryTranscript {
        inputs: sorted_pair(
            format!("{}:{}", i, b_i.to_digits(q)),
            format!("{}:{}", j, b_j.to_digits(q)),
        ),
        intersection: vec![family.codec().cell_of(&x)?],
        secret: Secret::Block(secret),
        ops,
    })
}

/// Independent route: the unique cell `(r, c)` where square `i` holds
/// `φ(B_i)` and square `j` holds `φ(B_j)`; the secret is `ψ(r)`.
pub fn basic_recover_by_lookup(
    family: &MocaFamily,
    i: usize,
    j: usize,
    b_i: &Configuration,
    b_j: &Configuration,
) -> Result<Configuration> {
    check_rule_index(family, i)?;
    check_rule_index(family, j)?;
    let codec = family.codec();
    let (vi, vj) = (codec.phi(b_i.symbols())?, codec.phi(b_j.symbols())?);
    let (si, sj) = (&family.squares()[i - 1], &family.squares()[j - 1]);
    let n = codec.order();
    let hits: Vec<usize> = (1..=n)
        .flat_map(|r| (1..=n).map(move |c| (r, c)))
        .filter(|&(r, c)| si.get(r, c) == vi && sj.get(r, c) == vj)
        .map(|(r, _)| r)
        .collect();
    match hits.as_slice() {
        [] => Err(Error::NoSurvivor),
        [r] => Ok(Configuration::from_vec(codec.psi(*r)?)),
        more => Err(Error::MultipleSurvivors(more.len())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonDeal {
    /// 1-based index of the secret rule.
    pub secret_index: usize,
    pub random_block: Configuration,
    /// `F_S^{-1}(R)` in canonical order; `shares[i-1]` goes to player `i`.
    pub shares: Vec<Configuration>,
}

pub fn anon_setup<R: Rng + ?Sized>(
    family: &MocaFamily,
    secret_index: usize,
    rng: &mut R,
) -> Result<AnonDeal> {
    check_rule_index(family, secret_index)?;
    let r = random_block(family, rng);
    anon_setup_with_block(family, secret_index, &r)
}

pub fn anon_setup_with_block(
    family: &MocaFamily,
    secret_index: usize,
    random_block: &Configuration,
) -> Result<AnonDeal> {
    check_rule_index(family, secret_index)?;
    check_block(family, random_block, family.diameter() - 1)?;
    let shares = preimages(&family.rules()[secret_index - 1], random_block)?;
    Ok(AnonDeal {
        secret_index,
        random_block: random_block.clone(),
        shares,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRecord {
    /// 1-based rule position `k`.
    pub rule_index: usize,
    /// `y_k = F_k(B)`.
    pub output: Configuration,
    /// `A_k = F_k^{-1}(y_k)` in canonical order.
    pub set: Vec<Configuration>,
}

/// The per-rule preimage sets a player derives from their share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateFamily {
    pub records: Vec<CandidateRecord>,
    /// Rule evaluations spent building the family.
    pub ops: OpCounter,
}

impl CandidateFamily {
    /// Each set as sorted cell indices.
    pub fn cell_sets(&self, family: &MocaFamily) -> Result<Vec<Vec<usize>>> {
        let codec = family.codec();
        self.records
            .iter()
            .map(|rec| {
                let mut cells = rec
                    .set
                    .iter()
                    .map(|x| codec.cell_of(x))
                    .collect::<Result<Vec<_>>>()?;
                cells.sort_unstable();
                Ok(cells)
            })
            .collect()
    }

    /// Rebuilds a candidate family from its cell-index sets, as stored on disk.
    pub fn from_cell_sets(family: &MocaFamily, sets: &[Vec<usize>]) -> Result<Self> {
        if sets.len() != family.len() {
            return Err(Error::Format(format!(
                "candidate family has {} sets, the public family {} rules",
                sets.len(),
                family.len()
            )));
        }
        let codec = family.codec();
        let (q, d) = (family.field().q(), family.diameter());
        let n = codec.order();
        let mut records = Vec::with_capacity(sets.len());
        for (k, (rule, cells)) in family.rules().iter().zip(sets).enumerate() {
            if cells.len() != n {
                return Err(Error::Format(format!(
                    "set {} has {} cells, expected {n}",
                    k + 1,
                    cells.len()
                )));
            }
            let mut set = cells
                .iter()
                .map(|&c| codec.config_of(c))
                .collect::<Result<Vec<_>>>()?;
            set.sort_by_cached_key(|x| canonical_key(x, q, d));
            let output = rule.evaluate(&set[0])?;
            for x in &set[1..] {
                if rule.evaluate(x)? != output {
                    return Err(Error::Format(format!(
                        "set {} is not a preimage set of rule {}",
                        k + 1,
                        k + 1
                    )));
                }
            }
            records.push(CandidateRecord {
                rule_index: k + 1,
                output,
                set,
            });
        }
        Ok(CandidateFamily {
            records,
            ops: OpCounter::new(),
        })
    }

    /// The configuration common to every set. For an orthogonal family of at
    /// least two rules this is exactly the owner's share.
    pub fn common_configuration(&self) -> Option<Configuration> {
        let first = self.records.first()?;
        let common: Vec<&Configuration> = first
            .set
            .iter()
            .filter(|x| self.records[1..].iter().all(|r| r.set.contains(x)))
            .collect();
        match common.as_slice() {
            [x] => Some((*x).clone()),
            _ => None,
        }
    }
}

/// The non-interactive step: for every rule `k`, `y_k = F_k(B)` and
/// `A_k = F_k^{-1}(y_k)`.
pub fn anon_precompute(family: &MocaFamily, share: &Configuration) -> Result<CandidateFamily> {
    check_block(family, share, 2 * (family.diameter() - 1))?;
    let mut ops = OpCounter::new();
    let mut records = Vec::with_capacity(family.len());
    for (k, rule) in family.rules().iter().enumerate() {
        let output = rule.evaluate_counted(share, &mut ops)?;
        let set = preimages_counted(rule, &output, &mut ops)?;
        debug_assert!(set.contains(share));
        records.push(CandidateRecord {
            rule_index: k + 1,
            output,
            set,
        });
    }
    Ok(CandidateFamily { records, ops })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonRecovery {
    pub set: Vec<Configuration>,
    pub rule_index: usize,
    pub transcript: RecoveryTranscript,
}

/// The interactive step: intersect the two families as sets of preimage sets.
/// The unique common set is `F_S^{-1}(R)` and its position is `S`.
pub fn anon_combine(
    a: &CandidateFamily,
    b: &CandidateFamily,
    family: &MocaFamily,
) -> Result<AnonRecovery> {
    for cand in [a, b] {
        if cand.records.len() != family.len() {
            return Err(Error::RuleMismatch);
        }
    }
    let sets_a = a.cell_sets(family)?;
    let sets_b = b.cell_sets(family)?;
    if sets_a == sets_b {
        return Err(Error::SameShare);
    }
    let mut common = Vec::new();
    for (ka, sa) in sets_a.iter().enumerate() {
        for (kb, sb) in sets_b.iter().enumerate() {
            if sa == sb {
                common.push((ka, kb));
            }
        }
    }
    let (ka, kb) = match common.as_slice() {
        [] => return Err(Error::EmptyIntersection),
        [one] => *one,
        more => return Err(Error::AmbiguousIntersection(more.len())),
    };
    if ka != kb {
        // one preimage set claimed by two different rules
        return Err(Error::AmbiguousIntersection(2));
    }
    let render = |sets: &Vec<Vec<usize>>| format!("{sets:?}");
    let mut ops = a.ops;
    ops.rule_evals += b.ops.rule_evals;
    Ok(AnonRecovery {
        set: a.records[ka].set.clone(),
        rule_index: ka + 1,
        transcript: RecoveryTranscript {
            inputs: sorted_pair(render(&sets_a), render(&sets_b)),
            intersection: sets_a[ka].clone(),
            secret: Secret::RuleIndex(ka + 1),
            ops,
        },
    })
}

/// `|{R : B ∈ F_k^{-1}(R)}|`, by scanning every output block.
pub fn consistency_count(family: &MocaFamily, k: usize, share: &Configuration) -> Result<usize> {
    check_rule_index(family, k)?;
    let len = family.diameter() - 1;
    check_block(family, share, 2 * len)?;
    let q = family.field().q();
    let rule = &family.rules()[k - 1];
    let mut count = 0;
    for r in 0..(q as usize).pow(len as u32) {
        let block = Configuration::from_vec(word_from_value(r, len, q));
        if preimages(rule, &block)?.contains(share) {
            count += 1;
        }
    }
    Ok(count)
}

/// Joint counts over every anonymous deal `(S, R)`, with `S` and `R` uniform,
/// in which `share` is handed out. `counts[S-1] / total` is `Pr(S | share)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posterior {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Posterior {
    /// Exact check that every secret has probability `1/m`.
    pub fn is_uniform(&self) -> bool {
        let m = self.counts.len() as u64;
        self.total > 0 && self.counts.iter().all(|&c| c * m == self.total)
    }
}

pub fn single_share_posterior(family: &MocaFamily, share: &Configuration) -> Result<Posterior> {
    let len = family.diameter() - 1;
    check_block(family, share, 2 * len)?;
    let q = family.field().q();
    let mut counts = vec![0u64; family.len()];
    for s in 1..=family.len() {
        for r in 0..(q as usize).pow(len as u32) {
            let block = Configuration::from_vec(word_from_value(r, len, q));
            let deal = anon_setup_with_block(family, s, &block)?;
            if deal.shares.contains(share) {
                counts[s - 1] += 1;
            }
        }
    }
    let total = counts.iter().sum();
    Ok(Posterior { counts, total })
}

/// `log|share space| / log|secret space|` for the anonymous scheme,
/// `log q^{2(d-1)} / log m`. Reported as a diagnostic only.
pub fn information_ratio(family: &MocaFamily) -> f64 {
    let q = family.field().q() as f64;
    let k = (family.diameter() - 1) as f64;
    (2.0 * k * q.ln()) / (family.len() as f64).ln()
}
