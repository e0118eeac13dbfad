//! JSON documents exchanged between dealer, players and combiner.
//!
//! Every document carries `format_version`. Families carry a SHA-256 digest
//! of their canonical body; shares and candidate families carry the digest of
//! the family they were computed against so mismatched public parameters are
//! caught before any recovery is attempted.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ca::{Configuration, LocalRule};
use crate::error::{Error, Result};
use crate::gf::{decode_digits, FieldSpec};
use crate::latin::MocaFamily;
use crate::scheme::{AnonDeal, BasicDeal, CandidateFamily};

pub const FORMAT_VERSION: u32 = 1;

/// `{q, d, table}` with the table as a digit string in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub q: u32,
    pub d: usize,
    pub table: String,
}

impl RuleRecord {
    pub fn from_rule(rule: &LocalRule) -> Self {
        RuleRecord {
            q: rule.q(),
            d: rule.diameter(),
            table: rule.table_digits(),
        }
    }

    pub fn to_rule(&self) -> Result<LocalRule> {
        let field = FieldSpec::from_order(self.q as u64)?;
        LocalRule::from_table(&field, self.d, decode_digits(&self.table, self.q)?)
    }
}

#[derive(Serialize)]
struct FamilyBody<'a> {
    q: u32,
    d: usize,
    rules: &'a [RuleRecord],
}

fn digest_of(q: u32, d: usize, rules: &[RuleRecord]) -> String {
    let body = serde_json::to_string(&FamilyBody { q, d, rules }).expect("plain data serializes");
    hex::encode(Sha256::digest(body.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub format_version: u32,
    pub q: u32,
    pub d: usize,
    pub rules: Vec<RuleRecord>,
    pub digest: String,
}

impl FamilyDocument {
    pub fn from_family(family: &MocaFamily) -> Self {
        Self::from_rules(family.rules())
    }

    /// Document for an arbitrary rule list; nothing is validated.
    pub fn from_rules(rules: &[LocalRule]) -> Self {
        let records: Vec<RuleRecord> = rules.iter().map(RuleRecord::from_rule).collect();
        let (q, d) = rules.first().map_or((0, 0), |r| (r.q(), r.diameter()));
        FamilyDocument {
            format_version: FORMAT_VERSION,
            q,
            d,
            digest: digest_of(q, d, &records),
            rules: records,
        }
    }

    pub fn check_digest(&self) -> Result<()> {
        if digest_of(self.q, self.d, &self.rules) == self.digest {
            Ok(())
        } else {
            Err(Error::DigestMismatch)
        }
    }

    pub fn rules(&self) -> Result<Vec<LocalRule>> {
        self.check_version()?;
        self.check_digest()?;
        let rules = self
            .rules
            .iter()
            .map(RuleRecord::to_rule)
            .collect::<Result<Vec<_>>>()?;
        if rules
            .iter()
            .any(|r| r.q() != self.q || r.diameter() != self.d)
        {
            return Err(Error::RuleMismatch);
        }
        Ok(rules)
    }

    /// Parses, checks the digest and validates orthogonality.
    pub fn to_family(&self) -> Result<MocaFamily> {
        MocaFamily::new(self.rules()?)
    }

    fn check_version(&self) -> Result<()> {
        check_version(self.format_version)
    }
}

fn check_version(v: u32) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Format(format!("unsupported format_version {v}")))
    }
}

pub fn family_digest(family: &MocaFamily) -> String {
    FamilyDocument::from_family(family).digest
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Basic,
    Anon,
}

/// One player's share. Basic shares name the player (= rule position);
/// anonymous shares carry only the value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareDocument {
    pub format_version: u32,
    pub scheme: SchemeKind,
    pub q: u32,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<usize>,
    pub share: String,
    pub family_digest: String,
}

impl ShareDocument {
    pub fn basic(family: &MocaFamily, player: usize, share: &Configuration) -> Self {
        Self::new(family, SchemeKind::Basic, Some(player), share)
    }

    pub fn anon(family: &MocaFamily, share: &Configuration) -> Self {
        Self::new(family, SchemeKind::Anon, None, share)
    }

    fn new(
        family: &MocaFamily,
        scheme: SchemeKind,
        player: Option<usize>,
        share: &Configuration,
    ) -> Self {
        let q = family.field().q();
        ShareDocument {
            format_version: FORMAT_VERSION,
            scheme,
            q,
            d: family.diameter(),
            player,
            share: share.to_digits(q),
            family_digest: family_digest(family),
        }
    }

    /// The share value, after checking it belongs to `family`.
    pub fn share_for(&self, family: &MocaFamily) -> Result<Configuration> {
        check_version(self.format_version)?;
        if self.family_digest != family_digest(family) {
            return Err(Error::DigestMismatch);
        }
        Configuration::new(family.field(), decode_digits(&self.share, self.q)?)
    }
}

/// Dealer-only record of a deal. Holds the secret and `R`; never hand it to a player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DealerRecord {
    pub format_version: u32,
    pub dealer_private: bool,
    pub notice: String,
    pub scheme: SchemeKind,
    pub family_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret_index: Option<usize>,
    pub random_block: String,
    pub shares: Vec<String>,
}

const DEALER_NOTICE: &str = "DEALER PRIVATE: contains the secret and the random block R";

impl DealerRecord {
    pub fn basic(family: &MocaFamily, deal: &BasicDeal) -> Self {
        let q = family.field().q();
        DealerRecord {
            format_version: FORMAT_VERSION,
            dealer_private: true,
            notice: DEALER_NOTICE.into(),
            scheme: SchemeKind::Basic,
            family_digest: family_digest(family),
            secret: Some(deal.secret.to_digits(q)),
            secret_index: None,
            random_block: deal.random_block.to_digits(q),
            shares: deal.shares.iter().map(|s| s.to_digits(q)).collect(),
        }
    }

    pub fn anon(family: &MocaFamily, deal: &AnonDeal) -> Self {
        let q = family.field().q();
        DealerRecord {
            format_version: FORMAT_VERSION,
            dealer_private: true,
            notice: DEALER_NOTICE.into(),
            scheme: SchemeKind::Anon,
            family_digest: family_digest(family),
            secret: None,
            secret_index: Some(deal.secret_index),
            random_block: deal.random_block.to_digits(q),
            shares: deal.shares.iter().map(|s| s.to_digits(q)).collect(),
        }
    }
}

/// A player's candidate family as cell-index sets. The share itself is left
/// out, though anyone holding the sets can recompute it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDocument {
    pub format_version: u32,
    pub q: u32,
    pub d: usize,
    pub family_digest: String,
    pub sets: Vec<Vec<usize>>,
}

impl CandidateDocument {
    pub fn new(family: &MocaFamily, cand: &CandidateFamily) -> Result<Self> {
        Ok(CandidateDocument {
            format_version: FORMAT_VERSION,
            q: family.field().q(),
            d: family.diameter(),
            family_digest: family_digest(family),
            sets: cand.cell_sets(family)?,
        })
    }

    pub fn candidate_for(&self, family: &MocaFamily) -> Result<CandidateFamily> {
        check_version(self.format_version)?;
        if self.family_digest != family_digest(family) {
            return Err(Error::DigestMismatch);
        }
        CandidateFamily::from_cell_sets(family, &self.sets)
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
