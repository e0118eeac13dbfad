//! `moca`: build MOCA families, deal shares and recover secrets.
//!
//! Exit status: 0 on success, 1 when validation or recovery fails, 2 on
//! usage errors (reported by clap).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use moca_core::ca::word_from_value;
use moca_core::debruijn::DeBruijnGraph;
use moca_core::formats::{
    from_json, to_json, CandidateDocument, DealerRecord, FamilyDocument, SchemeKind, ShareDocument,
};
use moca_core::gf::decode_digits;
use moca_core::latin::{
    build_mols, cayley_table, max_family_size, max_family_size_printed, parallel_classes,
    render_class_table, search_moca_bruteforce, SearchOptions,
};
use moca_core::scheme::{
    anon_combine, anon_precompute, anon_setup, anon_setup_with_block, basic_recover, basic_setup,
    basic_setup_with_block, dealer_rng, CandidateFamily, Secret,
};
use moca_core::{Configuration, FieldSpec, LocalRule, MocaFamily};

/// Largest number of recoveries `simulate` will run.
const SIMULATION_BOUND: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "moca",
    version,
    about = "Threshold-2 secret sharing with orthogonal cellular automata"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Field characteristic p.
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,
    /// Extension degree m; the alphabet is the field of order p^m.
    #[arg(long = "m-ext", global = true, default_value_t = 1)]
    m_ext: i64,
    /// Rule diameter.
    #[arg(long, global = true, default_value_t = 3)]
    d: usize,
    /// Seed of the dealer's random generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (mols build, precompute) or directory (deal).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Basic,
    Anon,
}

#[derive(Subcommand)]
enum Command {
    /// Build, check or print MOCA families.
    #[command(subcommand)]
    Mols(MolsCmd),
    /// Deal shares of a secret.
    #[command(subcommand)]
    Deal(DealCmd),
    /// Compute the candidate family of an anonymous share.
    Precompute {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        share: PathBuf,
    },
    /// Recover a secret from two shares.
    Recover {
        #[arg(value_enum)]
        scheme: Scheme,
        #[arg(long)]
        family: PathBuf,
        /// Share (or, for anon, candidate family) file; given exactly twice.
        #[arg(long = "share", num_args = 1, required = true)]
        shares: Vec<PathBuf>,
    },
    /// Deal and recover repeatedly, checking every recovery.
    Simulate {
        #[arg(long, value_enum, default_value_t = Scheme::Anon)]
        scheme: Scheme,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Sweep every deal and player pair instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Family size.
        #[arg(long, default_value_t = 2)]
        count: usize,
    },
    /// Brute-force census of orthogonal families of bipermutive rules.
    Search {
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Keep only families with at least one nonlinear rule.
        #[arg(long)]
        nonlinear: bool,
        #[arg(long = "first-only")]
        first_only: bool,
    },
}

#[derive(Subcommand)]
enum MolsCmd {
    /// Construct a linear family and report the size bound.
    Build {
        /// Family size; defaults to the maximum.
        #[arg(long, conflicts_with = "rules")]
        count: Option<usize>,
        /// Use these rules (Wolfram code or table digits) instead of the
        /// linear construction; the family is validated by brute force.
        #[arg(long = "rule")]
        rules: Vec<String>,
    },
    /// Re-validate a family file.
    Check {
        #[arg(long)]
        family: PathBuf,
    },
    /// Render Cayley tables and parallel classes.
    Print {
        /// Wolfram code (binary) or table digit string; repeatable.
        #[arg(long = "rule", conflicts_with = "family")]
        rules: Vec<String>,
        #[arg(long)]
        family: Option<PathBuf>,
        /// Also list the labelled de Bruijn edges.
        #[arg(long)]
        edges: bool,
    },
}

#[derive(Subcommand)]
enum DealCmd {
    Basic {
        #[arg(long)]
        family: PathBuf,
        /// Secret block of d-1 digits.
        #[arg(long)]
        secret: String,
        #[command(flatten)]
        testing: Testing,
    },
    Anon {
        #[arg(long)]
        family: PathBuf,
        /// 1-based position of the secret rule.
        #[arg(long = "secret-index")]
        secret_index: usize,
        #[command(flatten)]
        testing: Testing,
    },
}

#[derive(Args)]
struct Testing {
    /// Enable test hooks.
    #[arg(long)]
    testing: bool,
    /// Use this random block instead of drawing one (needs --testing).
    #[arg(long = "force-r", requires = "testing")]
    force_r: Option<String>,
}

/// A command's result in both renderings.
struct Report {
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.global.format {
                Format::Text => print!("{}", report.text),
                Format::Json => print!("{}", to_json(&report.json)),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Mols(MolsCmd::Build { count, rules }) => mols_build(g, *count, rules),
        Command::Mols(MolsCmd::Check { family }) => mols_check(family),
        Command::Mols(MolsCmd::Print {
            rules,
            family,
            edges,
        }) => mols_print(g, rules, family.as_deref(), *edges),
        Command::Deal(DealCmd::Basic {
            family,
            secret,
            testing,
        }) => deal(g, family, DealSecret::Block(secret), testing),
        Command::Deal(DealCmd::Anon {
            family,
            secret_index,
            testing,
        }) => deal(g, family, DealSecret::Index(*secret_index), testing),
        Command::Precompute { family, share } => precompute(g, family, share),
        Command::Recover {
            scheme,
            family,
            shares,
        } => recover(*scheme, family, shares),
        Command::Simulate {
            scheme,
            trials,
            exhaustive,
            count,
        } => simulate(g, *scheme, *trials, *exhaustive, *count),
        Command::Search {
            size,
            nonlinear,
            first_only,
        } => search(g, *size, *nonlinear, *first_only),
    }
}

fn usage_error(msg: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
        .exit()
}

fn field(g: &Global) -> Result<FieldSpec> {
    Ok(FieldSpec::new(g.q, g.m_ext)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_family(path: &Path) -> Result<MocaFamily> {
    let doc: FamilyDocument = from_json(&read(path)?)?;
    doc.to_family()
        .with_context(|| format!("family {}", path.display()))
}

fn labels(rules: &[LocalRule]) -> Vec<String> {
    rules.iter().map(LocalRule::label).collect()
}

fn set_text(cells: &[usize]) -> String {
    let inner: Vec<String> = cells.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn mols_build(g: &Global, count: Option<usize>, rules: &[String]) -> Result<Report> {
    let field = field(g)?;
    if g.d < 2 {
        bail!("diameter must be at least 2");
    }
    let k = (g.d - 1) as i64;
    let max = max_family_size(&field, k)?;
    let printed = max_family_size_printed(&field, k)?;
    let family = if rules.is_empty() {
        build_mols(&field, g.d, count.unwrap_or(max as usize))?
    } else {
        let rules = rules
            .iter()
            .map(|r| parse_rule(&field, g.d, r))
            .collect::<Result<Vec<_>>>()?;
        let family = MocaFamily::new(rules)?;
        family.validate_brute_force()?;
        family
    };
    let doc = FamilyDocument::from_family(&family);
    if let Some(out) = &g.out {
        write(out, &to_json(&doc))?;
    }
    let names = labels(family.rules());
    let text = format!(
        "max family size: {max}\nprinted-formula value: {printed}\nfamily: {}\ndigest: {}\n",
        names.join(" "),
        doc.digest
    );
    let json = json!({
        "max_family_size": max,
        "max_family_size_printed": printed,
        "rules": names,
        "digest": doc.digest,
    });
    Ok(Report { text, json })
}

fn mols_check(path: &Path) -> Result<Report> {
    let family = load_family(path)?;
    family.validate_brute_force()?;
    let n = family.len();
    Ok(Report {
        text: format!(
            "ok: {n} rules, all squares Latin, all {} pairs orthogonal\n",
            n * (n - 1) / 2
        ),
        json: json!({ "ok": true, "rules": labels(family.rules()) }),
    })
}

fn parse_rule(field: &FieldSpec, d: usize, text: &str) -> Result<LocalRule> {
    if field.q() == 2 && d <= 4 {
        if let Ok(code) = text.parse::<u128>() {
            return Ok(LocalRule::from_wolfram(code, d)?);
        }
    }
    Ok(LocalRule::from_table(
        field,
        d,
        decode_digits(text, field.q())?,
    )?)
}

fn mols_print(g: &Global, rules: &[String], family: Option<&Path>, edges: bool) -> Result<Report> {
    let rules: Vec<LocalRule> = match family {
        Some(path) => load_family(path)?.rules().to_vec(),
        None if rules.is_empty() => usage_error("give --rule or --family"),
        None => {
            let field = field(g)?;
            rules
                .iter()
                .map(|r| parse_rule(&field, g.d, r))
                .collect::<Result<_>>()?
        }
    };
    let mut text = String::new();
    let mut squares = Vec::new();
    let mut classes = Vec::new();
    for rule in &rules {
        let square = cayley_table(rule)?;
        text.push_str(&format!("C_{}\n{}\n", rule.label(), square.render()));
        if edges {
            text.push_str(&format!(
                "edges of {} (u v label)\n{}\n",
                rule.label(),
                DeBruijnGraph::build(rule).edge_list()
            ));
        }
        squares.push(square.rows());
        classes.push(parallel_classes(rule)?);
    }
    text.push_str(&render_class_table(&classes));
    let json = json!({
        "rules": labels(&rules),
        "squares": squares,
        "classes": classes
            .iter()
            .map(|set| set.classes().iter().map(|c| c.cells.clone()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    Ok(Report { text, json })
}

enum DealSecret<'a> {
    Block(&'a str),
    Index(usize),
}

fn deal(g: &Global, family_path: &Path, secret: DealSecret, testing: &Testing) -> Result<Report> {
    let Some(out) = &g.out else {
        usage_error("deal needs --out <DIR>");
    };
    let family = load_family(family_path)?;
    let field = family.field().clone();
    let forced = testing
        .force_r
        .as_deref()
        .map(|r| Configuration::parse(&field, r))
        .transpose()?;
    let mut rng = dealer_rng(g.seed);
    let (kind, shares, record) = match secret {
        DealSecret::Block(s) => {
            let s = Configuration::parse(&field, s)?;
            let deal = match &forced {
                Some(r) => basic_setup_with_block(&family, &s, r)?,
                None => basic_setup(&family, &s, &mut rng)?,
            };
            let docs: Vec<ShareDocument> = deal
                .shares
                .iter()
                .enumerate()
                .map(|(i, b)| ShareDocument::basic(&family, i + 1, b))
                .collect();
            (SchemeKind::Basic, docs, DealerRecord::basic(&family, &deal))
        }
        DealSecret::Index(k) => {
            let deal = match &forced {
                Some(r) => anon_setup_with_block(&family, k, r)?,
                None => anon_setup(&family, k, &mut rng)?,
            };
            let docs = deal
                .shares
                .iter()
                .map(|b| ShareDocument::anon(&family, b))
                .collect();
            (SchemeKind::Anon, docs, DealerRecord::anon(&family, &deal))
        }
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let codec = family.codec();
    let mut text = String::new();
    let mut listed = Vec::new();
    for (i, doc) in shares.iter().enumerate() {
        let name = format!("share-{}.json", i + 1);
        write(&out.join(&name), &to_json(doc))?;
        let value = doc.share_for(&family)?;
        let line = match kind {
            SchemeKind::Basic => format!(
                "player {}: {} (φ = {})",
                i + 1,
                doc.share,
                codec.phi(value.symbols())?
            ),
            SchemeKind::Anon => format!(
                "player {}: {} (cell {})",
                i + 1,
                doc.share,
                codec.cell_of(&value)?
            ),
        };
        text.push_str(&line);
        text.push('\n');
        listed.push(json!({ "file": name, "share": doc.share }));
    }
    write(&out.join("dealer.json"), &to_json(&record))?;
    text.push_str("dealer record: dealer.json (DEALER PRIVATE)\n");
    Ok(Report {
        text,
        json: json!({ "scheme": kind, "shares": listed, "dealer_record": "dealer.json" }),
    })
}

fn precompute(g: &Global, family_path: &Path, share_path: &Path) -> Result<Report> {
    let family = load_family(family_path)?;
    let share: ShareDocument = from_json(&read(share_path)?)?;
    let cand = anon_precompute(&family, &share.share_for(&family)?)?;
    let doc = CandidateDocument::new(&family, &cand)?;
    if let Some(out) = &g.out {
        write(out, &to_json(&doc))?;
    }
    let sets: Vec<String> = doc.sets.iter().map(|s| set_text(s)).collect();
    Ok(Report {
        text: format!(
            "candidate family: {{{}}}\nops: {}\n",
            sets.join(", "),
            cand.ops.rule_evals
        ),
        json: json!({ "sets": doc.sets, "ops": cand.ops.rule_evals }),
    })
}

/// Either a share (precomputed here) or an already computed candidate family.
fn load_candidate(family: &MocaFamily, path: &Path) -> Result<CandidateFamily> {
    let text = read(path)?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("sets").is_some() {
        let doc: CandidateDocument = from_json(&text)?;
        Ok(doc.candidate_for(family)?)
    } else {
        let doc: ShareDocument = from_json(&text)?;
        Ok(anon_precompute(family, &doc.share_for(family)?)?)
    }
}

fn recover(scheme: Scheme, family_path: &Path, paths: &[PathBuf]) -> Result<Report> {
    let [a, b] = paths else {
        usage_error("recover needs exactly two --share files");
    };
    let family = load_family(family_path)?;
    let q = family.field().q();
    match scheme {
        Scheme::Basic => {
            let docs = [a, b].map(|p| -> Result<ShareDocument> { Ok(from_json(&read(p)?)?) });
            let [da, db] = docs;
            let (da, db) = (da?, db?);
            let (Some(i), Some(j)) = (da.player, db.player) else {
                bail!("basic recovery needs player numbers in both share files");
            };
            let (x, y) = (da.share_for(&family)?, db.share_for(&family)?);
            // order-independent: always recover with the smaller player first
            let t = if i <= j {
                basic_recover(&family, i, j, &x, &y)?
            } else {
                basic_recover(&family, j, i, &y, &x)?
            };
            let Secret::Block(s) = &t.secret else {
                unreachable!()
            };
            Ok(Report {
                text: format!(
                    "secret: {}; cell {}\nops: {}\n",
                    s.to_digits(q),
                    t.intersection[0],
                    t.ops.rule_evals
                ),
                json: json!({ "secret": s.to_digits(q), "cell": t.intersection[0], "ops": t.ops.rule_evals }),
            })
        }
        Scheme::Anon => {
            let ca = load_candidate(&family, a)?;
            let cb = load_candidate(&family, b)?;
            let rec = anon_combine(&ca, &cb, &family)?;
            let label = family.rules()[rec.rule_index - 1].label();
            let cells = &rec.transcript.intersection;
            Ok(Report {
                text: format!(
                    "secret rule: {label} (index {}); intersection {}\nops: {}\n",
                    rec.rule_index,
                    set_text(cells),
                    rec.transcript.ops.rule_evals
                ),
                json: json!({
                    "secret_rule": label,
                    "secret_index": rec.rule_index,
                    "intersection": cells,
                    "ops": rec.transcript.ops.rule_evals,
                }),
            })
        }
    }
}

struct Tally {
    cases: u64,
    successes: u64,
    ops: u64,
}

impl Tally {
    fn record(&mut self, ok: bool, ops: u64) {
        self.cases += 1;
        self.successes += ok as u64;
        self.ops += ops;
    }
}

fn simulate(
    g: &Global,
    scheme: Scheme,
    trials: u64,
    exhaustive: bool,
    count: usize,
) -> Result<Report> {
    let field = field(g)?;
    let family = build_mols(&field, g.d, count)?;
    let q = field.q();
    let len = g.d - 1;
    let blocks = (q as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
    let m = family.len() as u64;
    let planned = match (exhaustive, scheme) {
        (false, _) => trials,
        (true, Scheme::Basic) => blocks
            .saturating_mul(blocks)
            .saturating_mul(m * (m - 1) / 2),
        (true, Scheme::Anon) => m
            .saturating_mul(blocks)
            .saturating_mul(blocks * (blocks - 1) / 2),
    };
    if planned > SIMULATION_BOUND {
        bail!("{planned} recoveries exceed the simulation bound {SIMULATION_BOUND}");
    }
    let block = |v: u64| Configuration::new(&field, word_from_value(v as usize, len, q));
    let mut tally = Tally {
        cases: 0,
        successes: 0,
        ops: 0,
    };
    let mut rng = dealer_rng(g.seed);
    let n = family.len();
    match (exhaustive, scheme) {
        (true, Scheme::Basic) => {
            for s in 0..blocks {
                for r in 0..blocks {
                    let s = block(s)?;
                    let deal = basic_setup_with_block(&family, &s, &block(r)?)?;
                    for i in 1..=n {
                        for j in i + 1..=n {
                            let t = basic_recover(
                                &family,
                                i,
                                j,
                                &deal.shares[i - 1],
                                &deal.shares[j - 1],
                            )?;
                            tally.record(t.secret == Secret::Block(s.clone()), t.ops.rule_evals);
                        }
                    }
                }
            }
        }
        (true, Scheme::Anon) => {
            for secret in 1..=n {
                for r in 0..blocks {
                    let deal = anon_setup_with_block(&family, secret, &block(r)?)?;
                    let cands = deal
                        .shares
                        .iter()
                        .map(|b| anon_precompute(&family, b))
                        .collect::<moca_core::Result<Vec<_>>>()?;
                    for i in 0..cands.len() {
                        for j in i + 1..cands.len() {
                            let rec = anon_combine(&cands[i], &cands[j], &family)?;
                            tally.record(rec.rule_index == secret, rec.transcript.ops.rule_evals);
                        }
                    }
                }
            }
        }
        (false, Scheme::Basic) => {
            for _ in 0..trials {
                let s = block(rng.gen_range(0..blocks))?;
                let deal = basic_setup(&family, &s, &mut rng)?;
                let (i, j) = distinct_pair(&mut rng, n);
                let t = basic_recover(&family, i + 1, j + 1, &deal.shares[i], &deal.shares[j])?;
                tally.record(t.secret == Secret::Block(s), t.ops.rule_evals);
            }
        }
        (false, Scheme::Anon) => {
            for _ in 0..trials {
                let secret = rng.gen_range(1..=n);
                let deal = anon_setup(&family, secret, &mut rng)?;
                let (i, j) = distinct_pair(&mut rng, deal.shares.len());
                let ca = anon_precompute(&family, &deal.shares[i])?;
                let cb = anon_precompute(&family, &deal.shares[j])?;
                let rec = anon_combine(&ca, &cb, &family)?;
                tally.record(rec.rule_index == secret, rec.transcript.ops.rule_evals);
            }
        }
    }
    let scheme_name = match scheme {
        Scheme::Basic => "basic",
        Scheme::Anon => "anon",
    };
    let mean = (tally.cases > 0).then(|| tally.ops as f64 / tally.cases as f64);
    let mut text = format!(
        "scheme: {scheme_name}\nfamily: {}\nsuccesses: {}/{}\n",
        labels(family.rules()).join(" "),
        tally.successes,
        tally.cases
    );
    if let Some(mean) = mean {
        text.push_str(&format!("mean ops: {mean:.2}\n"));
    }
    let json = json!({
        "scheme": scheme_name,
        "rules": labels(family.rules()),
        "cases": tally.cases,
        "successes": tally.successes,
        "mean_ops": mean,
    });
    if tally.successes != tally.cases {
        bail!(
            "{} of {} recoveries failed\n{text}",
            tally.cases - tally.successes,
            tally.cases
        );
    }
    Ok(Report { text, json })
}

fn distinct_pair(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    (i, j)
}

fn search(g: &Global, size: usize, nonlinear: bool, first_only: bool) -> Result<Report> {
    let field = field(g)?;
    let opts = SearchOptions {
        first_only,
        require_nonlinear: nonlinear,
    };
    let families = search_moca_bruteforce(&field, g.d, size, opts)?;
    let rendered: Vec<Vec<String>> = families.iter().map(|f| labels(f)).collect();
    let mut text = String::new();
    for f in &rendered {
        text.push_str(&format!("{{{}}}\n", f.join(", ")));
    }
    text.push_str(&format!("families: {}\n", rendered.len()));
    Ok(Report {
        text,
        json: json!({ "size": size, "families": rendered }),
    })
}
