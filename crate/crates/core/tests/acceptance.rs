//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed; exits non-zero on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;

use moca_core::ca::{word_from_value, word_value};
use moca_core::debruijn::{fusion, preimages, DeBruijnGraph};
use moca_core::latin::{
    are_orthogonal, bipermutive_rules, build_mols, cayley_table, max_family_size,
    max_family_size_printed, orthogonal_by_gcd, parallel_classes,
};
use moca_core::scheme::{
    anon_combine, anon_precompute, anon_setup_with_block, basic_recover, basic_recover_by_lookup,
    basic_setup_with_block, single_share_posterior, Secret,
};
use moca_core::{Configuration, Elem, FieldSpec, LocalRule, MocaFamily};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn cfg(field: &FieldSpec, s: &str) -> Configuration {
    Configuration::parse(field, s).unwrap()
}

fn word(s: &str) -> Vec<Elem> {
    s.bytes().map(|b| (b - b'0') as Elem).collect()
}

fn pair_family() -> MocaFamily {
    MocaFamily::new(vec![
        LocalRule::from_wolfram(90, 3).unwrap(),
        LocalRule::from_wolfram(150, 3).unwrap(),
    ])
    .unwrap()
}

fn rule150_edge_labels() -> Check {
    let rows = [
        ("00", "00", "000", 0),
        ("10", "00", "100", 1),
        ("01", "10", "010", 1),
        ("11", "10", "110", 0),
        ("00", "01", "001", 1),
        ("10", "01", "101", 0),
        ("01", "11", "011", 0),
        ("11", "11", "111", 1),
    ];
    let rule = LocalRule::from_wolfram(150, 3).map_err(|e| e.to_string())?;
    let graph = DeBruijnGraph::build(&rule);
    for (u, v, x, label) in rows {
        let (u, v) = (word(u), word(v));
        let fused = fusion(&u, &v).map_err(|e| e.to_string())?;
        ensure!(fused == word(x), "{u:?} ⊙ {v:?} = {fused:?}, expected {x}");
        let s = *v.last().unwrap();
        let (uv, vv) = (word_value(&u, 2), word_value(&v, 2));
        ensure!(
            graph.successor(uv, s) == vv,
            "successor of {u:?} by {s} is not {v:?}"
        );
        ensure!(
            rule.apply(&fused) == label,
            "f({x}) = {}, expected {label}",
            rule.apply(&fused)
        );
        ensure!(graph.label(uv, s) == label, "graph label of {x} differs");
    }
    Ok("rule 150 de Bruijn edge labels: 8/8 rows match".into())
}

fn squares_and_classes_90_150() -> Check {
    let sq90 = vec![
        vec![1, 2, 3, 4],
        vec![2, 1, 4, 3],
        vec![3, 4, 1, 2],
        vec![4, 3, 2, 1],
    ];
    let sq150 = vec![
        vec![1, 4, 3, 2],
        vec![2, 3, 4, 1],
        vec![4, 1, 2, 3],
        vec![3, 2, 1, 4],
    ];
    let pi90 = vec![
        vec![1, 6, 11, 16],
        vec![2, 5, 12, 15],
        vec![3, 8, 9, 14],
        vec![4, 7, 10, 13],
    ];
    let pi150 = vec![
        vec![1, 8, 10, 15],
        vec![4, 5, 11, 14],
        vec![3, 6, 12, 13],
        vec![2, 7, 9, 16],
    ];
    for (code, square, classes) in [(90, sq90, pi90), (150, sq150, pi150)] {
        let rule = LocalRule::from_wolfram(code, 3).unwrap();
        let got = cayley_table(&rule).map_err(|e| e.to_string())?.rows();
        ensure!(got == square, "Cayley table of {code}: {got:?}");
        let got: Vec<Vec<usize>> = parallel_classes(&rule)
            .map_err(|e| e.to_string())?
            .classes()
            .iter()
            .map(|c| c.cells.clone())
            .collect();
        ensure!(got == classes, "parallel classes of {code}: {got:?}");
    }
    Ok("Cayley tables of 90/150 and all 8 parallel-class sets match".into())
}

fn walkthrough() -> Check {
    let family = pair_family();
    let field = family.field().clone();
    let codec = family.codec();
    let cells = |xs: &[Configuration]| -> Vec<usize> {
        xs.iter().map(|x| codec.cell_of(x).unwrap()).collect()
    };
    let deal = anon_setup_with_block(&family, 1, &cfg(&field, "10")).map_err(|e| e.to_string())?;
    ensure!(
        cells(&deal.shares) == [2, 5, 12, 15],
        "shares {:?}",
        cells(&deal.shares)
    );

    let share = |cell| codec.config_of(cell).unwrap();
    let a1 = anon_precompute(&family, &share(2)).map_err(|e| e.to_string())?;
    let a3 = anon_precompute(&family, &share(12)).map_err(|e| e.to_string())?;
    let s1 = a1.cell_sets(&family).unwrap();
    let s3 = a3.cell_sets(&family).unwrap();
    ensure!(s1 == [vec![2, 5, 12, 15], vec![2, 7, 9, 16]], "A1 = {s1:?}");
    ensure!(
        s3 == [vec![2, 5, 12, 15], vec![3, 6, 12, 13]],
        "A3 = {s3:?}"
    );

    let rec = anon_combine(&a1, &a3, &family).map_err(|e| e.to_string())?;
    ensure!(
        cells(&rec.set) == [2, 5, 12, 15],
        "intersection {:?}",
        cells(&rec.set)
    );
    ensure!(
        rec.rule_index == 1,
        "recovered rule index {}",
        rec.rule_index
    );
    let code = family.rules()[rec.rule_index - 1].wolfram_code().unwrap();
    ensure!(code == 90, "recovered rule {code}");
    Ok("shares {2,5,12,15}; A1, A3 as expected; combine -> ({2,5,12,15}, rule 90)".into())
}

/// Every linear rule `a_1 x_1 + ... + a_d x_d` with `a_1, a_d ≠ 0`.
fn linear_bipermutive(field: &FieldSpec, d: usize) -> Vec<LocalRule> {
    let q = field.q();
    (0..(q as usize).pow(d as u32))
        .map(|v| word_from_value(v, d, q))
        .filter(|c| c[0] != 0 && c[d - 1] != 0)
        .map(|c| LocalRule::from_coefficients(field, &c).unwrap())
        .collect()
}

fn gcd_vs_bruteforce() -> Check {
    let mut report = Vec::new();
    for (q, d) in [(2u64, 3usize), (2, 4), (3, 3)] {
        let field = FieldSpec::prime(q).unwrap();
        let rules = linear_bipermutive(&field, d);
        let squares: Vec<_> = rules.iter().map(|r| cayley_table(r).unwrap()).collect();
        let mut pairs = 0;
        for (i, f) in rules.iter().enumerate() {
            for (j, g) in rules.iter().enumerate() {
                let by_gcd = orthogonal_by_gcd(f, g).map_err(|e| e.to_string())?;
                let brute = are_orthogonal(&squares[i], &squares[j]).unwrap();
                ensure!(
                    by_gcd == brute,
                    "q={q} d={d}: rules {} and {} disagree",
                    f.label(),
                    g.label()
                );
                pairs += 1;
            }
        }
        report.push(format!("(q={q},d={d}) {pairs} pairs"));
    }
    Ok(format!(
        "gcd criterion agrees with brute force, 0 disagreements: {}",
        report.join(", ")
    ))
}

/// GF(2) polynomials as bit masks, bit `i` = coefficient of `X^i`.
fn gf2_gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        while a != 0 && 31 - a.leading_zeros() >= 31 - b.leading_zeros() {
            a ^= b << ((31 - a.leading_zeros()) - (31 - b.leading_zeros()));
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn max_coprime_clique(polys: &[u32], from: usize, chosen: &mut Vec<u32>) -> usize {
    let mut best = chosen.len();
    for i in from..polys.len() {
        if chosen.iter().all(|&c| gf2_gcd(c, polys[i]) == 1) {
            chosen.push(polys[i]);
            best = best.max(max_coprime_clique(polys, i + 1, chosen));
            chosen.pop();
        }
    }
    best
}

fn family_size_formula() -> Check {
    let field = f2();
    let mut report = Vec::new();
    for k in 1..=4u32 {
        // degree k, constant term 1
        let polys: Vec<u32> = (0..1u32 << (k - 1))
            .map(|mid| (1 << k) | (mid << 1) | 1)
            .collect();
        let brute = max_coprime_clique(&polys, 0, &mut Vec::new()) as u64;
        let adjusted = max_family_size(&field, k as i64).map_err(|e| e.to_string())?;
        let printed = max_family_size_printed(&field, k as i64).map_err(|e| e.to_string())?;
        ensure!(
            adjusted == brute,
            "k={k}: formula {adjusted}, brute force {brute}"
        );
        report.push(format!(
            "k={k}: adjusted {adjusted} = brute {brute} (printed {printed})"
        ));
    }
    Ok(report.join("; "))
}

fn balancedness() -> Check {
    let field = f2();
    let mut total = 0;
    for d in [3usize, 4] {
        let k = d - 1;
        for rule in bipermutive_rules(&field, d).map_err(|e| e.to_string())? {
            // independent oracle: evaluate every input and group by output
            let mut groups: BTreeMap<Vec<Elem>, BTreeSet<Vec<Elem>>> = BTreeMap::new();
            for v in 0..1usize << (2 * k) {
                let x = Configuration::new(&field, word_from_value(v, 2 * k, 2)).unwrap();
                let y = rule.evaluate(&x).unwrap();
                groups
                    .entry(y.symbols().to_vec())
                    .or_default()
                    .insert(x.symbols().to_vec());
            }
            ensure!(
                groups.len() == 1 << k,
                "rule {} is not surjective",
                rule.label()
            );
            let mut seen = BTreeSet::new();
            for v in 0..1usize << k {
                let y = Configuration::new(&field, word_from_value(v, k, 2)).unwrap();
                let pre: BTreeSet<Vec<Elem>> = preimages(&rule, &y)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|x| x.symbols().to_vec())
                    .collect();
                ensure!(
                    pre.len() == 1 << k,
                    "rule {}: |F^-1({y:?})| = {}",
                    rule.label(),
                    pre.len()
                );
                ensure!(
                    groups[y.symbols()] == pre,
                    "rule {}: preimages of {y:?} differ",
                    rule.label()
                );
                ensure!(
                    seen.is_disjoint(&pre),
                    "rule {}: classes overlap",
                    rule.label()
                );
                seen.extend(pre);
            }
            ensure!(
                seen.len() == 1 << (2 * k),
                "rule {}: classes do not cover",
                rule.label()
            );
            total += 1;
        }
    }
    Ok(format!(
        "{total} bipermutive rules (d=3,4): every block has q^(d-1) preimages, classes partition"
    ))
}

fn round_trips() -> Check {
    let family = pair_family();
    let field = family.field().clone();
    let blocks: Vec<Configuration> = (0..4)
        .map(|v| Configuration::new(&field, word_from_value(v, 2, 2)).unwrap())
        .collect();

    let mut basic = 0;
    for s in &blocks {
        for r in &blocks {
            let deal = basic_setup_with_block(&family, s, r).map_err(|e| e.to_string())?;
            let (b1, b2) = (&deal.shares[0], &deal.shares[1]);
            let fwd = basic_recover(&family, 1, 2, b1, b2).map_err(|e| e.to_string())?;
            let rev = basic_recover(&family, 2, 1, b2, b1).map_err(|e| e.to_string())?;
            ensure!(
                fwd.secret == Secret::Block(s.clone()),
                "basic S={s:?} R={r:?}: {:?}",
                fwd.secret
            );
            ensure!(fwd == rev, "basic recovery depends on argument order");
            let lookup =
                basic_recover_by_lookup(&family, 1, 2, b1, b2).map_err(|e| e.to_string())?;
            ensure!(&lookup == s, "Latin-square lookup disagrees for S={s:?}");
            basic += 1;
        }
    }

    let mut anon = 0;
    for secret in 1..=family.len() {
        for r in &blocks {
            let deal = anon_setup_with_block(&family, secret, r).map_err(|e| e.to_string())?;
            let cands: Vec<_> = deal
                .shares
                .iter()
                .map(|b| anon_precompute(&family, b).unwrap())
                .collect();
            for i in 0..cands.len() {
                for j in i + 1..cands.len() {
                    let ab =
                        anon_combine(&cands[i], &cands[j], &family).map_err(|e| e.to_string())?;
                    let ba =
                        anon_combine(&cands[j], &cands[i], &family).map_err(|e| e.to_string())?;
                    ensure!(
                        ab.rule_index == secret,
                        "anon secret {secret}, players ({},{})",
                        i + 1,
                        j + 1
                    );
                    ensure!(ab == ba, "anon combine depends on argument order");
                    anon += 1;
                }
            }
        }
    }
    ensure!(basic == 16 && anon == 48, "case counts {basic}/{anon}");
    Ok(format!(
        "basic {basic}/16, anonymous {anon}/48, order-invariant"
    ))
}

fn perfectness() -> Check {
    let family = pair_family();
    let codec = family.codec();
    let m = family.len() as u64;
    for cell in 1..=codec.order().pow(2) {
        let share = codec.config_of(cell).unwrap();
        let post = single_share_posterior(&family, &share).map_err(|e| e.to_string())?;
        // independent tabulation straight from the deals
        let mut counts = vec![0u64; family.len()];
        for s in 1..=family.len() {
            for r in 0..4 {
                let block = Configuration::new(family.field(), word_from_value(r, 2, 2)).unwrap();
                if anon_setup_with_block(&family, s, &block)
                    .unwrap()
                    .shares
                    .contains(&share)
                {
                    counts[s - 1] += 1;
                }
            }
        }
        ensure!(counts == post.counts, "cell {cell}: tabulations differ");
        let total: u64 = counts.iter().sum();
        ensure!(
            total > 0 && counts.iter().all(|&c| c * m == total),
            "cell {cell}: posterior {counts:?}/{total} is not 1/{m} each"
        );
    }
    Ok("Pr(rule | share) = 1/2 exactly for all 16 shares".into())
}

fn complexity_scaling() -> Check {
    let cases = [(2u64, 3usize), (2, 4), (2, 5), (3, 3)];
    let mut ratios = Vec::new();
    for (q, d) in cases {
        let field = FieldSpec::prime(q).unwrap();
        let family = build_mols(&field, d, 2).map_err(|e| e.to_string())?;
        let codec = family.codec();
        let n = codec.order().pow(2);
        let mut total = 0u64;
        for cell in 1..=n {
            let share = codec.config_of(cell).unwrap();
            total += anon_precompute(&family, &share).unwrap().ops.rule_evals;
        }
        let mean = total as f64 / n as f64;
        let scale = (family.len() as f64) * (q as f64).powi(d as i32);
        ratios.push((q, d, mean, mean / scale));
    }
    let c = (ratios.iter().map(|r| r.3.ln()).sum::<f64>() / ratios.len() as f64).exp();
    let detail: Vec<String> = ratios
        .iter()
        .map(|(q, d, mean, r)| format!("(q={q},d={d}) {mean:.0} evals, ratio {r:.2}"))
        .collect();
    for &(q, d, _, r) in &ratios {
        ensure!(
            r >= c / 2.0 && r <= 2.0 * c,
            "(q={q},d={d}) ratio {r:.2} outside [{:.2}, {:.2}]",
            c / 2.0,
            2.0 * c
        );
    }
    Ok(format!("c = {c:.2}; {}", detail.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("de Bruijn labels of rule 150", rule150_edge_labels),
        (
            "Cayley tables and parallel classes of 90/150",
            squares_and_classes_90_150,
        ),
        ("anonymous walkthrough", walkthrough),
        ("gcd orthogonality vs brute force", gcd_vs_bruteforce),
        ("family-size formula vs brute force", family_size_formula),
        ("balancedness", balancedness),
        ("exhaustive round-trips", round_trips),
        ("single-share posterior", perfectness),
        ("operation-count scaling", complexity_scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
