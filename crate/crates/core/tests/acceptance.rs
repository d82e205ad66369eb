//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact. Each criterion also has a wall-clock limit; a
//! criterion that runs over it fails. The process exits non-zero when a
//! criterion fails for any reason other than the documented size deviations
//! listed in `KNOWN_SIZE_DEVIATIONS`.

use qmut::canon::canonical_form;
use qmut::explore::{explore, ClassReport, ExploreBudget, Verdict};
use qmut::series::{self, Family, VanishingCase};
use qmut::tables::{self, ClassEntry, CLASSES};
use qmut::{
    acute_sign_flip, classify_rank3, initial_realization, mutate_realization, verify_class_realization, AngleLabel, CanonicalKey,
    CycloReal, Quiver,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

/// Class sizes that the computation does not reproduce: (class, published, computed).
/// Criterion 1 is reported as failing; the exit status tolerates exactly these values.
const KNOWN_SIZE_DEVIATIONS: [(&str, usize, usize); 2] = [("H~4", 524, 504), ("H4^(1,1)", 179, 180)];

const SAMPLES: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure confined to the known size deviations.
    known_deviation: bool,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into(), known_deviation: false }
    }
}

fn l(n: i64, d: i64) -> AngleLabel {
    AngleLabel::new(n, d).unwrap()
}

fn budget() -> ExploreBudget {
    ExploreBudget::default()
}

/// Canonical key after lifting to `ambient`; None if the labels do not fit.
fn key(q: &Quiver, ambient: u32) -> Option<CanonicalKey> {
    q.lift(ambient).ok().map(|q| canonical_form(&q, false).unwrap())
}

fn member_keys(c: &ClassReport) -> HashSet<CanonicalKey> {
    c.members.iter().map(|m| canonical_form(m, false).unwrap()).collect()
}

// 1. class sizes

fn criterion_1() -> Outcome {
    let b = budget();
    let d5 = tables::extension_levels(&tables::denominator5_base(true), &tables::denominator5_alphabet(), 6, &b).unwrap();
    let f = tables::extension_levels(&[tables::lookup("F4").unwrap().quiver()], &tables::f_alphabet(), 6, &b).unwrap();
    // (rank, class, member keys, corank)
    let mut discovered = Vec::new();
    for level in d5.iter().chain(f.iter()) {
        for c in &level.classes {
            let corank = verify_class_realization(c.seed(), &b).unwrap().corank;
            discovered.push((level.rank, c.clone(), member_keys(c), corank));
        }
    }
    let series_key = key(&series::realize_standard_form(&series::seed(Family::Odd, 2).unwrap()).unwrap(), 5).unwrap();

    let mut lines = Vec::new();
    let mut failed = Vec::new();
    let mut claimed = vec![false; discovered.len()];
    let mut groups: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for e in CLASSES.iter() {
        let direct = explore(&e.quiver(), &b, false).unwrap();
        let found = discovered
            .iter()
            .position(|(r, c, keys, _)| *r == e.rank && key(&e.quiver(), c.seed().ambient()).is_some_and(|k| keys.contains(&k)));
        let computed = match found {
            Some(t) => {
                claimed[t] = true;
                let (_, c, _, corank) = &discovered[t];
                assert_eq!(c.size, direct.size, "{}: discovered and direct sizes differ", e.name);
                let g = groups.entry((e.rank, e.corank)).or_default();
                g.0.push(e.size);
                if *corank == e.corank {
                    g.1.push(c.size);
                }
                c.size
            }
            None if e.readable => direct.size,
            None => {
                failed.push(format!("{} not discovered", e.name));
                continue;
            }
        };
        let ok = direct.verdict == Verdict::Finite && computed == e.size;
        if !ok {
            failed.push(e.name.to_string());
        }
        let source = if found.is_some() { "extension" } else { "seed" };
        lines.push(format!(
            "    {:<10} expected {:>4} computed {:>4} ({source}) {}",
            e.name,
            e.size,
            computed,
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    for (t, (rank, c, keys, corank)) in discovered.iter().enumerate() {
        if claimed[t] {
            continue;
        }
        if *rank == 4 && keys.contains(&series_key) {
            lines.push(format!("    extra rank-4 class of size {} (corank {corank}) is the ODD n=2 series class", c.size));
        } else {
            failed.push(format!("unidentified rank-{rank} class of size {}", c.size));
        }
    }
    for ((rank, corank), (mut want, mut got)) in groups {
        want.sort();
        got.sort();
        lines.push(format!("    rank {rank} corank {corank}: expected sizes {want:?}, computed {got:?}"));
    }
    let known: Vec<String> = KNOWN_SIZE_DEVIATIONS
        .iter()
        .filter(|(name, _, computed)| tables::lookup(name).is_some_and(|e| explore(&e.quiver(), &b, false).unwrap().size == *computed))
        .map(|(name, _, _)| name.to_string())
        .collect();
    let pass = failed.is_empty();
    let known_deviation = !pass && failed.iter().all(|f| known.contains(f)) && known.len() == KNOWN_SIZE_DEVIATIONS.len();
    let detail = format!(
        "counting up to vertex permutation; mismatches: {}\n{}",
        if failed.is_empty() { "none".into() } else { failed.join(", ") },
        lines.join("\n")
    );
    Outcome { pass, detail, known_deviation }
}

// 2. recount from the rank-3 denominator-5 classes

fn criterion_2() -> Outcome {
    let b = budget();
    let counts = |with_cyclic: bool| -> (Vec<usize>, usize) {
        let levels = tables::extension_levels(&tables::denominator5_base(with_cyclic), &tables::denominator5_alphabet(), 7, &b).unwrap();
        let mut c: Vec<usize> = levels.iter().map(|l| l.classes.len()).collect();
        c.resize(4, 0);
        (c, levels.iter().map(|l| l.unresolved).sum())
    };
    let (full, unresolved) = counts(true);
    let (paths, _) = counts(false);
    Outcome::new(
        full == [8, 2, 1, 0] && unresolved == 0,
        format!("ranks 4/5/6/7: {full:?} (expected [8, 2, 1, 0]), unresolved {unresolved}; from the three paths alone: {paths:?}"),
    )
}

// 3. series closure

fn criterion_3() -> Outcome {
    let rows = tables::series_rows(40, 12).unwrap();
    let bad: Vec<String> = rows.iter().filter(|r| !r.holds()).map(|r| format!("{} n={}", r.family, r.n)).collect();
    let tuples: usize = rows.iter().map(|r| r.tuples).sum();
    let matrix = rows.iter().filter(|r| r.matrix_checked).count();
    Outcome::new(bad.is_empty(), format!("{} (family, n) pairs, {tuples} tuples, {matrix} with matrix check; failing: {bad:?}", rows.len()))
}

// 4. vanishing-arrow catalogue

fn criterion_4() -> Outcome {
    let mut problems = Vec::new();
    let mut cases: BTreeMap<Family, HashSet<VanishingCase>> = BTreeMap::new();
    let mut entries = 0;
    for family in [Family::EvenA, Family::EvenB] {
        for n in 2..=20 {
            let all = series::valid_tuples(family, n);
            let cat = series::vanishing_arrow_catalogue(family, n).unwrap();
            let independent: Vec<_> = all.iter().filter(|sf| sf.numerators().contains(&n)).copied().collect();
            if cat != independent {
                problems.push(format!("{family} n={n}: catalogue differs from the filtered tuple list"));
            }
            for sf in &cat {
                entries += 1;
                let [k, q, m, s, mq, sq] = sf.numerators();
                let vanishing = sf.numerators().iter().filter(|&&x| x == n).count();
                let quiver = series::realize_standard_form(sf).unwrap();
                if quiver.arrows().len() != 6 - vanishing {
                    problems.push(format!("{sf}: {} arrows for {vanishing} vanishing labels", quiver.arrows().len()));
                }
                // structural cases, decided from the numerators directly
                let expected = if q == n {
                    None
                } else if k == n {
                    (vanishing == 1).then_some(VanishingCase::K)
                } else if m == n || s == n {
                    Some(VanishingCase::MOrS)
                } else if mq == n && sq == n {
                    Some(VanishingCase::BothSums)
                } else if mq == n || sq == n {
                    Some(VanishingCase::OneSum)
                } else {
                    None
                };
                if q == n || expected.is_none() || series::vanishing_case(sf) != expected {
                    problems.push(format!("{sf}: case {:?}, structural {expected:?}", series::vanishing_case(sf)));
                }
                if let Some(c) = expected {
                    cases.entry(family).or_default().insert(c);
                }
            }
        }
    }
    let a = cases.get(&Family::EvenA).cloned().unwrap_or_default();
    let b = cases.get(&Family::EvenB).cloned().unwrap_or_default();
    if b.contains(&VanishingCase::MOrS) {
        problems.push("EVEN_B has an m = n or s = n tuple".into());
    }
    let sorted = |s: &HashSet<VanishingCase>| {
        let mut v: Vec<_> = s.iter().copied().collect();
        v.sort();
        v
    };
    Outcome::new(
        problems.is_empty(),
        format!(
            "{entries} catalogue entries for n <= 20; EVEN_A cases {:?}, EVEN_B cases {:?}; problems: {problems:?}",
            sorted(&a),
            sorted(&b)
        ),
    )
}

// 5. realization propagation

fn criterion_5() -> Outcome {
    let rows = tables::realization_rows(8, &budget()).unwrap();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass())
        .map(|r| {
            format!("{} (corank {} expected {}, {} violations)", r.name, r.report.corank, r.expected_corank, r.report.violations.len())
        })
        .collect();
    let by_corank = |c: usize| rows.iter().filter(|r| r.expected_corank == c).count();
    Outcome::new(
        bad.is_empty(),
        format!("{} classes (corank 0: {}, 1: {}, 2: {}); failing: {bad:?}", rows.len(), by_corank(0), by_corank(1), by_corank(2)),
    )
}

// 6. rank-3 classifier against exploration

fn criterion_6() -> Outcome {
    let labels = [l(0, 1), l(1, 3), l(1, 2), l(1, 4), l(1, 5), l(2, 5), l(1, 6), l(1, 7), l(2, 7), l(3, 7)];
    let ambient = 420;
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut seen = HashSet::new();
    let (mut instances, mut finite, mut disagreements) = (0, 0, Vec::new());
    for a in labels {
        for b in labels {
            for c in labels {
                for orient in 0..8u32 {
                    let arrows: Vec<_> = [a, b, c]
                        .iter()
                        .zip(pairs)
                        .enumerate()
                        .filter(|(_, (lab, _))| **lab != l(1, 2))
                        .map(|(t, (lab, (i, j)))| if orient >> t & 1 == 0 { (i, j, *lab) } else { (j, i, *lab) })
                        .collect();
                    let q = Quiver::from_labels_in(3, ambient, &arrows).unwrap();
                    if !seen.insert(canonical_form(&q, false).unwrap()) {
                        continue;
                    }
                    instances += 1;
                    let verdict = classify_rank3(&q).unwrap().is_finite();
                    let oracle = explore(&q, &ExploreBudget::with_max_nodes(20_000), false).unwrap().verdict;
                    finite += verdict as usize;
                    let agree = matches!((verdict, oracle), (true, Verdict::Finite) | (false, Verdict::Infinite));
                    if !agree {
                        disagreements.push(format!("{:?}: classifier finite={verdict}, explore {}", arrows, oracle.as_str()));
                    }
                }
            }
        }
    }
    Outcome::new(
        disagreements.is_empty(),
        format!("{instances} distinct quivers ({finite} finite); disagreements: {}", disagreements.len()),
    )
}

// 7. the two triangle identities

fn criterion_7() -> Outcome {
    let mut problems = Vec::new();
    for d in (7..=31i64).step_by(2) {
        let n = (d - 1) / 2;
        // (b): (n/d, n/d, -1/d) mutated at the middle vertex
        let q = Quiver::triangle(l(n, d), l(n, d), l(1, d), false);
        let m = q.mutate(1).unwrap();
        if m.weight(0, 2) != CycloReal::from_int(2, d as u32) {
            problems.push(format!("(b) d={d}: weight {}", m.weight(0, 2).approx()));
        }
        // (a): (1/d, n/d, -n/d) mutated at the middle vertex gives the cyclic (1/d, n/d, (n-1)/d)
        let q = Quiver::triangle(l(1, d), l(n, d), l(n, d), false);
        let m = q.mutate(1).unwrap();
        let lab = m.weight_labels().unwrap();
        let mut got = vec![lab[0][1].unwrap(), lab[1][2].unwrap(), lab[0][2].unwrap()];
        got.sort();
        let mut want = vec![l(1, d), l(n, d), l(n - 1, d)];
        want.sort();
        // floating confirmation of the new weight: 2cos(π/d)·2cos(πn/d) + 2cos(πn/d) = 2cos(π(n−1)/d)
        let c = |k: i64| 2.0 * (std::f64::consts::PI * k as f64 / d as f64).cos();
        let float_ok = (c(1) * c(n) + c(n) - c(n - 1)).abs() < 1e-12;
        if got != want || m.is_acyclic() || !float_ok {
            problems.push(format!("(a) d={d}: {}", got.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")));
        }
    }
    Outcome::new(problems.is_empty(), format!("d = 7, 9, ..., 31; problems: {problems:?}"))
}

// 8. negative results on random samples

fn random_row(rng: &mut ChaCha8Rng, rank: usize, labels: &[AngleLabel], ambient: u32) -> Vec<CycloReal> {
    loop {
        let row: Vec<CycloReal> = (0..rank)
            .map(|_| {
                let lab = *labels.choose(rng).unwrap();
                let w = CycloReal::from_label(lab, ambient).unwrap();
                if rng.gen_bool(0.5) {
                    w
                } else {
                    -&w
                }
            })
            .collect();
        if row.iter().any(|w| !w.is_zero()) {
            return row;
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = budget();
    let mut problems = Vec::new();
    // (i) Markov plus a vertex
    let markov = Quiver::triangle(l(0, 1), l(0, 1), l(0, 1), true).lift(420).unwrap();
    let alpha = [l(1, 2), l(0, 1), l(1, 3), l(1, 4), l(1, 5), l(2, 5), l(1, 7), l(3, 7)];
    let mut counts = [0usize; 3];
    for _ in 0..SAMPLES {
        let q = markov.extended(&random_row(&mut rng, 3, &alpha, 420));
        let v = explore(&q, &b, false).unwrap().verdict;
        counts[0] += (v == Verdict::Infinite) as usize;
    }
    // (ii) series class members plus a vertex
    let families = [(Family::Odd, 3u32), (Family::EvenA, 4), (Family::EvenB, 4), (Family::Odd, 4)];
    let classes: Vec<(u32, ClassReport)> = families
        .iter()
        .map(|&(f, n)| {
            (f.denominator(n), explore(&series::realize_standard_form(&series::seed(f, n).unwrap()).unwrap(), &b, false).unwrap())
        })
        .collect();
    for t in 0..SAMPLES {
        let (d, class) = &classes[t % classes.len()];
        let mut labels = vec![l(1, 2), l(0, 1), l(1, 3)];
        labels.extend((1..(*d as i64 + 1) / 2).map(|m| l(m, *d as i64)));
        let member = class.members.choose(&mut rng).unwrap();
        let q = member.extended(&random_row(&mut rng, 4, &labels, member.ambient()));
        let v = explore(&q, &b, false).unwrap().verdict;
        counts[1] += (v == Verdict::Infinite) as usize;
    }
    // (iii)
    let path = Quiver::path(&[l(1, 5), l(2, 5), l(1, 5)]);
    let v = explore(&path, &b, false).unwrap().verdict;
    counts[2] = (v == Verdict::Infinite) as usize;
    if counts[0] != SAMPLES || counts[1] != SAMPLES || counts[2] != 1 {
        problems.push("finite or unresolved sample".to_string());
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "Markov extensions infinite {}/{SAMPLES}; rank-5 series extensions infinite {}/{SAMPLES}; path (1/5, 2/5, 1/5) {}",
            counts[0],
            counts[1],
            if counts[2] == 1 { "infinite" } else { "not infinite" }
        ),
    )
}

// 9. denominators 4 and 5 together

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b = budget();
    let d4 = [l(1, 4)];
    let d5 = [l(1, 5), l(2, 5)];
    let other = [l(1, 2), l(1, 2), l(0, 1), l(1, 3), l(1, 4), l(1, 5), l(2, 5)];
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
    let mut infinite = 0;
    let mut drawn = 0;
    while drawn < SAMPLES {
        let mut order = pairs.clone();
        order.shuffle(&mut rng);
        let mut arrows = vec![(order[0], *d4.choose(&mut rng).unwrap()), (order[1], *d5.choose(&mut rng).unwrap())];
        for &p in &order[2..] {
            arrows.push((p, *other.choose(&mut rng).unwrap()));
        }
        let arrows: Vec<_> = arrows
            .into_iter()
            .filter(|(_, lab)| *lab != l(1, 2))
            .map(|((i, j), lab)| if rng.gen_bool(0.5) { (i, j, lab) } else { (j, i, lab) })
            .collect();
        let q = Quiver::from_labels_in(4, 20, &arrows).unwrap();
        if !q.is_connected() {
            continue;
        }
        drawn += 1;
        infinite += (explore(&q, &b, false).unwrap().verdict == Verdict::Infinite) as usize;
    }
    Outcome::new(infinite == SAMPLES, format!("connected rank-4 samples infinite: {infinite}/{SAMPLES}"))
}

// 10. acute sign flips at acyclic members

fn criterion_10() -> Outcome {
    let b = budget();
    let (mut checked, mut orbits) = (0, 0);
    let mut missing = Vec::new();
    for e in CLASSES.iter() {
        let rep = verify_class_realization(&e.quiver(), &b).unwrap();
        let class = explore(&rep.start, &b, false).unwrap();
        let r0 = initial_realization(&rep.start).unwrap();
        let acyclic: HashSet<CanonicalKey> = class.acyclic_members().map(|m| canonical_form(m, false).unwrap()).collect();
        orbits += class.acyclic_orbits.len();
        for (m, path) in class.members.iter().zip(&class.member_paths) {
            if !acyclic.contains(&canonical_form(m, false).unwrap()) {
                continue;
            }
            // the realization carried along the path, not the fresh one
            let mut q = rep.start.clone();
            let mut r = r0.clone();
            for &k in path {
                r = mutate_realization(&r, &q, k).unwrap();
                q = q.mutate(k).unwrap();
            }
            checked += 1;
            if acute_sign_flip(&r).is_none() {
                missing.push(e.name);
            }
        }
    }
    Outcome::new(
        missing.is_empty() && orbits > 0,
        format!("{checked} acyclic members in {orbits} orbits over 17 classes; without a flip: {missing:?}"),
    )
}

// 11. core properties

fn random_quiver(rng: &mut ChaCha8Rng, rank: usize) -> Quiver {
    let labels = [l(1, 2), l(1, 2), l(0, 1), l(1, 3), l(1, 4), l(1, 5), l(2, 5), l(1, 7), l(3, 7)];
    let mut arrows = Vec::new();
    for i in 0..rank {
        for j in (i + 1)..rank {
            let lab = *labels.choose(rng).unwrap();
            if lab != l(1, 2) {
                arrows.push(if rng.gen_bool(0.5) { (i, j, lab) } else { (j, i, lab) });
            }
        }
    }
    Quiver::from_labels_in(rank, 140, &arrows).unwrap()
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut problems = Vec::new();
    for _ in 0..300 {
        let rank = rng.gen_range(3..=6);
        let q = random_quiver(&mut rng, rank);
        let k = rng.gen_range(0..rank);
        let m = q.mutate(k).unwrap();
        if m.mutate(k).unwrap() != q {
            problems.push("involution");
        }
        if q.opposite().mutate(k).unwrap() != m.opposite() {
            problems.push("opposite");
        }
        let mut perm: Vec<usize> = (0..rank).collect();
        perm.shuffle(&mut rng);
        if canonical_form(&q.permuted(&perm), false).unwrap() != canonical_form(&q, false).unwrap() {
            problems.push("canonical form");
        }
    }
    // every member of every finite class is label-valued
    let b = budget();
    let mut classes: Vec<Quiver> = CLASSES.iter().map(ClassEntry::quiver).collect();
    for f in Family::ALL {
        for n in 2..=8 {
            classes.push(series::realize_standard_form(&series::seed(f, n).unwrap()).unwrap());
        }
    }
    let mut members = 0;
    for q in &classes {
        let c = explore(q, &b, false).unwrap();
        members += c.members.len();
        if c.members.iter().any(|m| m.weight_labels().is_err()) {
            problems.push("label form");
        }
    }
    // identical reports for every thread count
    let seed = tables::lookup("H~4").unwrap().quiver();
    let reports: Vec<String> = [1, 2, 4, 8]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            pool.install(|| qmut::report::class_report_value(&explore(&seed, &b, false).unwrap()).to_string())
        })
        .collect();
    if reports.iter().any(|r| r != &reports[0]) {
        problems.push("thread determinism");
    }
    Outcome::new(
        problems.is_empty(),
        format!("300 random quivers; {members} class members label-valued; reports equal for 1/2/4/8 threads; problems: {problems:?}"),
    )
}

fn main() {
    // (id, title, tolerance, time limit, check)
    type Check = fn() -> Outcome;
    let criteria: [(u8, &str, &str, u64, Check); 11] = [
        (1, "class sizes of the 17 exceptional classes", "exact", 300, criterion_1),
        (2, "extension recount 8/2/1/0", "exact", 600, criterion_2),
        (3, "series closure, n <= 40 (matrix n <= 12)", "exact", 120, criterion_3),
        (4, "vanishing-arrow catalogue, n <= 20", "exact", 120, criterion_4),
        (5, "realization propagation and corank", "exact", 300, criterion_5),
        (6, "rank-3 classifier against exploration", "exact", 120, criterion_6),
        (7, "triangle identities, d = 7..31", "exact", 60, criterion_7),
        (8, "negative results on samples", "exact verdicts", 180, criterion_8),
        (9, "denominators 4 and 5 together", "exact verdicts", 180, criterion_9),
        (10, "acute sign flips at acyclic members", "exact", 300, criterion_10),
        (11, "core properties", "exact", 300, criterion_11),
    ];
    let filter: Option<u8> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = 0;
    for (id, title, tolerance, limit, check) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = out.pass && in_time;
        println!(
            "criterion {id:>2} {} {title} [tolerance {tolerance}; {:.1}s of {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for line in out.detail.lines() {
            println!("    {line}");
        }
        if !pass {
            if out.known_deviation && in_time {
                println!("    known deviation: computed sizes differ from the published table (see README)");
            } else {
                unexpected += 1;
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
