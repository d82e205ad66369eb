//! Built-in seeds of the seventeen exceptional classes and the checks that
//! compare them with the published class sizes and coranks.

use crate::cyclo::{AngleLabel, CycloReal};
use crate::document::QuiverDocument;
use crate::error::Result;
use crate::explore::{explore, extend_classification, ClassReport, ExploreBudget, Verdict};
use crate::quiver::Quiver;
use crate::realization::{verify_class_realization, RealizationReport};
use crate::series::{self, ClosureReport, Family};

/// A class of the exceptional table with its published size and corank.
#[derive(Debug, Clone, Copy)]
pub struct ClassEntry {
    pub name: &'static str,
    /// File stem under `seeds/`.
    pub file: &'static str,
    pub rank: usize,
    pub size: usize,
    pub corank: usize,
    /// Seed drawn directly; otherwise the seed is a member of a class found by extension.
    pub readable: bool,
    json: &'static str,
}

impl ClassEntry {
    pub fn document(&self) -> QuiverDocument {
        QuiverDocument::from_json(self.json).expect("built-in seed parses")
    }

    pub fn quiver(&self) -> Quiver {
        self.document().to_quiver().expect("built-in seed is valid")
    }

    pub fn json(&self) -> &'static str {
        self.json
    }
}

macro_rules! entry {
    ($name:expr, $file:literal, $rank:expr, $size:expr, $corank:expr, $readable:expr) => {
        ClassEntry {
            name: $name,
            file: $file,
            rank: $rank,
            size: $size,
            corank: $corank,
            readable: $readable,
            json: include_str!(concat!("../seeds/", $file, ".json")),
        }
    };
}

pub const CLASSES: [ClassEntry; 17] = [
    entry!("H3", "h3", 3, 6, 0, true),
    entry!("H3'", "h3p", 3, 6, 0, true),
    entry!("H3''", "h3pp", 3, 10, 0, true),
    entry!("H4", "h4", 4, 18, 0, true),
    entry!("H4'", "h4p", 4, 23, 0, true),
    entry!("H4''", "h4pp", 4, 32, 0, true),
    entry!("H4'''", "h4ppp", 4, 60, 0, true),
    entry!("H4''''", "h4pppp", 4, 30, 0, true),
    entry!("F4", "f4", 4, 8, 0, true),
    entry!("H~3", "h3_affine", 4, 36, 1, false),
    entry!("H~3'", "h3p_affine", 4, 28, 1, false),
    entry!("H~4", "h4_affine", 5, 524, 1, true),
    entry!("F~4", "f4_affine", 5, 60, 1, true),
    entry!("H3^(1,1)", "h3_11", 5, 8, 2, false),
    entry!("H4^(1,1)", "h4_11", 6, 179, 2, false),
    entry!("F4^(*,+)", "f4_star_plus", 6, 49, 2, false),
    entry!("F4^(*,*)", "f4_star_star", 6, 35, 2, false),
];

/// Series seeds (lexicographically least primitive tuple, n = 3).
pub const SERIES_SEEDS: [(Family, u32, &str); 3] = [
    (Family::Odd, 3, include_str!("../seeds/series_odd_3.json")),
    (Family::EvenA, 3, include_str!("../seeds/series_even_a_3.json")),
    (Family::EvenB, 3, include_str!("../seeds/series_even_b_3.json")),
];

/// Looks a class up by display name or file stem, ignoring ASCII case.
pub fn lookup(name: &str) -> Option<&'static ClassEntry> {
    CLASSES.iter().find(|e| e.name.eq_ignore_ascii_case(name) || e.file.eq_ignore_ascii_case(name))
}

fn label(n: i64, d: i64) -> AngleLabel {
    AngleLabel::new(n, d).expect("valid label")
}

fn alphabet(labels: &[(i64, i64)], ambient: u32) -> Vec<CycloReal> {
    labels.iter().map(|&(n, d)| CycloReal::from_label(label(n, d), ambient).expect("label fits ambient")).collect()
}

/// 0, ±1, ±2cos(π/5), ±2cos(2π/5), ±2.
pub fn denominator5_alphabet() -> Vec<CycloReal> {
    alphabet(&[(1, 2), (1, 3), (2, 3), (1, 5), (4, 5), (2, 5), (3, 5), (0, 1), (1, 1)], 5)
}

/// 0, ±1, ±√2, ±2.
pub fn f_alphabet() -> Vec<CycloReal> {
    alphabet(&[(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (0, 1), (1, 1)], 4)
}

/// Seeds of the finite rank-3 classes with a denominator-5 arrow: the three
/// acyclic paths and, with `with_cyclic`, the oriented triangle (0/1, 1/5, 1/5).
pub fn denominator5_base(with_cyclic: bool) -> Vec<Quiver> {
    let mut v = vec![
        Quiver::path(&[label(1, 3), label(1, 5)]),
        Quiver::path(&[label(1, 3), label(2, 5)]),
        Quiver::path(&[label(1, 5), label(2, 5)]),
    ];
    if with_cyclic {
        v.push(Quiver::triangle(label(0, 1), label(1, 5), label(1, 5), true));
    }
    v
}

/// Finite classes of each rank obtained by repeated one-vertex extension.
#[derive(Debug, Clone)]
pub struct ExtensionLevel {
    pub rank: usize,
    pub classes: Vec<ClassReport>,
    pub unresolved: usize,
}

/// Explores `base`, then extends rank by rank until `max_rank` or until a level is empty.
pub fn extension_levels(base: &[Quiver], alphabet: &[CycloReal], max_rank: usize, budget: &ExploreBudget) -> Result<Vec<ExtensionLevel>> {
    let mut cur: Vec<ClassReport> = base.iter().map(|q| explore(q, budget, false)).collect::<Result<_>>()?;
    let mut rank = base.first().map_or(0, Quiver::rank);
    let mut out = Vec::new();
    while rank < max_rank && !cur.is_empty() {
        let ext = extend_classification(&cur, alphabet, budget, false)?;
        rank += 1;
        out.push(ExtensionLevel { rank, classes: ext.classes.clone(), unresolved: ext.unresolved });
        cur = ext.classes;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SizeRow {
    pub entry: &'static ClassEntry,
    pub verdict: Verdict,
    pub computed: usize,
}

impl SizeRow {
    pub fn pass(&self) -> bool {
        self.verdict == Verdict::Finite && self.computed == self.entry.size
    }
}

/// Explores every built-in seed (counting up to vertex permutation).
pub fn size_rows(budget: &ExploreBudget) -> Result<Vec<SizeRow>> {
    CLASSES
        .iter()
        .map(|e| {
            let r = explore(&e.quiver(), budget, false)?;
            Ok(SizeRow { entry: e, verdict: r.verdict, computed: r.size })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RealizationRow {
    pub name: String,
    pub expected_corank: usize,
    pub report: RealizationReport,
}

impl RealizationRow {
    pub fn pass(&self) -> bool {
        self.report.holds() && self.report.corank == self.expected_corank
    }
}

/// Realization propagation over the seventeen classes and the series classes
/// of every family for 2 ≤ n ≤ `series_max_n` (expected corank 2).
pub fn realization_rows(series_max_n: u32, budget: &ExploreBudget) -> Result<Vec<RealizationRow>> {
    let mut rows = Vec::new();
    for e in &CLASSES {
        let report = verify_class_realization(&e.quiver(), budget)?;
        rows.push(RealizationRow { name: e.name.to_string(), expected_corank: e.corank, report });
    }
    for family in [Family::Odd, Family::EvenA, Family::EvenB] {
        for n in 2..=series_max_n {
            let q = series::realize_standard_form(&series::seed(family, n)?)?;
            let report = verify_class_realization(&q, budget)?;
            rows.push(RealizationRow { name: format!("{family} n={n}"), expected_corank: 2, report });
        }
    }
    Ok(rows)
}

/// Closure reports for every family and 2 ≤ n ≤ `max_n`, with the matrix
/// comparison for n ≤ `matrix_max_n`.
pub fn series_rows(max_n: u32, matrix_max_n: u32) -> Result<Vec<ClosureReport>> {
    let mut out = Vec::new();
    for family in [Family::Odd, Family::EvenA, Family::EvenB] {
        for n in 2..=max_n {
            out.push(series::verify_closure(family, n, n <= matrix_max_n)?);
        }
    }
    Ok(out)
}
