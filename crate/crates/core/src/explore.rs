//! Mutation-class enumeration, finiteness verdicts and the rank-3 classifier.

use crate::canon::{canonical_form, canonical_labeling, CanonicalKey};
use crate::cyclo::{AngleLabel, CycloReal};
use crate::error::{QmutError, Result};
use crate::quiver::Quiver;
use crate::rational::Rational;
use rayon::prelude::*;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{OnceLock, RwLock};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;
const RANK3_MAX_NODES: usize = 200_000;
const SAMPLE_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreBudget {
    pub max_nodes: usize,
    /// Enables the infiniteness rules; without them the search only stops at
    /// exhaustion or at the budget.
    pub max_weight_check: bool,
}

impl Default for ExploreBudget {
    fn default() -> Self {
        ExploreBudget { max_nodes: DEFAULT_MAX_NODES, max_weight_check: true }
    }
}

impl ExploreBudget {
    pub fn with_max_nodes(max_nodes: usize) -> Self {
        assert!(max_nodes >= 1);
        ExploreBudget { max_nodes, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Finite,
    Infinite,
    BudgetExhausted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Infinite => "infinite",
            Verdict::BudgetExhausted => "budget_exhausted",
        }
    }
}

/// A necessary condition for mutation-finiteness that a reached quiver violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// An arrow weight exceeds 2.
    WeightAboveTwo,
    /// An arrow weight is not 2cos(πm/d).
    NotLabelValued,
    /// A Markov subquiver inside a larger connected quiver.
    MarkovSubquiver,
    /// A connected rank-3 subquiver that is mutation-infinite.
    InfiniteRank3Subquiver,
    /// Rank 3: a weight-2 arrow outside a cyclic (2, a, a) triangle.
    DoubleArrowShape,
    /// Rank 3: the angle-sum condition on a triangle fails.
    TriangleCondition,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::WeightAboveTwo => "weight_above_two",
            Rule::NotLabelValued => "not_label_valued",
            Rule::MarkovSubquiver => "markov_subquiver",
            Rule::InfiniteRank3Subquiver => "infinite_rank3_subquiver",
            Rule::DoubleArrowShape => "double_arrow_shape",
            Rule::TriangleCondition => "triangle_condition",
        }
    }
}

/// Mutation sequence from the explored quiver to a quiver violating `rule`
/// on `vertices` (an arrow, a triple, or the whole rank-3 quiver).
#[derive(Debug, Clone)]
pub struct Witness {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub vertices: Vec<usize>,
    pub quiver: Quiver,
}

impl Witness {
    /// Replays the path from `start` and re-checks the rule on the result.
    pub fn replay(&self, start: &Quiver) -> bool {
        let Ok(q) = start.mutate_seq(&self.path) else { return false };
        if q != self.quiver {
            return false;
        }
        match self.rule {
            Rule::WeightAboveTwo | Rule::NotLabelValued => {
                let [i, j] = self.vertices[..] else { return false };
                arrow_violation(&q, i, j) == Some(self.rule)
            }
            Rule::MarkovSubquiver => {
                let comps = q.components();
                let Some(comp) = comps.iter().find(|c| c.contains(&self.vertices[0])) else { return false };
                comp.len() > 3 && self.vertices.iter().all(|v| comp.contains(v)) && is_markov(&q.permuted(&self.vertices))
            }
            Rule::InfiniteRank3Subquiver => {
                q.rank() > 3 && matches!(classify_rank3(&q.permuted(&self.vertices)), Ok(Rank3Classification::Infinite(_)))
            }
            Rule::DoubleArrowShape | Rule::TriangleCondition => q.rank() == 3 && rank3_filter(&q) == Some(self.rule),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub verdict: Verdict,
    pub mod_opposite: bool,
    /// Number of canonical forms reached.
    pub size: usize,
    /// The first quivers in breadth-first order plus every acyclic member.
    pub representatives: Vec<Quiver>,
    /// None when some reached arrow has no label.
    pub highest_denominator: Option<u32>,
    pub acyclic_orbits: Vec<Vec<Quiver>>,
    pub infiniteness_witness: Option<Witness>,
    /// Per-component reports for disconnected input.
    pub components: Vec<ClassReport>,
    /// Every member, for finite classes; the first is the explored quiver.
    pub members: Vec<Quiver>,
    /// Mutation sequence from the explored quiver to each member.
    pub member_paths: Vec<Vec<usize>>,
}

impl ClassReport {
    pub fn seed(&self) -> &Quiver {
        &self.members[0]
    }

    pub fn acyclic_members(&self) -> impl Iterator<Item = &Quiver> {
        self.members.iter().filter(|q| q.is_acyclic())
    }
}

pub(crate) fn arrow_violation(q: &Quiver, i: usize, j: usize) -> Option<Rule> {
    if !q.has_arrow(i, j) {
        return None;
    }
    let w = q.weight(i, j);
    if w.to_label().is_some() {
        return None;
    }
    if (&w - &CycloReal::from_int(2, w.ambient())).sign() > 0 {
        Some(Rule::WeightAboveTwo)
    } else {
        Some(Rule::NotLabelValued)
    }
}

fn is_two(w: &CycloReal) -> bool {
    w.as_rational().is_some_and(|r| *r == Rational::from_int(2))
}

fn arrow_count3(q: &Quiver) -> usize {
    [(0, 1), (1, 2), (0, 2)].iter().filter(|&&(i, j)| q.has_arrow(i, j)).count()
}

fn cyclic3(q: &Quiver) -> bool {
    let s = [q.sign(0, 1), q.sign(1, 2), q.sign(2, 0)];
    s[0] != 0 && s[0] == s[1] && s[1] == s[2]
}

pub fn is_markov(q: &Quiver) -> bool {
    q.rank() == 3 && arrow_count3(q) == 3 && cyclic3(q) && [(0, 1), (1, 2), (0, 2)].iter().all(|&(i, j)| is_two(&q.weight(i, j)))
}

/// Angle data of a rank-3 quiver for the triangle conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCheck {
    pub pass: bool,
    pub cyclic: bool,
    /// Labels of the arrows 0-1, 1-2, 0-2 (label 1/2 for a missing arrow).
    pub labels: [AngleLabel; 3],
    /// Whether some label has reduced denominator above 5.
    pub equality_required: bool,
    /// For cyclic triangles, the index t of the label in the role of t/d in
    /// m/d + s/d + (1 − t/d) ≥ 1, if any works.
    pub witness_index: Option<usize>,
}

fn frac(l: AngleLabel) -> Rational {
    Rational::new(l.num() as i64, l.den() as i64)
}

/// Angle-sum conditions for rank-3 quivers with label-valued weights.
///
/// Acyclic (a, b, −c): m/d + s/d + t/d ≥ 1; cyclic (a, b, c): m/d + s/d + (1 − t/d) ≥ 1
/// for some choice of t. Equality is required once a label has denominator above 5.
/// A missing arrow counts as label 1/2 in an acyclic triangle.
pub fn check_triangle_condition(q: &Quiver) -> Result<TriangleCheck> {
    if q.rank() != 3 {
        return Err(QmutError::WrongRank { expected: 3, got: q.rank() });
    }
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut labels = [AngleLabel::new(1, 2).unwrap(); 3];
    for (t, &(i, j)) in pairs.iter().enumerate() {
        if q.has_arrow(i, j) {
            labels[t] = q.weight(i, j).to_label().ok_or(QmutError::NotLabelValued { i, j })?;
        }
    }
    let equality_required = labels.iter().any(|l| l.den() > 5);
    let f: Vec<Rational> = labels.iter().map(|&l| frac(l)).collect();
    let one = Rational::one();
    let ok = |lhs: &Rational| if equality_required { *lhs == one } else { *lhs >= one };
    let cyclic = cyclic3(q);
    if !cyclic {
        let sum = &(&f[0] + &f[1]) + &f[2];
        return Ok(TriangleCheck { pass: ok(&sum), cyclic, labels, equality_required, witness_index: None });
    }
    let witness_index = (0..3).find(|&t| {
        let (a, b) = ((t + 1) % 3, (t + 2) % 3);
        let lhs = &(&(&f[a] + &f[b]) + &one) - &f[t];
        ok(&lhs)
    });
    Ok(TriangleCheck { pass: witness_index.is_some(), cyclic, labels, equality_required, witness_index })
}

/// Rank-3 necessary conditions beyond label form; assumes every weight has a label.
fn rank3_filter(q: &Quiver) -> Option<Rule> {
    let arrows = arrow_count3(q);
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let weights: Vec<CycloReal> = pairs.iter().map(|&(i, j)| q.weight(i, j)).collect();
    let twos = weights.iter().filter(|w| is_two(w)).count();
    if twos > 0 {
        // (2,2,2) or cyclic (2, a, a)
        if arrows != 3 || !cyclic3(q) {
            return Some(Rule::DoubleArrowShape);
        }
        if twos == 1 {
            let others: Vec<&CycloReal> = weights.iter().filter(|w| !is_two(w)).collect();
            if others[0] != others[1] {
                return Some(Rule::DoubleArrowShape);
            }
        } else if twos == 2 {
            return Some(Rule::DoubleArrowShape);
        }
    }
    if arrows == 3 && !check_triangle_condition(q).map(|c| c.pass).unwrap_or(false) {
        return Some(Rule::TriangleCondition);
    }
    None
}

/// Mutation-finite normal forms of connected rank-3 quivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    /// At most one arrow: not connected.
    Disconnected,
    /// (2, 2, 2).
    Markov,
    /// (2, 2cos(π/d), 2cos(π/d)).
    DoubleArrow { d: u32 },
    /// Acyclic path with the two labels, in increasing order.
    Path { labels: [AngleLabel; 2] },
}

#[derive(Debug, Clone)]
pub enum Rank3Classification {
    Finite { normal_form: NormalForm, path: Vec<usize> },
    Infinite(Witness),
}

impl Rank3Classification {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rank3Classification::Finite { .. })
    }
}

fn path_normal_forms() -> &'static [[AngleLabel; 2]] {
    static NF: OnceLock<Vec<[AngleLabel; 2]>> = OnceLock::new();
    NF.get_or_init(|| {
        let l = |n, d| AngleLabel::new(n, d).unwrap();
        let mut v = vec![[l(1, 3), l(1, 3)], [l(1, 3), l(1, 4)], [l(1, 3), l(1, 5)], [l(1, 5), l(2, 5)], [l(1, 3), l(2, 5)]];
        for p in v.iter_mut() {
            p.sort();
        }
        v
    })
}

fn normal_form(q: &Quiver) -> Option<NormalForm> {
    let arrows = arrow_count3(q);
    if arrows <= 1 {
        return Some(NormalForm::Disconnected);
    }
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let labels: Vec<AngleLabel> =
        pairs.iter().filter(|&&(i, j)| q.has_arrow(i, j)).map(|&(i, j)| q.weight(i, j).to_label().unwrap()).collect();
    if arrows == 2 {
        let mut p = [labels[0], labels[1]];
        p.sort();
        return path_normal_forms().contains(&p).then_some(NormalForm::Path { labels: p });
    }
    if !cyclic3(q) {
        return None;
    }
    let two = AngleLabel::new(0, 1).unwrap();
    let twos = labels.iter().filter(|&&l| l == two).count();
    if twos == 3 {
        return Some(NormalForm::Markov);
    }
    if twos == 1 {
        let o: Vec<AngleLabel> = labels.iter().copied().filter(|&l| l != two).collect();
        if o[0] == o[1] && o[0].num() == 1 {
            return Some(NormalForm::DoubleArrow { d: o[0].den() });
        }
    }
    None
}

/// Decides mutation-finiteness of a rank-3 quiver.
///
/// Every reached quiver is tested against the label form, the weight-2 shape
/// rule and the triangle conditions; the search ends at the first violation
/// or at a normal form, which then certifies finiteness.
pub fn classify_rank3(q: &Quiver) -> Result<Rank3Classification> {
    if q.rank() != 3 {
        return Err(QmutError::WrongRank { expected: 3, got: q.rank() });
    }
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    let mut queue: VecDeque<(Quiver, Vec<usize>)> = VecDeque::new();
    seen.insert(canonical_form(q, true)?);
    queue.push_back((q.clone(), Vec::new()));
    while let Some((cur, path)) = queue.pop_front() {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            if let Some(rule) = arrow_violation(&cur, i, j) {
                return Ok(Rank3Classification::Infinite(Witness { path, rule, vertices: vec![i, j], quiver: cur }));
            }
        }
        if let Some(nf) = normal_form(&cur) {
            return Ok(Rank3Classification::Finite { normal_form: nf, path });
        }
        if let Some(rule) = rank3_filter(&cur) {
            return Ok(Rank3Classification::Infinite(Witness { path, rule, vertices: vec![0, 1, 2], quiver: cur }));
        }
        for k in 0..3 {
            let child = cur.mutate_unchecked(k);
            if seen.insert(canonical_form(&child, true)?) {
                if seen.len() > RANK3_MAX_NODES {
                    return Err(QmutError::BudgetExhausted(RANK3_MAX_NODES));
                }
                let mut p = path.clone();
                p.push(k);
                queue.push_back((child, p));
            }
        }
    }
    // every finite rank-3 class reaches a normal form, so this is unreachable
    Err(QmutError::BudgetExhausted(seen.len()))
}

static RANK3_CACHE: OnceLock<RwLock<HashMap<CanonicalKey, bool>>> = OnceLock::new();

/// Cached finiteness of a rank-3 quiver (whose arrows all have labels).
pub(crate) fn rank3_finite_cached(q: &Quiver) -> bool {
    let key = canonical_form(q, true).expect("rank 3");
    let cache = RANK3_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(&v) = cache.read().unwrap().get(&key) {
        return v;
    }
    let v = classify_rank3(q).expect("rank-3 classification").is_finite();
    cache.write().unwrap().insert(key, v);
    v
}

struct Shape {
    n: usize,
    comps: Vec<Vec<usize>>,
}

impl Shape {
    fn of(q: &Quiver) -> Shape {
        Shape { n: q.rank(), comps: q.components() }
    }
}

/// First violated infiniteness rule on `q`, if any.
fn check_node(q: &Quiver, shape: &Shape) -> Option<(Rule, Vec<usize>)> {
    for comp in shape.comps.iter().filter(|c| c.len() >= 3) {
        for (a, &i) in comp.iter().enumerate() {
            for &j in &comp[a + 1..] {
                if let Some(rule) = arrow_violation(q, i, j) {
                    return Some((rule, vec![i, j]));
                }
            }
        }
    }
    if shape.n <= 3 {
        return None;
    }
    for comp in shape.comps.iter().filter(|c| c.len() >= 3) {
        let m = comp.len();
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    let t = [comp[a], comp[b], comp[c]];
                    let arrows = [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])].iter().filter(|&&(i, j)| q.has_arrow(i, j)).count();
                    if arrows < 2 {
                        continue;
                    }
                    let sub = q.permuted(&t);
                    if m > 3 && is_markov(&sub) {
                        return Some((Rule::MarkovSubquiver, t.to_vec()));
                    }
                    if !rank3_finite_cached(&sub) {
                        return Some((Rule::InfiniteRank3Subquiver, t.to_vec()));
                    }
                }
            }
        }
    }
    None
}

/// Raw breadth-first search result.
pub(crate) struct Search {
    pub verdict: Verdict,
    pub keys: HashMap<CanonicalKey, u32>,
    /// (parent, mutated vertex) per node; the root is its own parent.
    pub tree: Vec<(u32, u8)>,
    pub acyclic: Vec<u32>,
    pub witness: Option<Witness>,
    pub highest_denominator: Option<u32>,
}

impl Search {
    pub fn path(&self, mut idx: u32) -> Vec<usize> {
        let mut p = Vec::new();
        while idx != 0 {
            let (parent, k) = self.tree[idx as usize];
            p.push(k as usize);
            idx = parent;
        }
        p.reverse();
        p
    }
}

fn max_den(q: &Quiver, shape: &Shape) -> Option<u32> {
    let mut best = 1;
    for comp in &shape.comps {
        for (a, &i) in comp.iter().enumerate() {
            for &j in &comp[a + 1..] {
                if q.has_arrow(i, j) {
                    best = best.max(q.weight(i, j).to_label()?.den());
                }
            }
        }
    }
    Some(best)
}

pub(crate) fn bfs(q: &Quiver, budget: &ExploreBudget, mod_opposite: bool) -> Result<Search> {
    let shape = Shape::of(q);
    let n = q.rank();
    let mut keys: HashMap<CanonicalKey, u32> = HashMap::new();
    keys.insert(canonical_form(q, mod_opposite)?, 0);
    let mut s = Search {
        verdict: Verdict::Finite,
        keys,
        tree: vec![(0, 0)],
        acyclic: Vec::new(),
        witness: None,
        highest_denominator: max_den(q, &shape),
    };
    if q.is_acyclic() {
        s.acyclic.push(0);
    }
    if budget.max_weight_check {
        if let Some((rule, vertices)) = check_node(q, &shape) {
            s.verdict = Verdict::Infinite;
            s.witness = Some(Witness { path: vec![], rule, vertices, quiver: q.clone() });
            return Ok(s);
        }
    }
    let active: Vec<usize> = (0..n).filter(|&k| (0..n).any(|j| q.has_arrow(k, j))).collect();
    let mut frontier: Vec<(u32, Quiver)> = vec![(0, q.clone())];
    while !frontier.is_empty() {
        let children: Vec<Vec<(Quiver, CanonicalKey)>> = frontier
            .par_iter()
            .map(|(_, cur)| {
                active
                    .iter()
                    .map(|&k| {
                        let c = cur.mutate_unchecked(k);
                        let key = canonical_form(&c, mod_opposite).expect("rank bound checked at root");
                        (c, key)
                    })
                    .collect()
            })
            .collect();
        let mut fresh: Vec<(u32, Quiver)> = Vec::new();
        for ((parent, _), kids) in frontier.iter().zip(children) {
            for (&k, (c, key)) in active.iter().zip(kids) {
                if s.keys.contains_key(&key) {
                    continue;
                }
                let idx = s.tree.len() as u32;
                s.keys.insert(key, idx);
                s.tree.push((*parent, k as u8));
                fresh.push((idx, c));
            }
        }
        if s.tree.len() > budget.max_nodes {
            s.verdict = Verdict::BudgetExhausted;
            return Ok(s);
        }
        let checks: Vec<(bool, Option<u32>, Option<(Rule, Vec<usize>)>)> = fresh
            .par_iter()
            .map(|(_, c)| {
                let bad = if budget.max_weight_check { check_node(c, &shape) } else { None };
                (c.is_acyclic(), max_den(c, &shape), bad)
            })
            .collect();
        for ((idx, c), (acyclic, den, bad)) in fresh.iter().zip(checks) {
            if acyclic {
                s.acyclic.push(*idx);
            }
            s.highest_denominator = match (s.highest_denominator, den) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            if let Some((rule, vertices)) = bad {
                s.verdict = Verdict::Infinite;
                s.witness = Some(Witness { path: s.path(*idx), rule, vertices, quiver: c.clone() });
                return Ok(s);
            }
        }
        frontier = fresh;
    }
    Ok(s)
}

/// Explores the mutation class of `q` up to isomorphism (and opposite, if asked).
pub fn explore(q: &Quiver, budget: &ExploreBudget, mod_opposite: bool) -> Result<ClassReport> {
    let s = bfs(q, budget, mod_opposite)?;
    let mut report = report_from_search(q, &s, mod_opposite)?;
    let comps = q.components();
    if comps.len() > 1 {
        report.components = comps.iter().map(|c| explore(&q.permuted(c), budget, mod_opposite)).collect::<Result<Vec<_>>>()?;
    }
    Ok(report)
}

pub(crate) fn report_from_search(q: &Quiver, s: &Search, mod_opposite: bool) -> Result<ClassReport> {
    let size = s.tree.len();
    let finite = s.verdict == Verdict::Finite;
    let mut member_paths = Vec::new();
    let mut members = Vec::new();
    if finite {
        // replay in index order, reusing parents
        members.reserve(size);
        member_paths.reserve(size);
        members.push(q.clone());
        member_paths.push(Vec::new());
        for idx in 1..size {
            let (parent, k) = s.tree[idx];
            let m = members[parent as usize].mutate_unchecked(k as usize);
            let mut p = member_paths[parent as usize].clone();
            p.push(k as usize);
            members.push(m);
            member_paths.push(p);
        }
    }
    let mut representatives: Vec<Quiver> = Vec::new();
    if finite {
        representatives.extend(members.iter().take(SAMPLE_SIZE).cloned());
        for &a in &s.acyclic {
            if a as usize >= SAMPLE_SIZE {
                representatives.push(members[a as usize].clone());
            }
        }
    } else {
        representatives.push(q.clone());
    }
    let mut report = ClassReport {
        verdict: s.verdict,
        mod_opposite,
        size,
        representatives,
        highest_denominator: s.highest_denominator,
        acyclic_orbits: Vec::new(),
        infiniteness_witness: s.witness.clone(),
        components: Vec::new(),
        members,
        member_paths,
    };
    if finite {
        report.acyclic_orbits = acyclic_orbits(&report)?;
    }
    Ok(report)
}

/// Partitions the acyclic members of a finite class into sink/source-mutation orbits.
pub fn acyclic_orbits(class: &ClassReport) -> Result<Vec<Vec<Quiver>>> {
    if class.verdict != Verdict::Finite {
        return Err(QmutError::NotFinite);
    }
    let acyclic: Vec<&Quiver> = class.acyclic_members().collect();
    let mut index: HashMap<CanonicalKey, usize> = HashMap::new();
    for (t, q) in acyclic.iter().enumerate() {
        index.insert(canonical_form(q, class.mod_opposite)?, t);
    }
    let mut parent: Vec<usize> = (0..acyclic.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (t, q) in acyclic.iter().enumerate() {
        let (sinks, sources) = q.sinks_sources();
        for v in sinks.into_iter().chain(sources) {
            let m = q.mutate_unchecked(v);
            let u = *index.get(&canonical_form(&m, class.mod_opposite)?).expect("sink/source mutation stays in class");
            let (a, b) = (find(&mut parent, t), find(&mut parent, u));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<Quiver>> = Vec::new();
    let mut root_group: HashMap<usize, usize> = HashMap::new();
    for t in 0..acyclic.len() {
        let r = find(&mut parent, t);
        let g = *root_group.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(acyclic[t].clone());
    }
    Ok(groups)
}

/// Summary of one extension step.
#[derive(Debug, Clone)]
pub struct Extension {
    pub classes: Vec<ClassReport>,
    /// Connected candidates surviving the rank-3 pruning.
    pub candidates: usize,
    /// Candidates that needed a class exploration.
    pub explored: usize,
    /// Explorations that hit the budget.
    pub unresolved: usize,
}

/// Attaches a vertex to a representative of each class in every way allowed by
/// the alphabet and returns the distinct finite classes of rank r+1.
pub fn extend_classification(
    base: &[ClassReport],
    alphabet: &[CycloReal],
    budget: &ExploreBudget,
    mod_opposite: bool,
) -> Result<Extension> {
    let mut known: HashMap<CanonicalKey, usize> = HashMap::new();
    let mut infinite: HashSet<CanonicalKey> = HashSet::new();
    let mut out = Extension { classes: Vec::new(), candidates: 0, explored: 0, unresolved: 0 };
    let mut seeds: Vec<Quiver> = Vec::new();
    for class in base {
        seeds.push(class.seed().clone());
        if mod_opposite {
            seeds.push(class.seed().opposite());
        }
    }
    for seed in seeds {
        let ambient = alphabet.iter().fold(seed.ambient(), |a, w| num_integer::Integer::lcm(&a, &w.ambient()));
        let seed = seed.lift(ambient)?;
        let alpha: Vec<CycloReal> = alphabet.iter().map(|w| w.lift(ambient)).collect::<Result<_>>()?;
        for row in extension_rows(&seed, &alpha) {
            out.candidates += 1;
            let cand = seed.extended(&row);
            let key = canonical_form(&cand, mod_opposite)?;
            if known.contains_key(&key) || infinite.contains(&key) {
                continue;
            }
            out.explored += 1;
            let s = bfs(&cand, budget, mod_opposite)?;
            match s.verdict {
                Verdict::Finite => {
                    let id = out.classes.len();
                    for k in s.keys.keys() {
                        known.insert(k.clone(), id);
                    }
                    out.classes.push(report_from_search(&cand, &s, mod_opposite)?);
                }
                Verdict::Infinite => infinite.extend(s.keys.into_keys()),
                Verdict::BudgetExhausted => out.unresolved += 1,
            }
        }
    }
    Ok(out)
}

/// Rows (b[i][new])_i over the alphabet giving connected quivers whose new
/// rank-3 subquivers through the new vertex pass the rank-3 rules.
fn extension_rows(seed: &Quiver, alpha: &[CycloReal]) -> Vec<Vec<CycloReal>> {
    let r = seed.rank();
    let a = alpha.len();
    let new_rank = r + 1;
    // ok[x][y][ia][ib]: triple {x, y, new} with b[x][new] = alpha[ia], b[y][new] = alpha[ib]
    let mut ok = vec![vec![Vec::<bool>::new(); r]; r];
    for x in 0..r {
        for y in (x + 1)..r {
            let table: Vec<bool> = (0..a * a)
                .into_par_iter()
                .map(|t| {
                    let (ia, ib) = (t / a, t % a);
                    let mut tri = Quiver::empty(3, seed.ambient());
                    if seed.has_arrow(x, y) {
                        tri.set(0, 1, seed.entry(x, y).clone());
                    }
                    if !alpha[ia].is_zero() {
                        tri.set(0, 2, alpha[ia].clone());
                    }
                    if !alpha[ib].is_zero() {
                        tri.set(1, 2, alpha[ib].clone());
                    }
                    if arrow_count3(&tri) < 2 {
                        return true;
                    }
                    if new_rank > 3 && is_markov(&tri) {
                        return false;
                    }
                    rank3_finite_cached(&tri)
                })
                .collect();
            ok[x][y] = table;
        }
    }
    let mut rows = Vec::new();
    let mut choice = vec![0usize; r];
    fn rec(
        pos: usize,
        r: usize,
        a: usize,
        alpha: &[CycloReal],
        ok: &[Vec<Vec<bool>>],
        choice: &mut Vec<usize>,
        rows: &mut Vec<Vec<CycloReal>>,
    ) {
        if pos == r {
            if choice.iter().any(|&c| !alpha[c].is_zero()) {
                rows.push(choice.iter().map(|&c| alpha[c].clone()).collect());
            }
            return;
        }
        for c in 0..a {
            choice[pos] = c;
            if (0..pos).all(|x| ok[x][pos][choice[x] * a + c]) {
                rec(pos + 1, r, a, alpha, ok, choice, rows);
            }
        }
    }
    rec(0, r, a, alpha, &ok, &mut choice, &mut rows);
    rows
}

/// A mutation sequence σ with μ_σ(q1) isomorphic to q2, found by bidirectional BFS.
pub fn find_mutation_path(q1: &Quiver, q2: &Quiver, max_depth: usize) -> Result<Option<Vec<usize>>> {
    if q1.rank() != q2.rank() {
        return Err(QmutError::WrongRank { expected: q1.rank(), got: q2.rank() });
    }
    let n = q1.rank();
    let ambient = num_integer::Integer::lcm(&q1.ambient(), &q2.ambient());
    let (q1, q2) = (q1.lift(ambient)?, q2.lift(ambient)?);
    // side: key -> (quiver, path from that side's start)
    let mut sides: [HashMap<CanonicalKey, (Quiver, Vec<usize>)>; 2] = [HashMap::new(), HashMap::new()];
    let mut frontiers: [Vec<CanonicalKey>; 2] = [Vec::new(), Vec::new()];
    for (t, q) in [&q1, &q2].into_iter().enumerate() {
        let key = canonical_form(q, false)?;
        sides[t].insert(key.clone(), (q.clone(), Vec::new()));
        frontiers[t].push(key);
    }
    let meet = |sides: &[HashMap<CanonicalKey, (Quiver, Vec<usize>)>; 2], key: &CanonicalKey| -> Result<Option<Vec<usize>>> {
        let (Some((x1, p1)), Some((x2, p2))) = (sides[0].get(key), sides[1].get(key)) else { return Ok(None) };
        // x2 = x1.permuted(c) with c[p] = o1[o2^{-1}[p]]
        let (_, o1) = canonical_labeling(x1)?;
        let (_, o2) = canonical_labeling(x2)?;
        let mut o2inv = vec![0; n];
        for (p, &v) in o2.iter().enumerate() {
            o2inv[v] = p;
        }
        let c: Vec<usize> = (0..n).map(|p| o1[o2inv[p]]).collect();
        let mut seq = p1.clone();
        seq.extend(p2.iter().rev().map(|&k| c[k]));
        Ok(Some(seq))
    };
    if let Some(seq) = meet(&sides, &frontiers[0][0])? {
        return Ok(Some(seq));
    }
    let mut depth = [0usize; 2];
    while depth[0] + depth[1] < max_depth && !(frontiers[0].is_empty() && frontiers[1].is_empty()) {
        let t = if frontiers[1].is_empty() || (!frontiers[0].is_empty() && frontiers[0].len() <= frontiers[1].len()) { 0 } else { 1 };
        let mut next = Vec::new();
        for key in std::mem::take(&mut frontiers[t]) {
            let (cur, path) = sides[t][&key].clone();
            for k in 0..n {
                let c = cur.mutate_unchecked(k);
                let ck = canonical_form(&c, false)?;
                if sides[t].contains_key(&ck) {
                    continue;
                }
                let mut p = path.clone();
                p.push(k);
                sides[t].insert(ck.clone(), (c, p));
                if let Some(seq) = meet(&sides, &ck)? {
                    return Ok(Some(seq));
                }
                next.push(ck);
            }
        }
        frontiers[t] = next;
        depth[t] += 1;
    }
    Ok(None)
}
