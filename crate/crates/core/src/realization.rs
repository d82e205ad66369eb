//! Geometric realizations by partial reflections, stored as Gram matrices.

use crate::canon::{canonical_form, canonical_labelings, CanonicalKey};
use crate::cyclo::CycloReal;
use crate::error::{QmutError, Result};
use crate::explore::{explore, extend_classification, ClassReport, ExploreBudget, Verdict};
use crate::quiver::Quiver;
use std::collections::VecDeque;
use std::collections::{HashMap, HashSet};

/// Gram matrix of a tuple of vectors of norm 2.
#[derive(Clone, PartialEq, Eq)]
pub struct Realization {
    n: usize,
    gram: Vec<CycloReal>,
}

impl std::fmt::Debug for Realization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect()).collect();
        f.debug_struct("Realization").field("gram", &rows).finish()
    }
}

impl Realization {
    /// Checks symmetry and the diagonal (all 2) exactly.
    pub fn from_rows(rows: &[Vec<CycloReal>]) -> Result<Realization> {
        let n = rows.len();
        if n == 0 {
            return Err(QmutError::EmptyVertexSet);
        }
        let amb = rows[0][0].ambient();
        let mut gram = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(QmutError::WrongRank { expected: n, got: row.len() });
            }
            for (j, x) in row.iter().enumerate() {
                if x.ambient() != amb {
                    return Err(QmutError::IncompatibleAmbient { ambient: amb, required: x.ambient() });
                }
                if *x != rows[j][i] || (i == j && x.as_rational() != Some(&2.into())) {
                    return Err(QmutError::NotGram);
                }
                gram.push(x.clone());
            }
        }
        Ok(Realization { n, gram })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloReal {
        &self.gram[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<CycloReal>> {
        self.gram.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn set(&mut self, i: usize, j: usize, x: CycloReal) {
        self.gram[j * self.n + i] = x.clone();
        self.gram[i * self.n + j] = x;
    }

    /// Sign of each off-diagonal product, upper triangle in row order.
    fn signs(&self) -> Vec<i8> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.get(i, j).sign() as i8);
            }
        }
        out
    }

    /// Flips v_i for every i with eps[i] < 0.
    pub fn sign_conjugate(&self, eps: &[i8]) -> Realization {
        let mut r = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && eps[i] * eps[j] < 0 {
                    r.gram[i * self.n + j] = -&self.gram[i * self.n + j];
                }
            }
        }
        r
    }
}

fn acyclic_gram(q: &Quiver) -> Realization {
    let n = q.rank();
    let amb = q.ambient();
    let mut r = Realization { n, gram: vec![CycloReal::zero(amb); n * n] };
    for i in 0..n {
        r.gram[i * n + i] = CycloReal::from_int(2, amb);
        for j in 0..n {
            if i != j {
                r.gram[i * n + j] = -q.weight(i, j);
            }
        }
    }
    r
}

fn is_two(x: &CycloReal) -> bool {
    x.as_rational() == Some(&2.into())
}

/// The double-arrow shape: a weight-2 arrow (a, b) such that removing either
/// end leaves an acyclic quiver and b sees every other vertex as a does.
fn double_arrow_pair(q: &Quiver) -> Option<(usize, usize)> {
    let n = q.rank();
    for a in 0..n {
        for b in 0..n {
            if a == b || !is_two(&q.weight(a, b)) {
                continue;
            }
            let twin = (0..n).all(|i| i == a || i == b || q.weight(a, i) == q.weight(b, i));
            if !twin {
                continue;
            }
            let without = |v: usize| -> Vec<usize> { (0..n).filter(|&i| i != v).collect() };
            let acyclic = |v| q.subquiver(&without(v)).is_ok_and(|s| s.is_acyclic());
            if acyclic(a) && acyclic(b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Realization of an acyclic quiver (all products −w) or of the double-arrow
/// shape (the second end of the double arrow duplicates the first).
pub fn initial_realization(q: &Quiver) -> Result<Realization> {
    if q.is_acyclic() {
        return Ok(acyclic_gram(q));
    }
    let (a, b) = double_arrow_pair(q).ok_or(QmutError::NoRealizationShape)?;
    let n = q.rank();
    let mut r = acyclic_gram(q);
    for i in 0..n {
        if i != b {
            let x = r.get(a, i).clone();
            r.set(b, i, x);
        }
    }
    Ok(r)
}

pub fn check_compatibility(r: &Realization, q: &Quiver) -> bool {
    let n = q.rank();
    r.n == n && (0..n).all(|i| ((i + 1)..n).all(|j| r.get(i, j).abs() == q.weight(i, j)))
}

/// Parity conditions on every chordless cycle (triangles included).
pub fn check_admissible(r: &Realization, q: &Quiver) -> bool {
    if r.n != q.rank() {
        return false;
    }
    q.chordless_cycles().iter().all(|c| {
        let len = c.vertices.len();
        let pos = (0..len).filter(|&t| r.get(c.vertices[t], c.vertices[(t + 1) % len]).sign() > 0).count();
        (pos % 2 == 1) == c.oriented
    })
}

/// Partial reflection at `k`: v_j ← v_j − (v_j, v_k) v_k when b_jk > 0, and
/// v_k ← −v_k. This is the congruence G ↦ M G Mᵀ by the change of coordinates M.
pub fn mutate_realization(r: &Realization, q: &Quiver, k: usize) -> Result<Realization> {
    let n = q.rank();
    if k >= n {
        return Err(QmutError::VertexOutOfRange { vertex: k, rank: n });
    }
    if !check_compatibility(r, q) {
        let (i, j) =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).find(|&(i, j)| r.get(i, j).abs() != q.weight(i, j)).unwrap_or((0, 0));
        return Err(QmutError::Incompatible { i, j });
    }
    Ok(reflect(r, q, k))
}

fn reflect(r: &Realization, q: &Quiver, k: usize) -> Realization {
    let n = r.n;
    let moved: Vec<bool> = (0..n).map(|j| q.sign(j, k) > 0).collect();
    let mut out = r.clone();
    for j in 0..n {
        if j != k {
            // (−v_k, v_j − g_jk v_k) = g_jk, (−v_k, v_j) = −g_kj
            let x = if moved[j] { r.get(j, k).clone() } else { -r.get(j, k) };
            out.set(j, k, x);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if i == k || j == k || moved[i] == moved[j] {
                continue;
            }
            let (p, o) = if moved[i] { (i, j) } else { (j, i) };
            let x = r.get(p, o) - &(r.get(p, k) * r.get(k, o));
            out.set(i, j, x);
        }
    }
    out
}

/// n − rank of the Gram matrix, by fraction-free (Bareiss) elimination.
pub fn gram_corank(r: &Realization) -> usize {
    let n = r.n;
    let amb = r.gram[0].ambient();
    let mut a = r.rows();
    let mut prev = CycloReal::from_int(1, amb);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = prev.inverse().expect("pivots are nonzero");
        for i in (row + 1)..n {
            for j in (col + 1)..n {
                let num = &(&a[row][col] * &a[i][j]) - &(&a[i][col] * &a[row][j]);
                let q = &num * &inv;
                debug_assert!(&q * &prev == num, "inexact Bareiss division");
                a[i][j] = q;
            }
            a[i][col] = CycloReal::zero(amb);
        }
        prev = a[row][col].clone();
        row += 1;
        rank += 1;
    }
    n - rank
}

/// Per-arrow sign of the Gram entry (+1 for a positive product), in the order
/// of [`Quiver::arrows`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    pub arrows: Vec<(usize, usize)>,
    pub signs: Vec<i8>,
}

impl SignAssignment {
    /// The Gram matrix with entries ε_ij·w_ij.
    pub fn realization(&self, q: &Quiver) -> Realization {
        let mut r = acyclic_gram(q);
        for (&(i, j), &e) in self.arrows.iter().zip(&self.signs) {
            if e > 0 {
                r.set(i, j, q.weight(i, j));
            }
        }
        r
    }
}

/// Solves the chordless-cycle parity equations over GF(2); None when infeasible.
pub fn admissible_sign_assignment(q: &Quiver) -> Option<SignAssignment> {
    let arrows = q.arrows();
    let m = arrows.len();
    let index: HashMap<(usize, usize), usize> = arrows.iter().enumerate().flat_map(|(t, &(i, j))| [((i, j), t), ((j, i), t)]).collect();
    let words = m.div_ceil(64).max(1);
    // row: coefficient bits followed by the right-hand side
    let mut rows: Vec<(Vec<u64>, bool)> = q
        .chordless_cycles()
        .iter()
        .map(|c| {
            let len = c.vertices.len();
            let mut bits = vec![0u64; words];
            for t in 0..len {
                let e = index[&(c.vertices[t], c.vertices[(t + 1) % len])];
                bits[e / 64] ^= 1 << (e % 64);
            }
            (bits, c.oriented)
        })
        .collect();
    let bit = |b: &[u64], e: usize| b[e / 64] >> (e % 64) & 1 == 1;
    let mut pivots = Vec::new();
    let mut r = 0;
    for e in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i].0, e)) else { continue };
        rows.swap(r, p);
        let (pb, prhs) = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(&row.0, e) {
                for w in 0..words {
                    row.0[w] ^= pb[w];
                }
                row.1 ^= prhs;
            }
        }
        pivots.push(e);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    // free variables negative, pivots read off the reduced rows
    let mut signs = vec![-1i8; m];
    for (t, &e) in pivots.iter().enumerate() {
        if rows[t].1 {
            signs[e] = 1;
        }
    }
    Some(SignAssignment { arrows, signs })
}

/// ε ∈ {±1}ⁿ with ε_i ε_j g_ij ≤ 0 for all i ≠ j, ε_0 = +1; None if there is none.
pub fn acute_sign_flip(r: &Realization) -> Option<Vec<i8>> {
    let n = r.n;
    let s = r.signs();
    let sign = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        s[a * (2 * n - a - 1) / 2 + (b - a - 1)]
    };
    (0u64..1 << (n - 1)).find_map(|mask| {
        let eps: Vec<i8> = (0..n).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 }).collect();
        let ok = (0..n).all(|i| ((i + 1)..n).all(|j| eps[i] * eps[j] * sign(i, j) <= 0));
        ok.then_some(eps)
    })
}

/// A failed check at some node of the propagation, with the mutation path to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationViolation {
    pub path: Vec<usize>,
    pub compatible: bool,
    pub admissible: bool,
}

#[derive(Debug, Clone)]
pub struct RealizationReport {
    /// Class member used as the starting point.
    pub start: Quiver,
    /// Mutation sequence from the given quiver to `start`.
    pub start_path: Vec<usize>,
    pub class_size: usize,
    /// Distinct (quiver, Gram) pairs up to vertex permutation and sign changes of the vectors.
    pub pairs: usize,
    /// Corank at the start; `corank_constant` records whether every node agreed.
    pub corank: usize,
    pub corank_constant: bool,
    pub violations: Vec<RealizationViolation>,
    pub exhausted: bool,
}

impl RealizationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.corank_constant && !self.exhausted
    }
}

fn pair_key(q: &Quiver, r: &Realization) -> Result<(CanonicalKey, Vec<i8>)> {
    let n = q.rank();
    let (key, orders) = canonical_labelings(q)?;
    let signs = r.signs();
    let idx = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    };
    let mut best: Option<Vec<i8>> = None;
    for o in &orders {
        for mask in 0u64..1 << (n - 1) {
            let eps = |p: usize| if p > 0 && mask >> (p - 1) & 1 == 1 { -1i8 } else { 1 };
            let mut v = Vec::with_capacity(signs.len());
            for p in 0..n {
                for t in (p + 1)..n {
                    v.push(eps(p) * eps(t) * signs[idx(o[p], o[t])]);
                }
            }
            if best.as_ref().map_or(true, |b| v < *b) {
                best = Some(v);
            }
        }
    }
    Ok((key, best.expect("at least one order")))
}

/// Propagates a realization of a class member through the whole class,
/// checking compatibility and admissibility at every (quiver, Gram) pair.
///
/// The start is the first member, in breadth-first order, that is acyclic or
/// of the double-arrow shape.
pub fn verify_class_realization(q: &Quiver, budget: &ExploreBudget) -> Result<RealizationReport> {
    let class = explore(q, budget, false)?;
    match class.verdict {
        Verdict::Finite => {}
        Verdict::Infinite => return Err(QmutError::NotFinite),
        Verdict::BudgetExhausted => return Err(QmutError::BudgetExhausted(budget.max_nodes)),
    }
    let (idx, r0) = class
        .members
        .iter()
        .enumerate()
        .find_map(|(t, m)| initial_realization(m).ok().map(|r| (t, r)))
        .ok_or(QmutError::NoRealizationShape)?;
    let start = class.members[idx].clone();
    let corank = gram_corank(&r0);
    let mut report = RealizationReport {
        start: start.clone(),
        start_path: class.member_paths[idx].clone(),
        class_size: class.size,
        pairs: 0,
        corank,
        corank_constant: true,
        violations: Vec::new(),
        exhausted: false,
    };
    let mut seen = HashMap::new();
    seen.insert(pair_key(&start, &r0)?, ());
    let mut queue = VecDeque::from([(start, r0, Vec::<usize>::new())]);
    while let Some((q, r, path)) = queue.pop_front() {
        let compatible = check_compatibility(&r, &q);
        let admissible = compatible && check_admissible(&r, &q);
        if !admissible {
            report.violations.push(RealizationViolation { path, compatible, admissible });
            continue;
        }
        if gram_corank(&r) != corank {
            report.corank_constant = false;
        }
        for k in 0..q.rank() {
            let r2 = reflect(&r, &q, k);
            let q2 = q.mutate_unchecked(k);
            let key = pair_key(&q2, &r2)?;
            if seen.contains_key(&key) {
                continue;
            }
            if seen.len() >= budget.max_nodes {
                report.exhausted = true;
                break;
            }
            seen.insert(key, ());
            let mut p = path.clone();
            p.push(k);
            queue.push_back((q2, r2, p));
        }
    }
    report.pairs = seen.len();
    Ok(report)
}

/// A finite class with a member whose parity system has no solution.
#[derive(Debug, Clone)]
pub struct UnrealizableClass {
    pub class: ClassReport,
    pub member: Quiver,
}

/// Finite connected classes of integer quivers (weights at most 2) of rank
/// `max_rank` or less that have a member without an admissible sign assignment.
/// The ranks are built up from rank 3 by [`extend_classification`].
pub fn unrealizable_integer_classes(max_rank: usize, budget: &ExploreBudget) -> Result<Vec<UnrealizableClass>> {
    let alphabet: Vec<CycloReal> = (-2..=2).map(|v| CycloReal::from_int(v, 1)).collect();
    let mut seen = HashSet::new();
    let mut level = Vec::new();
    for code in 0..125usize {
        let mut c = code;
        let mut arrows = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let v = c % 5;
            c /= 5;
            if v != 2 {
                arrows.push((i, j, alphabet[v].clone()));
            }
        }
        let q = Quiver::from_weights(3, 1, &arrows)?;
        if !q.is_connected() || !seen.insert(canonical_form(&q, false)?) {
            continue;
        }
        let class = explore(&q, budget, false)?;
        if class.verdict == Verdict::Finite {
            for m in &class.members {
                seen.insert(canonical_form(m, false)?);
            }
            level.push(class);
        }
    }
    let mut out = Vec::new();
    for _ in 4..=max_rank {
        level = extend_classification(&level, &alphabet, budget, false)?.classes;
        for class in &level {
            if let Some(m) = class.members.iter().find(|m| admissible_sign_assignment(m).is_none()) {
                out.push(UnrealizableClass { class: class.clone(), member: m.clone() });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::AngleLabel;

    fn l(n: i64, d: i64) -> AngleLabel {
        AngleLabel::new(n, d).unwrap()
    }

    #[test]
    fn h3_initial() {
        let q = Quiver::path(&[l(1, 3), l(1, 5)]);
        let r = initial_realization(&q).unwrap();
        assert_eq!(r.get(0, 1).approx(), -1.0);
        assert!((r.get(1, 2).approx() + 2.0 * (std::f64::consts::PI / 5.0).cos()).abs() < 1e-12);
        assert!(r.get(0, 2).is_zero());
        assert!(check_compatibility(&r, &q) && check_admissible(&r, &q));
        assert_eq!(gram_corank(&r), 0);
        assert_eq!(acute_sign_flip(&r), Some(vec![1, 1, 1]));
    }

    #[test]
    fn flipped_sign_breaks_admissibility() {
        let q = Quiver::triangle(l(1, 3), l(1, 3), l(1, 3), true);
        let sa = admissible_sign_assignment(&q).unwrap();
        assert_eq!(sa.signs.iter().filter(|&&s| s > 0).count() % 2, 1);
        let r = sa.realization(&q);
        assert!(check_admissible(&r, &q));
        let mut bad = r.clone();
        bad.set(0, 1, -r.get(0, 1));
        assert!(check_compatibility(&bad, &q));
        assert!(!check_admissible(&bad, &q));
    }

    #[test]
    fn source_mutation_is_a_sign_change() {
        let q = Quiver::path(&[l(1, 3), l(1, 5)]);
        // vertex 0 is a source: no j with b_j0 > 0, only v_0 changes sign
        let r = initial_realization(&q).unwrap();
        let r2 = mutate_realization(&r, &q, 0).unwrap();
        let mut eps = vec![1i8; 3];
        eps[0] = -1;
        assert_eq!(r2, r.sign_conjugate(&eps));
    }

    #[test]
    fn double_mutation_is_sign_conjugation() {
        let q = Quiver::path(&[l(1, 3), l(1, 5)]);
        let r = initial_realization(&q).unwrap();
        for k in 0..3 {
            let q1 = q.mutate(k).unwrap();
            let r1 = mutate_realization(&r, &q, k).unwrap();
            let r2 = mutate_realization(&r1, &q1, k).unwrap();
            let found = (0u32..8).any(|m| {
                let eps: Vec<i8> = (0..3).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect();
                r.sign_conjugate(&eps) == r2
            });
            assert!(found, "vertex {k}");
        }
    }

    #[test]
    fn double_arrow_shape() {
        // 0 ⇉ 2 with 1 seeing both ends alike
        let q = Quiver::from_labels(3, &[(0, 2, l(0, 1)), (2, 1, l(1, 3)), (1, 0, l(1, 3))]).unwrap();
        let r = initial_realization(&q).unwrap();
        assert_eq!(r.get(0, 1), r.get(2, 1));
        assert!(check_compatibility(&r, &q) && check_admissible(&r, &q));
        assert_eq!(gram_corank(&r), 1);
        let cyc = Quiver::triangle(l(1, 3), l(1, 3), l(1, 3), true);
        assert_eq!(initial_realization(&cyc), Err(QmutError::NoRealizationShape));
    }

    #[test]
    fn acute_flip_examples() {
        let q = Quiver::triangle(l(1, 3), l(1, 3), l(1, 3), true);
        let amb = q.ambient();
        let one = CycloReal::from_int(1, amb);
        let two = CycloReal::from_int(2, amb);
        let g = |a: &CycloReal, b: &CycloReal, c: &CycloReal| {
            Realization::from_rows(&[
                vec![two.clone(), a.clone(), c.clone()],
                vec![a.clone(), two.clone(), b.clone()],
                vec![c.clone(), b.clone(), two.clone()],
            ])
            .unwrap()
        };
        let zero = CycloReal::zero(amb);
        // one positive product on a path: flip an end of it
        let eps = acute_sign_flip(&g(&one, &-&one, &zero)).unwrap();
        assert_eq!(eps[0] * eps[1], -1);
        // on a triangle the product of the three signs is invariant
        assert_eq!(acute_sign_flip(&g(&one, &-&one, &-&one)), None);
        assert_eq!(acute_sign_flip(&g(&one, &one, &one)), None);
        assert!(acute_sign_flip(&g(&one, &one, &-&one)).is_some());
    }

    #[test]
    fn h3_class() {
        let q = Quiver::path(&[l(1, 3), l(1, 5)]);
        let rep = verify_class_realization(&q, &ExploreBudget::default()).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.corank, 0);
        assert_eq!(rep.class_size, 6);
    }

    #[test]
    fn some_integer_class_has_no_admissible_realization() {
        let found = unrealizable_integer_classes(5, &ExploreBudget::with_max_nodes(50_000)).unwrap();
        assert!(!found.is_empty());
        for u in &found {
            assert_eq!(u.member.ambient(), 1);
            assert!(u.class.members.iter().any(|m| m == &u.member));
        }
    }

    #[test]
    fn gf2_system_on_acyclic_quiver() {
        let q = Quiver::path(&[l(1, 3), l(1, 5), l(1, 3)]);
        let sa = admissible_sign_assignment(&q).unwrap();
        assert!(sa.signs.iter().all(|&s| s < 0));
    }
}
