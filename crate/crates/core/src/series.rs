//! The three infinite families of rank-4 mutation-finite quivers with highest
//! denominator d > 5, in their six-parameter standard form.
//!
//! Vertices are 0-based here as everywhere in the library: vertex 0 is the
//! first vertex of the standard form.

use crate::canon::canonical_form;
use crate::cyclo::AngleLabel;
use crate::error::{QmutError, Result};
use crate::explore::{bfs, ExploreBudget, Verdict};
use crate::quiver::Quiver;
use num_integer::Integer;
use std::collections::HashSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// d = 2n+1
    Odd,
    /// d = 2n, k+q ∈ {n−1, n+1}
    EvenA,
    /// d = 2n, k+q = n
    EvenB,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Odd, Family::EvenA, Family::EvenB];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Odd => "ODD",
            Family::EvenA => "EVEN_A",
            Family::EvenB => "EVEN_B",
        }
    }

    pub fn denominator(self, n: u32) -> u32 {
        match self {
            Family::Odd => 2 * n + 1,
            _ => 2 * n,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = QmutError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "ODD" => Ok(Family::Odd),
            "EVEN_A" => Ok(Family::EvenA),
            "EVEN_B" => Ok(Family::EvenB),
            _ => Err(QmutError::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Parameters (k, q, m, s) of a standard-form quiver; arrows carry the labels
/// k, q, m, s, m+q, s+q over the denominator d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardForm {
    pub family: Family,
    pub n: u32,
    pub k: u32,
    pub q: u32,
    pub m: u32,
    pub s: u32,
}

fn conditions(family: Family, n: u32, k: u32, q: u32, m: u32, s: u32) -> std::result::Result<(), String> {
    let (n, k, q, m, s) = (n as i64, k as i64, q as i64, m as i64, s as i64);
    if n < 2 {
        return Err(format!("n = {n} < 2"));
    }
    let c1 = match family {
        Family::Odd => k + q == n || k + q == n + 1,
        Family::EvenA => k + q == n - 1 || k + q == n + 1,
        Family::EvenB => k + q == n,
    };
    if !c1 {
        return Err(format!("(1) fails: k+q = {}", k + q));
    }
    let c2 = match family {
        // k > n/2 ≥ q
        Family::Odd => 2 * k > n && n >= 2 * q,
        _ => k >= n / 2 && n / 2 >= q,
    };
    if !c2 {
        return Err("(2) fails".into());
    }
    let total = if family == Family::Odd { 2 * n + 1 } else { 2 * n };
    if s + m + k + q != total {
        return Err(format!("(3) fails: s+m+k+q = {}", s + m + k + q));
    }
    if !(q <= s && q <= m && s <= n - q && m <= n - q && s > 0 && m > 0) {
        return Err("(4) fails".into());
    }
    Ok(())
}

impl StandardForm {
    pub fn new(family: Family, n: u32, k: u32, q: u32, m: u32, s: u32) -> Result<Self> {
        conditions(family, n, k, q, m, s).map_err(QmutError::ConditionViolation)?;
        Ok(StandardForm { family, n, k, q, m, s })
    }

    pub fn d(&self) -> u32 {
        self.family.denominator(self.n)
    }

    pub fn is_valid(&self) -> bool {
        conditions(self.family, self.n, self.k, self.q, self.m, self.s).is_ok()
    }

    /// Label numerators in the order k, q, m, s, m+q, s+q.
    pub fn numerators(&self) -> [u32; 6] {
        [self.k, self.q, self.m, self.s, self.m + self.q, self.s + self.q]
    }

    /// The (k, q, m, s) ↦ (k, q, s, m) symmetry: the opposite quiver relabelled by (14)(23).
    pub fn swapped(&self) -> StandardForm {
        StandardForm { m: self.s, s: self.m, ..*self }
    }

    /// False when every label shares a factor with d. Such a quiver has a
    /// smaller highest denominator and lies in a different mutation class.
    pub fn is_primitive(&self) -> bool {
        [self.k, self.q, self.m, self.s].iter().fold(self.d(), |g, &x| x.gcd(&g)) == 1
    }

    fn with(&self, k: u32, q: u32, m: u32, s: u32) -> StandardForm {
        StandardForm { k, q, m, s, ..*self }
    }
}

impl fmt::Display for StandardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} (k,q,m,s)=({},{},{},{})", self.family, self.n, self.k, self.q, self.m, self.s)
    }
}

/// Every tuple satisfying the family conditions, in lexicographic (k, q, m, s) order.
pub fn valid_tuples(family: Family, n: u32) -> Vec<StandardForm> {
    let mut out = Vec::new();
    for k in 0..=n {
        for q in 0..=n {
            for m in 0..=n {
                for s in 0..=n {
                    if conditions(family, n, k, q, m, s).is_ok() {
                        out.push(StandardForm { family, n, k, q, m, s });
                    }
                }
            }
        }
    }
    out
}

/// Lexicographically least primitive valid tuple; any primitive valid tuple
/// generates the class.
pub fn seed(family: Family, n: u32) -> Result<StandardForm> {
    valid_tuples(family, n)
        .into_iter()
        .find(StandardForm::is_primitive)
        .ok_or_else(|| QmutError::ConditionViolation(format!("{family} has no valid tuple for n = {n}")))
}

/// Arrow pattern of the standard form: for the labels k, q, m, s, m+q, s+q in
/// this order, the (tail, head) of the arrow carrying it.
pub type Pattern = [(usize, usize); 6];

/// The pattern selected by [`find_patterns`] (see the regression test).
pub const STANDARD_PATTERN: Pattern = [(1, 2), (0, 3), (3, 1), (2, 0), (1, 0), (3, 2)];

pub fn realize_with(sf: &StandardForm, pattern: &Pattern) -> Quiver {
    let d = sf.d();
    let mut arrows = Vec::with_capacity(6);
    for (&num, &(a, b)) in sf.numerators().iter().zip(pattern) {
        // 2·num = d is a vanishing arrow
        if 2 * num != d {
            arrows.push((a, b, AngleLabel::new(num as i64, d as i64).expect("num ≤ n < d")));
        }
    }
    Quiver::from_labels_in(4, d, &arrows).expect("labels over d")
}

/// The rank-4 quiver of a standard form.
pub fn realize_standard_form(sf: &StandardForm) -> Result<Quiver> {
    if !sf.is_valid() {
        return Err(QmutError::ConditionViolation(conditions(sf.family, sf.n, sf.k, sf.q, sf.m, sf.s).unwrap_err()));
    }
    Ok(realize_with(sf, &STANDARD_PATTERN))
}

fn check_input(sf: &StandardForm) -> Result<()> {
    conditions(sf.family, sf.n, sf.k, sf.q, sf.m, sf.s).map_err(QmutError::ConditionViolation)
}

// The case formulas for the odd family are those of the finiteness proof.
// For EVEN_A the boundary of each case split depends on whether k+q is n−1 or
// n+1, and two shapes with a vanishing arrow need their own images at vertex 1.
// These were derived by comparing with matrix mutation and are checked
// exhaustively by `verify_closure`.
fn split0(sf: &StandardForm) -> u32 {
    match sf.family {
        Family::EvenA if sf.k + sf.q > sf.n => sf.n - 1,
        _ => sf.n,
    }
}

fn split1(sf: &StandardForm) -> u32 {
    match sf.family {
        Family::EvenA if sf.k + sf.q < sf.n => sf.n - 1,
        _ => sf.n,
    }
}

fn mu0(sf: &StandardForm) -> StandardForm {
    let StandardForm { k, q, m, s, .. } = *sf;
    if m + 2 * q <= split0(sf) {
        // Case 1a
        sf.with(k, q, m + q, s - q)
    } else {
        // Case 1b
        sf.with(m + q, s - q, q, k)
    }
}

fn mu1(sf: &StandardForm) -> StandardForm {
    let StandardForm { n, k, q, m, s, .. } = *sf;
    if 2 * m + q <= split1(sf) {
        // Case 2a
        return sf.with(s, m, k - m, m + q);
    }
    if sf.family == Family::EvenA {
        if k == n {
            // the k arrow vanishes (and q = 1)
            return sf.with(m, s, m + q, s + q);
        }
        if k < m {
            // m = k+1, so the m+q arrow vanishes
            return if q == 0 { sf.swapped() } else { sf.with(n, 1, k, q) };
        }
    }
    // Case 2b
    sf.with(m + q, k - m, s, m)
}

/// Standard form of the quiver mutated at `vertex` (0-based), by the case
/// formulas of the finiteness proof. Vertices 2 and 3 reduce to 1 and 0 through
/// [`StandardForm::swapped`].
pub fn param_mutation(sf: &StandardForm, vertex: usize) -> Result<StandardForm> {
    check_input(sf)?;
    Ok(match vertex {
        0 => mu0(sf),
        1 => mu1(sf),
        2 => mu1(&sf.swapped()).swapped(),
        3 => mu0(&sf.swapped()).swapped(),
        _ => return Err(QmutError::VertexOutOfRange { vertex, rank: 4 }),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub family: Family,
    pub n: u32,
    pub tuples: usize,
    /// (tuple, vertex) pairs whose mutated parameters violate the conditions.
    pub invalid_images: Vec<(StandardForm, usize)>,
    /// (tuple, vertex) pairs where the matrix mutation disagrees with the parameter map.
    pub mismatches: Vec<(StandardForm, usize)>,
    /// Whether the matrix-level comparison was run.
    pub matrix_checked: bool,
    /// Class size of the realized seed, when the matrix check was run.
    pub class_size: Option<usize>,
    /// Distinct isomorphism classes among the realized primitive tuples.
    pub realized_forms: Option<usize>,
    /// Valid tuples that are not primitive (excluded from the class count).
    pub non_primitive: usize,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.tuples > 0
            && self.invalid_images.is_empty()
            && self.mismatches.is_empty()
            && self.class_size.zip(self.realized_forms).map_or(true, |(a, b)| a == b)
    }
}

/// Exhaustive closure check of the parameter maps; with `matrix_check` also
/// compares against matrix mutation of the realized quivers and against the
/// explored class of the seed.
pub fn verify_closure(family: Family, n: u32, matrix_check: bool) -> Result<ClosureReport> {
    let tuples = valid_tuples(family, n);
    let mut report = ClosureReport {
        family,
        n,
        tuples: tuples.len(),
        invalid_images: Vec::new(),
        mismatches: Vec::new(),
        matrix_checked: matrix_check,
        class_size: None,
        realized_forms: None,
        non_primitive: tuples.iter().filter(|sf| !sf.is_primitive()).count(),
    };
    for sf in &tuples {
        let q = matrix_check.then(|| realize_with(sf, &STANDARD_PATTERN));
        for v in 0..4 {
            let image = param_mutation(sf, v)?;
            if !image.is_valid() {
                report.invalid_images.push((*sf, v));
                continue;
            }
            if let Some(q) = &q {
                let lhs = canonical_form(&q.mutate(v)?, false)?;
                let rhs = canonical_form(&realize_with(&image, &STANDARD_PATTERN), false)?;
                if lhs != rhs {
                    report.mismatches.push((*sf, v));
                }
            }
        }
    }
    if matrix_check && !tuples.is_empty() {
        let forms: HashSet<_> = tuples
            .iter()
            .filter(|sf| sf.is_primitive())
            .map(|sf| canonical_form(&realize_with(sf, &STANDARD_PATTERN), false))
            .collect::<Result<_>>()?;
        report.realized_forms = Some(forms.len());
        let s = bfs(&realize_with(&seed(family, n)?, &STANDARD_PATTERN), &ExploreBudget::default(), false)?;
        if s.verdict == Verdict::Finite {
            report.class_size = Some(s.tree.len());
        }
    }
    Ok(report)
}

/// Valid tuples of an even family with some label equal to n, i.e. a vanishing arrow.
pub fn vanishing_arrow_catalogue(family: Family, n: u32) -> Result<Vec<StandardForm>> {
    if family == Family::Odd {
        return Err(QmutError::OddFamily);
    }
    Ok(valid_tuples(family, n).into_iter().filter(|sf| sf.numerators().contains(&n)).collect())
}

/// Which of the vanishing-arrow cases a catalogue entry falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VanishingCase {
    /// k = n, and no other label equals n.
    K,
    /// m = n or s = n (k ≠ n).
    MOrS,
    /// m+q = n or s+q = n, but not both (k, m, s ≠ n).
    OneSum,
    /// m+q = s+q = n (k, m, s ≠ n).
    BothSums,
}

/// Classifies a tuple with a vanishing arrow; None if the labels fit none of the cases.
pub fn vanishing_case(sf: &StandardForm) -> Option<VanishingCase> {
    let n = sf.n;
    let [k, q, m, s, mq, sq] = sf.numerators();
    if q == n {
        return None;
    }
    if k == n {
        return (m != n && s != n && mq != n && sq != n).then_some(VanishingCase::K);
    }
    if m == n || s == n {
        return Some(VanishingCase::MOrS);
    }
    match (mq == n, sq == n) {
        (true, true) => Some(VanishingCase::BothSums),
        (true, false) | (false, true) => Some(VanishingCase::OneSum),
        _ => None,
    }
}

/// For primitive tuples: same mutation class iff same denominator and same
/// condition set. A non-primitive tuple has a smaller highest denominator, so
/// its class is found by exploring it.
pub fn same_class(a: &StandardForm, b: &StandardForm) -> Result<bool> {
    if a.is_primitive() && b.is_primitive() {
        return Ok(a.d() == b.d() && a.family == b.family);
    }
    if a.is_primitive() != b.is_primitive() || a.d() != b.d() {
        return Ok(false);
    }
    let s = bfs(&realize_standard_form(a)?, &ExploreBudget::default(), false)?;
    if s.verdict != Verdict::Finite {
        return Err(QmutError::NotFinite);
    }
    Ok(s.keys.contains_key(&canonical_form(&realize_standard_form(b)?, false)?))
}

/// Searches all assignments of the six labels to oriented vertex pairs for
/// patterns under which the parameter maps agree with matrix mutation for all
/// valid tuples of every family with n ≤ `max_n`. Survivors come in pairs
/// related by reversing every arrow; [`STANDARD_PATTERN`] is the smaller one.
pub fn find_patterns(max_n: u32) -> Vec<Pattern> {
    let pairs: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = Vec::new();
    let mut perm = [0usize, 1, 2, 3, 4, 5];
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    let tuples: Vec<StandardForm> = Family::ALL.iter().flat_map(|&f| (2..=max_n).flat_map(move |n| valid_tuples(f, n))).collect();
    for assignment in perms {
        for orient in 0u32..64 {
            let mut pattern: Pattern = [(0, 0); 6];
            for (label, &slot) in assignment.iter().enumerate() {
                let (a, b) = pairs[slot];
                pattern[label] = if orient >> label & 1 == 0 { (a, b) } else { (b, a) };
            }
            if pattern_ok(&pattern, &tuples) {
                out.push(pattern);
            }
        }
    }
    out.sort();
    out
}

fn permutations(a: &mut [usize; 6], p: usize, out: &mut Vec<[usize; 6]>) {
    if p == a.len() {
        out.push(*a);
        return;
    }
    for t in p..a.len() {
        a.swap(p, t);
        permutations(a, p + 1, out);
        a.swap(p, t);
    }
}

fn pattern_ok(pattern: &Pattern, tuples: &[StandardForm]) -> bool {
    for sf in tuples {
        let q = realize_with(sf, pattern);
        for v in 0..4 {
            let image = param_mutation(sf, v).expect("valid");
            if !image.is_valid() {
                return false;
            }
            let lhs = canonical_form(&q.mutate_unchecked(v), false).expect("rank 4");
            let rhs = canonical_form(&realize_with(&image, pattern), false).expect("rank 4");
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}
