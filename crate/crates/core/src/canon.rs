//! Canonical forms of quivers up to vertex permutation (and optionally opposite).
//!
//! Entry values are interned in a permutation-invariant order, colour refinement
//! splits the vertices, and the lexicographically least id matrix is found by a
//! pruned search over orders that respect the colour classes.

use crate::cyclo::CycloReal;
use crate::error::{QmutError, Result};
use crate::quiver::Quiver;
use std::cmp::Ordering;
use std::fmt;

pub const DEFAULT_RANK_BOUND: usize = 10;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(")?;
        for b in self.0.iter().take(16) {
            write!(f, "{b:02x}")?;
        }
        if self.0.len() > 16 {
            write!(f, "…")?;
        }
        write!(f, ")")
    }
}

struct Interned {
    values: Vec<CycloReal>,
    /// lower-triangle-and-upper id matrix, n*n, diagonal unused
    ids: Vec<u8>,
}

fn intern(q: &Quiver) -> Interned {
    let n = q.rank();
    let mut refs: Vec<&CycloReal> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                refs.push(q.entry(i, j));
            }
        }
    }
    refs.sort_by(|a, b| a.cmp_coeffs(b));
    refs.dedup_by(|a, b| a.cmp_coeffs(b) == Ordering::Equal);
    assert!(refs.len() <= 255);
    let mut ids = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let e = q.entry(i, j);
                ids[i * n + j] = refs.binary_search_by(|x| x.cmp_coeffs(e)).expect("interned") as u8;
            }
        }
    }
    Interned { values: refs.into_iter().cloned().collect(), ids }
}

/// Stable colouring by iterated neighbourhood signatures.
fn refine(n: usize, ids: &[u8]) -> Vec<u32> {
    let mut colour = vec![0u32; n];
    let mut classes = 1;
    loop {
        let mut sigs: Vec<(Vec<u32>, usize)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = (0..n).filter(|&j| j != v).map(|j| (ids[v * n + j] as u32) << 16 | colour[j]).collect();
                nb.sort_unstable();
                nb.insert(0, colour[v]);
                (nb, v)
            })
            .collect();
        sigs.sort();
        let mut next = vec![0u32; n];
        let mut c = 0u32;
        for t in 0..n {
            if t > 0 && sigs[t].0 != sigs[t - 1].0 {
                c += 1;
            }
            next[sigs[t].1] = c;
        }
        let new_classes = c as usize + 1;
        colour = next;
        if new_classes == classes {
            return colour;
        }
        classes = new_classes;
    }
}

struct Search<'a> {
    n: usize,
    ids: &'a [u8],
    slot_colour: Vec<u32>,
    colour: Vec<u32>,
    /// flattened key: for p in 1..n, for t in 0..p: ids[order[p]][order[t]]
    cur: Vec<u8>,
    best: Option<Vec<u8>>,
    order: Vec<usize>,
    used: Vec<bool>,
    want_all: bool,
    orders: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn run(&mut self, p: usize) {
        if p == self.n {
            let better = self.best.as_ref().map_or(true, |b| self.cur < *b);
            if better {
                self.best = Some(self.cur.clone());
                self.orders.clear();
                self.orders.push(self.order.clone());
            } else if self.want_all && self.best.as_deref() == Some(&self.cur[..]) {
                self.orders.push(self.order.clone());
            }
            return;
        }
        for v in 0..self.n {
            if self.used[v] || self.colour[v] != self.slot_colour[p] {
                continue;
            }
            let len = self.cur.len();
            for t in 0..p {
                self.cur.push(self.ids[v * self.n + self.order[t]]);
            }
            let prune = match &self.best {
                Some(b) => {
                    let c = self.cur[..].cmp(&b[..self.cur.len()]);
                    c == Ordering::Greater || (c == Ordering::Equal && !self.want_all && p + 1 == self.n)
                }
                None => false,
            };
            if !prune {
                self.used[v] = true;
                self.order.push(v);
                self.run(p + 1);
                self.order.pop();
                self.used[v] = false;
            }
            self.cur.truncate(len);
        }
    }
}

struct Minimum {
    key: CanonicalKey,
    orders: Vec<Vec<usize>>,
}

fn minimum(q: &Quiver, want_all: bool) -> Minimum {
    let n = q.rank();
    let Interned { values, ids } = intern(q);
    let colour = refine(n, &ids);
    let mut slot_colour = colour.clone();
    slot_colour.sort_unstable();
    let mut s = Search {
        n,
        ids: &ids,
        slot_colour,
        colour,
        cur: Vec::with_capacity(n * n.saturating_sub(1) / 2),
        best: None,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        want_all,
        orders: Vec::new(),
    };
    s.run(0);
    let best = s.best.take().expect("at least one order");
    let mut bytes = Vec::with_capacity(16 + values.len() * 24 + best.len());
    bytes.push(n as u8);
    bytes.extend_from_slice(&q.ambient().to_be_bytes());
    bytes.push(values.len() as u8);
    for v in &values {
        v.write_key(&mut bytes);
    }
    bytes.extend_from_slice(&best);
    Minimum { key: CanonicalKey(bytes), orders: s.orders }
}

fn check_rank(q: &Quiver) -> Result<()> {
    if q.rank() > DEFAULT_RANK_BOUND {
        return Err(QmutError::RankTooLarge { rank: q.rank(), bound: DEFAULT_RANK_BOUND });
    }
    Ok(())
}

/// Key equal for two quivers iff they differ by a vertex permutation
/// (and, with `mod_opposite`, possibly by reversing all arrows).
pub fn canonical_form(q: &Quiver, mod_opposite: bool) -> Result<CanonicalKey> {
    check_rank(q)?;
    let k = minimum(q, false).key;
    if mod_opposite {
        let ko = minimum(&q.opposite(), false).key;
        return Ok(k.min(ko));
    }
    Ok(k)
}

/// Canonical key together with one order `o` such that `q.permuted(&o)` is the
/// canonical representative. Never identifies a quiver with its opposite.
pub fn canonical_labeling(q: &Quiver) -> Result<(CanonicalKey, Vec<usize>)> {
    check_rank(q)?;
    let m = minimum(q, false);
    Ok((m.key, m.orders.into_iter().next().unwrap()))
}

/// Like [`canonical_labeling`] but returns every minimizing order
/// (a coset of the automorphism group).
pub fn canonical_labelings(q: &Quiver) -> Result<(CanonicalKey, Vec<Vec<usize>>)> {
    check_rank(q)?;
    let m = minimum(q, true);
    Ok((m.key, m.orders))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::AngleLabel;
    use proptest::prelude::*;

    fn l(n: i64, d: i64) -> AngleLabel {
        AngleLabel::new(n, d).unwrap()
    }

    // oracle: brute-force isomorphism test over all permutations
    fn isomorphic(a: &Quiver, b: &Quiver) -> bool {
        let n = a.rank();
        if n != b.rank() {
            return false;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            if a.permuted(&perm) == *b {
                return true;
            }
            let mut i = n - 1;
            while i > 0 && perm[i - 1] >= perm[i] {
                i -= 1;
            }
            if i == 0 {
                return false;
            }
            let mut j = n - 1;
            while perm[j] <= perm[i - 1] {
                j -= 1;
            }
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
    }

    #[test]
    fn examples() {
        let p = Quiver::path(&[l(1, 3), l(1, 5)]);
        let k = canonical_form(&p, false).unwrap();
        assert_eq!(k, canonical_form(&p.permuted(&[2, 0, 1]), false).unwrap());
        assert_ne!(k, canonical_form(&p.opposite(), false).unwrap());
        assert_eq!(canonical_form(&p, true).unwrap(), canonical_form(&p.opposite(), true).unwrap());
        let cyc = Quiver::triangle(l(1, 3), l(1, 3), l(1, 3), true);
        let acyc = Quiver::triangle(l(1, 3), l(1, 3), l(1, 3), false);
        assert_ne!(canonical_form(&cyc, true).unwrap(), canonical_form(&acyc, true).unwrap());
        let big = Quiver::empty(11, 1);
        assert!(canonical_form(&big, false).is_err());
    }

    #[test]
    fn all_orders_of_symmetric_quiver() {
        let m = Quiver::triangle(l(0, 1), l(0, 1), l(0, 1), true);
        let (key, orders) = canonical_labelings(&m).unwrap();
        assert_eq!(orders.len(), 3); // rotations
        for o in &orders {
            assert_eq!(canonical_labeling(&m.permuted(o)).unwrap().0, key);
        }
    }

    fn arb_quiver() -> impl Strategy<Value = (Quiver, Vec<usize>)> {
        let labels = vec![l(0, 1), l(1, 3), l(1, 5), l(2, 5), l(1, 2), l(1, 2)];
        (2usize..=6).prop_flat_map(move |n| {
            let labels = labels.clone();
            (
                proptest::collection::vec((0..labels.len(), any::<bool>()), n * (n - 1) / 2),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
                .prop_map(move |(choice, perm)| {
                    let mut arrows = Vec::new();
                    let mut t = 0;
                    for i in 0..n {
                        for j in (i + 1)..n {
                            let (idx, dir) = choice[t];
                            t += 1;
                            if labels[idx] != l(1, 2) {
                                arrows.push(if dir { (i, j, labels[idx]) } else { (j, i, labels[idx]) });
                            }
                        }
                    }
                    (Quiver::from_labels_in(n, 5, &arrows).unwrap(), perm)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn permutation_invariant_and_minimal((q, perm) in arb_quiver()) {
            let n = q.rank();
            let (k, order) = canonical_labeling(&q).unwrap();
            let k2 = canonical_form(&q.permuted(&perm), false).unwrap();
            prop_assert_eq!(&k, &k2);
            let r = q.permuted(&perm).opposite();
            prop_assert_eq!(isomorphic(&q, &r), k == canonical_form(&r, false).unwrap());
            // the reported order realizes the key
            let canon = q.permuted(&order);
            prop_assert_eq!(&canonical_labeling(&canon).unwrap().0, &k);
            prop_assert!(canonical_labelings(&canon).unwrap().1.contains(&(0..n).collect::<Vec<_>>()));
            let ko = canonical_form(&q, true).unwrap();
            prop_assert_eq!(ko, canonical_form(&q.opposite().permuted(&perm), true).unwrap());
        }
    }
}
