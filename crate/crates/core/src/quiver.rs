//! Quivers as skew-symmetric matrices over Q(2cos(π/N)).
//!
//! Vertices are 0-based in the library; the CLI and the JSON format are 1-based.

use crate::cyclo::{AngleLabel, CycloReal};
use crate::error::{QmutError, Result};
use num_integer::Integer;
use std::fmt;

#[derive(Clone)]
pub struct Quiver {
    n: usize,
    ambient: u32,
    b: Vec<CycloReal>,
    sign: Vec<i8>,
}

/// A chordless cycle of the underlying graph, vertices in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordlessCycle {
    pub vertices: Vec<usize>,
    pub oriented: bool,
}

/// The first arrow whose weight has no label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelFailure {
    pub i: usize,
    pub j: usize,
}

/// Least ambient order carrying all the given labels; rational labels need none.
pub fn ambient_for_labels<'a>(labels: impl IntoIterator<Item = &'a AngleLabel>) -> u32 {
    labels.into_iter().filter(|l| l.rational_value().is_none()).fold(1u32, |acc, l| acc.lcm(&l.den()))
}

impl Quiver {
    /// The rank-n quiver without arrows.
    pub fn empty(n: usize, ambient: u32) -> Quiver {
        Quiver { n, ambient, b: vec![CycloReal::zero(ambient); n * n], sign: vec![0; n * n] }
    }

    /// Builds a quiver from arrows `(i, j, label)` meaning i→j of weight 2cos(π·label).
    pub fn from_labels(n: usize, arrows: &[(usize, usize, AngleLabel)]) -> Result<Quiver> {
        let ambient = ambient_for_labels(arrows.iter().map(|a| &a.2));
        Quiver::from_labels_in(n, ambient, arrows)
    }

    pub fn from_labels_in(n: usize, ambient: u32, arrows: &[(usize, usize, AngleLabel)]) -> Result<Quiver> {
        let weights = arrows.iter().map(|&(i, j, l)| Ok((i, j, CycloReal::from_label(l, ambient)?))).collect::<Result<Vec<_>>>()?;
        Quiver::from_weights(n, ambient, &weights)
    }

    /// Builds a quiver from arrows `(i, j, w)`; a negative `w` reverses the arrow.
    pub fn from_weights(n: usize, ambient: u32, arrows: &[(usize, usize, CycloReal)]) -> Result<Quiver> {
        let mut q = Quiver::empty(n, ambient);
        for (i, j, w) in arrows {
            let (i, j) = (*i, *j);
            for v in [i, j] {
                if v >= n {
                    return Err(QmutError::VertexOutOfRange { vertex: v, rank: n });
                }
            }
            if i == j {
                return Err(QmutError::NotSkewSymmetric);
            }
            q.set(i, j, w.lift(ambient)?);
        }
        Ok(q)
    }

    /// Builds a quiver from a full matrix, checking skew-symmetry.
    pub fn from_matrix(rows: &[Vec<CycloReal>]) -> Result<Quiver> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QmutError::NotSkewSymmetric);
        }
        let ambient = rows.iter().flatten().fold(1u32, |acc, x| acc.lcm(&x.ambient()));
        let mut q = Quiver::empty(n, ambient);
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return Err(QmutError::NotSkewSymmetric);
            }
            for j in (i + 1)..n {
                if rows[i][j] != -&rows[j][i] {
                    return Err(QmutError::NotSkewSymmetric);
                }
                q.set(i, j, rows[i][j].lift(ambient)?);
            }
        }
        Ok(q)
    }

    /// Acyclic path 0→1→…→r with the given weight labels.
    pub fn path(labels: &[AngleLabel]) -> Quiver {
        let arrows: Vec<_> = labels.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
        Quiver::from_labels(labels.len() + 1, &arrows).expect("valid path")
    }

    /// Rank-3 triangle with 0→1 (a), 1→2 (b) and the third arrow 2→0 when
    /// `cyclic`, else 0→2, both of weight c. The acyclic case is (a, b, −c).
    pub fn triangle(a: AngleLabel, b: AngleLabel, c: AngleLabel, cyclic: bool) -> Quiver {
        let third = if cyclic { (2, 0, c) } else { (0, 2, c) };
        Quiver::from_labels(3, &[(0, 1, a), (1, 2, b), third]).expect("valid triangle")
    }

    /// Sets b[i][j] = w and b[j][i] = −w.
    pub fn set(&mut self, i: usize, j: usize, w: CycloReal) {
        let w = if w.ambient() == self.ambient { w } else { w.lift(self.ambient).expect("ambient") };
        let s = w.sign() as i8;
        let n = self.n;
        self.b[j * n + i] = -&w;
        self.b[i * n + j] = w;
        self.sign[i * n + j] = s;
        self.sign[j * n + i] = -s;
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    pub fn entry(&self, i: usize, j: usize) -> &CycloReal {
        &self.b[i * self.n + j]
    }

    /// Sign of b[i][j]: +1 for an arrow i→j, −1 for j→i, 0 if none.
    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.sign[i * self.n + j]
    }

    pub fn has_arrow(&self, i: usize, j: usize) -> bool {
        self.sign[i * self.n + j] != 0
    }

    /// |b[i][j]|.
    pub fn weight(&self, i: usize, j: usize) -> CycloReal {
        let e = self.entry(i, j);
        if self.sign(i, j) < 0 {
            -e
        } else {
            e.clone()
        }
    }

    /// Arrows `(i, j)` with b[i][j] > 0.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.sign(i, j) > 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Bitmask of neighbours of each vertex.
    pub fn adjacency(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        (0..self.n).map(|i| (0..self.n).filter(|&j| self.has_arrow(i, j)).fold(0u64, |m, j| m | (1 << j))).collect()
    }

    pub fn lift(&self, ambient: u32) -> Result<Quiver> {
        if ambient % self.ambient != 0 {
            return Err(QmutError::IncompatibleAmbient { ambient, required: self.ambient });
        }
        let b = self.b.iter().map(|x| x.lift(ambient)).collect::<Result<Vec<_>>>()?;
        Ok(Quiver { n: self.n, ambient, b, sign: self.sign.clone() })
    }

    /// Mutation at vertex `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Quiver> {
        if k >= self.n {
            return Err(QmutError::VertexOutOfRange { vertex: k, rank: self.n });
        }
        Ok(self.mutate_unchecked(k))
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Quiver> {
        let mut q = self.clone();
        for &k in seq {
            q = q.mutate(k)?;
        }
        Ok(q)
    }

    pub(crate) fn mutate_unchecked(&self, k: usize) -> Quiver {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let (ij, ji) = (i * n + j, j * n + i);
                if i == k || j == k {
                    if out.sign[ij] != 0 {
                        out.b[ij] = -&self.b[ij];
                        out.b[ji] = -&self.b[ji];
                        out.sign[ij] = -self.sign[ij];
                        out.sign[ji] = -self.sign[ji];
                    }
                    continue;
                }
                let sik = self.sign[i * n + k];
                if sik == 0 || sik != self.sign[k * n + j] {
                    continue;
                }
                // b_ik b_kj > 0: add sign(b_ik) · b_ik b_kj
                let prod = &self.b[i * n + k] * &self.b[k * n + j];
                let new = if sik > 0 { &self.b[ij] + &prod } else { &self.b[ij] - &prod };
                let s = if self.sign[ij] == 0 || self.sign[ij] == sik { sik } else { new.sign() as i8 };
                out.b[ji] = -&new;
                out.b[ij] = new;
                out.sign[ij] = s;
                out.sign[ji] = -s;
            }
        }
        out
    }

    pub fn opposite(&self) -> Quiver {
        Quiver { n: self.n, ambient: self.ambient, b: self.b.iter().map(|x| -x).collect(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    /// Full subquiver on `vertices`, in the given order.
    pub fn subquiver(&self, vertices: &[usize]) -> Result<Quiver> {
        if vertices.is_empty() {
            return Err(QmutError::EmptyVertexSet);
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= self.n) {
            return Err(QmutError::VertexOutOfRange { vertex: v, rank: self.n });
        }
        Ok(self.permuted(vertices))
    }

    /// The quiver whose vertex p is vertex `order[p]` of `self`.
    /// `order` may also select a subset.
    pub fn permuted(&self, order: &[usize]) -> Quiver {
        let m = order.len();
        let n = self.n;
        let mut b = Vec::with_capacity(m * m);
        let mut sign = Vec::with_capacity(m * m);
        for &p in order {
            for &q in order {
                b.push(self.b[p * n + q].clone());
                sign.push(self.sign[p * n + q]);
            }
        }
        Quiver { n: m, ambient: self.ambient, b, sign }
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.n;
        let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| self.sign(i, j) > 0).count()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for w in 0..n {
                if self.sign(v, w) > 0 {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        stack.push(w);
                    }
                }
            }
        }
        seen == n
    }

    /// (sinks, sources). An isolated vertex is both.
    pub fn sinks_sources(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n;
        let sinks = (0..n).filter(|&v| (0..n).all(|w| self.sign(v, w) <= 0)).collect();
        let sources = (0..n).filter(|&v| (0..n).all(|w| self.sign(v, w) >= 0)).collect();
        (sinks, sources)
    }

    /// Connected components of the underlying graph, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                for w in 0..n {
                    if comp[w] == usize::MAX && self.has_arrow(v, w) {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// All induced cycles of length ≥ 3 of the underlying graph.
    ///
    /// Enumerates vertex subsets, so the rank is limited to 20.
    pub fn chordless_cycles(&self) -> Vec<ChordlessCycle> {
        let n = self.n;
        assert!(n <= 20, "chordless cycle enumeration is limited to rank 20");
        let adj = self.adjacency();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << n) {
            if mask.count_ones() < 3 {
                continue;
            }
            let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if verts.iter().any(|&v| (adj[v] & mask).count_ones() != 2) {
                continue;
            }
            // walk the cycle from the least vertex
            let start = verts[0];
            let mut cyc = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let nb = adj[cur] & mask;
                let next = (0..n).find(|&w| nb >> w & 1 == 1 && w != prev).unwrap();
                if next == start {
                    break;
                }
                cyc.push(next);
                prev = cur;
                cur = next;
                if cyc.len() > verts.len() {
                    break;
                }
            }
            if cyc.len() != verts.len() {
                continue; // disjoint union of cycles is not a cycle
            }
            let len = cyc.len();
            let fwd = (0..len).filter(|&t| self.sign(cyc[t], cyc[(t + 1) % len]) > 0).count();
            out.push(ChordlessCycle { vertices: cyc, oriented: fwd == 0 || fwd == len });
        }
        out
    }

    /// Label of every nonzero arrow weight (None on absent arrows).
    pub fn weight_labels(&self) -> std::result::Result<Vec<Vec<Option<AngleLabel>>>, LabelFailure> {
        let n = self.n;
        let mut out = vec![vec![None; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if !self.has_arrow(i, j) {
                    continue;
                }
                let l = self.weight(i, j).to_label().ok_or(LabelFailure { i, j })?;
                out[i][j] = Some(l);
                out[j][i] = Some(l);
            }
        }
        Ok(out)
    }

    /// Largest reduced label denominator over the arrows; 1 for a quiver without arrows.
    pub fn highest_denominator(&self) -> std::result::Result<u32, LabelFailure> {
        let labels = self.weight_labels()?;
        Ok(labels.iter().flatten().flatten().map(|l| l.den()).max().unwrap_or(1))
    }

    /// Appends a new vertex joined to vertex i by `row[i]` (b[i][new] = row[i]).
    pub fn extended(&self, row: &[CycloReal]) -> Quiver {
        assert_eq!(row.len(), self.n);
        let n = self.n + 1;
        let mut q = Quiver::empty(n, self.ambient);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_arrow(i, j) {
                    q.set(i, j, self.entry(i, j).clone());
                }
            }
            if !row[i].is_zero() {
                q.set(i, self.n, row[i].clone());
            }
        }
        q
    }
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Quiver) -> bool {
        self.n == other.n && self.b == other.b
    }
}

impl Eq for Quiver {}

impl fmt::Debug for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quiver(rank {}, ambient {}; ", self.n, self.ambient)?;
        let mut first = true;
        for (i, j) in self.arrows() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}->{} {}", i, j, self.entry(i, j))?;
        }
        write!(f, ")")
    }
}
