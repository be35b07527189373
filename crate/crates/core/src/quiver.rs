//! Quivers, paths, dimension vectors and weights.
//!
//! Vertices are stored 0-based. Every quiver carries the label of its first
//! vertex (1 for ordinary input, 0 for extended quivers with a fresh `v_0`),
//! and all I/O goes through labels.
//!
//! Paths store their arrows in application order: `[a, b]` walks along `a`
//! first and then `b`. The algebra product `p·q` means "apply `q`, then `p`",
//! so the path `[a, b]` is the product `b·a` and evaluates to `M_b · M_a`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertex_count: usize,
    first_label: usize,
    arrows: Vec<Arrow>,
    arrow_index: BTreeMap<String, usize>,
    topo_order: Option<Vec<usize>>,
}

impl Quiver {
    /// Build from 0-based arrow endpoints, with vertex labels starting at 1.
    pub fn new(vertex_count: usize, arrows: Vec<Arrow>) -> Result<Self> {
        Self::with_first_label(vertex_count, 1, arrows)
    }

    /// Build from labelled endpoints `(id, src_label, tgt_label)`, labels starting at 1.
    pub fn from_labels(vertex_count: usize, arrows: &[(&str, i64, i64)]) -> Result<Self> {
        Self::from_labels_with_first(vertex_count, 1, arrows)
    }

    pub fn from_labels_with_first(
        vertex_count: usize,
        first_label: usize,
        arrows: &[(&str, i64, i64)],
    ) -> Result<Self> {
        let to_index = |label: i64| -> Result<usize> {
            let idx = label - first_label as i64;
            if idx < 0 || idx >= vertex_count as i64 {
                Err(Error::VertexOutOfRange {
                    vertex: label,
                    first: first_label,
                    last: (first_label + vertex_count).saturating_sub(1),
                })
            } else {
                Ok(idx as usize)
            }
        };
        let arrows = arrows
            .iter()
            .map(|&(id, s, t)| {
                Ok(Arrow {
                    id: id.trim().to_string(),
                    src: to_index(s)?,
                    tgt: to_index(t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_first_label(vertex_count, first_label, arrows)
    }

    pub fn with_first_label(
        vertex_count: usize,
        first_label: usize,
        arrows: Vec<Arrow>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidArgument("a quiver needs at least one vertex".into()));
        }
        let mut arrow_index = BTreeMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if a.id.is_empty() {
                return Err(Error::InvalidArgument("empty arrow id".into()));
            }
            for v in [a.src, a.tgt] {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: (v + first_label) as i64,
                        first: first_label,
                        last: first_label + vertex_count - 1,
                    });
                }
            }
            if arrow_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::DuplicateArrow(a.id.clone()));
            }
        }
        let topo_order = topological_order(vertex_count, &arrows);
        Ok(Quiver {
            vertex_count,
            first_label,
            arrows,
            arrow_index,
            topo_order,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn first_label(&self) -> usize {
        self.first_label
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, idx: usize) -> &Arrow {
        &self.arrows[idx]
    }

    pub fn arrow_by_id(&self, id: &str) -> Result<usize> {
        self.arrow_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(id.to_string()))
    }

    pub fn is_acyclic(&self) -> bool {
        self.topo_order.is_some()
    }

    /// A topological order of the vertices, when acyclic.
    pub fn topological_order(&self) -> Option<&[usize]> {
        self.topo_order.as_deref()
    }

    pub fn label(&self, vertex: usize) -> usize {
        vertex + self.first_label
    }

    pub fn index_of_label(&self, label: i64) -> Result<usize> {
        let idx = label - self.first_label as i64;
        if idx < 0 || idx >= self.vertex_count as i64 {
            return Err(Error::VertexOutOfRange {
                vertex: label,
                first: self.first_label,
                last: self.first_label + self.vertex_count - 1,
            });
        }
        Ok(idx as usize)
    }

    pub(crate) fn require_acyclic(&self, what: &'static str) -> Result<()> {
        if self.is_acyclic() {
            Ok(())
        } else {
            Err(Error::CyclicQuiver(what))
        }
    }

    pub fn check_dim(&self, alpha: &DimVector) -> Result<()> {
        check_len(self.vertex_count, alpha.len())
    }

    pub fn check_weight(&self, theta: &Weight) -> Result<()> {
        check_len(self.vertex_count, theta.len())
    }

    /// All paths of length at most `max_len` (every path when acyclic and no
    /// bound), sorted by length and then by arrow ids in application order.
    pub fn enumerate_paths(&self, max_len: Option<usize>) -> Result<Vec<Path>> {
        if max_len.is_none() {
            self.require_acyclic("unbounded path enumeration")?;
        }
        let limit = max_len.unwrap_or(self.vertex_count);
        let mut out: Vec<Path> = (0..self.vertex_count).map(Path::trivial).collect();
        let mut frontier: Vec<Path> = out.clone();
        for _ in 0..limit {
            let mut next = Vec::new();
            for p in &frontier {
                for (ai, a) in self.arrows.iter().enumerate() {
                    if a.src == p.target {
                        let mut arrows = p.arrows.clone();
                        arrows.push(ai);
                        next.push(Path {
                            source: p.source,
                            target: a.tgt,
                            arrows,
                        });
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| self.path_order(a, b));
        Ok(out)
    }

    /// Paths from `source` to `target` of length `1..=max_len`.
    pub fn paths_between(&self, source: usize, target: usize, max_len: usize) -> Vec<Path> {
        self.enumerate_paths(Some(max_len))
            .expect("bounded enumeration cannot fail")
            .into_iter()
            .filter(|p| p.source == source && p.target == target && !p.is_trivial())
            .collect()
    }

    pub(crate) fn path_order(&self, a: &Path, b: &Path) -> std::cmp::Ordering {
        a.len()
            .cmp(&b.len())
            .then_with(|| {
                let ia = a.arrows.iter().map(|&i| self.arrows[i].id.as_str());
                let ib = b.arrows.iter().map(|&i| self.arrows[i].id.as_str());
                ia.cmp(ib)
            })
            .then_with(|| a.source.cmp(&b.source))
    }

    /// Euler form `⟨α,β⟩ = Σ a_i b_i − Σ_{i→j} a_i b_j`.
    pub fn euler_form(&self, alpha: &DimVector, beta: &DimVector) -> Result<i64> {
        self.check_dim(alpha)?;
        self.check_dim(beta)?;
        Ok(self.euler_form_unchecked(alpha, beta))
    }

    pub(crate) fn euler_form_unchecked(&self, alpha: &DimVector, beta: &DimVector) -> i64 {
        let diag: i64 = alpha
            .iter()
            .zip(beta.iter())
            .map(|(&a, &b)| (a * b) as i64)
            .sum();
        let off: i64 = self
            .arrows
            .iter()
            .map(|a| (alpha[a.src] * beta[a.tgt]) as i64)
            .sum();
        diag - off
    }

    /// All `α` with `d(α) = n` and `θ(α) = 0`, in lexicographic order.
    pub fn enumerate_dimvectors(&self, n: usize, theta: &Weight) -> Result<Vec<DimVector>> {
        self.check_weight(theta)?;
        Ok(compositions(self.vertex_count, n)
            .into_iter()
            .filter(|a| theta.pair_unchecked(a) == 0)
            .collect())
    }

    /// Indices of the arrows `source → target`.
    pub fn arrows_between(&self, source: usize, target: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.src == source && a.tgt == target)
            .map(|(i, _)| i)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

fn topological_order(n: usize, arrows: &[Arrow]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for a in arrows {
        indeg[a.tgt] += 1;
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for a in arrows.iter().filter(|a| a.src == v) {
            indeg[a.tgt] -= 1;
            if indeg[a.tgt] == 0 {
                ready.push(a.tgt);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// All vectors of `k` nonnegative integers summing to `n`, lexicographically sorted.
pub fn compositions(k: usize, n: usize) -> Vec<DimVector> {
    fn go(k: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<DimVector>) {
        if k == 1 {
            prefix.push(n);
            out.push(DimVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=n {
            prefix.push(first);
            go(k - 1, n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(k, n, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    source: usize,
    target: usize,
    arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(vertex: usize) -> Self {
        Path {
            source: vertex,
            target: vertex,
            arrows: Vec::new(),
        }
    }

    /// Path walking `arrows` in order; a trivial path needs `vertex`.
    pub fn new(q: &Quiver, arrows: Vec<usize>) -> Result<Self> {
        let Some(&first) = arrows.first() else {
            return Err(Error::InvalidArgument(
                "use Path::trivial for length-zero paths".into(),
            ));
        };
        if arrows.iter().any(|&a| a >= q.arrows.len()) {
            return Err(Error::NotComposable("arrow index out of range".into()));
        }
        for w in arrows.windows(2) {
            if q.arrows[w[0]].tgt != q.arrows[w[1]].src {
                return Err(Error::NotComposable(format!(
                    "`{}` ends at {} but `{}` starts at {}",
                    q.arrows[w[0]].id,
                    q.label(q.arrows[w[0]].tgt),
                    q.arrows[w[1]].id,
                    q.label(q.arrows[w[1]].src)
                )));
            }
        }
        Ok(Path {
            source: q.arrows[first].src,
            target: q.arrows[*arrows.last().unwrap()].tgt,
            arrows,
        })
    }

    /// Path from arrow ids listed in application order.
    pub fn from_ids(q: &Quiver, ids: &[&str]) -> Result<Self> {
        let arrows = ids
            .iter()
            .map(|id| q.arrow_by_id(id))
            .collect::<Result<Vec<_>>>()?;
        Path::new(q, arrows)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Arrow indices in application order.
    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// The product `self·first`: apply `first`, then `self`.
    pub fn after(&self, first: &Path) -> Result<Path> {
        if first.target != self.source {
            return Err(Error::NotComposable(format!(
                "path ending at vertex index {} followed by one starting at {}",
                first.target, self.source
            )));
        }
        let mut arrows = first.arrows.clone();
        arrows.extend_from_slice(&self.arrows);
        Ok(Path {
            source: first.source,
            target: self.target,
            arrows,
        })
    }

    pub(crate) fn shifted(&self, vertex_shift: usize) -> Path {
        Path {
            source: self.source + vertex_shift,
            target: self.target + vertex_shift,
            arrows: self.arrows.clone(),
        }
    }

    /// Arrow ids in application order.
    pub fn ids<'q>(&self, q: &'q Quiver) -> Vec<&'q str> {
        self.arrows.iter().map(|&a| q.arrows[a].id.as_str()).collect()
    }

    /// Product-order word: last applied arrow first, `e<label>` for trivial paths.
    pub fn word(&self, q: &Quiver) -> Vec<String> {
        if self.is_trivial() {
            vec![format!("e{}", q.label(self.source))]
        } else {
            self.arrows.iter().rev().map(|&a| q.arrows[a].id.clone()).collect()
        }
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> PathDisplay<'a> {
        PathDisplay { path: self, quiver: q }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    quiver: &'a Quiver,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.word(self.quiver).join("·"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<usize>);

impl DimVector {
    pub fn zero(k: usize) -> Self {
        DimVector(vec![0; k])
    }

    /// `d(α) = Σ a_i`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, defined when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &DimVector) -> Option<DimVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(DimVector)
    }

    /// Every `β` with `0 ≤ β ≤ self` componentwise, lexicographically sorted.
    pub fn sub_vectors(&self) -> Vec<DimVector> {
        let mut out = vec![Vec::with_capacity(self.len())];
        for &a in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=a).map(move |b| {
                        let mut v = prefix.clone();
                        v.push(b);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(DimVector).collect()
    }
}

impl std::ops::Index<usize> for DimVector {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<usize>> for DimVector {
    fn from(v: Vec<usize>) -> Self {
        DimVector(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `θ(α) = Σ θ_i a_i`.
    pub fn pair(&self, alpha: &DimVector) -> Result<i64> {
        check_len(self.len(), alpha.len())?;
        Ok(self.pair_unchecked(alpha))
    }

    pub(crate) fn pair_unchecked(&self, alpha: &DimVector) -> i64 {
        self.0.iter().zip(alpha.iter()).map(|(&t, &a)| t * a as i64).sum()
    }

    pub fn scaled(&self, z: i64) -> Weight {
        Weight(self.0.iter().map(|t| t * z).collect())
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `θ(α) = Σ θ_i a_i`.
pub fn theta_pairing(theta: &Weight, alpha: &DimVector) -> Result<i64> {
    theta.pair(alpha)
}

/// Common test and example quivers.
pub mod examples {
    use super::Quiver;

    /// `1 → 2` with arrow `a`.
    pub fn a2() -> Quiver {
        Quiver::from_labels(2, &[("a", 1, 2)]).unwrap()
    }

    /// `1 → 2 → 3` with arrows `a`, `b`.
    pub fn a3() -> Quiver {
        Quiver::from_labels(3, &[("a", 1, 2), ("b", 2, 3)]).unwrap()
    }

    /// Generalized Kronecker quiver with `m` arrows `1 → 2`, named x, y, z, … for m ≤ 3.
    pub fn kronecker(m: usize) -> Quiver {
        let names: Vec<String> = if m <= 3 {
            ["x", "y", "z"][..m].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=m).map(|i| format!("x{i}")).collect()
        };
        let arrows: Vec<(&str, i64, i64)> = names.iter().map(|n| (n.as_str(), 1, 2)).collect();
        Quiver::from_labels(2, &arrows).unwrap()
    }

    /// `k` vertices, no arrows.
    pub fn discrete(k: usize) -> Quiver {
        Quiver::from_labels(k, &[]).unwrap()
    }
}
