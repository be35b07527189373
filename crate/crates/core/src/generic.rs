//! Dimension-vector level computations for general representations.
//!
//! `ext(α, β)` is the dimension of `Ext¹(M, N)` for general `M`, `N` of
//! dimensions `α`, `β`. It satisfies the recursion
//!
//! ```text
//! ext(α, β) = max { −⟨α, β − β′⟩ : β′ ↪ β },   β′ ↪ β  ⇔  ext(β′, β − β′) = 0
//! ```
//!
//! where `β′ ↪ β` means a general representation of dimension `β` has a
//! subrepresentation of dimension `β′` (Schofield, "General representations
//! of quivers"). `0` and `β` are always included. Nonemptiness of the
//! (semi)stable loci follows King's criterion applied to general subdimension
//! vectors.

use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::oracle::{self, OracleConfig};
use crate::quiver::{DimVector, Quiver, Weight};
use crate::rep::Representation;

type Pair = (DimVector, DimVector);

/// Memoized generic ext values and generic subdimension vectors for one quiver.
///
/// Lookups and inserts go through read/write locks, so a table can be shared
/// between threads.
pub struct GenericExtTable<'q> {
    quiver: &'q Quiver,
    ext: RwLock<HashMap<Pair, u64>>,
    subs: RwLock<HashMap<DimVector, Vec<DimVector>>>,
}

impl<'q> GenericExtTable<'q> {
    pub fn new(quiver: &'q Quiver) -> Result<Self> {
        quiver.require_acyclic("generic ext")?;
        Ok(GenericExtTable {
            quiver,
            ext: RwLock::new(HashMap::new()),
            subs: RwLock::new(HashMap::new()),
        })
    }

    pub fn quiver(&self) -> &Quiver {
        self.quiver
    }

    /// Number of memoized `(α, β)` pairs.
    pub fn len(&self) -> usize {
        self.ext.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ext(&self, alpha: &DimVector, beta: &DimVector) -> Result<u64> {
        self.quiver.check_dim(alpha)?;
        self.quiver.check_dim(beta)?;
        self.ext_inner(alpha, beta, &mut HashSet::new())
    }

    /// All `β ≤ α` with `ext(β, α − β) = 0`, lexicographically sorted.
    pub fn generic_subdimvectors(&self, alpha: &DimVector) -> Result<Vec<DimVector>> {
        self.quiver.check_dim(alpha)?;
        self.subs_inner(alpha, &mut HashSet::new())
    }

    fn ext_inner(
        &self,
        alpha: &DimVector,
        beta: &DimVector,
        in_progress: &mut HashSet<Pair>,
    ) -> Result<u64> {
        if alpha.is_zero() || beta.is_zero() {
            return Ok(0);
        }
        let key = (alpha.clone(), beta.clone());
        if let Some(&v) = self.ext.read().unwrap().get(&key) {
            return Ok(v);
        }
        if !in_progress.insert(key.clone()) {
            return Err(Error::RecursionCycle(format!("ext({alpha}, {beta})")));
        }
        let subs = self.subs_inner(beta, in_progress)?;
        let value = subs
            .iter()
            .map(|b| {
                let quotient = beta.checked_sub(b).expect("β′ ≤ β");
                -self.quiver.euler_form_unchecked(alpha, &quotient)
            })
            .max()
            .expect("β is always a generic subdimension vector of itself");
        in_progress.remove(&key);
        let value = u64::try_from(value).expect("max includes β′ = β, so it is nonnegative");
        self.ext.write().unwrap().insert(key, value);
        Ok(value)
    }

    fn subs_inner(
        &self,
        alpha: &DimVector,
        in_progress: &mut HashSet<Pair>,
    ) -> Result<Vec<DimVector>> {
        if let Some(v) = self.subs.read().unwrap().get(alpha) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        for beta in alpha.sub_vectors() {
            let rest = alpha.checked_sub(&beta).expect("β ≤ α");
            // β = 0 and β = α are answered without recursion; every other call
            // has a second argument of strictly smaller total dimension
            if beta.is_zero() || rest.is_zero() || self.ext_inner(&beta, &rest, in_progress)? == 0 {
                out.push(beta);
            }
        }
        self.subs.write().unwrap().insert(alpha.clone(), out.clone());
        Ok(out)
    }
}

/// Generic `dim Ext¹` between general representations of dimensions `α`, `β`.
pub fn generic_ext(q: &Quiver, alpha: &DimVector, beta: &DimVector) -> Result<u64> {
    GenericExtTable::new(q)?.ext(alpha, beta)
}

pub fn generic_subdimvectors(q: &Quiver, alpha: &DimVector) -> Result<Vec<DimVector>> {
    GenericExtTable::new(q)?.generic_subdimvectors(alpha)
}

/// `rep^{ss}_Q(α, θ) ≠ ∅`: `θ(α) = 0` and `θ(β) ≥ 0` on every general subdimension vector.
pub fn semistable_nonempty(table: &GenericExtTable<'_>, alpha: &DimVector, theta: &Weight) -> Result<bool> {
    table.quiver().check_weight(theta)?;
    if theta.pair(alpha)? != 0 {
        return Ok(false);
    }
    Ok(table
        .generic_subdimvectors(alpha)?
        .iter()
        .all(|b| theta.pair_unchecked(b) >= 0))
}

/// θ-stable representations of dimension `α ≠ 0` exist: `θ(α) = 0` and
/// `θ(β) > 0` on every proper nonzero general subdimension vector.
pub fn stable_nonempty(table: &GenericExtTable<'_>, alpha: &DimVector, theta: &Weight) -> Result<bool> {
    table.quiver().check_weight(theta)?;
    if alpha.is_zero() {
        return Err(Error::InvalidArgument(
            "stability is only defined for nonzero dimension vectors".into(),
        ));
    }
    if theta.pair(alpha)? != 0 {
        return Ok(false);
    }
    Ok(table
        .generic_subdimvectors(alpha)?
        .iter()
        .filter(|b| !b.is_zero() && *b != alpha)
        .all(|b| theta.pair_unchecked(b) > 0))
}

/// `dim M_Q(α, θ) = 1 − ⟨α, α⟩` when the stable locus is nonempty.
pub fn moduli_dimension(table: &GenericExtTable<'_>, alpha: &DimVector, theta: &Weight) -> Result<i64> {
    if !stable_nonempty(table, alpha, theta)? {
        return Err(Error::EmptyStableLocus);
    }
    Ok(1 - table.quiver().euler_form_unchecked(alpha, alpha))
}

/// `dim rep_Q(α) − dim GL(α) + 1`, the count the moduli dimension must match.
pub fn quotient_dimension(q: &Quiver, alpha: &DimVector) -> Result<i64> {
    q.check_dim(alpha)?;
    let rep: usize = q.arrows().iter().map(|a| alpha[a.src] * alpha[a.tgt]).sum();
    let gl: usize = alpha.iter().map(|a| a * a).sum();
    Ok(rep as i64 - gl as i64 + 1)
}

/// Local quiver `(Γ_y, β_y)` at a polystable point `⊕ M_i^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalQuiverData {
    /// `arrow_counts[i][j]` arrows from vertex `i` to `j`, loops on the diagonal.
    pub arrow_counts: Vec<Vec<usize>>,
    pub multiplicities: Vec<usize>,
    pub summand_dims: Vec<DimVector>,
    /// Whether each summand's stability was checked rather than asserted.
    pub verified: bool,
}

impl LocalQuiverData {
    pub fn vertex_count(&self) -> usize {
        self.multiplicities.len()
    }

    /// As a quiver, arrows named `g<i>_<j>_<r>` (1-based).
    pub fn to_quiver(&self) -> Result<Quiver> {
        let l = self.vertex_count();
        let mut arrows = Vec::new();
        for i in 0..l {
            for j in 0..l {
                for r in 0..self.arrow_counts[i][j] {
                    arrows.push(crate::quiver::Arrow {
                        id: format!("g{}_{}_{}", i + 1, j + 1, r + 1),
                        src: i,
                        tgt: j,
                    });
                }
            }
        }
        Quiver::new(l, arrows)
    }
}

/// How the stability of `local_quiver`'s inputs was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityEvidence {
    /// Each summand passed the exhaustive oracle.
    Verified,
    /// The caller vouches for stability; the result is marked unverified.
    Asserted,
}

/// Local quiver at `M_1^{e_1} ⊕ ⋯ ⊕ M_l^{e_l}`: `l` vertices, `dim Ext¹(M_i, M_j)`
/// arrows from `i` to `j`, dimension vector `(e_i)`.
///
/// Distinct stables satisfy `hom(M_i, M_j) = δ_ij`; any other value is reported
/// as an error.
pub fn local_quiver<F: Field>(
    summands: &[(Representation<F>, usize)],
    theta: &Weight,
    evidence: StabilityEvidence,
) -> Result<LocalQuiverData> {
    if summands.is_empty() {
        return Err(Error::InvalidArgument("a point needs at least one summand".into()));
    }
    for (m, e) in summands {
        if *e == 0 {
            return Err(Error::InvalidArgument("multiplicities must be at least 1".into()));
        }
        if m.theta(theta)? != 0 {
            return Err(Error::InvalidArgument(format!(
                "summand of dimension {} has theta != 0",
                m.dim()
            )));
        }
    }
    let l = summands.len();
    let mut arrow_counts = vec![vec![0; l]; l];
    for (i, (mi, _)) in summands.iter().enumerate() {
        for (j, (mj, _)) in summands.iter().enumerate() {
            let (hom, ext) = mi.hom_ext_dims(mj)?;
            if hom != usize::from(i == j) {
                return Err(Error::NotDistinctStables {
                    i: i + 1,
                    j: j + 1,
                    hom,
                });
            }
            arrow_counts[i][j] = ext;
        }
    }
    Ok(LocalQuiverData {
        arrow_counts,
        multiplicities: summands.iter().map(|(_, e)| *e).collect(),
        summand_dims: summands.iter().map(|(m, _)| m.dim().clone()).collect(),
        verified: evidence == StabilityEvidence::Verified,
    })
}

/// `Σ_{i,j} a_ij e_i e_j − Σ e_i² + 1`.
pub fn local_model_dimension(data: &LocalQuiverData) -> Result<i64> {
    let l = data.vertex_count();
    if l == 0 {
        return Err(Error::InvalidArgument("empty local quiver data".into()));
    }
    let e: Vec<i64> = data.multiplicities.iter().map(|&x| x as i64).collect();
    let mut total = 1;
    for i in 0..l {
        for j in 0..l {
            total += data.arrow_counts[i][j] as i64 * e[i] * e[j];
        }
        total -= e[i] * e[i];
    }
    Ok(total)
}

/// [`local_quiver`] over 𝔽_p, with every summand first checked θ-stable by
/// the exhaustive oracle.
pub fn local_quiver_verified(
    summands: &[(Representation<PrimeField>, usize)],
    theta: &Weight,
    config: &OracleConfig,
) -> Result<LocalQuiverData> {
    for (i, (m, _)) in summands.iter().enumerate() {
        let v = oracle::is_stable(m, theta, config)?;
        if !v.holds {
            return Err(Error::InvalidArgument(format!(
                "summand {} is not theta-stable: {}",
                i + 1,
                v.reason.unwrap_or_default()
            )));
        }
    }
    local_quiver(summands, theta, StabilityEvidence::Verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::quiver::examples::{a2, a3, discrete, kronecker};
    use std::sync::Arc;

    fn d(v: &[usize]) -> DimVector {
        DimVector(v.to_vec())
    }

    #[test]
    fn a2_ext_values() {
        // S1 = (1,0), S2 = (0,1), P1 = (1,1) for the arrow 1 → 2
        let q = a2();
        let ext = |a: &[usize], b: &[usize]| generic_ext(&q, &d(a), &d(b)).unwrap();
        assert_eq!(ext(&[1, 0], &[0, 1]), 1);
        assert_eq!(ext(&[0, 1], &[1, 0]), 0);
        assert_eq!(ext(&[1, 0], &[1, 1]), 0);
        assert_eq!(ext(&[1, 1], &[1, 0]), 0);
        assert_eq!(ext(&[2, 0], &[0, 1]), 2);
    }

    #[test]
    fn kronecker_ext_values() {
        let q = kronecker(3);
        // general points of dimension (1,1) are non-isomorphic, so hom = 0
        assert_eq!(generic_ext(&q, &d(&[1, 1]), &d(&[1, 1])).unwrap(), 1);
        assert_eq!(generic_ext(&q, &d(&[1, 0]), &d(&[0, 1])).unwrap(), 3);
        assert_eq!(generic_ext(&q, &d(&[0, 1]), &d(&[1, 0])).unwrap(), 0);
        assert_eq!(generic_ext(&q, &d(&[2, 1]), &d(&[0, 0])).unwrap(), 0);
    }

    #[test]
    fn generic_subs_examples() {
        assert_eq!(
            generic_subdimvectors(&kronecker(3), &d(&[1, 1])).unwrap(),
            [d(&[0, 0]), d(&[0, 1]), d(&[1, 1])]
        );
        assert_eq!(generic_subdimvectors(&discrete(2), &d(&[1, 2])).unwrap().len(), 6);
        assert_eq!(generic_subdimvectors(&a2(), &d(&[0, 0])).unwrap(), [d(&[0, 0])]);
    }

    #[test]
    fn cyclic_quivers_are_rejected() {
        let q = Quiver::from_labels(1, &[("l", 1, 1)]).unwrap();
        assert!(matches!(GenericExtTable::new(&q), Err(Error::CyclicQuiver(_))));
    }

    #[test]
    fn nonemptiness_examples() {
        let k3 = kronecker(3);
        let t = GenericExtTable::new(&k3).unwrap();
        let theta = Weight(vec![-1, 1]);
        for n in 1..=4 {
            assert!(semistable_nonempty(&t, &d(&[n, n]), &theta).unwrap());
            assert!(stable_nonempty(&t, &d(&[n, n]), &theta).unwrap());
            assert_eq!(moduli_dimension(&t, &d(&[n, n]), &theta).unwrap(), (n * n + 1) as i64);
        }
        assert!(!semistable_nonempty(&t, &d(&[2, 1]), &theta).unwrap());
        assert!(semistable_nonempty(&t, &d(&[0, 0]), &theta).unwrap());
        assert!(stable_nonempty(&t, &d(&[0, 0]), &theta).is_err());

        let a = a2();
        let ta = GenericExtTable::new(&a).unwrap();
        assert!(stable_nonempty(&ta, &d(&[1, 1]), &theta).unwrap());
        // real Schur root (1,1) of A2 is rigid
        assert_eq!(moduli_dimension(&ta, &d(&[1, 1]), &theta).unwrap(), 0);

        let disc = discrete(2);
        let td = GenericExtTable::new(&disc).unwrap();
        assert!(!stable_nonempty(&td, &d(&[1, 1]), &theta).unwrap());
        assert!(matches!(
            moduli_dimension(&td, &d(&[1, 1]), &theta),
            Err(Error::EmptyStableLocus)
        ));
    }

    #[test]
    fn moduli_dimension_matches_quotient_count() {
        let k3 = kronecker(3);
        let t = GenericExtTable::new(&k3).unwrap();
        let theta = Weight(vec![-1, 1]);
        for n in 1..=4 {
            let alpha = d(&[n, n]);
            assert_eq!(
                moduli_dimension(&t, &alpha, &theta).unwrap(),
                quotient_dimension(&k3, &alpha).unwrap()
            );
        }
        let theta = Weight(vec![-1, 2]);
        assert!(stable_nonempty(&t, &d(&[2, 1]), &theta).unwrap());
        assert_eq!(moduli_dimension(&t, &d(&[2, 1]), &theta).unwrap(), 2);
    }

    #[test]
    fn subs_always_contain_ends() {
        let q = a3();
        let t = GenericExtTable::new(&q).unwrap();
        for alpha in d(&[2, 2, 2]).sub_vectors() {
            let subs = t.generic_subdimvectors(&alpha).unwrap();
            assert!(subs.contains(&DimVector::zero(3)));
            assert!(subs.contains(&alpha));
            for b in &subs {
                let rest = alpha.checked_sub(b).unwrap();
                assert_eq!(t.ext(b, &rest).unwrap(), 0);
            }
        }
    }

    fn k3_point(p: u64, m: [u64; 3]) -> Representation<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        Representation::from_entries(
            Arc::new(kronecker(3)),
            f,
            d(&[1, 1]),
            &[("x", vec![m[0]]), ("y", vec![m[1]]), ("z", vec![m[2]])],
        )
        .unwrap()
    }

    #[test]
    fn local_quiver_examples() {
        let theta = Weight(vec![-1, 1]);
        let m = k3_point(5, [1, 0, 0]);
        let data = local_quiver(&[(m.clone(), 1)], &theta, StabilityEvidence::Verified).unwrap();
        assert_eq!(data.arrow_counts, vec![vec![2]]);
        assert_eq!(data.multiplicities, vec![1]);
        assert_eq!(local_model_dimension(&data).unwrap(), 2);
        assert_eq!(data.to_quiver().unwrap().arrows().len(), 2);

        let n = k3_point(5, [0, 1, 0]);
        let data = local_quiver(&[(m.clone(), 1), (n, 1)], &theta, StabilityEvidence::Verified).unwrap();
        assert_eq!(data.arrow_counts, vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(local_model_dimension(&data).unwrap(), 5);

        // isomorphic summands are rejected
        let m2 = k3_point(5, [2, 0, 0]);
        assert!(matches!(
            local_quiver(&[(m.clone(), 1), (m2, 1)], &theta, StabilityEvidence::Asserted),
            Err(Error::NotDistinctStables { .. })
        ));
        assert!(local_quiver::<Rationals>(&[], &theta, StabilityEvidence::Asserted).is_err());
    }

    #[test]
    fn empty_local_data_has_no_dimension() {
        let data = LocalQuiverData {
            arrow_counts: vec![],
            multiplicities: vec![],
            summand_dims: vec![],
            verified: false,
        };
        assert!(local_model_dimension(&data).is_err());
    }
}
