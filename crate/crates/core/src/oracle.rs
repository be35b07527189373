//! Exhaustive θ-semistability decisions over prime fields.
//!
//! Every subspace of every vertex space is enumerated in reduced row-echelon
//! form, and tuples closed under all arrow maps are the subrepresentations.
//! The search fans out over the subspaces of the first vertex.

use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::field::{Field, PrimeField, Rationals};
use crate::matrix::Matrix;
use crate::quiver::{DimVector, Quiver, Weight};
use crate::rep::Representation;

pub const DEFAULT_SUBSPACE_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleConfig {
    /// Maximum number of subspace tuples (or representations, for a census).
    pub budget: u128,
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            budget: DEFAULT_SUBSPACE_BUDGET,
            execution: Execution::default(),
        }
    }
}

/// A subspace of `𝔽_p^n`, stored as its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn contains(&self, f: &PrimeField, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = w[p];
            if c != 0 {
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi = f.sub(wi, &f.mul(&c, ri));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }
}

/// Number of subspaces of `𝔽_p^n`, saturating at `u128::MAX`.
pub fn subspace_count(p: u64, n: usize) -> u128 {
    (0..=n).fold(0u128, |acc, r| acc.saturating_add(gaussian_binomial(p, n, r)))
}

fn gaussian_binomial(p: u64, n: usize, r: usize) -> u128 {
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        let Some(a) = p.checked_pow((n - i) as u32) else {
            return u128::MAX;
        };
        let b = p.pow((i + 1) as u32);
        num = match num.checked_mul(a - 1) {
            Some(v) => v,
            None => return u128::MAX,
        };
        den *= b - 1;
    }
    num / den
}

/// Every subspace of `𝔽_p^n`, ordered by dimension, pivot set, then entries.
pub fn enumerate_subspaces(f: &PrimeField, n: usize) -> Vec<Subspace> {
    let p = f.modulus();
    let mut out = Vec::new();
    for r in 0..=n {
        for pivots in combinations(n, r) {
            // free slots: (row t, column c) with c > pivots[t] and c not a pivot
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|t| {
                    let pv = &pivots;
                    (pv[t] + 1..n).filter(move |c| !pv.contains(c)).map(move |c| (t, c))
                })
                .collect();
            let mut digits = vec![0u64; free.len()];
            loop {
                let mut basis = vec![vec![0u64; n]; r];
                for (t, &pc) in pivots.iter().enumerate() {
                    basis[t][pc] = 1;
                }
                for (&(t, c), &d) in free.iter().zip(&digits) {
                    basis[t][c] = d;
                }
                out.push(Subspace {
                    ambient: n,
                    basis,
                    pivots: pivots.clone(),
                });
                if !increment(&mut digits, p) {
                    break;
                }
            }
        }
    }
    out
}

fn increment(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// A subrepresentation: an arrow-stable tuple of subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubrepWitness {
    pub beta: DimVector,
    /// Per vertex, the row-echelon basis vectors of `U_i`.
    pub bases: Vec<Vec<Vec<u64>>>,
}

impl SubrepWitness {
    /// Re-check arrow stability `M_a(U_i) ⊆ U_j` and `β_i = dim U_i`
    /// from scratch, by rank computations.
    pub fn verify(&self, rep: &Representation<PrimeField>) -> bool {
        let f = rep.field();
        let q = rep.quiver();
        let k = q.vertex_count();
        if self.bases.len() != k || self.beta.len() != k {
            return false;
        }
        let span = |i: usize| -> Matrix<u64> {
            Matrix::from_nested(self.bases[i].len(), rep.dim()[i], self.bases[i].clone())
                .unwrap_or_else(|_| Matrix::zeros(f, 0, 0))
        };
        for i in 0..k {
            let u = span(i);
            if u.cols() != rep.dim()[i] || u.rank(f) != self.beta[i] || u.rows() != self.beta[i] {
                return false;
            }
        }
        for (ai, a) in q.arrows().iter().enumerate() {
            let uj = span(a.tgt);
            let mut rows = uj.to_nested();
            for v in &self.bases[a.src] {
                rows.push(rep.maps()[ai].mul_vec(f, v));
            }
            let stacked = Matrix::from_nested(rows.len(), rep.dim()[a.tgt], rows).unwrap();
            if stacked.rank(f) != self.beta[a.tgt] {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub beta: DimVector,
    pub theta_value: i64,
    pub bases: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleVerdict {
    /// The property asked about (semistable or stable) holds.
    pub holds: bool,
    pub theta_of_m: i64,
    /// A destabilizing subrepresentation, or for stability a proper nonzero
    /// one with `θ = 0`.
    pub witness: Option<Witness>,
    pub reason: Option<String>,
    pub subreps_examined: u64,
    pub budget_used: u128,
}

struct Search<'a> {
    rep: &'a Representation<PrimeField>,
    spaces: Vec<Vec<Subspace>>,
    // arrows checked once vertex `v` is assigned: those with max(src, tgt) == v
    checks: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(rep: &'a Representation<PrimeField>, config: &OracleConfig) -> Result<(Self, u128)> {
        let f = rep.field();
        let q = rep.quiver();
        let needed = rep
            .dim()
            .iter()
            .fold(1u128, |acc, &a| acc.saturating_mul(subspace_count(f.modulus(), a)));
        if needed > config.budget {
            return Err(Error::BudgetExceeded {
                name: "subspace_tuples",
                needed,
                budget: config.budget,
            });
        }
        let spaces = rep.dim().iter().map(|&a| enumerate_subspaces(f, a)).collect();
        let mut checks = vec![Vec::new(); q.vertex_count()];
        for (ai, a) in q.arrows().iter().enumerate() {
            checks[a.src.max(a.tgt)].push(ai);
        }
        Ok((Search { rep, spaces, checks }, needed))
    }

    fn stable_at(&self, v: usize, chosen: &[usize]) -> bool {
        let f = self.rep.field();
        let q = self.rep.quiver();
        self.checks[v].iter().all(|&ai| {
            let a = q.arrow(ai);
            let us = &self.spaces[a.src][chosen[a.src]];
            let ut = &self.spaces[a.tgt][chosen[a.tgt]];
            us.basis
                .iter()
                .all(|u| ut.contains(f, &self.rep.maps()[ai].mul_vec(f, u)))
        })
    }

    fn dfs<A>(&self, v: usize, chosen: &mut Vec<usize>, acc: &mut A, visit: &impl Fn(&mut A, &[&Subspace])) {
        let k = self.spaces.len();
        if v == k {
            let tuple: Vec<&Subspace> = chosen.iter().enumerate().map(|(i, &s)| &self.spaces[i][s]).collect();
            visit(acc, &tuple);
            return;
        }
        for s in 0..self.spaces[v].len() {
            chosen.push(s);
            if self.stable_at(v, chosen) {
                self.dfs(v + 1, chosen, acc, visit);
            }
            chosen.pop();
        }
    }

    /// Run the search, one accumulator per subspace of the first vertex,
    /// returned in enumeration order.
    fn run<A: Send>(
        &self,
        exec: Execution,
        init: impl Fn() -> A + Sync + Send,
        visit: impl Fn(&mut A, &[&Subspace]) + Sync + Send,
    ) -> Vec<A> {
        let first: Vec<usize> = (0..self.spaces[0].len()).collect();
        exec::map_ordered(exec, &first, |&s0| {
            let mut acc = init();
            let mut chosen = vec![s0];
            if self.stable_at(0, &chosen) {
                self.dfs(1, &mut chosen, &mut acc, &visit);
            }
            acc
        })
    }
}

fn to_witness(tuple: &[&Subspace]) -> SubrepWitness {
    SubrepWitness {
        beta: DimVector(tuple.iter().map(|s| s.dim()).collect()),
        bases: tuple.iter().map(|s| s.basis.clone()).collect(),
    }
}

fn check_shape(rep: &Representation<PrimeField>) -> Result<()> {
    rep.quiver().check_dim(rep.dim())
}

/// Every subrepresentation of `rep`, each exactly once, in enumeration order.
pub fn enumerate_subreps(
    rep: &Representation<PrimeField>,
    config: &OracleConfig,
) -> Result<Vec<SubrepWitness>> {
    check_shape(rep)?;
    let (search, _) = Search::new(rep, config)?;
    let parts = search.run(config.execution, Vec::new, |acc: &mut Vec<SubrepWitness>, t| {
        acc.push(to_witness(t))
    });
    Ok(parts.into_iter().flatten().collect())
}

type Key = (i64, usize, DimVector);

#[derive(Default)]
struct Extremes {
    count: u64,
    min: Option<(Key, SubrepWitness)>,
    zero_proper: Option<(Key, SubrepWitness)>,
}

impl Extremes {
    fn offer(slot: &mut Option<(Key, SubrepWitness)>, key: Key, w: impl FnOnce() -> SubrepWitness) {
        if slot.as_ref().is_none_or(|(k, _)| key < *k) {
            *slot = Some((key, w()));
        }
    }

    fn merge(mut self, other: Extremes) -> Extremes {
        self.count += other.count;
        if let Some((k, w)) = other.min {
            Self::offer(&mut self.min, k, || w);
        }
        if let Some((k, w)) = other.zero_proper {
            Self::offer(&mut self.zero_proper, k, || w);
        }
        self
    }
}

fn scan(
    rep: &Representation<PrimeField>,
    theta: &Weight,
    config: &OracleConfig,
) -> Result<(Extremes, u128)> {
    let (search, needed) = Search::new(rep, config)?;
    let alpha = rep.dim().clone();
    let parts = search.run(config.execution, Extremes::default, |acc: &mut Extremes, t| {
        acc.count += 1;
        let beta = DimVector(t.iter().map(|s| s.dim()).collect());
        let tv = theta.pair_unchecked(&beta);
        let key = (tv, beta.total(), beta.clone());
        Extremes::offer(&mut acc.min, key.clone(), || to_witness(t));
        if tv == 0 && !beta.is_zero() && beta != alpha {
            Extremes::offer(&mut acc.zero_proper, key, || to_witness(t));
        }
    });
    let merged = parts.into_iter().fold(Extremes::default(), Extremes::merge);
    Ok((merged, needed))
}

fn witness_of((key, w): (Key, SubrepWitness)) -> Witness {
    Witness {
        beta: w.beta,
        theta_value: key.0,
        bases: w.bases,
    }
}

/// θ-semistability: `θ(α) = 0` and `θ(β) ≥ 0` for every subrepresentation.
///
/// On failure the witness minimizes `θ(β)`, ties broken by smallest `d(β)`
/// and then lexicographic `β`.
pub fn is_semistable(
    rep: &Representation<PrimeField>,
    theta: &Weight,
    config: &OracleConfig,
) -> Result<OracleVerdict> {
    check_shape(rep)?;
    let theta_of_m = rep.theta(theta)?;
    if theta_of_m != 0 {
        return Ok(OracleVerdict {
            holds: false,
            theta_of_m,
            witness: None,
            reason: Some(format!("theta(M) = {theta_of_m} is not zero")),
            subreps_examined: 0,
            budget_used: 0,
        });
    }
    let (ext, needed) = scan(rep, theta, config)?;
    let min = ext.min.expect("the zero subrepresentation always exists");
    let holds = min.0 .0 >= 0;
    Ok(OracleVerdict {
        holds,
        theta_of_m,
        reason: (!holds).then(|| format!("subrepresentation with theta = {}", min.0 .0)),
        witness: (!holds).then(|| witness_of(min)),
        subreps_examined: ext.count,
        budget_used: needed,
    })
}

/// θ-stability: semistable, and `0`, `M` are the only subrepresentations with `θ = 0`.
pub fn is_stable(
    rep: &Representation<PrimeField>,
    theta: &Weight,
    config: &OracleConfig,
) -> Result<OracleVerdict> {
    check_shape(rep)?;
    let theta_of_m = rep.theta(theta)?;
    if theta_of_m != 0 {
        return is_semistable(rep, theta, config);
    }
    let (ext, needed) = scan(rep, theta, config)?;
    let min = ext.min.expect("the zero subrepresentation always exists");
    let (holds, witness, reason) = if min.0 .0 < 0 {
        let reason = format!("not semistable: subrepresentation with theta = {}", min.0 .0);
        (false, Some(witness_of(min)), Some(reason))
    } else if let Some(z) = ext.zero_proper {
        let reason = "proper nonzero subrepresentation with theta = 0".to_string();
        (false, Some(witness_of(z)), Some(reason))
    } else {
        (true, None, None)
    };
    Ok(OracleVerdict {
        holds,
        theta_of_m,
        witness,
        reason,
        subreps_examined: ext.count,
        budget_used: needed,
    })
}

/// Total number of matrix entries of a representation of dimension `dim`.
fn entry_count(q: &Quiver, dim: &DimVector) -> usize {
    q.arrows().iter().map(|a| dim[a.src] * dim[a.tgt]).sum()
}

/// Number of representations of dimension `dim` over `𝔽_p`, saturating.
pub fn representation_count(q: &Quiver, p: u64, dim: &DimVector) -> u128 {
    let n = entry_count(q, dim) as u32;
    (p as u128).checked_pow(n).unwrap_or(u128::MAX)
}

/// The `index`-th representation in base-`p` order over all entries
/// (arrows in quiver order, each matrix row-major, first entry least significant).
pub fn representation_at(
    q: &Arc<Quiver>,
    f: PrimeField,
    dim: &DimVector,
    mut index: u128,
) -> Result<Representation<PrimeField>> {
    q.check_dim(dim)?;
    let p = f.modulus() as u128;
    let maps = q
        .arrows()
        .iter()
        .map(|a| {
            let (r, c) = (dim[a.tgt], dim[a.src]);
            let data = (0..r * c)
                .map(|_| {
                    let d = (index % p) as u64;
                    index /= p;
                    d
                })
                .collect();
            Matrix::from_rows(r, c, data)
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::new(q.clone(), f, dim.clone(), maps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub total: u128,
    pub semistable: u128,
    pub stable: u128,
}

/// Count θ-semistable and θ-stable points among all representations of
/// dimension `dim` over `𝔽_p`. The outer loop over representations is the
/// parallel one.
pub fn census(
    q: &Arc<Quiver>,
    f: PrimeField,
    dim: &DimVector,
    theta: &Weight,
    config: &OracleConfig,
) -> Result<Census> {
    q.check_dim(dim)?;
    let total = representation_count(q, f.modulus(), dim);
    if total > config.budget {
        return Err(Error::BudgetExceeded {
            name: "representations",
            needed: total,
            budget: config.budget,
        });
    }
    let inner = OracleConfig {
        execution: Execution::Sequential,
        ..*config
    };
    let verdicts = exec::map_range(config.execution, total as u64, |i| -> Result<(bool, bool)> {
        let rep = representation_at(q, f, dim, i as u128)?;
        if theta.pair_unchecked(dim) != 0 {
            return Ok((false, false));
        }
        let (ext, _) = scan(&rep, theta, &inner)?;
        let ss = ext.min.is_some_and(|(k, _)| k.0 >= 0);
        Ok((ss, ss && ext.zero_proper.is_none()))
    });
    let mut c = Census {
        total,
        semistable: 0,
        stable: 0,
    };
    for v in verdicts {
        let (ss, st) = v?;
        c.semistable += ss as u128;
        c.stable += st as u128;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Heuristic,
    Proof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Semistable,
    Stable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalVerdict {
    /// The property holds modulo every tested prime.
    HoldsAtAllPrimes,
    /// `θ(M) ≠ 0`.
    ThetaNonzero,
    /// A witness found mod p lifts to ℚ.
    Refuted,
    /// Fails modulo some prime, but no witness lifted to ℚ.
    RefutedModP,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeNotice {
    pub prime: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedWitness {
    pub prime: u64,
    pub beta: DimVector,
    pub theta_value: i64,
    pub lifted: bool,
    /// Lifted basis vectors as `num/den` strings, when the lift verified.
    pub bases: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalCheck {
    pub property: Property,
    pub verdict: RationalVerdict,
    pub certainty: Certainty,
    pub holds: bool,
    pub theta_of_m: i64,
    pub primes_tested: Vec<u64>,
    pub skipped: Vec<PrimeNotice>,
    pub witness: Option<LiftedWitness>,
    pub budget_used: u128,
}

/// Semistability of a rational representation, see [`check_property_over_rationals`].
pub fn check_over_rationals(
    rep: &Representation<Rationals>,
    theta: &Weight,
    primes: &[u64],
    config: &OracleConfig,
) -> Result<RationalCheck> {
    check_property_over_rationals(rep, theta, Property::Semistable, primes, config)
}

/// Reduce a rational representation modulo each prime and run the oracle.
///
/// A positive answer is only ever reported as a heuristic. A negative one is
/// a proof when the witness subspaces, lifted to symmetric integer
/// representatives, are arrow-stable over ℚ with the same dimensions.
pub fn check_property_over_rationals(
    rep: &Representation<Rationals>,
    theta: &Weight,
    property: Property,
    primes: &[u64],
    config: &OracleConfig,
) -> Result<RationalCheck> {
    let theta_of_m = rep.theta(theta)?;
    let mut out = RationalCheck {
        property,
        verdict: RationalVerdict::HoldsAtAllPrimes,
        certainty: Certainty::Heuristic,
        holds: true,
        theta_of_m,
        primes_tested: Vec::new(),
        skipped: Vec::new(),
        witness: None,
        budget_used: 0,
    };
    if theta_of_m != 0 {
        out.verdict = RationalVerdict::ThetaNonzero;
        out.certainty = Certainty::Proof;
        out.holds = false;
        return Ok(out);
    }
    for &p in primes {
        let f = PrimeField::new(p)?;
        let Some(reduced) = rep.convert(f, |x| f.from_rational(x)) else {
            out.skipped.push(PrimeNotice {
                prime: p,
                reason: format!("{p} divides a denominator"),
            });
            continue;
        };
        let v = match property {
            Property::Semistable => is_semistable(&reduced, theta, config)?,
            Property::Stable => is_stable(&reduced, theta, config)?,
        };
        out.primes_tested.push(p);
        out.budget_used = out.budget_used.max(v.budget_used);
        let Some(w) = v.witness else { continue };
        let lifted = lift_witness(rep, &f, &w);
        let proved = lifted.is_some();
        let candidate = LiftedWitness {
            prime: p,
            beta: w.beta,
            theta_value: w.theta_value,
            lifted: proved,
            bases: lifted,
        };
        out.holds = false;
        if proved {
            out.verdict = RationalVerdict::Refuted;
            out.certainty = Certainty::Proof;
            out.witness = Some(candidate);
            return Ok(out);
        }
        if out.witness.is_none() {
            out.verdict = RationalVerdict::RefutedModP;
            out.witness = Some(candidate);
        }
    }
    if out.primes_tested.is_empty() {
        return Err(Error::InvalidArgument(
            "no usable prime: every prime divides a denominator".into(),
        ));
    }
    Ok(out)
}

fn lift_witness(
    rep: &Representation<Rationals>,
    f: &PrimeField,
    w: &Witness,
) -> Option<Vec<Vec<Vec<String>>>> {
    let q = Rationals;
    let bases: Vec<Matrix<BigRational>> = w
        .bases
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let rows = b
                .iter()
                .map(|v| v.iter().map(|&x| q.from_i64(f.lift(x))).collect())
                .collect();
            Matrix::from_nested(b.len(), rep.dim()[i], rows).ok()
        })
        .collect::<Option<_>>()?;
    for (i, u) in bases.iter().enumerate() {
        if u.rank(&q) != w.beta[i] {
            return None;
        }
    }
    for (ai, a) in rep.quiver().arrows().iter().enumerate() {
        let mut rows = bases[a.tgt].to_nested();
        for r in 0..bases[a.src].rows() {
            rows.push(rep.maps()[ai].mul_vec(&q, bases[a.src].row(r)));
        }
        let stacked = Matrix::from_nested(rows.len(), rep.dim()[a.tgt], rows).ok()?;
        if stacked.rank(&q) != w.beta[a.tgt] {
            return None;
        }
    }
    Some(
        bases
            .iter()
            .map(|b| b.to_nested().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
            .collect(),
    )
}
