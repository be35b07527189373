//! Morphisms between indecomposable projectives, their determinantal
//! semi-invariants, and presentations of universal localizations.
//!
//! `P_i` has a basis of paths starting at `v_i`, and `Hom(P_i, P_j)` is spanned
//! by the paths from `v_j` to `v_i`. A morphism
//! `σ: P_{i_1} ⊕ ⋯ ⊕ P_{i_u} → P_{j_1} ⊕ ⋯ ⊕ P_{j_v}` is a `u × v` matrix whose
//! `(p, q)` entry is a combination of paths from `v_{j_q}` to `v_{i_p}`.
//! At a representation `m` the entry evaluates to an `a_{i_p} × a_{j_q}` block.
//!
//! Localizing at `σ` adjoins a `v × u` matrix `N_σ` of variables subject to
//! `M_σ N_σ = diag(v_{i_p})` and `N_σ M_σ = diag(v_{j_q})`. Under the product
//! convention of [`crate::quiver`] (`p·q` applies `q` first), the variable
//! `y_{qp}` runs from `v_{i_p}` to `v_{j_q}`, and at a point where `M_σ(m)` is
//! invertible the relations hold with `N_σ(m) = M_σ(m)^{-1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{Arrow, DimVector, Path, Quiver, Weight};
use crate::rep::Representation;

/// A formal combination `Σ c_t p_t` of paths sharing one source and one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCombination {
    source: usize,
    target: usize,
    terms: Vec<(BigRational, Path)>,
}

impl PathCombination {
    pub fn zero(source: usize, target: usize) -> Self {
        PathCombination {
            source,
            target,
            terms: Vec::new(),
        }
    }

    /// Merges repeated paths, drops zero coefficients and sorts terms by path order.
    pub fn new(
        q: &Quiver,
        source: usize,
        target: usize,
        terms: Vec<(BigRational, Path)>,
    ) -> Result<Self> {
        let mut merged: Vec<(BigRational, Path)> = Vec::new();
        for (c, p) in terms {
            if p.source() != source || p.target() != target {
                return Err(Error::InvalidArgument(format!(
                    "path {} runs {} → {}, entry is typed {} → {}",
                    p.display(q),
                    q.label(p.source()),
                    q.label(p.target()),
                    q.label(source),
                    q.label(target)
                )));
            }
            match merged.iter_mut().find(|(_, p2)| *p2 == p) {
                Some((c2, _)) => *c2 += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        merged.sort_by(|a, b| q.path_order(&a.1, &b.1));
        Ok(PathCombination {
            source,
            target,
            terms: merged,
        })
    }

    pub fn single(path: Path) -> Self {
        PathCombination {
            source: path.source(),
            target: path.target(),
            terms: vec![(BigRational::one(), path)],
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn terms(&self) -> &[(BigRational, Path)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate<F: Field>(&self, rep: &Representation<F>) -> Result<Matrix<F::Elem>> {
        let f = rep.field();
        let dim = rep.dim();
        let mut acc = Matrix::zeros(f, dim[self.target], dim[self.source]);
        for (c, p) in &self.terms {
            let coeff = f.from_rational(c).ok_or_else(|| Error::NotInField {
                value: c.to_string(),
                field: f.tag().to_string(),
            })?;
            acc = acc.add(f, &rep.evaluate_path(p)?.scale(f, &coeff))?;
        }
        Ok(acc)
    }

    fn shifted(&self, vertex_shift: usize) -> Self {
        PathCombination {
            source: self.source + vertex_shift,
            target: self.target + vertex_shift,
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (c.clone(), p.shifted(vertex_shift)))
                .collect(),
        }
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        CombinationDisplay { comb: self, q }
    }
}

struct CombinationDisplay<'a> {
    comb: &'a PathCombination,
    q: &'a Quiver,
}

impl fmt::Display for CombinationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comb.is_zero() {
            return write!(f, "0");
        }
        for (i, (c, p)) in self.comb.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", p.display(self.q))?;
            } else {
                write!(f, "({c}) {}", p.display(self.q))?;
            }
        }
        Ok(())
    }
}

/// A morphism `⊕_p P_{domain[p]} → ⊕_q P_{codomain[q]}` given by its `u × v`
/// matrix of path combinations.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaMorphism {
    quiver: Arc<Quiver>,
    domain: Vec<usize>,
    codomain: Vec<usize>,
    entries: Vec<Vec<PathCombination>>,
}

impl SigmaMorphism {
    pub fn new(
        quiver: Arc<Quiver>,
        domain: Vec<usize>,
        codomain: Vec<usize>,
        entries: Vec<Vec<PathCombination>>,
    ) -> Result<Self> {
        if domain.is_empty() || codomain.is_empty() {
            return Err(Error::InvalidArgument(
                "a sigma morphism needs nonempty domain and codomain".into(),
            ));
        }
        let k = quiver.vertex_count();
        if let Some(&v) = domain.iter().chain(&codomain).find(|&&v| v >= k) {
            return Err(Error::VertexOutOfRange {
                vertex: quiver.label(v) as i64,
                first: quiver.first_label(),
                last: quiver.label(k - 1),
            });
        }
        if entries.len() != domain.len() || entries.iter().any(|r| r.len() != codomain.len()) {
            return Err(Error::ShapeMismatch(format!(
                "sigma needs a {}x{} matrix of entries",
                domain.len(),
                codomain.len()
            )));
        }
        for (p, row) in entries.iter().enumerate() {
            for (qi, e) in row.iter().enumerate() {
                if e.source != codomain[qi] || e.target != domain[p] {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({}, {}) must run from v{} to v{}",
                        p + 1,
                        qi + 1,
                        quiver.label(codomain[qi]),
                        quiver.label(domain[p])
                    )));
                }
                for (_, path) in &e.terms {
                    if path.arrows().iter().any(|&a| a >= quiver.arrows().len()) {
                        return Err(Error::InvalidArgument("path uses a foreign arrow".into()));
                    }
                }
            }
        }
        Ok(SigmaMorphism {
            quiver,
            domain,
            codomain,
            entries,
        })
    }

    /// The `1 × 1` morphism `P_{target} → P_{source}` given by one path.
    pub fn from_path(quiver: Arc<Quiver>, path: Path) -> Result<Self> {
        let (s, t) = (path.source(), path.target());
        Self::new(quiver, vec![t], vec![s], vec![vec![PathCombination::single(path)]])
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn codomain(&self) -> &[usize] {
        &self.codomain
    }

    pub fn entries(&self) -> &[Vec<PathCombination>] {
        &self.entries
    }

    pub fn entry(&self, p: usize, q: usize) -> &PathCombination {
        &self.entries[p][q]
    }

    /// Whether the shape is that of a member of `Σ_z` for `θ`.
    pub fn has_family_shape(&self, theta: &Weight, z: u32) -> bool {
        sigma_shape(theta, z).is_ok_and(|(d, c)| d == self.domain && c == self.codomain)
    }

    /// `Σ_p a_{i_p}` and `Σ_q a_{j_q}`: the evaluated matrix size.
    pub fn evaluated_shape(&self, alpha: &DimVector) -> (usize, usize) {
        (
            self.domain.iter().map(|&i| alpha[i]).sum(),
            self.codomain.iter().map(|&j| alpha[j]).sum(),
        )
    }

    fn transported(&self, target: Arc<Quiver>, vertex_shift: usize) -> Result<Self> {
        Self::new(
            target,
            self.domain.iter().map(|v| v + vertex_shift).collect(),
            self.codomain.iter().map(|v| v + vertex_shift).collect(),
            self.entries
                .iter()
                .map(|r| r.iter().map(|e| e.shifted(vertex_shift)).collect())
                .collect(),
        )
    }
}

/// Domain and codomain of the maps in `Σ_z`: each `i` with `θ_i > 0` repeated
/// `zθ_i` times, each `j` with `θ_j < 0` repeated `−zθ_j` times.
pub fn sigma_shape(theta: &Weight, z: u32) -> Result<(Vec<usize>, Vec<usize>)> {
    if z == 0 {
        return Err(Error::InvalidArgument("z must be positive".into()));
    }
    let z = z as i64;
    let mut domain = Vec::new();
    let mut codomain = Vec::new();
    for (i, &t) in theta.0.iter().enumerate() {
        if t > 0 {
            domain.extend(std::iter::repeat_n(i, (z * t) as usize));
        } else if t < 0 {
            codomain.extend(std::iter::repeat_n(i, (-z * t) as usize));
        }
    }
    if domain.is_empty() || codomain.is_empty() {
        return Err(Error::DegenerateWeight);
    }
    Ok((domain, codomain))
}

/// A member of `Σ_z` whose entries are random rational combinations of all
/// paths of length `1..=max_path_len` of the right type. Deterministic per seed.
pub fn make_sigma(
    quiver: &Arc<Quiver>,
    theta: &Weight,
    z: u32,
    max_path_len: usize,
    seed: u64,
) -> Result<SigmaMorphism> {
    quiver.check_weight(theta)?;
    quiver.require_acyclic("make_sigma")?;
    let (domain, codomain) = sigma_shape(theta, z)?;
    let paths = quiver.enumerate_paths(Some(max_path_len))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = domain
        .iter()
        .map(|&i| {
            codomain
                .iter()
                .map(|&j| {
                    let terms = paths
                        .iter()
                        .filter(|p| p.source() == j && p.target() == i && !p.is_trivial())
                        .map(|p| (random_coefficient(&mut rng), p.clone()))
                        .collect();
                    PathCombination::new(quiver, j, i, terms)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SigmaMorphism::new(quiver.clone(), domain, codomain, entries)
}

fn random_coefficient(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den: i64 = rng.gen_range(1..=3);
    BigRational::new(num.into(), den.into())
}

/// `Σ_p a_{i_p} = Σ_q a_{j_q}`, i.e. `M_σ(m)` is square at dimension `α`.
pub fn numerical_condition(sigma: &SigmaMorphism, alpha: &DimVector) -> Result<bool> {
    sigma.quiver.check_dim(alpha)?;
    let (r, c) = sigma.evaluated_shape(alpha);
    Ok(r == c)
}

/// The block matrix `M_σ(m)`; rectangular results are allowed.
pub fn evaluate_sigma<F: Field>(
    sigma: &SigmaMorphism,
    rep: &Representation<F>,
) -> Result<Matrix<F::Elem>> {
    if *sigma.quiver != **rep.quiver() {
        return Err(Error::QuiverMismatch);
    }
    let f = rep.field();
    let dim = rep.dim();
    let (rows, cols) = sigma.evaluated_shape(dim);
    let mut out = Matrix::zeros(f, rows, cols);
    let mut r0 = 0;
    for (p, &i) in sigma.domain.iter().enumerate() {
        let mut c0 = 0;
        for (q, &j) in sigma.codomain.iter().enumerate() {
            out.put_block(r0, c0, &sigma.entries[p][q].evaluate(rep)?);
            c0 += dim[j];
        }
        r0 += dim[i];
    }
    Ok(out)
}

/// `d_σ(m) = det M_σ(m)`.
pub fn semi_invariant<F: Field>(sigma: &SigmaMorphism, rep: &Representation<F>) -> Result<F::Elem> {
    evaluate_sigma(sigma, rep)?.det(rep.field())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Idempotent,
    Arrow,
    Variable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    /// Vertex labels.
    pub source: usize,
    pub target: usize,
    #[serde(skip)]
    src_index: usize,
    #[serde(skip)]
    tgt_index: usize,
}

/// `coeff · w_1·w_2⋯w_m`, with `w_m` applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub word: Vec<String>,
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("coeff", &self.coeff.to_string())?;
        st.serialize_field("word", &self.word)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `v_i v_i = v_i`, `v_i v_j = 0`, `Σ v_i = 1`.
    Idempotent,
    /// `v_j a = a`, `a v_i = a` for `a: i → j`.
    ArrowTyping,
    /// Entry of `M_σ N_σ = diag(v_{i_p})`.
    LocalizationRight { sigma: usize },
    /// Entry of `N_σ M_σ = diag(v_{j_q})`.
    LocalizationLeft { sigma: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub lhs: Vec<Term>,
    /// A generator name, `"0"` or `"1"`.
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.kind == GeneratorKind::Variable)
    }

    pub fn localization_relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| {
            matches!(
                r.kind,
                RelationKind::LocalizationLeft { .. } | RelationKind::LocalizationRight { .. }
            )
        })
    }

    /// Vertex indices `(source, target)` of a composable word, `None` otherwise.
    pub fn word_typing(&self, word: &[String]) -> Option<(usize, usize)> {
        let gens: Vec<&Generator> = word.iter().map(|w| self.generator(w)).collect::<Option<_>>()?;
        let (first, last) = (gens.first()?, gens.last()?);
        for w in gens.windows(2) {
            if w[0].src_index != w[1].tgt_index {
                return None;
            }
        }
        Some((last.src_index, first.tgt_index))
    }

    /// For arrow-typing and localization relations: every monomial on the
    /// left is composable and has the typing of the right-hand side.
    pub fn is_well_typed(&self) -> bool {
        self.relations.iter().all(|r| match r.kind {
            RelationKind::Idempotent => true,
            _ => {
                let want = match r.rhs.as_str() {
                    "0" | "1" => None,
                    g => match self.generator(g) {
                        Some(g) => Some((g.src_index, g.tgt_index)),
                        None => return false,
                    },
                };
                let types: Option<Vec<_>> = r.lhs.iter().map(|t| self.word_typing(&t.word)).collect();
                let Some(types) = types else { return false };
                let all_equal = types.windows(2).all(|w| w[0] == w[1]);
                all_equal && want.is_none_or(|w| types.first().is_none_or(|t| *t == w))
            }
        })
    }

    /// Evaluate every non-idempotent relation at a point: arrows act by the
    /// representation, `v_i` by the identity on vertex `i`, and each variable
    /// by the matrix given in `values`. Returns the relations that fail.
    pub fn failing_relations<F: Field>(
        &self,
        rep: &Representation<F>,
        values: &BTreeMap<String, Matrix<F::Elem>>,
    ) -> Result<Vec<usize>> {
        let f = rep.field();
        let dim = rep.dim();
        let q = rep.quiver();
        let gen_matrix = |name: &str| -> Result<Matrix<F::Elem>> {
            let g = self
                .generator(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{name}`")))?;
            match g.kind {
                GeneratorKind::Idempotent => Ok(Matrix::identity(f, dim[g.src_index])),
                GeneratorKind::Arrow => Ok(rep.maps()[q.arrow_by_id(name)?].clone()),
                GeneratorKind::Variable => values
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("no value for `{name}`"))),
            }
        };
        let mut failing = Vec::new();
        for (ri, r) in self.relations.iter().enumerate() {
            if r.kind == RelationKind::Idempotent {
                continue;
            }
            let Some((s, t)) = r.lhs.first().and_then(|term| self.word_typing(&term.word)).or_else(|| {
                self.generator(&r.rhs).map(|g| (g.src_index, g.tgt_index))
            }) else {
                continue;
            };
            let mut lhs = Matrix::zeros(f, dim[t], dim[s]);
            for term in &r.lhs {
                let mut m = gen_matrix(&term.word[0])?;
                for w in &term.word[1..] {
                    m = m.mul(f, &gen_matrix(w)?)?;
                }
                let c = f.from_rational(&term.coeff).ok_or_else(|| Error::NotInField {
                    value: term.coeff.to_string(),
                    field: f.tag().to_string(),
                })?;
                lhs = lhs.add(f, &m.scale(f, &c))?;
            }
            let rhs = match r.rhs.as_str() {
                "0" => Matrix::zeros(f, dim[t], dim[s]),
                g => gen_matrix(g)?,
            };
            if lhs != rhs {
                failing.push(ri);
            }
        }
        Ok(failing)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        out.push_str(&format!("generators: {}\n", names.join(" ")));
        out.push_str("relations:\n");
        for r in &self.relations {
            out.push_str(&format!("  {} = {}\n", format_lhs(&r.lhs), r.rhs));
        }
        out
    }
}

fn format_lhs(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|t| {
            let w = t.word.join("·");
            if t.coeff.is_one() {
                w
            } else {
                format!("({}) {w}", t.coeff)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn idempotent_name(q: &Quiver, v: usize) -> String {
    format!("v{}", q.label(v))
}

/// `y.<k>.<row>.<col>` for entry `(row, col)` of `N_σk`, all 1-based.
pub fn variable_name(sigma: usize, row: usize, col: usize) -> String {
    format!("y.{}.{}.{}", sigma + 1, row + 1, col + 1)
}

fn path_word(q: &Quiver, p: &Path) -> Vec<String> {
    if p.is_trivial() {
        vec![idempotent_name(q, p.source())]
    } else {
        p.arrows().iter().rev().map(|&a| q.arrow(a).id.clone()).collect()
    }
}

/// Presentation of `CQ_Σ` for a finite list of morphisms: the path algebra's
/// idempotent and arrow relations plus both matrix equations for every `σ`.
pub fn localization_presentation(q: &Quiver, sigmas: &[SigmaMorphism]) -> Result<Presentation> {
    for s in sigmas {
        if *s.quiver != *q {
            return Err(Error::QuiverMismatch);
        }
    }
    let k = q.vertex_count();
    let mut generators: Vec<Generator> = (0..k)
        .map(|v| Generator {
            name: idempotent_name(q, v),
            kind: GeneratorKind::Idempotent,
            source: q.label(v),
            target: q.label(v),
            src_index: v,
            tgt_index: v,
        })
        .collect();
    for a in q.arrows() {
        generators.push(Generator {
            name: a.id.clone(),
            kind: GeneratorKind::Arrow,
            source: q.label(a.src),
            target: q.label(a.tgt),
            src_index: a.src,
            tgt_index: a.tgt,
        });
    }
    for (si, s) in sigmas.iter().enumerate() {
        for (row, &j) in s.codomain.iter().enumerate() {
            for (col, &i) in s.domain.iter().enumerate() {
                generators.push(Generator {
                    name: variable_name(si, row, col),
                    kind: GeneratorKind::Variable,
                    source: q.label(i),
                    target: q.label(j),
                    src_index: i,
                    tgt_index: j,
                });
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    for g in &generators {
        if !seen.insert(g.name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "generator name `{}` is used twice",
                g.name
            )));
        }
    }

    let one = BigRational::one();
    let term = |word: Vec<String>, coeff: &BigRational| Term {
        coeff: coeff.clone(),
        word,
    };
    let mut relations = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let vi = idempotent_name(q, i);
            let vj = idempotent_name(q, j);
            relations.push(Relation {
                kind: RelationKind::Idempotent,
                lhs: vec![term(vec![vi.clone(), vj], &one)],
                rhs: if i == j { vi } else { "0".into() },
            });
        }
    }
    relations.push(Relation {
        kind: RelationKind::Idempotent,
        lhs: (0..k).map(|v| term(vec![idempotent_name(q, v)], &one)).collect(),
        rhs: "1".into(),
    });
    for a in q.arrows() {
        relations.push(Relation {
            kind: RelationKind::ArrowTyping,
            lhs: vec![term(vec![idempotent_name(q, a.tgt), a.id.clone()], &one)],
            rhs: a.id.clone(),
        });
        relations.push(Relation {
            kind: RelationKind::ArrowTyping,
            lhs: vec![term(vec![a.id.clone(), idempotent_name(q, a.src)], &one)],
            rhs: a.id.clone(),
        });
    }
    for (si, s) in sigmas.iter().enumerate() {
        let (u, v) = (s.domain.len(), s.codomain.len());
        // (M N)_{p p'} = Σ_q m_{pq} y_{q p'}
        for p in 0..u {
            for p2 in 0..u {
                let mut lhs = Vec::new();
                for qi in 0..v {
                    for (c, path) in &s.entries[p][qi].terms {
                        let mut w = path_word(q, path);
                        w.push(variable_name(si, qi, p2));
                        lhs.push(term(w, c));
                    }
                }
                let rhs = if p == p2 {
                    idempotent_name(q, s.domain[p])
                } else {
                    "0".into()
                };
                relations.push(Relation {
                    kind: RelationKind::LocalizationRight { sigma: si + 1 },
                    lhs,
                    rhs,
                });
            }
        }
        // (N M)_{q q'} = Σ_p y_{qp} m_{p q'}
        for qi in 0..v {
            for q2 in 0..v {
                let mut lhs = Vec::new();
                for p in 0..u {
                    for (c, path) in &s.entries[p][q2].terms {
                        let mut w = vec![variable_name(si, qi, p)];
                        w.extend(path_word(q, path));
                        lhs.push(term(w, c));
                    }
                }
                let rhs = if qi == q2 {
                    idempotent_name(q, s.codomain[qi])
                } else {
                    "0".into()
                };
                relations.push(Relation {
                    kind: RelationKind::LocalizationLeft { sigma: si + 1 },
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(Presentation {
        generators,
        relations,
    })
}

#[derive(Clone, Debug)]
pub struct SigmaAtPoint<E> {
    pub determinant: E,
    /// `N_σ = M_σ(m)^{-1}` when invertible.
    pub inverse: Option<Matrix<E>>,
}

#[derive(Clone, Debug)]
pub struct LocalizedPoint<E> {
    /// Every `M_σ(m)` is invertible.
    pub invertible: bool,
    pub per_sigma: Vec<SigmaAtPoint<E>>,
    /// Both matrix equations hold for every inverse witness.
    pub relations_verified: bool,
}

/// Whether `m` is a point of `rep CQ_Σ`, i.e. every `M_σ(m)` is invertible.
/// The inverse witnesses are re-checked against `M N = I` and `N M = I`.
pub fn check_localized_point<F: Field>(
    sigmas: &[SigmaMorphism],
    rep: &Representation<F>,
) -> Result<LocalizedPoint<F::Elem>> {
    let f = rep.field();
    for (si, s) in sigmas.iter().enumerate() {
        let (d, c) = s.evaluated_shape(rep.dim());
        if *s.quiver != **rep.quiver() {
            return Err(Error::QuiverMismatch);
        }
        if d != c {
            return Err(Error::NumericalCondition {
                sigma: si + 1,
                domain: d,
                codomain: c,
            });
        }
    }
    let mut per_sigma = Vec::with_capacity(sigmas.len());
    let mut verified = true;
    for s in sigmas {
        let m = evaluate_sigma(s, rep)?;
        let determinant = m.det(f)?;
        let inverse = m.inverse(f)?;
        if let Some(n) = &inverse {
            verified &= m.mul(f, n)?.is_identity(f) && n.mul(f, &m)?.is_identity(f);
        }
        per_sigma.push(SigmaAtPoint { determinant, inverse });
    }
    let invertible = per_sigma.iter().all(|s| s.inverse.is_some());
    Ok(LocalizedPoint {
        invertible,
        relations_verified: invertible && verified,
        per_sigma,
    })
}

/// Values of the `y`-variables at a localized point: block `(q, p)` of `N_σ`
/// of shape `a_{j_q} × a_{i_p}`.
pub fn variable_values<F: Field>(
    sigmas: &[SigmaMorphism],
    point: &LocalizedPoint<F::Elem>,
    dim: &DimVector,
) -> BTreeMap<String, Matrix<F::Elem>> {
    let mut out = BTreeMap::new();
    for (si, (s, at)) in sigmas.iter().zip(&point.per_sigma).enumerate() {
        let Some(n) = &at.inverse else { continue };
        let mut r0 = 0;
        for (row, &j) in s.codomain.iter().enumerate() {
            let mut c0 = 0;
            for (col, &i) in s.domain.iter().enumerate() {
                out.insert(variable_name(si, row, col), n.block(r0, c0, dim[j], dim[i]));
                c0 += dim[i];
            }
            r0 += dim[j];
        }
    }
    out
}

/// `Q̂(n)`: a fresh vertex `v_0` and arrows `x<i>_<r>: v_0 → v_i`, `r = 1..n`.
/// Vertex labels of the result start at 0.
pub fn extended_quiver(q: &Quiver, n: usize) -> Result<Quiver> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if q.first_label() != 1 {
        return Err(Error::InvalidArgument(
            "only quivers labelled from 1 can be extended".into(),
        ));
    }
    let mut arrows: Vec<Arrow> = q
        .arrows()
        .iter()
        .map(|a| Arrow {
            id: a.id.clone(),
            src: a.src + 1,
            tgt: a.tgt + 1,
        })
        .collect();
    for i in 1..=q.vertex_count() {
        for r in 1..=n {
            arrows.push(Arrow {
                id: tau_arrow_name(i, r),
                src: 0,
                tgt: i,
            });
        }
    }
    Quiver::with_first_label(q.vertex_count() + 1, 0, arrows)
}

fn tau_arrow_name(i: usize, r: usize) -> String {
    format!("x{i}_{r}")
}

/// `τ: P_1 ⊕ ⋯ ⊕ P_k → P_0^{⊕n}` on `Q̂(n)`, entry `(p, q)` the arrow `x_{pq}`.
pub fn tau_morphism(extended: &Arc<Quiver>, n: usize) -> Result<SigmaMorphism> {
    let k = extended.vertex_count() - 1;
    let entries = (1..=k)
        .map(|i| {
            (1..=n)
                .map(|r| {
                    let a = extended.arrow_by_id(&tau_arrow_name(i, r))?;
                    Ok(PathCombination::single(Path::new(extended, vec![a])?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SigmaMorphism::new(extended.clone(), (1..=k).collect(), vec![0; n], entries)
}

#[derive(Clone, Debug, Serialize)]
pub struct RootPresentation {
    #[serde(skip)]
    pub extended: Arc<Quiver>,
    pub presentation: Presentation,
    /// Words in arrows and variables from `v_0` back to `v_0`, product order,
    /// sorted by length; the empty word is reported as `v0`.
    pub loops: Vec<Vec<String>>,
}

/// Presentation of `B = CQ̂(n)_{Σ ∪ {τ}}` and the loops at `v_0` up to
/// `loop_len_bound`, which generate `v_0 B v_0`.
pub fn root_presentation(
    q: &Quiver,
    sigmas: &[SigmaMorphism],
    n: usize,
    loop_len_bound: usize,
) -> Result<RootPresentation> {
    let extended = Arc::new(extended_quiver(q, n)?);
    let mut all = sigmas
        .iter()
        .map(|s| {
            if *s.quiver != *q {
                return Err(Error::QuiverMismatch);
            }
            s.transported(extended.clone(), 1)
        })
        .collect::<Result<Vec<_>>>()?;
    all.push(tau_morphism(&extended, n)?);
    let presentation = localization_presentation(&extended, &all)?;

    let steps: Vec<&Generator> = presentation
        .generators
        .iter()
        .filter(|g| g.kind != GeneratorKind::Idempotent)
        .collect();
    let mut loops = vec![vec![idempotent_name(&extended, 0)]];
    // walks in application order, tracked with their current vertex
    let mut frontier: Vec<(Vec<&str>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..loop_len_bound {
        let mut next = Vec::new();
        for (walk, at) in &frontier {
            for g in steps.iter().filter(|g| g.src_index == *at) {
                let mut w = walk.clone();
                w.push(g.name.as_str());
                if g.tgt_index == 0 {
                    loops.push(w.iter().rev().map(|s| s.to_string()).collect());
                }
                next.push((w, g.tgt_index));
            }
        }
        frontier = next;
    }
    loops[1..].sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(RootPresentation {
        extended,
        presentation,
        loops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_rational, PrimeField, Rationals};
    use crate::quiver::examples::{a2, discrete, kronecker};
    use crate::rep::GroupElement;

    fn d(v: &[usize]) -> DimVector {
        DimVector(v.to_vec())
    }

    fn k3_point<F: Field>(f: F, m: [i64; 3]) -> Representation<F> {
        let e = |x| f.from_i64(x);
        Representation::from_entries(
            Arc::new(kronecker(3)),
            f.clone(),
            d(&[1, 1]),
            &[("x", vec![e(m[0])]), ("y", vec![e(m[1])]), ("z", vec![e(m[2])])],
        )
        .unwrap()
    }

    fn coordinate(q: &Arc<Quiver>, id: &str) -> SigmaMorphism {
        SigmaMorphism::from_path(q.clone(), Path::from_ids(q, &[id]).unwrap()).unwrap()
    }

    #[test]
    fn sigma_shapes() {
        let q = Arc::new(kronecker(3));
        let theta = Weight(vec![-1, 1]);
        let s = make_sigma(&q, &theta, 1, 3, 7).unwrap();
        assert_eq!((s.domain(), s.codomain()), (&[1][..], &[0][..]));
        let arrows: Vec<_> = s.entry(0, 0).terms().iter().map(|(_, p)| p.ids(&q)[0]).collect();
        assert_eq!(arrows, ["x", "y", "z"]);
        assert!(s.has_family_shape(&theta, 1));
        let s2 = make_sigma(&q, &theta, 2, 1, 7).unwrap();
        assert_eq!((s2.domain(), s2.codomain()), (&[1, 1][..], &[0, 0][..]));
        assert!(matches!(
            make_sigma(&q, &Weight(vec![1, 1]), 1, 1, 0),
            Err(Error::DegenerateWeight)
        ));
        assert_eq!(make_sigma(&q, &theta, 2, 1, 42).unwrap(), make_sigma(&q, &theta, 2, 1, 42).unwrap());
    }

    #[test]
    fn numerical_condition_examples() {
        let q = Arc::new(kronecker(3));
        let s = coordinate(&q, "x");
        assert!(numerical_condition(&s, &d(&[1, 1])).unwrap());
        assert!(!numerical_condition(&s, &d(&[2, 1])).unwrap());
        let theta = Weight(vec![-2, 1]);
        let s = make_sigma(&q, &theta, 1, 1, 1).unwrap();
        for alpha in d(&[3, 3]).sub_vectors() {
            assert_eq!(
                numerical_condition(&s, &alpha).unwrap(),
                theta.pair(&alpha).unwrap() == 0
            );
        }
    }

    #[test]
    fn evaluate_examples() {
        let q = Arc::new(kronecker(3));
        let qq = Rationals;
        let path = |id| Path::from_ids(&q, &[id]).unwrap();
        let comb = PathCombination::new(
            &q,
            0,
            1,
            vec![
                (qq.from_i64(1), path("x")),
                (qq.from_i64(2), path("y")),
                (qq.from_i64(5), path("z")),
            ],
        )
        .unwrap();
        let s = SigmaMorphism::new(q.clone(), vec![1], vec![0], vec![vec![comb.clone()]]).unwrap();
        let m = k3_point(Rationals, [1, 1, 0]);
        assert_eq!(evaluate_sigma(&s, &m).unwrap().entries(), &[qq.from_i64(3)]);
        let zero = SigmaMorphism::new(q.clone(), vec![1], vec![0], vec![vec![PathCombination::zero(0, 1)]])
            .unwrap();
        assert!(evaluate_sigma(&zero, &m).unwrap().is_zero(&qq));
        // α = (2,2): X + 2Y + 5Z
        let e = |v: &[i64]| v.iter().map(|&x| qq.from_i64(x)).collect::<Vec<_>>();
        let m2 = Representation::from_entries(
            q.clone(),
            Rationals,
            d(&[2, 2]),
            &[("x", e(&[1, 2, 3, 4])), ("y", e(&[0, 1, 1, 0])), ("z", e(&[1, 0, 0, -1]))],
        )
        .unwrap();
        assert_eq!(evaluate_sigma(&s, &m2).unwrap().entries(), &e(&[6, 4, 5, -1])[..]);
        assert_eq!(comb.display(&q).to_string(), "x + (2) y + (5) z");
    }

    #[test]
    fn semi_invariant_examples() {
        let q = Arc::new(kronecker(3));
        let x = coordinate(&q, "x");
        let m = k3_point(Rationals, [1, 0, 0]);
        assert_eq!(semi_invariant(&x, &m).unwrap(), Rationals.from_i64(1));
        let s = make_sigma(&q, &Weight(vec![-1, 1]), 1, 1, 3).unwrap();
        assert_eq!(semi_invariant(&s, &k3_point(Rationals, [0, 0, 0])).unwrap(), Rationals.zero());
        let g = GroupElement::scalars(Rationals, &d(&[1, 1]), &[Rationals.from_i64(2), Rationals.from_i64(3)])
            .unwrap();
        let gm = m.act(&g).unwrap();
        let chi = g.character(&Weight(vec![-1, 1])).unwrap();
        assert_eq!(semi_invariant(&x, &gm).unwrap(), parse_rational("3/2").unwrap());
        assert_eq!(semi_invariant(&x, &gm).unwrap(), chi);
        let rect = Representation::zero(q.clone(), Rationals, d(&[2, 1])).unwrap();
        assert!(matches!(semi_invariant(&x, &rect), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn a2_presentation() {
        let q = Arc::new(a2());
        let s = coordinate(&q, "a");
        let pres = localization_presentation(&q, &[s]).unwrap();
        let names: Vec<_> = pres.generators.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["v1", "v2", "a", "y.1.1.1"]);
        let loc: Vec<_> = pres.localization_relations().collect();
        assert_eq!(loc.len(), 2);
        assert_eq!(loc[0].lhs[0].word, ["a", "y.1.1.1"]);
        assert_eq!(loc[0].rhs, "v2");
        assert_eq!(loc[1].lhs[0].word, ["y.1.1.1", "a"]);
        assert_eq!(loc[1].rhs, "v1");
        assert!(pres.is_well_typed());
        assert!(pres.to_text().contains("a·y.1.1.1 = v2"));
    }

    #[test]
    fn empty_sigma_list_presents_path_algebra() {
        let q = kronecker(3);
        let pres = localization_presentation(&q, &[]).unwrap();
        assert_eq!(pres.variables().count(), 0);
        assert_eq!(pres.localization_relations().count(), 0);
        // 4 products of idempotents, their sum, 2 typing relations per arrow
        assert_eq!(pres.relations.len(), 4 + 1 + 6);
    }

    #[test]
    fn k3_presentation_counts() {
        let q = Arc::new(kronecker(3));
        let s = make_sigma(&q, &Weight(vec![-1, 1]), 1, 1, 9).unwrap();
        let pres = localization_presentation(&q, &[s]).unwrap();
        assert_eq!(pres.variables().count(), 1);
        assert_eq!(pres.localization_relations().count(), 2);
        assert!(pres.is_well_typed());
    }

    #[test]
    fn localized_point_examples() {
        let q = Arc::new(kronecker(3));
        let x = coordinate(&q, "x");
        let pt = check_localized_point(std::slice::from_ref(&x), &k3_point(Rationals, [1, 0, 0])).unwrap();
        assert!(pt.invertible && pt.relations_verified);
        assert_eq!(pt.per_sigma[0].inverse.as_ref().unwrap().entries(), &[Rationals.one()]);
        let pt = check_localized_point(std::slice::from_ref(&x), &k3_point(Rationals, [0, 1, 0])).unwrap();
        assert!(!pt.invertible);
        let rect = Representation::zero(q, Rationals, d(&[2, 1])).unwrap();
        assert!(matches!(
            check_localized_point(&[x], &rect),
            Err(Error::NumericalCondition { sigma: 1, .. })
        ));
    }

    #[test]
    fn presentation_relations_hold_at_localized_points() {
        let f = PrimeField::new(7).unwrap();
        let q = Arc::new(kronecker(3));
        let theta = Weight(vec![-1, 1]);
        let sigmas = vec![
            make_sigma(&q, &theta, 1, 1, 1).unwrap(),
            make_sigma(&q, &theta, 2, 1, 2).unwrap(),
        ];
        let pres = localization_presentation(&q, &sigmas).unwrap();
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(4);
        let mut found = 0;
        while found < 5 {
            let m = Representation::random(q.clone(), f, d(&[2, 2]), &mut rng).unwrap();
            let pt = check_localized_point(&sigmas, &m).unwrap();
            if !pt.invertible {
                continue;
            }
            found += 1;
            let values = variable_values::<PrimeField>(&sigmas, &pt, m.dim());
            assert_eq!(pres.failing_relations(&m, &values).unwrap(), Vec::<usize>::new());
        }
    }

    #[test]
    fn extended_quiver_examples() {
        let e = extended_quiver(&a2(), 2).unwrap();
        assert_eq!((e.vertex_count(), e.arrows().len()), (3, 5));
        assert!(e.is_acyclic());
        assert_eq!(extended_quiver(&a2(), 1).unwrap().arrows().len(), 3);
        let e1 = extended_quiver(&discrete(1), 1).unwrap();
        assert_eq!((e1.vertex_count(), e1.arrows().len()), (2, 1));
        assert!(extended_quiver(&a2(), 0).is_err());
        let cyc = Quiver::from_labels(1, &[("l", 1, 1)]).unwrap();
        assert!(!extended_quiver(&cyc, 1).unwrap().is_acyclic());
    }

    #[test]
    fn tau_examples() {
        let e = Arc::new(extended_quiver(&a2(), 2).unwrap());
        let tau = tau_morphism(&e, 2).unwrap();
        let names: Vec<Vec<String>> = tau
            .entries()
            .iter()
            .map(|r| r.iter().map(|c| c.display(&e).to_string()).collect())
            .collect();
        assert_eq!(names, [["x1_1", "x1_2"], ["x2_1", "x2_2"]]);
        for (p, row) in tau.entries().iter().enumerate() {
            for c in row {
                assert_eq!((c.source(), c.target()), (0, p + 1));
            }
        }
        let e1 = Arc::new(extended_quiver(&discrete(1), 1).unwrap());
        let t1 = tau_morphism(&e1, 1).unwrap();
        assert_eq!(t1.entry(0, 0).display(&e1).to_string(), "x1_1");
        // square iff Σ a_i = n a_0
        assert!(numerical_condition(&tau, &d(&[1, 1, 1])).unwrap());
        assert!(!numerical_condition(&tau, &d(&[1, 1, 2])).unwrap());
    }

    #[test]
    fn root_presentation_loops() {
        let r = root_presentation(&discrete(1), &[], 1, 2).unwrap();
        assert_eq!(r.loops, vec![vec!["v0".to_string()], vec!["y.1.1.1".into(), "x1_1".into()]]);
        let r0 = root_presentation(&discrete(1), &[], 1, 0).unwrap();
        assert_eq!(r0.loops.len(), 1);
        let ra = root_presentation(&a2(), &[], 1, 2).unwrap();
        assert_eq!(ra.loops.iter().filter(|l| l.len() == 2).count(), 2);
        assert!(ra.presentation.is_well_typed());
        // a sigma over Q is carried over to the extended quiver
        let q = Arc::new(a2());
        let s = coordinate(&q, "a");
        let rs = root_presentation(&q, &[s], 1, 3).unwrap();
        assert_eq!(rs.presentation.variables().count(), 1 + 2);
        assert!(rs.presentation.is_well_typed());
    }
}
