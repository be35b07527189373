//! Concrete quiver representations and their homological linear algebra.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{DimVector, Path, Quiver, Weight};

/// A representation of a quiver: one matrix of shape `a_tgt × a_src` per arrow.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<F: Field> {
    quiver: Arc<Quiver>,
    field: F,
    dim: DimVector,
    maps: Vec<Matrix<F::Elem>>,
}

impl<F: Field> Representation<F> {
    /// `maps` is indexed like `quiver.arrows()`.
    pub fn new(
        quiver: Arc<Quiver>,
        field: F,
        dim: DimVector,
        maps: Vec<Matrix<F::Elem>>,
    ) -> Result<Self> {
        quiver.check_dim(&dim)?;
        if maps.len() != quiver.arrows().len() {
            return Err(Error::LengthMismatch {
                expected: quiver.arrows().len(),
                found: maps.len(),
            });
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            let want = (dim[a.tgt], dim[a.src]);
            if m.shape() != want {
                return Err(Error::ShapeMismatch(format!(
                    "arrow `{}` needs a {}x{} matrix, got {}x{}",
                    a.id,
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Representation {
            quiver,
            field,
            dim,
            maps,
        })
    }

    /// Build from `(arrow id, row-major entries)` pairs; arrows not listed get zero maps.
    pub fn from_entries(
        quiver: Arc<Quiver>,
        field: F,
        dim: DimVector,
        entries: &[(&str, Vec<F::Elem>)],
    ) -> Result<Self> {
        quiver.check_dim(&dim)?;
        let mut maps: Vec<Matrix<F::Elem>> = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(&field, dim[a.tgt], dim[a.src]))
            .collect();
        for (id, data) in entries {
            let idx = quiver.arrow_by_id(id)?;
            let a = quiver.arrow(idx);
            maps[idx] = Matrix::from_rows(dim[a.tgt], dim[a.src], data.clone())?;
        }
        Representation::new(quiver, field, dim, maps)
    }

    pub fn zero(quiver: Arc<Quiver>, field: F, dim: DimVector) -> Result<Self> {
        Self::from_entries(quiver, field, dim, &[])
    }

    /// Uniformly random over 𝔽_p; small random rationals over ℚ.
    pub fn random<R: Rng + ?Sized>(
        quiver: Arc<Quiver>,
        field: F,
        dim: DimVector,
        rng: &mut R,
    ) -> Result<Self> {
        quiver.check_dim(&dim)?;
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| {
                let (r, c) = (dim[a.tgt], dim[a.src]);
                let data = (0..r * c).map(|_| field.random(rng)).collect();
                Matrix::from_rows(r, c, data).expect("shape is consistent")
            })
            .collect();
        Representation::new(quiver, field, dim, maps)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn maps(&self) -> &[Matrix<F::Elem>] {
        &self.maps
    }

    pub fn map_of(&self, arrow_id: &str) -> Result<&Matrix<F::Elem>> {
        Ok(&self.maps[self.quiver.arrow_by_id(arrow_id)?])
    }

    /// `θ(M) = θ(dim M)`.
    pub fn theta(&self, theta: &Weight) -> Result<i64> {
        theta.pair(&self.dim)
    }

    fn check_compatible(&self, other: &Representation<F>) -> Result<()> {
        if self.quiver != other.quiver {
            return Err(Error::QuiverMismatch);
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.tag().to_string(),
                other.field.tag().to_string(),
            ));
        }
        Ok(())
    }

    /// Matrix of a path: identity for `e_i`, otherwise `M_{a_m} ⋯ M_{a_1}`.
    pub fn evaluate_path(&self, path: &Path) -> Result<Matrix<F::Elem>> {
        let f = &self.field;
        if path.source() >= self.quiver.vertex_count() || path.target() >= self.quiver.vertex_count()
        {
            return Err(Error::InvalidArgument("path does not belong to this quiver".into()));
        }
        let mut acc = Matrix::identity(f, self.dim[path.source()]);
        let mut at = path.source();
        for &a in path.arrows() {
            let arrow = self
                .quiver
                .arrows()
                .get(a)
                .ok_or_else(|| Error::InvalidArgument("path does not belong to this quiver".into()))?;
            if arrow.src != at {
                return Err(Error::NotComposable(format!("arrow `{}`", arrow.id)));
            }
            acc = self.maps[a].mul(f, &acc)?;
            at = arrow.tgt;
        }
        Ok(acc)
    }

    /// Block-diagonal sum `M ⊕ N`.
    pub fn direct_sum(&self, other: &Representation<F>) -> Result<Representation<F>> {
        self.check_compatible(other)?;
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| a.block_diag(&self.field, b))
            .collect();
        Representation::new(
            self.quiver.clone(),
            self.field.clone(),
            self.dim.add(&other.dim),
            maps,
        )
    }

    /// Base change `M_a ↦ g_j · M_a · g_i^{-1}` for every arrow `a: i → j`.
    pub fn act(&self, g: &GroupElement<F>) -> Result<Representation<F>> {
        g.check_dims(&self.dim)?;
        let f = &self.field;
        let maps = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.maps)
            .map(|(a, m)| g.mats[a.tgt].mul(f, m)?.mul(f, &g.inverses[a.src]))
            .collect::<Result<Vec<_>>>()?;
        Representation::new(self.quiver.clone(), f.clone(), self.dim.clone(), maps)
    }

    /// The linear map `⊕_i Hom(M_i,N_i) → ⊕_{a:i→j} Hom(M_i,N_j)`,
    /// `(f_i) ↦ (N_a f_i − f_j M_a)`, in coordinates.
    ///
    /// Unknowns are the entries of each `f_i` (an `b_i × a_i` matrix) in vertex
    /// order, row-major; equations are the entries of each arrow component.
    fn hom_ext_map(&self, other: &Representation<F>) -> (Matrix<F::Elem>, Vec<usize>) {
        let f = &self.field;
        let a = &self.dim;
        let b = &other.dim;
        let mut var_offset = Vec::with_capacity(a.len());
        let mut nvars = 0;
        for i in 0..a.len() {
            var_offset.push(nvars);
            nvars += b[i] * a[i];
        }
        let arrows = self.quiver.arrows();
        let mut eq_offset = Vec::with_capacity(arrows.len());
        let mut neqs = 0;
        for arrow in arrows {
            eq_offset.push(neqs);
            neqs += b[arrow.tgt] * a[arrow.src];
        }
        let mut l = Matrix::zeros(f, neqs, nvars);
        for (ai, arrow) in arrows.iter().enumerate() {
            let (i, j) = (arrow.src, arrow.tgt);
            let m_a = &self.maps[ai];
            let n_a = &other.maps[ai];
            for r in 0..b[j] {
                for c in 0..a[i] {
                    let row = eq_offset[ai] + r * a[i] + c;
                    // (N_a f_i)[r][c] = Σ_s N_a[r][s] f_i[s][c]
                    for s in 0..b[i] {
                        let col = var_offset[i] + s * a[i] + c;
                        let v = f.add(l.get(row, col), n_a.get(r, s));
                        l.set(row, col, v);
                    }
                    // (f_j M_a)[r][c] = Σ_s f_j[r][s] M_a[s][c]
                    for s in 0..a[j] {
                        let col = var_offset[j] + r * a[j] + s;
                        let v = f.sub(l.get(row, col), m_a.get(s, c));
                        l.set(row, col, v);
                    }
                }
            }
        }
        (l, eq_offset)
    }

    /// Intertwiners `f: M → N`, i.e. solutions of `f_j M_a = N_a f_i`.
    pub fn hom_space(&self, other: &Representation<F>) -> Result<HomSpace<F>> {
        self.check_compatible(other)?;
        let (l, _) = self.hom_ext_map(other);
        let kernel = l.kernel(&self.field);
        let basis = kernel
            .into_iter()
            .map(|v| {
                let mut off = 0;
                (0..self.dim.len())
                    .map(|i| {
                        let (r, c) = (other.dim[i], self.dim[i]);
                        let m = Matrix::from_rows(r, c, v[off..off + r * c].to_vec())
                            .expect("shape is consistent");
                        off += r * c;
                        m
                    })
                    .collect()
            })
            .collect::<Vec<Vec<_>>>();
        Ok(HomSpace {
            dim: basis.len(),
            basis,
        })
    }

    /// `Ext¹(M, N)` as the cokernel of the map whose kernel is `Hom(M, N)`.
    pub fn ext_space(&self, other: &Representation<F>) -> Result<ExtSpace> {
        self.check_compatible(other)?;
        self.quiver.require_acyclic("ext_space")?;
        let (l, eq_offset) = self.hom_ext_map(other);
        // pivots of the row-reduced image span; the other coordinates span a complement
        let (_, pivots) = l.transpose().rref(&self.field);
        let mut is_pivot = vec![false; l.rows()];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let arrows = self.quiver.arrows();
        let mut complement = Vec::new();
        for (ai, arrow) in arrows.iter().enumerate() {
            let width = self.dim[arrow.src];
            let size = other.dim[arrow.tgt] * width;
            for k in 0..size {
                if !is_pivot[eq_offset[ai] + k] {
                    complement.push(ExtCoordinate {
                        arrow: arrow.id.clone(),
                        row: k / width,
                        col: k % width,
                    });
                }
            }
        }
        Ok(ExtSpace {
            dim: complement.len(),
            target_dim: l.rows(),
            image_rank: pivots.len(),
            complement,
        })
    }

    /// `dim Hom(M,N)` and `dim Ext¹(M,N)` from a single rank computation.
    pub fn hom_ext_dims(&self, other: &Representation<F>) -> Result<(usize, usize)> {
        self.check_compatible(other)?;
        self.quiver.require_acyclic("ext_space")?;
        let (l, _) = self.hom_ext_map(other);
        let rank = l.rank(&self.field);
        Ok((l.cols() - rank, l.rows() - rank))
    }

    /// Apply a field homomorphism entrywise (e.g. reduction ℚ → 𝔽_p).
    pub fn convert<G: Field>(
        &self,
        target: G,
        conv: impl Fn(&F::Elem) -> Option<G::Elem>,
    ) -> Option<Representation<G>> {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let entries = m.entries().iter().map(&conv).collect::<Option<Vec<_>>>()?;
                Some(Matrix::from_rows(m.rows(), m.cols(), entries).expect("same shape"))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Representation {
            quiver: self.quiver.clone(),
            field: target,
            dim: self.dim.clone(),
            maps,
        })
    }
}

#[derive(Clone, Debug)]
pub struct HomSpace<F: Field> {
    pub dim: usize,
    /// Each element is a tuple `(f_1, …, f_k)` with `f_i` of shape `b_i × a_i`.
    pub basis: Vec<Vec<Matrix<F::Elem>>>,
}

/// A coordinate of `⊕_{a:i→j} Hom(M_i, N_j)`: entry `(row, col)` of the `a` component.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ExtCoordinate {
    pub arrow: String,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ExtSpace {
    pub dim: usize,
    /// Dimension of `⊕_{a:i→j} Hom(M_i, N_j)`.
    pub target_dim: usize,
    pub image_rank: usize,
    /// Coordinate vectors whose classes form a basis of the cokernel.
    pub complement: Vec<ExtCoordinate>,
}

/// An element `(g_1, …, g_k)` of `GL(α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<F: Field> {
    field: F,
    mats: Vec<Matrix<F::Elem>>,
    inverses: Vec<Matrix<F::Elem>>,
}

impl<F: Field> GroupElement<F> {
    pub fn new(field: F, mats: Vec<Matrix<F::Elem>>) -> Result<Self> {
        let mut inverses = Vec::with_capacity(mats.len());
        for (i, m) in mats.iter().enumerate() {
            let inv = m
                .inverse(&field)
                .map_err(|_| Error::ShapeMismatch(format!("g_{} is not square", i + 1)))?
                .ok_or(Error::SingularGroupElement(i + 1))?;
            inverses.push(inv);
        }
        Ok(GroupElement {
            field,
            mats,
            inverses,
        })
    }

    /// Scalar matrices `c_i · I_{a_i}`.
    pub fn scalars(field: F, dim: &DimVector, scalars: &[F::Elem]) -> Result<Self> {
        if scalars.len() != dim.len() {
            return Err(Error::LengthMismatch {
                expected: dim.len(),
                found: scalars.len(),
            });
        }
        let mats = dim
            .iter()
            .zip(scalars)
            .map(|(&a, s)| Matrix::identity(&field, a).scale(&field, s))
            .collect();
        Self::new(field, mats)
    }

    pub fn identity(field: F, dim: &DimVector) -> Self {
        let mats = dim.iter().map(|&a| Matrix::identity(&field, a)).collect();
        Self::new(field, mats).expect("identity is invertible")
    }

    /// Rejection-sampled random invertible element.
    pub fn random<R: Rng + ?Sized>(field: F, dim: &DimVector, rng: &mut R) -> Self {
        let mats = dim
            .iter()
            .map(|&a| loop {
                let data = (0..a * a).map(|_| field.random(rng)).collect();
                let m = Matrix::from_rows(a, a, data).expect("square");
                if !field.is_zero(&m.det(&field).expect("square")) {
                    break m;
                }
            })
            .collect();
        Self::new(field, mats).expect("sampled matrices are invertible")
    }

    pub fn mats(&self) -> &[Matrix<F::Elem>] {
        &self.mats
    }

    /// Componentwise product `(g_i h_i)`, so `act(g·h, M) = act(g, act(h, M))`.
    pub fn compose(&self, h: &GroupElement<F>) -> Result<Self> {
        if self.mats.len() != h.mats.len() {
            return Err(Error::LengthMismatch {
                expected: self.mats.len(),
                found: h.mats.len(),
            });
        }
        let mats = self
            .mats
            .iter()
            .zip(&h.mats)
            .map(|(a, b)| a.mul(&self.field, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.field.clone(), mats)
    }

    /// Character `χ_θ(g) = Π det(g_i)^{θ_i}`.
    pub fn character(&self, theta: &Weight) -> Result<F::Elem> {
        if theta.len() != self.mats.len() {
            return Err(Error::LengthMismatch {
                expected: self.mats.len(),
                found: theta.len(),
            });
        }
        let f = &self.field;
        let mut acc = f.one();
        for (m, &t) in self.mats.iter().zip(&theta.0) {
            let d = m.det(f)?;
            acc = f.mul(&acc, &f.pow(&d, t).expect("determinant of invertible matrix"));
        }
        Ok(acc)
    }

    fn check_dims(&self, dim: &DimVector) -> Result<()> {
        if self.mats.len() != dim.len() {
            return Err(Error::LengthMismatch {
                expected: dim.len(),
                found: self.mats.len(),
            });
        }
        for (i, (m, &a)) in self.mats.iter().zip(dim.iter()).enumerate() {
            if m.shape() != (a, a) {
                return Err(Error::ShapeMismatch(format!(
                    "g_{} is {}x{}, vertex space has dimension {a}",
                    i + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }
}
