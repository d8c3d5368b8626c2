use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cone::{gordan, Alternative};
use super::vertices::{self, VertexMethod};
use super::{linalg, volume};
use super::{AffineForm, GeometryError, Rational};

/// A bounded polytope `{x in R^dim : f(x) >= 0 for every stored form f}`.
///
/// Inequalities are normalized to integer rows with content 1 and
/// deduplicated; the vertex list is computed on construction.
#[derive(Clone, Debug)]
pub struct HPolytope {
    dimension: usize,
    inequalities: Vec<AffineForm>,
    vertices: Vec<Vec<Rational>>,
}

/// The vertex set of a polytope. Every listed point is a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub vertices: Vec<Vec<Rational>>,
}

impl HPolytope {
    pub fn new(dimension: usize, inequalities: Vec<AffineForm>) -> Result<Self, GeometryError> {
        Self::with_method(dimension, inequalities, VertexMethod::Auto)
    }

    pub fn with_method(
        dimension: usize,
        inequalities: Vec<AffineForm>,
        method: VertexMethod,
    ) -> Result<Self, GeometryError> {
        let mut rows: Vec<AffineForm> = Vec::with_capacity(inequalities.len());
        for f in &inequalities {
            if f.dimension() != dimension {
                return Err(GeometryError::DimensionMismatch {
                    expected: dimension,
                    found: f.dimension(),
                });
            }
            let n = f.normalized();
            if n.is_trivial() && !n.constant.is_negative() {
                continue;
            }
            if !rows.contains(&n) {
                rows.push(n);
            }
        }
        let vertices = vertices::vertices(dimension, &rows, method)?;
        Ok(Self {
            dimension,
            inequalities: rows,
            vertices,
        })
    }

    /// Builds from integer rows `(coefficients, constant)` meaning `<c, x> + k >= 0`.
    pub fn from_integer_rows(dimension: usize, rows: &[(Vec<i64>, i64)]) -> Result<Self, GeometryError> {
        Self::new(
            dimension,
            rows.iter().map(|(c, k)| AffineForm::geq_int(c, *k)).collect(),
        )
    }

    /// The box `prod [lo_i, hi_i]`.
    pub fn cuboid(bounds: &[(Rational, Rational)]) -> Result<Self, GeometryError> {
        let n = bounds.len();
        let mut rows = Vec::with_capacity(2 * n);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            rows.push(AffineForm::geq(e.clone(), -lo.clone()));
            rows.push(AffineForm::leq(e, hi.clone()));
        }
        Self::new(n, rows)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn inequalities(&self) -> &[AffineForm] {
        &self.inequalities
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|f| f.is_satisfied_by(x))
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn affine_dimension(&self) -> Option<usize> {
        linalg::affine_rank(&self.vertices)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dimension() == Some(self.dimension)
    }

    pub fn volume(&self) -> Rational {
        volume::volume(self.dimension, &self.inequalities, &self.vertices)
    }

    /// Simplices (vertex index lists) of the pulling triangulation; empty
    /// unless the polytope is full-dimensional.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        if !self.is_full_dimensional() || self.dimension == 0 {
            return Vec::new();
        }
        volume::triangulation(self.dimension, &self.inequalities, &self.vertices)
    }

    /// Polytope in the remaining coordinates after fixing some of them.
    pub fn slice(&self, fixed: &[(usize, Rational)]) -> Result<Self, GeometryError> {
        let mut is_fixed = vec![None; self.dimension];
        for (idx, val) in fixed {
            if *idx >= self.dimension || is_fixed[*idx].is_some() {
                return Err(GeometryError::DimensionMismatch {
                    expected: self.dimension,
                    found: *idx,
                });
            }
            is_fixed[*idx] = Some(val.clone());
        }
        let rows = self
            .inequalities
            .iter()
            .map(|f| {
                let mut constant = f.constant.clone();
                let mut coeffs = Vec::with_capacity(self.dimension - fixed.len());
                for (c, fv) in f.coefficients.iter().zip(&is_fixed) {
                    match fv {
                        Some(v) => constant += c * v,
                        None => coeffs.push(c.clone()),
                    }
                }
                AffineForm::geq(coeffs, constant)
            })
            .collect();
        Self::new(self.dimension - fixed.len(), rows)
    }

    /// The polytope `{y : M y in self}` for an invertible square `M`.
    pub fn substitute(&self, m: &[Vec<Rational>]) -> Result<Self, GeometryError> {
        let n = self.dimension;
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: m.len(),
            });
        }
        if linalg::rank(m) != n {
            return Err(GeometryError::SingularTransform);
        }
        let rows = self
            .inequalities
            .iter()
            .map(|f| {
                let coeffs = (0..n)
                    .map(|j| (0..n).map(|i| &f.coefficients[i] * &m[i][j]).sum())
                    .collect();
                AffineForm::geq(coeffs, f.constant.clone())
            })
            .collect();
        Self::new(n, rows)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.dimension != other.dimension {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        let rows = self
            .inequalities
            .iter()
            .chain(&other.inequalities)
            .cloned()
            .collect();
        Self::new(self.dimension, rows)
    }

    /// A point satisfying every inequality strictly, if one exists.
    ///
    /// Decided by Fourier–Motzkin on the homogenized system
    /// `a.x + b t >= 1, t >= 1`, independently of the vertex list.
    pub fn interior_point(&self) -> Option<Vec<Rational>> {
        let n = self.dimension;
        let mut gens: Vec<Vec<BigInt>> = self.inequalities.iter().map(AffineForm::integer_row).collect();
        let mut t = vec![BigInt::zero(); n + 1];
        t[n] = BigInt::one();
        gens.push(t);
        match gordan(&gens) {
            Alternative::Functional(w) => {
                let t = w[n].clone();
                Some(w[..n].iter().map(|x| x / &t).collect())
            }
            Alternative::Combination(_) => None,
        }
    }
}

impl VPolytope {
    /// Facet inequalities of the convex hull, for a full-dimensional point set.
    ///
    /// Returns `None` if the points do not affinely span their ambient space.
    pub fn facets(&self) -> Option<Vec<AffineForm>> {
        let n = self.vertices.first()?.len();
        if linalg::affine_rank(&self.vertices) != Some(n) {
            return None;
        }
        // Extreme rays of {(a, b) : <a, v> + b >= 0 for all vertices v}.
        let rows: Vec<Vec<BigInt>> = self
            .vertices
            .iter()
            .map(|v| {
                let mut r = v.clone();
                r.push(Rational::one());
                linalg::primitive_integer(&r)
            })
            .collect();
        let rays = vertices::extreme_rays(&rows, n + 1);
        let mut out: Vec<AffineForm> = rays
            .iter()
            .map(|r| {
                let rr = linalg::to_rational(r);
                AffineForm::geq(rr[..n].to_vec(), rr[n].clone()).normalized()
            })
            .collect();
        out.sort_by(|a, b| a.coefficients.cmp(&b.coefficients).then(a.constant.cmp(&b.constant)));
        Some(out)
    }
}

pub fn enumerate_vertices(p: &HPolytope) -> VPolytope {
    VPolytope {
        vertices: p.vertices.clone(),
    }
}

pub fn exact_volume(p: &HPolytope) -> Rational {
    p.volume()
}

pub fn slice(p: &HPolytope, fixed: &[(usize, Rational)]) -> Result<HPolytope, GeometryError> {
    p.slice(fixed)
}

/// True iff the intersection of the two closed polytopes has volume zero.
pub fn interiors_disjoint(p1: &HPolytope, p2: &HPolytope) -> Result<bool, GeometryError> {
    Ok(p1.intersection(p2)?.volume().is_zero())
}
