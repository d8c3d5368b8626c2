//! Exact volumes by pulling triangulation.
//!
//! Each face is coned from its lowest-indexed vertex over the facets that
//! avoid that vertex, recursively. Facets of a face are read off the
//! vertex/inequality incidence: they are the inclusion-maximal proper
//! nonempty intersections of the face with a tight set.

use std::collections::HashMap;
use std::rc::Rc;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use super::linalg;
use super::{AffineForm, Rational};

type Simplices = Rc<Vec<Vec<usize>>>;

struct Triangulator {
    incidence: Vec<FixedBitSet>,
    memo: HashMap<FixedBitSet, Simplices>,
}

impl Triangulator {
    fn new(rows: &[AffineForm], vertices: &[Vec<Rational>]) -> Self {
        let incidence = rows
            .iter()
            .map(|r| {
                let mut set = FixedBitSet::with_capacity(vertices.len());
                for (k, v) in vertices.iter().enumerate() {
                    if r.evaluate(v).is_zero() {
                        set.insert(k);
                    }
                }
                set
            })
            .collect();
        Self {
            incidence,
            memo: HashMap::new(),
        }
    }

    fn facets(&self, face: &FixedBitSet) -> Vec<FixedBitSet> {
        let face_size = face.count_ones(..);
        let mut cands: Vec<FixedBitSet> = Vec::new();
        for inc in &self.incidence {
            let mut s = face.clone();
            s.intersect_with(inc);
            let n = s.count_ones(..);
            if n == 0 || n == face_size || cands.contains(&s) {
                continue;
            }
            cands.push(s);
        }
        cands
            .iter()
            .filter(|s| !cands.iter().any(|t| t != *s && s.is_subset(t)))
            .cloned()
            .collect()
    }

    fn triangulate(&mut self, face: &FixedBitSet, dim: usize) -> Simplices {
        if let Some(s) = self.memo.get(face) {
            return Rc::clone(s);
        }
        let apex = face.ones().next().expect("faces are nonempty");
        let out = if dim == 0 {
            vec![vec![apex]]
        } else {
            let mut out = Vec::new();
            for facet in self.facets(face) {
                if facet.contains(apex) {
                    continue;
                }
                for simplex in self.triangulate(&facet, dim - 1).iter() {
                    let mut s = simplex.clone();
                    s.push(apex);
                    out.push(s);
                }
            }
            out
        };
        let out = Rc::new(out);
        self.memo.insert(face.clone(), Rc::clone(&out));
        out
    }
}

/// Maximal simplices (as vertex index lists) of a triangulation of the
/// full-dimensional polytope with the given rows and vertex list.
pub(crate) fn triangulation(
    dim: usize,
    rows: &[AffineForm],
    vertices: &[Vec<Rational>],
) -> Vec<Vec<usize>> {
    let mut t = Triangulator::new(rows, vertices);
    let mut all = FixedBitSet::with_capacity(vertices.len());
    all.insert_range(..);
    let s = t.triangulate(&all, dim);
    s.as_ref().clone()
}

/// Exact volume of a polytope given by normalized rows and its vertices.
pub(crate) fn volume(dim: usize, rows: &[AffineForm], vertices: &[Vec<Rational>]) -> Rational {
    if dim == 0 {
        return if vertices.is_empty() {
            Rational::zero()
        } else {
            Rational::from_integer(1.into())
        };
    }
    if vertices.len() <= dim || linalg::affine_rank(vertices) != Some(dim) {
        return Rational::zero();
    }
    triangulation(dim, rows, vertices)
        .into_iter()
        .map(|s| simplex_volume(&s, vertices))
        .sum()
}

pub(crate) fn simplex_volume(simplex: &[usize], vertices: &[Vec<Rational>]) -> Rational {
    let (&base, rest) = simplex.split_last().expect("nonempty simplex");
    let b = &vertices[base];
    let m: Vec<Vec<Rational>> = rest
        .iter()
        .map(|&k| vertices[k].iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    linalg::abs_det_over_factorial(m)
}
