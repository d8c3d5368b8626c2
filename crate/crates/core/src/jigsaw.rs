//! Picard lattice data, the Clemens complex of the boundary, and the face
//! polytopes whose volumes add up to the alpha constant.
//!
//! Ambient coordinates for the face polytopes are
//! `(a0, a_{0,1}, a_{0,2}, ..., a_{q,1}, a_{q,2})`, dimension `2q + 3`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    cone_contains_line, interiors_disjoint, serde_rational, AffineForm, ConeCertificate, GeometryError,
    HPolytope, Rational, RationalCone,
};

/// Default cap on the unit rank; 4^(q+1) faces in dimension 2q+3.
pub const DEFAULT_MAX_RANK: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JigsawError {
    #[error("index {0} out of range")]
    IndexOutOfRange(i64),
    #[error("unit rank must be nonnegative, got {0}")]
    NegativeRank(i64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("partition identity failed: {0}")]
    PartitionFailure(String),
    #[error("unknown Clemens edge label {0:?}")]
    UnknownEdge(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The unit rank `q = r1 + r2 - 1` of the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct UnitRank(u32);

impl UnitRank {
    pub const fn new(q: u32) -> Self {
        Self(q)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn places(self) -> usize {
        self.0 as usize + 1
    }

    /// Ambient dimension `2q + 3` of the face polytopes.
    pub fn ambient_dimension(self) -> usize {
        2 * self.0 as usize + 3
    }
}

impl TryFrom<i64> for UnitRank {
    type Error = JigsawError;

    fn try_from(q: i64) -> Result<Self, Self::Error> {
        u32::try_from(q).map(Self).map_err(|_| JigsawError::NegativeRank(q))
    }
}

impl fmt::Display for UnitRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

// ---- Picard lattice -----------------------------------------------------------

/// Columns are the classes `[A3], ..., [A8]` written in the basis `l0, ..., l5`.
const A_TO_L: [[i64; 6]; 6] = [
    // A3     A4  A5  A6  A7  A8
    [0, 0, 0, 1, 1, 1],
    [1, 0, 0, -1, -1, 0],
    [-1, 1, 0, 0, -1, 0],
    [0, -1, 1, 0, -1, 0],
    [0, 0, 0, -1, 0, -1],
    [0, 0, 0, -1, 0, 0],
];

/// Inverse of [`A_TO_L`]; the matrix is unimodular.
const L_TO_A: [[i64; 6]; 6] = invert_unimodular(A_TO_L);

/// Degrees of the Cox generators `a1, ..., a9` in the basis `l0, ..., l5`.
const DEGREES_L: [[i64; 6]; 9] = [
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [0, 1, -1, 0, 0, 0],
    [0, 0, 1, -1, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [1, -1, 0, 0, -1, -1],
    [1, -1, -1, -1, 0, 0],
    [1, 0, 0, 0, -1, 0],
    [1, 0, 0, 0, 0, -1],
];

const fn invert_unimodular(m: [[i64; 6]; 6]) -> [[i64; 6]; 6] {
    // Gauss–Jordan over Z; every pivot encountered is a unit.
    let mut a = m;
    let mut inv = [[0i64; 6]; 6];
    let mut i = 0;
    while i < 6 {
        inv[i][i] = 1;
        i += 1;
    }
    let mut col = 0;
    while col < 6 {
        let mut p = col;
        while a[p][col] != 1 && a[p][col] != -1 {
            p += 1;
        }
        let (ra, ri) = (a[p], inv[p]);
        a[p] = a[col];
        inv[p] = inv[col];
        a[col] = ra;
        inv[col] = ri;
        if a[col][col] == -1 {
            let mut j = 0;
            while j < 6 {
                a[col][j] = -a[col][j];
                inv[col][j] = -inv[col][j];
                j += 1;
            }
        }
        let mut r = 0;
        while r < 6 {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                let mut j = 0;
                while j < 6 {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                    j += 1;
                }
            }
            r += 1;
        }
        col += 1;
    }
    inv
}

fn apply(m: &[[i64; 6]; 6], v: &[i64; 6]) -> [i64; 6] {
    std::array::from_fn(|i| (0..6).map(|j| m[i][j] * v[j]).sum())
}

/// A divisor class on the minimal desingularization, held in both bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorClass {
    /// Coordinates in `l0, ..., l5`.
    pub coords_l: [i64; 6],
    /// Coordinates in `[A3], ..., [A8]`.
    pub coords_a: [i64; 6],
}

impl DivisorClass {
    pub fn from_l(coords_l: [i64; 6]) -> Self {
        Self {
            coords_l,
            coords_a: apply(&L_TO_A, &coords_l),
        }
    }

    pub fn from_a(coords_a: [i64; 6]) -> Self {
        Self {
            coords_l: apply(&A_TO_L, &coords_a),
            coords_a,
        }
    }
}

impl std::ops::Add for DivisorClass {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_l(std::array::from_fn(|i| self.coords_l[i] + rhs.coords_l[i]))
    }
}

impl std::ops::Mul<DivisorClass> for i64 {
    type Output = DivisorClass;

    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        DivisorClass::from_l(rhs.coords_l.map(|x| self * x))
    }
}

/// Degree of the Cox generator `a_i`, `1 <= i <= 9`.
pub fn generator_degree(i: i64) -> Result<DivisorClass, JigsawError> {
    if !(1..=9).contains(&i) {
        return Err(JigsawError::IndexOutOfRange(i));
    }
    Ok(DivisorClass::from_l(DEGREES_L[i as usize - 1]))
}

// ---- Clemens complex --------------------------------------------------------------

/// A maximal face of the Clemens complex: an edge of the path `A7 - A5 - A4 - A3 - A6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClemensEdge {
    E57,
    E45,
    E34,
    E36,
}

impl ClemensEdge {
    /// Edges in path order.
    pub const ALL: [ClemensEdge; 4] = [Self::E57, Self::E45, Self::E34, Self::E36];

    pub fn label(self) -> &'static str {
        match self {
            Self::E57 => "57",
            Self::E45 => "45",
            Self::E34 => "34",
            Self::E36 => "36",
        }
    }

    /// The two boundary components meeting along this edge.
    pub fn components(self) -> (u8, u8) {
        match self {
            Self::E57 => (5, 7),
            Self::E45 => (4, 5),
            Self::E34 => (3, 4),
            Self::E36 => (3, 6),
        }
    }

    /// Classes of the two components in the local basis `(e1, e2)`.
    ///
    /// These are also the inequality rows `<g, (a1, a2)> >= 0` of the face.
    /// Neighbouring edges share one row with opposite sign; see [`Self::shared_row`].
    pub fn rows(self) -> [[i64; 2]; 2] {
        match self {
            Self::E57 => [[-1, 0], [3, 1]],
            Self::E45 => [[-3, -1], [2, 1]],
            Self::E34 => [[-2, -1], [1, 1]],
            Self::E36 => [[0, 1], [-1, -1]],
        }
    }

    /// For neighbouring edges, the indices `(i, j)` with `self.rows()[i] = -other.rows()[j]`.
    pub fn shared_row(self, other: Self) -> Option<(usize, usize)> {
        let (r, s) = (self.rows(), other.rows());
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .find(|&(i, j)| r[i] == s[j].map(|x| -x))
    }

    /// The next edge along the path, if any.
    pub fn successor(self) -> Option<Self> {
        match self {
            Self::E57 => Some(Self::E45),
            Self::E45 => Some(Self::E34),
            Self::E34 => Some(Self::E36),
            Self::E36 => None,
        }
    }
}

impl fmt::Display for ClemensEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClemensEdge {
    type Err = JigsawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        Self::ALL
            .into_iter()
            .find(|e| e.label() == t)
            .ok_or_else(|| JigsawError::UnknownEdge(s.to_string()))
    }
}

/// One Clemens edge per archimedean place.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceTuple(Vec<ClemensEdge>);

impl FaceTuple {
    pub fn new(edges: Vec<ClemensEdge>) -> Result<Self, JigsawError> {
        if edges.is_empty() {
            return Err(JigsawError::OutOfRange("a face tuple needs at least one place".into()));
        }
        Ok(Self(edges))
    }

    pub fn uniform(edge: ClemensEdge, q: UnitRank) -> Self {
        Self(vec![edge; q.places()])
    }

    pub fn edges(&self) -> &[ClemensEdge] {
        &self.0
    }

    pub fn rank(&self) -> UnitRank {
        UnitRank(self.0.len() as u32 - 1)
    }

    /// All `4^(q+1)` tuples, place 0 varying slowest.
    pub fn all(q: UnitRank) -> Vec<Self> {
        let places = q.places();
        (0..4usize.pow(places as u32))
            .map(|mut k| {
                let mut e = vec![ClemensEdge::E57; places];
                for slot in e.iter_mut().rev() {
                    *slot = ClemensEdge::ALL[k % 4];
                    k /= 4;
                }
                Self(e)
            })
            .collect()
    }

    pub fn permuted(&self, sigma: &[usize]) -> Self {
        Self(sigma.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for FaceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.0.iter().map(|e| e.label()).collect();
        f.write_str(&labels.join(","))
    }
}

impl FromStr for FaceTuple {
    type Err = JigsawError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let edges = s
            .split(',')
            .filter(|t| !t.trim().trim_matches(|c| c == '(' || c == ')').is_empty())
            .map(ClemensEdge::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(edges)
    }
}

impl Serialize for FaceTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// ---- polytopes --------------------------------------------------------------------

fn place_row(q: UnitRank, n: usize, local: [i64; 2]) -> Vec<i64> {
    let mut row = vec![0; q.ambient_dimension()];
    row[1 + 2 * n] = local[0];
    row[2 + 2 * n] = local[1];
    row
}

/// The two inequality rows of edge `e` at place `n`.
pub fn face_inequalities(n: usize, e: ClemensEdge, q: UnitRank) -> Result<Vec<AffineForm>, JigsawError> {
    if n >= q.places() {
        return Err(JigsawError::IndexOutOfRange(n as i64));
    }
    Ok(e.rows().iter().map(|r| AffineForm::geq_int(&place_row(q, n, *r), 0)).collect())
}

/// Rows independent of the face: `a0 + sum a_{n,1} >= 0`, `-a0 + sum a_{n,2} >= 0`,
/// `sum a_{n,2} <= 1`.
fn common_rows(q: UnitRank) -> Vec<AffineForm> {
    let dim = q.ambient_dimension();
    let mut first = vec![0; dim];
    let mut second = vec![0; dim];
    let mut anticanonical = vec![0; dim];
    first[0] = 1;
    second[0] = -1;
    for n in 0..q.places() {
        first[1 + 2 * n] = 1;
        second[2 + 2 * n] = 1;
        anticanonical[2 + 2 * n] = -1;
    }
    vec![
        AffineForm::geq_int(&first, 0),
        AffineForm::geq_int(&second, 0),
        AffineForm::geq_int(&anticanonical, 1),
    ]
}

fn face_rows(f: &FaceTuple) -> Vec<AffineForm> {
    let q = f.rank();
    let mut rows = common_rows(q);
    for (n, e) in f.edges().iter().enumerate() {
        rows.extend(face_inequalities(n, *e, q).expect("place index within the tuple"));
    }
    rows
}

/// The polytope `P_B` of the face tuple.
pub fn face_polytope(f: &FaceTuple) -> HPolytope {
    HPolytope::new(f.rank().ambient_dimension(), face_rows(f)).expect("face polytopes are bounded")
}

/// The union polytope `P`: common rows plus `a_{n,1} <= 0`, `a_{n,2} >= 0`.
pub fn union_polytope(q: UnitRank) -> HPolytope {
    let mut rows = common_rows(q);
    for n in 0..q.places() {
        rows.push(AffineForm::geq_int(&place_row(q, n, [-1, 0]), 0));
        rows.push(AffineForm::geq_int(&place_row(q, n, [0, 1]), 0));
    }
    HPolytope::new(q.ambient_dimension(), rows).expect("P is bounded")
}

/// Merges two neighbouring edges at place `n`: the face rows of `f` with the
/// shared (sign-reversed) row deleted. Requires `f[n]` to have a successor.
pub fn merged_polytope(f: &FaceTuple, n: usize) -> Result<HPolytope, JigsawError> {
    let q = f.rank();
    let e = *f.edges().get(n).ok_or(JigsawError::IndexOutOfRange(n as i64))?;
    let next = e.successor().ok_or_else(|| JigsawError::OutOfRange(format!("edge ({e}) is last on the path")))?;
    let (i, j) = e.shared_row(next).expect("neighbouring edges share a row");
    let mut rows = common_rows(q);
    for (m, edge) in f.edges().iter().enumerate() {
        if m == n {
            rows.push(AffineForm::geq_int(&place_row(q, n, e.rows()[1 - i]), 0));
            rows.push(AffineForm::geq_int(&place_row(q, n, next.rows()[1 - j]), 0));
        } else {
            rows.extend(face_inequalities(m, *edge, q)?);
        }
    }
    Ok(HPolytope::new(q.ambient_dimension(), rows)?)
}

/// `P'` in coordinates `(a0, a1, a2, a_{1,1}, a_{1,2}, ..., a_{q,1}, a_{q,2})`.
pub fn pyramid(q: UnitRank) -> HPolytope {
    let k = q.get() as usize;
    let dim = 3 + 2 * k;
    let unit = |i: usize, s: i64| {
        let mut r = vec![0; dim];
        r[i] = s;
        r
    };
    let mut rows: Vec<(Vec<i64>, i64)> = vec![
        (unit(1, 1), 0),              // a1 >= 0
        ([vec![1, -1, 0], vec![0; 2 * k]].concat(), 0), // a0 >= a1
        ([vec![-1, 0, 1], vec![0; 2 * k]].concat(), 0), // a2 >= a0
        (unit(2, 1), 0),              // a2 >= 0
        (unit(2, -1), 1),             // a2 <= 1
    ];
    let mut s1 = unit(1, 1);
    let mut s2 = unit(2, 1);
    for n in 0..k {
        s1[3 + 2 * n] = -1;
        s2[4 + 2 * n] = -1;
        rows.push((unit(3 + 2 * n, 1), 0));
        rows.push((unit(4 + 2 * n, 1), 0));
    }
    rows.push((s1, 0));
    rows.push((s2, 0));
    HPolytope::from_integer_rows(dim, &rows).expect("P' is bounded")
}

/// The pyramid base `P'_0` in coordinates `(a0, a1, a_{1,1}, a_{1,2}, ...)`.
pub fn pyramid_base(q: UnitRank) -> HPolytope {
    let k = q.get() as usize;
    let dim = 2 + 2 * k;
    let unit = |i: usize, s: i64| {
        let mut r = vec![0; dim];
        r[i] = s;
        r
    };
    let mut rows: Vec<(Vec<i64>, i64)> = vec![
        (unit(1, 1), 0),
        ([vec![1, -1], vec![0; 2 * k]].concat(), 0),
        (unit(0, -1), 1),
    ];
    let mut s1 = unit(1, 1);
    let mut s2 = vec![0; dim];
    for n in 0..k {
        s1[2 + 2 * n] = -1;
        s2[3 + 2 * n] = -1;
        rows.push((unit(2 + 2 * n, 1), 0));
        rows.push((unit(3 + 2 * n, 1), 0));
    }
    rows.push((s1, 0));
    rows.push((s2, 1));
    HPolytope::from_integer_rows(dim, &rows).expect("P'_0 is bounded")
}

/// `1 / (q! (q+2)!)`.
pub fn alpha_closed_form(q: UnitRank) -> Rational {
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
    Rational::new(BigInt::one(), fact(q.get()) * fact(q.get() + 2))
}

/// Generators of the effective cone for the face tuple, in the coordinates
/// dual to those of [`face_polytope`].
pub fn effective_generators(f: &FaceTuple) -> RationalCone {
    let q = f.rank();
    let dim = q.ambient_dimension();
    let mut a1 = vec![0; dim];
    let mut a2 = vec![0; dim];
    a1[0] = 1;
    a2[0] = -1;
    for n in 0..q.places() {
        a1[1 + 2 * n] = 1;
        a2[2 + 2 * n] = 1;
    }
    let mut gens = vec![a1, a2];
    for (n, e) in f.edges().iter().enumerate() {
        gens.extend(e.rows().iter().map(|r| place_row(q, n, *r)));
    }
    RationalCone::from_integers(&gens).expect("generators are nonzero")
}

// ---- reports ------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct JigsawReport {
    pub q: UnitRank,
    #[serde(serialize_with = "serialize_volume_map")]
    pub per_face: BTreeMap<FaceTuple, Rational>,
    #[serde(with = "serde_rational")]
    pub union_volume: Rational,
    #[serde(with = "serde_rational")]
    pub alpha_sum: Rational,
    #[serde(with = "serde_rational")]
    pub alpha_closed: Rational,
    pub degenerate_faces: Vec<FaceTuple>,
    pub disjointness_verified: bool,
}

fn serialize_volume_map<S: serde::Serializer>(m: &BTreeMap<FaceTuple, Rational>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), &serde_rational::to_string(v))?;
    }
    map.end()
}

impl JigsawReport {
    /// `(2q+3) * vol(P_B)` for one face.
    pub fn alpha_of(&self, f: &FaceTuple) -> Option<Rational> {
        let b = Rational::from_integer(BigInt::from(self.q.ambient_dimension()));
        self.per_face.get(f).map(|v| v * b)
    }
}

/// Computes every face volume and checks the partition identities exactly.
///
/// Fails with `PartitionFailure` if the volumes do not add up to `vol(P)`, if
/// two faces overlap in their interiors, or if the alpha sum differs from the
/// closed form.
pub fn jigsaw_check(q: UnitRank) -> Result<JigsawReport, JigsawError> {
    let faces = FaceTuple::all(q);
    let polytopes: Vec<HPolytope> = faces.par_iter().map(face_polytope).collect();
    let volumes: Vec<Rational> = polytopes.par_iter().map(HPolytope::volume).collect();

    let union_volume = union_polytope(q).volume();
    let total: Rational = volumes.iter().sum();
    let b = Rational::from_integer(BigInt::from(q.ambient_dimension()));
    let alpha_sum = &total * &b;
    let alpha_closed = alpha_closed_form(q);

    // Pairs of faces that are both full-dimensional; a volume-zero face
    // cannot overlap anything in its interior.
    let solid: Vec<usize> = (0..faces.len()).filter(|&i| !volumes[i].is_zero()).collect();
    let pairs: Vec<(usize, usize)> = solid
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| solid[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let overlap = pairs
        .par_iter()
        .find_any(|&&(i, j)| !interiors_disjoint(&polytopes[i], &polytopes[j]).unwrap_or(false))
        .copied();

    if total != union_volume {
        return Err(JigsawError::PartitionFailure(format!(
            "face volumes sum to {total}, union polytope has volume {union_volume}"
        )));
    }
    if let Some((i, j)) = overlap {
        return Err(JigsawError::PartitionFailure(format!(
            "faces ({}) and ({}) overlap",
            faces[i], faces[j]
        )));
    }
    if alpha_sum != alpha_closed {
        return Err(JigsawError::PartitionFailure(format!(
            "alpha sum {alpha_sum} differs from closed form {alpha_closed}"
        )));
    }

    let degenerate_faces = faces
        .iter()
        .zip(&volumes)
        .filter(|(_, v)| v.is_zero())
        .map(|(f, _)| f.clone())
        .collect();
    Ok(JigsawReport {
        q,
        per_face: faces.into_iter().zip(volumes).collect(),
        union_volume,
        alpha_sum,
        alpha_closed,
        degenerate_faces,
        disjointness_verified: true,
    })
}

/// A volume-zero face with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct DegenerateFace {
    pub face: FaceTuple,
    /// Whether the strict inequality system has a solution (independent of the volume).
    pub strictly_feasible: bool,
    pub cone: ConeCertificate,
}

/// All faces of volume zero, each with the pointedness test of its generator cone.
pub fn degenerate_faces(q: UnitRank) -> Vec<DegenerateFace> {
    FaceTuple::all(q)
        .into_par_iter()
        .filter_map(|face| {
            let p = face_polytope(&face);
            if !p.volume().is_zero() {
                return None;
            }
            let cone = cone_contains_line(&effective_generators(&face));
            Some(DegenerateFace {
                strictly_feasible: p.interior_point().is_some(),
                face,
                cone,
            })
        })
        .collect()
}

/// Comparison of the volume-zero faces with an independent full-dimensionality
/// test, together with the status of a named reference face.
#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyComparison {
    pub q: UnitRank,
    pub zero_volume: Vec<FaceTuple>,
    /// Faces whose strict system is infeasible (Fourier–Motzkin).
    pub no_interior_point: Vec<FaceTuple>,
    pub agree: bool,
    pub reference_face: FaceTuple,
    #[serde(with = "serde_rational")]
    pub reference_volume: Rational,
    pub reference_interior_point: Option<Vec<String>>,
    pub reference_cone: ConeCertificate,
    /// Whether the reference face is among the volume-zero faces.
    pub reference_is_degenerate: bool,
    pub line_cones: Vec<FaceTuple>,
}

/// Runs both degeneracy tests over all faces and reports on `reference`.
pub fn compare_degeneracy(q: UnitRank, reference: &FaceTuple) -> Result<DegeneracyComparison, JigsawError> {
    if reference.rank() != q {
        return Err(JigsawError::OutOfRange(format!("reference face ({reference}) has the wrong length")));
    }
    let rows: Vec<(FaceTuple, bool, bool, bool)> = FaceTuple::all(q)
        .into_par_iter()
        .map(|f| {
            let p = face_polytope(&f);
            let zero = p.volume().is_zero();
            let interior = p.interior_point().is_some();
            let line = cone_contains_line(&effective_generators(&f)).contains_line();
            (f, zero, interior, line)
        })
        .collect();
    let zero_volume: Vec<FaceTuple> = rows.iter().filter(|r| r.1).map(|r| r.0.clone()).collect();
    let no_interior_point: Vec<FaceTuple> = rows.iter().filter(|r| !r.2).map(|r| r.0.clone()).collect();
    let line_cones = rows.iter().filter(|r| r.3).map(|r| r.0.clone()).collect();
    let p = face_polytope(reference);
    let reference_volume = p.volume();
    Ok(DegeneracyComparison {
        q,
        agree: zero_volume == no_interior_point,
        reference_is_degenerate: zero_volume.contains(reference),
        zero_volume,
        no_interior_point,
        reference_face: reference.clone(),
        reference_volume,
        reference_interior_point: p
            .interior_point()
            .map(|x| x.iter().map(serde_rational::to_string).collect()),
        reference_cone: cone_contains_line(&effective_generators(reference)),
        line_cones,
    })
}

// ---- cross sections ----------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SlicePiece {
    pub face: FaceTuple,
    #[serde(with = "serde_rational")]
    pub area: Rational,
    #[serde(serialize_with = "serialize_points")]
    pub vertices: Vec<Vec<Rational>>,
}

fn serialize_points<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for p in v {
        let strs: Vec<String> = p.iter().map(serde_rational::to_string).collect();
        seq.serialize_element(&strs)?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceCensus {
    #[serde(with = "serde_rational")]
    pub a0: Rational,
    #[serde(with = "serde_rational")]
    pub a1: Rational,
    /// Pieces of positive area, in face order.
    pub pieces: Vec<SlicePiece>,
    pub positive_count: usize,
    #[serde(with = "serde_rational")]
    pub total_area: Rational,
    /// Pieces lie in `[0, a1] x [0, 1]` and their areas add up to `a1`.
    pub fills_rectangle: bool,
}

/// Substitution `x = M y` taking `y = (a0, a1, a2, b_{1,1}, b_{1,2})` to the
/// face coordinates at unit rank one. The `b` are the sign-flipped second-place
/// coordinates; `a1, a2` are the place sums.
fn census_transform() -> Vec<Vec<Rational>> {
    let m: [[i64; 5]; 5] = [
        [1, 0, 0, 0, 0],
        [0, -1, 0, 1, 0],
        [0, 0, 1, 0, -1],
        [0, 0, 0, -1, 0],
        [0, 0, 0, 0, 1],
    ];
    m.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

/// Cross sections of the rank-one face polytopes at `(a0, a1)` with `a2 = 1`.
pub fn slice_census(a1: &Rational, a0: &Rational) -> Result<SliceCensus, JigsawError> {
    let zero = Rational::zero();
    let one = Rational::one();
    if !(zero < *a1 && a1 <= a0 && *a0 <= one) {
        return Err(JigsawError::OutOfRange(format!("need 0 < a1 <= a0 <= 1, got a1={a1}, a0={a0}")));
    }
    let q = UnitRank(1);
    let m = census_transform();
    let fixed = [(0, a0.clone()), (1, a1.clone()), (2, one.clone())];
    let mut pieces = Vec::new();
    for face in FaceTuple::all(q) {
        let section = face_polytope(&face).substitute(&m)?.slice(&fixed)?;
        let area = section.volume();
        if !area.is_zero() {
            pieces.push(SlicePiece {
                face,
                area,
                vertices: section.vertices().to_vec(),
            });
        }
    }
    let total_area: Rational = pieces.iter().map(|p| &p.area).sum();
    let inside = pieces.iter().flat_map(|p| &p.vertices).all(|v| {
        zero <= v[0] && v[0] <= *a1 && zero <= v[1] && v[1] <= one
    });
    Ok(SliceCensus {
        a0: a0.clone(),
        a1: a1.clone(),
        positive_count: pieces.len(),
        fills_rectangle: inside && total_area == *a1,
        total_area,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_matrix_is_exact() {
        for i in 0..6 {
            let mut e = [0; 6];
            e[i] = 1;
            assert_eq!(apply(&A_TO_L, &apply(&L_TO_A, &e)), e);
            assert_eq!(apply(&L_TO_A, &apply(&A_TO_L, &e)), e);
        }
    }

    #[test]
    fn a_basis_generators_are_unit_vectors() {
        for i in 3..=8 {
            let mut e = [0; 6];
            e[i as usize - 3] = 1;
            assert_eq!(generator_degree(i).unwrap().coords_a, e);
        }
    }

    #[test]
    fn face_enumeration_order() {
        let all = FaceTuple::all(UnitRank(1));
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "57,57");
        assert_eq!(all[1].to_string(), "57,45");
        assert_eq!(all[15].to_string(), "36,36");
    }

    #[test]
    fn neighbouring_edges_share_a_reversed_row() {
        for e in ClemensEdge::ALL {
            if let Some(n) = e.successor() {
                assert!(e.shared_row(n).is_some(), "({e}) and ({n})");
            }
        }
        assert!(ClemensEdge::E57.shared_row(ClemensEdge::E34).is_none());
    }
}
