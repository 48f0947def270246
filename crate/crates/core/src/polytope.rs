//! Convex polytopes with exact rational vertices.
//!
//! [`RatPolytope`] is the general full-dimensional convex polytope over the
//! rationals; [`LatticePolytope`] restricts vertices to the integer lattice
//! and adds the lattice-specific operations (reflexivity, duals, lattice
//! point enumeration, lattice-normalized facet charts).
//!
//! Facet inequalities are written `<u, normal> >= rhs` with a primitive
//! integer normal, so the boundary measure induced by a facet chart is the
//! affine lattice measure (the facet lattice has covolume 1 in chart
//! coordinates).
//!
//! Hulls are computed by exhaustive supporting-hyperplane enumeration with
//! exact rational predicates, which is robust at the input sizes this crate
//! targets (n <= 4, a few dozen points). Dimensions above 6 are rejected.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{primitive_direction, IntMat, RatMat, RatVec};
use crate::rational::Rational;

pub const MAX_DIM: usize = 6;

/// One facet inequality `<u, normal> >= rhs` with `normal` primitive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FacetIneq {
    pub normal: Vec<BigInt>,
    pub rhs: Rational,
}

impl FacetIneq {
    pub fn new(normal: Vec<BigInt>, rhs: Rational) -> Self {
        FacetIneq { normal, rhs }
    }

    /// Build from a rational normal by scaling to a primitive integer one.
    pub fn from_rational(normal: &[Rational], rhs: &Rational) -> Self {
        let prim = primitive_direction(normal);
        // the scale factor from `normal` to `prim` is prim[i]/normal[i] at
        // any nonzero coordinate; rhs scales the same way
        let i = normal
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero normal");
        let factor = Rational::from(&prim[i]) / &normal[i];
        debug_assert!(factor.is_positive());
        FacetIneq {
            normal: prim,
            rhs: rhs * &factor,
        }
    }

    pub fn eval(&self, u: &RatVec) -> Rational {
        u.dot_int(&self.normal)
    }

    pub fn satisfied_by(&self, u: &RatVec) -> bool {
        self.eval(u) >= self.rhs
    }

    pub fn active_at(&self, u: &RatVec) -> bool {
        self.eval(u) == self.rhs
    }
}

/// Full-dimensional bounded convex polytope with rational vertices.
/// Vertices are extreme points in lexicographic order; facets are canonical
/// (primitive normals, sorted), computed eagerly at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPolytope {
    dim: usize,
    vertices: Vec<RatVec>,
    facets: Vec<FacetIneq>,
}

impl RatPolytope {
    /// Convex hull of `points`. Non-extreme points are dropped. Errors:
    /// `DegenerateInput` when empty or not full-dimensional,
    /// `UnsupportedDimension` when `dim` is 0 or exceeds [`MAX_DIM`],
    /// `Shape` on mixed coordinate lengths.
    pub fn hull(dim: usize, points: &[RatVec]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points.is_empty() {
            return Err(Error::DegenerateInput("no points".into()));
        }
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::Shape("point dimension mismatch".into()));
        }
        let mut pts: Vec<RatVec> = points.to_vec();
        pts.sort();
        pts.dedup();
        if affine_rank(&pts) != dim {
            return Err(Error::DegenerateInput(format!(
                "points span affine dimension {} < {}",
                affine_rank(&pts),
                dim
            )));
        }

        // all supporting hyperplanes through `dim` affinely independent points
        let mut facet_set: BTreeSet<FacetIneq> = BTreeSet::new();
        for combo in (0..pts.len()).combinations(dim) {
            let base = &pts[combo[0]];
            let diff_rows: Vec<RatVec> =
                combo[1..].iter().map(|&i| pts[i].sub(base)).collect();
            let m = RatMat::from_vec_rows(diff_rows, dim);
            let kernel = m.kernel();
            if kernel.len() != 1 {
                continue; // affinely dependent subset
            }
            let normal = primitive_direction(kernel[0].as_slice());
            let rhs = base.dot_int(&normal);
            let mut any_above = false;
            let mut any_below = false;
            for p in &pts {
                let v = p.dot_int(&normal);
                if v > rhs {
                    any_above = true;
                } else if v < rhs {
                    any_below = true;
                }
                if any_above && any_below {
                    break;
                }
            }
            if any_above && any_below {
                continue; // not supporting
            }
            if any_below {
                // flip so the polytope is on the >= side
                facet_set.insert(FacetIneq::new(
                    normal.iter().map(|x| -x).collect(),
                    -rhs,
                ));
            } else {
                facet_set.insert(FacetIneq::new(normal, rhs));
            }
        }
        let facets: Vec<FacetIneq> = facet_set.into_iter().collect();

        // a point is a vertex iff its active facet normals span R^dim
        let mut vertices = Vec::new();
        for p in &pts {
            let active: Vec<RatVec> = facets
                .iter()
                .filter(|f| f.active_at(p))
                .map(|f| RatVec::from_bigints(&f.normal))
                .collect();
            if active.len() >= dim
                && RatMat::from_vec_rows(active, dim).rank() == dim
            {
                vertices.push(p.clone());
            }
        }
        debug_assert!(!vertices.is_empty());
        Ok(RatPolytope {
            dim,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RatVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetIneq] {
        &self.facets
    }

    pub fn contains(&self, u: &RatVec) -> bool {
        self.facets.iter().all(|f| f.satisfied_by(u))
    }

    pub fn contains_interior(&self, u: &RatVec) -> bool {
        self.facets.iter().all(|f| f.eval(u) > f.rhs)
    }

    /// Vertices lying on facet `i`, in lexicographic order.
    pub fn facet_vertices(&self, i: usize) -> Vec<RatVec> {
        let f = &self.facets[i];
        self.vertices
            .iter()
            .filter(|v| f.active_at(v))
            .cloned()
            .collect()
    }

    /// Intersection with additional half-spaces. `None` when the result is
    /// empty or not full-dimensional.
    pub fn intersect_halfspaces(&self, extra: &[FacetIneq]) -> Option<RatPolytope> {
        let mut ineqs = self.facets.clone();
        ineqs.extend_from_slice(extra);
        let verts = vertices_from_inequalities(self.dim, &ineqs);
        if verts.is_empty() || affine_rank(&verts) != self.dim {
            return None;
        }
        Some(RatPolytope::hull(self.dim, &verts).expect("full-dimensional vertex set"))
    }

    /// Deterministic triangulation: cone the lexicographically smallest
    /// vertex over recursively triangulated facets not containing it.
    /// Simplices have disjoint interiors, cover the polytope, and use only
    /// polytope vertices.
    pub fn triangulate(&self) -> Vec<Simplex> {
        if self.vertices.len() == self.dim + 1 {
            return vec![Simplex::new(self.vertices.clone())];
        }
        let apex = &self.vertices[0]; // lex-min by construction
        let mut out = Vec::new();
        for (fi, facet) in self.facets.iter().enumerate() {
            if facet.active_at(apex) {
                continue;
            }
            let fverts = self.facet_vertices(fi);
            // project along a coordinate the normal pairs with; injective on
            // the facet's affine hull
            let drop = facet
                .normal
                .iter()
                .position(|x| !x.is_zero())
                .expect("primitive normal");
            let mut back: BTreeMap<RatVec, RatVec> = BTreeMap::new();
            let mut proj = Vec::new();
            for v in &fverts {
                let q = drop_coord(v, drop);
                back.insert(q.clone(), v.clone());
                proj.push(q);
            }
            let fp = RatPolytope::hull(self.dim - 1, &proj)
                .expect("facet projects to a full-dimensional polytope");
            for s in fp.triangulate() {
                let mut verts = vec![apex.clone()];
                for q in s.vertices() {
                    verts.push(back[q].clone());
                }
                out.push(Simplex::new(verts));
            }
        }
        out
    }

    /// Euclidean volume, exact.
    pub fn volume(&self) -> Rational {
        self.triangulate().iter().map(Simplex::volume).sum()
    }

    /// Barycenter (vertex average); always an interior point for
    /// full-dimensional polytopes.
    pub fn vertex_centroid(&self) -> RatVec {
        let n = Rational::from(self.vertices.len() as i64);
        let mut acc = RatVec::zeros(self.dim);
        for v in &self.vertices {
            acc = acc.add(v);
        }
        acc.scale(&n.recip())
    }
}

/// `n`-simplex given by an ordered list of `n+1` affinely independent
/// vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Simplex {
    vertices: Vec<RatVec>,
}

impl Simplex {
    pub fn new(vertices: Vec<RatVec>) -> Self {
        assert!(!vertices.is_empty());
        let dim = vertices[0].dim();
        assert_eq!(vertices.len(), dim + 1, "simplex needs dim+1 vertices");
        Simplex { vertices }
    }

    pub fn vertices(&self) -> &[RatVec] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn volume(&self) -> Rational {
        let n = self.dim();
        let rows: Vec<RatVec> = self.vertices[1..]
            .iter()
            .map(|v| v.sub(&self.vertices[0]))
            .collect();
        let det = RatMat::from_vec_rows(rows, n)
            .det()
            .expect("square difference matrix");
        let mut factorial = Rational::one();
        for k in 2..=n {
            factorial = factorial * Rational::from(k as i64);
        }
        det.abs() / factorial
    }

    pub fn barycenter(&self) -> RatVec {
        let n = Rational::from(self.vertices.len() as i64);
        let mut acc = RatVec::zeros(self.vertices[0].dim());
        for v in &self.vertices {
            acc = acc.add(v);
        }
        acc.scale(&n.recip())
    }
}

/// Outcome of a reflexivity check; `offending_facets` indexes facets whose
/// right-hand side is not -1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReflexivityReport {
    pub reflexive: bool,
    pub origin_interior: bool,
    pub offending_facets: Vec<usize>,
}

/// Affine chart of a facet onto Z^{n-1}: `to_chart` sends the facet's
/// affine lattice bijectively onto the standard lattice, so Euclidean
/// measure in chart coordinates is the lattice boundary measure.
#[derive(Clone, Debug)]
pub struct FacetChart {
    pub facet_index: usize,
    /// A lattice point on the facet's affine hyperplane.
    pub base: Vec<BigInt>,
    /// Saturated lattice basis of the normal's orthogonal complement.
    pub dirs: Vec<Vec<BigInt>>,
}

impl FacetChart {
    /// Coordinates of `u` (a point on the facet hyperplane) in the chart.
    pub fn to_chart(&self, u: &RatVec) -> RatVec {
        let n = self.base.len();
        let k = self.dirs.len();
        if k == 0 {
            return RatVec::zeros(0);
        }
        let mut cols = RatMat::zeros(n, k);
        for (j, d) in self.dirs.iter().enumerate() {
            for (i, entry) in d.iter().enumerate() {
                *cols.at_mut(i, j) = Rational::from(entry);
            }
        }
        let rhs = u.sub(&RatVec::from_bigints(&self.base));
        cols.solve_unique(&rhs)
            .expect("point lies on the facet hyperplane")
    }

    /// Inverse chart: `base + sum x_j dirs_j`.
    pub fn from_chart(&self, x: &RatVec) -> RatVec {
        assert_eq!(x.dim(), self.dirs.len());
        let mut acc = RatVec::from_bigints(&self.base);
        for (j, d) in self.dirs.iter().enumerate() {
            acc = acc.add(&RatVec::from_bigints(d).scale(x.at(j)));
        }
        acc
    }
}

/// Convex polytope with integer vertices, full-dimensional.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatticePolytope {
    inner: RatPolytope,
    ivertices: Vec<Vec<BigInt>>,
    irhs: Vec<BigInt>,
}

impl LatticePolytope {
    /// Hull of integer points; non-extreme points are dropped.
    pub fn from_vertices(points: Vec<Vec<BigInt>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateInput("no points".into()));
        }
        let dim = points[0].len();
        let ratpts: Vec<RatVec> = points
            .iter()
            .map(|p| RatVec::from_bigints(p))
            .collect();
        let inner = RatPolytope::hull(dim, &ratpts)?;
        Self::wrap(inner)
    }

    pub fn from_i64_vertices(points: &[&[i64]]) -> Result<Self> {
        Self::from_vertices(
            points
                .iter()
                .map(|p| p.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    fn wrap(inner: RatPolytope) -> Result<Self> {
        let ivertices: Option<Vec<Vec<BigInt>>> =
            inner.vertices.iter().map(RatVec::to_bigints).collect();
        let Some(ivertices) = ivertices else {
            return Err(Error::InvalidInput(
                "vertices are not integral".into(),
            ));
        };
        // integer vertices and primitive integer normals force integer rhs
        let irhs: Vec<BigInt> = inner
            .facets
            .iter()
            .map(|f| f.rhs.to_integer().expect("integral support value"))
            .collect();
        Ok(LatticePolytope {
            inner,
            ivertices,
            irhs,
        })
    }

    pub fn as_rational(&self) -> &RatPolytope {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn vertices(&self) -> &[Vec<BigInt>] {
        &self.ivertices
    }

    pub fn rat_vertices(&self) -> &[RatVec] {
        &self.inner.vertices
    }

    pub fn facets(&self) -> &[FacetIneq] {
        &self.inner.facets
    }

    pub fn facet_rhs_int(&self, i: usize) -> &BigInt {
        &self.irhs[i]
    }

    pub fn volume(&self) -> Rational {
        self.inner.volume()
    }

    pub fn triangulate(&self) -> Vec<Simplex> {
        self.inner.triangulate()
    }

    pub fn contains(&self, u: &RatVec) -> bool {
        self.inner.contains(u)
    }

    /// Reflexive iff the origin is interior and every facet inequality is
    /// `<u, normal> >= -1` with primitive normal.
    pub fn reflexivity(&self) -> ReflexivityReport {
        let minus_one = Rational::from(-1);
        let origin_interior = self
            .inner
            .facets
            .iter()
            .all(|f| f.rhs.is_negative());
        let offending: Vec<usize> = self
            .inner
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.rhs != minus_one)
            .map(|(i, _)| i)
            .collect();
        ReflexivityReport {
            reflexive: origin_interior && offending.is_empty(),
            origin_interior,
            offending_facets: offending,
        }
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexivity().reflexive
    }

    /// Polar dual of a reflexive polytope: vertices are the facet normals.
    /// An involution on reflexive polytopes.
    pub fn dual(&self) -> Result<LatticePolytope> {
        if !self.is_reflexive() {
            return Err(Error::NotReflexive(
                "dual is only taken for reflexive polytopes".into(),
            ));
        }
        LatticePolytope::from_vertices(
            self.inner.facets.iter().map(|f| f.normal.clone()).collect(),
        )
    }

    /// Lattice points of the `d`-th dilate, in lexicographic order.
    /// `d = 0` yields the single point 0.
    pub fn lattice_points(&self, d: u32) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        if d == 0 {
            return vec![vec![BigInt::zero(); n]];
        }
        let d_big = BigInt::from(d);
        let mut lo = vec![BigInt::zero(); n];
        let mut hi = vec![BigInt::zero(); n];
        for i in 0..n {
            let mut vals = self.ivertices.iter().map(|v| &v[i] * &d_big);
            let first = vals.next().expect("nonempty");
            let (mut mn, mut mx) = (first.clone(), first);
            for v in vals {
                if v < mn {
                    mn = v.clone();
                }
                if v > mx {
                    mx = v;
                }
            }
            lo[i] = mn;
            hi[i] = mx;
        }
        let scaled_rhs: Vec<BigInt> = self.irhs.iter().map(|b| b * &d_big).collect();
        let mut out = Vec::new();
        let mut point = vec![BigInt::zero(); n];
        enumerate_box(&lo, &hi, 0, &mut point, &mut |p| {
            let inside = self
                .inner
                .facets
                .iter()
                .zip(&scaled_rhs)
                .all(|(f, rhs)| {
                    let v: BigInt = f
                        .normal
                        .iter()
                        .zip(p)
                        .map(|(a, x)| a * x)
                        .sum();
                    v >= *rhs
                });
            if inside {
                out.push(p.to_vec());
            }
        });
        out
    }

    /// Lattice-normalized chart of facet `i`; see [`FacetChart`].
    pub fn facet_chart(&self, i: usize) -> FacetChart {
        let normal = &self.inner.facets[i].normal;
        let n = normal.len();
        let col = IntMat::from_rows(normal.iter().map(|x| vec![x.clone()]).collect())
            .expect("column");
        let (h, u) = col.hnf();
        assert!(h.at(0, 0).is_one(), "facet normal is primitive");
        let rhs = &self.irhs[i];
        let base: Vec<BigInt> = u.row(0).iter().map(|x| x * rhs).collect();
        let dirs: Vec<Vec<BigInt>> = (1..n).map(|r| u.row(r).to_vec()).collect();
        debug_assert_eq!(
            base.iter().zip(normal).map(|(b, a)| b * a).sum::<BigInt>(),
            rhs.clone()
        );
        FacetChart {
            facet_index: i,
            base,
            dirs,
        }
    }

    /// Facet `i` as a full-dimensional lattice polytope in its chart
    /// coordinates. For 1-dimensional polytopes facets are single points
    /// and this returns `None`.
    pub fn facet_in_chart(&self, i: usize) -> Option<(FacetChart, LatticePolytope)> {
        if self.dim() == 1 {
            return None;
        }
        let chart = self.facet_chart(i);
        let verts: Vec<RatVec> = self
            .inner
            .facet_vertices(i)
            .iter()
            .map(|v| chart.to_chart(v))
            .collect();
        let hull = RatPolytope::hull(self.dim() - 1, &verts)
            .expect("facet is full-dimensional in its chart");
        let lp = LatticePolytope::wrap(hull).expect("chart of lattice facet is integral");
        Some((chart, lp))
    }

    /// Total lattice boundary measure: the sum of facet volumes in their
    /// lattice-normalized charts. Each endpoint of a 1-dimensional polytope
    /// contributes 1.
    pub fn boundary_volume(&self) -> Rational {
        if self.dim() == 1 {
            return Rational::from(self.inner.facets.len() as i64);
        }
        (0..self.inner.facets.len())
            .map(|i| {
                let (_, facet_poly) = self.facet_in_chart(i).expect("dim >= 2");
                facet_poly.volume()
            })
            .sum()
    }

    /// Image under a unimodular transform `A` (vertices map to `A v`).
    pub fn apply_unimodular(&self, a: &IntMat) -> Result<LatticePolytope> {
        if !a.is_unimodular() {
            return Err(Error::InvalidInput("transform is not unimodular".into()));
        }
        LatticePolytope::from_vertices(
            self.ivertices.iter().map(|v| a.apply(v)).collect(),
        )
    }
}

/// Linear rank of the difference set `points - points[0]`; `dim` means the
/// points affinely span R^dim.
pub fn affine_rank(points: &[RatVec]) -> usize {
    match points {
        [] => 0,
        [first, rest @ ..] => {
            if rest.is_empty() {
                return 0;
            }
            let dim = first.dim();
            let rows: Vec<RatVec> = rest.iter().map(|p| p.sub(first)).collect();
            RatMat::from_vec_rows(rows, dim).rank()
        }
    }
}

/// All vertices of `{u : <u, normal_i> >= rhs_i}`: exact enumeration over
/// dim-subsets of the inequalities. The system must be bounded for the
/// result to describe a polytope; callers here always intersect with an
/// already bounded polytope.
pub fn vertices_from_inequalities(dim: usize, ineqs: &[FacetIneq]) -> Vec<RatVec> {
    let mut out: BTreeSet<RatVec> = BTreeSet::new();
    for combo in (0..ineqs.len()).combinations(dim) {
        let mut m = RatMat::zeros(dim, dim);
        let mut b = Vec::with_capacity(dim);
        for (r, &i) in combo.iter().enumerate() {
            for c in 0..dim {
                *m.at_mut(r, c) = Rational::from(&ineqs[i].normal[c]);
            }
            b.push(ineqs[i].rhs.clone());
        }
        let Some(x) = m.solve_unique(&RatVec::new(b)) else {
            continue;
        };
        if ineqs.iter().all(|f| f.satisfied_by(&x)) {
            out.insert(x);
        }
    }
    out.into_iter().collect()
}

/// Affine parametrization of the hyperplane `<u, normal> = rhs`:
/// returns `(base, dirs)` with `base` on the hyperplane and `dirs` a basis
/// of the normal's orthogonal complement lattice, so every hyperplane point
/// is `base + sum t_j dirs_j`. Unlike [`FacetChart`] this accepts rational
/// right-hand sides (the parametrization is then not lattice-based).
pub fn hyperplane_parametrization(
    normal: &[BigInt],
    rhs: &Rational,
) -> (RatVec, Vec<RatVec>) {
    let n = normal.len();
    assert!(normal.iter().any(|x| !x.is_zero()), "zero normal");
    let col = IntMat::from_rows(normal.iter().map(|x| vec![x.clone()]).collect())
        .expect("column");
    let (h, u) = col.hnf();
    let g = h.at(0, 0).clone(); // gcd of the normal, positive
    let scale = rhs / &Rational::from(g);
    let base = RatVec::from_bigints(u.row(0)).scale(&scale);
    let dirs = (1..n).map(|r| RatVec::from_bigints(u.row(r))).collect();
    (base, dirs)
}

/// Coordinates of hyperplane point `u` in a parametrization produced by
/// [`hyperplane_parametrization`].
pub fn hyperplane_coords(base: &RatVec, dirs: &[RatVec], u: &RatVec) -> RatVec {
    let n = base.dim();
    let k = dirs.len();
    if k == 0 {
        return RatVec::zeros(0);
    }
    let mut cols = RatMat::zeros(n, k);
    for (j, d) in dirs.iter().enumerate() {
        for i in 0..n {
            *cols.at_mut(i, j) = d.at(i).clone();
        }
    }
    cols.solve_unique(&u.sub(base))
        .expect("point lies on the hyperplane")
}

fn drop_coord(v: &RatVec, i: usize) -> RatVec {
    let mut out = Vec::with_capacity(v.dim() - 1);
    for (j, x) in v.iter().enumerate() {
        if j != i {
            out.push(x.clone());
        }
    }
    RatVec::new(out)
}

fn enumerate_box(
    lo: &[BigInt],
    hi: &[BigInt],
    i: usize,
    point: &mut Vec<BigInt>,
    visit: &mut impl FnMut(&[BigInt]),
) {
    if i == lo.len() {
        visit(point);
        return;
    }
    let mut v = lo[i].clone();
    while v <= hi[i] {
        point[i] = v.clone();
        enumerate_box(lo, hi, i + 1, point, visit);
        v += BigInt::one();
    }
}
