//! Piecewise-linear concave/convex functions with rational coefficients.
//!
//! A [`PLFunction`] is the pointwise min (concave) or max (convex) of
//! finitely many affine pieces. Concavity/convexity is structural, never
//! checked numerically. The module also computes linearity subdivisions of
//! a polytope, overlays (common refinements) of subdivisions, and the exact
//! radical-affineness test: whether the function is affine along every ray
//! from the origin to the boundary.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::RatVec;
use crate::polytope::{
    hyperplane_coords, hyperplane_parametrization, FacetIneq, RatPolytope,
};
use crate::rational::Rational;

/// Whether the function is the pointwise minimum (concave) or maximum
/// (convex) of its affine pieces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Min,
    Max,
}

/// One affine piece `u -> <gradient, u> + offset`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AffinePiece {
    pub gradient: RatVec,
    pub offset: Rational,
}

impl AffinePiece {
    pub fn new(gradient: RatVec, offset: Rational) -> Self {
        AffinePiece { gradient, offset }
    }

    pub fn eval(&self, u: &RatVec) -> Rational {
        self.gradient.dot(u) + &self.offset
    }
}

/// Min or max of finitely many affine pieces; exact rational coefficients.
/// Pieces are deduplicated and kept in a canonical order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLFunction {
    mode: Mode,
    pieces: Vec<AffinePiece>,
    dim: usize,
}

impl PLFunction {
    pub fn new(mode: Mode, pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput(
                "a piecewise-linear function needs at least one piece".into(),
            ));
        }
        let dim = pieces[0].gradient.dim();
        if pieces.iter().any(|p| p.gradient.dim() != dim) {
            return Err(Error::Shape("piece gradient dimension mismatch".into()));
        }
        let mut pieces = pieces;
        pieces.sort();
        pieces.dedup();
        Ok(PLFunction { mode, pieces, dim })
    }

    /// Single affine piece; the mode is immaterial (stored as Min).
    pub fn affine(gradient: RatVec, offset: Rational) -> Self {
        PLFunction::new(Mode::Min, vec![AffinePiece::new(gradient, offset)])
            .expect("one piece")
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_affine(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn eval(&self, u: &RatVec) -> Rational {
        assert_eq!(u.dim(), self.dim, "evaluation dimension mismatch");
        let vals = self.pieces.iter().map(|p| p.eval(u));
        match self.mode {
            Mode::Min => vals.reduce(Rational::min),
            Mode::Max => vals.reduce(Rational::max),
        }
        .expect("nonempty pieces")
    }

    pub fn value_at_origin(&self) -> Rational {
        self.eval(&RatVec::zeros(self.dim))
    }

    /// Pointwise negation: swaps concave and convex.
    pub fn negate(&self) -> PLFunction {
        let mode = match self.mode {
            Mode::Min => Mode::Max,
            Mode::Max => Mode::Min,
        };
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(p.gradient.neg(), -&p.offset))
            .collect();
        PLFunction::new(mode, pieces).expect("nonempty pieces")
    }

    pub fn add_constant(&self, c: &Rational) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(p.gradient.clone(), &p.offset + c))
            .collect();
        PLFunction::new(self.mode, pieces).expect("nonempty pieces")
    }

    /// Pullback along the affine map `t -> base + sum t_j dirs_j`; the
    /// result lives in `dirs.len()` variables.
    pub fn pullback_affine(&self, base: &RatVec, dirs: &[RatVec]) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let gradient =
                    RatVec::new(dirs.iter().map(|d| p.gradient.dot(d)).collect());
                let offset = p.gradient.dot(base) + &p.offset;
                AffinePiece::new(gradient, offset)
            })
            .collect();
        PLFunction::new(self.mode, pieces).expect("nonempty pieces")
    }

    /// The function `u -> f(s * u)`.
    pub fn precompose_scale(&self, s: &Rational) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(p.gradient.scale(s), p.offset.clone()))
            .collect();
        PLFunction::new(self.mode, pieces).expect("nonempty pieces")
    }

    /// The function `u -> f(M u)` for a square rational matrix given by its
    /// columns' action: gradient g becomes M^T g.
    pub fn precompose_columns(&self, columns: &[RatVec]) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let gradient =
                    RatVec::new(columns.iter().map(|c| p.gradient.dot(c)).collect());
                AffinePiece::new(gradient, p.offset.clone())
            })
            .collect();
        PLFunction::new(self.mode, pieces).expect("nonempty pieces")
    }
}

/// A polytope cut into full-dimensional cells, each carrying the index of
/// the piece of a [`PLFunction`] active there (or an arbitrary label for
/// overlays).
#[derive(Clone, Debug)]
pub struct Subdivision {
    ambient: RatPolytope,
    cells: Vec<(RatPolytope, usize)>,
}

impl Subdivision {
    pub fn ambient(&self) -> &RatPolytope {
        &self.ambient
    }

    pub fn cells(&self) -> &[(RatPolytope, usize)] {
        &self.cells
    }
}

/// Cut `p` into the domains of linearity of `f`: cell `k` is the closure of
/// the region where piece `k` attains the min (resp. max). Cells that are
/// empty or not full-dimensional are dropped; the remaining cells cover `p`
/// and overlap only in their boundaries.
pub fn linearity_cells(f: &PLFunction, p: &RatPolytope) -> Subdivision {
    assert_eq!(f.dim(), p.dim(), "function/polytope dimension mismatch");
    let mut cells = Vec::new();
    'piece: for (k, pk) in f.pieces().iter().enumerate() {
        let mut constraints = Vec::new();
        for (j, pj) in f.pieces().iter().enumerate() {
            if j == k {
                continue;
            }
            // Min: piece k active where p_k <= p_j, i.e.
            // <u, g_j - g_k> >= c_k - c_j; Max mode reverses roles.
            let (diff, rhs) = match f.mode() {
                Mode::Min => (pj.gradient.sub(&pk.gradient), &pk.offset - &pj.offset),
                Mode::Max => (pk.gradient.sub(&pj.gradient), &pj.offset - &pk.offset),
            };
            if diff.is_zero() {
                if rhs.is_positive() {
                    continue 'piece; // piece k is never active
                }
                continue; // constraint holds everywhere
            }
            constraints.push(FacetIneq::from_rational(diff.as_slice(), &rhs));
        }
        if let Some(cell) = p.intersect_halfspaces(&constraints) {
            cells.push((cell, k));
        }
    }
    debug_assert!(!cells.is_empty());
    Subdivision {
        ambient: p.clone(),
        cells,
    }
}

/// Common refinement: all full-dimensional pairwise intersections of cells
/// of `s1` and `s2`. Cell labels are inherited from `s1`.
pub fn overlay(s1: &Subdivision, s2: &Subdivision) -> Subdivision {
    assert_eq!(
        s1.ambient, s2.ambient,
        "overlay requires the same ambient polytope"
    );
    let mut cells = Vec::new();
    for (a, label) in &s1.cells {
        for (b, _) in &s2.cells {
            if let Some(c) = a.intersect_halfspaces(b.facets()) {
                cells.push((c, *label));
            }
        }
    }
    Subdivision {
        ambient: s1.ambient.clone(),
        cells,
    }
}

/// Exact test for radial affineness: `f` is radically affine on `p` iff for
/// every boundary point `u`, the restriction `t -> f(t u)` is affine on
/// `[0, 1]`.
///
/// Algorithm: let `h = f` (Min mode) or `-f` (Max mode), so `h` is concave
/// and `F(u) = h(u/2) - (h(0) + h(u))/2` is nonnegative. On each facet, `F`
/// is piecewise linear on the overlay of the boundary traces of the
/// linearity cells of `h` and of their doubled copies, so `F` vanishes on
/// the facet iff it vanishes at every vertex of that overlay. Concavity
/// plus midpoint equality forces affineness along each ray.
pub fn is_radically_affine(f: &PLFunction, p: &RatPolytope) -> Result<bool> {
    if f.dim() != p.dim() {
        return Err(Error::Shape(
            "function/polytope dimension mismatch".into(),
        ));
    }
    let origin = RatVec::zeros(p.dim());
    if !p.contains_interior(&origin) {
        return Err(Error::DegenerateInput(
            "the origin is not an interior point".into(),
        ));
    }
    let h = match f.mode() {
        Mode::Min => f.clone(),
        Mode::Max => f.negate(),
    };
    let h0 = h.value_at_origin();
    let half = crate::rational::rat(1, 2);

    // midpoint defect F(u) = h(u/2) - (h(0)+h(u))/2; zero iff the ray
    // through u is affine
    let defect_is_zero = |u: &RatVec| -> bool {
        let at_half = h.eval(&u.scale(&half));
        let chord = (&h0 + &h.eval(u)) * &half;
        at_half == chord
    };

    for (i, facet) in p.facets().iter().enumerate() {
        if p.dim() == 1 {
            // facets are single points
            for v in p.facet_vertices(i) {
                if !defect_is_zero(&v) {
                    return Ok(false);
                }
            }
            continue;
        }
        let (base, dirs) = hyperplane_parametrization(&facet.normal, &facet.rhs);
        let chart_pts: Vec<RatVec> = p
            .facet_vertices(i)
            .iter()
            .map(|v| hyperplane_coords(&base, &dirs, v))
            .collect();
        let facet_poly = RatPolytope::hull(p.dim() - 1, &chart_pts)
            .expect("facet is full-dimensional in its hyperplane");
        // traces of h and of u -> h(u/2) in chart coordinates
        let half_base = base.scale(&half);
        let half_dirs: Vec<RatVec> = dirs.iter().map(|d| d.scale(&half)).collect();
        let trace = h.pullback_affine(&base, &dirs);
        let half_trace = h.pullback_affine(&half_base, &half_dirs);
        let refined = overlay(
            &linearity_cells(&trace, &facet_poly),
            &linearity_cells(&half_trace, &facet_poly),
        );
        for (cell, _) in refined.cells() {
            for t in cell.vertices() {
                let mut u = base.clone();
                for (tj, d) in t.iter().zip(&dirs) {
                    u = u.add(&d.scale(tj));
                }
                if !defect_is_zero(&u) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Convenience: all distinct cell vertices of a subdivision.
pub fn subdivision_vertices(s: &Subdivision) -> Vec<RatVec> {
    s.cells()
        .iter()
        .flat_map(|(c, _)| c.vertices().iter().cloned())
        .sorted()
        .dedup()
        .collect()
}
