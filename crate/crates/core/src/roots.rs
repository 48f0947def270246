//! Roots of a reflexive polytope, their classification, and the normalized
//! product presentation available when exactly one unipotent root exists.
//!
//! A root is a lattice point `m` lying in the relative interior of a facet:
//! `<m, v_i> = -1` for exactly one facet normal `v_i` (and `>= 0` for the
//! others, which is automatic by integrality). It is semisimple when `-m`
//! is also a root, unipotent otherwise.
//!
//! With a unique unipotent root `m` on facet `F`, a unimodular change of
//! coordinates `A` sends `m` to `(0,...,0,-1)` and `F`'s normal to the last
//! coordinate functional, after which the polytope acquires the product
//! form `{(u', t) : u' in F', -1 <= t <= h(u')}` for a lattice polytope
//! `F'` and a concave piecewise-linear height `h`. The decreasing (Loewy)
//! and increasing (Socle) filtrations of the anticanonical ring then come
//! from the functions `h(u') - t` and `t + 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{IntMat, RatVec};
use crate::plfunc::{AffinePiece, Mode, PLFunction};
use crate::polytope::{vertices_from_inequalities, FacetIneq, LatticePolytope};
use crate::rational::Rational;
use crate::stability::{
    integral_over_polytope, invariants, Direction, InvariantReport,
};

/// Semisimple roots come in `±m` pairs; unipotent roots do not.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RootKind {
    Semisimple,
    Unipotent,
}

/// A root `m` with the facet that pairs to -1 and its classification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Root {
    pub point: Vec<BigInt>,
    pub facet_index: usize,
    pub kind: RootKind,
}

/// The linear functional picking out the last of `n` coordinates.
fn last_coordinate(n: usize) -> RatVec {
    let mut coords = vec![Rational::zero(); n];
    coords[n - 1] = Rational::one();
    RatVec::new(coords)
}

/// If `m` satisfies the root condition, the index of its facet.
fn root_facet(p: &LatticePolytope, m: &[BigInt]) -> Option<usize> {
    let minus_one = -BigInt::one();
    let mut found = None;
    for (i, f) in p.facets().iter().enumerate() {
        let pairing: BigInt = f.normal.iter().zip(m).map(|(a, x)| a * x).sum();
        if pairing == minus_one {
            if found.is_some() {
                return None; // lies on two facets: not in a relative interior
            }
            found = Some(i);
        }
    }
    found
}

/// All roots of a reflexive polytope, in lexicographic order of the point.
pub fn enumerate_roots(p: &LatticePolytope) -> Result<Vec<Root>> {
    if !p.is_reflexive() {
        return Err(Error::NotReflexive(
            "roots are defined for reflexive polytopes".into(),
        ));
    }
    let mut out = Vec::new();
    for m in p.lattice_points(1) {
        let Some(facet_index) = root_facet(p, &m) else {
            continue;
        };
        let neg: Vec<BigInt> = m.iter().map(|x| -x).collect();
        let kind = if root_facet(p, &neg).is_some() {
            RootKind::Semisimple
        } else {
            RootKind::Unipotent
        };
        out.push(Root {
            point: m,
            facet_index,
            kind,
        });
    }
    Ok(out)
}

/// Product presentation of a reflexive polytope with a unique unipotent
/// root: `transform * original = {(u', t) : u' in base_polytope,
/// -1 <= t <= height(u')}` with the root mapped to `(0,...,0,-1)`.
#[derive(Clone, Debug)]
pub struct NormalizedPresentation {
    pub transform: IntMat,
    pub root: Root,
    pub root_image: Vec<BigInt>,
    pub base_polytope: LatticePolytope,
    pub height: PLFunction,
    pub original: LatticePolytope,
    pub transformed: LatticePolytope,
}

impl NormalizedPresentation {
    /// The concave function `(u', t) -> height(u') - t` inducing the
    /// decreasing (Loewy) filtration.
    pub fn loewy_function(&self) -> PLFunction {
        let pieces = self
            .height
            .pieces()
            .iter()
            .map(|p| {
                AffinePiece::new(
                    p.gradient.with_appended(Rational::from(-1)),
                    p.offset.clone(),
                )
            })
            .collect();
        PLFunction::new(Mode::Min, pieces).expect("height has pieces")
    }

    /// The affine function `(u', t) -> t + 1` inducing the increasing
    /// (Socle) filtration; stored convex (Max mode).
    pub fn socle_function(&self) -> PLFunction {
        let piece = AffinePiece::new(
            last_coordinate(self.transformed.dim()),
            Rational::one(),
        );
        PLFunction::new(Mode::Max, vec![piece]).expect("one piece")
    }
}

/// Find the unique unipotent root and build the normalized presentation.
///
/// Errors: `NoUnipotentRoot` when every root is semisimple (or there are no
/// roots) — the reductive case; `UnsupportedAutomorphismStructure` when
/// several unipotent roots exist.
pub fn normalize_unique_unipotent(p: &LatticePolytope) -> Result<NormalizedPresentation> {
    let roots = enumerate_roots(p)?;
    let unipotent: Vec<&Root> = roots
        .iter()
        .filter(|r| r.kind == RootKind::Unipotent)
        .collect();
    let root = match unipotent.len() {
        0 => return Err(Error::NoUnipotentRoot),
        1 => unipotent[0].clone(),
        k => {
            return Err(Error::UnsupportedAutomorphismStructure(format!(
                "found {k} unipotent roots; the normalized presentation needs exactly one"
            )))
        }
    };
    let n = p.dim();
    assert!(n >= 2, "a one-dimensional reflexive polytope has no unipotent root");

    // rows 1..n-1: canonical saturated basis of the root's orthogonal
    // complement in the character lattice; row n: the facet normal. The
    // decomposition r = (r + <m,r> v_F) - <m,r> v_F shows the rows span
    // the whole lattice, so the matrix is unimodular.
    let m_row = IntMat::from_rows(vec![root.point.clone()]).expect("row vector");
    let kernel = m_row.kernel_basis(); // n x (n-1), columns form the basis
    let mut rows: Vec<Vec<BigInt>> = (0..n - 1)
        .map(|j| (0..n).map(|i| kernel.at(i, j).clone()).collect())
        .collect();
    let v_f = p.facets()[root.facet_index].normal.clone();
    rows.push(v_f);
    let a = IntMat::from_rows(rows).expect("square transform");
    assert!(a.is_unimodular(), "normalization transform must be unimodular");

    let mut root_image = vec![BigInt::zero(); n];
    root_image[n - 1] = -BigInt::one();
    assert_eq!(a.apply(&root.point), root_image, "root must map to (0,...,0,-1)");

    let transformed = p.apply_unimodular(&a)?;

    // the root's facet becomes the bottom facet t >= -1
    let mut e_n = vec![BigInt::zero(); n];
    e_n[n - 1] = BigInt::one();
    let minus_one = Rational::from(-1);
    let bottom = transformed
        .facets()
        .iter()
        .position(|f| f.normal == e_n && f.rhs == minus_one)
        .expect("transformed polytope has the bottom facet t >= -1");

    // every other facet normal has nonpositive last coordinate: the root
    // pairs to -1 with the bottom facet only, and to -w_n >= 0 elsewhere
    for (i, f) in transformed.facets().iter().enumerate() {
        if i != bottom {
            assert!(
                !f.normal[n - 1].is_positive(),
                "unique-unipotent-root polytopes are downward closed"
            );
        }
    }

    // base polytope: the bottom facet with its (constant) last coordinate
    // dropped
    let base_vertices: Vec<Vec<BigInt>> = transformed
        .vertices()
        .iter()
        .filter(|v| v[n - 1] == -BigInt::one())
        .map(|v| v[..n - 1].to_vec())
        .collect();
    let base_polytope = LatticePolytope::from_vertices(base_vertices)?;
    assert!(
        base_polytope
            .as_rational()
            .contains_interior(&RatVec::zeros(n - 1)),
        "the root's facet keeps the origin of the base in its relative interior"
    );

    // height pieces from the facets with negative last normal coordinate:
    // <w', u'> + w_n t >= rhs  <=>  t <= (rhs - <w', u'>)/w_n
    let mut pieces = Vec::new();
    for f in transformed.facets() {
        let w_n = &f.normal[n - 1];
        if !w_n.is_negative() {
            continue;
        }
        let w_n_rat = Rational::from(w_n);
        let gradient = RatVec::new(
            f.normal[..n - 1]
                .iter()
                .map(|w| -(&Rational::from(w) / &w_n_rat))
                .collect(),
        );
        let offset = &f.rhs / &w_n_rat;
        pieces.push(AffinePiece::new(gradient, offset));
    }
    let height = PLFunction::new(Mode::Min, pieces)?;

    // exact product-structure verification: the half-space description
    // {t >= -1} ∩ {u' in base} ∩ {t <= height} must reproduce the vertex
    // set of the transformed polytope
    let mut ineqs: Vec<FacetIneq> = vec![FacetIneq::new(e_n, minus_one)];
    for f in base_polytope.facets() {
        let mut lifted = f.normal.clone();
        lifted.push(BigInt::zero());
        ineqs.push(FacetIneq::new(lifted, f.rhs.clone()));
    }
    for f in transformed.facets() {
        if f.normal[n - 1].is_negative() {
            ineqs.push(f.clone());
        }
    }
    let reconstructed = vertices_from_inequalities(n, &ineqs);
    assert_eq!(
        reconstructed,
        transformed.rat_vertices().to_vec(),
        "product reconstruction must reproduce the polytope"
    );

    Ok(NormalizedPresentation {
        transform: a,
        root,
        root_image,
        base_polytope,
        height,
        original: p.clone(),
        transformed,
    })
}

/// Reports for the two canonical filtrations, or the degenerate outcome.
#[derive(Clone, Debug)]
pub enum LoewySocle {
    /// No unipotent root: the filtrations collapse (decreasing: step 0 is
    /// everything, step 1 is zero; increasing: step 0 is everything).
    TrivialFiltrations,
    Invariants(Box<LoewySocleInvariants>),
}

#[derive(Clone, Debug)]
pub struct LoewySocleInvariants {
    pub presentation: NormalizedPresentation,
    pub loewy: InvariantReport,
    pub socle: InvariantReport,
}

/// Full pipeline: normalize, build the two functions, compute both
/// invariant reports, and cross-check each Ding value through an
/// independent direct integrand.
pub fn loewy_socle_invariants(p: &LatticePolytope) -> Result<LoewySocle> {
    let np = match normalize_unique_unipotent(p) {
        Ok(np) => np,
        Err(Error::NoUnipotentRoot) => return Ok(LoewySocle::TrivialFiltrations),
        Err(e) => return Err(e),
    };
    let q = &np.transformed;
    let n = q.dim();
    let loewy = invariants(q, &np.loewy_function(), Direction::Decreasing)?;
    let socle = invariants(q, &np.socle_function(), Direction::Increasing)?;

    // independent path for the Loewy Ding invariant:
    // Ding = (1/vol) ∫_P (h(0) - h(u') + t) du' dt
    let h0 = np.height.value_at_origin();
    let direct_pieces = np
        .height
        .pieces()
        .iter()
        .map(|piece| {
            AffinePiece::new(
                piece.gradient.neg().with_appended(Rational::one()),
                &h0 - &piece.offset,
            )
        })
        .collect();
    let direct = PLFunction::new(Mode::Max, direct_pieces)?;
    let ding_direct = &integral_over_polytope(&direct, q)? / &loewy.vol_p;
    assert_eq!(loewy.ding, ding_direct, "Loewy Ding cross-check failed");

    // independent path for the Socle invariants: DF = Ding = (1/vol) ∫_P t
    let t_fn = PLFunction::affine(last_coordinate(n), Rational::zero());
    let socle_direct = &integral_over_polytope(&t_fn, q)? / &socle.vol_p;
    assert_eq!(socle.df, socle_direct, "Socle DF cross-check failed");
    assert_eq!(socle.ding, socle_direct, "Socle Ding cross-check failed");

    Ok(LoewySocle::Invariants(Box::new(LoewySocleInvariants {
        presentation: np,
        loewy,
        socle,
    })))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pentagon() -> LatticePolytope {
        crate::polytope::tests::pentagon()
    }

    fn prism() -> LatticePolytope {
        crate::stability::tests::prism_over_quad()
    }

    /// {(x,y,t) : (x,y) in the unit hexagon, -1 <= t <= min(1-2x, 1-x)}
    pub(crate) fn hexagon_roof() -> LatticePolytope {
        LatticePolytope::from_i64_vertices(&[
            &[1, 0, -1],
            &[0, 1, -1],
            &[-1, 1, -1],
            &[-1, 0, -1],
            &[0, -1, -1],
            &[1, -1, -1],
            &[0, 1, 1],
            &[-1, 1, 2],
            &[-1, 0, 2],
            &[0, -1, 1],
        ])
        .unwrap()
    }

    fn big<const N: usize>(xs: [i64; N]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pentagon_has_one_unipotent_root() {
        let roots = enumerate_roots(&pentagon()).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].point, big([0, -1]));
        assert_eq!(roots[0].kind, RootKind::Unipotent);
        // its facet is the bottom edge t >= -1
        let p = pentagon();
        assert_eq!(p.facets()[roots[0].facet_index].normal, big([0, 1]));
    }

    #[test]
    fn cross_polytope_has_no_roots() {
        let cross =
            LatticePolytope::from_i64_vertices(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])
                .unwrap();
        assert!(enumerate_roots(&cross).unwrap().is_empty());
    }

    #[test]
    fn square_has_only_semisimple_roots() {
        let square =
            LatticePolytope::from_i64_vertices(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])
                .unwrap();
        let roots = enumerate_roots(&square).unwrap();
        assert_eq!(roots.len(), 4);
        assert!(roots.iter().all(|r| r.kind == RootKind::Semisimple));
        assert!(matches!(
            normalize_unique_unipotent(&square),
            Err(Error::NoUnipotentRoot)
        ));
    }

    #[test]
    fn projective_plane_roots_are_semisimple() {
        let p = LatticePolytope::from_i64_vertices(&[&[-1, -1], &[2, -1], &[-1, 2]])
            .unwrap();
        let roots = enumerate_roots(&p).unwrap();
        assert_eq!(roots.len(), 6);
        assert!(roots.iter().all(|r| r.kind == RootKind::Semisimple));
    }

    #[test]
    fn prism_roots_match_expected_classification() {
        let roots = enumerate_roots(&prism()).unwrap();
        assert_eq!(roots.len(), 3);
        // lex order: (-1,0,0), (0,0,-1), (1,0,0)
        assert_eq!(roots[0].point, big([-1, 0, 0]));
        assert_eq!(roots[0].kind, RootKind::Semisimple);
        assert_eq!(roots[1].point, big([0, 0, -1]));
        assert_eq!(roots[1].kind, RootKind::Unipotent);
        assert_eq!(roots[2].point, big([1, 0, 0]));
        assert_eq!(roots[2].kind, RootKind::Semisimple);
    }

    #[test]
    fn roots_require_reflexive() {
        let p = LatticePolytope::from_i64_vertices(&[&[2, 0], &[-2, 0], &[0, 1], &[0, -1]])
            .unwrap();
        assert!(matches!(enumerate_roots(&p), Err(Error::NotReflexive(_))));
    }

    #[test]
    fn two_unipotent_roots_are_rejected()  {
        // pentagon of the degree-7 del Pezzo surface: both (1,0) and
        // (1,-1) are unipotent roots
        let p = LatticePolytope::from_i64_vertices(&[
            &[-1, 0],
            &[-1, 1],
            &[0, 1],
            &[2, -1],
            &[0, -1],
        ])
        .unwrap();
        let roots = enumerate_roots(&p).unwrap();
        let unipotent: Vec<_> = roots
            .iter()
            .filter(|r| r.kind == RootKind::Unipotent)
            .collect();
        assert_eq!(unipotent.len(), 2);
        assert_eq!(unipotent[0].point, big([1, -1]));
        assert_eq!(unipotent[1].point, big([1, 0]));
        assert!(matches!(
            normalize_unique_unipotent(&p),
            Err(Error::UnsupportedAutomorphismStructure(_))
        ));
    }

    #[test]
    fn pentagon_normalization_is_the_identity() {
        let np = normalize_unique_unipotent(&pentagon()).unwrap();
        assert!(np.transform.is_unimodular());
        assert_eq!(np.transform, IntMat::identity(2));
        assert_eq!(np.root_image, big([0, -1]));
        assert_eq!(np.transformed, pentagon());
        // base polytope [-1, 1]
        assert_eq!(
            np.base_polytope.vertices().to_vec(),
            vec![big([-1]), big([1])]
        );
        // height min(1-x, 1+x)
        assert_eq!(np.height.pieces().len(), 2);
        assert_eq!(np.height.eval(&RatVec::from_i64s(&[0])), int(1));
        assert_eq!(np.height.eval(&RatVec::from_i64s(&[1])), int(0));
        assert_eq!(np.height.eval(&RatVec::from_i64s(&[-1])), int(0));
        // the induced functions
        let f = np.loewy_function();
        assert_eq!(f.eval(&RatVec::from_i64s(&[0, 0])), int(1));
        assert_eq!(f.eval(&RatVec::from_i64s(&[1, -1])), int(1));
        let g = np.socle_function();
        assert_eq!(g.eval(&RatVec::from_i64s(&[0, -1])), int(0));
        assert_eq!(g.eval(&RatVec::from_i64s(&[0, 1])), int(2));
    }

    #[test]
    fn prism_normalization_is_the_identity() {
        let np = normalize_unique_unipotent(&prism()).unwrap();
        assert_eq!(np.transform, IntMat::identity(3));
        let expected_base = LatticePolytope::from_i64_vertices(&[
            &[1, 1],
            &[0, 1],
            &[-2, -1],
            &[1, -1],
        ])
        .unwrap();
        assert_eq!(np.base_polytope, expected_base);
        // h = min(1, 1+y)
        assert_eq!(np.height.pieces().len(), 2);
        for (x, y, expected) in
            [(0i64, 0i64, 1i64), (1, 1, 1), (-2, -1, 0), (1, -1, 0), (0, 1, 1)]
        {
            assert_eq!(
                np.height.eval(&RatVec::from_i64s(&[x, y])),
                int(expected)
            );
        }
        // loewy function min(1-t, 1+y-t)
        let f = np.loewy_function();
        assert_eq!(f.eval(&RatVec::from_i64s(&[0, 0, 0])), int(1));
        assert_eq!(f.eval(&RatVec::from_i64s(&[0, -1, -1])), int(1));
        assert_eq!(f.eval(&RatVec::from_i64s(&[0, -1, 0])), int(0));
    }

    #[test]
    fn sheared_pentagon_normalizes_to_the_same_presentation() {
        let shear = IntMat::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let sheared = pentagon().apply_unimodular(&shear).unwrap();
        assert_ne!(sheared, pentagon());
        let np = normalize_unique_unipotent(&sheared).unwrap();
        assert_ne!(np.transform, IntMat::identity(2));
        // the base interval and height pieces agree up to the 1-dim
        // unimodular symmetry x -> -x; both fix the piece multiset here
        assert_eq!(
            np.base_polytope.vertices().to_vec(),
            vec![big([-1]), big([1])]
        );
        let mut gradients: Vec<Rational> = np
            .height
            .pieces()
            .iter()
            .map(|p| p.gradient.at(0).clone())
            .collect();
        gradients.sort();
        assert_eq!(gradients, vec![int(-1), int(1)]);
        assert!(np
            .height
            .pieces()
            .iter()
            .all(|p| p.offset == int(1)));
    }

    #[test]
    fn loewy_socle_invariants_on_the_three_polytopes() {
        let LoewySocle::Invariants(inv) = loewy_socle_invariants(&pentagon()).unwrap()
        else {
            panic!("pentagon has a unipotent root");
        };
        assert_eq!(inv.loewy.df, rat(2, 9));
        assert_eq!(inv.loewy.ding, rat(2, 9));
        assert_eq!(inv.socle.df, rat(-2, 9));
        assert_eq!(inv.socle.ding, rat(-2, 9));

        let LoewySocle::Invariants(inv) = loewy_socle_invariants(&prism()).unwrap()
        else {
            panic!("prism has a unipotent root");
        };
        assert_eq!(inv.loewy.df, rat(21, 160));
        assert_eq!(inv.socle.df, rat(-21, 160));

        let LoewySocle::Invariants(inv) = loewy_socle_invariants(&hexagon_roof()).unwrap()
        else {
            panic!("hexagon roof has a unipotent root");
        };
        assert_eq!(inv.loewy.df, rat(-9, 128));
        assert_eq!(inv.loewy.ding, rat(-9, 128));
        assert_eq!(inv.socle.df, rat(9, 128));
        assert_eq!(inv.socle.ding, rat(9, 128));
    }

    #[test]
    fn hexagon_roof_geometry() {
        let p = hexagon_roof();
        assert!(p.is_reflexive());
        assert_eq!(p.as_rational().vertices().len(), 10);
        // the wall x <= 1 of the base hexagon is not a facet here: the
        // roof touches the floor along that edge
        assert_eq!(p.facets().len(), 8);
        assert_eq!(p.volume(), rat(16, 3));
        assert_eq!(p.lattice_points(1).len(), 19);
        let roots = enumerate_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].point, big([0, 0, -1]));
        assert_eq!(roots[0].kind, RootKind::Unipotent);
    }

    #[test]
    fn reductive_case_reports_trivial_filtrations() {
        let cross =
            LatticePolytope::from_i64_vertices(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])
                .unwrap();
        assert!(matches!(
            loewy_socle_invariants(&cross).unwrap(),
            LoewySocle::TrivialFiltrations
        ));
        let square =
            LatticePolytope::from_i64_vertices(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])
                .unwrap();
        assert!(matches!(
            loewy_socle_invariants(&square).unwrap(),
            LoewySocle::TrivialFiltrations
        ));
    }

    #[test]
    fn invariants_are_unimodular_invariant() {
        let a = IntMat::from_i64_rows(&[&[1, 2, 0], &[0, 1, 0], &[1, 1, 1]]);
        assert!(a.is_unimodular());
        let moved = prism().apply_unimodular(&a).unwrap();
        let LoewySocle::Invariants(orig) = loewy_socle_invariants(&prism()).unwrap()
        else {
            panic!()
        };
        let LoewySocle::Invariants(inv) = loewy_socle_invariants(&moved).unwrap()
        else {
            panic!("unimodular images keep the unique unipotent root");
        };
        assert_eq!(inv.loewy, orig.loewy);
        assert_eq!(inv.socle, orig.socle);
    }
}
