//! Property tests for the structural contracts of the library: exact
//! linear algebra (determinants, Hermite form, kernels), polytope volume
//! (triangulation partition, Ehrhart counting, unimodular and scaling
//! behaviour), duality, and the stability-invariant inequalities.

mod common;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::{
    ehrhart_volume, hexagon_roof, normalizable_fixtures, pentagon,
    prism_over_quad, random_concave_pl, random_unimodular, rng,
};
use torik_core::linalg::{IntMat, RatMat, RatVec};
use torik_core::plfunc::{is_radically_affine, AffinePiece, Mode, PLFunction};
use torik_core::polytope::{LatticePolytope, RatPolytope, Simplex};
use torik_core::rational::{int, rat, Rational};
use torik_core::stability::{invariants, Direction};

// ---------------------------------------------------------------------
// strategies and helpers
// ---------------------------------------------------------------------

fn rat_entries(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-5i64..=5, 1i64..=3), n)
        .prop_map(|pairs| pairs.into_iter().map(|(p, q)| rat(p, q)).collect())
}

fn rat_square(n: usize) -> impl Strategy<Value = RatMat> {
    rat_entries(n * n).prop_map(move |entries| {
        let rows = entries.chunks(n).map(|c| c.to_vec()).collect();
        RatMat::from_rows(rows).expect("rectangular")
    })
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMat> {
    prop::collection::vec(-6i64..=6, rows * cols).prop_map(move |entries| {
        let rows_vec = entries
            .chunks(cols)
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        IntMat::from_rows(rows_vec).expect("rectangular")
    })
}

/// Row-style Hermite shape: positive pivots in strictly increasing
/// columns, zeros below each pivot, entries above reduced into
/// `[0, pivot)`, zero rows only at the bottom.
fn is_row_hnf(h: &IntMat) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for r in 0..h.nrows() {
        match (0..h.ncols()).find(|&c| !h.at(r, c).is_zero()) {
            None => seen_zero_row = true,
            Some(c) => {
                if seen_zero_row {
                    return false;
                }
                if let Some(p) = last_pivot {
                    if c <= p {
                        return false;
                    }
                }
                let pivot = h.at(r, c);
                if pivot.is_negative() {
                    return false;
                }
                for r2 in (r + 1)..h.nrows() {
                    if !h.at(r2, c).is_zero() {
                        return false;
                    }
                }
                for r2 in 0..r {
                    let e = h.at(r2, c);
                    if e.is_negative() || e >= pivot {
                        return false;
                    }
                }
                last_pivot = Some(c);
            }
        }
    }
    true
}

/// Euclidean area of a 2-polytope by the shoelace formula: an oracle
/// independent of the triangulation-based `volume`.
fn shoelace_area(p: &RatPolytope) -> Rational {
    let c = p.vertex_centroid();
    let mut verts: Vec<RatVec> = p.vertices().to_vec();
    let half = |v: &RatVec| -> u8 {
        let dx = v.at(0) - c.at(0);
        let dy = v.at(1) - c.at(1);
        u8::from(!(dy.is_positive() || (dy.is_zero() && dx.is_positive())))
    };
    let cross = |a: &RatVec, b: &RatVec| -> Rational {
        let ax = a.at(0) - c.at(0);
        let ay = a.at(1) - c.at(1);
        let bx = b.at(0) - c.at(0);
        let by = b.at(1) - c.at(1);
        &(&ax * &by) - &(&ay * &bx)
    };
    verts.sort_by(|a, b| {
        half(a).cmp(&half(b)).then_with(|| {
            let x = cross(a, b);
            if x.is_positive() {
                std::cmp::Ordering::Less
            } else if x.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
    });
    let mut twice = int(0);
    for i in 0..verts.len() {
        let a = &verts[i];
        let b = &verts[(i + 1) % verts.len()];
        twice = &twice + &(&(a.at(0) * b.at(1)) - &(a.at(1) * b.at(0)));
    }
    twice.abs() / int(2)
}

/// Whether `x` lies in the open interior of the simplex (all barycentric
/// coordinates strictly positive).
fn strictly_inside(s: &Simplex, x: &RatVec) -> bool {
    let n = s.dim();
    let v0 = &s.vertices()[0];
    let diff_rows: Vec<RatVec> =
        s.vertices()[1..].iter().map(|v| v.sub(v0)).collect();
    let mat = RatMat::from_vec_rows(diff_rows, n).transpose();
    let Some(lambda) = mat.solve_unique(&x.sub(v0)) else {
        return false;
    };
    let mut total = int(0);
    for l in lambda.iter() {
        if !l.is_positive() {
            return false;
        }
        total = &total + l;
    }
    total < int(1)
}

fn rat_points(dim: usize, pts: Vec<Vec<i64>>) -> Vec<RatVec> {
    pts.iter()
        .map(|p| RatVec::from_i64s(&p[..dim]))
        .collect()
}

// ---------------------------------------------------------------------
// exact linear algebra
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn det_is_multiplicative(a in rat_square(3), b in rat_square(3)) {
        let lhs = a.mul(&b).det().unwrap();
        let rhs = &a.det().unwrap() * &b.det().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn det_of_transpose(a in rat_square(3)) {
        prop_assert_eq!(a.det().unwrap(), a.transpose().det().unwrap());
    }

    #[test]
    fn hnf_contract(a in int_matrix(3, 4)) {
        let (h, u) = a.hnf();
        prop_assert!(u.is_unimodular());
        prop_assert_eq!(u.mul(&a), h.clone());
        prop_assert!(is_row_hnf(&h));
    }

    #[test]
    fn hnf_contract_tall(a in int_matrix(4, 2)) {
        let (h, u) = a.hnf();
        prop_assert!(u.is_unimodular());
        prop_assert_eq!(u.mul(&a), h.clone());
        prop_assert!(is_row_hnf(&h));
    }

    #[test]
    fn hnf_is_canonical_under_row_scramble(a in int_matrix(3, 3), seed in 0u64..1000) {
        // the Hermite form depends only on the row lattice
        let mut r = rng(seed);
        let u = random_unimodular(&mut r, 3);
        let (h1, _) = a.hnf();
        let (h2, _) = u.mul(&a).hnf();
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn integer_kernel_is_saturated(a in int_matrix(3, 5)) {
        let k = a.kernel_basis();
        let rank = a.to_rat_mat().rank();
        prop_assert_eq!(k.ncols(), a.ncols() - rank);
        let product = a.mul(&k);
        for r in 0..product.nrows() {
            prop_assert!(product.row(r).iter().all(Zero::is_zero));
        }
        if k.ncols() > 0 {
            // saturation: the basis extends to a lattice basis
            let snf = k.transpose().snf_diagonal();
            prop_assert!(snf.iter().all(|d| *d == BigInt::from(1)));
        }
    }

    #[test]
    fn rational_kernel_matches_rank(a in rat_square(4)) {
        let kernel = a.kernel();
        prop_assert_eq!(kernel.len(), a.ncols() - a.rank());
        for v in &kernel {
            prop_assert!(a.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn rref_is_projection(a in rat_square(3)) {
        // reducing twice changes nothing, and rank = pivot count
        let (r1, pivots) = a.clone().rref();
        let (r2, pivots2) = r1.clone().rref();
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(&pivots, &pivots2);
        prop_assert_eq!(pivots.len(), a.rank());
    }
}

// ---------------------------------------------------------------------
// polytope volume and duality
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_area_matches_shoelace(
        pts in prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 3..=8),
    ) {
        let points = rat_points(2, pts);
        let hull = RatPolytope::hull(2, &points);
        prop_assume!(hull.is_ok());
        let hull = hull.unwrap();
        prop_assert_eq!(hull.volume(), shoelace_area(&hull));
    }

    #[test]
    fn volume_is_homogeneous(
        pts in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 4..=8),
        k in 2i64..=3,
    ) {
        let points = rat_points(3, pts);
        let hull = RatPolytope::hull(3, &points);
        prop_assume!(hull.is_ok());
        let hull = hull.unwrap();
        let scale = int(k);
        let scaled: Vec<RatVec> =
            points.iter().map(|p| p.scale(&scale)).collect();
        let scaled_hull = RatPolytope::hull(3, &scaled).unwrap();
        let factor = &(&scale * &scale) * &scale;
        prop_assert_eq!(scaled_hull.volume(), &factor * &hull.volume());
    }

    #[test]
    fn unimodular_maps_preserve_volume_and_counts(seed in 0u64..500) {
        let mut r = rng(seed);
        for p in normalizable_fixtures() {
            let a = random_unimodular(&mut r, p.dim());
            let q = p.apply_unimodular(&a).unwrap();
            prop_assert_eq!(p.volume(), q.volume());
            prop_assert_eq!(p.boundary_volume(), q.boundary_volume());
            prop_assert!(q.is_reflexive());
            for d in 0..=2u32 {
                prop_assert_eq!(
                    p.lattice_points(d).len(),
                    q.lattice_points(d).len()
                );
            }
        }
    }
}

#[test]
fn triangulation_partitions_fixture_volumes() {
    for p in normalizable_fixtures() {
        let simplices = p.triangulate();
        let total: Rational = simplices.iter().map(Simplex::volume).sum();
        // the Ehrhart count is an independent oracle for the total
        assert_eq!(total, ehrhart_volume(&p));
        assert_eq!(p.volume(), ehrhart_volume(&p));
        // parts overlap in measure zero: no barycenter of one simplex
        // lies strictly inside another
        for (i, s) in simplices.iter().enumerate() {
            let c = s.barycenter();
            assert!(strictly_inside(s, &c));
            for (j, other) in simplices.iter().enumerate() {
                if i != j {
                    assert!(!strictly_inside(other, &c));
                }
            }
        }
        // every simplex vertex is a polytope vertex or subdivision point
        for s in &simplices {
            for v in s.vertices() {
                assert!(p.contains(v));
            }
        }
    }
}

#[test]
fn dual_of_dual_is_identity() {
    let square = LatticePolytope::from_i64_vertices(&[
        &[1, 1],
        &[-1, 1],
        &[-1, -1],
        &[1, -1],
    ])
    .unwrap();
    let cross = LatticePolytope::from_i64_vertices(&[
        &[1, 0, 0],
        &[-1, 0, 0],
        &[0, 1, 0],
        &[0, -1, 0],
        &[0, 0, 1],
        &[0, 0, -1],
    ])
    .unwrap();
    let mut all = normalizable_fixtures();
    all.push(square);
    all.push(cross);
    for p in all {
        let dd = p.dual().unwrap().dual().unwrap();
        let mut original: Vec<Vec<BigInt>> = p.vertices().to_vec();
        let mut returned: Vec<Vec<BigInt>> = dd.vertices().to_vec();
        original.sort();
        returned.sort();
        assert_eq!(original, returned);
    }
}

#[test]
fn dual_vertices_are_facet_normals() {
    for p in normalizable_fixtures() {
        let dual = p.dual().unwrap();
        let mut normals: Vec<Vec<BigInt>> =
            p.facets().iter().map(|f| f.normal.clone()).collect();
        let mut verts: Vec<Vec<BigInt>> = dual.vertices().to_vec();
        normals.sort();
        verts.sort();
        assert_eq!(normals, verts);
    }
}

#[test]
fn ehrhart_differences_match_volume() {
    let cases = [
        (pentagon(), int(3)),
        (prism_over_quad(), rat(20, 3)),
        (hexagon_roof(), rat(16, 3)),
    ];
    for (p, vol) in cases {
        assert_eq!(p.volume(), vol);
        assert_eq!(ehrhart_volume(&p), vol);
    }
}

// ---------------------------------------------------------------------
// stability invariants
// ---------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn df_dominates_ding_on_formula_inputs(
        raw_pieces in prop::collection::vec(
            (prop::collection::vec(-3i64..=3, 2), -4i64..=4, 1i64..=3),
            1..=4,
        ),
        shift_num in -5i64..=5,
    ) {
        let pieces: Vec<AffinePiece> = raw_pieces
            .iter()
            .map(|(g, p, q)| AffinePiece {
                gradient: RatVec::from_i64s(g),
                offset: rat(*p, *q),
            })
            .collect();
        let f = PLFunction::new(Mode::Min, pieces).unwrap();
        let p = pentagon();
        let rep = invariants(&p, &f, Direction::Decreasing).unwrap();
        prop_assert!(rep.df >= rep.ding);
        let affine = is_radically_affine(&f, p.as_rational()).unwrap();
        prop_assert_eq!(rep.df == rep.ding, affine);
        prop_assert_eq!(rep.radically_affine, affine);
        // both invariants ignore constant shifts
        let shifted = invariants(
            &p,
            &f.add_constant(&rat(shift_num, 2)),
            Direction::Decreasing,
        )
        .unwrap();
        prop_assert_eq!(&rep.df, &shifted.df);
        prop_assert_eq!(&rep.ding, &shifted.ding);
    }
}

#[test]
fn seeded_random_functions_are_accepted_on_all_fixtures() {
    let mut r = rng(0xfeed);
    for p in normalizable_fixtures() {
        for _ in 0..10 {
            let f = random_concave_pl(&mut r, p.dim());
            let rep = invariants(&p, &f, Direction::Decreasing).unwrap();
            assert!(rep.df >= rep.ding);
        }
    }
}
