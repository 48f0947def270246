//! Shared helpers for the integration test suites: the bundled example
//! polytopes, seeded randomness, random unimodular matrices, and random
//! concave PL functions.
#![allow(dead_code)] // each test binary uses a different subset

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torik_core::linalg::{IntMat, RatVec};
use torik_core::plfunc::{AffinePiece, Mode, PLFunction};
use torik_core::polytope::LatticePolytope;
use torik_core::rational::{int, rat, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pentagon surface with one unipotent root.
pub fn pentagon() -> LatticePolytope {
    LatticePolytope::from_i64_vertices(&[
        &[-1, -1],
        &[1, -1],
        &[1, 0],
        &[0, 1],
        &[-1, 0],
    ])
    .expect("valid")
}

/// Prism over a quadrilateral: the smooth threefold example.
pub fn prism_over_quad() -> LatticePolytope {
    LatticePolytope::from_i64_vertices(&[
        &[1, 1, -1],
        &[0, 1, -1],
        &[-2, -1, -1],
        &[1, -1, -1],
        &[1, 1, 1],
        &[0, 1, 1],
        &[-2, -1, 0],
        &[1, -1, 0],
        &[-1, 0, 1],
        &[1, 0, 1],
    ])
    .expect("valid")
}

/// Hexagon base with a slanted roof: the singular threefold example.
pub fn hexagon_roof() -> LatticePolytope {
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
    .expect("valid")
}

/// Pentagon of the degree-7 del Pezzo surface (two unipotent roots).
pub fn del_pezzo7_polygon() -> LatticePolytope {
    LatticePolytope::from_i64_vertices(&[
        &[-1, 0],
        &[-1, 1],
        &[0, 1],
        &[2, -1],
        &[0, -1],
    ])
    .expect("valid")
}

/// The three polytopes whose normalization has a unique unipotent root.
pub fn normalizable_fixtures() -> Vec<LatticePolytope> {
    vec![pentagon(), prism_over_quad(), hexagon_roof()]
}

/// A random element of GL_n(Z): a product of shears, swaps, and sign
/// flips applied to the identity.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMat {
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u64::from(i == j))).collect())
        .collect();
    for _ in 0..12 {
        match rng.gen_range(0..3) {
            0 => {
                // shear: row_j += k * row_i
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if n > 1 {
                    while j == i {
                        j = rng.gen_range(0..n);
                    }
                    let k = BigInt::from(rng.gen_range(-2i64..=2));
                    let source = rows[i].clone();
                    for (c, x) in rows[j].iter_mut().enumerate() {
                        *x += &k * &source[c];
                    }
                }
            }
            1 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                rows.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..n);
                for x in rows[i].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }
    let m = IntMat::from_rows(rows).expect("square");
    assert!(m.is_unimodular(), "construction preserves unimodularity");
    m
}

/// `n! * vol` from the leading finite difference of the lattice-point
/// counting function: a volume oracle independent of all volume code.
pub fn ehrhart_volume(p: &LatticePolytope) -> Rational {
    let n = p.dim();
    let mut vals: Vec<Rational> = (0..=n as u32)
        .map(|d| int(p.lattice_points(d).len() as i64))
        .collect();
    for _ in 0..n {
        vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let mut factorial = int(1);
    for k in 2..=n {
        factorial = factorial * int(k as i64);
    }
    &vals[0] / &factorial
}

/// A random concave PL function: the minimum of up to four affine pieces
/// with small integer gradients and small rational offsets.
pub fn random_concave_pl(rng: &mut ChaCha8Rng, dim: usize) -> PLFunction {
    let count = rng.gen_range(1..=4usize);
    let pieces: Vec<AffinePiece> = (0..count)
        .map(|_| {
            let gradient = RatVec::new(
                (0..dim)
                    .map(|_| rat(rng.gen_range(-3i64..=3), 1))
                    .collect(),
            );
            let offset = rat(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3));
            AffinePiece { gradient, offset }
        })
        .collect();
    PLFunction::new(Mode::Min, pieces).expect("nonempty pieces")
}
