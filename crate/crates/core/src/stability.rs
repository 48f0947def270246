//! Exact integration of piecewise-linear functions over a lattice polytope
//! and its boundary, and the Donaldson-Futaki / Ding invariants of the
//! induced toric test configurations.
//!
//! For a reflexive polytope `P` of dimension `n` and a concave PL function
//! `f` (decreasing direction):
//!
//! ```text
//! DF   = n ( I_P/vol(P) - I_dP/vol(dP) )      Ding = f(0) - I_P/vol(P)
//! ```
//!
//! and for a convex `g` (increasing direction) the signs flip:
//!
//! ```text
//! DF   = n ( -I_P/vol(P) + I_dP/vol(dP) )     Ding = -g(0) + I_P/vol(P)
//! ```
//!
//! where `I_P` and `I_dP` are the integrals over `P` (Lebesgue) and over
//! the boundary (lattice measure `dσ`, realized through lattice-normalized
//! facet charts). In all cases `DF >= Ding`, with equality exactly when the
//! function is radically affine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RatVec;
use crate::plfunc::{is_radically_affine, linearity_cells, Mode, PLFunction};
use crate::polytope::{LatticePolytope, RatPolytope};
use crate::rational::Rational;

/// Filtration direction the test configuration is built from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Decreasing,
    Increasing,
}

/// All quantities entering the invariant formulas, exact.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InvariantReport {
    pub df: Rational,
    pub ding: Rational,
    pub vol_p: Rational,
    pub vol_boundary: Rational,
    pub integral_p: Rational,
    pub integral_boundary: Rational,
    pub direction: Direction,
    pub radically_affine: bool,
}

/// Exact `∫_p f du` for a rational polytope: triangulate each linearity
/// cell and use that an affine function integrates to volume times its
/// value at the barycenter.
pub fn integral_over_rat_polytope(f: &PLFunction, p: &RatPolytope) -> Result<Rational> {
    if f.dim() != p.dim() {
        return Err(Error::Shape(
            "function/polytope dimension mismatch".into(),
        ));
    }
    let mut acc = Rational::zero();
    for (cell, k) in linearity_cells(f, p).cells() {
        let piece = &f.pieces()[*k];
        for s in cell.triangulate() {
            acc += &(s.volume() * piece.eval(&s.barycenter()));
        }
    }
    Ok(acc)
}

/// Exact `∫_P f du` over a lattice polytope.
pub fn integral_over_polytope(f: &PLFunction, p: &LatticePolytope) -> Result<Rational> {
    integral_over_rat_polytope(f, p.as_rational())
}

/// Exact `∫_{∂P} f dσ` with respect to the lattice boundary measure: pull
/// `f` back through each facet's lattice-normalized chart and integrate
/// there. For 1-dimensional polytopes each boundary point contributes its
/// function value.
pub fn integral_over_boundary(f: &PLFunction, p: &LatticePolytope) -> Result<Rational> {
    if f.dim() != p.dim() {
        return Err(Error::Shape(
            "function/polytope dimension mismatch".into(),
        ));
    }
    if p.dim() == 1 {
        let mut acc = Rational::zero();
        for i in 0..p.facets().len() {
            for v in p.as_rational().facet_vertices(i) {
                acc += &f.eval(&v);
            }
        }
        return Ok(acc);
    }
    let mut acc = Rational::zero();
    for i in 0..p.facets().len() {
        let (chart, facet_poly) = p.facet_in_chart(i).expect("dim >= 2");
        let base = RatVec::from_bigints(&chart.base);
        let dirs: Vec<RatVec> = chart
            .dirs
            .iter()
            .map(|d| RatVec::from_bigints(d))
            .collect();
        let trace = f.pullback_affine(&base, &dirs);
        acc += &integral_over_rat_polytope(&trace, facet_poly.as_rational())?;
    }
    Ok(acc)
}

/// Donaldson-Futaki and Ding invariants of the toric test configuration
/// induced by `f` on the reflexive polytope `p`.
///
/// `Decreasing` expects a concave function (Min mode), `Increasing` a
/// convex one (Max mode); affine functions qualify for either direction
/// regardless of the stored mode.
pub fn invariants(
    p: &LatticePolytope,
    f: &PLFunction,
    direction: Direction,
) -> Result<InvariantReport> {
    if f.dim() != p.dim() {
        return Err(Error::Shape(
            "function/polytope dimension mismatch".into(),
        ));
    }
    if !p.is_reflexive() {
        return Err(Error::NotReflexive(
            "invariants are defined for reflexive polytopes".into(),
        ));
    }
    let mode_ok = f.is_affine()
        || match direction {
            Direction::Decreasing => f.mode() == Mode::Min,
            Direction::Increasing => f.mode() == Mode::Max,
        };
    if !mode_ok {
        return Err(Error::ModeMismatch(format!(
            "{:?} direction needs a {} function",
            direction,
            match direction {
                Direction::Decreasing => "concave (min-mode)",
                Direction::Increasing => "convex (max-mode)",
            }
        )));
    }

    let vol_p = p.volume();
    let vol_boundary = p.boundary_volume();
    let integral_p = integral_over_polytope(f, p)?;
    let integral_boundary = integral_over_boundary(f, p)?;
    let n = Rational::from(p.dim() as i64);
    let avg_p = &integral_p / &vol_p;
    let avg_b = &integral_boundary / &vol_boundary;
    let at_origin = f.value_at_origin();
    let (df, ding) = match direction {
        Direction::Decreasing => {
            (&n * &(&avg_p - &avg_b), &at_origin - &avg_p)
        }
        Direction::Increasing => {
            (&n * &(&avg_b - &avg_p), &avg_p - &at_origin)
        }
    };
    let radically_affine = is_radically_affine(f, p.as_rational())?;
    assert!(df >= ding, "invariant violated: df < ding");
    assert_eq!(
        df == ding,
        radically_affine,
        "invariant violated: df = ding must characterize radical affineness"
    );
    Ok(InvariantReport {
        df,
        ding,
        vol_p,
        vol_boundary,
        integral_p,
        integral_boundary,
        direction,
        radically_affine,
    })
}

/// `df - ding`: nonnegative, zero exactly when `f` is radically affine.
pub fn df_ding_gap_witness(
    p: &LatticePolytope,
    f: &PLFunction,
    direction: Direction,
) -> Result<Rational> {
    let rep = invariants(p, f, direction)?;
    Ok(&rep.df - &rep.ding)
}
