//! Filtrations of graded monomial modules under commuting nilpotent
//! derivations.
//!
//! A [`UModule`] is one graded piece of a ring with a unipotent group
//! action, presented by a monomial basis and the infinitesimal generators
//! of the action (pairwise commuting nilpotent matrices). Two canonical
//! filtrations are computed:
//!
//! - the decreasing (Loewy) filtration: step `i` is the span of all
//!   `i`-fold derivative images — the smallest submodule with semisimple
//!   (here: trivial) quotient, iterated;
//! - the increasing (Socle) filtration: step `i` is the joint kernel of
//!   all `(i+1)`-fold products of the generators — the largest submodule
//!   built from invariants, iterated.
//!
//! For section modules of a normalized unique-unipotent-root presentation
//! both filtrations admit closed-form membership tests in terms of the
//! height function, which this module also provides, along with the level
//! function ι (monomial level in the increasing filtration), the induced
//! valuation, and exactness checks of filtration multiplicativity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{RatMat, RatVec};
use crate::polytope::LatticePolytope;
use crate::rational::Rational;
use crate::roots::NormalizedPresentation;

/// Basis element of a graded piece: a character/monomial of degree `d`
/// with its exponent vector (a lattice point of `dP`, or a polynomial
/// exponent).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    pub degree: u32,
    pub exponent: Vec<BigInt>,
}

impl Monomial {
    pub fn new(degree: u32, exponent: Vec<BigInt>) -> Self {
        Monomial { degree, exponent }
    }

    pub fn from_i64(degree: u32, exponent: &[i64]) -> Self {
        Monomial {
            degree,
            exponent: exponent.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    /// Product of same-family monomials: degrees and exponents add.
    pub fn product(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exponent.len(), other.exponent.len());
        Monomial {
            degree: self.degree + other.degree,
            exponent: self
                .exponent
                .iter()
                .zip(&other.exponent)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// One graded piece with its commuting nilpotent derivation action.
#[derive(Clone, Debug)]
pub struct UModule {
    basis: Vec<Monomial>,
    derivations: Vec<RatMat>,
    index: BTreeMap<Vec<BigInt>, usize>,
}

impl UModule {
    /// Validates shape, nilpotency of every derivation, and pairwise
    /// commutativity.
    pub fn new(basis: Vec<Monomial>, derivations: Vec<RatMat>) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty module basis".into()));
        }
        if basis.iter().any(|m| m.degree != basis[0].degree) {
            return Err(Error::InvalidInput(
                "module basis mixes degrees".into(),
            ));
        }
        for d in &derivations {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::Shape(format!(
                    "derivation must be {n} x {n}"
                )));
            }
        }
        for (k, d) in derivations.iter().enumerate() {
            if !is_nilpotent(d) {
                return Err(Error::InvalidUAction(format!(
                    "derivation {k} is not nilpotent"
                )));
            }
        }
        for i in 0..derivations.len() {
            for j in i + 1..derivations.len() {
                let ij = derivations[i].mul(&derivations[j]);
                let ji = derivations[j].mul(&derivations[i]);
                if ij != ji {
                    return Err(Error::InvalidUAction(format!(
                        "derivations {i} and {j} do not commute"
                    )));
                }
            }
        }
        let mut index = BTreeMap::new();
        for (i, m) in basis.iter().enumerate() {
            if index.insert(m.exponent.clone(), i).is_some() {
                return Err(Error::InvalidInput(
                    "duplicate monomial in module basis".into(),
                ));
            }
        }
        Ok(UModule {
            basis,
            derivations,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self) -> u32 {
        self.basis[0].degree
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn derivations(&self) -> &[RatMat] {
        &self.derivations
    }

    pub fn monomial_index(&self, exponent: &[BigInt]) -> Option<usize> {
        self.index.get(exponent).copied()
    }
}

/// `D^e = 0` for some `e`; checked by repeated squaring up to the
/// dimension.
fn is_nilpotent(d: &RatMat) -> bool {
    let n = d.nrows();
    let mut p = d.clone();
    let mut e = 1usize;
    while e < n {
        if p.is_zero() {
            return true;
        }
        p = p.mul(&p);
        e *= 2;
    }
    p.is_zero()
}

/// A subspace of a module's coordinate space, held in reduced row echelon
/// form so equality of subspaces is equality of representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    mat: RatMat, // rref, no zero rows
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_rows(rows: Vec<RatVec>, ambient: usize) -> Self {
        if rows.is_empty() {
            return Self::zero(ambient);
        }
        let (red, pivots) = RatMat::from_vec_rows(rows, ambient).rref();
        let r = pivots.len();
        let kept: Vec<RatVec> = (0..r)
            .map(|i| RatVec::new(red.row(i).to_vec()))
            .collect();
        Subspace {
            ambient,
            mat: RatMat::from_vec_rows(kept, ambient),
            pivots,
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            mat: RatMat::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            mat: RatMat::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Coordinate subspace spanned by the given basis positions.
    pub fn from_monomial_indices(indices: &[usize], ambient: usize) -> Self {
        let mut sorted: Vec<usize> = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let rows: Vec<RatVec> = sorted.iter().map(|&i| RatVec::unit(ambient, i)).collect();
        Subspace {
            ambient,
            mat: RatMat::from_vec_rows(rows, ambient),
            pivots: sorted,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis_rows(&self) -> Vec<RatVec> {
        (0..self.dim())
            .map(|i| RatVec::new(self.mat.row(i).to_vec()))
            .collect()
    }

    /// Membership by reduction against the echelon basis.
    pub fn contains(&self, v: &RatVec) -> bool {
        assert_eq!(v.dim(), self.ambient);
        let mut w = v.clone();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = w.at(p).clone();
            if !c.is_zero() {
                let row = RatVec::new(self.mat.row(r).to_vec());
                w = w.sub(&row.scale(&c));
            }
        }
        w.is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_rows().iter().all(|r| self.contains(r))
    }

    /// When the subspace is spanned by basis monomials, their positions.
    pub fn monomial_indices(&self) -> Option<Vec<usize>> {
        for r in 0..self.dim() {
            let row = self.mat.row(r);
            for (c, x) in row.iter().enumerate() {
                if c != self.pivots[r] && !x.is_zero() {
                    return None;
                }
            }
        }
        Some(self.pivots.clone())
    }

    /// Image under a matrix acting on coordinates.
    pub fn image(&self, d: &RatMat) -> Subspace {
        self.image_by_transposed(&d.transpose())
    }

    /// Image under the matrix whose transpose is `dt`: `(D v)^T = v^T D^T`
    /// turns the per-vector products into one (sparsity-aware) matrix
    /// product.
    fn image_by_transposed(&self, dt: &RatMat) -> Subspace {
        let b = RatMat::from_vec_rows(self.basis_rows(), self.ambient);
        let prod = b.mul(dt);
        let rows = (0..prod.nrows()).map(|r| prod.row_vec(r)).collect();
        Subspace::from_rows(rows, self.ambient)
    }

    /// Smallest subspace containing both.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::from_rows(rows, self.ambient)
    }
}

/// Which of the two canonical filtrations a table holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FiltrationKind {
    Loewy,
    Socle,
}

/// The finite active range of a filtration, plus the index conventions
/// outside it: the decreasing filtration is full for `i < 0` and zero past
/// its last step; the increasing one is zero for `i < 0` and full past its
/// last step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiltrationTable {
    kind: FiltrationKind,
    ambient: usize,
    steps: Vec<Subspace>,
}

impl FiltrationTable {
    pub fn kind(&self) -> FiltrationKind {
        self.kind
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// The stored steps: Loewy from full down to zero, Socle from the
    /// invariants up to full.
    pub fn active_steps(&self) -> &[Subspace] {
        &self.steps
    }

    pub fn step(&self, i: isize) -> Subspace {
        let k = self.steps.len() as isize;
        match self.kind {
            FiltrationKind::Loewy => {
                if i < 0 {
                    Subspace::full(self.ambient)
                } else if i >= k {
                    Subspace::zero(self.ambient)
                } else {
                    self.steps[i as usize].clone()
                }
            }
            FiltrationKind::Socle => {
                if i < 0 {
                    Subspace::zero(self.ambient)
                } else if i >= k {
                    Subspace::full(self.ambient)
                } else {
                    self.steps[i as usize].clone()
                }
            }
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }

    /// Replace one stored step (used by negative-control tests that
    /// corrupt a table on purpose).
    pub fn override_step(&mut self, i: usize, s: Subspace) {
        assert_eq!(s.ambient(), self.ambient);
        self.steps[i] = s;
    }

    /// Level of a basis monomial: for the increasing filtration the first
    /// step containing it, for the decreasing one the last.
    pub fn level_of_basis_monomial(&self, index: usize) -> isize {
        let v = RatVec::unit(self.ambient, index);
        match self.kind {
            FiltrationKind::Socle => {
                for (i, s) in self.steps.iter().enumerate() {
                    if s.contains(&v) {
                        return i as isize;
                    }
                }
                self.steps.len() as isize
            }
            FiltrationKind::Loewy => {
                for (i, s) in self.steps.iter().enumerate().rev() {
                    if s.contains(&v) {
                        return i as isize;
                    }
                }
                -1
            }
        }
    }
}

/// Decreasing filtration by iterated derivation images: step 0 is the
/// whole module, step `i` the span of `{D w : w in step i-1}` over all
/// generators. Terminates at zero.
pub fn loewy_filtration(m: &UModule) -> FiltrationTable {
    let n = m.dim();
    let transposed: Vec<RatMat> =
        m.derivations().iter().map(RatMat::transpose).collect();
    let mut steps = vec![Subspace::full(n)];
    loop {
        let last = steps.last().expect("nonempty");
        if last.dim() == 0 {
            break;
        }
        let mut next = Subspace::zero(n);
        for dt in &transposed {
            next = next.sum(&last.image_by_transposed(dt));
        }
        assert!(
            next.dim() < last.dim(),
            "nilpotent actions strictly shrink each Loewy step"
        );
        steps.push(next);
    }
    FiltrationTable {
        kind: FiltrationKind::Loewy,
        ambient: n,
        steps,
    }
}

/// Increasing filtration by iterated joint kernels: step `i` is the
/// common kernel of every product of `i+1` generators. Terminates at the
/// full module.
pub fn socle_filtration(m: &UModule) -> FiltrationTable {
    let n = m.dim();
    let gens = m.derivations();
    let mut steps: Vec<Subspace> = Vec::new();
    // products of the current total degree, one matrix per exponent
    // multiset (generators commute)
    let mut products: BTreeMap<Vec<u32>, RatMat> = BTreeMap::new();
    if !gens.is_empty() {
        for (k, d) in gens.iter().enumerate() {
            let mut exp = vec![0u32; gens.len()];
            exp[k] = 1;
            products.insert(exp, d.clone());
        }
    }
    loop {
        // current step index i: products have degree i+1
        let step = joint_kernel(&products, n);
        let full = step.dim() == n;
        steps.push(step);
        if full {
            break;
        }
        assert!(
            steps.len() <= n,
            "commuting nilpotent actions reach the full module within dim steps"
        );
        // advance products one degree
        let mut next: BTreeMap<Vec<u32>, RatMat> = BTreeMap::new();
        for (exp, mat) in &products {
            for (k, d) in gens.iter().enumerate() {
                let mut e = exp.clone();
                e[k] += 1;
                next.entry(e).or_insert_with(|| d.mul(mat));
            }
        }
        products = next;
    }
    FiltrationTable {
        kind: FiltrationKind::Socle,
        ambient: n,
        steps,
    }
}

fn joint_kernel(products: &BTreeMap<Vec<u32>, RatMat>, n: usize) -> Subspace {
    if products.is_empty() {
        return Subspace::full(n);
    }
    let mut stacked = RatMat::zeros(products.len() * n, n);
    for (block, mat) in products.values().enumerate() {
        for r in 0..n {
            for c in 0..n {
                if !mat.at(r, c).is_zero() {
                    *stacked.at_mut(block * n + r, c) = mat.at(r, c).clone();
                }
            }
        }
    }
    Subspace::from_rows(stacked.kernel(), n)
}

/// Graded piece `R_d` of the section ring of a normalized presentation:
/// basis are the lattice points of the `d`-th dilate, and the unipotent
/// generator acts fiberwise by `D χ_(u',l) = (l+d) χ_(u',l-1)`.
pub fn section_module(np: &NormalizedPresentation, d: u32) -> UModule {
    let n = np.transformed.dim();
    let points = np.transformed.lattice_points(d);
    let basis: Vec<Monomial> = points
        .iter()
        .map(|p| Monomial::new(d, p.clone()))
        .collect();
    let index: BTreeMap<&[BigInt], usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    let mut der = RatMat::zeros(points.len(), points.len());
    let d_big = BigInt::from(d);
    for (j, p) in points.iter().enumerate() {
        let coeff = &p[n - 1] + &d_big; // l + d
        if coeff.is_zero() {
            continue; // bottom of the fiber
        }
        let mut target = p.clone();
        target[n - 1] -= 1;
        let i = index
            .get(target.as_slice())
            .expect("fibers over a product presentation are contiguous");
        *der.at_mut(*i, j) = Rational::from_integer(coeff);
    }
    UModule::new(basis, vec![der]).expect("fiberwise shift action is nilpotent")
}

/// A family of polynomial monomial modules: monomials in `num_vars`
/// variables of total degree `degree_scale * d`, with per-variable
/// exponent caps `cap * d`, acted on by derivations `x_to d/dx_from`.
#[derive(Clone, Debug)]
pub struct PolynomialAction {
    pub num_vars: usize,
    pub degree_scale: u32,
    pub var_caps: Vec<Option<u32>>,
    pub rules: Vec<DerivationRule>,
}

/// The derivation `x_{to} * d/dx_{from}`.
#[derive(Clone, Copy, Debug)]
pub struct DerivationRule {
    pub from_var: usize,
    pub to_var: usize,
}

/// Anticanonical graded pieces of the two-point blowup of the projective
/// plane (the degree-7 del Pezzo surface): monomials `X^a Y^b Z^(3d-a-b)`
/// with `0 <= a,b <= 2d`, acted on by `Z d/dX` and `Z d/dY`.
pub fn degree7_del_pezzo_action() -> PolynomialAction {
    PolynomialAction {
        num_vars: 3,
        degree_scale: 3,
        var_caps: vec![Some(2), Some(2), None],
        rules: vec![
            DerivationRule {
                from_var: 0,
                to_var: 2,
            },
            DerivationRule {
                from_var: 1,
                to_var: 2,
            },
        ],
    }
}

/// Binary forms of degree `d` under the single lowering operator
/// `Y d/dX`: one Jordan chain of full length.
pub fn jordan_chain_action() -> PolynomialAction {
    PolynomialAction {
        num_vars: 2,
        degree_scale: 1,
        var_caps: vec![None, None],
        rules: vec![DerivationRule {
            from_var: 0,
            to_var: 1,
        }],
    }
}

/// Build the degree-`d` piece of a polynomial action.
pub fn polynomial_module(action: &PolynomialAction, d: u32) -> Result<UModule> {
    if action.num_vars == 0 || action.var_caps.len() != action.num_vars {
        return Err(Error::Shape(
            "variable caps must match the variable count".into(),
        ));
    }
    for rule in &action.rules {
        if rule.from_var >= action.num_vars || rule.to_var >= action.num_vars {
            return Err(Error::InvalidInput(
                "derivation rule names an unknown variable".into(),
            ));
        }
    }
    let total = action.degree_scale * d;
    let caps: Vec<Option<u32>> = action.var_caps.iter().map(|c| c.map(|k| k * d)).collect();
    let mut exponents: Vec<Vec<u32>> = Vec::new();
    enumerate_exponents(&caps, total, 0, &mut Vec::new(), &mut exponents);
    if exponents.is_empty() {
        return Err(Error::InvalidInput(
            "no monomials satisfy the degree constraints".into(),
        ));
    }
    let basis: Vec<Monomial> = exponents
        .iter()
        .map(|e| Monomial::new(d, e.iter().map(|&x| BigInt::from(x)).collect()))
        .collect();
    let index: BTreeMap<&Vec<u32>, usize> = exponents
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let m = basis.len();
    let mut derivations = Vec::new();
    for rule in &action.rules {
        let mut der = RatMat::zeros(m, m);
        for (j, e) in exponents.iter().enumerate() {
            let a = e[rule.from_var];
            if a == 0 {
                continue;
            }
            let mut target = e.clone();
            target[rule.from_var] -= 1;
            target[rule.to_var] += 1;
            if let Some(cap) = caps[rule.to_var] {
                if target[rule.to_var] > cap {
                    return Err(Error::InvalidUAction(
                        "derivation image leaves the truncated monomial basis".into(),
                    ));
                }
            }
            let i = index
                .get(&target)
                .expect("degree and caps were checked above");
            *der.at_mut(*i, j) = Rational::from(a as i64);
        }
        derivations.push(der);
    }
    UModule::new(basis, derivations)
}

fn enumerate_exponents(
    caps: &[Option<u32>],
    remaining: u32,
    var: usize,
    prefix: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if var == caps.len() - 1 {
        if caps[var].is_none_or(|c| remaining <= c) {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    let hi = caps[var].map_or(remaining, |c| c.min(remaining));
    for a in 0..=hi {
        prefix.push(a);
        enumerate_exponents(caps, remaining - a, var + 1, prefix, out);
        prefix.pop();
    }
}

/// `d * h(u'/d)` for a lattice point's base part, exact.
fn scaled_height(np: &NormalizedPresentation, u_base: &[BigInt], d: u32) -> Rational {
    // d*(<g, u'/d> + c) = <g, u'> + d*c for each piece; same min structure
    let u = RatVec::from_bigints(u_base);
    let d_rat = Rational::from(d as i64);
    np.height
        .pieces()
        .iter()
        .map(|p| p.gradient.dot(&u) + &(&p.offset * &d_rat))
        .reduce(Rational::min)
        .expect("height has pieces")
}

/// Closed-form membership tables for section modules: a monomial
/// `(u', l)` of degree `d` lies in decreasing step `i` iff
/// `l <= floor(d h(u'/d)) - i`, and in increasing step `i` iff
/// `l <= i - d`.
pub fn closed_form_membership(
    np: &NormalizedPresentation,
    d: u32,
    kind: FiltrationKind,
) -> FiltrationTable {
    let module = section_module(np, d);
    let n = np.transformed.dim();
    let ambient = module.dim();
    // per-monomial level: Loewy floor(d h) - l, Socle l + d
    let levels: Vec<BigInt> = module
        .basis()
        .iter()
        .map(|m| {
            let l = &m.exponent[n - 1];
            match kind {
                FiltrationKind::Loewy => {
                    scaled_height(np, &m.exponent[..n - 1], d).floor_int() - l
                }
                FiltrationKind::Socle => l + BigInt::from(d),
            }
        })
        .collect();
    let mut steps = Vec::new();
    let mut i = BigInt::zero();
    loop {
        let indices: Vec<usize> = levels
            .iter()
            .enumerate()
            .filter(|(_, lev)| match kind {
                FiltrationKind::Loewy => **lev >= i,  // i <= level
                FiltrationKind::Socle => **lev <= i,  // level <= i
            })
            .map(|(j, _)| j)
            .collect();
        let step = Subspace::from_monomial_indices(&indices, ambient);
        let done = match kind {
            FiltrationKind::Loewy => step.dim() == 0,
            FiltrationKind::Socle => step.dim() == ambient,
        };
        steps.push(step);
        if done {
            break;
        }
        i += BigInt::one();
    }
    FiltrationTable {
        kind,
        ambient,
        steps,
    }
}

/// Whether `point` is a lattice point of the `d`-th dilate.
fn in_dilate(p: &LatticePolytope, point: &[BigInt], d: u32) -> bool {
    if point.len() != p.dim() {
        return false;
    }
    let d_big = BigInt::from(d);
    p.facets().iter().enumerate().all(|(i, f)| {
        let v: BigInt = f.normal.iter().zip(point).map(|(a, x)| a * x).sum();
        v >= p.facet_rhs_int(i) * &d_big
    })
}

/// Level of a section monomial in the increasing filtration of its graded
/// piece: `ι(χ^(d,(u',l))) = l + d`. Errors when the exponent is not a
/// lattice point of `dP`.
pub fn iota(np: &NormalizedPresentation, mono: &Monomial) -> Result<BigInt> {
    if !in_dilate(&np.transformed, &mono.exponent, mono.degree) {
        return Err(Error::InvalidMonomial(format!(
            "exponent is not a lattice point of the degree-{} dilate",
            mono.degree
        )));
    }
    let n = np.transformed.dim();
    Ok(&mono.exponent[n - 1] + BigInt::from(mono.degree))
}

/// Valuation of the fraction `x/y` of two same-degree section monomials:
/// `v(x/y) = -ι(x) + ι(y)`.
pub fn valuation(
    np: &NormalizedPresentation,
    x: &Monomial,
    y: &Monomial,
) -> Result<BigInt> {
    if x.degree != y.degree {
        return Err(Error::InvalidInput(
            "valuation needs two monomials of the same degree".into(),
        ));
    }
    Ok(-iota(np, x)? + iota(np, y)?)
}

/// Modules and filtration tables for every degree `1..=max_degree` of one
/// graded family.
#[derive(Clone, Debug)]
pub struct GradedModuleFamily {
    kind: FiltrationKind,
    entries: BTreeMap<u32, (UModule, FiltrationTable)>,
}

impl GradedModuleFamily {
    pub fn kind(&self) -> FiltrationKind {
        self.kind
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.entries.keys().copied().collect()
    }

    pub fn entry(&self, d: u32) -> &(UModule, FiltrationTable) {
        &self.entries[&d]
    }

    /// Corrupt one stored step (negative-control hook for tests).
    pub fn override_step(&mut self, d: u32, i: usize, s: Subspace) {
        self.entries
            .get_mut(&d)
            .expect("degree present")
            .1
            .override_step(i, s);
    }
}

/// Build a family from section modules of a normalized presentation.
pub fn family_from_sections(
    np: &NormalizedPresentation,
    kind: FiltrationKind,
    max_degree: u32,
) -> GradedModuleFamily {
    let mut entries = BTreeMap::new();
    for d in 1..=max_degree {
        let m = section_module(np, d);
        let table = match kind {
            FiltrationKind::Loewy => loewy_filtration(&m),
            FiltrationKind::Socle => socle_filtration(&m),
        };
        entries.insert(d, (m, table));
    }
    GradedModuleFamily { kind, entries }
}

/// Build a family from a polynomial action.
pub fn family_from_action(
    action: &PolynomialAction,
    kind: FiltrationKind,
    max_degree: u32,
) -> Result<GradedModuleFamily> {
    let mut entries = BTreeMap::new();
    for d in 1..=max_degree {
        let m = polynomial_module(action, d)?;
        let table = match kind {
            FiltrationKind::Loewy => loewy_filtration(&m),
            FiltrationKind::Socle => socle_filtration(&m),
        };
        entries.insert(d, (m, table));
    }
    Ok(GradedModuleFamily { kind, entries })
}

/// Outcome of a filtration product check.
#[derive(Clone, Debug)]
pub enum ProductCheck {
    Holds,
    Fails(Box<ProductWitness>),
}

impl ProductCheck {
    pub fn holds(&self) -> bool {
        matches!(self, ProductCheck::Holds)
    }
}

/// A concrete failing product: `x` at level `i` times `y` at level `j`
/// landing outside the expected step `i+j`.
#[derive(Clone, Debug)]
pub struct ProductWitness {
    pub x: Monomial,
    pub y: Monomial,
    pub x_level: isize,
    pub y_level: isize,
    pub product: Monomial,
    pub product_level: isize,
}

/// Verify multiplicativity of the filtration across the family: for the
/// increasing kind, step_i(d1) * step_j(d2) must land in step_{i+j}(d1+d2)
/// (equivalently, monomial levels are subadditive); for the decreasing
/// kind levels must be superadditive. Checks every monomial pair with
/// `d1 + d2` inside the family.
pub fn check_products(family: &GradedModuleFamily) -> ProductCheck {
    let degrees = family.degrees();
    let &max = degrees.last().expect("nonempty family");
    // basis levels are queried once per pair member; compute each degree's
    // level vector up front
    let levels: BTreeMap<u32, Vec<isize>> = degrees
        .iter()
        .map(|&d| {
            let (m, t) = family.entry(d);
            let v = (0..m.dim())
                .map(|i| t.level_of_basis_monomial(i))
                .collect();
            (d, v)
        })
        .collect();
    for &d1 in &degrees {
        for &d2 in &degrees {
            if d1 > d2 || d1 + d2 > max {
                continue;
            }
            let (m1, _) = family.entry(d1);
            let (m2, _) = family.entry(d2);
            let (m12, _) = family.entry(d1 + d2);
            let (l1, l2, l12) =
                (&levels[&d1], &levels[&d2], &levels[&(d1 + d2)]);
            for (i1, x) in m1.basis().iter().enumerate() {
                let lx = l1[i1];
                for (i2, y) in m2.basis().iter().enumerate() {
                    let ly = l2[i2];
                    let prod = x.product(y);
                    let ip = m12
                        .monomial_index(&prod.exponent)
                        .expect("monomial families are closed under products");
                    let lp = l12[ip];
                    let ok = match family.kind() {
                        FiltrationKind::Socle => lp <= lx + ly,
                        FiltrationKind::Loewy => lp >= lx + ly,
                    };
                    if !ok {
                        return ProductCheck::Fails(Box::new(ProductWitness {
                            x: x.clone(),
                            y: y.clone(),
                            x_level: lx,
                            y_level: ly,
                            product: prod,
                            product_level: lp,
                        }));
                    }
                }
            }
        }
    }
    ProductCheck::Holds
}

/// Multiplicativity of the increasing filtration of the section ring up
/// to total degree `max_degree`.
pub fn check_multiplicative(
    np: &NormalizedPresentation,
    max_degree: u32,
) -> ProductCheck {
    check_products(&family_from_sections(np, FiltrationKind::Socle, max_degree))
}

/// The analogous product check for the decreasing filtration (observed,
/// not asserted: callers decide what to conclude).
pub fn check_loewy_products(
    np: &NormalizedPresentation,
    max_degree: u32,
) -> ProductCheck {
    check_products(&family_from_sections(np, FiltrationKind::Loewy, max_degree))
}

/// Jordan block sizes of a nilpotent matrix, descending, via the rank
/// sequence of its powers.
pub fn jordan_block_sizes(d: &RatMat) -> Vec<usize> {
    let n = d.nrows();
    assert_eq!(n, d.ncols());
    // ranks[k] = rank(d^k); blocks of size >= k number ranks[k-1]-ranks[k]
    let mut ranks = vec![n];
    let mut p = RatMat::identity(n);
    while *ranks.last().expect("nonempty") > 0 {
        assert!(ranks.len() <= n + 1, "matrix is not nilpotent");
        p = p.mul(d);
        ranks.push(p.rank());
    }
    let mut sizes = Vec::new();
    for k in 1..ranks.len() {
        let ge_k = ranks[k - 1] - ranks[k];
        let ge_k1 = if k + 1 < ranks.len() {
            ranks[k] - ranks[k + 1]
        } else {
            0
        };
        for _ in 0..ge_k.saturating_sub(ge_k1) {
            sizes.push(k);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    debug_assert_eq!(sizes.iter().sum::<usize>(), n);
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::roots::normalize_unique_unipotent;

    fn pentagon_np() -> NormalizedPresentation {
        normalize_unique_unipotent(&crate::polytope::tests::pentagon()).unwrap()
    }

    fn prism_np() -> NormalizedPresentation {
        normalize_unique_unipotent(&crate::stability::tests::prism_over_quad()).unwrap()
    }

    fn hexagon_roof_np() -> NormalizedPresentation {
        normalize_unique_unipotent(&crate::roots::tests::hexagon_roof()).unwrap()
    }

    #[test]
    fn pentagon_section_module_structure() {
        let np = pentagon_np();
        let m = section_module(&np, 1);
        assert_eq!(m.dim(), 7);
        let d = &m.derivations()[0];
        // fiber over u' = 0 is l = -1, 0, 1 with D X_l = (l+1) X_{l-1}
        let idx = |x: i64, t: i64| m.monomial_index(&[x.into(), t.into()]).unwrap();
        assert_eq!(*d.at(idx(0, 0), idx(0, 1)), int(2));
        assert_eq!(*d.at(idx(0, -1), idx(0, 0)), int(1));
        // bottom of each fiber maps to zero: column of (0,-1) is zero
        for r in 0..m.dim() {
            assert!(d.at(r, idx(0, -1)).is_zero());
        }
        // no action across fibers
        assert!(d.at(idx(0, 0), idx(1, 0)).is_zero());
    }

    #[test]
    fn degree_zero_module_is_trivial() {
        let np = pentagon_np();
        let m = section_module(&np, 0);
        assert_eq!(m.dim(), 1);
        assert!(m.derivations()[0].is_zero());
        let loewy = loewy_filtration(&m);
        assert_eq!(loewy.dims(), vec![1, 0]);
        let socle = socle_filtration(&m);
        assert_eq!(socle.dims(), vec![1]);
    }

    #[test]
    fn prism_fiber_lengths() {
        let np = prism_np();
        let m = section_module(&np, 1);
        assert_eq!(m.dim(), 23);
        // fiber over u' = (0,1): l in {-1, 0, 1}
        for l in [-1i64, 0, 1] {
            assert!(m.monomial_index(&[0.into(), 1.into(), l.into()]).is_some());
        }
        assert!(m.monomial_index(&[0.into(), 1.into(), 2.into()]).is_none());
        // Jordan blocks match the fiber lengths: five fibers of length 3
        // (y >= 0) and four of length 2 (y = -1)
        assert_eq!(
            jordan_block_sizes(&m.derivations()[0]),
            vec![3, 3, 3, 3, 3, 2, 2, 2, 2]
        );
    }

    #[test]
    fn pentagon_jordan_blocks() {
        let np = pentagon_np();
        let m = section_module(&np, 1);
        assert_eq!(jordan_block_sizes(&m.derivations()[0]), vec![3, 2, 2]);
    }

    #[test]
    fn polynomial_module_basics() {
        let action = degree7_del_pezzo_action();
        let m = polynomial_module(&action, 1).unwrap();
        assert_eq!(m.dim(), 8);
        // D_alpha(X^2 Z) = 2 X Z^2
        let d_alpha = &m.derivations()[0];
        let from = m
            .monomial_index(&[2.into(), 0.into(), 1.into()])
            .unwrap();
        let to = m
            .monomial_index(&[1.into(), 0.into(), 2.into()])
            .unwrap();
        assert_eq!(*d_alpha.at(to, from), int(2));
        // commutativity at d=2 is validated during construction
        assert!(polynomial_module(&action, 2).is_ok());
    }

    #[test]
    fn invalid_actions_are_rejected() {
        // X d/dX is diagonal, not nilpotent
        let diagonal = PolynomialAction {
            num_vars: 2,
            degree_scale: 1,
            var_caps: vec![None, None],
            rules: vec![DerivationRule {
                from_var: 0,
                to_var: 0,
            }],
        };
        assert!(matches!(
            polynomial_module(&diagonal, 2),
            Err(Error::InvalidUAction(_))
        ));
        // Y d/dX and X d/dY do not commute
        let non_commuting = PolynomialAction {
            num_vars: 2,
            degree_scale: 1,
            var_caps: vec![None, None],
            rules: vec![
                DerivationRule {
                    from_var: 0,
                    to_var: 1,
                },
                DerivationRule {
                    from_var: 1,
                    to_var: 0,
                },
            ],
        };
        assert!(matches!(
            polynomial_module(&non_commuting, 2),
            Err(Error::InvalidUAction(_))
        ));
        // capped target variable: X d/dY on a basis capping X
        let leaky = PolynomialAction {
            num_vars: 2,
            degree_scale: 2,
            var_caps: vec![Some(1), None],
            rules: vec![DerivationRule {
                from_var: 1,
                to_var: 0,
            }],
        };
        assert!(matches!(
            polynomial_module(&leaky, 1),
            Err(Error::InvalidUAction(_))
        ));
    }

    #[test]
    fn jordan_chain_filtrations() {
        // binary quintics: one chain; decreasing steps drop the top
        // exponent, increasing steps add from the bottom
        let m = polynomial_module(&jordan_chain_action(), 5).unwrap();
        assert_eq!(m.dim(), 6);
        assert_eq!(jordan_block_sizes(&m.derivations()[0]), vec![6]);
        let loewy = loewy_filtration(&m);
        assert_eq!(loewy.dims(), vec![6, 5, 4, 3, 2, 1, 0]);
        let socle = socle_filtration(&m);
        assert_eq!(socle.dims(), vec![1, 2, 3, 4, 5, 6]);
        // the decreasing step i is span{X^k Y^(5-k) : k <= 5-i}
        for i in 0..=6isize {
            let s = loewy.step(i);
            for (j, mono) in m.basis().iter().enumerate() {
                let k: i64 = (&mono.exponent[0]).try_into().unwrap();
                assert_eq!(
                    s.contains(&RatVec::unit(6, j)),
                    k <= 5 - i as i64,
                    "step {i}, monomial X^{k}"
                );
            }
        }
        // the increasing step i is span{X^k Y^(5-k) : k <= i}
        for i in 0..=5isize {
            let s = socle.step(i);
            for (j, mono) in m.basis().iter().enumerate() {
                let k: i64 = (&mono.exponent[0]).try_into().unwrap();
                assert_eq!(s.contains(&RatVec::unit(6, j)), k <= i as i64);
            }
        }
    }

    #[test]
    fn zero_derivation_module_filtrations() {
        let basis = vec![
            Monomial::from_i64(1, &[0]),
            Monomial::from_i64(1, &[1]),
        ];
        let m = UModule::new(basis, vec![RatMat::zeros(2, 2)]).unwrap();
        assert_eq!(loewy_filtration(&m).dims(), vec![2, 0]);
        assert_eq!(socle_filtration(&m).dims(), vec![2]);
    }

    #[test]
    fn del_pezzo_closed_forms_and_shift() {
        let action = degree7_del_pezzo_action();
        for d in 1..=3u32 {
            let m = polynomial_module(&action, d).unwrap();
            let loewy = loewy_filtration(&m);
            let socle = socle_filtration(&m);
            let n = m.dim();
            let three_d = (3 * d) as isize;
            // decreasing: a+b <= 3d - i; increasing: a+b <= min(i, 3d)
            for i in -1..=(three_d + 1) {
                let expected_loewy: Vec<usize> = m
                    .basis()
                    .iter()
                    .enumerate()
                    .filter(|(_, mono)| {
                        let ab = &mono.exponent[0] + &mono.exponent[1];
                        ab <= BigInt::from(three_d - i)
                    })
                    .map(|(j, _)| j)
                    .collect();
                assert_eq!(
                    loewy.step(i),
                    Subspace::from_monomial_indices(&expected_loewy, n),
                    "degree {d} decreasing step {i}"
                );
                let expected_socle: Vec<usize> = m
                    .basis()
                    .iter()
                    .enumerate()
                    .filter(|(_, mono)| {
                        let ab = &mono.exponent[0] + &mono.exponent[1];
                        ab <= BigInt::from(i.min(three_d)) && i >= 0
                    })
                    .map(|(j, _)| j)
                    .collect();
                assert_eq!(
                    socle.step(i),
                    Subspace::from_monomial_indices(&expected_socle, n),
                    "degree {d} increasing step {i}"
                );
                // shift relation between the two filtrations
                assert_eq!(socle.step(i), loewy.step(three_d - i));
            }
        }
    }

    #[test]
    fn del_pezzo_dimension_table() {
        let m = polynomial_module(&degree7_del_pezzo_action(), 1).unwrap();
        assert_eq!(loewy_filtration(&m).dims(), vec![8, 6, 3, 1, 0]);
        assert_eq!(socle_filtration(&m).dims(), vec![1, 3, 6, 8]);
    }

    #[test]
    fn engine_matches_closed_form_on_sections() {
        for np in [pentagon_np(), prism_np(), hexagon_roof_np()] {
            for d in 0..=2u32 {
                let m = section_module(&np, d);
                assert_eq!(
                    loewy_filtration(&m),
                    closed_form_membership(&np, d, FiltrationKind::Loewy),
                    "decreasing tables at degree {d}"
                );
                assert_eq!(
                    socle_filtration(&m),
                    closed_form_membership(&np, d, FiltrationKind::Socle),
                    "increasing tables at degree {d}"
                );
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let np = pentagon_np();
        let socle = closed_form_membership(&np, 1, FiltrationKind::Socle);
        let m = section_module(&np, 1);
        // step 0: the three monomials at the bottom l = -1
        let step0 = socle.step(0);
        assert_eq!(step0.dim(), 3);
        let expected: Vec<usize> = [(-1i64, -1i64), (0, -1), (1, -1)]
            .iter()
            .map(|&(x, t)| m.monomial_index(&[x.into(), t.into()]).unwrap())
            .collect();
        assert_eq!(step0, Subspace::from_monomial_indices(&expected, 7));
        // large increasing index: everything; negative decreasing: everything
        assert_eq!(socle.step(100).dim(), 7);
        let loewy = closed_form_membership(&np, 1, FiltrationKind::Loewy);
        assert_eq!(loewy.step(-1).dim(), 7);
        assert_eq!(loewy.step(-100).dim(), 7);
    }

    #[test]
    fn filtration_steps_are_derivation_stable() {
        for np in [pentagon_np(), prism_np()] {
            let m = section_module(&np, 2);
            let loewy = loewy_filtration(&m);
            let socle = socle_filtration(&m);
            for d in m.derivations() {
                for (i, s) in socle.active_steps().iter().enumerate() {
                    assert!(s.contains_subspace(&s.image(d)), "socle step {i}");
                }
                for i in 1..loewy.active_steps().len() {
                    let prev = &loewy.active_steps()[i - 1];
                    assert!(loewy.active_steps()[i].contains_subspace(&prev.image(d)));
                }
            }
        }
    }

    #[test]
    fn iota_and_valuation() {
        let np = pentagon_np();
        // level of the monomial at (0,-1), degree 1: l + d = 0
        assert_eq!(
            iota(&np, &Monomial::from_i64(1, &[0, -1])).unwrap(),
            BigInt::zero()
        );
        // every bottom-facet monomial has level 0
        for x in -2i64..=2 {
            assert_eq!(
                iota(&np, &Monomial::from_i64(2, &[x, -2])).unwrap(),
                BigInt::zero()
            );
        }
        assert!(matches!(
            iota(&np, &Monomial::from_i64(1, &[5, 5])),
            Err(Error::InvalidMonomial(_))
        ));
        // valuation examples
        let x = Monomial::from_i64(1, &[0, 1]);
        let y = Monomial::from_i64(1, &[0, -1]);
        assert_eq!(valuation(&np, &x, &y).unwrap(), BigInt::from(-2));
        assert_eq!(valuation(&np, &x, &x).unwrap(), BigInt::zero());
        assert!(matches!(
            valuation(&np, &x, &Monomial::from_i64(2, &[0, -2])),
            Err(Error::InvalidInput(_))
        ));
        // well-definedness across equivalent representatives: x/y vs x²/(xy)
        let xx = x.product(&x);
        let xy = x.product(&y);
        assert_eq!(
            valuation(&np, &xx, &xy).unwrap(),
            valuation(&np, &x, &y).unwrap()
        );
    }

    #[test]
    fn iota_is_additive_on_products() {
        let np = prism_np();
        let m1 = section_module(&np, 1);
        let m2 = section_module(&np, 2);
        for x in m1.basis() {
            for y in m2.basis() {
                let p = x.product(y);
                assert_eq!(
                    iota(&np, &p).unwrap(),
                    iota(&np, x).unwrap() + iota(&np, y).unwrap()
                );
            }
        }
    }

    #[test]
    fn multiplicativity_holds_on_sections_and_polynomials() {
        for np in [pentagon_np(), hexagon_roof_np()] {
            assert!(check_multiplicative(&np, 4).holds());
            assert!(check_loewy_products(&np, 3).holds());
        }
        let family = family_from_action(
            &degree7_del_pezzo_action(),
            FiltrationKind::Socle,
            3,
        )
        .unwrap();
        assert!(check_products(&family).holds());
    }

    #[test]
    fn corrupted_table_fails_with_witness() {
        let np = pentagon_np();
        let mut family = family_from_sections(&np, FiltrationKind::Socle, 2);
        // drop the product monomial (0,-2) from step 0 at degree 2: the
        // bottom-level product of two bottom-level monomials now violates
        // the containment
        let (m2, _) = family.entry(2);
        let keep: Vec<usize> = m2
            .basis()
            .iter()
            .enumerate()
            .filter(|(_, mono)| {
                mono.exponent[1] == BigInt::from(-2)
                    && mono.exponent[0] != BigInt::zero()
            })
            .map(|(j, _)| j)
            .collect();
        let ambient = m2.dim();
        family.override_step(2, 0, Subspace::from_monomial_indices(&keep, ambient));
        let ProductCheck::Fails(w) = check_products(&family) else {
            panic!("corrupted table must fail the product check");
        };
        assert_eq!(w.product.exponent, vec![BigInt::zero(), BigInt::from(-2)]);
        assert!(w.product_level > w.x_level + w.y_level);
    }
}
