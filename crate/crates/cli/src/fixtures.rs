//! Built-in example inputs with frozen expected values.
//!
//! Each fixture bundles a polytope and/or a polynomial module action with
//! a list of expected quantities. `fixtures run` recomputes every quantity
//! and compares exactly; any mismatch is reported with the expected and
//! actual values side by side.

use std::fmt;

use num_bigint::BigInt;

use torik_core::filtration::{
    check_products, family_from_action, family_from_sections, jordan_block_sizes,
    loewy_filtration, polynomial_module, socle_filtration, degree7_del_pezzo_action,
    jordan_chain_action, FiltrationKind, FiltrationTable, PolynomialAction, UModule,
};
use torik_core::polytope::LatticePolytope;
use torik_core::roots::{
    enumerate_roots, loewy_socle_invariants, normalize_unique_unipotent, LoewySocle,
    NormalizedPresentation, RootKind,
};
use torik_core::{Error, Rational};

/// How an expected value was obtained: quoted from the source results,
/// derived by independent reasoning, or immediate from definitions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Reference,
    Derived,
    Trivial,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Reference => write!(f, "reference"),
            Provenance::Derived => write!(f, "derived"),
            Provenance::Trivial => write!(f, "trivial"),
        }
    }
}

/// An exactly comparable expected/actual value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Ints(Vec<i64>),
    Rat(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", if *b { "yes" } else { "no" }),
            Value::Int(n) => write!(f, "{n}"),
            Value::Ints(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Value::Rat(s) => write!(f, "{s}"),
        }
    }
}

fn rat(s: &str) -> Value {
    Value::Rat(s.to_string())
}

/// A named quantity a fixture freezes. Degree arguments are inclusive
/// upper bounds where a range is checked.
#[derive(Clone, Copy, Debug)]
pub enum Quantity {
    Reflexive,
    VertexCount,
    FacetCount,
    LatticePointCount(u32),
    Volume,
    BoundaryVolume,
    SemisimpleRootCount,
    UnipotentRootCount,
    UnipotentRootPoint,
    LoewyDf,
    LoewyDing,
    SocleDf,
    SocleDing,
    LoewyRadicallyAffine,
    NormalizationUnsupported,
    LoewyDims(u32),
    SocleDims(u32),
    JordanBlocks(u32),
    ShiftRelationHolds(u32),
    EnginesMatchSections(u32),
    SocleMultiplicative(u32),
    SerializationRoundTrip,
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::Reflexive => "reflexive".into(),
            Quantity::VertexCount => "vertex count".into(),
            Quantity::FacetCount => "facet count".into(),
            Quantity::LatticePointCount(d) => format!("lattice points of dilate {d}"),
            Quantity::Volume => "volume".into(),
            Quantity::BoundaryVolume => "boundary volume".into(),
            Quantity::SemisimpleRootCount => "semisimple roots".into(),
            Quantity::UnipotentRootCount => "unipotent roots".into(),
            Quantity::UnipotentRootPoint => "unipotent root".into(),
            Quantity::LoewyDf => "Loewy DF".into(),
            Quantity::LoewyDing => "Loewy Ding".into(),
            Quantity::SocleDf => "Socle DF".into(),
            Quantity::SocleDing => "Socle Ding".into(),
            Quantity::LoewyRadicallyAffine => "Loewy function radically affine".into(),
            Quantity::NormalizationUnsupported => {
                "normalization rejects multiple unipotent roots".into()
            }
            Quantity::LoewyDims(d) => format!("Loewy dims at degree {d}"),
            Quantity::SocleDims(d) => format!("Socle dims at degree {d}"),
            Quantity::JordanBlocks(d) => format!("Jordan blocks at degree {d}"),
            Quantity::ShiftRelationHolds(d) => {
                format!("Socle-Loewy shift relation to degree {d}")
            }
            Quantity::EnginesMatchSections(d) => {
                format!("engine matches closed form to degree {d}")
            }
            Quantity::SocleMultiplicative(d) => {
                format!("Socle multiplicativity to total degree {d}")
            }
            Quantity::SerializationRoundTrip => "serialization round trip".into(),
        }
    }
}

/// One frozen expectation.
#[derive(Clone, Debug)]
pub struct Expected {
    pub quantity: Quantity,
    pub value: Value,
    pub provenance: Provenance,
}

fn exp(quantity: Quantity, value: Value, provenance: Provenance) -> Expected {
    Expected {
        quantity,
        value,
        provenance,
    }
}

/// Closed-form membership key for polynomial-module fixtures: the level
/// of a monomial below the degree-scaled bound.
#[derive(Clone, Copy, Debug)]
pub enum MonomialKey {
    /// sum of the first two exponents (capped-surface modules)
    PairSum,
    /// the first exponent (single-chain modules)
    First,
}

impl MonomialKey {
    pub fn key(&self, exponent: &[BigInt]) -> BigInt {
        match self {
            MonomialKey::PairSum => &exponent[0] + &exponent[1],
            MonomialKey::First => exponent[0].clone(),
        }
    }
}

/// A polynomial module family attached to a fixture, with its closed-form
/// membership rule: decreasing step `i` is `key <= bound - i` and
/// increasing step `i` is `key <= i`, where `bound = degree_scale * d`.
#[derive(Clone, Debug)]
pub struct ActionFixture {
    pub action: PolynomialAction,
    pub key: MonomialKey,
}

impl ActionFixture {
    pub fn bound(&self, d: u32) -> i64 {
        (self.action.degree_scale as i64) * (d as i64)
    }

    /// Basis positions of closed-form step `i`.
    pub fn step_indices(
        &self,
        module: &UModule,
        d: u32,
        kind: FiltrationKind,
        i: isize,
    ) -> Vec<usize> {
        let bound = self.bound(d);
        module
            .basis()
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                let k = self.key.key(&m.exponent);
                match kind {
                    FiltrationKind::Loewy => k <= BigInt::from(bound - i as i64),
                    FiltrationKind::Socle => i >= 0 && k <= BigInt::from(i as i64),
                }
            })
            .map(|(j, _)| j)
            .collect()
    }

    /// Closed-form dimension sequence over the active index range.
    pub fn closed_form_dims(
        &self,
        module: &UModule,
        d: u32,
        kind: FiltrationKind,
    ) -> Vec<usize> {
        let bound = self.bound(d);
        let range: Vec<isize> = match kind {
            FiltrationKind::Loewy => (0..=(bound + 1) as isize).collect(),
            FiltrationKind::Socle => (0..=bound as isize).collect(),
        };
        range
            .into_iter()
            .map(|i| self.step_indices(module, d, kind, i).len())
            .collect()
    }
}

/// A built-in example: a polytope, a polynomial action, or both.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: &'static str,
    pub summary: &'static str,
    pub polytope: Option<LatticePolytope>,
    pub action: Option<ActionFixture>,
    pub expected: Vec<Expected>,
}

fn polytope(vertices: &[&[i64]]) -> LatticePolytope {
    LatticePolytope::from_i64_vertices(vertices).expect("fixture vertices are valid")
}

/// Pentagon surface: the two-dimensional example with one unipotent root.
fn fig2() -> Fixture {
    Fixture {
        id: "paper:fig2",
        summary: "pentagon surface with one unipotent root (dim 2)",
        polytope: Some(polytope(&[
            &[-1, -1],
            &[1, -1],
            &[1, 0],
            &[0, 1],
            &[-1, 0],
        ])),
        action: None,
        expected: vec![
            exp(Quantity::Reflexive, Value::Bool(true), Provenance::Reference),
            exp(Quantity::VertexCount, Value::Int(5), Provenance::Trivial),
            exp(Quantity::FacetCount, Value::Int(5), Provenance::Trivial),
            exp(Quantity::Volume, rat("3"), Provenance::Derived),
            exp(Quantity::BoundaryVolume, rat("6"), Provenance::Derived),
            exp(Quantity::LatticePointCount(1), Value::Int(7), Provenance::Derived),
            exp(Quantity::SemisimpleRootCount, Value::Int(0), Provenance::Derived),
            exp(Quantity::UnipotentRootCount, Value::Int(1), Provenance::Derived),
            exp(
                Quantity::UnipotentRootPoint,
                Value::Ints(vec![0, -1]),
                Provenance::Derived,
            ),
            exp(Quantity::LoewyDf, rat("2/9"), Provenance::Reference),
            exp(Quantity::LoewyDing, rat("2/9"), Provenance::Reference),
            exp(Quantity::SocleDf, rat("-2/9"), Provenance::Reference),
            exp(Quantity::SocleDing, rat("-2/9"), Provenance::Reference),
            exp(
                Quantity::LoewyRadicallyAffine,
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::LoewyDims(1),
                Value::Ints(vec![7, 4, 1, 0]),
                Provenance::Derived,
            ),
            exp(
                Quantity::SocleDims(1),
                Value::Ints(vec![3, 6, 7]),
                Provenance::Derived,
            ),
            exp(
                Quantity::JordanBlocks(1),
                Value::Ints(vec![3, 2, 2]),
                Provenance::Derived,
            ),
            exp(
                Quantity::EnginesMatchSections(3),
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::SocleMultiplicative(4),
                Value::Bool(true),
                Provenance::Reference,
            ),
            exp(
                Quantity::SerializationRoundTrip,
                Value::Bool(true),
                Provenance::Trivial,
            ),
        ],
    }
}

/// Smooth threefold: prism over a quadrilateral; the Loewy configuration
/// has positive DF.
fn smooth3fold() -> Fixture {
    Fixture {
        id: "paper:smooth3fold",
        summary: "smooth threefold whose Loewy configuration does not destabilize (dim 3)",
        polytope: Some(polytope(&[
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
        ])),
        action: None,
        expected: vec![
            exp(Quantity::Reflexive, Value::Bool(true), Provenance::Reference),
            exp(Quantity::FacetCount, Value::Int(7), Provenance::Derived),
            exp(Quantity::Volume, rat("20/3"), Provenance::Reference),
            exp(Quantity::BoundaryVolume, rat("20"), Provenance::Derived),
            exp(Quantity::LatticePointCount(1), Value::Int(23), Provenance::Derived),
            exp(Quantity::SemisimpleRootCount, Value::Int(2), Provenance::Reference),
            exp(Quantity::UnipotentRootCount, Value::Int(1), Provenance::Reference),
            exp(
                Quantity::UnipotentRootPoint,
                Value::Ints(vec![0, 0, -1]),
                Provenance::Reference,
            ),
            exp(Quantity::LoewyDf, rat("21/160"), Provenance::Reference),
            exp(Quantity::LoewyDing, rat("21/160"), Provenance::Reference),
            exp(Quantity::SocleDf, rat("-21/160"), Provenance::Reference),
            exp(Quantity::SocleDing, rat("-21/160"), Provenance::Reference),
            exp(
                Quantity::LoewyRadicallyAffine,
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::JordanBlocks(1),
                Value::Ints(vec![3, 3, 3, 3, 3, 2, 2, 2, 2]),
                Provenance::Derived,
            ),
            exp(
                Quantity::EnginesMatchSections(3),
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::SocleMultiplicative(4),
                Value::Bool(true),
                Provenance::Reference,
            ),
            exp(
                Quantity::SerializationRoundTrip,
                Value::Bool(true),
                Provenance::Trivial,
            ),
        ],
    }
}

/// Singular threefold: hexagon base with a slanted roof; the signs of the
/// two configurations flip relative to the smooth case.
fn sing3fold() -> Fixture {
    Fixture {
        id: "paper:sing3fold",
        summary: "singular threefold whose Loewy configuration destabilizes (dim 3)",
        polytope: Some(polytope(&[
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
        ])),
        action: None,
        expected: vec![
            exp(Quantity::Reflexive, Value::Bool(true), Provenance::Reference),
            exp(Quantity::FacetCount, Value::Int(8), Provenance::Derived),
            exp(Quantity::Volume, rat("16/3"), Provenance::Reference),
            exp(Quantity::BoundaryVolume, rat("16"), Provenance::Derived),
            exp(Quantity::LatticePointCount(1), Value::Int(19), Provenance::Derived),
            exp(Quantity::SemisimpleRootCount, Value::Int(0), Provenance::Derived),
            exp(Quantity::UnipotentRootCount, Value::Int(1), Provenance::Derived),
            exp(
                Quantity::UnipotentRootPoint,
                Value::Ints(vec![0, 0, -1]),
                Provenance::Derived,
            ),
            exp(Quantity::LoewyDf, rat("-9/128"), Provenance::Reference),
            exp(Quantity::LoewyDing, rat("-9/128"), Provenance::Reference),
            exp(Quantity::SocleDf, rat("9/128"), Provenance::Reference),
            exp(Quantity::SocleDing, rat("9/128"), Provenance::Reference),
            exp(
                Quantity::LoewyRadicallyAffine,
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::EnginesMatchSections(3),
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::SocleMultiplicative(4),
                Value::Bool(true),
                Provenance::Reference,
            ),
            exp(
                Quantity::SerializationRoundTrip,
                Value::Bool(true),
                Provenance::Trivial,
            ),
        ],
    }
}

/// Two-point blowup of the projective plane: two unipotent roots, so the
/// filtrations are presented on the polynomial module instead of through
/// the unique-root normalization.
fn degree7_blowup() -> Fixture {
    Fixture {
        id: "paper:degree7-blowup",
        summary: "degree-7 del Pezzo surface, polynomial-module form (two unipotent roots)",
        polytope: Some(polytope(&[
            &[-1, 0],
            &[-1, 1],
            &[0, 1],
            &[2, -1],
            &[0, -1],
        ])),
        action: Some(ActionFixture {
            action: degree7_del_pezzo_action(),
            key: MonomialKey::PairSum,
        }),
        expected: vec![
            exp(Quantity::Reflexive, Value::Bool(true), Provenance::Trivial),
            exp(Quantity::VertexCount, Value::Int(5), Provenance::Trivial),
            exp(Quantity::UnipotentRootCount, Value::Int(2), Provenance::Derived),
            exp(
                Quantity::NormalizationUnsupported,
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::LoewyDims(1),
                Value::Ints(vec![8, 6, 3, 1, 0]),
                Provenance::Reference,
            ),
            exp(
                Quantity::SocleDims(1),
                Value::Ints(vec![1, 3, 6, 8]),
                Provenance::Reference,
            ),
            exp(
                Quantity::ShiftRelationHolds(3),
                Value::Bool(true),
                Provenance::Reference,
            ),
            exp(
                Quantity::SocleMultiplicative(3),
                Value::Bool(true),
                Provenance::Derived,
            ),
            exp(
                Quantity::SerializationRoundTrip,
                Value::Bool(true),
                Provenance::Trivial,
            ),
        ],
    }
}

/// Single Jordan chain: binary forms of degree N under one lowering
/// operator. The two filtrations are the two ends of the same chain.
fn vn_example() -> Fixture {
    Fixture {
        id: "paper:vn-example",
        summary: "single Jordan chain V_N under d/dx (degree = N)",
        polytope: None,
        action: Some(ActionFixture {
            action: jordan_chain_action(),
            key: MonomialKey::First,
        }),
        expected: vec![
            exp(
                Quantity::LoewyDims(5),
                Value::Ints(vec![6, 5, 4, 3, 2, 1, 0]),
                Provenance::Reference,
            ),
            exp(
                Quantity::SocleDims(5),
                Value::Ints(vec![1, 2, 3, 4, 5, 6]),
                Provenance::Reference,
            ),
            exp(
                Quantity::JordanBlocks(5),
                Value::Ints(vec![6]),
                Provenance::Derived,
            ),
            exp(
                Quantity::ShiftRelationHolds(5),
                Value::Bool(true),
                Provenance::Derived,
            ),
        ],
    }
}

/// All built-in fixtures, in listing order.
pub fn all() -> Vec<Fixture> {
    vec![
        fig2(),
        smooth3fold(),
        sing3fold(),
        degree7_blowup(),
        vn_example(),
    ]
}

/// Look up a fixture by id.
pub fn find(id: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.id == id)
}

/// Result of recomputing one expectation.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub fixture: String,
    pub label: String,
    pub provenance: Provenance,
    pub expected: Value,
    pub actual: Result<Value, String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        matches!(&self.actual, Ok(v) if *v == self.expected)
    }
}

fn ints_from_usize(v: &[usize]) -> Value {
    Value::Ints(v.iter().map(|&x| x as i64).collect())
}

fn ints_from_bigints(v: &[BigInt]) -> Value {
    Value::Ints(
        v.iter()
            .map(|x| i64::try_from(x).expect("fixture coordinates are small"))
            .collect(),
    )
}

fn rational_value(r: &Rational) -> Value {
    Value::Rat(r.to_string())
}

/// Lazily computed per-fixture state shared across quantities.
struct Context<'a> {
    fixture: &'a Fixture,
    normalized: Option<Result<NormalizedPresentation, Error>>,
    invariants: Option<Result<LoewySocle, Error>>,
}

impl<'a> Context<'a> {
    fn new(fixture: &'a Fixture) -> Self {
        Context {
            fixture,
            normalized: None,
            invariants: None,
        }
    }

    fn polytope(&self) -> Result<&LatticePolytope, String> {
        self.fixture
            .polytope
            .as_ref()
            .ok_or_else(|| "fixture has no polytope".to_string())
    }

    fn normalized(&mut self) -> Result<&NormalizedPresentation, String> {
        if self.normalized.is_none() {
            let p = self.polytope()?.clone();
            self.normalized = Some(normalize_unique_unipotent(&p));
        }
        self.normalized
            .as_ref()
            .expect("just set")
            .as_ref()
            .map_err(|e| e.to_string())
    }

    fn invariants(&mut self) -> Result<&LoewySocle, String> {
        if self.invariants.is_none() {
            let p = self.polytope()?.clone();
            self.invariants = Some(loewy_socle_invariants(&p));
        }
        self.invariants
            .as_ref()
            .expect("just set")
            .as_ref()
            .map_err(|e| e.to_string())
    }

    fn full_invariants(
        &mut self,
    ) -> Result<&torik_core::roots::LoewySocleInvariants, String> {
        match self.invariants()? {
            LoewySocle::Invariants(inv) => Ok(inv),
            LoewySocle::TrivialFiltrations => {
                Err("filtrations are trivial (no unipotent root)".to_string())
            }
        }
    }

    /// The module at one degree: polynomial action when present,
    /// otherwise the section module of the normalization.
    fn module(&mut self, d: u32) -> Result<UModule, String> {
        if let Some(af) = &self.fixture.action {
            polynomial_module(&af.action, d).map_err(|e| e.to_string())
        } else {
            let np = self.normalized()?;
            Ok(torik_core::filtration::section_module(np, d))
        }
    }

    fn table(&mut self, d: u32, kind: FiltrationKind) -> Result<FiltrationTable, String> {
        let m = self.module(d)?;
        Ok(match kind {
            FiltrationKind::Loewy => loewy_filtration(&m),
            FiltrationKind::Socle => socle_filtration(&m),
        })
    }
}

fn evaluate_quantity(ctx: &mut Context<'_>, q: &Quantity) -> Result<Value, String> {
    match q {
        Quantity::Reflexive => Ok(Value::Bool(ctx.polytope()?.is_reflexive())),
        Quantity::VertexCount => Ok(Value::Int(ctx.polytope()?.vertices().len() as i64)),
        Quantity::FacetCount => Ok(Value::Int(ctx.polytope()?.facets().len() as i64)),
        Quantity::LatticePointCount(d) => {
            Ok(Value::Int(ctx.polytope()?.lattice_points(*d).len() as i64))
        }
        Quantity::Volume => Ok(rational_value(&ctx.polytope()?.volume())),
        Quantity::BoundaryVolume => Ok(rational_value(&ctx.polytope()?.boundary_volume())),
        Quantity::SemisimpleRootCount => {
            let roots = enumerate_roots(ctx.polytope()?).map_err(|e| e.to_string())?;
            Ok(Value::Int(
                roots.iter().filter(|r| r.kind == RootKind::Semisimple).count() as i64,
            ))
        }
        Quantity::UnipotentRootCount => {
            let roots = enumerate_roots(ctx.polytope()?).map_err(|e| e.to_string())?;
            Ok(Value::Int(
                roots.iter().filter(|r| r.kind == RootKind::Unipotent).count() as i64,
            ))
        }
        Quantity::UnipotentRootPoint => {
            let roots = enumerate_roots(ctx.polytope()?).map_err(|e| e.to_string())?;
            let first = roots
                .iter()
                .find(|r| r.kind == RootKind::Unipotent)
                .ok_or_else(|| "no unipotent root".to_string())?;
            Ok(ints_from_bigints(&first.point))
        }
        Quantity::LoewyDf => Ok(rational_value(&ctx.full_invariants()?.loewy.df)),
        Quantity::LoewyDing => Ok(rational_value(&ctx.full_invariants()?.loewy.ding)),
        Quantity::SocleDf => Ok(rational_value(&ctx.full_invariants()?.socle.df)),
        Quantity::SocleDing => Ok(rational_value(&ctx.full_invariants()?.socle.ding)),
        Quantity::LoewyRadicallyAffine => {
            Ok(Value::Bool(ctx.full_invariants()?.loewy.radically_affine))
        }
        Quantity::NormalizationUnsupported => {
            let p = ctx.polytope()?.clone();
            Ok(Value::Bool(matches!(
                normalize_unique_unipotent(&p),
                Err(Error::UnsupportedAutomorphismStructure(_))
            )))
        }
        Quantity::LoewyDims(d) => {
            Ok(ints_from_usize(&ctx.table(*d, FiltrationKind::Loewy)?.dims()))
        }
        Quantity::SocleDims(d) => {
            Ok(ints_from_usize(&ctx.table(*d, FiltrationKind::Socle)?.dims()))
        }
        Quantity::JordanBlocks(d) => {
            let m = ctx.module(*d)?;
            if m.derivations().len() != 1 {
                return Err("Jordan blocks need a single derivation".to_string());
            }
            Ok(ints_from_usize(&jordan_block_sizes(&m.derivations()[0])))
        }
        Quantity::ShiftRelationHolds(max_d) => {
            let af = ctx
                .fixture
                .action
                .as_ref()
                .ok_or_else(|| "shift relation needs a polynomial action".to_string())?
                .clone();
            for d in 1..=*max_d {
                let loewy = ctx.table(d, FiltrationKind::Loewy)?;
                let socle = ctx.table(d, FiltrationKind::Socle)?;
                let bound = af.bound(d) as isize;
                for i in -1..=(bound + 1) {
                    if socle.step(i) != loewy.step(bound - i) {
                        return Ok(Value::Bool(false));
                    }
                }
            }
            Ok(Value::Bool(true))
        }
        Quantity::EnginesMatchSections(max_d) => {
            let np = ctx.normalized()?.clone();
            for d in 0..=*max_d {
                let m = torik_core::filtration::section_module(&np, d);
                for kind in [FiltrationKind::Loewy, FiltrationKind::Socle] {
                    let engine = match kind {
                        FiltrationKind::Loewy => loewy_filtration(&m),
                        FiltrationKind::Socle => socle_filtration(&m),
                    };
                    let closed =
                        torik_core::filtration::closed_form_membership(&np, d, kind);
                    if engine != closed {
                        return Ok(Value::Bool(false));
                    }
                }
            }
            Ok(Value::Bool(true))
        }
        Quantity::SocleMultiplicative(max_d) => {
            let outcome = if let Some(af) = ctx.fixture.action.clone() {
                let family =
                    family_from_action(&af.action, FiltrationKind::Socle, *max_d)
                        .map_err(|e| e.to_string())?;
                check_products(&family)
            } else {
                let np = ctx.normalized()?.clone();
                check_products(&family_from_sections(&np, FiltrationKind::Socle, *max_d))
            };
            Ok(Value::Bool(outcome.holds()))
        }
        Quantity::SerializationRoundTrip => {
            let p = ctx.polytope()?;
            let file = torik_core::io::PolytopeFile::from_polytope(ctx.fixture.id, p)
                .map_err(|e| e.to_string())?;
            let text = serde_json::to_string(&file).map_err(|e| e.to_string())?;
            let back =
                torik_core::io::parse_polytope_json(&text).map_err(|e| e.to_string())?;
            Ok(Value::Bool(back == *p))
        }
    }
}

/// Recompute every expectation of one fixture.
pub fn evaluate(fixture: &Fixture) -> Vec<CheckResult> {
    let mut ctx = Context::new(fixture);
    fixture
        .expected
        .iter()
        .map(|e| CheckResult {
            fixture: fixture.id.to_string(),
            label: e.quantity.label(),
            provenance: e.provenance,
            expected: e.value.clone(),
            actual: evaluate_quantity(&mut ctx, &e.quantity),
        })
        .collect()
}
