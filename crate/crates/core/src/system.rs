//! The contract every concrete system (Y, d, g) satisfies.
//!
//! A [`System`] packages a compact metric space with a continuous surjection:
//! an exact metric, the map, a complete preimage enumerator over the
//! representable dense subset, a diameter bound, finite nets at any rational
//! resolution, and a modulus-of-continuity witness for iterates of the map.
//! All verification modules are generic over this trait.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use crate::rational::Rational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SystemError {
    /// A point admits preimages outside the representable subset that cannot
    /// be enumerated. Never raised by the shipped systems.
    #[error("preimages of {point} are not representable: {reason}")]
    Unrepresentable { point: String, reason: String },
    #[error("invalid point {input:?} for system {system}: {reason}")]
    InvalidPoint {
        system: String,
        input: String,
        reason: String,
    },
    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),
}

/// The constants (β, K, γ) that parameterize the two local-expansion axioms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AxiomConstants {
    pub beta: Rational,
    pub big_k: u32,
    pub gamma: Rational,
}

impl AxiomConstants {
    pub fn new(beta: Rational, big_k: u32, gamma: Rational) -> Result<Self, SystemError> {
        if !beta.is_positive() {
            return Err(SystemError::InvalidConfig(format!("beta must be > 0, got {beta}")));
        }
        if big_k == 0 {
            return Err(SystemError::InvalidConfig("K must be >= 1".into()));
        }
        if !gamma.is_positive() || gamma >= Rational::one() {
            return Err(SystemError::InvalidConfig(format!(
                "gamma must lie in (0,1), got {gamma}"
            )));
        }
        Ok(AxiomConstants { beta, big_k, gamma })
    }

    /// γ^K, the contraction factor appearing on the right of Axiom 1.
    pub fn gamma_pow_k(&self) -> Rational {
        self.gamma.pow(self.big_k as i64)
    }
}

/// A point of a representable dense subset. The `Ord` impl is the documented
/// total order used by canonical preimage selection: symbol order for words,
/// edge-then-position for the wedge system, component-then-coordinates for the
/// gasket.
pub trait Point: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync {}

impl<T: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync> Point for T {}

pub trait System {
    type Point: Point;

    /// Short stable identifier used in reports.
    fn name(&self) -> &str;

    /// The exact metric d. Symmetric, zero exactly on the diagonal, and
    /// triangle-inequality-clean on every net (tested, not assumed).
    fn metric(&self, x: &Self::Point, y: &Self::Point) -> Rational;

    /// The map g.
    fn apply(&self, x: &Self::Point) -> Self::Point;

    /// The complete set {u : g(u) = y} within the representable subset,
    /// sorted in the canonical point order.
    fn preimages(&self, y: &Self::Point) -> Result<Vec<Self::Point>, SystemError>;

    /// An upper bound for the diameter of Y.
    fn diameter(&self) -> Rational;

    /// A finite h-net of the representable subset at resolution h: every
    /// representable point lies within h of some net point.
    fn net(&self, resolution: &Rational) -> Vec<Self::Point>;

    /// Modulus-of-continuity witness: returns δ_in > 0 such that
    /// d(x, y) <= δ_in implies d(g^k(x), g^k(y)) <= δ_out.
    fn modulus(&self, k: u32, delta_out: &Rational) -> Rational;

    /// Parse a point from its textual notation.
    fn parse_point(&self, s: &str) -> Result<Self::Point, SystemError>;
}

/// g applied k times.
pub fn iterate<S: System>(sys: &S, x: &S::Point, k: u32) -> S::Point {
    let mut p = x.clone();
    for _ in 0..k {
        p = sys.apply(&p);
    }
    p
}

/// The complete set {u : g^k(u) = y} within the representable subset, sorted
/// in canonical order.
pub fn preimages_k<S: System>(
    sys: &S,
    y: &S::Point,
    k: u32,
) -> Result<Vec<S::Point>, SystemError> {
    assert!(k >= 1, "preimages_k requires k >= 1");
    let mut layer = vec![y.clone()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &layer {
            next.extend(sys.preimages(p)?);
        }
        next.sort();
        next.dedup();
        layer = next;
    }
    Ok(layer)
}
