//! The wedge of two unit-circumference circles `a` and `b` joined at a point
//! v, with the degree-3/degree-2 interval map: the thirds of `a` traverse
//! a, a, b and the halves of `b` traverse a, b.
//!
//! Points are (edge, position) with rational position in [0, 1); position 0
//! on either edge is the single wedge point v, canonically written `a:0/1`.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::Rational;
use crate::system::{System, SystemError};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Edge {
    A,
    B,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge::A => write!(f, "a"),
            Edge::B => write!(f, "b"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SolenoidPoint {
    edge: Edge,
    position: Rational,
}

impl SolenoidPoint {
    /// Canonical form: position 0 is always on edge a (the wedge point v).
    pub fn new(edge: Edge, position: Rational) -> Self {
        assert!(
            !position.is_negative() && position < Rational::one(),
            "position must lie in [0,1), got {position}"
        );
        if position.is_zero() {
            SolenoidPoint { edge: Edge::A, position }
        } else {
            SolenoidPoint { edge, position }
        }
    }

    pub fn wedge() -> Self {
        SolenoidPoint::new(Edge::A, Rational::zero())
    }

    pub fn edge(&self) -> Edge {
        self.edge
    }

    pub fn position(&self) -> &Rational {
        &self.position
    }

    pub fn is_wedge(&self) -> bool {
        self.position.is_zero()
    }
}

impl fmt::Display for SolenoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.edge, self.position)
    }
}

impl Ord for SolenoidPoint {
    /// Edge then position, the documented canonical order.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edge, &self.position).cmp(&(other.edge, &other.position))
    }
}

impl PartialOrd for SolenoidPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distance around one unit circle.
fn circle_distance(s: &Rational, t: &Rational) -> Rational {
    let diff = (s - t).abs();
    let wrap = Rational::one() - &diff;
    diff.min(wrap)
}

/// Distance from a position to the wedge point along its own circle.
fn to_wedge(s: &Rational) -> Rational {
    s.clone().min(Rational::one() - s)
}

#[derive(Clone, Debug, Default)]
pub struct Solenoid;

impl Solenoid {
    pub fn new() -> Self {
        Solenoid
    }

    /// Smallest k with 3^(-k) <= h; nets live on multiples of 3^(-k).
    pub fn level_for_resolution(resolution: &Rational) -> u32 {
        let third = Rational::new(1, 3);
        let mut k = 0u32;
        let mut v = Rational::one();
        while v > *resolution {
            v = v * third.clone();
            k += 1;
            assert!(k <= 32, "resolution too fine");
        }
        k
    }
}

impl System for Solenoid {
    type Point = SolenoidPoint;

    fn name(&self) -> &str {
        "solenoid"
    }

    /// Shortest path on the wedge: within one circle the circle distance,
    /// across circles the route through v.
    fn metric(&self, x: &SolenoidPoint, y: &SolenoidPoint) -> Rational {
        if x.edge == y.edge {
            circle_distance(&x.position, &y.position)
        } else {
            to_wedge(&x.position) + to_wedge(&y.position)
        }
    }

    fn apply(&self, x: &SolenoidPoint) -> SolenoidPoint {
        let p = &x.position;
        let one = Rational::one();
        match x.edge {
            Edge::A => {
                let third = Rational::new(1, 3);
                let two_thirds = Rational::new(2, 3);
                let three = Rational::integer(3);
                if *p < third {
                    SolenoidPoint::new(Edge::A, &three * p)
                } else if *p < two_thirds {
                    SolenoidPoint::new(Edge::A, &three * p - &one)
                } else {
                    SolenoidPoint::new(Edge::B, &three * p - &Rational::integer(2))
                }
            }
            Edge::B => {
                let half = Rational::new(1, 2);
                let two = Rational::integer(2);
                if *p < half {
                    SolenoidPoint::new(Edge::A, &two * p)
                } else {
                    SolenoidPoint::new(Edge::B, &two * p - &one)
                }
            }
        }
    }

    fn preimages(&self, y: &SolenoidPoint) -> Result<Vec<SolenoidPoint>, SystemError> {
        let p = &y.position;
        let mut out = Vec::new();
        match y.edge {
            Edge::A => {
                // branches of a onto a: t = p/3 and t = (p+1)/3
                out.push(SolenoidPoint::new(Edge::A, p / &Rational::integer(3)));
                out.push(SolenoidPoint::new(
                    Edge::A,
                    (p + &Rational::one()) / &Rational::integer(3),
                ));
                // branch of b onto a: t = p/2
                out.push(SolenoidPoint::new(Edge::B, p / &Rational::integer(2)));
                if y.is_wedge() {
                    // v is also the start of edge b: branches landing there
                    out.push(SolenoidPoint::new(Edge::A, Rational::new(2, 3)));
                    out.push(SolenoidPoint::new(Edge::B, Rational::new(1, 2)));
                }
            }
            Edge::B => {
                // branch of a onto b: t = (p+2)/3
                out.push(SolenoidPoint::new(
                    Edge::A,
                    (p + &Rational::integer(2)) / &Rational::integer(3),
                ));
                // branch of b onto b: t = (p+1)/2
                out.push(SolenoidPoint::new(
                    Edge::B,
                    (p + &Rational::one()) / &Rational::integer(2),
                ));
            }
        }
        debug_assert!(out.iter().all(|u| &self.apply(u) == y));
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn diameter(&self) -> Rational {
        // farthest pair: circle midpoints opposite v on each circle
        Rational::one()
    }

    /// Positions j/3^k with 1 <= j < 3^k on each edge. The wedge point is the
    /// single point where g has an extra branch; it is excluded here (each
    /// net point is still within 3^(-k) of it) and handled exactly by the
    /// preimage enumerator wherever it arises.
    fn net(&self, resolution: &Rational) -> Vec<SolenoidPoint> {
        let k = Self::level_for_resolution(resolution);
        let q = 3i64.pow(k);
        let mut out = Vec::new();
        for edge in [Edge::A, Edge::B] {
            for j in 1..q {
                out.push(SolenoidPoint::new(edge, Rational::new(j, q)));
            }
        }
        out.sort();
        out
    }

    fn modulus(&self, k: u32, delta_out: &Rational) -> Rational {
        // g stretches path length by at most 3 per step.
        delta_out * &Rational::new(1, 3).pow(k as i64)
    }

    fn parse_point(&self, s: &str) -> Result<SolenoidPoint, SystemError> {
        let bad = |reason: &str| SystemError::InvalidPoint {
            system: "solenoid".into(),
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (edge, pos) = s.trim().split_once(':').ok_or_else(|| bad("expected edge:p/q"))?;
        let edge = match edge.trim() {
            "a" => Edge::A,
            "b" => Edge::B,
            _ => return Err(bad("edge must be a or b")),
        };
        let position: Rational = pos.parse().map_err(|_| bad("bad position rational"))?;
        if position.is_negative() || position >= Rational::one() {
            return Err(bad("position must lie in [0,1)"));
        }
        Ok(SolenoidPoint::new(edge, position))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{iterate, preimages_k};

    fn pt(e: Edge, n: i64, d: i64) -> SolenoidPoint {
        SolenoidPoint::new(e, Rational::new(n, d))
    }

    #[test]
    fn wedge_point_is_canonical() {
        assert_eq!(SolenoidPoint::new(Edge::B, Rational::zero()), SolenoidPoint::wedge());
        assert_eq!(SolenoidPoint::wedge().to_string(), "a:0/1");
    }

    #[test]
    fn map_branches() {
        let sys = Solenoid::new();
        // 1/2 lies in the middle third of a: 3*(1/2) - 1 = 1/2
        assert_eq!(sys.apply(&pt(Edge::A, 1, 2)), pt(Edge::A, 1, 2));
        assert_eq!(sys.apply(&pt(Edge::A, 1, 6)), pt(Edge::A, 1, 2));
        assert_eq!(sys.apply(&pt(Edge::A, 5, 6)), pt(Edge::B, 1, 2));
        assert_eq!(sys.apply(&pt(Edge::B, 1, 4)), pt(Edge::A, 1, 2));
        assert_eq!(sys.apply(&pt(Edge::B, 3, 4)), pt(Edge::B, 1, 2));
        // v is fixed, at any iteration count
        let v = SolenoidPoint::wedge();
        assert_eq!(iterate(&sys, &v, 5), v);
    }

    #[test]
    fn metric_is_shortest_path() {
        let sys = Solenoid::new();
        // around one circle
        assert_eq!(sys.metric(&pt(Edge::A, 1, 10), &pt(Edge::A, 9, 10)), Rational::new(1, 5));
        // across circles through v: 1/4 + 1/4
        assert_eq!(sys.metric(&pt(Edge::A, 1, 4), &pt(Edge::B, 1, 4)), Rational::new(1, 2));
        // to the wedge point
        assert_eq!(sys.metric(&SolenoidPoint::wedge(), &pt(Edge::B, 5, 6)), Rational::new(1, 6));
        assert_eq!(sys.metric(&pt(Edge::A, 1, 3), &pt(Edge::A, 1, 3)), Rational::zero());
    }

    #[test]
    fn metric_axioms_on_net() {
        let sys = Solenoid::new();
        let net = sys.net(&Rational::new(1, 9));
        for x in &net {
            for y in &net {
                let d = sys.metric(x, y);
                assert_eq!(d, sys.metric(y, x));
                assert_eq!(d.is_zero(), x == y);
                for z in &net {
                    assert!(sys.metric(x, z) + sys.metric(z, y) >= d);
                }
            }
        }
    }

    #[test]
    fn preimage_counts() {
        let sys = Solenoid::new();
        // interior of a: three branches
        assert_eq!(
            sys.preimages(&pt(Edge::A, 1, 2)).unwrap(),
            vec![pt(Edge::A, 1, 6), pt(Edge::A, 1, 2), pt(Edge::B, 1, 4)]
        );
        // interior of b: two branches
        assert_eq!(sys.preimages(&pt(Edge::B, 1, 3)).unwrap().len(), 2);
        // the wedge point picks up branches from both circle ends
        let pre_v = sys.preimages(&SolenoidPoint::wedge()).unwrap();
        assert_eq!(
            pre_v,
            vec![
                SolenoidPoint::wedge(),
                pt(Edge::A, 1, 3),
                pt(Edge::A, 2, 3),
                pt(Edge::B, 1, 2)
            ]
        );
    }

    #[test]
    fn preimages_complete_on_net() {
        let sys = Solenoid::new();
        let net = sys.net(&Rational::new(1, 27));
        for k in 1..=4u32 {
            for x in &net {
                let fwd = iterate(&sys, x, k);
                let back = preimages_k(&sys, &fwd, k).unwrap();
                assert!(back.contains(x), "{x} missing from {k}-preimages of {fwd}");
            }
        }
    }

    #[test]
    fn modulus_witness_sound_on_net() {
        let sys = Solenoid::new();
        let net = sys.net(&Rational::new(1, 27));
        let delta = Rational::new(1, 9);
        for k in 1..=2u32 {
            let din = sys.modulus(k, &delta);
            for x in &net {
                for y in &net {
                    if sys.metric(x, y) <= din {
                        let dx = sys.metric(&iterate(&sys, x, k), &iterate(&sys, y, k));
                        assert!(dx <= delta, "modulus unsound at {x},{y} k={k}: {dx}");
                    }
                }
            }
        }
    }

    #[test]
    fn net_resolution_levels() {
        assert_eq!(Solenoid::level_for_resolution(&Rational::new(1, 9)), 2);
        assert_eq!(Solenoid::level_for_resolution(&Rational::new(1, 10)), 3);
        let sys = Solenoid::new();
        assert_eq!(sys.net(&Rational::new(1, 9)).len(), 16);
    }

    #[test]
    fn parse_display_roundtrip() {
        let sys = Solenoid::new();
        for s in ["a:1/3", "b:5/7", "a:0/1"] {
            let p = sys.parse_point(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!(sys.parse_point("c:1/2").is_err());
        assert!(sys.parse_point("a:3/2").is_err());
    }
}
