//! The union of the full one-sided shifts on {0,1} and on {0,2}, glued at the
//! all-zeros word, with the left shift. A continuous surjection on a compact
//! space that satisfies Axiom 1 but falsifies Axiom 2: arbitrarily close to
//! the gluing point, the two halves of the space have incompatible preimage
//! structure.
//!
//! Points are one-sided words over {0,1,2} that never mix the symbols 1 and 2
//! (so the space is a closed, shift-invariant subset of the full 3-shift and
//! the metric is the usual 2^(-first disagreement)).

use crate::rational::Rational;
use crate::symbolic::{metric_one_sided, OneSidedShift, OneSidedWord, Symbol};
use crate::system::{iterate, preimages_k, System, SystemError};

fn mixes_symbols(w: &OneSidedWord) -> bool {
    let used = w.used_symbols();
    used.contains(&b'1') && used.contains(&b'2')
}

#[derive(Clone, Debug, Default)]
pub struct ShiftUnion;

impl ShiftUnion {
    pub fn new() -> Self {
        ShiftUnion
    }

    pub fn admissible(w: &OneSidedWord) -> bool {
        w.used_symbols().iter().all(|s| matches!(s, b'0' | b'1' | b'2')) && !mixes_symbols(w)
    }
}

impl System for ShiftUnion {
    type Point = OneSidedWord;

    fn name(&self) -> &str {
        "example2"
    }

    fn metric(&self, x: &OneSidedWord, y: &OneSidedWord) -> Rational {
        metric_one_sided(x, y)
    }

    fn apply(&self, x: &OneSidedWord) -> OneSidedWord {
        x.shift()
    }

    fn preimages(&self, y: &OneSidedWord) -> Result<Vec<OneSidedWord>, SystemError> {
        let used = y.used_symbols();
        let symbols: &[Symbol] = if used.contains(&b'1') {
            &[b'0', b'1']
        } else if used.contains(&b'2') {
            &[b'0', b'2']
        } else {
            &[b'0', b'1', b'2']
        };
        let mut out: Vec<OneSidedWord> = symbols.iter().map(|&s| y.prepend(s)).collect();
        out.sort();
        Ok(out)
    }

    fn diameter(&self) -> Rational {
        Rational::one()
    }

    fn net(&self, resolution: &Rational) -> Vec<OneSidedWord> {
        let l = OneSidedShift::depth_for_resolution(resolution).max(1);
        let mut out = Vec::new();
        for live in [b'1', b'2'] {
            for bits in 0..(1u32 << l) {
                let pre: Vec<Symbol> = (0..l)
                    .map(|i| if bits >> i & 1 == 1 { live } else { b'0' })
                    .collect();
                out.push(OneSidedWord::new(pre, vec![b'0']));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn modulus(&self, k: u32, delta_out: &Rational) -> Rational {
        delta_out * &Rational::two_pow_neg(k)
    }

    fn parse_point(&self, s: &str) -> Result<OneSidedWord, SystemError> {
        let w = OneSidedWord::parse(s).map_err(|reason| SystemError::InvalidPoint {
            system: "example2".into(),
            input: s.to_string(),
            reason,
        })?;
        if !Self::admissible(&w) {
            return Err(SystemError::InvalidPoint {
                system: "example2".into(),
                input: s.to_string(),
                reason: "word must use symbols {0,1} or {0,2}, never both 1 and 2".into(),
            });
        }
        Ok(w)
    }
}

/// One enumerated 2K-step preimage, with its exact distance to the ball
/// center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageRecord {
    pub point: OneSidedWord,
    pub distance: Rational,
}

/// An exact certificate that the containment of Axiom 2 fails at (x, ε, y):
/// d(y, g^K(x)) <= ε, yet every u with g^{2K}(u) = g^K(y) lies strictly
/// outside the closed ball B(x, γε).
#[derive(Clone, Debug)]
pub struct Axiom2FailureCertificate {
    pub big_k: u32,
    pub depth_n: u32,
    pub gamma: Rational,
    pub x: OneSidedWord,
    pub y: OneSidedWord,
    /// d(g^K(x), y), equal to 2^(-N).
    pub witness_distance: Rational,
    /// The ball radius γ·2^(-N).
    pub ball_radius: Rational,
    /// g^K(y), the point that must be reached.
    pub target: OneSidedWord,
    /// The complete set g^{-2K}(g^K(y)) with each element's distance to x;
    /// every distance exceeds the ball radius.
    pub preimage_certificate: Vec<PreimageRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum WitnessError {
    #[error("N must be at least 2K (got N={n}, K={k})")]
    DepthTooSmall { n: u32, k: u32 },
    #[error("gamma must lie in (0,1), got {0}")]
    BadGamma(Rational),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("certificate did not verify: preimage {0} lies inside the ball")]
    InsideBall(OneSidedWord),
}

/// Construct and fully verify the Axiom-2 failure witness for the union
/// system at parameters (K, N, γ): x carries a single 1 at index K-1 (so
/// g^K(x) is the gluing point), y carries a single 2 at index N. Every
/// 2K-step preimage of g^K(y) is a {0,2}-word, hence disagrees with x at
/// index K-1 already, at distance 2^(1-K) > γ·2^(-N).
pub fn example2_witness(
    big_k: u32,
    depth_n: u32,
    gamma: Rational,
) -> Result<Axiom2FailureCertificate, WitnessError> {
    if big_k == 0 || depth_n < 2 * big_k {
        return Err(WitnessError::DepthTooSmall { n: depth_n, k: big_k });
    }
    if !gamma.is_positive() || gamma >= Rational::one() {
        return Err(WitnessError::BadGamma(gamma));
    }
    let sys = ShiftUnion::new();

    let mut x_pre = vec![b'0'; (big_k - 1) as usize];
    x_pre.push(b'1');
    let x = OneSidedWord::new(x_pre, vec![b'0']);

    let mut y_pre = vec![b'0'; depth_n as usize];
    y_pre.push(b'2');
    let y = OneSidedWord::new(y_pre, vec![b'0']);

    let gkx = iterate(&sys, &x, big_k);
    let witness_distance = sys.metric(&gkx, &y);
    debug_assert_eq!(witness_distance, Rational::two_pow_neg(depth_n));

    let ball_radius = &gamma * &witness_distance;
    let target = iterate(&sys, &y, big_k);

    let mut preimage_certificate = Vec::new();
    for u in preimages_k(&sys, &target, 2 * big_k)? {
        let distance = sys.metric(&u, &x);
        if distance <= ball_radius {
            return Err(WitnessError::InsideBall(u));
        }
        preimage_certificate.push(PreimageRecord { point: u, distance });
    }

    Ok(Axiom2FailureCertificate {
        big_k,
        depth_n,
        gamma,
        x,
        y,
        witness_distance,
        ball_radius,
        target,
        preimage_certificate,
    })
}
