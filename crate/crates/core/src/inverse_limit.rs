//! Truncated inverse-limit points and their metrics.
//!
//! A thread is a finite prefix (y_0, …, y_N) of a point of the stationary
//! inverse limit, with y_n = g(y_{n+1}) checked exactly on construction. The
//! weighted sup metric and the adapted metric over threads are computed as
//! rational intervals whose width is a certified truncation bound: the value
//! on the full infinite threads always lies inside.

use crate::rational::{Rational, RationalInterval};
use crate::system::{AxiomConstants, System, SystemError};

#[derive(Debug, thiserror::Error)]
pub enum ThreadError {
    #[error("entry {index} is not the image of entry {}: {got} != g({next})", index + 1)]
    Inconsistent { index: usize, got: String, next: String },
    #[error("thread must have at least one entry")]
    Empty,
    #[error("depth {depth} is insufficient: {needed} needed")]
    InsufficientDepth { depth: usize, needed: usize },
    #[error("no representable preimage available to extend entry {entry}")]
    NoPreimage { entry: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// A finite truncation (y_0, …, y_N) of an inverse-limit point.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Thread<P> {
    entries: Vec<P>,
}

impl<P: Clone + Eq> Thread<P> {
    /// Validate y_n = g(y_{n+1}) for every consecutive pair.
    pub fn new<S>(sys: &S, entries: Vec<P>) -> Result<Self, ThreadError>
    where
        S: System<Point = P>,
        P: std::fmt::Display,
    {
        if entries.is_empty() {
            return Err(ThreadError::Empty);
        }
        for i in 0..entries.len() - 1 {
            let image = sys.apply(&entries[i + 1]);
            if image != entries[i] {
                return Err(ThreadError::Inconsistent {
                    index: i,
                    got: entries[i].to_string(),
                    next: entries[i + 1].to_string(),
                });
            }
        }
        Ok(Thread { entries })
    }

    /// The depth-0 thread at a single point.
    pub fn seed(point: P) -> Self {
        Thread { entries: vec![point] }
    }

    /// Wrap entries produced by a preimage walk, whose consistency holds by
    /// construction.
    pub(crate) fn from_walk(entries: Vec<P>) -> Self {
        assert!(!entries.is_empty());
        Thread { entries }
    }

    pub fn depth(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[P] {
        &self.entries
    }

    pub fn entry(&self, n: usize) -> &P {
        &self.entries[n]
    }

    /// Truncate to the given depth.
    pub fn truncated(&self, depth: usize) -> Thread<P> {
        assert!(depth < self.entries.len());
        Thread { entries: self.entries[..=depth].to_vec() }
    }
}

/// The induced map: prepend g(y_0). Depth grows by one; no information is
/// discarded.
pub fn apply_hat_g<S: System>(sys: &S, x: &Thread<S::Point>) -> Thread<S::Point> {
    let mut entries = Vec::with_capacity(x.entries.len() + 1);
    entries.push(sys.apply(&x.entries[0]));
    entries.extend_from_slice(&x.entries);
    Thread { entries }
}

/// The inverse of the induced map: drop entry 0. Requires depth >= 1.
pub fn apply_hat_g_inverse<P: Clone + Eq>(x: &Thread<P>) -> Result<Thread<P>, ThreadError> {
    if x.depth() == 0 {
        return Err(ThreadError::InsufficientDepth { depth: 0, needed: 1 });
    }
    Ok(Thread { entries: x.entries[1..].to_vec() })
}

/// Preimage selection when deepening a thread.
pub enum Chooser<'a, P> {
    /// The least preimage in the canonical point order.
    Canonical,
    /// The greatest preimage; used by uniqueness probes.
    Greatest,
    /// Caller-supplied policy.
    Custom(&'a mut dyn FnMut(&[P]) -> usize),
}

/// Append entries until the target depth, choosing each new deepest entry
/// from the preimages of the current one.
pub fn extend_thread<S: System>(
    sys: &S,
    x: &Thread<S::Point>,
    target_depth: usize,
    chooser: &mut Chooser<'_, S::Point>,
) -> Result<Thread<S::Point>, ThreadError> {
    let mut entries = x.entries.clone();
    while entries.len() <= target_depth {
        let last = entries.last().unwrap();
        let pre = sys.preimages(last)?;
        if pre.is_empty() {
            return Err(ThreadError::NoPreimage { entry: format!("{last}") });
        }
        let pick = match chooser {
            Chooser::Canonical => 0,
            Chooser::Greatest => pre.len() - 1,
            Chooser::Custom(f) => {
                let i = f(&pre);
                assert!(i < pre.len(), "chooser index out of range");
                i
            }
        };
        entries.push(pre[pick].clone());
    }
    Ok(Thread { entries })
}

/// A metric value carrying its truncation error: the value on the infinite
/// threads lies in `value`; `depth` is the common entry depth used.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HatMetricValue {
    pub value: RationalInterval,
    pub depth: usize,
}

/// The weighted sup metric sup_n γ^n d(x_n, y_n) over the realized entries,
/// with the unrealized tail bounded by γ^(minN+1) · diam.
pub fn metric_dprime<S: System>(
    sys: &S,
    x: &Thread<S::Point>,
    y: &Thread<S::Point>,
    gamma: &Rational,
) -> HatMetricValue {
    assert!(gamma.is_positive() && gamma < &Rational::one(), "gamma must lie in (0,1)");
    let depth = x.depth().min(y.depth());
    let mut lo = Rational::zero();
    let mut weight = Rational::one();
    for n in 0..=depth {
        let term = &weight * &sys.metric(x.entry(n), y.entry(n));
        if term > lo {
            lo = term;
        }
        weight = weight * gamma;
    }
    // weight is now γ^(depth+1)
    let tail = weight * sys.diameter();
    let hi = lo.clone().max(tail);
    HatMetricValue { value: RationalInterval::new(lo, hi), depth }
}

/// The adapted metric: sum for k = 0..K-1 of γ^(-k) d'(ĝ^(-k) x, ĝ^(-k) y).
/// Each backward application consumes one leading entry, so both depths must
/// be at least K-1.
pub fn metric_dhat<S: System>(
    sys: &S,
    x: &Thread<S::Point>,
    y: &Thread<S::Point>,
    constants: &AxiomConstants,
) -> Result<HatMetricValue, ThreadError> {
    let k = constants.big_k as usize;
    let depth = x.depth().min(y.depth());
    if depth + 1 < k {
        return Err(ThreadError::InsufficientDepth { depth, needed: k - 1 });
    }
    let mut total = RationalInterval::point(Rational::zero());
    let mut xk = x.clone();
    let mut yk = y.clone();
    let mut scale = Rational::one();
    let inv_gamma = constants.gamma.recip();
    for step in 0..k {
        let part = metric_dprime(sys, &xk, &yk, &constants.gamma);
        total = total.add(&part.value.scale(&scale));
        if step + 1 < k {
            xk = apply_hat_g_inverse(&xk)?;
            yk = apply_hat_g_inverse(&yk)?;
            scale = scale * &inv_gamma;
        }
    }
    Ok(HatMetricValue { value: total, depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{OneSidedShift, OneSidedWord};
    use crate::system::iterate;

    fn w(s: &str) -> OneSidedWord {
        OneSidedWord::parse(s).unwrap()
    }

    fn full() -> OneSidedShift {
        OneSidedShift::full_shift_2()
    }

    /// The thread whose deepest entry is `deep`: (g^N(deep), …, g(deep), deep).
    fn thread_from_deep(sys: &OneSidedShift, deep: &OneSidedWord, depth: usize) -> Thread<OneSidedWord> {
        let entries: Vec<OneSidedWord> =
            (0..=depth).map(|n| iterate(sys, deep, (depth - n) as u32)).collect();
        Thread::new(sys, entries).unwrap()
    }

    fn constants(k: u32) -> AxiomConstants {
        AxiomConstants::new(Rational::new(1, 4), k, Rational::new(1, 2)).unwrap()
    }

    #[test]
    fn construction_checks_consistency() {
        let sys = full();
        assert!(Thread::new(&sys, vec![w("(1)"), w("0(1)")]).is_ok());
        let err = Thread::new(&sys, vec![w("(1)"), w("(0)")]).unwrap_err();
        assert!(matches!(err, ThreadError::Inconsistent { index: 0, .. }));
        assert!(matches!(Thread::<OneSidedWord>::new(&sys, vec![]), Err(ThreadError::Empty)));
    }

    #[test]
    fn hat_g_and_inverse_are_inverse() {
        let sys = full();
        let t = thread_from_deep(&sys, &w("0110(1)"), 3);
        let fwd = apply_hat_g(&sys, &t);
        assert_eq!(fwd.depth(), 4);
        assert_eq!(apply_hat_g_inverse(&fwd).unwrap(), t);
        // fixed point: the constant thread stays constant
        let v = Thread::seed(w("(0)"));
        let fv = apply_hat_g(&sys, &v);
        assert!(fv.entries().iter().all(|e| e == &w("(0)")));
        assert!(apply_hat_g_inverse(&v).is_err());
    }

    #[test]
    fn extend_thread_policies() {
        let sys = full();
        let t = Thread::seed(w("01(1)"));
        // canonical extension prepends 0
        let ext = extend_thread(&sys, &t, 3, &mut Chooser::Canonical).unwrap();
        assert_eq!(ext.entry(1), &w("001(1)"));
        assert_eq!(ext.entry(3), &w("00001(1)"));
        // extending to the current depth is the identity
        assert_eq!(extend_thread(&sys, &t, 0, &mut Chooser::Canonical).unwrap(), t);
        // greatest prepends 1
        let ext = extend_thread(&sys, &t, 1, &mut Chooser::Greatest).unwrap();
        assert_eq!(ext.entry(1), &w("101(1)"));
    }

    #[test]
    fn dprime_identity_and_exact_cases() {
        let sys = full();
        let gamma = Rational::new(1, 2);
        let t = thread_from_deep(&sys, &w("0110(1)"), 4);
        // identical threads: only tail uncertainty remains
        let d = metric_dprime(&sys, &t, &t, &gamma);
        assert_eq!(d.value.lo(), &Rational::zero());
        assert_eq!(d.value.hi(), &Rational::two_pow_neg(5));
        // d(x0, y0) = 1/2 dominating every deeper weighted term and the tail
        // bound (1/2)^5, so the interval collapses to the exact value 1/2
        let x = thread_from_deep(&sys, &w("000001(0)"), 4);
        let y = thread_from_deep(&sys, &w("(0)"), 4);
        assert_eq!(sys.metric(x.entry(0), y.entry(0)), Rational::new(1, 2));
        let d = metric_dprime(&sys, &x, &y, &gamma);
        assert!(d.value.is_point());
        assert_eq!(d.value.lo(), &Rational::new(1, 2));
    }

    #[test]
    fn dprime_deep_disagreement() {
        let sys = full();
        let gamma = Rational::new(1, 2);
        // threads disagreeing only at entry 3, with d(x3, y3) = 1
        let x = thread_from_deep(&sys, &w("000(0)"), 3);
        let y = thread_from_deep(&sys, &w("100(0)"), 3);
        for n in 0..3 {
            assert_eq!(x.entry(n), y.entry(n));
        }
        assert_eq!(sys.metric(x.entry(3), y.entry(3)), Rational::one());
        let d = metric_dprime(&sys, &x, &y, &gamma);
        assert_eq!(d.value.lo(), &Rational::new(1, 8));
        assert_eq!(d.value.hi(), &Rational::new(1, 8).max(Rational::two_pow_neg(4)));
    }

    #[test]
    fn dhat_equals_dprime_for_k_one() {
        let sys = full();
        let c = constants(1);
        let x = thread_from_deep(&sys, &w("0110(1)"), 5);
        let y = thread_from_deep(&sys, &w("010(1)"), 5);
        let dp = metric_dprime(&sys, &x, &y, &c.gamma);
        let dh = metric_dhat(&sys, &x, &y, &c).unwrap();
        assert_eq!(dp.value, dh.value);
    }

    #[test]
    fn dhat_two_term_sum() {
        let sys = full();
        let c = constants(2);
        // Entries 0 and 1 agree; entry n >= 2 carries a 1 at word index n-2,
        // so d(x_n, y_n) = 2^(2-n). Then d'(x, y) = γ²·1 = 1/4 and after one
        // backward step d' = γ·1 = 1/2, both realized exactly.
        let x = thread_from_deep(&sys, &w("00001(0)"), 6);
        let y = thread_from_deep(&sys, &w("(0)"), 6);
        assert_eq!(x.entry(1), y.entry(1));
        assert_eq!(sys.metric(x.entry(2), y.entry(2)), Rational::one());
        let dh = metric_dhat(&sys, &x, &y, &c).unwrap();
        // d̂ = d'(x,y) + 2·d'(ĝ⁻¹x, ĝ⁻¹y) = 1/4 + 2·(1/2) = 5/4
        assert!(dh.value.is_point());
        assert_eq!(dh.value.lo(), &Rational::new(5, 4));
        // rejects insufficient depth
        let shallow = Thread::seed(w("(0)"));
        assert!(matches!(
            metric_dhat(&sys, &shallow, &shallow, &c),
            Err(ThreadError::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn observation_forward_scaling_as_interval_equality() {
        // if x0 = y0 then d'(ĝx, ĝy) = γ d'(x, y), exactly as intervals
        let sys = full();
        let gamma = Rational::new(1, 2);
        for (a, b) in [("01(0)", "010(1)"), ("0(0)", "01(10)"), ("11(0)", "110(1)")] {
            let x = thread_from_deep(&sys, &w(a), 4);
            let y = thread_from_deep(&sys, &w(b), 4);
            if x.entry(0) != y.entry(0) {
                continue;
            }
            let before = metric_dprime(&sys, &x, &y, &gamma);
            let after = metric_dprime(&sys, &apply_hat_g(&sys, &x), &apply_hat_g(&sys, &y), &gamma);
            assert_eq!(after.value, before.value.scale(&gamma));
        }
    }

    #[test]
    fn dhat_width_shrinks_geometrically() {
        let sys = full();
        let c = constants(2);
        let diam = sys.diameter();
        let x_deep = w("0110101(1)");
        let y_deep = w("100101(1)");
        for depth in 3..10usize {
            let x = thread_from_deep(&sys, &x_deep, depth);
            let y = thread_from_deep(&sys, &y_deep, depth);
            let dh = metric_dhat(&sys, &x, &y, &c).unwrap();
            // width <= γ^(N+1-K) · diam · Σ_{k<K} γ^(-k)
            let mut cap = Rational::zero();
            for k in 0..c.big_k as i64 {
                cap = cap + c.gamma.pow(-k);
            }
            let bound = c.gamma.pow(depth as i64 + 1 - c.big_k as i64) * diam.clone() * cap;
            assert!(dh.value.width() <= bound, "depth {depth}: {} > {bound}", dh.value.width());
        }
    }

    #[test]
    fn deeper_intervals_nest() {
        let sys = full();
        let c = constants(1);
        let x = thread_from_deep(&sys, &w("01101011101(1)"), 11);
        let y = thread_from_deep(&sys, &w("0110101(0)"), 11);
        let deep = metric_dhat(&sys, &x, &y, &c).unwrap();
        let shallow = metric_dhat(&sys, &x.truncated(6), &y.truncated(6), &c).unwrap();
        assert!(shallow.value.lo() <= deep.value.lo());
        assert!(deep.value.hi() <= shallow.value.hi());
    }

    #[test]
    fn dhat_triangle_soundness() {
        let sys = full();
        let c = constants(2);
        let words = ["00110(1)", "0110(1)", "0(0)", "101(10)", "11(0)", "0101(1)"];
        let threads: Vec<Thread<OneSidedWord>> =
            words.iter().map(|s| thread_from_deep(&sys, &w(s), 6)).collect();
        for x in &threads {
            for y in &threads {
                for z in &threads {
                    let dxz = metric_dhat(&sys, x, z, &c).unwrap();
                    let dxy = metric_dhat(&sys, x, y, &c).unwrap();
                    let dyz = metric_dhat(&sys, y, z, &c).unwrap();
                    // sound direction: lo(x,z) <= hi(x,y) + hi(y,z)
                    assert!(dxz.value.lo() <= &(dxy.value.hi() + dyz.value.hi()));
                }
            }
        }
    }
}
