//! Local product structure of the inverse limit of a system satisfying the
//! two axioms: derived epsilon constants, local stable/unstable membership,
//! the inductive bracket construction, contraction checks, finiteness of
//! preimages, and total-disconnectedness evidence.

use crate::inverse_limit::{
    apply_hat_g, apply_hat_g_inverse, extend_thread, metric_dhat, Chooser, HatMetricValue, Thread,
    ThreadError,
};
use crate::rational::Rational;
use crate::system::{iterate, preimages_k, AxiomConstants, System, SystemError};

#[derive(Debug, thiserror::Error)]
pub enum SmaleError {
    #[error("modulus witness cannot certify a positive constant for {0}")]
    NoPositiveConstant(String),
    #[error(
        "no admissible preimage at stage {stage}: nothing in the 2K-preimages of {anchor} lies \
         within {radius} of {near}; the axioms fail at the working resolution"
    )]
    NoAdmissiblePreimage { stage: usize, anchor: String, near: String, radius: Rational },
    #[error("threads too shallow: depth {depth}, need {needed}")]
    InsufficientDepth { depth: usize, needed: usize },
    #[error("bracket precondition not established: d-hat interval {0:?} exceeds {1}")]
    PreconditionNotMet(String, Rational),
    #[error(transparent)]
    Thread(#[from] ThreadError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Outcome of an interval-valued check: interval arithmetic makes the logic
/// three-valued, and indeterminate answers are reported rather than coerced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Determination {
    Holds,
    Fails,
    Indeterminate,
}

impl Determination {
    fn from_threshold(opt: Option<bool>) -> Self {
        match opt {
            Some(true) => Determination::Holds,
            Some(false) => Determination::Fails,
            None => Determination::Indeterminate,
        }
    }
}

/// The epsilon chain for the inverse limit: 0 < ε_hat <= γ^K ε''/(2K),
/// 0 < ε'' <= ε'/2, 0 < ε' <= β/2, each with its continuity side condition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivedHatConstants {
    pub eps_prime: Rational,
    pub eps_double_prime: Rational,
    pub eps_hat: Rational,
}

/// Σ_{k<K} γ^(-2k): each backward step dilates the adapted metric by at most
/// γ^(-1) per term, which compounds to this factor.
fn backward_dilation_sum(c: &AxiomConstants) -> Rational {
    let mut s = Rational::zero();
    for k in 0..c.big_k as i64 {
        s = s + c.gamma.pow(-2 * k);
    }
    s
}

/// Derive the epsilon chain from the modulus-of-continuity witness.
/// Conservative by design: each constant is the minimum of the cap required
/// by its definition and the value the modulus witness certifies.
pub fn derive_hat_constants<S: System>(
    sys: &S,
    c: &AxiomConstants,
) -> Result<DerivedHatConstants, SmaleError> {
    let k = c.big_k;
    let s2 = backward_dilation_sum(c);
    // d-hat(ĝ^-n x, ĝ^-n y) <= γ^-n · S2 · d-hat(x, y) for n <= 2K-1
    let worst_backward = c.gamma.pow(-(2 * k as i64 - 1)) * s2.clone();
    let eps_prime = c.beta.clone().half().min(&c.beta / &worst_backward);

    // d-hat(ĝx, ĝy) <= max(d(g x0, g y0), γ d-hat) + (S2 - 1) γ d-hat
    let half_prime = eps_prime.clone().half();
    let forward_budget = &half_prime / &(&c.gamma * &s2);
    let eps_double_prime = half_prime
        .clone()
        .min(forward_budget)
        .min(sys.modulus(1, &half_prime));

    let two_k = Rational::integer(2 * k as i64);
    let cap = &c.gamma_pow_k() * &eps_double_prime / &two_k;
    let step_target = &c.gamma.pow(k as i64 - 1) * &eps_double_prime / &two_k;
    let mut eps_hat = cap;
    for n in k..2 * k {
        eps_hat = eps_hat.min(sys.modulus(n, &step_target));
    }

    for (name, v) in [
        ("eps_prime", &eps_prime),
        ("eps_double_prime", &eps_double_prime),
        ("eps_hat", &eps_hat),
    ] {
        if !v.is_positive() {
            return Err(SmaleError::NoPositiveConstant(name.into()));
        }
    }
    Ok(DerivedHatConstants { eps_prime, eps_double_prime, eps_hat })
}

/// The constants under which the inverse limit exhibits its local product
/// structure; the contraction rate λ is the axiom constant γ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmaleConstants {
    pub eps_x: Rational,
    pub eps_x_prime: Rational,
    pub lambda: Rational,
}

impl SmaleConstants {
    pub fn from_derived(c: &AxiomConstants, hc: &DerivedHatConstants) -> Self {
        SmaleConstants {
            eps_x: hc.eps_hat.clone(),
            eps_x_prime: hc.eps_prime.clone(),
            lambda: c.gamma.clone(),
        }
    }
}

/// z lies in the local stable set of y at radius eps iff the first K entries
/// agree exactly and d-hat(y, z) <= eps.
pub fn stable_membership<S: System>(
    sys: &S,
    z: &Thread<S::Point>,
    y: &Thread<S::Point>,
    eps: &Rational,
    c: &AxiomConstants,
) -> Result<Determination, ThreadError> {
    let k = c.big_k as usize;
    let depth = z.depth().min(y.depth());
    if depth + 1 < k {
        return Err(ThreadError::InsufficientDepth { depth, needed: k - 1 });
    }
    for m in 0..k {
        if z.entry(m) != y.entry(m) {
            return Ok(Determination::Fails);
        }
    }
    let d = metric_dhat(sys, z, y, c)?;
    Ok(Determination::from_threshold(d.value.le_threshold(eps)))
}

/// z lies in the local unstable set of y at radius eps iff d(y_n, z_n) <= eps
/// for every entry up to the common depth and d-hat(y, z) <= eps. The depth
/// the claim was checked at is returned alongside.
pub fn unstable_membership<S: System>(
    sys: &S,
    z: &Thread<S::Point>,
    y: &Thread<S::Point>,
    eps: &Rational,
    c: &AxiomConstants,
) -> Result<(Determination, usize), ThreadError> {
    let depth = z.depth().min(y.depth());
    for n in 0..=depth {
        if &sys.metric(z.entry(n), y.entry(n)) > eps {
            return Ok((Determination::Fails, depth));
        }
    }
    let d = metric_dhat(sys, z, y, c)?;
    Ok((Determination::from_threshold(d.value.le_threshold(eps)), depth))
}

/// Preimage choice inside the bracket construction; uniqueness probes rerun
/// with the opposite end of the candidate list.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BracketChoice {
    Least,
    Greatest,
}

/// The inductive construction of the unique point in the intersection of the
/// local stable set of x and the local unstable set of y: the first K entries
/// come from x, and each subsequent block of K entries is pulled back through
/// an exact 2K-step preimage chosen inside the ε-ball around the matching
/// entry of y.
pub fn bracket_construct<S: System>(
    sys: &S,
    x: &Thread<S::Point>,
    y: &Thread<S::Point>,
    c: &AxiomConstants,
    hc: &DerivedHatConstants,
    target_depth: usize,
    choice: BracketChoice,
) -> Result<Thread<S::Point>, SmaleError> {
    let k = c.big_k as usize;
    let needed = target_depth + 3 * k;
    if x.depth() < needed || y.depth() < needed {
        return Err(SmaleError::InsufficientDepth {
            depth: x.depth().min(y.depth()),
            needed,
        });
    }
    let d = metric_dhat(sys, x, y, c)?;
    if d.value.le_threshold(&hc.eps_hat) != Some(true) {
        return Err(SmaleError::PreconditionNotMet(
            format!("{}", d.value),
            hc.eps_hat.clone(),
        ));
    }

    let mut z: Vec<S::Point> = x.entries()[..k].to_vec();
    let mut stage = 1usize;
    while z.len() <= target_depth {
        let anchor = z.last().unwrap().clone();
        let near = y.entry((stage + 2) * k - 1);
        let candidates = preimages_k(sys, &anchor, 2 * c.big_k)?;
        let admissible: Vec<&S::Point> = candidates
            .iter()
            .filter(|u| &sys.metric(u, near) <= &hc.eps_hat)
            .collect();
        let u = match choice {
            BracketChoice::Least => admissible.first(),
            BracketChoice::Greatest => admissible.last(),
        }
        .ok_or_else(|| SmaleError::NoAdmissiblePreimage {
            stage,
            anchor: anchor.to_string(),
            near: near.to_string(),
            radius: hc.eps_hat.clone(),
        })?;
        // block z_{sK..(s+1)K-1} = g^{2K-1}(u), …, g^K(u)
        for j in 0..k {
            z.push(iterate(sys, u, (2 * k - 1 - j) as u32));
        }
        stage += 1;
    }
    z.truncate(target_depth + 1);
    Ok(Thread::new(sys, z)?)
}

/// A labeled thread pair for the contraction suite.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairKind {
    /// Check d-hat(ĝ y, ĝ z) <= γ d-hat(y, z).
    Stable,
    /// Check d-hat(ĝ⁻¹ y, ĝ⁻¹ z) <= γ d-hat(y, z).
    Unstable,
}

#[derive(Clone, Debug)]
pub struct ContractionCase<P> {
    pub kind: PairKind,
    pub y: Thread<P>,
    pub z: Thread<P>,
}

#[derive(Clone, Debug)]
pub struct ContractionOutcome {
    pub kind: PairKind,
    pub determination: Determination,
    /// depth at which the comparison was settled
    pub depth: usize,
    /// left side (image pair) and right side (original pair) intervals
    pub image_value: HatMetricValue,
    pub base_value: HatMetricValue,
    /// the sound comparison hi(left) <= γ·lo(right) held with equality of the
    /// exact collapsed values
    pub exact_equality: bool,
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
    pub outcomes: Vec<ContractionOutcome>,
}

/// Verify the contraction inequalities with interval soundness: pass when
/// hi(image) <= γ·lo(base), fail when lo(image) > γ·hi(base), and deepen the
/// threads (canonically) and retry otherwise, up to `extra_depth` more
/// entries.
pub fn verify_contraction<S: System>(
    sys: &S,
    cases: &[ContractionCase<S::Point>],
    c: &AxiomConstants,
    extra_depth: usize,
) -> Result<ContractionReport, SmaleError> {
    let mut outcomes = Vec::with_capacity(cases.len());
    for case in cases {
        let mut y = case.y.clone();
        let mut z = case.z.clone();
        let cap = y.depth().min(z.depth()) + extra_depth;
        let outcome = loop {
            let settled = evaluate_case(sys, case.kind, &y, &z, c)?;
            match settled.determination {
                Determination::Indeterminate if y.depth().min(z.depth()) < cap => {
                    let next = (y.depth().min(z.depth()) + 4).min(cap);
                    y = extend_thread(sys, &y, next, &mut Chooser::Canonical)?;
                    z = extend_thread(sys, &z, next, &mut Chooser::Canonical)?;
                }
                _ => break settled,
            }
        };
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.determination == Determination::Holds).count();
    let failed = outcomes.iter().filter(|o| o.determination == Determination::Fails).count();
    let indeterminate = outcomes.len() - passed - failed;
    Ok(ContractionReport { passed, failed, indeterminate, outcomes })
}

fn evaluate_case<S: System>(
    sys: &S,
    kind: PairKind,
    y: &Thread<S::Point>,
    z: &Thread<S::Point>,
    c: &AxiomConstants,
) -> Result<ContractionOutcome, SmaleError> {
    let base = metric_dhat(sys, y, z, c)?;
    let (iy, iz) = match kind {
        PairKind::Stable => (apply_hat_g(sys, y), apply_hat_g(sys, z)),
        PairKind::Unstable => (apply_hat_g_inverse(y)?, apply_hat_g_inverse(z)?),
    };
    let image = metric_dhat(sys, &iy, &iz, c)?;
    // When the first K entries coincide, the forward image scales by exactly
    // γ term by term, so the intervals satisfy image = γ·base identically and
    // the inequality is certified at any depth.
    let prefix_equal = kind == PairKind::Stable
        && (0..c.big_k as usize).all(|m| y.entry(m) == z.entry(m));
    if prefix_equal {
        debug_assert_eq!(image.value, base.value.scale(&c.gamma));
    }
    let determination = if y == z || prefix_equal {
        Determination::Holds
    } else if image.value.hi() <= &(&c.gamma * base.value.lo()) {
        Determination::Holds
    } else if image.value.lo() > &(&c.gamma * base.value.hi()) {
        Determination::Fails
    } else {
        Determination::Indeterminate
    };
    let exact_equality = prefix_equal
        || (image.value.is_point()
            && base.value.is_point()
            && image.value.lo() == &(&c.gamma * base.value.lo()));
    Ok(ContractionOutcome {
        kind,
        determination,
        depth: y.depth().min(z.depth()),
        image_value: image,
        base_value: base,
        exact_equality,
    })
}

#[derive(Clone, Debug)]
pub struct FiniteToOneReport {
    pub max_count: usize,
    /// net points attaining the maximum (first few, canonical order)
    pub witnesses: Vec<String>,
    pub points_checked: usize,
}

/// Maximum number of one-step preimages over a net.
pub fn finite_to_one_check<S: System>(
    sys: &S,
    resolution: &Rational,
) -> Result<FiniteToOneReport, SystemError> {
    let net = sys.net(resolution);
    let mut max_count = 0usize;
    let mut witnesses: Vec<String> = Vec::new();
    for p in &net {
        let n = sys.preimages(p)?.len();
        if n > max_count {
            max_count = n;
            witnesses.clear();
        }
        if n == max_count && witnesses.len() < 8 {
            witnesses.push(p.to_string());
        }
    }
    Ok(FiniteToOneReport { max_count, witnesses, points_checked: net.len() })
}

#[derive(Clone, Debug)]
pub struct DisconnectednessEvidence<P> {
    /// the finite set g^-n {y_0}
    pub fiber: Vec<P>,
    pub samples_checked: usize,
    /// samples whose entry n escaped the fiber (must stay empty)
    pub escapes: Vec<String>,
}

/// The projection of a local stable set to entry n lands in the finite set
/// g^-n {y_0}: check it for every sampled member.
pub fn disconnectedness_evidence<S: System>(
    sys: &S,
    y: &Thread<S::Point>,
    eps: &Rational,
    c: &AxiomConstants,
    n: u32,
    samples: &[Thread<S::Point>],
) -> Result<DisconnectednessEvidence<S::Point>, SmaleError> {
    assert!(n as usize <= y.depth(), "projection depth exceeds thread depth");
    let fiber = if n == 0 {
        vec![y.entry(0).clone()]
    } else {
        preimages_k(sys, y.entry(0), n)?
    };
    let mut escapes = Vec::new();
    let mut checked = 0usize;
    for z in samples {
        if z.depth() < n as usize {
            continue;
        }
        if stable_membership(sys, z, y, eps, c)? == Determination::Fails {
            continue;
        }
        checked += 1;
        if !fiber.contains(z.entry(n as usize)) {
            escapes.push(z.entry(n as usize).to_string());
        }
    }
    Ok(DisconnectednessEvidence { fiber, samples_checked: checked, escapes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{OneSidedShift, OneSidedWord};

    fn w(s: &str) -> OneSidedWord {
        OneSidedWord::parse(s).unwrap()
    }

    fn full() -> OneSidedShift {
        OneSidedShift::full_shift_2()
    }

    fn constants() -> AxiomConstants {
        AxiomConstants::new(Rational::new(1, 4), 1, Rational::new(1, 2)).unwrap()
    }

    fn thread_from_deep(
        sys: &OneSidedShift,
        deep: &OneSidedWord,
        depth: usize,
    ) -> Thread<OneSidedWord> {
        let entries: Vec<OneSidedWord> =
            (0..=depth).map(|n| iterate(sys, deep, (depth - n) as u32)).collect();
        Thread::new(sys, entries).unwrap()
    }

    #[test]
    fn derived_constants_for_full_shift() {
        let sys = full();
        let c = constants();
        let hc = derive_hat_constants(&sys, &c).unwrap();
        assert_eq!(hc.eps_prime, Rational::new(1, 8));
        assert!(hc.eps_double_prime <= hc.eps_prime.clone().half());
        // chain cap: eps_hat <= γ^K eps''/(2K)
        let cap = c.gamma_pow_k() * hc.eps_double_prime.clone() / Rational::integer(2);
        assert!(hc.eps_hat <= cap);
        assert!(hc.eps_hat.is_positive());
        let sc = SmaleConstants::from_derived(&c, &hc);
        assert_eq!(sc.lambda, c.gamma);
        assert_eq!(sc.eps_x_prime, hc.eps_prime);
    }

    #[test]
    fn derived_constants_respect_backward_condition_on_samples() {
        let sys = full();
        let c = constants();
        let hc = derive_hat_constants(&sys, &c).unwrap();
        // deepest entries agree from word index 3 onward, so entries 0..=8
        // coincide: d-hat is far below eps_prime, and every backward image
        // within 2K-1 steps must stay within beta
        let x = thread_from_deep(&sys, &w("001(0)"), 11);
        let y = thread_from_deep(&sys, &w("(0)"), 11);
        let d = metric_dhat(&sys, &x, &y, &c).unwrap();
        assert!(d.value.hi() <= &hc.eps_prime);
        let mut bx = x;
        let mut by = y;
        for _ in 0..2 * c.big_k as usize - 1 {
            bx = apply_hat_g_inverse(&bx).unwrap();
            by = apply_hat_g_inverse(&by).unwrap();
            let back = metric_dhat(&sys, &bx, &by, &c).unwrap();
            assert!(back.value.hi() <= &c.beta);
        }
    }

    #[test]
    fn stable_membership_cases() {
        let sys = full();
        let c = constants();
        let eps = Rational::new(1, 8);
        // identical threads hold trivially (interval [0, tail] with tiny tail)
        let y = thread_from_deep(&sys, &w("000000000(0)"), 9);
        assert_eq!(stable_membership(&sys, &y, &y, &eps, &c).unwrap(), Determination::Holds);
        // shared entry 0, small d-hat
        let z = thread_from_deep(&sys, &w("000010000(0)"), 9);
        assert_eq!(z.entry(0), y.entry(0));
        assert_eq!(stable_membership(&sys, &z, &y, &eps, &c).unwrap(), Determination::Holds);
        // differing entry 0 fails regardless of metric smallness
        let far = thread_from_deep(&sys, &w("0000000001(0)"), 9);
        assert_ne!(far.entry(0), y.entry(0));
        assert_eq!(stable_membership(&sys, &far, &y, &eps, &c).unwrap(), Determination::Fails);
    }

    #[test]
    fn unstable_membership_cases() {
        let sys = full();
        let c = constants();
        let eps = Rational::new(1, 2);
        let y = thread_from_deep(&sys, &w("01010100(1)"), 6);
        assert_eq!(
            unstable_membership(&sys, &y, &y, &eps, &c).unwrap().0,
            Determination::Holds
        );
        // deepest entries share their first 7 symbols and differ from index 7
        // on, so entry n disagrees first at word index n+1: every entrywise
        // distance is 2^-(n+1) <= 1/2
        let z = thread_from_deep(&sys, &w("01010101(0)"), 6);
        for n in 0..=6 {
            assert_eq!(sys.metric(y.entry(n), z.entry(n)), Rational::two_pow_neg(n as u32 + 1));
        }
        let (det, depth) = unstable_membership(&sys, &z, &y, &eps, &c).unwrap();
        assert_eq!(det, Determination::Holds);
        assert_eq!(depth, 6);
        // an entry violating the bound fails definitively
        let far = thread_from_deep(&sys, &w("1111111(0)"), 6);
        assert_eq!(
            unstable_membership(&sys, &far, &y, &Rational::new(1, 4), &c).unwrap().0,
            Determination::Fails
        );
    }

    #[test]
    fn bracket_of_a_point_with_itself() {
        let sys = full();
        let c = constants();
        let hc = derive_hat_constants(&sys, &c).unwrap();
        let x = thread_from_deep(&sys, &w("01010101010101(0)"), 13);
        let z = bracket_construct(&sys, &x, &x, &c, &hc, 10, BracketChoice::Least).unwrap();
        assert_eq!(z, x.truncated(10));
    }

    #[test]
    fn bracket_requires_depth_and_precondition() {
        let sys = full();
        let c = constants();
        let hc = derive_hat_constants(&sys, &c).unwrap();
        let shallow = thread_from_deep(&sys, &w("(0)"), 3);
        assert!(matches!(
            bracket_construct(&sys, &shallow, &shallow, &c, &hc, 10, BracketChoice::Least),
            Err(SmaleError::InsufficientDepth { .. })
        ));
        let x = thread_from_deep(&sys, &w("1111111111111111(0)"), 15);
        let y = thread_from_deep(&sys, &w("0000000000000000(1)"), 15);
        assert!(matches!(
            bracket_construct(&sys, &x, &y, &c, &hc, 10, BracketChoice::Least),
            Err(SmaleError::PreconditionNotMet(..))
        ));
    }

    #[test]
    fn contraction_on_stable_and_unstable_shift_pairs() {
        let sys = full();
        let c = constants();
        // stable pair: shared prefix, diverging tails
        let y = thread_from_deep(&sys, &w("000100000001(0)"), 11);
        let z = thread_from_deep(&sys, &w("000110000001(0)"), 11);
        assert_eq!(y.entry(0), z.entry(0));
        // unstable pair: deepest entries agree through word index 12, so
        // every entrywise distance is 2^-(n+1)
        let uy = thread_from_deep(&sys, &w("0101010101010(1)"), 11);
        let uz = thread_from_deep(&sys, &w("0101010101011(0)"), 11);
        let cases = vec![
            ContractionCase { kind: PairKind::Stable, y: y.clone(), z: z.clone() },
            ContractionCase { kind: PairKind::Stable, y: y.clone(), z: y.clone() },
            ContractionCase { kind: PairKind::Unstable, y: uy, z: uz },
        ];
        let report = verify_contraction(&sys, &cases, &c, 12).unwrap();
        assert_eq!(report.failed, 0);
        assert_eq!(report.indeterminate, 0);
        assert_eq!(report.passed, 3);
        // forward scaling is exact equality for the non-identical stable pair
        assert!(report.outcomes[0].exact_equality);
    }

    #[test]
    fn finite_to_one_counts() {
        let sys = full();
        let rep = finite_to_one_check(&sys, &Rational::new(1, 8)).unwrap();
        assert_eq!(rep.max_count, 2);
        let gm = OneSidedShift::golden_mean();
        let rep = finite_to_one_check(&gm, &Rational::new(1, 8)).unwrap();
        assert_eq!(rep.max_count, 2);
    }

    #[test]
    fn disconnectedness_fibers() {
        let sys = full();
        let c = constants();
        let eps = Rational::new(1, 8);
        let y = thread_from_deep(&sys, &w("000000000000(0)"), 11);
        // n = 0: the fiber is {y0}
        let ev = disconnectedness_evidence(&sys, &y, &eps, &c, 0, &[y.clone()]).unwrap();
        assert_eq!(ev.fiber, vec![y.entry(0).clone()]);
        // n = 3 on the full shift: all 3-symbol prepends of y0
        let samples: Vec<Thread<OneSidedWord>> = ["000000010000(0)", "000001000000(0)"]
            .iter()
            .map(|s| thread_from_deep(&sys, &w(s), 11))
            .collect();
        let ev = disconnectedness_evidence(&sys, &y, &eps, &c, 3, &samples).unwrap();
        assert_eq!(ev.fiber.len(), 8);
        assert!(ev.escapes.is_empty());
        assert_eq!(ev.samples_checked, 2);
    }
}
