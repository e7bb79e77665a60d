//! Collapsing the stable classes of a two-sided shift of finite type yields
//! the one-sided shift; rebuilding the stationary inverse limit of that
//! quotient recovers the original two-sided shift. This module realizes the
//! quotient map, the embedding of two-sided words as threads, and the
//! verification of the conjugacy square, with the quotient's axiom constants
//! discovered by the generic grid search.
//!
//! The partition behind the quotient is the 1-block cylinder partition: for
//! a 1-step shift of finite type its rectangles are clopen in the stable
//! direction, and the class of a word is exactly its forward ray.

use crate::axioms::{search_axiom_constants, AxiomReport, SearchOutcome};
use crate::inverse_limit::{apply_hat_g, Thread};
use crate::rational::Rational;
use crate::sampling::predecessor_continuation;
use crate::symbolic::{
    shift_two_sided, EdgeShiftSpec, OneSidedShift, OneSidedWord, TwoSidedWord,
};
use crate::system::SystemError;

#[derive(Debug, thiserror::Error)]
pub enum QuotientError {
    #[error("the shift is not irreducible (its graph is not strongly connected)")]
    NotIrreducible,
    #[error("word {0} is not admissible for this shift")]
    Inadmissible(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// The quotient of a two-sided shift of finite type by its stable classes:
/// the one-sided shift on the same adjacency matrix, carrying the induced
/// left-shift map.
#[derive(Clone, Debug)]
pub struct QuotientSystem {
    base: EdgeShiftSpec,
    quotient: OneSidedShift,
}

impl QuotientSystem {
    pub fn new(base: EdgeShiftSpec) -> Result<Self, QuotientError> {
        if !base.is_irreducible() {
            return Err(QuotientError::NotIrreducible);
        }
        let quotient = OneSidedShift::new(base.clone(), "quotient");
        Ok(QuotientSystem { base, quotient })
    }

    pub fn base(&self) -> &EdgeShiftSpec {
        &self.base
    }

    /// The quotient system (Y, d, g) the inverse limit is built over.
    pub fn system(&self) -> &OneSidedShift {
        &self.quotient
    }

    fn check_admissible(&self, x: &TwoSidedWord) -> Result<(), QuotientError> {
        if self.base.two_sided_admissible(x) {
            Ok(())
        } else {
            Err(QuotientError::Inadmissible(x.to_string()))
        }
    }

    /// The class of a word under the stable-class relation: its forward ray.
    /// Two words map equal exactly when they agree on all indices >= 0.
    pub fn quotient_map(&self, x: &TwoSidedWord) -> Result<OneSidedWord, QuotientError> {
        self.check_admissible(x)?;
        Ok(x.forward_ray())
    }

    /// The embedding of the two-sided shift into the inverse limit of the
    /// quotient: entry n is the class of the word shifted n steps backward.
    /// Thread consistency holds by construction.
    pub fn omega(&self, x: &TwoSidedWord, depth: usize) -> Result<Thread<OneSidedWord>, QuotientError> {
        self.check_admissible(x)?;
        let entries: Vec<OneSidedWord> = (0..=depth as i64)
            .map(|n| shift_two_sided(x, -n).forward_ray())
            .collect();
        Ok(Thread::new(&self.quotient, entries).expect("rays of one word form a thread"))
    }

    /// A two-sided word hitting a given thread: its symbols from index
    /// -depth onward are the deepest entry, and the past before that is the
    /// canonical predecessor continuation.
    pub fn word_for_thread(
        &self,
        thread: &Thread<OneSidedWord>,
    ) -> Result<TwoSidedWord, QuotientError> {
        let depth = thread.depth() as i64;
        let deepest = thread.entry(thread.depth());
        let (cycle, transient) = predecessor_continuation(&self.base, deepest.symbol_at(0));
        let mut core = transient;
        let span = deepest.complexity() as i64;
        for n in 0..span {
            core.push(deepest.symbol_at(n as usize));
        }
        let start = -depth - core.len() as i64 + span;
        let word = TwoSidedWord::new(cycle, core, deepest.period().to_vec(), start);
        self.check_admissible(&word)?;
        Ok(word)
    }

    /// Search the quotient system for axiom constants; full shifts come out
    /// at (K = 1, β = 1/4, γ = 1/2).
    pub fn quotient_axiom_constants(
        &self,
        resolution: &Rational,
    ) -> Result<SearchOutcome, QuotientError> {
        let gammas = [Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 4)];
        let betas = [Rational::new(1, 2), Rational::new(1, 4), Rational::new(1, 8)];
        Ok(search_axiom_constants(&self.quotient, 1..=2, &gammas, &betas, resolution, None)?)
    }
}

#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    pub samples: usize,
    /// samples where ω(shift x) != ĝ(ω x) entrywise (must stay empty)
    pub commutation_failures: Vec<String>,
    /// deepest entry index a distinct sample pair needed to separate
    pub injectivity_max_depth: Option<usize>,
    /// pairs whose thread separation depth disagrees with the symbol-level
    /// first difference (must stay empty)
    pub injectivity_failures: Vec<(String, String)>,
    /// threads enumerated for surjectivity evidence, all hit by a word
    pub surjectivity_threads: usize,
    pub surjectivity_failures: Vec<String>,
    pub axiom_search: Option<AxiomReport>,
}

impl ConjugacyReport {
    pub fn all_pass(&self) -> bool {
        self.commutation_failures.is_empty()
            && self.injectivity_failures.is_empty()
            && self.surjectivity_failures.is_empty()
    }
}

/// Verify the conjugacy square and collect injectivity/surjectivity
/// evidence:
///  (i)  ω(shift x) = ĝ(ω x) entrywise, for every sample;
///  (ii) distinct samples yield threads differing at some entry <= depth;
///  (iii) every depth-d thread whose deepest entry has complexity <= the
///        surjectivity bound is hit by a reconstructed word.
pub fn verify_conjugacy(
    q: &QuotientSystem,
    samples: &[TwoSidedWord],
    depth: usize,
    surjectivity_complexity: usize,
) -> Result<ConjugacyReport, QuotientError> {
    let mut commutation_failures = Vec::new();
    for x in samples {
        let lhs = q.omega(&shift_two_sided(x, 1), depth + 1)?;
        let rhs = apply_hat_g(q.system(), &q.omega(x, depth)?);
        if lhs != rhs {
            commutation_failures.push(x.to_string());
        }
    }

    // Injectivity evidence: threads must separate exactly as soon as the
    // words differ at some index >= -n. The expected separation depth is
    // computed by direct symbol comparison, independent of the thread
    // machinery; words differing only below -depth are out of scope and must
    // yield identical threads.
    let mut injectivity_max_depth = None;
    let mut injectivity_failures = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        for y in &samples[i + 1..] {
            if x == y {
                continue;
            }
            // beyond this index both words are right-periodic and one full
            // common period of agreement forces agreement forever
            let horizon = x.end().max(y.end()).max(0)
                + (x.right_period().len() * y.right_period().len()) as i64;
            let expected = (0..=depth).find(|&n| {
                (-(n as i64)..=horizon).any(|m| x.symbol_at(m) != y.symbol_at(m))
            });
            let tx = q.omega(x, depth)?;
            let ty = q.omega(y, depth)?;
            let actual = (0..=depth).find(|&n| tx.entry(n) != ty.entry(n));
            if expected != actual {
                injectivity_failures.push((x.to_string(), y.to_string()));
            }
            if let Some(n) = actual {
                if injectivity_max_depth.is_none_or(|m| n > m) {
                    injectivity_max_depth = Some(n);
                }
            }
        }
    }

    // Surjectivity: a depth-d thread is determined by its deepest entry, so
    // enumerate admissible deepest entries and reconstruct a word for each.
    let mut surjectivity_threads = 0usize;
    let mut surjectivity_failures = Vec::new();
    for deepest in enumerate_admissible_words(q.base(), surjectivity_complexity) {
        let entries: Vec<OneSidedWord> = (0..=depth)
            .map(|n| {
                let mut e = deepest.clone();
                for _ in 0..depth - n {
                    e = e.shift();
                }
                e
            })
            .collect();
        let thread = Thread::new(q.system(), entries).expect("shifts of one ray form a thread");
        surjectivity_threads += 1;
        let word = q.word_for_thread(&thread)?;
        if q.omega(&word, depth)? != thread {
            surjectivity_failures.push(thread.entry(depth).to_string());
        }
    }

    Ok(ConjugacyReport {
        samples: samples.len(),
        commutation_failures,
        injectivity_max_depth,
        injectivity_failures,
        surjectivity_threads,
        surjectivity_failures,
        axiom_search: None,
    })
}

/// All admissible canonical one-sided words with preperiod+period length
/// bounded by `max_complexity`.
pub fn enumerate_admissible_words(
    spec: &EdgeShiftSpec,
    max_complexity: usize,
) -> Vec<OneSidedWord> {
    let mut out = Vec::new();
    let symbols = spec.symbols();
    let mut stack: Vec<Vec<crate::symbolic::Symbol>> =
        symbols.iter().map(|&s| vec![s]).collect();
    while let Some(seq) = stack.pop() {
        // close into a period at every admissible split
        for cut in 0..seq.len() {
            let per = &seq[cut..];
            if spec.allows(seq[seq.len() - 1], per[0]) == Some(true) {
                let w = OneSidedWord::new(seq[..cut].to_vec(), per.to_vec());
                if w.complexity() <= max_complexity {
                    out.push(w);
                }
            }
        }
        if seq.len() < max_complexity {
            for &s in symbols {
                if spec.allows(seq[seq.len() - 1], s) == Some(true) {
                    let mut next = seq.clone();
                    next.push(s);
                    stack.push(next);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All admissible canonical two-sided words with |left| + |core| + |right|
/// bounded by `max_complexity`, over every anchor offset that keeps index 0
/// within one period of the core.
pub fn enumerate_admissible_two_sided(
    spec: &EdgeShiftSpec,
    max_complexity: usize,
) -> Vec<TwoSidedWord> {
    let mut cycles: Vec<Vec<crate::symbolic::Symbol>> = Vec::new();
    let mut paths: Vec<Vec<crate::symbolic::Symbol>> =
        spec.symbols().iter().map(|&s| vec![s]).collect();
    let mut all_paths = paths.clone();
    for _ in 1..max_complexity {
        let mut next = Vec::new();
        for p in &paths {
            for &s in spec.symbols() {
                if spec.allows(*p.last().unwrap(), s) == Some(true) {
                    let mut q = p.clone();
                    q.push(s);
                    next.push(q);
                }
            }
        }
        all_paths.extend(next.iter().cloned());
        paths = next;
    }
    for p in &all_paths {
        if spec.allows(*p.last().unwrap(), p[0]) == Some(true) {
            cycles.push(p.clone());
        }
    }
    let mut out = Vec::new();
    for left in &cycles {
        for right in &cycles {
            let budget = max_complexity.saturating_sub(left.len() + right.len());
            let mut cores: Vec<Vec<crate::symbolic::Symbol>> = vec![vec![]];
            let mut frontier: Vec<Vec<crate::symbolic::Symbol>> = vec![vec![]];
            for _ in 0..budget {
                let mut next = Vec::new();
                for c in &frontier {
                    let last = *c.last().unwrap_or(left.last().unwrap());
                    for &s in spec.symbols() {
                        if spec.allows(last, s) == Some(true) {
                            let mut d = c.clone();
                            d.push(s);
                            next.push(d);
                        }
                    }
                }
                cores.extend(next.iter().cloned());
                frontier = next;
            }
            for core in cores {
                // junction constraints
                let junction_ok = if core.is_empty() {
                    spec.allows(*left.last().unwrap(), right[0]) == Some(true)
                } else {
                    spec.allows(*core.last().unwrap(), right[0]) == Some(true)
                };
                if !junction_ok {
                    continue;
                }
                let span = core.len() as i64 + 1;
                for offset in -span..=span {
                    let w = TwoSidedWord::new(left.clone(), core.clone(), right.clone(), offset);
                    if spec.two_sided_admissible(&w)
                        && w.complexity() <= max_complexity
                    {
                        out.push(w);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.to_string().cmp(&b.to_string()));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::Verdict;
    use crate::sampling::{random_two_sided, rng_from_seed};

    fn full() -> QuotientSystem {
        QuotientSystem::new(EdgeShiftSpec::full_shift_2()).unwrap()
    }

    fn w2(s: &str) -> TwoSidedWord {
        TwoSidedWord::parse(s).unwrap()
    }

    fn w(s: &str) -> OneSidedWord {
        OneSidedWord::parse(s).unwrap()
    }

    #[test]
    fn rejects_reducible_shifts() {
        let spec = EdgeShiftSpec::new(
            vec![b'0', b'1'],
            vec![vec![true, false], vec![false, true]],
        )
        .unwrap();
        assert!(matches!(QuotientSystem::new(spec), Err(QuotientError::NotIrreducible)));
    }

    #[test]
    fn quotient_map_reads_forward_coordinates() {
        let q = full();
        assert_eq!(q.quotient_map(&w2("(0).(1)")).unwrap(), w("(1)"));
        assert_eq!(q.quotient_map(&w2("(01).(01)")).unwrap(), w("(01)"));
        // commutes with the shifts by definition
        let s = w2("(10)0.110(01)");
        assert_eq!(
            q.quotient_map(&shift_two_sided(&s, 1)).unwrap(),
            q.quotient_map(&s).unwrap().shift()
        );
    }

    #[test]
    fn omega_examples() {
        let q = full();
        // bi-periodic word: entries alternate between the two phase rays
        let s = w2("(01).(01)");
        let t = q.omega(&s, 2).unwrap();
        assert_eq!(t.entry(0), &w("(01)"));
        assert_eq!(t.entry(1), &w("(10)"));
        assert_eq!(t.entry(2), &w("(01)"));
        // depth 0 is the single class
        assert_eq!(q.omega(&s, 0).unwrap().entries().len(), 1);
        // a fixed word gives the constant thread
        let z = q.omega(&w2("(0).(0)"), 3).unwrap();
        assert!(z.entries().iter().all(|e| e == &w("(0)")));
    }

    #[test]
    fn conjugacy_on_seeded_full_shift_samples() {
        let q = full();
        let mut rng = rng_from_seed(42);
        let samples: Vec<TwoSidedWord> =
            (0..100).map(|_| random_two_sided(q.base(), &mut rng, 5)).collect();
        let report = verify_conjugacy(&q, &samples, 8, 4).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.surjectivity_threads > 0);
    }

    #[test]
    fn conjugacy_exhaustive_golden_mean() {
        let q = QuotientSystem::new(EdgeShiftSpec::golden_mean()).unwrap();
        let samples = enumerate_admissible_two_sided(q.base(), 5);
        assert!(!samples.is_empty());
        let report = verify_conjugacy(&q, &samples, 6, 4).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn quotient_constants_for_full_shift() {
        let q = full();
        let outcome = q.quotient_axiom_constants(&Rational::new(1, 64)).unwrap();
        let (c, a1, a2) = outcome.found.expect("constants found");
        assert_eq!(c.big_k, 1);
        assert_eq!(c.beta, Rational::new(1, 4));
        assert_eq!(c.gamma, Rational::new(1, 2));
        assert_eq!(a1.verdict, Verdict::Pass);
        assert_eq!(a2.verdict, Verdict::Pass);
    }

    #[test]
    fn quotient_constants_for_golden_mean() {
        let q = QuotientSystem::new(EdgeShiftSpec::golden_mean()).unwrap();
        let outcome = q.quotient_axiom_constants(&Rational::new(1, 64)).unwrap();
        let (c, _, _) = outcome.found.expect("constants found");
        assert_eq!(c.big_k, 1);
    }

    #[test]
    fn round_trip_words_and_threads() {
        // the inverse limit of the quotient, restricted to representable
        // threads, is in bijection with representable two-sided words
        let q = QuotientSystem::new(EdgeShiftSpec::golden_mean()).unwrap();
        let depth = 5usize;
        // injective: distinct words with distinct threads (words differing
        // only below -depth excluded by the separation check)
        let words = enumerate_admissible_two_sided(q.base(), 4);
        for x in &words {
            for y in &words {
                let tx = q.omega(x, depth).unwrap();
                let ty = q.omega(y, depth).unwrap();
                if x == y {
                    assert_eq!(tx, ty);
                } else {
                    // distinct words agreeing on all indices >= -depth give
                    // equal threads; verify equality is exactly that
                    let agree = (-(depth as i64)..=8).all(|n| x.symbol_at(n) == y.symbol_at(n))
                        && {
                            // also compare deep tails via the ray at -depth
                            shift_two_sided(x, -(depth as i64)).forward_ray()
                                == shift_two_sided(y, -(depth as i64)).forward_ray()
                        };
                    assert_eq!(tx == ty, agree, "{x} vs {y}");
                }
            }
        }
        // surjective onto depth-d threads: exercised by verify_conjugacy
        let report = verify_conjugacy(&q, &words[..words.len().min(10)], depth, 6).unwrap();
        assert!(report.surjectivity_failures.is_empty());
    }
}
