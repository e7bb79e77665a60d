//! Seeded, reproducible sample generation: random threads over any system,
//! stable/unstable partner threads, and random eventually periodic words.
//! All randomness comes from a caller-seeded generator; verification paths
//! never draw from OS entropy.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::inverse_limit::Thread;
use crate::rational::Rational;
use crate::symbolic::{EdgeShiftSpec, OneSidedWord, Symbol, TwoSidedWord};
use crate::system::{System, SystemError};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random thread: a uniformly chosen net point deepened by a random
/// preimage walk.
pub fn random_thread<S: System>(
    sys: &S,
    rng: &mut ChaCha8Rng,
    net: &[S::Point],
    depth: usize,
) -> Result<Thread<S::Point>, SystemError> {
    let mut entries = vec![net[rng.gen_range(0..net.len())].clone()];
    while entries.len() <= depth {
        let pre = sys.preimages(entries.last().unwrap())?;
        entries.push(pre[rng.gen_range(0..pre.len())].clone());
    }
    Ok(Thread::from_walk(entries))
}

/// A partner sharing entries 0..=prefix with `y` and walking random
/// preimages below.
pub fn stable_partner<S: System>(
    sys: &S,
    rng: &mut ChaCha8Rng,
    y: &Thread<S::Point>,
    prefix: usize,
) -> Result<Thread<S::Point>, SystemError> {
    assert!(prefix <= y.depth());
    let mut entries: Vec<S::Point> = y.entries()[..=prefix].to_vec();
    while entries.len() <= y.depth() {
        let pre = sys.preimages(entries.last().unwrap())?;
        entries.push(pre[rng.gen_range(0..pre.len())].clone());
    }
    Ok(Thread::from_walk(entries))
}

/// Smallest shared prefix depth that certifies d-hat(y, z) <= eps for any
/// continuation: γ^(j+1) · Σ_{k<K} γ^(-2k) · diam <= eps.
pub fn stable_prefix_for(
    eps: &Rational,
    gamma: &Rational,
    big_k: u32,
    diameter: &Rational,
) -> usize {
    let mut s2 = Rational::zero();
    for k in 0..big_k as i64 {
        s2 = s2 + gamma.pow(-2 * k);
    }
    let mut j = (big_k as usize).saturating_sub(1);
    loop {
        let bound = gamma.pow(j as i64 + 1) * s2.clone() * diameter.clone();
        if &bound <= eps {
            return j;
        }
        j += 1;
        assert!(j < 512, "eps too small for a finite stable prefix");
    }
}

/// A partner entrywise within eps of `y`: start at a net point within eps/2
/// of y_0 and track nearest preimages downward. Returns None if some entry
/// escapes the eps tube; a retry with a different base thread usually fixes
/// that.
pub fn unstable_partner<S: System>(
    sys: &S,
    rng: &mut ChaCha8Rng,
    y: &Thread<S::Point>,
    net: &[S::Point],
    eps: &Rational,
) -> Result<Option<Thread<S::Point>>, SystemError> {
    let half = eps.clone().half();
    let close: Vec<&S::Point> =
        net.iter().filter(|p| &sys.metric(p, y.entry(0)) <= &half).collect();
    if close.is_empty() {
        return Ok(None);
    }
    let start = close[rng.gen_range(0..close.len())].clone();
    let mut entries = vec![start];
    for n in 1..=y.depth() {
        let pre = sys.preimages(entries.last().unwrap())?;
        let nearest = pre
            .into_iter()
            .min_by(|a, b| {
                sys.metric(a, y.entry(n))
                    .cmp(&sys.metric(b, y.entry(n)))
                    .then_with(|| a.cmp(b))
            })
            .expect("preimages nonempty for surjective g");
        if &sys.metric(&nearest, y.entry(n)) > eps {
            return Ok(None);
        }
        entries.push(nearest);
    }
    Ok(Some(Thread::from_walk(entries)))
}

/// A random admissible walk step.
fn random_successor(spec: &EdgeShiftSpec, rng: &mut ChaCha8Rng, last: Symbol) -> Symbol {
    let succ = spec.admissible_successors(last);
    succ[rng.gen_range(0..succ.len())]
}

/// A random admissible one-sided word: a random walk whose tail closes into
/// a cycle the first time it revisits a symbol past the preperiod.
pub fn random_word(
    spec: &EdgeShiftSpec,
    rng: &mut ChaCha8Rng,
    max_preperiod: usize,
) -> OneSidedWord {
    let pre_len = rng.gen_range(0..=max_preperiod);
    let symbols = spec.symbols();
    let mut walk = vec![symbols[rng.gen_range(0..symbols.len())]];
    loop {
        let next = random_successor(spec, rng, *walk.last().unwrap());
        if walk.len() >= pre_len.max(1) {
            if let Some(pos) = walk[pre_len..].iter().position(|&s| s == next) {
                let cut = pre_len + pos;
                let w = OneSidedWord::new(walk[..cut].to_vec(), walk[cut..].to_vec());
                debug_assert!(spec.one_sided_admissible(&w));
                return w;
            }
        }
        walk.push(next);
    }
}

/// A deterministic left-periodic continuation before `next`: walking least
/// predecessors until a repeat yields (cycle, transient) with
/// …cycle·cycle·transient·next admissible.
pub fn predecessor_continuation(
    spec: &EdgeShiftSpec,
    next: Symbol,
) -> (Vec<Symbol>, Vec<Symbol>) {
    let pred = |s: Symbol| {
        spec.symbols()
            .iter()
            .copied()
            .find(|&t| spec.allows(t, s) == Some(true))
            .expect("every symbol has an incoming edge")
    };
    let mut chain = vec![pred(next)];
    loop {
        let p = pred(chain[0]);
        if let Some(pos) = chain.iter().position(|&s| s == p) {
            let mut cycle = vec![p];
            cycle.extend_from_slice(&chain[..pos]);
            let transient = chain[pos..].to_vec();
            return (cycle, transient);
        }
        chain.insert(0, p);
    }
}

/// A random admissible two-sided word: a forward walk closed into a right
/// cycle, preceded by a backward walk closed into a left cycle, shifted by a
/// random offset.
pub fn random_two_sided(
    spec: &EdgeShiftSpec,
    rng: &mut ChaCha8Rng,
    max_core: usize,
) -> TwoSidedWord {
    let symbols = spec.symbols();
    let target = rng.gen_range(0..=max_core);
    let mut walk = vec![symbols[rng.gen_range(0..symbols.len())]];
    let (stem, right) = loop {
        let next = random_successor(spec, rng, *walk.last().unwrap());
        if walk.len() >= target.max(1) {
            if let Some(pos) = walk[target..].iter().position(|&s| s == next) {
                let cut = target + pos;
                break (walk[..cut].to_vec(), walk[cut..].to_vec());
            }
        }
        walk.push(next);
    };
    let first = *stem.first().unwrap_or(&right[0]);
    // backward walk with random predecessors, closed the same way
    let mut back: Vec<Symbol> = Vec::new();
    let (left, transient) = loop {
        let anchor = *back.first().unwrap_or(&first);
        let preds = spec.admissible_prepends(anchor);
        let p = preds[rng.gen_range(0..preds.len())];
        if let Some(pos) = back.iter().position(|&s| s == p) {
            let mut cycle = vec![p];
            cycle.extend_from_slice(&back[..pos]);
            break (cycle, back[pos..].to_vec());
        }
        back.insert(0, p);
    };
    let mut core = transient;
    core.extend_from_slice(&stem);
    let offset = rng.gen_range(-(max_core as i64)..=max_core as i64);
    let w = TwoSidedWord::new(left, core, right, offset);
    debug_assert!(spec.two_sided_admissible(&w), "{w}");
    w
}
