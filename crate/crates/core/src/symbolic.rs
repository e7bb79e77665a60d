//! Shifts of finite type and their eventually periodic points.
//!
//! Eventually periodic words are the representable dense subsets of shift
//! spaces: they are closed under the shift, under preimage, and under
//! splicing, and every metric value between two of them is an exactly
//! computable rational. One-sided words are written `pre(per)`, e.g. `01(10)`;
//! two-sided words are written `(left)pre.post(right)` with the dot marking
//! index 0.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::rational::Rational;
use crate::system::{System, SystemError};

/// Symbols are single printable characters stored as bytes.
pub type Symbol = u8;

fn symbols_to_string(sym: &[Symbol]) -> String {
    sym.iter().map(|&b| b as char).collect()
}

/// Reduce a period word to its primitive root (the shortest word it is a
/// power of).
fn primitive_root(per: &[Symbol]) -> Vec<Symbol> {
    let n = per.len();
    for d in 1..=n {
        if n % d == 0 && per.chunks(d).all(|c| c == &per[..d]) {
            return per[..d].to_vec();
        }
    }
    unreachable!()
}

/// A one-sided eventually periodic word `pre · per · per · …` in canonical
/// form: the period is primitive and the preperiod is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OneSidedWord {
    pre: Vec<Symbol>,
    per: Vec<Symbol>,
}

impl OneSidedWord {
    pub fn new(pre: Vec<Symbol>, per: Vec<Symbol>) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        let mut pre = pre;
        let mut per = primitive_root(&per);
        while !pre.is_empty() && pre.last() == per.last() {
            pre.pop();
            per.rotate_right(1);
        }
        OneSidedWord { pre, per }
    }

    /// The constant word `s s s …`.
    pub fn constant(s: Symbol) -> Self {
        OneSidedWord::new(vec![], vec![s])
    }

    pub fn preperiod(&self) -> &[Symbol] {
        &self.pre
    }

    pub fn period(&self) -> &[Symbol] {
        &self.per
    }

    /// preperiod length + period length of the canonical form.
    pub fn complexity(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    pub fn symbol_at(&self, n: usize) -> Symbol {
        if n < self.pre.len() {
            self.pre[n]
        } else {
            self.per[(n - self.pre.len()) % self.per.len()]
        }
    }

    /// Indices `0..bound` determine equality with `other`: beyond the longer
    /// preperiod both words are periodic, so one common period of agreement
    /// forces agreement everywhere.
    fn agreement_bound(&self, other: &OneSidedWord) -> usize {
        self.pre.len().max(other.pre.len()) + self.per.len().lcm(&other.per.len())
    }

    /// Index of the first disagreement, or `None` when the words are equal.
    pub fn first_disagreement(&self, other: &OneSidedWord) -> Option<usize> {
        (0..self.agreement_bound(other)).find(|&n| self.symbol_at(n) != other.symbol_at(n))
    }

    /// Drop index 0.
    pub fn shift(&self) -> OneSidedWord {
        if self.pre.is_empty() {
            let mut per = self.per.clone();
            per.rotate_left(1);
            OneSidedWord::new(vec![], per)
        } else {
            OneSidedWord::new(self.pre[1..].to_vec(), self.per.clone())
        }
    }

    pub fn prepend(&self, s: Symbol) -> OneSidedWord {
        let mut pre = Vec::with_capacity(self.pre.len() + 1);
        pre.push(s);
        pre.extend_from_slice(&self.pre);
        OneSidedWord::new(pre, self.per.clone())
    }

    /// All symbols that occur in the word.
    pub fn used_symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.pre.iter().chain(self.per.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| format!("missing '(' in word {s:?}"))?;
        if !s.ends_with(')') {
            return Err(format!("missing trailing ')' in word {s:?}"));
        }
        let pre = &s[..open];
        let per = &s[open + 1..s.len() - 1];
        if per.is_empty() {
            return Err(format!("empty period in word {s:?}"));
        }
        if !pre.chars().chain(per.chars()).all(|c| c.is_ascii_graphic()) {
            return Err(format!("non-printable symbol in word {s:?}"));
        }
        Ok(OneSidedWord::new(pre.bytes().collect(), per.bytes().collect()))
    }
}

impl fmt::Display for OneSidedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", symbols_to_string(&self.pre), symbols_to_string(&self.per))
    }
}

impl fmt::Debug for OneSidedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ord for OneSidedWord {
    /// Lexicographic order on the symbol streams; this is the documented
    /// canonical order used for preimage selection.
    fn cmp(&self, other: &Self) -> Ordering {
        for n in 0..self.agreement_bound(other) {
            match self.symbol_at(n).cmp(&other.symbol_at(n)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for OneSidedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// d(x, y) = 2^(-min{n : x_n != y_n}), and 0 exactly when x = y.
pub fn metric_one_sided(x: &OneSidedWord, y: &OneSidedWord) -> Rational {
    match x.first_disagreement(y) {
        None => Rational::zero(),
        Some(m) => Rational::two_pow_neg(m as u32),
    }
}

/// A bi-infinite eventually periodic word: a left period repeating to -inf, a
/// finite core, and a right period repeating to +inf, with `start` the index
/// of the first core symbol. Canonical form is unique, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TwoSidedWord {
    left: Vec<Symbol>,
    core: Vec<Symbol>,
    right: Vec<Symbol>,
    start: i64,
}

impl TwoSidedWord {
    pub fn new(left: Vec<Symbol>, core: Vec<Symbol>, right: Vec<Symbol>, start: i64) -> Self {
        assert!(!left.is_empty() && !right.is_empty(), "periods must be nonempty");
        let mut w = TwoSidedWord { left, core, right, start };
        w.canonicalize();
        w
    }

    /// The bi-periodic word `… p p . p p …` with `p[0]` at index 0.
    pub fn periodic(p: Vec<Symbol>) -> Self {
        TwoSidedWord::new(p.clone(), vec![], p, 0)
    }

    fn canonicalize(&mut self) {
        self.left = primitive_root(&self.left);
        self.right = primitive_root(&self.right);
        // Absorb core symbols that already continue a periodic tail.
        loop {
            let mut changed = false;
            if let Some(&c) = self.core.last() {
                if c == *self.right.last().unwrap() {
                    self.core.pop();
                    self.right.rotate_right(1);
                    changed = true;
                }
            }
            if let Some(&c) = self.core.first() {
                if c == self.left[0] {
                    self.core.remove(0);
                    self.left.rotate_left(1);
                    self.start += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if self.core.is_empty() {
            self.normalize_empty_core();
        }
    }

    /// With an empty core the word is a pure junction of two periodic tails.
    /// Either the two patterns agree (a fully periodic word, re-anchored at
    /// index 0) or the junction position is slid to its leftmost legal spot.
    fn normalize_empty_core(&mut self) {
        let l = self.left.len();
        let r = self.right.len();
        let span = l.lcm(&r);
        let fully_periodic = (0..span).all(|j| self.right[j % r] == self.left[j % l]);
        if fully_periodic {
            let period: Vec<Symbol> = (0..r as i64)
                .map(|j| self.right[((j - self.start).rem_euclid(r as i64)) as usize])
                .collect();
            let mut left = Vec::with_capacity(r);
            for i in 0..r as i64 {
                left.push(period[((i - (r as i64)).rem_euclid(r as i64)) as usize]);
            }
            self.left = primitive_root(&left);
            self.right = primitive_root(&period);
            self.start = 0;
        } else {
            while self.left.last() == self.right.last() {
                self.left.rotate_right(1);
                self.right.rotate_right(1);
                self.start -= 1;
            }
        }
    }

    pub fn left_period(&self) -> &[Symbol] {
        &self.left
    }

    pub fn right_period(&self) -> &[Symbol] {
        &self.right
    }

    pub fn core(&self) -> &[Symbol] {
        &self.core
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.core.len() as i64
    }

    /// left period length + core length + right period length.
    pub fn complexity(&self) -> usize {
        self.left.len() + self.core.len() + self.right.len()
    }

    pub fn symbol_at(&self, n: i64) -> Symbol {
        if n < self.start {
            let l = self.left.len() as i64;
            self.left[((n - self.start).rem_euclid(l)) as usize]
        } else if n < self.end() {
            self.core[(n - self.start) as usize]
        } else {
            let r = self.right.len() as i64;
            self.right[((n - self.end()).rem_euclid(r)) as usize]
        }
    }

    pub fn used_symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self
            .left
            .iter()
            .chain(self.core.iter())
            .chain(self.right.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The forward ray (x_0, x_1, x_2, …) as a one-sided word.
    pub fn forward_ray(&self) -> OneSidedWord {
        let end = self.end().max(0);
        let pre: Vec<Symbol> = (0..end).map(|n| self.symbol_at(n)).collect();
        let r = self.right.len() as i64;
        let per: Vec<Symbol> = (0..r).map(|i| self.symbol_at(end + i)).collect();
        OneSidedWord::new(pre, per)
    }

    /// Parse `(left)pre.post(right)`; the dot marks index 0.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let err = |m: &str| format!("{m} in two-sided word {s:?}");
        let rest = s.strip_prefix('(').ok_or_else(|| err("missing leading '('"))?;
        let close = rest.find(')').ok_or_else(|| err("missing ')'"))?;
        let left: Vec<Symbol> = rest[..close].bytes().collect();
        let rest = &rest[close + 1..];
        let open = rest.rfind('(').ok_or_else(|| err("missing right period"))?;
        if !rest.ends_with(')') {
            return Err(err("missing trailing ')'"));
        }
        let right: Vec<Symbol> = rest[open + 1..rest.len() - 1].bytes().collect();
        let mid = &rest[..open];
        let dot = mid.find('.').ok_or_else(|| err("missing '.' index marker"))?;
        if left.is_empty() || right.is_empty() {
            return Err(err("empty period"));
        }
        let core: Vec<Symbol> = mid.bytes().filter(|&b| b != b'.').collect();
        Ok(TwoSidedWord::new(left, core, right, -(dot as i64)))
    }
}

impl fmt::Display for TwoSidedWord {
    /// The window between the printed periods always contains index 0, so the
    /// periods are printed in the phase anchored at the window edges; parsing
    /// the output reproduces the word exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.start.min(0);
        let hi = self.end().max(0);
        let l = self.left.len() as i64;
        let r = self.right.len() as i64;
        let left_phase: String = (0..l).map(|i| self.symbol_at(lo - l + i) as char).collect();
        let right_phase: String = (0..r).map(|i| self.symbol_at(hi + i) as char).collect();
        let before: String = (lo..0).map(|n| self.symbol_at(n) as char).collect();
        let after: String = (0..hi).map(|n| self.symbol_at(n) as char).collect();
        write!(f, "({left_phase}){before}.{after}({right_phase})")
    }
}

impl fmt::Debug for TwoSidedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Translate indices: the result has symbol s_(m+n) at index m. n = 1 is the
/// usual left shift.
pub fn shift_two_sided(s: &TwoSidedWord, n: i64) -> TwoSidedWord {
    TwoSidedWord::new(s.left.clone(), s.core.clone(), s.right.clone(), s.start - n)
}

/// The bi-infinite word taking its past (indices < 0) from `past` and its
/// future (indices >= 0) from `future`.
pub fn splice(past: &TwoSidedWord, future: &TwoSidedWord) -> TwoSidedWord {
    let l = past.left.len() as i64;
    let w_lo = past.start.min(0);
    let w_hi = future.end().max(0);
    let left: Vec<Symbol> = (0..l).map(|i| past.symbol_at(w_lo - l + i)).collect();
    let core: Vec<Symbol> = (w_lo..w_hi)
        .map(|n| if n < 0 { past.symbol_at(n) } else { future.symbol_at(n) })
        .collect();
    let r = future.right.len() as i64;
    let right: Vec<Symbol> = (0..r).map(|i| future.symbol_at(w_hi + i)).collect();
    TwoSidedWord::new(left, core, right, w_lo)
}

/// d(s, t) = sum over n in Z of 2^(-|n|) [s_n != t_n], evaluated in closed
/// form: a finite window term plus two geometric tails.
pub fn metric_two_sided(s: &TwoSidedWord, t: &TwoSidedWord) -> Rational {
    let q = s.left.len().lcm(&t.left.len()) as i64;
    let p = s.right.len().lcm(&t.right.len()) as i64;
    let lo = (s.start.min(t.start) - q).min(0);
    let hi = (s.end().max(t.end()) + p - 1).max(0);
    let differs = |n: i64| s.symbol_at(n) != t.symbol_at(n);
    let weight = |n: i64| {
        let e = n.unsigned_abs() as u32;
        Rational::two_pow_neg(e)
    };

    let mut total = Rational::zero();
    for n in lo..=hi {
        if differs(n) {
            total = total + weight(n);
        }
    }
    // Right tail: for n > hi the disagreement pattern has period p.
    let right_tail_scale = (Rational::one() - Rational::two_pow_neg(p as u32)).recip();
    let mut right_tail = Rational::zero();
    for j in 0..p {
        if differs(hi + 1 + j) {
            right_tail = right_tail + weight(hi + 1 + j);
        }
    }
    total = total + right_tail * right_tail_scale;
    // Left tail: for n < lo the pattern has period q.
    let left_tail_scale = (Rational::one() - Rational::two_pow_neg(q as u32)).recip();
    let mut left_tail = Rational::zero();
    for j in 0..q {
        if differs(lo - 1 - j) {
            left_tail = left_tail + weight(lo - 1 - j);
        }
    }
    total + left_tail * left_tail_scale
}

/// A shift of finite type presented by a 0/1 adjacency matrix over a finite
/// symbol alphabet; entry (i, j) = 1 means symbol j may follow symbol i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeShiftSpec {
    symbols: Vec<Symbol>,
    adjacency: Vec<Vec<bool>>,
}

impl EdgeShiftSpec {
    pub fn new(symbols: Vec<Symbol>, adjacency: Vec<Vec<bool>>) -> Result<Self, SystemError> {
        let n = symbols.len();
        if n == 0 {
            return Err(SystemError::InvalidConfig("empty alphabet".into()));
        }
        let mut sorted = symbols.clone();
        sorted.dedup();
        if sorted.len() != n {
            return Err(SystemError::InvalidConfig("duplicate symbols".into()));
        }
        if adjacency.len() != n || adjacency.iter().any(|row| row.len() != n) {
            return Err(SystemError::InvalidConfig(format!(
                "adjacency must be {n}x{n} to match the alphabet"
            )));
        }
        for i in 0..n {
            if !adjacency[i].iter().any(|&b| b) {
                return Err(SystemError::InvalidConfig(format!(
                    "symbol {:?} has no outgoing edge",
                    symbols[i] as char
                )));
            }
            if !(0..n).any(|j| adjacency[j][i]) {
                return Err(SystemError::InvalidConfig(format!(
                    "symbol {:?} has no incoming edge",
                    symbols[i] as char
                )));
            }
        }
        Ok(EdgeShiftSpec { symbols, adjacency })
    }

    pub fn full_shift(symbols: Vec<Symbol>) -> Self {
        let n = symbols.len();
        EdgeShiftSpec::new(symbols, vec![vec![true; n]; n]).expect("full shift is valid")
    }

    /// The full shift on {0, 1}.
    pub fn full_shift_2() -> Self {
        EdgeShiftSpec::full_shift(vec![b'0', b'1'])
    }

    /// Adjacency [[1,1],[1,0]]: the word 11 is forbidden.
    pub fn golden_mean() -> Self {
        EdgeShiftSpec::new(vec![b'0', b'1'], vec![vec![true, true], vec![true, false]])
            .expect("golden mean shift is valid")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn index_of(&self, s: Symbol) -> Option<usize> {
        self.symbols.iter().position(|&t| t == s)
    }

    /// May `b` follow `a`?
    pub fn allows(&self, a: Symbol, b: Symbol) -> Option<bool> {
        Some(self.adjacency[self.index_of(a)?][self.index_of(b)?])
    }

    pub fn one_sided_admissible(&self, w: &OneSidedWord) -> bool {
        let bound = w.preperiod().len() + w.period().len();
        (0..bound).all(|n| self.allows(w.symbol_at(n), w.symbol_at(n + 1)) == Some(true))
    }

    pub fn two_sided_admissible(&self, w: &TwoSidedWord) -> bool {
        let lo = w.start().min(0) - w.left_period().len() as i64 - 1;
        let hi = w.end().max(0) + w.right_period().len() as i64;
        (lo..hi).all(|n| self.allows(w.symbol_at(n), w.symbol_at(n + 1)) == Some(true))
    }

    /// Admissible one-step extensions to the left of a word starting with
    /// `first`, in symbol order.
    pub fn admissible_prepends(&self, first: Symbol) -> Vec<Symbol> {
        self.symbols
            .iter()
            .copied()
            .filter(|&s| self.allows(s, first) == Some(true))
            .collect()
    }

    /// Symbols that may follow `last`, in symbol order.
    pub fn admissible_successors(&self, last: Symbol) -> Vec<Symbol> {
        self.symbols
            .iter()
            .copied()
            .filter(|&s| self.allows(last, s) == Some(true))
            .collect()
    }

    /// A canonical admissible eventually periodic tail starting at `from`:
    /// walk least admissible successors until a symbol repeats.
    pub fn canonical_tail(&self, from: Symbol) -> OneSidedWord {
        let mut walk = vec![from];
        loop {
            let last = *walk.last().unwrap();
            let next = self
                .symbols
                .iter()
                .copied()
                .find(|&s| self.allows(last, s) == Some(true))
                .expect("every symbol has an outgoing edge");
            if let Some(pos) = walk.iter().position(|&s| s == next) {
                let pre = walk[..pos].to_vec();
                let per = walk[pos..].to_vec();
                return OneSidedWord::new(pre, per);
            }
            walk.push(next);
        }
    }

    pub fn is_irreducible(&self) -> bool {
        is_irreducible_matrix(&self.adjacency)
    }
}

/// Strong connectivity of the directed graph of a 0/1 matrix: every vertex is
/// reachable from vertex 0 and vertex 0 is reachable from every vertex.
pub fn is_irreducible_matrix(adjacency: &[Vec<bool>]) -> bool {
    let n = adjacency.len();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let edge = if forward { adjacency[v][w] } else { adjacency[w][v] };
                if edge && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    };
    reach(true) && reach(false)
}

/// The one-sided shift space of an [`EdgeShiftSpec`], as a [`System`].
#[derive(Clone, Debug)]
pub struct OneSidedShift {
    spec: EdgeShiftSpec,
    name: String,
}

impl OneSidedShift {
    pub fn new(spec: EdgeShiftSpec, name: impl Into<String>) -> Self {
        OneSidedShift { spec, name: name.into() }
    }

    pub fn full_shift_2() -> Self {
        OneSidedShift::new(EdgeShiftSpec::full_shift_2(), "fullshift2")
    }

    pub fn golden_mean() -> Self {
        OneSidedShift::new(EdgeShiftSpec::golden_mean(), "goldenmean")
    }

    pub fn spec(&self) -> &EdgeShiftSpec {
        &self.spec
    }

    /// Smallest L with 2^(-L) <= h.
    pub fn depth_for_resolution(resolution: &Rational) -> u32 {
        let mut l = 0u32;
        while Rational::two_pow_neg(l) > *resolution {
            l += 1;
            assert!(l <= 64, "resolution too fine");
        }
        l
    }

    fn admissible_prefixes(&self, len: u32) -> Vec<Vec<Symbol>> {
        let mut acc: Vec<Vec<Symbol>> = self.spec.symbols().iter().map(|&s| vec![s]).collect();
        for _ in 1..len {
            let mut next = Vec::new();
            for p in &acc {
                let last = *p.last().unwrap();
                for &s in self.spec.symbols() {
                    if self.spec.allows(last, s) == Some(true) {
                        let mut q = p.clone();
                        q.push(s);
                        next.push(q);
                    }
                }
            }
            acc = next;
        }
        acc
    }
}

impl System for OneSidedShift {
    type Point = OneSidedWord;

    fn name(&self) -> &str {
        &self.name
    }

    fn metric(&self, x: &OneSidedWord, y: &OneSidedWord) -> Rational {
        metric_one_sided(x, y)
    }

    fn apply(&self, x: &OneSidedWord) -> OneSidedWord {
        x.shift()
    }

    fn preimages(&self, y: &OneSidedWord) -> Result<Vec<OneSidedWord>, SystemError> {
        let mut out: Vec<OneSidedWord> = self
            .spec
            .admissible_prepends(y.symbol_at(0))
            .into_iter()
            .map(|s| y.prepend(s))
            .collect();
        out.sort();
        Ok(out)
    }

    fn diameter(&self) -> Rational {
        Rational::one()
    }

    fn net(&self, resolution: &Rational) -> Vec<OneSidedWord> {
        let l = Self::depth_for_resolution(resolution).max(1);
        let mut out = Vec::new();
        for prefix in self.admissible_prefixes(l) {
            let tail = self.spec.canonical_tail(*prefix.last().unwrap());
            let mut pre = prefix;
            pre.pop();
            pre.extend_from_slice(tail.preperiod());
            out.push(OneSidedWord::new(pre, tail.period().to_vec()));
        }
        out.sort();
        out.dedup();
        out
    }

    fn modulus(&self, k: u32, delta_out: &Rational) -> Rational {
        // The shift dilates by at most 2 per step.
        delta_out * &Rational::two_pow_neg(k)
    }

    fn parse_point(&self, s: &str) -> Result<OneSidedWord, SystemError> {
        let w = OneSidedWord::parse(s).map_err(|reason| SystemError::InvalidPoint {
            system: self.name.clone(),
            input: s.to_string(),
            reason,
        })?;
        if !self.spec.one_sided_admissible(&w) {
            return Err(SystemError::InvalidPoint {
                system: self.name.clone(),
                input: s.to_string(),
                reason: "word is not admissible under the adjacency matrix".into(),
            });
        }
        Ok(w)
    }
}
