//! Free group words and conjugacy classes.
//!
//! Letters are ordered `g₁ < g₁⁻¹ < g₂ < g₂⁻¹ < …` and printed as `a A b B …`
//! (uppercase for inverses). A conjugacy class is represented by the
//! lexicographically least rotation of a cyclically reduced word.
//!
//! Both streams are depth-first walks over a prefix tree. The class walk
//! prunes every prefix that cannot start a least rotation, tracking the
//! length of the longest Lyndon prefix as it descends; a node of length `t`
//! with Lyndon-prefix length `p` is a least rotation exactly when `p | t`,
//! and then `p` is its period. Memory is `O(L)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Environment variable overriding the enumeration budget.
pub const MAX_WORDS_ENV: &str = "SPECTRA_CENSUS_MAX_WORDS";

/// Budget used when the environment does not override it.
pub const DEFAULT_MAX_WORDS: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("rank must be between 1 and 26, got {0}")]
    InvalidRank(usize),
    #[error("maximum length must be at least 1")]
    InvalidLength,
    #[error("projected enumeration of {projected} items exceeds the budget of {budget}")]
    CapacityExceeded { projected: u64, budget: u64 },
    #[error("word reduces to the identity")]
    EmptyWord,
    #[error("word is not freely reduced")]
    NotReduced,
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// Enumeration budget from `SPECTRA_CENSUS_MAX_WORDS`, else the default.
pub fn default_budget() -> u64 {
    std::env::var(MAX_WORDS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_WORDS)
}

/// A generator or its inverse; code `2j` is `g_{j+1}`, `2j+1` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn cancels(self, next: Letter) -> bool {
        self.0 ^ 1 == next.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        write!(f, "{}", (base + self.generator() as u8) as char)
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Accepts only reduced input.
    pub fn new(letters: Vec<Letter>) -> Result<Self, GroupError> {
        if letters.windows(2).any(|w| w[0].cancels(w[1])) {
            return Err(GroupError::NotReduced);
        }
        Ok(Self { letters })
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for x in letters {
            if out.last().is_some_and(|y| y.cancels(x)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Self { letters: out }
    }

    pub(crate) fn from_codes_unchecked(codes: &[u8]) -> Self {
        Self {
            letters: codes.iter().map(|&c| Letter(c)).collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used plus one.
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Self {
        Self::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, m: usize) -> Self {
        Self::reduce((0..m).flat_map(|_| self.letters.iter().copied()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.len() == 1 || !l.cancels(f),
            _ => false,
        }
    }

    /// Cyclic shift moving the first `i` letters to the end.
    pub fn rotated(&self, i: usize) -> Self {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let i = i % n;
        let mut letters = self.letters[i..].to_vec();
        letters.extend_from_slice(&self.letters[..i]);
        Self { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GroupError;

    /// Parses `a`–`z` as generators and `A`–`Z` as inverses; whitespace is
    /// ignored and `e` alone is the empty word. The input must be reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            let l = match ch {
                'a'..='z' => Letter::new((ch as u8 - b'a') as usize, false),
                'A'..='Z' => Letter::new((ch as u8 - b'A') as usize, true),
                _ => return Err(GroupError::Parse(format!("unexpected character {ch:?} in {s:?}"))),
            };
            letters.push(l);
        }
        Word::new(letters)
    }
}

/// Canonical representative of a conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    word: Word,
    period: usize,
}

impl CyclicWord {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn is_primitive(&self) -> bool {
        self.period == self.word.len()
    }

    /// The class of the `m`-th power.
    pub fn pow(&self, m: usize) -> CyclicWord {
        CyclicWord {
            word: self.word.pow(m),
            period: self.period,
        }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.word.fmt(f)
    }
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> Result<(Word, Word), GroupError> {
    let l = w.letters();
    if l.is_empty() {
        return Err(GroupError::EmptyWord);
    }
    let (mut i, mut j) = (0usize, l.len() - 1);
    while i < j && l[i].cancels(l[j]) {
        i += 1;
        j -= 1;
    }
    let core = Word {
        letters: l[i..=j].to_vec(),
    };
    let conjugator = Word {
        letters: l[..i].to_vec(),
    };
    Ok((core, conjugator))
}

/// Least rotation and period of a cyclically reduced word.
pub fn canonical_rep(w: &Word) -> Result<CyclicWord, GroupError> {
    if w.is_empty() {
        return Err(GroupError::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(GroupError::NotCyclicallyReduced);
    }
    let n = w.len();
    let letters = w.letters();
    let at = |start: usize, k: usize| letters[(start + k) % n];
    let mut best = 0usize;
    for start in 1..n {
        for k in 0..n {
            let (a, b) = (at(start, k), at(best, k));
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    let word = w.rotated(best);
    let period = (1..=n)
        .find(|&p| n % p == 0 && (0..n).all(|k| word.letters[k] == word.letters[(k + p) % n]))
        .unwrap_or(n);
    Ok(CyclicWord { word, period })
}

/// Canonical class of an arbitrary nonempty reduced word.
pub fn conjugacy_class(w: &Word) -> Result<CyclicWord, GroupError> {
    let (core, _) = cyclic_reduce(w)?;
    canonical_rep(&core)
}

/// Number of reduced words of length exactly `n` in `F_k`.
pub fn reduced_word_count(k: usize, n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    let k = k as u64;
    (2 * k).saturating_mul((2 * k - 1).saturating_pow(n as u32 - 1))
}

/// Number of cyclically reduced words of length exactly `n ≥ 1` in `F_k`.
pub fn cyclically_reduced_count(k: usize, n: usize) -> u64 {
    let k = k as u64;
    let base = (2 * k - 1).saturating_pow(n as u32);
    let even = if n % 2 == 0 { 2 * (k - 1) } else { 0 };
    base.saturating_add(1).saturating_add(even)
}

fn check_args(k: usize, max_len: usize) -> Result<(), GroupError> {
    if k == 0 || k > 26 {
        return Err(GroupError::InvalidRank(k));
    }
    if max_len == 0 {
        return Err(GroupError::InvalidLength);
    }
    Ok(())
}

fn check_budget(projected: u64, budget: u64) -> Result<(), GroupError> {
    if projected > budget {
        Err(GroupError::CapacityExceeded { projected, budget })
    } else {
        Ok(())
    }
}

/// Projected size of a reduced-word walk up to `max_len`.
pub fn projected_words(k: usize, max_len: usize) -> u64 {
    (1..=max_len).fold(0u64, |acc, n| acc.saturating_add(reduced_word_count(k, n)))
}

/// Projected size of a class walk up to `max_len` (cyclically reduced words).
pub fn projected_classes(k: usize, max_len: usize) -> u64 {
    (1..=max_len).fold(0u64, |acc, n| acc.saturating_add(cyclically_reduced_count(k, n)))
}

/// Which prefix tree a [`Walker`] explores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkMode {
    /// Every reduced word.
    Reduced,
    /// Reduced prefixes of least rotations (prenecklaces).
    Necklace,
}

/// A node produced by a [`Walker`]: its depth, newest letter, and, in
/// necklace mode, `Some(period)` when the path is a canonical class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub depth: usize,
    pub letter: Letter,
    pub class_period: Option<usize>,
}

/// Subtree root used for sharding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardRoot {
    path: Vec<u8>,
    lyndon: Vec<usize>,
}

impl ShardRoot {
    pub fn word(&self) -> Word {
        Word::from_codes_unchecked(&self.path)
    }
}

/// Iterative preorder walk over reduced words, optionally pruned to
/// prenecklaces. The current path is available through [`Walker::path`].
#[derive(Clone, Debug)]
pub struct Walker {
    alphabet: u8,
    max_len: usize,
    mode: WalkMode,
    path: Vec<u8>,
    lyndon: Vec<usize>,
    floor: usize,
    started: bool,
    done: bool,
}

impl Walker {
    pub fn new(k: usize, max_len: usize, mode: WalkMode) -> Self {
        Self {
            alphabet: (2 * k) as u8,
            max_len,
            mode,
            path: Vec::with_capacity(max_len),
            lyndon: Vec::with_capacity(max_len),
            floor: 0,
            started: false,
            done: max_len == 0,
        }
    }

    /// Walks the subtree below `root`, starting with the root itself.
    pub fn subtree(k: usize, max_len: usize, mode: WalkMode, root: &ShardRoot) -> Self {
        let mut w = Self::new(k, max_len, mode);
        w.path = root.path.clone();
        w.lyndon = root.lyndon.clone();
        w.floor = root.path.len();
        w.done = root.path.len() > max_len || root.path.is_empty();
        w
    }

    /// Splits the walk into the nodes above `depth` (walked by
    /// `Walker::new(k, depth - 1, mode)`) and the subtree roots at `depth`.
    pub fn shard_roots(k: usize, depth: usize, mode: WalkMode) -> Vec<ShardRoot> {
        let mut w = Walker::new(k, depth, mode);
        let mut roots = Vec::new();
        while let Some(node) = w.next_node() {
            if node.depth == depth {
                roots.push(ShardRoot {
                    path: w.path.clone(),
                    lyndon: w.lyndon.clone(),
                });
            }
        }
        roots
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn word(&self) -> Word {
        Word::from_codes_unchecked(&self.path)
    }

    fn lower_bound(&self) -> u8 {
        match (self.mode, self.path.len()) {
            (WalkMode::Necklace, t) if t > 0 => {
                let p = self.lyndon[t - 1];
                self.path[t - p]
            }
            _ => 0,
        }
    }

    fn admissible(&self, c: u8) -> bool {
        self.path.last().is_none_or(|&last| last ^ 1 != c)
    }

    fn push(&mut self, c: u8) -> Node {
        let t = self.path.len();
        let p = if t == 0 {
            1
        } else {
            let p = self.lyndon[t - 1];
            if c == self.path[t - p] {
                p
            } else {
                t + 1
            }
        };
        self.path.push(c);
        self.lyndon.push(p);
        self.node()
    }

    fn node(&self) -> Node {
        let t = self.path.len();
        let class_period = match self.mode {
            WalkMode::Reduced => None,
            WalkMode::Necklace => {
                let p = self.lyndon[t - 1];
                let closes = t == 1 || self.path[t - 1] ^ 1 != self.path[0];
                (t % p == 0 && closes).then_some(p)
            }
        };
        Node {
            depth: t,
            letter: Letter(self.path[t - 1]),
            class_period,
        }
    }

    fn first_child_from(&self, start: u8) -> Option<u8> {
        (start..self.alphabet).find(|&c| self.admissible(c))
    }

    pub fn next_node(&mut self) -> Option<Node> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.floor > 0 {
                return Some(self.node());
            }
        }
        if self.path.len() < self.max_len {
            let lb = self.lower_bound();
            if let Some(c) = self.first_child_from(lb) {
                return Some(self.push(c));
            }
        }
        loop {
            if self.path.len() <= self.floor {
                self.done = true;
                return None;
            }
            let x = self.path.pop().expect("nonempty path");
            self.lyndon.pop();
            let lb = self.lower_bound();
            if let Some(c) = self.first_child_from(lb.max(x + 1)) {
                return Some(self.push(c));
            }
        }
    }
}

/// Stream of reduced words of length `1..=max_len` in depth-first order.
pub struct ReducedWords {
    walker: Walker,
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        self.walker.next_node().map(|_| self.walker.word())
    }
}

/// Stream of canonical conjugacy classes of core length `1..=max_len`.
pub struct ConjugacyClasses {
    walker: Walker,
}

impl Iterator for ConjugacyClasses {
    type Item = CyclicWord;

    fn next(&mut self) -> Option<CyclicWord> {
        loop {
            let node = self.walker.next_node()?;
            if let Some(period) = node.class_period {
                return Some(CyclicWord {
                    word: self.walker.word(),
                    period,
                });
            }
        }
    }
}

pub fn enumerate_reduced_words(k: usize, max_len: usize, budget: u64) -> Result<ReducedWords, GroupError> {
    check_args(k, max_len)?;
    check_budget(projected_words(k, max_len), budget)?;
    Ok(ReducedWords {
        walker: Walker::new(k, max_len, WalkMode::Reduced),
    })
}

pub fn enumerate_conjugacy_classes(
    k: usize,
    max_len: usize,
    budget: u64,
) -> Result<ConjugacyClasses, GroupError> {
    check_args(k, max_len)?;
    check_budget(projected_classes(k, max_len), budget)?;
    Ok(ConjugacyClasses {
        walker: Walker::new(k, max_len, WalkMode::Necklace),
    })
}

/// Classes within the subtree of one shard root.
pub fn conjugacy_classes_in_shard(k: usize, max_len: usize, root: &ShardRoot) -> ConjugacyClasses {
    ConjugacyClasses {
        walker: Walker::subtree(k, max_len, WalkMode::Necklace, root),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn letter_order_and_display() {
        let a = Letter::new(0, false);
        let ai = Letter::new(0, true);
        let b = Letter::new(1, false);
        assert!(a < ai && ai < b);
        assert_eq!(format!("{a}{ai}{b}"), "aAb");
        assert!(a.cancels(ai) && ai.cancels(a) && !a.cancels(b));
    }

    #[test]
    fn parse_rejects_unreduced() {
        assert_eq!("aAb".parse::<Word>(), Err(GroupError::NotReduced));
        assert!("a1".parse::<Word>().is_err());
        assert_eq!(w("a b A").to_string(), "abA");
    }

    #[test]
    fn stratum_counts_small() {
        let count = |k, n| {
            enumerate_reduced_words(k, n, u64::MAX)
                .unwrap()
                .filter(|x| x.len() == n)
                .count()
        };
        assert_eq!(count(2, 1), 4);
        assert_eq!(count(2, 3), 36);
        assert_eq!(count(3, 2), 30);
    }

    #[test]
    fn reduced_words_are_depth_first_lexicographic() {
        let words: Vec<String> = enumerate_reduced_words(2, 2, u64::MAX)
            .unwrap()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(&words[..5], &["a", "aa", "ab", "aB", "A"]);
        assert_eq!(words.len(), 4 + 12);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = cyclic_reduce(&w("abA")).unwrap();
        assert_eq!((core.to_string(), conj.to_string()), ("b".into(), "a".into()));
        let (core, conj) = cyclic_reduce(&w("ab")).unwrap();
        assert_eq!(core.to_string(), "ab");
        assert!(conj.is_empty());
        assert_eq!(cyclic_reduce(&Word::empty()), Err(GroupError::EmptyWord));
    }

    #[test]
    fn canonical_rep_examples() {
        assert_eq!(canonical_rep(&w("ba")).unwrap().to_string(), "ab");
        let c = canonical_rep(&w("abab")).unwrap();
        assert_eq!(c.to_string(), "abab");
        assert_eq!(c.period(), 2);
        assert!(!c.is_primitive());
        assert_eq!(canonical_rep(&w("abA")), Err(GroupError::NotCyclicallyReduced));
    }

    #[test]
    fn length_two_classes() {
        let classes: Vec<CyclicWord> = enumerate_conjugacy_classes(2, 2, u64::MAX)
            .unwrap()
            .filter(|c| c.len() == 2)
            .collect();
        // brute force over the 12 cyclically reduced words of length 2
        let mut brute = BTreeSet::new();
        for x in enumerate_reduced_words(2, 2, u64::MAX).unwrap() {
            if x.len() == 2 && x.is_cyclically_reduced() {
                brute.insert(canonical_rep(&x).unwrap());
            }
        }
        assert_eq!(classes.len(), brute.len());
        assert_eq!(classes.len(), 8);
        assert_eq!(classes.iter().filter(|c| !c.is_primitive()).count(), 4);
        let single: Vec<_> = enumerate_conjugacy_classes(2, 1, u64::MAX).unwrap().collect();
        assert_eq!(single.len(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_reduced_words(2, 30, 1000),
            Err(GroupError::CapacityExceeded { .. })
        ));
        assert!(matches!(
            enumerate_conjugacy_classes(2, 30, 1000),
            Err(GroupError::CapacityExceeded { .. })
        ));
        assert_eq!(enumerate_reduced_words(0, 3, 10).err(), Some(GroupError::InvalidRank(0)));
        assert_eq!(enumerate_reduced_words(2, 0, 10).err(), Some(GroupError::InvalidLength));
    }

    #[test]
    fn shards_cover_the_walk_once() {
        for mode in [WalkMode::Reduced, WalkMode::Necklace] {
            let full: Vec<Vec<u8>> = {
                let mut wk = Walker::new(2, 7, mode);
                let mut v = Vec::new();
                while wk.next_node().is_some() {
                    v.push(wk.path().to_vec());
                }
                v
            };
            let depth = 2;
            let mut sharded = Vec::new();
            let mut head = Walker::new(2, depth - 1, mode);
            while head.next_node().is_some() {
                sharded.push(head.path().to_vec());
            }
            for root in Walker::shard_roots(2, depth, mode) {
                let mut wk = Walker::subtree(2, 7, mode, &root);
                while wk.next_node().is_some() {
                    sharded.push(wk.path().to_vec());
                }
            }
            let mut a = full.clone();
            a.sort();
            sharded.sort();
            assert_eq!(a, sharded);
        }
    }

    #[test]
    fn known_class_appears_once() {
        let target = conjugacy_class(&w("abAb")).unwrap();
        let hits = enumerate_conjugacy_classes(2, 6, u64::MAX)
            .unwrap()
            .filter(|c| *c == target)
            .count();
        assert_eq!(hits, 1);
    }
}
