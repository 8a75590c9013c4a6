//! Reduced words in a free group of finite rank.
//!
//! A letter is a non-zero `i32`: `i` stands for the generator `x_i` and `-i`
//! for its inverse. Words are kept freely reduced at all times, so structural
//! equality is group equality.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ambient free group `F_n` with standard basis `x_1, ..., x_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeGroupContext {
    rank: usize,
}

impl FreeGroupContext {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::RankTooSmall(rank));
        }
        Ok(Self { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn identity(&self) -> Word {
        Word { ctx: *self, letters: Vec::new() }
    }

    /// The generator `x_i` (1-based). Panics when `i` is out of range.
    pub fn generator(&self, i: usize) -> Word {
        assert!(i >= 1 && i <= self.rank, "generator x{i} out of range for rank {}", self.rank);
        Word { ctx: *self, letters: vec![i as i32] }
    }

    pub fn generators(&self) -> impl Iterator<Item = Word> + '_ {
        (1..=self.rank).map(|i| self.generator(i))
    }

    /// All letters `x_1, x_1^-1, x_2, ...` in the canonical letter order.
    pub fn letters(&self) -> Vec<i32> {
        (1..=self.rank as i32).flat_map(|i| [i, -i]).collect()
    }

    fn check(&self, other: &FreeGroupContext) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::ContextMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &FreeGroupContext) -> Result<()> {
        self.check(other)
    }
}

/// Freely reduces a letter sequence in place.
pub(crate) fn reduce_letters(raw: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(raw.len());
    for &l in raw {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub(crate) fn invert_letters(letters: &[i32]) -> Vec<i32> {
    letters.iter().rev().map(|l| -l).collect()
}

/// Position of a letter in the order `x1 < x1- < x2 < x2- < ...`.
pub(crate) fn letter_key(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// A freely reduced word in `F_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    ctx: FreeGroupContext,
    letters: Vec<i32>,
}

impl Word {
    /// Reduces a raw signed-index sequence. Fails on indices outside `1..=rank`.
    pub fn reduce(raw: &[i32], ctx: FreeGroupContext) -> Result<Word> {
        for &l in raw {
            let index = l.unsigned_abs() as usize;
            if l == 0 || index > ctx.rank {
                return Err(Error::IndexOutOfRange { index, rank: ctx.rank });
            }
        }
        Ok(Word { ctx, letters: reduce_letters(raw) })
    }

    /// Builds a word from letters that are already reduced and in range.
    pub(crate) fn from_reduced(ctx: FreeGroupContext, letters: Vec<i32>) -> Word {
        debug_assert_eq!(reduce_letters(&letters), letters);
        Word { ctx, letters }
    }

    pub fn context(&self) -> FreeGroupContext {
        self.ctx
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.ctx.check(&other.ctx)?;
        Ok(self.concat(other))
    }

    fn concat(&self, other: &Word) -> Word {
        let mut a = self.letters.as_slice();
        let mut b = other.letters.as_slice();
        while let (Some(&l), Some(&r)) = (a.last(), b.first()) {
            if l != -r {
                break;
            }
            a = &a[..a.len() - 1];
            b = &b[1..];
        }
        let mut letters = Vec::with_capacity(a.len() + b.len());
        letters.extend_from_slice(a);
        letters.extend_from_slice(b);
        Word { ctx: self.ctx, letters }
    }

    pub fn invert(&self) -> Word {
        Word { ctx: self.ctx, letters: invert_letters(&self.letters) }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = self.ctx.identity();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// `a · self · a⁻¹`.
    pub fn conjugate_by(&self, a: &Word) -> Word {
        &(a * self) * &a.invert()
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == -l[l.len() - 1 - k] {
            k += 1;
        }
        let core = Word { ctx: self.ctx, letters: l[k..l.len() - k].to_vec() };
        let conjugator = Word { ctx: self.ctx, letters: l[..k].to_vec() };
        (core, conjugator)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != -b,
            _ => true,
        }
    }

    /// Length of the cyclic reduction.
    pub fn cyclic_len(&self) -> usize {
        self.cyclic_reduce().0.len()
    }

    /// `(root, exponent)` with `self = root^exponent` and `root` not a proper power.
    pub fn primitive_root(&self) -> Result<(Word, u32)> {
        if self.is_identity() {
            return Err(Error::EmptyWord);
        }
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        let c = &core.letters;
        let period = (1..=n)
            .filter(|p| n % p == 0)
            .find(|&p| (p..n).all(|i| c[i] == c[i - p]))
            .expect("the full length is always a period");
        let root = Word { ctx: self.ctx, letters: c[..period].to_vec() }.conjugate_by(&conj);
        Ok((root, (n / period) as u32))
    }

    /// True when both words are cyclically reduced rotations of each other.
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_identity() {
            return true;
        }
        let n = self.len();
        (0..n).any(|s| (0..n).all(|i| self.letters[(i + s) % n] == other.letters[i]))
    }

    /// Exponent sum of every generator (the image in the abelianization).
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.ctx.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += i64::from(l.signum());
        }
        v
    }

    /// Indices of the generators occurring in the word.
    pub fn support(&self) -> BTreeSet<usize> {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).collect()
    }

    /// Parses the text grammar: `x<i>` tokens with an optional `-` suffix;
    /// empty input or `e` is the identity.
    pub fn parse(s: &str, ctx: FreeGroupContext) -> Result<Word> {
        let raw = parse_letters(s)?;
        Word::reduce(&raw, ctx)
    }
}

/// Parses the word grammar without a rank check.
pub fn parse_letters(s: &str) -> Result<Vec<i32>> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Vec::new());
    }
    s.split_whitespace()
        .map(|tok| {
            let (body, inverse) = match tok.strip_suffix('-') {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let digits = body.strip_prefix('x').ok_or_else(|| Error::Parse(format!("bad token {tok:?}")))?;
            let i: i32 = digits
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Parse(format!("bad generator index in {tok:?}")))?;
            Ok(if inverse { -i } else { i })
        })
        .collect()
}

/// Largest generator index mentioned in a word text, at least 2.
pub fn inferred_rank(texts: &[&str]) -> Result<usize> {
    let mut rank = 2;
    for t in texts {
        for l in parse_letters(t)? {
            rank = rank.max(l.unsigned_abs() as usize);
        }
    }
    Ok(rank)
}

pub(crate) fn fmt_letters(letters: &[i32], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "e");
    }
    for (k, l) in letters.iter().enumerate() {
        if k > 0 {
            write!(f, " ")?;
        }
        write!(f, "x{}", l.unsigned_abs())?;
        if *l < 0 {
            write!(f, "-")?;
        }
    }
    Ok(())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(&self.letters, f)
    }
}

/// Shortlex order: shorter words first, then letterwise in the canonical letter order.
/// Serialized in the text grammar.
impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx.rank.cmp(&other.ctx.rank).then(self.letters.len().cmp(&other.letters.len())).then_with(|| {
            let a = self.letters.iter().map(|&l| letter_key(l));
            let b = other.letters.iter().map(|&l| letter_key(l));
            a.cmp(b)
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics on a context mismatch; use [`Word::multiply`] for the checked form.
impl std::ops::Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        assert_eq!(self.ctx, rhs.ctx, "multiplying words from different contexts");
        self.concat(rhs)
    }
}

impl std::ops::Mul<Word> for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn words_up_to(ctx: FreeGroupContext, max_len: usize) -> Vec<Word> {
    let mut out = vec![ctx.identity()];
    let mut frontier = vec![Vec::<i32>::new()];
    let letters = ctx.letters();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| Word { ctx, letters: v.clone() }));
        frontier = next;
    }
    out
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word_of_len<R: Rng + ?Sized>(ctx: FreeGroupContext, len: usize, rng: &mut R) -> Word {
    let n = ctx.rank as i32;
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let i = rng.gen_range(1..=n);
        let l = if rng.gen_bool(0.5) { i } else { -i };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    Word { ctx, letters }
}

/// A random reduced word whose length is uniform in `0..=max_len`.
pub fn random_word<R: Rng + ?Sized>(ctx: FreeGroupContext, max_len: usize, rng: &mut R) -> Word {
    let len = rng.gen_range(0..=max_len);
    random_word_of_len(ctx, len, rng)
}
