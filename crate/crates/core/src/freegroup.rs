//! Reduced words in the free group on `k` generators.
//!
//! Letters are encoded as `0..2k` with `inv(l) = l ^ 1`, so letter `2i` is the
//! `i`-th generator and `2i + 1` its inverse. Printed forms use lowercase for
//! generators and uppercase for inverses (`a`, `A`, `b`, `B`, ...).

use std::fmt;

use crate::error::{Error, Result};

/// Letter index in `0..2k`.
pub type Letter = u8;

/// Inverse letter.
#[inline]
pub fn inv(l: Letter) -> Letter {
    l ^ 1
}

/// The doubled generating set of the free group on `k` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Alphabet {
    k: usize,
}

impl Alphabet {
    pub const MAX_K: usize = 13;

    pub fn new(k: usize) -> Result<Self> {
        if !(2..=Self::MAX_K).contains(&k) {
            return Err(Error::InvalidAlphabet(k));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of letters `2k`.
    pub fn size(&self) -> usize {
        2 * self.k
    }

    /// Branching number `q = 2k - 1`.
    pub fn q(&self) -> usize {
        2 * self.k - 1
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        0..self.size() as Letter
    }

    pub fn letter_char(&self, l: Letter) -> char {
        let base = b'a' + l / 2;
        if l.is_multiple_of(2) {
            base as char
        } else {
            base.to_ascii_uppercase() as char
        }
    }

    pub fn parse_letter(&self, c: char) -> Result<Letter> {
        let lower = c.to_ascii_lowercase();
        if !lower.is_ascii_lowercase() {
            return Err(Error::Parse(format!("not a letter: {c:?}")));
        }
        let idx = (lower as u8 - b'a') as usize;
        if idx >= self.k {
            return Err(Error::Parse(format!("letter {c:?} outside alphabet of rank {}", self.k)));
        }
        Ok((2 * idx + usize::from(c.is_ascii_uppercase())) as Letter)
    }

    /// Number of reduced words of length `n`.
    pub fn sphere_size(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.size() * self.q().pow(n as u32 - 1)
        }
    }

    /// Position of letter `l` among the `q` letters allowed after `prev`.
    #[inline]
    pub(crate) fn choice_of(&self, prev: Letter, l: Letter) -> usize {
        debug_assert_ne!(l, inv(prev));
        if l < inv(prev) {
            l as usize
        } else {
            l as usize - 1
        }
    }

    /// Inverse of [`Alphabet::choice_of`].
    #[inline]
    pub(crate) fn letter_of_choice(&self, prev: Letter, c: usize) -> Letter {
        let skip = inv(prev) as usize;
        (if c < skip { c } else { c + 1 }) as Letter
    }

    /// Lexicographic rank of a reduced word among the words of its length.
    pub fn rank(&self, w: &[Letter]) -> usize {
        let mut iter = w.iter();
        let Some(&first) = iter.next() else {
            return 0;
        };
        let mut r = first as usize;
        let mut prev = first;
        for &l in iter {
            r = r * self.q() + self.choice_of(prev, l);
            prev = l;
        }
        r
    }

    /// The reduced word of length `n` with lexicographic rank `r`.
    pub fn unrank(&self, n: usize, r: usize) -> Word {
        let mut letters = vec![0 as Letter; n];
        self.unrank_into(r, &mut letters);
        Word { letters }
    }

    pub(crate) fn unrank_into(&self, mut r: usize, out: &mut [Letter]) {
        let n = out.len();
        if n == 0 {
            return;
        }
        let q = self.q();
        let mut choices = [0usize; 64];
        for slot in choices[1..n].iter_mut().rev() {
            *slot = r % q;
            r /= q;
        }
        out[0] = r as Letter;
        for i in 1..n {
            out[i] = self.letter_of_choice(out[i - 1], choices[i]);
        }
    }
}

/// A reduced word; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a word from letters, rejecting unreduced input.
    pub fn from_letters(alphabet: &Alphabet, letters: Vec<Letter>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= alphabet.size()) {
            return Err(Error::Parse(format!("letter index {bad} outside alphabet")));
        }
        if letters.windows(2).any(|p| p[1] == inv(p[0])) {
            return Err(Error::Parse("word is not reduced".into()));
        }
        Ok(Self { letters })
    }

    pub fn letter(alphabet: &Alphabet, l: Letter) -> Self {
        debug_assert!((l as usize) < alphabet.size());
        Self { letters: vec![l] }
    }

    pub fn parse(alphabet: &Alphabet, s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(Self::identity());
        }
        let letters = s.chars().map(|c| alphabet.parse_letter(c)).collect::<Result<Vec<_>>>()?;
        Self::from_letters(alphabet, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word { letters: self.letters[..n.min(self.len())].to_vec() }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&l| inv(l)).collect() }
    }

    /// Reduced form of the concatenation `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&inv(l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.letters.starts_with(&prefix.letters)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

/// Group law with an alphabet check on both operands.
pub fn reduced_mul(alphabet: &Alphabet, x: &Word, y: &Word) -> Result<Word> {
    for w in [x, y] {
        if w.letters.iter().any(|&l| l as usize >= alphabet.size()) {
            return Err(Error::AlphabetMismatch);
        }
    }
    Ok(x.mul(y))
}

pub fn common_prefix_len(x: &[Letter], y: &[Letter]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("e");
        }
        for &l in &self.word.letters {
            write!(f, "{}", self.alphabet.letter_char(l))?;
        }
        Ok(())
    }
}

/// Words per chunk when a sphere is split for parallel consumption.
pub const CHUNK_WORDS: usize = 1024;

/// The reduced words of length `n`, optionally starting with `start` and not
/// ending with `forbid_last`, in lexicographic order.
///
/// Words are addressed by lexicographic rank; a `start` constraint is a
/// contiguous rank range, so chunks are rank intervals filtered by the last
/// letter.
#[derive(Clone, Debug)]
pub struct Sphere {
    alphabet: Alphabet,
    n: usize,
    forbid_last: Option<Letter>,
    lo: usize,
    hi: usize,
}

impl Sphere {
    pub fn new(alphabet: Alphabet, n: usize, start: Option<Letter>, forbid_last: Option<Letter>) -> Self {
        let (lo, hi) = match (n, start) {
            (0, Some(_)) => (0, 0),
            (0, None) => (0, 1),
            (_, None) => (0, alphabet.sphere_size(n)),
            (_, Some(a)) => {
                let block = alphabet.q().pow(n as u32 - 1);
                (a as usize * block, (a as usize + 1) * block)
            }
        };
        Self { alphabet, n, forbid_last, lo, hi }
    }

    pub fn word_len(&self) -> usize {
        self.n
    }

    /// Rank range of the underlying unconstrained sphere covered by this stream.
    pub fn rank_range(&self) -> std::ops::Range<usize> {
        self.lo..self.hi
    }

    /// Splits the rank range into consecutive chunks of at most `CHUNK_WORDS` ranks.
    pub fn chunks(&self) -> Vec<Sphere> {
        (self.lo..self.hi)
            .step_by(CHUNK_WORDS)
            .map(|lo| Sphere { lo, hi: (lo + CHUNK_WORDS).min(self.hi), ..self.clone() })
            .collect()
    }

    /// Calls `f` with each admitted word, in order, reusing one buffer.
    pub fn for_each(&self, mut f: impl FnMut(&[Letter])) {
        if self.lo >= self.hi {
            return;
        }
        let mut buf = vec![0 as Letter; self.n];
        self.alphabet.unrank_into(self.lo, &mut buf);
        for r in self.lo..self.hi {
            if r > self.lo {
                self.advance(&mut buf);
            }
            if self.n > 0 && Some(buf[self.n - 1]) == self.forbid_last {
                continue;
            }
            f(&buf);
        }
    }

    /// Steps `buf` to the lexicographic successor among reduced words.
    fn advance(&self, buf: &mut [Letter]) {
        let q = self.alphabet.q();
        let mut i = self.n;
        while i > 1 {
            i -= 1;
            let c = self.alphabet.choice_of(buf[i - 1], buf[i]);
            if c + 1 < q {
                buf[i] = self.alphabet.letter_of_choice(buf[i - 1], c + 1);
                self.reset_tail(buf, i + 1);
                return;
            }
        }
        buf[0] += 1;
        self.reset_tail(buf, 1);
    }

    fn reset_tail(&self, buf: &mut [Letter], from: usize) {
        for j in from..self.n {
            buf[j] = self.alphabet.letter_of_choice(buf[j - 1], 0);
        }
    }

    pub fn words(&self) -> Vec<Word> {
        let mut out = Vec::new();
        self.for_each(|w| out.push(Word { letters: w.to_vec() }));
        out
    }

    pub fn count(&self) -> usize {
        let mut c = 0;
        self.for_each(|_| c += 1);
        c
    }
}

/// Shorthand for [`Sphere::new`].
pub fn sphere(alphabet: Alphabet, n: usize, start: Option<Letter>, forbid_last: Option<Letter>) -> Sphere {
    Sphere::new(alphabet, n, start, forbid_last)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&ab(), s).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(w("ab").mul(&w("Ba")), w("aa"));
        assert_eq!(w("ab").mul(&w("BA")), Word::identity());
        assert_eq!(w("aba").mul(&w("AB")), w("a"));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("aab").inverse(), w("BAA"));
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(common_prefix_len(w("ab").letters(), w("aB").letters()), 1);
        assert_eq!(common_prefix_len(w("ab").letters(), w("ab").letters()), 2);
        assert_eq!(common_prefix_len(w("a").letters(), w("Ba").letters()), 0);
    }

    #[test]
    fn unreduced_input_is_rejected() {
        assert!(Word::parse(&ab(), "aA").is_err());
        assert!(Word::parse(&ab(), "c").is_err());
    }

    #[test]
    fn foreign_letters_are_a_mismatch() {
        let big = Alphabet::new(3).unwrap();
        let x = Word::parse(&big, "c").unwrap();
        assert!(matches!(reduced_mul(&ab(), &x, &w("a")), Err(Error::AlphabetMismatch)));
    }

    #[test]
    fn rank_round_trip() {
        let a = ab();
        for n in 0..6 {
            for r in 0..a.sphere_size(n) {
                assert_eq!(a.rank(a.unrank(n, r).letters()), r);
            }
        }
    }

    #[test]
    fn display_round_trip() {
        let a = Alphabet::new(3).unwrap();
        let x = Word::parse(&a, "aBcCb".replace("cC", "c").as_str()).unwrap();
        assert_eq!(Word::parse(&a, &x.display(&a).to_string()).unwrap(), x);
        assert_eq!(Word::identity().display(&a).to_string(), "e");
    }
}
