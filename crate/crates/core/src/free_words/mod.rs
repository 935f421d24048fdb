//! Words, conjugacy classes and the length-ordered enumeration of classes in
//! a free group of rank `n`.
//!
//! Letters are encoded as small integers `2 * (i - 1) + s` where `i` is the
//! 1-based generator and `s = 1` for an inverse. This gives the fixed letter
//! order `x1 < x1^-1 < x2 < x2^-1 < ...` and coincides with the half-edge
//! numbering of the standard rose (petal `i` departs on half-edge `2(i-1)`).
//!
//! Text syntax: `a`..`z` are `x1`..`x26`, uppercase denotes the inverse, so
//! `abA` is `x1 x2 x1^-1`.

mod automorphism;
mod stream;

pub use automorphism::Automorphism;
pub use stream::{class_count_up_to, classes_of_length, enumerate_classes, ClassStream};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A generator or inverse generator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u16);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are 1-based");
        Letter((2 * (generator - 1) + usize::from(inverse)) as u16)
    }

    pub fn from_code(code: usize) -> Letter {
        Letter(code as u16)
    }

    /// Position in the fixed letter order; also the half-edge of the rose
    /// on which this letter departs.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn generator(self) -> usize {
        (self.0 as usize >> 1) + 1
    }

    pub fn index(self) -> usize {
        self.0 as usize >> 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    fn to_char(self) -> char {
        let c = (b'a' + self.index() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    /// Builds a word, freely reducing the input.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let raw: Vec<Letter> = letters.into_iter().collect();
        Word {
            letters: free_reduce(&raw),
        }
    }

    pub fn generator(i: usize) -> Word {
        Word {
            letters: vec![Letter::new(i, false)],
        }
    }

    /// Parses the `a`..`z` / `A`..`Z` syntax. An empty string or `1` is the
    /// identity.
    pub fn parse(text: &str, rank: usize) -> Result<Word> {
        let text = text.trim();
        if text == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::with_capacity(text.len());
        for (position, c) in text.chars().enumerate() {
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse {
                    position,
                    message: format!("unexpected character {c:?}"),
                });
            }
            let index = (c.to_ascii_lowercase() as u8 - b'a') as usize;
            if index >= rank {
                return Err(Error::Parse {
                    position,
                    message: format!("letter {c:?} exceeds rank {rank}"),
                });
            }
            letters.push(Letter::new(index + 1, c.is_ascii_uppercase()));
        }
        Ok(Word::new(letters))
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

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// `u w u^-1`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.concat(self).concat(&u.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    pub fn cyclic_reduce(&self) -> Word {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j >= i + 2 && l[i] == l[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word {
            letters: l[i..j].to_vec(),
        }
    }

    /// Length of the cyclic reduction, without allocating.
    pub fn cyclic_length(&self) -> usize {
        cyclic_length(&self.letters)
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        Word { letters }
    }
}

/// Cyclic length of an already freely reduced sequence.
pub(crate) fn cyclic_length(l: &[Letter]) -> usize {
    let mut i = 0;
    let mut j = l.len();
    while j >= i + 2 && l[i] == l[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    j - i
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s, 26).map_err(serde::de::Error::custom)
    }
}

/// A conjugacy class of a nontrivial element, identified with the class of
/// its inverse, stored as its canonical cyclic word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjugacyClass {
    rep: Word,
}

impl ConjugacyClass {
    pub fn rep(&self) -> &Word {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        self.rep.letters()
    }

    pub fn parse(text: &str, rank: usize) -> Result<ConjugacyClass> {
        canonical_class(&Word::parse(text, rank)?)
    }

    /// Wraps a word already known to be canonical.
    pub(crate) fn from_canonical(rep: Word) -> ConjugacyClass {
        debug_assert!(is_canonical(rep.letters()));
        ConjugacyClass { rep }
    }
}

impl Ord for ConjugacyClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rep
            .len()
            .cmp(&other.rep.len())
            .then_with(|| self.rep.letters.cmp(&other.rep.letters))
    }
}

impl PartialOrd for ConjugacyClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ConjugacyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}

impl Serialize for ConjugacyClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn free_reduce_word(w: &Word) -> Word {
    Word::new(w.letters().iter().copied())
}

pub fn cyclic_reduce(w: &Word) -> Word {
    w.cyclic_reduce()
}

/// Lexicographically least rotation of `w` or of `w^-1`.
fn least_rotation(letters: &[Letter]) -> Vec<Letter> {
    let k = letters.len();
    let inv: Vec<Letter> = letters.iter().rev().map(|l| l.inverse()).collect();
    let mut best: Option<Vec<Letter>> = None;
    for src in [letters, &inv[..]] {
        for r in 0..k {
            let cand: Vec<Letter> = src[r..].iter().chain(src[..r].iter()).copied().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Whether a cyclically reduced sequence is its own canonical representative.
pub(crate) fn is_canonical(letters: &[Letter]) -> bool {
    let k = letters.len();
    if k == 0 {
        return false;
    }
    if k > 1 && letters[0] == letters[k - 1].inverse() {
        return false;
    }
    // Compare against every rotation of the word and of its inverse without
    // materializing them.
    let beats = |at: &dyn Fn(usize) -> Letter| -> bool {
        for (i, &own) in letters.iter().enumerate() {
            let c = at(i);
            if c != own {
                return c < own;
            }
        }
        false
    };
    for r in 0..k {
        if r > 0 && beats(&|i| letters[(r + i) % k]) {
            return false;
        }
        if beats(&|i| letters[k - 1 - (r + i) % k].inverse()) {
            return false;
        }
    }
    true
}

/// The canonical class of `w`: cyclically reduce, then take the least
/// rotation of the word or its inverse under length-then-lexicographic order.
pub fn canonical_class(w: &Word) -> Result<ConjugacyClass> {
    let c = w.cyclic_reduce();
    if c.is_empty() {
        return Err(Error::IdentityWord);
    }
    Ok(ConjugacyClass {
        rep: Word {
            letters: least_rotation(c.letters()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 4).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(w("abB"), w("a"));
        assert_eq!(w(""), Word::identity());
        assert_eq!(w("aAa"), w("a"));
        assert_eq!(w("BabA").cyclic_reduce().len(), 4);
        assert_eq!(w("BaAb"), Word::identity());
        assert_eq!(w("Bab").cyclic_reduce(), w("a"));
        assert_eq!(w("ab").cyclic_reduce(), w("ab"));
        let c = w("Babb").cyclic_reduce();
        assert_eq!(canonical_class(&c).unwrap(), canonical_class(&w("ab")).unwrap());
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_class(&w("ba")).unwrap().rep(), &w("ab"));
        assert_eq!(canonical_class(&w("A")).unwrap().rep(), &w("a"));
        assert_eq!(canonical_class(&w("BA")).unwrap().rep(), &w("ab"));
        assert_eq!(canonical_class(&w("aA")), Err(Error::IdentityWord));
    }

    #[test]
    fn letter_order_puts_inverse_after_generator() {
        let a = Letter::new(1, false);
        let a_inv = Letter::new(1, true);
        let b = Letter::new(2, false);
        assert!(a < a_inv && a_inv < b);
        assert_eq!(a_inv.code(), 1);
        assert_eq!(b.generator(), 2);
    }

    #[test]
    fn parse_reports_position() {
        assert_eq!(
            Word::parse("ab3", 2),
            Err(Error::Parse {
                position: 2,
                message: "unexpected character '3'".into()
            })
        );
        assert!(matches!(Word::parse("abc", 2), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn display_round_trips() {
        for s in ["abA", "1", "cBa"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn is_canonical_agrees_with_least_rotation() {
        for s in ["ab", "ba", "aB", "Ba", "abAB", "aab", "aba", "AAb"] {
            let c = w(s).cyclic_reduce();
            let canon = least_rotation(c.letters());
            assert_eq!(is_canonical(c.letters()), canon == c.letters(), "{s}");
        }
    }
}
