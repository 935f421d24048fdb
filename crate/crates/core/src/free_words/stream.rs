use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{is_canonical, ConjugacyClass, Letter, Word};

type LevelCache = Mutex<HashMap<(usize, usize), Arc<Vec<ConjugacyClass>>>>;

fn cache() -> &'static LevelCache {
    static CACHE: OnceLock<LevelCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All classes of cyclic length exactly `length` in rank `rank`, sorted by
/// canonical representative. Levels are computed once per process.
pub fn classes_of_length(rank: usize, length: usize) -> Arc<Vec<ConjugacyClass>> {
    if let Some(level) = cache().lock().unwrap().get(&(rank, length)) {
        return Arc::clone(level);
    }
    let level = Arc::new(generate_level(rank, length));
    cache().lock().unwrap().entry((rank, length)).or_insert(level).clone()
}

/// Depth-first over reduced words in letter order; keeps the canonical ones,
/// which therefore come out already sorted.
fn generate_level(rank: usize, length: usize) -> Vec<ConjugacyClass> {
    let mut out = Vec::new();
    if length == 0 {
        return out;
    }
    let alphabet = 2 * rank;
    let mut word: Vec<Letter> = Vec::with_capacity(length);
    let mut next: Vec<usize> = vec![0];
    while let Some(top) = next.last_mut() {
        let depth = word.len();
        if *top >= alphabet {
            next.pop();
            word.pop();
            continue;
        }
        let candidate = Letter::from_code(*top);
        *top += 1;
        if depth > 0 && word[depth - 1] == candidate.inverse() {
            continue;
        }
        // The first letter of a canonical word is its least letter.
        if depth > 0 && candidate < word[0] {
            continue;
        }
        word.push(candidate);
        if word.len() == length {
            if is_canonical(&word) {
                out.push(ConjugacyClass::from_canonical(Word { letters: word.clone() }));
            }
            word.pop();
        } else {
            next.push(0);
        }
    }
    out
}

/// Number of classes of length at most `max_length`.
pub fn class_count_up_to(rank: usize, max_length: usize) -> usize {
    (1..=max_length).map(|l| classes_of_length(rank, l).len()).sum()
}

/// The ordered enumeration of nontrivial conjugacy classes: by length, then
/// by canonical representative. Each consumer holds its own cursor.
#[derive(Clone, Debug)]
pub struct ClassStream {
    rank: usize,
    max_length: Option<usize>,
    length: usize,
    index: usize,
    level: Arc<Vec<ConjugacyClass>>,
}

impl ClassStream {
    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl Iterator for ClassStream {
    type Item = ConjugacyClass;

    fn next(&mut self) -> Option<ConjugacyClass> {
        loop {
            if let Some(c) = self.level.get(self.index) {
                self.index += 1;
                return Some(c.clone());
            }
            let next_length = self.length + 1;
            if self.max_length.is_some_and(|m| next_length > m) {
                return None;
            }
            self.length = next_length;
            self.index = 0;
            self.level = classes_of_length(self.rank, next_length);
        }
    }
}

/// Streams the classes of rank `rank`, truncated at `max_length` if given.
pub fn enumerate_classes(rank: usize, max_length: Option<usize>) -> ClassStream {
    assert!(rank >= 2, "rank must be at least 2");
    ClassStream {
        rank,
        max_length,
        length: 0,
        index: 0,
        level: Arc::new(Vec::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_words::canonical_class;
    use std::collections::BTreeSet;

    /// Every reduced word of length exactly `len`, by brute force.
    fn all_words(rank: usize, len: usize) -> Vec<Vec<Letter>> {
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &words {
                for c in 0..2 * rank {
                    let mut x = w.clone();
                    x.push(Letter::from_code(c));
                    next.push(x);
                }
            }
            words = next;
        }
        words
    }

    fn brute_force_classes(rank: usize, max_len: usize) -> BTreeSet<ConjugacyClass> {
        let mut set = BTreeSet::new();
        for len in 1..=max_len {
            for w in all_words(rank, len) {
                let word = Word::new(w);
                if let Ok(c) = canonical_class(&word) {
                    set.insert(c);
                }
            }
        }
        set
    }

    #[test]
    fn first_entries_are_generators() {
        let first: Vec<String> = enumerate_classes(2, None).take(2).map(|c| c.to_string()).collect();
        assert_eq!(first, ["a", "b"]);
        assert_eq!(enumerate_classes(3, Some(1)).count(), 3);
    }

    #[test]
    fn counts_of_length_at_most_two() {
        for n in 2..=4 {
            assert_eq!(enumerate_classes(n, Some(2)).count(), n + n * n, "rank {n}");
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        for (n, l) in [(2, 5), (3, 4)] {
            let streamed: Vec<ConjugacyClass> = enumerate_classes(n, Some(l)).collect();
            let oracle = brute_force_classes(n, l);
            assert_eq!(streamed.len(), oracle.len());
            assert_eq!(streamed, oracle.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn stream_is_sorted_and_length_nondecreasing() {
        let v: Vec<ConjugacyClass> = enumerate_classes(3, Some(5)).collect();
        assert!(v.windows(2).all(|p| p[0] < p[1]));
    }
}
