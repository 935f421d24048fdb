use serde::{Deserialize, Serialize};

use super::{Letter, Word};
use crate::error::{Error, Result};

/// An endomorphism of the free group given by the images of the generators.
///
/// Nothing is checked at construction; [`Automorphism::try_inverse`] decides
/// invertibility.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Automorphism {
    pub fn identity(rank: usize) -> Automorphism {
        Automorphism {
            rank,
            images: (1..=rank).map(Word::generator).collect(),
        }
    }

    pub fn from_images(rank: usize, images: Vec<Word>) -> Result<Automorphism> {
        if images.len() != rank {
            return Err(Error::NotInvertible(format!(
                "expected {rank} images, got {}",
                images.len()
            )));
        }
        if let Some(w) = images.iter().find(|w| w.max_generator() > rank) {
            return Err(Error::GeneratorOutOfRange {
                index: w.max_generator(),
                rank,
            });
        }
        Ok(Automorphism { rank, images })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator - 1]
    }

    /// Image of a single letter.
    pub fn apply_letter(&self, l: Letter) -> Word {
        let w = &self.images[l.index()];
        if l.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    pub fn apply_letters(&self, letters: &[Letter]) -> Word {
        let mut raw = Vec::new();
        for &l in letters {
            let w = &self.images[l.index()];
            if l.is_inverse() {
                raw.extend(w.letters().iter().rev().map(|x| x.inverse()));
            } else {
                raw.extend_from_slice(w.letters());
            }
        }
        Word::new(raw)
    }

    pub fn apply(&self, w: &Word) -> Word {
        self.apply_letters(w.letters())
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// Conjugation `x ↦ u x u^-1`.
    pub fn inner(rank: usize, u: &Word) -> Automorphism {
        Automorphism {
            rank,
            images: (1..=rank).map(|i| Word::generator(i).conjugate_by(u)).collect(),
        }
    }

    /// `x_i ↦ x_i x_j^{±1}` (`right`) or `x_j^{±1} x_i`.
    pub fn transvection(rank: usize, i: usize, j: usize, inverse: bool, right: bool) -> Automorphism {
        assert_ne!(i, j);
        let mut a = Automorphism::identity(rank);
        let xj = Word::new([Letter::new(j, inverse)]);
        let xi = Word::generator(i);
        a.images[i - 1] = if right { xi.concat(&xj) } else { xj.concat(&xi) };
        a
    }

    pub fn inversion(rank: usize, i: usize) -> Automorphism {
        let mut a = Automorphism::identity(rank);
        a.images[i - 1] = Word::generator(i).inverse();
        a
    }

    /// Signed permutation `x_i ↦ x_{perm[i]}^{±1}` (0-based `perm`).
    pub fn signed_permutation(perm: &[usize], inverted: &[bool]) -> Automorphism {
        let rank = perm.len();
        Automorphism {
            rank,
            images: perm
                .iter()
                .zip(inverted)
                .map(|(&p, &s)| Word::new([Letter::new(p + 1, s)]))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == Word::generator(i + 1))
    }

    /// Inverse automorphism, computed by Stallings folding of the subgroup
    /// generated by the images. Fails unless the images form a basis.
    pub fn try_inverse(&self) -> Result<Automorphism> {
        let inverse = LabelledFolding::new(self)?.fold()?;
        if !self.compose(&inverse).is_identity() || !inverse.compose(self).is_identity() {
            return Err(Error::NotInvertible("folded inverse does not invert".into()));
        }
        Ok(inverse)
    }
}

#[derive(Clone, Debug)]
struct LabelledEdge {
    tail: usize,
    head: usize,
    /// Letter read when traversing tail to head.
    letter: Letter,
    /// Word in the domain generators carried by the edge; closed paths at
    /// the base vertex satisfy `phi(product of carried words) = read word`.
    carried: Word,
    alive: bool,
}

/// The image-subgroup graph of an endomorphism, folded with the carried
/// domain words kept consistent by re-gauging at a vertex before each merge.
struct LabelledFolding {
    rank: usize,
    edges: Vec<LabelledEdge>,
}

const BASE: usize = 0;

impl LabelledFolding {
    fn new(phi: &Automorphism) -> Result<LabelledFolding> {
        let mut edges = Vec::new();
        let mut next_vertex = 1;
        for (i, w) in phi.images.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::NotInvertible(format!("x{} maps to the identity", i + 1)));
            }
            let k = w.len();
            let mut tail = BASE;
            for (t, &l) in w.letters().iter().enumerate() {
                let head = if t + 1 == k {
                    BASE
                } else {
                    next_vertex += 1;
                    next_vertex - 1
                };
                edges.push(LabelledEdge {
                    tail,
                    head,
                    letter: l,
                    carried: if t + 1 == k {
                        Word::generator(i + 1)
                    } else {
                        Word::identity()
                    },
                    alive: true,
                });
                tail = head;
            }
        }
        Ok(LabelledFolding { rank: phi.rank, edges })
    }

    /// Half-edge `2e` departs the tail of edge `e`, `2e + 1` departs its head.
    fn origin(&self, h: usize) -> usize {
        let e = &self.edges[h / 2];
        if h.is_multiple_of(2) {
            e.tail
        } else {
            e.head
        }
    }

    fn terminus(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    fn letter(&self, h: usize) -> Letter {
        let l = self.edges[h / 2].letter;
        if h.is_multiple_of(2) {
            l
        } else {
            l.inverse()
        }
    }

    fn carried(&self, h: usize) -> Word {
        let w = &self.edges[h / 2].carried;
        if h.is_multiple_of(2) {
            w.clone()
        } else {
            w.inverse()
        }
    }

    fn find_fold(&self) -> Option<(usize, usize)> {
        let mut seen: std::collections::HashMap<(usize, Letter), usize> = Default::default();
        for (e, edge) in self.edges.iter().enumerate() {
            if !edge.alive {
                continue;
            }
            for h in [2 * e, 2 * e + 1] {
                let key = (self.origin(h), self.letter(h));
                if let Some(&other) = seen.get(&key) {
                    return Some((other, h));
                }
                seen.insert(key, h);
            }
        }
        None
    }

    /// Multiplies carried words at vertex `z`: departing words get `g^-1` on
    /// the left and arriving words `g` on the right.
    fn gauge(&mut self, z: usize, g: &Word) {
        let g_inv = g.inverse();
        for e in self.edges.iter_mut().filter(|e| e.alive) {
            if e.tail == z {
                e.carried = g_inv.concat(&e.carried);
            }
            if e.head == z {
                e.carried = e.carried.concat(g);
            }
        }
    }

    fn fold(mut self) -> Result<Automorphism> {
        while let Some((h1, h2)) = self.find_fold() {
            let v = self.origin(h1);
            let (w1, w2) = (self.terminus(h1), self.terminus(h2));
            if w1 == w2 {
                return Err(Error::NotInvertible("image generators satisfy a relation".into()));
            }
            let (c1, c2) = (self.carried(h1), self.carried(h2));
            if w2 != BASE && w2 != v {
                self.gauge(w2, &c2.inverse().concat(&c1));
            } else if w1 != BASE && w1 != v {
                self.gauge(w1, &c1.inverse().concat(&c2));
            } else if w1 == v {
                // h1 is a loop at v and w2 is the base vertex.
                self.gauge(v, &c1.inverse().concat(&c2));
            } else {
                self.gauge(v, &c2.inverse().concat(&c1));
            }
            debug_assert_eq!(self.carried(h1), self.carried(h2));
            self.edges[h2 / 2].alive = false;
            let (keep, gone) = if w2 == BASE { (w2, w1) } else { (w1, w2) };
            for e in self.edges.iter_mut().filter(|e| e.alive) {
                if e.tail == gone {
                    e.tail = keep;
                }
                if e.head == gone {
                    e.head = keep;
                }
            }
        }
        let alive: Vec<&LabelledEdge> = self.edges.iter().filter(|e| e.alive).collect();
        if alive.len() != self.rank || alive.iter().any(|e| e.tail != BASE || e.head != BASE) {
            return Err(Error::NotInvertible("image subgroup is a proper subgroup".into()));
        }
        let mut images: Vec<Option<Word>> = vec![None; self.rank];
        for e in alive {
            let slot = &mut images[e.letter.index()];
            if slot.is_some() {
                return Err(Error::NotInvertible("repeated petal label".into()));
            }
            *slot = Some(if e.letter.is_inverse() {
                e.carried.inverse()
            } else {
                e.carried.clone()
            });
        }
        Ok(Automorphism {
            rank: self.rank,
            images: images.into_iter().map(|w| w.expect("every label present")).collect(),
        })
    }
}
