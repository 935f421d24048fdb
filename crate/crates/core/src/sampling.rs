//! Random marked roses from products of elementary Nielsen automorphisms.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::free_words::Automorphism;
use crate::marked_graphs::{roses_equal, Rose};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A transvection, inversion or transposition of two generators.
pub fn random_nielsen(rng: &mut impl Rng, n: usize) -> Automorphism {
    match rng.gen_range(0..6) {
        0..=3 => {
            let i = rng.gen_range(1..=n);
            let mut j = rng.gen_range(1..n);
            if j >= i {
                j += 1;
            }
            Automorphism::transvection(n, i, j, rng.gen(), rng.gen())
        }
        4 => Automorphism::inversion(n, rng.gen_range(1..=n)),
        _ => {
            let mut perm: Vec<usize> = (0..n).collect();
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            perm.swap(a, b);
            Automorphism::signed_permutation(&perm, &vec![false; n])
        }
    }
}

/// Product of `1..=max_factors` random Nielsen automorphisms.
pub fn random_automorphism(rng: &mut impl Rng, n: usize, max_factors: usize) -> Automorphism {
    let k = rng.gen_range(1..=max_factors.max(1));
    (0..k).fold(Automorphism::identity(n), |acc, _| acc.compose(&random_nielsen(rng, n)))
}

pub fn random_rose(rng: &mut impl Rng, n: usize, max_factors: usize) -> Rose {
    Rose::new(random_automorphism(rng, n, max_factors)).expect("Nielsen products are automorphisms")
}

/// Random rose that is not the standard one.
pub fn random_nonstandard_rose(rng: &mut impl Rng, n: usize, max_factors: usize) -> Rose {
    let r0 = Rose::standard(n);
    loop {
        let r = random_rose(rng, n, max_factors);
        if !roses_equal(&r, &r0) {
            return r;
        }
    }
}

/// Conjugates by a random short word and relabels petals at random; the
/// result is the same point of the spine.
pub fn random_isometric_twin(rng: &mut impl Rng, rho: &Rose) -> Rose {
    let n = rho.rank();
    let u = crate::free_words::Word::new(
        (0..rng.gen_range(0..4)).map(|_| crate::free_words::Letter::from_code(rng.gen_range(0..2 * n))),
    );
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let signs: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    rho.inner_twist(&u)
        .post_compose(&Automorphism::signed_permutation(&perm, &signs))
        .expect("isometries are automorphisms")
}

/// Distinct spine vertices among `roses`, keeping first occurrences.
pub fn dedup_roses(roses: Vec<Rose>) -> Vec<Rose> {
    let mut buckets: std::collections::HashMap<Vec<usize>, Vec<Rose>> = Default::default();
    let mut out = Vec::new();
    for r in roses {
        let mut key = r.norm_prefix(3);
        key.push(r.rank());
        let bucket = buckets.entry(key).or_default();
        if !bucket.iter().any(|s| roses_equal(s, &r)) {
            bucket.push(r.clone());
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible_and_valid() {
        let a: Vec<Rose> = (0..5)
            .map(|_| ())
            .scan(rng_from_seed(3), |g, _| Some(random_rose(g, 3, 8)))
            .collect();
        let b: Vec<Rose> = (0..5)
            .map(|_| ())
            .scan(rng_from_seed(3), |g, _| Some(random_rose(g, 3, 8)))
            .collect();
        assert_eq!(a, b);
        let mut g = rng_from_seed(4);
        for r in &a {
            let twin = random_isometric_twin(&mut g, r);
            assert!(roses_equal(r, &twin));
        }
        assert_eq!(
            dedup_roses(vec![a[0].clone(), random_isometric_twin(&mut g, &a[0])]).len(),
            1
        );
    }
}
