//! Seeded instance generation and exhaustive word enumeration, shared by the
//! CLI harness and the test suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::LatticePoint;
use crate::lattice_tsp::WalkInstance;
use crate::words::{Alphabet, Letter, Word};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point<R: Rng>(rng: &mut R, rank: usize, radius: i64) -> LatticePoint {
    LatticePoint::new((0..rank).map(|_| rng.gen_range(-radius..=radius)).collect())
}

/// `count` distinct points in the cube `[-radius, radius]^rank`.
pub fn random_distinct_points<R: Rng>(rng: &mut R, rank: usize, count: usize, radius: i64) -> Vec<LatticePoint> {
    let side = (2 * radius + 1) as u128;
    assert!(
        (count as u128) <= side.saturating_pow(rank as u32),
        "not enough lattice points"
    );
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = random_point(rng, rank, radius);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

pub fn random_walk_instance<R: Rng>(rng: &mut R, rank: usize, targets: usize, radius: i64) -> WalkInstance {
    let start = random_point(rng, rank, radius);
    let end = random_point(rng, rank, radius);
    let targets = random_distinct_points(rng, rank, targets, radius);
    WalkInstance::new(start, targets, end).expect("distinct targets")
}

/// A freely reduced word of exactly `len` letters, uniform among the
/// non-backtracking extensions at every step.
pub fn random_reduced_word<R: Rng>(rng: &mut R, alphabet: &Alphabet, len: usize) -> Word {
    let letters = alphabet.letters();
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = *letters.choose(rng).expect("nonempty alphabet");
        if out.last().is_some_and(|&prev| prev.inverse() == l) {
            continue;
        }
        out.push(l);
    }
    crate::words::free_reduce(&Word::from_letters(out))
}

/// `count` reduced words with lengths drawn uniformly from `0..=max_len`,
/// reproducible from `seed`.
pub fn random_word_batch(seed: u64, alphabet: &Alphabet, count: usize, max_len: usize) -> Vec<Word> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            random_reduced_word(&mut rng, alphabet, len)
        })
        .collect()
}

/// Every freely reduced word of length at most `max_len`, shortest first and
/// in alphabet order within one length.
pub fn reduced_words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let letters = alphabet.letters();
    let mut out = vec![Word::empty()];
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last().is_some_and(|&prev| prev.inverse() == l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(
            next.iter()
                .map(|v| crate::words::free_reduce(&Word::from_letters(v.clone()))),
        );
        frontier = next;
    }
    out
}
