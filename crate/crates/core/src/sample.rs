//! Seeded random towers, codes and permutations for property tests and benches.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::codes::{BlockCode, PositionwisePermutation};
use crate::odometer::{factorize, Exponent, SupernaturalNumber};
use crate::tower::{Alphabet, Cell, Level, PartialCyclicWord, SkeletonTower, Symbol};

#[derive(Debug, Clone, PartialEq)]
pub struct TowerShape {
    pub alphabet_size: usize,
    pub max_base: usize,
    /// Number of levels is drawn from `1..=max_depth`.
    pub max_depth: usize,
    /// Each level multiplies the period by one of these.
    pub factors: Vec<usize>,
    pub blank_probability: f64,
    /// Declare the scale `∏ p^∞` over the primes of the periods.
    pub declare_scale: bool,
}

impl Default for TowerShape {
    fn default() -> Self {
        TowerShape {
            alphabet_size: 2,
            max_base: 6,
            max_depth: 4,
            factors: vec![2, 3],
            blank_probability: 0.4,
            declare_scale: false,
        }
    }
}

fn random_cell<R: Rng + ?Sized>(rng: &mut R, n: usize, blank: f64) -> Cell {
    (!rng.gen_bool(blank)).then(|| Symbol(rng.gen_range(0..n) as u16))
}

/// A random valid tower. Every hole of a level stays a hole one level down:
/// a class that came out uniformly filled gets one of its cells blanked again.
pub fn random_tower<R: Rng + ?Sized>(rng: &mut R, shape: &TowerShape) -> SkeletonTower {
    let n = shape.alphabet_size.max(2);
    let alphabet = Alphabet::numeric(n).expect("at least two symbols");
    let depth = rng.gen_range(1..=shape.max_depth.max(1));
    let base = rng.gen_range(2..=shape.max_base.max(2));
    let first: Vec<Cell> = (0..base)
        .map(|_| random_cell(rng, n, shape.blank_probability))
        .collect();
    let mut levels = vec![Level::new(base, PartialCyclicWord::new(first).expect("base > 0"))];
    for _ in 1..depth {
        let prev = levels.last().expect("non-empty");
        let p = prev.period;
        let f = *shape.factors.choose(rng).unwrap_or(&2);
        let mut cells: Vec<Cell> = prev.word.repeated_to(p * f).cells().to_vec();
        for cell in cells.iter_mut().filter(|c| c.is_none()) {
            *cell = random_cell(rng, n, shape.blank_probability);
        }
        for x in (0..p).filter(|&x| prev.word.cells()[x].is_none()) {
            let first = cells[x];
            if first.is_some() && (1..f).all(|c| cells[x + c * p] == first) {
                cells[x + rng.gen_range(0..f) * p] = None;
            }
        }
        levels.push(Level::new(p * f, PartialCyclicWord::new(cells).expect("p > 0")));
    }
    let scale = shape.declare_scale.then(|| {
        let mut primes: Vec<u64> = levels
            .iter()
            .flat_map(|l| factorize(l.period as u64).into_iter().map(|(q, _)| q))
            .collect();
        primes.sort_unstable();
        primes.dedup();
        SupernaturalNumber::from_factors(primes.into_iter().map(|q| (q, Exponent::Infinite)))
            .expect("primes are prime")
    });
    SkeletonTower::new(alphabet, levels, scale).expect("construction keeps every invariant")
}

pub fn random_block_code<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, radius: usize) -> BlockCode {
    let n = alphabet.len();
    let size = n.pow(2 * radius as u32 + 1);
    let table = (0..size).map(|_| Symbol(rng.gen_range(0..n) as u16)).collect();
    BlockCode::new(alphabet.clone(), radius, table).expect("table is total")
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, period: usize) -> PositionwisePermutation {
    let perms = (0..period)
        .map(|_| {
            let mut perm: Vec<Symbol> = alphabet.symbols().collect();
            perm.shuffle(rng);
            perm
        })
        .collect();
    PositionwisePermutation::new(alphabet.clone(), perms).expect("shuffles are bijections")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_towers_are_valid_and_reproducible() {
        let shape = TowerShape {
            declare_scale: true,
            ..TowerShape::default()
        };
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = random_tower(&mut a, &shape);
            assert_eq!(t, random_tower(&mut b, &shape));
            assert!(t.deepest_period() <= 6 * 27);
            crate::tower::validate_tower(t.into_raw()).unwrap();
        }
    }
}
