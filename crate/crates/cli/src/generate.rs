//! The doubling example with non-growing blocks, and seeded random towers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toeplitz_core::sample::{random_tower, TowerShape};
use toeplitz_core::{Alphabet, Cell, Exponent, Level, PartialCyclicWord, SkeletonTower, SupernaturalNumber, Symbol};

/// Maximal blank runs of `cells` as `(start, len)`, read linearly.
fn blank_runs(cells: &[Cell]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        if cells[i].is_none() {
            let start = i;
            while i < cells.len() && cells[i].is_none() {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Periods `5·2^j` for `j = 0..=stages`. Each stage doubles the previous word;
/// odd stages fill the middle of the leftmost triple hole with 1, even stages
/// fill the first two single holes with 0, the other single holes with 1,
/// and the rightmost triple hole with `101`.
pub fn generate_paper_example(stages: usize) -> SkeletonTower {
    let alphabet = Alphabet::numeric(2).expect("two symbols");
    let (zero, one) = (Some(Symbol(0)), Some(Symbol(1)));
    let mut cells: Vec<Cell> = vec![zero, None, None, None, zero];
    let mut levels = vec![Level::new(5, PartialCyclicWord::new(cells.clone()).expect("non-empty"))];
    for j in 1..=stages {
        cells = [cells.clone(), cells].concat();
        let runs = blank_runs(&cells);
        if j % 2 == 1 {
            let &(start, _) = runs.iter().find(|r| r.1 == 3).expect("a triple hole survives every stage");
            cells[start + 1] = one;
        } else {
            for (n, &(start, _)) in runs.iter().filter(|r| r.1 == 1).enumerate() {
                cells[start] = if n < 2 { zero } else { one };
            }
            let &(start, _) = runs.iter().rev().find(|r| r.1 == 3).expect("a triple hole survives every stage");
            cells[start..start + 3].copy_from_slice(&[one, zero, one]);
        }
        levels.push(Level::new(cells.len(), PartialCyclicWord::new(cells.clone()).expect("non-empty")));
    }
    let scale = SupernaturalNumber::from_factors([(2, Exponent::Infinite), (5, Exponent::Finite(1))]).expect("primes");
    SkeletonTower::new(alphabet, levels, Some(scale)).expect("the construction is a valid tower")
}

pub fn generate_random(seed: u64, shape: &TowerShape) -> SkeletonTower {
    random_tower(&mut ChaCha8Rng::seed_from_u64(seed), shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_stages() {
        let t = generate_paper_example(3);
        let words: Vec<String> = t.levels().iter().map(|l| l.word.render(t.alphabet())).collect();
        assert_eq!(
            words,
            [
                "0___0",
                "0_1_00___0",
                "001000___00111001010",
                "001000_1_00111001010001000___00111001010",
            ]
        );
        assert_eq!(t.declared_scale().unwrap().to_string(), "2^inf * 5");
        assert_eq!(generate_paper_example(0).depth(), 1);
        assert_eq!(generate_paper_example(6).deepest_period(), 320);
    }

    #[test]
    fn random_is_reproducible() {
        let shape = TowerShape::default();
        assert_eq!(generate_random(9, &shape), generate_random(9, &shape));
    }
}
