#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toeplitz_core::sample::{random_tower, TowerShape};
use toeplitz_core::SkeletonTower;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tower(seed: u64) -> SkeletonTower {
    random_tower(&mut rng(seed), &TowerShape::default())
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}
