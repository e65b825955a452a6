//! The periodicity calculus on towers: certified approximations of `Per_p`,
//! skeleton words, filled blocks, essential periods, scale truncation, the
//! natural factorization of a scale, and stage-wise growth profiles.
//!
//! Certification rules, for `p | N` with `N` the deepest period:
//! - `In(a)`: every cell of the class `r + pZ` (mod `N`) is filled with `a`;
//! - `Out`: two cells of the class carry different symbols, or `p = N` and the
//!   cell is Blank (the deepest word is the `N`-skeleton);
//! - `Unknown`: otherwise.

use num_integer::{gcd, lcm};

use crate::error::{Error, Result};
use crate::odometer::{is_prime, SupernaturalNumber};
use crate::tower::{modulo, PartialCyclicWord, SkeletonTower, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueStatus {
    In(Symbol),
    Out,
    Unknown,
}

impl ResidueStatus {
    pub fn is_in(self) -> bool {
        matches!(self, ResidueStatus::In(_))
    }

    pub fn is_out(self) -> bool {
        self == ResidueStatus::Out
    }

    pub fn is_unknown(self) -> bool {
        self == ResidueStatus::Unknown
    }
}

/// Three-valued membership of residues mod `p` in `Per_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueStatusSet {
    modulus: usize,
    status: Vec<ResidueStatus>,
}

impl ResidueStatusSet {
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn statuses(&self) -> &[ResidueStatus] {
        &self.status
    }

    /// Status of the integer `x` (any sign).
    pub fn get(&self, x: i64) -> ResidueStatus {
        self.status[modulo(x, self.modulus)]
    }

    fn residues_where(&self, f: impl Fn(ResidueStatus) -> bool) -> Vec<usize> {
        (0..self.modulus).filter(|&r| f(self.status[r])).collect()
    }

    pub fn in_residues(&self) -> Vec<usize> {
        self.residues_where(ResidueStatus::is_in)
    }

    pub fn out_residues(&self) -> Vec<usize> {
        self.residues_where(ResidueStatus::is_out)
    }

    pub fn unknown_residues(&self) -> Vec<usize> {
        self.residues_where(ResidueStatus::is_unknown)
    }

    pub fn is_certified_empty(&self) -> bool {
        self.status.iter().all(|s| s.is_out())
    }

    pub fn is_fully_certified(&self) -> bool {
        !self.status.iter().any(|s| s.is_unknown())
    }
}

/// Status of the class `{r, r + step, ...}` inside `word` (`step | len`).
pub(crate) fn class_status(word: &PartialCyclicWord, step: usize, r: usize, blank_is_hole: bool) -> ResidueStatus {
    let mut seen: Option<Symbol> = None;
    let mut blank = false;
    for cell in word.cells().iter().skip(r).step_by(step) {
        match (*cell, seen) {
            (None, _) => blank = true,
            (Some(s), None) => seen = Some(s),
            (Some(s), Some(prev)) if s != prev => return ResidueStatus::Out,
            _ => {}
        }
    }
    match (seen, blank) {
        (Some(s), false) => ResidueStatus::In(s),
        _ if blank_is_hole => ResidueStatus::Out,
        _ => ResidueStatus::Unknown,
    }
}

fn require_divisor(t: &SkeletonTower, p: usize) -> Result<usize> {
    let n = t.deepest_period();
    if p == 0 || n % p != 0 {
        return Err(Error::NonDivisor { p, period: n });
    }
    Ok(n)
}

/// Certified approximation of `Per_p` for a divisor `p` of the deepest period.
pub fn periodic_part(t: &SkeletonTower, p: usize) -> Result<ResidueStatusSet> {
    let n = require_divisor(t, p)?;
    let word = &t.deepest().word;
    Ok(ResidueStatusSet {
        modulus: p,
        status: (0..p).map(|r| class_status(word, p, r, p == n)).collect(),
    })
}

/// Exact `Per_p` of every completion for `p | N`, reading the deepest word as
/// the `N`-skeleton: a class that meets a deepest-level hole is Out, since
/// `Per_p ⊆ Per_N`. Never Unknown.
fn exact_part(t: &SkeletonTower, p: usize) -> Result<ResidueStatusSet> {
    require_divisor(t, p)?;
    let word = &t.deepest().word;
    Ok(ResidueStatusSet {
        modulus: p,
        status: (0..p)
            .map(|r| match class_status(word, p, r, false) {
                ResidueStatus::In(s) => ResidueStatus::In(s),
                _ => ResidueStatus::Out,
            })
            .collect(),
    })
}

/// Whether `p` divides the scale of every completion. Points of one rotation
/// class mod `p` share a `p`-skeleton, so pairwise distinct rotations of the
/// skeleton force the `p` classes apart, which happens exactly for factors
/// of the scale.
pub fn scale_factor_certified(t: &SkeletonTower, p: usize) -> Result<bool> {
    let st = exact_part(t, p)?;
    let s = st.statuses();
    Ok((1..p).all(|shift| (0..p).any(|x| s[x] != s[(x + shift) % p])))
}

/// Certified status of `Per_q` for arbitrary `q`, presented modulo `gcd(q, N)`.
///
/// Every progression `x + qZ` meets exactly the cells of `x + gcd(q, N)Z`
/// modulo `N`, and filled cells persist in every completion.
pub(crate) fn periodic_part_any(t: &SkeletonTower, q: usize) -> ResidueStatusSet {
    let n = t.deepest_period();
    let g = gcd(q, n);
    let word = &t.deepest().word;
    ResidueStatusSet {
        modulus: g,
        status: (0..g).map(|r| class_status(word, g, r, q == n)).collect(),
    }
}

/// A skeleton word with its uncertified cells flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonView {
    /// In residues carry their symbol; Out and Unknown residues are Blank.
    pub word: PartialCyclicWord,
    pub unknown: Vec<bool>,
}

impl SkeletonView {
    pub fn unknown_residues(&self) -> Vec<usize> {
        (0..self.unknown.len()).filter(|&r| self.unknown[r]).collect()
    }

    pub fn rotated(&self, k: i64) -> SkeletonView {
        let n = self.unknown.len();
        SkeletonView {
            word: self.word.rotated(k),
            unknown: (0..n).map(|x| self.unknown[modulo(x as i64 + k, n)]).collect(),
        }
    }
}

pub fn skeleton_word(t: &SkeletonTower, p: usize) -> Result<SkeletonView> {
    let st = periodic_part(t, p)?;
    Ok(skeleton_from_status(&st))
}

pub(crate) fn skeleton_from_status(st: &ResidueStatusSet) -> SkeletonView {
    let cells = st
        .statuses()
        .iter()
        .map(|s| match s {
            ResidueStatus::In(a) => Some(*a),
            _ => None,
        })
        .collect();
    SkeletonView {
        word: PartialCyclicWord::new(cells).expect("moduli are positive"),
        unknown: st.statuses().iter().map(|s| s.is_unknown()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockLength {
    Known(usize),
    Unknown,
}

impl BlockLength {
    pub fn known(self) -> Option<usize> {
        match self {
            BlockLength::Known(n) => Some(n),
            BlockLength::Unknown => None,
        }
    }
}

/// A maximal cyclic run of non-hole residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSpan {
    pub start: usize,
    pub length: BlockLength,
    pub wraps: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockScan {
    pub period: usize,
    pub spans: Vec<BlockSpan>,
    pub holes: Vec<usize>,
    pub unknown: Vec<usize>,
}

impl BlockScan {
    /// Smallest certified span length, ignoring spans whose length is Unknown.
    pub fn min_certified_length(&self) -> Option<usize> {
        self.spans.iter().filter_map(|s| s.length.known()).min()
    }

    /// Minimal filled-block length, `None` when Unknown residues make it uncertain.
    pub fn min_length(&self) -> Option<usize> {
        if self.spans.iter().any(|s| s.length == BlockLength::Unknown) {
            return None;
        }
        self.min_certified_length()
    }

    /// Minimal cyclic distance between consecutive holes; `None` if any residue is Unknown.
    pub fn min_hole_gap(&self) -> Option<usize> {
        if !self.unknown.is_empty() || self.holes.is_empty() {
            return None;
        }
        let h = &self.holes;
        let wrap = self.period - h[h.len() - 1] + h[0];
        h.windows(2).map(|w| w[1] - w[0]).chain([wrap]).min()
    }
}

pub fn filled_blocks(t: &SkeletonTower, p: usize) -> Result<BlockScan> {
    let st = periodic_part(t, p)?;
    scan_blocks(&st)
}

pub(crate) fn scan_blocks(st: &ResidueStatusSet) -> Result<BlockScan> {
    let p = st.modulus();
    let holes = st.out_residues();
    if holes.is_empty() {
        return Err(Error::FullyPeriodic { p });
    }
    let mut spans = Vec::new();
    for (i, &h) in holes.iter().enumerate() {
        let next = if i + 1 < holes.len() {
            holes[i + 1]
        } else {
            holes[0] + p
        };
        let len = next - h - 1;
        if len == 0 {
            continue;
        }
        let start = (h + 1) % p;
        let uncertain = (h + 1..next).any(|x| st.statuses()[x % p].is_unknown());
        spans.push(BlockSpan {
            start,
            length: if uncertain {
                BlockLength::Unknown
            } else {
                BlockLength::Known(len)
            },
            wraps: start + len > p,
        });
    }
    spans.sort_by_key(|s| s.start);
    Ok(BlockScan {
        period: p,
        spans,
        holes,
        unknown: st.unknown_residues(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EssentialStatus {
    EssentialCertified,
    NotEssentialCertified,
    Unknown,
}

/// Whether `p` is an essential period of every completion, of none, or undecided.
pub fn essential_period_status(t: &SkeletonTower, p: usize) -> Result<EssentialStatus> {
    let sp = periodic_part(t, p)?;
    if sp.is_certified_empty() {
        return Ok(EssentialStatus::NotEssentialCertified);
    }
    let mut all_separated = true;
    for q in 1..p {
        let sq = periodic_part_any(t, q);
        let span = lcm(p, sq.modulus());
        let mut separated = false;
        let mut determined = true;
        for x in 0..span as i64 {
            match (sp.get(x), sq.get(x)) {
                (ResidueStatus::In(_), ResidueStatus::Out) | (ResidueStatus::Out, ResidueStatus::In(_)) => {
                    separated = true;
                    break;
                }
                (ResidueStatus::Unknown, _) | (_, ResidueStatus::Unknown) => determined = false,
                _ => {}
            }
        }
        if !separated {
            if determined {
                return Ok(EssentialStatus::NotEssentialCertified);
            }
            all_separated = false;
        }
    }
    Ok(if all_separated && !sp.in_residues().is_empty() {
        EssentialStatus::EssentialCertified
    } else {
        EssentialStatus::Unknown
    })
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleTruncation {
    /// lcm of the certified essential periods.
    pub certified: SupernaturalNumber,
    pub essential: Vec<usize>,
    /// Divisors of the deepest period whose status is Unknown.
    pub pending: Vec<usize>,
}

pub fn scale_truncation(t: &SkeletonTower) -> Result<ScaleTruncation> {
    let mut essential = Vec::new();
    let mut pending = Vec::new();
    for d in divisors(t.deepest_period()) {
        match essential_period_status(t, d)? {
            EssentialStatus::EssentialCertified => essential.push(d),
            EssentialStatus::Unknown => pending.push(d),
            EssentialStatus::NotEssentialCertified => {}
        }
    }
    if let Some(scale) = t.declared_scale() {
        if let Some(&d) = essential.iter().find(|&&d| !scale.is_factor(d as u64)) {
            return Err(Error::Scale {
                period: d,
                scale: scale.to_string(),
            });
        }
    }
    Ok(ScaleTruncation {
        certified: SupernaturalNumber::lcm_of(essential.iter().map(|&d| d as u64)),
        essential,
        pending,
    })
}

fn prime_index(q: u64) -> usize {
    (2..=q).filter(|&n| is_prime(n)).count()
}

fn first_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&n| is_prime(n)).take(count).collect()
}

/// The natural factorization of `u`: the terms `∏_{i ≤ t+1} p_i^{min(k_i, t+1)}`
/// with 1's and repeats deleted. Returns at most `count` terms.
pub fn natural_factorization(u: &SupernaturalNumber, count: usize) -> Result<Vec<u64>> {
    let largest = u.largest_prime().ok_or(Error::EmptyScale)?;
    let primes = first_primes(prime_index(largest));
    // Past this stage every term equals the last one (finite u only).
    let settle = u
        .factors()
        .map(|(_, e)| e.at_most(u32::MAX) as usize)
        .max()
        .unwrap_or(0)
        .max(primes.len());
    let mut out: Vec<u64> = Vec::new();
    let mut t = 0usize;
    while out.len() < count {
        let bound = (t + 1) as u32;
        let mut term: u64 = 1;
        for &p in primes.iter().take(t + 1) {
            let e = u.exponent(p).at_most(bound);
            let power = p.checked_pow(e).ok_or(Error::FactorOverflow)?;
            term = term.checked_mul(power).ok_or(Error::FactorOverflow)?;
        }
        if term != 1 && out.last() != Some(&term) {
            out.push(term);
        }
        if u.is_finite() && t + 1 >= settle {
            break;
        }
        t += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGrowth {
    pub period: usize,
    /// Minimal certified filled-block length; `None` if no certified minimum exists.
    pub min_block: Option<usize>,
    pub min_gap: Option<usize>,
    pub unknown_count: usize,
    pub fully_periodic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    StrictlyIncreasing,
    NonDecreasing,
    NotMonotone,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthProfile {
    pub levels: Vec<LevelGrowth>,
}

impl GrowthProfile {
    pub fn min_block_lengths(&self) -> Vec<Option<usize>> {
        self.levels.iter().map(|l| l.min_block).collect()
    }

    pub fn min_gaps(&self) -> Vec<Option<usize>> {
        self.levels.iter().map(|l| l.min_gap).collect()
    }

    pub fn block_trend(&self) -> Trend {
        trend(&self.min_block_lengths())
    }

    pub fn gap_trend(&self) -> Trend {
        trend(&self.min_gaps())
    }
}

fn trend(values: &[Option<usize>]) -> Trend {
    let Some(values) = values.iter().copied().collect::<Option<Vec<_>>>() else {
        return Trend::Undetermined;
    };
    if values.len() < 2 {
        Trend::NonDecreasing
    } else if values.windows(2).all(|w| w[0] < w[1]) {
        Trend::StrictlyIncreasing
    } else if values.windows(2).all(|w| w[0] <= w[1]) {
        Trend::NonDecreasing
    } else {
        Trend::NotMonotone
    }
}

/// Block and hole statistics of every declared level, each read at its own stage.
pub fn growth_profile(t: &SkeletonTower) -> GrowthProfile {
    let levels = (0..t.depth()).map(|i| level_growth(t, i)).collect();
    GrowthProfile { levels }
}

/// As [`growth_profile`], restricted to the listed declared periods.
pub fn growth_profile_along(t: &SkeletonTower, periods: &[usize]) -> Result<GrowthProfile> {
    let declared = t.periods();
    let levels = periods
        .iter()
        .map(|p| {
            declared
                .iter()
                .position(|d| d == p)
                .map(|i| level_growth(t, i))
                .ok_or_else(|| Error::PeriodMismatch(format!("{p} is not a declared period")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthProfile { levels })
}

fn level_growth(t: &SkeletonTower, level: usize) -> LevelGrowth {
    let stage = t.truncated(level + 1);
    let period = stage.deepest_period();
    let st = periodic_part(&stage, period).expect("a period divides itself");
    match scan_blocks(&st) {
        Ok(scan) => LevelGrowth {
            period,
            min_block: scan.min_length(),
            min_gap: scan.min_hole_gap(),
            unknown_count: scan.unknown.len(),
            fully_periodic: false,
        },
        Err(_) => LevelGrowth {
            period,
            min_block: None,
            min_gap: None,
            unknown_count: st.unknown_residues().len(),
            fully_periodic: true,
        },
    }
}
