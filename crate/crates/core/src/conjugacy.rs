//! Conjugacy machinery: the block correspondence Γ, subshift-level verdicts,
//! starred parts and the χ stage invariant, `D_p` comparison of parts and the
//! finite-set class comparison built on it.
//!
//! A Consistent Γ certifies a pairing of completions: there is a bijection of
//! full `p`-words carrying the fills of every source block onto the fills of
//! the paired target block, and applying it blockwise maps each completion of
//! one tower to a completion of the other.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::gcd;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::skeleton::{periodic_part, BlockLength, ResidueStatus, ResidueStatusSet};
use crate::tower::{Alphabet, Cell, PartialCyclicWord, SkeletonTower};
use crate::SupernaturalNumber;

/// Block-type correspondence, listed in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correspondence {
    pub pairs: Vec<(PartialCyclicWord, PartialCyclicWord)>,
}

impl Correspondence {
    pub fn inverse(&self) -> Correspondence {
        Correspondence {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    pub fn image(&self, source: &PartialCyclicWord) -> Option<&PartialCyclicWord> {
        self.pairs.iter().find(|(a, _)| a == source).map(|(_, b)| b)
    }

    pub fn render(&self, alphabet: &Alphabet) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|(a, b)| (a.render(alphabet), b.render(alphabet)))
            .collect()
    }
}

/// Completion-universal evidence that no correspondence exists. Block indices
/// count `p`-blocks from position 0 of the (padded) deepest words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GammaConflict {
    /// Equal full source blocks paired with different full target blocks.
    NotWellDefined { blocks: (usize, usize) },
    /// Different full source blocks paired with equal full target blocks.
    NotInjective { blocks: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GammaResult {
    Consistent(Correspondence),
    Contradicted(GammaConflict),
    Undetermined(String),
}

impl GammaResult {
    pub fn is_consistent(&self) -> bool {
        matches!(self, GammaResult::Consistent(_))
    }

    pub fn is_contradicted(&self) -> bool {
        matches!(self, GammaResult::Contradicted(_))
    }
}

fn common_length(a: &SkeletonTower, b: &SkeletonTower) -> Result<usize> {
    let (na, nb) = (a.deepest_period(), b.deepest_period());
    if na % nb == 0 || nb % na == 0 {
        Ok(na.max(nb))
    } else {
        Err(Error::IncompatiblePeriods { left: na, right: nb })
    }
}

fn compatible(x: &[Cell], y: &[Cell]) -> bool {
    x.iter().zip(y).all(|(a, b)| match (a, b) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    })
}

fn is_full(x: &[Cell]) -> bool {
    x.iter().all(Option::is_some)
}

fn same_mask(x: &[Cell], y: &[Cell]) -> bool {
    x.iter().zip(y).all(|(a, b)| a.is_some() == b.is_some())
}

/// The correspondence between the `p`-blocks of `a`'s deepest word and those
/// of `rotate(b, k)`'s deepest word. When one deepest period divides the other
/// the shorter word is repeated.
pub fn gamma_map(a: &SkeletonTower, b: &SkeletonTower, p: usize, k: i64) -> Result<GammaResult> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let len = common_length(a, b)?;
    for t in [a, b] {
        if p == 0 || t.deepest_period() % p != 0 {
            return Err(Error::NonDivisor {
                p,
                period: t.deepest_period(),
            });
        }
    }
    let src = a.deepest().word.repeated_to(len);
    let dst = b.deepest().word.rotated(k).repeated_to(len);
    Ok(gamma_words(src.cells(), dst.cells(), p))
}

fn gamma_words(src: &[Cell], dst: &[Cell], p: usize) -> GammaResult {
    let blocks: Vec<(&[Cell], &[Cell])> = src.chunks(p).zip(dst.chunks(p)).collect();

    // Contradictions come from fully-filled blocks only.
    let mut full_fwd: HashMap<&[Cell], usize> = HashMap::new();
    let mut full_bwd: HashMap<&[Cell], usize> = HashMap::new();
    for (j, &(x, y)) in blocks.iter().enumerate() {
        if !(is_full(x) && is_full(y)) {
            continue;
        }
        if let Some(&i) = full_fwd.get(x) {
            if blocks[i].1 != y {
                return GammaResult::Contradicted(GammaConflict::NotWellDefined { blocks: (i, j) });
            }
        }
        if let Some(&i) = full_bwd.get(y) {
            if blocks[i].0 != x {
                return GammaResult::Contradicted(GammaConflict::NotInjective { blocks: (i, j) });
            }
        }
        full_fwd.entry(x).or_insert(j);
        full_bwd.entry(y).or_insert(j);
    }

    if let Some(j) = blocks.iter().position(|(x, y)| !same_mask(x, y)) {
        return GammaResult::Undetermined(format!("blank masks differ at block {j}"));
    }
    let mut fwd: HashMap<&[Cell], &[Cell]> = HashMap::new();
    let mut bwd: HashMap<&[Cell], &[Cell]> = HashMap::new();
    let mut pairs: Vec<(&[Cell], &[Cell])> = Vec::new();
    for (j, &(x, y)) in blocks.iter().enumerate() {
        match (fwd.get(x), bwd.get(y)) {
            (None, None) => {
                fwd.insert(x, y);
                bwd.insert(y, x);
                pairs.push((x, y));
            }
            (Some(&y0), Some(&x0)) if y0 == y && x0 == x => {}
            (Some(_), _) => {
                return GammaResult::Undetermined(format!("block {j}: source type already paired elsewhere"))
            }
            (None, Some(_)) => {
                return GammaResult::Undetermined(format!("block {j}: target type already paired elsewhere"))
            }
        }
    }
    // Fill sets of paired types must overlap in the same pattern on both
    // sides for a bijection of full words to carry one onto the other.
    for (i, (x1, y1)) in pairs.iter().enumerate() {
        for (x2, y2) in &pairs[i + 1..] {
            if compatible(x1, x2) != compatible(y1, y2) {
                return GammaResult::Undetermined("block types overlap differently on the two sides".into());
            }
        }
    }
    let word = |c: &[Cell]| PartialCyclicWord::new(c.to_vec()).expect("blocks are non-empty");
    GammaResult::Consistent(Correspondence {
        pairs: pairs.into_iter().map(|(x, y)| (word(x), word(y))).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NegativeReason {
    Scale {
        left: SupernaturalNumber,
        right: SupernaturalNumber,
    },
}

/// Outcome counts for one candidate stage of a verdict search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageDiagnostic {
    pub stage: usize,
    pub contradicted: usize,
    pub undetermined: usize,
    /// Largest `r` with `[-r, r]` certified-In for `Per_stage` of the source, if any.
    pub source_margin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ConjugateCertified {
        stage: usize,
        shift: usize,
        witness: Correspondence,
    },
    NotConjugateCertified {
        reason: NegativeReason,
    },
    /// No conjugacy whose forward code has radius at most `radius`.
    RefutedUpTo {
        radius: usize,
        stages: Vec<usize>,
    },
    Unknown {
        notes: Vec<String>,
        stages: Vec<StageDiagnostic>,
    },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::ConjugateCertified { .. } => "conjugate-certified",
            Verdict::NotConjugateCertified { .. } => "not-conjugate",
            Verdict::RefutedUpTo { .. } => "refuted-up-to",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Largest `r` such that every residue of `[-r, r]` is certified-In.
fn symmetric_margin(st: &ResidueStatusSet) -> Option<usize> {
    if !st.get(0).is_in() {
        return None;
    }
    let p = st.modulus();
    let mut r = 0;
    while r < p && st.get(r as i64 + 1).is_in() && st.get(-(r as i64) - 1).is_in() {
        r += 1;
    }
    Some(r)
}

pub fn conjugacy_verdict(a: &SkeletonTower, b: &SkeletonTower, max_radius: usize) -> Result<Verdict> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    if let (Some(u), Some(v)) = (a.declared_scale(), b.declared_scale()) {
        if u != v {
            return Ok(Verdict::NotConjugateCertified {
                reason: NegativeReason::Scale {
                    left: u.clone(),
                    right: v.clone(),
                },
            });
        }
    }
    let len = match common_length(a, b) {
        Ok(len) => len,
        Err(e) => {
            return Ok(Verdict::Unknown {
                notes: vec![e.to_string()],
                stages: Vec::new(),
            })
        }
    };
    let g = gcd(a.deepest_period(), b.deepest_period());
    let stages: BTreeSet<usize> = a
        .periods()
        .into_iter()
        .chain(b.periods())
        .filter(|p| g % p == 0)
        .collect();
    // Blockwise certificates need p to be a factor of both scales.
    let certifiable = |p: usize| {
        [a, b]
            .iter()
            .all(|t| crate::skeleton::scale_factor_certified(t, p).unwrap_or(false))
    };
    let src = a.deepest().word.repeated_to(len);
    let nb = b.deepest_period();

    let mut tables = Vec::new();
    for &p in &stages {
        let results: Vec<GammaResult> = (0..nb)
            .map(|k| {
                let dst = b.deepest().word.rotated(k as i64).repeated_to(len);
                gamma_words(src.cells(), dst.cells(), p)
            })
            .collect();
        let found = certifiable(p)
            .then(|| results.iter().position(GammaResult::is_consistent))
            .flatten();
        if let Some(shift) = found {
            let GammaResult::Consistent(witness) = results[shift].clone() else {
                unreachable!()
            };
            return Ok(Verdict::ConjugateCertified {
                stage: p,
                shift,
                witness,
            });
        }
        tables.push((p, results));
    }

    let margins: Vec<(Option<usize>, ResidueStatusSet)> = tables
        .iter()
        .map(|(p, _)| {
            let sa = periodic_part(a, *p).expect("stage divides both deepest periods");
            let sb = periodic_part(b, *p).expect("stage divides both deepest periods");
            (symmetric_margin(&sa), sb)
        })
        .collect();
    for radius in (0..=max_radius).rev() {
        let refuting: Vec<usize> = tables
            .iter()
            .zip(&margins)
            .filter(|((_, results), (margin, sb))| {
                margin.is_some_and(|r| r >= 2 * radius)
                    && (0..nb).all(|k| {
                        let candidate = (-(radius as i64)..=radius as i64)
                            .all(|x| !sb.get(x + k as i64).is_out());
                        !candidate || results[k].is_contradicted()
                    })
            })
            .map(|((p, _), _)| *p)
            .collect();
        if !refuting.is_empty() {
            return Ok(Verdict::RefutedUpTo {
                radius,
                stages: refuting,
            });
        }
    }

    let mut notes = Vec::new();
    if stages.is_empty() {
        notes.push("no declared period divides both deepest periods".to_string());
    }
    for (p, results) in &tables {
        if !certifiable(*p) && results.iter().any(GammaResult::is_consistent) {
            notes.push(format!(
                "stage {p}: consistent correspondence found, but {p} is not a certified factor of both scales"
            ));
        }
    }
    let stages = tables
        .iter()
        .zip(&margins)
        .map(|((p, results), (margin, _))| StageDiagnostic {
            stage: *p,
            contradicted: results.iter().filter(|r| r.is_contradicted()).count(),
            undetermined: results
                .iter()
                .filter(|r| matches!(r, GammaResult::Undetermined(_)))
                .count(),
            source_margin: *margin,
        })
        .collect();
    Ok(Verdict::Unknown { notes, stages })
}

/// A rotation class of a tower at period `p`: the stand-in for the closure of
/// `{σ^i(α) : i ≡ residue (mod p)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Part<'a> {
    pub base: &'a SkeletonTower,
    pub period: usize,
    pub residue: usize,
}

impl<'a> Part<'a> {
    pub fn new(base: &'a SkeletonTower, period: usize, residue: i64) -> Result<Self> {
        if period == 0 || base.deepest_period() % period != 0 {
            return Err(Error::NonDivisor {
                p: period,
                period: base.deepest_period(),
            });
        }
        Ok(Part {
            base,
            period,
            residue: crate::tower::modulo(residue, period),
        })
    }

    /// The common tower of the part's points, `rotate(base, residue)`.
    pub fn tower(&self) -> SkeletonTower {
        self.base.rotate(self.residue as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarStatus {
    Starred,
    NotStarred,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StarredResidue {
    pub residue: usize,
    pub status: StarStatus,
    /// Filled-block length starting at the residue; set for Starred residues only.
    pub length: Option<BlockLength>,
}

/// Parts whose skeleton starts a filled block at index 0.
pub fn parts_star(t: &SkeletonTower, p: usize) -> Result<Vec<StarredResidue>> {
    let st = periodic_part(t, p)?;
    Ok((0..p).map(|k| star_residue(&st, k)).collect())
}

fn star_residue(st: &ResidueStatusSet, k: usize) -> StarredResidue {
    let here = st.get(k as i64);
    let before = st.get(k as i64 - 1);
    let status = if here.is_in() && before.is_out() {
        StarStatus::Starred
    } else if here.is_out() || before.is_in() {
        StarStatus::NotStarred
    } else {
        StarStatus::Unknown
    };
    let length = (status == StarStatus::Starred).then(|| {
        let mut j = 0;
        loop {
            match st.get((k + j) as i64) {
                ResidueStatus::In(_) => j += 1,
                ResidueStatus::Out => break BlockLength::Known(j),
                ResidueStatus::Unknown => break BlockLength::Unknown,
            }
        }
    });
    StarredResidue {
        residue: k,
        status,
        length,
    }
}

/// The χ invariant at one stage: block-midpoint residues of the starred parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChiStage {
    pub period: usize,
    pub residues: BTreeSet<usize>,
    /// False when some starred status or length was Unknown.
    pub complete: bool,
}

impl ChiStage {
    pub fn parts<'a>(&self, t: &'a SkeletonTower) -> Vec<Part<'a>> {
        self.residues
            .iter()
            .map(|&r| Part {
                base: t,
                period: self.period,
                residue: r,
            })
            .collect()
    }
}

pub fn chi_stage(t: &SkeletonTower, p: usize) -> Result<ChiStage> {
    let mut residues = BTreeSet::new();
    let mut complete = true;
    for s in parts_star(t, p)? {
        match (s.status, s.length) {
            (StarStatus::Starred, Some(BlockLength::Known(j))) => {
                residues.insert((s.residue + j / 2) % p);
            }
            (StarStatus::NotStarred, _) => {}
            _ => complete = false,
        }
    }
    Ok(ChiStage {
        period: p,
        residues,
        complete,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpResult {
    ConsistentWitness { witness: Correspondence, rotation: usize },
    Refuted,
    Undetermined,
}

/// Compares two parts under blockwise permutations of `p`-words, scanning
/// block-aligned shifts `j·p`.
pub fn dp_equivalent(w: &Part<'_>, z: &Part<'_>) -> Result<DpResult> {
    if w.period != z.period {
        return Err(Error::PeriodMismatch(format!(
            "parts at periods {} and {}",
            w.period, z.period
        )));
    }
    if w.base.alphabet() != z.base.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let p = w.period;
    let len = common_length(w.base, z.base)?;
    let src = w.tower().deepest().word.repeated_to(len);
    let zt = z.tower();
    let mut all_contradicted = true;
    for j in 0..len / p {
        let dst = zt.deepest().word.rotated((j * p) as i64).repeated_to(len);
        match gamma_words(src.cells(), dst.cells(), p) {
            GammaResult::Consistent(witness) => {
                return Ok(DpResult::ConsistentWitness { witness, rotation: j })
            }
            GammaResult::Contradicted(_) => {}
            GammaResult::Undetermined(_) => all_contradicted = false,
        }
    }
    Ok(if all_contradicted {
        DpResult::Refuted
    } else {
        DpResult::Undetermined
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeStatus {
    Equivalent,
    Refuted,
    Undetermined,
}

impl From<&DpResult> for EdgeStatus {
    fn from(r: &DpResult) -> Self {
        match r {
            DpResult::ConsistentWitness { .. } => EdgeStatus::Equivalent,
            DpResult::Refuted => EdgeStatus::Refuted,
            DpResult::Undetermined => EdgeStatus::Undetermined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EfinResult {
    CertifiedEqual,
    Refuted,
    Undetermined,
}

/// Compares the class sets of `S` (nodes `0..s`) and `T` (nodes `s..s+t`)
/// given the pairwise edge statuses (`edges[i][j]`, symmetric).
pub fn efin_from_edges(s: usize, t: usize, edges: &[Vec<EdgeStatus>]) -> EfinResult {
    let n = s + t;
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if edges[i][j] == EdgeStatus::Equivalent {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.into_labeling();
    let side = |i: usize| i < s;
    let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    let mut one_sided = classes
        .values()
        .filter(|members| members.iter().all(|&i| side(i)) || members.iter().all(|&i| !side(i)));
    let mut any_one_sided = false;
    let refuted = one_sided.any(|members| {
        any_one_sided = true;
        let own = side(members[0]);
        members.iter().all(|&i| {
            (0..n)
                .filter(|&j| side(j) != own)
                .all(|j| edges[i][j] == EdgeStatus::Refuted)
        })
    });
    if refuted {
        EfinResult::Refuted
    } else if any_one_sided {
        EfinResult::Undetermined
    } else {
        EfinResult::CertifiedEqual
    }
}

/// Equality of the sets of `D_p` classes met by `S` and by `T`.
pub fn efin_equal(s: &[Part<'_>], t: &[Part<'_>], p: usize) -> Result<EfinResult> {
    let nodes: Vec<&Part<'_>> = s.iter().chain(t).collect();
    if let Some(bad) = nodes.iter().find(|w| w.period != p) {
        return Err(Error::PeriodMismatch(format!(
            "part at period {} in a comparison at period {p}",
            bad.period
        )));
    }
    Ok(efin_from_edges(s.len(), t.len(), &part_edges(&nodes)?))
}

/// Pairwise `D_p` statuses; parts over incompatible deepest periods are left Undetermined.
pub fn part_edges(nodes: &[&Part<'_>]) -> Result<Vec<Vec<EdgeStatus>>> {
    let n = nodes.len();
    let mut edges = vec![vec![EdgeStatus::Undetermined; n]; n];
    for i in 0..n {
        edges[i][i] = EdgeStatus::Equivalent;
        for j in i + 1..n {
            let status = match dp_equivalent(nodes[i], nodes[j]) {
                Ok(r) => EdgeStatus::from(&r),
                Err(Error::IncompatiblePeriods { .. }) => EdgeStatus::Undetermined,
                Err(e) => return Err(e),
            };
            edges[i][j] = status;
            edges[j][i] = status;
        }
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StageOutcome {
    Compared(EfinResult),
    /// Some χ data was Unknown on at least one side.
    Incomplete,
    /// The stage does not divide both deepest periods.
    NotEvaluable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub period: u64,
    pub outcome: StageOutcome,
    pub left: Option<ChiStage>,
    pub right: Option<ChiStage>,
    /// Both χ sets empty: equal by convention.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantSummary {
    NotEquivalentScale {
        left: SupernaturalNumber,
        right: SupernaturalNumber,
    },
    /// The trailing run of evaluated stages that compare CertifiedEqual.
    Suffix {
        evaluated: usize,
        equal_suffix: usize,
        from_stage: Option<u64>,
    },
}

/// Advisory margin data: stages are trusted for radius `m` once the minimal
/// certified block length exceeds `4m + 6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarginAdvice {
    pub min_block: Option<usize>,
    pub max_radius: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub factorization: Vec<u64>,
    pub stages: Vec<StageReport>,
    pub summary: InvariantSummary,
    pub advice: MarginAdvice,
}

fn margin_advice(a: &SkeletonTower, b: &SkeletonTower) -> MarginAdvice {
    let min_block = [a, b]
        .iter()
        .filter_map(|t| crate::skeleton::filled_blocks(t, t.deepest_period()).ok())
        .filter_map(|scan| scan.min_certified_length())
        .min();
    MarginAdvice {
        min_block,
        max_radius: min_block.and_then(|l| l.checked_sub(7)).map(|d| d / 4),
    }
}

pub fn invariant_compare(a: &SkeletonTower, b: &SkeletonTower, stages: usize) -> Result<InvariantReport> {
    let (Some(u), Some(v)) = (a.declared_scale(), b.declared_scale()) else {
        return Err(Error::MissingScaleDeclaration);
    };
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let advice = margin_advice(a, b);
    if u != v {
        return Ok(InvariantReport {
            factorization: Vec::new(),
            stages: Vec::new(),
            summary: InvariantSummary::NotEquivalentScale {
                left: u.clone(),
                right: v.clone(),
            },
            advice,
        });
    }
    let factorization = crate::skeleton::natural_factorization(u, stages)?;
    let mut reports = Vec::new();
    for &p in &factorization {
        let divides = |t: &SkeletonTower| (t.deepest_period() as u64) % p == 0;
        if !(divides(a) && divides(b)) {
            reports.push(StageReport {
                period: p,
                outcome: StageOutcome::NotEvaluable,
                left: None,
                right: None,
                empty: false,
            });
            continue;
        }
        let p = p as usize;
        let (ca, cb) = (chi_stage(a, p)?, chi_stage(b, p)?);
        let outcome = if ca.complete && cb.complete {
            StageOutcome::Compared(efin_equal(&ca.parts(a), &cb.parts(b), p)?)
        } else {
            StageOutcome::Incomplete
        };
        reports.push(StageReport {
            period: p as u64,
            outcome,
            empty: ca.residues.is_empty() && cb.residues.is_empty(),
            left: Some(ca),
            right: Some(cb),
        });
    }
    let evaluated: Vec<&StageReport> = reports
        .iter()
        .filter(|r| r.outcome != StageOutcome::NotEvaluable)
        .collect();
    let equal_suffix = evaluated
        .iter()
        .rev()
        .take_while(|r| r.outcome == StageOutcome::Compared(EfinResult::CertifiedEqual))
        .count();
    let from_stage = (equal_suffix > 0).then(|| evaluated[evaluated.len() - equal_suffix].period);
    Ok(InvariantReport {
        factorization,
        summary: InvariantSummary::Suffix {
            evaluated: evaluated.len(),
            equal_suffix,
            from_stage,
        },
        stages: reports,
        advice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{apply_positionwise_permutation, PositionwisePermutation};

    fn bin() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    fn gen(depth: usize) -> SkeletonTower {
        let words = [
            "0___0",
            "0_1_00___0",
            "001000___00111001010",
            "001000_1_00111001010001000___00111001010",
        ];
        SkeletonTower::from_compact(&bin(), &words[..=depth]).unwrap()
    }

    fn scaled(t: SkeletonTower, scale: &str) -> SkeletonTower {
        t.with_scale(Some(scale.parse().unwrap())).unwrap()
    }

    fn permuted(t: &SkeletonTower) -> SkeletonTower {
        let phi = PositionwisePermutation::parse_spec("1,0;id;id;id;1,0", &bin()).unwrap();
        apply_positionwise_permutation(t, &phi).unwrap()
    }

    fn rendered(c: &Correspondence) -> Vec<(String, String)> {
        c.render(&bin())
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    fn single(word: &str) -> SkeletonTower {
        SkeletonTower::from_compact(&bin(), &[word]).unwrap()
    }

    #[test]
    fn gamma_identity() {
        let a = gen(1);
        let GammaResult::Consistent(c) = gamma_map(&a, &a, 5, 0).unwrap() else {
            panic!()
        };
        assert_eq!(rendered(&c), vec![pair("0_1_0", "0_1_0"), pair("0___0", "0___0")]);
        assert!(c.is_identity());
    }

    #[test]
    fn gamma_positionwise_pair() {
        let a = gen(1);
        let GammaResult::Consistent(c) = gamma_map(&a, &permuted(&a), 5, 0).unwrap() else {
            panic!()
        };
        assert_eq!(rendered(&c), vec![pair("0_1_0", "1_1_1"), pair("0___0", "1___1")]);
    }

    #[test]
    fn gamma_rotated_masks_undetermined() {
        let a = gen(1);
        assert!(matches!(
            gamma_map(&a, &a.rotate(1), 5, 0).unwrap(),
            GammaResult::Undetermined(_)
        ));
    }

    #[test]
    fn gamma_full_conflicts() {
        let a = single("0101");
        let b = single("0110");
        assert_eq!(
            gamma_map(&a, &b, 1, 0).unwrap(),
            GammaResult::Contradicted(GammaConflict::NotWellDefined { blocks: (0, 2) })
        );
        let b = single("0010");
        assert_eq!(
            gamma_map(&single("0011"), &b, 1, 0).unwrap(),
            GammaResult::Contradicted(GammaConflict::NotWellDefined { blocks: (2, 3) })
        );
        assert_eq!(
            gamma_map(&a, &single("0000"), 1, 0).unwrap(),
            GammaResult::Contradicted(GammaConflict::NotInjective { blocks: (0, 1) })
        );
    }

    #[test]
    fn gamma_overlapping_types_need_matching_overlap() {
        // "0_" and "00" can coincide in a completion, "1_" and "00" cannot.
        let a = single("0_00");
        let b = single("1_00");
        assert!(matches!(gamma_map(&a, &b, 2, 0).unwrap(), GammaResult::Undetermined(_)));
        assert!(matches!(gamma_map(&a, &single("0_11"), 2, 0).unwrap(), GammaResult::Undetermined(_)));
        assert!(gamma_map(&a, &single("1_10"), 2, 0).unwrap().is_consistent());
    }

    #[test]
    fn gamma_pads_and_rejects_incompatible() {
        let a = single("01");
        let b = single("0101");
        assert!(gamma_map(&a, &b, 2, 0).unwrap().is_consistent());
        assert_eq!(
            gamma_map(&single("010"), &b, 1, 0).unwrap_err(),
            Error::IncompatiblePeriods { left: 3, right: 4 }
        );
        assert!(matches!(gamma_map(&a, &b, 3, 0), Err(Error::NonDivisor { .. })));
    }

    #[test]
    fn verdict_examples() {
        let g2 = gen(2);
        let v = conjugacy_verdict(&g2, &g2, 3).unwrap();
        let Verdict::ConjugateCertified { stage, shift, witness } = v else {
            panic!("{v:?}")
        };
        assert_eq!((stage, shift), (5, 0));
        assert!(witness.is_identity());

        let g1 = gen(1);
        let v = conjugacy_verdict(&g1, &permuted(&g1), 3).unwrap();
        let Verdict::ConjugateCertified { stage, shift, witness } = v else {
            panic!("{v:?}")
        };
        assert_eq!((stage, shift), (5, 0));
        assert_eq!(rendered(&witness), vec![pair("0_1_0", "1_1_1"), pair("0___0", "1___1")]);

        let a = scaled(gen(2), "2^inf * 5");
        let b = scaled(single("001"), "3^inf");
        assert!(matches!(
            conjugacy_verdict(&a, &b, 3).unwrap(),
            Verdict::NotConjugateCertified { .. }
        ));
    }

    #[test]
    fn verdict_finds_rotation() {
        let g = gen(3);
        let b = permuted(&g).rotate(15);
        let Verdict::ConjugateCertified { stage, shift, .. } = conjugacy_verdict(&g, &b, 2).unwrap() else {
            panic!()
        };
        assert_eq!(stage, 5);
        assert_eq!(shift, 25);
    }

    #[test]
    fn verdict_refutes_periodic_words() {
        // Orbits of sizes 4 and 2: every shift conflicts on full blocks, but
        // the source margin at stage 2 only supports radius 0.
        let v = conjugacy_verdict(&single("0001"), &single("01"), 1).unwrap();
        assert_eq!(
            v,
            Verdict::RefutedUpTo {
                radius: 0,
                stages: vec![2]
            }
        );
        // Two exact period-4 orbits are conjugate.
        assert!(matches!(
            conjugacy_verdict(&single("0001"), &single("0011"), 1).unwrap(),
            Verdict::ConjugateCertified { stage: 4, .. }
        ));
        // A single 4-block matches, but a fixed point is no 4-orbit.
        let v = conjugacy_verdict(&single("0000"), &single("0001"), 0).unwrap();
        assert!(matches!(v, Verdict::Unknown { .. }), "{v:?}");
    }

    #[test]
    fn verdict_unknown_for_incompatible_periods() {
        let v = conjugacy_verdict(&single("01_"), &single("0_"), 1).unwrap();
        assert!(matches!(v, Verdict::Unknown { .. }), "{v:?}");
    }

    #[test]
    fn parts_star_examples() {
        let stars = parts_star(&gen(2), 5).unwrap();
        let starred: Vec<_> = stars.iter().filter(|s| s.status == StarStatus::Starred).collect();
        assert_eq!(starred.len(), 1);
        assert_eq!((starred[0].residue, starred[0].length), (4, Some(BlockLength::Known(2))));
        for k in 0..4 {
            assert_eq!(stars[k].status, StarStatus::NotStarred);
        }

        let stars = parts_star(&gen(3), 10).unwrap();
        assert_eq!(stars[2].status, StarStatus::Starred);
        assert_eq!(stars[2].length, Some(BlockLength::Known(1)));
        assert_eq!(stars[4].status, StarStatus::Starred);
        assert_eq!(stars[4].length, Some(BlockLength::Unknown));
        assert_eq!(stars[9].status, StarStatus::Unknown);

        let stars = parts_star(&gen(2), 20).unwrap();
        let starred: Vec<_> = stars
            .iter()
            .filter(|s| s.status == StarStatus::Starred)
            .map(|s| (s.residue, s.length))
            .collect();
        assert_eq!(starred, vec![(9, Some(BlockLength::Known(17)))]);
    }

    #[test]
    fn chi_examples() {
        let g2 = gen(2);
        let c = chi_stage(&g2, 5).unwrap();
        assert_eq!(c.residues, BTreeSet::from([0]));
        assert!(c.complete);
        let c = chi_stage(&g2, 20).unwrap();
        assert_eq!(c.residues, BTreeSet::from([17]));
        assert!(c.complete);
        let c = chi_stage(&g2, 2).unwrap();
        assert!(c.residues.is_empty() && c.complete);
        let c = chi_stage(&gen(3), 40).unwrap();
        assert_eq!(c.residues, BTreeSet::from([7, 17, 37]));
        assert!(!chi_stage(&gen(3), 10).unwrap().complete);
    }

    #[test]
    fn dp_examples() {
        let g = gen(1);
        let w = Part::new(&g, 5, 0).unwrap();
        let DpResult::ConsistentWitness { witness, rotation } = dp_equivalent(&w, &w).unwrap() else {
            panic!()
        };
        assert!(witness.is_identity());
        assert_eq!(rotation, 0);

        let h = permuted(&g);
        let z = Part::new(&h, 5, 0).unwrap();
        let DpResult::ConsistentWitness { witness, rotation } = dp_equivalent(&w, &z).unwrap() else {
            panic!()
        };
        assert_eq!(rendered(&witness), vec![pair("0_1_0", "1_1_1"), pair("0___0", "1___1")]);
        assert_eq!(rotation, 0);

        // Partial blocks never refute on their own.
        let other = single("0_1_00_0_0");
        let z = Part::new(&other, 5, 0).unwrap();
        assert_eq!(dp_equivalent(&w, &z).unwrap(), DpResult::Undetermined);

        let (x, y) = (single("0010000100"), single("0000000101"));
        let (w, z) = (Part::new(&x, 5, 0).unwrap(), Part::new(&y, 5, 0).unwrap());
        assert_eq!(dp_equivalent(&w, &z).unwrap(), DpResult::Refuted);

        let z = Part::new(&g, 10, 0).unwrap();
        assert!(matches!(dp_equivalent(&w, &z), Err(Error::PeriodMismatch(_))));
    }

    #[test]
    fn efin_examples() {
        let g = gen(1);
        let h = permuted(&g);
        let s = [Part::new(&g, 5, 0).unwrap()];
        assert_eq!(efin_equal(&s, &s, 5).unwrap(), EfinResult::CertifiedEqual);
        let t = [Part::new(&h, 5, 0).unwrap()];
        assert_eq!(efin_equal(&s, &t, 5).unwrap(), EfinResult::CertifiedEqual);
        assert_eq!(efin_equal(&[], &[], 5).unwrap(), EfinResult::CertifiedEqual);
        assert_eq!(efin_equal(&s, &[], 5).unwrap(), EfinResult::Refuted);

        let (x, y) = (single("0010000100"), single("0000000101"));
        let (w, z) = (Part::new(&x, 5, 0).unwrap(), Part::new(&y, 5, 0).unwrap());
        assert_eq!(efin_equal(&[w], &[z], 5).unwrap(), EfinResult::Refuted);
        let other = single("0_1_00_0_0");
        let z = Part::new(&other, 5, 0).unwrap();
        assert_eq!(efin_equal(&s, &[z], 5).unwrap(), EfinResult::Undetermined);
        assert!(matches!(efin_equal(&s, &s, 10), Err(Error::PeriodMismatch(_))));
    }

    #[test]
    fn efin_edge_logic() {
        use EdgeStatus::*;
        // S = {0, 1}, T = {2}: 0~2 certified, 1 undetermined against 2.
        let edges = vec![
            vec![Equivalent, Undetermined, Equivalent],
            vec![Undetermined, Equivalent, Undetermined],
            vec![Equivalent, Undetermined, Equivalent],
        ];
        assert_eq!(efin_from_edges(2, 1, &edges), EfinResult::Undetermined);
        let mut edges = edges;
        edges[0][1] = Equivalent;
        edges[1][0] = Equivalent;
        assert_eq!(efin_from_edges(2, 1, &edges), EfinResult::CertifiedEqual);
        edges[0][1] = Refuted;
        edges[1][0] = Refuted;
        edges[1][2] = Refuted;
        edges[2][1] = Refuted;
        assert_eq!(efin_from_edges(2, 1, &edges), EfinResult::Refuted);
    }

    #[test]
    fn invariant_reflexive_and_permuted() {
        let g = scaled(gen(3), "2^inf * 5");
        let r = invariant_compare(&g, &g, 3).unwrap();
        assert_eq!(r.factorization, vec![2, 4, 40]);
        for s in &r.stages {
            assert!(matches!(
                s.outcome,
                StageOutcome::Compared(EfinResult::CertifiedEqual) | StageOutcome::Incomplete
            ));
        }
        assert_eq!(r.stages[0].outcome, StageOutcome::Compared(EfinResult::CertifiedEqual));
        assert!(r.stages[0].empty);
        assert_eq!(r.stages[2].outcome, StageOutcome::Compared(EfinResult::CertifiedEqual));
        assert_eq!(
            r.summary,
            InvariantSummary::Suffix {
                evaluated: 3,
                equal_suffix: 3,
                from_stage: Some(2)
            }
        );

        let h = permuted(&g);
        let r = invariant_compare(&g, &h, 4).unwrap();
        for s in &r.stages {
            if let StageOutcome::Compared(e) = s.outcome {
                assert_eq!(e, EfinResult::CertifiedEqual, "stage {}", s.period);
            }
        }
    }

    #[test]
    fn invariant_scale_checks() {
        let g = gen(2);
        assert_eq!(invariant_compare(&g, &g, 3).unwrap_err(), Error::MissingScaleDeclaration);
        let a = scaled(gen(2), "2^inf * 5");
        let b = scaled(gen(2), "2^inf * 3 * 5");
        assert!(matches!(
            invariant_compare(&a, &b, 3).unwrap().summary,
            InvariantSummary::NotEquivalentScale { .. }
        ));
    }

    #[test]
    fn margin_advice_reads_min_block() {
        let g = scaled(gen(2), "2^inf * 5");
        let r = invariant_compare(&g, &g, 2).unwrap();
        assert_eq!(r.advice.min_block, Some(17));
        assert_eq!(r.advice.max_radius, Some(2));
    }
}
