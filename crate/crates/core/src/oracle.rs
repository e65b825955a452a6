//! Deliberately naive ground truth on fully-filled periodic words.

use crate::codes::BlockCode;
use crate::conjugacy::{EdgeStatus, EfinResult};
use crate::error::{Error, Result};
use crate::tower::{modulo, Alphabet, Level, PartialCyclicWord, SkeletonTower, Symbol};

/// A fully-filled cyclic word, read as the bi-infinite sequence it repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicWord {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
}

impl PeriodicWord {
    pub fn new(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::PeriodMismatch("periodic word must be non-empty".into()));
        }
        if symbols.iter().any(|s| s.index() >= alphabet.len()) {
            return Err(Error::Alphabet("symbol outside the alphabet".into()));
        }
        Ok(PeriodicWord { alphabet, symbols })
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let word = PartialCyclicWord::parse_compact(alphabet, text)?;
        PeriodicWord::from_word(alphabet, &word)
    }

    pub fn from_word(alphabet: &Alphabet, word: &PartialCyclicWord) -> Result<Self> {
        let symbols = word
            .cells()
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Alphabet("periodic words have no blanks".into()))?;
        PeriodicWord::new(alphabet.clone(), symbols)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn at(&self, i: i64) -> Symbol {
        self.symbols[modulo(i, self.symbols.len())]
    }

    pub fn render(&self) -> String {
        self.symbols.iter().map(|&s| self.alphabet.name(s)).collect()
    }

    /// The single-level tower presenting this word.
    pub fn to_tower(&self) -> SkeletonTower {
        let word = PartialCyclicWord::new(self.symbols.iter().map(|&s| Some(s)).collect())
            .expect("non-empty");
        SkeletonTower::new(self.alphabet.clone(), vec![Level::new(self.len(), word)], None)
            .expect("a single filled level is valid")
    }
}

/// Whether `x` lies in `Per_q`, by walking the progression `x + qZ` directly.
pub fn in_period_set(w: &PeriodicWord, q: usize, x: i64) -> bool {
    let first = w.at(x);
    (1..w.len() as i64).all(|k| w.at(x + q as i64 * k) == first)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactAnalysis {
    pub period: usize,
    /// `Some(a)` exactly for residues in `Per_p`.
    pub per: Vec<Option<Symbol>>,
    pub skeleton: PartialCyclicWord,
    pub essential: bool,
}

pub fn exact_periodic_analysis(w: &PeriodicWord, p: usize) -> Result<ExactAnalysis> {
    let n = w.len();
    if p == 0 || n % p != 0 {
        return Err(Error::NonDivisor { p, period: n });
    }
    let per: Vec<Option<Symbol>> = (0..p as i64)
        .map(|r| in_period_set(w, p, r).then(|| w.at(r)))
        .collect();
    // Period sets are N-periodic subsets of Z, so one period of positions decides equality.
    let members = |q: usize| -> Vec<bool> { (0..n as i64).map(|x| in_period_set(w, q, x)).collect() };
    let mine = members(p);
    let essential = mine.iter().any(|&b| b) && (1..p).all(|q| members(q) != mine);
    Ok(ExactAnalysis {
        period: p,
        skeleton: PartialCyclicWord::new(per.clone()).expect("p > 0"),
        per,
        essential,
    })
}

/// A conjugacy between two periodic orbits: `code` maps `v` onto `σ^shift(w)`
/// and `inverse` maps that back onto `v`, both of radius `radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyWitness {
    pub code: BlockCode,
    pub inverse: BlockCode,
    pub shift: usize,
    pub radius: usize,
}

/// Applies a block code to a periodic word.
pub fn apply_code_periodic(code: &BlockCode, v: &PeriodicWord) -> PeriodicWord {
    let m = code.radius() as i64;
    let symbols = (0..v.len() as i64)
        .map(|k| {
            let window: Vec<Symbol> = (k - m..=k + m).map(|x| v.at(x)).collect();
            code.apply(&window)
        })
        .collect();
    PeriodicWord::new(v.alphabet().clone(), symbols).expect("same alphabet")
}

fn window_index(window: &[Symbol], n: usize) -> usize {
    window.iter().fold(0, |acc, s| acc * n + s.index())
}

fn windows_of(seq: impl Fn(i64) -> Symbol, len: usize, m: usize) -> Vec<Vec<Symbol>> {
    let m = m as i64;
    (0..len as i64)
        .map(|k| (k - m..=k + m).map(&seq).collect())
        .collect()
}

/// Builds a total table from partial assignments; unused windows map to the first symbol.
fn total_code(alphabet: &Alphabet, radius: usize, assigned: &[(usize, Symbol)]) -> BlockCode {
    let size = alphabet.len().pow(2 * radius as u32 + 1);
    let mut table = vec![Symbol(0); size];
    for &(i, s) in assigned {
        table[i] = s;
    }
    BlockCode::new(alphabet.clone(), radius, table).expect("table is total")
}

/// Exhaustive search for a conjugacy of radius at most `max_radius` between
/// the orbits of `v` and `w`. Tables range over the windows occurring in `v`
/// only; `None` means the search space was exhausted.
pub fn exact_conjugacy_search(
    v: &PeriodicWord,
    w: &PeriodicWord,
    max_radius: usize,
) -> Result<Option<ConjugacyWitness>> {
    if v.alphabet() != w.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let n = v.alphabet().len();
    let (nv, nw) = (v.len(), w.len());
    let span = num_integer::lcm(nv, nw);
    for m in 0..=max_radius {
        let at_v = windows_of(|x| v.at(x), nv, m);
        let mut distinct: Vec<Vec<Symbol>> = at_v.clone();
        distinct.sort();
        distinct.dedup();
        let slot: Vec<usize> = at_v
            .iter()
            .map(|win| distinct.binary_search(win).expect("collected above"))
            .collect();
        let count = u32::try_from(distinct.len())
            .ok()
            .and_then(|d| n.checked_pow(d))
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| Error::InvalidCode("search space too large".into()))?;
        let mut choice = vec![0usize; distinct.len()];
        for counter in 0..count {
            let mut c = counter;
            for digit in choice.iter_mut().rev() {
                *digit = c % n;
                c /= n;
            }
            let image: Vec<usize> = slot.iter().map(|&i| choice[i]).collect();
            let Some(shift) = (0..nw).find(|&s| {
                (0..span).all(|x| image[x % nv] == w.at((x + s) as i64).index())
            }) else {
                continue;
            };
            // The inverse reads windows of σ^shift(w) and must return v.
            let target = |x: i64| w.at(x + shift as i64);
            let mut inverse: Vec<Option<Symbol>> = vec![None; n.pow(2 * m as u32 + 1)];
            let consistent = windows_of(target, span, m).iter().enumerate().all(|(x, win)| {
                let want = v.at(x as i64);
                *inverse[window_index(win, n)].get_or_insert(want) == want
            });
            if !consistent {
                continue;
            }
            let forward: Vec<(usize, Symbol)> = distinct
                .iter()
                .zip(&choice)
                .map(|(win, &s)| (window_index(win, n), Symbol(s as u16)))
                .collect();
            let backward: Vec<(usize, Symbol)> = inverse
                .iter()
                .enumerate()
                .filter_map(|(i, s)| s.map(|s| (i, s)))
                .collect();
            return Ok(Some(ConjugacyWitness {
                code: total_code(v.alphabet(), m, &forward),
                inverse: total_code(v.alphabet(), m, &backward),
                shift,
                radius: m,
            }));
        }
    }
    Ok(None)
}

/// Class-set comparison by exhausting every truth assignment of the
/// Undetermined edges (nodes `0..s` form `S`, the rest `T`). An assignment
/// survives when its equivalence closure separates every Refuted pair; the
/// sets are then compared by direct matching. `None` above `max_open` open edges.
pub fn efin_brute_force(s: usize, t: usize, edges: &[Vec<EdgeStatus>], max_open: usize) -> Option<EfinResult> {
    let n = s + t;
    let open: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| edges[i][j] == EdgeStatus::Undetermined)
        .collect();
    if open.len() > max_open {
        return None;
    }
    let (mut equal, mut unequal) = (false, false);
    for mask in 0u64..1 << open.len() {
        // Transitive closure on a boolean matrix, Warshall style.
        let mut rel: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i == j || edges[i][j] == EdgeStatus::Equivalent).collect())
            .collect();
        for (bit, &(i, j)) in open.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                rel[i][j] = true;
                rel[j][i] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        let refuted_merged = (0..n).any(|i| (0..n).any(|j| rel[i][j] && edges[i][j] == EdgeStatus::Refuted));
        if refuted_merged {
            continue;
        }
        let covered = |from: std::ops::Range<usize>, to: std::ops::Range<usize>| {
            from.into_iter().all(|i| to.clone().any(|j| rel[i][j]))
        };
        if covered(0..s, s..n) && covered(s..n, 0..s) {
            equal = true;
        } else {
            unequal = true;
        }
    }
    Some(match (equal, unequal) {
        (true, false) => EfinResult::CertifiedEqual,
        (false, true) => EfinResult::Refuted,
        _ => EfinResult::Undetermined,
    })
}
