//! Skeleton towers: finite divisibility chains of partial periodic words.
//!
//! A tower presents the set of its completions, i.e. every bi-infinite
//! sequence that agrees with each filled cell of each level (cells are read
//! cyclically). The deepest word is additionally read as the exact skeleton
//! at its own period: its Blanks are holes there.

use std::fmt;

use crate::error::{Error, Result};
use crate::odometer::SupernaturalNumber;

/// Reserved token for a blank cell.
pub const BLANK: &str = "_";

/// Non-negative remainder of `i` modulo `n`.
pub fn modulo(i: i64, n: usize) -> usize {
    debug_assert!(n > 0);
    i.rem_euclid(n as i64) as usize
}

/// Index of a symbol in its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A cell of a partial word; `None` is Blank.
pub type Cell = Option<Symbol>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.len() < 2 {
            return Err(Error::Alphabet("at least two symbols are required".into()));
        }
        if symbols.len() > u16::MAX as usize {
            return Err(Error::Alphabet("too many symbols".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Alphabet(format!("bad symbol token {s:?}")));
            }
            if s == BLANK {
                return Err(Error::Alphabet("\"_\" is reserved for blank".into()));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Alphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet `{0, 1, ..., n-1}` with decimal names.
    pub fn numeric(n: usize) -> Result<Self> {
        Alphabet::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.symbols[s.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| Symbol(i as u16))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.symbols.len()).map(|i| Symbol(i as u16))
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    /// True when every symbol is a single character, so words render without separators.
    pub fn is_compact(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    pub fn render_cell(&self, cell: Cell) -> &str {
        match cell {
            Some(s) => self.name(s),
            None => BLANK,
        }
    }
}

/// A cyclic word whose cells are symbols or Blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialCyclicWord {
    cells: Vec<Cell>,
}

impl PartialCyclicWord {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::PeriodMismatch("words must have positive length".into()));
        }
        Ok(PartialCyclicWord { cells })
    }

    /// Parses a word written one character per cell, `_` for Blank.
    pub fn parse_compact(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let cells = text
            .chars()
            .enumerate()
            .map(|(i, c)| {
                let token = c.to_string();
                if token == BLANK {
                    Ok(None)
                } else {
                    alphabet
                        .lookup(&token)
                        .map(Some)
                        .ok_or_else(|| Error::parse(1, i + 1, format!("unknown symbol {token:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        PartialCyclicWord::new(cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cyclic access: `cell(i) = cells[i mod len]`.
    pub fn cell(&self, i: i64) -> Cell {
        self.cells[modulo(i, self.cells.len())]
    }

    pub fn is_filled(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn blank_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// The word `w'` with `w'(x) = w(x + k)`.
    pub fn rotated(&self, k: i64) -> Self {
        let n = self.cells.len();
        let shift = modulo(k, n);
        let mut cells = Vec::with_capacity(n);
        cells.extend_from_slice(&self.cells[shift..]);
        cells.extend_from_slice(&self.cells[..shift]);
        PartialCyclicWord { cells }
    }

    /// The word repeated up to length `len` (which must be a multiple of the current length).
    pub fn repeated_to(&self, len: usize) -> Self {
        debug_assert_eq!(len % self.cells.len(), 0);
        PartialCyclicWord {
            cells: (0..len).map(|i| self.cells[i % self.cells.len()]).collect(),
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        PartialCyclicWord {
            cells: (start..start + len).map(|i| self.cell(i as i64)).collect(),
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let sep = if alphabet.is_compact() { "" } else { " " };
        self.cells
            .iter()
            .map(|&c| alphabet.render_cell(c))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    pub period: usize,
    pub word: PartialCyclicWord,
}

impl Level {
    pub fn new(period: usize, word: PartialCyclicWord) -> Self {
        Level { period, word }
    }
}

/// Unvalidated tower data, as produced by parsers and generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTower {
    pub alphabet: Alphabet,
    pub levels: Vec<Level>,
    pub declared_scale: Option<SupernaturalNumber>,
}

/// A validated skeleton tower. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkeletonTower {
    alphabet: Alphabet,
    levels: Vec<Level>,
    declared_scale: Option<SupernaturalNumber>,
}

impl SkeletonTower {
    pub fn new(
        alphabet: Alphabet,
        levels: Vec<Level>,
        declared_scale: Option<SupernaturalNumber>,
    ) -> Result<Self> {
        validate_tower(RawTower {
            alphabet,
            levels,
            declared_scale,
        })
    }

    /// Builds a tower from compact words (`"0_1_0"`), periods taken from word lengths.
    pub fn from_compact(alphabet: &Alphabet, words: &[&str]) -> Result<Self> {
        let levels = words
            .iter()
            .map(|w| {
                let word = PartialCyclicWord::parse_compact(alphabet, w)?;
                Ok(Level::new(word.len(), word))
            })
            .collect::<Result<Vec<_>>>()?;
        SkeletonTower::new(alphabet.clone(), levels, None)
    }

    pub fn with_scale(self, scale: Option<SupernaturalNumber>) -> Result<Self> {
        SkeletonTower::new(self.alphabet, self.levels, scale)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn periods(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.period).collect()
    }

    pub fn declared_scale(&self) -> Option<&SupernaturalNumber> {
        self.declared_scale.as_ref()
    }

    pub fn deepest(&self) -> &Level {
        self.levels.last().expect("validated towers are non-empty")
    }

    pub fn deepest_period(&self) -> usize {
        self.deepest().period
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The tower cut down to its first `levels` levels.
    pub fn truncated(&self, levels: usize) -> SkeletonTower {
        assert!(levels >= 1 && levels <= self.levels.len());
        SkeletonTower {
            alphabet: self.alphabet.clone(),
            levels: self.levels[..levels].to_vec(),
            declared_scale: self.declared_scale.clone(),
        }
    }

    /// Cell `i` of the deepest word: the most refined knowledge about position `i`.
    pub fn symbol_at(&self, i: i64) -> Cell {
        self.deepest().word.cell(i)
    }

    /// `σ^k` applied to the presentation: each level word becomes `w'(x) = w(x + k)`.
    pub fn rotate(&self, k: i64) -> SkeletonTower {
        SkeletonTower {
            alphabet: self.alphabet.clone(),
            levels: self
                .levels
                .iter()
                .map(|l| Level::new(l.period, l.word.rotated(k)))
                .collect(),
            declared_scale: self.declared_scale.clone(),
        }
    }

    pub fn into_raw(self) -> RawTower {
        RawTower {
            alphabet: self.alphabet,
            levels: self.levels,
            declared_scale: self.declared_scale,
        }
    }
}

impl fmt::Display for SkeletonTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", level.period, level.word.render(&self.alphabet))?;
        }
        Ok(())
    }
}

pub fn rotate_tower(t: &SkeletonTower, k: i64) -> SkeletonTower {
    t.rotate(k)
}

pub fn symbol_at(t: &SkeletonTower, i: i64) -> Cell {
    t.symbol_at(i)
}

/// Checks every structural invariant of a tower.
pub fn validate_tower(raw: RawTower) -> Result<SkeletonTower> {
    let RawTower {
        alphabet,
        levels,
        declared_scale,
    } = raw;
    if levels.is_empty() {
        return Err(Error::EmptyTower);
    }
    for (i, level) in levels.iter().enumerate() {
        if level.period == 0 || level.word.len() != level.period {
            return Err(Error::WordLength {
                level: i,
                period: level.period,
                len: level.word.len(),
            });
        }
        if let Some(bad) = level
            .word
            .cells()
            .iter()
            .flatten()
            .find(|s| s.index() >= alphabet.len())
        {
            return Err(Error::Alphabet(format!(
                "level {i} uses symbol index {} outside the alphabet",
                bad.index()
            )));
        }
    }
    for (i, pair) in levels.windows(2).enumerate() {
        let (lo, hi) = (&pair[0], &pair[1]);
        if hi.period <= lo.period || hi.period % lo.period != 0 {
            return Err(Error::Divisibility {
                level: i,
                lower: lo.period,
                upper: hi.period,
            });
        }
        if let Some(index) = (0..hi.period).find(|&x| match lo.word.cell(x as i64) {
            Some(s) => hi.word.cell(x as i64) != Some(s),
            None => false,
        }) {
            return Err(Error::Consistency {
                lower: i,
                upper: i + 1,
                index,
            });
        }
        // A hole of the shallower skeleton stays a hole: its class may not be
        // uniformly filled one level down.
        let copies = hi.period / lo.period;
        for x in 0..lo.period {
            if lo.word.cell(x as i64).is_some() {
                continue;
            }
            let first = hi.word.cell(x as i64);
            if first.is_some()
                && (1..copies).all(|c| hi.word.cell((x + c * lo.period) as i64) == first)
            {
                return Err(Error::HolePersistence {
                    lower: i,
                    upper: i + 1,
                    index: x,
                });
            }
        }
    }
    if let Some(scale) = &declared_scale {
        if let Some(level) = levels.iter().find(|l| !scale.is_factor(l.period as u64)) {
            return Err(Error::Scale {
                period: level.period,
                scale: scale.to_string(),
            });
        }
    }
    Ok(SkeletonTower {
        alphabet,
        levels,
        declared_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    #[test]
    fn alphabet_rules() {
        assert!(Alphabet::new(["a"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "_"]).is_err());
        assert!(Alphabet::new(["a", "b c"]).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
        let a = Alphabet::new(["x", "yy"]).unwrap();
        assert_eq!(a.lookup("yy"), Some(Symbol(1)));
        assert!(!a.is_compact());
    }

    #[test]
    fn printed_lines_validate() {
        let a = bin();
        SkeletonTower::from_compact(&a, &["0___0"]).unwrap();
        SkeletonTower::from_compact(&a, &["0___0", "0_1_00___0"]).unwrap();
    }

    #[test]
    fn overwritten_cell_is_inconsistent() {
        let err = SkeletonTower::from_compact(&bin(), &["0___0", "1_1_00___0"]).unwrap_err();
        assert_eq!(
            err,
            Error::Consistency {
                lower: 0,
                upper: 1,
                index: 0
            }
        );
    }

    #[test]
    fn erased_cell_is_inconsistent() {
        let err = SkeletonTower::from_compact(&bin(), &["0___0", "__1_00___0"]).unwrap_err();
        assert!(matches!(err, Error::Consistency { index: 0, .. }));
    }

    #[test]
    fn broken_chain() {
        let err = SkeletonTower::from_compact(&bin(), &["0___0", "0__1_0_"]).unwrap_err();
        assert!(matches!(err, Error::Divisibility { .. }));
        let err = SkeletonTower::from_compact(&bin(), &["0_", "0_"]).unwrap_err();
        assert!(matches!(err, Error::Divisibility { .. }));
    }

    #[test]
    fn uniformly_filled_hole_rejected() {
        let err = SkeletonTower::from_compact(&bin(), &["0_", "0101"]).unwrap_err();
        assert_eq!(
            err,
            Error::HolePersistence {
                lower: 0,
                upper: 1,
                index: 1
            }
        );
        SkeletonTower::from_compact(&bin(), &["0_", "0100"]).unwrap();
        SkeletonTower::from_compact(&bin(), &["0_", "0_01"]).unwrap();
    }

    #[test]
    fn scale_must_cover_periods() {
        let t = SkeletonTower::from_compact(&bin(), &["0___0", "0_1_00___0"]).unwrap();
        let ok: SupernaturalNumber = "2^inf * 5".parse().unwrap();
        t.clone().with_scale(Some(ok)).unwrap();
        let bad: SupernaturalNumber = "3^inf".parse().unwrap();
        assert!(matches!(
            t.with_scale(Some(bad)),
            Err(Error::Scale { period: 5, .. })
        ));
    }

    #[test]
    fn rotation_examples() {
        let t = SkeletonTower::from_compact(&bin(), &["0___0"]).unwrap();
        assert_eq!(t.rotate(5), t);
        let r = t.rotate(1);
        assert_eq!(r.deepest().word.render(t.alphabet()), "___00");
        assert_eq!(r.rotate(-1), t);
    }

    #[test]
    fn symbol_access_is_cyclic() {
        let a = bin();
        let t = SkeletonTower::from_compact(&a, &["0___0", "0_1_00___0"]).unwrap();
        assert_eq!(t.symbol_at(2), a.lookup("1"));
        assert_eq!(t.symbol_at(12), a.lookup("1"));
        assert_eq!(t.symbol_at(-8), a.lookup("1"));
        assert_eq!(t.symbol_at(-1), a.lookup("0"));
        let d3 = SkeletonTower::from_compact(
            &a,
            &[
                "0___0",
                "0_1_00___0",
                "001000___00111001010",
                "001000_1_00111001010001000___00111001010",
            ],
        )
        .unwrap();
        assert_eq!(d3.symbol_at(27), None);
    }
}
