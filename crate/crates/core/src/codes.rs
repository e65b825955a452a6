//! Sliding block codes and positionwise block permutations acting on towers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::skeleton::{class_status, ResidueStatus};
use crate::tower::{modulo, Alphabet, Cell, Level, PartialCyclicWord, SkeletonTower, Symbol};

/// A local rule `C: Σ^(2m+1) → Σ` of radius `m`, stored as a total table.
///
/// Windows are indexed in base `|Σ|`, leftmost cell most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockCode {
    alphabet: Alphabet,
    radius: usize,
    table: Vec<Symbol>,
}

impl BlockCode {
    pub fn new(alphabet: Alphabet, radius: usize, table: Vec<Symbol>) -> Result<Self> {
        let size = table_size(alphabet.len(), radius)?;
        if table.len() != size {
            return Err(Error::InvalidCode(format!(
                "table has {} entries, expected {size}",
                table.len()
            )));
        }
        if table.iter().any(|s| s.index() >= alphabet.len()) {
            return Err(Error::InvalidCode("table entry outside the alphabet".into()));
        }
        Ok(BlockCode {
            alphabet,
            radius,
            table,
        })
    }

    pub fn from_fn(alphabet: Alphabet, radius: usize, f: impl Fn(&[Symbol]) -> Symbol) -> Result<Self> {
        let size = table_size(alphabet.len(), radius)?;
        let width = 2 * radius + 1;
        let n = alphabet.len();
        let table = (0..size).map(|i| f(&decode_window(i, n, width))).collect();
        BlockCode::new(alphabet, radius, table)
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let table = alphabet.symbols().collect();
        BlockCode {
            alphabet,
            radius: 0,
            table,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn apply(&self, window: &[Symbol]) -> Symbol {
        debug_assert_eq!(window.len(), self.window_len());
        let n = self.alphabet.len();
        let index = window.iter().fold(0usize, |acc, s| acc * n + s.index());
        self.table[index]
    }

    /// Every window together with its image, in table order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<Symbol>, Symbol)> + '_ {
        let n = self.alphabet.len();
        let width = self.window_len();
        self.table
            .iter()
            .enumerate()
            .map(move |(i, &s)| (decode_window(i, n, width), s))
    }

    /// Parses the table format: `len = m`, then one `a b c -> d` line per window.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut radius = None;
        let mut table: Vec<Option<Symbol>> = Vec::new();
        let n = alphabet.len();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let column = line.len() - line.trim_start().len() + 1;
            let Some(m) = radius else {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::parse(line_no, column, "expected `len = m` header"))?;
                if key.trim() != "len" {
                    return Err(Error::parse(line_no, column, "expected `len = m` header"));
                }
                let m: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, column, "bad code length"))?;
                let size = table_size(n, m).map_err(|_| Error::parse(line_no, column, "code table too large"))?;
                table = vec![None; size];
                radius = Some(m);
                continue;
            };
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(line_no, column, "expected `window -> symbol`"))?;
            let lookup = |tok: &str| {
                alphabet
                    .lookup(tok)
                    .ok_or_else(|| Error::parse(line_no, column, format!("unknown symbol {tok:?}")))
            };
            let window = lhs.split_whitespace().map(lookup).collect::<Result<Vec<_>>>()?;
            if window.len() != 2 * m + 1 {
                return Err(Error::parse(
                    line_no,
                    column,
                    format!("window has {} symbols, expected {}", window.len(), 2 * m + 1),
                ));
            }
            let image: Vec<&str> = rhs.split_whitespace().collect();
            if image.len() != 1 {
                return Err(Error::parse(line_no, column, "expected exactly one image symbol"));
            }
            let image = lookup(image[0])?;
            let index = window.iter().fold(0usize, |acc, s| acc * n + s.index());
            if table[index].replace(image).is_some() {
                return Err(Error::parse(line_no, column, "window listed twice"));
            }
        }
        let m = radius.ok_or_else(|| Error::parse(1, 1, "missing `len = m` header"))?;
        let width = 2 * m + 1;
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    let names: Vec<&str> = decode_window(i, n, width)
                        .into_iter()
                        .map(|s| alphabet.name(s))
                        .collect();
                    Error::parse(0, 0, format!("missing window `{}`", names.join(" ")))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlockCode::new(alphabet.clone(), m, table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("len = {}\n", self.radius);
        for (window, image) in self.entries() {
            let names: Vec<&str> = window.iter().map(|&s| self.alphabet.name(s)).collect();
            let _ = writeln!(out, "{} -> {}", names.join(" "), self.alphabet.name(image));
        }
        out
    }
}

fn table_size(n: usize, radius: usize) -> Result<usize> {
    u32::try_from(2 * radius + 1)
        .ok()
        .and_then(|w| n.checked_pow(w))
        .filter(|&s| s <= 1 << 24)
        .ok_or_else(|| Error::InvalidCode("code table too large".into()))
}

fn decode_window(mut index: usize, n: usize, width: usize) -> Vec<Symbol> {
    let mut window = vec![Symbol(0); width];
    for slot in window.iter_mut().rev() {
        *slot = Symbol((index % n) as u16);
        index /= n;
    }
    window
}

/// A family of `p` alphabet permutations applied cell by cell according to position mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionwisePermutation {
    alphabet: Alphabet,
    perms: Vec<Vec<Symbol>>,
}

impl PositionwisePermutation {
    pub fn new(alphabet: Alphabet, perms: Vec<Vec<Symbol>>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::PeriodMismatch("block period must be positive".into()));
        }
        let n = alphabet.len();
        for (i, perm) in perms.iter().enumerate() {
            let mut seen = vec![false; n];
            if perm.len() != n
                || perm
                    .iter()
                    .any(|s| s.index() >= n || std::mem::replace(&mut seen[s.index()], true))
            {
                return Err(Error::InvalidCode(format!("entry {i} is not a bijection of the alphabet")));
            }
        }
        Ok(PositionwisePermutation { alphabet, perms })
    }

    pub fn identity(alphabet: Alphabet, period: usize) -> Self {
        let id: Vec<Symbol> = alphabet.symbols().collect();
        PositionwisePermutation {
            perms: vec![id; period],
            alphabet,
        }
    }

    pub fn period(&self) -> usize {
        self.perms.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn perms(&self) -> &[Vec<Symbol>] {
        &self.perms
    }

    pub fn apply(&self, position: i64, s: Symbol) -> Symbol {
        self.perms[modulo(position, self.perms.len())][s.index()]
    }

    pub fn inverse(&self) -> Self {
        let perms = self
            .perms
            .iter()
            .map(|perm| {
                let mut inv = vec![Symbol(0); perm.len()];
                for (i, s) in perm.iter().enumerate() {
                    inv[s.index()] = Symbol(i as u16);
                }
                inv
            })
            .collect();
        PositionwisePermutation {
            alphabet: self.alphabet.clone(),
            perms,
        }
    }

    /// Parses `;`-separated entries, each `id` or the comma-separated images of
    /// the alphabet in order, e.g. `1,0;id;id;id;1,0`.
    pub fn parse_spec(spec: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut column = 1;
        let mut perms = Vec::new();
        for entry in spec.split(';') {
            let col = column;
            column += entry.len() + 1;
            let entry = entry.trim();
            if entry == "id" {
                perms.push(alphabet.symbols().collect());
                continue;
            }
            let perm = entry
                .split(',')
                .map(|tok| {
                    alphabet
                        .lookup(tok.trim())
                        .ok_or_else(|| Error::parse(1, col, format!("unknown symbol {:?}", tok.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            perms.push(perm);
        }
        PositionwisePermutation::new(alphabet.clone(), perms)
    }

    pub fn to_spec(&self) -> String {
        let id: Vec<Symbol> = self.alphabet.symbols().collect();
        self.perms
            .iter()
            .map(|perm| {
                if *perm == id {
                    "id".to_string()
                } else {
                    perm.iter()
                        .map(|&s| self.alphabet.name(s))
                        .collect::<Vec<_>>()
                        .join(",")
                }
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Certified skeleton of `next` at a divisor `p` of its length: filled where
/// the whole class is filled with one symbol.
fn coarsen(next: &PartialCyclicWord, p: usize) -> PartialCyclicWord {
    let cells = (0..p)
        .map(|r| match class_status(next, p, r, false) {
            ResidueStatus::In(s) => Some(s),
            _ => None,
        })
        .collect();
    PartialCyclicWord::new(cells).expect("periods are positive")
}

/// Rebuilds the shallower levels marked `None` from the next deeper level.
fn rebuild(t: &SkeletonTower, mut words: Vec<Option<PartialCyclicWord>>) -> Vec<Level> {
    let periods = t.periods();
    for i in (0..words.len()).rev() {
        if words[i].is_none() {
            let next = words[i + 1].as_ref().expect("deepest level is always present");
            words[i] = Some(coarsen(next, periods[i]));
        }
    }
    periods
        .into_iter()
        .zip(words)
        .map(|(p, w)| Level::new(p, w.expect("filled above")))
        .collect()
}

/// Applies a block code to the deepest word and recomputes the shallower levels.
///
/// An output cell is filled only when its whole window is filled in the input.
/// The output presents a factor, so the declared scale is dropped.
pub fn apply_block_code(t: &SkeletonTower, c: &BlockCode) -> Result<SkeletonTower> {
    if t.alphabet() != c.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let word = &t.deepest().word;
    let m = c.radius() as i64;
    let mut window = Vec::with_capacity(c.window_len());
    let cells: Vec<Cell> = (0..t.deepest_period() as i64)
        .map(|k| {
            window.clear();
            for x in k - m..=k + m {
                window.push(word.cell(x)?);
            }
            Some(c.apply(&window))
        })
        .collect();
    let mut words = vec![None; t.depth()];
    words[t.depth() - 1] = Some(PartialCyclicWord::new(cells)?);
    SkeletonTower::new(t.alphabet().clone(), rebuild(t, words), None)
}

/// Applies `φ̂` blockwise: the cell at position `x` is mapped by `perms[x mod p]`.
pub fn apply_positionwise_permutation(
    t: &SkeletonTower,
    phi: &PositionwisePermutation,
) -> Result<SkeletonTower> {
    if t.alphabet() != phi.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let p = phi.period();
    if let Some(bad) = t.periods().into_iter().find(|&q| q >= p && q % p != 0) {
        return Err(Error::PeriodMismatch(format!(
            "block period {p} does not divide declared period {bad}"
        )));
    }
    if t.deepest_period() % p != 0 {
        return Err(Error::PeriodMismatch(format!(
            "block period {p} does not divide the deepest period {}",
            t.deepest_period()
        )));
    }
    let words = t
        .levels()
        .iter()
        .map(|l| {
            (l.period >= p).then(|| {
                let cells = l
                    .word
                    .cells()
                    .iter()
                    .enumerate()
                    .map(|(x, c)| c.map(|s| phi.apply(x as i64, s)))
                    .collect();
                PartialCyclicWord::new(cells).expect("same length as the input")
            })
        })
        .collect();
    SkeletonTower::new(
        t.alphabet().clone(),
        rebuild(t, words),
        t.declared_scale().cloned(),
    )
}
