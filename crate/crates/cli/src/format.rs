//! The line-oriented tower file format.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet = 0 1
//! scale = 2^inf * 5
//! period 5 = 0 _ _ _ 0
//! period 10 = 0 _ 1 _ 0 0 _ _ _ 0
//! ```

use toeplitz_core::{Alphabet, Error, Level, PartialCyclicWord, Result, SkeletonTower, SupernaturalNumber, BLANK};

/// A parsed tower together with the comment lines that preceded the first directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerFile {
    pub comments: Vec<String>,
    pub tower: SkeletonTower,
}

impl TowerFile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push('#');
            if !c.is_empty() {
                out.push(' ');
                out.push_str(c);
            }
            out.push('\n');
        }
        out.push_str(&serialize_tower(&self.tower));
        out
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Splits `lhs = rhs`; the column of `rhs` is returned alongside it.
fn split_assignment(line: &str, line_no: usize) -> Result<(&str, usize, &str)> {
    let eq = line
        .find('=')
        .ok_or_else(|| parse_error(line_no, 1 + line.len() - line.trim_start().len(), "expected `=`"))?;
    Ok((&line[..eq], line[..eq + 1].chars().count() + 1, &line[eq + 1..]))
}

pub fn parse_tower_file(text: &str) -> Result<SkeletonTower> {
    parse_tower_document(text).map(|f| f.tower)
}

pub fn parse_tower_document(text: &str) -> Result<TowerFile> {
    let mut comments = Vec::new();
    let mut in_header = true;
    let mut alphabet: Option<Alphabet> = None;
    let mut scale: Option<SupernaturalNumber> = None;
    let mut levels: Vec<Level> = Vec::new();
    let mut last_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        last_line = line_no;
        let (line, comment) = match raw.find('#') {
            Some(i) => (&raw[..i], Some(&raw[i + 1..])),
            None => (raw, None),
        };
        if line.trim().is_empty() {
            if let (true, Some(c)) = (in_header, comment) {
                comments.push(c.strip_prefix(' ').unwrap_or(c).trim_end().to_string());
            }
            continue;
        }
        in_header = false;
        let (lhs, rhs_col, rhs) = split_assignment(line, line_no)?;
        let head = tokens(lhs);
        let rhs_tokens: Vec<(usize, &str)> = tokens(rhs).into_iter().map(|(c, t)| (c + rhs_col - 1, t)).collect();
        let Some(&(key_col, key)) = head.first() else {
            return Err(parse_error(line_no, 1, "missing keyword before `=`"));
        };
        match key {
            "alphabet" => {
                if head.len() != 1 {
                    return Err(parse_error(line_no, head[1].0, "unexpected token after `alphabet`"));
                }
                if alphabet.is_some() {
                    return Err(parse_error(line_no, key_col, "duplicate alphabet line"));
                }
                if rhs_tokens.len() < 2 {
                    return Err(parse_error(line_no, rhs_col, "alphabet needs at least two symbols"));
                }
                let names = rhs_tokens.iter().map(|&(_, t)| t);
                alphabet = Some(Alphabet::new(names).map_err(|e| parse_error(line_no, rhs_col, e.to_string()))?);
            }
            "scale" => {
                if head.len() != 1 {
                    return Err(parse_error(line_no, head[1].0, "unexpected token after `scale`"));
                }
                if scale.is_some() {
                    return Err(parse_error(line_no, key_col, "duplicate scale line"));
                }
                if !levels.is_empty() {
                    return Err(parse_error(line_no, key_col, "scale must precede the period lines"));
                }
                scale = Some(rhs.parse::<SupernaturalNumber>().map_err(|e| match e {
                    Error::Parse { column, message, .. } => parse_error(line_no, rhs_col + column - 1, message),
                    other => parse_error(line_no, rhs_col, other.to_string()),
                })?);
            }
            "period" => {
                let Some(alphabet) = &alphabet else {
                    return Err(parse_error(line_no, key_col, "period line before the alphabet line"));
                };
                let &[_, (n_col, n_text)] = head.as_slice() else {
                    return Err(parse_error(line_no, key_col, "expected `period N = ...`"));
                };
                let period: usize = n_text
                    .parse()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| parse_error(line_no, n_col, format!("bad period {n_text:?}")))?;
                if let Some(prev) = levels.last() {
                    if period <= prev.period {
                        return Err(parse_error(line_no, n_col, "periods must increase"));
                    }
                }
                if rhs_tokens.len() != period {
                    return Err(parse_error(
                        line_no,
                        rhs_col,
                        format!("period {period} needs {period} cells, found {}", rhs_tokens.len()),
                    ));
                }
                let cells = rhs_tokens
                    .iter()
                    .map(|&(col, t)| {
                        if t == BLANK {
                            Ok(None)
                        } else {
                            alphabet
                                .lookup(t)
                                .map(Some)
                                .ok_or_else(|| parse_error(line_no, col, format!("unknown symbol {t:?}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                levels.push(Level::new(period, PartialCyclicWord::new(cells)?));
            }
            other => return Err(parse_error(line_no, key_col, format!("unknown directive {other:?}"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| parse_error(last_line.max(1), 1, "missing alphabet line"))?;
    if levels.is_empty() {
        return Err(parse_error(last_line.max(1), 1, "no period lines"));
    }
    let tower = SkeletonTower::new(alphabet, levels, scale)?;
    Ok(TowerFile { comments, tower })
}

/// Canonical text: alphabet, optional scale, then one line per level.
pub fn serialize_tower(t: &SkeletonTower) -> String {
    let alphabet = t.alphabet();
    let mut out = format!("alphabet = {}\n", alphabet.names().join(" "));
    if let Some(scale) = t.declared_scale() {
        out.push_str(&format!("scale = {scale}\n"));
    }
    for level in t.levels() {
        let cells: Vec<&str> = level.word.cells().iter().map(|&c| alphabet.render_cell(c)).collect();
        out.push_str(&format!("period {} = {}\n", level.period, cells.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GEN1: &str = "# the first two stages\nalphabet = 0 1\nscale = 2^inf * 5\nperiod 5 = 0 _ _ _ 0\nperiod 10 = 0 _ 1 _ 0 0 _ _ _ 0\n";

    #[test]
    fn round_trip_keeps_header_comments() {
        let file = parse_tower_document(GEN1).unwrap();
        assert_eq!(file.comments, vec!["the first two stages".to_string()]);
        assert_eq!(file.tower.periods(), vec![5, 10]);
        assert_eq!(file.to_text(), GEN1);
        assert_eq!(parse_tower_file(&serialize_tower(&file.tower)).unwrap(), file.tower);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_tower_file("alphabet = 0 1\nperiod 10 = 0 _ 1 _ 0 0 _ _ _ 0\nperiod 5 = 0 _ _ _ 0\n").unwrap_err();
        assert_eq!(err, parse_error(3, 8, "periods must increase"));
        let err = parse_tower_file("alphabet = 0 1\nperiod 2 = 0 x\n").unwrap_err();
        assert_eq!(err, parse_error(2, 14, "unknown symbol \"x\""));
        let err = parse_tower_file("period 2 = 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
        let err = parse_tower_file("alphabet = 0 1\nscale = 2 * 4\nperiod 2 = 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 13, .. }), "{err:?}");
        assert!(matches!(parse_tower_file("alphabet = 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_tower_file("alphabet = 0 1\nperiod 2 = 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn validation_errors_pass_through() {
        // 3 does not divide 4.
        let err = parse_tower_file("alphabet = 0 1\nperiod 3 = 0 _ 1\nperiod 4 = 0 _ 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Divisibility { .. }));
    }

    #[test]
    fn named_symbols() {
        let t = parse_tower_file("alphabet = a bb\nperiod 2 = bb _\n").unwrap();
        assert_eq!(serialize_tower(&t), "alphabet = a bb\nperiod 2 = bb _\n");
    }
}
