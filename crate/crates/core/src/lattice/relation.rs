//! Binary relations between two families of classes, and the rough-set
//! approximations they induce.

use std::fmt;

use crate::error::LatticeError;

use super::Subset;

/// Largest side supported by the bitset encoding.
pub const MAX_SIDE: usize = 64;

/// `cells[i][j]` is true when row class `A_{i+1}` relates to column class
/// `a_{j+1}`. Stored as one bitmask per row and per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
}

impl Relation {
    /// Builds a relation from a dense boolean matrix. Rejects empty rows
    /// and columns.
    pub fn from_cells(cells: &[Vec<bool>]) -> Result<Self, LatticeError> {
        let n_rows = cells.len();
        let n_cols = cells.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(LatticeError::Parse {
                line: 0,
                message: "relation is empty".into(),
            });
        }
        if n_rows > MAX_SIDE || n_cols > MAX_SIDE {
            return Err(LatticeError::Parse {
                line: 0,
                message: format!("relation is {n_rows}x{n_cols}; at most {MAX_SIDE} per side"),
            });
        }
        let mut rows = vec![0u64; n_rows];
        let mut cols = vec![0u64; n_cols];
        for (i, row) in cells.iter().enumerate() {
            if row.len() != n_cols {
                return Err(LatticeError::Parse {
                    line: i + 1,
                    message: format!("row has {} cells, expected {n_cols}", row.len()),
                });
            }
            for (j, &cell) in row.iter().enumerate() {
                if cell {
                    rows[i] |= 1 << j;
                    cols[j] |= 1 << i;
                }
            }
        }
        if let Some(i) = rows.iter().position(|&r| r == 0) {
            return Err(LatticeError::EmptyLine {
                kind: "row",
                index: i + 1,
            });
        }
        if let Some(j) = cols.iter().position(|&c| c == 0) {
            return Err(LatticeError::EmptyLine {
                kind: "column",
                index: j + 1,
            });
        }
        Ok(Relation {
            n_rows,
            n_cols,
            rows,
            cols,
        })
    }

    /// Parses `0`/`1` rows, one per line. Spaces are ignored and `#` starts
    /// a comment.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut cells = Vec::new();
        let mut width = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut row = Vec::new();
            for ch in line.chars() {
                match ch {
                    '0' => row.push(false),
                    '1' => row.push(true),
                    c if c.is_whitespace() => {}
                    c => {
                        return Err(LatticeError::Parse {
                            line: lineno + 1,
                            message: format!("unexpected character {c:?}"),
                        })
                    }
                }
            }
            if row.is_empty() {
                continue;
            }
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(LatticeError::Parse {
                        line: lineno + 1,
                        message: format!("row has {} cells, expected {w}", row.len()),
                    })
                }
                _ => {}
            }
            cells.push(row);
        }
        Relation::from_cells(&cells)
    }

    /// Diagonal relation on `n` classes.
    pub fn diagonal(n: usize) -> Result<Self, LatticeError> {
        let cells: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        Relation::from_cells(&cells)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn all_rows(&self) -> Subset {
        Subset::full(self.n_rows)
    }

    pub fn all_cols(&self) -> Subset {
        Subset::full(self.n_cols)
    }

    /// Columns related to at least one row of `x`.
    pub fn upper_approx(&self, x: Subset) -> Subset {
        Subset(x.iter().fold(0, |acc, i| acc | self.rows[i]))
    }

    /// Rows whose related columns all lie inside `y`.
    pub fn lower_approx(&self, y: Subset) -> Subset {
        let bits = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, &r)| r & !y.0 == 0)
            .fold(0, |acc, (i, _)| acc | 1 << i);
        Subset(bits)
    }

    /// Lower approximation of the upper approximation.
    pub fn closure(&self, x: Subset) -> Subset {
        self.lower_approx(self.upper_approx(x))
    }

    /// Rows related to at least one column of `y` (the converse image).
    pub fn converse_image(&self, y: Subset) -> Subset {
        Subset(y.iter().fold(0, |acc, j| acc | self.cols[j]))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_rows {
            let line: Vec<&str> = (0..self.n_cols)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Relation made of diagonal blocks along the main diagonal.
///
/// Consecutive blocks share one index when that index (one-based) is listed
/// in `overlap`; it must then be the last index of the earlier block. With
/// `fill_off_blocks`, row `i` additionally relates to every column that lies
/// in no block containing `i`.
pub fn build_block_relation(
    block_sizes: &[usize],
    overlap: &[usize],
    fill_off_blocks: bool,
) -> Result<Relation, LatticeError> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(LatticeError::Generator(
            "block sizes must be positive".into(),
        ));
    }
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    let mut used_overlaps = 0;
    for (b, &size) in block_sizes.iter().enumerate() {
        let start = match blocks.last() {
            Some(&(_, prev_end)) if overlap.contains(&prev_end) => {
                if size < 2 {
                    return Err(LatticeError::Generator(format!(
                        "block {} shares index {prev_end} but has size {size}",
                        b + 1
                    )));
                }
                used_overlaps += 1;
                prev_end - 1
            }
            _ => next,
        };
        let end = start + size;
        blocks.push((start, end));
        next = end;
    }
    if used_overlaps != overlap.len() {
        return Err(LatticeError::Generator(format!(
            "overlap indices {overlap:?} must each be the last index of a block followed by another block"
        )));
    }
    let n = next;
    if n > MAX_SIDE {
        return Err(LatticeError::Generator(format!(
            "layout needs {n} classes; at most {MAX_SIDE}"
        )));
    }
    let member_of = |i: usize| -> Vec<usize> {
        blocks
            .iter()
            .enumerate()
            .filter(|(_, &(s, e))| s <= i && i < e)
            .map(|(b, _)| b)
            .collect()
    };
    let mut cells = vec![vec![false; n]; n];
    for (i, row) in cells.iter_mut().enumerate() {
        row[i] = true;
        if fill_off_blocks {
            let mine = member_of(i);
            for (j, cell) in row.iter_mut().enumerate() {
                if member_of(j).iter().all(|b| !mine.contains(b)) {
                    *cell = true;
                }
            }
        }
    }
    Relation::from_cells(&cells)
}

/// Parses a generator spec such as `blocks=3,3,2;overlap=3;fill`.
///
/// Returns `None` when `spec` does not start with `blocks=`, so callers can
/// treat it as a file path instead.
pub fn parse_generator_spec(spec: &str) -> Option<Result<Relation, LatticeError>> {
    let spec = spec.trim();
    if !spec.starts_with("blocks=") {
        return None;
    }
    let list = |v: &str| -> Result<Vec<usize>, LatticeError> {
        v.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim().parse().map_err(|_| {
                    LatticeError::Generator(format!("`{t}` is not a non-negative integer"))
                })
            })
            .collect()
    };
    let parsed = (|| {
        let mut sizes = None;
        let mut overlap = Vec::new();
        let mut fill = false;
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some(("blocks", v)) => sizes = Some(list(v)?),
                Some(("overlap", v)) => overlap = list(v)?,
                None if part == "fill" => fill = true,
                _ => {
                    return Err(LatticeError::Generator(format!(
                        "unrecognised generator term `{part}`"
                    )))
                }
            }
        }
        build_block_relation(&sizes.unwrap_or_default(), &overlap, fill)
    })();
    Some(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(idx: &[usize]) -> Subset {
        Subset::from_indices(idx.iter().map(|i| i - 1))
    }

    #[test]
    fn parse_with_comments_and_spaces() {
        let r = Relation::parse("# diag\n1 0 0\n0 1 0  # second\n\n001\n").unwrap();
        assert_eq!((r.n_rows(), r.n_cols()), (3, 3));
        assert_eq!(r, Relation::diagonal(3).unwrap());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            Relation::parse("1 0\n1"),
            Err(LatticeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Relation::parse("1 x"),
            Err(LatticeError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Relation::parse("1 0\n0 0"),
            Err(LatticeError::EmptyLine {
                kind: "row",
                index: 2
            })
        ));
        assert!(matches!(
            Relation::parse("1 0\n1 0"),
            Err(LatticeError::EmptyLine {
                kind: "column",
                index: 2
            })
        ));
        assert!(Relation::parse("# nothing\n").is_err());
    }

    #[test]
    fn approximations_on_diagonal() {
        let r = Relation::diagonal(3).unwrap();
        assert_eq!(r.upper_approx(Subset::EMPTY), Subset::EMPTY);
        assert_eq!(r.upper_approx(s(&[2])), s(&[2]));
        assert_eq!(r.lower_approx(r.all_cols()), r.all_rows());
        assert_eq!(r.lower_approx(Subset::EMPTY), Subset::EMPTY);
    }

    fn fig4() -> Relation {
        build_block_relation(&[3, 3, 2], &[3], true).unwrap()
    }

    #[test]
    fn worked_example_approximations() {
        let r = fig4();
        assert_eq!(r.n_rows(), 7);
        assert_eq!(r.upper_approx(s(&[1])), s(&[1, 4, 5, 6, 7]));
        assert_eq!(r.lower_approx(s(&[1, 4, 5, 6, 7])), s(&[1]));
        assert_eq!(r.upper_approx(s(&[3])), s(&[3, 6, 7]));
        assert_eq!(r.closure(s(&[3])), s(&[3]));
        assert_eq!(r.upper_approx(s(&[1, 2])), s(&[1, 2, 4, 5, 6, 7]));
        assert_eq!(r.closure(s(&[1, 2])), s(&[1, 2, 4, 5]));
        assert_eq!(r.closure(s(&[4, 5])), s(&[1, 2, 4, 5]));
        assert_eq!(r.closure(s(&[1, 2, 4, 5])), s(&[1, 2, 4, 5]));
        assert_eq!(r.closure(s(&[6])), s(&[6]));
        assert_eq!(r.closure(s(&[7])), s(&[7]));
        assert_eq!(r.upper_approx(s(&[1, 6])), r.all_cols());
        assert_eq!(r.closure(s(&[1, 6])), r.all_rows());
        assert_eq!(r.closure(r.all_rows()), r.all_rows());
        assert_eq!(r.closure(Subset::EMPTY), Subset::EMPTY);
    }

    #[test]
    fn two_block_relation_layout() {
        let r = build_block_relation(&[4, 4], &[], true).unwrap();
        assert_eq!(r.n_rows(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let same_block = (i < 4) == (j < 4);
                assert_eq!(r.get(i, j), i == j || !same_block, "cell ({i},{j})");
            }
        }
        assert_eq!(r.closure(s(&[1, 8])), r.all_rows());
    }

    #[test]
    fn unfilled_single_block_is_diagonal() {
        assert_eq!(
            build_block_relation(&[3], &[], false).unwrap(),
            Relation::diagonal(3).unwrap()
        );
    }

    #[test]
    fn generator_spec() {
        assert_eq!(parse_generator_spec("relation.txt"), None);
        assert_eq!(
            parse_generator_spec("blocks=3,3,2;overlap=3;fill")
                .unwrap()
                .unwrap(),
            fig4()
        );
        assert_eq!(
            parse_generator_spec("blocks=3").unwrap().unwrap(),
            Relation::diagonal(3).unwrap()
        );
        assert!(parse_generator_spec("blocks=3;bogus").unwrap().is_err());
        assert!(parse_generator_spec("blocks=x").unwrap().is_err());
    }

    #[test]
    fn generator_rejects_bad_overlaps() {
        assert!(build_block_relation(&[3, 3], &[2], true).is_err());
        assert!(build_block_relation(&[3, 3], &[6], true).is_err());
        assert!(build_block_relation(&[3, 3], &[9], true).is_err());
        assert!(build_block_relation(&[], &[], true).is_err());
        assert!(build_block_relation(&[3, 0], &[], true).is_err());
    }
}
