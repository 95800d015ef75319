//! Grid diagrams on the torus and their planar cut.
//!
//! A diagram of index `n` is stored column-major: `x_rows[c]` is the row of
//! the X marking in column `c`, `o_rows[c]` the row of the O marking. Rows
//! increase upward and all arithmetic is cyclic mod `n`. The planar picture
//! is the cut along the circles through the origin; [`recut`] produces every
//! other cut.

use std::fmt;

use crate::error::{Error, Result};

/// Labels `X_1..X_n`, `O_1..O_n` of the markings, stored per column.
///
/// `X_i` and `O_i` share a row, `O_i` and `X_{i+1}` share a column (labels
/// mod `n`). Label 1 is given to the X in column 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkingNumbering {
    pub x_index: Vec<usize>,
    pub o_index: Vec<usize>,
}

impl MarkingNumbering {
    /// Column holding `O_label`.
    pub fn o_column(&self, label: usize) -> usize {
        self.o_index
            .iter()
            .position(|&l| l == label)
            .expect("labels cover 1..=n")
    }

    /// Column holding `X_label`.
    pub fn x_column(&self, label: usize) -> usize {
        self.x_index
            .iter()
            .position(|&l| l == label)
            .expect("labels cover 1..=n")
    }
}

/// A validated knot grid diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridDiagram {
    n: usize,
    x_rows: Vec<usize>,
    o_rows: Vec<usize>,
    numbering: MarkingNumbering,
}

impl GridDiagram {
    /// Builds a diagram from the X and O column-to-row permutations.
    pub fn new(x_rows: Vec<usize>, o_rows: Vec<usize>) -> Result<Self> {
        let n = x_rows.len();
        if n < 2 {
            return Err(Error::IndexTooSmall { n });
        }
        if o_rows.len() != n {
            return Err(Error::NonSquare {
                line: 0,
                len: o_rows.len(),
                expected: n,
            });
        }
        for (marking, rows) in [('X', &x_rows), ('O', &o_rows)] {
            let mut per_row = vec![0usize; n];
            for &r in rows.iter() {
                if r >= n {
                    return Err(Error::NotPermutation {
                        axis: "row",
                        index: r,
                        marking,
                        count: 0,
                    });
                }
                per_row[r] += 1;
            }
            if let Some((index, &count)) = per_row.iter().enumerate().find(|(_, &c)| c != 1) {
                return Err(Error::NotPermutation {
                    axis: "row",
                    index,
                    marking,
                    count,
                });
            }
        }
        if let Some(column) = (0..n).find(|&c| x_rows[c] == o_rows[c]) {
            return Err(Error::SharedCell {
                column,
                row: x_rows[column],
            });
        }
        let components = count_components(&x_rows, &o_rows);
        if components != 1 {
            return Err(Error::MultiComponent { components });
        }
        let numbering = derive_numbering_raw(&x_rows, &o_rows);
        Ok(Self {
            n,
            x_rows,
            o_rows,
            numbering,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_rows(&self) -> &[usize] {
        &self.x_rows
    }

    pub fn o_rows(&self) -> &[usize] {
        &self.o_rows
    }

    pub fn numbering(&self) -> &MarkingNumbering {
        &self.numbering
    }

    /// 0-based U-variable index of the O marking in column `c`.
    #[inline]
    pub fn o_slot(&self, c: usize) -> usize {
        self.numbering.o_index[c] - 1
    }

    /// Serializes to the grid text format: rows top to bottom, one line each.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for r in (0..self.n).rev() {
            for c in 0..self.n {
                out.push(if self.x_rows[c] == r {
                    'X'
                } else if self.o_rows[c] == r {
                    'O'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::str::FromStr for GridDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}

/// Parses the text format: `n` lines of `n` characters over `{'.', 'X', 'O'}`,
/// the first line being the top row.
pub fn parse_grid(text: &str) -> Result<GridDiagram> {
    let lines: Vec<&str> = text.lines().collect();
    let n = lines.len();
    let mut x_rows = vec![None; n];
    let mut o_rows = vec![None; n];
    let mut x_per_row = vec![0usize; n];
    let mut o_per_row = vec![0usize; n];

    for (k, line) in lines.iter().enumerate() {
        let cells: Vec<char> = line.chars().collect();
        if cells.len() != n {
            return Err(Error::NonSquare {
                line: k + 1,
                len: cells.len(),
                expected: n,
            });
        }
        let row = n - 1 - k;
        for (c, ch) in cells.into_iter().enumerate() {
            let (slots, per_row, marking) = match ch {
                '.' => continue,
                'X' => (&mut x_rows, &mut x_per_row, 'X'),
                'O' => (&mut o_rows, &mut o_per_row, 'O'),
                _ => {
                    return Err(Error::BadCharacter {
                        line: k + 1,
                        column: c + 1,
                        ch,
                    })
                }
            };
            per_row[row] += 1;
            if slots[c].is_some() {
                return Err(Error::NotPermutation {
                    axis: "column",
                    index: c,
                    marking,
                    count: 2,
                });
            }
            slots[c] = Some(row);
        }
    }
    if n < 2 {
        return Err(Error::IndexTooSmall { n });
    }
    for (marking, per_row) in [('X', &x_per_row), ('O', &o_per_row)] {
        if let Some((index, &count)) = per_row.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(Error::NotPermutation {
                axis: "row",
                index,
                marking,
                count,
            });
        }
    }
    let unwrap_cols = |slots: Vec<Option<usize>>, marking: char| -> Result<Vec<usize>> {
        slots
            .into_iter()
            .enumerate()
            .map(|(c, r)| {
                r.ok_or(Error::NotPermutation {
                    axis: "column",
                    index: c,
                    marking,
                    count: 0,
                })
            })
            .collect()
    };
    GridDiagram::new(unwrap_cols(x_rows, 'X')?, unwrap_cols(o_rows, 'O')?)
}

/// Number of cycles of the column map "X in column c -> O in the same row ->
/// that O's column".
fn count_components(x_rows: &[usize], o_rows: &[usize]) -> usize {
    let n = x_rows.len();
    let mut o_col_of_row = vec![0; n];
    for (c, &r) in o_rows.iter().enumerate() {
        o_col_of_row[r] = c;
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            c = o_col_of_row[x_rows[c]];
        }
    }
    components
}

fn derive_numbering_raw(x_rows: &[usize], o_rows: &[usize]) -> MarkingNumbering {
    let n = x_rows.len();
    let mut o_col_of_row = vec![0; n];
    for (c, &r) in o_rows.iter().enumerate() {
        o_col_of_row[r] = c;
    }
    let mut x_index = vec![0; n];
    let mut o_index = vec![0; n];
    let mut col = 0;
    for label in 1..=n {
        x_index[col] = label;
        let o_col = o_col_of_row[x_rows[col]];
        o_index[o_col] = label;
        col = o_col;
    }
    MarkingNumbering { x_index, o_index }
}

/// The marking numbering with `X_1` in column 0.
pub fn derive_numbering(grid: &GridDiagram) -> MarkingNumbering {
    grid.numbering.clone()
}

/// Shifts rows and columns cyclically. Same knot, different planar cut.
pub fn recut(grid: &GridDiagram, row_shift: i64, col_shift: i64) -> GridDiagram {
    let n = grid.n;
    let rs = row_shift.rem_euclid(n as i64) as usize;
    let cs = col_shift.rem_euclid(n as i64) as usize;
    let mut x_rows = vec![0; n];
    let mut o_rows = vec![0; n];
    for c in 0..n {
        x_rows[(c + cs) % n] = (grid.x_rows[c] + rs) % n;
        o_rows[(c + cs) % n] = (grid.o_rows[c] + rs) % n;
    }
    GridDiagram::new(x_rows, o_rows).expect("cyclic shifts preserve validity")
}
