//! Text state files.
//!
//! ```text
//! # comment lines start with '#'
//! r d
//! re im re im …      (one line per matrix row, 2·d^r numbers)
//! ```

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::{total_dimension, Operator, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected {expected} matrix rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn syntax(line: usize, message: impl Into<String>) -> StateFileError {
    StateFileError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses a state file into an operator. State invariants are not checked here.
pub fn parse_state(text: &str) -> Result<Operator, StateFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "missing header `r d`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(syntax(
            header_line,
            format!(
                "header must be `r d` (one local dimension for all subsystems), got {} fields",
                fields.len()
            ),
        ));
    }
    let parse_dim = |s: &str, what: &str| {
        s.parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(|| {
            syntax(
                header_line,
                format!("{what} must be a positive integer, got '{s}'"),
            )
        })
    };
    let r = parse_dim(fields[0], "r")?;
    let d = parse_dim(fields[1], "d")?;
    let dim = total_dimension(r, d).map_err(|e| syntax(header_line, e.to_string()))?;

    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut row = 0;
    for (line_no, line) in lines {
        if row == dim {
            return Err(syntax(
                line_no,
                format!("unexpected data after {dim} matrix rows"),
            ));
        }
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != 2 * dim {
            return Err(syntax(
                line_no,
                format!(
                    "expected {} numbers (re im pairs), found {}",
                    2 * dim,
                    values.len()
                ),
            ));
        }
        for (col, pair) in values.chunks(2).enumerate() {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| syntax(line_no, format!("'{s}' is not a finite number")))
            };
            matrix[(row, col)] = Complex64::new(parse(pair[0])?, parse(pair[1])?);
        }
        row += 1;
    }
    if row != dim {
        return Err(StateFileError::MissingRows {
            expected: dim,
            found: row,
        });
    }
    Ok(Operator::new(r, d, matrix)?)
}

/// Writes an operator with 17 significant digits per number.
pub fn write_state(op: &Operator) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", op.r(), op.d()).unwrap();
    let m = op.matrix();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| {
                let z = m[(i, j)];
                [format!("{:.16e}", z.re), format!("{:.16e}", z.im)]
            })
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{make_state, StateKind};

    #[test]
    fn round_trip_is_exact() {
        let rho = make_state(&StateKind::RandomState { seed: 42 }, 2, 3).unwrap();
        let text = write_state(rho.operator());
        let back = parse_state(&text).unwrap();
        assert_eq!(&back, rho.operator());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# Bell\n\n2 2\n0.5 0 0 0 0 0 0.5 0\n# middle\n0 0 0 0 0 0 0 0\n0 0 0 0 0 0 0 0\n0.5 0 0 0 0 0 0.5 0\n";
        let op = parse_state(text).unwrap();
        assert_eq!(op.matrix()[(3, 0)], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(
            parse_state("2 2 3\n"),
            Err(StateFileError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_state("# c\n1 2\n1 0 0\n"),
            Err(StateFileError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_state("1 2\n1 0 0 0\n0 0 x 0\n"),
            Err(StateFileError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_state("1 2\n1 0 0 0\n"),
            Err(StateFileError::MissingRows {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_state("1 2\n1 0 0 0\n0 0 0 0\n0 0 0 0\n"),
            Err(StateFileError::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_state("13 2\n"),
            Err(StateFileError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_state(""),
            Err(StateFileError::Syntax { .. })
        ));
        assert!(matches!(
            parse_state("1 2\n1 0 0 0\n0 0 NaN 0\n"),
            Err(StateFileError::Syntax { line: 3, .. })
        ));
    }
}
