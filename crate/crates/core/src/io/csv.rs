//! Importance maps as plain CSV: a `rows,cols` header followed by one line of
//! comma-separated scores per token row.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{ImportanceMap, TokenGrid};

/// Reads an importance map. The grid carries `patch_px` and `merge_factor` so
/// the map can be checked against a frame.
pub fn load_importance_csv(path: &Path, patch_px: u32, merge_factor: u32) -> Result<ImportanceMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_importance_csv(&text, &path.display().to_string(), patch_px, merge_factor)
}

/// Parses importance-map text; `origin` names the source in errors. Columns
/// in errors are 1-based field numbers.
pub fn parse_importance_csv(text: &str, origin: &str, patch_px: u32, merge_factor: u32) -> Result<ImportanceMap> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| err(1, 1, "empty file, expected `rows,cols`".into()))?;
    let dims: Vec<&str> = header.split(',').collect();
    if dims.len() != 2 {
        return Err(err(1, 1, format!("expected `rows,cols`, found {} fields", dims.len())));
    }
    let dim = |col: usize| -> Result<usize> {
        match dims[col - 1].trim().parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(err(1, col, format!("`{}` is not a positive integer", dims[col - 1].trim()))),
        }
    };
    let (rows, cols) = (dim(1)?, dim(2)?);

    let mut scores = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| err(r + 2, 1, format!("missing row {} of {rows}", r + 1)))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(err(
                line_no,
                fields.len().min(cols) + 1,
                format!("expected {cols} values, found {}", fields.len()),
            ));
        }
        for (c, f) in fields.iter().enumerate() {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| err(line_no, c + 1, format!("`{}` is not a number", f.trim())))?;
            if !v.is_finite() {
                return Err(err(line_no, c + 1, format!("score {v} is not finite")));
            }
            if v < 0.0 {
                return Err(err(line_no, c + 1, format!("score {v} is negative")));
            }
            scores.push(v);
        }
    }
    if let Some((line_no, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(line_no, 1, format!("unexpected content after {rows} rows: `{extra}`")));
    }
    let grid = TokenGrid::new(rows, cols, patch_px, merge_factor)?;
    ImportanceMap::new(grid, scores)
}

/// Serialises a map in the format [`parse_importance_csv`] reads. Scores use
/// the shortest representation that round-trips.
pub fn format_importance_csv(map: &ImportanceMap) -> String {
    let g = map.grid();
    let mut out = format!("{},{}\n", g.rows, g.cols);
    for row in map.scores().chunks(g.cols) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(",")).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ImportanceMap> {
        parse_importance_csv(text, "mem", 14, 2)
    }

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse(text) {
            Err(Error::Parse {
                line, column, message, ..
            }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file() {
        let m = parse("1,1\n0.5").unwrap();
        assert_eq!((m.grid().rows, m.grid().cols), (1, 1));
        assert_eq!(m.scores(), &[0.5]);
    }

    #[test]
    fn row_major_layout() {
        let m = parse("2,2\n1,2\n3,4\n").unwrap();
        assert_eq!(m.scores(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn short_row_names_its_line() {
        let (line, col, msg) = parse_err("2,2\n1,2\n3");
        assert_eq!(line, 3);
        assert_eq!(col, 2);
        assert!(msg.contains("expected 2 values"), "{msg}");
    }

    #[test]
    fn missing_row() {
        assert_eq!(parse_err("2,2\n1,2\n").0, 3);
    }

    #[test]
    fn bad_values_name_line_and_column() {
        let (line, col, msg) = parse_err("1,3\n1,-2,3");
        assert_eq!((line, col), (2, 2));
        assert!(msg.contains("negative"), "{msg}");
        let (line, col, _) = parse_err("2,2\n1,2\n3,NaN");
        assert_eq!((line, col), (3, 2));
        let (line, col, _) = parse_err("1,2\n1,inf");
        assert_eq!((line, col), (2, 2));
        let (line, col, _) = parse_err("1,2\n1,x");
        assert_eq!((line, col), (2, 2));
    }

    #[test]
    fn bad_header() {
        assert_eq!(parse_err("").0, 1);
        assert_eq!(parse_err("3\n1").1, 1);
        assert_eq!(parse_err("0,2\n").1, 1);
        assert_eq!(parse_err("2,x\n").1, 2);
    }

    #[test]
    fn trailing_rows_are_rejected_blank_lines_are_not() {
        assert!(parse("1,1\n2\n\n").is_ok());
        assert_eq!(parse_err("1,1\n2\n3\n").0, 3);
    }

    #[test]
    fn windows_line_endings_and_padding() {
        let m = parse("2,1\r\n 0.25 \r\n7\r\n").unwrap();
        assert_eq!(m.scores(), &[0.25, 7.0]);
    }

    #[test]
    fn format_round_trips() {
        let grid = TokenGrid::new(2, 3, 14, 2).unwrap();
        let map = ImportanceMap::new(grid, vec![0.1, 0.2, 1.0 / 3.0, 0.0, 5e-12, 1e300]).unwrap();
        let back = parse(&format_importance_csv(&map)).unwrap();
        assert_eq!(back, map);
    }
}
