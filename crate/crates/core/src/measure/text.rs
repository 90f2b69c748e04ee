//! Line-oriented text form of step functions.
//!
//! ```text
//! step-function
//! coords 1 2
//! breaks 1 0/1 1/2 1/1
//! breaks 2 0/1 1/3 1/1
//! values 1/1 0/1 0/1 1/1
//! end
//! ```
//!
//! `values` lists the cell tensor row-major over the coordinates in the
//! order of the `coords` line (last coordinate fastest). Blank lines and
//! lines starting with `#` are ignored. The grammar is in `docs/formats.md`.

use super::{MeasureError, ProductGrid, StepFunction};
use crate::rational::{fmt_q, parse_q, Rational};

pub fn write_step(f: &StepFunction) -> String {
    let g = f.grid();
    let mut out = String::from("step-function\ncoords");
    for c in g.coords() {
        out.push_str(&format!(" {c}"));
    }
    out.push('\n');
    for (c, b) in g.coords().iter().zip(g.breaks()) {
        out.push_str(&format!("breaks {c}"));
        for x in b {
            out.push(' ');
            out.push_str(&fmt_q(x));
        }
        out.push('\n');
    }
    out.push_str("values");
    for v in f.values() {
        out.push(' ');
        out.push_str(&fmt_q(v));
    }
    out.push_str("\nend\n");
    out
}

/// Significant lines with their 1-based line numbers.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn perr(line: usize, msg: impl Into<String>) -> MeasureError {
    MeasureError::Parse {
        line,
        msg: msg.into(),
    }
}

fn rationals<'a>(line: usize, words: impl Iterator<Item = &'a str>) -> Result<Vec<Rational>, MeasureError> {
    words
        .map(|w| parse_q(w).map_err(|e| perr(line, e.to_string())))
        .collect()
}

/// Reads one `step-function ... end` block from the iterator.
pub(crate) fn read_step<'a>(
    it: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<StepFunction, MeasureError> {
    let (ln, head) = it.next().ok_or_else(|| perr(0, "unexpected end of input"))?;
    if head != "step-function" {
        return Err(perr(ln, format!("expected `step-function`, found {head:?}")));
    }
    let (ln, coords_line) = it.next().ok_or_else(|| perr(ln, "missing coords line"))?;
    let mut words = coords_line.split_whitespace();
    if words.next() != Some("coords") {
        return Err(perr(ln, "expected `coords`"));
    }
    let coords: Vec<u32> = words
        .map(|w| w.parse::<u32>().map_err(|_| perr(ln, format!("bad coordinate {w:?}"))))
        .collect::<Result<_, _>>()?;
    let mut breaks = Vec::with_capacity(coords.len());
    for &c in &coords {
        let (ln, line) = it.next().ok_or_else(|| perr(ln, "missing breaks line"))?;
        let mut words = line.split_whitespace();
        if words.next() != Some("breaks") {
            return Err(perr(ln, "expected `breaks`"));
        }
        let named: u32 = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| perr(ln, "breaks line needs a coordinate"))?;
        if named != c {
            return Err(perr(ln, format!("breaks for coordinate {named}, expected {c}")));
        }
        breaks.push(rationals(ln, words)?);
    }
    let (ln, line) = it.next().ok_or_else(|| perr(ln, "missing values line"))?;
    let mut words = line.split_whitespace();
    if words.next() != Some("values") {
        return Err(perr(ln, "expected `values`"));
    }
    let raw = rationals(ln, words)?;
    let (end_ln, end) = it.next().ok_or_else(|| perr(ln, "missing `end`"))?;
    if end != "end" {
        return Err(perr(end_ln, "expected `end`"));
    }
    // Values follow the listed coordinate order; the grid stores coordinates
    // ascending, so permute if the file listed them otherwise.
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by_key(|&i| coords[i]);
    let grid = ProductGrid::new(coords.clone(), breaks.clone())?;
    if raw.len() != grid.cell_count() {
        return Err(MeasureError::ShapeMismatch {
            values: raw.len(),
            cells: grid.cell_count(),
        });
    }
    let values = if order.iter().enumerate().all(|(i, &o)| i == o) {
        raw
    } else {
        permute(&raw, &breaks, &order)
    };
    StepFunction::new(grid, values)
}

/// Reorders a row-major tensor listed in `file` axis order into ascending
/// coordinate order (`order[k]` is the file axis placed at position `k`).
fn permute(raw: &[Rational], breaks: &[Vec<Rational>], order: &[usize]) -> Vec<Rational> {
    let file_shape: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
    let mut file_strides = vec![1usize; file_shape.len()];
    for i in (0..file_shape.len().saturating_sub(1)).rev() {
        file_strides[i] = file_strides[i + 1] * file_shape[i + 1];
    }
    let mut idx = vec![0usize];
    for &axis in order {
        let mut next = Vec::with_capacity(idx.len() * file_shape[axis]);
        for s in &idx {
            for k in 0..file_shape[axis] {
                next.push(s + k * file_strides[axis]);
            }
        }
        idx = next;
    }
    idx.into_iter().map(|i| raw[i].clone()).collect()
}

pub fn parse_step(text: &str) -> Result<StepFunction, MeasureError> {
    let mut it = lines(text);
    let f = read_step(&mut it)?;
    if let Some((ln, extra)) = it.next() {
        return Err(perr(ln, format!("trailing content {extra:?}")));
    }
    Ok(f)
}

/// Any number of consecutive step-function blocks.
pub fn parse_steps(text: &str) -> Result<Vec<StepFunction>, MeasureError> {
    let mut it = lines(text).peekable();
    let mut out = Vec::new();
    while it.peek().is_some() {
        out.push(read_step(&mut it)?);
    }
    Ok(out)
}

/// Serde adapter storing a step function as its text block.
pub mod serde_step {
    use super::{parse_step, write_step};
    use crate::measure::StepFunction;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &StepFunction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&write_step(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<StepFunction, D::Error> {
        let text = String::deserialize(d)?;
        parse_step(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, one, q, zero};

    #[test]
    fn round_trip_two_coordinates() {
        let f = StepFunction::on_coordinate(2, vec![zero(), q(1, 3), one()], vec![int(2), q(-1, 7)]).unwrap();
        let g = StepFunction::interval(5, q(1, 4), q(1, 2), int(3)).unwrap();
        let h = f.mul(&g).unwrap();
        let text = write_step(&h);
        let back = parse_step(&text).unwrap();
        assert_eq!(back.grid(), h.grid());
        assert_eq!(back.values(), h.values());
        assert_eq!(write_step(&back), text);
    }

    #[test]
    fn constant_has_empty_coords() {
        let text = write_step(&StepFunction::one());
        assert_eq!(text, "step-function\ncoords\nvalues 1/1\nend\n");
        assert_eq!(parse_step(&text).unwrap(), StepFunction::one());
    }

    #[test]
    fn coordinates_listed_out_of_order() {
        let text = "step-function\ncoords 2 1\nbreaks 2 0 1/3 1\nbreaks 1 0 1/2 1\nvalues 1 2 3 4\nend\n";
        let f = parse_step(text).unwrap();
        assert_eq!(f.grid().coords(), &[1, 2]);
        // file cell (c2=i, c1=j) -> value 1 + 2i + j
        assert_eq!(f.values(), &[int(1), int(3), int(2), int(4)]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_step("step-function\ncoords 1\nbreaks 1 0 1/2 1\nvalues 1 x\nend").unwrap_err();
        assert!(matches!(err, MeasureError::Parse { line: 4, .. }));
        assert!(parse_step("step-function\ncoords 1\nbreaks 1 0 1\nvalues 1 2\nend").is_err());
    }
}
