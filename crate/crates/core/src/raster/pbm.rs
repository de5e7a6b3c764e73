//! Plain bitmap (`P1`) files with the window header in a comment line:
//!
//! ```text
//! P1
//! # origin_x=-1 origin_y=-1 h=0.01
//! 200 200
//! 0001111000...
//! ```
//!
//! Rows are written top row first, `1` for occupied.

use std::io::Write;
use std::path::Path;

use super::{Grid, GridMask};
use crate::error::{Error, Result};
use crate::geom::Point2;

pub fn write_pbm(mask: &GridMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let g = mask.grid;
    let mut out = Vec::with_capacity(g.len() + g.height + 128);
    writeln!(out, "P1").unwrap();
    writeln!(out, "# origin_x={} origin_y={} h={}", g.origin.x, g.origin.y, g.h).unwrap();
    writeln!(out, "{} {}", g.width, g.height).unwrap();
    for j in (0..g.height).rev() {
        out.extend((0..g.width).map(|i| if mask.get(i, j) { b'1' } else { b'0' }));
        out.push(b'\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<GridMask> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pbm(&text, &path.display().to_string())
}

pub(crate) fn parse_pbm(text: &str, label: &str) -> Result<GridMask> {
    let err = |line: usize, message: String| Error::Parse {
        path: label.to_string(),
        line,
        message,
    };
    let mut origin: (Option<f64>, Option<f64>) = (None, None);
    let mut h: Option<f64> = None;
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        if let Some(c) = line.trim_start().strip_prefix('#') {
            for kv in c.split_whitespace() {
                let Some((k, v)) = kv.split_once('=') else { continue };
                let val = || v.parse::<f64>().map_err(|_| err(ln, format!("bad header value `{kv}`")));
                match k {
                    "origin_x" => origin.0 = Some(val()?),
                    "origin_y" => origin.1 = Some(val()?),
                    "h" => h = Some(val()?),
                    _ => {}
                }
            }
            continue;
        }
        tokens.extend(line.split_whitespace().map(|t| (ln, t)));
    }
    let mut it = tokens.into_iter();
    match it.next() {
        Some((_, "P1")) => {}
        other => return Err(err(other.map_or(1, |t| t.0), "missing `P1` magic".into())),
    }
    let mut dim = |what: &str| -> Result<usize> {
        let (ln, t) = it.next().ok_or_else(|| err(0, format!("missing {what}")))?;
        t.parse::<usize>().map_err(|_| err(ln, format!("bad {what} `{t}`")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let (Some(ox), Some(oy), Some(h)) = (origin.0, origin.1, h) else {
        return Err(err(2, "comment header must carry origin_x, origin_y and h".into()));
    };
    let grid = Grid::new(Point2::new(ox, oy), h, width, height)?;
    let mut bits = Vec::with_capacity(width * height);
    for (ln, t) in it {
        for ch in t.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(err(ln, format!("unexpected character `{ch}`"))),
            }
        }
    }
    if bits.len() != width * height {
        return Err(err(0, format!("expected {} pixels, found {}", width * height, bits.len())));
    }
    let mut mask = GridMask::empty(grid);
    for (k, b) in bits.into_iter().enumerate() {
        let (i, row) = (k % width, k / width);
        mask.set(i, height - 1 - row, b);
    }
    Ok(mask)
}
