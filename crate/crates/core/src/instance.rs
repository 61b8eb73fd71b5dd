//! Problem instances (anchor point plus rays) and the text file formats.
//!
//! An instance fixes the fractional anchor `f` and the ordered ray list
//! `r^1, ..., r^k` of the two-row corner relaxation
//! `{s >= 0 : f + sum_j r^j s_j integral}`. Files are line oriented
//! (`key = value`), diff-friendly, and exact: rationals are written `p/q`
//! with `q` omitted when 1.

use crate::body::Body;
use crate::error::Error;
use crate::geom::Vec2;
use crate::rat::{fmt_rat, parse_rat, Rat};
use crate::Result;

/// An anchor `f` (never integral) and the rays of the relaxation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    name: Option<String>,
    f: Vec2,
    rays: Vec<Vec2>,
    duplicates: Vec<(usize, usize)>,
}

impl Instance {
    /// Validates and builds an instance: `f` must not be a lattice point
    /// (no lattice-free body can hold one interior) and rays must be
    /// nonzero. Duplicate rays are permitted but recorded.
    pub fn new(name: Option<String>, f: Vec2, rays: Vec<Vec2>) -> Result<Instance> {
        if f.to_lattice().is_some() {
            return Err(Error::InvalidInstance(
                "anchor f is a lattice point".into(),
            ));
        }
        for (j, r) in rays.iter().enumerate() {
            if r.is_zero() {
                return Err(Error::InvalidInstance(format!("ray {} is zero", j + 1)));
            }
        }
        let mut duplicates = Vec::new();
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rays[i] == rays[j] {
                    duplicates.push((i, j));
                }
            }
        }
        Ok(Instance {
            name,
            f,
            rays,
            duplicates,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn f(&self) -> &Vec2 {
        &self.f
    }

    pub fn rays(&self) -> &[Vec2] {
        &self.rays
    }

    /// Index pairs (i, j), i < j, of identical rays.
    pub fn duplicate_rays(&self) -> &[(usize, usize)] {
        &self.duplicates
    }
}

/// One `key = value` line; returns (key, value, value column).
fn split_line(line: &str, lineno: usize) -> Result<(&str, &str, usize)> {
    let eq = line.find('=').ok_or_else(|| {
        Error::InvalidInstance(format!("line {lineno}: expected `key = value`"))
    })?;
    let key = line[..eq].trim();
    let value = line[eq + 1..].trim();
    let vcol = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
    if key.is_empty() {
        return Err(Error::InvalidInstance(format!(
            "line {lineno}, column 1: missing key"
        )));
    }
    Ok((key, value, vcol))
}

/// Parses "`<rat> <rat>`" with error positions relative to `col0`.
fn parse_pair(value: &str, lineno: usize, col0: usize) -> Result<Vec2> {
    let mut parts = Vec::new();
    let mut offset = 0;
    for tok in value.split_whitespace() {
        let col = col0 + value[offset..].find(tok).map(|i| i + offset).unwrap_or(0);
        offset = col - col0 + tok.len();
        parts.push((tok, col));
    }
    if parts.len() != 2 {
        return Err(Error::InvalidInstance(format!(
            "line {lineno}, column {col0}: expected two rationals"
        )));
    }
    let mut nums = Vec::with_capacity(2);
    for (tok, col) in parts {
        let r = parse_rat(tok).map_err(|e| {
            Error::InvalidInstance(format!("line {lineno}, column {col}: {e}"))
        })?;
        nums.push(r);
    }
    let y = nums.pop().unwrap();
    let x = nums.pop().unwrap();
    Ok(Vec2::new(x, y))
}

/// Relevant lines are `name = ...` (optional), one `f = <rat> <rat>`, and
/// one `r = <rat> <rat>` per ray; `#` comments and blank lines skipped.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut name = None;
    let mut f: Option<Vec2> = None;
    let mut rays = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let (key, value, vcol) = split_line(line, lineno)?;
        match key {
            "name" => name = Some(value.to_string()),
            "f" => {
                if f.is_some() {
                    return Err(Error::InvalidInstance(format!(
                        "line {lineno}: duplicate `f`"
                    )));
                }
                f = Some(parse_pair(value, lineno, vcol)?);
            }
            "r" => rays.push(parse_pair(value, lineno, vcol)?),
            other => {
                return Err(Error::InvalidInstance(format!(
                    "line {lineno}, column 1: unknown key `{other}`"
                )))
            }
        }
    }
    let f = f.ok_or_else(|| Error::InvalidInstance("missing `f` line".into()))?;
    if rays.is_empty() {
        return Err(Error::InvalidInstance("instance has no rays".into()));
    }
    Instance::new(name, f, rays)
}

fn fmt_pair(v: &Vec2) -> String {
    format!("{} {}", fmt_rat(&v.x), fmt_rat(&v.y))
}

/// Exact round-trip rendering of an instance.
pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    if let Some(name) = inst.name() {
        out.push_str(&format!("name = {name}\n"));
    }
    out.push_str(&format!("f = {}\n", fmt_pair(inst.f())));
    for r in inst.rays() {
        out.push_str(&format!("r = {}\n", fmt_pair(r)));
    }
    out
}

/// Body files: one `f = <rat> <rat>` line then one `b = <rat> <rat>` line
/// per row (an index suffix on `b` is accepted and ignored).
pub fn parse_body(text: &str) -> Result<Body> {
    let mut f: Option<Vec2> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let (key, value, vcol) = split_line(line, lineno)?;
        if key == "f" {
            if f.is_some() {
                return Err(Error::InvalidInstance(format!(
                    "line {lineno}: duplicate `f`"
                )));
            }
            f = Some(parse_pair(value, lineno, vcol)?);
        } else if key == "b" || (key.starts_with('b') && key[1..].chars().all(|c| c.is_ascii_digit()))
        {
            rows.push(parse_pair(value, lineno, vcol)?);
        } else {
            return Err(Error::InvalidInstance(format!(
                "line {lineno}, column 1: unknown key `{key}`"
            )));
        }
    }
    let f = f.ok_or_else(|| Error::InvalidInstance("missing `f` line".into()))?;
    Body::new(f, rows)
}

/// Exact round-trip rendering of a body.
pub fn format_body(b: &Body) -> String {
    let mut out = format!("f = {}\n", fmt_pair(b.f()));
    for row in b.rows() {
        out.push_str(&format!("b = {}\n", fmt_pair(row)));
    }
    out
}

/// Rational vectors rendered `p/q p/q ...` (canonical inequality text).
pub fn fmt_rat_slice(v: &[Rat]) -> String {
    v.iter().map(fmt_rat).collect::<Vec<_>>().join(" ")
}
