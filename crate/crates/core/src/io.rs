//! Plain-text instance files.
//!
//! ```text
//! # comment
//! symmetric 3          | asymmetric m n | rank_r n r
//!                      | observed_symmetric n | observed_asymmetric m n
//! u 1 2 1              truth vector(s): `u`, `v`, or one `U` line per row
//! 1 1 1 0              observed entry: i j X_ij S_ij (1-based)
//! 1 2 2 0
//! ```
//!
//! Symmetric entries are stored with `i ≤ j`. Floats are written in shortest
//! round-trip form, so writing and re-reading is lossless. `X` is checked
//! against the truth and noise on read. `observed_*` files carry no truth
//! and take `X` as given.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{ComponentMatrix, ComponentVector, Instance, MeasurementSet, Shape, SparseNoise, Truth};
use crate::scalar::Real;

fn join<T: Real>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn format_instance<T: Real>(inst: &Instance<T>) -> String {
    let mut out = String::new();
    match (inst.truth(), inst.omega().shape()) {
        (Truth::Symmetric(u), Shape::Symmetric { n }) => {
            let _ = writeln!(out, "symmetric {n}\nu {}", join(u.as_slice()));
        }
        (Truth::Asymmetric { u, v }, Shape::Asymmetric { m, n }) => {
            let _ = writeln!(out, "asymmetric {m} {n}\nu {}\nv {}", join(u.as_slice()), join(v.as_slice()));
        }
        (Truth::RankR(f), Shape::Symmetric { n }) => {
            let _ = writeln!(out, "rank_r {n} {}", f.rank());
            for i in 0..n {
                let _ = writeln!(out, "U {}", join(f.row(i)));
            }
        }
        (Truth::Unknown, Shape::Asymmetric { m, n }) => {
            let _ = writeln!(out, "observed_asymmetric {m} {n}");
        }
        (Truth::Unknown, Shape::Symmetric { n }) => {
            let _ = writeln!(out, "observed_symmetric {n}");
        }
        _ => unreachable!("instance constructors keep truth and shape consistent"),
    }
    for (k, &(i, j)) in inst.omega().pairs().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i + 1, j + 1, inst.observed()[k], inst.noise().get(i, j));
    }
    out
}

pub fn write_instance<T: Real>(path: &Path, inst: &Instance<T>) -> Result<()> {
    fs::write(path, format_instance(inst))?;
    Ok(())
}

pub fn read_instance<T: Real>(path: &Path) -> Result<Instance<T>> {
    parse_instance(&fs::read_to_string(path)?)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok.parse().map_err(|_| perr(line, format!("invalid number '{tok}'")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(perr(line, format!("non-finite number '{tok}'")))
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| perr(line, format!("invalid integer '{tok}'")))
}

#[derive(Debug, Clone, Copy)]
enum Header {
    Symmetric(usize),
    Asymmetric(usize, usize),
    RankR(usize, usize),
    Observed(Shape),
}

pub fn parse_instance<T: Real>(text: &str) -> Result<Instance<T>> {
    let mut header: Option<(Header, usize)> = None;
    let (mut u, mut v): (Option<Vec<f64>>, Option<Vec<f64>>) = (None, None);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut entries: Vec<(usize, usize, f64, f64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if header.is_none() {
            let dims: Vec<usize> = toks[1..].iter().map(|t| parse_usize(t, line)).collect::<Result<_>>()?;
            let h = match (toks[0], dims.as_slice()) {
                ("symmetric", &[n]) => Header::Symmetric(n),
                ("asymmetric", &[m, n]) => Header::Asymmetric(m, n),
                ("rank_r", &[n, r]) => Header::RankR(n, r),
                ("observed_symmetric", &[n]) => Header::Observed(Shape::Symmetric { n }),
                ("observed_asymmetric", &[m, n]) => Header::Observed(Shape::Asymmetric { m, n }),
                _ => return Err(perr(line, format!("unrecognised header '{content}'"))),
            };
            header = Some((h, line));
            continue;
        }
        let floats = |ts: &[&str]| ts.iter().map(|t| parse_f64(t, line)).collect::<Result<Vec<f64>>>();
        match toks[0] {
            "u" if u.is_none() => u = Some(floats(&toks[1..])?),
            "v" if v.is_none() => v = Some(floats(&toks[1..])?),
            "u" | "v" => return Err(perr(line, format!("duplicate '{}' line", toks[0]))),
            "U" => rows.push(floats(&toks[1..])?),
            _ => {
                if toks.len() != 4 {
                    return Err(perr(line, "entry lines need four fields: i j X S"));
                }
                let (i, j) = (parse_usize(toks[0], line)?, parse_usize(toks[1], line)?);
                if i == 0 || j == 0 {
                    return Err(perr(line, "indices are 1-based"));
                }
                entries.push((i - 1, j - 1, parse_f64(toks[2], line)?, parse_f64(toks[3], line)?, line));
            }
        }
    }
    let (header, hline) = header.ok_or_else(|| perr(1, "missing header line"))?;
    let shape = match header {
        Header::Symmetric(n) | Header::RankR(n, _) => Shape::Symmetric { n },
        Header::Asymmetric(m, n) => Shape::Asymmetric { m, n },
        Header::Observed(s) => s,
    };
    let pairs: Vec<(usize, usize)> = entries.iter().map(|e| (e.0, e.1)).collect();
    let omega = match shape {
        Shape::Symmetric { n } => MeasurementSet::symmetric(n, pairs.iter().copied())?,
        Shape::Asymmetric { m, n } => MeasurementSet::asymmetric(m, n, pairs.iter().copied())?,
    };
    if omega.len() != entries.len() {
        return Err(perr(hline, "duplicate entries"));
    }
    let noise = SparseNoise::from_entries(entries.iter().map(|e| ((e.0, e.1), T::lit(e.3))));
    let vector = |x: Option<Vec<f64>>, name: &str, len: usize| -> Result<ComponentVector<T>> {
        let x = x.ok_or_else(|| perr(hline, format!("missing '{name}' line")))?;
        if x.len() != len {
            return Err(perr(hline, format!("'{name}' has {} entries, expected {len}", x.len())));
        }
        ComponentVector::new(x.into_iter().map(T::lit).collect())
    };
    let inst = match header {
        Header::Symmetric(n) => Instance::symmetric(vector(u, "u", n)?, omega, noise)?,
        Header::Asymmetric(m, n) => Instance::asymmetric(vector(u, "u", m)?, vector(v, "v", n)?, omega, noise)?,
        Header::RankR(n, r) => {
            if rows.len() != n || rows.iter().any(|row| row.len() != r) {
                return Err(perr(hline, format!("rank_r needs {n} 'U' lines with {r} entries each")));
            }
            let flat = rows.into_iter().flatten().map(T::lit).collect();
            Instance::rank_r(ComponentMatrix::new(n, r, flat)?, omega, noise)?
        }
        Header::Observed(_) => {
            let mut values = vec![T::zero(); entries.len()];
            for e in &entries {
                values[omega.position(e.0, e.1).expect("pair inserted above")] = T::lit(e.2);
            }
            return Instance::from_observations(omega, values);
        }
    };
    for e in &entries {
        let got = inst.observed_at(e.0, e.1).expect("pair inserted above").to_f64_lossy();
        if (got - e.2).abs() > 1e-9 * got.abs().max(1.0) {
            return Err(perr(e.4, format!("X = {} disagrees with truth plus noise ({got})", e.2)));
        }
    }
    Ok(inst)
}
