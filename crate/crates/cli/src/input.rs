use std::fmt;

use fmpartners_core::{CurveClass, IntMatrix2};

/// A rejected command-line value. Always maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<fmpartners_core::Error> for InputError {
    fn from(e: fmpartners_core::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type InputResult<T> = Result<T, InputError>;

fn integers(s: &str, what: &str, count: Option<usize>) -> InputResult<Vec<i64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if let Some(n) = count {
        if parts.len() != n {
            return Err(InputError(format!(
                "malformed {what} '{s}': expected {n} comma-separated integers"
            )));
        }
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<i64>()
                .map_err(|_| InputError(format!("malformed {what} '{s}': '{p}' is not an integer")))
        })
        .collect()
}

pub fn parse_point(s: &str) -> InputResult<(i64, i64)> {
    let v = integers(s, "point", Some(2))?;
    Ok((v[0], v[1]))
}

pub fn parse_matrix(s: &str) -> InputResult<IntMatrix2> {
    let v = integers(s, "matrix", Some(4))?;
    Ok(IntMatrix2::new(v[0], v[1], v[2], v[3]))
}

pub fn parse_residues(s: &str) -> InputResult<Vec<u64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    integers(s, "residue list", None)?
        .into_iter()
        .map(|r| u64::try_from(r).map_err(|_| InputError(format!("negative residue {r}"))))
        .collect()
}

pub fn parse_classes(s: &str) -> InputResult<Vec<CurveClass>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let c: CurveClass = part.parse().map_err(InputError)?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

/// `class,m,x,y`.
pub fn parse_from_point(s: &str) -> InputResult<(CurveClass, u64, i64, i64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(InputError(format!(
            "malformed point spec '{s}': expected class,m,x,y"
        )));
    }
    let class: CurveClass = parts[0].parse().map_err(InputError)?;
    let rest = integers(&parts[1..].join(","), "point spec", Some(3))?;
    let m = u64::try_from(rest[0])
        .ok()
        .filter(|&m| m > 0)
        .ok_or_else(|| InputError(format!("modulus must be positive, got {}", rest[0])))?;
    Ok((class, m, rest[1], rest[2]))
}
