//! Gaussian cube volumetric files.
//!
//! Layout: two comment lines; `natoms ox oy oz`; three `n ax ay az` axis
//! lines; one line per atom `Z charge x y z`; values with the third axis
//! fastest, six per line. Lengths in bohr. A negative axis count on input
//! means the step vectors are in Å.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix3;
use thiserror::Error;

use crate::model::{GridValues, Vec3, VolumetricGrid};
use crate::units::angstrom_to_bohr;

#[derive(Debug, Error, PartialEq)]
pub enum CubeError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },

    #[error("line {line}: non-numeric value '{token}'")]
    NonNumeric { line: usize, token: String },

    #[error("expected {expected} values, found {found} (line {line})")]
    CountMismatch { line: usize, expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cube files hold real values only")]
    ComplexValues,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeAtom {
    pub number: u32,
    pub charge: f64,
    /// Bohr.
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub comments: [String; 2],
    pub atoms: Vec<CubeAtom>,
    pub grid: VolumetricGrid,
}

/// `%12.5E`-style: mantissa with 5 decimals and a signed two-digit exponent.
pub fn format_scientific(v: f64) -> String {
    if v == 0.0 {
        return format!("{:>12}", "0.00000E+00");
    }
    let s = format!("{v:.5E}");
    let (mantissa, exp) = s.split_once('E').expect("E in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{:>12}", format!("{mantissa}E{sign}{:02}", exp.abs()))
}

pub fn cube_to_string(cube: &Cube) -> Result<String, CubeError> {
    let values = match cube.grid.values() {
        GridValues::Real(v) => v,
        GridValues::Complex(_) => return Err(CubeError::ComplexValues),
    };
    let mut out = String::new();
    for c in &cube.comments {
        out.push_str(&c.replace('\n', " "));
        out.push('\n');
    }
    let o = cube.grid.origin();
    let _ = writeln!(out, "{:5}{:12.6}{:12.6}{:12.6}", cube.atoms.len(), o.x, o.y, o.z);
    let counts = cube.grid.counts();
    for a in 0..3 {
        let v = cube.grid.axis(a);
        let _ = writeln!(out, "{:5}{:12.6}{:12.6}{:12.6}", counts[a], v.x, v.y, v.z);
    }
    for atom in &cube.atoms {
        let p = atom.position;
        let _ = writeln!(out, "{:5}{:12.6}{:12.6}{:12.6}{:12.6}", atom.number, atom.charge, p.x, p.y, p.z);
    }
    // rows of the fastest axis, wrapped at six values
    let n2 = counts[2];
    for row in values.chunks(n2) {
        for line in row.chunks(6) {
            for v in line {
                out.push(' ');
                out.push_str(&format_scientific(*v));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_cube(path: &Path, cube: &Cube) -> crate::Result<()> {
    let text = cube_to_string(cube)?;
    std::fs::write(path, text).map_err(|e| crate::Error::io(path, e))
}

pub fn read_cube(path: &Path) -> crate::Result<Cube> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
    Ok(parse_cube(&text)?)
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<f64>, CubeError> {
    line.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| CubeError::NonNumeric { line: lineno, token: t.to_string() }))
        .collect()
}

fn header_line(lines: &[&str], idx: usize, min_fields: usize) -> Result<Vec<f64>, CubeError> {
    let lineno = idx + 1;
    let line = lines
        .get(idx)
        .ok_or_else(|| CubeError::MalformedHeader { line: lineno, message: "unexpected end of file".into() })?;
    let nums = numbers(line, lineno)?;
    if nums.len() < min_fields {
        return Err(CubeError::MalformedHeader {
            line: lineno,
            message: format!("expected {min_fields} fields, found {}", nums.len()),
        });
    }
    Ok(nums)
}

fn as_count(x: f64, lineno: usize) -> Result<i64, CubeError> {
    if x.fract() != 0.0 {
        return Err(CubeError::MalformedHeader { line: lineno, message: format!("count {x} is not an integer") });
    }
    Ok(x as i64)
}

pub fn parse_cube(text: &str) -> Result<Cube, CubeError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 2 {
        return Err(CubeError::MalformedHeader { line: lines.len() + 1, message: "missing comment lines".into() });
    }
    let comments = [lines[0].to_string(), lines[1].to_string()];
    let h = header_line(&lines, 2, 4)?;
    let natoms_raw = as_count(h[0], 3)?;
    let origin = Vec3::new(h[1], h[2], h[3]);

    let mut counts = [0usize; 3];
    let mut axes = Matrix3::zeros();
    for a in 0..3 {
        let idx = 3 + a;
        let f = header_line(&lines, idx, 4)?;
        let n = as_count(f[0], idx + 1)?;
        let mut v = Vec3::new(f[1], f[2], f[3]);
        if n < 0 {
            v = v.map(angstrom_to_bohr);
        }
        if n.unsigned_abs() < 2 {
            return Err(CubeError::MalformedHeader { line: idx + 1, message: format!("axis count {n} below 2") });
        }
        counts[a] = n.unsigned_abs() as usize;
        axes.set_row(a, &v.transpose());
    }

    let natoms = natoms_raw.unsigned_abs() as usize;
    let mut atoms = Vec::with_capacity(natoms);
    for k in 0..natoms {
        let idx = 6 + k;
        let f = header_line(&lines, idx, 5)?;
        let z = as_count(f[0], idx + 1)?;
        if z < 0 {
            return Err(CubeError::MalformedHeader { line: idx + 1, message: format!("atomic number {z}") });
        }
        atoms.push(CubeAtom { number: z as u32, charge: f[1], position: Vec3::new(f[2], f[3], f[4]) });
    }
    let mut next = 6 + natoms;
    if natoms_raw < 0 {
        // orbital-index record; only single-field volumes are supported
        let f = header_line(&lines, next, 1)?;
        if f[0] != 1.0 {
            return Err(CubeError::MalformedHeader { line: next + 1, message: "multi-orbital cubes are not supported".into() });
        }
        next += 1;
    }

    let expected = counts.iter().product::<usize>();
    let mut values = Vec::with_capacity(expected);
    let mut last_line = next;
    for (idx, line) in lines.iter().enumerate().skip(next) {
        let nums = numbers(line, idx + 1)?;
        if !nums.is_empty() {
            last_line = idx + 1;
        }
        values.extend(nums);
    }
    if values.len() != expected {
        return Err(CubeError::CountMismatch { line: last_line, expected, found: values.len() });
    }
    let grid = VolumetricGrid::new(origin, axes, counts, GridValues::Real(values))
        .map_err(|e| CubeError::InvalidGrid(e.to_string()))?;
    Ok(Cube { comments, atoms, grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(values: Vec<f64>) -> Cube {
        let grid = VolumetricGrid::cubic(Vec3::new(-1.0, -1.0, -1.0), 1.0, [3, 3, 3], GridValues::Real(values)).unwrap();
        Cube {
            comments: ["first".into(), "second".into()],
            atoms: vec![CubeAtom { number: 6, charge: 6.0, position: Vec3::new(0.5, 0.0, -0.25) }],
            grid,
        }
    }

    #[test]
    fn zeros_round_trip() {
        let c = small(vec![0.0; 27]);
        let back = parse_cube(&cube_to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn values_round_trip_within_format_precision() {
        let vals: Vec<f64> = (0..27).map(|i| ((i as f64) * 0.731).sin() * 10f64.powi(i % 7 - 3)).collect();
        let c = small(vals.clone());
        let back = parse_cube(&cube_to_string(&c).unwrap()).unwrap();
        for (a, b) in vals.iter().zip(back.grid.real_values().unwrap()) {
            assert!((a - b).abs() <= 5e-6 * a.abs() + 1e-300);
        }
    }

    #[test]
    fn scientific_layout() {
        assert_eq!(format_scientific(1.0), " 1.00000E+00");
        assert_eq!(format_scientific(-1.2345678e-7), "-1.23457E-07");
        assert_eq!(format_scientific(6.02e23), " 6.02000E+23");
        assert_eq!(format_scientific(0.0), " 0.00000E+00");
    }

    #[test]
    fn six_values_per_line() {
        let c = small(vec![1.0; 27]);
        let s = cube_to_string(&c).unwrap();
        let body: Vec<&str> = s.lines().skip(7).collect();
        // each z-row of 3 values fits on one line
        assert_eq!(body.len(), 9);
        assert!(body.iter().all(|l| l.split_whitespace().count() <= 6));
    }

    #[test]
    fn angstrom_axes_are_converted() {
        let c = small(vec![0.0; 27]);
        let s = cube_to_string(&c).unwrap().replace("    3    1.000000", "   -3    1.000000");
        let back = parse_cube(&s).unwrap();
        assert!((back.grid.axis(0).x - angstrom_to_bohr(1.0)).abs() < 1e-12);
        assert_eq!(back.grid.counts(), [3, 3, 3]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let good = cube_to_string(&small(vec![0.0; 27])).unwrap();
        let mut lines: Vec<String> = good.lines().map(String::from).collect();

        let mut bad = lines.clone();
        bad[3] = "    3    1.0".into();
        assert_eq!(
            parse_cube(&bad.join("\n")).unwrap_err(),
            CubeError::MalformedHeader { line: 4, message: "expected 4 fields, found 2".into() }
        );

        let mut bad = lines.clone();
        bad[8] = " 0.0 abc 0.0".into();
        assert_eq!(parse_cube(&bad.join("\n")).unwrap_err(), CubeError::NonNumeric { line: 9, token: "abc".into() });

        lines.pop();
        assert!(matches!(
            parse_cube(&lines.join("\n")).unwrap_err(),
            CubeError::CountMismatch { expected: 27, found: 24, .. }
        ));
    }

    #[test]
    fn complex_values_rejected() {
        let grid = VolumetricGrid::cubic(
            Vec3::zeros(),
            1.0,
            [2, 2, 2],
            GridValues::Complex(vec![num_complex::Complex64::new(0.0, 0.0); 8]),
        )
        .unwrap();
        let c = Cube { comments: [String::new(), String::new()], atoms: vec![], grid };
        assert_eq!(cube_to_string(&c).unwrap_err(), CubeError::ComplexValues);
    }
}
