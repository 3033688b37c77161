//! Uniform 2-D grids over `(x, y) = (t₁ − t₃, t₂ − t₃)` and the landscape
//! file format.
//!
//! A landscape file is plain text:
//!
//! ```text
//! # tr-boson landscape v1
//! # x_min = -100
//! # x_max = 100
//! # y_min = -100
//! # y_max = 100
//! # step = 1
//! # nx = 201
//! # ny = 201
//! # meta.<key> = <value>
//! # config_hash = <hex>
//! <nx values of row y = y_min, space separated>
//! <nx values of row y = y_min + step>
//! ...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a file read
//! back reproduces the in-memory grid exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: &str = "# tr-boson landscape v1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    /// ±100 ns in both directions at 1 ns.
    fn default() -> Self {
        Self::square(100.0, 1.0)
    }
}

impl GridSpec {
    pub fn square(half_width: f64, step: f64) -> Self {
        Self { x_min: -half_width, x_max: half_width, y_min: -half_width, y_max: half_width, step }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.x_min, self.x_max, self.y_min, self.y_max, self.step];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite grid bound".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {}", self.step)));
        }
        if self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(Error::InvalidGrid("empty grid extent".into()));
        }
        let nx = (self.x_max - self.x_min) / self.step;
        let ny = (self.y_max - self.y_min) / self.step;
        if (nx - nx.round()).abs() > 1e-9 || (ny - ny.round()).abs() > 1e-9 {
            return Err(Error::InvalidGrid("extent is not a whole number of steps".into()));
        }
        if nx.round() as usize > 20_000 || ny.round() as usize > 20_000 {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        ((self.x_max - self.x_min) / self.step).round() as usize + 1
    }

    pub fn ny(&self) -> usize {
        ((self.y_max - self.y_min) / self.step).round() as usize + 1
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.step
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx()).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny()).map(|j| self.y(j)).collect()
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        close(self.x_min, other.x_min)
            && close(self.x_max, other.x_max)
            && close(self.y_min, other.y_min)
            && close(self.y_max, other.y_max)
            && close(self.step, other.step)
    }
}

/// Nonnegative values on a [`GridSpec`], stored row-major with rows along `y`:
/// `values[j * nx + i]` is the value at `(x(i), y(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeGrid {
    spec: GridSpec,
    values: Vec<f64>,
    metadata: BTreeMap<String, String>,
}

impl LandscapeGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidGrid("values must be finite and nonnegative".into()));
        }
        Ok(Self { spec, values, metadata: BTreeMap::new() })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        spec.validate()?;
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.ny() {
            for i in 0..spec.nx() {
                values.push(f(spec.x(i), spec.y(j)));
            }
        }
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx() + i]
    }

    /// Value at the grid node nearest to `(x, y)`, if inside the grid.
    pub fn nearest(&self, x: f64, y: f64) -> Option<f64> {
        let fi = (x - self.spec.x_min) / self.spec.step;
        let fj = (y - self.spec.y_min) / self.spec.step;
        let (i, j) = (fi.round(), fj.round());
        if i < 0.0 || j < 0.0 || i as usize >= self.spec.nx() || j as usize >= self.spec.ny() {
            return None;
        }
        Some(self.at(i as usize, j as usize))
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        let s = &self.spec;
        let fi = (x - s.x_min) / s.step;
        let fj = (y - s.y_min) / s.step;
        let (nx, ny) = (s.nx(), s.ny());
        let eps = 1e-9;
        if fi < -eps || fj < -eps || fi > (nx - 1) as f64 + eps || fj > (ny - 1) as f64 + eps {
            return None;
        }
        let fi = fi.clamp(0.0, (nx - 1) as f64);
        let fj = fj.clamp(0.0, (ny - 1) as f64);
        let i0 = (fi.floor() as usize).min(nx.saturating_sub(2));
        let j0 = (fj.floor() as usize).min(ny.saturating_sub(2));
        let (wx, wy) = (fi - i0 as f64, fj - j0 as f64);
        let i1 = (i0 + 1).min(nx - 1);
        let j1 = (j0 + 1).min(ny - 1);
        Some(
            self.at(i0, j0) * (1.0 - wx) * (1.0 - wy)
                + self.at(i1, j0) * wx * (1.0 - wy)
                + self.at(i0, j1) * (1.0 - wx) * wy
                + self.at(i1, j1) * wx * wy,
        )
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// Sum over `y` for each `x` (length `nx`).
    pub fn marginal_x(&self) -> Vec<f64> {
        let nx = self.spec.nx();
        let mut out = vec![0.0; nx];
        for row in self.values.chunks(nx) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// Sum over `x` for each `y` (length `ny`).
    pub fn marginal_y(&self) -> Vec<f64> {
        self.values.chunks(self.spec.nx()).map(|row| row.iter().sum()).collect()
    }

    /// The grid with axes exchanged: `g(x, y) = f(y, x)`.
    pub fn transposed(&self) -> Self {
        let s = self.spec;
        let spec = GridSpec { x_min: s.y_min, x_max: s.y_max, y_min: s.x_min, y_max: s.x_max, step: s.step };
        let (nx, ny) = (s.nx(), s.ny());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..nx {
            for j in 0..ny {
                values.push(self.values[j * nx + i]);
            }
        }
        Self { spec, values, metadata: self.metadata.clone() }
    }

    pub fn to_text(&self, config_hash: Option<&str>) -> String {
        let s = &self.spec;
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "# x_min = {}", s.x_min).unwrap();
        writeln!(out, "# x_max = {}", s.x_max).unwrap();
        writeln!(out, "# y_min = {}", s.y_min).unwrap();
        writeln!(out, "# y_max = {}", s.y_max).unwrap();
        writeln!(out, "# step = {}", s.step).unwrap();
        writeln!(out, "# nx = {}", s.nx()).unwrap();
        writeln!(out, "# ny = {}", s.ny()).unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "# meta.{k} = {v}").unwrap();
        }
        if let Some(h) = config_hash {
            writeln!(out, "# config_hash = {h}").unwrap();
        }
        for row in self.values.chunks(s.nx()) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path, config_hash: Option<&str>) -> Result<()> {
        std::fs::write(path, self.to_text(config_hash)).map_err(|e| Error::io(path, e))
    }

    /// Parses the text format; returns the grid and its config hash, if any.
    pub fn parse(text: &str, origin: &str) -> Result<(Self, Option<String>)> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(err(1, "missing landscape header".into())),
        }
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut values = Vec::new();
        for (k, line) in lines {
            let line_no = k + 1;
            if let Some(rest) = line.strip_prefix('#') {
                let Some((key, value)) = rest.split_once('=') else {
                    return Err(err(line_no, format!("malformed header line {line:?}")));
                };
                header.insert(key.trim().to_string(), value.trim().to_string());
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| err(line_no, format!("bad value {tok:?}")))?;
                values.push(v);
            }
        }
        let num = |key: &str| -> Result<f64> {
            header
                .get(key)
                .ok_or_else(|| err(1, format!("missing header field {key}")))?
                .parse()
                .map_err(|_| err(1, format!("bad header field {key}")))
        };
        let spec = GridSpec {
            x_min: num("x_min")?,
            x_max: num("x_max")?,
            y_min: num("y_min")?,
            y_max: num("y_max")?,
            step: num("step")?,
        };
        let mut grid = Self::new(spec, values).map_err(|e| err(1, e.to_string()))?;
        for (k, v) in &header {
            if let Some(key) = k.strip_prefix("meta.") {
                grid.metadata.insert(key.to_string(), v.clone());
            }
        }
        Ok((grid, header.get("config_hash").cloned()))
    }

    pub fn read(path: &Path) -> Result<(Self, Option<String>)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!((g.nx(), g.ny()), (201, 201));
        assert_eq!(g.x(100), 0.0);
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(GridSpec { step: 0.0, ..GridSpec::default() }.validate().is_err());
        assert!(GridSpec { x_max: -100.0, ..GridSpec::default() }.validate().is_err());
        assert!(GridSpec { step: 0.7, ..GridSpec::default() }.validate().is_err());
    }

    #[test]
    fn interpolation_is_exact_for_bilinear_functions() {
        let g = LandscapeGrid::from_fn(GridSpec::square(5.0, 1.0), |x, y| 30.0 + x + 2.0 * y + 0.1 * x * y).unwrap();
        let v = g.interpolate(1.3, -2.6).unwrap();
        assert!((v - (30.0 + 1.3 - 5.2 + 0.1 * 1.3 * -2.6)).abs() < 1e-12);
        assert!(g.interpolate(5.5, 0.0).is_none());
        assert_eq!(g.interpolate(5.0, 5.0), Some(g.at(10, 10)));
    }

    #[test]
    fn transpose_swaps_axes() {
        let g = LandscapeGrid::from_fn(GridSpec { x_min: 0.0, x_max: 2.0, y_min: 0.0, y_max: 4.0, step: 1.0 }, |x, y| x + 10.0 * y).unwrap();
        let t = g.transposed();
        assert_eq!(t.spec().nx(), 5);
        assert_eq!(t.interpolate(3.0, 1.0), Some(1.0 + 30.0));
    }

    #[test]
    fn parse_errors_name_lines() {
        let g = LandscapeGrid::from_fn(GridSpec::square(1.0, 1.0), |x, y| x * x + y * y).unwrap();
        let mut text = g.to_text(Some("abc"));
        text = text.replacen("\n1 0 1\n", "\n1 zero 1\n", 1);
        match LandscapeGrid::parse(&text, "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 11),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn text_round_trip(vals in prop::collection::vec(0.0f64..1e6, 9), hash in "[0-9a-f]{8}") {
            let g = LandscapeGrid::new(GridSpec::square(1.0, 1.0), vals).unwrap().with_meta("phi", 0.5);
            let (back, h) = LandscapeGrid::parse(&g.to_text(Some(&hash)), "mem").unwrap();
            prop_assert_eq!(back, g);
            prop_assert_eq!(h, Some(hash));
        }
    }
}
