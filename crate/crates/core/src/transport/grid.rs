//! Modal DG representation of a moment field on the periodic unit interval,
//! and its CSV checkpoint format.
//!
//! Checkpoint layout: metadata lines `# key=value` (`n_cells`, `dg_degree`,
//! `n_moments`, `time`, plus free-form extras), then a CSV table with header
//! `cell,mode,component,value` and one row per modal coefficient. Values are
//! written in shortest round-trip form so a checkpoint reloads bit-exactly.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::basis::legendre_values_into;
use crate::error::{Error, Result};
use crate::kernel::MomentVector;

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    n_cells: usize,
    degree: usize,
    n_moments: usize,
    /// `[cell][mode][component]`, row-major.
    coeffs: Vec<f64>,
    pub time: f64,
}

impl GridState {
    pub fn zeros(n_cells: usize, degree: usize, n_moments: usize) -> Self {
        Self {
            n_cells,
            degree,
            n_moments,
            coeffs: vec![0.0; n_cells * (degree + 1) * n_moments],
            time: 0.0,
        }
    }

    /// Every cell holds the constant state `u`.
    pub fn constant(n_cells: usize, degree: usize, u: &MomentVector) -> Self {
        let mut s = Self::zeros(n_cells, degree, u.len());
        for c in 0..n_cells {
            for m in 0..u.len() {
                s.set(c, 0, m, u[m]);
            }
        }
        s
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn n_moments(&self) -> usize {
        self.n_moments
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficients of one cell, `[mode][component]`.
    pub fn cell(&self, cell: usize) -> &[f64] {
        let len = self.n_modes() * self.n_moments;
        &self.coeffs[cell * len..(cell + 1) * len]
    }

    #[inline]
    fn index(&self, cell: usize, mode: usize, comp: usize) -> usize {
        (cell * self.n_modes() + mode) * self.n_moments + comp
    }

    pub fn get(&self, cell: usize, mode: usize, comp: usize) -> f64 {
        self.coeffs[self.index(cell, mode, comp)]
    }

    pub fn set(&mut self, cell: usize, mode: usize, comp: usize, value: f64) {
        let i = self.index(cell, mode, comp);
        self.coeffs[i] = value;
    }

    /// Same layout (cells, degree, moments).
    pub fn same_shape(&self, other: &GridState) -> bool {
        self.n_cells == other.n_cells
            && self.degree == other.degree
            && self.n_moments == other.n_moments
    }

    /// Moment vector in `cell` at reference coordinate `xi` in `[-1, 1]`.
    pub fn eval(&self, cell: usize, xi: f64) -> MomentVector {
        let mut p = vec![0.0; self.n_modes()];
        legendre_values_into(xi, &mut p);
        self.eval_with_modes(cell, &p)
    }

    /// Moment vector in `cell` given `P_j(xi)` for all modes.
    pub fn eval_with_modes(&self, cell: usize, modes: &[f64]) -> MomentVector {
        let data = self.cell(cell);
        let mut u = MomentVector::zeros(self.n_moments);
        for (j, pj) in modes.iter().enumerate() {
            let row = &data[j * self.n_moments..(j + 1) * self.n_moments];
            for (m, c) in row.iter().enumerate() {
                u[m] += pj * c;
            }
        }
        u
    }

    /// Locates `x` in `[0, 1)` (periodically wrapped): `(cell, xi)`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let x = x.rem_euclid(1.0);
        let scaled = x * self.n_cells as f64;
        let cell = (scaled.floor() as usize).min(self.n_cells - 1);
        let xi = 2.0 * (scaled - cell as f64) - 1.0;
        (cell, xi.clamp(-1.0, 1.0))
    }

    pub fn eval_at(&self, x: f64) -> MomentVector {
        let (cell, xi) = self.locate(x);
        self.eval(cell, xi)
    }

    /// `int_0^1 u_0 dx`.
    pub fn total_mass(&self) -> f64 {
        let h = self.cell_width();
        (0..self.n_cells).map(|c| h * self.get(c, 0, 0)).sum()
    }

    /// `self + s * other` (time of `self`).
    pub fn axpy(&self, s: f64, other: &GridState) -> GridState {
        debug_assert!(self.same_shape(other));
        let mut out = self.clone();
        for (o, x) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += s * x;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &GridState) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_checkpoint(&self, path: &Path, extra: &[(&str, String)]) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_checkpoint_to(&mut file, extra)
    }

    pub fn write_checkpoint_to<W: Write>(&self, mut out: W, extra: &[(&str, String)]) -> Result<()> {
        writeln!(out, "# n_cells={}", self.n_cells)?;
        writeln!(out, "# dg_degree={}", self.degree)?;
        writeln!(out, "# n_moments={}", self.n_moments)?;
        writeln!(out, "# time={:e}", self.time)?;
        for (k, v) in extra {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cell", "mode", "component", "value"])?;
        for c in 0..self.n_cells {
            for j in 0..self.n_modes() {
                for m in 0..self.n_moments {
                    w.write_record([
                        c.to_string(),
                        j.to_string(),
                        m.to_string(),
                        format!("{:e}", self.get(c, j, m)),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path) -> Result<(GridState, BTreeMap<String, String>)> {
        Self::read_checkpoint_from(std::fs::File::open(path)?)
    }

    pub fn read_checkpoint_from<R: Read>(input: R) -> Result<(GridState, BTreeMap<String, String>)> {
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        for line in BufReader::new(input).lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let field = |k: &str| -> Result<usize> {
            meta.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Io(format!("checkpoint is missing '{k}'")))
        };
        let mut state = GridState::zeros(field("n_cells")?, field("dg_degree")?, field("n_moments")?);
        state.time = meta
            .get("time")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Io("checkpoint is missing 'time'".into()))?;
        let mut seen = 0;
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        for row in rdr.records() {
            let row = row?;
            let parse_idx = |i: usize| -> Result<usize> {
                row.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Io(format!("bad checkpoint row {row:?}")))
            };
            let (c, j, m) = (parse_idx(0)?, parse_idx(1)?, parse_idx(2)?);
            if c >= state.n_cells || j >= state.n_modes() || m >= state.n_moments {
                return Err(Error::Io(format!("checkpoint index out of range in {row:?}")));
            }
            let v: f64 = row
                .get(3)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Io(format!("bad checkpoint value in {row:?}")))?;
            state.set(c, j, m, v);
            seen += 1;
        }
        if seen != state.coeffs.len() {
            return Err(Error::Io(format!(
                "checkpoint holds {seen} coefficients, expected {}",
                state.coeffs.len()
            )));
        }
        Ok((state, meta))
    }
}
