//! Clamped linear and bilinear lookup tables.
//!
//! Both table kinds clamp queries to the anchor range and report whether the
//! clamp was active so callers can keep diagnostic counters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    pub value: f64,
    pub clamped: bool,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Config(format!("table axis `{name}` is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("table axis `{name}` has non-finite anchors")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "table axis `{name}` must be strictly increasing"
        )));
    }
    Ok(())
}

/// Index of the lower anchor and interpolation weight for `x`.
fn locate(axis: &[f64], x: f64) -> (usize, f64, bool) {
    let n = axis.len();
    if n == 1 {
        return (0, 0.0, x != axis[0]);
    }
    if x <= axis[0] {
        return (0, 0.0, x < axis[0]);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0, x > axis[n - 1]);
    }
    // partition_point gives the first anchor > x
    let hi = axis.partition_point(|&a| a <= x);
    let lo = hi - 1;
    let w = (x - axis[lo]) / (axis[hi] - axis[lo]);
    (lo, w, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1D {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table1D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_axis("x", &xs)?;
        if xs.len() != ys.len() {
            return Err(Error::Config(format!(
                "table has {} anchors but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if ys.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("table has non-finite values".into()));
        }
        Ok(Self { xs, ys })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            xs: vec![0.0],
            ys: vec![value],
        }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn lookup(&self, x: f64) -> Lookup {
        let (i, w, clamped) = locate(&self.xs, x);
        let value = if self.xs.len() == 1 {
            self.ys[0]
        } else {
            self.ys[i] * (1.0 - w) + self.ys[i + 1] * w
        };
        Lookup { value, clamped }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.lookup(x).value
    }
}

/// Bilinear table over `(x, y)`; `values[i][j]` sits at `(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2D {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Table2D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        check_axis("x", &xs)?;
        check_axis("y", &ys)?;
        if values.len() != xs.len() || values.iter().any(|row| row.len() != ys.len()) {
            return Err(Error::Config(format!(
                "table values must be {}x{}",
                xs.len(),
                ys.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("table has non-finite values".into()));
        }
        Ok(Self { xs, ys, values })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            xs: vec![0.0],
            ys: vec![0.0],
            values: vec![vec![value]],
        }
    }

    /// Build from `(x, y, value)` triples that must cover the full grid.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        let mut xs: Vec<f64> = triples.iter().map(|t| t.0).collect();
        let mut ys: Vec<f64> = triples.iter().map(|t| t.1).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if xs.len() * ys.len() != triples.len() {
            return Err(Error::Config(format!(
                "table rows do not form a full grid ({} x {} anchors, {} rows)",
                xs.len(),
                ys.len(),
                triples.len()
            )));
        }
        let mut values = vec![vec![f64::NAN; ys.len()]; xs.len()];
        for &(x, y, v) in triples {
            let i = xs.iter().position(|&a| a == x).unwrap();
            let j = ys.iter().position(|&a| a == y).unwrap();
            if !values[i][j].is_nan() {
                return Err(Error::Config(format!("duplicate table row at ({x}, {y})")));
            }
            values[i][j] = v;
        }
        Self::new(xs, ys, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn lookup(&self, x: f64, y: f64) -> Lookup {
        let (i, wx, cx) = locate(&self.xs, x);
        let (j, wy, cy) = locate(&self.ys, y);
        let at = |a: usize, b: usize| self.values[a][b];
        let i1 = (i + 1).min(self.xs.len() - 1);
        let j1 = (j + 1).min(self.ys.len() - 1);
        let lo = at(i, j) * (1.0 - wy) + at(i, j1) * wy;
        let hi = at(i1, j) * (1.0 - wy) + at(i1, j1) * wy;
        Lookup {
            value: lo * (1.0 - wx) + hi * wx,
            clamped: cx || cy,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.lookup(x, y).value
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_interpolates_and_clamps() {
        let t = Table1D::new(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert_eq!(t.eval(0.5), 2.0);
        assert_eq!(t.eval(2.0), 5.0);
        assert_eq!(t.lookup(-1.0), Lookup { value: 1.0, clamped: true });
        assert_eq!(t.lookup(4.0), Lookup { value: 7.0, clamped: true });
        assert_eq!(t.lookup(3.0), Lookup { value: 7.0, clamped: false });
    }

    #[test]
    fn two_d_hits_anchors_exactly() {
        let t = Table2D::new(
            vec![0.0, 10.0],
            vec![0.0, 1.0, 2.0],
            vec![vec![1.0, 2.0, 3.0], vec![11.0, 12.0, 13.0]],
        )
        .unwrap();
        assert_eq!(t.eval(10.0, 1.0), 12.0);
        assert_eq!(t.eval(5.0, 0.5), 6.5);
        assert!(t.lookup(20.0, 1.0).clamped);
    }

    #[test]
    fn triples_must_cover_grid() {
        let ok = Table2D::from_triples(&[
            (0.0, 0.0, 1.0),
            (0.0, 1.0, 2.0),
            (1.0, 0.0, 3.0),
            (1.0, 1.0, 4.0),
        ])
        .unwrap();
        assert_eq!(ok.eval(1.0, 0.0), 3.0);
        assert!(Table2D::from_triples(&[(0.0, 0.0, 1.0), (1.0, 1.0, 2.0)]).is_err());
    }

    #[test]
    fn rejects_unsorted_axis() {
        assert!(Table1D::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }
}
