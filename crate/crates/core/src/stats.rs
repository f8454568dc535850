//! Distance correlation between scenario inputs and outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Cat(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Numeric(Vec<f64>),
    /// compared with the discrete metric
    Categorical(Vec<String>),
}

impl Column {
    pub fn from_values(values: Vec<Value>) -> Result<Self> {
        if values.iter().all(|v| matches!(v, Value::Num(_))) {
            Ok(Column::Numeric(values.into_iter().map(|v| if let Value::Num(x) = v { x } else { unreachable!() }).collect()))
        } else if values.iter().all(|v| matches!(v, Value::Cat(_))) {
            Ok(Column::Categorical(values.into_iter().map(|v| if let Value::Cat(s) = v { s } else { unreachable!() }).collect()))
        } else {
            Err(Error::Type("column mixes numeric and categorical values".into()))
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn distance_matrix(column: &Column) -> Result<Matrix> {
    let n = column.len();
    if n < 2 {
        return Err(Error::Shape(format!("distance matrix needs at least 2 observations, got {n}")));
    }
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.data[i * n + j] = match column {
                Column::Numeric(x) => (x[i] - x[j]).abs(),
                Column::Categorical(x) => f64::from(u8::from(x[i] != x[j])),
            };
        }
    }
    Ok(m)
}

pub fn double_center(d: &Matrix) -> Matrix {
    let n = d.n;
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).iter().sum::<f64>() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| (0..n).map(|i| d.get(i, j)).sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut a = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.data[i * n + j] = d.get(i, j) - row_means[i] - col_means[j] + grand;
        }
    }
    a
}

/// Squared distance covariance, biased estimator.
fn dcov2(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.n as f64;
    let s: f64 = a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum();
    (s / (n * n)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dcor {
    pub rho: f64,
    /// one of the columns has zero distance variance
    pub degenerate: bool,
}

pub fn dcorr(x: &Column, y: &Column) -> Result<Dcor> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("columns have {} and {} observations", x.len(), y.len())));
    }
    let a = double_center(&distance_matrix(x)?);
    let b = double_center(&distance_matrix(y)?);
    Ok(correlate(&a, &b))
}

fn correlate(a: &Matrix, b: &Matrix) -> Dcor {
    let vx = dcov2(a, a);
    let vy = dcov2(b, b);
    // relative floor so round-off on a constant column does not count as variance
    let scale = |m: &Matrix| m.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    if vx.sqrt() <= 1e-12 * scale(a) || vy.sqrt() <= 1e-12 * scale(b) {
        return Dcor { rho: 0.0, degenerate: true };
    }
    let rho = (dcov2(a, b) / (vx * vy).sqrt()).sqrt().clamp(0.0, 1.0);
    Dcor { rho, degenerate: false }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservationMatrix {
    pub n: usize,
    pub columns: BTreeMap<String, Column>,
}

impl ObservationMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, columns: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if column.len() != self.n {
            return Err(Error::Shape(format!("column `{name}` has {} values, expected {}", column.len(), self.n)));
        }
        self.columns.insert(name, column);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns.get(name).ok_or_else(|| Error::Lookup(format!("no column named `{name}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityEntry {
    pub input: String,
    pub outcome: String,
    pub rho: f64,
    pub degenerate: bool,
}

/// dcorr for every (input, outcome) pair, in the order given.
pub fn sensitivity_report(matrix: &ObservationMatrix, inputs: &[&str], outcomes: &[&str]) -> Result<Vec<SensitivityEntry>> {
    if matrix.n < 2 {
        return Err(Error::Shape(format!("sensitivity needs at least 2 observations, got {}", matrix.n)));
    }
    let centered = |name: &str| -> Result<Matrix> { Ok(double_center(&distance_matrix(matrix.column(name)?)?)) };
    let ins: Vec<(&str, Matrix)> = inputs.iter().map(|&n| Ok((n, centered(n)?))).collect::<Result<_>>()?;
    let outs: Vec<(&str, Matrix)> = outcomes.iter().map(|&n| Ok((n, centered(n)?))).collect::<Result<_>>()?;
    let mut table = Vec::with_capacity(ins.len() * outs.len());
    for (iname, a) in &ins {
        for (oname, b) in &outs {
            let Dcor { rho, degenerate } = correlate(a, b);
            table.push(SensitivityEntry {
                input: iname.to_string(),
                outcome: oname.to_string(),
                rho,
                degenerate,
            });
        }
    }
    Ok(table)
}
