use std::fmt::{Display, Write as _};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-stochastic matrix with exact integer numerators over one common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix<S> {
    states: Vec<S>,
    numer: Vec<i64>,
    denom: i64,
}

#[derive(Serialize, Deserialize)]
struct ExactJson<S> {
    states: Vec<S>,
    denominator: i64,
    numerators: Vec<Vec<i64>>,
}

impl<S> TransitionMatrix<S> {
    /// Validates shape, non-negativity and that every row sums to `denom`.
    pub fn new(states: Vec<S>, numer: Vec<i64>, denom: i64) -> Result<Self> {
        let n = states.len();
        if numer.len() != n * n {
            return Err(Error::Transition(format!("{} entries for {n} states", numer.len())));
        }
        if denom <= 0 {
            return Err(Error::Transition(format!("denominator {denom}")));
        }
        if let Some(pos) = numer.iter().position(|&x| x < 0) {
            return Err(Error::Transition(format!("negative entry at ({}, {})", pos / n, pos % n)));
        }
        for (i, row) in numer.chunks(n.max(1)).enumerate().take(n) {
            let s: i64 = row.iter().sum();
            if s != denom {
                return Err(Error::Transition(format!("row {i} sums to {s}/{denom}")));
            }
        }
        Ok(TransitionMatrix { states, numer, denom })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn denominator(&self) -> i64 {
        self.denom
    }

    pub fn numerator(&self, i: usize, j: usize) -> i64 {
        self.numer[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let n = self.len();
        &self.numer[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.numerator(i, j) as f64 / self.denom as f64
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Same states and equal entries as rationals, whatever the denominators.
    pub fn rational_eq(&self, other: &TransitionMatrix<S>) -> bool
    where
        S: PartialEq,
    {
        self.states == other.states
            && self.numer.iter().zip(&other.numer).all(|(&a, &b)| i128::from(a) * i128::from(other.denom) == i128::from(b) * i128::from(self.denom))
    }

    /// Re-expresses the entries over `denom`, which must be a multiple of the current one.
    pub fn with_denominator(&self, denom: i64) -> Result<Self>
    where
        S: Clone,
    {
        if denom % self.denom != 0 {
            return Err(Error::Transition(format!("{denom} is not a multiple of {}", self.denom)));
        }
        let k = denom / self.denom;
        Ok(TransitionMatrix { states: self.states.clone(), numer: self.numer.iter().map(|x| x * k).collect(), denom })
    }

    /// Exact left-eigenvector test `v Q = (λ_numer / denom) v`.
    pub fn is_left_eigenvector(&self, v: &[i64], lambda_numer: i64) -> bool {
        let n = self.len();
        v.len() == n
            && (0..n).all(|j| {
                let lhs: i128 = (0..n).map(|i| i128::from(v[i]) * i128::from(self.numerator(i, j))).sum();
                lhs == i128::from(lambda_numer) * i128::from(v[j])
            })
    }

    /// Column sums all equal the denominator, so the uniform vector is stationary.
    pub fn is_doubly_stochastic(&self) -> bool {
        let n = self.len();
        (0..n).all(|j| (0..n).map(|i| self.numerator(i, j)).sum::<i64>() == self.denom)
    }

    /// Floating view as CSV: a header of state labels, then one row per state.
    pub fn to_csv(&self) -> String
    where
        S: Display,
    {
        let mut s = String::from("state");
        for st in &self.states {
            let _ = write!(s, ",{st}");
        }
        s.push('\n');
        for (i, st) in self.states.iter().enumerate() {
            let _ = write!(s, "{st}");
            for j in 0..self.len() {
                let _ = write!(s, ",{}", self.get(i, j));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String
    where
        S: Serialize + Clone,
    {
        let n = self.len();
        let doc = ExactJson {
            states: self.states.clone(),
            denominator: self.denom,
            numerators: (0..n).map(|i| self.row(i).to_vec()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        S: DeserializeOwned,
    {
        let doc: ExactJson<S> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let numer = doc.numerators.into_iter().flatten().collect();
        TransitionMatrix::new(doc.states, numer, doc.denominator)
    }
}
