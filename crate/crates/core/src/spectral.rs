//! Edge transition matrix and its exact Perron certificate.
//!
//! The eigenvalue is never computed: a strictly positive vector in the
//! nullspace of `A − d·I` certifies by Perron–Frobenius that `d` is the
//! spectral radius of `A`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::{check_markers, MapSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    /// `entries[i][j]` counts 1-edges over `E_j` in the deformation of `E_i`;
    /// rows and columns follow `edges0`.
    pub entries: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.size())
            .map(|j| self.entries.iter().map(|row| row[j]).sum())
            .collect()
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (&a, x)| acc + BigInt::from(a) * x)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthVector {
    /// primitive positive integer eigenvector, indexed like `edges0`
    pub eigenvector: Vec<BigInt>,
    /// `eigenvector / Σ eigenvector`
    pub lengths: Vec<BigRational>,
}

/// For each word0 position `i`, the word1 positions the edge `word0[i]` is
/// deformed into: from `markers[i-1]` (exclusive) to `markers[i]` (inclusive).
pub fn deformation_words(spec: &MapSpec) -> Result<Vec<Vec<usize>>> {
    check_markers(spec)?;
    let n = spec.word1.len();
    let k = spec.k();
    Ok((0..k)
        .map(|i| {
            let start = spec.markers[(i + k - 1) % k];
            let end = spec.markers[i];
            let steps = (end + n - start) % n;
            let steps = if steps == 0 { n } else { steps };
            (1..=steps).map(|s| (start + s) % n).collect()
        })
        .collect())
}

pub fn transition_matrix(spec: &MapSpec) -> Result<TransitionMatrix> {
    let k = spec.k();
    let mut entries = vec![vec![0u64; k]; k];
    for (i, word) in deformation_words(spec)?.iter().enumerate() {
        let row = spec.word0[i].edge;
        for &j in word {
            entries[row][spec.word1[j].image_edge] += 1;
        }
    }
    Ok(TransitionMatrix { entries })
}

/// Fraction-free (Bareiss) row reduction; returns pivot columns.
fn bareiss_echelon(m: &mut [Vec<BigInt>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let value = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                // exact by Sylvester's identity
                m[i][j] = value / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Integer basis of the rational nullspace of `m`, each vector primitive.
pub fn integer_nullspace(matrix: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m = matrix.to_vec();
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let pivots = bareiss_echelon(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut acc = BigRational::zero();
                for j in pc + 1..cols {
                    if !m[r][j].is_zero() {
                        acc += BigRational::from_integer(m[r][j].clone()) * &x[j];
                    }
                }
                x[pc] = -acc / BigRational::from_integer(m[r][pc].clone());
            }
            let scale = x.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            let ints: Vec<BigInt> = x.iter().map(|q| (q * BigRational::from_integer(scale.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            ints.into_iter().map(|v| v / &g).collect()
        })
        .collect()
}

/// Certifies that `degree` is the Perron eigenvalue of `a` and returns the
/// normalized positive eigenvector.
pub fn certify_perron(a: &TransitionMatrix, degree: u32) -> Result<LengthVector> {
    let k = a.size();
    let d = BigInt::from(degree);
    let shifted: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let x = BigInt::from(a.entries[i][j]);
                    if i == j {
                        x - &d
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut basis = integer_nullspace(&shifted);
    match basis.len() {
        0 => return Err(Error::NotEigenvalue(degree)),
        1 => {}
        n => {
            return Err(Error::PerronFailed(format!(
                "eigenspace of {degree} has dimension {n}"
            )))
        }
    }
    let mut v = basis.pop().expect("one basis vector");
    if v.iter().all(|x| !x.is_positive()) {
        v = v.into_iter().map(|x| -x).collect();
    }
    if !v.iter().all(|x| x.is_positive()) {
        return Err(Error::PerronFailed("no strictly positive eigenvector".into()));
    }
    debug_assert_eq!(a.apply(&v), v.iter().map(|x| x * &d).collect::<Vec<_>>());
    let total: BigInt = v.iter().sum();
    let lengths = v
        .iter()
        .map(|x| BigRational::new(x.clone(), total.clone()))
        .collect();
    Ok(LengthVector { eigenvector: v, lengths })
}

/// Interval lengths in marker order: entry `i` is the length of the interval
/// ending at marker `i`, i.e. of the edge `word0[i]`.
pub fn interval_lengths(spec: &MapSpec, lengths: &LengthVector) -> Vec<BigRational> {
    spec.word0.iter().map(|w| lengths.lengths[w.edge].clone()).collect()
}
