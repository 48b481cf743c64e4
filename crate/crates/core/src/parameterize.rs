//! Exact circle parameters for the γ⁰ markers and their pullback to γ¹.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::circle::{arc_sum, q_apply, q_preimages, Angle};
use crate::complex::MapSpec;
use crate::error::{Error, Result};

/// Parameters `t[i]` of the γ⁰ markers, in word0 order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkerParameters {
    pub t: Vec<Angle>,
    /// `image[i]` is the marker of the f-image of the point at marker `i`
    pub image: Vec<usize>,
    pub branch: u32,
}

impl MarkerParameters {
    /// Gap from the previous marker to marker `i`.
    pub fn intervals(&self) -> Vec<BigRational> {
        let k = self.t.len();
        (0..k)
            .map(|i| {
                let gap = self.t[(i + k - 1) % k].gap_to(&self.t[i]);
                if gap.is_zero() {
                    BigRational::one()
                } else {
                    gap
                }
            })
            .collect()
    }
}

/// Parameters `s[j]` of every γ¹ word position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackParameters {
    pub s: Vec<Angle>,
}

/// Word1 position `j` lies over word0 position `j mod k`, so the image of the
/// post point at marker `i` is the word0 visit under `markers[i]`.
pub fn marker_images(spec: &MapSpec) -> Vec<usize> {
    let k = spec.k();
    spec.markers.iter().map(|m| m % k).collect()
}

/// Solves `q_d(t) = t + L` at `base` and propagates around the circle.
///
/// `intervals[i]` is the length of the interval ending at marker `i`.
pub fn solve_parameters(
    intervals: &[BigRational],
    image: &[usize],
    degree: u32,
    base: usize,
    branch: u32,
) -> Result<MarkerParameters> {
    let k = intervals.len();
    if branch + 1 >= degree {
        return Err(Error::BranchOutOfRange { branch, bound: degree - 1 });
    }
    if image.len() != k {
        return Err(Error::IndexOutOfRange { index: image.len(), len: k });
    }
    let target = *image.get(base).ok_or(Error::IndexOutOfRange { index: base, len: k })?;
    let span = arc_sum(intervals, base, target)?;
    let d1 = BigInt::from(degree - 1);
    let anchor = Angle::from_rational((span + BigInt::from(branch)) / d1);

    let mut t = vec![Angle::zero(); k];
    t[base] = anchor;
    for step in 1..k {
        let i = (base + step) % k;
        let prev = (i + k - 1) % k;
        t[i] = t[prev].shifted(&intervals[i]);
    }
    for i in 0..k {
        if image[i] >= k {
            return Err(Error::IndexOutOfRange { index: image[i], len: k });
        }
        if q_apply(&t[i], degree) != t[image[i]] {
            return Err(Error::ParameterizationInconsistent(format!(
                "q_{degree}({}) = {} but the image marker {} has parameter {}",
                t[i],
                q_apply(&t[i], degree),
                image[i],
                t[image[i]]
            )));
        }
    }
    Ok(MarkerParameters { t, image: image.to_vec(), branch })
}

/// Lifts the marker parameters to γ¹: consecutive word1 positions are `1/d`
/// of the corresponding γ⁰ interval apart, and `s[markers[i]] = t[i]`.
pub fn pullback_parameters(params: &MarkerParameters, spec: &MapSpec) -> Result<PullbackParameters> {
    let k = spec.k();
    let intervals = params.intervals();
    let n = spec.word1.len();
    let d = BigInt::from(spec.degree);
    // offset of markers[0] from position 0 along γ¹
    let lead = (1..=spec.markers[0]).fold(BigRational::zero(), |acc, j| acc + &intervals[j % k] / &d);
    let start = q_preimages(&params.t[0], spec.degree)
        .into_iter()
        .find(|c| c.shifted(&lead) == params.t[0])
        .ok_or_else(|| {
            Error::ParameterizationInconsistent(format!(
                "no preimage of {} reaches it after the lead-in before the first marker",
                params.t[0]
            ))
        })?;
    let mut s = Vec::with_capacity(n);
    s.push(start);
    for j in 1..n {
        let next = s[j - 1].shifted(&(&intervals[j % k] / &d));
        s.push(next);
    }
    for (i, &m) in spec.markers.iter().enumerate() {
        if s[m] != params.t[i] {
            return Err(Error::ParameterizationInconsistent(format!(
                "γ¹ position {m} has parameter {} but marker {i} has {}",
                s[m], params.t[i]
            )));
        }
    }
    for (j, x) in s.iter().enumerate() {
        if q_apply(x, spec.degree) != params.t[j % k] {
            return Err(Error::ParameterizationInconsistent(format!(
                "γ¹ position {j} does not lie over its γ⁰ marker"
            )));
        }
    }
    Ok(PullbackParameters { s })
}
