//! Exact arithmetic on the circle ℝ/ℤ and the dynamics of `t ↦ d·t`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of ℝ/ℤ, stored as a reduced rational in `[0, 1)` (units: turns).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(BigRational);

impl Angle {
    pub fn new(numer: i64, denom: i64) -> Angle {
        assert!(denom != 0, "zero denominator");
        Angle::from_rational(BigRational::new(numer.into(), denom.into()))
    }

    /// Reduces an arbitrary rational mod 1.
    pub fn from_rational(value: BigRational) -> Angle {
        let floor = value.floor();
        Angle(value - floor)
    }

    pub fn zero() -> Angle {
        Angle(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `self + delta mod 1`.
    pub fn shifted(&self, delta: &BigRational) -> Angle {
        Angle::from_rational(&self.0 + delta)
    }

    /// Length of the positive arc from `self` to `other`, in `[0, 1)`.
    pub fn gap_to(&self, other: &Angle) -> BigRational {
        let diff = &other.0 - &self.0;
        if diff.is_negative() {
            diff + BigRational::one()
        } else {
            diff
        }
    }

    pub fn q_apply(&self, degree: u32) -> Angle {
        q_apply(self, degree)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ratio_string(&self.0))
    }
}

/// Formats any rational as `p/q` in lowest terms, integers included.
pub fn ratio_string(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q` or a bare integer into a rational.
pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => BigInt::from_str(text).ok().map(BigRational::from_integer),
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(text: &str) -> Result<Angle> {
        parse_ratio(text)
            .map(Angle::from_rational)
            .ok_or_else(|| Error::Structure(format!("not a rational angle: {text:?}")))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Angle, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A chord `{s, t}` of the unit disk; endpoints stored in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Leaf {
    low: Angle,
    high: Angle,
}

impl Leaf {
    /// `None` when the endpoints coincide.
    pub fn new(a: Angle, b: Angle) -> Option<Leaf> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Leaf { low: a, high: b }),
            std::cmp::Ordering::Greater => Some(Leaf { low: b, high: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn endpoints(&self) -> (&Angle, &Angle) {
        (&self.low, &self.high)
    }

    fn strictly_inside(&self, x: &Angle) -> bool {
        &self.low < x && x < &self.high
    }
}

/// Preperiod and period of an angle under `q_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitSignature {
    pub preperiod: usize,
    pub period: usize,
}

impl OrbitSignature {
    pub fn is_periodic(&self) -> bool {
        self.preperiod == 0
    }
}

/// The map `t ↦ d·t mod 1`.
pub fn q_apply(t: &Angle, degree: u32) -> Angle {
    assert!(degree >= 2, "degree must be at least 2");
    Angle::from_rational(&t.0 * BigInt::from(degree))
}

pub fn q_iterate(t: &Angle, degree: u32, steps: usize) -> Angle {
    (0..steps).fold(t.clone(), |acc, _| q_apply(&acc, degree))
}

/// The `d` preimages `(t + m)/d`, `m = 0..d-1`, in increasing order.
pub fn q_preimages(t: &Angle, degree: u32) -> Vec<Angle> {
    assert!(degree >= 2, "degree must be at least 2");
    let d = BigInt::from(degree);
    (0..degree)
        .map(|m| Angle(( &t.0 + BigInt::from(m)) / &d))
        .collect()
}

pub fn orbit_signature(t: &Angle, degree: u32) -> OrbitSignature {
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut current = t.clone();
    let mut step = 0;
    loop {
        if let Some(&first) = seen.get(&current) {
            return OrbitSignature {
                preperiod: first,
                period: step - first,
            };
        }
        seen.insert(current.clone(), step);
        current = q_apply(&current, degree);
        step += 1;
    }
}

/// Chords cross in the open disk. Shared endpoints never count as linked.
pub fn is_linked(a: &Leaf, b: &Leaf) -> bool {
    let (u, v) = b.endpoints();
    if a.low == *u || a.low == *v || a.high == *u || a.high == *v {
        return false;
    }
    a.strictly_inside(u) != a.strictly_inside(v)
}

/// Whether the convex hulls of two finite angle sets cross.
///
/// Shared angles are ignored; the hulls are unlinked exactly when every other
/// point of `b` lies in a single complementary arc of `a`.
pub fn hulls_linked(a: &[Angle], b: &[Angle]) -> bool {
    let mut sorted: Vec<&Angle> = a.iter().collect();
    sorted.sort();
    sorted.dedup();
    if sorted.len() < 2 {
        return false;
    }
    let mut arc: Option<usize> = None;
    for x in b {
        if sorted.binary_search(&x).is_ok() {
            continue;
        }
        // index of the arc (a_{i-1}, a_i) containing x, with wraparound as arc 0
        let index = sorted.partition_point(|y| *y < x) % sorted.len();
        match arc {
            None => arc = Some(index),
            Some(seen) if seen != index => return true,
            _ => {}
        }
    }
    false
}

/// Sum of interval lengths traversed from marker `from` to marker `to` in the
/// positive direction. `lengths[i]` is the interval ending at marker `i`.
pub fn arc_sum(lengths: &[BigRational], from: usize, to: usize) -> Result<BigRational> {
    let len = lengths.len();
    for index in [from, to] {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
    }
    let steps = (to + len - from) % len;
    Ok((1..=steps)
        .map(|offset| lengths[(from + offset) % len].clone())
        .fold(BigRational::zero(), |acc, x| acc + x))
}

/// Least common multiple helper used for orbit horizons.
pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(p: i64, q: i64) -> Angle {
        Angle::new(p, q)
    }

    fn leaf(x: Angle, y: Angle) -> Leaf {
        Leaf::new(x, y).unwrap()
    }

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn paper_intervals() -> Vec<BigRational> {
        // interval lengths ending at each marker, markers in word0 order from p2
        vec![ratio(1, 4), ratio(1, 12), ratio(1, 6), ratio(1, 12), ratio(1, 4), ratio(1, 6)]
    }

    #[test]
    fn q_apply_examples() {
        assert_eq!(q_apply(&a(5, 24), 2), a(5, 12));
        assert_eq!(q_apply(&Angle::zero(), 7), Angle::zero());
        assert_eq!(q_apply(&a(2, 3), 2), a(1, 3));
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(q_preimages(&a(5, 12), 2), vec![a(5, 24), a(17, 24)]);
        assert_eq!(q_preimages(&a(1, 12), 2), vec![a(1, 24), a(13, 24)]);
        assert_eq!(q_preimages(&Angle::zero(), 3), vec![a(0, 1), a(1, 3), a(2, 3)]);
    }

    #[test]
    fn orbit_signature_examples() {
        let sig = orbit_signature(&a(5, 24), 2);
        assert_eq!((sig.preperiod, sig.period), (3, 2));
        let sig = orbit_signature(&Angle::zero(), 2);
        assert_eq!((sig.preperiod, sig.period), (0, 1));
        let sig = orbit_signature(&a(1, 7), 2);
        assert_eq!((sig.preperiod, sig.period), (0, 3));
        assert!(sig.is_periodic());
    }

    #[test]
    fn linking_examples() {
        assert!(is_linked(&leaf(a(1, 24), a(13, 24)), &leaf(a(5, 24), a(17, 24))));
        assert!(!is_linked(&leaf(a(5, 24), a(17, 24)), &leaf(a(1, 3), a(2, 3))));
        assert!(!is_linked(&leaf(a(0, 1), a(1, 2)), &leaf(a(0, 1), a(1, 4))));
    }

    #[test]
    fn arc_sum_examples() {
        let lengths = paper_intervals();
        // p2 marker is 0, p1 marker is 3
        assert_eq!(arc_sum(&lengths, 0, 3).unwrap(), ratio(1, 3));
        assert_eq!(arc_sum(&lengths, 4, 4).unwrap(), BigRational::zero());
        let full = arc_sum(&lengths, 2, 5).unwrap() + arc_sum(&lengths, 5, 2).unwrap();
        assert_eq!(full, BigRational::one());
        assert!(matches!(
            arc_sum(&lengths, 0, 6),
            Err(Error::IndexOutOfRange { index: 6, len: 6 })
        ));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(a(17, 24).to_string(), "17/24");
        assert_eq!(Angle::zero().to_string(), "0/1");
        assert_eq!("-1/3".parse::<Angle>().unwrap(), a(2, 3));
        assert_eq!("5/4".parse::<Angle>().unwrap(), a(1, 4));
        assert!("1/0".parse::<Angle>().is_err());
        assert!("x".parse::<Angle>().is_err());
    }

    #[test]
    fn hull_linking() {
        let white = [a(5, 24), a(17, 24)];
        let black = [a(1, 24), a(13, 24)];
        assert!(hulls_linked(&white, &black));
        let tri = [a(0, 1), a(1, 3), a(2, 3)];
        assert!(!hulls_linked(&tri, &[a(1, 12), a(1, 6)]));
        assert!(hulls_linked(&tri, &[a(1, 6), a(1, 2)]));
        assert!(!hulls_linked(&tri, &[a(0, 1), a(1, 6)]));
    }

    /// Walks the endpoints in circular order and tests alternation.
    fn brute_force_linked(x: &Leaf, y: &Leaf) -> bool {
        let mut points: Vec<(Angle, u8)> = vec![
            (x.low.clone(), 0),
            (x.high.clone(), 0),
            (y.low.clone(), 1),
            (y.high.clone(), 1),
        ];
        points.sort();
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return false;
            }
        }
        let tags: Vec<u8> = points.iter().map(|p| p.1).collect();
        tags == [0, 1, 0, 1] || tags == [1, 0, 1, 0]
    }

    fn arb_angle() -> impl Strategy<Value = Angle> {
        (0i64..200, 1i64..60).prop_map(|(p, q)| Angle::new(p, q))
    }

    proptest! {
        #[test]
        fn preimages_map_back(t in arb_angle(), d in 2u32..6) {
            let pre = q_preimages(&t, d);
            prop_assert_eq!(pre.len(), d as usize);
            for w in pre.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for p in &pre {
                prop_assert_eq!(q_apply(p, d), t.clone());
            }
        }

        #[test]
        fn orbit_signature_is_a_cycle(t in arb_angle(), d in 2u32..5) {
            let sig = orbit_signature(&t, d);
            prop_assert!(sig.period >= 1);
            prop_assert_eq!(
                q_iterate(&t, d, sig.preperiod + sig.period),
                q_iterate(&t, d, sig.preperiod)
            );
            if sig.preperiod > 0 {
                // entering the cycle any earlier would contradict minimality
                prop_assert_ne!(
                    q_iterate(&t, d, sig.preperiod - 1 + sig.period),
                    q_iterate(&t, d, sig.preperiod - 1)
                );
            }
        }

        #[test]
        fn linking_matches_brute_force(
            p in arb_angle(), q in arb_angle(), r in arb_angle(), s in arb_angle()
        ) {
            prop_assume!(p != q && r != s);
            let x = leaf(p, q);
            let y = leaf(r, s);
            prop_assert_eq!(is_linked(&x, &y), is_linked(&y, &x));
            prop_assert!(!is_linked(&x, &x));
            prop_assert_eq!(is_linked(&x, &y), brute_force_linked(&x, &y));
            let (xl, xh) = x.endpoints();
            let (yl, yh) = y.endpoints();
            prop_assert_eq!(
                hulls_linked(&[xl.clone(), xh.clone()], &[yl.clone(), yh.clone()]),
                brute_force_linked(&x, &y)
            );
        }
    }
}
