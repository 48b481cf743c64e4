//! Critical portraits: the marking procedure, sectors, itineraries and the
//! preperiodic Poirier conditions.
//!
//! Only portraits without periodic critical points are supported, so the
//! periodic family is empty and the conditions that mention it hold vacuously.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::circle::{hulls_linked, lcm, orbit_signature, q_apply, q_preimages, Angle};
use crate::complex::{Color, CriticalVertex, MapSpec, Side};
use crate::error::{Error, Result};
use crate::parameterize::PullbackParameters;

/// Angles sharing one image under `q_d`, with the representative reached by
/// forward orbits of other sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreargumentSet {
    pub angles: Vec<Angle>,
    pub image: Angle,
    pub preferred: Angle,
    /// the critical 1-vertex the set was marked at, when extracted
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

/// Outcome of each condition, in evaluation order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Certificate {
    pub conditions: Vec<Condition>,
}

impl Certificate {
    pub fn status(&self, name: &str) -> Option<Status> {
        self.conditions.iter().find(|c| c.name == name).map(|c| c.status)
    }

    pub fn certified(&self) -> bool {
        self.conditions.iter().all(|c| c.status != Status::Fail)
    }

    fn push(&mut self, name: &'static str, ok: bool, detail: String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.conditions.push(Condition { name, status, detail });
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.conditions.len()))?;
        for c in &self.conditions {
            map.serialize_entry(c.name, &c.status)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPortrait {
    pub color: Color,
    pub degree: u32,
    pub sets: Vec<PreargumentSet>,
    pub certificate: Certificate,
}

impl CriticalPortrait {
    /// Builds and certifies a portrait from raw angle sets.
    ///
    /// The preferred element of each set is the one hit by another set's
    /// forward orbit, or its least angle when none is.
    pub fn from_sets(color: Color, degree: u32, sets: Vec<Vec<Angle>>) -> CriticalPortrait {
        let horizon = orbit_horizon(sets.iter().flatten(), degree);
        let images: Vec<Angle> = sets
            .iter()
            .map(|s| s.first().map(|a| q_apply(a, degree)).unwrap_or_else(Angle::zero))
            .collect();
        let sets = sets
            .iter()
            .enumerate()
            .map(|(i, angles)| {
                let mut angles = angles.clone();
                angles.sort();
                angles.dedup();
                let hit = angles.iter().find(|a| {
                    images
                        .iter()
                        .enumerate()
                        .any(|(j, img)| j != i && forward_hits(img, a, degree, horizon))
                });
                let preferred = hit.or(angles.first()).cloned().unwrap_or_else(Angle::zero);
                PreargumentSet { angles, image: images[i].clone(), preferred, vertex: None }
            })
            .collect();
        let mut portrait = CriticalPortrait { color, degree, sets, certificate: Certificate::default() };
        portrait.certificate = certify(&portrait);
        portrait
    }

    pub fn chords(&self) -> Vec<&[Angle]> {
        self.sets.iter().map(|s| s.angles.as_slice()).collect()
    }

    pub fn angle_sets(&self) -> Vec<Vec<Angle>> {
        self.sets.iter().map(|s| s.angles.clone()).collect()
    }
}

/// Whether `target` is `q^i(x)` for some `0 ≤ i < horizon`.
fn forward_hits(x: &Angle, target: &Angle, degree: u32, horizon: usize) -> bool {
    let mut y = x.clone();
    for _ in 0..horizon {
        if &y == target {
            return true;
        }
        y = q_apply(&y, degree);
    }
    false
}

/// Steps after which all symbol sequences of the given angles have repeated:
/// the largest preperiod plus the lcm of the periods, plus one.
pub fn orbit_horizon<'a>(angles: impl IntoIterator<Item = &'a Angle>, degree: u32) -> usize {
    let (pre, per) = angles.into_iter().fold((0, 1), |(pre, per), a| {
        let sig = orbit_signature(a, degree);
        (pre.max(sig.preperiod), lcm(per, sig.period))
    });
    pre + per + 1
}

// ---------------------------------------------------------------------------
// marking procedure

fn post_orbit(spec: &MapSpec, vertex: usize) -> Vec<usize> {
    // post points visited by the forward orbit of a 1-vertex
    let mut seen = Vec::new();
    let mut p = spec.vertices1[vertex].image;
    while !seen.contains(&p) {
        seen.push(p);
        match spec.post_as_vertex1(p) {
            Some(v) => p = spec.vertices1[v].image,
            None => break,
        }
    }
    seen
}

/// Marked parameters of `color` at a critical vertex: passages bordering its
/// branched regions of that color.
fn marked_positions(c: &CriticalVertex, color: Color) -> Vec<usize> {
    let mut positions: Vec<usize> = c
        .branched_regions
        .iter()
        .filter(|r| r.color == color)
        .flat_map(|r| r.passages.iter().copied())
        .collect();
    positions.sort_unstable();
    positions.dedup();
    positions
}

fn mark(
    spec: &MapSpec,
    s: &PullbackParameters,
    c: &CriticalVertex,
    alpha: &Angle,
) -> PreargumentSet {
    let image = q_apply(alpha, spec.degree);
    let fibre: HashSet<Angle> = q_preimages(&image, spec.degree).into_iter().collect();
    let mut angles: Vec<Angle> = c
        .positions
        .iter()
        .map(|&j| s.s[j].clone())
        .filter(|x| fibre.contains(x))
        .collect();
    angles.sort();
    angles.dedup();
    PreargumentSet { angles, image, preferred: alpha.clone(), vertex: Some(c.id.clone()) }
}

fn extract_color(
    spec: &MapSpec,
    s: &PullbackParameters,
    criticals: &[CriticalVertex],
    color: Color,
) -> Result<Vec<PreargumentSet>> {
    let mine: Vec<&CriticalVertex> = criticals.iter().filter(|c| c.has_color(color)).collect();
    let is_post = |c: &CriticalVertex| spec.post_index(&c.id);
    // roots: not in the forward orbit of another critical of this color
    let roots: Vec<usize> = (0..mine.len())
        .filter(|&i| {
            let Some(p) = is_post(mine[i]) else { return true };
            !(0..mine.len()).any(|j| j != i && post_orbit(spec, mine[j].vertex).contains(&p))
        })
        .collect();
    let horizon = orbit_horizon(s.s.iter(), spec.degree);
    let mut marked: Vec<Option<PreargumentSet>> = vec![None; mine.len()];
    for &r in &roots {
        let positions = marked_positions(mine[r], color);
        let Some(&first) = positions.first() else {
            return Err(Error::MarkingStuck(format!("no {color} passage at {:?}", mine[r].id)));
        };
        let alpha = s.s[first].clone();
        marked[r] = Some(mark(spec, s, mine[r], &alpha));
        // iterate α to reach criticals further along its orbit
        let mut x = alpha;
        for _ in 0..horizon {
            x = q_apply(&x, spec.degree);
            for (i, c) in mine.iter().enumerate() {
                if marked[i].is_none() && c.positions.iter().any(|&j| s.s[j] == x) {
                    marked[i] = Some(mark(spec, s, c, &x));
                }
            }
        }
    }
    marked
        .into_iter()
        .zip(&mine)
        .map(|(m, c)| {
            m.ok_or_else(|| {
                Error::MarkingStuck(format!(
                    "no marked {color} parameter reaches critical vertex {:?}",
                    c.id
                ))
            })
        })
        .collect()
}

/// Runs the marking procedure for both colors and certifies the results.
pub fn extract_portraits(
    spec: &MapSpec,
    s: &PullbackParameters,
    criticals: &[CriticalVertex],
) -> Result<(CriticalPortrait, CriticalPortrait)> {
    let build = |color| -> Result<CriticalPortrait> {
        let sets = extract_color(spec, s, criticals, color)?;
        let mut p = CriticalPortrait { color, degree: spec.degree, sets, certificate: Certificate::default() };
        p.certificate = certify(&p);
        Ok(p)
    };
    Ok((build(Color::White)?, build(Color::Black)?))
}

// ---------------------------------------------------------------------------
// sectors and itineraries

/// An arc `(start, end)` traversed positively; `start == end` is the full circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    fn length(&self) -> BigRational {
        let gap = self.start.gap_to(&self.end);
        if gap.is_zero() {
            BigRational::one()
        } else {
            gap
        }
    }

    /// Whether `x` is on the arc, boundary included or not.
    fn contains(&self, x: &Angle, closed_start: bool, closed_end: bool) -> bool {
        if self.start == self.end {
            return true;
        }
        if *x == self.start {
            return closed_start;
        }
        if *x == self.end {
            return closed_end;
        }
        let to_x = self.start.gap_to(x);
        to_x < self.length()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub label: usize,
    pub arcs: Vec<Arc>,
    pub length: BigRational,
}

impl Sector {
    pub fn contains_closed(&self, x: &Angle) -> bool {
        self.arcs.iter().any(|a| a.contains(x, true, true))
    }
}

/// Complementary arcs of the portrait angles, grouped by the region of the
/// disk minus the hull chords they bound. Labels follow the least arc start.
pub fn sectors(portrait: &CriticalPortrait) -> Vec<Sector> {
    let mut points: Vec<Angle> = portrait.sets.iter().flat_map(|s| s.angles.iter().cloned()).collect();
    points.sort();
    points.dedup();
    if points.is_empty() {
        let whole = Arc { start: Angle::zero(), end: Angle::zero() };
        return vec![Sector { label: 0, arcs: vec![whole], length: BigRational::one() }];
    }
    let n = points.len();
    let mut groups: BTreeMap<Vec<usize>, Vec<Arc>> = BTreeMap::new();
    for i in 0..n {
        let arc = Arc { start: points[i].clone(), end: points[(i + 1) % n].clone() };
        // which complementary arc of each set this arc lies in
        let signature = portrait
            .sets
            .iter()
            .map(|s| s.angles.partition_point(|y| *y <= arc.start) % s.angles.len().max(1))
            .collect();
        groups.entry(signature).or_default().push(arc);
    }
    let mut list: Vec<Vec<Arc>> = groups.into_values().collect();
    for arcs in &mut list {
        arcs.sort_by(|a, b| a.start.cmp(&b.start));
    }
    list.sort_by(|a, b| a[0].start.cmp(&b[0].start));
    list.into_iter()
        .enumerate()
        .map(|(label, arcs)| {
            let length = arcs.iter().fold(BigRational::zero(), |acc, a| acc + a.length());
            Sector { label, arcs, length }
        })
        .collect()
}

/// Sector of `x` approached from the given side.
pub fn sector_label(sectors: &[Sector], x: &Angle, side: Side) -> usize {
    let (closed_start, closed_end) = match side {
        Side::Left => (false, true),
        Side::Right => (true, false),
    };
    sectors
        .iter()
        .find(|s| s.arcs.iter().any(|a| a.contains(x, closed_start, closed_end)))
        .map(|s| s.label)
        .expect("sectors cover the circle")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Itinerary {
    pub symbols: Vec<usize>,
    pub side: Side,
}

pub fn itinerary(t: &Angle, portrait: &CriticalPortrait, depth: usize, side: Side) -> Itinerary {
    itinerary_in(&sectors(portrait), t, portrait.degree, depth, side)
}

fn itinerary_in(sectors: &[Sector], t: &Angle, degree: u32, depth: usize, side: Side) -> Itinerary {
    let mut x = t.clone();
    let mut symbols = Vec::with_capacity(depth);
    for _ in 0..depth {
        symbols.push(sector_label(sectors, &x, side));
        x = q_apply(&x, degree);
    }
    Itinerary { symbols, side }
}

// ---------------------------------------------------------------------------
// certification

/// Evaluates the preperiodic Poirier conditions; failures are recorded.
pub fn certify(portrait: &CriticalPortrait) -> Certificate {
    let d = portrait.degree;
    let sets = &portrait.sets;
    let mut cert = Certificate::default();

    let bad = sets.iter().position(|s| {
        s.angles.len() < 2 || s.angles.iter().any(|a| q_apply(a, d) != s.image)
    });
    cert.push(
        "preargument",
        bad.is_none(),
        match bad {
            None => "every set has at least two angles and a single image".into(),
            Some(i) => format!("set {i} is not a degree-{d} preargument set"),
        },
    );

    let mut linked = None;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if linked.is_none() && hulls_linked(&sets[i].angles, &sets[j].angles) {
                linked = Some((i, j));
            }
        }
    }
    cert.push(
        "unlinked",
        linked.is_none(),
        match linked {
            None => "hulls pairwise unlinked".into(),
            Some((i, j)) => format!("sets {i} and {j} are linked"),
        },
    );

    let count: usize = sets.iter().map(|s| s.angles.len().saturating_sub(1)).sum();
    cert.push("c1", count + 1 == d as usize, format!("Σ(|J_k| − 1) = {count}, d − 1 = {}", d - 1));

    let vacuous = |name| Condition {
        name,
        status: Status::Vacuous,
        detail: "no periodic critical family".into(),
    };
    cert.conditions.push(vacuous("c2"));

    let participants: Vec<&Angle> = sets.iter().flat_map(|s| s.angles.iter()).collect();
    let horizon = orbit_horizon(participants.iter().copied(), d);
    let mut violation = None;
    'outer: for (i, b) in sets.iter().enumerate() {
        let mut x = b.image.clone();
        for _ in 1..horizon {
            for (j, a) in sets.iter().enumerate() {
                if a.angles.contains(&x) && x != a.preferred {
                    violation = Some((i, j, x.clone()));
                    break 'outer;
                }
            }
            x = q_apply(&x, d);
        }
    }
    cert.push(
        "c3",
        violation.is_none(),
        match violation {
            None => "every set is entered only through its preferred element".into(),
            Some((i, j, x)) => format!("orbit of set {i} enters set {j} at {x}, not its preferred element"),
        },
    );
    cert.conditions.push(vacuous("c4"));

    let periodic = participants.iter().find(|a| orbit_signature(a, d).is_periodic());
    cert.push(
        "c5",
        periodic.is_none(),
        match periodic {
            None => "no participating angle is periodic".into(),
            Some(a) => format!("{a} is periodic"),
        },
    );
    cert.conditions.push(vacuous("c6"));

    let sec = sectors(portrait);
    let unit = BigRational::new(BigInt::one(), BigInt::from(d));
    let uneven = sec.iter().find(|s| !(&s.length / &unit).is_integer());
    cert.push(
        "sectors",
        uneven.is_none(),
        match uneven {
            None => format!("{} sectors, each of length a multiple of 1/{d}", sec.len()),
            Some(s) => format!("sector {} has length {}", s.label, crate::circle::ratio_string(&s.length)),
        },
    );

    let c7 = check_c7(&sec, &participants, d, horizon);
    cert.push(
        "c7",
        c7.is_none(),
        match c7 {
            None => format!("left symbol sequences separate participants up to depth {horizon}"),
            Some((x, t)) => format!("{x} and {t} share a left symbol sequence"),
        },
    );
    cert
}

/// First pair `(d^i a, t)` with equal left itineraries but distinct angles.
fn check_c7(sectors: &[Sector], participants: &[&Angle], degree: u32, horizon: usize) -> Option<(Angle, Angle)> {
    let targets: Vec<(Angle, Itinerary)> = participants
        .iter()
        .map(|t| ((*t).clone(), itinerary_in(sectors, t, degree, horizon, Side::Left)))
        .collect();
    for a in participants {
        let mut x = (*a).clone();
        for _ in 0..horizon {
            let it = itinerary_in(sectors, &x, degree, horizon, Side::Left);
            for (t, tt) in &targets {
                if *t != x && it == *tt {
                    return Some((x, t.clone()));
                }
            }
            x = q_apply(&x, degree);
        }
    }
    None
}
