//! Finite-depth white and black equivalence relations on the circle, their
//! pullback under `q_d`, joins and the Moore check.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::circle::{hulls_linked, q_apply, q_preimages, Angle, Leaf};
use crate::complex::{chord_diagrams, critical_vertices, Color, Level, MapSpec};
use crate::error::{Error, Result};
use crate::parameterize::PullbackParameters;
use crate::portraits::{sectors, CriticalPortrait};

/// Which relation a set of classes belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    White,
    Black,
    Join,
}

impl From<Color> for Side {
    fn from(c: Color) -> Side {
        match c {
            Color::White => Side::White,
            Color::Black => Side::Black,
        }
    }
}

/// One equivalence class, remembering which colored relations contributed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AngleClass {
    pub angles: Vec<Angle>,
    pub white: bool,
    pub black: bool,
}

impl AngleClass {
    pub fn new(mut angles: Vec<Angle>, side: Side) -> AngleClass {
        angles.sort();
        angles.dedup();
        AngleClass {
            angles,
            white: side == Side::White,
            black: side == Side::Black,
        }
    }

    /// Chords between cyclically consecutive angles.
    pub fn leaves(&self) -> Vec<Leaf> {
        let n = self.angles.len();
        match n {
            0 | 1 => Vec::new(),
            2 => Leaf::new(self.angles[0].clone(), self.angles[1].clone()).into_iter().collect(),
            _ => (0..n)
                .filter_map(|i| Leaf::new(self.angles[i].clone(), self.angles[(i + 1) % n].clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleClasses {
    pub depth: usize,
    pub side: Side,
    /// disjoint, sorted; each of size at least 2
    pub classes: Vec<AngleClass>,
}

impl Serialize for AngleClasses {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("AngleClasses", 3)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("side", &self.side)?;
        let classes: Vec<&Vec<Angle>> = self.classes.iter().map(|c| &c.angles).collect();
        st.serialize_field("classes", &classes)?;
        st.end()
    }
}

impl AngleClasses {
    pub fn empty(depth: usize, side: Side) -> AngleClasses {
        AngleClasses { depth, side, classes: Vec::new() }
    }

    pub fn angle_sets(&self) -> Vec<Vec<Angle>> {
        self.classes.iter().map(|c| c.angles.clone()).collect()
    }

    pub fn leaves(&self) -> LeafSet {
        let mut leaves: Vec<Leaf> = self.classes.iter().flat_map(|c| c.leaves()).collect();
        leaves.sort();
        leaves.dedup();
        LeafSet { leaves }
    }

    /// First pair of classes whose hulls cross.
    pub fn crossing_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.classes.len() {
            for j in i + 1..self.classes.len() {
                if hulls_linked(&self.classes[i].angles, &self.classes[j].angles) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_planar(&self) -> bool {
        self.crossing_pair().is_none()
    }

    fn class_of(&self, x: &Angle) -> Option<&AngleClass> {
        self.classes.iter().find(|c| c.angles.binary_search(x).is_ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafSet {
    pub leaves: Vec<Leaf>,
}

/// Merges overlapping classes and sorts the result.
fn merge(classes: Vec<AngleClass>) -> Vec<AngleClass> {
    let mut index: BTreeMap<Angle, usize> = BTreeMap::new();
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, c) in classes.iter().enumerate() {
        for a in &c.angles {
            match index.get(a) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
                None => {
                    index.insert(a.clone(), i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, AngleClass> = BTreeMap::new();
    for (i, c) in classes.into_iter().enumerate() {
        let root = find(&mut parent, i);
        let entry = groups.entry(root).or_insert_with(|| AngleClass {
            angles: Vec::new(),
            white: false,
            black: false,
        });
        entry.angles.extend(c.angles);
        entry.white |= c.white;
        entry.black |= c.black;
    }
    let mut out: Vec<AngleClass> = groups
        .into_values()
        .map(|mut c| {
            c.angles.sort();
            c.angles.dedup();
            c
        })
        .filter(|c| c.angles.len() >= 2)
        .collect();
    out.sort();
    out
}

fn region_classes(spec: &MapSpec, s: &PullbackParameters, only_critical: bool) -> Result<(AngleClasses, AngleClasses)> {
    let mut white = Vec::new();
    let mut black = Vec::new();
    let mut push = |color: Color, passages: &[usize]| {
        let class = AngleClass::new(passages.iter().map(|&j| s.s[j].clone()).collect(), color.into());
        match color {
            Color::White => white.push(class),
            Color::Black => black.push(class),
        }
    };
    if only_critical {
        for c in critical_vertices(spec)? {
            for r in c.branched_regions.iter().filter(|r| r.passages.len() >= 2) {
                push(r.color, &r.passages);
            }
        }
    } else {
        for diagram in chord_diagrams(spec, Level::One)? {
            for color in [Color::White, Color::Black] {
                for r in diagram.connections(color) {
                    push(color, &r.passages);
                }
            }
        }
    }
    Ok((
        AngleClasses { depth: 1, side: Side::White, classes: merge(white) },
        AngleClasses { depth: 1, side: Side::Black, classes: merge(black) },
    ))
}

/// Depth-1 classes generated at the critical vertices, one per branched
/// region of each color.
pub fn depth1(spec: &MapSpec, s: &PullbackParameters) -> Result<(AngleClasses, AngleClasses)> {
    region_classes(spec, s, true)
}

/// Connections at every 1-vertex, critical or not.
pub fn connection_classes(spec: &MapSpec, s: &PullbackParameters) -> Result<(AngleClasses, AngleClasses)> {
    region_classes(spec, s, false)
}

/// Whether the hull of `class` crosses a chord of the portrait.
fn crosses_portrait(class: &[Angle], portrait: &CriticalPortrait) -> bool {
    portrait.sets.iter().any(|p| hulls_linked(class, &p.angles))
}

/// Lifts every class by grouping preimages that share a closed sector, then
/// adds back the base classes and merges.
pub fn pullback_step(
    classes: &AngleClasses,
    base: &AngleClasses,
    portrait: &CriticalPortrait,
) -> Result<AngleClasses> {
    let d = portrait.degree;
    let sec = sectors(portrait);
    let mut lifted: Vec<AngleClass> = base.classes.clone();
    for class in &classes.classes {
        let preimages: Vec<Angle> = class.angles.iter().flat_map(|a| q_preimages(a, d)).collect();
        for sector in &sec {
            let group: Vec<Angle> = preimages.iter().filter(|y| sector.contains_closed(y)).cloned().collect();
            if group.len() >= 2 {
                lifted.push(AngleClass { angles: group, white: class.white, black: class.black });
            }
        }
    }
    finish(classes.depth + 1, classes.side, lifted, portrait)
}

fn finish(depth: usize, side: Side, lifted: Vec<AngleClass>, portrait: &CriticalPortrait) -> Result<AngleClasses> {
    let out = AngleClasses { depth, side, classes: merge(lifted) };
    if let Some((i, j)) = out.crossing_pair() {
        return Err(Error::PullbackCrossing(format!(
            "classes {:?} and {:?} cross at depth {depth}",
            fmt_class(&out.classes[i]),
            fmt_class(&out.classes[j])
        )));
    }
    if let Some(c) = out.classes.iter().find(|c| crosses_portrait(&c.angles, portrait)) {
        return Err(Error::PullbackCrossing(format!(
            "class {:?} crosses a {} portrait chord at depth {depth}",
            fmt_class(c),
            portrait.color
        )));
    }
    Ok(out)
}

fn fmt_class(c: &AngleClass) -> Vec<String> {
    c.angles.iter().map(|a| a.to_string()).collect()
}

/// Depth-1 through depth-`depth` relations of one color.
pub fn lamination_tower(first: &AngleClasses, portrait: &CriticalPortrait, depth: usize) -> Result<Vec<AngleClasses>> {
    let mut tower = vec![first.clone()];
    while tower.len() < depth {
        let next = pullback_step(tower.last().expect("nonempty"), first, portrait)?;
        tower.push(next);
    }
    Ok(tower)
}

/// Smallest relation containing both: classes sharing an angle merge.
pub fn join(white: &AngleClasses, black: &AngleClasses) -> AngleClasses {
    let all: Vec<AngleClass> = white.classes.iter().chain(&black.classes).cloned().collect();
    AngleClasses {
        depth: white.depth.max(black.depth),
        side: Side::Join,
        classes: merge(all),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    /// both classes carry a common color: a genuine failure
    SameSide,
    /// a white class against a black one, expected in a two-sided lamination
    CrossSide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MooreLink {
    pub first: Vec<Angle>,
    pub second: Vec<Angle>,
    pub kind: LinkKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MooreReport {
    pub passed: bool,
    pub links: Vec<MooreLink>,
}

/// Lists every pair of linked class hulls; only same-side links fail.
pub fn moore_check(classes: &AngleClasses) -> MooreReport {
    let mut links = Vec::new();
    for (i, a) in classes.classes.iter().enumerate() {
        for b in &classes.classes[i + 1..] {
            if hulls_linked(&a.angles, &b.angles) {
                let same = (a.white && b.white) || (a.black && b.black);
                links.push(MooreLink {
                    first: a.angles.clone(),
                    second: b.angles.clone(),
                    kind: if same { LinkKind::SameSide } else { LinkKind::CrossSide },
                });
            }
        }
    }
    MooreReport {
        passed: links.iter().all(|l| l.kind == LinkKind::CrossSide),
        links,
    }
}

/// Checks that every class maps into a class or a single point one level up.
pub fn forward_compatible(next: &AngleClasses, previous: &AngleClasses, degree: u32) -> bool {
    next.classes.iter().all(|c| {
        let mut image: Vec<Angle> = c.angles.iter().map(|a| q_apply(a, degree)).collect();
        image.sort();
        image.dedup();
        image.len() == 1
            || previous
                .class_of(&image[0])
                .is_some_and(|p| image.iter().all(|x| p.angles.binary_search(x).is_ok()))
    })
}
