//! Combinatorial input: the marked curve `γ⁰`, its pullback `γ¹`, rotation
//! systems, tiles, chord diagrams at vertices and critical vertices.
//!
//! Conventions used throughout:
//!
//! * word position `j` names both the edge arriving at visit `j` and the
//!   visit itself; the edge at position `j` runs from visit `j-1` to visit `j`;
//! * an edge-end `[j, "in"]` is the head of edge `j`, `[j, "out"]` the tail of
//!   edge `j+1`, both incident to the vertex of visit `j`;
//! * rotation lists are counter-clockwise;
//! * word1 position `j` lies over word0 position `j mod k`, and the marker
//!   `markers[i]` is the word1 visit of the post point visited at word0
//!   position `i`. A 1-vertex whose id is a post name *is* that post point.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub position: usize,
    pub end: End,
}

impl EdgeEnd {
    pub fn new(position: usize, end: End) -> EdgeEnd {
        EdgeEnd { position, end }
    }
}

/// Which of the two curves a query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Zero,
    One,
}

impl Level {
    pub fn from_index(level: u8) -> Option<Level> {
        match level {
            0 => Some(Level::Zero),
            1 => Some(Level::One),
            _ => None,
        }
    }

    fn index(self) -> u8 {
        match self {
            Level::Zero => 0,
            Level::One => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// file schema

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    degree: i64,
    post: Vec<String>,
    edges0: Vec<String>,
    word0: Vec<Word0Entry>,
    vertices1: Vec<VertexEntry>,
    word1: Vec<Word1Entry>,
    rotation0: BTreeMap<String, Vec<(usize, End)>>,
    rotation1: BTreeMap<String, Vec<(usize, End)>>,
    markers: Vec<usize>,
    white_anchor: (usize, Side),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Word0Entry {
    edge: String,
    to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    id: String,
    image: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Word1Entry {
    image_edge: String,
    to: String,
}

// ---------------------------------------------------------------------------
// data model

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Visit0 {
    /// index into `edges0`
    pub edge: usize,
    /// index into `post`
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Visit1 {
    pub image_edge: usize,
    /// index into `vertices1`
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex1 {
    pub id: String,
    /// f-image, index into `post`
    pub image: usize,
}

/// Structurally valid description of `(f, γ⁰, γ¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub degree: u32,
    pub post: Vec<String>,
    pub edges0: Vec<String>,
    pub word0: Vec<Visit0>,
    pub vertices1: Vec<Vertex1>,
    pub word1: Vec<Visit1>,
    /// indexed like `post`
    pub rotation0: Vec<Vec<EdgeEnd>>,
    /// indexed like `vertices1`
    pub rotation1: Vec<Vec<EdgeEnd>>,
    pub markers: Vec<usize>,
    pub white_anchor: (usize, Side),
}

fn index_names(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if map.insert(name.clone(), i).is_some() {
            return Err(Error::Structure(format!("duplicate {what} id {name:?}")));
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<String, usize>, name: &str, what: &str) -> Result<usize> {
    map.get(name)
        .copied()
        .ok_or_else(|| Error::Structure(format!("unknown {what} {name:?}")))
}

fn convert_rotation(
    raw: BTreeMap<String, Vec<(usize, End)>>,
    names: &HashMap<String, usize>,
    count: usize,
    word_len: usize,
    what: &str,
) -> Result<Vec<Vec<EdgeEnd>>> {
    let mut rotation = vec![Vec::new(); count];
    for (name, ends) in raw {
        let v = lookup(names, &name, what)?;
        for &(position, _) in &ends {
            if position >= word_len {
                return Err(Error::Structure(format!(
                    "rotation of {name:?} references position {position} beyond word length {word_len}"
                )));
            }
        }
        rotation[v] = ends.into_iter().map(|(p, e)| EdgeEnd::new(p, e)).collect();
    }
    Ok(rotation)
}

/// Parses a mapfile. Checks syntax, arity and references only.
pub fn parse(bytes: &[u8]) -> Result<MapSpec> {
    let raw: MapFile = serde_json::from_slice(bytes)?;
    if raw.degree < 2 {
        return Err(Error::Structure(format!("degree must be at least 2, got {}", raw.degree)));
    }
    let degree = u32::try_from(raw.degree)
        .map_err(|_| Error::Structure(format!("degree {} too large", raw.degree)))?;
    let post_ix = index_names(&raw.post, "post")?;
    let edge_ix = index_names(&raw.edges0, "0-edge")?;
    let vertex_names: Vec<String> = raw.vertices1.iter().map(|v| v.id.clone()).collect();
    let vertex_ix = index_names(&vertex_names, "1-vertex")?;

    let k = raw.word0.len();
    if k == 0 {
        return Err(Error::Structure("word0 is empty".into()));
    }
    if raw.edges0.len() != k {
        return Err(Error::Structure(format!(
            "word length mismatch: {} 0-edges but |word0| = {k}",
            raw.edges0.len()
        )));
    }
    let expected = degree as usize * k;
    if raw.word1.len() != expected {
        return Err(Error::Structure(format!(
            "word length mismatch: |word1| = {}, expected d·k = {expected}",
            raw.word1.len()
        )));
    }

    let word0 = raw
        .word0
        .iter()
        .map(|w| {
            Ok(Visit0 {
                edge: lookup(&edge_ix, &w.edge, "0-edge")?,
                to: lookup(&post_ix, &w.to, "post point")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seen_edges = vec![0usize; k];
    for w in &word0 {
        seen_edges[w.edge] += 1;
    }
    if let Some(e) = seen_edges.iter().position(|&c| c != 1) {
        return Err(Error::Structure(format!(
            "0-edge {:?} appears {} times in word0, expected once",
            raw.edges0[e], seen_edges[e]
        )));
    }
    let vertices1 = raw
        .vertices1
        .iter()
        .map(|v| {
            Ok(Vertex1 {
                id: v.id.clone(),
                image: lookup(&post_ix, &v.image, "post point")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let word1 = raw
        .word1
        .iter()
        .map(|w| {
            Ok(Visit1 {
                image_edge: lookup(&edge_ix, &w.image_edge, "0-edge")?,
                to: lookup(&vertex_ix, &w.to, "1-vertex")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    if raw.markers.len() != k {
        return Err(Error::Structure(format!(
            "expected {k} markers, got {}",
            raw.markers.len()
        )));
    }
    for (i, &m) in raw.markers.iter().enumerate() {
        if m >= expected {
            return Err(Error::Structure(format!("marker {i} = {m} out of range")));
        }
        let vertex = &vertices1[word1[m].to];
        let post_name = &raw.post[word0[i].to];
        if &vertex.id != post_name {
            return Err(Error::Structure(format!(
                "marker/image contradiction: marker {i} lands on 1-vertex {:?}, expected post point {post_name:?}",
                vertex.id
            )));
        }
    }
    if raw.white_anchor.0 >= k {
        return Err(Error::Structure(format!(
            "white_anchor position {} out of range",
            raw.white_anchor.0
        )));
    }

    let rotation0 = convert_rotation(raw.rotation0, &post_ix, raw.post.len(), k, "post point")?;
    let rotation1 =
        convert_rotation(raw.rotation1, &vertex_ix, vertices1.len(), expected, "1-vertex")?;

    Ok(MapSpec {
        degree,
        post: raw.post,
        edges0: raw.edges0,
        word0,
        vertices1,
        word1,
        rotation0,
        rotation1,
        markers: raw.markers,
        white_anchor: raw.white_anchor,
    })
}

pub fn load(path: impl AsRef<std::path::Path>) -> Result<MapSpec> {
    parse(&std::fs::read(path)?)
}

/// A curve at one level, reduced to what face tracing needs.
#[derive(Clone, Debug)]
pub(crate) struct CurveView {
    /// vertex index of each visit
    pub to: Vec<usize>,
    pub names: Vec<String>,
    pub rotation: Vec<Vec<EdgeEnd>>,
    pub anchor: (usize, Side),
}

impl CurveView {
    pub fn len(&self) -> usize {
        self.to.len()
    }

    pub fn visits(&self, vertex: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.to[j] == vertex).collect()
    }
}

impl MapSpec {
    pub fn k(&self) -> usize {
        self.word0.len()
    }

    pub(crate) fn view(&self, level: Level) -> CurveView {
        match level {
            Level::Zero => CurveView {
                to: self.word0.iter().map(|w| w.to).collect(),
                names: self.post.clone(),
                rotation: self.rotation0.clone(),
                anchor: self.white_anchor,
            },
            Level::One => CurveView {
                to: self.word1.iter().map(|w| w.to).collect(),
                names: self.vertices1.iter().map(|v| v.id.clone()).collect(),
                rotation: self.rotation1.clone(),
                // f preserves orientation and colors, so the anchor lifts to
                // the word1 position over it
                anchor: self.white_anchor,
            },
        }
    }

    pub fn vertex1_index(&self, id: &str) -> Option<usize> {
        self.vertices1.iter().position(|v| v.id == id)
    }

    pub fn post_index(&self, name: &str) -> Option<usize> {
        self.post.iter().position(|p| p == name)
    }

    /// Number of word0 visits at each post point.
    pub fn visits0(&self, post: usize) -> usize {
        self.word0.iter().filter(|w| w.to == post).count()
    }

    pub fn visits1(&self, vertex: usize) -> usize {
        self.word1.iter().filter(|w| w.to == vertex).count()
    }

    /// The 1-vertex that is the post point `post`, if listed.
    pub(crate) fn post_as_vertex1(&self, post: usize) -> Option<usize> {
        self.vertex1_index(&self.post[post])
    }

    /// Labels for the γ⁰ markers: the post name, primed for repeat visits.
    pub fn marker_labels(&self) -> Vec<String> {
        let mut count: HashMap<usize, usize> = HashMap::new();
        self.word0
            .iter()
            .map(|w| {
                let n = count.entry(w.to).or_insert(0);
                let label = format!("{}{}", self.post[w.to], "'".repeat(*n));
                *n += 1;
                label
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// tiles

/// A traversal of edge `edge` (word position), forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub struct TileComplex {
    /// each face is the cyclic sequence of darts having it on their left
    pub faces: Vec<Vec<Dart>>,
    pub colors: Vec<Color>,
    pub vertex_count: usize,
    pub edge_count: usize,
    face_of: HashMap<Dart, usize>,
}

impl TileComplex {
    pub fn face_of(&self, dart: Dart) -> usize {
        self.face_of[&dart]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count as i64 + self.faces.len() as i64
    }

    /// Color of the tile on the left of edge `edge` traversed forwards.
    pub fn left_color(&self, edge: usize) -> Color {
        self.colors[self.face_of(Dart { edge, forward: true })]
    }
}

/// Slot lookup `edge-end → (vertex, index in rotation)`, checking completeness.
fn slot_index(view: &CurveView) -> std::result::Result<HashMap<EdgeEnd, (usize, usize)>, String> {
    let mut slots = HashMap::new();
    for (v, ends) in view.rotation.iter().enumerate() {
        for (i, &e) in ends.iter().enumerate() {
            if slots.insert(e, (v, i)).is_some() {
                return Err(format!("edge-end [{}, {:?}] listed twice", e.position, e.end));
            }
            if view.to.get(e.position) != Some(&v) {
                return Err(format!(
                    "edge-end [{}, {:?}] listed at {:?} but that visit is elsewhere",
                    e.position, e.end, view.names[v]
                ));
            }
        }
    }
    for j in 0..view.len() {
        for end in [End::In, End::Out] {
            if !slots.contains_key(&EdgeEnd::new(j, end)) {
                return Err(format!(
                    "edge-end [{j}, {end:?}] missing from rotation of {:?}",
                    view.names[view.to[j]]
                ));
            }
        }
    }
    Ok(slots)
}

/// The dart whose left face owns the corner just clockwise of edge-end `h`,
/// i.e. the dart arriving at the vertex through `h`.
fn dart_arriving(h: EdgeEnd, n: usize) -> Dart {
    match h.end {
        End::In => Dart { edge: h.position, forward: true },
        End::Out => Dart { edge: (h.position + 1) % n, forward: false },
    }
}

fn arrival_end(d: Dart, n: usize) -> EdgeEnd {
    if d.forward {
        EdgeEnd::new(d.edge, End::In)
    } else {
        EdgeEnd::new((d.edge + n - 1) % n, End::Out)
    }
}

fn departing_dart(h: EdgeEnd, n: usize) -> Dart {
    match h.end {
        End::Out => Dart { edge: (h.position + 1) % n, forward: true },
        End::In => Dart { edge: h.position, forward: false },
    }
}

pub(crate) fn trace_faces(view: &CurveView) -> Result<TileComplex> {
    let n = view.len();
    let slots = slot_index(view).map_err(|m| Error::Complex(format!("rotation system incomplete: {m}")))?;
    let mut face_of: HashMap<Dart, usize> = HashMap::new();
    let mut faces: Vec<Vec<Dart>> = Vec::new();
    for edge in 0..n {
        for forward in [true, false] {
            let start = Dart { edge, forward };
            if face_of.contains_key(&start) {
                continue;
            }
            let id = faces.len();
            let mut boundary = Vec::new();
            let mut dart = start;
            loop {
                face_of.insert(dart, id);
                boundary.push(dart);
                let h = arrival_end(dart, n);
                let (v, i) = slots[&h];
                let ring = &view.rotation[v];
                let next = ring[(i + ring.len() - 1) % ring.len()];
                dart = departing_dart(next, n);
                if dart == start {
                    break;
                }
                if face_of.contains_key(&dart) {
                    return Err(Error::Complex("face tracing did not close up".into()));
                }
            }
            faces.push(boundary);
        }
    }

    // checkerboard propagation from the anchor
    let mut colors: Vec<Option<Color>> = vec![None; faces.len()];
    let (anchor, side) = view.anchor;
    let anchor_dart = Dart { edge: anchor, forward: side == Side::Left };
    let mut queue = VecDeque::new();
    colors[face_of[&anchor_dart]] = Some(Color::White);
    queue.push_back(face_of[&anchor_dart]);
    while let Some(f) = queue.pop_front() {
        let c = colors[f].expect("queued faces are colored");
        for d in &faces[f] {
            let across = face_of[&Dart { edge: d.edge, forward: !d.forward }];
            match colors[across] {
                None => {
                    colors[across] = Some(c.other());
                    queue.push_back(across);
                }
                Some(existing) if existing == c => {
                    return Err(Error::Complex("not checkerboard-colorable".into()));
                }
                _ => {}
            }
        }
    }
    let colors = colors
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::Complex("tile complex is disconnected".into())))
        .collect::<Result<Vec<_>>>()?;
    let vertex_count = (0..view.names.len()).filter(|&v| view.to.contains(&v)).count();
    Ok(TileComplex {
        faces,
        colors,
        vertex_count,
        edge_count: n,
        face_of,
    })
}

/// Face-traces the level-`level` curve and checkerboard-colors its tiles.
pub fn faces(spec: &MapSpec, level: Level) -> Result<TileComplex> {
    trace_faces(&spec.view(level))
}

// ---------------------------------------------------------------------------
// chord diagrams

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// corner indices; corner `i` sits between slots `i` and `i+1`
    pub corners: Vec<usize>,
    pub color: Color,
    /// word positions of the passages bordering this region
    pub passages: Vec<usize>,
}

/// The disk-with-chords model of a small neighborhood of a vertex.
#[derive(Clone, Debug)]
pub struct ChordDiagram {
    pub vertex: usize,
    pub name: String,
    pub slots: Vec<EdgeEnd>,
    /// `(slot of in-end, slot of out-end, word position)` per passage
    pub chords: Vec<(usize, usize, usize)>,
    pub regions: Vec<Region>,
}

impl ChordDiagram {
    /// Regions of `color` bordered by at least two passages.
    pub fn connections(&self, color: Color) -> impl Iterator<Item = &Region> {
        self.regions
            .iter()
            .filter(move |r| r.color == color && r.passages.len() >= 2)
    }

    pub fn region_of_corner(&self, corner: usize) -> usize {
        self.regions
            .iter()
            .position(|r| r.corners.contains(&corner))
            .expect("every corner lies in a region")
    }
}

fn chords_cross(x: (usize, usize), y: (usize, usize)) -> bool {
    let (a, b) = if x.0 < x.1 { x } else { (x.1, x.0) };
    let inside = |s: usize| a < s && s < b;
    inside(y.0) != inside(y.1)
}

/// Passages at `vertex` as slot pairs; `None` if an edge-end is missing.
fn passage_chords(view: &CurveView, vertex: usize) -> Option<Vec<(usize, usize, usize)>> {
    let slot_of: HashMap<EdgeEnd, usize> =
        view.rotation[vertex].iter().enumerate().map(|(i, &e)| (e, i)).collect();
    view.visits(vertex)
        .into_iter()
        .map(|j| {
            let a = *slot_of.get(&EdgeEnd::new(j, End::In))?;
            let b = *slot_of.get(&EdgeEnd::new(j, End::Out))?;
            Some((a, b, j))
        })
        .collect()
}

fn crossing_passages(chords: &[(usize, usize, usize)]) -> Option<(usize, usize)> {
    for (i, x) in chords.iter().enumerate() {
        for y in &chords[i + 1..] {
            if chords_cross((x.0, x.1), (y.0, y.1)) {
                return Some((x.2, y.2));
            }
        }
    }
    None
}

pub(crate) fn build_chord_diagram(view: &CurveView, tiles: &TileComplex, vertex: usize) -> Result<ChordDiagram> {
    let n = view.len();
    let slots = view.rotation[vertex].clone();
    let chords = passage_chords(view, vertex)
        .ok_or_else(|| Error::Complex(format!("rotation system incomplete at {:?}", view.names[vertex])))?;
    if let Some((a, b)) = crossing_passages(&chords) {
        return Err(Error::Complex(format!(
            "unlacing does not exist at vertex {:?}: passages {a} and {b} cross",
            view.names[vertex]
        )));
    }
    let m = slots.len();
    let mut by_signature: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for corner in 0..m {
        let sig = chords
            .iter()
            .map(|&(a, b, _)| {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                lo <= corner && corner < hi
            })
            .collect::<Vec<_>>();
        by_signature.entry(sig).or_default().push(corner);
    }
    let mut regions = Vec::new();
    for corners in by_signature.into_values() {
        let mut color = None;
        for &c in &corners {
            let face = tiles.face_of(dart_arriving(slots[(c + 1) % m], n));
            let fc = tiles.colors[face];
            if color.is_some_and(|x| x != fc) {
                return Err(Error::Complex(format!(
                    "region colors disagree at vertex {:?}",
                    view.names[vertex]
                )));
            }
            color = Some(fc);
        }
        let mut passages: Vec<usize> = chords
            .iter()
            .filter(|&&(a, b, _)| {
                corners.iter().any(|&c| {
                    let next = (c + 1) % m;
                    [a, b].contains(&c) || [a, b].contains(&next)
                })
            })
            .map(|&(_, _, j)| j)
            .collect();
        passages.sort_unstable();
        regions.push(Region {
            corners,
            color: color.expect("regions are nonempty"),
            passages,
        });
    }
    regions.sort_by_key(|r| r.corners[0]);
    Ok(ChordDiagram {
        vertex,
        name: view.names[vertex].clone(),
        slots,
        chords,
        regions,
    })
}

/// Chord diagram at vertex `id` (a post name at level 0, a 1-vertex id at level 1).
pub fn chord_diagram(spec: &MapSpec, id: &str, level: Level) -> Result<ChordDiagram> {
    let view = spec.view(level);
    let vertex = view
        .names
        .iter()
        .position(|n| n == id)
        .ok_or_else(|| Error::Complex(format!("no vertex {id:?} at level {}", level.index())))?;
    let tiles = trace_faces(&view)?;
    build_chord_diagram(&view, &tiles, vertex)
}

/// Chord diagrams at every vertex visited by the level-`level` curve.
pub fn chord_diagrams(spec: &MapSpec, level: Level) -> Result<Vec<ChordDiagram>> {
    let view = spec.view(level);
    let tiles = trace_faces(&view)?;
    (0..view.names.len())
        .filter(|&v| view.to.contains(&v))
        .map(|v| build_chord_diagram(&view, &tiles, v))
        .collect()
}

// ---------------------------------------------------------------------------
// covering data and critical vertices

/// Checks that the ccw rotation at `vertex` on γ¹ wraps `local_degree` times
/// around the rotation at its image on γ⁰.
fn check_covering(spec: &MapSpec, vertex: usize, local_degree: usize) -> std::result::Result<(), String> {
    let k = spec.k();
    let ring1: Vec<EdgeEnd> = spec.rotation1[vertex]
        .iter()
        .map(|e| EdgeEnd::new(e.position % k, e.end))
        .collect();
    let ring0 = &spec.rotation0[spec.vertices1[vertex].image];
    if ring0.is_empty() || ring1.len() != ring0.len() * local_degree {
        return Err(format!(
            "rotation at {:?} has {} ends, image has {}",
            spec.vertices1[vertex].id,
            ring1.len(),
            ring0.len()
        ));
    }
    let start = ring0
        .iter()
        .position(|e| *e == ring1[0])
        .ok_or_else(|| format!("rotation at {:?} does not cover its image", spec.vertices1[vertex].id))?;
    for (i, e) in ring1.iter().enumerate() {
        if ring0[(start + i) % ring0.len()] != *e {
            return Err(format!(
                "rotation at {:?} is not a local branched covering of its image",
                spec.vertices1[vertex].id
            ));
        }
    }
    Ok(())
}

pub fn local_degree(spec: &MapSpec, vertex: usize) -> Result<usize> {
    let up = spec.visits1(vertex);
    let down = spec.visits0(spec.vertices1[vertex].image);
    if down == 0 || !up.is_multiple_of(down) {
        return Err(Error::Complex(format!(
            "non-integral local degree at {:?}: {up} visits over {down}",
            spec.vertices1[vertex].id
        )));
    }
    Ok(up / down)
}

/// A 1-vertex that does not map homeomorphically onto its image.
#[derive(Clone, Debug)]
pub struct CriticalVertex {
    pub vertex: usize,
    pub id: String,
    pub local_degree: usize,
    pub colors: Vec<Color>,
    /// word1 positions of the visits
    pub positions: Vec<usize>,
    /// chord-diagram regions covering their image region more than once
    pub branched_regions: Vec<Region>,
}

impl CriticalVertex {
    pub fn has_color(&self, color: Color) -> bool {
        self.colors.contains(&color)
    }
}

/// Regions of `diagram1` (at a 1-vertex) that cover their image region with
/// degree > 1, detected by comparing passage counts.
fn branched_regions(
    spec: &MapSpec,
    diagram1: &ChordDiagram,
    diagram0: &ChordDiagram,
) -> Vec<Region> {
    let k = spec.k();
    let slot0: HashMap<EdgeEnd, usize> = diagram0.slots.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    diagram1
        .regions
        .iter()
        .filter(|region| {
            let c = region.corners[0];
            let left = diagram1.slots[c];
            let image_slot = slot0[&EdgeEnd::new(left.position % k, left.end)];
            let image_region = &diagram0.regions[diagram0.region_of_corner(image_slot)];
            region.passages.len() > image_region.passages.len()
        })
        .cloned()
        .collect()
}

/// All 1-vertices of local degree at least 2, with their colors.
pub fn critical_vertices(spec: &MapSpec) -> Result<Vec<CriticalVertex>> {
    let view0 = spec.view(Level::Zero);
    let view1 = spec.view(Level::One);
    let tiles0 = trace_faces(&view0)?;
    let tiles1 = trace_faces(&view1)?;
    let mut out = Vec::new();
    for (v, vertex) in spec.vertices1.iter().enumerate() {
        let degree = local_degree(spec, v)?;
        if degree < 2 {
            continue;
        }
        check_covering(spec, v, degree).map_err(Error::Complex)?;
        let diagram1 = build_chord_diagram(&view1, &tiles1, v)?;
        let diagram0 = build_chord_diagram(&view0, &tiles0, vertex.image)?;
        let regions = branched_regions(spec, &diagram1, &diagram0);
        let mut colors: Vec<Color> = regions.iter().map(|r| r.color).collect();
        colors.sort();
        colors.dedup();
        out.push(CriticalVertex {
            vertex: v,
            id: vertex.id.clone(),
            local_degree: degree,
            colors,
            positions: view1.visits(v),
            branched_regions: regions,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// validation

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub check: &'static str,
    pub ok: bool,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub findings: Vec<Finding>,
    /// Σ over 1-vertices of (local degree − 1), when computable
    pub riemann_hurwitz: Option<usize>,
}

impl ValidationReport {
    fn record(&mut self, check: &'static str, result: std::result::Result<String, String>) {
        let (ok, message) = match result {
            Ok(m) => (true, m),
            Err(m) => (false, m),
        };
        self.findings.push(Finding { check, ok, message });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| !f.ok)
    }

    pub fn first_failure(&self) -> Option<&Finding> {
        self.failures().next()
    }
}

fn markers_cyclically_increasing(markers: &[usize], len: usize) -> bool {
    let origin = markers[0];
    let shifted: Vec<usize> = markers.iter().map(|m| (m + len - origin) % len).collect();
    shifted.windows(2).all(|w| w[0] < w[1])
}

pub(crate) fn check_markers(spec: &MapSpec) -> Result<()> {
    if markers_cyclically_increasing(&spec.markers, spec.word1.len()) {
        Ok(())
    } else {
        Err(Error::MarkersNotIncreasing)
    }
}

fn check_invariance(spec: &MapSpec) -> std::result::Result<String, String> {
    let k = spec.k();
    for (j, w) in spec.word1.iter().enumerate() {
        let below = &spec.word0[j % k];
        if w.image_edge != below.edge {
            return Err(format!(
                "fully invariant condition violated: word1 position {j} is labelled {} but lies over {}",
                spec.edges0[w.image_edge], spec.edges0[below.edge]
            ));
        }
        let vertex = &spec.vertices1[w.to];
        if vertex.image != below.to {
            return Err(format!(
                "fully invariant condition violated: 1-vertex {:?} at position {j} maps to {} but lies over {}",
                vertex.id, spec.post[vertex.image], spec.post[below.to]
            ));
        }
    }
    Ok(format!("f∘γ¹ = γ⁰∘q_{} holds along all {} positions", spec.degree, spec.word1.len()))
}

fn check_post_points(spec: &MapSpec) -> std::result::Result<String, String> {
    for (p, name) in spec.post.iter().enumerate() {
        if spec.post_as_vertex1(p).is_none() {
            return Err(format!("post point {name:?} is not a 1-vertex"));
        }
        if spec.visits0(p) == 0 {
            return Err(format!("post point {name:?} is not visited by γ⁰"));
        }
    }
    Ok("every post point is visited and lies in V¹".into())
}

fn check_crossings(view: &CurveView, level: Level) -> std::result::Result<String, String> {
    for v in 0..view.names.len() {
        if let Some((a, b)) = passage_chords(view, v).as_deref().and_then(crossing_passages) {
            return Err(format!(
                "curve not oriented at level {}: passages {a} and {b} cross at {:?}",
                level.index(),
                view.names[v]
            ));
        }
    }
    Ok(format!("chords non-crossing at every level-{} vertex", level.index()))
}

fn check_sides(view: &CurveView, tiles: &TileComplex, level: Level) -> std::result::Result<String, String> {
    let white_left = tiles.left_color(0);
    for edge in 1..view.len() {
        if tiles.left_color(edge) != white_left {
            return Err(format!(
                "curve not oriented at level {}: white tile switches sides at edge {edge}",
                level.index()
            ));
        }
    }
    Ok(format!("white tiles on one side of every level-{} edge", level.index()))
}

/// Checks every structural and semantic invariant; failures become findings.
pub fn validate(spec: &MapSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = spec.k();
    let d = spec.degree as usize;
    report.record(
        "word_length",
        if spec.word1.len() == d * k {
            Ok(format!("|word1| = {} = d·k", spec.word1.len()))
        } else {
            Err("word length mismatch".into())
        },
    );
    report.record("fully_invariant", check_invariance(spec));
    report.record(
        "markers",
        if markers_cyclically_increasing(&spec.markers, spec.word1.len()) {
            Ok("markers strictly increasing in cyclic order".into())
        } else {
            Err("markers not strictly cyclically increasing".into())
        },
    );
    report.record("post_points", check_post_points(spec));

    let mut tiles = Vec::new();
    for level in [Level::Zero, Level::One] {
        let view = spec.view(level);
        let check = if level == Level::Zero { "tiling0" } else { "tiling1" };
        let oriented = if level == Level::Zero { "oriented0" } else { "oriented1" };
        report.record(oriented, check_crossings(&view, level));
        match trace_faces(&view) {
            Ok(t) => {
                let chi = t.euler_characteristic();
                report.record(
                    check,
                    if chi == 2 {
                        Ok(format!(
                            "V − E + F = {} − {} + {} = 2",
                            t.vertex_count,
                            t.edge_count,
                            t.faces.len()
                        ))
                    } else {
                        Err(format!("Euler characteristic {chi}, expected 2"))
                    },
                );
                let sides = if level == Level::Zero { "sides0" } else { "sides1" };
                report.record(sides, check_sides(&view, &t, level));
                tiles.push(t);
            }
            Err(e) => report.record(check, Err(e.to_string())),
        }
    }

    if tiles.len() == 2 && report.failures().next().is_none() {
        let mut total = 0usize;
        let mut covering: std::result::Result<String, String> =
            Ok("every 1-vertex is a local branched covering of its image".into());
        for v in 0..spec.vertices1.len() {
            match local_degree(spec, v) {
                Ok(deg) => {
                    total += deg - 1;
                    if let Err(m) = check_covering(spec, v, deg) {
                        covering = Err(m);
                        break;
                    }
                }
                Err(e) => {
                    covering = Err(e.to_string());
                    break;
                }
            }
        }
        let covering_ok = covering.is_ok();
        report.record("covering", covering);
        if covering_ok {
            report.riemann_hurwitz = Some(total);
            report.record(
                "riemann_hurwitz",
                if total == 2 * d - 2 {
                    Ok(format!("Σ(deg − 1) = {total} = 2d − 2"))
                } else {
                    Err(format!("Σ(deg − 1) = {total}, expected 2d − 2 = {}", 2 * d - 2))
                },
            );
        }
    }
    report.passed = report.findings.iter().all(|f| f.ok);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    fn fixture(name: &str) -> Value {
        let path = format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"));
        serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
    }

    fn parse_value(v: &Value) -> Result<MapSpec> {
        parse(v.to_string().as_bytes())
    }

    fn meyer() -> MapSpec {
        parse_value(&fixture("meyer_example.json")).unwrap()
    }

    fn structure_error(v: &Value) -> String {
        match parse_value(v) {
            Err(Error::Structure(m)) => m,
            other => panic!("expected a structure error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_bad_files() {
        let base = fixture("meyer_example.json");

        let mut v = base.clone();
        v["degree"] = json!(1);
        assert!(structure_error(&v).contains("degree"));

        let mut v = base.clone();
        v["word1"].as_array_mut().unwrap().pop();
        assert!(structure_error(&v).contains("word length mismatch"));

        let mut v = base.clone();
        v["word0"][0]["to"] = json!("nowhere");
        assert!(structure_error(&v).contains("nowhere"));

        let mut v = base.clone();
        v["markers"][0] = json!(0);
        assert!(structure_error(&v).contains("marker/image contradiction"));

        let mut v = base.clone();
        v["extra"] = json!(1);
        assert!(matches!(parse_value(&v), Err(Error::Syntax(_))));

        assert!(matches!(parse(b"{"), Err(Error::Syntax(_))));
    }

    #[test]
    fn marker_labels_prime_repeat_visits() {
        assert_eq!(meyer().marker_labels(), ["p2", "p3", "p0", "p1", "p0'", "p3'"]);
    }

    #[test]
    fn tilings_are_spheres() {
        let spec = meyer();
        for level in [Level::Zero, Level::One] {
            let tiles = faces(&spec, level).unwrap();
            assert_eq!(tiles.euler_characteristic(), 2);
            for edge in 0..tiles.edge_count {
                let left = tiles.face_of(Dart { edge, forward: true });
                let right = tiles.face_of(Dart { edge, forward: false });
                assert_ne!(tiles.colors[left], tiles.colors[right]);
            }
        }
        // γ⁰ has 4 vertices and 6 edges, so 4 tiles
        assert_eq!(faces(&spec, Level::Zero).unwrap().faces.len(), 4);
    }

    #[test]
    fn chord_diagram_at_the_white_critical_vertex() {
        let spec = meyer();
        let diagram = chord_diagram(&spec, "c1", Level::One).unwrap();
        assert_eq!(diagram.chords.len(), 2);
        let white: Vec<&Region> = diagram.connections(Color::White).collect();
        assert_eq!(white.len(), 1);
        assert_eq!(white[0].passages, vec![3, 9]);
        assert_eq!(diagram.connections(Color::Black).count(), 0);
        // a vertex visited once has a single chord and no connections
        let simple = chord_diagram(&spec, "p2", Level::Zero).unwrap();
        assert_eq!(simple.regions.len(), 2);
        assert!(simple.regions.iter().all(|r| r.passages == vec![0]));
    }

    #[test]
    fn critical_vertices_of_the_example() {
        let spec = meyer();
        let crit = critical_vertices(&spec).unwrap();
        let summary: Vec<(&str, usize, Vec<Color>)> =
            crit.iter().map(|c| (c.id.as_str(), c.local_degree, c.colors.clone())).collect();
        assert_eq!(summary, vec![("c1", 2, vec![Color::White]), ("c2", 2, vec![Color::Black])]);
        for v in 0..spec.vertices1.len() {
            let expected = if spec.vertices1[v].id.starts_with('c') { 2 } else { 1 };
            assert_eq!(local_degree(&spec, v).unwrap(), expected);
        }
    }

    #[test]
    fn validation_outcomes() {
        let report = validate(&meyer());
        assert!(report.passed, "{:?}", report.first_failure());
        assert_eq!(report.riemann_hurwitz, Some(2));

        let sym = parse_value(&fixture("symmetric_jordan.json")).unwrap();
        assert!(validate(&sym).passed);

        let reversed = parse_value(&fixture("reversed.json")).unwrap();
        let report = validate(&reversed);
        let first = report.first_failure().unwrap();
        assert_eq!(first.check, "fully_invariant");
        assert!(first.message.contains("fully invariant condition violated"));
    }

    #[test]
    fn crossing_rotation_is_not_oriented() {
        let mut v = fixture("meyer_example.json");
        v["rotation0"]["p3"] = json!([[1, "in"], [5, "in"], [1, "out"], [5, "out"]]);
        let spec = parse_value(&v).unwrap();
        let report = validate(&spec);
        assert!(!report.passed);
        assert!(report.failures().any(|f| f.message.contains("curve not oriented")));
        assert!(chord_diagram(&spec, "p3", Level::Zero).is_err());
    }

    #[test]
    fn broken_covering_is_reported() {
        let mut v = fixture("meyer_example.json");
        // keep the passages uncrossed but start the ring on the other visit
        v["rotation1"]["c1"] = json!([[9, "in"], [3, "out"], [3, "in"], [9, "out"]]);
        let spec = parse_value(&v).unwrap();
        assert!(!validate(&spec).passed);
    }
}
