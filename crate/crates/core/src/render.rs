//! Static SVG pictures of class hulls in the unit disk.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::circle::Angle;
use crate::laminations::{AngleClass, AngleClasses};

const SIZE: f64 = 480.0;
const RADIUS: f64 = 200.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chord {
    pub from: Angle,
    pub to: Angle,
    pub white: bool,
    pub black: bool,
}

/// A unit disk with chords and angle ticks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SvgScene {
    pub title: String,
    pub chords: Vec<Chord>,
    pub ticks: Vec<Angle>,
}

impl SvgScene {
    pub fn new(title: impl Into<String>) -> SvgScene {
        SvgScene { title: title.into(), ..SvgScene::default() }
    }

    /// Adds one chord per leaf of every class and ticks at their angles.
    pub fn add_classes(&mut self, classes: &AngleClasses) {
        for class in &classes.classes {
            self.add_class(class);
        }
        self.ticks.sort();
        self.ticks.dedup();
    }

    fn add_class(&mut self, class: &AngleClass) {
        for leaf in class.leaves() {
            let (a, b) = leaf.endpoints();
            self.chords.push(Chord { from: a.clone(), to: b.clone(), white: class.white, black: class.black });
        }
        self.ticks.extend(class.angles.iter().cloned());
    }

    pub fn chord_count(&self) -> usize {
        self.chords.len()
    }
}

/// Screen point of angle `t`; the y axis is flipped so angles run counterclockwise.
fn point(t: &Angle, radius: f64) -> (f64, f64) {
    let theta = TAU * t.to_f64();
    (SIZE / 2.0 + radius * theta.cos(), SIZE / 2.0 - radius * theta.sin())
}

fn style(c: &Chord) -> &'static str {
    match (c.white, c.black) {
        (true, false) => "stroke=\"#3b6fb6\" stroke-width=\"1.5\"",
        (false, true) => "stroke=\"#b63b3b\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"",
        _ => "stroke=\"#6a3bb6\" stroke-width=\"2\"",
    }
}

pub fn render_svg(scene: &SvgScene) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE:.0}\" height=\"{SIZE:.0}\" viewBox=\"0 0 {SIZE:.0} {SIZE:.0}\">"
    );
    if !scene.title.is_empty() {
        let _ = writeln!(out, "  <title>{}</title>", escape(&scene.title));
    }
    let c = SIZE / 2.0;
    let _ = writeln!(
        out,
        "  <circle cx=\"{c:.6}\" cy=\"{c:.6}\" r=\"{RADIUS:.6}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>"
    );
    for chord in &scene.chords {
        let (x1, y1) = point(&chord.from, RADIUS);
        let (x2, y2) = point(&chord.to, RADIUS);
        let _ = writeln!(
            out,
            "  <line x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\" {}/>",
            style(chord)
        );
    }
    for t in &scene.ticks {
        let (x1, y1) = point(t, RADIUS);
        let (x2, y2) = point(t, RADIUS + 6.0);
        let (lx, ly) = point(t, RADIUS + 22.0);
        let _ = writeln!(
            out,
            "  <line x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\" stroke=\"#000000\" stroke-width=\"1\"/>"
        );
        let _ = writeln!(
            out,
            "  <text x=\"{lx:.6}\" y=\"{ly:.6}\" font-size=\"10\" text-anchor=\"middle\" dominant-baseline=\"middle\">{t}</text>"
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
