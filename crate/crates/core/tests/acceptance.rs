//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the verdict lines always reach standard output.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use unmate::circle::{q_apply, q_preimages, Angle};
use unmate::complex::{critical_vertices, load, validate, Color, MapSpec};
use unmate::laminations::{depth1, pullback_step, AngleClasses};
use unmate::parameterize::{marker_images, pullback_parameters, solve_parameters};
use unmate::portraits::{extract_portraits, CriticalPortrait, Status};
use unmate::spectral::{certify_perron, integer_nullspace, interval_lengths, transition_matrix, TransitionMatrix};
use unmate::{run_pipeline, PipelineOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn negative(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn validating() -> Vec<(&'static str, MapSpec)> {
    ["meyer_example.json", "symmetric_jordan.json"]
        .into_iter()
        .map(|n| (n, load(fixture(n)).expect("fixture parses")))
        .collect()
}

fn a(p: i64, q: i64) -> Angle {
    Angle::new(p, q)
}

fn r(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn set(angles: &[Angle]) -> BTreeSet<Angle> {
    angles.iter().cloned().collect()
}

// ---------------------------------------------------------------------------

fn ac1() -> Outcome {
    let start = Instant::now();
    let spec = load(fixture("meyer_example.json")).map_err(|e| e.to_string())?;
    let result = run_pipeline(&spec, PipelineOptions { branch: 0, depth: 1 }).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected: Vec<Vec<u64>> = vec![
        vec![0, 1, 0, 0, 0, 0],
        vec![0, 0, 1, 1, 0, 0],
        vec![0, 0, 0, 0, 1, 0],
        vec![1, 1, 0, 0, 0, 1],
        vec![0, 0, 1, 1, 0, 0],
        vec![1, 0, 0, 0, 1, 1],
    ];
    ensure(result.matrix.entries == expected, "transition matrix differs")?;
    let v: Vec<BigInt> = [1, 2, 1, 3, 2, 3].iter().map(|&x| BigInt::from(x)).collect();
    ensure(result.lengths.eigenvector == v, "eigenvector not [1,2,1,3,2,3]")?;
    let lengths = vec![r(1, 12), r(1, 6), r(1, 12), r(1, 4), r(1, 6), r(1, 4)];
    ensure(result.lengths.lengths == lengths, "lengths differ")?;
    let params = set(&[a(1, 12), a(1, 6), a(1, 3), a(5, 12), a(2, 3), a(5, 6)]);
    ensure(set(&result.parameters.t) == params, "marker parameters differ")?;
    ensure(result.white.angle_sets() == vec![vec![a(5, 24), a(17, 24)]], "P_w differs")?;
    ensure(result.black.angle_sets() == vec![vec![a(1, 24), a(13, 24)]], "P_b differs")?;
    ensure(elapsed.as_secs_f64() < 1.0, format!("took {elapsed:?}"))?;
    Ok(format!("matrix, eigenvector, lengths, parameters and both portraits exact in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

/// Power iteration on `A + I`, in floating point.
fn power_iteration(a: &TransitionMatrix) -> Vec<f64> {
    let k = a.size();
    let mut v = vec![1.0 / k as f64; k];
    for _ in 0..5000 {
        let mut w: Vec<f64> = (0..k)
            .map(|i| v[i] + (0..k).map(|j| a.entries[i][j] as f64 * v[j]).sum::<f64>())
            .collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        v = w;
    }
    v
}

fn ac2() -> Outcome {
    let mut checked = Vec::new();
    for (name, spec) in validating() {
        let m = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let d = BigInt::from(spec.degree);
        let shifted: Vec<Vec<BigInt>> = (0..m.size())
            .map(|i| {
                (0..m.size())
                    .map(|j| BigInt::from(m.entries[i][j]) - if i == j { d.clone() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        let basis = integer_nullspace(&shifted);
        ensure(basis.len() == 1, format!("{name}: nullspace dimension {}", basis.len()))?;
        let lv = certify_perron(&m, spec.degree).map_err(|e| format!("{name}: {e}"))?;
        ensure(lv.eigenvector.iter().all(|x| x.is_positive()), format!("{name}: not positive"))?;
        let av = m.apply(&lv.eigenvector);
        let dv: Vec<BigInt> = lv.eigenvector.iter().map(|x| x * &d).collect();
        ensure(av == dv, format!("{name}: A v ≠ d v"))?;
        let approx = power_iteration(&m);
        for (x, y) in lv.lengths.iter().zip(&approx) {
            let x = x.to_f64().unwrap();
            ensure((x - y).abs() < 1e-9, format!("{name}: power iteration differs by {}", (x - y).abs()))?;
        }
        checked.push(name);
    }
    Ok(format!("1-dimensional positive eigenspace, A v = d v, float oracle within 1e-9 on {}", checked.join(", ")))
}

fn check_parameters(t: &[Angle], image: &[usize], intervals: &[BigRational], degree: u32) -> Result<(), String> {
    let k = t.len();
    for i in 0..k {
        ensure(q_apply(&t[i], degree) == t[image[i]], format!("q(t[{i}]) ≠ t[image[{i}]]"))?;
    }
    let total = (0..k).fold(BigRational::zero(), |acc, i| {
        let gap = t[(i + k - 1) % k].gap_to(&t[i]);
        acc + if gap.is_zero() { BigRational::one() } else { gap }
    });
    ensure(total == BigRational::one(), "gaps do not sum to 1")?;
    for i in 0..k {
        ensure(t[(i + k - 1) % k].gap_to(&t[i]) == intervals[i], format!("gap {i} differs from its length"))?;
    }
    let all = set(t);
    ensure(t.iter().all(|x| all.contains(&q_apply(x, degree))), "not forward invariant")?;
    Ok(())
}

fn ac3() -> Outcome {
    let mut runs = 0;
    for (name, spec) in validating() {
        let lv = certify_perron(&transition_matrix(&spec).map_err(|e| e.to_string())?, spec.degree)
            .map_err(|e| e.to_string())?;
        let intervals = interval_lengths(&spec, &lv);
        let image = marker_images(&spec);
        for branch in 0..spec.degree - 1 {
            let reference = solve_parameters(&intervals, &image, spec.degree, 0, branch).map_err(|e| e.to_string())?;
            for base in 0..spec.k() {
                let p = solve_parameters(&intervals, &image, spec.degree, base, branch)
                    .map_err(|e| format!("{name} base {base}: {e}"))?;
                ensure(p.t == reference.t, format!("{name}: base {base} gives other parameters"))?;
                check_parameters(&p.t, &image, &intervals, spec.degree).map_err(|e| format!("{name}: {e}"))?;
                runs += 1;
            }
            let s = pullback_parameters(&reference, &spec).map_err(|e| e.to_string())?;
            let lifted: BTreeSet<Angle> = reference.t.iter().flat_map(|x| q_preimages(x, spec.degree)).collect();
            ensure(set(&s.s) == lifted, format!("{name}: γ¹ parameters are not the full preimage"))?;
        }
    }
    // a degree-3 circle with two fixed markers exercises a nonzero branch
    let intervals = [r(1, 2), r(1, 2)];
    for branch in 0..2 {
        for base in 0..2 {
            let p = solve_parameters(&intervals, &[0, 1], 3, base, branch).map_err(|e| e.to_string())?;
            check_parameters(&p.t, &[0, 1], &intervals, 3)?;
            runs += 1;
        }
    }
    Ok(format!("{runs} (fixture, branch, base) solves consistent, invariant and base independent"))
}

fn ac4() -> Outcome {
    let spec = load(fixture("meyer_example.json")).map_err(|e| e.to_string())?;
    let result = run_pipeline(&spec, PipelineOptions { branch: 0, depth: 1 }).map_err(|e| e.to_string())?;
    for p in [&result.white, &result.black] {
        for c in ["c1", "c3", "c5", "c7"] {
            ensure(p.certificate.status(c) == Some(Status::Pass), format!("{} {c} does not pass", p.color))?;
        }
        for c in ["c2", "c4", "c6"] {
            ensure(p.certificate.status(c) == Some(Status::Vacuous), format!("{} {c} not vacuous", p.color))?;
        }
    }
    let mut with_third = result.white.angle_sets();
    with_third[0].push(a(1, 3));
    let p = CriticalPortrait::from_sets(Color::White, 2, with_third);
    ensure(p.certificate.status("c5") == Some(Status::Fail), "inserting 1/3 does not fail c5")?;
    let mut shorter = result.white.angle_sets();
    shorter[0].pop();
    let p = CriticalPortrait::from_sets(Color::White, 2, shorter);
    ensure(p.certificate.status("c1") == Some(Status::Fail), "deleting an angle does not fail c1")?;
    Ok("c1, c3, c5, c7 pass and c2, c4, c6 vacuous for both colors; 1/3 fails c5; deletion fails c1".into())
}

fn ac5() -> Outcome {
    let mut names = Vec::new();
    for (name, spec) in validating() {
        let result = run_pipeline(&spec, PipelineOptions { branch: 0, depth: 1 }).map_err(|e| e.to_string())?;
        let (w, b) = depth1(&spec, &result.pullback).map_err(|e| e.to_string())?;
        let (pw, pb) = extract_portraits(&spec, &result.pullback, &critical_vertices(&spec).unwrap())
            .map_err(|e| e.to_string())?;
        let sorted = |mut v: Vec<Vec<Angle>>| {
            v.sort();
            v
        };
        ensure(sorted(w.angle_sets()) == sorted(pw.angle_sets()), format!("{name}: white differs"))?;
        ensure(sorted(b.angle_sets()) == sorted(pb.angle_sets()), format!("{name}: black differs"))?;
        names.push(name);
    }
    Ok(format!("depth-1 classes equal portrait sets on {}", names.join(", ")))
}

// ---------------------------------------------------------------------------
// brute-force pullback oracle

fn position(x: &Angle, pts: &[&Angle]) -> usize {
    pts.iter().position(|p| *p == x).unwrap()
}

/// Chord `x y` crosses chord `p q` in the open disk, by sorting the four points.
fn chords_cross(x: &Angle, y: &Angle, p: &Angle, q: &Angle) -> bool {
    let mut pts = vec![x, y, p, q];
    pts.sort();
    pts.dedup();
    if pts.len() < 4 {
        return false;
    }
    let (i, j) = (position(x, &pts), position(y, &pts));
    let (lo, hi) = (i.min(j), i.max(j));
    let inside = |z: &Angle| {
        let k = position(z, &pts);
        lo < k && k < hi
    };
    inside(p) != inside(q)
}

fn polygons_cross(a: &[Angle], b: &[Angle]) -> bool {
    a.iter().any(|x| a.iter().any(|y| b.iter().any(|p| b.iter().any(|q| x != y && p != q && chords_cross(x, y, p, q)))))
}

fn merge_naive(mut sets: Vec<BTreeSet<Angle>>) -> Vec<Vec<Angle>> {
    loop {
        let mut merged = false;
        'scan: for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].is_disjoint(&sets[j]) {
                    let other = sets.remove(j);
                    sets[i].extend(other);
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<Vec<Angle>> = sets.into_iter().filter(|s| s.len() >= 2).map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}

/// Every choice of one preimage per angle, kept when each pair of chosen
/// angles can be joined without crossing a portrait chord.
fn brute_force_step(classes: &[Vec<Angle>], base: &[Vec<Angle>], portrait: &[Vec<Angle>], d: u32) -> Vec<Vec<Angle>> {
    let mut found: Vec<BTreeSet<Angle>> = base.iter().map(|c| c.iter().cloned().collect()).collect();
    for class in classes {
        let lifts: Vec<Vec<Angle>> = class.iter().map(|x| q_preimages(x, d)).collect();
        let m = class.len();
        let total = (d as usize).pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let choice: Vec<Angle> = (0..m)
                .map(|i| {
                    let pick = c % d as usize;
                    c /= d as usize;
                    lifts[i][pick].clone()
                })
                .collect();
            let consistent = choice.iter().all(|x| {
                choice.iter().all(|y| x == y || portrait.iter().all(|p| !polygons_cross(&[x.clone(), y.clone()], p)))
            });
            if consistent {
                found.push(choice.into_iter().collect());
            }
        }
    }
    merge_naive(found)
}

fn leaf_count(classes: &[Vec<Angle>]) -> usize {
    classes.iter().map(|c| if c.len() == 2 { 1 } else { c.len() }).sum()
}

fn planar(classes: &[Vec<Angle>]) -> bool {
    (0..classes.len()).all(|i| (i + 1..classes.len()).all(|j| !polygons_cross(&classes[i], &classes[j])))
}

fn ac6() -> Outcome {
    let spec = load(fixture("meyer_example.json")).map_err(|e| e.to_string())?;
    let result = run_pipeline(&spec, PipelineOptions { branch: 0, depth: 1 }).map_err(|e| e.to_string())?;
    let (w1, b1) = depth1(&spec, &result.pullback).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for (first, portrait) in [(w1, &result.white), (b1, &result.black)] {
        let chords = portrait.angle_sets();
        let mut current: AngleClasses = first.clone();
        let mut oracle = first.angle_sets();
        let mut previous = leaf_count(&oracle);
        let mut per_depth = vec![previous];
        for depth in 2..=6 {
            current = pullback_step(&current, &first, portrait).map_err(|e| e.to_string())?;
            oracle = brute_force_step(&oracle, &first.angle_sets(), &chords, spec.degree);
            ensure(current.angle_sets() == oracle, format!("{} depth {depth}: pullback differs from oracle", portrait.color))?;
            ensure(planar(&oracle), format!("{} depth {depth}: not planar", portrait.color))?;
            let leaves = current.leaves().leaves.len();
            ensure(leaves == leaf_count(&oracle), "leaf count mismatch")?;
            ensure(leaves >= previous, format!("{} depth {depth}: leaf count decreased", portrait.color))?;
            previous = leaves;
            per_depth.push(leaves);
        }
        counts.push(format!("{} leaves {:?}", portrait.color, per_depth));
    }
    Ok(format!("depths 2-6 equal brute-force lifts, planar; {}", counts.join("; ")))
}

fn ac7() -> Outcome {
    let reversed = load(fixture("reversed.json")).map_err(|e| e.to_string())?;
    let report = validate(&reversed);
    ensure(!report.passed, "reversed fixture validates")?;
    let f = report.first_failure().unwrap();
    ensure(
        f.check == "fully_invariant" && f.message.contains("fully invariant condition violated"),
        format!("unexpected first failure {}: {}", f.check, f.message),
    )?;
    let crossing = load(negative("crossing.json")).map_err(|e| e.to_string())?;
    let report = validate(&crossing);
    ensure(
        report.failures().any(|f| f.message.contains("curve not oriented")),
        "crossing fixture not reported as not oriented",
    )?;
    Ok("reversed fixture fails the fully invariant check; crossing chords report \"curve not oriented\"".into())
}

fn main() {
    let criteria: Vec<Criterion> =
        vec![("AC1", ac1), ("AC2", ac2), ("AC3", ac3), ("AC4", ac4), ("AC5", ac5), ("AC6", ac6), ("AC7", ac7)];
    let mut outcomes = Vec::new();
    for (name, check) in criteria {
        let outcome = check();
        match &outcome {
            Ok(msg) => println!("{name} PASS {msg}"),
            Err(msg) => println!("{name} FAIL {msg}"),
        }
        outcomes.push((name, outcome.is_ok()));
    }
    let shadows = outcomes.iter().filter(|(n, _)| ["AC3", "AC5", "AC6"].contains(n)).all(|(_, ok)| *ok);
    println!(
        "AC8 {} convergence of the curves and the infinite relations are out of scope; finite shadows AC3, AC5, AC6 {}",
        if shadows { "PASS" } else { "FAIL" },
        if shadows { "hold" } else { "do not hold" }
    );
    let failed = outcomes.iter().filter(|(_, ok)| !ok).count() + usize::from(!shadows);
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
