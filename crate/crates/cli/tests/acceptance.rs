//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coarsedim::cover::{build_brick_cover, build_coasdim_certificate, build_grid_families, build_grid_families_with, build_line_families, TailRule};
use coarsedim::families::{set_diameter, AxisPiece, BoxFamily, Checker};
use coarsedim::obstruction::{exhaustive_lebesgue, obstruction_run, Adjacency, CandidateFamily, ObstructionCandidate, ObstructionWitness, Verdict};
use coarsedim::ordinal::{ord_of, Ordinal, SetSystem};
use coarsedim::space::{dist, level_offset, membership, padded_max_dist, window_points};
use coarsedim::{Limits, Point, Window};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("grid construction suite", grid_suite),
        ("line families worked example", line_example),
        ("exhaustive Lebesgue suite", exhaustive_suite),
        ("obstruction pipeline soundness", obstruction_soundness),
        ("ordinal suite", ordinal_suite),
        ("metric suite", metric_suite),
        ("coasdim certificate", certificate),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = check();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {}: {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn grid_suite() -> Outcome {
    let t = Instant::now();
    let checker = Checker::symbolic();
    let mut levels = 0;
    for k in 1..=3i64 {
        for n in 6 * k..=6 * k + 12 {
            let g = build_grid_families(n, k).map_err(|e| e.to_string())?;
            let w = Window::new(n as usize, 0, 4 * n).map_err(|e| e.to_string())?;
            for f in [&g.u0, &g.u1] {
                let d = checker.verify_disjoint(f, k as u64, &w).map_err(|e| e.to_string())?;
                ensure(d.verdict, || format!("{} not {k}-disjoint at n={n}: {d}", f.label()))?;
                let b = checker.verify_bounded(f, 3 * k as u64, &w).map_err(|e| e.to_string())?;
                ensure(b.verdict, || format!("{} not {}-bounded at n={n}: {b}", f.label(), 3 * k))?;
            }
            let c = checker.verify_cover(&[&g.u0, &g.u1], &w).map_err(|e| e.to_string())?;
            ensure(c.verdict, || format!("no cover at n={n}, k={k}: {c}"))?;
            levels += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    // the untrimmed tail is kept for comparison and is expected to fail
    let full = build_grid_families_with(6, 1, TailRule::Full).map_err(|e| e.to_string())?;
    let w = Window::new(6, 0, 24).map_err(|e| e.to_string())?;
    let lit = checker.verify_disjoint(&full.u1, 1, &w).map_err(|e| e.to_string())?;
    Ok(format!(
        "{levels} levels verified; untrimmed tail 1-disjoint at n=6: {}",
        lit.verdict
    ))
}

fn line_example() -> Outcome {
    let lf = build_line_families(6, 1).map_err(|e| e.to_string())?;
    let w = Window::new(1, 0, 30).map_err(|e| e.to_string())?;
    let hand: [Vec<(i64, i64)>; 3] = [
        (-1..=6).map(|i| (6 * i - 1, 6 * i + 1)).collect(),
        (-1..=6).map(|i| (6 * i + 2, 6 * i + 3)).collect(),
        (-1..=6).flat_map(|i| [(6 * i + 1, 6 * i + 2), (6 * i + 3, 6 * i + 6)]).collect(),
    ];
    let clip = |boxes: &[(i64, i64)]| -> BTreeSet<Vec<i64>> {
        boxes
            .iter()
            .map(|&(a, b)| (a.max(0)..=b.min(30)).collect::<Vec<_>>())
            .filter(|m| !m.is_empty())
            .collect()
    };
    for (f, h) in [&lf.v0, &lf.v1, &lf.v2].into_iter().zip(&hand) {
        let pf = f.materialize(&w, &Limits::default()).map_err(|e| e.to_string())?;
        let got: BTreeSet<Vec<i64>> = pf
            .members
            .iter()
            .map(|m| m.iter().map(|p| p[0]).collect())
            .collect();
        let want = clip(h);
        ensure(got == want, || format!("{} differs: got {got:?}, want {want:?}", f.label()))?;
    }
    let pw = Checker::pointwise();
    for f in [&lf.v0, &lf.v1, &lf.v2] {
        ensure(pw.verify_disjoint(f, 1, &w).map_err(|e| e.to_string())?.verdict, || format!("{} not 1-disjoint", f.label()))?;
        ensure(pw.verify_bounded(f, 3, &w).map_err(|e| e.to_string())?.verdict, || format!("{} not 3-bounded", f.label()))?;
    }
    let cov = pw.verify_cover(&[&lf.v0, &lf.v1, &lf.v2], &w).map_err(|e| e.to_string())?;
    ensure(cov.verdict, || format!("no cover: {cov}"))?;
    Ok("three families match on [0,30]".into())
}

fn exhaustive_suite() -> Outcome {
    let mut parts = Vec::new();
    for (dim, side, sets) in [(2, 3, 2), (3, 2, 3)] {
        let s = exhaustive_lebesgue(dim, side, sets, Adjacency::Closed).map_err(|e| e.to_string())?;
        ensure(s.missing == 0 && s.rejected == 0 && s.witnessed == s.labelings, || format!("{s:?}"))?;
        parts.push(format!("{}^{dim} cells, {sets} sets: {} witnessed", side, s.witnessed));
    }
    Ok(parts.join(", "))
}

/// Bricks of diameter `3r` shifted by `(sx, sy)`.
fn shifted_bricks(r: i64, sx: i64, sy: i64) -> BoxFamily {
    let piece = |s: i64, b: bool| {
        let lo = s + if b { 3 * r } else { 0 };
        AxisPiece::periodic(lo, lo + 3 * r, 6 * r)
    };
    let templates = (0..4).map(|p| vec![piece(sx, p & 2 != 0), piece(sy, p & 1 != 0)]).collect();
    BoxFamily::new(2, "V0", templates).expect("distinct bricks")
}

/// Boxes placed one by one, each kept only if it is `sep` away from the rest.
fn greedy_far_boxes(rng: &mut ChaCha8Rng, side: i64, bound: i64, sep: i64) -> BoxFamily {
    let mut boxes: Vec<Vec<(i64, i64)>> = Vec::new();
    for _ in 0..rng.gen_range(0..6) {
        let w = rng.gen_range(0..=bound.min(side / 4));
        let x0 = rng.gen_range(0..=side - w);
        let (y0, y1) = if rng.gen_bool(0.5) {
            let y = 2 * rng.gen_range(0..=side / 2);
            (y, y)
        } else {
            let y = rng.gen_range(0..=side - w);
            (y, y + w)
        };
        let cand = vec![(x0, x0 + w), (y0, y1)];
        let gap = |b: &Vec<(i64, i64)>| {
            (0..2)
                .map(|a| (b[a].0 - cand[a].1).max(cand[a].0 - b[a].1).max(0))
                .max()
                .unwrap()
        };
        if boxes.iter().all(|b| gap(b) >= sep) {
            boxes.push(cand);
        }
    }
    BoxFamily::fixed(2, "V1", &boxes).expect("separated boxes")
}

fn verify_beta(c: &ObstructionCandidate, side: u64, w: &ObstructionWitness) -> Result<(), String> {
    let ObstructionWitness::Skeleton { path, diameter, bound, .. } = w else {
        return Err(format!("unexpected witness {w:?}"));
    };
    let s = side as i64;
    ensure(path.first().map(|p| p.coords()[0]) == Some(0), || "path does not start on x0 = 0".into())?;
    ensure(path.last().map(|p| p.coords()[0]) == Some(s), || format!("path does not end on x0 = {s}"))?;
    ensure(path.windows(2).all(|p| padded_max_dist(p[0].coords(), p[1].coords()) == 1), || "path has a gap".into())?;
    let boxes: Vec<&BoxFamily> = c
        .families
        .iter()
        .map(|f| match f {
            CandidateFamily::Boxes(b) => b,
            CandidateFamily::Points(_) => unreachable!(),
        })
        .collect();
    for p in path {
        let x = p.coords();
        ensure(membership(x, 2) == Ok(true), || format!("{x:?} not in the space"))?;
        ensure(x.iter().all(|&v| (0..=s).contains(&v)), || format!("{x:?} outside the cube"))?;
        ensure(boxes[0].contains(x), || format!("{x:?} not in V0"))?;
        ensure(boxes[1..].iter().all(|f| !f.contains(x)), || format!("{x:?} meets a later family"))?;
    }
    let pts: Vec<Vec<i64>> = path.iter().map(|p| p.coords().to_vec()).collect();
    let d = set_diameter(&pts);
    ensure(d == *diameter && d > c.bound && *bound == c.bound, || format!("diameter {d} vs reported {diameter}, bound {}", c.bound))
}

fn obstruction_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let limits = Limits::default();
    let (mut runs, mut found, mut quiet) = (0, 0, 0);
    while runs < 120 {
        let side = rng.gen_range(12..=60) * 2;
        let k = rng.gen_range(1..=2u64);
        let n = rng.gen_range(1..=3u64);
        let r = rng.gen_range(1..=(side as i64 / 2 - 1) / 3);
        let bound = rng.gen_range(3 * r..side as i64 / 2) as u64;
        let v0 = shifted_bricks(r, rng.gen_range(0..6 * r), rng.gen_range(0..6 * r));
        let v1 = greedy_far_boxes(&mut rng, side as i64, bound as i64, n as i64 + 8);
        let c = ObstructionCandidate {
            m: 1,
            k,
            n,
            bound,
            side: Some(side),
            families: vec![CandidateFamily::Boxes(v0), CandidateFamily::Boxes(v1)],
        };
        let rep = obstruction_run(&c, &limits).map_err(|e| format!("run {runs}: {e}"))?;
        match rep.verdict {
            Verdict::ViolationFound => {
                let w = rep.witness.as_ref().ok_or("violation without witness")?;
                verify_beta(&c, rep.side, w).map_err(|e| format!("run {runs}: {e}"))?;
                found += 1;
            }
            Verdict::NoViolation => quiet += 1,
            Verdict::InvalidInput => return Err(format!("run {runs}: genuine cover reported invalid: {:?}", rep.witness)),
        }
        runs += 1;
    }
    Ok(format!("{runs} candidates, {found} witnesses re-verified, {quiet} without violation"))
}

/// The rank straight from its recursive definition.
fn brute_ord(m: &SetSystem) -> Ordinal {
    if m.is_empty() {
        return Ordinal::ZERO;
    }
    let support: Vec<u32> = m.support().into_iter().collect();
    let mut best = Ordinal::ZERO;
    for &e in &support {
        let sub = SetSystem::new(
            m.members()
                .iter()
                .filter(|s| s.contains(&e))
                .map(|s| s.iter().copied().filter(|&x| x != e).collect::<Vec<_>>()),
        );
        best = best.max(brute_ord(&sub).successor());
    }
    best
}

fn ordinal_suite() -> Outcome {
    ensure(ord_of(&SetSystem::empty()) == Ordinal::ZERO, || "ord(empty) != 0".into())?;
    ensure(ord_of(&SetSystem::new([[1u32]])) == Ordinal::finite(1), || "ord({{1}}) != 1".into())?;
    for m in 1..=4 {
        let p = SetSystem::powerset(m);
        let (got, oracle) = (ord_of(&p), brute_ord(&p));
        ensure(got == Ordinal::finite(m as u64) && oracle == got, || format!("powerset {m}: {got} vs oracle {oracle}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random_set = |rng: &mut ChaCha8Rng| -> Vec<u32> { (1..=6).filter(|_| rng.gen_bool(0.4)).collect() };
    let mut violations = 0;
    for _ in 0..1000 {
        let big: Vec<Vec<u32>> = (0..rng.gen_range(0..10)).map(|_| random_set(&mut rng)).collect();
        let small: Vec<Vec<u32>> = big.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let (n, m) = (SetSystem::new(big), SetSystem::new(small));
        if !m.is_subset(&n) || ord_of(&m) > ord_of(&n) || ord_of(&n) != brute_ord(&n) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} monotonicity violations"))?;
    Ok("1000 random pairs, 0 violations".into())
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    let level = rng.gen_range(1..=6usize);
    let free = rng.gen_range(0..level);
    let coords = (0..level)
        .map(|i| {
            if i == free {
                rng.gen_range(-20..=20)
            } else {
                level as i64 * rng.gen_range(-3..=3)
            }
        })
        .collect();
    Point::new(level, coords).expect("one free coordinate")
}

fn metric_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..100_000 {
        let (a, b, c) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        let (ab, ba, bc, ac) = (dist(&a, &b), dist(&b, &a), dist(&b, &c), dist(&a, &c));
        ensure(ab == ba, || format!("triple {i}: asymmetric"))?;
        ensure((ab == 0) == (a == b) && dist(&a, &a) == 0, || format!("triple {i}: identity fails"))?;
        ensure(ac <= ab + bc, || format!("triple {i}: triangle fails for {a:?} {b:?} {c:?}"))?;
    }
    for l in 1..=6usize {
        for k in l + 1..=6 {
            let pa = window_points(&Window::new(l, -3, 3).unwrap(), &Limits::default()).map_err(|e| e.to_string())?;
            let pb = window_points(&Window::new(k, -3, 3).unwrap(), &Limits::default()).map_err(|e| e.to_string())?;
            let min = pa.iter().flat_map(|a| pb.iter().map(move |b| dist(a, b))).min().unwrap();
            ensure(min == level_offset(l, k), || format!("levels {l},{k}: min {min} vs offset {}", level_offset(l, k)))?;
        }
    }
    Ok("100000 triples, 15 level pairs".into())
}

fn certificate() -> Outcome {
    let mut parts = Vec::new();
    for r in [1, 2, 4] {
        let cert = build_coasdim_certificate(1, 96, 8, r).map_err(|e| e.to_string())?;
        let rep = cert.verify(&Checker::symbolic()).map_err(|e| e.to_string())?;
        let failing: Vec<String> = rep
            .checks
            .iter()
            .filter(|c| !c.report.verdict)
            .map(|c| format!("{} level {} {:?}", c.family, c.level, c.check))
            .collect();
        ensure(rep.verdict, || format!("r={r}: {}", failing.join(", ")))?;
        parts.push(format!("r={r}: {} checks", rep.checks.len()));
    }
    ensure(build_brick_cover(2, 4).is_ok(), || "brick cover".into())?;
    Ok(parts.join(", "))
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_coarsedim"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("coarsedim-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let lf = dir.join("line.json");
    let sec = dir.join("section.json");
    std::fs::write(&lf, cli(&["gen-cover", "--k", "1", "--n", "6"])?).map_err(|e| e.to_string())?;
    std::fs::write(&sec, cli(&["gen-cover", "--k", "1", "--n", "6", "--grid", "--section", "2"])?).map_err(|e| e.to_string())?;
    let (lf, sec) = (lf.to_str().unwrap(), sec.to_str().unwrap());
    let runs: [&[&str]; 5] = [
        &["gen-cover", "--k", "1", "--n", "6", "--grid"],
        &["verify-cover", "--input", lf, "--r", "1", "--bound", "3", "--window", "0:30"],
        &["cert-coasdim", "--k", "1", "--n-max", "8", "--window", "96", "--verify"],
        &["a-set", "--sigma", "2", "--level", "2", "--window", "0:4", "--bound", "2"],
        &["emit-svg", "--input", sec, "--window", "0:24"],
    ];
    for args in runs {
        let (a, b) = (cli(args)?, cli(args)?);
        ensure(a == b, || format!("{} differs between runs", args[0]))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands repeated byte-identically", runs.len()))
}
