//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use holegraph::dataprep::classify_k_node;
use holegraph::detect::ReferenceDetector;
use holegraph::fdlayout::{
    dh_accept, fa2_attraction, fa2_repulsion, kk_stiffness_update, repulsion_forces, EngineConfig,
    Fa2Engine, Fa2Params, FixedEngine, KkParams, LayoutEngine,
};
use holegraph::holeid::{hole_identify, point_polygon_test, Contour};
use holegraph::model::{Hole, HoleCategory, NodeId, Point};
use holegraph::netgen::{generate, GenParams, NetKind};
use holegraph::pipeline::{run_pipeline, write_timeseries, PipelineConfig, StopCriteria, StopReason, CSV_HEADER};
use holegraph::raster::{Raster, RenderStyle, Rgb};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn grid12() -> Vec<GenParams> {
    let mut v = Vec::new();
    for kind in [NetKind::Sparse, NetKind::Uniform] {
        for n in [100, 200] {
            for d in [6.0, 8.0, 10.0] {
                v.push(GenParams { n, d, kind, seed: 1 });
            }
        }
    }
    v
}

fn oracle_closure() -> Outcome {
    let start = Instant::now();
    let rows: Vec<Result<(GenParams, Option<f64>, Option<f64>), String>> = grid12()
        .par_iter()
        .map(|p| {
            let net = generate(p).map_err(|e| e.to_string())?;
            let mut engine = FixedEngine::new(net.truth.coords.clone());
            let mut det = ReferenceDetector::new(RenderStyle::default());
            let out = run_pipeline(
                &net.topology,
                &mut engine,
                &mut det,
                &StopCriteria::default(),
                Some(&net.truth),
                &PipelineConfig::default(),
            )
            .map_err(|e| e.to_string())?;
            let c = out.final_confusion().ok_or("no evaluation")?;
            Ok((*p, c.sensitivity(), c.specificity()))
        })
        .collect();
    let elapsed = start.elapsed();
    let mut bad = Vec::new();
    for r in rows {
        match r {
            Ok((_, s, sp)) if s == Some(1.0) && sp == Some(1.0) => {}
            Ok((p, s, sp)) => bad.push(format!("{} n={} d={}: {s:?}/{sp:?}", p.kind, p.n, p.d)),
            Err(e) => bad.push(e),
        }
    }
    check(
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!("12 networks at sensitivity = specificity = 1.0 in {:.1} s", elapsed.as_secs_f64()),
        format!("{bad:?}, {:.1} s", elapsed.as_secs_f64()),
    )
}

fn bfs_oracle(r: &Raster, seed: (u32, u32)) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    if r.get(seed.0, seed.1) != Rgb::WHITE {
        return out;
    }
    let mut q = VecDeque::from([seed]);
    out.insert(seed);
    while let Some((x, y)) = q.pop_front() {
        let nb = [(x as i64 + 1, y as i64), (x as i64 - 1, y as i64), (x as i64, y as i64 + 1), (x as i64, y as i64 - 1)];
        for (nx, ny) in nb {
            if r.in_bounds(nx, ny) {
                let p = (nx as u32, ny as u32);
                if r.get(p.0, p.1) == Rgb::WHITE && out.insert(p) {
                    q.push_back(p);
                }
            }
        }
    }
    out
}

fn flood_fill_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let style = RenderStyle::default();
    for case in 0..100 {
        let density = rng.gen_range(0.10..0.60);
        let mut r = Raster::new(64, 64, Rgb::WHITE).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                if rng.gen::<f64>() < density {
                    r.set(x, y, Rgb::BLACK);
                }
            }
        }
        let seed = (rng.gen_range(0..64), rng.gen_range(0..64));
        let want = bfs_oracle(&r, seed);
        let out = hole_identify(&r, (seed.0 as i64, seed.1 as i64), &style).map_err(|e| e.to_string())?;
        for y in 0..64 {
            for x in 0..64 {
                let before = r.get(x, y);
                let after = out.raster.get(x, y);
                if before != Rgb::WHITE && after != before {
                    return Err(format!("case {case}: ink at ({x},{y}) modified"));
                }
                if (after == Rgb::GREEN) != want.contains(&(x, y)) {
                    return Err(format!("case {case}: pixel ({x},{y}) disagrees"));
                }
            }
        }
    }
    Ok("100 random 64x64 rasters match the BFS oracle".into())
}

fn winding_number(p: Point, poly: &[(i64, i64)]) -> i32 {
    let mut w = 0;
    for k in 0..poly.len() {
        let a = Point::new(poly[k].0 as f64, poly[k].1 as f64);
        let b = poly[(k + 1) % poly.len()];
        let b = Point::new(b.0 as f64, b.1 as f64);
        let cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && cross > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

fn seg_dist(p: Point, a: (i64, i64), b: (i64, i64)) -> f64 {
    let (ax, ay, bx, by) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
    let (dx, dy) = (bx - ax, by - ay);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 { 0.0 } else { (((p.x - ax) * dx + (p.y - ay) * dy) / l2).clamp(0.0, 1.0) };
    ((p.x - ax - t * dx).powi(2) + (p.y - ay - t * dy).powi(2)).sqrt()
}

fn star_polygon(rng: &mut ChaCha8Rng) -> Vec<(i64, i64)> {
    let k = rng.gen_range(3..12);
    let mut angles: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
    angles.sort_by(f64::total_cmp);
    let mut pts: Vec<(i64, i64)> = angles
        .iter()
        .map(|a| {
            let r = rng.gen_range(10.0..60.0);
            ((100.0 + r * a.cos()).round() as i64, (100.0 + r * a.sin()).round() as i64)
        })
        .collect();
    pts.dedup();
    pts
}

fn point_in_polygon_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = 3.0;
    let (mut compared, mut band) = (0, 0);
    for case in 0..1000 {
        let poly = star_polygon(&mut rng);
        let p = Point::new(rng.gen_range(30.0..170.0), rng.gen_range(30.0..170.0));
        let d = (0..poly.len()).map(|k| seg_dist(p, poly[k], poly[(k + 1) % poly.len()])).fold(f64::INFINITY, f64::min);
        let got = point_polygon_test(p, &Contour::new(poly.clone()), tol);
        if d <= tol {
            band += 1;
            if !got {
                return Err(format!("case {case}: point within band reported outside"));
            }
            continue;
        }
        compared += 1;
        if got != (winding_number(p, &poly) != 0) {
            return Err(format!("case {case}: {p:?} disagrees with winding oracle"));
        }
    }
    Ok(format!("{compared} pairs agree with the winding oracle ({band} inside the tolerance band)"))
}

fn dh_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (k, t) = (1.3, 2.0);
    let trials = 100_000;
    let accepted = (0..trials).filter(|_| dh_accept(5.0, 5.0 + k * t, t, k, rng.gen(), 1e-6)).count();
    let rate = accepted as f64 / trials as f64;
    let target = (-1.0f64).exp();
    let downhill = (0..10_000)
        .filter(|_| {
            let e_old = rng.gen_range(-10.0..10.0);
            let e_new = e_old - rng.gen_range(0.0..5.0);
            dh_accept(e_old, e_new, t, k, rng.gen(), 1e-6)
        })
        .count();
    check(
        (rate - target).abs() <= 0.01 && downhill == 10_000,
        format!("acceptance {rate:.4} vs e^-1 = {target:.4}; downhill {downhill}/10000"),
        format!("acceptance {rate:.4}, downhill {downhill}/10000"),
    )
}

fn force_spot_checks() -> Outcome {
    let a = fa2_attraction(std::f64::consts::E - 1.0);
    let r = fa2_repulsion(3, 3, 2.0, 1.0);
    let m = kk_stiffness_update(1.0, 0.5, 0.5, 1);
    if (a - 1.0).abs() > 1e-12 || (r - 8.0).abs() > 1e-12 || (m - 0.75).abs() > 1e-12 {
        return Err(format!("attraction {a}, repulsion {r}, stiffness {m}"));
    }
    let net = generate(&GenParams { n: 50, d: 6.0, kind: NetKind::Uniform, seed: 5 }).map_err(|e| e.to_string())?;
    let degrees: Vec<usize> = net.topology.nodes().map(|v| net.topology.degree(v)).collect();
    let params = Fa2Params::default();
    let mut engine = Fa2Engine::new(&net.topology, params.clone(), 5).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = repulsion_forces(engine.snapshot(), &degrees, params.repulsion_scale);
        let net_impulse = f.iter().fold(Point::default(), |acc, &x| acc + x).norm();
        worst = worst.max(net_impulse);
        engine.iterate().map_err(|e| e.to_string())?;
    }
    check(
        worst <= 1e-9,
        format!("formulas exact; worst net repulsion impulse {worst:.2e} over 20 iterations"),
        format!("net repulsion impulse {worst:.2e}"),
    )
}

fn k_node_table() -> Outcome {
    let expected = |k: usize| match k {
        4 => HoleCategory::Four,
        5 => HoleCategory::Five,
        6 => HoleCategory::Six,
        _ => HoleCategory::KNode,
    };
    for k in 4..=12u32 {
        let hole = Hole::new((0..k).map(NodeId).collect(), None, 0, None).map_err(|e| e.to_string())?;
        let got = classify_k_node(&hole).map_err(|e| e.to_string())?;
        if got != expected(k as usize) {
            return Err(format!("{k} boundary nodes -> {got:?}"));
        }
    }
    let three = Hole::new((0..3).map(NodeId).collect(), None, 0, None);
    check(
        three.is_err() && HoleCategory::from_boundary_count(3).is_err(),
        "4..12 map to Four/Five/Six/KNode; 3 is rejected".into(),
        "3-node hole accepted".into(),
    )
}

fn stopping_semantics() -> Outcome {
    let net = generate(&GenParams { n: 100, d: 6.0, kind: NetKind::Sparse, seed: 7 }).map_err(|e| e.to_string())?;
    let first = net.truth.coords.clone();
    let mut engine = FixedEngine::new(first.clone());
    let mut det = ReferenceDetector::new(RenderStyle::default());
    let stop = StopCriteria { t_max: 600.0, stable_iters: 10 };
    let out = run_pipeline(&net.topology, &mut engine, &mut det, &stop, None, &PipelineConfig::default())
        .map_err(|e| e.to_string())?;
    check(
        out.stop == StopReason::Stable && out.last_iteration == 11 && out.final_iteration == 1 && out.layout == first,
        "frozen engine stops at iteration 11 reporting the iteration-1 layout".into(),
        format!("stop {:?} at {} with final {}", out.stop, out.last_iteration, out.final_iteration),
    )
}

fn scaled_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let seeds = [1u64, 2, 3];
    let runs: Vec<Result<(u64, f64, f64, Duration, f64, StopReason), String>> = seeds
        .par_iter()
        .map(|&seed| {
            let net = generate(&GenParams { n: 1000, d: 8.0, kind: NetKind::Sparse, seed }).map_err(|e| e.to_string())?;
            let mut engine = EngineConfig::KkMsDs(KkParams::default()).build(&net.topology, seed).map_err(|e| e.to_string())?;
            let mut det = ReferenceDetector::new(RenderStyle::default());
            let stop = StopCriteria { t_max: 600.0, stable_iters: 10 };
            let out = run_pipeline(&net.topology, engine.as_mut(), &mut det, &stop, Some(&net.truth), &PipelineConfig::default())
                .map_err(|e| e.to_string())?;
            let recs = out.log.eval_records();
            let sub = dir.path().join(format!("seed{seed}"));
            write_timeseries(&recs, &sub, "timeseries").map_err(|e| e.to_string())?;
            let csv = std::fs::read_to_string(sub.join("timeseries.csv")).map_err(|e| e.to_string())?;
            if !csv.starts_with(CSV_HEADER) || csv.lines().count() != recs.len() + 1 {
                return Err(format!("seed {seed}: malformed time series"));
            }
            let s1 = recs[0].sensitivity.unwrap_or(0.0);
            let c = out.final_confusion().ok_or("no final evaluation")?;
            let elapsed = out.log.iterations.last().map_or(0.0, |i| i.elapsed);
            Ok((seed, s1, c.sensitivity().unwrap_or(0.0), out.log.first_pass.unwrap_or_default(), elapsed, out.stop))
        })
        .collect();
    let mut improved = 0;
    let mut notes = Vec::new();
    for r in runs {
        let (seed, s1, sf, first, elapsed, stop) = r?;
        if first >= Duration::from_secs(120) || elapsed > 600.0 || stop == StopReason::TimeLimit {
            return Err(format!("seed {seed}: first pass {first:?}, elapsed {elapsed:.1} s, stop {stop}"));
        }
        if sf > s1 {
            improved += 1;
        }
        notes.push(format!("seed {seed}: {s1:.2} -> {sf:.2} in {elapsed:.0} s"));
    }
    check(improved >= 2, format!("{improved}/3 improved ({})", notes.join("; ")), format!("only {improved}/3 improved ({})", notes.join("; ")))
}

fn snapshot_dir(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn cli_session(root: &Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_holegraph");
    let steps: Vec<Vec<&str>> = vec![
        vec!["gen", "--n", "150", "--deg", "8", "--kind", "sparse", "--seed", "11", "--out-prefix", "net/a"],
        vec!["layout", "--algo", "kkmsds", "--in", "net/a.top", "--seed", "2", "--iters", "40", "--snapshot-every", "20", "--out-dir", "kk"],
        vec!["layout", "--algo", "fa2", "--in", "net/a.top", "--seed", "2", "--iters", "30", "--snapshot-every", "15", "--out-dir", "fa2"],
        vec!["layout", "--algo", "dh", "--in", "net/a.top", "--seed", "2", "--iters", "5", "--out-dir", "dh"],
        vec!["render", "--in", "net/a.lay", "--top", "net/a.top", "--out", "a.png"],
        vec!["detect", "--img", "a.png", "--lay", "net/a.lay", "--top", "net/a.top", "--out", "a.boxes"],
        vec!["identify", "--img", "a.png", "--boxes", "a.boxes", "--lay", "net/a.lay", "--out", "a.holes"],
        vec!["prep", "--in", "net/a.lay", "--top", "net/a.top", "--gt", "net/a.gt", "--mode", "segmented", "--out-dir", "prep"],
        vec!["run", "--top", "net/a.top", "--gt", "net/a.gt", "--coords", "net/a.lay", "--algo", "kkmsds", "--seed", "3", "--clock", "virtual:0.5", "--out-dir", "run"],
        vec!["experiment", "--grid", "n=80", "d=6", "kind=sparse,uniform", "--algo", "fa2", "--seeds", "1,2", "--clock", "virtual:0.5", "--tmax", "20", "--out-dir", "exp"],
    ];
    for args in steps {
        let out = Command::new(bin).args(&args).current_dir(root).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli_session(a.path())?;
    cli_session(b.path())?;
    let (sa, sb) = (snapshot_dir(a.path()), snapshot_dir(b.path()));
    if sa.len() != sb.len() {
        return Err(format!("{} vs {} files", sa.len(), sb.len()));
    }
    for ((na, ca), (nb, cb)) in sa.iter().zip(&sb) {
        if na != nb || ca != cb {
            return Err(format!("{na} differs"));
        }
    }
    let kinds: BTreeSet<&str> = sa.iter().filter_map(|(n, _)| n.rsplit('.').next()).collect();
    Ok(format!("{} artifacts identical across two runs ({kinds:?})", sa.len()))
}

fn degree_calibration() -> Outcome {
    let mut cells = grid12();
    for kind in [NetKind::Sparse, NetKind::Uniform] {
        for n in [1000, 2000, 3000] {
            for d in [6.0, 8.0, 10.0] {
                cells.push(GenParams { n, d, kind, seed: 1 });
            }
        }
    }
    let worst: Result<Vec<f64>, String> = cells
        .par_iter()
        .map(|p| {
            let net = generate(p).map_err(|e| e.to_string())?;
            Ok((net.topology.average_degree() - p.d).abs())
        })
        .collect();
    let worst = worst?.into_iter().fold(0.0, f64::max);
    check(
        worst <= 0.5,
        format!("{} networks, worst deviation {worst:.3}", cells.len()),
        format!("worst deviation {worst:.3}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle closure", oracle_closure),
        ("flood fill equivalence", flood_fill_equivalence),
        ("point-in-polygon equivalence", point_in_polygon_equivalence),
        ("DH acceptance statistics", dh_statistics),
        ("force formula spot checks", force_spot_checks),
        ("K-node categorization", k_node_table),
        ("stopping semantics", stopping_semantics),
        ("scaled end-to-end", scaled_end_to_end),
        ("CLI determinism", cli_determinism),
        ("generation calibration", degree_calibration),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
