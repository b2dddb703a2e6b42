//! Acceptance criteria. Every criterion is run, one `PASS`/`FAIL` line is
//! printed for each, and the test fails if any criterion failed.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fibspec::approximant::{band_cover, cover_with_max_band, BandCover, DEFAULT_TOL};
use fibspec::cantor::{box_dimension, middle_thirds_integer, thickness};
use fibspec::gaps::track_largest_gap;
use fibspec::interval::IntervalSet;
use fibspec::oracle::{chain_eigenvalues, potential, substitution_word, Boundary};
use fibspec::sumset::self_sum_evidence;
use fibspec::trace::{classify_orbit, per2_points, TraceState, DEFAULT_ESCAPE_BOUND};

const LN_1_PLUS_SQRT2: f64 = 0.881_373_587_019_543;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Distance from `e` to the nearest band edge of `cover`.
fn edge_distance(cover: &IntervalSet, e: f64) -> f64 {
    match cover.locate(e) {
        Some(i) => {
            let b = cover.intervals()[i];
            (e - b.lo).min(b.hi - e)
        }
        None => cover.distance_to(e),
    }
}

fn invariant_conservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut steps = 0;
    for _ in 0..1000 {
        let mut s = TraceState::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        for _ in 0..50 {
            if s.max_abs() > DEFAULT_ESCAPE_BOUND {
                break;
            }
            let next = s.step().expect("bounded state steps");
            worst = worst.max((next.invariant() - s.invariant()).abs() / next.invariant_scale());
            steps += 1;
            s = next;
        }
    }
    outcome(worst <= 1e-9, format!("{steps} steps, max relative drift {worst:.2e}"))
}

fn free_operator_limit() -> Outcome {
    let c = band_cover(0.0, 18, DEFAULT_TOL).expect("free cover");
    let d = c.cover.hausdorff(&IntervalSet::single(-2.0, 2.0));
    outcome(d <= 1e-9, format!("{} band(s), Hausdorff distance {d:.2e}", c.band_count()))
}

fn escape_cover_agreement() -> Outcome {
    let c = band_cover(1.0, 18, DEFAULT_TOL).expect("cover");
    let n = 10_001;
    let mut disagree = 0;
    let mut far = 0;
    for i in 0..n {
        let e = -4.0 + 8.0 * i as f64 / (n - 1) as f64;
        let escaped = classify_orbit(e, 1.0, 60, DEFAULT_ESCAPE_BOUND).escaped();
        if escaped == c.cover.contains_point(e) {
            disagree += 1;
            if edge_distance(&c.cover, e) > 2.0 * c.tol {
                far += 1;
            }
        }
    }
    outcome(far == 0, format!("{disagree} disagreements, {far} farther than 2·tol from an edge"))
}

fn oracle_containment() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [0.5, 1.0, 4.0] {
        let spec = chain_eigenvalues(&potential(v, 0.0, 610), Boundary::Dirichlet).expect("eigenvalues");
        let c = band_cover(v, 14, DEFAULT_TOL).expect("cover");
        let dist: Vec<f64> = spec.eigenvalues.iter().map(|&e| c.cover.distance_to(e)).collect();
        let max = dist.iter().copied().fold(0.0, f64::max);
        let outside = dist.iter().filter(|&&d| d > 0.02).count();
        let empty = c.cover.iter().filter(|b| !spec.eigenvalues.iter().any(|&e| b.contains(e))).count();
        pass &= outside == 0 && empty == 0;
        parts.push(format!(
            "V={v}: max distance {max:.3}, {outside} beyond 0.02, {empty} of {} bands empty",
            c.band_count()
        ));
    }
    outcome(pass, parts.join("; "))
}

const SWEEP: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

fn policy_cover(v: f64) -> BandCover {
    cover_with_max_band(v, v / 10.0, 1, 22, DEFAULT_TOL).expect("cover").expect("level policy met by level 22")
}

struct SweepRow {
    v: f64,
    level: usize,
    tau: f64,
    dim_lower: f64,
}

fn metrics_sweep() -> Vec<SweepRow> {
    SWEEP
        .iter()
        .map(|&v| {
            let c = policy_cover(v);
            let s = thickness(&c.cover).expect("stats");
            SweepRow { v, level: c.level, tau: s.tau, dim_lower: s.dim_lower }
        })
        .collect()
}

fn thickness_trend(rows: &[SweepRow]) -> Outcome {
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].tau / w[0].tau).collect();
    let pass = ratios.iter().all(|&r| r > 1.0 && (1.4..=2.9).contains(&r));
    let taus: Vec<String> = rows.iter().map(|r| format!("V={} k={} tau={:.3}", r.v, r.level, r.tau)).collect();
    let ratios: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(pass, format!("{}; halving ratios {}", taus.join(", "), ratios.join(", ")))
}

fn dimension_trend(rows: &[SweepRow]) -> Outcome {
    let increasing = rows.windows(2).all(|w| w[1].dim_lower > w[0].dim_lower);
    let last = rows.last().expect("sweep rows").dim_lower;
    let scaled: Vec<f64> = rows.iter().map(|r| (1.0 - r.dim_lower) / r.v).collect();
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    let pass = increasing && last >= 0.8 && hi <= 3.0 * lo;
    let dims: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.dim_lower)).collect();
    outcome(pass, format!("dim_lower {}; (1 - dim_lower)/V in [{lo:.3}, {hi:.3}]", dims.join(", ")))
}

fn gap_ratio() -> Outcome {
    let (track, lost) = match track_largest_gap(&[0.2, 0.1, 0.05, 0.025], 22, DEFAULT_TOL) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("track failed: {e}")),
    };
    if let Some(e) = lost {
        return outcome(false, format!("track lost: {e}"));
    }
    let ratios: Vec<f64> = track.samples.iter().map(|s| s.width_over_coupling).collect();
    let variation = track.max_ratio_variation();
    let pass = ratios.len() == 4 && ratios.iter().all(|&r| r > 0.0) && variation < 0.15;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        pass,
        format!(
            "gap {}:{} at level {}, |U|/V {}, max variation {:.1}%",
            track.label.level_opened,
            track.label.index,
            track.level,
            shown.join(", "),
            100.0 * variation
        ),
    )
}

fn sum_is_interval() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [0.05, 0.1, 0.2, 0.3] {
        let c = policy_cover(v);
        let e = self_sum_evidence(&c.cover).expect("sum set");
        pass &= e.sum_is_interval && e.tau * e.tau > 1.0 && e.translates_all_intersect && e.samples == 1001;
        parts.push(format!(
            "V={v} k={}: interval {}, tau² {:.1}, {}/{} intersect",
            c.level,
            e.sum_is_interval,
            e.tau * e.tau,
            e.intersect_count,
            e.samples
        ));
    }
    let strong = band_cover(16.0, 16, DEFAULT_TOL).expect("cover");
    let e = self_sum_evidence(&strong.cover).expect("sum set");
    pass &= !e.sum_is_interval;
    parts.push(format!("V=16 k=16: interval {} ({} components)", e.sum_is_interval, e.components));
    outcome(pass, parts.join("; "))
}

fn large_coupling_dimension() -> Outcome {
    let c = band_cover(16.0, 16, DEFAULT_TOL).expect("cover");
    let scales: Vec<f64> = (0..13).map(|i| 10f64.powf(-9.0 + 0.5 * i as f64)).collect();
    let d = box_dimension(&c.cover, &scales).expect("box dimension");
    let product = d * 16f64.ln();
    outcome(
        (0.62..=1.15).contains(&product),
        format!("box dimension {d:.4} over 1e-9..1e-3, times ln 16 = {product:.4} (limit {LN_1_PLUS_SQRT2:.4})"),
    )
}

fn cantor_unit_truth() -> Outcome {
    let s = thickness(&middle_thirds_integer(8)).expect("stats");
    let target = 2f64.ln() / 3f64.ln();
    let pass = s.tau == 1.0 && s.theta == 1.0 && (s.dim_lower - target).abs() <= 1e-12 && (s.dim_upper - target).abs() <= 1e-12;
    outcome(pass, format!("tau {}, theta {}, bounds [{}, {}]", s.tau, s.theta, s.dim_lower, s.dim_upper))
}

fn per2_scaling() -> Outcome {
    let ratios: Vec<f64> =
        [0.1, 0.05, 0.025].iter().map(|&v| per2_points(v, 1e-14).expect("per2").separation / v).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.5}")).collect();
    outcome(hi <= 1.1 * lo, format!("separation/V {}", shown.join(", ")))
}

fn fibonacci_word() -> Outcome {
    let mut pass = true;
    for n in [13, 21, 34] {
        let pattern: Vec<u8> = potential(1.0, 0.0, n).values.iter().map(|&x| u8::from(x == 1.0)).collect();
        pass &= pattern == substitution_word(n);
    }
    outcome(pass, "N = 13, 21, 34".into())
}

/// Runs one criterion. `bound` is the runtime limit, if the criterion has one.
fn report(number: usize, name: &str, bound: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let pass = o.pass && bound.is_none_or(|b| elapsed <= b);
    let limit = bound.map_or(String::new(), |b| format!(" of {}s", b.as_secs()));
    let line = format!(
        "{} criterion {number:>2} {name}: {} [{:.2}s{limit}]\n",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    pass
}

#[test]
fn acceptance() {
    let secs = |n| Some(Duration::from_secs(n));
    let mut results = Vec::new();
    results.push((1, report(1, "invariant conservation", secs(1), invariant_conservation)));
    results.push((2, report(2, "free operator limit", secs(10), free_operator_limit)));
    results.push((3, report(3, "escape/cover agreement", secs(30), escape_cover_agreement)));
    results.push((4, report(4, "oracle containment", secs(60), oracle_containment)));

    let start = Instant::now();
    let rows = metrics_sweep();
    let remaining = Duration::from_secs(300).saturating_sub(start.elapsed());
    results.push((5, report(5, "thickness trend", Some(remaining), || thickness_trend(&rows))));
    results.push((6, report(6, "dimension trend", None, || dimension_trend(&rows))));

    results.push((7, report(7, "gap ratio", None, gap_ratio)));
    results.push((8, report(8, "sum set is an interval", None, sum_is_interval)));
    results.push((9, report(9, "large coupling dimension", None, large_coupling_dimension)));
    results.push((10, report(10, "Cantor unit truth", None, cantor_unit_truth)));
    results.push((11, report(11, "period-two scaling", None, per2_scaling)));
    results.push((12, report(12, "Fibonacci word", None, fibonacci_word)));

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
