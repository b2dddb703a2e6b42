use fibspec::approximant::{band_cover, DEFAULT_TOL};
use fibspec::interval::IntervalSet;
use fibspec::trace::{classify_orbit, Verdict, DEFAULT_ESCAPE_BOUND};

fn near_edge(cover: &IntervalSet, e: f64, tol: f64) -> bool {
    cover.iter().any(|b| (e - b.lo).abs() <= 2.0 * tol || (e - b.hi).abs() <= 2.0 * tol)
}

fn grid() -> impl Iterator<Item = f64> {
    (0..10_001).map(|i| -4.0 + 8.0 * i as f64 / 10_000.0)
}

/// `Bounded(k)` holds exactly on `B_k`.
#[test]
fn horizon_matches_level() {
    for v in [0.0, 0.5, 1.0] {
        let c = band_cover(v, 18, DEFAULT_TOL).unwrap();
        for e in grid() {
            let escaped = classify_orbit(e, v, 18, DEFAULT_ESCAPE_BOUND).escaped();
            if escaped == c.cover.contains_point(e) {
                assert!(near_edge(&c.cover, e, c.tol), "V={v} E={e}");
            }
        }
    }
}

/// `Escaped(n)` holds exactly on `B_{n-1} \ B_n`.
#[test]
fn escape_step_is_the_level_that_drops_the_energy() {
    for v in [0.5, 1.0] {
        let covers: Vec<IntervalSet> = (1..=18).map(|k| band_cover(v, k, DEFAULT_TOL).unwrap().cover).collect();
        for e in grid() {
            if let Verdict::Escaped(n) = classify_orbit(e, v, 18, DEFAULT_ESCAPE_BOUND).verdict {
                if n < 2 {
                    continue;
                }
                let (prev, here) = (&covers[n - 2], &covers[n - 1]);
                let ok = prev.contains_point(e) && !here.contains_point(e);
                assert!(ok || near_edge(prev, e, DEFAULT_TOL) || near_edge(here, e, DEFAULT_TOL), "V={v} E={e} n={n}");
            }
        }
    }
}

/// A longer horizon only removes energies: bounded for 60 steps implies
/// membership in `B_18`.
#[test]
fn long_horizon_is_finer_than_the_cover() {
    let c = band_cover(1.0, 18, DEFAULT_TOL).unwrap();
    let mut finer = 0;
    for e in grid() {
        let bounded = !classify_orbit(e, 1.0, 60, DEFAULT_ESCAPE_BOUND).escaped();
        if bounded {
            assert!(c.cover.contains_point(e) || near_edge(&c.cover, e, c.tol), "E={e}");
        } else if c.cover.contains_point(e) {
            finer += 1;
        }
    }
    assert!(finer > 0);
}
