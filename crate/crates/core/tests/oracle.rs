use fibspec::approximant::{band_cover, DEFAULT_TOL};
use fibspec::interval::IntervalSet;
use fibspec::oracle::{chain_eigenvalues, potential, square_spectrum, substitution_word, Boundary};
use fibspec::sumset::minkowski_sum;

fn points(v: &[f64]) -> IntervalSet {
    IntervalSet::from_pairs(v.iter().map(|&x| (x, x)))
}

/// The periodic chain of length `F_k` has spectrum `σ_k`, so every
/// eigenvalue lies in `B_k` up to solver accuracy.
#[test]
fn periodic_eigenvalues_lie_in_the_cover() {
    for v in [0.5, 1.0, 4.0] {
        let s = chain_eigenvalues(&potential(v, 0.0, 610), Boundary::Periodic).unwrap();
        let c = band_cover(v, 14, DEFAULT_TOL).unwrap();
        let worst = s.eigenvalues.iter().map(|&e| c.cover.distance_to(e)).fold(0.0, f64::max);
        assert!(worst < 1e-8, "V={v}: {worst:e}");
    }
}

#[test]
fn dirichlet_eigenvalues_are_near_the_cover() {
    for v in [0.5, 1.0, 4.0] {
        let s = chain_eigenvalues(&potential(v, 0.0, 610), Boundary::Dirichlet).unwrap();
        let c = band_cover(v, 14, DEFAULT_TOL).unwrap();
        let far = s.eigenvalues.iter().filter(|&&e| c.cover.distance_to(e) > 0.02).count();
        assert!(far <= 4, "V={v}: {far}");
    }
}

/// On the ring, a window of length `F_k` is a rotation of the same word for
/// every phase. Dirichlet chains are not compared: their edge states sit in
/// gaps and move with the phase.
#[test]
fn spectrum_does_not_depend_on_phase() {
    let a = chain_eigenvalues(&potential(1.0, 0.0, 610), Boundary::Periodic).unwrap();
    let b = chain_eigenvalues(&potential(1.0, 0.37, 610), Boundary::Periodic).unwrap();
    let d = points(&a.eigenvalues).hausdorff(&points(&b.eigenvalues));
    assert!(d <= 0.05, "{d}");
}

#[test]
fn square_lattice_sums_lie_in_the_sum_set() {
    let s = chain_eigenvalues(&potential(0.3, 0.0, 377), Boundary::Dirichlet).unwrap();
    let sums = square_spectrum(&s).unwrap();
    assert_eq!(sums.len(), 377 * 377);
    let c = band_cover(0.3, 14, DEFAULT_TOL).unwrap();
    let sum = minkowski_sum(&c.cover, &c.cover).unwrap().dilate(1e-8);
    assert!(sums.iter().all(|&x| sum.contains_point(x)));
}

#[test]
fn potential_matches_substitution_word_at_fibonacci_lengths() {
    for n in [13, 21, 34, 55, 89, 144, 233, 377, 610, 987] {
        let p = potential(1.0, 0.0, n);
        let coded: Vec<u8> = p.values.iter().map(|&x| u8::from(x == 1.0)).collect();
        assert_eq!(coded, substitution_word(n), "N={n}");
    }
}
