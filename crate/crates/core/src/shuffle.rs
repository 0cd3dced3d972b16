//! Backward (Fisher-Yates / Knuth) shuffle driven by the MT stream.

use crate::rng::MersenneTwister;

/// Shuffles `data` in place from the last slot down: for `i = n, ..., 2` a
/// slot `j` is drawn uniformly from `1..=i` and swapped with `i`. Consumes
/// exactly `n - 1` uniforms.
pub fn backward_shuffle<T>(data: &mut [T], rng: &mut MersenneTwister) {
    backward_shuffle_tracking(data, rng, None);
}

/// Same as [`backward_shuffle`] and reports where the element that started at
/// `tracked` (0-based) ended up.
pub fn backward_shuffle_tracking<T>(
    data: &mut [T],
    rng: &mut MersenneTwister,
    tracked: Option<usize>,
) -> Option<usize> {
    let mut tracked = tracked;
    for i in (1..data.len()).rev() {
        let j = rng.uniform_int(i + 1).expect("i + 1 >= 1") - 1;
        data.swap(i, j);
        tracked = tracked.map(|t| {
            if t == i {
                j
            } else if t == j {
                i
            } else {
                t
            }
        });
    }
    tracked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_unchanged() {
        let mut rng = MersenneTwister::new(1);
        let mut a = [42];
        backward_shuffle(&mut a, &mut rng);
        assert_eq!(a, [42]);
    }

    #[test]
    fn replay_is_deterministic() {
        let mut a: Vec<u32> = (0..100).collect();
        let mut b = a.clone();
        backward_shuffle(&mut a, &mut MersenneTwister::new(2024));
        backward_shuffle(&mut b, &mut MersenneTwister::new(2024));
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn draws_exactly_n_minus_one_uniforms() {
        let mut rng = MersenneTwister::new(9);
        let mut twin = rng.clone();
        let mut a = [0u8; 17];
        backward_shuffle(&mut a, &mut rng);
        for _ in 0..16 {
            twin.next_uniform();
        }
        assert_eq!(rng, twin);
    }

    #[test]
    fn tracking_follows_element() {
        let mut rng = MersenneTwister::new(5);
        let mut a: Vec<usize> = (0..40).collect();
        for start in [0, 13, 39] {
            let mut b = a.clone();
            let mut r = rng.clone();
            let pos = backward_shuffle_tracking(&mut b, &mut r, Some(start)).unwrap();
            assert_eq!(b[pos], a[start]);
        }
        backward_shuffle(&mut a, &mut rng);
    }

    #[test]
    fn three_element_permutations_uniform() {
        // Chi-square over the 6 permutations of 3 elements, 6e4 draws.
        let mut rng = MersenneTwister::new(31337);
        let mut counts = std::collections::HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let mut a = [0u8, 1, 2];
            backward_shuffle(&mut a, &mut rng);
            *counts.entry(a).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 0.99 quantile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 15.086, "chi2 = {chi2}");
    }
}
