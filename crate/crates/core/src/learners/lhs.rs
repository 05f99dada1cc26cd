use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::domain::{Bounds, Rng};

/// Latin hypercube design: in every dimension the `n` points fall into `n`
/// distinct equal-width strata, one point per stratum.
pub fn latin_hypercube_sample(n: usize, bounds: &Bounds, rng: &mut Rng) -> Vec<Vec<f64>> {
    let dim = bounds.dim();
    let mut points = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        strata.shuffle(rng);
        let (lo, hi) = (bounds.lower()[d], bounds.upper()[d]);
        let width = hi - lo;
        for (point, stratum) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.gen();
            let v = lo + width * ((*stratum as f64 + u) / n as f64);
            point[d] = v.min(hi);
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn strata_of(points: &[Vec<f64>], bounds: &Bounds, d: usize) -> Vec<usize> {
        let n = points.len();
        let (lo, hi) = (bounds.lower()[d], bounds.upper()[d]);
        let mut s: Vec<usize> = points
            .iter()
            .map(|p| (((p[d] - lo) / (hi - lo) * n as f64).floor() as usize).min(n - 1))
            .collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn one_point_per_stratum_in_1d() {
        let bounds = Bounds::uniform(1, 0.0, 1.0).unwrap();
        let mut rng = Rng::seed_from_u64(3);
        let pts = latin_hypercube_sample(4, &bounds, &mut rng);
        assert_eq!(strata_of(&pts, &bounds, 0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn stratification_holds_at_749_points() {
        let bounds = Bounds::new(
            (0..29).map(|i| -(i as f64) - 1.0).collect(),
            (0..29).map(|i| 2.0 * i as f64 + 1.0).collect(),
        )
        .unwrap();
        let mut rng = Rng::seed_from_u64(11);
        let pts = latin_hypercube_sample(749, &bounds, &mut rng);
        assert_eq!(pts.len(), 749);
        let expect: Vec<usize> = (0..749).collect();
        for d in 0..29 {
            assert_eq!(strata_of(&pts, &bounds, d), expect, "dimension {d}");
        }
        assert!(pts.iter().all(|p| bounds.contains(p)));
    }

    #[test]
    fn same_seed_same_design() {
        let bounds = Bounds::uniform(3, -2.0, 2.0).unwrap();
        let a = latin_hypercube_sample(10, &bounds, &mut Rng::seed_from_u64(5));
        let b = latin_hypercube_sample(10, &bounds, &mut Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
