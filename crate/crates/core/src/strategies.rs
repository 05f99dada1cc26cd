//! Accept/discard rules layered on top of the surrogate verdict.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::domain::Rng;
use crate::error::{Error, Result};

pub const P_BASE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyFlags {
    pub use_prob: bool,
    pub use_qual: bool,
    pub use_diver: bool,
    pub p_base: f64,
}

impl Default for StrategyFlags {
    fn default() -> Self {
        StrategyFlags {
            use_prob: false,
            use_qual: false,
            use_diver: false,
            p_base: P_BASE,
        }
    }
}

impl StrategyFlags {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_base > 0.0 && self.p_base < 1.0) {
            return Err(Error::Config("p_base must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn any(&self) -> bool {
        self.use_prob || self.use_qual || self.use_diver
    }

    /// `Default`, `Prob`, `Qual+Diver`, ...
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.use_prob {
            parts.push("Prob");
        }
        if self.use_qual {
            parts.push("Qual");
        }
        if self.use_diver {
            parts.push("Diver");
        }
        if parts.is_empty() {
            "Default".into()
        } else {
            parts.join("+")
        }
    }
}

/// Incremental means of the quality gaps seen by the filter and of the
/// nearest-neighbour distances of evaluated points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningMeans {
    pub d_bar: f64,
    pub d_count: u64,
    pub v_bar: f64,
    pub v_count: u64,
}

pub fn default_accept_surface(q_hat_challenger: f64, q_current: f64) -> bool {
    q_hat_challenger < q_current
}

pub fn prob_accept(rng: &mut Rng, p: f64) -> bool {
    rng.gen::<f64>() < p
}

/// Acceptance probability for a predicted gap `d` given the mean gap.
/// Equals 0.2 at `d = d_bar` and decays exponentially beyond it.
pub fn quality_prob(d: f64, d_bar: f64, p_base: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else if d_bar > 0.0 {
        0.2f64.powf(d / d_bar)
    } else {
        p_base
    }
}

pub fn quality_distance_prob(q_hat_x: f64, q_hat_challenger: f64, d_bar: f64) -> f64 {
    quality_prob((q_hat_x - q_hat_challenger).abs(), d_bar, P_BASE)
}

/// Distance from `x` to its nearest neighbour in `set`.
pub fn diversity_distance<'a, I>(x: &[f64], set: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut best: Option<f64> = None;
    for s in set {
        let d2: f64 = s.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        best = Some(best.map_or(d2, |b| b.min(d2)));
    }
    best.map(f64::sqrt)
        .ok_or_else(|| Error::InvalidInput("diversity distance needs a non-empty set".into()))
}

/// Acceptance probability for a challenger at distance `v` from the evaluated
/// set. Equals 0.2 at `v = v_bar` and grows towards 1 with distance.
pub fn diversity_prob_with(v: f64, v_bar: f64, p_base: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if v_bar > 0.0 {
        1.0 - 0.8f64.powf(v / v_bar)
    } else {
        p_base
    }
}

pub fn diversity_prob(v: f64, v_bar: f64) -> f64 {
    diversity_prob_with(v, v_bar, P_BASE)
}

/// Disjunction of the surrogate verdict and one independent Bernoulli draw
/// per enabled relaxation. `quality_gap` and `nn_distance` are only read
/// when the matching flag is set.
pub fn combined_accept(
    verdict: bool,
    flags: &StrategyFlags,
    means: &RunningMeans,
    quality_gap: f64,
    nn_distance: f64,
    rng: &mut Rng,
) -> bool {
    if verdict {
        return true;
    }
    let mut accept = false;
    if flags.use_prob {
        accept |= prob_accept(rng, flags.p_base);
    }
    if flags.use_qual {
        let d_bar = if means.d_count == 0 { 0.0 } else { means.d_bar };
        accept |= prob_accept(rng, quality_prob(quality_gap, d_bar, flags.p_base));
    }
    if flags.use_diver {
        let v_bar = if means.v_count == 0 { 0.0 } else { means.v_bar };
        accept |= prob_accept(rng, diversity_prob_with(nn_distance, v_bar, flags.p_base));
    }
    accept
}

pub fn update_means(means: RunningMeans, pair_distance: Option<f64>, nn_distance: Option<f64>) -> RunningMeans {
    let mut m = means;
    if let Some(d) = pair_distance {
        m.d_count += 1;
        m.d_bar += (d - m.d_bar) / m.d_count as f64;
    }
    if let Some(v) = nn_distance {
        m.v_count += 1;
        m.v_bar += (v - m.v_bar) / m.v_count as f64;
    }
    m
}

#[cfg(test)]
mod tests {
    use proptest::prelude::{prop_assert, proptest};
    use rand::SeedableRng;

    use super::*;

    #[test]
    fn default_rule() {
        assert!(default_accept_surface(1.0, 2.0));
        assert!(!default_accept_surface(2.0, 2.0));
        assert!(!default_accept_surface(3.0, 2.0));
    }

    #[test]
    fn bernoulli_rates() {
        let mut rng = Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| prob_accept(&mut rng, 1.0)));
        assert!((0..1000).all(|_| !prob_accept(&mut rng, 0.0)));
        let hits = (0..100_000).filter(|_| prob_accept(&mut rng, 0.2)).count();
        assert!((hits as f64 / 100_000.0 - 0.2).abs() < 0.01);
    }

    #[test]
    fn quality_examples() {
        assert!((quality_distance_prob(1.0, 0.0, 1.0) - 0.2).abs() < 1e-15);
        assert_eq!(quality_distance_prob(3.0, 3.0, 1.0), 1.0);
        assert!((quality_distance_prob(0.0, 2.0, 1.0) - 0.04).abs() < 1e-15);
        assert_eq!(quality_distance_prob(0.0, 2.0, 0.0), P_BASE);
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity_distance(&[0.0, 0.0], [&[3.0, 4.0][..]]).unwrap(), 5.0);
        assert_eq!(diversity_distance(&[1.0, 2.0], [&[1.0, 2.0][..]]).unwrap(), 0.0);
        assert_eq!(diversity_distance(&[0.0], [&[1.0][..], &[-2.0][..]]).unwrap(), 1.0);
        assert!(diversity_distance(&[0.0], std::iter::empty::<&[f64]>()).is_err());
        assert!((diversity_prob(1.0, 1.0) - 0.2).abs() < 1e-12);
        assert_eq!(diversity_prob(0.0, 1.0), 0.0);
        assert!((diversity_prob(2.0, 1.0) - 0.36).abs() < 1e-12);
        assert_eq!(diversity_prob(1.0, 0.0), P_BASE);
    }

    #[test]
    fn combination_examples() {
        let mut rng = Rng::seed_from_u64(0);
        let all = StrategyFlags {
            use_prob: true,
            use_qual: true,
            use_diver: true,
            ..StrategyFlags::default()
        };
        let means = RunningMeans::default();
        assert!(combined_accept(true, &all, &means, 5.0, 5.0, &mut rng));
        let none = StrategyFlags::default();
        assert!((0..100).all(|_| !combined_accept(false, &none, &means, 0.0, 9.0, &mut rng)));
        let forced = StrategyFlags {
            use_prob: true,
            p_base: 1.0 - f64::EPSILON / 4.0,
            ..StrategyFlags::default()
        };
        assert!((0..100).all(|_| combined_accept(false, &forced, &means, 0.0, 0.0, &mut rng)));
    }

    #[test]
    fn running_means() {
        let m = update_means(RunningMeans::default(), Some(2.0), None);
        assert_eq!((m.d_bar, m.d_count), (2.0, 1));
        let m = update_means(m, Some(4.0), None);
        assert_eq!((m.d_bar, m.d_count), (3.0, 2));
        let m = update_means(
            RunningMeans {
                v_bar: 1.0,
                v_count: 3,
                ..RunningMeans::default()
            },
            None,
            Some(5.0),
        );
        assert_eq!((m.v_bar, m.v_count), (2.0, 4));
    }

    #[test]
    fn labels() {
        assert_eq!(StrategyFlags::default().label(), "Default");
        let f = StrategyFlags {
            use_qual: true,
            use_diver: true,
            ..StrategyFlags::default()
        };
        assert_eq!(f.label(), "Qual+Diver");
    }

    fn acceptance_rate(flags: StrategyFlags, gap: f64, nn: f64, seed: u64) -> f64 {
        let mut rng = Rng::seed_from_u64(seed);
        let means = RunningMeans {
            d_bar: 1.0,
            d_count: 4,
            v_bar: 1.0,
            v_count: 4,
        };
        let n = 20_000;
        (0..n)
            .filter(|_| combined_accept(false, &flags, &means, gap, nn, &mut rng))
            .count() as f64
            / n as f64
    }

    #[test]
    fn more_flags_never_lower_acceptance() {
        let subsets: Vec<StrategyFlags> = (0..8u8)
            .map(|b| StrategyFlags {
                use_prob: b & 1 != 0,
                use_qual: b & 2 != 0,
                use_diver: b & 4 != 0,
                ..StrategyFlags::default()
            })
            .collect();
        for a in &subsets {
            for b in &subsets {
                let superset =
                    (!a.use_prob || b.use_prob) && (!a.use_qual || b.use_qual) && (!a.use_diver || b.use_diver);
                if superset {
                    let ra = acceptance_rate(*a, 1.5, 0.7, 1);
                    let rb = acceptance_rate(*b, 1.5, 0.7, 2);
                    assert!(rb + 0.02 >= ra, "{} {ra} vs {} {rb}", a.label(), b.label());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn calibration_and_monotonicity(mean in 1e-6f64..1e6, a in 0.0f64..10.0, b in 0.0f64..10.0) {
            prop_assert!((quality_prob(mean, mean, P_BASE) - 0.2).abs() < 1e-12);
            prop_assert!((diversity_prob_with(mean, mean, P_BASE) - 0.2).abs() < 1e-12);
            let (lo, hi) = if a <= b { (a * mean, b * mean) } else { (b * mean, a * mean) };
            prop_assert!(quality_prob(lo, mean, P_BASE) >= quality_prob(hi, mean, P_BASE));
            prop_assert!(diversity_prob_with(lo, mean, P_BASE) <= diversity_prob_with(hi, mean, P_BASE));
        }
    }
}
