//! Shifted scalable test functions, hybrid compositions, and the adapter for
//! external black-box programs.

mod blackbox;
mod functions;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use blackbox::{blackbox_evaluate, format_request, parse_response, BlackBoxSpec};
pub use functions::{evaluate_base, BaseKind};

use crate::domain::{Bounds, RngStreams, StreamKind};
use crate::error::{Error, Result};

/// Something the optimiser can spend budget on.
pub trait Objective: Sync {
    fn bounds(&self) -> &Bounds;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64>;

    /// Evaluates a batch, possibly concurrently. Results are returned in
    /// batch order regardless of completion order.
    fn evaluate_batch(&self, batch: &[Vec<f64>], workers: usize) -> Result<Vec<f64>> {
        parallel_map(batch, workers, |_, x| self.evaluate(x))
    }
}

/// Runs `f` over `items` on up to `workers` threads, preserving order. The
/// first error by item index wins.
pub(crate) fn parallel_map<T, F>(items: &[T], workers: usize, f: F) -> Result<Vec<f64>>
where
    T: Sync,
    F: Fn(usize, &T) -> Result<f64> + Sync,
{
    let workers = workers.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<f64>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(i, &items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Composition {
    Simple(BaseKind),
    /// `first` on the leading `round(split * D)` dimensions, `second` on the rest.
    Hybrid {
        first: BaseKind,
        second: BaseKind,
        split: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub id: String,
    pub bounds: Bounds,
    /// Location of the optimum.
    pub shift: Vec<f64>,
    pub composition: Composition,
}

/// Index where a hybrid's second block starts.
pub fn hybrid_split_point(dim: usize, split: f64) -> Result<usize> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "a hybrid needs at least 2 dimensions, got {dim}"
        )));
    }
    let k = (split * dim as f64).round() as usize;
    Ok(k.clamp(1, dim - 1))
}

impl BenchmarkSpec {
    pub fn simple(id: impl Into<String>, kind: BaseKind, dim: usize, shift: Vec<f64>) -> Result<Self> {
        let (lo, hi) = kind.domain();
        let spec = BenchmarkSpec {
            id: id.into(),
            bounds: Bounds::uniform(dim, lo, hi)?,
            shift,
            composition: Composition::Simple(kind),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hybrid(
        id: impl Into<String>,
        first: BaseKind,
        second: BaseKind,
        split: f64,
        dim: usize,
        shift: Vec<f64>,
    ) -> Result<Self> {
        let k = hybrid_split_point(dim, split)?;
        let (lo_a, hi_a) = first.domain();
        let (lo_b, hi_b) = second.domain();
        let bounds = Bounds::uniform(k, lo_a, hi_a)?.concat(&Bounds::uniform(dim - k, lo_b, hi_b)?);
        let spec = BenchmarkSpec {
            id: id.into(),
            bounds,
            shift,
            composition: Composition::Hybrid { first, second, split },
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.shift.len() != self.bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.dim(),
                actual: self.shift.len(),
            });
        }
        if !self.bounds.contains(&self.shift) {
            return Err(Error::InvalidBounds(format!(
                "shift of {} lies outside the bounds",
                self.id
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// Short description of the composition, e.g. `sphere` or
    /// `extended_f10+rastrigin`.
    pub fn kind_label(&self) -> String {
        match &self.composition {
            Composition::Simple(k) => k.name().to_string(),
            Composition::Hybrid { first, second, .. } => format!("{first}+{second}"),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let z: Vec<f64> = x.iter().zip(&self.shift).map(|(a, s)| a - s).collect();
        match &self.composition {
            Composition::Simple(kind) => evaluate_base(*kind, &z),
            Composition::Hybrid { first, second, split } => {
                let k = hybrid_split_point(z.len(), *split)?;
                Ok(evaluate_base(*first, &z[..k])? + evaluate_base(*second, &z[k..])?)
            }
        }
    }
}

impl Objective for BenchmarkSpec {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        BenchmarkSpec::evaluate(self, x)
    }
}

/// The hybrid pairs used for F12..F19.
pub const HYBRID_PAIRS: [(BaseKind, BaseKind); 8] = [
    (BaseKind::ExtendedF10, BaseKind::Sphere),
    (BaseKind::ExtendedF10, BaseKind::Rosenbrock),
    (BaseKind::ExtendedF10, BaseKind::Rastrigin),
    (BaseKind::Bohachevsky, BaseKind::Schwefel222),
    (BaseKind::Bohachevsky, BaseKind::Sphere),
    (BaseKind::Bohachevsky, BaseKind::Rosenbrock),
    (BaseKind::Schaffer, BaseKind::Rastrigin),
    (BaseKind::Schaffer, BaseKind::Schwefel222),
];

/// Default block ratio for hybrid functions.
pub const HYBRID_SPLIT: f64 = 0.5;

fn draw_shift(bounds: &Bounds, rng: &mut crate::domain::Rng) -> Vec<f64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| {
            let width = hi - lo;
            lo + width * (0.1 + 0.8 * rng.gen::<f64>())
        })
        .collect()
}

/// Builds the 19-function suite: F1..F11 shifted base functions and F12..F19
/// hybrids. Shifts are uniform in the central 80% of each interval.
pub fn make_suite(dim: usize, seed: u64) -> Result<Vec<BenchmarkSpec>> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("suite needs D >= 2, got {dim}")));
    }
    let mut rng = RngStreams::stream(seed, 0, StreamKind::ShiftGeneration);
    let mut suite = Vec::with_capacity(19);
    for (i, kind) in BaseKind::ALL.into_iter().enumerate() {
        let (lo, hi) = kind.domain();
        let shift = draw_shift(&Bounds::uniform(dim, lo, hi)?, &mut rng);
        suite.push(BenchmarkSpec::simple(format!("F{}", i + 1), kind, dim, shift)?);
    }
    for (i, (first, second)) in HYBRID_PAIRS.into_iter().enumerate() {
        let k = hybrid_split_point(dim, HYBRID_SPLIT)?;
        let (la, ha) = first.domain();
        let (lb, hb) = second.domain();
        let bounds = Bounds::uniform(k, la, ha)?.concat(&Bounds::uniform(dim - k, lb, hb)?);
        let shift = draw_shift(&bounds, &mut rng);
        suite.push(BenchmarkSpec::hybrid(
            format!("F{}", i + 12),
            first,
            second,
            HYBRID_SPLIT,
            dim,
            shift,
        )?);
    }
    Ok(suite)
}

/// Looks up one suite function by id (`F1`..`F19`).
pub fn suite_function(dim: usize, seed: u64, id: &str) -> Result<BenchmarkSpec> {
    make_suite(dim, seed)?
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_is_at_shift() {
        let f1 = BenchmarkSpec::simple("F1", BaseKind::Sphere, 3, vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(f1.evaluate(&[1.0, -2.0, 0.5]).unwrap(), 0.0);

        let shift = vec![0.5, 1.0, -1.0, 2.0];
        let h = BenchmarkSpec::hybrid("H", BaseKind::Sphere, BaseKind::Rastrigin, 0.5, 4, shift.clone()).unwrap();
        assert_eq!(h.evaluate(&shift).unwrap(), 0.0);
    }

    #[test]
    fn hybrid_of_identical_bases_equals_base() {
        let zero = vec![0.0; 4];
        let h = BenchmarkSpec::hybrid("H", BaseKind::Sphere, BaseKind::Sphere, 0.5, 4, zero.clone()).unwrap();
        let s = BenchmarkSpec::simple("S", BaseKind::Sphere, 4, zero).unwrap();
        let x = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(h.evaluate(&x).unwrap(), 4.0);
        assert_eq!(s.evaluate(&x).unwrap(), 4.0);
    }

    #[test]
    fn split_point_keeps_both_blocks_non_empty() {
        assert_eq!(hybrid_split_point(50, 0.5).unwrap(), 25);
        assert_eq!(hybrid_split_point(2, 0.01).unwrap(), 1);
        assert_eq!(hybrid_split_point(2, 0.99).unwrap(), 1);
        assert!(hybrid_split_point(1, 0.5).is_err());
    }

    #[test]
    fn suite_shape() {
        let suite = make_suite(50, 7).unwrap();
        assert_eq!(suite.len(), 19);
        assert!(suite.iter().all(|s| s.dim() == 50));
        let hybrids = suite
            .iter()
            .filter(|s| matches!(s.composition, Composition::Hybrid { .. }))
            .count();
        assert_eq!(hybrids, 8);
        let ids: Vec<_> = suite.iter().map(|s| s.id.clone()).collect();
        assert_eq!(ids[0], "F1");
        assert_eq!(ids[18], "F19");
    }

    #[test]
    fn suite_is_deterministic() {
        let a = make_suite(50, 7).unwrap();
        let b = make_suite(50, 7).unwrap();
        assert_eq!(a, b);
        let c = make_suite(50, 8).unwrap();
        assert_ne!(a[0].shift, c[0].shift);
    }

    #[test]
    fn small_suite_shifts_inside_central_band() {
        for spec in make_suite(2, 1).unwrap() {
            assert_eq!(spec.shift.len(), 2);
            for ((s, lo), hi) in spec.shift.iter().zip(spec.bounds.lower()).zip(spec.bounds.upper()) {
                let w = hi - lo;
                assert!(*s >= lo + 0.1 * w && *s <= hi - 0.1 * w);
            }
            let v = spec.evaluate(&spec.shift).unwrap();
            assert!(v.abs() < 1e-9, "{}: {v}", spec.id);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let f = BenchmarkSpec::simple("F1", BaseKind::Sphere, 2, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            f.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn parallel_batch_matches_sequential() {
        let f = suite_function(10, 3, "F6").unwrap();
        let batch: Vec<Vec<f64>> = (0..23).map(|i| vec![i as f64 * 0.37 - 4.0; 10]).collect();
        let seq = f.evaluate_batch(&batch, 1).unwrap();
        let par = f.evaluate_batch(&batch, 8).unwrap();
        assert_eq!(seq, par);
    }

    proptest::proptest! {
        #[test]
        fn hybrid_additivity(xs in proptest::collection::vec(-50.0f64..50.0, 2..20), split in 0.05f64..0.95) {
            let d = xs.len();
            let zero = vec![0.0; d];
            for kind in [BaseKind::Sphere, BaseKind::Rastrigin, BaseKind::Schwefel222] {
                let (lo, hi) = kind.domain();
                let x: Vec<f64> = xs.iter().map(|v| v.clamp(lo, hi)).collect();
                let h = BenchmarkSpec::hybrid("H", kind, kind, split, d, zero.clone()).unwrap();
                let k = hybrid_split_point(d, split).unwrap();
                let direct = evaluate_base(kind, &x[..k]).unwrap() + evaluate_base(kind, &x[k..]).unwrap();
                proptest::prop_assert_eq!(h.evaluate(&x).unwrap(), direct);
                if kind == BaseKind::Sphere {
                    let whole = evaluate_base(kind, &x).unwrap();
                    proptest::prop_assert!((h.evaluate(&x).unwrap() - whole).abs() <= 1e-9 * whole.max(1.0));
                }
            }
        }
    }
}
