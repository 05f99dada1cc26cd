use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalable base functions. All are evaluated on the shifted vector
/// `z = x - shift` and have their global minimum 0 at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Sphere,
    Schwefel221,
    Rosenbrock,
    Rastrigin,
    Griewank,
    Ackley,
    Schwefel222,
    Schwefel12,
    ExtendedF10,
    Bohachevsky,
    Schaffer,
}

impl BaseKind {
    pub const ALL: [BaseKind; 11] = [
        BaseKind::Sphere,
        BaseKind::Schwefel221,
        BaseKind::Rosenbrock,
        BaseKind::Rastrigin,
        BaseKind::Griewank,
        BaseKind::Ackley,
        BaseKind::Schwefel222,
        BaseKind::Schwefel12,
        BaseKind::ExtendedF10,
        BaseKind::Bohachevsky,
        BaseKind::Schaffer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::Sphere => "sphere",
            BaseKind::Schwefel221 => "schwefel_2_21",
            BaseKind::Rosenbrock => "rosenbrock",
            BaseKind::Rastrigin => "rastrigin",
            BaseKind::Griewank => "griewank",
            BaseKind::Ackley => "ackley",
            BaseKind::Schwefel222 => "schwefel_2_22",
            BaseKind::Schwefel12 => "schwefel_1_2",
            BaseKind::ExtendedF10 => "extended_f10",
            BaseKind::Bohachevsky => "bohachevsky",
            BaseKind::Schaffer => "schaffer",
        }
    }

    /// Classical search domain `[-r, r]` per dimension.
    pub fn domain(self) -> (f64, f64) {
        let r = match self {
            BaseKind::Sphere
            | BaseKind::Schwefel221
            | BaseKind::Rosenbrock
            | BaseKind::ExtendedF10
            | BaseKind::Schaffer => 100.0,
            BaseKind::Rastrigin => 5.0,
            BaseKind::Griewank => 600.0,
            BaseKind::Ackley => 32.0,
            BaseKind::Schwefel222 => 10.0,
            BaseKind::Schwefel12 => 65.536,
            BaseKind::Bohachevsky => 15.0,
        };
        (-r, r)
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

fn f10_pair(x: f64, y: f64) -> f64 {
    let r = x * x + y * y;
    let s = (50.0 * r.powf(0.1)).sin();
    r.powf(0.25) * (s * s + 1.0)
}

/// Evaluates a base function on an already shifted vector.
pub fn evaluate_base(kind: BaseKind, z: &[f64]) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::InvalidInput("empty vector".into()));
    }
    if z.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN component".into()));
    }
    let d = z.len();
    let value = match kind {
        BaseKind::Sphere => z.iter().map(|v| v * v).sum(),
        BaseKind::Schwefel221 => z.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        BaseKind::Rosenbrock => z
            .windows(2)
            .map(|w| {
                // optimum moved from (1, ..., 1) to the origin
                let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                100.0 * (b - a * a).powi(2) + (a - 1.0).powi(2)
            })
            .sum(),
        BaseKind::Rastrigin => 10.0 * d as f64 + z.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>(),
        BaseKind::Griewank => {
            let sum: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
            let prod: f64 = z
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            sum - prod + 1.0
        }
        BaseKind::Ackley => {
            let n = d as f64;
            let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
            let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
            -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
        }
        BaseKind::Schwefel222 => {
            let sum: f64 = z.iter().map(|v| v.abs()).sum();
            let prod: f64 = z.iter().map(|v| v.abs()).product();
            sum + prod
        }
        BaseKind::Schwefel12 => {
            let mut prefix = 0.0;
            z.iter()
                .map(|v| {
                    prefix += v;
                    prefix * prefix
                })
                .sum()
        }
        BaseKind::ExtendedF10 => (0..d).map(|i| f10_pair(z[i], z[(i + 1) % d])).sum(),
        BaseKind::Bohachevsky => z
            .windows(2)
            .map(|w| {
                w[0] * w[0] + 2.0 * w[1] * w[1] - 0.3 * (3.0 * PI * w[0]).cos() - 0.4 * (4.0 * PI * w[1]).cos() + 0.7
            })
            .sum(),
        BaseKind::Schaffer => z.windows(2).map(|w| f10_pair(w[0], w[1])).sum(),
    };
    Ok(value)
}
