use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{parallel_map, Objective};
use crate::domain::Bounds;
use crate::error::{Error, Result};

/// An external program that computes one fitness value per invocation.
///
/// Wire format, one exchange per process: the request is the D components
/// written with 17 significant digits, separated by single spaces and
/// terminated by `\n`; the reply is one decimal number followed by `\n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackBoxSpec {
    pub program: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub bounds: Bounds,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    pub parallel_workers: usize,
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

impl BlackBoxSpec {
    pub fn new(
        program: impl Into<String>,
        args: Vec<String>,
        bounds: Bounds,
        timeout: Duration,
        parallel_workers: usize,
    ) -> Result<Self> {
        if parallel_workers == 0 {
            return Err(Error::InvalidInput("parallel_workers must be >= 1".into()));
        }
        Ok(BlackBoxSpec {
            program: program.into(),
            args,
            bounds,
            timeout,
            parallel_workers,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }
}

/// Serialises one request line.
pub fn format_request(x: &[f64]) -> String {
    let mut line = x.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(" ");
    line.push('\n');
    line
}

/// Parses one reply line.
pub fn parse_response(line: &str, index: usize) -> Result<f64> {
    let trimmed = line.trim_end_matches(['\n', '\r']).trim();
    let value: f64 = trimmed.parse().map_err(|_| Error::Protocol {
        index,
        message: format!("non-numeric reply {trimmed:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Protocol {
            index,
            message: format!("non-finite reply {trimmed:?}"),
        });
    }
    Ok(value)
}

fn evaluate_one(spec: &BlackBoxSpec, index: usize, x: &[f64]) -> Result<f64> {
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: x.len(),
        });
    }
    let mut child = Command::new(&spec.program)
        .args(&spec.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Protocol {
            index,
            message: format!("cannot start {}: {e}", spec.program),
        })?;

    let mut stdin = child.stdin.take().expect("stdin is piped");
    let stdout = child.stdout.take().expect("stdout is piped");
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let mut line = String::new();
        let r = BufReader::new(stdout).read_line(&mut line).map(|_| line);
        let _ = tx.send(r);
    });
    // a child that exits without reading its input surfaces as a missing reply
    let _ = stdin.write_all(format_request(x).as_bytes());
    drop(stdin);

    let reply = match rx.recv_timeout(spec.timeout) {
        Ok(r) => r,
        Err(_) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Timeout { index });
        }
    };
    let _ = child.kill();
    let _ = child.wait();
    let line = reply.map_err(|e| Error::Protocol {
        index,
        message: e.to_string(),
    })?;
    if line.is_empty() {
        return Err(Error::Protocol {
            index,
            message: "process closed its output without replying".into(),
        });
    }
    parse_response(&line, index)
}

/// Evaluates a batch through the external program, running up to
/// `spec.parallel_workers` processes at once. Results come back in batch order.
pub fn blackbox_evaluate(spec: &BlackBoxSpec, batch: &[Vec<f64>]) -> Result<Vec<f64>> {
    parallel_map(batch, spec.parallel_workers, |i, x| evaluate_one(spec, i, x))
}

impl Objective for BlackBoxSpec {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        evaluate_one(self, 0, x)
    }

    fn evaluate_batch(&self, batch: &[Vec<f64>], _workers: usize) -> Result<Vec<f64>> {
        blackbox_evaluate(self, batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_round_trips_bit_exactly() {
        let x = [0.1, -1.0 / 3.0, 1e-300, 123456.789];
        let line = format_request(&x);
        assert!(line.ends_with('\n'));
        assert_eq!(line.matches(' ').count(), 3);
        let back: Vec<f64> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(back, x);
    }

    #[test]
    fn response_parsing() {
        assert_eq!(parse_response("1.5\n", 0).unwrap(), 1.5);
        assert_eq!(parse_response("2e3\r\n", 0).unwrap(), 2000.0);
        assert!(matches!(
            parse_response("oops\n", 4),
            Err(Error::Protocol { index: 4, .. })
        ));
        assert!(parse_response("nan\n", 0).is_err());
    }
}
