use serde::Serialize;

use super::{eval_components, EvalError, SymbolMap};
use crate::geometry::{sup_norm, PolydiscPoint};
use crate::par;
use crate::sampling::BoundarySampler;

/// A sampled image with sup norm at or above this fails validation.
pub const SELF_MAP_THRESHOLD: f64 = 1.0 - 1e-12;

/// Outcome of [`validate_self_map`].
///
/// A pass means no sampled point escaped; it is evidence that the map sends
/// `U^n` into itself, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub samples: usize,
    /// Largest `|||m(z)|||` seen over the points evaluated before stopping.
    pub max_sup_norm: f64,
    pub argmax: PolydiscPoint,
    /// First failing sample (origin first, then sequence order).
    pub witness: Option<PolydiscPoint>,
    pub failure: Option<String>,
}

enum Probe {
    Value(f64),
    Failed(EvalError),
}

/// Evaluates `m` at the origin and on `budget` boundary-weighted samples and
/// checks that every image stays below [`SELF_MAP_THRESHOLD`] in sup norm.
pub fn validate_self_map(m: &SymbolMap, budget: usize, seed: u64) -> ValidationReport {
    let sampler = BoundarySampler::new(m.dim(), seed);
    let point = |i: usize| {
        if i == 0 {
            PolydiscPoint::origin(m.dim())
        } else {
            sampler.point(i - 1)
        }
    };
    let probes = par::map_range(0..budget + 1, |i| match eval_components(m, &point(i)) {
        Ok(values) => Probe::Value(sup_norm(&values)),
        Err(e) => Probe::Failed(e),
    });

    let mut max_sup_norm = 0.0;
    let mut argmax = 0;
    for (i, probe) in probes.into_iter().enumerate() {
        let failure = match probe {
            Probe::Value(s) => {
                if s > max_sup_norm || i == 0 {
                    max_sup_norm = s;
                    argmax = i;
                }
                (s >= SELF_MAP_THRESHOLD)
                    .then(|| format!("|||m(z)||| = {s} reaches the boundary threshold"))
            }
            Probe::Failed(e) => Some(e.to_string()),
        };
        if let Some(failure) = failure {
            return ValidationReport {
                passed: false,
                samples: i + 1,
                max_sup_norm,
                argmax: point(argmax),
                witness: Some(point(i)),
                failure: Some(failure),
            };
        }
    }
    ValidationReport {
        passed: true,
        samples: budget + 1,
        max_sup_norm,
        argmax: point(argmax),
        witness: None,
        failure: None,
    }
}
