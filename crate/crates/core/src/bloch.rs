//! Bloch-space quantities on the polydisc.
//!
//! For holomorphic `f` and `z ∈ U^n`, with `w_j = (1 − |z_j|²)·|∂f/∂z_j(z)|`:
//!
//! * `Q_f(z) = sup_u |∇f(z)·u| / H_z(u, ū)^{1/2} = (Σ_j w_j²)^{1/2}`
//! * `G_f(z) = Σ_j w_j`
//! * `Rf(z) = Σ_j z_j·∂f/∂z_j(z)`
//!
//! The closed form for `Q_f` is the dual norm of the weighted Euclidean
//! norm `H_z`; `verify::direction_oracle` checks it against the definition.

use num_complex::Complex64;
use serde::Serialize;

use crate::geometry::PolydiscPoint;
use crate::par;
use crate::sampling::BoundarySampler;
use crate::search::{running_top_indices, PatternSearch, SearchResult};
use crate::symbols::{eval_jet, eval_scalar, EvalError, Jet, MapExpr};

/// `(1 − |z_j|²)·|∂_j f(z)|` for each `j`.
pub fn weighted_partials(jet: &Jet, z: &PolydiscPoint) -> Vec<f64> {
    z.coords()
        .iter()
        .zip(&jet.partials)
        .map(|(zj, dj)| {
            let r = zj.norm();
            (1.0 - r) * (1.0 + r) * dj.norm()
        })
        .collect()
}

fn euclid(w: &[f64]) -> f64 {
    w.iter().fold(0.0, |acc: f64, x| acc.hypot(*x))
}

pub fn q_f(f: &MapExpr, z: &PolydiscPoint) -> Result<f64, EvalError> {
    Ok(euclid(&weighted_partials(&eval_jet(f, z)?, z)))
}

pub fn g_f(f: &MapExpr, z: &PolydiscPoint) -> Result<f64, EvalError> {
    Ok(weighted_partials(&eval_jet(f, z)?, z).iter().sum())
}

/// `max_j (1 − |z_j|²)·|∂_j f(z)|`, the middle term of the equivalence chain
/// `G_f/n ≤ max_j w_j ≤ Q_f ≤ n·G_f`.
pub fn max_weighted_partial(f: &MapExpr, z: &PolydiscPoint) -> Result<f64, EvalError> {
    Ok(weighted_partials(&eval_jet(f, z)?, z).into_iter().fold(0.0, f64::max))
}

pub fn radial_derivative(f: &MapExpr, z: &PolydiscPoint) -> Result<Complex64, EvalError> {
    let jet = eval_jet(f, z)?;
    Ok(z.coords().iter().zip(&jet.partials).map(|(zj, dj)| zj * dj).sum())
}

/// All three pointwise chain quantities from one jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainValues {
    pub g: f64,
    pub max_w: f64,
    pub q: f64,
}

pub fn chain_values(f: &MapExpr, z: &PolydiscPoint) -> Result<ChainValues, EvalError> {
    let w = weighted_partials(&eval_jet(f, z)?, z);
    Ok(ChainValues {
        g: w.iter().sum(),
        max_w: w.iter().copied().fold(0.0, f64::max),
        q: euclid(&w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochConfig {
    pub budget: usize,
    pub seed: u64,
    /// Number of best samples refined by pattern search, per objective.
    pub starts: usize,
    pub search: PatternSearch,
}

impl BlochConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            starts: 8,
            search: PatternSearch::default(),
        }
    }
}

/// Sampled Bloch norms. Suprema over an open domain are approached from
/// below, so every field is a lower estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochNormEstimate {
    pub dim: usize,
    /// Estimate of `‖f‖_B = sup Q_f`.
    pub seminorm_b: f64,
    /// `|f(0)| + seminorm_b`.
    pub norm_1: f64,
    /// `|f(0)| + sup G_f`.
    pub norm_g: f64,
    pub sup_g: f64,
    pub abs_f0: f64,
    pub argmax_point: PolydiscPoint,
    pub argmax_g_point: PolydiscPoint,
    pub sample_budget: usize,
    pub is_lower_estimate: bool,
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    q: f64,
    g: f64,
}

fn pair_at(f: &MapExpr, z: &PolydiscPoint) -> Result<Pair, EvalError> {
    let w = weighted_partials(&eval_jet(f, z)?, z);
    Ok(Pair {
        q: euclid(&w),
        g: w.iter().sum(),
    })
}

/// Estimates `‖f‖_B`, `‖f‖_1` and `‖f‖` on `U^dim`.
///
/// Evaluates `Q_f` and `G_f` at the origin and on `budget` boundary-weighted
/// low-discrepancy samples, then refines by pattern search every sample that
/// ranks among the best `starts` of its own prefix (this includes the overall
/// best `starts`). Both suprema are taken over the union of every evaluated
/// point, which keeps `sup Q ≤ n·sup G` and `sup G ≤ n·sup Q` exact at the
/// estimate level. A larger budget with the same seed evaluates a superset
/// of points, so the estimates never decrease with the budget.
pub fn estimate_bloch_norms(
    f: &MapExpr,
    dim: usize,
    config: &BlochConfig,
) -> Result<BlochNormEstimate, EvalError> {
    let sampler = BoundarySampler::new(dim, config.seed);
    let point = |i: usize| {
        if i == 0 {
            PolydiscPoint::origin(dim)
        } else {
            sampler.point(i - 1)
        }
    };
    let abs_f0 = eval_scalar(f, &PolydiscPoint::origin(dim))?.norm();

    let evaluated = par::map_range(0..config.budget + 1, |i| pair_at(f, &point(i)));
    let mut pool: Vec<(PolydiscPoint, Pair)> = Vec::with_capacity(evaluated.len() + 2 * config.starts);
    let mut samples = Vec::with_capacity(evaluated.len());
    for r in evaluated {
        samples.push(r?);
    }
    let qs: Vec<f64> = samples.iter().map(|p| p.q).collect();
    let gs: Vec<f64> = samples.iter().map(|p| p.g).collect();

    let mut starts: Vec<(usize, bool)> = running_top_indices(&qs, config.starts).into_iter().map(|i| (i, true)).collect();
    starts.extend(running_top_indices(&gs, config.starts).into_iter().map(|i| (i, false)));

    let refined = par::map_slice(&starts, |&(i, by_q)| {
        let key = move |p: &Pair| if by_q { p.q } else { p.g };
        let start = SearchResult {
            point: point(i),
            value: key(&samples[i]),
            payload: samples[i],
        };
        config
            .search
            .maximize(start, |z| pair_at(f, z).ok().map(|p| (key(&p), p)))
    });

    for (i, p) in samples.iter().enumerate() {
        pool.push((point(i), *p));
    }
    for r in refined {
        pool.push((r.point, r.payload));
    }

    let best = |key: fn(&Pair) -> f64| {
        let mut arg = 0;
        for (i, (_, p)) in pool.iter().enumerate() {
            if key(p) > key(&pool[arg].1) {
                arg = i;
            }
        }
        arg
    };
    let iq = best(|p| p.q);
    let ig = best(|p| p.g);
    let seminorm_b = pool[iq].1.q;
    let sup_g = pool[ig].1.g;
    Ok(BlochNormEstimate {
        dim,
        seminorm_b,
        norm_1: abs_f0 + seminorm_b,
        norm_g: abs_f0 + sup_g,
        sup_g,
        abs_f0,
        argmax_point: pool[iq].0.clone(),
        argmax_g_point: pool[ig].0.clone(),
        sample_budget: config.budget,
        is_lower_estimate: true,
    })
}
