//! Essential-norm bounds for `C_φ − C_ψ : B → H^∞` on `U^n`.
//!
//! For `δ ∈ (0, 1)` let `E_δ = {z : max(|||φ(z)|||, |||ψ(z)|||) > 1 − δ}` and
//! `E_δ^l` its per-coordinate analogue. With
//!
//! ```text
//! S(δ) = sup_{E_δ} |||φ_{φ(z)}(ψ(z))|||      K(δ) = sup_{E_δ} k_{U^n}(φ(z), ψ(z))
//! ```
//!
//! the essential norm is bracketed by `¼·lim S(δ)` and `2n²·lim K(δ)` as
//! `δ → 0`, and the difference is compact exactly when `lim S(δ) = 0`.
//!
//! The limits are approximated along a finite [`DeltaLadder`]. All rows are
//! computed from one shared pool of evaluated points, so a smaller `δ` sees a
//! subset of the points a larger `δ` sees and the row estimates are exactly
//! monotone. An empty region contributes `sup ∅ = 0`.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{disc_distance, pseudo_hyperbolic, PolydiscPoint};
use crate::par;
use crate::sampling::BoundarySampler;
use crate::search::{top_indices, PatternSearch, SearchResult};
use crate::symbols::{eval_map, validate_self_map, EvalError, SymbolMap, ValidationReport};

/// Smallest accepted sample budget for [`estimate_sups`].
pub const MIN_BUDGET: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EssentialError {
    #[error("symbol dimensions differ: phi has {phi}, psi has {psi}")]
    DimensionMismatch { phi: usize, psi: usize },
    #[error("{which} failed self-map validation: {}", report.failure.as_deref().unwrap_or("unknown"))]
    NotSelfMap {
        which: &'static str,
        report: Box<ValidationReport>,
    },
    #[error("evaluation failed at {point:?}: {source}")]
    Eval {
        point: PolydiscPoint,
        #[source]
        source: EvalError,
    },
    #[error("invalid delta ladder: {0}")]
    InvalidLadder(String),
    #[error("sample budget {0} is below the minimum of {MIN_BUDGET}")]
    BudgetTooSmall(usize),
}

/// The pair of symbols `(φ, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPair {
    phi: SymbolMap,
    psi: SymbolMap,
}

impl SymbolPair {
    /// Pairs two maps after checking each with [`validate_self_map`].
    pub fn new(phi: SymbolMap, psi: SymbolMap, validation_budget: usize, seed: u64) -> Result<Self, EssentialError> {
        let pair = Self::trusted(phi, psi)?;
        for (which, m) in [("phi", &pair.phi), ("psi", &pair.psi)] {
            let report = validate_self_map(m, validation_budget, seed);
            if !report.passed {
                return Err(EssentialError::NotSelfMap {
                    which,
                    report: Box::new(report),
                });
            }
        }
        Ok(pair)
    }

    /// Pairs two maps the caller has already validated.
    pub fn trusted(phi: SymbolMap, psi: SymbolMap) -> Result<Self, EssentialError> {
        if phi.dim() != psi.dim() {
            return Err(EssentialError::DimensionMismatch {
                phi: phi.dim(),
                psi: psi.dim(),
            });
        }
        Ok(Self { phi, psi })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn phi(&self) -> &SymbolMap {
        &self.phi
    }

    pub fn psi(&self) -> &SymbolMap {
        &self.psi
    }

    /// `(ψ, φ)`.
    pub fn swapped(&self) -> Self {
        Self {
            phi: self.psi.clone(),
            psi: self.phi.clone(),
        }
    }

    /// Boundedness of `C_φ − C_ψ : B → H^∞` is a standing assumption that
    /// is never checked; reports echo it.
    pub fn boundedness_assumed(&self) -> bool {
        true
    }
}

/// Strictly decreasing values of `δ` in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DeltaLadder {
    deltas: Vec<f64>,
}

impl DeltaLadder {
    pub fn new(deltas: Vec<f64>) -> Result<Self, EssentialError> {
        if deltas.is_empty() {
            return Err(EssentialError::InvalidLadder("ladder is empty".into()));
        }
        if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return Err(EssentialError::InvalidLadder(format!("{d} is outside (0, 1)")));
        }
        if let Some(w) = deltas.windows(2).find(|w| w[1] >= w[0]) {
            return Err(EssentialError::InvalidLadder(format!(
                "not strictly decreasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { deltas })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }
}

impl Default for DeltaLadder {
    fn default() -> Self {
        Self {
            deltas: vec![0.2, 0.1, 0.05, 0.02, 0.01, 0.005],
        }
    }
}

/// Pointwise boundary and discrepancy data at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    /// `max(|||φ(z)|||, |||ψ(z)|||)`; `z ∈ E_δ` iff `depth > 1 − δ`.
    pub depth: f64,
    /// Per coordinate `max(|φ_l(z)|, |ψ_l(z)|)`.
    pub coord_depth: Vec<f64>,
    /// `ρ(φ_l(z), ψ_l(z))` for each `l`.
    pub per_coord: Vec<f64>,
    /// `|||φ_{φ(z)}(ψ(z))||| = max_l per_coord_l`.
    pub s: f64,
    /// `k_{U^n}(φ(z), ψ(z))`.
    pub k: f64,
}

fn eval_at(pair: &SymbolPair, z: &PolydiscPoint) -> Result<Discrepancy, EssentialError> {
    let wrap = |source| EssentialError::Eval {
        point: z.clone(),
        source,
    };
    let a = eval_map(&pair.phi, z).map_err(wrap)?;
    let b = eval_map(&pair.psi, z).map_err(wrap)?;
    let mut out = Discrepancy {
        depth: 0.0,
        coord_depth: Vec::with_capacity(pair.dim()),
        per_coord: Vec::with_capacity(pair.dim()),
        s: 0.0,
        k: 0.0,
    };
    for (&x, &y) in a.coords().iter().zip(b.coords()) {
        let cd = x.norm().max(y.norm());
        let r = pseudo_hyperbolic(x, y);
        out.depth = out.depth.max(cd);
        out.coord_depth.push(cd);
        out.per_coord.push(r);
        out.s = out.s.max(r);
        out.k = out.k.max(disc_distance(x, y));
    }
    Ok(out)
}

/// `S`-value, `K`-value and per-coordinate `ρ` at `z`.
pub fn discrepancy(pair: &SymbolPair, z: &PolydiscPoint) -> Result<Discrepancy, EssentialError> {
    eval_at(pair, z)
}

/// `z ∈ E_δ`.
pub fn in_e_delta(pair: &SymbolPair, z: &PolydiscPoint, delta: f64) -> Result<bool, EssentialError> {
    Ok(eval_at(pair, z)?.depth > 1.0 - delta)
}

/// `z ∈ E_δ^l` for a one-based coordinate index `l`.
///
/// # Panics
/// If `l` is not in `1..=n`.
pub fn in_e_delta_l(pair: &SymbolPair, z: &PolydiscPoint, delta: f64, l: usize) -> Result<bool, EssentialError> {
    assert!((1..=pair.dim()).contains(&l), "coordinate index {l} out of range");
    Ok(eval_at(pair, z)?.coord_depth[l - 1] > 1.0 - delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub budget: usize,
    pub seed: u64,
    /// Best samples per row handed to the pattern search.
    pub starts: usize,
    pub search: PatternSearch,
}

impl EstimateConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            starts: 8,
            search: PatternSearch::default(),
        }
    }

    pub fn with_refine_iters(mut self, iterations: usize) -> Self {
        self.search.iterations = iterations;
        self
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub delta: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// `sup_{E_δ} ρ(φ_l(z), ψ_l(z))` for each `l`.
    pub b_l: Vec<f64>,
    /// Sampled (not refined) points that fell in `E_δ`.
    pub samples_in_region: usize,
    #[serde(rename = "witness_S")]
    pub witness_s: Option<PolydiscPoint>,
    #[serde(rename = "witness_K")]
    pub witness_k: Option<PolydiscPoint>,
}

impl DeltaRow {
    pub fn is_empty(&self) -> bool {
        self.witness_s.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupEstimates {
    pub dim: usize,
    pub rows: Vec<DeltaRow>,
    /// Largest sampled `max(|||φ|||, |||ψ|||)`.
    pub max_depth: f64,
    /// Every row empty and `max_depth < 1 − max δ`: both symbols stay away
    /// from the boundary on the sample, the compact case.
    pub degenerate_compact: bool,
}

/// Estimates `S(δ)`, `K(δ)` and `b_l(δ)` for every rung of `ladder`.
///
/// One nested boundary-weighted point set is evaluated; each row's best
/// `starts` members are refined by pattern search constrained to `E_δ`; each
/// row then takes maxima over every evaluated point (samples and refined
/// iterates) that lies in its region.
pub fn estimate_sups(
    pair: &SymbolPair,
    ladder: &DeltaLadder,
    config: &EstimateConfig,
) -> Result<SupEstimates, EssentialError> {
    if config.budget < MIN_BUDGET {
        return Err(EssentialError::BudgetTooSmall(config.budget));
    }
    let dim = pair.dim();
    let sampler = BoundarySampler::new(dim, config.seed);
    let evaluated = par::map_range(0..config.budget, |i| {
        let z = sampler.point(i);
        eval_at(pair, &z).map(|d| (z, d))
    });
    let mut pool = Vec::with_capacity(config.budget);
    for r in evaluated {
        pool.push(r?);
    }
    let sampled = pool.len();
    let max_depth = pool.iter().map(|(_, d)| d.depth).fold(0.0, f64::max);

    let mut starts = Vec::new();
    for &delta in ladder.deltas() {
        let threshold = 1.0 - delta;
        let s_in_region: Vec<f64> = pool
            .iter()
            .map(|(_, d)| if d.depth > threshold { d.s } else { f64::NAN })
            .collect();
        starts.extend(top_indices(&s_in_region, config.starts).into_iter().map(|i| (i, threshold)));
    }
    let refined = par::map_slice(&starts, |&(i, threshold)| {
        let (z, d) = &pool[i];
        let start = SearchResult {
            point: z.clone(),
            value: d.s,
            payload: d.clone(),
        };
        config.search.maximize(start, |c| {
            eval_at(pair, c).ok().filter(|d| d.depth > threshold).map(|d| (d.s, d))
        })
    });
    pool.extend(refined.into_iter().map(|r| (r.point, r.payload)));

    let rows = ladder
        .deltas()
        .iter()
        .map(|&delta| {
            let threshold = 1.0 - delta;
            let mut row = DeltaRow {
                delta,
                s: 0.0,
                k: 0.0,
                b_l: vec![0.0; dim],
                samples_in_region: 0,
                witness_s: None,
                witness_k: None,
            };
            let (mut arg_s, mut arg_k) = (None, None);
            for (i, (_, d)) in pool.iter().enumerate() {
                if d.depth <= threshold {
                    continue;
                }
                if i < sampled {
                    row.samples_in_region += 1;
                }
                if arg_s.is_none() || d.s > row.s {
                    row.s = d.s;
                    arg_s = Some(i);
                }
                if arg_k.is_none() || d.k > row.k {
                    row.k = d.k;
                    arg_k = Some(i);
                }
                for (b, r) in row.b_l.iter_mut().zip(&d.per_coord) {
                    *b = b.max(*r);
                }
            }
            row.witness_s = arg_s.map(|i| pool[i].0.clone());
            row.witness_k = arg_k.map(|i| pool[i].0.clone());
            row
        })
        .collect::<Vec<_>>();

    let all_empty = rows.iter().all(DeltaRow::is_empty);
    let widest = ladder.deltas()[0];
    Ok(SupEstimates {
        dim,
        rows,
        max_depth,
        degenerate_compact: all_empty && max_depth < 1.0 - widest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictTolerances {
    pub eps_zero: f64,
    pub eps_stable: f64,
}

impl Default for VerdictTolerances {
    fn default() -> Self {
        Self {
            eps_zero: 1e-3,
            eps_stable: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Compact,
    NotCompact,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub degenerate_compact: bool,
    pub all_rows_empty: bool,
    /// Ladder values whose region held no sampled point.
    pub unsampled_deltas: Vec<f64>,
    pub max_symbol_sup_norm: f64,
    /// `S(δ_{i+1}) − S(δ_i)` along the ladder.
    pub s_trend: Vec<f64>,
    /// Last two rows agree within `eps_stable`.
    pub stable: bool,
    pub tolerances: VerdictTolerances,
    pub notes: Vec<String>,
}

/// Two-sided essential-norm bounds with the compactness verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub dim: usize,
    pub rows: Vec<DeltaRow>,
    #[serde(rename = "S_limit")]
    pub s_limit: f64,
    #[serde(rename = "K_limit")]
    pub k_limit: f64,
    /// `¼·S_limit`.
    pub lower_bound: f64,
    /// `2n²·K_limit`.
    pub upper_bound: f64,
    pub verdict: Verdict,
    pub boundedness_assumed: bool,
    pub diagnostics: Diagnostics,
}

/// Reads the limits off the smallest-δ row and renders the verdict.
///
/// `Compact` needs `S_limit ≤ eps_zero`, `NotCompact` needs
/// `S_limit ≥ 10·eps_zero`; both also need the last two rows to agree within
/// `eps_stable`. Anything else is `Indeterminate`. When every row is empty
/// the limits are 0 and the verdict is `Compact`.
pub fn extrapolate_and_verdict(estimates: SupEstimates, tol: VerdictTolerances) -> BoundReport {
    let SupEstimates {
        dim,
        rows,
        max_depth,
        degenerate_compact,
    } = estimates;
    let n = dim as f64;
    let mut notes = vec!["boundedness of C_phi - C_psi: B -> H^inf is assumed, not checked".to_string()];
    let all_rows_empty = rows.iter().all(DeltaRow::is_empty);
    let s_trend: Vec<f64> = rows.windows(2).map(|w| w[1].s - w[0].s).collect();
    let unsampled_deltas = rows.iter().filter(|r| r.samples_in_region == 0).map(|r| r.delta).collect();

    let (s_limit, k_limit) = rows.last().map_or((0.0, 0.0), |r| (r.s, r.k));
    let stable = match rows.len() {
        0 | 1 => all_rows_empty,
        len => (rows[len - 1].s - rows[len - 2].s).abs() <= tol.eps_stable,
    };
    let verdict = if all_rows_empty {
        if degenerate_compact {
            notes.push("every E_delta row is empty: both symbols stay inside the smallest 1 - delta".into());
        } else {
            notes.push("every E_delta row is empty".into());
        }
        Verdict::Compact
    } else if !stable {
        notes.push(if rows.len() < 2 {
            "a single ladder row gives no trend".into()
        } else {
            format!(
                "last two rows differ by {:e} > eps_stable",
                (rows[rows.len() - 1].s - rows[rows.len() - 2].s).abs()
            )
        });
        Verdict::Indeterminate
    } else if s_limit <= tol.eps_zero {
        Verdict::Compact
    } else if s_limit >= 10.0 * tol.eps_zero {
        Verdict::NotCompact
    } else {
        notes.push("S_limit lies between eps_zero and 10*eps_zero".into());
        Verdict::Indeterminate
    };
    if rows.last().is_some_and(DeltaRow::is_empty) && !all_rows_empty {
        notes.push("smallest-delta row is empty; its sup is taken as 0".into());
    }

    let (lower_bound, upper_bound) = (0.25 * s_limit, 2.0 * n * n * k_limit);
    debug_assert!(lower_bound <= upper_bound + 1e-12, "{lower_bound} > {upper_bound}");
    BoundReport {
        dim,
        rows,
        s_limit,
        k_limit,
        lower_bound,
        upper_bound,
        verdict,
        boundedness_assumed: true,
        diagnostics: Diagnostics {
            degenerate_compact: all_rows_empty && degenerate_compact,
            all_rows_empty,
            unsampled_deltas,
            max_symbol_sup_norm: max_depth,
            s_trend,
            stable,
            tolerances: tol,
            notes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{kobayashi, rho};
    use crate::sampling::{random_boundary_point, random_point, trial_rng};
    use crate::symbols::{eval_map, generate, parse_map};

    fn pair(phi: &str, psi: &str, n: usize) -> SymbolPair {
        SymbolPair::new(parse_map(phi, n).unwrap(), parse_map(psi, n).unwrap(), 2000, 1).unwrap()
    }

    fn pt(xs: &[f64]) -> PolydiscPoint {
        PolydiscPoint::from_reals(xs).unwrap()
    }

    #[test]
    fn region_examples() {
        let id = pair("z1; z2", "z1; z2", 2);
        assert!(in_e_delta(&id, &pt(&[0.95, 0.0]), 0.1).unwrap());
        let half = pair("scale(0.5,z1); scale(0.5,z2)", "scale(0.5,z1); scale(0.5,z2)", 2);
        assert!(!in_e_delta(&half, &pt(&[0.99, -0.99]), 0.1).unwrap());
        let sq = pair("pow(z1,2); z2", "z1; z2", 2);
        let z = pt(&[0.96, 0.0]);
        assert!(in_e_delta(&sq, &z, 0.05).unwrap());
        assert!(in_e_delta_l(&sq, &z, 0.05, 1).unwrap());
        assert!(!in_e_delta_l(&sq, &z, 0.05, 2).unwrap());
    }

    #[test]
    fn union_of_coordinate_regions() {
        let p = pair("pow(z1,2); mob(0.3, z2)", "scale(0.9, z1); z1*z2", 2);
        for i in 0..10_000 {
            let mut rng = trial_rng(2, i);
            let z = random_boundary_point(&mut rng, 2);
            let delta = rand::Rng::random_range(&mut rng, 0.001..0.5);
            let whole = in_e_delta(&p, &z, delta).unwrap();
            let any = (1..=2).any(|l| in_e_delta_l(&p, &z, delta, l).unwrap());
            assert_eq!(whole, any);
        }
    }

    #[test]
    fn discrepancy_examples() {
        let same = pair("mob(0.2, z1); z1*z2", "mob(0.2, z1); z1*z2", 2);
        let d = discrepancy(&same, &pt(&[0.3, -0.7])).unwrap();
        assert_eq!((d.s, d.k), (0.0, 0.0));
        assert_eq!(d.per_coord, vec![0.0, 0.0]);

        let p = pair("z1; z2", "pow(z1,2); z2", 2);
        let d = discrepancy(&p, &pt(&[-0.9, 0.0])).unwrap();
        let oracle = rho(num_complex::Complex64::new(-0.9, 0.0), num_complex::Complex64::new(0.81, 0.0)).unwrap();
        assert!((d.per_coord[0] - oracle).abs() < 1e-15);
        assert!((d.per_coord[0] - 0.9 * 1.9 / 1.729).abs() < 1e-15);
        assert!((d.per_coord[0] - 0.9890).abs() < 1e-4);
    }

    #[test]
    fn k_is_artanh_of_s() {
        let p = pair("mob(0.4, z1); z2*z1", "pow(z1, 3); scale(0.7, z2)", 2);
        for i in 0..1000 {
            let mut rng = trial_rng(4, i);
            let z = random_point(&mut rng, 2, 0.99);
            let d = discrepancy(&p, &z).unwrap();
            assert!(d.s < 1.0);
            assert!((d.k - crate::geometry::artanh(d.s)).abs() <= 1e-12 * d.k.max(1.0));
            let k = kobayashi(&eval_map(p.phi(), &z).unwrap(), &eval_map(p.psi(), &z).unwrap());
            assert_eq!(d.k, k);
        }
    }

    #[test]
    fn dilation_contracts_kobayashi() {
        for i in 0..2000 {
            let mut rng = trial_rng(6, i);
            let dim = 1 + i as usize % 3;
            let phi = generate::random_self_map(&mut rng, dim, 2);
            let psi = generate::random_self_map(&mut rng, dim, 2);
            let z = random_point(&mut rng, dim, 0.99);
            let r = rand::Rng::random_range(&mut rng, 0.0..1.0);
            let (a, b) = (eval_map(&phi, &z).unwrap(), eval_map(&psi, &z).unwrap());
            assert!(kobayashi(&a.dilate(r), &b.dilate(r)) <= kobayashi(&a, &b) + 1e-12);
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(DeltaLadder::new(vec![]).is_err());
        assert!(DeltaLadder::new(vec![0.1, 0.2]).is_err());
        assert!(DeltaLadder::new(vec![0.1, 0.1]).is_err());
        assert!(DeltaLadder::new(vec![1.0, 0.5]).is_err());
        assert!(DeltaLadder::new(vec![0.5, 0.0]).is_err());
        assert_eq!(DeltaLadder::default().deltas(), &[0.2, 0.1, 0.05, 0.02, 0.01, 0.005]);
    }

    #[test]
    fn rejects_bad_pairs() {
        let a = parse_map("z1; z2", 2).unwrap();
        let b = parse_map("z1", 1).unwrap();
        assert!(matches!(SymbolPair::trusted(a.clone(), b), Err(EssentialError::DimensionMismatch { .. })));
        let esc = parse_map("z1 + 0.5; z2", 2).unwrap();
        assert!(matches!(
            SymbolPair::new(a.clone(), esc, 1000, 1),
            Err(EssentialError::NotSelfMap { which: "psi", .. })
        ));
        let p = SymbolPair::trusted(a.clone(), a).unwrap();
        assert_eq!(
            estimate_sups(&p, &DeltaLadder::default(), &EstimateConfig::new(10, 1)),
            Err(EssentialError::BudgetTooSmall(10))
        );
    }

    #[test]
    fn identical_symbols_give_zero_rows() {
        let p = pair("z1; z2", "z1; z2", 2);
        let est = estimate_sups(&p, &DeltaLadder::default(), &EstimateConfig::new(5000, 1)).unwrap();
        for row in &est.rows {
            assert_eq!((row.s, row.k), (0.0, 0.0));
            assert!(row.samples_in_region > 0);
        }
        let rep = extrapolate_and_verdict(est, VerdictTolerances::default());
        assert_eq!(rep.verdict, Verdict::Compact);
        assert_eq!((rep.lower_bound, rep.upper_bound), (0.0, 0.0));
    }

    #[test]
    fn contractions_give_empty_rows() {
        let p = pair("scale(0.5,z1); scale(0.5,z2)", "z1/3; z2/3", 2);
        let est = estimate_sups(&p, &DeltaLadder::default(), &EstimateConfig::new(5000, 1)).unwrap();
        assert!(est.rows.iter().all(|r| r.is_empty() && r.s == 0.0 && r.samples_in_region == 0));
        assert!(est.degenerate_compact);
        let rep = extrapolate_and_verdict(est, VerdictTolerances::default());
        assert_eq!(rep.verdict, Verdict::Compact);
        assert!(rep.diagnostics.degenerate_compact);
        assert_eq!(rep.diagnostics.unsampled_deltas, DeltaLadder::default().deltas());
    }

    #[test]
    fn square_versus_identity_is_not_compact() {
        let p = pair("z1; z2", "pow(z1,2); z2", 2);
        let est = estimate_sups(&p, &DeltaLadder::default(), &EstimateConfig::new(20_000, 1)).unwrap();
        for row in est.rows.iter().filter(|r| r.delta <= 0.05) {
            assert!(row.s >= 0.98, "{row:?}");
        }
        for w in est.rows.windows(2) {
            assert!(w[1].s <= w[0].s && w[1].k <= w[0].k);
        }
        let rep = extrapolate_and_verdict(est, VerdictTolerances::default());
        assert_eq!(rep.verdict, Verdict::NotCompact);
        assert!(rep.lower_bound >= 0.2475);
        assert!(rep.lower_bound <= rep.upper_bound);
    }

    fn row(delta: f64, s: f64) -> DeltaRow {
        DeltaRow {
            delta,
            s,
            k: crate::geometry::artanh(s),
            b_l: vec![s],
            samples_in_region: 1,
            witness_s: Some(PolydiscPoint::origin(1)),
            witness_k: Some(PolydiscPoint::origin(1)),
        }
    }

    fn est(rows: Vec<DeltaRow>) -> SupEstimates {
        SupEstimates {
            dim: 1,
            rows,
            max_depth: 0.999,
            degenerate_compact: false,
        }
    }

    #[test]
    fn verdict_gates() {
        let tol = VerdictTolerances::default();
        let r = extrapolate_and_verdict(est(vec![row(0.1, 0.5), row(0.05, 0.3), row(0.01, 0.1)]), tol);
        assert_eq!(r.verdict, Verdict::Indeterminate);
        assert!(!r.diagnostics.stable);
        let r = extrapolate_and_verdict(est(vec![row(0.1, 0.5), row(0.05, 0.0005), row(0.01, 0.0004)]), tol);
        assert_eq!(r.verdict, Verdict::Compact);
        let r = extrapolate_and_verdict(est(vec![row(0.1, 0.99), row(0.05, 0.99)]), tol);
        assert_eq!(r.verdict, Verdict::NotCompact);
        assert!((r.lower_bound - 0.2475).abs() < 1e-15);
        let r = extrapolate_and_verdict(est(vec![row(0.1, 0.005), row(0.05, 0.005)]), tol);
        assert_eq!(r.verdict, Verdict::Indeterminate);
        let r = extrapolate_and_verdict(est(vec![row(0.1, 0.5)]), tol);
        assert_eq!(r.verdict, Verdict::Indeterminate);
    }
}
