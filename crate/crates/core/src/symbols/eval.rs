use num_complex::Complex64;
use thiserror::Error;

use super::{MapExpr, SymbolMap};
use crate::geometry::{PolydiscPoint, INTERIOR_MARGIN};

/// Denominators and `log` arguments with modulus below this are rejected.
pub const POLE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("pole: denominator modulus {modulus:e} below {POLE_GUARD:e}")]
    Pole { modulus: f64 },
    #[error("log argument modulus {modulus:e} below {POLE_GUARD:e}")]
    LogBranch { modulus: f64 },
    #[error("value is not finite")]
    NonFinite,
    #[error("expression uses z{index} but the point has dimension {dim}")]
    DimensionMismatch { index: usize, dim: usize },
    #[error("component {component} has modulus {modulus}, the map leaves the polydisc")]
    Escape { component: usize, modulus: f64 },
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn guard_den(d: Complex64) -> Result<Complex64, EvalError> {
    let modulus = d.norm();
    if modulus < POLE_GUARD {
        Err(EvalError::Pole { modulus })
    } else {
        Ok(d)
    }
}

fn guard_log(x: Complex64) -> Result<Complex64, EvalError> {
    let modulus = x.norm();
    if modulus < POLE_GUARD {
        Err(EvalError::LogBranch { modulus })
    } else {
        Ok(x)
    }
}

fn finite(x: Complex64) -> Result<Complex64, EvalError> {
    if x.re.is_finite() && x.im.is_finite() {
        Ok(x)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn scalar(e: &MapExpr, z: &[Complex64]) -> Result<Complex64, EvalError> {
    use MapExpr::*;
    Ok(match e {
        Const(c) => *c,
        Var(j) => *z.get(*j).ok_or(EvalError::DimensionMismatch {
            index: j + 1,
            dim: z.len(),
        })?,
        Neg(a) => -scalar(a, z)?,
        Add(a, b) => scalar(a, z)? + scalar(b, z)?,
        Sub(a, b) => scalar(a, z)? - scalar(b, z)?,
        Mul(a, b) => scalar(a, z)? * scalar(b, z)?,
        Div(a, b) => {
            let num = scalar(a, z)?;
            num / guard_den(scalar(b, z)?)?
        }
        Pow(a, k) => scalar(a, z)?.powu(*k),
        Mob(p, a) => {
            let x = scalar(a, z)?;
            (x - p) / guard_den(ONE - p.conj() * x)?
        }
        Exp(a) => finite(scalar(a, z)?.exp())?,
        Log(a) => guard_log(scalar(a, z)?)?.ln(),
        Scale(c, a) => c * scalar(a, z)?,
    })
}

/// Evaluates a variable-free expression.
pub(crate) fn eval_constant(e: &MapExpr) -> Result<Complex64, EvalError> {
    scalar(e, &[]).and_then(finite)
}

/// Value of `e` at `z`.
pub fn eval_scalar(e: &MapExpr, z: &PolydiscPoint) -> Result<Complex64, EvalError> {
    scalar(e, z.coords()).and_then(finite)
}

/// Value and the `n` holomorphic partial derivatives of a scalar function.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub partials: Vec<Complex64>,
}

impl Jet {
    pub fn constant(value: Complex64, dim: usize) -> Self {
        Self {
            value,
            partials: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn variable(value: Complex64, index: usize, dim: usize) -> Self {
        let mut j = Self::constant(value, dim);
        j.partials[index] = ONE;
        j
    }

    pub fn dim(&self) -> usize {
        self.partials.len()
    }

    /// Applies `g` with value `g(value)` and derivative `dg`: chain rule.
    fn chain(self, value: Complex64, dg: Complex64) -> Self {
        Self {
            value,
            partials: self.partials.into_iter().map(|p| dg * p).collect(),
        }
    }

    fn zip(self, other: Jet, value: Complex64, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            value,
            partials: self.partials.into_iter().zip(other.partials).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

fn jet(e: &MapExpr, z: &[Complex64]) -> Result<Jet, EvalError> {
    use MapExpr::*;
    let n = z.len();
    Ok(match e {
        Const(c) => Jet::constant(*c, n),
        Var(j) => {
            let v = *z.get(*j).ok_or(EvalError::DimensionMismatch { index: j + 1, dim: n })?;
            Jet::variable(v, *j, n)
        }
        Neg(a) => {
            let a = jet(a, z)?;
            let v = -a.value;
            a.chain(v, -ONE)
        }
        Add(a, b) => {
            let (a, b) = (jet(a, z)?, jet(b, z)?);
            let v = a.value + b.value;
            a.zip(b, v, |x, y| x + y)
        }
        Sub(a, b) => {
            let (a, b) = (jet(a, z)?, jet(b, z)?);
            let v = a.value - b.value;
            a.zip(b, v, |x, y| x - y)
        }
        Mul(a, b) => {
            let (a, b) = (jet(a, z)?, jet(b, z)?);
            let (u, w) = (a.value, b.value);
            a.zip(b, u * w, |du, dw| du * w + u * dw)
        }
        Div(a, b) => {
            let (a, b) = (jet(a, z)?, jet(b, z)?);
            let (u, w) = (a.value, guard_den(b.value)?);
            let w2 = w * w;
            a.zip(b, u / w, |du, dw| (du * w - u * dw) / w2)
        }
        Pow(a, k) => {
            let a = jet(a, z)?;
            let x = a.value;
            if *k == 0 {
                Jet::constant(ONE, n)
            } else {
                let lower = x.powu(k - 1);
                a.chain(x.powu(*k), lower * (*k as f64))
            }
        }
        Mob(p, a) => {
            let a = jet(a, z)?;
            let den = guard_den(ONE - p.conj() * a.value)?;
            let v = (a.value - p) / den;
            let d = (1.0 - p.norm_sqr()) / (den * den);
            a.chain(v, d)
        }
        Exp(a) => {
            let a = jet(a, z)?;
            let v = finite(a.value.exp())?;
            a.chain(v, v)
        }
        Log(a) => {
            let a = jet(a, z)?;
            let x = guard_log(a.value)?;
            a.chain(x.ln(), x.inv())
        }
        Scale(c, a) => {
            let a = jet(a, z)?;
            let v = c * a.value;
            a.chain(v, *c)
        }
    })
}

/// Forward-mode value and gradient of `e` at `z`.
pub fn eval_jet(e: &MapExpr, z: &PolydiscPoint) -> Result<Jet, EvalError> {
    let j = jet(e, z.coords())?;
    finite(j.value)?;
    for p in &j.partials {
        finite(*p)?;
    }
    Ok(j)
}

/// Raw component values of `m` at `z`, which may lie outside the polydisc.
pub fn eval_components(m: &SymbolMap, z: &PolydiscPoint) -> Result<Vec<Complex64>, EvalError> {
    if z.dim() != m.dim() {
        return Err(EvalError::DimensionMismatch {
            index: m.dim(),
            dim: z.dim(),
        });
    }
    m.components().iter().map(|e| eval_scalar(e, z)).collect()
}

/// `m(z)`, required to land strictly inside `U^n`.
pub fn eval_map(m: &SymbolMap, z: &PolydiscPoint) -> Result<PolydiscPoint, EvalError> {
    let values = eval_components(m, z)?;
    for (component, v) in values.iter().enumerate() {
        let modulus = v.norm();
        if modulus >= 1.0 - INTERIOR_MARGIN {
            return Err(EvalError::Escape { component, modulus });
        }
    }
    Ok(PolydiscPoint::new(values).expect("components checked above"))
}
