//! Holomorphic maps written as component expressions in `z1..zn`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! map     := expr (';' expr)*
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | atom
//! atom    := number | number 'i' | 'i' | 'z' digits
//!          | 'pow' '(' expr ',' integer ')'
//!          | 'mob' '(' constant ',' expr ')'
//!          | 'scale' '(' constant ',' expr ')'
//!          | 'exp' '(' expr ')' | 'log' '(' expr ')'
//!          | 'cplx' '(' signed-number ',' signed-number ')'
//!          | '(' expr ')'
//! constant := expr without variables, folded to a complex literal
//! ```
//!
//! `mob(a, e) = (e − a)/(1 − conj(a)·e)` with `|a| < 1`; `log` is the
//! principal branch. Every node kind is holomorphic in the variables, so
//! [`eval_jet`] produces true complex partial derivatives.

mod eval;
pub mod generate;
mod parse;
mod validate;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use eval::{eval_components, eval_jet, eval_map, eval_scalar, EvalError, Jet, POLE_GUARD};
pub use parse::{parse_expr, parse_map, ParseError};
pub use validate::{validate_self_map, ValidationReport, SELF_MAP_THRESHOLD};

/// Expression tree of one scalar component. Variables are zero based.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    Const(Complex64),
    Var(usize),
    Neg(Box<MapExpr>),
    Add(Box<MapExpr>, Box<MapExpr>),
    Sub(Box<MapExpr>, Box<MapExpr>),
    Mul(Box<MapExpr>, Box<MapExpr>),
    Div(Box<MapExpr>, Box<MapExpr>),
    Pow(Box<MapExpr>, u32),
    Mob(Complex64, Box<MapExpr>),
    Exp(Box<MapExpr>),
    Log(Box<MapExpr>),
    Scale(Complex64, Box<MapExpr>),
}

impl MapExpr {
    pub fn constant(re: f64, im: f64) -> Self {
        MapExpr::Const(Complex64::new(re, im))
    }

    /// Largest variable index used plus one (0 for constants).
    pub fn arity(&self) -> usize {
        use MapExpr::*;
        match self {
            Const(_) => 0,
            Var(j) => j + 1,
            Neg(e) | Pow(e, _) | Mob(_, e) | Exp(e) | Log(e) | Scale(_, e) => e.arity(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Substitutes `inner[j]` for every occurrence of `z_{j+1}`.
    ///
    /// # Panics
    /// If a variable has no substitute.
    pub fn compose(&self, inner: &[MapExpr]) -> MapExpr {
        use MapExpr::*;
        let sub = |e: &MapExpr| Box::new(e.compose(inner));
        match self {
            Const(c) => Const(*c),
            Var(j) => inner[*j].clone(),
            Neg(e) => Neg(sub(e)),
            Add(a, b) => Add(sub(a), sub(b)),
            Sub(a, b) => Sub(sub(a), sub(b)),
            Mul(a, b) => Mul(sub(a), sub(b)),
            Div(a, b) => Div(sub(a), sub(b)),
            Pow(e, k) => Pow(sub(e), *k),
            Mob(a, e) => Mob(*a, sub(e)),
            Exp(e) => Exp(sub(e)),
            Log(e) => Log(sub(e)),
            Scale(c, e) => Scale(*c, sub(e)),
        }
    }
}

struct Literal(Complex64);

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        let plus = |x: f64| x == 0.0 && x.is_sign_positive();
        if plus(im) && re >= 0.0 && re.is_sign_positive() {
            write!(f, "{re}")
        } else if plus(re) && im > 0.0 {
            write!(f, "{im}i")
        } else {
            write!(f, "cplx({re}, {im})")
        }
    }
}

/// Prints a form that reparses to an identical tree.
impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MapExpr::*;
        match self {
            Const(c) => write!(f, "{}", Literal(*c)),
            Var(j) => write!(f, "z{}", j + 1),
            Neg(e) => write!(f, "(-{e})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(e, k) => write!(f, "pow({e}, {k})"),
            Mob(a, e) => write!(f, "mob({}, {e})", Literal(*a)),
            Exp(e) => write!(f, "exp({e})"),
            Log(e) => write!(f, "log({e})"),
            Scale(c, e) => write!(f, "scale({}, {e})", Literal(*c)),
        }
    }
}

/// A map `U^n → C^n` given by `n` component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMap {
    dim: usize,
    components: Vec<MapExpr>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component {component} uses z{index}, beyond dimension {dim}")]
    VariableOutOfRange { component: usize, index: usize, dim: usize },
}

impl SymbolMap {
    pub fn new(dim: usize, components: Vec<MapExpr>) -> Result<Self, MapError> {
        if dim == 0 || components.len() != dim {
            return Err(MapError::DimensionMismatch {
                expected: dim,
                found: components.len(),
            });
        }
        for (component, e) in components.iter().enumerate() {
            if e.arity() > dim {
                return Err(MapError::VariableOutOfRange {
                    component,
                    index: e.arity(),
                    dim,
                });
            }
        }
        Ok(Self { dim, components })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(MapExpr::Var).collect()).expect("identity is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[MapExpr] {
        &self.components
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SymbolMap) -> SymbolMap {
        assert_eq!(self.dim, inner.dim, "dimension mismatch");
        SymbolMap {
            dim: self.dim,
            components: self.components.iter().map(|e| e.compose(&inner.components)).collect(),
        }
    }
}

impl fmt::Display for SymbolMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literal_forms() {
        assert_eq!(MapExpr::constant(0.5, 0.0).to_string(), "0.5");
        assert_eq!(MapExpr::constant(0.0, 0.25).to_string(), "0.25i");
        assert_eq!(MapExpr::constant(-0.5, 0.0).to_string(), "cplx(-0.5, 0)");
        assert_eq!(MapExpr::constant(0.3, -0.4).to_string(), "cplx(0.3, -0.4)");
        assert_eq!(MapExpr::constant(-0.0, 0.0).to_string(), "cplx(-0, 0)");
    }

    #[test]
    fn compose_substitutes_variables() {
        let outer = parse_expr("z1 * z2", 2).unwrap();
        let inner = parse_map("mob(0.5, z1); pow(z2, 2)", 2).unwrap();
        let composed = outer.compose(inner.components());
        assert_eq!(composed, parse_expr("mob(0.5, z1) * pow(z2, 2)", 2).unwrap());
    }

    #[test]
    fn map_constructor_checks_arity() {
        assert!(SymbolMap::new(2, vec![MapExpr::Var(0)]).is_err());
        assert!(SymbolMap::new(1, vec![MapExpr::Var(1)]).is_err());
        assert_eq!(SymbolMap::identity(2).to_string(), "z1; z2");
    }

    proptest! {
        #[test]
        fn printed_form_reparses_identically(seed in any::<u64>(), dim in 1usize..4, depth in 0usize..5) {
            let mut rng = crate::sampling::trial_rng(seed, 0);
            let e = generate::random_expr(&mut rng, dim, depth);
            let printed = e.to_string();
            let back = parse_expr(&printed, dim).unwrap();
            prop_assert_eq!(&back, &e, "{}", printed);
        }
    }
}
