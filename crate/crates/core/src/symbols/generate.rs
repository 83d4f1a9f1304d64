//! Random expression generator for randomized checks.
//!
//! Every generated expression has modulus strictly below 1 on `U^n`, so it
//! can be nested inside `mob`, used as a self-map component, and evaluated
//! anywhere in the polydisc without hitting a pole or a branch point.

use num_complex::Complex64;
use rand::Rng;

use super::{MapExpr, SymbolMap};

fn small_const<R: Rng>(rng: &mut R, max: f64) -> Complex64 {
    let r = max * rng.random::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.random::<f64>();
    let c = Complex64::from_polar(r, t);
    // rounded literals keep printed expressions readable
    Complex64::new((c.re * 1e3).round() / 1e3, (c.im * 1e3).round() / 1e3)
}

/// Random expression over `z1..z{dim}` with nesting depth at most `depth`.
pub fn random_expr<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> MapExpr {
    use MapExpr::*;
    let leaf = depth == 0 || rng.random::<f64>() < 0.2;
    if leaf {
        return if rng.random::<f64>() < 0.8 {
            Var(rng.random_range(0..dim))
        } else {
            Const(small_const(rng, 0.5))
        };
    }
    let sub = |rng: &mut R| Box::new(random_expr(rng, dim, depth - 1));
    let half = Complex64::new(0.5, 0.0);
    match rng.random_range(0..10) {
        0 => Mul(sub(rng), sub(rng)),
        1 => Scale(half, Box::new(Add(sub(rng), sub(rng)))),
        2 => Scale(half, Box::new(Sub(sub(rng), sub(rng)))),
        3 => Neg(sub(rng)),
        4 => Pow(sub(rng), rng.random_range(1..=3)),
        5 => Mob(small_const(rng, 0.7), sub(rng)),
        6 => Scale(small_const(rng, 0.9), sub(rng)),
        7 => Scale(Complex64::new(0.3, 0.0), Box::new(Exp(sub(rng)))),
        8 => Log(Box::new(Add(
            Box::new(MapExpr::constant(1.0, 0.0)),
            Box::new(Scale(half, sub(rng))),
        ))),
        _ => Div(
            sub(rng),
            Box::new(Add(Box::new(MapExpr::constant(3.0, 0.0)), sub(rng))),
        ),
    }
}

/// Random holomorphic self-map of `U^n`.
pub fn random_self_map<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> SymbolMap {
    let components = (0..dim).map(|_| random_expr(rng, dim, depth)).collect();
    SymbolMap::new(dim, components).expect("generated components use in-range variables")
}
