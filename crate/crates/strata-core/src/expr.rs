//! Coordinate expressions for morphisms between basic models.
//!
//! A morphism `U x c(L) -> U' x c(L')` is written through three coordinate
//! maps `(a1, a2, a3)` over the variables `u` (base vector), `l` (link
//! sample) and the radial scalar (`r` on cones, `t` on unbent models). The
//! node set is a fixed whitelist of smooth primitives; `abs` and `sgn` are
//! the piecewise-smooth markers, `sgn` being the odd-extension operator that
//! lifting introduces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::group::LinkIso;
use crate::samples::LinkSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Const(f64),
    /// Base coordinate `u[i]`.
    U(usize),
    /// The radial scalar, `r` or `t` depending on the model.
    T,
    /// The link sample variable.
    L,
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    /// Sign of a scalar, zero at zero.
    Sgn(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// A named link action (cocycle element or constant link morphism)
    /// applied to a link-valued expression.
    Apply(String, Box<Expr>),
}

/// Value of an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Link(LinkSample),
}

/// Expression result kind, inferred structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Link,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("link action {0} is undefined")]
    LinkActionUndefined(String),
    #[error("link action {0} does not cover sample {1:?}")]
    LinkActionPartial(String, LinkSample),
    #[error("expression mixes link and real values at {0}")]
    KindMismatch(String),
    #[error("base coordinate u[{0}] does not exist")]
    UnknownCoordinate(usize),
}

/// Evaluation context: one sample point plus the named actions in scope.
#[derive(Debug, Clone)]
pub struct EvalCtx<'a> {
    pub u: &'a [f64],
    pub l: LinkSample,
    pub t: f64,
    pub actions: &'a BTreeMap<String, LinkIso>,
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::Abs(Box::new(a))
    }

    pub fn sgn(a: Expr) -> Expr {
        Expr::Sgn(Box::new(a))
    }

    pub fn apply(name: &str, inner: Expr) -> Expr {
        Expr::Apply(name.to_string(), Box::new(inner))
    }

    /// The identity tuple on a `dim`-dimensional base.
    pub fn identity_base(dim: u32) -> Vec<Expr> {
        (0..dim as usize).map(Expr::U).collect()
    }

    /// Structural result kind; fails when links and reals are mixed.
    pub fn kind(&self) -> Result<Kind, ExprError> {
        match self {
            Expr::Const(_) | Expr::U(_) | Expr::T => Ok(Kind::Real),
            Expr::L => Ok(Kind::Link),
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                if a.kind()? == Kind::Real && b.kind()? == Kind::Real {
                    Ok(Kind::Real)
                } else {
                    Err(ExprError::KindMismatch(format!("{self:?}")))
                }
            }
            Expr::Neg(a) | Expr::Abs(a) | Expr::Sgn(a) | Expr::Exp(a) | Expr::Sin(a)
            | Expr::Cos(a) => {
                if a.kind()? == Kind::Real {
                    Ok(Kind::Real)
                } else {
                    Err(ExprError::KindMismatch(format!("{self:?}")))
                }
            }
            Expr::Apply(name, inner) => {
                if inner.kind()? == Kind::Link {
                    Ok(Kind::Link)
                } else {
                    Err(ExprError::KindMismatch(name.clone()))
                }
            }
        }
    }

    /// True when no piecewise-smooth marker occurs in the tree.
    pub fn is_smooth(&self) -> bool {
        match self {
            Expr::Abs(_) | Expr::Sgn(_) => false,
            Expr::Const(_) | Expr::U(_) | Expr::T | Expr::L => true,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.is_smooth() && b.is_smooth(),
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => a.is_smooth(),
            Expr::Apply(_, inner) => inner.is_smooth(),
        }
    }

    pub fn eval(&self, ctx: &EvalCtx) -> Result<Value, ExprError> {
        match self {
            Expr::Const(c) => Ok(Value::Real(*c)),
            Expr::U(i) => ctx
                .u
                .get(*i)
                .map(|x| Value::Real(*x))
                .ok_or(ExprError::UnknownCoordinate(*i)),
            Expr::T => Ok(Value::Real(ctx.t)),
            Expr::L => Ok(Value::Link(ctx.l.clone())),
            Expr::Add(a, b) => Ok(Value::Real(a.eval_real(ctx)? + b.eval_real(ctx)?)),
            Expr::Mul(a, b) => Ok(Value::Real(a.eval_real(ctx)? * b.eval_real(ctx)?)),
            Expr::Neg(a) => Ok(Value::Real(-a.eval_real(ctx)?)),
            Expr::Abs(a) => Ok(Value::Real(a.eval_real(ctx)?.abs())),
            Expr::Sgn(a) => {
                let v = a.eval_real(ctx)?;
                Ok(Value::Real(if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }))
            }
            Expr::Exp(a) => Ok(Value::Real(a.eval_real(ctx)?.exp())),
            Expr::Sin(a) => Ok(Value::Real(a.eval_real(ctx)?.sin())),
            Expr::Cos(a) => Ok(Value::Real(a.eval_real(ctx)?.cos())),
            Expr::Apply(name, inner) => {
                let sample = inner.eval_link(ctx)?;
                let action = ctx
                    .actions
                    .get(name)
                    .ok_or_else(|| ExprError::LinkActionUndefined(name.clone()))?;
                action
                    .apply(&sample)
                    .map(Value::Link)
                    .ok_or_else(|| ExprError::LinkActionPartial(name.clone(), sample))
            }
        }
    }

    pub fn eval_real(&self, ctx: &EvalCtx) -> Result<f64, ExprError> {
        match self.eval(ctx)? {
            Value::Real(x) => Ok(x),
            Value::Link(_) => Err(ExprError::KindMismatch(format!("{self:?}"))),
        }
    }

    pub fn eval_link(&self, ctx: &EvalCtx) -> Result<LinkSample, ExprError> {
        match self.eval(ctx)? {
            Value::Link(l) => Ok(l),
            Value::Real(_) => Err(ExprError::KindMismatch(format!("{self:?}"))),
        }
    }

    /// Substitutes the variables by the coordinate maps of another morphism:
    /// `u[i] -> a1[i]`, `l -> a2`, `t -> a3`. This is symbolic composition.
    pub fn subst(&self, a1: &[Expr], a2: &Expr, a3: &Expr) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::U(i) => a1
                .get(*i)
                .cloned()
                .ok_or(ExprError::UnknownCoordinate(*i))?,
            Expr::T => a3.clone(),
            Expr::L => a2.clone(),
            Expr::Add(a, b) => Expr::add(a.subst(a1, a2, a3)?, b.subst(a1, a2, a3)?),
            Expr::Mul(a, b) => Expr::mul(a.subst(a1, a2, a3)?, b.subst(a1, a2, a3)?),
            Expr::Neg(a) => Expr::neg(a.subst(a1, a2, a3)?),
            Expr::Abs(a) => Expr::abs(a.subst(a1, a2, a3)?),
            Expr::Sgn(a) => Expr::sgn(a.subst(a1, a2, a3)?),
            Expr::Exp(a) => Expr::Exp(Box::new(a.subst(a1, a2, a3)?)),
            Expr::Sin(a) => Expr::Sin(Box::new(a.subst(a1, a2, a3)?)),
            Expr::Cos(a) => Expr::Cos(Box::new(a.subst(a1, a2, a3)?)),
            Expr::Apply(name, inner) => {
                Expr::Apply(name.clone(), Box::new(inner.subst(a1, a2, a3)?))
            }
        })
    }

    /// Renames the `Apply` action names through the given map.
    pub fn rename_actions(&self, renames: &BTreeMap<String, String>) -> Expr {
        match self {
            Expr::Apply(name, inner) => Expr::Apply(
                renames.get(name).cloned().unwrap_or_else(|| name.clone()),
                Box::new(inner.rename_actions(renames)),
            ),
            Expr::Add(a, b) => Expr::add(a.rename_actions(renames), b.rename_actions(renames)),
            Expr::Mul(a, b) => Expr::mul(a.rename_actions(renames), b.rename_actions(renames)),
            Expr::Neg(a) => Expr::neg(a.rename_actions(renames)),
            Expr::Abs(a) => Expr::abs(a.rename_actions(renames)),
            Expr::Sgn(a) => Expr::sgn(a.rename_actions(renames)),
            Expr::Exp(a) => Expr::Exp(Box::new(a.rename_actions(renames))),
            Expr::Sin(a) => Expr::Sin(Box::new(a.rename_actions(renames))),
            Expr::Cos(a) => Expr::Cos(Box::new(a.rename_actions(renames))),
            other => other.clone(),
        }
    }
}
