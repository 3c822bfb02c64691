//! Numeric evaluation against a variable assignment.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::{Expr, Func, JetVar, Var};
use crate::error::{Error, Result};

/// Values for the free variables of an expression.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    base: HashMap<usize, f64>,
    jets: HashMap<JetVar, f64>,
    params: HashMap<String, f64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn base(mut self, axis: usize, v: f64) -> Self {
        self.set_base(axis, v);
        self
    }

    pub fn jet(mut self, jv: JetVar, v: f64) -> Self {
        self.set_jet(jv, v);
        self
    }

    pub fn param(mut self, name: impl Into<String>, v: f64) -> Self {
        self.set_param(name, v);
        self
    }

    pub fn set_base(&mut self, axis: usize, v: f64) {
        self.base.insert(axis, v);
    }

    pub fn set_jet(&mut self, jv: JetVar, v: f64) {
        self.jets.insert(jv, v);
    }

    pub fn set_param(&mut self, name: impl Into<String>, v: f64) {
        self.params.insert(name.into(), v);
    }

    pub fn set_var(&mut self, var: Var, v: f64) {
        match var {
            Var::Base(i) => self.set_base(i, v),
            Var::Jet(jv) => self.set_jet(jv, v),
            Var::Param(p) => self.set_param(p, v),
        }
    }

    pub fn get(&self, var: &Var) -> Option<f64> {
        match var {
            Var::Base(i) => self.base.get(i).copied(),
            Var::Jet(jv) => self.jets.get(jv).copied(),
            Var::Param(p) => self.params.get(p).copied(),
        }
    }

    pub fn params_map(&self) -> &HashMap<String, f64> {
        &self.params
    }
}

/// Evaluate to an IEEE double. Exact rational subterms were already folded
/// during canonicalization; conversion to float happens at the leaves.
pub fn evaluate(e: &Expr, a: &Assignment) -> Result<f64> {
    match e {
        Expr::Const(c) => c
            .to_f64()
            .ok_or_else(|| Error::Domain("rational constant out of f64 range".into())),
        Expr::Param(p) => a
            .params
            .get(p)
            .copied()
            .ok_or_else(|| Error::UnboundVariable(p.clone())),
        Expr::Base(i) => a
            .base
            .get(i)
            .copied()
            .ok_or_else(|| Error::UnboundVariable(format!("x{}", i + 1))),
        Expr::Jet(jv) => a
            .jets
            .get(jv)
            .copied()
            .ok_or_else(|| Error::UnboundVariable(format!("{}", Expr::Jet(jv.clone())))),
        Expr::Neg(x) => Ok(-evaluate(x, a)?),
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += evaluate(t, a)?;
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= evaluate(f, a)?;
            }
            Ok(acc)
        }
        Expr::Pow(b, n) => {
            let vb = evaluate(b, a)?;
            if vb == 0.0 && *n < 0 {
                return Err(Error::Domain("zero raised to a negative power".into()));
            }
            Ok(vb.powi(*n))
        }
        Expr::Apply(f, x) => {
            let vx = evaluate(x, a)?;
            match f {
                Func::Sin => Ok(vx.sin()),
                Func::Cos => Ok(vx.cos()),
                Func::Exp => Ok(vx.exp()),
                Func::Log => {
                    if vx <= 0.0 {
                        Err(Error::Domain(format!("log of non-positive argument {vx}")))
                    } else {
                        Ok(vx.ln())
                    }
                }
                Func::Sqrt => {
                    if vx < 0.0 {
                        Err(Error::Domain(format!("sqrt of negative argument {vx}")))
                    } else {
                        Ok(vx.sqrt())
                    }
                }
            }
        }
    }
}
