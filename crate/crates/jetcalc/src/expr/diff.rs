//! Partial differentiation with respect to a single coordinate.
//!
//! Distinct jet variables are independent coordinates here; relating
//! u^k_I to u^k_{I+e_i} is the job of total derivatives, not of this
//! function.

use super::{Expr, Func, Var};

/// ∂e/∂v in canonical form. Total on the closed function set.
pub fn differentiate(e: &Expr, v: &Var) -> Expr {
    d(e, v).canon()
}

fn d(e: &Expr, v: &Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Param(p) => match v {
            Var::Param(q) if p == q => Expr::one(),
            _ => Expr::zero(),
        },
        Expr::Base(i) => match v {
            Var::Base(j) if i == j => Expr::one(),
            _ => Expr::zero(),
        },
        Expr::Jet(jv) => match v {
            Var::Jet(w) if jv == w => Expr::one(),
            _ => Expr::zero(),
        },
        Expr::Neg(a) => Expr::Neg(Box::new(d(a, v))),
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| d(t, v)).collect()),
        Expr::Product(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, fi) in fs.iter().enumerate() {
                let dfi = d(fi, v);
                if dfi.is_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                factors.extend(fs.iter().take(i).cloned());
                factors.push(dfi);
                factors.extend(fs.iter().skip(i + 1).cloned());
                terms.push(Expr::Product(factors));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(b, n) => {
            let db = d(b, v);
            if db.is_zero() {
                return Expr::zero();
            }
            Expr::Product(vec![
                Expr::int(*n as i64),
                Expr::Pow(b.clone(), n - 1),
                db,
            ])
        }
        Expr::Apply(f, a) => {
            let da = d(a, v);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::apply(Func::Cos, a.as_ref().clone()),
                Func::Cos => Expr::Neg(Box::new(Expr::apply(Func::Sin, a.as_ref().clone()))),
                Func::Exp => Expr::apply(Func::Exp, a.as_ref().clone()),
                Func::Log => Expr::Pow(a.clone(), -1),
                Func::Sqrt => Expr::Product(vec![
                    Expr::rational(1, 2),
                    Expr::Pow(Box::new(Expr::apply(Func::Sqrt, a.as_ref().clone())), -1),
                ]),
            };
            Expr::Product(vec![outer, da])
        }
    }
}
