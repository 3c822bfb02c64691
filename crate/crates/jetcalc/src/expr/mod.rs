//! Symbolic expression core.
//!
//! Expressions are immutable trees over base coordinates `x1..xn`, jet
//! coordinates `u^k_I` (fiber index `k`, multi-index `I`), and named
//! parameters. Equality of expressions is decided by canonical form plus
//! randomized numeric evaluation ([`equiv::equivalent`]): general symbolic
//! zero-testing with transcendental functions is undecidable, so every law
//! check in the engine bottoms out in this test.
//!
//! Constants are exact rationals; floats enter only through evaluation or
//! user input (and user decimals are converted exactly).

mod canon;
mod diff;
mod eval;
pub mod equiv;
mod parse;
mod print;

pub use canon::expand;
pub use diff::differentiate;
pub use eval::{evaluate, Assignment};
pub use equiv::{equivalent, EquivOptions};
pub use parse::{parse_expr, parse_expr_infer};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector of a jet coordinate, dense over the base axes.
///
/// Ordered graded-lexicographically: first by total order, then
/// lexicographically on the exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index e_i.
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] += 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order |I| = sum of exponents.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Componentwise sum I + J.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// I + e_axis.
    pub fn bump(&self, axis: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[axis] += 1;
        MultiIndex(e)
    }

    /// All multi-indices of dimension `n` with order ≤ `max_order`,
    /// in graded-lexicographic order.
    pub fn all_up_to(n: usize, max_order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for ord in 0..=max_order {
            let mut acc = vec![0u32; n];
            gen_of_order(&mut acc, 0, ord, &mut out);
        }
        out
    }
}

fn gen_of_order(acc: &mut Vec<u32>, axis: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if axis + 1 == acc.len() {
        acc[axis] = remaining as u32;
        out.push(MultiIndex(acc.clone()));
        acc[axis] = 0;
        return;
    }
    for e in 0..=remaining {
        acc[axis] = e as u32;
        gen_of_order(acc, axis + 1, remaining - e, out);
        acc[axis] = 0;
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A jet coordinate u^k_I.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub fiber: usize,
    pub index: MultiIndex,
}

impl JetVar {
    pub fn new(fiber: usize, index: MultiIndex) -> Self {
        JetVar { fiber, index }
    }
}

/// The closed set of elementary functions.
///
/// Extending it requires a derivative-table entry in [`differentiate`],
/// which keeps differentiation total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

/// A variable designator: a base coordinate, a jet coordinate, or a parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Base(usize),
    Jet(JetVar),
    Param(String),
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::Base(i) => write!(f, "x{}", i + 1),
            Var::Jet(jv) => write!(f, "{}", Expr::Jet(jv.clone())),
            Var::Param(p) => write!(f, "{p}"),
        }
    }
}

/// Symbolic expression AST.
///
/// The variant declaration order doubles as the fixed total order used to
/// sort canonical sums and products, so structural equality is meaningful
/// after [`Expr::canon`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(BigRational),
    Param(String),
    Base(usize),
    Jet(JetVar),
    Apply(Func, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Const(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of an IEEE double (every finite f64 is rational).
    pub fn from_f64(v: f64) -> Result<Expr> {
        BigRational::from_float(v)
            .map(Expr::Const)
            .ok_or_else(|| Error::Domain(format!("non-finite constant {v}")))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn base(i: usize) -> Expr {
        Expr::Base(i)
    }

    pub fn jet(fiber: usize, exponents: Vec<u32>) -> Expr {
        Expr::Jet(JetVar::new(fiber, MultiIndex::new(exponents)))
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        Expr::Apply(f, Box::new(arg))
    }

    pub fn pow(self, exp: i32) -> Expr {
        Expr::Pow(Box::new(self), exp)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Free variables (base, jet and parameter) of the expression.
    pub fn free_vars(&self) -> std::collections::BTreeSet<Var> {
        let mut set = std::collections::BTreeSet::new();
        self.collect_vars(&mut set);
        set
    }

    fn collect_vars(&self, set: &mut std::collections::BTreeSet<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Param(p) => {
                set.insert(Var::Param(p.clone()));
            }
            Expr::Base(i) => {
                set.insert(Var::Base(*i));
            }
            Expr::Jet(jv) => {
                set.insert(Var::Jet(jv.clone()));
            }
            Expr::Apply(_, a) | Expr::Pow(a, _) | Expr::Neg(a) => a.collect_vars(set),
            Expr::Product(es) | Expr::Sum(es) => {
                for e in es {
                    e.collect_vars(set);
                }
            }
        }
    }

    /// Jet variables occurring in the expression.
    pub fn jet_vars(&self) -> Vec<JetVar> {
        self.free_vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Jet(jv) => Some(jv),
                _ => None,
            })
            .collect()
    }

    pub fn contains_jet(&self) -> bool {
        self.free_vars().iter().any(|v| matches!(v, Var::Jet(_)))
    }

    /// Max jet order occurring, or None if no jet variable occurs.
    pub fn max_jet_order(&self) -> Option<usize> {
        self.jet_vars().iter().map(|jv| jv.index.order()).max()
    }

    /// Max base-axis index occurring (over base vars and jet multi-index
    /// dimensions), as a lower bound on the base dimension n.
    pub fn min_base_dim(&self) -> usize {
        self.free_vars()
            .iter()
            .map(|v| match v {
                Var::Base(i) => i + 1,
                Var::Jet(jv) => jv.index.dim(),
                Var::Param(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Max fiber index + 1 occurring, as a lower bound on the fiber rank m.
    pub fn min_fiber_rank(&self) -> usize {
        self.free_vars()
            .iter()
            .map(|v| match v {
                Var::Jet(jv) => jv.fiber + 1,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Substitute every jet variable by `f(jv)`; variables not covered
    /// raise an unbound-variable error.
    pub fn substitute_jets(&self, f: &impl Fn(&JetVar) -> Option<Expr>) -> Result<Expr> {
        let out = self.try_map(&|e| match e {
            Expr::Jet(jv) => match f(jv) {
                Some(r) => Ok(Some(r)),
                None => Err(Error::UnboundVariable(format!("{}", Expr::Jet(jv.clone())))),
            },
            _ => Ok(None),
        })?;
        Ok(out.canon())
    }

    /// Substitute a named parameter by an expression.
    pub fn substitute_param(&self, name: &str, value: &Expr) -> Expr {
        self.try_map(&|e| match e {
            Expr::Param(p) if p == name => Ok(Some(value.clone())),
            _ => Ok(None),
        })
        .expect("parameter substitution is total")
        .canon()
    }

    /// Bottom-up rewrite: `f` returns Some(replacement) to rewrite a node.
    fn try_map(
        &self,
        f: &impl Fn(&Expr) -> Result<Option<Expr>>,
    ) -> Result<Expr> {
        let rebuilt = match self {
            Expr::Const(_) | Expr::Param(_) | Expr::Base(_) | Expr::Jet(_) => self.clone(),
            Expr::Apply(func, a) => Expr::Apply(*func, Box::new(a.try_map(f)?)),
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.try_map(f)?), *e),
            Expr::Neg(a) => Expr::Neg(Box::new(a.try_map(f)?)),
            Expr::Product(es) => Expr::Product(
                es.iter().map(|e| e.try_map(f)).collect::<Result<Vec<_>>>()?,
            ),
            Expr::Sum(es) => {
                Expr::Sum(es.iter().map(|e| e.try_map(f)).collect::<Result<Vec<_>>>()?)
            }
        };
        Ok(match f(&rebuilt)? {
            Some(replaced) => replaced,
            None => rebuilt,
        })
    }

    /// Scale by an exact rational.
    pub fn scale(self, c: BigRational) -> Expr {
        Expr::Product(vec![Expr::Const(c), self]).canon()
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Helper for exact rational sign checks in the printer.
pub(crate) fn rational_is_negative(c: &BigRational) -> bool {
    c.is_negative()
}
