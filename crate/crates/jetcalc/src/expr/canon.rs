//! Canonical form: sums and products flattened, constants folded exactly,
//! like terms and like factors merged, everything ordered by the fixed
//! total order on nodes. Canonicalization is idempotent.
//!
//! Deliberately short of full computer-algebra simplification: products are
//! not distributed over sums here (see [`expand`] for the places that need
//! a u-linear normal form).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::Expr;

impl Expr {
    /// Rewrite into canonical form.
    pub fn canon(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) | Expr::Base(_) | Expr::Jet(_) => self.clone(),
            Expr::Apply(f, a) => Expr::Apply(*f, Box::new(a.canon())),
            Expr::Neg(a) => {
                Expr::Product(vec![Expr::int(-1), a.as_ref().clone()]).canon()
            }
            Expr::Pow(b, e) => canon_pow(b.canon(), *e),
            Expr::Product(fs) => canon_product(fs.iter().map(|f| f.canon()).collect()),
            Expr::Sum(ts) => canon_sum(ts.iter().map(|t| t.canon()).collect()),
        }
    }

    /// Split a canonical term into (rational coefficient, non-constant core).
    /// The core of a pure constant is 1.
    pub(crate) fn coeff_core(&self) -> (BigRational, Expr) {
        match self {
            Expr::Const(c) => (c.clone(), Expr::one()),
            Expr::Product(fs) => {
                if let Some(Expr::Const(c)) = fs.first() {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let core = match rest.len() {
                        0 => Expr::one(),
                        1 => rest.into_iter().next().unwrap(),
                        _ => Expr::Product(rest),
                    };
                    (c.clone(), core)
                } else {
                    (BigRational::one(), self.clone())
                }
            }
            _ => (BigRational::one(), self.clone()),
        }
    }
}

fn canon_pow(base: Expr, exp: i32) -> Expr {
    if exp == 0 {
        return Expr::one();
    }
    if exp == 1 {
        return base;
    }
    match base {
        Expr::Const(c) => {
            if c.is_zero() && exp < 0 {
                // 0^negative stays symbolic; evaluation reports the domain error
                Expr::Pow(Box::new(Expr::Const(c)), exp)
            } else {
                Expr::Const(c.pow(exp))
            }
        }
        Expr::Pow(inner, e2) => canon_pow(*inner, exp.saturating_mul(e2)),
        Expr::Product(fs) => {
            canon_product(fs.into_iter().map(|f| canon_pow(f, exp)).collect())
        }
        other => Expr::Pow(Box::new(other), exp),
    }
}

/// Inputs must already be canonical.
fn canon_product(factors: Vec<Expr>) -> Expr {
    let mut coeff = BigRational::one();
    let mut bases: BTreeMap<Expr, i64> = BTreeMap::new();

    let mut stack: Vec<Expr> = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f {
            Expr::Product(fs) => {
                for inner in fs.into_iter().rev() {
                    stack.push(inner);
                }
            }
            Expr::Const(c) => coeff *= c,
            Expr::Pow(b, e) => *bases.entry(*b).or_insert(0) += e as i64,
            other => *bases.entry(other).or_insert(0) += 1,
        }
    }

    if coeff.is_zero() {
        return Expr::zero();
    }

    let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
    for (b, e) in bases {
        if e == 0 {
            continue;
        }
        let e32 = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        out.push(canon_pow(b, e32));
    }
    // merged exponents can re-fold into constants (e.g. sqrt-free squares)
    if out.iter().any(|f| matches!(f, Expr::Const(_) | Expr::Product(_))) {
        return canon_product(
            std::iter::once(Expr::Const(coeff)).chain(out).collect(),
        );
    }

    // distribute a bare constant over a lone sum so that subtraction
    // cancels term by term: c * (a + b) -> c*a + c*b
    if !coeff.is_one() && out.len() == 1 {
        if let Expr::Sum(ts) = &out[0] {
            let scaled = ts
                .iter()
                .map(|t| canon_product(vec![Expr::Const(coeff.clone()), t.clone()]))
                .collect();
            return canon_sum(scaled);
        }
    }

    match (coeff.is_one(), out.len()) {
        (_, 0) => Expr::Const(coeff),
        (true, 1) => out.into_iter().next().unwrap(),
        (true, _) => Expr::Product(out),
        (false, _) => {
            let mut fs = Vec::with_capacity(out.len() + 1);
            fs.push(Expr::Const(coeff));
            fs.extend(out);
            Expr::Product(fs)
        }
    }
}

/// Inputs must already be canonical.
fn canon_sum(terms: Vec<Expr>) -> Expr {
    let mut by_core: BTreeMap<Expr, BigRational> = BTreeMap::new();

    let mut stack: Vec<Expr> = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        match t {
            Expr::Sum(ts) => {
                for inner in ts.into_iter().rev() {
                    stack.push(inner);
                }
            }
            other => {
                let (c, core) = other.coeff_core();
                let entry = by_core.entry(core).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
    }

    let mut out: Vec<Expr> = Vec::with_capacity(by_core.len());
    for (core, c) in by_core {
        if c.is_zero() {
            continue;
        }
        if core.is_one() {
            out.push(Expr::Const(c));
        } else if c.is_one() {
            out.push(core);
        } else {
            // Const sorts first, so this is already in canonical factor order
            out.push(match core {
                Expr::Product(fs) => {
                    let mut all = Vec::with_capacity(fs.len() + 1);
                    all.push(Expr::Const(c));
                    all.extend(fs);
                    Expr::Product(all)
                }
                other => Expr::Product(vec![Expr::Const(c), other]),
            });
        }
    }

    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::Sum(out),
    }
}

/// Fully distribute products over sums and expand small positive powers of
/// sums, then canonicalize. Used to read off u-linear coefficient forms;
/// not part of `canon` because expansion can blow up expression size.
pub fn expand(e: &Expr) -> Expr {
    expand_inner(&e.canon()).canon()
}

fn expand_inner(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Param(_) | Expr::Base(_) | Expr::Jet(_) => e.clone(),
        Expr::Apply(f, a) => Expr::Apply(*f, Box::new(expand_inner(a))),
        Expr::Neg(a) => Expr::Neg(Box::new(expand_inner(a))),
        // re-canon: expanding a term can leave a nested sum to flatten
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(expand_inner).collect()).canon(),
        Expr::Pow(b, e2) => {
            let base = expand_inner(b);
            if let Expr::Sum(_) = base {
                if (2..=8).contains(e2) {
                    let mut acc = base.clone();
                    for _ in 1..*e2 {
                        acc = distribute(&acc, &base);
                    }
                    return acc;
                }
            }
            Expr::Pow(Box::new(base), *e2)
        }
        Expr::Product(fs) => {
            let mut acc = Expr::one();
            for f in fs {
                let ef = expand_inner(f);
                acc = distribute(&acc, &ef);
            }
            acc
        }
    }
}

fn distribute(a: &Expr, b: &Expr) -> Expr {
    let terms_of = |e: &Expr| -> Vec<Expr> {
        match e {
            Expr::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        }
    };
    let mut out = Vec::new();
    for ta in terms_of(a) {
        for tb in terms_of(b) {
            out.push(Expr::Product(vec![ta.clone(), tb.clone()]).canon());
        }
    }
    Expr::Sum(out).canon()
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::expand;

    #[test]
    fn canon_folds_constants() {
        let e = Expr::int(2) * Expr::int(3) + Expr::int(1);
        assert_eq!(e.canon(), Expr::int(7));
    }

    #[test]
    fn canon_merges_like_terms() {
        // 3x + 2x -> 5x
        let x = Expr::base(0);
        let e = Expr::int(3) * x.clone() + Expr::int(2) * x.clone();
        assert_eq!(e.canon(), (Expr::int(5) * x).canon());
    }

    #[test]
    fn canon_cancels_to_zero() {
        let x = Expr::base(0);
        let u = Expr::jet(0, vec![1]);
        let e = x.clone() * u.clone() - u * x;
        assert_eq!(e.canon(), Expr::zero());
    }

    #[test]
    fn canon_merges_factors_into_powers() {
        let x = Expr::base(0);
        let e = (x.clone() * x.clone()).canon();
        assert_eq!(e, Expr::base(0).pow(2));
        let inv = (Expr::base(0) * Expr::base(0).pow(-1)).canon();
        assert_eq!(inv, Expr::one());
    }

    #[test]
    fn canon_is_idempotent() {
        let e = (Expr::base(0) + Expr::int(1)).pow(2) * Expr::jet(0, vec![2])
            + Expr::apply(super::super::Func::Sin, Expr::base(0)) * Expr::rational(-1, 2);
        let c1 = e.canon();
        assert_eq!(c1.canon(), c1);
    }

    #[test]
    fn neg_becomes_minus_one_product() {
        let e = (-Expr::base(0)).canon();
        assert_eq!(e, Expr::Product(vec![Expr::int(-1), Expr::base(0)]));
    }

    #[test]
    fn expand_binomial() {
        // (x + u)^2 -> x^2 + 2xu + u^2
        let x = Expr::base(0);
        let u = Expr::jet(0, vec![0]);
        let lhs = expand(&(x.clone() + u.clone()).pow(2));
        let rhs = (x.clone().pow(2) + Expr::int(2) * x * u.clone() + u.pow(2)).canon();
        assert_eq!(lhs, rhs);
    }
}
