//! Randomized equivalence testing — the executable meaning of every "≃"
//! in the law suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{evaluate, Assignment, Expr};
use crate::error::{Error, Result};

/// Default seed for every randomized check in the engine; CLI `--seed`
/// overrides it.
pub const DEFAULT_SEED: u64 = 0x6a65_7463;

#[derive(Debug, Clone)]
pub struct EquivOptions {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    /// Sampling box per variable.
    pub lo: f64,
    pub hi: f64,
    /// Total resampling budget across all trials before giving up.
    pub max_resamples: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            trials: 16,
            tol: 1e-9,
            seed: DEFAULT_SEED,
            lo: -1.0,
            hi: 1.0,
            max_resamples: 1600,
        }
    }
}

impl EquivOptions {
    pub fn with_seed(seed: u64) -> Self {
        EquivOptions {
            seed,
            ..Default::default()
        }
    }
}

/// True iff |a−b| ≤ tol·(1+|a|+|b|) at `trials` points sampled uniformly
/// from the box, with canonical structural equality as a short-circuit.
/// Domain-error points are resampled up to the budget; exceeding it is an
/// inconclusive error, not a verdict.
pub fn equivalent(a: &Expr, b: &Expr, opts: &EquivOptions) -> Result<bool> {
    let ca = a.canon();
    let cb = b.canon();
    if ca == cb {
        return Ok(true);
    }

    let mut vars = ca.free_vars();
    vars.extend(cb.free_vars());
    let vars: Vec<_> = vars.into_iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut resamples = 0usize;

    for _ in 0..opts.trials {
        let (va, vb) = loop {
            let mut asg = Assignment::new();
            for v in &vars {
                asg.set_var(v.clone(), rng.gen_range(opts.lo..=opts.hi));
            }
            match (evaluate(&ca, &asg), evaluate(&cb, &asg)) {
                (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => break (x, y),
                (Err(Error::Domain(_)), _) | (_, Err(Error::Domain(_))) | (Ok(_), Ok(_)) => {
                    resamples += 1;
                    if resamples > opts.max_resamples {
                        return Err(Error::Inconclusive(format!(
                            "resampling budget {} exhausted while avoiding domain errors",
                            opts.max_resamples
                        )));
                    }
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        };
        if (va - vb).abs() > opts.tol * (1.0 + va.abs() + vb.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `equivalent` with default options; panics only on inconclusive sampling.
pub fn equiv_default(a: &Expr, b: &Expr) -> bool {
    equivalent(a, b, &EquivOptions::default()).expect("equivalence check inconclusive")
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Func};
    use super::*;

    #[test]
    fn binomial_identity() {
        let x = Expr::base(0);
        let u = Expr::jet(0, vec![0]);
        let lhs = (x.clone() + u.clone()).pow(2);
        let rhs = x.clone().pow(2) + Expr::int(2) * x * u.clone() + u.pow(2);
        assert!(equiv_default(&lhs, &rhs));
    }

    #[test]
    fn pythagorean_identity() {
        let s = Expr::apply(Func::Sin, Expr::base(0)).pow(2);
        let c = Expr::apply(Func::Cos, Expr::base(0)).pow(2);
        assert!(equiv_default(&(s + c), &Expr::one()));
    }

    #[test]
    fn close_but_not_equal_is_detected() {
        // x1 vs x1 + 1e-3 at tol 1e-9 fails at any sample point
        let a = Expr::base(0);
        let b = Expr::base(0) + Expr::rational(1, 1000);
        let opts = EquivOptions {
            trials: 16,
            tol: 1e-9,
            ..Default::default()
        };
        assert!(!equivalent(&a, &b, &opts).unwrap());
    }

    #[test]
    fn log_domain_points_are_resampled() {
        // log(x^2) = 2 log |x|; with log(x)*2 only positive samples survive,
        // so resampling must kick in rather than erroring out
        let lhs = Expr::apply(Func::Log, Expr::base(0).pow(2));
        let rhs = Expr::int(2) * Expr::apply(Func::Log, Expr::base(0));
        // not equivalent on negatives, but every surviving sample has x > 0
        let opts = EquivOptions::default();
        assert!(equivalent(&lhs, &rhs, &opts).unwrap());
    }

    #[test]
    fn determinism_under_fixed_seed() {
        let a = Expr::apply(Func::Sin, Expr::base(0) * Expr::base(1));
        let b = Expr::apply(Func::Sin, Expr::base(1) * Expr::base(0)) + Expr::rational(1, 100);
        let o = EquivOptions::with_seed(7);
        let r1 = equivalent(&a, &b, &o).unwrap();
        let r2 = equivalent(&a, &b, &o).unwrap();
        assert_eq!(r1, r2);
        assert!(!r1);
    }
}
