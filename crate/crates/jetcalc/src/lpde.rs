//! Linear partial differential equations as kernels of linear bundle maps:
//! membership is a residual test, prolongation adjoins total derivatives of
//! the defining components, and solution checking samples residuals along
//! the prolongation of a candidate section.

use crate::diffop::{from_bundle_map, BundleMap};
use crate::error::{Error, Result};
use crate::expr::{evaluate, Assignment, Expr, JetVar, MultiIndex};
use crate::jet::{prolong, total_derivative_multi, Section};

/// A (possibly inhomogeneous) linear PDE f(j^r s) = g, represented by its
/// defining linear map and an optional inhomogeneity in base variables.
#[derive(Debug, Clone)]
pub struct Lpde {
    pub map: BundleMap,
    pub inhomogeneity: Option<Section>,
}

impl Lpde {
    pub fn new(map: BundleMap, inhomogeneity: Option<Section>) -> Result<Lpde> {
        // kernel representation: the defining map must be linear
        from_bundle_map(&map).map_err(|e| match e {
            Error::NotLinear(msg) => Error::NotLinear(format!("defining map: {msg}")),
            other => other,
        })?;
        if let Some(g) = &inhomogeneity {
            if g.m() != map.m_out {
                return Err(Error::RankMismatch {
                    expected: map.m_out,
                    got: g.m(),
                });
            }
        }
        Ok(Lpde {
            map,
            inhomogeneity,
        })
    }

    pub fn order(&self) -> usize {
        self.map.source.r
    }

    /// Residual components f_j − g_j as expressions over jet coordinates.
    pub fn residual_components(&self) -> Vec<Expr> {
        self.map
            .components
            .iter()
            .enumerate()
            .map(|(j, f)| match &self.inhomogeneity {
                Some(g) => (f.clone() - g.components[j].clone()).canon(),
                None => f.clone(),
            })
            .collect()
    }
}

/// The level-q prolonged equation set {D_J(f_j − g_j) : |J| ≤ q}, with
/// duplicates (up to canonical form) removed. Level q contains level q−1.
pub fn prolong_lpde(eq: &Lpde, q: usize) -> Vec<Expr> {
    let n = eq.map.source.n();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for index in MultiIndex::all_up_to(n, q) {
        for comp in eq.residual_components() {
            let derived = total_derivative_multi(&comp, &index);
            if derived.is_zero() {
                continue;
            }
            if seen.insert(derived.clone()) {
                out.push(derived);
            }
        }
    }
    out
}

/// Residual diagnostics of a candidate section against an equation.
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub points: Vec<Vec<f64>>,
    /// max |residual| per equation component over the evaluable points
    pub residual_max: Vec<f64>,
    /// points where evaluation hit a domain error, flagged rather than fatal
    pub flagged_points: Vec<Vec<f64>>,
    pub tol: f64,
    pub verdict: bool,
}

/// Evaluate every defining component along prolong(s, needed order) at each
/// point, reporting per-component residual maxima. `extra_levels` adds the
/// prolonged equation sets through that level.
pub fn check_solution(
    eq: &Lpde,
    s: &Section,
    points: &[Vec<f64>],
    tol: f64,
    extra_levels: usize,
    params: &Assignment,
) -> Result<SolutionReport> {
    if s.m() != eq.map.source.m {
        return Err(Error::RankMismatch {
            expected: eq.map.source.m,
            got: s.m(),
        });
    }
    let components = if extra_levels == 0 {
        eq.residual_components()
    } else {
        prolong_lpde(eq, extra_levels)
    };
    let order = components
        .iter()
        .filter_map(|c| c.max_jet_order())
        .max()
        .unwrap_or(0);
    let js = prolong(s, order);
    let along: Vec<Expr> = components
        .iter()
        .map(|c| c.substitute_jets(&|jv: &JetVar| js.get(jv).cloned()))
        .collect::<Result<Vec<_>>>()?;

    let mut residual_max = vec![0.0f64; components.len()];
    let mut flagged = Vec::new();
    for p in points {
        if !s.chart.contains(p) {
            return Err(Error::Invalid(format!("point {p:?} outside the chart")));
        }
        let mut asg = params.clone();
        for (i, &x) in p.iter().enumerate() {
            asg.set_base(i, x);
        }
        let mut point_ok = true;
        let mut values = Vec::with_capacity(along.len());
        for c in &along {
            match evaluate(c, &asg) {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(_) | Err(Error::Domain(_)) => {
                    point_ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if point_ok {
            for (j, v) in values.into_iter().enumerate() {
                residual_max[j] = residual_max[j].max(v.abs());
            }
        } else {
            flagged.push(p.clone());
        }
    }
    let verdict = residual_max.iter().all(|&r| r <= tol);
    Ok(SolutionReport {
        points: points.to_vec(),
        residual_max,
        flagged_points: flagged,
        tol,
        verdict,
    })
}

/// Outcome of checking that solutions remain solutions of the prolonged
/// equation.
#[derive(Debug, Clone)]
pub struct ProlongationReport {
    pub level0: SolutionReport,
    pub prolonged: Option<SolutionReport>,
}

impl ProlongationReport {
    /// True iff the prolonged residuals stay under tolerance whenever the
    /// level-0 residuals do (vacuously true for non-solutions).
    pub fn holds(&self) -> bool {
        match (&self.level0.verdict, &self.prolonged) {
            (false, _) => true,
            (true, Some(rep)) => rep.verdict,
            (true, None) => true,
        }
    }
}

/// A solution of the equation is a solution of its q-th prolongation.
pub fn solution_implies_prolonged(
    eq: &Lpde,
    s: &Section,
    q: usize,
    points: &[Vec<f64>],
    tol: f64,
    params: &Assignment,
) -> Result<ProlongationReport> {
    let level0 = check_solution(eq, s, points, tol, 0, params)?;
    if !level0.verdict {
        return Ok(ProlongationReport {
            level0,
            prolonged: None,
        });
    }
    let prolonged = check_solution(eq, s, points, tol, q, params)?;
    Ok(ProlongationReport {
        level0,
        prolonged: Some(prolonged),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Chart, JetContext};

    /// u'' = 0 on one base dimension.
    fn u_xx_zero() -> Lpde {
        let ctx = JetContext::new(1, 2, Chart::unit_box(1)).unwrap();
        let map = BundleMap::new(ctx, vec![Expr::jet(0, vec![2])], true).unwrap();
        Lpde::new(map, None).unwrap()
    }

    fn laplace_2d() -> Lpde {
        let ctx = JetContext::new(1, 2, Chart::unit_box(2)).unwrap();
        let comp = (Expr::jet(0, vec![2, 0]) + Expr::jet(0, vec![0, 2])).canon();
        let map = BundleMap::new(ctx, vec![comp], true).unwrap();
        Lpde::new(map, None).unwrap()
    }

    fn points_1d() -> Vec<Vec<f64>> {
        (0..=10).map(|i| vec![i as f64 / 10.0]).collect()
    }

    #[test]
    fn prolong_u_xx() {
        // q = 1 adds u_xxx
        let set = prolong_lpde(&u_xx_zero(), 1);
        assert_eq!(set, vec![Expr::jet(0, vec![2]), Expr::jet(0, vec![3])]);
    }

    #[test]
    fn prolong_level_zero_is_defining_set() {
        let set = prolong_lpde(&u_xx_zero(), 0);
        assert_eq!(set, vec![Expr::jet(0, vec![2])]);
    }

    #[test]
    fn prolong_heat_like() {
        // f = u_t − u_xx with axes (x, t): level 1 adds D_x f and D_t f
        let ctx = JetContext::new(1, 2, Chart::unit_box(2)).unwrap();
        let comp = (Expr::jet(0, vec![0, 1]) - Expr::jet(0, vec![2, 0])).canon();
        let map = BundleMap::new(ctx, vec![comp.clone()], true).unwrap();
        let eq = Lpde::new(map, None).unwrap();
        let set = prolong_lpde(&eq, 1);
        let dx = (Expr::jet(0, vec![1, 1]) - Expr::jet(0, vec![3, 0])).canon();
        let dt = (Expr::jet(0, vec![0, 2]) - Expr::jet(0, vec![2, 1])).canon();
        assert_eq!(set.len(), 3);
        assert!(set.contains(&comp));
        assert!(set.contains(&dx));
        assert!(set.contains(&dt));
    }

    #[test]
    fn prolonged_sets_grow_with_level() {
        let eq = laplace_2d();
        let s1 = prolong_lpde(&eq, 1);
        let s2 = prolong_lpde(&eq, 2);
        assert!(s1.iter().all(|c| s2.contains(c)));
        assert!(s2.len() > s1.len());
    }

    #[test]
    fn affine_solution_of_u_xx() {
        let s = Section::new(
            Chart::unit_box(1),
            vec![(Expr::int(3) * Expr::base(0) + Expr::int(2)).canon()],
        )
        .unwrap();
        let rep =
            check_solution(&u_xx_zero(), &s, &points_1d(), 1e-12, 0, &Assignment::new())
                .unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.residual_max, vec![0.0]);
    }

    #[test]
    fn quadratic_fails_u_xx_with_residual_two() {
        let s = Section::new(Chart::unit_box(1), vec![Expr::base(0).pow(2)]).unwrap();
        let rep =
            check_solution(&u_xx_zero(), &s, &points_1d(), 1e-9, 0, &Assignment::new())
                .unwrap();
        assert!(!rep.verdict);
        assert!((rep.residual_max[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_polynomial_solves_laplace_exactly() {
        let s = Section::new(
            Chart::unit_box(2),
            vec![(Expr::base(0).pow(2) - Expr::base(1).pow(2)).canon()],
        )
        .unwrap();
        let points: Vec<Vec<f64>> = (0..5)
            .flat_map(|i| (0..5).map(move |j| vec![i as f64 / 4.0, j as f64 / 4.0]))
            .collect();
        let rep =
            check_solution(&laplace_2d(), &s, &points, 0.0, 0, &Assignment::new()).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.residual_max, vec![0.0]);
    }

    #[test]
    fn solutions_stay_solutions_of_prolongations() {
        let s = Section::new(
            Chart::unit_box(1),
            vec![(Expr::int(3) * Expr::base(0) + Expr::int(2)).canon()],
        )
        .unwrap();
        let rep = solution_implies_prolonged(
            &u_xx_zero(),
            &s,
            3,
            &points_1d(),
            1e-12,
            &Assignment::new(),
        )
        .unwrap();
        assert!(rep.level0.verdict);
        assert!(rep.holds());
    }

    #[test]
    fn non_solution_is_handled_vacuously() {
        let s = Section::new(Chart::unit_box(1), vec![Expr::base(0).pow(2)]).unwrap();
        let rep = solution_implies_prolonged(
            &u_xx_zero(),
            &s,
            1,
            &points_1d(),
            1e-9,
            &Assignment::new(),
        )
        .unwrap();
        assert!(!rep.level0.verdict);
        assert!(rep.prolonged.is_none());
        assert!(rep.holds());
    }

    #[test]
    fn linear_combinations_of_exact_solutions_solve() {
        let eq = laplace_2d();
        let s = Section::new(
            Chart::unit_box(2),
            vec![(Expr::base(0).pow(2) - Expr::base(1).pow(2)).canon()],
        )
        .unwrap();
        let t = Section::new(
            Chart::unit_box(2),
            vec![(Expr::base(0) * Expr::base(1)).canon()],
        )
        .unwrap();
        let combo = s
            .combine(&Expr::rational(3, 2), &t, &Expr::int(-5))
            .unwrap();
        let points: Vec<Vec<f64>> = (0..4)
            .flat_map(|i| (0..4).map(move |j| vec![i as f64 / 3.0, j as f64 / 3.0]))
            .collect();
        let rep = check_solution(&eq, &combo, &points, 0.0, 0, &Assignment::new()).unwrap();
        assert!(rep.verdict);
    }

    #[test]
    fn inhomogeneous_poisson_residual() {
        // u'' = 2 has solution x^2
        let ctx = JetContext::new(1, 2, Chart::unit_box(1)).unwrap();
        let map = BundleMap::new(ctx, vec![Expr::jet(0, vec![2])], true).unwrap();
        let g = Section::new(Chart::unit_box(1), vec![Expr::int(2)]).unwrap();
        let eq = Lpde::new(map, Some(g)).unwrap();
        let s = Section::new(Chart::unit_box(1), vec![Expr::base(0).pow(2)]).unwrap();
        let rep = check_solution(&eq, &s, &points_1d(), 1e-12, 0, &Assignment::new()).unwrap();
        assert!(rep.verdict);
    }

    #[test]
    fn log_section_flags_bad_points_instead_of_failing() {
        // log(x) prolongs fine but cannot be evaluated at x = 0
        let s = Section::new(
            Chart::unit_box(1),
            vec![Expr::apply(crate::expr::Func::Log, Expr::base(0))],
        )
        .unwrap();
        let points = points_1d(); // includes x = 0, where u'' = -1/x^2 blows up
        let rep =
            check_solution(&u_xx_zero(), &s, &points, 1e-9, 0, &Assignment::new()).unwrap();
        assert_eq!(rep.flagged_points, vec![vec![0.0]]);
        assert!(!rep.verdict); // u'' = -1/x^2 is far from zero
    }
}
