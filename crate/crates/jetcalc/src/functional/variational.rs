//! Lagrangians, the Euler–Lagrange operator, and the variational identity
//! that ties the Gâteaux derivative of an action to the pairing of its
//! Euler–Lagrange expressions against compactly supported directions.

use crate::error::{Error, Result};
use crate::expr::{differentiate, evaluate, Assignment, Expr, JetVar, MultiIndex, Var};
use crate::jet::{prolong, total_derivative_multi, Chart, JetContext, Section};
use crate::numeric::Grid;

use super::smooth::{gateaux, integrate, SmoothFunctional};

/// A density in jet coordinates together with a positive volume weight in
/// base variables (default 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    pub context: JetContext,
    pub density: Expr,
    pub weight: Expr,
}

impl Lagrangian {
    pub fn new(chart: Chart, m: usize, density: Expr, weight: Expr) -> Result<Lagrangian> {
        let density = density.canon();
        let weight = weight.canon();
        let r = density.max_jet_order().unwrap_or(0);
        let context = JetContext::new(m, r, chart)?;
        context.validate(&density)?;
        if weight.contains_jet() {
            return Err(Error::Invalid(
                "weight must be an expression in base variables".into(),
            ));
        }
        // probe positivity of the weight at the chart corners and center
        let n = context.n();
        let mut probes: Vec<Vec<f64>> = vec![context
            .chart
            .0
            .iter()
            .map(|&(lo, hi)| 0.5 * (lo + hi))
            .collect()];
        for mask in 0..(1u32 << n.min(16)) {
            probes.push(
                context
                    .chart
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| if mask & (1 << i) != 0 { hi } else { lo })
                    .collect(),
            );
        }
        for p in probes {
            let mut asg = Assignment::new();
            for (i, &x) in p.iter().enumerate() {
                asg.set_base(i, x);
            }
            match evaluate(&weight, &asg) {
                Ok(v) if v > 0.0 => {}
                Ok(v) => {
                    return Err(Error::Invalid(format!(
                        "weight is not positive on the chart (value {v} at {p:?})"
                    )));
                }
                // parameters in the weight cannot be probed here
                Err(Error::UnboundVariable(_)) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(Lagrangian {
            context,
            density,
            weight,
        })
    }

    pub fn order(&self) -> usize {
        self.context.r
    }
}

/// el_α(L) = Σ_{|I| ≤ r} (−1)^{|I|} D_I (∂L/∂u^α_I), one expression per
/// fiber component, canonicalized. Output order is at most 2r.
pub fn euler_lagrange(l: &Lagrangian) -> Vec<Expr> {
    let n = l.context.n();
    let r = l.context.r;
    let mut out = Vec::with_capacity(l.context.m);
    for alpha in 0..l.context.m {
        let mut acc = Expr::zero();
        for index in MultiIndex::all_up_to(n, r) {
            let partial = differentiate(&l.density, &Var::Jet(JetVar::new(alpha, index.clone())));
            if partial.is_zero() {
                continue;
            }
            let sign = if index.order() % 2 == 0 { 1 } else { -1 };
            let term = total_derivative_multi(&partial, &index);
            acc = acc + Expr::int(sign) * term;
        }
        out.push(acc.canon());
    }
    out
}

/// The action as a function of sampled values only: jets come from finite
/// differences of the samples, never from symbolic prolongation, which
/// makes this the independent numeric oracle for Gâteaux values.
pub fn sampled_action(
    l: &Lagrangian,
    grid: &Grid,
    params: &Assignment,
) -> Result<impl Fn(&crate::numeric::SampledSection) -> crate::error::Result<f64>> {
    let weight_section = Section::new(l.context.chart.clone(), vec![l.weight.clone()])?;
    let weight_values = crate::numeric::sample(&weight_section, grid, params)?.values[0].clone();
    let density = l.density.clone();
    let r = l.context.r;
    let grid = grid.clone();
    let params = params.clone();
    Ok(move |ss: &crate::numeric::SampledSection| -> crate::error::Result<f64> {
        let jets = crate::numeric::jet_sample_values(ss, r)?;
        let mut values = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let point = jets.jet_point(flat);
            let mut asg = params.clone();
            for (i, &x) in point.base.iter().enumerate() {
                asg.set_base(i, x);
            }
            for (jv, &v) in &point.values {
                asg.set_jet(jv.clone(), v);
            }
            values.push(evaluate(&density, &asg)? * weight_values[flat]);
        }
        grid.quadrature(&values)
    })
}

/// Both sides of dS(s)[t] = ∫ el(L)(j s) · t · w for a compactly supported
/// direction t, with their relative gap.
#[derive(Debug, Clone)]
pub struct VariationalReport {
    pub gateaux_value: f64,
    pub el_integral: f64,
    pub rel_gap: f64,
}

/// Compare the Gâteaux derivative of the action against the pairing of the
/// Euler–Lagrange expressions with the direction. The boundary term is
/// killed by directions vanishing (with enough derivatives) at the chart
/// boundary.
pub fn variational_identity_check(
    l: &Lagrangian,
    s: &Section,
    t: &Section,
    grid: &Grid,
    params: &Assignment,
) -> Result<VariationalReport> {
    if s.m() != l.context.m || t.m() != l.context.m {
        return Err(Error::RankMismatch {
            expected: l.context.m,
            got: s.m().max(t.m()),
        });
    }
    let action = SmoothFunctional::local(l.clone(), grid.clone());
    let gateaux_value = gateaux(&action, s, t, params)?;

    let el = euler_lagrange(l);
    let order = el.iter().filter_map(|e| e.max_jet_order()).max().unwrap_or(0);
    let js = prolong(s, order);
    let mut integrand = Expr::zero();
    for (alpha, e) in el.iter().enumerate() {
        let along = e.substitute_jets(&|jv: &JetVar| js.get(jv).cloned())?;
        integrand = integrand + along * t.components[alpha].clone();
    }
    let integrand = (integrand * l.weight.clone()).canon();
    let el_integral = integrate(&integrand, grid, params)?;

    let rel_gap = (gateaux_value - el_integral).abs()
        / (1.0 + gateaux_value.abs() + el_integral.abs());
    Ok(VariationalReport {
        gateaux_value,
        el_integral,
        rel_gap,
    })
}
