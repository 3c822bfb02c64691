//! Smooth functionals on sections and the pairing with formal
//! distributions.
//!
//! Pairing a delta evaluates the functional; pairing a derivative-of-delta
//! takes a mixed directional derivative — symbolically when the functional
//! is a local action (the perturbation h-parameters are differentiated
//! away exactly), by Richardson-extrapolated central differences otherwise.
//! Spans over distributions pair against the lifted functional
//! G_F(ξ) = pair(ξ, F), which is linear in ξ.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{differentiate, evaluate, Assignment, Expr, JetVar, Var};
use crate::jet::{prolong, seely_split, JetSection, Section};
use crate::numeric::{combine_richardson, Grid, FD_STEPS};

use super::variational::Lagrangian;
use super::{Carrier, FormalDistribution, FormalTensor, Generator};

/// A Lagrangian with its integration grid: the action s ↦ ∫ L(j^r s) w.
#[derive(Debug, Clone)]
pub struct LocalFunctional {
    pub lagrangian: Lagrangian,
    pub grid: Grid,
}

/// A smooth functional on sections.
#[derive(Clone)]
pub enum SmoothFunctional {
    /// Integral of a density in jet coordinates.
    Local(LocalFunctional),
    /// An opaque evaluation rule on sections.
    ClosedForm {
        name: String,
        eval: Arc<dyn Fn(&Section, &Assignment) -> Result<f64> + Send + Sync>,
    },
    /// outer ∘ inner, with `outer` an expression in the parameter `y`.
    Composite {
        outer: Expr,
        inner: Box<SmoothFunctional>,
    },
    /// F(s_left) · G(s_right) on a product bundle split at `split`.
    BlockProduct {
        split: usize,
        left: Box<SmoothFunctional>,
        right: Box<SmoothFunctional>,
    },
}

/// The parameter name the outer expression of a composite is written in.
pub const COMPOSITE_VAR: &str = "y";

impl std::fmt::Debug for SmoothFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothFunctional::Local(l) => f.debug_tuple("Local").field(l).finish(),
            SmoothFunctional::ClosedForm { name, .. } => {
                f.debug_struct("ClosedForm").field("name", name).finish()
            }
            SmoothFunctional::Composite { outer, inner } => f
                .debug_struct("Composite")
                .field("outer", outer)
                .field("inner", inner)
                .finish(),
            SmoothFunctional::BlockProduct { split, left, right } => f
                .debug_struct("BlockProduct")
                .field("split", split)
                .field("left", left)
                .field("right", right)
                .finish(),
        }
    }
}

impl SmoothFunctional {
    pub fn local(lagrangian: Lagrangian, grid: Grid) -> SmoothFunctional {
        SmoothFunctional::Local(LocalFunctional { lagrangian, grid })
    }

    pub fn closed_form(
        name: impl Into<String>,
        eval: impl Fn(&Section, &Assignment) -> Result<f64> + Send + Sync + 'static,
    ) -> SmoothFunctional {
        SmoothFunctional::ClosedForm {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn composite(outer: Expr, inner: SmoothFunctional) -> SmoothFunctional {
        SmoothFunctional::Composite {
            outer: outer.canon(),
            inner: Box::new(inner),
        }
    }

    /// Jet order of the underlying local density, when there is one.
    pub fn local_order(&self) -> Option<usize> {
        match self {
            SmoothFunctional::Local(l) => Some(l.lagrangian.context.r),
            SmoothFunctional::Composite { inner, .. } => inner.local_order(),
            SmoothFunctional::BlockProduct { left, right, .. } => {
                Some(left.local_order()?.max(right.local_order()?))
            }
            SmoothFunctional::ClosedForm { .. } => None,
        }
    }

    pub fn eval_section(&self, s: &Section, params: &Assignment) -> Result<f64> {
        match self {
            SmoothFunctional::Local(l) => {
                let js = prolong(s, l.lagrangian.context.r);
                l.action_on_assignment(&js.assignment, params)
            }
            SmoothFunctional::ClosedForm { eval, .. } => eval(s, params),
            SmoothFunctional::Composite { outer, inner } => {
                let v = inner.eval_section(s, params)?;
                eval_outer(outer, v, params)
            }
            SmoothFunctional::BlockProduct { split, left, right } => {
                if *split >= s.m() {
                    return Err(Error::RankMismatch {
                        expected: *split + 1,
                        got: s.m(),
                    });
                }
                let ls = Section::new(s.chart.clone(), s.components[..*split].to_vec())?;
                let rs = Section::new(s.chart.clone(), s.components[*split..].to_vec())?;
                Ok(left.eval_section(&ls, params)? * right.eval_section(&rs, params)?)
            }
        }
    }

    /// Evaluate the functional on a (not necessarily holonomic) jet
    /// section — the local-functional reading of jets.
    pub fn eval_jet(&self, js: &JetSection, params: &Assignment) -> Result<f64> {
        match self {
            SmoothFunctional::Local(l) => l.action_on_assignment(&js.assignment, params),
            SmoothFunctional::Composite { outer, inner } => {
                let v = inner.eval_jet(js, params)?;
                eval_outer(outer, v, params)
            }
            SmoothFunctional::BlockProduct { split, left, right } => {
                let (ls, rs) = seely_split(js, *split)?;
                Ok(left.eval_jet(&ls, params)? * right.eval_jet(&rs, params)?)
            }
            SmoothFunctional::ClosedForm { name, .. } => Err(Error::ContextMismatch(format!(
                "closed-form functional `{name}` is defined on sections, not jets"
            ))),
        }
    }

    pub fn eval_carrier(&self, c: &Carrier, params: &Assignment) -> Result<f64> {
        match c {
            Carrier::Section(s) => self.eval_section(s, params),
            Carrier::JetSection(js) => self.eval_jet(js, params),
            Carrier::Dist(d) => pair(d, self, params),
        }
    }
}

fn eval_outer(outer: &Expr, v: f64, params: &Assignment) -> Result<f64> {
    let mut asg = params.clone();
    asg.set_param(COMPOSITE_VAR, v);
    evaluate(outer, &asg)
}

impl LocalFunctional {
    /// ∫ density(assignment) · weight over the grid.
    fn action_on_assignment(
        &self,
        assignment: &BTreeMap<JetVar, Expr>,
        params: &Assignment,
    ) -> Result<f64> {
        let along = self
            .lagrangian
            .density
            .substitute_jets(&|jv: &JetVar| assignment.get(jv).cloned())?;
        let integrand = (along * self.lagrangian.weight.clone()).canon();
        integrate(&integrand, &self.grid, params)
    }

    /// Mixed symbolic Gâteaux derivative: substitute
    /// u^k_I ↦ base(u^k_I) + Σ_j h_j tangent_j(u^k_I), differentiate the
    /// density in each h_j, set h = 0, integrate.
    fn mixed_gateaux(
        &self,
        base: &BTreeMap<JetVar, Expr>,
        tangents: &[&BTreeMap<JetVar, Expr>],
        params: &Assignment,
    ) -> Result<f64> {
        let hnames: Vec<String> = (0..tangents.len()).map(|i| format!("__dh{i}")).collect();
        let perturbed = self.lagrangian.density.substitute_jets(&|jv: &JetVar| {
            let b = base.get(jv)?;
            let mut acc = b.clone();
            for (h, t) in hnames.iter().zip(tangents) {
                let dir = t.get(jv)?;
                acc = acc + Expr::param(h.clone()) * dir.clone();
            }
            Some(acc.canon())
        })?;
        let mut dens = perturbed;
        for h in &hnames {
            dens = differentiate(&dens, &Var::Param(h.clone()));
        }
        for h in &hnames {
            dens = dens.substitute_param(h, &Expr::zero());
        }
        let integrand = (dens * self.lagrangian.weight.clone()).canon();
        integrate(&integrand, &self.grid, params)
    }
}

/// Trapezoid quadrature of a base-variable expression over a grid.
pub(crate) fn integrate(integrand: &Expr, grid: &Grid, params: &Assignment) -> Result<f64> {
    if integrand.contains_jet() {
        return Err(Error::UnboundVariable(
            "integrand still mentions jet coordinates".into(),
        ));
    }
    let mut values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let mut asg = params.clone();
        for (i, &x) in p.iter().enumerate() {
            asg.set_base(i, x);
        }
        values.push(evaluate(integrand, &asg)?);
    }
    grid.quadrature(&values)
}

/// Pair a distribution against a functional: linear in the distribution,
/// δ_p ↦ F(p), derivative generators ↦ mixed directional derivatives.
pub fn pair(d: &FormalDistribution, f: &SmoothFunctional, params: &Assignment) -> Result<f64> {
    let mut acc = 0.0;
    for (c, g) in d.terms() {
        acc += c * pair_generator(g, f, params)?;
    }
    Ok(acc)
}

pub(crate) fn pair_generator(
    g: &Generator,
    f: &SmoothFunctional,
    params: &Assignment,
) -> Result<f64> {
    match g {
        Generator::Delta(p) => f.eval_carrier(p, params),
        Generator::DeltaDeriv(p, tangents) => match p {
            // lifted functionals G_F(ξ) = ⟨ξ, F⟩ are linear in ξ: one
            // tangent differentiates to the tangent's own pairing, more
            // than one to zero
            Carrier::Dist(_) => {
                if tangents.len() == 1 {
                    match &tangents[0] {
                        Carrier::Dist(e) => pair(e, f, params),
                        _ => Err(Error::ContextMismatch(
                            "nested generator mixes carriers".into(),
                        )),
                    }
                } else {
                    Ok(0.0)
                }
            }
            Carrier::Section(s) => {
                if let SmoothFunctional::Local(l) = f {
                    let r = l.lagrangian.context.r;
                    let base = prolong(s, r).assignment;
                    let tangent_assignments: Vec<BTreeMap<JetVar, Expr>> = tangents
                        .iter()
                        .map(|t| match t {
                            Carrier::Section(ts) => Ok(prolong(ts, r).assignment),
                            _ => Err(Error::ContextMismatch(
                                "tangent carrier differs from the point carrier".into(),
                            )),
                        })
                        .collect::<Result<_>>()?;
                    let refs: Vec<&BTreeMap<JetVar, Expr>> =
                        tangent_assignments.iter().collect();
                    l.mixed_gateaux(&base, &refs, params)
                } else {
                    fd_mixed(f, p, tangents, params)
                }
            }
            Carrier::JetSection(js) => {
                if let SmoothFunctional::Local(l) = f {
                    let tangent_assignments: Vec<&BTreeMap<JetVar, Expr>> = tangents
                        .iter()
                        .map(|t| match t {
                            Carrier::JetSection(ts) => Ok(&ts.assignment),
                            _ => Err(Error::ContextMismatch(
                                "tangent carrier differs from the point carrier".into(),
                            )),
                        })
                        .collect::<Result<_>>()?;
                    l.mixed_gateaux(&js.assignment, &tangent_assignments, params)
                } else {
                    fd_mixed(f, p, tangents, params)
                }
            }
        },
    }
}

/// Mixed central difference over the tangent directions, one Richardson
/// pass over the step list.
fn fd_mixed(
    f: &SmoothFunctional,
    base: &Carrier,
    tangents: &[Carrier],
    params: &Assignment,
) -> Result<f64> {
    let k = tangents.len();
    let mut estimates = Vec::with_capacity(FD_STEPS.len());
    for &h in &FD_STEPS {
        let mut acc = 0.0;
        for mask in 0..(1u32 << k) {
            let mut point = base.clone();
            let mut sign = 1.0;
            for (i, t) in tangents.iter().enumerate() {
                let s = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                sign *= s;
                point = point.add(&t.scale(s * h)?)?;
            }
            acc += sign * f.eval_carrier(&point, params)?;
        }
        estimates.push(acc / (2.0 * h).powi(k as i32));
    }
    combine_richardson(&estimates, &FD_STEPS)
}

/// Directional (Gâteaux) derivative of F at s along t; agrees with
/// pairing the deriving transformation's output against F.
pub fn gateaux(
    f: &SmoothFunctional,
    s: &Section,
    t: &Section,
    params: &Assignment,
) -> Result<f64> {
    pair_generator(
        &Generator::DeltaDeriv(
            Carrier::Section(s.clone()),
            vec![Carrier::Section(t.clone())],
        ),
        f,
        params,
    )
}

/// Pair a two-fold tensor span against two functionals.
pub fn pair_tensor(
    t: &FormalTensor,
    f: &SmoothFunctional,
    g: &SmoothFunctional,
    params: &Assignment,
) -> Result<f64> {
    let mut acc = 0.0;
    for (c, g1, g2) in t.terms() {
        acc += c * pair_generator(g1, f, params)? * pair_generator(g2, g, params)?;
    }
    Ok(acc)
}
