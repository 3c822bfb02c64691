//! Jet bundles over a single chart: contexts, sections, prolongation,
//! total derivatives, projections, the comonad structure (counit and
//! comultiplication as an index relabeling), the direct-sum splitting of
//! jets of a product bundle, and linear connections.
//!
//! Infinite jets never exist as data; every operation states the order it
//! needs and prolongs on demand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{differentiate, evaluate, Assignment, Expr, JetVar, MultiIndex, Var};

/// Rectangular chart box in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart(pub Vec<(f64, f64)>);

impl Chart {
    pub fn unit_box(n: usize) -> Chart {
        Chart(vec![(0.0, 1.0); n])
    }

    pub fn symmetric(n: usize, half_width: f64) -> Chart {
        Chart(vec![(-half_width, half_width); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(&self.0)
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }
}

/// The coordinate ring of J^r(E) on a chart: base dimension from the chart,
/// fiber rank `m`, jet order `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetContext {
    pub m: usize,
    pub r: usize,
    pub chart: Chart,
}

impl JetContext {
    pub fn new(m: usize, r: usize, chart: Chart) -> Result<JetContext> {
        if chart.dim() == 0 || m == 0 {
            return Err(Error::Invalid(
                "jet context needs base dimension >= 1 and fiber rank >= 1".into(),
            ));
        }
        Ok(JetContext { m, r, chart })
    }

    pub fn n(&self) -> usize {
        self.chart.dim()
    }

    /// Jet coordinates in the fixed iteration order: fiber-major, then
    /// graded-lexicographic on the multi-index.
    pub fn jet_coords(&self) -> Vec<JetVar> {
        let indices = MultiIndex::all_up_to(self.n(), self.r);
        let mut out = Vec::with_capacity(self.m * indices.len());
        for k in 0..self.m {
            for idx in &indices {
                out.push(JetVar::new(k, idx.clone()));
            }
        }
        out
    }

    pub fn coord_count(&self) -> usize {
        self.m * MultiIndex::all_up_to(self.n(), self.r).len()
    }

    /// Flat position of (k, I) in the `jet_coords` order.
    pub fn flat_index(&self, jv: &JetVar) -> Result<usize> {
        let indices = MultiIndex::all_up_to(self.n(), self.r);
        let pos = indices
            .iter()
            .position(|i| i == &jv.index)
            .ok_or_else(|| Error::Invalid(format!("multi-index outside order {}", self.r)))?;
        Ok(jv.fiber * indices.len() + pos)
    }

    /// Check that an expression only uses coordinates of this context.
    pub fn validate(&self, e: &Expr) -> Result<()> {
        for v in e.free_vars() {
            match v {
                Var::Base(i) if i >= self.n() => {
                    return Err(Error::Invalid(format!(
                        "base variable x{} outside dimension {}",
                        i + 1,
                        self.n()
                    )));
                }
                Var::Jet(jv) => {
                    if jv.fiber >= self.m {
                        return Err(Error::Invalid(format!(
                            "fiber index u{} outside rank {}",
                            jv.fiber + 1,
                            self.m
                        )));
                    }
                    if jv.index.dim() != self.n() {
                        return Err(Error::Invalid(format!(
                            "multi-index dimension {} does not match base dimension {}",
                            jv.index.dim(),
                            self.n()
                        )));
                    }
                    if jv.index.order() > self.r {
                        return Err(Error::InsufficientOrder {
                            needed: jv.index.order(),
                            got: self.r,
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn at_order(&self, r: usize) -> JetContext {
        JetContext {
            m: self.m,
            r,
            chart: self.chart.clone(),
        }
    }
}

/// A local section of the bundle: m expressions in base variables (and
/// parameters) only.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub chart: Chart,
    pub components: Vec<Expr>,
}

impl Section {
    pub fn new(chart: Chart, components: Vec<Expr>) -> Result<Section> {
        if components.is_empty() {
            return Err(Error::Invalid("section needs at least one component".into()));
        }
        let n = chart.dim();
        for c in &components {
            if c.contains_jet() {
                return Err(Error::Invalid(
                    "section components must not mention jet coordinates".into(),
                ));
            }
            if c.min_base_dim() > n {
                return Err(Error::Invalid(format!(
                    "section component uses axis beyond dimension {n}"
                )));
            }
        }
        Ok(Section {
            chart,
            components: components.iter().map(|c| c.canon()).collect(),
        })
    }

    pub fn zero(chart: Chart, m: usize) -> Section {
        Section {
            chart,
            components: vec![Expr::zero(); m],
        }
    }

    pub fn n(&self) -> usize {
        self.chart.dim()
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Pointwise linear combination a*self + b*other.
    pub fn combine(&self, a: &Expr, other: &Section, b: &Expr) -> Result<Section> {
        if self.m() != other.m() {
            return Err(Error::RankMismatch {
                expected: self.m(),
                got: other.m(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(s, t)| (a.clone() * s.clone() + b.clone() * t.clone()).canon())
            .collect();
        Ok(Section {
            chart: self.chart.clone(),
            components,
        })
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        self.combine(&Expr::one(), other, &Expr::one())
    }

    pub fn scale_f64(&self, c: f64) -> Result<Section> {
        let ce = Expr::from_f64(c)?;
        Ok(Section {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .map(|s| (ce.clone() * s.clone()).canon())
                .collect(),
        })
    }

    pub fn eval_at(&self, point: &[f64], params: &Assignment) -> Result<Vec<f64>> {
        let mut asg = params.clone();
        for (i, &x) in point.iter().enumerate() {
            asg.set_base(i, x);
        }
        self.components.iter().map(|c| evaluate(c, &asg)).collect()
    }
}

/// A prolongation j^r(s) realized as the assignment u^k_I ↦ ∂_I s^k.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSection {
    pub context: JetContext,
    pub assignment: BTreeMap<JetVar, Expr>,
}

impl JetSection {
    pub fn get(&self, jv: &JetVar) -> Option<&Expr> {
        self.assignment.get(jv)
    }

    /// Pointwise linear combination (the vector-space structure of jets).
    pub fn combine(&self, a: f64, other: &JetSection, b: f64) -> Result<JetSection> {
        if self.context != other.context {
            return Err(Error::ContextMismatch(
                "jet sections live in different contexts".into(),
            ));
        }
        let (ae, be) = (Expr::from_f64(a)?, Expr::from_f64(b)?);
        let mut assignment = BTreeMap::new();
        for (jv, e) in &self.assignment {
            let o = other
                .assignment
                .get(jv)
                .ok_or_else(|| Error::ContextMismatch("assignment domains differ".into()))?;
            assignment.insert(
                jv.clone(),
                (ae.clone() * e.clone() + be.clone() * o.clone()).canon(),
            );
        }
        Ok(JetSection {
            context: self.context.clone(),
            assignment,
        })
    }

    /// Evaluate every jet coordinate at a base point.
    pub fn eval_at(&self, point: &[f64], params: &Assignment) -> Result<JetPoint> {
        let mut asg = params.clone();
        for (i, &x) in point.iter().enumerate() {
            asg.set_base(i, x);
        }
        let mut values = BTreeMap::new();
        for (jv, e) in &self.assignment {
            values.insert(jv.clone(), evaluate(e, &asg)?);
        }
        Ok(JetPoint {
            context: self.context.clone(),
            base: point.to_vec(),
            values,
        })
    }
}

/// A single r-jet: numeric values for every jet coordinate over a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub context: JetContext,
    pub base: Vec<f64>,
    pub values: BTreeMap<JetVar, f64>,
}

impl JetPoint {
    pub fn assignment(&self) -> Assignment {
        let mut asg = Assignment::new();
        for (i, &x) in self.base.iter().enumerate() {
            asg.set_base(i, x);
        }
        for (jv, &v) in &self.values {
            asg.set_jet(jv.clone(), v);
        }
        asg
    }
}

/// j^r(s): u^k_I ↦ ∂_I s^k, computed by repeated partial differentiation.
pub fn prolong(s: &Section, r: usize) -> JetSection {
    let n = s.n();
    let context = JetContext {
        m: s.m(),
        r,
        chart: s.chart.clone(),
    };
    let mut assignment: BTreeMap<JetVar, Expr> = BTreeMap::new();
    for k in 0..s.m() {
        for idx in MultiIndex::all_up_to(n, r) {
            let jv = JetVar::new(k, idx.clone());
            let e = match first_nonzero_axis(&idx) {
                None => s.components[k].canon(),
                Some(axis) => {
                    let mut parent = idx.exponents().to_vec();
                    parent[axis] -= 1;
                    let parent_expr = assignment
                        .get(&JetVar::new(k, MultiIndex::new(parent)))
                        .expect("graded order visits parents first");
                    differentiate(parent_expr, &Var::Base(axis))
                }
            };
            assignment.insert(jv, e);
        }
    }
    JetSection {
        context,
        assignment,
    }
}

fn first_nonzero_axis(idx: &MultiIndex) -> Option<usize> {
    idx.exponents().iter().position(|&e| e > 0)
}

/// Total derivative D_i = ∂/∂x_i + Σ u^k_{I+e_i} ∂/∂u^k_I.
/// The output lives one order higher than the input.
pub fn total_derivative(e: &Expr, axis: usize) -> Expr {
    let mut out = differentiate(e, &Var::Base(axis));
    for jv in e.jet_vars() {
        let partial = differentiate(e, &Var::Jet(jv.clone()));
        if partial.is_zero() {
            continue;
        }
        let bumped = Expr::Jet(JetVar::new(jv.fiber, jv.index.bump(axis)));
        out = out + bumped * partial;
    }
    out.canon()
}

/// D_I: the composite of total derivatives prescribed by a multi-index.
pub fn total_derivative_multi(e: &Expr, index: &MultiIndex) -> Expr {
    let mut acc = e.canon();
    for (axis, &count) in index.exponents().iter().enumerate() {
        for _ in 0..count {
            acc = total_derivative(&acc, axis);
        }
    }
    acc
}

/// Counit on a jet section: restrict to the order-0 coordinates.
pub fn counit_section(js: &JetSection) -> Result<Section> {
    let n = js.context.n();
    let components = (0..js.context.m)
        .map(|k| {
            js.assignment
                .get(&JetVar::new(k, MultiIndex::zero(n)))
                .cloned()
                .ok_or_else(|| Error::Invalid("jet section misses order-0 slot".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Section::new(js.context.chart.clone(), components)
}

/// Counit on a jet point: the order-0 fiber value.
pub fn counit_point(p: &JetPoint) -> Result<Vec<f64>> {
    let n = p.context.n();
    (0..p.context.m)
        .map(|k| {
            p.values
                .get(&JetVar::new(k, MultiIndex::zero(n)))
                .copied()
                .ok_or_else(|| Error::Invalid("jet point misses order-0 slot".into()))
        })
        .collect()
}

/// The outer context of J^q(J^r(E)): fiber rank = number of inner jet
/// coordinates, order q.
pub fn nested_context(inner: &JetContext, inner_r: usize, outer_q: usize) -> JetContext {
    let inner_at = inner.at_order(inner_r);
    JetContext {
        m: inner_at.coord_count(),
        r: outer_q,
        chart: inner.chart.clone(),
    }
}

/// Comultiplication μ^{r,q}: the pure relabeling sending the J^q(J^r)
/// coordinate (outer J, inner (k,I)) to the value of u^k_{I+J}.
pub fn comultiply_point(p: &JetPoint, inner_r: usize, outer_q: usize) -> Result<JetPoint> {
    if p.context.r < inner_r + outer_q {
        return Err(Error::InsufficientOrder {
            needed: inner_r + outer_q,
            got: p.context.r,
        });
    }
    let inner = p.context.at_order(inner_r);
    let outer = nested_context(&p.context, inner_r, outer_q);
    let mut values = BTreeMap::new();
    for inner_jv in inner.jet_coords() {
        let flat = inner.flat_index(&inner_jv)?;
        for outer_idx in MultiIndex::all_up_to(outer.n(), outer_q) {
            let source = JetVar::new(inner_jv.fiber, inner_jv.index.add(&outer_idx));
            let v = *p
                .values
                .get(&source)
                .ok_or_else(|| Error::Invalid("jet point misses a coordinate".into()))?;
            values.insert(JetVar::new(flat, outer_idx.clone()), v);
        }
    }
    Ok(JetPoint {
        context: outer,
        base: p.base.clone(),
        values,
    })
}

/// Comultiplication on a jet section (same relabeling on expressions).
pub fn comultiply_section(
    js: &JetSection,
    inner_r: usize,
    outer_q: usize,
) -> Result<JetSection> {
    if js.context.r < inner_r + outer_q {
        return Err(Error::InsufficientOrder {
            needed: inner_r + outer_q,
            got: js.context.r,
        });
    }
    let inner = js.context.at_order(inner_r);
    let outer = nested_context(&js.context, inner_r, outer_q);
    let mut assignment = BTreeMap::new();
    for inner_jv in inner.jet_coords() {
        let flat = inner.flat_index(&inner_jv)?;
        for outer_idx in MultiIndex::all_up_to(outer.n(), outer_q) {
            let source = JetVar::new(inner_jv.fiber, inner_jv.index.add(&outer_idx));
            let e = js
                .assignment
                .get(&source)
                .ok_or_else(|| Error::Invalid("jet section misses a coordinate".into()))?;
            assignment.insert(JetVar::new(flat, outer_idx.clone()), e.clone());
        }
    }
    Ok(JetSection {
        context: outer,
        assignment,
    })
}

/// Projection π_{r,q}: drop coordinates above order q.
pub fn project_section(js: &JetSection, q: usize) -> Result<JetSection> {
    if q > js.context.r {
        return Err(Error::InsufficientOrder {
            needed: q,
            got: js.context.r,
        });
    }
    Ok(JetSection {
        context: js.context.at_order(q),
        assignment: js
            .assignment
            .iter()
            .filter(|(jv, _)| jv.index.order() <= q)
            .map(|(jv, e)| (jv.clone(), e.clone()))
            .collect(),
    })
}

pub fn project_point(p: &JetPoint, q: usize) -> Result<JetPoint> {
    if q > p.context.r {
        return Err(Error::InsufficientOrder {
            needed: q,
            got: p.context.r,
        });
    }
    Ok(JetPoint {
        context: p.context.at_order(q),
        base: p.base.clone(),
        values: p
            .values
            .iter()
            .filter(|(jv, _)| jv.index.order() <= q)
            .map(|(jv, &v)| (jv.clone(), v))
            .collect(),
    })
}

/// Split a jet section of a product bundle (m = m1 + m2) by fiber blocks.
/// Prolongation is componentwise, so this is the direct-sum half of the
/// storage isomorphism; [`seely_merge`] is its inverse.
pub fn seely_split(js: &JetSection, m1: usize) -> Result<(JetSection, JetSection)> {
    if m1 > js.context.m {
        return Err(Error::Invalid(format!(
            "split position {m1} exceeds fiber rank {}",
            js.context.m
        )));
    }
    let m2 = js.context.m - m1;
    let left_ctx = JetContext {
        m: m1,
        ..js.context.clone()
    };
    let right_ctx = JetContext {
        m: m2,
        ..js.context.clone()
    };
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (jv, e) in &js.assignment {
        if jv.fiber < m1 {
            left.insert(jv.clone(), e.clone());
        } else {
            right.insert(JetVar::new(jv.fiber - m1, jv.index.clone()), e.clone());
        }
    }
    Ok((
        JetSection {
            context: left_ctx,
            assignment: left,
        },
        JetSection {
            context: right_ctx,
            assignment: right,
        },
    ))
}

pub fn seely_merge(left: &JetSection, right: &JetSection) -> Result<JetSection> {
    if left.context.r != right.context.r || left.context.chart != right.context.chart {
        return Err(Error::ContextMismatch(
            "merge requires equal order and chart".into(),
        ));
    }
    let m1 = left.context.m;
    let context = JetContext {
        m: m1 + right.context.m,
        ..left.context.clone()
    };
    let mut assignment = left.assignment.clone();
    for (jv, e) in &right.assignment {
        assignment.insert(JetVar::new(jv.fiber + m1, jv.index.clone()), e.clone());
    }
    Ok(JetSection {
        context,
        assignment,
    })
}

/// A linear connection: coefficients Γ^k_i as expressions in (x, u) of
/// order 0 on a first-order context.
#[derive(Debug, Clone)]
pub struct Connection {
    pub chart: Chart,
    pub m: usize,
    /// gammas[k][i] = Γ^k_i
    pub gammas: Vec<Vec<Expr>>,
}

impl Connection {
    pub fn new(chart: Chart, m: usize, gammas: Vec<Vec<Expr>>) -> Result<Connection> {
        let n = chart.dim();
        if gammas.len() != m || gammas.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "connection coefficients must be {m} x {n}"
            )));
        }
        let order_zero = JetContext::new(m, 0, chart.clone())?;
        for row in &gammas {
            for g in row {
                order_zero.validate(g)?;
            }
        }
        Ok(Connection { chart, m, gammas })
    }

    /// Substitute the section into the order-0 fiber slots of an expression.
    fn along(&self, e: &Expr, s: &Section) -> Result<Expr> {
        let n = self.chart.dim();
        e.substitute_jets(&|jv: &JetVar| {
            if jv.index == MultiIndex::zero(n) {
                s.components.get(jv.fiber).cloned()
            } else {
                None
            }
        })
    }

    /// The induced first-jet lift Γ¹(s): order-0 slots carry s, order-1
    /// slots carry Γ^k_i along s. Satisfies counit ∘ lift = id.
    pub fn first_jet_lift(&self, s: &Section) -> Result<JetSection> {
        if s.m() != self.m {
            return Err(Error::RankMismatch {
                expected: self.m,
                got: s.m(),
            });
        }
        let n = self.chart.dim();
        let context = JetContext::new(self.m, 1, self.chart.clone())?;
        let mut assignment = BTreeMap::new();
        for k in 0..self.m {
            assignment.insert(
                JetVar::new(k, MultiIndex::zero(n)),
                s.components[k].canon(),
            );
            for i in 0..n {
                assignment.insert(
                    JetVar::new(k, MultiIndex::unit(n, i)),
                    self.along(&self.gammas[k][i], s)?,
                );
            }
        }
        Ok(JetSection {
            context,
            assignment,
        })
    }

    /// Covariant derivative ∇s: component (i, k) = ∂_i s^k + Γ^k_i along s.
    /// Returned as one Section of rank m per base axis.
    pub fn covariant_derivative(&self, s: &Section) -> Result<Vec<Section>> {
        if s.m() != self.m {
            return Err(Error::RankMismatch {
                expected: self.m,
                got: s.m(),
            });
        }
        let n = self.chart.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut comps = Vec::with_capacity(self.m);
            for k in 0..self.m {
                let partial = differentiate(&s.components[k], &Var::Base(i));
                let gamma = self.along(&self.gammas[k][i], s)?;
                comps.push((partial + gamma).canon());
            }
            out.push(Section::new(self.chart.clone(), comps)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equiv::equiv_default;
    use crate::expr::Func;

    fn section_1d(e: Expr) -> Section {
        Section::new(Chart::unit_box(1), vec![e]).unwrap()
    }

    #[test]
    fn prolong_square() {
        // j^2(x^2) = {u -> x^2, u_x -> 2x, u_xx -> 2}
        let js = prolong(&section_1d(Expr::base(0).pow(2)), 2);
        assert_eq!(
            js.get(&JetVar::new(0, MultiIndex::new(vec![0]))).unwrap(),
            &Expr::base(0).pow(2)
        );
        assert_eq!(
            js.get(&JetVar::new(0, MultiIndex::new(vec![1]))).unwrap(),
            &(Expr::int(2) * Expr::base(0)).canon()
        );
        assert_eq!(
            js.get(&JetVar::new(0, MultiIndex::new(vec![2]))).unwrap(),
            &Expr::int(2)
        );
    }

    #[test]
    fn prolong_order_zero_is_the_section() {
        let s = section_1d(Expr::apply(Func::Sin, Expr::base(0)));
        let js = prolong(&s, 0);
        assert_eq!(counit_section(&js).unwrap(), s);
    }

    #[test]
    fn prolong_sin_cycles() {
        let js = prolong(&section_1d(Expr::apply(Func::Sin, Expr::base(0))), 3);
        let third = js.get(&JetVar::new(0, MultiIndex::new(vec![3]))).unwrap();
        let expect = (Expr::int(-1) * Expr::apply(Func::Cos, Expr::base(0))).canon();
        assert!(equiv_default(third, &expect));
    }

    #[test]
    fn prolongation_compatibility() {
        // d/dx of slot I equals slot I + e_i
        let s = Section::new(
            Chart::unit_box(2),
            vec![(Expr::base(0).pow(3) * Expr::base(1)).canon()],
        )
        .unwrap();
        let js = prolong(&s, 3);
        for (jv, e) in &js.assignment {
            for axis in 0..2 {
                if jv.index.order() + 1 > 3 {
                    continue;
                }
                let lhs = differentiate(e, &Var::Base(axis));
                let rhs = js
                    .get(&JetVar::new(jv.fiber, jv.index.bump(axis)))
                    .unwrap();
                assert!(equiv_default(&lhs, rhs));
            }
        }
    }

    #[test]
    fn total_derivative_basics() {
        // D_1 u = u_x
        let d = total_derivative(&Expr::jet(0, vec![0]), 0);
        assert_eq!(d, Expr::jet(0, vec![1]));
        // D_1 (x u) = u + x u_x
        let d2 = total_derivative(&(Expr::base(0) * Expr::jet(0, vec![0])).canon(), 0);
        let expect =
            (Expr::jet(0, vec![0]) + Expr::base(0) * Expr::jet(0, vec![1])).canon();
        assert_eq!(d2, expect);
    }

    #[test]
    fn total_derivative_intertwines_evaluation_along_prolongation() {
        // e = u^2, s = x^2: both routes give 8 x^3
        let e = Expr::jet(0, vec![0]).pow(2);
        let s = section_1d(Expr::base(0).pow(2));
        let de = total_derivative(&e, 0);
        let js = prolong(&s, 1);
        let lhs = de
            .substitute_jets(&|jv: &JetVar| js.get(jv).cloned())
            .unwrap();
        let along = e
            .substitute_jets(&|jv: &JetVar| js.get(jv).cloned())
            .unwrap();
        let rhs = differentiate(&along, &Var::Base(0));
        let expect = (Expr::int(4) * Expr::base(0).pow(3)).canon();
        assert_eq!(lhs, expect);
        assert_eq!(rhs, expect);
    }

    #[test]
    fn total_derivatives_commute() {
        let e = (Expr::jet(0, vec![1, 0]) * Expr::jet(0, vec![0, 1]).pow(2)
            + Expr::base(0) * Expr::jet(0, vec![0, 0]))
        .canon();
        let dxy = total_derivative(&total_derivative(&e, 0), 1);
        let dyx = total_derivative(&total_derivative(&e, 1), 0);
        // equal as polynomials in the jet coordinates
        assert_eq!(crate::expr::expand(&dxy), crate::expr::expand(&dyx));
        assert!(equiv_default(&dxy, &dyx));
    }

    #[test]
    fn counit_recovers_section() {
        let s = section_1d(Expr::base(0).pow(2));
        assert_eq!(counit_section(&prolong(&s, 2)).unwrap(), s);
    }

    #[test]
    fn comultiplication_is_the_index_relabeling() {
        // n = m = 1, r = q = 1: (u, u1, u2) lands as
        // outer fiber 0 = inner u: (J=0 -> u, J=1 -> u1)
        // outer fiber 1 = inner u1: (J=0 -> u1, J=1 -> u2)
        let s = section_1d(Expr::base(0).pow(3));
        let js = prolong(&s, 2);
        let nested = comultiply_section(&js, 1, 1).unwrap();
        assert_eq!(nested.context.m, 2);
        let get = |fiber: usize, j: u32| {
            nested
                .get(&JetVar::new(fiber, MultiIndex::new(vec![j])))
                .unwrap()
                .clone()
        };
        let u = |i: u32| js.get(&JetVar::new(0, MultiIndex::new(vec![i]))).unwrap().clone();
        assert_eq!(get(0, 0), u(0));
        assert_eq!(get(0, 1), u(1));
        assert_eq!(get(1, 0), u(1));
        assert_eq!(get(1, 1), u(2));
    }

    #[test]
    fn comultiplication_requires_enough_order() {
        let js = prolong(&section_1d(Expr::base(0)), 1);
        assert!(matches!(
            comultiply_section(&js, 1, 1),
            Err(Error::InsufficientOrder { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn outer_counit_after_comultiplication_projects() {
        let s = section_1d(Expr::apply(Func::Sin, Expr::base(0)));
        let js = prolong(&s, 3);
        let nested = comultiply_section(&js, 2, 1).unwrap();
        // outer order-0 slots in flat order = the order-2 projection in
        // its coordinate order
        let projected = project_section(&js, 2).unwrap();
        let inner = js.context.at_order(2);
        for jv in inner.jet_coords() {
            let flat = inner.flat_index(&jv).unwrap();
            let outer_slot = nested
                .get(&JetVar::new(flat, MultiIndex::zero(1)))
                .unwrap();
            assert_eq!(outer_slot, projected.get(&jv).unwrap());
        }
    }

    #[test]
    fn projection_composes_and_is_identity_at_top() {
        let s = section_1d(Expr::base(0).pow(4));
        let js = prolong(&s, 3);
        assert_eq!(project_section(&js, 3).unwrap(), js);
        let p1 = project_section(&project_section(&js, 2).unwrap(), 1).unwrap();
        assert_eq!(p1, project_section(&js, 1).unwrap());
        assert!(project_section(&js, 4).is_err());
    }

    #[test]
    fn seely_split_merge_roundtrip() {
        let s = Section::new(
            Chart::unit_box(1),
            vec![Expr::base(0), Expr::base(0).pow(2)],
        )
        .unwrap();
        let js = prolong(&s, 2);
        let (a, b) = seely_split(&js, 1).unwrap();
        assert_eq!(
            a,
            prolong(&section_1d(Expr::base(0)), 2)
        );
        assert_eq!(b, prolong(&section_1d(Expr::base(0).pow(2)), 2));
        assert_eq!(seely_merge(&a, &b).unwrap(), js);
    }

    #[test]
    fn connection_counit_law_and_flat_case() {
        let chart = Chart::unit_box(1);
        // flat connection: plain partial derivatives
        let flat = Connection::new(chart.clone(), 1, vec![vec![Expr::zero()]]).unwrap();
        let s = section_1d(Expr::base(0).pow(2));
        let nabla = flat.covariant_derivative(&s).unwrap();
        assert_eq!(
            nabla[0].components[0],
            (Expr::int(2) * Expr::base(0)).canon()
        );
        // counit of the first-jet lift is the section again
        let gamma =
            Connection::new(chart, 1, vec![vec![Expr::jet(0, vec![0])]]).unwrap();
        let lift = gamma.first_jet_lift(&s).unwrap();
        assert_eq!(counit_section(&lift).unwrap(), s);
    }

    #[test]
    fn connection_leibniz_rule() {
        // nabla(f s) = f nabla(s) + (df) s for linear Gamma
        let chart = Chart::unit_box(1);
        let gamma =
            Connection::new(chart.clone(), 1, vec![vec![Expr::jet(0, vec![0])]]).unwrap();
        let f = Expr::base(0);
        let s = section_1d(Expr::apply(Func::Sin, Expr::base(0)));
        let fs = Section::new(
            chart,
            vec![(f.clone() * s.components[0].clone()).canon()],
        )
        .unwrap();
        let lhs = gamma.covariant_derivative(&fs).unwrap()[0].components[0].clone();
        let nabla_s = gamma.covariant_derivative(&s).unwrap()[0].components[0].clone();
        let df = differentiate(&f, &Var::Base(0));
        let rhs = (f * nabla_s + df * s.components[0].clone()).canon();
        assert!(equiv_default(&lhs, &rhs));
    }
}
