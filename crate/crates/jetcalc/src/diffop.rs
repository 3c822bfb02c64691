//! Linear differential operators and their bundle-map avatars.
//!
//! An operator Σ a_α ∂_α corresponds to the linear map out of the jet
//! bundle whose component is Σ a_α(x) u^k_α; `apply` realizes the operator
//! on sections by prolong-then-substitute, and `compose` is the Kleisli
//! composite: prolong the inner map's components by total derivatives and
//! substitute into the outer one.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{expand, Expr, JetVar, MultiIndex};
use crate::jet::{prolong, total_derivative_multi, Chart, JetContext, Section};

/// Σ_{|α| ≤ r} a^j_{kα}(x) ∂_α as a coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct LinDiffOp {
    pub chart: Chart,
    /// source fiber rank
    pub m: usize,
    /// target fiber rank
    pub m_out: usize,
    /// (row j < m_out, col k < m, α) ↦ coefficient in base variables
    pub coeffs: BTreeMap<(usize, usize, MultiIndex), Expr>,
}

impl LinDiffOp {
    pub fn new(
        chart: Chart,
        m: usize,
        m_out: usize,
        coeffs: BTreeMap<(usize, usize, MultiIndex), Expr>,
    ) -> Result<LinDiffOp> {
        let n = chart.dim();
        let base_ctx = JetContext::new(1, 0, chart.clone())?;
        let mut canonical = BTreeMap::new();
        for ((j, k, alpha), a) in coeffs {
            if j >= m_out || k >= m {
                return Err(Error::Invalid(format!(
                    "coefficient row {j} col {k} outside ranks {m_out} x {m}"
                )));
            }
            if alpha.dim() != n {
                return Err(Error::Invalid(
                    "coefficient multi-index dimension mismatch".into(),
                ));
            }
            if a.contains_jet() {
                return Err(Error::Invalid(
                    "operator coefficients must use base variables only".into(),
                ));
            }
            base_ctx.validate(&a.clone().canon())?;
            let c = a.canon();
            if !c.is_zero() {
                canonical.insert((j, k, alpha), c);
            }
        }
        Ok(LinDiffOp {
            chart,
            m,
            m_out,
            coeffs: canonical,
        })
    }

    /// Max |α| with a nonzero coefficient.
    pub fn order(&self) -> usize {
        self.coeffs
            .keys()
            .map(|(_, _, alpha)| alpha.order())
            .max()
            .unwrap_or(0)
    }

    /// The identity operator (a_∅ = 1 on the diagonal).
    pub fn identity(chart: Chart, m: usize) -> LinDiffOp {
        let n = chart.dim();
        let mut coeffs = BTreeMap::new();
        for k in 0..m {
            coeffs.insert((k, k, MultiIndex::zero(n)), Expr::one());
        }
        LinDiffOp {
            chart,
            m,
            m_out: m,
            coeffs,
        }
    }

    /// ∂/∂x_axis on a rank-1 bundle.
    pub fn partial(chart: Chart, axis: usize) -> LinDiffOp {
        let n = chart.dim();
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 0, MultiIndex::unit(n, axis)), Expr::one());
        LinDiffOp {
            chart,
            m: 1,
            m_out: 1,
            coeffs,
        }
    }

    /// Multiplication by a base-variable expression on a rank-1 bundle.
    pub fn multiplication(chart: Chart, f: Expr) -> Result<LinDiffOp> {
        let n = chart.dim();
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 0, MultiIndex::zero(n)), f);
        LinDiffOp::new(chart.clone(), 1, 1, coeffs)
    }

    /// The Laplacian Σ_i ∂²/∂x_i² on a rank-1 bundle.
    pub fn laplacian(chart: Chart) -> LinDiffOp {
        let n = chart.dim();
        let mut coeffs = BTreeMap::new();
        for i in 0..n {
            let mut exps = vec![0u32; n];
            exps[i] = 2;
            coeffs.insert((0, 0, MultiIndex::new(exps)), Expr::one());
        }
        LinDiffOp {
            chart,
            m: 1,
            m_out: 1,
            coeffs,
        }
    }

    /// Entrywise difference, used for commutator checks.
    pub fn sub(&self, other: &LinDiffOp) -> Result<LinDiffOp> {
        if self.m != other.m || self.m_out != other.m_out {
            return Err(Error::RankMismatch {
                expected: self.m,
                got: other.m,
            });
        }
        let mut coeffs = self.coeffs.clone();
        for (key, a) in &other.coeffs {
            let entry = coeffs.entry(key.clone()).or_insert_with(Expr::zero);
            *entry = (entry.clone() - a.clone()).canon();
        }
        coeffs.retain(|_, a| !a.is_zero());
        Ok(LinDiffOp {
            chart: self.chart.clone(),
            m: self.m,
            m_out: self.m_out,
            coeffs,
        })
    }
}

/// A map out of a jet bundle, componentwise in jet coordinates. The
/// `linear` flag asserts degree-1 homogeneity in the fiber coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleMap {
    pub source: JetContext,
    pub m_out: usize,
    pub components: Vec<Expr>,
    pub linear: bool,
}

impl BundleMap {
    pub fn new(source: JetContext, components: Vec<Expr>, linear: bool) -> Result<BundleMap> {
        for c in &components {
            source.validate(c)?;
        }
        let map = BundleMap {
            m_out: components.len(),
            components: components.iter().map(|c| c.canon()).collect(),
            source,
            linear,
        };
        if linear {
            // re-derivable: the coefficient extraction doubles as the check
            from_bundle_map(&map)?;
        }
        Ok(map)
    }
}

/// F ↦ its linear components Σ a^j_{kα}(x) u^k_α.
pub fn to_bundle_map(op: &LinDiffOp) -> BundleMap {
    let r = op.order();
    let source = JetContext {
        m: op.m,
        r,
        chart: op.chart.clone(),
    };
    let mut components = vec![Expr::zero(); op.m_out];
    for ((j, k, alpha), a) in &op.coeffs {
        let term = a.clone() * Expr::Jet(JetVar::new(*k, alpha.clone()));
        components[*j] = (components[*j].clone() + term).canon();
    }
    BundleMap {
        source,
        m_out: op.m_out,
        components,
        linear: true,
    }
}

/// Read the coefficient table off a u-linear bundle map; inverse of
/// [`to_bundle_map`]. Components that are not degree-1 homogeneous in the
/// jet coordinates are rejected.
pub fn from_bundle_map(map: &BundleMap) -> Result<LinDiffOp> {
    let mut coeffs: BTreeMap<(usize, usize, MultiIndex), Expr> = BTreeMap::new();
    for (j, comp) in map.components.iter().enumerate() {
        if comp.is_zero() {
            continue;
        }
        let expanded = expand(comp);
        let terms: Vec<Expr> = match &expanded {
            Expr::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        };
        for term in terms {
            let factors: Vec<Expr> = match &term {
                Expr::Product(fs) => fs.clone(),
                other => vec![other.clone()],
            };
            let mut jet: Option<JetVar> = None;
            let mut base_factors: Vec<Expr> = Vec::new();
            for f in factors {
                match &f {
                    Expr::Jet(jv) => {
                        if jet.is_some() {
                            return Err(Error::NotLinear(format!(
                                "component {j} has a degree >= 2 term"
                            )));
                        }
                        jet = Some(jv.clone());
                    }
                    Expr::Pow(b, _) if matches!(b.as_ref(), Expr::Jet(_)) => {
                        return Err(Error::NotLinear(format!(
                            "component {j} raises a jet coordinate to a power"
                        )));
                    }
                    other if other.contains_jet() => {
                        return Err(Error::NotLinear(format!(
                            "component {j} uses jet coordinates non-linearly"
                        )));
                    }
                    other => base_factors.push(other.clone()),
                }
            }
            let jv = jet.ok_or_else(|| {
                Error::NotLinear(format!(
                    "component {j} has a term with no jet coordinate (not homogeneous)"
                ))
            })?;
            let coeff = match base_factors.len() {
                0 => Expr::one(),
                1 => base_factors.into_iter().next().unwrap(),
                _ => Expr::Product(base_factors),
            };
            let key = (j, jv.fiber, jv.index);
            let entry = coeffs.entry(key).or_insert_with(Expr::zero);
            *entry = (entry.clone() + coeff).canon();
        }
    }
    coeffs.retain(|_, a| !a.is_zero());
    LinDiffOp::new(
        map.source.chart.clone(),
        map.source.m,
        map.m_out,
        coeffs,
    )
}

/// Apply an operator to a section: prolong, substitute, canonicalize.
pub fn apply(op: &LinDiffOp, s: &Section) -> Result<Section> {
    if s.m() != op.m {
        return Err(Error::RankMismatch {
            expected: op.m,
            got: s.m(),
        });
    }
    let map = to_bundle_map(op);
    let js = prolong(s, map.source.r);
    let components = map
        .components
        .iter()
        .map(|c| c.substitute_jets(&|jv: &JetVar| js.get(jv).cloned()))
        .collect::<Result<Vec<_>>>()?;
    Section::new(s.chart.clone(), components)
}

/// Kleisli composition G ∘ F: prolong F's components by total derivatives
/// up to G's order (the comultiplication route), substitute into G, and
/// read the coefficients back off. Satisfies
/// apply(compose(G, F), s) ≡ apply(G, apply(F, s)).
pub fn compose(outer: &LinDiffOp, inner: &LinDiffOp) -> Result<LinDiffOp> {
    if inner.m_out != outer.m {
        return Err(Error::RankMismatch {
            expected: outer.m,
            got: inner.m_out,
        });
    }
    if inner.chart != outer.chart {
        return Err(Error::ContextMismatch(
            "operators live on different charts".into(),
        ));
    }
    let f = to_bundle_map(inner);
    let g = to_bundle_map(outer);
    let q = outer.order();
    let r = inner.order();

    // D_J f_j for every |J| <= q: the jet coordinate (j, J) of the
    // prolonged inner map
    let mut prolonged: BTreeMap<JetVar, Expr> = BTreeMap::new();
    for (j, comp) in f.components.iter().enumerate() {
        for index in MultiIndex::all_up_to(inner.chart.dim(), q) {
            prolonged.insert(
                JetVar::new(j, index.clone()),
                total_derivative_multi(comp, &index),
            );
        }
    }

    let components = g
        .components
        .iter()
        .map(|c| c.substitute_jets(&|jv: &JetVar| prolonged.get(jv).cloned()))
        .collect::<Result<Vec<_>>>()?;

    let source = JetContext {
        m: inner.m,
        r: r + q,
        chart: inner.chart.clone(),
    };
    from_bundle_map(&BundleMap {
        source,
        m_out: outer.m_out,
        components,
        linear: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::equiv::equiv_default;
    use crate::expr::Func;

    fn chart1() -> Chart {
        Chart::unit_box(1)
    }

    #[test]
    fn to_bundle_map_of_partial() {
        let op = LinDiffOp::partial(chart1(), 0);
        let map = to_bundle_map(&op);
        assert_eq!(map.components, vec![Expr::jet(0, vec![1])]);
        assert!(map.linear);
    }

    #[test]
    fn to_bundle_map_of_identity() {
        let op = LinDiffOp::identity(chart1(), 1);
        let map = to_bundle_map(&op);
        assert_eq!(map.components, vec![Expr::jet(0, vec![0])]);
    }

    #[test]
    fn laplacian_components() {
        let op = LinDiffOp::laplacian(Chart::unit_box(2));
        let map = to_bundle_map(&op);
        let expect = (Expr::jet(0, vec![2, 0]) + Expr::jet(0, vec![0, 2])).canon();
        assert_eq!(map.components[0], expect);
    }

    #[test]
    fn from_bundle_map_roundtrip() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 0, MultiIndex::new(vec![1])), Expr::base(0));
        coeffs.insert(
            (0, 0, MultiIndex::new(vec![2])),
            (Expr::base(0).pow(2) + Expr::int(1)).canon(),
        );
        let op = LinDiffOp::new(chart1(), 1, 1, coeffs).unwrap();
        let back = from_bundle_map(&to_bundle_map(&op)).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn from_bundle_map_rejects_nonlinear() {
        let ctx = JetContext::new(1, 0, chart1()).unwrap();
        let sq = BundleMap {
            source: ctx.clone(),
            m_out: 1,
            components: vec![Expr::jet(0, vec![0]).pow(2)],
            linear: false,
        };
        assert!(matches!(from_bundle_map(&sq), Err(Error::NotLinear(_))));
        let affine = BundleMap {
            source: ctx,
            m_out: 1,
            components: vec![(Expr::jet(0, vec![0]) + Expr::one()).canon()],
            linear: false,
        };
        assert!(matches!(from_bundle_map(&affine), Err(Error::NotLinear(_))));
    }

    #[test]
    fn apply_partial_to_sin() {
        let op = LinDiffOp::partial(chart1(), 0);
        let s = Section::new(chart1(), vec![Expr::apply(Func::Sin, Expr::base(0))]).unwrap();
        let out = apply(&op, &s).unwrap();
        assert_eq!(
            out.components[0],
            Expr::apply(Func::Cos, Expr::base(0))
        );
    }

    #[test]
    fn apply_identity_is_identity() {
        let op = LinDiffOp::identity(chart1(), 1);
        let s = Section::new(chart1(), vec![Expr::base(0).pow(3)]).unwrap();
        assert_eq!(apply(&op, &s).unwrap(), s);
    }

    #[test]
    fn apply_laplacian_to_square_sum() {
        let op = LinDiffOp::laplacian(Chart::unit_box(2));
        let s = Section::new(
            Chart::unit_box(2),
            vec![(Expr::base(0).pow(2) + Expr::base(1).pow(2)).canon()],
        )
        .unwrap();
        assert_eq!(apply(&op, &s).unwrap().components[0], Expr::int(4));
    }

    #[test]
    fn compose_two_partials() {
        let d = LinDiffOp::partial(chart1(), 0);
        let dd = compose(&d, &d).unwrap();
        assert_eq!(dd.order(), 2);
        assert_eq!(dd.coeffs.len(), 1);
        assert_eq!(
            dd.coeffs[&(0, 0, MultiIndex::new(vec![2]))],
            Expr::one()
        );
    }

    #[test]
    fn commutator_of_x_and_partial_is_identity() {
        let d = LinDiffOp::partial(chart1(), 0);
        let x = LinDiffOp::multiplication(chart1(), Expr::base(0)).unwrap();
        let dx = compose(&d, &x).unwrap(); // d/dx ∘ (x ·)
        let xd = compose(&x, &d).unwrap(); // (x ·) ∘ d/dx
        let comm = dx.sub(&xd).unwrap();
        assert_eq!(comm, LinDiffOp::identity(chart1(), 1));
    }

    #[test]
    fn identity_is_kleisli_unit() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 0, MultiIndex::new(vec![1])), Expr::base(0));
        coeffs.insert((0, 0, MultiIndex::new(vec![0])), Expr::int(3));
        let f = LinDiffOp::new(chart1(), 1, 1, coeffs).unwrap();
        let id = LinDiffOp::identity(chart1(), 1);
        assert_eq!(compose(&id, &f).unwrap(), f);
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn functoriality_on_a_trig_section() {
        let d = LinDiffOp::partial(chart1(), 0);
        let x = LinDiffOp::multiplication(chart1(), Expr::base(0)).unwrap();
        let both = compose(&d, &x).unwrap();
        let s = Section::new(chart1(), vec![Expr::apply(Func::Sin, Expr::base(0))]).unwrap();
        let lhs = apply(&both, &s).unwrap();
        let rhs = apply(&d, &apply(&x, &s).unwrap()).unwrap();
        assert!(equiv_default(&lhs.components[0], &rhs.components[0]));
    }

    #[test]
    fn order_additivity_bound() {
        let d = LinDiffOp::partial(chart1(), 0);
        let x = LinDiffOp::multiplication(chart1(), Expr::base(0)).unwrap();
        assert!(compose(&d, &d).unwrap().order() <= 2);
        assert!(compose(&x, &d).unwrap().order() <= 1);
        // cancellation can drop the order strictly below the bound
        let dx = compose(&d, &x).unwrap();
        assert!(dx.order() <= 1);
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let d = LinDiffOp::partial(chart1(), 0);
        let s2 = Section::new(chart1(), vec![Expr::base(0), Expr::one()]).unwrap();
        assert!(matches!(
            apply(&d, &s2),
            Err(Error::RankMismatch { expected: 1, got: 2 })
        ));
    }
}
