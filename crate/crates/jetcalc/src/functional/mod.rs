//! Formal spans of Dirac deltas and the calculus on them.
//!
//! A distribution here is a finite linear span of `δ_p` and
//! derivative-of-delta generators `∂δ_p[t_1,…,t_k]`; the derivative
//! generator is exactly the object the codereliction's limit
//! (δ_{p+ht} − δ_p)/h defines, so limits never appear as data. Points and
//! tangents live in one carrier: sections, jet sections, or — one level
//! down — distributions themselves (depth ≤ 2, enough for the
//! comultiplication δ_s ↦ δ_{δ_s}).

mod laws;
mod smooth;
mod variational;

pub use laws::{
    codereliction_laws, composite_comonad_check, CoderelictionFlavor, LawEntry, LawReport,
};
pub use smooth::{gateaux, pair, pair_tensor, LocalFunctional, SmoothFunctional};
pub use variational::{
    euler_lagrange, sampled_action, variational_identity_check, Lagrangian, VariationalReport,
};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::jet::{counit_section, prolong, JetSection, Section};

/// The space a generator's points and tangents live in.
#[derive(Debug, Clone)]
pub enum Carrier {
    Section(Section),
    JetSection(JetSection),
    /// One nesting level down: a point of !E.
    Dist(Box<FormalDistribution>),
}

impl Carrier {
    fn kind_rank(&self) -> u8 {
        match self {
            Carrier::Section(_) => 0,
            Carrier::JetSection(_) => 1,
            Carrier::Dist(_) => 2,
        }
    }

    pub fn zero_like(&self) -> Carrier {
        match self {
            Carrier::Section(s) => Carrier::Section(Section::zero(s.chart.clone(), s.m())),
            Carrier::JetSection(js) => {
                let mut assignment = js.assignment.clone();
                for e in assignment.values_mut() {
                    *e = crate::expr::Expr::zero();
                }
                Carrier::JetSection(JetSection {
                    context: js.context.clone(),
                    assignment,
                })
            }
            Carrier::Dist(_) => Carrier::Dist(Box::new(FormalDistribution::zero())),
        }
    }

    /// Pointwise sum; both sides must live in the same carrier.
    pub fn add(&self, other: &Carrier) -> Result<Carrier> {
        match (self, other) {
            (Carrier::Section(a), Carrier::Section(b)) => Ok(Carrier::Section(a.add(b)?)),
            (Carrier::JetSection(a), Carrier::JetSection(b)) => {
                Ok(Carrier::JetSection(a.combine(1.0, b, 1.0)?))
            }
            (Carrier::Dist(a), Carrier::Dist(b)) => {
                Ok(Carrier::Dist(Box::new(a.add(b)?)))
            }
            _ => Err(Error::ContextMismatch(
                "cannot add points of different carriers".into(),
            )),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Carrier> {
        match self {
            Carrier::Section(s) => Ok(Carrier::Section(s.scale_f64(c)?)),
            Carrier::JetSection(js) => Ok(Carrier::JetSection(js.combine(c, js, 0.0)?)),
            Carrier::Dist(d) => Ok(Carrier::Dist(Box::new(d.scale(c)))),
        }
    }

    fn cmp_key(&self, other: &Carrier) -> Ordering {
        self.kind_rank().cmp(&other.kind_rank()).then_with(|| {
            match (self, other) {
                (Carrier::Section(a), Carrier::Section(b)) => a
                    .components
                    .cmp(&b.components)
                    .then_with(|| cmp_chart(&a.chart.0, &b.chart.0)),
                (Carrier::JetSection(a), Carrier::JetSection(b)) => a
                    .assignment
                    .iter()
                    .collect::<Vec<_>>()
                    .cmp(&b.assignment.iter().collect::<Vec<_>>())
                    .then_with(|| a.context.m.cmp(&b.context.m))
                    .then_with(|| a.context.r.cmp(&b.context.r))
                    .then_with(|| cmp_chart(&a.context.chart.0, &b.context.chart.0)),
                (Carrier::Dist(a), Carrier::Dist(b)) => a.cmp_key(b),
                _ => unreachable!("ranks already compared"),
            }
        })
    }
}

fn cmp_chart(a: &[(f64, f64)], b: &[(f64, f64)]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for ((alo, ahi), (blo, bhi)) in a.iter().zip(b) {
            let c = alo.total_cmp(blo).then(ahi.total_cmp(bhi));
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    })
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}

/// A span generator: a delta at a point, or a mixed derivative of delta.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Delta(Carrier),
    /// ∂δ_point[t_1,…,t_k]: tangents are order-insensitive (mixed
    /// derivatives are symmetric) and kept sorted.
    DeltaDeriv(Carrier, Vec<Carrier>),
}

impl Generator {
    pub fn point(&self) -> &Carrier {
        match self {
            Generator::Delta(p) => p,
            Generator::DeltaDeriv(p, _) => p,
        }
    }

    pub fn tangents(&self) -> &[Carrier] {
        match self {
            Generator::Delta(_) => &[],
            Generator::DeltaDeriv(_, ts) => ts,
        }
    }

    /// Rebuild from a point and tangent list; empty tangents mean a delta.
    fn assemble(point: Carrier, mut tangents: Vec<Carrier>) -> Generator {
        if tangents.is_empty() {
            Generator::Delta(point)
        } else {
            tangents.sort_by(|a, b| a.cmp_key(b));
            Generator::DeltaDeriv(point, tangents)
        }
    }

    fn cmp_key(&self, other: &Generator) -> Ordering {
        let rank = |g: &Generator| match g {
            Generator::Delta(_) => 0u8,
            Generator::DeltaDeriv(..) => 1,
        };
        rank(self).cmp(&rank(other)).then_with(|| {
            self.point().cmp_key(other.point()).then_with(|| {
                let (ta, tb) = (self.tangents(), other.tangents());
                ta.len().cmp(&tb.len()).then_with(|| {
                    for (a, b) in ta.iter().zip(tb) {
                        let c = a.cmp_key(b);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            })
        })
    }
}

/// A finite linear span of generators over one carrier. The empty span is
/// the zero distribution.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormalDistribution {
    terms: Vec<(f64, Generator)>,
}

impl FormalDistribution {
    pub fn zero() -> FormalDistribution {
        FormalDistribution::default()
    }

    pub fn from_terms(terms: Vec<(f64, Generator)>) -> Result<FormalDistribution> {
        // all generators must share one carrier kind
        let mut kinds = terms
            .iter()
            .flat_map(|(_, g)| {
                std::iter::once(g.point().kind_rank())
                    .chain(g.tangents().iter().map(|t| t.kind_rank()))
            })
            .collect::<Vec<_>>();
        kinds.dedup();
        if kinds.len() > 1 {
            return Err(Error::ContextMismatch(
                "span mixes generators over different carriers".into(),
            ));
        }
        let mut d = FormalDistribution { terms };
        d.normalize();
        Ok(d)
    }

    fn normalize(&mut self) {
        let mut terms = std::mem::take(&mut self.terms);
        for (_, g) in terms.iter_mut() {
            if let Generator::DeltaDeriv(_, ts) = g {
                ts.sort_by(|a, b| a.cmp_key(b));
            }
        }
        terms.sort_by(|(_, a), (_, b)| a.cmp_key(b));
        let mut merged: Vec<(f64, Generator)> = Vec::with_capacity(terms.len());
        for (c, g) in terms {
            match merged.last_mut() {
                Some((lc, lg)) if lg.cmp_key(&g) == Ordering::Equal => *lc += c,
                _ => merged.push((c, g)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        self.terms = merged;
    }

    pub fn terms(&self) -> &[(f64, Generator)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FormalDistribution) -> Result<FormalDistribution> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        FormalDistribution::from_terms(terms)
    }

    pub fn scale(&self, c: f64) -> FormalDistribution {
        let mut d = FormalDistribution {
            terms: self
                .terms
                .iter()
                .map(|(a, g)| (a * c, g.clone()))
                .collect(),
        };
        d.normalize();
        d
    }

    fn cmp_key(&self, other: &FormalDistribution) -> Ordering {
        self.terms.len().cmp(&other.terms.len()).then_with(|| {
            for ((ca, ga), (cb, gb)) in self.terms.iter().zip(&other.terms) {
                let c = ga.cmp_key(gb).then(ca.total_cmp(cb));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    /// Map every point and tangent through a linear map of carriers.
    pub fn pushforward(
        &self,
        f: &impl Fn(&Carrier) -> Result<Carrier>,
    ) -> Result<FormalDistribution> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, g) in &self.terms {
            let point = f(g.point())?;
            let tangents = g
                .tangents()
                .iter()
                .map(f)
                .collect::<Result<Vec<_>>>()?;
            terms.push((*c, Generator::assemble(point, tangents)));
        }
        FormalDistribution::from_terms(terms)
    }
}

/// A finite span of two-fold tensors of generators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormalTensor {
    terms: Vec<(f64, Generator, Generator)>,
}

impl FormalTensor {
    pub fn from_terms(terms: Vec<(f64, Generator, Generator)>) -> FormalTensor {
        let mut t = FormalTensor { terms };
        t.normalize();
        t
    }

    pub fn terms(&self) -> &[(f64, Generator, Generator)] {
        &self.terms
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|(_, a1, a2), (_, b1, b2)| {
            a1.cmp_key(b1).then_with(|| a2.cmp_key(b2))
        });
        let mut merged: Vec<(f64, Generator, Generator)> = Vec::new();
        for (c, g1, g2) in std::mem::take(&mut self.terms) {
            match merged.last_mut() {
                Some((lc, l1, l2))
                    if l1.cmp_key(&g1) == Ordering::Equal
                        && l2.cmp_key(&g2) == Ordering::Equal =>
                {
                    *lc += c
                }
                _ => merged.push((c, g1, g2)),
            }
        }
        merged.retain(|(c, _, _)| *c != 0.0);
        self.terms = merged;
    }

    /// Tensor product of two spans.
    pub fn of(a: &FormalDistribution, b: &FormalDistribution) -> FormalTensor {
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (ca, ga) in &a.terms {
            for (cb, gb) in &b.terms {
                terms.push((ca * cb, ga.clone(), gb.clone()));
            }
        }
        FormalTensor::from_terms(terms)
    }
}

/// δ_p.
pub fn delta(point: Carrier) -> FormalDistribution {
    FormalDistribution {
        terms: vec![(1.0, Generator::Delta(point))],
    }
}

/// δ_{j^r(s)}.
pub fn delta_jet(s: &Section, r: usize) -> FormalDistribution {
    delta(Carrier::JetSection(prolong(s, r)))
}

/// Distributional codereliction d̄^δ(t) = ∂δ_0[t]: the derivative-of-delta
/// at the zero section in direction t.
pub fn codereliction_delta(t: &Section) -> FormalDistribution {
    let zero = Carrier::Section(Section::zero(t.chart.clone(), t.m()));
    FormalDistribution {
        terms: vec![(
            1.0,
            Generator::DeltaDeriv(zero, vec![Carrier::Section(t.clone())]),
        )],
    }
}

/// Jet-distributional codereliction d̄^{jδ}(t) = ∂δ_0[j^r(t)] over the jet
/// carrier at order r.
pub fn codereliction_jet(t: &Section, r: usize) -> FormalDistribution {
    let zero = prolong(&Section::zero(t.chart.clone(), t.m()), r);
    FormalDistribution {
        terms: vec![(
            1.0,
            Generator::DeltaDeriv(
                Carrier::JetSection(zero),
                vec![Carrier::JetSection(prolong(t, r))],
            ),
        )],
    }
}

/// Deriving transformation ∂̄(t ⊗ −): δ_p ↦ ∂δ_p[t] and
/// ∂δ_p[ts] ↦ ∂δ_p[ts, t] — the n-fold derivative grows one tangent slot.
pub fn deriving(t: &Carrier, d: &FormalDistribution) -> Result<FormalDistribution> {
    let mut terms = Vec::with_capacity(d.terms.len());
    for (c, g) in &d.terms {
        let mut tangents = g.tangents().to_vec();
        tangents.push(t.clone());
        terms.push((*c, Generator::assemble(g.point().clone(), tangents)));
    }
    FormalDistribution::from_terms(terms)
}

/// Comonoid counit e: δ_p ↦ 1, derivative generators ↦ 0, extended
/// linearly.
pub fn comonoid_counit(d: &FormalDistribution) -> f64 {
    d.terms
        .iter()
        .filter(|(_, g)| matches!(g, Generator::Delta(_)))
        .map(|(c, _)| c)
        .sum()
}

/// Comonoid comultiplication c: δ_p ↦ δ_p ⊗ δ_p, extended to derivative
/// generators by the Leibniz rule over the tangent slots.
pub fn comonoid_comult(d: &FormalDistribution) -> FormalTensor {
    let mut terms = Vec::new();
    for (c, g) in &d.terms {
        let ts = g.tangents();
        let k = ts.len();
        for mask in 0..(1u32 << k) {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (i, t) in ts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(t.clone());
                } else {
                    right.push(t.clone());
                }
            }
            terms.push((
                *c,
                Generator::assemble(g.point().clone(), left),
                Generator::assemble(g.point().clone(), right),
            ));
        }
    }
    FormalTensor::from_terms(terms)
}

/// Monoid unit ē: the delta at the zero point of the carrier.
pub fn monoid_unit(like: &Carrier) -> FormalDistribution {
    delta(like.zero_like())
}

/// Monoid multiplication c̄ (cocontraction): δ_p ⊗ δ_q ↦ δ_{p+q}, extended
/// to derivative generators by adding points and concatenating tangents.
pub fn monoid_mult(t: &FormalTensor) -> Result<FormalDistribution> {
    let mut terms = Vec::with_capacity(t.terms.len());
    for (c, g1, g2) in &t.terms {
        let point = g1.point().add(g2.point())?;
        let mut tangents = g1.tangents().to_vec();
        tangents.extend(g2.tangents().iter().cloned());
        terms.push((*c, Generator::assemble(point, tangents)));
    }
    FormalDistribution::from_terms(terms)
}

/// Convenience: c̄ applied to a ⊗ b.
pub fn convolve(a: &FormalDistribution, b: &FormalDistribution) -> Result<FormalDistribution> {
    monoid_mult(&FormalTensor::of(a, b))
}

/// Comonad counit ε^δ: δ_p ↦ p, ∂δ_p[t] ↦ t, higher derivative
/// generators ↦ 0, extended linearly. Returns the carrier-valued sum.
pub fn comonad_counit(d: &FormalDistribution) -> Result<Option<Carrier>> {
    let mut acc: Option<Carrier> = None;
    for (c, g) in &d.terms {
        let contribution = match g {
            Generator::Delta(p) => Some(p.clone()),
            Generator::DeltaDeriv(_, ts) if ts.len() == 1 => Some(ts[0].clone()),
            Generator::DeltaDeriv(..) => None,
        };
        if let Some(v) = contribution {
            let scaled = v.scale(*c)?;
            acc = Some(match acc {
                None => scaled,
                Some(a) => a.add(&scaled)?,
            });
        }
    }
    Ok(acc)
}

/// ε^{jδ} = ε^j ∘ ε^δ on spans over the jet carrier.
pub fn comonad_counit_jet(d: &FormalDistribution) -> Result<Option<Section>> {
    match comonad_counit(d)? {
        None => Ok(None),
        Some(Carrier::JetSection(js)) => Ok(Some(counit_section(&js)?)),
        Some(_) => Err(Error::ContextMismatch(
            "jet counit needs a span over the jet carrier".into(),
        )),
    }
}

/// Comonad comultiplication μ^δ: δ_p ↦ δ_{δ_p} on depth-1 spans, extended
/// to derivative generators by formally differentiating
/// h ↦ δ_{δ_{p + Σ h_i t_i}} in the tangent slots: the chain rule turns a
/// k-tangent generator into a sum over set partitions of the tangents.
pub fn comonad_comult(d: &FormalDistribution) -> Result<FormalDistribution> {
    let mut terms = Vec::new();
    for (c, g) in &d.terms {
        if matches!(g.point(), Carrier::Dist(_)) {
            return Err(Error::Invalid(
                "comultiplication only applies to depth-1 spans".into(),
            ));
        }
        let point = g.point().clone();
        let ts = g.tangents();
        if ts.is_empty() {
            terms.push((
                *c,
                Generator::Delta(Carrier::Dist(Box::new(delta(point)))),
            ));
            continue;
        }
        for partition in set_partitions(ts.len()) {
            let outer_tangents = partition
                .iter()
                .map(|block| {
                    let block_tangents: Vec<Carrier> =
                        block.iter().map(|&i| ts[i].clone()).collect();
                    Carrier::Dist(Box::new(FormalDistribution {
                        terms: vec![(
                            1.0,
                            Generator::assemble(point.clone(), block_tangents),
                        )],
                    }))
                })
                .collect::<Vec<_>>();
            terms.push((
                *c,
                Generator::assemble(
                    Carrier::Dist(Box::new(delta(point.clone()))),
                    outer_tangents,
                ),
            ));
        }
    }
    FormalDistribution::from_terms(terms)
}

/// All partitions of {0, …, k−1} into nonempty blocks.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for mut smaller in set_partitions(k - 1) {
        // element k-1 joins each existing block, or starts its own
        for i in 0..smaller.len() {
            let mut next = smaller.clone();
            next[i].push(k - 1);
            out.push(next);
        }
        smaller.push(vec![k - 1]);
        out.push(smaller);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::jet::Chart;

    fn sec(e: Expr) -> Section {
        Section::new(Chart::unit_box(1), vec![e]).unwrap()
    }

    fn car(e: Expr) -> Carrier {
        Carrier::Section(sec(e))
    }

    #[test]
    fn span_arithmetic_merges_like_terms() {
        let d = delta(car(Expr::base(0)));
        let two = d.add(&d).unwrap();
        assert_eq!(two.terms().len(), 1);
        assert_eq!(two.terms()[0].0, 2.0);
        let zero = d.add(&d.scale(-1.0)).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn tangent_order_is_immaterial() {
        let p = car(Expr::zero());
        let a = FormalDistribution::from_terms(vec![(
            1.0,
            Generator::assemble(p.clone(), vec![car(Expr::base(0)), car(Expr::one())]),
        )])
        .unwrap();
        let b = FormalDistribution::from_terms(vec![(
            1.0,
            Generator::assemble(p, vec![car(Expr::one()), car(Expr::base(0))]),
        )])
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn counit_extracts_points_and_single_tangents() {
        // ε(δ_s) = s
        let s = sec(Expr::base(0).pow(2));
        let back = comonad_counit(&delta(Carrier::Section(s.clone()))).unwrap();
        assert_eq!(back, Some(Carrier::Section(s.clone())));
        // linear rule: ε(d̄(t)) = t exactly
        let t = sec(Expr::base(0));
        let back = comonad_counit(&codereliction_delta(&t)).unwrap();
        assert_eq!(back, Some(Carrier::Section(t)));
        // two tangents die
        let twice = deriving(
            &car(Expr::one()),
            &deriving(&car(Expr::one()), &delta(Carrier::Section(s))).unwrap(),
        )
        .unwrap();
        assert_eq!(comonad_counit(&twice).unwrap(), None);
    }

    #[test]
    fn constant_rule_is_structural() {
        let t = sec(Expr::base(0));
        assert_eq!(comonoid_counit(&codereliction_delta(&t)), 0.0);
        assert_eq!(comonoid_counit(&delta(car(Expr::one()))), 1.0);
    }

    #[test]
    fn cocontraction_adds_points() {
        // c̄(δ_s ⊗ δ_t) = δ_{s+t}
        let s = sec(Expr::base(0));
        let t = sec(Expr::one());
        let st = sec((Expr::base(0) + Expr::one()).canon());
        let out = convolve(
            &delta(Carrier::Section(s)),
            &delta(Carrier::Section(t)),
        )
        .unwrap();
        assert_eq!(out, delta(Carrier::Section(st)));
    }

    #[test]
    fn cocontraction_on_derivative_shifts_base_point() {
        // c̄(∂δ_0[t] ⊗ δ_u) = ∂δ_u[t]
        let t = sec(Expr::base(0));
        let u = sec(Expr::one());
        let lhs = convolve(&codereliction_delta(&t), &delta(Carrier::Section(u.clone())))
            .unwrap();
        let expect = FormalDistribution::from_terms(vec![(
            1.0,
            Generator::assemble(
                Carrier::Section(u),
                vec![Carrier::Section(t)],
            ),
        )])
        .unwrap();
        assert_eq!(lhs, expect);
    }

    #[test]
    fn product_rule_shape() {
        // c(d̄ t) = ∂δ_0[t] ⊗ δ_0 + δ_0 ⊗ ∂δ_0[t]
        let t = sec(Expr::base(0));
        let lhs = comonoid_comult(&codereliction_delta(&t));
        let zero = Carrier::Section(Section::zero(Chart::unit_box(1), 1));
        let dbar = Generator::assemble(zero.clone(), vec![Carrier::Section(t)]);
        let d0 = Generator::Delta(zero);
        let rhs = FormalTensor::from_terms(vec![
            (1.0, dbar.clone(), d0.clone()),
            (1.0, d0, dbar),
        ]);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn deriving_appends_tangent_slots() {
        let s = sec(Expr::base(0).pow(2));
        let t = car(Expr::one());
        let first = deriving(&t, &delta(Carrier::Section(s.clone()))).unwrap();
        assert_eq!(
            first.terms()[0].1,
            Generator::assemble(Carrier::Section(s), vec![t.clone()])
        );
        let second = deriving(&t, &first).unwrap();
        assert_eq!(second.terms()[0].1.tangents().len(), 2);
    }

    #[test]
    fn comultiplication_on_single_tangent() {
        // μ(∂δ_s[t]) = ∂δ_{δ_s}[δ'_s t]
        let s = Carrier::Section(sec(Expr::base(0)));
        let t = car(Expr::one());
        let d = deriving(&t, &delta(s.clone())).unwrap();
        let nested = comonad_comult(&d).unwrap();
        assert_eq!(nested.terms().len(), 1);
        let g = &nested.terms()[0].1;
        assert_eq!(g.point(), &Carrier::Dist(Box::new(delta(s.clone()))));
        assert_eq!(
            g.tangents(),
            &[Carrier::Dist(Box::new(deriving(&t, &delta(s)).unwrap()))]
        );
    }

    #[test]
    fn comultiplication_two_tangents_partitions() {
        // two tangents: one term per set partition of {1,2}
        let s = Carrier::Section(sec(Expr::base(0)));
        let t1 = car(Expr::one());
        let t2 = car(Expr::base(0));
        let d = deriving(&t2, &deriving(&t1, &delta(s.clone())).unwrap()).unwrap();
        let nested = comonad_comult(&d).unwrap();
        assert_eq!(nested.terms().len(), 2);
    }

    #[test]
    fn comultiplication_rejects_depth_two() {
        let s = Carrier::Section(sec(Expr::base(0)));
        let nested = comonad_comult(&delta(s)).unwrap();
        assert!(comonad_comult(&nested).is_err());
    }

    #[test]
    fn counit_laws_of_the_bialgebra() {
        // (e ⊗ id) c = id = (id ⊗ e) c under pairing shape: check on spans
        let s = Carrier::Section(sec(Expr::base(0)));
        let t = car(Expr::one());
        let d = deriving(&t, &delta(s)).unwrap();
        let split = comonoid_comult(&d);
        // contract the left slot with e
        let mut left_contracted = Vec::new();
        for (c, g1, g2) in split.terms() {
            if matches!(g1, Generator::Delta(_)) {
                left_contracted.push((*c, g2.clone()));
            }
        }
        let back = FormalDistribution::from_terms(left_contracted).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn set_partitions_count_is_bell() {
        assert_eq!(set_partitions(1).len(), 1);
        assert_eq!(set_partitions(2).len(), 2);
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
    }
}
