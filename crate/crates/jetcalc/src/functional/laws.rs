//! Executable law suites: the codereliction rules (constant, linear,
//! product, chain — the last via both the lifted-functional pairing route
//! and the numeric composite-functional route), naturality, and the
//! composite-comonad coherence checks.

use crate::error::{Error, Result};
use crate::expr::{differentiate, evaluate, Assignment, Expr, Var};
use crate::jet::{prolong, Section};

use super::smooth::{
    gateaux, pair, pair_tensor, SmoothFunctional, COMPOSITE_VAR,
};
use super::{
    codereliction_delta, codereliction_jet, comonad_comult, comonad_counit,
    comonad_counit_jet, comonoid_comult, comonoid_counit, convolve, delta, monoid_mult,
    monoid_unit, Carrier, FormalDistribution, FormalTensor, Generator,
};

/// Which codereliction is under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoderelictionFlavor {
    Delta,
    JetDelta,
}

impl CoderelictionFlavor {
    pub fn name(self) -> &'static str {
        match self {
            CoderelictionFlavor::Delta => "delta",
            CoderelictionFlavor::JetDelta => "jet-delta",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LawEntry {
    pub rule: String,
    pub flavor: String,
    pub max_discrepancy: f64,
    pub tol: f64,
    pub pass: bool,
    pub cases: usize,
}

impl LawEntry {
    fn new(rule: &str, flavor: &str, max_discrepancy: f64, tol: f64, cases: usize) -> LawEntry {
        LawEntry {
            rule: rule.into(),
            flavor: flavor.into(),
            max_discrepancy,
            tol,
            pass: max_discrepancy <= tol,
            cases,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub entries: Vec<LawEntry>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_discrepancy)
            .fold(0.0, f64::max)
    }
}

/// Default tolerances: structural rules at 1e-10/1e-8 and the chain rule
/// at 1e-4 relative.
pub const CONSTANT_RULE_TOL: f64 = 1e-10;
pub const PRODUCT_RULE_TOL: f64 = 1e-8;
pub const NATURALITY_TOL: f64 = 1e-8;
pub const CHAIN_RULE_TOL: f64 = 1e-4;

fn lift(flavor: CoderelictionFlavor, t: &Section, order: usize) -> FormalDistribution {
    match flavor {
        CoderelictionFlavor::Delta => codereliction_delta(t),
        CoderelictionFlavor::JetDelta => codereliction_jet(t, order),
    }
}

fn point_carrier(flavor: CoderelictionFlavor, s: &Section, order: usize) -> Carrier {
    match flavor {
        CoderelictionFlavor::Delta => Carrier::Section(s.clone()),
        CoderelictionFlavor::JetDelta => Carrier::JetSection(prolong(s, order)),
    }
}

/// Run the codereliction rule suite for one flavor against panels of test
/// sections and local functionals.
pub fn codereliction_laws(
    flavor: CoderelictionFlavor,
    sections: &[Section],
    functionals: &[SmoothFunctional],
    params: &Assignment,
) -> Result<LawReport> {
    let mut report = LawReport::default();
    let order = functionals
        .iter()
        .filter_map(|f| f.local_order())
        .max()
        .unwrap_or(0);

    // (Constant rule) e ∘ d̄ = 0
    let mut worst = 0.0f64;
    for t in sections {
        worst = worst.max(comonoid_counit(&lift(flavor, t, order)).abs());
    }
    report.entries.push(LawEntry::new(
        "constant",
        flavor.name(),
        worst,
        CONSTANT_RULE_TOL,
        sections.len(),
    ));

    // (Linear rule) ε ∘ d̄ = id, exactly as spans
    let mut worst = 0.0f64;
    for t in sections {
        let back = match flavor {
            CoderelictionFlavor::Delta => match comonad_counit(&lift(flavor, t, order))? {
                Some(Carrier::Section(s)) => Some(s),
                _ => None,
            },
            CoderelictionFlavor::JetDelta => comonad_counit_jet(&lift(flavor, t, order))?,
        };
        let exact = back.as_ref() == Some(t);
        if !exact {
            worst = f64::INFINITY;
        }
    }
    report.entries.push(LawEntry::new(
        "linear",
        flavor.name(),
        worst,
        0.0,
        sections.len(),
    ));

    // (Product rule) c ∘ d̄ = d̄ ⊗ ē + ē ⊗ d̄, compared by pairing both
    // sides against pairs of panel functionals
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for (i, t) in sections.iter().enumerate() {
        let dbar = lift(flavor, t, order);
        let unit = monoid_unit(dbar.terms()[0].1.point());
        let lhs = comonoid_comult(&dbar);
        let mut rhs_terms = FormalTensor::of(&dbar, &unit).terms().to_vec();
        rhs_terms.extend(FormalTensor::of(&unit, &dbar).terms().to_vec());
        let rhs = FormalTensor::from_terms(rhs_terms);
        let f = &functionals[i % functionals.len()];
        let g = &functionals[(i + 1) % functionals.len()];
        let a = pair_tensor(&lhs, f, g, params)?;
        let b = pair_tensor(&rhs, f, g, params)?;
        worst = worst.max((a - b).abs());
        cases += 1;
    }
    report.entries.push(LawEntry::new(
        "product",
        flavor.name(),
        worst,
        PRODUCT_RULE_TOL,
        cases,
    ));

    // (Chain rule), categorical route: both composite maps A ⊗ !A → !!A
    // evaluated on t ⊗ δ_s and paired against lifted functionals
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for (i, t) in sections.iter().enumerate() {
        let s = &sections[(i + 1) % sections.len()];
        let dbar_t = lift(flavor, t, order);
        let delta_s = delta(point_carrier(flavor, s, order));

        // left side: μ ∘ c̄ ∘ (d̄ ⊗ id)
        let lhs = comonad_comult(&convolve(&dbar_t, &delta_s)?)?;

        // right side: c̄_{!A} ∘ (d̄_{!A} ⊗ μ) ∘ (c̄ ⊗ id) ∘ (d̄ ⊗ c)
        let mut rhs = FormalDistribution::zero();
        for (c, g1, g2) in comonoid_comult(&delta_s).terms() {
            let leg1 = convolve(
                &dbar_t,
                &FormalDistribution::from_terms(vec![(1.0, g1.clone())])?,
            )?;
            let dbar_leg1 = FormalDistribution::from_terms(vec![(
                1.0,
                Generator::DeltaDeriv(
                    Carrier::Dist(Box::new(FormalDistribution::zero())),
                    vec![Carrier::Dist(Box::new(leg1))],
                ),
            )])?;
            let mu_leg2 =
                comonad_comult(&FormalDistribution::from_terms(vec![(1.0, g2.clone())])?)?;
            rhs = rhs.add(&monoid_mult(&FormalTensor::of(&dbar_leg1, &mu_leg2))?.scale(*c))?;
        }

        let f = &functionals[i % functionals.len()];
        let a = pair(&lhs, f, params)?;
        let b = pair(&rhs, f, params)?;
        worst = worst.max((a - b).abs() / (1.0 + a.abs() + b.abs()));
        cases += 1;
    }
    report.entries.push(LawEntry::new(
        "chain-lifted",
        flavor.name(),
        worst,
        CHAIN_RULE_TOL,
        cases,
    ));

    // (Chain rule), numeric route: d(g ∘ F)(s; t) = g'(F(s)) · dF(s; t)
    let outers = [
        Expr::param(COMPOSITE_VAR).pow(2),
        Expr::param(COMPOSITE_VAR).pow(3),
        Expr::apply(crate::expr::Func::Sin, Expr::param(COMPOSITE_VAR)),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for (i, f) in functionals.iter().enumerate() {
        let s = &sections[i % sections.len()];
        let t = &sections[(i + 2) % sections.len()];
        let outer = &outers[i % outers.len()];
        let composite = SmoothFunctional::composite(outer.clone(), f.clone());
        let lhs = gateaux(&composite, s, t, params)?;
        let fs = f.eval_section(s, params)?;
        let dfs = gateaux(f, s, t, params)?;
        let gprime = {
            let d = differentiate(outer, &Var::Param(COMPOSITE_VAR.into()));
            let mut asg = params.clone();
            asg.set_param(COMPOSITE_VAR, fs);
            evaluate(&d, &asg)?
        };
        let rhs = gprime * dfs;
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs()));
        cases += 1;
    }
    report.entries.push(LawEntry::new(
        "chain-numeric",
        flavor.name(),
        worst,
        CHAIN_RULE_TOL,
        cases,
    ));

    // naturality of d̄ for order-0 module maps: push d̄(t) along s ↦ a·s
    // equals d̄(a·t)
    if flavor == CoderelictionFlavor::Delta {
        let mut worst = 0.0f64;
        let mut cases = 0usize;
        for (i, t) in sections.iter().enumerate() {
            let factor = (Expr::base(0) + Expr::int(2)).canon();
            let push = lift(flavor, t, order).pushforward(&|c: &Carrier| match c {
                Carrier::Section(s) => {
                    let scaled = s
                        .components
                        .iter()
                        .map(|e| (factor.clone() * e.clone()).canon())
                        .collect();
                    Ok(Carrier::Section(Section::new(s.chart.clone(), scaled)?))
                }
                _ => Err(Error::ContextMismatch("expected section carrier".into())),
            })?;
            let scaled_t = Section::new(
                t.chart.clone(),
                t.components
                    .iter()
                    .map(|e| (factor.clone() * e.clone()).canon())
                    .collect(),
            )?;
            let direct = codereliction_delta(&scaled_t);
            let f = &functionals[i % functionals.len()];
            let a = pair(&push, f, params)?;
            let b = pair(&direct, f, params)?;
            worst = worst.max((a - b).abs());
            cases += 1;
        }
        report.entries.push(LawEntry::new(
            "naturality",
            flavor.name(),
            worst,
            NATURALITY_TOL,
            cases,
        ));
    }

    Ok(report)
}

/// Coherence of the composite comonad: the two readings of a local
/// functional agree on delta generators, the composite counit recovers the
/// section, and deltas over a product bundle factor against block-product
/// functionals.
pub fn composite_comonad_check(
    sections: &[Section],
    functionals: &[SmoothFunctional],
    params: &Assignment,
) -> Result<LawReport> {
    let mut report = LawReport::default();

    // ⟨δ_{j(s)}, F⟩ = F̂(s): pairing the jet delta against the functional
    // read on jets equals the smooth-operator reading on sections
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for (i, s) in sections.iter().enumerate() {
        let f = &functionals[i % functionals.len()];
        let Some(r) = f.local_order() else { continue };
        let via_jet = pair(
            &delta(Carrier::JetSection(prolong(s, r))),
            f,
            params,
        )?;
        let via_section = f.eval_section(s, params)?;
        worst = worst.max((via_jet - via_section).abs() / (1.0 + via_jet.abs()));
        cases += 1;
    }
    report
        .entries
        .push(LawEntry::new("two-readings", "jet-delta", worst, 1e-12, cases));

    // ε^{jδ} = ε^j ∘ ε^δ on delta-of-jet generators, exactly
    let mut worst = 0.0f64;
    for s in sections {
        let back = comonad_counit_jet(&delta(Carrier::JetSection(prolong(s, 2))))?;
        if back.as_ref() != Some(s) {
            worst = f64::INFINITY;
        }
    }
    report.entries.push(LawEntry::new(
        "counit-composite",
        "jet-delta",
        worst,
        0.0,
        sections.len(),
    ));

    // Seely for the distributional comonad: δ_{(s,s')} against a block
    // product functional factors as the product of pairings
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for (i, s) in sections.iter().enumerate() {
        let s2 = &sections[(i + 1) % sections.len()];
        let f = &functionals[i % functionals.len()];
        let g = &functionals[(i + 1) % functionals.len()];
        let mut merged_components = s.components.clone();
        merged_components.extend(s2.components.clone());
        let merged = Section::new(s.chart.clone(), merged_components)?;
        let product = SmoothFunctional::BlockProduct {
            split: s.m(),
            left: Box::new(f.clone()),
            right: Box::new(g.clone()),
        };
        let joint = pair(&delta(Carrier::Section(merged.clone())), &product, params)?;
        let separate = f.eval_section(s, params)? * g.eval_section(s2, params)?;
        worst = worst.max((joint - separate).abs());

        // the splitting map δ_{(s,s')} ↦ δ_s ⊗ δ_{s'} gives the same value
        let split = seely_delta_split(&delta(Carrier::Section(merged)), s.m())?;
        let via_split = pair_tensor(&split, f, g, params)?;
        worst = worst.max((via_split - separate).abs());
        cases += 1;
    }
    report
        .entries
        .push(LawEntry::new("seely-delta", "delta", worst, PRODUCT_RULE_TOL, cases));

    Ok(report)
}

/// The storage isomorphism for the distributional comonad on a product
/// bundle: δ_{(s,s')} ↦ δ_s ⊗ δ_{s'}, extended to derivative generators by
/// the Leibniz rule over tangent slots.
pub fn seely_delta_split(d: &FormalDistribution, m1: usize) -> Result<FormalTensor> {
    let split_section = |s: &Section| -> Result<(Section, Section)> {
        if m1 >= s.m() {
            return Err(Error::RankMismatch {
                expected: m1 + 1,
                got: s.m(),
            });
        }
        Ok((
            Section::new(s.chart.clone(), s.components[..m1].to_vec())?,
            Section::new(s.chart.clone(), s.components[m1..].to_vec())?,
        ))
    };
    let mut terms = Vec::new();
    for (c, g) in d.terms() {
        let (pl, pr) = match g.point() {
            Carrier::Section(s) => split_section(s)?,
            _ => {
                return Err(Error::ContextMismatch(
                    "splitting is defined on section carriers".into(),
                ));
            }
        };
        let tangent_halves: Vec<(Section, Section)> = g
            .tangents()
            .iter()
            .map(|t| match t {
                Carrier::Section(s) => split_section(s),
                _ => Err(Error::ContextMismatch(
                    "splitting is defined on section carriers".into(),
                )),
            })
            .collect::<Result<_>>()?;
        let k = tangent_halves.len();
        for mask in 0..(1u32 << k) {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (i, (tl, tr)) in tangent_halves.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(Carrier::Section(tl.clone()));
                } else {
                    right.push(Carrier::Section(tr.clone()));
                }
            }
            terms.push((
                *c,
                Generator::assemble(Carrier::Section(pl.clone()), left),
                Generator::assemble(Carrier::Section(pr.clone()), right),
            ));
        }
    }
    Ok(FormalTensor::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Chart;
    use crate::numeric::{Axis, Grid};
    use crate::panel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick_panel() -> (Vec<Section>, Vec<SmoothFunctional>) {
        let chart = Chart::unit_box(1);
        let grid = Grid::new(vec![Axis {
            lo: 0.0,
            hi: 1.0,
            count: 201,
        }])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let sections: Vec<Section> = (0..6)
            .map(|_| panel::random_section(&chart, 1, &mut rng))
            .collect();
        let functionals: Vec<SmoothFunctional> = (0..6)
            .map(|_| {
                SmoothFunctional::local(
                    panel::random_polynomial_lagrangian(&chart, 1, &mut rng),
                    grid.clone(),
                )
            })
            .collect();
        (sections, functionals)
    }

    #[test]
    fn delta_rules_hold_on_a_small_panel() {
        let (sections, functionals) = quick_panel();
        let report = codereliction_laws(
            CoderelictionFlavor::Delta,
            &sections,
            &functionals,
            &Assignment::new(),
        )
        .unwrap();
        for entry in &report.entries {
            assert!(
                entry.pass,
                "{} ({}) failed with discrepancy {}",
                entry.rule, entry.flavor, entry.max_discrepancy
            );
        }
    }

    #[test]
    fn jet_delta_rules_hold_on_a_small_panel() {
        let (sections, functionals) = quick_panel();
        let report = codereliction_laws(
            CoderelictionFlavor::JetDelta,
            &sections,
            &functionals,
            &Assignment::new(),
        )
        .unwrap();
        for entry in &report.entries {
            assert!(
                entry.pass,
                "{} ({}) failed with discrepancy {}",
                entry.rule, entry.flavor, entry.max_discrepancy
            );
        }
    }

    #[test]
    fn composite_comonad_coherence() {
        let (sections, functionals) = quick_panel();
        let report =
            composite_comonad_check(&sections, &functionals, &Assignment::new()).unwrap();
        for entry in &report.entries {
            assert!(
                entry.pass,
                "{} failed with discrepancy {}",
                entry.rule, entry.max_discrepancy
            );
        }
    }
}
