//! Cross-module law suites: jet-comonad laws, Kleisli functoriality, and
//! the direct-sum storage isomorphism, each runnable against seeded random
//! panels. The codereliction suites live in [`crate::functional`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::expr::equiv::{equivalent, EquivOptions};
use crate::expr::{differentiate, Expr, JetVar, MultiIndex, Var};
use crate::functional::{LawEntry, LawReport};
use crate::diffop::{apply, compose, LinDiffOp};
use crate::jet::{
    comultiply_point, comultiply_section, counit_section, nested_context,
    project_section, prolong, seely_merge, seely_split, Chart, JetContext, JetPoint, Section,
};
use crate::panel::{random_jet_point, random_operator, random_section};

fn entry(rule: &str, flavor: &str, failures: usize, cases: usize) -> LawEntry {
    LawEntry {
        rule: rule.into(),
        flavor: flavor.into(),
        max_discrepancy: failures as f64,
        tol: 0.0,
        pass: failures == 0,
        cases,
    }
}

/// Counit and coassociativity laws of the jet comonad at finite
/// truncation, over random polynomial/trig sections and random jet points,
/// for n ≤ 2, m ≤ 2 and all order splits with r+q+p ≤ 3.
pub fn jet_comonad_suite(seed: u64, section_cases: usize) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = EquivOptions::with_seed(seed ^ 0x9e37);

    let mut counit_failures = 0usize;
    let mut compat_failures = 0usize;
    let mut counit_cases = 0usize;
    let mut compat_cases = 0usize;

    for case in 0..section_cases {
        let n = 1 + case % 2;
        let m = 1 + (case / 2) % 2;
        let chart = Chart::unit_box(n);
        let s = random_section(&chart, m, &mut rng);

        for (r, q) in [(0usize, 1usize), (1, 1), (2, 1), (1, 2), (0, 3), (3, 0)] {
            let js = prolong(&s, r + q);
            let nested = comultiply_section(&js, r, q)?;
            let inner = js.context.at_order(r);

            // outer counit: order-0 slots are the order-r projection
            let projected_r = project_section(&js, r)?;
            for jv in inner.jet_coords() {
                let flat = inner.flat_index(&jv)?;
                let got = nested
                    .get(&JetVar::new(flat, MultiIndex::zero(n)))
                    .expect("outer order-0 slot");
                counit_cases += 1;
                if got != projected_r.get(&jv).expect("projected slot") {
                    counit_failures += 1;
                }
            }

            // inner counit: fiber order-0 slots across outer indices are
            // the order-q projection
            let projected_q = project_section(&js, q)?;
            for k in 0..m {
                let flat = inner.flat_index(&JetVar::new(k, MultiIndex::zero(n)))?;
                for outer_idx in MultiIndex::all_up_to(n, q) {
                    let got = nested
                        .get(&JetVar::new(flat, outer_idx.clone()))
                        .expect("outer slot");
                    counit_cases += 1;
                    if got != projected_q.get(&JetVar::new(k, outer_idx)).expect("slot") {
                        counit_failures += 1;
                    }
                }
            }
        }

        // prolongation compatibility: d/dx_i of slot I is slot I + e_i
        let js = prolong(&s, 2);
        for (jv, e) in &js.assignment {
            if jv.index.order() >= 2 {
                continue;
            }
            for axis in 0..n {
                let lhs = differentiate(e, &Var::Base(axis));
                let rhs = js.get(&JetVar::new(jv.fiber, jv.index.bump(axis))).unwrap();
                compat_cases += 1;
                if !equivalent(&lhs, rhs, &opts)? {
                    compat_failures += 1;
                }
            }
        }
    }

    // coassociativity as an exhaustive index identity on random jet points
    let mut coassoc_failures = 0usize;
    let mut coassoc_cases = 0usize;
    for case in 0..section_cases {
        let n = 1 + case % 2;
        let m = 1 + (case / 2) % 2;
        let context = JetContext::new(m, 3, Chart::unit_box(n))?;
        let point = random_jet_point(&context, &mut rng);
        for (r, q, w) in [(1usize, 1usize, 1usize), (0, 2, 1), (2, 0, 1), (1, 2, 0)] {
            coassoc_cases += 1;
            if !coassociativity_holds(&point, r, q, w)? {
                coassoc_failures += 1;
            }
        }
    }

    Ok(LawReport {
        entries: vec![
            entry("counit", "jet", counit_failures, counit_cases),
            entry("coassociativity", "jet", coassoc_failures, coassoc_cases),
            entry(
                "prolongation-compatibility",
                "jet",
                compat_failures,
                compat_cases,
            ),
        ],
    })
}

/// μ^{r,q} then the fiberwise relabeling agrees with μ^{r+q,w} then the
/// outer relabeling, slot for slot.
fn coassociativity_holds(point: &JetPoint, r: usize, q: usize, w: usize) -> Result<bool> {
    let n = point.context.n();

    // route 1: split off the outer w jets first, then relabel the fiber
    // (a J^{r+q} coordinate) through μ^{r,q}
    let outer_first = comultiply_point(point, r + q, w)?;
    let inner_rq = point.context.at_order(r + q);
    let inner_r = point.context.at_order(r);
    let mid = nested_context(&point.context, r, q);

    // route 2: nested comultiplications
    let via_nested = comultiply_point(&comultiply_point(point, r, q + w)?, q, w)?;

    for k in 0..point.context.m {
        for i_r in MultiIndex::all_up_to(n, r) {
            let flat_r = inner_r.flat_index(&JetVar::new(k, i_r.clone()))?;
            for j_q in MultiIndex::all_up_to(n, q) {
                let mid_flat = mid.flat_index(&JetVar::new(flat_r, j_q.clone()))?;
                let rq_flat =
                    inner_rq.flat_index(&JetVar::new(k, i_r.add(&j_q)))?;
                for j_w in MultiIndex::all_up_to(n, w) {
                    let a = outer_first.values[&JetVar::new(rq_flat, j_w.clone())];
                    let b = via_nested.values[&JetVar::new(mid_flat, j_w.clone())];
                    if a != b {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Kleisli functoriality, associativity, linearity of application, the
/// order-additivity bound, and the exact commutator [d/dx, x·] = id.
pub fn kleisli_suite(seed: u64, pair_cases: usize) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = EquivOptions::with_seed(seed ^ 0x51ab);

    let mut functorial_failures = 0usize;
    let mut order_failures = 0usize;
    for case in 0..pair_cases {
        let n = 1 + case % 2;
        let chart = Chart::unit_box(n);
        let m_mid = 1 + rng.gen_range(0..2usize);
        let f = random_operator(&chart, 1, m_mid, 2, &mut rng);
        let g = random_operator(&chart, m_mid, 1, 2, &mut rng);
        let s = random_section(&chart, 1, &mut rng);

        let composed = compose(&g, &f)?;
        if composed.order() > f.order() + g.order() {
            order_failures += 1;
        }
        let lhs = apply(&composed, &s)?;
        let rhs = apply(&g, &apply(&f, &s)?)?;
        for (a, b) in lhs.components.iter().zip(&rhs.components) {
            if !equivalent(a, b, &opts)? {
                functorial_failures += 1;
            }
        }
    }

    let mut assoc_failures = 0usize;
    let assoc_cases = (pair_cases / 4).max(4);
    for case in 0..assoc_cases {
        let n = 1 + case % 2;
        let chart = Chart::unit_box(n);
        let f = random_operator(&chart, 1, 1, 1, &mut rng);
        let g = random_operator(&chart, 1, 1, 1, &mut rng);
        let h = random_operator(&chart, 1, 1, 1, &mut rng);
        let left = compose(&h, &compose(&g, &f)?)?;
        let right = compose(&compose(&h, &g)?, &f)?;
        let mut keys: std::collections::BTreeSet<_> = left.coeffs.keys().cloned().collect();
        keys.extend(right.coeffs.keys().cloned());
        for key in keys {
            let a = left.coeffs.get(&key).cloned().unwrap_or_else(Expr::zero);
            let b = right.coeffs.get(&key).cloned().unwrap_or_else(Expr::zero);
            if !equivalent(&a, &b, &opts)? {
                assoc_failures += 1;
            }
        }
    }

    let mut linear_failures = 0usize;
    let linear_cases = (pair_cases / 4).max(4);
    for case in 0..linear_cases {
        let n = 1 + case % 2;
        let chart = Chart::unit_box(n);
        let op = random_operator(&chart, 1, 1, 2, &mut rng);
        let s = random_section(&chart, 1, &mut rng);
        let t = random_section(&chart, 1, &mut rng);
        let combo = s.combine(&Expr::rational(3, 2), &t, &Expr::int(-2))?;
        let lhs = apply(&op, &combo)?;
        let rhs = apply(&op, &s)?
            .combine(&Expr::rational(3, 2), &apply(&op, &t)?, &Expr::int(-2))?;
        if !equivalent(&lhs.components[0], &rhs.components[0], &opts)? {
            linear_failures += 1;
        }
    }

    // [d/dx, x·] = 1, exactly at the coefficient level
    let chart = Chart::unit_box(1);
    let d = LinDiffOp::partial(chart.clone(), 0);
    let x = LinDiffOp::multiplication(chart.clone(), Expr::base(0))?;
    let comm = compose(&d, &x)?.sub(&compose(&x, &d)?)?;
    let comm_failures = usize::from(comm != LinDiffOp::identity(chart, 1));

    Ok(LawReport {
        entries: vec![
            entry("functoriality", "kleisli", functorial_failures, pair_cases),
            entry("associativity", "kleisli", assoc_failures, assoc_cases),
            entry("linearity", "kleisli", linear_failures, linear_cases),
            entry("order-bound", "kleisli", order_failures, pair_cases),
            entry("commutator-identity", "kleisli", comm_failures, 1),
        ],
    })
}

/// The direct-sum storage isomorphism for jets: split/merge round-trips
/// exactly, prolongation is componentwise, and the rank-0 bundle prolongs
/// to the empty assignment.
pub fn seely_jet_suite(seed: u64, cases: usize) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut roundtrip_failures = 0usize;
    let mut componentwise_failures = 0usize;
    for case in 0..cases {
        let n = 1 + case % 2;
        let chart = Chart::unit_box(n);
        let m1 = 1 + rng.gen_range(0..2usize);
        let m2 = 1 + rng.gen_range(0..2usize);
        let r = rng.gen_range(0..3usize);
        let s1 = random_section(&chart, m1, &mut rng);
        let s2 = random_section(&chart, m2, &mut rng);
        let mut merged_components = s1.components.clone();
        merged_components.extend(s2.components.clone());
        let merged = Section::new(chart.clone(), merged_components)?;

        let js = prolong(&merged, r);
        let (left, right) = seely_split(&js, m1)?;
        if seely_merge(&left, &right)? != js {
            roundtrip_failures += 1;
        }
        if left != prolong(&s1, r) || right != prolong(&s2, r) {
            componentwise_failures += 1;
        }
        if counit_section(&seely_merge(&left, &right)?)? != merged {
            roundtrip_failures += 1;
        }
    }

    // the zero-rank split: splitting at 0 leaves an empty left assignment
    let chart = Chart::unit_box(1);
    let s = random_section(&chart, 1, &mut rng);
    let js = prolong(&s, 2);
    let (empty, full) = seely_split(&js, 0)?;
    let empty_failures =
        usize::from(!(empty.assignment.is_empty() && full == js));

    Ok(LawReport {
        entries: vec![
            entry("split-merge-roundtrip", "jet-sum", roundtrip_failures, cases),
            entry(
                "prolong-componentwise",
                "jet-sum",
                componentwise_failures,
                cases,
            ),
            entry("zero-rank", "jet-sum", empty_failures, 1),
        ],
    })
}
