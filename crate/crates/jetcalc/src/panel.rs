//! Built-in section constructors and randomized test panels.
//!
//! Bump directions are polynomial pseudo-bumps: they vanish together with
//! their first `smoothness − 1` derivatives on the chart boundary, which
//! is exactly what kills the boundary terms in the variational identity.
//! True flat bumps are outside the expression language (no piecewise
//! functions), and every integral here runs over the same chart box, so
//! vanishing to finite order at the boundary is enough.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::LinDiffOp;
use crate::error::{Error, Result};
use crate::expr::{Expr, Func, MultiIndex};
use crate::functional::Lagrangian;
use crate::jet::{Chart, JetContext, JetPoint, Section};

/// Π_i ((x_i − lo_i)(hi_i − x_i))^p normalized to 1 at the chart center,
/// in every fiber component.
pub fn bump_section(chart: &Chart, m: usize, smoothness: u32) -> Result<Section> {
    let center: Vec<f64> = chart.0.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
    let radius: Vec<f64> = chart.0.iter().map(|&(lo, hi)| 0.5 * (hi - lo)).collect();
    bump_section_at(chart, m, smoothness, &center, &radius)
}

/// Bump with explicit center and per-axis radius:
/// Π_i (1 − ((x_i − c_i)/ρ_i)²)^p. Only meaningful on the box
/// [c − ρ, c + ρ]; integration grids must stay inside it.
pub fn bump_section_at(
    chart: &Chart,
    m: usize,
    smoothness: u32,
    center: &[f64],
    radius: &[f64],
) -> Result<Section> {
    if center.len() != chart.dim() || radius.len() != chart.dim() {
        return Err(Error::Shape("bump center/radius dimension mismatch".into()));
    }
    if smoothness == 0 {
        return Err(Error::Invalid("bump smoothness must be at least 1".into()));
    }
    let mut factors = Vec::with_capacity(chart.dim());
    for (i, (&c, &rho)) in center.iter().zip(radius).enumerate() {
        if rho <= 0.0 {
            return Err(Error::Invalid("bump radius must be positive".into()));
        }
        let shifted = (Expr::base(i) - Expr::from_f64(c)?) * Expr::from_f64(1.0 / rho)?;
        let factor = (Expr::one() - shifted.canon().pow(2)).canon();
        factors.push(factor.pow(smoothness as i32));
    }
    let component = Expr::Product(factors).canon();
    Section::new(chart.clone(), vec![component; m])
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let numer = rng.gen_range(-4i64..=4);
    let denom = [1i64, 2, 4][rng.gen_range(0..3)];
    BigRational::new(numer.into(), denom.into())
}

fn nonzero_small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let c = small_rational(rng);
        if c != BigRational::from_integer(0.into()) {
            return c;
        }
    }
}

/// Random sparse polynomial in the base variables, degree ≤ `max_degree`.
pub fn random_polynomial(n: usize, max_degree: usize, rng: &mut ChaCha8Rng) -> Expr {
    let monomials = MultiIndex::all_up_to(n, max_degree);
    let mut terms = Vec::new();
    for mono in &monomials {
        if rng.gen_range(0..3) != 0 {
            continue;
        }
        let mut factors = vec![Expr::Const(small_rational(rng))];
        for (axis, &e) in mono.exponents().iter().enumerate() {
            if e > 0 {
                factors.push(Expr::base(axis).pow(e as i32));
            }
        }
        terms.push(Expr::Product(factors));
    }
    if terms.is_empty() {
        terms.push(Expr::Const(nonzero_small_rational(rng)));
    }
    Expr::Sum(terms).canon()
}

/// Random polynomial or polynomial + trig section.
pub fn random_section(chart: &Chart, m: usize, rng: &mut ChaCha8Rng) -> Section {
    let n = chart.dim();
    let components = (0..m)
        .map(|_| {
            let poly = random_polynomial(n, 3, rng);
            if rng.gen_bool(0.5) {
                let axis = rng.gen_range(0..n);
                let f = if rng.gen_bool(0.5) { Func::Sin } else { Func::Cos };
                (poly
                    + Expr::Const(nonzero_small_rational(rng))
                        * Expr::apply(f, Expr::base(axis)))
                .canon()
            } else {
                poly
            }
        })
        .collect();
    Section::new(chart.clone(), components).expect("generated sections are well-formed")
}

/// Random linear operator of order ≤ `max_order` with sparse polynomial
/// coefficients; at least one entry is guaranteed.
pub fn random_operator(
    chart: &Chart,
    m: usize,
    m_out: usize,
    max_order: usize,
    rng: &mut ChaCha8Rng,
) -> LinDiffOp {
    let n = chart.dim();
    let mut coeffs = std::collections::BTreeMap::new();
    for j in 0..m_out {
        for k in 0..m {
            for alpha in MultiIndex::all_up_to(n, max_order) {
                if rng.gen_range(0..3) != 0 {
                    continue;
                }
                let coeff = if rng.gen_bool(0.5) {
                    Expr::Const(nonzero_small_rational(rng))
                } else {
                    random_polynomial(n, 2, rng)
                };
                if coeff.is_zero() {
                    continue;
                }
                coeffs.insert((j, k, alpha), coeff);
            }
        }
    }
    if coeffs.is_empty() {
        coeffs.insert(
            (0, 0, MultiIndex::unit(n, rng.gen_range(0..n))),
            Expr::Const(nonzero_small_rational(rng)),
        );
    }
    LinDiffOp::new(chart.clone(), m, m_out, coeffs).expect("generated coefficients are valid")
}

/// Random jet point with uniform coordinates in [-1, 1].
pub fn random_jet_point(context: &JetContext, rng: &mut ChaCha8Rng) -> JetPoint {
    let base = (0..context.n()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let values = context
        .jet_coords()
        .into_iter()
        .map(|jv| (jv, rng.gen_range(-1.0..=1.0)))
        .collect();
    JetPoint {
        context: context.clone(),
        base,
        values,
    }
}

/// Random polynomial Lagrangian density of order ≤ 2: sparse in the jet
/// coordinates, with occasional base-variable coefficients.
pub fn random_polynomial_lagrangian(
    chart: &Chart,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Lagrangian {
    let n = chart.dim();
    let ctx = JetContext::new(m, 2, chart.clone()).expect("valid context");
    let coords = ctx.jet_coords();
    let mut terms = Vec::new();
    let term_count = rng.gen_range(1..=3);
    for _ in 0..term_count {
        let mut factors = vec![Expr::Const(nonzero_small_rational(rng))];
        if rng.gen_bool(0.3) {
            factors.push(Expr::base(rng.gen_range(0..n)));
        }
        let jet_factors = rng.gen_range(1..=2);
        for _ in 0..jet_factors {
            let jv = &coords[rng.gen_range(0..coords.len())];
            factors.push(Expr::Jet(jv.clone()));
        }
        terms.push(Expr::Product(factors));
    }
    let density = Expr::Sum(terms).canon();
    Lagrangian::new(chart.clone(), m, density, Expr::one())
        .expect("generated density is well-formed")
}

/// Seeded panel of random sections and random polynomial local
/// functionals over the unit interval, as used by the codereliction and
/// composite-comonad suites.
pub fn codereliction_panel(
    cases: usize,
    grid_points: usize,
    seed: u64,
) -> Result<(Vec<Section>, Vec<crate::functional::SmoothFunctional>)> {
    use rand::SeedableRng;
    let chart = Chart::unit_box(1);
    let grid = crate::numeric::Grid::over_chart(&chart, grid_points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sections = (0..cases)
        .map(|_| random_section(&chart, 1, &mut rng))
        .collect();
    let functionals = (0..cases)
        .map(|_| {
            crate::functional::SmoothFunctional::local(
                random_polynomial_lagrangian(&chart, 1, &mut rng),
                grid.clone(),
            )
        })
        .collect();
    Ok((sections, functionals))
}

/// The named scalar-field densities plus assorted order ≤ 2 entries: ten
/// Lagrangians, eight on one base dimension and two on two.
pub fn standard_lagrangians() -> Vec<Lagrangian> {
    let c1 = Chart::unit_box(1);
    let c2 = Chart::unit_box(2);
    let u = || Expr::jet(0, vec![0]);
    let ux = || Expr::jet(0, vec![1]);
    let uxx = || Expr::jet(0, vec![2]);
    let mk1 = |density: Expr| Lagrangian::new(c1.clone(), 1, density, Expr::one()).unwrap();
    let mk2 = |density: Expr| Lagrangian::new(c2.clone(), 1, density, Expr::one()).unwrap();
    vec![
        // the four named ones
        mk1((Expr::rational(1, 2) * ux().pow(2)).canon()),
        mk1((u() * uxx()).canon()),
        mk1((u() * uxx() + Expr::param("eta") * u()).canon()),
        mk1((u() * uxx() + u().pow(4)).canon()),
        // more order <= 2 densities
        mk1((u().pow(2) + ux().pow(2)).canon()),
        mk1((Expr::base(0) * ux().pow(2)).canon()),
        mk1((u() * ux() + u().pow(3)).canon()),
        mk1((Expr::rational(1, 2) * uxx().pow(2)).canon()),
        mk2(
            (Expr::rational(1, 2)
                * (Expr::jet(0, vec![1, 0]).pow(2) + Expr::jet(0, vec![0, 1]).pow(2)))
            .canon(),
        ),
        mk2(
            (Expr::jet(0, vec![0, 0]) * (Expr::jet(0, vec![2, 0]) + Expr::jet(0, vec![0, 2]))
                + Expr::jet(0, vec![0, 0]).pow(2))
            .canon(),
        ),
    ]
}
