//! Grids, trapezoid quadrature, numeric sampling of sections, and the
//! finite-difference oracles backing the symbolic machinery.
//!
//! Summation happens in a fixed left-to-right order so reported numbers
//! are reproducible bit-for-bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Assignment, JetVar, MultiIndex};
use crate::jet::{Chart, JetContext, JetPoint, Section};

/// Finite-difference step sizes used by every Gâteaux oracle; the two
/// steps are Richardson-combined and their disagreement is the
/// instability signal.
pub const FD_STEPS: [f64; 2] = [1e-2, 1e-3];

/// Relative disagreement between the two steps beyond this bound raises
/// a numeric-instability error.
pub const FD_DISAGREEMENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.count as f64 - 1.0)
    }
}

/// Tensor-product grid with trapezoid quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Grid> {
        if axes.is_empty() {
            return Err(Error::Shape("grid needs at least one axis".into()));
        }
        for a in &axes {
            if a.count < 2 {
                return Err(Error::Shape("grid axes need at least 2 points".into()));
            }
            if !(a.lo < a.hi) || !a.lo.is_finite() || !a.hi.is_finite() {
                return Err(Error::Shape(
                    "grid axis bounds must be finite with lo < hi".into(),
                ));
            }
        }
        Ok(Grid { axes })
    }

    /// Uniform grid over a chart box.
    pub fn over_chart(chart: &Chart, count_per_axis: usize) -> Result<Grid> {
        Grid::new(
            chart
                .0
                .iter()
                .map(|&(lo, hi)| Axis {
                    lo,
                    hi,
                    count: count_per_axis,
                })
                .collect(),
        )
    }

    /// Parse the CLI grid spec `lo:hi:count[,lo:hi:count...]`.
    pub fn parse_spec(spec: &str) -> Result<Grid> {
        let mut axes = Vec::new();
        for (i, part) in spec.split(',').enumerate() {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    1,
                    i + 1,
                    format!("grid axis `{part}` is not lo:hi:count"),
                ));
            }
            let lo: f64 = fields[0]
                .parse()
                .map_err(|_| Error::parse(1, i + 1, format!("bad lower bound `{}`", fields[0])))?;
            let hi: f64 = fields[1]
                .parse()
                .map_err(|_| Error::parse(1, i + 1, format!("bad upper bound `{}`", fields[1])))?;
            let count: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(1, i + 1, format!("bad point count `{}`", fields[2])))?;
            axes.push(Axis { lo, hi, count });
        }
        Grid::new(axes)
    }

    pub fn spec_string(&self) -> String {
        self.axes
            .iter()
            .map(|a| format!("{}:{}:{}", a.lo, a.hi, a.count))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chart(&self) -> Chart {
        Chart(self.axes.iter().map(|a| (a.lo, a.hi)).collect())
    }

    /// Multi-dimensional index of a flat point index, row-major with the
    /// last axis fastest.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim()];
        for (i, a) in self.axes.iter().enumerate().rev() {
            idx[i] = flat % a.count;
            flat /= a.count;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for (i, a) in self.axes.iter().enumerate() {
            flat = flat * a.count + idx[i];
        }
        flat
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.lo + a.spacing() * i as f64)
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |f| self.point(&self.unflatten(f)))
    }

    /// Trapezoid quadrature weight of a point.
    pub fn weight(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, a)| {
                let h = a.spacing();
                if i == 0 || i == a.count - 1 {
                    h / 2.0
                } else {
                    h
                }
            })
            .product()
    }

    /// Σ w_i v_i in deterministic point order.
    pub fn quadrature(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        let mut acc = 0.0;
        for (flat, v) in values.iter().enumerate() {
            let idx = self.unflatten(flat);
            acc += self.weight(&idx) * v;
        }
        Ok(acc)
    }

    /// Whether a point touches the boundary of any axis.
    pub fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.axes)
            .any(|(&i, a)| i == 0 || i == a.count - 1)
    }
}

/// Per-point fiber values of a section over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSection {
    pub grid: Grid,
    pub m: usize,
    /// values[k][flat point index]
    pub values: Vec<Vec<f64>>,
}

impl SampledSection {
    pub fn new(grid: Grid, values: Vec<Vec<f64>>) -> Result<SampledSection> {
        let m = values.len();
        if m == 0 {
            return Err(Error::Shape("sampled section needs components".into()));
        }
        for col in &values {
            if col.len() != grid.len() {
                return Err(Error::Shape(
                    "sampled values do not match grid size".into(),
                ));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Shape("sampled values must be finite".into()));
            }
        }
        Ok(SampledSection { grid, m, values })
    }

    /// s + h·t pointwise.
    pub fn axpy(&self, h: f64, t: &SampledSection) -> Result<SampledSection> {
        if self.grid != t.grid || self.m != t.m {
            return Err(Error::Shape("sampled sections on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&t.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + h * y).collect())
            .collect();
        SampledSection::new(self.grid.clone(), values)
    }
}

/// Pointwise evaluation of a symbolic section.
pub fn sample(s: &Section, grid: &Grid, params: &Assignment) -> Result<SampledSection> {
    let mut values = vec![Vec::with_capacity(grid.len()); s.m()];
    for p in grid.points() {
        let v = s.eval_at(&p, params)?;
        for (k, col) in values.iter_mut().enumerate() {
            col.push(v[k]);
        }
    }
    SampledSection::new(grid.clone(), values)
}

/// Jet values over a grid computed by finite differences.
#[derive(Debug, Clone)]
pub struct JetSamples {
    pub grid: Grid,
    pub m: usize,
    pub r: usize,
    /// columns[(k, I)][flat point index] ≈ ∂_I s^k
    pub columns: BTreeMap<JetVar, Vec<f64>>,
}

impl JetSamples {
    pub fn jet_point(&self, flat: usize) -> JetPoint {
        let idx = self.grid.unflatten(flat);
        let context = JetContext {
            m: self.m,
            r: self.r,
            chart: self.grid.chart(),
        };
        JetPoint {
            context,
            base: self.grid.point(&idx),
            values: self
                .columns
                .iter()
                .map(|(jv, col)| (jv.clone(), col[flat]))
                .collect(),
        }
    }
}

/// Second-order finite difference along one axis of a grid-shaped array:
/// central stencils inside, one-sided three-point stencils at the ends.
fn fd_axis(grid: &Grid, values: &[f64], axis: usize) -> Vec<f64> {
    let h = grid.axes()[axis].spacing();
    let count = grid.axes()[axis].count;
    let mut out = vec![0.0; values.len()];
    for flat in 0..values.len() {
        let idx = grid.unflatten(flat);
        let i = idx[axis];
        let at = |j: usize| {
            let mut nidx = idx.clone();
            nidx[axis] = j;
            values[grid.flatten(&nidx)]
        };
        out[flat] = if i == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if i == count - 1 {
            (3.0 * at(count - 1) - 4.0 * at(count - 2) + at(count - 3)) / (2.0 * h)
        } else {
            (at(i + 1) - at(i - 1)) / (2.0 * h)
        };
    }
    out
}

/// Finite-difference jet of already-sampled values: apply the axis stencil
/// once per multi-index exponent. Fully independent of symbolic
/// differentiation and prolongation.
pub fn jet_sample_values(s: &SampledSection, r: usize) -> Result<JetSamples> {
    for a in s.grid.axes() {
        if a.count < 3 && r > 0 {
            return Err(Error::Shape(
                "finite-difference jets need at least 3 points per axis".into(),
            ));
        }
    }
    let n = s.grid.dim();
    let mut columns = BTreeMap::new();
    for k in 0..s.m {
        for index in MultiIndex::all_up_to(n, r) {
            let mut col = s.values[k].clone();
            for (axis, &count) in index.exponents().iter().enumerate() {
                for _ in 0..count {
                    col = fd_axis(&s.grid, &col, axis);
                }
            }
            columns.insert(JetVar::new(k, index), col);
        }
    }
    Ok(JetSamples {
        grid: s.grid.clone(),
        m: s.m,
        r,
        columns,
    })
}

/// Sample a symbolic section and finite-difference its jet.
pub fn jet_sample(s: &Section, r: usize, grid: &Grid, params: &Assignment) -> Result<JetSamples> {
    jet_sample_values(&sample(s, grid, params)?, r)
}

/// Central difference (F(s+ht) − F(s−ht)) / 2h, Richardson-extrapolated
/// over the step list. This realizes the limit definition of the
/// directional derivative and is the oracle for every symbolic Gâteaux
/// value.
pub fn fd_gateaux<F>(f: F, s: &SampledSection, t: &SampledSection, steps: &[f64]) -> Result<f64>
where
    F: Fn(&SampledSection) -> Result<f64>,
{
    if steps.is_empty() {
        return Err(Error::Invalid("need at least one step size".into()));
    }
    let mut estimates = Vec::with_capacity(steps.len());
    for &h in steps {
        let plus = f(&s.axpy(h, t)?)?;
        let minus = f(&s.axpy(-h, t)?)?;
        estimates.push((plus - minus) / (2.0 * h));
    }
    combine_richardson(&estimates, steps)
}

/// Richardson combination for O(h²) central differences, with the
/// step-disagreement instability check: the fine-step estimate must agree
/// with the extrapolated limit, otherwise the two steps are genuinely
/// inconsistent (a converging quotient leaves only the tiny h₂² residual).
pub fn combine_richardson(estimates: &[f64], steps: &[f64]) -> Result<f64> {
    if estimates.len() == 1 {
        return Ok(estimates[0]);
    }
    let (d1, d2) = (estimates[0], estimates[1]);
    let (h1, h2) = (steps[0], steps[1]);
    let (w1, w2) = (h1 * h1, h2 * h2);
    let limit = (d2 * w1 - d1 * w2) / (w1 - w2);
    if (limit - d2).abs() > FD_DISAGREEMENT_TOL * (1.0 + limit.abs()) {
        return Err(Error::NumericInstability(format!(
            "finite-difference estimates disagree: {d1} vs {d2}"
        )));
    }
    Ok(limit)
}
