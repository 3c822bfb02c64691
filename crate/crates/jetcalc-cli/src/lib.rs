//! Command implementations behind the `jetcalc` binary. Each command
//! builds a JSON-serializable report; `main` only parses arguments and
//! maps errors to exit codes.
//!
//! Exit codes: 0 success (or verdict true), 1 verdict false, 2 usage or
//! parse error, 3 numeric instability.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use jetcalc::error::Error;
use jetcalc::expr::{parse_expr, Assignment};
use jetcalc::formats::{EquationJson, OperatorJson};
use jetcalc::functional::{
    codereliction_laws, composite_comonad_check, euler_lagrange, gateaux, sampled_action,
    CoderelictionFlavor, Lagrangian, LawReport, SmoothFunctional,
};
use jetcalc::jet::{Chart, Section};
use jetcalc::lpde::{check_solution, prolong_lpde};
use jetcalc::numeric::{fd_gateaux, sample, Grid, FD_STEPS};
use jetcalc::panel::codereliction_panel;
use jetcalc::suites::{jet_comonad_suite, kleisli_suite, seely_jet_suite};

pub struct CommandOutput {
    pub report: Value,
    pub exit_code: i32,
}

/// Reports print numbers with 12 significant digits; rounding up front
/// keeps the JSON byte-identical across runs with the same seed.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_all(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_all),
        Value::Object(map) => map.values_mut().for_each(round_all),
        _ => {}
    }
}

pub fn finish(mut report: Value, exit_code: i32) -> CommandOutput {
    round_all(&mut report);
    CommandOutput { report, exit_code }
}

/// Map an error to its report and exit code.
pub fn error_output(command: &str, err: &Error) -> CommandOutput {
    let code = match err {
        Error::NumericInstability(_) => 3,
        _ => 2,
    };
    finish(
        json!({
            "command": command,
            "error": err.to_string(),
        }),
        code,
    )
}

/// Parse repeated `name=value` parameter flags.
pub fn parse_params(specs: &[String]) -> Result<Assignment, Error> {
    let mut asg = Assignment::new();
    for spec in specs {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            Error::Invalid(format!("parameter `{spec}` is not name=value"))
        })?;
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Invalid(format!("bad parameter value `{value}`")))?;
        asg.set_param(name.trim().to_string(), v);
    }
    Ok(asg)
}

fn parse_section(text: &str, n: usize, chart: &Chart) -> Result<Section, Error> {
    let components = text
        .split(',')
        .map(|part| parse_expr(part.trim(), n))
        .collect::<Result<Vec<_>, _>>()?;
    Section::new(chart.clone(), components)
}

#[derive(Debug, Serialize)]
struct LawEntryJson {
    rule: String,
    flavor: String,
    cases: usize,
    max_discrepancy: f64,
    tol: f64,
    pass: bool,
}

fn law_report_json(report: &LawReport) -> Vec<LawEntryJson> {
    report
        .entries
        .iter()
        .map(|e| LawEntryJson {
            rule: e.rule.clone(),
            flavor: e.flavor.clone(),
            cases: e.cases,
            max_discrepancy: round_sig(e.max_discrepancy),
            tol: e.tol,
            pass: e.pass,
        })
        .collect()
}

pub fn cmd_el(
    n: usize,
    m: usize,
    lagrangian: &str,
    weight: &str,
    params: &[String],
) -> CommandOutput {
    let run = || -> Result<Value, Error> {
        let chart = Chart::unit_box(n);
        let density = parse_expr(lagrangian, n)?;
        let weight_expr = parse_expr(weight, n)?;
        let lag = Lagrangian::new(chart, m, density, weight_expr)?;
        let _ = parse_params(params)?;
        let el = euler_lagrange(&lag);
        let order = el.iter().filter_map(|e| e.max_jet_order()).max().unwrap_or(0);
        Ok(json!({
            "command": "el",
            "n": n,
            "m": m,
            "lagrangian": lag.density.to_string(),
            "weight": lag.weight.to_string(),
            "el": el.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "order": order,
        }))
    };
    match run() {
        Ok(report) => finish(report, 0),
        Err(e) => error_output("el", &e),
    }
}

pub fn cmd_prolong(eq_json: &str, level: usize) -> CommandOutput {
    let run = || -> Result<Value, Error> {
        let parsed: EquationJson = serde_json::from_str(eq_json)
            .map_err(|e| Error::Invalid(format!("equation file: {e}")))?;
        let eq = parsed.to_lpde()?;
        let set = prolong_lpde(&eq, level);
        let order = set.iter().filter_map(|e| e.max_jet_order()).max().unwrap_or(0);
        Ok(json!({
            "command": "prolong",
            "input": EquationJson::of(&eq),
            "level": level,
            "order": order,
            "equations": set.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "count": set.len(),
        }))
    };
    match run() {
        Ok(report) => finish(report, 0),
        Err(e) => error_output("prolong", &e),
    }
}

pub fn cmd_compose(outer_json: &str, inner_json: &str) -> CommandOutput {
    let run = || -> Result<Value, Error> {
        let outer: OperatorJson = serde_json::from_str(outer_json)
            .map_err(|e| Error::Invalid(format!("outer operator file: {e}")))?;
        let inner: OperatorJson = serde_json::from_str(inner_json)
            .map_err(|e| Error::Invalid(format!("inner operator file: {e}")))?;
        let composed = jetcalc::diffop::compose(&outer.to_operator()?, &inner.to_operator()?)?;
        Ok(serde_json::to_value(OperatorJson::of(&composed))
            .map_err(|e| Error::Invalid(e.to_string()))?)
    };
    match run() {
        Ok(report) => finish(report, 0),
        Err(e) => error_output("compose", &e),
    }
}

pub fn cmd_check_solution(
    eq_json: &str,
    section: &str,
    grid_spec: &str,
    tol: f64,
    prolong_level: usize,
    params: &[String],
) -> CommandOutput {
    let run = || -> Result<(Value, bool), Error> {
        let parsed: EquationJson = serde_json::from_str(eq_json)
            .map_err(|e| Error::Invalid(format!("equation file: {e}")))?;
        let eq = parsed.to_lpde()?;
        let grid = Grid::parse_spec(grid_spec)?;
        if grid.dim() != eq.map.source.n() {
            return Err(Error::Shape(format!(
                "grid dimension {} does not match equation dimension {}",
                grid.dim(),
                eq.map.source.n()
            )));
        }
        let s = parse_section(section, eq.map.source.n(), &eq.map.source.chart)?;
        let points: Vec<Vec<f64>> = grid.points().collect();
        let asg = parse_params(params)?;
        let report = check_solution(&eq, &s, &points, tol, prolong_level, &asg)?;
        let verdict = report.verdict;
        Ok((
            json!({
                "command": "check-solution",
                "eq": EquationJson::of(&eq),
                "section": s.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "grid": grid.spec_string(),
                "tol": tol,
                "prolong_level": prolong_level,
                "residual_max": report.residual_max,
                "flagged_points": report.flagged_points.len(),
                "verdict": verdict,
            }),
            verdict,
        ))
    };
    match run() {
        Ok((report, verdict)) => finish(report, if verdict { 0 } else { 1 }),
        Err(e) => error_output("check-solution", &e),
    }
}

pub fn cmd_gateaux(
    n: usize,
    m: usize,
    lagrangian: &str,
    weight: &str,
    section: &str,
    direction: &str,
    grid_spec: &str,
    params: &[String],
) -> CommandOutput {
    let run = || -> Result<Value, Error> {
        let chart = Chart::unit_box(n);
        let density = parse_expr(lagrangian, n)?;
        let weight_expr = parse_expr(weight, n)?;
        let lag = Lagrangian::new(chart.clone(), m, density, weight_expr)?;
        let grid = Grid::parse_spec(grid_spec)?;
        if grid.dim() != n {
            return Err(Error::Shape(format!(
                "grid dimension {} does not match --n {n}",
                grid.dim()
            )));
        }
        let s = parse_section(section, n, &chart)?;
        let t = parse_section(direction, n, &chart)?;
        let asg = parse_params(params)?;

        let functional = SmoothFunctional::local(lag.clone(), grid.clone());
        let symbolic = gateaux(&functional, &s, &t, &asg)?;

        // the finite-difference oracle works on sampled values only
        let action = sampled_action(&lag, &grid, &asg)?;
        let finite_difference = fd_gateaux(
            action,
            &sample(&s, &grid, &asg)?,
            &sample(&t, &grid, &asg)?,
            &FD_STEPS,
        )?;

        let rel_gap = (symbolic - finite_difference).abs()
            / (1.0 + symbolic.abs() + finite_difference.abs());
        Ok(json!({
            "command": "gateaux",
            "n": n,
            "m": m,
            "lagrangian": lag.density.to_string(),
            "weight": lag.weight.to_string(),
            "section": s.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "direction": t.components.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "grid": grid.spec_string(),
            "symbolic": symbolic,
            "finite_difference": finite_difference,
            "rel_gap": rel_gap,
        }))
    };
    match run() {
        Ok(report) => finish(report, 0),
        Err(e) => error_output("gateaux", &e),
    }
}

pub fn cmd_laws(suite: &str, seed: u64, cases: usize, grid_points: usize) -> CommandOutput {
    let run = || -> Result<(Value, bool), Error> {
        let mut entries = Vec::new();
        let mut suites_run = Vec::new();

        if matches!(suite, "all" | "jet-comonad") {
            let report = jet_comonad_suite(seed, cases)?;
            entries.extend(law_report_json(&report));
            suites_run.push("jet-comonad");
        }
        if matches!(suite, "all" | "kleisli") {
            let report = kleisli_suite(seed, cases)?;
            entries.extend(law_report_json(&report));
            suites_run.push("kleisli");
        }
        if matches!(suite, "all" | "seely") {
            let report = seely_jet_suite(seed, cases)?;
            entries.extend(law_report_json(&report));
            suites_run.push("seely");
        }
        if matches!(suite, "all" | "codereliction" | "composite") {
            let (sections, functionals) =
                codereliction_panel(cases, grid_points, seed ^ 0xd157)?;
            let params = Assignment::new();
            if matches!(suite, "all" | "codereliction") {
                for flavor in [CoderelictionFlavor::Delta, CoderelictionFlavor::JetDelta] {
                    let report =
                        codereliction_laws(flavor, &sections, &functionals, &params)?;
                    entries.extend(law_report_json(&report));
                }
                suites_run.push("codereliction");
            }
            if matches!(suite, "all" | "composite") {
                let report = composite_comonad_check(&sections, &functionals, &params)?;
                entries.extend(law_report_json(&report));
                suites_run.push("composite");
            }
        }
        if suites_run.is_empty() {
            return Err(Error::Invalid(format!(
                "unknown suite `{suite}` (expected all, jet-comonad, kleisli, seely, codereliction, composite)"
            )));
        }

        let all_pass = entries.iter().all(|e| e.pass);
        Ok((
            json!({
                "command": "laws",
                "suite": suite,
                "seed": seed,
                "cases": cases,
                "entries": entries,
                "all_pass": all_pass,
            }),
            all_pass,
        ))
    };
    match run() {
        Ok((report, all_pass)) => finish(report, if all_pass { 0 } else { 1 }),
        Err(e) => error_output("laws", &e),
    }
}

/// Render a report for `--output text`.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    render_value("", report, &mut out);
    out
}

fn render_value(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            let sorted: BTreeMap<_, _> = map.iter().collect();
            for (k, v) in sorted {
                let path = if prefix.is_empty() {
                    k.to_string()
                } else {
                    format!("{prefix}.{k}")
                };
                render_value(&path, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                render_value(&format!("{prefix}[{i}]"), v, out);
            }
        }
        other => {
            out.push_str(&format!("{prefix} = {other}\n"));
        }
    }
}

/// Default tolerance for check-style commands.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;
