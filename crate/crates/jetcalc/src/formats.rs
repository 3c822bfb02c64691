//! JSON file formats shared with the CLI. Expressions travel as text in
//! the shared grammar, so files stay hand-editable and round-trip through
//! the parser/printer.

use serde::{Deserialize, Serialize};

use crate::diffop::{BundleMap, LinDiffOp};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, JetVar, MultiIndex};
use crate::jet::{Chart, JetContext, JetSection, Section};
use crate::lpde::Lpde;

fn default_chart(n: usize) -> Chart {
    Chart::unit_box(n)
}

/// {n, m, r, chart} — chart bounds optional, defaulting to the unit box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextJson {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<(f64, f64)>>,
}

impl ContextJson {
    pub fn to_context(&self) -> Result<JetContext> {
        let chart = match &self.chart {
            Some(bounds) => {
                if bounds.len() != self.n {
                    return Err(Error::Invalid(
                        "chart bounds do not match base dimension".into(),
                    ));
                }
                Chart(bounds.clone())
            }
            None => default_chart(self.n),
        };
        JetContext::new(self.m, self.r, chart)
    }

    pub fn of(ctx: &JetContext) -> ContextJson {
        ContextJson {
            n: ctx.n(),
            m: ctx.m,
            r: ctx.r,
            chart: Some(ctx.chart.0.clone()),
        }
    }
}

/// Section file: component expressions in base variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionJson {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<(f64, f64)>>,
    pub components: Vec<String>,
}

impl SectionJson {
    pub fn to_section(&self) -> Result<Section> {
        let chart = match &self.chart {
            Some(bounds) => Chart(bounds.clone()),
            None => default_chart(self.n),
        };
        let components = self
            .components
            .iter()
            .map(|text| parse_expr(text, self.n))
            .collect::<Result<Vec<_>>>()?;
        Section::new(chart, components)
    }

    pub fn of(s: &Section) -> SectionJson {
        SectionJson {
            n: s.n(),
            chart: Some(s.chart.0.clone()),
            components: s.components.iter().map(|c| c.to_string()).collect(),
        }
    }
}

/// One jet-coordinate slot of a serialized jet section.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JetSlotJson {
    pub k: usize,
    pub exponents: Vec<u32>,
    pub expr: String,
}

/// Jet section file: the context plus the ordered assignment list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JetSectionJson {
    pub context: ContextJson,
    pub assignment: Vec<JetSlotJson>,
}

impl JetSectionJson {
    pub fn of(js: &JetSection) -> JetSectionJson {
        JetSectionJson {
            context: ContextJson::of(&js.context),
            assignment: js
                .assignment
                .iter()
                .map(|(jv, e)| JetSlotJson {
                    k: jv.fiber,
                    exponents: jv.index.exponents().to_vec(),
                    expr: e.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_jet_section(&self) -> Result<JetSection> {
        let context = self.context.to_context()?;
        let mut assignment = std::collections::BTreeMap::new();
        for slot in &self.assignment {
            let e = parse_expr(&slot.expr, context.n())?;
            assignment.insert(
                JetVar::new(slot.k, MultiIndex::new(slot.exponents.clone())),
                e,
            );
        }
        let js = JetSection {
            context,
            assignment,
        };
        for jv in js.context.jet_coords() {
            if !js.assignment.contains_key(&jv) {
                return Err(Error::Invalid(format!(
                    "jet section file misses slot {}",
                    Expr::Jet(jv)
                )));
            }
        }
        Ok(js)
    }
}

/// One coefficient entry of an operator file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorEntryJson {
    pub row: usize,
    pub col: usize,
    pub exponents: Vec<u32>,
    pub coeff: String,
}

/// Operator file: {n, m, m_out, order, entries}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub n: usize,
    pub m: usize,
    pub m_out: usize,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<(f64, f64)>>,
    pub entries: Vec<OperatorEntryJson>,
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<LinDiffOp> {
        let chart = match &self.chart {
            Some(bounds) => Chart(bounds.clone()),
            None => default_chart(self.n),
        };
        let mut coeffs = std::collections::BTreeMap::new();
        for entry in &self.entries {
            if entry.exponents.len() != self.n {
                return Err(Error::Invalid(format!(
                    "entry exponent vector {:?} does not have length {}",
                    entry.exponents, self.n
                )));
            }
            let key = (
                entry.row,
                entry.col,
                MultiIndex::new(entry.exponents.clone()),
            );
            if coeffs
                .insert(key, parse_expr(&entry.coeff, self.n)?)
                .is_some()
            {
                return Err(Error::Invalid(format!(
                    "duplicate operator entry at row {} col {} exponents {:?}",
                    entry.row, entry.col, entry.exponents
                )));
            }
        }
        let op = LinDiffOp::new(chart, self.m, self.m_out, coeffs)?;
        if op.order() > self.order {
            return Err(Error::Invalid(format!(
                "declared order {} below actual order {}",
                self.order,
                op.order()
            )));
        }
        Ok(op)
    }

    pub fn of(op: &LinDiffOp) -> OperatorJson {
        OperatorJson {
            n: op.chart.dim(),
            m: op.m,
            m_out: op.m_out,
            order: op.order(),
            chart: Some(op.chart.0.clone()),
            entries: op
                .coeffs
                .iter()
                .map(|((row, col, alpha), coeff)| OperatorEntryJson {
                    row: *row,
                    col: *col,
                    exponents: alpha.exponents().to_vec(),
                    coeff: coeff.to_string(),
                })
                .collect(),
        }
    }
}

/// Equation file: {n, m, order, components, inhomogeneity?}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquationJson {
    pub n: usize,
    pub m: usize,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<(f64, f64)>>,
    pub components: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inhomogeneity: Option<Vec<String>>,
}

impl EquationJson {
    pub fn to_lpde(&self) -> Result<Lpde> {
        let chart = match &self.chart {
            Some(bounds) => Chart(bounds.clone()),
            None => default_chart(self.n),
        };
        let context = JetContext::new(self.m, self.order, chart.clone())?;
        let components = self
            .components
            .iter()
            .map(|text| parse_expr(text, self.n))
            .collect::<Result<Vec<_>>>()?;
        let map = BundleMap::new(context, components, true)?;
        let inhomogeneity = match &self.inhomogeneity {
            None => None,
            Some(texts) => {
                let comps = texts
                    .iter()
                    .map(|text| parse_expr(text, self.n))
                    .collect::<Result<Vec<_>>>()?;
                Some(Section::new(chart, comps)?)
            }
        };
        Lpde::new(map, inhomogeneity)
    }

    pub fn of(eq: &Lpde) -> EquationJson {
        EquationJson {
            n: eq.map.source.n(),
            m: eq.map.source.m,
            order: eq.map.source.r,
            chart: Some(eq.map.source.chart.0.clone()),
            components: eq.map.components.iter().map(|c| c.to_string()).collect(),
            inhomogeneity: eq
                .inhomogeneity
                .as_ref()
                .map(|g| g.components.iter().map(|c| c.to_string()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_json_roundtrip() {
        let text = r#"{
            "n": 1, "m": 1, "m_out": 1, "order": 1,
            "entries": [{"row": 0, "col": 0, "exponents": [1], "coeff": "1"}]
        }"#;
        let parsed: OperatorJson = serde_json::from_str(text).unwrap();
        let op = parsed.to_operator().unwrap();
        assert_eq!(op.order(), 1);
        let back = OperatorJson::of(&op);
        let op2 = back.to_operator().unwrap();
        assert_eq!(op, op2);
    }

    #[test]
    fn equation_json_laplace() {
        let text = r#"{
            "n": 2, "m": 1, "order": 2,
            "components": ["u1_x1x1 + u1_x2x2"]
        }"#;
        let parsed: EquationJson = serde_json::from_str(text).unwrap();
        let eq = parsed.to_lpde().unwrap();
        assert_eq!(eq.order(), 2);
        assert_eq!(eq.map.components.len(), 1);
    }

    #[test]
    fn equation_json_rejects_nonlinear_components() {
        let text = r#"{
            "n": 1, "m": 1, "order": 1,
            "components": ["u1^2"]
        }"#;
        let parsed: EquationJson = serde_json::from_str(text).unwrap();
        assert!(parsed.to_lpde().is_err());
    }

    #[test]
    fn jet_section_json_roundtrip() {
        let s = Section::new(Chart::unit_box(1), vec![Expr::base(0).pow(2)]).unwrap();
        let js = crate::jet::prolong(&s, 2);
        let json = JetSectionJson::of(&js);
        let back = json.to_jet_section().unwrap();
        assert_eq!(back, js);
    }

    #[test]
    fn section_json_and_missing_slot_errors() {
        let sj = SectionJson {
            n: 2,
            chart: None,
            components: vec!["x1*x2".into()],
        };
        assert!(sj.to_section().is_ok());

        let text = r#"{
            "context": {"n": 1, "m": 1, "r": 1},
            "assignment": [{"k": 0, "exponents": [0], "expr": "x1"}]
        }"#;
        let parsed: JetSectionJson = serde_json::from_str(text).unwrap();
        assert!(parsed.to_jet_section().is_err());
    }
}
