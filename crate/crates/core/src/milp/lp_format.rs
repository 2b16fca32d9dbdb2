use std::fmt::Write;

use crate::lp::Relation;

use super::model::{MilpModel, VarKind};

const MAX_NAME: usize = 255;

fn sanitize(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.()[]{}!#$%&,;?@'~|".contains(c) { c } else { '_' })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E') {
        out.insert(0, '_');
    }
    out.truncate(MAX_NAME);
    out
}

fn write_terms(out: &mut String, names: &[String], terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (n, &(k, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 {
            "-"
        } else if n == 0 {
            ""
        } else {
            "+"
        };
        let _ = write!(out, " {sign}{}{} {}", if sign.is_empty() { "" } else { " " }, a.abs(), names[k]);
    }
}

fn bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// CPLEX LP-file text for `model`.
pub fn emit_lp_format(model: &MilpModel) -> String {
    let names: Vec<String> = model.variables.iter().map(|v| sanitize(&v.name)).collect();
    let mut out = String::from("\\ Stackelberg congestion game OSE model\nMinimize\n obj:");
    write_terms(&mut out, &names, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", sanitize(&c.name));
        write_terms(&mut out, &names, &c.coeffs);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in model.variables.iter().zip(&names) {
        if v.kind == VarKind::Binary {
            continue;
        }
        if v.lower == v.upper {
            let _ = writeln!(out, " {name} = {}", v.lower);
        } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else if !(v.lower == 0.0 && v.upper == f64::INFINITY) {
            let _ = writeln!(out, " {} <= {name} <= {}", bound(v.lower), bound(v.upper));
        }
    }
    let binaries: Vec<&String> = model.binaries().map(|k| &names[k]).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}
