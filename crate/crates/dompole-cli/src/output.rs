//! File and console emission: pole tables, run reports, sweeps, modal models.
//! CSV carries 12 significant digits; JSON uses shortest-round-trip floats.

use std::fs;
use std::path::Path;

use dompole::framework::{PoleEstimate, RunReport};
use dompole::transfer::PoleData;
use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn write_text(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn estimates_csv(estimates: &[PoleEstimate]) -> String {
    let mut out = String::from("re,im,dominance,residual,converged\n");
    for e in estimates {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{}\n",
            e.lambda.re, e.lambda.im, e.dominance, e.residual, e.converged
        ));
    }
    out
}

pub fn estimates_json(estimates: &[PoleEstimate]) -> Value {
    Value::Array(
        estimates
            .iter()
            .map(|e| {
                json!({
                    "re": e.lambda.re,
                    "im": e.lambda.im,
                    "dominance": e.dominance,
                    "residual": e.residual,
                    "converged": e.converged,
                    "history": e.history.iter().map(|h| json!({
                        "iteration": h.iteration,
                        "re": h.lambda.re,
                        "im": h.lambda.im,
                        "residual": h.residual,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn poles_csv(poles: &[PoleData]) -> String {
    let mut out = String::from("re,im,dominance\n");
    for p in poles {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e}\n",
            p.lambda.re, p.lambda.im, p.dominance
        ));
    }
    out
}

pub fn poles_json(poles: &[PoleData]) -> Value {
    Value::Array(
        poles
            .iter()
            .map(|p| {
                json!({
                    "re": p.lambda.re,
                    "im": p.lambda.im,
                    "dominance": p.dominance,
                    "residue_norm_product": p.residue_norm_product,
                })
            })
            .collect(),
    )
}

/// Serialize the run report; timings are nulled unless `with_timings` so that
/// identical runs produce byte-identical files.
pub fn report_json(report: &RunReport, with_timings: bool) -> Value {
    let mut value = serde_json::to_value(report).expect("report serialization cannot fail");
    if !with_timings {
        value["init_time_s"] = Value::Null;
        value["solve_time_s"] = Value::Null;
    }
    value
}

fn complex_pair(v: Complex64) -> Value {
    json!([v.re, v.im])
}

fn complex_vector(v: &DVector<Complex64>) -> Value {
    Value::Array(v.iter().map(|&x| complex_pair(x)).collect())
}

pub fn modal_json(
    poles: &[PoleData],
    constant: &nalgebra::DMatrix<Complex64>,
    bound: f64,
    bound_covers_all_poles: bool,
) -> Value {
    json!({
        "r": poles.len(),
        "error_bound": bound,
        "bound_covers_all_poles": bound_covers_all_poles,
        "constant": (0..constant.nrows()).map(|i| {
            (0..constant.ncols()).map(|j| complex_pair(constant[(i, j)])).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "poles": poles.iter().map(|p| json!({
            "re": p.lambda.re,
            "im": p.lambda.im,
            "dominance": p.dominance,
            "cv": complex_vector(&p.cv),
            "wb": complex_vector(&p.wb),
        })).collect::<Vec<_>>(),
    })
}

/// One `omega` per line; the mark frequencies behind the sweep plots.
pub fn marks_csv(estimates: &[PoleEstimate]) -> String {
    let mut out = String::from("omega\n");
    for e in estimates {
        out.push_str(&format!("{:.11e}\n", e.lambda.im.abs()));
    }
    out
}

fn format_pole(lambda: Complex64) -> String {
    if lambda.im == 0.0 {
        format!("{:.4e}", lambda.re)
    } else {
        format!("{:.4e} ± {:.4e}i", lambda.re, lambda.im.abs())
    }
}

/// Pole/dominance block in the style of the benchmark tables.
pub fn print_pole_block(title: &str, poles: &[(Complex64, f64)]) {
    println!("{title}");
    for (k, (lambda, dominance)) in poles.iter().enumerate() {
        println!("  {:>2}.  {:<28} ({:.2e})", k + 1, format_pole(*lambda), dominance);
    }
}

/// Counter line in the benchmark-table column order.
pub fn print_counters(report: &RunReport) {
    println!(
        "#LU {:<6} # lin sol {:<6} sdim {:<5} init time {:.3}s  total {:.3}s",
        report.lu_count,
        report.solve_count,
        report.final_subspace_dim,
        report.init_time_s.unwrap_or(f64::NAN),
        report.solve_time_s.unwrap_or(f64::NAN),
    );
}
