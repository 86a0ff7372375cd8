//! Rendering. Exact rationals are always written `num/den`.

use jacobi_series::verify::{OrderSample, VerifyReport};
use jacobi_series::{EigenResult, Layout, Rational, TruncatedSeries};
use serde_json::{json, Value};

pub fn rat(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn series_json(s: &TruncatedSeries, layout: &Layout) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| json!({ "exponents": e, "coeff": rat(c) }))
        .collect();
    json!({
        "variables": layout.variable_names(),
        "cap": s.cap(),
        "terms": terms,
    })
}

pub fn series_csv(s: &TruncatedSeries, layout: &Layout) -> String {
    let mut out = format!("coeff,{}\n", layout.variable_names().join(","));
    for (e, c) in s.terms() {
        let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{},{}\n", rat(c), exps.join(",")));
    }
    out
}

pub fn series_text(s: &TruncatedSeries, layout: &Layout) -> String {
    format!("# variables {}\n{s}\n", layout.variable_names().join(" "))
}

/// Per-branch record; `value` renders one scalar.
pub struct Branch<'a, T> {
    pub result: &'a EigenResult<T>,
    pub layout: Layout,
    pub eigenvalue_float: f64,
}

pub fn solve_json<T: Clone>(branches: &[Branch<'_, T>], degree: u32, mode: &str, value: impl Fn(&T) -> Value) -> Value {
    let records: Vec<Value> = branches
        .iter()
        .map(|b| {
            json!({
                "k": b.result.k,
                "eigenvalue": value(&b.result.eigenvalue),
                "eigenvalue_float": b.eigenvalue_float,
                "eigenvector": b.result.vector().iter().map(&value).collect::<Vec<_>>(),
                "residual": b.result.residual,
                "lambda_series": series_json(&b.result.lambda_series, &b.layout),
            })
        })
        .collect();
    json!({ "degree": degree, "mode": mode, "branches": records })
}

pub fn solve_csv<T: Clone>(branches: &[Branch<'_, T>], value: impl Fn(&T) -> String) -> String {
    let d = branches.first().map_or(0, |b| b.result.vector().len());
    let vs: Vec<String> = (1..=d).map(|i| format!("v{i}")).collect();
    let mut out = format!("k,eigenvalue,eigenvalue_float,residual,{}\n", vs.join(","));
    for b in branches {
        let v: Vec<String> = b.result.vector().iter().map(&value).collect();
        out.push_str(&format!(
            "{},{},{:e},{:e},{}\n",
            b.result.k,
            value(&b.result.eigenvalue),
            b.eigenvalue_float,
            b.result.residual,
            v.join(",")
        ));
    }
    out
}

pub fn solve_text<T: Clone>(branches: &[Branch<'_, T>], value: impl Fn(&T) -> String) -> String {
    let mut out = String::new();
    for b in branches {
        let v: Vec<String> = b.result.vector().iter().map(&value).collect();
        out.push_str(&format!(
            "branch {}\n  eigenvalue {} ({:.15e})\n  residual {:e}\n  eigenvector [{}]\n  lambda {}\n",
            b.result.k,
            value(&b.result.eigenvalue),
            b.eigenvalue_float,
            b.result.residual,
            v.join(", "),
            b.result.lambda_series.to_string().replace('\n', "\n    "),
        ));
    }
    out
}

pub fn sweep_csv(rows: &[(usize, OrderSample)]) -> String {
    let mut out = String::from("k,degree,epsilon,residual,gap\n");
    for (k, s) in rows {
        out.push_str(&format!("{k},{},{:e},{:e},{:e}\n", s.degree, s.eps, s.residual, s.gap));
    }
    out
}

pub fn sweep_json(rows: &[(usize, OrderSample)]) -> Value {
    Value::Array(
        rows.iter()
            .map(|(k, s)| json!({ "k": k, "degree": s.degree, "epsilon": s.eps, "residual": s.residual, "gap": s.gap }))
            .collect(),
    )
}

pub fn verify_json(r: &VerifyReport) -> Value {
    let suites: Vec<Value> = r
        .suites
        .iter()
        .map(|s| {
            json!({
                "suite": s.suite.name(),
                "passed": s.passed(),
                "cases": s.cases,
                "failures": s.failures.len(),
                "first_failure": s.first_failure().map(|f| json!({
                    "d": f.case.d, "k": f.case.k, "degree": f.case.degree, "message": f.message,
                })),
            })
        })
        .collect();
    json!({ "passed": r.passed(), "suites": suites })
}

pub fn verify_text(r: &VerifyReport) -> String {
    let mut out = String::new();
    for s in &r.suites {
        out.push_str(&format!(
            "{} {:<15} {} cases, {} failures",
            if s.passed() { "PASS" } else { "FAIL" },
            s.suite.name(),
            s.cases,
            s.failures.len()
        ));
        if let Some(f) = s.first_failure() {
            out.push_str(&format!("; first: {} {}", f.case, f.message));
        }
        out.push('\n');
    }
    out
}
