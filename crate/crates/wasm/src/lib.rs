//! Browser bindings for the interactive demo page: analyze a perturbation
//! spec (bifurcation function, predicted levels), integrate the reduced
//! planar system to watch orbits spiral onto the predicted cycle, and print
//! the exact moment table. All results cross the boundary as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use eulertop::melnikov::{self, trig_moment};
use eulertop::model::oval_level_ceiling;
use eulertop::specfile::SpecFile;
use eulertop::verifier::{reduced_field, Dopri5, IntegratorConfig};
use eulertop::PerturbedSystem;

#[derive(Serialize)]
struct RootOut {
    h_star: f64,
    h_bar: f64,
    admissible: bool,
    simple: bool,
    inside_disk: bool,
    semiaxis_x: f64,
    semiaxis_y: f64,
    reason: String,
}

#[derive(Serialize)]
struct AnalyzeOut {
    kind: String,
    c: f64,
    alpha: f64,
    beta: f64,
    oval_ceiling: f64,
    method: String,
    i_zero: bool,
    roots: Vec<RootOut>,
    curve_h: Vec<f64>,
    curve_i: Vec<f64>,
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::to_string(&ErrorOut {
        error: message.to_string(),
    })
    .unwrap()
}

fn load(spec_json: &str, c_override: f64) -> Result<(PerturbedSystem, f64), String> {
    let file = SpecFile::from_json(spec_json).map_err(|e| e.to_string())?;
    if c_override > 0.0 && file.intrinsic_c().is_some() {
        return Err("c override is illegal for the semisphere kind".into());
    }
    let system = file.build().map_err(|e| e.to_string())?;
    let c = file
        .intrinsic_c()
        .or(if c_override > 0.0 { Some(c_override) } else { None })
        .unwrap_or(1.0);
    Ok((system, c))
}

/// Full first-order analysis of a spec file. `c_override <= 0` keeps the
/// intrinsic/default radius. Returns a JSON report with the sampled
/// bifurcation function.
#[wasm_bindgen]
pub fn analyze_json(spec_json: &str, c_override: f64, curve_points: usize) -> String {
    let (system, c) = match load(spec_json, c_override) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let (closed, report, i_zero) = match melnikov::analyze(&system.spec, &system.params, c) {
        Ok((closed, report)) => (closed, Some(report), false),
        Err(melnikov::MelnikovError::IdenticallyZero) => (None, None, true),
        Err(e) => return err_json(e),
    };
    let curve = if i_zero {
        Vec::new()
    } else {
        match melnikov::sample_curve(
            &system.spec,
            &system.params,
            c,
            closed.as_ref(),
            curve_points.clamp(16, 2000),
        ) {
            Ok(v) => v,
            Err(e) => return err_json(e),
        }
    };
    let out = AnalyzeOut {
        kind: system.spec.kind_name().to_string(),
        c,
        alpha: system.params.alpha(),
        beta: system.params.beta(),
        oval_ceiling: oval_level_ceiling(&system.params, c),
        method: match &report {
            Some(r) if r.method == melnikov::Method::ClosedForm => "closed form".into(),
            Some(_) => "quadrature".into(),
            None => "degenerate".into(),
        },
        i_zero,
        roots: report
            .map(|r| {
                r.roots
                    .into_iter()
                    .map(|root| RootOut {
                        h_star: root.h_star,
                        h_bar: root.h_bar,
                        admissible: root.admissible,
                        simple: root.simple,
                        inside_disk: root.inside_disk,
                        semiaxis_x: root.semiaxis_x,
                        semiaxis_y: root.semiaxis_y,
                        reason: root.reason,
                    })
                    .collect()
            })
            .unwrap_or_default(),
        curve_h: curve.iter().map(|(h, _)| *h).collect(),
        curve_i: curve.iter().map(|(_, i)| *i).collect(),
    };
    serde_json::to_string(&out).unwrap()
}

#[derive(Serialize)]
struct OrbitOut {
    x: Vec<f64>,
    y: Vec<f64>,
    t_end: f64,
}

/// Integrates the reduced planar system on the disk of radius `c` from
/// `(x0, y0)`, overriding the spec epsilon. Returns a polyline in JSON.
#[wasm_bindgen]
pub fn reduced_orbit_json(
    spec_json: &str,
    c_override: f64,
    epsilon: f64,
    x0: f64,
    y0: f64,
    t_end: f64,
    max_points: usize,
) -> String {
    let (mut system, c) = match load(spec_json, c_override) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    system.epsilon = epsilon;
    if x0 * x0 + y0 * y0 >= c * c {
        return err_json("initial point outside the disk");
    }
    let cfg = IntegratorConfig {
        rtol: 1e-9,
        atol: 1e-11,
        max_steps: 400_000,
        ..Default::default()
    };
    let t_end = t_end.clamp(1.0, 5000.0);
    let mut stepper = Dopri5::new(reduced_field(&system, c), [x0, y0], t_end, cfg);
    let mut xs = vec![x0];
    let mut ys = vec![y0];
    let mut reached = 0.0;
    while !stepper.done() {
        match stepper.advance() {
            Ok(out) => {
                let r2 = out.y[0] * out.y[0] + out.y[1] * out.y[1];
                if r2 >= c * c * (1.0 - 1e-12) {
                    break;
                }
                xs.push(out.y[0]);
                ys.push(out.y[1]);
                reached = out.t;
            }
            Err(_) => break,
        }
    }
    let max_points = max_points.clamp(100, 100_000);
    if xs.len() > max_points {
        let stride = xs.len().div_ceil(max_points);
        xs = xs.iter().step_by(stride).copied().collect();
        ys = ys.iter().step_by(stride).copied().collect();
    }
    serde_json::to_string(&OrbitOut {
        x: xs,
        y: ys,
        t_end: reached,
    })
    .unwrap()
}

#[derive(Serialize)]
struct MomentRow {
    i: u32,
    j: u32,
    rational: String,
    value: f64,
}

/// Exact moment table for all `i + j <= max_degree`, as JSON rows.
#[wasm_bindgen]
pub fn moments_json(max_degree: u32) -> String {
    let max_degree = max_degree.min(24);
    let mut rows = Vec::new();
    for i in 0..=max_degree {
        for j in 0..=(max_degree - i) {
            let m = trig_moment(i, j);
            rows.push(MomentRow {
                i,
                j,
                rational: format!("{}/{} pi", m.rat_pi.numer(), m.rat_pi.denom()),
                value: m.value(),
            });
        }
    }
    serde_json::to_string(&rows).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"{
        "kind": "tangent",
        "A": "-x1 x3^3 + x1 x3 - x3",
        "B": "x2 x3^3 + x2 x3",
        "C": "x1^2 x3^2 - x2^2 x3^2 - x1^2 - x2^2 + x1",
        "params": { "mu": [2.0, 1.3333333333333333, 1.0] },
        "epsilon": 0.01
    }"#;

    #[test]
    fn analyze_roundtrips_as_json() {
        let out = analyze_json(SPEC, 4.0, 64);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["kind"], "tangent");
        assert_eq!(v["roots"].as_array().unwrap().len(), 1);
        let root = &v["roots"][0];
        assert!((root["h_star"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(v["curve_h"].as_array().unwrap().len(), 64);
    }

    #[test]
    fn orbit_stays_inside_and_samples() {
        let out = reduced_orbit_json(SPEC, 4.0, 0.01, 1.2, 0.0, 200.0, 2000);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let xs = v["x"].as_array().unwrap();
        assert!(xs.len() > 100 && xs.len() <= 2000);
    }

    #[test]
    fn moments_table_contains_known_values() {
        let out = moments_json(4);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = v.as_array().unwrap();
        let w22 = rows.iter().find(|r| r["i"] == 2 && r["j"] == 2).unwrap();
        assert_eq!(w22["rational"], "1/4 pi");
        // c override on a semisphere spec is rejected.
        let semi = r#"{
            "kind": "semisphere", "P": "x1", "Q": "0", "R": "0", "c": 1.0,
            "params": { "mu": [3.0, 2.0, 1.0] }, "epsilon": 0.0
        }"#;
        let out = analyze_json(semi, 2.0, 64);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].as_str().unwrap().contains("illegal"));
    }
}
