// Criteria with a browser-facing operation go through the JSON layer; the
// others run against the library as in the core target.
#[path = "../../core/tests/common/criteria.rs"]
mod criteria;

use criteria::Criterion;
use darwinlab_web::{backflow_json, certify_json, pip_json};
use serde_json::Value;

fn json(r: Result<String, String>) -> Result<Value, String> {
    serde_json::from_str(&r?).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default()
}

fn c1() -> Result<String, String> {
    let v = json(pip_json("ghz", 8, 0.1, 0.0, 0.0))?;
    let m = floats(&v["mean_i"]);
    ensure(m.len() == 8, || format!("{} points", m.len()))?;
    for (i, x) in m.iter().enumerate() {
        let want = if i < 7 { 1.0 } else { 2.0 };
        ensure((x - want).abs() <= 1e-9, || format!("ell={} mean {x}", i + 1))?;
    }
    ensure(v["f_delta"] == 1 && v["r_delta"] == 8.0, || format!("f {} r {}", v["f_delta"], v["r_delta"]))?;
    Ok("pip json: I=1 for ℓ<8, 2 at ℓ=8, #F_δ=1, R_δ=8".into())
}

fn c4() -> Result<String, String> {
    let mut worst = f64::INFINITY;
    for (check, n) in [("ssa", 1000), ("dpi", 1000), ("holevo-mono", 500)] {
        let v = json(certify_json(check, n, 2024))?;
        ensure(v["violations"] == 0, || format!("{check}: {} violations", v["violations"]))?;
        ensure(floats(&v["margins"]).len() == n, || format!("{check}: wrong sample count"))?;
        worst = worst.min(v["min_margin"].as_f64().unwrap_or(f64::INFINITY));
    }
    ensure(worst >= -1e-9, || format!("margin {worst}"))?;
    Ok(format!("certify json: 2500 samples, min margin {worst:.3e}"))
}

fn c5() -> Result<String, String> {
    let v = json(certify_json("afw", 200, 2024))?;
    ensure(v["violations"] == 0, || format!("{} violations", v["violations"]))?;
    let worst = v["min_margin"].as_f64().unwrap_or(f64::NAN);
    ensure(worst >= -1e-9, || format!("margin {worst}"))?;
    Ok(format!("certify json afw: {} rows, min margin {worst:.3e}", floats(&v["margins"]).len()))
}

fn c7() -> Result<String, String> {
    let mut parts = vec![];
    for g in [0.0, 0.3, 0.8, std::f64::consts::FRAC_PI_2] {
        let v = json(backflow_json(6, g, 6))?;
        let blp = v["blp_total"].as_f64().unwrap_or(f64::NAN);
        let cmi = v["cmi_backflow_total"].as_f64().unwrap_or(f64::NAN);
        if g == 0.0 {
            ensure(blp.abs() <= 1e-9 && cmi.abs() <= 1e-9, || format!("g=0: {blp} {cmi}"))?;
        } else {
            ensure(blp > 0.0 && cmi > 0.0, || format!("g={g}: {blp} {cmi}"))?;
        }
        parts.push(format!("g={g:.3}: {blp:.3}/{cmi:.3}"));
    }
    Ok(format!("backflow json {}", parts.join(", ")))
}

#[test]
fn acceptance_criteria() {
    let list = vec![
        Criterion::new(1, "ghz-plateau", 5, c1),
        Criterion::new(2, "cmi-scaling", 10, criteria::c2_cmi_scaling),
        Criterion::new(3, "discord-bounds", 60, criteria::c3_discord_bounds),
        Criterion::new(4, "ssa-dpi-holevo", 120, c4),
        Criterion::new(5, "afw-bounds", 120, c5),
        Criterion::new(6, "petz-recovery", 180, criteria::c6_recovery),
        Criterion::new(7, "backflow-dichotomy", 60, c7),
        Criterion::new(8, "bound-22", 300, criteria::c8_bound22),
        Criterion::new(9, "identity-chain", 60, criteria::c9_identity_chain),
        Criterion::new(10, "redundancy-sweep", 300, criteria::c10_sweep),
    ];
    let failed = criteria::run_all("web", &list);
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
