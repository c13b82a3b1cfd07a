use darwinlab::certify::{self, parse_checks};
use darwinlab::darwinism::{self, Quantity, SamplingConfig};
use darwinlab::measurement::OptimizerConfig;
use darwinlab::nonmarkov::{self, AncillaMode, InitialState, ModelConfig, ModelKind, SweepChecks};
use darwinlab::states;
use darwinlab::{PointerBasis, QState, SubsystemLabel};

use crate::args::*;
use crate::output::{flag, num, opt_flag, Table};

/// What a command produced: the table and whether a certified violation was found.
pub struct Outcome {
    pub table: Table,
    pub violation: bool,
}

impl Outcome {
    fn clean(table: Table) -> Self {
        Self { table, violation: false }
    }
}

type Res<T> = Result<T, String>;

fn core<T>(r: darwinlab::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

fn model_config(kind: DynModel, d: &Dynamics, g: f64, seed: u64) -> ModelConfig {
    ModelConfig {
        kind: match kind {
            DynModel::Collision => ModelKind::Collision,
            DynModel::Spinstar => ModelKind::SpinStar,
        },
        n_env: d.n_env,
        se_coupling: d.se_coupling,
        g,
        steps: d.steps.unwrap_or(d.n_env),
        initial: InitialState::Plus,
        seed,
    }
}

fn optimizer(seed: u64) -> OptimizerConfig {
    OptimizerConfig::default().with_seed(seed)
}

fn pip_state(a: &PipArgs, seed: u64) -> Res<QState> {
    let n = a.dynamics.n_env;
    match a.model {
        StateModel::Ghz => core(states::ghz_state(n)),
        StateModel::Branching => core(states::overlap_branching_state(n, a.overlap)),
        StateModel::Product => core(states::product_state(n, &states::plus())),
        StateModel::Collision | StateModel::Spinstar => {
            let kind = if a.model == StateModel::Collision { DynModel::Collision } else { DynModel::Spinstar };
            let cfg = model_config(kind, &a.dynamics, a.g, seed);
            let t = core(nonmarkov::run_model(&cfg, &AncillaMode::None))?;
            Ok(t.last().clone())
        }
    }
}

pub fn pip(a: &PipArgs, seed: u64) -> Res<Outcome> {
    let quantity: Quantity = core(a.quantity.parse())?;
    let rho = pip_state(a, seed)?;
    let sampling = SamplingConfig {
        exhaustive_cap: a.exhaustive_cap,
        n_subsets: a.subsets,
        seed,
        optimizer: optimizer(seed),
    };
    let frags = darwinism::single_fragments(a.dynamics.n_env);
    let curve = core(darwinism::pip_scan(&rho, &frags, quantity, &sampling))?;
    let rep = core(darwinism::plateau_detect(&curve, a.delta))?;
    let mut t = Table::new(&["ell", "mean_i_bits", "std_i_bits", "n_subsets", "h_s_bits"]);
    for p in &curve.points {
        t.row(vec![p.ell.to_string(), num(p.mean_i), num(p.std_i), p.n_subsets.to_string(), num(curve.h_s)]);
    }
    t.summary("f_delta", rep.f_delta_size.map(|f| f.to_string()).unwrap_or_else(|| "none".into()));
    t.summary("r_delta", num(rep.redundancy));
    t.summary("plateau_found", flag(rep.plateau_found));
    Ok(Outcome::clean(t))
}

pub fn certify(a: &CertifyArgs, seed: u64) -> Res<Outcome> {
    let checks = core(parse_checks(&a.check))?;
    let rows = core(certify::certify_many(&checks, a.samples, seed))?;
    let mut t = Table::new(&["check_id", "sample", "lhs", "rhs", "margin", "passed"]);
    let mut violations = 0;
    for r in &rows {
        violations += usize::from(!r.passed);
        t.row(vec![r.check_id.clone(), r.sample.to_string(), num(r.lhs), num(r.rhs), num(r.margin), flag(r.passed)]);
    }
    t.summary("violations", violations.to_string());
    Ok(Outcome { table: t, violation: violations > 0 })
}

fn parse_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

pub fn backflow(a: &BackflowArgs, seed: u64) -> Res<Outcome> {
    let cfg = model_config(a.model, &a.dynamics, a.g, seed);
    let ancilla = match a.ancilla {
        Ancilla::None => AncillaMode::None,
        Ancilla::Maxent => AncillaMode::Maxent,
        Ancilla::Measured => AncillaMode::Measured(PointerBasis::computational(SubsystemLabel::qubit("S"))),
    };
    let e_sub = a.e_sub.as_deref().map(parse_list);
    let s = core(nonmarkov::backflow(&cfg, &ancilla, e_sub.as_deref()))?;
    let mut t = Table::new(&["t", "trace_distance", "cmi_bits"]);
    for (i, time) in s.times.iter().enumerate() {
        let cmi = s.cmi.get(i).map(|&c| num(c)).unwrap_or_default();
        t.row(vec![time.to_string(), num(s.trace_distance[i]), cmi]);
    }
    t.summary("blp_total", num(s.blp_total));
    let cmi_total = if s.cmi.is_empty() { String::new() } else { num(s.cmi_backflow_total) };
    t.summary("cmi_backflow_total", cmi_total);
    Ok(Outcome::clean(t))
}

fn parse_sweep_checks(s: &str) -> Res<SweepChecks> {
    let mut c = SweepChecks::default();
    for item in parse_list(s) {
        match item.as_str() {
            "none" => {}
            "bound22" => c.bound22 = true,
            "bound29" => c.bound29 = true,
            "all" => {
                c.bound22 = true;
                c.bound29 = true;
            }
            other => return Err(format!("unknown check '{other}' (none, bound22, bound29)")),
        }
    }
    Ok(c)
}

pub fn sweep(a: &SweepArgs, seed: u64) -> Res<Outcome> {
    let gs: Vec<f64> = parse_list(&a.g_list)
        .iter()
        .map(|x| x.parse::<f64>().map_err(|_| format!("bad g value '{x}'")))
        .collect::<Res<_>>()?;
    if gs.is_empty() {
        return Err("empty --g-list".into());
    }
    let checks = parse_sweep_checks(&a.checks)?;
    let base = model_config(a.model, &a.dynamics, 0.0, seed);
    let rows = core(nonmarkov::redundancy_vs_nonmarkovianity_sweep(&base, &gs, a.delta, checks, &optimizer(seed)))?;
    let mut t = Table::new(&["g", "r_delta", "blp_total", "cmi_backflow_total", "bound22_ok", "bound29_ok"]);
    let mut violation = false;
    for r in &rows {
        violation |= r.bound22_ok == Some(false) || r.bound29_ok == Some(false);
        t.row(vec![
            num(r.g),
            num(r.r_delta),
            num(r.blp_total),
            num(r.cmi_backflow_total),
            opt_flag(r.bound22_ok),
            opt_flag(r.bound29_ok),
        ]);
    }
    Ok(Outcome { table: t, violation })
}

pub fn recovery(a: &RecoveryArgs, seed: u64) -> Res<Outcome> {
    let reps = core(certify::recovery_reports(a.samples, seed))?;
    let mut t = Table::new(&["sample", "chi_in_bits", "chi_out_bits", "rhs_bits", "margin", "satisfied"]);
    let mut violations = 0;
    for (i, r) in reps.iter().enumerate() {
        violations += usize::from(!r.satisfied);
        t.row(vec![
            i.to_string(),
            num(r.chi_in_bits),
            num(r.chi_out_bits),
            num(r.rhs_bits),
            num(r.margin),
            flag(r.satisfied),
        ]);
    }
    t.summary("violations", violations.to_string());
    let worst = reps.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    t.summary("min_margin", if reps.is_empty() { String::new() } else { num(worst) });
    Ok(Outcome { table: t, violation: violations > 0 })
}
