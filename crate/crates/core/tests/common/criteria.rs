// Acceptance criteria shared by the acceptance targets of every crate.
// Each check returns Ok(detail) on success and Err(detail) on failure; the
// runner prints one line per criterion and never stops early.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use darwinlab::certify::{self, Check};
use darwinlab::channels::Channel;
use darwinlab::darwinism::{self, CmiScalingConfig, Quantity, SamplingConfig};
use darwinlab::measurement::OptimizerConfig;
use darwinlab::nonmarkov::{self, AncillaMode, Bound29Config, ModelConfig, SweepChecks};
use darwinlab::states::{self, Ensemble};
use darwinlab::{CMatrix, HilbertSpace, PointerBasis, QState, SubsystemLabel, C64};

pub type CheckFn = fn() -> Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    pub run: CheckFn,
}

impl Criterion {
    pub const fn new(id: u8, name: &'static str, secs: u64, run: CheckFn) -> Self {
        Self { id, name, limit: Duration::from_secs(secs), run }
    }
}

/// Runs every criterion, prints one line each and returns the number of failures.
pub fn run_all(tag: &str, list: &[Criterion]) -> usize {
    let mut failed = 0;
    for c in list {
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t0.elapsed();
        let slow = dt > c.limit;
        let ok = res.is_ok() && !slow;
        if !ok {
            failed += 1;
        }
        let detail = match &res {
            Ok(d) | Err(d) => d.clone(),
        };
        let timing = if slow { "TOO SLOW" } else { "in time" };
        println!(
            "[{tag}] criterion {:>2} {:<24} {}  {:.2}s / {}s {timing}  {detail}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    failed
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Binary entropy in bits, written out independently of the library.
pub fn h2(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Oracle for equal-weight two-branch states with per-fragment overlap `c`.
/// A block of `k` fragments has the spectrum of the branch Gram matrix,
/// `(1 ± c^k)/2`, and `S` together with `m` fragments has the spectrum of the
/// complementary `N−m` fragments.
pub struct BranchOracle {
    pub n: usize,
    pub c: f64,
}

impl BranchOracle {
    fn hk(&self, k: usize) -> f64 {
        h2((1.0 + self.c.powi(k as i32)) / 2.0)
    }

    pub fn mi(&self, m: usize) -> f64 {
        self.hk(self.n) + self.hk(m) - self.hk(self.n - m)
    }

    /// `I(S:F_l|F_1)` with `F_l` disjoint from `F_1`.
    pub fn cmi_given_first(&self, l: usize) -> f64 {
        self.mi(l + 1) - self.mi(1)
    }
}

pub fn c1_ghz_plateau() -> Result<String, String> {
    let n = 8;
    let ghz = states::ghz_state(n).map_err(err)?;
    let curve = darwinism::pip_scan(&ghz, &darwinism::single_fragments(n), Quantity::SymmetricI, &SamplingConfig::default())
        .map_err(err)?;
    let rep = darwinism::plateau_detect(&curve, 0.1).map_err(err)?;
    // any proper block sees the classically correlated mixture: 1 bit; all of E purifies S: 2 bits
    for p in &curve.points {
        let want = if p.ell < n { 1.0 } else { 2.0 };
        ensure((p.mean_i - want).abs() <= 1e-9, || format!("ell={} mean={}", p.ell, p.mean_i))?;
    }
    ensure(curve.points.len() == n, || "missing PIP points".into())?;
    ensure(rep.f_delta_size == Some(1), || format!("#F_δ={:?}", rep.f_delta_size))?;
    ensure((rep.redundancy - 8.0).abs() < 1e-12, || format!("R_δ={}", rep.redundancy))?;
    Ok(format!("I(ℓ<8)=1, I(8)=2, #F_δ=1, R_δ={}", rep.redundancy))
}

pub fn c2_cmi_scaling() -> Result<String, String> {
    let ghz = states::ghz_state(8).map_err(err)?;
    let r = darwinism::cmi_scaling_check(&ghz, &darwinism::single_fragments(8), 0.1, 1, 1.0, &CmiScalingConfig::default())
        .map_err(err)?;
    ensure(r.applicable && !r.region.is_empty(), || "empty admissible region".into())?;
    ensure(r.max_cmi_bits.abs() <= 1e-9, || format!("max CMI {}", r.max_cmi_bits))?;
    ensure((r.bound_bits - 0.2).abs() < 1e-12 && r.satisfied, || format!("bound {}", r.bound_bits))?;
    Ok(format!("max CMI {:.3e} over {} (k,l) ≤ {}", r.max_cmi_bits, r.region.len(), r.bound_bits))
}

pub fn c3_discord_bounds() -> Result<String, String> {
    let opt = OptimizerConfig::default();
    let n = 8;
    let ghz = states::ghz_state(n).map_err(err)?;
    let frags = darwinism::single_fragments(n);
    let curve = darwinism::pip_scan(&ghz, &frags, Quantity::SymmetricI, &SamplingConfig::default()).map_err(err)?;
    let rep = darwinism::plateau_detect(&curve, 0.1).map_err(err)?;
    let b = darwinism::discord_bound_check(&ghz, &frags, &rep.per_fragment_deficits, &rep, curve.h_s, &opt).map_err(err)?;
    ensure(b.lhs <= 1e-6, || format!("GHZ discord {}", b.lhs))?;
    ensure(b.ok && b.lhs <= b.rhs10 + 1e-6, || format!("{b:?}"))?;
    if let Some(r11) = b.rhs11 {
        ensure(b.lhs <= r11 + 1e-6, || format!("rhs11 {r11}"))?;
    }
    // one fragment holding the purification: D(S:F̌) = H_S
    let p = 0.7;
    let zero = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let one = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let pure = states::branching_state(&[p, 1.0 - p], &[vec![zero], vec![one]]).map_err(err)?;
    let d = darwinlab::infotheory::discord(&pure, &["F1"], &["S"], &opt).map_err(err)?.value();
    ensure((d - h2(p)).abs() <= 1e-6, || format!("pure discord {d} vs H_S {}", h2(p)))?;
    Ok(format!("GHZ8 avg discord {:.2e}; pure one-fragment D={d:.9} = H_S", b.lhs))
}

fn count_failures(rows: &[certify::CertRow]) -> usize {
    rows.iter().filter(|r| r.margin < -1e-9).count()
}

pub fn c4_certification() -> Result<String, String> {
    let seed = 2024;
    let ssa = certify::certify(Check::Ssa, 1000, seed).map_err(err)?;
    let dpi = certify::certify(Check::Dpi, 1000, seed).map_err(err)?;
    let hol = certify::certify(Check::HolevoMono, 500, seed).map_err(err)?;
    let bad = count_failures(&ssa) + count_failures(&dpi) + count_failures(&hol);
    ensure(ssa.len() == 1000 && dpi.len() == 1000 && hol.len() == 500, || "row count".into())?;
    ensure(bad == 0, || format!("{bad} violations"))?;
    let worst = ssa.iter().chain(&dpi).chain(&hol).map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(format!("2500 samples, 0 violations, min margin {worst:.3e}"))
}

pub fn c5_afw() -> Result<String, String> {
    let rows = certify::certify(Check::Afw, 200, 2024).map_err(err)?;
    ensure(rows.len() == 400, || format!("{} rows", rows.len()))?;
    let bad = count_failures(&rows);
    ensure(bad == 0, || format!("{bad} violations"))?;
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(format!("200 MI + 200 CMI samples, 0 violations, min margin {worst:.3e}"))
}

pub fn c6_recovery() -> Result<String, String> {
    let rows = certify::certify(Check::Recovery, 500, 2024).map_err(err)?;
    let bad: Vec<_> = rows.iter().filter(|r| r.margin < -1e-9).collect();
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    ensure(bad.is_empty(), || format!("{} of 500 samples violate, worst margin {worst:.3e}", bad.len()))?;

    let space = HilbertSpace::qubits(&["S"]).map_err(err)?;
    let st = |re: &[f64]| QState::from_density(space.clone(), CMatrix::from_real(2, 2, re).unwrap()).unwrap();
    let mixed = Ensemble::new(vec![(0.3, st(&[0.9, 0.2, 0.2, 0.1])), (0.7, st(&[0.25, -0.1, -0.1, 0.75]))]).map_err(err)?;
    let diag = Ensemble::new(vec![(0.4, st(&[0.8, 0.0, 0.0, 0.2])), (0.6, st(&[0.1, 0.0, 0.0, 0.9]))]).map_err(err)?;
    let hadamard = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).unwrap().scale_re(std::f64::consts::FRAC_1_SQRT_2);
    let unitary = Channel::unitary(&hadamard).map_err(err)?;
    let dephase = Channel::dephasing(2, 1.0).map_err(err)?;
    for (name, e, ch) in [("unitary", &mixed, &unitary), ("dephasing", &diag, &dephase)] {
        let r = certify::recovery_row(e, ch).map_err(err)?;
        ensure(r.margin.abs() <= 1e-9 && r.rhs_bits.abs() <= 1e-9, || format!("{name}: {r:?}"))?;
    }
    Ok(format!("500 samples, 0 violations, min margin {worst:.3e}; exact cases tight"))
}

pub fn c7_backflow() -> Result<String, String> {
    let base = ModelConfig { n_env: 6, steps: 6, ..Default::default() };
    let zero = nonmarkov::backflow(&base, &AncillaMode::Maxent, None).map_err(err)?;
    ensure(zero.blp_total.abs() <= 1e-9 && zero.cmi_backflow_total.abs() <= 1e-9, || {
        format!("g=0: blp {} cmi {}", zero.blp_total, zero.cmi_backflow_total)
    })?;
    // first CNOT collision makes the two branches orthogonal: d = 1, then 0
    for (t, d) in zero.trace_distance.iter().enumerate() {
        let want = if t == 0 { 1.0 } else { 0.0 };
        ensure((d - want).abs() <= 1e-9, || format!("g=0 d({t})={d}"))?;
    }
    let mut parts = vec![];
    for g in [0.3, 0.8, FRAC_PI_2] {
        let s = nonmarkov::backflow(&ModelConfig { g, ..base.clone() }, &AncillaMode::Maxent, None).map_err(err)?;
        ensure(s.blp_total > 0.0 && s.cmi_backflow_total > 0.0, || {
            format!("g={g}: blp {} cmi {}", s.blp_total, s.cmi_backflow_total)
        })?;
        parts.push(format!("g={g:.3}: {:.3}/{:.3}", s.blp_total, s.cmi_backflow_total));
    }
    Ok(format!("g=0 both 0; {}", parts.join(", ")))
}

pub fn c8_bound22() -> Result<String, String> {
    let opt = OptimizerConfig::default();
    let n = 8;
    let delta = 0.1;
    let mut parts = vec![];
    for c in [0.0, 0.3, 0.6] {
        let st = states::overlap_branching_state(n, c).map_err(err)?;
        let curve = darwinism::pip_scan(&st, &darwinism::single_fragments(n), Quantity::SymmetricI, &SamplingConfig::default())
            .map_err(err)?;
        let rep = darwinism::plateau_detect(&curve, delta).map_err(err)?;
        let f = rep.f_delta_size.ok_or_else(|| format!("c={c}: no plateau"))?;
        let r = nonmarkov::bound22_check(&st, delta, f, &opt).map_err(err)?;
        let oracle = BranchOracle { n, c };
        ensure((r.delta_prime - (1.0 - oracle.mi(1))).abs() <= 1e-9, || format!("c={c}: δ′ {}", r.delta_prime))?;
        for row in &r.rows {
            ensure((row.lhs - oracle.cmi_given_first(row.l)).abs() <= 1e-9, || format!("c={c} l={}: lhs {}", row.l, row.lhs))?;
        }
        let admissible = r.rows.iter().filter(|x| x.applicable).count();
        ensure(admissible == n - 2 * f, || format!("c={c}: {admissible} admissible rows"))?;
        ensure(r.satisfied, || {
            let worst = r.rows.iter().filter(|x| x.applicable).map(|x| x.lhs).fold(0.0, f64::max);
            format!("c={c}: lhs {worst} > rhs {} (+{})", r.rhs, r.tolerance)
        })?;
        parts.push(format!("c={c}: #F={f} max lhs {:.3} ≤ {:.3}", r.rows.iter().filter(|x| x.applicable).map(|x| x.lhs).fold(0.0, f64::max), r.rhs));
    }
    Ok(parts.join("; "))
}

pub fn c9_identity_chain() -> Result<String, String> {
    let cfg = ModelConfig { n_env: 6, steps: 6, ..Default::default() };
    let basis = PointerBasis::computational(SubsystemLabel::qubit("S"));
    let bare = nonmarkov::run_model(&cfg, &AncillaMode::None).map_err(err)?;
    let with_a = nonmarkov::run_model(&cfg, &AncillaMode::Measured(basis.clone())).map_err(err)?;
    // S only controls, so copying its pointer value before or after the run agrees
    let rebuilt = states::measured_ancilla_state(bare.last(), &basis).map_err(err)?;
    let (x, y) = (with_a.last().ket().unwrap(), rebuilt.ket().unwrap());
    let ov: C64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    ensure((ov.norm() - 1.0).abs() <= 1e-9, || format!("ancilla run overlap {}", ov.norm()))?;

    let e_sub = nonmarkov::default_e_sub(6);
    let r = nonmarkov::bound29_check(bare.last(), &basis, &e_sub, &OptimizerConfig::default(), &Bound29Config::default())
        .map_err(err)?;
    ensure((r.i_as_e - r.i_s_e).abs() <= 1e-9, || format!("(a) {} vs {}", r.i_as_e, r.i_s_e))?;
    ensure((r.cmi - r.discord).abs() <= 1e-6, || format!("(b) {} vs {}", r.cmi, r.discord))?;
    ensure(r.decoherence_factor <= 1e-9, || format!("decoherence factor {}", r.decoherence_factor))?;
    ensure(r.discord <= 1e-3 && r.c_ok == Some(true), || format!("(c) D={}", r.discord))?;
    Ok(format!("(a) Δ={:.1e} (b) Δ={:.1e} (c) D={:.1e}", (r.i_as_e - r.i_s_e).abs(), (r.cmi - r.discord).abs(), r.discord))
}

pub fn c10_sweep() -> Result<String, String> {
    let base = ModelConfig { n_env: 6, steps: 6, ..Default::default() };
    let rows = nonmarkov::redundancy_vs_nonmarkovianity_sweep(&base, &[0.0, 0.3, 0.8], 0.1, SweepChecks::default(), &OptimizerConfig::default())
        .map_err(err)?;
    for w in rows.windows(2) {
        ensure(w[1].r_delta <= w[0].r_delta + 1e-12, || format!("R_δ rises: {} → {}", w[0].r_delta, w[1].r_delta))?;
        ensure(w[1].blp_total >= w[0].blp_total - 1e-12, || format!("BLP falls at g={}", w[1].g))?;
        ensure(w[1].cmi_backflow_total >= w[0].cmi_backflow_total - 1e-12, || format!("CMI backflow falls at g={}", w[1].g))?;
    }
    let desc: Vec<String> = rows.iter().map(|r| format!("g={}: R={} blp={:.3} cmi={:.3}", r.g, r.r_delta, r.blp_total, r.cmi_backflow_total)).collect();
    Ok(desc.join("; "))
}

/// The ten criteria evaluated through the library.
pub fn library_criteria() -> Vec<Criterion> {
    vec![
        Criterion::new(1, "ghz-plateau", 5, c1_ghz_plateau),
        Criterion::new(2, "cmi-scaling", 10, c2_cmi_scaling),
        Criterion::new(3, "discord-bounds", 60, c3_discord_bounds),
        Criterion::new(4, "ssa-dpi-holevo", 120, c4_certification),
        Criterion::new(5, "afw-bounds", 120, c5_afw),
        Criterion::new(6, "petz-recovery", 180, c6_recovery),
        Criterion::new(7, "backflow-dichotomy", 60, c7_backflow),
        Criterion::new(8, "bound-22", 300, c8_bound22),
        Criterion::new(9, "identity-chain", 60, c9_identity_chain),
        Criterion::new(10, "redundancy-sweep", 300, c10_sweep),
    ]
}
