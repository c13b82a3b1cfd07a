//! Partial-information-plane scans, plateau detection and redundancy, and
//! the discord and conditional-mutual-information checks that follow from a
//! plateau.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::infotheory::{self, cmi_positions, mi_positions, Bits};
use crate::measurement::{self, OptimizerConfig};
use crate::par;
use crate::rng;
use crate::states::{PointerBasis, QState};

const PURPOSE_SUBSETS: u32 = 2;
const PURPOSE_ORDERINGS: u32 = 3;

/// Comparison slack for threshold crossings, to absorb rounding in values
/// that sit exactly on the threshold.
const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `I(S:F)`.
    SymmetricI,
    /// `χ(Π̂_S : F)`: Holevo information of `F` after measuring `S` in its pointer basis.
    HolevoPointer,
    /// `J(S:F̌)`: classical correlation with the measurement on `F`.
    AccessibleJ,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric_i" | "mi" => Ok(Quantity::SymmetricI),
            "holevo_pointer" | "holevo" => Ok(Quantity::HolevoPointer),
            "accessible_j" | "j" => Ok(Quantity::AccessibleJ),
            other => arg_err(format!("unknown quantity {other}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Subset sizes with at most this many subsets are averaged exhaustively.
    pub exhaustive_cap: u64,
    /// Monte Carlo subsets per size otherwise.
    pub n_subsets: usize,
    pub seed: u64,
    /// Used by [`Quantity::AccessibleJ`].
    pub optimizer: OptimizerConfig,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            exhaustive_cap: 10_000,
            n_subsets: 200,
            seed: 0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipPoint {
    pub ell: usize,
    pub mean_i: f64,
    /// Sample standard deviation over the subsets (0 for a single subset).
    pub std_i: f64,
    pub n_subsets: usize,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PIPCurve {
    pub n_fragments: usize,
    pub points: Vec<PipPoint>,
    /// Pointer-basis entropy `H(Π̂_S)`.
    pub h_s: f64,
    pub quantity: Quantity,
    /// The quantity for each single fragment, in fragment order.
    pub single_values: Vec<f64>,
}

impl PIPCurve {
    pub fn mean_at(&self, ell: usize) -> Option<f64> {
        self.points.iter().find(|p| p.ell == ell).map(|p| p.mean_i)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarwinReport {
    pub delta: f64,
    pub n_fragments: usize,
    /// Smallest `ℓ` whose mean reaches `(1−δ)H_S`.
    pub f_delta_size: Option<usize>,
    /// `N / #F_δ`; 0 when the threshold is never reached.
    pub redundancy: f64,
    pub per_fragment_deficits: Vec<f64>,
    pub avg_deficit: f64,
    /// A crossing exists below `N/2` and the condition also holds at `ℓ = ⌈N/2⌉`.
    pub plateau_found: bool,
    /// The condition holds for every `ℓ` in `[#F_δ, N − #F_δ]`.
    pub robust_plateau: bool,
}

struct Setup {
    system: Vec<usize>,
    fragments: Vec<Vec<usize>>,
}

fn setup<S: AsRef<str>>(rho: &QState, fragments: &[Vec<S>]) -> Result<Setup> {
    if fragments.is_empty() {
        return arg_err("empty fragment list");
    }
    let space = rho.space();
    let mut used = Vec::new();
    let mut frag_pos = Vec::with_capacity(fragments.len());
    for f in fragments {
        if f.is_empty() {
            return arg_err("empty fragment");
        }
        let pos = space.positions(f)?;
        if pos.iter().any(|p| used.contains(p)) {
            return arg_err("fragments are not disjoint");
        }
        used.extend(pos.iter().copied());
        frag_pos.push(pos);
    }
    let system: Vec<usize> = (0..space.len()).filter(|p| !used.contains(p)).collect();
    if system.len() != 1 {
        return arg_err(format!(
            "fragments must cover everything but one system factor ({} left)",
            system.len()
        ));
    }
    Ok(Setup {
        system,
        fragments: frag_pos,
    })
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn evaluate(
    rho: &QState,
    quantity: Quantity,
    system: &[usize],
    frag: &[usize],
    basis: &PointerBasis,
    opt: &OptimizerConfig,
) -> Result<f64> {
    match quantity {
        Quantity::SymmetricI => Ok(mi_positions(rho, system, frag)),
        Quantity::HolevoPointer => {
            let ids: Vec<&str> = frag.iter().map(|&p| rho.space().factors()[p].id.as_str()).collect();
            Ok(infotheory::holevo_pointer(rho, basis, &ids)?.value())
        }
        Quantity::AccessibleJ => Ok(measurement::optimize(rho, frag, system, opt)?.optimum.value()),
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = par::pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (par::pairwise_sum(&dev) / (n - 1.0)).sqrt())
}

/// Scan with the computational basis of the system factor as pointer basis.
pub fn pip_scan<S: AsRef<str>>(
    rho: &QState,
    fragments: &[Vec<S>],
    quantity: Quantity,
    sampling: &SamplingConfig,
) -> Result<PIPCurve> {
    let st = setup(rho, fragments)?;
    let basis = PointerBasis::computational(rho.space().factors()[st.system[0]].clone());
    pip_scan_with_basis(rho, fragments, quantity, &basis, sampling)
}

/// Averages `quantity` over size-`ℓ` unions of fragments for `ℓ = 1..N`.
pub fn pip_scan_with_basis<S: AsRef<str>>(
    rho: &QState,
    fragments: &[Vec<S>],
    quantity: Quantity,
    basis: &PointerBasis,
    sampling: &SamplingConfig,
) -> Result<PIPCurve> {
    let st = setup(rho, fragments)?;
    if rho.space().factors()[st.system[0]].id != basis.subsystem().id {
        return arg_err("pointer basis is not on the system factor");
    }
    let n = st.fragments.len();
    let h_s = infotheory::pointer_entropy(rho, basis)?.value();

    // (ell, fragment indices) for every subset to evaluate
    let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut exhaustive = Vec::with_capacity(n);
    for ell in 1..=n {
        if binomial(n, ell) <= sampling.exhaustive_cap {
            exhaustive.push(true);
            jobs.extend(combinations(n, ell).into_iter().map(|c| (ell, c)));
        } else {
            exhaustive.push(false);
            let mut r = rng::substream(sampling.seed, PURPOSE_SUBSETS, ell as u64);
            for _ in 0..sampling.n_subsets.max(1) {
                let mut c = index::sample(&mut r, n, ell).into_vec();
                c.sort_unstable();
                jobs.push((ell, c));
            }
        }
    }
    let values = par::map_indexed(jobs.len(), |j| {
        let frag: Vec<usize> = jobs[j].1.iter().flat_map(|&i| st.fragments[i].iter().copied()).collect();
        evaluate(rho, quantity, &st.system, &frag, basis, &sampling.optimizer)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let mut points = Vec::with_capacity(n);
    let mut single_values = Vec::new();
    let mut start = 0;
    for ell in 1..=n {
        let end = start + jobs[start..].iter().take_while(|j| j.0 == ell).count();
        let vals = &values[start..end];
        if ell == 1 && exhaustive[0] {
            single_values = vals.to_vec();
        }
        let (mean_i, std_i) = mean_std(vals);
        points.push(PipPoint {
            ell,
            mean_i,
            std_i,
            n_subsets: vals.len(),
            exhaustive: exhaustive[ell - 1],
        });
        start = end;
    }
    if single_values.is_empty() {
        single_values = (0..n)
            .map(|i| evaluate(rho, quantity, &st.system, &st.fragments[i], basis, &sampling.optimizer))
            .collect::<Result<_>>()?;
    }
    Ok(PIPCurve {
        n_fragments: n,
        points,
        h_s,
        quantity,
        single_values,
    })
}

/// First-crossing plateau detection at deficit `delta`.
pub fn plateau_detect(curve: &PIPCurve, delta: f64) -> Result<DarwinReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return arg_err(format!("delta {delta} outside (0,1)"));
    }
    if curve.h_s <= 1e-12 {
        return Err(Error::DegenerateInput(
            "system carries no pointer information (H_S = 0)".into(),
        ));
    }
    let n = curve.n_fragments;
    let threshold = (1.0 - delta) * curve.h_s;
    let reaches = |ell: usize| {
        curve
            .mean_at(ell)
            .is_some_and(|m| m >= threshold - THRESHOLD_SLACK)
    };
    let f_delta = (1..=n).find(|&ell| reaches(ell));
    // A crossing at N/2 is what any pure state gives by the symmetry
    // I(ℓ) + I(N−ℓ) = 2H(S); a plateau needs room on both sides of it.
    let plateau_found = f_delta.is_some_and(|f| 2 * f < n) && reaches(n.div_ceil(2));
    let robust_plateau = match f_delta {
        Some(f) if f <= n - f => (f..=n - f).all(reaches),
        _ => false,
    };
    let per_fragment_deficits: Vec<f64> = curve.single_values.iter().map(|v| 1.0 - v / curve.h_s).collect();
    let avg_deficit = per_fragment_deficits.iter().sum::<f64>() / per_fragment_deficits.len().max(1) as f64;
    Ok(DarwinReport {
        delta,
        n_fragments: n,
        f_delta_size: f_delta,
        redundancy: f_delta.map_or(0.0, |f| n as f64 / f as f64),
        per_fragment_deficits,
        avg_deficit,
        plateau_found,
        robust_plateau,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordBoundReport {
    /// Average fragmentary discord `(1/N) Σ D(S:F̌_i)`.
    pub lhs: f64,
    pub per_fragment: Vec<f64>,
    /// `δ̄ H_S` with `δ̄` the mean of the supplied deficits.
    pub rhs10: f64,
    /// `[1 − (1−δ̄) R_δ / N] H_S`, only when `#F_δ ≤ N/2`.
    pub rhs11: Option<f64>,
    /// Largest optimizer gap estimate among the fragments.
    pub optimizer_gap: f64,
    pub ok: bool,
}

/// Checks the average fragmentary discord against both plateau bounds.
///
/// `delta_i` are per-fragment deficits; `darwin` supplies `#F_δ` and `R_δ`.
pub fn discord_bound_check<S: AsRef<str>>(
    rho: &QState,
    fragments: &[Vec<S>],
    delta_i: &[f64],
    darwin: &DarwinReport,
    h_s: f64,
    opt: &OptimizerConfig,
) -> Result<DiscordBoundReport> {
    let st = setup(rho, fragments)?;
    let n = st.fragments.len();
    if delta_i.len() != n {
        return arg_err("one deficit per fragment required");
    }
    let system_id = vec![rho.space().factors()[st.system[0]].id.clone()];
    let owned: Vec<Vec<String>> = fragments
        .iter()
        .map(|f| f.iter().map(|x| x.as_ref().to_string()).collect())
        .collect();
    let fd = infotheory::avg_fragmentary_discord(rho, &system_id, &owned, opt)?;
    let delta = delta_i.iter().sum::<f64>() / n as f64;
    let rhs10 = delta * h_s;
    let rhs11 = match darwin.f_delta_size {
        Some(f) if 2 * f <= n => Some((1.0 - (1.0 - delta) * darwin.redundancy / n as f64) * h_s),
        _ => None,
    };
    let lhs = fd.mean.value();
    let bound = rhs11.map_or(rhs10, |r| r.min(rhs10));
    Ok(DiscordBoundReport {
        lhs,
        per_fragment: fd.per_fragment,
        rhs10,
        rhs11,
        optimizer_gap: fd.max_gap,
        ok: lhs <= bound + 1e-6,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmiScalingConfig {
    /// Random fragment orderings in addition to the canonical one.
    pub orderings: usize,
    pub seed: u64,
    pub k_max: Option<usize>,
    pub l_max: Option<usize>,
}

impl Default for CmiScalingConfig {
    fn default() -> Self {
        Self {
            orderings: 8,
            seed: 0,
            k_max: None,
            l_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMIScalingReport {
    pub delta: f64,
    /// Admissible `(k, l)`: `k ≥ #F_δ`, `l ≥ 1`, `k + l ≤ N − #F_δ`.
    pub region: Vec<(usize, usize)>,
    pub max_cmi_bits: f64,
    /// `(k, l, ordering)` at the maximum; ordering 0 is canonical.
    pub argmax: Option<(usize, usize, usize)>,
    /// `2δH_S`.
    pub bound_bits: f64,
    pub applicable: bool,
    pub satisfied: bool,
}

/// Evaluates `I(S:F_l|F_k)` over the admissible region, with `F_k` the first
/// `k` fragments of an ordering and `F_l` the next `l`.
pub fn cmi_scaling_check<S: AsRef<str>>(
    rho: &QState,
    fragments: &[Vec<S>],
    delta: f64,
    f_delta_size: usize,
    h_s: f64,
    cfg: &CmiScalingConfig,
) -> Result<CMIScalingReport> {
    let st = setup(rho, fragments)?;
    let n = st.fragments.len();
    if f_delta_size == 0 {
        return arg_err("#F_δ must be at least 1");
    }
    let k_max = cfg.k_max.unwrap_or(n);
    let l_max = cfg.l_max.unwrap_or(n);
    let mut region = Vec::new();
    for k in f_delta_size..=k_max.min(n) {
        for l in 1..=l_max {
            if k + l + f_delta_size > n {
                break;
            }
            region.push((k, l));
        }
    }
    let bound = 2.0 * delta * h_s;
    if region.is_empty() {
        return Ok(CMIScalingReport {
            delta,
            region,
            max_cmi_bits: 0.0,
            argmax: None,
            bound_bits: bound,
            applicable: false,
            satisfied: true,
        });
    }
    let mut orderings = vec![(0..n).collect::<Vec<usize>>()];
    for o in 0..cfg.orderings {
        let mut r = rng::substream(cfg.seed, PURPOSE_ORDERINGS, o as u64);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        orderings.push(perm);
    }
    let jobs: Vec<(usize, usize, usize)> = (0..orderings.len())
        .flat_map(|o| region.iter().map(move |&(k, l)| (k, l, o)))
        .collect();
    let blocks = |ord: &[usize], from: usize, to: usize| -> Vec<usize> {
        ord[from..to].iter().flat_map(|&i| st.fragments[i].iter().copied()).collect()
    };
    let values = par::map_indexed(jobs.len(), |j| {
        let (k, l, o) = jobs[j];
        let ord = &orderings[o];
        cmi_positions(rho, &st.system, &blocks(ord, k, k + l), &blocks(ord, 0, k))
    });
    let mut best = 0;
    for (j, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = j;
        }
    }
    let max = values[best];
    Ok(CMIScalingReport {
        delta,
        region,
        max_cmi_bits: max,
        argmax: Some(jobs[best]),
        bound_bits: bound,
        applicable: true,
        satisfied: max <= bound + 1e-9,
    })
}

/// Single-qubit fragments `F1..FN` of a state built on `S, F1..FN`.
pub fn single_fragments(n: usize) -> Vec<Vec<String>> {
    crate::states::fragment_ids(n).into_iter().map(|f| vec![f]).collect()
}

/// Discord of the block made of the first `size` fragments, measured on the block.
pub fn block_discord<S: AsRef<str>>(
    rho: &QState,
    fragments: &[Vec<S>],
    size: usize,
    opt: &OptimizerConfig,
) -> Result<(Bits, f64)> {
    let st = setup(rho, fragments)?;
    if size == 0 || size > st.fragments.len() {
        return arg_err("block size out of range");
    }
    let block: Vec<usize> = st.fragments[..size].iter().flatten().copied().collect();
    let i = mi_positions(rho, &st.system, &block);
    let j = measurement::optimize(rho, &block, &st.system, opt)?;
    Ok((Bits(i - j.optimum.value()), j.gap_estimate))
}
