//! Entropic functionals in bits: von Neumann entropy, (conditional) mutual
//! information, Holevo quantities, classical correlation and discord.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::measurement::{self, MeasurementOptResult, OptimizerConfig};
use crate::states::{Ensemble, PointerBasis, QState};
use crate::tensor::{self, CMatrix, SUPPORT_TOL};

/// Outcomes with probability below this are dropped before conditioning.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

/// An information quantity in bits (log base 2).
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Bits(pub f64);

impl Bits {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts a value in nats.
    pub fn from_nats(n: f64) -> Self {
        Bits(n / std::f64::consts::LN_2)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9} bits", self.0)
    }
}

/// `−Σ λ log₂ λ` over eigenvalues above the support cutoff.
pub fn entropy_of_matrix(m: &CMatrix) -> f64 {
    shannon(&tensor::eigvalsh_unchecked(m))
}

/// Shannon entropy in bits; entries at or below the support cutoff count as zero.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > SUPPORT_TOL)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    shannon(&[x, 1.0 - x])
}

pub fn entropy(state: &QState) -> Bits {
    if state.ket().is_some() {
        return Bits(0.0);
    }
    Bits(entropy_of_matrix(state.rho()))
}

/// Entropy of the reduction onto `positions`. For states stored as a vector the
/// smaller of the two complementary reductions is diagonalized.
pub(crate) fn subset_entropy(state: &QState, positions: &[usize]) -> f64 {
    let n = state.space().len();
    let pure = state.ket().is_some();
    if positions.is_empty() || (positions.len() == n && pure) {
        return 0.0;
    }
    let mut target: Vec<usize> = positions.to_vec();
    if pure {
        let complement: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        if state.space().dim_of(&complement) < state.space().dim_of(positions) {
            target = complement;
        }
    }
    entropy_of_matrix(state.reduce_positions(&target).rho())
}

/// Entropy of the reduction onto the given labels.
pub fn entropy_of<S: AsRef<str>>(state: &QState, labels: &[S]) -> Result<Bits> {
    let pos = state.space().positions(labels)?;
    Ok(Bits(subset_entropy(state, &pos)))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u = a.to_vec();
    u.extend_from_slice(b);
    u
}

fn disjoint_positions<S: AsRef<str>>(state: &QState, parts: &[&[S]]) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(parts.len());
    for part in parts {
        let pos = state.space().positions(part)?;
        for prev in &out {
            if pos.iter().any(|p| prev.contains(p)) {
                return arg_err("label sets overlap");
            }
        }
        out.push(pos);
    }
    Ok(out)
}

/// `I(A:B) = H(A) + H(B) − H(AB)`.
pub fn mutual_information<S: AsRef<str>>(state: &QState, a: &[S], b: &[S]) -> Result<Bits> {
    let p = disjoint_positions(state, &[a, b])?;
    Ok(Bits(mi_positions(state, &p[0], &p[1])))
}

pub(crate) fn mi_positions(state: &QState, a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    subset_entropy(state, a) + subset_entropy(state, b) - subset_entropy(state, &union(a, b))
}

/// `I(A:B|C) = H(AC) + H(BC) − H(C) − H(ABC)`.
pub fn conditional_mutual_information<S: AsRef<str>>(
    state: &QState,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Result<Bits> {
    let p = disjoint_positions(state, &[a, b, c])?;
    Ok(Bits(cmi_positions(state, &p[0], &p[1], &p[2])))
}

pub(crate) fn cmi_positions(state: &QState, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    subset_entropy(state, &ac) + subset_entropy(state, &bc)
        - subset_entropy(state, c)
        - subset_entropy(state, &abc)
}

/// Measures `basis` on its subsystem and returns `{p_ŝ, ρ_{rest|ŝ}}`, with
/// `ρ_{rest|ŝ} = ⟨ŝ|ρ|ŝ⟩ / p_ŝ` on the `rest` factors.
pub fn measure_and_condition<S: AsRef<str>>(
    state: &QState,
    basis: &PointerBasis,
    rest: &[S],
) -> Result<Ensemble> {
    let s_pos = state.space().position(&basis.subsystem().id)?;
    if state.space().factors()[s_pos].dim != basis.len() {
        return arg_err("pointer basis dimension does not match subsystem");
    }
    let rest_pos = state.space().positions(rest)?;
    if rest_pos.contains(&s_pos) {
        return arg_err("measured subsystem is also listed as conditioned part");
    }
    let mut keep = rest_pos.clone();
    keep.push(s_pos);
    let reduced = state.reduce_positions(&keep);
    let rspace = reduced.space().clone();
    let local_s = rspace.position(&basis.subsystem().id)?;
    let dims = rspace.dims();
    let rest_space = rspace.subspace(
        &(0..rspace.len()).filter(|&p| p != local_s).collect::<Vec<_>>(),
    );
    let mut entries = Vec::new();
    for v in basis.vectors() {
        let bra = CMatrix::from_fn(1, v.len(), |_, c| v[c].conj());
        let block = tensor::conjugate_local(reduced.rho(), &dims, &[local_s], &bra, &[1]);
        let p = block.trace().re;
        if p < MIN_OUTCOME_PROB {
            continue;
        }
        entries.push((
            p,
            QState::from_density_unchecked(rest_space.clone(), block.scale_re(1.0 / p)),
        ));
    }
    let total: f64 = entries.iter().map(|(p, _)| p).sum();
    for e in &mut entries {
        e.0 /= total;
    }
    Ensemble::new(entries)
}

/// `χ = H(Σ p ρ) − Σ p H(ρ)`.
pub fn holevo_of_ensemble(e: &Ensemble) -> Bits {
    let avg = entropy(&e.average()).value();
    let members: f64 = e
        .entries()
        .iter()
        .map(|(p, s)| p * entropy(s).value())
        .sum();
    Bits(avg - members)
}

/// Holevo information of the ensemble obtained by measuring `basis` and
/// conditioning `fragment`.
pub fn holevo_pointer<S: AsRef<str>>(
    state: &QState,
    basis: &PointerBasis,
    fragment: &[S],
) -> Result<Bits> {
    Ok(holevo_of_ensemble(&measure_and_condition(state, basis, fragment)?))
}

/// Entropy of the measured subsystem's pointer-outcome distribution,
/// i.e. the entropy of its marginal after full dephasing in `basis`.
pub fn pointer_entropy(state: &QState, basis: &PointerBasis) -> Result<Bits> {
    let red = state.reduce(&[basis.subsystem().id.as_str()])?;
    let probs: Vec<f64> = basis
        .vectors()
        .iter()
        .map(|v| {
            let col = CMatrix::column(v);
            col.adjoint().matmul(&red.rho().matmul(&col))[(0, 0)].re
        })
        .collect();
    Ok(Bits(shannon(&probs)))
}

/// Classical correlation `J(other : measureď)`: the Holevo information about
/// `other` maximized over rank-1 projective measurements on `measured`.
pub fn accessible_j<S: AsRef<str>>(
    state: &QState,
    measured: &[S],
    other: &[S],
    opt: &OptimizerConfig,
) -> Result<MeasurementOptResult> {
    let p = disjoint_positions(state, &[measured, other])?;
    measurement::optimize(state, &p[0], &p[1], opt)
}

/// Discord together with its ingredients.
#[derive(Clone, Debug)]
pub struct DiscordReport {
    pub discord: Bits,
    pub mutual_information: Bits,
    pub classical: MeasurementOptResult,
}

/// `D(other : measureď) = I − J`. Since the optimizer may under-maximize `J`
/// the value is an upper bound on the true discord.
pub fn discord<S: AsRef<str>>(
    state: &QState,
    measured: &[S],
    other: &[S],
    opt: &OptimizerConfig,
) -> Result<Bits> {
    Ok(discord_report(state, measured, other, opt)?.discord)
}

pub fn discord_report<S: AsRef<str>>(
    state: &QState,
    measured: &[S],
    other: &[S],
    opt: &OptimizerConfig,
) -> Result<DiscordReport> {
    let p = disjoint_positions(state, &[measured, other])?;
    let i = mi_positions(state, &p[0], &p[1]);
    let classical = measurement::optimize(state, &p[0], &p[1], opt)?;
    Ok(DiscordReport {
        discord: Bits(i - classical.optimum.value()),
        mutual_information: Bits(i),
        classical,
    })
}

/// Per-fragment discords `D(S:F̌_i)` and their mean.
#[derive(Clone, Debug)]
pub struct FragmentDiscord {
    pub mean: Bits,
    pub per_fragment: Vec<f64>,
    pub max_gap: f64,
}

/// `(1/N) Σ_i D(system : F̌_i)`, measuring each fragment in turn.
pub fn avg_fragmentary_discord<S: AsRef<str>>(
    state: &QState,
    system: &[S],
    fragments: &[Vec<S>],
    opt: &OptimizerConfig,
) -> Result<FragmentDiscord> {
    if fragments.is_empty() {
        return arg_err("no fragments given");
    }
    let mut seen: Vec<usize> = state.space().positions(system)?;
    for f in fragments {
        let pos = state.space().positions(f)?;
        if pos.iter().any(|p| seen.contains(p)) {
            return arg_err("fragments overlap each other or the system");
        }
        seen.extend(pos);
    }
    let mut per = Vec::with_capacity(fragments.len());
    let mut max_gap = 0.0f64;
    for f in fragments {
        let r = discord_report(state, f.as_slice(), system, opt)?;
        per.push(r.discord.value());
        max_gap = max_gap.max(r.classical.gap_estimate);
    }
    let mean = per.iter().sum::<f64>() / per.len() as f64;
    Ok(FragmentDiscord {
        mean: Bits(mean),
        per_fragment: per,
        max_gap,
    })
}
