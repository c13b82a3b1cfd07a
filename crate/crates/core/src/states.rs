//! Density matrices on labeled spaces and the constructors for the state
//! families studied here: branching states, classical-quantum states,
//! ancilla-extended states and seeded random states.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, pre_err, Error, Result};
use crate::rng;
use crate::tensor::{
    self, kron, kron_vec, partial_trace_positions, reduce_pure, CMatrix, HilbertSpace,
    SubsystemLabel, C64, ONE, ZERO,
};

/// Tolerance for state invariants (Hermiticity, trace, negativity).
pub const STATE_TOL: f64 = 1e-10;

/// Largest environment size accepted by the model constructors.
pub const MAX_ENV_QUBITS: usize = 13;

/// A density matrix on a labeled tensor-product space.
#[derive(Clone, Debug)]
pub struct QState {
    space: HilbertSpace,
    /// Filled on first use for states stored as a vector.
    rho: OnceLock<CMatrix>,
    ket: Option<Vec<C64>>,
}

impl QState {
    /// Pure state from a normalized vector.
    pub fn from_ket(space: HilbertSpace, ket: Vec<C64>) -> Result<Self> {
        if ket.len() != space.total_dim() {
            return arg_err(format!(
                "vector of length {} does not live on {space}",
                ket.len()
            ));
        }
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return pre_err(format!("state vector has squared norm {norm}"));
        }
        Ok(Self::from_ket_unchecked(space, ket))
    }

    /// Pure state from any nonzero vector; the norm is divided out.
    pub fn from_unnormalized_ket(space: HilbertSpace, mut ket: Vec<C64>) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput("zero state vector".into()));
        }
        ket.iter_mut().for_each(|z| *z /= norm);
        Self::from_ket(space, ket)
    }

    pub(crate) fn from_ket_unchecked(space: HilbertSpace, ket: Vec<C64>) -> Self {
        Self {
            rho: OnceLock::new(),
            space,
            ket: Some(ket),
        }
    }

    /// Validated density matrix: Hermitian and unit trace within [`STATE_TOL`],
    /// then projected onto the PSD cone with the same tolerance.
    pub fn from_density(space: HilbertSpace, rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.rows() != space.total_dim() {
            return arg_err(format!(
                "{}x{} matrix does not act on {space}",
                rho.rows(),
                rho.cols()
            ));
        }
        if rho.hermiticity_error() > STATE_TOL {
            return pre_err("density matrix is not Hermitian");
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return pre_err(format!("density matrix trace is {tr}"));
        }
        let rho = tensor::psd_project(&rho, STATE_TOL)?;
        Ok(Self {
            space,
            rho: OnceLock::from(rho),
            ket: None,
        })
    }

    pub(crate) fn from_density_unchecked(space: HilbertSpace, rho: CMatrix) -> Self {
        debug_assert_eq!(rho.rows(), space.total_dim());
        Self {
            space,
            rho: OnceLock::from(rho.hermitize()),
            ket: None,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn rho(&self) -> &CMatrix {
        self.rho.get_or_init(|| {
            CMatrix::outer(self.ket.as_deref().expect("state has a vector or a matrix"))
        })
    }

    /// State vector when the state was built as pure.
    pub fn ket(&self) -> Option<&[C64]> {
        self.ket.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn purity(&self) -> f64 {
        match &self.ket {
            Some(_) => 1.0,
            None => self.rho().frobenius_sq(),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.ket.is_some() || self.purity() > 1.0 - 1e-10
    }

    /// A state vector for a pure state (principal eigenvector when built from a density).
    pub fn pure_vector(&self) -> Result<Vec<C64>> {
        if let Some(k) = &self.ket {
            return Ok(k.clone());
        }
        if !self.is_pure() {
            return pre_err(format!("state is mixed (purity {:.6})", self.purity()));
        }
        let e = tensor::eigh_unchecked(self.rho());
        Ok(e.vectors.column_vec(e.values.len() - 1))
    }

    /// Reduction onto the given labels; the result keeps this state's factor order.
    pub fn reduce<S: AsRef<str>>(&self, keep: &[S]) -> Result<QState> {
        let positions = self.space.positions(keep)?;
        Ok(self.reduce_positions(&positions))
    }

    pub(crate) fn reduce_positions(&self, positions: &[usize]) -> QState {
        let space = self.space.subspace(positions);
        if positions.len() == self.space.len() {
            return self.clone();
        }
        let rho = match &self.ket {
            Some(k) => reduce_pure(k, &self.space, positions),
            None => partial_trace_positions(self.rho(), &self.space, positions)
                .expect("positions come from this space"),
        };
        QState::from_density_unchecked(space, rho)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &QState) -> Result<QState> {
        let space = self.space.extend(&other.space)?;
        match (&self.ket, &other.ket) {
            (Some(a), Some(b)) => Ok(QState::from_ket_unchecked(space, kron_vec(a, b))),
            _ => Ok(QState::from_density_unchecked(
                space,
                kron(self.rho(), other.rho())?,
            )),
        }
    }

    /// Same matrix on a relabeled space of identical dimensions.
    pub fn relabel(&self, space: HilbertSpace) -> Result<QState> {
        if space.dims() != self.space.dims() {
            return arg_err("relabeling must keep factor dimensions");
        }
        Ok(QState {
            space,
            rho: self.rho.clone(),
            ket: self.ket.clone(),
        })
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &QState) -> Result<f64> {
        if self.space != other.space {
            return arg_err("trace distance between states on different spaces");
        }
        Ok(0.5 * tensor::trace_norm(&(self.rho() - other.rho()))?)
    }

    /// Checks the invariants with the given tolerance (Hermitian, unit trace, PSD).
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.rho().hermiticity_error() > tol {
            return pre_err("state is not Hermitian");
        }
        if (self.rho().trace().re - 1.0).abs() > tol {
            return pre_err("state trace differs from 1");
        }
        let min = tensor::eigvalsh_unchecked(self.rho())[0];
        if min < -tol {
            return pre_err(format!("state has negative eigenvalue {min:.3e}"));
        }
        Ok(())
    }
}

/// An orthonormal rank-1 measurement basis on one subsystem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointerBasis {
    subsystem: SubsystemLabel,
    vectors: Vec<Vec<C64>>,
    labels: Vec<f64>,
}

impl PointerBasis {
    pub fn new(subsystem: SubsystemLabel, vectors: Vec<Vec<C64>>, labels: Vec<f64>) -> Result<Self> {
        let d = subsystem.dim;
        if vectors.len() != d || labels.len() != d {
            return arg_err(format!("pointer basis on {} needs {d} vectors and labels", subsystem.id));
        }
        if vectors.iter().any(|v| v.len() != d) {
            return arg_err("pointer basis vector has wrong length");
        }
        for i in 0..d {
            for j in 0..d {
                let ip: C64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip - C64::new(expect, 0.0)).norm() > 1e-10 {
                    return pre_err(format!("pointer basis not orthonormal at ({i},{j})"));
                }
            }
        }
        Ok(Self {
            subsystem,
            vectors,
            labels,
        })
    }

    /// Computational basis with labels `0, 1, …`.
    pub fn computational(subsystem: SubsystemLabel) -> Self {
        let d = subsystem.dim;
        let vectors = (0..d)
            .map(|k| (0..d).map(|i| if i == k { ONE } else { ZERO }).collect())
            .collect();
        Self {
            subsystem,
            vectors,
            labels: (0..d).map(|k| k as f64).collect(),
        }
    }

    /// Basis given by the columns of a unitary.
    pub fn from_unitary(subsystem: SubsystemLabel, u: &CMatrix) -> Result<Self> {
        if u.rows() != subsystem.dim || !u.is_square() {
            return arg_err("unitary does not match subsystem dimension");
        }
        let vectors = (0..u.cols()).map(|c| u.column_vec(c)).collect();
        Self::new(subsystem.clone(), vectors, (0..subsystem.dim).map(|k| k as f64).collect())
    }

    pub fn subsystem(&self) -> &SubsystemLabel {
        &self.subsystem
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn projector(&self, k: usize) -> CMatrix {
        CMatrix::outer(&self.vectors[k])
    }

    /// Unitary whose columns are the basis vectors.
    pub fn unitary(&self) -> CMatrix {
        let d = self.len();
        CMatrix::from_fn(d, d, |r, c| self.vectors[c][r])
    }
}

/// Probability-weighted family of states on a common space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, QState)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, QState)>) -> Result<Self> {
        if entries.is_empty() {
            return arg_err("empty ensemble");
        }
        let space = entries[0].1.space().clone();
        let mut total = 0.0;
        for (p, s) in &entries {
            if *p < 0.0 || !p.is_finite() {
                return arg_err(format!("invalid ensemble weight {p}"));
            }
            if s.space() != &space {
                return arg_err("ensemble members live on different spaces");
            }
            total += p;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return arg_err(format!("ensemble weights sum to {total}"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, QState)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn space(&self) -> &HilbertSpace {
        self.entries[0].1.space()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    /// `Σ p ρ`.
    pub fn average(&self) -> QState {
        let d = self.space().total_dim();
        let mut acc = CMatrix::zeros(d, d);
        for (p, s) in &self.entries {
            acc = &acc + &s.rho().scale_re(*p);
        }
        QState::from_density_unchecked(self.space().clone(), acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RandomKind {
    HaarPure,
    GinibreMixed { rank: usize },
    RandomPointerEnsemble { size: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub kind: RandomKind,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(kind: RandomKind, seed: u64) -> Self {
        Self { kind, seed }
    }
}

/// Seeded random state. Pointer ensembles are produced by [`random_ensemble`].
pub fn random_state(spec: &RandomSpec, space: &HilbertSpace) -> Result<QState> {
    let mut r = rng::stream(spec.seed, 0);
    let d = space.total_dim();
    match spec.kind {
        RandomKind::HaarPure => Ok(QState::from_ket_unchecked(
            space.clone(),
            rng::haar_vector(&mut r, d),
        )),
        RandomKind::GinibreMixed { rank } => {
            if rank == 0 || rank > d {
                return arg_err(format!("Ginibre rank {rank} outside 1..={d}"));
            }
            Ok(ginibre_state(&mut r, space, rank))
        }
        RandomKind::RandomPointerEnsemble { .. } => {
            arg_err("pointer ensembles are sampled with random_ensemble")
        }
    }
}

pub(crate) fn ginibre_state(r: &mut rng::StreamRng, space: &HilbertSpace, rank: usize) -> QState {
    let d = space.total_dim();
    let g = rng::ginibre(r, d, rank);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    QState::from_density_unchecked(space.clone(), m.scale_re(1.0 / tr))
}

/// Seeded ensemble of `size` members with uniform-simplex weights; each member
/// is a Ginibre state of rank drawn uniformly from `1..=dim`.
pub fn random_ensemble(spec: &RandomSpec, space: &HilbertSpace) -> Result<Ensemble> {
    let RandomKind::RandomPointerEnsemble { size } = spec.kind else {
        return arg_err("random_ensemble needs a RandomPointerEnsemble spec");
    };
    if size == 0 {
        return arg_err("ensemble size must be positive");
    }
    let mut r = rng::stream(spec.seed, 0);
    Ok(sample_ensemble(&mut r, space, size))
}

pub(crate) fn sample_ensemble(r: &mut rng::StreamRng, space: &HilbertSpace, size: usize) -> Ensemble {
    use rand::Rng;
    let d = space.total_dim();
    let probs = rng::simplex(r, size);
    let entries = probs
        .into_iter()
        .map(|p| {
            let rank = r.random_range(1..=d);
            (p, ginibre_state(r, space, rank))
        })
        .collect();
    Ensemble { entries }
}

fn check_env_size(n_env: usize) -> Result<()> {
    if n_env == 0 {
        return arg_err("environment needs at least one fragment");
    }
    if n_env > MAX_ENV_QUBITS {
        return Err(Error::Capacity {
            what: "environment fragments",
            requested: n_env,
            cap: MAX_ENV_QUBITS,
        });
    }
    Ok(())
}

fn fragment_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("F{i}")).collect()
}

/// Labels `F1..Fn`.
pub fn fragment_ids(n: usize) -> Vec<String> {
    fragment_labels(n)
}

/// `(|0⟩_S|0…0⟩ + |1⟩_S|1…1⟩)/√2` on `S, F1..Fn`.
pub fn ghz_state(n_env: usize) -> Result<QState> {
    check_env_size(n_env)?;
    let space = HilbertSpace::system_and_fragments(n_env)?;
    let d = space.total_dim();
    let mut ket = vec![ZERO; d];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket[0] = C64::new(s, 0.0);
    ket[d - 1] = C64::new(s, 0.0);
    Ok(QState::from_ket_unchecked(space, ket))
}

/// `Σ_ŝ √P_ŝ |ŝ⟩_S ⊗ (⊗_i |φ_ŝ⟩_{F_i})`.
///
/// `branch_env_states[ŝ][i]` is the pure state of fragment `i` in branch `ŝ`.
pub fn branching_state(probs: &[f64], branch_env_states: &[Vec<Vec<C64>>]) -> Result<QState> {
    check_distribution(probs)?;
    if branch_env_states.len() != probs.len() {
        return arg_err(format!(
            "{} probabilities but {} branches",
            probs.len(),
            branch_env_states.len()
        ));
    }
    let n_env = branch_env_states[0].len();
    check_env_size(n_env)?;
    let frag_dims: Vec<usize> = branch_env_states[0].iter().map(|v| v.len()).collect();
    for branch in branch_env_states {
        if branch.len() != n_env {
            return arg_err("branches have different fragment counts");
        }
        for (v, &d) in branch.iter().zip(&frag_dims) {
            if v.len() != d {
                return arg_err("fragment dimension differs between branches");
            }
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (n - 1.0).abs() > 1e-9 {
                return pre_err("branch fragment state is not normalized");
            }
        }
    }
    let mut factors = vec![SubsystemLabel::new("S", probs.len())];
    factors.extend(
        fragment_labels(n_env)
            .into_iter()
            .zip(&frag_dims)
            .map(|(id, &d)| SubsystemLabel::new(id, d)),
    );
    let space = HilbertSpace::new(factors)?;
    let mut ket = Vec::with_capacity(space.total_dim());
    for (s, branch) in branch_env_states.iter().enumerate() {
        let env = branch
            .iter()
            .skip(1)
            .fold(branch[0].clone(), |acc, v| kron_vec(&acc, v));
        let amp = probs[s].sqrt();
        ket.extend(env.into_iter().map(|z| z * amp));
    }
    // the S digit is most significant, so branch blocks are contiguous
    Ok(QState::from_ket_unchecked(space, ket))
}

/// Two equal-weight qubit branches where each fragment has overlap
/// `⟨φ_0|φ_1⟩ = c` (`|φ_0⟩ = |0⟩`, `|φ_1⟩ = c|0⟩ + √(1−c²)|1⟩`).
pub fn overlap_branching_state(n_env: usize, overlap: f64) -> Result<QState> {
    if !(0.0..=1.0).contains(&overlap) {
        return arg_err(format!("branch overlap {overlap} outside [0, 1]"));
    }
    let zero = vec![ONE, ZERO];
    let tilted = vec![C64::new(overlap, 0.0), C64::new((1.0 - overlap * overlap).sqrt(), 0.0)];
    branching_state(
        &[0.5, 0.5],
        &[vec![zero; n_env], vec![tilted; n_env]],
    )
}

/// `S ⊗ F1..Fn` all in `|0⟩`, with `S` in the given qubit state.
pub fn product_state(n_env: usize, system: &[C64]) -> Result<QState> {
    check_env_size(n_env)?;
    let env = vec![vec![ONE, ZERO]; n_env];
    superposed_system_state(system, &env)
}

/// `(Σ_s a_s |s⟩_S) ⊗ |φ⟩_E`, normalized at construction.
pub fn superposed_system_state(amplitudes: &[C64], env_fragments: &[Vec<C64>]) -> Result<QState> {
    check_env_size(env_fragments.len())?;
    let mut factors = vec![SubsystemLabel::new("S", amplitudes.len())];
    factors.extend(
        fragment_labels(env_fragments.len())
            .into_iter()
            .zip(env_fragments)
            .map(|(id, v)| SubsystemLabel::new(id, v.len())),
    );
    let space = HilbertSpace::new(factors)?;
    let ket = env_fragments
        .iter()
        .fold(amplitudes.to_vec(), |acc, v| kron_vec(&acc, v));
    QState::from_unnormalized_ket(space, ket)
}

/// Equal amplitudes on `d` basis states.
pub fn uniform_amplitudes(d: usize) -> Vec<C64> {
    vec![ONE; d]
}

/// `|Φ⟩_AS ⊗ |0…0⟩` on `A` followed by `space`, where `|Φ⟩ = Σ_i |i⟩_A|i⟩_S/√d`.
pub fn ancilla_extend_maxent(space: &HilbertSpace) -> Result<QState> {
    let s_pos = space.position("S")?;
    let d = space.factors()[s_pos].dim;
    let a = HilbertSpace::new(vec![SubsystemLabel::new("A", d)])?;
    let full = a.extend(space)?;
    let dims = full.dims();
    let mut ket = vec![ZERO; full.total_dim()];
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    // digit of S is at position s_pos + 1; everything else is 0
    let stride_s: usize = dims[s_pos + 2..].iter().product();
    let stride_a: usize = dims[1..].iter().product();
    for i in 0..d {
        ket[i * stride_a + i * stride_s] = amp;
    }
    Ok(QState::from_ket_unchecked(full, ket))
}

/// `Σ_ŝ |ŝ⟩_A ⊗ (|ŝ⟩⟨ŝ|_S ⊗ I)|ψ⟩`: a copy register `A` of the pointer
/// component of `S`, placed before the factors of `psi`.
pub fn measured_ancilla_state(psi: &QState, basis: &PointerBasis) -> Result<QState> {
    let label = &basis.subsystem().id;
    let s_pos = psi.space().position(label)?;
    if psi.space().factors()[s_pos].dim != basis.len() {
        return arg_err("pointer basis dimension does not match subsystem");
    }
    if !psi.is_pure() {
        return pre_err("measured ancilla construction needs a pure state");
    }
    let v = psi.pure_vector()?;
    let d = basis.len();
    let a = HilbertSpace::new(vec![SubsystemLabel::new("A", d)])?;
    let full = a.extend(psi.space())?;
    let col = CMatrix::column(&v);
    let dims = psi.space().dims();
    let mut ket = Vec::with_capacity(full.total_dim());
    for k in 0..d {
        let proj = basis.projector(k);
        let branch = tensor::apply_left(&col, &dims, &[s_pos], &proj, &[d]);
        ket.extend(branch.into_vec());
    }
    Ok(QState::from_ket_unchecked(full, ket))
}

/// `Σ_ŝ P_ŝ |ŝ⟩⟨ŝ| ⊗ τ_ŝ` with the pointer subsystem first.
pub fn cq_state(probs: &[f64], basis: &PointerBasis, conditional: &[QState]) -> Result<QState> {
    check_distribution(probs)?;
    if probs.len() != basis.len() || conditional.len() != basis.len() {
        return arg_err("cq state needs one probability and one state per pointer outcome");
    }
    let env_space = conditional[0].space().clone();
    if conditional.iter().any(|s| s.space() != &env_space) {
        return arg_err("conditional states live on different spaces");
    }
    let sys = HilbertSpace::new(vec![basis.subsystem().clone()])?;
    let space = sys.extend(&env_space)?;
    let d = space.total_dim();
    let mut rho = CMatrix::zeros(d, d);
    for (k, (p, tau)) in probs.iter().zip(conditional).enumerate() {
        if *p == 0.0 {
            continue;
        }
        let block = kron(&basis.projector(k), tau.rho())?;
        rho = &rho + &block.scale_re(*p);
    }
    Ok(QState::from_density_unchecked(space, rho))
}

fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return arg_err("empty probability vector");
    }
    if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return arg_err("probabilities must be non-negative");
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > STATE_TOL {
        return arg_err(format!("probabilities sum to {s}"));
    }
    Ok(())
}

/// Single-qubit `|+⟩`.
pub fn plus() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(s, 0.0), C64::new(s, 0.0)]
}

/// Single-qubit `|−⟩`.
pub fn minus() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(s, 0.0), C64::new(-s, 0.0)]
}
