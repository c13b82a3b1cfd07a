//! Multi-start optimization of the classical correlation over rank-1
//! projective measurements.
//!
//! A measurement on a `d`-dimensional part is the column basis of a unitary
//! `U`. Each start is refined by coordinate descent over the `d(d−1)`
//! off-diagonal generators of `U(d)`; a coordinate move right-multiplies `U`
//! by a Givens-type rotation in one column pair, so every step is taken in
//! local coordinates at the current point. Diagonal generators only rephase
//! basis vectors and are skipped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infotheory::{self, Bits, MIN_OUTCOME_PROB};
use crate::par;
use crate::rng;
use crate::states::{PointerBasis, QState};
use crate::tensor::{self, index_table, CMatrix, SubsystemLabel, C64, ZERO};

const PURPOSE_STARTS: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Number of starts; start 0 is the reference (computational) basis, the rest are Haar-random.
    pub starts: usize,
    /// Maximum coordinate sweeps per start.
    pub max_iters: usize,
    /// A sweep improving the objective by less than this shrinks the step.
    pub tol: f64,
    pub initial_step: f64,
    /// A start has converged once a sweep at this step size brings no improvement.
    pub min_step: f64,
    pub seed: u64,
    /// Largest measured dimension accepted.
    pub max_dim: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 500,
            tol: 1e-9,
            initial_step: 0.4,
            min_step: 1e-7,
            seed: 0,
            max_dim: 8,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }
}

#[derive(Clone, Debug)]
pub struct MeasurementOptResult {
    pub optimum: Bits,
    pub basis: PointerBasis,
    pub starts_used: usize,
    pub converged: bool,
    /// Spread (max − min) of the five best local optima.
    pub gap_estimate: f64,
}

/// Measured part `M` and other part `O` of a state, as the blocks
/// `ρ_ab = ⟨a|_M ρ_MO |b⟩_M` on `O`.
struct Blocks {
    dm: usize,
    blocks: Vec<CMatrix>,
    h_other: f64,
}

impl Blocks {
    fn new(state: &QState, measured: &[usize], other: &[usize]) -> Self {
        let mut keep = measured.to_vec();
        keep.extend_from_slice(other);
        let red = state.reduce_positions(&keep);
        let rspace = red.space();
        let local: Vec<usize> = measured
            .iter()
            .map(|&p| {
                rspace
                    .position(&state.space().factors()[p].id)
                    .expect("measured factor kept")
            })
            .collect();
        let (table, dm, dother) = index_table(&rspace.dims(), &local);
        let rho = red.rho();
        let mut blocks = Vec::with_capacity(dm * dm);
        for a in 0..dm {
            for b in 0..dm {
                blocks.push(CMatrix::from_fn(dother, dother, |i, j| {
                    rho[(table[a * dother + i], table[b * dother + j])]
                }));
            }
        }
        let mut other_m = CMatrix::zeros(dother, dother);
        for a in 0..dm {
            other_m = &other_m + &blocks[a * dm + a];
        }
        Self {
            dm,
            blocks,
            h_other: infotheory::entropy_of_matrix(&other_m),
        }
    }

    /// Holevo information about `O` from measuring the columns of `u` on `M`.
    fn objective(&self, u: &CMatrix) -> f64 {
        let dm = self.dm;
        let dother = self.blocks[0].rows();
        let mut conditional = 0.0;
        for k in 0..dm {
            let mut sigma = CMatrix::zeros(dother, dother);
            for a in 0..dm {
                let ca = u[(a, k)].conj();
                if ca == ZERO {
                    continue;
                }
                for b in 0..dm {
                    let w = ca * u[(b, k)];
                    if w == ZERO {
                        continue;
                    }
                    sigma = &sigma + &self.blocks[a * dm + b].scale(w);
                }
            }
            let ev = tensor::eigvalsh_unchecked(&sigma);
            let p: f64 = ev.iter().sum();
            if p < MIN_OUTCOME_PROB {
                continue;
            }
            let normed: Vec<f64> = ev.iter().map(|l| l / p).collect();
            conditional += p * infotheory::shannon(&normed);
        }
        self.h_other - conditional
    }
}

#[derive(Clone, Copy)]
enum Generator {
    Symmetric,
    Antisymmetric,
}

fn rotate(u: &CMatrix, a: usize, b: usize, g: Generator, h: f64) -> CMatrix {
    let mut out = u.clone();
    let (c, s) = (h.cos(), h.sin());
    for r in 0..u.rows() {
        let (ua, ub) = (u[(r, a)], u[(r, b)]);
        match g {
            Generator::Symmetric => {
                let is = C64::new(0.0, s);
                out[(r, a)] = ua * c + ub * is;
                out[(r, b)] = ua * is + ub * c;
            }
            Generator::Antisymmetric => {
                out[(r, a)] = ua * c - ub * s;
                out[(r, b)] = ua * s + ub * c;
            }
        }
    }
    out
}

struct LocalOptimum {
    value: f64,
    basis: CMatrix,
    converged: bool,
}

fn refine(blocks: &Blocks, start: CMatrix, opt: &OptimizerConfig) -> LocalOptimum {
    let dm = blocks.dm;
    let mut u = start;
    let mut val = blocks.objective(&u);
    let mut step = opt.initial_step;
    let mut converged = dm < 2;
    let mut coords = Vec::new();
    for a in 0..dm {
        for b in a + 1..dm {
            coords.push((a, b, Generator::Symmetric));
            coords.push((a, b, Generator::Antisymmetric));
        }
    }
    let mut iters = 0;
    while !converged && iters < opt.max_iters {
        iters += 1;
        let before = val;
        for &(a, b, g) in &coords {
            for sign in [1.0, -1.0] {
                let cand = rotate(&u, a, b, g, sign * step);
                let v = blocks.objective(&cand);
                if v > val {
                    u = cand;
                    val = v;
                    break;
                }
            }
        }
        if val - before < opt.tol {
            if step <= opt.min_step {
                converged = true;
            } else {
                step *= 0.25;
            }
        }
    }
    LocalOptimum {
        value: val,
        basis: u,
        converged,
    }
}

/// Maximizes the Holevo information about `other` over projective
/// measurements on `measured` (both given as factor positions).
pub(crate) fn optimize(
    state: &QState,
    measured: &[usize],
    other: &[usize],
    opt: &OptimizerConfig,
) -> Result<MeasurementOptResult> {
    let space = state.space();
    let dm = space.dim_of(measured);
    if dm > opt.max_dim {
        return Err(Error::Capacity {
            what: "measured dimension for optimization",
            requested: dm,
            cap: opt.max_dim,
        });
    }
    let label = SubsystemLabel::new(
        measured
            .iter()
            .map(|&p| space.factors()[p].id.as_str())
            .collect::<Vec<_>>()
            .join("+"),
        dm,
    );
    let starts = opt.starts.max(1);
    if other.is_empty() || measured.is_empty() {
        return Ok(MeasurementOptResult {
            optimum: Bits(0.0),
            basis: PointerBasis::computational(label),
            starts_used: 0,
            converged: true,
            gap_estimate: 0.0,
        });
    }
    let blocks = Blocks::new(state, measured, other);
    let locals: Vec<LocalOptimum> = par::map_indexed(starts, |i| {
        let start = if i == 0 {
            CMatrix::identity(dm)
        } else {
            let mut r = rng::substream(opt.seed, PURPOSE_STARTS, i as u64);
            rng::haar_unitary(&mut r, dm)
        };
        refine(&blocks, start, opt)
    });
    let max = locals.iter().map(|l| l.value).fold(f64::NEG_INFINITY, f64::max);
    let best = locals
        .iter()
        .position(|l| l.value >= max - 1e-12)
        .expect("at least one start");
    let mut sorted: Vec<f64> = locals.iter().map(|l| l.value).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = &sorted[..sorted.len().min(5)];
    let gap = top[0] - top[top.len() - 1];
    let winner = &locals[best];
    Ok(MeasurementOptResult {
        optimum: Bits(winner.value),
        basis: PointerBasis::from_unitary(label, &winner.basis)?,
        starts_used: starts,
        converged: winner.converged,
        gap_estimate: gap,
    })
}
