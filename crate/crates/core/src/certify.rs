//! Seeded sampling certification of the entropic inequalities the rest of the
//! crate leans on. Every sample draws from its own substream, so the rows do
//! not depend on how the work is scheduled.
//!
//! Each row is an inequality `lhs ≤ rhs`; `margin = rhs − lhs`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{self, afw_mi_bound, cmi_afw_bound, epsilon_deviation, partial_swap, Channel};
use crate::error::{Error, Result};
use crate::infotheory::{cmi_positions, mi_positions, subset_entropy};
use crate::par;
use crate::rng::{self, StreamRng};
use crate::states::{ginibre_state, sample_ensemble, QState};
use crate::tensor::{self, HilbertSpace, C64};

/// Rows fail only when `margin < -MARGIN_TOL`.
pub const MARGIN_TOL: f64 = 1e-9;

/// Largest trace-distance deviation drawn by the continuity checks.
pub const AFW_EPS_MAX: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Ssa,
    Dpi,
    HolevoMono,
    Afw,
    Recovery,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Ssa, Check::Dpi, Check::HolevoMono, Check::Afw, Check::Recovery];

    pub fn name(self) -> &'static str {
        match self {
            Check::Ssa => "ssa",
            Check::Dpi => "dpi",
            Check::HolevoMono => "holevo-mono",
            Check::Afw => "afw",
            Check::Recovery => "recovery",
        }
    }

    fn purpose(self) -> u32 {
        10 + self as u32
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown check '{s}'")))
    }
}

/// `all` or a single check name.
pub fn parse_checks(s: &str) -> Result<Vec<Check>> {
    if s == "all" {
        Ok(Check::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertRow {
    pub check_id: String,
    pub sample: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
}

impl CertRow {
    fn new(check_id: &str, sample: usize, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            check_id: check_id.to_string(),
            sample,
            lhs,
            rhs,
            margin,
            passed: margin >= -MARGIN_TOL,
        }
    }
}

/// Runs `samples` draws of `check`. The AFW check yields two rows per sample
/// (`afw-mi`, `afw-cmi`).
pub fn certify(check: Check, samples: usize, seed: u64) -> Result<Vec<CertRow>> {
    let per = par::map_indexed(samples, |i| {
        let mut r = rng::substream(seed, check.purpose(), i as u64);
        match check {
            Check::Ssa => ssa_sample(&mut r, i),
            Check::Dpi => dpi_sample(&mut r, i),
            Check::HolevoMono => holevo_sample(&mut r, i),
            Check::Afw => afw_sample(&mut r, i),
            Check::Recovery => recovery_sample(&mut r, i),
        }
    });
    let mut out = Vec::with_capacity(samples);
    for rows in per {
        out.extend(rows?);
    }
    Ok(out)
}

pub fn certify_many(checks: &[Check], samples: usize, seed: u64) -> Result<Vec<CertRow>> {
    let mut out = Vec::new();
    for &c in checks {
        out.extend(certify(c, samples, seed)?);
    }
    Ok(out)
}

fn random_rank(r: &mut StreamRng, d: usize) -> usize {
    r.random_range(1..=d)
}

fn ssa_sample(r: &mut StreamRng, i: usize) -> Result<Vec<CertRow>> {
    let space = HilbertSpace::qubits(&["A", "B", "C"])?;
    let rank = random_rank(r, 8);
    let st = ginibre_state(r, &space, rank);
    // H(ABC) + H(C) ≤ H(AC) + H(BC)
    let lhs = subset_entropy(&st, &[0, 1, 2]) + subset_entropy(&st, &[2]);
    let rhs = subset_entropy(&st, &[0, 2]) + subset_entropy(&st, &[1, 2]);
    Ok(vec![CertRow::new("ssa", i, lhs, rhs)])
}

fn dpi_sample(r: &mut StreamRng, i: usize) -> Result<Vec<CertRow>> {
    let space = HilbertSpace::qubits(&["A", "B"])?;
    let rank = random_rank(r, 4);
    let st = ginibre_state(r, &space, rank);
    let n_kraus = r.random_range(1..=4);
    let ch = Channel::random(r, 2, 2, n_kraus);
    let out = channels::apply(&ch, &st, &["B"])?;
    let lhs = mi_positions(&out, &[0], &[1]);
    let rhs = mi_positions(&st, &[0], &[1]);
    Ok(vec![CertRow::new("dpi", i, lhs, rhs)])
}

fn holevo_sample(r: &mut StreamRng, i: usize) -> Result<Vec<CertRow>> {
    let space = HilbertSpace::qubits(&["S"])?;
    let size = r.random_range(2..=4);
    let e = sample_ensemble(r, &space, size);
    let n_kraus = r.random_range(1..=4);
    let ch = Channel::random(r, 2, 2, n_kraus);
    let m = channels::holevo_monotonicity_check(&e, &ch)?;
    Ok(vec![CertRow::new("holevo-mono", i, m.chi_out, m.chi_in)])
}

fn afw_sample(r: &mut StreamRng, i: usize) -> Result<Vec<CertRow>> {
    Ok(vec![afw_mi_row(r, i)?, afw_cmi_row(r, i)?])
}

/// Perturbs the channel on `F` only; `|ΔI(S:F)| ≤ AFW(ε)` since `H(S)` is fixed
/// and the bound controls `H(S|F)`.
fn afw_mi_row(r: &mut StreamRng, i: usize) -> Result<CertRow> {
    let space = HilbertSpace::qubits(&["S", "F"])?;
    let eps = r.random_range(0.0..=AFW_EPS_MAX);
    for _ in 0..32 {
        let rank = random_rank(r, 4);
        let st = ginibre_state(r, &space, rank);
        let n_kraus = r.random_range(1..=3);
        let base = Channel::random(r, 2, 2, n_kraus);
        let kick = rng::haar_unitary(r, 2);
        let (pert, realized) = match channels::calibrated_perturbation(&base, &kick, &st, &["F"], eps) {
            Ok(x) => x,
            Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        };
        let ideal = channels::apply(&base, &st, &["F"])?;
        let actual = channels::apply(&pert, &st, &["F"])?;
        let lhs = (mi_positions(&actual, &[0], &[1]) - mi_positions(&ideal, &[0], &[1])).abs();
        let rhs = afw_mi_bound(realized.min(1.0), 2)?.value();
        return Ok(CertRow::new("afw-mi", i, lhs, rhs));
    }
    Err(Error::DegenerateInput("no perturbation reached the drawn deviation".into()))
}

/// `σ = ρ_{S F_k} ⊗ |0⟩⟨0|_{F_l}` has `I(S:F_l|F_k) = 0`. A partial swap between
/// `F_k` and `F_l`, tuned so the output sits at trace distance `ε` from `σ`,
/// is the approximately identity channel; its CMI must stay below `AFW(ε)`.
fn afw_cmi_row(r: &mut StreamRng, i: usize) -> Result<CertRow> {
    let space = HilbertSpace::qubits(&["S", "Fk", "Fl"])?;
    let sk = HilbertSpace::qubits(&["S", "Fk"])?;
    let fl = QState::from_ket(HilbertSpace::qubits(&["Fl"])?, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let eps = r.random_range(0.0..=AFW_EPS_MAX);
    for _ in 0..32 {
        let rank = random_rank(r, 4);
        let sigma = ginibre_state(r, &sk, rank).tensor(&fl)?.relabel(space.clone())?;
        let swapped = |theta: f64| -> Result<QState> {
            let u = partial_swap(2, theta);
            let rho = tensor::conjugate_local(sigma.rho(), &space.dims(), &[1, 2], &u, &[2, 2]);
            Ok(QState::from_density_unchecked(space.clone(), rho))
        };
        let dev = |theta: f64| -> Result<f64> { epsilon_deviation(&swapped(theta)?, &sigma) };
        let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
        if dev(hi)? < eps {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if dev(mid)? < eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = swapped(hi)?;
        let realized = dev(hi)?;
        let lhs = cmi_positions(&tau, &[0], &[2], &[1]);
        let rhs = cmi_afw_bound(realized.min(1.0), 2)?.value();
        return Ok(CertRow::new("afw-cmi", i, lhs, rhs));
    }
    Err(Error::DegenerateInput("no swap angle reached the drawn deviation".into()))
}

/// Petz recovery from the ensemble average:
/// `−2 log₂ Σ p √F(ρ, Φ∘Λ(ρ)) ≤ χ(𝒮) − χ(Λ𝒮)`.
fn recovery_sample(r: &mut StreamRng, i: usize) -> Result<Vec<CertRow>> {
    let space = HilbertSpace::qubits(&["S"])?;
    let size = r.random_range(2..=4);
    let e = sample_ensemble(r, &space, size);
    let n_kraus = r.random_range(1..=4);
    let ch = Channel::random(r, 2, 2, n_kraus);
    let rep = recovery_row(&e, &ch)?;
    Ok(vec![CertRow::new("recovery", i, rep.rhs_bits, rep.chi_in_bits - rep.chi_out_bits)])
}

pub fn recovery_row(e: &crate::states::Ensemble, ch: &Channel) -> Result<channels::RecoveryReport> {
    let petz = channels::petz_recovery(ch, &e.average())?;
    channels::recovery_bound_check(e, ch, &petz)
}

/// Full per-sample recovery reports for the `recovery` command.
pub fn recovery_reports(samples: usize, seed: u64) -> Result<Vec<channels::RecoveryReport>> {
    par::map_indexed(samples, |i| {
        let mut r = rng::substream(seed, Check::Recovery.purpose(), i as u64);
        let space = HilbertSpace::qubits(&["S"])?;
        let size = r.random_range(2..=4);
        let e = sample_ensemble(&mut r, &space, size);
        let n_kraus = r.random_range(1..=4);
        let ch = Channel::random(&mut r, 2, 2, n_kraus);
        recovery_row(&e, &ch)
    })
    .into_iter()
    .collect()
}
