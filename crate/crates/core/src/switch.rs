//! Quantum switch: the order of two qubit channels is coherently controlled
//! by an ancillary qubit.
//!
//! Each controller basis vector `c_k` is assigned one definite order. The
//! switch acts on `ρ ⊗ ω` (system, controller) through the Kraus operators
//!
//! ```text
//! K_ij = P_0(E_i, F_j) ⊗ |c_0⟩⟨c_0| + P_1(E_i, F_j) ⊗ |c_1⟩⟨c_1|
//! ```
//!
//! where `P_k` is `E_i F_j` (GAD after PF) or `F_j E_i` (PF after GAD).

use std::fmt;

use crate::channels::{KrausChannel, SeparableMixture};
use crate::error::{check_range, Error, Result};
use crate::qmat::{CMat, DensityMatrix, Ket, Subsystem};
use crate::scalar::Real;

/// A definite order of the two channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelOrder {
    /// Phase flip first, then amplitude damping: Kraus products `E_i F_j`.
    GadAfterPf,
    /// Amplitude damping first, then phase flip: Kraus products `F_j E_i`.
    PfAfterGad,
}

impl fmt::Display for ChannelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelOrder::GadAfterPf => f.write_str("gad-after-pf"),
            ChannelOrder::PfAfterGad => f.write_str("pf-after-gad"),
        }
    }
}

fn orthonormality_deviation<T: Real>(a: &Ket<T>, b: &Ket<T>) -> T {
    let overlap = a.inner(b).norm();
    let na = (a.norm() - T::one()).abs();
    let nb = (b.norm() - T::one()).abs();
    overlap.max(na).max(nb)
}

/// Orthonormal controller basis, each vector labelled for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis<T: Real> {
    vectors: [Ket<T>; 2],
    labels: [String; 2],
}

impl<T: Real> MeasurementBasis<T> {
    pub fn new(vectors: [Ket<T>; 2], labels: [&str; 2]) -> Result<Self> {
        let dev = orthonormality_deviation(&vectors[0], &vectors[1]);
        if !(dev <= T::lit(T::EXACT_TOL)) {
            return Err(Error::NonOrthonormalBasis {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            vectors,
            labels: labels.map(str::to_owned),
        })
    }

    /// `{|0⟩, |1⟩}`
    pub fn computational() -> Self {
        Self::new([Ket::zero(), Ket::one()], ["0", "1"]).expect("orthonormal")
    }

    /// `{|+⟩, |−⟩}`
    pub fn hadamard() -> Self {
        Self::new([Ket::plus(), Ket::minus()], ["+", "-"]).expect("orthonormal")
    }

    /// `{|−⟩, |+⟩}`: puts the `|−⟩` outcome first.
    pub fn hadamard_minus_first() -> Self {
        Self::new([Ket::minus(), Ket::plus()], ["-", "+"]).expect("orthonormal")
    }

    pub fn vectors(&self) -> &[Ket<T>; 2] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }
}

/// Assignment of a definite channel order to each controller basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlAssignment<T: Real> {
    basis: [Ket<T>; 2],
    orders: [ChannelOrder; 2],
}

impl<T: Real> ControlAssignment<T> {
    pub fn new(c0: Ket<T>, order_on_c0: ChannelOrder, c1: Ket<T>, order_on_c1: ChannelOrder) -> Result<Self> {
        let dev = orthonormality_deviation(&c0, &c1);
        if !(dev <= T::lit(T::EXACT_TOL)) {
            return Err(Error::InvalidAssignment(format!(
                "control basis not orthonormal (deviation {dev:e})"
            )));
        }
        if order_on_c0 == order_on_c1 {
            return Err(Error::InvalidAssignment(format!(
                "both controller states assigned {order_on_c0}"
            )));
        }
        Ok(Self {
            basis: [c0, c1],
            orders: [order_on_c0, order_on_c1],
        })
    }

    /// `|0⟩`: GAD after PF, `|1⟩`: PF after GAD.
    pub fn computational() -> Self {
        Self::new(
            Ket::zero(),
            ChannelOrder::GadAfterPf,
            Ket::one(),
            ChannelOrder::PfAfterGad,
        )
        .expect("valid assignment")
    }

    /// `|+⟩`: GAD after PF, `|−⟩`: PF after GAD.
    pub fn hadamard() -> Self {
        Self::new(
            Ket::plus(),
            ChannelOrder::GadAfterPf,
            Ket::minus(),
            ChannelOrder::PfAfterGad,
        )
        .expect("valid assignment")
    }

    pub fn basis(&self) -> &[Ket<T>; 2] {
        &self.basis
    }

    pub fn orders(&self) -> &[ChannelOrder; 2] {
        &self.orders
    }
}

/// Everything the switch needs: channels, assignment, and controller state.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfig<T: Real> {
    pub assignment: ControlAssignment<T>,
    pub controller: DensityMatrix<T>,
    pub gad: KrausChannel<T>,
    pub pf: KrausChannel<T>,
}

impl<T: Real> SwitchConfig<T> {
    pub fn new(
        assignment: ControlAssignment<T>,
        controller: DensityMatrix<T>,
        gad: KrausChannel<T>,
        pf: KrausChannel<T>,
    ) -> Result<Self> {
        for dim in [controller.dim(), gad.dim(), pf.dim()] {
            if dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: dim,
                });
            }
        }
        Ok(Self {
            assignment,
            controller,
            gad,
            pf,
        })
    }

    /// Population of the controller on `c_0`, i.e. the weight a classical
    /// controller would put on `c_0`'s order.
    pub fn weight_on_c0(&self) -> T {
        let c0 = &self.assignment.basis[0];
        let m = self.controller.mat();
        let mut acc = num_complex::Complex::new(T::zero(), T::zero());
        for i in 0..2 {
            for j in 0..2 {
                acc = acc + c0.amp[i].conj() * m.get(i, j) * c0.amp[j];
            }
        }
        acc.re
    }

    /// The causally separable comparator with the same order weights as the
    /// controller's populations in the control basis.
    pub fn separable_counterpart(&self) -> Result<SeparableMixture<T>> {
        let w = self.weight_on_c0().max(T::zero()).min(T::one());
        match self.assignment.orders[0] {
            ChannelOrder::GadAfterPf => SeparableMixture::new(w, &self.gad, &self.pf),
            ChannelOrder::PfAfterGad => SeparableMixture::new(w, &self.pf, &self.gad),
        }
    }
}

/// The `|gad| × |pf|` controlled Kraus operators, ordered `(i, j)` with `j`
/// (phase-flip index) running fastest.
pub fn switch_kraus<T: Real>(cfg: &SwitchConfig<T>) -> Result<Vec<CMat<T>>> {
    let projectors = cfg.assignment.basis.map(|c| c.projector());
    let mut out = Vec::with_capacity(cfg.gad.ops().len() * cfg.pf.ops().len());
    for e in cfg.gad.ops() {
        for f in cfg.pf.ops() {
            let mut k = CMat::zeros(4)?;
            for (order, proj) in cfg.assignment.orders.iter().zip(projectors.iter()) {
                let product = match order {
                    ChannelOrder::GadAfterPf => e * f,
                    ChannelOrder::PfAfterGad => f * e,
                };
                k = &k + &product.tensor(proj)?;
            }
            out.push(k);
        }
    }
    Ok(out)
}

/// `Σ_ij K_ij (ρ ⊗ ω) K_ij†` for controller state `ω`.
pub fn apply_switch<T: Real>(cfg: &SwitchConfig<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let joint = rho.mat().tensor(cfg.controller.mat())?;
    let mut out = CMat::zeros(4)?;
    for k in switch_kraus(cfg)? {
        out = &out + &(&(&k * &joint) * &k.dagger());
    }
    DensityMatrix::new(out)
}

/// One measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T: Real> {
    pub probability: T,
    pub state: DensityMatrix<T>,
    pub label: String,
    /// Set when the probability is below [`Real::DEGENERATE_PROB`]; `state`
    /// is then the maximally mixed placeholder.
    pub degenerate: bool,
}

/// Conditional system states after a controller measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEnsemble<T: Real> {
    pub entries: Vec<Outcome<T>>,
}

impl<T: Real> OutcomeEnsemble<T> {
    /// Builds an ensemble, checking that probabilities are nonnegative and
    /// sum to one.
    pub fn new(entries: Vec<Outcome<T>>) -> Result<Self> {
        let tol = T::lit(T::EXACT_TOL);
        let total: T = entries.iter().map(|o| o.probability).sum();
        if entries.iter().any(|o| !(o.probability >= -tol)) || (total - T::one()).abs() > tol {
            return Err(Error::NotDensityMatrix(format!(
                "outcome probabilities must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        Ok(Self { entries })
    }

    /// `Σ_k p_k ρ_k`
    pub fn average_state(&self) -> Result<DensityMatrix<T>> {
        let mut acc = CMat::zeros(2)?;
        for o in &self.entries {
            acc = &acc + &o.state.mat().scale(o.probability);
        }
        DensityMatrix::new(acc)
    }
}

/// Projective measurement of the controller in `basis`, returning one branch
/// per basis vector in basis order.
pub fn measure_controller<T: Real>(
    joint: &DensityMatrix<T>,
    basis: &MeasurementBasis<T>,
) -> Result<OutcomeEnsemble<T>> {
    if joint.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: joint.dim(),
        });
    }
    let mut entries = Vec::with_capacity(2);
    for (b, label) in basis.vectors.iter().zip(basis.labels.iter()) {
        let block = joint.mat().controller_block(b, b)?;
        let prob = block.trace().re;
        let (state, degenerate) = if prob < T::lit(T::DEGENERATE_PROB) {
            (DensityMatrix::maximally_mixed(2)?, true)
        } else {
            (DensityMatrix::new(block.scale(T::one() / prob))?, false)
        };
        entries.push(Outcome {
            probability: prob.max(T::zero()),
            state,
            label: label.clone(),
            degenerate,
        });
    }
    OutcomeEnsemble::new(entries)
}

/// Largest entry of the system operator `(I ⊗ ⟨b_0|) J (I ⊗ |b_1⟩)`: zero when
/// the joint state is block diagonal in the measurement basis.
pub fn controller_coherence<T: Real>(joint: &DensityMatrix<T>, basis: &MeasurementBasis<T>) -> Result<T> {
    let [b0, b1] = &basis.vectors;
    Ok(joint.mat().controller_block(b0, b1)?.max_abs())
}

/// Unconditioned system state after the switch.
pub fn system_marginal<T: Real>(joint: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(*joint.partial_trace(Subsystem::System)?.mat())
}

/// Branch weight and ground-state populations of the two conditional
/// outputs for `p = q`, `γ = 1` and a diagonal input `diag(r, 1 − r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSplit<T: Real> {
    /// Probability of the first listed branch.
    pub lam: T,
    /// Ground population of the branch with probability `lam`.
    pub pop_lam: T,
    /// Ground population of the branch with probability `1 − lam`.
    pub pop_rest: T,
}

fn closed_form_domain<T: Real>(p: T, r: T) -> Result<()> {
    let pf = p.to_f64().unwrap_or(f64::NAN);
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::OutOfRange {
            name: "p",
            value: pf,
            range: "(0, 1)",
        });
    }
    check_range("r", r.to_f64().unwrap_or(f64::NAN), 0.0, 1.0, "[0, 1]")
}

fn check_branches<T: Real>(lam: T) -> Result<()> {
    let eps = T::lit(T::DEGENERATE_PROB);
    if lam <= eps || lam >= T::one() - eps {
        return Err(Error::DegenerateBranch {
            lam: lam.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Controller `|+⟩`, computational assignment, measured in `{|−⟩, |+⟩}`:
/// `lam` is the `|−⟩` probability, `pop_lam = p_−`, `pop_rest = p_+`.
pub fn closed_form_case1<T: Real>(p: T, r: T) -> Result<BranchSplit<T>> {
    closed_form_domain(p, r)?;
    let one = T::one();
    let two = T::lit(2.0);
    let lam = (one - p) * (p + r - two * p * r);
    check_branches(lam)?;
    Ok(BranchSplit {
        lam,
        pop_lam: p * (one - p) * (one - r) / lam,
        pop_rest: p * (p + r - p * r) / (one - lam),
    })
}

/// Controller `diag(r, 1 − r)`, Hadamard assignment, measured in
/// `{|0⟩, |1⟩}`: `lam` is the `|0⟩` probability, `pop_lam = p_0`,
/// `pop_rest = p_1`.
pub fn closed_form_case2<T: Real>(p: T, r: T) -> Result<BranchSplit<T>> {
    closed_form_domain(p, r)?;
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let lam = (p + two * r * (one - p)) * (one - r + p * (two * r - one));
    check_branches(lam)?;
    let p0 = p * ((one - p) * (one + two * r * r) + (three * p - two) * r) / lam;
    let p1 = p * (one - r) * (p + two * r * (one - p)) / (one - lam);
    Ok(BranchSplit {
        lam,
        pop_lam: p0,
        pop_rest: p1,
    })
}
