//! Scenario runners: Theorem-style separability check, the fixed- and
//! varying-bath studies for both controller setups, and a general parameter
//! sweep. Every runner evaluates the full Kraus pipeline; closed forms are
//! used only as cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{compose, gad_channel, pf_channel, SeparableMixture};
use crate::error::{Error, Result};
use crate::qmat::{trace_distance, DensityMatrix, Ket};
use crate::switch::{
    apply_switch, closed_form_case1, closed_form_case2, controller_coherence, measure_controller, system_marginal,
    BranchSplit, ControlAssignment, MeasurementBasis, SwitchConfig,
};
use crate::table::{Cell, TableRow};
use crate::thermo::{avg_work, bath_from_state, free_energy, tau, ThermalBath};

/// Pass threshold for every enforced numerical identity.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Varying-bath inputs are kept this far inside `(0.5, 1)`.
pub const VARYING_BATH_MARGIN: f64 = 1e-6;

pub const DEFAULT_P: f64 = 0.8;
pub const DEFAULT_R_MIN: f64 = 0.5;
pub const DEFAULT_R_MAX: f64 = 1.0;
pub const DEFAULT_R_STEPS: usize = 51;
pub const DEFAULT_LAMBDA_STEPS: usize = 11;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 42;

/// `steps` evenly spaced points from `min` to `max` inclusive; a single step
/// yields `[min]`.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![min],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `r = 0.5 + 0.01 s` for `s = 0..=50`.
pub fn default_r_grid() -> Vec<f64> {
    linear_grid(DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_R_STEPS)
}

/// Which bath free energies are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathMode {
    /// Bath whose Gibbs state is the pinned output `τ_p`.
    Fixed,
    /// Bath at the temperature of the thermal input `τ_r`.
    Varying,
}

/// Controller preparation for a switch run.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerState {
    Pure(Ket<f64>),
    /// The controller is a copy of the thermal input `diag(r, 1 − r)`.
    ThermalInput,
}

/// Which closed form, if any, the setup reproduces when `p = q` and `γ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Case1,
    Case2,
}

/// Assignment, controller, and measurement for a switch experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSetup {
    pub assignment: ControlAssignment<f64>,
    pub controller: ControllerState,
    pub basis: MeasurementBasis<f64>,
    pub closed_form: Option<ClosedForm>,
}

impl SwitchSetup {
    /// `|+⟩` controller, `|0⟩ ↦ GAD∘PF`, `|1⟩ ↦ PF∘GAD`, measured in
    /// `{|−⟩, |+⟩}` so the first outcome carries weight `λ`.
    pub fn case1() -> Self {
        Self {
            assignment: ControlAssignment::computational(),
            controller: ControllerState::Pure(Ket::plus()),
            basis: MeasurementBasis::hadamard_minus_first(),
            closed_form: Some(ClosedForm::Case1),
        }
    }

    /// Thermal controller `diag(r, 1 − r)`, `|+⟩ ↦ GAD∘PF`, `|−⟩ ↦ PF∘GAD`,
    /// measured in `{|0⟩, |1⟩}`.
    pub fn case2() -> Self {
        Self {
            assignment: ControlAssignment::hadamard(),
            controller: ControllerState::ThermalInput,
            basis: MeasurementBasis::computational(),
            closed_form: Some(ClosedForm::Case2),
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scenario: String,
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    /// Ground population of the reference bath's Gibbs state.
    pub bath_p: f64,
    /// Probability of the first measurement outcome.
    pub lam: f64,
    /// Ground population of the first outcome's conditional state.
    pub pop_lam: f64,
    /// Ground population of the second outcome's conditional state.
    pub pop_rest: f64,
    /// Ensemble-average free energy of the conditional switch outputs.
    pub f_switch: f64,
    /// Free energy of the separable comparator's output.
    pub f_separable: f64,
    pub f_gad_after_pf: f64,
    pub f_pf_after_gad: f64,
    pub f_input: f64,
    pub f_controller: f64,
    /// Free energy of the bath's own Gibbs state.
    pub f_reference: f64,
    pub w_switch: f64,
    pub w_separable: f64,
    /// Trace distance from the unconditioned switch marginal to `τ_p`.
    pub marginal_vs_tau: f64,
    /// Trace distance from the unconditioned switch marginal to the
    /// separable comparator's output.
    pub marginal_vs_separable: f64,
    /// Off-diagonal controller block magnitude in the measurement basis.
    pub controller_coherence: f64,
    /// Largest disagreement with the closed form; 0 where none applies.
    pub closed_form_dev: f64,
}

impl SweepRecord {
    /// Upper bound on extractable work from the consumed inputs (system and
    /// controller) with respect to the same bath.
    pub fn input_work_bound(&self) -> f64 {
        (self.f_input - self.f_reference) + (self.f_controller - self.f_reference)
    }

    fn all_finite(&self) -> bool {
        [
            self.r,
            self.lam,
            self.pop_lam,
            self.pop_rest,
            self.f_switch,
            self.f_separable,
            self.f_gad_after_pf,
            self.f_pf_after_gad,
            self.f_input,
            self.f_controller,
            self.f_reference,
            self.w_switch,
            self.w_separable,
            self.marginal_vs_tau,
            self.marginal_vs_separable,
            self.controller_coherence,
            self.closed_form_dev,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

impl TableRow for SweepRecord {
    fn header() -> &'static [&'static str] {
        &[
            "scenario",
            "r",
            "p",
            "q",
            "gamma",
            "bath_p",
            "lam",
            "pop_lam",
            "pop_rest",
            "f_switch",
            "f_separable",
            "f_gad_after_pf",
            "f_pf_after_gad",
            "f_input",
            "f_controller",
            "f_reference",
            "w_switch",
            "w_separable",
            "marginal_vs_tau",
            "marginal_vs_separable",
            "controller_coherence",
            "closed_form_dev",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = vec![Cell::Text(self.scenario.clone())];
        cells.extend(
            [
                self.r,
                self.p,
                self.q,
                self.gamma,
                self.bath_p,
                self.lam,
                self.pop_lam,
                self.pop_rest,
                self.f_switch,
                self.f_separable,
                self.f_gad_after_pf,
                self.f_pf_after_gad,
                self.f_input,
                self.f_controller,
                self.f_reference,
                self.w_switch,
                self.w_separable,
                self.marginal_vs_tau,
                self.marginal_vs_separable,
                self.controller_coherence,
                self.closed_form_dev,
            ]
            .into_iter()
            .map(Cell::Num),
        );
        cells
    }
}

/// A single parameter point of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub r: f64,
}

fn closed_form_deviation(form: ClosedForm, point: &GridPoint, lam: f64, pop0: f64, pop1: f64) -> Result<f64> {
    let split: BranchSplit<f64> = match form {
        ClosedForm::Case1 => closed_form_case1(point.p, point.r)?,
        ClosedForm::Case2 => closed_form_case2(point.p, point.r)?,
    };
    Ok((split.lam - lam)
        .abs()
        .max((split.pop_lam - pop0).abs())
        .max((split.pop_rest - pop1).abs()))
}

/// Runs the Kraus pipeline at one point: switch, controller measurement,
/// free energies of every comparator, and the closed-form cross-check.
pub fn evaluate_point(
    scenario: &str,
    point: GridPoint,
    setup: &SwitchSetup,
    bath: &ThermalBath<f64>,
) -> Result<SweepRecord> {
    let GridPoint { p, q, gamma, r } = point;
    let gad = gad_channel(p, gamma)?;
    let pf = pf_channel(q)?;
    let input = tau(r)?;
    let controller = match &setup.controller {
        ControllerState::Pure(ket) => DensityMatrix::pure(ket)?,
        ControllerState::ThermalInput => input,
    };
    let cfg = SwitchConfig::new(setup.assignment.clone(), controller, gad.clone(), pf.clone())?;

    let joint = apply_switch(&cfg, &input)?;
    let ensemble = measure_controller(&joint, &setup.basis)?;
    let marginal = system_marginal(&joint)?;
    let separable = cfg.separable_counterpart()?.apply(&input)?;

    let f_reference = free_energy(&bath.gibbs_state(), bath)?;
    let mut f_switch = 0.0;
    for o in &ensemble.entries {
        f_switch += o.probability * free_energy(&o.state, bath)?;
    }
    let f_separable = free_energy(&separable, bath)?;
    let (lam, pop_lam, pop_rest) = (
        ensemble.entries[0].probability,
        ensemble.entries[0].state.population(0),
        ensemble.entries[1].state.population(0),
    );

    let closed_form_dev = match setup.closed_form {
        Some(form) if p == q && gamma == 1.0 => closed_form_deviation(form, &point, lam, pop_lam, pop_rest)?,
        _ => 0.0,
    };

    let record = SweepRecord {
        scenario: scenario.to_owned(),
        r,
        p,
        q,
        gamma,
        bath_p: bath.p(),
        lam,
        pop_lam,
        pop_rest,
        f_switch,
        f_separable,
        f_gad_after_pf: free_energy(&compose(&gad, &pf)?.apply(&input)?, bath)?,
        f_pf_after_gad: free_energy(&compose(&pf, &gad)?.apply(&input)?, bath)?,
        f_input: free_energy(&input, bath)?,
        f_controller: free_energy(&controller, bath)?,
        f_reference,
        w_switch: avg_work(&ensemble, bath)?,
        w_separable: f_separable - f_reference,
        marginal_vs_tau: trace_distance(&marginal, &tau(p)?)?,
        marginal_vs_separable: trace_distance(&marginal, &separable)?,
        controller_coherence: controller_coherence(&joint, &setup.basis)?,
        closed_form_dev,
    };
    if !record.all_finite() {
        return Err(Error::NotDensityMatrix(format!("non-finite output at {point:?}")));
    }
    Ok(record)
}

fn check_thermal_p(p: f64) -> Result<()> {
    if p > 0.5 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "(0.5, 1)",
        })
    }
}

fn check_r(r: f64) -> Result<()> {
    if (0.5..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "[0.5, 1]",
        })
    }
}

/// Pulls `r` strictly inside `(0.5, 1)` so the input temperature is finite
/// and nonzero. Values outside `[0.5, 1]` are rejected.
pub fn clip_varying_r(r: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&r) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "(0.5, 1)",
        });
    }
    Ok(r.clamp(0.5 + VARYING_BATH_MARGIN, 1.0 - VARYING_BATH_MARGIN))
}

fn run_scenario(label: &str, p: f64, r_grid: &[f64], setup: &SwitchSetup, mode: BathMode) -> Result<Vec<SweepRecord>> {
    check_thermal_p(p)?;
    let fixed_bath = ThermalBath::new(p)?;
    r_grid
        .iter()
        .map(|&r| {
            let (r, bath) = match mode {
                BathMode::Fixed => {
                    check_r(r)?;
                    (r, fixed_bath)
                }
                BathMode::Varying => {
                    let r = clip_varying_r(r)?;
                    (r, bath_from_state(r)?)
                }
            };
            let point = GridPoint { p, q: p, gamma: 1.0, r };
            evaluate_point(label, point, setup, &bath)
        })
        .collect()
}

/// Pure `|+⟩` controller, bath fixed at `τ_p`.
pub fn run_case1_fixed_bath(p: f64, r_grid: &[f64]) -> Result<Vec<SweepRecord>> {
    run_scenario("case1-fixed", p, r_grid, &SwitchSetup::case1(), BathMode::Fixed)
}

/// Pure `|+⟩` controller, bath at the input temperature.
pub fn run_case1_varying_bath(p: f64, r_grid: &[f64]) -> Result<Vec<SweepRecord>> {
    run_scenario("case1-varying", p, r_grid, &SwitchSetup::case1(), BathMode::Varying)
}

/// Thermal controller equal to the input state.
pub fn run_case2(p: f64, r_grid: &[f64], mode: BathMode) -> Result<Vec<SweepRecord>> {
    let label = match mode {
        BathMode::Fixed => "case2-fixed",
        BathMode::Varying => "case2-varying",
    };
    run_scenario(label, p, r_grid, &SwitchSetup::case2(), mode)
}

/// Axes of the general sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub gamma: Vec<f64>,
    pub r: Vec<f64>,
}

impl SweepGrid {
    /// 5 × 5 × 3 channel grid over the given `r` axis.
    pub fn with_r(r: Vec<f64>) -> Self {
        Self {
            p: vec![0.6, 0.7, 0.8, 0.9, 0.95],
            q: vec![0.6, 0.7, 0.8, 0.9, 0.95],
            gamma: vec![0.5, 0.75, 1.0],
            r,
        }
    }

    pub fn len(&self) -> usize {
        self.p.len() * self.q.len() * self.gamma.len() * self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in `p, q, gamma, r` order with `r` innermost.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        self.p.iter().flat_map(move |&p| {
            self.q.iter().flat_map(move |&q| {
                self.gamma
                    .iter()
                    .flat_map(move |&gamma| self.r.iter().map(move |&r| GridPoint { p, q, gamma, r }))
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub point: GridPoint,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Full pipeline at every grid point with the bath fixed at the amplitude
/// damping equilibrium `τ_p`. Points that fail a domain check are collected
/// in `failures` instead of aborting the sweep.
pub fn run_general_sweep(grid: &SweepGrid, setup: &SwitchSetup) -> SweepOutcome {
    let mut outcome = SweepOutcome::default();
    for point in grid.points() {
        let result = ThermalBath::new(point.p)
            .and_then(|bath| evaluate_point("sweep", point, setup, &bath));
        match result {
            Ok(rec) => outcome.records.push(rec),
            Err(error) => outcome.failures.push(SweepFailure { point, error }),
        }
    }
    outcome
}

/// Largest violation of the identities every scenario row must satisfy:
/// switch marginal equals the separable comparator, switch work dominates
/// separable work, and closed forms agree with the pipeline. With
/// `pinned` the marginal must also equal `τ_p`.
pub fn max_invariant_deviation(records: &[SweepRecord], pinned: bool) -> f64 {
    records
        .iter()
        .map(|rec| {
            let mut dev = rec
                .marginal_vs_separable
                .max(rec.closed_form_dev)
                .max((rec.w_separable - rec.w_switch).max(0.0));
            if pinned {
                dev = dev.max(rec.marginal_vs_tau);
            }
            dev
        })
        .fold(0.0, f64::max)
}

/// Maximum trace distance to `τ_p` at one mixing weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Row {
    pub lambda: f64,
    pub max_distance: f64,
    pub mean_distance: f64,
    pub samples: usize,
}

impl TableRow for Theorem1Row {
    fn header() -> &'static [&'static str] {
        &["lambda", "max_distance", "mean_distance", "samples"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.lambda),
            Cell::Num(self.max_distance),
            Cell::Num(self.mean_distance),
            Cell::Num(self.samples as f64),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub rows: Vec<Theorem1Row>,
    pub max_distance: f64,
    /// `γ = 1`: the pinning claim applies and is enforced.
    pub in_theorem: bool,
    /// `max_distance ≤ 1e-12`.
    pub passed: bool,
}

/// Uniform point in the Bloch ball by rejection from the enclosing cube.
pub fn sample_bloch_state(rng: &mut ChaCha8Rng) -> Result<DensityMatrix<f64>> {
    loop {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let y: f64 = rng.gen_range(-1.0..=1.0);
        let z: f64 = rng.gen_range(-1.0..=1.0);
        if x * x + y * y + z * z <= 1.0 {
            return DensityMatrix::from_bloch(x, y, z);
        }
    }
}

/// Applies `λ PF∘GAD + (1 − λ) GAD∘PF` to `n_samples` random states per
/// `λ` and measures the distance to `τ_p`. Sampling uses ChaCha8 seeded with
/// `seed`; the same states are reused for every `λ`.
pub fn run_theorem1(
    p: f64,
    q: f64,
    gamma: f64,
    lambda_steps: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Theorem1Report> {
    let gad = gad_channel(p, gamma)?;
    let pf = pf_channel(q)?;
    let target = tau(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = (0..n_samples)
        .map(|_| sample_bloch_state(&mut rng))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for lambda in linear_grid(0.0, 1.0, lambda_steps) {
        let mix = SeparableMixture::new(lambda, &pf, &gad)?;
        let mut max = 0.0f64;
        let mut sum = 0.0;
        for rho in &states {
            let d = trace_distance(&mix.apply(rho)?, &target)?;
            max = max.max(d);
            sum += d;
        }
        rows.push(Theorem1Row {
            lambda,
            max_distance: max,
            mean_distance: if states.is_empty() { 0.0 } else { sum / states.len() as f64 },
            samples: states.len(),
        });
    }
    let max_distance = rows.iter().map(|r| r.max_distance).fold(0.0, f64::max);
    Ok(Theorem1Report {
        p,
        q,
        gamma,
        rows,
        max_distance,
        in_theorem: gamma == 1.0,
        passed: max_distance <= IDENTITY_TOL,
    })
}
