//! Kraus-represented qubit channels and their causally separable mixtures.

use crate::error::{check_range, Error, Result};
use crate::qmat::{CMat, DensityMatrix};
use crate::scalar::Real;

/// CPTP map `ρ ↦ Σ_k E_k ρ E_k†`.
///
/// Zero operators are kept so that indices line up with the textbook
/// enumeration (`E_0..E_3` for amplitude damping, `F_0, F_1` for phase flip).
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Real> {
    ops: Vec<CMat<T>>,
    label: String,
}

/// Outcome of [`KrausChannel::validate_cptp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport<T: Real> {
    /// Max-abs entry of `Σ E†E − I`.
    pub deviation: T,
    pub passed: bool,
}

impl<T: Real> KrausChannel<T> {
    /// Wraps a list of same-dimension operators. Completeness is not enforced
    /// here; check it with [`validate_cptp`](Self::validate_cptp).
    pub fn new(ops: Vec<CMat<T>>, label: impl Into<String>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyChannel)?;
        let dim = first.dim();
        if let Some(bad) = ops.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            ops,
            label: label.into(),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMat::identity(dim)?], "id")
    }

    pub fn ops(&self) -> &[CMat<T>] {
        &self.ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn validate_cptp(&self) -> CptpReport<T> {
        let id = CMat::identity(self.dim()).expect("channel dims are valid");
        let sum = self
            .ops
            .iter()
            .fold(CMat::zeros(self.dim()).expect("valid dim"), |acc, e| {
                &acc + &(&e.dagger() * e)
            });
        let deviation = (&sum - &id).max_abs();
        CptpReport {
            deviation,
            passed: deviation <= T::lit(T::EXACT_TOL),
        }
    }

    /// Raw Kraus sum on a matrix; no state validation.
    pub(crate) fn apply_mat(&self, rho: &CMat<T>) -> Result<CMat<T>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let mut out = CMat::zeros(rho.dim())?;
        for e in &self.ops {
            out = &out + &(&(e * rho) * &e.dagger());
        }
        Ok(out)
    }

    /// `Σ_k E_k ρ E_k†`, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.apply_mat(rho.mat())?)
    }
}

/// Generalized amplitude damping with equilibrium ground population `p` and
/// damping strength `gamma`. At `gamma = 1` every input is pinned to
/// `diag(p, 1 − p)`.
pub fn gad_channel<T: Real>(p: T, gamma: T) -> Result<KrausChannel<T>> {
    check_range("p", p.to_f64().unwrap_or(f64::NAN), 0.0, 1.0, "[0, 1]")?;
    check_range("gamma", gamma.to_f64().unwrap_or(f64::NAN), 0.0, 1.0, "[0, 1]")?;
    let z = T::zero();
    let sp = p.sqrt();
    let sq = (T::one() - p).sqrt();
    let sg = gamma.sqrt();
    let sk = (T::one() - gamma).sqrt();
    let ops = vec![
        CMat::from_real(2, &[sp, z, z, sp * sk])?,
        CMat::from_real(2, &[z, sp * sg, z, z])?,
        CMat::from_real(2, &[sq * sk, z, z, sq])?,
        CMat::from_real(2, &[z, z, sq * sg, z])?,
    ];
    KrausChannel::new(ops, "gad")
}

/// Phase flip: keeps the state with probability `q`, applies `Z` otherwise.
pub fn pf_channel<T: Real>(q: T) -> Result<KrausChannel<T>> {
    check_range("q", q.to_f64().unwrap_or(f64::NAN), 0.0, 1.0, "[0, 1]")?;
    let sq = q.sqrt();
    let sr = (T::one() - q).sqrt();
    let ops = vec![CMat::diag(&[sq, sq])?, CMat::diag(&[sr, -sr])?];
    KrausChannel::new(ops, "pf")
}

/// `second ∘ first`: `first` acts first. Kraus list is `{S_a F_b}` with the
/// first channel's index running fastest.
pub fn compose<T: Real>(
    second: &KrausChannel<T>,
    first: &KrausChannel<T>,
) -> Result<KrausChannel<T>> {
    if second.dim() != first.dim() {
        return Err(Error::DimensionMismatch {
            expected: second.dim(),
            found: first.dim(),
        });
    }
    let mut ops = Vec::with_capacity(second.ops.len() * first.ops.len());
    for s in &second.ops {
        for f in &first.ops {
            ops.push(s * f);
        }
    }
    KrausChannel::new(ops, format!("{}∘{}", second.label, first.label))
}

/// Causally separable supermap `λ · (a ∘ b) + (1 − λ) · (b ∘ a)`.
///
/// The two definite orders are kept as separate branches rather than folded
/// into one Kraus list.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableMixture<T: Real> {
    lam: T,
    a_after_b: KrausChannel<T>,
    b_after_a: KrausChannel<T>,
}

impl<T: Real> SeparableMixture<T> {
    pub fn new(lam: T, a: &KrausChannel<T>, b: &KrausChannel<T>) -> Result<Self> {
        check_range("lambda", lam.to_f64().unwrap_or(f64::NAN), 0.0, 1.0, "[0, 1]")?;
        Ok(Self {
            lam,
            a_after_b: compose(a, b)?,
            b_after_a: compose(b, a)?,
        })
    }

    pub fn lam(&self) -> T {
        self.lam
    }

    /// The branch weighted by `λ`.
    pub fn a_after_b(&self) -> &KrausChannel<T> {
        &self.a_after_b
    }

    /// The branch weighted by `1 − λ`.
    pub fn b_after_a(&self) -> &KrausChannel<T> {
        &self.b_after_a
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let one = self.a_after_b.apply_mat(rho.mat())?.scale(self.lam);
        let two = self
            .b_after_a
            .apply_mat(rho.mat())?
            .scale(T::one() - self.lam);
        DensityMatrix::new(&one + &two)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{trace_distance, Ket};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
        loop {
            let (x, y, z) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if x * x + y * y + z * z <= 1.0 {
                return DensityMatrix::from_bloch(x, y, z).unwrap();
            }
        }
    }

    fn axis_states() -> Vec<DensityMatrix<f64>> {
        [
            (1.0, 0.0, 0.0),
            (-1.0, 0.0, 0.0),
            (0.0, 1.0, 0.0),
            (0.0, -1.0, 0.0),
            (0.0, 0.0, 1.0),
            (0.0, 0.0, -1.0),
        ]
        .iter()
        .map(|&(x, y, z)| DensityMatrix::from_bloch(x, y, z).unwrap())
        .collect()
    }

    fn tau(p: f64) -> DensityMatrix<f64> {
        DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap()
    }

    #[test]
    fn gad_pins_bloch_axes() {
        let gad = gad_channel(0.8, 1.0).unwrap();
        for rho in axis_states() {
            let out = gad.apply(&rho).unwrap();
            assert!(trace_distance(&out, &tau(0.8)).unwrap() < 1e-15);
        }
        let one = DensityMatrix::pure(&Ket::one()).unwrap();
        let out = gad.apply(&one).unwrap();
        assert!(out.mat().max_abs_diff(tau(0.8).mat()).unwrap() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(trace_distance(&gad.apply(&mixed).unwrap(), &tau(0.8)).unwrap() < 1e-15);
    }

    #[test]
    fn gad_zero_damping_is_identity() {
        let gad = gad_channel(0.3, 0.0).unwrap();
        assert_eq!(gad.ops()[1].max_abs(), 0.0);
        assert_eq!(gad.ops()[3].max_abs(), 0.0);
        let rho = DensityMatrix::from_bloch(0.2, -0.5, 0.4).unwrap();
        let out = gad.apply(&rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()).unwrap() < 1e-15);
    }

    #[test]
    fn pf_examples() {
        let rho = tau(0.65);
        let out = pf_channel(0.3).unwrap().apply(&rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()).unwrap() <= 1e-15);

        let arb = DensityMatrix::from_bloch(0.3, 0.4, -0.2).unwrap();
        let same = pf_channel(1.0).unwrap().apply(&arb).unwrap();
        assert!(same.mat().max_abs_diff(arb.mat()).unwrap() < 1e-15);

        let plus = DensityMatrix::pure(&Ket::plus()).unwrap();
        let shrunk = pf_channel(0.8).unwrap().apply(&plus).unwrap();
        let expected = CMat::from_real(2, &[0.5, 0.3, 0.3, 0.5]).unwrap();
        assert!(shrunk.mat().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn pf_preserves_tau() {
        for q in [0.0, 0.2, 0.8, 1.0] {
            let out = pf_channel(q).unwrap().apply(&tau(0.8)).unwrap();
            assert!(out.mat().max_abs_diff(tau(0.8).mat()).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn constructors_reject_out_of_range() {
        assert!(gad_channel(1.1, 0.5).is_err());
        assert!(gad_channel(0.5, -0.1).is_err());
        assert!(gad_channel(f64::NAN, 0.5).is_err());
        assert!(pf_channel(-0.01).is_err());
        assert!(matches!(
            KrausChannel::<f64>::new(vec![], "empty"),
            Err(Error::EmptyChannel)
        ));
        let mixed = vec![CMat::<f64>::identity(2).unwrap(), CMat::identity(4).unwrap()];
        assert!(KrausChannel::new(mixed, "bad").is_err());
    }

    #[test]
    fn validate_cptp_examples() {
        assert!(gad_channel(0.8, 1.0).unwrap().validate_cptp().passed);
        let report = pf_channel(0.3).unwrap().validate_cptp();
        assert!(report.passed && report.deviation <= 1e-15);

        let id = CMat::<f64>::identity(2).unwrap();
        let doubled = KrausChannel::new(vec![id, id], "double").unwrap();
        let report = doubled.validate_cptp();
        assert!(!report.passed);
        assert_eq!(report.deviation, 1.0);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let rho4 = DensityMatrix::<f64>::maximally_mixed(4).unwrap();
        assert!(matches!(
            pf_channel(0.5).unwrap().apply(&rho4),
            Err(Error::DimensionMismatch { .. })
        ));
        let id4 = KrausChannel::<f64>::identity(4).unwrap();
        assert!(compose(&id4, &pf_channel(0.5).unwrap()).is_err());
    }

    #[test]
    fn compositions_pin_to_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &p in &[0.55, 0.8, 0.95] {
            let gad = gad_channel(p, 1.0).unwrap();
            let pf = pf_channel(p).unwrap();
            let pf_gad = compose(&pf, &gad).unwrap();
            let gad_pf = compose(&gad, &pf).unwrap();
            assert!(pf_gad.validate_cptp().passed && gad_pf.validate_cptp().passed);
            for _ in 0..50 {
                let rho = random_state(&mut rng);
                assert!(trace_distance(&pf_gad.apply(&rho).unwrap(), &tau(p)).unwrap() < 1e-13);
                assert!(trace_distance(&gad_pf.apply(&rho).unwrap(), &tau(p)).unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gad = gad_channel(0.7, 0.4).unwrap();
        let pf = pf_channel(0.35).unwrap();
        let both = compose(&pf, &gad).unwrap();
        let id = KrausChannel::identity(2).unwrap();
        let with_id = compose(&gad, &id).unwrap();
        for _ in 0..100 {
            let rho = random_state(&mut rng);
            let seq = pf.apply(&gad.apply(&rho).unwrap()).unwrap();
            let direct = both.apply(&rho).unwrap();
            assert!(seq.mat().max_abs_diff(direct.mat()).unwrap() < 1e-13);
            let a = with_id.apply(&rho).unwrap();
            let b = gad.apply(&rho).unwrap();
            assert!(a.mat().max_abs_diff(b.mat()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn separable_mixture_examples() {
        let pf = pf_channel(0.8).unwrap();
        let gad = gad_channel(0.8, 1.0).unwrap();
        let plus = DensityMatrix::pure(&Ket::plus()).unwrap();

        let mix = SeparableMixture::new(0.37, &pf, &gad).unwrap();
        let out = mix.apply(&plus).unwrap();
        assert!(out.mat().max_abs_diff(tau(0.8).mat()).unwrap() < 1e-13);

        // λ = 0 keeps only GAD ∘ PF
        let gad_lite = gad_channel(0.8, 0.3).unwrap();
        let zero = SeparableMixture::new(0.0, &pf, &gad_lite).unwrap();
        let direct = compose(&gad_lite, &pf).unwrap().apply(&plus).unwrap();
        assert_eq!(zero.apply(&plus).unwrap().mat(), direct.mat());

        assert!(SeparableMixture::new(1.5, &pf, &gad).is_err());
    }

    #[test]
    fn apply_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let channels = [
            gad_channel(0.7, 0.6).unwrap(),
            pf_channel(0.25).unwrap(),
            compose(&pf_channel(0.4).unwrap(), &gad_channel(0.9, 0.2).unwrap()).unwrap(),
        ];
        for _ in 0..1000 {
            let rho = random_state(&mut rng);
            for ch in &channels {
                let out = ch.apply(&rho).unwrap();
                assert!((out.mat().trace().re - 1.0).abs() <= 1e-13);
                assert!(out.mat().hermiticity_deviation() <= 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_pin_map() {
        let gad = gad_channel(0.8f32, 1.0).unwrap();
        let rho = DensityMatrix::<f32>::from_bloch(0.3, -0.4, 0.5).unwrap();
        let out = gad.apply(&rho).unwrap();
        assert!((out.population(0) - 0.8).abs() < 1e-6);
        assert!(gad.validate_cptp().passed);
    }
}
