//! Exact single-mode Dirac dynamics in momentum space.
//!
//! For one momentum `p` the Hamiltonian `H = alpha.p + m beta` squares to
//! `(p^2 + m^2) I`, so every spectral quantity has a closed form: energy
//! `E = sqrt(p^2 + m^2)`, branch projectors `P+- = (I +- H/E)/2`, the
//! propagator `exp(-iHt) = e^{-iEt} P+ + e^{+iEt} P-`, and the
//! Heisenberg-picture rate operator `beta(t)` with its interference
//! (zitterbewegung) cross terms. No eigensolver and no time stepping:
//! evolution to any `t` is a single evaluation.

use crate::error::Error;
use crate::spinor::{c, CMat4, GammaBasis, C_I};
use crate::Result;

/// One plane-wave momentum mode of a massive Dirac particle.
#[derive(Clone, Copy, Debug)]
pub struct MomentumMode {
    pub p: [f64; 3],
    pub mass: f64,
}

impl MomentumMode {
    pub fn new(p: [f64; 3], mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::NonpositiveMass { mass });
        }
        Ok(MomentumMode { p, mass })
    }

    pub fn p_squared(&self) -> f64 {
        self.p.iter().map(|v| v * v).sum()
    }

    /// Relativistic energy `sqrt(p^2 + m^2)`.
    pub fn energy(&self) -> f64 {
        (self.p_squared() + self.mass * self.mass).sqrt()
    }
}

/// Closed-form spectral data for one mode.
#[derive(Clone, Copy, Debug)]
pub struct SpectralData {
    pub energy: f64,
    pub p_plus: CMat4,
    pub p_minus: CMat4,
}

/// `H = alpha.p + m beta`.
pub fn hamiltonian(mode: &MomentumMode, gb: &GammaBasis) -> CMat4 {
    let mut h = gb.beta * mode.mass;
    for j in 0..3 {
        h = h + gb.alpha[j] * mode.p[j];
    }
    h
}

/// Branch projectors `P+- = (I +- H/E)/2` without any eigensolver.
pub fn spectral(mode: &MomentumMode, gb: &GammaBasis) -> SpectralData {
    let energy = mode.energy();
    let h_over_e = hamiltonian(mode, gb) * (1.0 / energy);
    let id = CMat4::identity();
    SpectralData {
        energy,
        p_plus: (id + h_over_e) * 0.5,
        p_minus: (id - h_over_e) * 0.5,
    }
}

/// The exact propagator `exp(-iHt) = e^{-iEt} P+ + e^{+iEt} P-`.
pub fn evolution(mode: &MomentumMode, gb: &GammaBasis, t: f64) -> CMat4 {
    let sd = spectral(mode, gb);
    let phase = sd.energy * t;
    sd.p_plus * c(phase.cos(), -phase.sin()) + sd.p_minus * c(phase.cos(), phase.sin())
}

/// Equivalent single-projector form of the propagator,
/// `e^{-iEt} I + 2i sin(Et) P-`. Kept as an independent construction; the
/// two must agree entrywise.
pub fn evolution_single_projector(mode: &MomentumMode, gb: &GammaBasis, t: f64) -> CMat4 {
    let sd = spectral(mode, gb);
    let phase = sd.energy * t;
    CMat4::identity() * c(phase.cos(), -phase.sin())
        + sd.p_minus * (C_I * c(2.0 * phase.sin(), 0.0))
}

/// Heisenberg-picture rate operator
/// `beta(t) = exp(iHt) beta exp(-iHt)`, assembled term by term as
///
/// `beta(t) = beta - 2i P sin(Et) beta e^{-iEt} + 2i e^{iEt} beta sin(Et) P
///  + 4 P sin(Et) beta sin(Et) P`,  with `P = P-`.
///
/// The middle terms oscillate at `E`, the last at `2E`; on a single branch
/// all of them drop and the rate is constant.
pub fn beta_heisenberg(mode: &MomentumMode, gb: &GammaBasis, t: f64) -> CMat4 {
    let sd = spectral(mode, gb);
    let phase = sd.energy * t;
    let s = phase.sin();
    let e_minus = c(phase.cos(), -phase.sin()); // e^{-iEt}
    let e_plus = e_minus.conj();
    let p = sd.p_minus;
    let beta = gb.beta;

    let term2 = (p * beta) * (-(C_I) * c(2.0 * s, 0.0) * e_minus);
    let term3 = (beta * p) * (C_I * c(2.0 * s, 0.0) * e_plus);
    let term4 = (p * beta * p) * (4.0 * s * s);
    beta + term2 + term3 + term4
}

/// Both sides of the positive-branch rate identity
/// `P+ beta P+ = (m/E) P+`, returned as (lhs, rhs).
pub fn positive_rate_identity(mode: &MomentumMode, gb: &GammaBasis) -> (CMat4, CMat4) {
    let sd = spectral(mode, gb);
    let lhs = sd.p_plus * gb.beta * sd.p_plus;
    let rhs = sd.p_plus * (mode.mass / sd.energy);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::{CMat4, Spinor4, C_ZERO};
    use ndarray_linalg::{Eigh, UPLO};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gb() -> GammaBasis {
        GammaBasis::dirac()
    }

    fn random_mode(rng: &mut ChaCha8Rng, mass: f64) -> MomentumMode {
        let p = [
            rng.random_range(-10.0 * mass..10.0 * mass),
            rng.random_range(-10.0 * mass..10.0 * mass),
            rng.random_range(-10.0 * mass..10.0 * mass),
        ];
        MomentumMode::new(p, mass).unwrap()
    }

    #[test]
    fn mass_must_be_positive() {
        assert!(matches!(
            MomentumMode::new([0.0; 3], 0.0),
            Err(crate::Error::NonpositiveMass { .. })
        ));
        assert!(matches!(
            MomentumMode::new([1.0, 0.0, 0.0], -2.0),
            Err(crate::Error::NonpositiveMass { .. })
        ));
    }

    #[test]
    fn rest_hamiltonian_is_mass_times_beta() {
        let gb = gb();
        let mode = MomentumMode::new([0.0; 3], 1.3).unwrap();
        let h = hamiltonian(&mode, &gb);
        assert!(h.max_abs_diff(&(gb.beta * 1.3)) <= 1e-15);
        // eigenvalues read off the diagonal: {m, m, -m, -m}
        for k in 0..4 {
            let expected = if k < 2 { 1.3 } else { -1.3 };
            assert!((h.0[k][k].re - expected).abs() <= 1e-15);
        }
    }

    #[test]
    fn eigenvalues_at_p_equal_m_are_sqrt2_m_against_lapack() {
        // independent oracle: dense Hermitian eigensolver
        let gb = gb();
        let m = 0.7;
        let mode = MomentumMode::new([m, 0.0, 0.0], m).unwrap();
        let h = hamiltonian(&mode, &gb).to_array2();
        let (vals, _) = h.eigh(UPLO::Lower).unwrap();
        let expected = m * std::f64::consts::SQRT_2;
        let mut sorted: Vec<f64> = vals.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in sorted
            .iter()
            .zip([-expected, -expected, expected, expected].iter())
        {
            assert!((v - e).abs() <= 1e-12, "eigenvalue {v} vs {e}");
        }
        assert!((mode.energy() - expected).abs() <= 1e-15);
    }

    #[test]
    fn hamiltonian_squares_to_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gb = gb();
        for _ in 0..20 {
            let mode = random_mode(&mut rng, 1.0);
            let h = hamiltonian(&mode, &gb);
            let expected = CMat4::identity() * (mode.p_squared() + mode.mass * mode.mass);
            let dev = (h * h).max_abs_diff(&expected);
            assert!(dev <= 1e-12 * expected.max_abs(), "H^2 defect {dev:.2e}");
        }
    }

    #[test]
    fn projectors_are_a_complete_orthogonal_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gb = gb();
        for _ in 0..20 {
            let mode = random_mode(&mut rng, 0.5);
            let sd = spectral(&mode, &gb);
            let id = CMat4::identity();
            assert!((sd.p_plus + sd.p_minus).max_abs_diff(&id) <= 1e-13);
            assert!((sd.p_plus * sd.p_plus).max_abs_diff(&sd.p_plus) <= 1e-13);
            assert!((sd.p_minus * sd.p_minus).max_abs_diff(&sd.p_minus) <= 1e-13);
            assert!((sd.p_plus * sd.p_minus).max_abs() <= 1e-13);
            // H P+- = +-E P+-
            let h = hamiltonian(&mode, &gb);
            assert!((h * sd.p_plus).max_abs_diff(&(sd.p_plus * sd.energy)) <= 1e-12 * sd.energy);
            assert!(
                (h * sd.p_minus).max_abs_diff(&(sd.p_minus * (-sd.energy)))
                    <= 1e-12 * sd.energy
            );
            // trace of each projector is 2 (two spin states per branch)
            assert!((sd.p_plus.trace().re - 2.0).abs() <= 1e-13);
        }
    }

    #[test]
    fn rest_projector_selects_upper_components() {
        let gb = gb();
        let mode = MomentumMode::new([0.0; 3], 2.0).unwrap();
        let sd = spectral(&mode, &gb);
        assert!(sd.p_plus.max_abs_diff(&CMat4::diag([1.0, 1.0, 0.0, 0.0])) <= 1e-15);
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let gb = gb();
        let mode = MomentumMode::new([0.3, -0.2, 0.9], 1.0).unwrap();
        assert!(evolution(&mode, &gb, 0.0).max_abs_diff(&CMat4::identity()) <= 1e-15);
    }

    #[test]
    fn rest_evolution_at_half_period_is_minus_identity() {
        let gb = gb();
        let m = 1.7;
        let mode = MomentumMode::new([0.0; 3], m).unwrap();
        let u = evolution(&mode, &gb, std::f64::consts::PI / m);
        assert!(u.max_abs_diff(&(-CMat4::identity())) <= 1e-13);
    }

    #[test]
    fn evolution_is_unitary_and_matches_single_projector_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let gb = gb();
        for _ in 0..100 {
            let mode = random_mode(&mut rng, 1.0);
            let t = rng.random_range(-10.0..10.0);
            let u = evolution(&mode, &gb, t);
            let unitarity = (u.adjoint() * u).max_abs_diff(&CMat4::identity());
            assert!(unitarity <= 1e-13, "unitarity defect {unitarity:.2e}");
            let alt = evolution_single_projector(&mode, &gb, t);
            assert!(u.max_abs_diff(&alt) <= 1e-12);
        }
    }

    #[test]
    fn heisenberg_beta_at_zero_time_is_beta() {
        let gb = gb();
        let mode = MomentumMode::new([0.4, 0.0, -1.1], 1.0).unwrap();
        assert!(beta_heisenberg(&mode, &gb, 0.0).max_abs_diff(&gb.beta) <= 1e-14);
    }

    #[test]
    fn heisenberg_beta_matches_conjugated_propagator() {
        // 100 random (p, t) with |p| <= 10 m and |t| <= 10/m
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let gb = gb();
        for _ in 0..100 {
            let mode = random_mode(&mut rng, 1.0);
            let t = rng.random_range(-10.0..10.0);
            let u = evolution(&mode, &gb, t);
            let direct = u.adjoint() * gb.beta * u;
            let assembled = beta_heisenberg(&mode, &gb, t);
            let dev = (direct - assembled).op_norm();
            assert!(dev <= 1e-11, "beta(t) assembly defect {dev:.2e}");
        }
    }

    #[test]
    fn rest_rate_operator_is_static() {
        let gb = gb();
        let mode = MomentumMode::new([0.0; 3], 1.0).unwrap();
        for t in [0.1, 1.0, 7.3] {
            assert!(beta_heisenberg(&mode, &gb, t).max_abs_diff(&gb.beta) <= 1e-13);
        }
    }

    #[test]
    fn positive_branch_rate_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let gb = gb();
        for _ in 0..50 {
            let mode = random_mode(&mut rng, 1.0);
            let (lhs, rhs) = positive_rate_identity(&mode, &gb);
            assert!((lhs - rhs).op_norm() <= 1e-12);
        }
        // rest case: both sides are the upper projector
        let rest = MomentumMode::new([0.0; 3], 1.0).unwrap();
        let (lhs, rhs) = positive_rate_identity(&rest, &gb);
        let upper = CMat4::diag([1.0, 1.0, 0.0, 0.0]);
        assert!(lhs.max_abs_diff(&upper) <= 1e-14);
        assert!(rhs.max_abs_diff(&upper) <= 1e-14);
        // |p| = m: rhs = P+ / sqrt(2)
        let mode = MomentumMode::new([0.0, 1.0, 0.0], 1.0).unwrap();
        let (lhs, rhs) = positive_rate_identity(&mode, &gb);
        let sd = spectral(&mode, &gb);
        assert!(rhs.max_abs_diff(&(sd.p_plus * (1.0 / std::f64::consts::SQRT_2))) <= 1e-14);
        assert!((lhs - rhs).op_norm() <= 1e-13);
    }

    #[test]
    fn positive_energy_expectation_is_time_independent() {
        let gb = gb();
        let mode = MomentumMode::new([0.8, -0.3, 0.2], 1.0).unwrap();
        let sd = spectral(&mode, &gb);
        let u = sd.p_plus.matvec(&Spinor4::basis(0)).normalized();
        let expected = mode.mass / sd.energy;
        for t in [0.0, 0.37, 2.0, 9.1] {
            let bt = beta_heisenberg(&mode, &gb, t);
            let rate = u.dot(&bt.matvec(&u));
            assert!((rate.re - expected).abs() <= 1e-12);
            assert!(rate.im.abs() <= 1e-13);
        }
    }

    /// Plain O(N^2) DFT amplitude spectrum of a real series; test-side oracle.
    fn dft_peak(samples: &[f64], dt: f64) -> (f64, f64) {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let mut best = (0.0f64, 0usize);
        for k in 1..=n / 2 {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, s) in samples.iter().enumerate() {
                let ph = 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                re += (s - mean) * ph.cos();
                im -= (s - mean) * ph.sin();
            }
            let amp = 2.0 * (re * re + im * im).sqrt() / n as f64;
            if amp > best.0 {
                best = (amp, k);
            }
        }
        let omega = 2.0 * std::f64::consts::PI * best.1 as f64 / (n as f64 * dt);
        (omega, best.0)
    }

    #[test]
    fn mixed_branch_expectation_oscillates_at_twice_the_energy() {
        let gb = gb();
        let mode = MomentumMode::new([1.0, 0.0, 0.0], 1.0).unwrap();
        let sd = spectral(&mode, &gb);
        let up = sd.p_plus.matvec(&Spinor4::basis(0)).normalized();
        // seed the lower branch in the same spin sector, or the beta cross
        // term vanishes and there is nothing to observe
        let dn = sd.p_minus.matvec(&Spinor4::basis(3)).normalized();
        assert!(up.dot(&dn).norm() <= 1e-14, "branches must be orthogonal");
        let cross = up.dot(&gb.beta.matvec(&dn)).norm();
        assert!(cross > 0.1, "cross term too small to test: {cross}");
        let mix = (up + dn).scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));

        let n = 256;
        let dt = 0.1;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let bt = beta_heisenberg(&mode, &gb, j as f64 * dt);
                mix.dot(&bt.matvec(&mix)).re
            })
            .collect();
        let (omega, amp) = dft_peak(&samples, dt);
        let expected = 2.0 * sd.energy; // 2 sqrt(2) here
        let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
        assert!(
            (omega - expected).abs() <= bin,
            "zitter peak at {omega}, expected {expected} (bin {bin})"
        );
        assert!(amp > 0.05, "oscillation amplitude unexpectedly small: {amp}");
    }

    #[test]
    fn spinors_are_finite_everywhere() {
        // guard against 0/0 in the projector construction at tiny momenta
        let gb = gb();
        let mode = MomentumMode::new([1e-300, 0.0, 0.0], 1.0).unwrap();
        let sd = spectral(&mode, &gb);
        for row in sd.p_plus.0.iter().chain(sd.p_minus.0.iter()) {
            for z in row {
                assert!(z.re.is_finite() && z.im.is_finite());
            }
        }
        let _ = C_ZERO;
    }
}
