//! Deterministic end-to-end invariant suite behind the `selftest`
//! subcommand: every module's headline identity is exercised once with a
//! seeded generator, and the outcome is a machine-readable report whose
//! rendering is byte-stable for a fixed seed.

use crate::invariance::derivation;
use crate::lattice::{
    beta_truncated, build_dirac_hamiltonian, fw_scaling_study, fw_unitary,
    positive_projector_lattice, sigma_z_block_coefficient, ScalingStudyConfig,
};
use crate::momentum::{
    beta_heisenberg, evolution, evolution_single_projector, positive_rate_identity, MomentumMode,
};
use crate::si::{critical_field, magnetar_sweep, rate_shift_per_tesla, zitter_frequency_si,
    PhysicalConstants};
use crate::spinor::GammaBasis;
use crate::wavepacket::{
    build_wavepacket, evolve, proper_time, rate, zitter_spectrum, MomentumGrid, WavepacketSpec,
};
use crate::{fit::log_log_slope, Result};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 20_220_615;

// frozen SI reference values, cross-computed independently of the library;
// digits kept as computed even where f64 rounds them away
#[allow(clippy::excessive_precision)]
const SHIFT_PER_TESLA_REF: f64 = 1.132_758_061_943_297_0e-10;
const OMEGA_RAD_PER_S_REF: f64 = 7.763_440_711_050_11e20;

/// One invariant check: the measured defect and the bound it must stay under.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub metric: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("selftest seed {}\n", self.seed));
        for ch in &self.checks {
            out.push_str(&format!(
                "[{}] {:<42} metric {:.6e}  bound {:.1e}\n",
                if ch.passed { "PASS" } else { "FAIL" },
                ch.name,
                ch.metric,
                ch.bound
            ));
        }
        out.push_str(if self.passed {
            "selftest: all checks passed\n"
        } else {
            "selftest: FAILURES present\n"
        });
        out
    }
}

/// Deterministic 64-bit generator (splitmix64) so the suite needs no
/// external randomness and reruns are reproducible to the byte.
struct SplitMix(u64);

impl SplitMix {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in [lo, hi).
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }
}

fn check(checks: &mut Vec<CheckResult>, name: &str, metric: f64, bound: f64) {
    checks.push(CheckResult {
        name: name.into(),
        metric,
        bound,
        passed: metric.is_finite() && metric <= bound,
    });
}

pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let gb = GammaBasis::dirac();
    let mut rng = SplitMix(seed);
    let mut checks = Vec::new();

    // rate-operator derivation: staged kernel sizes and the surviving matrix
    let der = derivation(&gb)?;
    let dim_defect = der
        .stage_dims
        .iter()
        .zip([2usize, 1, 1])
        .map(|(a, b)| a.abs_diff(b))
        .sum::<usize>() as f64;
    check(&mut checks, "derivation kernel dims (2,1,1)", dim_defect, 0.0);
    check(
        &mut checks,
        "derived operator equals the rest-rate matrix",
        der.matrix.max_abs_diff(&gb.beta),
        1e-10,
    );

    // per-mode spectral identities over seeded draws
    let mut worst_heis = 0.0f64;
    let mut worst_evol = 0.0f64;
    let mut worst_proj = 0.0f64;
    for _ in 0..40 {
        let p = [
            rng.uniform(-3.0, 3.0),
            rng.uniform(-3.0, 3.0),
            rng.uniform(-3.0, 3.0),
        ];
        let t = rng.uniform(-5.0, 5.0);
        let mode = MomentumMode::new(p, 1.0)?;
        let u = evolution(&mode, &gb, t);
        let direct = beta_heisenberg(&mode, &gb, t);
        let conj = u.adjoint() * gb.beta * u;
        worst_heis = worst_heis.max(direct.max_abs_diff(&conj));
        worst_evol = worst_evol.max(u.max_abs_diff(&evolution_single_projector(&mode, &gb, t)));
        let (lhs, rhs) = positive_rate_identity(&mode, &gb);
        worst_proj = worst_proj.max(lhs.max_abs_diff(&rhs));
    }
    check(
        &mut checks,
        "rate observable assembly vs conjugation",
        worst_heis,
        1e-11,
    );
    check(
        &mut checks,
        "closed-form evolution identity",
        worst_evol,
        1e-12,
    );
    check(
        &mut checks,
        "positive-branch projector rate identity",
        worst_proj,
        1e-12,
    );

    // packet rate conservation and the energy-weighted sum rule
    let grid = MomentumGrid::new([64, 1, 1], 8.0, 1.0)?;
    let spec = WavepacketSpec::positive([1.0, 0.0, 0.0], 0.5);
    let field = build_wavepacket(&spec, &grid, &gb)?;
    let rate0 = rate(&field, &gb);
    let mut drift = 0.0f64;
    for k in 1..=50 {
        let t = 0.17 * k as f64;
        drift = drift.max((rate(&evolve(&field, &gb, t), &gb) - rate0).abs());
    }
    check(&mut checks, "free positive packet rate drift", drift, 1e-11);
    let sum_rule: f64 = field
        .modes
        .iter()
        .zip(&field.weights)
        .zip(&field.amps)
        .map(|((p, w), a)| {
            let mode = MomentumMode::new(*p, 1.0).expect("grid mass is positive");
            w * a.norm().powi(2) * (1.0 / mode.energy())
        })
        .sum();
    check(
        &mut checks,
        "rate equals energy-weighted sum rule",
        (rate0 - sum_rule).abs(),
        1e-11,
    );

    // Simpson integration is exact when the rate is constant in time
    let series = proper_time(&field, &gb, 0.0, 4.0, 257)?;
    let tau_defect = (series.tau.last().unwrap() - rate0 * 4.0).abs();
    check(
        &mut checks,
        "proper time linear for drift-free packets",
        tau_defect,
        1e-9,
    );

    // interference line of a branch-mixed single mode sits at 2E within a bin
    let mixed_grid = MomentumGrid::new([1, 1, 5], 2.0, 1.0)?;
    let mixed = build_wavepacket(
        &WavepacketSpec::mixed([0.0, 0.0, 1.0], 0.02, std::f64::consts::FRAC_PI_4),
        &mixed_grid,
        &gb,
    )?;
    let mixed_series = proper_time(&mixed, &gb, 0.0, 40.0, 2049)?;
    let (omega, amp) = zitter_spectrum(&mixed_series)?;
    let bin = 2.0 * std::f64::consts::PI / 40.0;
    let expected = 2.0 * 2.0f64.sqrt();
    let line_defect = if amp > 1e-3 {
        (omega - expected).abs()
    } else {
        f64::INFINITY
    };
    check(
        &mut checks,
        "interference line at twice the energy",
        line_defect,
        bin,
    );

    // lattice block structure on a small grid
    let cfg = crate::lattice::LatticeConfig::new([8, 8], 4.0, 2.0, 1.0, 0.3)?;
    let u = fw_unitary(&cfg)?;
    let n = cfg.dim();
    let adj = u.matrix.t().mapv(|z| z.conj());
    let gram = adj.dot(&u.matrix);
    let mut unit_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            unit_defect = unit_defect.max((gram[[i, j]].re - expect).abs() + gram[[i, j]].im.abs());
        }
    }
    check(
        &mut checks,
        "lattice transformation unitarity",
        unit_defect,
        1e-10,
    );
    let h = build_dirac_hamiltonian(&cfg)?;
    let p = positive_projector_lattice(&h, &cfg)?;
    let idem = {
        let pp = p.matrix.dot(&p.matrix);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((pp[[i, j]] - p.matrix[[i, j]]).norm());
            }
        }
        worst
    };
    check(&mut checks, "lattice projector idempotency", idem, 1e-10);
    let bt = beta_truncated(&cfg)?;
    let (coef, dev) = sigma_z_block_coefficient(&bt);
    let coef_expected = cfg.charge * cfg.b_z / (2.0 * cfg.mass * cfg.mass);
    check(
        &mut checks,
        "spin-field coefficient extraction",
        ((coef - coef_expected).abs() + dev) / coef_expected.abs(),
        1e-10,
    );

    // velocity-scaling powers on a coarse lattice
    let sc = ScalingStudyConfig::standard([12, 12], vec![0.4, 0.2, 0.1, 0.05]);
    let rows = fw_scaling_study(&sc)?;
    let scales: Vec<f64> = rows.iter().map(|r| r.vscale).collect();
    let (s_beta, _) = log_log_slope(&scales, &rows.iter().map(|r| r.res_beta).collect::<Vec<_>>());
    let (s_rate, _) = log_log_slope(&scales, &rows.iter().map(|r| r.res_rate).collect::<Vec<_>>());
    let (s_ratio, _) =
        log_log_slope(&scales, &rows.iter().map(|r| r.ratio_small).collect::<Vec<_>>());
    check(
        &mut checks,
        "truncation residual scaling power",
        (s_beta - 3.0).abs(),
        0.4,
    );
    check(
        &mut checks,
        "rate agreement scaling power",
        (s_rate - 4.0).abs(),
        0.6,
    );
    check(
        &mut checks,
        "small-component scaling power",
        (s_ratio - 3.0).abs(),
        0.5,
    );

    // SI estimates against frozen constant arithmetic
    let consts = PhysicalConstants::codata2018();
    let shift = rate_shift_per_tesla(&consts);
    check(
        &mut checks,
        "shift per tesla vs frozen value",
        (shift / SHIFT_PER_TESLA_REF - 1.0).abs(),
        1e-12,
    );
    check(
        &mut checks,
        "critical field yields shift one half",
        (shift * critical_field(&consts) - 0.5).abs(),
        1e-14,
    );
    let (omega_si, _) = zitter_frequency_si(&consts);
    check(
        &mut checks,
        "oscillation floor vs frozen value",
        (omega_si / OMEGA_RAD_PER_S_REF - 1.0).abs(),
        1e-12,
    );
    let table = magnetar_sweep(&consts, &[1.0, 1e10])?;
    let flagged = table.rows[1].expansion_invalid && !table.rows[0].expansion_invalid;
    check(
        &mut checks,
        "magnetar-scale field flagged out of reach",
        if flagged { 0.0 } else { 1.0 },
        0.0,
    );

    let passed = checks.iter().all(|c| c.passed);
    Ok(SelftestReport {
        seed,
        checks,
        passed,
    })
}
