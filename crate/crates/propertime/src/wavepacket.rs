//! Wavepackets on momentum grids: construction, exact evolution, the
//! beta-expectation rate, accumulated proper time, and its oscillation
//! spectrum.
//!
//! A packet is a weighted superposition of plane-wave modes; every mode
//! evolves by its own closed-form propagator, so there is no time stepping
//! and no accumulation of integration error in the state itself. Only the
//! proper-time integral is numerical (composite Simpson).

use crate::error::Error;
use crate::momentum::{self, MomentumMode};
use crate::spinor::{c, CMat4, GammaBasis, Spinor4, C64, C_ZERO};
use crate::Result;
use rustfft::FftPlanner;

/// Uniform momentum-space box. Axes with a single point are degenerate and
/// sit at p = 0; axes with `n > 1` points span `[-pmax, pmax]` inclusive.
#[derive(Clone, Copy, Debug)]
pub struct MomentumGrid {
    pub dims: [usize; 3],
    pub pmax: f64,
    pub mass: f64,
}

impl MomentumGrid {
    pub fn new(dims: [usize; 3], pmax: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::NonpositiveMass { mass });
        }
        if dims.contains(&0) {
            return Err(Error::Validation(format!(
                "grid dims must be positive, got {dims:?}"
            )));
        }
        if dims.iter().any(|&n| n > 1) && !(pmax > 0.0) {
            return Err(Error::GridTooCoarse(format!(
                "pmax must be positive when an axis has more than one point, got {pmax}"
            )));
        }
        Ok(MomentumGrid { dims, pmax, mass })
    }

    pub fn num_points(&self) -> usize {
        self.dims.iter().product()
    }

    fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let n = self.dims[axis];
        if n == 1 {
            vec![0.0]
        } else {
            let step = 2.0 * self.pmax / (n - 1) as f64;
            (0..n).map(|i| -self.pmax + i as f64 * step).collect()
        }
    }

    fn axis_weight(&self, axis: usize) -> f64 {
        let n = self.dims[axis];
        if n == 1 {
            1.0
        } else {
            2.0 * self.pmax / (n - 1) as f64
        }
    }

    /// All grid points with their Riemann quadrature weights, in a fixed
    /// (x-major) order.
    pub fn points(&self) -> Vec<([f64; 3], f64)> {
        let (cx, cy, cz) = (
            self.axis_coords(0),
            self.axis_coords(1),
            self.axis_coords(2),
        );
        let w = self.axis_weight(0) * self.axis_weight(1) * self.axis_weight(2);
        let mut out = Vec::with_capacity(self.num_points());
        for &px in &cx {
            for &py in &cy {
                for &pz in &cz {
                    out.push(([px, py, pz], w));
                }
            }
        }
        out
    }

    /// Largest mode energy on the grid; bounds every oscillation frequency
    /// a field on this grid can produce (at 2 E_max).
    pub fn max_energy(&self) -> f64 {
        let p2: f64 = (0..3)
            .map(|a| if self.dims[a] > 1 { self.pmax * self.pmax } else { 0.0 })
            .sum();
        (p2 + self.mass * self.mass).sqrt()
    }
}

/// Spinor amplitudes over the modes of a grid, with quadrature weights.
#[derive(Clone, Debug)]
pub struct SpinorField {
    pub grid: MomentumGrid,
    pub modes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub amps: Vec<Spinor4>,
}

impl SpinorField {
    /// `sum_k w_k ||amp_k||^2`; 1 for normalized fields.
    pub fn norm_squared(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.amps)
            .map(|(w, a)| w * a.norm().powi(2))
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> SpinorField {
        SpinorField {
            grid: self.grid,
            modes: self.modes.clone(),
            weights: self.weights.clone(),
            amps: self.amps.iter().map(|a| a.scale(factor)).collect(),
        }
    }
}

/// Which energy branches the packet occupies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Branch {
    Positive,
    Negative,
    /// `cos(theta) u + sin(theta) v` per mode, mixing the branches.
    Mixed { theta: f64 },
}

/// Recipe for a Gaussian packet: center, width, polarization, branch content.
#[derive(Clone, Copy, Debug)]
pub struct WavepacketSpec {
    pub p0: [f64; 3],
    pub sigma_p: f64,
    /// 2-component polarization placed in the seed spinor (unit norm).
    pub spin: [C64; 2],
    pub branch: Branch,
}

impl WavepacketSpec {
    pub fn positive(p0: [f64; 3], sigma_p: f64) -> Self {
        WavepacketSpec {
            p0,
            sigma_p,
            spin: [c(1.0, 0.0), C_ZERO],
            branch: Branch::Positive,
        }
    }

    pub fn negative(p0: [f64; 3], sigma_p: f64) -> Self {
        WavepacketSpec {
            branch: Branch::Negative,
            ..Self::positive(p0, sigma_p)
        }
    }

    pub fn mixed(p0: [f64; 3], sigma_p: f64, theta: f64) -> Self {
        WavepacketSpec {
            branch: Branch::Mixed { theta },
            ..Self::positive(p0, sigma_p)
        }
    }
}

/// Normalized branch spinor at one mode: project the seed (polarization in
/// the upper components for the positive branch, lower for the negative) and
/// renormalize; fall back to the mirrored seed if the projection degenerates.
fn branch_spinor(projector: &CMat4, spin: &[C64; 2], lower: bool) -> Result<Spinor4> {
    let upper = Spinor4([spin[0], spin[1], C_ZERO, C_ZERO]);
    let mirrored = Spinor4([C_ZERO, C_ZERO, spin[0], spin[1]]);
    let seeds = if lower { [mirrored, upper] } else { [upper, mirrored] };
    for seed in seeds {
        let w = projector.matvec(&seed);
        if w.norm() > 1e-8 {
            return Ok(w.normalized());
        }
    }
    Err(Error::ZeroProjection)
}

/// Build a normalized Gaussian wavepacket on the grid.
pub fn build_wavepacket(
    spec: &WavepacketSpec,
    grid: &MomentumGrid,
    gb: &GammaBasis,
) -> Result<SpinorField> {
    if !(spec.sigma_p > 0.0) {
        return Err(Error::Validation(format!(
            "sigma_p must be positive, got {}",
            spec.sigma_p
        )));
    }
    let spin_norm = (spec.spin[0].norm_sqr() + spec.spin[1].norm_sqr()).sqrt();
    if (spin_norm - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!(
            "spin polarization must have unit norm, got {spin_norm}"
        )));
    }
    for axis in 0..3 {
        if grid.dims[axis] > 1 && grid.pmax < spec.p0[axis].abs() + 4.0 * spec.sigma_p {
            return Err(Error::GridTooCoarse(format!(
                "axis {axis}: pmax = {} does not cover |p0| + 4 sigma_p = {}",
                grid.pmax,
                spec.p0[axis].abs() + 4.0 * spec.sigma_p
            )));
        }
    }

    let points = grid.points();
    let mut modes = Vec::with_capacity(points.len());
    let mut weights = Vec::with_capacity(points.len());
    let mut amps = Vec::with_capacity(points.len());
    for (p, w) in points {
        let mode = MomentumMode::new(p, grid.mass)?;
        let sd = momentum::spectral(&mode, gb);
        let dist2: f64 = (0..3).map(|a| (p[a] - spec.p0[a]).powi(2)).sum();
        let envelope = (-dist2 / (4.0 * spec.sigma_p * spec.sigma_p)).exp();
        let spinor = match spec.branch {
            Branch::Positive => branch_spinor(&sd.p_plus, &spec.spin, false)?,
            Branch::Negative => branch_spinor(&sd.p_minus, &spec.spin, true)?,
            Branch::Mixed { theta } => {
                let u = branch_spinor(&sd.p_plus, &spec.spin, false)?;
                let v = branch_spinor(&sd.p_minus, &spec.spin, true)?;
                u.scale(c(theta.cos(), 0.0)) + v.scale(c(theta.sin(), 0.0))
            }
        };
        modes.push(p);
        weights.push(w);
        amps.push(spinor.scale(c(envelope, 0.0)));
    }

    let mut field = SpinorField {
        grid: *grid,
        modes,
        weights,
        amps,
    };
    let n2 = field.norm_squared();
    if !(n2 > 1e-200) {
        return Err(Error::GridTooCoarse(
            "packet envelope has no support on the grid".into(),
        ));
    }
    let inv = c(1.0 / n2.sqrt(), 0.0);
    for a in &mut field.amps {
        *a = a.scale(inv);
    }
    Ok(field)
}

/// `sum_k w_k amp_k^dagger beta amp_k` — the proper-time rate of the field.
pub fn rate(field: &SpinorField, gb: &GammaBasis) -> f64 {
    let mut total = C_ZERO;
    for (w, a) in field.weights.iter().zip(&field.amps) {
        total += a.dot(&gb.beta.matvec(a)) * c(*w, 0.0);
    }
    assert!(
        total.im.abs() <= 1e-12 * total.re.abs().max(1.0),
        "rate picked up a non-real part: {:e}",
        total.im
    );
    total.re
}

/// Evolve every mode by its exact propagator; returns a new field.
pub fn evolve(field: &SpinorField, gb: &GammaBasis, t: f64) -> SpinorField {
    let amps = field
        .modes
        .iter()
        .zip(&field.amps)
        .map(|(p, a)| {
            let mode = MomentumMode::new(*p, field.grid.mass).expect("mass validated at build");
            momentum::evolution(&mode, gb, t).matvec(a)
        })
        .collect();
    SpinorField {
        grid: field.grid,
        modes: field.modes.clone(),
        weights: field.weights.clone(),
        amps,
    }
}

/// Sampled rate and its running integral (the accumulated proper time).
#[derive(Clone, Debug)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub rate: Vec<f64>,
    pub tau: Vec<f64>,
    /// Largest mode energy of the source grid; callers use it to check the
    /// sampling against the fastest possible oscillation (2 e_max).
    pub e_max: f64,
}

/// Sample the rate uniformly on `[t0, t1]` and integrate it by composite
/// Simpson; `tau` is filled at every sample (odd indices get the matching
/// three-point half-panel rule, keeping the whole series O(dt^4) accurate).
pub fn proper_time(
    field: &SpinorField,
    gb: &GammaBasis,
    t0: f64,
    t1: f64,
    nsamples: usize,
) -> Result<RateSeries> {
    if t1 < t0 {
        return Err(Error::BadInterval { t0, t1 });
    }
    if nsamples < 3 || nsamples.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "nsamples must be odd and at least 3, got {nsamples}"
        )));
    }
    let dt = (t1 - t0) / (nsamples - 1) as f64;
    let times: Vec<f64> = (0..nsamples).map(|j| t0 + j as f64 * dt).collect();
    let rates: Vec<f64> = times
        .iter()
        .map(|&t| rate(&evolve(field, gb, t), gb))
        .collect();

    let mut tau = vec![0.0; nsamples];
    for j in 1..nsamples {
        if j % 2 == 0 {
            tau[j] = tau[j - 2] + dt / 3.0 * (rates[j - 2] + 4.0 * rates[j - 1] + rates[j]);
        } else if j == 1 {
            tau[1] = dt / 12.0 * (5.0 * rates[0] + 8.0 * rates[1] - rates[2]);
        } else {
            tau[j] = tau[j - 1]
                + dt / 12.0 * (-rates[j - 2] + 8.0 * rates[j - 1] + 5.0 * rates[j]);
        }
    }

    Ok(RateSeries {
        times,
        rate: rates,
        tau,
        e_max: field.grid.max_energy(),
    })
}

/// Dominant nonzero-frequency peak of the rate series: returns
/// `(angular_frequency, amplitude)`.
pub fn zitter_spectrum(series: &RateSeries) -> Result<(f64, f64)> {
    let (omegas, amps) = power_spectrum(series)?;
    let mut best = 0usize;
    for k in 1..amps.len() {
        if amps[k] > amps[best] {
            best = k;
        }
    }
    Ok((omegas[best], amps[best]))
}

/// One-sided amplitude spectrum of the mean-subtracted rate series:
/// `(angular_frequencies, amplitudes)` over bins 1..=n/2.
pub fn power_spectrum(series: &RateSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = series.times.len();
    if n < 64 {
        return Err(Error::Validation(format!(
            "spectrum needs at least 64 samples, got {n}"
        )));
    }
    let dt = series.times[1] - series.times[0];
    if !(dt > 0.0) {
        return Err(Error::Validation(
            "spectrum needs a positive sampling step".into(),
        ));
    }
    for w in series.times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::Validation("spectrum needs uniform sampling".into()));
        }
    }
    let sampling_rate = 1.0 / dt;
    let required = 4.0 * series.e_max / std::f64::consts::PI;
    if sampling_rate <= required {
        return Err(Error::Aliased {
            rate: sampling_rate,
            required,
        });
    }

    let mean = series.rate.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = series.rate.iter().map(|r| c(r - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mut omegas = Vec::with_capacity(n / 2);
    let mut amps = Vec::with_capacity(n / 2);
    for (k, z) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
        omegas.push(2.0 * std::f64::consts::PI * k as f64 / (n as f64 * dt));
        amps.push(2.0 * z.norm() / n as f64);
    }
    Ok((omegas, amps))
}
