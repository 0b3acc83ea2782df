//! Observables: site densities, Bhattacharyya fidelity, overlap, FFT
//! spectra, and transmission coefficients.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::simulator::{ShotRecord, StateVector};

/// Per-site densities `n_i = <(1 - Z_i)/2>` from a statevector.
pub fn site_densities(state: &StateVector) -> Vec<f64> {
    state.densities()
}

/// Per-site densities from a (post-selected) shot record:
/// `n_i = sum_{kept strings with bit i set} count / sum kept counts`.
pub fn site_densities_from_record(record: &ShotRecord) -> Result<Vec<f64>> {
    let kept = record.kept();
    if kept == 0 || record.counts().is_empty() {
        return Err(Error::EmptyRecord(record.n_shots()));
    }
    let n_qubits = record
        .counts()
        .keys()
        .next()
        .map(|s| s.len())
        .unwrap_or(0);
    let mut dens = vec![0.0; n_qubits];
    for (bits, &c) in record.counts() {
        for (q, ch) in bits.chars().enumerate() {
            if ch == '1' {
                dens[q] += c as f64;
            }
        }
    }
    for d in dens.iter_mut() {
        *d /= kept as f64;
    }
    Ok(dens)
}

/// Bhattacharyya-coefficient fidelity `F = (sum_i sqrt(p_i q_i))^2`.
///
/// Inputs are occupation profiles with a common normalization (for `N`
/// particles each sums to `N`); they are normalized to probability vectors
/// internally.
pub fn fidelity_bc(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    let (sp, sq) = (p.iter().sum::<f64>(), q.iter().sum::<f64>());
    if sp <= 0.0 || sq <= 0.0 {
        return Err(Error::State("distribution sums must be positive".into()));
    }
    if p.iter().chain(q).any(|&x| x < -1e-12) {
        return Err(Error::State("distributions must be nonnegative".into()));
    }
    let bc: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| ((a / sp).max(0.0) * (b / sq).max(0.0)).sqrt())
        .sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

/// Overlap `O(t) = sum_i n_i(0) n_i(t)`.
pub fn overlap(n0: &[f64], nt: &[f64]) -> Result<f64> {
    if n0.len() != nt.len() {
        return Err(Error::DimensionMismatch(format!(
            "density profiles of length {} and {}",
            n0.len(),
            nt.len()
        )));
    }
    Ok(n0.iter().zip(nt).map(|(a, b)| a * b).sum())
}

/// Discrete spectrum `|FFT|` with frequencies in physical units
/// `f_k = k / (N dt)`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Largest-magnitude bin excluding DC: `(bin, frequency, magnitude)`.
    /// Only bins below the Nyquist frequency are searched.
    pub fn dominant_peak(&self) -> Option<(usize, f64, f64)> {
        let half = self.magnitudes.len() / 2;
        (1..=half.max(1).min(self.magnitudes.len() - 1))
            .map(|k| (k, self.frequencies[k], self.magnitudes[k]))
            .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency,magnitude\n");
        for (f, m) in self.frequencies.iter().zip(&self.magnitudes) {
            out.push_str(&format!("{f:.6},{m:.12e}\n"));
        }
        out
    }
}

/// `FFT(f) = sum_t O(t) e^{-2 pi i f t / N}` of a uniformly sampled series;
/// no windowing.
pub fn fft_spectrum(series: &[f64], dt: f64) -> Result<Spectrum> {
    if series.len() < 2 {
        return Err(Error::DimensionMismatch(
            "FFT needs at least two samples".into(),
        ));
    }
    if dt <= 0.0 {
        return Err(Error::State(format!("sampling step must be positive, got {dt}")));
    }
    let n = series.len();
    let mut buf: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let frequencies = (0..n).map(|k| k as f64 / (n as f64 * dt)).collect();
    let magnitudes = buf.iter().map(|z| z.norm()).collect();
    Ok(Spectrum {
        frequencies,
        magnitudes,
    })
}

/// Instantaneous transmission: total density on the given sites.
pub fn transmission(densities: &[f64], sites: &[usize]) -> Result<f64> {
    let mut tau = 0.0;
    for &s in sites {
        if s >= densities.len() {
            return Err(Error::DimensionMismatch(format!(
                "transmission site {s} out of range for {} sites",
                densities.len()
            )));
        }
        tau += densities[s];
    }
    Ok(tau)
}

/// Density profiles on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySeries {
    times: Vec<f64>,
    densities: Vec<Vec<f64>>,
}

impl DensitySeries {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            densities: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, profile: Vec<f64>) {
        self.times.push(t);
        self.densities.push(profile);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn densities(&self) -> &[Vec<f64>] {
        &self.densities
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `tau(t)` series over the given sites.
    pub fn transmission_series(&self, sites: &[usize]) -> Result<Vec<f64>> {
        self.densities
            .iter()
            .map(|d| transmission(d, sites))
            .collect()
    }

    /// CSV body `time,n_0,...,n_{L-1}`.
    pub fn to_csv(&self) -> String {
        let n_sites = self.densities.first().map_or(0, Vec::len);
        let mut out = String::from("time");
        for i in 0..n_sites {
            out.push_str(&format!(",n_{i}"));
        }
        out.push('\n');
        for (t, d) in self.times.iter().zip(&self.densities) {
            out.push_str(&format!("{t:.6}"));
            for x in d {
                out.push_str(&format!(",{x:.12e}"));
            }
            out.push('\n');
        }
        out
    }
}

impl Default for DensitySeries {
    fn default() -> Self {
        Self::new()
    }
}

/// Time-averaged transmission over the window `(t_i, t_f]` on the series'
/// sampling grid: `tau_avg = (1/N) sum tau(t)` with `N = (t_f - t_i)/dt`.
pub fn time_avg_transmission(
    series: &DensitySeries,
    sites: &[usize],
    t_i: f64,
    t_f: f64,
) -> Result<f64> {
    if t_i >= t_f {
        return Err(Error::State(format!(
            "empty averaging window ({t_i}, {t_f}]"
        )));
    }
    let grid_tol = 1e-9;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (t, d) in series.times.iter().zip(&series.densities) {
        if *t > t_i + grid_tol && *t <= t_f + grid_tol {
            sum += transmission(d, sites)?;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::State(format!(
            "no samples in the window ({t_i}, {t_f}]"
        )));
    }
    Ok(sum / n as f64)
}
