//! Experiment runner: executes the configured pipelines over the output time
//! grid and writes figure-ready CSV files plus a run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentConfig, Pipeline, Scenario};
use crate::circuit::{trotter_step, Circuit};
use crate::compressor::{compress, compress_incremental, CompressConfig, CompressionResult};
use crate::error::{Error, Result};
use crate::metrics::{
    fft_spectrum, fidelity_bc, overlap, site_densities, site_densities_from_record,
    time_avg_transmission, transmission, DensitySeries,
};
use crate::simulator::{
    apply_circuit, apply_noisy_circuit, post_select, sample_shots, SectorEvolver, ShotRecord,
    StateVector,
};

/// Per-trajectory density profiles and shot counts over the time grid.
type TrajectoryData = (Vec<Vec<f64>>, Vec<BTreeMap<String, u64>>);
/// Sampled series, discard fractions, and the final-time record.
type SampledSeries = (Option<DensitySeries>, Option<Vec<f64>>, Option<ShotRecord>);

/// Depth accounting for one output time of the compressed pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct DepthRow {
    pub t: f64,
    pub d_uqc: usize,
    pub d_oqc: usize,
    pub cr: f64,
    pub infidelity: f64,
    pub n_layers: usize,
    pub converged: bool,
}

/// Everything one pipeline produced over the time grid.
#[derive(Debug, Clone)]
pub struct PipelineSeries {
    pub pipeline: Pipeline,
    /// Noiseless (or trajectory-averaged) densities per output time.
    pub densities: DensitySeries,
    /// Post-selected shot-sampled densities when sampling is enabled.
    pub sampled: Option<DensitySeries>,
    /// Bhattacharyya density fidelity against the exact benchmark per time.
    pub fidelity_vs_exact: Vec<f64>,
    pub overlap_series: Option<Vec<f64>>,
    pub depth_table: Option<Vec<DepthRow>>,
    pub discard_fraction: Option<Vec<f64>>,
    /// Shot record at the final output time.
    pub final_record: Option<ShotRecord>,
}

/// Scalar digest of one pipeline, used by sweeps and the summary document.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub pipeline: String,
    pub mean_fidelity_vs_exact: f64,
    pub final_fidelity_vs_exact: f64,
    pub tau_avg: Option<f64>,
    pub tau_final: Option<f64>,
    pub final_overlap: Option<f64>,
    pub dominant_peak_freq: Option<f64>,
    pub final_cr: Option<f64>,
    pub mean_discard_fraction: Option<f64>,
}

/// Result bundle of one `run_experiment` call.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub pipelines: Vec<PipelineSummary>,
    pub files: Vec<PathBuf>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream per (pipeline, time index, trajectory).
fn derive_seed(base: u64, pipeline: usize, time_idx: usize, traj: usize) -> u64 {
    splitmix64(base ^ splitmix64(pipeline as u64 ^ splitmix64(time_idx as u64 ^ splitmix64(traj as u64))))
}

struct RunContext {
    config: ExperimentConfig,
    initial: StateVector,
    times: Vec<f64>,
    n_particles: usize,
    terms: crate::hamiltonian::HamiltonianTerms,
    exact_densities: Vec<Vec<f64>>,
    comp_config: CompressConfig,
}

impl RunContext {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let (spec, terms) = config.hamiltonian()?;
        let initial = StateVector::prepare_initial(spec.n_sites(), &config.physics.occupied)?;
        let times = config.time_grid();
        let n_particles = config.physics.occupied.len();
        let evolver = SectorEvolver::new(&terms, n_particles)?;
        let exact_densities: Vec<Vec<f64>> = times
            .iter()
            .map(|&t| Ok(site_densities(&evolver.evolve(&initial, t)?)))
            .collect::<Result<_>>()?;
        // The compression reference step is the run's Trotter step.
        let mut comp_config = config.compression.clone();
        comp_config.reference_dt = config.evolution.dt;
        Ok(Self {
            config: config.clone(),
            initial,
            times,
            n_particles,
            terms,
            exact_densities,
            comp_config,
        })
    }

    fn seed(&self) -> u64 {
        self.config.sampling.seed.unwrap_or(0)
    }

    /// Post-selected sampled densities, discard fractions, and the final-time
    /// record for a sequence of per-time states.
    fn sample_series(
        &self,
        states: &[StateVector],
        pipeline_idx: usize,
    ) -> Result<SampledSeries> {
        let Some(shots) = self.config.sampling.shots else {
            return Ok((None, None, None));
        };
        let mut series = DensitySeries::new();
        let mut discards = Vec::with_capacity(states.len());
        let mut final_record = None;
        for (k, state) in states.iter().enumerate() {
            let record = sample_shots(state, shots, derive_seed(self.seed(), pipeline_idx, k, 0))?;
            let record = if self.config.sampling.post_select {
                post_select(&record, self.n_particles)?
            } else {
                record
            };
            discards.push(record.discarded() as f64 / record.n_shots() as f64);
            // Record densities are occupations: they already sum to the
            // particle number over the kept strings.
            series.push(self.times[k], site_densities_from_record(&record)?);
            if k + 1 == states.len() {
                final_record = Some(record);
            }
        }
        Ok((Some(series), Some(discards), final_record))
    }

    /// Aggregated sampled densities for noisy pipelines: the shot budget is
    /// split across trajectories and the counts pooled per time.
    fn sample_noisy_series(
        &self,
        per_traj_records: Vec<Vec<BTreeMap<String, u64>>>,
    ) -> Result<(DensitySeries, Vec<f64>, Option<ShotRecord>)> {
        let n_times = self.times.len();
        let mut series = DensitySeries::new();
        let mut discards = Vec::with_capacity(n_times);
        let mut final_record = None;
        for k in 0..n_times {
            let mut counts: BTreeMap<String, u64> = BTreeMap::new();
            for traj in &per_traj_records {
                for (s, c) in &traj[k] {
                    *counts.entry(s.clone()).or_insert(0) += c;
                }
            }
            let record = ShotRecord::from_counts(counts);
            let record = if self.config.sampling.post_select {
                post_select(&record, self.n_particles)?
            } else {
                record
            };
            discards.push(record.discarded() as f64 / record.n_shots() as f64);
            series.push(self.times[k], site_densities_from_record(&record)?);
            if k + 1 == n_times {
                final_record = Some(record);
            }
        }
        Ok((series, discards, final_record))
    }

    fn shots_for_trajectory(&self, traj: usize) -> u64 {
        let Some(shots) = self.config.sampling.shots else {
            return 0;
        };
        let n = self.config.sampling.trajectories as u64;
        shots / n + u64::from((traj as u64) < shots % n)
    }

    /// The compressed-circuit chain over the time grid, warm-starting each
    /// step from the previous one. Unconverged steps fall back to a cold
    /// start at the next time.
    fn oqc_chain(&self) -> Result<Vec<CompressionResult>> {
        let dt = self.config.evolution.dt;
        let mut chain = Vec::with_capacity(self.times.len());
        let mut previous = compress(&self.terms, &self.initial, 0.0, &self.comp_config)?;
        chain.push(previous.clone());
        for k in 1..self.times.len() {
            let result = if previous.converged {
                compress_incremental(&previous, &self.terms, &self.initial, dt, &self.comp_config)?
            } else {
                compress(&self.terms, &self.initial, self.times[k], &self.comp_config)?
            };
            previous = result.clone();
            chain.push(result);
        }
        Ok(chain)
    }

    /// Cumulative depth of the raw Trotter circuit at each output time.
    fn uqc_depths(&self) -> Result<Vec<usize>> {
        let step = trotter_step(&self.terms, self.config.evolution.dt)?;
        let mut circuit = Circuit::new(self.terms.n_qubits());
        let mut depths = Vec::with_capacity(self.times.len());
        depths.push(0);
        for _ in 1..self.times.len() {
            circuit.extend(&step)?;
            depths.push(circuit.depth());
        }
        Ok(depths)
    }

    fn run_pipeline(
        &self,
        pipeline: Pipeline,
        pipeline_idx: usize,
        oqc_cache: &mut Option<Vec<CompressionResult>>,
    ) -> Result<PipelineSeries> {
        let (densities, sampled, depth_table, discard, final_record) = match pipeline {
            Pipeline::Exact => {
                let mut series = DensitySeries::new();
                for (t, d) in self.times.iter().zip(&self.exact_densities) {
                    series.push(*t, d.clone());
                }
                (series, None, None, None, None)
            }
            Pipeline::Trotter => {
                let step = trotter_step(&self.terms, self.config.evolution.dt)?;
                let mut states = Vec::with_capacity(self.times.len());
                states.push(self.initial.clone());
                for k in 1..self.times.len() {
                    states.push(apply_circuit(&states[k - 1], &step)?);
                }
                let mut series = DensitySeries::new();
                for (t, s) in self.times.iter().zip(&states) {
                    series.push(*t, site_densities(s));
                }
                let (sampled, discard, rec) = self.sample_series(&states, pipeline_idx)?;
                (series, sampled, None, discard, rec)
            }
            Pipeline::Oqc => {
                if oqc_cache.is_none() {
                    *oqc_cache = Some(self.oqc_chain()?);
                }
                let chain = oqc_cache.as_ref().unwrap();
                let uqc_depths = self.uqc_depths()?;
                let n_qubits = self.terms.n_qubits();
                let mut states = Vec::with_capacity(self.times.len());
                let mut rows = Vec::with_capacity(self.times.len());
                for (k, result) in chain.iter().enumerate() {
                    let circuit = result.to_circuit(n_qubits)?;
                    states.push(apply_circuit(&self.initial, &circuit)?);
                    rows.push(DepthRow {
                        t: self.times[k],
                        d_uqc: uqc_depths[k],
                        d_oqc: circuit.depth(),
                        cr: result.cr,
                        infidelity: result.infidelity,
                        n_layers: result.n_layers,
                        converged: result.converged,
                    });
                }
                let mut series = DensitySeries::new();
                for (t, s) in self.times.iter().zip(&states) {
                    series.push(*t, site_densities(s));
                }
                let (sampled, discard, rec) = self.sample_series(&states, pipeline_idx)?;
                (series, sampled, Some(rows), discard, rec)
            }
            Pipeline::NoisyUqc => {
                let step = trotter_step(&self.terms, self.config.evolution.dt)?;
                let n_traj = self.config.sampling.trajectories;
                let p2 = self.config.sampling.p2;
                let want_shots = self.config.sampling.shots.is_some();
                let per_traj: Vec<TrajectoryData> = (0..n_traj)
                    .into_par_iter()
                    .map(|traj| -> Result<_> {
                        let mut profiles = Vec::with_capacity(self.times.len());
                        let mut records = Vec::with_capacity(self.times.len());
                        let traj_shots = self.shots_for_trajectory(traj);
                        let mut state = self.initial.clone();
                        for k in 0..self.times.len() {
                            if k > 0 {
                                state = apply_noisy_circuit(
                                    &state,
                                    &step,
                                    p2,
                                    derive_seed(self.seed(), pipeline_idx, k, traj + 1),
                                )?;
                            }
                            profiles.push(site_densities(&state));
                            if want_shots && traj_shots > 0 {
                                let rec = sample_shots(
                                    &state,
                                    traj_shots,
                                    derive_seed(self.seed(), pipeline_idx + 16, k, traj + 1),
                                )?;
                                records.push(rec.counts().clone());
                            } else if want_shots {
                                records.push(BTreeMap::new());
                            }
                        }
                        Ok((profiles, records))
                    })
                    .collect::<Result<_>>()?;
                self.assemble_noisy(pipeline_idx, per_traj)?
            }
            Pipeline::NoisyOqc => {
                if oqc_cache.is_none() {
                    *oqc_cache = Some(self.oqc_chain()?);
                }
                let chain = oqc_cache.as_ref().unwrap();
                let n_qubits = self.terms.n_qubits();
                let circuits: Vec<Circuit> = chain
                    .iter()
                    .map(|r| r.to_circuit(n_qubits))
                    .collect::<Result<_>>()?;
                let n_traj = self.config.sampling.trajectories;
                let p2 = self.config.sampling.p2;
                let want_shots = self.config.sampling.shots.is_some();
                let per_traj: Vec<TrajectoryData> = (0..n_traj)
                    .into_par_iter()
                    .map(|traj| -> Result<_> {
                        let mut profiles = Vec::with_capacity(self.times.len());
                        let mut records = Vec::with_capacity(self.times.len());
                        let traj_shots = self.shots_for_trajectory(traj);
                        for (k, circuit) in circuits.iter().enumerate() {
                            let state = apply_noisy_circuit(
                                &self.initial,
                                circuit,
                                p2,
                                derive_seed(self.seed(), pipeline_idx, k, traj + 1),
                            )?;
                            profiles.push(site_densities(&state));
                            if want_shots && traj_shots > 0 {
                                let rec = sample_shots(
                                    &state,
                                    traj_shots,
                                    derive_seed(self.seed(), pipeline_idx + 16, k, traj + 1),
                                )?;
                                records.push(rec.counts().clone());
                            } else if want_shots {
                                records.push(BTreeMap::new());
                            }
                        }
                        Ok((profiles, records))
                    })
                    .collect::<Result<_>>()?;
                self.assemble_noisy(pipeline_idx, per_traj)?
            }
        };

        // Fidelity against the exact benchmark uses sampled densities when
        // sampling is enabled, matching the hardware comparison.
        let reference = sampled.as_ref().unwrap_or(&densities);
        let fidelity_vs_exact: Vec<f64> = reference
            .densities()
            .iter()
            .zip(&self.exact_densities)
            .map(|(p, q)| fidelity_bc(p, q))
            .collect::<Result<_>>()?;
        let overlap_series = if self.config.physics.track_overlap {
            let profiles = reference.densities();
            let n0 = &profiles[0];
            Some(
                profiles
                    .iter()
                    .map(|nt| overlap(n0, nt))
                    .collect::<Result<Vec<f64>>>()?,
            )
        } else {
            None
        };

        Ok(PipelineSeries {
            pipeline,
            densities,
            sampled,
            fidelity_vs_exact,
            overlap_series,
            depth_table,
            discard_fraction: discard,
            final_record,
        })
    }

    #[allow(clippy::type_complexity)]
    fn assemble_noisy(
        &self,
        _pipeline_idx: usize,
        per_traj: Vec<TrajectoryData>,
    ) -> Result<(
        DensitySeries,
        Option<DensitySeries>,
        Option<Vec<DepthRow>>,
        Option<Vec<f64>>,
        Option<ShotRecord>,
    )> {
        let n_traj = per_traj.len();
        let n_times = self.times.len();
        let n_sites = self.initial.n_qubits();
        // Trajectory mean in fixed trajectory order (thread-count independent).
        let mut mean = vec![vec![0.0; n_sites]; n_times];
        for (profiles, _) in &per_traj {
            for (k, profile) in profiles.iter().enumerate() {
                for (m, d) in mean[k].iter_mut().zip(profile) {
                    *m += d;
                }
            }
        }
        let mut series = DensitySeries::new();
        for (k, profile) in mean.into_iter().enumerate() {
            series.push(
                self.times[k],
                profile.into_iter().map(|d| d / n_traj as f64).collect(),
            );
        }
        if self.config.sampling.shots.is_some() {
            let records: Vec<Vec<BTreeMap<String, u64>>> =
                per_traj.into_iter().map(|(_, r)| r).collect();
            let (sampled, discards, final_record) = self.sample_noisy_series(records)?;
            Ok((series, Some(sampled), None, Some(discards), final_record))
        } else {
            Ok((series, None, None, None, None))
        }
    }
}

fn write_file(dir: &Path, name: &str, header: &str, body: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, format!("{header}{body}"))?;
    Ok(path)
}

fn summarize(ctx: &RunContext, series: &PipelineSeries) -> Result<PipelineSummary> {
    let n = series.fidelity_vs_exact.len().max(1);
    let mean_fid = series.fidelity_vs_exact.iter().sum::<f64>() / n as f64;
    let final_fid = series.fidelity_vs_exact.last().copied().unwrap_or(1.0);
    let reference = series.sampled.as_ref().unwrap_or(&series.densities);
    let (tau_avg, tau_final) = match &ctx.config.physics.transmission_sites {
        Some(sites) => {
            let tau_final = transmission(reference.densities().last().unwrap(), sites)?;
            let tau_avg = match ctx.config.physics.window {
                Some((ti, tf)) => Some(time_avg_transmission(reference, sites, ti, tf)?),
                None => None,
            };
            (tau_avg, Some(tau_final))
        }
        None => (None, None),
    };
    let (final_overlap, peak_freq) = match &series.overlap_series {
        Some(ov) => {
            let spectrum = fft_spectrum(ov, ctx.config.evolution.dt)?;
            let peak = spectrum.dominant_peak().map(|(_, f, _)| f);
            (ov.last().copied(), peak)
        }
        None => (None, None),
    };
    Ok(PipelineSummary {
        pipeline: series.pipeline.name().to_string(),
        mean_fidelity_vs_exact: mean_fid,
        final_fidelity_vs_exact: final_fid,
        tau_avg,
        tau_final,
        final_overlap,
        dominant_peak_freq: peak_freq,
        final_cr: series
            .depth_table
            .as_ref()
            .and_then(|rows| rows.last())
            .map(|r| r.cr),
        mean_discard_fraction: series
            .discard_fraction
            .as_ref()
            .map(|d| d.iter().sum::<f64>() / d.len().max(1) as f64),
    })
}

/// Executes one configured run and writes its result bundle.
pub(crate) fn run_single(config: &ExperimentConfig) -> Result<RunSummary> {
    let started = Instant::now();
    let ctx = RunContext::new(config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let seed = ctx.seed();
    let header_for = |pipeline: &str| {
        format!(
            "# scenario={} pipeline={pipeline} seed={seed}\n",
            config.scenario.name()
        )
    };

    let mut oqc_cache: Option<Vec<CompressionResult>> = None;
    let mut all_series = Vec::new();
    for (idx, &pipeline) in config.evolution.pipelines.iter().enumerate() {
        all_series.push(ctx.run_pipeline(pipeline, idx, &mut oqc_cache)?);
    }

    let dir = &config.output_dir;
    let mut files = Vec::new();
    for series in &all_series {
        let p = series.pipeline.name();
        files.push(write_file(
            dir,
            &format!("density_{p}.csv"),
            &header_for(p),
            &series.densities.to_csv(),
        )?);
        if let Some(sampled) = &series.sampled {
            files.push(write_file(
                dir,
                &format!("density_{p}_sampled.csv"),
                &header_for(p),
                &sampled.to_csv(),
            )?);
        }
        if series.pipeline != Pipeline::Exact {
            let mut body = String::from("time,fidelity\n");
            for (t, f) in ctx.times.iter().zip(&series.fidelity_vs_exact) {
                body.push_str(&format!("{t:.6},{f:.12e}\n"));
            }
            files.push(write_file(
                dir,
                &format!("fidelity_{p}.csv"),
                &header_for(p),
                &body,
            )?);
        }
        if let Some(ov) = &series.overlap_series {
            let mut body = String::from("time,overlap\n");
            for (t, o) in ctx.times.iter().zip(ov) {
                body.push_str(&format!("{t:.6},{o:.12e}\n"));
            }
            files.push(write_file(dir, &format!("overlap_{p}.csv"), &header_for(p), &body)?);
            let spectrum = fft_spectrum(ov, config.evolution.dt)?;
            files.push(write_file(
                dir,
                &format!("spectrum_{p}.csv"),
                &header_for(p),
                &spectrum.to_csv(),
            )?);
        }
        if let Some(sites) = &config.physics.transmission_sites {
            let reference = series.sampled.as_ref().unwrap_or(&series.densities);
            let taus = reference.transmission_series(sites)?;
            let mut body = String::from("time,tau\n");
            for (t, tau) in ctx.times.iter().zip(&taus) {
                body.push_str(&format!("{t:.6},{tau:.12e}\n"));
            }
            files.push(write_file(
                dir,
                &format!("transmission_{p}.csv"),
                &header_for(p),
                &body,
            )?);
        }
        if let Some(rows) = &series.depth_table {
            let mut body = String::from("time,d_uqc,d_oqc,cr,infidelity,n_layers,converged\n");
            for r in rows {
                body.push_str(&format!(
                    "{:.6},{},{},{:.6},{:.12e},{},{}\n",
                    r.t, r.d_uqc, r.d_oqc, r.cr, r.infidelity, r.n_layers, r.converged
                ));
            }
            files.push(write_file(dir, "depth_cr.csv", &header_for(p), &body)?);
        }
        if let Some(discards) = &series.discard_fraction {
            let mut body = String::from("time,discard_fraction\n");
            for (t, d) in ctx.times.iter().zip(discards) {
                body.push_str(&format!("{t:.6},{d:.12e}\n"));
            }
            files.push(write_file(
                dir,
                &format!("discards_{p}.csv"),
                &header_for(p),
                &body,
            )?);
        }
        if let Some(record) = &series.final_record {
            files.push(write_file(
                dir,
                &format!("shots_{p}_final.csv"),
                &header_for(p),
                &record.to_csv(),
            )?);
        }
    }

    if let Some(chain) = &oqc_cache {
        let results_doc = serde_json::json!({
            "scenario": config.scenario.name(),
            "pipeline": "oqc",
            "seed": seed,
            "results": chain,
        });
        files.push(write_file(
            dir,
            "compression_results.json",
            "",
            &serde_json::to_string_pretty(&results_doc).expect("results serialize"),
        )?);
        if let Some(last) = chain.last() {
            files.push(write_file(
                dir,
                "oqc_final.circuit",
                &header_for("oqc"),
                &last.to_circuit(ctx.terms.n_qubits())?.to_text(),
            )?);
        }
    }

    let pipelines: Vec<PipelineSummary> = all_series
        .iter()
        .map(|s| summarize(&ctx, s))
        .collect::<Result<_>>()?;

    let summary = RunSummary {
        scenario: config.scenario.name().to_string(),
        seed,
        output_dir: dir.clone(),
        pipelines,
        files: files.clone(),
    };
    files.push(write_file(
        dir,
        "summary.json",
        "",
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?);

    write_manifest(config, dir, seed, started.elapsed().as_secs_f64(), &oqc_cache)?;
    Ok(summary)
}

fn write_manifest(
    config: &ExperimentConfig,
    dir: &Path,
    seed: u64,
    wall_time_s: f64,
    oqc_chain: &Option<Vec<CompressionResult>>,
) -> Result<()> {
    let mut doc = toml::Table::new();
    let mut run = toml::Table::new();
    run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    run.insert("wall_time_s".into(), wall_time_s.into());
    run.insert(
        "unix_time".into(),
        toml::Value::Integer(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0),
        ),
    );
    run.insert("seed".into(), toml::Value::Integer(seed as i64));
    doc.insert("run".into(), toml::Value::Table(run));
    if let Some(chain) = oqc_chain {
        let mut comp = toml::Table::new();
        let unconverged: Vec<toml::Value> = chain
            .iter()
            .filter(|r| !r.converged)
            .map(|r| toml::Value::Float(r.t))
            .collect();
        comp.insert("unconverged_times".into(), toml::Value::Array(unconverged));
        if let Some(last) = chain.last() {
            comp.insert("final_layers".into(), toml::Value::Integer(last.n_layers as i64));
            comp.insert("final_cr".into(), toml::Value::Float(last.cr));
            comp.insert("final_infidelity".into(), toml::Value::Float(last.infidelity));
        }
        doc.insert("compression".into(), toml::Value::Table(comp));
    }
    doc.insert(
        "config".into(),
        toml::Value::Table(
            toml::Table::try_from(config)
                .map_err(|e| Error::Parse(format!("manifest serialization: {e}")))?,
        ),
    );
    let header = format!("# scenario={} pipeline=all seed={seed}\n", config.scenario.name());
    let body = toml::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(dir.join("manifest.toml"), format!("{header}{body}"))?;
    Ok(())
}

/// Runs the configured experiment: single scenarios execute directly, the
/// sweep figures (`fig7a`, `fig7b`) expand into their parameter sweeps.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    match config.scenario {
        Scenario::Fig7a => run_fig7a(config),
        Scenario::Fig7b => run_fig7b(config),
        _ => run_single(config),
    }
}

fn run_fig7a(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let values: Vec<f64> = (1..=10).map(|v| v as f64).collect();
    let sweep = super::sweep(config, "lattice.plaquette_amp", &values)?;
    let mut files = vec![sweep.aggregate_csv.clone()];
    // Figure-ready tau_avg(|J'|) table for the first configured pipeline.
    let mut body = String::from("jp,tau_avg,tau_final\n");
    for (v, summary) in values.iter().zip(&sweep.summaries) {
        let p = &summary.pipelines[0];
        body.push_str(&format!(
            "{v},{},{}\n",
            p.tau_avg.map_or(String::new(), |x| format!("{x:.12e}")),
            p.tau_final.map_or(String::new(), |x| format!("{x:.12e}")),
        ));
    }
    std::fs::create_dir_all(&config.output_dir)?;
    files.push(write_file(
        &config.output_dir,
        "tau_avg_vs_jp.csv",
        &format!(
            "# scenario=fig7a pipeline={} seed={}\n",
            config.evolution.pipelines[0].name(),
            config.sampling.seed.unwrap_or(0)
        ),
        &body,
    )?);
    write_manifest(config, &config.output_dir, config.sampling.seed.unwrap_or(0), 0.0, &None)?;
    Ok(RunSummary {
        scenario: config.scenario.name().to_string(),
        seed: config.sampling.seed.unwrap_or(0),
        output_dir: config.output_dir.clone(),
        pipelines: sweep
            .summaries
            .last()
            .map(|s| s.pipelines.clone())
            .unwrap_or_default(),
        files,
    })
}

fn run_fig7b(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let v_values: Vec<f64> = (0..=10).map(|v| v as f64).collect();
    let jps = [1.0, 5.0, 10.0];
    let mut files = Vec::new();
    let mut grid: Vec<Vec<Option<f64>>> = vec![vec![None; jps.len()]; v_values.len()];
    for (j, &jp) in jps.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.lattice.plaquette_amp = jp;
        cfg.output_dir = config.output_dir.join(format!("jp{jp:.0}"));
        let sweep = super::sweep(&cfg, "physics.interaction", &v_values)?;
        files.push(sweep.aggregate_csv.clone());
        for (row, summary) in grid.iter_mut().zip(&sweep.summaries) {
            row[j] = summary.pipelines[0].tau_final;
        }
    }
    std::fs::create_dir_all(&config.output_dir)?;
    let mut body = String::from("interaction,tau_jp1,tau_jp5,tau_jp10\n");
    for (v, row) in v_values.iter().zip(&grid) {
        body.push_str(&format!(
            "{v},{},{},{}\n",
            row[0].map_or(String::new(), |x| format!("{x:.12e}")),
            row[1].map_or(String::new(), |x| format!("{x:.12e}")),
            row[2].map_or(String::new(), |x| format!("{x:.12e}")),
        ));
    }
    let header = format!(
        "# scenario=fig7b pipeline={} seed={}\n",
        config.evolution.pipelines[0].name(),
        config.sampling.seed.unwrap_or(0)
    );
    files.push(write_file(&config.output_dir, "transmission_grid.csv", &header, &body)?);

    // Long-time inset: tau_avg over (50, 60] at |J'| = 10, exact pipeline.
    let mut inset_cfg = config.clone();
    inset_cfg.lattice.plaquette_amp = 10.0;
    inset_cfg.evolution.t_max = 60.0;
    inset_cfg.evolution.pipelines = vec![Pipeline::Exact];
    inset_cfg.physics.window = Some((50.0, 60.0));
    inset_cfg.sampling.shots = None;
    inset_cfg.output_dir = config.output_dir.join("inset");
    let inset = super::sweep(&inset_cfg, "physics.interaction", &v_values)?;
    files.push(inset.aggregate_csv.clone());
    let mut body = String::from("interaction,tau_avg_long\n");
    for (v, summary) in v_values.iter().zip(&inset.summaries) {
        body.push_str(&format!(
            "{v},{}\n",
            summary.pipelines[0]
                .tau_avg
                .map_or(String::new(), |x| format!("{x:.12e}")),
        ));
    }
    files.push(write_file(&config.output_dir, "inset_tau_avg.csv", &header, &body)?);
    write_manifest(config, &config.output_dir, config.sampling.seed.unwrap_or(0), 0.0, &None)?;
    Ok(RunSummary {
        scenario: config.scenario.name().to_string(),
        seed: config.sampling.seed.unwrap_or(0),
        output_dir: config.output_dir.clone(),
        pipelines: Vec::new(),
        files,
    })
}
