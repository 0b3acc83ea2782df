//! End-to-end runs of the experiment runner on small configurations.

use flatwalk::experiment::{run_experiment, sweep, ExperimentConfig, Pipeline, Scenario};

fn tiny_fig3(dir: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Fig3);
    cfg.evolution.t_max = 0.5;
    cfg.sampling.shots = Some(512);
    cfg.compression.max_layers = 6;
    cfg.output_dir = dir.to_path_buf();
    cfg
}

#[test]
fn fig3_bundle_files_and_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_fig3(dir.path());
    let summary = run_experiment(&cfg).unwrap();

    for name in [
        "density_exact.csv",
        "density_trotter.csv",
        "density_trotter_sampled.csv",
        "density_oqc.csv",
        "fidelity_trotter.csv",
        "fidelity_oqc.csv",
        "depth_cr.csv",
        "compression_results.json",
        "oqc_final.circuit",
        "shots_oqc_final.csv",
        "manifest.toml",
        "summary.json",
    ] {
        let path = dir.path().join(name);
        assert!(path.exists(), "missing {name}");
        if name.ends_with(".csv") {
            let text = std::fs::read_to_string(&path).unwrap();
            let first = text.lines().next().unwrap();
            assert!(
                first.starts_with("# scenario=fig3")
                    && first.contains("pipeline=")
                    && first.contains("seed="),
                "bad header in {name}: {first}"
            );
        }
    }

    assert_eq!(summary.pipelines.len(), 3);
    for p in &summary.pipelines {
        assert!(
            p.mean_fidelity_vs_exact > 0.9,
            "{}: mean fidelity {}",
            p.pipeline,
            p.mean_fidelity_vs_exact
        );
    }
    let manifest = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("[config.lattice]"));
    assert!(manifest.contains("wall_time_s"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let mut cfg_a = tiny_fig3(dir_a.path());
    cfg_a.evolution.t_max = 0.3;
    let mut cfg_b = cfg_a.clone();
    cfg_b.output_dir = dir_b.path().to_path_buf();
    run_experiment(&cfg_a).unwrap();
    run_experiment(&cfg_b).unwrap();
    for entry in std::fs::read_dir(dir_a.path()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name == "manifest.toml" || name == "summary.json" {
            continue; // manifest carries timestamps; summary carries paths
        }
        let a = std::fs::read(&path).unwrap();
        let b = std::fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(a, b, "payload differs for {name}");
    }
}

#[test]
fn noisy_pipeline_discards_and_renormalizes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Custom);
    cfg.lattice = flatwalk::experiment::LatticeConfig {
        kind: flatwalk::experiment::LatticeKind::Plaquette,
        reversed_link: false,
        ..Default::default()
    };
    cfg.physics.occupied = vec![0];
    cfg.evolution.t_max = 1.0;
    cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::NoisyUqc];
    cfg.sampling.shots = Some(1024);
    cfg.sampling.trajectories = 16;
    cfg.sampling.p2 = 0.05;
    cfg.output_dir = dir.path().to_path_buf();
    let summary = run_experiment(&cfg).unwrap();

    let noiseless = &summary.pipelines[1];
    assert_eq!(noiseless.mean_discard_fraction, Some(0.0));
    let noisy = summary.pipelines.iter().find(|p| p.pipeline == "noisy_uqc").unwrap();
    assert!(noisy.mean_discard_fraction.unwrap() > 0.0);

    // Post-selected sampled densities sum to the particle number.
    let text = std::fs::read_to_string(dir.path().join("density_noisy_uqc_sampled.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let total: f64 = last.split(',').skip(1).map(|x| x.parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9, "post-selected sum {total}");
}

#[test]
fn custom_run_loads_lattice_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = flatwalk::build_embedded_chain(2, 2, 1.0, true).unwrap();
    let lattice_path = dir.path().join("switch.lattice");
    std::fs::write(&lattice_path, spec.to_text()).unwrap();

    let mut cfg = ExperimentConfig::for_scenario(Scenario::Custom);
    cfg.lattice.kind = flatwalk::experiment::LatticeKind::File;
    cfg.lattice.file = Some(lattice_path);
    cfg.physics.occupied = vec![0];
    cfg.evolution.t_max = 1.0;
    cfg.evolution.pipelines = vec![Pipeline::Exact];
    cfg.sampling.shots = None;
    cfg.output_dir = dir.path().join("out");
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.pipelines.len(), 1);
    let text = std::fs::read_to_string(dir.path().join("out/density_exact.csv")).unwrap();
    // 6 sites from the loaded lattice: time column + n_0..n_5.
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 7);
}

#[test]
fn two_particle_sampled_transmission_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Fig6);
    cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter];
    cfg.output_dir = dir.path().to_path_buf();
    let summary = run_experiment(&cfg).unwrap();

    // Sampled occupations sum to the particle number.
    let text = std::fs::read_to_string(dir.path().join("density_trotter_sampled.csv")).unwrap();
    for line in text.lines().skip(2) {
        let total: f64 = line.split(',').skip(1).map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((total - 2.0).abs() < 1e-9, "sampled density sum {total}");
    }

    // Sampled tau_avg tracks the exact value within shot noise.
    let exact_tau = summary.pipelines[0].tau_avg.unwrap();
    let sampled_tau = summary.pipelines[1].tau_avg.unwrap();
    assert!(
        (sampled_tau - exact_tau).abs() < 0.05,
        "sampled tau_avg {sampled_tau:.4} vs exact {exact_tau:.4}"
    );
}

#[test]
fn sweep_aggregates_in_value_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Fig3);
    cfg.evolution.t_max = 0.2;
    cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter];
    cfg.output_dir = dir.path().to_path_buf();
    let result = sweep(&cfg, "sampling.shots", &[16.0, 256.0]).unwrap();
    assert_eq!(result.summaries.len(), 2);
    assert!(result.aggregate_csv.exists());
    let text = std::fs::read_to_string(&result.aggregate_csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert!(rows[0].starts_with("16,"));
    assert!(rows[1].starts_with("256,"));
    assert!(dir.path().join("sampling_shots_16").join("density_exact.csv").exists());

    assert!(sweep(&cfg, "lattice.kind", &[1.0]).is_err());
    assert!(sweep(&cfg, "sampling.shots", &[]).is_err());
}
