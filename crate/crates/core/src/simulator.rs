//! Statevector evolution, exact-diagonalization oracle, shot sampling,
//! post-selection and stochastic Pauli noise.
//!
//! Basis convention: qubit `q` is bit `q` of the basis-state index, `|1>`
//! marks an occupied site, and bitstrings are written with qubit 0 leftmost.
//! Noise is emulated as stochastic Pauli trajectories: after each two-qubit
//! gate a uniformly random non-identity two-qubit Pauli hits its targets with
//! probability `p2` (single-qubit gates are noiseless). Averages over seeded
//! trajectories approximate a depolarizing channel.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::hamiltonian::{sector_basis, HamiltonianTerms, Pauli};
use crate::linalg;

/// Norm tolerance for state construction and preservation checks.
pub const NORM_TOL: f64 = 1e-9;
/// Amplitudes below this threshold are treated as zero for sector detection.
const SUPPORT_EPS: f64 = 1e-12;

/// Normalized complex amplitude vector over the `2^n` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state with `|1>` at every site in `occupied`.
    pub fn prepare_initial(n_qubits: usize, occupied: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &site in occupied {
            if site >= n_qubits {
                return Err(Error::State(format!(
                    "occupied site {site} out of range for {n_qubits} qubits"
                )));
            }
            if mask >> site & 1 == 1 {
                return Err(Error::State(format!("site {site} listed twice")));
            }
            mask |= 1 << site;
        }
        let mut amplitudes = vec![Complex64::ZERO; 1 << n_qubits];
        amplitudes[mask as usize] = Complex64::ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes, requiring normalization within [`NORM_TOL`].
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "inner product between {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// State fidelity `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Per-site densities `n_q = <(1 - Z_q)/2>`.
    pub fn densities(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut m = idx;
            while m != 0 {
                let q = m.trailing_zeros() as usize;
                out[q] += p;
                m &= m - 1;
            }
        }
        out
    }

    /// The particle-number sector the state lies in; mixed-sector states are
    /// rejected.
    pub fn particle_sector(&self) -> Result<usize> {
        let mut sector: Option<u32> = None;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            if a.norm() <= SUPPORT_EPS {
                continue;
            }
            let n = (idx as u64).count_ones();
            match sector {
                None => sector = Some(n),
                Some(s) if s != n => {
                    return Err(Error::State(format!(
                        "state mixes particle-number sectors {s} and {n}"
                    )))
                }
                _ => {}
            }
        }
        sector
            .map(|s| s as usize)
            .ok_or_else(|| Error::State("state has no support".into()))
    }

    pub(crate) fn apply_gate_mut(&mut self, gate: &Gate) {
        gate.apply_to(&mut self.amplitudes);
    }
}

/// Applies every gate of the circuit in order; norm is preserved within
/// [`NORM_TOL`] because every gate is unitary.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit circuit applied to {}-qubit state",
            circuit.n_qubits(),
            state.n_qubits()
        )));
    }
    let mut out = state.clone();
    for gate in circuit.gates() {
        out.apply_gate_mut(gate);
    }
    Ok(out)
}

/// Exact evolution operator `e^{-i H t}` restricted to one particle-number
/// sector, precomputed once and reusable across times.
#[derive(Debug, Clone)]
pub struct SectorEvolver {
    n_qubits: usize,
    basis: Vec<u64>,
    eigenvalues: Vec<f64>,
    eigenvectors: nalgebra::DMatrix<Complex64>,
}

impl SectorEvolver {
    pub fn new(terms: &HamiltonianTerms, sector: usize) -> Result<Self> {
        let basis = sector_basis(terms.n_qubits(), sector)?;
        let h = terms.to_matrix(Some(sector))?;
        let (eigenvalues, eigenvectors) = linalg::eigh(&h);
        Ok(Self {
            n_qubits: terms.n_qubits(),
            basis,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn sector_dim(&self) -> usize {
        self.basis.len()
    }

    /// `e^{-i H t} |state>` for a state supported on this sector.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit evolver applied to {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let dim = self.basis.len();
        let mut coeffs = nalgebra::DVector::zeros(dim);
        for (k, &mask) in self.basis.iter().enumerate() {
            coeffs[k] = state.amplitudes()[mask as usize];
        }
        let mut modal = self.eigenvectors.adjoint() * coeffs;
        for (k, c) in modal.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        let evolved = &self.eigenvectors * modal;
        let mut amplitudes = vec![Complex64::ZERO; 1 << self.n_qubits];
        for (k, &mask) in self.basis.iter().enumerate() {
            amplitudes[mask as usize] = evolved[k];
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes,
        })
    }
}

/// `e^{-i H t} |state>` by eigendecomposition of the sector-restricted
/// matrix. The state must lie in a single particle-number sector.
pub fn exact_evolve(terms: &HamiltonianTerms, state: &StateVector, t: f64) -> Result<StateVector> {
    if terms.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit Hamiltonian applied to {}-qubit state",
            terms.n_qubits(),
            state.n_qubits()
        )));
    }
    let sector = state.particle_sector()?;
    SectorEvolver::new(terms, sector)?.evolve(state, t)
}

/// Measurement-shot histogram with post-selection bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    counts: BTreeMap<String, u64>,
    n_shots: u64,
    discarded: u64,
}

impl ShotRecord {
    /// Builds a record from raw counts (e.g. counts pooled across noise
    /// trajectories); nothing is discarded yet.
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let n_shots = counts.values().sum();
        Self {
            counts,
            n_shots,
            discarded: 0,
        }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn discarded(&self) -> u64 {
        self.discarded
    }

    /// Kept shots (total minus discarded).
    pub fn kept(&self) -> u64 {
        self.n_shots - self.discarded
    }

    /// `bitstring,count` CSV lines in lexicographic bitstring order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (s, c) in &self.counts {
            out.push_str(&format!("{s},{c}\n"));
        }
        out
    }
}

/// Bitstring with qubit 0 leftmost.
pub fn bitstring(mask: u64, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if mask >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Multinomial draw of `n_shots` outcomes from `|amplitudes|^2`;
/// deterministic for a fixed seed.
pub fn sample_shots(state: &StateVector, n_shots: u64, seed: u64) -> Result<ShotRecord> {
    if n_shots == 0 {
        return Err(Error::Sampling("shot count must be positive".into()));
    }
    let mut cumulative = Vec::new();
    let mut acc = 0.0;
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            acc += p;
            cumulative.push((acc, idx as u64));
        }
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..n_shots {
        let r: f64 = rng.random::<f64>() * total;
        let pos = cumulative.partition_point(|&(c, _)| c < r);
        let idx = cumulative[pos.min(cumulative.len() - 1)].1;
        *counts.entry(bitstring(idx, state.n_qubits())).or_insert(0) += 1;
    }
    Ok(ShotRecord {
        counts,
        n_shots,
        discarded: 0,
    })
}

/// Keeps only bitstrings with exactly `n_particles` set bits; everything else
/// is added to the discarded tally. Discarding every shot is an error.
pub fn post_select(record: &ShotRecord, n_particles: usize) -> Result<ShotRecord> {
    let mut counts = BTreeMap::new();
    let mut discarded = record.discarded;
    for (s, &c) in &record.counts {
        if s.chars().filter(|&ch| ch == '1').count() == n_particles {
            counts.insert(s.clone(), c);
        } else {
            discarded += c;
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyRecord(record.n_shots));
    }
    Ok(ShotRecord {
        counts,
        n_shots: record.n_shots,
        discarded,
    })
}

fn apply_pauli(amps: &mut [Complex64], qubit: usize, p: Pauli) {
    let bit = 1usize << qubit;
    match p {
        Pauli::I => {}
        Pauli::X => {
            for base in 0..amps.len() {
                if base & bit == 0 {
                    amps.swap(base, base | bit);
                }
            }
        }
        Pauli::Y => {
            for base in 0..amps.len() {
                if base & bit == 0 {
                    let a0 = amps[base];
                    let a1 = amps[base | bit];
                    amps[base] = -Complex64::I * a1;
                    amps[base | bit] = Complex64::I * a0;
                }
            }
        }
        Pauli::Z => {
            for (idx, a) in amps.iter_mut().enumerate() {
                if idx & bit != 0 {
                    *a = -*a;
                }
            }
        }
    }
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// One stochastic Pauli trajectory: after each two-qubit gate, with
/// probability `p2` a uniformly random non-identity two-qubit Pauli hits its
/// targets. Deterministic for a fixed seed.
pub fn apply_noisy_circuit(
    state: &StateVector,
    circuit: &Circuit,
    p2: f64,
    seed: u64,
) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&p2) {
        return Err(Error::Sampling(format!(
            "two-qubit error probability must be in [0, 1], got {p2}"
        )));
    }
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit circuit applied to {}-qubit state",
            circuit.n_qubits(),
            state.n_qubits()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = state.clone();
    for gate in circuit.gates() {
        out.apply_gate_mut(gate);
        if let Gate::Two { targets, .. } = gate {
            if rng.random::<f64>() < p2 {
                // 15 non-identity Pauli pairs, index 1..=15.
                let k: usize = rng.random_range(1..16);
                apply_pauli(&mut out.amplitudes, targets[0], PAULIS[k & 3]);
                apply_pauli(&mut out.amplitudes, targets[1], PAULIS[k >> 2]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{trotter_circuit, trotter_step};
    use crate::hamiltonian::{hopping_terms, HamiltonianTerms, PauliTerm};
    use crate::lattice::{build_diamond_chain, build_single_plaquette};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn prepare_initial_basics() {
        let s = StateVector::prepare_initial(13, &[6]).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[1 << 6].norm(), 1.0);
        assert_eq!(s.particle_sector().unwrap(), 1);

        let two = StateVector::prepare_initial(10, &[0, 1]).unwrap();
        assert_abs_diff_eq!(two.amplitudes()[0b11].norm(), 1.0);
        assert_eq!(two.particle_sector().unwrap(), 2);

        let vac = StateVector::prepare_initial(3, &[]).unwrap();
        assert_abs_diff_eq!(vac.amplitudes()[0].norm(), 1.0);

        assert!(StateVector::prepare_initial(3, &[3]).is_err());
        assert!(StateVector::prepare_initial(3, &[1, 1]).is_err());
    }

    #[test]
    fn identity_circuit_is_noop() {
        let s = StateVector::prepare_initial(4, &[1, 2]).unwrap();
        let c = Circuit::new(4);
        let out = apply_circuit(&s, &c).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn givens_gate_amplitudes_match_exact_evolution() {
        // One bond at amplitude +1 evolved for dt: the statevector route and
        // the ED oracle must agree on |10> -> cos(dt)|10> + e^{i phase} sin(dt)|01>.
        let spec = crate::lattice::LatticeSpec::new(
            vec![crate::lattice::SiteLabel::Chain(0), crate::lattice::SiteLabel::Chain(1)],
            vec![crate::lattice::Edge {
                i: 0,
                j: 1,
                amplitude: Complex64::ONE,
            }],
            vec![0, 1],
        )
        .unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let dt = 0.37;
        let s = StateVector::prepare_initial(2, &[0]).unwrap();
        let circuit = trotter_step(&terms, dt).unwrap();
        let via_gate = apply_circuit(&s, &circuit).unwrap();
        let via_ed = exact_evolve(&terms, &s, dt).unwrap();
        for (a, b) in via_gate.amplitudes().iter().zip(via_ed.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_abs_diff_eq!(via_gate.amplitudes()[0b01].norm(), dt.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(via_gate.amplitudes()[0b10].norm(), dt.sin(), epsilon = 1e-12);
    }

    #[test]
    fn thirteen_site_walk_trotter_fidelity() {
        let spec = build_diamond_chain(4, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let s0 = StateVector::prepare_initial(13, &[6]).unwrap();
        let step = trotter_step(&terms, 0.1).unwrap();
        let mut s = s0.clone();
        for _ in 0..60 {
            s = apply_circuit(&s, &step).unwrap();
        }
        let exact = exact_evolve(&terms, &s0, 6.0).unwrap();
        let f = s.fidelity(&exact).unwrap();
        assert!(f >= 0.98, "Trotter fidelity at t=6: {f}");
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn exact_evolve_identity_at_t0() {
        let spec = build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        let out = exact_evolve(&terms, &s, 0.0).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fb_plaquette_full_transfer() {
        // n_3(t) = sin^4(t): full transfer at t = pi/2.
        let spec = build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        for &t in &[0.3, 0.9, std::f64::consts::FRAC_PI_2] {
            let out = exact_evolve(&terms, &s, t).unwrap();
            let n3 = out.densities()[3];
            assert_abs_diff_eq!(n3, t.sin().powi(4), epsilon = 1e-12);
        }
        let out = exact_evolve(&terms, &s, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((out.densities()[3] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn abf_plaquette_cages_site_three() {
        let spec = build_single_plaquette(true);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        let evolver = SectorEvolver::new(&terms, 1).unwrap();
        let mut k = 0;
        while k <= 200 {
            let t = 0.1 * k as f64;
            let out = evolver.evolve(&s, t).unwrap();
            let d = out.densities();
            assert!(d[3] < 1e-10, "site 3 density {} at t={t}", d[3]);
            // Two-level oscillation confined to sites {0, 1, 2}.
            assert_abs_diff_eq!(d[0], (2f64.sqrt() * t).cos().powi(2), epsilon = 1e-10);
            k += 1;
        }
    }

    #[test]
    fn mixed_sector_rejected() {
        let amps = vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
        ];
        let s = StateVector::from_amplitudes(2, amps).unwrap();
        assert!(s.particle_sector().is_err());
        let spec = crate::lattice::build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        // Wrong qubit count also rejected.
        assert!(exact_evolve(&terms, &s, 1.0).is_err());
    }

    #[test]
    fn shots_on_basis_state() {
        let s = StateVector::prepare_initial(2, &[0]).unwrap();
        let rec = sample_shots(&s, 100, 7).unwrap();
        assert_eq!(rec.counts().len(), 1);
        assert_eq!(rec.counts()["10"], 100);
        assert_eq!(rec.discarded(), 0);
        assert!(sample_shots(&s, 0, 7).is_err());
    }

    #[test]
    fn shots_on_uniform_state_within_5_sigma() {
        let amps = vec![Complex64::new(0.5, 0.0); 4];
        let s = StateVector::from_amplitudes(2, amps).unwrap();
        let rec = sample_shots(&s, 4096, 42).unwrap();
        let sigma = (4096.0_f64 * 0.25 * 0.75).sqrt();
        for &c in rec.counts().values() {
            assert!((c as f64 - 1024.0).abs() < 5.0 * sigma);
        }
        assert_eq!(rec.counts().values().sum::<u64>(), 4096);
    }

    #[test]
    fn shots_deterministic_for_fixed_seed() {
        let spec = build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        let out = exact_evolve(&terms, &s, 0.7).unwrap();
        let a = sample_shots(&out, 4096, 123).unwrap();
        let b = sample_shots(&out, 4096, 123).unwrap();
        assert_eq!(a, b);
        let c = sample_shots(&out, 4096, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn post_selection_filters_and_counts() {
        let mut counts = BTreeMap::new();
        counts.insert("01".to_string(), 100);
        counts.insert("11".to_string(), 5);
        let rec = ShotRecord {
            counts,
            n_shots: 105,
            discarded: 0,
        };
        let kept = post_select(&rec, 1).unwrap();
        assert_eq!(kept.counts().len(), 1);
        assert_eq!(kept.counts()["01"], 100);
        assert_eq!(kept.discarded(), 5);
        assert_eq!(kept.kept() + kept.discarded(), 105);
        assert!(post_select(&rec, 2).is_ok());
        assert!(post_select(&rec, 0).is_err());
    }

    #[test]
    fn noiseless_sampling_discards_nothing() {
        let spec = build_diamond_chain(2, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(7, &[3]).unwrap();
        let c = trotter_circuit(&terms, 2.0, 0.1).unwrap();
        let out = apply_circuit(&s, &c).unwrap();
        let rec = sample_shots(&out, 4096, 9).unwrap();
        let kept = post_select(&rec, 1).unwrap();
        assert_eq!(kept.discarded(), 0);
    }

    #[test]
    fn noise_p0_matches_noiseless() {
        let spec = build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        let c = trotter_circuit(&terms, 1.0, 0.1).unwrap();
        let clean = apply_circuit(&s, &c).unwrap();
        let noisy = apply_noisy_circuit(&s, &c, 0.0, 5).unwrap();
        assert_eq!(clean, noisy);
        assert!(apply_noisy_circuit(&s, &c, 1.5, 5).is_err());
        assert!(apply_noisy_circuit(&s, &c, -0.1, 5).is_err());
    }

    #[test]
    fn noise_p1_always_corrupts() {
        let spec = build_single_plaquette(false);
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(4, &[0]).unwrap();
        let step = trotter_step(&terms, 0.1).unwrap();
        let clean = apply_circuit(&s, &step).unwrap();
        let mut mean_fid = 0.0;
        let n_traj = 64;
        for seed in 0..n_traj {
            let noisy = apply_noisy_circuit(&s, &step, 1.0, seed).unwrap();
            assert_abs_diff_eq!(noisy.norm(), 1.0, epsilon = 1e-9);
            mean_fid += clean.fidelity(&noisy).unwrap();
        }
        mean_fid /= n_traj as f64;
        assert!(mean_fid < 1.0, "mean fidelity {mean_fid}");
    }

    #[test]
    fn trotter_equals_exact_for_commuting_hamiltonian() {
        // ZZ-only Hamiltonians: the single-step circuit is the exact propagator.
        let n = 5;
        let mut terms = Vec::new();
        for q in 0..n - 1 {
            terms.push(PauliTerm::from_ops(0.3 * (q as f64 + 1.0), n, &[(q, Pauli::Z), (q + 1, Pauli::Z)]).unwrap());
        }
        let h = HamiltonianTerms::new(n, terms, true).unwrap();
        let s = StateVector::prepare_initial(n, &[0, 2]).unwrap();
        // Superpose two basis states in the same sector to see real dynamics.
        let mut amps = s.amplitudes().to_vec();
        amps[0b00101] = Complex64::new(0.0, 0.0);
        amps[0b00011] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0b10100] = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        let s = StateVector::from_amplitudes(n, amps).unwrap();
        let t = 1.3;
        let via_gate = apply_circuit(&s, &trotter_circuit(&h, t, t).unwrap()).unwrap();
        let via_ed = exact_evolve(&h, &s, t).unwrap();
        for (a, b) in via_gate.amplitudes().iter().zip(via_ed.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn sampled_densities_converge_with_shots() {
        let spec = build_diamond_chain(2, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let s = StateVector::prepare_initial(7, &[3]).unwrap();
        let out = exact_evolve(&terms, &s, 3.0).unwrap();
        let exact = out.densities();
        let err_for = |shots: u64| {
            let rec = sample_shots(&out, shots, 31).unwrap();
            let mut dens = vec![0.0; 7];
            for (bits, &c) in rec.counts() {
                for (q, ch) in bits.chars().enumerate() {
                    if ch == '1' {
                        dens[q] += c as f64;
                    }
                }
            }
            let kept = rec.kept() as f64;
            exact
                .iter()
                .zip(&dens)
                .map(|(e, d)| (e - d / kept).abs())
                .fold(0.0, f64::max)
        };
        let e_small = err_for(4096);
        let e_large = err_for(10_000);
        // ~1/sqrt(shots): 3-sigma binomial envelopes.
        assert!(e_small < 3.0 * 0.5 / (4096f64).sqrt(), "err {e_small}");
        assert!(e_large < 3.0 * 0.5 / (10_000f64).sqrt(), "err {e_large}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn norm_and_sector_preserved_by_trotter(
            n_cells in 1usize..3,
            flux in prop::sample::select(vec![0.0, std::f64::consts::PI]),
            steps in 1usize..6,
        ) {
            let spec = build_diamond_chain(n_cells, flux).unwrap();
            let terms = hopping_terms(&spec).unwrap();
            let n = spec.n_sites();
            let s = StateVector::prepare_initial(n, &[n / 2]).unwrap();
            let c = trotter_circuit(&terms, 0.1 * steps as f64, 0.1).unwrap();
            let out = apply_circuit(&s, &c).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-9);
            // Noiseless evolution never leaves the initial sector.
            prop_assert_eq!(out.particle_sector().unwrap(), 1);
        }
    }
}
