//! Variational compression of deep Trotter circuits into bounded-depth
//! brick-wall circuits.
//!
//! The ansatz is a brick-wall of fully parametrized two-qubit blocks: per
//! layer, bricks on pairs `(0,1), (2,3), ...` followed by `(1,2), (3,4), ...`.
//! Each block is `U(p) = exp(-i sum_k p_k G_k)` over the 15 non-identity
//! two-qubit Pauli generators, a minimal 15-parameter chart of SU(4) (global
//! phase excluded) with `U(0) = I`.
//!
//! The loss is `C(theta) = 1 - |<target| U(theta) |initial>|^2`, minimized
//! with a limited-memory quasi-Newton method (strong-Wolfe line search,
//! curvature memory 10). If the optimization saturates above the infidelity
//! budget, one brick-wall layer is appended (initialized near the identity,
//! previous parameters warm-started) and the optimization repeats, up to
//! `max_layers`. Gradients are exact: per block, the directional derivative
//! of the matrix exponential is evaluated through the eigenbasis of the block
//! generator (Daleckii-Krein), contracted against the block environment.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::circuit::{compression_ratio, trotter_circuit, Circuit, Gate};
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianTerms, Pauli};
use crate::lbfgs::{minimize, LbfgsOptions};
use crate::simulator::{apply_circuit, exact_evolve, StateVector};

pub const PARAMS_PER_BLOCK: usize = 15;

/// Reference state used as the compression target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSource {
    /// Exact-diagonalization state `e^{-iHt}|psi0>` (the default).
    #[default]
    Exact,
    /// The deep Trotter circuit's own output at `reference_dt`, so the
    /// compression reproduces the Trotterized state including its error.
    Trotter,
}

/// Compression settings. `seed` drives every random draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompressConfig {
    /// State-fidelity target `|<target|ansatz>|^2`.
    pub fidelity_target: f64,
    pub max_layers: usize,
    pub seed: u64,
    /// Independent seeded restarts of the whole adaptive schedule; the best
    /// result is kept.
    pub restarts: usize,
    pub max_iterations: usize,
    pub grad_tol: f64,
    /// Saturation rule for adding a layer: relative loss improvement below
    /// `saturation_rtol` over `saturation_window` iterations.
    pub saturation_window: usize,
    pub saturation_rtol: f64,
    /// New layers start at identity plus uniform noise of this scale.
    pub init_scale: f64,
    pub target_source: TargetSource,
    /// Trotter step used for the UQC depth reference (and for
    /// [`TargetSource::Trotter`] targets).
    pub reference_dt: f64,
}

impl Default for CompressConfig {
    fn default() -> Self {
        Self {
            fidelity_target: 0.999,
            max_layers: 16,
            seed: 7,
            restarts: 1,
            max_iterations: 2000,
            grad_tol: 1e-9,
            saturation_window: 50,
            saturation_rtol: 1e-7,
            init_scale: 1e-2,
            target_source: TargetSource::Exact,
            reference_dt: 0.1,
        }
    }
}

/// Brick-wall ansatz structure (the parameters live in a separate flat
/// vector, layer-major, 15 per block).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    n_layers: usize,
}

impl AnsatzCircuit {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Compression(format!(
                "brick-wall ansatz needs >= 2 qubits, got {n_qubits}"
            )));
        }
        Ok(Self { n_qubits, n_layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    /// Blocks of one layer: even bricks then odd bricks.
    pub fn layer_blocks(&self) -> Vec<[usize; 2]> {
        let mut blocks = Vec::with_capacity(self.n_qubits - 1);
        let mut q = 0;
        while q + 1 < self.n_qubits {
            blocks.push([q, q + 1]);
            q += 2;
        }
        let mut q = 1;
        while q + 1 < self.n_qubits {
            blocks.push([q, q + 1]);
            q += 2;
        }
        blocks
    }

    pub fn blocks_per_layer(&self) -> usize {
        self.n_qubits - 1
    }

    pub fn n_parameters(&self) -> usize {
        PARAMS_PER_BLOCK * self.blocks_per_layer() * self.n_layers
    }

    /// All blocks in application order (layer-major).
    pub fn blocks(&self) -> Vec<[usize; 2]> {
        let layer = self.layer_blocks();
        let mut out = Vec::with_capacity(layer.len() * self.n_layers);
        for _ in 0..self.n_layers {
            out.extend_from_slice(&layer);
        }
        out
    }

    /// Instantiates the ansatz at `theta` as a gate circuit.
    pub fn to_circuit(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_theta(theta)?;
        let mut circuit = Circuit::new(self.n_qubits);
        for (b, targets) in self.blocks().into_iter().enumerate() {
            let params: &[f64; PARAMS_PER_BLOCK] = theta
                [b * PARAMS_PER_BLOCK..(b + 1) * PARAMS_PER_BLOCK]
                .try_into()
                .expect("chunk size checked");
            circuit.push(Gate::two(targets, block_unitary(params))?)?;
        }
        Ok(circuit)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_parameters() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for an ansatz needing {}",
                theta.len(),
                self.n_parameters()
            )));
        }
        Ok(())
    }
}

/// The 15 non-identity two-qubit Pauli generators, in `(P_a, P_b)` order with
/// local index `m = bit(a) + 2 bit(b)`.
fn block_generators() -> &'static [Matrix4<Complex64>; 15] {
    static GENERATORS: OnceLock<[Matrix4<Complex64>; 15]> = OnceLock::new();
    GENERATORS.get_or_init(|| {
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let mut out = [Matrix4::zeros(); 15];
        let mut k = 0;
        for &pa in &paulis {
            for &pb in &paulis {
                if pa == Pauli::I && pb == Pauli::I {
                    continue;
                }
                let ma = pa.matrix();
                let mb = pb.matrix();
                let mut g = Matrix4::zeros();
                for m_out in 0..4 {
                    for m_in in 0..4 {
                        g[(m_out, m_in)] = ma[(m_out & 1, m_in & 1)] * mb[(m_out >> 1, m_in >> 1)];
                    }
                }
                out[k] = g;
                k += 1;
            }
        }
        out
    })
}

fn block_hamiltonian(params: &[f64; PARAMS_PER_BLOCK]) -> Matrix4<Complex64> {
    let gens = block_generators();
    let mut h = Matrix4::zeros();
    for (p, g) in params.iter().zip(gens.iter()) {
        h += g * Complex64::new(*p, 0.0);
    }
    h
}

fn block_eigh(params: &[f64; PARAMS_PER_BLOCK]) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = block_hamiltonian(params);
    crate::linalg::eigh(&DMatrix::from_iterator(4, 4, h.iter().cloned()))
}

/// `U(p) = exp(-i H(p))`.
pub(crate) fn block_unitary(params: &[f64; PARAMS_PER_BLOCK]) -> Matrix4<Complex64> {
    let (w, v) = block_eigh(params);
    let mut u = DMatrix::zeros(4, 4);
    for (k, &eigenvalue) in w.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -eigenvalue);
        let col = v.column(k);
        for r in 0..4 {
            for c in 0..4 {
                u[(r, c)] += phase * col[r] * col[c].conj();
            }
        }
    }
    Matrix4::from_iterator(u.iter().cloned())
}

/// Unitary and all 15 partial derivatives `dU/dp_k` of one block, via the
/// Daleckii-Krein formula in the generator's eigenbasis.
fn block_unitary_and_derivs(
    params: &[f64; PARAMS_PER_BLOCK],
) -> (Matrix4<Complex64>, Vec<Matrix4<Complex64>>) {
    let (w, v) = block_eigh(params);
    let phases: Vec<Complex64> = w.iter().map(|&x| Complex64::from_polar(1.0, -x)).collect();

    let mut u = Matrix4::zeros();
    for (k, &phase) in phases.iter().enumerate() {
        for r in 0..4 {
            for c in 0..4 {
                u[(r, c)] += phase * v[(r, k)] * v[(c, k)].conj();
            }
        }
    }

    // Divided differences of f(x) = exp(-i x) on the eigenvalue pairs.
    let mut phi = [[Complex64::ZERO; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let diff = w[a] - w[b];
            phi[a][b] = if diff.abs() < 1e-4 {
                -Complex64::I * Complex64::from_polar(1.0, -0.5 * (w[a] + w[b]))
            } else {
                (phases[a] - phases[b]) / Complex64::new(diff, 0.0)
            };
        }
    }

    let gens = block_generators();
    let mut derivs = Vec::with_capacity(PARAMS_PER_BLOCK);
    for g in gens.iter() {
        // W = V^dag G V, then dU = V (phi o W) V^dag.
        let mut wmat = [[Complex64::ZERO; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = Complex64::ZERO;
                for r in 0..4 {
                    for c in 0..4 {
                        acc += v[(r, a)].conj() * g[(r, c)] * v[(c, b)];
                    }
                }
                wmat[a][b] = acc * phi[a][b];
            }
        }
        let mut du = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = Complex64::ZERO;
                for a in 0..4 {
                    for b in 0..4 {
                        acc += v[(r, a)] * wmat[a][b] * v[(c, b)].conj();
                    }
                }
                du[(r, c)] = acc;
            }
        }
        derivs.push(du);
    }
    (u, derivs)
}

fn apply_block(amps: &mut [Complex64], targets: [usize; 2], u: &Matrix4<Complex64>) {
    let b0 = 1usize << targets[0];
    let b1 = 1usize << targets[1];
    for base in 0..amps.len() {
        if base & b0 != 0 || base & b1 != 0 {
            continue;
        }
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (row, &i) in idx.iter().enumerate() {
            amps[i] = u[(row, 0)] * a[0] + u[(row, 1)] * a[1] + u[(row, 2)] * a[2] + u[(row, 3)] * a[3];
        }
    }
}

/// Cross environment of a block: `Env[m][m'] = sum_rest conj(chi[m, rest]) *
/// psi[m', rest]` on the block's two qubits.
fn block_environment(
    chi: &[Complex64],
    psi: &[Complex64],
    targets: [usize; 2],
) -> [[Complex64; 4]; 4] {
    let b0 = 1usize << targets[0];
    let b1 = 1usize << targets[1];
    let mut env = [[Complex64::ZERO; 4]; 4];
    for base in 0..chi.len() {
        if base & b0 != 0 || base & b1 != 0 {
            continue;
        }
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        for m_out in 0..4 {
            let c = chi[idx[m_out]].conj();
            if c == Complex64::ZERO {
                continue;
            }
            for m_in in 0..4 {
                env[m_out][m_in] += c * psi[idx[m_in]];
            }
        }
    }
    env
}

fn check_states(
    ansatz: &AnsatzCircuit,
    initial: &StateVector,
    target: &StateVector,
) -> Result<()> {
    if initial.n_qubits() != ansatz.n_qubits() || target.n_qubits() != ansatz.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "ansatz on {} qubits, states on {} and {}",
            ansatz.n_qubits(),
            initial.n_qubits(),
            target.n_qubits()
        )));
    }
    Ok(())
}

/// Fidelity loss `C(theta) = 1 - |<target| U(theta) |initial>|^2`.
pub fn loss(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &StateVector,
    target: &StateVector,
) -> Result<f64> {
    check_states(ansatz, initial, target)?;
    ansatz.check_theta(theta)?;
    let mut amps = initial.amplitudes().to_vec();
    for (b, targets) in ansatz.blocks().into_iter().enumerate() {
        let params: &[f64; PARAMS_PER_BLOCK] = theta
            [b * PARAMS_PER_BLOCK..(b + 1) * PARAMS_PER_BLOCK]
            .try_into()
            .expect("chunk size checked");
        apply_block(&mut amps, targets, &block_unitary(params));
    }
    let overlap: Complex64 = target
        .amplitudes()
        .iter()
        .zip(&amps)
        .map(|(t, a)| t.conj() * a)
        .sum();
    Ok((1.0 - overlap.norm_sqr()).clamp(0.0, 1.0))
}

/// Exact analytic gradient of [`loss`] with respect to `theta`.
pub fn gradient(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &StateVector,
    target: &StateVector,
) -> Result<Vec<f64>> {
    Ok(loss_and_gradient(ansatz, theta, initial, target)?.1)
}

/// Loss and gradient in one reverse sweep.
pub fn loss_and_gradient(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &StateVector,
    target: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    check_states(ansatz, initial, target)?;
    ansatz.check_theta(theta)?;
    let blocks = ansatz.blocks();
    let n_blocks = blocks.len();

    let mut unitaries = Vec::with_capacity(n_blocks);
    let mut derivs = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        let params: &[f64; PARAMS_PER_BLOCK] = theta
            [b * PARAMS_PER_BLOCK..(b + 1) * PARAMS_PER_BLOCK]
            .try_into()
            .expect("chunk size checked");
        let (u, du) = block_unitary_and_derivs(params);
        unitaries.push(u);
        derivs.push(du);
    }

    // Forward pass: psi_b = U_b ... U_1 |initial>, all intermediates kept.
    let mut forward = Vec::with_capacity(n_blocks + 1);
    forward.push(initial.amplitudes().to_vec());
    for b in 0..n_blocks {
        let mut next = forward[b].clone();
        apply_block(&mut next, blocks[b], &unitaries[b]);
        forward.push(next);
    }

    let overlap: Complex64 = target
        .amplitudes()
        .iter()
        .zip(&forward[n_blocks])
        .map(|(t, a)| t.conj() * a)
        .sum();
    let loss_value = (1.0 - overlap.norm_sqr()).clamp(0.0, 1.0);

    // Backward pass: chi_b = U_{b+1}^dag ... U_B^dag |target>.
    let mut grad = vec![0.0; theta.len()];
    let mut chi = target.amplitudes().to_vec();
    for b in (0..n_blocks).rev() {
        let env = block_environment(&chi, &forward[b], blocks[b]);
        for (k, du) in derivs[b].iter().enumerate() {
            let mut d_overlap = Complex64::ZERO;
            for m_out in 0..4 {
                for m_in in 0..4 {
                    d_overlap += du[(m_out, m_in)] * env[m_out][m_in];
                }
            }
            grad[b * PARAMS_PER_BLOCK + k] = -2.0 * (overlap.conj() * d_overlap).re;
        }
        let adjoint = unitaries[b].adjoint();
        apply_block(&mut chi, blocks[b], &adjoint);
    }
    Ok((loss_value, grad))
}

/// Optimized ansatz parameters with bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionResult {
    pub parameters: Vec<f64>,
    pub n_layers: usize,
    /// Achieved `C(theta*)`.
    pub infidelity: f64,
    /// Total optimizer iterations across depth stages.
    pub iterations: usize,
    /// Compression ratio in percent against the Trotter reference depth.
    pub cr: f64,
    pub converged: bool,
    /// Evolution time of the compressed state.
    pub t: f64,
}

impl CompressionResult {
    /// Instantiates the optimized circuit.
    pub fn to_circuit(&self, n_qubits: usize) -> Result<Circuit> {
        if self.n_layers == 0 {
            return Ok(Circuit::new(n_qubits));
        }
        AnsatzCircuit::new(n_qubits, self.n_layers)?.to_circuit(&self.parameters)
    }
}

fn reference_target(
    terms: &HamiltonianTerms,
    initial: &StateVector,
    t: f64,
    config: &CompressConfig,
) -> Result<StateVector> {
    match config.target_source {
        TargetSource::Exact => exact_evolve(terms, initial, t),
        TargetSource::Trotter => {
            let circuit = trotter_circuit(terms, t, config.reference_dt)?;
            apply_circuit(initial, &circuit)
        }
    }
}

fn uqc_depth(terms: &HamiltonianTerms, t: f64, config: &CompressConfig) -> Result<usize> {
    Ok(trotter_circuit(terms, t, config.reference_dt)?.depth())
}

fn cr_for(d_uqc: usize, d_oqc: usize) -> f64 {
    if d_uqc == 0 {
        0.0
    } else {
        compression_ratio(d_uqc, d_oqc).expect("d_uqc > 0")
    }
}

struct Schedule<'a> {
    terms_qubits: usize,
    initial: &'a StateVector,
    target: &'a StateVector,
    config: &'a CompressConfig,
}

impl Schedule<'_> {
    /// Runs the adaptive-depth optimization from `theta` at `start_layers`
    /// layers. Returns `(theta, n_layers, infidelity, iterations, converged)`.
    fn run(
        &self,
        mut theta: Vec<f64>,
        start_layers: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<f64>, usize, f64, usize, bool)> {
        let budget = 1.0 - self.config.fidelity_target;
        let opts = LbfgsOptions {
            memory: 10,
            max_iterations: self.config.max_iterations,
            grad_tol: self.config.grad_tol,
            // Stop optimizing once safely below the infidelity budget rather
            // than polishing toward the gradient tolerance.
            loss_floor: 0.5 * budget,
            saturation_window: self.config.saturation_window,
            saturation_rtol: self.config.saturation_rtol,
        };
        let mut n_layers = start_layers;
        let mut iterations = 0;
        let mut best_f = f64::INFINITY;
        let mut best: Option<(Vec<f64>, usize)> = None;
        loop {
            let ansatz = AnsatzCircuit::new(self.terms_qubits, n_layers)?;
            debug_assert_eq!(theta.len(), ansatz.n_parameters());
            let outcome = minimize(
                |x| {
                    loss_and_gradient(&ansatz, x, self.initial, self.target)
                        .expect("dimensions fixed by schedule")
                },
                theta,
                &opts,
            );
            iterations += outcome.iterations;
            if outcome.f < best_f {
                best_f = outcome.f;
                best = Some((outcome.x.clone(), n_layers));
            }
            if outcome.f <= budget {
                return Ok((outcome.x, n_layers, outcome.f, iterations, true));
            }
            if n_layers >= self.config.max_layers {
                let (bx, bl) = best.expect("at least one stage ran");
                return Ok((bx, bl, best_f, iterations, false));
            }
            // Saturated above budget: append one near-identity layer and
            // warm-start from the current parameters.
            theta = outcome.x;
            let per_layer = PARAMS_PER_BLOCK * (self.terms_qubits - 1);
            theta.extend((0..per_layer).map(|_| {
                rng.random_range(-self.config.init_scale..self.config.init_scale)
            }));
            n_layers += 1;
        }
    }
}

/// Compresses the evolution `e^{-iHt}|initial>` into a brick-wall circuit.
///
/// Starts at one layer with seeded small-random parameters, grows the depth
/// adaptively, and returns the best result across `config.restarts`
/// independent seeded restarts (stopping early once converged).
pub fn compress(
    terms: &HamiltonianTerms,
    initial: &StateVector,
    t: f64,
    config: &CompressConfig,
) -> Result<CompressionResult> {
    if t < 0.0 {
        return Err(Error::Compression(format!("evolution time must be >= 0, got {t}")));
    }
    let target = reference_target(terms, initial, t, config)?;
    compress_to_target(terms, initial, &target, t, config)
}

fn compress_to_target(
    terms: &HamiltonianTerms,
    initial: &StateVector,
    target: &StateVector,
    t: f64,
    config: &CompressConfig,
) -> Result<CompressionResult> {
    let d_uqc = uqc_depth(terms, t, config)?;
    let budget = 1.0 - config.fidelity_target;

    // Zero-layer shortcut: the identity circuit may already meet the budget
    // (t = 0 or a revival).
    let f0 = 1.0 - initial.inner(target)?.norm_sqr();
    if f0 <= budget {
        return Ok(CompressionResult {
            parameters: Vec::new(),
            n_layers: 0,
            infidelity: f0.clamp(0.0, 1.0),
            iterations: 0,
            cr: cr_for(d_uqc, 0),
            converged: true,
            t,
        });
    }

    let schedule = Schedule {
        terms_qubits: terms.n_qubits(),
        initial,
        target,
        config,
    };
    let per_layer = PARAMS_PER_BLOCK * (terms.n_qubits() - 1);
    let mut best: Option<CompressionResult> = None;
    let mut total_iterations = 0;
    for restart in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
        let theta0: Vec<f64> = (0..per_layer)
            .map(|_| rng.random_range(-config.init_scale..config.init_scale))
            .collect();
        let (theta, n_layers, infidelity, iterations, converged) =
            schedule.run(theta0, 1, &mut rng)?;
        total_iterations += iterations;
        let candidate = CompressionResult {
            cr: cr_for(
                d_uqc,
                AnsatzCircuit::new(terms.n_qubits(), n_layers)?
                    .to_circuit(&theta)?
                    .depth(),
            ),
            parameters: theta,
            n_layers,
            infidelity,
            iterations: total_iterations,
            converged,
            t,
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.infidelity < b.infidelity,
        };
        if better {
            best = Some(candidate);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }
    let mut out = best.expect("at least one restart ran");
    out.iterations = total_iterations;
    Ok(out)
}

/// Advances a converged compression by `dt`, warm-starting the optimization
/// from the previous parameters.
pub fn compress_incremental(
    previous: &CompressionResult,
    terms: &HamiltonianTerms,
    initial: &StateVector,
    dt: f64,
    config: &CompressConfig,
) -> Result<CompressionResult> {
    if !previous.converged {
        return Err(Error::Compression(
            "cannot warm-start from an unconverged result".into(),
        ));
    }
    if dt < 0.0 {
        return Err(Error::Compression(format!("time step must be >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(previous.clone());
    }
    let t = previous.t + dt;
    let target = reference_target(terms, initial, t, config)?;
    if previous.n_layers == 0 {
        return compress_to_target(terms, initial, &target, t, config);
    }

    let d_uqc = uqc_depth(terms, t, config)?;
    let schedule = Schedule {
        terms_qubits: terms.n_qubits(),
        initial,
        target: &target,
        config,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ t.to_bits());
    let (theta, n_layers, infidelity, iterations, converged) =
        schedule.run(previous.parameters.clone(), previous.n_layers, &mut rng)?;
    Ok(CompressionResult {
        cr: cr_for(
            d_uqc,
            AnsatzCircuit::new(terms.n_qubits(), n_layers)?
                .to_circuit(&theta)?
                .depth(),
        ),
        parameters: theta,
        n_layers,
        infidelity,
        iterations,
        converged,
        t,
    })
}
