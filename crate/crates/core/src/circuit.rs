//! Gate-level circuits, first-order Trotter generation, and depth accounting.
//!
//! Gates stay at the one-/two-qubit-unitary level; there is no decomposition
//! into a hardware-native basis. Depth counts layers that contain at least
//! one two-qubit gate, the cost metric used for compression ratios.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::linalg;

/// Unitarity tolerance for gate matrices.
pub const GATE_UNITARITY_TOL: f64 = 1e-10;

/// One- or two-qubit unitary gate.
///
/// Two-qubit matrices use the local basis index `m = bit(targets[0]) +
/// 2 * bit(targets[1])`, consistent with the global convention that qubit `q`
/// is bit `q` of a basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Single {
        target: usize,
        matrix: Matrix2<Complex64>,
    },
    Two {
        targets: [usize; 2],
        matrix: Matrix4<Complex64>,
    },
}

impl Gate {
    pub fn single(target: usize, matrix: Matrix2<Complex64>) -> Result<Self> {
        let defect = linalg::unitarity_defect(&DMatrix::from_iterator(2, 2, matrix.iter().cloned()));
        if defect >= GATE_UNITARITY_TOL {
            return Err(Error::Circuit(format!(
                "single-qubit matrix is not unitary (defect {defect:.2e})"
            )));
        }
        Ok(Gate::Single { target, matrix })
    }

    pub fn two(targets: [usize; 2], matrix: Matrix4<Complex64>) -> Result<Self> {
        if targets[0] == targets[1] {
            return Err(Error::Circuit(format!(
                "two-qubit gate targets must be distinct, got {targets:?}"
            )));
        }
        let defect = linalg::unitarity_defect(&DMatrix::from_iterator(4, 4, matrix.iter().cloned()));
        if defect >= GATE_UNITARITY_TOL {
            return Err(Error::Circuit(format!(
                "two-qubit matrix is not unitary (defect {defect:.2e})"
            )));
        }
        Ok(Gate::Two { targets, matrix })
    }

    pub fn targets(&self) -> &[usize] {
        match self {
            Gate::Single { target, .. } => std::slice::from_ref(target),
            Gate::Two { targets, .. } => targets,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Two { .. })
    }

    /// Applies the gate in place to a full statevector (`amps.len() = 2^n`).
    pub(crate) fn apply_to(&self, amps: &mut [Complex64]) {
        match self {
            Gate::Single { target, matrix } => {
                let bit = 1usize << target;
                let dim = amps.len();
                let mut base = 0usize;
                while base < dim {
                    if base & bit == 0 {
                        let a0 = amps[base];
                        let a1 = amps[base | bit];
                        amps[base] = matrix[(0, 0)] * a0 + matrix[(0, 1)] * a1;
                        amps[base | bit] = matrix[(1, 0)] * a0 + matrix[(1, 1)] * a1;
                    }
                    base += 1;
                }
            }
            Gate::Two { targets, matrix } => {
                let b0 = 1usize << targets[0];
                let b1 = 1usize << targets[1];
                let dim = amps.len();
                for base in 0..dim {
                    if base & b0 != 0 || base & b1 != 0 {
                        continue;
                    }
                    let idx = [base, base | b0, base | b1, base | b0 | b1];
                    let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
                    for (row, &i) in idx.iter().enumerate() {
                        amps[i] = matrix[(row, 0)] * a[0]
                            + matrix[(row, 1)] * a[1]
                            + matrix[(row, 2)] * a[2]
                            + matrix[(row, 3)] * a[3];
                    }
                }
            }
        }
    }
}

/// Ordered list of gates together with an as-soon-as-possible layer
/// partition: each gate sits in the earliest layer after the last layer that
/// touched any of its qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    layers: Vec<Vec<usize>>,
    qubit_frontier: Vec<Option<usize>>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            layers: Vec::new(),
            qubit_frontier: vec![None; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Layer partition as lists of gate indices.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for &t in gate.targets() {
            if t >= self.n_qubits {
                return Err(Error::Circuit(format!(
                    "gate target {t} out of range for {} qubits",
                    self.n_qubits
                )));
            }
        }
        let layer = gate
            .targets()
            .iter()
            .filter_map(|&t| self.qubit_frontier[t])
            .max()
            .map_or(0, |l| l + 1);
        if layer == self.layers.len() {
            self.layers.push(Vec::new());
        }
        let idx = self.gates.len();
        self.layers[layer].push(idx);
        for &t in gate.targets() {
            self.qubit_frontier[t] = Some(layer);
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other` (re-layered onto this circuit).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "cannot extend a {}-qubit circuit with a {}-qubit circuit",
                self.n_qubits, other.n_qubits
            )));
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Number of layers containing at least one two-qubit gate.
    pub fn depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|layer| layer.iter().any(|&g| self.gates[g].is_two_qubit()))
            .count()
    }

    /// Dense `2^n x 2^n` unitary of the whole circuit (brute force; intended
    /// for oracle tests, capped at 12 qubits).
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > 12 {
            return Err(Error::Circuit(format!(
                "dense unitary for {} qubits exceeds the cap of 12",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::zeros(dim, dim);
        let mut col = vec![Complex64::ZERO; dim];
        for b in 0..dim {
            col.fill(Complex64::ZERO);
            col[b] = Complex64::ONE;
            for g in &self.gates {
                g.apply_to(&mut col);
            }
            for (r, &v) in col.iter().enumerate() {
                u[(r, b)] = v;
            }
        }
        Ok(u)
    }

    /// Line-based serialization: a header plus one gate per line with targets
    /// and the row-major complex matrix entries.
    pub fn to_text(&self) -> String {
        let mut out = format!("circuit {}\n", self.n_qubits);
        for g in &self.gates {
            match g {
                Gate::Single { target, matrix } => {
                    out.push_str(&format!("g1 {target}"));
                    for r in 0..2 {
                        for c in 0..2 {
                            out.push_str(&format!(" {} {}", matrix[(r, c)].re, matrix[(r, c)].im));
                        }
                    }
                }
                Gate::Two { targets, matrix } => {
                    out.push_str(&format!("g2 {} {}", targets[0], targets[1]));
                    for r in 0..4 {
                        for c in 0..4 {
                            out.push_str(&format!(" {} {}", matrix[(r, c)].re, matrix[(r, c)].im));
                        }
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format, revalidating every gate.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty circuit document".into()))?;
        let n_qubits = header
            .strip_prefix("circuit ")
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad circuit header `{header}`")))?;
        let mut circuit = Circuit::new(n_qubits);
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_f64 = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{s}` in `{line}`")))
            };
            match fields[0] {
                "g1" if fields.len() == 2 + 8 => {
                    let target: usize = fields[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad target in `{line}`")))?;
                    let mut vals = [Complex64::ZERO; 4];
                    for (k, v) in vals.iter_mut().enumerate() {
                        *v = Complex64::new(
                            parse_f64(fields[2 + 2 * k])?,
                            parse_f64(fields[3 + 2 * k])?,
                        );
                    }
                    let m = Matrix2::new(vals[0], vals[1], vals[2], vals[3]);
                    circuit.push(Gate::single(target, m)?)?;
                }
                "g2" if fields.len() == 3 + 32 => {
                    let t0: usize = fields[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad target in `{line}`")))?;
                    let t1: usize = fields[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad target in `{line}`")))?;
                    let mut m = Matrix4::zeros();
                    for r in 0..4 {
                        for c in 0..4 {
                            let k = 3 + 2 * (4 * r + c);
                            m[(r, c)] = Complex64::new(parse_f64(fields[k])?, parse_f64(fields[k + 1])?);
                        }
                    }
                    circuit.push(Gate::two([t0, t1], m)?)?;
                }
                _ => return Err(Error::Parse(format!("unrecognized gate line `{line}`"))),
            }
        }
        Ok(circuit)
    }
}

/// One first-order Trotter step `exp(-i dt H)` up to `O(dt^2)`.
///
/// Two-qubit terms are grouped by bond and the bonds partitioned into sets of
/// pairwise-disjoint support by greedy edge coloring in ascending `(i, j)`
/// order (the odd/even split generalized to the lattice's bond graph). Each
/// bond becomes a single gate `exp(-i dt H_bond)`; single-qubit terms are
/// fused into one gate per qubit and emitted first. The circuit product is
/// `prod_groups exp(-i dt H_group)`.
pub fn trotter_step(terms: &HamiltonianTerms, dt: f64) -> Result<Circuit> {
    let n = terms.n_qubits();
    let mut single: BTreeMap<usize, Matrix2<Complex64>> = BTreeMap::new();
    let mut bonds: BTreeMap<(usize, usize), Matrix4<Complex64>> = BTreeMap::new();

    for term in terms.terms() {
        let support = term.support();
        match support.len() {
            1 => {
                let q = support[0];
                let h = single.entry(q).or_insert_with(Matrix2::zeros);
                *h += term.operators()[q].matrix() * Complex64::new(term.coefficient(), 0.0);
            }
            2 => {
                let (qa, qb) = (support[0], support[1]);
                let h = bonds.entry((qa, qb)).or_insert_with(Matrix4::zeros);
                let pa = term.operators()[qa].matrix();
                let pb = term.operators()[qb].matrix();
                // Local index m = bit(qa) + 2 * bit(qb).
                for m_out in 0..4 {
                    for m_in in 0..4 {
                        h[(m_out, m_in)] += Complex64::new(term.coefficient(), 0.0)
                            * pa[(m_out & 1, m_in & 1)]
                            * pb[(m_out >> 1, m_in >> 1)];
                    }
                }
            }
            k => {
                return Err(Error::Circuit(format!(
                    "Trotter step needs terms on <= 2 qubits, found support {k}"
                )))
            }
        }
    }

    // Greedy edge coloring over the bond graph.
    let bond_list: Vec<(usize, usize)> = bonds.keys().cloned().collect();
    let mut color = Vec::with_capacity(bond_list.len());
    let mut n_colors = 0usize;
    for (idx, &(i, j)) in bond_list.iter().enumerate() {
        let mut used = vec![false; n_colors];
        for (prev, &(a, b)) in bond_list.iter().enumerate().take(idx) {
            if a == i || a == j || b == i || b == j {
                used[color[prev]] = true;
            }
        }
        let c = used.iter().position(|&u| !u).unwrap_or(n_colors);
        n_colors = n_colors.max(c + 1);
        color.push(c);
    }

    let mut circuit = Circuit::new(n);
    for (&q, h) in &single {
        let hd = DMatrix::from_iterator(2, 2, h.iter().cloned());
        let u = linalg::exp_i_hermitian(&hd, dt);
        let m = Matrix2::from_iterator(u.iter().cloned());
        circuit.push(Gate::single(q, m)?)?;
    }
    for c in 0..n_colors {
        for (idx, &(i, j)) in bond_list.iter().enumerate() {
            if color[idx] != c {
                continue;
            }
            let hd = DMatrix::from_iterator(4, 4, bonds[&(i, j)].iter().cloned());
            let u = linalg::exp_i_hermitian(&hd, dt);
            let m = Matrix4::from_iterator(u.iter().cloned());
            circuit.push(Gate::two([i, j], m)?)?;
        }
    }
    Ok(circuit)
}

/// `r = t/dt` repetitions of [`trotter_step`]; `r` must be integral within
/// `1e-9`.
pub fn trotter_circuit(terms: &HamiltonianTerms, t: f64, dt: f64) -> Result<Circuit> {
    if t < 0.0 {
        return Err(Error::Circuit(format!("evolution time must be >= 0, got {t}")));
    }
    if dt <= 0.0 {
        return Err(Error::Circuit(format!("time step must be > 0, got {dt}")));
    }
    let ratio = t / dt;
    let r = ratio.round();
    if (ratio - r).abs() > 1e-9 {
        return Err(Error::Circuit(format!(
            "t/dt = {ratio} is not integral within 1e-9"
        )));
    }
    let r = r as usize;
    let mut circuit = Circuit::new(terms.n_qubits());
    if r == 0 {
        return Ok(circuit);
    }
    let step = trotter_step(terms, dt)?;
    for _ in 0..r {
        circuit.extend(&step)?;
    }
    Ok(circuit)
}

/// Compression ratio in percent: `(d_uqc - d_oqc) / d_uqc * 100`.
pub fn compression_ratio(d_uqc: usize, d_oqc: usize) -> Result<f64> {
    if d_uqc == 0 {
        return Err(Error::Circuit("compression ratio needs d_uqc > 0".into()));
    }
    Ok((d_uqc as f64 - d_oqc as f64) / d_uqc as f64 * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{hopping_terms, interaction_terms, Pauli, PauliTerm};
    use crate::lattice::build_diamond_chain;
    use approx::assert_abs_diff_eq;

    /// Independent matrix exponential: plain power series for exp(-i dt H).
    fn exp_series(h: &DMatrix<Complex64>, dt: f64) -> DMatrix<Complex64> {
        let dim = h.nrows();
        let a = h * Complex64::new(0.0, -dt);
        let mut out = DMatrix::identity(dim, dim);
        let mut term = DMatrix::<Complex64>::identity(dim, dim);
        for k in 1..60 {
            term = &term * &a / Complex64::new(k as f64, 0.0);
            out += &term;
        }
        out
    }

    fn xy_bond(n: usize, qa: usize, qb: usize, coeff: f64) -> HamiltonianTerms {
        HamiltonianTerms::new(
            n,
            vec![
                PauliTerm::from_ops(coeff, n, &[(qa, Pauli::X), (qb, Pauli::X)]).unwrap(),
                PauliTerm::from_ops(coeff, n, &[(qa, Pauli::Y), (qb, Pauli::Y)]).unwrap(),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn single_bond_step_matches_direct_exponential() {
        let terms = xy_bond(2, 0, 1, -0.5);
        let dt = 0.3;
        let step = trotter_step(&terms, dt).unwrap();
        assert_eq!(step.gates().len(), 1);
        let u = step.unitary().unwrap();
        let h = terms.to_matrix(None).unwrap();
        let expected = exp_series(&h, dt);
        for (a, b) in u.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // Givens rotation on the one-excitation block: |cos dt| and |sin dt|.
        assert_abs_diff_eq!(u[(1, 1)].re, dt.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(u[(2, 1)].norm(), dt.sin(), epsilon = 1e-12);
    }

    #[test]
    fn commuting_terms_are_exact() {
        // All-ZZ Hamiltonians commute bond-by-bond, so one step is exact.
        let n = 4;
        let terms = HamiltonianTerms::new(
            n,
            vec![
                PauliTerm::from_ops(0.7, n, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap(),
                PauliTerm::from_ops(-0.3, n, &[(1, Pauli::Z), (2, Pauli::Z)]).unwrap(),
                PauliTerm::from_ops(0.2, n, &[(2, Pauli::Z), (3, Pauli::Z)]).unwrap(),
            ],
            true,
        )
        .unwrap();
        let dt = 0.9;
        let u = trotter_step(&terms, dt).unwrap().unitary().unwrap();
        let expected = exp_series(&terms.to_matrix(None).unwrap(), dt);
        for (a, b) in u.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_dt_gives_identity_gates() {
        let spec = build_diamond_chain(1, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let step = trotter_step(&terms, 0.0).unwrap();
        let u = step.unitary().unwrap();
        let dim = u.nrows();
        for r in 0..dim {
            for c in 0..dim {
                let want = if r == c { Complex64::ONE } else { Complex64::ZERO };
                assert!((u[(r, c)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_wide_terms() {
        let t = PauliTerm::from_ops(1.0, 3, &[(0, Pauli::X), (1, Pauli::X), (2, Pauli::X)]).unwrap();
        let terms = HamiltonianTerms::new(3, vec![t], false).unwrap();
        assert!(trotter_step(&terms, 0.1).is_err());
    }

    #[test]
    fn trotter_circuit_step_count_and_depth() {
        let spec = build_diamond_chain(4, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let step = trotter_step(&terms, 0.1).unwrap();
        // 16 bonds of the 13-site chain split into 4 disjoint groups.
        assert_eq!(step.gates().len(), 16);
        assert_eq!(step.depth(), 4);

        let one = trotter_circuit(&terms, 0.1, 0.1).unwrap();
        assert_eq!(one.gates().len(), 16);
        let sixty = trotter_circuit(&terms, 6.0, 0.1).unwrap();
        assert_eq!(sixty.gates().len(), 60 * 16);
        assert_eq!(sixty.depth(), 60 * 4);

        assert!(trotter_circuit(&terms, 1.0, 0.3).is_err());
        assert!(trotter_circuit(&terms, -1.0, 0.1).is_err());
        assert!(trotter_circuit(&terms, 1.0, 0.0).is_err());
        assert_eq!(trotter_circuit(&terms, 0.0, 0.1).unwrap().gates().len(), 0);
    }

    #[test]
    fn first_order_error_halves_with_dt() {
        let spec = build_diamond_chain(2, 0.0).unwrap();
        let terms = hopping_terms(&spec).unwrap();
        let t = 1.0;
        let exact = exp_series(&terms.to_matrix(None).unwrap(), t);
        let err = |dt: f64| {
            let u = trotter_circuit(&terms, t, dt).unwrap().unitary().unwrap();
            (&u - &exact).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        let e1 = err(0.5);
        let e2 = err(0.25);
        let ratio = e1 / e2;
        assert!((ratio - 2.0).abs() < 0.5, "first-order ratio {ratio}");
    }

    #[test]
    fn depth_counting() {
        let mut c = Circuit::new(4);
        assert_eq!(c.depth(), 0);
        let id2 = Matrix4::identity();
        c.push(Gate::two([0, 1], id2).unwrap()).unwrap();
        assert_eq!(c.depth(), 1);
        c.push(Gate::two([2, 3], id2).unwrap()).unwrap();
        // Disjoint supports share a layer.
        assert_eq!(c.depth(), 1);
        c.push(Gate::single(0, Matrix2::identity()).unwrap()).unwrap();
        assert_eq!(c.depth(), 1);
        c.push(Gate::two([1, 2], id2).unwrap()).unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn layers_partition_gates_and_preserve_per_qubit_order() {
        let spec = build_diamond_chain(2, 0.0).unwrap();
        let terms = hopping_terms(&spec)
            .unwrap()
            .merge(interaction_terms(&spec, 0.7).unwrap())
            .unwrap();
        let c = trotter_circuit(&terms, 0.3, 0.1).unwrap();
        let mut seen = vec![false; c.gates().len()];
        let mut last_layer_per_qubit = vec![None::<usize>; c.n_qubits()];
        for (l, layer) in c.layers().iter().enumerate() {
            let mut touched = std::collections::HashSet::new();
            for &g in layer {
                assert!(!seen[g], "gate {g} in two layers");
                seen[g] = true;
                for &q in c.gates()[g].targets() {
                    assert!(touched.insert(q), "qubit {q} twice in layer {l}");
                    if let Some(prev) = last_layer_per_qubit[q] {
                        assert!(prev < l);
                    }
                    last_layer_per_qubit[q] = Some(l);
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn circuit_unitarity_brute_force() {
        let spec = build_diamond_chain(2, std::f64::consts::PI).unwrap();
        let terms = hopping_terms(&spec)
            .unwrap()
            .merge(interaction_terms(&spec, 1.0).unwrap())
            .unwrap();
        let c = trotter_circuit(&terms, 0.5, 0.1).unwrap();
        let u = c.unitary().unwrap();
        assert!(linalg::unitarity_defect(&u) < 1e-9);
    }

    #[test]
    fn gates_commute_with_particle_number() {
        let spec = build_diamond_chain(2, 0.0).unwrap();
        let terms = hopping_terms(&spec)
            .unwrap()
            .merge(interaction_terms(&spec, 0.5).unwrap())
            .unwrap();
        let step = trotter_step(&terms, 0.17).unwrap();
        for g in step.gates() {
            if let Gate::Two { matrix, .. } = g {
                for m_out in 0..4usize {
                    for m_in in 0..4usize {
                        if m_out.count_ones() != m_in.count_ones() {
                            assert!(
                                matrix[(m_out, m_in)].norm() < 1e-12,
                                "gate mixes particle sectors"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn compression_ratio_arithmetic() {
        assert_abs_diff_eq!(compression_ratio(100, 15).unwrap(), 85.0);
        assert_abs_diff_eq!(compression_ratio(37, 37).unwrap(), 0.0);
        assert!(compression_ratio(0, 5).is_err());
    }

    #[test]
    fn text_round_trip() {
        let spec = build_diamond_chain(1, 0.9).unwrap();
        let terms = hopping_terms(&spec)
            .unwrap()
            .merge(interaction_terms(&spec, 0.4).unwrap())
            .unwrap();
        let c = trotter_circuit(&terms, 0.2, 0.1).unwrap();
        let parsed = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(parsed, c);
        assert!(Circuit::from_text("nonsense").is_err());
    }
}
