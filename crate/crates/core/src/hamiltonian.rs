//! Qubit Hamiltonians as sums of real-coefficient Pauli strings.
//!
//! Hopping bonds map to the XY-type form
//! `-(|A|/2) [cos(theta) (X_i X_j + Y_i Y_j) + sin(theta) (Y_i X_j - X_i Y_j)]`
//! for an edge amplitude `A = |A| e^{i theta}`, which for `theta` in
//! `{0, pi}` reduces to `-+(|A|/2)(X_i X_j + Y_i Y_j)`. The mapping is applied
//! bond-by-bond to every edge of the lattice (hardcore-boson / spin
//! convention: no Jordan-Wigner Z-strings on non-adjacent bonds).
//!
//! Nearest-neighbour interactions add `V n_i n_j` on every hopping bond. In
//! Z-form that is `(V/4)(Z_i Z_j - Z_i - Z_j)` plus a constant `V/4`, which is
//! tracked in [`HamiltonianTerms::energy_offset`] and excluded from evolution
//! (global phase only). The bare-ZZ variant keeps just `(V/4) Z_i Z_j`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Pauli strings with coefficients below this threshold are dropped.
pub const COEFF_EPS: f64 = 1e-14;
/// Largest qubit count for which a full `2^n` dense matrix may be built.
pub const DENSE_QUBIT_CAP: usize = 16;
/// Largest fixed-particle sector dimension for dense matrices.
pub const SECTOR_DIM_CAP: usize = 4096;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::Parse(format!("bad Pauli letter `{c}`"))),
        }
    }

    /// The 2x2 matrix, row-major on the `{|0>, |1>}` basis.
    pub fn matrix(self) -> nalgebra::Matrix2<Complex64> {
        let (a, b, c, d) = match self {
            Pauli::I => (Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE),
            Pauli::X => (Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO),
            Pauli::Y => (Complex64::ZERO, -Complex64::I, Complex64::I, Complex64::ZERO),
            Pauli::Z => (Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::ONE),
        };
        nalgebra::Matrix2::new(a, b, c, d)
    }

    /// Action on a computational basis bit: `(new_bit, phase)`.
    /// `|1>` marks an occupied site, so `Z|1> = -|1>`.
    #[inline]
    pub(crate) fn apply_bit(self, bit: bool) -> (bool, Complex64) {
        match self {
            Pauli::I => (bit, Complex64::ONE),
            Pauli::X => (!bit, Complex64::ONE),
            Pauli::Y => (
                !bit,
                if bit {
                    -Complex64::I
                } else {
                    Complex64::I
                },
            ),
            Pauli::Z => (
                bit,
                if bit {
                    -Complex64::ONE
                } else {
                    Complex64::ONE
                },
            ),
        }
    }
}

/// One real-coefficient Pauli string with a letter per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    operators: Vec<Pauli>,
}

impl PauliTerm {
    /// Builds a term; the coefficient must be finite and nonzero and at least
    /// one letter must be non-identity.
    pub fn new(coefficient: f64, operators: Vec<Pauli>) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::Hamiltonian(format!(
                "coefficient must be finite and nonzero, got {coefficient}"
            )));
        }
        if operators.iter().all(|&p| p == Pauli::I) {
            return Err(Error::Hamiltonian(
                "Pauli term must have at least one non-identity letter".into(),
            ));
        }
        Ok(Self {
            coefficient,
            operators,
        })
    }

    /// A string of identities with `letters` placed at the given qubits.
    pub fn from_ops(coefficient: f64, n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut operators = vec![Pauli::I; n_qubits];
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::Hamiltonian(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            operators[q] = p;
        }
        Self::new(coefficient, operators)
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn operators(&self) -> &[Pauli] {
        &self.operators
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.operators
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Applies the string to a computational basis state given as a bitmask:
    /// `P |mask> = phase |new_mask>`.
    pub(crate) fn apply_to_basis(&self, mask: u64) -> (u64, Complex64) {
        let mut out = mask;
        let mut phase = Complex64::ONE;
        for (q, &p) in self.operators.iter().enumerate() {
            if p == Pauli::I {
                continue;
            }
            let bit = (mask >> q) & 1 == 1;
            let (new_bit, ph) = p.apply_bit(bit);
            phase *= ph;
            if new_bit != bit {
                out ^= 1 << q;
            }
        }
        (out, phase)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.coefficient)?;
        for &p in &self.operators {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// A qubit Hamiltonian: a list of Pauli terms plus the constant energy offset
/// dropped when rewriting density-density interactions in Z-form.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    particle_number_symmetric: bool,
    energy_offset: f64,
}

/// How interaction bonds are rewritten as Pauli strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionForm {
    /// Exact `V n_i n_j`: ZZ plus single-Z counterterms and a tracked offset.
    #[default]
    DensityDensity,
    /// Bare `(V/4) Z_i Z_j` per bond, no counterterms.
    BareZz,
}

impl HamiltonianTerms {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>, particle_number_symmetric: bool) -> Result<Self> {
        for t in &terms {
            if t.operators.len() != n_qubits {
                return Err(Error::Hamiltonian(format!(
                    "term `{t}` has {} letters, expected {n_qubits}",
                    t.operators.len()
                )));
            }
        }
        Ok(Self {
            n_qubits,
            terms: normalize(terms),
            particle_number_symmetric,
            energy_offset: 0.0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn particle_number_symmetric(&self) -> bool {
        self.particle_number_symmetric
    }

    /// Constant energy dropped from the term list (global phase in evolution).
    pub fn energy_offset(&self) -> f64 {
        self.energy_offset
    }

    /// Sums two Hamiltonians on the same qubits, merging duplicate strings.
    pub fn merge(mut self, other: HamiltonianTerms) -> Result<HamiltonianTerms> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "cannot merge terms on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        self.terms.extend(other.terms);
        Ok(HamiltonianTerms {
            n_qubits: self.n_qubits,
            terms: normalize(self.terms),
            particle_number_symmetric: self.particle_number_symmetric
                && other.particle_number_symmetric,
            energy_offset: self.energy_offset + other.energy_offset,
        })
    }

    /// Dense Hermitian matrix over the full `2^n` space (`sector = None`) or
    /// over the fixed-particle-number sector basis (masks ascending).
    ///
    /// The tracked energy offset is *not* added.
    pub fn to_matrix(&self, sector: Option<usize>) -> Result<DMatrix<Complex64>> {
        match sector {
            None => {
                if self.n_qubits > DENSE_QUBIT_CAP {
                    return Err(Error::Hamiltonian(format!(
                        "full-space matrix for {} qubits exceeds the cap of {DENSE_QUBIT_CAP}",
                        self.n_qubits
                    )));
                }
                let dim = 1usize << self.n_qubits;
                let mut m = DMatrix::zeros(dim, dim);
                for term in &self.terms {
                    for col in 0..dim as u64 {
                        let (row, phase) = term.apply_to_basis(col);
                        m[(row as usize, col as usize)] += phase * term.coefficient;
                    }
                }
                Ok(m)
            }
            Some(n_particles) => {
                let basis = sector_basis(self.n_qubits, n_particles)?;
                let dim = basis.len();
                let mut m = DMatrix::zeros(dim, dim);
                for term in &self.terms {
                    for (ci, &col) in basis.iter().enumerate() {
                        let (row, phase) = term.apply_to_basis(col);
                        if let Ok(ri) = basis.binary_search(&row) {
                            m[(ri, ci)] += phase * term.coefficient;
                        }
                    }
                }
                Ok(m)
            }
        }
    }

    /// One `coeff PAULI_STRING` line per term, for debugging and golden tests.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{t}\n"));
        }
        out
    }
}

/// All bitmasks on `n_qubits` qubits with exactly `n_particles` set bits,
/// ascending. This is the basis ordering used by sector matrices and the
/// exact-diagonalization evolver.
pub fn sector_basis(n_qubits: usize, n_particles: usize) -> Result<Vec<u64>> {
    if n_particles > n_qubits || n_qubits >= 64 {
        return Err(Error::Hamiltonian(format!(
            "sector of {n_particles} particles on {n_qubits} qubits is unsupported"
        )));
    }
    let dim = binomial(n_qubits, n_particles);
    if dim > SECTOR_DIM_CAP as u128 {
        return Err(Error::Hamiltonian(format!(
            "sector dimension {dim} exceeds the cap of {SECTOR_DIM_CAP}"
        )));
    }
    if n_particles == 0 {
        return Ok(vec![0]);
    }
    let limit = 1u64 << n_qubits;
    let mut basis = Vec::with_capacity(dim as usize);
    let mut mask = (1u64 << n_particles) - 1;
    while mask < limit {
        basis.push(mask);
        // Gosper's hack: next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    Ok(basis)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Sums duplicate Pauli strings and drops coefficients below [`COEFF_EPS`].
fn normalize(terms: Vec<PauliTerm>) -> Vec<PauliTerm> {
    let mut merged: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
    for t in terms {
        *merged.entry(t.operators).or_insert(0.0) += t.coefficient;
    }
    merged
        .into_iter()
        .filter(|(_, c)| c.abs() >= COEFF_EPS)
        .map(|(operators, coefficient)| PauliTerm {
            coefficient,
            operators,
        })
        .collect()
}

/// XY-type hopping terms for every edge of the lattice, acting on the qubits
/// assigned by the lattice's `qubit_order`.
pub fn hopping_terms(spec: &LatticeSpec) -> Result<HamiltonianTerms> {
    let n = spec.n_sites();
    let mut terms = Vec::with_capacity(4 * spec.edges().len());
    for e in spec.edges() {
        let qi = spec.qubit_of(e.i);
        let qj = spec.qubit_of(e.j);
        let mag = e.amplitude.norm();
        let theta = e.amplitude.arg();
        let c = -0.5 * mag * theta.cos();
        let s = -0.5 * mag * theta.sin();
        let mut push = |coeff: f64, pi: Pauli, pj: Pauli| -> Result<()> {
            if coeff.abs() >= COEFF_EPS {
                terms.push(PauliTerm::from_ops(coeff, n, &[(qi, pi), (qj, pj)])?);
            }
            Ok(())
        };
        push(c, Pauli::X, Pauli::X)?;
        push(c, Pauli::Y, Pauli::Y)?;
        push(s, Pauli::Y, Pauli::X)?;
        push(-s, Pauli::X, Pauli::Y)?;
    }
    HamiltonianTerms::new(n, terms, true)
}

/// Density-density interaction `V n_i n_j` on every hopping bond.
///
/// `V = 0` yields an empty term list.
pub fn interaction_terms(spec: &LatticeSpec, v: f64) -> Result<HamiltonianTerms> {
    interaction_terms_with_form(spec, v, InteractionForm::DensityDensity)
}

/// Interaction terms in the chosen rewriting (see [`InteractionForm`]).
pub fn interaction_terms_with_form(
    spec: &LatticeSpec,
    v: f64,
    form: InteractionForm,
) -> Result<HamiltonianTerms> {
    let n = spec.n_sites();
    let mut terms = Vec::new();
    let mut offset = 0.0;
    if v != 0.0 {
        for e in spec.edges() {
            let qi = spec.qubit_of(e.i);
            let qj = spec.qubit_of(e.j);
            terms.push(PauliTerm::from_ops(
                0.25 * v,
                n,
                &[(qi, Pauli::Z), (qj, Pauli::Z)],
            )?);
            if form == InteractionForm::DensityDensity {
                terms.push(PauliTerm::from_ops(-0.25 * v, n, &[(qi, Pauli::Z)])?);
                terms.push(PauliTerm::from_ops(-0.25 * v, n, &[(qj, Pauli::Z)])?);
                offset += 0.25 * v;
            }
        }
    }
    let mut h = HamiltonianTerms::new(n, terms, true)?;
    h.energy_offset = offset;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_diamond_chain, build_embedded_chain, build_single_plaquette, Edge, LatticeSpec, SiteLabel};
    use crate::linalg;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn two_site(amplitude: Complex64) -> LatticeSpec {
        LatticeSpec::new(
            vec![SiteLabel::Chain(0), SiteLabel::Chain(1)],
            vec![Edge {
                i: 0,
                j: 1,
                amplitude,
            }],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_unit_amplitude() {
        let h = hopping_terms(&two_site(Complex64::ONE)).unwrap();
        assert_eq!(h.to_lines(), "-0.5 XX\n-0.5 YY\n");
    }

    #[test]
    fn single_edge_negative_amplitude() {
        let h = hopping_terms(&two_site(-Complex64::ONE)).unwrap();
        assert_eq!(h.to_lines(), "0.5 XX\n0.5 YY\n");
    }

    #[test]
    fn single_edge_complex_phase_matches_hopping_matrix() {
        // A = e^{-i pi/2}: the one-excitation block must equal the 2x2
        // fermionic hopping matrix -(A c1^dag c2 + h.c.), eigenvalues +-1.
        let a = Complex64::from_polar(1.0, -PI / 2.0);
        let spec = two_site(a);
        let h = hopping_terms(&spec).unwrap();
        let block = h.to_matrix(Some(1)).unwrap();
        let expected = spec.hopping_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!((block[(i, j)] - expected[(i, j)]).norm(), 0.0, epsilon = 1e-12);
            }
        }
        let (w, _) = linalg::eigh(&block);
        assert_abs_diff_eq!(w[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_excitation_block_matches_hopping_matrix_for_all_builders() {
        let specs = vec![
            build_diamond_chain(2, 0.0).unwrap(),
            build_diamond_chain(2, PI).unwrap(),
            build_diamond_chain(1, 0.7).unwrap(),
            build_single_plaquette(false),
            build_single_plaquette(true),
            build_embedded_chain(2, 3, 1.5, true).unwrap(),
        ];
        for spec in specs {
            let h = hopping_terms(&spec).unwrap();
            let block = h.to_matrix(Some(1)).unwrap();
            let expected = spec.hopping_matrix();
            for i in 0..spec.n_sites() {
                for j in 0..spec.n_sites() {
                    assert!(
                        (block[(i, j)] - expected[(i, j)]).norm() < 1e-12,
                        "mismatch at ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn interaction_zero_is_empty() {
        let spec = build_single_plaquette(false);
        let h = interaction_terms(&spec, 0.0).unwrap();
        assert!(h.terms().is_empty());
        assert_eq!(h.energy_offset(), 0.0);
    }

    #[test]
    fn interaction_two_site_doubly_occupied() {
        // V = 4 on one bond: <11| H_int |11> = V.
        let spec = two_site(Complex64::ONE);
        let h = interaction_terms(&spec, 4.0).unwrap();
        let m = h.to_matrix(None).unwrap();
        let e = m[(3, 3)].re + h.energy_offset();
        assert_abs_diff_eq!(e, 4.0, epsilon = 1e-12);
        // Singly occupied and empty states carry no interaction energy.
        for idx in [0usize, 1, 2] {
            assert_abs_diff_eq!(m[(idx, idx)].re + h.energy_offset(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn interaction_matches_brute_force_on_all_basis_states() {
        for (spec, v) in [
            (build_diamond_chain(1, PI).unwrap(), 1.0),
            (build_diamond_chain(2, 0.0).unwrap(), 2.7),
        ] {
            let h = interaction_terms(&spec, v).unwrap();
            let m = h.to_matrix(None).unwrap();
            let dim = 1u64 << spec.n_sites();
            for mask in 0..dim {
                let brute: f64 = spec
                    .edges()
                    .iter()
                    .filter(|e| (mask >> e.i) & 1 == 1 && (mask >> e.j) & 1 == 1)
                    .map(|_| v)
                    .sum();
                let got = m[(mask as usize, mask as usize)].re + h.energy_offset();
                assert_abs_diff_eq!(got, brute, epsilon = 1e-12);
            }
            // n n terms are diagonal in the occupation basis.
            for r in 0..dim as usize {
                for c in 0..dim as usize {
                    if r != c {
                        assert!(m[(r, c)].norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn bare_zz_form_differs_by_single_z_terms() {
        let spec = two_site(Complex64::ONE);
        let bare = interaction_terms_with_form(&spec, 2.0, InteractionForm::BareZz).unwrap();
        assert_eq!(bare.to_lines(), "0.5 ZZ\n");
        assert_eq!(bare.energy_offset(), 0.0);
    }

    #[test]
    fn matrices_are_hermitian() {
        for spec in [build_diamond_chain(2, 0.4).unwrap(), build_single_plaquette(true)] {
            let h = hopping_terms(&spec)
                .unwrap()
                .merge(interaction_terms(&spec, 1.3).unwrap())
                .unwrap();
            let m = h.to_matrix(None).unwrap();
            assert!(linalg::is_hermitian(&m, 1e-12));
        }
    }

    #[test]
    fn commutes_with_total_number_operator() {
        for spec in [
            build_diamond_chain(2, PI).unwrap(),
            build_diamond_chain(1, 1.1).unwrap(),
        ] {
            let h = hopping_terms(&spec)
                .unwrap()
                .merge(interaction_terms(&spec, 0.8).unwrap())
                .unwrap();
            assert!(h.particle_number_symmetric());
            let m = h.to_matrix(None).unwrap();
            let dim = m.nrows();
            let number = DMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    Complex64::new((r as u64).count_ones() as f64, 0.0)
                } else {
                    Complex64::ZERO
                }
            });
            let comm = &m * &number - &number * &m;
            let max = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max < 1e-12, "[H, N] max entry {max}");
        }
    }

    #[test]
    fn thirteen_site_sector_matrix_has_flat_band_eigenvalue() {
        let spec = build_diamond_chain(4, 0.0).unwrap();
        let h = hopping_terms(&spec).unwrap();
        let m = h.to_matrix(Some(1)).unwrap();
        assert_eq!(m.nrows(), 13);
        let (w, _) = linalg::eigh(&m);
        assert!(w.iter().any(|x| x.abs() < 1e-12));
    }

    #[test]
    fn full_space_cap_enforced() {
        let spec = build_diamond_chain(6, 0.0).unwrap(); // 19 sites
        let h = hopping_terms(&spec).unwrap();
        assert!(h.to_matrix(None).is_err());
        // Sector requests stay fine for any n as long as the dimension is small.
        assert!(h.to_matrix(Some(1)).is_ok());
    }

    #[test]
    fn term_validation() {
        assert!(PauliTerm::new(0.0, vec![Pauli::X]).is_err());
        assert!(PauliTerm::new(f64::NAN, vec![Pauli::X]).is_err());
        assert!(PauliTerm::new(1.0, vec![Pauli::I, Pauli::I]).is_err());
        assert!(PauliTerm::from_ops(1.0, 2, &[(2, Pauli::X)]).is_err());
    }

    #[test]
    fn duplicate_strings_are_merged() {
        let t1 = PauliTerm::from_ops(0.5, 2, &[(0, Pauli::X), (1, Pauli::X)]).unwrap();
        let t2 = PauliTerm::from_ops(0.25, 2, &[(0, Pauli::X), (1, Pauli::X)]).unwrap();
        let t3 = PauliTerm::from_ops(-0.75, 2, &[(0, Pauli::Z)]).unwrap();
        let t4 = PauliTerm::from_ops(0.75, 2, &[(0, Pauli::Z)]).unwrap();
        let h = HamiltonianTerms::new(2, vec![t1, t2, t3, t4], true).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_abs_diff_eq!(h.terms()[0].coefficient(), 0.75, epsilon = 1e-15);
    }
}
