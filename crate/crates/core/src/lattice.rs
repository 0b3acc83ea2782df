//! Lattice geometries and the diamond-chain band structure.
//!
//! All energies are in units of the hopping strength `J` and the stored edge
//! amplitudes are dimensionless multiples of `J`. A [`LatticeSpec`] is the
//! single source of geometry and flux truth for everything downstream.
//!
//! The diamond chain of `n` unit cells is terminated by a bare vertex on each
//! end, giving `3n + 1` sites laid out along the chain as
//!
//! ```text
//!       u1        u2                     un
//!      /  \      /  \                   /  \
//!   c0      c1 --     c2  ...  c(n-1)       cn
//!      \  /      \  /                   \  /
//!       d1        d2                     dn
//! ```
//!
//! with site indices `c0 = 0, u1 = 1, d1 = 2, c1 = 3, u2 = 4, ...`, so the
//! 13-site chain (`n = 4`) has its central vertex at site 6. Within plaquette
//! `k` the four edges are `c(k-1)-u_k`, `c(k-1)-d_k`, `u_k-c_k` and `d_k-c_k`;
//! only `u_k-c_k` carries the flux phase `e^{-i phi}`.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Per-site tag: a diamond-chain sublattice position or a plain chain index
/// for embedded geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteLabel {
    /// Up-arm site of unit cell `k`.
    Up(usize),
    /// Vertex ("center") site; `Center(0)` is the bare left terminal vertex.
    Center(usize),
    /// Down-arm site of unit cell `k`.
    Down(usize),
    /// Plain chain index for embedded geometries.
    Chain(usize),
}

impl fmt::Display for SiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteLabel::Up(k) => write!(f, "u{k}"),
            SiteLabel::Center(k) => write!(f, "c{k}"),
            SiteLabel::Down(k) => write!(f, "d{k}"),
            SiteLabel::Chain(i) => write!(f, "s{i}"),
        }
    }
}

impl SiteLabel {
    fn parse(s: &str) -> Result<Self> {
        let (kind, idx) = s.split_at(1);
        let k: usize = idx
            .parse()
            .map_err(|_| Error::Parse(format!("bad site label `{s}`")))?;
        match kind {
            "u" => Ok(SiteLabel::Up(k)),
            "c" => Ok(SiteLabel::Center(k)),
            "d" => Ok(SiteLabel::Down(k)),
            "s" => Ok(SiteLabel::Chain(k)),
            _ => Err(Error::Parse(format!("bad site label `{s}`"))),
        }
    }
}

/// A hopping bond `i < j` with complex amplitude in units of `J`.
///
/// The stored amplitude `A` stands for the Hamiltonian contribution
/// `-J (A c_i^dag c_j + A^* c_j^dag c_i)`; the Hermitian-conjugate edge is
/// implied and never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub amplitude: Complex64,
}

/// Weighted hopping graph with complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    n_sites: usize,
    site_labels: Vec<SiteLabel>,
    edges: Vec<Edge>,
    qubit_order: Vec<usize>,
}

impl LatticeSpec {
    /// Validates and builds a lattice: edges stored once with `i < j`, no
    /// self-loops, connected graph, `qubit_order` a bijection on the sites.
    pub fn new(
        site_labels: Vec<SiteLabel>,
        edges: Vec<Edge>,
        qubit_order: Vec<usize>,
    ) -> Result<Self> {
        let n_sites = site_labels.len();
        if n_sites == 0 {
            return Err(Error::Lattice("lattice has no sites".into()));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.i >= e.j {
                return Err(Error::Lattice(format!(
                    "edge ({}, {}) must satisfy i < j",
                    e.i, e.j
                )));
            }
            if e.j >= n_sites {
                return Err(Error::Lattice(format!(
                    "edge ({}, {}) out of range for {} sites",
                    e.i, e.j, n_sites
                )));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::Lattice(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
            if e.amplitude.norm() == 0.0 || !e.amplitude.is_finite() {
                return Err(Error::Lattice(format!(
                    "edge ({}, {}) has invalid amplitude {}",
                    e.i, e.j, e.amplitude
                )));
            }
        }
        if qubit_order.len() != n_sites {
            return Err(Error::Lattice(format!(
                "qubit_order has {} entries for {} sites",
                qubit_order.len(),
                n_sites
            )));
        }
        let mut hit = vec![false; n_sites];
        for &q in &qubit_order {
            if q >= n_sites || hit[q] {
                return Err(Error::Lattice("qubit_order is not a bijection".into()));
            }
            hit[q] = true;
        }
        let spec = Self {
            n_sites,
            site_labels,
            edges,
            qubit_order,
        };
        if !spec.is_connected() {
            return Err(Error::Lattice("hopping graph is not connected".into()));
        }
        Ok(spec)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn site_labels(&self) -> &[SiteLabel] {
        &self.site_labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn qubit_order(&self) -> &[usize] {
        &self.qubit_order
    }

    /// Qubit index a site is mapped to.
    pub fn qubit_of(&self, site: usize) -> usize {
        self.qubit_order[site]
    }

    fn is_connected(&self) -> bool {
        if self.n_sites == 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n_sites];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.n_sites];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Single-particle hopping matrix `h_{ij} = -J A_e` in site order (J = 1).
    pub fn hopping_matrix(&self) -> DMatrix<Complex64> {
        let mut h = DMatrix::zeros(self.n_sites, self.n_sites);
        for e in &self.edges {
            h[(e.i, e.j)] += -e.amplitude;
            h[(e.j, e.i)] += -e.amplitude.conj();
        }
        h
    }

    /// Serializes to the line-based text document consumed by the CLI config
    /// loader: a `sites` header, one labeled `site` line per site with its
    /// qubit index, and one `edge` line per bond with the amplitude as a
    /// re/im pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sites {}\n", self.n_sites));
        for (s, label) in self.site_labels.iter().enumerate() {
            out.push_str(&format!("site {s} {label} qubit {}\n", self.qubit_order[s]));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                e.i, e.j, e.amplitude.re, e.amplitude.im
            ));
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_sites = None;
        let mut labels = Vec::new();
        let mut qubits = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: `{line}`", lineno + 1));
            match fields[0] {
                "sites" if fields.len() == 2 => {
                    n_sites = Some(
                        fields[1]
                            .parse::<usize>()
                            .map_err(|_| bad("bad site count"))?,
                    );
                }
                "site" if fields.len() == 5 && fields[3] == "qubit" => {
                    let idx: usize = fields[1].parse().map_err(|_| bad("bad site index"))?;
                    if idx != labels.len() {
                        return Err(bad("site lines must be in order"));
                    }
                    labels.push(SiteLabel::parse(fields[2])?);
                    qubits.push(fields[4].parse().map_err(|_| bad("bad qubit index"))?);
                }
                "edge" if fields.len() == 5 => {
                    let i: usize = fields[1].parse().map_err(|_| bad("bad edge site"))?;
                    let j: usize = fields[2].parse().map_err(|_| bad("bad edge site"))?;
                    let re: f64 = fields[3].parse().map_err(|_| bad("bad amplitude"))?;
                    let im: f64 = fields[4].parse().map_err(|_| bad("bad amplitude"))?;
                    edges.push(Edge {
                        i,
                        j,
                        amplitude: Complex64::new(re, im),
                    });
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        let n = n_sites.ok_or_else(|| Error::Parse("missing `sites` header".into()))?;
        if labels.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} site lines, found {}",
                labels.len()
            )));
        }
        LatticeSpec::new(labels, edges, qubits)
    }
}

/// Diamond chain of `n_cells` unit cells at flux `phi`, terminated by a bare
/// vertex at each end (`3 n_cells + 1` sites, open boundary).
///
/// Plaquette `k` carries the edges `c(k-1)-u_k` (1), `c(k-1)-d_k` (1),
/// `u_k-c_k` (`e^{-i phi}`) and `d_k-c_k` (1).
pub fn build_diamond_chain(n_cells: usize, phi: f64) -> Result<LatticeSpec> {
    if n_cells == 0 {
        return Err(Error::Lattice("diamond chain needs at least one cell".into()));
    }
    let n_sites = 3 * n_cells + 1;
    let mut labels = Vec::with_capacity(n_sites);
    labels.push(SiteLabel::Center(0));
    let mut edges = Vec::with_capacity(4 * n_cells);
    let phase = Complex64::from_polar(1.0, -phi);
    // Snap the phi in {0, pi} cases to exactly +-1 so plaquette sign products
    // and serialized fixtures stay exact.
    let phase = if phi == 0.0 {
        Complex64::ONE
    } else if phi == PI {
        -Complex64::ONE
    } else {
        phase
    };
    for k in 1..=n_cells {
        let c_prev = 3 * (k - 1);
        let u = 3 * k - 2;
        let d = 3 * k - 1;
        let c = 3 * k;
        labels.push(SiteLabel::Up(k));
        labels.push(SiteLabel::Down(k));
        labels.push(SiteLabel::Center(k));
        edges.push(Edge {
            i: c_prev,
            j: u,
            amplitude: Complex64::ONE,
        });
        edges.push(Edge {
            i: c_prev,
            j: d,
            amplitude: Complex64::ONE,
        });
        edges.push(Edge {
            i: u,
            j: c,
            amplitude: phase,
        });
        edges.push(Edge {
            i: d,
            j: c,
            amplitude: Complex64::ONE,
        });
    }
    LatticeSpec::new(labels, edges, (0..n_sites).collect())
}

/// Four-site plaquette: edges `0-1, 0-2, 1-3, 2-3`, all amplitude `+1`;
/// with `reversed_link` the `1-3` edge is `-1`, threading a pi flux.
pub fn build_single_plaquette(reversed_link: bool) -> LatticeSpec {
    let amp = |rev: bool| {
        if rev {
            -Complex64::ONE
        } else {
            Complex64::ONE
        }
    };
    let edges = vec![
        Edge {
            i: 0,
            j: 1,
            amplitude: Complex64::ONE,
        },
        Edge {
            i: 0,
            j: 2,
            amplitude: Complex64::ONE,
        },
        Edge {
            i: 1,
            j: 3,
            amplitude: amp(reversed_link),
        },
        Edge {
            i: 2,
            j: 3,
            amplitude: Complex64::ONE,
        },
    ];
    let labels = (0..4).map(SiteLabel::Chain).collect();
    LatticeSpec::new(labels, edges, (0..4).collect()).expect("static plaquette is valid")
}

/// Plaquette embedded in a one-dimensional chain.
///
/// Left lead `0 .. n_left-1`, entrance vertex at `n_left - 1`, arms at
/// `n_left` and `n_left + 1`, exit vertex at `n_left + 2`, followed by the
/// rest of the `n_right`-site right lead (the exit vertex is its first site).
/// Lead bonds have amplitude 1; all four plaquette edges carry
/// `plaquette_amp` (`= |J'|/J`), with the upper arm-exit edge negated when
/// `reversed_link`.
pub fn build_embedded_chain(
    n_left: usize,
    n_right: usize,
    plaquette_amp: f64,
    reversed_link: bool,
) -> Result<LatticeSpec> {
    if n_left == 0 || n_right == 0 {
        return Err(Error::Lattice("embedded chain needs nonempty leads".into()));
    }
    if plaquette_amp <= 0.0 {
        return Err(Error::Lattice(format!(
            "plaquette amplitude must be positive, got {plaquette_amp}"
        )));
    }
    let n_sites = n_left + 2 + n_right;
    let entrance = n_left - 1;
    let arm_up = n_left;
    let arm_down = n_left + 1;
    let exit = n_left + 2;
    let jp = Complex64::new(plaquette_amp, 0.0);
    let mut edges = Vec::new();
    for i in 0..n_left.saturating_sub(1) {
        edges.push(Edge {
            i,
            j: i + 1,
            amplitude: Complex64::ONE,
        });
    }
    edges.push(Edge {
        i: entrance,
        j: arm_up,
        amplitude: jp,
    });
    edges.push(Edge {
        i: entrance,
        j: arm_down,
        amplitude: jp,
    });
    edges.push(Edge {
        i: arm_up,
        j: exit,
        amplitude: if reversed_link { -jp } else { jp },
    });
    edges.push(Edge {
        i: arm_down,
        j: exit,
        amplitude: jp,
    });
    for i in exit..n_sites - 1 {
        edges.push(Edge {
            i,
            j: i + 1,
            amplitude: Complex64::ONE,
        });
    }
    let labels = (0..n_sites).map(SiteLabel::Chain).collect();
    LatticeSpec::new(labels, edges, (0..n_sites).collect())
}

/// Three-band dispersion of the diamond chain on a uniform quasi-momentum
/// grid, energies in units of `J`, bands sorted ascending per `q`.
#[derive(Debug, Clone)]
pub struct BandStructure {
    pub q_grid: Vec<f64>,
    pub bands: [Vec<f64>; 3],
}

/// Diagonalizes the 3x3 Bloch matrix of the diamond chain on `n_q` uniformly
/// spaced momenta in `[-pi, pi]`.
///
/// On the `(u, c, d)` basis the couplings are `t_u(q) = e^{-i phi} + e^{iq}`
/// and `t_d(q) = 1 + e^{iq}`, with overall factor `-J`; the spectrum is
/// `{0, +-sqrt(|t_u|^2 + |t_d|^2)}`.
pub fn band_structure(phi: f64, n_q: usize) -> Result<BandStructure> {
    if n_q < 2 {
        return Err(Error::Lattice("band structure needs n_q >= 2".into()));
    }
    let mut q_grid = Vec::with_capacity(n_q);
    let mut bands = [
        Vec::with_capacity(n_q),
        Vec::with_capacity(n_q),
        Vec::with_capacity(n_q),
    ];
    for iq in 0..n_q {
        let q = -PI + 2.0 * PI * iq as f64 / (n_q - 1) as f64;
        q_grid.push(q);
        let t_u = Complex64::from_polar(1.0, -phi) + Complex64::from_polar(1.0, q);
        let t_d = Complex64::ONE + Complex64::from_polar(1.0, q);
        let mut h = DMatrix::zeros(3, 3);
        h[(0, 1)] = -t_u;
        h[(1, 0)] = -t_u.conj();
        h[(2, 1)] = -t_d;
        h[(1, 2)] = -t_d.conj();
        let (w, _) = linalg::eigh(&h);
        for (b, &e) in w.iter().enumerate() {
            bands[b].push(e);
        }
    }
    Ok(BandStructure { q_grid, bands })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spectrum(spec: &LatticeSpec) -> Vec<f64> {
        linalg::eigh(&spec.hopping_matrix()).0
    }

    #[test]
    fn diamond_chain_13_sites_edge_list() {
        let spec = build_diamond_chain(4, 0.0).unwrap();
        assert_eq!(spec.n_sites(), 13);
        assert_eq!(spec.edges().len(), 16);
        // Pinned edge list for plaquette 1; the pattern repeats shifted by 3.
        let first: Vec<(usize, usize)> = spec.edges().iter().take(4).map(|e| (e.i, e.j)).collect();
        assert_eq!(first, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        for e in spec.edges() {
            assert_abs_diff_eq!(e.amplitude.norm(), 1.0, epsilon = 1e-15);
        }
        assert_eq!(spec.site_labels()[0], SiteLabel::Center(0));
        assert_eq!(spec.site_labels()[6], SiteLabel::Center(2));
        assert_eq!(spec.site_labels()[12], SiteLabel::Center(4));
    }

    #[test]
    fn diamond_chain_rejects_zero_cells() {
        assert!(build_diamond_chain(0, 0.0).is_err());
    }

    #[test]
    fn single_abf_cell_has_one_negative_edge() {
        let spec = build_diamond_chain(1, PI).unwrap();
        assert_eq!(spec.n_sites(), 4);
        let negatives: Vec<_> = spec
            .edges()
            .iter()
            .filter(|e| (e.amplitude + Complex64::ONE).norm() < 1e-15)
            .map(|e| (e.i, e.j))
            .collect();
        // Only the u1-c1 intracell edge carries e^{-i pi} = -1.
        assert_eq!(negatives, vec![(1, 3)]);
    }

    #[test]
    fn two_cell_pi_chain_matches_fig4_layout() {
        let spec = build_diamond_chain(2, PI).unwrap();
        assert_eq!(spec.n_sites(), 7);
        assert_eq!(spec.site_labels()[3], SiteLabel::Center(1));
    }

    #[test]
    fn plaquette_edges_and_sign_product() {
        let fb = build_single_plaquette(false);
        let abf = build_single_plaquette(true);
        for spec in [&fb, &abf] {
            let pairs: Vec<_> = spec.edges().iter().map(|e| (e.i, e.j)).collect();
            assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        }
        let sign_product = |spec: &LatticeSpec| -> f64 {
            spec.edges().iter().map(|e| e.amplitude.re.signum()).product()
        };
        assert_eq!(sign_product(&fb), 1.0);
        assert_eq!(sign_product(&abf), -1.0);
    }

    #[test]
    fn plaquette_spectra() {
        // Frozen from exact diagonalization of the 4x4 hopping matrices:
        // uniform plaquette {-2, 0, 0, +2}; pi-flux plaquette has two flat
        // doublets at +-sqrt(2).
        let fb = spectrum(&build_single_plaquette(false));
        let expected_fb = [-2.0, 0.0, 0.0, 2.0];
        for (got, want) in fb.iter().zip(expected_fb) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
        let abf = spectrum(&build_single_plaquette(true));
        let r2 = 2.0_f64.sqrt();
        let expected_abf = [-r2, -r2, r2, r2];
        for (got, want) in abf.iter().zip(expected_abf) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
    }

    #[test]
    fn embedded_chain_layouts() {
        let spec = build_embedded_chain(3, 4, 1.0, true).unwrap();
        assert_eq!(spec.n_sites(), 9);
        let pairs: Vec<_> = spec.edges().iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(
            pairs,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (2, 4),
                (3, 5),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 8)
            ]
        );
        // The reversed link is the upper arm-exit edge.
        let rev = spec.edges().iter().find(|e| (e.i, e.j) == (3, 5)).unwrap();
        assert_abs_diff_eq!(rev.amplitude.re, -1.0, epsilon = 1e-15);

        let fig6 = build_embedded_chain(3, 5, 1.0, true).unwrap();
        assert_eq!(fig6.n_sites(), 10);
        assert_eq!(fig6.edges().last().map(|e| (e.i, e.j)), Some((8, 9)));

        assert!(build_embedded_chain(0, 4, 1.0, false).is_err());
        assert!(build_embedded_chain(3, 0, 1.0, false).is_err());
    }

    #[test]
    fn bands_all_flat_at_pi() {
        let bs = band_structure(PI, 101).unwrap();
        let expected = [-2.0, 0.0, 2.0];
        for (b, band) in bs.bands.iter().enumerate() {
            let max = band.iter().cloned().fold(f64::MIN, f64::max);
            let min = band.iter().cloned().fold(f64::MAX, f64::min);
            assert!(max - min < 1e-12, "band {b} not flat: spread {}", max - min);
            assert_abs_diff_eq!(max, expected[b], epsilon = 1e-12);
        }
    }

    #[test]
    fn bands_at_zero_flux() {
        // Dispersive bands +-sqrt(|t_u|^2 + |t_d|^2) = +-2 sqrt(2) |cos(q/2)|,
        // touching the flat band at the zone edges. The finite-chain spectrum
        // (flat_band_zero_modes test below plus the +-2.69 extremes of the
        // 13-site chain) confirms the 2 sqrt(2) bandwidth.
        let bs = band_structure(0.0, 201).unwrap();
        let peak = 2.0 * 2.0_f64.sqrt();
        for (iq, &q) in bs.q_grid.iter().enumerate() {
            assert_abs_diff_eq!(bs.bands[1][iq], 0.0, epsilon = 1e-12);
            let outer = peak * (q / 2.0).cos().abs();
            assert_abs_diff_eq!(bs.bands[0][iq], -outer, epsilon = 1e-12);
            assert_abs_diff_eq!(bs.bands[2][iq], outer, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(bs.bands[2][0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bs.bands[0][100], -peak, epsilon = 1e-12);
        assert_abs_diff_eq!(bs.bands[2][100], peak, epsilon = 1e-12);
        assert!(band_structure(0.0, 1).is_err());

        // Bulk consistency: every finite-chain eigenvalue lies within the
        // Bloch band ranges.
        let chain = spectrum(&build_diamond_chain(6, 0.0).unwrap());
        for w in chain {
            assert!(w.abs() <= peak + 1e-9, "eigenvalue {w} outside band range");
        }
    }

    #[test]
    fn gauge_equivalent_sign_assignments_share_spectrum() {
        // Negating every edge at one vertex is a gauge transformation.
        for reversed in [false, true] {
            let spec = build_single_plaquette(reversed);
            let mut edges = spec.edges().to_vec();
            for e in &mut edges {
                if e.i == 3 || e.j == 3 {
                    e.amplitude = -e.amplitude;
                }
            }
            let gauged =
                LatticeSpec::new(spec.site_labels().to_vec(), edges, spec.qubit_order().to_vec())
                    .unwrap();
            let a = spectrum(&spec);
            let b = spectrum(&gauged);
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn flat_band_zero_modes_at_zero_flux() {
        // Frozen from ED: the open 3n+1-site chain at phi = 0 has an
        // (n+1)-fold degenerate zero eigenvalue.
        for n_cells in 1..=4 {
            let spec = build_diamond_chain(n_cells, 0.0).unwrap();
            let zeros = spectrum(&spec).iter().filter(|w| w.abs() < 1e-9).count();
            assert_eq!(zeros, n_cells + 1);
        }
    }

    #[test]
    fn text_round_trip() {
        for spec in [
            build_diamond_chain(4, PI).unwrap(),
            build_embedded_chain(3, 5, 2.5, true).unwrap(),
        ] {
            let parsed = LatticeSpec::from_text(&spec.to_text()).unwrap();
            assert_eq!(parsed, spec);
        }
        assert!(LatticeSpec::from_text("sites 2\n").is_err());
    }
}
