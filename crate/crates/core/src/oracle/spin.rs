//! Exact diagonalization of short periodic spin chains.
//!
//! The spin Hamiltonian
//! `H = sum_i J/4 [(1+gamma) X_i X_i+1 + (1-gamma) Y_i Y_i+1] - h/2 sum_i Z_i`
//! is built directly on the `2^N` basis states and diagonalized block by block
//! in the joint eigenbases of translation and spin-flip parity `prod_i Z_i`,
//! both of which commute with `H(J1)` and `H(J2)`. States are expanded back to
//! the full basis before any reduced density matrix is taken.
//!
//! Basis bit `i` is site `i`; a set bit is spin down.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use crate::dynamics::{CorrelatorSet, Grid};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::{ModelParams, Time};
use crate::oracle::mode::gibbs_weights;
use crate::state::{pauli_components, MaxNorm, TwoSiteState};

pub const MAX_SITES: usize = 12;

/// Initial-state weights below this fraction of the largest are dropped.
const WEIGHT_CUTOFF: f64 = 1e-16;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Translation orbits of the basis: representative, period and the shift that
/// maps each basis state onto its representative.
struct Orbits {
    n: usize,
    reps: Vec<usize>,
    period: Vec<usize>,
    /// For every basis state `s`: `(index of its representative, l)` with `s = T^l rep`.
    lookup: Vec<(usize, usize)>,
}

fn rotate(s: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((s << 1) | (s >> (n - 1))) & mask
}

impl Orbits {
    fn new(n: usize) -> Self {
        let dim = 1usize << n;
        let mut lookup = vec![(usize::MAX, 0); dim];
        let mut reps = Vec::new();
        let mut period = Vec::new();
        for s in 0..dim {
            if lookup[s].0 != usize::MAX {
                continue;
            }
            let idx = reps.len();
            let mut cur = s;
            let mut l = 0;
            loop {
                if lookup[cur].0 == usize::MAX {
                    lookup[cur] = (idx, l);
                }
                cur = rotate(cur, n);
                l += 1;
                if cur == s {
                    break;
                }
            }
            reps.push(s);
            period.push(l);
        }
        Orbits { n, reps, period, lookup }
    }
}

/// Nonzero matrix elements `<s'|H|s>` for one basis state.
fn apply_hamiltonian(s: usize, n: usize, j: f64, gamma: f64, h: f64, out: &mut Vec<(usize, f64)>) {
    out.clear();
    let downs = s.count_ones() as f64;
    out.push((s, -0.5 * h * (n as f64 - 2.0 * downs)));
    for i in 0..n {
        let k = (i + 1) % n;
        let same = ((s >> i) & 1) == ((s >> k) & 1);
        // X X flips both spins with amplitude 1; Y Y with -1 if aligned, +1 if not.
        let amp = if same { 0.5 * j * gamma } else { 0.5 * j };
        if amp != 0.0 {
            out.push((s ^ (1 << i) ^ (1 << k), amp));
        }
    }
}

/// Dense Hamiltonian on the full `2^N` space; used to cross-check the block solver.
pub fn dense_hamiltonian(n: usize, j: f64, gamma: f64, h: f64) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    let mut buf = Vec::new();
    for s in 0..dim {
        apply_hamiltonian(s, n, j, gamma, h, &mut buf);
        for &(t, a) in &buf {
            m[(t, s)] += a;
        }
    }
    m
}

/// One (momentum, parity) sector. Momenta `k` and `-k` are merged into a
/// single real block spanned by the cosine and sine combinations of each orbit,
/// so every block is real symmetric.
struct Sector {
    /// `k = 2 pi momentum / N`, `0 <= momentum <= N/2`.
    momentum: usize,
    /// Indices into `Orbits::reps`.
    members: Vec<usize>,
    /// Position of each orbit inside `members`.
    position: Vec<Option<usize>>,
}

impl Sector {
    fn k(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.momentum as f64 / n as f64
    }

    fn paired(&self, n: usize) -> bool {
        self.momentum != 0 && 2 * self.momentum != n
    }

    fn dim(&self, n: usize) -> usize {
        if self.paired(n) {
            2 * self.members.len()
        } else {
            self.members.len()
        }
    }

    fn hamiltonian(&self, orbits: &Orbits, j: f64, gamma: f64, h: f64) -> DMatrix<f64> {
        let n = orbits.n;
        let k = self.k(n);
        let d = self.members.len();
        // Momentum-k block A + iB on the plane waves of each orbit.
        let mut hk = DMatrix::<Complex64>::zeros(d, d);
        let mut buf = Vec::new();
        for (col, &orbit) in self.members.iter().enumerate() {
            let r = orbits.reps[orbit];
            apply_hamiltonian(r, n, j, gamma, h, &mut buf);
            for &(s, amp) in &buf {
                let (target, l) = orbits.lookup[s];
                if let Some(row) = self.position[target] {
                    let ratio = (orbits.period[orbit] as f64 / orbits.period[target] as f64).sqrt();
                    hk[(row, col)] += cz(0.0, k * l as f64).exp() * amp * ratio;
                }
            }
        }
        let a = hk.map(|z| z.re);
        if !self.paired(n) {
            return (&a + a.transpose()) * 0.5;
        }
        let b = hk.map(|z| z.im);
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&a);
        m.view_mut((0, d), (d, d)).copy_from(&(-&b));
        m.view_mut((d, 0), (d, d)).copy_from(&b);
        m.view_mut((d, d), (d, d)).copy_from(&a);
        (&m + m.transpose()) * 0.5
    }

    /// Full-space amplitudes of a block vector.
    fn expand(&self, orbits: &Orbits, coeffs: &[Complex64], out: &mut [Complex64]) {
        let n = orbits.n;
        let k = self.k(n);
        let d = self.members.len();
        let paired = self.paired(n);
        let lift = if paired { 2f64.sqrt() } else { 1.0 };
        out.iter_mut().for_each(|x| *x = cz(0.0, 0.0));
        for (i, &orbit) in self.members.iter().enumerate() {
            let c = coeffs[i];
            let s_coeff = if paired { coeffs[d + i] } else { cz(0.0, 0.0) };
            let period = orbits.period[orbit];
            let norm = lift / (period as f64).sqrt();
            let mut s = orbits.reps[orbit];
            for l in 0..period {
                let (sin, cos) = (k * l as f64).sin_cos();
                out[s] = (c * cos + s_coeff * sin) * norm;
                s = rotate(s, n);
            }
        }
    }
}

struct SectorSolution {
    sector: Sector,
    /// Weights of the retained initial eigenstates.
    weights: Vec<f64>,
    drive: DMatrix<Complex64>,
    drive_vectors: DMatrix<Complex64>,
    drive_energies: DVector<f64>,
    /// Initial states in the driving eigenbasis.
    overlaps: DMatrix<Complex64>,
}

/// Diagonalized quench on a periodic chain, ready to be sampled at any time.
pub struct SpinEd {
    n: usize,
    params: ModelParams,
    orbits: Orbits,
    sectors: Vec<SectorSolution>,
}

/// Observables of the chain at one time.
#[derive(Debug, Clone)]
pub struct EdSnapshot {
    pub t: f64,
    /// Reduced state of sites `(0, 1)`.
    pub pair: TwoSiteState,
    pub correlators: CorrelatorSet,
    /// Largest entrywise deviation of any bond's reduced state from bond `(0, 1)`.
    pub bond_spread: f64,
    /// `Tr rho(t)^2`.
    pub purity: f64,
    /// `Tr rho(t) H(J2)`.
    pub energy: f64,
}

impl SpinEd {
    pub fn new(n: usize, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if n < 4 || n > MAX_SITES || n % 2 != 0 {
            return Err(Error::ChainSize { n, max: MAX_SITES });
        }
        let orbits = Orbits::new(n);

        let mut sectors = Vec::new();
        for parity in 0..2u32 {
            for momentum in 0..=n / 2 {
                let members: Vec<usize> = (0..orbits.reps.len())
                    .filter(|&o| orbits.reps[o].count_ones() % 2 == parity)
                    .filter(|&o| (momentum * orbits.period[o]) % n == 0)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let mut position = vec![None; orbits.reps.len()];
                for (i, &o) in members.iter().enumerate() {
                    position[o] = Some(i);
                }
                sectors.push(Sector { momentum, members, position });
            }
        }

        // Initial Gibbs state over all sectors.
        let mut blocks = Vec::with_capacity(sectors.len());
        let mut all_energies = Vec::new();
        for sector in &sectors {
            let eig = symmetric_eigen(&sector.hamiltonian(&orbits, params.j1, params.gamma, params.h));
            all_energies.extend(eig.0.iter().copied());
            blocks.push(eig);
        }
        let weights = gibbs_weights(&all_energies, params.beta);
        let w_max = weights.iter().cloned().fold(0.0, f64::max);

        let mut solved = Vec::new();
        let mut offset = 0;
        for (sector, eig) in sectors.into_iter().zip(blocks) {
            let dim = sector.dim(n);
            let keep: Vec<usize> = (0..dim).filter(|&i| weights[offset + i] > WEIGHT_CUTOFF * w_max).collect();
            let sector_weights: Vec<f64> = keep.iter().map(|&i| weights[offset + i]).collect();
            offset += dim;
            if keep.is_empty() {
                continue;
            }
            let initial = eig.1.select_columns(&keep);
            let drive = sector.hamiltonian(&orbits, params.j2, params.gamma, params.h);
            let (drive_energies, drive_vectors) = symmetric_eigen(&drive);
            let overlaps = (drive_vectors.transpose() * &initial).map(|x| cz(x, 0.0));
            solved.push(SectorSolution {
                sector,
                weights: sector_weights,
                drive: drive.map(|x| cz(x, 0.0)),
                drive_vectors: drive_vectors.map(|x| cz(x, 0.0)),
                drive_energies,
                overlaps,
            });
        }

        Ok(SpinEd { n, params: *params, orbits, sectors: solved })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    /// Number of initial-state components carried along.
    pub fn retained_states(&self) -> usize {
        self.sectors.iter().map(|s| s.weights.len()).sum()
    }

    pub fn snapshot(&self, t: f64) -> Result<EdSnapshot> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("spin ED needs a finite t >= 0, got {t}")));
        }
        let n = self.n;
        let dim = 1usize << n;
        let mut bonds = vec![Matrix4::<Complex64>::zeros(); n];
        let mut full = vec![cz(0.0, 0.0); dim];
        let mut purity = 0.0;
        let mut energy = 0.0;

        for sol in &self.sectors {
            let phases = sol.drive_energies.map(|e| cz(0.0, -e * t).exp());
            let mut rotated = sol.overlaps.clone();
            for (mut row, ph) in rotated.row_iter_mut().zip(phases.iter()) {
                row *= *ph;
            }
            let evolved = &sol.drive_vectors * rotated;

            let gram = evolved.adjoint() * &evolved;
            for (a, wa) in sol.weights.iter().enumerate() {
                for (b, wb) in sol.weights.iter().enumerate() {
                    purity += wa * wb * gram[(a, b)].norm_sqr();
                }
            }
            let h_evolved = &sol.drive * &evolved;
            for (col, w) in sol.weights.iter().enumerate() {
                energy += w * evolved.column(col).dotc(&h_evolved.column(col)).re;
            }

            for (col, &w) in sol.weights.iter().enumerate() {
                let coeffs: Vec<Complex64> = evolved.column(col).iter().copied().collect();
                sol.sector.expand(&self.orbits, &coeffs, &mut full);
                accumulate_bonds(&full, n, w, &mut bonds);
            }
        }

        let spread = bonds.iter().map(|b| (b - bonds[0]).max_norm()).fold(0.0, f64::max);
        let pair = TwoSiteState::from_density(bonds[0])?;
        let r = pauli_components(&pair.rho);
        let correlators = CorrelatorSet::from_values(
            r[3][0],
            r[1][1],
            r[2][2],
            r[3][3],
            r[1][2],
            self.params.with_time(Time::At(t)),
            Grid::Modes(n),
        );
        Ok(EdSnapshot { t, pair, correlators, bond_spread: spread, purity, energy })
    }
}

/// Adds `w |psi><psi|` reduced to every bond `(i, i+1)`.
fn accumulate_bonds(psi: &[Complex64], n: usize, w: f64, bonds: &mut [Matrix4<Complex64>]) {
    for (i, bond) in bonds.iter_mut().enumerate() {
        let k = (i + 1) % n;
        let clear = !((1usize << i) | (1usize << k));
        for (s, &amp) in psi.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let a = (((s >> i) & 1) << 1) | ((s >> k) & 1);
            let base = s & clear;
            for b in 0..4 {
                let sp = base | ((b >> 1) << i) | ((b & 1) << k);
                bond[(a, b)] += amp * psi[sp].conj() * w;
            }
        }
    }
}

/// Reduced nearest-neighbour state of an `n`-site periodic chain at `params.time`.
pub fn spin_ed(n: usize, params: &ModelParams) -> Result<EdSnapshot> {
    let t = match params.time {
        Time::At(t) => t,
        Time::Steady => return Err(Error::InvalidParams("spin ED evolves to finite times only".into())),
    };
    SpinEd::new(n, params)?.snapshot(t)
}

/// Same observables from the dense `2^N` Hamiltonians, without any symmetry
/// reduction. Only practical for small `n`.
pub fn dense_spin_ed(n: usize, params: &ModelParams, t: f64) -> Result<Matrix4<Complex64>> {
    if n < 2 || n > 8 {
        return Err(Error::ChainSize { n, max: 8 });
    }
    let dim = 1usize << n;
    let (e1, v1) = symmetric_eigen(&dense_hamiltonian(n, params.j1, params.gamma, params.h));
    let (e2, v2) = symmetric_eigen(&dense_hamiltonian(n, params.j2, params.gamma, params.h));
    let w = gibbs_weights(e1.as_slice(), params.beta);
    let v1 = v1.map(|x| cz(x, 0.0));
    let v2 = v2.map(|x| cz(x, 0.0));
    let phases = DMatrix::from_diagonal(&e2.map(|e| cz(0.0, -e * t).exp()));
    let u = &v2 * phases * v2.adjoint();
    let evolved = u * v1;
    let mut bonds = vec![Matrix4::zeros(); n];
    let mut psi = vec![cz(0.0, 0.0); dim];
    for (col, &wc) in w.iter().enumerate() {
        if wc == 0.0 {
            continue;
        }
        psi.iter_mut().zip(evolved.column(col).iter()).for_each(|(p, v)| *p = *v);
        accumulate_bonds(&psi, n, wc, &mut bonds);
    }
    Ok(bonds[0])
}
