//! Hückel pi orbitals of pentacene over single-Gaussian p_y sites.
//!
//! Frame: molecule in the xz plane, long axis along x, short axis along z,
//! pi lobes along y.
//! Degenerate levels are separated by diagonalizing inside the four
//! irreducible blocks of the two in-plane reflections. Within an exactly
//! degenerate pair the orbital odd under `x -> -x` is placed nearer the gap.
//! Eigenvectors are taken in the Löwdin-orthogonalized site basis, so the
//! resulting LCAO orbitals are orthonormal in real space.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::model::{GaussianPrimitive, MolecularOrbital, OrbitalLabel, OrbitalSet, Parity, Vec3};
use crate::units::angstrom_to_bohr;
use crate::{Error, Result};

pub const CC_BOND_ANGSTROM: f64 = 1.40;
pub const CH_BOND_ANGSTROM: f64 = 1.09;
pub const DEFAULT_P_EXPONENT: f64 = 1.0;

const DEGENERACY_TOL: f64 = 1e-8;

/// Carbon skeleton with Hückel parameters. Positions in Å.
#[derive(Debug, Clone, PartialEq)]
pub struct PiSystemGraph {
    pub positions: Vec<Vec3>,
    pub bonds: Vec<(usize, usize)>,
    pub alpha: f64,
    pub beta: f64,
    pub hydrogens: Vec<Vec3>,
}

impl PiSystemGraph {
    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.n_atoms();
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in &self.bonds {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n_atoms();
        DMatrix::identity(n, n) * self.alpha + self.adjacency() * self.beta
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_atoms();
        if n == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if adj[(i, j)] != 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|s| *s)
    }

    /// Carbons plus hydrogens, all in Å, as `(atomic number, position)`.
    pub fn nuclei(&self) -> Vec<(u32, Vec3)> {
        self.positions
            .iter()
            .map(|p| (6, *p))
            .chain(self.hydrogens.iter().map(|p| (1, *p)))
            .collect()
    }

    /// Index of the atom at `p` (Å), if any lies within 1e-6 Å.
    fn find(&self, p: &Vec3) -> Option<usize> {
        self.positions.iter().position(|q| (q - p).norm() < 1e-6)
    }
}

/// Idealized pentacene: five regular hexagons fused along x, centered at the
/// origin, alpha = 0, beta = -1.
pub fn build_pentacene_graph() -> PiSystemGraph {
    let a = CC_BOND_ANGSTROM;
    let w = 3f64.sqrt() * a / 2.0;
    let mut positions = Vec::new();
    // ring-apex atoms at ring centers x = 2w k
    for k in -2..=2 {
        let x = 2.0 * w * k as f64;
        positions.push(Vec3::new(x, 0.0, a));
        positions.push(Vec3::new(x, 0.0, -a));
    }
    // fusion and terminal atoms at x = w (2m + 1)
    for m in -3..=2 {
        let x = w * (2 * m + 1) as f64;
        positions.push(Vec3::new(x, 0.0, a / 2.0));
        positions.push(Vec3::new(x, 0.0, -a / 2.0));
    }
    positions.sort_by(|p, q| {
        p.x.partial_cmp(&q.x)
            .unwrap_or(Ordering::Equal)
            .then(p.z.partial_cmp(&q.z).unwrap_or(Ordering::Equal))
    });

    let mut bonds = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if ((positions[i] - positions[j]).norm() - a).abs() < 1e-9 {
                bonds.push((i, j));
            }
        }
    }

    let mut hydrogens = Vec::new();
    for (i, p) in positions.iter().enumerate() {
        let nbrs: Vec<Vec3> = bonds
            .iter()
            .filter_map(|&(u, v)| match (u == i, v == i) {
                (true, _) => Some(positions[v]),
                (_, true) => Some(positions[u]),
                _ => None,
            })
            .collect();
        if nbrs.len() == 2 {
            let mid = (nbrs[0] + nbrs[1]) / 2.0;
            let dir = (p - mid).normalize();
            hydrogens.push(p + dir * CH_BOND_ANGSTROM);
        }
    }

    PiSystemGraph { positions, bonds, alpha: 0.0, beta: -1.0, hydrogens }
}

/// Energy-ordered Hückel orbitals and their energies (units of the graph's
/// alpha and beta).
#[derive(Debug, Clone)]
pub struct HuckelOrbitals {
    pub set: OrbitalSet,
    pub energies: Vec<f64>,
    /// Eigenvectors in the orthogonalized site basis, column per orbital.
    pub eigenvectors: DMatrix<f64>,
}

/// Permutation of atoms under the reflection that flips coordinate `axis`.
fn reflection_map(graph: &PiSystemGraph, axis: usize) -> Result<Vec<usize>> {
    graph
        .positions
        .iter()
        .map(|p| {
            let mut m = *p;
            m[axis] = -m[axis];
            graph
                .find(&m)
                .ok_or_else(|| Error::InvalidInput("graph is not symmetric under in-plane reflections".into()))
        })
        .collect()
}

struct Level {
    energy: f64,
    px: f64,
    pz: f64,
    vector: DVector<f64>,
}

/// Orbitals of `graph` as LCAO over p_y Gaussians of the given exponent
/// (bohr^-2). One electron pair per bonding level: `n_atoms / 2` occupied.
pub fn huckel_orbitals(graph: &PiSystemGraph, exponent: f64) -> Result<HuckelOrbitals> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::InvalidInput(format!("p exponent {exponent} must be positive")));
    }
    let n = graph.n_atoms();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput("pi system needs an even, nonzero number of sites".into()));
    }
    let rx = reflection_map(graph, 0)?;
    let rz = reflection_map(graph, 2)?;
    let h = graph.hamiltonian();

    let mut levels = Vec::with_capacity(n);
    for (px, pz) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        // symmetry-adapted basis: projection of one site per orbit
        let mut basis: Vec<DVector<f64>> = Vec::new();
        let mut covered = vec![false; n];
        for i in 0..n {
            if covered[i] {
                continue;
            }
            let orbit = [i, rx[i], rz[i], rx[rz[i]]];
            for &j in &orbit {
                covered[j] = true;
            }
            let mut v = DVector::<f64>::zeros(n);
            v[i] += 1.0;
            v[rx[i]] += px;
            v[rz[i]] += pz;
            v[rx[rz[i]]] += px * pz;
            let norm = v.norm();
            if norm > 1e-12 {
                basis.push(v / norm);
            }
        }
        if basis.is_empty() {
            continue;
        }
        let b = DMatrix::from_columns(&basis);
        let block = b.transpose() * &h * &b;
        let eig = SymmetricEigen::try_new(block, 1e-15, 10_000)
            .ok_or_else(|| Error::Eigen("symmetric block did not converge".into()))?;
        for k in 0..eig.eigenvalues.len() {
            let v = &b * eig.eigenvectors.column(k);
            levels.push(Level { energy: eig.eigenvalues[k], px, pz, vector: v });
        }
    }
    if levels.len() != n {
        return Err(Error::Eigen(format!("symmetry blocks gave {} of {n} levels", levels.len())));
    }

    let n_occ = n / 2;
    let gap = 0.5 * {
        let mut e: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        e.sort_by(f64::total_cmp);
        e[n_occ - 1] + e[n_occ]
    };
    // Sort ascending; inside a degenerate cluster, x-odd then z-odd levels
    // sit nearer the gap.
    let nearness = |l: &Level| (l.px < 0.0) as u8 * 2 + (l.pz < 0.0) as u8;
    levels.sort_by(|a, b| {
        if (a.energy - b.energy).abs() > DEGENERACY_TOL {
            return a.energy.total_cmp(&b.energy);
        }
        let below = 0.5 * (a.energy + b.energy) < gap;
        let ord = nearness(a).cmp(&nearness(b));
        if below {
            ord
        } else {
            ord.reverse()
        }
    });

    for l in &mut levels {
        if let Some(first) = l.vector.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                l.vector = -l.vector.clone();
            }
        }
    }

    let primitives = graph
        .positions
        .iter()
        .map(|p| GaussianPrimitive::new(p.map(angstrom_to_bohr), exponent, [0, 1, 0]))
        .collect::<Result<Vec<_>>>()?;
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = primitives[i].overlap(&primitives[j]);
        }
    }
    let s_eig = SymmetricEigen::try_new(s, 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("overlap matrix did not converge".into()))?;
    if s_eig.eigenvalues.iter().any(|e| *e <= 1e-10) {
        return Err(Error::Eigen("site overlap matrix is singular".into()));
    }
    let inv_sqrt = s_eig.eigenvalues.map(|e| 1.0 / e.sqrt());
    let s_inv_half = &s_eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * s_eig.eigenvectors.transpose();

    let mut orbitals = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for (idx, l) in levels.iter().enumerate() {
        let c = &s_inv_half * &l.vector;
        let parity = |s: f64| if s > 0.0 { Parity::Even } else { Parity::Odd };
        let mo = MolecularOrbital::lcao(OrbitalLabel::from_index(idx, n_occ), primitives.clone(), c.iter().copied().collect())?
            .with_parity([parity(l.px), Parity::Odd, parity(l.pz)]);
        orbitals.push(mo);
        energies.push(l.energy);
        columns.push(l.vector.clone());
    }
    Ok(HuckelOrbitals {
        set: OrbitalSet::new(orbitals, n_occ)?,
        energies,
        eigenvectors: DMatrix::from_columns(&columns),
    })
}

/// Binding energies (eV) of the occupied levels from an affine map of the
/// Hückel energies through two anchors `(label, binding energy)`. Returned in
/// orbital-index order.
pub fn koopmans_binding_energies(
    huckel: &HuckelOrbitals,
    anchor_a: (OrbitalLabel, f64),
    anchor_b: (OrbitalLabel, f64),
) -> Result<Vec<f64>> {
    let ea = huckel.energies[huckel.set.index_of(anchor_a.0)?];
    let eb = huckel.energies[huckel.set.index_of(anchor_b.0)?];
    if (ea - eb).abs() < DEGENERACY_TOL {
        return Err(Error::InvalidInput("binding-energy anchors are degenerate".into()));
    }
    let slope = (anchor_a.1 - anchor_b.1) / (ea - eb);
    Ok((0..huckel.set.n_occupied())
        .map(|i| anchor_a.1 + slope * (huckel.energies[i] - ea))
        .collect())
}
