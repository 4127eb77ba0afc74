//! Primal sublattice of the Raussendorf cluster on a periodic `d x d x d`
//! torus of unit cells.
//!
//! Face qubit `3*c + a` sits between cell `c` and `c + e_a`. A Z flip on it
//! flips the parity of both cells; missing faces fuse cells into supercells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd code distance, at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Distance(u32);

impl Distance {
    pub fn new(d: u32) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::InvalidDistance(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// Plane of face qubits crossed by every cycle that winds once along `axis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalSurface {
    pub axis: Axis,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    coords: Vec<[u16; 3]>,
    neighbor_cells: Vec<[u32; 6]>,
    cell_faces: Vec<[u32; 6]>,
    in_plane: Vec<[u32; 4]>,
}

impl Lattice {
    pub fn new(d: Distance) -> Self {
        let n = d.get() as usize;
        let n_cells = n * n * n;
        let mut coords = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            coords.push([(c % n) as u16, ((c / n) % n) as u16, (c / (n * n)) as u16]);
        }
        let shift = |c: usize, a: usize, s: isize| -> usize {
            let mut x = coords[c].map(usize::from);
            x[a] = (x[a] as isize + s).rem_euclid(n as isize) as usize;
            x[0] + n * (x[1] + n * x[2])
        };
        let mut neighbor_cells = Vec::with_capacity(n_cells);
        let mut cell_faces = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let mut nb = [0u32; 6];
            let mut fq = [0u32; 6];
            for a in 0..3 {
                let up = shift(c, a, 1);
                let down = shift(c, a, -1);
                nb[2 * a] = up as u32;
                fq[2 * a] = (3 * c + a) as u32;
                nb[2 * a + 1] = down as u32;
                fq[2 * a + 1] = (3 * down + a) as u32;
            }
            neighbor_cells.push(nb);
            cell_faces.push(fq);
        }
        let mut in_plane = Vec::with_capacity(3 * n_cells);
        for c in 0..n_cells {
            for a in 0..3 {
                let (b1, b2) = ((a + 1) % 3, (a + 2) % 3);
                in_plane.push([
                    (3 * shift(c, b1, 1) + a) as u32,
                    (3 * shift(c, b1, -1) + a) as u32,
                    (3 * shift(c, b2, 1) + a) as u32,
                    (3 * shift(c, b2, -1) + a) as u32,
                ]);
            }
        }
        Self {
            d: n,
            coords,
            neighbor_cells,
            cell_faces,
            in_plane,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_cells(&self) -> usize {
        self.coords.len()
    }

    pub fn n_qubits(&self) -> usize {
        3 * self.coords.len()
    }

    /// Cluster qubits of the full lattice (primal and dual faces).
    pub fn cluster_qubit_count(&self) -> usize {
        6 * self.n_cells()
    }

    /// Cluster edges of the full lattice; equals the number of creation
    /// fusions and, separately, of connection fusions.
    pub fn cluster_edge_count(&self) -> usize {
        12 * self.n_cells()
    }

    pub fn cell_coords(&self, c: usize) -> [usize; 3] {
        self.coords[c].map(usize::from)
    }

    pub fn cell_at(&self, x: [usize; 3]) -> usize {
        let n = self.d;
        (x[0] % n) + n * ((x[1] % n) + n * (x[2] % n))
    }

    pub fn qubit_axis(q: usize) -> Axis {
        Axis::from_index(q % 3)
    }

    pub fn qubit_at(&self, cell: usize, axis: Axis) -> usize {
        3 * cell + axis.index()
    }

    /// Lower and upper cell of face `q`.
    pub fn incident_cells(&self, q: usize) -> Result<(usize, usize)> {
        if q >= self.n_qubits() {
            return Err(Error::UnknownQubit(q));
        }
        Ok(self.incident_cells_unchecked(q))
    }

    #[inline]
    pub fn incident_cells_unchecked(&self, q: usize) -> (usize, usize) {
        let c = q / 3;
        (c, self.neighbor_cells[c][2 * (q % 3)] as usize)
    }

    /// `(neighbor, shared face)` in order +x, -x, +y, -y, +z, -z.
    pub fn cell_adjacency(&self, c: usize) -> Result<[(usize, usize); 6]> {
        if c >= self.n_cells() {
            return Err(Error::UnknownCell(c));
        }
        Ok(std::array::from_fn(|i| {
            (
                self.neighbor_cells[c][i] as usize,
                self.cell_faces[c][i] as usize,
            )
        }))
    }

    #[inline]
    pub(crate) fn neighbors_raw(&self, c: usize) -> (&[u32; 6], &[u32; 6]) {
        (&self.neighbor_cells[c], &self.cell_faces[c])
    }

    /// The six faces of cell `c`.
    pub fn cell_faces(&self, c: usize) -> &[u32; 6] {
        &self.cell_faces[c]
    }

    /// The four faces parallel to `q` that share an edge with it inside its
    /// plane; the removal partners for a failed creation fusion.
    #[inline]
    pub fn in_plane_neighbors(&self, q: usize) -> &[u32; 4] {
        &self.in_plane[q]
    }

    /// Faces `(c, axis)` with `c[axis] = d - 1`, i.e. those between the last
    /// and the first layer.
    pub fn logical_surface(&self, axis: Axis) -> LogicalSurface {
        let a = axis.index();
        let qubits = (0..self.n_cells())
            .filter(|&c| usize::from(self.coords[c][a]) == self.d - 1)
            .map(|c| 3 * c + a)
            .collect();
        LogicalSurface { axis, qubits }
    }

    #[inline]
    pub(crate) fn is_on_surface(&self, q: usize, axis: Axis) -> bool {
        q % 3 == axis.index() && usize::from(self.coords[q / 3][axis.index()]) == self.d - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lat(d: u32) -> Lattice {
        Lattice::new(Distance::new(d).unwrap())
    }

    #[test]
    fn distance_validation() {
        assert!(Distance::new(3).is_ok());
        assert!(Distance::new(11).is_ok());
        for d in [0, 1, 2, 4, 10] {
            assert_eq!(Distance::new(d), Err(Error::InvalidDistance(d)));
        }
    }

    #[test]
    fn counts() {
        let g = lat(3);
        assert_eq!((g.n_cells(), g.n_qubits()), (27, 81));
        assert_eq!(
            (g.cluster_qubit_count(), g.cluster_edge_count()),
            (162, 324)
        );
        let g = lat(5);
        assert_eq!((g.n_cells(), g.n_qubits()), (125, 375));
        assert_eq!(g.logical_surface(Axis::Z).qubits.len(), 25);
        assert_eq!(lat(3).logical_surface(Axis::X).qubits.len(), 9);
    }

    #[test]
    fn incidence_spot_checks() {
        let g = lat(3);
        // cell (0,0,0), x face -> (1,0,0)
        assert_eq!(g.incident_cells(0).unwrap(), (0, 1));
        // cell (2,0,0), x face wraps -> (0,0,0)
        assert_eq!(g.incident_cells(3 * 2).unwrap(), (2, 0));
        // cell (1,2,2) = 1 + 3*2 + 9*2 = 25, z face wraps -> (1,2,0) = 7
        assert_eq!(g.incident_cells(3 * 25 + 2).unwrap(), (25, 7));
        assert!(g.incident_cells(81).is_err());
        assert!(g.cell_adjacency(27).is_err());
    }

    #[test]
    fn every_face_touches_two_cells_and_every_cell_six_faces() {
        let g = lat(5);
        let mut seen = vec![0u8; g.n_qubits()];
        for c in 0..g.n_cells() {
            let adj = g.cell_adjacency(c).unwrap();
            for (nb, q) in adj {
                seen[q] += 1;
                let (a, b) = g.incident_cells(q).unwrap();
                assert!((a == c && b == nb) || (a == nb && b == c));
            }
        }
        assert!(seen.iter().all(|&k| k == 2));
    }

    #[test]
    fn in_plane_neighbors_share_an_edge() {
        let g = lat(5);
        for q in 0..g.n_qubits() {
            let (c, _) = g.incident_cells(q).unwrap();
            let x = g.cell_coords(c);
            for &p in g.in_plane_neighbors(q) {
                let p = p as usize;
                assert_eq!(p % 3, q % 3);
                let y = g.cell_coords(p / 3);
                let diff: usize = (0..3)
                    .map(|i| {
                        let dd = (x[i] + 5 - y[i]) % 5;
                        dd.min(5 - dd)
                    })
                    .sum();
                assert_eq!(diff, 1);
                assert_eq!(x[q % 3], y[q % 3]);
            }
        }
    }

    #[test]
    fn straight_cycle_crosses_surface_once() {
        let g = lat(5);
        for axis in Axis::ALL {
            let s = g.logical_surface(axis);
            let start = g.cell_at([1, 2, 3]);
            let mut c = start;
            let mut crossings = 0;
            loop {
                let q = g.qubit_at(c, axis);
                crossings += usize::from(s.qubits.contains(&q));
                assert_eq!(g.is_on_surface(q, axis), s.qubits.contains(&q));
                c = g.incident_cells(q).unwrap().1;
                if c == start {
                    break;
                }
            }
            assert_eq!(crossings, 1);
        }
    }

    proptest! {
        #[test]
        fn global_syndrome_parity_is_even(d in prop::sample::select(vec![3u32, 5, 7]), bits in prop::collection::vec(any::<bool>(), 1029)) {
            let g = lat(d);
            let mut parity = vec![false; g.n_cells()];
            for q in 0..g.n_qubits() {
                if bits[q] {
                    let (a, b) = g.incident_cells(q).unwrap();
                    parity[a] ^= true;
                    parity[b] ^= true;
                }
            }
            prop_assert_eq!(parity.iter().filter(|&&p| p).count() % 2, 0);
        }

        #[test]
        fn translation_is_an_automorphism(t in prop::array::uniform3(0usize..5)) {
            let g = lat(5);
            let tr = |c: usize| {
                let x = g.cell_coords(c);
                g.cell_at([x[0] + t[0], x[1] + t[1], x[2] + t[2]])
            };
            for q in 0..g.n_qubits() {
                let (a, b) = g.incident_cells(q).unwrap();
                let q2 = g.qubit_at(tr(q / 3), Lattice::qubit_axis(q));
                prop_assert_eq!(g.incident_cells(q2).unwrap(), (tr(a), tr(b)));
            }
        }
    }
}
