//! Loss-tolerant matching decoder for the primal sublattice.
//!
//! Missing qubits merge their two cells into a supercell whose parity is the
//! product of the surviving faces on its boundary. Odd supercells are paired
//! by exact minimum-weight perfect matching, where a path pays one unit per
//! surviving face and nothing inside a supercell. The verdict compares the
//! homology class of the residual error against one logical surface.

mod blossom;

pub use blossom::max_weight_matching;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::generation::ErrorInstance;
use crate::lattice::{Axis, Lattice, LogicalSurface};

/// Cells merged through missing faces, with winding bookkeeping.
///
/// Each cell stores its unwrapped displacement from the root of its
/// supercell; a missing face that closes a loop with nonzero net
/// displacement means the supercell wraps around the torus.
#[derive(Debug, Clone)]
pub struct SupercellPartition {
    d: usize,
    root: Vec<u32>,
    disp: Vec<[i32; 3]>,
    parity: Vec<bool>,
    wraps: [bool; 3],
    flags: Vec<usize>,
    missing: Vec<bool>,
}

impl SupercellPartition {
    /// Root cell of the supercell containing `c`.
    pub fn find(&self, c: usize) -> usize {
        self.root[c] as usize
    }

    /// Syndrome of the supercell rooted at `root`.
    pub fn parity(&self, root: usize) -> bool {
        self.parity[root]
    }

    /// Odd supercells by root cell id, ascending.
    pub fn flags(&self) -> &[usize] {
        &self.flags
    }

    /// Some supercell wraps around the given axis.
    pub fn wraps(&self, axis: Axis) -> bool {
        self.wraps[axis.index()]
    }

    pub fn percolated(&self) -> bool {
        self.wraps.iter().any(|&w| w)
    }

    pub fn n_supercells(&self) -> usize {
        self.root
            .iter()
            .enumerate()
            .filter(|&(c, &r)| r as usize == c)
            .count()
    }

    pub fn is_missing(&self, q: usize) -> bool {
        self.missing[q]
    }

    /// Parity of surface crossings along the in-supercell path from the root
    /// to `c`. Meaningless for wrapping supercells.
    fn crossing_parity(&self, g: &Lattice, c: usize, a: usize) -> bool {
        let r = self.root[c] as usize;
        let x = g.cell_coords(c)[a] as i64;
        let xr = g.cell_coords(r)[a] as i64;
        let turns = (xr + i64::from(self.disp[c][a]) - x).div_euclid(self.d as i64);
        turns.rem_euclid(2) == 1
    }
}

struct UnionFind {
    parent: Vec<u32>,
    off: Vec<[i32; 3]>,
    size: Vec<u32>,
    path: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            off: vec![[0; 3]; n],
            size: vec![1; n],
            path: Vec::new(),
        }
    }

    /// Root and displacement of `c` relative to it.
    fn find(&mut self, c: usize) -> (usize, [i32; 3]) {
        self.path.clear();
        let mut x = c;
        while self.parent[x] as usize != x {
            self.path.push(x);
            x = self.parent[x] as usize;
        }
        let root = x;
        for i in (0..self.path.len()).rev() {
            let node = self.path[i];
            let p = self.parent[node] as usize;
            if p != root {
                let po = self.off[p];
                let o = &mut self.off[node];
                for k in 0..3 {
                    o[k] += po[k];
                }
                self.parent[node] = root as u32;
            }
        }
        (root, self.off[c])
    }
}

/// Builds supercells from the missing faces and flags odd ones.
/// Flips recorded on missing qubits are ignored.
pub fn extract_syndrome(g: &Lattice, instance: &ErrorInstance) -> SupercellPartition {
    let n_cells = g.n_cells();
    let d = g.d();
    let mut uf = UnionFind::new(n_cells);
    let mut wraps = [false; 3];
    for (q, &m) in instance.missing.iter().enumerate() {
        if !m {
            continue;
        }
        let (a, b) = g.incident_cells_unchecked(q);
        let axis = q % 3;
        let (ra, da) = uf.find(a);
        let (rb, db) = uf.find(b);
        let mut gap = [0i32; 3];
        for k in 0..3 {
            gap[k] = da[k] + i32::from(k == axis) - db[k];
        }
        if ra == rb {
            for k in 0..3 {
                if gap[k] != 0 {
                    wraps[k] = true;
                }
            }
        } else if uf.size[ra] >= uf.size[rb] {
            uf.parent[rb] = ra as u32;
            uf.off[rb] = gap;
            uf.size[ra] += uf.size[rb];
        } else {
            uf.parent[ra] = rb as u32;
            uf.off[ra] = gap.map(|x| -x);
            uf.size[rb] += uf.size[ra];
        }
    }
    let mut root = vec![0u32; n_cells];
    let mut disp = vec![[0i32; 3]; n_cells];
    for c in 0..n_cells {
        let (r, o) = uf.find(c);
        root[c] = r as u32;
        disp[c] = o;
    }
    let mut parity = vec![false; n_cells];
    for (q, &f) in instance.flipped.iter().enumerate() {
        if f && !instance.missing[q] {
            let (a, b) = g.incident_cells_unchecked(q);
            parity[root[a] as usize] ^= true;
            parity[root[b] as usize] ^= true;
        }
    }
    let flags = (0..n_cells)
        .filter(|&c| root[c] as usize == c && parity[c])
        .collect();
    SupercellPartition {
        d,
        root,
        disp,
        parity,
        wraps,
        flags,
        missing: instance.missing.clone(),
    }
}

/// Complete graph on the flagged supercells.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    nodes: Vec<usize>,
    weights: Vec<u32>,
    /// Per node: shortest-path predecessor `(cell, face)` of every cell.
    trees: Vec<Vec<(u32, u32)>>,
}

impl MatchingGraph {
    /// Root cells of the flagged supercells, ascending.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.weights[i * self.nodes.len() + j]
    }

    /// Surviving faces on the stored shortest path from node `i` to node `j`.
    pub fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let tree = &self.trees[i];
        let start = self.nodes[i];
        let mut c = self.nodes[j];
        let mut faces = Vec::new();
        while c != start {
            let (p, f) = tree[c];
            if f & FREE == 0 {
                faces.push(f as usize);
            }
            c = p as usize;
        }
        faces
    }
}

const UNSEEN: u32 = u32::MAX;
/// Marks a tree edge through a missing face.
const FREE: u32 = 1 << 31;

/// All-pairs distances between flags by 0-1 breadth-first search: crossing a
/// surviving face costs one, a missing face costs nothing.
pub fn build_matching_graph(partition: &SupercellPartition, g: &Lattice) -> MatchingGraph {
    let nodes = partition.flags.clone();
    let k = nodes.len();
    let n_cells = g.n_cells();
    let mut weights = vec![0u32; k * k];
    let mut trees = Vec::with_capacity(k);
    let mut dist = vec![UNSEEN; n_cells];
    let mut queue = VecDeque::new();
    for (i, &src) in nodes.iter().enumerate() {
        dist.fill(UNSEEN);
        let mut pred = vec![(UNSEEN, UNSEEN); n_cells];
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(c) = queue.pop_front() {
            let dc = dist[c];
            let (nbs, faces) = g.neighbors_raw(c);
            for s in 0..6 {
                let nb = nbs[s] as usize;
                let f = faces[s] as usize;
                let free = partition.missing[f];
                let nd = dc + u32::from(!free);
                if nd < dist[nb] {
                    dist[nb] = nd;
                    pred[nb] = (c as u32, f as u32 | if free { FREE } else { 0 });
                    if free {
                        queue.push_front(nb);
                    } else {
                        queue.push_back(nb);
                    }
                }
            }
        }
        for (j, &dst) in nodes.iter().enumerate() {
            weights[i * k + j] = dist[dst];
        }
        trees.push(pred);
    }
    MatchingGraph {
        nodes,
        weights,
        trees,
    }
}

/// Exact minimum-weight perfect matching; pairs `(i, j)` of node indices with
/// `i < j`, sorted.
pub fn mwpm(mg: &MatchingGraph) -> Result<Vec<(usize, usize)>> {
    let k = mg.len();
    min_weight_perfect_matching(k, |i, j| mg.weight(i, j))
}

/// Minimum-weight perfect matching on the complete graph with the given
/// symmetric weights.
pub fn min_weight_perfect_matching(
    k: usize,
    w: impl Fn(usize, usize) -> u32,
) -> Result<Vec<(usize, usize)>> {
    if k % 2 == 1 {
        return Err(Error::OddMatching(k));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 2 {
        return Ok(vec![(0, 1)]);
    }
    let mut max_w = 0i64;
    for i in 0..k {
        for j in i + 1..k {
            max_w = max_w.max(i64::from(w(i, j)));
        }
    }
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            edges.push((i, j, max_w + 1 - i64::from(w(i, j))));
        }
    }
    let mate = max_weight_matching(k, &edges, true);
    let mut pairs = Vec::with_capacity(k / 2);
    for (i, m) in mate.iter().enumerate() {
        match m {
            Some(j) if i < *j => pairs.push((i, *j)),
            Some(_) => {}
            None => return Err(Error::OddMatching(k)),
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Matched flags as pairs of supercell root cells.
    pub pairs: Vec<(usize, usize)>,
    /// Qubits flipped by the correction, ascending.
    pub correction: Vec<usize>,
    pub logical_flip: bool,
    pub percolated: bool,
    /// Residual crosses each axis's logical surface an odd number of times.
    pub winding: [bool; 3],
}

/// Applies the matched correction and judges the residual against `surface`.
/// A wrapping supercell always counts as a logical failure.
pub fn apply_and_judge(
    g: &Lattice,
    instance: &ErrorInstance,
    partition: &SupercellPartition,
    mg: &MatchingGraph,
    matching: &[(usize, usize)],
    surface: &LogicalSurface,
) -> DecodeResult {
    let pairs: Vec<(usize, usize)> = matching
        .iter()
        .map(|&(i, j)| (mg.nodes[i], mg.nodes[j]))
        .collect();
    let mut corr = vec![false; g.n_qubits()];
    for &(i, j) in matching {
        for f in mg.path(i, j) {
            corr[f] ^= true;
        }
    }
    let correction: Vec<usize> = (0..corr.len()).filter(|&q| corr[q]).collect();
    let percolated = partition.percolated();
    if percolated {
        return DecodeResult {
            pairs,
            correction,
            logical_flip: true,
            percolated,
            winding: [false; 3],
        };
    }

    let mut cell_odd = vec![false; g.n_cells()];
    let mut winding = [false; 3];
    for q in 0..g.n_qubits() {
        if partition.missing[q] || !(instance.flipped[q] ^ corr[q]) {
            continue;
        }
        let (a, b) = g.incident_cells_unchecked(q);
        cell_odd[a] ^= true;
        cell_odd[b] ^= true;
        for axis in Axis::ALL {
            if g.is_on_surface(q, axis) {
                winding[axis.index()] ^= true;
            }
        }
    }
    let mut super_odd = vec![false; g.n_cells()];
    for c in 0..g.n_cells() {
        if cell_odd[c] {
            super_odd[partition.find(c)] ^= true;
            for a in 0..3 {
                winding[a] ^= partition.crossing_parity(g, c, a);
            }
        }
    }
    debug_assert!(!super_odd.contains(&true), "residual leaves a syndrome");
    DecodeResult {
        pairs,
        correction,
        logical_flip: winding[surface.axis.index()],
        percolated,
        winding,
    }
}

/// Full pipeline for one instance.
pub fn decode(
    g: &Lattice,
    instance: &ErrorInstance,
    surface: &LogicalSurface,
) -> Result<DecodeResult> {
    let partition = extract_syndrome(g, instance);
    if partition.percolated() {
        return Ok(DecodeResult {
            pairs: Vec::new(),
            correction: Vec::new(),
            logical_flip: true,
            percolated: true,
            winding: [false; 3],
        });
    }
    let mg = build_matching_graph(&partition, g);
    let matching = mwpm(&mg)?;
    Ok(apply_and_judge(
        g, instance, &partition, &mg, &matching, surface,
    ))
}
