//! Chain and triangular-lattice builders with sublattice labels, triangle
//! lists, 1-link maps and dual-lattice loop helpers.
//!
//! Triangular lattices use oblique (rhombic) coordinates: site (r, c) sits at
//! x = c + r/2, rows running downward. Sublattices tile with period 3 in both
//! directions, so periodic dimensions must be multiples of 3. Every triangle
//! then contains exactly one site of each sublattice. Open patches follow the
//! convention that boundary sites carry only B and C spins: rim sites of the
//! A sublattice are removed.

use crate::{Error, Result, MAX_SITES};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    Chain,
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Sublattice label; chains use A/B as even/odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
    C,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub boundary: Boundary,
    n_sites: usize,
    coords: Vec<(i32, i32)>,
    sublattice: Vec<Sublattice>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    triangles: Vec<[usize; 3]>,
    boundary_sites: Vec<usize>,
}

impl Lattice {
    pub fn chain(len: usize, boundary: Boundary) -> Result<Lattice> {
        if len < 2 || len > MAX_SITES {
            return Err(Error::InvalidModel(format!("chain length {len} unsupported")));
        }
        let mut edges = Vec::new();
        for i in 0..len - 1 {
            edges.push((i, i + 1));
        }
        if boundary == Boundary::Periodic && len > 2 {
            edges.push((len - 1, 0));
        }
        let mut adjacency = vec![Vec::new(); len];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let boundary_sites = match boundary {
            Boundary::Periodic => Vec::new(),
            Boundary::Open => vec![0, len - 1],
        };
        Ok(Lattice {
            kind: LatticeKind::Chain,
            boundary,
            n_sites: len,
            coords: (0..len).map(|i| (0, i as i32)).collect(),
            sublattice: (0..len)
                .map(|i| if i % 2 == 0 { Sublattice::A } else { Sublattice::B })
                .collect(),
            adjacency,
            edges,
            triangles: Vec::new(),
            boundary_sites,
        })
    }

    /// Triangular lattice on an nx-by-ny rhombic grid. Periodic dimensions
    /// must be multiples of the sublattice period 3; open patches drop the
    /// rim sites of the A sublattice.
    pub fn triangular(nx: usize, ny: usize, boundary: Boundary) -> Result<Lattice> {
        if nx < 3 || ny < 2 {
            return Err(Error::InvalidModel(format!("triangular {nx}x{ny} too small")));
        }
        if boundary == Boundary::Periodic && (nx % 3 != 0 || ny % 3 != 0) {
            return Err(Error::InvalidModel(
                "periodic triangular dimensions must be multiples of the sublattice period 3"
                    .into(),
            ));
        }
        if nx * ny > MAX_SITES {
            return Err(Error::CapExceeded(nx * ny, MAX_SITES));
        }
        let sub_of = |r: usize, c: usize| -> Sublattice {
            match (c + 2 * r) % 3 {
                0 => Sublattice::A,
                1 => Sublattice::C,
                _ => Sublattice::B,
            }
        };
        let on_rim = |r: usize, c: usize| r == 0 || r == ny - 1 || c == 0 || c == nx - 1;
        // site selection
        let mut index = vec![vec![None; nx]; ny];
        let mut coords = Vec::new();
        let mut sublattice = Vec::new();
        let mut n = 0usize;
        for r in 0..ny {
            for c in 0..nx {
                let sub = sub_of(r, c);
                if boundary == Boundary::Open && on_rim(r, c) && sub == Sublattice::A {
                    continue; // open patches expose only B/C spins on the rim
                }
                index[r][c] = Some(n);
                coords.push((r as i32, c as i32));
                sublattice.push(sub);
                n += 1;
            }
        }
        // neighbors in oblique coordinates
        let deltas: [(i64, i64); 6] = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, -1), (-1, 1)];
        let wrap = |r: i64, c: i64| -> Option<(usize, usize)> {
            match boundary {
                Boundary::Periodic => Some((
                    r.rem_euclid(ny as i64) as usize,
                    c.rem_euclid(nx as i64) as usize,
                )),
                Boundary::Open => {
                    if r < 0 || c < 0 || r >= ny as i64 || c >= nx as i64 {
                        None
                    } else {
                        Some((r as usize, c as usize))
                    }
                }
            }
        };
        let site = |r: i64, c: i64| -> Option<usize> {
            wrap(r, c).and_then(|(rr, cc)| index[rr][cc])
        };
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for r in 0..ny as i64 {
            for c in 0..nx as i64 {
                let Some(u) = site(r, c) else { continue };
                for (dr, dc) in deltas {
                    if let Some(v) = site(r + dr, c + dc) {
                        if u < v {
                            edges.push((u, v));
                            adjacency[u].push(v);
                            adjacency[v].push(u);
                        }
                    }
                }
            }
        }
        // triangles: up {(r,c),(r,c+1),(r+1,c)} and down {(r,c+1),(r+1,c),(r+1,c+1)}
        let mut triangles = Vec::new();
        for r in 0..ny as i64 {
            for c in 0..nx as i64 {
                for tri in [
                    [(r, c), (r, c + 1), (r + 1, c)],
                    [(r, c + 1), (r + 1, c), (r + 1, c + 1)],
                ] {
                    let sites: Vec<Option<usize>> =
                        tri.iter().map(|&(rr, cc)| site(rr, cc)).collect();
                    if let [Some(a), Some(b), Some(cc)] = sites[..] {
                        let mut t = [a, b, cc];
                        t.sort_by_key(|&s| sublattice[s]);
                        triangles.push(t); // ordered (A, B, C)
                    }
                }
            }
        }
        triangles.sort_unstable();
        triangles.dedup();
        for t in &triangles {
            let labels: Vec<Sublattice> = t.iter().map(|&s| sublattice[s]).collect();
            if labels != vec![Sublattice::A, Sublattice::B, Sublattice::C] {
                return Err(Error::InvalidModel(format!(
                    "triangle {t:?} does not cover all sublattices"
                )));
            }
        }
        let boundary_sites = match boundary {
            Boundary::Periodic => Vec::new(),
            Boundary::Open => {
                let mut rim = Vec::new();
                for (i, &(r, c)) in coords.iter().enumerate() {
                    if on_rim(r as usize, c as usize) {
                        rim.push(i);
                    }
                }
                rim
            }
        };
        Ok(Lattice {
            kind: LatticeKind::Triangular,
            boundary,
            n_sites: n,
            coords,
            sublattice,
            adjacency,
            edges,
            triangles,
            boundary_sites,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coords(&self, site: usize) -> (i32, i32) {
        self.coords[site]
    }

    pub fn site_at(&self, r: i32, c: i32) -> Option<usize> {
        self.coords.iter().position(|&rc| rc == (r, c))
    }

    pub fn sublattice(&self, site: usize) -> Sublattice {
        self.sublattice[site]
    }

    pub fn sites_of(&self, sub: Sublattice) -> Vec<usize> {
        (0..self.n_sites).filter(|&i| self.sublattice[i] == sub).collect()
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Triangles as (A, B, C)-ordered triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_sites(&self) -> &[usize] {
        &self.boundary_sites
    }

    /// The 1-links of a vertex: the opposite edges of the triangles that
    /// contain it (for an A vertex these are its surrounding B-C edges).
    pub fn one_links(&self, site: usize) -> Vec<(usize, usize)> {
        let mut links = Vec::new();
        for t in &self.triangles {
            if let Some(pos) = t.iter().position(|&s| s == site) {
                let others: Vec<usize> = (0..3).filter(|&k| k != pos).map(|k| t[k]).collect();
                links.push((others[0].min(others[1]), others[0].max(others[1])));
            }
        }
        links.sort_unstable();
        links.dedup();
        links
    }

    /// Domain-wall loop on the dual lattice of a flipped vertex set: the
    /// 1-link edges belonging to an odd number of triangles whose remaining
    /// vertex is flipped.
    pub fn dual_loop(&self, flips: u64) -> Vec<(usize, usize)> {
        let mut count = std::collections::BTreeMap::new();
        for t in &self.triangles {
            for pos in 0..3 {
                if flips & (1u64 << t[pos]) != 0 {
                    let others: Vec<usize> =
                        (0..3).filter(|&k| k != pos).map(|k| t[k]).collect();
                    let e = (others[0].min(others[1]), others[0].max(others[1]));
                    *count.entry(e).or_insert(0usize) += 1;
                }
            }
        }
        count
            .into_iter()
            .filter_map(|(e, c)| (c % 2 == 1).then_some(e))
            .collect()
    }

    /// Graph-distance diameter of the support mask (interaction radius of a
    /// term). Disconnected supports report the largest pairwise distance.
    pub fn span(&self, mask: u64) -> usize {
        let sites: Vec<usize> =
            (0..self.n_sites).filter(|&i| mask & (1u64 << i) != 0).collect();
        let mut best = 0usize;
        for &start in &sites {
            let mut dist = vec![usize::MAX; self.n_sites];
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            for &other in &sites {
                if dist[other] != usize::MAX {
                    best = best.max(dist[other]);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_counts() {
        let l = Lattice::chain(8, Boundary::Periodic).unwrap();
        assert_eq!(l.n_sites(), 8);
        assert_eq!(l.edges().len(), 8);
        let l = Lattice::chain(8, Boundary::Open).unwrap();
        assert_eq!(l.edges().len(), 7);
        assert_eq!(l.boundary_sites(), &[0, 7]);
    }

    #[test]
    fn triangular_3x3_periodic_counts() {
        let l = Lattice::triangular(3, 3, Boundary::Periodic).unwrap();
        assert_eq!(l.n_sites(), 9);
        for sub in [Sublattice::A, Sublattice::B, Sublattice::C] {
            assert_eq!(l.sites_of(sub).len(), 3, "{sub:?}");
        }
        assert_eq!(l.triangles().len(), 18);
        // each vertex carries six 1-links on the periodic lattice
        for v in 0..9 {
            assert_eq!(l.one_links(v).len(), 6, "vertex {v}");
        }
    }

    #[test]
    fn triangular_open_rim_has_no_a_sites() {
        let l = Lattice::triangular(6, 4, Boundary::Open).unwrap();
        assert!(!l.boundary_sites().is_empty());
        for &s in l.boundary_sites() {
            assert_ne!(l.sublattice(s), Sublattice::A, "site {s}");
        }
        assert!(!l.sites_of(Sublattice::A).is_empty());
    }

    #[test]
    fn dual_loop_of_single_vertex_is_its_one_links() {
        let l = Lattice::triangular(6, 6, Boundary::Periodic).unwrap();
        let b = l.sites_of(Sublattice::B)[4];
        let loop_edges = l.dual_loop(1u64 << b);
        assert_eq!(loop_edges, l.one_links(b));
        assert_eq!(loop_edges.len(), 6);
    }

    #[test]
    fn periodic_dims_must_match_sublattice_period() {
        assert!(Lattice::triangular(4, 4, Boundary::Periodic).is_err());
        assert!(Lattice::triangular(6, 3, Boundary::Periodic).is_ok());
    }

    #[test]
    fn span_measures_graph_distance() {
        let l = Lattice::chain(10, Boundary::Periodic).unwrap();
        let mask = (1u64 << 0) | (1u64 << 9);
        assert_eq!(l.span(mask), 1); // periodic wrap
        let l = Lattice::chain(10, Boundary::Open).unwrap();
        assert_eq!(l.span(mask), 9);
    }
}
