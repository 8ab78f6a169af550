//! Simple undirected graphs with dense vertex ids, plus the exact predicates
//! every other module checks itself against.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::bitset::Bitset;
use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Adjacency is stored twice: as sorted neighbour lists for iteration and as
/// bit sets for constant-time adjacency queries and fast intersections.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    rows: Vec<Bitset>,
    m: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n], rows: (0..n).map(|_| Bitset::new(n)).collect(), m: 0 }
    }

    /// Builds a graph, rejecting self-loops, out-of-range ids and duplicate edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            if !g.add_edge(u, v)? {
                return Err(Error::input(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// `G(n, p)`, reproducible from `seed`.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p.clamp(0.0, 1.0)) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    /// Inserts `{u, v}`. Returns `Ok(false)` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u >= self.n || v >= self.n {
            return Err(Error::input(format!("edge ({u}, {v}) out of range for n = {}", self.n)));
        }
        if u == v {
            return Err(Error::input(format!("self-loop at {u}")));
        }
        if self.rows[u].contains(v) {
            return Ok(false);
        }
        self.rows[u].insert(v);
        self.rows[v].insert(u);
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.m += 1;
        Ok(true)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.rows[u].contains(v) {
            return false;
        }
        self.rows[u].remove(v);
        self.rows[v].remove(u);
        self.adj[u].retain(|&w| w != v);
        self.adj[v].retain(|&w| w != u);
        self.m -= 1;
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_set(&self, v: usize) -> &Bitset {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Reads the `n m` / `u v` text format. Edge lines may appear in any order.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .map(|l| l.map_err(Error::from))
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let header = lines.next().ok_or_else(|| Error::input("empty graph file"))??;
        let (n, m) = parse_pair(&header)?;
        let mut g = Graph::empty(n);
        let mut seen = 0;
        for line in lines {
            let (u, v) = parse_pair(&line?)?;
            if !g.add_edge(u, v)? {
                return Err(Error::input(format!("duplicate edge ({u}, {v})")));
            }
            seen += 1;
        }
        if seen != m {
            return Err(Error::input(format!("header announces {m} edges, found {seen}")));
        }
        Ok(g)
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        Graph::read_text(s.as_bytes())
    }

    /// Canonical text form: header then `u v` lines with `u < v`, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.m).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn subset(&self, members: impl IntoIterator<Item = usize>) -> Result<VertexSubset> {
        VertexSubset::new(self, members)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::input(format!("not a non-negative integer: {t:?}"))));
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::input(format!("expected two integers, got {line:?}"))),
    }
}

/// A sorted set of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSubset(Vec<usize>);

impl VertexSubset {
    /// Validates `members` against `g` (range and distinctness); order is normalised.
    pub fn new(g: &Graph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let s = VertexSubset::from_unchecked(members);
        if let Some(&v) = s.0.iter().find(|&&v| v >= g.n()) {
            return Err(Error::input(format!("vertex {v} out of range for n = {}", g.n())));
        }
        Ok(s)
    }

    /// Sorts and dedups without range checking.
    pub fn from_unchecked(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSubset(v)
    }

    /// Checks that `members` is already strictly increasing and in range.
    pub fn from_sorted(g: &Graph, members: Vec<usize>) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("vertex subset is not strictly increasing"));
        }
        if members.last().is_some_and(|&v| v >= g.n()) {
            return Err(Error::input("vertex subset contains an out-of-range id"));
        }
        Ok(VertexSubset(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    fn check(&self, g: &Graph) -> Result<()> {
        if let Some(&v) = self.0.last() {
            if v >= g.n() {
                return Err(Error::input(format!("vertex {v} out of range for n = {}", g.n())));
            }
        }
        Ok(())
    }
}

/// Number of edges of `g` with both endpoints in `s`.
pub fn induced_edge_count(g: &Graph, s: &VertexSubset) -> Result<usize> {
    s.check(g)?;
    let m = s.members();
    let mut count = 0;
    for (i, &u) in m.iter().enumerate() {
        count += m[i + 1..].iter().filter(|&&v| g.has_edge(u, v)).count();
    }
    Ok(count)
}

/// Whether `s` induces a chordless cycle of length `k`.
///
/// `C_k` is the only connected 2-regular graph on `k` vertices, so it is enough
/// to check the size, the induced degrees and connectivity.
pub fn is_induced_cycle(g: &Graph, s: &VertexSubset, k: usize) -> Result<bool> {
    if k < 3 {
        return Err(Error::input(format!("cycle length must be at least 3, got {k}")));
    }
    s.check(g)?;
    let m = s.members();
    if m.len() != k {
        return Ok(false);
    }
    let induced_nbrs = |u: usize| m.iter().copied().filter(move |&v| g.has_edge(u, v));
    if m.iter().any(|&u| induced_nbrs(u).count() != 2) {
        return Ok(false);
    }
    // 2-regular, so connected iff walking from m[0] visits all k vertices.
    let (mut prev, mut cur) = (usize::MAX, m[0]);
    for step in 0..k {
        let next = induced_nbrs(cur).find(|&v| v != prev).unwrap();
        prev = cur;
        cur = next;
        if cur == m[0] {
            return Ok(step + 1 == k);
        }
    }
    Ok(false)
}

/// Whether `s` induces a diamond, the unique 4-vertex graph with 5 edges.
pub fn is_induced_diamond(g: &Graph, s: &VertexSubset) -> Result<bool> {
    Ok(s.len() == 4 && induced_edge_count(g, s)? == 5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diameter {
    Finite(usize),
    /// The graph is disconnected.
    Infinite,
}

pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in g.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn eccentricity(g: &Graph, v: usize) -> Diameter {
    let mut ecc = 0;
    for d in bfs_distances(g, v) {
        match d {
            Some(d) => ecc = ecc.max(d),
            None => return Diameter::Infinite,
        }
    }
    Diameter::Finite(ecc)
}

pub fn diameter(g: &Graph) -> Diameter {
    let mut best = 0;
    for v in 0..g.n() {
        match eccentricity(g, v) {
            Diameter::Finite(e) => best = best.max(e),
            Diameter::Infinite => return Diameter::Infinite,
        }
    }
    Diameter::Finite(best)
}

/// Set disjointness: 0 iff some index is set in both strings.
pub fn disj(x: &BitString, y: &BitString) -> Result<u8> {
    if x.len() != y.len() {
        return Err(Error::input(format!("DISJ length mismatch: {} vs {}", x.len(), y.len())));
    }
    let shared = x.as_slice().iter().zip(y.as_slice()).any(|(&a, &b)| a && b);
    Ok(if shared { 0 } else { 1 })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The four-cycle 0-1-2-3 with the chord 0-2.
    pub(crate) fn figure_one() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
    }

    fn all(g: &Graph) -> VertexSubset {
        VertexSubset::new(g, 0..g.n()).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn induced_edge_counts() {
        let k4 = Graph::complete(4);
        assert_eq!(induced_edge_count(&k4, &all(&k4)).unwrap(), 6);
        assert_eq!(induced_edge_count(&k4, &VertexSubset::default()).unwrap(), 0);
        let f = figure_one();
        assert_eq!(induced_edge_count(&f, &all(&f)).unwrap(), 5);
        assert!(induced_edge_count(&f, &VertexSubset::from_unchecked([7])).is_err());
    }

    #[test]
    fn induced_cycle_predicate() {
        let c4 = Graph::cycle(4);
        assert!(is_induced_cycle(&c4, &all(&c4), 4).unwrap());
        let f = figure_one();
        assert!(!is_induced_cycle(&f, &all(&f), 4).unwrap());
        let p5 = Graph::path(5);
        assert!(!is_induced_cycle(&p5, &all(&p5), 5).unwrap());
        // two disjoint triangles are 2-regular but not a 6-cycle
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!is_induced_cycle(&two, &all(&two), 6).unwrap());
        assert!(is_induced_cycle(&c4, &all(&c4), 2).is_err());
    }

    #[test]
    fn diamond_predicate() {
        let f = figure_one();
        assert!(is_induced_diamond(&f, &all(&f)).unwrap());
        let k4 = Graph::complete(4);
        assert!(!is_induced_diamond(&k4, &all(&k4)).unwrap());
        let c4 = Graph::cycle(4);
        assert!(!is_induced_diamond(&c4, &all(&c4)).unwrap());
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&Graph::complete(4)), Diameter::Finite(1));
        assert_eq!(diameter(&Graph::cycle(8)), Diameter::Finite(4));
        assert_eq!(diameter(&Graph::empty(2)), Diameter::Infinite);
        assert_eq!(diameter(&Graph::empty(1)), Diameter::Finite(0));
    }

    #[test]
    fn set_disjointness() {
        let b = |s| BitString::parse_binary(s).unwrap();
        assert_eq!(disj(&b("101"), &b("001")).unwrap(), 0);
        assert_eq!(disj(&b("101"), &b("010")).unwrap(), 1);
        assert_eq!(disj(&b("00000000"), &b("11111111")).unwrap(), 1);
        assert!(disj(&b("1"), &b("10")).is_err());
    }

    #[test]
    fn text_format_is_canonical() {
        let g = Graph::parse_text("4 3\n2 3\n1 0\n0 2\n").unwrap();
        assert_eq!(g.to_text(), "4 3\n0 1\n0 2\n2 3\n");
        assert!(Graph::parse_text("3 2\n0 1\n").is_err());
        assert!(Graph::parse_text("3 1\n0 x\n").is_err());
        assert!(Graph::parse_text("3 2\n0 1\n1 0\n").is_err());
    }
}
