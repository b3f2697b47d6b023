//! Static network topology: construction, scale-free generation, degree
//! statistics, and the dominant adjacency eigenvalue.
//!
//! The graph is undirected and simple (no self-loops, no multi-edges),
//! stored as per-node sorted neighbor lists. It is immutable after
//! construction and safe to share across threads.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

/// Dominant eigenpair of the adjacency matrix, as returned by
/// [`Graph::largest_eigenvalue`].
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Largest real (Perron) eigenvalue.
    pub lambda_max: f64,
    /// Nonnegative unit eigenvector.
    pub eigenvector: Vec<f64>,
    /// Final `||A v - lambda v||_inf`.
    pub residual: f64,
    /// Iterations used.
    pub iterations: usize,
}

/// Degree summary plus connected-component count.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    /// `2 * |edges| / n`.
    pub mean: f64,
    pub max: usize,
    /// `histogram[k]` = number of nodes of degree `k`; covers all observed
    /// degrees (length `max + 1`, empty for an empty graph of 0 nodes).
    pub histogram: Vec<usize>,
    pub components: usize,
}

impl Graph {
    /// Build a graph from an edge list. Edges are symmetrized and
    /// deduplicated; endpoints must lie in `[0, n)` and self-loops are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if i >= n || j >= n {
                return Err(Error::EdgeOutOfRange { i, j, n });
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { neighbors })
    }

    /// Scale-free graph by growth with linear preferential attachment
    /// (Price-style, treated as undirected). Starts from a complete graph
    /// on `m + 1` nodes; each arriving node attaches `m` edges to distinct
    /// existing nodes with probability proportional to `degree + 1`.
    /// Same `(n, m, seed)` always yields the same edge set.
    pub fn price(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m < 1 || n <= m {
            return Err(Error::BadGeneratorParams { n, m });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut neighbors = vec![Vec::new(); n];
        // One bag entry per unit of attachment weight (degree + 1):
        // every node enters once at birth, then once per incident edge.
        let mut bag: Vec<usize> = Vec::with_capacity(2 * n * m);
        for i in 0..=m {
            bag.push(i);
            for j in 0..i {
                neighbors[i].push(j);
                neighbors[j].push(i);
                bag.push(i);
                bag.push(j);
            }
        }
        let mut targets = Vec::with_capacity(m);
        for i in (m + 1)..n {
            targets.clear();
            while targets.len() < m {
                let t = bag[rng.random_range(0..bag.len())];
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            bag.push(i);
            for &t in &targets {
                neighbors[i].push(t);
                neighbors[t].push(i);
                bag.push(i);
                bag.push(t);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph { neighbors })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as `(i, j)` pairs with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Largest real eigenvalue of the adjacency matrix by power iteration.
    ///
    /// Iterates on `A + I` (the shift breaks the +/- eigenvalue symmetry of
    /// bipartite graphs) from a uniform positive start vector; converged
    /// when the Rayleigh quotient settles and `||A v - lambda v||_inf <= tol`.
    /// A graph with no edges reports `lambda_max = 0` with zero residual.
    pub fn largest_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<SpectralResult> {
        assert!(tol > 0.0, "tolerance must be positive");
        let n = self.node_count();
        assert!(n > 0, "graph must be nonempty");
        let uniform = 1.0 / (n as f64).sqrt();
        if self.edge_count() == 0 {
            return Ok(SpectralResult {
                lambda_max: 0.0,
                eigenvector: vec![uniform; n],
                residual: 0.0,
                iterations: 0,
            });
        }
        let mut x = vec![uniform; n];
        let mut z = vec![0.0; n];
        let mut prev_lambda = f64::INFINITY;
        let mut lambda = 0.0;
        let mut residual = f64::INFINITY;
        for it in 0..max_iter {
            for (i, zi) in z.iter_mut().enumerate() {
                *zi = self.neighbors[i].iter().map(|&j| x[j]).sum();
            }
            lambda = x.iter().zip(&z).map(|(a, b)| a * b).sum();
            residual = x
                .iter()
                .zip(&z)
                .map(|(xi, zi)| (zi - lambda * xi).abs())
                .fold(0.0, f64::max);
            if residual <= tol && (lambda - prev_lambda).abs() <= tol {
                return Ok(SpectralResult {
                    lambda_max: lambda,
                    eigenvector: x,
                    residual,
                    iterations: it,
                });
            }
            prev_lambda = lambda;
            // next iterate of (A + I) x, renormalized
            let mut norm = 0.0;
            for (zi, xi) in z.iter_mut().zip(&x) {
                *zi += xi;
                norm += *zi * *zi;
            }
            let norm = norm.sqrt();
            for (xi, zi) in x.iter_mut().zip(&z) {
                *xi = zi / norm;
            }
        }
        Err(Error::PowerIterationDiverged {
            iterations: max_iter,
            residual,
            last_lambda: lambda,
            last_vector: x,
        })
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.node_count();
        let max = (0..n).map(|i| self.degree(i)).max().unwrap_or(0);
        let mut histogram = if n == 0 { Vec::new() } else { vec![0; max + 1] };
        for i in 0..n {
            histogram[self.degree(i)] += 1;
        }
        let mean = if n == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / n as f64
        };
        DegreeStats {
            mean,
            max,
            histogram,
            components: self.component_count(),
        }
    }

    fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for &j in &self.neighbors[i] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        components
    }

    /// Subgraph induced by `nodes` (relabeled 0..len in the given order).
    /// Duplicate entries are rejected via the self-loop/dedup rules of
    /// [`Graph::from_edges`].
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let mut edges = Vec::new();
        for &old in nodes {
            for &nb in &self.neighbors[old] {
                if index[nb] != usize::MAX && old < nb {
                    edges.push((index[old], index[nb]));
                }
            }
        }
        Graph::from_edges(nodes.len(), &edges)
    }

    /// Write the edge list: a `# nodes <n>` directive line, then one
    /// `i j` pair per line with `i < j`, sorted. The directive keeps
    /// trailing isolated nodes across a round trip.
    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        writeln!(w, "# nodes {}", self.node_count()).map_err(io_err)?;
        for (i, j) in self.edges() {
            writeln!(w, "{} {}", i, j).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Read an edge list written by [`Graph::write_edge_list`] or any
    /// plain `i j`-per-line file (0-indexed, `#` comment lines ignored;
    /// a `# nodes <n>` directive pins the node count, otherwise it is
    /// inferred as `max endpoint + 1`).
    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::EdgeListRead {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut declared_n = None;
        let mut edges = Vec::new();
        let mut max_node = None::<usize>;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::EdgeListRead {
                path: path.to_path_buf(),
                source,
            })?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("nodes") {
                    if let Some(Ok(n)) = parts.next().map(str::parse) {
                        declared_n = Some(n);
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::EdgeListParse {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        reason: format!("expected two node indices, got {:?}", line),
                    })
            };
            let i = parse(parts.next())?;
            let j = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::EdgeListParse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    reason: format!("trailing tokens in {:?}", line),
                });
            }
            max_node = Some(max_node.unwrap_or(0).max(i).max(j));
            edges.push((i, j));
        }
        let n = declared_n.unwrap_or_else(|| max_node.map_or(0, |m| m + 1));
        Graph::from_edges(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn assert_simple_symmetric(g: &Graph) {
        for i in 0..g.node_count() {
            let list = g.neighbors(i);
            for w in list.windows(2) {
                assert!(w[0] < w[1], "node {i} list not strictly sorted: {list:?}");
            }
            for &j in list {
                assert_ne!(i, j, "self-loop at {i}");
                assert!(g.neighbors(j).contains(&i), "asymmetric edge ({i},{j})");
            }
        }
    }

    #[test]
    fn from_edges_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn from_edges_dedups_reversed_duplicates() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn from_edges_rejects_out_of_range() {
        match Graph::from_edges(3, &[(0, 3)]) {
            Err(Error::EdgeOutOfRange { i: 0, j: 3, n: 3 }) => {}
            other => panic!("expected EdgeOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn from_edges_rejects_self_loop() {
        assert!(matches!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
    }

    #[test]
    fn price_rejects_bad_sizes() {
        assert!(matches!(
            Graph::price(2, 2, 0),
            Err(Error::BadGeneratorParams { n: 2, m: 2 })
        ));
        assert!(Graph::price(3, 0, 0).is_err());
    }

    #[test]
    fn price_smallest_instance() {
        let g = Graph::price(3, 2, 7).unwrap();
        assert_eq!(g.node_count(), 3);
        assert!(g.edge_count() >= 2);
        assert_eq!(g.degree_stats().components, 1);
        assert_simple_symmetric(&g);
    }

    #[test]
    fn price_mean_degree_near_2m() {
        let g = Graph::price(1000, 2, 42).unwrap();
        assert_simple_symmetric(&g);
        let mean = g.degree_stats().mean;
        assert!((3.9..=4.0).contains(&mean), "mean degree {mean}");
    }

    #[test]
    fn price_is_deterministic() {
        let a = Graph::price(500, 2, 9).unwrap();
        let b = Graph::price(500, 2, 9).unwrap();
        assert_eq!(a, b);
        let c = Graph::price(500, 2, 10).unwrap();
        assert_ne!(a, c);
    }

    /// Discrete maximum-likelihood estimate of a power-law tail exponent
    /// (Clauset-style continuous approximation with the -0.5 offset),
    /// restricted to degrees >= k_min.
    fn fit_tail_exponent(g: &Graph, k_min: usize) -> f64 {
        let tail: Vec<f64> = (0..g.node_count())
            .map(|i| g.degree(i) as f64)
            .filter(|&k| k >= k_min as f64)
            .collect();
        let sum_log: f64 = tail.iter().map(|&k| (k / (k_min as f64 - 0.5)).ln()).sum();
        1.0 + tail.len() as f64 / sum_log
    }

    #[test]
    fn price_degree_tail_is_power_law() {
        let g = Graph::price(1000, 2, 1).unwrap();
        let eta = fit_tail_exponent(&g, 4);
        assert!((2.5..=3.5).contains(&eta), "tail exponent {eta}");
    }

    #[test]
    fn eigenvalue_complete_k3() {
        let r = complete(3).largest_eigenvalue(1e-10, 10_000).unwrap();
        assert!((r.lambda_max - 2.0).abs() <= 1e-8, "{}", r.lambda_max);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn eigenvalue_star_is_sqrt_leaves() {
        // characteristic polynomial of a star with k leaves gives sqrt(k)
        let r = star(3).largest_eigenvalue(1e-10, 10_000).unwrap();
        assert!((r.lambda_max - 3.0_f64.sqrt()).abs() <= 1e-8, "{}", r.lambda_max);
        assert!(r.eigenvector.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn eigenvalue_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = g.largest_eigenvalue(1e-10, 10_000).unwrap();
        assert!((r.lambda_max - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn eigenvalue_edgeless_graph_is_zero() {
        let g = Graph::from_edges(5, &[]).unwrap();
        let r = g.largest_eigenvalue(1e-10, 10).unwrap();
        assert_eq!(r.lambda_max, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn eigenvalue_within_degree_bounds() {
        let g = Graph::price(300, 2, 3).unwrap();
        let stats = g.degree_stats();
        let r = g.largest_eigenvalue(1e-10, 10_000).unwrap();
        assert!(r.lambda_max >= stats.mean - 1e-9);
        assert!(r.lambda_max <= stats.max as f64 + 1e-9);
        // residual bound from the spec of SpectralResult
        let v = &r.eigenvector;
        for i in 0..g.node_count() {
            let av: f64 = g.neighbors(i).iter().map(|&j| v[j]).sum();
            assert!((av - r.lambda_max * v[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn eigenvalue_iteration_cap_reports_last_iterate() {
        match star(3).largest_eigenvalue(1e-12, 1) {
            Err(Error::PowerIterationDiverged {
                iterations: 1,
                residual,
                last_vector,
                ..
            }) => {
                assert!(residual > 1e-12);
                assert_eq!(last_vector.len(), 4);
            }
            other => panic!("expected divergence error, got {other:?}"),
        }
    }

    #[test]
    fn degree_stats_cases() {
        let s = complete(3).degree_stats();
        assert_eq!((s.mean, s.max, s.components), (2.0, 2, 1));
        assert_eq!(s.histogram, vec![0, 0, 3]);

        let s = star(3).degree_stats();
        assert_eq!((s.mean, s.max), (1.5, 3));
        assert_eq!(s.histogram, vec![0, 3, 0, 1]);

        let s = Graph::from_edges(5, &[]).unwrap().degree_stats();
        assert_eq!((s.mean, s.max, s.components), (0.0, 0, 5));
        assert_eq!(s.histogram, vec![5]);
    }

    #[test]
    fn ring_eigenvalue_is_two() {
        let r = ring(10).largest_eigenvalue(1e-10, 10_000).unwrap();
        assert!((r.lambda_max - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn induced_subgraph_interlacing() {
        let g = Graph::price(200, 2, 5).unwrap();
        let tol = 1e-9;
        let full = g.largest_eigenvalue(tol, 100_000).unwrap().lambda_max;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let keep: Vec<usize> = (0..200).filter(|_| rng.random::<f64>() < 0.6).collect();
            if keep.is_empty() {
                continue;
            }
            let sub = g.induced_subgraph(&keep).unwrap();
            let sub_lambda = sub.largest_eigenvalue(tol, 100_000).unwrap().lambda_max;
            assert!(
                sub_lambda <= full + 2.0 * tol,
                "subgraph {} > full {}",
                sub_lambda,
                full
            );
        }
    }

    #[test]
    fn edge_list_round_trip_preserves_bytes() {
        let dir = tempfile::tempdir().unwrap();
        // node 5 is isolated and must survive the round trip
        let g = Graph::from_edges(6, &[(0, 1), (2, 4), (1, 3)]).unwrap();
        let p1 = dir.path().join("a.edges");
        let p2 = dir.path().join("b.edges");
        g.write_edge_list(&p1).unwrap();
        let back = Graph::read_edge_list(&p1).unwrap();
        assert_eq!(g, back);
        back.write_edge_list(&p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap()
        );
    }

    #[test]
    fn edge_list_reads_plain_files_without_directive() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("plain.edges");
        std::fs::write(&p, "# a comment\n0 1\n\n2 1\n").unwrap();
        let g = Graph::read_edge_list(&p).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_reports_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.edges");
        std::fs::write(&p, "0 1\nnot numbers\n").unwrap();
        match Graph::read_edge_list(&p) {
            Err(Error::EdgeListParse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn constructed_graphs_are_simple_and_symmetric(
            n in 1usize..40,
            raw in proptest::collection::vec((0usize..40, 0usize..40), 0..120),
        ) {
            let edges: Vec<_> = raw
                .into_iter()
                .filter(|&(i, j)| i != j && i < n && j < n)
                .collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            assert_simple_symmetric(&g);
        }

        #[test]
        fn generated_graphs_are_simple_and_symmetric(
            n in 3usize..120,
            m in 1usize..3,
            seed in any::<u64>(),
        ) {
            prop_assume!(n > m);
            let g = Graph::price(n, m, seed).unwrap();
            assert_simple_symmetric(&g);
            prop_assert_eq!(g.node_count(), n);
        }
    }
}
