//! Deterministic builders for the equilibrium instance families: cycles
//! with successor ownership, the stretched d-dimensional torus (closed
//! and open variants), and a fixed high-girth cubic fixture.
//!
//! Torus vertices are named by integer coordinate tuples. Intersection
//! vertices sit at `(l*a_1, ..., l*a_d)` with all `a_i` of equal parity;
//! each is joined to the `2^d` diagonal neighbors `(x_1 +- l, ..., x_d +- l)`
//! by a path of `l` edges whose interior vertices interpolate the
//! coordinates one step at a time. In the closed variant coordinate `i`
//! is taken modulo `2*delta_i*l`.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::OwnedGraph;

#[derive(Debug, Error, PartialEq)]
pub enum ConstructionError {
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),
    #[error("invalid torus parameters: {0}")]
    Param(String),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(Vec<i64>),
    #[error("need 1 < alpha <= k, got alpha = {alpha}, k = {k}")]
    AlphaOutOfRange { alpha: f64, k: usize },
    #[error("vertex {0} is not an intersection vertex")]
    NotIntersection(usize),
}

/// Cycle on `n >= 3` vertices; player `i` owns the edge to `(i + 1) % n`.
pub fn build_cycle(n: usize) -> Result<OwnedGraph, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::CycleTooSmall(n));
    }
    let mut g = OwnedGraph::new(n);
    for i in 0..n {
        g.add_edge(i, (i + 1) % n, i).unwrap();
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusParams {
    /// Number of dimensions, at least 2.
    pub d: usize,
    /// Stretch: every lattice edge becomes a path of `ell >= 2` edges.
    pub ell: usize,
    /// Side lengths `delta_1 ... delta_d`, each at least 2.
    pub deltas: Vec<usize>,
}

impl TorusParams {
    pub fn new(d: usize, ell: usize, deltas: Vec<usize>) -> Result<Self, ConstructionError> {
        let p = TorusParams { d, ell, deltas };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.d < 2 {
            return Err(ConstructionError::Param(format!(
                "need at least 2 dimensions, got {}",
                self.d
            )));
        }
        if self.ell < 2 {
            return Err(ConstructionError::Param(format!(
                "stretch ell must be at least 2, got {}",
                self.ell
            )));
        }
        if self.deltas.len() != self.d {
            return Err(ConstructionError::Param(format!(
                "expected {} side lengths, got {}",
                self.d,
                self.deltas.len()
            )));
        }
        if let Some(bad) = self.deltas.iter().find(|&&x| x < 2) {
            return Err(ConstructionError::Param(format!(
                "side lengths must be at least 2, got {}",
                bad
            )));
        }
        Ok(())
    }

    /// Closed-variant intersection-vertex count `2 * prod(delta_i)`.
    pub fn intersection_count(&self) -> usize {
        2 * self.deltas.iter().product::<usize>()
    }

    /// Closed-variant total vertex count `N * (2^(d-1) * (ell-1) + 1)`.
    pub fn vertex_count(&self) -> usize {
        self.intersection_count() * ((1 << (self.d - 1)) * (self.ell - 1) + 1)
    }
}

/// Torus parameters realizing an equilibrium for a given `alpha` and `k`:
/// `ell = ceil(alpha)`, `d = ceil(log2(k/ell + 2))`, the first `d - 1`
/// sides fixed to `ceil(k/ell) + 1`, and the last side a free size target
/// (validated to be no smaller than the others).
pub fn torus_params_for(alpha: f64, k: usize, delta_d: usize) -> Result<TorusParams, ConstructionError> {
    if !(alpha > 1.0) || alpha > k as f64 {
        return Err(ConstructionError::AlphaOutOfRange { alpha, k });
    }
    let ell = alpha.ceil() as usize;
    let d = ((k as f64 / ell as f64) + 2.0).log2().ceil() as usize;
    let delta_1 = k.div_ceil(ell) + 1;
    if delta_d < delta_1 {
        return Err(ConstructionError::Param(format!(
            "last side {} must be at least {}",
            delta_d, delta_1
        )));
    }
    let mut deltas = vec![delta_1; d - 1];
    deltas.push(delta_d);
    TorusParams::new(d, ell, deltas)
}

/// A built torus: the owned graph plus the coordinate labeling.
/// Intersection vertices occupy ids `0..intersection_count()`.
#[derive(Debug, Clone)]
pub struct TorusGraph {
    pub graph: OwnedGraph,
    params: TorusParams,
    wrapped: bool,
    labels: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    intersections: usize,
}

impl TorusGraph {
    pub fn params(&self) -> &TorusParams {
        &self.params
    }

    pub fn is_wrapped(&self) -> bool {
        self.wrapped
    }

    pub fn intersection_count(&self) -> usize {
        self.intersections
    }

    pub fn is_intersection(&self, v: usize) -> bool {
        v < self.intersections
    }

    pub fn coords(&self, v: usize) -> &[i64] {
        &self.labels[v]
    }

    /// Vertex id of a coordinate tuple (normalized first when wrapped).
    pub fn vertex_at(&self, coords: &[i64]) -> Option<usize> {
        let key = if self.wrapped {
            self.normalize(coords)
        } else {
            coords.to_vec()
        };
        self.index.get(&key).copied()
    }

    fn modulus(&self, dim: usize) -> i64 {
        2 * self.params.deltas[dim] as i64 * self.params.ell as i64
    }

    fn normalize(&self, coords: &[i64]) -> Vec<i64> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &x)| x.rem_euclid(self.modulus(i)))
            .collect()
    }

    /// Coordinate lower bound on the graph distance between two vertices:
    /// `max_i min(|dx_i|, modulus_i - |dx_i|)` when wrapped, `max_i |dx_i|`
    /// otherwise. Every edge changes every coordinate by exactly one.
    pub fn distance_bound(&self, x: usize, y: usize) -> usize {
        let (a, b) = (&self.labels[x], &self.labels[y]);
        (0..self.params.d)
            .map(|i| {
                let diff = (a[i] - b[i]).abs();
                if self.wrapped {
                    diff.min(self.modulus(i) - diff) as usize
                } else {
                    diff as usize
                }
            })
            .max()
            .unwrap()
    }

    /// The `2^d` vertices `(x_1 +- h, ..., x_d +- h)` reached from an
    /// intersection vertex by moving `h` steps with a fixed sign per
    /// coordinate; sorted and deduplicated. In the open variant,
    /// out-of-range combinations are omitted.
    pub fn f_set(&self, v: usize, h: usize) -> Result<Vec<usize>, ConstructionError> {
        if !self.is_intersection(v) {
            return Err(ConstructionError::NotIntersection(v));
        }
        let x = self.labels[v].clone();
        let mut out = std::collections::BTreeSet::new();
        for mask in 0..(1usize << self.params.d) {
            let coords: Vec<i64> = x
                .iter()
                .enumerate()
                .map(|(i, &xi)| {
                    if mask >> i & 1 == 1 {
                        xi + h as i64
                    } else {
                        xi - h as i64
                    }
                })
                .collect();
            if let Some(id) = self.vertex_at(&coords) {
                out.insert(id);
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// Stretched torus with modular coordinates. Interior path vertices own
/// the edge towards their predecessor on the path oriented from the
/// lexicographically smaller endpoint; the last interior vertex also owns
/// the edge to the far endpoint. Intersection vertices own nothing.
pub fn build_torus(params: &TorusParams) -> Result<TorusGraph, ConstructionError> {
    build_torus_impl(params, true)
}

/// Non-modular variant: lattice positions range over `1..=delta_i` and
/// intersection vertices are joined only when every coordinate differs by
/// exactly `ell`.
pub fn build_open_torus(params: &TorusParams) -> Result<TorusGraph, ConstructionError> {
    build_torus_impl(params, false)
}

fn build_torus_impl(params: &TorusParams, wrapped: bool) -> Result<TorusGraph, ConstructionError> {
    params.validate()?;
    let d = params.d;
    let ell = params.ell as i64;

    // Intersection vertices: all lattice tuples of uniform parity.
    let mut inter: Vec<Vec<i64>> = Vec::new();
    let mut stack: Vec<i64> = Vec::with_capacity(d);
    collect_lattice(params, wrapped, 0, &mut stack, &mut inter);
    inter.sort();
    inter.dedup_by(|a, b| a == b);

    let mut labels = inter;
    let mut index: HashMap<Vec<i64>, usize> = labels
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    if index.len() != labels.len() {
        return Err(ConstructionError::Param("lattice labels collide".into()));
    }
    let intersections = labels.len();
    if wrapped && intersections != params.intersection_count() {
        return Err(ConstructionError::Param(format!(
            "expected {} intersection vertices, built {}",
            params.intersection_count(),
            intersections
        )));
    }

    let moduli: Vec<i64> = (0..d)
        .map(|i| 2 * params.deltas[i] as i64 * ell)
        .collect();
    let norm = |coords: &[i64]| -> Vec<i64> {
        if wrapped {
            coords
                .iter()
                .zip(&moduli)
                .map(|(&x, &m)| x.rem_euclid(m))
                .collect()
        } else {
            coords.to_vec()
        }
    };

    // Paths, each discovered from its lexicographically smaller endpoint.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for v in 0..intersections {
        let x = labels[v].clone();
        for mask in 0..(1usize << d) {
            let sign = |i: usize| if mask >> i & 1 == 1 { 1i64 } else { -1i64 };
            let far: Vec<i64> = (0..d).map(|i| x[i] + sign(i) * ell).collect();
            let far = norm(&far);
            let far_id = match index.get(&far) {
                Some(&id) => id,
                None => {
                    if wrapped {
                        return Err(ConstructionError::Param(format!(
                            "missing lattice neighbor {:?}",
                            far
                        )));
                    }
                    continue; // open variant: neighbor outside the range
                }
            };
            if labels[v] >= far {
                continue; // the smaller endpoint generates this path
            }
            let mut seq = vec![v];
            for j in 1..ell {
                let coords: Vec<i64> = (0..d).map(|i| x[i] + sign(i) * j).collect();
                let coords = norm(&coords);
                if index.contains_key(&coords) {
                    return Err(ConstructionError::DuplicateLabel(coords));
                }
                let id = labels.len();
                index.insert(coords.clone(), id);
                labels.push(coords);
                seq.push(id);
            }
            seq.push(far_id);
            let last_interior = seq[ell as usize - 1];
            for j in 1..=ell as usize {
                let owner = if j < ell as usize { seq[j] } else { last_interior };
                edges.push((seq[j - 1], seq[j], owner));
            }
        }
    }

    let mut graph = OwnedGraph::new(labels.len());
    for (a, b, owner) in edges {
        graph
            .add_edge(a, b, owner)
            .map_err(|e| ConstructionError::Param(format!("edge conflict: {}", e)))?;
    }
    if wrapped && graph.n() != params.vertex_count() {
        return Err(ConstructionError::Param(format!(
            "expected {} vertices, built {}",
            params.vertex_count(),
            graph.n()
        )));
    }

    Ok(TorusGraph {
        graph,
        params: params.clone(),
        wrapped,
        labels,
        index,
        intersections,
    })
}

fn collect_lattice(
    params: &TorusParams,
    wrapped: bool,
    dim: usize,
    stack: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if dim == params.d {
        out.push(stack.iter().map(|&a| a * params.ell as i64).collect());
        return;
    }
    let range: Vec<i64> = if wrapped {
        (0..2 * params.deltas[dim] as i64).collect()
    } else {
        (1..=params.deltas[dim] as i64).collect()
    };
    for a in range {
        if dim > 0 && (a - stack[0]).rem_euclid(2) != 0 {
            continue; // all lattice coordinates share one parity
        }
        stack.push(a);
        collect_lattice(params, wrapped, dim + 1, stack, out);
        stack.pop();
    }
}

/// The 14-vertex, 21-edge, 3-regular, girth-6 fixture: a 14-cycle plus
/// the chords `(i, i + 5)` for even `i`. Every vertex owns its successor
/// edge on the cycle and even vertices also own their chord, so nobody
/// owns more than two edges.
pub fn heawood() -> OwnedGraph {
    let mut g = OwnedGraph::new(14);
    for i in 0..14 {
        g.add_edge(i, (i + 1) % 14, i).unwrap();
    }
    for i in (0..14).step_by(2) {
        g.add_edge(i, (i + 5) % 14, i).unwrap();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::view::View;

    fn fig2_params() -> TorusParams {
        TorusParams::new(2, 2, vec![3, 4]).unwrap()
    }

    #[test]
    fn cycle_triangle() {
        let g = build_cycle(3).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.owner(0, 1).unwrap(), 0);
        assert_eq!(g.owner(1, 2).unwrap(), 1);
        assert_eq!(g.owner(2, 0).unwrap(), 2);
        assert_eq!(build_cycle(2), Err(ConstructionError::CycleTooSmall(2)));
    }

    #[test]
    fn cycle_everyone_owns_one_edge() {
        let g = build_cycle(10).unwrap();
        for u in 0..10 {
            assert_eq!(g.bought_count(u), 1);
        }
    }

    #[test]
    fn torus_counts_match_closed_forms() {
        let t = build_torus(&fig2_params()).unwrap();
        assert_eq!(t.intersection_count(), 24);
        assert_eq!(t.graph.n(), 72);
        assert_eq!(t.graph.edge_count(), 24 * 4 / 2 * 2); // N * 2^d / 2 paths of ell edges

        let fig1 = TorusParams::new(2, 2, vec![15, 5]).unwrap();
        let t = build_torus(&fig1).unwrap();
        assert_eq!(t.intersection_count(), 150);
        assert_eq!(t.graph.n(), 450);

        let p3 = TorusParams::new(3, 3, vec![2, 2, 3]).unwrap();
        let t = build_torus(&p3).unwrap();
        assert_eq!(t.intersection_count(), p3.intersection_count());
        assert_eq!(t.graph.n(), p3.vertex_count());
    }

    #[test]
    fn torus_parameter_validation() {
        assert!(TorusParams::new(1, 2, vec![3]).is_err());
        assert!(TorusParams::new(2, 1, vec![3, 3]).is_err());
        assert!(TorusParams::new(2, 2, vec![3]).is_err());
        assert!(TorusParams::new(2, 2, vec![1, 3]).is_err());
    }

    #[test]
    fn torus_ownership_pattern() {
        let t = build_torus(&fig2_params()).unwrap();
        for v in 0..t.graph.n() {
            if t.is_intersection(v) {
                assert_eq!(t.graph.degree(v), 4);
                assert_eq!(t.graph.bought_count(v), 0);
            } else {
                assert_eq!(t.graph.degree(v), 2);
                // ell = 2: the single interior vertex owns both path edges
                assert_eq!(t.graph.bought_count(v), 2);
            }
        }
    }

    #[test]
    fn torus_ownership_pattern_stretched() {
        let t = build_torus(&TorusParams::new(2, 3, vec![2, 2]).unwrap()).unwrap();
        let mut owns_one = 0;
        let mut owns_two = 0;
        for v in 0..t.graph.n() {
            if t.is_intersection(v) {
                assert_eq!(t.graph.bought_count(v), 0);
            } else {
                match t.graph.bought_count(v) {
                    1 => owns_one += 1,
                    2 => owns_two += 1,
                    other => panic!("interior vertex owning {} edges", other),
                }
            }
        }
        // ell = 3: each path has one plain interior and one double owner.
        assert_eq!(owns_one, owns_two);
        assert!(owns_two > 0);
    }

    #[test]
    fn torus_distances_respect_coordinate_bound() {
        let t = build_torus(&fig2_params()).unwrap();
        for x in 0..t.graph.n() {
            let dist = t.graph.bfs_distances(x);
            for y in 0..t.graph.n() {
                let d = dist[y].expect("torus is connected");
                assert!(
                    d >= t.distance_bound(x, y),
                    "pair ({}, {}): distance {} below bound {}",
                    x,
                    y,
                    d,
                    t.distance_bound(x, y)
                );
            }
        }
    }

    #[test]
    fn torus_diameter_at_least_stretched_side() {
        let t = build_torus(&fig2_params()).unwrap();
        let ell_delta_d = 2 * 4;
        assert!(t.graph.diameter().unwrap() >= ell_delta_d);
    }

    #[test]
    fn f_set_has_full_size_and_exact_distances() {
        let t = build_torus(&fig2_params()).unwrap();
        let origin = t.vertex_at(&[0, 0]).unwrap();
        for h in 1..=4 {
            let f = t.f_set(origin, h).unwrap();
            assert_eq!(f.len(), 4, "|F^{}| should be 2^d", h);
            let dist = t.graph.bfs_distances(origin);
            for &y in &f {
                assert_eq!(dist[y], Some(h));
            }
        }
        let interior = t.intersection_count(); // first non-intersection id
        assert_eq!(
            t.f_set(interior, 1),
            Err(ConstructionError::NotIntersection(interior))
        );
    }

    #[test]
    fn open_torus_small_fragment() {
        let t = build_open_torus(&TorusParams::new(2, 2, vec![2, 2]).unwrap()).unwrap();
        // Lattice points (1,1) and (2,2) joined by a single stretched path.
        assert_eq!(t.intersection_count(), 2);
        assert_eq!(t.graph.n(), 3);
        assert_eq!(t.graph.edge_count(), 2);
        for x in 0..t.graph.n() {
            let dist = t.graph.bfs_distances(x);
            for y in 0..t.graph.n() {
                assert!(dist[y].unwrap() >= t.distance_bound(x, y));
            }
        }
    }

    #[test]
    fn intersection_view_layers() {
        // View of the lattice vertex (k*, k*) = (4, 4) at k = 4 in the
        // d=2, ell=2, delta=(3,4) graph. Hand enumeration of the diagonal
        // layers: 4 path interiors at distance 1, their 4 far endpoints
        // at 2, 3 fresh interiors behind each of those at 3, and 8
        // distinct lattice vertices at 4 (each shared by two paths).
        let t = build_torus(&fig2_params()).unwrap();
        let u = t.vertex_at(&[4, 4]).unwrap();
        assert!(t.is_intersection(u));
        let v = View::build(&t.graph, u, 4);
        assert_eq!(v.len(), 29);
        let mut per_dist = [0usize; 5];
        for i in 0..v.len() {
            per_dist[v.dist(i)] += 1;
        }
        assert_eq!(per_dist, [1, 4, 4, 12, 8]);
        assert_eq!(v.frontier().len(), 8);
    }

    #[test]
    fn closed_views_match_open_ball_growth() {
        // Small-radius views of the closed torus do not feel the wrap:
        // enlarging both sides must not change the view size around an
        // intersection vertex.
        let small = build_torus(&fig2_params()).unwrap();
        let big = build_torus(&TorusParams::new(2, 2, vec![7, 8]).unwrap()).unwrap();
        let vs = View::build(&small.graph, small.vertex_at(&[4, 4]).unwrap(), 4);
        let vb = View::build(&big.graph, big.vertex_at(&[4, 4]).unwrap(), 4);
        assert_eq!(vs.len(), vb.len());
    }

    #[test]
    fn params_for_matches_formulas() {
        let p = torus_params_for(2.0, 4, 4).unwrap();
        assert_eq!((p.ell, p.d), (2, 2));
        assert_eq!(p.deltas, vec![3, 4]);

        let p = torus_params_for(1.5, 3, 3).unwrap();
        assert_eq!((p.ell, p.d), (2, 2));
        assert_eq!(p.deltas, vec![3, 3]);

        assert_eq!(
            torus_params_for(5.0, 4, 9),
            Err(ConstructionError::AlphaOutOfRange { alpha: 5.0, k: 4 })
        );
        assert!(torus_params_for(2.0, 4, 2).is_err()); // last side too small
    }

    /// Independent girth oracle: BFS from every vertex, taking the best
    /// cycle closure over non-tree edges. The minimum over all roots is
    /// exact because a root on a shortest cycle closes it without
    /// overlap.
    fn girth_oracle(g: &OwnedGraph) -> Option<usize> {
        let n = g.n();
        let mut best: Option<usize> = None;
        for root in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[root] = 0;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &y in g.neighbors(x) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        queue.push_back(y);
                    } else if parent[x] != y {
                        let c = dist[x] + dist[y] + 1;
                        best = Some(best.map_or(c, |b| b.min(c)));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn heawood_fixture_shape() {
        let g = heawood();
        assert_eq!(g.n(), 14);
        assert_eq!(g.edge_count(), 21);
        for v in 0..14 {
            assert_eq!(g.degree(v), 3);
            assert!(g.bought_count(v) <= 2);
        }
        assert_eq!(g.girth(), Some(6));
        assert_eq!(girth_oracle(&g), Some(6));
    }

    #[test]
    fn heawood_views_are_full_binary_trees() {
        let g = heawood();
        for v in 0..14 {
            let view = View::build(&g, v, 2);
            assert_eq!(view.len(), 10); // 1 + 3 + 6
            assert_eq!(view.graph().edge_count(), 9); // a tree
        }
    }
}
