//! Edge inverses: the one-edge building blocks of a tower.
//!
//! An edge inverse sits over the unit interval subdivided into `m` pieces:
//! a graph whose vertices carry positions `0..=m`, every edge spanning
//! consecutive positions, with a measure that pushes forward to Lebesgue on
//! the interval and satisfies the same star-continuity condition as a full
//! projection step. Special inverses (disjoint strands of constant weight)
//! are classified by probability matrices with prescribed marginals; every
//! inverse is a quotient of its canonical special cover.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{unit_interval, EdgeId, MetricMeasureGraph, VertexId};
use crate::matrix::ProbabilityMatrix;
use crate::path_measure::{enumerate_lifts, omega, VertexPath};
use crate::rational::{self, format_rational, Rational};
use crate::step::Projection;

#[derive(Debug, Error, PartialEq)]
pub enum EdgeInverseError {
    #[error("position list has {got} entries for {want} vertices")]
    PositionArity { got: usize, want: usize },
    #[error("vertex {0} has position {1} outside 0..={2}")]
    PositionRange(u32, u32, u32),
    #[error("edge {0} spans positions {1} and {2}, which are not consecutive")]
    NotConsecutive(u32, u32, u32),
    #[error("fiber list over position {0} does not match the vertices found there")]
    FiberMismatch(u32),
    #[error("slab {0} has total measure {1} instead of 1/{2}")]
    SlabMeasure(u32, String, u32),
    #[error("vertex {0} at position {1} is missing an edge on the {2} side")]
    NotOpen(u32, u32, &'static str),
    #[error("vertex {0} has unequal star sums: {1} down vs {2} up")]
    StarMismatch(u32, String, String),
    #[error("matrix marginal for {0} {1} vanishes, endpoint weight would be zero")]
    ZeroMarginal(&'static str, usize),
    #[error("multiplicity at support cell ({0},{1}) must be positive")]
    BadMultiplicity(usize, usize),
    #[error("pinch position {0} must lie strictly inside 0..{1}")]
    BadPinch(u32, u32),
    #[error("distribution entries must be positive and sum to 1")]
    BadDistribution,
    #[error("identified items must be distinct")]
    IdentifySame,
    #[error("identified vertices must share an interior position; got {0} and {1}")]
    IdentifyVertexPosition(u32, u32),
    #[error("identified edges must lie over the same slab; got {0} and {1}")]
    IdentifySlab(u32, u32),
    #[error("slab-{0} edges may be identified only when they share the {1} endpoint")]
    IdentifyEndpoint(u32, &'static str),
    #[error("quotient broke validity: {0}")]
    QuotientBroke(String),
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// Which end(s) of the interval to pad with fresh degree-one edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadEnd {
    Left,
    Right,
    Both,
}

/// A pair of items over a common interior location to be identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identification {
    Vertices(VertexId, VertexId),
    Edges(EdgeId, EdgeId),
}

/// Old index -> new index maps describing one quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMaps {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
}

/// The quotient map from a special cover back onto the inverse it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMap {
    pub vertex_image: Vec<VertexId>,
    pub edge_image: Vec<EdgeId>,
}

impl CoverMap {
    pub fn is_bijective(&self, onto_vertices: u32, onto_edges: usize) -> bool {
        if self.vertex_image.len() != onto_vertices as usize
            || self.edge_image.len() != onto_edges
        {
            return false;
        }
        let mut seen_v = vec![false; onto_vertices as usize];
        for v in &self.vertex_image {
            if seen_v[v.index()] {
                return false;
            }
            seen_v[v.index()] = true;
        }
        let mut seen_e = vec![false; onto_edges];
        for e in &self.edge_image {
            if seen_e[e.index()] {
                return false;
            }
            seen_e[e.index()] = true;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInverse {
    pub m: u32,
    /// The carrier graph at unit scale: level 1, edges of length `1/m`,
    /// possibly disconnected.
    pub graph: MetricMeasureGraph,
    /// Vertex -> its position index in `0..=m` over the interval.
    pub position: Vec<u32>,
    /// Ordered fiber over position 0.
    pub left: Vec<VertexId>,
    /// Ordered fiber over position `m`.
    pub right: Vec<VertexId>,
}

impl EdgeInverse {
    pub fn new(
        m: u32,
        graph: MetricMeasureGraph,
        position: Vec<u32>,
        left: Vec<VertexId>,
        right: Vec<VertexId>,
    ) -> Result<Self, EdgeInverseError> {
        let inv = EdgeInverse {
            m,
            graph,
            position,
            left,
            right,
        };
        inv.validate()?;
        Ok(inv)
    }

    /// Checks the defining conditions exactly: consecutive-position edges,
    /// openness, Lebesgue pushforward per slab, and star continuity at
    /// interior positions.
    pub fn validate(&self) -> Result<(), EdgeInverseError> {
        let g = &self.graph;
        let m = self.m;
        if self.position.len() != g.vertex_count() as usize {
            return Err(EdgeInverseError::PositionArity {
                got: self.position.len(),
                want: g.vertex_count() as usize,
            });
        }
        for (v, &p) in self.position.iter().enumerate() {
            if p > m {
                return Err(EdgeInverseError::PositionRange(v as u32, p, m));
            }
        }
        for (side, pos, fiber) in [(0u32, 0u32, &self.left), (1, m, &self.right)] {
            let _ = side;
            let mut found: Vec<VertexId> = (0..g.vertex_count())
                .filter(|&v| self.position[v as usize] == pos)
                .map(VertexId)
                .collect();
            let mut listed = fiber.clone();
            found.sort_unstable();
            listed.sort_unstable();
            if found != listed {
                return Err(EdgeInverseError::FiberMismatch(pos));
            }
        }
        for (i, e) in g.edges().iter().enumerate() {
            let pa = self.position[e.ends[0].index()];
            let pb = self.position[e.ends[1].index()];
            if pa.abs_diff(pb) != 1 {
                return Err(EdgeInverseError::NotConsecutive(i as u32, pa, pb));
            }
        }
        // slab measures
        let want = rational::rat(1, m as i64);
        for slab in 0..m {
            let mut total = Rational::zero();
            for (i, _) in g.edges().iter().enumerate() {
                if self.slab(EdgeId(i as u32)) == slab {
                    total += &g.edge(EdgeId(i as u32)).measure;
                }
            }
            if total != want {
                return Err(EdgeInverseError::SlabMeasure(
                    slab,
                    format_rational(&total),
                    m,
                ));
            }
        }
        // openness and star continuity
        for v in 0..g.vertex_count() {
            let p = self.position[v as usize];
            let mut down = Rational::zero();
            let mut up = Rational::zero();
            let mut has_down = false;
            let mut has_up = false;
            for &e in g.incident(VertexId(v)) {
                let other = g.other_end(e, VertexId(v));
                if self.position[other.index()] < p {
                    has_down = true;
                    down += &g.edge(e).measure;
                } else {
                    has_up = true;
                    up += &g.edge(e).measure;
                }
            }
            if p > 0 && !has_down {
                return Err(EdgeInverseError::NotOpen(v, p, "lower"));
            }
            if p < m && !has_up {
                return Err(EdgeInverseError::NotOpen(v, p, "upper"));
            }
            if p > 0 && p < m && down != up {
                return Err(EdgeInverseError::StarMismatch(
                    v,
                    format_rational(&down),
                    format_rational(&up),
                ));
            }
        }
        Ok(())
    }

    /// Slab index of an edge: the lower of its two endpoint positions.
    pub fn slab(&self, e: EdgeId) -> u32 {
        let ends = self.graph.edge(e).ends;
        self.position[ends[0].index()].min(self.position[ends[1].index()])
    }

    /// The end of `e` at the lower position.
    pub fn lower_end(&self, e: EdgeId) -> VertexId {
        let ends = self.graph.edge(e).ends;
        if self.position[ends[0].index()] < self.position[ends[1].index()] {
            ends[0]
        } else {
            ends[1]
        }
    }

    pub fn upper_end(&self, e: EdgeId) -> VertexId {
        let lo = self.lower_end(e);
        self.graph.other_end(e, lo)
    }

    /// Disintegration weight of an interior point of `e`.
    pub fn edge_weight(&self, e: EdgeId) -> Rational {
        rational::int(self.m as i64) * &self.graph.edge(e).measure
    }

    /// Endpoint weights: the distributions on the left and right fibers.
    pub fn endpoint_weights(&self) -> (Vec<Rational>, Vec<Rational>) {
        let side = |fiber: &[VertexId]| -> Vec<Rational> {
            fiber
                .iter()
                .map(|&v| {
                    let mut total = Rational::zero();
                    for &e in self.graph.incident(v) {
                        total += &self.graph.edge(e).measure;
                    }
                    total * rational::int(self.m as i64)
                })
                .collect()
        };
        (side(&self.left), side(&self.right))
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    /// Whether every vertex of the given endpoint fiber has degree one.
    pub fn degree_one_end(&self, right: bool) -> bool {
        let fiber = if right { &self.right } else { &self.left };
        fiber.iter().all(|&v| self.graph.degree(v) == 1)
    }

    /// The single-strand inverse: the subdivided interval itself.
    pub fn identity(m: u32) -> Self {
        let edges = (0..m)
            .map(|k| (k, k + 1, rational::rat(1, m as i64)))
            .collect();
        let graph = MetricMeasureGraph::new_fragment(1, m, m + 1, edges).unwrap();
        EdgeInverse {
            m,
            graph,
            position: (0..=m).collect(),
            left: vec![VertexId(0)],
            right: vec![VertexId(m)],
        }
    }

    /// The special inverse of a probability matrix: `mult[s][t]` disjoint
    /// strands from left vertex `t` to right vertex `s`, each edge carrying
    /// `p[s][t] / (mult[s][t] * m)`. Endpoint weights are the marginals.
    pub fn special_from_matrix(
        p: &ProbabilityMatrix,
        mult: &[Vec<u32>],
        m: u32,
    ) -> Result<Self, EdgeInverseError> {
        let rows = p.rows();
        let cols = p.cols();
        for (s, r) in p.row_marginals().iter().enumerate() {
            if r.is_zero() {
                return Err(EdgeInverseError::ZeroMarginal("row", s));
            }
        }
        for (t, c) in p.col_marginals().iter().enumerate() {
            if c.is_zero() {
                return Err(EdgeInverseError::ZeroMarginal("column", t));
            }
        }
        let n_left = cols as u32;
        let n_right = rows as u32;
        let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
        let mut position: Vec<u32> = Vec::new();
        position.extend(std::iter::repeat_n(0u32, cols));
        position.extend(std::iter::repeat_n(m, rows));
        let mut next = n_left + n_right;
        let m_rat = rational::int(m as i64);
        for s in 0..rows {
            for t in 0..cols {
                let entry = &p.entries[s][t];
                if entry.is_zero() {
                    continue;
                }
                let c = mult
                    .get(s)
                    .and_then(|row| row.get(t))
                    .copied()
                    .unwrap_or(0);
                if c == 0 {
                    return Err(EdgeInverseError::BadMultiplicity(s, t));
                }
                let weight = entry / rational::int(c as i64);
                let measure = &weight / &m_rat;
                for _ in 0..c {
                    let mut prev = t as u32;
                    for k in 1..m {
                        position.push(k);
                        edges.push((prev, next, measure.clone()));
                        prev = next;
                        next += 1;
                    }
                    edges.push((prev, n_left + s as u32, measure.clone()));
                }
            }
        }
        let graph = MetricMeasureGraph::new_fragment(1, m, next, edges)?;
        EdgeInverse::new(
            m,
            graph,
            position,
            (0..n_left).map(VertexId).collect(),
            (n_left..n_left + n_right).map(VertexId).collect(),
        )
    }

    /// Product special inverse: full support with entries `d1[s] * d0[t]`,
    /// one strand per pair.
    pub fn parallel(
        d0: &[Rational],
        d1: &[Rational],
        m: u32,
    ) -> Result<Self, EdgeInverseError> {
        let p = ProbabilityMatrix::product(d1, d0)
            .map_err(|_| EdgeInverseError::BadDistribution)?;
        let mult = vec![vec![1u32; d0.len()]; d1.len()];
        Self::special_from_matrix(&p, &mult, m)
    }

    /// The pinched inverse: one strand per left vertex up to a single
    /// vertex over `pinch/m`, then one strand per right vertex. Connected,
    /// endpoint fibers of degree one; distinct pinches give combinatorially
    /// distinct inverses.
    pub fn wedge(
        m: u32,
        d0: &[Rational],
        d1: &[Rational],
        pinch: u32,
    ) -> Result<Self, EdgeInverseError> {
        if pinch == 0 || pinch >= m {
            return Err(EdgeInverseError::BadPinch(pinch, m));
        }
        for d in [d0, d1] {
            let total = d.iter().fold(Rational::zero(), |a, v| a + v);
            if !total.is_one() || d.iter().any(|v| *v <= Rational::zero()) {
                return Err(EdgeInverseError::BadDistribution);
            }
        }
        let n0 = d0.len() as u32;
        let n1 = d1.len() as u32;
        let hub = n0 + n1;
        let mut position: Vec<u32> = Vec::new();
        position.extend(std::iter::repeat_n(0u32, n0 as usize));
        position.extend(std::iter::repeat_n(m, n1 as usize));
        position.push(pinch);
        let mut next = hub + 1;
        let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
        let m_rat = rational::int(m as i64);
        for (s, w) in d0.iter().enumerate() {
            let measure = w / &m_rat;
            let mut prev = s as u32;
            for k in 1..pinch {
                position.push(k);
                edges.push((prev, next, measure.clone()));
                prev = next;
                next += 1;
            }
            edges.push((prev, hub, measure));
        }
        for (t, w) in d1.iter().enumerate() {
            let measure = w / &m_rat;
            let mut prev = hub;
            for k in pinch + 1..m {
                position.push(k);
                edges.push((prev, next, measure.clone()));
                prev = next;
                next += 1;
            }
            edges.push((prev, n0 + t as u32, measure));
        }
        let graph = MetricMeasureGraph::new_fragment(1, m, next, edges)?;
        EdgeInverse::new(
            m,
            graph,
            position,
            (0..n0).map(VertexId).collect(),
            (n0..n0 + n1).map(VertexId).collect(),
        )
    }

    /// Pads an end (or both) with fresh degree-one edges, producing an
    /// inverse at parameter `m+1` (or `m+2`) with the same endpoint
    /// weights.
    pub fn pad(&self, end: PadEnd) -> EdgeInverse {
        let mut out = self.clone();
        if matches!(end, PadEnd::Left | PadEnd::Both) {
            out = out.pad_one(false);
        }
        if matches!(end, PadEnd::Right | PadEnd::Both) {
            out = out.pad_one(true);
        }
        out
    }

    fn pad_one(&self, right: bool) -> EdgeInverse {
        let m_new = self.m + 1;
        let scale = rational::rat(self.m as i64, m_new as i64);
        let (d_left, d_right) = self.endpoint_weights();
        let fiber = if right { &self.right } else { &self.left };
        let dist = if right { &d_right } else { &d_left };
        let n_old = self.graph.vertex_count();
        let mut position: Vec<u32> = if right {
            self.position.clone()
        } else {
            self.position.iter().map(|&p| p + 1).collect()
        };
        let mut edges: Vec<(u32, u32, Rational)> = self
            .graph
            .edges()
            .iter()
            .map(|e| (e.ends[0].0, e.ends[1].0, &e.measure * &scale))
            .collect();
        let mut fresh: Vec<VertexId> = Vec::with_capacity(fiber.len());
        for (i, &v) in fiber.iter().enumerate() {
            let id = n_old + i as u32;
            position.push(if right { m_new } else { 0 });
            edges.push((v.0, id, &dist[i] / rational::int(m_new as i64)));
            fresh.push(VertexId(id));
        }
        let graph =
            MetricMeasureGraph::new_fragment(1, m_new, n_old + fiber.len() as u32, edges)
                .expect("padded graph is valid");
        let (left, right_fiber) = if right {
            (self.left.clone(), fresh)
        } else {
            (fresh, self.right.clone())
        };
        let out = EdgeInverse {
            m: m_new,
            graph,
            position,
            left,
            right: right_fiber,
        };
        debug_assert!(out.validate().is_ok());
        out
    }

    /// Identifies a pair of vertices over a common interior position, or a
    /// pair of edges over a common slab (boundary slabs require the shared
    /// outer endpoint), pushing the measure forward. The result is
    /// revalidated.
    pub fn quotient(
        &self,
        ident: Identification,
    ) -> Result<(EdgeInverse, QuotientMaps), EdgeInverseError> {
        match ident {
            Identification::Vertices(a, b) => {
                if a == b {
                    return Err(EdgeInverseError::IdentifySame);
                }
                let (pa, pb) = (self.position[a.index()], self.position[b.index()]);
                if pa != pb || pa == 0 || pa == self.m {
                    return Err(EdgeInverseError::IdentifyVertexPosition(pa, pb));
                }
                self.rebuild(&[(a, b)], &[])
            }
            Identification::Edges(e1, e2) => {
                if e1 == e2 {
                    return Err(EdgeInverseError::IdentifySame);
                }
                let (s1, s2) = (self.slab(e1), self.slab(e2));
                if s1 != s2 {
                    return Err(EdgeInverseError::IdentifySlab(s1, s2));
                }
                let (l1, l2) = (self.lower_end(e1), self.lower_end(e2));
                let (u1, u2) = (self.upper_end(e1), self.upper_end(e2));
                if s1 == 0 && l1 != l2 {
                    return Err(EdgeInverseError::IdentifyEndpoint(s1, "left"));
                }
                if s1 == self.m - 1 && u1 != u2 {
                    return Err(EdgeInverseError::IdentifyEndpoint(s1, "right"));
                }
                let mut vertex_pairs = Vec::new();
                if l1 != l2 {
                    vertex_pairs.push((l1, l2));
                }
                if u1 != u2 {
                    vertex_pairs.push((u1, u2));
                }
                self.rebuild(&vertex_pairs, &[(e1, e2)])
            }
        }
    }

    /// Rebuilds the inverse after merging vertex pairs (second into first)
    /// and edge pairs (second into first, measures added).
    fn rebuild(
        &self,
        vertex_pairs: &[(VertexId, VertexId)],
        edge_pairs: &[(EdgeId, EdgeId)],
    ) -> Result<(EdgeInverse, QuotientMaps), EdgeInverseError> {
        let nv = self.graph.vertex_count() as usize;
        // union targets: every vertex points at its representative
        let mut repr: Vec<u32> = (0..nv as u32).collect();
        for &(a, b) in vertex_pairs {
            let ra = repr[a.index()];
            let rb = repr[b.index()];
            let (keep, drop) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            for r in repr.iter_mut() {
                if *r == drop {
                    *r = keep;
                }
            }
        }
        // compact vertex ids
        let mut new_id: Vec<Option<u32>> = vec![None; nv];
        let mut count = 0u32;
        for v in 0..nv {
            let r = repr[v] as usize;
            if new_id[r].is_none() {
                new_id[r] = Some(count);
                count += 1;
            }
            new_id[v] = new_id[r];
        }
        let vertex_map: Vec<VertexId> =
            (0..nv).map(|v| VertexId(new_id[v].unwrap())).collect();
        let mut position = vec![0u32; count as usize];
        for v in 0..nv {
            position[vertex_map[v].index()] = self.position[v];
        }
        // merge edges: representative edge gathers merged measures
        let ne = self.graph.edge_count();
        let mut edge_repr: Vec<usize> = (0..ne).collect();
        for &(a, b) in edge_pairs {
            let ra = edge_repr[a.index()];
            let rb = edge_repr[b.index()];
            let (keep, drop) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            for r in edge_repr.iter_mut() {
                if *r == drop {
                    *r = keep;
                }
            }
        }
        let mut new_edge_id: Vec<Option<u32>> = vec![None; ne];
        let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
        for e in 0..ne {
            let r = edge_repr[e];
            if new_edge_id[r].is_none() {
                let ends = self.graph.edge(EdgeId(r as u32)).ends;
                new_edge_id[r] = Some(edges.len() as u32);
                edges.push((
                    vertex_map[ends[0].index()].0,
                    vertex_map[ends[1].index()].0,
                    Rational::zero(),
                ));
            }
            let idx = new_edge_id[r].unwrap() as usize;
            edges[idx].2 += &self.graph.edge(EdgeId(e as u32)).measure;
            new_edge_id[e] = new_edge_id[r];
        }
        let edge_map: Vec<EdgeId> = (0..ne).map(|e| EdgeId(new_edge_id[e].unwrap())).collect();
        let graph = MetricMeasureGraph::new_fragment(1, self.m, count, edges)?;
        let left = self
            .left
            .iter()
            .map(|&v| vertex_map[v.index()])
            .collect::<Vec<_>>();
        let right = self
            .right
            .iter()
            .map(|&v| vertex_map[v.index()])
            .collect::<Vec<_>>();
        let out = EdgeInverse {
            m: self.m,
            graph,
            position,
            left,
            right,
        };
        out.validate()
            .map_err(|e| EdgeInverseError::QuotientBroke(e.to_string()))?;
        Ok((
            out,
            QuotientMaps {
                vertex_map,
                edge_map,
            },
        ))
    }

    /// The edge inverse as a projection step over the unit interval, for
    /// the lift-measure machinery.
    pub fn to_projection(&self) -> Result<Projection, crate::step::StepError> {
        let base = unit_interval(self.m);
        let target = base.subdivide();
        let vertex_map = self
            .position
            .iter()
            .map(|&p| target.position_vertex(&base, EdgeId(0), p))
            .collect();
        let edge_map = (0..self.graph.edge_count())
            .map(|e| target.sub_edge(EdgeId(0), self.slab(EdgeId(e as u32))))
            .collect();
        Projection::new(self.graph.clone(), target, vertex_map, edge_map)
    }

    /// The canonical special cover: one strand per lift of the whole
    /// subdivided interval, weighted by the lift measure, glued along
    /// shared lift endpoints. The returned map pushes the cover's measure
    /// onto this inverse exactly and restricts to a bijection on the
    /// endpoint fibers.
    pub fn special_cover(&self) -> Result<(EdgeInverse, CoverMap), EdgeInverseError> {
        let step = self
            .to_projection()
            .map_err(|e| EdgeInverseError::QuotientBroke(e.to_string()))?;
        let base = unit_interval(self.m);
        let target = base.subdivide();
        let path_vertices: Vec<VertexId> = (0..=self.m)
            .map(|p| target.position_vertex(&base, EdgeId(0), p))
            .collect();
        let path = VertexPath::from_vertices(&target.graph, path_vertices)
            .expect("interval path is unambiguous");
        let lifts = enumerate_lifts(&step, &path);
        let lm = omega(&step, &path).map_err(|e| EdgeInverseError::QuotientBroke(e.to_string()))?;
        let m = self.m;
        let n_left = self.left.len() as u32;
        let n_right = self.right.len() as u32;
        let mut position: Vec<u32> = Vec::new();
        position.extend(std::iter::repeat_n(0u32, n_left as usize));
        position.extend(std::iter::repeat_n(m, n_right as usize));
        let mut vertex_image: Vec<VertexId> = Vec::new();
        vertex_image.extend(self.left.iter().copied());
        vertex_image.extend(self.right.iter().copied());
        let mut edges: Vec<(u32, u32, Rational)> = Vec::new();
        let mut edge_image: Vec<EdgeId> = Vec::new();
        let mut next = n_left + n_right;
        let m_rat = rational::int(m as i64);
        for (lift, weight) in lifts.iter().zip(lm.omega.iter()) {
            let verts = lift.vertices(&self.graph);
            let start_idx = self
                .left
                .iter()
                .position(|&v| v == verts[0])
                .expect("lift starts on the left fiber") as u32;
            let end_idx = self
                .right
                .iter()
                .position(|&v| v == *verts.last().unwrap())
                .expect("lift ends on the right fiber") as u32;
            let measure = weight / &m_rat;
            let mut prev = start_idx;
            for k in 1..m {
                position.push(k);
                vertex_image.push(verts[k as usize]);
                edges.push((prev, next, measure.clone()));
                edge_image.push(lift.steps[(k - 1) as usize].0);
                prev = next;
                next += 1;
            }
            edges.push((prev, n_left + end_idx, measure));
            edge_image.push(lift.steps[(m - 1) as usize].0);
        }
        let graph = MetricMeasureGraph::new_fragment(1, m, next, edges)?;
        let cover = EdgeInverse::new(
            m,
            graph,
            position,
            (0..n_left).map(VertexId).collect(),
            (n_left..n_left + n_right).map(VertexId).collect(),
        )?;
        Ok((
            cover,
            CoverMap {
                vertex_image,
                edge_image,
            },
        ))
    }

    /// Collapses a cover back to the inverse it covers by a chain of
    /// quotient operations: vertices with equal image at each interior
    /// position first, then edges with equal image per slab. Returns the
    /// final inverse and composed map; the map is bijective when the cover
    /// really came from `special_cover` of the same inverse.
    pub fn quotient_chain(
        cover: &EdgeInverse,
        map: &CoverMap,
    ) -> Result<(EdgeInverse, CoverMap), EdgeInverseError> {
        let mut cur = cover.clone();
        let mut cur_map = map.clone();
        loop {
            let mut action: Option<Identification> = None;
            'vertex_scan: for a in 0..cur.graph.vertex_count() {
                let pa = cur.position[a as usize];
                if pa == 0 || pa == cur.m {
                    continue;
                }
                for b in a + 1..cur.graph.vertex_count() {
                    if cur.position[b as usize] == pa
                        && cur_map.vertex_image[a as usize] == cur_map.vertex_image[b as usize]
                    {
                        action = Some(Identification::Vertices(VertexId(a), VertexId(b)));
                        break 'vertex_scan;
                    }
                }
            }
            if action.is_none() {
                'edge_scan: for a in 0..cur.graph.edge_count() {
                    for b in a + 1..cur.graph.edge_count() {
                        if cur_map.edge_image[a] == cur_map.edge_image[b]
                            && cur.slab(EdgeId(a as u32)) == cur.slab(EdgeId(b as u32))
                        {
                            action =
                                Some(Identification::Edges(EdgeId(a as u32), EdgeId(b as u32)));
                            break 'edge_scan;
                        }
                    }
                }
            }
            let Some(ident) = action else { break };
            let (next, maps) = cur.quotient(ident)?;
            let mut vertex_image = vec![VertexId(0); next.graph.vertex_count() as usize];
            for (old, &new) in maps.vertex_map.iter().enumerate() {
                vertex_image[new.index()] = cur_map.vertex_image[old];
            }
            let mut edge_image = vec![EdgeId(0); next.graph.edge_count()];
            for (old, &new) in maps.edge_map.iter().enumerate() {
                edge_image[new.index()] = cur_map.edge_image[old];
            }
            cur = next;
            cur_map = CoverMap {
                vertex_image,
                edge_image,
            };
        }
        Ok((cur, cur_map))
    }

    /// Whether the cover map realizes an isomorphism (bijective, position
    /// preserving, measure preserving, endpoint order preserving) onto
    /// `original`.
    pub fn map_is_isomorphism(&self, original: &EdgeInverse, map: &CoverMap) -> bool {
        if !map.is_bijective(original.graph.vertex_count(), original.graph.edge_count()) {
            return false;
        }
        for (v, &img) in map.vertex_image.iter().enumerate() {
            if self.position[v] != original.position[img.index()] {
                return false;
            }
        }
        for (e, &img) in map.edge_image.iter().enumerate() {
            let mine = self.graph.edge(EdgeId(e as u32));
            let theirs = original.graph.edge(img);
            if mine.measure != theirs.measure {
                return false;
            }
            let mut a = [
                map.vertex_image[mine.ends[0].index()],
                map.vertex_image[mine.ends[1].index()],
            ];
            a.sort_unstable();
            if a != theirs.ends {
                return false;
            }
        }
        self.left
            .iter()
            .zip(original.left.iter())
            .all(|(&v, &w)| map.vertex_image[v.index()] == w)
            && self
                .right
                .iter()
                .zip(original.right.iter())
                .all(|(&v, &w)| map.vertex_image[v.index()] == w)
    }
}
