//! Metric measure graphs: one level of a tower.
//!
//! Every edge of a level-`i` graph is isometric to an interval of length
//! `m^-i` and carries a strictly positive rational measure (constant density
//! along the edge). Parallel edges are allowed and keep distinct identities;
//! self-loops are not. Graphs are immutable after construction.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{self, neg_pow, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Stored with `ends[0] <= ends[1]`; the ordering is storage only,
    /// never semantic. Self-loops are rejected, so the ends are distinct.
    pub ends: [VertexId; 2],
    pub measure: Rational,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {0} is a self-loop at vertex {1}")]
    SelfLoop(usize, u32),
    #[error("edge {0} references vertex {1} out of range")]
    BadVertex(usize, u32),
    #[error("edge {0} has non-positive measure")]
    NonPositiveMeasure(usize),
    #[error("vertex {0} is isolated")]
    Isolated(u32),
    #[error("graph is not connected (vertex {0} unreachable from vertex 0)")]
    Disconnected(u32),
    #[error("points lie in different components")]
    DisconnectedPoints,
    #[error("subdivision parameter must be at least 2, got {0}")]
    BadSubdivision(u32),
    #[error("point offset {0} outside [0, {1}]")]
    OffsetOutOfRange(String, String),
    #[error("edge id {0} out of range")]
    BadEdgeId(u32),
}

/// A point of the graph: a position along an edge. Offsets `0` and the full
/// edge length denote the edge's endpoints; [`MetricMeasureGraph::canonical`]
/// resolves those to the vertex so that different representations of the
/// same point compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPoint {
    pub edge: EdgeId,
    pub offset: Rational,
}

impl GraphPoint {
    pub fn new(edge: EdgeId, offset: Rational) -> Self {
        GraphPoint { edge, offset }
    }
}

/// Canonical form of a [`GraphPoint`]: either a vertex or a strictly
/// interior edge point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CanonPoint {
    Vertex(VertexId),
    Interior { edge: EdgeId, offset: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureGraph {
    level: u32,
    m: u32,
    vertex_count: u32,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeId>>,
    connected: bool,
}

impl MetricMeasureGraph {
    /// A connected graph; the usual entry point for tower levels.
    pub fn new(
        level: u32,
        m: u32,
        vertex_count: u32,
        edges: Vec<(u32, u32, Rational)>,
    ) -> Result<Self, GraphError> {
        let g = Self::new_fragment(level, m, vertex_count, edges)?;
        if !g.connected {
            for v in 0..g.vertex_count {
                if !g.reachable_from_zero(v) {
                    return Err(GraphError::Disconnected(v));
                }
            }
        }
        for v in 0..g.vertex_count {
            if g.incidence[v as usize].is_empty() {
                return Err(GraphError::Isolated(v));
            }
        }
        Ok(g)
    }

    /// A possibly disconnected graph. Edge-inverse carriers use this; the
    /// builder enforces connectivity where the axioms require it.
    pub fn new_fragment(
        level: u32,
        m: u32,
        vertex_count: u32,
        edges: Vec<(u32, u32, Rational)>,
    ) -> Result<Self, GraphError> {
        if m < 2 {
            return Err(GraphError::BadSubdivision(m));
        }
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut out_edges = Vec::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); vertex_count as usize];
        for (i, (a, b, measure)) in edges.into_iter().enumerate() {
            if a >= vertex_count {
                return Err(GraphError::BadVertex(i, a));
            }
            if b >= vertex_count {
                return Err(GraphError::BadVertex(i, b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(i, a));
            }
            if measure <= Rational::zero() {
                return Err(GraphError::NonPositiveMeasure(i));
            }
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            incidence[lo as usize].push(EdgeId(i as u32));
            incidence[hi as usize].push(EdgeId(i as u32));
            out_edges.push(Edge {
                ends: [VertexId(lo), VertexId(hi)],
                measure,
            });
        }
        let mut g = MetricMeasureGraph {
            level,
            m,
            vertex_count,
            edges: out_edges,
            incidence,
            connected: false,
        };
        g.connected = g.compute_connected();
        Ok(g)
    }

    fn compute_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertex_count as usize];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.incidence[v.index()] {
                let w = self.other_end(e, v);
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    fn reachable_from_zero(&self, v: u32) -> bool {
        self.vertex_distances(VertexId(0))[v as usize].is_some()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// All edges at this level share the length `m^-level`.
    pub fn edge_length(&self) -> Rational {
        neg_pow(self.m, self.level)
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.index()].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| self.degree(VertexId(v)))
            .max()
            .unwrap_or(0)
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let ends = self.edges[e.index()].ends;
        if ends[0] == v {
            ends[1]
        } else {
            ends[0]
        }
    }

    pub fn total_measure(&self) -> Rational {
        self.edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.measure)
    }

    /// Measure per unit length of an edge.
    pub fn density(&self, e: EdgeId) -> Rational {
        &self.edges[e.index()].measure / self.edge_length()
    }

    pub fn vertex_point(&self, v: VertexId) -> GraphPoint {
        let e = self.incidence[v.index()][0];
        if self.edges[e.index()].ends[0] == v {
            GraphPoint::new(e, Rational::zero())
        } else {
            GraphPoint::new(e, self.edge_length())
        }
    }

    pub fn midpoint(&self, e: EdgeId) -> GraphPoint {
        GraphPoint::new(e, self.edge_length() / rational::int(2))
    }

    /// Resolves boundary offsets to the vertex they denote.
    pub fn canonical(&self, p: &GraphPoint) -> CanonPoint {
        let ends = self.edges[p.edge.index()].ends;
        if p.offset.is_zero() {
            CanonPoint::Vertex(ends[0])
        } else if p.offset == self.edge_length() {
            CanonPoint::Vertex(ends[1])
        } else {
            CanonPoint::Interior {
                edge: p.edge,
                offset: p.offset.clone(),
            }
        }
    }

    pub fn same_point(&self, p: &GraphPoint, q: &GraphPoint) -> bool {
        self.canonical(p) == self.canonical(q)
    }

    fn check_point(&self, p: &GraphPoint) -> Result<(), GraphError> {
        if p.edge.index() >= self.edges.len() {
            return Err(GraphError::BadEdgeId(p.edge.0));
        }
        if p.offset < Rational::zero() || p.offset > self.edge_length() {
            return Err(GraphError::OffsetOutOfRange(
                rational::format_rational(&p.offset),
                rational::format_rational(&self.edge_length()),
            ));
        }
        Ok(())
    }

    /// Dijkstra over exact rational edge lengths. `None` marks vertices in
    /// a different component.
    pub fn vertex_distances(&self, from: VertexId) -> Vec<Option<Rational>> {
        self.dijkstra(from, None)
    }

    /// Dijkstra cut off at `radius`: vertices farther away read `None`.
    pub fn vertex_distances_within(
        &self,
        from: VertexId,
        radius: &Rational,
    ) -> Vec<Option<Rational>> {
        self.dijkstra(from, Some(radius))
    }

    fn dijkstra(&self, from: VertexId, cutoff: Option<&Rational>) -> Vec<Option<Rational>> {
        let mut dist: Vec<Option<Rational>> = vec![None; self.vertex_count as usize];
        let mut heap = BinaryHeap::new();
        dist[from.index()] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), from)));
        let len = self.edge_length();
        while let Some(Reverse((d, v))) = heap.pop() {
            match &dist[v.index()] {
                Some(best) if *best < d => continue,
                _ => {}
            }
            for &e in &self.incidence[v.index()] {
                let w = self.other_end(e, v);
                let nd = &d + &len;
                if let Some(r) = cutoff {
                    if nd > *r {
                        continue;
                    }
                }
                let better = match &dist[w.index()] {
                    None => true,
                    Some(old) => nd < *old,
                };
                if better {
                    dist[w.index()] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    /// Distances from an arbitrary point to all vertices.
    pub fn point_vertex_distances(&self, p: &GraphPoint) -> Vec<Option<Rational>> {
        match self.canonical(p) {
            CanonPoint::Vertex(v) => self.vertex_distances(v),
            CanonPoint::Interior { edge, offset } => {
                let [a, b] = self.edges[edge.index()].ends;
                let da = self.vertex_distances(a);
                let db = self.vertex_distances(b);
                let rest = self.edge_length() - &offset;
                (0..self.vertex_count as usize)
                    .map(|i| {
                        let via_a = da[i].as_ref().map(|d| d + &offset);
                        let via_b = db[i].as_ref().map(|d| d + &rest);
                        match (via_a, via_b) {
                            (Some(x), Some(y)) => Some(rational::min(x, y)),
                            (Some(x), None) => Some(x),
                            (None, Some(y)) => Some(y),
                            (None, None) => None,
                        }
                    })
                    .collect()
            }
        }
    }

    /// Exact path-metric distance between two points.
    pub fn distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Rational, GraphError> {
        self.check_point(p)?;
        self.check_point(q)?;
        // A point of an edge measures distance to any other point of the
        // same edge along the edge itself; every detour through an endpoint
        // is at least as long because all edges share one length.
        if p.edge == q.edge {
            return Ok((&p.offset - &q.offset).abs());
        }
        let cp = self.canonical(p);
        let cq = self.canonical(q);
        if cp == cq {
            return Ok(Rational::zero());
        }
        let dq = self.point_vertex_distances(q);
        let len = self.edge_length();
        let candidates: Vec<(VertexId, Rational)> = match cp {
            CanonPoint::Vertex(v) => vec![(v, Rational::zero())],
            CanonPoint::Interior { edge, offset } => {
                let [a, b] = self.edges[edge.index()].ends;
                vec![(a, offset.clone()), (b, &len - &offset)]
            }
        };
        // If q is interior to p's edge that is handled above, so every path
        // from p exits through one of the candidate vertices.
        let mut best: Option<Rational> = None;
        for (v, extra) in candidates {
            if let Some(d) = &dq[v.index()] {
                let total = d + &extra;
                best = Some(match best {
                    None => total,
                    Some(b) => rational::min(b, total),
                });
            }
        }
        best.ok_or(GraphError::DisconnectedPoints)
    }

    /// Intersection of the open ball `B_r(center)` with every edge, as a
    /// list of disjoint intervals in arclength coordinates `[0, len]`
    /// oriented from `ends[0]`. Interval endpoints are exact; whether they
    /// are open or closed is immaterial for measure and integration.
    pub fn ball_intersections(
        &self,
        center: &GraphPoint,
        r: &Rational,
    ) -> Result<Vec<Vec<(Rational, Rational)>>, GraphError> {
        self.check_point(center)?;
        let dv = self.point_vertex_distances(center);
        Ok(self.ball_intersections_from(center, &dv, r))
    }

    /// Same as [`Self::ball_intersections`] with the center's vertex
    /// distance table supplied by the caller (profiles reuse one table
    /// across many radii).
    pub fn ball_intersections_from(
        &self,
        center: &GraphPoint,
        dv: &[Option<Rational>],
        r: &Rational,
    ) -> Vec<Vec<(Rational, Rational)>> {
        let len = self.edge_length();
        let zero = Rational::zero();
        let canon = self.canonical(center);
        let mut out = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let eid = EdgeId(i as u32);
            let mut intervals: Vec<(Rational, Rational)> = Vec::new();
            let same_edge = match &canon {
                CanonPoint::Interior { edge, .. } => *edge == eid,
                CanonPoint::Vertex(_) => false,
            };
            if same_edge {
                // On the center's own edge the distance is |s - t|.
                let t = match &canon {
                    CanonPoint::Interior { offset, .. } => offset.clone(),
                    _ => unreachable!(),
                };
                let lo = rational::clamp(&t - r, &zero, &len);
                let hi = rational::clamp(&t + r, &zero, &len);
                if lo < hi {
                    intervals.push((lo, hi));
                }
            } else {
                let da = dv[e.ends[0].index()].clone();
                let db = dv[e.ends[1].index()].clone();
                // d(center, point at s) = min(da + s, db + len - s).
                let from_a = match da {
                    Some(d) if &d < r => rational::clamp(r - &d, &zero, &len),
                    _ => zero.clone(),
                };
                let from_b = match db {
                    Some(d) if &d < r => rational::clamp(r - &d, &zero, &len),
                    _ => zero.clone(),
                };
                if &from_a + &from_b >= len {
                    intervals.push((zero.clone(), len.clone()));
                } else {
                    if from_a > zero {
                        intervals.push((zero.clone(), from_a));
                    }
                    if from_b > zero {
                        intervals.push((&len - &from_b, len.clone()));
                    }
                }
            }
            out.push(intervals);
        }
        out
    }

    /// Exact measure of a family of edge intervals.
    pub fn intervals_measure(&self, hits: &[Vec<(Rational, Rational)>]) -> Rational {
        let mut total = Rational::zero();
        for (i, intervals) in hits.iter().enumerate() {
            if intervals.is_empty() {
                continue;
            }
            let density = self.density(EdgeId(i as u32));
            for (a, b) in intervals {
                total += (b - a) * &density;
            }
        }
        total
    }

    /// Exact measure of the open ball `B_r(center)`.
    pub fn ball_measure(&self, center: &GraphPoint, r: &Rational) -> Result<Rational, GraphError> {
        let hits = self.ball_intersections(center, r)?;
        Ok(self.intervals_measure(&hits))
    }

    /// Largest vertex-to-vertex distance. Point-to-point distances exceed it
    /// by at most one edge length.
    pub fn vertex_diameter(&self) -> Result<Rational, GraphError> {
        let mut best = Rational::zero();
        for v in 0..self.vertex_count {
            for d in self.vertex_distances(VertexId(v)).iter() {
                match d {
                    None => return Err(GraphError::DisconnectedPoints),
                    Some(d) => best = rational::max(best, d.clone()),
                }
            }
        }
        Ok(best)
    }

    /// Upper bound on the diameter over all points.
    pub fn diameter_bound(&self) -> Result<Rational, GraphError> {
        Ok(self.vertex_diameter()? + self.edge_length())
    }

    /// Splits every edge into `m` equal sub-edges of measure `measure/m`,
    /// keeping back-maps to the parent graph.
    pub fn subdivide(&self) -> Subdivision {
        let m = self.m;
        let n = self.vertex_count;
        let interior_per_edge = m - 1;
        let new_vertex_count = n + self.edges.len() as u32 * interior_per_edge;
        let mut new_edges = Vec::with_capacity(self.edges.len() * m as usize);
        let mut parent_edge = Vec::with_capacity(new_edges.capacity());
        let mut segment = Vec::with_capacity(new_edges.capacity());
        let mut forward = Vec::with_capacity(new_edges.capacity());
        let mut parent_point: Vec<ParentPoint> = (0..n)
            .map(|v| ParentPoint::Vertex(VertexId(v)))
            .collect();
        let m_big = rational::int(m as i64);
        for (i, e) in self.edges.iter().enumerate() {
            let base = n + i as u32 * interior_per_edge;
            for k in 1..m {
                parent_point.push(ParentPoint::Interior {
                    edge: EdgeId(i as u32),
                    index: k,
                });
                debug_assert_eq!(parent_point.len() as u32 - 1, base + k - 1);
            }
            let sub_measure = &e.measure / &m_big;
            let pos = |k: u32| -> u32 {
                if k == 0 {
                    e.ends[0].0
                } else if k == m {
                    e.ends[1].0
                } else {
                    base + k - 1
                }
            };
            for k in 0..m {
                new_edges.push((pos(k), pos(k + 1), sub_measure.clone()));
                parent_edge.push(EdgeId(i as u32));
                segment.push(k);
                // storage sorts the ends; remember whether the stored
                // orientation still runs along the parent direction
                forward.push(pos(k) <= pos(k + 1));
            }
        }
        let graph = MetricMeasureGraph::new_fragment(
            self.level + 1,
            self.m,
            new_vertex_count,
            new_edges,
        )
        .expect("subdivision of a valid graph is valid");
        Subdivision {
            graph,
            parent_edge,
            segment,
            forward,
            parent_point,
        }
    }
}

/// Where a subdivision vertex sits in the parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParentPoint {
    Vertex(VertexId),
    /// Interior breakpoint `index/m` of the way along `edge` (from
    /// `ends[0]`), `1 <= index <= m-1`.
    Interior { edge: EdgeId, index: u32 },
}

/// A subdivided graph together with the maps back to its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision {
    pub graph: MetricMeasureGraph,
    /// Sub-edge -> parent edge.
    pub parent_edge: Vec<EdgeId>,
    /// Sub-edge -> its slot `0..m` along the parent edge, counted from the
    /// parent's `ends[0]`.
    pub segment: Vec<u32>,
    /// Whether the sub-edge's stored `ends[0]` sits on the parent's
    /// `ends[0]` side (storage sorts ends, losing the direction).
    pub forward: Vec<bool>,
    /// Sub-vertex -> its location in the parent.
    pub parent_point: Vec<ParentPoint>,
}

impl Subdivision {
    /// The `k`-th sub-edge of parent edge `e` (layout is deterministic).
    pub fn sub_edge(&self, e: EdgeId, k: u32) -> EdgeId {
        EdgeId(e.0 * self.graph.m() + k)
    }

    /// Sub-vertex at position `k` in `0..=m` along parent edge `e`.
    pub fn position_vertex(&self, parent: &MetricMeasureGraph, e: EdgeId, k: u32) -> VertexId {
        let m = self.graph.m();
        if k == 0 {
            parent.edge(e).ends[0]
        } else if k == m {
            parent.edge(e).ends[1]
        } else {
            VertexId(parent.vertex_count() + e.0 * (m - 1) + k - 1)
        }
    }

    /// A point of the subdivision as a point of the parent graph.
    pub fn to_parent_point(&self, p: &GraphPoint) -> GraphPoint {
        let parent = self.parent_edge[p.edge.index()];
        let seg = self.segment[p.edge.index()];
        let sub_len = self.graph.edge_length();
        let along = if self.forward[p.edge.index()] {
            p.offset.clone()
        } else {
            &sub_len - &p.offset
        };
        GraphPoint::new(parent, rational::int(seg as i64) * sub_len + along)
    }

    /// A point of the parent graph as a point of the subdivision.
    pub fn from_parent_point(&self, parent: &MetricMeasureGraph, p: &GraphPoint) -> GraphPoint {
        let m = self.graph.m();
        let sub_len = self.graph.edge_length();
        let mut k = 0u32;
        let mut off = p.offset.clone();
        while off > sub_len && k < m - 1 {
            off -= &sub_len;
            k += 1;
        }
        // offset == sub_len on the last consumed slot stays as the right
        // endpoint of that sub-edge; both forms canonicalize identically.
        let _ = parent;
        let sub = self.sub_edge(p.edge, k);
        let local = if self.forward[sub.index()] {
            off
        } else {
            &sub_len - &off
        };
        GraphPoint::new(sub, local)
    }
}

/// The unit interval as a one-edge graph at level 0; the base space of
/// edge inverses.
pub fn unit_interval(m: u32) -> MetricMeasureGraph {
    MetricMeasureGraph::new(0, m, 2, vec![(0, 1, rational::int(1))])
        .expect("unit interval is valid")
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The level-1 "wedge": two vertices over each endpoint of [0,1], one
    /// middle vertex, four edges of length 1/2 and measure 1/4.
    ///
    /// Vertices: 0,1 = left copies, 2 = middle, 3,4 = right copies.
    pub fn wedge_level1() -> MetricMeasureGraph {
        let q = rational::rat(1, 4);
        MetricMeasureGraph::new(
            1,
            2,
            5,
            vec![
                (0, 2, q.clone()),
                (1, 2, q.clone()),
                (2, 3, q.clone()),
                (2, 4, q),
            ],
        )
        .unwrap()
    }

    /// Unit interval [0,1] with Lebesgue measure, m = 2.
    pub fn interval() -> MetricMeasureGraph {
        unit_interval(2)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 0, int(1))]),
            Err(GraphError::SelfLoop(0, 0))
        ));
        assert!(matches!(
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 3, int(1))]),
            Err(GraphError::BadVertex(0, 3))
        ));
        assert!(matches!(
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 1, int(0))]),
            Err(GraphError::NonPositiveMeasure(0))
        ));
        assert!(matches!(
            MetricMeasureGraph::new(0, 2, 4, vec![(0, 1, int(1)), (2, 3, int(1))]),
            Err(GraphError::Disconnected(_))
        ));
        assert!(MetricMeasureGraph::new_fragment(
            0,
            2,
            4,
            vec![(0, 1, int(1)), (2, 3, int(1))]
        )
        .is_ok());
    }

    #[test]
    fn parallel_edges_keep_identity() {
        let g =
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 1, int(1)), (0, 1, rat(1, 2))]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge(EdgeId(0)).measure, int(1));
        assert_eq!(g.edge(EdgeId(1)).measure, rat(1, 2));
        assert_eq!(g.total_measure(), rat(3, 2));
    }

    #[test]
    fn subdivide_interval() {
        // single edge [0,1], m=2, measure 1 -> 2 edges of length 1/2,
        // measure 1/2 each, 3 vertices
        let g = interval();
        let s = g.subdivide();
        assert_eq!(s.graph.vertex_count(), 3);
        assert_eq!(s.graph.edge_count(), 2);
        assert_eq!(s.graph.edge_length(), rat(1, 2));
        for e in s.graph.edges() {
            assert_eq!(e.measure, rat(1, 2));
        }
        assert_eq!(s.graph.total_measure(), g.total_measure());
    }

    #[test]
    fn subdivide_triangle() {
        // triangle, m=3, unit measures -> 9 edges each measure 1/3
        let g = MetricMeasureGraph::new(
            0,
            3,
            3,
            vec![(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))],
        )
        .unwrap();
        let s = g.subdivide();
        assert_eq!(s.graph.edge_count(), 9);
        for e in s.graph.edges() {
            assert_eq!(e.measure, rat(1, 3));
        }
        assert_eq!(s.graph.total_measure(), int(3));
    }

    #[test]
    fn subdivide_wedge() {
        // wedge level-1 (4 edges, measure 1/4), m=2 -> 8 edges of measure 1/8
        let g = wedge_level1();
        let s = g.subdivide();
        assert_eq!(s.graph.edge_count(), 8);
        for e in s.graph.edges() {
            assert_eq!(e.measure, rat(1, 8));
        }
        assert_eq!(s.graph.total_measure(), int(1));
    }

    #[test]
    fn distance_on_interval() {
        let g = interval();
        let p = GraphPoint::new(EdgeId(0), int(0));
        let q = GraphPoint::new(EdgeId(0), int(1));
        assert_eq!(g.distance(&p, &q).unwrap(), int(1));
        assert_eq!(g.distance(&p, &p).unwrap(), int(0));
        let mid = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(g.distance(&p, &mid).unwrap(), rat(1, 2));
    }

    #[test]
    fn distance_between_wedge_endpoints() {
        // both left endpoints connect through the middle vertex: 1/2 + 1/2
        let g = wedge_level1();
        let p = g.vertex_point(VertexId(0));
        let q = g.vertex_point(VertexId(1));
        assert_eq!(g.distance(&p, &q).unwrap(), int(1));
    }

    #[test]
    fn vertex_representations_compare_equal() {
        let g = wedge_level1();
        // middle vertex (2) reached as the far end of edge 0 or the near
        // end of edge 2
        let a = GraphPoint::new(EdgeId(0), rat(1, 2));
        let b = GraphPoint::new(EdgeId(2), int(0));
        assert!(g.same_point(&a, &b));
        assert_eq!(g.distance(&a, &b).unwrap(), int(0));
    }

    #[test]
    fn distance_across_parallel_edges() {
        let g =
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 1, int(1)), (0, 1, int(1))]).unwrap();
        let p = GraphPoint::new(EdgeId(0), rat(1, 4));
        let q = GraphPoint::new(EdgeId(1), rat(1, 4));
        // through vertex 0: 1/4 + 1/4
        assert_eq!(g.distance(&p, &q).unwrap(), rat(1, 2));
        let q_far = GraphPoint::new(EdgeId(1), rat(3, 4));
        // through either vertex: 1/4 + 3/4 vs 3/4 + 1/4
        assert_eq!(g.distance(&p, &q_far).unwrap(), int(1));
    }

    #[test]
    fn ball_measure_on_interval() {
        let g = interval();
        let mid = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(g.ball_measure(&mid, &rat(1, 4)).unwrap(), rat(1, 2));
        // r larger than the diameter swallows everything
        assert_eq!(g.ball_measure(&mid, &int(7)).unwrap(), int(1));
        // one-sided at an endpoint
        let end = GraphPoint::new(EdgeId(0), int(0));
        assert_eq!(g.ball_measure(&end, &rat(1, 4)).unwrap(), rat(1, 4));
    }

    #[test]
    fn ball_measure_at_wedge_center() {
        // four incident edges, each contributing length 1/4 at density 1/2
        let g = wedge_level1();
        let c = g.vertex_point(VertexId(2));
        assert_eq!(g.ball_measure(&c, &rat(1, 4)).unwrap(), rat(1, 2));
    }

    #[test]
    fn ball_wraps_around_a_cycle() {
        // two parallel edges form a circle of circumference 2; a ball of
        // radius > 1 is everything
        let g =
            MetricMeasureGraph::new(0, 2, 2, vec![(0, 1, int(1)), (0, 1, int(1))]).unwrap();
        let p = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(g.ball_measure(&p, &rat(11, 10)).unwrap(), int(2));
        // an r-ball on a circle has measure 2r while it fits
        assert_eq!(g.ball_measure(&p, &rat(3, 4)).unwrap(), rat(3, 2));
        // radius 1/2: own edge fully minus endpoints, nothing of the other
        assert_eq!(g.ball_measure(&p, &rat(1, 2)).unwrap(), int(1));
    }

    #[test]
    fn ball_is_monotone_and_caps_at_total() {
        let g = wedge_level1();
        let c = g.midpoint(EdgeId(1));
        let radii = [rat(1, 8), rat(1, 4), rat(1, 2), int(1), int(2)];
        let mut last = int(0);
        for r in &radii {
            let m = g.ball_measure(&c, r).unwrap();
            assert!(m >= last);
            last = m;
        }
        assert_eq!(last, g.total_measure());
    }

    #[test]
    fn subdivision_point_maps_round_trip() {
        let g = wedge_level1();
        let s = g.subdivide();
        // asymmetric offsets catch orientation slips in the back-maps
        for off in [rat(3, 8), rat(5, 16), rat(7, 16), rat(1, 16)] {
            for e in 0..g.edge_count() {
                let p = GraphPoint::new(EdgeId(e as u32), off.clone());
                let down = s.from_parent_point(&g, &p);
                let back = s.to_parent_point(&down);
                assert!(g.same_point(&p, &back));
                // distances agree through the isometry
                let q = GraphPoint::new(EdgeId(0), rat(1, 8));
                let dq = s.from_parent_point(&g, &q);
                assert_eq!(
                    g.distance(&p, &q).unwrap(),
                    s.graph.distance(&down, &dq).unwrap()
                );
            }
        }
    }
}
