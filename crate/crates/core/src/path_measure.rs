//! Lifts of edge paths and the probability measure on them.
//!
//! For a path in the target of a projection step, the collection of lifts
//! is finite; each lift is weighted by the product of its edge weights
//! divided by the product of its interior vertex weights. The weight
//! assignment is an exact probability measure, invariant under path
//! reversal, with exact per-edge marginals, and it composes across steps.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_core::RngCore;
use thiserror::Error;

use crate::builder::InverseSystem;
use crate::graph::{EdgeId, MetricMeasureGraph, Subdivision, VertexId};
use crate::plfunc::PlFunction;
use crate::rational::{self, Rational};
use crate::step::{Projection, StepError};

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("path needs at least two vertices")]
    TooShort,
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(u32, u32),
    #[error("vertices {0} and {1} are joined by more than one edge; specify edges explicitly")]
    AmbiguousEdge(u32, u32),
    #[error("edge {0} does not join vertices {1} and {2}")]
    EdgeMismatch(u32, u32, u32),
    #[error("lift enumeration exceeds guard of {0}")]
    GuardExceeded(usize),
    #[error("edge {0} does not lie over path position {1}")]
    NotOverPath(u32, usize),
    #[error("level range {0}..{1} is not inside the tower")]
    BadLevels(u32, u32),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// A path recorded as its vertex sequence together with the edges spanned
/// by consecutive vertices. Edges are explicit because parallel edges make
/// the vertex sequence alone ambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl VertexPath {
    /// Builds a path from vertices alone; every consecutive pair must span
    /// exactly one edge.
    pub fn from_vertices(
        g: &MetricMeasureGraph,
        vertices: Vec<VertexId>,
    ) -> Result<Self, PathError> {
        if vertices.len() < 2 {
            return Err(PathError::TooShort);
        }
        let mut edges = Vec::with_capacity(vertices.len() - 1);
        for pair in vertices.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut found = None;
            for &e in g.incident(a) {
                if g.other_end(e, a) == b {
                    if found.is_some() {
                        return Err(PathError::AmbiguousEdge(a.0, b.0));
                    }
                    found = Some(e);
                }
            }
            match found {
                Some(e) => edges.push(e),
                None => return Err(PathError::NotAdjacent(a.0, b.0)),
            }
        }
        Ok(VertexPath { vertices, edges })
    }

    /// Builds a path from explicit vertices and edges, validating that each
    /// edge joins its pair.
    pub fn from_parts(
        g: &MetricMeasureGraph,
        vertices: Vec<VertexId>,
        edges: Vec<EdgeId>,
    ) -> Result<Self, PathError> {
        if vertices.len() < 2 || edges.len() + 1 != vertices.len() {
            return Err(PathError::TooShort);
        }
        for (i, &e) in edges.iter().enumerate() {
            let (a, b) = (vertices[i], vertices[i + 1]);
            let ends = g.edge(e).ends;
            let ok = (ends[0] == a && ends[1] == b) || (ends[0] == b && ends[1] == a);
            if !ok {
                return Err(PathError::EdgeMismatch(e.0, a.0, b.0));
            }
        }
        Ok(VertexPath { vertices, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> VertexPath {
        VertexPath {
            vertices: self.vertices.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }
}

/// A lift: an edge path in the source, stored as traversal steps. The flag
/// says whether the edge is walked from `ends[0]` to `ends[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftPath {
    pub start: VertexId,
    pub steps: Vec<(EdgeId, bool)>,
}

impl LiftPath {
    pub fn vertices(&self, g: &MetricMeasureGraph) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start);
        let mut cur = self.start;
        for &(e, _) in &self.steps {
            cur = g.other_end(e, cur);
            out.push(cur);
        }
        out
    }

    pub fn end(&self, g: &MetricMeasureGraph) -> VertexId {
        *self.vertices(g).last().unwrap()
    }

    pub fn reversed(&self, g: &MetricMeasureGraph) -> LiftPath {
        LiftPath {
            start: self.end(g),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|&(e, fwd)| (e, !fwd))
                .collect(),
        }
    }

    pub fn contains_at(&self, position: usize, e: EdgeId) -> bool {
        self.steps.get(position).is_some_and(|&(se, _)| se == e)
    }
}

/// All lifts of `path` through the step, in lexicographic order of edge
/// indices. Openness guarantees at least one extension at every position,
/// so the set is nonempty for admissible steps.
pub fn enumerate_lifts(step: &Projection, path: &VertexPath) -> Vec<LiftPath> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, VertexId, Vec<(EdgeId, bool)>)> = Vec::new();
    // initial edges over the first path edge starting over the first vertex
    let first_edge = path.edges[0];
    let v0 = path.vertices[0];
    for &e in step.fiber_edges(first_edge) {
        let start = step.end_over(e, v0);
        let fwd = step.source.edge(e).ends[0] == start;
        stack.push((1, step.source.other_end(e, start), vec![(e, fwd)]));
    }
    // DFS; reverse stack insertion order keeps output lexicographic
    stack.reverse();
    while let Some((pos, at, steps)) = stack.pop() {
        if pos == path.edges.len() {
            let start = step.end_over(steps[0].0, path.vertices[0]);
            out.push(LiftPath { start, steps });
            continue;
        }
        let want = path.edges[pos];
        let mut extensions: Vec<(usize, VertexId, Vec<(EdgeId, bool)>)> = Vec::new();
        for &e in step.source.incident(at) {
            if step.edge_map[e.index()] == want {
                let fwd = step.source.edge(e).ends[0] == at;
                let mut next = steps.clone();
                next.push((e, fwd));
                extensions.push((pos + 1, step.source.other_end(e, at), next));
            }
        }
        extensions.reverse();
        stack.extend(extensions);
    }
    out
}

/// The finite probability space of lifts of one path.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftMeasure {
    pub path: VertexPath,
    pub lifts: Vec<LiftPath>,
    pub omega: Vec<Rational>,
}

impl LiftMeasure {
    pub fn total(&self) -> Rational {
        self.omega.iter().fold(Rational::zero(), |a, o| a + o)
    }

    /// Weight of a single lift, if present.
    pub fn weight_of(&self, lift: &LiftPath) -> Option<&Rational> {
        self.lifts
            .iter()
            .position(|l| l == lift)
            .map(|i| &self.omega[i])
    }

    /// Total weight of lifts passing through `e` at the given path
    /// position; equals the edge's disintegration weight exactly.
    pub fn edge_marginal(&self, position: usize, e: EdgeId) -> Result<Rational, PathError> {
        if position >= self.path.edges.len() {
            return Err(PathError::NotOverPath(e.0, position));
        }
        let mut any = false;
        let mut total = Rational::zero();
        for (l, o) in self.lifts.iter().zip(self.omega.iter()) {
            if l.contains_at(position, e) {
                total += o;
                any = true;
            }
        }
        // the edge must at least lie over the right target edge
        if !any && self.lifts.iter().all(|l| !l.contains_at(position, e)) {
            // still fine if e projects onto the path edge; zero marginal is
            // impossible for fiber edges of admissible steps, so flag misuse
            return Ok(total);
        }
        Ok(total)
    }
}

/// Weights the lifts of `path`: the product of edge weights over the
/// product of interior vertex weights.
pub fn omega(step: &Projection, path: &VertexPath) -> Result<LiftMeasure, PathError> {
    let fuzzy = step.fuzzy_section()?;
    let lifts = enumerate_lifts(step, path);
    let mut omega = Vec::with_capacity(lifts.len());
    for lift in &lifts {
        let mut w = Rational::one();
        for &(e, _) in &lift.steps {
            w *= &fuzzy.edge_weight[e.index()];
        }
        let verts = lift.vertices(&step.source);
        for v in &verts[1..verts.len() - 1] {
            w /= &fuzzy.vertex_weight[v.index()];
        }
        omega.push(w);
    }
    Ok(LiftMeasure {
        path: path.clone(),
        lifts,
        omega,
    })
}

/// The subdivision of a lift as a vertex path in the subdivided graph.
pub fn subdivide_lift(
    parent: &MetricMeasureGraph,
    sub: &Subdivision,
    lift: &LiftPath,
) -> VertexPath {
    let m = parent.m();
    let mut vertices = vec![match lift.steps.first() {
        Some(&(e, fwd)) => {
            if fwd {
                sub.position_vertex(parent, e, 0)
            } else {
                sub.position_vertex(parent, e, m)
            }
        }
        None => unreachable!("lift paths are nonempty"),
    }];
    let mut edges = Vec::with_capacity(lift.steps.len() * m as usize);
    for &(e, fwd) in &lift.steps {
        if fwd {
            for k in 0..m {
                edges.push(sub.sub_edge(e, k));
                vertices.push(sub.position_vertex(parent, e, k + 1));
            }
        } else {
            for k in (0..m).rev() {
                edges.push(sub.sub_edge(e, k));
                vertices.push(sub.position_vertex(parent, e, k));
            }
        }
    }
    VertexPath { vertices, edges }
}

/// Lifts of a path of level-`k` edges all the way to level `i`, weighted by
/// the composition of the per-step measures. Enumeration stops with an
/// error once the frontier exceeds `guard`.
pub fn omega_multilevel(
    system: &InverseSystem,
    k: u32,
    i: u32,
    path: &VertexPath,
    guard: usize,
) -> Result<LiftMeasure, PathError> {
    if k >= i || i as usize > system.depth() {
        return Err(PathError::BadLevels(k, i));
    }
    let start = LiftPath {
        start: path.vertices[0],
        steps: path
            .edges
            .iter()
            .zip(path.vertices.windows(2))
            .map(|(&e, pair)| {
                let fwd = system.level(k).edge(e).ends[0] == pair[0];
                (e, fwd)
            })
            .collect(),
    };
    let mut frontier: Vec<(LiftPath, Rational)> = vec![(start, Rational::one())];
    let mut last_path = path.clone();
    for level in k..i {
        let step = system.step(level as usize);
        let parent = system.level(level);
        let mut next: Vec<(LiftPath, Rational)> = Vec::new();
        for (lift, weight) in &frontier {
            let vp = subdivide_lift(parent, &step.target, lift);
            let lm = omega(step, &vp)?;
            last_path = vp;
            for (l, o) in lm.lifts.into_iter().zip(lm.omega.into_iter()) {
                next.push((l, weight * &o));
                if next.len() > guard {
                    return Err(PathError::GuardExceeded(guard));
                }
            }
        }
        frontier = next;
    }
    let (lifts, omega): (Vec<_>, Vec<_>) = frontier.into_iter().unzip();
    Ok(LiftMeasure {
        path: last_path,
        lifts,
        omega,
    })
}

/// Outcome of the pushforward identity check on one level-`k` edge: the
/// lift measure times arclength pushes forward to the normalized restriction
/// of the level-`i` measure over that edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardCheck {
    pub pass: bool,
    /// Per level-`i` edge over the chosen edge: (edge, lhs, rhs).
    pub comparisons: Vec<(EdgeId, Rational, Rational)>,
    pub lift_count: usize,
}

/// Composite image of a level-`i` edge in level `k` of the tower.
pub fn composite_edge_image(system: &InverseSystem, i: u32, k: u32, e: EdgeId) -> EdgeId {
    let mut cur = e;
    let mut level = i;
    while level > k {
        let step = system.step(level as usize - 1);
        let sub_edge = step.edge_map[cur.index()];
        cur = step.target.parent_edge[sub_edge.index()];
        level -= 1;
    }
    cur
}

/// Verifies the exact pushforward identity for the single-edge path on `e`
/// between levels `k` and `i`.
pub fn verify_pushforward(
    system: &InverseSystem,
    k: u32,
    i: u32,
    e: EdgeId,
    guard: usize,
) -> Result<PushforwardCheck, PathError> {
    let base = system.level(k);
    let ends = base.edge(e).ends;
    let path = VertexPath::from_parts(base, vec![ends[0], ends[1]], vec![e])?;
    let lm = omega_multilevel(system, k, i, &path, guard)?;
    let top = system.level(i);
    let over: Vec<EdgeId> = (0..top.edge_count() as u32)
        .map(EdgeId)
        .filter(|&ei| composite_edge_image(system, i, k, ei) == e)
        .collect();
    let fiber_measure = over
        .iter()
        .fold(Rational::zero(), |a, &ei| a + &top.edge(ei).measure);
    let len_i = top.edge_length();
    let len_k = base.edge_length();
    let mut comparisons = Vec::with_capacity(over.len());
    let mut pass = true;
    for &ei in &over {
        let mut mass = Rational::zero();
        for (lift, o) in lm.lifts.iter().zip(lm.omega.iter()) {
            let count = lift.steps.iter().filter(|&&(se, _)| se == ei).count();
            if count > 0 {
                mass += o * rational::int(count as i64);
            }
        }
        let lhs = mass * &len_i;
        let rhs = &len_k * &top.edge(ei).measure / &fiber_measure;
        if lhs != rhs {
            pass = false;
        }
        comparisons.push((ei, lhs, rhs));
    }
    Ok(PushforwardCheck {
        pass,
        comparisons,
        lift_count: lm.lifts.len(),
    })
}

/// Samples one lift of `path` with probability exactly its weight, as a
/// Markov chain: the initial edge by its disintegration weight, each
/// transition by edge weight over vertex weight. Randomness is consumed as
/// exact rationals with denominator 2^64.
pub fn sample_lift<R: RngCore>(
    step: &Projection,
    path: &VertexPath,
    rng: &mut R,
) -> Result<LiftPath, PathError> {
    let fuzzy = step.fuzzy_section()?;
    let draw = |rng: &mut R| -> Rational {
        Rational::new(BigInt::from(rng.next_u64()), BigInt::from(2u8).pow(64))
    };
    // initial edge
    let v0 = path.vertices[0];
    let first = path.edges[0];
    let mut acc = Rational::zero();
    let u = draw(rng);
    let mut chosen: Option<EdgeId> = None;
    for &e in step.fiber_edges(first) {
        acc += &fuzzy.edge_weight[e.index()];
        if u < acc {
            chosen = Some(e);
            break;
        }
    }
    let e0 = chosen.unwrap_or_else(|| *step.fiber_edges(first).last().expect("nonempty fiber"));
    let start = step.end_over(e0, v0);
    let mut steps = vec![(e0, step.source.edge(e0).ends[0] == start)];
    let mut at = step.source.other_end(e0, start);
    for pos in 1..path.edges.len() {
        let want = path.edges[pos];
        let u = draw(rng);
        let mut acc = Rational::zero();
        let mut chosen: Option<EdgeId> = None;
        let mut last: Option<EdgeId> = None;
        for &e in step.source.incident(at) {
            if step.edge_map[e.index()] == want {
                last = Some(e);
                acc += &fuzzy.edge_weight[e.index()] / &fuzzy.vertex_weight[at.index()];
                if u < acc {
                    chosen = Some(e);
                    break;
                }
            }
        }
        let e = chosen
            .or(last)
            .expect("open projection always extends a lift");
        steps.push((e, step.source.edge(e).ends[0] == at));
        at = step.source.other_end(e, at);
    }
    Ok(LiftPath { start, steps })
}

/// Exact data for the adjacent-fiber-average inequality: for `u` piecewise
/// linear on level `i` with its edge-slope bound as upper gradient, the
/// difference of the averages of `u` over the preimages of two adjacent
/// level-`k` edges is bounded by `c_hat * m^-k` times the average of the
/// gradient over the union.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacentAverageCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub c_hat: Rational,
    pub pass: bool,
}

pub fn adjacent_fiber_average(
    system: &InverseSystem,
    k: u32,
    i: u32,
    e0: EdgeId,
    e1: EdgeId,
    u: &PlFunction,
) -> AdjacentAverageCheck {
    let top = system.level(i);
    let two = rational::int(2);
    let zone = |e: EdgeId| -> (Rational, Rational) {
        let mut mass = Rational::zero();
        let mut integral = Rational::zero();
        for ei in 0..top.edge_count() as u32 {
            if composite_edge_image(system, i, k, EdgeId(ei)) == e {
                let edge = top.edge(EdgeId(ei));
                mass += &edge.measure;
                integral += (&u.values[edge.ends[0].index()]
                    + &u.values[edge.ends[1].index()])
                    * &edge.measure
                    / &two;
            }
        }
        (mass, integral)
    };
    let grad = |e: EdgeId| -> Rational {
        let mut total = Rational::zero();
        for ei in 0..top.edge_count() as u32 {
            if composite_edge_image(system, i, k, EdgeId(ei)) == e {
                total += u.slope(top, EdgeId(ei)).abs() * &top.edge(EdgeId(ei)).measure;
            }
        }
        total
    };
    let (m0, i0) = zone(e0);
    let (m1, i1) = zone(e1);
    let union_mass = &m0 + &m1;
    let c_hat = &union_mass / &m0 + &union_mass / &m1;
    let lhs = (i0 / &m0 - i1 / &m1).abs();
    let avg_grad = (grad(e0) + grad(e1)) / &union_mass;
    let scale = system.level(k).edge_length();
    let rhs = &c_hat * scale * avg_grad;
    AdjacentAverageCheck {
        pass: lhs <= rhs,
        lhs,
        rhs,
        c_hat,
    }
}

use num_traits::Signed;
