//! One projection step of a tower: a simplicial map from a level onto the
//! subdivision of the level below, the six admissibility axioms, the
//! canonical fiber disintegration, and fiber averaging.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, GraphPoint, MetricMeasureGraph, Subdivision, VertexId};
use crate::plfunc::PlFunction;
use crate::rational::{self, format_rational, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("vertex map has {got} entries for {want} source vertices")]
    VertexMapArity { got: usize, want: usize },
    #[error("edge map has {got} entries for {want} source edges")]
    EdgeMapArity { got: usize, want: usize },
    #[error("vertex map sends vertex {0} to out-of-range target {1}")]
    VertexMapRange(u32, u32),
    #[error("edge map sends edge {0} to out-of-range target {1}")]
    EdgeMapRange(u32, u32),
    #[error("edge {0} does not map simplicially: its ends land on {1:?}, its image has ends {2:?}")]
    NotSimplicial(u32, [u32; 2], [u32; 2]),
    #[error("source level {0} does not sit one step above target parent level {1}")]
    LevelMismatch(u32, u32),
    #[error("subdivision parameters differ: source {0}, target {1}")]
    ParameterMismatch(u32, u32),
    #[error("star sums at source vertex {vertex} differ over target edges {edge_a} and {edge_b}: {val_a} vs {val_b}")]
    InconsistentStar {
        vertex: u32,
        edge_a: u32,
        edge_b: u32,
        val_a: String,
        val_b: String,
    },
    #[error("target vertex {0} has an empty fiber")]
    EmptyFiber(u32),
    #[error("function has {got} values, source has {want} vertices")]
    FunctionArity { got: usize, want: usize },
}

/// A simplicial projection from `source` (level i+1) onto the subdivision
/// of a level-i graph. Only structural validity (arity, simplicial
/// consistency, matching scales) is enforced at construction; everything
/// else is the business of [`Projection::check_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub source: MetricMeasureGraph,
    pub target: Subdivision,
    /// Source vertex -> target subdivision vertex.
    pub vertex_map: Vec<VertexId>,
    /// Source edge -> target subdivision edge.
    pub edge_map: Vec<EdgeId>,
    fiber_vertices: Vec<Vec<VertexId>>,
    fiber_edges: Vec<Vec<EdgeId>>,
}

impl Projection {
    pub fn new(
        source: MetricMeasureGraph,
        target: Subdivision,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<EdgeId>,
    ) -> Result<Self, StepError> {
        let tg = &target.graph;
        if source.level() != tg.level() {
            return Err(StepError::LevelMismatch(source.level(), tg.level() - 1));
        }
        if source.m() != tg.m() {
            return Err(StepError::ParameterMismatch(source.m(), tg.m()));
        }
        if vertex_map.len() != source.vertex_count() as usize {
            return Err(StepError::VertexMapArity {
                got: vertex_map.len(),
                want: source.vertex_count() as usize,
            });
        }
        if edge_map.len() != source.edge_count() {
            return Err(StepError::EdgeMapArity {
                got: edge_map.len(),
                want: source.edge_count(),
            });
        }
        for (i, v) in vertex_map.iter().enumerate() {
            if v.index() >= tg.vertex_count() as usize {
                return Err(StepError::VertexMapRange(i as u32, v.0));
            }
        }
        for (i, e) in edge_map.iter().enumerate() {
            if e.index() >= tg.edge_count() {
                return Err(StepError::EdgeMapRange(i as u32, e.0));
            }
        }
        for (i, e) in source.edges().iter().enumerate() {
            let image = tg.edge(edge_map[i]);
            let mut got = [
                vertex_map[e.ends[0].index()].0,
                vertex_map[e.ends[1].index()].0,
            ];
            got.sort_unstable();
            let want = [image.ends[0].0, image.ends[1].0];
            if got != want {
                return Err(StepError::NotSimplicial(i as u32, got, want));
            }
        }
        let mut fiber_vertices = vec![Vec::new(); tg.vertex_count() as usize];
        for (i, v) in vertex_map.iter().enumerate() {
            fiber_vertices[v.index()].push(VertexId(i as u32));
        }
        let mut fiber_edges = vec![Vec::new(); tg.edge_count()];
        for (i, e) in edge_map.iter().enumerate() {
            fiber_edges[e.index()].push(EdgeId(i as u32));
        }
        Ok(Projection {
            source,
            target,
            vertex_map,
            edge_map,
            fiber_vertices,
            fiber_edges,
        })
    }

    pub fn target_graph(&self) -> &MetricMeasureGraph {
        &self.target.graph
    }

    pub fn fiber_vertices(&self, v: VertexId) -> &[VertexId] {
        &self.fiber_vertices[v.index()]
    }

    pub fn fiber_edges(&self, e: EdgeId) -> &[EdgeId] {
        &self.fiber_edges[e.index()]
    }

    /// The end of source edge `e` lying over the given end of its image.
    pub fn end_over(&self, e: EdgeId, target_end: VertexId) -> VertexId {
        let ends = self.source.edge(e).ends;
        if self.vertex_map[ends[0].index()] == target_end {
            ends[0]
        } else {
            ends[1]
        }
    }

    /// Projects a source point to a point of the target subdivision graph.
    pub fn project_point(&self, p: &GraphPoint) -> GraphPoint {
        let image = self.edge_map[p.edge.index()];
        let ends = self.source.edge(p.edge).ends;
        let image_ends = self.target.graph.edge(image).ends;
        if self.vertex_map[ends[0].index()] == image_ends[0] {
            GraphPoint::new(image, p.offset.clone())
        } else {
            GraphPoint::new(image, self.source.edge_length() - &p.offset)
        }
    }

    /// Star sum at source vertex `w` over target edge `e`: the total
    /// source measure of edges at `w` lying over `e`, divided by the
    /// measure of `e`.
    fn star_sum(&self, w: VertexId, e: EdgeId) -> Rational {
        let mut total = Rational::zero();
        for &se in self.source.incident(w) {
            if self.edge_map[se.index()] == e {
                total += &self.source.edge(se).measure;
            }
        }
        total / &self.target.graph.edge(e).measure
    }

    /// The canonical disintegration weights induced by the two measures.
    /// Requires the star sums at every source vertex to agree across the
    /// target vertex's star (the continuity axiom).
    pub fn fuzzy_section(&self) -> Result<FuzzySection, StepError> {
        let tg = &self.target.graph;
        let mut edge_weight = Vec::with_capacity(self.source.edge_count());
        for (i, e) in self.source.edges().iter().enumerate() {
            let image = self.edge_map[i];
            edge_weight.push(&e.measure / &tg.edge(image).measure);
        }
        let mut vertex_weight = Vec::with_capacity(self.source.vertex_count() as usize);
        for w in 0..self.source.vertex_count() {
            let w = VertexId(w);
            let v = self.vertex_map[w.index()];
            let star = tg.incident(v);
            let first = star[0];
            let q = self.star_sum(w, first);
            for &e in &star[1..] {
                let other = self.star_sum(w, e);
                if other != q {
                    return Err(StepError::InconsistentStar {
                        vertex: w.0,
                        edge_a: first.0,
                        edge_b: e.0,
                        val_a: format_rational(&q),
                        val_b: format_rational(&other),
                    });
                }
            }
            vertex_weight.push(q);
        }
        Ok(FuzzySection {
            edge_weight,
            vertex_weight,
        })
    }

    /// Fiber averaging: pushes a piecewise linear function on the source
    /// down to one on the target subdivision by integrating against the
    /// disintegration. Affine on every target edge and continuous at
    /// target vertices by the continuity axiom.
    pub fn average_function(&self, f: &PlFunction) -> Result<PlFunction, StepError> {
        if f.values.len() != self.source.vertex_count() as usize {
            return Err(StepError::FunctionArity {
                got: f.values.len(),
                want: self.source.vertex_count() as usize,
            });
        }
        let fuzzy = self.fuzzy_section()?;
        let tg = &self.target.graph;
        let mut values = Vec::with_capacity(tg.vertex_count() as usize);
        for v in 0..tg.vertex_count() {
            let fiber = &self.fiber_vertices[v as usize];
            if fiber.is_empty() {
                return Err(StepError::EmptyFiber(v));
            }
            let mut acc = Rational::zero();
            for &w in fiber {
                acc += &fuzzy.vertex_weight[w.index()] * &f.values[w.index()];
            }
            values.push(acc);
        }
        Ok(PlFunction { values })
    }

    /// Largest fiber diameter, exact; `None` if some fiber spans
    /// disconnected components.
    pub fn max_fiber_diameter(&self) -> Option<Rational> {
        match self.fiber_diameter_within(None) {
            FiberDiameter::Exact(d) => Some(d),
            FiberDiameter::AtLeast(_) => None,
        }
    }

    /// Largest fiber diameter with distance searches cut off at `cutoff`.
    /// Vertex fibers are checked directly; over edge interiors the
    /// supremum of the sliding-fiber distance is maximized in closed form.
    /// The result is exact whenever it is below the cutoff; otherwise the
    /// diameter provably meets or exceeds the returned bound (the envelope
    /// is monotone in each pairwise distance).
    pub fn fiber_diameter_within(&self, cutoff: Option<&Rational>) -> FiberDiameter {
        let len = self.source.edge_length();
        let mut cache: Vec<Option<Vec<Option<Rational>>>> =
            vec![None; self.source.vertex_count() as usize];
        let dist = |cache: &mut Vec<Option<Vec<Option<Rational>>>>,
                        a: VertexId,
                        b: VertexId|
         -> Option<Rational> {
            if cache[a.index()].is_none() {
                let d = match cutoff {
                    Some(r) => self.source.vertex_distances_within(a, r),
                    None => self.source.vertex_distances(a),
                };
                cache[a.index()] = Some(d);
            }
            cache[a.index()].as_ref().unwrap()[b.index()].clone()
        };
        let far = || match cutoff {
            Some(r) => FiberDiameter::AtLeast(r.clone()),
            None => FiberDiameter::AtLeast(Rational::zero()),
        };
        let mut worst = Rational::zero();
        for fiber in &self.fiber_vertices {
            for (a, &wa) in fiber.iter().enumerate() {
                for &wb in &fiber[a + 1..] {
                    match dist(&mut cache, wa, wb) {
                        None => return far(),
                        Some(d) => worst = rational::max(worst, d),
                    }
                }
            }
        }
        let tg = &self.target.graph;
        for (ti, fiber) in self.fiber_edges.iter().enumerate() {
            if fiber.len() < 2 {
                continue;
            }
            let t_end0 = tg.edge(EdgeId(ti as u32)).ends[0];
            for (a, &ea) in fiber.iter().enumerate() {
                for &eb in &fiber[a + 1..] {
                    let ua = self.end_over(ea, t_end0);
                    let ub = self.end_over(eb, t_end0);
                    let va = self.source.other_end(ea, ua);
                    let vb = self.source.other_end(eb, ub);
                    let duu = dist(&mut cache, ua, ub);
                    let dvv = dist(&mut cache, va, vb);
                    let duv = dist(&mut cache, ua, vb);
                    let dvu = dist(&mut cache, va, ub);
                    match sliding_pair_sup(&len, &duu, &dvv, &duv, &dvu) {
                        Some(s) => worst = rational::max(worst, s),
                        None => return far(),
                    }
                }
            }
        }
        FiberDiameter::Exact(worst)
    }

    /// Runs the six admissibility checks and reports each one with a
    /// witness on failure. Failures are data, not errors.
    pub fn check_axioms(&self, params: &AxiomParams) -> AxiomReport {
        let checks = vec![
            self.check_axiom1(params),
            self.check_axiom2(),
            self.check_axiom3(params),
            self.check_axiom4(params),
            self.check_axiom5(),
            self.check_axiom6(),
        ];
        AxiomReport { checks }
    }

    fn check_axiom1(&self, params: &AxiomParams) -> AxiomCheck {
        let name = "bounded local geometry";
        if self.source.m() != params.m {
            return AxiomCheck::fail(
                1,
                name,
                format!(
                    "subdivision parameter {} differs from declared {}",
                    self.source.m(),
                    params.m
                ),
            );
        }
        if !self.source.is_connected() {
            return AxiomCheck::fail(1, name, "source graph is disconnected".into());
        }
        for v in 0..self.source.vertex_count() {
            let d = self.source.degree(VertexId(v));
            if d > params.delta as usize {
                return AxiomCheck::fail(
                    1,
                    name,
                    format!("vertex {v} has degree {d} > {}", params.delta),
                );
            }
            if d == 0 {
                return AxiomCheck::fail(1, name, format!("vertex {v} is isolated"));
            }
        }
        AxiomCheck::pass(1, name)
    }

    fn check_axiom2(&self) -> AxiomCheck {
        let name = "open simplicial projection";
        let tg = &self.target.graph;
        for (ti, fiber) in self.fiber_edges.iter().enumerate() {
            if fiber.is_empty() {
                return AxiomCheck::fail(2, name, format!("target edge {ti} has no preimage"));
            }
        }
        for w in 0..self.source.vertex_count() {
            let w = VertexId(w);
            let v = self.vertex_map[w.index()];
            for &te in tg.incident(v) {
                let covered = self
                    .source
                    .incident(w)
                    .iter()
                    .any(|&se| self.edge_map[se.index()] == te);
                if !covered {
                    return AxiomCheck::fail(
                        2,
                        name,
                        format!(
                            "no edge at source vertex {} covers target edge {} at vertex {}",
                            w.0, te.0, v.0
                        ),
                    );
                }
            }
        }
        AxiomCheck::pass(2, name)
    }

    fn check_axiom3(&self, params: &AxiomParams) -> AxiomCheck {
        let name = "controlled fiber diameter";
        let len = self.source.edge_length();
        let bound = &params.theta * &len;
        let cutoff = &bound + rational::int(3) * &len;
        match self.fiber_diameter_within(Some(&cutoff)) {
            FiberDiameter::AtLeast(x) => AxiomCheck::fail(
                3,
                name,
                format!("some fiber has diameter at least {}", format_rational(&x)),
            ),
            FiberDiameter::Exact(d) => {
                if d <= bound {
                    AxiomCheck::pass(3, name)
                } else {
                    AxiomCheck::fail(
                        3,
                        name,
                        format!(
                            "fiber diameter {} exceeds bound {}",
                            format_rational(&d),
                            format_rational(&bound)
                        ),
                    )
                }
            }
        }
    }

    fn check_axiom4(&self, params: &AxiomParams) -> AxiomCheck {
        let name = "bounded measure ratios";
        let c = &params.ratio_bound;
        let inv = Rational::one() / c;
        for v in 0..self.source.vertex_count() {
            let star = self.source.incident(VertexId(v));
            for (i, &ea) in star.iter().enumerate() {
                for &eb in &star[i + 1..] {
                    let ratio = &self.source.edge(ea).measure / &self.source.edge(eb).measure;
                    if ratio > *c || ratio < inv {
                        return AxiomCheck::fail(
                            4,
                            name,
                            format!(
                                "edges {} and {} at vertex {v} have measure ratio {}",
                                ea.0,
                                eb.0,
                                format_rational(&ratio)
                            ),
                        );
                    }
                }
            }
        }
        AxiomCheck::pass(4, name)
    }

    fn check_axiom5(&self) -> AxiomCheck {
        let name = "measure pushforward";
        let tg = &self.target.graph;
        for (ti, fiber) in self.fiber_edges.iter().enumerate() {
            let mut total = Rational::zero();
            for &e in fiber {
                total += &self.source.edge(e).measure;
            }
            let want = &tg.edge(EdgeId(ti as u32)).measure;
            if &total != want {
                return AxiomCheck::fail(
                    5,
                    name,
                    format!(
                        "fiber over target edge {ti} has measure {} instead of {}",
                        format_rational(&total),
                        format_rational(want)
                    ),
                );
            }
        }
        AxiomCheck::pass(5, name)
    }

    fn check_axiom6(&self) -> AxiomCheck {
        let name = "star continuity";
        let tg = &self.target.graph;
        for w in 0..self.source.vertex_count() {
            let w = VertexId(w);
            let v = self.vertex_map[w.index()];
            let star = tg.incident(v);
            let first = star[0];
            let q = self.star_sum(w, first);
            for &e in &star[1..] {
                let other = self.star_sum(w, e);
                if other != q {
                    return AxiomCheck::fail(
                        6,
                        name,
                        format!(
                            "source vertex {} has star sum {} over target edge {} but {} over {}",
                            w.0,
                            format_rational(&q),
                            first.0,
                            format_rational(&other),
                            e.0
                        ),
                    );
                }
            }
        }
        AxiomCheck::pass(6, name)
    }
}

/// Exact or lower-bounded largest fiber diameter.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberDiameter {
    Exact(Rational),
    AtLeast(Rational),
}

/// Supremum over `s in [0, len]` of the distance between the points at
/// parameter `s` on two edges lying over the same target edge. The distance
/// is the lower envelope of four lines (exit through either end of either
/// edge); its maximum sits at an endpoint or at the crossing of the rising
/// and falling lines. Unknown distances (beyond a search cutoff) drop
/// their line; `None` means every line is unknown.
fn sliding_pair_sup(
    len: &Rational,
    duu: &Option<Rational>,
    dvv: &Option<Rational>,
    duv: &Option<Rational>,
    dvu: &Option<Rational>,
) -> Option<Rational> {
    let two = rational::int(2);
    let env = |s: &Rational| -> Option<Rational> {
        let mut best: Option<Rational> = None;
        let mut push = |v: Rational| {
            best = Some(match best.take() {
                None => v,
                Some(b) => rational::min(b, v),
            });
        };
        if let Some(d) = duu {
            push(&two * s + d);
        }
        if let Some(d) = dvv {
            push(&two * &(len - s) + d);
        }
        if let Some(d) = duv {
            push(len + d);
        }
        if let Some(d) = dvu {
            push(len + d);
        }
        best
    };
    let mut best = match (env(&Rational::zero()), env(len)) {
        (Some(a), Some(b)) => rational::max(a, b),
        _ => return None,
    };
    // crossing of 2s + duu with 2(len - s) + dvv
    if let (Some(duu), Some(dvv)) = (duu, dvv) {
        let cross = (&two * len + dvv - duu) / rational::int(4);
        if cross > Rational::zero() && &cross < len {
            if let Some(v) = env(&cross) {
                best = rational::max(best, v);
            }
        }
    }
    Some(best)
}

/// Parameters the axioms are checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomParams {
    pub m: u32,
    pub delta: u32,
    pub theta: Rational,
    pub ratio_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

impl AxiomCheck {
    fn pass(axiom: u8, name: &'static str) -> Self {
        AxiomCheck {
            axiom,
            name,
            passed: true,
            witness: None,
        }
    }

    fn fail(axiom: u8, name: &'static str, witness: String) -> Self {
        AxiomCheck {
            axiom,
            name,
            passed: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.passed {
                out.push_str(&format!("axiom {} ({}): PASS\n", c.axiom, c.name));
            } else {
                out.push_str(&format!(
                    "axiom {} ({}): FAIL - {}\n",
                    c.axiom,
                    c.name,
                    c.witness.as_deref().unwrap_or("")
                ));
            }
        }
        out
    }
}

/// The disintegration weights of one step: per source edge the ratio of its
/// measure to its image's, per source vertex the common star sum. Weights
/// over any fiber sum to one once the pushforward axiom holds.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySection {
    pub edge_weight: Vec<Rational>,
    pub vertex_weight: Vec<Rational>,
}

impl FuzzySection {
    pub fn min_weight(&self) -> Rational {
        let mut best: Option<Rational> = None;
        for w in self.edge_weight.iter().chain(self.vertex_weight.iter()) {
            best = Some(match best {
                None => w.clone(),
                Some(b) => rational::min(b, w.clone()),
            });
        }
        best.unwrap_or_else(Rational::zero)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::graph::{fixtures::wedge_level1, unit_interval};
    use crate::rational::rat;

    /// The wedge step: level-1 wedge over the unit interval.
    /// Source vertices 0,1 (left), 2 (middle), 3,4 (right); target
    /// subdivision vertices 0,1 (originals), 2 (midpoint).
    pub fn wedge_step() -> Projection {
        let source = wedge_level1();
        let target = unit_interval(2).subdivide();
        Projection::new(
            source,
            target,
            vec![
                VertexId(0),
                VertexId(0),
                VertexId(2),
                VertexId(1),
                VertexId(1),
            ],
            vec![EdgeId(0), EdgeId(0), EdgeId(1), EdgeId(1)],
        )
        .unwrap()
    }

    /// Identity step over a graph: the source is the subdivision itself.
    pub fn identity_step(g: &MetricMeasureGraph) -> Projection {
        let target = g.subdivide();
        let source = target.graph.clone();
        let nv = source.vertex_count();
        let ne = source.edge_count();
        Projection::new(
            source,
            target,
            (0..nv).map(VertexId).collect(),
            (0..ne as u32).map(EdgeId).collect(),
        )
        .unwrap()
    }

    /// Two parallel target edges; the fiber over one is two disjoint
    /// strands, over the other three strands wired so that no positive
    /// measure can satisfy the continuity axiom. The arguments are the
    /// per-strand measures (each strand's two edges share it).
    pub fn nontrivial_step(e_measures: [Rational; 2], f_measures: [Rational; 3]) -> Projection {
        let parent = MetricMeasureGraph::new(
            0,
            2,
            2,
            vec![(0, 1, rational::int(1)), (0, 1, rational::int(1))],
        )
        .unwrap();
        let target = parent.subdivide();
        // source: p=0, q=1, r=2, s=3, a1=4, a2=5, b1=6, b2=7, b3=8
        let [m_pr, m_qs] = e_measures;
        let [n_pr, n_qr, n_qs] = f_measures;
        let edges = vec![
            (0, 4, m_pr.clone()), // p - a1   over e, first half
            (1, 5, m_qs.clone()), // q - a2
            (4, 2, m_pr),         // a1 - r   over e, second half
            (5, 3, m_qs),         // a2 - s
            (0, 6, n_pr.clone()), // p - b1   over f, first half
            (1, 7, n_qr.clone()), // q - b2
            (1, 8, n_qs.clone()), // q - b3
            (6, 2, n_pr),         // b1 - r   over f, second half
            (7, 2, n_qr),         // b2 - r
            (8, 3, n_qs),         // b3 - s
        ];
        let source = MetricMeasureGraph::new(1, 2, 9, edges).unwrap();
        let vmap = vec![
            VertexId(0),
            VertexId(0),
            VertexId(1),
            VertexId(1),
            VertexId(2),
            VertexId(2),
            VertexId(3),
            VertexId(3),
            VertexId(3),
        ];
        // target sub-edges: 0 = e[0,1/2], 1 = e[1/2,1], 2 = f[0,1/2], 3 = f[1/2,1]
        let emap = vec![
            EdgeId(0),
            EdgeId(0),
            EdgeId(1),
            EdgeId(1),
            EdgeId(2),
            EdgeId(2),
            EdgeId(2),
            EdgeId(3),
            EdgeId(3),
            EdgeId(3),
        ];
        Projection::new(source, target, vmap, emap).unwrap()
    }

    pub fn wedge_axiom_params() -> AxiomParams {
        AxiomParams {
            m: 2,
            delta: 4,
            theta: rational::int(2),
            ratio_bound: rat(2, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::graph::fixtures::{interval, wedge_level1};
    use crate::rational::{int, rat};

    #[test]
    fn wedge_step_passes_all_axioms() {
        let step = wedge_step();
        let report = step.check_axioms(&wedge_axiom_params());
        assert!(report.all_pass(), "{}", report.render());
    }

    #[test]
    fn identity_step_passes_all_axioms() {
        let step = identity_step(&wedge_level1());
        let params = AxiomParams {
            m: 2,
            delta: 4,
            theta: int(0),
            ratio_bound: int(2),
        };
        let report = step.check_axioms(&params);
        assert!(report.all_pass(), "{}", report.render());
        assert_eq!(step.max_fiber_diameter(), Some(int(0)));
    }

    #[test]
    fn nontrivial_step_fails_star_continuity_for_any_positive_measure() {
        // any strictly positive strand measures satisfying the pushforward
        // axiom break the continuity axiom
        for (e_meas, f_meas) in [
            ([rat(1, 4), rat(1, 4)], [rat(1, 6), rat(1, 6), rat(1, 6)]),
            ([rat(1, 8), rat(3, 8)], [rat(1, 4), rat(1, 8), rat(1, 8)]),
        ] {
            let step = nontrivial_step(e_meas, f_meas);
            let report = step.check_axioms(&AxiomParams {
                m: 2,
                delta: 6,
                theta: int(4),
                ratio_bound: int(8),
            });
            let a5 = &report.checks[4];
            let a6 = &report.checks[5];
            assert!(a5.passed, "{}", report.render());
            assert!(!a6.passed, "{}", report.render());
        }
    }

    #[test]
    fn wedge_fiber_diameter_is_exactly_one() {
        let step = wedge_step();
        assert_eq!(step.max_fiber_diameter(), Some(int(1)));
    }

    #[test]
    fn fuzzy_section_on_identity_is_trivial() {
        let step = identity_step(&interval());
        let fs = step.fuzzy_section().unwrap();
        assert!(fs.edge_weight.iter().all(|w| *w == int(1)));
        assert!(fs.vertex_weight.iter().all(|w| *w == int(1)));
    }

    #[test]
    fn fuzzy_section_on_wedge() {
        let step = wedge_step();
        let fs = step.fuzzy_section().unwrap();
        // every strand edge carries half of its image's measure
        for w in &fs.edge_weight {
            assert_eq!(*w, rat(1, 2));
        }
        // endpoint copies weigh 1/2, the middle vertex weighs 1
        assert_eq!(fs.vertex_weight[0], rat(1, 2));
        assert_eq!(fs.vertex_weight[1], rat(1, 2));
        assert_eq!(fs.vertex_weight[2], int(1));
        assert_eq!(fs.vertex_weight[3], rat(1, 2));
        assert_eq!(fs.vertex_weight[4], rat(1, 2));
        assert_eq!(fs.min_weight(), rat(1, 2));
    }

    #[test]
    fn fuzzy_section_error_names_offending_vertex() {
        let step = nontrivial_step(
            [rat(1, 4), rat(1, 4)],
            [rat(1, 6), rat(1, 6), rat(1, 6)],
        );
        match step.fuzzy_section() {
            Err(StepError::InconsistentStar { vertex, .. }) => {
                // p or q (vertices 0/1) are the first scanned offenders
                assert!(vertex <= 1);
            }
            other => panic!("expected InconsistentStar, got {other:?}"),
        }
    }

    #[test]
    fn averaging_constant_and_identity() {
        let step = wedge_step();
        let c = PlFunction::constant(&step.source, rat(5, 3));
        let avg = step.average_function(&c).unwrap();
        assert!(avg.values.iter().all(|v| *v == rat(5, 3)));

        let id_step = identity_step(&interval());
        let f =
            PlFunction::from_values(&id_step.source, vec![int(0), int(1), rat(1, 2)]).unwrap();
        let avg = id_step.average_function(&f).unwrap();
        assert_eq!(avg, f);
    }

    #[test]
    fn averaging_cancels_antisymmetric_strands() {
        let step = wedge_step();
        // +1 on one left strand, -1 on the other, 0 at and right of middle
        let f = PlFunction::from_values(
            &step.source,
            vec![int(1), int(-1), int(0), int(0), int(0)],
        )
        .unwrap();
        let avg = step.average_function(&f).unwrap();
        // target vertices: 0 = left end, 1 = right end, 2 = middle
        assert_eq!(avg.values[0], int(0));
        assert_eq!(avg.values[1], int(0));
        assert_eq!(avg.values[2], int(0));
    }

    #[test]
    fn averaging_satisfies_edge_integral_identity() {
        // integral of the average over a target edge equals the integral of
        // the function over that edge's fiber
        let step = wedge_step();
        let f = PlFunction::from_values(
            &step.source,
            vec![int(3), int(-2), rat(1, 2), int(1), int(0)],
        )
        .unwrap();
        let avg = step.average_function(&f).unwrap();
        let tg = step.target_graph();
        let two = int(2);
        for ti in 0..tg.edge_count() {
            let te = tg.edge(EdgeId(ti as u32));
            let lhs = (&avg.values[te.ends[0].index()] + &avg.values[te.ends[1].index()])
                * &te.measure
                / &two;
            let mut rhs = int(0);
            for &se in step.fiber_edges(EdgeId(ti as u32)) {
                let e = step.source.edge(se);
                rhs += (&f.values[e.ends[0].index()] + &f.values[e.ends[1].index()])
                    * &e.measure
                    / &two;
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn averaging_respects_pointwise_lip_bound() {
        let step = wedge_step();
        let f = PlFunction::from_values(
            &step.source,
            vec![int(4), int(-1), rat(3, 2), int(0), rat(-1, 2)],
        )
        .unwrap();
        let avg = step.average_function(&f).unwrap();
        let fs = step.fuzzy_section().unwrap();
        let tg = step.target_graph();
        for v in 0..tg.vertex_count() {
            let lhs = avg.pointwise_lip(tg, &tg.vertex_point(VertexId(v)));
            let mut rhs = int(0);
            for &w in step.fiber_vertices(VertexId(v)) {
                rhs += &fs.vertex_weight[w.index()]
                    * f.pointwise_lip(&step.source, &step.source.vertex_point(w));
            }
            assert!(lhs <= rhs, "lip bound fails at target vertex {v}");
        }
    }

    #[test]
    fn project_point_respects_orientation() {
        let step = wedge_step();
        // a point 1/8 along strand edge 1 (from left copy 1 toward middle)
        let p = GraphPoint::new(EdgeId(1), rat(1, 8));
        let q = step.project_point(&p);
        assert_eq!(q.edge, EdgeId(0));
        assert_eq!(q.offset, rat(1, 8));
    }
}
