//! Level-by-level metric measure diagnostics of a tower: doubling and
//! Poincaré-quotient profiles over exact ball computations, distance
//! growth between consecutive levels, certified intervals for the limit
//! distance, and the degeneracy profile governing branch density.
//!
//! Everything is an exact rational; reports are deterministic given seeds.
//! Grid evaluations are independent and run in parallel with a
//! deterministic max-reduction (ties resolved toward the earliest witness).

use num_traits::Zero;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::builder::InverseSystem;
use crate::graph::{EdgeId, GraphPoint, MetricMeasureGraph, VertexId};
use crate::plfunc::PlFunction;
use crate::rational::{self, format_rational, neg_pow, Rational};

/// One level's observed constants. `sample_spec` records how the grid and
/// corpus were produced so the report regenerates bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub level: u32,
    pub doubling_max: Option<(Rational, String)>,
    pub poincare_max: Option<(Rational, String)>,
    /// Witnesses with positive oscillation but zero gradient mass: genuine
    /// inequality violations if ever nonempty.
    pub violations: Vec<String>,
    pub sample_spec: String,
}

/// Default radii: the level scales `m^-j`, their doubles, and the
/// `(1+2θ)^-1` fractions, clipped to the base diameter.
pub fn default_radii(system: &InverseSystem, level: u32) -> Vec<Rational> {
    let m = system.params.m;
    let theta = &system.params.theta;
    let cap = system
        .level(0)
        .vertex_diameter()
        .unwrap_or_else(|_| rational::int(1));
    let shrink = rational::int(1) / (rational::int(1) + rational::int(2) * theta);
    let mut out: Vec<Rational> = Vec::new();
    for j in 0..=level {
        let base = neg_pow(m, j);
        for r in [
            base.clone(),
            rational::int(2) * &base,
            &shrink * &base,
        ] {
            if r > Rational::zero() && r <= cap && !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out.sort();
    out
}

/// Default centers: every vertex and every edge midpoint.
pub fn default_centers(g: &MetricMeasureGraph) -> Vec<GraphPoint> {
    let mut out: Vec<GraphPoint> = (0..g.vertex_count())
        .map(|v| g.vertex_point(VertexId(v)))
        .collect();
    out.extend((0..g.edge_count()).map(|e| g.midpoint(EdgeId(e as u32))));
    out
}

fn fold_max(
    a: Option<(Rational, String)>,
    b: Option<(Rational, String)>,
) -> Option<(Rational, String)> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some((va, wa)), Some((vb, wb))) => {
            if vb > va || (vb == va && wb < wa) {
                Some((vb, wb))
            } else {
                Some((va, wa))
            }
        }
    }
}

/// Largest observed `mu(B_2r) / mu(B_r)` over the grid.
pub fn doubling_profile(
    system: &InverseSystem,
    level: u32,
    centers: &[GraphPoint],
    radii: &[Rational],
) -> ConstantsReport {
    let g = system.level(level);
    let two = rational::int(2);
    let best = centers
        .par_iter()
        .enumerate()
        .map(|(ci, center)| {
            let dv = g.point_vertex_distances(center);
            let mut local: Option<(Rational, String)> = None;
            for (ri, r) in radii.iter().enumerate() {
                let small = g.intervals_measure(&g.ball_intersections_from(center, &dv, r));
                if small.is_zero() {
                    continue;
                }
                let big_r = &two * r;
                let big = g.intervals_measure(&g.ball_intersections_from(center, &dv, &big_r));
                let ratio = big / &small;
                let witness = format!(
                    "center {ci} (edge {}, offset {}), r = {}",
                    center.edge.0,
                    format_rational(&center.offset),
                    format_rational(&radii[ri])
                );
                local = fold_max(local, Some((ratio, witness)));
            }
            local
        })
        .reduce(|| None, fold_max);
    ConstantsReport {
        level,
        doubling_max: best,
        poincare_max: None,
        violations: Vec::new(),
        sample_spec: format!(
            "doubling: {} centers (vertices + midpoints), {} radii",
            centers.len(),
            radii.len()
        ),
    }
}

/// Largest observed Poincaré quotient
/// `int_{B_r}|f - f_B| / (r * int_{B_Lr} Lip f)` over centers, radii and
/// the corpus. Pairs where both sides vanish are skipped; a positive
/// oscillation against a zero gradient would be a violation and is
/// reported separately.
pub fn poincare_profile(
    system: &InverseSystem,
    level: u32,
    corpus: &[PlFunction],
    lambda: &Rational,
    centers: &[GraphPoint],
    radii: &[Rational],
) -> ConstantsReport {
    let g = system.level(level);
    struct Acc {
        best: Option<(Rational, String)>,
        violations: Vec<String>,
    }
    let acc = centers
        .par_iter()
        .enumerate()
        .map(|(ci, center)| {
            let dv = g.point_vertex_distances(center);
            let mut out = Acc {
                best: None,
                violations: Vec::new(),
            };
            for r in radii.iter() {
                let hits = g.ball_intersections_from(center, &dv, r);
                if g.intervals_measure(&hits).is_zero() {
                    continue;
                }
                let big_r = lambda * r;
                let big_hits = g.ball_intersections_from(center, &dv, &big_r);
                for (fi, f) in corpus.iter().enumerate() {
                    let num = f
                        .deviation_on_intervals(g, &hits)
                        .expect("ball has positive measure");
                    let den = r * f.lip_integral_on_intervals(g, &big_hits);
                    if den.is_zero() {
                        if !num.is_zero() {
                            out.violations.push(format!(
                                "f{fi} at center {ci}, r = {}: oscillation {} with zero gradient",
                                format_rational(r),
                                format_rational(&num)
                            ));
                        }
                        continue;
                    }
                    let q = num / den;
                    let witness = format!(
                        "f{fi} at center {ci}, r = {}",
                        format_rational(r)
                    );
                    out.best = fold_max(out.best.take(), Some((q, witness)));
                }
            }
            out
        })
        .reduce(
            || Acc {
                best: None,
                violations: Vec::new(),
            },
            |mut a, b| {
                a.best = fold_max(a.best.take(), b.best);
                a.violations.extend(b.violations);
                a
            },
        );
    ConstantsReport {
        level,
        doubling_max: None,
        poincare_max: acc.best,
        violations: acc.violations,
        sample_spec: format!(
            "poincare: {} centers, {} radii, corpus of {}, lambda = {}",
            centers.len(),
            radii.len(),
            corpus.len(),
            format_rational(lambda)
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    RandomVertexValues,
    DistanceFunctions,
    CoordinatePullbacks,
    BumpFunctions,
}

impl CorpusKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random_vertex_values" => Some(Self::RandomVertexValues),
            "distance_functions" => Some(Self::DistanceFunctions),
            "coordinate_pullbacks" => Some(Self::CoordinatePullbacks),
            "bump_functions" => Some(Self::BumpFunctions),
            _ => None,
        }
    }
}

/// The composite image of a level vertex down in the base graph.
pub fn composite_vertex_point(system: &InverseSystem, level: u32, v: VertexId) -> GraphPoint {
    let mut point = system.level(level).vertex_point(v);
    let mut l = level;
    while l > 0 {
        let step = system.step(l as usize - 1);
        let in_target = step.project_point(&point);
        point = step.target.to_parent_point(&in_target);
        l -= 1;
    }
    point
}

/// Deterministic seeded corpora of piecewise linear functions on a level.
pub fn corpus_generate(
    system: &InverseSystem,
    level: u32,
    kind: CorpusKind,
    count: usize,
    seed: u64,
) -> Vec<PlFunction> {
    let g = system.level(level);
    let nv = g.vertex_count() as usize;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CorpusKind::RandomVertexValues => (0..count)
            .map(|_| {
                let values = (0..nv)
                    .map(|_| {
                        let num = (rng.next_u64() % 33) as i64 - 16;
                        let den = (rng.next_u64() % 4) as i64 + 1;
                        rational::rat(num, den)
                    })
                    .collect();
                PlFunction { values }
            })
            .collect(),
        CorpusKind::DistanceFunctions => {
            // base points: all vertices first, then seeded repeats
            let mut out = Vec::with_capacity(count);
            for i in 0..count {
                let v = if i < nv {
                    VertexId(i as u32)
                } else {
                    VertexId((rng.next_u64() % nv as u64) as u32)
                };
                let d = g.vertex_distances(v);
                let values = d
                    .into_iter()
                    .map(|o| o.expect("levels are connected"))
                    .collect();
                out.push(PlFunction { values });
            }
            out
        }
        CorpusKind::CoordinatePullbacks => {
            let base = system.level(0);
            let mut out = Vec::new();
            for e0 in 0..base.edge_count() {
                let chart = coordinate_chart(base, EdgeId(e0 as u32));
                let values = (0..nv)
                    .map(|v| {
                        let p = composite_vertex_point(system, level, VertexId(v as u32));
                        chart.eval(base, &p)
                    })
                    .collect();
                out.push(PlFunction { values });
            }
            out
        }
        CorpusKind::BumpFunctions => (0..count)
            .map(|_| {
                let v = VertexId((rng.next_u64() % nv as u64) as u32);
                let j = rng.next_u64() % (level as u64 + 1);
                let h = neg_pow(g.m(), j as u32);
                let d = g.vertex_distances(v);
                let values = d
                    .into_iter()
                    .map(|o| {
                        let dist = o.expect("levels are connected");
                        rational::max(Rational::zero(), &h - &dist)
                    })
                    .collect();
                PlFunction { values }
            })
            .collect(),
    }
}

/// Arclength coordinate along one base edge, clamped elsewhere: value 0 at
/// the edge's first end, 1 at its second, `min(1, d(., end0))` at other
/// vertices.
fn coordinate_chart(base: &MetricMeasureGraph, e: EdgeId) -> PlFunction {
    let ends = base.edge(e).ends;
    let d = base.vertex_distances(ends[0]);
    let one = rational::int(1);
    let values = (0..base.vertex_count() as usize)
        .map(|v| {
            if VertexId(v as u32) == ends[1] {
                one.clone()
            } else {
                let dist = d[v].clone().expect("base is connected");
                rational::min(one.clone(), dist)
            }
        })
        .collect();
    PlFunction { values }
}

/// Exhaustive check of the two-sided distance growth bound between a level
/// and the one below it:
/// `d_{i-1}(px, py) <= d_i(x, y) <= d_{i-1}(px, py) + 2 theta m^-i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    pub pass: bool,
    pub pairs_checked: usize,
    pub worst_slack: Rational,
    pub witness: Option<(u32, u32)>,
}

pub fn distance_growth_check(system: &InverseSystem, level: u32) -> GrowthCheck {
    assert!(level >= 1, "growth compares a level to its parent");
    let step = system.step(level as usize - 1);
    let g = &step.source;
    let tg = step.target_graph();
    let slack = rational::int(2) * &system.params.theta * g.edge_length();
    let nv = g.vertex_count();
    // distances in the subdivision graph are the parent-level distances
    let mut image_dist: Vec<Option<Vec<Option<Rational>>>> =
        vec![None; tg.vertex_count() as usize];
    let mut pass = true;
    let mut worst = Rational::zero();
    let mut witness = None;
    let mut pairs = 0usize;
    for x in 0..nv {
        let dx = g.vertex_distances(VertexId(x));
        let ix = step.vertex_map[x as usize];
        if image_dist[ix.index()].is_none() {
            image_dist[ix.index()] = Some(tg.vertex_distances(ix));
        }
        let low = image_dist[ix.index()].as_ref().unwrap();
        for y in (x + 1)..nv {
            pairs += 1;
            let iy = step.vertex_map[y as usize];
            let high = dx[y as usize].clone().expect("level is connected");
            let lo = low[iy.index()].clone().expect("level is connected");
            if lo > high || high > &lo + &slack {
                pass = false;
            }
            let gap = &high - &lo;
            if gap > worst {
                worst = gap;
                witness = Some((x, y));
            }
        }
    }
    GrowthCheck {
        pass,
        pairs_checked: pairs,
        worst_slack: worst,
        witness,
    }
}

/// Certified interval for the limit distance of two points given their
/// level-`n` positions: the lower end is the level-`n` distance, the upper
/// adds the full tail `2 theta m^-n / (m - 1)` the growth bound allows.
pub fn dinf_interval(
    system: &InverseSystem,
    level: u32,
    p: &GraphPoint,
    q: &GraphPoint,
) -> (Rational, Rational) {
    let g = system.level(level);
    let lo = g.distance(p, q).expect("levels are connected");
    let m = system.params.m;
    let tail = rational::int(2) * &system.params.theta * neg_pow(m, level)
        / rational::int(m as i64 - 1);
    let hi = &lo + tail;
    (lo, hi)
}

/// Per-level values `m^i * d_i(x_i, V_i^{>=3})` along the projections of a
/// point, `None` where no vertex of degree three or more exists. Bounded
/// values detect branch points staying close at every scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyProfile {
    pub values: Vec<Option<Rational>>,
}

impl DegeneracyProfile {
    /// True when every level from 1 on has a finite value at most `bound`.
    pub fn nondegenerate_within(&self, bound: &Rational) -> bool {
        if self.values.len() <= 1 {
            return false;
        }
        self.values[1..]
            .iter()
            .all(|v| matches!(v, Some(x) if x <= bound))
    }
}

pub fn degeneracy_profile(system: &InverseSystem, x: &GraphPoint) -> DegeneracyProfile {
    let depth = system.depth() as u32;
    // project the point down through all levels
    let mut points = vec![x.clone()];
    for l in (1..=depth).rev() {
        let step = system.step(l as usize - 1);
        let in_target = step.project_point(points.last().unwrap());
        points.push(step.target.to_parent_point(&in_target));
    }
    points.reverse();
    let mut values = Vec::with_capacity(depth as usize + 1);
    for (i, point) in points.iter().enumerate() {
        let g = system.level(i as u32);
        let branch: Vec<VertexId> = (0..g.vertex_count())
            .filter(|&v| g.degree(VertexId(v)) >= 3)
            .map(VertexId)
            .collect();
        if branch.is_empty() {
            values.push(None);
            continue;
        }
        let dv = g.point_vertex_distances(point);
        let mut best: Option<Rational> = None;
        for v in branch {
            if let Some(d) = &dv[v.index()] {
                best = Some(match best.take() {
                    None => d.clone(),
                    Some(b) => rational::min(b, d.clone()),
                });
            }
        }
        let scale = rational::int(1) / neg_pow(g.m(), i as u32);
        values.push(best.map(|d| d * scale));
    }
    DegeneracyProfile { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_preset;
    use crate::rational::{int, rat};
    use num_traits::Signed;

    #[test]
    fn doubling_on_the_interval_is_two() {
        let sys = build_preset("identity", 2, 2, 0).unwrap();
        let g = sys.level(2);
        // interior centers at small radii see exactly ratio 2
        let centers = vec![g.midpoint(EdgeId(1))];
        let radii = vec![rat(1, 16)];
        let rep = doubling_profile(&sys, 2, &centers, &radii);
        assert_eq!(rep.doubling_max.unwrap().0, int(2));
        // one-sided at an endpoint is still 2
        let centers = vec![g.vertex_point(VertexId(0))];
        let rep = doubling_profile(&sys, 2, &centers, &radii);
        assert_eq!(rep.doubling_max.unwrap().0, int(2));
    }

    #[test]
    fn doubling_default_grid_on_laakso() {
        let sys = build_preset("laakso_like", 2, 2, 0).unwrap();
        let g = sys.level(2);
        let rep = doubling_profile(&sys, 2, &default_centers(g), &default_radii(&sys, 2));
        let (v, _) = rep.doubling_max.unwrap();
        assert!(v >= int(2));
        assert!(v <= int(8), "doubling blew up: {v}");
    }

    #[test]
    fn poincare_quotient_for_coordinate_on_interval() {
        // f(x) = x on [0,1], ball = the whole space at lambda = 1:
        // deviation 1/4 over r * mass 1 at r = 1/2... the quotient with
        // r = 1 and ball B_1(midpoint) = everything: 1/4 / (1 * 1) = 1/4;
        // with the ball of radius 1/2 about the midpoint (still everything
        // except endpoints): 1/4 / (1/2 * 1) = 1/2.
        let sys = build_preset("identity", 2, 1, 0).unwrap();
        let g = sys.level(1);
        let f = PlFunction::from_values(g, vec![int(0), int(1), rat(1, 2)]).unwrap();
        let centers = vec![g.vertex_point(VertexId(2))];
        let radii = vec![rat(1, 2)];
        let rep = poincare_profile(&sys, 1, &[f], &int(1), &centers, &radii);
        assert_eq!(rep.poincare_max.unwrap().0, rat(1, 2));
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn constant_functions_are_skipped() {
        let sys = build_preset("identity", 2, 1, 0).unwrap();
        let g = sys.level(1);
        let c = PlFunction::constant(g, rat(7, 2));
        let centers = default_centers(g);
        let radii = default_radii(&sys, 1);
        let rep = poincare_profile(&sys, 1, &[c], &int(2), &centers, &radii);
        assert!(rep.poincare_max.is_none());
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn corpora_are_seed_deterministic() {
        let sys = build_preset("laakso_like", 2, 2, 0).unwrap();
        for kind in [
            CorpusKind::RandomVertexValues,
            CorpusKind::DistanceFunctions,
            CorpusKind::BumpFunctions,
        ] {
            let a = corpus_generate(&sys, 2, kind, 10, 42);
            let b = corpus_generate(&sys, 2, kind, 10, 42);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn coordinate_pullback_on_identity_tower_is_the_coordinate() {
        let sys = build_preset("identity", 2, 3, 0).unwrap();
        let fs = corpus_generate(&sys, 3, CorpusKind::CoordinatePullbacks, 1, 0);
        assert_eq!(fs.len(), 1);
        let g = sys.level(3);
        // value at each vertex is its position along the interval
        for v in 0..g.vertex_count() {
            let p = composite_vertex_point(&sys, 3, VertexId(v));
            let expected = p.offset; // base edge 0 starts at coordinate 0
            assert_eq!(fs[0].values[v as usize], expected);
        }
        // slopes are 1 everywhere
        for e in 0..g.edge_count() {
            assert_eq!(fs[0].slope(g, EdgeId(e as u32)).abs(), int(1));
        }
    }

    #[test]
    fn distance_corpus_has_unit_slopes_on_wedge() {
        let sys = build_preset("laakso_like", 2, 1, 0).unwrap();
        let fs = corpus_generate(&sys, 1, CorpusKind::DistanceFunctions, 5, 0);
        let g = sys.level(1);
        for f in &fs {
            for e in 0..g.edge_count() {
                assert_eq!(f.slope(g, EdgeId(e as u32)).abs(), int(1));
            }
        }
    }

    #[test]
    fn growth_check_identity_has_zero_slack() {
        let sys = build_preset("identity", 2, 3, 0).unwrap();
        for level in 1..=3 {
            let gc = distance_growth_check(&sys, level);
            assert!(gc.pass);
            assert_eq!(gc.worst_slack, int(0));
        }
    }

    #[test]
    fn growth_check_wedge_level_one() {
        // the two left copies project to the same point; their distance 1
        // fits within 2 theta m^-1 = 2
        let sys = build_preset("laakso_like", 2, 1, 0).unwrap();
        let gc = distance_growth_check(&sys, 1);
        assert!(gc.pass);
        assert_eq!(gc.worst_slack, int(1));
    }

    #[test]
    fn growth_check_laakso_level_three() {
        let sys = build_preset("laakso_like", 2, 3, 0).unwrap();
        for level in 1..=3 {
            assert!(distance_growth_check(&sys, level).pass);
        }
    }

    #[test]
    fn dinf_intervals_nest_and_identity_is_tight() {
        let idsys = build_preset("identity", 2, 3, 0).unwrap();
        let g = idsys.level(3);
        let p = g.vertex_point(VertexId(0));
        let q = g.vertex_point(VertexId(1));
        let (lo, hi) = dinf_interval(&idsys, 3, &p, &q);
        assert_eq!(lo, hi); // theta = 0

        let sys = build_preset("laakso_like", 2, 3, 0).unwrap();
        let top = sys.level(3);
        let p3 = top.vertex_point(VertexId(0));
        let q3 = top.vertex_point(VertexId(3));
        let (lo3, hi3) = dinf_interval(&sys, 3, &p3, &q3);
        assert_eq!(&hi3 - &lo3, int(4) * rat(1, 8)); // 2 theta m^-3 / (m-1)
        // same point: lower end zero
        let (lz, hz) = dinf_interval(&sys, 3, &p3, &p3);
        assert_eq!(lz, int(0));
        assert!(hz > int(0));
        // project down one level: the deeper interval nests inside
        let step = sys.step(2);
        let p2 = step.target.to_parent_point(&step.project_point(&p3));
        let q2 = step.target.to_parent_point(&step.project_point(&q3));
        let (lo2, hi2) = dinf_interval(&sys, 2, &p2, &q2);
        assert!(lo2 <= lo3 && hi3 <= hi2);
    }

    #[test]
    fn degeneracy_flags_identity_and_degenerate_but_not_laakso() {
        let bound = int(2);

        let id = build_preset("identity", 2, 4, 0).unwrap();
        let x = id.top().vertex_point(VertexId(0));
        let prof = degeneracy_profile(&id, &x);
        assert!(prof.values.iter().all(|v| v.is_none()));
        assert!(!prof.nondegenerate_within(&bound));

        let laakso = build_preset("laakso_like", 2, 4, 0).unwrap();
        let x = laakso.top().vertex_point(VertexId(0));
        let prof = degeneracy_profile(&laakso, &x);
        assert!(prof.nondegenerate_within(&bound), "{:?}", prof.values);

        let degen = build_preset("degenerate", 2, 4, 0).unwrap();
        let x = degen.top().vertex_point(VertexId(0));
        let prof = degeneracy_profile(&degen, &x);
        assert!(!prof.nondegenerate_within(&bound));
        // the rescaled distances grow geometrically once the hub is fixed
        let v: Vec<&Rational> = prof.values[1..].iter().flatten().collect();
        for pair in v.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        assert!(*v.last().unwrap() > &bound);
    }
}
