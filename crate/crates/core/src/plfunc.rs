//! Piecewise linear functions on a metric measure graph.
//!
//! A function is stored by its vertex values and is affine along every edge,
//! so it is continuous by construction. Functions with breakpoints at a
//! finer scale live on the subdivided graph; since subdivision is an
//! isometry preserving the measure, every integral below can be computed on
//! whichever representative carries the breakpoints.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, GraphError, GraphPoint, MetricMeasureGraph, Subdivision};
use crate::rational::{self, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlError {
    #[error("function has {got} values but the graph has {want} vertices")]
    WrongArity { got: usize, want: usize },
    #[error("ball has zero measure, mean undefined")]
    EmptyBall,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlFunction {
    pub values: Vec<Rational>,
}

/// Integral of |v0 + (v1 - v0) * s/len| ds over [a, b] in [0, len], scaled
/// by `density`; splits at the zero crossing so the result is exact.
fn integrate_abs_affine(
    v0: &Rational,
    v1: &Rational,
    len: &Rational,
    a: &Rational,
    b: &Rational,
    density: &Rational,
) -> Rational {
    if a >= b {
        return Rational::zero();
    }
    let slope = (v1 - v0) / len;
    let fa = v0 + &slope * a;
    let fb = v0 + &slope * b;
    let two = rational::int(2);
    if slope.is_zero() || fa.signum() == fb.signum() || fa.is_zero() || fb.is_zero() {
        // no sign change inside (a, b): trapezoid of |values|
        return (fa.abs() + fb.abs()) * (b - a) / two * density;
    }
    let root = -v0 / &slope;
    let left = fa.abs() * (&root - a) / &two;
    let right = fb.abs() * (b - &root) / &two;
    (left + right) * density
}

/// Signed integral of the affine interpolation over [a, b].
fn integrate_affine(
    v0: &Rational,
    v1: &Rational,
    len: &Rational,
    a: &Rational,
    b: &Rational,
    density: &Rational,
) -> Rational {
    if a >= b {
        return Rational::zero();
    }
    let slope = (v1 - v0) / len;
    let fa = v0 + &slope * a;
    let fb = v0 + &slope * b;
    (fa + fb) * (b - a) / rational::int(2) * density
}

impl PlFunction {
    pub fn from_values(g: &MetricMeasureGraph, values: Vec<Rational>) -> Result<Self, PlError> {
        if values.len() != g.vertex_count() as usize {
            return Err(PlError::WrongArity {
                got: values.len(),
                want: g.vertex_count() as usize,
            });
        }
        Ok(PlFunction { values })
    }

    pub fn constant(g: &MetricMeasureGraph, c: Rational) -> Self {
        PlFunction {
            values: vec![c; g.vertex_count() as usize],
        }
    }

    pub fn eval(&self, g: &MetricMeasureGraph, p: &GraphPoint) -> Rational {
        let e = g.edge(p.edge);
        let v0 = &self.values[e.ends[0].index()];
        let v1 = &self.values[e.ends[1].index()];
        v0 + (v1 - v0) * &p.offset / g.edge_length()
    }

    /// Signed slope along the storage orientation of `e`.
    pub fn slope(&self, g: &MetricMeasureGraph, e: EdgeId) -> Rational {
        let edge = g.edge(e);
        (&self.values[edge.ends[1].index()] - &self.values[edge.ends[0].index()])
            / g.edge_length()
    }

    /// Pointwise Lipschitz constant: |slope| at edge-interior points, the
    /// max of incident |slope|s at a vertex.
    pub fn pointwise_lip(&self, g: &MetricMeasureGraph, p: &GraphPoint) -> Rational {
        match g.canonical(p) {
            crate::graph::CanonPoint::Interior { edge, .. } => self.slope(g, edge).abs(),
            crate::graph::CanonPoint::Vertex(v) => {
                let mut best = Rational::zero();
                for &e in g.incident(v) {
                    best = rational::max(best, self.slope(g, e).abs());
                }
                best
            }
        }
    }

    /// Integral of the function over the whole graph.
    pub fn integral(&self, g: &MetricMeasureGraph) -> Rational {
        let two = rational::int(2);
        g.edges()
            .iter()
            .fold(Rational::zero(), |acc, e| {
                acc + (&self.values[e.ends[0].index()] + &self.values[e.ends[1].index()])
                    * &e.measure
                    / &two
            })
    }

    /// Integral of the function over the open ball `B_r(center)`.
    pub fn integral_on_ball(
        &self,
        g: &MetricMeasureGraph,
        center: &GraphPoint,
        r: &Rational,
    ) -> Result<Rational, PlError> {
        let hits = g.ball_intersections(center, r)?;
        Ok(self.integral_on_intervals(g, &hits))
    }

    pub(crate) fn integral_on_intervals(
        &self,
        g: &MetricMeasureGraph,
        hits: &[Vec<(Rational, Rational)>],
    ) -> Rational {
        let len = g.edge_length();
        let mut total = Rational::zero();
        for (i, intervals) in hits.iter().enumerate() {
            if intervals.is_empty() {
                continue;
            }
            let e = g.edge(EdgeId(i as u32));
            let density = g.density(EdgeId(i as u32));
            for (a, b) in intervals {
                total += integrate_affine(
                    &self.values[e.ends[0].index()],
                    &self.values[e.ends[1].index()],
                    &len,
                    a,
                    b,
                    &density,
                );
            }
        }
        total
    }

    /// Mean value over the open ball; errors if the ball has measure zero.
    pub fn mean_on_ball(
        &self,
        g: &MetricMeasureGraph,
        center: &GraphPoint,
        r: &Rational,
    ) -> Result<Rational, PlError> {
        let vol = g.ball_measure(center, r)?;
        if vol.is_zero() {
            return Err(PlError::EmptyBall);
        }
        Ok(self.integral_on_ball(g, center, r)? / vol)
    }

    /// Exact mean oscillation integral over the ball,
    /// `int_{B_r} |f - f_{B_r}| dmu`.
    pub fn integrate_deviation(
        &self,
        g: &MetricMeasureGraph,
        center: &GraphPoint,
        r: &Rational,
    ) -> Result<Rational, PlError> {
        let hits = g.ball_intersections(center, r)?;
        self.deviation_on_intervals(g, &hits)
    }

    pub(crate) fn deviation_on_intervals(
        &self,
        g: &MetricMeasureGraph,
        hits: &[Vec<(Rational, Rational)>],
    ) -> Result<Rational, PlError> {
        let vol = g.intervals_measure(hits);
        if vol.is_zero() {
            return Err(PlError::EmptyBall);
        }
        let mean = self.integral_on_intervals(g, hits) / &vol;
        let len = g.edge_length();
        let mut total = Rational::zero();
        for (i, intervals) in hits.iter().enumerate() {
            if intervals.is_empty() {
                continue;
            }
            let e = g.edge(EdgeId(i as u32));
            let density = g.density(EdgeId(i as u32));
            let v0 = &self.values[e.ends[0].index()] - &mean;
            let v1 = &self.values[e.ends[1].index()] - &mean;
            for (a, b) in intervals {
                total += integrate_abs_affine(&v0, &v1, &len, a, b, &density);
            }
        }
        Ok(total)
    }

    /// `int_{B_r} Lip f dmu`: vertices are null, so this is the sum over
    /// edges of |slope| times the measure of the edge's part of the ball.
    pub fn lip_integral(
        &self,
        g: &MetricMeasureGraph,
        center: &GraphPoint,
        r: &Rational,
    ) -> Result<Rational, PlError> {
        let hits = g.ball_intersections(center, r)?;
        Ok(self.lip_integral_on_intervals(g, &hits))
    }

    pub(crate) fn lip_integral_on_intervals(
        &self,
        g: &MetricMeasureGraph,
        hits: &[Vec<(Rational, Rational)>],
    ) -> Rational {
        let mut total = Rational::zero();
        for (i, intervals) in hits.iter().enumerate() {
            if intervals.is_empty() {
                continue;
            }
            let slope = self.slope(g, EdgeId(i as u32)).abs();
            if slope.is_zero() {
                continue;
            }
            let density = g.density(EdgeId(i as u32));
            for (a, b) in intervals {
                total += &slope * (b - a) * &density;
            }
        }
        total
    }

    /// Integral of Lip f over the whole graph.
    pub fn lip_total(&self, g: &MetricMeasureGraph) -> Rational {
        (0..g.edge_count()).fold(Rational::zero(), |acc, i| {
            acc + self.slope(g, EdgeId(i as u32)).abs() * &g.edge(EdgeId(i as u32)).measure
        })
    }

    /// The same function on the subdivided graph (interior breakpoints get
    /// the interpolated values).
    pub fn on_subdivision(&self, g: &MetricMeasureGraph, sub: &Subdivision) -> PlFunction {
        let mut values = Vec::with_capacity(sub.graph.vertex_count() as usize);
        for pp in &sub.parent_point {
            match pp {
                crate::graph::ParentPoint::Vertex(v) => values.push(self.values[v.index()].clone()),
                crate::graph::ParentPoint::Interior { edge, index } => {
                    let e = g.edge(*edge);
                    let v0 = &self.values[e.ends[0].index()];
                    let v1 = &self.values[e.ends[1].index()];
                    let t = rational::rat(*index as i64, g.m() as i64);
                    values.push(v0 + (v1 - v0) * t);
                }
            }
        }
        PlFunction { values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{interval, wedge_level1};
    use crate::graph::VertexId;
    use crate::rational::{int, rat};

    fn coordinate(g: &MetricMeasureGraph) -> PlFunction {
        // f(x) = x on the unit interval
        PlFunction::from_values(g, vec![int(0), int(1)]).unwrap()
    }

    #[test]
    fn eval_and_slope() {
        let g = interval();
        let f = coordinate(&g);
        assert_eq!(f.eval(&g, &GraphPoint::new(EdgeId(0), rat(1, 3))), rat(1, 3));
        assert_eq!(f.slope(&g, EdgeId(0)), int(1));
    }

    #[test]
    fn pointwise_lip_of_coordinate_and_constant() {
        let g = interval();
        let f = coordinate(&g);
        let p = GraphPoint::new(EdgeId(0), rat(2, 5));
        assert_eq!(f.pointwise_lip(&g, &p), int(1));
        let c = PlFunction::constant(&g, rat(7, 3));
        assert_eq!(c.pointwise_lip(&g, &p), int(0));
        assert_eq!(c.pointwise_lip(&g, &g.vertex_point(VertexId(0))), int(0));
    }

    #[test]
    fn distance_function_on_wedge_has_unit_slopes() {
        let g = wedge_level1();
        // distance to vertex 0 sampled at vertices: 0, 1, 1/2, 1, 1
        let f = PlFunction::from_values(
            &g,
            vec![int(0), int(1), rat(1, 2), int(1), int(1)],
        )
        .unwrap();
        for i in 0..g.edge_count() {
            let mid = g.midpoint(EdgeId(i as u32));
            assert_eq!(f.pointwise_lip(&g, &mid), int(1));
        }
        // lip integral over the whole space: unit slope, total measure 1
        let c = g.vertex_point(VertexId(2));
        assert_eq!(f.lip_integral(&g, &c, &int(10)).unwrap(), int(1));
    }

    #[test]
    fn pointwise_lip_stable_under_subdivision() {
        let g = wedge_level1();
        let f = PlFunction::from_values(
            &g,
            vec![int(0), int(1), rat(1, 2), int(1), int(1)],
        )
        .unwrap();
        let s = g.subdivide();
        let fs = f.on_subdivision(&g, &s);
        for i in 0..g.edge_count() {
            let p = g.midpoint(EdgeId(i as u32));
            let ps = s.from_parent_point(&g, &p);
            assert_eq!(f.pointwise_lip(&g, &p), fs.pointwise_lip(&s.graph, &ps));
        }
        // also at an original vertex
        let v = g.vertex_point(VertexId(2));
        let vs = s.from_parent_point(&g, &v);
        assert_eq!(f.pointwise_lip(&g, &v), fs.pointwise_lip(&s.graph, &vs));
    }

    #[test]
    fn deviation_on_whole_interval() {
        // int_0^1 |x - 1/2| dx = 1/4
        let g = interval();
        let f = coordinate(&g);
        let mid = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(f.integrate_deviation(&g, &mid, &int(2)).unwrap(), rat(1, 4));
        // constant functions have zero deviation
        let c = PlFunction::constant(&g, rat(-3, 7));
        assert_eq!(c.integrate_deviation(&g, &mid, &int(2)).unwrap(), int(0));
    }

    #[test]
    fn deviation_on_half_ball() {
        // int_{1/4}^{3/4} |x - 1/2| dx = 1/16
        let g = interval();
        let f = coordinate(&g);
        let mid = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(
            f.integrate_deviation(&g, &mid, &rat(1, 4)).unwrap(),
            rat(1, 16)
        );
    }

    #[test]
    fn deviation_invariances() {
        let g = wedge_level1();
        let f = PlFunction::from_values(
            &g,
            vec![int(2), int(-1), rat(1, 2), int(0), int(3)],
        )
        .unwrap();
        let c = g.midpoint(EdgeId(2));
        let r = rat(3, 8);
        let base = f.integrate_deviation(&g, &c, &r).unwrap();
        // f + const
        let shifted = PlFunction {
            values: f.values.iter().map(|v| v + int(5)).collect(),
        };
        assert_eq!(shifted.integrate_deviation(&g, &c, &r).unwrap(), base);
        // lambda * f scales by |lambda|
        let scaled = PlFunction {
            values: f.values.iter().map(|v| v * rat(-3, 2)).collect(),
        };
        assert_eq!(
            scaled.integrate_deviation(&g, &c, &r).unwrap(),
            base * rat(3, 2)
        );
    }

    #[test]
    fn lip_integral_whole_interval() {
        let g = interval();
        let f = coordinate(&g);
        let mid = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(f.lip_integral(&g, &mid, &int(3)).unwrap(), int(1));
        let c = PlFunction::constant(&g, int(4));
        assert_eq!(c.lip_integral(&g, &mid, &int(3)).unwrap(), int(0));
    }

    #[test]
    fn empty_ball_mean_is_an_error() {
        let g = interval();
        let f = coordinate(&g);
        let p = GraphPoint::new(EdgeId(0), rat(1, 2));
        assert_eq!(
            f.integrate_deviation(&g, &p, &int(0)).unwrap_err(),
            PlError::EmptyBall
        );
    }
}
