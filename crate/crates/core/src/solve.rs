//! Exact rational linear programming and the measure-feasibility solver.
//!
//! Given a bare combinatorial projection step, decides whether strictly
//! positive source edge measures exist that satisfy the pushforward and
//! star-continuity constraints, by maximizing the minimum disintegration
//! weight. Problems here have tens of variables, so a dense textbook
//! simplex over big rationals is entirely adequate; Bland's rule makes it
//! terminate without any numerical tolerance.

use num_traits::Zero;

use crate::graph::{EdgeId, VertexId};
use crate::rational::{self, format_rational, Rational};
use crate::step::Projection;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));

    // Tableau over columns [x .. artificials | rhs], rows normalized to
    // nonnegative rhs so the artificial basis is feasible.
    let cols = n + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(cols + 1);
        let flip = b[i] < Rational::zero();
        for j in 0..n {
            row.push(if flip { -&a[i][j] } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i {
                rational::int(1)
            } else {
                Rational::zero()
            });
        }
        row.push(if flip { -&b[i] } else { b[i].clone() });
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: drive the artificial total to zero.
    let mut cost1 = vec![Rational::zero(); cols];
    for item in cost1.iter_mut().skip(n) {
        *item = rational::int(-1);
    }
    let phase1 = run_simplex(&mut t, &mut basis, &cost1, n + m);
    if phase1 == SimplexEnd::Unbounded {
        // cannot happen: the phase-1 objective is bounded by zero
        return LpOutcome::Infeasible;
    }
    let z1 = objective_value(&t, &basis, &cost1);
    if !z1.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Remove artificials from the basis; rows that cannot pivot on a real
    // column are redundant and dropped.
    let mut i = 0;
    while i < basis.len() {
        if basis[i] >= n {
            let pivot_col = (0..n).find(|&j| !t[i][j].is_zero());
            match pivot_col {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    // Phase 2 on the real columns only.
    for row in t.iter_mut() {
        let rhs = row.pop().expect("row has rhs");
        row.truncate(n);
        row.push(rhs);
    }
    let end = run_simplex(&mut t, &mut basis, c, n);
    if end == SimplexEnd::Unbounded {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i].last().unwrap().clone();
        }
    }
    let value = x
        .iter()
        .zip(c.iter())
        .fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}

#[derive(Debug, PartialEq, Eq)]
enum SimplexEnd {
    Optimal,
    Unbounded,
}

fn objective_value(t: &[Vec<Rational>], basis: &[usize], cost: &[Rational]) -> Rational {
    basis
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, &bi)| {
            acc + &cost[bi] * t[i].last().unwrap()
        })
}

fn reduced_costs(
    t: &[Vec<Rational>],
    basis: &[usize],
    cost: &[Rational],
    ncols: usize,
) -> Vec<Rational> {
    (0..ncols)
        .map(|j| {
            let mut r = cost[j].clone();
            for (i, &bi) in basis.iter().enumerate() {
                r -= &cost[bi] * &t[i][j];
            }
            r
        })
        .collect()
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v /= &p;
    }
    for i in 0..t.len() {
        if i == pr {
            continue;
        }
        let f = t[i][pc].clone();
        if f.is_zero() {
            continue;
        }
        for j in 0..t[i].len() {
            let delta = &f * &t[pr][j];
            t[i][j] -= delta;
        }
    }
    basis[pr] = pc;
}

/// Bland's rule simplex over the live columns `0..ncols`.
fn run_simplex(
    t: &mut Vec<Vec<Rational>>,
    basis: &mut Vec<usize>,
    cost: &[Rational],
    ncols: usize,
) -> SimplexEnd {
    loop {
        let reduced = reduced_costs(t, basis, cost, ncols);
        let entering = (0..ncols).find(|&j| reduced[j] > Rational::zero());
        let pc = match entering {
            None => return SimplexEnd::Optimal,
            Some(j) => j,
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..t.len() {
            if t[i][pc] > Rational::zero() {
                let ratio = t[i].last().unwrap() / &t[i][pc];
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        match leaving {
            None => return SimplexEnd::Unbounded,
            Some((pr, _)) => pivot(t, basis, pr, pc),
        }
    }
}

/// Result of the measure-feasibility problem on a combinatorial step.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSolve {
    /// Strictly positive measures exist; `measures` maximizes the minimum
    /// disintegration weight, which is `min_weight`.
    Feasible {
        measures: Vec<Rational>,
        min_weight: Rational,
    },
    Infeasible {
        witness: String,
    },
}

/// Finds positive source edge measures for a bare combinatorial projection
/// such that fiber sums match `target_measure`, star sums are continuous,
/// and every induced weight is at least `floor`; maximizes the minimum
/// weight. The source measures stored in `step` are ignored.
pub fn solve_measure(
    step: &Projection,
    target_measure: &[Rational],
    floor: &Rational,
) -> MeasureSolve {
    let tg = step.target_graph();
    assert_eq!(
        target_measure.len(),
        tg.edge_count(),
        "one target measure per target edge"
    );
    let ne = step.source.edge_count();
    let nv = step.source.vertex_count() as usize;
    // variables: measures x_0..x_{ne-1}, then t, then slacks s_0..s_{ne-1}
    let t_var = ne;
    let nvars = 2 * ne + 1;
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();

    // fiber sums equal the target measures
    for ti in 0..tg.edge_count() {
        let mut row = vec![Rational::zero(); nvars];
        for &e in step.fiber_edges(EdgeId(ti as u32)) {
            row[e.index()] = rational::int(1);
        }
        a.push(row);
        b.push(target_measure[ti].clone());
    }
    // star continuity at every source vertex
    for w in 0..nv {
        let w = VertexId(w as u32);
        let v = step.vertex_map[w.index()];
        let star = tg.incident(v);
        if star.len() < 2 {
            continue;
        }
        let first = star[0];
        for &other in &star[1..] {
            let mut row = vec![Rational::zero(); nvars];
            for &se in step.source.incident(w) {
                let image = step.edge_map[se.index()];
                if image == first {
                    row[se.index()] += rational::int(1) / &target_measure[first.index()];
                }
                if image == other {
                    row[se.index()] -= rational::int(1) / &target_measure[other.index()];
                }
            }
            a.push(row);
            b.push(Rational::zero());
        }
    }
    // weight floor: x_e - mu(image) * t - s_e = 0
    for e in 0..ne {
        let mut row = vec![Rational::zero(); nvars];
        row[e] = rational::int(1);
        let image = step.edge_map[e];
        row[t_var] = -target_measure[image.index()].clone();
        row[ne + 1 + e] = rational::int(-1);
        a.push(row);
        b.push(Rational::zero());
    }
    let mut c = vec![Rational::zero(); nvars];
    c[t_var] = rational::int(1);

    match maximize(&a, &b, &c) {
        LpOutcome::Infeasible => MeasureSolve::Infeasible {
            witness: "pushforward and star-continuity equalities are unsatisfiable".into(),
        },
        LpOutcome::Unbounded => MeasureSolve::Infeasible {
            witness: "objective unbounded; a target edge has an empty fiber or zero measure"
                .into(),
        },
        LpOutcome::Optimal { x, value } => {
            if value <= Rational::zero() || &value < floor {
                let zero_edge = (0..ne)
                    .min_by(|&i, &j| {
                        let wi = &x[i] / &target_measure[step.edge_map[i].index()];
                        let wj = &x[j] / &target_measure[step.edge_map[j].index()];
                        wi.cmp(&wj)
                    })
                    .unwrap_or(0);
                MeasureSolve::Infeasible {
                    witness: format!(
                        "maximin weight {} (< floor {}); tight at source edge {}",
                        format_rational(&value),
                        format_rational(floor),
                        zero_edge
                    ),
                }
            } else {
                MeasureSolve::Feasible {
                    measures: x[..ne].to_vec(),
                    min_weight: value,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::interval;
    use crate::rational::{int, rat};
    use crate::step::fixtures::{identity_step, nontrivial_step, wedge_step};

    #[test]
    fn lp_simple_bounded() {
        // maximize x + y st x + y + s = 1
        let a = vec![vec![int(1), int(1), int(1)]];
        let b = vec![int(1)];
        let c = vec![int(1), int(1), int(0)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_detects_infeasible() {
        // x = -1 with x >= 0
        let a = vec![vec![int(1)]];
        let b = vec![int(-1)];
        let c = vec![int(0)];
        assert_eq!(maximize(&a, &b, &c), LpOutcome::Infeasible);
    }

    #[test]
    fn lp_detects_unbounded() {
        // maximize x st x - s = 0
        let a = vec![vec![int(1), int(-1)]];
        let b = vec![int(0)];
        let c = vec![int(1), int(0)];
        assert_eq!(maximize(&a, &b, &c), LpOutcome::Unbounded);
    }

    #[test]
    fn lp_handles_redundant_rows() {
        let a = vec![
            vec![int(1), int(1)],
            vec![int(2), int(2)],
            vec![int(1), int(0)],
        ];
        let b = vec![int(1), int(2), rat(1, 3)];
        let c = vec![int(0), int(1)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x[0], rat(1, 3));
                assert_eq!(value, rat(2, 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_step_measure_is_target_measure() {
        let step = identity_step(&interval());
        let targets: Vec<Rational> = step
            .target_graph()
            .edges()
            .iter()
            .map(|e| e.measure.clone())
            .collect();
        match solve_measure(&step, &targets, &int(0)) {
            MeasureSolve::Feasible {
                measures,
                min_weight,
            } => {
                assert_eq!(measures, targets);
                assert_eq!(min_weight, int(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wedge_combinatorics_maximizer_splits_evenly() {
        let step = wedge_step();
        let targets: Vec<Rational> = step
            .target_graph()
            .edges()
            .iter()
            .map(|e| e.measure.clone())
            .collect();
        match solve_measure(&step, &targets, &int(0)) {
            MeasureSolve::Feasible {
                measures,
                min_weight,
            } => {
                assert_eq!(min_weight, rat(1, 2));
                for m in measures {
                    assert_eq!(m, rat(1, 4));
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nontrivial_combinatorics_is_infeasible() {
        // strand structure forces a zero weight, whatever the measure
        let step = nontrivial_step(
            [rat(1, 4), rat(1, 4)],
            [rat(1, 6), rat(1, 6), rat(1, 6)],
        );
        let targets: Vec<Rational> = step
            .target_graph()
            .edges()
            .iter()
            .map(|e| e.measure.clone())
            .collect();
        match solve_measure(&step, &targets, &int(0)) {
            MeasureSolve::Infeasible { witness } => {
                assert!(witness.contains("maximin weight 0"), "{witness}");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
