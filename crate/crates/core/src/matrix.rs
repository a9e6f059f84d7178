//! Probability matrices and the doubly stochastic toolbox.
//!
//! Special edge inverses are classified by probability matrices with
//! prescribed marginals; for rational marginals everything reduces to
//! doubly stochastic matrices and convex combinations of permutation
//! matrices. All decompositions here are exact.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use num_bigint::BigInt;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is empty or ragged")]
    BadShape,
    #[error("entry ({0},{1}) is negative")]
    NegativeEntry(usize, usize),
    #[error("entries sum to {0}, expected 1")]
    BadTotal(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("row {0} sums to {1}, expected 1")]
    BadRowSum(usize, String),
    #[error("column {0} sums to {1}, expected 1")]
    BadColSum(usize, String),
    #[error("row marginal {0} vanishes")]
    ZeroRowMarginal(usize),
    #[error("column marginal {0} vanishes")]
    ZeroColMarginal(usize),
    #[error("support has no perfect matching; rows {0:?} see only columns {1:?}")]
    HallViolation(Vec<usize>, Vec<usize>),
    #[error("support cell ({0},{1}) lies on no permutation inside the support")]
    UncoverableCell(usize, usize),
    #[error("multiplicity for support cell ({0},{1}) must be positive")]
    BadMultiplicity(usize, usize),
}

/// A nonnegative matrix with total mass one. Rows index the right-hand
/// fiber of an edge inverse, columns the left-hand fiber; the marginals are
/// the endpoint weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    pub entries: Vec<Vec<Rational>>,
}

impl ProbabilityMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(MatrixError::BadShape);
        }
        let cols = entries[0].len();
        let mut total = Rational::zero();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixError::BadShape);
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(MatrixError::NegativeEntry(i, j));
                }
                total += v;
            }
        }
        if !total.is_one() {
            return Err(MatrixError::BadTotal(format_rational(&total)));
        }
        Ok(ProbabilityMatrix { entries })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn row_marginals(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |a, v| a + v))
            .collect()
    }

    pub fn col_marginals(&self) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| {
                self.entries
                    .iter()
                    .fold(Rational::zero(), |a, row| a + &row[j])
            })
            .collect()
    }

    /// Uniform product matrix with the given marginals (entries
    /// `row_m[s] * col_m[t]`).
    pub fn product(row_m: &[Rational], col_m: &[Rational]) -> Result<Self, MatrixError> {
        let entries = row_m
            .iter()
            .map(|r| col_m.iter().map(|c| r * c).collect())
            .collect();
        ProbabilityMatrix::new(entries)
    }
}

/// Sums of rows and columns of a plain matrix.
fn line_sums(m: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Rational>) {
    let rows = m
        .iter()
        .map(|r| r.iter().fold(Rational::zero(), |a, v| a + v))
        .collect();
    let cols = (0..m[0].len())
        .map(|j| m.iter().fold(Rational::zero(), |a, r| a + &r[j]))
        .collect();
    (rows, cols)
}

/// Kuhn's augmenting-path maximum bipartite matching on a boolean support.
/// Returns `match_of_row` with `usize::MAX` for unmatched rows.
fn maximum_matching(support: &[Vec<bool>]) -> Vec<usize> {
    let n = support.len();
    let cols = support[0].len();
    let mut row_match = vec![usize::MAX; n];
    let mut col_match = vec![usize::MAX; cols];
    fn try_augment(
        r: usize,
        support: &[Vec<bool>],
        seen: &mut [bool],
        row_match: &mut [usize],
        col_match: &mut [usize],
    ) -> bool {
        for c in 0..support[r].len() {
            if support[r][c] && !seen[c] {
                seen[c] = true;
                if col_match[c] == usize::MAX
                    || try_augment(col_match[c], support, seen, row_match, col_match)
                {
                    row_match[r] = c;
                    col_match[c] = r;
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; cols];
        try_augment(r, support, &mut seen, &mut row_match, &mut col_match);
    }
    row_match
}

/// A set of rows whose joint neighborhood is smaller than the set, found
/// from an unmatched row by alternating reachability.
fn hall_witness(support: &[Vec<bool>]) -> (Vec<usize>, Vec<usize>) {
    let n = support.len();
    let row_match = maximum_matching(support);
    let cols = support[0].len();
    let mut col_match = vec![usize::MAX; cols];
    for (r, &c) in row_match.iter().enumerate() {
        if c != usize::MAX {
            col_match[c] = r;
        }
    }
    let start = match (0..n).find(|&r| row_match[r] == usize::MAX) {
        Some(r) => r,
        None => return (Vec::new(), Vec::new()),
    };
    let mut rows = vec![start];
    let mut cols_seen: Vec<usize> = Vec::new();
    let mut frontier = vec![start];
    while let Some(r) = frontier.pop() {
        for c in 0..cols {
            if support[r][c] && !cols_seen.contains(&c) {
                cols_seen.push(c);
                let next = col_match[c];
                if next != usize::MAX && !rows.contains(&next) {
                    rows.push(next);
                    frontier.push(next);
                }
            }
        }
    }
    rows.sort_unstable();
    cols_seen.sort_unstable();
    (rows, cols_seen)
}

/// Best additional gain achievable matching rows `popcount(mask)..n` into
/// the columns outside `mask`; `None` when no completion exists.
fn matching_gains(support: &[Vec<bool>], gain: &[Vec<u32>]) -> Vec<Option<i64>> {
    let n = support.len();
    let full = 1usize << n;
    let mut f = vec![None; full];
    f[full - 1] = Some(0i64);
    for mask in (0..full - 1).rev() {
        let r = (mask as u32).count_ones() as usize;
        if r >= n {
            continue;
        }
        let mut best: Option<i64> = None;
        for c in 0..n {
            if support[r][c] && mask & (1 << c) == 0 {
                if let Some(rest) = f[mask | (1 << c)] {
                    let total = rest + gain[r][c] as i64;
                    best = Some(best.map_or(total, |b: i64| b.max(total)));
                }
            }
        }
        f[mask] = best;
    }
    f
}

/// Lexicographically least (row by row, smallest column) perfect matching
/// maximizing the total gain.
fn lex_max_gain_matching(support: &[Vec<bool>], gain: &[Vec<u32>]) -> Option<Vec<usize>> {
    let n = support.len();
    let f = matching_gains(support, gain);
    f[0]?;
    let mut mask = 0usize;
    let mut perm = Vec::with_capacity(n);
    for r in 0..n {
        let want = f[mask].expect("state on an optimal path");
        let mut chosen = None;
        for c in 0..n {
            if support[r][c] && mask & (1 << c) == 0 {
                if let Some(rest) = f[mask | (1 << c)] {
                    if rest + gain[r][c] as i64 == want {
                        chosen = Some(c);
                        break;
                    }
                }
            }
        }
        let c = chosen.expect("optimal matching extends");
        perm.push(c);
        mask |= 1 << c;
    }
    Some(perm)
}

fn zero_gain(n: usize) -> Vec<Vec<u32>> {
    vec![vec![0; n]; n]
}

/// One term of a Birkhoff decomposition: a coefficient and the permutation
/// `row i -> column perm[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffTerm {
    pub coefficient: Rational,
    pub permutation: Vec<usize>,
}

/// Writes a doubly stochastic matrix (rows and columns summing to one) as
/// an exact convex combination of at most `(n-1)^2 + 1` permutation
/// matrices, by repeatedly extracting the lexicographically least perfect
/// matching on the support and subtracting the minimal entry along it.
pub fn birkhoff_decompose(m: &[Vec<Rational>]) -> Result<Vec<BirkhoffTerm>, MatrixError> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(MatrixError::NotSquare);
    }
    let (rows, cols) = line_sums(m);
    for (i, s) in rows.iter().enumerate() {
        if !s.is_one() {
            return Err(MatrixError::BadRowSum(i, format_rational(s)));
        }
    }
    for (j, s) in cols.iter().enumerate() {
        if !s.is_one() {
            return Err(MatrixError::BadColSum(j, format_rational(s)));
        }
    }
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if v.is_negative() {
                return Err(MatrixError::NegativeEntry(i, j));
            }
        }
    }
    let mut rest: Vec<Vec<Rational>> = m.to_vec();
    let mut terms = Vec::new();
    loop {
        let support: Vec<Vec<bool>> = rest
            .iter()
            .map(|r| r.iter().map(|v| !v.is_zero()).collect())
            .collect();
        if support.iter().all(|r| r.iter().all(|&s| !s)) {
            break;
        }
        let perm = match lex_max_gain_matching(&support, &zero_gain(n)) {
            Some(p) => p,
            None => {
                let (r, c) = hall_witness(&support);
                return Err(MatrixError::HallViolation(r, c));
            }
        };
        let coeff = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| rest[i][j].clone())
            .min()
            .expect("nonempty permutation");
        for (i, &j) in perm.iter().enumerate() {
            let v = &rest[i][j] - &coeff;
            rest[i][j] = v;
        }
        terms.push(BirkhoffTerm {
            coefficient: coeff,
            permutation: perm,
        });
    }
    Ok(terms)
}

/// Recombines a decomposition into the matrix it came from.
pub fn birkhoff_reconstruct(n: usize, terms: &[BirkhoffTerm]) -> Vec<Vec<Rational>> {
    let mut out = vec![vec![Rational::zero(); n]; n];
    for t in terms {
        for (i, &j) in t.permutation.iter().enumerate() {
            out[i][j] += &t.coefficient;
        }
    }
    out
}

/// The reduction of a rational-marginal probability matrix to uniform
/// marginals: a `d x d` matrix all of whose line sums are `1/d`, with maps
/// recording which original row/column each replicated line came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifted {
    pub matrix: Vec<Vec<Rational>>,
    pub row_rep: Vec<usize>,
    pub col_rep: Vec<usize>,
    pub d: u64,
}

impl Lifted {
    /// Collapses replicated lines back to the original matrix.
    pub fn contract(&self) -> ProbabilityMatrix {
        let rows = self.row_rep.iter().max().map_or(0, |&r| r + 1);
        let cols = self.col_rep.iter().max().map_or(0, |&c| c + 1);
        let mut entries = vec![vec![Rational::zero(); cols]; rows];
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                entries[self.row_rep[i]][self.col_rep[j]] += v;
            }
        }
        ProbabilityMatrix::new(entries).expect("contraction preserves mass")
    }
}

fn as_integer_times(value: &Rational, d: &BigInt) -> Option<u64> {
    let scaled = value * Rational::from_integer(d.clone());
    if scaled.is_integer() {
        let n = scaled.to_integer();
        u64::try_from(&n).ok()
    } else {
        None
    }
}

/// Replicates rows and columns so every marginal becomes `1/d`, where `d`
/// is the least common denominator of all marginals of `p`. Scaling the
/// result by `d` gives a doubly stochastic matrix; contracting returns `p`
/// exactly.
pub fn lift_to_doubly_stochastic(p: &ProbabilityMatrix) -> Result<Lifted, MatrixError> {
    let rho = p.row_marginals();
    let tau = p.col_marginals();
    for (i, r) in rho.iter().enumerate() {
        if r.is_zero() {
            return Err(MatrixError::ZeroRowMarginal(i));
        }
    }
    for (j, t) in tau.iter().enumerate() {
        if t.is_zero() {
            return Err(MatrixError::ZeroColMarginal(j));
        }
    }
    let mut d = BigInt::one();
    for v in rho.iter().chain(tau.iter()) {
        d = d.lcm(v.denom());
    }
    let alphas: Vec<u64> = rho
        .iter()
        .map(|r| as_integer_times(r, &d).expect("marginal times lcm is integral"))
        .collect();
    let betas: Vec<u64> = tau
        .iter()
        .map(|t| as_integer_times(t, &d).expect("marginal times lcm is integral"))
        .collect();
    // replicate rows
    let mut mid: Vec<Vec<Rational>> = Vec::new();
    let mut row_rep = Vec::new();
    for (s, row) in p.entries.iter().enumerate() {
        let alpha = Rational::from_integer(BigInt::from(alphas[s]));
        for _ in 0..alphas[s] {
            mid.push(row.iter().map(|v| v / &alpha).collect());
            row_rep.push(s);
        }
    }
    // replicate columns
    let mut out: Vec<Vec<Rational>> = vec![Vec::new(); mid.len()];
    let mut col_rep = Vec::new();
    for (t, &beta_count) in betas.iter().enumerate() {
        let beta = Rational::from_integer(BigInt::from(beta_count));
        for _ in 0..beta_count {
            for (i, row) in mid.iter().enumerate() {
                out[i].push(&row[t] / &beta);
            }
        }
    }
    for (t, &b) in betas.iter().enumerate() {
        for _ in 0..b {
            col_rep.push(t);
        }
    }
    let d_u64 = u64::try_from(&d).expect("denominator fits in u64 for these sizes");
    Ok(Lifted {
        matrix: out,
        row_rep,
        col_rep,
        d: d_u64,
    })
}

/// Builds the canonical probability matrix on a 0/1 support: finds
/// permutations inside the support whose union covers it exactly (greedy,
/// most new cells first, lexicographic ties) and returns their uniform
/// average scaled to total mass one. Every supported entry is then at
/// least `1/(n * #perms)`.
pub fn canonical_from_support(
    support: &[Vec<bool>],
) -> Result<(ProbabilityMatrix, Vec<Vec<usize>>), MatrixError> {
    let n = support.len();
    if n == 0 || support.iter().any(|r| r.len() != n) {
        return Err(MatrixError::NotSquare);
    }
    // every supported cell must lie on some permutation within the support
    for r in 0..n {
        for c in 0..n {
            if support[r][c] {
                let mut reduced: Vec<Vec<bool>> = support.to_vec();
                for k in 0..n {
                    reduced[r][k] = k == c;
                    if k != r {
                        reduced[k][c] = false;
                    }
                }
                reduced[r][c] = true;
                if maximum_matching(&reduced).iter().any(|&m| m == usize::MAX) {
                    return Err(MatrixError::UncoverableCell(r, c));
                }
            }
        }
    }
    if maximum_matching(support).iter().any(|&m| m == usize::MAX) {
        let (rows, cols) = hall_witness(support);
        return Err(MatrixError::HallViolation(rows, cols));
    }
    let mut covered = vec![vec![false; n]; n];
    let mut perms: Vec<Vec<usize>> = Vec::new();
    loop {
        let uncovered_left = (0..n).any(|r| (0..n).any(|c| support[r][c] && !covered[r][c]));
        if !uncovered_left {
            break;
        }
        let gain: Vec<Vec<u32>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| u32::from(support[r][c] && !covered[r][c]))
                    .collect()
            })
            .collect();
        let perm = lex_max_gain_matching(support, &gain)
            .expect("support admits a perfect matching");
        for (r, &c) in perm.iter().enumerate() {
            covered[r][c] = true;
        }
        perms.push(perm);
    }
    let count = Rational::from_integer(BigInt::from(perms.len() as u64 * n as u64));
    let mut entries = vec![vec![Rational::zero(); n]; n];
    for p in &perms {
        for (r, &c) in p.iter().enumerate() {
            entries[r][c] += Rational::one() / &count;
        }
    }
    Ok((ProbabilityMatrix::new(entries)?, perms))
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn matrix_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < ncols {
        let pivot_row = (rank..rows.len()).find(|&r| !rows[r][col].is_zero());
        match pivot_row {
            None => {
                col += 1;
                continue;
            }
            Some(pr) => {
                rows.swap(rank, pr);
                let pv = rows[rank][col].clone();
                for v in rows[rank].iter_mut() {
                    *v /= &pv;
                }
                for r in 0..rows.len() {
                    if r != rank && !rows[r][col].is_zero() {
                        let f = rows[r][col].clone();
                        for c in 0..ncols {
                            let delta = &f * &rows[rank][c];
                            rows[r][c] -= delta;
                        }
                    }
                }
                rank += 1;
                col += 1;
            }
        }
    }
    rank
}

/// The affine dimension of the doubly stochastic polytope for size `n`,
/// computed as `n^2` minus the exact rank of the row/column sum constraint
/// system.
pub fn doubly_stochastic_affine_dimension(n: usize) -> usize {
    let mut constraints = Vec::with_capacity(2 * n);
    for r in 0..n {
        let mut row = vec![Rational::zero(); n * n];
        for c in 0..n {
            row[r * n + c] = Rational::one();
        }
        constraints.push(row);
    }
    for c in 0..n {
        let mut row = vec![Rational::zero(); n * n];
        for r in 0..n {
            row[r * n + c] = Rational::one();
        }
        constraints.push(row);
    }
    n * n - matrix_rank(constraints)
}
