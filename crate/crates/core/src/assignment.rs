//! Globally optimal one-to-one matching of candidate pairs.
//!
//! Scores are quantized to integers before solving so that optimality and
//! tie-breaking are exact. Among all optimal assignments the solver returns
//! the lexicographically smallest one by (row, column).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::Strategy;
use crate::strategies::CandidatePair;

/// Quantization step for scores (1e-9).
pub const SCORE_SCALE: f64 = 1e9;

/// Dense score matrix: rows are pre ids, columns post ids. A cell without a
/// tag is not a candidate and holds 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    cells: Vec<f64>,
    tags: Vec<Option<Strategy>>,
}

impl ScoreMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>) -> Self {
        let n = rows.len() * cols.len();
        ScoreMatrix {
            rows,
            cols,
            cells: vec![0.0; n],
            tags: vec![None; n],
        }
    }

    /// Builds a matrix from raw scores; positive cells are tagged with
    /// `strategy`.
    pub fn from_scores(scores: &[Vec<f64>], strategy: Strategy) -> Self {
        let rows: Vec<String> = (0..scores.len()).map(|i| format!("r{i}")).collect();
        let width = scores.first().map_or(0, Vec::len);
        let cols: Vec<String> = (0..width).map(|j| format!("c{j}")).collect();
        let mut m = ScoreMatrix::new(rows, cols);
        for (i, row) in scores.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged score matrix");
            for (j, &s) in row.iter().enumerate() {
                if s > 0.0 {
                    m.set(i, j, s, strategy);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn score(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.cols.len() + col]
    }

    pub fn tag(&self, row: usize, col: usize) -> Option<Strategy> {
        self.tags[row * self.cols.len() + col]
    }

    fn set(&mut self, row: usize, col: usize, score: f64, tag: Strategy) {
        let k = row * self.cols.len() + col;
        self.cells[k] = score;
        self.tags[k] = Some(tag);
    }
}

fn tie_rank(s: Strategy) -> u8 {
    match s {
        Strategy::Location => 0,
        Strategy::Snippet => 1,
        _ => 2,
    }
}

/// Keeps the best score per (pre, post) cell; equal scores prefer the
/// location tag.
pub fn build_matrix(
    candidates: &[CandidatePair],
    pre_ids: &[String],
    post_ids: &[String],
) -> Result<ScoreMatrix> {
    let row_of: HashMap<&str, usize> = pre_ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let col_of: HashMap<&str, usize> = post_ids
        .iter()
        .enumerate()
        .map(|(j, s)| (s.as_str(), j))
        .collect();
    let mut m = ScoreMatrix::new(pre_ids.to_vec(), post_ids.to_vec());
    for c in candidates {
        let (Some(&i), Some(&j)) = (
            row_of.get(c.pre_id.as_str()),
            col_of.get(c.post_id.as_str()),
        ) else {
            return Err(Error::UnknownId(format!("{} -> {}", c.pre_id, c.post_id)));
        };
        let better = match m.tag(i, j) {
            None => true,
            Some(t) => {
                let cur = m.score(i, j);
                c.score > cur || (c.score == cur && tie_rank(c.strategy) < tie_rank(t))
            }
        };
        if better {
            m.set(i, j, c.score, c.strategy);
        }
    }
    Ok(m)
}

/// One accepted pair of [`solve_assignment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assigned {
    pub row: usize,
    pub col: usize,
    pub pre_id: String,
    pub post_id: String,
    pub score: f64,
    pub basis: Strategy,
}

pub fn quantize(score: f64) -> i64 {
    (score * SCORE_SCALE).round() as i64
}

/// Maximum-weight assignment on the candidate cells, keeping only pairs
/// scoring at least `min_score`.
pub fn solve_assignment(m: &ScoreMatrix, min_score: f64) -> Vec<Assigned> {
    let (r, c) = (m.rows.len(), m.cols.len());
    let n = r.max(c);
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let mut weights = vec![vec![0i64; n]; n];
    for (i, row) in weights.iter_mut().enumerate().take(r) {
        for (j, cell) in row.iter_mut().enumerate().take(c) {
            if m.tag(i, j).is_some() && m.score(i, j) >= min_score {
                *cell = quantize(m.score(i, j));
            }
        }
    }
    let perm = max_weight_assignment(&weights);
    let mut out = Vec::new();
    for (i, &j) in perm.iter().enumerate().take(r) {
        if j >= c {
            continue;
        }
        let Some(basis) = m.tag(i, j) else { continue };
        let score = m.score(i, j);
        if score < min_score {
            continue;
        }
        out.push(Assigned {
            row: i,
            col: j,
            pre_id: m.rows[i].clone(),
            post_id: m.cols[j].clone(),
            score,
            basis,
        });
    }
    out
}

/// Row-to-column permutation of maximum total weight over a square matrix.
/// Ties resolve to the lexicographically smallest permutation.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(weights.iter().all(|r| r.len() == n));
    let (u, v, col_of_row) = hungarian_min(n, |i, j| -weights[i][j]);
    lexicographic_optimum(n, |i, j| -weights[i][j], &u, &v, col_of_row)
}

/// Classic O(n^3) shortest augmenting path solver for a square cost matrix.
/// Returns row potentials, column potentials and the row assignment; the
/// potentials satisfy `u[i] + v[j] <= cost(i, j)` with equality on the
/// assigned cells.
fn hungarian_min(n: usize, cost: impl Fn(usize, usize) -> i64) -> (Vec<i64>, Vec<i64>, Vec<usize>) {
    const INF: i64 = i64::MAX / 4;
    // 1-based with column 0 as the virtual source
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![INF; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.fill(INF);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        col_of_row[p[j] - 1] = j - 1;
    }
    (u[1..].to_vec(), v[1..].to_vec(), col_of_row)
}

/// Walks rows in order and fixes each to the smallest column that still
/// admits a perfect matching on tight cells. Every perfect matching on the
/// tight cells of an optimal dual is optimal, and vice versa.
fn lexicographic_optimum(
    n: usize,
    cost: impl Fn(usize, usize) -> i64,
    u: &[i64],
    v: &[i64],
    mut col_of_row: Vec<usize>,
) -> Vec<usize> {
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| cost(i, j) == u[i] + v[j]).collect())
        .collect();
    let mut row_of_col = vec![0usize; n];
    for (i, &j) in col_of_row.iter().enumerate() {
        row_of_col[j] = i;
    }
    let mut locked_row = vec![false; n];
    let mut locked_col = vec![false; n];
    for i in 0..n {
        for &j in &tight[i] {
            if locked_col[j] {
                continue;
            }
            if col_of_row[i] == j {
                break;
            }
            // To give column j to row i, the row currently holding j must
            // reach i's current column through an alternating path.
            let start = row_of_col[j];
            let target = col_of_row[i];
            let found = alternating_path(
                (start, target),
                (i, j),
                &tight,
                (&row_of_col, &col_of_row),
                (&locked_row, &locked_col),
            );
            if let Some(path) = found {
                // path: rows r0=start, r1, ..., each taking the next column
                for (r, c) in path {
                    col_of_row[r] = c;
                    row_of_col[c] = r;
                }
                col_of_row[i] = j;
                row_of_col[j] = i;
                break;
            }
        }
        locked_row[i] = true;
        locked_col[col_of_row[i]] = true;
    }
    col_of_row
}

/// Breadth-first search over unlocked tight cells from row `start` to
/// column `target`. Returns the reassignments along the path.
fn alternating_path(
    (start, target): (usize, usize),
    (skip_row, skip_col): (usize, usize),
    tight: &[Vec<usize>],
    (row_of_col, col_of_row): (&[usize], &[usize]),
    (locked_row, locked_col): (&[bool], &[bool]),
) -> Option<Vec<(usize, usize)>> {
    let n = tight.len();
    let mut prev_row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut seen_row = vec![false; n];
    let mut queue = std::collections::VecDeque::from([start]);
    seen_row[start] = true;
    while let Some(r) = queue.pop_front() {
        for &c in &tight[r] {
            if locked_col[c] || c == skip_col || prev_row_of_col[c].is_some() {
                continue;
            }
            prev_row_of_col[c] = Some(r);
            if c == target {
                let mut path = Vec::new();
                let mut col = c;
                loop {
                    let row = prev_row_of_col[col].expect("visited");
                    path.push((row, col));
                    if row == start {
                        return Some(path);
                    }
                    col = col_of_row[row];
                }
            }
            let next = row_of_col[c];
            if next != skip_row && !locked_row[next] && !seen_row[next] {
                seen_row[next] = true;
                queue.push_back(next);
            }
        }
    }
    None
}
