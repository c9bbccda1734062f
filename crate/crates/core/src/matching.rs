//! Bipartite matching primitives.
//!
//! Every solver in the crate reduces to one of four questions on a
//! rectangular weight matrix: a min-weight perfect matching, a maximum
//! cardinality matching, a min-weight matching among the maximum cardinality
//! ones, and a bottleneck matching (minimise the longest edge).
//!
//! Disallowed edges are `None` entries, never a large sentinel weight, so a
//! bottleneck value is always one of the finite entries of the matrix.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Absolute tolerance for comparing objective values.
pub const EPS: f64 = 1e-9;

/// Dense `rows x cols` matrix of nonnegative edge weights; `None` marks a
/// forbidden edge.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Option<f64>>,
}

impl WeightMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let w = f(i, j);
                debug_assert!(w.is_none_or(|x| x >= 0.0 && x.is_finite()), "weight {w:?} at ({i},{j})");
                data.push(w);
            }
        }
        WeightMatrix { rows, cols, data }
    }

    /// Complete matrix from nested rows. Non-finite entries become forbidden.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged weight matrix");
        WeightMatrix::from_fn(rows.len(), cols, |i, j| {
            let w = rows[i][j];
            w.is_finite().then_some(w)
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.data[i * self.cols + j]
    }

    /// Copy keeping only edges of weight at most `threshold`.
    pub fn restricted(&self, threshold: f64) -> Self {
        WeightMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|w| w.filter(|&x| x <= threshold)).collect(),
        }
    }

    /// Sorted distinct finite weights.
    pub fn distinct_weights(&self) -> Vec<f64> {
        let mut ws: Vec<f64> = self.data.iter().flatten().copied().collect();
        ws.sort_by(f64::total_cmp);
        ws.dedup();
        ws
    }
}

/// A set of `(left, right)` pairs with its total and bottleneck weight.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
    pub bottleneck: f64,
}

impl Matching {
    /// Builds a matching from a row assignment, reading weights from `w`.
    pub fn from_assignment(w: &WeightMatrix, row_to_col: &[Option<usize>]) -> Self {
        let pairs: Vec<(usize, usize)> = row_to_col
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|j| (i, j)))
            .collect();
        let mut total_weight = 0.0;
        let mut bottleneck: f64 = 0.0;
        for &(i, j) in &pairs {
            let x = w.weight(i, j).expect("matching uses a forbidden edge");
            total_weight += x;
            bottleneck = bottleneck.max(x);
        }
        Matching { pairs, total_weight, bottleneck }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn right_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().map(|&(_, j)| j).collect();
        v.sort_unstable();
        v
    }
}

/// Maximum cardinality matching over allowed edges (Hopcroft-Karp).
pub fn max_cardinality_matching(w: &WeightMatrix) -> Matching {
    let assignment = hopcroft_karp(w);
    Matching::from_assignment(w, &assignment)
}

/// Cardinality of a maximum matching; cheaper than building the `Matching`.
pub fn max_cardinality(w: &WeightMatrix) -> usize {
    hopcroft_karp(w).iter().filter(|c| c.is_some()).count()
}

fn hopcroft_karp(w: &WeightMatrix) -> Vec<Option<usize>> {
    let (n, m) = (w.rows, w.cols);
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..m).filter(|&j| w.weight(i, j).is_some()).collect())
        .collect();
    let mut row_match: Vec<Option<usize>> = vec![None; n];
    let mut col_match: Vec<Option<usize>> = vec![None; m];
    let mut layer = vec![usize::MAX; n];

    loop {
        // BFS from free rows, layering the alternating forest.
        let mut queue = VecDeque::new();
        for i in 0..n {
            if row_match[i].is_none() {
                layer[i] = 0;
                queue.push_back(i);
            } else {
                layer[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                match col_match[j] {
                    None => found = true,
                    Some(k) if layer[k] == usize::MAX => {
                        layer[k] = layer[i] + 1;
                        queue.push_back(k);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; n];
        for i in 0..n {
            if row_match[i].is_none() {
                augment(i, &adj, &mut layer, &mut next, &mut row_match, &mut col_match);
            }
        }
    }
    row_match
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    layer: &mut [usize],
    next: &mut [usize],
    row_match: &mut [Option<usize>],
    col_match: &mut [Option<usize>],
) -> bool {
    while next[i] < adj[i].len() {
        let j = adj[i][next[i]];
        next[i] += 1;
        let ok = match col_match[j] {
            None => true,
            Some(k) => layer[k] == layer[i] + 1 && augment(k, adj, layer, next, row_match, col_match),
        };
        if ok {
            row_match[i] = Some(j);
            col_match[j] = Some(i);
            return true;
        }
    }
    layer[i] = usize::MAX;
    false
}

/// Among all maximum cardinality matchings, one of minimum total weight.
///
/// Successive shortest augmenting paths from a virtual source attached to
/// every free row, with Johnson potentials keeping reduced costs nonnegative.
/// Each phase adds one edge at minimum marginal cost, so the matching after
/// `t` phases is a min-weight matching of size `t`; the loop stops when no
/// augmenting path remains.
pub fn min_weight_max_cardinality_matching(w: &WeightMatrix) -> Matching {
    let assignment = successive_shortest_paths(w);
    Matching::from_assignment(w, &assignment)
}

fn successive_shortest_paths(w: &WeightMatrix) -> Vec<Option<usize>> {
    let (n, m) = (w.rows, w.cols);
    let mut row_match: Vec<Option<usize>> = vec![None; n];
    let mut col_match: Vec<Option<usize>> = vec![None; m];
    let mut pot_row = vec![0.0f64; n];
    let mut pot_col = vec![0.0f64; m];

    let mut dist_row = vec![f64::INFINITY; n];
    let mut dist_col = vec![f64::INFINITY; m];
    let mut done_row = vec![false; n];
    let mut done_col = vec![false; m];
    // Row from which each column was reached.
    let mut via = vec![usize::MAX; m];

    for _ in 0..n.min(m) {
        for i in 0..n {
            dist_row[i] = if row_match[i].is_none() { 0.0 } else { f64::INFINITY };
            done_row[i] = false;
        }
        dist_col.fill(f64::INFINITY);
        done_col.fill(false);
        via.fill(usize::MAX);

        let mut target = None;
        loop {
            // Dense Dijkstra step: nearest unsettled vertex, rows first on ties.
            let mut best = f64::INFINITY;
            let mut pick: Option<(bool, usize)> = None;
            for i in 0..n {
                if !done_row[i] && dist_row[i] < best {
                    best = dist_row[i];
                    pick = Some((true, i));
                }
            }
            for j in 0..m {
                if !done_col[j] && dist_col[j] < best {
                    best = dist_col[j];
                    pick = Some((false, j));
                }
            }
            let Some((is_row, v)) = pick else { break };
            if is_row {
                done_row[v] = true;
                for j in 0..m {
                    if done_col[j] || row_match[v] == Some(j) {
                        continue;
                    }
                    if let Some(c) = w.weight(v, j) {
                        let reduced = (c + pot_row[v] - pot_col[j]).max(0.0);
                        let nd = best + reduced;
                        if nd < dist_col[j] {
                            dist_col[j] = nd;
                            via[j] = v;
                        }
                    }
                }
            } else {
                done_col[v] = true;
                match col_match[v] {
                    None => {
                        target = Some(v);
                        break;
                    }
                    Some(k) => {
                        let c = w.weight(k, v).expect("matched edge is allowed");
                        let reduced = (-c + pot_col[v] - pot_row[k]).max(0.0);
                        let nd = best + reduced;
                        if nd < dist_row[k] {
                            dist_row[k] = nd;
                        }
                    }
                }
            }
        }

        let Some(t) = target else { break };
        let dt = dist_col[t];
        for i in 0..n {
            pot_row[i] += dist_row[i].min(dt);
        }
        for j in 0..m {
            pot_col[j] += dist_col[j].min(dt);
        }

        // Walk back along the alternating path.
        let mut j = t;
        loop {
            let i = via[j];
            let prev = row_match[i];
            row_match[i] = Some(j);
            col_match[j] = Some(i);
            match prev {
                Some(pj) => j = pj,
                None => break,
            }
        }
    }
    row_match
}

/// Minimum total weight matching saturating every row.
pub fn min_weight_perfect_matching(w: &WeightMatrix) -> Result<Matching> {
    if w.rows > w.cols {
        return Err(Error::NoPerfectMatching);
    }
    let m = min_weight_max_cardinality_matching(w);
    if m.len() < w.rows {
        return Err(Error::NoPerfectMatching);
    }
    Ok(m)
}

/// True iff some matching saturates every row using edges of weight at most
/// `threshold`.
pub fn bottleneck_feasible(w: &WeightMatrix, threshold: f64) -> bool {
    if w.rows > w.cols {
        return false;
    }
    max_cardinality(&w.restricted(threshold)) == w.rows
}

/// Smallest threshold at which the rows can be saturated, searched over the
/// sorted distinct entries of `w`. Zero rows give a bottleneck of 0.
pub fn bottleneck_value(w: &WeightMatrix) -> Result<f64> {
    if w.rows == 0 {
        return Ok(0.0);
    }
    let weights = w.distinct_weights();
    let idx = min_feasible_index(w, &weights)?;
    Ok(weights[idx])
}

fn min_feasible_index(w: &WeightMatrix, weights: &[f64]) -> Result<usize> {
    if weights.is_empty() || !bottleneck_feasible(w, weights[weights.len() - 1]) {
        return Err(Error::NoPerfectMatching);
    }
    let (mut lo, mut hi) = (0usize, weights.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if bottleneck_feasible(w, weights[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Row-saturating matching minimising the longest edge. Among the optimal
/// ones, the returned matching has minimum total weight.
pub fn bottleneck_matching(w: &WeightMatrix) -> Result<Matching> {
    if w.rows == 0 {
        return Ok(Matching::default());
    }
    let b = bottleneck_value(w)?;
    min_weight_perfect_matching(&w.restricted(b))
}
