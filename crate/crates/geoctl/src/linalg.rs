//! Dense helpers shared by the Lie-algebra and convexity modules:
//! pivoted span reduction, bracket-closure dimension, and nonnegative
//! least squares (Lawson-Hanson).

use nalgebra::{DMatrix, DVector};

/// Incremental rank tracker. Candidate vectors are max-abs normalized and
/// reduced against the stored pivots; a residual entry above `pivot_tol`
/// admits the vector as a new basis direction.
pub struct SpanReducer {
    pivot_tol: f64,
    reduced: Vec<DVector<f64>>,
    pivots: Vec<usize>,
}

impl SpanReducer {
    pub fn new(pivot_tol: f64) -> Self {
        SpanReducer {
            pivot_tol,
            reduced: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Returns true when `v` grew the span.
    pub fn try_insert(&mut self, v: &DVector<f64>) -> bool {
        let scale = v.amax();
        if !scale.is_finite() || scale <= self.pivot_tol {
            return false;
        }
        let mut r = v / scale;
        for (b, &p) in self.reduced.iter().zip(&self.pivots) {
            let c = r[p];
            if c != 0.0 {
                r.axpy(-c, b, 1.0);
            }
        }
        let (pivot, max) = argmax_abs(&r);
        if max <= self.pivot_tol {
            return false;
        }
        r /= r[pivot];
        self.reduced.push(r);
        self.pivots.push(pivot);
        true
    }
}

fn argmax_abs(v: &DVector<f64>) -> (usize, f64) {
    let mut idx = 0;
    let mut max = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > max {
            max = x.abs();
            idx = i;
        }
    }
    (idx, max)
}

fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Dimension of the smallest commutator-closed subspace containing the
/// generators, together with a spanning set. Iterates full bracket passes
/// until a pass adds nothing or `max_dim` is reached; since the ambient
/// algebra has dimension `max_dim` the loop terminates in at most
/// `max_dim` passes.
pub fn bracket_closure(
    generators: &[DMatrix<f64>],
    max_dim: usize,
    pivot_tol: f64,
) -> (usize, Vec<DMatrix<f64>>) {
    let mut reducer = SpanReducer::new(pivot_tol);
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for g in generators {
        if reducer.try_insert(&vectorize(g)) {
            basis.push(g.clone());
        }
    }
    loop {
        if reducer.rank() >= max_dim {
            break;
        }
        let len = basis.len();
        let mut grew = false;
        for i in 0..len {
            for j in (i + 1)..len {
                let b = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                if reducer.try_insert(&vectorize(&b)) {
                    basis.push(b);
                    grew = true;
                    if reducer.rank() >= max_dim {
                        return (reducer.rank(), basis);
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    (reducer.rank(), basis)
}

/// Rank of the linear span of vectorized matrices.
pub fn span_rank(elements: &[DMatrix<f64>], pivot_tol: f64) -> usize {
    let mut reducer = SpanReducer::new(pivot_tol);
    for e in elements {
        reducer.try_insert(&vectorize(e));
    }
    reducer.rank()
}

/// Least-squares solve via the normal equations. Column sets here are tiny
/// and near-orthonormal; a ridge fallback covers rank deficiency. Direct
/// factorization keeps this free of iteration-convergence hazards.
fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let at = a.transpose();
    let gram = &at * a;
    let rhs = &at * b;
    if let Some(chol) = gram.clone().cholesky() {
        return chol.solve(&rhs);
    }
    let n = gram.nrows();
    let ridged = gram + DMatrix::identity(n, n) * 1e-12;
    ridged
        .cholesky()
        .map(|c| c.solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(n))
}

/// Nonnegative least squares: minimize |Ax - b| over x >= 0.
/// Returns the solution and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let scale = b.norm().max(1.0);
    let tol = 1e-12 * scale;
    let max_outer = 3 * n.max(8);

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !passive[i] && w[i] > tol && best.is_none_or(|(_, wb)| w[i] > wb) {
                best = Some((i, w[i]));
            }
        }
        let Some((t, _)) = best else { break };
        passive[t] = true;

        // Inner loop: solve on the passive set, clip negatives back out.
        // The blocking variable is removed explicitly so rounding cannot
        // stall the loop.
        for _ in 0..=n {
            let cols: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            if cols.is_empty() {
                break;
            }
            let ap = a.select_columns(cols.iter());
            let z = lstsq(&ap, b);
            if z.iter().all(|&zi| zi > 0.0) {
                x.fill(0.0);
                for (k, &i) in cols.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            let mut blocking = None;
            for (k, &i) in cols.iter().enumerate() {
                if z[k] <= 0.0 {
                    let d = x[i] - z[k];
                    if d > 0.0 {
                        let ratio = x[i] / d;
                        if ratio < alpha {
                            alpha = ratio;
                            blocking = Some(i);
                        }
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in cols.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
                if x[i] <= 1e-14 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if let Some(i) = blocking {
                x[i] = 0.0;
                passive[i] = false;
            }
            if alpha == 0.0 {
                // No feasible progress from this column set.
                break;
            }
        }
    }
    let residual = (b - a * &x).norm();
    (x, residual)
}
