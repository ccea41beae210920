//! Dense helpers over `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect()
}

/// `1 − cos∠(a, b)`. Both inputs must be nonzero.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    1.0 - dot(a, b) / (norm(a) * norm(b))
}

/// Numerical rank of the column set `cols` (each of length `n`), by
/// Gaussian elimination with partial pivoting.
pub fn rank(cols: &[Vec<f64>], n: usize, tol: f64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    // rows = coordinates, columns = vectors
    let k = cols.len();
    let mut m: Vec<Vec<f64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    let mut rank = 0;
    for col in 0..k {
        if rank == n {
            break;
        }
        let (piv, val) =
            (rank..n)
                .map(|r| (r, m[r][col].abs()))
                .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if val <= tol * scale {
            continue;
        }
        m.swap(rank, piv);
        for r in (rank + 1)..n {
            let factor = m[r][col] / m[rank][col];
            for c in col..k {
                m[r][c] -= factor * m[rank][c];
            }
        }
        rank += 1;
    }
    rank
}
