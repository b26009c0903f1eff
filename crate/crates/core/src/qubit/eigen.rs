//! Lowest eigenpairs of a symmetric tridiagonal operator by Sturm-sequence
//! bisection followed by inverse iteration.

use super::{PhysicsError, TridiagonalOperator};

/// Iteration cap for the bisection of a single eigenvalue. Halving a
/// Gershgorin interval down to machine precision takes ~110 steps at most.
pub const MAX_BISECTION_STEPS: usize = 256;
const MAX_INVERSE_STEPS: usize = 12;

/// Lowest eigenpairs on a grid.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Ascending eigenvalues, J.
    pub energies: Vec<f64>,
    /// One vector per level, normalized so `sum |psi|^2 * spacing = 1`.
    pub wavefunctions: Vec<Vec<f64>>,
    /// Node coordinates (flux in phi0 for Hamiltonians built from a grid).
    pub nodes: Vec<f64>,
    /// Quadrature weight.
    pub spacing: f64,
}

impl EigenSolution {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// Quadrature inner product of two vectors on this grid.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.spacing
    }

    /// Probability carried by nodes with flux strictly below `phi`.
    pub fn mass_below(&self, amplitudes: &[f64], phi: f64) -> f64 {
        let total: f64 = amplitudes.iter().map(|a| a * a).sum();
        let below: f64 = self
            .nodes
            .iter()
            .zip(amplitudes)
            .filter(|(&x, _)| x < phi)
            .map(|(_, a)| a * a)
            .sum();
        below / total
    }

    /// Overlap `<psi | R psi>` where `R` reflects the grid end to end.
    pub fn mirror_overlap(&self, level: usize) -> f64 {
        let psi = &self.wavefunctions[level];
        let mirrored: Vec<f64> = psi.iter().rev().copied().collect();
        self.inner(psi, &mirrored)
    }
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diagonal: &[f64], off_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diagonal[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diagonal.len() {
        q = diagonal[i] - x - off_sq[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(
    op: &TridiagonalOperator,
    off_sq: &[f64],
    index: usize,
    bounds: (f64, f64),
    pivmin: f64,
) -> Result<f64, PhysicsError> {
    let (mut lo, mut hi) = bounds;
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if sturm_count(op.diagonal(), off_sq, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(PhysicsError::NotConverged { level: index, iterations: MAX_BISECTION_STEPS })
}

/// LU factorization of `T - shift I` with partial pivoting (LAPACK `gttrf`
/// layout), kept only for repeated solves.
struct ShiftedLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(op: &TridiagonalOperator, shift: f64, tiny: f64) -> Self {
        let n = op.dimension();
        let mut lower = op.off_diagonal().to_vec();
        let mut diag: Vec<f64> = op.diagonal().iter().map(|d| d - shift).collect();
        let mut upper = op.off_diagonal().to_vec();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper[i];
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        ShiftedLu { lower, diag, upper, upper2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        for i in (0..n - 2).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Largest-magnitude node positive; near-ties (odd states) go to the leftmost.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let threshold = peak * (1.0 - 1e-6);
    if let Some(first) = v.iter().find(|x| x.abs() >= threshold) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// The `k` lowest eigenpairs of `op`.
///
/// Eigenvectors are normalized under the operator's quadrature weight and
/// carry a deterministic sign: the largest-magnitude node is positive, with
/// the leftmost node winning near-ties.
pub fn solve_lowest_levels(op: &TridiagonalOperator, k: usize) -> Result<EigenSolution, PhysicsError> {
    let n = op.dimension();
    if k == 0 || k > n {
        return Err(PhysicsError::InvalidLevelCount { requested: k, dimension: n });
    }
    let off_sq: Vec<f64> = op.off_diagonal().iter().map(|e| e * e).collect();
    let (lo, hi) = op.spectrum_bounds();
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    let pad = f64::EPSILON * scale * 4.0;
    let bounds = (lo - pad, hi + pad);

    let mut energies = Vec::with_capacity(k);
    for index in 0..k {
        energies.push(bisect(op, &off_sq, index, bounds, pivmin)?);
    }

    let tiny = f64::EPSILON * scale;
    let tolerance = 64.0 * (n as f64).sqrt() * f64::EPSILON * scale;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (level, &lambda) in energies.iter().enumerate() {
        let lu = ShiftedLu::factor(op, lambda, tiny);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin()).collect();
        normalize(&mut x);
        let mut converged = false;
        for _ in 0..MAX_INVERSE_STEPS {
            lu.solve(&mut x);
            for prev in &vectors {
                let overlap: f64 = prev.iter().zip(&x).map(|(p, v)| p * v).sum();
                x.iter_mut().zip(prev).for_each(|(v, p)| *v -= overlap * p);
            }
            if normalize(&mut x) == 0.0 {
                break;
            }
            let tx = op.apply(&x);
            let residual = tx
                .iter()
                .zip(&x)
                .map(|(t, v)| (t - lambda * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual <= tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(PhysicsError::NotConverged { level, iterations: MAX_INVERSE_STEPS });
        }
        vectors.push(x);
    }

    let quadrature = op.weight().sqrt();
    for v in &mut vectors {
        v.iter_mut().for_each(|x| *x /= quadrature);
        fix_sign(v);
    }

    Ok(EigenSolution {
        energies,
        wavefunctions: vectors,
        nodes: op.nodes().to_vec(),
        spacing: op.weight(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let op = TridiagonalOperator::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        let sol = solve_lowest_levels(&op, 2).unwrap();
        assert!((sol.energies[0] - 1.0).abs() < 1e-14);
        assert!((sol.energies[1] - 2.0).abs() < 1e-14);
        for (level, expected) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]].iter().enumerate() {
            for (a, b) in sol.wavefunctions[level].iter().zip(expected) {
                assert!((a - b).abs() < 1e-12, "level {level}: {:?}", sol.wavefunctions[level]);
            }
        }
    }

    #[test]
    fn rejects_bad_level_counts() {
        let op = TridiagonalOperator::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert!(solve_lowest_levels(&op, 0).is_err());
        assert!(solve_lowest_levels(&op, 4).is_err());
        assert!(solve_lowest_levels(&op, 3).is_ok());
    }

    #[test]
    fn discrete_laplacian_closed_form() {
        // Eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(kπ/(n+1)).
        let n = 50;
        let op = TridiagonalOperator::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let sol = solve_lowest_levels(&op, 5).unwrap();
        for (k, e) in sol.energies.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-13, "level {k}: {e} vs {exact}");
        }
        for i in 0..5 {
            for j in 0..5 {
                let dot = sol.inner(&sol.wavefunctions[i], &sol.wavefunctions[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sign_convention_is_leftmost_peak_positive() {
        let mut odd = vec![0.0, -1.0, 0.0, 1.0, 0.0];
        fix_sign(&mut odd);
        assert_eq!(odd, vec![0.0, 1.0, 0.0, -1.0, 0.0]);
        let mut v = vec![0.1, -0.2, -0.9];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.2, 0.9]);
    }
}
