use super::ShiftError;

/// Word lengths at which entropy is cross-checked against word growth.
pub const GROWTH_CHECK_LENGTHS: [usize; 3] = [20, 40, 60];

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub spectral: f64,
    /// `(n, log|words(n)| / n)` for each length in [`GROWTH_CHECK_LENGTHS`].
    pub growth: Vec<(usize, f64)>,
}

impl EntropyReport {
    /// Largest observed `n * |growth(n) - spectral|`.
    pub fn growth_constant(&self) -> f64 {
        self.growth
            .iter()
            .map(|&(n, g)| n as f64 * (g - self.spectral).abs())
            .fold(0.0, f64::max)
    }
}

/// Spectral radius of a nonnegative square matrix.
///
/// The matrix is split into strongly connected components; each irreducible
/// block is shifted by the identity (which makes it primitive without moving
/// the Perron root by more than 1) and iterated until the Collatz-Wielandt
/// bracket `min (Bx)_i/x_i <= rho <= max (Bx)_i/x_i` is narrower than the tolerance.
pub fn spectral_radius(matrix: &[Vec<f64>]) -> Result<f64, ShiftError> {
    let n = matrix.len();
    let mut best = 0.0f64;
    for comp in strongly_connected(matrix) {
        let nontrivial = comp.len() > 1 || matrix[comp[0]][comp[0]] > 0.0;
        if !nontrivial {
            continue;
        }
        let m = comp.len();
        let block: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| {
                comp.iter()
                    .map(|&j| matrix[i][j] + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut x = vec![1.0f64; m];
        let mut rho = None;
        for _ in 0..MAX_ITERATIONS {
            let y: Vec<f64> = block
                .iter()
                .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
                .collect();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (yi, xi) in y.iter().zip(&x) {
                let r = yi / xi;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            let norm = y.iter().cloned().fold(0.0, f64::max);
            x = y.iter().map(|v| v / norm).collect();
            if hi - lo <= TOLERANCE {
                rho = Some(0.5 * (lo + hi) - 1.0);
                break;
            }
        }
        best = best.max(rho.ok_or(ShiftError::NoConvergence)?);
    }
    debug_assert!(n == 0 || best >= 0.0);
    Ok(best)
}

/// Tarjan's algorithm, iterative.
fn strongly_connected(matrix: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = matrix.len();
    let succ: Vec<Vec<usize>> = matrix
        .iter()
        .map(|row| (0..n).filter(|&j| row[j] > 0.0).collect())
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, next)) = call.last() {
            if next < succ[v].len() {
                let w = succ[v][next];
                call.last_mut().unwrap().1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_of_small_matrices() {
        assert_eq!(spectral_radius(&[vec![2.0]]).unwrap(), 2.0);
        let golden = spectral_radius(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((golden - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
        // periodic permutation matrix: radius 1 although plain power iteration oscillates
        let cyc = spectral_radius(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((cyc - 1.0).abs() < 1e-9);
        // reducible: the larger component wins
        let red = spectral_radius(&[vec![1.0, 1.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]);
        assert!((red.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn nilpotent_has_radius_zero() {
        assert_eq!(spectral_radius(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap(), 0.0);
    }
}
