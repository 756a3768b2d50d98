//! Dense complex linear solves for the tiny systems used here.

use num_complex::Complex;

use crate::scalar::Real;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes relative to the matrix scale.
pub fn solve<T: Real, const N: usize>(
    mut a: [[Complex<T>; N]; N],
    mut b: [Complex<T>; N],
) -> Option<[Complex<T>; N]> {
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |m, z| m.max(z.norm()));
    if scale == T::zero() {
        return None;
    }
    let threshold = scale * T::epsilon() * T::lit(16.0);
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal))?;
        if !(a[pivot][col].norm() > threshold) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
            let v = b[col];
            b[row] = b[row] - factor * v;
        }
    }
    let mut x = [Complex::new(T::zero(), T::zero()); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_detects_singular() {
        let c = |re: f64, im: f64| Complex::new(re, im);
        let a = [[c(0.0, 1.0), c(2.0, 0.0)], [c(1.0, -1.0), c(0.5, 0.5)]];
        let x = [c(1.0, 2.0), c(-0.5, 0.25)];
        let b = [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]];
        let got = solve(a, b).unwrap();
        assert!((got[0] - x[0]).norm() < 1e-14 && (got[1] - x[1]).norm() < 1e-14);
        let singular = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve(singular, [c(1.0, 0.0), c(0.0, 0.0)]).is_none());
    }
}
