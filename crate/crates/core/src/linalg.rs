//! Tridiagonal solves for the radial operators.

use num_complex::Complex64;
use std::ops::{Div, Mul, Sub};

/// LU factors of a tridiagonal matrix with constant bands, stored for
/// repeated O(N) solves (Thomas algorithm without pivoting).
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal<T> {
    lower: Vec<T>,
    // modified super-diagonal c'_j and inverse pivots 1/d'_j
    upper_mod: Vec<T>,
    inv_pivot: Vec<T>,
}

pub(crate) trait Scalar:
    Copy + Mul<Output = Self> + Sub<Output = Self> + Div<Output = Self> + From<f64>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

impl<T: Scalar> Tridiagonal<T> {
    /// `lower[j]` couples row `j+1` to column `j`, `upper[j]` row `j` to
    /// column `j+1`.
    pub(crate) fn factor(lower: &[T], diag: &[T], upper: &[T]) -> Self {
        let n = diag.len();
        assert_eq!(lower.len() + 1, n);
        assert_eq!(upper.len() + 1, n);
        let one = T::from(1.0);
        let mut upper_mod = Vec::with_capacity(n.saturating_sub(1));
        let mut inv_pivot = Vec::with_capacity(n);
        let mut pivot = diag[0];
        inv_pivot.push(one / pivot);
        for j in 0..n - 1 {
            let c = upper[j] / pivot;
            upper_mod.push(c);
            pivot = diag[j + 1] - lower[j] * c;
            inv_pivot.push(one / pivot);
        }
        Self { lower: lower.to_vec(), upper_mod, inv_pivot }
    }

    /// Solves in place: `rhs` is overwritten by the solution.
    pub(crate) fn solve_in_place<U>(&self, rhs: &mut [U])
    where
        U: Copy + Sub<Output = U> + Mul<T, Output = U>,
    {
        let n = rhs.len();
        assert_eq!(n, self.inv_pivot.len());
        rhs[0] = rhs[0] * self.inv_pivot[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - rhs[j - 1] * self.lower[j - 1]) * self.inv_pivot[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] = rhs[j] - rhs[j + 1] * self.upper_mod[j];
        }
    }
}
