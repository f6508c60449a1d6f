//! Basis functions on `[0, 1]` for series regression.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    /// `p_j(x) = x^(j-1)`.
    Monomial,
    /// `1, x, x²` followed by truncated squares `((x - t)∨0)²` at the
    /// equispaced knots `t = (j-3)/(k-2)`, `j = 4..k`.
    QuadraticSpline,
}

impl BasisFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Monomial => "monomial",
            Self::QuadraticSpline => "spline",
        }
    }
}

impl std::str::FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" | "mono" | "M" => Ok(Self::Monomial),
            "spline" | "quadratic-spline" | "S" => Ok(Self::QuadraticSpline),
            other => Err(Error::InvalidArgument(format!("unknown basis `{other}`"))),
        }
    }
}

/// A basis family together with its term count `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    pub family: BasisFamily,
    pub k: usize,
}

impl BasisSpec {
    pub fn new(family: BasisFamily, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("basis needs at least one term".into()));
        }
        Ok(Self { family, k })
    }

    pub fn monomial(k: usize) -> Self {
        Self::new(BasisFamily::Monomial, k).expect("k >= 1")
    }

    pub fn spline(k: usize) -> Self {
        Self::new(BasisFamily::QuadraticSpline, k).expect("k >= 1")
    }

    /// Writes `p^k(x)` into `out[..k]`. `x` must already be in the domain.
    pub fn eval_into<T: Real>(&self, x: T, out: &mut [T]) {
        let k = self.k;
        match self.family {
            BasisFamily::Monomial => {
                let mut v = T::one();
                for o in out.iter_mut().take(k) {
                    *o = v;
                    v *= x;
                }
            }
            BasisFamily::QuadraticSpline => {
                let poly = [T::one(), x, x * x];
                for (o, &v) in out.iter_mut().zip(poly.iter()).take(k.min(3)) {
                    *o = v;
                }
                if k > 3 {
                    let denom = T::from_usize_lossy(k - 2);
                    for j in 4..=k {
                        let knot = T::from_usize_lossy(j - 3) / denom;
                        let t = (x - knot).max(T::zero());
                        out[j - 1] = t * t;
                    }
                }
            }
        }
    }

    /// `p^k(x)ᵀ beta` without allocating.
    pub fn dot<T: Real>(&self, x: T, beta: &[T]) -> T {
        debug_assert_eq!(beta.len(), self.k);
        match self.family {
            BasisFamily::Monomial => beta.iter().rev().fold(T::zero(), |acc, &b| acc * x + b),
            BasisFamily::QuadraticSpline => {
                let k = self.k;
                let mut s = beta[0];
                if k > 1 {
                    s += beta[1] * x;
                }
                if k > 2 {
                    s += beta[2] * x * x;
                }
                if k > 3 {
                    let denom = T::from_usize_lossy(k - 2);
                    for (j, &b) in beta.iter().enumerate().skip(3) {
                        let knot = T::from_usize_lossy(j - 2) / denom;
                        let t = (x - knot).max(T::zero());
                        s += b * t * t;
                    }
                }
                s
            }
        }
    }
}

pub(crate) fn check_domain<T: Real>(x: T) -> Result<T> {
    let tol = T::lit(DOMAIN_TOL);
    if !(x >= -tol && x <= T::one() + tol) {
        return Err(Error::OutsideDomain { x: x.as_f64() });
    }
    Ok(x)
}

/// Basis values at `x`, a vector of length `k`.
pub fn eval_basis<T: Real>(spec: &BasisSpec, x: T) -> Result<Vec<T>> {
    let x = check_domain(x)?;
    let mut out = vec![T::zero(); spec.k];
    spec.eval_into(x, &mut out);
    Ok(out)
}

/// `n × k` design matrix whose i-th row is `p^k(xs[i])`.
pub fn design_matrix<T: Real>(spec: &BasisSpec, xs: &[T]) -> Result<Matrix<T>> {
    let k = spec.k;
    let mut data = vec![T::zero(); xs.len() * k];
    for (row, &x) in data.chunks_mut(k).zip(xs) {
        spec.eval_into(check_domain(x)?, row);
    }
    Ok(Matrix::from_row_major(xs.len(), k, data))
}
