//! Independent reference implementations used as test oracles. None of
//! these call into the library's numerical routines.

#![allow(dead_code)]

/// Dense row-major matrix as nested vectors.
pub type Mat = Vec<Vec<f64>>;

pub fn monomial_row(x: f64, k: usize) -> Vec<f64> {
    (0..k).map(|j| x.powi(j as i32)).collect()
}

pub fn spline_row(x: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|j| match j {
            0 => 1.0,
            1 => x,
            2 => x * x,
            _ => {
                let t = (j as f64 - 2.0) / (k as f64 - 2.0);
                let d = (x - t).max(0.0);
                d * d
            }
        })
        .collect()
}

pub fn design(xs: &[f64], k: usize, spline: bool) -> Mat {
    xs.iter()
        .map(|&x| if spline { spline_row(x, k) } else { monomial_row(x, k) })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (n, k) = (a.len(), a[0].len());
    (0..k).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, m, k) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..k).map(|j| (0..m).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting: solves `A X = B`.
pub fn solve(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Mat = (0..n)
        .map(|i| a[i].iter().chain(b[i].iter()).copied().collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                for c in col..n + m {
                    aug[r][c] -= f * aug[col][c];
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..m).map(|j| aug[i][n + j] / aug[i][i]).collect())
        .collect()
}

/// Orthonormal basis of the column space by twice-applied modified
/// Gram–Schmidt. Returns columns as vectors.
pub fn orthonormal_columns(a: &Mat) -> Vec<Vec<f64>> {
    let cols = transpose(a);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for u in &q {
                let proj: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    q
}

/// Fitted values and leverages of the least-squares projection.
pub fn projection(a: &Mat, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let q = orthonormal_columns(a);
    let n = y.len();
    let mut fitted = vec![0.0; n];
    let mut lev = vec![0.0; n];
    for u in &q {
        let c: f64 = u.iter().zip(y).map(|(a, b)| a * b).sum();
        for i in 0..n {
            fitted[i] += c * u[i];
            lev[i] += u[i] * u[i];
        }
    }
    (fitted, lev)
}

/// Least-squares coefficients by Gram-Schmidt QR and back substitution.
pub fn lstsq(a: &Mat, y: &[f64]) -> Vec<f64> {
    let q = orthonormal_columns(a);
    let cols = transpose(a);
    let k = q.len();
    let r: Mat = (0..k)
        .map(|i| (0..k).map(|j| q[i].iter().zip(&cols[j]).map(|(u, v)| u * v).sum()).collect())
        .collect();
    let c: Vec<f64> = q.iter().map(|u| u.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[i][j] * b[j]).sum();
        b[i] = (c[i] - s) / r[i][i];
    }
    b
}

/// Least-squares coefficients from the normal equations.
pub fn ols(a: &Mat, y: &[f64]) -> Vec<f64> {
    let at = transpose(a);
    let ata = matmul(&at, a);
    let aty: Mat = at
        .iter()
        .map(|r| vec![r.iter().zip(y).map(|(a, b)| a * b).sum()])
        .collect();
    solve(&ata, &aty).into_iter().map(|r| r[0]).collect()
}

/// AS241 (Wichura 1988) normal quantile, PPND16.
pub fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.0809287301226727 * r + 33430.575583588128105) * r
            + 67265.770927008700853)
            * r
            + 45921.953931549871457)
            * r
            + 13731.693765509461125)
            * r
            + 1971.5909503065514427)
            * r
            + 133.14166789178437745)
            * r
            + 3.387132872796366608;
        let den = ((((((5226.495278852545925 * r + 28729.085735721942674) * r
            + 39307.89580009271061)
            * r
            + 21213.794301586595867)
            * r
            + 5394.1960214247511077)
            * r
            + 687.1870074920579083)
            * r
            + 42.313330701600911252)
            * r
            + 1.0;
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734;
        let den = ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
            + 0.0151986665636164571966)
            * r
            + 0.14810397642748007459)
            * r
            + 0.68976733498510000455)
            * r
            + 1.6763848301838038494)
            * r
            + 2.05319162663775882187)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772;
        let den = ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
            + 1.8463183175100546818e-5)
            * r
            + 7.868691311456132591e-4)
            * r
            + 0.0148753612908506148525)
            * r
            + 0.13692988092273580531)
            * r
            + 0.59983220655588793769)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Lasso objective `n⁻¹‖y − Xb‖² + λ‖b‖₁` on raw data.
pub fn lasso_objective(x: &Mat, y: &[f64], b: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(r, &yi)| {
            let f: f64 = r.iter().zip(b).map(|(a, c)| a * c).sum();
            (yi - f) * (yi - f)
        })
        .sum();
    rss / n + lambda * b.iter().map(|v| v.abs()).sum::<f64>()
}

/// Proximal gradient (ISTA) on the raw design, run until the iterate stops
/// moving.
pub fn lasso_ista(x: &Mat, y: &[f64], lambda: f64) -> Vec<f64> {
    let n = y.len() as f64;
    let p = x[0].len();
    // Lipschitz bound for the gradient of n⁻¹‖y − Xb‖²: 2‖X‖_F²/n.
    let fro: f64 = x.iter().flat_map(|r| r.iter()).map(|v| v * v).sum();
    let step = n / (2.0 * fro);
    let mut b = vec![0.0; p];
    for _ in 0..2_000_000 {
        let resid: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(r, &yi)| yi - r.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>())
            .collect();
        let mut moved = 0.0f64;
        for j in 0..p {
            let g: f64 = -2.0 / n * x.iter().zip(&resid).map(|(r, e)| r[j] * e).sum::<f64>();
            let z = b[j] - step * g;
            let t = step * lambda;
            let nb = if z > t { z - t } else if z < -t { z + t } else { 0.0 };
            moved = moved.max((nb - b[j]).abs());
            b[j] = nb;
        }
        if moved < 1e-15 {
            break;
        }
    }
    b
}

/// Penalized logistic objective on raw data.
pub fn logit_objective(x: &Mat, y: &[f64], b: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(r, &yi)| {
            let t: f64 = r.iter().zip(b).map(|(a, c)| a * c).sum();
            let sp = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
            sp - yi * t
        })
        .sum();
    loss / n + lambda * b.iter().map(|v| v.abs()).sum::<f64>()
}

/// Minimum of a univariate convex function by fine grid then golden section.
pub fn grid_minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let h = (hi - lo) / (points - 1) as f64;
    let (mut best_x, mut best) = (lo, f(lo));
    for i in 1..points {
        let x = lo + h * i as f64;
        let v = f(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = (best_x - h, best_x + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x).min(best))
}

/// Deterministic pseudo-random stream for test fixtures (SplitMix64),
/// independent of the library's generators.
pub struct Fixture(u64);

impl Fixture {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Box–Muller standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize % n
    }
}

pub fn matrix_from(rows: &Mat) -> tunesel::Matrix64 {
    tunesel::Matrix::from_rows(rows)
}
