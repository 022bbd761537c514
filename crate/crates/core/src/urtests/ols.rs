//! Ordinary least squares via Householder QR.

use crate::error::{Error, Result};

/// Column-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    rows: usize,
    columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn new(rows: usize) -> Self {
        Design {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut d = Design::new(rows);
        for c in columns {
            d.push(c)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, column: Vec<f64>) -> Result<()> {
        if column.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: self.rows,
                right: column.len(),
            });
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn push_constant(&mut self) {
        self.columns.push(vec![1.0; self.rows]);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ssr: f64,
    /// `ssr / (n - k)`.
    pub sigma2: f64,
    pub log_likelihood: f64,
    pub bic: f64,
    pub n: usize,
    pub k: usize,
}

impl OlsFit {
    pub fn t_stat(&self, j: usize) -> f64 {
        self.coefficients[j] / self.std_errors[j]
    }
}

/// Gaussian log-likelihood at the ML variance `ssr / n`.
pub fn gaussian_log_likelihood(ssr: f64, n: usize) -> f64 {
    let n = n as f64;
    -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (ssr / n).ln() + 1.0)
}

pub fn bic(ssr: f64, n: usize, k: usize) -> f64 {
    -2.0 * gaussian_log_likelihood(ssr, n) + k as f64 * (n as f64).ln()
}

/// Householder factorisation `X = QR`, keeping `R` and `Q'y`.
struct Qr {
    k: usize,
    /// Upper triangle, row-major k x k.
    r: Vec<f64>,
    qty: Vec<f64>,
}

fn householder(design: &Design, response: &[f64]) -> Result<Qr> {
    let n = design.rows;
    let k = design.cols();
    if response.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: response.len(),
        });
    }
    if n < k + 1 {
        return Err(Error::InsufficientLength { needed: k + 1, got: n });
    }
    let mut a: Vec<Vec<f64>> = design.columns.clone();
    let mut y = response.to_vec();
    let scale = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0_f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularDesign);
    }
    let tol = 1e-10;
    let mut r = vec![0.0; k * k];
    let mut v = vec![0.0; n];
    for j in 0..k {
        let col_norm_initial = design.columns[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm = a[j][j..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= tol * col_norm_initial.max(f64::MIN_POSITIVE) || norm == 0.0 {
            return Err(Error::SingularDesign);
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        for i in j..n {
            v[i] = a[j][i];
        }
        v[j] -= alpha;
        let vnorm2: f64 = v[j..n].iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j) {
                let dot: f64 = (j..n).map(|i| v[i] * col[i]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..n {
                    col[i] -= f * v[i];
                }
            }
            let dot: f64 = (j..n).map(|i| v[i] * y[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                y[i] -= f * v[i];
            }
        }
        for (c, col) in a.iter().enumerate().skip(j) {
            r[j * k + c] = col[j];
        }
    }
    Ok(Qr { k, r, qty: y })
}

fn back_solve(qr: &Qr) -> Vec<f64> {
    let k = qr.k;
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qr.qty[i];
        for j in i + 1..k {
            s -= qr.r[i * k + j] * b[j];
        }
        b[i] = s / qr.r[i * k + i];
    }
    b
}

/// Diagonal of `(X'X)^{-1} = R^{-1} R^{-T}`.
fn inverse_gram_diagonal(qr: &Qr) -> Vec<f64> {
    let k = qr.k;
    let mut rinv = vec![0.0; k * k];
    for col in 0..k {
        rinv[col * k + col] = 1.0 / qr.r[col * k + col];
        for i in (0..col).rev() {
            let mut s = 0.0;
            for j in i + 1..=col {
                s += qr.r[i * k + j] * rinv[j * k + col];
            }
            rinv[i * k + col] = -s / qr.r[i * k + i];
        }
    }
    (0..k)
        .map(|i| (i..k).map(|j| rinv[i * k + j] * rinv[i * k + j]).sum())
        .collect()
}

/// Least-squares fit of `response` on the columns of `design`.
pub fn ols(design: &Design, response: &[f64]) -> Result<OlsFit> {
    let qr = householder(design, response)?;
    let coefficients = back_solve(&qr);
    let n = design.rows;
    let k = design.cols();
    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let fitted: f64 = (0..k).map(|j| design.columns[j][i] * coefficients[j]).sum();
            response[i] - fitted
        })
        .collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = ssr / (n - k) as f64;
    let std_errors = inverse_gram_diagonal(&qr)
        .into_iter()
        .map(|d| (sigma2 * d).sqrt())
        .collect();
    Ok(OlsFit {
        coefficients,
        std_errors,
        residuals,
        ssr,
        sigma2,
        log_likelihood: gaussian_log_likelihood(ssr, n),
        bic: bic(ssr, n, k),
        n,
        k,
    })
}

/// Residual sum of squares for every leading block of columns: entry `j`
/// is the SSR of the regression on columns `0..=j`. One factorisation
/// serves all nested models.
pub fn nested_ssr(design: &Design, response: &[f64]) -> Result<Vec<f64>> {
    let qr = householder(design, response)?;
    let n = design.rows;
    let tail: f64 = qr.qty[qr.k..n].iter().map(|x| x * x).sum();
    let mut out = vec![0.0; qr.k];
    let mut acc = tail;
    for j in (0..qr.k).rev() {
        out[j] = acc;
        acc += qr.qty[j] * qr.qty[j];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_fit() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5 + 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.25 * v).collect();
        let d = Design::from_columns(vec![x]).unwrap();
        let fit = ols(&d, &y).unwrap();
        assert!((fit.coefficients[0] - 3.25).abs() < 1e-10);
        assert!(fit.sigma2 < 1e-20);
    }

    #[test]
    fn duplicated_column_is_singular() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let d = Design::from_columns(vec![x.clone(), x]).unwrap();
        assert!(matches!(ols(&d, &y), Err(Error::SingularDesign)));
    }

    #[test]
    fn too_few_rows() {
        let d = Design::from_columns(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(ols(&d, &[1.0, 2.0]), Err(Error::InsufficientLength { .. })));
    }

    #[test]
    fn nested_ssr_matches_separate_fits() {
        let n = 60;
        let c1: Vec<f64> = vec![1.0; n];
        let c2: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let c3: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos() + 0.1 * i as f64).collect();
        let d = Design::from_columns(vec![c1.clone(), c2.clone(), c3]).unwrap();
        let nested = nested_ssr(&d, &y).unwrap();
        let d2 = Design::from_columns(vec![c1, c2]).unwrap();
        let fit2 = ols(&d2, &y).unwrap();
        assert!((nested[1] - fit2.ssr).abs() < 1e-9 * fit2.ssr.max(1.0));
        let fit3 = ols(&d, &y).unwrap();
        assert!((nested[2] - fit3.ssr).abs() < 1e-9 * fit3.ssr.max(1.0));
    }
}
