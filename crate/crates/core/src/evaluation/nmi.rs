use ndarray::ArrayView2;
use serde::Serialize;

use crate::encoder::StringEncoder;
use crate::error::{Error, Result};
use crate::Scalar;

/// Normalized mutual information of a non-negative matrix read as a joint
/// distribution: rows are ℓ1-normalized and weighted equally.
///
/// Returns 0 when either marginal entropy vanishes.
pub fn nmi_matrix<T: Scalar>(x: ArrayView2<'_, T>) -> Result<T> {
    let (n, m) = x.dim();
    if n == 0 || m == 0 {
        return Err(Error::Evaluation("NMI of an empty matrix".into()));
    }
    let mut p = vec![0.0f64; n * m];
    for (i, row) in x.rows().into_iter().enumerate() {
        let mut total = 0.0;
        for v in row.iter() {
            let a = v.to_f64_lossy().abs();
            if !a.is_finite() {
                return Err(Error::Evaluation(format!("row {i} holds a non-finite value")));
            }
            total += a;
        }
        if total == 0.0 {
            return Err(Error::Evaluation(format!("row {i} is all zero")));
        }
        for (j, v) in row.iter().enumerate() {
            p[i * m + j] = v.to_f64_lossy().abs() / total / n as f64;
        }
    }

    let plogp = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    let h_row = (n as f64).ln();
    let mut col = vec![0.0f64; m];
    for i in 0..n {
        for j in 0..m {
            col[j] += p[i * m + j];
        }
    }
    let h_col: f64 = col.iter().map(|&q| plogp(q)).sum();
    if h_row <= 0.0 || h_col <= 0.0 {
        return Ok(T::zero());
    }

    // Summing p log(p / (r c)) directly keeps independent inputs near zero,
    // where H(row) + H(col) - H(row, col) would cancel catastrophically.
    let row_mass = 1.0 / n as f64;
    let mut mi = 0.0;
    for i in 0..n {
        for j in 0..m {
            let q = p[i * m + j];
            if q > 0.0 {
                mi += q * (q / (row_mass * col[j])).ln();
            }
        }
    }
    // Snap the remaining round-off at both ends so the identity and
    // constant cases come out exact.
    let tol = (h_row + h_col) * f64::EPSILON * (n * m + n + m) as f64;
    let upper = h_row.min(h_col);
    if mi < tol {
        mi = 0.0;
    } else if (upper - mi).abs() < tol {
        mi = upper;
    }
    let mi = mi.clamp(0.0, upper);
    let nmi = if mi == upper && (h_row - h_col).abs() < tol { 1.0 } else { 2.0 * mi / (h_row + h_col) };
    Ok(T::from_f64_lossy(nmi.clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport<T> {
    pub encoder: String,
    pub d: usize,
    pub nmi: T,
    pub top_labels: Option<Vec<String>>,
}

impl<T: Scalar> RecoveryReport<T> {
    pub const CSV_HEADER: &'static str = "encoder,d,nmi,top_labels";

    /// One CSV row; labels are joined with `|`.
    pub fn csv_row(&self) -> String {
        let labels = self.top_labels.as_ref().map(|l| l.join("|")).unwrap_or_default();
        let labels = if labels.contains([',', '"']) {
            format!("\"{}\"", labels.replace('"', "\"\""))
        } else {
            labels
        };
        format!("{},{},{},{}", self.encoder, self.d, self.nmi, labels)
    }
}

/// Encodes each base label once and scores the result with [`nmi_matrix`].
pub fn recover_nmi<T: Scalar, E: StringEncoder<T> + ?Sized>(
    encoder: &E,
    base_labels: &[String],
) -> Result<RecoveryReport<T>> {
    let mut seen = std::collections::HashSet::new();
    for l in base_labels {
        if !seen.insert(l) {
            return Err(Error::Evaluation(format!("duplicate base label {l:?}")));
        }
    }
    let x = encoder.transform(base_labels)?;
    Ok(RecoveryReport {
        encoder: encoder.id().to_owned(),
        d: x.ncols(),
        nmi: nmi_matrix(x.view())?,
        top_labels: encoder.feature_names(1).ok(),
    })
}
