//! Least-squares affine fit y = a + b x with an intercept standard error,
//! used for the 1/L extrapolations.

#[derive(Clone, Copy, Debug)]
pub struct AffineFit {
    pub intercept: f64,
    pub slope: f64,
    /// OLS standard error of the intercept (0 when the fit is exact or the
    /// degrees of freedom vanish).
    pub intercept_se: f64,
    pub rms_residual: f64,
}

pub fn fit_affine(x: &[f64], y: &[f64]) -> AffineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 2, "affine fit needs at least two points");
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - x_mean).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - x_mean) * (v - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| (v - (intercept + slope * u)).powi(2))
        .sum();
    let rms_residual = (ssr / nf).sqrt();
    let intercept_se = if n > 2 {
        let sigma2 = ssr / (nf - 2.0);
        (sigma2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt()
    } else {
        0.0
    };
    AffineFit { intercept, slope, intercept_se, rms_residual }
}

/// Fit y = a + b / L over the tail of an L-schedule (the last half, but at
/// least three points so the intercept error is defined).
///
/// The reported intercept error combines the OLS standard error with a
/// window-sensitivity term: the intercept shift when one earlier schedule
/// point joins the fit. The OLS error alone treats residuals as noise and
/// underestimates the systematic error of affine fits to curved finite-size
/// data; the window shift measures that curvature directly.
pub fn extrapolate_in_inverse_length(lengths: &[f64], values: &[f64]) -> AffineFit {
    let n = lengths.len();
    let take = (n / 2).max(3).min(n);
    let start = n - take;
    let x: Vec<f64> = lengths[start..].iter().map(|l| 1.0 / l).collect();
    let mut fit = fit_affine(&x, &values[start..]);
    if start > 0 {
        let start_wide = start - 1;
        let x_wide: Vec<f64> = lengths[start_wide..].iter().map(|l| 1.0 / l).collect();
        let wide = fit_affine(&x_wide, &values[start_wide..]);
        fit.intercept_se += (fit.intercept - wide.intercept).abs();
    }
    fit
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_affine_data_is_reproduced() {
        let x = [0.1, 0.2, 0.3, 0.4];
        let y: Vec<f64> = x.iter().map(|v| 2.5 - 3.0 * v).collect();
        let fit = fit_affine(&x, &y);
        assert_abs_diff_eq!(fit.intercept, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.slope, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept_se, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_length_extrapolation_recovers_the_limit() {
        let lengths = [25.0, 50.0, 100.0, 200.0, 400.0, 800.0];
        let values: Vec<f64> = lengths.iter().map(|l| 0.7 + 12.0 / l).collect();
        let fit = extrapolate_in_inverse_length(&lengths, &values);
        assert_abs_diff_eq!(fit.intercept, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.slope, 12.0, epsilon = 1e-9);
    }

    #[test]
    fn noisy_data_reports_a_positive_intercept_error() {
        let x = [0.0025, 0.005, 0.01, 0.02];
        let y = [0.101, 0.098, 0.104, 0.118];
        let fit = fit_affine(&x, &y);
        assert!(fit.intercept_se > 0.0);
        assert!(fit.rms_residual > 0.0);
    }
}
