//! Convergence-order estimates from errors measured at several spacings.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    /// Slope of `log(error)` against `log(spacing)`.
    pub order: f64,
    /// RMS deviation of the points from the fitted line (in log space).
    pub fit_residual: f64,
}

/// Least-squares fit of `log e = p log h + c`.
///
/// Returns `None` for fewer than two points or a non-positive entry.
pub fn fit_order(spacings: &[f64], errors: &[f64]) -> Option<OrderFit> {
    let n = spacings.len();
    if n < 2 || n != errors.len() {
        return None;
    }
    if spacings.iter().chain(errors).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (order * x + intercept)).powi(2))
        .sum();
    Some(OrderFit {
        order,
        fit_residual: (rss / nf).sqrt(),
    })
}

/// Richardson extrapolation of a quantity computed at two spacings, assuming
/// leading error `∝ h^order`.
pub fn richardson(coarse: (f64, f64), fine: (f64, f64), order: f64) -> f64 {
    let (hc, vc) = coarse;
    let (hf, vf) = fine;
    let ratio = (hc / hf).powf(order);
    vf + (vf - vc) / (ratio - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let h = [0.4, 0.2, 0.1];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        let fit = fit_order(&h, &e).unwrap();
        assert!((fit.order - 2.0).abs() < 1e-12);
        assert!(fit.fit_residual < 1e-12);
    }

    #[test]
    fn plateau_has_order_zero() {
        let fit = fit_order(&[0.4, 0.2, 0.1], &[1e-2, 1e-2, 1e-2]).unwrap();
        assert!(fit.order.abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_order(&[0.1], &[1.0]).is_none());
        assert!(fit_order(&[0.1, 0.2], &[0.0, 1.0]).is_none());
        assert!(fit_order(&[0.1, 0.1], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn richardson_removes_quadratic_term() {
        let f = |h: f64| 2.0 + 0.5 * h * h;
        let v = richardson((0.2, f(0.2)), (0.1, f(0.1)), 2.0);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
