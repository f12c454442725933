//! Pointwise KKT residuals recomputed from a trained model.

use polcomp_core::models::SvmModel;

fn coefficient_of(model: &SvmModel, xi: &[f64]) -> f64 {
    model
        .support_vectors
        .iter()
        .position(|sv| sv.as_slice() == xi)
        .map_or(0.0, |k| model.coefficients[k])
}

fn at_bound(v: f64, c: f64) -> bool {
    (v - c).abs() <= 1e-12 * c.max(1.0)
}

/// Largest violation of the soft-margin conditions over the training set.
pub fn classification_residual(model: &SvmModel, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let a = coefficient_of(model, xi) * yi;
        let margin = yi * model.decision(xi).unwrap();
        let r = if a == 0.0 {
            (1.0 - margin).max(0.0)
        } else if at_bound(a, model.c) {
            (margin - 1.0).max(0.0)
        } else {
            (1.0 - margin).abs()
        };
        worst = worst.max(r);
    }
    worst
}

/// Largest violation of the epsilon-tube conditions over the training set.
pub fn regression_residual(model: &SvmModel, x: &[Vec<f64>], z: &[f64]) -> f64 {
    let eps = model.epsilon.unwrap();
    let mut worst: f64 = 0.0;
    for (xi, &zi) in x.iter().zip(z) {
        let b = coefficient_of(model, xi);
        let err = zi - model.decision(xi).unwrap();
        let r = if b == 0.0 {
            (err.abs() - eps).max(0.0)
        } else if at_bound(b.abs(), model.c) {
            (eps - err * b.signum()).max(0.0)
        } else {
            (err - eps * b.signum()).abs()
        };
        worst = worst.max(r);
    }
    worst
}
