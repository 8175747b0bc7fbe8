//! Shared numerical machinery: small linear algebra, quadrature, fitting
//! and the adaptive Runge-Kutta stepper.

pub mod fit;
pub mod linalg;
pub mod ode;
pub mod quad;

/// Central finite difference with a 5-point stencil, O(h^4).
pub fn central_diff4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Central finite difference, O(h^2).
pub fn central_diff2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
