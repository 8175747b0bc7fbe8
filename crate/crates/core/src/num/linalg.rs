//! Small dense linear algebra on stack arrays.
//!
//! Boundary metrics are at most 2x2 and chart metrics at most 3x3, so all
//! hot-path operations work on fixed `[[f64; N]; N]` arrays with an explicit
//! runtime dimension. Larger one-off solves (fundamental matrices, least
//! squares) go through `nalgebra` elsewhere.

/// Matrix sized for boundary slices (dimension 1 or 2).
pub type BMat = [[f64; 2]; 2];
/// Vector sized for boundary slices.
pub type BVec = [f64; 2];
/// Matrix sized for full charts (dimension 2 or 3).
pub type CMat = [[f64; 3]; 3];
/// Vector sized for full charts.
pub type CVec = [f64; 3];

pub const BZERO: BMat = [[0.0; 2]; 2];
pub const CZERO: CMat = [[0.0; 3]; 3];

pub fn bmat_add(a: &BMat, b: &BMat) -> BMat {
    let mut r = BZERO;
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][j] + b[i][j];
        }
    }
    r
}

pub fn bmat_scale(a: &BMat, s: f64) -> BMat {
    let mut r = BZERO;
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][j] * s;
        }
    }
    r
}

pub fn bmat_mul(a: &BMat, b: &BMat, d: usize) -> BMat {
    let mut r = BZERO;
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += a[i][k] * b[k][j];
            }
            r[i][j] = s;
        }
    }
    r
}

pub fn bmat_mulvec(a: &BMat, v: &BVec, d: usize) -> BVec {
    let mut r = [0.0; 2];
    for i in 0..d {
        let mut s = 0.0;
        for k in 0..d {
            s += a[i][k] * v[k];
        }
        r[i] = s;
    }
    r
}

/// Quadratic form v^T a w.
pub fn bquad(a: &BMat, v: &BVec, w: &BVec, d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += v[i] * a[i][j] * w[j];
        }
    }
    s
}

pub fn bdot(v: &BVec, w: &BVec, d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        s += v[i] * w[i];
    }
    s
}

pub fn bmat_det(a: &BMat, d: usize) -> f64 {
    match d {
        1 => a[0][0],
        _ => a[0][0] * a[1][1] - a[0][1] * a[1][0],
    }
}

pub fn bmat_inv(a: &BMat, d: usize) -> BMat {
    let mut r = BZERO;
    match d {
        1 => {
            r[0][0] = 1.0 / a[0][0];
        }
        _ => {
            let det = bmat_det(a, 2);
            r[0][0] = a[1][1] / det;
            r[1][1] = a[0][0] / det;
            r[0][1] = -a[0][1] / det;
            r[1][0] = -a[1][0] / det;
        }
    }
    r
}

/// Smallest eigenvalue of a symmetric matrix (d = 1 or 2).
pub fn bmat_min_eig(a: &BMat, d: usize) -> f64 {
    match d {
        1 => a[0][0],
        _ => {
            let tr = a[0][0] + a[1][1];
            let det = bmat_det(a, 2);
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            tr / 2.0 - disc
        }
    }
}

pub fn cmat_mulvec(a: &CMat, v: &CVec, n: usize) -> CVec {
    let mut r = [0.0; 3];
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += a[i][k] * v[k];
        }
        r[i] = s;
    }
    r
}

pub fn cquad(a: &CMat, v: &CVec, w: &CVec, n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += v[i] * a[i][j] * w[j];
        }
    }
    s
}

pub fn cdot(v: &CVec, w: &CVec, n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        s += v[i] * w[i];
    }
    s
}

pub fn cmat_det(a: &CMat, n: usize) -> f64 {
    match n {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

pub fn cmat_inv(a: &CMat, n: usize) -> CMat {
    let mut r = CZERO;
    match n {
        1 => r[0][0] = 1.0 / a[0][0],
        2 => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            r[0][0] = a[1][1] / det;
            r[1][1] = a[0][0] / det;
            r[0][1] = -a[0][1] / det;
            r[1][0] = -a[1][0] / det;
        }
        _ => {
            let det = cmat_det(a, 3);
            r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
            r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
            r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
            r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
            r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
            r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
            r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
            r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
            r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_2x2_and_3x3() {
        let a: BMat = [[2.0, 0.3], [0.3, 1.5]];
        let inv = bmat_inv(&a, 2);
        let id = bmat_mul(&a, &inv, 2);
        assert_relative_eq!(id[0][0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(id[1][1], 1.0, epsilon = 1e-14);
        assert_relative_eq!(id[0][1], 0.0, epsilon = 1e-14);

        let c: CMat = [[3.0, 0.2, 0.1], [0.2, 2.0, -0.4], [0.1, -0.4, 1.2]];
        let cinv = cmat_inv(&c, 3);
        for i in 0..3 {
            let ei = cmat_mulvec(&c, &cinv_col(&cinv, i), 3);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(ei[j], want, epsilon = 1e-13);
            }
        }
    }

    fn cinv_col(a: &CMat, j: usize) -> CVec {
        [a[0][j], a[1][j], a[2][j]]
    }

    #[test]
    fn min_eigenvalue() {
        let a: BMat = [[2.0, 1.0], [1.0, 2.0]];
        assert_relative_eq!(bmat_min_eig(&a, 2), 1.0, epsilon = 1e-14);
    }
}
