use std::ops::Mul;

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };
    /// The coordinate swap (d_l, d_r) -> (d_r, d_l).
    pub const SWAP: Mat2 = Mat2 {
        m: [[0.0, 1.0], [1.0, 0.0]],
    };

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 {
            m: [[a11, a12], [a21, a22]],
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn half_trace(&self) -> f64 {
        0.5 * self.trace()
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(
            s * self.m[0][0],
            s * self.m[0][1],
            s * self.m[1][0],
            s * self.m[1][1],
        )
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0]).scale(1.0 / det))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }

    /// Real eigenvalues in increasing order, or None for a complex pair.
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        let h = self.half_trace();
        let disc = h * h - self.det();
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        // Larger-magnitude root first, the other from the determinant.
        let big = if h >= 0.0 { h + root } else { h - root };
        if big == 0.0 {
            return Some((0.0, 0.0));
        }
        let small = self.det() / big;
        Some(if big < small { (big, small) } else { (small, big) })
    }

    /// Unit eigenvector for a real eigenvalue.
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        let [[a, b], [c, d]] = self.m;
        // Pick the better-conditioned row of (A - lambda I).
        let r1 = [b, lambda - a];
        let r2 = [lambda - d, c];
        let n1 = r1[0].hypot(r1[1]);
        let n2 = r2[0].hypot(r2[1]);
        let v = if n1 >= n2 { r1 } else { r2 };
        let n = n1.max(n2);
        if n == 0.0 {
            return [1.0, 0.0];
        }
        [v[0] / n, v[1] / n]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = self.m;
        let b = o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenpairs_of_symmetric_matrix() {
        let a = Mat2::new(2.0, 1.0, 1.0, 2.0);
        let (l1, l2) = a.real_eigenvalues().unwrap();
        assert!((l1 - 1.0).abs() < 1e-15 && (l2 - 3.0).abs() < 1e-15);
        for l in [l1, l2] {
            let v = a.eigenvector(l);
            let av = a.apply(v);
            assert!((av[0] - l * v[0]).abs() < 1e-14 && (av[1] - l * v[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_has_no_real_eigenvalues() {
        let r = Mat2::new(0.0, -1.0, 1.0, 0.0);
        assert!(r.real_eigenvalues().is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Mat2::new(1.5, -0.25, 3.0, 0.5);
        let p = a * a.inverse().unwrap();
        assert!(p.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
    }
}
