use std::ops::Mul;

use crate::ipa::JacobianEstimate;
use crate::regulator::controller::{GuardConfig, Mode};

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[a, 0.0], [0.0, b]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[0][1] == 0.0 && self.0[1][0] == 0.0
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl From<JacobianEstimate> for Mat2 {
    fn from(j: JacobianEstimate) -> Self {
        Mat2(j.as_matrix())
    }
}

fn usable(v: f64, eps: f64) -> bool {
    v.is_finite() && v.abs() >= eps
}

/// Gain for the next control cycle: the inverse of the lower-triangular
/// Jacobian (centralized) or of its diagonal (decentralized).
///
/// A row whose pivot falls below `epsilon_j` in magnitude is copied from
/// `prev`. In centralized mode a guarded first row still feeds the
/// off-diagonal term of the second row through `a21 = -j21 * a11 / j22`.
pub fn invert_gain(j: &JacobianEstimate, prev: &Mat2, mode: Mode, guards: &GuardConfig) -> Mat2 {
    let eps = guards.epsilon_j;
    let ok1 = usable(j.j11, eps);
    let ok2 = usable(j.j22, eps);
    let row1 = if ok1 { [1.0 / j.j11, 0.0] } else { prev.0[0] };
    let row2 = match (mode, ok1, ok2) {
        (_, _, false) => prev.0[1],
        (Mode::Decentralized, _, true) => [0.0, 1.0 / j.j22],
        (Mode::Centralized, true, true) => [-j.j21 / (j.j11 * j.j22), 1.0 / j.j22],
        (Mode::Centralized, false, true) => [-j.j21 * row1[0] / j.j22, 1.0 / j.j22],
    };
    Mat2([row1, row2])
}
