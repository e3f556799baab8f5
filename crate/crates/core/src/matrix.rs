//! Dense 4×4 real matrices: the oracle side of the group arithmetic.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub const ZERO: Matrix4 = Matrix4([[0.0; 4]; 4]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = 1.0;
        }
        m
    }

    /// Matrix unit with a single 1 at `(row, col)`, zero-based.
    pub fn unit(row: usize, col: usize) -> Self {
        let mut m = Self::ZERO;
        m.0[row][col] = 1.0;
        m
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference relative to `max(1, |entry|)`.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring around a truncated Taylor series.
    ///
    /// The argument is scaled so that its infinity norm is at most 1/2; the
    /// series is summed until terms fall below machine precision.
    pub fn expm(&self) -> Self {
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let scaled = self.scale(0.5f64.powi(squarings as i32));

        let mut sum = Self::identity();
        let mut term = Self::identity();
        for k in 1..=30 {
            term = (term * scaled).scale(1.0 / k as f64);
            sum = sum + term;
            if term.norm_inf() <= f64::EPSILON * 1e-3 * sum.norm_inf() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;

    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = Matrix4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;

    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for (o, r) in out.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *o += r;
        }
        out
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;

    fn sub(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self;
        for (o, r) in out.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *o -= r;
        }
        out
    }
}
