//! Fixed-length vectors of conserved variables.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A cell state: 4 components for Euler, 8 for MHD. Test systems may use
/// other lengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State<const N: usize>(pub [f64; N]);

impl<const N: usize> State<N> {
    pub const ZERO: Self = State([0.0; N]);

    pub fn new(v: [f64; N]) -> Self {
        State(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    pub fn abs_max(&self) -> f64 {
        self.0.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl<const N: usize> Default for State<N> {
    fn default() -> Self {
        State::ZERO
    }
}

impl<const N: usize> Index<usize> for State<N> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for State<N> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for State<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
        self
    }
}

impl<const N: usize> Sub for State<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
        self
    }
}

impl<const N: usize> AddAssign for State<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
    }
}

impl<const N: usize> SubAssign for State<N> {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl<const N: usize> Mul<f64> for State<N> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for v in self.0.iter_mut() {
            *v *= s;
        }
        self
    }
}

impl<const N: usize> Neg for State<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}
