//! Dense kernels for the small (4x4, 8x8) matrices the solvers work with:
//! products, LU solves with a 1-norm condition estimate, and evaluation of
//! polynomials and rationals of a matrix. No eigendecomposition is used
//! anywhere; viscosity matrices are built from matrix arithmetic alone.

use crate::basis::{hll_linear_coeffs, BasisFunction};
use crate::error::{Error, Result};
use crate::state::State;

/// Condition estimates beyond this are reported as numerical degeneracy.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMatrix<const N: usize> {
    pub m: [[f64; N]; N],
}

impl<const N: usize> SmallMatrix<N> {
    pub const ZERO: Self = SmallMatrix { m: [[0.0; N]; N] };

    pub fn identity() -> Self {
        let mut a = Self::ZERO;
        for i in 0..N {
            a.m[i][i] = 1.0;
        }
        a
    }

    pub fn diagonal(d: &[f64; N]) -> Self {
        let mut a = Self::ZERO;
        for i in 0..N {
            a.m[i][i] = d[i];
        }
        a
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut a = *self;
        for row in a.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        a
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut a = *self;
        for i in 0..N {
            for j in 0..N {
                a.m[i][j] += o.m[i][j];
            }
        }
        a
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut a = *self;
        for i in 0..N {
            for j in 0..N {
                a.m[i][j] -= o.m[i][j];
            }
        }
        a
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let mut c = Self::ZERO;
        for i in 0..N {
            for k in 0..N {
                let aik = self.m[i][k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..N {
                    c.m[i][j] += aik * o.m[k][j];
                }
            }
        }
        c
    }

    pub fn matvec(&self, v: &State<N>) -> State<N> {
        let mut out = State::ZERO;
        for i in 0..N {
            let mut acc = 0.0;
            for j in 0..N {
                acc += self.m[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..N {
            let mut s = 0.0;
            for i in 0..N {
                s += self.m[i][j].abs();
            }
            worst = worst.max(s);
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

/// LU factorization with partial pivoting.
pub struct Lu<const N: usize> {
    lu: [[f64; N]; N],
    piv: [usize; N],
}

impl<const N: usize> Lu<N> {
    pub fn factor(a: &SmallMatrix<N>) -> Result<Self> {
        let mut lu = a.m;
        let mut piv = [0usize; N];
        for (i, p) in piv.iter_mut().enumerate() {
            *p = i;
        }
        for col in 0..N {
            let mut pivot_row = col;
            let mut pivot_val = lu[col][col].abs();
            for row in col + 1..N {
                let v = lu[row][col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = row;
                }
            }
            if pivot_val == 0.0 {
                return Err(Error::NumericalDegeneracy {
                    context: "LU factorization (exactly singular)".into(),
                    cond: f64::INFINITY,
                });
            }
            if pivot_row != col {
                lu.swap(pivot_row, col);
                piv.swap(pivot_row, col);
            }
            let inv = 1.0 / lu[col][col];
            for row in col + 1..N {
                let f = lu[row][col] * inv;
                lu[row][col] = f;
                for j in col + 1..N {
                    lu[row][j] -= f * lu[col][j];
                }
            }
        }
        Ok(Lu { lu, piv })
    }

    pub fn solve(&self, b: &State<N>) -> State<N> {
        let mut y = State::<N>::ZERO;
        for i in 0..N {
            let mut acc = b[self.piv[i]];
            for j in 0..i {
                acc -= self.lu[i][j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..N).rev() {
            let mut acc = y[i];
            for j in i + 1..N {
                acc -= self.lu[i][j] * y[j];
            }
            y[i] = acc / self.lu[i][i];
        }
        y
    }

    /// Solve A^T z = b, reusing the factorization of A.
    pub fn solve_transposed(&self, b: &State<N>) -> State<N> {
        // A = P^{-1} L U, so A^T z = b  <=>  U^T w = b, L^T v = w, z = P^{-1}...
        // with row pivoting PA = LU the permutation acts on z's slots.
        let mut w = State::<N>::ZERO;
        for i in 0..N {
            let mut acc = b[i];
            for j in 0..i {
                acc -= self.lu[j][i] * w[j];
            }
            w[i] = acc / self.lu[i][i];
        }
        for i in (0..N).rev() {
            let mut acc = w[i];
            for j in i + 1..N {
                acc -= self.lu[j][i] * w[j];
            }
            w[i] = acc;
        }
        let mut z = State::<N>::ZERO;
        for i in 0..N {
            z[self.piv[i]] = w[i];
        }
        z
    }

    pub fn solve_matrix(&self, b: &SmallMatrix<N>) -> SmallMatrix<N> {
        let mut x = SmallMatrix::ZERO;
        for col in 0..N {
            let mut rhs = State::<N>::ZERO;
            for row in 0..N {
                rhs[row] = b.m[row][col];
            }
            let sol = self.solve(&rhs);
            for row in 0..N {
                x.m[row][col] = sol[row];
            }
        }
        x
    }

    /// Hager-style lower bound on ||A^{-1}||_1 using a few solves.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let mut x = State::<N>::new([1.0 / N as f64; N]);
        let mut est = 0.0f64;
        for _ in 0..4 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            est = est.max(norm);
            let mut xi = State::<N>::ZERO;
            for i in 0..N {
                xi[i] = if y[i] >= 0.0 { 1.0 } else { -1.0 };
            }
            let z = self.solve_transposed(&xi);
            let mut jmax = 0;
            let mut zmax = 0.0;
            for i in 0..N {
                if z[i].abs() > zmax {
                    zmax = z[i].abs();
                    jmax = i;
                }
            }
            let ztx: f64 = (0..N).map(|i| z[i] * x[i]).sum();
            if zmax <= ztx + 1e-30 {
                break;
            }
            x = State::<N>::ZERO;
            x[jmax] = 1.0;
        }
        est
    }
}

/// Even polynomial of a matrix, coefficients by descending even powers down
/// to the constant (same layout as the scalar tables). Horner on A^2.
pub fn mat_poly<const N: usize>(coeffs: &[f64], a: &SmallMatrix<N>) -> SmallMatrix<N> {
    assert!(!coeffs.is_empty());
    let a2 = a.matmul(a);
    let mut p = SmallMatrix::identity().scale(coeffs[0]);
    for &c in &coeffs[1..] {
        p = p.matmul(&a2);
        for i in 0..N {
            p.m[i][i] += c;
        }
    }
    p
}

/// alpha0 I + alpha1 A.
pub fn mat_poly_linear<const N: usize>(
    alpha0: f64,
    alpha1: f64,
    a: &SmallMatrix<N>,
) -> SmallMatrix<N> {
    let mut p = a.scale(alpha1);
    for i in 0..N {
        p.m[i][i] += alpha0;
    }
    p
}

/// Internal polynomial of a matrix through the defining recursion
/// p <- p + (A^2 - p^2)/2; used for orders beyond the tabulated ones.
pub fn mat_internal_recursive<const N: usize>(n: u32, a: &SmallMatrix<N>) -> SmallMatrix<N> {
    let a2 = a.matmul(a);
    let mut p = SmallMatrix::identity();
    for _ in 0..n {
        let p2 = p.matmul(&p);
        p = p.add(&a2.sub(&p2).scale(0.5));
    }
    p
}

/// Apply an even matrix polynomial to a vector without forming the matrix:
/// sum_j c_j (A2)^(deg-j) v for descending coefficients.
pub fn apply_even_desc<const N: usize>(
    coeffs: &[f64],
    a2: &SmallMatrix<N>,
    v: &State<N>,
) -> State<N> {
    let mut acc = *v * coeffs[0];
    for &c in &coeffs[1..] {
        acc = a2.matvec(&acc) + *v * c;
    }
    acc
}

/// Same with ascending coefficients (c_0 + c_1 A2 + ...).
pub fn apply_even_asc<const N: usize>(
    coeffs: &[f64],
    a2: &SmallMatrix<N>,
    v: &State<N>,
) -> State<N> {
    let last = coeffs.len() - 1;
    let mut acc = *v * coeffs[last];
    for j in (0..last).rev() {
        acc = a2.matvec(&acc) + *v * coeffs[j];
    }
    acc
}

/// Even matrix polynomial with ascending coefficients, forming the matrix.
pub fn mat_even_asc<const N: usize>(coeffs: &[f64], a2: &SmallMatrix<N>) -> SmallMatrix<N> {
    let last = coeffs.len() - 1;
    let mut acc = SmallMatrix::identity().scale(coeffs[last]);
    for j in (0..last).rev() {
        acc = acc.matmul(a2);
        for i in 0..N {
            acc.m[i][i] += coeffs[j];
        }
    }
    acc
}

fn check_condition<const N: usize>(d: &SmallMatrix<N>, lu: &Lu<N>, context: &str) -> Result<()> {
    let cond = d.one_norm() * lu.inverse_norm1_estimate();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::NumericalDegeneracy {
            context: context.into(),
            cond,
        });
    }
    Ok(())
}

/// Rational matrix function from homogeneous numerator/denominator
/// coefficient vectors (ascending powers of A^2 against descending powers of
/// the running iterate), iterated `depth` times from the identity.
///
/// The result is Num(R, A) * Den(R, A)^{-1}; numerator and denominator are
/// polynomials in A, so they commute, and the product is computed by one LU
/// solve rather than an explicit inverse.
pub fn mat_rational<const N: usize>(
    num: &[f64],
    den: &[f64],
    depth: u32,
    a: &SmallMatrix<N>,
) -> Result<SmallMatrix<N>> {
    let a2 = a.matmul(a);
    let mut r = SmallMatrix::<N>::identity();
    for level in 0..depth {
        let (n_mat, d_mat) = if level == 0 {
            (mat_even_asc(num, &a2), mat_even_asc(den, &a2))
        } else {
            let r2 = r.matmul(&r);
            (
                homogeneous_matrix(num, &r2, &a2),
                homogeneous_matrix(den, &r2, &a2),
            )
        };
        let lu = Lu::factor(&d_mat)?;
        check_condition(&d_mat, &lu, "rational viscosity denominator")?;
        let m = n_mat.matmul(&r);
        let x = lu.solve_matrix(&m);
        debug_assert!(
            {
                let xd = x.matmul(&d_mat);
                let dx = d_mat.matmul(&x);
                xd.sub(&dx).one_norm() <= 1e-8 * (1.0 + m.one_norm())
            },
            "rational evaluation lost commutativity"
        );
        r = x;
    }
    Ok(r)
}

/// sum_j c_j R2^(deg-j) A2^j for ascending coefficients.
fn homogeneous_matrix<const N: usize>(
    coeffs: &[f64],
    r2: &SmallMatrix<N>,
    a2: &SmallMatrix<N>,
) -> SmallMatrix<N> {
    let mut acc = SmallMatrix::<N>::identity().scale(coeffs[0]);
    let mut ap = SmallMatrix::<N>::identity();
    for &c in &coeffs[1..] {
        ap = ap.matmul(a2);
        acc = acc.matmul(r2).add(&ap.scale(c));
    }
    acc
}

/// Apply the depth-1 rational (numerator poly, then denominator solve) to a
/// single vector; the cheap path used by the flux kernels.
pub fn rational_apply_depth1<const N: usize>(
    num: &[f64],
    den: &[f64],
    a: &SmallMatrix<N>,
    v: &State<N>,
) -> Result<State<N>> {
    let a2 = a.matmul(a);
    let rhs = apply_even_asc(num, &a2, v);
    let d_mat = mat_even_asc(den, &a2);
    let lu = Lu::factor(&d_mat)?;
    check_condition(&d_mat, &lu, "rational viscosity denominator")?;
    Ok(lu.solve(&rhs))
}

/// Viscosity matrix Q = |lambda_max| f(A / |lambda_max|) for the polynomial
/// and rational bases; the linear basis uses the raw matrix, its speeds
/// already carry the scaling.
pub fn viscosity_matrix<const N: usize>(
    basis: &BasisFunction,
    a: &SmallMatrix<N>,
    lambda_max: f64,
) -> Result<SmallMatrix<N>> {
    match *basis {
        BasisFunction::HllLinear { s_left, s_right } => {
            let (a0, a1) = hll_linear_coeffs(s_left, s_right)?;
            Ok(mat_poly_linear(a0, a1, a))
        }
        BasisFunction::Internal { n } => {
            if n == 0 {
                return Err(Error::InvalidParameter(
                    "internal polynomial order must be >= 1".into(),
                ));
            }
            let scaled = normalized(a, lambda_max)?;
            let p = match crate::basis::internal_coefficients(n) {
                Some(c) => mat_poly(c, &scaled),
                None => mat_internal_recursive(n, &scaled),
            };
            Ok(p.scale(lambda_max))
        }
        BasisFunction::Pade { m, k, depth } => {
            if depth == 0 {
                return Err(Error::InvalidParameter(
                    "pade recursion depth must be >= 1".into(),
                ));
            }
            let (num, den) = crate::basis::pade_coefficients(m, k)?;
            let scaled = normalized(a, lambda_max)?;
            Ok(mat_rational(&num, &den, depth, &scaled)?.scale(lambda_max))
        }
    }
}

fn normalized<const N: usize>(a: &SmallMatrix<N>, lambda_max: f64) -> Result<SmallMatrix<N>> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    Ok(a.scale(1.0 / lambda_max))
}
