//! Scalar basis functions f approximating |x| on [-1, 1].
//!
//! A solver's viscosity matrix is Q = |lambda_max| f(A / |lambda_max|), so
//! every basis here must satisfy the stability condition |x| <= f(x) <= 1
//! on [-1, 1]. Three families are provided: the linear HLL basis whose two
//! coefficients come from wave speed estimates, the "internal" polynomials
//! generated by p_{n+1} = (2 p_n - p_n^2 + x^2) / 2, and Pade-type rational
//! approximants generated from hypergeometric coefficient formulas.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Largest Pade order (in either slot) exposed by the crate.
pub const MAX_PADE_ORDER: u32 = 4;

/// Fan-width floor: fans narrower than this times the speed scale are
/// widened before computing linear-basis coefficients.
pub const FAN_EPSILON: f64 = 1e-12;

/// Direct coefficients of the internal polynomials p_1..p_4, ordered by
/// descending even powers of x down to the constant term. p_n has degree
/// 2^n, hence 2^(n-1) + 1 entries.
pub const INTERNAL_COEFFS_1: [f64; 2] = [0.5, 0.5];
pub const INTERNAL_COEFFS_2: [f64; 3] = [-1.0 / 8.0, 3.0 / 4.0, 3.0 / 8.0];
pub const INTERNAL_COEFFS_3: [f64; 5] = [
    -1.0 / 128.0,
    3.0 / 32.0,
    -23.0 / 64.0,
    31.0 / 32.0,
    39.0 / 128.0,
];
pub const INTERNAL_COEFFS_4: [f64; 9] = [
    -1.0 / 32768.0,
    3.0 / 4096.0,
    -59.0 / 8192.0,
    169.0 / 4096.0,
    -2635.0 / 16384.0,
    1693.0 / 4096.0,
    -5891.0 / 8192.0,
    4807.0 / 4096.0,
    8463.0 / 32768.0,
];

/// Tabulated coefficients for n <= 4; direct evaluation uses these, higher
/// orders fall back to the defining recursion.
pub fn internal_coefficients(n: u32) -> Option<&'static [f64]> {
    match n {
        1 => Some(&INTERNAL_COEFFS_1),
        2 => Some(&INTERNAL_COEFFS_2),
        3 => Some(&INTERNAL_COEFFS_3),
        4 => Some(&INTERNAL_COEFFS_4),
        _ => None,
    }
}

/// Evaluate an even polynomial given by `coeffs` (descending even powers,
/// constant last) by Horner's rule on x^2.
pub fn eval_even_poly(coeffs: &[f64], x: f64) -> f64 {
    let y = x * x;
    let mut acc = 0.0;
    for &c in coeffs {
        acc = acc * y + c;
    }
    acc
}

/// Internal polynomial p_n(x). Direct coefficients for n <= 4, recursion
/// above that.
pub fn eval_internal(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "internal polynomial order must be >= 1".into(),
        ));
    }
    if let Some(coeffs) = internal_coefficients(n) {
        return Ok(eval_even_poly(coeffs, x));
    }
    Ok(eval_internal_recursive(n, x))
}

/// p_n(x) evaluated purely through the recursion, starting from p_0 = 1.
pub fn eval_internal_recursive(n: u32, x: f64) -> f64 {
    let y = x * x;
    let mut p = 1.0;
    for _ in 0..n {
        p = 0.5 * (2.0 * p - p * p + y);
    }
    p
}

/// Coefficients of the linear basis f(x) = alpha0 + alpha1 x reproducing the
/// HLL solver for the wave speed pair (s_left, s_right).
pub fn hll_linear_coeffs(s_left: f64, s_right: f64) -> Result<(f64, f64)> {
    let width = s_right - s_left;
    if !(width > 0.0) {
        return Err(Error::DegenerateFan { s_left, s_right });
    }
    let alpha0 = (s_right * s_left.abs() - s_left * s_right.abs()) / width;
    let alpha1 = (s_right.abs() - s_left.abs()) / width;
    Ok((alpha0, alpha1))
}

/// Widen a wave fan that has (nearly) collapsed so downstream divisions by
/// S_right - S_left stay well defined. Returns the pair unchanged when the
/// fan is already wide enough.
pub fn widen_fan(s_left: f64, s_right: f64) -> (f64, f64) {
    let floor = FAN_EPSILON * s_left.abs().max(s_right.abs()).max(1.0);
    if s_right - s_left < floor {
        (s_left, s_left + floor)
    } else {
        (s_left, s_right)
    }
}

// ---------------------------------------------------------------------------
// Pade approximants
// ---------------------------------------------------------------------------

/// Exact rational arithmetic for the coefficient generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    const ZERO: Ratio = Ratio { num: 0, den: 1 };
    const ONE: Ratio = Ratio { num: 1, den: 1 };

    fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Ratio { num, den }.reduced()
    }

    fn from_int(v: i128) -> Self {
        Ratio { num: v, den: 1 }
    }

    /// Half-integer a/2.
    fn half(a: i128) -> Self {
        Ratio::new(a, 2)
    }

    fn reduced(self) -> Self {
        let g = gcd(self.num.unsigned_abs(), self.den.unsigned_abs()) as i128;
        let sign = if self.den < 0 { -1 } else { 1 };
        Ratio {
            num: sign * self.num / g,
            den: sign * self.den / g,
        }
    }

    fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Ratio) -> Ratio {
        assert!(o.num != 0, "rational division by zero");
        Ratio::new(self.num * o.den, self.den * o.num)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pochhammer symbol (a)_j = a (a+1) ... (a+j-1), with (a)_0 = 1.
fn pochhammer(a: Ratio, j: u32) -> Ratio {
    let mut acc = Ratio::ONE;
    for i in 0..j as i128 {
        acc = acc.mul(a.add(Ratio::from_int(i)));
    }
    acc
}

fn factorial(n: u32) -> Ratio {
    let mut acc = Ratio::ONE;
    for i in 1..=n as i128 {
        acc = acc.mul(Ratio::from_int(i));
    }
    acc
}

fn binomial(n: u32, j: u32) -> i128 {
    let mut acc: i128 = 1;
    for i in 0..j as i128 {
        acc = acc * (n as i128 - i) / (i + 1);
    }
    acc
}

/// Coefficients of the degree-k polynomial P_km(xi) driving the denominator
/// of the Pade recursion, ascending in xi.
fn p_km(k: u32, m: u32) -> Vec<Ratio> {
    let mi = m as i128;
    let ki = k as i128;
    (0..=k)
        .map(|n| {
            let ni = n as i128;
            let num = pochhammer(Ratio::half(1), n)
                .mul(pochhammer(Ratio::half(1 - 2 * mi), m))
                .mul(pochhammer(Ratio::from_int(ni - ki - mi), m));
            let den = factorial(n)
                .mul(pochhammer(Ratio::from_int(-ki - mi), m))
                .mul(pochhammer(Ratio::half(2 * ni + 1 - 2 * mi), m));
            num.div(den)
        })
        .collect()
}

/// Coefficients of the degree-m polynomial Q_km(xi) driving the numerator of
/// the Pade recursion, ascending in xi.
fn q_km(k: u32, m: u32) -> Vec<Ratio> {
    let mi = m as i128;
    let ki = k as i128;
    (0..=m)
        .map(|n| {
            let num = pochhammer(Ratio::from_int(-mi), n)
                .mul(pochhammer(Ratio::half(-1 - 2 * ki), n));
            let den = factorial(n).mul(pochhammer(Ratio::from_int(-ki - mi), n));
            num.div(den)
        })
        .collect()
}

/// Rewrite sum_n c_n (1 - x^2/r^2)^n, multiplied through by r^(2 deg), as a
/// homogeneous polynomial in (r^2, x^2): entry j multiplies r^(2(deg-j)) x^(2j).
fn homogenize(coeffs: &[Ratio]) -> Vec<Ratio> {
    let deg = coeffs.len() - 1;
    (0..=deg)
        .map(|j| {
            let mut acc = Ratio::ZERO;
            for (n, &c) in coeffs.iter().enumerate().skip(j) {
                acc = acc.add(c.mul(Ratio::from_int(binomial(n as u32, j as u32))));
            }
            if j % 2 == 1 {
                acc = acc.mul(Ratio::from_int(-1));
            }
            acc
        })
        .collect()
}

/// Numerator and denominator coefficients of one step of the Pade-[m/k]
/// recursion in homogeneous form:
///
///   r_{s+1} = r_s (a_0 r_s^{2m} + a_1 r_s^{2(m-1)} x^2 + ... + a_m x^{2m})
///                 / (b_0 r_s^{2k} + ... + b_k x^{2k}).
///
/// Entry j of each vector multiplies r^(2(deg-j)) x^(2j).
pub fn pade_coefficients(m: u32, k: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if m > MAX_PADE_ORDER || k > MAX_PADE_ORDER {
        return Err(Error::UnsupportedOrder { m, k });
    }
    let num = homogenize(&q_km(k, m));
    let den = homogenize(&p_km(k, m));
    Ok((
        num.into_iter().map(Ratio::to_f64).collect(),
        den.into_iter().map(Ratio::to_f64).collect(),
    ))
}

/// Evaluate a homogeneous coefficient vector at (r, x): sum_j c_j r^(2(deg-j)) x^(2j).
pub fn eval_homogeneous(coeffs: &[f64], r: f64, x: f64) -> f64 {
    let r2 = r * r;
    let x2 = x * x;
    let mut acc = coeffs[0];
    let mut xp = 1.0;
    for &c in &coeffs[1..] {
        xp *= x2;
        acc = acc * r2 + c * xp;
    }
    acc
}

/// Pade approximant r_depth^[m/k](x), computed through the homogeneous
/// recursion starting from r_0 = 1.
pub fn eval_pade(m: u32, k: u32, depth: u32, x: f64) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "pade recursion depth must be >= 1".into(),
        ));
    }
    let (num, den) = pade_coefficients(m, k)?;
    let mut r = 1.0;
    for _ in 0..depth {
        r *= eval_homogeneous(&num, r, x) / eval_homogeneous(&den, r, x);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Basis function objects
// ---------------------------------------------------------------------------

/// A concrete, pointwise-evaluable basis function.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisFunction {
    /// f(x) = alpha0 + alpha1 x with coefficients from the captured speeds.
    HllLinear { s_left: f64, s_right: f64 },
    Internal { n: u32 },
    Pade { m: u32, k: u32, depth: u32 },
}

impl BasisFunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            BasisFunction::HllLinear { s_left, s_right } => {
                let (a0, a1) = hll_linear_coeffs(s_left, s_right)?;
                Ok(a0 + a1 * x)
            }
            BasisFunction::Internal { n } => eval_internal(n, x),
            BasisFunction::Pade { m, k, depth } => eval_pade(m, k, depth, x),
        }
    }
}

/// Solver family selected for a run; the linear member picks up its
/// coefficients from the local wave speeds at every interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Hll,
    Internal { n: u32 },
    Pade { m: u32, k: u32, depth: u32 },
}

impl Family {
    /// Resolve coefficient tables once so the flux kernels do no generation
    /// work per interface.
    pub fn prepare(&self) -> Result<Prepared> {
        match *self {
            Family::Hll => Ok(Prepared::Linear),
            Family::Internal { n } => {
                if n == 0 {
                    return Err(Error::InvalidParameter(
                        "internal polynomial order must be >= 1".into(),
                    ));
                }
                match internal_coefficients(n) {
                    Some(c) => Ok(Prepared::PolyDirect(c.to_vec())),
                    None => Ok(Prepared::PolyRecursive(n)),
                }
            }
            Family::Pade { m, k, depth } => {
                if depth == 0 {
                    return Err(Error::InvalidParameter(
                        "pade recursion depth must be >= 1".into(),
                    ));
                }
                let (num, den) = pade_coefficients(m, k)?;
                Ok(Prepared::Rational { num, den, depth })
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Hll => write!(f, "hll"),
            Family::Internal { n } => write!(f, "int-{n}"),
            Family::Pade { m, k, depth } => {
                if depth == 1 {
                    write!(f, "pade-{m}-{k}")
                } else {
                    write!(f, "pade-{m}-{k}-d{depth}")
                }
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts "hll", "int-N" (N = 1..6) and "pade-M-K[-dN]" (M, K = 0..4).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::config("solver", format!("{msg}: '{s}'"));
        if s == "hll" {
            return Ok(Family::Hll);
        }
        if let Some(rest) = s.strip_prefix("int-") {
            let n: u32 = rest.parse().map_err(|_| bad("malformed order"))?;
            if !(1..=6).contains(&n) {
                return Err(bad("order out of range 1..6"));
            }
            return Ok(Family::Internal { n });
        }
        if let Some(rest) = s.strip_prefix("pade-") {
            let mut parts = rest.split('-');
            let m: u32 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("malformed order"))?;
            let k: u32 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("malformed order"))?;
            let depth = match parts.next() {
                None => 1,
                Some(d) => d
                    .strip_prefix('d')
                    .and_then(|t| t.parse().ok())
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| bad("malformed depth suffix"))?,
            };
            if parts.next().is_some() {
                return Err(bad("trailing tokens"));
            }
            if m > MAX_PADE_ORDER || k > MAX_PADE_ORDER {
                return Err(bad("order out of range 0..4"));
            }
            return Ok(Family::Pade { m, k, depth });
        }
        Err(bad("unknown solver"))
    }
}

/// Coefficient tables resolved for the flux kernels.
#[derive(Clone, Debug)]
pub enum Prepared {
    Linear,
    PolyDirect(Vec<f64>),
    PolyRecursive(u32),
    Rational {
        num: Vec<f64>,
        den: Vec<f64>,
        depth: u32,
    },
}

impl Prepared {
    /// Scalar evaluation, mainly for diagnostics and tests; the linear
    /// variant needs the local speeds.
    pub fn eval(&self, x: f64, speeds: Option<(f64, f64)>) -> Result<f64> {
        match self {
            Prepared::Linear => {
                let (s0, s1) = speeds.ok_or_else(|| {
                    Error::InvalidParameter("linear basis needs wave speeds".into())
                })?;
                let (a0, a1) = hll_linear_coeffs(s0, s1)?;
                Ok(a0 + a1 * x)
            }
            Prepared::PolyDirect(c) => Ok(eval_even_poly(c, x)),
            Prepared::PolyRecursive(n) => Ok(eval_internal_recursive(*n, x)),
            Prepared::Rational { num, den, depth } => {
                let mut r = 1.0;
                for _ in 0..*depth {
                    r *= eval_homogeneous(num, r, x) / eval_homogeneous(den, r, x);
                }
                Ok(r)
            }
        }
    }
}
