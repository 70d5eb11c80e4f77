//! Associated Laguerre polynomials `L_n^J(x)` from their explicit finite sum.

/// Largest `n + J` for which factorials are formed in exact integer
/// arithmetic (`20!` is the largest factorial that fits in a `u64`).
const EXACT_LIMIT: u32 = 20;

fn factorial_u64(k: u32) -> u64 {
    (1..=k as u64).product()
}

/// `(n+J)! / ((n-k)! (J+k)!)`, i.e. the binomial `C(n+J, n-k)`.
fn binomial_factor(n: u32, j: u32, k: u32) -> f64 {
    if n + j <= EXACT_LIMIT {
        let num = factorial_u64(n + j);
        (num / (factorial_u64(n - k) * factorial_u64(j + k))) as f64
    } else {
        // multiplicative form of C(n+J, n-k)
        let top = n + j;
        let r = (n - k).min(j + k);
        (0..r).fold(1.0, |acc, i| acc * f64::from(top - i) / f64::from(i + 1))
    }
}

fn inv_factorial(k: u32) -> f64 {
    if k <= EXACT_LIMIT {
        1.0 / factorial_u64(k) as f64
    } else {
        (1..=k).fold(1.0, |acc, i| acc / f64::from(i))
    }
}

/// Coefficient of `(-x)^k` in `L_n^J(x)`.
pub fn coefficient(n: u32, j: u32, k: u32) -> f64 {
    assert!(k <= n, "coefficient index {k} exceeds degree {n}");
    binomial_factor(n, j, k) * inv_factorial(k)
}

/// Associated Laguerre polynomial
/// `L_n^J(x) = Σ_{k=0}^{n} (-1)^k (n+J)! / ((n-k)! (J+k)!) x^k / k!`.
///
/// For `n + J ≤ 20` the sum is rescaled by `n!` so every coefficient is an
/// exact integer, and evaluated with a compensated Horner scheme; the
/// alternating terms cancel heavily for large `x`.
pub fn laguerre_assoc(n: u32, j: u32, x: f64) -> f64 {
    if n + j <= EXACT_LIMIT {
        return laguerre_exact_coefficients(n, j, x);
    }
    (0..=n).rev().fold(0.0, |acc, k| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc * x + sign * coefficient(n, j, k)
    })
}

fn laguerre_exact_coefficients(n: u32, j: u32, x: f64) -> f64 {
    let fact = |k: u32| -> u128 { (1..=u128::from(k)).product() };
    let n_fact = fact(n);
    let mut acc = DoubleDouble::ZERO;
    for k in (0..=n).rev() {
        // (n+J)! / ((n-k)! (J+k)!) · n! / k!, an integer below 2^80
        let magnitude = fact(n + j) / (fact(n - k) * fact(j + k)) * (n_fact / fact(k));
        let c = DoubleDouble::from_u128(magnitude);
        let c = if k % 2 == 0 { c } else { c.neg() };
        acc = acc.mul_f64(x).add(c);
    }
    acc.div_f64(n_fact as f64)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn fast_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn from_u128(v: u128) -> Self {
        let hi = v as f64;
        let rest = if (hi as u128) >= v {
            -((hi as u128 - v) as f64)
        } else {
            (v - hi as u128) as f64
        };
        Self::fast_two_sum(hi, rest)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        Self::fast_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul_f64(self, x: f64) -> Self {
        let p = self.hi * x;
        let err = self.hi.mul_add(x, -p);
        Self::fast_two_sum(p, err + self.lo * x)
    }

    fn div_f64(self, d: f64) -> f64 {
        let q = self.hi / d;
        let r = (-q).mul_add(d, self.hi) + self.lo;
        q + r / d
    }
}

/// `s^n · L_n^J(-u / s)` expanded as a polynomial in `(u, s)`:
/// `Σ_k (n+J)! / ((n-k)! (J+k)! k!) · u^k · s^{n-k}`.
///
/// Finite at `s = 0`, where the unscaled argument diverges.
pub fn laguerre_scaled(n: u32, j: u32, u: f64, s: f64) -> f64 {
    (0..=n)
        .map(|k| coefficient(n, j, k) * u.powi(k as i32) * s.powi((n - k) as i32))
        .sum()
}
