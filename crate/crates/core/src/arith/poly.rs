use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use super::rational::{rat, Rational};

/// Dense polynomial over Q, lowest degree first. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// `c * x^deg`
    pub fn monomial(deg: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[0] = rat(-1);
        coeffs[n] = rat(1);
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &PolyQ) -> (PolyQ, PolyQ) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (PolyQ::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &lc_inv;
            for (t, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    let idx = k - dd + t;
                    rem[idx] = &rem[idx] - &c * dc;
                }
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (PolyQ::from_coeffs(quot), PolyQ::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &PolyQ) -> PolyQ {
        self.div_rem(divisor).1
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::from_coeffs((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PolyQ::from_coeffs((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PolyQ::from_coeffs(out)
    }
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(f: &PolyQ, g: &PolyQ) -> PolyQ {
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Returns `(d, s, t)` with `s*f + t*g = d` and `d` the monic gcd.
pub fn poly_ext_gcd(f: &PolyQ, g: &PolyQ) -> (PolyQ, PolyQ, PolyQ) {
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (PolyQ::one(), PolyQ::zero());
    let (mut t0, mut t1) = (PolyQ::zero(), PolyQ::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = &s0 - &(&q * &s1);
        let t = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match r0.leading().cloned() {
        None => (PolyQ::zero(), PolyQ::zero(), PolyQ::zero()),
        Some(lc) => {
            let inv = lc.recip();
            (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
        }
    }
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<PolyQ>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<PolyQ>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub(crate) fn cyclotomic_polynomial_shared(m: u64) -> Arc<PolyQ> {
    assert!(m >= 1, "cyclotomic polynomial index must be positive");
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 = prod_{d | m} Phi_d
    let mut quotient = PolyQ::x_pow_minus_one(m as usize);
    for d in 1..m {
        if m.is_multiple_of(d) {
            let (q, r) = quotient.div_rem(&cyclotomic_polynomial_shared(d));
            debug_assert!(r.is_zero());
            quotient = q;
        }
    }
    let shared = Arc::new(quotient);
    cyclotomic_cache()
        .lock()
        .unwrap()
        .insert(m, shared.clone());
    shared
}

/// The m-th cyclotomic polynomial, by exact division of `x^m - 1` by the lower `Phi_d`.
pub fn cyclotomic_polynomial(m: u64) -> PolyQ {
    (*cyclotomic_polynomial_shared(m)).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gcd_of_known_factor() {
        let f = PolyQ::from_ints(&[-1, 0, 0, 1]);
        let g = PolyQ::from_ints(&[1, 1, 1]);
        assert_eq!(poly_gcd(&f, &g), g);
    }

    #[test]
    fn gcd_coprime_by_hand_euclid() {
        // x^3 - 1 = (x - 1)(x^2 + x + 3) + (2 - 2x)
        // 2 - 2x vanishes only at x = 1, where x^2 + x + 3 = 5, so the gcd is constant.
        let f = PolyQ::from_ints(&[-1, 0, 0, 1]);
        let g = PolyQ::from_ints(&[3, 1, 1]);
        let (q, r) = f.div_rem(&g);
        assert_eq!(q, PolyQ::from_ints(&[-1, 1]));
        assert_eq!(r, PolyQ::from_ints(&[2, -2]));
        assert_eq!(poly_gcd(&f, &g), PolyQ::one());
    }

    #[test]
    fn gcd_with_zero() {
        let f = PolyQ::from_ints(&[4, 0, 2]);
        assert_eq!(poly_gcd(&f, &PolyQ::zero()), PolyQ::from_ints(&[2, 0, 1]));
        assert_eq!(poly_gcd(&PolyQ::zero(), &f), PolyQ::from_ints(&[2, 0, 1]));
        assert!(poly_gcd(&PolyQ::zero(), &PolyQ::zero()).is_zero());
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), PolyQ::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), PolyQ::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(7), PolyQ::from_ints(&[1; 7]));
        assert_eq!(cyclotomic_polynomial(12), PolyQ::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn cyclotomic_product_reproduces_x_pow_minus_one() {
        for m in 1..=30u64 {
            let prod = (1..=m)
                .filter(|d| m % d == 0)
                .fold(PolyQ::one(), |acc, d| &acc * &cyclotomic_polynomial(d));
            assert_eq!(prod, PolyQ::x_pow_minus_one(m as usize), "m = {m}");
        }
    }

    #[test]
    fn ext_gcd_bezout() {
        let f = PolyQ::from_ints(&[-1, 0, 0, 1]);
        let g = PolyQ::from_ints(&[3, 1, 1]);
        let (d, s, t) = poly_ext_gcd(&f, &g);
        assert_eq!(&(&s * &f) + &(&t * &g), d);
        assert_eq!(d, PolyQ::one());
    }

    fn small_poly() -> impl Strategy<Value = PolyQ> {
        prop::collection::vec(-6i64..=6, 0..6).prop_map(|c| PolyQ::from_ints(&c))
    }

    proptest! {
        #[test]
        fn gcd_divides_both(f in small_poly(), g in small_poly(), h in small_poly()) {
            // share a factor half of the time
            let (f, g) = (&f * &h, &g * &h);
            let d = poly_gcd(&f, &g);
            if f.is_zero() && g.is_zero() {
                prop_assert!(d.is_zero());
            } else {
                prop_assert!(d.is_monic());
                prop_assert!(f.rem(&d).is_zero());
                prop_assert!(g.rem(&d).is_zero());
                let bound = match (f.degree(), g.degree()) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!(),
                };
                prop_assert!(d.degree().unwrap() <= bound);
            }
        }
    }
}
