use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{cyclotomic_polynomial_shared, poly_ext_gcd, PolyQ};
use super::rational::{format_rational, parse_rational, rat, Rational};
use crate::error::{Error, Result};

pub fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn unit_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i64).extended_gcd(&(m as i64));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i64) as u64)
}

/// Reduction data for Q(zeta_M): `powers[k]` is zeta^k in the power basis, as sparse terms.
struct Modulus {
    phi: usize,
    poly: Arc<PolyQ>,
    powers: Vec<Vec<(usize, Rational)>>,
    /// Same table with integer coefficients; Phi_M is monic over Z.
    int_powers: Vec<Vec<(usize, BigInt)>>,
}

fn modulus(m: u64) -> Arc<Modulus> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Modulus>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(md) = cache.lock().unwrap().get(&m) {
        return md.clone();
    }
    let poly = cyclotomic_polynomial_shared(m);
    let phi = poly.degree().unwrap();
    let powers: Vec<Vec<(usize, Rational)>> = (0..m as usize)
        .map(|k| {
            PolyQ::monomial(k, Rational::one())
                .rem(&poly)
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(t, c)| (t, c.clone()))
                .collect()
        })
        .collect();
    let int_powers = powers
        .iter()
        .map(|terms: &Vec<(usize, Rational)>| {
            terms
                .iter()
                .map(|(t, c)| (*t, c.to_integer()))
                .collect()
        })
        .collect();
    let md = Arc::new(Modulus {
        phi,
        poly,
        powers,
        int_powers,
    });
    cache.lock().unwrap().insert(m, md.clone());
    md
}

/// Numerators over the least common denominator.
fn integer_form(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = coeffs
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    (nums, den)
}

/// An element of Q(zeta_M) in the power basis `1, zeta, ..., zeta^(phi(M)-1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    conductor: u64,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn zero(conductor: u64) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let phi = modulus(conductor).phi;
        CyclotomicNumber {
            conductor,
            coeffs: vec![Rational::zero(); phi],
        }
    }

    pub fn from_rational(conductor: u64, r: Rational) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(conductor: u64, n: i64) -> Self {
        Self::from_rational(conductor, rat(n))
    }

    pub fn one(conductor: u64) -> Self {
        Self::from_int(conductor, 1)
    }

    /// `zeta_M^k`; negative exponents allowed.
    pub fn zeta_power(conductor: u64, k: i64) -> Self {
        let md = modulus(conductor);
        let k = k.rem_euclid(conductor as i64) as usize;
        let mut z = Self::zero(conductor);
        for (t, c) in &md.powers[k] {
            z.coeffs[*t] = c.clone();
        }
        z
    }

    /// `i = zeta_M^(M/4)`; needs `4 | M`.
    pub fn imaginary_unit(conductor: u64) -> Result<Self> {
        if !conductor.is_multiple_of(4) {
            return Err(Error::Usage(format!(
                "conductor {conductor} is not divisible by 4; i is not available"
            )));
        }
        Ok(Self::zeta_power(conductor, (conductor / 4) as i64))
    }

    /// Reduce an arbitrary polynomial in zeta modulo Phi_M.
    pub fn from_poly(conductor: u64, p: &PolyQ) -> Self {
        let md = modulus(conductor);
        let mut coeffs = p.rem(&md.poly).into_coeffs();
        coeffs.resize(md.phi, Rational::zero());
        CyclotomicNumber { conductor, coeffs }
    }

    pub fn from_coeffs(conductor: u64, coeffs: Vec<Rational>) -> Result<Self> {
        let phi = modulus(conductor).phi;
        if coeffs.len() != phi {
            return Err(Error::Usage(format!(
                "conductor {conductor} needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(CyclotomicNumber { conductor, coeffs })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, when it lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor == other.conductor {
            Ok(())
        } else {
            Err(Error::ConductorMismatch(self.conductor, other.conductor))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if let Some(r) = other.as_rational() {
            return self.scale(r);
        }
        if let Some(r) = self.as_rational() {
            return other.scale(r);
        }
        let md = modulus(self.conductor);
        let phi = md.phi;
        let (na, da) = integer_form(&self.coeffs);
        let (nb, db) = integer_form(&other.coeffs);
        let mut wide = vec![BigInt::zero(); 2 * phi - 1];
        for (i, a) in na.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in nb.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        let mut ints: Vec<BigInt> = wide.drain(..phi).collect();
        let m = self.conductor as usize;
        for (k, c) in wide.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, pc) in &md.int_powers[(phi + k) % m] {
                ints[*t] += &c * pc;
            }
        }
        let den = da * db;
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: ints
                .into_iter()
                .map(|c| Rational::new(c, den.clone()))
                .collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Phi_M.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor, r.recip()));
        }
        let md = modulus(self.conductor);
        let a = PolyQ::from_coeffs(self.coeffs.clone());
        let (d, s, _) = poly_ext_gcd(&a, &md.poly);
        // Phi_M is irreducible, so any nonzero residue is coprime to it.
        debug_assert_eq!(d, PolyQ::one());
        Ok(Self::from_poly(self.conductor, &s))
    }

    /// The automorphism `zeta -> zeta^a`. `a = -1` is complex conjugation.
    pub fn galois_apply(&self, a: i64) -> Result<Self> {
        let m = self.conductor as i64;
        let a = a.rem_euclid(m);
        if a.gcd(&m) != 1 {
            return Err(Error::Usage(format!("{a} is not a unit modulo {m}")));
        }
        if a == 1 {
            return Ok(self.clone());
        }
        let md = modulus(self.conductor);
        let mut out = Self::zero(self.conductor);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (a * j as i64).rem_euclid(m) as usize;
            for (t, pc) in &md.powers[k] {
                out.coeffs[*t] += c * pc;
            }
        }
        Ok(out)
    }

    pub fn conj(&self) -> Self {
        self.galois_apply(-1).expect("-1 is always a unit")
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_add(rhs).expect("conductor mismatch")
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_sub(rhs).expect("conductor mismatch")
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_mul(rhs).expect("conductor mismatch")
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})*z{}^{k}", self.conductor)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc[{}]({self})", self.conductor)
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicJson {
    conductor: u64,
    coeffs: Vec<String>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicJson {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CyclotomicJson::deserialize(d)?;
        if raw.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CyclotomicNumber::from_coeffs(raw.conductor, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zeta(m: u64, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::zeta_power(m, k)
    }

    #[test]
    fn named_products() {
        let i = zeta(4, 1);
        assert_eq!(&i * &i, CyclotomicNumber::from_int(4, -1));
        assert_eq!(&zeta(7, 1) * &zeta(7, 6), CyclotomicNumber::one(7));
        let half = CyclotomicNumber::from_int(7, 2).inverse().unwrap();
        assert_eq!(half.as_rational(), Some(&(rat(1) / rat(2))));
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(
            CyclotomicNumber::zero(12).inverse(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn mixed_conductors_are_rejected() {
        let a = zeta(7, 1);
        let b = zeta(28, 1);
        assert_eq!(a.checked_mul(&b), Err(Error::ConductorMismatch(7, 28)));
    }

    #[test]
    fn galois_examples() {
        assert_eq!(zeta(7, 1).galois_apply(2).unwrap(), zeta(7, 2));
        let real = &zeta(7, 1) + &zeta(7, 6);
        assert_eq!(real.galois_apply(-1).unwrap(), real);
        let s3 = zeta(7, 1).galois_apply(3).unwrap();
        assert_eq!(s3.galois_apply(3).unwrap(), zeta(7, 2));
        assert!(zeta(12, 1).galois_apply(2).is_err());
    }

    #[test]
    fn imaginary_unit_needs_four() {
        assert!(CyclotomicNumber::imaginary_unit(7).is_err());
        let i = CyclotomicNumber::imaginary_unit(28).unwrap();
        assert_eq!(&i * &i, CyclotomicNumber::from_int(28, -1));
    }

    #[test]
    fn json_is_bit_exact() {
        let x = &zeta(12, 1).scale(&(rat(-3) / rat(4))) + &CyclotomicNumber::from_int(12, 2);
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"conductor":12,"coeffs":["2/1","-3/4","0/1","0/1"]}"#);
        let back: CyclotomicNumber = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(serde_json::from_str::<CyclotomicNumber>(
            r#"{"conductor":12,"coeffs":["1/1"]}"#
        )
        .is_err());
    }

    fn random_number(rng: &mut ChaCha8Rng, m: u64) -> CyclotomicNumber {
        let phi = euler_phi(m) as usize;
        let coeffs = (0..phi)
            .map(|_| rat(rng.gen_range(-5..=5)) / rat(rng.gen_range(1..=4)))
            .collect();
        CyclotomicNumber::from_coeffs(m, coeffs).unwrap()
    }

    #[test]
    fn field_axioms_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc1c1);
        for m in [4u64, 7, 12, 28] {
            let mut checked = 0;
            while checked < 500 {
                let (a, b, c) = (
                    random_number(&mut rng, m),
                    random_number(&mut rng, m),
                    random_number(&mut rng, m),
                );
                assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                if a.is_zero() {
                    continue;
                }
                assert!((&a * &a.inverse().unwrap()).is_one());
                checked += 1;
            }
        }
    }

    fn units(m: u64) -> Vec<i64> {
        (1..m as i64).filter(|a| a.gcd(&(m as i64)) == 1).collect()
    }

    proptest! {
        #[test]
        fn automorphisms_respect_field_operations(seed in any::<u64>(), m in prop::sample::select(vec![7u64, 12, 28])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = (random_number(&mut rng, m), random_number(&mut rng, m));
            let us = units(m);
            let a = us[rng.gen_range(0..us.len())];
            let b = us[rng.gen_range(0..us.len())];
            let s = |v: &CyclotomicNumber, k: i64| v.galois_apply(k).unwrap();
            prop_assert_eq!(s(&(&x + &y), a), &s(&x, a) + &s(&y, a));
            prop_assert_eq!(s(&(&x * &y), a), &s(&x, a) * &s(&y, a));
            prop_assert_eq!(s(&s(&x, b), a), s(&x, a * b));
        }
    }
}
