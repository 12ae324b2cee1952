//! Exact dense linear algebra over Q and Q(zeta_M).

use num_traits::{One, Zero};

use super::cyclotomic::CyclotomicNumber;
use super::rational::Rational;

/// Field element usable by the elimination kernels.
pub trait Scalar: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Panics on zero.
    fn inv(&self) -> Self;
}

impl Scalar for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Scalar for CyclotomicNumber {
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        CyclotomicNumber::zero(self.conductor())
    }
    fn one_like(&self) -> Self {
        CyclotomicNumber::one(self.conductor())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.inverse().expect("inverse of zero")
    }
}

/// `row -= factor * pivot_row`, skipping zero entries.
fn axpy<T: Scalar>(row: &mut [T], factor: &T, pivot_row: &[T]) {
    for (r, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *r = r.sub(&factor.mul(p));
        }
    }
}

/// Incrementally maintained reduced row echelon basis of a subspace of T^dim.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    dim: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: Scalar> EchelonBasis<T> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Reduce `v` against the basis; the remainder is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                axpy(&mut v, &f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[T]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv();
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                axpy(row, &f, &r);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let mut basis = EchelonBasis::new(first.len());
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}

pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let zero = b[0][0].zero_like();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            let mut out = vec![zero.clone(); cols];
            for (k, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b[k].iter().enumerate() {
                    if !y.is_zero() {
                        out[j] = out[j].add(&x.mul(y));
                    }
                }
            }
            out
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity_like<T: Scalar>(n: usize, sample: &T) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        sample.one_like()
                    } else {
                        sample.zero_like()
                    }
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn invert<T: Scalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let sample = a[0][0].clone();
    let mut left: Vec<Vec<T>> = a.to_vec();
    let mut right = identity_like(n, &sample);
    for col in 0..n {
        let piv = (col..n).find(|&r| !left[r][col].is_zero())?;
        left.swap(col, piv);
        right.swap(col, piv);
        let inv = left[col][col].inv();
        for x in left[col].iter_mut().chain(right[col].iter_mut()) {
            *x = x.mul(&inv);
        }
        let (pl, pr) = (left[col].clone(), right[col].clone());
        for r in 0..n {
            if r != col && !left[r][col].is_zero() {
                let f = left[r][col].clone();
                axpy(&mut left[r], &f, &pl);
                axpy(&mut right[r], &f, &pr);
            }
        }
    }
    Some(right)
}
