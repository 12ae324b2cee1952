//! The rational structure on `K = Q(ζ_m)` with the trace form `Tr(δ·x·ȳ)`,
//! `δ = ζ_m - ζ_m^{-1}`, and its transport to the Hodge-Galois basis.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{AlgebraElement, CycMatrix, HodgeAlgebra};
use crate::arith::linalg::{invert, mat_mul, transpose};
use crate::arith::{CyclotomicNumber, Rational};
use crate::cm::GaloisElement;
use crate::error::{usage, Error, Result};

type QMatrix = Vec<Vec<Rational>>;

/// Change-of-basis data between the power basis `ζ_m^r` of `K` and the embedding basis.
#[derive(Debug)]
pub struct RationalModel {
    /// `P[slot(k)][r] = θ_k(ζ_m^r)`.
    embed: CycMatrix,
    embed_inv: CycMatrix,
    /// Rescaling `w'_k = d_k·w_k` that turns the trace form into `Q`.
    scale: Vec<CyclotomicNumber>,
    scale_inv: Vec<CyclotomicNumber>,
    gram: QMatrix,
    /// Columns form a symplectic basis of `gram`: `SᵀGS = [[0, I], [-I, 0]]`.
    symplectic: QMatrix,
    symplectic_inv: QMatrix,
}

fn qzero() -> Rational {
    Rational::zero()
}

fn qone() -> Rational {
    Rational::one()
}

fn pairing(g: &QMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = qzero();
    for (r, xr) in x.iter().enumerate() {
        if xr.is_zero() {
            continue;
        }
        for (s, ys) in y.iter().enumerate() {
            if !ys.is_zero() && !g[r][s].is_zero() {
                acc += xr * &g[r][s] * ys;
            }
        }
    }
    acc
}

/// Columns `v_1..v_n, w_1..w_n` with `G(v_i, w_j) = δ_ij` and all other pairings zero.
fn symplectic_basis(g: &QMatrix) -> Option<QMatrix> {
    let size = g.len();
    let mut pool: Vec<Vec<Rational>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { qone() } else { qzero() }).collect())
        .collect();
    let (mut vs, mut ws) = (Vec::new(), Vec::new());
    while !pool.is_empty() {
        let u = pool.remove(0);
        let k = pool.iter().position(|x| !pairing(g, &u, x).is_zero())?;
        let w = pool.remove(k);
        let f = pairing(g, &u, &w).recip();
        let w: Vec<Rational> = w.into_iter().map(|x| x * &f).collect();
        for x in pool.iter_mut() {
            let (xw, xu) = (pairing(g, x, &w), pairing(g, x, &u));
            for t in 0..size {
                x[t] = &x[t] - &xw * &u[t] + &xu * &w[t];
            }
        }
        pool.retain(|x| x.iter().any(|c| !c.is_zero()));
        vs.push(u);
        ws.push(w);
    }
    let cols: Vec<Vec<Rational>> = vs.into_iter().chain(ws).collect();
    Some(transpose(&cols))
}

impl RationalModel {
    pub(crate) fn build(alg: &HodgeAlgebra) -> Result<Self> {
        let m = alg.require_cyclotomic("the rational structure")?;
        let big = alg.conductor();
        let step = (big / m) as i64;
        let field = alg.field();
        let pairs = field.pairs();
        let size = 2 * alg.n();
        let labels: Vec<i64> = (0..size)
            .map(|s| field.label_of(pairs.signed_of_slot(s)) as i64)
            .collect();

        let embed: CycMatrix = labels
            .iter()
            .map(|&a| {
                (0..size as i64)
                    .map(|r| CyclotomicNumber::zeta_power(big, step * a * r))
                    .collect()
            })
            .collect();
        let embed_inv = invert(&embed).expect("embedding matrix is a Vandermonde matrix");

        let u: Vec<CyclotomicNumber> = labels
            .iter()
            .map(|&a| {
                &CyclotomicNumber::zeta_power(big, step * a)
                    - &CyclotomicNumber::zeta_power(big, -step * a)
            })
            .collect();

        let mut scale = Vec::with_capacity(size);
        for (s, us) in u.iter().enumerate() {
            let k = pairs.signed_of_slot(s);
            scale.push(if k > 0 {
                &alg.polarization().q_value(k) * &us.inverse()?
            } else {
                CyclotomicNumber::one(big)
            });
        }
        let scale_inv = scale
            .iter()
            .map(CyclotomicNumber::inverse)
            .collect::<Result<Vec<_>>>()?;

        // G_rs = Σ_a u_a θ_a(ζ^r) θ_ā(ζ^s)
        let mut gram = vec![vec![qzero(); size]; size];
        for r in 0..size {
            for s in 0..size {
                let mut acc = CyclotomicNumber::zero(big);
                for a in 0..size {
                    let bar = pairs.slot(-pairs.signed_of_slot(a));
                    acc = &acc + &(&u[a] * &(&embed[a][r] * &embed[bar][s]));
                }
                gram[r][s] = acc
                    .as_rational()
                    .cloned()
                    .ok_or_else(|| Error::Precondition("trace form is not rational".into()))?;
            }
        }
        let symplectic = symplectic_basis(&gram)
            .ok_or_else(|| Error::Precondition("trace form is degenerate".into()))?;
        let symplectic_inv = invert(&symplectic).expect("symplectic basis is invertible");
        Ok(RationalModel {
            embed,
            embed_inv,
            scale,
            scale_inv,
            gram,
            symplectic,
            symplectic_inv,
        })
    }

    /// Gram matrix of the trace form on the power basis `1, ζ_m, ..., ζ_m^{2n-1}`.
    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn symplectic_basis(&self) -> &QMatrix {
        &self.symplectic
    }

    /// `RᵀG + GR = 0`.
    pub fn preserves_gram(&self, r: &QMatrix) -> bool {
        let rt = transpose(r);
        let a = mat_mul(&rt, &self.gram);
        let b = mat_mul(&self.gram, r);
        a.iter()
            .zip(&b)
            .all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p + q).is_zero()))
    }

    /// `c_{g,k} = g(d_k)/d_{gk}` and its inverse, indexed by slot.
    pub(crate) fn twist(
        &self,
        alg: &HodgeAlgebra,
        g: &GaloisElement,
    ) -> (Vec<CyclotomicNumber>, Vec<CyclotomicNumber>) {
        let pairs = alg.field().pairs();
        (0..self.scale.len())
            .map(|s| {
                let k = pairs.signed_of_slot(s);
                let gs = pairs.slot(alg.act_signed(g, k));
                (
                    &alg.coefficient_action(g, &self.scale[s]) * &self.scale_inv[gs],
                    &self.scale[gs] * &alg.coefficient_action(g, &self.scale_inv[s]),
                )
            })
            .unzip()
    }
}

/// `A` = ones on the superdiagonal, `B = E_{nn}`: the blocks of a regular nilpotent,
/// whose degree is `2n`.
pub fn regular_nilpotent_blocks(n: usize) -> (QMatrix, QMatrix) {
    let a = (0..n)
        .map(|i| (0..n).map(|j| if j == i + 1 { qone() } else { qzero() }).collect())
        .collect();
    let b = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == n - 1 && j == n - 1 { qone() } else { qzero() })
                .collect()
        })
        .collect();
    (a, b)
}

impl AlgebraElement {
    /// The element acting on `K` by the rational matrix `r` (power basis). `r` must
    /// preserve the trace form.
    pub fn from_rational_matrix(alg: &Arc<HodgeAlgebra>, r: &QMatrix) -> Result<Self> {
        let model = alg.rational_model()?;
        let size = 2 * alg.n();
        if r.len() != size || r.iter().any(|row| row.len() != size) {
            return usage(format!("expected a {size}x{size} rational matrix"));
        }
        if !model.preserves_gram(r) {
            return usage("matrix does not preserve the rational form");
        }
        let big = alg.conductor();
        let rc: CycMatrix = r
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| CyclotomicNumber::from_rational(big, x.clone()))
                    .collect()
            })
            .collect();
        let xw = mat_mul(&mat_mul(&model.embed, &rc), &model.embed_inv);
        let x: CycMatrix = xw
            .iter()
            .enumerate()
            .map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .map(|(b, v)| {
                        if v.is_zero() {
                            v.clone()
                        } else {
                            &(v * &model.scale[b]) * &model.scale_inv[a]
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_matrix(alg, &x)
    }

    /// `S·[[A, B], [0, -Aᵀ]]·S⁻¹` in a symplectic basis `S` of the rational form. Nilpotent
    /// whenever `A` is strictly upper triangular; `B` must be symmetric.
    pub fn rational_nilpotent(alg: &Arc<HodgeAlgebra>, a: &QMatrix, b: &QMatrix) -> Result<Self> {
        let n = alg.n();
        let square = |m: &QMatrix| m.len() == n && m.iter().all(|row| row.len() == n);
        if !square(a) || !square(b) {
            return usage(format!("blocks must be {n}x{n}"));
        }
        if (0..n).any(|i| (0..=i).any(|j| !a[i][j].is_zero())) {
            return usage("A must be strictly upper triangular");
        }
        if (0..n).any(|i| (0..n).any(|j| b[i][j] != b[j][i])) {
            return usage("B must be symmetric");
        }
        let model = alg.rational_model()?;
        let mut std = vec![vec![qzero(); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                std[i][j] = a[i][j].clone();
                std[i][n + j] = b[i][j].clone();
                std[n + i][n + j] = -a[j][i].clone();
            }
        }
        let r = mat_mul(&mat_mul(&model.symplectic, &std), &model.symplectic_inv);
        Self::from_rational_matrix(alg, &r)
    }
}
