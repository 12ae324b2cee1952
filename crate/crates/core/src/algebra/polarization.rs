use crate::arith::CyclotomicNumber;
use crate::cm::OrientedCMField;
use crate::error::{usage, Result};

/// Diagonal pairing values `Q_k = Q(w_k, w̄_k) = ε_k·i`. Off-diagonal pairings vanish
/// identically, so only the signs are stored (for `k = 1..n`; `ε_{-k} = -ε_k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationData {
    signs: Vec<i8>,
    conductor: u64,
}

/// `ε_k = (-1)^((p_k - q_k + 1)/2)`, the sign making `i^{p_k - q_k}·Q_k = +1`.
pub fn default_polarization(field: &OrientedCMField) -> PolarizationData {
    let signs = (1..=field.n() as i32)
        .map(|k| {
            let (p, q) = field.bidegree_of(k);
            let half = (p as i64 - q as i64 + 1).div_euclid(2);
            if half.rem_euclid(2) == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    PolarizationData {
        signs,
        conductor: field.galois().working_conductor(),
    }
}

impl PolarizationData {
    /// Arbitrary signs; the positivity convention is not enforced here.
    pub fn from_signs(signs: Vec<i8>, conductor: u64) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return usage("polarization signs must be +1 or -1");
        }
        if !conductor.is_multiple_of(4) {
            return usage("polarization values need i in the coefficient field");
        }
        Ok(PolarizationData { signs, conductor })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, k: i32) -> i8 {
        let s = self.signs[k.unsigned_abs() as usize - 1];
        if k > 0 {
            s
        } else {
            -s
        }
    }

    pub fn q_value(&self, k: i32) -> CyclotomicNumber {
        let i = CyclotomicNumber::imaginary_unit(self.conductor).expect("4 | conductor");
        if self.sign(k) > 0 {
            i
        } else {
            -&i
        }
    }

    /// `Q_i / -Q_j`, always ±1 for this family of polarizations.
    pub fn ratio(&self, i: i32, j: i32) -> i8 {
        -self.sign(i) * self.sign(j)
    }

    /// The convention `i^{p-q}·Q(w, w̄) = +1` on every basis vector.
    pub fn is_positive_for(&self, field: &OrientedCMField) -> bool {
        let i = CyclotomicNumber::imaginary_unit(self.conductor).unwrap();
        let one = CyclotomicNumber::one(self.conductor);
        (1..=self.n() as i32).flat_map(|k| [k, -k]).all(|k| {
            let (p, q) = field.bidegree_of(k);
            let e = (p as i64 - q as i64).rem_euclid(4);
            let mut x = self.q_value(k);
            for _ in 0..e {
                x = &x * &i;
            }
            x == one
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::{build_cyclotomic_cm, enumerate_orientations, validate_orientation, Orientation};

    #[test]
    fn signs_of_weight_three() {
        let g = build_cyclotomic_cm(7).unwrap();
        let f = validate_orientation(&g, &Orientation::from_classes(3, &[&[1], &[2, 3], &[4, 5], &[6]]))
            .unwrap();
        let pol = default_polarization(&f);
        let i = CyclotomicNumber::imaginary_unit(28).unwrap();
        // (3,0): +i since i^3 * i = 1; (2,1): -i since i * (-i) = 1
        assert_eq!(pol.q_value(1), i);
        assert_eq!(pol.q_value(2), -&i);
        assert_eq!(pol.q_value(-1), -&i);
        assert_eq!(pol.ratio(1, 2), 1);
        for k in 1..=3 {
            assert_eq!(pol.q_value(-k), -&pol.q_value(k));
        }
        assert!(pol.is_positive_for(&f));
    }

    #[test]
    fn default_is_positive_everywhere() {
        let g = build_cyclotomic_cm(9).unwrap();
        for o in enumerate_orientations(&g, 5, &[1, 1, 1, 1, 1, 1]).unwrap() {
            let f = validate_orientation(&g, &o).unwrap();
            assert!(default_polarization(&f).is_positive_for(&f));
        }
    }
}
