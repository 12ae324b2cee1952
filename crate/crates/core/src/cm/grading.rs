use serde::{Deserialize, Serialize};

use super::galois::GaloisElement;
use super::orientation::OrientedCMField;

/// Diagonal coordinates `A_k = p_k - q_k` of the grading element, stored for `k = 1..n`;
/// `A_{-k} = -A_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradingVector {
    values: Vec<i64>,
}

impl GradingVector {
    pub fn from_values(values: Vec<i64>) -> Self {
        GradingVector { values }
    }

    /// Value at a signed index.
    pub fn get(&self, k: i32) -> i64 {
        let v = self.values[k.unsigned_abs() as usize - 1];
        if k > 0 {
            v
        } else {
            -v
        }
    }

    /// Pair coordinates `(A_1, ..., A_n)`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn neg(&self) -> Self {
        GradingVector {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

pub fn grading_vector(field: &OrientedCMField) -> GradingVector {
    GradingVector {
        values: (1..=field.n() as i32)
            .map(|k| {
                let (p, q) = field.bidegree_of(k);
                p as i64 - q as i64
            })
            .collect(),
    }
}

/// `(g·v)(θ) = v(g⁻¹θ)`, read off in signed pair coordinates.
pub fn galois_act_grading(
    field: &OrientedCMField,
    g: &GaloisElement,
    v: &GradingVector,
) -> GradingVector {
    let pairs = field.pairs();
    let inv = g.inverse();
    GradingVector {
        values: (1..=field.n() as i32)
            .map(|k| v.get(pairs.signed(inv.apply(pairs.position(k)))))
            .collect(),
    }
}
