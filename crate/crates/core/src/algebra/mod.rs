//! The Hodge-Galois basis of `g_C ≅ sp(2n)`: root vectors, brackets, Galois action,
//! rationality and bracket closure.
//!
//! Basis elements are `X_{i,j} = ŵ_{i,j} + (Q_i/-Q_j)·ŵ_{-j,-i}` over signed indices, where
//! `ŵ_{a,b}` sends `w_b` to `w_a`. Since `X_{i,j} = (Q_i/-Q_j)·X_{-j,-i}`, each element is
//! stored on canonical representatives: the lexicographically smaller of `(i,j)` and `(-j,-i)`.

mod closure;
mod descent;
mod element;
mod polarization;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::CyclotomicNumber;
use crate::cm::{Flavor, GaloisElement, OrientedCMField};
use crate::error::{usage, Error, Result};

pub use closure::{generated_subalgebra, Subalgebra};
pub use descent::{regular_nilpotent_blocks, RationalModel};
pub use element::{AlgebraElement, Averaged, CycMatrix, ElementJson, TermJson};
pub use polarization::{default_polarization, PolarizationData};

/// A basis label `(i, j)` of signed indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootIndex {
    pub i: i32,
    pub j: i32,
}

impl RootIndex {
    pub fn new(i: i32, j: i32) -> Self {
        RootIndex { i, j }
    }

    /// The partner label `(-j, -i)` naming the same basis line.
    pub fn partner(self) -> Self {
        RootIndex::new(-self.j, -self.i)
    }

    pub fn is_canonical(self) -> bool {
        self <= self.partner()
    }

    pub fn is_cartan(self) -> bool {
        self.i == self.j
    }
}

/// Shared context for algebra elements: oriented field, polarization and cached group data.
#[derive(Debug)]
pub struct HodgeAlgebra {
    field: OrientedCMField,
    pol: PolarizationData,
    conductor: u64,
    roots: Vec<RootIndex>,
    root_slot: HashMap<RootIndex, usize>,
    group: OnceLock<Result<Vec<GaloisElement>>>,
    model: OnceLock<Result<RationalModel>>,
}

impl HodgeAlgebra {
    pub fn new(field: OrientedCMField) -> Arc<Self> {
        let pol = default_polarization(&field);
        Self::build(field, pol)
    }

    pub fn with_polarization(field: OrientedCMField, pol: PolarizationData) -> Result<Arc<Self>> {
        if pol.n() != field.n() {
            return usage("polarization size does not match the field");
        }
        Ok(Self::build(field, pol))
    }

    fn build(field: OrientedCMField, pol: PolarizationData) -> Arc<Self> {
        let n = field.n() as i32;
        let signed: Vec<i32> = (1..=n).chain((1..=n).map(|k| -k)).collect();
        let mut roots: Vec<RootIndex> = signed
            .iter()
            .flat_map(|&i| signed.iter().map(move |&j| RootIndex::new(i, j)))
            .filter(|r| r.is_canonical())
            .collect();
        roots.sort();
        let root_slot = roots.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        Arc::new(HodgeAlgebra {
            conductor: field.galois().working_conductor(),
            field,
            pol,
            roots,
            root_slot,
            group: OnceLock::new(),
            model: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &OrientedCMField {
        &self.field
    }

    pub fn polarization(&self) -> &PolarizationData {
        &self.pol
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }

    /// `n(2n+1)`.
    pub fn dimension(&self) -> usize {
        self.roots.len()
    }

    /// Conductor of the coefficient field.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Canonical basis labels in coordinate order.
    pub fn roots(&self) -> &[RootIndex] {
        &self.roots
    }

    pub fn root_slot(&self, r: RootIndex) -> Option<usize> {
        self.root_slot.get(&r).copied()
    }

    pub fn check_index(&self, k: i32) -> Result<()> {
        if k == 0 || k.unsigned_abs() as usize > self.n() {
            return usage(format!("signed index {k} outside ±1..±{}", self.n()));
        }
        Ok(())
    }

    /// `X_{i,j} = sign · X_{canonical}`.
    pub fn canonical(&self, i: i32, j: i32) -> (RootIndex, i8) {
        let r = RootIndex::new(i, j);
        if r.is_canonical() {
            (r, 1)
        } else {
            (r.partner(), self.pol.ratio(i, j))
        }
    }

    /// `l` with `X_{i,j} ∈ g^{l,-l}`: `p_i - p_j`.
    pub fn bidegree(&self, i: i32, j: i32) -> i64 {
        self.field.bidegree_of(i).0 as i64 - self.field.bidegree_of(j).0 as i64
    }

    /// Image of a signed index under a group element.
    pub fn act_signed(&self, g: &GaloisElement, k: i32) -> i32 {
        let pairs = self.field.pairs();
        pairs.signed(g.apply(pairs.position(k)))
    }

    pub fn group(&self) -> Result<&[GaloisElement]> {
        self.group
            .get_or_init(|| self.field.galois().elements())
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// The rational structure; only available for cyclotomic fields.
    pub fn rational_model(&self) -> Result<&RationalModel> {
        self.model
            .get_or_init(|| RationalModel::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub(crate) fn coefficient_action(&self, g: &GaloisElement, x: &CyclotomicNumber) -> CyclotomicNumber {
        match g.coeff_unit() {
            Some(a) => x.galois_apply(a as i64).expect("coefficient unit"),
            None => x.clone(),
        }
    }

    pub(crate) fn require_cyclotomic(&self, what: &str) -> Result<u64> {
        match self.field.galois().flavor() {
            Flavor::Cyclotomic { conductor } => Ok(conductor),
            Flavor::Abstract => Err(Error::Unsupported(format!(
                "{what} needs a cyclotomic field; abstract fields carry no coefficient action"
            ))),
        }
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.field == other.field && self.pol == other.pol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::{build_cyclotomic_cm, validate_orientation, Orientation};

    #[test]
    fn basis_sizes_and_bidegrees() {
        let g = build_cyclotomic_cm(7).unwrap();
        let f = validate_orientation(&g, &Orientation::from_classes(3, &[&[1], &[2, 3], &[4, 5], &[6]]))
            .unwrap();
        let alg = HodgeAlgebra::new(f);
        assert_eq!(alg.dimension(), 21);
        assert_eq!(alg.bidegree(1, 2), 1);
        assert_eq!(alg.bidegree(1, -1), 3); // label 6 is w_{-1}
        assert_eq!(alg.bidegree(2, 2), 0);
        assert_eq!(alg.canonical(-2, -1), (RootIndex::new(-2, -1), 1));
        assert_eq!(alg.canonical(1, 2), (RootIndex::new(-2, -1), 1));
        assert_eq!(alg.canonical(1, -1), (RootIndex::new(1, -1), 1));
        assert!(alg.check_index(4).is_err());
        assert!(alg.check_index(0).is_err());
    }
}
