use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::galois::GaloisCMData;
use crate::error::{usage, Error, Result};

/// Bidegree assignment `theta -> (p, q)` with `p + q = weight`, keyed by embedding label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub weight: u32,
    pub assignment: BTreeMap<u64, (u32, u32)>,
}

impl Orientation {
    pub fn new(weight: u32, assignment: impl IntoIterator<Item = (u64, (u32, u32))>) -> Self {
        Orientation {
            weight,
            assignment: assignment.into_iter().collect(),
        }
    }

    /// Builds a weight-`weight` orientation from the labels of the classes `Π^{w,0}, Π^{w-1,1}, ...`.
    pub fn from_classes(weight: u32, classes: &[&[u64]]) -> Self {
        let mut assignment = BTreeMap::new();
        for (k, class) in classes.iter().enumerate() {
            let p = weight - k as u32;
            for &l in *class {
                assignment.insert(l, (p, weight - p));
            }
        }
        Orientation { weight, assignment }
    }

    /// Hodge numbers `h^{w,0}, h^{w-1,1}, ..., h^{0,w}`.
    pub fn hodge_numbers(&self) -> Vec<usize> {
        let mut h = vec![0; self.weight as usize + 1];
        for &(p, _) in self.assignment.values() {
            h[(self.weight - p) as usize] += 1;
        }
        h
    }
}

/// Signed indexing of conjugate pairs: index `k > 0` is the smaller label of its pair
/// and `-k` its conjugate. Matrix order is `(w_1..w_n, w_-1..w_-n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairIndex {
    signed_of_pos: Vec<i32>,
    pos_of_slot: Vec<usize>,
}

impl PairIndex {
    fn new(galois: &GaloisCMData) -> Self {
        let deg = galois.degree();
        let n = deg / 2;
        let conj = galois.conjugation();
        let mut signed_of_pos = vec![0i32; deg];
        let mut pos_of_slot = vec![0usize; deg];
        let mut k = 0i32;
        // positions follow sorted labels, so the first unseen position is the lexicographic minimum
        for pos in 0..deg {
            if signed_of_pos[pos] != 0 {
                continue;
            }
            k += 1;
            let bar = conj.apply(pos);
            signed_of_pos[pos] = k;
            signed_of_pos[bar] = -k;
            pos_of_slot[(k - 1) as usize] = pos;
            pos_of_slot[n + (k - 1) as usize] = bar;
        }
        PairIndex {
            signed_of_pos,
            pos_of_slot,
        }
    }

    pub fn n(&self) -> usize {
        self.signed_of_pos.len() / 2
    }

    pub fn signed(&self, pos: usize) -> i32 {
        self.signed_of_pos[pos]
    }

    /// Row/column of `w_k` in the ordered basis.
    pub fn slot(&self, k: i32) -> usize {
        let n = self.n();
        debug_assert!(k != 0 && k.unsigned_abs() as usize <= n);
        if k > 0 {
            k as usize - 1
        } else {
            n + (-k) as usize - 1
        }
    }

    pub fn signed_of_slot(&self, slot: usize) -> i32 {
        let n = self.n();
        if slot < n {
            slot as i32 + 1
        } else {
            -((slot - n) as i32 + 1)
        }
    }

    pub fn position(&self, k: i32) -> usize {
        self.pos_of_slot[self.slot(k)]
    }

    /// Signed indices in matrix order.
    pub fn signed_indices(&self) -> impl Iterator<Item = i32> + '_ {
        (0..2 * self.n()).map(|s| self.signed_of_slot(s))
    }
}

/// A Galois CM field together with a validated odd-weight orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedCMField {
    galois: GaloisCMData,
    orientation: Orientation,
    pairs: PairIndex,
    bidegree_by_pos: Vec<(u32, u32)>,
}

impl OrientedCMField {
    pub fn galois(&self) -> &GaloisCMData {
        &self.galois
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn pairs(&self) -> &PairIndex {
        &self.pairs
    }

    pub fn weight(&self) -> u32 {
        self.orientation.weight
    }

    /// Number of conjugate pairs; `dim_Q V = 2n`.
    pub fn n(&self) -> usize {
        self.pairs.n()
    }

    pub fn bidegree_at(&self, pos: usize) -> (u32, u32) {
        self.bidegree_by_pos[pos]
    }

    /// `(p_k, q_k)` for a signed index.
    pub fn bidegree_of(&self, k: i32) -> (u32, u32) {
        self.bidegree_by_pos[self.pairs.position(k)]
    }

    pub fn label_of(&self, k: i32) -> u64 {
        self.galois.label(self.pairs.position(k))
    }

    pub fn signed_of_label(&self, label: u64) -> Option<i32> {
        self.galois.position(label).map(|p| self.pairs.signed(p))
    }
}

/// Checks the conjugation symmetry `θ ∈ Π^{p,q} ⇔ θ̄ ∈ Π^{q,p}` and assembles the pair index.
pub fn validate_orientation(
    galois: &GaloisCMData,
    orientation: &Orientation,
) -> Result<OrientedCMField> {
    let w = orientation.weight;
    if w.is_multiple_of(2) {
        return Err(Error::OddWeightRequired);
    }
    let invalid = |msg: String| Err(Error::InvalidOrientation(msg));
    let mut by_pos = vec![None; galois.degree()];
    for (&label, &(p, q)) in &orientation.assignment {
        let Some(pos) = galois.position(label) else {
            return invalid(format!("label {label} is not an embedding of the field"));
        };
        if p + q != w {
            return invalid(format!("label {label}: {p} + {q} != weight {w}"));
        }
        by_pos[pos] = Some((p, q));
    }
    let bidegree_by_pos: Vec<(u32, u32)> = match by_pos.iter().copied().collect::<Option<Vec<_>>>() {
        Some(v) => v,
        None => {
            let missing = by_pos.iter().position(Option::is_none).unwrap();
            return invalid(format!("label {} is unassigned", galois.label(missing)));
        }
    };
    let conj = galois.conjugation();
    for (pos, &(p, q)) in bidegree_by_pos.iter().enumerate() {
        let bar = conj.apply(pos);
        if bidegree_by_pos[bar] != (q, p) {
            return invalid(format!(
                "label {} has ({p},{q}) but its conjugate {} has {:?}",
                galois.label(pos),
                galois.label(bar),
                bidegree_by_pos[bar]
            ));
        }
    }
    Ok(OrientedCMField {
        pairs: PairIndex::new(galois),
        galois: galois.clone(),
        orientation: orientation.clone(),
        bidegree_by_pos,
    })
}

/// All orientations with the given Hodge numbers `h^{w,0}, ..., h^{0,w}`.
///
/// Pairs are visited in signed-index order; the positive member of each pair tries
/// `p = w, w-1, ..., 0`, which fixes the output order.
pub fn enumerate_orientations(
    galois: &GaloisCMData,
    weight: u32,
    hodge_numbers: &[usize],
) -> Result<Vec<Orientation>> {
    if weight.is_multiple_of(2) {
        return Err(Error::OddWeightRequired);
    }
    let w = weight as usize;
    if hodge_numbers.len() != w + 1 {
        return usage(format!(
            "weight {weight} needs {} Hodge numbers, got {}",
            w + 1,
            hodge_numbers.len()
        ));
    }
    if (0..=w).any(|k| hodge_numbers[k] != hodge_numbers[w - k]) {
        return usage(format!("Hodge numbers {hodge_numbers:?} are not symmetric"));
    }
    if hodge_numbers.iter().sum::<usize>() != galois.degree() {
        return usage(format!(
            "Hodge numbers {hodge_numbers:?} do not sum to the degree {}",
            galois.degree()
        ));
    }
    let pairs = PairIndex::new(galois);
    let n = pairs.n();
    // remaining[k] counts free slots in Π^{w-k,k}
    let mut remaining = hodge_numbers.to_vec();
    let mut choice = vec![0usize; n];
    let mut out = Vec::new();

    fn recurse(
        depth: usize,
        w: usize,
        remaining: &mut [usize],
        choice: &mut [usize],
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == choice.len() {
            emit(choice);
            return;
        }
        for k in 0..=w {
            let bar = w - k;
            if remaining[k] == 0 || remaining[bar] == 0 {
                continue;
            }
            remaining[k] -= 1;
            remaining[bar] -= 1;
            choice[depth] = k;
            recurse(depth + 1, w, remaining, choice, emit);
            remaining[k] += 1;
            remaining[bar] += 1;
        }
    }

    recurse(0, w, &mut remaining, &mut choice, &mut |c: &[usize]| {
        let mut assignment = BTreeMap::new();
        for (slot, &k) in c.iter().enumerate() {
            let p = (w - k) as u32;
            let q = k as u32;
            let k_pos = pairs.position(slot as i32 + 1);
            let bar_pos = pairs.position(-(slot as i32 + 1));
            assignment.insert(galois.label(k_pos), (p, q));
            assignment.insert(galois.label(bar_pos), (q, p));
        }
        out.push(Orientation { weight, assignment });
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::galois::build_cyclotomic_cm;

    fn seven_weight_three() -> Orientation {
        Orientation::from_classes(3, &[&[1], &[2, 3], &[4, 5], &[6]])
    }

    #[test]
    fn validates_the_standard_example() {
        let g = build_cyclotomic_cm(7).unwrap();
        let f = validate_orientation(&g, &seven_weight_three()).unwrap();
        assert_eq!(f.n(), 3);
        let signed: Vec<i32> = (0..6).map(|p| f.pairs().signed(p)).collect();
        assert_eq!(signed, vec![1, 2, 3, -3, -2, -1]);
        assert_eq!(f.bidegree_of(-1), (0, 3));
        assert_eq!(f.label_of(-2), 5);
    }

    #[test]
    fn rejects_broken_orientations() {
        let g = build_cyclotomic_cm(7).unwrap();
        let both_top = Orientation::from_classes(3, &[&[1, 6], &[2, 3], &[4, 5], &[]]);
        assert!(matches!(
            validate_orientation(&g, &both_top),
            Err(Error::InvalidOrientation(_))
        ));
        let even = Orientation::from_classes(2, &[&[1, 2, 3], &[], &[4, 5, 6]]);
        assert_eq!(validate_orientation(&g, &even), Err(Error::OddWeightRequired));
        let mut bad_sum = seven_weight_three();
        bad_sum.assignment.insert(1, (3, 1));
        assert!(validate_orientation(&g, &bad_sum).is_err());
        let mut missing = seven_weight_three();
        missing.assignment.remove(&4);
        assert!(validate_orientation(&g, &missing).is_err());
    }

    /// Brute force over every map labels -> {0..w} with the right class sizes.
    fn brute_force_count(g: &GaloisCMData, w: u32, h: &[usize]) -> usize {
        let deg = g.degree();
        let base = w as usize + 1;
        let mut count = 0;
        for code in 0..base.pow(deg as u32) {
            let mut c = code;
            let mut assignment = BTreeMap::new();
            for pos in 0..deg {
                let k = (c % base) as u32;
                c /= base;
                assignment.insert(g.label(pos), (w - k, k));
            }
            let o = Orientation { weight: w, assignment };
            if o.hodge_numbers() == h && validate_orientation(g, &o).is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn enumeration_counts() {
        let g = build_cyclotomic_cm(7).unwrap();
        for (w, h, expected) in [
            (3, vec![1, 2, 2, 1], 24),
            (1, vec![3, 3], 8),
            (3, vec![3, 0, 0, 3], 8),
        ] {
            let all = enumerate_orientations(&g, w, &h).unwrap();
            assert_eq!(all.len(), expected);
            assert_eq!(brute_force_count(&g, w, &h), expected);
            for o in &all {
                assert_eq!(o.hodge_numbers(), h);
                assert!(validate_orientation(&g, o).is_ok());
            }
        }
    }

    #[test]
    fn enumeration_rejects_inconsistent_hodge_numbers() {
        let g = build_cyclotomic_cm(7).unwrap();
        assert!(enumerate_orientations(&g, 3, &[1, 2, 1, 2]).is_err());
        assert!(enumerate_orientations(&g, 3, &[1, 1, 1, 1]).is_err());
        assert!(enumerate_orientations(&g, 3, &[3, 3]).is_err());
        assert_eq!(
            enumerate_orientations(&g, 2, &[2, 2, 2]),
            Err(Error::OddWeightRequired)
        );
    }

    #[test]
    fn json_shape() {
        let o = Orientation::from_classes(1, &[&[1], &[2]]);
        let s = serde_json::to_string(&o).unwrap();
        assert_eq!(s, r#"{"weight":1,"assignment":{"1":[1,0],"2":[0,1]}}"#);
        assert_eq!(serde_json::from_str::<Orientation>(&s).unwrap(), o);
    }
}
