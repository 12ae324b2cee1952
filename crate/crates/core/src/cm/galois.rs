use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, unit_inverse};
use crate::error::{usage, Error, Result};

/// Cap on breadth-first group enumeration.
pub const GROUP_ENUMERATION_CAP: usize = 10_000;

/// A permutation of label positions `0..len`, stored as the image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return usage(format!("{images:?} is not a permutation"));
            }
        }
        Ok(Permutation(images))
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// A Galois group element: its permutation of embeddings and, for cyclotomic
/// fields, the unit `a` (mod the working conductor) with `zeta -> zeta^a` on coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisElement {
    perm: Permutation,
    coeff_unit: Option<u64>,
    working_conductor: u64,
}

impl GaloisElement {
    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// Exponent of the coefficient automorphism; `None` means it acts trivially on coefficients.
    pub fn coeff_unit(&self) -> Option<u64> {
        self.coeff_unit
    }

    pub fn apply(&self, pos: usize) -> usize {
        self.perm.apply(pos)
    }

    pub fn compose(&self, other: &GaloisElement) -> GaloisElement {
        let m = self.working_conductor;
        GaloisElement {
            perm: self.perm.compose(&other.perm),
            coeff_unit: match (self.coeff_unit, other.coeff_unit) {
                (Some(a), Some(b)) => Some(a * b % m),
                _ => None,
            },
            working_conductor: m,
        }
    }

    pub fn inverse(&self) -> GaloisElement {
        let m = self.working_conductor;
        GaloisElement {
            perm: self.perm.inverse(),
            coeff_unit: self
                .coeff_unit
                .map(|a| unit_inverse(a, m).expect("coefficient unit")),
            working_conductor: m,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity()
    }

    pub fn order(&self) -> usize {
        let mut k = 1;
        let mut g = self.clone();
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "lowercase")]
pub enum Flavor {
    Cyclotomic { conductor: u64 },
    Abstract,
}

/// Embedding labels with the Galois action and complex conjugation of a Galois CM field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisCMData {
    labels: Vec<u64>,
    position: HashMap<u64, usize>,
    generators: Vec<GaloisElement>,
    conjugation: GaloisElement,
    flavor: Flavor,
    working_conductor: u64,
}

/// `lcm(4, m)`: the coefficient field always contains i.
pub fn working_conductor(m: u64) -> u64 {
    m.lcm(&4)
}

/// Lift a unit mod `m` to a unit mod `lcm(4, m)` that fixes i. The lift is a homomorphism.
fn lift_unit(a: u64, m: u64) -> u64 {
    let big = working_conductor(m);
    if big == m {
        return a % m;
    }
    (0..big / m)
        .map(|t| a % m + t * m)
        .find(|b| b % 4 == 1)
        .expect("CRT lift exists for odd m")
}

fn multiplicative_order(a: u64, m: u64) -> u64 {
    let mut k = 1;
    let mut x = a % m;
    while x != 1 {
        x = x * a % m;
        k += 1;
    }
    k
}

/// Q(zeta_m) with embeddings labelled by the units mod m.
pub fn build_cyclotomic_cm(m: u64) -> Result<GaloisCMData> {
    if m < 3 {
        return Err(Error::NotCmField(format!(
            "Q(zeta_{m}) = Q has degree 1"
        )));
    }
    if m % 4 == 2 {
        return usage(format!(
            "conductor {m} is not canonical; Q(zeta_{m}) = Q(zeta_{})",
            m / 2
        ));
    }
    let degree = euler_phi(m);
    if degree % 2 == 1 {
        return Err(Error::NotCmField(format!("odd degree {degree}")));
    }
    let labels: Vec<u64> = (1..m).filter(|a| a.gcd(&m) == 1).collect();
    let position: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let big = working_conductor(m);
    let element = |a: u64| GaloisElement {
        perm: Permutation(labels.iter().map(|&l| position[&(l * a % m)]).collect()),
        coeff_unit: Some(lift_unit(a, m)),
        working_conductor: big,
    };

    // Greedy generating set: an element of maximal order first, then the smallest
    // units not yet reached.
    let max_order = labels
        .iter()
        .map(|&a| multiplicative_order(a, m))
        .max()
        .unwrap();
    let first = *labels
        .iter()
        .find(|&&a| multiplicative_order(a, m) == max_order)
        .unwrap();
    let mut gens = vec![first];
    let mut reached = subgroup(&gens, m);
    for &a in &labels {
        if reached.len() == labels.len() {
            break;
        }
        if !reached.contains(&a) {
            gens.push(a);
            reached = subgroup(&gens, m);
        }
    }

    Ok(GaloisCMData {
        generators: gens.iter().map(|&a| element(a)).collect(),
        conjugation: element(m - 1),
        position,
        labels,
        flavor: Flavor::Cyclotomic { conductor: m },
        working_conductor: big,
    })
}

fn subgroup(gens: &[u64], m: u64) -> Vec<u64> {
    let mut seen = vec![1u64];
    let mut queue = VecDeque::from([1u64]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = x * g % m;
            if !seen.contains(&y) {
                seen.push(y);
                queue.push_back(y);
            }
        }
    }
    seen
}

/// A Galois CM field given abstractly by its action on embeddings.
/// Permutations are image lists aligned with `labels`.
pub fn build_abstract_cm(
    labels: &[u64],
    generators: &[Vec<u64>],
    conjugation: &[u64],
) -> Result<GaloisCMData> {
    if labels.is_empty() || labels.len() % 2 == 1 {
        return Err(Error::NotCmField(format!(
            "{} embeddings; a CM field has even degree",
            labels.len()
        )));
    }
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != labels.len() {
        return usage("duplicate embedding labels");
    }
    let position: HashMap<u64, usize> = sorted.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let to_perm = |images: &[u64]| -> Result<Permutation> {
        if images.len() != labels.len() {
            return usage(format!(
                "image list has {} entries for {} labels",
                images.len(),
                labels.len()
            ));
        }
        let mut by_pos = vec![usize::MAX; labels.len()];
        for (src, img) in labels.iter().zip(images) {
            let Some(&dst) = position.get(img) else {
                return usage(format!("unknown label {img} in image list"));
            };
            by_pos[position[src]] = dst;
        }
        Permutation::new(by_pos)
    };
    let elem = |p: Permutation| GaloisElement {
        perm: p,
        coeff_unit: None,
        working_conductor: 4,
    };
    let gens = generators
        .iter()
        .map(|g| to_perm(g).map(elem))
        .collect::<Result<Vec<_>>>()?;
    let conj = elem(to_perm(conjugation)?);

    let n = labels.len();
    let c2 = conj.compose(&conj);
    if !c2.is_identity() || (0..n).any(|i| conj.apply(i) == i) {
        return Err(Error::BadConjugation);
    }
    for (k, g) in gens.iter().enumerate() {
        if g.compose(&conj) != conj.compose(g) {
            return Err(Error::ConjugationNotCentral(k));
        }
    }
    let data = GaloisCMData {
        labels: sorted,
        position,
        generators: gens,
        conjugation: conj,
        flavor: Flavor::Abstract,
        working_conductor: 4,
    };
    if data.orbit(0).len() != n {
        return Err(Error::NotTransitive);
    }
    Ok(data)
}

impl GaloisCMData {
    /// Sorted embedding labels; positions index into this list.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, pos: usize) -> u64 {
        self.labels[pos]
    }

    pub fn position(&self, label: u64) -> Option<usize> {
        self.position.get(&label).copied()
    }

    /// `[L : Q] = 2n`.
    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    pub fn generators(&self) -> &[GaloisElement] {
        &self.generators
    }

    pub fn conjugation(&self) -> &GaloisElement {
        &self.conjugation
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Conductor of the coefficient field Q(zeta_M) holding all algebra coefficients.
    pub fn working_conductor(&self) -> u64 {
        self.working_conductor
    }

    pub fn identity(&self) -> GaloisElement {
        GaloisElement {
            perm: Permutation::identity(self.labels.len()),
            coeff_unit: self.conjugation.coeff_unit.map(|_| 1),
            working_conductor: self.working_conductor,
        }
    }

    /// The automorphism `sigma_a` of a cyclotomic field.
    pub fn sigma(&self, a: u64) -> Result<GaloisElement> {
        let Flavor::Cyclotomic { conductor: m } = self.flavor else {
            return usage("sigma_a is only defined for cyclotomic fields");
        };
        if a.gcd(&m) != 1 {
            return usage(format!("{a} is not a unit modulo {m}"));
        }
        Ok(GaloisElement {
            perm: Permutation(
                self.labels
                    .iter()
                    .map(|&l| self.position[&(l * a % m)])
                    .collect(),
            ),
            coeff_unit: Some(lift_unit(a, m)),
            working_conductor: self.working_conductor,
        })
    }

    fn orbit(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.labels.len()];
        seen[start] = true;
        let mut out = vec![start];
        let mut k = 0;
        while k < out.len() {
            let x = out[k];
            for g in &self.generators {
                let y = g.apply(x);
                if !std::mem::replace(&mut seen[y], true) {
                    out.push(y);
                }
            }
            k += 1;
        }
        out
    }

    /// All group elements by breadth-first closure from the identity.
    pub fn elements(&self) -> Result<Vec<GaloisElement>> {
        self.elements_capped(GROUP_ENUMERATION_CAP)
            .map_err(|_| Error::GroupTooLarge(GROUP_ENUMERATION_CAP))
    }

    /// Like [`elements`](Self::elements), but on overflow returns the partial list in `Err`.
    pub fn elements_capped(&self, cap: usize) -> std::result::Result<Vec<GaloisElement>, Vec<GaloisElement>> {
        let id = self.identity();
        let mut seen = std::collections::HashSet::from([id.perm.clone()]);
        let mut out = vec![id];
        let mut k = 0;
        while k < out.len() {
            for g in &self.generators {
                let h = g.compose(&out[k]);
                if seen.insert(h.perm.clone()) {
                    if out.len() == cap {
                        return Err(out);
                    }
                    out.push(h);
                }
            }
            k += 1;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_is_cyclic_generated_by_three() {
        let f = build_cyclotomic_cm(7).unwrap();
        assert_eq!(f.labels(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(f.generators().len(), 1);
        assert_eq!(f.generators()[0], f.sigma(3).unwrap());
        // 3 is a primitive root mod 7: its powers enumerate every unit.
        let mut x = 1u64;
        let mut powers = vec![];
        for _ in 0..6 {
            powers.push(x);
            x = x * 3 % 7;
        }
        powers.sort_unstable();
        assert_eq!(powers, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(f.elements().unwrap().len(), 6);
        let c = f.conjugation();
        for (a, b) in [(1, 6), (2, 5), (3, 4)] {
            assert_eq!(f.label(c.apply(f.position(a).unwrap())), b);
        }
        assert_eq!(f.working_conductor(), 28);
        assert_eq!(c.coeff_unit(), Some(13)); // 13 = -1 mod 7, 1 mod 4
    }

    #[test]
    fn small_and_degenerate_conductors() {
        let f = build_cyclotomic_cm(4).unwrap();
        assert_eq!(f.degree(), 2);
        assert!(matches!(build_cyclotomic_cm(2), Err(Error::NotCmField(_))));
        assert!(matches!(build_cyclotomic_cm(1), Err(Error::NotCmField(_))));
        assert!(matches!(build_cyclotomic_cm(6), Err(Error::Usage(_))));
        let f12 = build_cyclotomic_cm(12).unwrap();
        assert_eq!(f12.generators().len(), 2);
        assert_eq!(f12.elements().unwrap().len(), 4);
    }

    #[test]
    fn abstract_cyclic_six() {
        let labels = [1, 2, 3, 4, 5, 6];
        let cycle = vec![2, 3, 4, 5, 6, 1];
        let conj = [4, 5, 6, 1, 2, 3];
        let f = build_abstract_cm(&labels, std::slice::from_ref(&cycle), &conj).unwrap();
        let g = &f.generators()[0];
        assert_eq!(g.compose(g).compose(g), *f.conjugation());
        assert_eq!(f.elements().unwrap().len(), 6);

        let bad_conj = [2, 1, 4, 3, 6, 5];
        assert_eq!(
            build_abstract_cm(&labels, &[cycle], &bad_conj),
            Err(Error::ConjugationNotCentral(0))
        );
        assert_eq!(
            build_abstract_cm(&labels, &[labels.to_vec()], &conj),
            Err(Error::NotTransitive)
        );
        assert_eq!(
            build_abstract_cm(&labels, &[labels.to_vec()], &labels),
            Err(Error::BadConjugation)
        );
    }

    #[test]
    fn lifts_are_homomorphic() {
        let f = build_cyclotomic_cm(9).unwrap();
        for a in f.labels() {
            for b in f.labels() {
                let lhs = f.sigma(*a).unwrap().compose(&f.sigma(*b).unwrap());
                assert_eq!(lhs, f.sigma(a * b % 9).unwrap());
            }
        }
    }
}
