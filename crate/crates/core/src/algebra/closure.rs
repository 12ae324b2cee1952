use std::collections::VecDeque;

use super::AlgebraElement;
use crate::arith::linalg::EchelonBasis;
use crate::arith::CyclotomicNumber;
use crate::error::{usage, Result};

/// The Lie subalgebra generated by a set of elements.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub dimension: usize,
    /// Linearly independent elements spanning the subalgebra, in discovery order.
    pub basis: Vec<AlgebraElement>,
}

/// Breadth-first bracket closure. Every new element is bracketed against the basis found
/// so far; the search stops early once the full dimension `n(2n+1)` is reached.
pub fn generated_subalgebra(seeds: &[AlgebraElement]) -> Result<Subalgebra> {
    let Some(first) = seeds.first() else {
        return usage("closure needs at least one seed element");
    };
    let alg = first.algebra().clone();
    let full = alg.dimension();
    let mut echelon: EchelonBasis<CyclotomicNumber> = EchelonBasis::new(full);
    let mut basis: Vec<AlgebraElement> = Vec::new();
    let mut queue = VecDeque::new();

    for s in seeds {
        if !s.algebra().same_as(&alg) {
            return usage("seed elements belong to different algebras");
        }
        if echelon.insert(&s.coordinates()) {
            basis.push(s.clone());
            queue.push_back(basis.len() - 1);
        }
    }
    while let Some(k) = queue.pop_front() {
        if echelon.rank() == full {
            break;
        }
        let x = basis[k].clone();
        for t in 0..basis.len() {
            if echelon.rank() == full {
                break;
            }
            let b = x.bracket(&basis[t])?;
            if !b.is_zero() && echelon.insert(&b.coordinates()) {
                basis.push(b);
                queue.push_back(basis.len() - 1);
            }
        }
    }
    Ok(Subalgebra {
        dimension: echelon.rank(),
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HodgeAlgebra;
    use crate::cm::{build_cyclotomic_cm, validate_orientation, Orientation};
    use std::sync::Arc;

    fn alg7() -> Arc<HodgeAlgebra> {
        let g = build_cyclotomic_cm(7).unwrap();
        HodgeAlgebra::new(
            validate_orientation(&g, &Orientation::from_classes(3, &[&[1], &[2, 3], &[4, 5], &[6]]))
                .unwrap(),
        )
    }

    fn x(alg: &Arc<HodgeAlgebra>, i: i32, j: i32) -> AlgebraElement {
        AlgebraElement::root_vector(alg, i, j).unwrap()
    }

    #[test]
    fn small_closures() {
        let alg = alg7();
        assert_eq!(generated_subalgebra(&[x(&alg, 1, 1)]).unwrap().dimension, 1);
        // sl2 spanned by X_{1,2}, X_{2,1} and their bracket
        let sub = generated_subalgebra(&[x(&alg, 1, 2), x(&alg, 2, 1)]).unwrap();
        assert_eq!(sub.dimension, 3);
        assert!(generated_subalgebra(&[]).is_err());
    }

    #[test]
    fn simple_root_vectors_generate_everything() {
        let alg = alg7();
        let seeds: Vec<_> = [(1, 2), (2, 3), (3, -3), (2, 1), (3, 2), (-3, 3)]
            .iter()
            .map(|&(i, j)| x(&alg, i, j))
            .collect();
        assert_eq!(generated_subalgebra(&seeds).unwrap().dimension, 21);
    }

    #[test]
    fn closure_is_idempotent() {
        let alg = alg7();
        let sub = generated_subalgebra(&[x(&alg, 1, 2), x(&alg, 2, 3), x(&alg, 3, 1)]).unwrap();
        let again = generated_subalgebra(&sub.basis).unwrap();
        assert_eq!(sub.dimension, again.dimension);
        assert_eq!(sub.dimension, 8); // sl_3 on w_1, w_2, w_3
    }
}
