use serde::{Deserialize, Serialize};

use super::galois::{build_abstract_cm, build_cyclotomic_cm, Flavor, GaloisCMData};
use crate::error::Result;

/// Field description as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "lowercase")]
pub enum FieldSpec {
    Cyclotomic {
        conductor: u64,
    },
    Abstract {
        labels: Vec<u64>,
        generators: Vec<Vec<u64>>,
        conjugation: Vec<u64>,
    },
}

impl FieldSpec {
    pub fn build(&self) -> Result<GaloisCMData> {
        match self {
            FieldSpec::Cyclotomic { conductor } => build_cyclotomic_cm(*conductor),
            FieldSpec::Abstract {
                labels,
                generators,
                conjugation,
            } => build_abstract_cm(labels, generators, conjugation),
        }
    }
}

impl GaloisCMData {
    pub fn spec(&self) -> FieldSpec {
        match self.flavor() {
            Flavor::Cyclotomic { conductor } => FieldSpec::Cyclotomic { conductor },
            Flavor::Abstract => {
                let images = |p: &super::Permutation| -> Vec<u64> {
                    (0..self.degree()).map(|i| self.label(p.apply(i))).collect()
                };
                FieldSpec::Abstract {
                    labels: self.labels().to_vec(),
                    generators: self.generators().iter().map(|g| images(g.perm())).collect(),
                    conjugation: images(self.conjugation().perm()),
                }
            }
        }
    }
}
