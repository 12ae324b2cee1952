//! Oriented CM fields: embeddings, Galois action, conjugation and orientation.

mod galois;
mod grading;
mod orientation;
mod spec;

pub use galois::{
    build_abstract_cm, build_cyclotomic_cm, working_conductor, Flavor, GaloisCMData,
    GaloisElement, Permutation, GROUP_ENUMERATION_CAP,
};
pub use spec::FieldSpec;
pub use grading::{galois_act_grading, grading_vector, GradingVector};
pub use orientation::{
    enumerate_orientations, validate_orientation, Orientation, OrientedCMField, PairIndex,
};
