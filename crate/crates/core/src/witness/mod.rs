//! Witness predicates for list decoding and list recovery, brute-force
//! certifiers for explicit codes, and profile containment.

pub mod certify;
pub mod cluster;
pub mod containment;

pub use certify::{certify_list_recoverable, check_violation, Certificate, Strategy, Violation};
pub use cluster::{
    hamming_distance, is_avg_clustered, is_avg_recovery_clustered, is_clustered, is_recovery_clustered, violates,
    weight, AverageVerdict, WordSet,
};
pub use containment::{code_contains_profile, matrix_of, profile_solution_space};
