//! K-valued functions of the loop variable `q`.

mod kvector;
mod laurent;
mod rational;

pub use kvector::{invert_scalar_matrix, KVector, TargetBasis};
pub use laurent::{d_operator, LaurentQ};
pub use rational::{
    jet_at_root, laurent_part, residue_form, subst_inverse_power, t2_new_transform, total_residue, JetAtRoot,
    RationalQ, ResiduePoint,
};
