//! Artinian divided-power algebras: γ operations, divided-power ideal
//! powers, γ_p-nilpotence, the I^[2] descent chain and the γ_p normal form.

pub mod algebra;
pub mod ideals;

pub use algebra::{BaseSpec, Elem, PdAlgebra, PdDescriptor};
pub use ideals::{
    gamma_p_image, gamma_p_nilpotence, gamma_p_nilpotence_on, gamma_p_normal_form, pd_power, pd_square_chain, pd_unit_coefficient,
    GammaNormalForm, NilpotenceReport, UnitShape,
};
