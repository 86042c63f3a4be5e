//! Kähler differentials, de Rham complexes with Hodge filtration, divided
//! power de Rham complexes with the PD-adic filtration, and the checks of the
//! Künneth splitting and the filtered Poincaré lemma.

pub mod complex;
pub mod forms;
pub mod kaehler;

pub use complex::{torus_cohomology, torus_cohomology_window, DeRhamComplex, Filtration, WeightReport};
pub use forms::{wedge_sign, Form};
pub use kaehler::{kaehler, kunneth_check, KaehlerPresentation, KunnethWitness, ModuleMap, PresentedModule, QuotientRing};
pub mod pd;
pub use pd::{adic_power, pd_adic_power, poincare_pd_check, PdDeRham, PoincareVerdict};
