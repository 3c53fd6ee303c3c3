//! Isotropy lattices of tangent- and cotangent-lifted actions of SO(3), its
//! finite subgroups and the circle.

pub mod adjoint;
pub mod cli;
pub mod io;
pub mod lattice;
pub mod lift;
pub mod momentum;
pub mod oracle;
pub mod rotation;
pub mod subgroup;
pub mod tag;

pub use lattice::{build_lattice, IsotropyLattice};
pub use lift::{cotangent_lifted_lattice, lifted_lattice, AmbientGroup, LiftResult};
pub use momentum::{mu_lattice, relative_equilibria_lattice, zero_level_lattice, MomentumValue};
pub use rotation::{FiniteRotationGroup, Rotation};
pub use subgroup::{canonical_rep, g_class_of, intersect, ConcreteSubgroup};
pub use tag::{is_subconjugate, ClassTag};
