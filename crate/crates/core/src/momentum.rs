//! Lattices attached to the momentum map of a cotangent-lifted action: level
//! sets at totally isotropic values, μ-closures, and the possible relative
//! equilibria of simple mechanical systems.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::adjoint::isotropy_on_ann;
use crate::lattice::{build_lattice, build_poset, up_set, IsotropyLattice, LatticeError};
use crate::lift::{check_realizable, AmbientGroup, LiftError};
use crate::rotation::{norm, tolerance, Vec3};
use crate::subgroup::canonical_rep;
use crate::tag::ClassTag;

/// A momentum value in `g*`: a vector for SO(3), a scalar for the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentumValue {
    Vector(Vec3),
    Scalar(f64),
}

impl MomentumValue {
    pub fn is_zero(&self) -> bool {
        match self {
            MomentumValue::Vector(v) => norm(*v) <= tolerance(),
            MomentumValue::Scalar(s) => s.abs() <= tolerance(),
        }
    }
}

impl fmt::Display for MomentumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentumValue::Vector([x, y, z]) => write!(f, "({x}, {y}, {z})"),
            MomentumValue::Scalar(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentumError {
    #[error("momentum value {mu} is not totally isotropic for {group}")]
    NotTotallyIsotropic { mu: String, group: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// `G_μ = G` under the coadjoint action.
pub fn is_totally_isotropic(ambient: &AmbientGroup, mu: &MomentumValue) -> bool {
    match ambient {
        // coadjoint orbits of SO(3) are spheres about the origin
        AmbientGroup::So3 => mu.is_zero(),
        AmbientGroup::Circle => true,
        // g* = 0
        AmbientGroup::Finite(_) => mu.is_zero(),
    }
}

/// `I(G, J⁻¹(0)) = I(G, M)`.
pub fn zero_level_lattice(_ambient: &AmbientGroup, base: &IsotropyLattice) -> IsotropyLattice {
    base.clone()
}

/// The μ-lattice `{(H) ∈ I(G,M) : μ ∈ ann h}`. It is a sub-poset and may have
/// several minimal classes, or none at all.
#[derive(Clone, Debug, PartialEq)]
pub struct MuLattice {
    pub restricted: Option<IsotropyLattice>,
}

impl MuLattice {
    pub fn classes(&self) -> &[ClassTag] {
        self.restricted.as_ref().map_or(&[], |l| l.classes())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match &self.restricted {
            Some(l) => l.to_json_value(),
            None => serde_json::json!({"classes": [], "hasse": []}),
        }
    }
}

/// `μ ∈ ann h` for a class of the ambient group.
fn annihilates(ambient: &AmbientGroup, mu: &MomentumValue, class: ClassTag) -> bool {
    if mu.is_zero() {
        return true;
    }
    match ambient {
        // only the circle has non-zero totally isotropic values; ann h = g* for
        // finite h and 0 for h = g
        AmbientGroup::Circle => class.lie_algebra_dim() == 0,
        AmbientGroup::So3 | AmbientGroup::Finite(_) => false,
    }
}

pub fn mu_lattice(ambient: &AmbientGroup, base: &IsotropyLattice, mu: &MomentumValue) -> Result<MuLattice, MomentumError> {
    if !is_totally_isotropic(ambient, mu) {
        return Err(MomentumError::NotTotallyIsotropic { mu: mu.to_string(), group: ambient.name() });
    }
    let kept: Vec<ClassTag> = base.classes().iter().copied().filter(|&c| annihilates(ambient, mu, c)).collect();
    let restricted = if kept.is_empty() { None } else { Some(build_poset(kept)?) };
    Ok(MuLattice { restricted })
}

/// Class-level μ-closure of the stratum of `h`: the up-set of `h` in the
/// μ-lattice.
pub fn mu_closure(
    ambient: &AmbientGroup,
    base: &IsotropyLattice,
    mu: &MomentumValue,
    h: ClassTag,
) -> Result<BTreeSet<ClassTag>, MomentumError> {
    let restricted = mu_lattice(ambient, base, mu)?;
    match &restricted.restricted {
        Some(l) => Ok(up_set(l, h)?),
        None => Err(LatticeError::ClassNotInLattice(h).into()),
    }
}

/// Isotropy lattice of the possible relative equilibria
/// `{ξ_M(x)} ⊂ TM`: the union over `(H)` of the G-classes of `I(H, ann h)`.
pub fn relative_equilibria_lattice(ambient: &AmbientGroup, base: &IsotropyLattice) -> Result<IsotropyLattice, MomentumError> {
    check_realizable(ambient, base)?;
    match ambient {
        AmbientGroup::Finite(_) | AmbientGroup::Circle => Ok(base.clone()),
        AmbientGroup::So3 => {
            let classes: BTreeSet<ClassTag> = base
                .classes()
                .iter()
                .flat_map(|&h| isotropy_on_ann(&canonical_rep(h)).tags())
                .collect();
            Ok(build_lattice(classes)?)
        }
    }
}
