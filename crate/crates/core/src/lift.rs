//! Isotropy lattice of the tangent (equivalently cotangent) lifted action,
//! computed from the isotropy lattice of the base action.
//!
//! A class `(L)` occurs in `I(G, TM)` exactly when `L = H₁ ∩ K` for classes
//! `(H₁) ≤ (H₂)` of `I(G, M)` and a class `(K)` of stabilizers of the
//! `H₂`-action on `ann h₂`. Tangent vectors over a point with stabilizer `H₂`
//! split into an orbit part in `g/h₂` and a slice part, and the slice
//! stabilizers are the `H₂`-conjugates of subgroups `H₁ ⊆ H₂` from lower
//! strata.
//!
//! Positions matter: `H₁ ∩ K` depends on how `H₁` sits relative to `K`. The
//! set of embeddings of `(H₁)` into `H₂` and the set of stabilizers in
//! `ann h₂` are both closed under `H₂`-conjugation, and
//! `h (H₁ ∩ K) h⁻¹` has the class of `h⁻¹H₁h ∩ K`. So it is enough to fix one
//! representative of each `K`-class and run over every embedding of `H₁`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::adjoint::{isotropy_on_ann, AnnClass, AnnIsotropy};
use crate::io::subgroup_json;
use crate::lattice::{build_lattice, compute_depths, IsotropyLattice, LatticeError};
use crate::rotation::FiniteRotationGroup;
use crate::subgroup::{
    canonical_rep, classify_finite, embeddings_of_class_in, g_class_of, intersect, CatalogError, ConcreteSubgroup,
};
use crate::tag::{is_subconjugate, ClassTag};

/// The acting group `G`.
#[derive(Clone, Debug)]
pub enum AmbientGroup {
    So3,
    Finite(FiniteRotationGroup),
    /// The circle group, realized as the rotations about `z`.
    Circle,
}

impl AmbientGroup {
    /// Class of `G` itself as a subgroup of SO(3).
    pub fn class(&self) -> Result<ClassTag, CatalogError> {
        match self {
            AmbientGroup::So3 => Ok(ClassTag::Full),
            AmbientGroup::Finite(g) => classify_finite(g),
            AmbientGroup::Circle => Ok(ClassTag::Circle),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AmbientGroup::So3 => "SO(3)".to_string(),
            AmbientGroup::Circle => "SO(2)".to_string(),
            AmbientGroup::Finite(g) => classify_finite(g).map_or_else(|_| "finite".to_string(), |t| t.to_string()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("class {class} is not a subgroup class of {group}")]
    NotRealizableInG { class: ClassTag, group: ClassTag },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// One way a lifted class arises: `class = (H₁-embedding ∩ K)`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub class: ClassTag,
    pub h1: ClassTag,
    pub h2: ClassTag,
    pub k: ClassTag,
    pub h2_rep: ConcreteSubgroup,
    pub h1_embedding: ConcreteSubgroup,
    pub k_rep: ConcreteSubgroup,
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub ambient: AmbientGroup,
    pub base: IsotropyLattice,
    pub lifted: IsotropyLattice,
    /// One witness per lifted class, in class order.
    pub witnesses: Vec<Witness>,
}

/// Rejects base classes that are not subgroup classes of `G`.
pub fn check_realizable(ambient: &AmbientGroup, base: &IsotropyLattice) -> Result<ClassTag, LiftError> {
    let group = ambient.class()?;
    for &class in base.classes() {
        if !is_subconjugate(class, group) {
            return Err(LiftError::NotRealizableInG { class, group });
        }
    }
    Ok(group)
}

/// Stabilizer classes of `H` on `ann h` for the given ambient group. Finite
/// groups have `g = 0`, and the circle acts trivially on its Lie algebra, so
/// in both cases the only class is `H` itself.
pub fn ann_isotropy_in(ambient: &AmbientGroup, h: &ConcreteSubgroup) -> AnnIsotropy {
    match ambient {
        AmbientGroup::So3 => isotropy_on_ann(h),
        AmbientGroup::Finite(_) | AmbientGroup::Circle => AnnIsotropy {
            classes: vec![AnnClass {
                class: g_class_of(h).expect("representatives classify"),
                representative: h.clone(),
            }],
        },
    }
}

fn identity_witness(t: ClassTag) -> Witness {
    let rep = canonical_rep(t);
    Witness { class: t, h1: t, h2: t, k: t, h2_rep: rep.clone(), h1_embedding: rep.clone(), k_rep: rep }
}

/// `I(G, TM)` from `I(G, M)`.
pub fn lifted_lattice(ambient: &AmbientGroup, base: &IsotropyLattice) -> Result<LiftResult, LiftError> {
    check_realizable(ambient, base)?;
    let mut found: BTreeMap<ClassTag, Witness> = BTreeMap::new();
    match ambient {
        // g = 0 for finite G; the circle is Abelian. Either way L = H₁.
        AmbientGroup::Finite(_) | AmbientGroup::Circle => {
            for &t in base.classes() {
                found.insert(t, identity_witness(t));
            }
        }
        AmbientGroup::So3 => {
            let depths = compute_depths(base);
            let mut order: Vec<ClassTag> = base.classes().to_vec();
            order.sort_by_key(|t| (depths[t], *t));
            for h2 in order {
                let h2_rep = canonical_rep(h2);
                if h2 == ClassTag::Full {
                    // ann h = 0, so K = G and L = H₁
                    for &h1 in base.classes() {
                        let embedding = canonical_rep(h1);
                        found.entry(h1).or_insert_with(|| Witness {
                            class: h1,
                            h1,
                            h2,
                            k: ClassTag::Full,
                            h2_rep: h2_rep.clone(),
                            h1_embedding: embedding,
                            k_rep: ConcreteSubgroup::Full,
                        });
                    }
                    continue;
                }
                let ann = isotropy_on_ann(&h2_rep);
                for &h1 in base.classes().iter().filter(|&&h1| is_subconjugate(h1, h2)) {
                    for embedding in embeddings_of_class_in(h1, &h2_rep)?.into_vec() {
                        for k in &ann.classes {
                            let class = g_class_of(&intersect(&embedding, &k.representative))?;
                            found.entry(class).or_insert_with(|| Witness {
                                class,
                                h1,
                                h2,
                                k: k.class,
                                h2_rep: h2_rep.clone(),
                                h1_embedding: embedding.clone(),
                                k_rep: k.representative.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    let lifted = build_lattice(found.keys().copied())?;
    Ok(LiftResult { ambient: ambient.clone(), base: base.clone(), lifted, witnesses: found.into_values().collect() })
}

/// `I(G, T*M)`; identical to the tangent lift through the metric isomorphism
/// `TM ≅ T*M`.
pub fn cotangent_lifted_lattice(ambient: &AmbientGroup, base: &IsotropyLattice) -> Result<LiftResult, LiftError> {
    lifted_lattice(ambient, base)
}

/// Re-validates every witness of a lift result.
pub fn lift_witness_check(result: &LiftResult) -> bool {
    let classes = result.lifted.classes();
    result.witnesses.len() == classes.len()
        && result.witnesses.iter().zip(classes).all(|(w, &c)| w.class == c && witness_holds(&result.ambient, &result.base, w))
}

fn witness_holds(ambient: &AmbientGroup, base: &IsotropyLattice, w: &Witness) -> bool {
    let classifies_as = |s: &ConcreteSubgroup, t: ClassTag| g_class_of(s).ok() == Some(t);
    base.contains(w.h1)
        && base.contains(w.h2)
        && is_subconjugate(w.h1, w.h2)
        && classifies_as(&w.h2_rep, w.h2)
        && classifies_as(&w.h1_embedding, w.h1)
        && w.h1_embedding.is_subgroup_of(&w.h2_rep)
        && classifies_as(&w.k_rep, w.k)
        && ann_isotropy_in(ambient, &w.h2_rep).has_representative(&w.k_rep)
        && classifies_as(&intersect(&w.h1_embedding, &w.k_rep), w.class)
}

#[derive(Serialize)]
struct WitnessJson {
    class: ClassTag,
    h1: ClassTag,
    h2: ClassTag,
    k: ClassTag,
    h1_embedding: serde_json::Value,
    k_representative: serde_json::Value,
}

impl Witness {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(WitnessJson {
            class: self.class,
            h1: self.h1,
            h2: self.h2,
            k: self.k,
            h1_embedding: subgroup_json(&self.h1_embedding),
            k_representative: subgroup_json(&self.k_rep),
        })
        .expect("serializes")
    }
}
