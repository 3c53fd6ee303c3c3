//! The annihilator `ann h ⊂ g*` of a subgroup's Lie algebra and the stabilizer
//! classes of the restricted coadjoint action on it.
//!
//! For SO(3) the adjoint action on `g ≅ R³` is the standard rotation action,
//! and `g* ≅ g` through the Euclidean inner product. Both identifications are
//! equivariant, so `I(H, g/h) = I(H, ann h)` can be computed on vectors of R³.

use serde::Serialize;

use crate::rotation::{apply, canonical_axis, lex_cmp, same_line, Vec3};
use crate::subgroup::{g_class_of, half_turn, in_plane_direction, rotation_axes, ConcreteSubgroup};
use crate::tag::ClassTag;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubspaceDescriptor {
    Zero,
    /// The plane perpendicular to a unit axis.
    Plane(Vec3),
    Full3,
}

pub fn ann_h(h: &ConcreteSubgroup) -> SubspaceDescriptor {
    match h {
        ConcreteSubgroup::Finite(_) => SubspaceDescriptor::Full3,
        ConcreteSubgroup::Circle { axis } | ConcreteSubgroup::OrthCircle { axis, .. } => {
            SubspaceDescriptor::Plane(*axis)
        }
        ConcreteSubgroup::Full => SubspaceDescriptor::Zero,
    }
}

/// One `H`-conjugacy class of stabilizers, with its class in SO(3).
#[derive(Clone, Debug)]
pub struct AnnClass {
    pub class: ClassTag,
    pub representative: ConcreteSubgroup,
}

#[derive(Clone, Debug)]
pub struct AnnIsotropy {
    pub classes: Vec<AnnClass>,
}

impl AnnIsotropy {
    pub fn tags(&self) -> Vec<ClassTag> {
        let mut tags: Vec<ClassTag> = self.classes.iter().map(|c| c.class).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// True when `k` is (as a positioned subgroup) one of the representatives.
    pub fn has_representative(&self, k: &ConcreteSubgroup) -> bool {
        self.classes.iter().any(|c| c.representative.same_subgroup(k))
    }
}

fn entry(representative: ConcreteSubgroup) -> AnnClass {
    let class = g_class_of(&representative).expect("stabilizers of catalog groups classify");
    AnnClass { class, representative }
}

/// Stabilizer classes of the `H`-action on `ann h`.
///
/// Finite `H` acts on all of R³: the origin is fixed by `H`, a vector on a
/// rotation axis by the cyclic group of all elements about that axis (one
/// entry per `H`-orbit of axes), and a generic vector only by the identity.
/// Orbits of same-order axes are kept apart even when they share a class.
pub fn isotropy_on_ann(h: &ConcreteSubgroup) -> AnnIsotropy {
    let classes = match h {
        ConcreteSubgroup::Finite(group) => {
            let mut out: Vec<AnnClass> = Vec::new();
            if group.order() > 1 {
                out.push(entry(ConcreteSubgroup::trivial()));
            }
            for axis in axis_orbit_representatives(h) {
                let stabilizer = group.filter(|r| {
                    crate::rotation::axis_angle_of(r)
                        .axis_angle()
                        .is_none_or(|aa| same_line(aa.axis, axis))
                });
                out.push(entry(ConcreteSubgroup::Finite(stabilizer)));
            }
            out.push(entry(h.clone()));
            let mut unique: Vec<AnnClass> = Vec::new();
            for c in out {
                if !unique.iter().any(|u| u.representative.same_subgroup(&c.representative)) {
                    unique.push(c);
                }
            }
            unique
        }
        ConcreteSubgroup::Circle { .. } => vec![entry(ConcreteSubgroup::trivial()), entry(h.clone())],
        ConcreteSubgroup::OrthCircle { axis, flip_phase } => vec![
            // a non-zero vector of the plane is fixed exactly by the half-turn about itself
            entry(ConcreteSubgroup::Finite(half_turn(in_plane_direction(*axis, *flip_phase)))),
            entry(h.clone()),
        ],
        ConcreteSubgroup::Full => vec![entry(ConcreteSubgroup::Full)],
    };
    AnnIsotropy { classes }
}

/// One canonical axis per `H`-orbit of rotation axes of a finite `H`, the
/// lexicographically largest of its orbit; orbits listed by decreasing axial
/// order, then by representative.
pub fn axis_orbit_representatives(h: &ConcreteSubgroup) -> Vec<Vec3> {
    let Some(group) = h.as_finite() else { return Vec::new() };
    let axes = rotation_axes(group);
    let mut assigned = vec![false; axes.len()];
    let mut reps: Vec<(u32, Vec3)> = Vec::new();
    for i in 0..axes.len() {
        if assigned[i] {
            continue;
        }
        let mut best = axes[i].axis;
        for r in group.elements() {
            let image = canonical_axis(apply(r, axes[i].axis)).expect("unit axis");
            if let Some(j) = axes.iter().position(|a| same_line(a.axis, image)) {
                assigned[j] = true;
                if lex_cmp(axes[j].axis, best).is_gt() {
                    best = axes[j].axis;
                }
            }
        }
        reps.push((axes[i].order, best));
    }
    reps.sort_by(|a, b| b.0.cmp(&a.0).then(lex_cmp(b.1, a.1)));
    reps.into_iter().map(|(_, a)| a).collect()
}

#[derive(Serialize)]
struct AnnClassJson {
    class: ClassTag,
    representative: serde_json::Value,
}

/// Diagnostic JSON: a list of `{class, representative}` records.
pub fn ann_isotropy_json(iso: &AnnIsotropy) -> serde_json::Value {
    serde_json::to_value(
        iso.classes
            .iter()
            .map(|c| AnnClassJson { class: c.class, representative: crate::io::subgroup_json(&c.representative) })
            .collect::<Vec<_>>(),
    )
    .expect("serializes")
}
