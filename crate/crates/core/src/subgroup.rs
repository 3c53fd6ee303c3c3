//! Positioned closed subgroups of SO(3): classification into [`ClassTag`]s,
//! canonical representatives, subgroup enumeration, intersections and the
//! embeddings of a class inside a given subgroup.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::PI;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::rotation::{
    apply, axis_angle_of, canonical_axis, close_group, cross, dot, lex_cmp, perpendicular_basis, same_line,
    tolerance, FiniteRotationGroup, Rotation, RotationError, RotationOrder, Vec3, DEFAULT_GROUP_CAP,
};
use crate::tag::{is_subconjugate, ClassTag};

const X: Vec3 = [1.0, 0.0, 0.0];
const Z: Vec3 = [0.0, 0.0, 1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("finite rotation group of order {order} matches no catalog family")]
    UnclassifiableGroup { order: usize },
    #[error("class {class} is not subconjugate to {target}")]
    NotSubconjugate { class: ClassTag, target: ClassTag },
    #[error(transparent)]
    Rotation(#[from] RotationError),
}

/// A closed subgroup of SO(3) in a definite position.
#[derive(Clone, Debug)]
pub enum ConcreteSubgroup {
    Finite(FiniteRotationGroup),
    /// SO(2) of rotations about `axis`.
    Circle { axis: Vec3 },
    /// O(2) about `axis`. Every axis perpendicular to `axis` is a flip axis;
    /// `flip_phase` marks one of them, measured from the first vector of
    /// [`perpendicular_basis`]. The marker does not change the element set.
    OrthCircle { axis: Vec3, flip_phase: f64 },
    Full,
}

/// A rotation axis of a finite group and the order of the cyclic subgroup of
/// all elements about it.
#[derive(Clone, Copy, Debug)]
pub struct RotationAxis {
    pub axis: Vec3,
    pub order: u32,
}

/// Distinct rotation axes of `group`, in order of first appearance.
pub fn rotation_axes(group: &FiniteRotationGroup) -> Vec<RotationAxis> {
    let mut axes: Vec<RotationAxis> = Vec::new();
    for r in group.elements() {
        let Some(aa) = axis_angle_of(r).axis_angle() else { continue };
        match axes.iter_mut().find(|a| same_line(a.axis, aa.axis)) {
            Some(a) => a.order += 1,
            None => axes.push(RotationAxis { axis: aa.axis, order: 2 }),
        }
    }
    axes
}

fn perpendicular(a: Vec3, b: Vec3) -> bool {
    dot(a, b).abs() <= tolerance() * 10.0
}

fn lex_largest(axes: impl IntoIterator<Item = Vec3>) -> Option<Vec3> {
    axes.into_iter().max_by(|a, b| lex_cmp(*a, *b))
}

/// Classification of a finite rotation group by its axis profile.
pub fn classify_finite(group: &FiniteRotationGroup) -> Result<ClassTag, CatalogError> {
    let order = group.order();
    if order == 1 {
        return Ok(ClassTag::Trivial);
    }
    let axes = rotation_axes(group);
    let count = |k: u32| axes.iter().filter(|a| a.order == k).count();
    let unclassifiable = Err(CatalogError::UnclassifiableGroup { order });
    if axes.len() == 1 {
        return if axes[0].order as usize == order { Ok(ClassTag::Cyclic(order as u32)) } else { unclassifiable };
    }
    if order % 2 == 0 {
        let n = (order / 2) as u32;
        if n == 2 {
            let mutually_perpendicular = axes.len() == 3
                && axes.iter().all(|a| a.order == 2)
                && (0..3).all(|i| (0..i).all(|j| perpendicular(axes[i].axis, axes[j].axis)));
            if mutually_perpendicular {
                return Ok(ClassTag::Dihedral(2));
            }
        } else if let Some(main) = axes.iter().find(|a| a.order == n) {
            let flips = axes
                .iter()
                .filter(|a| a.order == 2 && perpendicular(a.axis, main.axis))
                .count();
            if flips == n as usize && axes.len() == flips + 1 {
                return Ok(ClassTag::Dihedral(n));
            }
        }
    }
    match order {
        12 if count(3) == 4 && count(2) == 3 => Ok(ClassTag::Tetra),
        24 if count(4) == 3 && count(3) == 4 && count(2) == 6 => Ok(ClassTag::Octa),
        60 if count(5) == 6 && count(3) == 10 && count(2) == 15 => Ok(ClassTag::Icosa),
        _ => unclassifiable,
    }
}

/// Principal axis of a classified finite group: the axis of highest order,
/// ties broken by the lexicographically largest canonical axis. The trivial
/// group reports `z`.
pub fn principal_axis(group: &FiniteRotationGroup) -> Vec3 {
    let axes = rotation_axes(group);
    let Some(top) = axes.iter().map(|a| a.order).max() else { return Z };
    lex_largest(axes.iter().filter(|a| a.order == top).map(|a| a.axis)).unwrap_or(Z)
}

/// Unit direction in the plane perpendicular to `axis` at angle `phase`.
pub fn in_plane_direction(axis: Vec3, phase: f64) -> Vec3 {
    let (e1, e2) = perpendicular_basis(axis);
    let (s, c) = phase.sin_cos();
    [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]
}

/// The cyclic group of order `n` about `axis`.
pub fn cyclic_about(axis: Vec3, n: u32) -> FiniteRotationGroup {
    let step = 2.0 * PI / f64::from(n);
    FiniteRotationGroup::from_elements_unchecked(
        (0..n).map(|k| Rotation::about(axis, step * f64::from(k))).collect(),
    )
}

/// The dihedral group of order `2n` with principal `axis` and one flip about
/// the perpendicular unit vector `flip`.
pub fn dihedral_about(axis: Vec3, flip: Vec3, n: u32) -> FiniteRotationGroup {
    let mut elements: Vec<Rotation> = cyclic_about(axis, n).elements().to_vec();
    for j in 0..n {
        let turn = Rotation::about(axis, PI * f64::from(j) / f64::from(n));
        elements.push(Rotation::about(apply(&turn, flip), PI));
    }
    FiniteRotationGroup::from_elements_unchecked(elements)
}

/// `{1, π about axis}`.
pub fn half_turn(axis: Vec3) -> FiniteRotationGroup {
    cyclic_about(axis, 2)
}

fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Canonical tetrahedral group: order-2 axes along the coordinate axes.
fn tetra_generators() -> [Rotation; 2] {
    [Rotation::about([1.0, 1.0, 1.0], 2.0 * PI / 3.0), Rotation::about(Z, PI)]
}

/// Canonical octahedral group: order-4 axes along the coordinate axes.
fn octa_generators() -> [Rotation; 2] {
    [Rotation::about([1.0, 1.0, 1.0], 2.0 * PI / 3.0), Rotation::about(Z, PI / 2.0)]
}

/// Canonical icosahedral group: the symmetries of the icosahedron with
/// vertices at the cyclic permutations of (0, ±1, ±φ). The coordinate axes
/// are order-2 axes and (φ, 0, 1) is an order-5 axis in the xz-plane.
fn icosa_generators() -> [Rotation; 2] {
    [Rotation::about([golden_ratio(), 0.0, 1.0], 2.0 * PI / 5.0), Rotation::about(Z, PI)]
}

fn cached_closure(cell: &'static OnceLock<FiniteRotationGroup>, gens: [Rotation; 2]) -> FiniteRotationGroup {
    cell.get_or_init(|| close_group(&gens, DEFAULT_GROUP_CAP).expect("catalog group closes"))
        .clone()
}

/// Canonical positioned representative of a class. Representatives are
/// nested where the classes are: `Cyclic(m) ⊂ Cyclic(n)` and
/// `Dihedral(m) ⊂ Dihedral(n)` for `m | n`, `Tetra ⊂ Octa`, `Tetra ⊂ Icosa`.
pub fn canonical_rep(tag: ClassTag) -> ConcreteSubgroup {
    static TETRA: OnceLock<FiniteRotationGroup> = OnceLock::new();
    static OCTA: OnceLock<FiniteRotationGroup> = OnceLock::new();
    static ICOSA: OnceLock<FiniteRotationGroup> = OnceLock::new();
    match tag {
        ClassTag::Trivial => ConcreteSubgroup::Finite(FiniteRotationGroup::trivial()),
        ClassTag::Cyclic(n) => ConcreteSubgroup::Finite(cyclic_about(Z, n)),
        ClassTag::Dihedral(n) => ConcreteSubgroup::Finite(dihedral_about(Z, X, n)),
        ClassTag::Tetra => ConcreteSubgroup::Finite(cached_closure(&TETRA, tetra_generators())),
        ClassTag::Octa => ConcreteSubgroup::Finite(cached_closure(&OCTA, octa_generators())),
        ClassTag::Icosa => ConcreteSubgroup::Finite(cached_closure(&ICOSA, icosa_generators())),
        ClassTag::Circle => ConcreteSubgroup::Circle { axis: Z },
        ClassTag::OrthCircle => ConcreteSubgroup::OrthCircle { axis: Z, flip_phase: 0.0 },
        ClassTag::Full => ConcreteSubgroup::Full,
    }
}

impl ConcreteSubgroup {
    pub fn circle(axis: Vec3) -> ConcreteSubgroup {
        ConcreteSubgroup::Circle { axis: canonical_axis(axis).expect("non-zero axis") }
    }

    pub fn orth_circle(axis: Vec3, flip_phase: f64) -> ConcreteSubgroup {
        let axis = canonical_axis(axis).expect("non-zero axis");
        ConcreteSubgroup::OrthCircle { axis, flip_phase: flip_phase.rem_euclid(PI) }
    }

    pub fn trivial() -> ConcreteSubgroup {
        ConcreteSubgroup::Finite(FiniteRotationGroup::trivial())
    }

    pub fn as_finite(&self) -> Option<&FiniteRotationGroup> {
        match self {
            ConcreteSubgroup::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// Axis of a continuous subgroup.
    pub fn axis(&self) -> Option<Vec3> {
        match self {
            ConcreteSubgroup::Circle { axis } | ConcreteSubgroup::OrthCircle { axis, .. } => Some(*axis),
            _ => None,
        }
    }

    pub fn contains(&self, r: &Rotation) -> bool {
        match self {
            ConcreteSubgroup::Finite(f) => f.contains(r),
            ConcreteSubgroup::Full => true,
            ConcreteSubgroup::Circle { axis } => match axis_angle_of(r).axis_angle() {
                None => true,
                Some(aa) => same_line(aa.axis, *axis),
            },
            ConcreteSubgroup::OrthCircle { axis, .. } => match axis_angle_of(r).axis_angle() {
                None => true,
                Some(aa) => {
                    same_line(aa.axis, *axis)
                        || (aa.order == RotationOrder::Finite(2) && perpendicular(aa.axis, *axis))
                }
            },
        }
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subgroup_of(&self, other: &ConcreteSubgroup) -> bool {
        use ConcreteSubgroup::*;
        match (self, other) {
            (_, Full) => true,
            (Finite(f), _) => f.elements().iter().all(|r| other.contains(r)),
            (Circle { axis: a }, Circle { axis: b })
            | (Circle { axis: a }, OrthCircle { axis: b, .. })
            | (OrthCircle { axis: a, .. }, OrthCircle { axis: b, .. }) => same_line(*a, *b),
            _ => false,
        }
    }

    /// Element-set equality.
    pub fn same_subgroup(&self, other: &ConcreteSubgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    pub fn conjugate_by(&self, g: &Rotation) -> ConcreteSubgroup {
        match self {
            ConcreteSubgroup::Finite(f) => ConcreteSubgroup::Finite(f.conjugate_by(g)),
            ConcreteSubgroup::Circle { axis } => ConcreteSubgroup::circle(apply(g, *axis)),
            ConcreteSubgroup::OrthCircle { axis, flip_phase } => {
                let new_axis = canonical_axis(apply(g, *axis)).expect("unit axis");
                let flip = apply(g, in_plane_direction(*axis, *flip_phase));
                let (e1, e2) = perpendicular_basis(new_axis);
                ConcreteSubgroup::orth_circle(new_axis, dot(flip, e2).atan2(dot(flip, e1)))
            }
            ConcreteSubgroup::Full => ConcreteSubgroup::Full,
        }
    }

    /// Finite order, if any.
    pub fn order(&self) -> Option<usize> {
        self.as_finite().map(FiniteRotationGroup::order)
    }
}

/// The conjugacy class of a positioned subgroup. Within SO(3) two closed
/// subgroups are conjugate exactly when their tags agree.
pub fn g_class_of(s: &ConcreteSubgroup) -> Result<ClassTag, CatalogError> {
    match s {
        ConcreteSubgroup::Finite(f) => classify_finite(f),
        ConcreteSubgroup::Circle { .. } => Ok(ClassTag::Circle),
        ConcreteSubgroup::OrthCircle { .. } => Ok(ClassTag::OrthCircle),
        ConcreteSubgroup::Full => Ok(ClassTag::Full),
    }
}

fn closure_in_table(table: &[Vec<usize>], gens: &[usize]) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(table.len());
    let mut members = vec![0usize];
    bits.insert(0);
    for &g in gens {
        if !bits.put(g) {
            members.push(g);
        }
    }
    let mut i = 0;
    while i < members.len() {
        let a = members[i];
        for &g in gens {
            let p = table[a][g];
            if !bits.put(p) {
                members.push(p);
            }
        }
        i += 1;
    }
    bits
}

fn subgroup_sort_key(a: &(ClassTag, Vec3, FiniteRotationGroup), b: &(ClassTag, Vec3, FiniteRotationGroup)) -> Ordering {
    a.2.order()
        .cmp(&b.2.order())
        .then(a.0.cmp(&b.0))
        .then(lex_cmp(a.1, b.1))
}

/// All subgroups of `group`, by layered closure: the cyclic subgroups first,
/// then closures of pairwise joins until nothing new appears. Sorted by order,
/// then class, then principal axis.
pub fn subgroups_of(group: &FiniteRotationGroup) -> Vec<FiniteRotationGroup> {
    let table = group.multiplication_table();
    let n = group.order();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut layers: Vec<(FixedBitSet, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let gens = if i == 0 { vec![] } else { vec![i] };
        let bits = closure_in_table(&table, &gens);
        if seen.insert(bits.clone()) {
            layers.push((bits, gens));
        }
    }
    let mut i = 0;
    while i < layers.len() {
        for j in 0..i {
            let (a, b) = (&layers[i].0, &layers[j].0);
            if a.is_subset(b) || b.is_subset(a) {
                continue;
            }
            let mut gens = layers[i].1.clone();
            gens.extend(layers[j].1.iter().copied().filter(|g| !layers[i].0.contains(*g)));
            let bits = closure_in_table(&table, &gens);
            if seen.insert(bits.clone()) {
                layers.push((bits, gens));
            }
        }
        i += 1;
    }
    let mut keyed: Vec<(ClassTag, Vec3, FiniteRotationGroup)> = layers
        .into_iter()
        .map(|(bits, _)| {
            let sub = FiniteRotationGroup::from_elements_unchecked(bits.ones().map(|k| group.elements()[k]).collect());
            let tag = classify_finite(&sub).unwrap_or(ClassTag::Trivial);
            (tag, principal_axis(&sub), sub)
        })
        .collect();
    keyed.sort_by(subgroup_sort_key);
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

/// `A ∩ B` for positioned subgroups.
pub fn intersect(a: &ConcreteSubgroup, b: &ConcreteSubgroup) -> ConcreteSubgroup {
    use ConcreteSubgroup::*;
    match (a, b) {
        (Full, x) | (x, Full) => x.clone(),
        (Finite(f), other) | (other, Finite(f)) => Finite(f.filter(|r| other.contains(r))),
        (Circle { axis: p }, Circle { axis: q }) => {
            if same_line(*p, *q) {
                a.clone()
            } else {
                ConcreteSubgroup::trivial()
            }
        }
        (Circle { axis: p }, OrthCircle { axis: q, .. }) | (OrthCircle { axis: q, .. }, Circle { axis: p }) => {
            if same_line(*p, *q) {
                ConcreteSubgroup::circle(*p)
            } else if perpendicular(*p, *q) {
                Finite(half_turn(*p))
            } else {
                ConcreteSubgroup::trivial()
            }
        }
        (OrthCircle { axis: p, .. }, OrthCircle { axis: q, .. }) => {
            if same_line(*p, *q) {
                a.clone()
            } else if perpendicular(*p, *q) {
                Finite(dihedral_about(*p, *q, 2))
            } else {
                // the common perpendicular is the only shared flip axis
                Finite(half_turn(cross(*p, *q)))
            }
        }
    }
}

/// Result of [`embeddings_of_class_in`].
#[derive(Clone, Debug)]
pub enum Embeddings {
    /// Every relevant position, up to the equivalence documented per case.
    Listed(Vec<ConcreteSubgroup>),
    /// Inside SO(3) only the canonical representative is returned.
    CanonicalOnly(ConcreteSubgroup),
}

impl Embeddings {
    pub fn into_vec(self) -> Vec<ConcreteSubgroup> {
        match self {
            Embeddings::Listed(v) => v,
            Embeddings::CanonicalOnly(s) => vec![s],
        }
    }
}

/// Positioned subgroups of `h2` whose class is `tag`.
///
/// For finite `h2` the list is complete. Inside O(2) the flips and dihedral
/// subgroups form circles of positions; two offsets are listed, one aligned
/// with the marked flip of `h2` and one misaligned (a quarter turn for
/// half-turns, `π/(2m)` for `Dihedral(m)`), which together realize every
/// intersection class with a subgroup containing the marked flip.
pub fn embeddings_of_class_in(tag: ClassTag, h2: &ConcreteSubgroup) -> Result<Embeddings, CatalogError> {
    let target = g_class_of(h2)?;
    if !is_subconjugate(tag, target) {
        return Err(CatalogError::NotSubconjugate { class: tag, target });
    }
    let listed = match h2 {
        ConcreteSubgroup::Full => return Ok(Embeddings::CanonicalOnly(canonical_rep(tag))),
        ConcreteSubgroup::Finite(f) => finite_embeddings(tag, target, f),
        ConcreteSubgroup::Circle { axis } => vec![match tag {
            ClassTag::Trivial => ConcreteSubgroup::trivial(),
            ClassTag::Cyclic(n) => ConcreteSubgroup::Finite(cyclic_about(*axis, n)),
            _ => h2.clone(),
        }],
        ConcreteSubgroup::OrthCircle { axis, flip_phase } => {
            let axis = *axis;
            let phase = *flip_phase;
            match tag {
                ClassTag::Trivial => vec![ConcreteSubgroup::trivial()],
                ClassTag::Cyclic(2) => vec![
                    ConcreteSubgroup::Finite(half_turn(axis)),
                    ConcreteSubgroup::Finite(half_turn(in_plane_direction(axis, phase))),
                    ConcreteSubgroup::Finite(half_turn(in_plane_direction(axis, phase + PI / 4.0))),
                ],
                ClassTag::Cyclic(m) => vec![ConcreteSubgroup::Finite(cyclic_about(axis, m))],
                ClassTag::Dihedral(m) => [0.0, PI / (2.0 * f64::from(m))]
                    .into_iter()
                    .map(|offset| {
                        ConcreteSubgroup::Finite(dihedral_about(axis, in_plane_direction(axis, phase + offset), m))
                    })
                    .collect(),
                ClassTag::Circle => vec![ConcreteSubgroup::circle(axis)],
                _ => vec![h2.clone()],
            }
        }
    };
    Ok(Embeddings::Listed(listed))
}

fn finite_embeddings(tag: ClassTag, target: ClassTag, group: &FiniteRotationGroup) -> Vec<ConcreteSubgroup> {
    if tag == target {
        return vec![ConcreteSubgroup::Finite(group.clone())];
    }
    if tag == ClassTag::Trivial {
        return vec![ConcreteSubgroup::trivial()];
    }
    match target {
        ClassTag::Cyclic(_) | ClassTag::Dihedral(_) => cyclic_dihedral_embeddings(tag, target, group),
        _ => subgroups_of(group)
            .into_iter()
            .filter(|s| classify_finite(s).ok() == Some(tag))
            .map(ConcreteSubgroup::Finite)
            .collect(),
    }
}

/// Direct enumeration of the subgroups of a cyclic or dihedral group with a
/// given class; agrees with filtering [`subgroups_of`].
fn cyclic_dihedral_embeddings(tag: ClassTag, target: ClassTag, group: &FiniteRotationGroup) -> Vec<ConcreteSubgroup> {
    let main = principal_axis(group);
    let mut out = Vec::new();
    match (tag, target) {
        (ClassTag::Cyclic(d), ClassTag::Cyclic(n)) if n % d == 0 => {
            out.push(ConcreteSubgroup::Finite(cyclic_about(main, d)));
        }
        (ClassTag::Cyclic(d), ClassTag::Dihedral(n)) => {
            if n % d == 0 {
                out.push(ConcreteSubgroup::Finite(cyclic_about(main, d)));
            }
            if d == 2 {
                out.extend(flip_axes(group, main).into_iter().map(|f| ConcreteSubgroup::Finite(half_turn(f))));
            }
        }
        (ClassTag::Dihedral(d), ClassTag::Dihedral(n)) if n % d == 0 => {
            let flips = flip_axes(group, main);
            let (e1, _) = perpendicular_basis(main);
            let phase0 = flips.first().map_or(0.0, |f| {
                let (_, e2) = perpendicular_basis(main);
                dot(*f, e2).atan2(dot(*f, e1))
            });
            for j in 0..(n / d) {
                let phase = phase0 + PI * f64::from(j) / f64::from(n);
                out.push(ConcreteSubgroup::Finite(dihedral_about(main, in_plane_direction(main, phase), d)));
            }
        }
        _ => {}
    }
    out
}

/// Canonical axes of the order-2 elements perpendicular to `main`, sorted
/// lexicographically from largest.
fn flip_axes(group: &FiniteRotationGroup, main: Vec3) -> Vec<Vec3> {
    let mut flips: Vec<Vec3> = rotation_axes(group)
        .into_iter()
        .filter(|a| a.order == 2 && perpendicular(a.axis, main) && !same_line(a.axis, main))
        .map(|a| a.axis)
        .collect();
    flips.sort_by(|a, b| lex_cmp(*b, *a));
    flips
}

/// Classes of subgroups of `group` found by enumeration.
pub fn subgroup_classes(group: &FiniteRotationGroup) -> Vec<ClassTag> {
    let mut tags: Vec<ClassTag> = subgroups_of(group).iter().filter_map(|s| classify_finite(s).ok()).collect();
    tags.sort();
    tags.dedup();
    tags
}
