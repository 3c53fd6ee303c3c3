use std::collections::BTreeSet;
use std::f64::consts::PI;

use isolat::adjoint::{ann_h, isotropy_on_ann, SubspaceDescriptor};
use isolat::io::parse_spec;
use isolat::lattice::{build_lattice, compute_depths, up_set, IsotropyLattice, LatticeError};
use isolat::lift::{lift_witness_check, lifted_lattice, AmbientGroup};
use isolat::momentum::{
    is_totally_isotropic, mu_closure, mu_lattice, relative_equilibria_lattice, zero_level_lattice, MomentumError,
    MomentumValue,
};
use isolat::oracle::{
    empirical_base_lattice, empirical_lifted_lattice, empirical_requilibria_lattice, empirical_zero_momentum_lattice,
    stabilizer_of_point, stabilizer_of_tangent, ConcreteAction, SamplePlan,
};
use isolat::rotation::{
    apply, axis_angle_of, close_group, compose, eq, Rotation, RotationOrder, Vec3, DEFAULT_GROUP_CAP,
};
use isolat::subgroup::{
    canonical_rep, classify_finite, cyclic_about, embeddings_of_class_in, g_class_of, half_turn, intersect,
    subgroups_of, ConcreteSubgroup,
};
use isolat::tag::{is_subconjugate, ClassTag};
use ClassTag::*;

const X: Vec3 = [1.0, 0.0, 0.0];
const Y: Vec3 = [0.0, 1.0, 0.0];
const Z: Vec3 = [0.0, 0.0, 1.0];

fn rot(axis: Vec3, degrees: f64) -> Rotation {
    Rotation::from_axis_angle(axis, degrees.to_radians()).unwrap()
}

fn close(v: Vec3, w: Vec3) -> bool {
    (0..3).all(|i| (v[i] - w[i]).abs() < 1e-12)
}

fn lattice(tags: &[ClassTag]) -> IsotropyLattice {
    build_lattice(tags.iter().copied()).unwrap()
}

fn finite(t: ClassTag) -> AmbientGroup {
    AmbientGroup::Finite(canonical_rep(t).as_finite().unwrap().clone())
}

fn plan(action: &ConcreteAction) -> SamplePlan {
    SamplePlan::for_action(action, 11, 1_000)
}

#[test]
fn rotations() {
    let id = Rotation::IDENTITY;
    assert!(compose(&id, &id).is_identity());
    assert!(eq(&compose(&rot(Z, 90.0), &rot(Z, 90.0)), &rot(Z, 180.0)));
    assert!(eq(&compose(&rot(X, 180.0), &rot(Y, 180.0)), &rot(Z, 180.0)));

    assert!(close(apply(&id, [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]));
    assert!(close(apply(&rot(Z, 90.0), X), Y));
    assert!(close(apply(&rot([1.0, 1.0, 1.0], 120.0), X), Y));

    let [w, x, y, z] = rot([0.2, 0.3, 0.9], 71.0).components();
    assert!(eq(&Rotation::from_quaternion(w, x, y, z), &Rotation::from_quaternion(-w, -x, -y, -z)));
    assert!(!eq(&id, &rot(Z, 180.0)));
    assert!(eq(&Rotation::from_quaternion(w + 1e-12, x - 1e-12, y + 1e-12, z), &Rotation::from_quaternion(w, x, y, z)));

    assert!(axis_angle_of(&id).axis_angle().is_none());
    let half = axis_angle_of(&rot(X, 180.0)).axis_angle().unwrap();
    assert!(close(half.axis, X) && (half.angle - PI).abs() < 1e-12 && half.order == RotationOrder::Finite(2));
    let fifth = axis_angle_of(&rot(Z, 144.0)).axis_angle().unwrap();
    assert!(close(fifth.axis, Z) && (fifth.angle - 4.0 * PI / 5.0).abs() < 1e-12);
    assert_eq!(fifth.order, RotationOrder::Finite(5));

    assert_eq!(close_group(&[id], DEFAULT_GROUP_CAP).unwrap().order(), 1);
    assert_eq!(close_group(&[rot(Z, 90.0)], DEFAULT_GROUP_CAP).unwrap().order(), 4);
    let tetra = close_group(&[rot([1.0, 1.0, 1.0], 120.0), rot(Z, 180.0)], DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(tetra.order(), 12);
    assert_eq!(classify_finite(&tetra).unwrap(), Tetra);
}

#[test]
fn classification_and_catalog() {
    assert_eq!(classify_finite(&close_group(&[Rotation::IDENTITY], DEFAULT_GROUP_CAP).unwrap()).unwrap(), Trivial);
    assert_eq!(classify_finite(&close_group(&[rot(Z, 90.0)], DEFAULT_GROUP_CAP).unwrap()).unwrap(), Cyclic(4));

    assert!(canonical_rep(Cyclic(2)).same_subgroup(&ConcreteSubgroup::Finite(half_turn(Z))));
    let d2 = close_group(&[rot(Z, 180.0), rot(X, 180.0)], DEFAULT_GROUP_CAP).unwrap();
    assert!(canonical_rep(Dihedral(2)).same_subgroup(&ConcreteSubgroup::Finite(d2)));
    let t = canonical_rep(Tetra);
    assert_eq!((t.order(), classify_finite(t.as_finite().unwrap()).unwrap()), (Some(12), Tetra));

    assert!(is_subconjugate(Cyclic(2), Dihedral(5)));
    assert!(!is_subconjugate(Octa, Icosa));
    assert!(is_subconjugate(Trivial, Full));

    assert_eq!(g_class_of(&ConcreteSubgroup::circle(X)).unwrap(), Circle);
    let g = rot([0.4, -0.7, 0.2], 133.0);
    assert_eq!(g_class_of(&canonical_rep(Dihedral(3)).conjugate_by(&g)).unwrap(), Dihedral(3));
    assert_eq!(g_class_of(&canonical_rep(Icosa)).unwrap(), Icosa);
}

#[test]
fn subgroup_enumeration() {
    assert_eq!(subgroups_of(canonical_rep(Trivial).as_finite().unwrap()).len(), 1);
    let orders: Vec<usize> = subgroups_of(canonical_rep(Cyclic(4)).as_finite().unwrap()).iter().map(|s| s.order()).collect();
    assert_eq!(orders, vec![1, 2, 4]);
    let mut counts = std::collections::BTreeMap::new();
    for s in subgroups_of(canonical_rep(Tetra).as_finite().unwrap()) {
        *counts.entry(s.order()).or_insert(0) += 1;
    }
    assert_eq!(counts.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 3), (3, 4), (4, 1), (12, 1)]);
}

#[test]
fn intersections() {
    let d2 = intersect(&ConcreteSubgroup::orth_circle(Z, 0.0), &ConcreteSubgroup::orth_circle(X, 0.0));
    let axes = close_group(&[rot(Z, 180.0), rot(X, 180.0)], DEFAULT_GROUP_CAP).unwrap();
    assert!(d2.same_subgroup(&ConcreteSubgroup::Finite(axes)));
    let c = ConcreteSubgroup::circle(Z);
    assert!(intersect(&c, &c).same_subgroup(&c));
    let c4 = intersect(&canonical_rep(Octa), &c);
    assert!(c4.same_subgroup(&ConcreteSubgroup::Finite(cyclic_about(Z, 4))));
}

#[test]
fn embeddings() {
    let flips = embeddings_of_class_in(Cyclic(2), &canonical_rep(Dihedral(2))).unwrap().into_vec();
    assert_eq!(flips.len(), 3);
    for axis in [X, Y, Z] {
        assert!(flips.iter().any(|f| f.same_subgroup(&ConcreteSubgroup::Finite(half_turn(axis)))));
    }
    let circles = embeddings_of_class_in(Circle, &ConcreteSubgroup::circle(Z)).unwrap().into_vec();
    assert_eq!(circles.len(), 1);
    assert!(circles[0].same_subgroup(&ConcreteSubgroup::circle(Z)));

    let in_o2 = embeddings_of_class_in(Cyclic(2), &ConcreteSubgroup::orth_circle(Z, 0.0)).unwrap().into_vec();
    assert_eq!(in_o2.len(), 3);
    assert!(in_o2[0].same_subgroup(&ConcreteSubgroup::Finite(half_turn(Z))));
    assert!(in_o2[1].same_subgroup(&ConcreteSubgroup::Finite(half_turn(X))));
    assert!(!in_o2[2].same_subgroup(&in_o2[1]) && !in_o2[2].same_subgroup(&in_o2[0]));
}

#[test]
fn lattices() {
    let full = lattice(&[Full]);
    assert_eq!((full.len(), full.hasse_edges().len()), (1, 0));
    assert_eq!(lattice(&[Circle, Full]).hasse_edges(), &[(0, 1)]);
    assert!(matches!(build_lattice([Cyclic(2), Cyclic(3)]), Err(LatticeError::NoUniqueMinimum { .. })));

    let depths = compute_depths(&lattice(&[Circle, Full]));
    assert_eq!((depths[&Circle], depths[&Full]), (0, 1));
    let depths = compute_depths(&lattice(&[Cyclic(2), OrthCircle, Full]));
    assert_eq!((depths[&Cyclic(2)], depths[&OrthCircle], depths[&Full]), (0, 1, 2));
    let diamond = lattice(&[Trivial, Cyclic(2), Cyclic(3), Dihedral(6)]);
    let depths = compute_depths(&diamond);
    assert_eq!(
        [Trivial, Cyclic(2), Cyclic(3), Dihedral(6)].map(|t| depths[&t]),
        [0, 1, 1, 2]
    );

    assert_eq!(up_set(&diamond, Dihedral(6)).unwrap(), BTreeSet::from([Dihedral(6)]));
    assert_eq!(up_set(&diamond, Trivial).unwrap().len(), 4);
    assert_eq!(up_set(&diamond, Cyclic(2)).unwrap(), BTreeSet::from([Cyclic(2), Dihedral(6)]));

    assert_eq!(lattice(&[Trivial]).to_json(), r#"{"classes":[{"kind":"1"}],"hasse":[]}"#);
    let dot = lattice(&[Circle, Full]).to_dot("chain");
    assert_eq!((dot.matches("label=").count(), dot.matches("->").count()), (2, 1));
    assert_eq!(diamond.to_json_value()["hasse"].as_array().unwrap().len(), 4);
}

#[test]
fn annihilators() {
    assert_eq!(ann_h(&canonical_rep(Tetra)), SubspaceDescriptor::Full3);
    assert_eq!(ann_h(&ConcreteSubgroup::circle(Z)), SubspaceDescriptor::Plane(Z));
    assert_eq!(ann_h(&ConcreteSubgroup::Full), SubspaceDescriptor::Zero);

    assert_eq!(isotropy_on_ann(&ConcreteSubgroup::circle(Z)).tags(), vec![Trivial, Circle]);
    let o2 = isotropy_on_ann(&ConcreteSubgroup::orth_circle(Z, 0.0));
    assert_eq!(o2.tags(), vec![Cyclic(2), OrthCircle]);
    assert!(o2.has_representative(&ConcreteSubgroup::Finite(half_turn(X))));
    let d4 = isotropy_on_ann(&canonical_rep(Dihedral(4)));
    let mut labels: Vec<ClassTag> = d4.classes.iter().map(|c| c.class).collect();
    labels.sort();
    assert_eq!(labels, vec![Trivial, Cyclic(2), Cyclic(2), Cyclic(4), Dihedral(4)]);
}

#[test]
fn lifts() {
    let r3 = lifted_lattice(&AmbientGroup::So3, &lattice(&[Circle, Full])).unwrap();
    assert_eq!(r3.lifted.classes(), &[Trivial, Circle, Full]);
    assert_eq!(r3.lifted.hasse_edges(), &[(0, 1), (1, 2)]);
    let octa_base = lattice(&[Trivial, Cyclic(2), Cyclic(3), Cyclic(4), Octa]);
    let octa = lifted_lattice(&finite(Octa), &octa_base).unwrap();
    assert_eq!(octa.lifted, octa_base);
    let s2 = lifted_lattice(&AmbientGroup::So3, &lattice(&[Circle])).unwrap();
    assert_eq!(s2.lifted.classes(), &[Trivial, Circle]);

    assert!(lift_witness_check(&r3));
    let mut tampered = r3.clone();
    let w = tampered.witnesses.iter_mut().find(|w| w.class == Trivial).unwrap();
    w.k_rep = ConcreteSubgroup::Full;
    assert!(!lift_witness_check(&tampered));
    assert!(lift_witness_check(&octa));
}

#[test]
fn momentum() {
    let zero = MomentumValue::Vector([0.0; 3]);
    assert!(is_totally_isotropic(&AmbientGroup::So3, &zero));
    assert!(!is_totally_isotropic(&AmbientGroup::So3, &MomentumValue::Vector(Z)));
    assert!(is_totally_isotropic(&AmbientGroup::Circle, &MomentumValue::Scalar(7.3)));

    let r3 = lattice(&[Circle, Full]);
    assert_eq!(zero_level_lattice(&AmbientGroup::So3, &r3), r3);
    assert_eq!(zero_level_lattice(&AmbientGroup::So3, &lattice(&[Trivial])), lattice(&[Trivial]));
    let o_r3 = lattice(&[Trivial, Cyclic(2), Cyclic(3), Cyclic(4), Octa]);
    assert_eq!(zero_level_lattice(&finite(Octa), &o_r3), o_r3);

    assert_eq!(mu_lattice(&AmbientGroup::So3, &o_r3, &zero).unwrap().restricted, Some(o_r3.clone()));
    let circle = lattice(&[Cyclic(2), Circle]);
    let one = MomentumValue::Scalar(1.0);
    assert_eq!(mu_lattice(&AmbientGroup::Circle, &circle, &one).unwrap().classes(), &[Cyclic(2)]);
    assert!(matches!(
        mu_lattice(&AmbientGroup::So3, &r3, &MomentumValue::Vector(Z)),
        Err(MomentumError::NotTotallyIsotropic { .. })
    ));

    assert_eq!(mu_closure(&AmbientGroup::So3, &o_r3, &zero, Trivial).unwrap().len(), 5);
    assert_eq!(mu_closure(&AmbientGroup::So3, &o_r3, &zero, Octa).unwrap(), BTreeSet::from([Octa]));
    let chain = lattice(&[Cyclic(2), Cyclic(4), Circle]);
    assert_eq!(
        mu_closure(&AmbientGroup::Circle, &chain, &one, Cyclic(2)).unwrap(),
        BTreeSet::from([Cyclic(2), Cyclic(4)])
    );

    assert_eq!(relative_equilibria_lattice(&AmbientGroup::So3, &lattice(&[Circle])).unwrap().classes(), &[Trivial, Circle]);
    assert_eq!(relative_equilibria_lattice(&AmbientGroup::So3, &r3).unwrap().classes(), &[Trivial, Circle, Full]);
    let t_r3 = lattice(&[Trivial, Cyclic(2), Cyclic(3), Tetra]);
    assert_eq!(relative_equilibria_lattice(&finite(Tetra), &t_r3).unwrap(), t_r3);
}

#[test]
fn oracle() {
    let r3 = ConcreteAction::So3OnR3;
    assert!(matches!(stabilizer_of_point(&r3, [0.0; 3]), ConcreteSubgroup::Full));
    assert!(stabilizer_of_point(&r3, [0.0, 0.0, 2.0]).same_subgroup(&ConcreteSubgroup::circle(Z)));
    let c3 = stabilizer_of_point(&ConcreteAction::FiniteOnR3(Octa), [1.0, 1.0, 1.0]);
    assert!(c3.same_subgroup(&ConcreteSubgroup::Finite(cyclic_about([1.0, 1.0, 1.0], 3))));

    assert!(stabilizer_of_tangent(&r3, Z, [0.0, 0.0, 3.0]).unwrap().same_subgroup(&ConcreteSubgroup::circle(Z)));
    assert_eq!(g_class_of(&stabilizer_of_tangent(&r3, Z, X).unwrap()).unwrap(), Trivial);
    assert!(matches!(stabilizer_of_tangent(&r3, [0.0; 3], [0.0; 3]).unwrap(), ConcreteSubgroup::Full));

    let s2 = ConcreteAction::So3OnS2;
    let o = ConcreteAction::FiniteOnR3(Octa);
    let t = ConcreteAction::FiniteOnR3(Tetra);
    assert_eq!(empirical_lifted_lattice(&r3, &plan(&r3)), BTreeSet::from([Trivial, Circle, Full]));
    assert_eq!(empirical_lifted_lattice(&s2, &plan(&s2)), BTreeSet::from([Trivial, Circle]));
    assert_eq!(
        empirical_lifted_lattice(&o, &plan(&o)),
        BTreeSet::from([Trivial, Cyclic(2), Cyclic(3), Cyclic(4), Octa])
    );

    assert_eq!(empirical_zero_momentum_lattice(&r3, &plan(&r3)), BTreeSet::from([Circle, Full]));
    assert_eq!(empirical_zero_momentum_lattice(&s2, &plan(&s2)), BTreeSet::from([Circle]));
    assert_eq!(empirical_zero_momentum_lattice(&t, &plan(&t)), empirical_base_lattice(&t, &plan(&t)));
    assert_eq!(empirical_zero_momentum_lattice(&t, &plan(&t)), empirical_lifted_lattice(&t, &plan(&t)));

    let c = ConcreteAction::CircleOnR2;
    assert_eq!(empirical_requilibria_lattice(&s2, &plan(&s2)), BTreeSet::from([Trivial, Circle]));
    assert_eq!(empirical_requilibria_lattice(&r3, &plan(&r3)), BTreeSet::from([Trivial, Circle, Full]));
    assert_eq!(empirical_requilibria_lattice(&c, &plan(&c)), BTreeSet::from([Trivial, Circle]));
}

#[test]
fn problem_files() {
    let spec = parse_spec(r#"{"group":{"kind":"SO3"},"base_lattice":[{"kind":"SO2"},{"kind":"SO3"}]}"#).unwrap();
    assert_eq!(spec.lattice().classes(), &[Circle, Full]);
    assert_eq!(parse_spec(r#"{"group":{"kind":"SO3"},"base_lattice":[]}"#).unwrap_err().code(), "validation_error");
    let spec = parse_spec(
        r#"{"group":{"kind":"finite","generators":[{"axis":[0,0,1],"angle_deg":90},{"axis":[1,0,0],"angle_deg":180}]},
            "base_lattice":[{"kind":"1"},{"kind":"C","n":2},{"kind":"C","n":4},{"kind":"D","n":4}]}"#,
    )
    .unwrap();
    assert_eq!(spec.ambient.class().unwrap(), Dihedral(4));
    assert_eq!(parse_spec(&spec.to_json()).unwrap(), spec);
}
