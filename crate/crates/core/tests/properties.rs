use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isolat::adjoint::isotropy_on_ann;
use isolat::lattice::{build_lattice, compute_depths, up_set, IsotropyLattice};
use isolat::lift::{lifted_lattice, AmbientGroup};
use isolat::momentum::{mu_closure, mu_lattice, relative_equilibria_lattice, MomentumValue};
use isolat::oracle::{
    empirical_base_lattice, empirical_lifted_lattice, empirical_requilibria_lattice, stabilizer_of_tangent,
    ConcreteAction, SamplePlan,
};
use isolat::rotation::{apply, close_group, compose, eq, norm, Rotation, Vec3, DEFAULT_GROUP_CAP};
use isolat::subgroup::{
    canonical_rep, dihedral_about, embeddings_of_class_in, g_class_of, intersect, ConcreteSubgroup,
};
use isolat::tag::{is_strictly_subconjugate, is_subconjugate, ClassTag};
use ClassTag::*;

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = q.iter().map(|c| c * c).sum::<f64>();
        if n > 1e-3 && n <= 1.0 {
            return Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
        }
    }
}

fn rotation_strategy() -> impl Strategy<Value = Rotation> {
    any::<u64>().prop_map(|seed| random_rotation(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn small_tags() -> Vec<ClassTag> {
    ClassTag::catalog(8)
}

fn lattice_strategy() -> impl Strategy<Value = IsotropyLattice> {
    proptest::sample::subsequence(ClassTag::catalog(10), 1..6).prop_map(|mut tags| {
        if build_lattice(tags.iter().copied()).is_err() {
            tags.insert(0, Trivial);
        }
        build_lattice(tags).expect("adding the trivial class gives a unique minimum")
    })
}

#[test]
fn apply_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1_000_000 {
        let r = random_rotation(&mut rng);
        let v: Vec3 = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        assert!((norm(apply(&r, v)) - norm(v)).abs() <= 1e-8);
    }
}

#[test]
fn class_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let reps: Vec<(ClassTag, ConcreteSubgroup)> = small_tags().into_iter().map(|t| (t, canonical_rep(t))).collect();
    for _ in 0..1000 {
        let g = random_rotation(&mut rng);
        for (t, rep) in &reps {
            assert_eq!(g_class_of(&rep.conjugate_by(&g)).unwrap(), *t);
        }
    }
}

#[test]
fn intersect_with_itself() {
    for t in small_tags().into_iter().chain([Tetra, Octa, Icosa]) {
        let rep = canonical_rep(t);
        assert!(intersect(&rep, &rep).same_subgroup(&rep), "{t}");
    }
}

#[test]
fn embeddings_exist_when_subconjugate() {
    for h2 in ClassTag::catalog(12) {
        let rep = canonical_rep(h2);
        for h1 in ClassTag::catalog(12).into_iter().filter(|&h1| is_subconjugate(h1, h2)) {
            let embeddings = embeddings_of_class_in(h1, &rep).unwrap().into_vec();
            assert!(!embeddings.is_empty(), "{h1} in {h2}");
            for e in embeddings {
                assert_eq!(g_class_of(&e).unwrap(), h1);
                assert!(e.is_subgroup_of(&rep), "{h1} in {h2}");
            }
        }
    }
}

/// Stabilizer classes of a finite group on R³, found by sampling.
fn sampled_ann_classes(h: &ConcreteSubgroup, rng: &mut ChaCha8Rng) -> BTreeSet<(usize, ClassTag)> {
    let group = h.as_finite().unwrap();
    let mut vectors: Vec<Vec3> = vec![[0.0; 3]];
    vectors.extend(isolat::subgroup::rotation_axes(group).iter().flat_map(|a| [a.axis, a.axis.map(|c| -c)]));
    vectors.extend((0..10_000).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))));
    vectors
        .into_iter()
        .map(|v| {
            let s = group.filter(|r| norm(isolat::rotation::sub(apply(r, v), v)) <= 1e-9);
            (s.order(), g_class_of(&ConcreteSubgroup::Finite(s)).unwrap())
        })
        .collect()
}

#[test]
fn finite_ann_isotropy_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in ClassTag::finite_catalog(6) {
        let h = canonical_rep(t);
        let predicted: BTreeSet<(usize, ClassTag)> = isotropy_on_ann(&h)
            .classes
            .iter()
            .map(|c| (c.representative.order().unwrap(), c.class))
            .collect();
        assert_eq!(predicted, sampled_ann_classes(&h, &mut rng), "{t}");
    }
}

#[test]
fn ann_stabilizers_are_conjugation_closed() {
    for t in [Dihedral(4), Dihedral(6), Tetra, Octa, Icosa] {
        let h = canonical_rep(t);
        let group = h.as_finite().unwrap();
        for c in isotropy_on_ann(&h).classes {
            let k = c.representative.as_finite().unwrap();
            if k.order() == 1 || k.order() == group.order() {
                continue;
            }
            let v = isolat::subgroup::principal_axis(k);
            for g in group.elements() {
                let moved = apply(g, v);
                let stabilizer = group.filter(|r| norm(isolat::rotation::sub(apply(r, moved), moved)) <= 1e-9);
                assert!(stabilizer.same_elements(&k.conjugate_by(g)), "{t}");
            }
        }
    }
}

#[test]
fn continuous_stabilizers_agree_on_finite_probes() {
    let probes = [
        dihedral_about([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 60),
        canonical_rep(Octa).as_finite().unwrap().clone(),
        canonical_rep(Icosa).as_finite().unwrap().clone(),
    ];
    let pairs: [(Vec3, Vec3); 6] = [
        ([0.0; 3], [0.0; 3]),
        ([0.0, 0.0, 1.0], [0.0; 3]),
        ([0.0, 0.0, 1.0], [0.0, 0.0, -2.0]),
        ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
        ([0.0; 3], [1.0, 0.0, 0.0]),
        ([0.3, 0.2, 0.1], [0.0, 0.0, 0.0]),
    ];
    for (x, v) in pairs {
        let stabilizer = stabilizer_of_tangent(&ConcreteAction::So3OnR3, x, v).unwrap();
        for probe in &probes {
            let by_rule = probe.filter(|r| stabilizer.contains(r));
            let by_filter = probe.filter(|r| {
                norm(isolat::rotation::sub(apply(r, x), x)) <= 1e-9 && norm(isolat::rotation::sub(apply(r, v), v)) <= 1e-9
            });
            assert!(by_rule.same_elements(&by_filter), "{x:?} {v:?}");
        }
    }
}

#[test]
fn oracle_sampling_is_monotone() {
    for action in ConcreteAction::catalog() {
        let small = SamplePlan::for_action(&action, 5, 100);
        let large = SamplePlan::for_action(&action, 5, 2_000);
        assert!(empirical_lifted_lattice(&action, &small).is_subset(&empirical_lifted_lattice(&action, &large)));
        assert!(empirical_base_lattice(&action, &small).is_subset(&empirical_base_lattice(&action, &large)));
    }
}

#[test]
fn requilibria_match_oracle_on_catalog() {
    for action in ConcreteAction::catalog() {
        let plan = SamplePlan::for_action(&action, 6, 2_000);
        let base = build_lattice(empirical_base_lattice(&action, &plan)).unwrap();
        let predicted = relative_equilibria_lattice(&action.ambient(), &base).unwrap();
        let predicted: BTreeSet<ClassTag> = predicted.classes().iter().copied().collect();
        assert_eq!(predicted, empirical_requilibria_lattice(&action, &plan), "{action}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eq_is_an_equivalence(a in rotation_strategy(), b in rotation_strategy()) {
        let c = Rotation::from_quaternion(
            a.components()[0] + 1e-11, a.components()[1], a.components()[2], a.components()[3],
        );
        let negated = a.components().map(|x| -x);
        let neg = Rotation::from_quaternion(negated[0], negated[1], negated[2], negated[3]);
        prop_assert!(eq(&a, &a));
        prop_assert_eq!(eq(&a, &b), eq(&b, &a));
        prop_assert!(eq(&a, &c) && eq(&c, &a) && eq(&a, &neg));
        if eq(&a, &b) {
            prop_assert!(eq(&c, &b));
        }
    }

    #[test]
    fn compose_inverse_is_identity(a in rotation_strategy()) {
        prop_assert!(compose(&a, &a.inverse()).is_identity());
    }

    #[test]
    fn closure_is_idempotent(t in proptest::sample::select(vec![Cyclic(5), Dihedral(3), Dihedral(6), Tetra, Octa, Icosa]), g in rotation_strategy()) {
        let group = canonical_rep(t).conjugate_by(&g);
        let group = group.as_finite().unwrap();
        let closed = close_group(group.elements(), DEFAULT_GROUP_CAP).unwrap();
        prop_assert!(closed.same_elements(group));
        prop_assert!(closed.is_closed());
        let again = close_group(closed.elements(), DEFAULT_GROUP_CAP).unwrap();
        prop_assert!(again.same_elements(&closed));
    }

    #[test]
    fn intersect_is_symmetric(
        a in proptest::sample::select(ClassTag::catalog(6)),
        b in proptest::sample::select(ClassTag::catalog(6)),
        g in rotation_strategy(),
    ) {
        let x = canonical_rep(a);
        let y = canonical_rep(b).conjugate_by(&g);
        prop_assert!(intersect(&x, &y).same_subgroup(&intersect(&y, &x)));
        prop_assert!(intersect(&x, &y).is_subgroup_of(&x));
    }

    #[test]
    fn hasse_edges_reduce_the_order(lattice in lattice_strategy()) {
        let order: BTreeSet<(usize, usize)> = lattice.order_pairs().into_iter().collect();
        prop_assert_eq!(lattice.hasse_closure(), order.clone());
        let classes = lattice.classes();
        for &(i, j) in lattice.hasse_edges() {
            let implied = (0..classes.len()).any(|k| k != i && k != j && order.contains(&(i, k)) && order.contains(&(k, j)));
            prop_assert!(!implied);
        }
    }

    #[test]
    fn depths_are_monotone(lattice in lattice_strategy()) {
        let depths = compute_depths(&lattice);
        for &t in lattice.classes() {
            for &s in lattice.classes() {
                if is_strictly_subconjugate(t, s) {
                    prop_assert!(depths[&t] < depths[&s]);
                }
            }
        }
    }

    #[test]
    fn build_is_order_independent(lattice in lattice_strategy(), seed in any::<u64>()) {
        let mut tags = lattice.classes().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(tags.as_mut_slice(), &mut rng);
        prop_assert_eq!(build_lattice(tags).unwrap().to_json(), lattice.to_json());
    }

    #[test]
    fn lift_invariants(lattice in lattice_strategy()) {
        let result = lifted_lattice(&AmbientGroup::So3, &lattice).unwrap();
        for &t in lattice.classes() {
            prop_assert!(result.lifted.contains(t));
        }
        let lifted_min = result.lifted.minimum().unwrap();
        prop_assert!(is_subconjugate(lifted_min, lattice.minimum().unwrap()));
        let requilibria = relative_equilibria_lattice(&AmbientGroup::So3, &lattice).unwrap();
        for &t in requilibria.classes() {
            prop_assert!(result.lifted.contains(t));
        }
    }

    #[test]
    fn fast_paths_are_idempotent(tags in proptest::sample::subsequence(vec![Cyclic(2), Cyclic(3), Cyclic(4), Cyclic(6), Cyclic(12), Circle], 1..5)) {
        let mut tags = tags;
        if build_lattice(tags.iter().copied()).is_err() {
            tags.insert(0, Trivial);
        }
        let base = build_lattice(tags).unwrap();
        let once = lifted_lattice(&AmbientGroup::Circle, &base).unwrap().lifted;
        prop_assert_eq!(&once, &base);
        prop_assert_eq!(lifted_lattice(&AmbientGroup::Circle, &once).unwrap().lifted, base);
    }

    #[test]
    fn mu_closures_are_up_sets(tags in proptest::sample::subsequence(vec![Cyclic(2), Cyclic(4), Cyclic(8), Cyclic(6), Circle], 1..5), mu in -3.0f64..3.0) {
        let mut tags = tags;
        if build_lattice(tags.iter().copied()).is_err() {
            tags.insert(0, Trivial);
        }
        let base = build_lattice(tags).unwrap();
        let value = MomentumValue::Scalar(mu);
        let restricted = mu_lattice(&AmbientGroup::Circle, &base, &value).unwrap();
        if let Some(l) = &restricted.restricted {
            for &h in l.classes() {
                let up = mu_closure(&AmbientGroup::Circle, &base, &value, h).unwrap();
                prop_assert_eq!(&up, &up_set(l, h).unwrap());
                for &s in l.classes() {
                    if up.iter().any(|&u| is_subconjugate(u, s)) {
                        prop_assert!(up.contains(&s));
                    }
                }
            }
        }
        let zero = mu_lattice(&AmbientGroup::Circle, &base, &MomentumValue::Scalar(0.0)).unwrap();
        prop_assert_eq!(zero.restricted.as_ref(), Some(&base));
    }
}
