//! Brute-force stabilizers on a small catalog of concrete actions.
//!
//! Stabilizers for the continuous groups come from closed-form case analysis;
//! for finite groups they are element filters. Nothing here goes through the
//! lift engine: the empirical lattices are meant to be compared against it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{build_lattice, IsotropyLattice, LatticeError};
use crate::lift::{lifted_lattice, AmbientGroup, LiftError};
use crate::momentum::{relative_equilibria_lattice, zero_level_lattice, MomentumError};
use crate::rotation::{apply, cross, dot, norm, normalize, perpendicular_basis, scale, sub, tolerance, Vec3};
use crate::subgroup::{canonical_rep, g_class_of, rotation_axes, ConcreteSubgroup};
use crate::tag::ClassTag;

/// Default number of random samples per action.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Version of the stratum seed lists; bump when they change.
pub const SEED_LIST_VERSION: u32 = 1;

const ORIGIN: Vec3 = [0.0; 3];
const X: Vec3 = [1.0, 0.0, 0.0];
const Y: Vec3 = [0.0, 1.0, 0.0];
const Z: Vec3 = [0.0, 0.0, 1.0];
const GENERIC_A: Vec3 = [0.3, -0.7, 0.55];
const GENERIC_B: Vec3 = [-0.4, 0.2, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConcreteAction {
    /// SO(3) rotating R³.
    So3OnR3,
    /// SO(3) rotating the unit sphere.
    So3OnS2,
    /// A finite subgroup (canonical position) rotating R³.
    FiniteOnR3(ClassTag),
    /// A finite subgroup (canonical position) rotating the unit sphere.
    FiniteOnS2(ClassTag),
    /// The circle rotating the plane, realized as the xy-plane of R³.
    CircleOnR2,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("vector is not tangent to the sphere at the base point (v·x = {dot})")]
    NotTangent { dot: f64 },
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("finite actions need a non-trivial finite class, got {0}")]
    BadActionGroup(ClassTag),
}

impl ConcreteAction {
    pub fn ambient(&self) -> AmbientGroup {
        match self {
            ConcreteAction::So3OnR3 | ConcreteAction::So3OnS2 => AmbientGroup::So3,
            ConcreteAction::FiniteOnR3(t) | ConcreteAction::FiniteOnS2(t) => {
                AmbientGroup::Finite(canonical_rep(*t).as_finite().expect("finite class").clone())
            }
            ConcreteAction::CircleOnR2 => AmbientGroup::Circle,
        }
    }

    /// The actions exercised by the test suites and the `check` command.
    pub fn catalog() -> Vec<ConcreteAction> {
        let finite = [ClassTag::Cyclic(6), ClassTag::Dihedral(4), ClassTag::Tetra, ClassTag::Octa, ClassTag::Icosa];
        let mut out = vec![ConcreteAction::So3OnR3, ConcreteAction::So3OnS2, ConcreteAction::CircleOnR2];
        out.extend(finite.iter().map(|&t| ConcreteAction::FiniteOnR3(t)));
        out.extend(finite.iter().map(|&t| ConcreteAction::FiniteOnS2(t)));
        out
    }

    fn on_sphere(&self) -> bool {
        matches!(self, ConcreteAction::So3OnS2 | ConcreteAction::FiniteOnS2(_))
    }
}

impl fmt::Display for ConcreteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcreteAction::So3OnR3 => write!(f, "SO3_on_R3"),
            ConcreteAction::So3OnS2 => write!(f, "SO3_on_S2"),
            ConcreteAction::FiniteOnR3(t) => write!(f, "Finite_on_R3({t})"),
            ConcreteAction::FiniteOnS2(t) => write!(f, "Finite_on_S2({t})"),
            ConcreteAction::CircleOnR2 => write!(f, "Circle_on_R2"),
        }
    }
}

impl FromStr for ConcreteAction {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<ConcreteAction, OracleError> {
        let s = s.trim();
        match s {
            "SO3_on_R3" => return Ok(ConcreteAction::So3OnR3),
            "SO3_on_S2" => return Ok(ConcreteAction::So3OnS2),
            "Circle_on_R2" => return Ok(ConcreteAction::CircleOnR2),
            _ => {}
        }
        let unknown = || OracleError::UnknownAction(s.to_string());
        let (ctor, rest): (fn(ClassTag) -> ConcreteAction, &str) = if let Some(rest) = s.strip_prefix("Finite_on_R3(") {
            (ConcreteAction::FiniteOnR3, rest)
        } else if let Some(rest) = s.strip_prefix("Finite_on_S2(") {
            (ConcreteAction::FiniteOnS2, rest)
        } else {
            return Err(unknown());
        };
        let tag: ClassTag = rest.strip_suffix(')').ok_or_else(unknown)?.parse().map_err(|_| unknown())?;
        match tag {
            ClassTag::Cyclic(_) | ClassTag::Dihedral(_) | ClassTag::Tetra | ClassTag::Octa | ClassTag::Icosa => {
                Ok(ctor(tag))
            }
            other => Err(OracleError::BadActionGroup(other)),
        }
    }
}

/// Sample points and vectors for one action.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    pub rng_seed: u64,
    pub n_random: usize,
    /// Deterministic `(point, vector)` pairs that hit every stratum.
    pub stratum_seeds: Vec<(Vec3, Vec3)>,
}

impl SamplePlan {
    pub fn for_action(action: &ConcreteAction, rng_seed: u64, n_random: usize) -> SamplePlan {
        SamplePlan { rng_seed, n_random, stratum_seeds: stratum_seeds(action) }
    }

    /// Seeds followed by `n_random` random pairs drawn for `action`.
    pub fn samples(&self, action: &ConcreteAction) -> Vec<(Vec3, Vec3)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let mut out = self.stratum_seeds.clone();
        out.extend((0..self.n_random).map(|_| random_pair(action, &mut rng)));
        out
    }
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

fn tangent_part(x: Vec3, v: Vec3) -> Vec3 {
    sub(v, scale(x, dot(v, x)))
}

fn random_pair(action: &ConcreteAction, rng: &mut ChaCha8Rng) -> (Vec3, Vec3) {
    let (x, v) = (random_vec(rng), random_vec(rng));
    match action {
        ConcreteAction::So3OnR3 | ConcreteAction::FiniteOnR3(_) => (x, v),
        ConcreteAction::So3OnS2 | ConcreteAction::FiniteOnS2(_) => {
            let x = normalize(x).unwrap_or(Z);
            (x, tangent_part(x, v))
        }
        ConcreteAction::CircleOnR2 => ([x[0], x[1], 0.0], [v[0], v[1], 0.0]),
    }
}

fn stratum_seeds(action: &ConcreteAction) -> Vec<(Vec3, Vec3)> {
    let axes: Vec<Vec3> = match action {
        ConcreteAction::So3OnR3 | ConcreteAction::So3OnS2 => vec![Z, X, normalize([1.0, 1.0, 1.0]).expect("non-zero")],
        ConcreteAction::FiniteOnR3(t) | ConcreteAction::FiniteOnS2(t) => {
            rotation_axes(canonical_rep(*t).as_finite().expect("finite class")).iter().map(|a| a.axis).collect()
        }
        ConcreteAction::CircleOnR2 => {
            return vec![(ORIGIN, ORIGIN), (ORIGIN, X), (X, ORIGIN), (X, Y), (X, scale(X, 2.0)), ([0.6, -0.8, 0.0], X)];
        }
    };
    let mut seeds = Vec::new();
    if action.on_sphere() {
        let g = normalize(GENERIC_A).expect("non-zero");
        for &a in &axes {
            let (e1, _) = perpendicular_basis(a);
            seeds.extend([(a, ORIGIN), (a, e1), (a, scale(e1, 0.5))]);
        }
        seeds.extend([(g, ORIGIN), (g, tangent_part(g, GENERIC_B))]);
    } else {
        seeds.extend([(ORIGIN, ORIGIN), (ORIGIN, GENERIC_A), (GENERIC_A, ORIGIN), (GENERIC_A, GENERIC_A), (GENERIC_A, GENERIC_B)]);
        for (i, &a) in axes.iter().enumerate() {
            seeds.extend([(ORIGIN, a), (a, ORIGIN), (a, scale(a, 2.0)), (a, GENERIC_B), (GENERIC_B, a)]);
            if let Some(&b) = axes.get(i + 1) {
                seeds.push((a, b));
            }
        }
    }
    seeds
}

fn is_zero(v: Vec3) -> bool {
    norm(v) <= tolerance()
}

fn fixes(g: &crate::rotation::Rotation, v: Vec3) -> bool {
    norm(sub(apply(g, v), v)) <= tolerance() * norm(v).max(1.0)
}

fn finite_group(t: ClassTag) -> crate::rotation::FiniteRotationGroup {
    canonical_rep(t).as_finite().expect("finite class").clone()
}

/// `G_x`.
pub fn stabilizer_of_point(action: &ConcreteAction, x: Vec3) -> ConcreteSubgroup {
    match action {
        ConcreteAction::So3OnR3 | ConcreteAction::So3OnS2 => match normalize(x) {
            None => ConcreteSubgroup::Full,
            Some(axis) => ConcreteSubgroup::circle(axis),
        },
        ConcreteAction::FiniteOnR3(t) | ConcreteAction::FiniteOnS2(t) => {
            ConcreteSubgroup::Finite(finite_group(*t).filter(|g| fixes(g, x)))
        }
        ConcreteAction::CircleOnR2 => {
            if is_zero(x) {
                ConcreteSubgroup::circle(Z)
            } else {
                ConcreteSubgroup::trivial()
            }
        }
    }
}

/// `G_{v_x}` for the tangent-lifted action: elements fixing both `x` and `v`.
pub fn stabilizer_of_tangent(action: &ConcreteAction, x: Vec3, v: Vec3) -> Result<ConcreteSubgroup, OracleError> {
    if action.on_sphere() {
        let d = dot(v, x);
        if d.abs() > tolerance() * norm(v).max(1.0) {
            return Err(OracleError::NotTangent { dot: d });
        }
    }
    Ok(match action {
        ConcreteAction::So3OnR3 | ConcreteAction::So3OnS2 => {
            let (zx, zv) = (is_zero(x), is_zero(v));
            if zx && zv {
                ConcreteSubgroup::Full
            } else if zx || zv {
                ConcreteSubgroup::circle(if zx { v } else { x })
            } else if norm(cross(x, v)) <= tolerance() * norm(x) * norm(v) {
                ConcreteSubgroup::circle(x)
            } else {
                ConcreteSubgroup::trivial()
            }
        }
        ConcreteAction::FiniteOnR3(t) | ConcreteAction::FiniteOnS2(t) => {
            ConcreteSubgroup::Finite(finite_group(*t).filter(|g| fixes(g, x) && fixes(g, v)))
        }
        ConcreteAction::CircleOnR2 => {
            if is_zero(x) && is_zero(v) {
                ConcreteSubgroup::circle(Z)
            } else {
                ConcreteSubgroup::trivial()
            }
        }
    })
}

fn tags_of<I: IntoIterator<Item = ConcreteSubgroup>>(subgroups: I) -> BTreeSet<ClassTag> {
    subgroups
        .into_iter()
        .map(|s| g_class_of(&s).expect("oracle stabilizers classify"))
        .collect()
}

/// Classes of point stabilizers: the base lattice `I(G, M)`.
pub fn empirical_base_lattice(action: &ConcreteAction, plan: &SamplePlan) -> BTreeSet<ClassTag> {
    tags_of(plan.samples(action).into_iter().map(|(x, _)| stabilizer_of_point(action, x)))
}

/// Classes of tangent-vector stabilizers: `I(G, TM)`.
pub fn empirical_lifted_lattice(action: &ConcreteAction, plan: &SamplePlan) -> BTreeSet<ClassTag> {
    tags_of(
        plan.samples(action)
            .into_iter()
            .map(|(x, v)| stabilizer_of_tangent(action, x, v).expect("samples are tangent")),
    )
}

/// Projects `v` onto the orthogonal complement of the orbit directions `g·x`.
/// Under the metric identification these are the covectors in `J⁻¹(0)`.
fn zero_momentum_part(action: &ConcreteAction, x: Vec3, v: Vec3) -> Vec3 {
    match action {
        ConcreteAction::So3OnR3 => match normalize(x) {
            // g·x is the plane perpendicular to x
            Some(u) => scale(u, dot(v, u)),
            None => v,
        },
        // g·x is the whole tangent plane
        ConcreteAction::So3OnS2 => ORIGIN,
        ConcreteAction::FiniteOnR3(_) | ConcreteAction::FiniteOnS2(_) => v,
        ConcreteAction::CircleOnR2 => match normalize([-x[1], x[0], 0.0]) {
            Some(j) => sub(v, scale(j, dot(v, j))),
            None => v,
        },
    }
}

/// Classes of stabilizers of covectors with zero momentum: `I(G, J⁻¹(0))`.
pub fn empirical_zero_momentum_lattice(action: &ConcreteAction, plan: &SamplePlan) -> BTreeSet<ClassTag> {
    tags_of(plan.samples(action).into_iter().map(|(x, v)| {
        stabilizer_of_tangent(action, x, zero_momentum_part(action, x, v)).expect("projection is tangent")
    }))
}

/// Infinitesimal generator `ξ_M(x)`. For the circle the Lie algebra element is
/// the first component of `xi`; finite groups have none.
pub fn infinitesimal_generator(action: &ConcreteAction, x: Vec3, xi: Vec3) -> Vec3 {
    match action {
        ConcreteAction::So3OnR3 | ConcreteAction::So3OnS2 => cross(xi, x),
        ConcreteAction::CircleOnR2 => scale([-x[1], x[0], 0.0], xi[0]),
        ConcreteAction::FiniteOnR3(_) | ConcreteAction::FiniteOnS2(_) => ORIGIN,
    }
}

/// Classes of stabilizers of the possible relative equilibria `ξ_M(x)`; the
/// second member of each sample pair is read as `ξ`.
pub fn empirical_requilibria_lattice(action: &ConcreteAction, plan: &SamplePlan) -> BTreeSet<ClassTag> {
    tags_of(plan.samples(action).into_iter().map(|(x, xi)| {
        stabilizer_of_tangent(action, x, infinitesimal_generator(action, x, xi)).expect("generators are tangent")
    }))
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Momentum(#[from] MomentumError),
}

/// Predicted and empirical lattices for one action.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub action: ConcreteAction,
    pub base: IsotropyLattice,
    pub predicted_lifted: BTreeSet<ClassTag>,
    pub empirical_lifted: BTreeSet<ClassTag>,
    pub predicted_zero_momentum: BTreeSet<ClassTag>,
    pub empirical_zero_momentum: BTreeSet<ClassTag>,
    pub predicted_requilibria: BTreeSet<ClassTag>,
    pub empirical_requilibria: BTreeSet<ClassTag>,
}

impl CheckReport {
    pub fn lifted_matches(&self) -> bool {
        self.predicted_lifted == self.empirical_lifted
    }

    pub fn zero_momentum_matches(&self) -> bool {
        self.predicted_zero_momentum == self.empirical_zero_momentum
    }

    pub fn requilibria_matches(&self) -> bool {
        self.predicted_requilibria == self.empirical_requilibria
    }

    pub fn all_match(&self) -> bool {
        self.lifted_matches() && self.zero_momentum_matches() && self.requilibria_matches()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "action": self.action.to_string(),
            "base": self.base.to_json_value(),
            "lifted": {"predicted": self.predicted_lifted, "empirical": self.empirical_lifted, "match": self.lifted_matches()},
            "zero_momentum": {"predicted": self.predicted_zero_momentum, "empirical": self.empirical_zero_momentum, "match": self.zero_momentum_matches()},
            "relative_equilibria": {"predicted": self.predicted_requilibria, "empirical": self.empirical_requilibria, "match": self.requilibria_matches()},
            "result": if self.all_match() { "MATCH" } else { "MISMATCH" },
        })
    }
}

/// Runs the engine on the action's sampled base lattice and compares every
/// prediction with the sampled stabilizers.
pub fn check_action(action: &ConcreteAction, plan: &SamplePlan) -> Result<CheckReport, CheckError> {
    let ambient = action.ambient();
    let base = build_lattice(empirical_base_lattice(action, plan))?;
    let lifted = lifted_lattice(&ambient, &base)?;
    let set = |l: &IsotropyLattice| l.classes().iter().copied().collect::<BTreeSet<_>>();
    Ok(CheckReport {
        action: *action,
        predicted_lifted: set(&lifted.lifted),
        empirical_lifted: empirical_lifted_lattice(action, plan),
        predicted_zero_momentum: set(&zero_level_lattice(&ambient, &base)),
        empirical_zero_momentum: empirical_zero_momentum_lattice(action, plan),
        predicted_requilibria: set(&relative_equilibria_lattice(&ambient, &base)?),
        empirical_requilibria: empirical_requilibria_lattice(action, plan),
        base,
    })
}
