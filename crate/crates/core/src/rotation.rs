//! Unit-quaternion arithmetic for SO(3) and closure of finitely generated
//! rotation groups.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Default equality tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default cap on the order of a closed finite group.
pub const DEFAULT_GROUP_CAP: usize = 240;

/// Largest rotation order searched for when extracting the order of a rotation.
pub const ORDER_SEARCH_CAP: u32 = 1000;

pub type Vec3 = [f64; 3];

/// The equality tolerance τ. `ISOLAT_TOLERANCE` overrides the default; it is
/// read once per process.
pub fn tolerance() -> f64 {
    static TAU: OnceLock<f64> = OnceLock::new();
    *TAU.get_or_init(|| {
        std::env::var("ISOLAT_TOLERANCE")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TOLERANCE)
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RotationError {
    #[error("group closure exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("rotation axis has zero length")]
    ZeroAxis,
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > tolerance()).then(|| scale(a, 1.0 / n))
}

/// Flips the sign of `a` so that its first component exceeding τ in absolute
/// value is positive. Returns the canonical vector and whether it was flipped.
pub fn canonical_sign(a: Vec3) -> (Vec3, bool) {
    let tau = tolerance();
    for c in a {
        if c.abs() > tau {
            return if c < 0.0 { (scale(a, -1.0), true) } else { (a, false) };
        }
    }
    (a, false)
}

/// Canonical unit direction of the line spanned by `a`.
pub fn canonical_axis(a: Vec3) -> Option<Vec3> {
    normalize(a).map(|u| canonical_sign(u).0)
}

/// True when `a` and `b` span the same line (both assumed unit length).
pub fn same_line(a: Vec3, b: Vec3) -> bool {
    norm(cross(a, b)) <= tolerance() * 10.0
}

/// Lexicographic comparison of vectors, with τ-equal components treated as equal.
pub fn lex_cmp(a: Vec3, b: Vec3) -> std::cmp::Ordering {
    let tau = tolerance();
    for i in 0..3 {
        if (a[i] - b[i]).abs() > tau {
            return a[i].partial_cmp(&b[i]).unwrap_or(std::cmp::Ordering::Equal);
        }
    }
    std::cmp::Ordering::Equal
}

/// Orthonormal basis `(e1, e2)` of the plane perpendicular to the unit vector
/// `axis`, with `axis × e1 = e2`. For the z axis this is `(x, y)`.
pub fn perpendicular_basis(axis: Vec3) -> (Vec3, Vec3) {
    let reference = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(sub(reference, scale(axis, dot(reference, axis))))
        .expect("reference direction is not parallel to the axis");
    (e1, cross(axis, e1))
}

/// An element of SO(3) stored as a sign-canonical unit quaternion.
#[derive(Clone, Copy, Debug)]
pub struct Rotation {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds a rotation from raw quaternion components, renormalizing and
    /// sign-canonicalizing.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Rotation {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        let tau = tolerance();
        let sign = [w, x, y, z]
            .into_iter()
            .find(|c| c.abs() > tau)
            .map_or(1.0, |c| c.signum());
        Rotation { w: w * sign, x: x * sign, y: y * sign, z: z * sign }
    }

    /// Rotation by `angle` radians about `axis` (right-hand rule).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Rotation, RotationError> {
        let u = normalize(axis).ok_or(RotationError::ZeroAxis)?;
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(Rotation::from_quaternion(c, u[0] * s, u[1] * s, u[2] * s))
    }

    /// Rotation by `angle` about a unit axis; the caller guarantees a non-zero axis.
    pub(crate) fn about(axis: Vec3, angle: f64) -> Rotation {
        Rotation::from_axis_angle(axis, angle).expect("non-zero axis")
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn inverse(&self) -> Rotation {
        Rotation::from_quaternion(self.w, -self.x, -self.y, -self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.eq(&Rotation::IDENTITY)
    }

    /// Conjugate `self` by `g`: `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Rotation) -> Rotation {
        compose(&compose(g, self), &g.inverse())
    }
}

impl PartialEq for Rotation {
    fn eq(&self, other: &Rotation) -> bool {
        eq(self, other)
    }
}

/// `a ∘ b`: apply `b` first, then `a`.
pub fn compose(a: &Rotation, b: &Rotation) -> Rotation {
    Rotation::from_quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )
}

pub fn apply(r: &Rotation, v: Vec3) -> Vec3 {
    let u = [r.x, r.y, r.z];
    let t = scale(cross(u, v), 2.0);
    add(add(v, scale(t, r.w)), cross(u, t))
}

/// Component-wise comparison within τ, modulo the quaternion double cover.
pub fn eq(a: &Rotation, b: &Rotation) -> bool {
    let tau = tolerance();
    let (p, q) = (a.components(), b.components());
    let same = (0..4).all(|i| (p[i] - q[i]).abs() <= tau);
    same || (0..4).all(|i| (p[i] + q[i]).abs() <= tau)
}

/// Order of a rotation: `Finite(k)` for the smallest `k` with `rᵏ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationOrder {
    Finite(u32),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisAngle {
    /// Unit axis, sign-canonical.
    pub axis: Vec3,
    /// Signed angle about `axis`, with magnitude in (0, π].
    pub angle: f64,
    pub order: RotationOrder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisAngleOf {
    Identity,
    Rotation(AxisAngle),
}

impl AxisAngleOf {
    pub fn axis_angle(self) -> Option<AxisAngle> {
        match self {
            AxisAngleOf::Identity => None,
            AxisAngleOf::Rotation(aa) => Some(aa),
        }
    }
}

fn order_of_angle(angle: f64) -> RotationOrder {
    // smallest k with k·angle ≡ 0 (mod 2π)
    let turns = angle.abs() / (2.0 * PI);
    let tol = tolerance();
    for k in 1..=ORDER_SEARCH_CAP {
        let t = turns * f64::from(k);
        if (t - t.round()).abs() <= tol * f64::from(k) {
            return RotationOrder::Finite(k);
        }
    }
    RotationOrder::Infinite
}

pub fn axis_angle_of(r: &Rotation) -> AxisAngleOf {
    if r.is_identity() {
        return AxisAngleOf::Identity;
    }
    // use the representative with w ≥ 0 so the angle lands in (0, π]
    let sign = if r.w < 0.0 { -1.0 } else { 1.0 };
    let v = scale([r.x, r.y, r.z], sign);
    let s = norm(v);
    let mut angle = 2.0 * s.atan2(r.w.abs());
    let (canon, flipped) = canonical_sign(scale(v, 1.0 / s));
    if flipped {
        angle = -angle;
    }
    if (angle.abs() - PI).abs() <= tolerance() {
        angle = PI;
    }
    AxisAngleOf::Rotation(AxisAngle { axis: canon, angle, order: order_of_angle(angle) })
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match axis_angle_of(self) {
            AxisAngleOf::Identity => write!(f, "id"),
            AxisAngleOf::Rotation(aa) => write!(
                f,
                "{:.4}° about ({:.4}, {:.4}, {:.4})",
                aa.angle.to_degrees(),
                aa.axis[0],
                aa.axis[1],
                aa.axis[2]
            ),
        }
    }
}

type Key = [i64; 4];

const KEY_SCALE: f64 = 1e6;

fn base_key(r: &Rotation) -> (Key, [f64; 4]) {
    let c = r.components();
    let mut key = [0i64; 4];
    let mut frac = [0.0; 4];
    for i in 0..4 {
        let s = c[i] * KEY_SCALE;
        key[i] = s.floor() as i64;
        frac[i] = s - s.floor();
    }
    (key, frac)
}

/// Keys to probe for `r`: its own cell plus neighbours along coordinates that
/// sit close to a cell boundary, and the cells of `-r` when the leading
/// component is near zero (sign canonicalization is then unstable).
fn probe_keys(r: &Rotation) -> Vec<Key> {
    let mut out = Vec::with_capacity(2);
    for q in [*r, Rotation { w: -r.w, x: -r.x, y: -r.y, z: -r.z }] {
        let (key, frac) = base_key(&q);
        let mut keys = vec![key];
        for i in 0..4 {
            let delta = if frac[i] < 0.01 {
                -1
            } else if frac[i] > 0.99 {
                1
            } else {
                continue;
            };
            let extra: Vec<Key> = keys
                .iter()
                .map(|k| {
                    let mut k = *k;
                    k[i] += delta;
                    k
                })
                .collect();
            keys.extend(extra);
        }
        out.extend(keys);
    }
    out
}

/// Rounded-coordinate index over a list of rotations, confirmed with `eq`.
#[derive(Clone, Debug, Default)]
struct RotationIndex {
    cells: HashMap<Key, Vec<usize>>,
}

impl RotationIndex {
    fn insert(&mut self, r: &Rotation, idx: usize) {
        self.cells.entry(base_key(r).0).or_default().push(idx);
    }

    fn find(&self, r: &Rotation, elements: &[Rotation]) -> Option<usize> {
        probe_keys(r).iter().find_map(|k| {
            self.cells
                .get(k)
                .and_then(|ids| ids.iter().copied().find(|&i| eq(&elements[i], r)))
        })
    }
}

/// A finite subgroup of SO(3) given by its element list. The identity is
/// always at index 0.
#[derive(Clone, Debug)]
pub struct FiniteRotationGroup {
    elements: Vec<Rotation>,
    index: RotationIndex,
}

impl FiniteRotationGroup {
    pub fn trivial() -> FiniteRotationGroup {
        FiniteRotationGroup::from_elements_unchecked(vec![Rotation::IDENTITY])
    }

    /// Wraps an element list already known to be a group. The identity is
    /// moved to the front and duplicates are dropped.
    pub fn from_elements_unchecked(elements: Vec<Rotation>) -> FiniteRotationGroup {
        let mut group = FiniteRotationGroup { elements: Vec::new(), index: RotationIndex::default() };
        group.push_unique(Rotation::IDENTITY);
        for r in elements {
            group.push_unique(r);
        }
        group
    }

    fn push_unique(&mut self, r: Rotation) -> bool {
        if self.index.find(&r, &self.elements).is_some() {
            return false;
        }
        self.index.insert(&r, self.elements.len());
        self.elements.push(r);
        true
    }

    pub fn elements(&self) -> &[Rotation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, r: &Rotation) -> Option<usize> {
        self.index.find(r, &self.elements)
    }

    pub fn contains(&self, r: &Rotation) -> bool {
        self.index_of(r).is_some()
    }

    /// Element-set equality.
    pub fn same_elements(&self, other: &FiniteRotationGroup) -> bool {
        self.order() == other.order() && self.is_subset_of(other)
    }

    pub fn is_subset_of(&self, other: &FiniteRotationGroup) -> bool {
        self.elements.iter().all(|r| other.contains(r))
    }

    /// Re-checks closure under composition and inverse.
    pub fn is_closed(&self) -> bool {
        self.contains(&Rotation::IDENTITY)
            && self.elements.iter().all(|a| {
                self.contains(&a.inverse()) && self.elements.iter().all(|b| self.contains(&compose(a, b)))
            })
    }

    /// Elements satisfying `keep`; the caller guarantees they form a subgroup.
    pub fn filter<F: Fn(&Rotation) -> bool>(&self, keep: F) -> FiniteRotationGroup {
        FiniteRotationGroup::from_elements_unchecked(self.elements.iter().copied().filter(|r| keep(r)).collect())
    }

    pub fn conjugate_by(&self, g: &Rotation) -> FiniteRotationGroup {
        FiniteRotationGroup::from_elements_unchecked(self.elements.iter().map(|r| r.conjugate_by(g)).collect())
    }

    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index_of(&compose(a, b)).expect("group is closed"))
                    .collect()
            })
            .collect()
    }
}

/// Smallest composition-closed set containing `generators` and the identity.
pub fn close_group(generators: &[Rotation], cap: usize) -> Result<FiniteRotationGroup, RotationError> {
    let mut group = FiniteRotationGroup::from_elements_unchecked(Vec::new());
    let gens: Vec<Rotation> = generators.iter().copied().filter(|g| !g.is_identity()).collect();
    for g in &gens {
        group.push_unique(*g);
    }
    let mut frontier = 0;
    while frontier < group.elements.len() {
        let a = group.elements[frontier];
        for g in &gens {
            if group.push_unique(compose(&a, g)) && group.elements.len() > cap {
                return Err(RotationError::GroupTooLarge { cap });
            }
        }
        frontier += 1;
    }
    if group.order() > cap {
        return Err(RotationError::GroupTooLarge { cap });
    }
    Ok(group)
}
