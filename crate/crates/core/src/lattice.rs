//! Isotropy lattices: finite posets of classes ordered by subconjugation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::tag::{is_strictly_subconjugate, is_subconjugate, ClassTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice has no classes")]
    Empty,
    #[error("lattice has {} minimal classes ({}); an isotropy lattice has exactly one", .minima.len(), display_list(.minima))]
    NoUniqueMinimum { minima: Vec<ClassTag> },
    #[error("class {0} is not in the lattice")]
    ClassNotInLattice(ClassTag),
    #[error("declared relation {lower} < {upper} {reason}")]
    DeclaredOrderMismatch { lower: ClassTag, upper: ClassTag, reason: &'static str },
}

fn display_list(tags: &[ClassTag]) -> String {
    tags.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// A finite set of classes with the subconjugation order and its Hasse
/// diagram. Classes are kept sorted, which is a linear extension of the order,
/// so every Hasse edge `(i, j)` has `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyLattice {
    classes: Vec<ClassTag>,
    hasse: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct LatticeJson<'a> {
    classes: &'a [ClassTag],
    hasse: Vec<[usize; 2]>,
}

/// Builds an isotropy lattice; requires a unique minimal class.
pub fn build_lattice<I: IntoIterator<Item = ClassTag>>(classes: I) -> Result<IsotropyLattice, LatticeError> {
    let lattice = build_poset(classes)?;
    let minima = lattice.minimal_classes();
    if minima.len() != 1 {
        return Err(LatticeError::NoUniqueMinimum { minima });
    }
    Ok(lattice)
}

/// Builds the poset without requiring a unique minimum (used for restricted
/// sub-posets such as momentum lattices).
pub fn build_poset<I: IntoIterator<Item = ClassTag>>(classes: I) -> Result<IsotropyLattice, LatticeError> {
    let classes: Vec<ClassTag> = classes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.is_empty() {
        return Err(LatticeError::Empty);
    }
    let n = classes.len();
    let mut hasse = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if !is_strictly_subconjugate(classes[i], classes[j]) {
                continue;
            }
            let covered = (i + 1..j).any(|k| {
                is_strictly_subconjugate(classes[i], classes[k]) && is_strictly_subconjugate(classes[k], classes[j])
            });
            if !covered {
                hasse.push((i, j));
            }
        }
    }
    hasse.sort_unstable();
    Ok(IsotropyLattice { classes, hasse })
}

impl IsotropyLattice {
    pub fn classes(&self) -> &[ClassTag] {
        &self.classes
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, t: ClassTag) -> bool {
        self.classes.binary_search(&t).is_ok()
    }

    pub fn index_of(&self, t: ClassTag) -> Option<usize> {
        self.classes.binary_search(&t).ok()
    }

    /// `t ≤ s` for two classes of the lattice.
    pub fn leq(&self, t: ClassTag, s: ClassTag) -> bool {
        is_subconjugate(t, s)
    }

    pub fn minimal_classes(&self) -> Vec<ClassTag> {
        self.classes
            .iter()
            .copied()
            .filter(|&t| !self.classes.iter().any(|&s| is_strictly_subconjugate(s, t)))
            .collect()
    }

    /// The unique minimum, when there is one.
    pub fn minimum(&self) -> Option<ClassTag> {
        match self.minimal_classes().as_slice() {
            [m] => Some(*m),
            _ => None,
        }
    }

    pub fn maximal_classes(&self) -> Vec<ClassTag> {
        self.classes
            .iter()
            .copied()
            .filter(|&t| !self.classes.iter().any(|&s| is_strictly_subconjugate(t, s)))
            .collect()
    }

    /// Strict order relations as index pairs.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.classes.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| is_strictly_subconjugate(self.classes[i], self.classes[j]))
            .collect()
    }

    /// Transitive closure of the Hasse edges.
    pub fn hasse_closure(&self) -> BTreeSet<(usize, usize)> {
        let n = self.classes.len();
        let mut reach = vec![vec![false; n]; n];
        for &(i, j) in &self.hasse {
            reach[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| reach[i][j])
            .collect()
    }

    /// Checks user-declared strict relations: each must hold, and together they
    /// must generate the derived order under transitive closure (so both the
    /// full order and its Hasse diagram are accepted).
    pub fn check_declared_order(&self, declared: &[(ClassTag, ClassTag)]) -> Result<(), LatticeError> {
        let mut idx = Vec::with_capacity(declared.len());
        for &(lower, upper) in declared {
            let (Some(i), Some(j)) = (self.index_of(lower), self.index_of(upper)) else {
                return Err(LatticeError::DeclaredOrderMismatch { lower, upper, reason: "names a class outside the lattice" });
            };
            if !is_strictly_subconjugate(lower, upper) {
                return Err(LatticeError::DeclaredOrderMismatch { lower, upper, reason: "does not hold" });
            }
            idx.push((i, j));
        }
        let declared_closure = IsotropyLattice { classes: self.classes.clone(), hasse: idx }.hasse_closure();
        for (i, j) in self.order_pairs() {
            if !declared_closure.contains(&(i, j)) {
                return Err(LatticeError::DeclaredOrderMismatch {
                    lower: self.classes[i],
                    upper: self.classes[j],
                    reason: "holds but is not implied by the declared order",
                });
            }
        }
        Ok(())
    }

    /// JSON form `{"classes":[...],"hasse":[[i,j],...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(LatticeJson {
            classes: &self.classes,
            hasse: self.hasse.iter().map(|&(i, j)| [i, j]).collect(),
        })
        .expect("lattice serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Graphviz rendering of the Hasse diagram, minimum at the bottom.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for (i, t) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{t}\"];");
        }
        for &(i, j) in &self.hasse {
            let _ = writeln!(out, "  n{i} -> n{j};");
        }
        out.push_str("}\n");
        out
    }
}

/// Length of the longest covering chain from a minimal class to each class.
/// The minimum has depth zero.
pub fn compute_depths(lattice: &IsotropyLattice) -> BTreeMap<ClassTag, usize> {
    let mut depth = vec![0usize; lattice.len()];
    // edges are sorted by source and the class order is a linear extension
    let mut edges = lattice.hasse.clone();
    edges.sort_by_key(|&(_, j)| j);
    for (i, j) in edges {
        depth[j] = depth[j].max(depth[i] + 1);
    }
    lattice.classes.iter().copied().zip(depth).collect()
}

/// `{s ∈ L : t ≤ s}`.
pub fn up_set(lattice: &IsotropyLattice, t: ClassTag) -> Result<BTreeSet<ClassTag>, LatticeError> {
    if !lattice.contains(t) {
        return Err(LatticeError::ClassNotInLattice(t));
    }
    Ok(lattice.classes.iter().copied().filter(|&s| is_subconjugate(t, s)).collect())
}
