//! Finite posets, monotone maps and mapping cylinders.
//!
//! A [`FinitePoset`] keeps its elements in input order and stores the order
//! relation fully closed, so `leq` is a table lookup. Element ids are indices
//! into that order; names are only used at the edges (files, reports).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an element inside its poset.
pub type ElemId = usize;

/// Suffix appended to codomain element names inside a mapping cylinder.
pub const COD_TAG: &str = "@cod";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("relation cycle: `{0}` ≤ `{1}` and `{1}` ≤ `{0}`")]
    CycleDetected(String, String),
    #[error("map is not order-preserving: `{0}` ≤ `{1}` but their images are not related")]
    NonMonotone(String, String),
    #[error("assignment has {found} entries, domain has {expected} elements")]
    AssignmentLength { expected: usize, found: usize },
    #[error("element `{0}` has no image")]
    Unassigned(String),
}

/// Which principal set (or which half of a cylinder) an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Lower,
    Upper,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Lower => Side::Upper,
            Side::Upper => Side::Lower,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Minimal,
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<String>,
    index: HashMap<String, ElemId>,
    /// Row-major `n × n` table, `leq[x * n + y]` iff `x ≤ y`.
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Validates elements and generating pairs given by name, closing the
    /// relation reflexively and transitively.
    pub fn new<E, S, R>(elements: E, pairs: R) -> Result<Self, PosetError>
    where
        E: IntoIterator<Item = S>,
        S: Into<String>,
        R: IntoIterator<Item = (S, S)>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let index = build_index(&elements)?;
        let mut ids = Vec::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            let x = *index.get(&a).ok_or(PosetError::UnknownElement(a))?;
            let y = *index.get(&b).ok_or(PosetError::UnknownElement(b))?;
            ids.push((x, y));
        }
        Self::close(elements, index, &ids)
    }

    /// Same as [`FinitePoset::new`] with generating pairs given as indices.
    pub fn from_ids(elements: Vec<String>, pairs: &[(ElemId, ElemId)]) -> Result<Self, PosetError> {
        let index = build_index(&elements)?;
        let n = elements.len();
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= n || y >= n) {
            return Err(PosetError::UnknownElement(format!("#{}", x.max(y))));
        }
        Self::close(elements, index, pairs)
    }

    pub fn empty() -> Self {
        FinitePoset {
            elements: Vec::new(),
            index: HashMap::new(),
            leq: Vec::new(),
        }
    }

    /// A chain `names[0] < names[1] < …`.
    pub fn chain<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let elements: Vec<String> = names.into_iter().map(Into::into).collect();
        let pairs: Vec<_> = (1..elements.len()).map(|i| (i - 1, i)).collect();
        Self::from_ids(elements, &pairs).expect("a chain is a valid poset")
    }

    pub fn antichain<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self::from_ids(names.into_iter().map(Into::into).collect(), &[])
            .expect("an antichain is a valid poset")
    }

    fn close(
        elements: Vec<String>,
        index: HashMap<String, ElemId>,
        pairs: &[(ElemId, ElemId)],
    ) -> Result<Self, PosetError> {
        let n = elements.len();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            leq[x * n + x] = true;
        }
        for &(x, y) in pairs {
            leq[x * n + y] = true;
        }
        // Warshall
        for k in 0..n {
            for x in 0..n {
                if !leq[x * n + k] {
                    continue;
                }
                for y in 0..n {
                    if leq[k * n + y] {
                        leq[x * n + y] = true;
                    }
                }
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if leq[x * n + y] && leq[y * n + x] {
                    return Err(PosetError::CycleDetected(
                        elements[x].clone(),
                        elements[y].clone(),
                    ));
                }
            }
        }
        Ok(FinitePoset {
            elements,
            index,
            leq,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, x: ElemId) -> &str {
        &self.elements[x]
    }

    pub fn index_of(&self, name: &str) -> Option<ElemId> {
        self.index.get(name).copied()
    }

    pub fn id(&self, name: &str) -> Result<ElemId, PosetError> {
        self.index_of(name)
            .ok_or_else(|| PosetError::UnknownElement(name.to_string()))
    }

    fn check(&self, x: ElemId) -> Result<(), PosetError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(PosetError::UnknownElement(format!("#{x}")))
        }
    }

    #[inline]
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.leq[x * self.len() + y]
    }

    #[inline]
    pub fn lt(&self, x: ElemId, y: ElemId) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: ElemId, y: ElemId) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// All strict relations `x < y`, in row-major order.
    pub fn strict_relations(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| (0..n).filter(move |&y| self.lt(x, y)).map(move |y| (x, y)))
    }

    /// Cover relations of the Hasse diagram; a minimal generating set.
    pub fn covers(&self) -> Vec<(ElemId, ElemId)> {
        self.strict_relations()
            .filter(|&(x, y)| !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    /// `L_v`, `L̂_v`, `U_v` or `Û_v`, in element order.
    pub fn principal_set(&self, v: ElemId, side: Side, strict: bool) -> Result<Vec<ElemId>, PosetError> {
        self.check(v)?;
        Ok((0..self.len())
            .filter(|&u| !(strict && u == v))
            .filter(|&u| match side {
                Side::Lower => self.leq(u, v),
                Side::Upper => self.leq(v, u),
            })
            .collect())
    }

    pub fn extremal_elements(&self, which: Extremal) -> Vec<ElemId> {
        (0..self.len())
            .filter(|&v| {
                !(0..self.len()).any(|u| match which {
                    Extremal::Minimal => self.lt(u, v),
                    Extremal::Maximal => self.lt(v, u),
                })
            })
            .collect()
    }

    /// Restriction of the order to `subset` (taken as a set; element order is
    /// inherited from `self`).
    pub fn induced_subposet(&self, subset: &[ElemId]) -> Result<FinitePoset, PosetError> {
        let mut keep = vec![false; self.len()];
        for &x in subset {
            self.check(x)?;
            keep[x] = true;
        }
        let ids: Vec<ElemId> = (0..self.len()).filter(|&x| keep[x]).collect();
        Ok(self.restrict_sorted(&ids))
    }

    /// `ids` must be strictly increasing and in range.
    pub(crate) fn restrict_sorted(&self, ids: &[ElemId]) -> FinitePoset {
        let m = ids.len();
        let mut leq = vec![false; m * m];
        for (a, &x) in ids.iter().enumerate() {
            for (b, &y) in ids.iter().enumerate() {
                leq[a * m + b] = self.leq(x, y);
            }
        }
        let elements: Vec<String> = ids.iter().map(|&x| self.elements[x].clone()).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        FinitePoset {
            elements,
            index,
            leq,
        }
    }

    /// The opposite order on the same elements.
    pub fn dual(&self) -> FinitePoset {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = self.leq(y, x);
            }
        }
        FinitePoset {
            elements: self.elements.clone(),
            index: self.index.clone(),
            leq,
        }
    }

    /// Number of elements in a longest chain (0 for the empty poset).
    pub fn height(&self) -> usize {
        let order = self.linear_extension();
        let mut best = vec![1usize; self.len()];
        for (k, &y) in order.iter().enumerate() {
            for &x in &order[..k] {
                if self.lt(x, y) {
                    best[y] = best[y].max(best[x] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Elements sorted so that `x < y` implies `x` comes first; ties keep
    /// element order.
    pub fn linear_extension(&self) -> Vec<ElemId> {
        let mut ids: Vec<ElemId> = (0..self.len()).collect();
        let below = |x: ElemId| (0..self.len()).filter(|&u| self.lt(u, x)).count();
        ids.sort_by_key(|&x| (below(x), x));
        ids
    }

    /// Same elements and the same order, ignoring element order.
    pub fn same_order_as(&self, other: &FinitePoset) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let Some(map) = self
            .elements
            .iter()
            .map(|e| other.index_of(e))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        (0..self.len()).all(|x| (0..self.len()).all(|y| self.leq(x, y) == other.leq(map[x], map[y])))
    }
}

fn build_index(elements: &[String]) -> Result<HashMap<String, ElemId>, PosetError> {
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(PosetError::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

/// An order-preserving map between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    dom: Arc<FinitePoset>,
    cod: Arc<FinitePoset>,
    assignment: Vec<ElemId>,
}

impl MonotoneMap {
    pub fn new(
        dom: Arc<FinitePoset>,
        cod: Arc<FinitePoset>,
        assignment: Vec<ElemId>,
    ) -> Result<Self, PosetError> {
        if assignment.len() != dom.len() {
            return Err(PosetError::AssignmentLength {
                expected: dom.len(),
                found: assignment.len(),
            });
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= cod.len()) {
            return Err(PosetError::UnknownElement(format!("#{y}")));
        }
        for x in 0..dom.len() {
            for y in 0..dom.len() {
                if dom.lt(x, y) && !cod.leq(assignment[x], assignment[y]) {
                    return Err(PosetError::NonMonotone(
                        dom.name(x).to_string(),
                        dom.name(y).to_string(),
                    ));
                }
            }
        }
        Ok(MonotoneMap {
            dom,
            cod,
            assignment,
        })
    }

    /// Builds a map from `(source name, target name)` pairs covering the domain.
    pub fn from_names<'a>(
        dom: Arc<FinitePoset>,
        cod: Arc<FinitePoset>,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, PosetError> {
        let mut assignment = vec![None; dom.len()];
        for (a, b) in pairs {
            assignment[dom.id(a)?] = Some(cod.id(b)?);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| PosetError::Unassigned(dom.name(x).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dom, cod, assignment)
    }

    pub fn identity(poset: Arc<FinitePoset>) -> Self {
        let assignment = (0..poset.len()).collect();
        MonotoneMap {
            dom: poset.clone(),
            cod: poset,
            assignment,
        }
    }

    pub fn dom(&self) -> &Arc<FinitePoset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinitePoset> {
        &self.cod
    }

    pub fn assignment(&self) -> &[ElemId] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, x: ElemId) -> ElemId {
        self.assignment[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MonotoneMap) -> MonotoneMap {
        debug_assert_eq!(*self.cod, *next.dom);
        MonotoneMap {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            assignment: self.assignment.iter().map(|&y| next.apply(y)).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.assignment
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// Elements of the domain whose image lies in `targets` (a membership mask
    /// over the codomain).
    pub fn preimage_mask(&self, targets: &[bool]) -> Vec<ElemId> {
        (0..self.dom.len())
            .filter(|&x| targets[self.assignment[x]])
            .collect()
    }

    pub fn preimage_of(&self, y: ElemId) -> Vec<ElemId> {
        (0..self.dom.len())
            .filter(|&x| self.assignment[x] == y)
            .collect()
    }

    /// The same assignment between the dual posets.
    pub fn dual(&self) -> MonotoneMap {
        MonotoneMap {
            dom: Arc::new(self.dom.dual()),
            cod: Arc::new(self.cod.dual()),
            assignment: self.assignment.clone(),
        }
    }

    pub(crate) fn with_ends(
        dom: Arc<FinitePoset>,
        cod: Arc<FinitePoset>,
        assignment: Vec<ElemId>,
    ) -> Self {
        debug_assert!(MonotoneMap::new(dom.clone(), cod.clone(), assignment.clone()).is_ok());
        MonotoneMap {
            dom,
            cod,
            assignment,
        }
    }
}

/// A mapping cylinder together with its structure maps.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub poset: Arc<FinitePoset>,
    pub dom_inclusion: MonotoneMap,
    pub cod_inclusion: MonotoneMap,
    pub retraction: MonotoneMap,
}

/// `M_f` on `dom ⊔ cod`: domain elements first, codomain elements renamed
/// with [`COD_TAG`]. With [`Side::Lower`], `x ≤ y` for `x ∈ dom, y ∈ cod` iff
/// `f(x) ≤ y`. [`Side::Upper`] builds the dual construction, where `y ≤ x`
/// iff `y ≤ f(x)`; it is the cylinder used for removals from the top.
pub fn mapping_cylinder_sided(f: &MonotoneMap, side: Side) -> Result<Cylinder, PosetError> {
    let p = f.dom();
    let q = f.cod();
    let (np, nq) = (p.len(), q.len());
    let n = np + nq;
    let mut elements: Vec<String> = p.elements().to_vec();
    elements.extend(q.elements().iter().map(|e| format!("{e}{COD_TAG}")));
    let index = build_index(&elements)?;

    let mut leq = vec![false; n * n];
    for x in 0..np {
        for y in 0..np {
            leq[x * n + y] = p.leq(x, y);
        }
    }
    for x in 0..nq {
        for y in 0..nq {
            leq[(np + x) * n + np + y] = q.leq(x, y);
        }
    }
    for x in 0..np {
        for y in 0..nq {
            match side {
                Side::Lower => leq[x * n + np + y] = q.leq(f.apply(x), y),
                Side::Upper => leq[(np + y) * n + x] = q.leq(y, f.apply(x)),
            }
        }
    }
    let poset = Arc::new(FinitePoset {
        elements,
        index,
        leq,
    });
    let dom_inclusion = MonotoneMap::with_ends(p.clone(), poset.clone(), (0..np).collect());
    let cod_inclusion = MonotoneMap::with_ends(q.clone(), poset.clone(), (np..n).collect());
    let retraction = MonotoneMap::with_ends(
        poset.clone(),
        q.clone(),
        f.assignment().iter().copied().chain(0..nq).collect(),
    );
    Ok(Cylinder {
        poset,
        dom_inclusion,
        cod_inclusion,
        retraction,
    })
}

pub fn mapping_cylinder(f: &MonotoneMap) -> Result<Cylinder, PosetError> {
    mapping_cylinder_sided(f, Side::Lower)
}
