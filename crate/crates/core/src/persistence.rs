//! Finite-type ℕ-indexed diagrams of finite posets.
//!
//! A [`PersistencePoset`] is stored as `P_0 → P_1 → … → P_T`; every index past
//! `T` repeats `P_T` with identity steps, so only finite-type diagrams are
//! representable. Maps between diagrams are padded to a common `T` on
//! construction.

use std::sync::Arc;

use thiserror::Error;

use crate::ext::ExtNat;
use crate::poset::{mapping_cylinder_sided, ElemId, FinitePoset, MonotoneMap, PosetError, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PersistenceError {
    #[error("{posets} posets need {expected} steps, found {steps}", expected = .posets.saturating_sub(1))]
    ArityMismatch { posets: usize, steps: usize },
    #[error("step {step}: {source}")]
    NonMonotoneStep { step: usize, source: PosetError },
    #[error("step {step} does not connect index {step} to index {next}", next = .step + 1)]
    StepEnds { step: usize },
    #[error("map needs {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("component {index}: {source}")]
    InvalidComponent { index: usize, source: PosetError },
    #[error("square at index {index} does not commute at element `{element}`")]
    NonCommutingSquare { index: usize, element: String },
    #[error("persistence poset is not a filtration")]
    NotAFiltration,
    #[error("not a persistence point: {0}")]
    NotAPersistencePoint(String),
    #[error("subsets at index {index} are not preserved by the structure map")]
    NotASubdiagram { index: usize },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// `P_0 → … → P_T`, constant from `T` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistencePoset {
    posets: Vec<Arc<FinitePoset>>,
    steps: Vec<MonotoneMap>,
    /// `composites[i][j - i]` is the assignment of `φ_{i,j}` for `i ≤ j ≤ T`.
    composites: Vec<Vec<Vec<ElemId>>>,
}

/// Quick facts reported when a diagram is validated.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DiagramSummary {
    pub stabilization: usize,
    pub sizes: Vec<usize>,
    pub is_filtration: bool,
    pub threshold: ExtNat,
    pub cardinality: usize,
}

impl PersistencePoset {
    /// Validates raw posets and step assignments (`steps[i]` sends ids of
    /// `posets[i]` to ids of `posets[i + 1]`).
    pub fn new(posets: Vec<FinitePoset>, steps: Vec<Vec<ElemId>>) -> Result<Self, PersistenceError> {
        if posets.is_empty() || steps.len() + 1 != posets.len() {
            return Err(PersistenceError::ArityMismatch {
                posets: posets.len(),
                steps: steps.len(),
            });
        }
        let posets: Vec<Arc<FinitePoset>> = posets.into_iter().map(Arc::new).collect();
        let steps = steps
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                MonotoneMap::new(posets[i].clone(), posets[i + 1].clone(), a)
                    .map_err(|source| PersistenceError::NonMonotoneStep { step: i, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::assemble(posets, steps))
    }

    /// Builds from already-validated maps whose ends must line up.
    pub fn from_maps(posets: Vec<Arc<FinitePoset>>, steps: Vec<MonotoneMap>) -> Result<Self, PersistenceError> {
        if posets.is_empty() || steps.len() + 1 != posets.len() {
            return Err(PersistenceError::ArityMismatch {
                posets: posets.len(),
                steps: steps.len(),
            });
        }
        for (i, s) in steps.iter().enumerate() {
            if **s.dom() != *posets[i] || **s.cod() != *posets[i + 1] {
                return Err(PersistenceError::StepEnds { step: i });
            }
        }
        Ok(Self::assemble(posets, steps))
    }

    /// The constant diagram on `p`.
    pub fn constant(p: FinitePoset) -> Self {
        Self::assemble(vec![Arc::new(p)], Vec::new())
    }

    /// A diagram whose steps are inclusions by element name.
    pub fn filtration_by_names(posets: Vec<FinitePoset>) -> Result<Self, PersistenceError> {
        let steps = posets
            .windows(2)
            .map(|w| {
                w[0].elements()
                    .iter()
                    .map(|e| w[1].id(e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(posets, steps)
    }

    fn assemble(posets: Vec<Arc<FinitePoset>>, steps: Vec<MonotoneMap>) -> Self {
        let t = steps.len();
        let composites = (0..=t)
            .map(|i| {
                let mut row = Vec::with_capacity(t + 1 - i);
                let mut current: Vec<ElemId> = (0..posets[i].len()).collect();
                row.push(current.clone());
                for s in &steps[i..] {
                    current = current.iter().map(|&x| s.apply(x)).collect();
                    row.push(current.clone());
                }
                row
            })
            .collect();
        PersistencePoset {
            posets,
            steps,
            composites,
        }
    }

    /// The stabilization index `T`.
    pub fn stabilization(&self) -> usize {
        self.steps.len()
    }

    /// `P_i`, with indices past `T` clamped.
    pub fn poset(&self, i: usize) -> &Arc<FinitePoset> {
        &self.posets[i.min(self.stabilization())]
    }

    pub fn posets(&self) -> &[Arc<FinitePoset>] {
        &self.posets
    }

    /// `σ_i : P_i → P_{i+1}` for `i < T`.
    pub fn step(&self, i: usize) -> Option<&MonotoneMap> {
        self.steps.get(i)
    }

    pub fn steps(&self) -> &[MonotoneMap] {
        &self.steps
    }

    /// Image of `x ∈ P_i` under `φ_{i,j}` (cached composite).
    pub fn push(&self, i: usize, j: usize, x: ElemId) -> ElemId {
        let t = self.stabilization();
        let (i, j) = (i.min(t), j.min(t));
        self.composites[i][j - i][x]
    }

    /// Assignment of `φ_{i,j}`, `i ≤ j`, from the cached composites.
    pub fn structure_map(&self, i: usize, j: usize) -> &[ElemId] {
        assert!(i <= j, "structure maps go forward");
        let t = self.stabilization();
        let (i, j) = (i.min(t), j.min(t));
        &self.composites[i][j - i]
    }

    /// Assignment of `φ_{i,j}` recomputed by folding the steps.
    pub fn structure_map_folded(&self, i: usize, j: usize) -> Vec<ElemId> {
        assert!(i <= j, "structure maps go forward");
        let t = self.stabilization();
        let (i, j) = (i.min(t), j.min(t));
        self.steps[i..j]
            .iter()
            .fold((0..self.posets[i].len()).collect(), |acc: Vec<ElemId>, s| {
                acc.iter().map(|&x| s.apply(x)).collect()
            })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.posets.iter().map(|p| p.len()).collect()
    }

    pub fn is_filtration(&self) -> bool {
        self.steps.iter().all(MonotoneMap::is_injective)
    }

    pub fn threshold(&self) -> ExtNat {
        self.posets
            .iter()
            .position(|p| !p.is_empty())
            .map_or(ExtNat::Inf, ExtNat::Fin)
    }

    pub fn is_empty(&self) -> bool {
        self.threshold() == ExtNat::Inf
    }

    /// `max_i |P_i|`.
    pub fn cardinality(&self) -> usize {
        self.posets.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn summary(&self) -> DiagramSummary {
        DiagramSummary {
            stabilization: self.stabilization(),
            sizes: self.sizes(),
            is_filtration: self.is_filtration(),
            threshold: self.threshold(),
            cardinality: self.cardinality(),
        }
    }

    /// The same diagram written out to stabilization index `t ≥ T`.
    pub fn padded(&self, t: usize) -> PersistencePoset {
        let cur = self.stabilization();
        if t <= cur {
            return self.clone();
        }
        let last = self.posets[cur].clone();
        let mut posets = self.posets.clone();
        let mut steps = self.steps.clone();
        for _ in cur..t {
            posets.push(last.clone());
            steps.push(MonotoneMap::identity(last.clone()));
        }
        Self::assemble(posets, steps)
    }

    /// `Y_i = X_{i+s}`.
    pub fn shifted(&self, s: usize) -> PersistencePoset {
        let t = self.stabilization();
        let s = s.min(t);
        Self::assemble(self.posets[s..].to_vec(), self.steps[s..].to_vec())
    }

    /// Index-wise opposite orders, same structure maps.
    pub fn dual(&self) -> PersistencePoset {
        let posets: Vec<Arc<FinitePoset>> = self.posets.iter().map(|p| Arc::new(p.dual())).collect();
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                MonotoneMap::with_ends(posets[i].clone(), posets[i + 1].clone(), s.assignment().to_vec())
            })
            .collect();
        Self::assemble(posets, steps)
    }

    /// The persistence subposet on `subsets[i] ⊆ P_i`; fails unless every step
    /// maps `subsets[i]` into `subsets[i + 1]`.
    pub fn subdiagram(&self, subsets: &[Vec<ElemId>]) -> Result<PersistencePoset, PersistenceError> {
        let t = self.stabilization();
        if subsets.len() != t + 1 {
            return Err(PersistenceError::ArityMismatch {
                posets: subsets.len(),
                steps: t,
            });
        }
        let mut posets = Vec::with_capacity(t + 1);
        let mut positions = Vec::with_capacity(t + 1);
        for (i, s) in subsets.iter().enumerate() {
            let mut ids = s.clone();
            ids.sort_unstable();
            ids.dedup();
            if ids.last().is_some_and(|&x| x >= self.posets[i].len()) {
                return Err(PosetError::UnknownElement(format!("#{}", ids.last().unwrap())).into());
            }
            let mut pos = vec![usize::MAX; self.posets[i].len()];
            for (k, &x) in ids.iter().enumerate() {
                pos[x] = k;
            }
            posets.push(Arc::new(self.posets[i].restrict_sorted(&ids)));
            positions.push((ids, pos));
        }
        let mut steps = Vec::with_capacity(t);
        for i in 0..t {
            let (ids, _) = &positions[i];
            let (_, next_pos) = &positions[i + 1];
            let assignment = ids
                .iter()
                .map(|&x| next_pos[self.steps[i].apply(x)])
                .collect::<Vec<_>>();
            if assignment.contains(&usize::MAX) {
                return Err(PersistenceError::NotASubdiagram { index: i });
            }
            steps.push(MonotoneMap::with_ends(posets[i].clone(), posets[i + 1].clone(), assignment));
        }
        Ok(Self::assemble(posets, steps))
    }

    /// `L_v`, `L̂_v`, `U_v` or `Û_v` of a persistence point, index-wise
    /// (empty where `v` is absent).
    pub fn principal_subdiagram(
        &self,
        v: &PersistencePoint,
        side: Side,
        strict: bool,
    ) -> Result<PersistencePoset, PersistenceError> {
        let v = PersistencePoint::from_track(self, v.track().to_vec())?;
        let subsets = (0..=self.stabilization())
            .map(|i| match v.at(i) {
                Some(x) => Ok(self.posets[i].principal_set(x, side, strict)?),
                None => Ok(Vec::new()),
            })
            .collect::<Result<Vec<_>, PersistenceError>>()?;
        self.subdiagram(&subsets)
    }

    /// Same elements (by name), the same order and the same structure maps at
    /// every index, ignoring element order.
    pub fn same_diagram_as(&self, other: &PersistencePoset) -> bool {
        let t = self.stabilization().max(other.stabilization());
        (0..=t).all(|i| self.poset(i).same_order_as(other.poset(i)))
            && (0..t).all(|i| {
                let (a, b) = (self.poset(i), self.poset(i + 1));
                let (c, d) = (other.poset(i), other.poset(i + 1));
                (0..a.len()).all(|x| {
                    let y = self.push(i, i + 1, x);
                    let x2 = c.index_of(a.name(x)).expect("same elements");
                    d.name(other.push(i, i + 1, x2)) == b.name(y)
                })
            })
    }
}

/// A persistence point: one element per index from its threshold on, each
/// the unique preimage of the next.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PersistencePoint {
    threshold: usize,
    track: Vec<Option<ElemId>>,
}

impl PersistencePoint {
    /// Reconstructs the track of the point that is `top ∈ P_T` at the
    /// stabilization index and first appears at `threshold`.
    pub fn new(host: &PersistencePoset, threshold: usize, top: ElemId) -> Result<Self, PersistenceError> {
        let t = host.stabilization();
        if threshold > t {
            return Err(PersistenceError::NotAPersistencePoint(format!(
                "threshold {threshold} exceeds stabilization index {t}"
            )));
        }
        if top >= host.poset(t).len() {
            return Err(PersistenceError::NotAPersistencePoint(format!("no element #{top} at index {t}")));
        }
        let mut track = vec![None; t + 1];
        track[t] = Some(top);
        for i in (threshold..t).rev() {
            let next = track[i + 1].expect("filled going down");
            match host.steps[i].preimage_of(next).as_slice() {
                [x] => track[i] = Some(*x),
                pre => {
                    return Err(PersistenceError::NotAPersistencePoint(format!(
                        "`{}` at index {} has {} preimages",
                        host.posets[i + 1].name(next),
                        i + 1,
                        pre.len()
                    )))
                }
            }
        }
        Self::from_track(host, track)
    }

    /// Checks an explicit track against `host`.
    ///
    /// Besides the singleton-preimage condition from the threshold on, the
    /// element at the threshold must have no preimage at all; otherwise
    /// removing the point would not restrict to a persistence subposet.
    pub fn from_track(host: &PersistencePoset, track: Vec<Option<ElemId>>) -> Result<Self, PersistenceError> {
        let t = host.stabilization();
        let bad = |msg: String| Err(PersistenceError::NotAPersistencePoint(msg));
        if track.len() != t + 1 {
            return bad(format!("track has length {}, expected {}", track.len(), t + 1));
        }
        let Some(threshold) = track.iter().position(Option::is_some) else {
            return bad("track is empty".into());
        };
        for (i, x) in track.iter().enumerate() {
            match *x {
                None if i >= threshold => return bad(format!("track vanishes at index {i}")),
                Some(x) if x >= host.posets[i].len() => return bad(format!("no element #{x} at index {i}")),
                _ => {}
            }
        }
        for i in 0..t {
            let Some(next) = track[i + 1] else { continue };
            let pre = host.steps[i].preimage_of(next);
            let expected: Vec<ElemId> = track[i].into_iter().collect();
            if pre != expected {
                return bad(format!(
                    "preimage of `{}` at index {} is not {{x_{i}}}",
                    host.posets[i + 1].name(next),
                    i + 1
                ));
            }
        }
        Ok(PersistencePoint { threshold, track })
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn track(&self) -> &[Option<ElemId>] {
        &self.track
    }

    /// Element at index `i` (clamped past `T`).
    pub fn at(&self, i: usize) -> Option<ElemId> {
        self.track[i.min(self.track.len() - 1)]
    }

    pub fn top(&self) -> ElemId {
        self.track.last().copied().flatten().expect("points are non-empty")
    }
}

/// One persistence point per element of `Q_T`, in element order.
pub fn enumerate_persistence_points(q: &PersistencePoset) -> Result<Vec<PersistencePoint>, PersistenceError> {
    if !q.is_filtration() {
        return Err(PersistenceError::NotAFiltration);
    }
    let t = q.stabilization();
    (0..q.poset(t).len())
        .map(|top| {
            let mut threshold = t;
            let mut current = top;
            while threshold > 0 {
                match q.steps[threshold - 1].preimage_of(current).first() {
                    Some(&x) => {
                        current = x;
                        threshold -= 1;
                    }
                    None => break,
                }
            }
            PersistencePoint::new(q, threshold, top)
        })
        .collect()
}

/// `(X ∖ v)_i = X_i ∖ v_i`.
pub fn remove_persistence_point(
    x: &PersistencePoset,
    v: &PersistencePoint,
) -> Result<PersistencePoset, PersistenceError> {
    let v = PersistencePoint::from_track(x, v.track().to_vec())?;
    let subsets: Vec<Vec<ElemId>> = (0..=x.stabilization())
        .map(|i| (0..x.poset(i).len()).filter(|&e| Some(e) != v.at(i)).collect())
        .collect();
    x.subdiagram(&subsets)
}

/// A strictly commuting map of persistence posets, both padded to the same `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistencePosetMap {
    source: PersistencePoset,
    target: PersistencePoset,
    components: Vec<MonotoneMap>,
}

impl PersistencePosetMap {
    /// `components[i]` assigns `P_i → Q_i` for `i = 0..=max(T_P, T_Q)`.
    pub fn new(
        source: PersistencePoset,
        target: PersistencePoset,
        components: Vec<Vec<ElemId>>,
    ) -> Result<Self, PersistenceError> {
        let t = source.stabilization().max(target.stabilization());
        if components.len() != t + 1 {
            return Err(PersistenceError::ComponentCount {
                expected: t + 1,
                found: components.len(),
            });
        }
        let source = source.padded(t);
        let target = target.padded(t);
        let components = components
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                MonotoneMap::new(source.poset(i).clone(), target.poset(i).clone(), a)
                    .map_err(|source| PersistenceError::InvalidComponent { index: i, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..t {
            let p = source.poset(i);
            for x in 0..p.len() {
                let up_then_across = components[i + 1].apply(source.push(i, i + 1, x));
                let across_then_up = target.push(i, i + 1, components[i].apply(x));
                if up_then_across != across_then_up {
                    return Err(PersistenceError::NonCommutingSquare {
                        index: i,
                        element: p.name(x).to_string(),
                    });
                }
            }
        }
        Ok(PersistencePosetMap {
            source,
            target,
            components,
        })
    }

    pub fn identity(x: &PersistencePoset) -> Self {
        let components = x.posets().iter().map(|p| MonotoneMap::identity(p.clone())).collect();
        PersistencePosetMap {
            source: x.clone(),
            target: x.clone(),
            components,
        }
    }

    pub fn source(&self) -> &PersistencePoset {
        &self.source
    }

    pub fn target(&self) -> &PersistencePoset {
        &self.target
    }

    pub fn stabilization(&self) -> usize {
        self.source.stabilization()
    }

    /// `f_i`, clamped past `T`.
    pub fn component(&self, i: usize) -> &MonotoneMap {
        &self.components[i.min(self.components.len() - 1)]
    }

    pub fn components(&self) -> &[MonotoneMap] {
        &self.components
    }

    /// The same map between the dual diagrams.
    pub fn dual(&self) -> PersistencePosetMap {
        let source = self.source.dual();
        let target = self.target.dual();
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| MonotoneMap::with_ends(source.poset(i).clone(), target.poset(i).clone(), c.assignment().to_vec()))
            .collect();
        PersistencePosetMap {
            source,
            target,
            components,
        }
    }
}

/// `f⁻¹(L_v)` (or `f⁻¹(U_v)`) index-wise, for a point `v` of the target.
pub fn persistence_fiber(
    f: &PersistencePosetMap,
    v: &PersistencePoint,
    side: Side,
) -> Result<PersistencePoset, PersistenceError> {
    let q = f.target();
    let v = PersistencePoint::from_track(q, v.track().to_vec())?;
    let subsets: Vec<Vec<ElemId>> = (0..=f.stabilization())
        .map(|i| match v.at(i) {
            None => Vec::new(),
            Some(y) => {
                let qi = q.poset(i);
                let mask: Vec<bool> = (0..qi.len())
                    .map(|u| match side {
                        Side::Lower => qi.leq(u, y),
                        Side::Upper => qi.leq(y, u),
                    })
                    .collect();
                f.component(i).preimage_mask(&mask)
            }
        })
        .collect();
    f.source().subdiagram(&subsets)
}

/// Index-wise mapping cylinder with its inclusions and retraction.
#[derive(Clone, Debug)]
pub struct PersistenceCylinder {
    pub poset: PersistencePoset,
    pub source_inclusion: PersistencePosetMap,
    pub target_inclusion: PersistencePosetMap,
    pub retraction: PersistencePosetMap,
}

/// `(M_f)_i = M_{f_i}`; see [`mapping_cylinder_sided`] for the two sides.
pub fn persistence_mapping_cylinder(
    f: &PersistencePosetMap,
    side: Side,
) -> Result<PersistenceCylinder, PersistenceError> {
    let t = f.stabilization();
    let cyls = (0..=t)
        .map(|i| mapping_cylinder_sided(f.component(i), side))
        .collect::<Result<Vec<_>, _>>()?;
    let posets: Vec<Arc<FinitePoset>> = cyls.iter().map(|c| c.poset.clone()).collect();
    let steps = (0..t)
        .map(|i| {
            let np = f.source().poset(i).len();
            let np_next = f.source().poset(i + 1).len();
            let nq = f.target().poset(i).len();
            let assignment = (0..np)
                .map(|x| f.source().push(i, i + 1, x))
                .chain((0..nq).map(|y| np_next + f.target().push(i, i + 1, y)))
                .collect();
            MonotoneMap::new(posets[i].clone(), posets[i + 1].clone(), assignment)
                .map_err(|source| PersistenceError::NonMonotoneStep { step: i, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let poset = PersistencePoset::from_maps(posets, steps)?;
    let source_inclusion = PersistencePosetMap {
        source: f.source().clone(),
        target: poset.clone(),
        components: cyls.iter().map(|c| c.dom_inclusion.clone()).collect(),
    };
    let target_inclusion = PersistencePosetMap {
        source: f.target().clone(),
        target: poset.clone(),
        components: cyls.iter().map(|c| c.cod_inclusion.clone()).collect(),
    };
    let retraction = PersistencePosetMap {
        source: poset.clone(),
        target: f.target().clone(),
        components: cyls.into_iter().map(|c| c.retraction).collect(),
    };
    Ok(PersistenceCylinder {
        poset,
        source_inclusion,
        target_inclusion,
        retraction,
    })
}
