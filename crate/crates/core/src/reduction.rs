//! Point-by-point reduction of a mapping cylinder onto its source, with the
//! interleaving bookkeeping for each removal.
//!
//! For `f : P → Q` the cylinder `M_f` contains `P` and `Q`. Removing the
//! points of `Q` one at a time in a linear extension (minimal-first on the
//! lower side, maximal-first on the upper side) leaves exactly `P`, and at
//! each removal the strict lower (upper) set of the removed point is the
//! fiber of `f` over it. The cost of each removal is bounded through the
//! acyclicity of that fiber.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{acyclicity_measure, interval_decomposition, min_interleaving_eps, Acyclicity, Barcode, BarcodeError};
use crate::ext::ExtNat;
use crate::field::Prime;
use crate::homology::persistence_modules;
use crate::persistence::{
    enumerate_persistence_points, persistence_fiber, persistence_mapping_cylinder, remove_persistence_point,
    PersistenceError, PersistencePoint, PersistencePoset, PersistencePosetMap,
};
use crate::poset::{ElemId, Side, COD_TAG};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("target is not a filtration")]
    TargetNotFiltration,
    #[error("diagrams differ by more than one persistence point")]
    ShapeMismatch,
    #[error("strict {side} set of `{point}` in the cylinder differs from its fiber")]
    FiberMismatch { point: String, side: &'static str },
    #[error("residual after all removals is not the source")]
    ResidualMismatch,
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "hypothesis-failed")]
    HypothesisFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::HypothesisFailed => "hypothesis-failed",
        }
    }

    /// Process exit code for this verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::HypothesisFailed => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCheck {
    pub ok: bool,
    /// `d_I(H_j(before), H_j(after))` for `j ≤ max_degree`.
    pub distances: Vec<ExtNat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Name of the point in `Q_T`.
    pub point: String,
    pub threshold: usize,
    /// `|fiber_i|` for `i = 0..=T`.
    pub fiber_sizes: Vec<usize>,
    pub eps: ExtNat,
    pub fiber_empty: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub step: Option<StepCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLedger {
    pub side: Side,
    pub prime: Prime,
    pub max_degree: usize,
    pub target_cardinality: usize,
    pub entries: Vec<LedgerEntry>,
    pub eps_max: ExtNat,
    pub sum2eps: ExtNat,
    pub bound_main: ExtNat,
    pub bound_prior: ExtNat,
    /// `d_I(H_j(P), H_j(Q))` for `j ≤ max_degree`.
    pub measured: Vec<ExtNat>,
}

impl ReductionLedger {
    pub fn hypothesis_holds(&self) -> bool {
        self.entries.iter().all(|e| e.eps.is_finite())
    }

    pub fn steps_ok(&self) -> Option<bool> {
        self.entries
            .iter()
            .map(|e| e.step.as_ref().map(|s| s.ok))
            .collect::<Option<Vec<bool>>>()
            .map(|v| v.into_iter().all(|ok| ok))
    }
}

/// Acyclicity of `L̂_v` (lower) or `Û_v` (upper) inside `X`.
pub fn reducibility_measure(
    x: &PersistencePoset,
    v: &PersistencePoint,
    side: Side,
    p: Prime,
    max_degree: usize,
) -> Result<Acyclicity, ReductionError> {
    let sub = x.principal_subdiagram(v, side, true)?;
    Ok(acyclicity_measure(&sub, p, max_degree)?)
}

/// Elements of `Q_T` in removal order: minimal-first for the lower side,
/// maximal-first for the upper side, ties by name.
fn removal_order(q: &PersistencePoset, side: Side) -> Vec<ElemId> {
    let top = q.poset(q.stabilization());
    let mut left: Vec<ElemId> = (0..top.len()).collect();
    let mut order = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .filter(|&(_, &x)| {
                !left.iter().any(|&y| match side {
                    Side::Lower => top.lt(y, x),
                    Side::Upper => top.lt(x, y),
                })
            })
            .min_by(|a, b| top.name(*a.1).cmp(top.name(*b.1)))
            .expect("a finite poset has extremal elements");
        order.push(left.remove(k));
    }
    order
}

/// The image of a point of `Q` inside the (partially reduced) cylinder.
fn point_in_cylinder(
    q: &PersistencePoset,
    v: &PersistencePoint,
    cyl: &PersistencePoset,
) -> Result<PersistencePoint, PersistenceError> {
    let track = (0..=cyl.stabilization())
        .map(|i| {
            v.at(i)
                .map(|y| cyl.poset(i).id(&format!("{}{COD_TAG}", q.poset(i).name(y))))
                .transpose()
        })
        .collect::<Result<Vec<_>, _>>()?;
    PersistencePoint::from_track(cyl, track)
}

/// Per-degree distances between two diagrams' homology.
pub fn homology_distances(
    a: &PersistencePoset,
    b: &PersistencePoset,
    p: Prime,
    max_degree: usize,
) -> Result<Vec<ExtNat>, ReductionError> {
    let ma = persistence_modules(a, p, max_degree).map_err(BarcodeError::from)?;
    let mb = persistence_modules(b, p, max_degree).map_err(BarcodeError::from)?;
    ma.iter()
        .zip(&mb)
        .map(|(x, y)| Ok(min_interleaving_eps(x, y)?))
        .collect()
}

fn barcodes(x: &PersistencePoset, p: Prime, max_degree: usize) -> Result<Vec<Barcode>, ReductionError> {
    persistence_modules(x, p, max_degree)
        .map_err(BarcodeError::from)?
        .iter()
        .map(|m| Ok(interval_decomposition(m)?))
        .collect()
}

/// Checks one removal: `d_I(H_j(before), H_j(after)) ≤ 2ε_v` in every degree.
pub fn verify_step_bound(
    before: &PersistencePoset,
    after: &PersistencePoset,
    eps_v: ExtNat,
    p: Prime,
    max_degree: usize,
) -> Result<StepCheck, ReductionError> {
    let t = before.stabilization().max(after.stabilization());
    let (b, a) = (before.padded(t), after.padded(t));
    let drops: Vec<usize> = (0..=t)
        .map(|i| b.poset(i).len().checked_sub(a.poset(i).len()))
        .collect::<Option<Vec<_>>>()
        .ok_or(ReductionError::ShapeMismatch)?;
    let monotone_step = drops.windows(2).all(|w| w[0] <= w[1]);
    if drops[t] != 1 || drops.iter().any(|&d| d > 1) || !monotone_step {
        return Err(ReductionError::ShapeMismatch);
    }
    let distances = homology_distances(&b, &a, p, max_degree)?;
    let bound = ExtNat::Fin(2) * eps_v;
    Ok(StepCheck {
        ok: distances.iter().all(|&d| d <= bound),
        distances,
    })
}

/// Runs the removal schedule on `M_f` and fills in the ledger.
pub fn reduction_schedule(
    f: &PersistencePosetMap,
    side: Side,
    p: Prime,
    max_degree: usize,
    verify_steps: bool,
) -> Result<ReductionLedger, ReductionError> {
    let q = f.target();
    if !q.is_filtration() {
        return Err(ReductionError::TargetNotFiltration);
    }
    let cylinder = persistence_mapping_cylinder(f, side)?;
    let points = enumerate_persistence_points(q)?;
    let mut current = cylinder.poset;
    let mut entries = Vec::with_capacity(points.len());

    for top in removal_order(q, side) {
        let v = &points[top];
        let fiber = persistence_fiber(f, v, side)?;
        let acyc = acyclicity_measure(&fiber, p, max_degree)?;

        let w = point_in_cylinder(q, v, &current)?;
        let strict = current.principal_subdiagram(&w, side, true)?;
        let name = q.poset(q.stabilization()).name(top).to_string();
        if !strict.same_diagram_as(&fiber) {
            return Err(ReductionError::FiberMismatch { point: name, side: side.as_str() });
        }

        let next = remove_persistence_point(&current, &w)?;
        let step = if verify_steps {
            Some(verify_step_bound(&current, &next, acyc.eps, p, max_degree)?)
        } else {
            None
        };
        entries.push(LedgerEntry {
            point: name,
            threshold: v.threshold(),
            fiber_sizes: fiber.sizes(),
            eps: acyc.eps,
            fiber_empty: acyc.empty_input,
            step,
        });
        current = next;
    }

    if !current.same_diagram_as(f.source()) {
        return Err(ReductionError::ResidualMismatch);
    }

    let eps_max = entries.iter().map(|e| e.eps).max().unwrap_or(ExtNat::ZERO);
    let sum = entries.iter().fold(ExtNat::ZERO, |acc, e| acc + e.eps);
    let card = ExtNat::Fin(q.cardinality());
    let bound_main = ExtNat::Fin(2) * eps_max * card;
    Ok(ReductionLedger {
        side,
        prime: p,
        max_degree,
        target_cardinality: q.cardinality(),
        entries,
        eps_max,
        sum2eps: ExtNat::Fin(2) * sum,
        bound_main,
        bound_prior: ExtNat::Fin(2) * bound_main,
        measured: homology_distances(f.source(), q, p, max_degree)?,
    })
}

/// `H_j(M_f)` and `H_j(Q)` have equal barcodes for `j ≤ max_degree`, for
/// both cylinder constructions.
pub fn cylinder_equivalence_check(f: &PersistencePosetMap, p: Prime, max_degree: usize) -> Result<bool, ReductionError> {
    let target = barcodes(f.target(), p, max_degree)?;
    for side in [Side::Lower, Side::Upper] {
        let cyl = persistence_mapping_cylinder(f, side)?;
        if barcodes(&cyl.poset, p, max_degree)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainBoundReport {
    pub ledger: ReductionLedger,
    pub cylinder_equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps_ok: Option<bool>,
    pub verdict: Verdict,
}

/// Runs the schedule and decides whether `d_I(H_j(P), H_j(Q)) ≤ 2ε|Q|`.
pub fn verify_main_bound(
    f: &PersistencePosetMap,
    side: Side,
    p: Prime,
    max_degree: usize,
    verify_steps: bool,
) -> Result<MainBoundReport, ReductionError> {
    let ledger = reduction_schedule(f, side, p, max_degree, verify_steps)?;
    let cylinder_equivalent = cylinder_equivalence_check(f, p, max_degree)?;
    let steps_ok = if verify_steps { ledger.steps_ok() } else { None };
    let verdict = if !ledger.hypothesis_holds() {
        Verdict::HypothesisFailed
    } else if ledger.measured.iter().all(|&d| d <= ledger.bound_main) && cylinder_equivalent && steps_ok != Some(false) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MainBoundReport { ledger, cylinder_equivalent, steps_ok, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::FinitePoset;

    fn constant(p: FinitePoset) -> PersistencePoset {
        PersistencePoset::constant(p)
    }

    fn ids(dom: &PersistencePoset, cod: &PersistencePoset, pairs: &[(&str, &str)]) -> Vec<ElemId> {
        let t = dom.stabilization();
        let (d, c) = (dom.poset(t), cod.poset(t));
        let mut out = vec![usize::MAX; d.len()];
        for (a, b) in pairs {
            out[d.id(a).unwrap()] = c.id(b).unwrap();
        }
        out
    }

    fn diamond() -> FinitePoset {
        FinitePoset::new(["b", "l", "r", "t"], [("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")]).unwrap()
    }

    fn p2() -> Prime {
        Prime::TWO
    }

    #[test]
    fn reducibility_examples() {
        let chain = constant(FinitePoset::chain(["a", "b", "c"]));
        let pts = enumerate_persistence_points(&chain).unwrap();
        let top = reducibility_measure(&chain, &pts[2], Side::Lower, p2(), 2).unwrap();
        assert_eq!(top.eps, ExtNat::ZERO);
        let bottom = reducibility_measure(&chain, &pts[0], Side::Lower, p2(), 2).unwrap();
        assert_eq!((bottom.eps, bottom.empty_input), (ExtNat::Inf, true));

        let split = FinitePoset::new(["l", "r", "t"], [("l", "t"), ("r", "t")]).unwrap();
        let joined = FinitePoset::new(["l", "r", "t"], [("l", "r"), ("r", "t")]).unwrap();
        let x = PersistencePoset::filtration_by_names(vec![split, joined]).unwrap();
        let pts = enumerate_persistence_points(&x).unwrap();
        let t = x.poset(1).id("t").unwrap();
        assert_eq!(reducibility_measure(&x, &pts[t], Side::Lower, p2(), 2).unwrap().eps, ExtNat::Fin(1));
    }

    #[test]
    fn identity_on_chain() {
        let q = constant(FinitePoset::chain(["a", "b"]));
        let f = PersistencePosetMap::identity(&q);
        let report = verify_main_bound(&f, Side::Lower, p2(), 2, true).unwrap();
        let l = &report.ledger;
        assert!(l.entries.iter().all(|e| e.eps == ExtNat::ZERO));
        assert_eq!(l.bound_main, ExtNat::ZERO);
        assert_eq!(l.measured, vec![ExtNat::ZERO; 3]);
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(l.entries.iter().map(|e| e.point.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        let upper = reduction_schedule(&f, Side::Upper, p2(), 2, false).unwrap();
        assert_eq!(upper.entries.iter().map(|e| e.point.as_str()).collect::<Vec<_>>(), ["b", "a"]);
    }

    #[test]
    fn diamond_onto_chain() {
        let p = constant(diamond());
        let q = constant(FinitePoset::chain(["q1", "q2"]));
        let a = ids(&p, &q, &[("b", "q1"), ("l", "q2"), ("r", "q2"), ("t", "q2")]);
        let f = PersistencePosetMap::new(p, q, vec![a]).unwrap();
        let report = verify_main_bound(&f, Side::Lower, Prime::new(3).unwrap(), 2, true).unwrap();
        assert!(report.ledger.entries.iter().all(|e| e.eps == ExtNat::ZERO));
        assert_eq!(report.ledger.measured, vec![ExtNat::ZERO; 3]);
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.steps_ok, Some(true));
    }

    #[test]
    fn delayed_merge_in_top_fiber() {
        let split = FinitePoset::new(["x", "y", "z"], [("x", "z")]).unwrap();
        let merged = FinitePoset::new(["x", "y", "z"], [("x", "z"), ("y", "z")]).unwrap();
        let p = PersistencePoset::filtration_by_names(vec![split, merged]).unwrap();
        let q = constant(FinitePoset::chain(["q1", "q2"])).padded(1);
        let a = ids(&p, &q, &[("x", "q1"), ("y", "q2"), ("z", "q2")]);
        let f = PersistencePosetMap::new(p, q, vec![a.clone(), a]).unwrap();
        let report = verify_main_bound(&f, Side::Lower, p2(), 2, true).unwrap();
        let l = &report.ledger;
        assert_eq!(l.eps_max, ExtNat::Fin(1));
        assert_eq!(l.target_cardinality, 2);
        assert_eq!(l.bound_main, ExtNat::Fin(4));
        assert_eq!(l.bound_prior, ExtNat::Fin(8));
        assert!(l.measured.iter().all(|&d| d <= ExtNat::Fin(4)));
        assert!(l.measured.iter().all(|&d| d <= l.sum2eps));
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn empty_fiber_fails_hypothesis() {
        let p = constant(FinitePoset::antichain(["x"]));
        let q = constant(FinitePoset::chain(["q1", "q2"]));
        let a = ids(&p, &q, &[("x", "q2")]);
        let f = PersistencePosetMap::new(p, q, vec![a]).unwrap();
        let report = verify_main_bound(&f, Side::Lower, p2(), 1, false).unwrap();
        assert_eq!(report.verdict, Verdict::HypothesisFailed);
        assert!(report.ledger.entries[0].fiber_empty);
        assert_eq!(report.ledger.bound_main, ExtNat::Inf);
    }

    #[test]
    fn fiber_born_after_its_point() {
        let q = constant(FinitePoset::antichain(["v"])).padded(5);
        let mut posets = vec![FinitePoset::empty(); 5];
        posets.push(FinitePoset::antichain(["c"]));
        let p = PersistencePoset::filtration_by_names(posets).unwrap();
        let comps = (0..=5).map(|i| if i < 5 { vec![] } else { vec![0] }).collect();
        let f = PersistencePosetMap::new(p, q, comps).unwrap();
        let report = verify_main_bound(&f, Side::Lower, p2(), 1, true).unwrap();
        assert_eq!(report.ledger.eps_max, ExtNat::ZERO);
        assert_eq!(report.ledger.measured[0], ExtNat::Fin(5));
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn step_shape_checks() {
        let q = constant(FinitePoset::chain(["a", "b", "c"]));
        let pts = enumerate_persistence_points(&q).unwrap();
        let one = remove_persistence_point(&q, &pts[2]).unwrap();
        let two = remove_persistence_point(&one, &enumerate_persistence_points(&one).unwrap()[1]).unwrap();
        assert!(verify_step_bound(&q, &one, ExtNat::ZERO, p2(), 1).unwrap().ok);
        assert_eq!(verify_step_bound(&q, &two, ExtNat::ZERO, p2(), 1), Err(ReductionError::ShapeMismatch));
        assert_eq!(verify_step_bound(&one, &q, ExtNat::ZERO, p2(), 1), Err(ReductionError::ShapeMismatch));
    }

    #[test]
    fn cylinder_examples() {
        let p = constant(FinitePoset::antichain(["p"]));
        let q = constant(FinitePoset::antichain(["q"]));
        let f = PersistencePosetMap::new(p, q.clone(), vec![vec![0]]).unwrap();
        assert!(cylinder_equivalence_check(&f, p2(), 2).unwrap());
        let empty = constant(FinitePoset::empty());
        let g = PersistencePosetMap::new(empty, q, vec![vec![]]).unwrap();
        assert!(cylinder_equivalence_check(&g, p2(), 2).unwrap());
    }

    #[test]
    fn non_filtration_target_is_rejected() {
        let two = FinitePoset::antichain(["a", "b"]);
        let one = FinitePoset::antichain(["c"]);
        let q = PersistencePoset::new(vec![two.clone(), one], vec![vec![0, 0]]).unwrap();
        let p = PersistencePoset::new(vec![two.clone(), two], vec![vec![0, 1]]).unwrap();
        let f = PersistencePosetMap::new(p, q, vec![vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(
            reduction_schedule(&f, Side::Lower, p2(), 1, false),
            Err(ReductionError::TargetNotFiltration)
        );
    }
}
