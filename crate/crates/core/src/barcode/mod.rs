//! Barcodes of finite-type persistence modules, bottleneck distance, and the
//! acyclicity measure of persistence posets.

mod matching;
pub mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::ExtNat;
use crate::field::{FieldMatrix, Prime};
use crate::homology::{persistence_modules, HomologyError};
use crate::module::PersistenceModule;
use crate::persistence::PersistencePoset;

pub use matching::bottleneck_distance;
pub use oracle::{brute_force_interleaving_check, least_interleaving_eps, OracleError, DEFAULT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarcodeError {
    #[error("interval [{birth}, {death}) is empty")]
    EmptyInterval { birth: usize, death: ExtNat },
    #[error("interval [{birth}, {death}) ends past T = {t}")]
    PastStabilization { birth: usize, death: usize, t: usize },
    #[error("negative multiplicity {value} for [{birth}, {death})")]
    NegativeMultiplicity { birth: usize, death: ExtNat, value: i64 },
    #[error("modules over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// `[birth, death)`; `death = ∞` for classes alive at `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(usize, ExtNat)", try_from = "(usize, ExtNat)")]
pub struct Interval {
    pub birth: usize,
    pub death: ExtNat,
}

impl Interval {
    pub fn new(birth: usize, death: ExtNat) -> Result<Self, BarcodeError> {
        if death <= ExtNat::Fin(birth) {
            return Err(BarcodeError::EmptyInterval { birth, death });
        }
        Ok(Interval { birth, death })
    }

    pub fn finite(birth: usize, death: usize) -> Self {
        Self::new(birth, ExtNat::Fin(death)).expect("birth < death")
    }

    pub fn infinite(birth: usize) -> Self {
        Interval { birth, death: ExtNat::Inf }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.birth <= i && ExtNat::Fin(i) < self.death
    }

    /// `⌈(d − b)/2⌉`, the cost of matching to the diagonal.
    pub fn deletion_cost(&self) -> ExtNat {
        match self.death {
            ExtNat::Fin(d) => ExtNat::Fin((d - self.birth).div_ceil(2)),
            ExtNat::Inf => ExtNat::Inf,
        }
    }
}

impl From<Interval> for (usize, ExtNat) {
    fn from(i: Interval) -> Self {
        (i.birth, i.death)
    }
}

impl TryFrom<(usize, ExtNat)> for Interval {
    type Error = BarcodeError;
    fn try_from((b, d): (usize, ExtNat)) -> Result<Self, BarcodeError> {
        Interval::new(b, d)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.birth, self.death)
    }
}

/// A multiset of intervals over `0..=T`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Barcode {
    #[serde(rename = "T")]
    t: usize,
    intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(t: usize, mut intervals: Vec<Interval>) -> Result<Self, BarcodeError> {
        for iv in &intervals {
            if let ExtNat::Fin(d) = iv.death {
                if d > t {
                    return Err(BarcodeError::PastStabilization { birth: iv.birth, death: d, t });
                }
            }
        }
        intervals.sort_unstable();
        Ok(Barcode { t, intervals })
    }

    pub fn empty(t: usize) -> Self {
        Barcode { t, intervals: Vec::new() }
    }

    pub fn stabilization(&self) -> usize {
        self.t
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Same intervals read over a larger `T`.
    pub fn padded(&self, t: usize) -> Self {
        Barcode { t: t.max(self.t), intervals: self.intervals.clone() }
    }

    /// Number of intervals containing both `i` and `j`.
    pub fn rank(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(self.t), j.min(self.t));
        self.intervals
            .iter()
            .filter(|iv| iv.contains(i) && iv.contains(j))
            .count()
    }

    /// The direct sum of interval modules.
    pub fn to_module(&self, p: Prime) -> PersistenceModule {
        let t = self.t;
        let alive = |i: usize| -> Vec<usize> {
            (0..self.intervals.len()).filter(|&k| self.intervals[k].contains(i)).collect()
        };
        let layers: Vec<Vec<usize>> = (0..=t).map(alive).collect();
        let steps = (0..t)
            .map(|i| {
                let mut m = FieldMatrix::zeros(p, layers[i + 1].len(), layers[i].len());
                for (c, k) in layers[i].iter().enumerate() {
                    if let Ok(r) = layers[i + 1].binary_search(k) {
                        m.set(r, c, 1);
                    }
                }
                m
            })
            .collect();
        PersistenceModule::new(p, layers.iter().map(Vec::len).collect(), steps).expect("interval shapes")
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{iv}")?;
        }
        f.write_str("}")
    }
}

/// `rank φ_{i,j}`; indices past `T` act as `T`.
pub fn rank_invariant(m: &PersistenceModule, i: usize, j: usize) -> usize {
    m.rank(i, j)
}

/// Barcode by inclusion–exclusion on the rank invariant.
pub fn interval_decomposition(m: &PersistenceModule) -> Result<Barcode, BarcodeError> {
    let t = m.stabilization();
    let ranks: Vec<Vec<i64>> = (0..=t)
        .map(|i| (0..=t).map(|j| if j < i { 0 } else { m.rank(i, j) as i64 }).collect())
        .collect();
    let r = |i: Option<usize>, j: usize| -> i64 { i.map_or(0, |i| ranks[i][j]) };
    let mut intervals = Vec::new();
    for b in 0..=t {
        let prev = b.checked_sub(1);
        for d in b + 1..=t {
            let mult = r(Some(b), d - 1) - r(prev, d - 1) - r(Some(b), d) + r(prev, d);
            push_copies(&mut intervals, b, ExtNat::Fin(d), mult)?;
        }
        let mult = r(Some(b), t) - r(prev, t);
        push_copies(&mut intervals, b, ExtNat::Inf, mult)?;
    }
    Barcode::new(t, intervals)
}

fn push_copies(out: &mut Vec<Interval>, birth: usize, death: ExtNat, mult: i64) -> Result<(), BarcodeError> {
    if mult < 0 {
        return Err(BarcodeError::NegativeMultiplicity { birth, death, value: mult });
    }
    out.extend(std::iter::repeat_n(Interval { birth, death }, mult as usize));
    Ok(())
}

/// `H_j(*^i)` over `0..=t`: the interval `[i, ∞)` in degree 0, zero above.
pub fn point_module(i: usize, j: usize, t: usize, p: Prime) -> PersistenceModule {
    if j > 0 {
        return PersistenceModule::zero(p, t);
    }
    Barcode::new(t, vec![Interval::infinite(i)]).expect("valid").to_module(p)
}

/// Bottleneck distance of the barcodes, which stands in for the least `ε`
/// admitting an `ε`-interleaving.
pub fn min_interleaving_eps(m: &PersistenceModule, n: &PersistenceModule) -> Result<ExtNat, BarcodeError> {
    if m.prime() != n.prime() {
        return Err(BarcodeError::FieldMismatch);
    }
    let t = m.stabilization().max(n.stabilization());
    let a = interval_decomposition(&m.padded(t))?;
    let b = interval_decomposition(&n.padded(t))?;
    Ok(bottleneck_distance(&a, &b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acyclicity {
    pub eps: ExtNat,
    pub empty_input: bool,
    /// Distance to the point in each degree `0..=max_degree`.
    pub per_degree: Vec<ExtNat>,
}

/// Least `ε` making `X` `ε`-acyclic up to `max_degree`; `∞` when `X` is empty.
pub fn acyclicity_measure(x: &PersistencePoset, p: Prime, max_degree: usize) -> Result<Acyclicity, BarcodeError> {
    let ExtNat::Fin(trh) = x.threshold() else {
        return Ok(Acyclicity {
            eps: ExtNat::Inf,
            empty_input: true,
            per_degree: vec![ExtNat::Inf; max_degree + 1],
        });
    };
    let t = x.stabilization();
    let per_degree = persistence_modules(x, p, max_degree)?
        .iter()
        .enumerate()
        .map(|(j, m)| min_interleaving_eps(m, &point_module(trh, j, t, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let eps = per_degree.iter().copied().max().unwrap_or(ExtNat::ZERO);
    Ok(Acyclicity { eps, empty_input: false, per_degree })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::poset::FinitePoset;
    use proptest::prelude::*;

    pub(crate) fn arb_module(p: Prime, max_dim: usize, max_t: usize) -> impl Strategy<Value = PersistenceModule> {
        proptest::collection::vec(0..=max_dim, 1..=max_t + 1).prop_flat_map(move |dims| {
            let sizes: Vec<usize> = dims.windows(2).map(|w| w[0] * w[1]).collect();
            let entries = sizes.iter().map(|&n| proptest::collection::vec(0..p.get(), n)).collect::<Vec<_>>();
            (Just(dims), entries).prop_map(move |(dims, entries)| {
                let steps = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let mut m = FieldMatrix::zeros(p, dims[i + 1], dims[i]);
                        for (k, &v) in e.iter().enumerate() {
                            m.set(k / dims[i], k % dims[i], v);
                        }
                        m
                    })
                    .collect();
                PersistenceModule::new(p, dims, steps).unwrap()
            })
        })
    }

    pub(crate) fn bars(t: usize, items: &[(usize, Option<usize>)]) -> Barcode {
        Barcode::new(
            t,
            items
                .iter()
                .map(|&(b, d)| d.map_or(Interval::infinite(b), |d| Interval::finite(b, d)))
                .collect(),
        )
        .unwrap()
    }

    fn module(p: Prime, dims: Vec<usize>, steps: &[Vec<Vec<u64>>]) -> PersistenceModule {
        let steps = steps
            .iter()
            .enumerate()
            .map(|(i, rows)| FieldMatrix::from_rows(p, dims[i], rows).unwrap())
            .collect();
        PersistenceModule::new(p, dims, steps).unwrap()
    }

    #[test]
    fn rank_examples() {
        let p = Prime::TWO;
        let m = module(p, vec![1, 1], &[vec![vec![0]]]);
        assert_eq!(rank_invariant(&m, 0, 1), 0);
        assert_eq!(rank_invariant(&m, 1, 1), 1);
        let m = module(p, vec![1, 2, 1], &[vec![vec![1], vec![0]], vec![vec![1, 1]]]);
        assert_eq!(rank_invariant(&m, 0, 2), 1);
        assert_eq!(rank_invariant(&m, 1, 1), 2);
        assert_eq!(interval_decomposition(&m).unwrap(), bars(2, &[(0, None), (1, Some(2))]));
    }

    #[test]
    fn decomposition_examples() {
        let p = Prime::new(3).unwrap();
        let id = module(p, vec![1, 1, 1], &[vec![vec![1]], vec![vec![1]]]);
        assert_eq!(interval_decomposition(&id).unwrap(), bars(2, &[(0, None)]));
        let blip = module(p, vec![0, 1, 0], &[vec![vec![]], vec![]]);
        assert_eq!(interval_decomposition(&blip).unwrap(), bars(2, &[(1, Some(2))]));
    }

    #[test]
    fn point_modules() {
        let p = Prime::TWO;
        assert_eq!(point_module(0, 0, 2, p).dims(), &[1, 1, 1]);
        assert_eq!(point_module(0, 0, 2, p).rank(0, 2), 1);
        assert_eq!(point_module(2, 0, 3, p).dims(), &[0, 0, 1, 1]);
        assert!(point_module(1, 1, 3, p).is_zero());
    }

    #[test]
    fn interleaving_examples() {
        let p = Prime::TWO;
        let m = bars(3, &[(0, Some(2)), (1, None)]).to_module(p);
        assert_eq!(min_interleaving_eps(&m, &m).unwrap(), ExtNat::ZERO);
        let short = bars(3, &[(0, Some(3))]).to_module(p);
        assert_eq!(min_interleaving_eps(&short, &PersistenceModule::zero(p, 3)).unwrap(), ExtNat::Fin(2));
        let a = point_module(1, 0, 3, p);
        let b = point_module(3, 0, 3, p);
        assert_eq!(min_interleaving_eps(&a, &b).unwrap(), ExtNat::Fin(2));
        let q = point_module(0, 0, 1, Prime::new(3).unwrap());
        assert_eq!(min_interleaving_eps(&a, &q), Err(BarcodeError::FieldMismatch));
    }

    #[test]
    fn acyclicity_examples() {
        let p = Prime::TWO;
        let star = PersistencePoset::filtration_by_names(vec![
            FinitePoset::empty(),
            FinitePoset::antichain(["x"]),
        ])
        .unwrap();
        let a = acyclicity_measure(&star, p, 2).unwrap();
        assert_eq!((a.eps, a.empty_input), (ExtNat::ZERO, false));

        let merge = PersistencePoset::filtration_by_names(vec![
            FinitePoset::antichain(["a", "b"]),
            FinitePoset::new(["a", "b", "c"], [("a", "c"), ("b", "c")]).unwrap(),
        ])
        .unwrap();
        let a = acyclicity_measure(&merge, p, 2).unwrap();
        assert_eq!(a.eps, ExtNat::Fin(1));
        assert_eq!(a.per_degree, vec![ExtNat::Fin(1), ExtNat::ZERO, ExtNat::ZERO]);

        let empty = PersistencePoset::constant(FinitePoset::empty());
        let a = acyclicity_measure(&empty, p, 1).unwrap();
        assert_eq!((a.eps, a.empty_input), (ExtNat::Inf, true));
    }

    #[test]
    fn barcode_validation_and_json() {
        assert!(Interval::new(2, ExtNat::Fin(2)).is_err());
        assert!(matches!(
            Barcode::new(2, vec![Interval::finite(0, 3)]),
            Err(BarcodeError::PastStabilization { .. })
        ));
        let b = bars(3, &[(0, None), (1, Some(2))]);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"T":3,"intervals":[[0,"inf"],[1,2]]}"#);
        assert_eq!(serde_json::from_str::<Barcode>(&json).unwrap(), b);
        assert!(serde_json::from_str::<Barcode>(r#"{"T":3,"intervals":[[2,1]]}"#).is_err());
        assert_eq!(b.to_string(), "{[0, inf), [1, 2)}");
    }

    proptest! {
        #[test]
        fn reconstruction(m in arb_module(Prime::new(3).unwrap(), 4, 5)) {
            let bc = interval_decomposition(&m).unwrap();
            let t = m.stabilization();
            for i in 0..=t + 1 {
                let present = bc.intervals().iter().filter(|iv| iv.contains(i.min(t))).count();
                prop_assert_eq!(present, m.dim(i));
                for j in i..=t + 1 {
                    prop_assert_eq!(bc.rank(i, j), m.rank(i, j));
                }
            }
            prop_assert_eq!(interval_decomposition(&bc.to_module(m.prime())).unwrap(), bc);
        }
    }
}
