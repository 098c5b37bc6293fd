//! Abstract finite simplicial complexes and simplicial maps.
//!
//! Simplices are sorted vectors of vertex ids, grouped by dimension and kept
//! in lexicographic order, which fixes the basis of every chain group. The
//! empty simplex is never stored; homology is unreduced.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::poset::{FinitePoset, MonotoneMap};

/// Suffix used to separate clashing vertex names in a join.
pub const JOIN_TAG: &str = "@r";

pub type Simplex = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("vertex map does not send simplex {0:?} to a simplex")]
    NotSimplicial(Vec<String>),
    #[error("vertex map has {found} entries, domain has {expected} vertices")]
    MapLength { expected: usize, found: usize },
    #[error("maps do not share domain and codomain")]
    DomainMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    by_dim: Vec<Vec<Simplex>>,
    lookup: HashMap<Simplex, usize>,
}

impl SimplicialComplex {
    /// Closes `simplices` downward and adds every vertex as a 0-simplex.
    pub fn new(vertices: Vec<String>, simplices: impl IntoIterator<Item = Simplex>) -> Result<Self, SimplicialError> {
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if seen.insert(v.as_str(), i).is_some() {
                return Err(SimplicialError::DuplicateVertex(v.clone()));
            }
        }
        let mut all: BTreeSet<Simplex> = (0..vertices.len()).map(|v| vec![v]).collect();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.iter().find(|&&v| v >= vertices.len()) {
                return Err(SimplicialError::UnknownVertex(format!("#{v}")));
            }
            add_faces(&s, &mut all);
        }
        Ok(Self::from_closed(vertices, all))
    }

    /// Builds from vertex names and simplices given by name.
    pub fn from_names(vertices: &[&str], simplices: &[&[&str]]) -> Result<Self, SimplicialError> {
        let idx: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let sims = simplices
            .iter()
            .map(|s| {
                s.iter()
                    .map(|v| idx.get(v).copied().ok_or_else(|| SimplicialError::UnknownVertex(v.to_string())))
                    .collect::<Result<Simplex, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vertices.iter().map(|v| v.to_string()).collect(), sims)
    }

    /// `all` must be downward closed and contain all vertices.
    fn from_closed(vertices: Vec<String>, all: impl IntoIterator<Item = Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in all {
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        for layer in &mut by_dim {
            layer.sort_unstable();
        }
        let lookup = by_dim
            .iter()
            .flat_map(|layer| layer.iter().enumerate().map(|(i, s)| (s.clone(), i)))
            .collect();
        SimplicialComplex {
            vertices,
            by_dim,
            lookup,
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// The `k`-simplices in basis order.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    /// Number of non-empty simplices.
    pub fn num_simplices(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    /// Position of a sorted simplex within its dimension.
    pub fn position(&self, s: &[usize]) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    /// Membership for any vertex set (sorted or not); the empty set counts.
    pub fn contains(&self, s: &[usize]) -> bool {
        if s.is_empty() {
            return true;
        }
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        self.lookup.contains_key(&s)
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize, SimplicialError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| SimplicialError::UnknownVertex(name.to_string()))
    }

    /// Simplices as sorted lists of vertex names; equality of these sets is
    /// equality of complexes up to vertex order.
    pub fn named_simplices(&self) -> BTreeSet<Vec<String>> {
        self.all_simplices()
            .map(|s| {
                let mut names: Vec<String> = s.iter().map(|&v| self.vertices[v].clone()).collect();
                names.sort();
                names
            })
            .collect()
    }

    pub fn same_as(&self, other: &SimplicialComplex) -> bool {
        let mut a = self.vertices.clone();
        let mut b = other.vertices.clone();
        a.sort();
        b.sort();
        a == b && self.named_simplices() == other.named_simplices()
    }

    /// Alternating count of simplices.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// The subcomplex of simplices passing `keep` (which must be closed
    /// under faces), on the vertices they use.
    fn subcomplex(&self, keep: impl Fn(&Simplex) -> bool) -> SimplicialComplex {
        let kept: Vec<&Simplex> = self.all_simplices().filter(|s| keep(s)).collect();
        let used: BTreeSet<usize> = kept.iter().flat_map(|s| s.iter().copied()).collect();
        let mut renum = vec![usize::MAX; self.num_vertices()];
        let vertices: Vec<String> = used
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                renum[v] = i;
                self.vertices[v].clone()
            })
            .collect();
        let all = kept.into_iter().map(|s| s.iter().map(|&v| renum[v]).collect::<Simplex>());
        SimplicialComplex::from_closed(vertices, all)
    }
}

fn add_faces(s: &[usize], all: &mut BTreeSet<Simplex>) {
    if s.is_empty() || all.contains(s) {
        return;
    }
    all.insert(s.to_vec());
    for skip in 0..s.len() {
        let face: Simplex = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
        add_faces(&face, all);
    }
}

/// `K(P)`: the chains of `P`.
pub fn order_complex(p: &FinitePoset) -> SimplicialComplex {
    order_complex_truncated(p, usize::MAX)
}

/// Chains of `P` with at most `max_dim + 1` elements.
pub fn order_complex_truncated(p: &FinitePoset, max_dim: usize) -> SimplicialComplex {
    let order = p.linear_extension();
    let mut all: Vec<Simplex> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();

    fn extend(
        p: &FinitePoset,
        order: &[usize],
        from: usize,
        max_len: usize,
        chain: &mut Vec<usize>,
        all: &mut Vec<Simplex>,
    ) {
        for k in from..order.len() {
            let y = order[k];
            if chain.last().is_some_and(|&x| !p.lt(x, y)) {
                continue;
            }
            chain.push(y);
            let mut s = chain.clone();
            s.sort_unstable();
            all.push(s);
            if chain.len() < max_len {
                extend(p, order, k + 1, max_len, chain, all);
            }
            chain.pop();
        }
    }

    let max_len = max_dim.saturating_add(1);
    extend(p, &order, 0, max_len, &mut chain, &mut all);
    SimplicialComplex::from_closed(p.elements().to_vec(), all)
}

/// `K ⋆ L` on `V(K) ⊔ V(L)`; clashing names from `L` get [`JOIN_TAG`].
pub fn join(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let mut vertices = k.vertices.clone();
    let taken: BTreeSet<String> = k.vertices.iter().cloned().collect();
    for v in &l.vertices {
        let mut name = v.clone();
        while taken.contains(&name) || l.vertices.iter().any(|w| w != v && *w == name) {
            name.push_str(JOIN_TAG);
        }
        vertices.push(name);
    }
    let off = k.num_vertices();
    let ks: Vec<&Simplex> = k.all_simplices().collect();
    let ls: Vec<&Simplex> = l.all_simplices().collect();
    let mut all: Vec<Simplex> = Vec::with_capacity((ks.len() + 1) * (ls.len() + 1));
    all.extend(ks.iter().map(|s| (*s).clone()));
    all.extend(ls.iter().map(|t| t.iter().map(|&v| v + off).collect()));
    for s in &ks {
        for t in &ls {
            let mut u = (*s).clone();
            u.extend(t.iter().map(|&v| v + off));
            all.push(u);
        }
    }
    SimplicialComplex::from_closed(vertices, all)
}

/// `(st(v), lk(v))` as subcomplexes of `K`.
pub fn star_link(k: &SimplicialComplex, v: usize) -> Result<(SimplicialComplex, SimplicialComplex), SimplicialError> {
    if v >= k.num_vertices() {
        return Err(SimplicialError::UnknownVertex(format!("#{v}")));
    }
    let with_v = |s: &Simplex| {
        let mut u = s.clone();
        if let Err(pos) = u.binary_search(&v) {
            u.insert(pos, v);
        }
        k.lookup.contains_key(&u)
    };
    let star = k.subcomplex(|s| with_v(s));
    let link = k.subcomplex(|s| !s.contains(&v) && with_v(s));
    Ok((star, link))
}

/// A vertex map sending simplices to simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    dom: Arc<SimplicialComplex>,
    cod: Arc<SimplicialComplex>,
    vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        dom: Arc<SimplicialComplex>,
        cod: Arc<SimplicialComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<Self, SimplicialError> {
        if vertex_map.len() != dom.num_vertices() {
            return Err(SimplicialError::MapLength {
                expected: dom.num_vertices(),
                found: vertex_map.len(),
            });
        }
        if let Some(&w) = vertex_map.iter().find(|&&w| w >= cod.num_vertices()) {
            return Err(SimplicialError::UnknownVertex(format!("#{w}")));
        }
        let map = SimplicialMap { dom, cod, vertex_map };
        if let Some(s) = map.dom.all_simplices().find(|s| !map.cod.contains(&map.image(s))) {
            return Err(SimplicialError::NotSimplicial(
                s.iter().map(|&v| map.dom.vertices[v].clone()).collect(),
            ));
        }
        Ok(map)
    }

    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let vertex_map = (0..k.num_vertices()).collect();
        SimplicialMap { dom: k.clone(), cod: k, vertex_map }
    }

    pub fn dom(&self) -> &Arc<SimplicialComplex> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<SimplicialComplex> {
        &self.cod
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Sorted, deduplicated image of a vertex set.
    pub fn image(&self, s: &[usize]) -> Simplex {
        let mut u: Simplex = s.iter().map(|&v| self.vertex_map[v]).collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SimplicialMap) -> Result<SimplicialMap, SimplicialError> {
        if *self.cod != *next.dom {
            return Err(SimplicialError::DomainMismatch);
        }
        Ok(SimplicialMap {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            vertex_map: self.vertex_map.iter().map(|&w| next.vertex_map[w]).collect(),
        })
    }
}

/// `K(f)`, between full order complexes.
pub fn induced_simplicial_map(f: &MonotoneMap) -> SimplicialMap {
    induced_simplicial_map_truncated(f, usize::MAX)
}

/// `K(f)` between order complexes truncated at `max_dim`.
pub fn induced_simplicial_map_truncated(f: &MonotoneMap, max_dim: usize) -> SimplicialMap {
    SimplicialMap {
        dom: Arc::new(order_complex_truncated(f.dom(), max_dim)),
        cod: Arc::new(order_complex_truncated(f.cod(), max_dim)),
        vertex_map: f.assignment().to_vec(),
    }
}

/// `φ(σ) ∪ ψ(σ) ∈ Σ(L)` for every simplex `σ`.
pub fn is_contiguous(phi: &SimplicialMap, psi: &SimplicialMap) -> Result<bool, SimplicialError> {
    if *phi.dom != *psi.dom || *phi.cod != *psi.cod {
        return Err(SimplicialError::DomainMismatch);
    }
    Ok(phi.dom.all_simplices().all(|s| {
        let mut u = phi.image(s);
        u.extend(psi.image(s));
        phi.cod.contains(&u)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::tests::arb_poset;
    use proptest::prelude::*;

    fn names(k: &SimplicialComplex) -> BTreeSet<Vec<String>> {
        k.named_simplices()
    }

    fn set(items: &[&[&str]]) -> BTreeSet<Vec<String>> {
        items.iter().map(|s| s.iter().map(|v| v.to_string()).collect()).collect()
    }

    #[test]
    fn order_complex_examples() {
        let chain = FinitePoset::chain(["a", "b", "c", "d"]);
        let k = order_complex(&chain);
        assert_eq!(k.dim(), Some(3));
        assert_eq!(k.num_simplices(), 15);

        let anti = FinitePoset::antichain(["a", "b", "c"]);
        let k = order_complex(&anti);
        assert_eq!(k.dim(), Some(0));
        assert_eq!(k.count(0), 3);

        let vee = FinitePoset::new(["a", "b", "c"], [("a", "c"), ("b", "c")]).unwrap();
        assert_eq!(
            names(&order_complex(&vee)),
            set(&[&["a"], &["b"], &["c"], &["a", "c"], &["b", "c"]])
        );
    }

    #[test]
    fn truncation_caps_dimension() {
        let chain = FinitePoset::chain(["a", "b", "c", "d", "e"]);
        let k = order_complex_truncated(&chain, 2);
        assert_eq!(k.dim(), Some(2));
        assert_eq!((k.count(0), k.count(1), k.count(2)), (5, 10, 10));
    }

    #[test]
    fn induced_map_examples() {
        let c = Arc::new(FinitePoset::chain(["a", "b"]));
        let id = induced_simplicial_map(&MonotoneMap::identity(c.clone()));
        assert_eq!(id, SimplicialMap::identity(id.dom().clone()));

        let pt = Arc::new(FinitePoset::antichain(["x"]));
        let collapse = MonotoneMap::new(c, pt, vec![0, 0]).unwrap();
        let phi = induced_simplicial_map(&collapse);
        let edge = phi.dom().simplices(1)[0].clone();
        assert_eq!(phi.image(&edge), vec![0]);
        assert!(SimplicialMap::new(phi.dom().clone(), phi.cod().clone(), phi.vertex_map().to_vec()).is_ok());
    }

    #[test]
    fn join_examples() {
        let pt = SimplicialComplex::from_names(&["x"], &[]).unwrap();
        let pt2 = SimplicialComplex::from_names(&["y"], &[]).unwrap();
        let edge = join(&pt, &pt2);
        assert_eq!(names(&edge), set(&[&["x"], &["y"], &["x", "y"]]));

        let l = SimplicialComplex::from_names(&["a", "b", "c"], &[&["a", "b"]]).unwrap();
        let cone = join(&pt, &l);
        assert_eq!(cone.num_simplices(), (1 + 1) * (l.num_simplices() + 1) - 1);
        assert!(cone.contains(&[0, 1, 2]));

        let s0 = SimplicialComplex::from_names(&["a", "b"], &[]).unwrap();
        let s0b = SimplicialComplex::from_names(&["c", "d"], &[]).unwrap();
        let square = join(&s0, &s0b);
        assert_eq!(square.count(1), 4);
        assert_eq!(square.count(2), 0);
        assert!(!square.contains(&[0, 1]) && !square.contains(&[2, 3]));
    }

    #[test]
    fn join_tags_clashing_names() {
        let a = SimplicialComplex::from_names(&["v"], &[]).unwrap();
        let j = join(&a, &a);
        assert_eq!(j.vertices(), ["v", "v@r"]);
        assert_eq!(j.count(1), 1);
    }

    #[test]
    fn star_link_examples() {
        let tri = SimplicialComplex::from_names(&["a", "b", "c"], &[&["a", "b", "c"]]).unwrap();
        let (st, lk) = star_link(&tri, 0).unwrap();
        assert!(st.same_as(&tri));
        assert_eq!(names(&lk), set(&[&["b"], &["c"], &["b", "c"]]));

        let iso = SimplicialComplex::from_names(&["v", "w"], &[]).unwrap();
        let (st, lk) = star_link(&iso, 0).unwrap();
        assert_eq!(names(&st), set(&[&["v"]]));
        assert_eq!(lk.num_simplices(), 0);

        let cycle = SimplicialComplex::from_names(
            &["a", "b", "c", "d"],
            &[&["a", "b"], &["b", "c"], &["c", "d"], &["a", "d"]],
        )
        .unwrap();
        let (st, lk) = star_link(&cycle, 0).unwrap();
        assert_eq!(names(&lk), set(&[&["b"], &["d"]]));
        assert_eq!(names(&st), set(&[&["a"], &["b"], &["d"], &["a", "b"], &["a", "d"]]));
        assert_eq!(star_link(&cycle, 7).unwrap_err(), SimplicialError::UnknownVertex("#7".into()));
    }

    #[test]
    fn contiguity_examples() {
        let edge = Arc::new(SimplicialComplex::from_names(&["a", "b"], &[&["a", "b"]]).unwrap());
        let tri = Arc::new(SimplicialComplex::from_names(&["a", "b", "c"], &[&["a", "b", "c"]]).unwrap());
        let incl = SimplicialMap::new(edge.clone(), tri.clone(), vec![0, 1]).unwrap();
        let other = SimplicialMap::new(edge.clone(), tri.clone(), vec![0, 2]).unwrap();
        assert!(is_contiguous(&incl, &incl).unwrap());
        assert!(is_contiguous(&incl, &other).unwrap());

        let cycle = Arc::new(
            SimplicialComplex::from_names(
                &["a", "b", "c", "d"],
                &[&["a", "b"], &["b", "c"], &["c", "d"], &["a", "d"]],
            )
            .unwrap(),
        );
        let id = SimplicialMap::identity(cycle.clone());
        let rot = SimplicialMap::new(cycle.clone(), cycle.clone(), vec![2, 3, 0, 1]).unwrap();
        assert!(!is_contiguous(&id, &rot).unwrap());
        assert_eq!(is_contiguous(&id, &incl), Err(SimplicialError::DomainMismatch));
    }

    #[test]
    fn non_simplicial_vertex_map_is_rejected() {
        let edge = Arc::new(SimplicialComplex::from_names(&["a", "b"], &[&["a", "b"]]).unwrap());
        let two = Arc::new(SimplicialComplex::from_names(&["x", "y"], &[]).unwrap());
        assert!(matches!(
            SimplicialMap::new(edge, two, vec![0, 1]),
            Err(SimplicialError::NotSimplicial(_))
        ));
    }

    proptest! {
        #[test]
        fn chain_complex_has_all_subsets(n in 1usize..7) {
            let k = order_complex(&FinitePoset::chain((0..n).map(|i| format!("c{i}"))));
            prop_assert_eq!(k.num_simplices(), (1usize << n) - 1);
        }

        #[test]
        fn dimension_tracks_height(p in arb_poset(7)) {
            let k = order_complex(&p);
            prop_assert_eq!(k.dim().map(|d| d + 1).unwrap_or(0), p.height());
        }

        #[test]
        fn join_counts_multiply(p in arb_poset(4), q in arb_poset(4)) {
            let (k, l) = (order_complex(&p), order_complex(&q));
            let j = join(&k, &l);
            prop_assert_eq!(j.num_simplices() + 1, (k.num_simplices() + 1) * (l.num_simplices() + 1));
        }

        #[test]
        fn star_is_cone_on_link(p in arb_poset(6), v in any::<usize>()) {
            let k = order_complex(&p);
            let v = v % k.num_vertices();
            let (st, lk) = star_link(&k, v).unwrap();
            let apex = SimplicialComplex::new(vec![k.vertices()[v].clone()], []).unwrap();
            prop_assert!(st.same_as(&join(&lk, &apex)));
        }

        #[test]
        fn order_complex_is_functorial(
            p in arb_poset(5), q in arb_poset(4), r in arb_poset(4),
            picks in proptest::collection::vec(any::<usize>(), 5),
        ) {
            use crate::poset::tests::greedy_monotone;
            let (p, q, r) = (Arc::new(p), Arc::new(q), Arc::new(r));
            let f = greedy_monotone(&p, &q, &picks);
            let g = greedy_monotone(&q, &r, &picks);
            let composite = induced_simplicial_map(&f.then(&g));
            let via = induced_simplicial_map(&f).then(&induced_simplicial_map(&g)).unwrap();
            prop_assert_eq!(composite, via);
        }
    }
}
