//! Brute-force reference solvers. Deliberately simple and independent of the
//! planners; every one refuses inputs beyond its budget.

use std::collections::{BinaryHeap, HashMap, VecDeque};

use ordered_float::OrderedFloat;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::solution::{Matching, SpanningForest, UnionFind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Non-isolated vertices allowed in exact matching calls.
    pub max_vertices: usize,
    /// Edges allowed in the search universe.
    pub max_search_edges: usize,
    /// Bound on `|source| + |target|` for the search.
    pub max_search_solution: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 16, max_search_edges: 20, max_search_solution: 8 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("input exceeds oracle budget: {what} = {got} > {max}")]
    Budget { what: &'static str, got: usize, max: usize },
}

fn active_vertices(g: &Graph) -> Vec<VertexId> {
    g.vertices().filter(|&v| g.degree(v) > 0).collect()
}

/// Bitmask DP: the lowest vertex of the remaining set is either left
/// unmatched or matched to a remaining neighbor.
fn exact_matching(g: &Graph, weight: impl Fn(&Edge) -> f64, budget: OracleBudget) -> Result<Matching, OracleError> {
    let verts = active_vertices(g);
    let n = verts.len();
    if n > budget.max_vertices {
        return Err(OracleError::Budget { what: "vertices", got: n, max: budget.max_vertices });
    }
    let pos: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // nbrs[i] = (j, edge) sorted by edge id for a stable tie-break.
    let mut nbrs: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); n];
    for e in g.edges() {
        let (a, b) = (pos[&e.u], pos[&e.v]);
        nbrs[a].push((b, *e));
        nbrs[b].push((a, *e));
    }
    let full = (1usize << n) - 1;
    let mut best = vec![0.0f64; 1 << n];
    let mut choice: Vec<Option<(usize, Edge)>> = vec![None; 1 << n];
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = best[rest];
        let mut c = None;
        for &(j, e) in &nbrs[i] {
            if rest & (1 << j) != 0 {
                let cand = weight(&e) + best[rest & !(1 << j)];
                if cand > b {
                    b = cand;
                    c = Some((j, e));
                }
            }
        }
        best[mask] = b;
        choice[mask] = c;
    }
    let mut m = Matching::new();
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        mask &= !(1 << i);
        if let Some((j, e)) = choice[mask | (1 << i)] {
            m.insert(e).expect("dp picks disjoint edges");
            mask &= !(1 << j);
        }
    }
    Ok(m)
}

pub fn max_matching_exact(g: &Graph) -> Result<Matching, OracleError> {
    max_matching_exact_with(g, OracleBudget::default())
}

pub fn max_matching_exact_with(g: &Graph, budget: OracleBudget) -> Result<Matching, OracleError> {
    exact_matching(g, |_| 1.0, budget)
}

pub fn max_weight_matching_exact(g: &Graph) -> Result<Matching, OracleError> {
    max_weight_matching_exact_with(g, OracleBudget::default())
}

pub fn max_weight_matching_exact_with(g: &Graph, budget: OracleBudget) -> Result<Matching, OracleError> {
    exact_matching(g, |e| e.w, budget)
}

/// Whether `m` admits an augmenting path in `g`, by exhaustive DFS over
/// simple alternating paths from every free vertex.
pub fn has_augmenting_path(g: &Graph, m: &Matching) -> bool {
    fn dfs(g: &Graph, m: &Matching, x: VertexId, start: VertexId, on_path: &mut Vec<VertexId>) -> bool {
        for &id in g.incident(x) {
            let e = g.edge(id).unwrap();
            if m.contains(id) {
                continue;
            }
            let y = e.other(x);
            if on_path.contains(&y) {
                continue;
            }
            match m.edge_at(y) {
                None => {
                    if y != start {
                        return true;
                    }
                }
                Some(me) => {
                    let z = me.other(y);
                    if on_path.contains(&z) {
                        continue;
                    }
                    on_path.push(y);
                    on_path.push(z);
                    if dfs(g, m, z, start, on_path) {
                        return true;
                    }
                    on_path.pop();
                    on_path.pop();
                }
            }
        }
        false
    }
    g.vertices().filter(|&v| m.edge_at(v).is_none()).any(|s| dfs(g, m, s, s, &mut vec![s]))
}

/// Kruskal over `(weight, id)` order.
pub fn msf_exact(g: &Graph) -> SpanningForest {
    let mut edges: Vec<Edge> = g.edges().copied().collect();
    edges.sort_by(|a, b| a.w.total_cmp(&b.w).then(a.id.cmp(&b.id)));
    let mut uf = UnionFind::new(g.vertex_capacity());
    SpanningForest::from_edges(edges.into_iter().filter(|e| uf.union(e.u as usize, e.v as usize)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchGranularity {
    /// A phase toggles up to `delta` edges; only phase-end states are checked.
    PhaseEnd,
    /// Every single toggle must leave a valid matching above the floor.
    EveryOp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quality {
    Size,
    Weight,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchSpec {
    pub delta: usize,
    pub floor: f64,
    /// Require quality strictly above the floor instead of at or above it.
    pub strict: bool,
    pub granularity: SearchGranularity,
    pub quality: Quality,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SearchOutcome {
    /// A schedule of phases, each listing the toggled edge ids.
    Feasible { schedule: Vec<Vec<EdgeId>> },
    /// No schedule exists; `explored` states were reachable above the floor.
    Infeasible { explored: usize },
}

impl SearchOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SearchOutcome::Feasible { .. })
    }
}

struct Universe {
    edges: Vec<Edge>,
    /// Bitmask of edges at each vertex.
    at: HashMap<VertexId, u32>,
}

impl Universe {
    fn new(g: &Graph, budget: OracleBudget) -> Result<Self, OracleError> {
        let edges: Vec<Edge> = g.edges().copied().collect();
        if edges.len() > budget.max_search_edges {
            return Err(OracleError::Budget { what: "edges", got: edges.len(), max: budget.max_search_edges });
        }
        let mut at: HashMap<VertexId, u32> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            *at.entry(e.u).or_default() |= 1 << i;
            *at.entry(e.v).or_default() |= 1 << i;
        }
        Ok(Universe { edges, at })
    }

    fn mask_of(&self, m: &Matching) -> u32 {
        self.edges.iter().enumerate().filter(|(_, e)| m.contains(e.id)).fold(0, |acc, (i, _)| acc | 1 << i)
    }

    fn is_matching(&self, s: u32) -> bool {
        self.at.values().all(|&b| (b & s).count_ones() <= 1)
    }

    fn quality(&self, s: u32, q: Quality) -> f64 {
        match q {
            Quality::Size => s.count_ones() as f64,
            Quality::Weight => (0..self.edges.len()).filter(|i| s & (1 << i) != 0).map(|i| self.edges[i].w).sum(),
        }
    }

    /// All non-empty toggle masks of at most `delta` bits.
    fn moves(&self, delta: usize) -> Vec<u32> {
        let m = self.edges.len();
        let mut out = Vec::new();
        fn rec(start: usize, m: usize, left: usize, cur: u32, out: &mut Vec<u32>) {
            for i in start..m {
                let next = cur | 1 << i;
                out.push(next);
                if left > 1 {
                    rec(i + 1, m, left - 1, next, out);
                }
            }
        }
        rec(0, m, delta, 0, &mut out);
        out
    }

    fn toggled_ids(&self, diff: u32) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|i| diff & (1 << i) != 0).map(|i| self.edges[i].id).collect()
    }
}

fn check_sizes(source: &Matching, target: &Matching, budget: OracleBudget) -> Result<(), OracleError> {
    let k = source.len() + target.len();
    if k > budget.max_search_solution {
        return Err(OracleError::Budget { what: "|source|+|target|", got: k, max: budget.max_search_solution });
    }
    Ok(())
}

/// Breadth-first search for a phase schedule from `source` to a superset of
/// `target` that keeps every checked state a valid matching above the floor.
pub fn exhaustive_transform_search(
    g: &Graph,
    source: &Matching,
    target: &Matching,
    spec: SearchSpec,
) -> Result<SearchOutcome, OracleError> {
    exhaustive_transform_search_with(g, source, target, spec, OracleBudget::default())
}

pub fn exhaustive_transform_search_with(
    g: &Graph,
    source: &Matching,
    target: &Matching,
    spec: SearchSpec,
    budget: OracleBudget,
) -> Result<SearchOutcome, OracleError> {
    check_sizes(source, target, budget)?;
    let uni = Universe::new(g, budget)?;
    let start = uni.mask_of(source);
    let goal = uni.mask_of(target);
    let above = |s: u32| {
        let q = uni.quality(s, spec.quality);
        if spec.strict {
            q > spec.floor
        } else {
            q >= spec.floor
        }
    };
    let moves = match spec.granularity {
        SearchGranularity::PhaseEnd => uni.moves(spec.delta),
        SearchGranularity::EveryOp => uni.moves(1),
    };
    let mut parent: HashMap<u32, u32> = HashMap::from([(start, start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if s & goal == goal {
            let mut schedule = Vec::new();
            let mut x = s;
            while x != start {
                let p = parent[&x];
                schedule.push(uni.toggled_ids(p ^ x));
                x = p;
            }
            schedule.reverse();
            if spec.granularity == SearchGranularity::EveryOp {
                schedule = regroup(schedule, spec.delta);
            }
            return Ok(SearchOutcome::Feasible { schedule });
        }
        for &mv in &moves {
            let t = s ^ mv;
            if parent.contains_key(&t) || !uni.is_matching(t) || !above(t) {
                continue;
            }
            parent.insert(t, s);
            queue.push_back(t);
        }
    }
    Ok(SearchOutcome::Infeasible { explored: parent.len() })
}

fn regroup(single: Vec<Vec<EdgeId>>, delta: usize) -> Vec<Vec<EdgeId>> {
    single.concat().chunks(delta.max(1)).map(|c| c.to_vec()).collect()
}

/// The best achievable worst quality over all schedules from `source` to a
/// superset of `target` (a widest-path search). `None` if the target is
/// unreachable at all.
pub fn best_worst_quality(
    g: &Graph,
    source: &Matching,
    target: &Matching,
    delta: usize,
    granularity: SearchGranularity,
    quality: Quality,
) -> Result<Option<f64>, OracleError> {
    let budget = OracleBudget::default();
    check_sizes(source, target, budget)?;
    let uni = Universe::new(g, budget)?;
    let start = uni.mask_of(source);
    let goal = uni.mask_of(target);
    let moves = match granularity {
        SearchGranularity::PhaseEnd => uni.moves(delta),
        SearchGranularity::EveryOp => uni.moves(1),
    };
    let mut best: HashMap<u32, f64> = HashMap::from([(start, uni.quality(start, quality))]);
    let mut heap = BinaryHeap::from([(OrderedFloat(best[&start]), start)]);
    while let Some((OrderedFloat(b), s)) = heap.pop() {
        if b < best[&s] {
            continue;
        }
        if s & goal == goal {
            return Ok(Some(b));
        }
        for &mv in &moves {
            let t = s ^ mv;
            if !uni.is_matching(t) {
                continue;
            }
            let nb = b.min(uni.quality(t, quality));
            if best.get(&t).is_none_or(|&old| nb > old) {
                best.insert(t, nb);
                heap.push((OrderedFloat(nb), t));
            }
        }
    }
    Ok(None)
}
