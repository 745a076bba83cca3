//! The ten boundary curves of `M_{0,5}`, their contractions, and the del
//! Pezzo surfaces reached from each chamber.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::chamber::{Chamber, ChamberError, ChamberSet, ChamberType};
use crate::intersection::{BoundaryIndex, IntersectionError};
use crate::marks::MarkSet;

#[derive(Debug, Error)]
pub enum Dp5Error {
    #[error("operation requires n = 5, got n = {0}")]
    NotFive(usize),
    #[error("no chamber has D-set {0}")]
    InfeasiblePlan(String),
    #[error("{0} is not contracted by the plan")]
    NotInPlan(BoundaryIndex),
    #[error("internal check failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Chamber(#[from] ChamberError),
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
}

/// Dual graph of the ten boundary curves: `J ~ J'` iff `J` and `J'` are
/// disjoint.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    vertices: Vec<BoundaryIndex>,
    adjacency: Vec<Vec<bool>>,
}

pub fn petersen_graph() -> IntersectionGraph {
    let vertices = BoundaryIndex::all(5).expect("n = 5 is in range");
    let adjacency = vertices
        .iter()
        .map(|a| vertices.iter().map(|b| a.subset().is_disjoint(b.subset())).collect())
        .collect();
    IntersectionGraph { vertices, adjacency }
}

impl IntersectionGraph {
    pub fn vertices(&self) -> &[BoundaryIndex] {
        &self.vertices
    }

    fn position(&self, v: &BoundaryIndex) -> usize {
        self.vertices.iter().position(|x| x == v).expect("vertex of the graph")
    }

    pub fn adjacent(&self, a: &BoundaryIndex, b: &BoundaryIndex) -> bool {
        self.adjacency[self.position(a)][self.position(b)]
    }

    pub fn neighbours(&self, v: &BoundaryIndex) -> Vec<BoundaryIndex> {
        let row = &self.adjacency[self.position(v)];
        self.vertices.iter().zip(row).filter(|(_, &a)| a).map(|(w, _)| *w).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(|row| row.iter().filter(|&&a| a).count()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    /// Length of a shortest cycle, by breadth-first search from every vertex.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertices.len();
        let mut best: Option<usize> = None;
        for root in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if !self.adjacency[u][v] {
                        continue;
                    }
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let cycle = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(cycle, |b| b.min(cycle)));
                    }
                }
            }
        }
        best
    }
}

/// The curves contracted by the reduction map of one chamber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    contracted: BTreeSet<BoundaryIndex>,
}

impl ContractionPlan {
    pub fn of_chamber(chamber: &Chamber) -> Result<Self, Dp5Error> {
        if chamber.n != 5 {
            return Err(Dp5Error::NotFive(chamber.n));
        }
        let contracted = chamber
            .d_set
            .iter()
            .map(|s| BoundaryIndex::new(5, *s))
            .collect::<Result<_, _>>()?;
        Ok(ContractionPlan { contracted })
    }

    /// A plan given by its pairs, accepted only if some chamber realises it.
    pub fn new(chambers: &ChamberSet, pairs: &[MarkSet]) -> Result<Self, Dp5Error> {
        if chambers.n != 5 {
            return Err(Dp5Error::NotFive(chambers.n));
        }
        match chambers.find_by_d_set(pairs) {
            Some(c) => Self::of_chamber(c),
            None => Err(Dp5Error::InfeasiblePlan(format!("{pairs:?}"))),
        }
    }

    pub fn contracted(&self) -> &BTreeSet<BoundaryIndex> {
        &self.contracted
    }

    pub fn len(&self) -> usize {
        self.contracted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contracted.is_empty()
    }

    /// Image points of the contracted curves, i.e. the blow-up centre.
    pub fn centre_size(&self) -> usize {
        self.contracted.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Survivors {
    pub curves: Vec<BoundaryIndex>,
    pub count: usize,
}

/// Self-intersection of the image of `D_J` after the plan's blow-downs:
/// `-1 + #(neighbours of J in the plan)`.
pub fn pushed_self_intersection(graph: &IntersectionGraph, plan: &ContractionPlan, j: &BoundaryIndex) -> i64 {
    let hits = plan.contracted.iter().filter(|i| graph.adjacent(i, j)).count() as i64;
    -1 + hits
}

pub fn surviving_minus_one_curves(plan: &ContractionPlan) -> Survivors {
    let graph = petersen_graph();
    let curves: Vec<BoundaryIndex> = graph
        .vertices()
        .iter()
        .filter(|j| !plan.contracted.contains(j))
        .filter(|j| pushed_self_intersection(&graph, plan, j) == -1)
        .copied()
        .collect();
    Survivors {
        count: curves.len(),
        curves,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Deg8Kind {
    #[serde(rename = "F1")]
    F1,
    #[serde(rename = "P1xP1")]
    P1xP1,
}

impl fmt::Display for Deg8Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deg8Kind::F1 => "F1",
            Deg8Kind::P1xP1 => "P1xP1",
        })
    }
}

/// Number of (-1)-curves on a del Pezzo surface of degree 5 to 9.
pub fn table1_minus_one_count(degree: usize, kind: Option<Deg8Kind>) -> Option<usize> {
    match (degree, kind) {
        (9, None) => Some(0),
        (8, Some(Deg8Kind::P1xP1)) => Some(0),
        (8, Some(Deg8Kind::F1)) => Some(1),
        (7, None) => Some(3),
        (6, None) => Some(6),
        (5, None) => Some(10),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceIdentification {
    pub degree: usize,
    pub deg8_kind: Option<Deg8Kind>,
    pub minus_one_count: usize,
}

impl fmt::Display for SurfaceIdentification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree {}", self.degree)?;
        if let Some(k) = self.deg8_kind {
            write!(f, " ({k})")?;
        }
        write!(f, ", {} (-1)-curves", self.minus_one_count)
    }
}

pub fn identify_surface(chamber: &Chamber) -> Result<SurfaceIdentification, Dp5Error> {
    let plan = ContractionPlan::of_chamber(chamber)?;
    let degree = 5 + plan.len();
    let deg8_kind = match chamber.type_of()? {
        ChamberType::D => Some(Deg8Kind::F1),
        ChamberType::E => Some(Deg8Kind::P1xP1),
        _ => None,
    };
    let survivors = surviving_minus_one_curves(&plan);
    let expected = table1_minus_one_count(degree, deg8_kind)
        .ok_or_else(|| Dp5Error::Verification(format!("no del Pezzo surface of degree {degree}")))?;
    if survivors.count != expected {
        return Err(Dp5Error::Verification(format!(
            "chamber {} keeps {} (-1)-curves, expected {expected}",
            chamber.id, survivors.count
        )));
    }
    Ok(SurfaceIdentification {
        degree,
        deg8_kind,
        minus_one_count: survivors.count,
    })
}

/// Reduction order between chambers: `a >= b` iff `D(a)` is contained in
/// `D(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    Equal,
    /// `a > b`: `b` contracts strictly more.
    Greater,
    /// `b > a`.
    Less,
    Incomparable,
}

impl Reduction {
    /// `a >= b`.
    pub fn is_ge(self) -> bool {
        matches!(self, Reduction::Equal | Reduction::Greater)
    }
}

fn is_subset(a: &[MarkSet], b: &[MarkSet]) -> bool {
    a.iter().all(|x| b.contains(x))
}

pub fn reduction_order(a: &Chamber, b: &Chamber) -> Result<Reduction, Dp5Error> {
    for c in [a, b] {
        if c.n != 5 {
            return Err(Dp5Error::NotFive(c.n));
        }
    }
    Ok(match (is_subset(&a.d_set, &b.d_set), is_subset(&b.d_set, &a.d_set)) {
        (true, true) => Reduction::Equal,
        (true, false) => Reduction::Greater,
        (false, true) => Reduction::Less,
        (false, false) => Reduction::Incomparable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DagVertex {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: ChamberType,
    pub surface: SurfaceIdentification,
}

/// Hasse diagram of the reduction order; edges point towards more
/// contraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionDag {
    pub vertices: Vec<DagVertex>,
    pub edges: Vec<(usize, usize)>,
}

pub fn contraction_dag(chambers: &ChamberSet) -> Result<ContractionDag, Dp5Error> {
    if chambers.n != 5 {
        return Err(Dp5Error::NotFive(chambers.n));
    }
    let list = &chambers.chambers;
    let vertices = list
        .iter()
        .map(|c| {
            Ok(DagVertex {
                id: c.id,
                kind: c.type_of()?,
                surface: identify_surface(c)?,
            })
        })
        .collect::<Result<Vec<_>, Dp5Error>>()?;
    let above = |a: &Chamber, b: &Chamber| -> Result<bool, Dp5Error> {
        Ok(reduction_order(a, b)? == Reduction::Greater)
    };
    let mut edges = Vec::new();
    for a in list {
        for b in list {
            if !above(a, b)? {
                continue;
            }
            let mut covered = true;
            for c in list {
                if above(a, c)? && above(c, b)? {
                    covered = false;
                    break;
                }
            }
            if covered {
                edges.push((a.id, b.id));
            }
        }
    }
    Ok(ContractionDag { vertices, edges })
}

impl ContractionDag {
    pub fn out_degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|(a, _)| *a == id).count()
    }

    pub fn sinks(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.id).filter(|&id| self.out_degree(id) == 0).collect()
    }

    /// Graphviz rendering; vertices in id order, edges in `(from, to)`
    /// order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph contraction {\n  node [shape=box];\n");
        for v in &self.vertices {
            let kind = v.surface.deg8_kind.map(|k| format!(" {k}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  c{} [label=\"#{} type {} deg {}{} (-1):{}\"];",
                v.id, v.id, v.kind, v.surface.degree, kind, v.surface.minus_one_count
            );
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  c{a} -> c{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// `#{J not in the plan : J is contained in I^c}` for `I` in the plan.
pub fn order_along_center(plan: &ContractionPlan, i: &BoundaryIndex) -> Result<usize, Dp5Error> {
    if !plan.contracted.contains(i) {
        return Err(Dp5Error::NotInPlan(*i));
    }
    let complement = i.complement();
    Ok(BoundaryIndex::all(5)?
        .iter()
        .filter(|j| !plan.contracted.contains(j) && j.subset().is_subset(complement))
        .count())
}
