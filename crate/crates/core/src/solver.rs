//! Existence of a matched metric for an arbitrary channel.
//!
//! Every applicable triple `(x, y, z)` constrains the distances of the
//! unordered pairs `{x,y}` and `{x,z}`: strictly smaller when
//! `Pr(x|y) > Pr(x|z)`, equal when the two probabilities tie and are
//! positive. Keying constraints on unordered pairs builds symmetry in. The
//! equalities are merged with a union-find; the strict constraints then form
//! a digraph on the merged classes. A cycle refutes every symmetric distance
//! and comes back as a [`Certificate`]; otherwise longest-path layering of
//! the classes gives a matched semimetric, and the squeeze turns it into a
//! metric.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::constructions::squeeze;
use crate::error::{Error, Result};
use crate::matching::{check_matched, Verdict};
use crate::model::{make_bac, unreasonable_witness, Channel, DistanceKind, DistanceMatrix, SquareMatrix};
use crate::par::Execution;
use crate::rational::{int, rat, Rational};

/// Per-row descending ranks of the transition probabilities.
///
/// Rank 1 is the largest positive entry of the row, ties share a rank, and
/// zero entries carry rank 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderMatrix {
    ranks: Vec<Vec<u32>>,
}

impl OrderMatrix {
    pub fn ranks(&self) -> &[Vec<u32>] {
        &self.ranks
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.ranks[x][y]
    }
}

impl fmt::Display for OrderMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.ranks {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn order_matrix(w: &Channel) -> OrderMatrix {
    let ranks = w
        .matrix()
        .rows()
        .map(|row| {
            let mut positive: Vec<&Rational> = row.iter().filter(|v| v.is_positive()).collect();
            positive.sort_by(|a, b| b.cmp(a));
            positive.dedup();
            row.iter()
                .map(|v| match positive.iter().position(|p| *p == v) {
                    Some(i) if v.is_positive() => i as u32 + 1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    OrderMatrix { ranks }
}

/// Two channels share a decision rule iff their order matrices coincide.
pub fn decision_rules_equal(w1: &Channel, w2: &Channel) -> Result<bool> {
    if w1.size() != w2.size() {
        return Err(Error::AlphabetMismatch {
            left: w1.size(),
            right: w2.size(),
        });
    }
    Ok(order_matrix(w1) == order_matrix(w2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Less,
    Equal,
}

/// `d({pivot, y}) < d({pivot, z})` or `d({pivot, y}) = d({pivot, z})`, as
/// forced by row `pivot` of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub pivot: usize,
    pub y: usize,
    pub z: usize,
    pub relation: Relation,
}

impl Constraint {
    pub fn from_pair(&self) -> (usize, usize) {
        ordered(self.pivot, self.y)
    }

    pub fn to_pair(&self) -> (usize, usize) {
        ordered(self.pivot, self.z)
    }

    /// Re-checks the witness against the channel.
    pub fn holds(&self, w: &Channel) -> bool {
        let n = w.size();
        let (x, y, z) = (self.pivot, self.y, self.z);
        if x >= n || y >= n || z >= n || y == z || y == x || z == x {
            return false;
        }
        let (py, pz) = (w.prob(x, y), w.prob(x, z));
        match self.relation {
            Relation::Less => py > pz,
            Relation::Equal => py == pz && py.is_positive(),
        }
    }

    fn flipped(&self) -> Constraint {
        Constraint {
            pivot: self.pivot,
            y: self.z,
            z: self.y,
            relation: self.relation,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.from_pair();
        let (c, d) = self.to_pair();
        let rel = match self.relation {
            Relation::Less => "<",
            Relation::Equal => "=",
        };
        write!(f, "pair{{{a},{b}}} {rel} pair{{{c},{d}}} @pivot {}", self.pivot)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Index of the unordered pair `{u, v}`, `u != v`, in lexicographic order of `(min, max)`.
fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = ordered(u, v);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Keeps the smaller index as the root so class representatives are canonical.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = ordered(ra, rb);
            self.parent[hi] = lo;
        }
    }
}

/// Distance constraints of a channel over unordered symbol pairs.
#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    n: usize,
    /// Pair node -> class id. Classes are numbered by their smallest pair node.
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    /// Strict class edges, each with the first witness in `(pivot, y, z)` order.
    strict: BTreeMap<(usize, usize), Constraint>,
    equalities: Vec<Constraint>,
    touched: Vec<bool>,
}

impl ConstraintGraph {
    pub fn symbols(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn pair_node(&self, u: usize, v: usize) -> usize {
        pair_index(self.n, u, v)
    }

    pub fn class_of_pair(&self, u: usize, v: usize) -> usize {
        self.class_of[pair_index(self.n, u, v)]
    }

    /// Pair nodes of each equality class.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Strict edges `from class -> to class` ("strictly smaller than").
    pub fn strict_edges(&self) -> impl Iterator<Item = (usize, usize, &Constraint)> {
        self.strict.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn has_strict_edge(&self, from: usize, to: usize) -> bool {
        self.strict.contains_key(&(from, to))
    }

    pub fn equality_witnesses(&self) -> &[Constraint] {
        &self.equalities
    }
}

pub fn build_constraint_graph(w: &Channel) -> Result<ConstraintGraph> {
    build_constraint_graph_with(w, Execution::default())
}

pub fn build_constraint_graph_with(w: &Channel, exec: Execution) -> Result<ConstraintGraph> {
    if let Some((received, sent)) = unreasonable_witness(w) {
        return Err(Error::Unreasonable { received, sent });
    }
    let n = w.size();
    let ranks = w.matrix().row_ranks();
    let per_pivot = exec.map_range(n, |x| {
        let row = w.matrix().row(x);
        let r = &ranks[x];
        let mut strict = Vec::new();
        let mut equal = Vec::new();
        for y in (0..n).filter(|&y| y != x) {
            for z in (0..n).filter(|&z| z != x && z != y) {
                if r[y] > r[z] {
                    strict.push(Constraint {
                        pivot: x,
                        y,
                        z,
                        relation: Relation::Less,
                    });
                } else if y < z && r[y] == r[z] && row[y].is_positive() {
                    equal.push(Constraint {
                        pivot: x,
                        y,
                        z,
                        relation: Relation::Equal,
                    });
                }
            }
        }
        (strict, equal)
    });

    let nodes = pair_count(n);
    let mut uf = UnionFind::new(nodes);
    let mut touched = vec![false; nodes];
    let mut equalities = Vec::new();
    let mut strict_raw = Vec::new();
    for (strict, equal) in per_pivot {
        for c in &equal {
            let (a, b) = (pair_index(n, c.pivot, c.y), pair_index(n, c.pivot, c.z));
            uf.union(a, b);
            touched[a] = true;
            touched[b] = true;
        }
        equalities.extend(equal);
        strict_raw.extend(strict);
    }

    let roots: Vec<usize> = (0..nodes).map(|i| uf.find(i)).collect();
    let mut class_id = vec![usize::MAX; nodes];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &root) in roots.iter().enumerate() {
        if class_id[root] == usize::MAX {
            class_id[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[class_id[root]].push(i);
    }
    let class_of: Vec<usize> = roots.iter().map(|&r| class_id[r]).collect();

    let mut strict = BTreeMap::new();
    for c in strict_raw {
        let (a, b) = (pair_index(n, c.pivot, c.y), pair_index(n, c.pivot, c.z));
        touched[a] = true;
        touched[b] = true;
        strict.entry((class_of[a], class_of[b])).or_insert(c);
    }
    Ok(ConstraintGraph {
        n,
        class_of,
        classes,
        strict,
        equalities,
        touched,
    })
}

/// Why no matched metric exists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// `Pr(received | received) <= Pr(received | sent)`: no positive distance
    /// can put `sent` at least as close as `received` itself.
    Unreasonable { received: usize, sent: usize },
    /// A closed chain of constraints with at least one strict link, forcing
    /// `d(p) < ... <= d(p)` for the first pair `p`.
    Cycle(Vec<Constraint>),
}

impl Certificate {
    pub fn len(&self) -> usize {
        match self {
            Certificate::Unreasonable { .. } => 1,
            Certificate::Cycle(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strict_count(&self) -> usize {
        match self {
            Certificate::Unreasonable { .. } => 0,
            Certificate::Cycle(c) => c.iter().filter(|r| r.relation == Relation::Less).count(),
        }
    }

    /// Parses the text produced by `Display`. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Certificate> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if let [(line, single)] = lines.as_slice() {
            if let Some(rest) = single.strip_prefix("unreasonable") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.split_once('=').and_then(|(_, v)| v.parse().ok()))
                    .collect::<Option<_>>()
                    .filter(|v: &Vec<usize>| v.len() == 2)
                    .ok_or_else(|| Error::Parse(format!("line {line}: expected `unreasonable x=<i> y=<j>`")))?;
                return Ok(Certificate::Unreasonable {
                    received: nums[0],
                    sent: nums[1],
                });
            }
        }
        if lines.is_empty() {
            return Err(Error::Parse("empty certificate".into()));
        }
        lines
            .iter()
            .map(|&(line, l)| parse_constraint(l).map_err(|e| Error::Parse(format!("line {line}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Certificate::Cycle)
    }
}

fn parse_pair(tok: &str) -> Option<(usize, usize)> {
    let inner = tok.strip_prefix("pair{")?.strip_suffix('}')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_constraint(line: &str) -> Result<Constraint> {
    let bad = || Error::Parse(format!("`{line}` is not `pair{{u,v}} <|= pair{{u,w}} @pivot u`"));
    let toks: Vec<&str> = line.split_whitespace().collect();
    let [from, rel, to, at, pivot] = toks.as_slice() else {
        return Err(bad());
    };
    if *at != "@pivot" {
        return Err(bad());
    }
    let relation = match *rel {
        "<" => Relation::Less,
        "=" => Relation::Equal,
        _ => return Err(bad()),
    };
    let pivot: usize = pivot.parse().map_err(|_| bad())?;
    let other = |(a, b): (usize, usize)| {
        if a == pivot {
            Some(b)
        } else if b == pivot {
            Some(a)
        } else {
            None
        }
    };
    let y = parse_pair(from).and_then(other).ok_or_else(bad)?;
    let z = parse_pair(to).and_then(other).ok_or_else(bad)?;
    Ok(Constraint { pivot, y, z, relation })
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Unreasonable { received, sent } => writeln!(f, "unreasonable x={received} y={sent}"),
            Certificate::Cycle(records) => {
                for r in records {
                    writeln!(f, "{r}")?;
                }
                Ok(())
            }
        }
    }
}

/// Re-validates every witness and the closure of the cycle.
pub fn verify_certificate(w: &Channel, cert: &Certificate) -> bool {
    match cert {
        Certificate::Unreasonable { received, sent } => {
            let n = w.size();
            *received < n && *sent < n && received != sent && w.prob(*received, *received) <= w.prob(*received, *sent)
        }
        Certificate::Cycle(records) => {
            !records.is_empty()
                && records.iter().any(|r| r.relation == Relation::Less)
                && records.iter().all(|r| r.holds(w))
                && (0..records.len()).all(|i| records[i].to_pair() == records[(i + 1) % records.len()].from_pair())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Found(DistanceMatrix),
    Refuted(Certificate),
}

impl Solution {
    pub fn distance(&self) -> Option<&DistanceMatrix> {
        match self {
            Solution::Found(d) => Some(d),
            Solution::Refuted(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Solution::Found(_) => None,
            Solution::Refuted(c) => Some(c),
        }
    }
}

pub fn find_matched_semimetric(w: &Channel) -> Result<Solution> {
    find_matched_semimetric_with(w, Execution::default())
}

pub fn find_matched_semimetric_with(w: &Channel, exec: Execution) -> Result<Solution> {
    let graph = match build_constraint_graph_with(w, exec) {
        Ok(g) => g,
        Err(Error::Unreasonable { received, sent }) => {
            return Ok(Solution::Refuted(Certificate::Unreasonable { received, sent }));
        }
        Err(e) => return Err(e),
    };
    let k = graph.classes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indegree = vec![0usize; k];
    for &(a, b) in graph.strict.keys() {
        succ[a].push(b);
        indegree[b] += 1;
    }

    let mut level = vec![1u64; k];
    let mut queue: VecDeque<usize> = (0..k).filter(|&c| indegree[c] == 0).collect();
    let mut done = 0;
    while let Some(c) = queue.pop_front() {
        done += 1;
        for &s in &succ[c] {
            level[s] = level[s].max(level[c] + 1);
            indegree[s] -= 1;
            if indegree[s] == 0 {
                queue.push_back(s);
            }
        }
    }
    if done < k {
        let cyclic: Vec<usize> = (0..k).filter(|&c| indegree[c] > 0).collect();
        return Ok(Solution::Refuted(shortest_certificate(&graph, &succ, &cyclic, exec)));
    }

    let n = graph.n;
    let touched_max = (0..graph.node_count())
        .filter(|&i| graph.touched[i])
        .map(|i| level[graph.class_of[i]])
        .max()
        .unwrap_or(0);
    let node_level = |i: usize| {
        if graph.touched[i] {
            level[graph.class_of[i]]
        } else {
            touched_max + 1
        }
    };
    let matrix = SquareMatrix::from_fn(n, |u, v| {
        if u == v {
            Rational::zero()
        } else {
            int(node_level(pair_index(n, u, v)) as i64)
        }
    });
    Ok(Solution::Found(DistanceMatrix::new(
        w.alphabet().clone(),
        matrix,
        DistanceKind::Semimetric,
    )?))
}

/// Shortest directed cycle over the strict class graph, smallest starting
/// class on ties, expanded into pair-level constraints.
fn shortest_certificate(
    graph: &ConstraintGraph,
    succ: &[Vec<usize>],
    cyclic: &[usize],
    exec: Execution,
) -> Certificate {
    let in_core = {
        let mut v = vec![false; succ.len()];
        for &c in cyclic {
            v[c] = true;
        }
        v
    };
    let best = exec
        .map_slice(cyclic, |&start| shortest_cycle_through(succ, &in_core, start))
        .into_iter()
        .flatten()
        .min_by_key(|cycle| (cycle.len(), cycle[0]))
        .expect("a graph that fails topological sorting has a cycle");

    let mut eq_adj: Vec<Vec<Constraint>> = vec![Vec::new(); graph.node_count()];
    for c in &graph.equalities {
        let (a, b) = (pair_index(graph.n, c.pivot, c.y), pair_index(graph.n, c.pivot, c.z));
        eq_adj[a].push(*c);
        eq_adj[b].push(c.flipped());
    }

    let hops: Vec<Constraint> = (0..best.len())
        .map(|i| graph.strict[&(best[i], best[(i + 1) % best.len()])])
        .collect();
    let mut records = Vec::new();
    for i in 0..hops.len() {
        let here = hops[i];
        let next = hops[(i + 1) % hops.len()];
        records.push(here);
        let from = pair_index(graph.n, here.pivot, here.z);
        let to = pair_index(graph.n, next.pivot, next.y);
        records.extend(equality_path(graph.n, &eq_adj, from, to));
    }
    Certificate::Cycle(records)
}

fn shortest_cycle_through(succ: &[Vec<usize>], in_core: &[bool], start: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; succ.len()];
    let mut seen = vec![false; succ.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if !in_core[v] {
                continue;
            }
            if v == start {
                let mut path = vec![u];
                while *path.last().expect("nonempty") != start {
                    path.push(parent[*path.last().expect("nonempty")]);
                }
                path.reverse();
                return Some(path);
            }
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Equality witnesses leading from pair node `from` to pair node `to` (same class).
fn equality_path(n: usize, adj: &[Vec<Constraint>], from: usize, to: usize) -> Vec<Constraint> {
    if from == to {
        return Vec::new();
    }
    let mut via: Vec<Option<Constraint>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for c in &adj[u] {
            let v = pair_index(n, c.pivot, c.z);
            if seen[v] {
                continue;
            }
            seen[v] = true;
            via[v] = Some(*c);
            if v == to {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let step = via[cur].expect("reached through a witness");
                    path.push(step);
                    cur = pair_index(n, step.pivot, step.y);
                }
                path.reverse();
                return path;
            }
            queue.push_back(v);
        }
    }
    unreachable!("pair nodes {from} and {to} share an equality class")
}

/// Squeeze parameter used to turn solver semimetrics into metrics.
pub fn solver_squeeze_delta() -> Rational {
    rat(1, 4)
}

/// [`find_matched_semimetric`] followed by the squeeze; every returned
/// metric has passed [`check_matched`].
pub fn find_matched_metric(w: &Channel) -> Result<Solution> {
    find_matched_metric_with(w, Execution::default())
}

pub fn find_matched_metric_with(w: &Channel, exec: Execution) -> Result<Solution> {
    match find_matched_semimetric_with(w, exec)? {
        Solution::Found(e) => {
            let d = squeeze(&e, &solver_squeeze_delta())?;
            match check_matched(w, &d)? {
                Verdict::Matched => Ok(Solution::Found(d)),
                Verdict::Violated(v) => Err(Error::Invariant(format!("solver witness is not matched: {v}"))),
            }
        }
        refuted => Ok(refuted),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacScanRow {
    pub n: usize,
    pub p: Rational,
    pub q: Rational,
    pub solution: Solution,
    /// Grid points share a class iff their order matrices coincide; classes
    /// are numbered from 0 by first appearance.
    pub rule_class: usize,
}

impl fmt::Display for BacScanRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.solution {
            Solution::Found(_) => "metric",
            Solution::Refuted(_) => "certificate",
        };
        write!(
            f,
            "n={} p={} q={} verdict={} rule_class={}",
            self.n, self.p, self.q, verdict, self.rule_class
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacScanReport {
    pub rows: Vec<BacScanRow>,
}

impl BacScanReport {
    pub fn all_feasible(&self) -> bool {
        self.rows.iter().all(|r| matches!(r.solution, Solution::Found(_)))
    }

    pub fn rule_classes(&self) -> usize {
        self.rows.iter().map(|r| r.rule_class + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for BacScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Runs the solver on `BAC(n, p, q)` for every grid point.
pub fn bac_scan(n: usize, grid: &[(Rational, Rational)]) -> Result<BacScanReport> {
    bac_scan_with(n, grid, Execution::default())
}

pub fn bac_scan_with(n: usize, grid: &[(Rational, Rational)], exec: Execution) -> Result<BacScanReport> {
    if grid.is_empty() {
        return Err(Error::OutOfRange("BAC grid must be nonempty".into()));
    }
    if let Some((p, q)) = grid.iter().find(|(p, _)| !p.is_positive()) {
        return Err(Error::OutOfRange(format!(
            "BAC scan needs 0 < p < q < 1/2, got p = {p}, q = {q}"
        )));
    }
    let results = exec.map_slice(grid, |(p, q)| -> Result<(OrderMatrix, Solution)> {
        let w = make_bac(n, p, q)?;
        Ok((order_matrix(&w), find_matched_metric_with(&w, Execution::Sequential)?))
    });
    let mut seen: Vec<OrderMatrix> = Vec::new();
    let mut rows = Vec::with_capacity(grid.len());
    for ((p, q), r) in grid.iter().zip(results) {
        let (order, solution) = r?;
        let rule_class = match seen.iter().position(|o| *o == order) {
            Some(i) => i,
            None => {
                seen.push(order);
                seen.len() - 1
            }
        };
        rows.push(BacScanRow {
            n,
            p: p.clone(),
            q: q.clone(),
            solution,
            rule_class,
        });
    }
    Ok(BacScanReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{make_bsc, make_z_channel};

    fn ranks(rows: &[&[u32]]) -> Vec<Vec<u32>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn pair_indexing_is_dense() {
        let n = 5;
        let mut seen = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                seen.push(pair_index(n, u, v));
                assert_eq!(pair_index(n, u, v), pair_index(n, v, u));
            }
        }
        assert_eq!(seen, (0..pair_count(n)).collect::<Vec<_>>());
    }

    #[test]
    fn order_matrix_bac2() {
        let w = make_bac(2, &rat(1, 10), &rat(2, 10)).unwrap();
        assert_eq!(
            order_matrix(&w).ranks(),
            ranks(&[&[1, 2, 2, 3], &[3, 1, 4, 2], &[3, 4, 1, 2], &[3, 2, 2, 1]]).as_slice()
        );
    }

    #[test]
    fn order_matrix_small() {
        assert_eq!(
            order_matrix(&make_bsc(1, &rat(1, 4)).unwrap()).ranks(),
            ranks(&[&[1, 2], &[2, 1]]).as_slice()
        );
        assert_eq!(
            order_matrix(&make_z_channel(1, &rat(1, 4)).unwrap()).ranks(),
            ranks(&[&[1, 2], &[0, 1]]).as_slice()
        );
    }

    #[test]
    fn decision_rules() {
        let a = make_bac(3, &rat(1, 10), &rat(2, 10)).unwrap();
        let b = make_bac(3, &rat(1, 10), &rat(4, 10)).unwrap();
        assert!(!decision_rules_equal(&a, &b).unwrap());
        let c = make_bac(2, &rat(1, 10), &rat(2, 10)).unwrap();
        let d = make_bac(2, &rat(1, 8), &rat(3, 8)).unwrap();
        assert!(decision_rules_equal(&c, &d).unwrap());
        assert!(decision_rules_equal(&a, &a).unwrap());
        assert!(decision_rules_equal(&a, &c).is_err());
    }

    #[test]
    fn three_cycle_graph_has_three_cycle() {
        let g = build_constraint_graph(&fixtures::three_cycle_channel()).unwrap();
        let (xy, xz, yz) = (g.class_of_pair(0, 1), g.class_of_pair(0, 2), g.class_of_pair(1, 2));
        assert!(g.has_strict_edge(xy, xz));
        assert!(g.has_strict_edge(xz, yz));
        assert!(g.has_strict_edge(yz, xy));
    }

    #[test]
    fn bsc_graph_classes_by_hamming_distance() {
        let g = build_constraint_graph(&make_bsc(2, &rat(1, 10)).unwrap()).unwrap();
        // {00,11} and {01,10} never share a row, so they stay apart.
        assert_eq!(g.classes().len(), 3);
        let near = g.class_of_pair(0b00, 0b01);
        assert_eq!(g.class_of_pair(0b01, 0b11), near);
        let (far_a, far_b) = (g.class_of_pair(0b00, 0b11), g.class_of_pair(0b01, 0b10));
        assert_ne!(far_a, far_b);
        let edges: Vec<(usize, usize)> = g.strict_edges().map(|(a, b, _)| (a, b)).collect();
        assert_eq!(edges.len(), 2);
        assert!(edges.contains(&(near, far_a)) && edges.contains(&(near, far_b)));
    }

    #[test]
    fn two_symbol_graph() {
        let g = build_constraint_graph(&make_bsc(1, &rat(1, 3)).unwrap()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.strict_edges().count(), 0);
    }

    #[test]
    fn unreasonable_channel_graph_error() {
        let flat = Channel::from_rows(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]).unwrap();
        assert!(matches!(
            build_constraint_graph(&flat),
            Err(Error::Unreasonable { received: 0, sent: 1 })
        ));
        let sol = find_matched_metric(&flat).unwrap();
        let cert = sol.certificate().unwrap();
        assert_eq!(cert, &Certificate::Unreasonable { received: 0, sent: 1 });
        assert!(verify_certificate(&flat, cert));
    }

    #[test]
    fn three_cycle_certificate() {
        let w = fixtures::three_cycle_channel();
        let sol = find_matched_semimetric(&w).unwrap();
        let cert = sol.certificate().unwrap();
        assert_eq!(cert.len(), 3);
        assert_eq!(cert.strict_count(), 3);
        assert!(verify_certificate(&w, cert));
        assert_eq!(
            cert.to_string(),
            "pair{0,1} < pair{0,2} @pivot 0\npair{0,2} < pair{1,2} @pivot 2\npair{1,2} < pair{0,1} @pivot 1\n"
        );
        assert_eq!(&Certificate::parse(&cert.to_string()).unwrap(), cert);
    }

    #[test]
    fn tampered_certificates_fail() {
        let w = fixtures::three_cycle_channel();
        let cert = find_matched_metric(&w).unwrap().certificate().cloned().unwrap();
        let Certificate::Cycle(records) = cert else {
            panic!("cycle expected")
        };

        let mut broken = records.clone();
        broken[0] = Constraint {
            pivot: 0,
            y: 2,
            z: 1,
            relation: Relation::Less,
        };
        assert!(!verify_certificate(&w, &Certificate::Cycle(broken)));

        let equal_only: Vec<Constraint> = records
            .iter()
            .map(|r| Constraint {
                relation: Relation::Equal,
                ..*r
            })
            .collect();
        assert!(!verify_certificate(&w, &Certificate::Cycle(equal_only)));

        assert!(!verify_certificate(&w, &Certificate::Cycle(records[..2].to_vec())));
        assert!(!verify_certificate(&w, &Certificate::Cycle(Vec::new())));

        // Edit a probability instead of the record.
        let edited = Channel::from_rows(vec![
            vec![rat(1, 2), rat(1, 6), rat(1, 6)],
            vec![rat(1, 6), rat(1, 2), rat(1, 3)],
            vec![rat(1, 3), rat(1, 3), rat(1, 2)],
        ])
        .unwrap();
        assert!(!verify_certificate(&edited, &Certificate::Cycle(records)));
    }

    #[test]
    fn equality_links_appear_in_certificates() {
        // Row 0 ties {0,1} and {0,2}; rows 1 and 2 then close a strict cycle through that tie.
        let w = Channel::from_rows(vec![
            vec![rat(1, 2), rat(1, 4), rat(1, 4), int(0)],
            vec![rat(1, 4), rat(1, 2), rat(1, 8), rat(1, 4)],
            vec![rat(1, 8), rat(1, 8), rat(1, 2), rat(1, 4)],
            vec![rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 2)],
        ])
        .unwrap();
        let sol = find_matched_metric(&w).unwrap();
        if let Some(cert) = sol.certificate() {
            assert!(verify_certificate(&w, cert));
        } else {
            assert!(check_matched(&w, sol.distance().unwrap()).unwrap().is_matched());
        }
    }

    #[test]
    fn bac2_semimetric_shape() {
        let w = make_bac(2, &rat(1, 10), &rat(2, 10)).unwrap();
        let e = find_matched_semimetric(&w).unwrap().distance().cloned().unwrap();
        let d = |u: usize, v: usize| e.get(u, v).clone();
        // a = d(00,01) = d(00,10), b = d(00,11), c = d(01,10), d' = d(01,11) = d(10,11)
        assert_eq!(d(0, 1), d(0, 2));
        assert_eq!(d(1, 3), d(2, 3));
        assert!(d(1, 3) < d(0, 1) && d(0, 1) < d(0, 3));
        assert!(d(0, 1) < d(1, 2));
    }

    #[test]
    fn bsc_levels_are_hamming() {
        for n in 1..=4 {
            let w = make_bsc(n, &rat(1, 5)).unwrap();
            let e = find_matched_semimetric(&w).unwrap().distance().cloned().unwrap();
            let size = 1 << n;
            for u in 0..size {
                for v in 0..size {
                    assert_eq!(e.get(u, v), &int((u ^ v).count_ones() as i64), "n={n} ({u},{v})");
                }
            }
        }
    }

    #[test]
    fn solver_finds_z_metric() {
        let w = make_z_channel(3, &rat(1, 4)).unwrap();
        let d = find_matched_metric(&w).unwrap().distance().cloned().unwrap();
        assert!(check_matched(&w, &d).unwrap().is_matched());
        assert_eq!(d.kind(), DistanceKind::Metric);
    }

    #[test]
    fn identity_channel_uses_unconstrained_level() {
        let w = Channel::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        let e = find_matched_semimetric(&w).unwrap().distance().cloned().unwrap();
        assert_eq!(e.get(0, 1), &int(1));
    }

    #[test]
    fn bac_scans() {
        let grid2 = vec![(rat(1, 10), rat(2, 10)), (rat(1, 8), rat(3, 8)), (rat(1, 5), rat(1, 4))];
        let r2 = bac_scan(2, &grid2).unwrap();
        assert!(r2.all_feasible());
        assert_eq!(r2.rule_classes(), 1);
        let r3 = bac_scan(3, &[(rat(1, 10), rat(2, 10)), (rat(1, 10), rat(4, 10))]).unwrap();
        assert!(r3.all_feasible());
        assert_eq!(r3.rule_classes(), 2);
        assert_eq!(
            r3.to_string(),
            "n=3 p=1/10 q=1/5 verdict=metric rule_class=0\nn=3 p=1/10 q=2/5 verdict=metric rule_class=1\n"
        );
        assert!(bac_scan(2, &[(int(0), rat(1, 4))]).is_err());
        assert!(bac_scan(2, &[]).is_err());
    }

    #[test]
    fn certificate_text_errors() {
        assert!(Certificate::parse("").is_err());
        assert!(Certificate::parse("pair{0,1} < pair{2,3} @pivot 0").is_err());
        assert!(Certificate::parse("pair{0,1} <= pair{0,2} @pivot 0").is_err());
        assert_eq!(
            Certificate::parse("# note\nunreasonable x=2 y=0\n").unwrap(),
            Certificate::Unreasonable { received: 2, sent: 0 }
        );
    }
}
