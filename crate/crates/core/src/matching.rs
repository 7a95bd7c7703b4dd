//! Decoders, the matched-pair oracle and decision-chain obstructions.
//!
//! `W` and `d` are matched iff for every received `x` and every `y != z`
//! with `Pr(x|y) > 0` or `Pr(x|z) > 0`:
//!
//! ```text
//! Pr(x|y) > Pr(x|z)   <=>   d(x,y) < d(x,z)
//! ```
//!
//! Checking both orientations of each pair forces probability ties and
//! distance ties to coincide as well.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Channel, Code, DistanceMatrix, ReverseKernel, SquareMatrix};
use crate::par::Execution;
use crate::rational::Rational;

/// Maximum-likelihood decoding: every codeword maximizing `Pr(x | y)`.
pub fn ml_decode(w: &Channel, code: &Code, received: usize) -> BTreeSet<usize> {
    arg_extreme(code, |y| w.prob(received, y), std::cmp::Ordering::Greater)
}

/// Nearest-neighbour decoding: every codeword minimizing `d(x, y)`.
pub fn nn_decode(d: &DistanceMatrix, code: &Code, received: usize) -> BTreeSet<usize> {
    arg_extreme(code, |y| d.get(received, y), std::cmp::Ordering::Less)
}

fn arg_extreme<'a>(code: &Code, value: impl Fn(usize) -> &'a Rational, better: std::cmp::Ordering) -> BTreeSet<usize> {
    let mut best: Option<&Rational> = None;
    let mut set = BTreeSet::new();
    for &y in code.members() {
        let v = value(y);
        match best.map(|b| v.cmp(b)) {
            None => {
                best = Some(v);
                set.insert(y);
            }
            Some(o) if o == better => {
                best = Some(v);
                set.clear();
                set.insert(y);
            }
            Some(std::cmp::Ordering::Equal) => {
                set.insert(y);
            }
            Some(_) => {}
        }
    }
    set
}

/// How a triple breaks the biconditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// The strict probability order and the strict distance order disagree.
    Reversed,
    /// Probabilities are strictly ordered but the distances are tied.
    DistanceTie,
    /// Probabilities are tied but the distances differ.
    ProbabilityTie,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Reversed => "orders reversed",
            ViolationKind::DistanceTie => "strict probabilities, tied distances",
            ViolationKind::ProbabilityTie => "tied probabilities, strict distances",
        })
    }
}

/// A triple `(x, y, z)` witnessing that a channel and a distance are not matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub pivot: usize,
    pub y: usize,
    pub z: usize,
    pub kind: ViolationKind,
    pub prob_y: Rational,
    pub prob_z: Rational,
    pub dist_y: Rational,
    pub dist_z: Rational,
}

impl Violation {
    /// Re-evaluates the recorded values: true iff they break the biconditional.
    pub fn is_genuine(&self) -> bool {
        let lhs = self.prob_y > self.prob_z;
        let rhs = self.dist_y < self.dist_z;
        lhs != rhs && !(self.prob_y.is_zero() && self.prob_z.is_zero())
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at x={} y={} z={}: Pr(x|y)={} Pr(x|z)={} d(x,y)={} d(x,z)={} ({})",
            self.pivot, self.y, self.z, self.prob_y, self.prob_z, self.dist_y, self.dist_z, self.kind
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Matched,
    Violated(Box<Violation>),
}

impl Verdict {
    pub fn is_matched(&self) -> bool {
        matches!(self, Verdict::Matched)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Matched => None,
            Verdict::Violated(v) => Some(v),
        }
    }
}

/// Scans all ordered triples `(x, y, z)`, `y != z`, in lexicographic order.
/// `likelihood` rows are indexed by the pivot; larger means more likely.
fn scan_triples(
    likelihood: &SquareMatrix,
    distance: &SquareMatrix,
    skip_double_zero: bool,
    exec: Execution,
) -> Verdict {
    let n = likelihood.n();
    let found = exec.find_first(n, |x| {
        let prow = likelihood.row(x);
        let drow = distance.row(x);
        let pr = crate::rational::dense_ranks(prow);
        let dr = crate::rational::dense_ranks(drow);
        for y in 0..n {
            for z in 0..n {
                if y == z || (skip_double_zero && prow[y].is_zero() && prow[z].is_zero()) {
                    continue;
                }
                let lhs = pr[y] > pr[z];
                let rhs = dr[y] < dr[z];
                if lhs == rhs {
                    continue;
                }
                let kind = if lhs && dr[y] == dr[z] {
                    ViolationKind::DistanceTie
                } else if rhs && pr[y] == pr[z] {
                    ViolationKind::ProbabilityTie
                } else {
                    ViolationKind::Reversed
                };
                return Some(Violation {
                    pivot: x,
                    y,
                    z,
                    kind,
                    prob_y: prow[y].clone(),
                    prob_z: prow[z].clone(),
                    dist_y: drow[y].clone(),
                    dist_z: drow[z].clone(),
                });
            }
        }
        None
    });
    match found {
        Some(v) => Verdict::Violated(Box::new(v)),
        None => Verdict::Matched,
    }
}

pub fn check_matched(w: &Channel, d: &DistanceMatrix) -> Result<Verdict> {
    check_matched_with(w, d, Execution::default())
}

pub fn check_matched_with(w: &Channel, d: &DistanceMatrix, exec: Execution) -> Result<Verdict> {
    w.alphabet().ensure_compatible(d.alphabet())?;
    Ok(scan_triples(w.matrix(), d.matrix(), true, exec))
}

/// The posterior form: `Pr(y sent | x) > Pr(z sent | x)` iff `d(x,y) < d(x,z)`.
pub fn check_matched_reverse(k: &ReverseKernel, d: &DistanceMatrix) -> Result<Verdict> {
    k.alphabet().ensure_compatible(d.alphabet())?;
    Ok(scan_triples(k.matrix(), d.matrix(), false, Execution::default()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub code: Vec<usize>,
    pub received: usize,
    pub ml: BTreeSet<usize>,
    pub nn: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeAgreement {
    /// Codes enumerated, counting each code once.
    pub codes_checked: u64,
    pub disagreement: Option<Disagreement>,
}

impl CodeAgreement {
    pub fn agrees(&self) -> bool {
        self.disagreement.is_none()
    }
}

/// Default ceiling on `codes x received words` for [`cross_validate_codes`].
pub const DEFAULT_CODE_BUDGET: u128 = 20_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Compares ML and NN decoding on every code with `2 <= |C| <= max_size`
/// and every received word.
///
/// A received word that no codeword can produce (all likelihoods zero) is
/// skipped: ML decoding is vacuous there and the pairwise criterion imposes
/// nothing on such rows.
pub fn cross_validate_codes(w: &Channel, d: &DistanceMatrix, max_size: usize) -> Result<CodeAgreement> {
    cross_validate_codes_with(w, d, max_size, DEFAULT_CODE_BUDGET, Execution::default())
}

pub fn cross_validate_codes_with(
    w: &Channel,
    d: &DistanceMatrix,
    max_size: usize,
    budget: u128,
    exec: Execution,
) -> Result<CodeAgreement> {
    w.alphabet().ensure_compatible(d.alphabet())?;
    if max_size < 2 {
        return Err(Error::OutOfRange(format!(
            "max code size must be at least 2, got {max_size}"
        )));
    }
    let n = w.size();
    let top = max_size.min(n);
    let needed: u128 = (2..=top).map(|k| binomial(n as u128, k as u128)).sum::<u128>() * n as u128;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let mut codes_checked = 0u64;
    for size in 2..=top {
        let codes = combinations(n, size);
        codes_checked += codes.len() as u64;
        let first = exec.find_first_in(&codes, |members| {
            let code = Code::new(n, members.iter().copied()).expect("valid combination");
            (0..n).find_map(|x| {
                if members.iter().all(|&y| w.prob(x, y).is_zero()) {
                    return None;
                }
                let ml = ml_decode(w, &code, x);
                let nn = nn_decode(d, &code, x);
                (ml != nn).then(|| Disagreement {
                    code: members.clone(),
                    received: x,
                    ml,
                    nn,
                })
            })
        });
        if let Some(dis) = first {
            return Ok(CodeAgreement {
                codes_checked,
                disagreement: Some(dis),
            });
        }
    }
    Ok(CodeAgreement {
        codes_checked,
        disagreement: None,
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The `t`-decision region centred at `x`: every `y` with `Pr(x|y) >= t`.
pub fn decision_region(w: &Channel, x: usize, t: &Rational) -> BTreeSet<usize> {
    (0..w.size()).filter(|&y| w.prob(x, y) >= t).collect()
}

/// A decision chain `x_0, ..., x_{r-1}` with thresholds `t_0, ..., t_{r-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub symbols: Vec<usize>,
    pub thresholds: Vec<Rational>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Checks the forward-inclusion and backward-exclusion properties
    /// directly through decision regions, independently of the search.
    pub fn validate(&self, w: &Channel) -> bool {
        let r = self.symbols.len();
        if r < 3 || self.thresholds.len() != r {
            return false;
        }
        let distinct: BTreeSet<usize> = self.symbols.iter().copied().collect();
        if distinct.len() != r || self.symbols.iter().any(|&s| s >= w.size()) {
            return false;
        }
        if self.thresholds.iter().any(|t| !t.is_positive()) {
            return false;
        }
        (0..r).all(|i| {
            let next = (i + 1) % r;
            let forward = decision_region(w, self.symbols[i], &self.thresholds[i]).contains(&self.symbols[next]);
            let backward = !decision_region(w, self.symbols[next], &self.thresholds[next]).contains(&self.symbols[i]);
            forward && backward
        })
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .symbols
            .iter()
            .zip(&self.thresholds)
            .map(|(s, t)| format!("{s} (t={t})"))
            .collect();
        write!(f, "chain of length {}: {}", self.len(), parts.join(" -> "))
    }
}

/// Default chain length bound: `min(N, 8)`.
pub fn default_max_chain_len(n: usize) -> usize {
    n.min(8)
}

/// Searches for the lexicographically first decision chain of length
/// `3..=max_len` over distinct symbols.
///
/// Thresholds exist iff `Pr(x_i | x_{i+1}) > Pr(x_i | x_{i-1})` for every
/// `i` (cyclically); the returned witness uses the midpoint of each
/// admissible interval.
pub fn detect_decision_chain(w: &Channel, max_len: usize) -> Result<Option<Chain>> {
    detect_decision_chain_with(w, max_len, Execution::default())
}

pub fn detect_decision_chain_with(w: &Channel, max_len: usize, exec: Execution) -> Result<Option<Chain>> {
    if max_len < 3 {
        return Err(Error::OutOfRange(format!(
            "chain length bound must be at least 3, got {max_len}"
        )));
    }
    let n = w.size();
    let max_len = max_len.min(n);
    if max_len < 3 {
        return Ok(None);
    }
    let ranks = w.matrix().row_ranks();
    // A lexicographically first chain starts at its smallest symbol.
    let found = exec.find_first(n, |start| {
        let mut path = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        chain_dfs(&ranks, max_len, &mut path, &mut used).then_some(path)
    });
    let Some(symbols) = found else {
        return Ok(None);
    };
    let r = symbols.len();
    let thresholds = (0..r)
        .map(|i| {
            let x = symbols[i];
            let prev = symbols[(i + r - 1) % r];
            let next = symbols[(i + 1) % r];
            (w.prob(x, prev) + w.prob(x, next)) / crate::rational::int(2)
        })
        .collect();
    let chain = Chain { symbols, thresholds };
    if !chain.validate(w) {
        return Err(Error::Invariant(format!(
            "decision chain failed re-validation: {chain}"
        )));
    }
    Ok(Some(chain))
}

/// `x_i` is admissible between `prev` and `next` when `Pr(x_i|next) > Pr(x_i|prev)`.
fn admissible(ranks: &[Vec<u32>], prev: usize, x: usize, next: usize) -> bool {
    ranks[x][next] > ranks[x][prev]
}

fn chain_dfs(ranks: &[Vec<u32>], max_len: usize, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let len = path.len();
    let start = path[0];
    if len >= 3 {
        let last = path[len - 1];
        if admissible(ranks, path[len - 2], last, start) && admissible(ranks, last, start, path[1]) {
            return true;
        }
    }
    if len == max_len {
        return false;
    }
    let n = used.len();
    for next in start + 1..n {
        if used[next] {
            continue;
        }
        if len >= 2 && !admissible(ranks, path[len - 2], path[len - 1], next) {
            continue;
        }
        path.push(next);
        used[next] = true;
        if chain_dfs(ranks, max_len, path, used) {
            return true;
        }
        used[next] = false;
        path.pop();
    }
    false
}
