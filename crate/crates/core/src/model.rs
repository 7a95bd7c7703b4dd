//! Alphabets, channels, reverse kernels, distance matrices and codes.
//!
//! Matrices are square and row-major. For a [`Channel`] the row is the
//! received symbol and the column the sent one, so `P[x][y] = Pr(x | y)` and
//! every column sums to one. Binary words of length `n` are indexed by their
//! big-endian value: index `i` is the word whose leftmost letter is the most
//! significant bit of `i`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rational::{dense_ranks, is_probability, Rational};

/// Largest alphabet any generator will build unless told otherwise. The exact
/// checks are cubic in the alphabet size.
pub const DEFAULT_MAX_ALPHABET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlphabet("alphabet must be nonempty".into()));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be nonempty".into()));
        }
        let unique: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidAlphabet("labels must be distinct".into()));
        }
        if let Some(bad) = labels
            .iter()
            .find(|l| l.is_empty() || l.chars().any(char::is_whitespace))
        {
            return Err(Error::InvalidAlphabet(format!(
                "label `{bad}` is empty or contains whitespace"
            )));
        }
        Ok(Alphabet {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    /// All binary words of length `n`, labelled by their big-endian bitstring.
    pub fn binary(n: usize) -> Result<Self> {
        check_size(2, n, DEFAULT_MAX_ALPHABET)?;
        let size = 1usize << n;
        Ok(Alphabet {
            size,
            labels: Some((0..size).map(|i| bitstring(i, n)).collect()),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of `i`, or the index itself when the alphabet is unlabelled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn ensure_compatible(&self, other: &Alphabet) -> Result<()> {
        if self.size != other.size {
            return Err(Error::AlphabetMismatch {
                left: self.size,
                right: other.size,
            });
        }
        if let (Some(a), Some(b)) = (&self.labels, &other.labels) {
            if a != b {
                return Err(Error::InvalidAlphabet("alphabets carry different labels".into()));
            }
        }
        Ok(())
    }
}

pub fn bitstring(i: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (i >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_size(base: usize, n: usize, limit: usize) -> Result<usize> {
    let size = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if n > 64 || size > limit as u128 {
        return Err(Error::AlphabetTooLarge { size, limit });
    }
    Ok(size as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl SquareMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        SquareMatrix { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::Parse(format!("row {r} has {} entries, expected {n}", row.len())));
        }
        Ok(SquareMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::rational::int(v)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.n.max(1))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn column_sum(&self, c: usize) -> Rational {
        (0..self.n).map(|r| self.get(r, c)).sum()
    }

    pub fn row_sum(&self, r: usize) -> Rational {
        self.row(r).iter().sum()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &SquareMatrix) -> Self {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn map(&self, f: impl FnMut(&Rational) -> Rational) -> Self {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Dense ascending ranks of every row (see [`dense_ranks`]).
    pub fn row_ranks(&self) -> Vec<Vec<u32>> {
        self.rows().map(dense_ranks).collect()
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A discrete memoryless channel, `P[x][y] = Pr(x received | y sent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    alphabet: Alphabet,
    matrix: SquareMatrix,
}

impl Channel {
    pub fn new(alphabet: Alphabet, matrix: SquareMatrix) -> Result<Self> {
        if alphabet.size() != matrix.n() {
            return Err(Error::AlphabetMismatch {
                left: alphabet.size(),
                right: matrix.n(),
            });
        }
        let n = matrix.n();
        for x in 0..n {
            for y in 0..n {
                if !is_probability(matrix.get(x, y)) {
                    return Err(Error::NotStochastic(format!(
                        "entry ({x},{y}) = {} is not in [0, 1]",
                        matrix.get(x, y)
                    )));
                }
            }
        }
        for y in 0..n {
            let sum = matrix.column_sum(y);
            if !sum.is_one() {
                return Err(Error::NotStochastic(format!("column {y} sums to {sum}, expected 1")));
            }
        }
        Ok(Channel { alphabet, matrix })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let matrix = SquareMatrix::from_rows(rows)?;
        Channel::new(Alphabet::new(matrix.n())?, matrix)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    /// `Pr(received | sent)`.
    pub fn prob(&self, received: usize, sent: usize) -> &Rational {
        self.matrix.get(received, sent)
    }
}

/// Posterior kernel `Q[x][y] = Pr(y sent | x received)`; rows sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseKernel {
    alphabet: Alphabet,
    matrix: SquareMatrix,
}

impl ReverseKernel {
    pub fn new(alphabet: Alphabet, matrix: SquareMatrix) -> Result<Self> {
        if alphabet.size() != matrix.n() {
            return Err(Error::AlphabetMismatch {
                left: alphabet.size(),
                right: matrix.n(),
            });
        }
        let n = matrix.n();
        for x in 0..n {
            for y in 0..n {
                let v = matrix.get(x, y);
                if !v.is_positive() || v > &Rational::one() {
                    return Err(Error::NotStochastic(format!("entry ({x},{y}) = {v} is not in (0, 1]")));
                }
            }
            let sum = matrix.row_sum(x);
            if !sum.is_one() {
                return Err(Error::NotStochastic(format!("row {x} sums to {sum}, expected 1")));
            }
        }
        Ok(ReverseKernel { alphabet, matrix })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    /// `Pr(sent | received)`.
    pub fn posterior(&self, received: usize, sent: usize) -> &Rational {
        self.matrix.get(received, sent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Symmetric, zero exactly on the diagonal; the triangle inequality may fail.
    Semimetric,
    /// A semimetric whose triangle inequality has been verified.
    Metric,
}

impl DistanceKind {
    pub fn token(self) -> &'static str {
        match self {
            DistanceKind::Semimetric => "semimetric",
            DistanceKind::Metric => "metric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    alphabet: Alphabet,
    matrix: SquareMatrix,
    kind: DistanceKind,
}

impl DistanceMatrix {
    /// Validates the axioms required by `kind`.
    pub fn new(alphabet: Alphabet, matrix: SquareMatrix, kind: DistanceKind) -> Result<Self> {
        if alphabet.size() != matrix.n() {
            return Err(Error::AlphabetMismatch {
                left: alphabet.size(),
                right: matrix.n(),
            });
        }
        let report = validate_distance_with(&matrix, kind == DistanceKind::Metric, Execution::default());
        if let Some((u, v)) = report.symmetry_violation {
            return Err(Error::InvalidDistance(format!(
                "d({u},{v}) = {} but d({v},{u}) = {}",
                matrix.get(u, v),
                matrix.get(v, u)
            )));
        }
        if let Some((u, v)) = report.positivity_violation {
            let what = if u == v {
                "diagonal entry must be 0"
            } else {
                "off-diagonal entry must be positive"
            };
            return Err(Error::InvalidDistance(format!(
                "d({u},{v}) = {}: {what}",
                matrix.get(u, v)
            )));
        }
        if let Some((u, v, w)) = report.triangle_violation {
            return Err(Error::InvalidDistance(format!(
                "triangle inequality fails: d({u},{v}) + d({v},{w}) < d({u},{w})"
            )));
        }
        Ok(DistanceMatrix { alphabet, matrix, kind })
    }

    pub fn semimetric(matrix: SquareMatrix) -> Result<Self> {
        DistanceMatrix::new(Alphabet::new(matrix.n())?, matrix, DistanceKind::Semimetric)
    }

    pub fn metric(matrix: SquareMatrix) -> Result<Self> {
        DistanceMatrix::new(Alphabet::new(matrix.n())?, matrix, DistanceKind::Metric)
    }

    /// For constructions whose output is correct by construction and whose
    /// cubic re-validation would dominate the cost.
    pub(crate) fn new_unchecked(alphabet: Alphabet, matrix: SquareMatrix, kind: DistanceKind) -> Self {
        debug_assert_eq!(alphabet.size(), matrix.n());
        DistanceMatrix { alphabet, matrix, kind }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn get(&self, u: usize, v: usize) -> &Rational {
        self.matrix.get(u, v)
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.size() != self.size() {
            return Err(Error::AlphabetMismatch {
                left: alphabet.size(),
                right: self.size(),
            });
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    /// `factor * d`, for a positive factor; kind is preserved.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::OutOfRange(format!("scale factor {factor} must be positive")));
        }
        Ok(DistanceMatrix {
            alphabet: self.alphabet.clone(),
            matrix: self.matrix.scale(factor),
            kind: self.kind,
        })
    }
}

/// A nonempty set of codewords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    alphabet_size: usize,
    members: BTreeSet<usize>,
}

impl Code {
    pub fn new(alphabet_size: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::InvalidCode("a code needs at least one codeword".into()));
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= alphabet_size) {
            return Err(Error::InvalidCode(format!(
                "codeword {bad} is outside 0..{alphabet_size}"
            )));
        }
        Ok(Code { alphabet_size, members })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn binary_letter(p00: Rational, p01: Rational, p10: Rational, p11: Rational) -> Channel {
    let labels = vec!["0".to_string(), "1".to_string()];
    let matrix = SquareMatrix::from_rows(vec![vec![p00, p01], vec![p10, p11]]).expect("2x2");
    Channel::new(Alphabet::with_labels(labels).expect("labels"), matrix).expect("single-letter channel is stochastic")
}

fn ensure_length(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("word length n must be at least 1".into()));
    }
    Ok(())
}

/// Binary symmetric channel on words of length `n`, crossover `p`.
pub fn make_bsc(n: usize, p: &Rational) -> Result<Channel> {
    ensure_length(n)?;
    if !p.is_positive() || p >= &crate::rational::half() {
        return Err(Error::OutOfRange(format!("BSC needs 0 < p < 1/2, got p = {p}")));
    }
    let one = Rational::one();
    product_channel(&binary_letter(&one - p, p.clone(), p.clone(), &one - p), n)
}

/// The n-fold Z-channel: `Pr(0|0) = 1`, `Pr(1|0) = 0`, `Pr(0|1) = q`, `Pr(1|1) = 1 - q`.
pub fn make_z_channel(n: usize, q: &Rational) -> Result<Channel> {
    ensure_length(n)?;
    if !q.is_positive() || q >= &crate::rational::half() {
        return Err(Error::OutOfRange(format!("Z-channel needs 0 < q < 1/2, got q = {q}")));
    }
    let one = Rational::one();
    product_channel(&binary_letter(one.clone(), q.clone(), Rational::zero(), &one - q), n)
}

/// Binary asymmetric channel with `Pr(1|0) = p`, `Pr(0|1) = q`, `0 <= p < q < 1/2`.
///
/// `p = 0` is the Z-channel; `p = q` is rejected, use [`make_bsc`].
pub fn make_bac(n: usize, p: &Rational, q: &Rational) -> Result<Channel> {
    ensure_length(n)?;
    if p.is_negative() || p >= q || q >= &crate::rational::half() {
        return Err(Error::OutOfRange(format!(
            "BAC needs 0 <= p < q < 1/2, got p = {p}, q = {q}"
        )));
    }
    let one = Rational::one();
    product_channel(&binary_letter(&one - p, q.clone(), p.clone(), &one - q), n)
}

/// Memoryless extension of `single` to words of length `n`.
pub fn product_channel(single: &Channel, n: usize) -> Result<Channel> {
    product_channel_with_limit(single, n, DEFAULT_MAX_ALPHABET)
}

pub fn product_channel_with_limit(single: &Channel, n: usize, limit: usize) -> Result<Channel> {
    ensure_length(n)?;
    let k = single.size();
    if k < 2 {
        return Err(Error::OutOfRange(
            "single-letter alphabet needs at least 2 symbols".into(),
        ));
    }
    let size = check_size(k, n, limit)?;
    let digits = |mut i: usize| {
        let mut d = vec![0usize; n];
        for slot in d.iter_mut().rev() {
            *slot = i % k;
            i /= k;
        }
        d
    };
    let words: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let matrix = SquareMatrix::from_fn(size, |x, y| {
        words[x]
            .iter()
            .zip(&words[y])
            .map(|(&a, &b)| single.prob(a, b).clone())
            .product()
    });
    let letter = |i: usize| -> Option<String> {
        match single.alphabet().labels() {
            Some(l) => Some(l[i].clone()),
            None if k <= 10 => Some(i.to_string()),
            None => None,
        }
    };
    let labels: Option<Vec<String>> = words
        .iter()
        .map(|w| {
            w.iter()
                .map(|&d| letter(d))
                .collect::<Option<Vec<_>>>()
                .map(|v| v.concat())
        })
        .collect();
    let alphabet = match labels {
        Some(l) => Alphabet::with_labels(l).unwrap_or(Alphabet::new(size)?),
        None => Alphabet::new(size)?,
    };
    Channel::new(alphabet, matrix)
}

/// Hamming distance on binary words of length `n`.
pub fn hamming_metric(n: usize) -> Result<DistanceMatrix> {
    ensure_length(n)?;
    let alphabet = Alphabet::binary(n)?;
    let size = alphabet.size();
    let matrix = SquareMatrix::from_fn(size, |u, v| crate::rational::int((u ^ v).count_ones() as i64));
    Ok(DistanceMatrix::new_unchecked(alphabet, matrix, DistanceKind::Metric))
}

/// First `(x, y)`, `x != y`, in index order with `Pr(x|x) <= Pr(x|y)`.
pub fn unreasonable_witness(w: &Channel) -> Option<(usize, usize)> {
    let n = w.size();
    (0..n).find_map(|x| (0..n).find(|&y| y != x && w.prob(x, x) <= w.prob(x, y)).map(|y| (x, y)))
}

/// `Pr(x|x) > Pr(x|y)` for every `x != y`.
pub fn is_reasonable(w: &Channel) -> bool {
    unreasonable_witness(w).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceReport {
    pub symmetric: bool,
    pub symmetry_violation: Option<(usize, usize)>,
    /// Zero diagonal and strictly positive off-diagonal.
    pub positive: bool,
    pub positivity_violation: Option<(usize, usize)>,
    pub triangle: bool,
    /// First `(u, v, w)` with `d(u,v) + d(v,w) < d(u,w)`.
    pub triangle_violation: Option<(usize, usize, usize)>,
}

impl DistanceReport {
    pub fn is_metric(&self) -> bool {
        self.symmetric && self.positive && self.triangle
    }

    pub fn is_semimetric(&self) -> bool {
        self.symmetric && self.positive
    }
}

/// Checks every metric axiom exhaustively on an arbitrary square matrix.
pub fn validate_distance(d: &SquareMatrix) -> DistanceReport {
    validate_distance_with(d, true, Execution::default())
}

pub fn validate_distance_with(d: &SquareMatrix, check_triangle: bool, exec: Execution) -> DistanceReport {
    let n = d.n();
    let symmetry_violation = (0..n).find_map(|u| (u + 1..n).find(|&v| d.get(u, v) != d.get(v, u)).map(|v| (u, v)));
    let positivity_violation = (0..n).find_map(|u| {
        (0..n)
            .find(|&v| {
                if u == v {
                    !d.get(u, v).is_zero()
                } else {
                    !d.get(u, v).is_positive()
                }
            })
            .map(|v| (u, v))
    });
    let triangle_violation = if check_triangle {
        exec.find_first(n, |u| {
            (0..n).find_map(|v| {
                let duv = d.get(u, v);
                (0..n).find(|&w| duv + d.get(v, w) < *d.get(u, w)).map(|w| (u, v, w))
            })
        })
    } else {
        None
    };
    DistanceReport {
        symmetric: symmetry_violation.is_none(),
        symmetry_violation,
        positive: positivity_violation.is_none(),
        positivity_violation,
        triangle: triangle_violation.is_none(),
        triangle_violation,
    }
}
