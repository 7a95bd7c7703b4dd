//! Constructive results: a channel for any metric, the semimetric squeeze,
//! the recursive matched metric of the n-fold Z-channel, and the
//! Z-to-Hamming interpolation experiment.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matching::{check_matched, check_matched_with, Verdict};
use crate::model::{
    hamming_metric, make_bac, make_z_channel, Alphabet, DistanceKind, DistanceMatrix, ReverseKernel, SquareMatrix,
    DEFAULT_MAX_ALPHABET,
};
use crate::par::Execution;
use crate::rational::{common_denominator, int, pow, rat, Rational};

/// Builds the posterior kernel `Pr(y sent | x received) = eps^d(x,y) / sum_v eps^d(x,v)`.
///
/// The metric is first multiplied by the common denominator of its entries
/// so every exponent is an integer; positive scaling keeps every row order.
pub fn channel_from_metric(d: &DistanceMatrix, epsilon: &Rational) -> Result<ReverseKernel> {
    if !epsilon.is_positive() || epsilon >= &Rational::one() {
        return Err(Error::OutOfRange(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let scale = Rational::from_integer(common_denominator(d.matrix().entries()));
    let n = d.size();
    let mut weights = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let exponent = (d.get(x, y) * &scale).to_integer();
            let exponent = exponent
                .to_usize()
                .ok_or_else(|| Error::OutOfRange(format!("rescaled distance {exponent} is too large")))?;
            weights.push(pow(epsilon, exponent));
        }
    }
    let totals: Vec<Rational> = (0..n).map(|x| weights[x * n..(x + 1) * n].iter().sum()).collect();
    let matrix = SquareMatrix::from_fn(n, |x, y| &weights[x * n + y] / &totals[x]);
    ReverseKernel::new(d.alphabet().clone(), matrix)
}

/// Maps every off-diagonal value affinely from `[m, M]` onto
/// `[1 - delta, 1 + delta]` with `0 < delta < 1/3`.
///
/// Any two off-diagonal entries then sum to at least `2 - 2 delta > 1 + delta`,
/// so the triangle inequality holds; the map is strictly increasing, so every
/// row order and every tie survives. A constant off-diagonal becomes all ones.
pub fn squeeze(e: &DistanceMatrix, delta: &Rational) -> Result<DistanceMatrix> {
    if !delta.is_positive() || delta >= &rat(1, 3) {
        return Err(Error::OutOfRange(format!(
            "squeeze delta must lie in (0, 1/3), got {delta}"
        )));
    }
    let n = e.size();
    let off = || (0..n).flat_map(move |u| (0..n).filter(move |&v| v != u).map(move |v| e.get(u, v)));
    let (Some(lo), Some(hi)) = (off().min(), off().max()) else {
        return Ok(DistanceMatrix::new_unchecked(
            e.alphabet().clone(),
            e.matrix().clone(),
            DistanceKind::Metric,
        ));
    };
    let one = Rational::one();
    let matrix = if lo == hi {
        SquareMatrix::from_fn(n, |u, v| if u == v { Rational::zero() } else { one.clone() })
    } else {
        let base = &one - delta;
        let slope = (delta * int(2)) / (hi - lo);
        SquareMatrix::from_fn(n, |u, v| {
            if u == v {
                Rational::zero()
            } else {
                &base + &slope * (e.get(u, v) - lo)
            }
        })
    };
    Ok(DistanceMatrix::new_unchecked(
        e.alphabet().clone(),
        matrix,
        DistanceKind::Metric,
    ))
}

/// How the lower-right block `C = scale * D_n` is scaled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CScale {
    /// Half of `min(B) / max(D_n)`, which keeps every `C` entry below every `B` entry.
    Auto,
    Explicit(Rational),
}

impl fmt::Display for CScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CScale::Auto => f.write_str("auto"),
            CScale::Explicit(r) => write!(f, "{r}"),
        }
    }
}

/// Constants of the recursive Z-channel construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZParams {
    /// Shrinks `b(1^n, 1^n)` below the row minimum; `0 < alpha < 1`.
    pub alpha: Rational,
    /// Lifts `b(x, 1^n)` above the row's positive-probability entries; `beta > 1`.
    pub beta: Rational,
    /// Lifts the zero-probability entries of `B`; `gamma > 1`.
    pub gamma: Rational,
    /// Squeeze parameter applied after every step; `0 < delta < 1/3`.
    pub squeeze_delta: Rational,
    pub c_scale: CScale,
}

impl Default for ZParams {
    fn default() -> Self {
        ZParams {
            alpha: rat(1, 2),
            beta: int(2),
            gamma: int(2),
            squeeze_delta: rat(1, 4),
            c_scale: CScale::Auto,
        }
    }
}

impl ZParams {
    pub fn validate(&self) -> Result<()> {
        let one = Rational::one();
        if !self.alpha.is_positive() || self.alpha >= one {
            return Err(Error::OutOfRange(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.beta <= one {
            return Err(Error::OutOfRange(format!("beta must exceed 1, got {}", self.beta)));
        }
        if self.gamma <= one {
            return Err(Error::OutOfRange(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !self.squeeze_delta.is_positive() || self.squeeze_delta >= rat(1, 3) {
            return Err(Error::OutOfRange(format!(
                "squeeze delta must lie in (0, 1/3), got {}",
                self.squeeze_delta
            )));
        }
        if let CScale::Explicit(s) = &self.c_scale {
            if !s.is_positive() {
                return Err(Error::OutOfRange(format!("C scale must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

/// `Pr(x | y) != 0` on the n-fold Z-channel: `x` has no 1 where `y` has a 0.
fn z_reachable(x: usize, y: usize) -> bool {
    x & !y == 0
}

const VERIFY_Q: (i64, i64) = (1, 4);

/// A metric matched to the n-fold Z-channel, built one length at a time.
///
/// Every intermediate `D_k` is checked against the Z-channel of length `k`
/// before it is used; an unverified matrix is never returned. The decision
/// rule of the Z-channel does not depend on `q`, so one `q` suffices.
pub fn z_metric(n: usize, params: &ZParams) -> Result<DistanceMatrix> {
    params.validate()?;
    if n == 0 {
        return Err(Error::OutOfRange("word length n must be at least 1".into()));
    }
    if n >= usize::BITS as usize || (1usize << n) > DEFAULT_MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge {
            size: 1u128 << n.min(127),
            limit: DEFAULT_MAX_ALPHABET,
        });
    }
    let mut d = hamming_metric(1)?;
    for len in 1..n {
        let next = z_step(&d, len, params)?;
        verify_z(&next, len + 1)?;
        d = next;
    }
    if n == 1 {
        verify_z(&d, 1)?;
    }
    Ok(d)
}

fn verify_z(d: &DistanceMatrix, len: usize) -> Result<()> {
    let w = make_z_channel(len, &rat(VERIFY_Q.0, VERIFY_Q.1))?;
    match check_matched(&w, d)? {
        Verdict::Matched => Ok(()),
        Verdict::Violated(v) => Err(Error::Construction {
            length: len,
            violation: v,
        }),
    }
}

/// One step `D_len -> D_{len+1}`.
///
/// The new matrix is assembled in block form `[[A, B], [B^T, C]]` where row
/// and column `x0` (resp. `x1`) is the word `x` followed by a final 0 (resp. 1),
/// then laid out in big-endian index order (`x0 -> 2x`, `x1 -> 2x + 1`) and
/// squeezed.
fn z_step(dn: &DistanceMatrix, len: usize, params: &ZParams) -> Result<DistanceMatrix> {
    let size = 1usize << len;
    debug_assert_eq!(dn.size(), size);
    let all_ones = size - 1;
    let a = |x: usize, y: usize| dn.get(x, y);
    let mut b: Vec<Option<Rational>> = vec![None; size * size];

    // Case 1: y has a zero and x is reachable from y. Flipping any zero of y
    // multiplies Pr(x|y) by q, so every choice must give the same a(x, z).
    for y in (0..size).filter(|&y| y != all_ones) {
        let zero_bits: Vec<usize> = (0..len).rev().map(|k| 1usize << k).filter(|bit| y & bit == 0).collect();
        for x in (0..size).filter(|&x| z_reachable(x, y)) {
            let value = a(x, y | zero_bits[0]);
            if let Some(&other) = zero_bits[1..].iter().find(|&&bit| a(x, y | bit) != value) {
                return Err(Error::Invariant(format!(
                    "case-1 entry b({x},{y}) depends on the flipped coordinate: {} vs {}",
                    value,
                    a(x, y | other)
                )));
            }
            b[x * size + y] = Some(value.clone());
        }
    }

    // Case 2: y is the all-ones word.
    let row_min = (0..size)
        .filter(|&z| z != all_ones)
        .map(|z| a(all_ones, z))
        .min()
        .expect("len >= 1");
    b[all_ones * size + all_ones] = Some(&params.alpha * row_min);
    for x in (0..size).filter(|&x| x != all_ones) {
        let largest = (0..size)
            .filter(|&z| z != all_ones && z_reachable(x, z))
            .map(|z| b[x * size + z].as_ref().expect("case 1 filled"))
            .max()
            .expect("x itself is reachable")
            .clone();
        let mut value = &params.beta * &largest;
        // b(x, 1^n) must also stay below every zero-probability a(x, w) in
        // the same row; fall back to the midpoint when beta overshoots.
        if let Some(ceiling) = (0..size).filter(|&w| !z_reachable(x, w)).map(|w| a(x, w)).min() {
            if &value >= ceiling {
                value = (&largest + ceiling) / int(2);
            }
        }
        b[x * size + all_ones] = Some(value);
    }

    // Case 3: x is unreachable from y.
    for x in 0..size {
        let largest = (0..size)
            .filter(|&z| z_reachable(x, z))
            .map(|z| b[x * size + z].as_ref().expect("cases 1 and 2 filled"))
            .max()
            .expect("x itself is reachable")
            .clone();
        let value = &params.gamma * largest;
        for y in (0..size).filter(|&y| !z_reachable(x, y)) {
            b[x * size + y] = Some(value.clone());
        }
    }

    let b: Vec<Rational> = b.into_iter().map(|v| v.expect("every case covered")).collect();
    let c_factor = match &params.c_scale {
        CScale::Explicit(s) => s.clone(),
        CScale::Auto => {
            let min_b = b.iter().min().expect("nonempty");
            let max_d = dn.matrix().entries().iter().max().expect("nonempty");
            min_b / (max_d * int(2))
        }
    };

    let block = SquareMatrix::from_fn(2 * size, |u, v| {
        let (x, theta) = (u >> 1, u & 1);
        let (y, phi) = (v >> 1, v & 1);
        match (theta, phi) {
            (0, 0) => a(x, y).clone(),
            (0, _) => b[x * size + y].clone(),
            (_, 0) => b[y * size + x].clone(),
            _ => &c_factor * a(x, y),
        }
    });
    let e = DistanceMatrix::new(Alphabet::binary(len + 1)?, block, DistanceKind::Semimetric)?;
    squeeze(&e, &params.squeeze_delta)
}

/// Squeeze of `(1 - t) D_n + t H_n`.
pub fn interpolate_z_to_hamming(n: usize, t: &Rational, params: &ZParams) -> Result<DistanceMatrix> {
    let dn = z_metric(n, params)?;
    interpolate_with(&dn, &hamming_metric(n)?, t, &params.squeeze_delta)
}

fn interpolate_with(
    dn: &DistanceMatrix,
    hn: &DistanceMatrix,
    t: &Rational,
    delta: &Rational,
) -> Result<DistanceMatrix> {
    if t.is_negative() || t > &Rational::one() {
        return Err(Error::OutOfRange(format!("t must lie in [0, 1], got {t}")));
    }
    let mixed = dn.matrix().scale(&(Rational::one() - t)).add(&hn.matrix().scale(t));
    squeeze(
        &DistanceMatrix::new_unchecked(hn.alphabet().clone(), mixed, DistanceKind::Semimetric),
        delta,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanCell {
    pub t: Rational,
    pub p: Rational,
    pub q: Rational,
    pub verdict: Verdict,
}

impl fmt::Display for ScanCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} p={} q={} ", self.t, self.p, self.q)?;
        match &self.verdict {
            Verdict::Matched => f.write_str("verdict=matched"),
            Verdict::Violated(v) => write!(f, "verdict=violation witness={},{},{}", v.pivot, v.y, v.z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationReport {
    pub n: usize,
    /// Row-major over `t` then `(p, q)`, in input order.
    pub cells: Vec<ScanCell>,
}

impl InterpolationReport {
    pub fn matched_count(&self) -> usize {
        self.cells.iter().filter(|c| c.verdict.is_matched()).count()
    }

    pub fn all_matched(&self) -> bool {
        self.matched_count() == self.cells.len()
    }
}

impl fmt::Display for InterpolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Checks every `(t, (p, q))` cell: is the interpolated metric matched to `BAC(n, p, q)`?
pub fn interpolation_scan(
    n: usize,
    t_grid: &[Rational],
    params: &ZParams,
    bac_params: &[(Rational, Rational)],
) -> Result<InterpolationReport> {
    interpolation_scan_with(n, t_grid, params, bac_params, Execution::default())
}

pub fn interpolation_scan_with(
    n: usize,
    t_grid: &[Rational],
    params: &ZParams,
    bac_params: &[(Rational, Rational)],
    exec: Execution,
) -> Result<InterpolationReport> {
    if t_grid.is_empty() || bac_params.is_empty() {
        return Err(Error::OutOfRange("interpolation grids must be nonempty".into()));
    }
    let dn = z_metric(n, params)?;
    let hn = hamming_metric(n)?;
    let channels = bac_params
        .iter()
        .map(|(p, q)| make_bac(n, p, q))
        .collect::<Result<Vec<_>>>()?;
    let rows = exec.map_slice(t_grid, |t| -> Result<Vec<ScanCell>> {
        let metric = interpolate_with(&dn, &hn, t, &params.squeeze_delta)?;
        bac_params
            .iter()
            .zip(&channels)
            .map(|((p, q), w)| {
                Ok(ScanCell {
                    t: t.clone(),
                    p: p.clone(),
                    q: q.clone(),
                    verdict: check_matched_with(w, &metric, Execution::Sequential)?,
                })
            })
            .collect()
    });
    let mut cells = Vec::with_capacity(t_grid.len() * bac_params.len());
    for row in rows {
        cells.extend(row?);
    }
    Ok(InterpolationReport { n, cells })
}

/// `k / steps` for `k = 1, ..., steps - 1`.
pub fn interior_grid(steps: usize) -> Vec<Rational> {
    (1..steps).map(|k| rat(k as i64, steps as i64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::check_matched_reverse;
    use crate::model::{make_bsc, validate_distance};
    use crate::rational::int;

    fn rows(m: &SquareMatrix) -> Vec<Vec<Rational>> {
        m.rows().map(<[Rational]>::to_vec).collect()
    }

    fn uniform(n: usize) -> DistanceMatrix {
        DistanceMatrix::metric(SquareMatrix::from_fn(n, |u, v| int((u != v) as i64))).unwrap()
    }

    #[test]
    fn channel_from_hamming_one() {
        let q = channel_from_metric(&hamming_metric(1).unwrap(), &rat(1, 2)).unwrap();
        assert_eq!(
            rows(q.matrix()),
            vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]
        );
    }

    #[test]
    fn channel_from_uniform_three() {
        let q = channel_from_metric(&uniform(3), &rat(1, 2)).unwrap();
        assert_eq!(q.matrix().row(0), &[rat(1, 2), rat(1, 4), rat(1, 4)]);
        assert_eq!(q.matrix().row(2), &[rat(1, 4), rat(1, 4), rat(1, 2)]);
    }

    #[test]
    fn channel_from_single_point() {
        let q = channel_from_metric(&uniform(1), &rat(1, 3)).unwrap();
        assert_eq!(rows(q.matrix()), vec![vec![int(1)]]);
    }

    #[test]
    fn channel_from_fractional_metric() {
        let d = squeeze(&crate::fixtures::bac2_semimetric(), &rat(1, 4)).unwrap();
        let q = channel_from_metric(&d, &rat(1, 3)).unwrap();
        assert!(check_matched_reverse(&q, &d).unwrap().is_matched());
    }

    #[test]
    fn channel_from_metric_epsilon_range() {
        assert!(channel_from_metric(&uniform(2), &int(0)).is_err());
        assert!(channel_from_metric(&uniform(2), &int(1)).is_err());
    }

    #[test]
    fn squeeze_bac2_semimetric() {
        let d = squeeze(&crate::fixtures::bac2_semimetric(), &rat(1, 4)).unwrap();
        let expected = [[0, 4, 4, 5], [4, 0, 5, 3], [4, 5, 0, 3], [5, 3, 3, 0]];
        for (u, row) in expected.iter().enumerate() {
            for (v, &e) in row.iter().enumerate() {
                assert_eq!(d.get(u, v), &rat(e, 4), "({u},{v})");
            }
        }
        assert!(validate_distance(d.matrix()).is_metric());
        assert_eq!(d.kind(), DistanceKind::Metric);
    }

    #[test]
    fn squeeze_constant() {
        let e = DistanceMatrix::semimetric(SquareMatrix::from_fn(3, |u, v| int(7 * (u != v) as i64))).unwrap();
        assert_eq!(squeeze(&e, &rat(1, 4)).unwrap().matrix(), uniform(3).matrix());
    }

    #[test]
    fn squeeze_delta_range() {
        assert!(squeeze(&uniform(2), &int(0)).is_err());
        assert!(squeeze(&uniform(2), &rat(1, 3)).is_err());
    }

    #[test]
    fn z_metric_base_case() {
        assert_eq!(
            z_metric(1, &ZParams::default()).unwrap().matrix(),
            hamming_metric(1).unwrap().matrix()
        );
    }

    #[test]
    fn z_metric_two_layout() {
        let d = z_metric(2, &ZParams::default()).unwrap();
        // Pre-squeeze: a = D_1, b = [[1, 2], [1, 1/2]], C = D_1 / 4;
        // off-diagonal range [1/4, 2] maps onto [3/4, 5/4].
        let f = |v: Rational| rat(3, 4) + rat(2, 7) * (v - rat(1, 4));
        assert_eq!(d.get(0b00, 0b01), &f(int(1)));
        assert_eq!(d.get(0b00, 0b10), &f(int(1)));
        assert_eq!(d.get(0b00, 0b11), &f(int(2)));
        assert_eq!(d.get(0b01, 0b10), &f(int(1)));
        assert_eq!(d.get(0b01, 0b11), &f(rat(1, 4)));
        assert_eq!(d.get(0b10, 0b11), &f(rat(1, 2)));
        assert!(validate_distance(d.matrix()).is_metric());
    }

    #[test]
    fn z_metric_matches_z_channel() {
        for n in 1..=3 {
            let d = z_metric(n, &ZParams::default()).unwrap();
            let w = make_z_channel(n, &rat(1, 10)).unwrap();
            assert!(check_matched(&w, &d).unwrap().is_matched(), "n={n}");
        }
    }

    #[test]
    fn z_metric_with_alpha_c_scale() {
        let params = ZParams {
            c_scale: CScale::Explicit(rat(1, 2)),
            ..ZParams::default()
        };
        for n in 1..=4 {
            let d = z_metric(n, &params).unwrap();
            assert!(
                check_matched(&make_z_channel(n, &rat(2, 5)).unwrap(), &d)
                    .unwrap()
                    .is_matched(),
                "n={n}"
            );
        }
    }

    #[test]
    fn z_params_ranges() {
        let bad = [
            ZParams {
                alpha: int(1),
                ..ZParams::default()
            },
            ZParams {
                beta: int(1),
                ..ZParams::default()
            },
            ZParams {
                gamma: rat(1, 2),
                ..ZParams::default()
            },
            ZParams {
                squeeze_delta: rat(1, 3),
                ..ZParams::default()
            },
            ZParams {
                c_scale: CScale::Explicit(int(0)),
                ..ZParams::default()
            },
        ];
        for p in bad {
            assert!(z_metric(2, &p).is_err(), "{p:?}");
        }
        assert!(z_metric(0, &ZParams::default()).is_err());
        assert!(z_metric(13, &ZParams::default()).is_err());
    }

    #[test]
    fn interpolation_endpoints() {
        let params = ZParams::default();
        let at0 = interpolate_z_to_hamming(2, &int(0), &params).unwrap();
        assert!(check_matched(&make_z_channel(2, &rat(1, 4)).unwrap(), &at0)
            .unwrap()
            .is_matched());
        let at1 = interpolate_z_to_hamming(2, &int(1), &params).unwrap();
        assert!(check_matched(&make_bsc(2, &rat(1, 4)).unwrap(), &at1)
            .unwrap()
            .is_matched());
        assert!(interpolate_z_to_hamming(2, &rat(3, 2), &params).is_err());
    }

    #[test]
    fn interpolation_midpoint_n2() {
        let params = ZParams {
            c_scale: CScale::Explicit(rat(1, 2)),
            ..ZParams::default()
        };
        let d = interpolate_z_to_hamming(2, &rat(1, 2), &params).unwrap();
        assert!(check_matched(&make_bac(2, &rat(1, 10), &rat(2, 10)).unwrap(), &d)
            .unwrap()
            .is_matched());
    }

    #[test]
    fn scan_report_lines() {
        let params = ZParams {
            c_scale: CScale::Explicit(rat(1, 2)),
            ..ZParams::default()
        };
        let rep = interpolation_scan(2, &[rat(1, 2)], &params, &[(rat(1, 10), rat(1, 5))]).unwrap();
        assert_eq!(rep.to_string(), "t=1/2 p=1/10 q=1/5 verdict=matched\n");
        let t0 = interpolation_scan(2, &[int(0)], &params, &[(int(0), rat(1, 5))]).unwrap();
        assert!(t0.all_matched());
        assert!(interpolation_scan(2, &[], &params, &[(int(0), rat(1, 5))]).is_err());
    }

    #[test]
    fn interior_grid_excludes_endpoints() {
        assert_eq!(interior_grid(4), vec![rat(1, 4), rat(1, 2), rat(3, 4)]);
    }
}
