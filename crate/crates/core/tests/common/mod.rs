//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use matched::model::{Channel, DistanceMatrix, SquareMatrix};
use matched::rational::{int, rat, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Direct transcription of the pairwise criterion, no ranks, no shortcuts.
pub fn oracle_matched(w: &Channel, d: &DistanceMatrix) -> bool {
    let n = w.size();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if y == z {
                    continue;
                }
                let (py, pz) = (w.prob(x, y), w.prob(x, z));
                if py.is_zero() && pz.is_zero() {
                    continue;
                }
                if (py > pz) != (d.get(x, y) < d.get(x, z)) {
                    return false;
                }
            }
        }
    }
    true
}

/// All weak orders on `k` items as level assignments `1..=k`.
pub fn weak_orders(k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(i: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == k {
            let mut used: Vec<u32> = cur.clone();
            used.sort();
            used.dedup();
            // keep only surjective level maps onto 1..=m
            if used.iter().enumerate().all(|(j, &l)| l == j as u32 + 1) {
                out.push(cur.clone());
            }
            return;
        }
        for l in 1..=k as u32 {
            cur[i] = l;
            rec(i + 1, k, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

/// Exhaustive search over every symmetric semimetric shape of a 3-symbol alphabet.
pub fn brute_force_feasible_3(w: &Channel) -> bool {
    assert_eq!(w.size(), 3);
    let pairs = [(0, 1), (0, 2), (1, 2)];
    weak_orders(3).into_iter().any(|levels| {
        let mut m = vec![vec![int(0); 3]; 3];
        for (&(u, v), &l) in pairs.iter().zip(&levels) {
            m[u][v] = int(l as i64);
            m[v][u] = int(l as i64);
        }
        let d = DistanceMatrix::semimetric(SquareMatrix::from_rows(m).unwrap()).unwrap();
        oracle_matched(w, &d)
    })
}

/// Column-stochastic channel whose diagonal strictly dominates each row.
pub fn random_reasonable_channel(rng: &mut impl Rng, n: usize, zero_chance: f64) -> Channel {
    loop {
        let mut weights = vec![vec![0i64; n]; n];
        for (r, row) in weights.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = if r == c {
                    rng.gen_range(10..=20)
                } else if rng.gen_bool(zero_chance) {
                    0
                } else {
                    rng.gen_range(1..=6)
                };
            }
        }
        let totals: Vec<i64> = (0..n).map(|c| (0..n).map(|r| weights[r][c]).sum()).collect();
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|r| (0..n).map(|c| rat(weights[r][c], totals[c])).collect())
            .collect();
        let w = Channel::from_rows(rows).unwrap();
        if matched::model::is_reasonable(&w) {
            return w;
        }
    }
}

/// Symmetric positive integer matrix closed under shortest paths, entries in `1..=max`.
pub fn random_integer_metric(rng: &mut impl Rng, n: usize, max: i64) -> DistanceMatrix {
    let mut m = vec![vec![0i64; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let x = rng.gen_range(1..=max);
            m[u][v] = x;
            m[v][u] = x;
        }
    }
    for k in 0..n {
        for u in 0..n {
            for v in 0..n {
                m[u][v] = m[u][v].min(m[u][k] + m[k][v]);
            }
        }
    }
    let rows: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    DistanceMatrix::metric(SquareMatrix::from_rows(rows).unwrap()).unwrap()
}

/// Symmetric matrix with positive rational off-diagonal entries, triangle not enforced.
pub fn random_semimetric(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
    let mut m = vec![vec![Rational::zero(); n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let x = rat(rng.gen_range(1..=40), rng.gen_range(1..=7));
            m[u][v] = x.clone();
            m[v][u] = x;
        }
    }
    DistanceMatrix::semimetric(SquareMatrix::from_rows(m).unwrap()).unwrap()
}

/// Every column distribution over 3 symbols with entries in `{0, 1/k, ..., 1}`.
pub fn grid_columns(k: i64) -> Vec<[Rational; 3]> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            out.push([rat(a, k), rat(b, k), rat(k - a - b, k)]);
        }
    }
    out
}

pub fn channel_from_columns(cols: &[[Rational; 3]; 3]) -> Channel {
    let rows = (0..3).map(|r| (0..3).map(|c| cols[c][r].clone()).collect()).collect();
    Channel::from_rows(rows).unwrap()
}

pub fn positive_entries_sum_to_one(row: &[Rational]) -> bool {
    row.iter().all(|v| v.is_positive()) && row.iter().cloned().sum::<Rational>().is_one()
}
