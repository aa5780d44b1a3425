#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use hypmirror_core::arrangement::{load_and_normalize, HypertoricData, RawData};

pub fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn raw(d: usize, u: &[&[i64]], lr: &[i64], tc: &[i64]) -> RawData {
    RawData::new(
        d,
        u.iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
        lr.iter().map(|&x| r(x)).collect(),
        tc.iter().map(|&x| r(x)).collect(),
    )
}

pub fn data(d: usize, u: &[&[i64]], lr: &[i64], tc: &[i64]) -> HypertoricData {
    load_and_normalize(&raw(d, u, lr, tc)).expect("valid fixture")
}

pub fn cotangent_p1() -> HypertoricData {
    data(1, &[&[1], &[-1]], &[0, 1], &[0, 1])
}

pub fn cotangent_p2() -> HypertoricData {
    data(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 1], &[0, 0, 5])
}

pub fn cotangent_p3() -> HypertoricData {
    data(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
        &[0, 0, 0, 1],
        &[0, 0, 0, 5],
    )
}

/// `Ã_m`: `m + 1` points on a line.
pub fn a_tilde(m: usize) -> HypertoricData {
    let ones: Vec<&[i64]> = vec![&[1]; m + 1];
    let lam: Vec<i64> = (0..=m as i64).collect();
    data(1, &ones, &lam, &lam)
}

/// Four lines in the plane, containing `T*ℙ²` and `T*𝔽₁` configurations.
pub fn four_lines() -> HypertoricData {
    data(
        2,
        &[&[1, 0], &[0, 1], &[-1, -1], &[0, -1]],
        &[0, 0, 3, 1],
        &[0, 0, 5, 2],
    )
}

pub fn named_four() -> Vec<(&'static str, HypertoricData)> {
    vec![
        ("T*P1", cotangent_p1()),
        ("T*P2", cotangent_p2()),
        ("A~3", a_tilde(3)),
        ("4-line", four_lines()),
    ]
}

/// Index subsets of `0..n` as bitmask-ordered vectors.
pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Rank over ℚ by plain Gaussian elimination.
pub fn rank_q(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for k in c..cols {
                    let t = &f * &a[rank][k];
                    a[i][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Does `⟨x, u_i⟩ = c_i` for `i ∈ set` have a solution? Compares ranks with and without the
/// right-hand side.
pub fn consistent(u: &[Vec<BigInt>], c: &[BigRational], set: &[usize]) -> bool {
    if set.is_empty() {
        return true;
    }
    let plain: Vec<Vec<BigRational>> = set
        .iter()
        .map(|&i| {
            u[i].iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let augmented: Vec<Vec<BigRational>> = set
        .iter()
        .zip(&plain)
        .map(|(&i, row)| {
            let mut row = row.clone();
            row.push(c[i].clone());
            row
        })
        .collect();
    rank_q(&plain) == rank_q(&augmented)
}

/// Leibniz determinant of a small integer matrix.
pub fn det_leibniz(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0i64;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let prod: i64 = (0..n).map(|i| m[i][perm[i]]).product();
        total += if inversions % 2 == 0 { prod } else { -prod };
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| perm[i] < perm[i + 1])
        else {
            break;
        };
        let j = (i + 1..n)
            .rev()
            .find(|&j| perm[j] > perm[i])
            .expect("exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    total
}

/// Columns `set` of the vectors as a square matrix (rows = coordinates).
pub fn minor(u: &[Vec<i64>], set: &[usize]) -> i64 {
    let d = set.len();
    let m: Vec<Vec<i64>> = (0..d)
        .map(|row| set.iter().map(|&i| u[i][row]).collect())
        .collect();
    det_leibniz(&m)
}

pub fn small(u: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    u.iter()
        .map(|v| v.iter().map(|x| i64::try_from(x).expect("small")).collect())
        .collect()
}

pub fn sign_of(x: &BigRational) -> i64 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
