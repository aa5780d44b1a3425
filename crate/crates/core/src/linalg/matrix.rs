//! Dense integer matrices with exact lattice algorithms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LinalgError;

/// Row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// A square minor: the chosen rows and columns and the exact determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: BigInt,
}

/// A ℤ-basis of the integer kernel, canonicalized in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelLattice {
    pub basis: Vec<Vec<BigInt>>,
    /// Rank of the matrix, `cols - basis.len()`.
    pub rank: usize,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows of any integer type; all rows must have equal length.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Result<Self, LinalgError> {
        Ok(Self::from_rows(columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c).clone());
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, cols)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `col[dst] -= factor * col[src]`
    fn sub_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let delta = self.get(r, src) * factor;
            let v = &mut self.data[r * self.cols + dst];
            *v -= delta;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = &mut self.data[r * self.cols + c];
            *v = -std::mem::take(v);
        }
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                if a[r][c].is_zero() {
                    continue;
                }
                let (f, g) = (a[rank][c].clone(), a[r][c].clone());
                for j in c..self.cols {
                    let v = &a[r][j] * &f - &a[rank][j] * &g;
                    a[r][j] = v;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// All `k × k` minors. Rows are taken in full when the matrix has exactly `k` rows,
    /// otherwise every `k`-subset of rows is paired with every `k`-subset of columns.
    pub fn square_minors(&self, k: usize) -> Result<Vec<Minor>, LinalgError> {
        if k == 0 {
            return Err(LinalgError::NonPositiveOrder);
        }
        if k > self.rows.min(self.cols) {
            return Err(LinalgError::OrderTooLarge {
                k,
                max: self.rows.min(self.cols),
            });
        }
        let row_sets = subsets(self.rows, k);
        let col_sets = subsets(self.cols, k);
        let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
        for rows in &row_sets {
            for cols in &col_sets {
                let det = self.submatrix(rows, cols).determinant()?;
                out.push(Minor {
                    rows: rows.clone(),
                    cols: cols.clone(),
                    det,
                });
            }
        }
        Ok(out)
    }

    /// Column-style Hermite reduction: returns `(h, u, rank)` with `self * u = h`,
    /// `u` unimodular, and the first `rank` columns of `h` in lower echelon form with
    /// positive pivots; the remaining columns of `h` are zero.
    pub fn column_echelon(&self) -> (IntMatrix, IntMatrix, usize) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.cols);
        let mut col = 0;
        for r in 0..self.rows {
            if col == self.cols {
                break;
            }
            loop {
                let best = (col..self.cols)
                    .filter(|&c| !h.get(r, c).is_zero())
                    .min_by(|&a, &b| h.get(r, a).abs().cmp(&h.get(r, b).abs()));
                let Some(best) = best else { break };
                h.swap_cols(col, best);
                u.swap_cols(col, best);
                let mut done = true;
                for c in col + 1..self.cols {
                    if h.get(r, c).is_zero() {
                        continue;
                    }
                    let q = h.get(r, c).div_floor(h.get(r, col));
                    h.sub_col_multiple(c, col, &q);
                    u.sub_col_multiple(c, col, &q);
                    if !h.get(r, c).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if !h.get(r, col).is_zero() {
                if h.get(r, col).is_negative() {
                    h.negate_col(col);
                    u.negate_col(col);
                }
                col += 1;
            }
        }
        (h, u, col)
    }

    /// ℤ-basis of `{x ∈ ℤ^cols : self·x = 0}` in Hermite normal form.
    pub fn kernel_lattice(&self) -> KernelLattice {
        let (_, u, rank) = self.column_echelon();
        let raw: Vec<Vec<BigInt>> = (rank..self.cols).map(|c| u.column(c)).collect();
        KernelLattice {
            basis: hermite_rows(raw),
            rank,
        }
    }

    /// One integer solution of `self·x = b`, if any exists.
    pub fn solve_integer(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(
            b.len(),
            self.rows,
            "right-hand side length must equal row count"
        );
        let (h, u, rank) = self.column_echelon();
        let mut z = vec![BigInt::zero(); rank];
        let mut k = 0;
        for r in 0..self.rows {
            let mut residual = b[r].clone();
            for (j, zj) in z.iter().enumerate().take(k) {
                residual -= h.get(r, j) * zj;
            }
            if k < rank && !h.get(r, k).is_zero() {
                let (q, rem) = residual.div_rem(h.get(r, k));
                if !rem.is_zero() {
                    return None;
                }
                z[k] = q;
                k += 1;
            } else if !residual.is_zero() {
                return None;
            }
        }
        let mut x = vec![BigInt::zero(); self.cols];
        for (j, zj) in z.iter().enumerate() {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += u.get(i, j) * zj;
            }
        }
        Some(x)
    }

    /// Nonzero Smith invariant factors `d₁ | d₂ | …`, all positive.
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut out = Vec::new();
        let mut t = 0;
        while t < m.min(n) {
            let pivot = (t..m)
                .flat_map(|r| (t..n).map(move |c| (r, c)))
                .filter(|&(r, c)| !a[r][c].is_zero())
                .min_by(|&(r1, c1), &(r2, c2)| a[r1][c1].abs().cmp(&a[r2][c2].abs()));
            let Some((pr, pc)) = pivot else { break };
            a.swap(t, pr);
            for row in a.iter_mut() {
                row.swap(t, pc);
            }
            let mut clean = true;
            for r in t + 1..m {
                let q = a[r][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for c in t..n {
                        let v = &a[t][c] * &q;
                        a[r][c] -= v;
                    }
                }
                if !a[r][t].is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..n {
                let q = a[t][c].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let v = &row[t] * &q;
                        row[c] -= v;
                    }
                }
                if !a[t][c].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let offender =
                (t + 1..m).find(|&r| (t + 1..n).any(|c| !a[r][c].is_multiple_of(&a[t][t])));
            if let Some(r) = offender {
                for c in t..n {
                    let v = a[r][c].clone();
                    a[t][c] += v;
                }
                continue;
            }
            out.push(a[t][t].abs());
            t += 1;
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| {
                self.row(r)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

/// Row Hermite normal form of the lattice spanned by `rows`; zero rows are dropped,
/// pivots are positive and entries above each pivot are reduced into `[0, pivot)`.
pub fn hermite_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut pivot_row = 0;
    for c in 0..width {
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[pivot_row][c]);
                for j in 0..width {
                    let v = &rows[pivot_row][j] * &q;
                    rows[r][j] -= v;
                }
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][c].is_zero() {
            if rows[pivot_row][c].is_negative() {
                for v in rows[pivot_row].iter_mut() {
                    *v = -std::mem::take(v);
                }
            }
            for r in 0..pivot_row {
                let q = rows[r][c].div_floor(&rows[pivot_row][c]);
                if !q.is_zero() {
                    for j in 0..width {
                        let v = &rows[pivot_row][j] * &q;
                        rows[r][j] -= v;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Reduces `v` modulo the lattice spanned by `hnf` (rows in Hermite normal form), so
/// that each pivot coordinate of the result lies in `[0, pivot)`.
pub fn reduce_modulo(v: &[BigInt], hnf: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for row in hnf {
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let q = out[p].div_floor(&row[p]);
        if !q.is_zero() {
            for (o, r) in out.iter_mut().zip(row) {
                *o -= r * &q;
            }
        }
    }
    out
}

/// gcd of the entries (0 for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_of_difference_row_is_diagonal() {
        let k = m(&[vec![1, -1]]).kernel_lattice();
        assert_eq!(k.basis, vec![ints(&[1, 1])]);
        assert_eq!(k.rank, 1);
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let k = IntMatrix::identity(3).kernel_lattice();
        assert!(k.basis.is_empty());
        assert_eq!(k.rank, 3);
    }

    #[test]
    fn kernel_of_cotangent_p2_data() {
        let k = m(&[vec![1, 0, -1], vec![0, 1, -1]]).kernel_lattice();
        assert_eq!(k.basis, vec![ints(&[1, 1, 1])]);
        assert_eq!(k.rank, 2);
    }

    #[test]
    fn kernel_of_zero_matrix_is_standard_basis() {
        let k = IntMatrix::zeros(2, 3).kernel_lattice();
        assert_eq!(
            k.basis,
            vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]
        );
        assert_eq!(k.rank, 0);
    }

    #[test]
    fn minors_of_small_matrices() {
        assert_eq!(
            m(&[vec![1, 0], vec![0, 1]]).square_minors(2).unwrap()[0].det,
            BigInt::from(1)
        );
        assert_eq!(
            m(&[vec![1, 1], vec![0, 2]]).square_minors(2).unwrap()[0].det,
            BigInt::from(2)
        );
        let dets: Vec<BigInt> = m(&[vec![1, 0, -1], vec![0, 1, -1]])
            .square_minors(2)
            .unwrap()
            .into_iter()
            .map(|mi| mi.det)
            .collect();
        assert_eq!(dets, ints(&[1, -1, 1]));
    }

    #[test]
    fn minors_reject_order_zero() {
        assert_eq!(
            IntMatrix::identity(2).square_minors(0),
            Err(LinalgError::NonPositiveOrder)
        );
    }

    #[test]
    fn smith_invariants_of_known_matrices() {
        assert_eq!(
            m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).smith_invariants(),
            ints(&[2, 6, 12])
        );
        assert_eq!(
            m(&[vec![1, 1], vec![0, 2]]).smith_invariants(),
            ints(&[1, 2])
        );
        assert!(IntMatrix::zeros(2, 2).smith_invariants().is_empty());
    }

    #[test]
    fn integer_solve_finds_solution_or_reports_none() {
        let a = m(&[vec![2, 3]]);
        let x = a.solve_integer(&ints(&[1])).unwrap();
        assert_eq!(a.mul_vec(&x), ints(&[1]));
        assert!(m(&[vec![2, 4]]).solve_integer(&ints(&[1])).is_none());
        assert!(m(&[vec![1, 0], vec![1, 0]])
            .solve_integer(&ints(&[1, 2]))
            .is_none());
    }

    #[test]
    fn reduce_modulo_lands_in_fundamental_domain() {
        let hnf = vec![ints(&[1, 1])];
        assert_eq!(reduce_modulo(&ints(&[1, 0]), &hnf), ints(&[0, -1]));
        assert_eq!(reduce_modulo(&ints(&[-3, 2]), &hnf), ints(&[0, 5]));
    }

    fn cofactor_det(a: &[Vec<BigInt>]) -> BigInt {
        if a.is_empty() {
            return BigInt::one();
        }
        let n = a.len();
        let mut total = BigInt::zero();
        for c in 0..n {
            let minor: Vec<Vec<BigInt>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][c] * cofactor_det(&minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            prop::collection::vec(-4i64..=4, r * c).prop_map(move |v| {
                IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
            })
        })
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn minors_match_cofactor_expansion(a in arb_matrix(4, 5), k in 1usize..=4) {
            prop_assume!(k <= a.rows().min(a.cols()));
            for minor in a.square_minors(k).unwrap() {
                let sub = a.submatrix(&minor.rows, &minor.cols).to_rows();
                prop_assert_eq!(&minor.det, &cofactor_det(&sub));
            }
        }

        #[test]
        fn kernel_basis_annihilates_and_saturates(a in arb_matrix(3, 5)) {
            let k = a.kernel_lattice();
            prop_assert_eq!(k.rank, a.rank());
            prop_assert_eq!(k.basis.len() + k.rank, a.cols());
            for b in &k.basis {
                prop_assert!(a.mul_vec(b).iter().all(Zero::is_zero));
            }
            if !k.basis.is_empty() {
                // a saturated sublattice has trivial torsion in the quotient
                let basis = IntMatrix::from_rows(&k.basis).unwrap();
                prop_assert!(basis.smith_invariants().iter().all(One::is_one));
                prop_assert_eq!(hermite_rows(k.basis.clone()), k.basis.clone());
            }
        }

        #[test]
        fn smith_product_equals_gcd_of_maximal_minors(a in arb_matrix(3, 3)) {
            let inv = a.smith_invariants();
            let r = inv.len();
            prop_assert_eq!(r, a.rank());
            if r > 0 {
                let g = a
                    .square_minors(r)
                    .unwrap()
                    .into_iter()
                    .fold(BigInt::zero(), |g, m| g.gcd(&m.det));
                let prod = inv.iter().fold(BigInt::one(), |p, d| p * d);
                prop_assert_eq!(prod, g);
                for w in inv.windows(2) {
                    prop_assert!(w[1].is_multiple_of(&w[0]));
                }
            }
        }

        #[test]
        fn integer_solutions_check_out(a in arb_matrix(3, 4), x in prop::collection::vec(-3i64..=3, 4)) {
            prop_assume!(a.cols() == 4);
            let x: Vec<BigInt> = x.into_iter().map(BigInt::from).collect();
            let b = a.mul_vec(&x);
            let y = a.solve_integer(&b).expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&y), b);
        }
    }
}
