//! Dense exact matrices over [`Scalar`] and the elimination kernel the whole
//! crate trusts: reduced row echelon form with first-nonzero pivoting,
//! nullspace extraction, and affine solving with an explicit infeasibility
//! certificate. Everything at desk scale, nothing approximate.

use std::fmt;

use crate::error::Error;
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one();
        }
        m
    }

    /// Builds from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &Scalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += &(a * b);
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.at(i, j);
                if !a.is_zero() {
                    out[i] += &(a * x);
                }
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns, ascending.
    /// Pivot choice is deterministic: scan each column top-down and take the
    /// first nonzero entry. Exactness makes any nonzero pivot valid.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut work: Vec<Vec<Scalar>> =
            (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let pivots = rref_in_place(&mut work, self.cols);
        (Mat::from_rows_sized(work, self.cols), pivots)
    }

    fn from_rows_sized(rows: Vec<Vec<Scalar>>, cols: usize) -> Mat {
        if rows.is_empty() {
            return Mat::zeros(0, cols);
        }
        Mat::from_rows(rows)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one vector per free column, ordered by
    /// free column index. Empty when the kernel is trivial.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        nullspace_from_rref(&r, &pivots)
    }

    /// Parses the plain text format: one row per line, entries separated by
    /// whitespace, each entry a scalar in canonical text form.
    pub fn parse_text(text: &str) -> Result<Mat, Error> {
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<Scalar>, Error> =
                line.split_whitespace().map(str::parse).collect();
            rows.push(row?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Parse("rows have differing lengths".into()));
        }
        Ok(Mat::from_rows(rows))
    }

    pub fn to_text(&self) -> String {
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().map(Scalar::to_string).collect::<Vec<_>>().join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Rows as vectors of strings, the JSON wire form for operator matrices.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(Scalar::to_string).collect())
            .collect()
    }

    pub fn from_string_rows(rows: &[Vec<String>]) -> Result<Mat, Error> {
        let parsed: Result<Vec<Vec<Scalar>>, Error> = rows
            .iter()
            .map(|row| row.iter().map(|s| s.parse()).collect())
            .collect();
        let parsed = parsed?;
        if parsed.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let c = parsed[0].len();
        if parsed.iter().any(|r| r.len() != c) {
            return Err(Error::Parse("rows have differing lengths".into()));
        }
        Ok(Mat::from_rows(parsed))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  [{}]", self.row(r).iter().map(Scalar::to_string).collect::<Vec<_>>().join(", "))?;
        }
        Ok(())
    }
}

/// In-place Gauss-Jordan on a list of rows; returns pivot columns. Shared by
/// `rref`, the affine solver, and the reusable factorization below.
fn rref_in_place(rows: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row == rows.len() {
            break;
        }
        let Some(pr) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, pr);
        let inv = rows[next_row][col].inv().expect("pivot is nonzero");
        if !rows[next_row][col].is_one() {
            for x in rows[next_row].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &(&factor * p);
                }
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    pivots
}

fn nullspace_from_rref(r: &Mat, pivots: &[usize]) -> Vec<Vec<Scalar>> {
    let cols = r.cols();
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.at(i, free);
        }
        basis.push(v);
    }
    basis
}

/// Full description of the solutions of `M x = b`.
///
/// `particular` is `None` exactly when `b` is outside the column space; the
/// rank pair `(rank, augmented_rank)` is the certificate (they differ by one
/// in that case). The homogeneous basis is always populated.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub particular: Option<Vec<Scalar>>,
    pub homogeneous_basis: Vec<Vec<Scalar>>,
    pub rank: usize,
    pub augmented_rank: usize,
}

impl SolutionSet {
    pub fn is_feasible(&self) -> bool {
        self.particular.is_some()
    }
}

/// Solves `M x = b` exactly by eliminating the augmented system once.
/// The particular solution sets every free variable to zero.
pub fn solve_affine(m: &Mat, b: &[Scalar]) -> SolutionSet {
    assert_eq!(m.rows(), b.len(), "rhs length mismatch");
    let cols = m.cols();
    let mut rows: Vec<Vec<Scalar>> = (0..m.rows())
        .map(|r| {
            let mut row = m.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    let aug_pivots = rref_in_place(&mut rows, cols + 1);
    let augmented_rank = aug_pivots.len();
    let infeasible = aug_pivots.last() == Some(&cols);
    let pivots: Vec<usize> =
        aug_pivots.iter().copied().filter(|&c| c < cols).collect();
    let rank = pivots.len();

    // The pivot rows of the augmented RREF restricted to the system columns
    // are the RREF of `M` itself, so the nullspace falls out of the same
    // elimination. Rank zero means no constraints: the kernel is everything.
    let homogeneous_basis = if rank == 0 {
        Mat::zeros(1, cols).nullspace()
    } else {
        let sys_rref = Mat::from_rows(
            rows.iter().take(rank).map(|r| r[..cols].to_vec()).collect(),
        );
        nullspace_from_rref(&sys_rref, &pivots)
    };

    let particular = if infeasible {
        None
    } else {
        let mut x = vec![Scalar::zero(); cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rows[i][cols].clone();
        }
        Some(x)
    };

    SolutionSet { particular, homogeneous_basis, rank, augmented_rank }
}

/// Row-basis factorization for solving many systems against one fixed
/// coefficient matrix.
///
/// Construction scans the rows once, keeps a maximal independent subset, and
/// stores (a) the RREF of that subset and (b) the transform expressing the
/// RREF rows as combinations of the kept originals. A later `solve` only
/// needs the right-hand side at the kept rows, which makes each solve
/// O(rank^2) instead of a fresh elimination over all rows.
///
/// `solve` does not check feasibility against the dropped rows; callers
/// verify the candidate in domain terms (which is cheap for the sparse
/// systems this is used on) or compare residuals themselves.
pub struct RowBasisSolver {
    cols: usize,
    kept: Vec<usize>,
    pivots: Vec<usize>,
    rref_rows: Vec<Vec<Scalar>>,
    transform: Vec<Vec<Scalar>>,
}

impl RowBasisSolver {
    pub fn from_rows(rows: &[Vec<Scalar>], cols: usize) -> Self {
        // Pass 1: independent row selection. The working echelon is kept in
        // full RREF (leads normalized to 1, each lead column zero in every
        // other row) so a single reduction sweep per incoming row is exact.
        let mut echelon: Vec<(usize, Vec<Scalar>)> = Vec::new();
        let mut kept = Vec::new();
        for (idx, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), cols);
            let mut work = row.clone();
            for (lead, e) in &echelon {
                let factor = work[*lead].clone();
                if factor.is_zero() {
                    continue;
                }
                for (w, v) in work.iter_mut().zip(e) {
                    if !v.is_zero() {
                        *w -= &(&factor * v);
                    }
                }
            }
            if let Some(lead) = work.iter().position(|x| !x.is_zero()) {
                let inv = work[lead].inv().expect("lead is nonzero");
                if !work[lead].is_one() {
                    for w in work.iter_mut() {
                        if !w.is_zero() {
                            *w = &*w * &inv;
                        }
                    }
                }
                for (_, e) in echelon.iter_mut() {
                    let factor = e[lead].clone();
                    if factor.is_zero() {
                        continue;
                    }
                    for (v, w) in e.iter_mut().zip(&work) {
                        if !w.is_zero() {
                            *v -= &(&factor * w);
                        }
                    }
                }
                let pos =
                    echelon.iter().position(|(l, _)| *l > lead).unwrap_or(echelon.len());
                echelon.insert(pos, (lead, work));
                kept.push(idx);
            }
        }

        // Pass 2: full RREF of the kept rows with an identity tail, giving
        // the transform in one elimination.
        let r = kept.len();
        let mut aug: Vec<Vec<Scalar>> = kept
            .iter()
            .enumerate()
            .map(|(i, &idx)| {
                let mut row = rows[idx].clone();
                row.extend((0..r).map(|j| {
                    if i == j { Scalar::one() } else { Scalar::zero() }
                }));
                row
            })
            .collect();
        let aug_pivots = rref_in_place(&mut aug, cols);
        debug_assert_eq!(aug_pivots.len(), r, "kept rows are independent");
        let mut rref_rows = Vec::with_capacity(r);
        let mut transform = Vec::with_capacity(r);
        for row in aug {
            rref_rows.push(row[..cols].to_vec());
            transform.push(row[cols..].to_vec());
        }
        RowBasisSolver { cols, kept, pivots: aug_pivots, rref_rows, transform }
    }

    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Indices of the kept (independent) rows in the original row order.
    pub fn kept_rows(&self) -> &[usize] {
        &self.kept
    }

    /// Candidate solution with all free variables set to zero, reading the
    /// right-hand side only at the kept rows. Feasibility is not checked.
    pub fn solve(&self, rhs_at: impl Fn(usize) -> Scalar) -> Vec<Scalar> {
        let b: Vec<Scalar> = self.kept.iter().map(|&idx| rhs_at(idx)).collect();
        let mut x = vec![Scalar::zero(); self.cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            let mut y = Scalar::zero();
            for (w, bv) in self.transform[i].iter().zip(&b) {
                if !w.is_zero() && !bv.is_zero() {
                    y += &(w * bv);
                }
            }
            x[p] = y;
        }
        x
    }

    /// Nullspace of the full row set (equal to the nullspace of the kept
    /// rows, since they span the same row space).
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        if self.rref_rows.is_empty() {
            return Mat::zeros(1, self.cols).nullspace();
        }
        nullspace_from_rref(&Mat::from_rows(self.rref_rows.clone()), &self.pivots)
    }
}

/// Rank of an integer matrix modulo `p`, processing rows until either the
/// supply runs out or the rank reaches `stop_at`. Used as an exact lower
/// bound for the rational rank: a nonsingular minor mod p is nonsingular
/// over ℚ.
pub fn rank_mod_p(
    rows: impl Iterator<Item = Vec<i64>>,
    cols: usize,
    p: u64,
    stop_at: usize,
) -> usize {
    let reduce = |v: i64| -> u64 { v.rem_euclid(p as i64) as u64 };
    let mulmod = |a: u64, b: u64| -> u64 { ((a as u128 * b as u128) % p as u128) as u64 };
    // pivot column -> normalized pivot row
    let mut pivot_rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for row in rows {
        if pivot_rows.len() >= stop_at {
            break;
        }
        debug_assert_eq!(row.len(), cols);
        let mut work: Vec<u64> = row.into_iter().map(reduce).collect();
        for (lead, prow) in &pivot_rows {
            let c = work[*lead];
            if c == 0 {
                continue;
            }
            for (w, pv) in work.iter_mut().zip(prow) {
                if *pv != 0 {
                    *w = (*w + p - mulmod(c, *pv)) % p;
                }
            }
        }
        if let Some(lead) = work.iter().position(|&x| x != 0) {
            let inv = pow_mod(work[lead], p - 2, p);
            for w in work.iter_mut() {
                if *w != 0 {
                    *w = mulmod(*w, inv);
                }
            }
            pivot_rows.push((lead, work));
        }
    }
    pivot_rows.len()
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(),
        )
    }

    #[test]
    fn rref_of_rank_one_matrix() {
        let (r, pivots) = m(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let ns = m(&[&[2, 4], &[1, 2]]).nullspace();
        assert_eq!(ns.len(), 1);
        // (-2, 1), proportional to (2, -1)
        assert_eq!(ns[0], vec![Scalar::from_int(-2), Scalar::from_int(1)]);
        let a = m(&[&[2, 4], &[1, 2]]);
        assert!(a.apply(&ns[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn rref_is_idempotent() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let (r1, p1) = a.rref();
        let (r2, p2) = r1.rref();
        assert_eq!(r1, r2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn solve_affine_feasible_and_certified_infeasible() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let sol = solve_affine(&a, &[Scalar::from_int(3), Scalar::from_int(6)]);
        assert!(sol.is_feasible());
        let x = sol.particular.unwrap();
        assert_eq!(a.apply(&x), vec![Scalar::from_int(3), Scalar::from_int(6)]);
        assert_eq!(sol.homogeneous_basis.len(), 1);

        let bad = solve_affine(&a, &[Scalar::from_int(3), Scalar::from_int(7)]);
        assert!(!bad.is_feasible());
        assert_eq!(bad.rank, 1);
        assert_eq!(bad.augmented_rank, 2);
        assert_eq!(bad.homogeneous_basis.len(), 1);
    }

    #[test]
    fn solver_matches_solve_affine_on_fixed_system() {
        let rows: Vec<Vec<Scalar>> = vec![
            vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(1)],
            vec![Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(-1)],
            vec![Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(0)],
        ];
        let solver = RowBasisSolver::from_rows(&rows, 3);
        assert_eq!(solver.rank(), 2);
        let b = [Scalar::from_int(2), Scalar::from_int(1), Scalar::from_int(3)];
        let x = solver.solve(|i| b[i].clone());
        let a = Mat::from_rows(rows.clone());
        assert_eq!(a.apply(&x), b.to_vec());
        assert_eq!(solver.nullspace().len(), 1);
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = Mat::from_rows(vec![
            vec![Scalar::ratio(1, 2), Scalar::from_int(3)],
            vec![Scalar::gaussian(0, 1, -2, 3), Scalar::zero()],
        ]);
        let text = a.to_text();
        let back = Mat::parse_text(&text).unwrap();
        assert_eq!(back, a);
        assert!(Mat::parse_text("1 2\n3").is_err());
        assert!(Mat::parse_text("").is_err());
    }

    #[test]
    fn rank_mod_p_lower_bounds_rational_rank() {
        let rows = vec![vec![2i64, 4], vec![1, 2], vec![0, 1]];
        assert_eq!(rank_mod_p(rows.into_iter(), 2, 1_000_000_007, usize::MAX), 2);
        // Early exit honors the cap.
        let rows = vec![vec![1i64, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(rank_mod_p(rows.into_iter(), 2, 1_000_000_007, 1), 1);
    }
}
