//! Exact integer linear algebra: dense arbitrary-precision matrices, Smith
//! normal form with unimodular transforms, cokernel structure, and the
//! component-group recipe for special fibers.
//!
//! Everything here works over [`BigInt`]; intermediate entry growth during the
//! Smith reduction makes fixed-width arithmetic unsafe.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fiber::{dual_graph_connected, ComponentId, SpecialFiber};

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Build from rows of machine integers; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        IntMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_entries(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * &other[(k, j)];
                    out[(i, j)] += term;
                }
            }
        }
        out
    }

    /// Matrix with row `i` and column `j` deleted.
    pub fn minor_matrix(&self, i: usize, j: usize) -> IntMatrix {
        assert!(i < self.rows && j < self.cols);
        let mut out = IntMatrix::zeros(self.rows - 1, self.cols - 1);
        for r in 0..self.rows - 1 {
            let sr = if r < i { r } else { r + 1 };
            for c in 0..self.cols - 1 {
                let sc = if c < j { c } else { c + 1 };
                out[(r, c)] = self[(sr, sc)].clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division is exact");
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + j, i * self.cols + k);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// row_i += c * row_k
    fn row_axpy(&mut self, i: usize, k: usize, c: &BigInt) {
        debug_assert_ne!(i, k);
        for j in 0..self.cols {
            let term = c * &self[(k, j)];
            self[(i, j)] += term;
        }
    }

    /// col_j += c * col_k
    fn col_axpy(&mut self, j: usize, k: usize, c: &BigInt) {
        debug_assert_ne!(j, k);
        for i in 0..self.rows {
            let term = c * &self[(i, k)];
            self[(i, j)] += term;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Pivot-selection policy for the Smith reduction. The resulting diagonal is
/// strategy-independent; [`SmallestAbs`](PivotStrategy::SmallestAbs) limits
/// coefficient growth and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotStrategy {
    #[default]
    SmallestAbs,
    FirstNonZero,
}

#[derive(Debug, Clone, Copy)]
pub struct SnfOptions {
    pub with_transforms: bool,
    pub pivot: PivotStrategy,
}

impl Default for SnfOptions {
    fn default() -> Self {
        SnfOptions {
            with_transforms: true,
            pivot: PivotStrategy::SmallestAbs,
        }
    }
}

/// Result of the Smith reduction: `u * m * v = d` with unimodular `u`, `v`
/// and `d` diagonal with non-negative entries satisfying d_1 | d_2 | ...
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub d: IntMatrix,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

impl SmithDecomposition {
    /// Non-zero diagonal entries (the elementary divisors), in order.
    pub fn divisors(&self) -> Vec<BigUint> {
        let n = self.d.rows().min(self.d.cols());
        (0..n)
            .map(|i| &self.d[(i, i)])
            .take_while(|e| !e.is_zero())
            .map(|e| e.magnitude().clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

/// Smith normal form with default options (transforms materialized,
/// smallest-absolute-value pivoting).
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    smith_normal_form_with(m, SnfOptions::default())
}

pub fn smith_normal_form_with(m: &IntMatrix, opts: SnfOptions) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = opts.with_transforms.then(|| IntMatrix::identity(rows));
    let mut v = opts.with_transforms.then(|| IntMatrix::identity(cols));

    let n = rows.min(cols);
    for k in 0..n {
        if submatrix_is_zero(&a, k) {
            break;
        }
        loop {
            let (pi, pj) = pick_pivot(&a, k, opts.pivot);
            a.swap_rows(k, pi);
            if let Some(u) = u.as_mut() {
                u.swap_rows(k, pi);
            }
            a.swap_cols(k, pj);
            if let Some(v) = v.as_mut() {
                v.swap_cols(k, pj);
            }
            if a[(k, k)].is_negative() {
                a.negate_row(k);
                if let Some(u) = u.as_mut() {
                    u.negate_row(k);
                }
            }

            // Euclidean clearing of column k; swaps pull strictly smaller
            // remainders into the pivot, so this terminates.
            for i in k + 1..rows {
                while !a[(i, k)].is_zero() {
                    let q = -(&a[(i, k)] / &a[(k, k)]);
                    a.row_axpy(i, k, &q);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(i, k, &q);
                    }
                    if !a[(i, k)].is_zero() {
                        a.swap_rows(i, k);
                        if let Some(u) = u.as_mut() {
                            u.swap_rows(i, k);
                        }
                        if a[(k, k)].is_negative() {
                            a.negate_row(k);
                            if let Some(u) = u.as_mut() {
                                u.negate_row(k);
                            }
                        }
                    }
                }
            }
            // Same for row k. Column operations cannot repopulate the cleared
            // part of column k (they add multiples of the zero tail), but the
            // swaps inside can, hence the outer loop.
            for j in k + 1..cols {
                while !a[(k, j)].is_zero() {
                    let q = -(&a[(k, j)] / &a[(k, k)]);
                    a.col_axpy(j, k, &q);
                    if let Some(v) = v.as_mut() {
                        v.col_axpy(j, k, &q);
                    }
                    if !a[(k, j)].is_zero() {
                        a.swap_cols(j, k);
                        if let Some(v) = v.as_mut() {
                            v.swap_cols(j, k);
                        }
                    }
                }
            }
            if a[(k, k)].is_negative() {
                a.negate_row(k);
                if let Some(u) = u.as_mut() {
                    u.negate_row(k);
                }
            }

            let column_clear = (k + 1..rows).all(|i| a[(i, k)].is_zero());
            let row_clear = (k + 1..cols).all(|j| a[(k, j)].is_zero());
            if !(column_clear && row_clear) {
                continue;
            }

            // Divisibility: d_k must divide everything below-right. If not,
            // fold the offending row into row k and keep reducing.
            match find_non_divisible(&a, k) {
                Some(i) => {
                    let one = BigInt::one();
                    a.row_axpy(k, i, &one);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(k, i, &one);
                    }
                }
                None => break,
            }
        }
    }

    SmithDecomposition { d: a, u, v }
}

fn submatrix_is_zero(a: &IntMatrix, k: usize) -> bool {
    (k..a.rows()).all(|i| (k..a.cols()).all(|j| a[(i, j)].is_zero()))
}

fn pick_pivot(a: &IntMatrix, k: usize, strategy: PivotStrategy) -> (usize, usize) {
    match strategy {
        PivotStrategy::FirstNonZero => {
            for i in k..a.rows() {
                for j in k..a.cols() {
                    if !a[(i, j)].is_zero() {
                        return (i, j);
                    }
                }
            }
            unreachable!("pivot requested on a zero submatrix");
        }
        PivotStrategy::SmallestAbs => {
            let mut best: Option<(usize, usize)> = None;
            for i in k..a.rows() {
                for j in k..a.cols() {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    best = match best {
                        Some(b) if a[b].abs() <= a[(i, j)].abs() => Some(b),
                        _ => Some((i, j)),
                    };
                }
            }
            best.expect("pivot requested on a zero submatrix")
        }
    }
}

fn find_non_divisible(a: &IntMatrix, k: usize) -> Option<usize> {
    let d = &a[(k, k)];
    for i in k + 1..a.rows() {
        for j in k + 1..a.cols() {
            if !(&a[(i, j)] % d).is_zero() {
                return Some(i);
            }
        }
    }
    None
}

/// A finitely generated abelian group in elementary-divisor normal form:
/// `Z^free_rank x Z/d_1 x ... x Z/d_r` with `2 <= d_1 | d_2 | ... | d_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    invariant_factors: Vec<BigUint>,
    free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    /// Normalize a list of diagonal entries: drop units, keep order.
    /// The caller is responsible for the divisibility chain (SNF provides it).
    pub fn from_invariant_factors(factors: Vec<BigUint>, free_rank: usize) -> Self {
        let one = BigUint::one();
        let invariant_factors: Vec<BigUint> = factors
            .into_iter()
            .filter(|d| *d != one && !d.is_zero())
            .collect();
        for w in invariant_factors.windows(2) {
            debug_assert!(
                (&w[1] % &w[0]).is_zero(),
                "invariant factors must form a divisibility chain"
            );
        }
        AbelianGroup {
            invariant_factors,
            free_rank,
        }
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// Order of the group; `None` if it is infinite (positive free rank).
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(
            self.invariant_factors
                .iter()
                .fold(BigUint::one(), |acc, d| acc * d),
        )
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// Structure of `Z^n / M Z^n` split into torsion and free part.
pub fn cokernel_torsion(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form_with(
        m,
        SnfOptions {
            with_transforms: false,
            pivot: PivotStrategy::SmallestAbs,
        },
    );
    let rank = snf.rank();
    AbelianGroup::from_invariant_factors(snf.divisors(), m.rows() - rank)
}

/// Component group of the Neron model of the Jacobian, computed from the full
/// intersection matrix of a regular model.
///
/// With `M m = 0`, `rank M = n - 1` and `gcd(m) = 1`, the degree map makes
/// `coker(M)` split as `Z + torsion`, and the torsion part is the component
/// group. Fails with [`Error::NotConnected`] / [`Error::NonUnimodularMultiplicities`]
/// when those hypotheses do not hold.
pub fn component_group(fiber: &SpecialFiber) -> Result<AbelianGroup> {
    if !dual_graph_connected(fiber) {
        return Err(Error::NotConnected);
    }
    let gcd = fiber.multiplicity_gcd();
    if gcd != BigUint::one() {
        return Err(Error::NonUnimodularMultiplicities(gcd));
    }
    let matrix = crate::fiber::intersection_matrix(fiber)?;
    let group = cokernel_torsion(&matrix.entries);
    debug_assert_eq!(
        group.free_rank(),
        1,
        "intersection matrix must have corank 1"
    );
    Ok(AbelianGroup::from_invariant_factors(
        group.invariant_factors().to_vec(),
        0,
    ))
}

/// Order of the component group via the (n-1)-minor determinant: delete the
/// row and column of a multiplicity-1 base component and take `|det|`.
///
/// Independent cross-check of [`component_group`]; all multiplicity-1 base
/// choices agree.
pub fn minor_determinant_order(fiber: &SpecialFiber, base: ComponentId) -> Result<BigUint> {
    let component = fiber.component(base).ok_or(Error::UnknownComponent(base))?;
    if component.multiplicity != BigUint::one() {
        return Err(Error::BadBase(base));
    }
    if !dual_graph_connected(fiber) {
        return Err(Error::NotConnected);
    }
    let matrix = crate::fiber::intersection_matrix(fiber)?;
    let idx = matrix
        .basis
        .iter()
        .position(|&id| id == base)
        .expect("base id present in matrix basis");
    let det = matrix.entries.minor_matrix(idx, idx).determinant();
    Ok(det.magnitude().clone())
}

/// Parse a decimal-string (or integer) JSON value into a BigInt.
pub(crate) fn bigint_from_json(value: &serde_json::Value) -> Option<BigInt> {
    match value {
        serde_json::Value::String(s) => s.parse().ok(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(BigInt::from(i))
            } else {
                n.as_u64().map(BigInt::from)
            }
        }
        _ => None,
    }
}

pub(crate) fn biguint_to_bigint(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}
