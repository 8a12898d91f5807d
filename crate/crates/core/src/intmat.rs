//! Exact integer matrices: incidence matrices, primitivity, powers of the
//! all-ones row vector and the minimal linear recurrence it satisfies.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::gcd_all;
use crate::error::{domain, Error, Result};
use crate::words::Morphism;

/// A dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// A row vector of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowVector(pub Vec<BigInt>);

impl RowVector {
    pub fn ones(d: usize) -> Self {
        RowVector(vec![BigInt::one(); d])
    }

    pub fn from_u64(values: &[u64]) -> Self {
        RowVector(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn gcd(&self) -> BigInt {
        gcd_all(&self.0)
    }

    /// True when every entry is divisible by `m`.
    pub fn divisible_by(&self, m: &BigInt) -> bool {
        self.0.iter().all(|x| x.is_multiple_of(m))
    }
}

impl fmt::Display for RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `1·M^{r+1} = Σ_{i<=r} coeffs[i] · 1·M^i` with `{1, 1M, ..., 1M^r}` free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceData {
    pub rank: usize,
    pub coeffs: Vec<BigInt>,
}

impl RecurrenceData {
    /// gcd of all coefficients.
    pub fn coeff_gcd(&self) -> BigInt {
        gcd_all(&self.coeffs)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = IntMatrix::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || rows.iter().any(|row| row.len() != c) {
            return domain("matrix rows must be non-empty and of equal length");
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        })
    }

    /// Entry `(i, j)` counts the occurrences of letter `i` in the image of `j`.
    pub fn incidence(m: &Morphism) -> Self {
        let rows = m.codomain().len();
        let cols = m.domain().len();
        let mut out = IntMatrix::zeros(rows, cols);
        for j in 0..cols {
            for &i in m.image(j).iter() {
                out.data[i * cols + j] += 1;
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_sums(&self) -> RowVector {
        RowVector::ones(self.rows).times(self)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return domain("dimension mismatch in matrix product");
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u64) -> Result<IntMatrix> {
        if !self.is_square() {
            return domain("power of a non-square matrix");
        }
        let mut acc = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return domain("determinant of a non-square matrix");
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
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
        Ok(sign * a[n - 1][n - 1].clone())
    }

    /// Some power of the matrix is entrywise positive. Decided by checking
    /// `M^{(d-1)^2+1}` on the zero pattern.
    pub fn is_primitive(&self) -> Result<bool> {
        if !self.is_square() {
            return domain("primitivity of a non-square matrix");
        }
        if self.data.iter().any(Signed::is_negative) {
            return domain("primitivity requires non-negative entries");
        }
        let d = self.rows;
        let pattern: Vec<bool> = self.data.iter().map(|x| !x.is_zero()).collect();
        let exponent = (d - 1) * (d - 1) + 1;
        let power = bool_pow(&pattern, d, exponent);
        Ok(power.iter().all(|&b| b))
    }

    /// `1 · M^k`.
    pub fn row_power(&self, k: usize) -> RowVector {
        let mut v = RowVector::ones(self.rows);
        for _ in 0..k {
            v = v.times(self);
        }
        v
    }

    /// Exact minimal recurrence of the sequence `1·M^k`.
    pub fn minimal_recurrence(&self) -> Result<RecurrenceData> {
        if !self.is_square() {
            return domain("recurrence of a non-square matrix");
        }
        let mut basis: Vec<RowVector> = vec![RowVector::ones(self.rows)];
        loop {
            let next = basis.last().expect("non-empty").times(self);
            if let Some(coeffs) = solve_in_span(&basis, &next) {
                let mut ints = Vec::with_capacity(coeffs.len());
                for c in &coeffs {
                    if !c.is_integer() {
                        return Err(Error::Invariant(format!(
                            "recurrence coefficient {c} of 1·M^{} is not integral",
                            basis.len()
                        )));
                    }
                    ints.push(c.to_integer());
                }
                return Ok(RecurrenceData {
                    rank: basis.len() - 1,
                    coeffs: ints,
                });
            }
            basis.push(next);
            if basis.len() > self.rows {
                return Err(Error::Invariant(
                    "more than d independent vectors in dimension d".into(),
                ));
            }
        }
    }
}

impl RowVector {
    /// `v · M`.
    pub fn times(&self, m: &IntMatrix) -> RowVector {
        assert_eq!(self.0.len(), m.rows, "dimension mismatch");
        let mut out = vec![BigInt::zero(); m.cols];
        for (i, vi) in self.0.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = m.get(i, j);
                if !e.is_zero() {
                    *o += vi * e;
                }
            }
        }
        RowVector(out)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let parts: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

fn bool_mul(a: &[bool], b: &[bool], d: usize) -> Vec<bool> {
    let mut out = vec![false; d * d];
    for i in 0..d {
        for k in 0..d {
            if a[i * d + k] {
                for j in 0..d {
                    out[i * d + j] |= b[k * d + j];
                }
            }
        }
    }
    out
}

fn bool_pow(m: &[bool], d: usize, mut k: usize) -> Vec<bool> {
    let mut acc: Vec<bool> = (0..d * d).map(|i| i / d == i % d).collect();
    let mut base = m.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            acc = bool_mul(&acc, &base, d);
        }
        k >>= 1;
        if k > 0 {
            base = bool_mul(&base, &base, d);
        }
    }
    acc
}

/// Coordinates of `target` in the span of `basis` (assumed free), or `None`.
fn solve_in_span(basis: &[RowVector], target: &RowVector) -> Option<Vec<BigRational>> {
    let n = basis.len();
    let d = target.dim();
    // Augmented system: d equations, n unknowns.
    let mut rows: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|v| BigRational::from_integer(v.0[i].clone()))
                .collect();
            row.push(BigRational::from_integer(target.0[i].clone()));
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let Some(p) = (pivot_row..d).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row[col..=n].iter_mut().zip(&pivot[col..=n]) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        coeffs[col] = rows[r][n].clone();
    }
    Some(coeffs)
}
