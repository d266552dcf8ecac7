//! Exact integer matrices, Smith normal form and image indices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Builds a matrix from a list of rows. Every row must have the same length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            entries.extend(r.iter().map(|&v| BigInt::from(v)));
        }
        Ok(IntMatrix { rows: rows.len(), cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal<I: IntoIterator<Item = BigInt>>(diag: I) -> Self {
        let diag: Vec<BigInt> = diag.into_iter().collect();
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
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

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn try_sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    fn same_shape(&self, other: &IntMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} differs from {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Entries reduced into `0..n`.
    pub fn reduce_mod(&self, n: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.mod_floor(n)).collect(),
        }
    }

    pub fn vstack(blocks: &[IntMatrix]) -> Result<IntMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut entries = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::Dimension(format!(
                    "cannot stack {} columns on {} columns",
                    b.cols, cols
                )));
            }
            rows += b.rows;
            entries.extend(b.entries.iter().cloned());
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn block_diag(blocks: &[IntMatrix]) -> IntMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn pow(&self, mut k: u64) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            base = base.try_mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    pub fn det(&self) -> Result<BigInt> {
        let p = char_poly(self)?;
        let c0 = p.coeff(0);
        Ok(if self.rows.is_multiple_of(2) { c0 } else { -c0 })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        snf(self).rank()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows().iter().map(|r| {
            r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        })).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
        let width = cells.iter().map(|c| c.len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|j| format!("{:>w$}", cells[i * self.cols + j], w = width))
                .collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_add(rhs).expect("matrix sum dimension mismatch")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_sub(rhs).expect("matrix difference dimension mismatch")
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }
}

/// `left · M · right = form`, with `form` diagonal and its diagonal a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    pub form: IntMatrix,
    pub right: IntMatrix,
    pub diagonal: Vec<BigInt>,
    left_inverse: IntMatrix,
    right_inverse: IntMatrix,
}

impl SmithDecomposition {
    pub fn left_inverse(&self) -> &IntMatrix {
        &self.left_inverse
    }

    pub fn right_inverse(&self) -> &IntMatrix {
        &self.right_inverse
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    /// Invariant factors different from 1, including trailing zeros.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

// Working state for the reduction: dense rows plus the four transforms.
struct Reducer {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
    m: usize,
    n: usize,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        self.a.swap(i, k);
        self.u.swap(i, k);
        for row in self.u_inv.iter_mut() {
            row.swap(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(j, k);
        }
        for row in self.v.iter_mut() {
            row.swap(j, k);
        }
        self.v_inv.swap(j, k);
    }

    // row_i += q·row_k
    fn add_row(&mut self, i: usize, k: usize, q: &BigInt) {
        for j in 0..self.n {
            let t = &self.a[k][j] * q;
            self.a[i][j] += t;
        }
        for j in 0..self.m {
            let t = &self.u[k][j] * q;
            self.u[i][j] += t;
        }
        for r in 0..self.m {
            let t = &self.u_inv[r][i] * q;
            self.u_inv[r][k] -= t;
        }
    }

    // col_j += q·col_k
    fn add_col(&mut self, j: usize, k: usize, q: &BigInt) {
        for i in 0..self.m {
            let t = &self.a[i][k] * q;
            self.a[i][j] += t;
        }
        for i in 0..self.n {
            let t = &self.v[i][k] * q;
            self.v[i][j] += t;
        }
        for c in 0..self.n {
            let t = &self.v_inv[j][c] * q;
            self.v_inv[k][c] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    // Smallest nonzero |entry| in the trailing block, scanning row by row.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[bi][bj].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let steps = self.m.min(self.n);
        for t in 0..steps {
            let Some((pi, pj)) = self.min_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = &self.a[i][t] / &self.a[t][t];
                    if !q.is_zero() {
                        self.add_row(i, t, &-q);
                    }
                    if !self.a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..self.n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = &self.a[t][j] / &self.a[t][t];
                    if !q.is_zero() {
                        self.add_col(j, t, &-q);
                    }
                    if !self.a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // a remainder is now smaller than the pivot
                    let mut best = (t, t);
                    for i in t + 1..self.m {
                        let x = &self.a[i][t];
                        if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.n {
                        let x = &self.a[t][j];
                        if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                let bad = (t + 1..self.m).find(|&i| {
                    (t + 1..self.n).any(|j| !self.a[i][j].is_multiple_of(&self.a[t][t]))
                });
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>, r: usize, c: usize) -> IntMatrix {
    IntMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
}

/// Smith normal form with unimodular transforms (and their inverses).
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (m.rows, m.cols);
    let mut red = Reducer {
        a: m.to_rows(),
        u: ident(r),
        u_inv: ident(r),
        v: ident(c),
        v_inv: ident(c),
        m: r,
        n: c,
    };
    red.run();
    let diagonal = (0..r.min(c)).map(|i| red.a[i][i].clone()).collect();
    SmithDecomposition {
        left: to_matrix(red.u, r, r),
        form: to_matrix(red.a, r, c),
        right: to_matrix(red.v, c, c),
        diagonal,
        left_inverse: to_matrix(red.u_inv, r, r),
        right_inverse: to_matrix(red.v_inv, c, c),
    }
}

/// Basis of the integer kernel `{x : M x = 0}`, as the columns of the returned matrix.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let d = snf(m);
    let rank = d.rank();
    let n = m.cols;
    let mut k = IntMatrix::zeros(n, n - rank);
    for i in 0..n {
        for j in rank..n {
            k.set(i, j - rank, d.right.get(i, j).clone());
        }
    }
    k
}

/// One block of an image computation: `A` reduced modulo `modulus`.
/// The multiplicity of the target summand is the row count of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularMap {
    pub matrix: IntMatrix,
    pub modulus: BigInt,
}

impl ModularMap {
    pub fn new(matrix: IntMatrix, modulus: impl Into<BigInt>) -> Self {
        ModularMap { matrix, modulus: modulus.into() }
    }
}

/// Basis (as columns) of `L = {x ∈ ℤ^c : A_j x ≡ 0 mod n_j for all j}`.
pub fn stabilizer_lattice(maps: &[ModularMap]) -> Result<IntMatrix> {
    let c = match maps.first() {
        Some(m) => m.matrix.cols,
        None => return Ok(IntMatrix::identity(0)),
    };
    for m in maps {
        if m.matrix.cols != c {
            return Err(Error::Dimension(format!(
                "maps have {} and {} columns",
                c, m.matrix.cols
            )));
        }
        if !m.modulus.is_positive() {
            return Err(Error::Dimension(format!("modulus {} must be positive", m.modulus)));
        }
    }
    let blocks: Vec<&ModularMap> = maps.iter().filter(|m| !m.modulus.is_one()).collect();
    let total: usize = blocks.iter().map(|m| m.matrix.rows).sum();
    if total == 0 {
        return Ok(IntMatrix::identity(c));
    }
    // [A | -N] (x; y) = 0
    let mut sys = IntMatrix::zeros(total, c + total);
    let mut row = 0;
    for m in &blocks {
        let a = m.matrix.reduce_mod(&m.modulus);
        for i in 0..a.rows {
            for j in 0..c {
                sys.set(row, j, a.get(i, j).clone());
            }
            sys.set(row, c + row, -&m.modulus);
            row += 1;
        }
    }
    let ker = kernel_basis(&sys);
    let mut proj = IntMatrix::zeros(c, ker.cols);
    for i in 0..c {
        for j in 0..ker.cols {
            proj.set(i, j, ker.get(i, j).clone());
        }
    }
    // Column span of proj = left⁻¹ · diag(d) · ℤ^c.
    let d = snf(&proj);
    debug_assert_eq!(d.rank(), c);
    let mut basis = IntMatrix::zeros(c, c);
    for j in 0..c {
        for i in 0..c {
            basis.set(i, j, d.left_inverse.get(i, j) * &d.diagonal[j]);
        }
    }
    Ok(basis)
}

/// `|image|` of `x ↦ (A_j x mod n_j)_j`, i.e. the index of the stabilizer lattice.
pub fn image_cardinality(maps: &[ModularMap]) -> Result<BigInt> {
    let basis = stabilizer_lattice(maps)?;
    if basis.rows == 0 {
        return Ok(BigInt::one());
    }
    Ok(snf(&basis).diagonal.iter().product())
}

/// Characteristic polynomial `det(xI − M)` by Berkowitz' division-free recursion.
pub fn char_poly(m: &IntMatrix) -> Result<IntPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(IntPoly::one());
    }
    // coefficients, highest degree first
    let mut vect = vec![BigInt::one(), -m.get(0, 0)];
    for r in 1..n {
        let a_rr = m.get(r, r);
        let mut t = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-a_rr);
        // v = C, then A_sub·C, A_sub²·C ...
        let mut v: Vec<BigInt> = (0..r).map(|i| m.get(i, r).clone()).collect();
        for k in 0..r {
            let rc: BigInt = (0..r).map(|j| m.get(r, j) * &v[j]).sum();
            t.push(-rc);
            if k + 1 < r {
                v = (0..r)
                    .map(|i| (0..r).map(|j| m.get(i, j) * &v[j]).sum())
                    .collect();
            }
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, c) in vect.iter().enumerate() {
                if i >= j {
                    *slot += &t[i - j] * c;
                }
            }
        }
        vect = next;
    }
    vect.reverse();
    Ok(IntPoly::new(vect))
}
