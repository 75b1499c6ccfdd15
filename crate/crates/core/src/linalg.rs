//! Exact linear algebra over `Z/N`.
//!
//! Everything is row-vector convention: a matrix with `r` rows and `c`
//! columns acts as `x ↦ x·m` from `(Z/N)^r` to `(Z/N)^c`. Row spans are made
//! canonical with the Howell normal form, which is the right replacement for
//! reduced echelon form when `Z/N` has zero divisors: two matrices have the
//! same row span exactly when their Howell forms coincide, and reducing a
//! vector against a Howell form yields a canonical coset representative.

use std::fmt;

use crate::error::{Error, Result};

/// The ring `Z/N`, `2 <= N <= 2^31 - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub const MAX: u64 = (1 << 31) - 1;

    pub fn new(n: u64) -> Result<Self> {
        if (2..=Self::MAX).contains(&n) {
            Ok(Modulus(n))
        } else {
            Err(Error::InvalidModulus(n))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    #[inline]
    pub fn reduce_signed(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    /// Residues are below 2^31, so the product fits in a `u64`.
    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    /// Positive divisors of `N` in increasing order.
    pub fn divisors(self) -> Vec<u64> {
        divisors(self.0)
    }

    /// `gcd(a, N)`, the canonical generator of the ideal `(a)`; `N` for `a = 0`.
    pub fn ideal_generator(self, a: u64) -> u64 {
        gcd(a % self.0, self.0)
    }

    /// A unit `u` with `a·u ≡ gcd(a, N) (mod N)`.
    pub fn normalizing_unit(self, a: u64) -> u64 {
        let n = self.0;
        let a = a % n;
        if a == 0 {
            return 1;
        }
        let g = gcd(a, n);
        let n_red = n / g;
        let base = if n_red == 1 {
            0
        } else {
            inverse_mod(a / g, n_red).expect("coprime by construction")
        };
        let mut u = base;
        loop {
            if u != 0 && gcd(u, n) == 1 {
                return u;
            }
            u += n_red;
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.0)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Extended gcd on non-negative inputs: returns `(g, s, t)` with `s·a + t·b = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(a as i64, n as i64);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(n as i64) as u64)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization as `(p, e)` pairs in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Dense matrix over `Z/N`, row-major, entries reduced to `[0, N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatZN {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for MatZN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatZN[{}; {}x{}](", self.modulus, self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, ")")
    }
}

impl MatZN {
    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        MatZN {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus.get();
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod `N`.
    pub fn from_rows(modulus: Modulus, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| modulus.reduce(x)));
        }
        Ok(MatZN {
            modulus,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Like [`MatZN::from_rows`] but accepts signed entries.
    pub fn from_signed_rows(modulus: Modulus, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| modulus.reduce_signed(x)).collect())
            .collect();
        Self::from_rows(modulus, cols, &rows)
    }

    pub(crate) fn from_rows_unchecked(modulus: Modulus, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            debug_assert_eq!(r.len(), cols);
            data.extend(r);
        }
        MatZN {
            modulus,
            rows: nrows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = self.modulus.reduce(v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> MatZN {
        let mut t = MatZN::zeros(self.modulus, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &MatZN) -> Result<MatZN> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let n = self.modulus.get();
        let mut out = MatZN::zeros(self.modulus, self.rows, other.cols);
        for i in 0..self.rows {
            let acc = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (dst, &b) in acc.iter_mut().zip(orow) {
                    *dst = (*dst + a * b) % n;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MatZN) -> Result<MatZN> {
        self.check_same_shape(other)?;
        let m = self.modulus;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| m.add(a, b))
            .collect();
        Ok(MatZN { data, ..*self.shape_only() })
    }

    pub fn sub(&self, other: &MatZN) -> Result<MatZN> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MatZN {
        let m = self.modulus;
        MatZN {
            data: self.data.iter().map(|&a| m.neg(a)).collect(),
            ..*self.shape_only()
        }
    }

    pub fn scale(&self, c: u64) -> MatZN {
        let m = self.modulus;
        let c = m.reduce(c);
        MatZN {
            data: self.data.iter().map(|&a| m.mul(a, c)).collect(),
            ..*self.shape_only()
        }
    }

    /// Reinterprets the entries (as integers in `[0, N)`) modulo a different
    /// modulus. Used to lift along `Z/N' → Z/N` and to reduce back.
    pub fn with_modulus(&self, modulus: Modulus) -> MatZN {
        MatZN {
            modulus,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| modulus.reduce(a)).collect(),
        }
    }

    /// Stacks `self` over `other`.
    pub fn vstack(&self, other: &MatZN) -> Result<MatZN> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "vstack",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatZN {
            modulus: self.modulus,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `self` left of `other`.
    pub fn hstack(&self, other: &MatZN) -> Result<MatZN> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: "hstack",
                expected: self.rows,
                found: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(MatZN {
            modulus: self.modulus,
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn block_diag(modulus: Modulus, blocks: &[&MatZN]) -> MatZN {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = MatZN::zeros(modulus, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.data[(r0 + i) * cols + c0 + j] = modulus.reduce(b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Kronecker product `self ⊗ other`, rows indexed by `(i, k) ↦ i·other.rows + k`.
    pub fn kronecker(&self, other: &MatZN) -> MatZN {
        let m = self.modulus;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = MatZN::zeros(m, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] =
                            m.mul(a, other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.rows);
        let n = self.modulus.get();
        let mut out = vec![0u64; self.cols];
        for (k, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (dst, &b) in out.iter_mut().zip(self.row(k)) {
                *dst = (*dst + a * b) % n;
            }
        }
        out
    }

    fn check_same_shape(&self, other: &MatZN) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix shape",
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    fn shape_only(&self) -> &Self {
        self
    }
}

/// Index of the first nonzero entry.
#[inline]
pub fn leading_index(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

pub(crate) fn vec_add(m: Modulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| m.add(x, y)).collect()
}

pub(crate) fn vec_sub(m: Modulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| m.sub(x, y)).collect()
}

pub(crate) fn vec_scale(m: Modulus, a: &[u64], c: u64) -> Vec<u64> {
    let c = m.reduce(c);
    a.iter().map(|&x| m.mul(x, c)).collect()
}

/// Howell normal form of the span of `rows` (each of length `cols`), as a
/// list of nonzero rows with strictly increasing pivots.
pub(crate) fn howell_rows(mut a: Vec<Vec<u64>>, cols: usize, m: Modulus) -> Vec<Vec<u64>> {
    let n = m.get();
    a.retain(|r| r.iter().any(|&x| x != 0));
    let mut r = 0;
    for c in 0..cols {
        if r >= a.len() {
            break;
        }
        for i in (r + 1)..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            if a[r][c] == 0 {
                a.swap(r, i);
                continue;
            }
            let x = a[r][c] as i64;
            let y = a[i][c] as i64;
            let (g, s, t) = ext_gcd(x, y);
            let s = m.reduce_signed(s);
            let t = m.reduce_signed(t);
            let u = m.reduce_signed(-(y / g));
            let v = m.reduce_signed(x / g);
            let (lo, hi) = a.split_at_mut(i);
            let (ri, rj) = (&mut lo[r], &mut hi[0]);
            for k in c..cols {
                let p = ri[k];
                let q = rj[k];
                ri[k] = (s * p + t * q) % n;
                rj[k] = (u * p + v * q) % n;
            }
        }
        if a[r][c] == 0 {
            continue;
        }
        let unit = m.normalizing_unit(a[r][c]);
        if unit != 1 {
            for k in c..cols {
                a[r][k] = m.mul(a[r][k], unit);
            }
        }
        let p = a[r][c];
        for i in 0..r {
            let q = a[i][c] / p;
            if q != 0 {
                for k in c..cols {
                    let sub = m.mul(q, a[r][k]);
                    a[i][k] = m.sub(a[i][k], sub);
                }
            }
        }
        if p != 1 {
            let ann = n / p;
            let extra: Vec<u64> = a[r].iter().map(|&x| m.mul(x, ann)).collect();
            if extra.iter().any(|&x| x != 0) {
                a.push(extra);
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Reduces `v` in place against Howell rows; records the quotient used for
/// each row when `coeffs` is given. The result is the canonical
/// representative of `v + span(h)`.
pub(crate) fn reduce_against(
    h: &[Vec<u64>],
    v: &mut [u64],
    m: Modulus,
    mut coeffs: Option<&mut [u64]>,
) {
    for (idx, row) in h.iter().enumerate() {
        let c = leading_index(row).expect("Howell rows are nonzero");
        let p = row[c];
        let q = v[c] / p;
        if q != 0 {
            for k in c..v.len() {
                v[k] = m.sub(v[k], m.mul(q, row[k]));
            }
            if let Some(cs) = coeffs.as_deref_mut() {
                cs[idx] = m.add(cs[idx], q);
            }
        }
    }
}

/// Output of [`howell_form`].
///
/// `h = transform · m` and `m = back · h`, so the row spans agree. `h` has
/// only its nonzero rows; its row count may exceed the rank of `m` (and
/// even the row count of `m`) because the Howell property can require
/// annihilator rows.
#[derive(Clone, Debug)]
pub struct Howell {
    pub h: MatZN,
    pub transform: MatZN,
    pub back: MatZN,
}

pub fn howell_form(m: &MatZN) -> Howell {
    let solver = Solver::new(m);
    let modulus = m.modulus;
    let h = MatZN::from_rows_unchecked(modulus, m.cols, solver.image_rows.clone());
    let transform = MatZN::from_rows_unchecked(modulus, m.rows, solver.image_transform.clone());
    let mut back_rows = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut v = m.row(i).to_vec();
        let mut cs = vec![0; solver.image_rows.len()];
        reduce_against(&solver.image_rows, &mut v, modulus, Some(&mut cs));
        debug_assert!(v.iter().all(|&x| x == 0));
        back_rows.push(cs);
    }
    let back = MatZN::from_rows_unchecked(modulus, solver.image_rows.len(), back_rows);
    Howell { h, transform, back }
}

/// Precomputed Howell form of `[m | I]`, answering repeated `x·m = b`
/// queries and exposing the left kernel of `m`.
#[derive(Clone, Debug)]
pub struct Solver {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    image_rows: Vec<Vec<u64>>,
    image_transform: Vec<Vec<u64>>,
    kernel_rows: Vec<Vec<u64>>,
}

impl Solver {
    pub fn new(m: &MatZN) -> Self {
        let modulus = m.modulus;
        let (rows, cols) = (m.rows, m.cols);
        let aug: Vec<Vec<u64>> = (0..rows)
            .map(|i| {
                let mut r = m.row(i).to_vec();
                r.extend((0..rows).map(|j| u64::from(i == j) % modulus.get()));
                r
            })
            .collect();
        let h = howell_rows(aug, cols + rows, modulus);
        let mut image_rows = Vec::new();
        let mut image_transform = Vec::new();
        let mut kernel_rows = Vec::new();
        for r in h {
            if r[..cols].iter().any(|&x| x != 0) {
                image_rows.push(r[..cols].to_vec());
                image_transform.push(r[cols..].to_vec());
            } else {
                kernel_rows.push(r[cols..].to_vec());
            }
        }
        Solver {
            modulus,
            rows,
            cols,
            image_rows,
            image_transform,
            kernel_rows,
        }
    }

    /// Some `x` with `x·m = b`, or `None`.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        debug_assert_eq!(b.len(), self.cols);
        let mut v: Vec<u64> = b.iter().map(|&x| self.modulus.reduce(x)).collect();
        let mut cs = vec![0; self.image_rows.len()];
        reduce_against(&self.image_rows, &mut v, self.modulus, Some(&mut cs));
        if v.iter().any(|&x| x != 0) {
            return None;
        }
        let mut x = vec![0; self.rows];
        for (c, t) in cs.iter().zip(&self.image_transform) {
            if *c == 0 {
                continue;
            }
            for (dst, &e) in x.iter_mut().zip(t) {
                *dst = self.modulus.add(*dst, self.modulus.mul(*c, e));
            }
        }
        Some(x)
    }

    pub fn contains(&self, b: &[u64]) -> bool {
        let mut v = b.to_vec();
        reduce_against(&self.image_rows, &mut v, self.modulus, None);
        v.iter().all(|&x| x == 0)
    }

    /// Howell rows of the row span of `m`.
    pub fn image_rows(&self) -> &[Vec<u64>] {
        &self.image_rows
    }

    /// Howell rows of `{x : x·m = 0}`.
    pub fn kernel_rows(&self) -> &[Vec<u64>] {
        &self.kernel_rows
    }
}

/// Some `x` with `x·m = b`, if one exists.
pub fn solve(m: &MatZN, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if b.len() != m.cols {
        return Err(Error::DimensionMismatch {
            context: "solve right-hand side",
            expected: m.cols,
            found: b.len(),
        });
    }
    Ok(Solver::new(m).solve(b))
}

/// Left kernel `{x : x·m = 0}` in Howell form (`m.rows` columns).
pub fn kernel(m: &MatZN) -> MatZN {
    let s = Solver::new(m);
    MatZN::from_rows_unchecked(m.modulus, m.rows, s.kernel_rows)
}

pub fn row_span_contains(m: &MatZN, v: &[u64]) -> Result<bool> {
    if v.len() != m.cols {
        return Err(Error::DimensionMismatch {
            context: "row span membership",
            expected: m.cols,
            found: v.len(),
        });
    }
    let h = howell_rows(m.row_vecs(), m.cols, m.modulus);
    let mut w: Vec<u64> = v.iter().map(|&x| m.modulus.reduce(x)).collect();
    reduce_against(&h, &mut w, m.modulus, None);
    Ok(w.iter().all(|&x| x == 0))
}

/// Orders of the cyclic summands of `(Z/N)^cols / rowspan(rel)`, obtained by
/// diagonalising with unimodular row and column operations. Trivial
/// summands are dropped; the list is not normalised (see
/// [`invariant_factors_of`]).
pub fn cyclic_orders(rel: &MatZN) -> Vec<u64> {
    let m = rel.modulus;
    let n = m.get();
    let mut a = rel.row_vecs();
    let rows = a.len();
    let cols = rel.cols;
    let mut t = 0;
    while t < rows.min(cols) {
        let pos = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != 0);
        let Some((pi, pj)) = pos else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in (t + 1)..rows {
                if a[i][t] == 0 {
                    continue;
                }
                changed = true;
                let x = a[t][t] as i64;
                let y = a[i][t] as i64;
                let (g, s, tt) = if y % x == 0 { (x, 1, 0) } else { ext_gcd(x, y) };
                let (s, tt) = (m.reduce_signed(s), m.reduce_signed(tt));
                let u = m.reduce_signed(-(y / g));
                let v = m.reduce_signed(x / g);
                for k in 0..cols {
                    let p = a[t][k];
                    let q = a[i][k];
                    a[t][k] = (s * p + tt * q) % n;
                    a[i][k] = (u * p + v * q) % n;
                }
            }
            for j in (t + 1)..cols {
                if a[t][j] == 0 {
                    continue;
                }
                changed = true;
                let x = a[t][t] as i64;
                let y = a[t][j] as i64;
                let (g, s, tt) = if y % x == 0 { (x, 1, 0) } else { ext_gcd(x, y) };
                let (s, tt) = (m.reduce_signed(s), m.reduce_signed(tt));
                let u = m.reduce_signed(-(y / g));
                let v = m.reduce_signed(x / g);
                for row in a.iter_mut() {
                    let p = row[t];
                    let q = row[j];
                    row[t] = (s * p + tt * q) % n;
                    row[j] = (u * p + v * q) % n;
                }
            }
            if !changed {
                break;
            }
        }
        t += 1;
    }
    let mut orders = Vec::new();
    for j in 0..cols {
        let d = if j < t { gcd(a[j][j], n) } else { n };
        if d > 1 {
            orders.push(d);
        }
    }
    orders
}

/// Invariant factors `d_1 | d_2 | …` (all `> 1`) of `⊕ Z/c_i`.
pub fn invariant_factors_of(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &c in orders {
        for (p, e) in factorize(c) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for (p, mut es) in by_prime {
        es.sort_unstable_by(|a, b| b.cmp(a));
        for (k, e) in es.into_iter().enumerate() {
            factors[k] *= p.pow(e);
        }
    }
    factors.reverse();
    factors
}
