//! Exact integer linear algebra: Hermite normal forms, integer kernels and
//! small dense matrices.
//!
//! Row vectors throughout: a matrix acts by `v * M`, and a lattice is the
//! Z-span of the rows of a matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Square or rectangular matrix of `i64`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [i64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `v * M`, exact; `None` on overflow.
    pub fn apply(&self, v: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(v.len(), self.rows);
        let mut acc = vec![0i128; self.cols];
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (a, &m) in acc.iter_mut().zip(self.row(i)) {
                *a += x as i128 * m as i128;
            }
        }
        acc.into_iter().map(|a| i64::try_from(a).ok()).collect()
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        let mut acc = vec![0i128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for (a, &m) in acc.iter_mut().zip(other.row(k)) {
                    *a += x as i128 * m as i128;
                }
            }
            for (o, &a) in out.row_mut(i).iter_mut().zip(&acc) {
                *o = i64::try_from(a).ok()?;
            }
        }
        Some(out)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        self.checked_mul(other).expect("integer matrix product overflows i64")
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        self.lin_comb(1, other, 1)
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.lin_comb(1, other, -1)
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: i64, other: &IntMatrix, b: i64) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| {
                a.checked_mul(x)
                    .and_then(|u| b.checked_mul(y).and_then(|v| u.checked_add(v)))
                    .expect("integer matrix combination overflows i64")
            })
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub_scalar(&self, c: i64) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i) - c;
            m.set(i, i, v);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.rows)
    }

    /// Entries of the matrix as one long row (row-major).
    pub fn flatten(&self) -> &[i64] {
        &self.data
    }
}

/// Integer arithmetic used by the Hermite normal form; `None` signals
/// overflow and makes the caller retry with big integers.
pub trait HnfInt: Clone + PartialEq + fmt::Debug {
    fn hzero() -> Self;
    fn from_i64(x: i64) -> Self;
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn his_zero(&self) -> bool;
    fn his_neg(&self) -> bool;
    fn hneg(&self) -> Option<Self>;
    fn hadd(&self, o: &Self) -> Option<Self>;
    fn hmul(&self, o: &Self) -> Option<Self>;
    fn hdiv_floor(&self, o: &Self) -> Self;
    fn divides(&self, o: &Self) -> bool;
    fn div_exact(&self, o: &Self) -> Self;
    /// `(g, s, t)` with `s a + t b = g > 0`.
    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self);

    fn hsub(&self, o: &Self) -> Option<Self> {
        self.hadd(&o.hneg()?)
    }
}

impl HnfInt for i128 {
    fn hzero() -> Self {
        0
    }
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn his_zero(&self) -> bool {
        *self == 0
    }
    fn his_neg(&self) -> bool {
        *self < 0
    }
    fn hneg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn hadd(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn hmul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn hdiv_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        *self != 0 && o % self == 0
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (*a, *b);
        let (mut s0, mut s1) = (1i128, 0i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0.div_euclid(r1);
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 < 0 {
            (-r0, -s0, -t0)
        } else {
            (r0, s0, t0)
        }
    }
}

impl HnfInt for BigInt {
    fn hzero() -> Self {
        Zero::zero()
    }
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn his_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn his_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn hneg(&self) -> Option<Self> {
        Some(-self)
    }
    fn hadd(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn hmul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn hdiv_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        !Zero::is_zero(self) && Zero::is_zero(&(o % self))
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let e = a.extended_gcd(b);
        if Signed::is_negative(&e.gcd) {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        }
    }
}

/// Hermite normal form of a row lattice: rows in echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub cols: usize,
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

struct HnfBuilder<T: HnfInt> {
    cols: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: HnfInt> HnfBuilder<T> {
    fn new(cols: usize) -> Self {
        HnfBuilder { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    // r := r - q * s, on the columns from `from` on
    fn axpy(r: &mut [T], q: &T, s: &[T], from: usize) -> Option<()> {
        for (x, y) in r[from..].iter_mut().zip(&s[from..]) {
            if !y.his_zero() {
                *x = x.hsub(&q.hmul(y)?)?;
            }
        }
        Some(())
    }

    fn insert(&mut self, mut v: Vec<T>) -> Option<()> {
        let mut start = 0;
        loop {
            let Some(c) = (start..self.cols).find(|&c| !v[c].his_zero()) else {
                return Some(());
            };
            match self.pivots.binary_search(&c) {
                Ok(i) => {
                    let a = self.rows[i][c].clone();
                    let b = v[c].clone();
                    if a.divides(&b) {
                        let q = b.div_exact(&a);
                        Self::axpy(&mut v, &q, &self.rows[i], c)?;
                    } else {
                        let (g, s, t) = T::xgcd(&a, &b);
                        let a_g = a.div_exact(&g);
                        let b_g = b.div_exact(&g);
                        let row = &self.rows[i];
                        // entries left of the pivot column are zero in both
                        let mut new_row = vec![T::hzero(); c];
                        let mut new_v = vec![T::hzero(); c];
                        for (x, y) in row.iter().zip(&v).skip(c) {
                            new_row.push(s.hmul(x)?.hadd(&t.hmul(y)?)?);
                            new_v.push(a_g.hmul(y)?.hsub(&b_g.hmul(x)?)?);
                        }
                        self.rows[i] = new_row;
                        v = new_v;
                    }
                    start = c + 1;
                }
                Err(pos) => {
                    if v[c].his_neg() {
                        for x in v.iter_mut() {
                            *x = x.hneg()?;
                        }
                    }
                    self.pivots.insert(pos, c);
                    self.rows.insert(pos, v);
                    return Some(());
                }
            }
        }
    }

    fn reduce(&mut self) -> Option<()> {
        for i in (0..self.rows.len()).rev() {
            let p = self.pivots[i];
            let (upper, lower) = self.rows.split_at_mut(i);
            let pr = &lower[0];
            for r in upper.iter_mut() {
                let q = r[p].hdiv_floor(&pr[p]);
                if !q.his_zero() {
                    Self::axpy(r, &q, pr, p)?;
                }
            }
        }
        Some(())
    }

    fn finish(self) -> Hnf {
        Hnf {
            cols: self.cols,
            rows: self.rows.iter().map(|r| r.iter().map(|x| x.to_big()).collect()).collect(),
            pivots: self.pivots,
        }
    }
}

fn try_hnf<T: HnfInt>(cols: usize, vectors: &[Vec<BigInt>]) -> Option<Hnf> {
    let mut b = HnfBuilder::<T>::new(cols);
    for v in vectors {
        let tv: Option<Vec<T>> = v.iter().map(T::from_big).collect();
        b.insert(tv?)?;
    }
    b.reduce()?;
    Some(b.finish())
}

fn try_hnf_i64<T: HnfInt>(cols: usize, vectors: &[Vec<i64>]) -> Option<Hnf> {
    let mut b = HnfBuilder::<T>::new(cols);
    for v in vectors {
        b.insert(v.iter().map(|&x| T::from_i64(x)).collect())?;
    }
    b.reduce()?;
    Some(b.finish())
}

impl Hnf {
    /// HNF of the lattice spanned by `vectors`, each of length `cols`.
    pub fn of_big(cols: usize, vectors: &[Vec<BigInt>]) -> Hnf {
        if let Some(h) = try_hnf::<i128>(cols, vectors) {
            return h;
        }
        try_hnf::<BigInt>(cols, vectors).expect("big integer arithmetic cannot overflow")
    }

    pub fn of_i64(cols: usize, vectors: &[Vec<i64>]) -> Hnf {
        if let Some(h) = try_hnf_i64::<i128>(cols, vectors) {
            return h;
        }
        try_hnf_i64::<BigInt>(cols, vectors).expect("big integer arithmetic cannot overflow")
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Product of the pivots: the index of the lattice in its saturation
    /// when the lattice has full rank in the pivot coordinates.
    pub fn pivot_product(&self) -> BigInt {
        self.rows.iter().zip(&self.pivots).map(|(r, &p)| r[p].clone()).product()
    }

    /// Coordinates of `v` in the row basis, or `None` when `v` is not in
    /// the lattice.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.cols);
        let mut v = v.to_vec();
        let mut out = Vec::with_capacity(self.rows.len());
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if (r[p].clone() - BigInt::one()).is_zero() {
                out.push(v[p].clone());
            } else {
                if !(&v[p] % &r[p]).is_zero() {
                    return None;
                }
                out.push(&v[p] / &r[p]);
            }
            let q = out.last().unwrap().clone();
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= &q * y;
                }
            }
        }
        v.iter().all(|x| x.is_zero()).then_some(out)
    }

    /// Rows as `i64`, when they fit.
    pub fn rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.rows.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
    }
}

/// Z-basis (in Hermite form) of `{ y in Z^n : y * A = 0 }` for the
/// `n x m` matrix `A` given by rows.
pub fn left_kernel(rows: &[Vec<BigInt>], m: usize) -> Vec<Vec<BigInt>> {
    let n = rows.len();
    let aug: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            v
        })
        .collect();
    let h = Hnf::of_big(m + n, &aug);
    h.rows
        .iter()
        .zip(&h.pivots)
        .filter(|(_, &p)| p >= m)
        .map(|(r, _)| r[m..].to_vec())
        .collect()
}

pub fn left_kernel_i64(rows: &[Vec<i64>], m: usize) -> Vec<Vec<BigInt>> {
    let big: Vec<Vec<BigInt>> =
        rows.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    left_kernel(&big, m)
}

/// Integer vector divided by the gcd of its entries, first nonzero entry
/// positive.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = v.iter().find(|x| !x.is_zero()).map_or(1, |x| if x.is_negative() { -1 } else { 1 });
    v.iter().map(|x| x / &g * sign).collect()
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}
