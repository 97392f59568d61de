//! Linear algebra and polynomials over F2, bit-packed.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Reduce integers mod 2.
    pub fn from_ints(xs: &[i64]) -> Self {
        let mut v = Self::zeros(xs.len());
        for (i, &x) in xs.iter().enumerate() {
            v.set(i, x & 1 == 1);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        let c: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        c & 1 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_bit_string())
    }
}

/// Row-major matrix over F2; vectors act on the left (`v * M`).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    pub cols: usize,
    pub rows: Vec<BitVec>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}", r.to_bit_string())?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { cols, rows: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { cols: n, rows: (0..n).map(|i| BitVec::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// `v * M`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.cols);
        for i in v.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|r| other.apply(r)).collect(),
        }
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.xor(b)).collect(),
        }
    }

    pub fn add_identity(&self) -> BitMatrix {
        let mut m = self.clone();
        for (i, r) in m.rows.iter_mut().enumerate() {
            r.flip(i);
        }
        m
    }

    pub fn pow(&self, mut e: u64) -> BitMatrix {
        let mut base = self.clone();
        let mut acc = BitMatrix::identity(self.cols);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        Echelon::from_vectors(self.cols, self.rows.iter().cloned()).rank()
    }

    /// Basis of `{v : v * M = 0}`.
    pub fn left_kernel(&self) -> Vec<BitVec> {
        let n = self.nrows();
        // Row-reduce [M | I]; rows whose M-part vanishes give the kernel.
        let mut aug: Vec<(BitVec, BitVec)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVec::unit(n, i)))
            .collect();
        let mut pivot_row = 0;
        for c in 0..self.cols {
            let Some(k) = (pivot_row..n).find(|&k| aug[k].0.get(c)) else {
                continue;
            };
            aug.swap(pivot_row, k);
            let (pa, pb) = aug[pivot_row].clone();
            for (k, row) in aug.iter_mut().enumerate() {
                if k != pivot_row && row.0.get(c) {
                    row.0.xor_assign(&pa);
                    row.1.xor_assign(&pb);
                }
            }
            pivot_row += 1;
        }
        aug.into_iter().skip(pivot_row).map(|(_, b)| b).collect()
    }

    /// Basis of the row space image `{v * M}`.
    pub fn image(&self) -> Vec<BitVec> {
        Echelon::from_vectors(self.cols, self.rows.iter().cloned()).basis().to_vec()
    }
}

/// Reduced echelon basis of a subspace of F2^n, supporting membership
/// tests and coordinates.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    // combination of inserted vectors giving each row
    combos: Vec<BitVec>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), inserted: 0 }
    }

    pub fn from_vectors(dim: usize, vs: impl IntoIterator<Item = BitVec>) -> Self {
        let mut e = Echelon::new(dim);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.rows
    }

    fn reduce_with_combo(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut v = v.clone();
        let mut combo = BitVec::zeros(self.inserted.max(1));
        for (k, (r, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if v.get(p) {
                v.xor_assign(r);
                if self.inserted > 0 {
                    let c = &self.combos[k];
                    for i in c.ones() {
                        combo.flip(i);
                    }
                }
            }
        }
        (v, combo)
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Insert a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let idx = self.inserted;
        self.inserted += 1;
        for c in self.combos.iter_mut() {
            let mut nc = BitVec::zeros(self.inserted);
            for i in c.ones() {
                nc.set(i, true);
            }
            *c = nc;
        }
        let (r, mut combo) = self.reduce_with_combo(&v);
        combo.flip(idx);
        let Some(p) = r.first_one() else {
            return false;
        };
        for (row, combo_row) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if row.get(p) {
                row.xor_assign(&r);
                combo_row.xor_assign(&combo);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, r);
        self.combos.insert(pos, combo);
        true
    }

    /// Express `v` as a combination of the inserted vectors.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let (r, combo) = self.reduce_with_combo(v);
        r.is_zero().then_some(combo)
    }
}

/// Polynomial over F2, bit `i` = coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Poly {
    bits: Vec<u64>,
}

impl F2Poly {
    pub fn zero() -> Self {
        F2Poly { bits: Vec::new() }
    }

    pub fn one() -> Self {
        F2Poly::monomial(0)
    }

    pub fn x() -> Self {
        F2Poly::monomial(1)
    }

    pub fn monomial(d: usize) -> Self {
        let mut p = F2Poly { bits: vec![0; d / 64 + 1] };
        p.bits[d / 64] = 1u64 << (d % 64);
        p
    }

    pub fn from_coeffs(c: &[bool]) -> Self {
        let mut p = F2Poly { bits: vec![0; c.len().div_ceil(64)] };
        for (i, &b) in c.iter().enumerate() {
            if b {
                p.bits[i / 64] |= 1u64 << (i % 64);
            }
        }
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.bits.last() == Some(&0) {
            self.bits.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        let w = self.bits.last()?;
        Some((self.bits.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.bits.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn add(&self, o: &F2Poly) -> F2Poly {
        let n = self.bits.len().max(o.bits.len());
        let mut bits = vec![0; n];
        for (i, b) in bits.iter_mut().enumerate() {
            *b = self.bits.get(i).copied().unwrap_or(0) ^ o.bits.get(i).copied().unwrap_or(0);
        }
        let mut p = F2Poly { bits };
        p.trim();
        p
    }

    pub fn mul(&self, o: &F2Poly) -> F2Poly {
        let (Some(da), Some(db)) = (self.degree(), o.degree()) else {
            return F2Poly::zero();
        };
        let mut out = vec![false; da + db + 1];
        for i in 0..=da {
            if self.coeff(i) {
                for j in 0..=db {
                    if o.coeff(j) {
                        out[i + j] ^= true;
                    }
                }
            }
        }
        F2Poly::from_coeffs(&out)
    }

    pub fn rem(&self, m: &F2Poly) -> F2Poly {
        let dm = m.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dm {
                break;
            }
            let shift = dr - dm;
            for i in 0..=dm {
                if m.coeff(i) {
                    let k = i + shift;
                    r.bits[k / 64] ^= 1u64 << (k % 64);
                }
            }
            r.trim();
        }
        r
    }

    pub fn gcd(&self, o: &F2Poly) -> F2Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Irreducibility via `gcd(x^(2^i) - x, f) = 1` for `i <= deg/2`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        let x = F2Poly::x();
        let mut t = x.clone();
        for _ in 0..d / 2 {
            t = t.mul(&t).rem(self);
            if t.add(&x).gcd(self).degree() != Some(0) {
                return false;
            }
        }
        true
    }

    pub fn coeffs(&self) -> Vec<bool> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i)).collect(),
        }
    }
}

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let mut terms = Vec::new();
        for i in (0..=d).rev() {
            if self.coeff(i) {
                terms.push(match i {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{i}"),
                });
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        let m = BitMatrix::from_rows(
            3,
            vec![
                BitVec::from_bools(&[true, true, false]),
                BitVec::from_bools(&[false, true, true]),
                BitVec::from_bools(&[true, false, true]),
            ],
        );
        assert_eq!(m.rank(), 2);
        let k = m.left_kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());
    }

    #[test]
    fn echelon_express() {
        let vs = vec![
            BitVec::from_bools(&[true, true, false, false]),
            BitVec::from_bools(&[false, true, true, false]),
            BitVec::from_bools(&[false, false, true, true]),
        ];
        let e = Echelon::from_vectors(4, vs.clone());
        let target = vs[0].xor(&vs[2]);
        let c = e.express(&target).unwrap();
        assert_eq!(c.to_bit_string(), "101");
        assert!(e.express(&BitVec::from_bools(&[true, false, false, false])).is_none());
    }

    #[test]
    fn irreducibility() {
        assert!(F2Poly::from_coeffs(&[true, true, true]).is_irreducible());
        assert!(!F2Poly::from_coeffs(&[true, false, true]).is_irreducible());
        assert!(F2Poly::from_coeffs(&[true, true, false, true]).is_irreducible());
        assert!(!F2Poly::from_coeffs(&[true, true, true, true]).is_irreducible());
    }
}
