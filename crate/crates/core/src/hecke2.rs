//! The Hecke algebra T of weight 2 and level N acting on the plus
//! cuspidal lattice, its reduction T/2T, and the local factors of T/2T.

use crate::arith;
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec, Echelon, F2Poly};
use crate::modsym::{build_space, sturm_bound, ModularSymbolsSpace, Subspace};
use crate::zlinalg::IntMatrix;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use std::fmt;
use std::io::{self, Write};

/// Square matrix with entries in Z/2^64, row-major. Arithmetic wraps,
/// which is exact modulo 2^64.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat2Adic {
    pub n: usize,
    pub data: Vec<u64>,
}

impl Mat2Adic {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Mat2Adic { n, data }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        assert_eq!(m.rows, m.cols);
        Mat2Adic { n: m.rows, data: m.data.iter().map(|&x| x as u64).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &Mat2Adic) -> Mat2Adic {
        let n = self.n;
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            let out = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let x = self.data[i * n + k];
                if x == 0 {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o = o.wrapping_add(x.wrapping_mul(y));
                }
            }
        }
        Mat2Adic { n, data }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Mat2Adic, c: u64) -> Mat2Adic {
        let data =
            self.data.iter().zip(&other.data).map(|(&x, &y)| x.wrapping_add(c.wrapping_mul(y))).collect();
        Mat2Adic { n: self.n, data }
    }

    /// Reduction modulo 2.
    pub fn mod2(&self) -> BitMatrix {
        let n = self.n;
        let rows = (0..n)
            .map(|i| BitVec::from_bools(&(0..n).map(|j| self.get(i, j) & 1 == 1).collect::<Vec<_>>()))
            .collect();
        BitMatrix::from_rows(n, rows)
    }
}

fn inverse_odd(a: u64) -> u64 {
    debug_assert!(a & 1 == 1);
    let mut x = a;
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// Z-span of `T_1, ..., T_B` acting on the plus cuspidal lattice, tensored
/// with Z_2 and held modulo 2^64. Basis row `i` has entry `2^v_i` at its
/// pivot position and rows chosen after it vanish there.
#[derive(Debug, Clone)]
pub struct HeckeLattice {
    pub level: u64,
    pub sturm_bound: u64,
    pub rank: usize,
    genus: usize,
    pub basis: Vec<Mat2Adic>,
    pub pivots: Vec<usize>,
    pub valuations: Vec<u32>,
    /// Bits of 2-adic precision left for coordinates.
    pub precision: u32,
    hecke: Vec<Mat2Adic>,
    extra: BTreeMap<u64, Mat2Adic>,
}

/// Primes used to read off eigensystems: all primes up to the generator
/// bound, and at least 2 and 3.
pub fn eigensystem_primes(level: u64) -> Vec<u64> {
    arith::primes_up_to(sturm_bound(level).max(3))
}

fn hecke_up_to(space: &ModularSymbolsSpace, bound: u64) -> Result<Vec<Mat2Adic>> {
    let g = space.genus();
    let level = space.level;
    let mut t: Vec<Mat2Adic> = vec![Mat2Adic::identity(g)];
    for n in 2..=bound {
        let f = arith::factor(n);
        let (p, k) = f.factors[0];
        let at = |m: u64| &t[(m - 1) as usize];
        let m = if f.factors.len() == 1 && k == 1 {
            Mat2Adic::from_int(&*space.hecke_prime(Subspace::Plus, p)?)
        } else if f.factors.len() > 1 {
            let pk = p.pow(k);
            at(pk).mul(at(n / pk))
        } else if level % p == 0 {
            at(n / p).mul(at(p))
        } else {
            // T_{p^k} = T_p T_{p^(k-1)} - p T_{p^(k-2)}
            at(n / p).mul(at(p)).add_scaled(at(n / (p * p)), p.wrapping_neg())
        };
        t.push(m);
    }
    Ok(t)
}

impl HeckeLattice {
    /// Build the lattice from `T_1..T_bound`; `bound` defaults to the
    /// generator bound.
    pub fn with_bound(space: &ModularSymbolsSpace, bound: Option<u64>) -> Result<HeckeLattice> {
        let level = space.level;
        let b = sturm_bound(level);
        let bound = bound.unwrap_or(b).max(1);
        let g = space.genus();
        let hecke = hecke_up_to(space, bound)?;
        let mut rows: Vec<Vec<u64>> = hecke.iter().map(|m| m.data.clone()).collect();
        let mut basis: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();
        let mut valuations = Vec::new();
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let mut best: Option<(u32, usize, usize)> = None;
            'search: for (i, r) in rows.iter().enumerate() {
                for (c, &x) in r.iter().enumerate() {
                    if x != 0 && best.is_none_or(|b| x.trailing_zeros() < b.0) {
                        best = Some((x.trailing_zeros(), i, c));
                        if x & 1 == 1 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((v, i, c)) = best else { break };
            let mut row = rows.swap_remove(i);
            let u = inverse_odd(row[c] >> v);
            row.iter_mut().for_each(|x| *x = x.wrapping_mul(u));
            for r in rows.iter_mut() {
                let q = (r[c] >> v).wrapping_neg();
                if q != 0 {
                    for (x, &y) in r.iter_mut().zip(&row) {
                        *x = x.wrapping_add(q.wrapping_mul(y));
                    }
                }
            }
            basis.push(row);
            pivots.push(c);
            valuations.push(v);
        }
        if basis.len() != g {
            return Err(Error::ContractViolation(format!(
                "Hecke lattice has rank {} modulo 2^64 but genus is {g}",
                basis.len()
            )));
        }
        let lost: u32 = valuations.iter().sum();
        if lost > 56 {
            return Err(Error::ContractViolation(format!(
                "2-adic precision exhausted: pivot valuations sum to {lost}"
            )));
        }
        let mut lat = HeckeLattice {
            level,
            sturm_bound: b,
            rank: g,
            genus: g,
            basis: basis.into_iter().map(|data| Mat2Adic { n: g, data }).collect(),
            pivots,
            valuations,
            precision: 64 - lost,
            hecke,
            extra: BTreeMap::new(),
        };
        for p in eigensystem_primes(level) {
            if p > bound {
                lat.extra.insert(p, Mat2Adic::from_int(&*space.hecke_prime(Subspace::Plus, p)?));
            }
        }
        Ok(lat)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `T_n` modulo 2^64, for `n` up to the bound used or an extra prime.
    pub fn hecke_operator(&self, n: u64) -> Option<&Mat2Adic> {
        if n >= 1 && (n as usize) <= self.hecke.len() {
            Some(&self.hecke[(n - 1) as usize])
        } else {
            self.extra.get(&n)
        }
    }

    pub fn hecke_bound(&self) -> u64 {
        self.hecke.len() as u64
    }

    fn low_bits_zero(&self, x: u64) -> bool {
        self.precision >= 64 || x & ((1u64 << self.precision) - 1) == 0
    }

    /// Coordinates from the entries at the pivot positions, for a matrix
    /// known to lie in the Q-span of the lattice.
    fn coords_from_pivot_entries(&self, entries: &[u64]) -> Option<Vec<u64>> {
        let mut out: Vec<u64> = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let p = self.pivots[i];
            let mut x = entries[i];
            for (j, &c) in out.iter().enumerate() {
                x = x.wrapping_sub(c.wrapping_mul(self.basis[j].data[p]));
            }
            let v = self.valuations[i];
            if v > 0 && x & ((1u64 << v) - 1) != 0 {
                return None;
            }
            out.push(x >> v);
        }
        Some(out)
    }

    /// 2-adic coordinates of a matrix in the lattice basis; `None` if it
    /// is not in the lattice to the available precision. Checks every entry.
    pub fn coords(&self, m: &Mat2Adic) -> Option<Vec<u64>> {
        let entries: Vec<u64> = self.pivots.iter().map(|&p| m.data[p]).collect();
        let c = self.coords_from_pivot_entries(&entries)?;
        let mut acc = m.data.clone();
        for (ci, b) in c.iter().zip(&self.basis) {
            if *ci != 0 {
                for (a, &x) in acc.iter_mut().zip(&b.data) {
                    *a = a.wrapping_sub(ci.wrapping_mul(x));
                }
            }
        }
        acc.iter().all(|&a| self.low_bits_zero(a)).then_some(c)
    }

    /// Structure constants modulo 2: entry `(i, j)` is the reduction of
    /// the coordinates of `basis_i * basis_j`. Fails if a product leaves
    /// the lattice at a pivot.
    pub fn structure_constants_mod2(&self) -> Result<Vec<Vec<BitVec>>> {
        let g = self.genus;
        let r = self.rank;
        let pos: Vec<(usize, usize)> = self.pivots.iter().map(|&p| (p / g, p % g)).collect();
        let cols: Vec<Vec<Vec<u64>>> = self
            .basis
            .iter()
            .map(|b| pos.iter().map(|&(_, col)| (0..g).map(|k| b.get(k, col)).collect()).collect())
            .collect();
        let mut c = vec![vec![BitVec::zeros(r); r]; r];
        for i in 0..r {
            let a = &self.basis[i];
            for j in i..r {
                let entries: Vec<u64> = pos
                    .iter()
                    .zip(&cols[j])
                    .map(|(&(row, _), col)| {
                        a.data[row * g..(row + 1) * g]
                            .iter()
                            .zip(col)
                            .fold(0u64, |s, (&x, &y)| s.wrapping_add(x.wrapping_mul(y)))
                    })
                    .collect();
                let v = self.coords_from_pivot_entries(&entries).ok_or_else(|| {
                    Error::ContractViolation(format!(
                        "product of basis elements {i}, {j} is not in the Hecke lattice"
                    ))
                })?;
                let bits: Vec<bool> = v.iter().map(|&x| x & 1 == 1).collect();
                let bv = BitVec::from_bools(&bits);
                c[j][i] = bv.clone();
                c[i][j] = bv;
            }
        }
        Ok(c)
    }
}

/// Hecke lattice at the generator bound.
pub fn hecke_lattice(space: &ModularSymbolsSpace) -> Result<HeckeLattice> {
    HeckeLattice::with_bound(space, None)
}

/// True when `T_n` for `B < n <= 2B` already lie in the lattice.
pub fn generators_stable(space: &ModularSymbolsSpace, lattice: &HeckeLattice) -> Result<bool> {
    let wide = hecke_up_to(space, 2 * lattice.sturm_bound)?;
    Ok(wide[lattice.hecke.len()..].iter().all(|m| lattice.coords(m).is_some()))
}
/// Commutative F2-algebra given by structure constants on a basis.
#[derive(Debug, Clone)]
pub struct Mod2Algebra {
    pub dim: usize,
    table: Vec<BitVec>,
    pub one: BitVec,
    /// Images of the Hecke operators: `T_n` for `n <= B` and the extra primes.
    pub hecke: BTreeMap<u64, BitVec>,
}

impl Mod2Algebra {
    pub fn from_lattice(lat: &HeckeLattice) -> Result<Mod2Algebra> {
        let r = lat.rank;
        let table: Vec<BitVec> = lat.structure_constants_mod2()?.into_iter().flatten().collect();
        let bits = |v: Vec<u64>| BitVec::from_bools(&v.iter().map(|&x| x & 1 == 1).collect::<Vec<_>>());
        let mut hecke = BTreeMap::new();
        for n in 1..=lat.hecke_bound() {
            let m = lat.hecke_operator(n).unwrap();
            let v = lat.coords(m).ok_or_else(|| {
                Error::ContractViolation(format!("T_{n} is not in the Hecke lattice"))
            })?;
            hecke.insert(n, bits(v));
        }
        for (&p, m) in &lat.extra {
            let v = lat.coords(m).ok_or_else(|| {
                Error::ContractViolation(format!(
                    "T_{p} is not in the span of T_1..T_{}",
                    lat.hecke_bound()
                ))
            })?;
            hecke.insert(p, bits(v));
        }
        let one = hecke.get(&1).cloned().unwrap_or_else(|| BitVec::zeros(r));
        Ok(Mod2Algebra { dim: r, table, one, hecke })
    }

    pub fn mul(&self, x: &BitVec, y: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.dim);
        for i in x.ones() {
            for j in y.ones() {
                out.xor_assign(&self.table[i * self.dim + j]);
            }
        }
        out
    }

    /// Matrix of `y -> x y`.
    pub fn mult_matrix(&self, x: &BitVec) -> BitMatrix {
        let rows = (0..self.dim).map(|j| self.mul(&BitVec::unit(self.dim, j), x)).collect();
        BitMatrix::from_rows(self.dim, rows)
    }

    /// Matrix of the Frobenius `x -> x^2`, which is F2-linear.
    pub fn frobenius(&self) -> BitMatrix {
        let rows = (0..self.dim).map(|i| self.table[i * self.dim + i].clone()).collect();
        BitMatrix::from_rows(self.dim, rows)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &BitVec {
        &self.table[i * self.dim + j]
    }

    /// Image of `T_n`.
    pub fn hecke(&self, n: u64) -> Option<&BitVec> {
        self.hecke.get(&n)
    }

    /// Text dump of the structure constants.
    pub fn write_structure(&self, level: u64, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# T/2T: commutative F2-algebra; products of basis vectors as bit strings")?;
        writeln!(w, "level {level}")?;
        writeln!(w, "dim {}", self.dim)?;
        writeln!(w, "one {}", self.one.to_bit_string())?;
        for (n, v) in &self.hecke {
            writeln!(w, "hecke {n} {}", v.to_bit_string())?;
        }
        for i in 0..self.dim {
            for j in i..self.dim {
                writeln!(w, "mul {i} {j} {}", self.table[i * self.dim + j].to_bit_string())?;
            }
        }
        Ok(())
    }
}

/// `T/2T` with its structure constants.
pub fn reduce_mod2(lattice: &HeckeLattice) -> Result<Mod2Algebra> {
    Mod2Algebra::from_lattice(lattice)
}

/// Element of a finite field `F2[t]/(modulus)`, coordinates on `1, t, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Gf2kElement {
    #[serde(serialize_with = "ser_poly")]
    pub modulus: F2Poly,
    pub coords: Vec<bool>,
}

fn ser_poly<S: serde::Serializer>(p: &F2Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl Gf2kElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&b| !b)
    }

    pub fn is_one(&self) -> bool {
        self.coords.first() == Some(&true) && self.coords[1..].iter().all(|&b| !b)
    }

    /// The element of F2 this represents, for degree-one fields.
    pub fn as_f2(&self) -> Option<bool> {
        (self.coords.len() == 1).then(|| self.coords[0])
    }
}

impl fmt::Display for Gf2kElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &b)| b)
            .map(|(i, _)| match i {
                0 => "1".into(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// A local factor `(T/2T)_m` of the mod-2 Hecke algebra.
#[derive(Debug, Clone)]
pub struct LocalFactorMod2 {
    pub idempotent: BitVec,
    pub local_dim: usize,
    pub residue_degree: usize,
    pub eisenstein: bool,
    /// Images of `T_l` in the residue field, for the eigensystem primes.
    pub eigensystem: BTreeMap<u64, Gf2kElement>,
    pub residue_modulus: F2Poly,
    basis: Vec<BitVec>,
    radical: Vec<BitVec>,
    residue_map: BitMatrix,
    power_basis: Echelon,
}

/// The decomposition of `T/2T` into local factors.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub level: u64,
    pub sturm_bound: u64,
    pub algebra: Mod2Algebra,
    pub factors: Vec<LocalFactorMod2>,
}

impl LocalFactorMod2 {
    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn radical(&self) -> &[BitVec] {
        &self.radical
    }

    /// Residue of an element of `T/2T` in this factor's residue field.
    pub fn residue(&self, x: &BitVec) -> Gf2kElement {
        let r = self.residue_map.apply(x);
        let combo = self.power_basis.express(&r).expect("residue lies in the residue field");
        Gf2kElement {
            modulus: self.residue_modulus.clone(),
            coords: (0..self.residue_degree).map(|i| combo.get(i)).collect(),
        }
    }

}

/// Outcome of the `T_m = Z_2` test on a local factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TmTest {
    /// Residue field F2 and rank one.
    EqualsZ2,
    /// Residue field F2 and rank at least two.
    LargerThanZ2,
    /// Residue field bigger than F2; the test does not apply.
    ResidueFieldNotF2,
}

impl TmTest {
    pub fn holds(self) -> bool {
        self == TmTest::EqualsZ2
    }
}

/// The completed local factor is Z2 exactly when its residue field is F2
/// and it has rank one over Z2, i.e. `d_m = 1`.
pub fn tm_equals_z2(factor: &LocalFactorMod2) -> TmTest {
    if factor.residue_degree != 1 {
        TmTest::ResidueFieldNotF2
    } else if factor.local_dim == 1 {
        TmTest::EqualsZ2
    } else {
        TmTest::LargerThanZ2
    }
}

fn ceil_log2(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

/// Split `T/2T` into local factors via its idempotents: the idempotents
/// form the fixed space of the Frobenius, and splitting `1` against a
/// basis of that space yields the primitive ones.
pub fn decompose_mod2(level: u64, alg: &Mod2Algebra) -> Result<Decomposition> {
    let g = alg.dim;
    let frob = alg.frobenius();
    let fixed = frob.add_identity().left_kernel();
    let mut idems: Vec<BitVec> = if g == 0 { Vec::new() } else { vec![alg.one.clone()] };
    for b in &fixed {
        let mut next = Vec::with_capacity(idems.len() + 1);
        for e in idems {
            let f = alg.mul(&e, b);
            if !f.is_zero() && f != e {
                next.push(e.xor(&f));
                next.push(f);
            } else {
                next.push(e);
            }
        }
        idems = next;
    }
    if idems.len() != fixed.len() {
        return Err(Error::ContractViolation(format!(
            "found {} primitive idempotents for an idempotent space of dimension {}",
            idems.len(),
            fixed.len()
        )));
    }
    idems.sort_by_key(|e| e.to_bit_string());
    idems.reverse();
    let primes = eigensystem_primes(level);
    let mut factors = Vec::with_capacity(idems.len());
    for e in idems {
        factors.push(local_factor(level, alg, &frob, e, &primes)?);
    }
    Ok(Decomposition { level, sturm_bound: sturm_bound(level), algebra: alg.clone(), factors })
}

fn local_factor(
    level: u64,
    alg: &Mod2Algebra,
    frob: &BitMatrix,
    e: BitVec,
    primes: &[u64],
) -> Result<LocalFactorMod2> {
    let g = alg.dim;
    let le = alg.mult_matrix(&e);
    let basis = le.image();
    let d = basis.len();
    let m = ceil_log2(d);
    let fm = frob.pow(m as u64);
    let images = BitMatrix::from_rows(g, basis.iter().map(|b| fm.apply(b)).collect());
    let radical: Vec<BitVec> = images
        .left_kernel()
        .iter()
        .map(|y| {
            let mut v = BitVec::zeros(g);
            for i in y.ones() {
                v.xor_assign(&basis[i]);
            }
            v
        })
        .collect();
    let k = d - radical.len();
    if k == 0 {
        return Err(Error::ContractViolation("local factor with nilpotent idempotent".into()));
    }
    // Frobenius power that kills the radical and fixes the residue field.
    let mprime = (m as usize).div_ceil(k) * k;
    let residue_map = le.mul(&frob.pow(mprime as u64));

    // Primitive element of the residue field among Hecke images.
    let residues: Vec<BitVec> = alg.hecke.values().map(|x| residue_map.apply(x)).collect();
    let min_poly_degree = |theta: &BitVec| -> (usize, Echelon) {
        let mut ech = Echelon::new(g);
        let mut pw = e.clone();
        while ech.insert(pw.clone()) {
            pw = alg.mul(&pw, theta);
        }
        (ech.rank(), ech)
    };
    let mut found: Option<(BitVec, Echelon)> = None;
    for t in &residues {
        let (deg, ech) = min_poly_degree(t);
        if deg == k {
            found = Some((t.clone(), ech));
            break;
        }
    }
    if found.is_none() {
        'pairs: for (i, a) in residues.iter().enumerate() {
            for b in &residues[i + 1..] {
                let t = a.xor(b);
                let (deg, ech) = min_poly_degree(&t);
                if deg == k {
                    found = Some((t, ech));
                    break 'pairs;
                }
            }
        }
    }
    if found.is_none() {
        let field: Vec<BitVec> = BitMatrix::from_rows(g, residues.clone()).image();
        for mask in 1u64..(1u64 << field.len().min(24)) {
            let mut t = BitVec::zeros(g);
            for (i, f) in field.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t.xor_assign(f);
                }
            }
            let (deg, ech) = min_poly_degree(&t);
            if deg == k {
                found = Some((t, ech));
                break;
            }
        }
    }
    let (theta, power_basis) = found.ok_or_else(|| {
        Error::ContractViolation("no primitive element for the residue field".into())
    })?;
    // theta^k in terms of lower powers gives the modulus
    let mut pw = e.clone();
    for _ in 0..k {
        pw = alg.mul(&pw, &theta);
    }
    let combo = power_basis
        .express(&pw)
        .ok_or_else(|| Error::ContractViolation("residue field not closed".into()))?;
    let mut coeffs: Vec<bool> = (0..k).map(|i| combo.get(i)).collect();
    coeffs.push(true);
    let residue_modulus = F2Poly::from_coeffs(&coeffs);
    if !residue_modulus.is_irreducible() {
        return Err(Error::ContractViolation("residue ring is not a field".into()));
    }

    let mut factor = LocalFactorMod2 {
        idempotent: e,
        local_dim: d,
        residue_degree: k,
        eisenstein: false,
        eigensystem: BTreeMap::new(),
        residue_modulus,
        basis,
        radical,
        residue_map,
        power_basis,
    };
    for &p in primes {
        if let Some(t) = alg.hecke(p) {
            let r = factor.residue(t);
            factor.eigensystem.insert(p, r);
        }
    }
    factor.eisenstein = k == 1
        && primes.iter().filter(|&&p| level % p != 0).all(|&p| {
            factor.eigensystem[&p].as_f2() == Some((p + 1) % 2 == 1)
        });
    Ok(factor)
}

/// Image of `T_n` in the residue field of a factor.
pub fn eigensystem_coefficient(
    decomp: &Decomposition,
    factor: &LocalFactorMod2,
    n: u64,
) -> Result<Gf2kElement> {
    let t = decomp
        .algebra
        .hecke(n)
        .ok_or_else(|| Error::InvalidInput(format!("T_{n} is outside the computed range")))?;
    Ok(factor.residue(t))
}

/// Does the factor's eigensystem agree with `a_l mod 2` at every good
/// eigensystem prime?
pub fn matches_eigensystem(level: u64, factor: &LocalFactorMod2, ap_mod2: &BTreeMap<u64, bool>) -> bool {
    factor.residue_degree == 1
        && factor
            .eigensystem
            .iter()
            .filter(|(&p, _)| level % p != 0)
            .all(|(p, v)| ap_mod2.get(p).is_some_and(|&a| v.as_f2() == Some(a)))
}

/// Residual representation type for a degree-one factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ResidualClass {
    /// Supersingular at 2: residual image attached to `Q(sqrt(disc))`.
    Supersingular {
        field_discriminant: i64,
        totally_real: bool,
    },
    /// `N = 1, 7 mod 8` admits no supersingular option.
    NoSupersingularOption,
    Ordinary,
}

pub fn classify_residual(level: u64, factor: &LocalFactorMod2) -> Result<ResidualClass> {
    if factor.eisenstein {
        return Err(Error::InvalidInput("Eisenstein factor has no residual class".into()));
    }
    if factor.residue_degree != 1 {
        return Err(Error::InvalidInput("residual class needs residue field F2".into()));
    }
    let a2 = factor
        .eigensystem
        .get(&2)
        .and_then(|x| x.as_f2())
        .ok_or_else(|| Error::InvalidInput("no T_2 image".into()))?;
    if a2 {
        return Ok(ResidualClass::Ordinary);
    }
    let n = level as i64;
    Ok(match level % 8 {
        3 => ResidualClass::Supersingular { field_discriminant: -n, totally_real: false },
        5 => ResidualClass::Supersingular { field_discriminant: n, totally_real: true },
        _ => ResidualClass::NoSupersingularOption,
    })
}

/// Two distinct nonzero mod-2 eigenform-like q-expansions killed by the
/// square of the maximal ideal, witnessing `dim T_m/2 >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalWitness {
    pub functionals: [BitVec; 2],
    /// `a_n = phi(T_n)` for `n = 1..=B`.
    pub prefixes: [Vec<bool>; 2],
}

pub fn lemma_local_witness(decomp: &Decomposition, factor: &LocalFactorMod2) -> Option<LocalWitness> {
    if factor.local_dim < 2 {
        return None;
    }
    let alg = &decomp.algebra;
    let g = alg.dim;
    // m = (1 - e) A + rad(A_e), so m^2 = (1 - e) A + rad^2.
    let one_minus_e = alg.one.xor(&factor.idempotent);
    let mut span = Echelon::new(g);
    for v in alg.mult_matrix(&one_minus_e).image() {
        span.insert(v);
    }
    let rad = factor.radical();
    for (i, x) in rad.iter().enumerate() {
        for y in &rad[i..] {
            span.insert(alg.mul(x, y));
        }
    }
    let sq = BitMatrix::from_rows(g, span.basis().to_vec());
    let annihilator = sq.transpose().left_kernel();
    if annihilator.len() < 2 {
        return None;
    }
    let phis = [annihilator[0].clone(), annihilator[1].clone()];
    let bound = decomp.sturm_bound;
    let prefix = |phi: &BitVec| -> Vec<bool> {
        (1..=bound).map(|n| alg.hecke(n).is_some_and(|t| t.dot(phi))).collect()
    };
    let prefixes = [prefix(&phis[0]), prefix(&phis[1])];
    // every element of m^2 pairs to zero with T_n f
    for phi in &phis {
        for v in span.basis() {
            for n in 1..=bound {
                if let Some(t) = alg.hecke(n) {
                    if alg.mul(t, v).dot(phi) {
                        return None;
                    }
                }
            }
        }
    }
    if prefixes[0] == prefixes[1] || prefixes.iter().any(|p| p.iter().all(|&b| !b)) {
        return None;
    }
    Some(LocalWitness { functionals: phis, prefixes })
}

/// Lattice, reduction and decomposition for a built space.
pub fn decompose_level(space: &ModularSymbolsSpace) -> Result<Decomposition> {
    let lat = hecke_lattice(space)?;
    let alg = reduce_mod2(&lat)?;
    decompose_mod2(space.level, &alg)
}

static DECOMPOSITIONS: OnceLock<Mutex<HashMap<u64, Arc<Decomposition>>>> = OnceLock::new();

/// Decomposition at level `n`, memoized per process.
pub fn decomposition_for_level(n: u64) -> Result<Arc<Decomposition>> {
    let cache = DECOMPOSITIONS.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&n) {
        return Ok(d.clone());
    }
    let space = build_space(n)?;
    let d = Arc::new(decompose_level(&space)?);
    cache.lock().unwrap().insert(n, d.clone());
    Ok(d)
}
