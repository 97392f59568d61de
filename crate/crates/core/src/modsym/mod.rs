//! Weight-2 modular symbols for Gamma0(N) via Manin symbols.
//!
//! Manin symbols `(c : d)` in P^1(Z/N) stand for `g{0, oo}` with `g` in
//! SL2(Z) of bottom row `(c, d)`. The space is the quotient by
//! `x + xS = 0` and `x + x tau + x tau^2 = 0`; elements are stored in
//! coordinates on a set of free generators (Manin symbols), as integer
//! numerators over a common denominator. Operators act on row vectors.

pub mod p1;

use crate::arith::{self, gcd, xgcd};
use crate::error::{Error, Result};
use crate::zlinalg::{self, Hnf, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use p1::P1List;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Index of Gamma0(N) in SL2(Z): `N prod (1 + 1/p)`.
pub fn psl_index(n: u64) -> u64 {
    let mut r = n;
    for p in arith::factor(n).primes() {
        r = r / p * (p + 1);
    }
    r
}

/// Generator bound `ceil(mu / 6)` for the weight-2 Hecke algebra.
pub fn sturm_bound(n: u64) -> u64 {
    psl_index(n).div_ceil(6)
}

/// Number of cusps of X0(N).
pub fn num_cusps(n: u64) -> u64 {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| {
            let g = gcd(d, n / d);
            euler_phi(g)
        })
        .sum()
}

fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for p in arith::factor(n).primes() {
        r = r / p * (p - 1);
    }
    r
}

/// Genus of X0(N) from the Riemann-Hurwitz count of elliptic points and
/// cusps.
pub fn genus_x0(n: u64) -> u64 {
    let f = arith::factor(n);
    let nu2: i64 = if n % 4 == 0 {
        0
    } else {
        f.primes().map(|p| 1 + arith::kronecker(-4, p as i64) as i64).product()
    };
    let nu3: i64 = if n % 9 == 0 {
        0
    } else {
        f.primes().map(|p| 1 + arith::kronecker(-3, p as i64) as i64).product()
    };
    let mu = psl_index(n) as i64;
    let c = num_cusps(n) as i64;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

/// A cusp `num / den` in lowest terms with `den >= 0`; infinity is `1/0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub num: i128,
    pub den: i128,
}

impl Cusp {
    pub fn new(num: i128, den: i128) -> Cusp {
        let g = num.gcd(&den);
        assert!(g != 0, "0/0 is not a cusp");
        let (mut a, mut b) = (num / g, den / g);
        if b < 0 || (b == 0 && a < 0) {
            a = -a;
            b = -b;
        }
        Cusp { num: a, den: b }
    }

    pub fn infinity() -> Cusp {
        Cusp { num: 1, den: 0 }
    }

    /// `[[a, b], [c, d]] (num / den)`.
    pub fn act(&self, m: [i128; 4]) -> Cusp {
        let [a, b, c, d] = m;
        Cusp::new(a * self.num + b * self.den, c * self.num + d * self.den)
    }
}

/// Gamma0(N)-equivalence of cusps.
pub fn cusps_equivalent(n: u64, x: Cusp, y: Cusp) -> bool {
    let s_of = |c: Cusp| -> i128 {
        match c.den {
            0 => c.num,
            1 => 0,
            q => {
                let (_, s, _) = xgcd((c.num.rem_euclid(q)) as i64, q as i64);
                s as i128
            }
        }
    };
    let (s1, s2) = (s_of(x), s_of(y));
    let m = (x.den * y.den).gcd(&(n as i128));
    (s1 * y.den - s2 * x.den).rem_euclid(m) == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankParity {
    Even,
    Odd,
}

/// Sublattice of the free-generator coordinates: rows are integer
/// numerators over `denom`, in Hermite form.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub denom: i64,
    pub rows: Vec<Vec<i64>>,
    pub pivots: Vec<usize>,
}

impl Lattice {
    fn from_hnf(h: &Hnf, denom: i64) -> Lattice {
        Lattice {
            denom,
            rows: h.rows_i64().expect("lattice basis does not fit in i64"),
            pivots: h.pivots.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coordinates of the vector `x / xden`, or `None` if it is not in
    /// the lattice.
    pub fn coords(&self, x: &[i128], xden: i64) -> Option<Vec<i64>> {
        // c * rows = x * denom / xden
        let mut y: Vec<i128> = Vec::with_capacity(x.len());
        for &v in x {
            let t = v.checked_mul(self.denom as i128)?;
            if t % xden as i128 != 0 {
                return None;
            }
            y.push(t / xden as i128);
        }
        let mut out = Vec::with_capacity(self.rows.len());
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let piv = r[p] as i128;
            if y[p] % piv != 0 {
                return None;
            }
            let c = y[p] / piv;
            if c != 0 {
                for (a, &b) in y.iter_mut().zip(r) {
                    *a = a.checked_sub(c.checked_mul(b as i128)?)?;
                }
            }
            out.push(i64::try_from(c).ok()?);
        }
        y.iter().all(|&v| v == 0).then_some(out)
    }

    /// Numerators (over `denom`) of `sum c_i row_i`.
    pub fn combine(&self, c: &[i64]) -> Vec<i128> {
        let dim = self.rows.first().map_or(0, |r| r.len());
        let mut out = vec![0i128; dim];
        for (&ci, r) in c.iter().zip(&self.rows) {
            if ci != 0 {
                for (o, &x) in out.iter_mut().zip(r) {
                    *o += ci as i128 * x as i128;
                }
            }
        }
        out
    }
}

/// Integer matrix of `T_n` (or `W_Q`) on a lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub n: u64,
    pub matrix: IntMatrix,
}

/// Primitive integral eigenvector in coordinates of the plus cuspidal
/// lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenLine {
    pub vector: Vec<BigInt>,
}

/// Which lattice an operator matrix is expressed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subspace {
    Cuspidal,
    Plus,
}

#[derive(Debug)]
pub struct ModularSymbolsSpace {
    pub level: u64,
    p1: P1List,
    /// Image of each Manin symbol: sparse numerators over `denom`.
    images: Vec<Vec<(u32, i64)>>,
    denom: i64,
    /// P^1 index of each free generator.
    free: Vec<usize>,
    cusp_reps: Vec<Cusp>,
    boundary: Vec<Vec<i64>>,
    integral: Lattice,
    cuspidal: Lattice,
    plus: Lattice,
    cache: Mutex<HashMap<(Subspace, u64), Arc<IntMatrix>>>,
}

type QRow = BTreeMap<usize, BigRational>;

fn add_to(row: &mut QRow, k: usize, c: &BigRational) {
    let e = row.entry(k).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        row.remove(&k);
    }
}

/// Heilbronn matrices `[a, b, c, d]` with `a > b >= 0`, `d > c >= 0`,
/// `ad - bc = n`.
pub fn heilbronn_merel(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=(n + 1 - a) {
            let m = a * d - n;
            if m < 0 {
                continue;
            }
            if m == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
            } else {
                for b in 1..a.min(m + 1) {
                    if m % b == 0 && m / b < d {
                        out.push([a, b, m / b, d]);
                    }
                }
            }
        }
    }
    out
}

/// Convergent denominators `q_{-2}, q_{-1}, q_0, ..., q_n` of `a / b`.
fn convergent_denominators(mut a: i128, mut b: i128) -> Vec<i128> {
    debug_assert!(b > 0);
    let mut qs = vec![1i128, 0i128];
    while b != 0 {
        let t = a.div_euclid(b);
        let k = qs.len();
        qs.push(t * qs[k - 1] + qs[k - 2]);
        (a, b) = (b, a - t * b);
    }
    qs
}

/// Largest level accepted by [`build_space`].
pub const MAX_LEVEL: u64 = 5000;

impl ModularSymbolsSpace {
    pub fn new(level: u64) -> Result<ModularSymbolsSpace> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::InvalidInput(format!("level {level} out of range")));
        }
        let p1 = P1List::new(level);
        let m = p1.len();

        // x + xS = 0: each symbol becomes +-(orbit representative) or 0.
        let mut sym2: Vec<Option<(usize, i64)>> = vec![None; m];
        let mut vars: Vec<usize> = Vec::new();
        let mut var_of = vec![usize::MAX; m];
        for i in 0..m {
            let j = p1.apply_s(i);
            if i == j {
                continue;
            }
            if i < j {
                var_of[i] = vars.len();
                vars.push(i);
            }
        }
        for i in 0..m {
            let j = p1.apply_s(i);
            if i == j {
                continue;
            }
            sym2[i] = Some(if i < j { (var_of[i], 1) } else { (var_of[j], -1) });
        }

        // x + x tau + x tau^2 = 0 over each tau-orbit.
        let mut relations: Vec<BTreeMap<usize, i64>> = Vec::new();
        let mut seen = vec![false; m];
        for i in 0..m {
            if seen[i] {
                continue;
            }
            let j = p1.apply_tau(i);
            let k = p1.apply_tau(j);
            let orbit: Vec<usize> = if i == j { vec![i, i, i] } else { vec![i, j, k] };
            let mut rel = BTreeMap::new();
            for &x in &orbit {
                seen[x] = true;
                if let Some((v, s)) = sym2[x] {
                    *rel.entry(v).or_insert(0) += s;
                }
            }
            rel.retain(|_, c| *c != 0);
            if !rel.is_empty() {
                relations.push(rel);
            }
        }

        // Eliminate, pivoting on the largest variable in each relation.
        let nv = vars.len();
        let mut expr: Vec<Option<QRow>> = vec![None; nv];
        let mut occ: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for rel in relations {
            let mut r = QRow::new();
            for (&v, &c) in &rel {
                let c = BigRational::from_integer(BigInt::from(c));
                match &expr[v] {
                    Some(e) => {
                        for (&w, d) in e {
                            add_to(&mut r, w, &(&c * d));
                        }
                    }
                    None => add_to(&mut r, v, &c),
                }
            }
            let Some((&p, cp)) = r.iter().next_back() else { continue };
            let cp = cp.clone();
            let mut ep = QRow::new();
            for (&w, c) in &r {
                if w != p {
                    ep.insert(w, -(c / &cp));
                }
            }
            for q in std::mem::take(&mut occ[p]) {
                let Some(eq) = expr[q].as_mut() else { continue };
                let Some(coef) = eq.remove(&p) else { continue };
                for (&w, d) in &ep {
                    add_to(eq, w, &(&coef * d));
                    occ[w].push(q);
                }
            }
            for &w in ep.keys() {
                occ[w].push(p);
            }
            expr[p] = Some(ep);
        }

        let free_vars: Vec<usize> = (0..nv).filter(|&v| expr[v].is_none()).collect();
        let mut free_index = vec![usize::MAX; nv];
        for (k, &v) in free_vars.iter().enumerate() {
            free_index[v] = k;
        }
        let free: Vec<usize> = free_vars.iter().map(|&v| vars[v]).collect();

        // Rational image of every Manin symbol.
        let mut qimages: Vec<Vec<(u32, BigRational)>> = Vec::with_capacity(m);
        let mut denom = BigInt::one();
        for i in 0..m {
            let mut img: Vec<(u32, BigRational)> = Vec::new();
            if let Some((v, s)) = sym2[i] {
                let s = BigRational::from_integer(BigInt::from(s));
                match &expr[v] {
                    None => img.push((free_index[v] as u32, s)),
                    Some(e) => {
                        for (&w, c) in e {
                            img.push((free_index[w] as u32, c * &s));
                        }
                    }
                }
            }
            for (_, c) in &img {
                denom = denom.lcm(c.denom());
            }
            qimages.push(img);
        }
        let denom_i = denom.to_i64().expect("denominator overflow");
        let images: Vec<Vec<(u32, i64)>> = qimages
            .into_iter()
            .map(|img| {
                img.into_iter()
                    .map(|(k, c)| {
                        let v = (c * BigRational::from_integer(denom.clone())).to_integer();
                        (k, v.to_i64().expect("coefficient overflow"))
                    })
                    .collect()
            })
            .collect();
        let dim = free.len();

        // Integral lattice spanned by all Manin symbols.
        let mut gens: Vec<Vec<BigInt>> = (0..dim)
            .map(|k| {
                let mut v = vec![BigInt::zero(); dim];
                v[k] = BigInt::from(denom_i);
                v
            })
            .collect();
        for img in &images {
            if img.iter().any(|&(_, c)| c % denom_i != 0) {
                let mut v = vec![BigInt::zero(); dim];
                for &(k, c) in img {
                    v[k as usize] = BigInt::from(c.rem_euclid(denom_i));
                }
                gens.push(v);
            }
        }
        let integral_hnf = Hnf::of_big(dim, &gens);
        let integral = Lattice::from_hnf(&integral_hnf, denom_i);

        let mut space = ModularSymbolsSpace {
            level,
            p1,
            images,
            denom: denom_i,
            free,
            cusp_reps: Vec::new(),
            boundary: Vec::new(),
            integral,
            cuspidal: Lattice { denom: denom_i, rows: Vec::new(), pivots: Vec::new() },
            plus: Lattice { denom: denom_i, rows: Vec::new(), pivots: Vec::new() },
            cache: Mutex::new(HashMap::new()),
        };
        space.compute_boundary();
        space.compute_cuspidal()?;
        space.compute_plus()?;
        Ok(space)
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn num_cusp_classes(&self) -> usize {
        self.cusp_reps.len()
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn free_generators(&self) -> Vec<(u64, u64)> {
        self.free.iter().map(|&i| self.p1.get(i)).collect()
    }

    /// Lattice spanned by all Manin symbols.
    pub fn integral_lattice(&self) -> &Lattice {
        &self.integral
    }

    pub fn cuspidal_lattice(&self) -> &Lattice {
        &self.cuspidal
    }

    pub fn plus_lattice(&self) -> &Lattice {
        &self.plus
    }

    pub fn lattice(&self, s: Subspace) -> &Lattice {
        match s {
            Subspace::Cuspidal => &self.cuspidal,
            Subspace::Plus => &self.plus,
        }
    }

    pub fn cuspidal_dimension(&self) -> usize {
        self.cuspidal.rank()
    }

    /// Genus of X0(N) as seen by the plus quotient of the cuspidal space.
    pub fn genus(&self) -> usize {
        self.plus.rank()
    }

    /// Image of the Manin symbol with P^1 index `i` (numerators over `denom`).
    pub fn symbol_image(&self, i: usize) -> &[(u32, i64)] {
        &self.images[i]
    }

    /// Image of the Manin symbol `(c : d)` (numerators over `denom`), or
    /// the zero vector if `(c : d)` is not in P^1(Z/N).
    pub fn manin_symbol(&self, c: i64, d: i64) -> Vec<(u32, i64)> {
        self.p1.index(c, d).map_or_else(Vec::new, |i| self.images[i].clone())
    }

    /// Matrix in SL2(Z) with bottom row congruent to the symbol's.
    fn lift_to_sl2z(&self, i: usize) -> [i128; 4] {
        let n = self.level as i128;
        let (c, d) = self.p1.get(i);
        if self.level == 1 {
            return [1, 0, 0, 1];
        }
        let c = if c == 0 { n } else { c as i128 };
        let mut d = d as i128;
        while c.gcd(&d) != 1 {
            d += n;
        }
        let (g, s, t) = xgcd_i128(d, c);
        debug_assert_eq!(g, 1);
        // s d + t c = 1  =>  [[s, -t], [c, d]] has determinant 1
        [s, -t, c, d]
    }

    fn cusp_class(&mut self, x: Cusp) -> usize {
        let n = self.level;
        if let Some(k) = self.cusp_reps.iter().position(|&r| cusps_equivalent(n, r, x)) {
            return k;
        }
        self.cusp_reps.push(x);
        self.cusp_reps.len() - 1
    }

    fn compute_boundary(&mut self) {
        let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
        for k in 0..self.free.len() {
            let [a, b, c, d] = self.lift_to_sl2z(self.free[k]);
            let end = self.cusp_class(Cusp::new(a, c));
            let start = self.cusp_class(Cusp::new(b, d));
            rows.push(vec![(end, 1), (start, -1)]);
        }
        let nc = self.cusp_reps.len();
        self.boundary = rows
            .into_iter()
            .map(|r| {
                let mut v = vec![0i64; nc];
                for (k, c) in r {
                    v[k] += c;
                }
                v
            })
            .collect();
    }

    fn compute_cuspidal(&mut self) -> Result<()> {
        let nc = self.cusp_reps.len();
        let den = self.denom as i128;
        let mut bmat: Vec<Vec<i64>> = Vec::new();
        for row in &self.integral.rows {
            let mut v = vec![0i128; nc];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    for (j, &b) in self.boundary[k].iter().enumerate() {
                        v[j] += x as i128 * b as i128;
                    }
                }
            }
            let mut out = Vec::with_capacity(nc);
            for x in v {
                if x % den != 0 {
                    return Err(Error::ContractViolation("non-integral boundary".into()));
                }
                out.push((x / den) as i64);
            }
            bmat.push(out);
        }
        let ker = zlinalg::left_kernel_i64(&bmat, nc);
        self.cuspidal = self.sublattice_from_coords(&self.integral, &ker);
        Ok(())
    }

    /// Lattice spanned by `sum_i c_i row_i(base)` for each coefficient vector.
    fn sublattice_from_coords(&self, base: &Lattice, coeffs: &[Vec<BigInt>]) -> Lattice {
        let dim = self.free.len();
        let vecs: Vec<Vec<BigInt>> = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); dim];
                for (ci, r) in c.iter().zip(&base.rows) {
                    if !ci.is_zero() {
                        for (o, &x) in v.iter_mut().zip(r) {
                            *o += ci * x;
                        }
                    }
                }
                v
            })
            .collect();
        Lattice::from_hnf(&Hnf::of_big(dim, &vecs), base.denom)
    }

    fn compute_plus(&mut self) -> Result<()> {
        let star = self.operator_on(&self.cuspidal, |s, i, acc| {
            let j = s.p1.apply_star(i);
            for &(k, c) in &s.images[j] {
                acc[k as usize] += c as i128;
            }
        })?;
        let m = star.sub_scalar(1);
        let ker = zlinalg::left_kernel_i64(&m.to_rows(), m.cols);
        self.plus = self.sublattice_from_coords(&self.cuspidal, &ker);
        Ok(())
    }

    /// Matrix of the operator on `lat`, where `act(space, i, acc)` adds the
    /// image of the Manin symbol with P^1 index `i` (numerators over
    /// `denom`) into `acc`.
    fn operator_on(
        &self,
        lat: &Lattice,
        act: impl Fn(&Self, usize, &mut [i128]) + Sync,
    ) -> Result<IntMatrix> {
        let dim = self.free.len();
        let r = lat.rank();
        // support of the lattice basis
        let mut needed = vec![false; dim];
        for row in &lat.rows {
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    needed[k] = true;
                }
            }
        }
        let mut gen_images: Vec<Option<Vec<i128>>> = vec![None; dim];
        for k in 0..dim {
            if needed[k] {
                let mut acc = vec![0i128; dim];
                act(self, self.free[k], &mut acc);
                gen_images[k] = Some(acc);
            }
        }
        let mut out = IntMatrix::zeros(r, r);
        for (i, row) in lat.rows.iter().enumerate() {
            let mut v = vec![0i128; dim];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    let img = gen_images[k].as_ref().unwrap();
                    for (o, &y) in v.iter_mut().zip(img) {
                        *o += x as i128 * y;
                    }
                }
            }
            // v is over denom^2
            let c = lat.coords(&v, self.denom * lat.denom).ok_or_else(|| {
                Error::ContractViolation("operator does not preserve the lattice".into())
            })?;
            out.row_mut(i).copy_from_slice(&c);
        }
        Ok(out)
    }

    /// Add the image of the modular symbol `{0, x}` into `acc`.
    fn add_zero_to(&self, x: Cusp, sign: i128, acc: &mut [i128]) {
        let mut add_sym = |c: i128, d: i128| {
            let n = self.level as i128;
            if let Some(i) = self.p1.index(c.rem_euclid(n) as i64, d.rem_euclid(n) as i64) {
                for &(k, v) in &self.images[i] {
                    acc[k as usize] += sign * v as i128;
                }
            }
        };
        if x.den == 0 {
            add_sym(0, 1);
            return;
        }
        let qs = convergent_denominators(x.num, x.den);
        // {0, x} = sum_{k >= -1} ((-1)^(k-1) q_k : q_(k-1))
        for idx in 1..qs.len() {
            let k = idx as i64 - 2;
            let s = if k.rem_euclid(2) == 1 { 1 } else { -1 };
            add_sym(s * qs[idx], qs[idx - 1]);
        }
    }

    /// Add the image of `{x, y}` into `acc`.
    pub fn add_path(&self, x: Cusp, y: Cusp, acc: &mut [i128]) {
        self.add_zero_to(y, 1, acc);
        self.add_zero_to(x, -1, acc);
    }

    /// Add `sum_g {g(b/d), g(a/c)}` for the Manin symbol `i`.
    fn act_by_matrices(&self, i: usize, mats: &[[i128; 4]], acc: &mut [i128]) {
        let [a, b, c, d] = self.lift_to_sl2z(i);
        let start = Cusp::new(b, d);
        let end = Cusp::new(a, c);
        for &m in mats {
            self.add_path(start.act(m), end.act(m), acc);
        }
    }

    fn hecke_heilbronn_action(&self, n: u64) -> impl Fn(&Self, usize, &mut [i128]) + Sync {
        let hs = heilbronn_merel(n);
        move |s: &Self, i: usize, acc: &mut [i128]| {
            let (u, v) = s.p1.get(i);
            let (u, v) = (u as i64, v as i64);
            let mut hits: Vec<(usize, i128)> = Vec::with_capacity(hs.len());
            for h in &hs {
                if let Some(j) = s.p1.index(u * h[0] + v * h[2], u * h[1] + v * h[3]) {
                    hits.push((j, 1));
                }
            }
            hits.sort_unstable();
            hits.dedup_by(|b, a| {
                let same = a.0 == b.0;
                if same {
                    a.1 += b.1;
                }
                same
            });
            for (j, m) in hits {
                for &(k, c) in &s.images[j] {
                    acc[k as usize] += m * c as i128;
                }
            }
        }
    }

    /// Coset representatives of the `T_p` / `U_p` double coset.
    fn hecke_cosets(&self, p: u64) -> Vec<[i128; 4]> {
        let p = p as i128;
        let mut m: Vec<[i128; 4]> = (0..p).map(|j| [1, j, 0, p]).collect();
        if self.level as i128 % p != 0 {
            m.push([p, 0, 0, 1]);
        }
        m
    }

    fn matrix_cached(
        &self,
        key: (Subspace, u64),
        f: impl FnOnce() -> Result<IntMatrix>,
    ) -> Result<Arc<IntMatrix>> {
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(f()?);
        self.cache.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// `T_n` via Merel's Heilbronn matrices, for any `n >= 1`.
    pub fn hecke_heilbronn(&self, sub: Subspace, n: u64) -> Result<IntMatrix> {
        self.operator_on(self.lattice(sub), self.hecke_heilbronn_action(n))
    }

    /// `T_p` (or `U_p` for `p | N`) via the coset decomposition acting on
    /// paths between cusps.
    pub fn hecke_by_cosets(&self, sub: Subspace, p: u64) -> Result<IntMatrix> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mats = self.hecke_cosets(p);
        self.operator_on(self.lattice(sub), |s, i, acc| s.act_by_matrices(i, &mats, acc))
    }

    /// `T_p` for a prime `p`: Heilbronn matrices when `p` does not divide
    /// the level, the coset sum otherwise.
    pub fn hecke_prime(&self, sub: Subspace, p: u64) -> Result<Arc<IntMatrix>> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        self.matrix_cached((sub, p), || {
            if self.level % p == 0 {
                self.hecke_by_cosets(sub, p)
            } else {
                self.hecke_heilbronn(sub, p)
            }
        })
    }

    /// `T_n` built multiplicatively from prime operators.
    pub fn hecke(&self, sub: Subspace, n: u64) -> Result<IntMatrix> {
        if n == 0 {
            return Err(Error::InvalidInput("T_0 is undefined".into()));
        }
        let r = self.lattice(sub).rank();
        let mut acc = IntMatrix::identity(r);
        for (p, k) in arith::factor(n).factors {
            let tp = self.hecke_prime(sub, p)?;
            let bad = self.level % p == 0;
            let (mut prev, mut cur) = (IntMatrix::identity(r), (*tp).clone());
            for _ in 1..k {
                let next = if bad {
                    cur.mul(&tp)
                } else {
                    cur.mul(&tp).sub(&IntMatrix::scalar(r, p as i64).mul(&prev))
                };
                prev = cur;
                cur = next;
            }
            acc = acc.mul(&cur);
        }
        Ok(acc)
    }

    /// Atkin-Lehner involution `W_Q` for an exact divisor `Q` of `N`.
    pub fn atkin_lehner(&self, sub: Subspace, q: u64) -> Result<IntMatrix> {
        let n = self.level;
        if q == 0 || n % q != 0 || gcd(q, n / q) != 1 {
            return Err(Error::InvalidInput(format!("{q} is not an exact divisor of {n}")));
        }
        let (_, x, y) = xgcd(q as i64, (n / q) as i64);
        // Q x - (N/Q)(-y) = 1
        let w = [q as i128 * x as i128, -(y as i128), n as i128, q as i128];
        self.operator_on(self.lattice(sub), |s, i, acc| s.act_by_matrices(i, &[w], acc))
    }

    /// Star involution on the cuspidal lattice.
    pub fn star(&self) -> Result<IntMatrix> {
        self.operator_on(&self.cuspidal, |s, i, acc| {
            let j = s.p1.apply_star(i);
            for &(k, c) in &s.images[j] {
                acc[k as usize] += c as i128;
            }
        })
    }
}

fn xgcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
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

/// Build the space of weight-2 modular symbols for Gamma0(N).
pub fn build_space(level: u64) -> Result<ModularSymbolsSpace> {
    ModularSymbolsSpace::new(level)
}

/// `T_n` on the integral cuspidal lattice.
pub fn hecke_matrix(space: &ModularSymbolsSpace, n: u64) -> Result<HeckeMatrix> {
    Ok(HeckeMatrix { n, matrix: space.hecke(Subspace::Cuspidal, n)? })
}

/// `W_Q` on the integral cuspidal lattice.
pub fn atkin_lehner_matrix(space: &ModularSymbolsSpace, q: u64) -> Result<HeckeMatrix> {
    Ok(HeckeMatrix { n: q, matrix: space.atkin_lehner(Subspace::Cuspidal, q)? })
}

/// Common kernel of `T_l - a_l` on the plus cuspidal lattice for the good
/// primes `l` up to the generator bound. The equations are kept in an
/// integer echelon form with content removed, so entries stay small.
pub fn locate_eigenform(
    space: &ModularSymbolsSpace,
    ap: &BTreeMap<u64, i64>,
) -> Result<EigenLine> {
    let n = space.level;
    let g = space.genus();
    if g == 0 {
        return Err(Error::NoEigenform);
    }
    let bound = sturm_bound(n).max(3);
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for p in arith::primes_up_to(bound) {
        if n % p != 0 {
            let Some(&a) = ap.get(&p) else {
                return Err(Error::InvalidInput(format!("missing a_{p}")));
            };
            let t = space.hecke_prime(Subspace::Plus, p)?.sub_scalar(a);
            // v (T - a) = 0: one equation per column
            for j in 0..g {
                let row: Vec<BigInt> = (0..g).map(|i| BigInt::from(t.get(i, j))).collect();
                if let Some(r) = reduce_against(&echelon, row) {
                    echelon.push(r);
                }
            }
        }
        if echelon.len() + 1 >= g {
            break;
        }
    }
    match g - echelon.len() {
        0 => Err(Error::NoEigenform),
        1 => Ok(EigenLine { vector: kernel_vector(&echelon, g) }),
        d => Err(Error::AmbiguousEigenform(d)),
    }
}

fn reduce_against(echelon: &[(usize, Vec<BigInt>)], mut r: Vec<BigInt>) -> Option<(usize, Vec<BigInt>)> {
    for (pc, pr) in echelon {
        if r[*pc].is_zero() {
            continue;
        }
        let (a, b) = (pr[*pc].clone(), r[*pc].clone());
        for (x, y) in r.iter_mut().zip(pr) {
            *x = &a * &*x - &b * y;
        }
        let c = r.iter().fold(BigInt::zero(), |c, x| c.gcd(x));
        if !c.is_zero() && !c.is_one() {
            r.iter_mut().for_each(|x| *x /= &c);
        }
    }
    let pc = r.iter().position(|x| !x.is_zero())?;
    Some((pc, r))
}

/// The primitive solution of an echelon system of corank one. Each row
/// vanishes at the pivots of the rows before it, so solving in reverse
/// order only meets known values.
fn kernel_vector(echelon: &[(usize, Vec<BigInt>)], g: usize) -> Vec<BigInt> {
    let mut is_pivot = vec![false; g];
    for (pc, _) in echelon {
        is_pivot[*pc] = true;
    }
    let free = is_pivot.iter().position(|&b| !b).expect("corank one");
    let mut x: Vec<BigRational> = vec![BigRational::zero(); g];
    x[free] = BigRational::one();
    for (pc, r) in echelon.iter().rev() {
        let s = r
            .iter()
            .enumerate()
            .filter(|(j, _)| j != pc)
            .fold(BigRational::zero(), |s, (j, c)| s + &x[j] * BigRational::from(c.clone()));
        x[*pc] = -s / BigRational::from(r[*pc].clone());
    }
    let den = x.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let v: Vec<BigInt> = x.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    zlinalg::primitive(&v)
}

/// Parity of the analytic rank from the `W_N` eigenvalue on the eigenline:
/// `+1` means odd, `-1` means even.
pub fn analytic_rank_parity(space: &ModularSymbolsSpace, line: &EigenLine) -> Result<RankParity> {
    let w = space.atkin_lehner(Subspace::Plus, space.level)?;
    let g = w.rows;
    let v = &line.vector;
    let image: Vec<BigInt> = (0..g)
        .map(|j| {
            v.iter().enumerate().fold(BigInt::zero(), |s, (i, x)| s + x * BigInt::from(w.get(i, j)))
        })
        .collect();
    if image == *v {
        Ok(RankParity::Odd)
    } else if image.iter().zip(v).all(|(a, b)| *a == -b) {
        Ok(RankParity::Even)
    } else {
        Err(Error::ContractViolation("eigenline is not W_N-stable".into()))
    }
}

/// Eigenvalue of `T` on an eigenline.
pub fn eigenvalue(t: &IntMatrix, line: &EigenLine) -> Option<BigInt> {
    let v = &line.vector;
    let k = v.iter().position(|x| !x.is_zero())?;
    let image: Vec<BigInt> = (0..t.cols)
        .map(|j| {
            v.iter().enumerate().fold(BigInt::zero(), |s, (i, x)| s + x * BigInt::from(t.get(i, j)))
        })
        .collect();
    let (lam, r) = image[k].div_rem(&v[k]);
    if !r.is_zero() {
        return None;
    }
    image.iter().zip(v).all(|(a, b)| *a == &lam * b).then_some(lam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_small_levels() {
        assert_eq!(build_space(1).unwrap().cuspidal_dimension(), 0);
        assert_eq!(build_space(11).unwrap().cuspidal_dimension(), 2);
        assert_eq!(build_space(37).unwrap().cuspidal_dimension(), 4);
        assert_eq!(build_space(11).unwrap().dimension(), 3);
    }

    #[test]
    fn level_11_eigenvalues() {
        let s = build_space(11).unwrap();
        assert_eq!(hecke_matrix(&s, 2).unwrap().matrix, IntMatrix::scalar(2, -2));
        assert_eq!(hecke_matrix(&s, 3).unwrap().matrix, IntMatrix::scalar(2, -1));
        assert_eq!(hecke_matrix(&s, 5).unwrap().matrix, IntMatrix::scalar(2, 1));
        assert_eq!(hecke_matrix(&s, 11).unwrap().matrix, IntMatrix::scalar(2, 1));
    }

    #[test]
    fn genus_formula_values() {
        assert_eq!(genus_x0(11), 1);
        assert_eq!(genus_x0(37), 2);
        assert_eq!(genus_x0(23), 2);
        assert_eq!(genus_x0(1), 0);
        assert_eq!(genus_x0(389), 32);
    }

    #[test]
    fn heilbronn_counts() {
        assert_eq!(heilbronn_merel(2).len(), 4);
        for n in 1..30u64 {
            for h in heilbronn_merel(n) {
                assert_eq!(h[0] * h[3] - h[1] * h[2], n as i64);
            }
        }
    }
}
