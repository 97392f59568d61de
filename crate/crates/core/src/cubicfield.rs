//! Cubic fields `K = Q[X]/(f)` cut out by the 2-division polynomial of an
//! elliptic curve: maximal order, class number and units at desk scale.

use crate::arith;
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::zlinalg::Hnf;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Element of `O_K` in coordinates on the integral basis.
pub type Elt = [BigInt; 3];

/// Largest `|d_K|` accepted by [`class_number_naive`].
pub const CLASS_NUMBER_DISC_LIMIT: u64 = 1_000_000;

/// Default coefficient-height cap for [`fundamental_unit`].
pub const DEFAULT_UNIT_HEIGHT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn real(re: f64) -> Self {
        C64 { re, im: 0.0 }
    }
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
    fn scale(self, s: f64) -> C64 {
        C64 { re: self.re * s, im: self.im * s }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone)]
pub struct CubicField {
    /// `[c2, c1, c0]` for the monic cubic `X^3 + c2 X^2 + c1 X + c0`.
    pub cubic: [BigInt; 3],
    pub poly_disc: BigInt,
    pub field_disc: BigInt,
    /// `(real embeddings, complex pairs)`.
    pub signature: (u8, u8),
    /// `[O_K : Z[theta]]`.
    pub index: BigInt,
    /// LLL-reduced integral basis: row `i` holds the power-basis
    /// numerators of `w_i`.
    pub basis: [[BigInt; 3]; 3],
    pub basis_denom: BigInt,
    table: [[Elt; 3]; 3],
    /// `w_i` evaluated at the roots; for signature (1,1) root 0 is real
    /// and root 1 has positive imaginary part.
    omega_at_roots: [[C64; 3]; 3],
}

fn zero3() -> Elt {
    [BigInt::zero(), BigInt::zero(), BigInt::zero()]
}

fn unit3(i: usize) -> Elt {
    let mut e = zero3();
    e[i] = BigInt::one();
    e
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

type RMat = [[BigRational; 3]; 3];

fn rmat_inverse(m: &RMat) -> Option<RMat> {
    let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    if det.is_zero() {
        return None;
    }
    let c = |a: usize, b: usize, x: usize, y: usize| &m[a][b] * &m[x][y] - &m[a][y] * &m[x][b];
    let adj = [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ];
    Some(adj.map(|row| row.map(|x| x / &det)))
}

fn rvec_mat(v: &[BigRational; 3], m: &RMat) -> [BigRational; 3] {
    std::array::from_fn(|j| (0..3).fold(BigRational::zero(), |s, i| s + &v[i] * &m[i][j]))
}

/// Determinant of a 3x3 integer matrix.
fn det3(m: &[Elt; 3]) -> BigInt {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn adj3(m: &[Elt; 3]) -> [Elt; 3] {
    let c = |a: usize, b: usize, x: usize, y: usize| &m[a][b] * &m[x][y] - &m[a][y] * &m[x][b];
    [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ]
}

fn vec_mat(v: &Elt, m: &[Elt; 3]) -> Elt {
    std::array::from_fn(|j| (0..3).fold(BigInt::zero(), |s, i| s + &v[i] * &m[i][j]))
}

/// Multiply power-basis vectors modulo the cubic.
fn poly_mul(a: &[BigRational; 3], b: &[BigRational; 3], cubic: &[BigInt; 3]) -> [BigRational; 3] {
    let mut r: Vec<BigRational> = vec![BigRational::zero(); 5];
    for i in 0..3 {
        for j in 0..3 {
            r[i + j] += &a[i] * &b[j];
        }
    }
    // X^3 = -c2 X^2 - c1 X - c0
    for k in (3..5).rev() {
        let t = std::mem::replace(&mut r[k], BigRational::zero());
        r[k - 1] -= &t * rat(&cubic[0]);
        r[k - 2] -= &t * rat(&cubic[1]);
        r[k - 3] -= &t * rat(&cubic[2]);
    }
    [r[0].clone(), r[1].clone(), r[2].clone()]
}

// ---------------------------------------------------------------------------
// small linear algebra over F_p

fn fp_left_kernel(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<u64> = r.iter().map(|x| x % p).collect();
            row.extend((0..n).map(|j| (i == j) as u64));
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..m {
        let Some(piv) = (rank..n).find(|&i| a[i][col] != 0) else { continue };
        a.swap(rank, piv);
        let inv = arith::pow_mod(a[rank][col], p - 2, p);
        for x in a[rank].iter_mut() {
            *x = arith::mul_mod(*x, inv, p);
        }
        for i in 0..n {
            if i != rank && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..m + n {
                    let t = arith::mul_mod(f, a[rank][j], p);
                    a[i][j] = (a[i][j] + p - t) % p;
                }
            }
        }
        rank += 1;
    }
    a[rank..].iter().map(|r| r[m..].to_vec()).collect()
}

fn fp_span_basis(vs: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in vs {
        let mut v: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (b, &c) in basis.iter().zip(&pivots) {
            if v[c] != 0 {
                let f = v[c];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + p - arith::mul_mod(f, *y, p)) % p;
                }
            }
        }
        if let Some(c) = v.iter().position(|&x| x != 0) {
            let inv = arith::pow_mod(v[c], p - 2, p);
            v.iter_mut().for_each(|x| *x = arith::mul_mod(*x, inv, p));
            for b in basis.iter_mut() {
                if b[c] != 0 {
                    let f = b[c];
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x = (*x + p - arith::mul_mod(f, *y, p)) % p;
                    }
                }
            }
            basis.push(v);
            pivots.push(c);
        }
    }
    basis
}

fn mod_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Z-basis (three rows) of the lattice generated by `vs` and `p Z^3`.
fn lattice_with_p(vs: &[Vec<u64>], p: u64) -> [Elt; 3] {
    let mut gens: Vec<Vec<BigInt>> = vs.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..3 {
        gens.push((0..3).map(|j| BigInt::from(if i == j { p } else { 0 })).collect());
    }
    hnf3(&gens)
}

fn hnf3(gens: &[Vec<BigInt>]) -> [Elt; 3] {
    let h = Hnf::of_big(3, gens);
    assert_eq!(h.rows.len(), 3, "lattice is not of full rank");
    std::array::from_fn(|i| std::array::from_fn(|j| h.rows[i][j].clone()))
}

/// Multiplication table of a commutative F_p-algebra of dimension 3.
struct FpAlgebra {
    p: u64,
    table: [[[u64; 3]; 3]; 3],
}

impl FpAlgebra {
    fn mul(&self, x: &[u64; 3], y: &[u64; 3]) -> [u64; 3] {
        let p = self.p;
        let mut out = [0u64; 3];
        for i in 0..3 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..3 {
                if y[j] == 0 {
                    continue;
                }
                let c = arith::mul_mod(x[i], y[j], p);
                for k in 0..3 {
                    out[k] = (out[k] + arith::mul_mod(c, self.table[i][j][k], p)) % p;
                }
            }
        }
        out
    }

    fn pow(&self, x: &[u64; 3], mut e: u128, one: &[u64; 3]) -> [u64; 3] {
        let mut base = *x;
        let mut acc = *one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn sub_scaled(&self, x: &[u64; 3], c: u64, y: &[u64; 3]) -> [u64; 3] {
        std::array::from_fn(|k| (x[k] + self.p - arith::mul_mod(c, y[k], self.p)) % self.p)
    }
}

// ---------------------------------------------------------------------------
// maximal order

/// Order `Z<w_i>` with `w_i = (sum_j m_ij theta^j) / d`.
#[derive(Clone)]
struct Order {
    m: [Elt; 3],
    d: BigInt,
}

impl Order {
    fn rmat(&self) -> RMat {
        std::array::from_fn(|i| std::array::from_fn(|j| BigRational::new(self.m[i][j].clone(), self.d.clone())))
    }

    fn table(&self, cubic: &[BigInt; 3]) -> Result<[[Elt; 3]; 3]> {
        let b = self.rmat();
        let inv = rmat_inverse(&b).expect("order basis is nonsingular");
        let mut t: [[Elt; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                let prod = poly_mul(&b[i], &b[j], cubic);
                let c = rvec_mat(&prod, &inv);
                for k in 0..3 {
                    if !c[k].is_integer() {
                        return Err(Error::ContractViolation("order is not closed under products".into()));
                    }
                    t[i][j][k] = c[k].to_integer();
                }
            }
        }
        Ok(t)
    }
}

fn table_mod(t: &[[Elt; 3]; 3], p: u64) -> FpAlgebra {
    FpAlgebra { p, table: std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| mod_u64(&t[i][j][k], p)))) }
}

fn one_mod(p: u64, t: &FpAlgebra, unit_coords: &Elt) -> [u64; 3] {
    let _ = t;
    std::array::from_fn(|k| mod_u64(&unit_coords[k], p))
}

/// Coordinates of 1 in an order basis.
fn one_coords(order: &Order) -> Elt {
    let inv = rmat_inverse(&order.rmat()).unwrap();
    let one = [BigRational::one(), BigRational::zero(), BigRational::zero()];
    rvec_mat(&one, &inv).map(|x| x.to_integer())
}

/// One enlargement step at `p`; `None` when the order is p-maximal.
fn round2_step(order: &Order, cubic: &[BigInt; 3], p: u64) -> Result<Option<Order>> {
    let t = order.table(cubic)?;
    let alg = table_mod(&t, p);
    let one = one_mod(p, &alg, &one_coords(order));
    // p-radical: kernel of x -> x^(p^j) with p^j >= 3
    let q: u128 = if p == 2 { 4 } else { p as u128 };
    let frob: Vec<Vec<u64>> = (0..3)
        .map(|i| {
            let e: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
            alg.pow(&e, q, &one).to_vec()
        })
        .collect();
    let rad = fp_left_kernel(&frob, p);
    let ip = lattice_with_p(&rad, p);
    let ip_r: RMat = ip.clone().map(|r| r.map(|x| rat(&x)));
    let ip_inv = rmat_inverse(&ip_r).unwrap();
    // y -> (b_k -> y b_k mod p I_p)
    let mut rows = Vec::with_capacity(3);
    for i in 0..3 {
        let mut row = Vec::with_capacity(9);
        for b in &ip {
            let prod: Elt = std::array::from_fn(|k| (0..3).fold(BigInt::zero(), |s, j| s + &b[j] * &t[i][j][k]));
            let z = rvec_mat(&prod.map(|x| rat(&x)), &ip_inv);
            for c in z {
                if !c.is_integer() {
                    return Err(Error::ContractViolation("p-radical is not an ideal".into()));
                }
                row.push(mod_u64(&c.to_integer(), p));
            }
        }
        rows.push(row);
    }
    let ker = fp_left_kernel(&rows, p);
    if ker.is_empty() {
        return Ok(None);
    }
    let r = lattice_with_p(&ker, p);
    // new basis (sum_i r_ki w_i) / p
    let mut m: [Elt; 3] = Default::default();
    for k in 0..3 {
        m[k] = vec_mat(&r[k], &order.m);
    }
    let mut d = &order.d * BigInt::from(p);
    let g = m.iter().flatten().fold(d.clone(), |g, x| g.gcd(x));
    if !g.is_one() {
        m = m.map(|row| row.map(|x| x / &g));
        d /= &g;
    }
    let h = hnf3(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    Ok(Some(Order { m: h, d }))
}

fn primes_with_square_factor(n: &BigInt) -> Result<Vec<u64>> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < 100_000 {
        let bp = BigInt::from(p);
        let mut e = 0;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            e += 1;
        }
        if e >= 2 {
            out.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let r = rest.to_u64().ok_or_else(|| {
            Error::InvalidInput("polynomial discriminant too large to factor".into())
        })?;
        for (q, e) in arith::factor(r).factors {
            if e >= 2 {
                out.push(q);
            }
        }
    }
    Ok(out)
}

fn cubic_roots(c: &[BigInt; 3], negative_disc: bool) -> [C64; 3] {
    let [c2, c1, c0] = c.clone().map(|x| x.to_f64().unwrap());
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let bound = 1.0 + c2.abs().max(c1.abs()).max(c0.abs());
    let mut lo = -bound;
    let mut hi = bound;
    if negative_disc {
        // the only real root
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
        }
        let r = newton(0.5 * (lo + hi), c2, c1, c0);
        let p = c2 + r;
        let q = c1 + r * p;
        let disc = p * p - 4.0 * q;
        let re = -p / 2.0;
        let im = (-disc).max(0.0).sqrt() / 2.0;
        [C64::real(r), C64 { re, im }, C64 { re, im: -im }]
    } else {
        // three real roots: isolate using the critical points
        let a = 3.0;
        let (b, cc) = (2.0 * c2, c1);
        let dsc = (b * b - 4.0 * a * cc).max(0.0).sqrt();
        let x1 = (-b - dsc) / (2.0 * a);
        let x2 = (-b + dsc) / (2.0 * a);
        let bis = |mut l: f64, mut h: f64| {
            let increasing = f(h) > f(l);
            for _ in 0..2000 {
                let m = 0.5 * (l + h);
                if (f(m) > 0.0) == increasing {
                    h = m;
                } else {
                    l = m;
                }
                if h - l <= f64::EPSILON * m.abs().max(1.0) {
                    break;
                }
            }
            newton(0.5 * (l + h), c2, c1, c0)
        };
        [C64::real(bis(lo, x1)), C64::real(bis(x1, x2)), C64::real(bis(x2, hi))]
    }
}

fn newton(mut x: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    for _ in 0..5 {
        let fx = ((x + c2) * x + c1) * x + c0;
        let dfx = (3.0 * x + 2.0 * c2) * x + c1;
        if dfx == 0.0 {
            break;
        }
        let nx = x - fx / dfx;
        if !nx.is_finite() {
            break;
        }
        x = nx;
    }
    x
}

/// Bits of the fixed-point arithmetic used for roots and embeddings.
const FIX: u32 = 320;

#[derive(Clone)]
struct FixC {
    re: BigInt,
    im: BigInt,
}

fn fix_mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FIX
}

fn fix_from_f64(x: f64) -> BigInt {
    let r = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    (r.numer() << FIX) / r.denom()
}

fn fix_to_f64(x: &BigInt) -> f64 {
    // keep 64 significant bits before converting
    let bits = x.bits() as i64;
    let shift = (bits - 64).max(0);
    (x >> shift as u32).to_f64().unwrap() * 2f64.powi((shift - FIX as i64) as i32)
}

/// Real root of the cubic refined by Newton's method in fixed point.
fn refine_real_root(c: &[BigInt; 3], x0: f64) -> BigInt {
    let [c2, c1, c0] = c.clone().map(|v| v << FIX);
    let mut x = fix_from_f64(x0);
    for _ in 0..200 {
        let f = fix_mul(&(fix_mul(&(&x + &c2), &x) + &c1), &x) + &c0;
        let df = fix_mul(&(BigInt::from(3) * &x), &x) + fix_mul(&(BigInt::from(2) * &c2), &x) + &c1;
        if df.is_zero() {
            break;
        }
        let step = (f << FIX) / df;
        x -= &step;
        if step.bits() < 16 {
            break;
        }
    }
    x
}

/// Roots to `FIX` bits; for negative discriminant root 0 is real and root 1
/// has positive imaginary part.
fn precise_roots(c: &[BigInt; 3], negative_disc: bool) -> [FixC; 3] {
    let approx = cubic_roots(c, negative_disc);
    if negative_disc {
        let r = refine_real_root(c, approx[0].re);
        let p = (&c[0] << FIX) + &r;
        let q = (&c[1] << FIX) + fix_mul(&r, &p);
        // X^2 + p X + q with negative discriminant
        let disc = BigInt::from(4) * &q - fix_mul(&p, &p);
        let im: BigInt = num_integer::Roots::sqrt(&(disc.max(BigInt::zero()) << FIX)) / 2;
        let re: BigInt = -&p / 2;
        [
            FixC { re: r, im: BigInt::zero() },
            FixC { re: re.clone(), im: im.clone() },
            FixC { re, im: -im },
        ]
    } else {
        approx.map(|z| FixC { re: refine_real_root(c, z.re), im: BigInt::zero() })
    }
}

fn omega_values(order: &Order, roots: &[FixC; 3]) -> [[C64; 3]; 3] {
    std::array::from_fn(|r| {
        let z = &roots[r];
        std::array::from_fn(|i| {
            let m = &order.m[i];
            let mut acc = FixC { re: BigInt::zero(), im: BigInt::zero() };
            let mut pw = FixC { re: BigInt::one() << FIX, im: BigInt::zero() };
            for coef in m.iter() {
                acc.re += coef * &pw.re;
                acc.im += coef * &pw.im;
                pw = FixC {
                    re: fix_mul(&pw.re, &z.re) - fix_mul(&pw.im, &z.im),
                    im: fix_mul(&pw.re, &z.im) + fix_mul(&pw.im, &z.re),
                };
            }
            C64 { re: fix_to_f64(&(acc.re / &order.d)), im: fix_to_f64(&(acc.im / &order.d)) }
        })
    })
}

impl CubicField {
    /// Field generated by a root of `X^3 + c2 X^2 + c1 X + c0`.
    pub fn new(cubic: [BigInt; 3]) -> Result<CubicField> {
        let [c2, c1, c0] = &cubic;
        if crate::curve::integer_root_of_monic_cubic(c2, c1, c0).is_some() {
            return Err(Error::ReduciblePolynomial);
        }
        let poly_disc = crate::curve::cubic_discriminant(c2, c1, c0);
        let mut order = Order {
            m: [unit3(0), unit3(1), unit3(2)],
            d: BigInt::one(),
        };
        for p in primes_with_square_factor(&poly_disc)? {
            while let Some(o) = round2_step(&order, &cubic, p)? {
                order = o;
            }
        }
        let det = det3(&order.m).abs();
        let d3 = order.d.pow(3);
        let (index, r) = d3.div_rem(&det);
        if !r.is_zero() {
            return Err(Error::ContractViolation("maximal order index is not an integer".into()));
        }
        let field_disc = &poly_disc / (&index * &index);
        let negative = poly_disc.is_negative();
        let roots = precise_roots(&cubic, negative);
        let omega = omega_values(&order, &roots);
        // LLL-reduce the integral basis for the T2 form
        let t2: [[f64; 3]; 3] = std::array::from_fn(|i| {
            if negative {
                let s = std::f64::consts::SQRT_2;
                [omega[0][i].re, s * omega[1][i].re, s * omega[1][i].im]
            } else {
                [omega[0][i].re, omega[1][i].re, omega[2][i].re]
            }
        });
        if let Some((_, u)) = lll3(t2) {
            let m: [Elt; 3] = std::array::from_fn(|r| {
                std::array::from_fn(|c| (0..3).map(|i| BigInt::from(u[r][i]) * &order.m[i][c]).sum())
            });
            if det3(&m).abs() == det3(&order.m).abs() {
                order.m = m;
            }
        }
        let omega_at_roots = omega_values(&order, &roots);
        let table = order.table(&cubic)?;
        Ok(CubicField {
            signature: if negative { (1, 1) } else { (3, 0) },
            cubic,
            poly_disc,
            field_disc,
            index,
            basis: order.m,
            basis_denom: order.d,
            table,
            omega_at_roots,
        })
    }

    pub fn one(&self) -> Elt {
        one_coords(&Order { m: self.basis.clone(), d: self.basis_denom.clone() })
    }

    pub fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        let mut out = zero3();
        for i in 0..3 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if b[j].is_zero() {
                    continue;
                }
                let c = &a[i] * &b[j];
                for k in 0..3 {
                    out[k] += &c * &self.table[i][j][k];
                }
            }
        }
        out
    }

    /// Row `i`: coordinates of `w_i * a`.
    pub fn mult_matrix(&self, a: &Elt) -> [Elt; 3] {
        std::array::from_fn(|i| self.mul(&unit3(i), a))
    }

    pub fn norm(&self, a: &Elt) -> BigInt {
        det3(&self.mult_matrix(a))
    }

    /// `a / b` when it lies in `O_K`.
    pub fn exact_div(&self, a: &Elt, b: &Elt) -> Option<Elt> {
        let m = self.mult_matrix(b);
        let n = det3(&m);
        if n.is_zero() {
            return None;
        }
        let x = vec_mat(a, &adj3(&m));
        x.iter().all(|c| c.is_multiple_of(&n)).then(|| x.map(|c| c / &n))
    }

    fn embed(&self, a: &Elt) -> [C64; 3] {
        std::array::from_fn(|r| {
            (0..3).fold(C64::real(0.0), |s, i| s.add(self.omega_at_roots[r][i].scale(a[i].to_f64().unwrap_or(f64::NAN))))
        })
    }

    /// `log |sigma_1(a)|` at the first (real) embedding.
    pub fn log_abs_real_embedding(&self, a: &Elt) -> f64 {
        self.embed(a)[0].abs().ln()
    }

    fn minkowski_bound(&self) -> f64 {
        let d = self.field_disc.abs().to_f64().unwrap();
        let r2 = self.signature.1 as i32;
        (2.0 / 9.0) * (4.0 / std::f64::consts::PI).powi(r2) * d.sqrt()
    }
}

/// The field cut out by the 2-division polynomial of `curve`, via the
/// monic model `X^3 + b2 X^2 + 8 b4 X + 16 b6` with `X = 4x`.
pub fn two_division_field(curve: &WeierstrassCurve) -> Result<CubicField> {
    let info = curve.two_torsion_info();
    if info.has_rational_two_torsion {
        return Err(Error::ReduciblePolynomial);
    }
    CubicField::new(info.cubic)
}

// ---------------------------------------------------------------------------
// prime ideals

/// A prime ideal of `O_K` above `p`.
#[derive(Debug, Clone)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u32,
    pub ramification: u32,
    /// Z-basis in integral-basis coordinates.
    pub basis: [Elt; 3],
    /// `beta` with `beta P` inside `p O_K` and `beta` not in `p O_K`.
    anti_uniformizer: Elt,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }
}

/// Decompose `p O_K` by splitting the F_p-algebra `O_K / p`.
pub fn prime_decomposition(field: &CubicField, p: u64) -> Vec<PrimeIdeal> {
    let alg = table_mod(&field.table, p);
    let one = one_mod(p, &alg, &field.one());
    let frob: Vec<Vec<u64>> = (0..3)
        .map(|i| {
            let e: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
            let mut x = alg.pow(&e, p as u128, &one);
            x[i] = (x[i] + p - 1) % p;
            x.to_vec()
        })
        .collect();
    let berlekamp = fp_left_kernel(&frob, p);
    let mut idems: Vec<[u64; 3]> = vec![one];
    for b in &berlekamp {
        let b: [u64; 3] = [b[0], b[1], b[2]];
        let mut next = Vec::new();
        for e in &idems {
            let eb = alg.mul(e, &b);
            // eigenvalues of eb on eA lie in F_p
            let vals: Vec<u64> = (0..p)
                .filter(|&c| {
                    let x = alg.sub_scaled(&eb, c, e);
                    let rows: Vec<Vec<u64>> = (0..3)
                        .map(|i| {
                            let ei: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
                            alg.mul(&alg.mul(&ei, e), &x).to_vec()
                        })
                        .collect();
                    // singular on eA: rank of x*eA below rank of eA
                    let img_e: Vec<Vec<u64>> = (0..3)
                        .map(|i| {
                            let ei: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
                            alg.mul(&ei, e).to_vec()
                        })
                        .collect();
                    fp_span_basis(&rows, p).len() < fp_span_basis(&img_e, p).len()
                })
                .collect();
            if vals.len() <= 1 {
                next.push(*e);
                continue;
            }
            for &c in &vals {
                let mut f = *e;
                for &c2 in &vals {
                    if c2 != c {
                        let inv = arith::pow_mod((c + p - c2) % p, p - 2, p);
                        let t = alg.sub_scaled(&eb, c2, e);
                        f = alg.mul(&f, &t.map(|x| arith::mul_mod(x, inv, p)));
                    }
                }
                next.push(f);
            }
        }
        idems = next;
    }
    let mut out = Vec::new();
    for e in &idems {
        let image: Vec<Vec<u64>> = (0..3)
            .map(|i| {
                let ei: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
                alg.mul(&ei, e).to_vec()
            })
            .collect();
        let ae = fp_span_basis(&image, p);
        let d = ae.len() as u32;
        let mut q: u128 = 1;
        while q < d as u128 {
            q *= p as u128;
        }
        let frob_e: Vec<Vec<u64>> =
            ae.iter().map(|v| alg.pow(&[v[0], v[1], v[2]], q, &one).to_vec()).collect();
        let ker = fp_left_kernel(&frob_e, p);
        let rad: Vec<Vec<u64>> = ker
            .iter()
            .map(|y| {
                let mut v = vec![0u64; 3];
                for (c, b) in y.iter().zip(&ae) {
                    for k in 0..3 {
                        v[k] = (v[k] + arith::mul_mod(*c, b[k], p)) % p;
                    }
                }
                v
            })
            .collect();
        let f = d - rad.len() as u32;
        let one_minus_e = alg.sub_scaled(&one, 1, e);
        let mut gens = rad.clone();
        for i in 0..3 {
            let ei: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
            gens.push(alg.mul(&ei, &one_minus_e).to_vec());
        }
        let s = fp_span_basis(&gens, p);
        let basis = lattice_with_p(&s, p);
        // beta with beta * S = 0 in O_K / p
        let rows: Vec<Vec<u64>> = (0..3)
            .map(|i| {
                let ei: [u64; 3] = std::array::from_fn(|k| (k == i) as u64);
                s.iter().flat_map(|v| alg.mul(&ei, &[v[0], v[1], v[2]]).to_vec()).collect()
            })
            .collect();
        let beta = if s.is_empty() {
            one.to_vec()
        } else {
            fp_left_kernel(&rows, p).into_iter().next().expect("annihilator of a prime ideal")
        };
        out.push(PrimeIdeal {
            p,
            residue_degree: f,
            ramification: d / f,
            basis,
            anti_uniformizer: std::array::from_fn(|k| BigInt::from(beta[k])),
        });
    }
    out.sort_by(|a, b| (a.residue_degree, &a.basis).cmp(&(b.residue_degree, &b.basis)));
    out
}

/// `v_P(a)` for nonzero `a`.
pub fn valuation(field: &CubicField, prime: &PrimeIdeal, a: &Elt) -> u32 {
    let bp = BigInt::from(prime.p);
    let mut x = a.clone();
    let mut v = 0;
    loop {
        let y = field.mul(&x, &prime.anti_uniformizer);
        if y.iter().all(|c| c.is_multiple_of(&bp)) {
            x = y.map(|c| c / &bp);
            v += 1;
        } else {
            return v;
        }
    }
}

// ---------------------------------------------------------------------------
// units and reduced lattices

/// Exact unit together with `log |sigma_1(unit)| > 0`.
#[derive(Debug, Clone)]
pub struct FoundUnit {
    pub unit: Elt,
    pub regulator: f64,
    /// Proven fundamental (up to sign and inversion).
    pub certified: bool,
}

/// Fractional lattice `J / m` with `J` in Hermite normal form and `m`
/// minimal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Lattice {
    j: [Elt; 3],
    m: BigInt,
}

impl Lattice {
    fn integral(j: [Elt; 3]) -> Lattice {
        normalize_lattice(j.to_vec(), BigInt::one())
    }
}

fn normalize_lattice(gens: Vec<Elt>, m: BigInt) -> Lattice {
    let mut j = hnf3(&gens.iter().map(|g| g.to_vec()).collect::<Vec<_>>());
    let mut m = m.abs();
    let g = j.iter().flatten().fold(m.clone(), |g, x| g.gcd(x));
    if !g.is_one() {
        j = j.map(|r| r.map(|x| x / &g));
        m /= &g;
    }
    Lattice { j, m }
}

fn sigma_abs(field: &CubicField, x: &Elt, m: &BigInt) -> (f64, f64) {
    let e = field.embed(x);
    let mf = m.to_f64().unwrap();
    (e[0].abs() / mf, e[1].abs() / mf)
}

/// LLL reduction (delta = 3/4) of integer coordinate vectors, exact.
fn lll_exact(rows: &[Elt; 3]) -> [Elt; 3] {
    let mut b = rows.clone();
    let mut k = 1;
    while k < 3 {
        // Gram-Schmidt over Q
        let mut bs: Vec<[BigRational; 3]> = Vec::with_capacity(3);
        let mut bn: Vec<BigRational> = Vec::with_capacity(3);
        let mut mu = vec![vec![BigRational::zero(); 3]; 3];
        for i in 0..3 {
            let mut v: [BigRational; 3] = b[i].clone().map(BigRational::from_integer);
            for j in 0..i {
                let num: BigRational = (0..3).map(|c| rat(&b[i][c]) * &bs[j][c]).sum();
                mu[i][j] = num / &bn[j];
                for c in 0..3 {
                    let t = &mu[i][j] * &bs[j][c];
                    v[c] -= t;
                }
            }
            bn.push(v.iter().map(|x| x * x).sum());
            bs.push(v);
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                for c in 0..3 {
                    b[k][c] -= &q * &bj[c];
                }
                for l in 0..=j {
                    let t = if l == j { BigRational::one() } else { mu[j][l].clone() };
                    mu[k][l] -= rat(&q) * t;
                }
            }
        }
        let lhs = &bn[k] + &mu[k][k - 1] * &mu[k][k - 1] * &bn[k - 1];
        if lhs * BigRational::from_integer(4.into()) >= &bn[k - 1] * BigRational::from_integer(3.into()) {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Nonzero `x in J` with `|sigma_1(x/m)| <= a` and `|sigma_2(x/m)| <= b`,
/// returned as `(x, |sigma_1|, |sigma_2|)`.
fn enumerate_box(field: &CubicField, l: &Lattice, a: f64, b: f64) -> Option<Vec<(Elt, f64, f64)>> {
    let mf = l.m.to_f64()?;
    let rows = lll_exact(&l.j);
    let vecs: [[f64; 3]; 3] = std::array::from_fn(|i| {
        let e = field.embed(&rows[i]);
        [e[0].re / (mf * a), e[1].re / (mf * b), e[1].im / (mf * b)]
    });
    let (red, tr) = lll3(vecs)?;
    let ys = short_vectors(&red, 2.0 * (1.0 + 1e-6), 500_000)?;
    let mut out = Vec::new();
    for y in ys {
        if y == [0, 0, 0] {
            continue;
        }
        let c: [BigInt; 3] = std::array::from_fn(|j| (0..3).map(|i| BigInt::from(y[i]) * tr[i][j]).sum());
        let mut x = zero3();
        for (ci, row) in c.iter().zip(&rows) {
            for k in 0..3 {
                x[k] += ci * &row[k];
            }
        }
        let (s1, s2) = sigma_abs(field, &x, &l.m);
        if s1 <= a * (1.0 + 1e-9) && s2 <= b * (1.0 + 1e-9) {
            out.push((x, s1, s2));
        }
    }
    Some(out)
}

/// The relative minimum adjacent to 1 in the direction of growing
/// `|sigma_1|`, for a lattice in which 1 is a relative minimum.
fn next_minimum(field: &CubicField, l: &Lattice) -> Option<Elt> {
    let mut a = 2.0;
    while a < 1e12 {
        let cands = enumerate_box(field, l, a, 1.0)?;
        let best = cands
            .into_iter()
            .filter(|(_, s1, s2)| *s2 < 1.0 - 1e-9 && *s1 > 1.0 + 1e-9)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((x, ..)) = best {
            return Some(x);
        }
        a *= 2.0;
    }
    None
}

/// `(x/m)^-1 L` for `x in J`.
fn divide_lattice(field: &CubicField, l: &Lattice, x: &Elt) -> Lattice {
    let n = field.norm(x);
    let one = field.one();
    let adj = field.exact_div(&one.map(|c| c * &n), x).expect("adjugate is integral");
    let gens: Vec<Elt> = l.j.iter().map(|b| field.mul(&adj, b)).collect();
    normalize_lattice(gens, n)
}

/// Reduced lattice `beta^-1 I` for a relative minimum `beta` of `I`.
fn reduce_ideal(field: &CubicField, ideal: &[Elt; 3]) -> Option<Lattice> {
    let l = Lattice::integral(ideal.clone());
    let rows = lll_exact(&l.j);
    let vecs: [[f64; 3]; 3] = std::array::from_fn(|i| {
        let e = field.embed(&rows[i]);
        [e[0].re, e[1].re, e[1].im]
    });
    let (_, tr) = lll3(vecs)?;
    let mut v = zero3();
    for (ci, row) in tr[0].iter().zip(&rows) {
        for k in 0..3 {
            v[k] += BigInt::from(*ci) * &row[k];
        }
    }
    let (a, b) = sigma_abs(field, &v, &l.m);
    // a point of minimal |sigma_2| in the box of v is a relative minimum
    let (beta, ..) = enumerate_box(field, &l, a, b)?
        .into_iter()
        .min_by(|x, y| x.2.total_cmp(&y.2).then(x.1.total_cmp(&y.1)))?;
    Some(divide_lattice(field, &l, &beta))
}

/// One period of reduced principal lattices and the unit closing it.
pub struct PrincipalCycle {
    lattices: std::collections::BTreeSet<Lattice>,
    pub unit: FoundUnit,
}

impl PrincipalCycle {
    /// Exact when the period was walked completely.
    pub fn is_principal(&self, field: &CubicField, ideal: &[Elt; 3]) -> Option<bool> {
        reduce_ideal(field, ideal).map(|l| self.lattices.contains(&l))
    }

    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }
}

/// Walk the chain of relative minima of `O_K` until it closes; the
/// product of the steps is a unit. Only signature (1,1).
pub fn principal_cycle(field: &CubicField, max_steps: usize) -> Result<Option<PrincipalCycle>> {
    if field.signature != (1, 1) {
        return Err(Error::InvalidInput("unit search needs a complex cubic field".into()));
    }
    let start = Lattice::integral(unit_ideal());
    let mut l = start.clone();
    let mut lattices = std::collections::BTreeSet::new();
    let mut num = field.one();
    let mut den = BigInt::one();
    for _ in 0..max_steps {
        lattices.insert(l.clone());
        let Some(x) = next_minimum(field, &l) else { return Ok(None) };
        num = field.mul(&num, &x);
        den *= &l.m;
        let g = num.iter().fold(den.clone(), |g, c| g.gcd(c));
        num = num.map(|c| c / &g);
        den /= &g;
        l = divide_lattice(field, &l, &x);
        if l == start {
            if !den.is_one() || !field.norm(&num).abs().is_one() {
                return Err(Error::ContractViolation("cycle of minima did not close on a unit".into()));
            }
            let regulator = field.log_abs_real_embedding(&num);
            if regulator.abs() < 1e-3 {
                return Ok(None);
            }
            let unit = certify_unit(field, FoundUnit { unit: num, regulator, certified: false });
            return Ok(Some(PrincipalCycle { lattices, unit }));
        }
    }
    Ok(None)
}

/// Fundamental unit of a complex cubic field.
pub fn fundamental_unit(field: &CubicField) -> Result<Option<FoundUnit>> {
    Ok(principal_cycle(field, DEFAULT_CYCLE_STEPS)?.map(|c| c.unit))
}

/// Step cap for [`principal_cycle`].
pub const DEFAULT_CYCLE_STEPS: usize = 20_000;

/// Lower bound for the regulator of a complex cubic field from
/// `|d| < 4 eps^3 + 24`.
pub fn regulator_lower_bound(field_disc: &BigInt) -> Option<f64> {
    let d = field_disc.abs().to_f64()?;
    (d > 28.0).then(|| ((d - 24.0) / 4.0).ln() / 3.0)
}

fn unit_pow(field: &CubicField, u: &Elt, mut e: u64) -> Elt {
    let mut acc = field.one();
    let mut b = u.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = field.mul(&acc, &b);
        }
        b = field.mul(&b, &b);
        e >>= 1;
    }
    acc
}

/// `w` with `w^k = u` or `w^k = -u`, found from the embeddings and
/// checked exactly.
pub fn kth_root(field: &CubicField, u: &Elt, k: u64) -> Option<Elt> {
    let e = field.embed(u);
    let a: RMat = std::array::from_fn(|i| {
        let w = &field.omega_at_roots;
        [w[0][i].re, w[1][i].re, w[1][i].im].map(|x| BigRational::from_float(x).unwrap())
    });
    let inv = rmat_inverse(&a)?;
    let inv_f: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j].to_f64().unwrap()));
    let kf = k as f64;
    let r1 = e[0].abs().powf(1.0 / kf);
    let r2 = e[1].abs().powf(1.0 / kf);
    let arg = e[1].im.atan2(e[1].re);
    let neg_u = u.clone().map(|c| -c);
    for s1 in [1.0, -1.0] {
        for sign_shift in [0.0, std::f64::consts::PI] {
            for j in 0..k {
                let t = (arg + sign_shift + 2.0 * std::f64::consts::PI * j as f64) / kf;
                let target = [s1 * r1, r2 * t.cos(), r2 * t.sin()];
                let c: [f64; 3] = std::array::from_fn(|col| (0..3).map(|i| target[i] * inv_f[i][col]).sum());
                if c.iter().any(|x| !x.is_finite() || x.abs() > 9e15) {
                    continue;
                }
                let w: Elt = c.map(|x| BigInt::from(x.round() as i64));
                let p = unit_pow(field, &w, k);
                if p == *u || p == neg_u {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// A unit with `log|sigma_1| = R` is fundamental when it has no `k`-th
/// root for every prime `k <= R / R_low`.
fn certify_unit(field: &CubicField, mut u: FoundUnit) -> FoundUnit {
    if u.regulator < 0.0 {
        u.unit = field.exact_div(&field.one(), &u.unit).expect("unit is invertible");
        u.regulator = -u.regulator;
    }
    let Some(low) = regulator_lower_bound(&field.field_disc) else { return u };
    'outer: loop {
        let kmax = (u.regulator / low).floor() as u64;
        for k in arith::primes_up_to(kmax) {
            if let Some(w) = kth_root(field, &u.unit, k) {
                u.regulator /= k as f64;
                u.unit = w;
                continue 'outer;
            }
        }
        u.certified = true;
        return u;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitValuation {
    AtLeastTwo,
    LessThanTwo,
    Undetermined,
}

/// The unique prime above 2 when 2 is totally ramified.
pub fn prime_above_two(field: &CubicField) -> Result<PrimeIdeal> {
    let ps = prime_decomposition(field, 2);
    match ps.as_slice() {
        [p] if p.ramification == 3 => Ok(p.clone()),
        _ => Err(Error::NotTotallyRamified),
    }
}

/// `v_pi(eps - 1) >= 2` for the fundamental unit `eps` (the answer does not
/// depend on replacing `eps` by `-eps` or `eps^-1`).
pub fn fundamental_unit_valuation(field: &CubicField, height: u64) -> Result<UnitValuation> {
    if field.signature != (1, 1) {
        return Err(Error::InvalidInput("unit valuation needs a complex cubic field".into()));
    }
    let pi = prime_above_two(field)?;
    let Some(u) = fundamental_unit(field)? else { return Ok(UnitValuation::Undetermined) };
    let cap = BigInt::from(height);
    if !u.certified || u.unit.iter().any(|c| c.abs() > cap) {
        return Ok(UnitValuation::Undetermined);
    }
    let one = field.one();
    let e1: Elt = std::array::from_fn(|k| &u.unit[k] - &one[k]);
    Ok(if valuation(field, &pi, &e1) >= 2 {
        UnitValuation::AtLeastTwo
    } else {
        UnitValuation::LessThanTwo
    })
}
// ---------------------------------------------------------------------------
// ideals and class number

fn ideal_mul(field: &CubicField, a: &[Elt; 3], b: &[Elt; 3]) -> [Elt; 3] {
    let mut gens = Vec::with_capacity(9);
    for x in a {
        for y in b {
            gens.push(field.mul(x, y).to_vec());
        }
    }
    hnf3(&gens)
}

fn unit_ideal() -> [Elt; 3] {
    [unit3(0), unit3(1), unit3(2)]
}

/// LLL on three real vectors; returns the integer transform `U` with
/// reduced = U * input.
fn lll3(b0: [[f64; 3]; 3]) -> Option<([[f64; 3]; 3], [[i64; 3]; 3])> {
    let mut b = b0;
    let mut u = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    let dot = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 10_000 {
        guard += 1;
        // Gram-Schmidt
        let mut bs = b;
        let mut mu = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..i {
                mu[i][j] = dot(&b[i], &bs[j]) / dot(&bs[j], &bs[j]);
                for c in 0..3 {
                    bs[i][c] -= mu[i][j] * bs[j][c];
                }
            }
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for c in 0..3 {
                    u[k][c] = u[k][c].checked_sub(qi.checked_mul(u[j][c])?)?;
                }
                // recompute from the transform to avoid drift
                b[k] = std::array::from_fn(|c| (0..3).map(|i| u[k][i] as f64 * b0[i][c]).sum());
                for l in 0..=j {
                    mu[k][l] -= q * if l == j { 1.0 } else { mu[j][l] };
                }
            }
        }
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (0.99 - mu[k][k - 1] * mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Some((b, u))
}

/// All integer `y` with `|sum y_i b_i|^2 <= bound`, by Fincke–Pohst.
fn short_vectors(b: &[[f64; 3]; 3], bound: f64, limit: usize) -> Option<Vec<[i64; 3]>> {
    let dot = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let g: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| dot(&b[i], &b[j])));
    // q_ii and q_ij for Q(y) = sum_i q_ii (y_i + sum_{j>i} q_ij y_j)^2
    let mut q = g;
    for i in 0..3 {
        for j in i + 1..3 {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..3 {
            for l in k..3 {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut y = [0i64; 3];
    fn rec(
        i: usize,
        rem: f64,
        q: &[[f64; 3]; 3],
        y: &mut [i64; 3],
        out: &mut Vec<[i64; 3]>,
        limit: usize,
    ) -> bool {
        let c: f64 = -(i + 1..3).map(|j| q[i][j] * y[j] as f64).sum::<f64>();
        let r = (rem / q[i][i]).max(0.0).sqrt();
        if !r.is_finite() || r > 1e6 || !c.is_finite() || c.abs() > 1e15 {
            return false;
        }
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for v in lo..=hi {
            y[i] = v;
            let t = v as f64 - c;
            let rem2 = rem - q[i][i] * t * t;
            if rem2 < -1e-9 {
                continue;
            }
            if i == 0 {
                out.push(*y);
                if out.len() > limit {
                    return false;
                }
            } else if !rec(i - 1, rem2, q, y, out, limit) {
                return false;
            }
        }
        true
    }
    rec(2, bound, &q, &mut y, &mut out, limit).then_some(out)
}

/// Short nonzero elements of `ideal` for the embedding weighted by
/// `(e^skew, e^(-skew/2))`.
fn small_elements(field: &CubicField, ideal: &[Elt; 3], skew: f64) -> Vec<Elt> {
    let (w1, w2) = (skew.exp(), (-skew / 2.0).exp());
    let ideal = &lll_exact(ideal);
    let vecs: [[f64; 3]; 3] = std::array::from_fn(|i| {
        let e = field.embed(&ideal[i]);
        if field.signature == (1, 1) {
            [e[0].re * w1, e[1].re * w2, e[1].im * w2]
        } else {
            [e[0].re * w1, e[1].re * w2, e[2].re * w2]
        }
    });
    let Some((red, tr)) = lll3(vecs) else { return Vec::new() };
    let len0: f64 = red[0].iter().map(|x| x * x).sum();
    let Some(ys) = short_vectors(&red, 4.0 * len0, 400) else { return Vec::new() };
    ys.into_iter()
        .filter(|y| *y != [0, 0, 0])
        .map(|y| {
            let c: [BigInt; 3] = std::array::from_fn(|j| (0..3).map(|i| BigInt::from(y[i]) * tr[i][j]).sum());
            let mut x = zero3();
            for (ci, row) in c.iter().zip(ideal) {
                for k in 0..3 {
                    x[k] += ci * &row[k];
                }
            }
            x
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ClassNumber {
    Value(u64),
    /// `|d_K|` above the desk-scale gate.
    DiscTooLarge,
    /// Relations or principality tests could not settle the value.
    Undetermined,
}

/// Class number from relations among primes of norm up to the Minkowski
/// bound, certified by principality tests on every element of prime
/// order in the candidate group.
pub fn class_number_naive(field: &CubicField) -> ClassNumber {
    if field.field_disc.abs() > BigInt::from(CLASS_NUMBER_DISC_LIMIT) {
        return ClassNumber::DiscTooLarge;
    }
    let mk = field.minkowski_bound();
    if mk < 2.0 {
        return ClassNumber::Value(1);
    }
    let bound = mk.floor() as u64;
    let mut fb: Vec<PrimeIdeal> = Vec::new();
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    let mut full_primes = Vec::new();
    for p in arith::primes_up_to(bound) {
        let dec = prime_decomposition(field, p);
        let start = fb.len();
        let all_in = dec.iter().all(|q| q.norm() <= bound);
        for q in &dec {
            if q.norm() <= bound {
                fb.push(q.clone());
            }
        }
        if all_in {
            full_primes.push((start, dec.iter().map(|q| q.ramification).collect::<Vec<_>>()));
        }
    }
    let k = fb.len();
    if k == 0 {
        return ClassNumber::Value(1);
    }
    for (start, ram) in &full_primes {
        let mut r = vec![BigInt::zero(); k];
        for (i, e) in ram.iter().enumerate() {
            r[start + i] = BigInt::from(*e);
        }
        relations.push(r);
    }
    let small_primes: Vec<u64> = arith::primes_up_to(bound);
    let relation_for = |a: &Elt| -> Option<Vec<BigInt>> {
        let mut n = field.norm(a).abs();
        if n.is_zero() {
            return None;
        }
        let mut r = vec![BigInt::zero(); k];
        for &p in &small_primes {
            let bp = BigInt::from(p);
            let mut e = 0u32;
            while n.is_multiple_of(&bp) {
                n /= &bp;
                e += 1;
            }
            if e == 0 {
                continue;
            }
            let mut covered = 0u32;
            for (i, q) in fb.iter().enumerate() {
                if q.p == p {
                    let v = valuation(field, q, a);
                    covered += v * q.residue_degree;
                    r[i] = BigInt::from(v);
                }
            }
            if covered != e {
                return None;
            }
        }
        n.is_one().then_some(r)
    };
    // relations from short elements of products of factor-base primes
    let mut ideals: Vec<[Elt; 3]> = vec![unit_ideal()];
    ideals.extend(fb.iter().map(|q| q.basis.clone()));
    let mut det = BigInt::zero();
    let mut stable = 0;
    let mut seed = 0x2545f4914f6cdd1du64;
    for round in 0..12 {
        if round > 0 {
            ideals.clear();
            for _ in 0..4 * k {
                let mut ideal = unit_ideal();
                for _ in 0..2 + round.min(3) {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    ideal = ideal_mul(field, &ideal, &fb[(seed % k as u64) as usize].basis);
                }
                ideals.push(ideal);
            }
        }
        for ideal in &ideals {
            for skew in [-1.5f64, 0.0, 1.5] {
                for a in small_elements(field, ideal, skew) {
                    if let Some(r) = relation_for(&a) {
                        relations.push(r);
                    }
                }
            }
        }
        let h = Hnf::of_big(k, &relations);
        relations = h.rows.clone();
        if h.rank() == k {
            let d = h.pivot_product().abs();
            if d == det {
                stable += 1;
                if stable >= 2 {
                    break;
                }
            } else {
                det = d;
                stable = 0;
            }
        }
    }
    if det.is_zero() {
        return ClassNumber::Undetermined;
    }
    // certify: no element of prime order in Z^k / relations is principal
    let cycle = if field.signature == (1, 1) {
        principal_cycle(field, DEFAULT_CYCLE_STEPS).ok().flatten()
    } else {
        None
    };
    loop {
        let h = Hnf::of_big(k, &relations);
        let hh = h.pivot_product().abs();
        if hh.is_one() {
            return ClassNumber::Value(1);
        }
        let Some(cycle) = cycle.as_ref() else { return ClassNumber::Undetermined };
        let Some(hv) = hh.to_u64() else { return ClassNumber::Undetermined };
        let mut new_relation = None;
        'primes: for (l, _) in arith::factor(hv).factors {
            let rows: Vec<Vec<u64>> = h.rows.iter().map(|r| r.iter().map(|x| mod_u64(x, l)).collect()).collect();
            // y with y H = 0 mod l, i.e. elements y H / l of order l
            let ker = fp_left_kernel(&rows, l);
            for y in projective_points(&ker, l) {
                let x: Vec<BigInt> = (0..k)
                    .map(|j| {
                        let s = y.iter().zip(&h.rows).fold(BigInt::zero(), |s, (c, r)| s + BigInt::from(*c) * &r[j]);
                        (s / BigInt::from(l)).mod_floor(&BigInt::from(hv))
                    })
                    .collect();
                let mut ideal = unit_ideal();
                for (e, q) in x.iter().zip(&fb) {
                    for _ in 0..e.to_u64().unwrap() {
                        ideal = ideal_mul(field, &ideal, &q.basis);
                    }
                }
                match cycle.is_principal(field, &ideal) {
                    Some(true) => {
                        new_relation = Some(x);
                        break 'primes;
                    }
                    Some(false) => {}
                    None => return ClassNumber::Undetermined,
                }
            }
        }
        match new_relation {
            Some(x) => relations.push(x),
            None => return ClassNumber::Value(hv),
        }
    }
}

/// Nonzero vectors of the F_l-span of `basis`, one per line.
fn projective_points(basis: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
    let r = basis.len();
    if r == 0 {
        return Vec::new();
    }
    let n = basis[0].len();
    let total = (l as u128).pow(r as u32);
    if total > 100_000 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for idx in 1..total {
        let mut c = Vec::with_capacity(r);
        let mut t = idx;
        for _ in 0..r {
            c.push((t % l as u128) as u64);
            t /= l as u128;
        }
        if c.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let mut v = vec![0u64; n];
        for (ci, b) in c.iter().zip(basis) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = (*x + arith::mul_mod(*ci, *y, l)) % l;
            }
        }
        out.push(v);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop5Outcome {
    DeformationExistsVia1,
    DeformationExistsVia2,
    NeitherDetected,
    Undetermined,
}

/// Combine the class-number parity and the unit valuation for a curve
/// that is supersingular at 2 with negative discriminant.
pub fn prop5_predicate(curve: &WeierstrassCurve) -> Result<Prop5Outcome> {
    if !curve.disc.is_negative() {
        return Err(Error::InvalidInput("curve has positive discriminant".into()));
    }
    if !curve.is_supersingular_at_2()? {
        return Err(Error::InvalidInput("curve is ordinary at 2".into()));
    }
    let field = two_division_field(curve)?;
    let h = class_number_naive(&field);
    if let ClassNumber::Value(h) = h {
        if h % 2 == 0 {
            return Ok(Prop5Outcome::DeformationExistsVia1);
        }
    }
    let v = fundamental_unit_valuation(&field, DEFAULT_UNIT_HEIGHT)?;
    Ok(match (h, v) {
        (_, UnitValuation::AtLeastTwo) => Prop5Outcome::DeformationExistsVia2,
        (ClassNumber::Value(_), UnitValuation::LessThanTwo) => Prop5Outcome::NeitherDetected,
        _ => Prop5Outcome::Undetermined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(c: [i64; 3]) -> CubicField {
        CubicField::new(c.map(BigInt::from)).unwrap()
    }

    #[test]
    fn level_11_field() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, -10, -20]).unwrap();
        let k = two_division_field(&e).unwrap();
        assert_eq!(k.signature, (1, 1));
        assert_eq!(k.poly_disc, BigInt::from(-41229056));
        assert_eq!(k.field_disc, BigInt::from(-44));
        assert!(prime_above_two(&k).is_ok());
    }

    #[test]
    fn reducible_is_rejected() {
        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert!(matches!(two_division_field(&e), Err(Error::ReduciblePolynomial)));
    }

    #[test]
    fn small_discriminants_have_class_number_one() {
        // x^3 - x - 1 has discriminant -23
        let k = field([0, -1, -1]);
        assert_eq!(k.field_disc, BigInt::from(-23));
        assert_eq!(class_number_naive(&k), ClassNumber::Value(1));
    }

    #[test]
    fn gate() {
        // x^3 - 2000003 has |disc| far above the gate
        let k = field([0, 0, -2000003]);
        assert_eq!(class_number_naive(&k), ClassNumber::DiscTooLarge);
    }

    #[test]
    fn units_are_units() {
        let k = field([0, -1, -1]);
        let u = fundamental_unit(&k).unwrap().unwrap();
        // |d| = 23 is below the range of the regulator bound
        assert!(!u.certified);
        assert!(k.norm(&u.unit).abs().is_one());
        assert!(u.regulator > 0.0);
        let e = WeierstrassCurve::from_i64([0, -1, 1, -10, -20]).unwrap();
        let k = two_division_field(&e).unwrap();
        let u = fundamental_unit(&k).unwrap().unwrap();
        assert!(u.certified);
        assert!((u.regulator - 0.609377863436).abs() < 1e-9);
        assert!(kth_root(&k, &unit_pow(&k, &u.unit, 3), 3).is_some());
    }

    #[test]
    fn prime_decomposition_norms_multiply_out() {
        let k = field([0, -1, -1]);
        for p in [2u64, 3, 5, 7, 23] {
            let total: u32 = prime_decomposition(&k, p).iter().map(|q| q.residue_degree * q.ramification).sum();
            assert_eq!(total, 3, "p = {p}");
        }
    }
}
