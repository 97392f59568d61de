//! The projective line P^1(Z/N) with canonical representatives.

use crate::arith::{gcd, xgcd};

#[derive(Clone, Debug)]
pub struct P1List {
    pub n: u64,
    list: Vec<(u32, u32)>,
    // slot of each u in 0..n: u == 0 or u | n
    slot: Vec<i32>,
    table: Vec<u32>,
    // index of every pair (u, v) mod n, for moderate n
    full: Option<Vec<u32>>,
}

const FULL_TABLE_MAX: u64 = 2048;

const NONE: u32 = u32::MAX;

/// Canonical representative of `(u : v)` in P^1(Z/N), or `None` when
/// `gcd(u, v, N) != 1`.
pub fn normalize(n: u64, u: i64, v: i64) -> Option<(u64, u64)> {
    if n == 1 {
        return Some((0, 0));
    }
    let ni = n as i64;
    let u = u.rem_euclid(ni);
    let v = v.rem_euclid(ni);
    if u == 0 {
        return (gcd(v as u64, n) == 1).then_some((0, 1));
    }
    let (g, s, _) = xgcd(u, ni);
    let mut s = s.rem_euclid(ni);
    if gcd(g as u64, v as u64) != 1 {
        return None;
    }
    if g != 1 {
        let d = ni / g;
        while gcd(s as u64, n) != 1 {
            s = (s + d) % ni;
        }
    }
    // (u, v) * s = (g, s v)
    let u = g;
    let mut v = ((s as i128 * v as i128) % ni as i128) as i64;
    let mut min_v = v;
    if g != 1 {
        let ng = ni / g;
        let vng = ((v as i128 * ng as i128) % ni as i128) as i64;
        let mut t = 1i64;
        for _ in 2..=g {
            v = (v + vng) % ni;
            t = (t + ng) % ni;
            if v < min_v && gcd(t as u64, n) == 1 {
                min_v = v;
            }
        }
    }
    Some((u as u64, min_v as u64))
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1 && n < (1 << 24), "level out of range");
        let nu = n as usize;
        let mut list = Vec::new();
        let mut slot = vec![-1i32; nu];
        if n == 1 {
            slot[0] = 0;
            return P1List { n, list: vec![(0, 0)], slot, table: vec![0], full: None };
        }
        let mut firsts = vec![0u64];
        firsts.extend((1..n).filter(|u| n % u == 0));
        for (k, &u) in firsts.iter().enumerate() {
            slot[u as usize] = k as i32;
        }
        let mut seen = vec![false; firsts.len() * nu];
        for &u in &firsts {
            for v in 0..n {
                if let Some((a, b)) = normalize(n, u as i64, v as i64) {
                    let key = slot[a as usize] as usize * nu + b as usize;
                    if !seen[key] {
                        seen[key] = true;
                        list.push((a as u32, b as u32));
                    }
                }
            }
        }
        list.sort_unstable();
        let mut table = vec![NONE; firsts.len() * nu];
        for (i, &(a, b)) in list.iter().enumerate() {
            table[slot[a as usize] as usize * nu + b as usize] = i as u32;
        }
        let full = (n <= FULL_TABLE_MAX).then(|| {
            let units: Vec<u64> = (1..n).filter(|&s| gcd(s, n) == 1).collect();
            let mut full = vec![NONE; nu * nu];
            for (i, &(a, b)) in list.iter().enumerate() {
                for &s in &units {
                    full[((s * a as u64 % n) * n + s * b as u64 % n) as usize] = i as u32;
                }
            }
            full
        });
        P1List { n, list, slot, table, full }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> (u64, u64) {
        let (a, b) = self.list[i];
        (a as u64, b as u64)
    }

    /// Index of the class of `(u : v)`.
    pub fn index(&self, u: i64, v: i64) -> Option<usize> {
        if let Some(full) = &self.full {
            let ni = self.n as i64;
            let i = full[(u.rem_euclid(ni) * ni + v.rem_euclid(ni)) as usize];
            return (i != NONE).then_some(i as usize);
        }
        self.index_by_normalizing(u, v)
    }

    fn index_by_normalizing(&self, u: i64, v: i64) -> Option<usize> {
        let (a, b) = normalize(self.n, u, v)?;
        if self.n == 1 {
            return Some(0);
        }
        let s = self.slot[a as usize];
        debug_assert!(s >= 0);
        let i = self.table[s as usize * self.n as usize + b as usize];
        (i != NONE).then_some(i as usize)
    }

    /// `(c : d) S = (d : -c)`.
    pub fn apply_s(&self, i: usize) -> usize {
        let (c, d) = self.get(i);
        self.index(d as i64, -(c as i64)).unwrap()
    }

    /// `(c : d) tau = (d : -c - d)`.
    pub fn apply_tau(&self, i: usize) -> usize {
        let (c, d) = self.get(i);
        self.index(d as i64, -(c as i64) - d as i64).unwrap()
    }

    /// `(c : d) -> (-c : d)`.
    pub fn apply_star(&self, i: usize) -> usize {
        let (c, d) = self.get(i);
        self.index(-(c as i64), d as i64).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;

    fn psi(n: u64) -> usize {
        let f = factor(n);
        let mut r = n;
        for p in f.primes() {
            r = r / p * (p + 1);
        }
        r as usize
    }

    #[test]
    fn sizes_match_index_formula() {
        for n in 1..200u64 {
            assert_eq!(P1List::new(n).len(), psi(n), "N = {n}");
        }
    }

    #[test]
    fn lookup_table_agrees_with_normalization() {
        for n in [1u64, 2, 11, 12, 36, 97, 360] {
            let p1 = P1List::new(n);
            for u in 0..n as i64 {
                for v in 0..n as i64 {
                    assert_eq!(p1.index(u, v), p1.index_by_normalizing(u, v), "N = {n}");
                }
            }
        }
    }

    #[test]
    fn normalization_is_projective() {
        for n in [12u64, 30, 49, 64] {
            let p1 = P1List::new(n);
            for i in 0..p1.len() {
                let (c, d) = p1.get(i);
                for s in 1..n {
                    if gcd(s, n) == 1 {
                        let j = p1.index((s * c) as i64, (s * d) as i64).unwrap();
                        assert_eq!(i, j);
                    }
                }
            }
        }
    }
}
