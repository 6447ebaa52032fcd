//! The projective line over Z/M with canonical representatives, lookup,
//! and lifts to SL_2(Z).

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{Error, Result};

pub struct P1 {
    pub m: u64,
    reps: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

impl P1 {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let units: Vec<u64> = (1..=m).filter(|u| u.gcd(&m) == 1).collect();
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut reps: Vec<(u64, u64)> = Vec::new();
        for c in 0..m.max(1) {
            for d in 0..m.max(1) {
                if gcd3(c, d, m) != 1 && m > 1 {
                    continue;
                }
                if index.contains_key(&(c, d)) {
                    continue;
                }
                // canonical representative: lexicographic minimum over the
                // unit orbit
                let mut canon = (c, d);
                for &u in &units {
                    let cand = (u * c % m, u * d % m);
                    if cand < canon {
                        canon = cand;
                    }
                }
                if canon == (c, d) {
                    let i = reps.len();
                    reps.push(canon);
                    for &u in &units {
                        index.insert((u * c % m, u * d % m), i);
                    }
                } else {
                    let i = index[&canon];
                    index.insert((c, d), i);
                }
            }
        }
        if m == 1 {
            // single point
            reps = vec![(0, 0)];
            index = HashMap::from([((0, 0), 0)]);
        }
        Ok(P1 { m, reps, index })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (u64, u64) {
        self.reps[i]
    }

    /// Index of the class of (c : d); None when gcd(c, d, m) > 1.
    pub fn reduce(&self, c: i64, d: i64) -> Option<usize> {
        let m = self.m as i64;
        let cc = (c.rem_euclid(m)) as u64;
        let dd = (d.rem_euclid(m)) as u64;
        if self.m > 1 && gcd3(cc, dd, self.m) != 1 {
            return None;
        }
        self.index.get(&(cc % self.m.max(1), dd % self.m.max(1))).copied()
    }

    /// Right action of an integer matrix on a class: (c:d) g.
    pub fn act(&self, i: usize, g: &[i64; 4]) -> Option<usize> {
        let (c, d) = self.reps[i];
        let (c, d) = (c as i64, d as i64);
        self.reduce(c * g[0] + d * g[2], c * g[1] + d * g[3])
    }

    /// An SL_2(Z) lift of the class: a matrix with bottom row congruent
    /// to the representative mod m.
    pub fn lift(&self, i: usize) -> [i64; 4] {
        let (c0, d0) = self.reps[i];
        if self.m == 1 {
            return [1, 0, 0, 1];
        }
        let m = self.m as i64;
        for kc in 0..m {
            for kd in 0..m {
                let c = c0 as i64 + kc * m;
                let d = d0 as i64 + kd * m;
                if c == 0 && d == 0 {
                    continue;
                }
                let g = (c.unsigned_abs()).gcd(&d.unsigned_abs());
                if g == 1 {
                    // a d - b c = 1 by extended Euclid
                    let (x, y) = bezout(d, -c);
                    return [x, y, c, d];
                }
            }
        }
        unreachable!("every P1 class lifts");
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}

/// (x, y) with x*a + y*b = gcd(a, b) = 1.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert!(r0 == 1 || r0 == -1, "arguments must be coprime");
    if r0 == 1 {
        (s0, t0)
    } else {
        (-s0, -t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_sizes() {
        // |P1(Z/N)| = N prod (1 + 1/p)
        assert_eq!(P1::new(1).unwrap().len(), 1);
        assert_eq!(P1::new(2).unwrap().len(), 3);
        assert_eq!(P1::new(11).unwrap().len(), 12);
        assert_eq!(P1::new(33).unwrap().len(), 48);
        assert_eq!(P1::new(77).unwrap().len(), 96);
    }

    #[test]
    fn lifts_are_unimodular_with_correct_bottom_row(
    ) {
        let p1 = P1::new(33).unwrap();
        for i in 0..p1.len() {
            let g = p1.lift(i);
            assert_eq!(g[0] * g[3] - g[1] * g[2], 1);
            let back = p1.reduce(g[2], g[3]).unwrap();
            assert_eq!(back, i);
        }
    }

    #[test]
    fn action_well_defined() {
        let p1 = P1::new(12).unwrap();
        let s = [0, -1, 1, 0];
        for i in 0..p1.len() {
            // S has order 4 = 2 on classes (since -1 acts trivially)
            let a = p1.act(i, &s).unwrap();
            let b = p1.act(a, &s).unwrap();
            assert_eq!(b, i);
        }
    }
}
