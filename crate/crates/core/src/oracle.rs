//! Brute-force oracles for test suites.
//!
//! Everything here runs on `i128` with naive algorithms (Euclid elimination,
//! cofactor expansion, box enumeration) and shares no code with the exact
//! implementations it checks.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::exactmat::IntMatrix;
use crate::lattice::Lattice;

pub type Vector = Vec<i128>;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("oracle inputs fit in i128")
}

/// Columns of an exact matrix as `i128` vectors.
pub fn columns(m: &IntMatrix) -> Vec<Vector> {
    m.columns().iter().map(|c| c.iter().map(to_i128).collect()).collect()
}

pub fn rows(m: &IntMatrix) -> Vec<Vector> {
    m.to_rows().iter().map(|c| c.iter().map(to_i128).collect()).collect()
}

pub fn lattice_gens(l: &Lattice) -> Vec<Vector> {
    columns(l.basis())
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vector]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vector> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
        let term = m[0][j].checked_mul(cofactor_det(&minor)).expect("no overflow");
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Echelon basis by repeated Euclidean division: the returned vectors have
/// strictly increasing leading rows and positive leading entries.
pub fn echelon_basis(d: usize, gens: &[Vector]) -> Vec<Vector> {
    let mut pool: Vec<Vector> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let mut basis = Vec::new();
    for i in 0..d {
        loop {
            let live: Vec<usize> = (0..pool.len()).filter(|&k| pool[k][i] != 0).collect();
            if live.len() <= 1 {
                if let Some(&k) = live.first() {
                    let mut v = pool.remove(k);
                    if v[i] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    basis.push(v);
                }
                break;
            }
            let &best = live.iter().min_by_key(|&&k| pool[k][i].abs()).expect("nonempty");
            let piv = pool[best].clone();
            for &k in &live {
                if k == best {
                    continue;
                }
                let q = pool[k][i] / piv[i];
                for (x, p) in pool[k].iter_mut().zip(&piv) {
                    *x -= q * p;
                }
            }
            pool.retain(|v| v.iter().any(|&x| x != 0));
        }
    }
    basis
}

/// Membership of `x` in the span of an echelon basis.
pub fn member_echelon(basis: &[Vector], x: &[i128]) -> bool {
    let mut r = x.to_vec();
    for b in basis {
        let p = b.iter().position(|&v| v != 0).expect("nonzero basis vector");
        if r[..p].iter().any(|&v| v != 0) {
            return false;
        }
        if r[p] % b[p] != 0 {
            return false;
        }
        let q = r[p] / b[p];
        for (x, v) in r.iter_mut().zip(b) {
            *x -= q * v;
        }
    }
    r.iter().all(|&v| v == 0)
}

pub fn member(d: usize, gens: &[Vector], x: &[i128]) -> bool {
    member_echelon(&echelon_basis(d, gens), x)
}

/// Every integer point of `[-b, b]^d`.
pub fn box_iter(d: usize, b: i128) -> Vec<Vector> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|p: Vector| (-b..=b).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Points of `[-b, b]^d` accepted by `pred`.
pub fn box_points(d: usize, b: i128, pred: impl Fn(&[i128]) -> bool) -> BTreeSet<Vector> {
    box_iter(d, b).into_iter().filter(|p| pred(p)).collect()
}

/// Lattice points of `span(gens)` in `[-b, b]^d`.
pub fn lattice_box(d: usize, gens: &[Vector], b: i128) -> BTreeSet<Vector> {
    let basis = echelon_basis(d, gens);
    box_points(d, b, |x| member_echelon(&basis, x))
}

pub fn mat_vec(m: &[Vector], x: &[i128]) -> Vector {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `|Z^d / span(gens)|`, `None` when the rank is below `d`.
pub fn index(d: usize, gens: &[Vector]) -> Option<i128> {
    let basis = echelon_basis(d, gens);
    (basis.len() == d).then(|| basis.iter().enumerate().map(|(i, b)| b[i].abs()).product())
}

/// Counts cosets of `span(gens)` by enumerating `[0, n)^d`, where `n Z^d`
/// must lie inside the lattice.
pub fn index_by_counting(d: usize, gens: &[Vector], n: i128) -> i128 {
    let basis = echelon_basis(d, gens);
    let mut pts = vec![vec![]];
    for _ in 0..d {
        pts = pts.into_iter().flat_map(|p: Vector| (0..n).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    let inside = pts.iter().filter(|p| member_echelon(&basis, p)).count() as i128;
    n.pow(d as u32) / inside
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `D_k` = gcd of all `k x k` minors; the SNF factors satisfy `d_1 ... d_k = D_k`.
pub fn determinantal_divisors(m: &[Vector]) -> Vec<i128> {
    let (r, c) = (m.len(), m.first().map_or(0, Vec::len));
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0;
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let minor: Vec<Vector> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                g = gcd(g, cofactor_det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_self_checks() {
        assert_eq!(cofactor_det(&[vec![1, 5], vec![-2, 0]]), 10);
        assert_eq!(index(2, &[vec![2, 0], vec![0, 3]]), Some(6));
        assert_eq!(index(2, &[vec![1, 0]]), None);
        assert_eq!(index_by_counting(2, &[vec![2, 0], vec![0, 3]], 6), 6);
        assert!(member(2, &[vec![2, 2], vec![2, 4]], &[0, 2]));
        assert!(!member(2, &[vec![2, 2], vec![2, 4]], &[1, 1]));
        assert_eq!(determinantal_divisors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(lattice_box(1, &[vec![3]], 4).len(), 3);
    }
}
