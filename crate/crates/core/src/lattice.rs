//! Subgroups of `Z^d` in canonical form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmat::{deserialize_int_rows, int_to_string_rows, IntMatrix, RatMatrix};

/// A subgroup of `Z^d`, stored as the column HNF of a basis (`d x rank`).
///
/// Two lattices are equal iff their canonical bases are equal, so the derived
/// `Eq`/`Hash` are set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
}

/// Index of a subgroup in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

impl Index {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

fn check_square(m: &IntMatrix, d: usize) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.rows() });
    }
    Ok(())
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: IntMatrix::zeros(dim, 0) }
    }

    pub fn full(dim: usize) -> Self {
        Lattice { dim, basis: IntMatrix::identity(dim) }
    }

    /// `k Z^d`.
    pub fn scaled(dim: usize, k: i64) -> Self {
        Self::from_matrix(&IntMatrix::scalar(dim, &BigInt::from(k)))
    }

    /// Integer span of `gens`, each of length `dim`.
    pub fn from_generators(dim: usize, gens: &[Vec<BigInt>]) -> Result<Self> {
        Ok(Self::from_matrix(&IntMatrix::from_columns(dim, gens)?))
    }

    /// Span of small integer vectors. Panics on a length mismatch.
    pub fn from_i64(dim: usize, gens: &[&[i64]]) -> Self {
        let gens: Vec<Vec<BigInt>> = gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_generators(dim, &gens).expect("generator lengths agree with dim")
    }

    /// Integer span of the columns of `m`.
    pub fn from_matrix(m: &IntMatrix) -> Self {
        Lattice { dim: m.rows(), basis: m.hnf().h }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical HNF basis, one lattice vector per column.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis.columns()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    fn check_dim(&self, other: &Lattice) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Membership by back-substitution along the triangular basis.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut r = v.to_vec();
        let pivots = self.pivot_rows();
        for (j, &p) in pivots.iter().enumerate() {
            let piv = self.basis.get(p, j);
            let (q, rem) = r[p].div_rem(piv);
            if !rem.is_zero() {
                return Ok(false);
            }
            if !q.is_zero() {
                for (i, ri) in r.iter_mut().enumerate().skip(p) {
                    *ri -= &q * self.basis.get(i, j);
                }
            }
        }
        Ok(r.iter().all(Zero::is_zero))
    }

    fn pivot_rows(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|j| (0..self.dim).find(|&i| !self.basis.get(i, j).is_zero()).expect("basis columns are nonzero"))
            .collect()
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> Result<bool> {
        self.check_dim(other)?;
        for v in self.basis_vectors() {
            if !other.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_dim(other)?;
        Ok(Lattice::from_matrix(&self.basis.hstack(&other.basis)?))
    }

    /// Kernel of `[B1 | -B2]`, projected through `B1`.
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        self.check_dim(other)?;
        let k = self.basis.hstack(&other.basis.neg())?;
        let h = k.hnf();
        let r1 = self.rank();
        let mut gens = Vec::new();
        for j in h.h.cols()..k.cols() {
            let x: Vec<BigInt> = (0..r1).map(|i| h.u.get(i, j).clone()).collect();
            gens.push(self.basis.mul_vec(&x)?);
        }
        Lattice::from_generators(self.dim, &gens)
    }

    /// `M L` for a square `M`.
    pub fn image(&self, m: &IntMatrix) -> Result<Lattice> {
        check_square(m, self.dim)?;
        Ok(Lattice::from_matrix(&m.mul(&self.basis)?))
    }

    /// `{x in Z^d : M x in L}` for a nonsingular `M`.
    pub fn preimage(&self, m: &IntMatrix) -> Result<Lattice> {
        check_square(m, self.dim)?;
        if m.det()?.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let k = m.hstack(&self.basis.neg())?;
        let h = k.hnf();
        let mut gens = Vec::new();
        for j in h.h.cols()..k.cols() {
            gens.push((0..self.dim).map(|i| h.u.get(i, j).clone()).collect());
        }
        Lattice::from_generators(self.dim, &gens)
    }

    /// `|Z^d / L|`.
    pub fn det_index(&self) -> Index {
        if !self.is_full_rank() {
            return Index::Infinite;
        }
        Index::Finite((0..self.dim).fold(BigInt::one(), |acc, j| acc * self.basis.get(j, j)))
    }

    /// `|Z^d / (L + M Z^d)|` for a nonsingular `M`; always finite.
    pub fn join_index(&self, m: &IntMatrix) -> Result<BigInt> {
        check_square(m, self.dim)?;
        if m.det()?.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let s = Lattice::from_matrix(&self.basis.hstack(m)?);
        Ok(s.det_index().finite().cloned().expect("L + M Z^d has full rank"))
    }

    /// Same rational span.
    pub fn commensurable(&self, other: &Lattice) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.rank() == other.rank() && self.sum(other)?.rank() == self.rank())
    }

    /// `P` unimodular and `d_1 | ... | d_r` with `L = P diag(d_1, ..., d_r, 0, ...) Z^d`.
    pub fn smith_form(&self) -> (IntMatrix, Vec<BigInt>) {
        let s = self.basis.snf();
        let p = s.u.inverse_unimodular().expect("SNF transform is unimodular");
        (p, s.invariant_factors())
    }

    /// `span_Q(L) ∩ Z^d`.
    pub fn saturation(&self) -> Lattice {
        let (p, ds) = self.smith_form();
        Lattice::from_matrix(&p.select_columns(0..ds.len()))
    }

    /// Saturated lattice spanned by `g` applied to `span_Q(L)`.
    pub fn rational_span_image(&self, g: &RatMatrix) -> Result<Lattice> {
        if g.rows() != self.dim || g.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.rows() });
        }
        let mut gens = Vec::new();
        for v in self.basis_vectors() {
            let rv: Vec<BigRational> = v.into_iter().map(BigRational::from_integer).collect();
            gens.push(primitive_integer_vector(&g.mul_vec(&rv)?));
        }
        Ok(Lattice::from_generators(self.dim, &gens)?.saturation())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("lattice serializes")
    }
}

/// Clears denominators of a rational vector and divides by the content.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (j, v) in self.basis_vectors().iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, "}} in Z^{}", self.dim)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeDoc {
    dim: usize,
    #[serde(deserialize_with = "deserialize_int_rows")]
    basis: Vec<Vec<BigInt>>,
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            dim: usize,
            basis: Vec<Vec<String>>,
        }
        Out { dim: self.dim, basis: int_to_string_rows(&self.basis_vectors()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = LatticeDoc::deserialize(de)?;
        Lattice::from_generators(doc.dim, &doc.basis).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(gens: &[&[i64]]) -> Lattice {
        Lattice::from_i64(2, gens)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn canonical_form_is_generator_independent() {
        assert_eq!(l(&[&[2, 2], &[2, 4]]), Lattice::scaled(2, 2));
        assert_eq!(l(&[&[1, 0], &[3, 0]]), l(&[&[1, 0]]));
        assert_eq!(l(&[]), Lattice::zero(2));
        assert_eq!(l(&[&[0, 0]]), Lattice::zero(2));
    }

    #[test]
    fn example_intersection() {
        let a = l(&[&[2, 0], &[0, 3]]);
        let b = l(&[&[3, 0], &[0, 2]]);
        assert_eq!(a.intersect(&b).unwrap(), Lattice::scaled(2, 6));
    }

    #[test]
    fn example_join_index() {
        let two = IntMatrix::scalar(2, &BigInt::from(2));
        assert_eq!(l(&[&[1, 0]]).join_index(&two).unwrap(), BigInt::from(2));
        assert_eq!(Lattice::full(2).join_index(&two).unwrap(), BigInt::one());
        assert_eq!(Lattice::zero(2).join_index(&two).unwrap(), BigInt::from(4));
        let b = IntMatrix::from_i64_rows(&[&[1, 1], &[1, 4]]);
        assert_eq!(Lattice::zero(2).join_index(&b).unwrap(), BigInt::from(3));
    }

    #[test]
    fn zero_lattice_preimage_is_kernel() {
        let m = IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(Lattice::zero(2).preimage(&m).unwrap(), Lattice::zero(2));
        assert_eq!(Lattice::full(2).preimage(&IntMatrix::zeros(2, 2)), Err(Error::SingularMatrix));
    }

    #[test]
    fn preimage_of_scaled() {
        let two = IntMatrix::scalar(2, &BigInt::from(2));
        assert_eq!(l(&[&[1, 0]]).preimage(&two).unwrap(), l(&[&[1, 0]]));
        assert_eq!(l(&[&[2, 0], &[0, 2]]).preimage(&two).unwrap(), Lattice::full(2));
        assert_eq!(l(&[&[1, 1]]).preimage(&two).unwrap(), l(&[&[1, 1]]));
    }

    #[test]
    fn indices_and_membership() {
        assert_eq!(l(&[&[1, 1], &[0, 3]]).det_index(), Index::Finite(BigInt::from(3)));
        assert_eq!(l(&[&[1, 1]]).det_index(), Index::Infinite);
        let a = l(&[&[1, 1], &[0, 3]]);
        assert!(a.contains(&big(&[2, 5])).unwrap());
        assert!(!a.contains(&big(&[1, 0])).unwrap());
        assert!(Lattice::zero(2).contains(&big(&[0, 0])).unwrap());
        assert!(!Lattice::zero(2).contains(&big(&[0, 1])).unwrap());
    }

    #[test]
    fn commensurability_and_saturation() {
        assert!(l(&[&[2, 2]]).commensurable(&l(&[&[3, 3]])).unwrap());
        assert!(!l(&[&[2, 2]]).commensurable(&l(&[&[1, 0]])).unwrap());
        assert_eq!(l(&[&[2, 4]]).saturation(), l(&[&[1, 2]]));
        assert_eq!(Lattice::scaled(2, 5).saturation(), Lattice::full(2));
    }

    #[test]
    fn smith_form_reconstructs() {
        let a = l(&[&[2, 4], &[6, 8]]);
        let (p, ds) = a.smith_form();
        let cols: Vec<Vec<BigInt>> = ds.iter().enumerate().map(|(j, d)| p.column(j).iter().map(|x| x * d).collect()).collect();
        assert_eq!(Lattice::from_generators(2, &cols).unwrap(), a);
        assert_eq!(ds, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn json_shape() {
        let a = l(&[&[1, 0]]);
        let v = serde_json::to_string(&a).unwrap();
        assert_eq!(v, r#"{"dim":2,"basis":[["1","0"]]}"#);
        let back: Lattice = serde_json::from_str(r#"{"dim":2,"basis":[[3,0],["1","0"]]}"#).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Lattice>(r#"{"dim":2,"basis":[[1]]}"#).is_err());
    }

    #[test]
    fn dimension_errors() {
        let a = Lattice::full(2);
        let b = Lattice::full(3);
        assert!(matches!(a.intersect(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.image(&IntMatrix::identity(3)), Err(Error::DimensionMismatch { .. })));
    }
}
