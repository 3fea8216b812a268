//! Truncated power series in `w1..wm, w̄1..w̄m`, with `w̄` treated as an
//! independent formal variable. Exponent layout: slots `0..m` hold the `w`
//! exponents and slots `m..2m` the `w̄` exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::multi_index::MultiIndex;
use super::rational::{format_rational, int, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    pairs: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, Rational>,
}

/// `log s = log c + log_part`, where `c = s(0) > 0` is kept symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesLog {
    pub constant: Rational,
    pub series: TruncSeries,
}

impl TruncSeries {
    pub fn zero(pairs: usize, degree: u32) -> Self {
        TruncSeries {
            pairs,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(pairs: usize, degree: u32, c: Rational) -> Self {
        let mut s = TruncSeries::zero(pairs, degree);
        s.add_term(MultiIndex::zero(2 * pairs), c);
        s
    }

    pub fn one(pairs: usize, degree: u32) -> Self {
        TruncSeries::constant(pairs, degree, Rational::one())
    }

    /// `c * w^a * w̄^b`
    pub fn monomial(pairs: usize, degree: u32, w: &[u32], wbar: &[u32], c: Rational) -> Self {
        assert_eq!(w.len(), pairs);
        assert_eq!(wbar.len(), pairs);
        let exps: Vec<u32> = w.iter().chain(wbar).copied().collect();
        let mut s = TruncSeries::zero(pairs, degree);
        s.add_term(MultiIndex::new(exps), c);
        s
    }

    pub fn w(pairs: usize, degree: u32, i: usize) -> Self {
        let mut s = TruncSeries::zero(pairs, degree);
        s.add_term(MultiIndex::unit(2 * pairs, i), Rational::one());
        s
    }

    pub fn wbar(pairs: usize, degree: u32, i: usize) -> Self {
        let mut s = TruncSeries::zero(pairs, degree);
        s.add_term(MultiIndex::unit(2 * pairs, pairs + i), Rational::one());
        s
    }

    pub fn from_terms(
        pairs: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Self {
        let mut s = TruncSeries::zero(pairs, degree);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `w^a w̄^b`.
    pub fn coeff_of(&self, w: &[u32], wbar: &[u32]) -> Rational {
        let exps: Vec<u32> = w.iter().chain(wbar).copied().collect();
        self.coeff(&MultiIndex::new(exps))
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(2 * self.pairs))
    }

    /// Adds `c * x^e`, silently dropping terms above the truncation degree.
    pub fn add_term(&mut self, e: MultiIndex, c: Rational) {
        debug_assert_eq!(e.nvars(), 2 * self.pairs);
        if c.is_zero() || e.degree() > self.degree {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn check_shape(&self, other: &TruncSeries) -> Result<()> {
        if self.pairs != other.pairs || self.degree != other.degree {
            return Err(Error::Shape(format!(
                "series with {} pairs/degree {} vs {} pairs/degree {}",
                self.pairs, self.degree, other.pairs, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncSeries {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        if c.is_zero() {
            return TruncSeries::zero(self.pairs, self.degree);
        }
        TruncSeries {
            pairs: self.pairs,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Cauchy product truncated to the common degree.
    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_shape(other)?;
        let mut out = TruncSeries::zero(self.pairs, self.degree);
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            for (eb, cb) in &other.terms {
                if da + eb.degree() > self.degree {
                    // Terms are graded; everything after this is higher degree.
                    break;
                }
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<TruncSeries> {
        let mut acc = TruncSeries::one(self.pairs, self.degree);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Same coefficients, kept only up to a (lower or higher) degree.
    pub fn retruncate(&self, degree: u32) -> TruncSeries {
        TruncSeries::from_terms(
            self.pairs,
            degree,
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// The part without a constant term.
    pub fn nonconstant_part(&self) -> TruncSeries {
        let mut out = self.clone();
        out.terms.remove(&MultiIndex::zero(2 * self.pairs));
        out
    }

    /// Multiplicative inverse: `(1/c) * sum_k (-u)^k` with `s = c (1 + u)`.
    pub fn inverse(&self) -> Result<TruncSeries> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Singular(
                "series inverse with zero constant term".into(),
            ));
        }
        let cinv = c.recip();
        let minus_u = self.nonconstant_part().scale(&-cinv.clone());
        let mut acc = TruncSeries::one(self.pairs, self.degree);
        let mut power = TruncSeries::one(self.pairs, self.degree);
        for _ in 0..self.degree {
            power = power.mul(&minus_u)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&cinv))
    }

    /// Mercator expansion of `log(s / s(0))`; the constant `log s(0)` is
    /// recorded, not evaluated.
    pub fn log(&self) -> Result<SeriesLog> {
        let c = self.constant_term();
        if !c.is_positive() {
            return Err(Error::Domain(format!(
                "series log needs a positive constant term, got {}",
                format_rational(&c)
            )));
        }
        let u = self.nonconstant_part().scale(&c.recip());
        let mut acc = TruncSeries::zero(self.pairs, self.degree);
        let mut power = TruncSeries::one(self.pairs, self.degree);
        for k in 1..=self.degree {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { int(1) } else { int(-1) };
            acc = acc.add(&power.scale(&(sign / int(k as i64))))?;
        }
        Ok(SeriesLog {
            constant: c,
            series: acc,
        })
    }

    /// Complex conjugation: swaps `w_i` and `w̄_i` (coefficients are real).
    pub fn conjugate(&self) -> TruncSeries {
        let m = self.pairs;
        TruncSeries {
            pairs: m,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let x = e.exponents();
                    let swapped: Vec<u32> = x[m..].iter().chain(&x[..m]).copied().collect();
                    (MultiIndex::new(swapped), c.clone())
                })
                .collect(),
        }
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.conjugate() == *self
    }

    fn derivative_slot(&self, slot: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(self.pairs, self.degree);
        for (e, c) in &self.terms {
            let k = e.get(slot);
            if k > 0 {
                out.add_term(e.with(slot, k - 1), c * int(k as i64));
            }
        }
        out
    }

    /// `∂/∂w_i`. The result is exact only up to degree `D - 1`.
    pub fn d_w(&self, i: usize) -> Result<TruncSeries> {
        self.check_index(i)?;
        Ok(self.derivative_slot(i))
    }

    /// `∂/∂w̄_i`. The result is exact only up to degree `D - 1`.
    pub fn d_wbar(&self, i: usize) -> Result<TruncSeries> {
        self.check_index(i)?;
        Ok(self.derivative_slot(self.pairs + i))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.pairs {
            return Err(Error::IndexOutOfRange(format!(
                "variable index {} with {} variable pairs",
                i, self.pairs
            )));
        }
        Ok(())
    }

    /// `∂_i ∂̄_j s` at the origin, i.e. the coefficient of `w_i w̄_j`.
    pub fn mixed_hessian(&self, i: usize, j: usize) -> Result<Rational> {
        self.check_index(i)?;
        self.check_index(j)?;
        if self.degree < 2 {
            return Err(Error::Truncation(format!(
                "mixed Hessian needs truncation degree >= 2, got {}",
                self.degree
            )));
        }
        let mut e = vec![0u32; 2 * self.pairs];
        e[i] += 1;
        e[self.pairs + j] += 1;
        Ok(self.coeff(&MultiIndex::new(e)))
    }

    /// Coefficient of `w_i` (value of `∂_i s` at the origin).
    pub fn linear_w_coeff(&self, i: usize) -> Rational {
        self.coeff(&MultiIndex::unit(2 * self.pairs, i))
    }

    /// Substitutes `w = a`, `w̄ = b` (independent rational values).
    pub fn eval(&self, w: &[Rational], wbar: &[Rational]) -> Rational {
        assert_eq!(w.len(), self.pairs);
        assert_eq!(wbar.len(), self.pairs);
        let values: Vec<&Rational> = w.iter().chain(wbar).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.exponents()
                    .iter()
                    .zip(&values)
                    .fold(c.clone(), |acc, (&k, x)| {
                        acc * num_traits::pow((*x).clone(), k as usize)
                    })
            })
            .sum()
    }

    /// Sets the listed `w_i` and `w̄_i` to zero.
    pub fn restrict_to_zero(&self, coords: &[usize]) -> TruncSeries {
        let m = self.pairs;
        TruncSeries {
            pairs: m,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| coords.iter().all(|&i| e.get(i) == 0 && e.get(m + i) == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.degree + 1);
        }
        let m = self.pairs;
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(format_rational(&mag));
            }
            for (slot, &p) in e.exponents().iter().enumerate() {
                let name = if slot < m {
                    format!("w{}", slot + 1)
                } else {
                    format!("wb{}", slot - m + 1)
                };
                match p {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{p}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        write!(f, " + O({})", self.degree + 1)
    }
}

/// Square matrix of series sharing one shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    dim: usize,
    entries: Vec<TruncSeries>,
}

impl SeriesMatrix {
    pub fn new(dim: usize, entries: Vec<TruncSeries>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape(
                "series matrix must have dimension >= 1".into(),
            ));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let (p, d) = (entries[0].pairs, entries[0].degree);
        if entries.iter().any(|e| e.pairs != p || e.degree != d) {
            return Err(Error::Shape("series matrix entries differ in shape".into()));
        }
        Ok(SeriesMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> TruncSeries) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SeriesMatrix::new(dim, entries)
    }

    pub fn identity(dim: usize, pairs: usize, degree: u32) -> Self {
        SeriesMatrix::from_fn(dim, |i, j| {
            if i == j {
                TruncSeries::one(pairs, degree)
            } else {
                TruncSeries::zero(pairs, degree)
            }
        })
        .expect("identity dimension >= 1")
    }

    /// Constant matrix embedded as series.
    pub fn from_constant(m: &super::QMatrix, pairs: usize, degree: u32) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("constant matrix is not square".into()));
        }
        SeriesMatrix::from_fn(m.rows(), |i, j| {
            TruncSeries::constant(pairs, degree, m.get(i, j).clone())
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> usize {
        self.entries[0].pairs
    }

    pub fn degree(&self) -> u32 {
        self.entries[0].degree
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.entries[i * self.dim + j]
    }

    pub fn map(&self, f: impl Fn(&TruncSeries) -> TruncSeries) -> SeriesMatrix {
        SeriesMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&TruncSeries) -> Result<TruncSeries>) -> Result<SeriesMatrix> {
        Ok(SeriesMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn retruncate(&self, degree: u32) -> SeriesMatrix {
        self.map(|s| s.retruncate(degree))
    }

    /// Constant terms as a rational matrix (the value at the base point).
    pub fn at_origin(&self) -> super::QMatrix {
        super::QMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).constant_term())
    }

    fn check_shape(&self, other: &SeriesMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "series matrices of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        self.entries[0].check_shape(&other.entries[0])
    }

    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(SeriesMatrix {
            dim: self.dim,
            entries,
        })
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.check_shape(other)?;
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TruncSeries::zero(self.pairs(), self.degree());
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(SeriesMatrix { dim: n, entries })
    }

    /// Entrywise conjugate of the transpose.
    pub fn conjugate_transpose(&self) -> SeriesMatrix {
        SeriesMatrix::from_fn(self.dim, |i, j| self.get(j, i).conjugate()).expect("same dimension")
    }

    pub fn is_hermitian(&self) -> bool {
        self.conjugate_transpose() == *self
    }

    pub fn trace(&self) -> TruncSeries {
        let mut acc = TruncSeries::zero(self.pairs(), self.degree());
        for i in 0..self.dim {
            acc = acc.add(self.get(i, i)).expect("same shape");
        }
        acc
    }

    /// Exact determinant by cofactor expansion along the first row.
    pub fn det(&self) -> TruncSeries {
        let rows: Vec<usize> = (0..self.dim).collect();
        let cols: Vec<usize> = (0..self.dim).collect();
        self.minor_det(&rows, &cols)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> TruncSeries {
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let mut acc = TruncSeries::zero(self.pairs(), self.degree());
        let sub_rows = &rows[1..];
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.get(rows[0], c);
            if entry.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry
                .mul(&self.minor_det(sub_rows, &sub_cols))
                .expect("same shape");
            acc = if k % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            }
            .expect("same shape");
        }
        acc
    }

    /// Inverse via the Neumann series around the constant part, which must be
    /// invertible.
    pub fn inverse(&self) -> Result<SeriesMatrix> {
        let h0 = self.at_origin();
        let h0_inv = h0
            .inverse()
            .ok_or_else(|| Error::Singular("series matrix is singular at the base point".into()))?;
        let (p, d) = (self.pairs(), self.degree());
        let h0_inv_s = SeriesMatrix::from_constant(&h0_inv, p, d)?;
        let nilpotent = self.map(TruncSeries::nonconstant_part);
        // (H0 + N)^{-1} = sum_k (-H0^{-1} N)^k H0^{-1}
        let step = h0_inv_s.mul(&nilpotent)?.map(TruncSeries::neg);
        let mut acc = SeriesMatrix::identity(self.dim, p, d);
        let mut power = SeriesMatrix::identity(self.dim, p, d);
        for _ in 0..d {
            power = power.mul(&step)?;
            if power.entries.iter().all(TruncSeries::is_zero) {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.mul(&h0_inv_s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn w1(d: u32) -> TruncSeries {
        TruncSeries::w(1, d, 0)
    }

    fn wb1(d: u32) -> TruncSeries {
        TruncSeries::wbar(1, d, 0)
    }

    #[test]
    fn mul_examples() {
        let one = TruncSeries::one(1, 2);
        let a = one.add(&w1(2)).unwrap();
        let b = one.sub(&w1(2)).unwrap();
        let expected = one.sub(&w1(2).mul(&w1(2)).unwrap()).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expected);
        assert_eq!(a.mul(&one).unwrap(), a);

        let c = TruncSeries::one(1, 1).add(&wb1(1)).unwrap();
        let sq = c.mul(&c).unwrap();
        assert_eq!(
            sq,
            TruncSeries::one(1, 1).add(&wb1(1).scale(&int(2))).unwrap()
        );
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(w1(2).mul(&w1(3)), Err(Error::Shape(_))));
        assert!(matches!(
            w1(2).add(&TruncSeries::w(2, 2, 0)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn inverse_geometric() {
        let x = w1(4).mul(&wb1(4)).unwrap();
        let s = TruncSeries::one(1, 4).sub(&x).unwrap();
        let expected = TruncSeries::one(1, 4)
            .add(&x)
            .unwrap()
            .add(&x.mul(&x).unwrap())
            .unwrap();
        assert_eq!(s.inverse().unwrap(), expected);
    }

    #[test]
    fn inverse_of_constant_and_linear() {
        let c = TruncSeries::constant(2, 3, rat(3, 5));
        assert_eq!(c.inverse().unwrap(), TruncSeries::constant(2, 3, rat(5, 3)));

        let s = TruncSeries::constant(1, 1, int(2)).add(&w1(1)).unwrap();
        let inv = s.inverse().unwrap();
        assert_eq!(
            inv,
            TruncSeries::constant(1, 1, rat(1, 2))
                .sub(&w1(1).scale(&rat(1, 4)))
                .unwrap()
        );
        // multiplying back leaves only a residual above degree 1
        let check = s.retruncate(2).mul(&inv.retruncate(2)).unwrap();
        assert_eq!(check.retruncate(1), TruncSeries::one(1, 1));
        assert_eq!(check.order(), Some(0));
        assert_eq!(check.nonconstant_part().order(), Some(2));
    }

    #[test]
    fn inverse_singular() {
        assert!(matches!(w1(3).inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn log_examples() {
        let one = TruncSeries::one(1, 3);
        let l = one.log().unwrap();
        assert!(l.series.is_zero());
        assert_eq!(l.constant, int(1));

        let x = w1(3);
        let l = one.add(&x).unwrap().log().unwrap();
        let x2 = x.mul(&x).unwrap();
        let x3 = x2.mul(&x).unwrap();
        let expected = x
            .sub(&x2.scale(&rat(1, 2)))
            .unwrap()
            .add(&x3.scale(&rat(1, 3)))
            .unwrap();
        assert_eq!(l.series, expected);

        assert!(matches!(
            TruncSeries::constant(1, 2, int(-1)).log(),
            Err(Error::Domain(_))
        ));
        assert!(matches!(x.log(), Err(Error::Domain(_))));
    }

    #[test]
    fn hessian_examples() {
        let s = w1(2).mul(&wb1(2)).unwrap().scale(&int(3));
        assert_eq!(s.mixed_hessian(0, 0).unwrap(), int(3));

        let t = TruncSeries::w(2, 2, 0)
            .mul(&TruncSeries::wbar(2, 2, 1))
            .unwrap();
        assert_eq!(t.mixed_hessian(0, 0).unwrap(), int(0));
        assert_eq!(t.mixed_hessian(0, 1).unwrap(), int(1));
        assert!(matches!(
            t.mixed_hessian(2, 0),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            w1(1).mixed_hessian(0, 0),
            Err(Error::Truncation(_))
        ));

        // -log(1 - w w̄) = x + x^2/2 + ...
        let x = w1(6).mul(&wb1(6)).unwrap();
        let l = TruncSeries::one(1, 6).sub(&x).unwrap().log().unwrap();
        assert_eq!(l.series.neg().mixed_hessian(0, 0).unwrap(), int(1));
    }

    #[test]
    fn determinant_examples() {
        let (p, d) = (2, 3);
        let a = TruncSeries::one(p, d)
            .add(&TruncSeries::w(p, d, 0))
            .unwrap();
        let b = TruncSeries::constant(p, d, int(2))
            .add(&TruncSeries::wbar(p, d, 1))
            .unwrap();
        let z = TruncSeries::zero(p, d);
        let diag = SeriesMatrix::new(2, vec![a.clone(), z.clone(), z.clone(), b.clone()]).unwrap();
        assert_eq!(diag.det(), a.mul(&b).unwrap());
        assert_eq!(
            SeriesMatrix::identity(3, p, d).det(),
            TruncSeries::one(p, d)
        );

        // 2x2 with degree <= 1 entries, hand expansion of ad - bc.
        let c = TruncSeries::w(p, d, 1)
            .add(&TruncSeries::constant(p, d, int(1)))
            .unwrap();
        let e = TruncSeries::wbar(p, d, 0).scale(&int(-1));
        let m = SeriesMatrix::new(2, vec![a.clone(), c.clone(), e.clone(), b.clone()]).unwrap();
        // (1 + w1)(2 + wb2) - (1 + w2)(-wb1)
        //   = 2 + 2 w1 + wb2 + w1 wb2 + wb1 + w2 wb1
        let expected = TruncSeries::from_terms(
            p,
            d,
            [
                (MultiIndex::new(vec![0, 0, 0, 0]), int(2)),
                (MultiIndex::new(vec![1, 0, 0, 0]), int(2)),
                (MultiIndex::new(vec![0, 0, 0, 1]), int(1)),
                (MultiIndex::new(vec![1, 0, 0, 1]), int(1)),
                (MultiIndex::new(vec![0, 0, 1, 0]), int(1)),
                (MultiIndex::new(vec![0, 1, 1, 0]), int(1)),
            ],
        );
        assert_eq!(m.det(), expected);
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let (p, d) = (2, 3);
        let s = |c: i64| TruncSeries::constant(p, d, int(c));
        let m = SeriesMatrix::new(
            2,
            vec![
                s(2).add(&TruncSeries::w(p, d, 0)).unwrap(),
                TruncSeries::wbar(p, d, 1),
                s(1).add(&TruncSeries::w(p, d, 1)).unwrap(),
                s(3),
            ],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), SeriesMatrix::identity(2, p, d));
        assert_eq!(inv.mul(&m).unwrap(), SeriesMatrix::identity(2, p, d));
    }

    #[test]
    fn conjugation_swaps_variables() {
        let s = TruncSeries::monomial(2, 4, &[1, 0], &[0, 2], rat(2, 7));
        let c = s.conjugate();
        assert_eq!(c.coeff_of(&[0, 2], &[1, 0]), rat(2, 7));
        assert_eq!(c.conjugate(), s);
        let herm = s.add(&c).unwrap();
        assert!(herm.is_self_conjugate());
    }
}
