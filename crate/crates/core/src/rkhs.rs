//! Diagonal reproducing kernels `K(z, w) = sum_alpha c_alpha z^alpha w̄^alpha`
//! on the polydisc and kernels of ideal-generated submodules.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::rational::{inside_unit_disc, int, pow_int, rising_over_factorial, to_f64};
use crate::algebra::{MultiIndex, Poly, QMatrix, Rational};
use crate::error::{Error, Result};
use crate::ideals::{Family, IdealSpec, ZeroSetDescriptor};

/// A kernel diagonal in the monomial basis: `||z^alpha||^2 = 1 / c_alpha`.
pub trait DiagonalKernel: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// `c_alpha > 0`
    fn coeff(&self, alpha: &MultiIndex) -> Rational;

    /// Weights `(lambda_1..lambda_m)` when `K = prod (1 - z_i w̄_i)^{-lambda_i}`.
    fn product_weights(&self) -> Option<&[Rational]> {
        None
    }

    /// Upper bound on `sum_{|alpha| > n} c_alpha rho^{|alpha|}`.
    fn tail_bound(&self, _n: u32, _rho: &Rational) -> Option<Rational> {
        None
    }
}

/// `H^lambda(D^m)` with kernel `prod_i (1 - z_i w̄_i)^{-lambda_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPolydiscModule {
    weights: Vec<Rational>,
}

impl WeightedPolydiscModule {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("a module needs at least one weight".into()));
        }
        if let Some(k) = weights.iter().position(|l| !l.is_positive()) {
            return Err(Error::Domain(format!("weight {} must be positive", k + 1)));
        }
        Ok(WeightedPolydiscModule { weights })
    }

    /// All weights 1.
    pub fn hardy(m: usize) -> Self {
        WeightedPolydiscModule {
            weights: vec![Rational::one(); m],
        }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn shared(&self) -> Arc<dyn DiagonalKernel> {
        Arc::new(self.clone())
    }
}

impl DiagonalKernel for WeightedPolydiscModule {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn coeff(&self, alpha: &MultiIndex) -> Rational {
        diag_coeff(self, alpha)
    }

    fn product_weights(&self) -> Option<&[Rational]> {
        Some(&self.weights)
    }

    /// `sum_{|alpha| = n} c_alpha = (Lambda)_n / n!` with `Lambda = sum lambda_i`;
    /// the tail is dominated by a geometric series from `n + 1` on.
    fn tail_bound(&self, n: u32, rho: &Rational) -> Option<Rational> {
        if !rho.is_positive() {
            return Some(Rational::zero());
        }
        if *rho >= Rational::one() {
            return None;
        }
        let total: Rational = self.weights.iter().sum();
        let first = rising_over_factorial(&total, n + 1) * pow_int(rho, (n + 1) as i64).ok()?;
        let growth = (&total + int(n as i64 + 1)) / int(n as i64 + 2);
        let ratio = rho * growth.max(Rational::one());
        if ratio >= Rational::one() {
            return None;
        }
        Some(first / (Rational::one() - ratio))
    }
}

/// Any positive coefficient function `alpha -> c_alpha`.
#[derive(Clone)]
pub struct CustomDiagonal {
    dim: usize,
    coeff: Arc<dyn Fn(&MultiIndex) -> Rational + Send + Sync>,
}

impl CustomDiagonal {
    pub fn new(
        dim: usize,
        coeff: impl Fn(&MultiIndex) -> Rational + Send + Sync + 'static,
    ) -> Self {
        CustomDiagonal {
            dim,
            coeff: Arc::new(coeff),
        }
    }
}

impl fmt::Debug for CustomDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDiagonal")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl DiagonalKernel for CustomDiagonal {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coeff(&self, alpha: &MultiIndex) -> Rational {
        (self.coeff)(alpha)
    }
}

/// `c_alpha = prod_i (lambda_i)_{alpha_i} / alpha_i!`
pub fn diag_coeff(module: &WeightedPolydiscModule, alpha: &MultiIndex) -> Rational {
    assert_eq!(alpha.nvars(), module.weights.len(), "multi-index length");
    alpha
        .exponents()
        .iter()
        .zip(&module.weights)
        .map(|(&a, l)| rising_over_factorial(l, a))
        .product()
}

/// `<p, q> = sum_alpha p_alpha q_alpha / c_alpha` (real coefficients).
pub fn poly_inner(kernel: &dyn DiagonalKernel, p: &Poly, q: &Poly) -> Rational {
    let (small, large) = if p.terms().len() <= q.terms().len() {
        (p, q)
    } else {
        (q, p)
    };
    small
        .terms()
        .iter()
        .filter_map(|(e, c)| large.terms().get(e).map(|d| c * d / kernel.coeff(e)))
        .sum()
}

fn monomial_value(alpha: &MultiIndex, x: &[Rational]) -> Rational {
    alpha
        .exponents()
        .iter()
        .zip(x)
        .fold(Rational::one(), |acc, (&k, v)| {
            acc * num_traits::pow(v.clone(), k as usize)
        })
}

/// `(1 - x)^{-lambda}` when it is rational (integer `lambda`).
fn binomial_power(x: &Rational, lambda: &Rational) -> Option<Rational> {
    if !lambda.is_integer() {
        return None;
    }
    let e = lambda.to_integer().to_i64()?;
    pow_int(&(Rational::one() - x), -e).ok()
}

/// The full ambient kernel `K(z, w)` for real rational points, in closed form
/// when available.
pub fn ambient_exact(
    kernel: &dyn DiagonalKernel,
    z: &[Rational],
    w: &[Rational],
) -> Option<Rational> {
    let weights = kernel.product_weights()?;
    weights
        .iter()
        .zip(z.iter().zip(w))
        .map(|(l, (a, b))| binomial_power(&(a * b), l))
        .product()
}

/// Partial sum of the ambient kernel over `|alpha| <= n`.
pub fn ambient_truncated(
    kernel: &dyn DiagonalKernel,
    z: &[Rational],
    w: &[Rational],
    n: u32,
) -> Rational {
    let x: Vec<Rational> = z.iter().zip(w).map(|(a, b)| a * b).collect();
    MultiIndex::all_up_to(kernel.dim(), n)
        .iter()
        .map(|alpha| kernel.coeff(alpha) * monomial_value(alpha, &x))
        .sum()
}

/// `K(z, w)` in floating point, `prod (1 - z_i conj(w_i))^{-lambda_i}`.
pub fn ambient_f64(weights: &[Rational], z: &[Complex64], w: &[Complex64]) -> Complex64 {
    weights
        .iter()
        .zip(z.iter().zip(w))
        .map(|(l, (a, b))| (Complex64::new(1.0, 0.0) - a * b.conj()).powf(-to_f64(l)))
        .product()
}

/// Exact submodule kernel in one of three forms.
#[derive(Clone, Debug)]
pub enum KernelForm {
    /// `sum_{alpha in supp} c_alpha z^alpha w̄^alpha` with `supp` the monomials
    /// divisible by some generator.
    DiagonalFiltered { generators: Vec<MultiIndex> },
    /// `K(z, w) - k(z)^T G^{-1} k(w)` with `k(z)_a = K(z, a)` and `G = (K(a, b))`.
    RankOneCorrected { points: Vec<Vec<Rational>> },
    /// `K_N(z, w) = b(z)^T G^{-1} b(w)` over a basis of the truncated ideal.
    GramForm {
        basis: Vec<Poly>,
        gram: QMatrix,
        gram_inverse: QMatrix,
        truncation: u32,
    },
}

#[derive(Clone, Debug)]
pub struct KernelRep {
    ambient: Arc<dyn DiagonalKernel>,
    form: KernelForm,
}

/// Kernel of the closure of `ideal`, in the most explicit exact form available.
pub fn submodule_kernel(
    ambient: Arc<dyn DiagonalKernel>,
    ideal: &IdealSpec,
    n: u32,
) -> Result<KernelRep> {
    if ambient.dim() != ideal.nvars() {
        return Err(Error::Shape(format!(
            "module has dimension {}, ideal lives in {} variables",
            ambient.dim(),
            ideal.nvars()
        )));
    }
    if n < ideal.max_degree() {
        return Err(Error::Truncation(format!(
            "truncation degree {n} is below the generator degree {}",
            ideal.max_degree()
        )));
    }
    match ideal.family() {
        Family::Monomial => Ok(KernelRep::diagonal_filtered(
            ambient,
            ideal.monomial_exponents().unwrap(),
        )),
        Family::CoordinateVanishing => match crate::ideals::zero_set(ideal)? {
            ZeroSetDescriptor::Point(a) if a.iter().all(inside_unit_disc) => {
                KernelRep::rank_one_corrected(ambient, vec![a])
            }
            _ => KernelRep::gram_form(ambient, ideal, n),
        },
        _ => KernelRep::gram_form(ambient, ideal, n),
    }
}

impl KernelRep {
    pub fn diagonal_filtered(
        ambient: Arc<dyn DiagonalKernel>,
        generators: Vec<MultiIndex>,
    ) -> Self {
        KernelRep {
            ambient,
            form: KernelForm::DiagonalFiltered { generators },
        }
    }

    pub fn rank_one_corrected(
        ambient: Arc<dyn DiagonalKernel>,
        points: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        for p in &points {
            if p.len() != ambient.dim() || !p.iter().all(inside_unit_disc) {
                return Err(Error::Domain(
                    "correction point must lie in the open polydisc".into(),
                ));
            }
        }
        Ok(KernelRep {
            ambient,
            form: KernelForm::RankOneCorrected { points },
        })
    }

    /// Normal-equation form over a maximal independent subset of
    /// `{z^beta p_j : deg <= n}`.
    pub fn gram_form(ambient: Arc<dyn DiagonalKernel>, ideal: &IdealSpec, n: u32) -> Result<Self> {
        if n < ideal.max_degree() {
            return Err(Error::Truncation(format!(
                "truncation degree {n} is below the generator degree {}",
                ideal.max_degree()
            )));
        }
        let basis = crate::ideals::truncated_ideal_basis(ideal, n);
        let k = basis.len();
        let gram = QMatrix::from_fn(k, k, |i, j| {
            poly_inner(ambient.as_ref(), &basis[i], &basis[j])
        });
        if !gram.is_positive_definite() {
            return Err(Error::Singular(
                "Gram matrix is not positive definite".into(),
            ));
        }
        let gram_inverse = gram
            .inverse()
            .expect("positive definite matrices are invertible");
        Ok(KernelRep {
            ambient,
            form: KernelForm::GramForm {
                basis,
                gram,
                gram_inverse,
                truncation: n,
            },
        })
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    pub fn ambient(&self) -> &dyn DiagonalKernel {
        self.ambient.as_ref()
    }

    pub fn variant_name(&self) -> &'static str {
        match self.form {
            KernelForm::DiagonalFiltered { .. } => "diagonal-filtered",
            KernelForm::RankOneCorrected { .. } => "rank-one-corrected",
            KernelForm::GramForm { .. } => "gram-form",
        }
    }

    fn in_support(generators: &[MultiIndex], alpha: &MultiIndex) -> bool {
        generators.iter().any(|g| alpha.divisible_by(g))
    }

    /// The kernel with every ambient series cut at total degree `n`. For
    /// `GramForm` this is `K_N` itself and `n` is ignored.
    pub fn evaluate_truncated(&self, z: &[Rational], w: &[Rational], n: u32) -> Rational {
        let kern = self.ambient.as_ref();
        match &self.form {
            KernelForm::DiagonalFiltered { generators } => {
                let x: Vec<Rational> = z.iter().zip(w).map(|(a, b)| a * b).collect();
                MultiIndex::all_up_to(kern.dim(), n)
                    .iter()
                    .filter(|alpha| Self::in_support(generators, alpha))
                    .map(|alpha| kern.coeff(alpha) * monomial_value(alpha, &x))
                    .sum()
            }
            KernelForm::RankOneCorrected { points } => {
                self.rank_one_value(|a, b| ambient_truncated(kern, a, b, n), z, w, points)
            }
            KernelForm::GramForm {
                basis,
                gram_inverse,
                ..
            } => {
                let bz: Vec<Rational> = basis.iter().map(|p| p.eval(z)).collect();
                let bw: Vec<Rational> = basis.iter().map(|p| p.eval(w)).collect();
                bilinear(&bz, gram_inverse, &bw)
            }
        }
    }

    fn rank_one_value(
        &self,
        k: impl Fn(&[Rational], &[Rational]) -> Rational,
        z: &[Rational],
        w: &[Rational],
        points: &[Vec<Rational>],
    ) -> Rational {
        let kz: Vec<Rational> = points.iter().map(|a| k(z, a)).collect();
        let kw: Vec<Rational> = points.iter().map(|a| k(a, w)).collect();
        let g = QMatrix::from_fn(points.len(), points.len(), |i, j| k(&points[i], &points[j]));
        let ginv = g
            .inverse()
            .expect("kernel Gram matrix at distinct points is invertible");
        k(z, w) - bilinear(&kz, &ginv, &kw)
    }

    /// Exact value of the untruncated kernel, when a closed form exists
    /// (product kernels with integer weights).
    pub fn evaluate_exact(&self, z: &[Rational], w: &[Rational]) -> Option<Rational> {
        let kern = self.ambient.as_ref();
        match &self.form {
            KernelForm::DiagonalFiltered { generators } => {
                let weights = kern.product_weights()?;
                let x: Vec<Rational> = z.iter().zip(w).map(|(a, b)| a * b).collect();
                inclusion_exclusion(generators, |beta| {
                    weights
                        .iter()
                        .zip(&x)
                        .enumerate()
                        .map(|(i, (l, xi))| {
                            let full = binomial_power(xi, l)?;
                            let head: Rational = (0..beta.get(i))
                                .map(|a| {
                                    rising_over_factorial(l, a)
                                        * num_traits::pow(xi.clone(), a as usize)
                                })
                                .sum();
                            Some(full - head)
                        })
                        .product()
                })
            }
            KernelForm::RankOneCorrected { points } => {
                // Closed forms exist for all points or for none.
                ambient_exact(kern, z, w)?;
                Some(self.rank_one_value(
                    |a, b| ambient_exact(kern, a, b).expect("closed form"),
                    z,
                    w,
                    points,
                ))
            }
            KernelForm::GramForm { .. } => None,
        }
    }

    /// Bound on `|K(z, w) - evaluate_truncated(z, w, n)|` for diagonal-filtered kernels.
    pub fn truncation_remainder_bound(
        &self,
        z: &[Rational],
        w: &[Rational],
        n: u32,
    ) -> Option<Rational> {
        match &self.form {
            KernelForm::DiagonalFiltered { .. } => {
                let rho = z.iter().zip(w).map(|(a, b)| (a * b).abs()).max()?;
                self.ambient.tail_bound(n, &rho)
            }
            _ => None,
        }
    }

    /// Floating evaluation at complex points.
    pub fn evaluate_f64(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        for x in z.iter().chain(w) {
            if x.norm() >= 1.0 {
                return Err(Error::Domain(
                    "evaluation point outside the open polydisc".into(),
                ));
            }
        }
        let kern = self.ambient.as_ref();
        match &self.form {
            KernelForm::DiagonalFiltered { generators } => {
                let weights = kern.product_weights().ok_or_else(|| {
                    Error::Unsupported("floating evaluation needs a product kernel".into())
                })?;
                let x: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a * b.conj()).collect();
                let one = Complex64::new(1.0, 0.0);
                let value = inclusion_exclusion(generators, |beta| {
                    Some(
                        weights
                            .iter()
                            .zip(&x)
                            .enumerate()
                            .map(|(i, (l, xi))| {
                                let lf = to_f64(l);
                                let full = (one - xi).powf(-lf);
                                let mut head = Complex64::new(0.0, 0.0);
                                let mut term = one;
                                for a in 0..beta.get(i) {
                                    head += term;
                                    term *= xi * (lf + a as f64) / (a as f64 + 1.0);
                                }
                                full - head
                            })
                            .product::<Complex64>(),
                    )
                })
                .expect("floating closed form");
                Ok(value)
            }
            KernelForm::RankOneCorrected { points } => {
                let weights = kern.product_weights().ok_or_else(|| {
                    Error::Unsupported("floating evaluation needs a product kernel".into())
                })?;
                let pts: Vec<Vec<Complex64>> = points
                    .iter()
                    .map(|p| p.iter().map(|c| Complex64::new(to_f64(c), 0.0)).collect())
                    .collect();
                if pts.len() != 1 {
                    return Err(Error::Unsupported(
                        "floating evaluation with several points".into(),
                    ));
                }
                let a = &pts[0];
                let k = |u: &[Complex64], v: &[Complex64]| ambient_f64(weights, u, v);
                Ok(k(z, w) - k(z, a) * k(a, w) / k(a, a))
            }
            KernelForm::GramForm {
                basis,
                gram_inverse,
                ..
            } => {
                let eval = |p: &Poly, x: &[Complex64]| -> Complex64 {
                    p.terms()
                        .iter()
                        .map(|(e, c)| {
                            e.exponents()
                                .iter()
                                .zip(x)
                                .fold(Complex64::new(to_f64(c), 0.0), |acc, (&k, v)| {
                                    acc * v.powu(k)
                                })
                        })
                        .sum()
                };
                let bz: Vec<Complex64> = basis.iter().map(|p| eval(p, z)).collect();
                let bw: Vec<Complex64> = basis.iter().map(|p| eval(p, w).conj()).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in bz.iter().enumerate() {
                    for (j, b) in bw.iter().enumerate() {
                        acc += a * to_f64(gram_inverse.get(i, j)) * b;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// `((K(x_i, x_j)))` with every ambient series cut at degree `n`.
    pub fn point_gram(&self, points: &[Vec<Rational>], n: u32) -> QMatrix {
        QMatrix::from_fn(points.len(), points.len(), |i, j| {
            self.evaluate_truncated(&points[i], &points[j], n)
        })
    }

    /// For a principal monomial ideal `<z^gamma>`, the diagonal coefficients of
    /// `chi` in `K_[I](z, w) = z^gamma chi(z, w) w̄^gamma`, up to degree `n`.
    pub fn principal_factor(&self, n: u32) -> Option<BTreeMap<MultiIndex, Rational>> {
        let KernelForm::DiagonalFiltered { generators } = &self.form else {
            return None;
        };
        let [gamma] = generators.as_slice() else {
            return None;
        };
        Some(
            MultiIndex::all_up_to(self.ambient.dim(), n)
                .into_iter()
                .map(|beta| {
                    let c = self.ambient.coeff(&beta.add(gamma));
                    (beta, c)
                })
                .collect(),
        )
    }
}

fn bilinear(x: &[Rational], m: &QMatrix, y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            acc += a * m.get(i, j) * b;
        }
    }
    acc
}

/// `sum over supp = union_g (g + N^m)` written as an alternating sum over
/// nonempty generator subsets of the sums over `lcm(T) + N^m`.
fn inclusion_exclusion<T>(
    generators: &[MultiIndex],
    mut cone_sum: impl FnMut(&MultiIndex) -> Option<T>,
) -> Option<T>
where
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + Zero,
{
    let t = generators.len();
    let mut acc = T::zero();
    for mask in 1u64..(1u64 << t) {
        let chosen: Vec<&MultiIndex> = (0..t)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| &generators[k])
            .collect();
        let lcm = chosen.iter().skip(1).fold(chosen[0].clone(), |acc, g| {
            MultiIndex::new(
                acc.exponents()
                    .iter()
                    .zip(g.exponents())
                    .map(|(a, b)| *a.max(b))
                    .collect(),
            )
        });
        let value = cone_sum(&lcm)?;
        acc = if chosen.len() % 2 == 1 {
            acc + value
        } else {
            acc - value
        };
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn module(ws: &[i64]) -> WeightedPolydiscModule {
        WeightedPolydiscModule::new(ws.iter().map(|&w| int(w)).collect()).unwrap()
    }

    #[test]
    fn diag_coeff_examples() {
        let hardy = module(&[1, 1]);
        for alpha in MultiIndex::all_up_to(2, 4) {
            assert_eq!(diag_coeff(&hardy, &alpha), int(1));
        }
        let m = module(&[2, 3]);
        assert_eq!(diag_coeff(&m, &MultiIndex::new(vec![1, 1])), int(6));
        assert_eq!(diag_coeff(&m, &MultiIndex::zero(2)), int(1));
    }

    #[test]
    fn rejects_non_positive_weights() {
        assert!(matches!(
            WeightedPolydiscModule::new(vec![int(0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            WeightedPolydiscModule::new(vec![int(1), rat(-1, 2)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inner_products() {
        let z1 = Poly::parse("z1", 2).unwrap();
        let z2 = Poly::parse("z2", 2).unwrap();
        let z1z2 = Poly::parse("z1*z2", 2).unwrap();
        let hardy = module(&[1, 1]);
        assert_eq!(poly_inner(&hardy, &z1, &z2), int(0));
        assert_eq!(poly_inner(&hardy, &z1z2, &z1z2), int(1));
        assert_eq!(poly_inner(&module(&[2, 3]), &z1z2, &z1z2), rat(1, 6));
    }

    #[test]
    fn hardy_principal_coordinate_kernel() {
        let hardy = WeightedPolydiscModule::hardy(2).shared();
        let ideal = IdealSpec::parse(2, &["z1"]).unwrap();
        let k = submodule_kernel(hardy, &ideal, 1).unwrap();
        assert_eq!(k.variant_name(), "diagonal-filtered");
        let z = [rat(1, 2), rat(1, 3)];
        let w = [rat(-1, 4), rat(2, 5)];
        let x1 = &z[0] * &w[0];
        let x2 = &z[1] * &w[1];
        let closed = &x1 / ((int(1) - &x1) * (int(1) - &x2));
        assert_eq!(k.evaluate_exact(&z, &w).unwrap(), closed);
    }

    #[test]
    fn maximal_ideal_at_origin_is_k_minus_one() {
        let hardy = WeightedPolydiscModule::hardy(2).shared();
        let ideal = IdealSpec::parse(2, &["z1", "z2"]).unwrap();
        let k = submodule_kernel(hardy.clone(), &ideal, 1).unwrap();
        let rank_one =
            KernelRep::rank_one_corrected(hardy.clone(), vec![vec![int(0), int(0)]]).unwrap();
        let z = [rat(1, 3), rat(-1, 2)];
        let w = [rat(1, 5), rat(1, 7)];
        let full = ambient_exact(hardy.as_ref(), &z, &w).unwrap();
        assert_eq!(k.evaluate_exact(&z, &w).unwrap(), &full - int(1));
        assert_eq!(rank_one.evaluate_exact(&z, &w).unwrap(), full - int(1));
    }

    #[test]
    fn shifted_point_ideal_uses_rank_one_correction() {
        let hardy = WeightedPolydiscModule::hardy(2).shared();
        let ideal = IdealSpec::parse(2, &["z1 - 1/2", "z2"]).unwrap();
        let k = submodule_kernel(hardy, &ideal, 2).unwrap();
        assert_eq!(k.variant_name(), "rank-one-corrected");
        // vanishes at the correction point
        let a = [rat(1, 2), int(0)];
        assert_eq!(
            k.evaluate_exact(&a, &[rat(1, 3), rat(1, 4)]).unwrap(),
            int(0)
        );
    }

    #[test]
    fn general_ideal_uses_gram_form() {
        let hardy = WeightedPolydiscModule::hardy(2).shared();
        let ideal = IdealSpec::parse(2, &["z1*z2", "z1 - z2"]).unwrap();
        let k = submodule_kernel(hardy.clone(), &ideal, 3).unwrap();
        assert_eq!(k.variant_name(), "gram-form");
        assert!(matches!(
            submodule_kernel(hardy, &ideal, 1),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn filtered_equals_gram_form_for_monomial_ideals() {
        let m = WeightedPolydiscModule::new(vec![rat(1, 2), int(2)])
            .unwrap()
            .shared();
        let ideal = IdealSpec::parse(2, &["z1^2", "z1*z2"]).unwrap();
        let filtered = submodule_kernel(m.clone(), &ideal, 4).unwrap();
        let gram = KernelRep::gram_form(m, &ideal, 4).unwrap();
        let z = [rat(1, 3), rat(-2, 5)];
        let w = [rat(1, 2), rat(1, 7)];
        assert_eq!(
            filtered.evaluate_truncated(&z, &w, 4),
            gram.evaluate_truncated(&z, &w, 4)
        );
    }

    #[test]
    fn remainder_bound_covers_the_tail() {
        let m = module(&[1, 2]);
        let k = submodule_kernel(m.shared(), &IdealSpec::parse(2, &["z1"]).unwrap(), 1).unwrap();
        let z = [rat(1, 2), rat(1, 3)];
        let exact = k.evaluate_exact(&z, &z).unwrap();
        for n in [2, 5, 10] {
            let partial = k.evaluate_truncated(&z, &z, n);
            let bound = k.truncation_remainder_bound(&z, &z, n).unwrap();
            assert!((exact.clone() - partial).abs() <= bound);
        }
    }

    #[test]
    fn principal_factor_recovers_chi() {
        let m = module(&[2, 1]);
        let k = submodule_kernel(m.shared(), &IdealSpec::parse(2, &["z1^2"]).unwrap(), 2).unwrap();
        let chi = k.principal_factor(2).unwrap();
        // c_{(2,0)} = (2)_2 / 2! = 3
        assert_eq!(chi[&MultiIndex::zero(2)], int(3));
        // c_{(3,1)} = (2)_3/3! * 1 = 4
        assert_eq!(chi[&MultiIndex::new(vec![1, 1])], int(4));
    }

    #[test]
    fn floating_matches_exact() {
        let m = module(&[2, 1]);
        let k = submodule_kernel(
            m.shared(),
            &IdealSpec::parse(2, &["z1^2", "z2"]).unwrap(),
            2,
        )
        .unwrap();
        let z = [rat(1, 3), rat(1, 4)];
        let exact = to_f64(&k.evaluate_exact(&z, &z).unwrap());
        let zc: Vec<Complex64> = z.iter().map(|x| Complex64::new(to_f64(x), 0.0)).collect();
        let fl = k.evaluate_f64(&zc, &zc).unwrap();
        assert!((fl.re - exact).abs() < 1e-12 && fl.im.abs() < 1e-12);
    }

    #[test]
    fn custom_diagonal_hook() {
        // Bergman-type weights on the disc: c_n = n + 1
        let custom: Arc<dyn DiagonalKernel> = Arc::new(CustomDiagonal::new(1, |a: &MultiIndex| {
            int(a.get(0) as i64 + 1)
        }));
        let k = submodule_kernel(custom, &IdealSpec::parse(1, &["z1"]).unwrap(), 3).unwrap();
        let z = [rat(1, 2)];
        // sum_{n=1}^{3} (n+1) / 4^n
        assert_eq!(
            k.evaluate_truncated(&z, &z, 3),
            rat(2, 4) + rat(3, 16) + rat(4, 64)
        );
        assert_eq!(k.evaluate_exact(&z, &z), None);
    }
}
