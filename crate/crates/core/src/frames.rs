//! Kernel decomposition frames `K_M(., u) = sum_j conj(p_j(u)) F^j(u)` for
//! monomial ideals, and the Grammian metric `H_jk = <F^j, F^k>` as a series in
//! the displacement `(w, w̄)` from a base point.
//!
//! Every frame vector is anti-holomorphic in `u`, so its coefficient series
//! involve only `w̄`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::rational::{inside_unit_disc, int, pow_int, rising_over_factorial};
use crate::algebra::{MultiIndex, QMatrix, Rational, SeriesMatrix, TruncSeries};
use crate::error::{Error, Result};
use crate::ideals::IdealSpec;
use crate::rkhs::{diag_coeff, WeightedPolydiscModule};

/// How a kernel monomial shared by several generators is split between them.
pub const SPLIT_RULE: &str =
    "s_k(alpha) = w_k(alpha) / sum_{g | alpha} w_g(alpha), w_g(alpha) = sum_i lambda_i gamma_{g,i} alpha_i";

/// Default truncation degree for frame and metric series.
pub const DEFAULT_DEGREE: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameVector {
    /// z-monomial -> coefficient series in the displacement.
    Expanded(BTreeMap<MultiIndex, TruncSeries>),
    /// `scale * z^monomial * prod_{i free} (1 - z_i w̄_i)^{-lambda_i}` at
    /// `w = base + displacement`.
    ProductKernel {
        scale: Rational,
        monomial: MultiIndex,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSeries {
    module: WeightedPolydiscModule,
    generators: Vec<MultiIndex>,
    vectors: Vec<FrameVector>,
    base: Vec<Rational>,
    /// Coordinates allowed to move away from the base point.
    free: Vec<bool>,
    degree: u32,
    split_rule: Option<&'static str>,
}

/// Grammian metric with a dropped positive constant factor:
/// the metric is `prod base^exponent * matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSeries {
    pub matrix: SeriesMatrix,
    pub base: Vec<Rational>,
    pub scale: Vec<(Rational, Rational)>,
}

impl MetricSeries {
    pub fn new(matrix: SeriesMatrix, base: Vec<Rational>) -> Self {
        MetricSeries {
            matrix,
            base,
            scale: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn degree(&self) -> u32 {
        self.matrix.degree()
    }

    pub fn pairs(&self) -> usize {
        self.matrix.pairs()
    }

    /// The dropped constant when it is rational.
    pub fn scale_value(&self) -> Option<Rational> {
        self.scale
            .iter()
            .map(|(b, e)| {
                if e.is_integer() {
                    pow_int(b, num_traits::ToPrimitive::to_i64(&e.to_integer())?).ok()
                } else if b.is_one() {
                    Some(Rational::one())
                } else {
                    None
                }
            })
            .product()
    }

    /// `H(w0)` up to the dropped constant.
    pub fn at_base(&self) -> QMatrix {
        self.matrix.at_origin()
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix.is_hermitian()
    }

    pub fn is_positive_definite_at_base(&self) -> bool {
        self.at_base().is_positive_definite()
    }

    /// `A H A^*`: the metric of the frame `F A^*`.
    pub fn congruence(&self, a: &QMatrix) -> Result<MetricSeries> {
        if a.rows() != self.dim() || !a.is_square() {
            return Err(Error::Shape(format!(
                "gauge of size {} for a rank {} metric",
                a.rows(),
                self.dim()
            )));
        }
        let (p, d) = (self.pairs(), self.degree());
        let left = SeriesMatrix::from_constant(a, p, d)?;
        let right = SeriesMatrix::from_constant(&a.transpose(), p, d)?;
        Ok(MetricSeries {
            matrix: left.mul(&self.matrix)?.mul(&right)?,
            base: self.base.clone(),
            scale: self.scale.clone(),
        })
    }
}

fn split_weight(
    module: &WeightedPolydiscModule,
    gamma: &MultiIndex,
    alpha: &MultiIndex,
) -> Rational {
    (0..alpha.nvars())
        .map(|i| module.weight(i) * int(gamma.get(i) as i64) * int(alpha.get(i) as i64))
        .sum()
}

/// Frames at the origin for `<z_1, ..., z_t>`, every monomial of `K_M` split by
/// `s_k(alpha) = lambda_k alpha_k / sum_{j <= t} lambda_j alpha_j`.
pub fn decompose_coordinate_ideal(
    module: &WeightedPolydiscModule,
    t: usize,
    degree: u32,
) -> Result<FrameSeries> {
    let m = module.weights().len();
    if t == 0 || t > m {
        return Err(Error::Input(format!(
            "need 1 <= t <= {m} generators, got {t}"
        )));
    }
    let gens: Vec<MultiIndex> = (0..t).map(|k| MultiIndex::unit(m, k)).collect();
    decompose_monomial_ideal(module, &gens, degree)
}

/// Frames at the origin for an ideal generated by monomials `z^gamma_k`.
pub fn decompose_monomial_ideal(
    module: &WeightedPolydiscModule,
    generators: &[MultiIndex],
    degree: u32,
) -> Result<FrameSeries> {
    let m = module.weights().len();
    if generators.is_empty() {
        return Err(Error::Input("at least one generator is required".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.nvars() != m || g.is_zero()) {
        return Err(Error::Input(format!(
            "generator exponent {g} is invalid for {m} variables"
        )));
    }
    let vectors = generators
        .iter()
        .map(|gamma| {
            let mut map = BTreeMap::new();
            for beta in MultiIndex::all_up_to(m, degree) {
                let alpha = gamma.add(&beta);
                let total: Rational = generators
                    .iter()
                    .filter(|g| alpha.divisible_by(g))
                    .map(|g| split_weight(module, g, &alpha))
                    .sum();
                let share = split_weight(module, gamma, &alpha) / total;
                let c = share * diag_coeff(module, &alpha);
                let series = TruncSeries::monomial(m, degree, &vec![0; m], beta.exponents(), c);
                if !series.is_zero() {
                    map.insert(alpha, series);
                }
            }
            FrameVector::Expanded(map)
        })
        .collect();
    Ok(FrameSeries {
        module: module.clone(),
        generators: generators.to_vec(),
        vectors,
        base: vec![Rational::zero(); m],
        free: vec![true; m],
        degree,
        split_rule: Some(SPLIT_RULE),
    })
}

/// Closed-form frames on `V = {z_k = 0, k in S}` for `<z_k^{i_k} : k in S>`:
/// `F_k = (lambda_k)_{i_k} / i_k! * z_k^{i_k} * prod_{i not in S} (1 - z_i w̄_i)^{-lambda_i}`.
pub fn frame_on_zero_set(
    module: &WeightedPolydiscModule,
    ideal: &IdealSpec,
    point: &[Rational],
    degree: u32,
) -> Result<FrameSeries> {
    let m = module.weights().len();
    if ideal.nvars() != m || point.len() != m {
        return Err(Error::Shape(format!("module has {m} variables")));
    }
    let exps = ideal
        .coordinate_power_exponents()
        .ok_or_else(|| Error::Unsupported(format!("{ideal} is not of the form <z_k^(i_k)>")))?;
    if let Some(k) = exps.keys().find(|&&k| !point[k].is_zero()) {
        return Err(Error::Input(format!(
            "point is not on the zero set: z{} != 0",
            k + 1
        )));
    }
    if !point.iter().all(inside_unit_disc) {
        return Err(Error::Domain("point must lie in the open polydisc".into()));
    }
    let free: Vec<bool> = (0..m).map(|i| !exps.contains_key(&i)).collect();
    let generators: Vec<MultiIndex> = ideal.monomial_exponents().expect("monomial ideal");
    let at_slice_origin = point.iter().all(Zero::is_zero);
    let vectors = generators
        .iter()
        .map(|gamma| {
            let scale = diag_coeff(module, gamma);
            if !at_slice_origin {
                return FrameVector::ProductKernel {
                    scale,
                    monomial: gamma.clone(),
                };
            }
            let mut map = BTreeMap::new();
            for beta in MultiIndex::all_up_to(m, degree) {
                if beta.support().iter().any(|&i| !free[i]) {
                    continue;
                }
                let c = &scale * diag_coeff(module, &beta);
                map.insert(
                    gamma.add(&beta),
                    TruncSeries::monomial(m, degree, &vec![0; m], beta.exponents(), c),
                );
            }
            FrameVector::Expanded(map)
        })
        .collect();
    Ok(FrameSeries {
        module: module.clone(),
        generators,
        vectors,
        base: point.to_vec(),
        free,
        degree,
        split_rule: None,
    })
}

impl FrameSeries {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn module(&self) -> &WeightedPolydiscModule {
        &self.module
    }

    pub fn generators(&self) -> &[MultiIndex] {
        &self.generators
    }

    pub fn vectors(&self) -> &[FrameVector] {
        &self.vectors
    }

    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.free.len()).filter(|&i| self.free[i]).collect()
    }

    /// Splitting convention, if the frame depends on one.
    pub fn split_rule(&self) -> Option<&'static str> {
        self.split_rule
    }

    fn pairs(&self) -> usize {
        self.base.len()
    }

    /// `conj(u_i)` as a series: `x_i + w̄_i` on free coordinates, `x_i` otherwise.
    fn conj_point(&self, i: usize) -> TruncSeries {
        let (m, d) = (self.pairs(), self.degree);
        let c = TruncSeries::constant(m, d, self.base[i].clone());
        if self.free[i] {
            c.add(&TruncSeries::wbar(m, d, i)).expect("same shape")
        } else {
            c
        }
    }

    fn conj_monomial(&self, alpha: &MultiIndex) -> TruncSeries {
        let mut acc = TruncSeries::one(self.pairs(), self.degree);
        for (i, &k) in alpha.exponents().iter().enumerate() {
            if k > 0 {
                acc = acc
                    .mul(&self.conj_point(i).pow(k).expect("same shape"))
                    .expect("same shape");
            }
        }
        acc
    }

    /// Coefficient of `z^alpha` in `F^k` as a series in the displacement.
    pub fn coefficient(&self, k: usize, alpha: &MultiIndex) -> TruncSeries {
        match &self.vectors[k] {
            FrameVector::Expanded(map) => map
                .get(alpha)
                .cloned()
                .unwrap_or_else(|| TruncSeries::zero(self.pairs(), self.degree)),
            FrameVector::ProductKernel { scale, monomial } => match alpha.checked_sub(monomial) {
                Some(beta) if beta.support().iter().all(|&i| self.free[i]) => {
                    let c = scale * diag_coeff(&self.module, &beta);
                    self.conj_monomial(&beta).scale(&c)
                }
                _ => TruncSeries::zero(self.pairs(), self.degree),
            },
        }
    }

    /// Coefficient of `z^alpha` in `F^k(base + displacement)`.
    pub fn coefficient_at(
        &self,
        k: usize,
        alpha: &MultiIndex,
        displacement: &[Rational],
    ) -> Rational {
        self.coefficient(k, alpha).eval(displacement, displacement)
    }

    /// Coefficient map of `F^k(base)` over monomials of degree `<= zdeg`.
    pub fn vector_at_base(&self, k: usize, zdeg: u32) -> BTreeMap<MultiIndex, Rational> {
        MultiIndex::all_up_to(self.pairs(), zdeg)
            .into_iter()
            .filter_map(|alpha| {
                let c = self.coefficient(k, &alpha).constant_term();
                (!c.is_zero()).then_some((alpha, c))
            })
            .collect()
    }

    fn in_submodule(&self, alpha: &MultiIndex) -> bool {
        self.generators.iter().any(|g| alpha.divisible_by(g))
    }

    /// Nonzero coefficients of `sum_j conj(p_j(u)) F^j(u) - K_M(., u)` over
    /// z-monomials of degree `<= zdeg`, each a series in the displacement.
    pub fn reconstruction_residual(&self, zdeg: u32) -> Vec<(MultiIndex, TruncSeries)> {
        let p_bar: Vec<TruncSeries> = self
            .generators
            .iter()
            .map(|g| self.conj_monomial(g))
            .collect();
        MultiIndex::all_up_to(self.pairs(), zdeg)
            .into_iter()
            .filter_map(|alpha| {
                let mut acc = TruncSeries::zero(self.pairs(), self.degree);
                for (k, pb) in p_bar.iter().enumerate() {
                    let f = self.coefficient(k, &alpha);
                    if !f.is_zero() {
                        acc = acc
                            .add(&pb.mul(&f).expect("same shape"))
                            .expect("same shape");
                    }
                }
                if self.in_submodule(&alpha) {
                    let kernel_term = self
                        .conj_monomial(&alpha)
                        .scale(&diag_coeff(&self.module, &alpha));
                    acc = acc.sub(&kernel_term).expect("same shape");
                }
                (!acc.is_zero()).then_some((alpha, acc))
            })
            .collect()
    }

    /// Whether `P_M M_{z_i}^* F^k(base) = conj(base_i) F^k(base)` holds on all
    /// monomials of degree `< zdeg`.
    pub fn is_adjoint_eigenvector(&self, k: usize, i: usize, zdeg: u32) -> bool {
        let v = self.vector_at_base(k, zdeg);
        let mut lowered: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (alpha, c) in &v {
            if alpha.get(i) == 0 {
                continue;
            }
            let beta = alpha.with(i, alpha.get(i) - 1);
            if !self.in_submodule(&beta) {
                continue;
            }
            let factor = diag_coeff(&self.module, &beta) / diag_coeff(&self.module, alpha);
            *lowered.entry(beta).or_insert_with(Rational::zero) += c * factor;
        }
        lowered.retain(|_, c| !c.is_zero());
        let expected: BTreeMap<MultiIndex, Rational> = v
            .iter()
            .filter(|(alpha, _)| alpha.degree() < zdeg)
            .map(|(alpha, c)| (alpha.clone(), c * &self.base[i]))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let lowered: BTreeMap<MultiIndex, Rational> = lowered
            .into_iter()
            .filter(|(alpha, _)| alpha.degree() < zdeg)
            .collect();
        lowered == expected
    }

    /// Frame with the listed coordinates pinned at zero (restriction to a
    /// coordinate slice through the origin).
    pub fn restrict_to_slice(&self, coords: &[usize]) -> Result<FrameSeries> {
        if let Some(&i) = coords.iter().find(|&&i| !self.base[i].is_zero()) {
            return Err(Error::Input(format!("base point has z{} != 0", i + 1)));
        }
        let vectors = self
            .vectors
            .iter()
            .map(|v| match v {
                FrameVector::Expanded(map) => FrameVector::Expanded(
                    map.iter()
                        .map(|(a, s)| (a.clone(), s.restrict_to_zero(coords)))
                        .filter(|(_, s)| !s.is_zero())
                        .collect(),
                ),
                other => other.clone(),
            })
            .collect();
        let mut free = self.free.clone();
        for &i in coords {
            free[i] = false;
        }
        Ok(FrameSeries {
            vectors,
            free,
            ..self.clone()
        })
    }
}

/// `H_jk = <F^j, F^k>` computed from monomial orthogonality.
pub fn grammian(frame: &FrameSeries) -> Result<MetricSeries> {
    let t = frame.rank();
    let (m, d) = (frame.pairs(), frame.degree);
    let product_kernel = frame
        .vectors
        .iter()
        .all(|v| matches!(v, FrameVector::ProductKernel { .. }));
    let expanded = frame
        .vectors
        .iter()
        .all(|v| matches!(v, FrameVector::Expanded(_)));
    let metric = if expanded {
        let matrix = SeriesMatrix::from_fn(t, |j, k| {
            let (FrameVector::Expanded(a), FrameVector::Expanded(b)) =
                (&frame.vectors[j], &frame.vectors[k])
            else {
                unreachable!()
            };
            let mut acc = TruncSeries::zero(m, d);
            for (alpha, fa) in a {
                if let Some(fb) = b.get(alpha) {
                    let term = fa.mul(&fb.conjugate()).expect("same shape");
                    acc = acc
                        .add(&term.scale(&diag_coeff(&frame.module, alpha).recip()))
                        .expect("same shape");
                }
            }
            acc
        })?;
        MetricSeries::new(matrix, frame.base.clone())
    } else if product_kernel {
        // prod_i (1 - |x_i + d_i|^2)^{-lambda_i}
        //   = prod_i (1 - x_i^2)^{-lambda_i} (1 - u_i)^{-lambda_i},
        // u_i = (x_i w_i + x_i w̄_i + w_i w̄_i) / (1 - x_i^2)
        let mut profile = TruncSeries::one(m, d);
        let mut scale = Vec::new();
        for i in frame.free_coordinates() {
            let x = &frame.base[i];
            let lambda = frame.module.weight(i);
            let rest = Rational::one() - x * x;
            let u = TruncSeries::w(m, d, i)
                .scale(x)
                .add(&TruncSeries::wbar(m, d, i).scale(x))?
                .add(&TruncSeries::w(m, d, i).mul(&TruncSeries::wbar(m, d, i))?)?
                .scale(&rest.recip());
            let mut factor = TruncSeries::zero(m, d);
            let mut power = TruncSeries::one(m, d);
            for n in 0..=d {
                factor = factor.add(&power.scale(&rising_over_factorial(lambda, n)))?;
                power = power.mul(&u)?;
            }
            profile = profile.mul(&factor)?;
            if !x.is_zero() {
                scale.push((rest, -lambda.clone()));
            }
        }
        let matrix = SeriesMatrix::from_fn(t, |j, k| {
            let (
                FrameVector::ProductKernel {
                    scale: sj,
                    monomial: gj,
                },
                FrameVector::ProductKernel {
                    scale: sk,
                    monomial: gk,
                },
            ) = (&frame.vectors[j], &frame.vectors[k])
            else {
                unreachable!()
            };
            if gj == gk {
                profile.scale(&(sj * sk / diag_coeff(&frame.module, gj)))
            } else {
                TruncSeries::zero(m, d)
            }
        })?;
        MetricSeries {
            matrix,
            base: frame.base.clone(),
            scale,
        }
    } else {
        return Err(Error::Unsupported(
            "frame mixes vector representations".into(),
        ));
    };
    if !metric.is_positive_definite_at_base() {
        return Err(Error::Degenerate(
            "frame vectors are linearly dependent at the base point".into(),
        ));
    }
    Ok(metric)
}
