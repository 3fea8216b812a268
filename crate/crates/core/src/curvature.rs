//! Curvature of Hermitian holomorphic bundles given by metric series, the
//! constant gauge action, and a floating finite-difference cross-check.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::rational::to_f64;
use crate::algebra::{QMatrix, Rational, SeriesMatrix, TruncSeries};
use crate::error::{Error, Result};
use crate::frames::MetricSeries;
use crate::ideals::IdealSpec;
use crate::rkhs::{KernelRep, WeightedPolydiscModule};

/// Sign and index conventions carried by every [`CurvatureTensor`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Convention {
    pub curvature: &'static str,
    pub gauge: &'static str,
}

pub const CONVENTION: Convention = Convention {
    curvature: "K_{i jbar} = d_i (H^-1 dbar_j H) at w0; line bundles use +d_i dbar_j log h",
    gauge: "A acts on frames by F -> F A^*, H -> A H A^*, K -> (A^*)^-1 K A^*",
};

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.curvature, self.gauge)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    pub base: Vec<Rational>,
    /// `blocks[i][j]` is `K_{i jbar}`.
    pub blocks: Vec<Vec<QMatrix>>,
    pub convention: Convention,
}

impl CurvatureTensor {
    pub fn pairs(&self) -> usize {
        self.blocks.len()
    }

    pub fn rank(&self) -> usize {
        self.blocks.first().map_or(0, |row| row[0].rows())
    }

    pub fn block(&self, i: usize, j: usize) -> &QMatrix {
        &self.blocks[i][j]
    }

    /// `tr K_{i jbar}` for every pair.
    pub fn trace(&self) -> QMatrix {
        let m = self.pairs();
        QMatrix::from_fn(m, m, |i, j| self.blocks[i][j].trace())
    }

    /// `H(w0) K_{i jbar} = (H(w0) K_{j ibar})^*` for all pairs.
    pub fn is_hermitian_relative_to(&self, h0: &QMatrix) -> bool {
        let m = self.pairs();
        (0..m).all(|i| {
            (0..m).all(|j| h0.mul(&self.blocks[i][j]) == h0.mul(&self.blocks[j][i]).transpose())
        })
    }
}

/// Constant invertible change of frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeMatrix(QMatrix);

impl GaugeMatrix {
    pub fn new(a: QMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "gauge matrix is {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.det().is_zero() {
            return Err(Error::Singular("gauge matrix has zero determinant".into()));
        }
        Ok(GaugeMatrix(a))
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn inverse(&self) -> GaugeMatrix {
        GaugeMatrix(self.0.inverse().expect("checked invertible"))
    }
}

/// `d_i dbar_j log h` at the base point.
pub fn line_curvature(h: &TruncSeries, i: usize, j: usize) -> Result<Rational> {
    if h.constant_term() <= Rational::zero() {
        return Err(Error::Domain(
            "metric must be positive at the base point".into(),
        ));
    }
    h.log()?.series.mixed_hessian(i, j)
}

fn require_positive(metric: &MetricSeries) -> Result<()> {
    if !metric.is_positive_definite_at_base() {
        return Err(Error::Singular(
            "metric is not positive definite at the base point".into(),
        ));
    }
    Ok(())
}

/// `d_i dbar_j log det H` at the base point.
pub fn det_bundle_curvature(metric: &MetricSeries) -> Result<QMatrix> {
    require_positive(metric)?;
    let log_det = metric.matrix.det().log()?.series;
    let m = metric.pairs();
    let mut out = QMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, log_det.mixed_hessian(i, j)?);
        }
    }
    Ok(out)
}

pub fn curvature_matrix(metric: &MetricSeries) -> Result<CurvatureTensor> {
    require_positive(metric)?;
    if metric.degree() < 2 {
        return Err(Error::Truncation(
            "curvature needs truncation degree >= 2".into(),
        ));
    }
    let inv = metric.matrix.inverse()?;
    let m = metric.pairs();
    let mut blocks = vec![Vec::with_capacity(m); m];
    for j in 0..m {
        let dj = metric.matrix.try_map(|s| s.d_wbar(j))?;
        let connection = inv.mul(&dj)?;
        for (i, row) in blocks.iter_mut().enumerate() {
            let t = connection.dim();
            row.push(QMatrix::from_fn(t, t, |a, b| {
                connection.get(a, b).linear_w_coeff(i)
            }));
        }
    }
    Ok(CurvatureTensor {
        base: metric.base.clone(),
        blocks,
        convention: CONVENTION,
    })
}

/// `(A^*)^-1 K A^*` blockwise.
pub fn gauge_conjugate(k: &CurvatureTensor, a: &GaugeMatrix) -> Result<CurvatureTensor> {
    if a.matrix().rows() != k.rank() {
        return Err(Error::Shape(format!(
            "gauge of size {} for rank {}",
            a.matrix().rows(),
            k.rank()
        )));
    }
    let a_star = a.matrix().transpose();
    let a_star_inv = a_star.inverse().expect("checked invertible");
    let blocks = k
        .blocks
        .iter()
        .map(|row| row.iter().map(|b| a_star_inv.mul(b).mul(&a_star)).collect())
        .collect();
    Ok(CurvatureTensor {
        blocks,
        ..k.clone()
    })
}

/// Constant `A` with `gauge_conjugate(k1, A) = k2`, if one exists.
pub fn gauge_equivalent(k1: &CurvatureTensor, k2: &CurvatureTensor) -> Option<GaugeMatrix> {
    if k1.pairs() != k2.pairs() || k1.rank() != k2.rank() || k1.convention != k2.convention {
        return None;
    }
    let t = k1.rank();
    let m = k1.pairs();
    // unknown X = A^*, row-major; K1 X - X K2 = 0 for every block
    let mut rows = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let (p, q) = (k1.block(i, j), k2.block(i, j));
            for r in 0..t {
                for c in 0..t {
                    let mut row = vec![Rational::zero(); t * t];
                    for s in 0..t {
                        row[s * t + c] += p.get(r, s);
                        row[r * t + s] -= q.get(s, c);
                    }
                    rows.push(row);
                }
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..t * t)
            .map(|k| {
                (0..t * t)
                    .map(|l| {
                        if l == k {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        QMatrix::from_rows(rows).nullspace()
    };
    let s = basis.len();
    if s == 0 {
        return None;
    }
    let combine = |coeffs: &[u32]| {
        QMatrix::from_fn(t, t, |r, c| {
            basis
                .iter()
                .zip(coeffs)
                .map(|(b, &k)| &b[r * t + c] * Rational::from_integer(k.into()))
                .sum()
        })
    };
    // det of a generic combination has degree <= t in each coefficient, so
    // some point of the grid {0..=t}^s is a non-root unless det vanishes identically.
    let mut coeffs = vec![0u32; s];
    loop {
        let x = combine(&coeffs);
        if !x.det().is_zero() {
            return GaugeMatrix::new(x.transpose()).ok();
        }
        let mut k = 0;
        loop {
            if k == s {
                return None;
            }
            coeffs[k] += 1;
            if coeffs[k] as usize <= t {
                break;
            }
            coeffs[k] = 0;
            k += 1;
        }
    }
}

/// Floating metric evaluated at a point of the polydisc.
pub trait MetricF64: Sync {
    fn rank(&self) -> usize;
    fn nvars(&self) -> usize;
    /// Row-major `rank x rank` matrix.
    fn metric(&self, w: &[Complex64]) -> Result<Vec<Complex64>>;
}

/// `h(w) = K(w, w)` for a submodule kernel.
pub struct KernelDiagonal<'a> {
    pub kernel: &'a KernelRep,
}

impl MetricF64 for KernelDiagonal<'_> {
    fn rank(&self) -> usize {
        1
    }

    fn nvars(&self) -> usize {
        self.kernel.ambient().dim()
    }

    fn metric(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(vec![self.kernel.evaluate_f64(w, w)?])
    }
}

/// Metric given by a closure.
pub struct ClosedForm<F> {
    pub rank: usize,
    pub nvars: usize,
    pub f: F,
}

impl<F> MetricF64 for ClosedForm<F>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    fn rank(&self) -> usize {
        self.rank
    }

    fn nvars(&self) -> usize {
        self.nvars
    }

    fn metric(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok((self.f)(w))
    }
}

/// Grammian of the split decomposition frames of a monomial ideal, summed
/// directly in floating point over `|alpha - gamma| <= terms`.
pub struct MonomialFrameF64 {
    weights: Vec<f64>,
    generators: Vec<Vec<u32>>,
    terms: u32,
}

impl MonomialFrameF64 {
    pub fn new(module: &WeightedPolydiscModule, generators: Vec<Vec<u32>>, terms: u32) -> Self {
        MonomialFrameF64 {
            weights: module.weights().iter().map(to_f64).collect(),
            generators,
            terms,
        }
    }

    fn coeff(&self, alpha: &[u32]) -> f64 {
        self.weights
            .iter()
            .zip(alpha)
            .map(|(l, &a)| {
                (0..a)
                    .map(|k| (l + k as f64) / (k as f64 + 1.0))
                    .product::<f64>()
            })
            .product()
    }

    fn split(&self, g: &[u32], alpha: &[u32]) -> f64 {
        self.weights
            .iter()
            .zip(g.iter().zip(alpha))
            .map(|(l, (&a, &b))| l * a as f64 * b as f64)
            .sum()
    }
}

fn exponent_vectors(nvars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=max_degree - used).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

fn monomial_f64(z: &[Complex64], e: &[u32]) -> Complex64 {
    z.iter().zip(e).map(|(x, &k)| x.powu(k)).product()
}

impl MetricF64 for MonomialFrameF64 {
    fn rank(&self) -> usize {
        self.generators.len()
    }

    fn nvars(&self) -> usize {
        self.weights.len()
    }

    fn metric(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        let t = self.rank();
        let max_gen = self
            .generators
            .iter()
            .map(|g| g.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        let mut h = vec![Complex64::new(0.0, 0.0); t * t];
        for alpha in exponent_vectors(self.nvars(), max_gen + self.terms) {
            let divides = |g: &Vec<u32>| g.iter().zip(&alpha).all(|(a, b)| a <= b);
            let owners: Vec<usize> = (0..t).filter(|&k| divides(&self.generators[k])).collect();
            if owners.is_empty() {
                continue;
            }
            let total: f64 = owners
                .iter()
                .map(|&k| self.split(&self.generators[k], &alpha))
                .sum();
            let c = self.coeff(&alpha);
            let rest = |k: usize| -> Vec<u32> {
                alpha
                    .iter()
                    .zip(&self.generators[k])
                    .map(|(a, g)| a - g)
                    .collect()
            };
            for &j in &owners {
                for &k in &owners {
                    let sj = self.split(&self.generators[j], &alpha) / total;
                    let sk = self.split(&self.generators[k], &alpha) / total;
                    h[j * t + k] +=
                        sj * sk * c * monomial_f64(w, &rest(j)).conj() * monomial_f64(w, &rest(k));
                }
            }
        }
        Ok(h)
    }
}

/// Closed-form Grammian of the zero-set frames of `<z_k^{i_k}>`:
/// diagonal with entries `c_gamma prod_{i free} (1 - |w_i|^2)^{-lambda_i}`.
pub fn zero_set_metric_f64(
    module: &WeightedPolydiscModule,
    ideal: &IdealSpec,
) -> Result<ClosedForm<impl Fn(&[Complex64]) -> Vec<Complex64> + Sync>> {
    let exps = ideal
        .coordinate_power_exponents()
        .ok_or_else(|| Error::Unsupported(format!("{ideal} is not of the form <z_k^(i_k)>")))?;
    let weights: Vec<f64> = module.weights().iter().map(to_f64).collect();
    let m = weights.len();
    let free: Vec<usize> = (0..m).filter(|i| !exps.contains_key(i)).collect();
    let scales: Vec<f64> = exps
        .iter()
        .map(|(&k, &p)| {
            (0..p)
                .map(|a| (weights[k] + a as f64) / (a as f64 + 1.0))
                .product()
        })
        .collect();
    let t = scales.len();
    Ok(ClosedForm {
        rank: t,
        nvars: m,
        f: move |w: &[Complex64]| {
            let profile: f64 = free
                .iter()
                .map(|&i| (1.0 - w[i].norm_sqr()).powf(-weights[i]))
                .product();
            let mut h = vec![Complex64::new(0.0, 0.0); t * t];
            for (k, s) in scales.iter().enumerate() {
                h[k * t + k] = Complex64::new(s * profile, 0.0);
            }
            h
        },
    })
}

fn det_c64(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
            .expect("non-empty");
        if a[pivot * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= factor * v;
            }
        }
    }
    det
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    pub value: Complex64,
    pub step: f64,
}

/// Central-difference estimate of `d_i dbar_j log det H` at `point`, using
/// `d_i dbar_j = (f_{x_i x_j} + f_{y_i y_j} + i (f_{x_i y_j} - f_{y_i x_j})) / 4`.
/// Differences at steps `h` and `h/2` are Richardson-combined, so the error is
/// `O(h^4)`.
pub fn fd_oracle(
    source: &dyn MetricF64,
    point: &[Complex64],
    i: usize,
    j: usize,
    h: f64,
) -> Result<FdEstimate> {
    let m = source.nvars();
    if point.len() != m || i >= m || j >= m {
        return Err(Error::Shape(format!(
            "point and indices must fit {m} variables"
        )));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Input(
            "finite-difference step must be positive".into(),
        ));
    }
    if point.iter().any(|z| z.norm() + 2.0 * h >= 1.0) {
        return Err(Error::Domain("stencil leaves the open polydisc".into()));
    }
    let coarse = central_estimate(source, point, i, j, h)?;
    let fine = central_estimate(source, point, i, j, h / 2.0)?;
    Ok(FdEstimate {
        value: (fine * 4.0 - coarse) / 3.0,
        step: h,
    })
}

fn central_estimate(
    source: &dyn MetricF64,
    point: &[Complex64],
    i: usize,
    j: usize,
    h: f64,
) -> Result<Complex64> {
    let t = source.rank();
    let f = |shift: &[(usize, Complex64)]| -> Result<f64> {
        let mut w = point.to_vec();
        for &(k, d) in shift {
            w[k] += d;
        }
        let det = det_c64(source.metric(&w)?, t);
        if det.re.is_nan() || det.re <= 0.0 {
            return Err(Error::Singular(
                "metric is not positive definite on the stencil".into(),
            ));
        }
        Ok(det.re.ln())
    };
    let dir = |k: usize, imag: bool, s: f64| {
        (
            k,
            if imag {
                Complex64::new(0.0, s * h)
            } else {
                Complex64::new(s * h, 0.0)
            },
        )
    };
    let second = |a: (usize, bool), b: (usize, bool)| -> Result<f64> {
        if a == b {
            let centre = f(&[])?;
            Ok((f(&[dir(a.0, a.1, 1.0)])? - 2.0 * centre + f(&[dir(a.0, a.1, -1.0)])?) / (h * h))
        } else {
            let pp = f(&[dir(a.0, a.1, 1.0), dir(b.0, b.1, 1.0)])?;
            let pm = f(&[dir(a.0, a.1, 1.0), dir(b.0, b.1, -1.0)])?;
            let mp = f(&[dir(a.0, a.1, -1.0), dir(b.0, b.1, 1.0)])?;
            let mm = f(&[dir(a.0, a.1, -1.0), dir(b.0, b.1, -1.0)])?;
            Ok((pp - pm - mp + mm) / (4.0 * h * h))
        }
    };
    let re = (second((i, false), (j, false))? + second((i, true), (j, true))?) / 4.0;
    let im = if i == j {
        0.0
    } else {
        (second((i, false), (j, true))? - second((i, true), (j, false))?) / 4.0
    };
    Ok(Complex64::new(re, im))
}

/// Metric for a constant-free rank-one bundle `h`, as a 1x1 metric series.
pub fn line_metric(h: TruncSeries, base: Vec<Rational>) -> Result<MetricSeries> {
    Ok(MetricSeries::new(SeriesMatrix::new(1, vec![h])?, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::frames::{decompose_coordinate_ideal, grammian};

    fn lambda_mu(l: Rational, mu: Rational) -> MetricSeries {
        let module = WeightedPolydiscModule::new(vec![l, mu]).unwrap();
        grammian(&decompose_coordinate_ideal(&module, 2, 4).unwrap()).unwrap()
    }

    #[test]
    fn det_bundle_on_bidisc() {
        let k = det_bundle_curvature(&lambda_mu(int(1), int(1))).unwrap();
        assert_eq!(
            (k.get(0, 0).clone(), k.get(1, 1).clone()),
            (rat(5, 4), rat(5, 4))
        );
        let k = det_bundle_curvature(&lambda_mu(int(1), int(2))).unwrap();
        assert_eq!(
            (k.get(0, 0).clone(), k.get(1, 1).clone()),
            (rat(13, 9), rat(31, 18))
        );
        assert!(k.get(0, 1).is_zero());
    }

    #[test]
    fn trace_and_hermitian_relation() {
        let h = lambda_mu(rat(3, 2), int(2));
        let k = curvature_matrix(&h).unwrap();
        assert_eq!(k.trace(), det_bundle_curvature(&h).unwrap());
        assert!(k.is_hermitian_relative_to(&h.at_base()));
    }

    #[test]
    fn line_curvature_rejects_nonpositive() {
        let h = TruncSeries::constant(1, 2, int(-1));
        assert!(matches!(line_curvature(&h, 0, 0), Err(Error::Domain(_))));
        assert_eq!(
            line_curvature(&TruncSeries::constant(1, 2, int(3)), 0, 0).unwrap(),
            int(0)
        );
    }

    #[test]
    fn gauge_round_trip() {
        let h = lambda_mu(int(1), int(2));
        let k = curvature_matrix(&h).unwrap();
        let a = GaugeMatrix::new(QMatrix::from_rows(vec![
            vec![int(1), int(2)],
            vec![int(0), int(3)],
        ]))
        .unwrap();
        let k2 = gauge_conjugate(&k, &a).unwrap();
        assert_eq!(gauge_conjugate(&k2, &a.inverse()).unwrap(), k);
        let witness = gauge_equivalent(&k, &k2).unwrap();
        assert_eq!(gauge_conjugate(&k, &witness).unwrap(), k2);
        assert_eq!(
            curvature_matrix(&h.congruence(a.matrix()).unwrap()).unwrap(),
            k2
        );
    }

    #[test]
    fn singular_gauge_rejected() {
        let a = QMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert!(matches!(GaugeMatrix::new(a), Err(Error::Singular(_))));
    }

    #[test]
    fn fd_matches_bidisc_value() {
        let module = WeightedPolydiscModule::new(vec![int(1), int(2)]).unwrap();
        let src = MonomialFrameF64::new(&module, vec![vec![1, 0], vec![0, 1]], 8);
        let zero = [Complex64::new(0.0, 0.0); 2];
        let est = fd_oracle(&src, &zero, 0, 0, 1e-3).unwrap();
        assert!((est.value.re - 13.0 / 9.0).abs() < 1e-6, "{est:?}");
    }
}
