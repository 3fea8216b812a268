//! Rigidity decisions for weighted polydisc submodules: the two-weight
//! determinant-bundle pair and its cubic, the principal ideal `<z_1^p>`, and
//! coordinate-power ideals on the polydisc.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::rational::{format_rational, int, is_positive, pochhammer};
use crate::algebra::{MultiIndex, Rational};
use crate::curvature::line_curvature;
use crate::error::{Error, Result};
use crate::frames::{frame_on_zero_set, grammian};
use crate::ideals::IdealSpec;
use crate::rkhs::WeightedPolydiscModule;

/// Dense univariate polynomial over the rationals, coefficients from the
/// constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }

    /// Remainder of division by a nonzero `d`.
    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r.last().expect("non-empty") / &lead;
            for (k, c) in d.0.iter().enumerate() {
                r[shift + k] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UniPoly::new(r)
    }

    /// `p, p', -rem(p, p'), ...` down to the last nonzero remainder.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut next = self.derivative();
        while !next.is_zero() {
            let r = seq.last().expect("non-empty").rem(&next).neg();
            seq.push(next);
            next = r;
        }
        seq
    }

    /// Cauchy bound: every root has modulus below it.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let max = self.0[..self.0.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        Rational::one() + max
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let body = match k {
                0 => format_rational(&a),
                _ if a.is_one() => String::new(),
                _ => format!("{}*", format_rational(&a)),
            };
            match k {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}x")?,
                _ => write!(f, "{body}x^{k}")?,
            }
        }
        Ok(())
    }
}

fn sign_changes(seq: &[UniPoly], x: Option<&Rational>) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .filter_map(|p| {
            let v = match x {
                Some(x) => p.eval(x),
                None => p.leading(),
            };
            (!v.is_zero()).then(|| v.is_positive())
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct roots in `(a, b]`; `None` for `b` stands for `+infinity`.
pub fn count_roots(seq: &[UniPoly], a: &Rational, b: Option<&Rational>) -> usize {
    sign_changes(seq, Some(a)) - sign_changes(seq, b)
}

/// Disjoint intervals `(lo, hi]`, each holding one positive root, of width at
/// most `width`.
pub fn isolate_positive_roots(p: &UniPoly, width: &Rational) -> Vec<(Rational, Rational)> {
    let seq = p.sturm_sequence();
    let mut out = Vec::new();
    let mut stack = vec![(Rational::zero(), p.root_bound())];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&seq, &lo, Some(&hi)) {
            0 => {}
            1 if &hi - &lo <= *width => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / int(2);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort();
    out
}

/// `(kappa_1, kappa_2)`: the determinant-bundle curvature of `<z_1, z_2>` in
/// the two-weight bidisc module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaMuInvariant {
    pub kappa1: Rational,
    pub kappa2: Rational,
}

impl LambdaMuInvariant {
    /// `(kappa_1 - 1/2) / (kappa_2 - 1/2)`, the parameter of the cubic
    /// satisfied by `lambda / mu`.
    pub fn alpha(&self) -> Rational {
        let half = Rational::new(1.into(), 2.into());
        (&self.kappa1 - &half) / (&self.kappa2 - half)
    }
}

pub fn lambda_mu_invariants(lambda: &Rational, mu: &Rational) -> Result<LambdaMuInvariant> {
    if !is_positive(lambda) || !is_positive(mu) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let s2 = (lambda + mu) * (lambda + mu);
    let two = int(2);
    Ok(LambdaMuInvariant {
        kappa1: (lambda + Rational::one()) / &two + lambda * mu * mu / &s2,
        kappa2: (mu + Rational::one()) / &two + lambda * lambda * mu / &s2,
    })
}

pub fn lambda_mu_equivalent(
    lambda: &Rational,
    mu: &Rational,
    lambda2: &Rational,
    mu2: &Rational,
) -> Result<bool> {
    Ok(lambda_mu_invariants(lambda, mu)? == lambda_mu_invariants(lambda2, mu2)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicReport {
    pub alpha: Rational,
    /// Leading coefficient first.
    pub coefficients: [Rational; 4],
    pub positive_roots: usize,
    pub intervals: Vec<(Rational, Rational)>,
}

impl CubicReport {
    pub fn polynomial(&self) -> UniPoly {
        UniPoly::new(self.coefficients.iter().rev().cloned().collect())
    }
}

/// `x^3 - (3a - 2) x^2 - (2a - 3) x - a`.
pub fn cubic(alpha: &Rational) -> UniPoly {
    UniPoly::new(vec![
        -alpha.clone(),
        -(alpha * int(2) - int(3)),
        -(alpha * int(3) - int(2)),
        Rational::one(),
    ])
}

/// Isolating intervals are refined to width at most `1/64`.
pub fn cubic_positive_roots(alpha: &Rational) -> Result<CubicReport> {
    if !is_positive(alpha) {
        return Err(Error::Domain("alpha must be positive".into()));
    }
    let p = cubic(alpha);
    let seq = p.sturm_sequence();
    let positive_roots = count_roots(&seq, &Rational::zero(), None);
    let intervals = isolate_positive_roots(&p, &Rational::new(1.into(), 64.into()));
    let c = p.coeffs();
    Ok(CubicReport {
        alpha: alpha.clone(),
        coefficients: [c[3].clone(), c[2].clone(), c[1].clone(), c[0].clone()],
        positive_roots,
        intervals,
    })
}

fn positive_all(ws: &[&Rational]) -> Result<()> {
    if ws.iter().all(|w| is_positive(w)) {
        Ok(())
    } else {
        Err(Error::Domain("weights must be positive".into()))
    }
}

/// `mu (lambda)_p = mu' (lambda')_p` and `mu (lambda)_{p+1} = mu' (lambda')_{p+1}`.
pub fn principal_rigidity(
    lambda: &Rational,
    mu: &Rational,
    p: u32,
    lambda2: &Rational,
    mu2: &Rational,
) -> Result<bool> {
    positive_all(&[lambda, mu, lambda2, mu2])?;
    if p == 0 {
        return Err(Error::Input("power p must be at least 1".into()));
    }
    Ok((0..2).all(|s| mu * pochhammer(lambda, p + s) == mu2 * pochhammer(lambda2, p + s)))
}

/// Both readings of the frame curvature of `<z_1^p>` in `H^(lambda, mu)` at
/// the origin of its zero set, computed through the frame pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalCurvatures {
    /// `d_2 dbar_2 ||F_1||^2` at `w_2 = 0`.
    pub plain: Rational,
    /// `d_2 dbar_2 log ||F_1||^2` at `w_2 = 0`.
    pub log: Rational,
}

pub fn principal_frame_curvatures(
    lambda: &Rational,
    mu: &Rational,
    p: u32,
) -> Result<PrincipalCurvatures> {
    let module = WeightedPolydiscModule::new(vec![lambda.clone(), mu.clone()])?;
    let ideal = IdealSpec::coordinate_powers(2, &[p, 0])?;
    coordinate_power_curvatures(&module, &ideal, 1)
        .map(|v| v.into_iter().next().expect("one generator"))
}

/// For each generator of `<z_k^{i_k}>`, both readings of `d_f dbar_f` of the
/// frame norm at the origin of the zero set, `f` a free coordinate.
fn coordinate_power_curvatures(
    module: &WeightedPolydiscModule,
    ideal: &IdealSpec,
    free: usize,
) -> Result<Vec<PrincipalCurvatures>> {
    let origin = vec![Rational::zero(); module.weights().len()];
    let metric = grammian(&frame_on_zero_set(module, ideal, &origin, 2)?)?;
    (0..metric.dim())
        .map(|k| {
            let h = metric.matrix.get(k, k);
            Ok(PrincipalCurvatures {
                plain: h.mixed_hessian(free, free)?,
                log: line_curvature(h, free, free)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPair {
    pub name: String,
    pub left: Rational,
    pub right: Rational,
}

impl InvariantPair {
    pub fn agrees(&self) -> bool {
        self.left == self.right
    }
}

/// Outcome of the polydisc rigidity battery with every invariant compared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub equivalent: bool,
    pub invariants: Vec<InvariantPair>,
}

/// Compares `H^lambda` and `H^lambda'` restricted to `<z_k^{i_k}>`:
/// log curvatures of the zero-set frames along every free coordinate, then
/// `d_f dbar_f ||F_k||^2` for the ideal and for the ideal with `i_k` raised by
/// one, `f` the first free coordinate.
pub fn polydisc_rigidity(
    weights: &[Rational],
    ideal: &IdealSpec,
    weights2: &[Rational],
) -> Result<RigidityReport> {
    let m = weights.len();
    if weights2.len() != m || ideal.nvars() != m {
        return Err(Error::Shape(format!("expected {m} weights on both sides")));
    }
    let exps = ideal
        .coordinate_power_exponents()
        .ok_or_else(|| Error::Unsupported(format!("{ideal} is not of the form <z_k^(i_k)>")))?;
    let free: Vec<usize> = (0..m).filter(|i| !exps.contains_key(i)).collect();
    let Some(&transverse) = free.first() else {
        return Err(Error::Input(
            "the ideal must leave at least one coordinate free".into(),
        ));
    };
    let left = WeightedPolydiscModule::new(weights.to_vec())?;
    let right = WeightedPolydiscModule::new(weights2.to_vec())?;
    let origin = vec![Rational::zero(); m];
    let generators: Vec<MultiIndex> = ideal.monomial_exponents().expect("monomial ideal");
    let mut invariants = Vec::new();

    let metric_l = grammian(&frame_on_zero_set(&left, ideal, &origin, 2)?)?;
    let metric_r = grammian(&frame_on_zero_set(&right, ideal, &origin, 2)?)?;
    for &f in &free {
        invariants.push(InvariantPair {
            name: format!("d{0} dbar{0} log ||F_1||^2 along V", f + 1),
            left: line_curvature(metric_l.matrix.get(0, 0), f, f)?,
            right: line_curvature(metric_r.matrix.get(0, 0), f, f)?,
        });
    }
    for (k, gamma) in generators.iter().enumerate() {
        let (coord, power) = exps
            .iter()
            .find(|(c, _)| gamma.get(**c) > 0)
            .map(|(c, p)| (*c, *p))
            .expect("coordinate power");
        let mut raised: Vec<u32> = (0..m).map(|i| exps.get(&i).copied().unwrap_or(0)).collect();
        raised[coord] += 1;
        let shifted = IdealSpec::coordinate_powers(m, &raised)?;
        let shifted_k = shifted
            .monomial_exponents()
            .expect("monomial ideal")
            .iter()
            .position(|g| g.get(coord) > 0)
            .expect("raised generator");
        for (label, id, idx, p) in [
            ("", ideal, k, power),
            (" (raised)", &shifted, shifted_k, power + 1),
        ] {
            let l = coordinate_power_curvatures(&left, id, transverse)?;
            let r = coordinate_power_curvatures(&right, id, transverse)?;
            invariants.push(InvariantPair {
                name: format!(
                    "d{0} dbar{0} ||F||^2 for z{1}^{2}{3}",
                    transverse + 1,
                    coord + 1,
                    p,
                    label
                ),
                left: l[idx].plain.clone(),
                right: r[idx].plain.clone(),
            });
        }
    }
    Ok(RigidityReport {
        equivalent: invariants.iter().all(InvariantPair::agrees),
        invariants,
    })
}
