//! Ideal descriptions, their zero sets inside the polydisc, the codimension
//! test for minimal generating sets, and the localization dimension
//! `dim I_w / m_w I_w`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{MultiIndex, Poly, QMatrix, Rational};
use crate::error::{Error, Result};

/// Name under which `<z1*z2, z1 - z2>` is catalogued.
pub const CATALOGUE_Z1Z2_DIFF: &str = "z1*z2, z1 - z2";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Every generator is a single monomial.
    Monomial,
    /// Every generator is affine-linear, so the ideal vanishes on an affine
    /// subspace (a single point when the linear parts span).
    CoordinateVanishing,
    /// A named ideal whose zero set is known in closed form.
    Catalogued(String),
    General,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Monomial => write!(f, "monomial"),
            Family::CoordinateVanishing => write!(f, "coordinate-vanishing"),
            Family::Catalogued(name) => write!(f, "catalogued({name})"),
            Family::General => write!(f, "general"),
        }
    }
}

/// Zero variety of an ideal. Coordinate indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroSetDescriptor {
    /// `{z : z_i = 0 for i in S}`
    CoordinateSubspace(BTreeSet<usize>),
    Point(Vec<Rational>),
    /// `base + span(directions)` with `directions` linearly independent.
    AffineSubspace {
        base: Vec<Rational>,
        directions: Vec<Vec<Rational>>,
        nvars: usize,
    },
    /// Union of coordinate subspaces (zero set of a general monomial ideal).
    CoordinateUnion(Vec<BTreeSet<usize>>),
    /// Sample points and a codimension supplied by the caller; not verified
    /// beyond checking that the samples are zeros of the generators.
    UserParametrized {
        samples: Vec<Vec<Rational>>,
        codim: usize,
    },
    Empty,
}

impl ZeroSetDescriptor {
    /// Codimension in `C^m`; `None` for the empty set.
    pub fn codim(&self, nvars: usize) -> Option<usize> {
        match self {
            ZeroSetDescriptor::CoordinateSubspace(s) => Some(s.len()),
            ZeroSetDescriptor::Point(_) => Some(nvars),
            ZeroSetDescriptor::AffineSubspace {
                directions, nvars, ..
            } => Some(nvars - directions.len()),
            ZeroSetDescriptor::CoordinateUnion(parts) => parts.iter().map(BTreeSet::len).min(),
            ZeroSetDescriptor::UserParametrized { codim, .. } => Some(*codim),
            ZeroSetDescriptor::Empty => None,
        }
    }

    /// Whether the descriptor's claims rest on caller input.
    pub fn is_conditional(&self) -> bool {
        matches!(self, ZeroSetDescriptor::UserParametrized { .. })
    }

    /// Exact membership test for descriptors that determine the set.
    pub fn contains(&self, point: &[Rational]) -> Option<bool> {
        match self {
            ZeroSetDescriptor::CoordinateSubspace(s) => Some(s.iter().all(|&i| point[i].is_zero())),
            ZeroSetDescriptor::Point(a) => Some(a.as_slice() == point),
            ZeroSetDescriptor::AffineSubspace {
                base,
                directions,
                nvars,
            } => {
                let diff: Vec<Rational> = point.iter().zip(base).map(|(x, b)| x - b).collect();
                let mut rows = directions.clone();
                let r0 = QMatrix::from_rows(rows.clone()).rank();
                rows.push(diff);
                debug_assert_eq!(rows[0].len(), *nvars);
                Some(QMatrix::from_rows(rows).rank() == r0)
            }
            ZeroSetDescriptor::CoordinateUnion(parts) => {
                Some(parts.iter().any(|s| s.iter().all(|&i| point[i].is_zero())))
            }
            ZeroSetDescriptor::UserParametrized { .. } => None,
            ZeroSetDescriptor::Empty => Some(false),
        }
    }
}

impl fmt::Display for ZeroSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|i| format!("z{}", i + 1))
                .collect::<Vec<_>>()
                .join(" = ")
        };
        match self {
            ZeroSetDescriptor::CoordinateSubspace(s) => write!(f, "{{{} = 0}}", set(s)),
            ZeroSetDescriptor::Point(a) => {
                let coords: Vec<String> = a
                    .iter()
                    .map(crate::algebra::rational::format_rational)
                    .collect();
                write!(f, "point ({})", coords.join(", "))
            }
            ZeroSetDescriptor::AffineSubspace { directions, .. } => {
                write!(f, "affine subspace of dimension {}", directions.len())
            }
            ZeroSetDescriptor::CoordinateUnion(parts) => {
                let comps: Vec<String> = parts
                    .iter()
                    .map(|s| format!("{{{} = 0}}", set(s)))
                    .collect();
                write!(f, "{}", comps.join(" ∪ "))
            }
            ZeroSetDescriptor::UserParametrized { samples, codim } => {
                write!(
                    f,
                    "user-supplied ({} samples, codim {codim})",
                    samples.len()
                )
            }
            ZeroSetDescriptor::Empty => write!(f, "empty"),
        }
    }
}

/// Generators `p_1..p_t` in `z_1..z_m` with a family tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    nvars: usize,
    generators: Vec<Poly>,
    family: Family,
    user_zero_set: Option<ZeroSetDescriptor>,
}

impl IdealSpec {
    /// Builds the spec and infers the most specific family tag.
    pub fn new(nvars: usize, generators: Vec<Poly>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Input("an ideal needs at least one generator".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.nvars() != nvars {
                return Err(Error::Input(format!(
                    "generator {} lives in {} variables, expected {nvars}",
                    k + 1,
                    g.nvars()
                )));
            }
            if g.is_zero() {
                return Err(Error::Input(format!("generator {} is zero", k + 1)));
            }
        }
        let family = classify(nvars, &generators);
        Ok(IdealSpec {
            nvars,
            generators,
            family,
            user_zero_set: None,
        })
    }

    pub fn parse(nvars: usize, generators: &[&str]) -> Result<Self> {
        let polys = generators
            .iter()
            .map(|g| Poly::parse(g, nvars))
            .collect::<Result<Vec<_>>>()?;
        IdealSpec::new(nvars, polys)
    }

    /// `<z_1^{e_1}, ..., z_t^{e_t}>`; an exponent of 0 skips the coordinate.
    pub fn coordinate_powers(nvars: usize, exponents: &[u32]) -> Result<Self> {
        if exponents.len() > nvars {
            return Err(Error::Input("more exponents than variables".into()));
        }
        let gens: Vec<Poly> = exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| Poly::monomial(MultiIndex::zero(nvars).with(i, e), Rational::one()))
            .collect();
        IdealSpec::new(nvars, gens)
    }

    /// Attaches a caller-supplied zero set; every sample must be a common zero.
    pub fn with_user_zero_set(mut self, samples: Vec<Vec<Rational>>, codim: usize) -> Result<Self> {
        if codim > self.nvars {
            return Err(Error::Input(format!(
                "codim {codim} exceeds dimension {}",
                self.nvars
            )));
        }
        for s in &samples {
            if s.len() != self.nvars {
                return Err(Error::Input("sample point has the wrong dimension".into()));
            }
            if let Some(k) = self.generators.iter().position(|g| !g.eval(s).is_zero()) {
                return Err(Error::Input(format!(
                    "sample point is not a zero of generator {}",
                    k + 1
                )));
            }
        }
        self.user_zero_set = Some(ZeroSetDescriptor::UserParametrized { samples, codim });
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn count(&self) -> usize {
        self.generators.len()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn max_degree(&self) -> u32 {
        self.generators.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Generator exponents when the family is monomial.
    pub fn monomial_exponents(&self) -> Option<Vec<MultiIndex>> {
        if self.family != Family::Monomial {
            return None;
        }
        Some(
            self.generators
                .iter()
                .map(|g| g.as_monomial().unwrap().0.clone())
                .collect(),
        )
    }

    /// For `<z_{k}^{i_k}>` with distinct variables: the map `k -> i_k`.
    pub fn coordinate_power_exponents(&self) -> Option<BTreeMap<usize, u32>> {
        let exps = self.monomial_exponents()?;
        let mut out = BTreeMap::new();
        for e in exps {
            let support = e.support();
            if support.len() != 1 || out.insert(support[0], e.get(support[0])).is_some() {
                return None;
            }
        }
        Some(out)
    }

    /// Membership of `z^alpha` in a monomial ideal.
    pub fn contains_monomial(&self, alpha: &MultiIndex) -> Option<bool> {
        Some(
            self.monomial_exponents()?
                .iter()
                .any(|g| alpha.divisible_by(g)),
        )
    }

    /// Same ideal description with generators replaced by `q_j = sum_i a_ij p_i`.
    pub fn transformed(&self, a: &QMatrix) -> Result<IdealSpec> {
        let t = self.count();
        if a.rows() != t || a.cols() != t {
            return Err(Error::Shape(format!(
                "{t} generators need a {t}x{t} matrix"
            )));
        }
        if a.det().is_zero() {
            return Err(Error::Singular(
                "generator change matrix is singular".into(),
            ));
        }
        let gens = (0..t)
            .map(|j| {
                (0..t).fold(Poly::zero(self.nvars), |acc, i| {
                    acc.add(&self.generators[i].scale(a.get(i, j)))
                })
            })
            .collect();
        IdealSpec::new(self.nvars, gens)
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(Poly::to_string).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

fn classify(nvars: usize, gens: &[Poly]) -> Family {
    if gens.iter().all(|g| g.as_monomial().is_some()) {
        return Family::Monomial;
    }
    if gens.iter().all(|g| g.degree() == 1) {
        return Family::CoordinateVanishing;
    }
    if nvars >= 2 && gens.len() == 2 {
        let prod = Poly::var(nvars, 0).mul(&Poly::var(nvars, 1));
        let diff = Poly::var(nvars, 0).sub(&Poly::var(nvars, 1));
        let matches = |g: &Poly, target: &Poly| proportional(g, target);
        if (matches(&gens[0], &prod) && matches(&gens[1], &diff))
            || (matches(&gens[1], &prod) && matches(&gens[0], &diff))
        {
            return Family::Catalogued(CATALOGUE_Z1Z2_DIFF.to_string());
        }
    }
    Family::General
}

fn proportional(g: &Poly, target: &Poly) -> bool {
    let Some((e, c)) = target.terms().iter().next() else {
        return false;
    };
    let ratio = g.coeff(e) / c;
    !ratio.is_zero() && *g == target.scale(&ratio)
}

/// Exact zero set for the supported families.
pub fn zero_set(ideal: &IdealSpec) -> Result<ZeroSetDescriptor> {
    if let Some(user) = &ideal.user_zero_set {
        return Ok(user.clone());
    }
    match ideal.family() {
        Family::Monomial => Ok(monomial_zero_set(ideal)),
        Family::CoordinateVanishing => Ok(affine_zero_set(ideal)),
        Family::Catalogued(name) if name == CATALOGUE_Z1Z2_DIFF => Ok(
            ZeroSetDescriptor::CoordinateSubspace([0, 1].into_iter().collect()),
        ),
        Family::Catalogued(name) => Err(Error::Unsupported(format!(
            "unknown catalogue entry {name}"
        ))),
        Family::General => Err(Error::Unsupported(
            "zero set of a general ideal; supply sample points and a codimension".into(),
        )),
    }
}

/// A point lies in `V(I)` iff every generator support meets the set of
/// vanishing coordinates, so components are the minimal hitting sets.
fn monomial_zero_set(ideal: &IdealSpec) -> ZeroSetDescriptor {
    let m = ideal.nvars();
    let supports: Vec<BTreeSet<usize>> = ideal
        .monomial_exponents()
        .expect("monomial family")
        .iter()
        .map(|e| e.support().into_iter().collect())
        .collect();
    if supports.iter().any(BTreeSet::is_empty) {
        return ZeroSetDescriptor::Empty;
    }
    let hits = |s: &BTreeSet<usize>| supports.iter().all(|g| !g.is_disjoint(s));
    let mut minimal: Vec<BTreeSet<usize>> = Vec::new();
    // Subsets by increasing size so that supersets of earlier hits are skipped.
    let mut subsets: Vec<BTreeSet<usize>> = (0u64..(1u64 << m))
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(|s: &BTreeSet<usize>| (s.len(), s.iter().copied().collect::<Vec<_>>()));
    for s in subsets {
        if hits(&s) && !minimal.iter().any(|h| h.is_subset(&s)) {
            minimal.push(s);
        }
    }
    if minimal.len() == 1 {
        ZeroSetDescriptor::CoordinateSubspace(minimal.pop().unwrap())
    } else {
        ZeroSetDescriptor::CoordinateUnion(minimal)
    }
}

fn affine_zero_set(ideal: &IdealSpec) -> ZeroSetDescriptor {
    let m = ideal.nvars();
    // Row k: linear coefficients of p_k, then -constant term.
    let rows: Vec<Vec<Rational>> = ideal
        .generators()
        .iter()
        .map(|g| {
            let mut row: Vec<Rational> = (0..m).map(|i| g.coeff(&MultiIndex::unit(m, i))).collect();
            row.push(-g.coeff(&MultiIndex::zero(m)));
            row
        })
        .collect();
    let aug = QMatrix::from_rows(rows);
    let (r, pivots) = aug.rref();
    if pivots.contains(&m) {
        return ZeroSetDescriptor::Empty;
    }
    let mut base = vec![Rational::zero(); m];
    for (row, &p) in pivots.iter().enumerate() {
        base[p] = r.get(row, m).clone();
    }
    let linear = QMatrix::from_fn(aug.rows(), m, |i, j| aug.get(i, j).clone());
    let directions = linear.nullspace();
    if directions.is_empty() {
        return ZeroSetDescriptor::Point(base);
    }
    let coordinate = base.iter().all(Zero::is_zero)
        && (0..pivots.len())
            .all(|row| (0..m).all(|c| r.get(row, c).is_zero() == (c != pivots[row])));
    if coordinate {
        return ZeroSetDescriptor::CoordinateSubspace(pivots.into_iter().collect());
    }
    ZeroSetDescriptor::AffineSubspace {
        base,
        directions,
        nvars: m,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimality {
    /// `codim V = t`, so the generators are minimal (also stalkwise on `V`).
    /// `conditional` is set when the codimension came from the caller.
    MinimalByCodim { conditional: bool },
    /// The codimension test does not apply; no claim either way.
    HypothesisFails {
        generators: usize,
        codim: Option<usize>,
    },
}

pub fn minimality_certificate(ideal: &IdealSpec) -> Result<Minimality> {
    let v = zero_set(ideal)?;
    let codim = v.codim(ideal.nvars());
    let t = ideal.count();
    Ok(if codim == Some(t) {
        Minimality::MinimalByCodim {
            conditional: v.is_conditional(),
        }
    } else {
        Minimality::HypothesisFails {
            generators: t,
            codim,
        }
    })
}

/// Outcome of the truncated localization computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationDim {
    pub dim: usize,
    /// First `N > 2 * max degree` with `d_N = d_{N-1}`.
    pub stabilized_at: Option<u32>,
    /// `(N, d_N)` for every level computed.
    pub sequence: Vec<(u32, usize)>,
    /// Levels `N >= 2 * max degree` at which `d_N` increased.
    pub monotonicity_violations: Vec<u32>,
}

/// Coefficient rows of `polys` over all monomials of degree `<= degree`.
fn coefficient_matrix(polys: &[Poly], nvars: usize, degree: u32) -> QMatrix {
    let monomials = MultiIndex::all_up_to(nvars, degree);
    let index: BTreeMap<&MultiIndex, usize> =
        monomials.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let mut m = QMatrix::zeros(polys.len(), monomials.len());
    for (r, p) in polys.iter().enumerate() {
        for (e, c) in p.terms() {
            m.set(r, index[e], c.clone());
        }
    }
    m
}

/// `{z^beta p_j : deg <= n}` in generator-major, graded order.
pub fn spanning_set(ideal: &IdealSpec, n: u32) -> Vec<Poly> {
    let m = ideal.nvars();
    let mut out = Vec::new();
    for g in ideal.generators() {
        let d = g.degree();
        if d > n {
            continue;
        }
        for beta in MultiIndex::all_up_to(m, n - d) {
            out.push(g.mul_monomial(&beta));
        }
    }
    out
}

/// A basis of `J_n = span{z^beta p_j : deg <= n}`.
pub fn truncated_ideal_basis(ideal: &IdealSpec, n: u32) -> Vec<Poly> {
    let span = spanning_set(ideal, n);
    if span.is_empty() {
        return span;
    }
    let rows = coefficient_matrix(&span, ideal.nvars(), n).independent_rows();
    rows.into_iter().map(|k| span[k].clone()).collect()
}

/// `dim J_N - dim J'_N` with `J'_N = span{(z_i - w_i) f : f in J_{N-1}}`,
/// iterated until two consecutive levels from `2 * max degree` on agree, or
/// `n_max` is reached.
pub fn localization_dim(ideal: &IdealSpec, w: &[Rational], n_max: u32) -> Result<LocalizationDim> {
    let m = ideal.nvars();
    if w.len() != m {
        return Err(Error::Input(format!(
            "point has {} coordinates, expected {m}",
            w.len()
        )));
    }
    let d0 = ideal.max_degree();
    if n_max < d0 {
        return Err(Error::Truncation(format!(
            "maximum level {n_max} is below the generator degree {d0}"
        )));
    }
    let shifts: Vec<Poly> = (0..m)
        .map(|i| Poly::var(m, i).sub(&Poly::constant(m, w[i].clone())))
        .collect();
    let mut sequence = Vec::new();
    let mut stabilized_at = None;
    let mut prev_basis = if d0 == 0 {
        Vec::new()
    } else {
        truncated_ideal_basis(ideal, d0 - 1)
    };
    for n in d0..=n_max {
        let basis = truncated_ideal_basis(ideal, n);
        let shifted: Vec<Poly> = prev_basis
            .iter()
            .flat_map(|f| shifts.iter().map(move |s| s.mul(f)))
            .collect();
        let shifted_dim = if shifted.is_empty() {
            0
        } else {
            coefficient_matrix(&shifted, m, n).rank()
        };
        let d = basis.len() - shifted_dim;
        if let Some(&(prev, last)) = sequence.last() {
            // below 2 * max degree, degree drops among generators can still lower d_N
            if last == d && prev >= 2 * d0 {
                sequence.push((n, d));
                stabilized_at = Some(n);
                break;
            }
        }
        sequence.push((n, d));
        prev_basis = basis;
    }
    let monotonicity_violations = sequence
        .windows(2)
        .filter(|pair| pair[0].0 >= 2 * d0 && pair[1].1 > pair[0].1)
        .map(|pair| pair[1].0)
        .collect();
    Ok(LocalizationDim {
        dim: sequence.last().map(|&(_, d)| d).unwrap_or(0),
        stabilized_at,
        sequence,
        monotonicity_violations,
    })
}
