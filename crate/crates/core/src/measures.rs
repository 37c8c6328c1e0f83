//! The 25 parametric node-closeness measure families.
//!
//! Every family is turned into an `n x n` similarity matrix usable by kernel
//! k-means. Distance-type measures (shortest path, commute time, randomized
//! shortest path, free energy) go through the double-centering transform
//! `K = -H D H`. Ten families also come in an element-wise logarithm variant.
//!
//! | family | base matrix | formula | parameter |
//! |--------|-------------|---------|-----------|
//! | Katz   | `A` | `(I - aA)^-1` | `0 < a < 1/rho` |
//! | Comm   | `A` | `expm(tA)` | `t > 0` |
//! | DF     | `A` | `sum_k t^k/k!! A^k` | `t > 0` |
//! | For    | `L` | `(I + tL)^-1` | `t > 0` |
//! | Heat   | `L` | `expm(-tL)` | `t > 0` |
//! | NHeat  | `calL` | `expm(-t calL)` | `t > 0` |
//! | Abs    | `A`, `L` | `(tA + L)^-1` | `t > 0` |
//! | PPR    | `P` | `(I - aP)^-1` | `0 < a < 1` |
//! | MPPR   | `D`, `A` | `(D - aA)^-1` | `0 < a < 1` |
//! | HPR    | `P` | `expm(-t(I - P))` | `t > 0` |
//! | RSP    | `P`, `C` | randomized shortest path distance | `beta > 0` |
//! | FE     | `P`, `C` | free energy distance | `beta > 0` |
//! | SCT    | `L+` | sigmoid of scaled commute-time proximity | `t > 0` |
//! | SCCT   | `M` | sigmoid of corrected commute-time kernel | `t > 0` |
//! | SP-CT  | `C`, `L+` | mix of shortest-path and commute-time kernels | `0 <= lambda <= 1` |

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DerivedMatrices;
use crate::linalg::{self, Spectrum};

/// Clamp applied to grid values of open-domain parameters.
pub const PARAM_EPS: f64 = 1e-4;
/// Floor applied before the element-wise logarithm.
pub const LOG_FLOOR: f64 = 1e-12;
/// Relative max-norm tolerance for the double-factorial series.
pub const DF_TOL: f64 = 1e-10;
/// Hard cap on double-factorial series terms.
pub const DF_MAX_TERMS: usize = 200;
/// `rho(W)` must stay below `1 - RSP_MARGIN`.
pub const RSP_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Katz,
    Comm,
    DF,
    For,
    Heat,
    NHeat,
    Abs,
    PPR,
    MPPR,
    HPR,
    RSP,
    FE,
    SCT,
    SCCT,
    #[serde(rename = "SP-CT")]
    SpCt,
}

impl Family {
    pub const ALL: [Family; 15] = [
        Family::Katz,
        Family::Comm,
        Family::DF,
        Family::For,
        Family::Heat,
        Family::NHeat,
        Family::Abs,
        Family::PPR,
        Family::MPPR,
        Family::HPR,
        Family::RSP,
        Family::FE,
        Family::SCT,
        Family::SCCT,
        Family::SpCt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Katz => "Katz",
            Family::Comm => "Comm",
            Family::DF => "DF",
            Family::For => "For",
            Family::Heat => "Heat",
            Family::NHeat => "NHeat",
            Family::Abs => "Abs",
            Family::PPR => "PPR",
            Family::MPPR => "MPPR",
            Family::HPR => "HPR",
            Family::RSP => "RSP",
            Family::FE => "FE",
            Family::SCT => "SCT",
            Family::SCCT => "SCCT",
            Family::SpCt => "SP-CT",
        }
    }

    /// Whether a `log` variant of this family exists.
    pub fn has_log(self) -> bool {
        matches!(
            self,
            Family::Katz
                | Family::Comm
                | Family::DF
                | Family::For
                | Family::Heat
                | Family::NHeat
                | Family::Abs
                | Family::PPR
                | Family::MPPR
                | Family::HPR
        )
    }

    pub fn param_kind(self) -> ParamKind {
        match self {
            Family::Katz | Family::PPR | Family::MPPR => ParamKind::Alpha,
            Family::RSP | Family::FE => ParamKind::Beta,
            Family::SpCt => ParamKind::Lambda,
            _ => ParamKind::T,
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let family = match s {
            "HeatPR" => Family::HPR,
            "ModifPPR" => Family::MPPR,
            "SPCT" => Family::SpCt,
            _ => *Family::ALL
                .iter()
                .find(|f| f.name() == s)
                .ok_or_else(|| Error::InvalidMeasure(format!("unknown family `{s}`")))?,
        };
        Ok(family)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Log,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Log => "log",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "log" => Ok(Variant::Log),
            _ => Err(Error::InvalidMeasure(format!("unknown variant `{s}`"))),
        }
    }
}

/// A (family, variant) pair from the measure catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasureId {
    family: Family,
    variant: Variant,
}

impl MeasureId {
    pub fn new(family: Family, variant: Variant) -> Result<Self> {
        if variant == Variant::Log && !family.has_log() {
            return Err(Error::InvalidMeasure(format!(
                "{} has no log variant",
                family.name()
            )));
        }
        Ok(MeasureId { family, variant })
    }

    pub fn plain(family: Family) -> Self {
        MeasureId {
            family,
            variant: Variant::Plain,
        }
    }

    /// Panics if `family` has no log variant.
    pub fn log(family: Family) -> Self {
        Self::new(family, Variant::Log).expect("family has no log variant")
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn variant(self) -> Variant {
        self.variant
    }

    /// All 25 measures in catalog order: each log-capable family is
    /// followed by its log variant.
    pub fn all() -> Vec<MeasureId> {
        let mut out = Vec::with_capacity(25);
        for family in Family::ALL {
            out.push(MeasureId::plain(family));
            if family.has_log() {
                out.push(MeasureId::log(family));
            }
        }
        out
    }

    /// Position in [`MeasureId::all`].
    pub fn index(self) -> usize {
        let mut idx = 0;
        for family in Family::ALL {
            if family == self.family {
                return idx + usize::from(self.variant == Variant::Log);
            }
            idx += if family.has_log() { 2 } else { 1 };
        }
        unreachable!("family is always in the catalog")
    }

    /// Parses a comma-separated list, or `all`.
    pub fn parse_list(spec: &str) -> Result<Vec<MeasureId>> {
        if spec.trim() == "all" {
            return Ok(Self::all());
        }
        let mut out: Vec<MeasureId> = spec
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl PartialOrd for MeasureId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MeasureId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Variant::Plain => f.write_str(self.family.name()),
            Variant::Log => write!(f, "log{}", self.family.name()),
        }
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("log") {
            Some(rest) if !rest.is_empty() => MeasureId::new(rest.parse()?, Variant::Log),
            _ => Ok(MeasureId::plain(s.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamKind {
    /// Resolvent damping, `alpha`.
    Alpha,
    /// Time-like scale, `t`.
    T,
    /// Inverse temperature, `beta`.
    Beta,
    /// Mixing weight, `lambda`.
    Lambda,
}

/// A normalized grid value together with the native parameter it maps to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParam {
    pub x: f64,
    pub kind: ParamKind,
    pub value: f64,
}

/// Maps a grid value `x` in `[0, 1]` onto the family's native domain.
pub fn map_param(measure: MeasureId, x: f64, matrices: &DerivedMatrices) -> MeasureParam {
    let kind = measure.family.param_kind();
    let clamped = x.clamp(PARAM_EPS, 1.0 - PARAM_EPS);
    let value = match measure.family {
        Family::Katz => clamped / matrices.spectral_radius,
        Family::PPR | Family::MPPR => clamped,
        Family::SpCt => x.clamp(0.0, 1.0),
        _ => clamped / (1.0 - clamped),
    };
    MeasureParam { x, kind, value }
}

/// Sign applied inside the sigmoid of the SCT/SCCT kernels.
///
/// `Positive` keeps the commute-time proximity's ordering, so nearby nodes
/// stay similar. `Negative` reverses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmoidSign {
    /// `sigma(-t K / std K)`.
    Negative,
    /// `sigma(t K / std K)`.
    #[default]
    Positive,
}

impl SigmoidSign {
    fn factor(self) -> f64 {
        match self {
            SigmoidSign::Negative => -1.0,
            SigmoidSign::Positive => 1.0,
        }
    }
}

impl FromStr for SigmoidSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" | "-" => Ok(SigmoidSign::Negative),
            "positive" | "+" => Ok(SigmoidSign::Positive),
            _ => Err(Error::InvalidMeasure(format!("unknown sigmoid sign `{s}`"))),
        }
    }
}

impl fmt::Display for SigmoidSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmoidSign::Negative => "negative",
            SigmoidSign::Positive => "positive",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub sigmoid_sign: SigmoidSign,
}

/// A finished similarity matrix.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub values: DMatrix<f64>,
    pub measure: MeasureId,
    pub param: MeasureParam,
    /// Entries clamped before a logarithm (log variant or FE).
    pub clamped: usize,
}

/// `K = -H D H` with `H = I - E/n`.
pub fn distance_to_kernel(distance: &DMatrix<f64>) -> DMatrix<f64> {
    -linalg::double_center(distance)
}

/// Katz, communicability and double-factorial kernels.
pub fn kernel_adjacency(family: Family, value: f64, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    let n = m.n();
    match family {
        Family::Katz => {
            linalg::inverse_checked(&(DMatrix::identity(n, n) - &m.adjacency * value))
        }
        Family::Comm => Ok(m.adjacency_spectrum().apply(|l| (value * l).exp())),
        Family::DF => double_factorial_spectral(value, m.adjacency_spectrum()),
        _ => Err(wrong_family(family, "adjacency")),
    }
}

/// Forest, heat, normalized heat and absorption kernels.
pub fn kernel_laplacian(family: Family, t: f64, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    let n = m.n();
    match family {
        Family::For => {
            linalg::inverse_checked(&(DMatrix::identity(n, n) + &m.laplacian * t))
        }
        Family::Heat => Ok(m.laplacian_spectrum().apply(|l| (-t * l).exp())),
        Family::NHeat => Ok(m.normalized_laplacian_spectrum().apply(|l| (-t * l).exp())),
        Family::Abs => linalg::inverse_checked(&(&m.adjacency * t + &m.laplacian)),
        _ => Err(wrong_family(family, "Laplacian")),
    }
}

/// PPR, MPPR and HPR before symmetrization.
///
/// HPR uses `D^1/2 (I - P) D^-1/2 = calL`, so
/// `expm(-t(I - P)) = D^-1/2 expm(-t calL) D^1/2`.
pub fn markov_raw(family: Family, value: f64, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    let n = m.n();
    match family {
        Family::PPR => linalg::inverse_checked(&(DMatrix::identity(n, n) - &m.markov * value)),
        Family::MPPR => {
            linalg::inverse_checked(&(m.degree_matrix() - &m.adjacency * value))
        }
        Family::HPR => {
            let sym = m.normalized_laplacian_spectrum().apply(|l| (-value * l).exp());
            let sqrt_d: Vec<f64> = m.degrees.iter().map(|d| d.sqrt()).collect();
            Ok(DMatrix::from_fn(n, n, |i, j| sym[(i, j)] * sqrt_d[j] / sqrt_d[i]))
        }
        _ => Err(wrong_family(family, "Markov")),
    }
}

/// Markov-matrix kernels, symmetrized.
pub fn kernel_markov(family: Family, value: f64, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    Ok(linalg::symmetrize(&markov_raw(family, value, m)?))
}

/// `sum_k t^k / k!! A^k` on explicit matrix powers. Quadratic memory and
/// cubic work per term; the spectral route is preferred for real graphs.
pub fn double_factorial_series(t: f64, adjacency: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = adjacency.nrows();
    let step = adjacency * t;
    let step2 = &step * &step;
    // Even and odd chains: T_k = T_{k-2} (tA)^2 / k.
    let mut prev2 = DMatrix::<f64>::identity(n, n);
    let mut prev1 = step.clone();
    let mut sum = &prev2 + &prev1;
    let mut small_run = 0;
    for k in 2..=DF_MAX_TERMS {
        let term = &prev2 * &step2 / k as f64;
        sum += &term;
        if linalg::max_abs(&term) < DF_TOL * linalg::max_abs(&sum) {
            small_run += 1;
            if small_run == 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        prev2 = prev1;
        prev1 = term;
    }
    Err(Error::SeriesDivergence(DF_MAX_TERMS))
}

/// Double-factorial series evaluated on the eigenvalues of `A` with the same
/// truncation rule, then mapped back through the eigenvectors.
fn double_factorial_spectral(t: f64, spectrum: &Spectrum) -> Result<DMatrix<f64>> {
    let xs: Vec<f64> = spectrum.values.iter().map(|l| t * l).collect();
    let mut prev2 = vec![1.0; xs.len()];
    let mut prev1 = xs.clone();
    let mut sum: Vec<f64> = prev2.iter().zip(&prev1).map(|(a, b)| a + b).collect();
    let mut small_run = 0;
    let mut converged = false;
    for k in 2..=DF_MAX_TERMS {
        let term: Vec<f64> = prev2
            .iter()
            .zip(&xs)
            .map(|(p, x)| p * x * x / k as f64)
            .collect();
        for (s, v) in sum.iter_mut().zip(&term) {
            *s += v;
        }
        let term_max = term.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let sum_max = sum.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if term_max < DF_TOL * sum_max {
            small_run += 1;
            if small_run == 2 {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        prev2 = prev1;
        prev1 = term;
    }
    if !converged {
        return Err(Error::SeriesDivergence(DF_MAX_TERMS));
    }
    let mut scaled = spectrum.vectors.clone();
    for (j, s) in sum.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    Ok(&scaled * spectrum.vectors.transpose())
}

/// Commute-time proximity `L+` and the induced distance.
#[derive(Debug, Clone)]
pub struct CommuteTime {
    pub pinv: DMatrix<f64>,
    /// `vol * (L+_ii + L+_jj - 2 L+_ij)`
    pub distance: DMatrix<f64>,
}

/// Moore-Penrose pseudoinverse of `L`, cached on the derived matrices.
pub fn laplacian_pinv(m: &DerivedMatrices) -> &DMatrix<f64> {
    m.ct_pinv.get_or_init(|| {
        let spectrum = m.laplacian_spectrum();
        let null = spectrum
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut scaled = spectrum.vectors.clone();
        for (j, &l) in spectrum.values.iter().enumerate() {
            let w = if j == null { 0.0 } else { 1.0 / l };
            scaled.column_mut(j).scale_mut(w);
        }
        &scaled * spectrum.vectors.transpose()
    })
}

pub fn commute_time_kernel(m: &DerivedMatrices) -> CommuteTime {
    let pinv = laplacian_pinv(m).clone();
    let n = pinv.nrows();
    let distance = DMatrix::from_fn(n, n, |i, j| {
        m.volume * (pinv[(i, i)] + pinv[(j, j)] - 2.0 * pinv[(i, j)])
    });
    CommuteTime { pinv, distance }
}

/// Intermediate matrices of the randomized-shortest-path construction.
#[derive(Debug, Clone)]
pub struct RspIntermediate {
    pub beta: f64,
    /// `P o exp(-beta C)`
    pub w: DMatrix<f64>,
    /// `(I - W)^-1`
    pub z: DMatrix<f64>,
    /// `(Z (C o W) Z) / Z`
    pub s: DMatrix<f64>,
    /// `S - e diag(S)^T`
    pub cbar: DMatrix<f64>,
    /// `Z Diag(Z)^-1`
    pub ztilde: DMatrix<f64>,
    /// `-(1/beta) log Ztilde`
    pub phi: DMatrix<f64>,
    /// Nonpositive `Ztilde` entries clamped before the log.
    pub clamped: usize,
}

impl RspIntermediate {
    pub fn new(beta: f64, m: &DerivedMatrices) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        let n = m.n();
        let c = &m.shortest_paths;
        let w = m.markov.zip_map(c, |p, cij| p * (-beta * cij).exp());

        let row_bound = w.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
        if row_bound >= 1.0 - RSP_MARGIN {
            // W is similar to the symmetric D^1/2 W D^-1/2.
            let sqrt_d: Vec<f64> = m.degrees.iter().map(|d| d.sqrt()).collect();
            let sym = DMatrix::from_fn(n, n, |i, j| w[(i, j)] * sqrt_d[i] / sqrt_d[j]);
            let radius = Spectrum::of(&linalg::symmetrize(&sym)).max_abs();
            if radius >= 1.0 - RSP_MARGIN {
                return Err(Error::SpectralRadiusExceeded(radius));
            }
        }

        let z = linalg::inverse_checked(&(DMatrix::identity(n, n) - &w))?;
        let cw = c.component_mul(&w);
        let s = (&z * cw * &z).component_div(&z);
        let cbar = DMatrix::from_fn(n, n, |i, j| s[(i, j)] - s[(j, j)]);
        let ztilde = DMatrix::from_fn(n, n, |i, j| z[(i, j)] / z[(j, j)]);
        let mut clamped = 0;
        let phi = ztilde.map(|v| {
            let v = if v > 0.0 {
                v
            } else {
                clamped += 1;
                f64::MIN_POSITIVE
            };
            -v.ln() / beta
        });
        if clamped > 0 {
            log::debug!("free energy: clamped {clamped} nonpositive entries before log");
        }
        Ok(RspIntermediate {
            beta,
            w,
            z,
            s,
            cbar,
            ztilde,
            phi,
            clamped,
        })
    }

    /// `(Cbar + Cbar^T) / 2`
    pub fn rsp_distance(&self) -> DMatrix<f64> {
        linalg::symmetrize(&self.cbar)
    }

    /// `(Phi + Phi^T) / 2`
    pub fn fe_distance(&self) -> DMatrix<f64> {
        linalg::symmetrize(&self.phi)
    }
}

/// RSP or FE kernel: the distance passed through [`distance_to_kernel`].
pub fn rsp_fe(family: Family, beta: f64, m: &DerivedMatrices) -> Result<(DMatrix<f64>, usize)> {
    let inter = RspIntermediate::new(beta, m)?;
    let distance = match family {
        Family::RSP => inter.rsp_distance(),
        Family::FE => inter.fe_distance(),
        _ => return Err(wrong_family(family, "RSP/FE")),
    };
    if !linalg::all_finite(&distance) {
        return Err(Error::NonFinite);
    }
    let clamped = if family == Family::FE { inter.clamped } else { 0 };
    Ok((distance_to_kernel(&distance), clamped))
}

/// Corrected commute-time kernel
/// `H D^-1/2 M (I - M)^-1 M D^-1/2 H` with
/// `M = D^-1/2 (A - d d^T / vol) D^-1/2`. Cached on the derived matrices.
pub fn corrected_commute_time(m: &DerivedMatrices) -> Result<&DMatrix<f64>> {
    if let Some(k) = m.cct.get() {
        return Ok(k);
    }
    let n = m.n();
    let d = &m.degrees;
    let inv_sqrt: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mm = DMatrix::from_fn(n, n, |i, j| {
        (m.adjacency[(i, j)] - d[i] * d[j] / m.volume) * inv_sqrt[i] * inv_sqrt[j]
    });
    let resolvent = linalg::inverse_checked(&(DMatrix::identity(n, n) - &mm))?;
    let core = &mm * resolvent * &mm;
    let scaled = DMatrix::from_fn(n, n, |i, j| core[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    let k = linalg::symmetrize(&linalg::double_center(&scaled));
    Ok(m.cct.get_or_init(|| k))
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Sigmoid commute-time kernels.
pub fn sigmoid_ct(
    family: Family,
    t: f64,
    m: &DerivedMatrices,
    sign: SigmoidSign,
) -> Result<DMatrix<f64>> {
    let base = match family {
        Family::SCT => laplacian_pinv(m),
        Family::SCCT => corrected_commute_time(m)?,
        _ => return Err(wrong_family(family, "sigmoid")),
    };
    Ok(sigmoid_of_scaled(base, t, sign))
}

/// `sigma(sign * t * K / std(K))` element-wise, `std` over all entries.
pub fn sigmoid_of_scaled(k: &DMatrix<f64>, t: f64, sign: SigmoidSign) -> DMatrix<f64> {
    let scale = sign.factor() * t / linalg::entry_std(k);
    k.map(|v| sigmoid(scale * v))
}

/// Linear combination of the shortest-path and commute-time kernels, each
/// divided by its mean diagonal.
pub fn sp_ct_kernel(lambda: f64, m: &DerivedMatrices) -> DMatrix<f64> {
    let normalize = |k: DMatrix<f64>| {
        let mean_diag = k.diagonal().mean();
        k / mean_diag
    };
    let sp = normalize(distance_to_kernel(&m.shortest_paths));
    let ct = normalize(distance_to_kernel(&commute_time_kernel(m).distance));
    sp * lambda + ct * (1.0 - lambda)
}

/// Element-wise natural log after clamping entries at [`LOG_FLOOR`].
/// Returns the clamp count alongside.
pub fn elementwise_log(k: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let mut clamped = 0;
    let out = k.map(|v| {
        if v <= LOG_FLOOR {
            clamped += 1;
            LOG_FLOOR.ln()
        } else {
            v.ln()
        }
    });
    (out, clamped)
}

/// Builds one measure at one grid value.
pub fn build_measure(
    measure: MeasureId,
    x: f64,
    m: &DerivedMatrices,
    options: BuildOptions,
) -> Result<KernelMatrix> {
    let measure = MeasureId::new(measure.family, measure.variant)?;
    let param = map_param(measure, x, m);
    let v = param.value;
    let mut clamped = 0;
    let raw = match measure.family {
        Family::Katz | Family::Comm | Family::DF => kernel_adjacency(measure.family, v, m)?,
        Family::For | Family::Heat | Family::NHeat | Family::Abs => {
            kernel_laplacian(measure.family, v, m)?
        }
        Family::PPR | Family::MPPR | Family::HPR => kernel_markov(measure.family, v, m)?,
        Family::RSP | Family::FE => {
            let (k, c) = rsp_fe(measure.family, v, m)?;
            clamped += c;
            k
        }
        Family::SCT | Family::SCCT => sigmoid_ct(measure.family, v, m, options.sigmoid_sign)?,
        Family::SpCt => sp_ct_kernel(v, m),
    };
    if !linalg::all_finite(&raw) {
        return Err(Error::NonFinite);
    }
    let values = match measure.variant {
        Variant::Plain => raw,
        Variant::Log => {
            let (logged, c) = elementwise_log(&raw);
            clamped += c;
            logged
        }
    };
    let values = linalg::symmetrize(&values);
    if !linalg::all_finite(&values) {
        return Err(Error::NonFinite);
    }
    Ok(KernelMatrix {
        values,
        measure,
        param,
        clamped,
    })
}

fn wrong_family(family: Family, group: &str) -> Error {
    Error::InvalidMeasure(format!("{} is not a {group} family", family.name()))
}
