//! Numeric evaluation of multiple ζ-values by truncated series and by
//! double-exponential quadrature of the iterated-integral representation,
//! plus the assembled certification report.
//!
//! The ordered simplex `0 < t1 < … < tn < 1` is mapped to the unit cube by
//! `ti = ui · u{i+1} ⋯ un`; the Jacobian cancels every `1/ti` pole of the
//! integrand, leaving poles only along products approaching 1, which the
//! tanh-sinh nodes absorb. Plain Monte Carlo over the simplex is useless
//! here: the squared integrand is not integrable near the faces.

pub use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::divisors::{
    check_disjoint, check_vertex_avoidance, divisor_a, divisor_b, DisjointnessReport, Divisor,
    DivisorError,
};
use crate::labels::{encode_epsilon, CompositionIndex, EpsilonWord, LabelError, MarkedSet};
use crate::quad::{tanh_sinh, Rule};

#[derive(Debug, Error, PartialEq)]
pub enum PeriodError {
    /// Series truncation below the composition depth.
    #[error("bad truncation: K = {k} < depth {depth}")]
    BadK { k: u64, depth: usize },
    /// Quadrature order too small to halve for the error estimate.
    #[error("bad quadrature order: Q = {0} < 4")]
    BadQ(usize),
    /// The integral does not converge.
    #[error("divergent: {0}")]
    Divergent(String),
    /// An anchor sits on the open integration segment.
    #[error("pole on path: {0}")]
    PoleOnPath(String),
    /// A certificate (disjointness, vertex avoidance, or period agreement)
    /// failed; the witness is embedded in the message.
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// How a period estimate was produced.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Quadrature,
}

/// A numeric period estimate with method metadata and an error bound.
///
/// `value_im` is zero for every multiple-ζ path and may be nonzero only for
/// iterated integrals with complex anchors. `heuristic` flags bounds that
/// are estimates rather than proven tail bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodValue {
    pub value: f64,
    pub value_im: f64,
    pub error_bound: f64,
    pub heuristic: bool,
    pub method: Method,
    /// Truncation bound K for series, order Q for quadrature.
    pub params: u64,
}

impl PeriodValue {
    pub fn is_real(&self) -> bool {
        self.value_im == 0.0
    }
}

/// Anchor sequence `(a1, …, an)` of the generalized iterated integral.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSequence {
    values: Vec<Complex64>,
}

impl AnchorSequence {
    pub fn new(values: Vec<Complex64>) -> AnchorSequence {
        AnchorSequence { values }
    }

    pub fn from_reals(values: &[f64]) -> AnchorSequence {
        AnchorSequence {
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Admissibility of the integral: `a1 ≠ 0`, `an ≠ 1`, and no anchor on
    /// the open real segment (0, 1).
    pub fn admissible(&self) -> Result<(), PeriodError> {
        if self.values.is_empty() {
            return Err(PeriodError::Divergent("empty anchor sequence".into()));
        }
        if self.values[0] == Complex64::new(0.0, 0.0) {
            return Err(PeriodError::Divergent("a_1 = 0".into()));
        }
        if self.values[self.values.len() - 1] == Complex64::new(1.0, 0.0) {
            return Err(PeriodError::Divergent("a_n = 1".into()));
        }
        for (i, a) in self.values.iter().enumerate() {
            if a.im == 0.0 && a.re > 0.0 && a.re < 1.0 {
                return Err(PeriodError::PoleOnPath(format!(
                    "a_{} = {} lies in (0, 1)",
                    i + 1,
                    a.re
                )));
            }
        }
        Ok(())
    }
}

/// Parse a comma-separated anchor list; each entry is a real like `2` or
/// `-0.5`, or a complex like `1+2i` / `1-2i` / `2i`.
impl std::str::FromStr for AnchorSequence {
    type Err = PeriodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_one = |t: &str| -> Option<Complex64> {
            let t = t.trim();
            if let Ok(x) = t.parse::<f64>() {
                return Some(Complex64::new(x, 0.0));
            }
            let body = t.strip_suffix('i')?;
            // Split at the last +/- that is not a leading sign or exponent.
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                let c = bytes[k] as char;
                if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                    split = Some(k);
                    break;
                }
            }
            match split {
                Some(k) => {
                    let re = body[..k].parse::<f64>().ok()?;
                    let im_str = &body[k..];
                    let im = if im_str == "+" {
                        1.0
                    } else if im_str == "-" {
                        -1.0
                    } else {
                        im_str.parse::<f64>().ok()?
                    };
                    Some(Complex64::new(re, im))
                }
                None => {
                    let im = if body.is_empty() {
                        1.0
                    } else if body == "-" {
                        -1.0
                    } else {
                        body.parse::<f64>().ok()?
                    };
                    Some(Complex64::new(0.0, im))
                }
            }
        };
        let values = s
            .split(',')
            .map(|t| {
                parse_one(t).ok_or_else(|| {
                    PeriodError::Divergent(format!("cannot parse anchor {t:?}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnchorSequence::new(values))
    }
}

/// Default series truncation bound.
pub const DEFAULT_SERIES_TRUNCATION: u64 = 1_000_000;

/// Default quadrature order per weight, sized so weights up to 3 reach 1e-6
/// and weight 4 reaches 1e-4 in seconds.
pub fn default_quadrature_order(weight: usize) -> usize {
    match weight {
        0..=2 => 48,
        3 => 40,
        4 => 32,
        5 => 14,
        _ => 8,
    }
}

/// Truncated nested series: sum over `0 < k1 < … < km <= K` of
/// `Π ki^(-ni)`, computed by m streaming prefix-sum passes in O(K·m).
///
/// The error bound is the tail estimate
/// `m · (1 + ln K)^(m-1) / ((nm - 1) · K^(nm - 1))`,
/// a crude union bound flagged heuristic for depth m >= 2.
pub fn mzv_series(c: &CompositionIndex, k_max: u64) -> Result<PeriodValue, PeriodError> {
    let m = c.depth();
    if k_max < m as u64 {
        return Err(PeriodError::BadK { k: k_max, depth: m });
    }
    let exponents: Vec<i32> = c.parts().iter().map(|&p| p as i32).collect();
    // prefix[i] holds P_i(k-1) while updating level i at index k; the sums
    // are compensated so the rounding stays below the tail bound.
    let mut prefix = vec![0.0f64; m + 1];
    let mut carry = vec![0.0f64; m + 1];
    prefix[0] = 1.0;
    for k in 1..=k_max {
        let inv = 1.0 / k as f64;
        for i in (1..=m).rev() {
            let term = inv.powi(exponents[i - 1]) * prefix[i - 1] - carry[i];
            let updated = prefix[i] + term;
            carry[i] = (updated - prefix[i]) - term;
            prefix[i] = updated;
        }
    }
    let n_m = *c.parts().last().unwrap() as f64;
    let kf = k_max as f64;
    let error_bound =
        m as f64 * (1.0 + kf.ln()).powi(m as i32 - 1) / ((n_m - 1.0) * kf.powi(n_m as i32 - 1));
    Ok(PeriodValue {
        value: prefix[m],
        value_im: 0.0,
        error_bound,
        heuristic: m >= 2,
        method: Method::Series,
        params: k_max,
    })
}

/// Per-axis exponent of the cube integrand after cancelling the Jacobian
/// against the poles at 0: `e_j = #{i < j : denom_i ≠ 0} - [denom_j = 0]`.
fn cube_exponents(zero_at: &[bool]) -> Vec<i32> {
    let n = zero_at.len();
    let mut nonzero_before = 0i32;
    let mut exps = Vec::with_capacity(n);
    for &is_zero in zero_at {
        exps.push(nonzero_before - i32::from(is_zero));
        if !is_zero {
            nonzero_before += 1;
        }
    }
    debug_assert_eq!(exps.len(), n);
    exps
}

/// Tensor tanh-sinh integration of the real multiple-ζ integrand on the
/// cube. Denominators are `(Π_{j>=i} uj) - 1` at the positions with ε = 1.
fn integrate_mzv(eps: &EpsilonWord, rule: &Rule) -> f64 {
    let n = eps.len();
    let zero_at: Vec<bool> = (1..=n).map(|i| eps.value(i) == 0).collect();
    let exps = cube_exponents(&zero_at);
    debug_assert!(exps.iter().all(|&e| e >= 0));

    struct Ctx<'a> {
        zero_at: &'a [bool],
        exps: &'a [i32],
        rule: &'a Rule,
        // Compensated accumulator: tens of millions of leaf terms must not
        // drown the converged quadrature in summation rounding.
        sum: f64,
        carry: f64,
    }

    fn recurse(ctx: &mut Ctx<'_>, axis: usize, suffix: f64, partial: f64) {
        let i = axis - 1;
        for node in 0..ctx.rule.nodes.len() {
            let (u, w) = ctx.rule.nodes[node];
            let product = u * suffix;
            let mut f = partial * w * u.powi(ctx.exps[i]);
            if !ctx.zero_at[i] {
                f /= product - 1.0;
            }
            if axis == 1 {
                let term = f - ctx.carry;
                let updated = ctx.sum + term;
                ctx.carry = (updated - ctx.sum) - term;
                ctx.sum = updated;
            } else {
                recurse(ctx, axis - 1, product, f);
            }
        }
    }

    let mut ctx = Ctx {
        zero_at: &zero_at,
        exps: &exps,
        rule,
        sum: 0.0,
        carry: 0.0,
    };
    recurse(&mut ctx, n, 1.0, 1.0);
    ctx.sum
}

/// Multiple ζ-value via the iterated-integral representation: `(-1)^m`
/// times the integral of the logarithmic form over the ordered simplex,
/// evaluated on the cube with per-axis tanh-sinh quadrature of order `q`.
/// The error bound is the difference against the order-q/2 run.
pub fn mzv_integral(eps: &EpsilonWord, q: usize) -> Result<PeriodValue, PeriodError> {
    if !eps.is_convergent() {
        return Err(PeriodError::Divergent(format!(
            "epsilon word {eps} is not convergent (needs eps_1 = 1, eps_n = 0)"
        )));
    }
    if q < 4 {
        return Err(PeriodError::BadQ(q));
    }
    let fine = integrate_mzv(eps, &tanh_sinh(q));
    let coarse = integrate_mzv(eps, &tanh_sinh(q / 2));
    let m = eps.ones();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = sign * fine;
    let error_bound = (fine - coarse)
        .abs()
        .max(16.0 * f64::EPSILON * fine.abs());
    Ok(PeriodValue {
        value,
        value_im: 0.0,
        error_bound,
        heuristic: true,
        method: Method::Quadrature,
        params: q as u64,
    })
}

/// Complex tensor integration for generalized anchors.
fn integrate_anchors(anchors: &[Complex64], rule: &Rule) -> Complex64 {
    let n = anchors.len();
    let zero_at: Vec<bool> = anchors
        .iter()
        .map(|a| *a == Complex64::new(0.0, 0.0))
        .collect();
    let exps = cube_exponents(&zero_at);
    debug_assert!(exps.iter().all(|&e| e >= 0));

    struct Ctx<'a> {
        anchors: &'a [Complex64],
        zero_at: &'a [bool],
        exps: &'a [i32],
        rule: &'a Rule,
        // Compensated accumulation, componentwise on the complex value.
        sum: Complex64,
        carry: Complex64,
    }

    fn recurse(ctx: &mut Ctx<'_>, axis: usize, suffix: f64, partial: Complex64) {
        let i = axis - 1;
        for node in 0..ctx.rule.nodes.len() {
            let (u, w) = ctx.rule.nodes[node];
            let product = u * suffix;
            let mut f = partial * (w * u.powi(ctx.exps[i]));
            if !ctx.zero_at[i] {
                f /= Complex64::new(product, 0.0) - ctx.anchors[i];
            }
            if axis == 1 {
                let term = f - ctx.carry;
                let updated = ctx.sum + term;
                ctx.carry = (updated - ctx.sum) - term;
                ctx.sum = updated;
            } else {
                recurse(ctx, axis - 1, product, f);
            }
        }
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut ctx = Ctx {
        anchors,
        zero_at: &zero_at,
        exps: &exps,
        rule,
        sum: zero,
        carry: zero,
    };
    recurse(&mut ctx, n, 1.0, Complex64::new(1.0, 0.0));
    ctx.sum
}

/// Generalized iterated integral over the ordered simplex, without any sign
/// prefactor; complex-valued when the anchors are complex.
pub fn iterated_integral(a: &AnchorSequence, q: usize) -> Result<PeriodValue, PeriodError> {
    a.admissible()?;
    if q < 4 {
        return Err(PeriodError::BadQ(q));
    }
    let fine = integrate_anchors(a.values(), &tanh_sinh(q));
    let coarse = integrate_anchors(a.values(), &tanh_sinh(q / 2));
    let error_bound = (fine - coarse)
        .norm()
        .max(16.0 * f64::EPSILON * fine.norm());
    Ok(PeriodValue {
        value: fine.re,
        value_im: fine.im,
        error_bound,
        heuristic: true,
        method: Method::Quadrature,
        params: q as u64,
    })
}

/// Bookkeeping record for one framed-motive certificate: the divisor pair,
/// both disjointness reports, and the two period estimates, which must
/// agree within their combined error bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramedMotiveReport {
    pub composition: CompositionIndex,
    pub epsilon: EpsilonWord,
    pub weight: u32,
    pub divisor_a: Divisor,
    pub divisor_b: Divisor,
    pub disjointness: DisjointnessReport,
    pub vertex_avoidance: DisjointnessReport,
    pub period_series: PeriodValue,
    pub period_integral: PeriodValue,
    /// `(-1)^m` for depth m.
    pub sign: i32,
}

/// Assemble the full certificate for a composition: encode its ε-word,
/// build both divisors over the standard order, run both disjointness
/// checks and both period evaluations. Refuses to emit a report whose
/// certificates fail.
pub fn framed_report(
    c: &CompositionIndex,
    k_max: u64,
    q: usize,
) -> Result<FramedMotiveReport, PeriodError> {
    let eps = encode_epsilon(c);
    let n = eps.len();
    let order = MarkedSet::new(n)
        .map_err(PeriodError::Label)?
        .standard_order();
    let a = divisor_a(&eps)?;
    let b = divisor_b(&order)?;
    let disjointness = check_disjoint(&eps, &order)?;
    if !disjointness.disjoint {
        return Err(PeriodError::CertificationFailed(format!(
            "shared components: {:?}",
            disjointness
                .shared
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
        )));
    }
    let vertex_avoidance = check_vertex_avoidance(&eps, &order)?;
    if !vertex_avoidance.vertex_clear {
        return Err(PeriodError::CertificationFailed(format!(
            "offending vertex: {:?}",
            vertex_avoidance
                .offending_vertex
                .as_ref()
                .map(|f| f.partitions().iter().map(|p| p.to_string()).collect::<Vec<_>>())
        )));
    }
    let period_series = mzv_series(c, k_max)?;
    let period_integral = mzv_integral(&eps, q)?;
    let gap = (period_series.value - period_integral.value).abs();
    let budget = period_series.error_bound + period_integral.error_bound;
    if gap > budget {
        return Err(PeriodError::CertificationFailed(format!(
            "period mismatch: |{} - {}| = {gap:e} exceeds combined bound {budget:e}",
            period_series.value, period_integral.value
        )));
    }
    let sign = if c.depth().is_multiple_of(2) { 1 } else { -1 };
    Ok(FramedMotiveReport {
        composition: c.clone(),
        epsilon: eps,
        weight: c.weight(),
        divisor_a: a,
        divisor_b: b,
        disjointness,
        vertex_avoidance,
        period_series,
        period_integral,
        sign,
    })
}
