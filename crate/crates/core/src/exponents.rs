//! Exact exponent engine: critical weights, admissibility conditions and the
//! algebraic identities behind the contraction constants.
//!
//! Every quantity is a [`Rat`]; nothing in this module touches floating point.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rational::{Rat, Relation};

/// Exponent data of the scalar problem `u_t + (-Δ)^{β/2} u = B(u,…,u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarParams {
    pub beta: Rat,
    pub n: u32,
    /// Degree of the multilinear form.
    pub p: Rat,
    /// Scaling degree of the data-space norm.
    pub a: Rat,
    /// Scaling degree of the form.
    pub sigma: Rat,
}

impl ScalarParams {
    pub fn new(beta: Rat, n: u32, p: Rat, a: Rat, sigma: Rat) -> Result<Self> {
        let params = ScalarParams { beta, n, p, a, sigma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_positive() {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if self.p <= Rat::ONE {
            return Err(Error::InvalidParameter(format!("p must be > 1, got {}", self.p)));
        }
        Ok(())
    }
}

/// Exponent data of the coupled system; `B₁` is `q`-linear in `v`,
/// `B₂` is `p`-linear in `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemParams {
    pub beta: Rat,
    pub n: u32,
    pub p: Rat,
    pub q: Rat,
    pub a: Rat,
    pub b: Rat,
    pub sigma1: Rat,
    pub sigma2: Rat,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_positive() {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if self.p * self.q <= Rat::ONE {
            return Err(Error::InvalidParameter("p*q must be > 1".into()));
        }
        Ok(())
    }

    /// The system with the roles of `(u, p, a, σ₁)` and `(v, q, b, σ₂)` exchanged.
    pub fn swapped(&self) -> Self {
        SystemParams {
            p: self.q,
            q: self.p,
            a: self.b,
            b: self.a,
            sigma1: self.sigma2,
            sigma2: self.sigma1,
            ..*self
        }
    }

    /// Scalar parameters for the `u` equation when the system is diagonal.
    pub fn as_scalar(&self) -> ScalarParams {
        ScalarParams { beta: self.beta, n: self.n, p: self.p, a: self.a, sigma: self.sigma1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub name: String,
    pub lhs: Rat,
    pub relation: Relation,
    pub rhs: Rat,
    pub holds: bool,
}

impl Condition {
    fn new(name: impl Into<String>, lhs: Rat, relation: Relation, rhs: Rat) -> Self {
        Condition { name: name.into(), lhs, relation, rhs, holds: relation.holds(lhs, rhs) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    /// `("alpha", α)` for the scalar problem, `("alpha1", α₁), ("alpha2", α₂)` for systems.
    pub alphas: Vec<(&'static str, Rat)>,
    pub conditions: Vec<Condition>,
    pub admissible: bool,
    /// Free-form remarks such as "arithmetic only" for fractional degrees.
    pub notes: Vec<String>,
}

impl AdmissibilityReport {
    fn from_conditions(alphas: Vec<(&'static str, Rat)>, conditions: Vec<Condition>) -> Self {
        let admissible = conditions.iter().all(|c| c.holds);
        AdmissibilityReport { alphas, conditions, admissible, notes: Vec::new() }
    }

    pub fn alpha(&self) -> Option<Rat> {
        self.alphas.first().map(|(_, a)| *a)
    }

    /// Names of the conditions that do not hold.
    pub fn failed(&self) -> Vec<String> {
        self.conditions.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.alphas {
            let _ = writeln!(out, "{name} = {value}");
        }
        for c in &self.conditions {
            let _ = writeln!(
                out,
                "[{}] {}: {} {} {}",
                if c.holds { "ok" } else { "FAIL" },
                c.name,
                c.lhs,
                c.relation.symbol(),
                c.rhs
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(out, "admissible = {}", self.admissible);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("condition,lhs,relation,rhs,holds\n");
        for c in &self.conditions {
            let _ = writeln!(
                out,
                "\"{}\",{},{},{},{}",
                c.name.replace('"', "'"),
                c.lhs,
                c.relation.symbol(),
                c.rhs,
                c.holds
            );
        }
        out
    }
}

fn degree_notes(degrees: &[(&str, Rat)]) -> Vec<String> {
    degrees
        .iter()
        .filter(|(_, d)| !d.is_integer())
        .map(|(name, d)| format!("{name} = {d} is not an integer: arithmetic only, not solvable"))
        .collect()
}

/// `α = (β−σ)/(p−1) + a`.
pub fn compute_alpha_scalar(params: &ScalarParams) -> Result<Rat> {
    let pm1 = params.p - Rat::ONE;
    if pm1.is_zero() {
        return Err(Error::DivisionByZero("alpha = (beta-sigma)/(p-1)+a with p = 1"));
    }
    Ok((params.beta - params.sigma) / pm1 + params.a)
}

/// Global strip condition `(β−σ)/(p−1) − β/p < −a < (β−σ)/(p−1)`.
pub fn check_global_scalar(params: &ScalarParams) -> Result<AdmissibilityReport> {
    params.validate()?;
    let alpha = compute_alpha_scalar(params)?;
    let crit = (params.beta - params.sigma) / (params.p - Rat::ONE);
    let lower = crit - params.beta / params.p;
    let conditions = vec![
        Condition::new("(beta-sigma)/(p-1) - beta/p < -a", lower, Relation::Lt, -params.a),
        Condition::new("-a < (beta-sigma)/(p-1)", -params.a, Relation::Lt, crit),
    ];
    let mut report = AdmissibilityReport::from_conditions(vec![("alpha", alpha)], conditions);
    report.notes = degree_notes(&[("p", params.p)]);
    Ok(report)
}

/// Local-in-time conditions for a candidate weight `alpha`.
///
/// When `alpha` is `None` it defaults to half of
/// `min{β/p, (β−σ)/(p−1)+a, −(p−1)a+σ}`. The requirement
/// `1 + [(p−1)(a−α)−σ]/β > 0` used for the time factor is listed as its own
/// row; it is algebraically the same as `α < (β−σ)/(p−1)+a`.
pub fn check_local_scalar(params: &ScalarParams, alpha: Option<Rat>) -> Result<AdmissibilityReport> {
    params.validate()?;
    let (beta, p, a, sigma) = (params.beta, params.p, params.a, params.sigma);
    let pm1 = p - Rat::ONE;
    let b1 = beta / p;
    let b2 = compute_alpha_scalar(params)?;
    let b3 = -(pm1 * a) + sigma;
    let bound = b1.min(b2).min(b3);
    let alpha = alpha.unwrap_or(bound / Rat::int(2));
    let time_exponent = Rat::ONE + (pm1 * (a - alpha) - sigma) / beta;
    let conditions = vec![
        Condition::new("sigma < beta + (p-1)a", sigma, Relation::Lt, beta + pm1 * a),
        Condition::new("0 < alpha", Rat::ZERO, Relation::Lt, alpha),
        Condition::new("alpha < beta/p", alpha, Relation::Lt, b1),
        Condition::new("alpha < (beta-sigma)/(p-1) + a", alpha, Relation::Lt, b2),
        Condition::new("alpha < -(p-1)a + sigma", alpha, Relation::Lt, b3),
        Condition::new("0 < 1 + [(p-1)(a-alpha) - sigma]/beta", Rat::ZERO, Relation::Lt, time_exponent),
    ];
    let mut report = AdmissibilityReport::from_conditions(vec![("alpha", alpha)], conditions);
    report.notes = degree_notes(&[("p", p)]);
    Ok(report)
}

/// `(α₁, α₂)` of the coupled system.
pub fn compute_alpha_system(params: &SystemParams) -> Result<(Rat, Rat)> {
    let SystemParams { beta, p, q, a, b, sigma1, sigma2, .. } = *params;
    let d = p * q - Rat::ONE;
    if d.is_zero() {
        return Err(Error::DivisionByZero("system weights with pq = 1"));
    }
    let alpha1 = beta * (Rat::ONE + q) / d + a - (sigma1 + q * sigma2) / d;
    let alpha2 = beta * (Rat::ONE + p) / d + b - (sigma2 + p * sigma1) / d;
    Ok((alpha1, alpha2))
}

/// The six strict inequalities `α₁, α₂ > 0`, `α₁+qb < a+σ₁`, `α₂+pa < b+σ₂`,
/// `α₁ < qα₂`, `α₂ < pα₁`.
pub fn check_global_system(params: &SystemParams) -> Result<AdmissibilityReport> {
    params.validate()?;
    let (alpha1, alpha2) = compute_alpha_system(params)?;
    let SystemParams { p, q, a, b, sigma1, sigma2, .. } = *params;
    let conditions = vec![
        Condition::new("0 < alpha1", Rat::ZERO, Relation::Lt, alpha1),
        Condition::new("0 < alpha2", Rat::ZERO, Relation::Lt, alpha2),
        Condition::new("alpha1 + q b < a + sigma1", alpha1 + q * b, Relation::Lt, a + sigma1),
        Condition::new("alpha2 + p a < b + sigma2", alpha2 + p * a, Relation::Lt, b + sigma2),
        Condition::new("alpha1 < q alpha2", alpha1, Relation::Lt, q * alpha2),
        Condition::new("alpha2 < p alpha1", alpha2, Relation::Lt, p * alpha1),
    ];
    let mut report =
        AdmissibilityReport::from_conditions(vec![("alpha1", alpha1), ("alpha2", alpha2)], conditions);
    report.notes = degree_notes(&[("p", p), ("q", q)]);
    Ok(report)
}

/// Checks `β+(p−1)a−σ = (p−1)α`, `β−pα = −(p−1)a+σ−α`, `β+(p−1)a−σ−α = pα`
/// and positivity of the three right-hand sides.
pub fn lemma_identities_scalar(params: &ScalarParams) -> bool {
    let Ok(alpha) = compute_alpha_scalar(params) else {
        return false;
    };
    let ScalarParams { beta, p, a, sigma, .. } = *params;
    let pm1 = p - Rat::ONE;
    let r1 = pm1 * alpha;
    let r2 = -(pm1 * a) + sigma - alpha;
    let r3 = p * alpha;
    // The third row is the identity behind `β+(p−1)a > σ−α`.
    let identities = beta + pm1 * a - sigma == r1
        && beta - p * alpha == r2
        && beta + pm1 * a - sigma + alpha == r3
        && beta + pm1 * a == sigma + pm1 * alpha;
    identities && r1.is_positive() && r2.is_positive() && r3.is_positive()
}

/// The four groups of system identities and inequalities that make every
/// system constant finite.
pub fn lemma_identities_system(params: &SystemParams) -> bool {
    let Ok((alpha1, alpha2)) = compute_alpha_system(params) else {
        return false;
    };
    let SystemParams { beta, p, q, a, b, sigma1, sigma2, .. } = *params;
    let identities = beta - a + alpha1 - q * alpha2 == -(q * b) + sigma1
        && beta - b - p * alpha1 + alpha2 == -(p * a) + sigma2;
    let second = beta - a > -(q * b) + sigma1 && beta - b > -(p * a) + sigma2;
    let third = beta > q * alpha2 && beta > p * alpha1;
    let fourth = beta + alpha1 - a > -(q * b) + sigma1 && beta + alpha2 - b > -(p * a) + sigma2;
    identities && second && third && fourth
}

/// Lebesgue exponent `r ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormIndex {
    Finite(Rat),
    Infinity,
}

impl NormIndex {
    pub fn finite(r: Rat) -> Result<Self> {
        if r < Rat::ONE {
            return Err(Error::InvalidParameter(format!("norm index must be >= 1, got {r}")));
        }
        Ok(NormIndex::Finite(r))
    }

    /// `1/r`, zero for `r = ∞`.
    pub fn reciprocal(&self) -> Rat {
        match self {
            NormIndex::Finite(r) => Rat::ONE / *r,
            NormIndex::Infinity => Rat::ZERO,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormIndex::Finite(r) => r.to_f64(),
            NormIndex::Infinity => f64::INFINITY,
        }
    }
}

impl std::str::FromStr for NormIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(NormIndex::Infinity),
            other => NormIndex::finite(other.parse()?),
        }
    }
}

impl std::fmt::Display for NormIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormIndex::Finite(r) => write!(f, "{r}"),
            NormIndex::Infinity => write!(f, "inf"),
        }
    }
}

/// Scaling degree `−n/r` of the `L^r` norm.
pub fn lebesgue_scaling_degree(r: NormIndex, n: u32) -> Result<Rat> {
    if let NormIndex::Finite(v) = r {
        if v < Rat::ONE {
            return Err(Error::InvalidParameter(format!("norm index must be >= 1, got {v}")));
        }
    }
    Ok(-(Rat::int(n as i128) * r.reciprocal()))
}

/// Open interval of `n/r` values for which `a = −n/r` satisfies the global
/// strip condition, intersected with `(0, ∞)`.
pub fn admissible_r_interval(beta: Rat, p: Rat, sigma: Rat, _n: u32) -> Result<Option<(Rat, Rat)>> {
    if p <= Rat::ONE {
        return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
    }
    let hi = (beta - sigma) / (p - Rat::ONE);
    let lo = (hi - beta / p).max(Rat::ZERO);
    Ok(if lo < hi { Some((lo, hi)) } else { None })
}

/// Converts an open `n/r` interval into the corresponding open `r` interval
/// (`None` for an unbounded upper end).
pub fn r_bounds_from_interval(n: u32, interval: (Rat, Rat)) -> (Rat, Option<Rat>) {
    let nn = Rat::int(n as i128);
    let r_lo = nn / interval.1;
    let r_hi = if interval.0.is_zero() { None } else { Some(nn / interval.0) };
    (r_lo, r_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rat {
        Rat::new(n, d)
    }

    fn scalar(beta: Rat, n: u32, p: Rat, a: Rat, sigma: Rat) -> ScalarParams {
        ScalarParams { beta, n, p, a, sigma }
    }

    #[test]
    fn alpha_scalar_examples() {
        let s = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        assert_eq!(compute_alpha_scalar(&s).unwrap(), r(1, 2));
        let s = scalar(r(2, 1), 1, r(2, 1), r(-1, 2), r(2, 1));
        assert_eq!(compute_alpha_scalar(&s).unwrap(), r(-1, 2));
        let s = scalar(r(2, 1), 1, Rat::ONE, r(-1, 2), Rat::ZERO);
        assert!(matches!(compute_alpha_scalar(&s), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn quadratic_heat_reduction() {
        // beta = p = 2 gives alpha = 2 - sigma - n/r
        for (n, rr, sigma) in [(3u32, r(2, 1), Rat::ZERO), (2, r(5, 3), r(1, 2)), (1, r(7, 4), r(1, 3))] {
            let a = lebesgue_scaling_degree(NormIndex::Finite(rr), n).unwrap();
            let s = scalar(r(2, 1), n, r(2, 1), a, sigma);
            let expect = r(2, 1) - sigma - Rat::int(n as i128) / rr;
            assert_eq!(compute_alpha_scalar(&s).unwrap(), expect);
        }
    }

    #[test]
    fn global_scalar_examples() {
        let heat = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        let rep = check_global_scalar(&heat).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.alpha(), Some(r(1, 2)));
        assert_eq!(rep.conditions[0].lhs, Rat::ONE);
        assert_eq!(rep.conditions[0].rhs, r(3, 2));
        assert_eq!(rep.conditions[1].rhs, r(2, 1));

        for rr in [1, 2, 3, 10] {
            let hj = scalar(r(2, 1), 2, r(2, 1), r(-2, rr), r(2, 1));
            assert!(!check_global_scalar(&hj).unwrap().admissible);
        }

        let conv = scalar(r(2, 1), 1, r(2, 1), r(-1, 2), Rat::ONE);
        let rep = check_global_scalar(&conv).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.alpha(), Some(r(1, 2)));
        assert_eq!(rep.conditions[0].lhs, Rat::ZERO);
    }

    #[test]
    fn boundary_equality_is_inadmissible() {
        // -a equal to the upper bound
        let s = scalar(r(2, 1), 1, r(2, 1), r(-2, 1), Rat::ZERO);
        assert!(!check_global_scalar(&s).unwrap().admissible);
    }

    #[test]
    fn local_scalar_examples() {
        let s = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        assert!(check_local_scalar(&s, Some(r(1, 4))).unwrap().admissible);
        assert!(!check_local_scalar(&s, Some(r(3, 4))).unwrap().admissible);
        let rep = check_local_scalar(&s, None).unwrap();
        assert_eq!(rep.alpha(), Some(r(1, 4)));
        let s = scalar(Rat::ONE, 3, r(2, 1), r(-3, 2), Rat::ZERO);
        for alpha in [r(1, 100), r(1, 4), r(1, 2)] {
            assert!(!check_local_scalar(&s, Some(alpha)).unwrap().admissible);
        }
    }

    #[test]
    fn local_time_exponent_row_matches_alpha_bound() {
        let s = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        for num in 1..12 {
            let alpha = r(num, 8);
            let rep = check_local_scalar(&s, Some(alpha)).unwrap();
            assert_eq!(rep.conditions[3].holds, rep.conditions[5].holds, "alpha = {alpha}");
        }
    }

    #[test]
    fn system_examples() {
        let sys = SystemParams {
            beta: r(2, 1),
            n: 3,
            p: r(2, 1),
            q: r(2, 1),
            a: r(-3, 2),
            b: r(-3, 2),
            sigma1: Rat::ZERO,
            sigma2: Rat::ZERO,
        };
        assert_eq!(compute_alpha_system(&sys).unwrap(), (r(1, 2), r(1, 2)));
        let rep = check_global_system(&sys).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.conditions.len(), 6);

        let bad = SystemParams { a: r(-1, 4), b: r(-1, 4), ..sys };
        let rep = check_global_system(&bad).unwrap();
        assert_eq!(rep.alphas[0].1, r(7, 4));
        assert!(!rep.admissible);
        assert!(!rep.conditions[2].holds);
        assert_eq!(rep.conditions[2].lhs, r(5, 4));

        let degenerate = SystemParams { p: Rat::ONE, q: Rat::ONE, ..sys };
        assert!(compute_alpha_system(&degenerate).is_err());
    }

    #[test]
    fn reduction_remark_values() {
        // sigma1 = sigma2 and b = (p+1)/(q+1) a
        let (p, q, beta, sigma, a) = (r(3, 1), r(2, 1), r(2, 1), r(1, 3), r(-1, 2));
        let b = (p + Rat::ONE) / (q + Rat::ONE) * a;
        let sys = SystemParams { beta, n: 1, p, q, a, b, sigma1: sigma, sigma2: sigma };
        let (a1, a2) = compute_alpha_system(&sys).unwrap();
        assert_eq!(a1, (beta - sigma) * (q + Rat::ONE) / (p * q - Rat::ONE) + a);
        assert_eq!(a2, (p + Rat::ONE) / (q + Rat::ONE) * a1);
    }

    #[test]
    fn lemma_examples() {
        let s = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        assert!(lemma_identities_scalar(&s));
        let s = scalar(r(2, 1), 1, r(2, 1), r(-1, 2), r(2, 1));
        assert!(!lemma_identities_scalar(&s));
        let sys = SystemParams {
            beta: r(2, 1),
            n: 3,
            p: r(2, 1),
            q: r(2, 1),
            a: r(-3, 2),
            b: r(-3, 2),
            sigma1: Rat::ZERO,
            sigma2: Rat::ZERO,
        };
        assert!(lemma_identities_system(&sys));
        let bad = SystemParams { a: r(-1, 4), b: r(-1, 4), ..sys };
        assert!(!lemma_identities_system(&bad));
    }

    #[test]
    fn scaling_degree_examples() {
        assert_eq!(lebesgue_scaling_degree(NormIndex::Finite(r(2, 1)), 3).unwrap(), r(-3, 2));
        assert_eq!(lebesgue_scaling_degree(NormIndex::Infinity, 2).unwrap(), Rat::ZERO);
        assert_eq!(lebesgue_scaling_degree(NormIndex::Finite(Rat::ONE), 1).unwrap(), r(-1, 1));
        assert!(lebesgue_scaling_degree(NormIndex::Finite(r(1, 2)), 1).is_err());
        assert!("abc".parse::<NormIndex>().is_err());
        assert_eq!("inf".parse::<NormIndex>().unwrap(), NormIndex::Infinity);
    }

    #[test]
    fn r_interval_examples() {
        let i = admissible_r_interval(r(2, 1), r(2, 1), Rat::ZERO, 3).unwrap().unwrap();
        assert_eq!(i, (Rat::ONE, r(2, 1)));
        assert_eq!(r_bounds_from_interval(3, i), (r(3, 2), Some(r(3, 1))));
        assert_eq!(admissible_r_interval(r(2, 1), r(2, 1), r(2, 1), 3).unwrap(), None);
        let i = admissible_r_interval(Rat::ONE, r(2, 1), Rat::ZERO, 1).unwrap().unwrap();
        assert_eq!(i, (r(1, 2), Rat::ONE));
    }

    #[test]
    fn fractional_degree_flagged() {
        let s = scalar(r(2, 1), 3, r(5, 2), r(-3, 2), Rat::ZERO);
        let rep = check_global_scalar(&s).unwrap();
        assert!(rep.notes.iter().any(|n| n.contains("arithmetic only")));
    }

    #[test]
    fn csv_and_text_render() {
        let s = scalar(r(2, 1), 3, r(2, 1), r(-3, 2), Rat::ZERO);
        let rep = check_global_scalar(&s).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("condition,lhs,relation,rhs,holds\n"));
        assert!(csv.contains(",1,<,3/2,true"));
        assert!(rep.to_text().contains("admissible = true"));
    }
}
