//! Decide differential smoothness from the classification and certify the
//! constructed calculus to a bounded degree.

use std::fmt;

use crate::calculus::{build_automorphisms, case_one_ansatz, AutomorphismFamily, Calculus, CheckOutcome, TheoremCase};
use crate::classifier::{classify, fmt_set, Decomposition, FamilyIdentification};
use crate::par::Execution;
use crate::pbw::{Monomial, PbwPolynomial, Rewriter};
use crate::presentation::AlgebraPresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Smooth,
    NotSmooth,
    Undetermined,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Smooth => "SMOOTH",
            Verdict::NotSmooth => "NOT_SMOOTH",
            Verdict::Undetermined => "UNDETERMINED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failure of `d` on the relation between `i in I` and `t in T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub i: usize,
    pub t: usize,
    pub residual: PbwPolynomial,
    /// Set when the residual vanishes, which the family restrictions exclude.
    pub contradicts_restrictions: bool,
}

#[derive(Debug, Clone)]
pub struct SmoothnessVerdict {
    pub verdict: Verdict,
    pub decomposition: Decomposition,
    pub identification: FamilyIdentification,
    pub theorem_case: Option<TheoremCase>,
    pub witness: Option<AutomorphismFamily>,
    pub obstruction: Option<Obstruction>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmoothnessError {
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("presentation is not PBW: triple {0} {1} {2} is not confluent")]
    NotPbw(usize, usize, usize),
}

fn require_pbw(p: &AlgebraPresentation, exec: Execution) -> Result<(), SmoothnessError> {
    let report = p.validate();
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(SmoothnessError::Invalid(msgs.join("; ")));
    }
    match Rewriter::new(p).is_pbw(exec).first_failure {
        Some((a, b, c)) => Err(SmoothnessError::NotPbw(a, b, c)),
        None => Ok(()),
    }
}

/// Gelfand-Kirillov dimension of a PBW diffusion algebra: the generator count.
pub fn gk_dimension(p: &AlgebraPresentation) -> Result<usize, SmoothnessError> {
    require_pbw(p, Execution::default())?;
    Ok(p.n())
}

pub fn decide_smoothness(p: &AlgebraPresentation) -> Result<SmoothnessVerdict, SmoothnessError> {
    decide_smoothness_with(p, Execution::default())
}

pub fn decide_smoothness_with(p: &AlgebraPresentation, exec: Execution) -> Result<SmoothnessVerdict, SmoothnessError> {
    require_pbw(p, exec)?;
    let (dec, fam) = classify(p);
    let mut v = SmoothnessVerdict {
        verdict: Verdict::Undetermined,
        decomposition: dec.clone(),
        identification: fam.clone(),
        theorem_case: None,
        witness: None,
        obstruction: None,
        notes: Vec::new(),
    };
    if fam.family.is_none() {
        v.notes.push(format!("coefficients fit no {} template: {}", fam.attempted, fam.violations.join("; ")));
        return Ok(v);
    }
    let t = dec.t_all();
    if let Some(&t0) = t.first() {
        let i0 = dec.i_set[0];
        let calc = Calculus::new(p, case_one_ansatz(p, &dec));
        let residual = calc.no_go_residual(i0, t0);
        let contradicts = residual.is_zero();
        if contradicts {
            v.notes.push("zero residual: the coupling to T vanishes, which the restrictions forbid".into());
        }
        v.verdict = Verdict::NotSmooth;
        v.obstruction = Some(Obstruction { i: i0, t: t0, residual, contradicts_restrictions: contradicts });
        return Ok(v);
    }
    match build_automorphisms(p, &dec, &fam) {
        Ok((case, nu)) => {
            v.verdict = Verdict::Smooth;
            v.theorem_case = Some(case);
            v.witness = Some(nu);
        }
        Err(e) => v.notes.push(e.to_string()),
    }
    Ok(v)
}

/// Degree bounds for the certification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub dd_degree: u32,
    pub connected_degree: u32,
    pub integrating_degree: u32,
    pub exec: Execution,
}

impl VerifyConfig {
    pub fn for_n(n: usize) -> Self {
        VerifyConfig {
            dd_degree: 4,
            connected_degree: 5,
            integrating_degree: if n <= 3 { 3 } else { 2 },
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub checks: Vec<CheckOutcome>,
}

impl WitnessReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn outcome(name: impl Into<String>, r: Result<(), String>) -> CheckOutcome {
    let name = name.into();
    match r {
        Ok(()) => CheckOutcome { name, passed: true, detail: String::new() },
        Err(detail) => CheckOutcome { name, passed: false, detail },
    }
}

fn flag(name: &str, ok: bool, detail: &str) -> CheckOutcome {
    outcome(name, if ok { Ok(()) } else { Err(detail.to_string()) })
}

/// Run every certification step for a twisting family.
pub fn verify_calculus(p: &AlgebraPresentation, nu: &AutomorphismFamily, cfg: VerifyConfig) -> WitnessReport {
    let calc = Calculus::new(p, nu.clone());
    let n = p.n();
    let mut checks = Vec::new();
    let auto = calc.verify_automorphisms();
    let first = auto.details.first().map(String::as_str).unwrap_or("");
    checks.push(flag("automorphisms_bijective", auto.bijective, first));
    checks.push(flag("relations_preserved", auto.relations_preserved, first));
    checks.push(flag("pairwise_commute", auto.pairwise_commute, first));
    if !(auto.bijective && auto.relations_preserved && auto.pairwise_commute) {
        return WitnessReport { checks };
    }
    checks.push(flag("wedge_consistent", calc.wedge_consistent(), "lambda_ab * lambda_ba != 1"));
    checks.push(outcome("leibniz_compatible", calc.leibniz_compatible()));
    checks.push(outcome("closed_form_partials", closed_form_agreement(&calc, cfg.dd_degree, cfg.exec)));
    checks.push(outcome("d_squared_zero", calc.dd_zero(cfg.dd_degree, cfg.exec)));
    checks.push(flag(
        "connected",
        calc.check_connectedness(cfg.connected_degree, cfg.exec),
        "d has a non-scalar kernel element",
    ));
    let volume = calc.nu.nu_omega().inverse().is_some();
    checks.push(flag("volume_form", volume, "nu_omega is not invertible"));
    if volume {
        for k in 0..n {
            checks.push(outcome(
                format!("integrating_form_k{k}"),
                calc.check_integrating_form(k, cfg.integrating_degree, cfg.exec),
            ));
        }
    }
    WitnessReport { checks }
}

/// Full certification of a `Smooth` verdict.
pub fn verify_witness(p: &AlgebraPresentation, v: &SmoothnessVerdict, cfg: VerifyConfig) -> WitnessReport {
    match &v.witness {
        Some(nu) => verify_calculus(p, nu, cfg),
        None => WitnessReport { checks: vec![flag("witness_present", false, "verdict carries no witness")] },
    }
}

/// Leibniz partials against the product formula on grouped words in both
/// orders, all monomials up to `bound`.
pub fn closed_form_agreement(calc: &Calculus, bound: u32, exec: Execution) -> Result<(), String> {
    let n = calc.n();
    let monos = Monomial::up_to_degree(n, bound);
    let bad = exec.map(&monos, |m| {
        let dec_poly = PbwPolynomial::monomial(m.clone());
        let inc_poly = calc.rw.word_value(&m.increasing_word());
        for a in 1..=n {
            if calc.partial_derivative(a, &dec_poly) != calc.closed_form_partial(a, m, false) {
                return Some(format!("d/dD{a} of {m} (decreasing order)"));
            }
            if calc.partial_derivative(a, &inc_poly) != calc.closed_form_partial(a, m, true) {
                return Some(format!("d/dD{a} of {m} (increasing order)"));
            }
        }
        None
    });
    match bad.into_iter().flatten().next() {
        Some(e) => Err(format!("closed form differs for {e}")),
        None => Ok(()),
    }
}

/// `key: value` lines for a verdict.
pub fn verdict_lines(v: &SmoothnessVerdict, gkdim: usize) -> Vec<String> {
    let dec = &v.decomposition;
    let mut out = vec![
        format!("verdict: {}", v.verdict),
        format!("case: {}", v.theorem_case.map(TheoremCase::name).unwrap_or("-")),
        format!("family: {}", v.identification.family_name()),
        format!("I: {}", fmt_set(&dec.i_set)),
        format!("S: {}", fmt_set(&dec.s)),
        format!("T: {}", fmt_set(&dec.t_all())),
        format!("gkdim: {gkdim}"),
    ];
    if let Some(o) = &v.obstruction {
        out.push(format!("obstruction: i={} t={} residual={}", o.i, o.t, o.residual));
    }
    for note in &v.notes {
        out.push(format!("note: {note}"));
    }
    out
}
