//! Index-set decomposition, family identification and relation templates.
//!
//! Indices with `x != 0` form `I`, the rest `R`. `R` splits into connected
//! components (edge when `g(r,s) g(s,r) != 0`). With `|I| >= 2` a component
//! touching `I` the same way belongs to `S`, otherwise to `T`; a `T`
//! component sitting strictly inside one gap between consecutive elements of
//! `I` is tagged bullet, every other one circle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::par::Execution;
use crate::presentation::AlgebraPresentation;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    AI,
    AII,
    B,
    C,
    D,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::AI => "A_I",
            Family::AII => "A_II",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `{1,2,3}`
pub fn fmt_set(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// `[{1},{3,4}]`
pub fn fmt_blocks(b: &[Vec<usize>]) -> String {
    let parts: Vec<String> = b.iter().map(|s| fmt_set(s)).collect();
    format!("[{}]", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Decomposition {
    pub n: usize,
    pub i_set: Vec<usize>,
    pub r_set: Vec<usize>,
    /// Sorted by smallest element.
    pub r_components: Vec<Vec<usize>>,
    /// Union of the S components (all of `R` when `|I| = 1`).
    pub s: Vec<usize>,
    pub s_components: Vec<Vec<usize>>,
    pub t_circ: Vec<Vec<usize>>,
    pub t_bullet: Vec<Vec<usize>>,
}

impl Decomposition {
    /// Assemble from explicit blocks; `R`, its components and `S` follow.
    pub fn from_blocks(
        n: usize,
        i_set: Vec<usize>,
        s_components: Vec<Vec<usize>>,
        t_circ: Vec<Vec<usize>>,
        t_bullet: Vec<Vec<usize>>,
    ) -> Self {
        let mut r_components: Vec<Vec<usize>> =
            s_components.iter().chain(&t_circ).chain(&t_bullet).cloned().collect();
        r_components.iter_mut().for_each(|c| c.sort());
        r_components.sort();
        let mut r_set: Vec<usize> = r_components.concat();
        r_set.sort();
        let mut s: Vec<usize> = s_components.concat();
        s.sort();
        Decomposition { n, i_set, r_set, r_components, s, s_components, t_circ, t_bullet }
    }

    /// Tag a `T` component relative to `I`.
    pub fn is_bullet(i_set: &[usize], comp: &[usize]) -> bool {
        i_set.windows(2).any(|w| comp.iter().all(|&t| w[0] < t && t < w[1]))
    }

    pub fn t_all(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.t_circ.concat();
        t.extend(self.t_bullet.concat());
        t.sort();
        t
    }

    /// `family | I | S | Tcirc | Tbullet | R` summary.
    pub fn row(&self, family: &str) -> String {
        format!(
            "{} | I={} | S={} | Tcirc={} | Tbullet={} | R={}",
            family,
            fmt_set(&self.i_set),
            fmt_set(&self.s),
            fmt_blocks(&self.t_circ),
            fmt_blocks(&self.t_bullet),
            fmt_blocks(&self.r_components)
        )
    }
}

/// Compute `I`, `R`, the components and the `S`/`T` split.
pub fn decompose(p: &AlgebraPresentation) -> Decomposition {
    let n = p.n();
    let i_set: Vec<usize> = (1..=n).filter(|&a| !p.x(a).is_zero()).collect();
    let r_set: Vec<usize> = (1..=n).filter(|&a| p.x(a).is_zero()).collect();
    let linked = |a: usize, b: usize| !(p.g(a, b) * p.g(b, a)).is_zero();

    let mut seen = BTreeSet::new();
    let mut r_components = Vec::new();
    for &r in &r_set {
        if !seen.insert(r) {
            continue;
        }
        let mut comp = vec![r];
        let mut k = 0;
        while k < comp.len() {
            let a = comp[k];
            for &b in &r_set {
                if !seen.contains(&b) && linked(a, b) {
                    seen.insert(b);
                    comp.push(b);
                }
            }
            k += 1;
        }
        comp.sort();
        r_components.push(comp);
    }
    r_components.sort();

    let mut dec = Decomposition { n, i_set: i_set.clone(), r_set: r_set.clone(), r_components: r_components.clone(), ..Default::default() };
    match i_set.len() {
        0 => {}
        1 => {
            dec.s = r_set;
            dec.s_components = r_components;
        }
        _ => {
            for comp in r_components {
                let touches = comp.iter().any(|&r| i_set.iter().any(|&i| linked(i, r)));
                if touches {
                    dec.s.extend(&comp);
                    dec.s_components.push(comp);
                } else if Decomposition::is_bullet(&i_set, &comp) {
                    dec.t_bullet.push(comp);
                } else {
                    dec.t_circ.push(comp);
                }
            }
            dec.s.sort();
        }
    }
    dec
}

/// Affine expression `c + sum a_k * param_k` over named parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExpr {
    constant: Scalar,
    terms: Vec<(String, Scalar)>,
}

impl LinExpr {
    pub fn constant(c: Scalar) -> Self {
        LinExpr { constant: c, terms: Vec::new() }
    }

    pub fn zero() -> Self {
        LinExpr::default()
    }

    pub fn param(name: impl Into<String>) -> Self {
        LinExpr { constant: Scalar::zero(), terms: vec![(name.into(), Scalar::one())] }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    fn add_scaled(mut self, other: &LinExpr, c: &Scalar) -> LinExpr {
        self.constant += &(&other.constant * c);
        for (name, a) in &other.terms {
            let delta = a * c;
            match self.terms.iter_mut().find(|(k, _)| k == name) {
                Some((_, v)) => *v += &delta,
                None => self.terms.push((name.clone(), delta)),
            }
        }
        self.terms.retain(|(_, v)| !v.is_zero());
        self
    }

    pub fn plus(self, other: &LinExpr) -> LinExpr {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn minus(self, other: &LinExpr) -> LinExpr {
        self.add_scaled(other, &-Scalar::one())
    }

    pub fn negated(self) -> LinExpr {
        LinExpr::zero().add_scaled(&self, &-Scalar::one())
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(k, _)| k.as_str())
    }

    pub fn eval(&self, values: &BTreeMap<String, Scalar>) -> Option<Scalar> {
        let mut acc = self.constant.clone();
        for (k, a) in &self.terms {
            acc += &(a * values.get(k)?);
        }
        Some(acc)
    }

    /// True when the expression is `1 * name`.
    fn as_bare_param(&self) -> Option<&str> {
        match self.terms.as_slice() {
            [(k, a)] if a.is_one() && self.constant.is_zero() => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(&Scalar, String)> = self.terms.iter().map(|(k, a)| (a, k.clone())).collect();
        if !self.constant.is_zero() {
            items.push((&self.constant, "1".to_string()));
        }
        f.write_str(&crate::pbw::render_terms(items))
    }
}

/// Side condition `expr != 0`, rendered as `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub expr: LinExpr,
    pub text: String,
}

impl Restriction {
    fn nonzero(e: LinExpr) -> Self {
        let text = format!("{e} != 0");
        Restriction { expr: e, text }
    }

    fn differ(a: LinExpr, b: LinExpr) -> Self {
        let text = format!("{a} != {b}");
        Restriction { expr: a.minus(&b), text }
    }
}

/// Symbolic relation template for one decomposition shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub family: Family,
    /// Case name for three generators (`A_I`, `B(2)`, `C(1)`, ...).
    pub label: Option<String>,
    pub decomposition: Decomposition,
    /// `g(a,b)` for every ordered pair `a != b`.
    pub coefficients: BTreeMap<(usize, usize), LinExpr>,
    /// Parameter names in order of first use (`x{k}` last).
    pub params: Vec<String>,
    pub restrictions: Vec<Restriction>,
}

fn x_name(k: usize) -> String {
    format!("x{k}")
}

fn q_name(s: usize, r: usize) -> String {
    format!("q{s}_{r}")
}

struct Builder {
    coeffs: BTreeMap<(usize, usize), LinExpr>,
    restrictions: Vec<Restriction>,
}

impl Builder {
    fn set(&mut self, a: usize, b: usize, e: LinExpr) {
        self.coeffs.insert((a, b), e);
    }

    fn pair(&mut self, a: usize, b: usize, gab: LinExpr, gba: LinExpr) {
        self.set(a, b, gab);
        self.set(b, a, gba);
    }

    fn nonzero(&mut self, e: LinExpr) {
        let r = Restriction::nonzero(e);
        if !self.restrictions.contains(&r) {
            self.restrictions.push(r);
        }
    }

    fn differ(&mut self, a: LinExpr, b: LinExpr) {
        let r = Restriction::differ(a, b);
        if !self.restrictions.contains(&r) {
            self.restrictions.push(r);
        }
    }

    /// A relation `c : D_u D_t : = ...` for an `I` index `u` and `t` in `R`
    /// whose only nonzero coefficient is the normally ordered one.
    fn one_sided(&mut self, u: usize, t: usize, c: LinExpr) {
        if u < t {
            self.pair(u, t, c, LinExpr::zero());
        } else {
            self.pair(t, u, c.negated(), LinExpr::zero());
        }
    }
}

/// Relation templates for `family` on the block structure of `dec`.
pub fn build_skeleton(family: Family, dec: &Decomposition) -> Skeleton {
    let n = dec.n;
    let mut b = Builder { coeffs: BTreeMap::new(), restrictions: Vec::new() };
    fn p(k: impl Into<String>) -> LinExpr {
        LinExpr::param(k)
    }
    let i_set = &dec.i_set;

    // I with I
    for (k, &i) in i_set.iter().enumerate() {
        for &j in &i_set[k + 1..] {
            match family {
                Family::AI => {
                    b.pair(i, j, p("g"), p("g"));
                    b.nonzero(p("g"));
                }
                Family::AII => {
                    let (gi, gj) = (p(format!("g{i}")), p(format!("g{j}")));
                    b.pair(i, j, gi.clone().minus(&gj), LinExpr::zero());
                    b.differ(gi, gj);
                }
                Family::B => {
                    b.pair(i, j, p("g"), p("g").minus(&p("Lambda")));
                    b.nonzero(p("g"));
                }
                Family::C | Family::D => unreachable!("|I| <= 1"),
            }
        }
    }

    // I with S (or with every R component when |I| = 1)
    match family {
        Family::AI => {
            for &s in &dec.s {
                let gs = p(format!("g{s}"));
                for &i in i_set {
                    b.pair(i, s, gs.clone(), gs.clone());
                }
                b.nonzero(gs);
            }
        }
        Family::B => {
            let lam = p("Lambda");
            for &s in &dec.s {
                let gs = p(format!("g{s}"));
                let shifted = gs.clone().minus(&lam);
                // i = min I pairs as (g_s, g_s - Lambda) seen from i, j = max I
                // the other way round.
                let (i, j) = (i_set[0], i_set[1]);
                b.set(i, s, gs.clone());
                b.set(s, i, shifted.clone());
                b.set(s, j, gs.clone());
                b.set(j, s, shifted);
                b.nonzero(gs.clone());
                b.differ(gs, lam.clone());
            }
        }
        Family::C => {
            let i = i_set[0];
            for (a, comp) in dec.s_components.iter().enumerate() {
                let lam = p(format!("Lambda{}", a + 1));
                for &r in comp {
                    let gr = p(format!("g{r}"));
                    b.set(i, r, gr.clone());
                    b.set(r, i, gr.clone().minus(&lam));
                    // only the leading coefficient of the pair is constrained
                    if r > i {
                        b.nonzero(gr);
                    } else {
                        b.differ(gr, lam.clone());
                    }
                }
            }
        }
        Family::AII | Family::D => {}
    }

    // I with T
    for (a, comp) in dec.t_circ.iter().enumerate() {
        let gc = p(format!("gc{}", a + 1));
        for &t in comp {
            for (k, &u) in i_set.iter().enumerate() {
                let c = match family {
                    Family::AI => gc.clone(),
                    Family::AII => p(format!("g{u}")).plus(&gc),
                    Family::B if k == 0 => gc.clone(),
                    Family::B => gc.clone().minus(&p("Lambda")),
                    Family::C | Family::D => unreachable!(),
                };
                b.one_sided(u, t, c.clone());
                if family == Family::B && k > 0 {
                    b.differ(gc.clone(), p("Lambda"));
                } else {
                    b.nonzero(c);
                }
            }
        }
    }
    for (a, comp) in dec.t_bullet.iter().enumerate() {
        let (gp, gm) = (p(format!("gp{}", a + 1)), p(format!("gm{}", a + 1)));
        for &t in comp {
            for &u in i_set {
                let c = match (family, u < t) {
                    (Family::AII, true) => p(format!("g{u}")).plus(&gp),
                    (Family::AII, false) => p(format!("g{u}")).minus(&gm),
                    (_, true) => gp.clone(),
                    (_, false) => gm.clone().negated(),
                };
                b.one_sided(u, t, c.clone());
                match (family, u < t) {
                    (Family::AII, false) => b.differ(p(format!("g{u}")), gm.clone()),
                    (_, false) => b.nonzero(gm.clone()),
                    _ => b.nonzero(c),
                }
            }
        }
    }

    // R with R
    let comp_of: BTreeMap<usize, usize> = dec
        .r_components
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.iter().map(move |&r| (r, k)))
        .collect();
    for (&r, &cr) in &comp_of {
        for (&s, &cs) in comp_of.range(r + 1..) {
            let back = if cr == cs { p(q_name(s, r)) } else { LinExpr::zero() };
            b.pair(r, s, LinExpr::constant(Scalar::one()), back);
        }
    }

    for &i in i_set {
        b.nonzero(p(x_name(i)));
    }

    let mut params: Vec<String> = Vec::new();
    for e in b.coeffs.values() {
        for k in e.params() {
            if !params.iter().any(|x| x == k) {
                params.push(k.to_string());
            }
        }
    }
    params.sort_by_key(|k| param_rank(k));
    params.extend(i_set.iter().map(|&i| x_name(i)));
    debug_assert_eq!(b.coeffs.len(), n * n.saturating_sub(1));

    let label = three_generator_label(family, dec);
    Skeleton { family, label, decomposition: dec.clone(), coefficients: b.coeffs, params, restrictions: b.restrictions }
}

fn param_rank(k: &str) -> (u8, usize, String) {
    let num: usize = k.trim_start_matches(|c: char| c.is_alphabetic()).split('_').next().and_then(|d| d.parse().ok()).unwrap_or(0);
    let class = if k == "g" {
        0
    } else if k.starts_with("Lambda") {
        1
    } else if k.starts_with("gc") {
        3
    } else if k.starts_with("gp") {
        4
    } else if k.starts_with("gm") {
        5
    } else if k.starts_with('g') {
        2
    } else {
        6
    };
    (class, num, k.to_string())
}

/// Names of the nine three-generator cases, by block shape.
fn three_generator_label(family: Family, dec: &Decomposition) -> Option<String> {
    if dec.n != 3 {
        return None;
    }
    let label = match family {
        Family::AI => "A_I",
        Family::AII => "A_II",
        Family::B if !dec.s.is_empty() => "B(1)",
        Family::B if !dec.t_bullet.is_empty() => "B(2)",
        Family::B => {
            let t = dec.t_circ.first()?.first()?;
            if t > dec.i_set.last()? {
                "B(3)"
            } else {
                "B(4)"
            }
        }
        Family::C if dec.r_components.len() == 1 => "C(1)",
        Family::C => "C(2)",
        Family::D => "D",
    };
    Some(label.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("templates need n >= 3, got {0}")]
    TooFewGenerators(usize),
    #[error("missing value for parameter `{0}`")]
    MissingParameter(String),
    #[error("restriction violated: {0}")]
    Restriction(String),
}

impl Skeleton {
    /// Substitute parameter values, enforcing every restriction.
    pub fn instantiate(&self, values: &BTreeMap<String, Scalar>) -> Result<AlgebraPresentation, TemplateError> {
        for k in &self.params {
            if !values.contains_key(k) {
                return Err(TemplateError::MissingParameter(k.clone()));
            }
        }
        for r in &self.restrictions {
            let v = r.expr.eval(values).expect("parameters checked above");
            if v.is_zero() {
                return Err(TemplateError::Restriction(r.text.clone()));
            }
        }
        Ok(self.instantiate_unchecked(values))
    }

    /// Substitute without checking restrictions (missing values read as 0).
    pub fn instantiate_unchecked(&self, values: &BTreeMap<String, Scalar>) -> AlgebraPresentation {
        let mut p = AlgebraPresentation::new(self.decomposition.n);
        let lookup = |e: &LinExpr| {
            let mut full = values.clone();
            for k in e.params() {
                full.entry(k.to_string()).or_insert_with(Scalar::zero);
            }
            e.eval(&full).unwrap()
        };
        for ((a, b), e) in &self.coefficients {
            p.set_g(*a, *b, lookup(e));
        }
        for &i in &self.decomposition.i_set {
            p.set_x(i, values.get(&x_name(i)).cloned().unwrap_or_else(Scalar::zero));
        }
        p
    }

    /// Random parameters satisfying every restriction; `q` parameters are
    /// kept nonzero so the block structure survives.
    pub fn sample_params<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<String, Scalar> {
        loop {
            let values: BTreeMap<String, Scalar> = self
                .params
                .iter()
                .map(|k| {
                    let mut num = rng.gen_range(-9i64..=9);
                    if num == 0 && (k.starts_with('q') || k.starts_with('x')) {
                        num = 1;
                    }
                    (k.clone(), Scalar::new(num, rng.gen_range(1i64..=3)))
                })
                .collect();
            if self.restrictions.iter().all(|r| !r.expr.eval(&values).unwrap().is_zero()) {
                return values;
            }
        }
    }

    pub fn row(&self) -> String {
        self.decomposition.row(self.family.name())
    }

    /// Relations in the form `A * Da Db - B * Db Da = x_b * Da - x_a * Db`.
    pub fn relation_lines(&self) -> Vec<String> {
        let n = self.decomposition.n;
        let in_i = |k: usize| self.decomposition.i_set.contains(&k);
        let coef = |e: &LinExpr, body: String| -> Option<String> {
            if e.is_zero() {
                None
            } else if e.constant == Scalar::one() && e.terms.is_empty() {
                Some(body)
            } else if e.as_bare_param().is_some() {
                Some(format!("{e} * {body}"))
            } else {
                Some(format!("({e}) * {body}"))
            }
        };
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                let lhs_a = coef(&self.coefficients[&(a, b)], format!("D{a} D{b}"));
                let lhs_b = coef(&self.coefficients[&(b, a)], format!("D{b} D{a}"));
                let lhs = match (lhs_a, lhs_b) {
                    (Some(x), Some(y)) => format!("{x} - {y}"),
                    (Some(x), None) => x,
                    _ => unreachable!("leading coefficient is never zero"),
                };
                let rhs = match (in_i(b), in_i(a)) {
                    (true, true) => format!("x{b} * D{a} - x{a} * D{b}"),
                    (true, false) => format!("x{b} * D{a}"),
                    (false, true) => format!("-x{a} * D{b}"),
                    (false, false) => "0".to_string(),
                };
                out.push(format!("{lhs} = {rhs}"));
            }
        }
        out
    }

    /// Line-oriented record used by the `tables` command.
    pub fn render(&self) -> String {
        let d = &self.decomposition;
        let mut out = String::new();
        out.push_str(&format!("family: {}\n", self.family));
        if let Some(l) = &self.label {
            out.push_str(&format!("case: {l}\n"));
        }
        out.push_str(&format!("I: {}\n", fmt_set(&d.i_set)));
        out.push_str(&format!("S: {}\n", fmt_set(&d.s)));
        out.push_str(&format!("Tcirc: {}\n", fmt_blocks(&d.t_circ)));
        out.push_str(&format!("Tbullet: {}\n", fmt_blocks(&d.t_bullet)));
        out.push_str(&format!("R: {}\n", fmt_blocks(&d.r_components)));
        out.push_str(&format!("row: {}\n", self.row()));
        for r in self.relation_lines() {
            out.push_str(&format!("rel: {r}\n"));
        }
        for r in &self.restrictions {
            out.push_str(&format!("restriction: {}\n", r.text));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// One block per class, as in the published tables.
    Paper,
    /// Every admissible split of `R` into components.
    Full,
}

/// Result of matching a presentation against its family template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyIdentification {
    /// `None` when the coefficients fit no template.
    pub family: Option<Family>,
    /// Family whose template was tried.
    pub attempted: Family,
    pub label: Option<String>,
    pub params: BTreeMap<String, Scalar>,
    pub violations: Vec<String>,
}

impl FamilyIdentification {
    pub fn family_name(&self) -> &'static str {
        self.family.map(Family::name).unwrap_or("Inconsistent")
    }

    pub fn param(&self, k: &str) -> Option<&Scalar> {
        self.params.get(k)
    }
}

/// Which family template applies to a decomposition.
pub fn candidate_family(p: &AlgebraPresentation, dec: &Decomposition) -> Family {
    let i = &dec.i_set;
    match i.len() {
        0 => Family::D,
        1 => Family::C,
        2 => Family::B,
        _ => {
            let any_back = i.iter().enumerate().any(|(k, &a)| i[k + 1..].iter().any(|&b| !p.g(b, a).is_zero()));
            if any_back {
                Family::AI
            } else {
                Family::AII
            }
        }
    }
}

/// Relations between two `R` indices are homogeneous, so only the ratio of
/// their coefficients matters; scale each to a unit leading coefficient.
fn normalize_homogeneous(p: &AlgebraPresentation, dec: &Decomposition) -> AlgebraPresentation {
    let mut out = p.clone();
    for (k, &r) in dec.r_set.iter().enumerate() {
        for &s in &dec.r_set[k + 1..] {
            let lead = p.g(r, s).inv().expect("validated leading coefficient");
            out.set_pair(r, s, Scalar::one(), p.g(s, r) * &lead);
        }
    }
    out
}

/// Fit the presentation to the template of its family and report every
/// coefficient or restriction that does not match.
pub fn identify_family(p: &AlgebraPresentation, dec: &Decomposition) -> FamilyIdentification {
    let normalized = normalize_homogeneous(p, dec);
    let p = &normalized;
    let family = candidate_family(p, dec);
    let sk = build_skeleton(family, dec);
    let mut violations = Vec::new();
    if family == Family::AII && !dec.s.is_empty() {
        violations.push(format!("A_II admits no S block, found S={}", fmt_set(&dec.s)));
    }

    let mut values: BTreeMap<String, Scalar> = BTreeMap::new();
    for &i in &dec.i_set {
        values.insert(x_name(i), p.x(i).clone());
    }
    if family == Family::AII {
        // Only differences g_i - g_j are visible; pin the last one.
        values.insert(format!("g{}", dec.i_set[dec.i_set.len() - 1]), Scalar::zero());
    }
    // Solve parameters one at a time from entries with a single unknown.
    loop {
        let mut progress = false;
        for ((a, b), e) in &sk.coefficients {
            let unknown: Vec<&(String, Scalar)> = e.terms.iter().filter(|(k, _)| !values.contains_key(k)).collect();
            if let [(k, coef)] = unknown.as_slice() {
                let mut partial = values.clone();
                partial.insert(k.clone(), Scalar::zero());
                let rest = e.eval(&partial).unwrap();
                let v = (p.g(*a, *b) - &rest) / coef;
                values.insert(k.clone(), v);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    for k in &sk.params {
        if !values.contains_key(k) {
            violations.push(format!("parameter {k} is not determined by the coefficients"));
        }
    }
    for ((a, b), e) in &sk.coefficients {
        if let Some(expected) = e.eval(&values) {
            if &expected != p.g(*a, *b) {
                violations.push(format!(
                    "g({a},{b}) = {} but the {} template requires {} = {}",
                    p.g(*a, *b),
                    family,
                    e,
                    expected
                ));
            }
        }
    }
    for r in &sk.restrictions {
        if let Some(v) = r.expr.eval(&values) {
            if v.is_zero() {
                violations.push(format!("restriction violated: {}", r.text));
            }
        }
    }
    let consistent = violations.is_empty();
    FamilyIdentification {
        family: consistent.then_some(family),
        attempted: family,
        label: if consistent { sk.label } else { None },
        params: values,
        violations,
    }
}

/// Decompose and identify in one step.
pub fn classify(p: &AlgebraPresentation) -> (Decomposition, FamilyIdentification) {
    let dec = decompose(p);
    let fam = identify_family(p, &dec);
    (dec, fam)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let k = items.len();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize == size {
            out.push((0..k).filter(|b| mask >> b & 1 == 1).map(|b| items[b]).collect());
        }
    }
    out
}

/// All set partitions of `items`, blocks ordered by first element.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for part in set_partitions(rest) {
        for k in 0..part.len() {
            let mut p = part.clone();
            p[k].insert(0, first);
            out.push(p);
        }
        let mut p = part;
        p.insert(0, vec![first]);
        out.push(p);
    }
    for p in &mut out {
        p.sort();
    }
    out
}

/// `paper`-mode T blocks: circle elements in one block, bullet elements in
/// one block per gap of `I`.
fn paper_t_blocks(i_set: &[usize], t: &[usize]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut circ = Vec::new();
    let mut gaps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in t {
        match i_set.windows(2).position(|w| w[0] < x && x < w[1]) {
            Some(g) => gaps.entry(g).or_default().push(x),
            None => circ.push(x),
        }
    }
    let circ = if circ.is_empty() { vec![] } else { vec![circ] };
    (circ, gaps.into_values().collect())
}

/// Split components into circle/bullet by position.
fn tag_t_blocks(i_set: &[usize], comps: Vec<Vec<usize>>) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    comps.into_iter().partition(|c| !Decomposition::is_bullet(i_set, c))
}

fn paper_mode_shapes(n: usize) -> Vec<(Family, Decomposition)> {
    let all: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    if n == 3 {
        let d = |i: Vec<usize>, s: Vec<Vec<usize>>, tc: Vec<Vec<usize>>, tb: Vec<Vec<usize>>| {
            Decomposition::from_blocks(3, i, s, tc, tb)
        };
        out.push((Family::AI, d(vec![1, 2, 3], vec![], vec![], vec![])));
        out.push((Family::AII, d(vec![1, 2, 3], vec![], vec![], vec![])));
        out.push((Family::B, d(vec![1, 3], vec![vec![2]], vec![], vec![])));
        out.push((Family::B, d(vec![1, 3], vec![], vec![], vec![vec![2]])));
        out.push((Family::B, d(vec![1, 2], vec![], vec![vec![3]], vec![])));
        out.push((Family::B, d(vec![2, 3], vec![], vec![vec![1]], vec![])));
        out.push((Family::C, d(vec![1], vec![vec![2, 3]], vec![], vec![])));
        out.push((Family::C, d(vec![1], vec![vec![2], vec![3]], vec![], vec![])));
        out.push((Family::D, d(vec![], vec![], vec![], vec![])));
        // D: R is a single component; from_blocks only sees listed blocks.
        out.last_mut().unwrap().1.r_components = vec![all.clone()];
        out.last_mut().unwrap().1.r_set = all;
        return out;
    }
    for size in (3..=n).rev() {
        for i_set in subsets(&all, size) {
            let rest: Vec<usize> = all.iter().copied().filter(|a| !i_set.contains(a)).collect();
            // A_I: nonempty S, the rest in T.
            for s_size in (1..=rest.len()).rev() {
                for s in subsets(&rest, s_size) {
                    let t: Vec<usize> = rest.iter().copied().filter(|a| !s.contains(a)).collect();
                    let (tc, tb) = paper_t_blocks(&i_set, &t);
                    out.push((Family::AI, Decomposition::from_blocks(n, i_set.clone(), vec![s], tc, tb)));
                }
            }
            // A_II: everything outside I is in T.
            let (tc, tb) = paper_t_blocks(&i_set, &rest);
            out.push((Family::AII, Decomposition::from_blocks(n, i_set.clone(), vec![], tc, tb)));
        }
    }
    for i_set in subsets(&all, 2) {
        let rest: Vec<usize> = all.iter().copied().filter(|a| !i_set.contains(a)).collect();
        for s_size in (0..=rest.len()).rev() {
            for s in subsets(&rest, s_size) {
                let t: Vec<usize> = rest.iter().copied().filter(|a| !s.contains(a)).collect();
                let (tc, tb) = paper_t_blocks(&i_set, &t);
                let s_blocks = if s.is_empty() { vec![] } else { vec![s] };
                out.push((Family::B, Decomposition::from_blocks(n, i_set.clone(), s_blocks, tc, tb)));
            }
        }
    }
    for i in 1..=n {
        let rest: Vec<usize> = all.iter().copied().filter(|&a| a != i).collect();
        out.push((Family::C, Decomposition::from_blocks(n, vec![i], vec![rest], vec![], vec![])));
    }
    let mut d = Decomposition::from_blocks(n, vec![], vec![], vec![], vec![]);
    d.r_components = vec![all.clone()];
    d.r_set = all;
    out.push((Family::D, d));
    out
}

fn full_mode_shapes(n: usize) -> Vec<(Family, Decomposition)> {
    let all: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for size in (2..=n).rev() {
        for i_set in subsets(&all, size) {
            let rest: Vec<usize> = all.iter().copied().filter(|a| !i_set.contains(a)).collect();
            for part in set_partitions(&rest) {
                let k = part.len();
                for mask in 0u32..(1 << k) {
                    let (s_blocks, t_blocks): (Vec<_>, Vec<_>) =
                        part.iter().enumerate().partition(|(b, _)| mask >> b & 1 == 1);
                    let s_blocks: Vec<Vec<usize>> = s_blocks.into_iter().map(|(_, c)| c.clone()).collect();
                    let t_blocks: Vec<Vec<usize>> = t_blocks.into_iter().map(|(_, c)| c.clone()).collect();
                    let (tc, tb) = tag_t_blocks(&i_set, t_blocks);
                    let families: &[Family] = match (size, s_blocks.is_empty()) {
                        (2, _) => &[Family::B],
                        (_, true) => &[Family::AI, Family::AII],
                        (_, false) => &[Family::AI],
                    };
                    for &f in families {
                        out.push((f, Decomposition::from_blocks(n, i_set.clone(), s_blocks.clone(), tc.clone(), tb.clone())));
                    }
                }
            }
        }
    }
    for i in 1..=n {
        let rest: Vec<usize> = all.iter().copied().filter(|&a| a != i).collect();
        for part in set_partitions(&rest) {
            out.push((Family::C, Decomposition::from_blocks(n, vec![i], part, vec![], vec![])));
        }
    }
    for part in set_partitions(&all) {
        let mut d = Decomposition::from_blocks(n, vec![], vec![], vec![], vec![]);
        d.r_components = part;
        d.r_set = all.clone();
        out.push((Family::D, d));
    }
    out
}

fn shape_key(f: Family, d: &Decomposition) -> impl Ord {
    (
        f,
        d.i_set.clone(),
        std::cmp::Reverse(d.s.len()),
        d.s.clone(),
        d.s_components.clone(),
        d.t_circ.clone(),
        d.t_bullet.clone(),
        d.r_components.clone(),
    )
}

/// Enumerate relation templates on `n` generators.
pub fn generate_templates(n: usize, mode: TableMode) -> Result<Vec<Skeleton>, TemplateError> {
    generate_templates_with(n, mode, Execution::default())
}

pub fn generate_templates_with(n: usize, mode: TableMode, exec: Execution) -> Result<Vec<Skeleton>, TemplateError> {
    if n < 3 {
        return Err(TemplateError::TooFewGenerators(n));
    }
    let mut shapes = match mode {
        TableMode::Paper => paper_mode_shapes(n),
        TableMode::Full => full_mode_shapes(n),
    };
    if n != 3 || mode == TableMode::Full {
        shapes.sort_by(|a, b| shape_key(a.0, &a.1).cmp(&shape_key(b.0, &b.1)));
    }
    Ok(exec.map(&shapes, |(f, d)| build_skeleton(*f, d)))
}
