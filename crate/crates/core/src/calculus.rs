//! First-order calculi twisted by commuting affine automorphisms, their
//! exterior algebra up to the top degree, and the dual-basis checks for an
//! integrating volume form.
//!
//! `Omega^1` is the free right module on `dD_1..dD_n` with
//! `p dD_a = dD_a nu_a(p)`. Consistency of `d o d = 0` forces
//! `dD_b ^ dD_a = -lambda_{ab} dD_a ^ dD_b` where `lambda_{ab}` is the linear
//! coefficient of `nu_a(D_b)`; with every `lambda_{ab} = 1` this is the usual
//! sign rule.

use std::collections::BTreeMap;
use std::fmt;

use crate::classifier::{Decomposition, Family, FamilyIdentification};
use crate::par::Execution;
use crate::pbw::{Monomial, PbwPolynomial, Rewriter, Word};
use crate::presentation::AlgebraPresentation;
use crate::scalar::Scalar;

/// `D_j -> lambda_j D_j + mu_j` for each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub lambda: Vec<Scalar>,
    pub mu: Vec<Scalar>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap { lambda: vec![Scalar::one(); n], mu: vec![Scalar::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `self o other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let lambda = self.lambda.iter().zip(&other.lambda).map(|(a, b)| a * b).collect();
        let mu = (0..self.n()).map(|j| &other.lambda[j] * &self.mu[j] + &other.mu[j]).collect();
        AffineMap { lambda, mu }
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let mut lambda = Vec::with_capacity(self.n());
        let mut mu = Vec::with_capacity(self.n());
        for j in 0..self.n() {
            let inv = self.lambda[j].inv()?;
            mu.push(-(&self.mu[j] * &inv));
            lambda.push(inv);
        }
        Some(AffineMap { lambda, mu })
    }

    /// Image of `D_j`.
    pub fn image(&self, j: usize) -> PbwPolynomial {
        PbwPolynomial::affine(self.n(), j, self.lambda[j - 1].clone(), self.mu[j - 1].clone())
    }

    pub fn is_bijective(&self) -> bool {
        self.lambda.iter().all(|l| !l.is_zero())
    }

    /// Extend multiplicatively to a polynomial.
    pub fn apply(&self, rw: &Rewriter, p: &PbwPolynomial) -> PbwPolynomial {
        let n = self.n();
        let mut out = PbwPolynomial::zero();
        for (m, c) in p.terms() {
            let mut acc = PbwPolynomial::one(n);
            for &j in m.word().letters() {
                acc = self.right_mul_image(rw, &acc, j);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// `acc * (lambda_j D_j + mu_j)`.
    fn right_mul_image(&self, rw: &Rewriter, acc: &PbwPolynomial, j: usize) -> PbwPolynomial {
        let mut next = rw.mul_generator(acc, j).scaled(&self.lambda[j - 1]);
        next.add_scaled(acc, &self.mu[j - 1]);
        next
    }
}

/// `nu_a` for every generator `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismFamily {
    pub maps: Vec<AffineMap>,
}

impl AutomorphismFamily {
    pub fn identity(n: usize) -> Self {
        AutomorphismFamily { maps: vec![AffineMap::identity(n); n] }
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn nu(&self, a: usize) -> &AffineMap {
        &self.maps[a - 1]
    }

    /// Set `nu_a(D_j) = lambda D_j + mu`.
    pub fn set(&mut self, a: usize, j: usize, lambda: Scalar, mu: Scalar) {
        self.maps[a - 1].lambda[j - 1] = lambda;
        self.maps[a - 1].mu[j - 1] = mu;
    }

    pub fn lambda(&self, a: usize, j: usize) -> &Scalar {
        &self.maps[a - 1].lambda[j - 1]
    }

    pub fn mu(&self, a: usize, j: usize) -> &Scalar {
        &self.maps[a - 1].mu[j - 1]
    }

    /// Composite over an index set (order is irrelevant for a commuting family).
    pub fn composite(&self, set: &[usize]) -> AffineMap {
        set.iter().fold(AffineMap::identity(self.n()), |acc, &a| acc.compose(self.nu(a)))
    }

    /// `nu_omega = nu_1 o ... o nu_n`.
    pub fn nu_omega(&self) -> AffineMap {
        let all: Vec<usize> = (1..=self.n()).collect();
        self.composite(&all)
    }

    /// Lines `nu_a(D_j) = ...` for reports.
    pub fn describe(&self) -> Vec<String> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 1..=n {
            for j in 1..=n {
                out.push(format!("nu{a}(D{j}) = {}", self.nu(a).image(j)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismReport {
    pub bijective: bool,
    pub relations_preserved: bool,
    pub pairwise_commute: bool,
    /// First failures, human readable.
    pub details: Vec<String>,
}

/// Degree-`k` form `sum_J dD_J * p_J` over increasing index sets `J`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GradedForm {
    pub degree: usize,
    coeffs: BTreeMap<Vec<usize>, PbwPolynomial>,
}

impl GradedForm {
    pub fn zero(degree: usize) -> Self {
        GradedForm { degree, coeffs: BTreeMap::new() }
    }

    /// `dD_J * p`; `J` must be strictly increasing.
    pub fn basis(set: Vec<usize>, p: PbwPolynomial) -> Self {
        debug_assert!(set.windows(2).all(|w| w[0] < w[1]));
        let mut f = GradedForm::zero(set.len());
        f.add(set, &p);
        f
    }

    pub fn scalar_form(p: PbwPolynomial) -> Self {
        GradedForm::basis(vec![], p)
    }

    pub fn add(&mut self, set: Vec<usize>, p: &PbwPolynomial) {
        debug_assert_eq!(set.len(), self.degree);
        if p.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(set.clone()).or_default();
        *slot = &*slot + p;
        if slot.is_zero() {
            self.coeffs.remove(&set);
        }
    }

    pub fn add_form(&mut self, other: &GradedForm) {
        for (k, p) in &other.coeffs {
            self.add(k.clone(), p);
        }
    }

    pub fn coefficient(&self, set: &[usize]) -> PbwPolynomial {
        self.coeffs.get(set).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &PbwPolynomial)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Right multiplication by a scalar.
    pub fn scaled(&self, c: &Scalar) -> GradedForm {
        let mut out = GradedForm::zero(self.degree);
        for (k, p) in &self.coeffs {
            out.add(k.clone(), &p.scaled(c));
        }
        out
    }
}

impl fmt::Display for GradedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, p)| {
                if k.is_empty() {
                    format!("({p})")
                } else {
                    let w: Vec<String> = k.iter().map(|a| format!("dD{a}")).collect();
                    format!("{} * ({p})", w.join("^"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for GradedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("hypotheses not met: {0}")]
    Hypothesis(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("volume form is degenerate: nu_omega is not invertible")]
    SingularVolume,
}

/// The four constructions of the existence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremCase {
    I,
    II,
    III,
    IV,
}

impl TheoremCase {
    pub fn name(self) -> &'static str {
        match self {
            TheoremCase::I => "i",
            TheoremCase::II => "ii",
            TheoremCase::III => "iii",
            TheoremCase::IV => "iv",
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A presentation with a candidate twisting family.
#[derive(Clone)]
pub struct Calculus {
    pub presentation: AlgebraPresentation,
    pub rw: Rewriter,
    pub nu: AutomorphismFamily,
}

fn ratio(a: &Scalar, b: &Scalar, what: &str) -> Result<Scalar, CalculusError> {
    a.checked_div(b).ok_or_else(|| CalculusError::DivisionByZero(what.to_string()))
}

/// `q_{ls} = g(l,s) / g(s,l)` twist on a block of `R`, `s < l`.
fn twist_block(p: &AlgebraPresentation, nu: &mut AutomorphismFamily, block: &[usize]) -> Result<(), CalculusError> {
    for (k, &s) in block.iter().enumerate() {
        for &l in &block[k + 1..] {
            let q = ratio(p.g(l, s), p.g(s, l), "zero leading coefficient")?;
            if q.is_zero() {
                return Err(CalculusError::Hypothesis(format!("q{l}_{s} = 0 inside a block")));
            }
            nu.set(s, l, q.inv().unwrap(), Scalar::zero());
            nu.set(l, s, q, Scalar::zero());
        }
    }
    Ok(())
}

/// Common value of `g(i,s)` over `s in S`.
fn uniform_g(p: &AlgebraPresentation, i: usize, s: &[usize]) -> Result<Scalar, CalculusError> {
    let first = p.g(i, s[0]).clone();
    for &r in s {
        if p.g(i, r) != &first {
            return Err(CalculusError::Hypothesis(format!(
                "g_s is not uniform on S (g({i},{}) = {first}, g({i},{r}) = {})",
                s[0],
                p.g(i, r)
            )));
        }
    }
    Ok(first)
}

/// Build the twisting automorphisms of the existence theorem for the
/// classified presentation.
pub fn build_automorphisms(
    p: &AlgebraPresentation,
    dec: &Decomposition,
    fam: &FamilyIdentification,
) -> Result<(TheoremCase, AutomorphismFamily), CalculusError> {
    let n = p.n();
    let family = fam.family.ok_or_else(|| CalculusError::Hypothesis("presentation fits no family template".into()))?;
    let mut nu = AutomorphismFamily::identity(n);
    let i_set = &dec.i_set;
    let s = &dec.s;
    let one = Scalar::one;
    if !dec.t_circ.is_empty() || !dec.t_bullet.is_empty() {
        return Err(CalculusError::Hypothesis("T is nonempty".into()));
    }
    if dec.s_components.len() > 1 || (family == Family::D && dec.r_components.len() > 1) {
        return Err(CalculusError::Hypothesis("R splits into several blocks with vanishing products".into()));
    }
    match family {
        Family::AII => Err(CalculusError::Hypothesis(
            "A_II with |I| = n has no uniform g for the case (i) construction".into(),
        )),
        Family::AI => {
            let g = p.g(i_set[0], i_set[1]).clone();
            for &a in i_set {
                for &j in i_set {
                    nu.set(a, j, one(), -ratio(p.x(j), &g, "g = 0")?);
                }
            }
            for &r in s {
                let gs = p.g(i_set[0], r).clone();
                for &i in i_set {
                    nu.set(r, i, one(), -ratio(p.x(i), &gs, "g_s = 0")?);
                }
            }
            twist_block(p, &mut nu, s)?;
            Ok((TheoremCase::I, nu))
        }
        Family::C => {
            let i = i_set[0];
            let big_g = uniform_g(p, i, s)?;
            let lam = p.g(i, s[0]) - p.g(s[0], i);
            let shifted = &big_g - &lam;
            if big_g.is_zero() || shifted.is_zero() {
                return Err(CalculusError::Hypothesis("G must avoid 0 and Lambda".into()));
            }
            for &r in s {
                nu.set(i, r, ratio(&big_g, &shifted, "G = Lambda")?, Scalar::zero());
                nu.set(r, i, ratio(&shifted, &big_g, "G = 0")?, -ratio(p.x(i), &big_g, "G = 0")?);
            }
            twist_block(p, &mut nu, s)?;
            Ok((TheoremCase::II, nu))
        }
        Family::B => {
            let (i, j) = (i_set[0], i_set[1]);
            let g = p.g(i, j).clone();
            let lam = &g - p.g(j, i);
            let g_shift = &g - &lam;
            if g_shift.is_zero() {
                return Err(CalculusError::Hypothesis("g = Lambda leaves no invertible twist on I".into()));
            }
            if g_shift == -&g {
                return Err(CalculusError::Hypothesis(format!(
                    "Lambda = 2g twists D{i} by -1, so D{i}^2 + (x{i}/g) D{i} would be a non-scalar constant"
                )));
            }
            if s.is_empty() {
                return Err(CalculusError::Hypothesis("S is empty".into()));
            }
            let big_g = uniform_g(p, i, s)?;
            let big_shift = &big_g - &lam;
            if big_g.is_zero() || big_shift.is_zero() {
                return Err(CalculusError::Hypothesis("G must avoid 0 and Lambda".into()));
            }
            for a in [i, j] {
                nu.set(a, i, ratio(&g_shift, &g, "g = 0")?, -ratio(p.x(i), &g, "g = 0")?);
                nu.set(a, j, ratio(&g, &g_shift, "g = Lambda")?, -ratio(p.x(j), &g_shift, "g = Lambda")?);
            }
            for &r in s {
                nu.set(i, r, ratio(&big_g, &big_shift, "G = Lambda")?, Scalar::zero());
                nu.set(j, r, ratio(&big_shift, &big_g, "G = 0")?, Scalar::zero());
                nu.set(r, i, ratio(&big_shift, &big_g, "G = 0")?, -ratio(p.x(i), &big_g, "G = 0")?);
                nu.set(r, j, ratio(&big_g, &big_shift, "G = Lambda")?, -ratio(p.x(j), &big_shift, "G = Lambda")?);
            }
            twist_block(p, &mut nu, s)?;
            Ok((TheoremCase::III, nu))
        }
        Family::D => {
            let all: Vec<usize> = (1..=n).collect();
            twist_block(p, &mut nu, &all)?;
            Ok((TheoremCase::IV, nu))
        }
    }
}

/// The generic ansatz used against `T` blocks: `nu_a(D_j) = D_j - x_j / h_a`
/// on `I` with `h_a` the leading coefficient linking `a` to `I`, identity on `R`.
pub fn case_one_ansatz(p: &AlgebraPresentation, dec: &Decomposition) -> AutomorphismFamily {
    let n = p.n();
    let mut nu = AutomorphismFamily::identity(n);
    let Some(&i0) = dec.i_set.first() else {
        return nu;
    };
    let lead = |a: usize, b: usize| p.g(a.min(b), a.max(b)).clone();
    for a in 1..=n {
        let h = if dec.i_set.contains(&a) {
            if dec.i_set.len() < 2 {
                continue;
            }
            lead(dec.i_set[0], dec.i_set[1])
        } else {
            lead(a, i0)
        };
        for &j in &dec.i_set {
            nu.set(a, j, Scalar::one(), -(p.x(j) / &h));
        }
    }
    nu
}

/// The relation for `a < b` as a word combination equal to zero.
pub fn relation_words(p: &AlgebraPresentation, a: usize, b: usize) -> Vec<(Scalar, Word)> {
    vec![
        (p.g(a, b).clone(), Word(vec![a, b])),
        (-p.g(b, a), Word(vec![b, a])),
        (-p.x(b), Word(vec![a])),
        (p.x(a).clone(), Word(vec![b])),
    ]
}

/// Report on a calculus-level certification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Calculus {
    pub fn new(p: &AlgebraPresentation, nu: AutomorphismFamily) -> Self {
        Calculus { presentation: p.clone(), rw: Rewriter::new(p), nu }
    }

    pub fn n(&self) -> usize {
        self.presentation.n()
    }

    pub fn apply_nu(&self, a: usize, p: &PbwPolynomial) -> PbwPolynomial {
        self.nu.nu(a).apply(&self.rw, p)
    }

    pub fn verify_automorphisms(&self) -> AutomorphismReport {
        let n = self.n();
        let p = &self.presentation;
        let mut details = Vec::new();
        let bijective = self.nu.maps.iter().all(AffineMap::is_bijective);
        if !bijective {
            details.push("some nu_a has a zero linear coefficient".to_string());
        }
        let mut relations_preserved = true;
        'outer: for a in 1..=n {
            let m = self.nu.nu(a);
            for i in 1..=n {
                for j in i + 1..=n {
                    let (vi, vj) = (m.image(i), m.image(j));
                    let mut r = self.rw.multiply(&vi, &vj).scaled(p.g(i, j));
                    r.add_scaled(&self.rw.multiply(&vj, &vi), &-p.g(j, i));
                    r.add_scaled(&vi, &-p.x(j));
                    r.add_scaled(&vj, p.x(i));
                    if !r.is_zero() {
                        relations_preserved = false;
                        details.push(format!("nu{a} sends relation ({i},{j}) to {r}"));
                        break 'outer;
                    }
                }
            }
        }
        let mut pairwise_commute = true;
        for a in 1..=n {
            for b in a + 1..=n {
                let (ma, mb) = (self.nu.nu(a), self.nu.nu(b));
                if ma.compose(mb) != mb.compose(ma) {
                    pairwise_commute = false;
                    details.push(format!("nu{a} and nu{b} do not commute"));
                }
            }
        }
        AutomorphismReport { bijective, relations_preserved, pairwise_commute, details }
    }

    /// `dD_a`-coefficient of `d(w)` for an arbitrary word, by the Leibniz
    /// rule: `sum over positions of a` of `nu_a(prefix) * suffix`.
    pub fn partial_word(&self, a: usize, w: &Word) -> PbwPolynomial {
        let n = self.n();
        let m = self.nu.nu(a);
        let letters = w.letters();
        let mut prefix = PbwPolynomial::one(n);
        let mut out = PbwPolynomial::zero();
        for (pos, &l) in letters.iter().enumerate() {
            if l == a {
                let suffix = Word(letters[pos + 1..].to_vec());
                out = &out + &self.rw.mul_word(&prefix, &suffix);
            }
            prefix = m.right_mul_image(&self.rw, &prefix, l);
        }
        out
    }

    pub fn partial_derivative(&self, a: usize, p: &PbwPolynomial) -> PbwPolynomial {
        let mut out = PbwPolynomial::zero();
        for (m, c) in p.terms() {
            out.add_scaled(&self.partial_word(a, &m.word()), c);
        }
        out
    }

    /// `d` of a word combination, computed word by word.
    pub fn differential_words(&self, words: &[(Scalar, Word)]) -> GradedForm {
        let mut f = GradedForm::zero(1);
        for a in 1..=self.n() {
            let mut coef = PbwPolynomial::zero();
            for (c, w) in words {
                coef.add_scaled(&self.partial_word(a, w), c);
            }
            f.add(vec![a], &coef);
        }
        f
    }

    pub fn differential(&self, p: &PbwPolynomial) -> GradedForm {
        let mut f = GradedForm::zero(1);
        for a in 1..=self.n() {
            f.add(vec![a], &self.partial_derivative(a, p));
        }
        f
    }

    /// `dD_a`-coefficient from the product formula on the grouped word
    /// `D_1^{k_1} ... D_n^{k_n}` (increasing) or `D_n^{k_n} ... D_1^{k_1}`:
    /// images of the letters before the `D_a` block, then
    /// `sum_m nu_a(D_a)^m D_a^{k_a - 1 - m}`, then the remaining letters.
    pub fn closed_form_partial(&self, a: usize, m: &Monomial, increasing: bool) -> PbwPolynomial {
        let n = self.n();
        let nu = self.nu.nu(a);
        let order: Vec<usize> = if increasing { (1..=n).collect() } else { (1..=n).rev().collect() };
        let pos = order.iter().position(|&j| j == a).unwrap();
        let ka = m.exponent(a);
        if ka == 0 {
            return PbwPolynomial::zero();
        }
        let mut head = PbwPolynomial::one(n);
        for &j in &order[..pos] {
            for _ in 0..m.exponent(j) {
                head = nu.right_mul_image(&self.rw, &head, j);
            }
        }
        let mut tail_word = Vec::new();
        for &j in &order[pos + 1..] {
            tail_word.extend(std::iter::repeat(j).take(m.exponent(j) as usize));
        }
        let tail = Word(tail_word);
        let mut middle = PbwPolynomial::zero();
        let mut power = PbwPolynomial::one(n);
        for k in 0..ka {
            let rest = Word(vec![a; (ka - 1 - k) as usize]);
            middle = &middle + &self.rw.mul_word(&power, &rest);
            power = nu.right_mul_image(&self.rw, &power, a);
        }
        let lead = self.rw.multiply(&head, &middle);
        self.rw.mul_word(&lead, &tail)
    }

    /// The product formula with `k_a D_a^{k_a - 1}` in the middle, valid only
    /// when `nu_a(D_a) = D_a`.
    pub fn factor_form_partial(&self, a: usize, m: &Monomial) -> PbwPolynomial {
        let n = self.n();
        let nu = self.nu.nu(a);
        let ka = m.exponent(a);
        if ka == 0 {
            return PbwPolynomial::zero();
        }
        let mut acc = PbwPolynomial::one(n);
        for j in 1..a {
            for _ in 0..m.exponent(j) {
                acc = nu.right_mul_image(&self.rw, &acc, j);
            }
        }
        let mut word = vec![a; (ka - 1) as usize];
        for j in a + 1..=n {
            word.extend(std::iter::repeat(j).take(m.exponent(j) as usize));
        }
        self.rw.mul_word(&acc, &Word(word)).scaled(&Scalar::from_int(ka as i64))
    }

    /// Sign-and-twist factor for `dD_J ^ dD_K -> sigma * dD_{J u K}`.
    pub fn sigma(&self, j: &[usize], k: &[usize]) -> Scalar {
        let mut s = Scalar::one();
        for &b in j {
            for &a in k {
                if b > a {
                    s = s * -self.nu.lambda(a, b);
                }
            }
        }
        s
    }

    pub fn wedge(&self, xi: &GradedForm, eta: &GradedForm) -> GradedForm {
        let mut out = GradedForm::zero(xi.degree + eta.degree);
        for (j, p) in xi.terms() {
            for (k, q) in eta.terms() {
                if j.iter().any(|a| k.contains(a)) {
                    continue;
                }
                let mut union: Vec<usize> = j.iter().chain(k).copied().collect();
                union.sort();
                let moved = self.nu.composite(k).apply(&self.rw, p);
                let coef = self.rw.multiply(&moved, q).scaled(&self.sigma(j, k));
                out.add(union, &coef);
            }
        }
        out
    }

    /// `p * form`, pushing `p` right through each `dD_J`.
    pub fn left_mul(&self, p: &PbwPolynomial, form: &GradedForm) -> GradedForm {
        let mut out = GradedForm::zero(form.degree);
        for (k, q) in form.terms() {
            let moved = self.nu.composite(k).apply(&self.rw, p);
            out.add(k.clone(), &self.rw.multiply(&moved, q));
        }
        out
    }

    /// `form * p`.
    pub fn right_mul(&self, form: &GradedForm, p: &PbwPolynomial) -> GradedForm {
        let mut out = GradedForm::zero(form.degree);
        for (k, q) in form.terms() {
            out.add(k.clone(), &self.rw.multiply(q, p));
        }
        out
    }

    /// `d(dD_J p) = (-1)^|J| dD_J ^ dp`.
    pub fn d_form(&self, form: &GradedForm) -> GradedForm {
        let mut out = GradedForm::zero(form.degree + 1);
        let sign = if form.degree % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        for (j, p) in form.terms() {
            let basis = GradedForm::basis(j.clone(), PbwPolynomial::one(self.n()));
            out.add_form(&self.wedge(&basis, &self.differential(p)).scaled(&sign));
        }
        out
    }

    pub fn volume_form(&self) -> GradedForm {
        GradedForm::basis((1..=self.n()).collect(), PbwPolynomial::one(self.n()))
    }

    /// Right coefficient of `omega` in a top-degree form.
    pub fn pi_omega(&self, tau: &GradedForm) -> PbwPolynomial {
        assert_eq!(tau.degree, self.n(), "pi_omega needs a top-degree form");
        tau.coefficient(&(1..=self.n()).collect::<Vec<_>>())
    }

    pub fn nu_omega(&self, p: &PbwPolynomial) -> PbwPolynomial {
        self.nu.nu_omega().apply(&self.rw, p)
    }

    pub fn nu_omega_inverse(&self, p: &PbwPolynomial) -> Result<PbwPolynomial, CalculusError> {
        let inv = self.nu.nu_omega().inverse().ok_or(CalculusError::SingularVolume)?;
        Ok(inv.apply(&self.rw, p))
    }

    /// `dD_b ^ dD_a = -lambda_{ab} dD_a ^ dD_b` is consistent in both
    /// directions only if `lambda_{ab} lambda_{ba} = 1`.
    pub fn wedge_consistent(&self) -> bool {
        let n = self.n();
        (1..=n).all(|a| (a + 1..=n).all(|b| (self.nu.lambda(a, b) * self.nu.lambda(b, a)).is_one()))
    }

    /// `d` respects every defining relation.
    pub fn leibniz_compatible(&self) -> Result<(), String> {
        let n = self.n();
        for a in 1..=n {
            for b in a + 1..=n {
                let f = self.differential_words(&relation_words(&self.presentation, a, b));
                if !f.is_zero() {
                    return Err(format!("d(relation ({a},{b})) = {f}"));
                }
            }
        }
        Ok(())
    }

    /// `d(d(m)) = 0` for every monomial of degree `1..=bound`.
    pub fn dd_zero(&self, bound: u32, exec: Execution) -> Result<(), String> {
        let monos = Monomial::up_to_degree(self.n(), bound);
        let bad = exec.map(&monos, |m| {
            let dd = self.d_form(&self.differential(&PbwPolynomial::monomial(m.clone())));
            (!dd.is_zero()).then(|| format!("d(d({m})) = {dd}"))
        });
        match bad.into_iter().flatten().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Kernel of `d` on polynomials of degree `<= bound` is the scalars:
    /// the images of all non-constant basis monomials are linearly independent.
    pub fn check_connectedness(&self, bound: u32, exec: Execution) -> bool {
        let monos = Monomial::up_to_degree(self.n(), bound);
        let images = exec.map(&monos, |m| self.differential(&PbwPolynomial::monomial(m.clone())));
        let rows: Vec<BTreeMap<(usize, Monomial), Scalar>> = images
            .iter()
            .map(|f| {
                f.terms()
                    .flat_map(|(k, p)| p.terms().map(move |(m, c)| ((k[0], m.clone()), c.clone())))
                    .collect()
            })
            .collect();
        rank(rows.clone()) == rows.len()
    }

    /// Both dual-basis identities for degree `k` on `dD_J * m`, every
    /// `|J| = k` and monomial `m` with degree `<= bound`.
    pub fn check_integrating_form(&self, k: usize, bound: u32, exec: Execution) -> Result<(), String> {
        let n = self.n();
        if self.nu.nu_omega().inverse().is_none() {
            return Err("nu_omega is not invertible".into());
        }
        let sets = subsets_of_size(n, k);
        let comp = |s: &[usize]| -> Vec<usize> { (1..=n).filter(|a| !s.contains(a)).collect() };
        // omega_i = dD_K and bar omega_i = eps_K dD_{K^c} with bar omega ^ omega = omega.
        let family = |size: usize| -> Vec<(GradedForm, GradedForm)> {
            subsets_of_size(n, size)
                .into_iter()
                .map(|s| {
                    let c = comp(&s);
                    let eps = self.sigma(&c, &s).inv().expect("sigma is a product of nonzero scalars");
                    (
                        GradedForm::basis(s, PbwPolynomial::one(n)),
                        GradedForm::basis(c, PbwPolynomial::constant(n, eps)),
                    )
                })
                .collect()
        };
        let fam_k = family(k);
        let fam_nk = family(n - k);
        let mut monos = vec![Monomial::one(n)];
        monos.extend(Monomial::up_to_degree(n, bound));
        let mut cases = Vec::new();
        for s in &sets {
            for m in &monos {
                cases.push(GradedForm::basis(s.clone(), PbwPolynomial::monomial(m.clone())));
            }
        }
        let bad = exec.map(&cases, |w| {
            let mut s1 = GradedForm::zero(k);
            for (om, bar) in &fam_k {
                let c = self.pi_omega(&self.wedge(bar, w));
                s1.add_form(&self.right_mul(om, &c));
            }
            if &s1 != w {
                return Some(format!("first identity fails on {w}: got {s1}"));
            }
            let mut s2 = GradedForm::zero(k);
            for (om, bar) in &fam_nk {
                let c = self.pi_omega(&self.wedge(w, om));
                let c = self.nu_omega_inverse(&c).ok()?;
                s2.add_form(&self.left_mul(&c, bar));
            }
            if &s2 != w {
                return Some(format!("second identity fails on {w}: got {s2}"));
            }
            None
        });
        match bad.into_iter().flatten().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// `dD_i`-coefficient of `d` applied to the relation between `i` and `t`.
    pub fn no_go_residual(&self, i: usize, t: usize) -> PbwPolynomial {
        let (a, b) = (i.min(t), i.max(t));
        let f = self.differential_words(&relation_words(&self.presentation, a, b));
        f.coefficient(&[i])
    }
}

/// Increasing `k`-subsets of `1..=n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..=n {
            cur.push(a);
            rec(a + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Row rank by exact Gaussian elimination on sparse rows.
fn rank<K: Ord + Clone>(mut rows: Vec<BTreeMap<K, Scalar>>) -> usize {
    let mut pivots: Vec<(K, BTreeMap<K, Scalar>)> = Vec::new();
    let mut r = 0;
    for row in rows.iter_mut() {
        let mut row = std::mem::take(row);
        for (pk, prow) in &pivots {
            if let Some(c) = row.get(pk).cloned() {
                for (k, v) in prow {
                    let e = row.entry(k.clone()).or_insert_with(Scalar::zero);
                    *e -= &(&c * v);
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        if let Some((k, v)) = row.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
            let inv = v.inv().unwrap();
            let normalized: BTreeMap<K, Scalar> = row.into_iter().map(|(kk, vv)| (kk, vv * &inv)).collect();
            // Keep pivots fully reduced against the new one.
            for (_, prow) in pivots.iter_mut() {
                if let Some(c) = prow.get(&k).cloned() {
                    for (kk, vv) in &normalized {
                        let e = prow.entry(kk.clone()).or_insert_with(Scalar::zero);
                        *e -= &(&c * vv);
                        if e.is_zero() {
                            prow.remove(kk);
                        }
                    }
                }
            }
            pivots.push((k, normalized));
            r += 1;
        }
    }
    r
}
