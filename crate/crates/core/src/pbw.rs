//! Normal forms in the ordered-monomial basis and the overlap (diamond)
//! check on `D_a D_b D_c`, `a < b < c`.
//!
//! Basis monomials are written with non-increasing indices,
//! `D_n^{k_n} ... D_1^{k_1}`. The only reducible pattern is an adjacent
//! increasing pair `D_a D_b` (`a < b`), rewritten as
//!
//! ```text
//! D_a D_b -> s D_b D_a + (x_b / g(a,b)) D_a - (x_a / g(a,b)) D_b,   s = g(b,a) / g(a,b)
//! ```

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::par::Execution;
use crate::presentation::AlgebraPresentation;
use crate::scalar::Scalar;

/// Exponent vector `(k_1, ..., k_n)` of `D_n^{k_n} ... D_1^{k_1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, a: usize) -> Self {
        let mut e = vec![0; n];
        e[a - 1] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Exponent of `D_a` (1-based).
    pub fn exponent(&self, a: usize) -> u32 {
        self.0[a - 1]
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Letters in basis order (non-increasing).
    pub fn word(&self) -> Word {
        let mut letters = Vec::with_capacity(self.degree() as usize);
        for a in (1..=self.n()).rev() {
            for _ in 0..self.exponent(a) {
                letters.push(a);
            }
        }
        Word(letters)
    }

    /// Same letters, increasing order `D_1^{k_1} ... D_n^{k_n}`.
    pub fn increasing_word(&self) -> Word {
        let mut w = self.word();
        w.0.reverse();
        w
    }

    /// All monomials of exactly the given degree, ascending in `Ord`.
    pub fn all_of_degree(n: usize, degree: u32) -> Vec<Monomial> {
        fn rec(n: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if pos + 1 == n {
                cur[pos] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur[pos] = k;
                rec(n, pos + 1, left - k, cur, out);
            }
            cur[pos] = 0;
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, 0, degree, &mut vec![0; n], &mut out);
        out.sort();
        out
    }

    /// All monomials with degree in `1..=max_degree`.
    pub fn up_to_degree(n: usize, max_degree: u32) -> Vec<Monomial> {
        (1..=max_degree).flat_map(|d| Monomial::all_of_degree(n, d)).collect()
    }

    fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    /// Degree first, then exponents compared from the largest index down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for a in (1..=self.n()).rev() {
            let k = self.exponent(a);
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "D{a}")?;
            } else {
                write!(f, "D{a}^{k}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Free-monoid word; letters are generator indices in written order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of position pairs `p < q` with `w_p < w_q`.
    pub fn inversions(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|p| w[p + 1..].iter().filter(|&&b| w[p] < b).count())
            .sum()
    }

    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|p| p[0] >= p[1])
    }

    /// Exponent vector of a normal word.
    pub fn to_monomial(&self, n: usize) -> Monomial {
        let mut e = vec![0; n];
        for &a in &self.0 {
            e[a - 1] += 1;
        }
        Monomial(e)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|a| format!("D{a}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite linear combination of basis monomials with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PbwPolynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl PbwPolynomial {
    pub fn zero() -> Self {
        PbwPolynomial::default()
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        PbwPolynomial::term(Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        PbwPolynomial::constant(n, Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut p = PbwPolynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        PbwPolynomial::term(m, Scalar::one())
    }

    pub fn generator(n: usize, a: usize) -> Self {
        PbwPolynomial::monomial(Monomial::generator(n, a))
    }

    /// `lambda * D_a + mu`.
    pub fn affine(n: usize, a: usize, lambda: Scalar, mu: Scalar) -> Self {
        let mut p = PbwPolynomial::term(Monomial::generator(n, a), lambda);
        p.add_term(Monomial::one(n), mu);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &PbwPolynomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> PbwPolynomial {
        let mut out = PbwPolynomial::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for `c * 1` (including zero).
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest degree present; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms of exactly the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> PbwPolynomial {
        PbwPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exponent-wise shift of every monomial by `m` (used where the
    /// concatenation is already in basis order).
    fn shifted(&self, m: &Monomial) -> PbwPolynomial {
        PbwPolynomial {
            terms: self.terms.iter().map(|(k, c)| (k.add(m), c.clone())).collect(),
        }
    }
}

impl std::ops::Add<&PbwPolynomial> for &PbwPolynomial {
    type Output = PbwPolynomial;
    fn add(self, rhs: &PbwPolynomial) -> PbwPolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl std::ops::Sub<&PbwPolynomial> for &PbwPolynomial {
    type Output = PbwPolynomial;
    fn sub(self, rhs: &PbwPolynomial) -> PbwPolynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl std::ops::Neg for &PbwPolynomial {
    type Output = PbwPolynomial;
    fn neg(self) -> PbwPolynomial {
        self.scaled(&-Scalar::one())
    }
}

/// Render `(coefficient, body)` pairs as `2 * D2 D1 + D1 - 1/2`.
pub(crate) fn render_terms<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (&'a Scalar, String)>,
{
    let mut out = String::new();
    for (c, body) in terms {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if body == "1" {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&format!("{a} * {body}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for PbwPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = render_terms(self.terms.iter().rev().map(|(m, c)| (c, m.to_string())));
        f.write_str(&s)
    }
}

impl fmt::Debug for PbwPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which increasing adjacent pair the explicit rewriter reduces first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Clone)]
struct Rule {
    swap: Scalar,
    /// Coefficient of `D_a` in the reduct of `D_a D_b`.
    low: Scalar,
    /// Coefficient of `D_b`.
    high: Scalar,
}

/// Precomputed rewriting rules for one presentation.
#[derive(Clone)]
pub struct Rewriter {
    n: usize,
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormRun {
    pub result: PbwPolynomial,
    /// Number of single rewrite steps performed.
    pub steps: usize,
}

/// Outcome of the overlap check on `D_a D_b D_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleCheck {
    pub triple: (usize, usize, usize),
    pub confluent: bool,
    /// Left pair reduced first.
    pub nf_left: PbwPolynomial,
    /// Right pair reduced first.
    pub nf_right: PbwPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbwReport {
    pub pbw: bool,
    /// Lexicographically first non-confluent triple.
    pub first_failure: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PbwError {
    #[error("triple ({0},{1},{2}) is not strictly increasing within 1..{3}")]
    BadTriple(usize, usize, usize, usize),
}

impl Rewriter {
    /// Panics if some leading coefficient is zero; validate first.
    pub fn new(p: &AlgebraPresentation) -> Self {
        let n = p.n();
        let mut rules = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                if a < b {
                    let lead = p.g(a, b);
                    let inv = lead.inv().unwrap_or_else(|| panic!("zero leading coefficient g({a},{b})"));
                    rules.push(Rule {
                        swap: p.g(b, a) * &inv,
                        low: p.x(b) * &inv,
                        high: -(p.x(a) * &inv),
                    });
                } else {
                    rules.push(Rule {
                        swap: Scalar::zero(),
                        low: Scalar::zero(),
                        high: Scalar::zero(),
                    });
                }
            }
        }
        Rewriter { n, rules }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn rule(&self, a: usize, b: usize) -> &Rule {
        &self.rules[(a - 1) * self.n + (b - 1)]
    }

    /// Reduct of the increasing pair at `pos` in `w`, as three weighted words.
    fn rewrite_at(&self, w: &Word, pos: usize) -> [(Scalar, Word); 3] {
        let (a, b) = (w.0[pos], w.0[pos + 1]);
        debug_assert!(a < b);
        let r = self.rule(a, b);
        let mut swapped = w.0.clone();
        swapped.swap(pos, pos + 1);
        let mut keep_a = w.0.clone();
        keep_a.remove(pos + 1);
        let mut keep_b = w.0.clone();
        keep_b.remove(pos);
        [
            (r.swap.clone(), Word(swapped)),
            (r.low.clone(), Word(keep_a)),
            (r.high.clone(), Word(keep_b)),
        ]
    }

    /// Explicit rewriting of a combination of words until every word is in
    /// basis order. Like words are merged, and the largest word under
    /// (length, inversions, letters) is always reduced next; each rewrite
    /// produces strictly smaller words, which bounds the run.
    pub fn normal_form_run(&self, input: &[(Scalar, Word)], strategy: Strategy) -> NormalFormRun {
        type Key = (usize, usize, Word);
        let key = |w: Word| -> Key { (w.len(), w.inversions(), w) };
        let mut work: BTreeMap<Key, Scalar> = BTreeMap::new();
        let push = |work: &mut BTreeMap<Key, Scalar>, k: Key, c: Scalar| {
            if c.is_zero() {
                return;
            }
            match work.entry(k) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += &c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        };
        for (c, w) in input {
            push(&mut work, key(w.clone()), c.clone());
        }
        let mut result = PbwPolynomial::zero();
        let mut steps = 0;
        while let Some((k, c)) = work.pop_last() {
            let w = &k.2;
            let pairs: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&p| w.0[p] < w.0[p + 1]).collect();
            let pos = match strategy {
                Strategy::Leftmost => pairs.first(),
                Strategy::Rightmost => pairs.last(),
            };
            match pos {
                None => result.add_term(w.to_monomial(self.n), c),
                Some(&pos) => {
                    steps += 1;
                    for (rc, rw) in self.rewrite_at(w, pos) {
                        let nk = key(rw);
                        debug_assert!(nk < k, "rewrite did not decrease the word order");
                        push(&mut work, nk, &rc * &c);
                    }
                }
            }
        }
        NormalFormRun { result, steps }
    }

    pub fn normal_form(&self, input: &[(Scalar, Word)], strategy: Strategy) -> PbwPolynomial {
        self.normal_form_run(input, strategy).result
    }

    pub fn normal_form_word(&self, w: &Word, strategy: Strategy) -> PbwPolynomial {
        self.normal_form(&[(Scalar::one(), w.clone())], strategy)
    }

    /// Normal form of `v * D_a` where every letter of `v` is below `a`.
    /// Peels the smallest letter `c` off the end of `v`:
    /// `v1 D_c D_a = s (v1 D_a) D_c + low * v1 D_c + high * v1 D_a`.
    fn insert_below(&self, v: &Monomial, a: usize) -> PbwPolynomial {
        let Some(c) = (1..a).find(|&c| v.exponent(c) > 0) else {
            return PbwPolynomial::generator(self.n, a);
        };
        let mut v1 = v.clone();
        v1.0[c - 1] -= 1;
        let r1 = self.insert_below(&v1, a);
        let rule = self.rule(c, a);
        let mut out = PbwPolynomial::zero();
        if !rule.swap.is_zero() {
            out.add_scaled(&r1.shifted(&Monomial::generator(self.n, c)), &rule.swap);
        }
        out.add_term(v.clone(), rule.low.clone());
        out.add_scaled(&r1, &rule.high);
        out
    }

    /// Normal form of `m * D_a`.
    pub fn mul_monomial_generator(&self, m: &Monomial, a: usize) -> PbwPolynomial {
        let mut upper = m.clone();
        let mut lower = Monomial::one(self.n);
        for c in 1..a {
            lower.0[c - 1] = m.exponent(c);
            upper.0[c - 1] = 0;
        }
        self.insert_below(&lower, a).shifted(&upper)
    }

    /// `p * D_a`.
    pub fn mul_generator(&self, p: &PbwPolynomial, a: usize) -> PbwPolynomial {
        let mut out = PbwPolynomial::zero();
        for (m, c) in p.terms() {
            out.add_scaled(&self.mul_monomial_generator(m, a), c);
        }
        out
    }

    /// `p * w` for a word `w` (any letter order).
    pub fn mul_word(&self, p: &PbwPolynomial, w: &Word) -> PbwPolynomial {
        w.0.iter().fold(p.clone(), |acc, &a| self.mul_generator(&acc, a))
    }

    /// Product in the algebra. Only meaningful when the presentation is PBW.
    pub fn multiply(&self, p: &PbwPolynomial, q: &PbwPolynomial) -> PbwPolynomial {
        let mut out = PbwPolynomial::zero();
        for (m, c) in q.terms() {
            out.add_scaled(&self.mul_word(p, &m.word()), c);
        }
        out
    }

    /// Normal form of a word through the insertion product.
    pub fn word_value(&self, w: &Word) -> PbwPolynomial {
        self.mul_word(&PbwPolynomial::one(self.n), w)
    }

    /// Both reduction orders on `D_a D_b D_c`.
    pub fn diamond_check_triple(&self, a: usize, b: usize, c: usize) -> Result<TripleCheck, PbwError> {
        if !(1 <= a && a < b && b < c && c <= self.n) {
            return Err(PbwError::BadTriple(a, b, c, self.n));
        }
        let w = Word(vec![a, b, c]);
        let left: Vec<(Scalar, Word)> = self.rewrite_at(&w, 0).into();
        let right: Vec<(Scalar, Word)> = self.rewrite_at(&w, 1).into();
        let nf_left = self.normal_form(&left, Strategy::Leftmost);
        let nf_right = self.normal_form(&right, Strategy::Rightmost);
        Ok(TripleCheck {
            triple: (a, b, c),
            confluent: nf_left == nf_right,
            nf_left,
            nf_right,
        })
    }

    pub fn is_pbw(&self, exec: Execution) -> PbwReport {
        let n = self.n;
        let mut triples = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    triples.push((a, b, c));
                }
            }
        }
        let ok = exec.map(&triples, |&(a, b, c)| {
            self.diamond_check_triple(a, b, c).map(|t| t.confluent).unwrap_or(false)
        });
        let first_failure = triples.iter().zip(ok).find(|(_, ok)| !ok).map(|(t, _)| *t);
        PbwReport { pbw: first_failure.is_none(), first_failure }
    }
}

/// Normal form of a weighted word combination with the given strategy.
pub fn normal_form(p: &AlgebraPresentation, input: &[(Scalar, Word)], strategy: Strategy) -> PbwPolynomial {
    Rewriter::new(p).normal_form(input, strategy)
}

pub fn multiply(p: &AlgebraPresentation, a: &PbwPolynomial, b: &PbwPolynomial) -> PbwPolynomial {
    Rewriter::new(p).multiply(a, b)
}

pub fn diamond_check_triple(
    p: &AlgebraPresentation,
    a: usize,
    b: usize,
    c: usize,
) -> Result<TripleCheck, PbwError> {
    Rewriter::new(p).diamond_check_triple(a, b, c)
}

pub fn is_pbw(p: &AlgebraPresentation, exec: Execution) -> PbwReport {
    Rewriter::new(p).is_pbw(exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> AlgebraPresentation {
        let mut p = AlgebraPresentation::new(4);
        for i in 1..=3 {
            for j in i + 1..=3 {
                p.set_pair(i, j, Scalar::one(), Scalar::one());
            }
            p.set_pair(i, 4, Scalar::from_int(2), Scalar::from_int(2));
            p.set_x(i, Scalar::one());
        }
        p
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e.to_vec())
    }

    #[test]
    fn single_rewrite_matches_relation() {
        let r = Rewriter::new(&p1());
        let nf = r.normal_form_word(&Word(vec![1, 2]), Strategy::Leftmost);
        assert_eq!(nf.to_string(), "D2 D1 - D2 + D1");
        let mut expect = PbwPolynomial::monomial(mono(&[1, 1, 0, 0]));
        expect.add_term(mono(&[1, 0, 0, 0]), Scalar::one());
        expect.add_term(mono(&[0, 1, 0, 0]), -Scalar::one());
        assert_eq!(nf, expect);
        assert_eq!(r.word_value(&Word(vec![1, 2])), expect);
    }

    #[test]
    fn normal_words_are_fixed() {
        let r = Rewriter::new(&p1());
        let run = r.normal_form_run(&[(Scalar::one(), Word(vec![3, 1]))], Strategy::Rightmost);
        assert_eq!(run.steps, 0);
        assert_eq!(run.result, PbwPolynomial::monomial(mono(&[1, 0, 1, 0])));
    }

    #[test]
    fn monomial_order_and_display() {
        let a = mono(&[2, 0, 1]);
        assert_eq!(a.to_string(), "D3 D1^2");
        assert_eq!(a.word(), Word(vec![3, 1, 1]));
        assert!(mono(&[0, 0, 1]) < mono(&[5, 0, 0]));
        assert!(mono(&[0, 0, 1]) > mono(&[1, 0, 0]));
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::up_to_degree(4, 3).len(), 4 + 10 + 20);
    }

    #[test]
    fn polynomial_display() {
        let mut p = PbwPolynomial::term(mono(&[1, 1]), Scalar::from_int(2));
        p.add_term(mono(&[0, 0]), Scalar::new(-1, 2));
        p.add_term(mono(&[1, 0]), -Scalar::one());
        assert_eq!(p.to_string(), "2 * D2 D1 - D1 - 1/2");
        assert_eq!(PbwPolynomial::zero().to_string(), "0");
        assert_eq!((-&PbwPolynomial::one(2)).to_string(), "-1");
    }

    #[test]
    fn triple_rejects_bad_indices() {
        let r = Rewriter::new(&p1());
        assert!(r.diamond_check_triple(2, 1, 3).is_err());
        assert!(r.diamond_check_triple(1, 2, 5).is_err());
    }

    #[test]
    fn two_generators_are_vacuously_pbw() {
        let mut p = AlgebraPresentation::new(2);
        p.set_pair(1, 2, Scalar::from_int(3), Scalar::from_int(-1));
        p.set_x(1, Scalar::from_int(4));
        assert_eq!(is_pbw(&p, Execution::Sequential), PbwReport { pbw: true, first_failure: None });
    }

    #[test]
    fn mixed_coefficients_break_confluence() {
        let mut p = p1();
        p.set_pair(2, 3, Scalar::from_int(2), Scalar::from_int(2));
        let report = is_pbw(&p, Execution::Parallel);
        assert_eq!(report.first_failure, Some((1, 2, 3)));
        assert!(is_pbw(&p1(), Execution::Parallel).pbw);
    }
}
