//! Shared helpers and a deliberately naive reference implementation.
//!
//! The oracle keeps polynomials as maps from raw words to `BigRational` and
//! rewrites any increasing adjacent pair straight from the defining relation.
//! It shares no code with the engine beyond reading coefficients.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use diffusion_algebra::calculus::AutomorphismFamily;
use diffusion_algebra::classifier::{generate_templates, Family, Skeleton, TableMode};
use diffusion_algebra::{AlgebraPresentation, PbwPolynomial, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub type Q = BigRational;
pub type OPoly = BTreeMap<Vec<usize>, Q>;

pub fn q(s: &Scalar) -> Q {
    BigRational::new(s.numer().clone(), s.denom().clone())
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn load(name: &str) -> AlgebraPresentation {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    AlgebraPresentation::parse(&text).unwrap()
}

pub fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

pub fn r(a: i64, b: i64) -> Scalar {
    Scalar::new(a, b)
}

/// Coefficient tables copied out of a presentation.
#[derive(Clone)]
pub struct Oracle {
    pub n: usize,
    g: Vec<Vec<Q>>,
    x: Vec<Q>,
}

fn add_into(p: &mut OPoly, w: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(w.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

pub fn word(w: &[usize]) -> OPoly {
    let mut p = OPoly::new();
    p.insert(w.to_vec(), Q::one());
    p
}

pub fn add(a: &OPoly, b: &OPoly) -> OPoly {
    let mut out = a.clone();
    for (w, c) in b {
        add_into(&mut out, w.clone(), c.clone());
    }
    out
}

pub fn scale(a: &OPoly, c: &Q) -> OPoly {
    let mut out = OPoly::new();
    for (w, k) in a {
        add_into(&mut out, w.clone(), k * c);
    }
    out
}

/// Concatenation product, no reduction.
pub fn concat(a: &OPoly, b: &OPoly) -> OPoly {
    let mut out = OPoly::new();
    for (u, c) in a {
        for (v, k) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            add_into(&mut out, w, c * k);
        }
    }
    out
}

/// Engine polynomial as raw decreasing words.
pub fn from_engine(p: &PbwPolynomial) -> OPoly {
    let mut out = OPoly::new();
    for (m, c) in p.terms() {
        add_into(&mut out, m.word().letters().to_vec(), q(c));
    }
    out
}

/// Position of an increasing adjacent pair chosen by `pick` among all of them.
fn increasing_pairs(w: &[usize]) -> Vec<usize> {
    (0..w.len().saturating_sub(1)).filter(|&k| w[k] < w[k + 1]).collect()
}

impl Oracle {
    pub fn new(p: &AlgebraPresentation) -> Self {
        let n = p.n();
        let g = (1..=n).map(|i| (1..=n).map(|j| if i == j { Q::zero() } else { q(p.g(i, j)) }).collect()).collect();
        let x = (1..=n).map(|i| q(p.x(i))).collect();
        Oracle { n, g, x }
    }

    fn g(&self, i: usize, j: usize) -> &Q {
        &self.g[i - 1][j - 1]
    }

    fn x(&self, i: usize) -> &Q {
        &self.x[i - 1]
    }

    /// Replace `D_a D_b` (a < b) at position `k` of `w`.
    fn rewrite_at(&self, w: &[usize], k: usize) -> OPoly {
        let (a, b) = (w[k], w[k + 1]);
        let lead = self.g(a, b);
        let mut out = OPoly::new();
        let mut put = |mid: &[usize], c: Q| {
            let mut v = w[..k].to_vec();
            v.extend_from_slice(mid);
            v.extend_from_slice(&w[k + 2..]);
            add_into(&mut out, v, c / lead);
        };
        put(&[b, a], self.g(b, a).clone());
        put(&[a], self.x(b).clone());
        put(&[b], -self.x(a).clone());
        out
    }

    /// Reduce until no increasing pair remains; `pick` selects among the
    /// available positions of the first reducible word.
    pub fn reduce_with(&self, p: &OPoly, pick: &mut dyn FnMut(&[usize]) -> usize) -> OPoly {
        let mut cur = p.clone();
        loop {
            let target = cur.iter().find(|(w, _)| !increasing_pairs(w).is_empty()).map(|(w, c)| (w.clone(), c.clone()));
            let Some((w, c)) = target else {
                return cur;
            };
            let spots = increasing_pairs(&w);
            let k = spots[pick(&spots) % spots.len()];
            cur.remove(&w);
            cur = add(&cur, &scale(&self.rewrite_at(&w, k), &c));
        }
    }

    pub fn reduce(&self, p: &OPoly) -> OPoly {
        self.reduce_with(p, &mut |_| 0)
    }

    pub fn reduce_random<R: Rng>(&self, p: &OPoly, rng: &mut R) -> OPoly {
        self.reduce_with(p, &mut |spots| rng.gen_range(0..spots.len()))
    }

    pub fn mul(&self, a: &OPoly, b: &OPoly) -> OPoly {
        self.reduce(&concat(a, b))
    }

    /// Overlap check on `D_a D_b D_c` by forcing the first step on each side.
    pub fn confluent(&self, a: usize, b: usize, c: usize) -> bool {
        let w = [a, b, c];
        let left = self.reduce(&self.rewrite_at(&w, 0));
        let right = self.reduce(&self.rewrite_at(&w, 1));
        left == right
    }

    pub fn first_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    if !self.confluent(a, b, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// The relation between `a < b` as an element that should vanish.
    pub fn relation(&self, a: usize, b: usize) -> OPoly {
        let mut p = OPoly::new();
        add_into(&mut p, vec![a, b], self.g(a, b).clone());
        add_into(&mut p, vec![b, a], -self.g(b, a).clone());
        add_into(&mut p, vec![a], -self.x(b).clone());
        add_into(&mut p, vec![b], self.x(a).clone());
        p
    }
}

/// Twisting maps as plain tables: `nu[a][j] = (lambda, mu)`.
#[derive(Clone)]
pub struct OracleTwist {
    pub table: Vec<Vec<(Q, Q)>>,
}

impl OracleTwist {
    pub fn from_family(nu: &AutomorphismFamily) -> Self {
        let n = nu.n();
        let table = (1..=n).map(|a| (1..=n).map(|j| (q(nu.lambda(a, j)), q(nu.mu(a, j)))).collect()).collect();
        OracleTwist { table }
    }

    /// `nu_a` applied letter by letter to a raw word, unreduced.
    pub fn apply_word(&self, a: usize, w: &[usize]) -> OPoly {
        let mut acc = word(&[]);
        for &j in w {
            let (l, m) = &self.table[a - 1][j - 1];
            let mut img = OPoly::new();
            add_into(&mut img, vec![j], l.clone());
            add_into(&mut img, vec![], m.clone());
            acc = concat(&acc, &img);
        }
        acc
    }

    pub fn apply(&self, a: usize, p: &OPoly) -> OPoly {
        let mut out = OPoly::new();
        for (w, c) in p {
            out = add(&out, &scale(&self.apply_word(a, w), c));
        }
        out
    }
}

/// `d(D_{w1} ... D_{wk}) = sum_k dD_{wk} nu_{wk}(D_{w1}..D_{w(k-1)}) D_{w(k+1)}..`,
/// returned as the unreduced coefficient of each `dD_a`.
pub fn oracle_partials(o: &Oracle, nu: &OracleTwist, p: &OPoly) -> Vec<OPoly> {
    let mut out = vec![OPoly::new(); o.n];
    for (w, c) in p {
        for k in 0..w.len() {
            let a = w[k];
            let term = concat(&nu.apply_word(a, &w[..k]), &word(&w[k + 1..]));
            out[a - 1] = add(&out[a - 1], &scale(&term, c));
        }
    }
    out.iter().map(|x| o.reduce(x)).collect()
}

/// A random admissible instance of `sk`.
pub fn instance<R: Rng>(sk: &Skeleton, rng: &mut R) -> AlgebraPresentation {
    loop {
        let v = sk.sample_params(rng);
        if let Ok(p) = sk.instantiate(&v) {
            return p;
        }
    }
}

pub fn templates_of(n: usize, mode: TableMode, family: Family) -> Vec<Skeleton> {
    generate_templates(n, mode).unwrap().into_iter().filter(|t| t.family == family).collect()
}

/// Small nonzero rational.
pub fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let num = rng.gen_range(-6..=6);
        let den = rng.gen_range(1..=4);
        if num != 0 {
            return Scalar::new(num, den);
        }
    }
}

/// Nonzero leading coefficients, arbitrary everything else.
pub fn random_presentation<R: Rng>(n: usize, rng: &mut R) -> AlgebraPresentation {
    let mut p = AlgebraPresentation::new(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let back = if rng.gen_bool(0.2) { Scalar::zero() } else { small_rational(rng) };
            p.set_pair(i, j, small_rational(rng), back);
        }
        if rng.gen_bool(0.6) {
            p.set_x(i, small_rational(rng));
        }
    }
    p
}

/// Read a golden file, dropping `#` comment lines.
pub fn golden_lines(name: &str) -> Vec<String> {
    std::fs::read_to_string(golden_path(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}
