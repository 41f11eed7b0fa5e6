//! Presentations: the generator count plus the coefficient data of the
//! defining relations
//!
//! ```text
//! g(i,j) D_i D_j - g(j,i) D_j D_i = x_j D_i - x_i D_j      (i < j)
//! ```

use std::fmt;

use crate::scalar::{Scalar, ScalarParseError};

/// Coefficient data for one diffusion algebra. Generators are `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraPresentation {
    n: usize,
    /// Row-major `n*n`, 0-based; the diagonal is unused and stays zero.
    g: Vec<Scalar>,
    x: Vec<Scalar>,
}

impl AlgebraPresentation {
    /// All coefficients zero. Leading coefficients must be set before the
    /// presentation validates.
    pub fn new(n: usize) -> Self {
        AlgebraPresentation {
            n,
            g: vec![Scalar::zero(); n * n],
            x: vec![Scalar::zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j) && i != j,
            "coefficient index ({i},{j}) out of range for n = {}",
            self.n
        );
        (i - 1) * self.n + (j - 1)
    }

    pub fn g(&self, i: usize, j: usize) -> &Scalar {
        &self.g[self.idx(i, j)]
    }

    pub fn set_g(&mut self, i: usize, j: usize, value: Scalar) {
        let k = self.idx(i, j);
        self.g[k] = value;
    }

    pub fn x(&self, i: usize) -> &Scalar {
        &self.x[i - 1]
    }

    pub fn set_x(&mut self, i: usize, value: Scalar) {
        self.x[i - 1] = value;
    }

    /// Set both coefficients of the relation between `i < j`.
    pub fn set_pair(&mut self, i: usize, j: usize, gij: Scalar, gji: Scalar) {
        self.set_g(i, j, gij);
        self.set_g(j, i, gji);
    }

    /// Coefficient of `D_b D_a` when the increasing product `D_a D_b`
    /// (`a < b`) is rewritten: `g(b,a) / g(a,b)`.
    pub fn swap_coefficient(&self, a: usize, b: usize) -> Scalar {
        debug_assert!(a < b);
        self.g(b, a)
            .checked_div(self.g(a, b))
            .expect("zero leading coefficient")
    }

    /// Structural violations. Family restrictions are checked elsewhere.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n < 2 {
            violations.push(Violation::DegenerateGeneratorCount(self.n));
        }
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if self.g(i, j).is_zero() {
                    violations.push(Violation::ZeroLeadingCoefficient(i, j));
                }
            }
        }
        ValidationReport { violations }
    }

    /// Canonical text form. Every leading coefficient is written, other
    /// entries only when nonzero; `parse` reads it back unchanged.
    pub fn render(&self) -> String {
        let mut out = format!("n = {}\n", self.n);
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                out.push_str(&format!("g {i} {j} = {}\n", self.g(i, j)));
                if !self.g(j, i).is_zero() {
                    out.push_str(&format!("g {j} {i} = {}\n", self.g(j, i)));
                }
            }
        }
        for i in 1..=self.n {
            if !self.x(i).is_zero() {
                out.push_str(&format!("x {i} = {}\n", self.x(i)));
            }
        }
        out
    }

    /// Parse the line-oriented presentation format.
    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        parse_presentation(text)
    }
}

impl fmt::Debug for AlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraPresentation {{ {} }}", self.render().trim_end().replace('\n', "; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DegenerateGeneratorCount(usize),
    ZeroLeadingCoefficient(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegenerateGeneratorCount(n) => {
                write!(f, "degenerate generator count n = {n} (need n >= 2)")
            }
            Violation::ZeroLeadingCoefficient(i, j) => {
                write!(f, "zero leading coefficient g({i},{j})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate assignment of {what}")]
    Duplicate { line: usize, what: String },
    #[error("line {line}: index {index} out of range 1..{n}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: zero leading coefficient g({i},{j})")]
    ZeroLeading { line: usize, i: usize, j: usize },
    #[error("missing `n = ...` declaration")]
    MissingN,
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> PresentationError {
        PresentationError::Syntax {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn expect(&mut self, token: char) -> Result<(), PresentationError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn keyword(&mut self) -> Result<char, PresentationError> {
        self.skip_ws();
        match self.text[self.pos..].chars().next() {
            Some(c @ ('n' | 'g' | 'x')) => {
                self.pos += 1;
                Ok(c)
            }
            _ => Err(self.err("expected `n`, `g` or `x`")),
        }
    }

    fn integer(&mut self) -> Result<usize, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.text[start..].bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.err("expected an integer"));
        }
        self.pos += digits;
        self.text[start..self.pos]
            .parse()
            .map_err(|_| PresentationError::Syntax {
                line: self.line,
                column: start + 1,
                message: "integer too large".into(),
            })
    }

    fn rational(&mut self) -> Result<Scalar, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        let take = |cur: &mut Self, pred: fn(u8) -> bool| -> &'a str {
            let n = cur.text[cur.pos..].bytes().take_while(|b| pred(*b)).count();
            let s = &cur.text[cur.pos..cur.pos + n];
            cur.pos += n;
            s
        };
        let mut literal = String::from(take(self, |b| b == b'-'));
        self.skip_ws();
        literal.push_str(take(self, |b| b.is_ascii_digit()));
        let before_slash = self.pos;
        self.skip_ws();
        if self.text[self.pos..].starts_with('/') {
            self.pos += 1;
            literal.push('/');
            self.skip_ws();
            literal.push_str(take(self, |b| b.is_ascii_digit()));
        } else {
            self.pos = before_slash;
        }
        literal.parse::<Scalar>().map_err(|e| {
            let message = match e {
                ScalarParseError::ZeroDenominator(_) => format!("zero denominator in `{literal}`"),
                _ => format!("malformed rational `{literal}`"),
            };
            PresentationError::Syntax {
                line: self.line,
                column: self.text[..start].chars().count() + 1,
                message,
            }
        })
    }
}

/// Parse presentation text. Unspecified coefficients default to zero.
pub fn parse_presentation(text: &str) -> Result<AlgebraPresentation, PresentationError> {
    let mut pres: Option<AlgebraPresentation> = None;
    let mut seen_g = std::collections::HashSet::new();
    let mut seen_x = std::collections::HashSet::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor { line, text: content, pos: 0 };
        if cur.at_end() {
            continue;
        }
        match cur.keyword()? {
            'n' => {
                cur.expect('=')?;
                let n = cur.integer()?;
                if !cur.at_end() {
                    return Err(cur.err("trailing input"));
                }
                if pres.is_some() {
                    return Err(PresentationError::Duplicate { line, what: "n".into() });
                }
                pres = Some(AlgebraPresentation::new(n));
            }
            kw => {
                let p = pres.as_mut().ok_or_else(|| cur.err("`n = ...` must come first"))?;
                let n = p.n();
                let check = |index: usize| {
                    if (1..=n).contains(&index) {
                        Ok(index)
                    } else {
                        Err(PresentationError::IndexOutOfRange { line, index, n })
                    }
                };
                if kw == 'g' {
                    let i = cur.integer()?;
                    let j = cur.integer()?;
                    cur.expect('=')?;
                    let value = cur.rational()?;
                    if !cur.at_end() {
                        return Err(cur.err("trailing input"));
                    }
                    let (i, j) = (check(i)?, check(j)?);
                    if i == j {
                        return Err(PresentationError::Syntax {
                            line,
                            column: 1,
                            message: format!("diagonal coefficient g({i},{j}) is not allowed"),
                        });
                    }
                    if !seen_g.insert((i, j)) {
                        return Err(PresentationError::Duplicate { line, what: format!("g({i},{j})") });
                    }
                    if i < j && value.is_zero() {
                        return Err(PresentationError::ZeroLeading { line, i, j });
                    }
                    p.set_g(i, j, value);
                } else {
                    let i = cur.integer()?;
                    cur.expect('=')?;
                    let value = cur.rational()?;
                    if !cur.at_end() {
                        return Err(cur.err("trailing input"));
                    }
                    let i = check(i)?;
                    if !seen_x.insert(i) {
                        return Err(PresentationError::Duplicate { line, what: format!("x({i})") });
                    }
                    p.set_x(i, value);
                }
            }
        }
    }
    pres.ok_or(PresentationError::MissingN)
}
