//! Text grammar for noncommutative polynomials:
//!
//! ```text
//! poly   := ["-"] term (("+" | "-") term)*
//! term   := RATIONAL | [RATIONAL "*"] factor+
//! factor := "D" INT ["^" INT]
//! ```
//!
//! Factors keep their written order, so `D1 D2` is the word `D_1 D_2`.

use crate::pbw::Word;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn rational(&mut self) -> Result<Scalar, ExprError> {
        let start = self.pos;
        let Some(num) = self.digits() else {
            return self.err("expected a number");
        };
        let mut lit = num.to_string();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let Some(den) = self.digits() else {
                return self.err("expected a denominator");
            };
            lit.push('/');
            lit.push_str(den);
        }
        lit.parse().map_err(|_| ExprError { column: start + 1, message: format!("bad number `{lit}`") })
    }

    fn factor(&mut self, letters: &mut Vec<usize>) -> Result<(), ExprError> {
        self.pos += 1; // the `D`
        let col = self.pos;
        let Some(idx) = self.digits() else {
            return self.err("expected a generator index after `D`");
        };
        let a: usize = idx.parse().map_err(|_| ExprError { column: col + 1, message: "index too large".into() })?;
        if a == 0 || a > self.n {
            return Err(ExprError { column: col + 1, message: format!("generator D{a} out of range 1..{}", self.n) });
        }
        let mut power = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let Some(p) = self.digits() else {
                return self.err("expected an exponent");
            };
            power = p.parse().map_err(|_| ExprError { column: self.pos, message: "exponent too large".into() })?;
        }
        letters.extend(std::iter::repeat(a).take(power as usize));
        Ok(())
    }

    fn term(&mut self, sign: Scalar) -> Result<(Scalar, Word), ExprError> {
        let mut coeff = sign;
        let mut letters = Vec::new();
        match self.peek() {
            Some(b'0'..=b'9') => {
                coeff = coeff * self.rational()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if self.peek() != Some(b'D') {
                        return self.err("expected `D` after `*`");
                    }
                } else {
                    return Ok((coeff, Word(letters)));
                }
            }
            Some(b'D') => {}
            _ => return self.err("expected a term"),
        }
        while self.peek() == Some(b'D') {
            self.factor(&mut letters)?;
        }
        Ok((coeff, Word(letters)))
    }
}

/// Parse a polynomial over generators `1..=n` into weighted words.
pub fn parse_expr(text: &str, n: usize) -> Result<Vec<(Scalar, Word)>, ExprError> {
    let mut lx = Lexer { s: text.as_bytes(), pos: 0, n };
    let mut out = Vec::new();
    let mut sign = Scalar::one();
    if lx.peek() == Some(b'-') {
        lx.pos += 1;
        sign = -Scalar::one();
    }
    loop {
        out.push(lx.term(sign)?);
        match lx.peek() {
            None => break,
            Some(b'+') => {
                lx.pos += 1;
                sign = Scalar::one();
            }
            Some(b'-') => {
                lx.pos += 1;
                sign = -Scalar::one();
            }
            Some(_) => return lx.err("expected `+`, `-` or end of input"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_words_in_written_order() {
        let e = parse_expr("D1 D2", 2).unwrap();
        assert_eq!(e, vec![(Scalar::one(), Word(vec![1, 2]))]);
        let e = parse_expr("-2/3 * D3^2 D1 + 5 - D2D1", 3).unwrap();
        assert_eq!(
            e,
            vec![
                (Scalar::new(-2, 3), Word(vec![3, 3, 1])),
                (Scalar::from_int(5), Word(vec![])),
                (-Scalar::one(), Word(vec![2, 1])),
            ]
        );
    }

    #[test]
    fn reports_errors_with_columns() {
        assert_eq!(parse_expr("D4", 3).unwrap_err().column, 2);
        assert!(parse_expr("D1 +", 3).is_err());
        assert!(parse_expr("2 * 3", 3).is_err());
        assert!(parse_expr("D1 x", 3).is_err());
        assert!(parse_expr("", 3).is_err());
    }
}
