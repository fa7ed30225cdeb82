//! Quantum periods, their regularization, classical periods built from orbifold invariants,
//! and constant-term periods of Laurent polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{factorial, format_rational, int, Rational, Selector};
use crate::error::{Error, Result};
use crate::invariants::n_orb_all;
use crate::targets::{base_j_function, check_assumption, enumerate_curve_classes, DivisorArrangement, TargetSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodKind {
    Quantum,
    Regularized,
    Classical,
    Laurent,
}

impl fmt::Display for PeriodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PeriodKind::Quantum => "quantum",
            PeriodKind::Regularized => "regularized",
            PeriodKind::Classical => "classical",
            PeriodKind::Laurent => "laurent",
        };
        f.write_str(s)
    }
}

/// Coefficients `c_0, ..., c_cap` of a period sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodSequence {
    pub kind: PeriodKind,
    pub coeffs: Vec<Rational>,
}

impl PeriodSequence {
    pub fn cap(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl fmt::Display for PeriodSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "{m}: {}", format_rational(c))?;
        }
        Ok(())
    }
}

/// `p_m = sum_{(-K).beta = m} <[pt] psi^{m-2}>_beta`, with `p_0 = 1` and `p_1 = 0`, read off
/// the `H^0` component of `J_{X,beta}` at `z^{1-m}`.
pub fn quantum_period(x: &TargetSpace, m_cap: u32) -> Result<PeriodSequence> {
    let ctx = x.context(m_cap, None);
    let mut coeffs = vec![Rational::zero(); m_cap as usize + 1];
    coeffs[0] = Rational::one();
    for beta in enumerate_curve_classes(x, m_cap) {
        let m = x.anticanonical_degree(&beta);
        if m < 2 {
            continue;
        }
        let j = base_j_function(x, &ctx, &beta)?;
        let sel = Selector::new()
            .beta(beta)
            .zpow(1 - m as i32)
            .coh(x.ring().unit_monomial());
        coeffs[m as usize] += j.scalar(&sel);
    }
    Ok(PeriodSequence {
        kind: PeriodKind::Quantum,
        coeffs,
    })
}

/// Multiplies `p_m` by `m!`.
pub fn regularize(p: &PeriodSequence) -> Result<PeriodSequence> {
    if p.kind != PeriodKind::Quantum {
        return Err(Error::Precondition(format!(
            "regularization expects a quantum period, got {}",
            p.kind
        )));
    }
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| c * factorial(m as u32))
        .collect();
    Ok(PeriodSequence {
        kind: PeriodKind::Regularized,
        coeffs,
    })
}

/// Tuples `(d_1, ..., d_n)` of nonnegative integers summing to `total`.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `c_d = sum_{d_1+...+d_n = d} d!/prod d_i! sum_beta N^orb_beta(d_1, ..., d_n)`, with `Q^beta`
/// specialized to `t^{(-K).beta}`. Requires `sum D_i = -K_X` and the positivity assumption.
pub fn classical_period_orbifold(d: &DivisorArrangement, d_cap: u32) -> Result<PeriodSequence> {
    if !d.is_anticanonical() {
        return Err(Error::Precondition(
            "the divisors must sum to the anticanonical class".into(),
        ));
    }
    let assumption = check_assumption(d, d_cap);
    if !assumption.holds {
        return Err(Error::AssumptionViolated(assumption.violations));
    }
    let n_orb = n_orb_all(d, d_cap)?;
    let mut by_degrees: BTreeMap<Vec<u32>, Vec<&Vec<u32>>> = BTreeMap::new();
    for beta in n_orb.keys() {
        by_degrees.entry(d.degrees(beta)).or_default().push(beta);
    }
    let mut coeffs = vec![Rational::zero(); d_cap as usize + 1];
    coeffs[0] = Rational::one();
    for total in 2..=d_cap {
        let mut c = Rational::zero();
        for tuple in compositions(d.len(), total) {
            let Some(classes) = by_degrees.get(&tuple) else {
                log::debug!("no curve class has contact data {tuple:?}; skipped");
                continue;
            };
            let multinomial = tuple.iter().fold(factorial(total), |acc, di| acc / factorial(*di));
            for beta in classes {
                c += &multinomial * &n_orb[*beta];
            }
        }
        coeffs[total as usize] = c;
    }
    Ok(PeriodSequence {
        kind: PeriodKind::Classical,
        coeffs,
    })
}

/// Coefficientwise comparison of two period sequences.
#[derive(Clone, Debug)]
pub struct PeriodComparison {
    pub left: PeriodSequence,
    pub right: PeriodSequence,
    pub pass: bool,
    pub first_mismatch: Option<usize>,
}

pub fn compare_sequences(left: PeriodSequence, right: PeriodSequence) -> PeriodComparison {
    let n = left.coeffs.len().max(right.coeffs.len());
    let zero = Rational::zero();
    let first_mismatch = (0..n).find(|m| left.coeffs.get(*m).unwrap_or(&zero) != right.coeffs.get(*m).unwrap_or(&zero));
    PeriodComparison {
        pass: first_mismatch.is_none(),
        first_mismatch,
        left,
        right,
    }
}

/// Regularized quantum period of the target against the classical period built from the
/// orbifold invariants of the arrangement.
pub fn compare_periods(d: &DivisorArrangement, cap: u32) -> Result<PeriodComparison> {
    let left = regularize(&quantum_period(d.target(), cap)?)?;
    let right = classical_period_orbifold(d, cap)?;
    Ok(compare_sequences(left, right))
}

/// A Laurent polynomial with rational coefficients in named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl LaurentPolynomial {
    pub fn new(vars: Vec<String>, terms: BTreeMap<Vec<i32>, Rational>) -> Self {
        let mut p = LaurentPolynomial { vars, terms };
        p.terms.retain(|_, c| !c.is_zero());
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, Rational> {
        &self.terms
    }

    fn constant(n: usize, c: Rational) -> BTreeMap<Vec<i32>, Rational> {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(vec![0; n], c);
        }
        t
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        LaurentPolynomial::new(self.vars.clone(), out)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Parses expressions such as `x + y + 1/(x*y)` or `2*x^-1 - 3/4*y^2`. Division is only
    /// allowed by monomials.
    pub fn parse(text: &str) -> Result<LaurentPolynomial> {
        let tokens = tokenize(text)?;
        let mut vars: Vec<String> = Vec::new();
        for t in &tokens {
            if let Token::Ident(name) = t {
                if !vars.contains(name) {
                    vars.push(name.clone());
                }
            }
        }
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            vars: &vars,
        };
        let terms = p.expr()?;
        if p.pos != tokens.len() {
            return Err(parse_error(format!("unexpected token at position {}", p.pos + 1)));
        }
        Ok(LaurentPolynomial::new(vars, terms))
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .zip(&self.vars)
                    .filter(|(k, _)| **k != 0)
                    .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                    .collect();
                if mono.is_empty() {
                    format!("({})", format_rational(c))
                } else {
                    format!("({})*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn parse_error(msg: String) -> Error {
    Error::Precondition(format!("Laurent polynomial: {msg}"))
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(u64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                n.push(d);
                chars.next();
            }
            out.push(Token::Num(
                n.parse().map_err(|_| parse_error(format!("number {n} too large")))?,
            ));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
            }
            out.push(Token::Ident(s));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            chars.next();
        } else {
            return Err(parse_error(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

type Terms = BTreeMap<Vec<i32>, Rational>;

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn poly(&self, terms: Terms) -> LaurentPolynomial {
        LaurentPolynomial::new(self.vars.to_vec(), terms)
    }

    fn expr(&mut self) -> Result<Terms> {
        let mut acc = self.term()?;
        loop {
            let sign = if self.eat('+') {
                int(1)
            } else if self.eat('-') {
                int(-1)
            } else {
                return Ok(acc);
            };
            for (e, c) in self.term()? {
                *acc.entry(e).or_insert_with(Rational::zero) += c * &sign;
            }
            acc.retain(|_, c| !c.is_zero());
        }
    }

    fn term(&mut self) -> Result<Terms> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let rhs = self.factor()?;
                acc = self.poly(acc).mul(&self.poly(rhs)).terms;
            } else if self.eat('/') {
                let rhs = self.factor()?;
                let inv = invert_monomial(&rhs)?;
                acc = self.poly(acc).mul(&self.poly(inv)).terms;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Terms> {
        if self.eat('-') {
            let inner = self.factor()?;
            return Ok(inner.into_iter().map(|(e, c)| (e, -c)).collect());
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = if self.eat('-') {
            -self.atom_exponent()?
        } else {
            self.atom_exponent()?
        };
        power(&self.poly(base), exp)
    }

    fn atom_exponent(&mut self) -> Result<i32> {
        if self.eat('(') {
            let neg = self.eat('-');
            let k = self.number()?;
            if !self.eat(')') {
                return Err(parse_error("missing ')' in exponent".into()));
            }
            return Ok(if neg { -k } else { k });
        }
        self.number()
    }

    fn number(&mut self) -> Result<i32> {
        match self.peek() {
            Some(Token::Num(n)) => {
                let n = i32::try_from(*n).map_err(|_| parse_error(format!("exponent {n} too large")))?;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(parse_error("expected an integer exponent".into())),
        }
    }

    fn atom(&mut self) -> Result<Terms> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Token::Num(k)) => {
                self.pos += 1;
                Ok(LaurentPolynomial::constant(n, Rational::from_integer(k.into())))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let mut e = vec![0; n];
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .expect("collected during parse");
                e[i] = 1;
                Ok(BTreeMap::from([(e, Rational::one())]))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(parse_error("missing ')'".into()));
                }
                Ok(inner)
            }
            other => Err(parse_error(format!("unexpected {other:?}"))),
        }
    }
}

fn invert_monomial(t: &Terms) -> Result<Terms> {
    if t.len() != 1 {
        return Err(parse_error("division is only supported by a single monomial".into()));
    }
    let (e, c) = t.iter().next().expect("one term");
    Ok(BTreeMap::from([(e.iter().map(|k| -k).collect(), c.recip())]))
}

fn power(p: &LaurentPolynomial, k: i32) -> Result<Terms> {
    let base = if k < 0 {
        LaurentPolynomial::new(p.vars.clone(), invert_monomial(&p.terms)?)
    } else {
        p.clone()
    };
    let mut acc = LaurentPolynomial::new(p.vars.clone(), LaurentPolynomial::constant(p.vars.len(), int(1)));
    for _ in 0..k.unsigned_abs() {
        acc = acc.mul(&base);
    }
    Ok(acc.terms)
}

/// `c_d` = constant term of `f^d`, for `d = 0..=d_cap`.
pub fn laurent_classical_period(f: &LaurentPolynomial, d_cap: u32) -> PeriodSequence {
    let mut coeffs = Vec::with_capacity(d_cap as usize + 1);
    let mut acc = LaurentPolynomial::new(f.vars.clone(), LaurentPolynomial::constant(f.vars.len(), int(1)));
    for d in 0..=d_cap {
        if d > 0 {
            acc = acc.mul(f);
        }
        coeffs.push(acc.constant_term());
    }
    PeriodSequence {
        kind: PeriodKind::Laurent,
        coeffs,
    }
}
