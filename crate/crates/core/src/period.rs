//! Symbolic period formulas in special values of `L_σ(s) = L(s, σ × σ̃)`,
//! their evaluation, one unramified Euler factor, and `ζ(s)` by direct
//! summation with a rigorous tail enclosure.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value as Json};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error("no value assigned to {0}")]
    MissingAtom(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the Euler factor has a pole at this point")]
    PoleAtEvaluationPoint,
    #[error("Satake parameters must be nonzero")]
    ZeroSatake,
    #[error("{0}")]
    InvalidLength(String),
    #[error("expression parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("zeta needs s > 1")]
    ZetaDomain,
}

/// Opaque symbols of the formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `L_σ(j)`.
    Lval(u32),
    /// `res_{s=1} L_σ(s)`.
    ResAt1,
    /// `∏_{v∈S} α_v(σ_v; g_v)` for the named place set.
    AlphaFactor(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Lval(j) => write!(f, "L({j})"),
            Atom::ResAt1 => write!(f, "Res"),
            Atom::AlphaFactor(s) => write!(f, "Alpha({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PeriodExpression {
    Atom(Atom),
    Numeral(BigRational),
    Product(Vec<PeriodExpression>),
    Quotient(Box<PeriodExpression>, Box<PeriodExpression>),
    Power(Box<PeriodExpression>, i32),
    AbsSquare(Box<PeriodExpression>),
}

use PeriodExpression as E;

pub fn lval(j: u32) -> PeriodExpression {
    E::Atom(Atom::Lval(j))
}

pub fn res() -> PeriodExpression {
    E::Atom(Atom::ResAt1)
}

pub fn alpha() -> PeriodExpression {
    E::Atom(Atom::AlphaFactor("S".into()))
}

/// Product with the trivial cases collapsed.
pub fn product(mut factors: Vec<PeriodExpression>) -> PeriodExpression {
    match factors.len() {
        0 => E::Numeral(BigRational::one()),
        1 => factors.pop().unwrap(),
        _ => E::Product(factors),
    }
}

pub fn quotient(num: PeriodExpression, den: PeriodExpression) -> PeriodExpression {
    E::Quotient(Box::new(num), Box::new(den))
}

pub fn power(base: PeriodExpression, k: i32) -> PeriodExpression {
    if k == 1 {
        base
    } else {
        E::Power(Box::new(base), k)
    }
}

impl PeriodExpression {
    /// Atoms with multiplicity, in tree order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            E::Atom(a) => out.push(a.clone()),
            E::Numeral(_) => {}
            E::Product(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            E::Quotient(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            E::Power(b, _) | E::AbsSquare(b) => b.collect_atoms(out),
        }
    }

    /// `{kind, children | atom}`.
    pub fn to_json(&self) -> Json {
        match self {
            E::Atom(a) => json!({"kind": "atom", "atom": a.to_string()}),
            E::Numeral(r) => json!({"kind": "numeral", "atom": r.to_string()}),
            E::Product(fs) => json!({"kind": "product", "children": fs.iter().map(E::to_json).collect::<Vec<_>>()}),
            E::Quotient(a, b) => json!({"kind": "quotient", "children": [a.to_json(), b.to_json()]}),
            E::Power(b, k) => json!({"kind": "power", "exponent": k, "children": [b.to_json()]}),
            E::AbsSquare(b) => json!({"kind": "abs_square", "children": [b.to_json()]}),
        }
    }

    fn is_compound(&self) -> bool {
        matches!(self, E::Product(_) | E::Quotient(..))
            || matches!(self, E::Numeral(r) if !r.is_integer() || r.is_negative())
    }
}

impl fmt::Display for PeriodExpression {
    /// Canonical string form, e.g. `L(2)*L(4)/(Res*L(3))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &E, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            E::Atom(a) => write!(f, "{a}"),
            E::Numeral(r) => write!(f, "{r}"),
            E::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    wrap(f, x, x.is_compound())?;
                }
                Ok(())
            }
            E::Quotient(a, b) => {
                wrap(f, a, matches!(**a, E::Quotient(..) | E::Numeral(_)) && a.is_compound())?;
                write!(f, "/")?;
                wrap(f, b, b.is_compound())
            }
            E::Power(b, k) => {
                wrap(f, b, b.is_compound() || matches!(**b, E::Power(..)))?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            E::AbsSquare(b) => write!(f, "|{b}|^2"),
        }
    }
}

/// The mixed period of the normalised spherical vector of `L(σ, t)`:
/// for `t = 2m` the symplectic period, for `t = 2m + 1` the Whittaker
/// prefactor times `∏_{j=1}^m L(2j)/L(2j+1)`.
pub fn period_formula(t: u32) -> Result<PeriodExpression, PeriodError> {
    if t == 0 {
        return Err(PeriodError::InvalidLength("t must be at least 1".into()));
    }
    let m = t / 2;
    if t % 2 == 0 {
        let num = (1..=m).map(|j| lval(2 * j)).collect();
        let den = std::iter::once(res()).chain((1..m).map(|j| lval(2 * j + 1))).collect();
        Ok(quotient(product(num), product(den)))
    } else {
        let whittaker = quotient(alpha(), res());
        if m == 0 {
            return Ok(whittaker);
        }
        let num = (1..=m).map(|j| lval(2 * j)).collect();
        let den = (1..=m).map(|j| lval(2 * j + 1)).collect();
        Ok(product(vec![whittaker, quotient(product(num), product(den))]))
    }
}

/// `‖E_{−1}‖^{−2} = L(2)L(3)⋯L(t) / Res^{t−1}`.
pub fn norm_constant(t: u32) -> Result<PeriodExpression, PeriodError> {
    if t < 2 {
        return Err(PeriodError::InvalidLength("t must be at least 2".into()));
    }
    Ok(quotient(
        product((2..=t).map(lval).collect()),
        power(res(), t as i32 - 1),
    ))
}

/// Eigenvalue `Res / L(2m+1)` of the residual intertwining operator for
/// `w_Q` on the spherical section.
pub fn intertwining_eigenvalue(t: u32) -> Result<PeriodExpression, PeriodError> {
    if t < 3 || t % 2 == 0 {
        return Err(PeriodError::InvalidLength("t must be odd and at least 3".into()));
    }
    Ok(quotient(res(), lval(t)))
}

/// Values for evaluation: exact rationals or floats.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    fn binop(
        &self,
        o: &Value,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(exact(a, b)),
            _ => Value::Float(float(self.to_f64(), o.to_f64())),
        }
    }
}

pub type Assignment = HashMap<Atom, Value>;

/// Exact whenever every value used is exact.
pub fn evaluate_period(expr: &PeriodExpression, assignment: &Assignment) -> Result<Value, PeriodError> {
    Ok(match expr {
        E::Atom(a) => assignment
            .get(a)
            .cloned()
            .ok_or_else(|| PeriodError::MissingAtom(a.to_string()))?,
        E::Numeral(r) => Value::Exact(r.clone()),
        E::Product(fs) => {
            let mut acc = Value::Exact(BigRational::one());
            for f in fs {
                acc = acc.binop(&evaluate_period(f, assignment)?, |a, b| a * b, |a, b| a * b);
            }
            acc
        }
        E::Quotient(a, b) => {
            let num = evaluate_period(a, assignment)?;
            let den = evaluate_period(b, assignment)?;
            if den.is_zero() {
                return Err(PeriodError::DivisionByZero);
            }
            num.binop(&den, |a, b| a / b, |a, b| a / b)
        }
        E::Power(b, k) => {
            let v = evaluate_period(b, assignment)?;
            if *k < 0 && v.is_zero() {
                return Err(PeriodError::DivisionByZero);
            }
            match v {
                Value::Exact(r) => Value::Exact(num_traits::pow::Pow::pow(&r, *k)),
                Value::Float(x) => Value::Float(x.powi(*k)),
            }
        }
        E::AbsSquare(b) => match evaluate_period(b, assignment)? {
            Value::Exact(r) => Value::Exact(&r * &r),
            Value::Float(x) => Value::Float(x * x),
        },
    })
}

/// Recursive-descent reader for the canonical string form.
struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn err<T>(&self, message: &str) -> Result<T, PeriodError> {
        Err(PeriodError::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn starts(&self, lit: &str) -> bool {
        self.s[self.pos..].starts_with(lit.as_bytes())
    }

    fn int(&mut self) -> Result<BigInt, PeriodError> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap())
    }

    fn expr(&mut self) -> Result<E, PeriodError> {
        let num = self.term()?;
        if self.eat(b'/') {
            let den = self.unary()?;
            return Ok(quotient(num, den));
        }
        Ok(num)
    }

    fn term(&mut self) -> Result<E, PeriodError> {
        let mut fs = vec![self.unary()?];
        while self.eat(b'*') {
            fs.push(self.unary()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { E::Product(fs) })
    }

    fn unary(&mut self) -> Result<E, PeriodError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let paren = self.eat(b'(');
            let neg = self.eat(b'-');
            let k = self.int()?.to_i32().ok_or(PeriodError::Parse {
                position: self.pos,
                message: "exponent out of range".into(),
            })?;
            if paren && !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(E::Power(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<E, PeriodError> {
        if self.starts("L(") {
            self.pos += 2;
            let j = self.int()?.to_u32().ok_or(PeriodError::Parse {
                position: self.pos,
                message: "argument out of range".into(),
            })?;
            return if self.eat(b')') { Ok(lval(j)) } else { self.err("expected ')'") };
        }
        if self.starts("Res") {
            self.pos += 3;
            return Ok(res());
        }
        if self.starts("Alpha(") {
            self.pos += 6;
            let start = self.pos;
            while self.s.get(self.pos).is_some_and(|c| *c != b')') {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
            return if self.eat(b')') {
                Ok(E::Atom(Atom::AlphaFactor(name)))
            } else {
                self.err("expected ')'")
            };
        }
        if self.eat(b'|') {
            let inner = self.expr()?;
            if !(self.eat(b'|') && self.eat(b'^') && self.eat(b'2')) {
                return self.err("expected '|^2'");
            }
            return Ok(E::AbsSquare(Box::new(inner)));
        }
        if self.eat(b'(') {
            // a parenthesised rational numeral or a subexpression
            let save = self.pos;
            if let Some(r) = self.try_numeral() {
                if self.eat(b')') {
                    return Ok(E::Numeral(r));
                }
            }
            self.pos = save;
            let e = self.expr()?;
            return if self.eat(b')') { Ok(e) } else { self.err("expected ')'") };
        }
        if self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Ok(E::Numeral(BigRational::from_integer(self.int()?)));
        }
        self.err("expected an atom, numeral or '('")
    }

    fn try_numeral(&mut self) -> Option<BigRational> {
        let neg = self.eat(b'-');
        let n = self.int().ok()?;
        let d = if self.eat(b'/') { self.int().ok()? } else { BigInt::one() };
        if d.is_zero() {
            return None;
        }
        let r = BigRational::new(n, d);
        Some(if neg { -r } else { r })
    }
}

pub fn parse_expression(s: &str) -> Result<PeriodExpression, PeriodError> {
    let mut p = ExprParser { s: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.pos != s.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// `∏_{i,j} (1 − α_i α_j^{−1} X)^{−1}` at `X = q^{−s}`.
pub fn local_rs_factor(satake: &[Complex64], q: f64, s: f64) -> Result<Complex64, PeriodError> {
    if satake.iter().any(|a| a.norm() == 0.0) {
        return Err(PeriodError::ZeroSatake);
    }
    let x = q.powf(-s);
    let mut den = Complex64::new(1.0, 0.0);
    for ai in satake {
        for aj in satake {
            den *= Complex64::new(1.0, 0.0) - ai / aj * x;
        }
    }
    if den.norm() < 1e-12 {
        return Err(PeriodError::PoleAtEvaluationPoint);
    }
    Ok(den.inv())
}

/// Coefficients (low degree first) of the denominator polynomial
/// `∏_{i,j} (1 − α_i α_j^{−1} X)`.
pub fn local_rs_denominator(satake: &[Complex64]) -> Result<Vec<Complex64>, PeriodError> {
    if satake.iter().any(|a| a.norm() == 0.0) {
        return Err(PeriodError::ZeroSatake);
    }
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for ai in satake {
        for aj in satake {
            let c = -(ai / aj);
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, p) in poly.iter().enumerate() {
                next[k] += p;
                next[k + 1] += p * c;
            }
            poly = next;
        }
    }
    Ok(poly)
}

/// `ζ(s)` for real `s > 1` with a guaranteed enclosure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEnclosure {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms: u64,
}

/// Partial sum `S_N` plus the integral bounds
/// `(N+1)^{1−s}/(s−1) ≤ Σ_{n>N} n^{−s} ≤ N^{1−s}/(s−1)`, with `N` large
/// enough that the enclosure is narrower than `2·tol`.
pub fn zeta_direct(s: f64, tol: f64) -> Result<ZetaEnclosure, PeriodError> {
    if !(s > 1.0) {
        return Err(PeriodError::ZetaDomain);
    }
    let tail = |n: f64| n.powf(1.0 - s) / (s - 1.0);
    let mut n: u64 = 16;
    while tail(n as f64) - tail(n as f64 + 1.0) > 2.0 * tol {
        n *= 2;
    }
    // sum small terms first
    let partial: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
    let lower = partial + tail(n as f64 + 1.0);
    let upper = partial + tail(n as f64);
    Ok(ZetaEnclosure {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        terms: n,
    })
}

/// Assignment instantiating `σ` trivial on `GL_1` over `ℚ`: `L(j) = ζ(j)`,
/// `Res = 1` and every Alpha factor `1`.
pub fn zeta_assignment(expr: &PeriodExpression, tol: f64) -> Result<Assignment, PeriodError> {
    let mut a = Assignment::new();
    for atom in expr.atoms() {
        let v = match &atom {
            Atom::Lval(j) => Value::Float(zeta_direct(*j as f64, tol)?.value),
            Atom::ResAt1 | Atom::AlphaFactor(_) => Value::Exact(BigRational::one()),
        };
        a.insert(atom, v);
    }
    Ok(a)
}
