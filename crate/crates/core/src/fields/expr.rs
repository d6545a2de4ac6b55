use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::tabulated::Tabulated;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// `bump(arg) * poly(arg) / (1 - arg^2)^pow`, zero for `|arg| >= 1`.
///
/// Plain `bump(s)` has `poly = [1]` and `pow = 0`; every derivative of the
/// smooth bump stays in this family, so the cutoff is differentiated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpTerm {
    pub arg: Box<Expr>,
    pub poly: Vec<f64>,
    pub pow: u32,
}

/// Derivative `order` of a tabulated one-variable function, applied to `arg`.
#[derive(Clone, Debug)]
pub struct TableCall {
    pub table: Arc<Tabulated>,
    pub order: u8,
    pub arg: Box<Expr>,
}

impl PartialEq for TableCall {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table) && self.order == other.order && self.arg == other.arg
    }
}

/// Closed-form scalar expression over chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Bump(BumpTerm),
    Table(TableCall),
}

impl Expr {
    pub fn num(x: f64) -> Expr {
        Expr::Num(x)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn zero() -> Expr {
        Expr::Num(0.0)
    }

    pub fn one() -> Expr {
        Expr::Num(1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(x) if *x == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(x) if *x == 1.0)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn bump(arg: Expr) -> Expr {
        Expr::Bump(BumpTerm {
            arg: Box::new(arg),
            poly: vec![1.0],
            pow: 0,
        })
    }

    pub fn table(table: Arc<Tabulated>, arg: Expr) -> Expr {
        Expr::Table(TableCall {
            table,
            order: 0,
            arg: Box::new(arg),
        })
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        match arg {
            Expr::Num(x) => Expr::Num(func.apply(x)),
            arg => Expr::Call(func, Box::new(arg)),
        }
    }

    pub fn sin(self) -> Expr {
        Expr::call(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::call(Func::Cos, self)
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::call(Func::Log, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn powf(self, exponent: Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self;
        }
        match (&self, &exponent) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a.powf(*b)),
            _ => Expr::Binary(BinOp::Pow, Box::new(self), Box::new(exponent)),
        }
    }

    pub fn powi(self, n: i32) -> Expr {
        self.powf(Expr::Num(n as f64))
    }

    /// Free variable names.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Pi => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Bump(b) => b.arg.collect_vars(out),
            Expr::Table(t) => t.arg.collect_vars(out),
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(v) => v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
            Expr::Bump(b) => b.arg.depends_on(var),
            Expr::Table(t) => t.arg.depends_on(var),
        }
    }

    /// Replace every occurrence of `var` by `with`.
    pub fn substitute(&self, var: &str, with: &Expr) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Var(v) if v == var => with.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Neg(a) => -a.substitute(var, with),
            Expr::Binary(op, a, b) => {
                binary(*op, a.substitute(var, with), b.substitute(var, with))
            }
            Expr::Call(f, a) => Expr::call(*f, a.substitute(var, with)),
            Expr::Bump(b) => Expr::Bump(BumpTerm {
                arg: Box::new(b.arg.substitute(var, with)),
                poly: b.poly.clone(),
                pow: b.pow,
            }),
            Expr::Table(t) => Expr::Table(TableCall {
                table: t.table.clone(),
                order: t.order,
                arg: Box::new(t.arg.substitute(var, with)),
            }),
        }
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_all(&self, bindings: &[(&str, Expr)]) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Var(v) => bindings
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => -a.substitute_all(bindings),
            Expr::Binary(op, a, b) => {
                binary(*op, a.substitute_all(bindings), b.substitute_all(bindings))
            }
            Expr::Call(f, a) => Expr::call(*f, a.substitute_all(bindings)),
            Expr::Bump(b) => Expr::Bump(BumpTerm {
                arg: Box::new(b.arg.substitute_all(bindings)),
                poly: b.poly.clone(),
                pow: b.pow,
            }),
            Expr::Table(t) => Expr::Table(TableCall {
                table: t.table.clone(),
                order: t.order,
                arg: Box::new(t.arg.substitute_all(bindings)),
            }),
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::zero();
        }
        match self {
            Expr::Num(_) | Expr::Pi => Expr::zero(),
            Expr::Var(v) => {
                if v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => -a.differentiate(var),
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.differentiate(var), b.differentiate(var));
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                match op {
                    BinOp::Add => da + db,
                    BinOp::Sub => da - db,
                    BinOp::Mul => da * b.clone() + a * db,
                    BinOp::Div => (da * b.clone() - a * db) / b.powi(2),
                    BinOp::Pow => {
                        if db.is_zero() {
                            let lowered = b.clone() - Expr::one();
                            b * a.powf(lowered) * da
                        } else {
                            a.clone().powf(b.clone()) * (db * a.clone().ln() + b * da / a)
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let da = a.differentiate(var);
                let a = a.as_ref().clone();
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Tan => Expr::one() / a.cos().powi(2),
                    Func::Exp => a.exp(),
                    Func::Log => Expr::one() / a,
                    Func::Sqrt => Expr::one() / (Expr::Num(2.0) * a.sqrt()),
                };
                outer * da
            }
            Expr::Bump(b) => {
                let da = b.arg.differentiate(var);
                let m = b.pow as f64;
                // d/ds [P / (1-s^2)^m] * bump = bump * Q / (1-s^2)^(m+2)
                // with Q = -2sP + P'(1-s^2)^2 + 2msP(1-s^2).
                let p = &b.poly;
                let dp = poly_derivative(p);
                let one_minus_sq = [1.0, 0.0, -1.0];
                let q = poly_add(
                    &poly_add(
                        &poly_mul(&[0.0, -2.0], p),
                        &poly_mul(&dp, &poly_mul(&one_minus_sq, &one_minus_sq)),
                    ),
                    &poly_mul(&poly_mul(&[0.0, 2.0 * m], p), &one_minus_sq),
                );
                let term = Expr::Bump(BumpTerm {
                    arg: b.arg.clone(),
                    poly: trim_poly(q),
                    pow: b.pow + 2,
                });
                term * da
            }
            Expr::Table(t) => {
                let da = t.arg.differentiate(var);
                let term = Expr::Table(TableCall {
                    table: t.table.clone(),
                    order: t.order + 1,
                    arg: t.arg.clone(),
                });
                term * da
            }
        }
    }

    /// Evaluate with named bindings; convenient in tests, slow in loops.
    pub fn eval_with(&self, bindings: &[(&str, f64)]) -> Result<f64> {
        let names: Vec<&str> = bindings.iter().map(|(n, _)| *n).collect();
        let values: Vec<f64> = bindings.iter().map(|(_, v)| *v).collect();
        Ok(self.compile(&names)?.eval(&values))
    }

    /// Resolve variables to slots and flatten into a stack program.
    pub fn compile(&self, slots: &[&str]) -> Result<Compiled> {
        let mut ops = Vec::new();
        let mut depth = 0usize;
        let mut max_depth = 0usize;
        self.emit(slots, &mut ops, &mut depth, &mut max_depth)?;
        Ok(Compiled {
            ops,
            max_depth: max_depth.max(1),
        })
    }

    fn emit(
        &self,
        slots: &[&str],
        ops: &mut Vec<Op>,
        depth: &mut usize,
        max_depth: &mut usize,
    ) -> Result<()> {
        let push = |depth: &mut usize, max_depth: &mut usize| {
            *depth += 1;
            *max_depth = (*max_depth).max(*depth);
        };
        match self {
            Expr::Num(x) => {
                ops.push(Op::Const(*x));
                push(depth, max_depth);
            }
            Expr::Pi => {
                ops.push(Op::Const(std::f64::consts::PI));
                push(depth, max_depth);
            }
            Expr::Var(v) => {
                let slot = slots.iter().position(|s| s == v).ok_or_else(|| {
                    Error::UnknownIdentifier {
                        name: v.clone(),
                        offset: 0,
                    }
                })?;
                ops.push(Op::Load(slot));
                push(depth, max_depth);
            }
            Expr::Neg(a) => {
                a.emit(slots, ops, depth, max_depth)?;
                ops.push(Op::Neg);
            }
            Expr::Binary(op, a, b) => {
                a.emit(slots, ops, depth, max_depth)?;
                b.emit(slots, ops, depth, max_depth)?;
                ops.push(Op::Bin(*op));
                *depth -= 1;
            }
            Expr::Call(f, a) => {
                a.emit(slots, ops, depth, max_depth)?;
                ops.push(Op::Call(*f));
            }
            Expr::Bump(b) => {
                b.arg.emit(slots, ops, depth, max_depth)?;
                ops.push(Op::Bump(b.poly.clone().into(), b.pow as i32));
            }
            Expr::Table(t) => {
                t.arg.emit(slots, ops, depth, max_depth)?;
                ops.push(Op::Table(t.table.clone(), t.order));
            }
        }
        Ok(())
    }
}

fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Pow => a.powf(b),
    }
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn trim_poly(mut p: Vec<f64>) -> Vec<f64> {
    while p.len() > 1 && p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Smooth compactly supported bump: `exp(1 - 1/(1-s^2))` on `|s| < 1`.
pub fn bump_value(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a + b),
            _ if self.is_zero() => rhs,
            _ if rhs.is_zero() => self,
            _ => Expr::Binary(BinOp::Add, Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a - b),
            _ if rhs.is_zero() => self,
            _ if self.is_zero() => -rhs,
            _ => Expr::Binary(BinOp::Sub, Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a * b),
            _ if self.is_zero() || rhs.is_zero() => Expr::zero(),
            _ if self.is_one() => rhs,
            _ if rhs.is_one() => self,
            (Expr::Num(a), _) if *a == -1.0 => -rhs,
            (_, Expr::Num(b)) if *b == -1.0 => -self,
            _ => Expr::Binary(BinOp::Mul, Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (Expr::Num(a), Expr::Num(b)) if *b != 0.0 => Expr::Num(a / b),
            _ if self.is_zero() => Expr::zero(),
            _ if rhs.is_one() => self,
            _ => Expr::Binary(BinOp::Div, Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(x) => Expr::Num(-x),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::Num(x)
    }
}

// Printing follows the grammar's precedence levels:
// 1 sums, 2 products, 3 powers, 4 bases (atoms, calls, parenthesised, unary minus).
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Binary(BinOp::Pow, ..) => 3,
        Expr::Bump(b) if !(b.pow == 0 && b.poly == [1.0]) => 2,
        Expr::Num(x) if x.is_sign_negative() && *x != 0.0 => 4,
        _ => 4,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_at(f, a, 4)
            }
            Expr::Binary(op, a, b) => {
                let (lhs_min, rhs_min) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (4, 3),
                };
                write_at(f, a, lhs_min)?;
                write!(f, "{}", op.symbol())?;
                write_at(f, b, rhs_min)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bump(b) => {
                write!(f, "bump({})", b.arg)?;
                if b.pow == 0 && b.poly == [1.0] {
                    return Ok(());
                }
                write!(f, "*(")?;
                let mut first = true;
                for (k, c) in b.poly.iter().enumerate() {
                    if *c == 0.0 {
                        continue;
                    }
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{c}")?,
                        1 => write!(f, "{c}*({})", b.arg)?,
                        _ => write!(f, "{c}*({})^{k}", b.arg)?,
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                write!(f, ")/(1-({})^2)^{}", b.arg, b.pow)
            }
            Expr::Table(t) => {
                write!(f, "{}", t.table.name())?;
                for _ in 0..t.order {
                    write!(f, "'")?;
                }
                write!(f, "({})", t.arg)
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Load(usize),
    Neg,
    Bin(BinOp),
    Call(Func),
    Bump(Arc<[f64]>, i32),
    Table(Arc<Tabulated>, u8),
}

/// A flattened expression whose variables have been bound to slots.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
    max_depth: usize,
}

impl Compiled {
    pub fn eval(&self, slots: &[f64]) -> f64 {
        let mut stack: Vec<f64> = Vec::with_capacity(self.max_depth);
        for op in &self.ops {
            match op {
                Op::Const(x) => stack.push(*x),
                Op::Load(i) => stack.push(slots[*i]),
                Op::Neg => {
                    let a = stack.pop().unwrap();
                    stack.push(-a);
                }
                Op::Bin(op) => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => a / b,
                        BinOp::Pow => pow(a, b),
                    });
                }
                Op::Call(f) => {
                    let a = stack.pop().unwrap();
                    stack.push(f.apply(a));
                }
                Op::Bump(poly, pow) => {
                    let s = stack.pop().unwrap();
                    let b = bump_value(s);
                    stack.push(if b == 0.0 {
                        0.0
                    } else {
                        b * poly_eval(poly, s) / (1.0 - s * s).powi(*pow)
                    });
                }
                Op::Table(t, order) => {
                    let a = stack.pop().unwrap();
                    stack.push(t.eval(a, *order));
                }
            }
        }
        stack.pop().unwrap_or(0.0)
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}
