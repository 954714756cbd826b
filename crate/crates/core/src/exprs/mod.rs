//! User-supplied analytic functions of one complex variable.
//!
//! Expressions are parsed once and then evaluated, together with their first
//! derivative, by forward-mode dual numbers. Evaluation is generic over the
//! working precision so the same `p`, `g` and `phi` can feed a quad-double
//! Nyström matrix.

mod dual;
mod parser;

use std::fmt;

use num_complex::{Complex, Complex64};

use crate::error::Result;
use crate::prec::{lift, lower, Real};

pub use dual::Dual;
pub use parser::parse_expression;

/// Forward-mode dual number in double precision.
pub type DualComplex = Dual<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Expression tree. Literals produced by the parser are non-negative; a
/// leading minus becomes [`Expr::Neg`].
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Binding strength used by the printer.
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.prec() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}")?,
            Expr::Pi => f.write_str("pi")?,
            Expr::Var => f.write_str("x")?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write(f, 3)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(f, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write(f, 2)?;
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(f, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write(f, 3)?;
            }
            Expr::Pow(a, b) => {
                a.write(f, 5)?;
                f.write_str("^")?;
                b.write(f, 3)?;
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Replace every occurrence of `x` by `inner`.
    pub fn compose(&self, inner: &Expr) -> Expr {
        let b = |e: &Expr| Box::new(e.compose(inner));
        match self {
            Expr::Var => inner.clone(),
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Neg(a) => Expr::Neg(b(a)),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Pow(x, y) => Expr::Pow(b(x), b(y)),
            Expr::Call(func, a) => Expr::Call(*func, b(a)),
        }
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Var => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn eval<T: Real>(&self, z: Dual<T>) -> Result<Dual<T>> {
        Ok(match self {
            Expr::Num(v) => Dual::constant(Complex::new(T::from_f64(*v), T::zero())),
            Expr::Pi => Dual::constant(Complex::new(T::pi(), T::zero())),
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => a.eval(z)?.div(b.eval(z)?)?,
            Expr::Pow(a, b) => a.eval(z)?.pow(b.eval(z)?)?,
            Expr::Call(func, a) => a.eval(z)?.apply(*func)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = crate::error::GskError;
    fn from_str(s: &str) -> Result<Expr> {
        parse_expression(s)
    }
}

/// `f(z)` and `f'(z)` in double precision.
pub fn eval_with_derivative(ast: &Expr, z: Complex64) -> Result<(Complex64, Complex64)> {
    let d = ast.eval(Dual::<f64>::variable(z))?;
    Ok((d.value, d.deriv))
}

/// A parsed function of `x` together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFn {
    ast: Expr,
    source: String,
}

impl AnalyticFn {
    pub fn parse(src: &str) -> Result<AnalyticFn> {
        Ok(AnalyticFn { ast: parse_expression(src)?, source: src.trim().to_string() })
    }

    pub fn from_ast(ast: Expr) -> AnalyticFn {
        let source = ast.to_string();
        AnalyticFn { ast, source }
    }

    pub fn zero() -> AnalyticFn {
        AnalyticFn::from_ast(Expr::Num(0.0))
    }

    pub fn identity() -> AnalyticFn {
        AnalyticFn::from_ast(Expr::Var)
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `true` if the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Var => false,
                Expr::Num(_) | Expr::Pi => true,
                Expr::Neg(a) | Expr::Call(_, a) => walk(a),
                Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                    walk(a) && walk(b)
                }
            }
        }
        walk(&self.ast)
    }

    /// `true` for the literal zero function.
    pub fn is_zero(&self) -> bool {
        self.ast == Expr::Num(0.0)
    }

    /// `x -> self(inner(x))`.
    pub fn compose(&self, inner: &AnalyticFn) -> AnalyticFn {
        AnalyticFn::from_ast(self.ast.compose(&inner.ast))
    }

    pub fn eval_dual<T: Real>(&self, z: Complex<T>) -> Result<Dual<T>> {
        self.ast.eval(Dual::variable(z))
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        eval_with_derivative(&self.ast, z)
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.value)
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.deriv)
    }

    /// Value in working precision `T` at a double-precision point.
    pub fn value_in<T: Real>(&self, z: Complex64) -> Result<Complex<T>> {
        Ok(self.eval_dual(lift::<T>(z))?.value)
    }

    /// Value and derivative rounded to double precision from a `T` evaluation.
    pub fn eval_lowered<T: Real>(&self, z: Complex<T>) -> Result<(Complex64, Complex64)> {
        let d = self.eval_dual(z)?;
        Ok((lower(d.value), lower(d.deriv)))
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for AnalyticFn {
    type Err = crate::error::GskError;
    fn from_str(s: &str) -> Result<AnalyticFn> {
        AnalyticFn::parse(s)
    }
}
