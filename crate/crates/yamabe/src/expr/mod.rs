//! Analytic expression front end.
//!
//! Metric components and potentials enter the workbench as text formulas.
//! [`parse`] turns a formula into an [`Expr`] AST against a declared symbol
//! list, and [`eval_jet`] evaluates an AST as a truncated Taylor expansion
//! at a base point, which is how every derivative in the curvature engine
//! is obtained. No constant folding happens at parse time, so the AST stays
//! in one-to-one correspondence with the source text.

mod jet;
mod parse;

pub use jet::{Jet, JetSpace};
pub use parse::parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("domain error in `{subtree}`: {message}")]
    Domain { subtree: String, message: String },
    #[error("jet shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("division by a jet with zero constant term")]
    ZeroDivisor,
    #[error("requested derivative order {requested} exceeds jet order {order}")]
    OrderOverflow { requested: usize, order: usize },
    #[error("symbol `{0}` is not bound to a value")]
    UnboundSymbol(String),
}

/// Unary elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
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
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
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
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    /// Names of every symbol appearing in the expression.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => out.push(s),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Sym(_) | Expr::Call(..) => 5,
        }
    }
}

/// Precedence-aware printer. Printing an AST and reparsing it yields a
/// structurally identical AST (for ASTs with non-negative literals, which
/// is everything the parser itself produces).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                child(f, e, e.precedence() < 3)
            }
            Expr::Add(a, b) => {
                child(f, a, a.precedence() < 1)?;
                write!(f, " + ")?;
                child(f, b, b.precedence() <= 1)
            }
            Expr::Sub(a, b) => {
                child(f, a, a.precedence() < 1)?;
                write!(f, " - ")?;
                child(f, b, b.precedence() <= 1)
            }
            Expr::Mul(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "*")?;
                child(f, b, b.precedence() <= 2)
            }
            Expr::Div(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "/")?;
                child(f, b, b.precedence() <= 2)
            }
            Expr::Pow(a, b) => {
                child(f, a, a.precedence() <= 4)?;
                write!(f, "^")?;
                child(f, b, b.precedence() < 4)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Bindings for one evaluation: coordinate names with base-point values,
/// plus named parameters.
#[derive(Debug, Clone)]
pub struct Bindings<'a> {
    pub coords: &'a [String],
    pub base: &'a [f64],
    pub params: &'a BTreeMap<String, f64>,
}

impl<'a> Bindings<'a> {
    pub fn new(coords: &'a [String], base: &'a [f64], params: &'a BTreeMap<String, f64>) -> Self {
        assert_eq!(coords.len(), base.len(), "base point dimension mismatch");
        Bindings { coords, base, params }
    }

    fn lookup(&self, name: &str) -> Option<SymbolValue> {
        if let Some(axis) = self.coords.iter().position(|c| c == name) {
            return Some(SymbolValue::Coordinate(axis, self.base[axis]));
        }
        self.params.get(name).map(|&v| SymbolValue::Parameter(v))
    }
}

enum SymbolValue {
    Coordinate(usize, f64),
    Parameter(f64),
}

/// Evaluate an expression as an order-`order` jet at the bound base point.
/// Coefficient `α` of the result is `∂^α e / α!`, exact to rounding.
pub fn eval_jet(e: &Expr, bindings: &Bindings, order: usize) -> Result<Jet, ExprError> {
    let space = JetSpace::get(bindings.coords.len(), order);
    eval_jet_in(e, bindings, &space)
}

fn eval_jet_in(e: &Expr, bindings: &Bindings, space: &Arc<JetSpace>) -> Result<Jet, ExprError> {
    match e {
        Expr::Num(v) => Ok(Jet::constant(space.clone(), *v)),
        Expr::Sym(name) => match bindings.lookup(name) {
            Some(SymbolValue::Coordinate(axis, v)) => Ok(Jet::coordinate(space.clone(), axis, v)),
            Some(SymbolValue::Parameter(v)) => Ok(Jet::constant(space.clone(), v)),
            None => Err(ExprError::UnboundSymbol(name.clone())),
        },
        Expr::Neg(a) => Ok(-&eval_jet_in(a, bindings, space)?),
        Expr::Add(a, b) => Ok(&eval_jet_in(a, bindings, space)? + &eval_jet_in(b, bindings, space)?),
        Expr::Sub(a, b) => Ok(&eval_jet_in(a, bindings, space)? - &eval_jet_in(b, bindings, space)?),
        Expr::Mul(a, b) => Ok(&eval_jet_in(a, bindings, space)? * &eval_jet_in(b, bindings, space)?),
        Expr::Div(a, b) => {
            let num = eval_jet_in(a, bindings, space)?;
            let den = eval_jet_in(b, bindings, space)?;
            num.checked_div(&den).map_err(|err| annotate(err, e))
        }
        Expr::Pow(a, b) => {
            let base = eval_jet_in(a, bindings, space)?;
            let expo = eval_jet_in(b, bindings, space)?;
            pow_jet(&base, &expo, e)
        }
        Expr::Call(f, a) => {
            let arg = eval_jet_in(a, bindings, space)?;
            arg.apply(*f).map_err(|err| annotate(err, e))
        }
    }
}

/// Power rules: a constant integer exponent uses repeated multiplication
/// (valid for any base, including negative); everything else goes through
/// `exp(b·log(a))` and therefore requires a positive base.
fn pow_jet(base: &Jet, expo: &Jet, node: &Expr) -> Result<Jet, ExprError> {
    if expo.is_constant() {
        let v = expo.value();
        if v.fract() == 0.0 && v.abs() <= 2f64.powi(31) {
            return base.powi(v as i64).map_err(|err| annotate(err, node));
        }
    }
    if base.value() <= 0.0 {
        return Err(ExprError::Domain {
            subtree: node.to_string(),
            message: format!(
                "non-integer power of a non-positive base ({})",
                base.value()
            ),
        });
    }
    let ln = base.apply(Func::Log).map_err(|err| annotate(err, node))?;
    (&ln * expo).apply(Func::Exp).map_err(|err| annotate(err, node))
}

fn annotate(err: ExprError, node: &Expr) -> ExprError {
    match err {
        ExprError::ZeroDivisor => ExprError::Domain {
            subtree: node.to_string(),
            message: "division by zero".into(),
        },
        ExprError::Domain { message, .. } => ExprError::Domain {
            subtree: node.to_string(),
            message,
        },
        other => other,
    }
}

/// Plain scalar evaluation, used by finite-difference cross-checks where
/// jets would defeat the purpose.
pub fn eval_scalar(e: &Expr, bindings: &Bindings) -> Result<f64, ExprError> {
    match e {
        Expr::Num(v) => Ok(*v),
        Expr::Sym(name) => match bindings.lookup(name) {
            Some(SymbolValue::Coordinate(_, v)) | Some(SymbolValue::Parameter(v)) => Ok(v),
            None => Err(ExprError::UnboundSymbol(name.clone())),
        },
        Expr::Neg(a) => Ok(-eval_scalar(a, bindings)?),
        Expr::Add(a, b) => Ok(eval_scalar(a, bindings)? + eval_scalar(b, bindings)?),
        Expr::Sub(a, b) => Ok(eval_scalar(a, bindings)? - eval_scalar(b, bindings)?),
        Expr::Mul(a, b) => Ok(eval_scalar(a, bindings)? * eval_scalar(b, bindings)?),
        Expr::Div(a, b) => {
            let den = eval_scalar(b, bindings)?;
            if den == 0.0 {
                return Err(ExprError::Domain {
                    subtree: e.to_string(),
                    message: "division by zero".into(),
                });
            }
            Ok(eval_scalar(a, bindings)? / den)
        }
        Expr::Pow(a, b) => {
            let base = eval_scalar(a, bindings)?;
            let expo = eval_scalar(b, bindings)?;
            if expo.fract() == 0.0 && expo.abs() <= 2f64.powi(31) {
                if base == 0.0 && expo < 0.0 {
                    return Err(ExprError::Domain {
                        subtree: e.to_string(),
                        message: "zero raised to a negative power".into(),
                    });
                }
                Ok(base.powi(expo as i32))
            } else if base <= 0.0 {
                Err(ExprError::Domain {
                    subtree: e.to_string(),
                    message: format!("non-integer power of a non-positive base ({base})"),
                })
            } else {
                Ok(base.powf(expo))
            }
        }
        Expr::Call(f, a) => {
            let v = eval_scalar(a, bindings)?;
            let out = match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(ExprError::Domain {
                            subtree: e.to_string(),
                            message: format!("log({v}): requires a positive argument"),
                        });
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(ExprError::Domain {
                            subtree: e.to_string(),
                            message: format!("sqrt({v}): requires a non-negative argument"),
                        });
                    }
                    v.sqrt()
                }
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Tanh => v.tanh(),
            };
            Ok(out)
        }
    }
}
