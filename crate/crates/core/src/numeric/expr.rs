//! Log-density expressions in one variable `x`, compiled from `evalexpr` syntax.

use std::f64::consts::{E, PI};

use evalexpr::{build_operator_tree, DefaultNumericTypes, Node, Operator, Value};

use super::jet::Jet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("cannot parse expression: {0}")]
    Parse(String),
    #[error("unknown identifier `{0}` (only x, pi and e are defined)")]
    Identifier(String),
    #[error("unsupported function `{0}`")]
    Function(String),
    #[error("unsupported construct `{0}`")]
    Construct(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Atan,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Const(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A compiled expression, evaluable on floats and on Taylor jets.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    source: String,
    root: Expr,
}

fn unwrap_root(node: &Node<DefaultNumericTypes>) -> &Node<DefaultNumericTypes> {
    let mut n = node;
    while matches!(n.operator(), Operator::RootNode) && n.children().len() == 1 {
        n = &n.children()[0];
    }
    n
}

fn arguments(node: &Node<DefaultNumericTypes>) -> Vec<&Node<DefaultNumericTypes>> {
    let n = unwrap_root(node);
    match n.operator() {
        Operator::Tuple => n.children().iter().collect(),
        _ => vec![n],
    }
}

fn convert(node: &Node<DefaultNumericTypes>) -> Result<Expr, ExprError> {
    let n = unwrap_root(node);
    let kids = n.children();
    let un = |i: usize| convert(&kids[i]).map(Box::new);
    Ok(match n.operator() {
        Operator::Const { value } => match value {
            Value::Int(i) => Expr::Const(*i as f64),
            Value::Float(f) => Expr::Const(*f),
            other => return Err(ExprError::Construct(format!("{other}"))),
        },
        Operator::VariableIdentifierRead { identifier } => match identifier.as_str() {
            "x" => Expr::X,
            "pi" => Expr::Const(PI),
            "e" => Expr::Const(E),
            other => return Err(ExprError::Identifier(other.into())),
        },
        Operator::Neg => Expr::Neg(un(0)?),
        Operator::Add => Expr::Add(un(0)?, un(1)?),
        Operator::Sub => Expr::Sub(un(0)?, un(1)?),
        Operator::Mul => Expr::Mul(un(0)?, un(1)?),
        Operator::Div => Expr::Div(un(0)?, un(1)?),
        Operator::Exp => Expr::Pow(un(0)?, un(1)?),
        Operator::FunctionIdentifier { identifier } => {
            let name = identifier.strip_prefix("math::").unwrap_or(identifier);
            let args = kids.first().map(arguments).unwrap_or_default();
            let expect = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(ExprError::Arity { name: name.into(), expected: k, got: args.len() })
                }
            };
            if name == "pow" {
                expect(2)?;
                return Ok(Expr::Pow(Box::new(convert(args[0])?), Box::new(convert(args[1])?)));
            }
            let f = match name {
                "exp" => Func::Exp,
                "ln" => Func::Ln,
                "sqrt" => Func::Sqrt,
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "sinh" => Func::Sinh,
                "cosh" => Func::Cosh,
                "tanh" => Func::Tanh,
                "atan" => Func::Atan,
                "abs" => Func::Abs,
                _ => return Err(ExprError::Function(identifier.clone())),
            };
            expect(1)?;
            Expr::Call(f, Box::new(convert(args[0])?))
        }
        other => return Err(ExprError::Construct(format!("{other:?}"))),
    })
}

trait Scalar: Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<Output = Self> + std::ops::Div<Output = Self> + std::ops::Neg<Output = Self> {
    fn lift(v: f64) -> Self;
    fn apply(self, f: Func) -> Self;
    fn pow(self, e: Self, constant: Option<f64>) -> Self;
}

impl Scalar for f64 {
    fn lift(v: f64) -> Self {
        v
    }
    fn apply(self, f: Func) -> Self {
        match f {
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Atan => self.atan(),
            Func::Abs => self.abs(),
        }
    }
    fn pow(self, e: Self, _: Option<f64>) -> Self {
        self.powf(e)
    }
}

impl Scalar for Jet {
    fn lift(v: f64) -> Self {
        Jet::constant(v)
    }
    fn apply(self, f: Func) -> Self {
        match f {
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Atan => self.atan(),
            Func::Abs => self.abs(),
        }
    }
    fn pow(self, e: Self, constant: Option<f64>) -> Self {
        match constant {
            Some(p) => self.powf(p),
            None => (self.ln() * e).exp(),
        }
    }
}

impl Expr {
    fn constant(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Neg(a) => a.constant().map(|v| -v),
            _ => None,
        }
    }

    fn eval<S: Scalar>(&self, x: S) -> S {
        match self {
            Expr::Const(c) => S::lift(*c),
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => a.eval(x).pow(b.eval(x), b.constant()),
            Expr::Call(f, a) => a.eval(x).apply(*f),
        }
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ExprError> {
        let tree = build_operator_tree::<DefaultNumericTypes>(source).map_err(|e| ExprError::Parse(e.to_string()))?;
        Ok(Expression { source: source.to_string(), root: convert(&tree)? })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.root.eval(x)
    }

    /// Value and first five derivatives at `x`.
    pub fn jet(&self, x: f64) -> Jet {
        self.root.eval(Jet::variable(x))
    }
}
