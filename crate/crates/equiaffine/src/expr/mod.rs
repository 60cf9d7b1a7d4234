//! Closed-form scalar expressions over chart coordinates.
//!
//! An [`Expression`] is an immutable tree of constants, coordinate variables,
//! the unary functions sin/cos/tan/exp/ln/sqrt/sinh/cosh, the four arithmetic
//! operations, and powers with constant exponent. It supports plain
//! evaluation, exact first- and second-order forward-mode jets
//! ([`Jet1`], [`Jet2`]), symbolic differentiation, and rendering back to the
//! text form accepted by [`parse`].
//!
//! Construction goes through conservative smart constructors: finite constant
//! folding plus the identity eliminations `0*a -> 0`, `a+0 -> a`, `a*1 -> a`,
//! `0/a -> 0`, `a^1 -> a`. No canonical form beyond that is promised.

mod diff;
mod jet;
mod parse;

pub use jet::{Jet1, Jet2};
pub use parse::{parse, parse_with_names};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum UnFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
}

impl UnFn {
    pub(crate) fn name(self) -> &'static str {
        match self {
            UnFn::Sin => "sin",
            UnFn::Cos => "cos",
            UnFn::Tan => "tan",
            UnFn::Exp => "exp",
            UnFn::Ln => "ln",
            UnFn::Sqrt => "sqrt",
            UnFn::Sinh => "sinh",
            UnFn::Cosh => "cosh",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnFn::Sin,
            "cos" => UnFn::Cos,
            "tan" => UnFn::Tan,
            "exp" => UnFn::Exp,
            "ln" => UnFn::Ln,
            "sqrt" => UnFn::Sqrt,
            "sinh" => UnFn::Sinh,
            "cosh" => UnFn::Cosh,
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exponent of a power node: always a compile-time constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PowExp {
    Int(i32),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Un(UnFn, Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, PowExp),
}

/// A parsed scalar function of the chart coordinates `x0 .. x{n-1}`.
///
/// Immutable after construction; all evaluation entry points are pure and
/// safe to call concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    dim: usize,
    root: Node,
}

// ---------------------------------------------------------------------------
// smart constructors on Node
// ---------------------------------------------------------------------------

fn is_const(node: &Node, c: f64) -> bool {
    matches!(node, Node::Const(v) if *v == c)
}

pub(crate) fn nconst(c: f64) -> Node {
    Node::Const(c)
}

pub(crate) fn nneg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

pub(crate) fn nadd(a: Node, b: Node) -> Node {
    if let (Node::Const(x), Node::Const(y)) = (&a, &b) {
        let v = x + y;
        if v.is_finite() {
            return Node::Const(v);
        }
    }
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Node::Bin(BinOp::Add, Box::new(a), Box::new(b))
}

pub(crate) fn nsub(a: Node, b: Node) -> Node {
    if let (Node::Const(x), Node::Const(y)) = (&a, &b) {
        let v = x - y;
        if v.is_finite() {
            return Node::Const(v);
        }
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return nneg(b);
    }
    Node::Bin(BinOp::Sub, Box::new(a), Box::new(b))
}

pub(crate) fn nmul(a: Node, b: Node) -> Node {
    if let (Node::Const(x), Node::Const(y)) = (&a, &b) {
        let v = x * y;
        if v.is_finite() {
            return Node::Const(v);
        }
    }
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Node::Const(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Node::Bin(BinOp::Mul, Box::new(a), Box::new(b))
}

pub(crate) fn ndiv(a: Node, b: Node) -> Node {
    if let (Node::Const(x), Node::Const(y)) = (&a, &b) {
        if *y != 0.0 {
            let v = x / y;
            if v.is_finite() {
                return Node::Const(v);
            }
        }
    }
    if is_const(&a, 0.0) {
        return Node::Const(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Node::Bin(BinOp::Div, Box::new(a), Box::new(b))
}

pub(crate) fn npow(a: Node, e: PowExp) -> Node {
    match e {
        PowExp::Int(0) => return Node::Const(1.0),
        PowExp::Int(1) => return a,
        PowExp::Int(k) => {
            if let Node::Const(c) = &a {
                let v = jet::powi_f64(*c, k);
                if v.is_finite() {
                    return Node::Const(v);
                }
            }
        }
        PowExp::Real(r) => {
            if let Node::Const(c) = &a {
                if *c > 0.0 {
                    let v = c.powf(r);
                    if v.is_finite() {
                        return Node::Const(v);
                    }
                }
            }
        }
    }
    Node::Pow(Box::new(a), e)
}

pub(crate) fn nun(f: UnFn, a: Node) -> Node {
    if let Node::Const(c) = &a {
        let ok = match f {
            UnFn::Ln => *c > 0.0,
            UnFn::Sqrt => *c >= 0.0,
            _ => true,
        };
        if ok {
            let v = apply_un_f64(f, *c);
            if v.is_finite() {
                return Node::Const(v);
            }
        }
    }
    Node::Un(f, Box::new(a))
}

fn apply_un_f64(f: UnFn, v: f64) -> f64 {
    match f {
        UnFn::Sin => v.sin(),
        UnFn::Cos => v.cos(),
        UnFn::Tan => v.tan(),
        UnFn::Exp => v.exp(),
        UnFn::Ln => v.ln(),
        UnFn::Sqrt => v.sqrt(),
        UnFn::Sinh => v.sinh(),
        UnFn::Cosh => v.cosh(),
    }
}

/// `(f, f', f'')` of a unary function at `v`.
fn un_derivatives(f: UnFn, v: f64) -> (f64, f64, f64) {
    match f {
        UnFn::Sin => (v.sin(), v.cos(), -v.sin()),
        UnFn::Cos => (v.cos(), -v.sin(), -v.cos()),
        UnFn::Tan => {
            let t = v.tan();
            let sec2 = 1.0 + t * t;
            (t, sec2, 2.0 * t * sec2)
        }
        UnFn::Exp => {
            let e = v.exp();
            (e, e, e)
        }
        UnFn::Ln => (v.ln(), 1.0 / v, -1.0 / (v * v)),
        UnFn::Sqrt => {
            let s = v.sqrt();
            (s, 0.5 / s, -0.25 / (s * s * v))
        }
        UnFn::Sinh => (v.sinh(), v.cosh(), v.sinh()),
        UnFn::Cosh => (v.cosh(), v.sinh(), v.cosh()),
    }
}

// ---------------------------------------------------------------------------
// Expression API
// ---------------------------------------------------------------------------

impl Expression {
    pub(crate) fn from_node(dim: usize, root: Node) -> Self {
        Self { dim, root }
    }

    pub(crate) fn node(&self) -> &Node {
        &self.root
    }

    /// Chart dimension this expression was parsed/built against.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_node(dim, nconst(c))
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// The coordinate function `x{index}`. Panics if `index >= dim`.
    pub fn var(dim: usize, index: usize) -> Self {
        assert!(index < dim, "variable index {index} out of range for dimension {dim}");
        Self::from_node(dim, Node::Var(index))
    }

    pub fn is_zero(&self) -> bool {
        is_const(&self.root, 0.0)
    }

    fn binary(self, other: Expression, f: impl FnOnce(Node, Node) -> Node) -> Expression {
        assert_eq!(self.dim, other.dim, "expression dimension mismatch");
        Expression::from_node(self.dim, f(self.root, other.root))
    }

    pub fn add(self, other: Expression) -> Expression {
        self.binary(other, nadd)
    }

    pub fn sub(self, other: Expression) -> Expression {
        self.binary(other, nsub)
    }

    pub fn mul(self, other: Expression) -> Expression {
        self.binary(other, nmul)
    }

    pub fn div(self, other: Expression) -> Expression {
        self.binary(other, ndiv)
    }

    pub fn neg(self) -> Expression {
        Expression::from_node(self.dim, nneg(self.root))
    }

    pub fn scale(self, c: f64) -> Expression {
        let dim = self.dim;
        Expression::from_node(dim, nmul(nconst(c), self.root))
    }

    pub fn pow_int(self, k: i32) -> Expression {
        Expression::from_node(self.dim, npow(self.root, PowExp::Int(k)))
    }

    /// Rebuilds the tree bottom-up through the smart constructors, folding
    /// constants and stripping arithmetic identities.
    pub fn simplify(&self) -> Expression {
        fn go(node: &Node) -> Node {
            match node {
                Node::Const(c) => Node::Const(*c),
                Node::Var(i) => Node::Var(*i),
                Node::Neg(a) => nneg(go(a)),
                Node::Un(f, a) => nun(*f, go(a)),
                Node::Bin(op, a, b) => {
                    let (a, b) = (go(a), go(b));
                    match op {
                        BinOp::Add => nadd(a, b),
                        BinOp::Sub => nsub(a, b),
                        BinOp::Mul => nmul(a, b),
                        BinOp::Div => ndiv(a, b),
                    }
                }
                Node::Pow(a, e) => npow(go(a), *e),
            }
        }
        Expression::from_node(self.dim, go(&self.root))
    }

    /// Symbolic partial derivative with respect to coordinate `k`.
    ///
    /// Consistent with [`Expression::eval_jet1`]: the derivative expression
    /// evaluates to the jet gradient component wherever both are defined.
    pub fn differentiate(&self, k: usize) -> Expression {
        assert!(k < self.dim, "coordinate index {k} out of range");
        Expression::from_node(self.dim, diff::diff(&self.root, k))
    }

    /// IEEE double-precision value at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        eval_node(&self.root, p)
    }

    /// Value and exact gradient at `p`.
    pub fn eval_jet1(&self, p: &[f64]) -> Result<Jet1> {
        self.check_point(p)?;
        eval_node_jet1(&self.root, p)
    }

    /// Value, exact gradient, and exact symmetric Hessian at `p`.
    pub fn eval_jet2(&self, p: &[f64]) -> Result<Jet2> {
        self.check_point(p)?;
        eval_node_jet2(&self.root, p)
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expression expects {}",
                p.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Renders with the given coordinate names; inverse of
    /// [`parse_with_names`] up to structural equality.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        render_node(&self.root, names, &mut s);
        s
    }
}

impl std::fmt::Display for Expression {
    /// Renders with the default coordinate names `x0 .. x{n-1}`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

fn domain_error(reason: &str, node: &Node) -> Error {
    let mut s = String::new();
    render_node(node, &[], &mut s);
    Error::Domain {
        reason: reason.to_string(),
        subtree: s,
    }
}

fn check_un_domain(f: UnFn, v: f64, node: &Node) -> Result<()> {
    match f {
        UnFn::Ln if v <= 0.0 => Err(domain_error("ln of non-positive value", node)),
        UnFn::Sqrt if v < 0.0 => Err(domain_error("sqrt of negative value", node)),
        _ => Ok(()),
    }
}

fn check_pow_domain(e: PowExp, base: f64, node: &Node) -> Result<()> {
    match e {
        PowExp::Int(k) if k < 0 && base == 0.0 => {
            Err(domain_error("zero base with negative exponent", node))
        }
        PowExp::Real(_) if base <= 0.0 => Err(domain_error(
            "non-integer power of non-positive base",
            node,
        )),
        _ => Ok(()),
    }
}

fn eval_node(node: &Node, p: &[f64]) -> Result<f64> {
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var(i) => p[*i],
        Node::Neg(a) => -eval_node(a, p)?,
        Node::Un(f, a) => {
            let v = eval_node(a, p)?;
            check_un_domain(*f, v, node)?;
            apply_un_f64(*f, v)
        }
        Node::Bin(op, a, b) => {
            let x = eval_node(a, p)?;
            let y = eval_node(b, p)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain_error("division by zero", node));
                    }
                    x / y
                }
            }
        }
        Node::Pow(a, e) => {
            let base = eval_node(a, p)?;
            check_pow_domain(*e, base, node)?;
            match e {
                PowExp::Int(k) => jet::powi_f64(base, *k),
                PowExp::Real(r) => base.powf(*r),
            }
        }
    })
}

fn eval_node_jet1(node: &Node, p: &[f64]) -> Result<Jet1> {
    let n = p.len();
    Ok(match node {
        Node::Const(c) => Jet1::constant(*c, n),
        Node::Var(i) => Jet1::variable(p[*i], *i, n),
        Node::Neg(a) => eval_node_jet1(a, p)?.neg(),
        Node::Un(f, a) => {
            let j = eval_node_jet1(a, p)?;
            check_un_domain(*f, j.value, node)?;
            let (v, dv, _) = un_derivatives(*f, j.value);
            j.apply(v, dv)
        }
        Node::Bin(op, a, b) => {
            let x = eval_node_jet1(a, p)?;
            let y = eval_node_jet1(b, p)?;
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.mul(&y),
                BinOp::Div => {
                    if y.value == 0.0 {
                        return Err(domain_error("division by zero", node));
                    }
                    x.div(&y)
                }
            }
        }
        Node::Pow(a, e) => {
            let j = eval_node_jet1(a, p)?;
            check_pow_domain(*e, j.value, node)?;
            match e {
                PowExp::Int(k) => j.powi(*k),
                PowExp::Real(r) => {
                    let v = j.value.powf(*r);
                    j.apply(v, r * j.value.powf(r - 1.0))
                }
            }
        }
    })
}

fn eval_node_jet2(node: &Node, p: &[f64]) -> Result<Jet2> {
    let n = p.len();
    Ok(match node {
        Node::Const(c) => Jet2::constant(*c, n),
        Node::Var(i) => Jet2::variable(p[*i], *i, n),
        Node::Neg(a) => eval_node_jet2(a, p)?.neg(),
        Node::Un(f, a) => {
            let j = eval_node_jet2(a, p)?;
            check_un_domain(*f, j.value, node)?;
            let (v, dv, d2v) = un_derivatives(*f, j.value);
            j.apply(v, dv, d2v)
        }
        Node::Bin(op, a, b) => {
            let x = eval_node_jet2(a, p)?;
            let y = eval_node_jet2(b, p)?;
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.mul(&y),
                BinOp::Div => {
                    if y.value == 0.0 {
                        return Err(domain_error("division by zero", node));
                    }
                    x.div(&y)
                }
            }
        }
        Node::Pow(a, e) => {
            let j = eval_node_jet2(a, p)?;
            check_pow_domain(*e, j.value, node)?;
            match e {
                PowExp::Int(k) => j.powi(*k),
                PowExp::Real(r) => {
                    let v = j.value.powf(*r);
                    let dv = r * j.value.powf(r - 1.0);
                    let d2v = r * (r - 1.0) * j.value.powf(r - 2.0);
                    j.apply(v, dv, d2v)
                }
            }
        }
    })
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn node_prec(node: &Node) -> u8 {
    match node {
        Node::Const(c) if *c < 0.0 => PREC_NEG,
        Node::Const(_) | Node::Var(_) | Node::Un(..) => PREC_ATOM,
        Node::Neg(_) => PREC_NEG,
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Node::Pow(..) => PREC_POW,
    }
}

fn var_name(i: usize, names: &[String]) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{i}"))
}

/// Renders `node` into `out` with the minimal parentheses that make the text
/// re-parse to a structurally equal tree under the left-associative grammar.
fn render_node(node: &Node, names: &[String], out: &mut String) {
    // Parenthesize when the child's precedence is below `min` (left operands)
    // or not above it (right operands of the left-associative binaries).
    fn child(node: &Node, min: u8, strict: bool, names: &[String], out: &mut String) {
        let p = node_prec(node);
        let needs = if strict { p <= min } else { p < min };
        if needs {
            out.push('(');
            render_node(node, names, out);
            out.push(')');
        } else {
            render_node(node, names, out);
        }
    }

    match node {
        Node::Const(c) => out.push_str(&format!("{c}")),
        Node::Var(i) => out.push_str(&var_name(*i, names)),
        Node::Neg(a) => {
            out.push('-');
            child(a, PREC_NEG, false, names, out);
        }
        Node::Un(f, a) => {
            out.push_str(f.name());
            out.push('(');
            render_node(a, names, out);
            out.push(')');
        }
        Node::Bin(op, a, b) => {
            let (sym, prec) = match op {
                BinOp::Add => ('+', PREC_ADD),
                BinOp::Sub => ('-', PREC_ADD),
                BinOp::Mul => ('*', PREC_MUL),
                BinOp::Div => ('/', PREC_MUL),
            };
            child(a, prec, false, names, out);
            out.push(sym);
            child(b, prec, true, names, out);
        }
        Node::Pow(a, e) => {
            child(a, PREC_POW, false, names, out);
            out.push('^');
            match e {
                PowExp::Int(k) => out.push_str(&format!("{k}")),
                PowExp::Real(r) => out.push_str(&format!("{r}")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(text: &str) -> Expression {
        parse(text, 2).unwrap()
    }

    #[test]
    fn eval_basic_arithmetic() {
        assert_eq!(p2("x0*x1 + 1").eval(&[2.0, 3.0]).unwrap(), 7.0);
        assert_eq!(p2("exp(0)").eval(&[0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(p2("x1*cos(x0)").eval(&[0.0, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let err = p2("1/x0").eval(&[0.0, 0.0]).unwrap_err();
        match err {
            Error::Domain { reason, subtree } => {
                assert!(reason.contains("division by zero"));
                assert_eq!(subtree, "1/x0");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn ln_and_sqrt_domains() {
        assert!(p2("ln(x0)").eval(&[-1.0, 0.0]).is_err());
        assert!(p2("ln(x0)").eval(&[0.0, 0.0]).is_err());
        assert!(p2("sqrt(x0)").eval(&[-0.5, 0.0]).is_err());
        assert_eq!(p2("sqrt(x0)").eval(&[4.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn jet1_matches_hand_values() {
        let j = p2("x0*x1").eval_jet1(&[2.0, 3.0]).unwrap();
        assert_eq!(j.value, 6.0);
        assert_eq!(j.grad, vec![3.0, 2.0]);

        let j = p2("sin(x0)").eval_jet1(&[0.0, 9.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad, vec![1.0, 0.0]);
    }

    #[test]
    fn jet2_matches_hand_values() {
        let j = p2("x0^2").eval_jet2(&[1.7, -0.3]).unwrap();
        assert_eq!(j.hess(0, 0), 2.0);
        assert_eq!(j.hess(0, 1), 0.0);
        assert_eq!(j.hess(1, 1), 0.0);

        let j = p2("x0*x1").eval_jet2(&[5.0, -2.0]).unwrap();
        assert_eq!(j.hess(0, 1), 1.0);
        assert_eq!(j.hess(1, 0), 1.0);
        assert_eq!(j.hess(0, 0), 0.0);
    }

    #[test]
    fn jet_value_equals_plain_eval() {
        let e = p2("x0^3/(1 + x1^2) - sin(x0*x1) + exp(x1)*sqrt(x0 + 2)");
        let p = [0.37, -0.81];
        let v = e.eval(&p).unwrap();
        assert_eq!(e.eval_jet1(&p).unwrap().value.to_bits(), v.to_bits());
        assert_eq!(e.eval_jet2(&p).unwrap().value.to_bits(), v.to_bits());
    }

    #[test]
    fn derivative_examples() {
        let d = p2("x0^2").differentiate(0);
        assert_eq!(d.to_string(), "2*x0");

        let d = p2("sin(x0)").differentiate(1);
        assert!(d.is_zero());

        let d = p2("x0/x1").differentiate(0);
        assert_eq!(d.eval(&[1.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn simplify_strips_identities() {
        let e = p2("0*x1 + x0*1 + 0");
        assert_eq!(e.to_string(), "x0");
        let e = p2("(1 + 2)*x0^1");
        assert_eq!(e.to_string(), "3*x0");
    }

    #[test]
    fn negative_exponent_is_reciprocal_power() {
        let e = p2("x0^-2");
        assert_eq!(e.eval(&[2.0, 0.0]).unwrap(), 0.25);
        assert!(e.eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn real_exponent_requires_positive_base() {
        let e = p2("x0^0.5");
        assert_eq!(e.eval(&[4.0, 0.0]).unwrap(), 2.0);
        assert!(e.eval(&[-4.0, 0.0]).is_err());
        assert!(e.eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn neg_of_negative_constant_folds() {
        let e = p2("--2");
        assert_eq!(e, Expression::constant(2, 2.0).dim.pipe_check());
    }
}

#[cfg(test)]
trait PipeCheck {
    fn pipe_check(self) -> Expression;
}
