//! Standard figures and the composition calculus.
//!
//! A standard trapezoid `t(a)` has unit height, horizontal bases, both base
//! angles at 45°, and midline `a > 1`; its bases are `a−1` (top) and `a+1`
//! (bottom). A standard parallelogram `p(a)` has unit height, horizontal
//! bases of length `a > 0`, and a 45° lower-left angle. Five combination
//! rules assemble larger standard figures out of smaller ones, and `grid` /
//! `pyramid` iterate two of them in bulk. A [`CompositionTree`] records how a
//! figure was assembled; the geometry module later turns a tree into explicit
//! coordinates.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{
    format_qnum, format_rational, parse_qnum, parse_rational, FieldContext, QuadraticNumber,
    Rational,
};

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("mixed field contexts: {0}")]
    Mixed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureKind {
    Trapezoid,
    Parallelogram,
}

impl FigureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureKind::Trapezoid => "trapezoid",
            FigureKind::Parallelogram => "parallelogram",
        }
    }

    pub fn from_str_name(s: &str) -> Result<Self, FigureError> {
        match s {
            "trapezoid" => Ok(FigureKind::Trapezoid),
            "parallelogram" => Ok(FigureKind::Parallelogram),
            other => Err(FigureError::Parse(format!("unknown figure kind {other:?}"))),
        }
    }
}

/// A unit-height trapezoid or parallelogram, identified by its parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardFigure {
    kind: FigureKind,
    param: QuadraticNumber,
}

impl StandardFigure {
    pub fn new(kind: FigureKind, param: QuadraticNumber) -> Result<Self, FigureError> {
        match kind {
            FigureKind::Trapezoid => Self::trapezoid(param),
            FigureKind::Parallelogram => Self::parallelogram(param),
        }
    }

    /// `t(a)`: requires midline `a > 1` so both bases are positive.
    pub fn trapezoid(param: QuadraticNumber) -> Result<Self, FigureError> {
        let one = param.context().one();
        if (&param - &one).sign() <= 0 {
            return Err(FigureError::Domain(format!(
                "trapezoid midline must exceed 1, got {param}"
            )));
        }
        Ok(StandardFigure {
            kind: FigureKind::Trapezoid,
            param,
        })
    }

    /// `p(a)`: requires base `a > 0`.
    pub fn parallelogram(param: QuadraticNumber) -> Result<Self, FigureError> {
        if param.sign() <= 0 {
            return Err(FigureError::Domain(format!(
                "parallelogram base must be positive, got {param}"
            )));
        }
        Ok(StandardFigure {
            kind: FigureKind::Parallelogram,
            param,
        })
    }

    pub fn kind(&self) -> FigureKind {
        self.kind
    }

    pub fn param(&self) -> &QuadraticNumber {
        &self.param
    }

    pub fn context(&self) -> &FieldContext {
        self.param.context()
    }

    pub fn is_trapezoid(&self) -> bool {
        self.kind == FigureKind::Trapezoid
    }

    /// Area at unit height: midline (trapezoid) or base (parallelogram).
    pub fn area(&self) -> &QuadraticNumber {
        &self.param
    }

    /// Bounding-box width; `param + 1` for both kinds.
    pub fn width(&self) -> QuadraticNumber {
        &self.param + &self.param.context().one()
    }

    pub fn to_json(&self) -> Value {
        json!({ "kind": self.kind.as_str(), "param": format_qnum(&self.param) })
    }

    pub fn from_json(v: &Value, ctx: &FieldContext) -> Result<Self, FigureError> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| FigureError::Parse("figure missing \"kind\"".into()))?;
        let param = v
            .get("param")
            .and_then(Value::as_str)
            .ok_or_else(|| FigureError::Parse("figure missing \"param\"".into()))?;
        let param = parse_qnum(param, ctx).map_err(|e| FigureError::Parse(e.to_string()))?;
        StandardFigure::new(FigureKind::from_str_name(kind)?, param)
    }
}

impl fmt::Display for StandardFigure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.is_trapezoid() { "t" } else { "p" };
        write!(f, "{}({})", tag, self.param)
    }
}

/// Ratio of the short base to the long base of `t(x)`: `(x−1)/(x+1)`.
///
/// Strictly increasing from (1,∞) onto (0,1); multiplicative under the
/// stacking rule (case 5), which is what makes it the right coordinate for
/// trapezoid composition.
pub fn g(x: &QuadraticNumber) -> Result<QuadraticNumber, FigureError> {
    let one = x.context().one();
    if (x - &one).sign() <= 0 {
        return Err(FigureError::Domain(format!("g requires x > 1, got {x}")));
    }
    (x - &one).div(&(x + &one)).map_err(|e| FigureError::Domain(e.to_string()))
}

/// Inverse of [`g`]: maps a base ratio `y ∈ (0,1)` back to the midline.
pub fn g_inv(y: &QuadraticNumber) -> Result<QuadraticNumber, FigureError> {
    let one = y.context().one();
    if y.sign() <= 0 || (y - &one).sign() >= 0 {
        return Err(FigureError::Domain(format!(
            "g_inv requires 0 < y < 1, got {y}"
        )));
    }
    (&one + y).div(&(&one - y)).map_err(|e| FigureError::Domain(e.to_string()))
}

/// Value of the rational-to-irrational slope of a base ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HValue {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for HValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HValue::Finite(r) => write!(f, "{}", format_rational(r)),
            HValue::Infinity => write!(f, "inf"),
        }
    }
}

/// Writes `g(x) = p + q√d` and returns `p/q`, or `Infinity` when `q = 0`
/// (equivalently, when `x` is rational).
pub fn h(x: &QuadraticNumber) -> Result<HValue, FigureError> {
    let gx = g(x)?;
    if gx.irr_part().numer().sign() == num_bigint::Sign::NoSign {
        Ok(HValue::Infinity)
    } else {
        Ok(HValue::Finite(gx.rat_part() / gx.irr_part()))
    }
}

/// How a standard figure was assembled from smaller standard figures.
///
/// Every node caches the figure it produces; constructors recompute the cache
/// from the children and validate kind legality, so a tree that exists is
/// internally consistent.
#[derive(Clone, Debug, PartialEq)]
pub enum CompositionTree {
    Leaf {
        figure: StandardFigure,
    },
    Combine {
        case: u8,
        figure: StandardFigure,
        left: Box<CompositionTree>,
        right: Box<CompositionTree>,
    },
    Grid {
        k: u64,
        n: u64,
        figure: StandardFigure,
        child: Box<CompositionTree>,
    },
    Pyramid {
        levels: u32,
        figure: StandardFigure,
        child: Box<CompositionTree>,
    },
}

/// Result parameter of one stacking step: `t(c) ↦ t((c²+1)/(2c))`.
///
/// Equivalent to squaring the base ratio, since g((c²+1)/(2c)) = g(c)².
pub fn stack_once(c: &QuadraticNumber) -> QuadraticNumber {
    let one = c.context().one();
    (&c.square() + &one)
        .div(&(c + c))
        .expect("midline > 1 is nonzero")
}

impl CompositionTree {
    pub fn leaf(figure: StandardFigure) -> Self {
        CompositionTree::Leaf { figure }
    }

    /// The figure this subtree assembles.
    pub fn figure(&self) -> &StandardFigure {
        match self {
            CompositionTree::Leaf { figure } => figure,
            CompositionTree::Combine { figure, .. } => figure,
            CompositionTree::Grid { figure, .. } => figure,
            CompositionTree::Pyramid { figure, .. } => figure,
        }
    }

    /// Applies one of the five combination rules.
    ///
    /// 1. `p(α) | p(β)` side by side → `p(α+β)`
    /// 2. `p(α)` under `p(β)`, stacked → `p(αβ/(α+β))`
    /// 3. `t(α) | t(β)` (right one turned 180°) → `p(α+β)`
    /// 4. `p(α) | t(β)` side by side → `t(α+β)`
    /// 5. `t(β)` shrunk and stacked on `t(α)` → `t((αβ+1)/(α+β))`
    pub fn combine(
        case: u8,
        left: CompositionTree,
        right: CompositionTree,
    ) -> Result<Self, FigureError> {
        let lf = left.figure();
        let rf = right.figure();
        if lf.context() != rf.context() {
            return Err(FigureError::Mixed(format!(
                "{:?} vs {:?}",
                lf.context(),
                rf.context()
            )));
        }
        let want = |c: u8, l: FigureKind, r: FigureKind| -> Result<(), FigureError> {
            if lf.kind() == l && rf.kind() == r {
                Ok(())
            } else {
                Err(FigureError::KindMismatch(format!(
                    "case {c} needs ({}, {}), got ({}, {})",
                    l.as_str(),
                    r.as_str(),
                    lf.kind().as_str(),
                    rf.kind().as_str()
                )))
            }
        };
        let a = lf.param();
        let b = rf.param();
        let figure = match case {
            1 => {
                want(1, FigureKind::Parallelogram, FigureKind::Parallelogram)?;
                StandardFigure::parallelogram(a + b)?
            }
            2 => {
                want(2, FigureKind::Parallelogram, FigureKind::Parallelogram)?;
                let p = (a * b).div(&(a + b)).expect("positive denominator");
                StandardFigure::parallelogram(p)?
            }
            3 => {
                want(3, FigureKind::Trapezoid, FigureKind::Trapezoid)?;
                StandardFigure::parallelogram(a + b)?
            }
            4 => {
                want(4, FigureKind::Parallelogram, FigureKind::Trapezoid)?;
                StandardFigure::trapezoid(a + b)?
            }
            5 => {
                want(5, FigureKind::Trapezoid, FigureKind::Trapezoid)?;
                let one = a.context().one();
                let p = (&(a * b) + &one).div(&(a + b)).expect("positive denominator");
                StandardFigure::trapezoid(p)?
            }
            other => {
                return Err(FigureError::Domain(format!(
                    "combination case must be 1..=5, got {other}"
                )))
            }
        };
        Ok(CompositionTree::Combine {
            case,
            figure,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// Lays `k` columns × `n` rows of `child` (a parallelogram) at scale
    /// `1/n`, producing `p(a·k/n)` from `k·n` copies.
    pub fn grid(k: u64, n: u64, child: CompositionTree) -> Result<Self, FigureError> {
        if k == 0 || n == 0 {
            return Err(FigureError::Domain("grid needs k, n >= 1".into()));
        }
        if child.figure().is_trapezoid() {
            return Err(FigureError::KindMismatch(
                "grid requires a parallelogram child".into(),
            ));
        }
        let ratio = Rational::new(k.into(), n.into());
        let figure = StandardFigure::parallelogram(child.figure().param().mul_rat(&ratio))?;
        Ok(CompositionTree::Grid {
            k,
            n,
            figure,
            child: Box::new(child),
        })
    }

    /// Stacks `child` (a trapezoid) on shrunk copies of itself `levels`
    /// times, producing `t(c)` with `g(c) = g(a)^(2^levels)` from
    /// `2^levels` copies. The parameter heads toward 1 as levels grow.
    pub fn pyramid(levels: u32, child: CompositionTree) -> Result<Self, FigureError> {
        if levels == 0 {
            return Err(FigureError::Domain("pyramid needs levels >= 1".into()));
        }
        if !child.figure().is_trapezoid() {
            return Err(FigureError::KindMismatch(
                "pyramid requires a trapezoid child".into(),
            ));
        }
        let mut c = child.figure().param().clone();
        for _ in 0..levels {
            c = stack_once(&c);
        }
        let figure = StandardFigure::trapezoid(c)?;
        Ok(CompositionTree::Pyramid {
            levels,
            figure,
            child: Box::new(child),
        })
    }

    /// Number of placements the realized tiling will contain.
    pub fn piece_count(&self) -> u128 {
        match self {
            CompositionTree::Leaf { .. } => 1,
            CompositionTree::Combine { left, right, .. } => {
                left.piece_count() + right.piece_count()
            }
            CompositionTree::Grid { k, n, child, .. } => {
                (*k as u128) * (*n as u128) * child.piece_count()
            }
            CompositionTree::Pyramid { levels, child, .. } => {
                (1u128 << (*levels).min(120)) * child.piece_count()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CompositionTree::Leaf { .. } => 1,
            CompositionTree::Combine { left, right, .. } => 1 + left.depth().max(right.depth()),
            CompositionTree::Grid { child, .. } | CompositionTree::Pyramid { child, .. } => {
                1 + child.depth()
            }
        }
    }

    /// Distinct leaf figures, in first-visit (left-to-right) order.
    pub fn prototiles(&self) -> Vec<StandardFigure> {
        let mut seen = Vec::new();
        self.collect_prototiles(&mut seen);
        seen
    }

    fn collect_prototiles(&self, seen: &mut Vec<StandardFigure>) {
        match self {
            CompositionTree::Leaf { figure } => {
                if !seen.contains(figure) {
                    seen.push(figure.clone());
                }
            }
            CompositionTree::Combine { left, right, .. } => {
                left.collect_prototiles(seen);
                right.collect_prototiles(seen);
            }
            CompositionTree::Grid { child, .. } | CompositionTree::Pyramid { child, .. } => {
                child.collect_prototiles(seen)
            }
        }
    }

    /// Replaces every leaf equal to `target` by `replacement`, which must
    /// assemble exactly the same figure so all cached ancestors stay valid.
    pub fn substitute_leaf(
        &self,
        target: &StandardFigure,
        replacement: &CompositionTree,
    ) -> Result<CompositionTree, FigureError> {
        if replacement.figure() != target {
            return Err(FigureError::KindMismatch(format!(
                "replacement assembles {} but the leaf is {}",
                replacement.figure(),
                target
            )));
        }
        Ok(self.substitute_inner(target, replacement))
    }

    fn substitute_inner(
        &self,
        target: &StandardFigure,
        replacement: &CompositionTree,
    ) -> CompositionTree {
        match self {
            CompositionTree::Leaf { figure } => {
                if figure == target {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            CompositionTree::Combine {
                case,
                figure,
                left,
                right,
            } => CompositionTree::Combine {
                case: *case,
                figure: figure.clone(),
                left: Box::new(left.substitute_inner(target, replacement)),
                right: Box::new(right.substitute_inner(target, replacement)),
            },
            CompositionTree::Grid {
                k,
                n,
                figure,
                child,
            } => CompositionTree::Grid {
                k: *k,
                n: *n,
                figure: figure.clone(),
                child: Box::new(child.substitute_inner(target, replacement)),
            },
            CompositionTree::Pyramid {
                levels,
                figure,
                child,
            } => CompositionTree::Pyramid {
                levels: *levels,
                figure: figure.clone(),
                child: Box::new(child.substitute_inner(target, replacement)),
            },
        }
    }

    /// Serializes the tree with a context/prototile envelope:
    /// `{"d": ..., "prototiles": [...], "tree": {...}}`.
    pub fn to_json(&self) -> Value {
        let prototiles = self.prototiles();
        let index: HashMap<&StandardFigure, usize> =
            prototiles.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let ctx = self.figure().context();
        json!({
            "d": format_rational(ctx.d()),
            "prototiles": prototiles.iter().map(StandardFigure::to_json).collect::<Vec<_>>(),
            "tree": self.node_json(&index),
        })
    }

    fn node_json(&self, index: &HashMap<&StandardFigure, usize>) -> Value {
        match self {
            CompositionTree::Leaf { figure } => json!({
                "node": "leaf",
                "prototile": index[figure],
                "figure": figure.to_json(),
            }),
            CompositionTree::Combine {
                case,
                figure,
                left,
                right,
            } => json!({
                "node": "combine",
                "case": case,
                "children": [left.node_json(index), right.node_json(index)],
                "figure": figure.to_json(),
            }),
            CompositionTree::Grid {
                k,
                n,
                figure,
                child,
            } => json!({
                "node": "grid",
                "k": k,
                "n": n,
                "children": [child.node_json(index)],
                "figure": figure.to_json(),
            }),
            CompositionTree::Pyramid {
                levels,
                figure,
                child,
            } => json!({
                "node": "pyramid",
                "levels": levels,
                "children": [child.node_json(index)],
                "figure": figure.to_json(),
            }),
        }
    }

    /// Parses a tree envelope, rebuilding every node through the validating
    /// constructors and cross-checking each cached figure.
    pub fn from_json(v: &Value) -> Result<CompositionTree, FigureError> {
        let d = v
            .get("d")
            .and_then(Value::as_str)
            .ok_or_else(|| FigureError::Parse("tree missing \"d\"".into()))?;
        let d = parse_rational(d).map_err(|e| FigureError::Parse(e.to_string()))?;
        let ctx = FieldContext::new(d).map_err(|e| FigureError::Parse(e.to_string()))?;
        let prototiles = v
            .get("prototiles")
            .and_then(Value::as_array)
            .ok_or_else(|| FigureError::Parse("tree missing \"prototiles\"".into()))?
            .iter()
            .map(|p| StandardFigure::from_json(p, &ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let root = v
            .get("tree")
            .ok_or_else(|| FigureError::Parse("tree missing \"tree\"".into()))?;
        Self::node_from_json(root, &prototiles, &ctx)
    }

    fn node_from_json(
        v: &Value,
        prototiles: &[StandardFigure],
        ctx: &FieldContext,
    ) -> Result<CompositionTree, FigureError> {
        let node = v
            .get("node")
            .and_then(Value::as_str)
            .ok_or_else(|| FigureError::Parse("node missing \"node\"".into()))?;
        let children = |v: &Value, n: usize| -> Result<Vec<Value>, FigureError> {
            let c = v
                .get("children")
                .and_then(Value::as_array)
                .ok_or_else(|| FigureError::Parse(format!("{node} node missing children")))?;
            if c.len() != n {
                return Err(FigureError::Parse(format!(
                    "{node} node needs {n} children, got {}",
                    c.len()
                )));
            }
            Ok(c.to_vec())
        };
        let int_field = |v: &Value, name: &str| -> Result<u64, FigureError> {
            v.get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| FigureError::Parse(format!("{node} node missing \"{name}\"")))
        };
        let built = match node {
            "leaf" => {
                let idx = int_field(v, "prototile")? as usize;
                let figure = prototiles
                    .get(idx)
                    .ok_or_else(|| {
                        FigureError::Parse(format!("prototile index {idx} out of range"))
                    })?
                    .clone();
                CompositionTree::leaf(figure)
            }
            "combine" => {
                let case = int_field(v, "case")? as u8;
                let c = children(v, 2)?;
                let left = Self::node_from_json(&c[0], prototiles, ctx)?;
                let right = Self::node_from_json(&c[1], prototiles, ctx)?;
                CompositionTree::combine(case, left, right)?
            }
            "grid" => {
                let k = int_field(v, "k")?;
                let n = int_field(v, "n")?;
                let c = children(v, 1)?;
                CompositionTree::grid(k, n, Self::node_from_json(&c[0], prototiles, ctx)?)?
            }
            "pyramid" => {
                let levels = int_field(v, "levels")? as u32;
                let c = children(v, 1)?;
                CompositionTree::pyramid(levels, Self::node_from_json(&c[0], prototiles, ctx)?)?
            }
            other => return Err(FigureError::Parse(format!("unknown node kind {other:?}"))),
        };
        if let Some(cached) = v.get("figure") {
            let cached = StandardFigure::from_json(cached, ctx)?;
            if &cached != built.figure() {
                return Err(FigureError::Parse(format!(
                    "cached figure {} disagrees with recomputed {}",
                    cached,
                    built.figure()
                )));
            }
        }
        Ok(built)
    }
}
