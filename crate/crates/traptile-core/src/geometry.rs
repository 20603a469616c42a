//! Coordinate realization of composition trees and exact tiling verification.
//!
//! A tiling places scaled (and possibly 180°-rotated) copies of standard
//! figures inside a standard target figure. Verification never touches
//! floating point: piece boundaries are collected as oriented segments in the
//! three possible edge directions (horizontal, +45°, −45°), grouped by
//! supporting line, and cancelled exactly; the tiling is correct iff every
//! line's signed residue vanishes. Cut recognition searches for full straight
//! cuts in the same three directions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{
    format_qnum, format_rational, parse_qnum, parse_rational, FieldContext,
    QuadraticNumber, Rational,
};
use crate::figures::{CompositionTree, FigureKind, StandardFigure};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("mixed field contexts: {0}")]
    MixedContext(String),
    #[error("bad placement: {0}")]
    BadPlacement(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: QuadraticNumber,
    pub y: QuadraticNumber,
}

impl Point {
    pub fn new(x: QuadraticNumber, y: QuadraticNumber) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A scaled, translated, possibly 180°-rotated copy of a prototile.
#[derive(Clone, Debug, PartialEq)]
pub struct TilePlacement {
    pub prototile: usize,
    pub scale: QuadraticNumber,
    pub anchor: Point,
    pub flipped: bool,
}

/// A target figure together with the pieces meant to tile it.
#[derive(Clone, Debug, PartialEq)]
pub struct Tiling {
    pub context: FieldContext,
    pub prototiles: Vec<StandardFigure>,
    pub target: StandardFigure,
    pub placements: Vec<TilePlacement>,
}

/// Canonical vertices of a unit-height figure in its bounding box, CCW from
/// the vertex with smallest x on the bottom edge.
///
/// Upright trapezoid t(m): (0,0), (m+1,0), (m,1), (1,1).
/// Rotated trapezoid: (1,0), (m,0), (m+1,1), (0,1).
/// Parallelogram p(m): (0,0), (m,0), (m+1,1), (1,1) — centrally symmetric,
/// so rotation is the identity on the vertex set and the flag is ignored.
fn local_vertices(fig: &StandardFigure, flipped: bool) -> [(QuadraticNumber, QuadraticNumber); 4] {
    let ctx = fig.context();
    let zero = ctx.zero();
    let one = ctx.one();
    let m = fig.param().clone();
    let m1 = &m + &one;
    match (fig.kind(), flipped) {
        (FigureKind::Parallelogram, _) => [
            (zero.clone(), zero.clone()),
            (m.clone(), zero),
            (m1, one.clone()),
            (one.clone(), one),
        ],
        (FigureKind::Trapezoid, false) => [
            (zero.clone(), zero.clone()),
            (m1, zero),
            (m, one.clone()),
            (one.clone(), one),
        ],
        (FigureKind::Trapezoid, true) => [
            (one.clone(), zero.clone()),
            (m, zero.clone()),
            (m1, one.clone()),
            (zero, one),
        ],
    }
}

impl Tiling {
    /// Validates indices, contexts and scales; cheap structural sanity used
    /// by every verification entry point.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let ctx = &self.context;
        let check_ctx = |c: &FieldContext, what: &str| -> Result<(), GeometryError> {
            if c != ctx {
                return Err(GeometryError::MixedContext(format!(
                    "{what} uses {:?}, tiling uses {:?}",
                    c, ctx
                )));
            }
            Ok(())
        };
        for f in &self.prototiles {
            check_ctx(f.context(), "prototile")?;
        }
        check_ctx(self.target.context(), "target")?;
        for (i, p) in self.placements.iter().enumerate() {
            check_ctx(p.scale.context(), "placement scale")?;
            check_ctx(p.anchor.x.context(), "placement anchor")?;
            check_ctx(p.anchor.y.context(), "placement anchor")?;
            if p.prototile >= self.prototiles.len() {
                return Err(GeometryError::BadPlacement(format!(
                    "placement {i} references prototile {} of {}",
                    p.prototile,
                    self.prototiles.len()
                )));
            }
            if p.scale.sign() <= 0 {
                return Err(GeometryError::BadPlacement(format!(
                    "placement {i} has nonpositive scale {}",
                    p.scale
                )));
            }
        }
        Ok(())
    }

    /// Realized vertices of one placement, CCW.
    pub fn placement_vertices(&self, p: &TilePlacement) -> [Point; 4] {
        let fig = &self.prototiles[p.prototile];
        let s = &p.scale;
        // Local coordinates only take the values {0, 1, m, m+1}, so the four
        // corners share intermediates: one multiply and a few adds per piece
        // instead of mapping local_vertices through the affine map.
        let y_lo = p.anchor.y.clone();
        let y_hi = &p.anchor.y + s;
        let x0 = p.anchor.x.clone();
        let x1 = &p.anchor.x + s;
        let xm = &p.anchor.x + &(s * fig.param());
        let xm1 = &xm + s;
        match (fig.kind(), p.flipped) {
            (FigureKind::Parallelogram, _) => [
                Point::new(x0, y_lo.clone()),
                Point::new(xm, y_lo),
                Point::new(xm1, y_hi.clone()),
                Point::new(x1, y_hi),
            ],
            (FigureKind::Trapezoid, false) => [
                Point::new(x0, y_lo.clone()),
                Point::new(xm1, y_lo),
                Point::new(xm, y_hi.clone()),
                Point::new(x1, y_hi),
            ],
            (FigureKind::Trapezoid, true) => [
                Point::new(x1, y_lo.clone()),
                Point::new(xm, y_lo),
                Point::new(xm1, y_hi.clone()),
                Point::new(x0, y_hi),
            ],
        }
    }

    /// Area of one placement: scale² × prototile area.
    pub fn placement_area(&self, p: &TilePlacement) -> QuadraticNumber {
        &p.scale.square() * self.prototiles[p.prototile].area()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": format_rational(self.context.d()),
            "prototiles": self.prototiles.iter().map(StandardFigure::to_json).collect::<Vec<_>>(),
            "target": self.target.to_json(),
            "placements": self.placements.iter().map(|p| json!({
                "prototile": p.prototile,
                "scale": format_qnum(&p.scale),
                "anchor": [format_qnum(&p.anchor.x), format_qnum(&p.anchor.y)],
                "flipped": p.flipped,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Tiling, GeometryError> {
        let parse = |e: String| GeometryError::Parse(e);
        let d = v
            .get("d")
            .and_then(Value::as_str)
            .ok_or_else(|| parse("tiling missing \"d\"".into()))?;
        let d = parse_rational(d).map_err(|e| parse(e.to_string()))?;
        let context = FieldContext::new(d).map_err(|e| parse(e.to_string()))?;
        let prototiles = v
            .get("prototiles")
            .and_then(Value::as_array)
            .ok_or_else(|| parse("tiling missing \"prototiles\"".into()))?
            .iter()
            .map(|f| StandardFigure::from_json(f, &context).map_err(|e| parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let target = StandardFigure::from_json(
            v.get("target")
                .ok_or_else(|| parse("tiling missing \"target\"".into()))?,
            &context,
        )
        .map_err(|e| parse(e.to_string()))?;
        let placements = v
            .get("placements")
            .and_then(Value::as_array)
            .ok_or_else(|| parse("tiling missing \"placements\"".into()))?
            .iter()
            .map(|p| -> Result<TilePlacement, GeometryError> {
                let prototile = p
                    .get("prototile")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| parse("placement missing \"prototile\"".into()))?
                    as usize;
                let scale = p
                    .get("scale")
                    .and_then(Value::as_str)
                    .ok_or_else(|| parse("placement missing \"scale\"".into()))?;
                let scale = parse_qnum(scale, &context).map_err(|e| parse(e.to_string()))?;
                let anchor = p
                    .get("anchor")
                    .and_then(Value::as_array)
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| parse("placement missing 2-element \"anchor\"".into()))?;
                let ax = anchor[0]
                    .as_str()
                    .ok_or_else(|| parse("anchor coordinates must be strings".into()))?;
                let ay = anchor[1]
                    .as_str()
                    .ok_or_else(|| parse("anchor coordinates must be strings".into()))?;
                let anchor = Point::new(
                    parse_qnum(ax, &context).map_err(|e| parse(e.to_string()))?,
                    parse_qnum(ay, &context).map_err(|e| parse(e.to_string()))?,
                );
                let flipped = p.get("flipped").and_then(Value::as_bool).unwrap_or(false);
                Ok(TilePlacement {
                    prototile,
                    scale,
                    anchor,
                    flipped,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tiling = Tiling {
            context,
            prototiles,
            target,
            placements,
        };
        tiling.validate()?;
        Ok(tiling)
    }
}

/// Placement frame mapping a subtree's canonical box into the plane.
#[derive(Clone)]
struct Frame {
    scale: QuadraticNumber,
    ax: QuadraticNumber,
    ay: QuadraticNumber,
    flipped: bool,
}

impl Frame {
    fn identity(ctx: &FieldContext) -> Self {
        Frame {
            scale: ctx.one(),
            ax: ctx.zero(),
            ay: ctx.zero(),
            flipped: false,
        }
    }

    /// Composes this frame (over a node of bounding width `node_width`) with
    /// a child placed at local anchor `(bx, by)`, local scale `u`, and local
    /// rotation `flip_child`; `child_width` is the child's bounding width.
    fn child(
        &self,
        node_width: &QuadraticNumber,
        bx: &QuadraticNumber,
        by: &QuadraticNumber,
        u: &QuadraticNumber,
        flip_child: bool,
        child_width: &QuadraticNumber,
    ) -> Frame {
        let ctx = self.scale.context();
        if !self.flipped {
            Frame {
                scale: &self.scale * u,
                ax: &self.ax + &(&self.scale * bx),
                ay: &self.ay + &(&self.scale * by),
                flipped: flip_child,
            }
        } else {
            // Rotating the node 180° sends the child's box [bx, bx+u·w] ×
            // [by, by+u] to [W−bx−u·w, W−bx] × [1−by−u, 1−by] and rotates
            // the child too.
            let one = ctx.one();
            let bx2 = &(node_width - bx) - &(u * child_width);
            let by2 = &(&one - by) - u;
            Frame {
                scale: &self.scale * u,
                ax: &self.ax + &(&self.scale * &bx2),
                ay: &self.ay + &(&self.scale * &by2),
                flipped: !flip_child,
            }
        }
    }
}

/// Expands a composition tree into explicit placements inside its figure's
/// canonical box. The placement count equals `tree.piece_count()`.
pub fn realize(tree: &CompositionTree) -> Tiling {
    let prototiles = tree.prototiles();
    let index: HashMap<StandardFigure, usize> = prototiles
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, f)| (f, i))
        .collect();
    let ctx = tree.figure().context().clone();
    let mut placements = Vec::new();
    emit(tree, &Frame::identity(&ctx), &index, &mut placements);
    Tiling {
        context: ctx,
        prototiles,
        target: tree.figure().clone(),
        placements,
    }
}

fn emit(
    node: &CompositionTree,
    frame: &Frame,
    index: &HashMap<StandardFigure, usize>,
    out: &mut Vec<TilePlacement>,
) {
    let ctx = node.figure().context();
    let one = ctx.one();
    let zero = ctx.zero();
    match node {
        CompositionTree::Leaf { figure } => {
            out.push(TilePlacement {
                prototile: index[figure],
                scale: frame.scale.clone(),
                anchor: Point::new(frame.ax.clone(), frame.ay.clone()),
                flipped: frame.flipped && figure.is_trapezoid(),
            });
        }
        CompositionTree::Combine {
            case, left, right, ..
        } => {
            let w = node.figure().width();
            let lw = left.figure().width();
            let rw = right.figure().width();
            let alpha = left.figure().param();
            let beta = right.figure().param();
            match case {
                // Side-by-side juxtapositions: left at the origin, right
                // shifted by alpha; case 3 rotates the right piece.
                1 | 3 | 4 => {
                    emit(left, &frame.child(&w, &zero, &zero, &one, false, &lw), index, out);
                    let flip = *case == 3;
                    emit(right, &frame.child(&w, alpha, &zero, &one, flip, &rw), index, out);
                }
                // Parallelogram stack: lower copy scaled β/(α+β), upper
                // scaled α/(α+β), sharing the base of length αβ/(α+β).
                2 => {
                    let sum = alpha + beta;
                    let u = beta.div(&sum).expect("positive denominator");
                    let v = alpha.div(&sum).expect("positive denominator");
                    emit(left, &frame.child(&w, &zero, &zero, &u, false, &lw), index, out);
                    emit(right, &frame.child(&w, &u, &u, &v, false, &rw), index, out);
                }
                // Trapezoid stack: the upper copy is shrunk so its bottom
                // base equals the lower copy's top base, then the pair is
                // normalized back to unit height.
                5 => {
                    let s = (alpha - &one).div(&(beta + &one)).expect("positive denominator");
                    let hh = &one + &s;
                    let inv_h = one.div(&hh).expect("positive denominator");
                    let upper = s.div(&hh).expect("positive denominator");
                    emit(left, &frame.child(&w, &zero, &zero, &inv_h, false, &lw), index, out);
                    emit(right, &frame.child(&w, &inv_h, &inv_h, &upper, false, &rw), index, out);
                }
                _ => unreachable!("constructor validated the case"),
            }
        }
        CompositionTree::Grid { k, n, child, .. } => {
            let w = node.figure().width();
            let cw = child.figure().width();
            let alpha = child.figure().param();
            let inv_n = ctx.from_rational(Rational::new(1.into(), (*n).into()));
            for j in 0..*n {
                for i in 0..*k {
                    // Row j is lifted and sheared by j/n; column i steps by
                    // the scaled base α/n.
                    let bx = &alpha.mul_rat(&Rational::new((i).into(), (*n).into()))
                        + &ctx.from_rational(Rational::new(j.into(), (*n).into()));
                    let by = ctx.from_rational(Rational::new(j.into(), (*n).into()));
                    emit(child, &frame.child(&w, &bx, &by, &inv_n, false, &cw), index, out);
                }
            }
        }
        CompositionTree::Pyramid { levels, child, .. } => {
            // Parameters of the intermediate stacks, innermost first.
            let mut params = Vec::with_capacity(*levels as usize + 1);
            params.push(child.figure().param().clone());
            for _ in 0..*levels {
                let last = params.last().unwrap();
                params.push(crate::figures::stack_once(last));
            }
            emit_pyramid(child, &params, *levels as usize, frame, index, out);
        }
    }
}

/// Emits the 2^level copies of `child` forming the level-`level` stack whose
/// parameters are precomputed in `params`.
fn emit_pyramid(
    child: &CompositionTree,
    params: &[QuadraticNumber],
    level: usize,
    frame: &Frame,
    index: &HashMap<StandardFigure, usize>,
    out: &mut Vec<TilePlacement>,
) {
    if level == 0 {
        emit(child, frame, index, out);
        return;
    }
    let ctx = params[0].context();
    let one = ctx.one();
    let zero = ctx.zero();
    let alpha = &params[level - 1];
    let w = &params[level] + &one;
    let sub_w = alpha + &one;
    let s = (alpha - &one).div(&sub_w).expect("positive denominator");
    let hh = &one + &s;
    let inv_h = one.div(&hh).expect("positive denominator");
    let upper = s.div(&hh).expect("positive denominator");
    let lower_frame = frame.child(&w, &zero, &zero, &inv_h, false, &sub_w);
    emit_pyramid(child, params, level - 1, &lower_frame, index, out);
    let upper_frame = frame.child(&w, &inv_h, &inv_h, &upper, false, &sub_w);
    emit_pyramid(child, params, level - 1, &upper_frame, index, out);
}

/// Direction class of a tiling edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Horizontal,
    DiagUp,
    DiagDown,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::DiagUp => "+45",
            Direction::DiagDown => "-45",
        }
    }

    /// Linear functional constant on lines of this direction.
    fn offset_of(self, p: &Point) -> QuadraticNumber {
        match self {
            Direction::Horizontal => p.y.clone(),
            Direction::DiagUp => &p.y - &p.x,
            Direction::DiagDown => &p.x + &p.y,
        }
    }
}

/// A segment along which the signed boundary sum failed to cancel.
#[derive(Clone, Debug)]
pub struct Residue {
    pub direction: Direction,
    pub offset: QuadraticNumber,
    pub from: QuadraticNumber,
    pub to: QuadraticNumber,
    pub multiplicity: i64,
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "direction {}, line offset {}, x from {} to {}, multiplicity {}",
            self.direction.as_str(),
            self.offset,
            self.from,
            self.to,
            self.multiplicity
        )
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    AreaMismatch {
        placed: QuadraticNumber,
        target: QuadraticNumber,
    },
    BoundaryResidue(Residue),
}

/// Outcome of the exact tiling check.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub piece_count: usize,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        matches!(self.verdict, Verdict::Pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Pass => write!(f, "PASS ({} pieces)", self.piece_count),
            Verdict::AreaMismatch { placed, target } => write!(
                f,
                "FAIL: piece areas sum to {placed}, target area is {target}"
            ),
            Verdict::BoundaryResidue(r) => write!(f, "FAIL: uncancelled boundary at {r}"),
        }
    }
}

/// Adds one oriented edge to the cancellation buckets. The sign is +1 along
/// increasing x (or increasing y for vertical-free directions here — all
/// three directions have nonconstant x except horizontal edges of zero
/// length, which cannot occur).
///
/// Buckets are hash maps on purpose: equality of reduced exact numbers is a
/// cheap component compare, while ordering needs big multiplications — so
/// ordering is deferred to the per-line sweep, which only ever sorts the
/// distinct breakpoints.
fn add_edge(
    buckets: &mut HashMap<(Direction, QuadraticNumber), HashMap<QuadraticNumber, i64>>,
    a: &Point,
    b: &Point,
    weight: i64,
) -> Result<(), GeometryError> {
    // Classify by invariant equality rather than by forming dx/dy: the line
    // invariant (y, y−x, or x+y) doubles as the bucket offset, and equality of
    // reduced exact numbers is a component compare with no multiplications.
    let (dir, offset) = if a.y == b.y {
        (Direction::Horizontal, a.y.clone())
    } else {
        let up = &a.y - &a.x;
        if up == &b.y - &b.x {
            (Direction::DiagUp, up)
        } else {
            let down = &a.x + &a.y;
            if down == &b.x + &b.y {
                (Direction::DiagDown, down)
            } else {
                return Err(GeometryError::BadPlacement(format!(
                    "edge {a} -> {b} not in an allowed direction"
                )));
            }
        }
    };
    let (t0, t1, w) = match a.x.cmp(&b.x) {
        std::cmp::Ordering::Less => (&a.x, &b.x, weight),
        std::cmp::Ordering::Greater => (&b.x, &a.x, -weight),
        std::cmp::Ordering::Equal => {
            return Err(GeometryError::BadPlacement(format!(
                "degenerate edge at {a}"
            )));
        }
    };
    let bucket = buckets.entry((dir, offset)).or_default();
    *bucket.entry(t0.clone()).or_insert(0) += w;
    *bucket.entry(t1.clone()).or_insert(0) -= w;
    Ok(())
}

/// Exact verification by oriented boundary cancellation.
///
/// Every piece contributes its CCW boundary with weight +1 and the target
/// contributes its boundary with weight −1. The pieces tile the target
/// exactly iff on every supporting line the signed interval sum is zero:
/// any gap, overlap, or protrusion leaves a segment with nonzero
/// multiplicity, because the covering-count function jumps across it.
pub fn verify_exact(tiling: &Tiling) -> Result<VerificationReport, GeometryError> {
    tiling.validate()?;
    let piece_count = tiling.placements.len();

    // Cheap necessary condition first: exact area bookkeeping. Pairwise
    // reduction keeps intermediate denominators balanced; a running sum drags
    // one ever-growing common denominator through every addition.
    let mut areas: Vec<QuadraticNumber> = tiling
        .placements
        .iter()
        .map(|p| tiling.placement_area(p))
        .collect();
    if areas.is_empty() {
        areas.push(tiling.context.zero());
    }
    while areas.len() > 1 {
        areas = areas
            .chunks(2)
            .map(|c| {
                if c.len() == 2 {
                    &c[0] + &c[1]
                } else {
                    c[0].clone()
                }
            })
            .collect();
    }
    let placed = areas.pop().unwrap();
    if &placed != tiling.target.area() {
        return Ok(VerificationReport {
            verdict: Verdict::AreaMismatch {
                placed,
                target: tiling.target.area().clone(),
            },
            piece_count,
        });
    }

    let mut buckets: HashMap<(Direction, QuadraticNumber), HashMap<QuadraticNumber, i64>> =
        HashMap::new();
    for p in &tiling.placements {
        let vs = tiling.placement_vertices(p);
        for i in 0..4 {
            add_edge(&mut buckets, &vs[i], &vs[(i + 1) % 4], 1)?;
        }
    }
    let tv = local_vertices(&tiling.target, false)
        .map(|(x, y)| Point::new(x, y));
    for i in 0..4 {
        add_edge(&mut buckets, &tv[i], &tv[(i + 1) % 4], -1)?;
    }

    // Sweep each line; report the least failure (by direction, line, then
    // position) so the verdict does not depend on hash iteration order.
    let mut failure: Option<Residue> = None;
    for ((dir, offset), events) in &buckets {
        // Breakpoints with zero net weight cannot change the running sum,
        // so only the others need ordering.
        let mut evs: Vec<(&QuadraticNumber, i64)> = events
            .iter()
            .filter(|(_, w)| **w != 0)
            .map(|(t, w)| (t, *w))
            .collect();
        evs.sort_by(|a, b| a.0.cmp(b.0));
        let mut bucket_failure: Option<Residue> = None;
        let mut running = 0i64;
        for (i, (t, w)) in evs.iter().enumerate() {
            running += w;
            if running != 0 && i + 1 < evs.len() {
                bucket_failure = Some(Residue {
                    direction: *dir,
                    offset: offset.clone(),
                    from: (*t).clone(),
                    to: evs[i + 1].0.clone(),
                    multiplicity: running,
                });
                break;
            }
        }
        debug_assert!(
            bucket_failure.is_some() || running == 0,
            "interval weights always telescope"
        );
        if let Some(res) = bucket_failure {
            let smaller = failure
                .as_ref()
                .map(|f| {
                    (res.direction, &res.offset, &res.from) < (f.direction, &f.offset, &f.from)
                })
                .unwrap_or(true);
            if smaller {
                failure = Some(res);
            }
        }
    }
    if let Some(res) = failure {
        return Ok(VerificationReport {
            verdict: Verdict::BoundaryResidue(res),
            piece_count,
        });
    }

    Ok(VerificationReport {
        verdict: Verdict::Pass,
        piece_count,
    })
}

/// Witness tree of full straight cuts, when one exists.
#[derive(Clone, Debug)]
pub enum CutTree {
    Piece(usize),
    Cut {
        direction: Direction,
        offset: QuadraticNumber,
        low: Box<CutTree>,
        high: Box<CutTree>,
    },
}

impl CutTree {
    /// Indented human-readable rendering of the cut hierarchy.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        self.describe_into(&mut s, 0);
        s
    }

    fn describe_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            CutTree::Piece(i) => out.push_str(&format!("{pad}piece {i}\n")),
            CutTree::Cut {
                direction,
                offset,
                low,
                high,
            } => {
                out.push_str(&format!(
                    "{pad}cut {} at offset {}\n",
                    direction.as_str(),
                    offset
                ));
                low.describe_into(out, depth + 1);
                high.describe_into(out, depth + 1);
            }
        }
    }
}

/// Decides whether the tiling splits recursively by full straight cuts
/// running along piece boundaries (with the three allowed directions).
///
/// Requires a verified tiling. The region stays convex through every split,
/// so a candidate line cuts fully iff no piece straddles it; candidates are
/// the supporting lines of piece edges, tried horizontal first, then +45°,
/// then −45°, each by ascending offset, which makes the witness
/// deterministic.
pub fn is_trivial(tiling: &Tiling) -> Result<(bool, Option<CutTree>), GeometryError> {
    let report = verify_exact(tiling)?;
    if !report.pass() {
        return Err(GeometryError::Precondition(format!(
            "cut search requires a verified tiling: {report}"
        )));
    }
    // Precompute each placement's functional range in all three directions.
    let mut ranges: Vec<[(QuadraticNumber, QuadraticNumber); 3]> = Vec::new();
    let mut edge_lines: Vec<BTreeSet<(Direction, QuadraticNumber)>> = Vec::new();
    for p in &tiling.placements {
        let vs = tiling.placement_vertices(p);
        let mut per_dir = Vec::new();
        for dir in [Direction::Horizontal, Direction::DiagUp, Direction::DiagDown] {
            let vals: Vec<QuadraticNumber> = vs.iter().map(|v| dir.offset_of(v)).collect();
            let min = vals.iter().min().unwrap().clone();
            let max = vals.iter().max().unwrap().clone();
            per_dir.push((min, max));
        }
        ranges.push([
            per_dir[0].clone(),
            per_dir[1].clone(),
            per_dir[2].clone(),
        ]);
        let mut lines = BTreeSet::new();
        for i in 0..4 {
            let a = &vs[i];
            let b = &vs[(i + 1) % 4];
            let dx = &b.x - &a.x;
            let dy = &b.y - &a.y;
            let dir = if dy.is_zero() {
                Direction::Horizontal
            } else if dx == dy {
                Direction::DiagUp
            } else {
                Direction::DiagDown
            };
            lines.insert((dir, dir.offset_of(a)));
        }
        edge_lines.push(lines);
    }
    let all: Vec<usize> = (0..tiling.placements.len()).collect();
    let tree = split_region(&all, &ranges, &edge_lines);
    Ok((tree.is_some(), tree))
}

fn dir_index(d: Direction) -> usize {
    match d {
        Direction::Horizontal => 0,
        Direction::DiagUp => 1,
        Direction::DiagDown => 2,
    }
}

fn split_region(
    region: &[usize],
    ranges: &[[(QuadraticNumber, QuadraticNumber); 3]],
    edge_lines: &[BTreeSet<(Direction, QuadraticNumber)>],
) -> Option<CutTree> {
    if region.len() == 1 {
        return Some(CutTree::Piece(region[0]));
    }
    // Candidate lines: supporting lines of the region's piece edges.
    let mut candidates: BTreeSet<(Direction, QuadraticNumber)> = BTreeSet::new();
    for &i in region {
        candidates.extend(edge_lines[i].iter().cloned());
    }
    'next_line: for (dir, offset) in candidates {
        let di = dir_index(dir);
        let mut low = Vec::new();
        let mut high = Vec::new();
        for &i in region {
            let (min, max) = &ranges[i][di];
            if max <= &offset {
                low.push(i);
            } else if min >= &offset {
                high.push(i);
            } else {
                continue 'next_line; // piece interior straddles the line
            }
        }
        if low.is_empty() || high.is_empty() {
            continue;
        }
        if let (Some(lt), Some(ht)) = (
            split_region(&low, ranges, edge_lines),
            split_region(&high, ranges, edge_lines),
        ) {
            return Some(CutTree::Cut {
                direction: dir,
                offset,
                low: Box::new(lt),
                high: Box::new(ht),
            });
        }
    }
    None
}

/// Rendering options for [`to_svg`].
#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Pixels per unit length.
    pub unit_px: f64,
    /// Margin in pixels around the drawing.
    pub margin_px: f64,
    /// Decimal places for coordinates.
    pub decimals: usize,
    /// Stroke width for piece outlines, in pixels.
    pub stroke_px: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            unit_px: 120.0,
            margin_px: 12.0,
            decimals: 3,
            stroke_px: 1.0,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#76b7b2", "#e15759", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

/// Renders the tiling as a standalone SVG document. Coordinates are rounded
/// floats for display only; verification never reads them back.
pub fn to_svg(tiling: &Tiling, options: &SvgOptions) -> String {
    let w = tiling.target.width().approx();
    let h = 1.0f64;
    let px = |v: f64| -> f64 { v * options.unit_px + options.margin_px };
    let fmt_c = |v: f64| format!("{:.*}", options.decimals, v);
    let width_px = px(w) + options.margin_px;
    let height_px = px(h) + options.margin_px;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt_c(width_px),
        fmt_c(height_px),
        fmt_c(width_px),
        fmt_c(height_px)
    ));
    out.push_str(&format!(
        "  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        fmt_c(width_px),
        fmt_c(height_px)
    ));
    for p in &tiling.placements {
        let vs = tiling.placement_vertices(p);
        let pts = vs
            .iter()
            .map(|v| {
                format!(
                    "{},{}",
                    fmt_c(px(v.x.approx())),
                    // Flip y: SVG grows downward.
                    fmt_c(px(h - v.y.approx()))
                )
            })
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"{}\"/>\n",
            pts,
            PALETTE[p.prototile % PALETTE.len()],
            options.stroke_px
        ));
    }
    let tv = local_vertices(&tiling.target, false);
    let pts = tv
        .iter()
        .map(|(x, y)| {
            format!(
                "{},{}",
                fmt_c(px(x.approx())),
                fmt_c(px(h - y.approx()))
            )
        })
        .collect::<Vec<_>>()
        .join(" ");
    out.push_str(&format!(
        "  <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>\n",
        pts,
        options.stroke_px * 2.5
    ));
    out.push_str("</svg>\n");
    out
}
