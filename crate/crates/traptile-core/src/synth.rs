//! Constructive tiling algorithms.
//!
//! Everything here produces [`CompositionTree`]s: a tiling of a trapezoid
//! with a rational midline by a single rational prototile
//! ([`tile_rational`]), a tiling of `t(c)` by two conjugate-split quadratic
//! prototiles ([`tile_quadratic`]), the witness-finding subroutines those
//! algorithms need ([`lemma_h2_find`], [`lemma_h3_decompose`],
//! [`lemma_h1_tree`]), and the boundary sequence of stacked copies of one
//! prototile ([`proposition_last_sequence`]).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{pow2, ratio_i, FieldContext, QuadraticNumber, Rational};
use crate::figures::{g, g_inv, h, stack_once, CompositionTree, FigureError, HValue, StandardFigure};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction too large: {0}")]
    Budget(String),
    #[error(transparent)]
    Figure(#[from] FigureError),
}

/// Multiplicities up to this product are laid out as a single grid node;
/// larger factors go through the divide-and-conquer build whose copy count
/// follows the continued fraction of the factor.
const GRID_LIMIT: u64 = 64;

/// Hard cap on the number of pieces any constructor is allowed to emit.
const PIECE_BUDGET: u128 = 10_000_000;

fn leaf_trapezoid(param: QuadraticNumber) -> Result<CompositionTree, SynthError> {
    Ok(CompositionTree::leaf(StandardFigure::trapezoid(param)?))
}

/// Combines `items` with one associative case, keeping the tree balanced so
/// depth stays logarithmic in the copy count.
fn balanced_chain(case: u8, items: Vec<CompositionTree>) -> Result<CompositionTree, SynthError> {
    debug_assert!(!items.is_empty());
    let mut layer = items;
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(CompositionTree::combine(case, a, b)?),
                None => next.push(a),
            }
        }
        layer = next;
    }
    Ok(layer.pop().unwrap())
}

/// Sum of the continued-fraction quotients of `f` — the number of copies the
/// divide-and-conquer parallelogram build uses for that factor.
fn factor_weight(f: &Rational) -> BigInt {
    let mut a = f.numer().clone();
    let mut b = f.denom().clone();
    let mut total = BigInt::zero();
    while !b.is_zero() {
        let (q, r) = a.div_rem(&b);
        total += q;
        a = b;
        b = r;
    }
    total
}

/// Builds `p(param·f)` out of copies of the parallelogram tree `base`.
///
/// Integer parts become side-by-side chains (lengths add); reciprocal steps
/// become stacked chains (lengths add harmonically), mirroring how series and
/// parallel resistors compose. The copy count is the sum of the
/// continued-fraction quotients of `f`.
fn build_factor(base: &CompositionTree, f: &Rational) -> Result<CompositionTree, SynthError> {
    debug_assert!(f.is_positive());
    if f.is_one() {
        return Ok(base.clone());
    }
    let num = f.numer();
    let den = f.denom();
    if den.is_one() {
        let z = u64::try_from(num).map_err(|_| {
            SynthError::Budget(format!("factor {f} needs more copies than the budget allows"))
        })?;
        return balanced_chain(1, vec![base.clone(); z as usize]);
    }
    if num < den {
        // 1/f = q + r/num: q whole copies stacked with the reciprocal rest.
        let (q, r) = den.div_rem(num);
        let q = u64::try_from(&q).map_err(|_| {
            SynthError::Budget(format!("factor {f} needs more copies than the budget allows"))
        })?;
        let mut parts = vec![base.clone(); q as usize];
        if !r.is_zero() {
            parts.push(build_factor(base, &Rational::new(num.clone(), r))?);
        }
        balanced_chain(2, parts)
    } else {
        let (z, r) = num.div_rem(den);
        let z = u64::try_from(&z).unwrap();
        let mut parts = vec![base.clone(); z as usize];
        parts.push(build_factor(base, &Rational::new(r, den.clone()))?);
        balanced_chain(1, parts)
    }
}

/// Copies of the base parallelogram a scaling by `f` will use: grid cells
/// when a small grid (k·n ≤ 64) is no worse, else the continued-fraction
/// quotient sum. [`scale_parallelogram`] and the cost window in
/// [`tile_rational`] must agree on this number.
fn scale_copy_count(f: &Rational) -> BigInt {
    let weight = factor_weight(f);
    if let (Ok(k), Ok(n)) = (u64::try_from(f.numer()), u64::try_from(f.denom())) {
        let cells = k.saturating_mul(n);
        if cells <= GRID_LIMIT && BigInt::from(cells) <= weight {
            return BigInt::from(cells);
        }
    }
    weight
}

/// Scales a parallelogram tree by a positive rational factor: returns a tree
/// for `p(param·f)` whose leaves are copies of `base`'s leaves.
///
/// A factor `k/n` becomes a single grid node when the grid is small
/// (k·n ≤ 64) and no more expensive than the continued-fraction build;
/// otherwise the build keeps the copy count near the sum of the quotients
/// instead of k·n.
pub fn scale_parallelogram(
    base: &CompositionTree,
    f: &Rational,
) -> Result<CompositionTree, SynthError> {
    if !f.is_positive() {
        return Err(SynthError::Domain(format!(
            "scale factor must be positive, got {f}"
        )));
    }
    if base.figure().is_trapezoid() {
        return Err(SynthError::Figure(FigureError::KindMismatch(
            "scaling needs a parallelogram tree".into(),
        )));
    }
    if f.is_one() {
        return Ok(base.clone());
    }
    let weight = factor_weight(f);
    if let (Ok(ku), Ok(nu)) = (u64::try_from(f.numer()), u64::try_from(f.denom())) {
        let cells = ku.saturating_mul(nu);
        if cells <= GRID_LIMIT && BigInt::from(cells) <= weight {
            return Ok(CompositionTree::grid(ku, nu, base.clone())?);
        }
    }
    if weight > BigInt::from(PIECE_BUDGET) {
        return Err(SynthError::Budget(format!(
            "factor {f} would need about {weight} copies"
        )));
    }
    build_factor(base, f)
}

fn rational_stack_once(c: &Rational) -> Rational {
    (c * c + Rational::one()) / (c + c)
}

/// Smallest number of stacking levels whose parameter drops below `bound`,
/// together with that parameter and its (possibly single-leaf) tree.
///
/// Stacking squares the base ratio, so the parameter tends to 1 and the
/// search always terminates; level 0 (the prototile itself) is allowed.
pub fn find_small_rational(
    a: &QuadraticNumber,
    bound: &QuadraticNumber,
) -> Result<(QuadraticNumber, CompositionTree), SynthError> {
    let one = a.context().one();
    if (a - &one).sign() <= 0 {
        return Err(SynthError::Domain(format!("prototile midline {a} must exceed 1")));
    }
    if (bound - &one).sign() <= 0 {
        return Err(SynthError::Domain(format!("bound {bound} must exceed 1")));
    }
    let leaf = leaf_trapezoid(a.clone())?;
    if (a - bound).sign() < 0 {
        return Ok((a.clone(), leaf));
    }
    let mut c = a.clone();
    for level in 1..=256u32 {
        c = stack_once(&c);
        if (&c - bound).sign() < 0 {
            let tree = CompositionTree::pyramid(level, leaf)?;
            debug_assert_eq!(tree.figure().param(), &c);
            return Ok((c, tree));
        }
    }
    Err(SynthError::Budget(
        "stacking did not drop below the bound within 256 levels".into(),
    ))
}

/// Tiles `t(b)` by homothetic copies of `t(a)` for rational `a, b > 1`.
///
/// The construction stacks copies of `t(a)` until the parameter `c` drops
/// below `b`, fills the remaining width with a parallelogram `p(b−c)` made
/// of side-by-side pairs, and joins the two. Among a window of stacking
/// depths the cheapest piece count is chosen (deterministically), since the
/// parallelogram factor's complexity varies sharply with the depth.
pub fn tile_rational(
    ctx: &FieldContext,
    a: &Rational,
    b: &Rational,
) -> Result<CompositionTree, SynthError> {
    if *a <= Rational::one() {
        return Err(SynthError::Domain(format!("prototile midline {a} must exceed 1")));
    }
    if *b <= Rational::one() {
        return Err(SynthError::Domain(format!("target midline {b} must exceed 1")));
    }
    let leaf = leaf_trapezoid(ctx.from_rational(a.clone()))?;
    if a == b {
        return Ok(leaf);
    }
    // Walk the stack parameters down to the first one below b.
    let mut c = a.clone();
    let mut level = 0u32;
    while c >= *b {
        if c == *b {
            return Ok(CompositionTree::pyramid(level, leaf)?);
        }
        if level >= 128 {
            return Err(SynthError::Budget(
                "stacking did not drop below the target within 128 levels".into(),
            ));
        }
        c = rational_stack_once(&c);
        level += 1;
    }
    // Cost of depth L: 2^L stacked copies plus 2 leaves per parallelogram
    // copy. Deeper stacks square the parameter's denominator, which can make
    // the factor weight explode or collapse, so scan a window.
    let two_a = a + a;
    let mut best: Option<(BigInt, u32, Rational, Rational)> = None;
    let mut cl = c.clone();
    for l in level..level + 13 {
        // The stack alone already costs 2^l pieces, so once that passes the
        // best cost no deeper level can win — and the deeper parameters have
        // squared denominators that make even costing them expensive.
        if let Some((c0, ..)) = &best {
            if &(BigInt::one() << l) >= c0 {
                break;
            }
        }
        let mu = (b - &cl) / &two_a;
        let cost = (BigInt::one() << l) + scale_copy_count(&mu) * 2;
        if best.as_ref().map(|(c0, ..)| &cost < c0).unwrap_or(true) {
            best = Some((cost, l, cl.clone(), mu));
        }
        cl = rational_stack_once(&cl);
    }
    let (cost, l, _c_l, mu) = best.unwrap();
    if cost > BigInt::from(PIECE_BUDGET) {
        return Err(SynthError::Budget(format!(
            "cheapest construction found needs about {cost} pieces"
        )));
    }
    let pair = CompositionTree::combine(3, leaf.clone(), leaf.clone())?;
    let strip = scale_parallelogram(&pair, &mu)?;
    let cap = if l == 0 {
        leaf
    } else {
        CompositionTree::pyramid(l, leaf)?
    };
    let tree = CompositionTree::combine(4, strip, cap)?;
    debug_assert_eq!(tree.figure().param(), &ctx.from_rational(b.clone()));
    Ok(tree)
}

/// Smallest dyadic rational strictly inside the open interval `(lo, hi)`:
/// minimal power-of-two denominator first, then minimal numerator.
fn pick_dyadic_in(lo: &QuadraticNumber, hi: &QuadraticNumber) -> Rational {
    debug_assert!((hi - lo).sign() > 0);
    for k in 0u32..=8192 {
        let scaled = lo.mul_rat(&pow2(k));
        let j = scaled.floor_int() + 1;
        let cand = Rational::new(j, BigInt::one() << (k as usize));
        let cq = lo.context().from_rational(cand.clone());
        if (&cq - hi).sign() < 0 {
            debug_assert!((&cq - lo).sign() > 0);
            return cand;
        }
    }
    unreachable!("open interval contains a dyadic rational")
}

/// Finds `x` in the field with slope invariant `h(x) = q`, `x >` the bound,
/// and conjugate within `eps` of `q/√d`.
///
/// Writing `g(x) = s·(q+√d)` turns the slope constraint into a choice of a
/// rational `s`; as `s` approaches `1/(q+√d)` the value `x` grows without
/// bound while its conjugate approaches `q/√d` exactly, so a dyadic `s`
/// close enough to that endpoint satisfies everything. All comparisons are
/// exact field sign tests.
pub fn lemma_h2_find(
    ctx: &FieldContext,
    q: &Rational,
    n_bound: &QuadraticNumber,
    eps: &Rational,
) -> Result<QuadraticNumber, SynthError> {
    let two = ctx.from_int(2);
    if (n_bound - &two).sign() <= 0 {
        return Err(SynthError::Domain(format!(
            "lower bound must exceed 2, got {n_bound}"
        )));
    }
    if !eps.is_positive() {
        return Err(SynthError::Domain(format!("eps must be positive, got {eps}")));
    }
    // q + √d is never zero (√d is irrational), so the anchor is well-defined.
    let q_plus_sqrt = ctx.make(q.clone(), Rational::one());
    let t_star = q_plus_sqrt.inv().expect("q + sqrt(d) is nonzero");
    let g_n = g(n_bound)?;
    let shrunk = &g_n * &t_star;
    let (mut lo, mut hi) = if t_star.sign() > 0 {
        (shrunk, t_star.clone())
    } else {
        (t_star.clone(), shrunk)
    };
    // Conjugate target q/√d = (q/d)·√d.
    let target = ctx.make(Rational::zero(), q / ctx.d());
    let eps_q = ctx.from_rational(eps.clone());
    for _ in 0..20_000 {
        let s = pick_dyadic_in(&lo, &hi);
        // g(x) = s·(q+√d) lies strictly between g(N) and 1 by construction.
        let gx = ctx.make(q * &s, s.clone());
        let x = g_inv(&gx)?;
        debug_assert_eq!(h(&x)?, HValue::Finite(q.clone()));
        debug_assert!((&x - n_bound).sign() > 0);
        let dist = (&x.conjugate() - &target).abs();
        if (&dist - &eps_q).sign() < 0 {
            return Ok(x);
        }
        // Tighten toward the anchor endpoint and retry.
        if t_star.sign() > 0 {
            lo = ctx.from_rational(s);
        } else {
            hi = ctx.from_rational(s);
        }
    }
    unreachable!("conjugate converges to the target as s approaches the anchor")
}

/// Solves `x = m·a + n·b` for rational `m, n` by pairing the equation with
/// its conjugate. The determinant `a·b̄ − b·ā` is nonzero whenever the sign
/// preconditions of [`lemma_h3_decompose`] hold, but any nonzero determinant
/// works here. Both numerator and determinant flip sign under conjugation,
/// so the quotients are automatically rational.
pub fn decompose_in_basis(
    a: &QuadraticNumber,
    b: &QuadraticNumber,
    x: &QuadraticNumber,
) -> Result<(Rational, Rational), SynthError> {
    let det = &(a * &b.conjugate()) - &(b * &a.conjugate());
    if det.is_zero() {
        return Err(SynthError::Domain(
            "basis elements are rationally dependent".into(),
        ));
    }
    let m = (&(x * &b.conjugate()) - &(b * &x.conjugate()))
        .div(&det)
        .expect("nonzero determinant");
    let n = (&(a * &x.conjugate()) - &(x * &a.conjugate()))
        .div(&det)
        .expect("nonzero determinant");
    debug_assert!(m.is_rational() && n.is_rational());
    let m = m.as_rational().expect("antisymmetric quotient").clone();
    let n = n.as_rational().expect("antisymmetric quotient").clone();
    debug_assert_eq!(&(&a.mul_rat(&m) + &b.mul_rat(&n)), x);
    Ok((m, n))
}

/// Finds `x > bound` with slope invariant `q` that decomposes as
/// `x = m·a + n·b` with positive rational `m, n`.
///
/// Requires `a, b > 0` with conjugates of opposite signs (`ā > 0 > b̄`),
/// which makes the decomposition determinant nonzero and, once `x` is large
/// with conjugate pinned near `q/√d`, forces both coefficients positive.
pub fn lemma_h3_decompose(
    a: &QuadraticNumber,
    b: &QuadraticNumber,
    q: &Rational,
    bound: &QuadraticNumber,
) -> Result<(QuadraticNumber, Rational, Rational), SynthError> {
    let ctx = a.context();
    if a.sign() <= 0 || b.sign() <= 0 {
        return Err(SynthError::Precondition(format!(
            "basis must be positive, got {a} and {b}"
        )));
    }
    let abar = a.conjugate();
    let bbar = b.conjugate();
    if abar.sign() <= 0 {
        return Err(SynthError::Precondition(format!(
            "conjugate of {a} must be positive, got {abar}"
        )));
    }
    if bbar.sign() >= 0 {
        return Err(SynthError::Precondition(format!(
            "conjugate of {b} must be negative, got {bbar}"
        )));
    }
    // With eps = 1 the conjugate of x stays within |q/√d| + 1; pushing x
    // beyond (|q/√d|+1)·b/|b̄| and (|q/√d|+1)·a/ā then pins the signs of
    // both Cramer numerators.
    let conj_cap = ctx.make(Rational::one(), (q / ctx.d()).abs());
    let n_b = (&conj_cap * b).div(&bbar.abs()).expect("nonzero conjugate");
    let n_a = (&conj_cap * a).div(&abar).expect("nonzero conjugate");
    let mut big_n = bound.clone();
    for cand in [n_b, n_a, ctx.from_rational(ratio_i(5, 2))] {
        if (&cand - &big_n).sign() > 0 {
            big_n = cand;
        }
    }
    let x = lemma_h2_find(ctx, q, &big_n, &Rational::one())?;
    let (m, n) = decompose_in_basis(a, b, &x)?;
    debug_assert!(m.is_positive() && n.is_positive());
    Ok((x, m, n))
}

/// Tiles `t(y)` by copies of `t(x)` and `t(m)` when `x ≥ y` share the slope
/// invariant (`h(x) = h(y)`) and `m > 1` is rational.
///
/// The ratio `g(y)/g(x)` is rational exactly when the invariants agree;
/// mapping it back through `g` gives a rational midline `r`, `t(r)` is tiled
/// by `t(m)`, and stacking `t(x)` under that tiling multiplies the base
/// ratios into `g(y)`.
pub fn lemma_h1_tree(
    x: &QuadraticNumber,
    m: &Rational,
    y: &QuadraticNumber,
) -> Result<CompositionTree, SynthError> {
    let ctx = x.context();
    let one = ctx.one();
    if (y - &one).sign() <= 0 {
        return Err(SynthError::Precondition(format!("target {y} must exceed 1")));
    }
    let diff = x - y;
    if diff.sign() < 0 {
        return Err(SynthError::Precondition(format!(
            "need x >= y, got x = {x}, y = {y}"
        )));
    }
    if diff.is_zero() {
        return leaf_trapezoid(x.clone());
    }
    if *m <= Rational::one() {
        return Err(SynthError::Precondition(format!(
            "filler midline must exceed 1, got {m}"
        )));
    }
    if h(x)? != h(y)? {
        return Err(SynthError::Precondition(format!(
            "slope invariants differ: h({x}) = {}, h({y}) = {}",
            h(x)?,
            h(y)?
        )));
    }
    let rho = g(y)?.div(&g(x)?).expect("base ratios are nonzero");
    let r = g_inv(&rho)?;
    let r = r
        .as_rational()
        .ok_or_else(|| {
            SynthError::Precondition(format!(
                "base-ratio quotient of {y} and {x} is not rational"
            ))
        })?
        .clone();
    let filler = tile_rational(ctx, m, &r)?;
    Ok(CompositionTree::combine(5, leaf_trapezoid(x.clone())?, filler)?)
}

/// Assembles `t(x)` from prototiles `t(a)`, `t(b)` given the decomposition
/// `x = m·(2a) + n·(2b)` with `m > 1/2` or `n > 1/2`.
///
/// One prototile contributes itself; the rest of the width is a side-by-side
/// pair of scaled parallelograms built from rotated prototile pairs.
fn member_tree(
    a: &QuadraticNumber,
    b: &QuadraticNumber,
    x: &QuadraticNumber,
    m: &Rational,
    n: &Rational,
) -> Result<CompositionTree, SynthError> {
    let leaf_a = leaf_trapezoid(a.clone())?;
    let leaf_b = leaf_trapezoid(b.clone())?;
    let pair_a = CompositionTree::combine(3, leaf_a.clone(), leaf_a.clone())?;
    let pair_b = CompositionTree::combine(3, leaf_b.clone(), leaf_b.clone())?;
    let half = ratio_i(1, 2);
    let (strip, cap) = if *m > half {
        let strip = CompositionTree::combine(
            1,
            scale_parallelogram(&pair_a, &(m - &half))?,
            scale_parallelogram(&pair_b, n)?,
        )?;
        (strip, leaf_a)
    } else if *n > half {
        let strip = CompositionTree::combine(
            1,
            scale_parallelogram(&pair_a, m)?,
            scale_parallelogram(&pair_b, &(n - &half))?,
        )?;
        (strip, leaf_b)
    } else {
        return Err(SynthError::Precondition(format!(
            "decomposition {m}, {n} leaves no whole prototile (x = {x} too small)"
        )));
    };
    let tree = CompositionTree::combine(4, strip, cap)?;
    debug_assert_eq!(tree.figure().param(), x);
    Ok(tree)
}

/// Tiles `t(c)` by copies of `t(a)` and `t(b)`, where `a, b > 1` have
/// conjugates of opposite signs (`ā > 0 > b̄`) and `c > 1` lies in the same
/// field.
///
/// The pipeline: find `x₁ = m·2a + n·2b` with slope invariant 0, assemble
/// `t(x₁)`, stack it on itself to reach a rational midline `y₀`
/// (the base ratio of `x₁` is a pure √d multiple, so its square is
/// rational); a rational target is then tiled by `t(y₀)` directly, while an
/// irrational one is reached by one more stack through `x₂` matching the
/// target's slope invariant.
pub fn tile_quadratic(
    a: &QuadraticNumber,
    b: &QuadraticNumber,
    c: &QuadraticNumber,
) -> Result<CompositionTree, SynthError> {
    let ctx = a.context();
    let one = ctx.one();
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if (v - &one).sign() <= 0 {
            return Err(SynthError::Precondition(format!(
                "{name} must exceed 1, got {v}"
            )));
        }
    }
    if a.conjugate().sign() <= 0 {
        return Err(SynthError::Precondition(format!(
            "conjugate of a must be positive, got {}",
            a.conjugate()
        )));
    }
    if b.conjugate().sign() >= 0 {
        return Err(SynthError::Precondition(format!(
            "conjugate of b must be negative, got {}",
            b.conjugate()
        )));
    }
    if c == a {
        return leaf_trapezoid(a.clone());
    }
    if c == b {
        return leaf_trapezoid(b.clone());
    }
    let two_a = a + a;
    let two_b = b + b;
    let a_plus_b = a + b;
    let (x1, m1, n1) = lemma_h3_decompose(&two_a, &two_b, &Rational::zero(), &a_plus_b)?;
    let x1_tree = member_tree(a, b, &x1, &m1, &n1)?;
    // Slope invariant 0 means g(x₁) is a pure √d multiple; its square is
    // rational, so stacking t(x₁) on itself lands on a rational midline.
    let y0_sq = g(&x1)?.square();
    debug_assert!(y0_sq.is_rational());
    let y0 = g_inv(&y0_sq)?
        .as_rational()
        .expect("square of a pure irrational base ratio is rational")
        .clone();
    let y0_tree = CompositionTree::combine(5, x1_tree.clone(), x1_tree)?;
    let y0_fig = y0_tree.figure().clone();
    debug_assert_eq!(y0_fig.param(), &ctx.from_rational(y0.clone()));
    if let Some(c_rat) = c.as_rational() {
        if *c_rat == y0 {
            return Ok(y0_tree);
        }
        let skeleton = tile_rational(ctx, &y0, c_rat)?;
        return Ok(skeleton.substitute_leaf(&y0_fig, &y0_tree)?);
    }
    // Irrational target: find x₂ > c with the same slope invariant as c,
    // then one stacking step closes the gap with a rational filler.
    let q_c = match h(c)? {
        HValue::Finite(q) => q,
        HValue::Infinity => unreachable!("irrational targets have finite slope invariant"),
    };
    let bound = if (c - &a_plus_b).sign() > 0 {
        c.clone()
    } else {
        a_plus_b
    };
    let (x2, m2, n2) = lemma_h3_decompose(&two_a, &two_b, &q_c, &bound)?;
    let x2_tree = member_tree(a, b, &x2, &m2, &n2)?;
    let skeleton = lemma_h1_tree(&x2, &y0, c)?;
    let x2_fig = StandardFigure::trapezoid(x2.clone())?;
    let result = skeleton
        .substitute_leaf(&x2_fig, &x2_tree)?
        .substitute_leaf(&y0_fig, &y0_tree)?;
    debug_assert_eq!(result.figure().param(), c);
    Ok(result)
}

/// The boundary sequence of one prototile `t(a)` with `1 < ā < a`:
/// `b₁ = a` and each `b_{i+1}` stacks a fresh `t(a)` under `t(b_i)`, so
/// `g(b_i) = g(a)^i` and the midlines strictly decrease.
pub fn proposition_last_sequence(
    a: &QuadraticNumber,
    count: u32,
) -> Result<Vec<(QuadraticNumber, CompositionTree)>, SynthError> {
    let ctx = a.context();
    let one = ctx.one();
    let abar = a.conjugate();
    if (&abar - &one).sign() <= 0 || (a - &abar).sign() <= 0 {
        return Err(SynthError::Precondition(format!(
            "need 1 < conjugate < value, got value {a} with conjugate {abar}"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let leaf = leaf_trapezoid(a.clone())?;
    let mut out = Vec::with_capacity(count as usize);
    let mut tree = leaf.clone();
    out.push((a.clone(), tree.clone()));
    for _ in 1..count {
        tree = CompositionTree::combine(5, leaf.clone(), tree)?;
        let b_i = tree.figure().param().clone();
        debug_assert!((&b_i - &out.last().unwrap().0).sign() < 0);
        out.push((b_i, tree.clone()));
    }
    Ok(out)
}
