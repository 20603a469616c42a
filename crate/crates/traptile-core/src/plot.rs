//! Pictures of the condition region in the (conjugate, value) plane.
//!
//! A midline parameter y with conjugate ȳ plots as the point (ȳ, y). The
//! necessary conditions carve this half-plane into regions bounded by the
//! diagonal ȳ = y, the ray y·(ā/a) = ȳ, and the transcendental curve
//! y = F_c(ȳ) with c = ln G(a)/ln G(ā); the level curves of the slope
//! invariant h — the rational-over-irrational ratio of G — fill the plane
//! with hyperbola branches through (1, 1). Everything here draws with plain
//! floating point: the exact layer decides, this layer only illustrates.

use std::fmt::Write as _;

use crate::analysis::AnalysisError;
use crate::field::{approx_f64, QuadraticNumber, Rational};
use crate::figures::g_inv;
use crate::figures::g;

/// A level of the slope invariant: `h = ∞` is the diagonal (purely rational
/// G), finite `h` gives one hyperbola per value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Finite(Rational),
    Infinite,
}

#[derive(Clone, Debug)]
pub struct PlotOptions {
    pub size_px: f64,
    pub margin_px: f64,
    pub samples: u32,
    /// How many boundary-sequence points b_n to mark.
    pub sequence_points: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            size_px: 720.0,
            margin_px: 48.0,
            samples: 384,
            sequence_points: 3,
        }
    }
}

/// G as a plain float, for sampling curves.
fn gf(x: f64) -> f64 {
    (x - 1.0) / (x + 1.0)
}

/// Inverse of [`gf`] where defined.
fn gf_inv(v: f64) -> Option<f64> {
    if (1.0 - v).abs() < 1e-12 {
        return None;
    }
    Some((1.0 + v) / (1.0 - v))
}

/// The y-coordinate of the curve `G(y) = k·G(ȳ)` over `x = ȳ`, or None
/// where the curve leaves the plane.
fn level_y(k: f64, x: f64) -> Option<f64> {
    let v = k * gf(x);
    let y = gf_inv(v)?;
    y.is_finite().then_some(y)
}

/// The transcendental boundary `y = F_c(ȳ)`.
fn curve_y(c: f64, x: f64) -> Option<f64> {
    if x <= 1.0 {
        return None;
    }
    let t = gf(x).powf(c);
    let y = (1.0 + t) / (1.0 - t);
    y.is_finite().then_some(y)
}

/// Renders the half-plane picture for prototile midline `a`: requested
/// h-level hyperbolas, the two rays, the F_c boundary curve, the marked
/// prototile point (ā, a) and the first boundary-sequence points (b̄_n, b_n).
pub fn plot_plane(
    a: &QuadraticNumber,
    levels: &[Level],
    options: &PlotOptions,
) -> Result<String, AnalysisError> {
    let ctx = a.context();
    let one = ctx.one();
    let abar = a.conjugate();
    if !(abar > one && *a > abar) {
        return Err(AnalysisError::Precondition(format!(
            "need 1 < conj(a) < a for the boundary curve, got conj(a) = {}",
            abar
        )));
    }

    let af = a.approx();
    let abf = abar.approx();
    let sd = approx_f64(ctx.d()).sqrt();
    let c = gf(af).ln() / gf(abf).ln();

    // Boundary-sequence points, exact first, floats only for plotting.
    let mut marks: Vec<(f64, f64, String)> = vec![(abf, af, "a".to_string())];
    let ga = g(a).expect("a exceeds 1");
    let mut gn = ga.clone();
    for n in 1..=options.sequence_points {
        if n > 1 {
            gn = &gn * &ga;
        }
        let bn = g_inv(&gn).expect("powers of G(a) stay inside (0, 1)");
        marks.push((bn.conjugate().approx(), bn.approx(), format!("b{n}")));
    }

    // Viewport: the region of interest sits just above (1, 1).
    let x0 = 0.92;
    let x1 = (abf * 1.45).max(2.2);
    let y0 = 0.8;
    let y1 = af * 1.28;
    let inner = options.size_px - 2.0 * options.margin_px;
    let px = |x: f64| options.margin_px + (x - x0) / (x1 - x0) * inner;
    let py = |y: f64| options.size_px - options.margin_px - (y - y0) / (y1 - y0) * inner;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">",
        s = options.size_px
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>",
        s = options.size_px
    );

    // Frame and the two unit guide lines bounding the meaningful quadrant.
    let _ = writeln!(
        svg,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        options.margin_px, options.margin_px, inner, inner
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
        px(1.0), py(y0), px(1.0), py(y1)
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
        px(x0), py(1.0), px(x1), py(1.0)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#333\">conj(y)</text>",
        options.size_px - options.margin_px - 52.0,
        options.size_px - options.margin_px + 28.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#333\">y</text>",
        options.margin_px - 30.0,
        options.margin_px + 12.0
    );

    // A polyline per connected visible stretch of a sampled curve.
    let draw_curve = |svg: &mut String, f: &dyn Fn(f64) -> Option<f64>, color: &str, dash: &str, label: &str| {
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for i in 0..=options.samples {
            let x = x0 + (x1 - x0) * (i as f64) / (options.samples as f64);
            let keep = match f(x) {
                Some(y) if (y0..=y1).contains(&y) && x >= x0 => Some((x, y)),
                _ => None,
            };
            match keep {
                Some(p) => runs.last_mut().expect("seeded with one run").push(p),
                None => {
                    if !runs.last().expect("seeded").is_empty() {
                        runs.push(Vec::new());
                    }
                }
            }
        }
        let mut label_at: Option<(f64, f64)> = None;
        for run in runs.iter().filter(|r| r.len() > 1) {
            let pts: Vec<String> = run
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
                .collect();
            let _ = writeln!(
                svg,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\"{}/>",
                pts.join(" "),
                color,
                if dash.is_empty() {
                    String::new()
                } else {
                    format!(" stroke-dasharray=\"{dash}\"")
                }
            );
            label_at = label_at.or(run.get(run.len() * 3 / 4).copied());
        }
        if let (Some((lx, ly)), false) = (label_at, label.is_empty()) {
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{}\">{}</text>",
                px(lx) + 4.0,
                py(ly) - 4.0,
                color,
                label
            );
        }
    };

    for level in levels {
        match level {
            Level::Infinite => {
                draw_curve(&mut svg, &|x| Some(x), "#9467bd", "6 3", "h=inf");
            }
            Level::Finite(h) => {
                let hf = approx_f64(h);
                let k = (hf + sd) / (hf - sd);
                let label = format!("h={hf}");
                draw_curve(&mut svg, &move |x| level_y(k, x), "#1f77b4", "", &label);
            }
        }
    }

    // Rays from the origin: the diagonal and the prototile direction.
    draw_curve(&mut svg, &|x| Some(x), "#2ca02c", "", "conj(y)=y");
    let slope = af / abf;
    draw_curve(&mut svg, &move |x| Some(slope * x), "#d62728", "", "ray a");
    // The transcendental boundary.
    draw_curve(&mut svg, &move |x| curve_y(c, x), "#ff7f0e", "", "F_c");

    for (mx, my, label) in &marks {
        if (x0..=x1).contains(mx) && (y0..=y1).contains(my) {
            let _ = writeln!(
                svg,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"black\"/>",
                px(*mx),
                py(*my)
            );
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"black\">{}</text>",
                px(*mx) + 5.0,
                py(*my) - 5.0,
                label
            );
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ratio_i, FieldContext};

    fn ctx2() -> FieldContext {
        FieldContext::new(ratio_i(2, 1)).unwrap()
    }

    fn proto_a(ctx: &FieldContext) -> QuadraticNumber {
        ctx.make(ratio_i(3, 1), ratio_i(1, 1))
    }

    #[test]
    fn empty_levels_still_draw_axes_rays_and_curve() {
        let ctx = ctx2();
        let svg = plot_plane(&proto_a(&ctx), &[], &PlotOptions::default()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("conj(y)=y"));
        assert!(svg.contains("ray a"));
        assert!(svg.contains("F_c"));
        assert!(svg.contains(">a</text>"));
        assert!(!svg.contains(">h="));
    }

    #[test]
    fn level_set_figure_has_all_requested_curves() {
        let ctx = ctx2();
        let levels = [
            Level::Finite(ratio_i(-3, 1)),
            Level::Finite(ratio_i(0, 1)),
            Level::Finite(ratio_i(3, 1)),
            Level::Infinite,
        ];
        let svg = plot_plane(&proto_a(&ctx), &levels, &PlotOptions::default()).unwrap();
        for needle in [">h=-3<", ">h=0<", ">h=3<", ">h=inf<"] {
            assert!(svg.contains(needle), "missing {needle}");
        }
        // Three sequence points plus the prototile point.
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn zero_level_is_the_reciprocal_hyperbola() {
        // h = 0 forces G(y) = -G(conj(y)), which simplifies to y·conj(y) = 1.
        let sd = 2.0f64.sqrt();
        let k = (0.0 + sd) / (0.0 - sd);
        for x in [1.2, 1.7, 2.3] {
            let y = level_y(k, x).unwrap();
            assert!((x * y - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sequence_points_sit_on_the_boundary_curve() {
        let ctx = ctx2();
        let a = proto_a(&ctx);
        let c = gf(a.approx()).ln() / gf(a.conjugate().approx()).ln();
        let ga = g(&a).unwrap();
        let mut gn = ga.clone();
        for _ in 1..=3 {
            let bn = g_inv(&gn).unwrap();
            let on_curve = curve_y(c, bn.conjugate().approx()).unwrap();
            // Well under one pixel at any sane plot size.
            assert!(
                (on_curve - bn.approx()).abs() < 1e-9,
                "expected {} got {on_curve}",
                bn.approx()
            );
            gn = &gn * &ga;
        }
    }

    #[test]
    fn rejects_prototiles_without_the_conjugate_ordering() {
        let ctx = ctx2();
        let bad = ctx.make(ratio_i(3, 1), ratio_i(2, 1));
        assert!(plot_plane(&bad, &[], &PlotOptions::default()).is_err());
    }
}
