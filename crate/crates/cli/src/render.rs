//! Plain-text and SVG rendering. All numbers are printed exactly: lattice
//! data as integers, everything else as reduced fractions.

use num_bigint::BigInt;

use torik_core::polytope::{FacetIneq, LatticePolytope};
use torik_core::stability::InvariantReport;

/// Two-column aligned key/value block.
pub fn kv_table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn format_point(p: &[BigInt]) -> String {
    let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", coords.join(","))
}

/// A facet inequality as `<normal, u> >= rhs`.
pub fn format_facet(f: &FacetIneq) -> String {
    format!("<{},u> >= {}", format_point(&f.normal), f.rhs)
}

pub fn invariant_rows(report: &InvariantReport) -> Vec<(&'static str, String)> {
    vec![
        ("direction", format!("{:?}", report.direction).to_lowercase()),
        ("volume", report.vol_p.to_string()),
        ("boundary volume", report.vol_boundary.to_string()),
        ("interior integral", report.integral_p.to_string()),
        ("boundary integral", report.integral_boundary.to_string()),
        ("DF", report.df.to_string()),
        ("Ding", report.ding.to_string()),
        (
            "radically affine",
            if report.radically_affine { "yes" } else { "no" }.to_string(),
        ),
    ]
}

/// Stability verdict from the sign of DF.
pub fn verdict(df: &torik_core::Rational) -> &'static str {
    if df.is_positive() {
        "DF > 0: does not destabilize"
    } else if df.is_zero() {
        "DF = 0: semistable threshold"
    } else {
        "DF < 0: destabilizes"
    }
}

/// Lattice sketch of a two-dimensional polytope: the polygon, the lattice
/// points of its bounding box, and the origin. All coordinates are
/// integer multiples of the cell size, so the file contains no decimals.
pub fn polygon_svg(p: &LatticePolytope) -> String {
    assert_eq!(p.dim(), 2, "sketches are two-dimensional");
    const CELL: i64 = 40;
    const DOT: i64 = 3;
    const MARK: i64 = 6;
    let coords: Vec<(i64, i64)> = p
        .vertices()
        .iter()
        .map(|v| {
            let x = i64::try_from(&v[0]).expect("sketch coordinates fit i64");
            let y = i64::try_from(&v[1]).expect("sketch coordinates fit i64");
            (x, y)
        })
        .collect();
    let min_x = coords.iter().map(|c| c.0).min().unwrap_or(0) - 1;
    let max_x = coords.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let min_y = coords.iter().map(|c| c.1).min().unwrap_or(0) - 1;
    let max_y = coords.iter().map(|c| c.1).max().unwrap_or(0) + 1;
    // SVG y grows downward; flip the lattice y
    let px = |x: i64| (x - min_x) * CELL;
    let py = |y: i64| (max_y - y) * CELL;
    let width = (max_x - min_x) * CELL;
    let height = (max_y - min_y) * CELL;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         width=\"{width}\" height=\"{height}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    // lattice grid dots
    for x in min_x..=max_x {
        for y in min_y..=max_y {
            svg.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{DOT}\" fill=\"#bbbbbb\"/>\n",
                px(x),
                py(y)
            ));
        }
    }
    // the polygon, vertices in counterclockwise boundary order around the
    // interior point 0, via exact cross-product comparisons
    let mut ordered = coords.clone();
    ordered.sort_by(|&a, &b| {
        half_plane(a).cmp(&half_plane(b)).then_with(|| {
            let cross = a.0 * b.1 - a.1 * b.0;
            cross.cmp(&0).reverse()
        })
    });
    let path: Vec<String> = ordered
        .iter()
        .map(|&(x, y)| format!("{},{}", px(x), py(y)))
        .collect();
    svg.push_str(&format!(
        "  <polygon points=\"{}\" fill=\"#cfe4f0\" \
         stroke=\"#3182bd\" stroke-width=\"2\"/>\n",
        path.join(" ")
    ));
    // vertices
    for &(x, y) in &coords {
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{MARK}\" fill=\"#08519c\"/>\n",
            px(x),
            py(y)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"#08519c\">({x},{y})</text>\n",
            px(x) + MARK + 2,
            py(y) - MARK
        ));
    }
    // the origin
    svg.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{MARK}\" fill=\"none\" \
         stroke=\"#d62728\" stroke-width=\"2\"/>\n",
        px(0),
        py(0)
    ));
    svg.push_str("</svg>\n");
    svg
}

/// 0 for the open upper half-plane plus the positive x-axis, 1 for the
/// rest: vertices of a polygon with the origin in its interior never
/// share a ray, so this plus a cross-product tiebreak is a total
/// counterclockwise order.
fn half_plane(p: (i64, i64)) -> u8 {
    if p.1 > 0 || (p.1 == 0 && p.0 > 0) {
        0
    } else {
        1
    }
}
