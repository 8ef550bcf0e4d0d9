//! Text output for results.

use std::fmt::Write as _;

use crate::appapham::ApproxDistanceMatrix;
use crate::approxmm::{ApproxProductMatrix, Branch};
use crate::clustering::ClusteringResult;
use crate::reduction::CountMatrix;
use crate::tree::SpanningTree;
use crate::Real;

/// `x` with `digits` significant digits, like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig<T: Real>(x: T) -> String {
    format_sig(x.to_f64().unwrap(), 6)
}

/// Header `p r`, then one line of integers per row.
pub fn count_matrix(m: &CountMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Header `p r delta`; saturated entries carry a trailing `!`.
pub fn approx_distances<T: Real>(w: &ApproxDistanceMatrix<T>) -> String {
    let mut out = format!("{} {} {}\n", w.rows(), w.cols(), sig(w.delta()));
    for i in 0..w.rows() {
        let line: Vec<String> = (0..w.cols())
            .map(|j| {
                let mut v = sig(w.get(i, j));
                if w.is_saturated(i, j) {
                    v.push('!');
                }
                v
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Header `p r epsilon`; entries from the complement estimator carry a
/// trailing `c`.
pub fn approx_product<T: Real>(c: &ApproxProductMatrix<T>) -> String {
    let mut out = format!("{} {} {}\n", c.rows(), c.cols(), sig(c.epsilon()));
    for i in 0..c.rows() {
        let line: Vec<String> = (0..c.cols())
            .map(|j| {
                let mut v = sig(c.get(i, j));
                if c.branch(i, j) == Branch::Complement {
                    v.push('c');
                }
                v
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Header `n edges cost`, then `u v weight [estimate]` per edge.
pub fn spanning_tree<T: Real>(t: &SpanningTree<T>) -> String {
    let mut out = format!("{} {} {}\n", t.nodes, t.edges.len(), t.cost());
    for e in &t.edges {
        let _ = write!(out, "{} {} {}", e.u, e.v, e.weight);
        if let Some(w) = e.estimate {
            let _ = write!(out, " {}", sig(w));
        }
        out.push('\n');
    }
    out
}

/// Header `n`, then the neighbour of every point on one line.
pub fn neighbors(nn: &[usize]) -> String {
    let line: Vec<String> = nn.iter().map(usize::to_string).collect();
    format!("{}\n{}\n", nn.len(), line.join(" "))
}

/// `ell epsilon radius_w radius_exact [diameter_exact]`, then the centers,
/// then the center of every point.
pub fn clustering<T: Real>(r: &ClusteringResult<T>) -> String {
    let eps = r.epsilon.map_or_else(|| "0".to_string(), sig);
    let mut out = format!("{} {} {} {}", r.ell, eps, sig(r.radius_w), r.radius_exact);
    if let Some(d) = r.diameter_exact {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    let centers: Vec<String> = r.centers.iter().map(usize::to_string).collect();
    let assign: Vec<String> = r.assignment.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "{}", centers.join(" "));
    let _ = writeln!(out, "{}", assign.join(" "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.25, "0.25"),
            (1.25f64.powi(3), "1.95312"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (999999.5, "1e+06"),
            (1.0 / 3.0, "0.333333"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig(x, 6), want, "{x}");
        }
    }

    #[test]
    fn counts_layout() {
        let m = CountMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as u32);
        assert_eq!(count_matrix(&m), "2 3\n0 1 2\n3 4 5\n");
    }

    #[test]
    fn neighbors_layout() {
        assert_eq!(neighbors(&[1, 0, 1]), "3\n1 0 1\n");
    }
}
