//! Perimeters of the classical candidate minimizers at a given volume.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub name: &'static str,
    pub perimeter: f64,
    /// Radius of the round candidates; `None` for the strip.
    pub radius: Option<f64>,
    /// False when the candidate does not fit in the torus (radius ≥ 1/2).
    pub valid: bool,
    pub minimal: bool,
}

fn round(name: &'static str, perimeter: f64, radius: f64) -> Candidate {
    Candidate {
        name,
        perimeter,
        radius: Some(radius),
        valid: radius < 0.5,
        minimal: false,
    }
}

/// Candidates at volume `a = (m+1)/2`, using the smaller of `a` and `1-a`
/// (complements have the same perimeter). The least perimeter among the valid
/// candidates is flagged.
pub fn isoperimetric_compare(m: f64, dim: usize) -> Result<Vec<Candidate>> {
    if !(m > -1.0 && m < 1.0) {
        return Err(Error::InvalidParameter(format!("m = {m} must lie in (-1, 1)")));
    }
    let v = (0.5 * (m + 1.0)).min(0.5 * (1.0 - m));
    let strip = Candidate {
        name: "strip",
        perimeter: 2.0,
        radius: None,
        valid: true,
        minimal: false,
    };
    let r2 = (v / PI).sqrt();
    let mut out = match dim {
        2 => vec![strip, round("disc", 2.0 * (PI * v).sqrt(), r2)],
        3 => {
            let rb = (3.0 * v / (4.0 * PI)).cbrt();
            vec![
                strip,
                round("cylinder", 2.0 * (PI * v).sqrt(), r2),
                round("ball", (36.0 * PI).cbrt() * v.powf(2.0 / 3.0), rb),
            ]
        }
        _ => return Err(Error::InvalidParameter(format!("dim = {dim} must be 2 or 3"))),
    };
    let best = out
        .iter()
        .enumerate()
        .filter(|(_, c)| c.valid)
        .min_by(|a, b| a.1.perimeter.total_cmp(&b.1.perimeter))
        .map(|(i, _)| i);
    if let Some(i) = best {
        out[i].minimal = true;
    }
    Ok(out)
}

/// `|m|` at which the strip and the disc in `T²` have equal perimeter, by
/// bisection on the perimeter difference.
pub fn strip_disc_crossing(tol: f64) -> f64 {
    let diff = |mm: f64| {
        let c = isoperimetric_compare(mm, 2).expect("m in range");
        c[1].perimeter - c[0].perimeter
    };
    // disc is shorter near |m| = 1, longer at m = 0
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if diff(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
