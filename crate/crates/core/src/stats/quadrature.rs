//! Adaptive Gauss–Kronrod (7/15-point) quadrature.
//!
//! Infinite limits are mapped onto a finite interval before panels are
//! refined, so the integrand only needs to decay, not have compact support.

use crate::error::{Error, Result};

/// Integration domain plus accuracy controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Lower limit, may be `-inf`.
    pub lower: f64,
    /// Upper limit, may be `+inf`.
    pub upper: f64,
    pub abs_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Quadrature {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            abs_tolerance: 1e-8,
            max_subdivisions: 500,
        }
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn with_tolerance(mut self, abs_tolerance: f64) -> Self {
        self.abs_tolerance = abs_tolerance;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }
}

// Kronrod abscissae for the 15-point rule; odd indices are the embedded
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = g(center - dx) + g(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `q.lower..q.upper`.
///
/// Returns [`Error::Quadrature`] when the error estimate is still above
/// `q.abs_tolerance` after `q.max_subdivisions` bisections, and
/// [`Error::Domain`] for malformed limits.
pub fn integrate<F: Fn(f64) -> f64>(f: F, q: &Quadrature) -> Result<f64> {
    let (lo, hi) = (q.lower, q.upper);
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("quadrature limits must not be NaN".into()));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        let flipped = Quadrature {
            lower: hi,
            upper: lo,
            ..*q
        };
        return integrate(f, &flipped).map(|v| -v);
    }
    if !(q.abs_tolerance > 0.0) {
        return Err(Error::Domain("abs_tolerance must be positive".into()));
    }

    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive(&f, lo, hi, q),
        (false, false) => {
            // x = s / (1 - s^2)
            let g = |s: f64| {
                let d = 1.0 - s * s;
                f(s / d) * (1.0 + s * s) / (d * d)
            };
            adaptive(&g, -1.0, 1.0, q)
        }
        (true, false) => {
            // x = lo + s / (1 - s)
            let g = |s: f64| {
                let d = 1.0 - s;
                f(lo + s / d) / (d * d)
            };
            adaptive(&g, 0.0, 1.0, q)
        }
        (false, true) => {
            // x = hi - (1 - s) / s
            let g = |s: f64| f(hi - (1.0 - s) / s) / (s * s);
            adaptive(&g, 0.0, 1.0, q)
        }
    }
}

fn adaptive<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, q: &Quadrature) -> Result<f64> {
    const INITIAL_PANELS: usize = 8;
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels: Vec<Panel> = (0..INITIAL_PANELS)
        .map(|k| {
            let left = a + width * k as f64;
            let right = if k + 1 == INITIAL_PANELS { b } else { left + width };
            kronrod15(g, left, right)
        })
        .collect();

    let mut subdivisions = 0;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        if error <= q.abs_tolerance {
            return Ok(total);
        }
        if subdivisions >= q.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error_estimate: error,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let Panel { a: left, b: right, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (left + right);
        panels.push(kronrod15(g, left, mid));
        panels.push(kronrod15(g, mid, right));
        subdivisions += 1;
    }
}
