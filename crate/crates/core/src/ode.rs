//! Adaptive Dormand-Prince 5(4) integration of scalar first-order ODEs with
//! the 4th-order continuous extension (dense output).
//!
//! Used to solve the one-dimensional Riccati problems `y' = -y^2 - v(x)`
//! that arise from separable potentials.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("solution exceeded {cap:e} in magnitude near x = {location}")]
    BlowUp { location: f64, cap: f64 },
    #[error("step size underflow at x = {location}")]
    StepSizeUnderflow { location: f64 },
    #[error("more than {max_steps} steps needed")]
    TooManySteps { max_steps: usize },
    #[error("right-hand side failed at x = {location}: {message}")]
    Rhs { location: f64, message: String },
    #[error("x = {x} is outside the integrated interval [{a}, {b}]")]
    OutOfRange { x: f64, a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// `|y|` above this counts as blow-up.
    pub blowup_cap: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, max_steps: 1_000_000, blowup_cap: 1e8 }
    }
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, Copy)]
struct Segment {
    x0: f64,
    h: f64,
    cont: [f64; 5],
}

impl Segment {
    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        let c = &self.cont;
        c[0] + t * (c[1] + t1 * (c[2] + t * (c[3] + t1 * c[4])))
    }

    fn x1(&self) -> f64 {
        self.x0 + self.h
    }
}

/// Dense solution on `[a, b]`, integrated outward from an anchor inside.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    anchor: f64,
    y_anchor: f64,
    a: f64,
    b: f64,
    /// Steps toward `b`, increasing `x`.
    forward: Vec<Segment>,
    /// Steps toward `a`, decreasing `x`.
    backward: Vec<Segment>,
}

impl DenseSolution {
    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn steps(&self) -> usize {
        self.forward.len() + self.backward.len()
    }

    pub fn eval(&self, x: f64) -> Result<f64, OdeError> {
        if !(x >= self.a && x <= self.b) {
            return Err(OdeError::OutOfRange { x, a: self.a, b: self.b });
        }
        if x == self.anchor {
            return Ok(self.y_anchor);
        }
        let segs = if x > self.anchor { &self.forward } else { &self.backward };
        // Segments are ordered by distance from the anchor.
        let dist = (x - self.anchor).abs();
        let idx = segs.partition_point(|s| (s.x1() - self.anchor).abs() < dist);
        let seg = segs.get(idx).or_else(|| segs.last()).expect("nonempty segment list");
        Ok(seg.eval(x))
    }
}

/// Integrates `y' = rhs(x, y)`, `y(anchor) = y0` over `[a, b]`.
pub fn solve_dense<F>(
    rhs: F,
    anchor: f64,
    y0: f64,
    a: f64,
    b: f64,
    opts: &OdeOptions,
) -> Result<DenseSolution, OdeError>
where
    F: Fn(f64, f64) -> Result<f64, String>,
{
    assert!(a <= anchor && anchor <= b, "anchor {anchor} outside [{a}, {b}]");
    let forward = if b > anchor { integrate(&rhs, anchor, y0, b, opts)? } else { Vec::new() };
    let backward = if a < anchor { integrate(&rhs, anchor, y0, a, opts)? } else { Vec::new() };
    Ok(DenseSolution { anchor, y_anchor: y0, a, b, forward, backward })
}

fn integrate<F>(rhs: &F, x0: f64, y0: f64, x_end: f64, opts: &OdeOptions) -> Result<Vec<Segment>, OdeError>
where
    F: Fn(f64, f64) -> Result<f64, String>,
{
    let f = |x: f64, y: f64| rhs(x, y).map_err(|message| OdeError::Rhs { location: x, message });
    let dir = (x_end - x0).signum();
    let span = (x_end - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y)?;
    let mut h = dir * (span * 1e-3).min(1e-2);
    let mut segs = Vec::new();
    let mut steps = 0usize;

    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::TooManySteps { max_steps: opts.max_steps });
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        if h.abs() < 1e-14 * x.abs().max(1.0) {
            return Err(OdeError::StepSizeUnderflow { location: x });
        }

        let k2 = f(x + C2 * h, y + h * A21 * k1)?;
        let k3 = f(x + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
        let k4 = f(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
        let k5 = f(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
        let k6 = f(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
        let y1 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = f(x + h, y1)?;

        let err_est = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = opts.atol + opts.rtol * y.abs().max(y1.abs());
        let err = (err_est / scale).abs();

        if !y1.is_finite() || y1.abs() > opts.blowup_cap {
            // Retry smaller unless the step is already tiny: a genuine
            // blow-up keeps failing as h shrinks.
            if h.abs() > 1e-10 * span.max(1.0) && y1.is_finite() && err > 1.0 {
                h *= 0.2;
                continue;
            }
            return Err(OdeError::BlowUp { location: x + h, cap: opts.blowup_cap });
        }

        if err <= 1.0 {
            let ydiff = y1 - y;
            let bspl = h * k1 - ydiff;
            let cont = [
                y,
                ydiff,
                bspl,
                ydiff - h * k7 - bspl,
                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
            ];
            segs.push(Segment { x0: x, h, cont });
            x += h;
            y = y1;
            k1 = k7;
            if y.abs() > opts.blowup_cap {
                return Err(OdeError::BlowUp { location: x, cap: opts.blowup_cap });
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(segs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_solves_constant_potential_riccati() {
        // y' = 1 - y^2, y(0) = 0
        let sol = solve_dense(|_, y| Ok(1.0 - y * y), 0.0, 0.0, -2.0, 3.0, &OdeOptions::default()).unwrap();
        for i in 0..=500 {
            let x = -2.0 + 5.0 * i as f64 / 500.0;
            let err = (sol.eval(x).unwrap() - x.tanh()).abs();
            assert!(err < 1e-9, "x = {x}: err {err:e}");
        }
    }

    #[test]
    fn homogeneous_riccati_gives_shifted_reciprocal() {
        // y' = -y^2, y(0) = 1  =>  y = 1 / (x + 1)
        let sol = solve_dense(|_, y| Ok(-y * y), 0.0, 1.0, -0.5, 2.0, &OdeOptions::default()).unwrap();
        for x in [-0.5, -0.2, 0.0, 0.7, 1.3, 2.0] {
            assert!((sol.eval(x).unwrap() - 1.0 / (x + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn blow_up_is_detected() {
        // y = 1/(x + 1) hits the pole at x = -1
        let err = solve_dense(|_, y| Ok(-y * y), 0.0, 1.0, -2.0, 0.0, &OdeOptions::default()).unwrap_err();
        match err {
            OdeError::BlowUp { location, .. } => assert!((location + 1.0).abs() < 1e-3, "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_query() {
        let sol = solve_dense(|_, _| Ok(0.0), 0.0, 1.0, 0.0, 1.0, &OdeOptions::default()).unwrap();
        assert!(sol.eval(1.5).is_err());
        assert_eq!(sol.eval(0.5).unwrap(), 1.0);
    }
}
