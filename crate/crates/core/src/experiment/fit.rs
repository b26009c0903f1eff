use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DMatrix, DVector, Dyn};

use super::FitError;

/// Upper end of the frequency scan that seeds the fit, Hz.
pub const MAX_SCAN_FREQUENCY: f64 = 5e9;

/// `½ + A cos(2π f t + φ) e^{-t/τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedCosine {
    pub amplitude: f64,
    /// Hz.
    pub frequency: f64,
    pub phase: f64,
    /// s; `None` when the fit had no decay term.
    pub decay: Option<f64>,
}

impl DampedCosine {
    pub fn eval(&self, t: f64) -> f64 {
        let envelope = self.decay.map_or(1.0, |tau| (-t / tau).exp());
        0.5 + self.amplitude * (2.0 * std::f64::consts::PI * self.frequency * t + self.phase).cos() * envelope
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: DampedCosine,
    /// Weighted RMS residual.
    pub rms_residual: f64,
    pub evaluations: usize,
}

// Times in ns, frequency in GHz, rate in 1/ns.
struct Problem<'a> {
    t: &'a [f64],
    p: &'a [f64],
    sqrt_w: Vec<f64>,
    with_decay: bool,
    x: DVector<f64>,
}

impl Problem<'_> {
    fn terms(&self, i: usize) -> (f64, f64, f64) {
        let (f, g) = (self.x[2], if self.with_decay { self.x[3] } else { 0.0 });
        let theta = 2.0 * std::f64::consts::PI * f * self.t[i];
        (theta, (-g * self.t[i]).exp(), self.sqrt_w[i])
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.x.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.x.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let (a, b) = (self.x[0], self.x[1]);
        Some(DVector::from_fn(self.t.len(), |i, _| {
            let (theta, env, sw) = self.terms(i);
            sw * (0.5 + env * (a * theta.cos() + b * theta.sin()) - self.p[i])
        }))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let (a, b) = (self.x[0], self.x[1]);
        let mut j = DMatrix::zeros(self.t.len(), self.x.len());
        for i in 0..self.t.len() {
            let (theta, env, sw) = self.terms(i);
            let (c, s) = (theta.cos(), theta.sin());
            j[(i, 0)] = sw * env * c;
            j[(i, 1)] = sw * env * s;
            j[(i, 2)] = sw * env * (b * c - a * s) * 2.0 * std::f64::consts::PI * self.t[i];
            if self.with_decay {
                j[(i, 3)] = -sw * self.t[i] * env * (a * c + b * s);
            }
        }
        Some(j)
    }
}

/// Weighted linear solve for `(a, b)` at fixed `f` and rate; returns them and the SSE.
fn linear_fit(t: &[f64], p: &[f64], w: &[f64], f: f64, g: f64) -> (f64, f64, f64) {
    let (mut scc, mut sss, mut scs, mut syc, mut sys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let basis: Vec<(f64, f64)> = t
        .iter()
        .map(|&ti| {
            let theta = 2.0 * std::f64::consts::PI * f * ti;
            let env = (-g * ti).exp();
            (env * theta.cos(), env * theta.sin())
        })
        .collect();
    for (i, &(c, s)) in basis.iter().enumerate() {
        let y = p[i] - 0.5;
        scc += w[i] * c * c;
        sss += w[i] * s * s;
        scs += w[i] * c * s;
        syc += w[i] * y * c;
        sys += w[i] * y * s;
    }
    let det = scc * sss - scs * scs;
    let (a, b) = if det.abs() > 1e-300 {
        ((syc * sss - sys * scs) / det, (sys * scc - syc * scs) / det)
    } else if scc > 0.0 {
        (syc / scc, 0.0)
    } else {
        (0.0, 0.0)
    };
    let sse = basis
        .iter()
        .enumerate()
        .map(|(i, &(c, s))| w[i] * (0.5 + a * c + b * s - p[i]).powi(2))
        .sum();
    (a, b, sse)
}

/// Least-squares fit of a (damped) cosine about ½ to `(t, p)` with weights `w`.
///
/// A grid scan over frequency (and decay rate) seeds a Levenberg-Marquardt
/// refinement.
pub fn fit_damped_cosine(t: &[f64], p: &[f64], w: &[f64], with_decay: bool) -> Result<FitResult, FitError> {
    let n_params = if with_decay { 4 } else { 3 };
    if t.len() != p.len() || t.len() != w.len() {
        return Err(FitError::Mismatch);
    }
    if t.len() <= n_params {
        return Err(FitError::TooFewPoints { needed: n_params + 1, got: t.len() });
    }
    let t_ns: Vec<f64> = t.iter().map(|x| x * 1e9).collect();
    let t_max = t_ns.iter().cloned().fold(0.0, f64::max);
    if t_max <= 0.0 {
        return Err(FitError::Degenerate("all sample times are zero".into()));
    }

    let f_step = 1.0 / (20.0 * t_max);
    let f_max = MAX_SCAN_FREQUENCY * 1e-9;
    let rates: Vec<f64> = if with_decay {
        std::iter::once(0.0).chain((0..=40).map(|k| 1.0 / (t_max * 10f64.powf(k as f64 / 10.0 - 2.0)))).collect()
    } else {
        vec![0.0]
    };
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0, 0.0);
    let mut f = f_step;
    while f <= f_max {
        for &g in &rates {
            let (a, b, sse) = linear_fit(&t_ns, p, w, f, g);
            if sse < best.0 {
                best = (sse, a, b, f, g);
            }
        }
        f += f_step;
    }
    let (_, a, b, f0, g0) = best;

    let mut x0 = vec![a, b, f0];
    if with_decay {
        x0.push(g0);
    }
    let problem = Problem {
        t: &t_ns,
        p,
        sqrt_w: w.iter().map(|x| x.sqrt()).collect(),
        with_decay,
        x: DVector::from_vec(x0),
    };
    let (solved, report) = LevenbergMarquardt::new().minimize(problem);
    if !report.termination.was_successful() {
        return Err(FitError::NonConvergence(format!("{:?}", report.termination)));
    }
    let x = &solved.x;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FitError::NonConvergence("non-finite parameters".into()));
    }
    let (a, b) = (x[0], x[1]);
    let (mut frequency, mut phase) = (x[2], -b.atan2(a));
    if frequency < 0.0 {
        frequency = -frequency;
        phase = -phase;
    }
    let decay = with_decay.then(|| if x[3] > 0.0 { 1e-9 / x[3] } else { f64::INFINITY });
    let total_w: f64 = w.iter().sum();
    Ok(FitResult {
        model: DampedCosine { amplitude: a.hypot(b), frequency: frequency * 1e9, phase, decay },
        rms_residual: (2.0 * report.objective_function / total_w).sqrt(),
        evaluations: report.number_of_evaluations,
    })
}
