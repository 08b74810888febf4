use crate::dynamics::{PhasePoint, SystemModel, MAX_DIM};

use super::{Direction, LDParams};

const ROOT_TOL: f64 = 1e-12;

/// Closed-form velocity `ẋ(t)` along the trajectory through `x0`.
struct Velocity<'a> {
    system: &'a SystemModel,
    dim: usize,
    dof: usize,
    lambda: f64,
    freqs: [f64; 2],
    a: f64,
    b: f64,
    w0: PhasePoint,
}

impl<'a> Velocity<'a> {
    fn new(system: &'a SystemModel, x0: &PhasePoint) -> Self {
        let w0 = system.to_decoupled_unchecked(x0);
        let dof = system.dof();
        Self {
            system,
            dim: system.dim(),
            dof,
            lambda: system.params().lambda,
            freqs: system.params().bath_frequencies(),
            a: w0[0] + w0[dof],
            b: w0[0] - w0[dof],
            w0,
        }
    }

    fn at(&self, t: f64) -> [f64; MAX_DIM] {
        let n = self.dof;
        let mut wd = [0.0; MAX_DIM];
        let lam = self.lambda;
        let (ep, em) = ((lam * t).exp(), (-lam * t).exp());
        wd[0] = 0.5 * lam * (self.a * ep - self.b * em);
        wd[n] = 0.5 * lam * (self.a * ep + self.b * em);
        for i in 1..n {
            let w = self.freqs[i - 1];
            let (s, c) = (w * t).sin_cos();
            let (q, p) = (self.w0[i], self.w0[n + i]);
            wd[i] = w * (p * c - q * s);
            wd[n + i] = -w * (q * c + p * s);
        }
        *self
            .system
            .from_decoupled_unchecked(&PhasePoint::from_array(wd, self.dim))
            .raw()
    }
}

fn root(v: &Velocity, i: usize, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_neg = f_lo < 0.0;
    while (hi - lo).abs() > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = v.at(mid)[i];
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_a^b |ẋ_i|^p dt` over a piece between consecutive zeros of `ẋ_i`.
///
/// The substitution `t = a + (b - a)(3w² - 2w³)` flattens the `|t - a|^p`
/// endpoint behaviour before composite Simpson with `m` subintervals on `w`.
fn piece(v: &Velocity, i: usize, a: f64, b: f64, m: usize, pow: &dyn Fn(f64) -> f64) -> f64 {
    let len = b - a;
    let hw = 1.0 / m as f64;
    let mut sum = 0.0;
    // End nodes carry the Jacobian factor 6w(1-w) = 0.
    for k in 1..m {
        let w = k as f64 * hw;
        let t = a + len * w * w * (3.0 - 2.0 * w);
        let jac = 6.0 * len * w * (1.0 - w);
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * pow(v.at(t)[i]) * jac;
    }
    (sum * hw / 3.0).abs()
}

/// Per-coordinate integrals of `|ẋ_i|^p` over `[0, tau]` or `[-tau, 0]`.
///
/// Each `ẋ_i` is sampled at half-panel spacing; sign changes are located by
/// bisection and every piece between consecutive zeros is integrated with
/// composite Simpson at two subintervals per panel width.
pub(crate) fn integrate(
    system: &SystemModel,
    x0: &PhasePoint,
    direction: Direction,
    params: &LDParams,
) -> [f64; MAX_DIM] {
    let v = Velocity::new(system, x0);
    let n = v.dim;
    let max_freq = v.freqs.iter().fold(0.0_f64, |m, w| m.max(*w));
    let panel = if max_freq > 0.0 {
        params.dt.min(2.0 * std::f64::consts::PI / max_freq / 40.0)
    } else {
        params.dt
    };
    let panels = ((params.tau / panel) - 1e-9).ceil().max(1.0) as usize;
    let width = params.tau / panels as f64;
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let p = params.p;
    let pow: Box<dyn Fn(f64) -> f64> = if p == 1.0 {
        Box::new(|x: f64| x.abs())
    } else if p == 0.5 {
        Box::new(|x: f64| x.abs().sqrt())
    } else {
        Box::new(move |x: f64| x.abs().powf(p))
    };

    let nodes = 2 * panels;
    let times: Vec<f64> = (0..=nodes)
        .map(|k| sign * 0.5 * width * k as f64)
        .collect();
    let samples: Vec<[f64; MAX_DIM]> = times.iter().map(|t| v.at(*t)).collect();

    let mut acc = [0.0; MAX_DIM];
    for (i, slot) in acc.iter_mut().enumerate().take(n) {
        let mut cuts = vec![times[0]];
        for k in 0..nodes {
            let (ya, yb) = (samples[k][i], samples[k + 1][i]);
            if k > 0 && ya == 0.0 {
                cuts.push(times[k]);
            } else if (ya < 0.0 && yb > 0.0) || (ya > 0.0 && yb < 0.0) {
                cuts.push(root(&v, i, times[k], times[k + 1], ya));
            }
        }
        cuts.push(times[nodes]);
        *slot = cuts
            .windows(2)
            .filter(|c| c[1] != c[0])
            .map(|c| {
                let m = 2 * (((c[1] - c[0]).abs() / width).ceil() as usize).max(8);
                piece(&v, i, c[0], c[1], m, pow.as_ref())
            })
            .sum();
    }
    acc
}
