use crate::dynamics::{PhasePoint, SystemModel, MAX_DIM};
use crate::error::{Error, Result};

use super::{Direction, LDParams};

const OVERFLOW_LIMIT: f64 = 1e150;

/// RK4 on `ẋ = s A x` (`s = ±1`) with `|ẋ_i|^p` accumulated at the four
/// stage derivatives using the RK4 weights.
pub(crate) fn integrate(
    system: &SystemModel,
    x0: &PhasePoint,
    direction: Direction,
    params: &LDParams,
) -> Result<(PhasePoint, [f64; MAX_DIM])> {
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let steps = params.steps();
    let h = params.tau / steps as f64;
    let a = system.jac_raw();
    let p = params.p;
    match system.dim() {
        4 => dispatch::<4>(a, x0, sign, h, steps, p),
        _ => dispatch::<6>(a, x0, sign, h, steps, p),
    }
}

fn dispatch<const D: usize>(
    a: &[f64; MAX_DIM * MAX_DIM],
    x0: &PhasePoint,
    sign: f64,
    h: f64,
    steps: usize,
    p: f64,
) -> Result<(PhasePoint, [f64; MAX_DIM])> {
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = sign * a[i * MAX_DIM + k];
        }
    }
    let mut x = [0.0; D];
    x.copy_from_slice(&x0.raw()[..D]);
    let (end, acc) = if p == 1.0 {
        kernel::<D, _>(&m, x, h, steps, |v: f64| v.abs())?
    } else if p == 0.5 {
        kernel::<D, _>(&m, x, h, steps, |v: f64| v.abs().sqrt())?
    } else {
        kernel::<D, _>(&m, x, h, steps, |v: f64| v.abs().powf(p))?
    };
    let mut out = [0.0; MAX_DIM];
    out[..D].copy_from_slice(&end);
    let mut acc_out = [0.0; MAX_DIM];
    acc_out[..D].copy_from_slice(&acc);
    Ok((PhasePoint::from_array(out, D), acc_out))
}

#[inline(always)]
fn matvec<const D: usize>(m: &[[f64; D]; D], x: &[f64; D]) -> [f64; D] {
    let mut out = [0.0; D];
    for i in 0..D {
        let mut s = 0.0;
        for k in 0..D {
            s += m[i][k] * x[k];
        }
        out[i] = s;
    }
    out
}

#[inline(always)]
fn kernel<const D: usize, F: Fn(f64) -> f64>(
    m: &[[f64; D]; D],
    mut x: [f64; D],
    h: f64,
    steps: usize,
    pow: F,
) -> Result<([f64; D], [f64; D])> {
    let mut acc = [0.0; D];
    let (h2, h6) = (0.5 * h, h / 6.0);
    for step in 0..steps {
        let k1 = matvec(m, &x);
        let mut y = [0.0; D];
        for i in 0..D {
            y[i] = x[i] + h2 * k1[i];
        }
        let k2 = matvec(m, &y);
        for i in 0..D {
            y[i] = x[i] + h2 * k2[i];
        }
        let k3 = matvec(m, &y);
        for i in 0..D {
            y[i] = x[i] + h * k3[i];
        }
        let k4 = matvec(m, &y);
        let mut big = false;
        for i in 0..D {
            x[i] += h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            acc[i] += h6 * (pow(k1[i]) + 2.0 * (pow(k2[i]) + pow(k3[i])) + pow(k4[i]));
            big |= !(x[i].abs() <= OVERFLOW_LIMIT);
        }
        if big {
            return Err(Error::Overflow {
                time: (step + 1) as f64 * h,
            });
        }
    }
    Ok((x, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelKind;
    use crate::ld::LDMethod;

    #[test]
    fn bath_orbit_returns_after_one_period() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        let x0 = PhasePoint::new(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        let x0 = x0.with(1, 1.0).with(2, 0.0);
        let params = LDParams::new(0.5, 2.0 * std::f64::consts::PI, 1e-3, LDMethod::Augmented).unwrap();
        let (end, _) = integrate(&s, &x0, Direction::Forward, &params).unwrap();
        assert!(end.max_abs_diff(&x0) < 1e-8);
    }

    #[test]
    fn overflow_is_reported_with_time() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        let x0 = PhasePoint::new(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let params = LDParams::new(1.0, 400.0, 0.05, LDMethod::Augmented).unwrap();
        match integrate(&s, &x0, Direction::Forward, &params) {
            Err(Error::Overflow { time }) => assert!(time > 340.0 && time < 350.0, "{time}"),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
