use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{grid_steps, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{rates_closed_form, SystemParams};

const TRACE_DRIFT_LIMIT: f64 = 1e-8;

type Op = Matrix2<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigenoperators `S_{+ω₀}`, `S_{-ω₀}`, `S_0` in the `{ψ₊, ψ₋}` basis.
fn eigenoperators(p: &SystemParams) -> [Op; 3] {
    let zero = c(0.0);
    let t = -p.delta() / (2.0 * p.omega0());
    let d = p.epsilon() / (2.0 * p.omega0());
    // sigma_minus = |psi_-><psi_+| has its entry in row 1, column 0
    let lowering = Op::new(zero, zero, c(t), zero);
    let raising = Op::new(zero, c(t), zero, zero);
    let dephasing = Op::new(c(d), zero, zero, c(-d));
    [lowering, raising, dephasing]
}

fn dissipator(ops: &[Op; 3], rates: [f64; 3], rho: &Op) -> Op {
    let mut out = Op::zeros();
    for (s, gamma) in ops.iter().zip(rates) {
        if gamma == 0.0 {
            continue;
        }
        let sd = s.adjoint();
        let sds = sd * s;
        out += (s * rho * sd - (sds * rho + rho * sds) * c(0.5)) * c(gamma);
    }
    out
}

/// Integrates the time-local master equation (Lamb shift dropped) with
/// classical fourth-order Runge–Kutta on the grid `t_k = k h`.
///
/// Works directly with the eigenoperators and bare rates, independent of
/// the kernel construction, so it serves as a cross-check of the analytic
/// map.
pub fn ode_oracle(p: &SystemParams, rho0: &DensityMatrix, t_max: f64, h: f64) -> Result<Vec<DensityMatrix>> {
    let n = grid_steps(t_max, h)?;
    let ops = eigenoperators(p);
    let rates_at = |t: f64| -> Result<[f64; 3]> {
        let r = rates_closed_form(p, t)?;
        Ok([r.gamma_plus, r.gamma_minus, r.gamma_zero])
    };
    let mut rho = rho0.to_matrix();
    let mut out = Vec::with_capacity(n + 1);
    out.push(*rho0);
    let mut r_start = rates_at(0.0)?;
    for k in 0..n {
        let t = k as f64 * h;
        let r_mid = rates_at(t + 0.5 * h)?;
        let r_end = rates_at((k + 1) as f64 * h)?;
        let k1 = dissipator(&ops, r_start, &rho);
        let k2 = dissipator(&ops, r_mid, &(rho + k1 * c(0.5 * h)));
        let k3 = dissipator(&ops, r_mid, &(rho + k2 * c(0.5 * h)));
        let k4 = dissipator(&ops, r_end, &(rho + k3 * c(h)));
        rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
        let trace = (rho[(0, 0)] + rho[(1, 1)]).re;
        if (trace - 1.0).abs() > TRACE_DRIFT_LIMIT {
            return Err(Error::Step(format!("trace drifted to {trace}")).at(t + h));
        }
        out.push(DensityMatrix::from_matrix(&rho));
        r_start = r_end;
    }
    Ok(out)
}
