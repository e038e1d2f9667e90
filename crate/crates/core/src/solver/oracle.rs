//! Reference time stepper used to check the Picard trajectories.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::semigroup::Propagator;
use crate::solver::forms::{eval_form_diagonal, NonlinearForm};

fn axpy(y: &GridFunction, a: f64, x: &GridFunction) -> GridFunction {
    let vals = y.values().iter().zip(x.values()).map(|(y, x)| y + a * x).collect();
    GridFunction::from_parts(*y.geometry(), vals)
}

/// Integrating-factor RK4 for `u_t + (−Δ)^{β/2}u = B(u)` from `t = 0`,
/// returning the state at each requested time (ascending). Every interval
/// between targets is split into equal steps no longer than `max_step`.
pub fn exponential_integrator(
    u0: &GridFunction,
    form: &NonlinearForm,
    beta: f64,
    times: &[f64],
    max_step: f64,
) -> Result<Vec<GridFunction>> {
    if !(max_step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be > 0, got {max_step}")));
    }
    let prop = Propagator::new(*u0.geometry(), beta)?;
    let nl = |u: &GridFunction| eval_form_diagonal(form, u);
    let mut out = Vec::with_capacity(times.len());
    let mut u = u0.clone();
    let mut now = 0.0;
    for &target in times {
        if target < now {
            return Err(Error::InvalidParameter("oracle times must be ascending".into()));
        }
        let steps = ((target - now) / max_step).ceil().max(1.0) as usize;
        let h = (target - now) / steps as f64;
        for _ in 0..steps {
            let half = |v: &GridFunction| prop.apply(0.5 * h, v);
            let full = |v: &GridFunction| prop.apply(h, v);
            let eu = half(&u)?;
            let k1 = nl(&u)?;
            let k2 = nl(&axpy(&eu, 0.5 * h, &half(&k1)?))?;
            let k3 = nl(&axpy(&eu, 0.5 * h, &k2))?;
            let k4 = nl(&axpy(&full(&u)?, h, &half(&k3)?))?;
            let mid = half(&k2.add(&k3)?)?;
            let mut next = full(&u)?;
            next = axpy(&next, h / 6.0, &full(&k1)?);
            next = axpy(&next, h / 3.0, &mid);
            next = axpy(&next, h / 6.0, &k4);
            if !next.is_finite() {
                return Err(Error::Diverged { sweep: 0, reason: format!("oracle blew up before t = {target}") });
            }
            u = next;
        }
        now = target;
        out.push(u.clone());
    }
    Ok(out)
}
