use crate::boost::BoostTrace;
use crate::dataset::Dataset;
use crate::{Error, Result};

/// Threshold for the relative telescoping residual.
pub const TELESCOPING_TOLERANCE: f64 = 1e-9;
/// Threshold for the normalizer closed form.
pub const ZK_TOLERANCE: f64 = 1e-12;

/// `Z = eps e^alpha + (1 - eps) e^-alpha`.
pub fn zk_closed_form(eps: f64, alpha: f64) -> f64 {
    eps * alpha.exp() + (1.0 - eps) * (-alpha).exp()
}

/// `|sum_i exp(-alpha y_i V_i) - n prod_k Z_k| / (n prod_k Z_k)` where
/// `V_i = sum_k h_k(x_i)`. Both sides are formed in the log domain, so long
/// runs neither overflow nor underflow.
pub fn telescoping_residual(votes: &[i64], labels: &[i8], alpha: f64, log_z_sum: f64) -> f64 {
    let exponents: Vec<f64> = votes.iter().zip(labels).map(|(&v, &y)| -alpha * (f64::from(y) * v as f64)).collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lhs_log = top + exponents.iter().map(|e| (e - top).exp()).sum::<f64>().ln();
    let rhs_log = (votes.len() as f64).ln() + log_z_sum;
    (lhs_log - rhs_log).exp_m1().abs()
}

fn check_trace(trace: &BoostTrace, data: &Dataset) -> Result<()> {
    if trace.header.n != data.len() || trace.header.dataset_digest != data.digest() {
        return Err(Error::invalid("trace was not recorded on this dataset"));
    }
    trace.validate()
}

/// Telescoping identity residual for a stored trace.
pub fn telescoping_check(trace: &BoostTrace, data: &Dataset) -> Result<f64> {
    check_trace(trace, data)?;
    let labels: Vec<i8> = data.examples().iter().map(|e| e.y()).collect();
    let mut votes = vec![0i64; data.len()];
    for r in &trace.rounds {
        for (v, e) in votes.iter_mut().zip(data.examples()) {
            *v += i64::from(r.hypothesis.predict(e.x()));
        }
    }
    let log_z_sum: f64 = trace.rounds.iter().map(|r| r.z.ln()).sum();
    Ok(telescoping_residual(&votes, &labels, trace.alpha(), log_z_sum))
}

/// Largest `|Z_k - (eps_k e^alpha + (1 - eps_k) e^-alpha)|` over the rounds,
/// with `eps_k` recomputed from an independent replay of `D_k`.
pub fn zk_check(trace: &BoostTrace, data: &Dataset) -> Result<f64> {
    check_trace(trace, data)?;
    let alpha = trace.alpha();
    let n = data.len();
    let mut dist = vec![1.0 / n as f64; n];
    let mut worst: f64 = 0.0;
    for r in &trace.rounds {
        let mut eps = 0.0;
        let mut raw = Vec::with_capacity(n);
        for (w, e) in dist.iter().zip(data.examples()) {
            let yh = f64::from(e.y() * r.hypothesis.predict(e.x()));
            if yh < 0.0 {
                eps += w;
            }
            raw.push(w * (-alpha * yh).exp());
        }
        worst = worst.max((r.z - zk_closed_form(eps, alpha)).abs());
        let z: f64 = raw.iter().sum();
        dist = raw.into_iter().map(|w| w / z).collect();
    }
    Ok(worst)
}
