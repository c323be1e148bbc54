use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EchoProtocol {
    /// Two-pulse photon echo.
    #[serde(rename = "2pe")]
    TwoPulse,
    CribFwd,
    CribBwd,
    RoseFwd,
}

/// Closed-form retrieval efficiency at optical depth `d` (NaN for `d < 0`).
///
/// * two-pulse echo: `4 sinh²(d/2)`
/// * forward CRIB and ROSE: `d² e^{−d}`
/// * backward CRIB: `(1 − e^{−d})²`
pub fn analytic_efficiency(protocol: EchoProtocol, d: f64) -> f64 {
    if !(d >= 0.0) {
        return f64::NAN;
    }
    match protocol {
        EchoProtocol::TwoPulse => 4.0 * (0.5 * d).sinh().powi(2),
        EchoProtocol::CribFwd | EchoProtocol::RoseFwd => d * d * (-d).exp(),
        EchoProtocol::CribBwd => (-(-d).exp_m1()).powi(2),
    }
}

/// RK4 solution of the area theorem `∂ζθ = −(d/2) sin θ` on `nz + 1` points of `ζ ∈ [0, 1]`.
pub fn area_theorem_reference(theta0: f64, d: f64, nz: usize) -> Vec<(f64, f64)> {
    let nz = nz.max(1);
    let h = 1.0 / nz as f64;
    let f = |theta: f64| -0.5 * d * theta.sin();
    let mut theta = theta0;
    let mut out = Vec::with_capacity(nz + 1);
    out.push((0.0, theta));
    for k in 0..nz {
        let k1 = f(theta);
        let k2 = f(theta + 0.5 * h * k1);
        let k3 = f(theta + 0.5 * h * k2);
        let k4 = f(theta + h * k3);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((k + 1) as f64 * h, theta));
    }
    out
}
