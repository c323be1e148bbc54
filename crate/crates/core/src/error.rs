use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pulse does not fit the time grid: edge amplitude {edge:.3e} of peak")]
    GridTooShort { edge: f64 },
    #[error("transfer output wraps around the grid: edge amplitude {edge:.3e} of peak")]
    AliasRisk { edge: f64 },
    #[error("integration step too coarse: error estimate {estimate:.3e} after {doublings} doublings")]
    StepTooCoarse { estimate: f64, doublings: u32 },
    #[error("grid convergence gate failed: relative change {change:.3e} on doubling {what}")]
    ConvergenceNotMet { what: String, change: f64 },
    #[error("signal area {area:.4} exceeds the perturbative bound {bound:.4}")]
    PerturbativeViolation { area: f64, bound: f64 },
    #[error("detuning flip at t={flip} while the signal is still present (tail {tail:.3e})")]
    FlipDuringSignal { flip: f64, tail: f64 },
    #[error("event ordering violated: {0}")]
    OrderingViolation(String),
    #[error("Fock truncation overflow: leaked probability {leak:.3e} above n_max={n_max}")]
    TruncationOverflow { leak: f64, n_max: usize },
    #[error("gain equals loss: noise photon number is singular; (1−η)N_f tends to {limit}")]
    DegenerateGainLoss { limit: f64 },
    #[error("Raman condition violated: Δ={delta} < 10Γ={gamma10}")]
    RamanConditionViolated { delta: f64, gamma10: f64 },
}

impl Error {
    /// Errors that flag a numerical regime rather than an invalid input.
    pub fn is_regime_warning(&self) -> bool {
        matches!(self, Error::RamanConditionViolated { .. })
    }

    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::StepTooCoarse { .. } | Error::ConvergenceNotMet { .. } | Error::AliasRisk { .. }
        )
    }
}
