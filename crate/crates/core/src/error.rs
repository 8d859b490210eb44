use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch in {op}: {left} vs {right} nodes")]
    GridMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {op} at node (i_r={i_r}, i_z={i_z}), r={r}, z={z}: {value}")]
    NonFinite {
        op: &'static str,
        i_r: usize,
        i_z: usize,
        r: f64,
        z: f64,
        value: f64,
    },

    #[error("integrand overflow in {op}; largest magnitude {value:e} at node (i_r={i_r}, i_z={i_z})")]
    IntegrandOverflow {
        op: &'static str,
        i_r: usize,
        i_z: usize,
        value: f64,
    },

    #[error("{op} requires the field to vanish on the axis; |f(0,z)| reaches {max_axis:e} (tolerance {tol:e})")]
    AxisNotZero {
        op: &'static str,
        max_axis: f64,
        tol: f64,
    },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("epsilon {eps} outside (0, 1/14)")]
    EpsilonOutOfRange { eps: f64 },

    #[error("delta0 {delta0} outside (0, 1/3)")]
    Delta0OutOfRange { delta0: f64 },

    #[error("delta0 {delta0} below the minimal admissible value {minimum} for this epsilon")]
    SwirlDecayTooSmall { delta0: f64, minimum: f64 },

    #[error("scaling gap violated: {detail}")]
    ScalingGap { detail: String },

    #[error("exponents not conjugate: reciprocals sum to {sum}, expected 1")]
    NonConjugateExponents { sum: f64 },

    #[error("constant overflow while composing {what}: {value:e}")]
    ConstantOverflow { what: &'static str, value: f64 },

    #[error("CFL violation: max|u|*dt/min(dr,dz) = {cfl:.3} exceeds {limit}; suggested dt <= {suggested_dt:e}")]
    CflViolation {
        cfl: f64,
        limit: f64,
        suggested_dt: f64,
    },

    #[error("explicit diffusion unstable: nu*dt*(1/dr^2+1/dz^2) = {number:.3}; suggested dt <= {suggested_dt:e}")]
    DiffusionLimit { number: f64, suggested_dt: f64 },

    #[error("pressure solve did not reach tol {tol:e}; divergence residual history: {history:?}")]
    PoissonDiverged { tol: f64, history: Vec<f64> },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate verification field: {0}")]
    DegenerateField(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
