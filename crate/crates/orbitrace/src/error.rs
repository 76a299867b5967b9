use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // models
    #[error("momentum branches coalesce at x={x} (turning point), separation {sep:.3e}")]
    DegenerateBranch { x: C64, sep: f64 },
    #[error("turning-point refinement stalled: {context} (residual {residual:.3e})")]
    RootFindingFailed { context: String, residual: f64 },

    // contour integration
    #[error("trajectory blew up at s={s:.4}: |z| exceeded {bound:.1e}")]
    BlowUp { s: f64, bound: f64 },
    #[error("orbit sample counts differ: {a} vs {b}")]
    SampleMismatch { a: usize, b: usize },

    // action quadrature
    #[error("momentum branch jump between contour nodes {node} and {}: |dp|={jump:.3e} vs separation {separation:.3e}; increase node count", node + 1)]
    BranchTrackingFailed { node: usize, jump: f64, separation: f64 },
    #[error("excluded turning point {point} lies inside the action contour")]
    ContourCollision { point: C64 },
    #[error("turning point {point} within {dist:.3e} of the traversing path")]
    TurningPointOnPath { point: C64, dist: f64 },

    // quantizer
    #[error("Newton failed to converge for n={n}: last E={last_e}, residual {residual:.3e}")]
    NoConvergence { n: i64, last_e: C64, residual: f64 },
    #[error("Newton left the validity window for n={n}: E={e} outside Re [{re_lo}, {re_hi}] x Im [{im_lo}, {im_hi}]")]
    LeftValidityWindow { n: i64, e: C64, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64 },
    #[error("orbit at E={e} is neither self-symmetric nor matched by any sibling (closest image distance {closest:.3e})")]
    UnpairedAsymmetricOrbit { e: C64, closest: f64 },
    #[error("Green's-trace denominator within {dist:.3e} of a pole at E={e}")]
    PoleProximity { e: C64, dist: f64 },

    // linear algebra
    #[error("QR eigenvalue iteration exceeded the sweep cap ({cap}) on a block of size {block}")]
    NoConvergenceQR { cap: usize, block: usize },
    #[error("singular matrix in LU factorization at pivot {pivot}")]
    SingularMatrix { pivot: usize },

    // configuration / io
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("toml parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
