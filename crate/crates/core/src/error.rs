use thiserror::Error;

/// Every failure the library reports. Numeric payloads are converted to `f64`
/// so the error type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not traceless: |Tr M| = {trace:e}")]
    NonTraceless { trace: f64 },

    #[error("spin is not null: |s·s| = {residual:e}{}", site_suffix(*site))]
    NotNull { site: Option<usize>, residual: f64 },

    #[error("zero spin at site {site}: a vanishing residue makes the pole spurious")]
    ZeroSpin { site: usize },

    #[error("degenerate poles: {reason}")]
    DegeneratePoles { reason: String },

    #[error("B_j A_j is not proportional to A_j at site {site}: residual {residual:e}")]
    NotProportional { site: usize, residual: f64 },

    #[error("spins {j} and {k} are bilinearly orthogonal; sign ε undefined")]
    OrthogonalSpins { j: usize, k: usize },

    #[error("resolvent is singular at x = {re} + {im}i")]
    ResolventSingular { re: f64, im: f64 },

    #[error("eigenbasis is ill-conditioned (condition {condition:e}): pole collision")]
    DefectiveMatrix { condition: f64 },

    #[error("field has imaginary residue {residual:e}")]
    NonRealField { residual: f64 },

    #[error("pole collision at t = {t}: separation {separation:e}")]
    PoleCollision { t: f64, separation: f64 },

    #[error("pole approached the real axis at t = {t}: min Im x = {min_im:e}")]
    BoundaryApproach { t: f64, min_im: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no valid datum found after {attempts} attempts")]
    SearchFailed { attempts: usize },
}

fn site_suffix(site: Option<usize>) -> String {
    match site {
        Some(j) => format!(" at site {j}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
