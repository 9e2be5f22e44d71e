//! Second variation `∂²J(E)` at critical configurations.

pub mod bem;
pub mod constrained;
pub mod fd;
pub mod io;
pub mod lamella;
pub mod threshold;

pub use bem::{assemble_boundary_form, QuadraticFormMatrix};
pub use constrained::{constrained_min_eig, constrained_min_eig_with, ConstrainedSpectrum, ConstraintOptions};
pub use fd::{
    finite_difference_check, graph_alpha, mode_direction, quantitative_sampling, random_perturbation, FdReport,
    SamplingReport,
};
pub use io::{write_spectra, GammaConstant, KConstant, RegressionConstants};
pub use lamella::{
    lamella_form_value, lamella_min_eigenvalue, lamella_mode_matrix, lamella_normal_derivative, LamellaModeMatrix,
    StabilityReport,
};
pub use threshold::{stability_threshold_gamma, stability_threshold_k, GammaThreshold, KThreshold};
