//! Multiplier conditions of the inverse problem for second-order systems.

pub mod algebraic;
pub mod fd;
pub mod multiplier;
pub mod tensors;

pub use algebraic::{
    algebraic_system, assemble_multiplier, nullspace, singularity_certificate, sym_index, unknown_count,
    CertificateConfig, CertificateReport, Counterexample, JetCertificate, Nullspace,
};
pub use multiplier::{
    helmholtz_residuals, normalized_det, HelmholtzReport, MultiplierField, MultiplierProvenance, REGULARITY_TOL,
};
pub use tensors::{nabla, nabla_phi, phi, r_tensor, PolyTensors};
