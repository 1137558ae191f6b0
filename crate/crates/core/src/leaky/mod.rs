//! Open-cavity optics: Fabry-Perot eigenvalues, the pole (leaky-wave) field
//! of a line source, its steepest-descent far field, microscope imaging and
//! the evanescent-regime velocity.
//!
//! The permittivity is taken equal inside and outside the cavity, so the
//! only singularities in the spectral plane are the reflectivity poles.

mod evanescent;
mod fabry_perot;
mod imaging;
mod pole;
mod sdp;

pub use evanescent::{evanescent_velocity, si};
pub use fabry_perot::{fabry_perot_mode, fabry_perot_mode_expansion, refine_mode, ReflectivityModel};
pub use imaging::{gauss_legendre, image_field, psf, ImageResult, ImagingSetup, SampledLine};
pub use pole::{leaky_field, pole_parameters, LeakyFieldValue, LeakyModeParams, SourceSpec};
pub use sdp::{cavity_spectrum, hankel0_asymptotic, sdp_farfield, FarFieldPoint};
