//! Worked examples as executable verifications.

mod contraction;
mod crossed;
mod fourier;
mod groupoid;

pub use contraction::{contraction_rep_check, ContractionRep, FormsModel, SCHOUTEN_SIGN};
pub use crossed::crossed_product_verify;
pub use fourier::{
    cartan_shadow_check, fourier_intertwining_check, inverse_sign, odd_fourier, sample_vector_fields, FourierDirection,
    FourierSetup, CARTAN_SIGN,
};
pub use groupoid::{convolution_d_sign, pair_groupoid_demo, PairGroupoid};

pub use crate::report::{Check, Report};
