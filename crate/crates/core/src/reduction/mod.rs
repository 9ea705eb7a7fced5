//! The randomized reduction: instance construction, noise sampling,
//! decoding, and on-disk instance directories.

mod decode;
mod instance;
mod io;
mod noise;

pub use decode::{decode_strategies, decoding_defect, DECODE_EQ_CHECK_TOL};
pub use instance::{
    build_general_x_game, build_reduced_game, build_with, tensor_with_ones, BlockMap, GadgetMask,
    GadgetSeeds, Gadgets, ReductionInstance, ReductionParams, SmoothedForm,
};
pub use io::{load_instance, matrix_from_text, matrix_to_text, save_instance, InstanceManifest};
pub use noise::{difference_parts, sample_noise_matrix, symmetrize, NoiseSpec};
