//! Spike-train containers, binning, surrogate dithering and file formats.

mod binning;
mod dither;
pub mod sdf;
mod train;

pub use sdf::{read_raster_csv, read_sdf_json, sdf_from_json_str, sdf_to_json_string, write_raster_csv, write_sdf_json};
pub use binning::{bin_spike_trains, BinMode, BinaryRaster, BinnedMatrix};
pub use dither::{dither_set, dither_spike_train};
pub use train::{mean_firing_rate, SpikeTrain, SpikeTrainSet, DEFAULT_SAMPLING_RATE_HZ};
