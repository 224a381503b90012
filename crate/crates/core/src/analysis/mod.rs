//! Statistical and robustness measurements on RGB images.

pub mod differential;
pub mod report;
pub mod robustness;
pub mod sampling;
pub mod stats;

pub use differential::{
    change_one_pixel, differential, npcr, pixel_difference_ratio, uaci, DifferentialMetrics,
};
pub use report::{analyze, AnalysisOptions, AnalysisReport, ChannelReport, Correlation};
pub use robustness::{add_salt_pepper, crop_blocks, Block, Fill};
pub use sampling::{local_entropy, sample_adjacent_pairs, AdjacentPair, Direction};
pub use stats::{
    channel_histograms, chi_square, correlation, entropy, image_correlation, variance, Histogram,
    CHI_SQUARE_CRITICAL_255,
};
