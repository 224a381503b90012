use std::fmt::{self, Write as _};
use std::io::Write;

use serde::Serialize;

use super::differential::DifferentialMetrics;
use super::sampling::{
    local_entropy, sample_adjacent_pairs, Direction, LOCAL_ENTROPY_BLOCKS,
    LOCAL_ENTROPY_BLOCK_PIXELS,
};
use super::stats::{channel_histograms, chi_square, correlation, entropy, variance};
use crate::error::{Error, Result};
use crate::frame::RgbImage;

pub const CHANNEL_NAMES: [&str; 3] = ["R", "G", "B"];

/// Default number of adjacent pairs sampled per direction.
pub const DEFAULT_SAMPLES: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub samples: usize,
    pub seed: u64,
    pub local_blocks: usize,
    pub local_block_pixels: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            local_blocks: LOCAL_ENTROPY_BLOCKS,
            local_block_pixels: LOCAL_ENTROPY_BLOCK_PIXELS,
        }
    }
}

/// Adjacent-pixel correlation that may be undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correlation {
    Value(f64),
    Degenerate,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Value(v) => Some(v),
            Correlation::Degenerate => None,
        }
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correlation::Value(v) => write!(f, "{v:.6}"),
            Correlation::Degenerate => f.write_str("degenerate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelReport {
    pub variance: f64,
    pub chi2: f64,
    pub entropy: f64,
    pub local_entropy: Option<f64>,
    /// Horizontal, vertical, diagonal.
    pub correlation: [Correlation; 3],
    pub npcr: Option<f64>,
    pub uaci: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub width: usize,
    pub height: usize,
    pub samples: usize,
    pub seed: u64,
    pub channels: [ChannelReport; 3],
}

#[derive(Serialize)]
struct CsvRow<'a> {
    channel: &'a str,
    variance: String,
    chi2: String,
    entropy: String,
    local_entropy: String,
    corr_h: String,
    corr_v: String,
    corr_d: String,
    npcr: String,
    uaci: String,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

/// Histogram, correlation and entropy statistics of one image. Local entropy
/// is reported as `n/a` when the image cannot hold the requested blocks.
pub fn analyze(image: &RgbImage, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let hists = channel_histograms(image);
    let local = match local_entropy(image, opts.local_blocks, opts.local_block_pixels, opts.seed) {
        Ok(v) => Some(v),
        Err(Error::Analysis(_)) => None,
        Err(e) => return Err(e),
    };
    let mut correlations = [[Correlation::Degenerate; 3]; 3];
    for (d, dir) in Direction::ALL.into_iter().enumerate() {
        let pairs =
            sample_adjacent_pairs(image, dir, opts.samples, opts.seed.wrapping_add(d as u64))?;
        for (c, row) in correlations.iter_mut().enumerate() {
            let xy: Vec<(u8, u8)> = pairs.iter().map(|p| p.channel(c)).collect();
            row[d] = correlation(&xy).map_or(Correlation::Degenerate, Correlation::Value);
        }
    }
    let channels = std::array::from_fn(|c| ChannelReport {
        variance: variance(&hists[c]),
        chi2: chi_square(&hists[c]),
        entropy: entropy(&hists[c]),
        local_entropy: local.map(|l| l[c]),
        correlation: correlations[c],
        npcr: None,
        uaci: None,
    });
    Ok(AnalysisReport {
        width: image.width(),
        height: image.height(),
        samples: opts.samples,
        seed: opts.seed,
        channels,
    })
}

impl AnalysisReport {
    pub fn with_differential(mut self, metrics: &DifferentialMetrics) -> Self {
        for (c, ch) in self.channels.iter_mut().enumerate() {
            ch.npcr = Some(metrics.npcr[c]);
            ch.uaci = Some(metrics.uaci[c]);
        }
        self
    }

    /// Stable `key=value` text, one `[R]`/`[G]`/`[B]` group per channel.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "width={}", self.width);
        let _ = writeln!(s, "height={}", self.height);
        let _ = writeln!(s, "samples={}", self.samples);
        let _ = writeln!(s, "seed={}", self.seed);
        for (name, ch) in CHANNEL_NAMES.iter().zip(&self.channels) {
            let _ = writeln!(s, "[{name}]");
            let _ = writeln!(s, "variance={:.6}", ch.variance);
            let _ = writeln!(s, "chi2={:.6}", ch.chi2);
            let _ = writeln!(s, "entropy={:.6}", ch.entropy);
            let _ = writeln!(s, "local_entropy={}", opt(ch.local_entropy));
            for (dir, corr) in Direction::ALL.iter().zip(ch.correlation) {
                let _ = writeln!(s, "corr_{}={corr}", dir.label());
            }
            let _ = writeln!(s, "npcr={}", opt(ch.npcr));
            let _ = writeln!(s, "uaci={}", opt(ch.uaci));
        }
        s
    }

    /// CSV with header `channel,variance,chi2,entropy,local_entropy,corr_h,corr_v,corr_d,npcr,uaci`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for (name, ch) in CHANNEL_NAMES.iter().zip(&self.channels) {
            let [h, v, d] = ch.correlation.map(|c| c.to_string());
            w.serialize(CsvRow {
                channel: name,
                variance: format!("{:.6}", ch.variance),
                chi2: format!("{:.6}", ch.chi2),
                entropy: format!("{:.6}", ch.entropy),
                local_entropy: opt(ch.local_entropy),
                corr_h: h,
                corr_v: v,
                corr_d: d,
                npcr: opt(ch.npcr),
                uaci: opt(ch.uaci),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
