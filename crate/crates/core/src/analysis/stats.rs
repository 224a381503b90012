use crate::error::{Error, Result};
use crate::frame::RgbImage;

/// Value histogram of one 8-bit channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
    total: u64,
}

impl Histogram {
    pub fn from_values(values: impl IntoIterator<Item = u8>) -> Self {
        let mut counts = [0u64; 256];
        let mut total = 0;
        for v in values {
            counts[v as usize] += 1;
            total += 1;
        }
        Self { counts, total }
    }

    pub fn from_counts(counts: [u64; 256]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// One histogram per RGB channel.
pub fn channel_histograms(image: &RgbImage) -> [Histogram; 3] {
    std::array::from_fn(|c| Histogram::from_values(image.channel(c)))
}

/// Histogram variance `(1/256^2) * sum_i sum_j (z_i - z_j)^2 / 2`, evaluated
/// through the identity `sum_i sum_j (z_i - z_j)^2 / 2 = 256*sum z^2 - (sum z)^2`.
pub fn variance(h: &Histogram) -> f64 {
    let sum: f64 = h.counts.iter().map(|&z| z as f64).sum();
    let sum_sq: f64 = h.counts.iter().map(|&z| (z as f64) * (z as f64)).sum();
    (256.0 * sum_sq - sum * sum) / 65536.0
}

/// Chi-square statistic against the uniform distribution over 256 bins.
pub fn chi_square(h: &Histogram) -> f64 {
    let expected = h.total as f64 / 256.0;
    h.counts
        .iter()
        .map(|&z| {
            let d = z as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Critical value of chi-square with 255 degrees of freedom at the 0.05 level.
pub const CHI_SQUARE_CRITICAL_255: f64 = 293.25;

/// Shannon entropy in bits.
pub fn entropy(h: &Histogram) -> f64 {
    let n = h.total as f64;
    h.counts
        .iter()
        .filter(|&&z| z > 0)
        .map(|&z| {
            let p = z as f64 / n;
            p * (1.0 / p).log2()
        })
        .sum()
}

/// Pearson correlation of sample pairs. A zero-variance coordinate has no
/// defined coefficient and yields an `Analysis` error instead of NaN.
pub fn correlation(pairs: &[(u8, u8)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::Analysis(format!(
            "correlation needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let (sx, sy) = pairs.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| {
        (sx + x as f64, sy + y as f64)
    });
    let (ex, ey) = (sx / n, sy / n);
    let (mut dx, mut dy, mut cov) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (a, b) = (x as f64 - ex, y as f64 - ey);
        dx += a * a;
        dy += b * b;
        cov += a * b;
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::Analysis(
            "correlation undefined: zero variance".into(),
        ));
    }
    Ok(cov / (dx * dy).sqrt())
}

/// Per-channel pixel-wise correlation between two equally sized images.
pub fn image_correlation(a: &RgbImage, b: &RgbImage) -> Result<[Result<f64>; 3]> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::Analysis(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(std::array::from_fn(|c| {
        let pairs: Vec<(u8, u8)> = a.channel(c).zip(b.channel(c)).collect();
        correlation(&pairs)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_histogram() {
        let h = Histogram::from_counts([4; 256]);
        assert_eq!(variance(&h), 0.0);
        assert_eq!(chi_square(&h), 0.0);
        assert!((entropy(&h) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn single_bin() {
        let mut counts = [0; 256];
        counts[0] = 256;
        let h = Histogram::from_counts(counts);
        assert_eq!(chi_square(&h), 65280.0);
        assert_eq!(variance(&h), 255.0);
        assert_eq!(entropy(&h), 0.0);
    }

    #[test]
    fn correlation_extremes() {
        let same: Vec<(u8, u8)> = (0..=255u8).map(|x| (x, x)).collect();
        assert!((correlation(&same).unwrap() - 1.0).abs() < 1e-12);
        let flipped: Vec<(u8, u8)> = (0..=255u8).map(|x| (x, 255 - x)).collect();
        assert!((correlation(&flipped).unwrap() + 1.0).abs() < 1e-12);
        assert!(correlation(&[(3, 1), (3, 2)]).is_err());
        assert!(correlation(&[(1, 1)]).is_err());
    }

    #[test]
    fn histogram_totals() {
        let img = RgbImage::from_raw(2, 2, (0..12).collect()).unwrap();
        for h in channel_histograms(&img) {
            assert_eq!(h.total(), 4);
            assert_eq!(h.counts().iter().sum::<u64>(), 4);
        }
    }
}
