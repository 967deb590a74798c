use super::{check_pair, FrScore};
use crate::error::Result;
use crate::image::Image;

/// Score of identical images: the MSE is floored at 1e-10.
pub const PSNR_CAP: f64 = 100.0;

/// Peak signal-to-noise ratio on luma, in dB.
pub fn psnr(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "PSNR", 1)?;
    let (x, y) = (reference.luma(), distorted.luma());
    let mse = x
        .data()
        .iter()
        .zip(y.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    let range = reference.data_range();
    FrScore::checked(
        10.0 * (range * range / mse.max(1e-10)).log10(),
        PSNR_CAP,
        true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_hits_cap() {
        let img = Image::constant(4, 4, 3, 0.3).unwrap();
        assert_eq!(psnr(&img, &img).unwrap().value, PSNR_CAP);
    }

    #[test]
    fn constant_pair_closed_form() {
        let a = Image::constant(8, 8, 1, 0.0).unwrap();
        let b = Image::constant(8, 8, 1, 0.5).unwrap();
        let v = psnr(&a, &b).unwrap().value;
        assert!((v - 10.0 * 4f64.log10()).abs() < 1e-12);
        assert!((v - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn mismatch() {
        let a = Image::constant(8, 8, 1, 0.0).unwrap();
        let b = Image::constant(8, 9, 1, 0.0).unwrap();
        assert!(psnr(&a, &b).is_err());
    }
}
