use iqkit::synthetic::{grayscale_rgb, natural, natural_seeded, with_gaussian_noise};
use iqkit::{Image, MetricContext, MetricId, MetricKind};

fn full_reference() -> impl Iterator<Item = MetricId> {
    MetricId::ALL
        .into_iter()
        .filter(|m| m.kind() == MetricKind::FullReference)
}

fn score(m: MetricId, a: &Image, b: &Image) -> f64 {
    m.compute(Some(a), b, &MetricContext::default())
        .unwrap_or_else(|e| panic!("{m}: {e}"))
}

#[test]
fn scores_stay_in_range() {
    let a = natural(192, 192, 3);
    let pairs = [
        with_gaussian_noise(&a, 0.1, 1),
        natural_seeded(192, 192, 3, 99),
    ];
    for m in full_reference().filter(|&m| m != MetricId::Psnr) {
        for b in &pairs {
            let v = score(m, &a, b);
            if m.higher_is_better() {
                assert!((-1e-12..=1.0 + 1e-6).contains(&v), "{m} = {v}");
            } else {
                assert!(v >= 0.0, "{m} = {v}");
            }
        }
    }
}

#[test]
fn symmetric_metrics_are_symmetric() {
    let a = natural(192, 192, 3);
    let b = with_gaussian_noise(&natural_seeded(192, 192, 3, 4), 0.05, 2);
    for m in [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::MsSsim,
        MetricId::Gmsd,
        MetricId::MsGmsd,
        MetricId::MsGmsdc,
        MetricId::HaarPsi,
        MetricId::Fsim,
    ] {
        let (ab, ba) = (score(m, &a, &b), score(m, &b, &a));
        assert!((ab - ba).abs() < 1e-6, "{m}: {ab} vs {ba}");
    }
}

#[test]
fn directional_metrics_have_an_asymmetric_witness() {
    let a = natural(192, 192, 1);
    let b = with_gaussian_noise(&a, 0.1, 3);
    for m in [MetricId::Vifp, MetricId::IwSsim] {
        let (ab, ba) = (score(m, &a, &b), score(m, &b, &a));
        assert!((ab - ba).abs() > 1e-4, "{m}: {ab} vs {ba}");
    }
}

#[test]
fn chromatic_variants_match_on_gray_input() {
    let a = grayscale_rgb(&natural(160, 160, 3));
    let b = grayscale_rgb(&with_gaussian_noise(&natural(160, 160, 3), 0.08, 5));
    for (color, luma) in [
        (MetricId::MsGmsdc, MetricId::MsGmsd),
        (MetricId::Fsimc, MetricId::Fsim),
        (MetricId::SrSimc, MetricId::SrSim),
    ] {
        let (c, l) = (score(color, &a, &b), score(luma, &a, &b));
        assert!((c - l).abs() < 1e-6, "{color} {c} vs {luma} {l}");
    }
}

#[test]
fn rgb_and_single_channel_gray_agree_for_luma_metrics() {
    let a1 = natural(128, 128, 1);
    let b1 = with_gaussian_noise(&a1, 0.05, 8);
    let rgb = |img: &Image| Image::from_planes(vec![img.plane(0).clone(); 3]).unwrap();
    for m in [
        MetricId::Gmsd,
        MetricId::Vifp,
        MetricId::Dss,
        MetricId::HaarPsi,
    ] {
        let gray = score(m, &a1, &b1);
        let color = score(m, &rgb(&a1), &rgb(&b1));
        assert!((gray - color).abs() < 1e-9, "{m}: {gray} vs {color}");
    }
}

#[test]
fn mismatched_shapes_are_rejected() {
    let a = natural(64, 64, 3);
    let b = natural(64, 72, 3);
    for m in full_reference() {
        assert!(
            m.compute(Some(&a), &b, &MetricContext::default()).is_err(),
            "{m}"
        );
    }
}
