//! Deterministic test images and distortions.
//!
//! These stand in for natural photographs in tests, benchmarks and demos:
//! smooth shading, hard-edged shapes, oriented texture and mild grain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::image::{Image, Plane};

/// A natural-looking scene of the given size; `channels` is 1 or 3.
pub fn natural(height: usize, width: usize, channels: usize) -> Image {
    natural_seeded(height, width, channels, 7)
}

/// [`natural`] with a different scene layout per `seed`.
pub fn natural_seeded(height: usize, width: usize, channels: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (hf, wf) = (height as f64, width as f64);

    struct Shape {
        cy: f64,
        cx: f64,
        ry: f64,
        rx: f64,
        disk: bool,
        color: [f64; 3],
    }
    let shapes: Vec<Shape> = (0..6)
        .map(|_| Shape {
            cy: rng.random_range(0.1..0.9) * hf,
            cx: rng.random_range(0.1..0.9) * wf,
            ry: rng.random_range(0.08..0.25) * hf,
            rx: rng.random_range(0.08..0.25) * wf,
            disk: rng.random_bool(0.5),
            color: [
                rng.random_range(0.1..0.9),
                rng.random_range(0.1..0.9),
                rng.random_range(0.1..0.9),
            ],
        })
        .collect();
    let freq = [rng.random_range(0.15..0.35), rng.random_range(0.05..0.15)];
    let tint = [
        rng.random_range(0.3..0.7),
        rng.random_range(0.3..0.7),
        rng.random_range(0.3..0.7),
    ];

    let grain: Vec<f64> = {
        let raw: Vec<f64> = (0..height * width)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        // cheap low-pass so the grain is correlated like film noise
        (0..height * width)
            .map(|k| {
                let (r, c) = (k / width, k % width);
                let mut s = 0.0;
                let mut n = 0.0;
                for dr in 0..2 {
                    for dc in 0..2 {
                        if r + dr < height && c + dc < width {
                            s += raw[(r + dr) * width + c + dc];
                            n += 1.0;
                        }
                    }
                }
                s / n
            })
            .collect()
    };

    let mut planes = Vec::with_capacity(channels);
    for ch in 0..channels {
        let phase = ch as f64 * 0.7;
        let plane = Plane::from_fn(height, width, |r, c| {
            let (y, x) = (r as f64, c as f64);
            let mut v = 0.25 + 0.35 * (x / wf) * tint[ch % 3] + 0.2 * (y / hf);
            for s in &shapes {
                let dy = (y - s.cy) / s.ry;
                let dx = (x - s.cx) / s.rx;
                let inside = if s.disk {
                    dy * dy + dx * dx <= 1.0
                } else {
                    dy.abs() <= 1.0 && dx.abs() <= 1.0
                };
                if inside {
                    v = 0.5 * v + 0.5 * s.color[ch % 3];
                }
            }
            v += 0.06 * (x * freq[0] + phase).sin() * (y * freq[1]).cos();
            v += 0.015 * grain[r * width + c];
            v.clamp(0.0, 1.0)
        });
        planes.push(plane);
    }
    Image::from_planes(planes).expect("synthetic image is in range")
}

/// Adds clamped i.i.d. Gaussian noise with standard deviation `sigma`.
///
/// The same `seed` reuses one noise field, so increasing `sigma` only scales it.
pub fn with_gaussian_noise(img: &Image, sigma: f64, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes = img
        .planes()
        .iter()
        .map(|p| {
            let data = p
                .data()
                .iter()
                .map(|v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (v + sigma * z).clamp(0.0, 1.0)
                })
                .collect();
            Plane::new(p.height(), p.width(), data).expect("same shape")
        })
        .collect();
    Image::from_planes(planes).expect("clamped")
}

/// Uniform white-noise image.
pub fn uniform_noise(height: usize, width: usize, channels: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..height * width * channels)
        .map(|_| rng.random::<f64>())
        .collect();
    Image::new(height, width, channels, data).expect("uniform samples are in range")
}

/// Checkerboard of `cell`-pixel squares alternating 0 and 1.
pub fn checkerboard(height: usize, width: usize, channels: usize, cell: usize) -> Image {
    let plane = Plane::from_fn(height, width, |r, c| ((r / cell + c / cell) % 2) as f64);
    Image::from_planes(vec![plane; channels]).expect("binary samples")
}

/// Horizontal ramp from 0 at the left edge to 1 at the right edge, with a
/// vertical tilt in the green channel of RGB output.
pub fn gradient(height: usize, width: usize, channels: usize) -> Image {
    let planes = (0..channels)
        .map(|ch| {
            Plane::from_fn(height, width, |r, c| {
                let x = c as f64 / (width.max(2) - 1) as f64;
                let y = r as f64 / (height.max(2) - 1) as f64;
                if ch == 1 {
                    0.5 * (x + y)
                } else {
                    x
                }
            })
        })
        .collect();
    Image::from_planes(planes).expect("ramp samples")
}

/// Gray image with every channel equal to the source luma.
pub fn grayscale_rgb(img: &Image) -> Image {
    let luma = img.luma();
    Image::from_planes(vec![luma.clone(), luma.clone(), luma]).expect("luma is in range")
}
