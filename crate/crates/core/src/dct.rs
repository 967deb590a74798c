use std::f64::consts::PI;

use crate::error::{IqaError, Result};
use crate::image::Plane;

/// Orthonormal DCT-II basis: `basis[u * n + i] = c(u) cos((2i + 1) u π / 2n)`.
pub(crate) fn dct_basis(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n * n];
    for u in 0..n {
        let scale = if u == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            b[u * n + i] = scale * ((2 * i + 1) as f64 * u as f64 * PI / (2 * n) as f64).cos();
        }
    }
    b
}

/// Blockwise 2-D DCT-II coefficients of a plane.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDct {
    block: usize,
    blocks_down: usize,
    blocks_across: usize,
    // block-major: each block stores block×block coefficients row-major
    coeffs: Vec<f64>,
}

impl BlockDct {
    pub fn block_size(&self) -> usize {
        self.block
    }

    /// `(blocks down, blocks across)`
    pub fn grid(&self) -> (usize, usize) {
        (self.blocks_down, self.blocks_across)
    }

    /// Coefficients of block `(bi, bj)`, row-major by `(u, v)`.
    pub fn block(&self, bi: usize, bj: usize) -> &[f64] {
        let n = self.block * self.block;
        let k = bi * self.blocks_across + bj;
        &self.coeffs[k * n..(k + 1) * n]
    }

    /// Plane of coefficient `(u, v)` gathered from every block.
    pub fn subband(&self, u: usize, v: usize) -> Plane {
        Plane::from_fn(self.blocks_down, self.blocks_across, |bi, bj| {
            self.block(bi, bj)[u * self.block + v]
        })
    }
}

/// Orthonormal DCT-II over non-overlapping `block × block` tiles; partial
/// tiles at the right and bottom borders are dropped.
pub fn dct2_blocks(plane: &Plane, block: usize) -> Result<BlockDct> {
    let (h, w) = plane.dims();
    if block == 0 || h < block || w < block {
        return Err(IqaError::TooSmall {
            what: "block DCT",
            min_height: block.max(1),
            min_width: block.max(1),
            height: h,
            width: w,
        });
    }
    let basis = dct_basis(block);
    let (bd, ba) = (h / block, w / block);
    let n = block;
    let mut coeffs = Vec::with_capacity(bd * ba * n * n);
    let mut tile = vec![0.0; n * n];
    let mut tmp = vec![0.0; n * n];
    for bi in 0..bd {
        for bj in 0..ba {
            for i in 0..n {
                tile[i * n..(i + 1) * n]
                    .copy_from_slice(&plane.row(bi * n + i)[bj * n..(bj + 1) * n]);
            }
            // rows: tmp[i][v] = Σ_j tile[i][j] basis[v][j]
            for i in 0..n {
                for v in 0..n {
                    tmp[i * n + v] = (0..n).map(|j| tile[i * n + j] * basis[v * n + j]).sum();
                }
            }
            // columns: out[u][v] = Σ_i basis[u][i] tmp[i][v]
            for u in 0..n {
                for v in 0..n {
                    coeffs.push((0..n).map(|i| basis[u * n + i] * tmp[i * n + v]).sum());
                }
            }
        }
    }
    Ok(BlockDct {
        block,
        blocks_down: bd,
        blocks_across: ba,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dct_1d(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let s: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI / n as f64 * (i as f64 + 0.5) * k as f64).cos())
                    .sum();
                s * if k == 0 {
                    (1.0 / n as f64).sqrt()
                } else {
                    (2.0 / n as f64).sqrt()
                }
            })
            .collect()
    }

    fn random_plane(h: usize, w: usize, seed: u64) -> Plane {
        let mut s = seed;
        Plane::from_fn(h, w, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        })
    }

    #[test]
    fn constant_block() {
        let d = dct2_blocks(&Plane::filled(8, 8, 0.6), 8).unwrap();
        let b = d.block(0, 0);
        assert!((b[0] - 8.0 * 0.6).abs() < 1e-12);
        assert!(b[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_separable_reference() {
        let p = random_plane(8, 8, 5);
        let rows: Vec<Vec<f64>> = (0..8).map(|r| dct_1d(p.row(r))).collect();
        let d = dct2_blocks(&p, 8).unwrap();
        for v in 0..8 {
            let col: Vec<f64> = rows.iter().map(|r| r[v]).collect();
            let out = dct_1d(&col);
            for (u, o) in out.iter().enumerate() {
                assert!((d.block(0, 0)[u * 8 + v] - o).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn energy_per_block_and_partial_tiles_dropped() {
        let p = random_plane(20, 27, 9);
        let d = dct2_blocks(&p, 8).unwrap();
        assert_eq!(d.grid(), (2, 3));
        for bi in 0..2 {
            for bj in 0..3 {
                let e_spatial: f64 = p
                    .crop(bi * 8, bj * 8, 8, 8)
                    .data()
                    .iter()
                    .map(|v| v * v)
                    .sum();
                let e_freq: f64 = d.block(bi, bj).iter().map(|v| v * v).sum();
                assert!((e_spatial - e_freq).abs() / e_spatial < 1e-5);
            }
        }
        assert_eq!(d.subband(0, 0).dims(), (2, 3));
    }

    #[test]
    fn too_small() {
        assert!(dct2_blocks(&Plane::zeros(7, 16), 8).is_err());
    }
}
