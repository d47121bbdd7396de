use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::closed::{gaussian_field, make_gc_field};
use super::hermite::make_hermite;
use crate::error::Result;
use crate::field::{GridSpec, SampledField};

/// Seed of the random members of [`standard_family`].
pub const STANDARD_SEED: u64 = 0x5EED_0064;

/// Number of seeded random members of [`standard_family`].
pub const STANDARD_RANDOM: usize = 39;

/// e^{−π t²} ≤ 1e−16 for t ≥ this.
const TAIL: f64 = 3.4;

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

/// Half-width of the two_pi frequency grid for `grid`.
fn frequency_extent(grid: &GridSpec) -> f64 {
    grid.points() as f64 / (4.0 * grid.extent())
}

/// The 64-field test family: 8 Gaussian dilations, Hermite h_0..h_7,
/// 8 members of g_c, 39 seeded random wave-packet sums and h_2 as an
/// explicit witness. Parameters adapt to the grid so every member is
/// resolved in space and under the two_pi Fourier transform.
pub fn standard_family(grid: GridSpec) -> Result<Vec<SampledField>> {
    let n = grid.dim();
    let (l, lf) = (grid.extent(), frequency_extent(&grid));
    let mut out = Vec::with_capacity(64);

    // e^{−π|λx|²} has width 1/λ in x and λ in ξ
    let center = (lf / l).sqrt();
    let lo = (TAIL / l).max(center / 2.83);
    let hi = (lf / TAIL).min(center * 2.83);
    let (lo, hi) = if lo < hi { (lo, hi) } else { (center, center * 1.0001) };
    for (i, lambda) in logspace(lo, hi, 8).into_iter().enumerate() {
        out.push(gaussian_field(lambda, grid)?.with_label(format!("gaussian-{i}")));
    }

    for k in 0..8 {
        let mut alpha = vec![0; n];
        alpha[0] = k;
        out.push(make_hermite(&alpha, grid)?.with_label(format!("hermite-{k}")));
    }

    // g_c is self-dual with widths c and 1/c on both sides
    let c_min = (TAIL / l.min(lf)).clamp(0.25, 0.9);
    for (i, c) in logspace(c_min, 1.0, 8).into_iter().enumerate() {
        out.push(make_gc_field(c, grid)?.with_label(format!("gc-{i}")));
    }

    out.extend(random_fields(grid, STANDARD_RANDOM, STANDARD_SEED, "random")?);

    let mut alpha = vec![0; n];
    alpha[0] = 2;
    out.push(make_hermite(&alpha, grid)?.with_label("witness-h2"));
    Ok(out)
}

/// Seeded random band-limited fields: sums of 2–5 Gabor atoms
/// a·e^{−π|x−x₀|²/s²}e^{2πiω·x} placed so each atom decays to 1e−16
/// inside the grid and inside its two_pi frequency grid.
pub fn random_fields(grid: GridSpec, count: usize, seed: u64, prefix: &str) -> Result<Vec<SampledField>> {
    let n = grid.dim();
    let (l, lf) = (grid.extent(), frequency_extent(&grid));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_lo = 1.25 * TAIL / lf;
    let s_hi = l / (1.25 * TAIL);
    let (s_lo, s_hi) = if s_lo < s_hi { (s_lo, s_hi) } else { let m = (s_lo * s_hi).sqrt(); (m, m) };
    (0..count)
        .map(|i| {
            let atoms = rng.random_range(2..=5);
            let spec: Vec<(Complex64, f64, Vec<f64>, Vec<f64>)> = (0..atoms)
                .map(|_| {
                    let s = (s_lo.ln() + rng.random::<f64>() * (s_hi.ln() - s_lo.ln())).exp();
                    let xr = (0.8 * (l - 1.1 * TAIL * s)).max(0.0);
                    let wr = (0.8 * (lf - 1.1 * TAIL / s)).max(0.0);
                    let x0 = (0..n).map(|_| rng.random_range(-1.0..=1.0) * xr).collect();
                    let w0 = (0..n).map(|_| rng.random_range(-1.0..=1.0) * wr).collect();
                    let a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                    (a, s, x0, w0)
                })
                .collect();
            SampledField::from_fn(grid, format!("{prefix}-{i:02}"), |x| {
                spec.iter().fold(Complex64::new(0.0, 0.0), |acc, (a, s, x0, w0)| {
                    let mut r2 = 0.0;
                    let mut ph = 0.0;
                    for d in 0..n {
                        r2 += (x[d] - x0[d]).powi(2);
                        ph += w0[d] * x[d];
                    }
                    acc + a * (-PI * r2 / (s * s)).exp() * Complex64::from_polar(1.0, 2.0 * PI * ph)
                })
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn has_sixty_four_unique_members() {
        for dim in 1..=3 {
            let fam = standard_family(GridSpec::desk(dim).unwrap()).unwrap();
            assert_eq!(fam.len(), 64);
            let mut labels: Vec<_> = fam.iter().map(|f| f.label.clone()).collect();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), 64);
        }
    }

    #[test]
    fn random_fields_are_seeded() {
        let g = GridSpec::new(1, 10.0, 256).unwrap();
        let a = random_fields(g, 3, 7, "r").unwrap();
        let b = random_fields(g, 3, 7, "r").unwrap();
        let c = random_fields(g, 3, 8, "r").unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].values(), c[0].values());
    }

    #[test]
    fn members_vanish_at_the_boundary() {
        let fam = standard_family(GridSpec::desk(1).unwrap()).unwrap();
        for f in &fam {
            assert!(f.boundary_mass() < 1e-20, "{} boundary mass {}", f.label, f.boundary_mass());
        }
    }
}
