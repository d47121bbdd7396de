use crate::error::{Error, Result};
use crate::families::{falpha_radii, Family};
use crate::field::{Exponent, GridSpec};

/// Largest one-axis point count the drivers will allocate.
pub const MAX_AXIS_POINTS: usize = 1 << 22;

/// Largest total point count for multi-dimensional auto grids.
pub const MAX_TOTAL_POINTS: usize = 1 << 24;

/// Point count used for f_α grids.
pub const FALPHA_POINTS: usize = 1024;

/// One-axis grid for Hermite functions paired with their 2π-convention
/// transforms, k ≤ 64.
///
/// ĥ_k(ξ) = √(2π)(−i)^k h_k(2πξ) oscillates with period about
/// 1/√(2k+1) ≈ 0.09 at k = 64. The desk grid's frequency spacing
/// 1/(2L) = 0.025 under-resolves it, so L = 64 (spacing 0.0078 in both x
/// and ξ, x-reach 64 ≫ √129, ξ-reach 64).
pub fn hermite_grid() -> Result<GridSpec> {
    GridSpec::new(1, 64.0, 16384)
}

/// Reach in units of the Gaussian width needed for g_c under an L^q norm.
fn gc_reach(q: Option<Exponent>) -> f64 {
    match q {
        Some(Exponent::Finite(v)) => f64::max(3.5, 2.5 * v.sqrt()),
        _ => 3.5,
    }
}

/// One-axis point count for g_c on a self-dual grid (L = √N/2, so the
/// 2π-convention transform maps the grid onto itself, with h = 1/(2L)).
///
/// g_c has widths c and 1/c at once: L ≥ a/c covers the wide summand and
/// h = 1/(2L) ≤ c/(2a) resolves the narrow one, so N = 4L² grows like 1/c².
pub fn gc_axis_points(c: f64, q: Option<Exponent>) -> Result<usize> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let a = gc_reach(q);
    let l = a / c.min(1.0 / c);
    let need = (4.0 * l * l).ceil();
    if need > MAX_AXIS_POINTS as f64 {
        return Err(Error::GridTooSmall(format!(
            "g_c with c = {c} needs {need} points per axis, above the cap {MAX_AXIS_POINTS} (c ≥ {:.3e})",
            a / (MAX_AXIS_POINTS as f64).sqrt() * 2.0
        )));
    }
    Ok((need as usize).next_power_of_two().max(64))
}

/// Self-dual grid for g_c in `dim` dimensions.
pub fn gc_grid(dim: usize, c: f64, q: Option<Exponent>) -> Result<GridSpec> {
    let n = gc_axis_points(c, q)?;
    let total = (n as f64).powi(dim as i32);
    if total > MAX_TOTAL_POINTS as f64 {
        return Err(Error::GridTooSmall(format!(
            "g_c with c = {c} in {dim}-D needs {n}^{dim} points, above the cap {MAX_TOTAL_POINTS}"
        )));
    }
    GridSpec::new(dim, (n as f64).sqrt() / 2.0, n)
}

/// Grid holding the f_α annulus with a 2% margin.
pub fn falpha_grid(alpha: f64) -> Result<GridSpec> {
    let (_, r1) = falpha_radii(alpha);
    GridSpec::new(2, 1.02 * r1, FALPHA_POINTS)
}

/// Working grid for a family member; `q` is the largest norm exponent in use.
pub fn auto_grid(family: &Family, q: Option<Exponent>) -> Result<GridSpec> {
    match family {
        Family::Hermite { index } => GridSpec::desk(index.len()),
        Family::Gaussian { dim, lambda } => GridSpec::desk(*dim)?.dilated(*lambda),
        Family::Gc { dim, c } => gc_grid(*dim, *c, q),
        Family::Falpha { alpha } => falpha_grid(*alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_dual_extent() {
        let g = gc_grid(1, 0.1, None).unwrap();
        assert!((g.extent() * g.extent() * 4.0 - g.points() as f64).abs() < 1e-9);
        assert!(g.extent() >= 35.0);
        assert!((g.spacing() * g.extent() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_c_same_grid() {
        assert_eq!(gc_axis_points(0.2, None).unwrap(), gc_axis_points(5.0, None).unwrap());
    }

    #[test]
    fn hermite_grid_resolves_both_sides() {
        let g = hermite_grid().unwrap();
        let period = 1.0 / (129f64).sqrt();
        assert!(period / (1.0 / (2.0 * g.extent())) > 10.0);
        assert!(g.points() as f64 / (4.0 * g.extent()) > 129f64.sqrt() / (2.0 * std::f64::consts::PI) + 1.0);
    }

    #[test]
    fn cap_is_named() {
        let e = gc_grid(1, 1e-4, None).unwrap_err();
        assert!(matches!(e, Error::GridTooSmall(_)));
        assert!(gc_grid(3, 0.01, None).is_err());
    }
}
