//! Closed-form parameters of the tree-length dynamic program.

use crate::error::{Error, Result};

fn pow(base: u64, exp: u64, what: &'static str) -> Result<u64> {
    let exp = u32::try_from(exp).map_err(|_| Error::Overflow(what))?;
    base.checked_pow(exp).ok_or(Error::Overflow(what))
}

/// `2(Δ^ℓ(Δ+2)+4)`: how many bags along one tree path can share a vertex.
pub fn alpha(delta: u64, ell: u64) -> Result<u64> {
    if delta < 1 || ell < 1 {
        return Err(Error::Contract(format!("alpha needs Δ >= 1 and ℓ >= 1, got ({delta}, {ell})")));
    }
    const W: &str = "alpha";
    let inner = pow(delta, ell, W)?
        .checked_mul(delta + 2)
        .and_then(|x| x.checked_add(4))
        .and_then(|x| x.checked_mul(2));
    inner.ok_or(Error::Overflow(W))
}

/// `Δ(Δ-1)^(ℓ-1)`: width bound for a decomposition of length `ℓ`.
pub fn width_bound(delta: u64, ell: u64) -> Result<u64> {
    if delta < 2 || ell < 1 {
        return Err(Error::Contract(format!("width_bound needs Δ >= 2 and ℓ >= 1, got ({delta}, {ell})")));
    }
    pow(delta - 1, ell - 1, "width_bound")?.checked_mul(delta).ok_or(Error::Overflow("width_bound"))
}

/// `s = alpha(Δ, ℓ)(2ℓ+1)`.
pub fn locality_radius(delta: u64, ell: u64) -> Result<u64> {
    alpha(delta, ell)?.checked_mul(2 * ell + 1).ok_or(Error::Overflow("locality_radius"))
}

/// Smallest `k >= 1` with `Δ <= 3^k - 1`.
pub fn degree_lower_bound(max_degree: usize) -> usize {
    (1..).find(|&k| crate::oracle::neighbour_bound_holds(max_degree, k)).expect("bound holds for large k")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        assert_eq!(alpha(3, 1), Ok(38));
        assert_eq!(alpha(2, 1), Ok(24));
        assert_eq!(alpha(3, 2), Ok(98));
        assert_eq!(width_bound(3, 1), Ok(3));
        assert_eq!(width_bound(3, 2), Ok(6));
        assert_eq!(width_bound(2, 5), Ok(2));
        assert_eq!(locality_radius(3, 1), Ok(114));
        assert_eq!(locality_radius(2, 1), Ok(72));
        assert_eq!(locality_radius(3, 2), Ok(490));
    }

    #[test]
    fn independent_evaluation() {
        for delta in 1..6u64 {
            for ell in 1..5u64 {
                let a = 2 * (delta.pow(ell as u32) * (delta + 2) + 4);
                assert_eq!(alpha(delta, ell).unwrap(), a);
                assert_eq!(locality_radius(delta, ell).unwrap(), a * (2 * ell + 1));
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(alpha(0, 1), Err(Error::Contract(_))));
        assert!(matches!(alpha(3, 0), Err(Error::Contract(_))));
        assert!(matches!(width_bound(1, 1), Err(Error::Contract(_))));
        assert_eq!(alpha(1000, 40), Err(Error::Overflow("alpha")));
        assert!(locality_radius(u64::MAX / 4, 1).is_err());
    }

    #[test]
    fn lower_bound() {
        assert_eq!(degree_lower_bound(0), 1);
        assert_eq!(degree_lower_bound(2), 1);
        assert_eq!(degree_lower_bound(3), 2);
        assert_eq!(degree_lower_bound(8), 2);
        assert_eq!(degree_lower_bound(9), 3);
    }
}
