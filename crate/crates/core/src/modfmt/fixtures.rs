//! Bundled constellations.

use super::constellation::Constellation;
use super::file::parse_constellation;

const PRS64_4D: &str = include_str!("../../data/4d-64prs.txt");

/// The 64-point ring-switched 4D constellation used as the 8D base.
pub fn prs64_4d() -> Constellation {
    parse_constellation(PRS64_4D).expect("bundled constellation parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_constellation_is_valid() {
        let c = prs64_4d();
        assert_eq!(c.len(), 64);
        assert_eq!(c.dimension(), 4);
        assert!((c.mean_energy() - 1.0).abs() < 1e-12);
    }
}
