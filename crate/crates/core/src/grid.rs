use crate::error::{Error, Result};

/// Uniform time grid starting at zero. Every path, kernel table and stepper in
/// a run shares one of these; there is no interpolation between grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, len: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if len == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Ok(Self { dt, len })
    }

    /// Grid covering `[0, t_final]`: `round(t_final / dt) + 1` points.
    pub fn covering(dt: f64, t_final: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_final must be non-negative, got {t_final}"
            )));
        }
        let steps = (t_final / dt).round();
        if !steps.is_finite() || steps > 1e9 {
            return Err(Error::InvalidGrid(format!("too many steps for dt = {dt}")));
        }
        Self::new(dt, steps as usize + 1)
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t(self.len - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.t(i))
    }

    /// Exact (bitwise) equality of step and length.
    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.dt.to_bits() == other.dt.to_bits() && self.len == other.len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_counts_endpoints() {
        let g = TimeGrid::covering(1e-4, 3.0).unwrap();
        assert_eq!(g.len(), 30_001);
        assert!((g.t_final() - 3.0).abs() < 1e-12);
        assert_eq!(g.t(0), 0.0);
    }

    #[test]
    fn rejects_bad_step() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert!(TimeGrid::new(f64::NAN, 10).is_err());
        assert!(TimeGrid::new(0.1, 0).is_err());
    }
}
