//! Per-dimension min-max scaling of feature vectors.
//!
//! The two features live on very different ranges (hand fraction tops out
//! around 0.125, the dispersion moment sits near 0.17), so kernels that
//! mix axes need them normalized. Fitting happens on the training fold
//! only; the same affine map is applied at prediction time.

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl MinMaxScaler {
    /// Learns per-dimension min and range from the given points.
    pub fn fit(points: &[Vec<f64>]) -> MinMaxScaler {
        let dims = points.first().map_or(0, Vec::len);
        let mut mins = vec![f64::INFINITY; dims];
        let mut maxs = vec![f64::NEG_INFINITY; dims];
        for p in points {
            for (d, &v) in p.iter().enumerate() {
                mins[d] = mins[d].min(v);
                maxs[d] = maxs[d].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        MinMaxScaler { mins, ranges }
    }

    pub fn from_parts(mins: Vec<f64>, ranges: Vec<f64>) -> MinMaxScaler {
        MinMaxScaler { mins, ranges }
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    pub fn dims(&self) -> usize {
        self.mins.len()
    }

    /// Maps a point into the unit box; a constant dimension maps to 0.
    /// Values outside the fitted range extrapolate linearly.
    pub fn transform(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .enumerate()
            .map(|(d, &v)| {
                if self.ranges[d] > 0.0 {
                    (v - self.mins[d]) / self.ranges[d]
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform_all(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points.iter().map(|p| self.transform(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_training_extremes_to_unit_interval() {
        let pts = vec![vec![2.0, 10.0], vec![4.0, 30.0], vec![3.0, 20.0]];
        let s = MinMaxScaler::fit(&pts);
        assert_eq!(s.transform(&[2.0, 10.0]), vec![0.0, 0.0]);
        assert_eq!(s.transform(&[4.0, 30.0]), vec![1.0, 1.0]);
        assert_eq!(s.transform(&[3.0, 20.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn constant_dimension_maps_to_zero() {
        let pts = vec![vec![5.0, 1.0], vec![5.0, 2.0]];
        let s = MinMaxScaler::fit(&pts);
        assert_eq!(s.transform(&[5.0, 1.5])[0], 0.0);
        assert_eq!(s.transform(&[99.0, 1.5])[0], 0.0);
    }

    #[test]
    fn out_of_range_points_extrapolate() {
        let pts = vec![vec![0.0], vec![2.0]];
        let s = MinMaxScaler::fit(&pts);
        assert_eq!(s.transform(&[4.0]), vec![2.0]);
        assert_eq!(s.transform(&[-2.0]), vec![-1.0]);
    }
}
