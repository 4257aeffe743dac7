//! The two per-frame features: the fraction of skin pixels falling in the
//! hand regions (`ph`) and the first Hu moment invariant of the whole
//! skin mask (`mi`).

use crate::error::{Error, Result};
use crate::roi::RoiLayout;
use crate::segmentation::SkinMask;

/// Per-frame feature pair fed to the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Skin pixels inside the two hand regions over total crop pixels, in [0, 1].
    pub ph: f64,
    /// First Hu invariant (eta20 + eta02) of the skin mask; dispersion of
    /// the mask, invariant to translation and (asymptotically) to scale.
    pub mi: f64,
}

impl FeatureVector {
    pub fn as_point(&self) -> Vec<f64> {
        vec![self.ph, self.mi]
    }
}

/// Raw, central, and normalized moments of a binary mask.
///
/// Pixel coordinates are 1-based inside the sums; any fixed convention
/// gives identical central and normalized moments, this one is pinned for
/// test determinism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m02: f64,
    /// Centroid (x_c, y_c) in the same 1-based coordinates.
    pub centroid: (f64, f64),
    pub mu00: f64,
    pub mu20: f64,
    pub mu02: f64,
    pub eta20: f64,
    pub eta02: f64,
}

impl MomentSet {
    /// Computes all moments of the mask; fails on an empty mask.
    pub fn of_mask(mask: &SkinMask) -> Result<MomentSet> {
        let (mut m00, mut m10, mut m01, mut m20, mut m02) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for row in 0..mask.height() {
            let y = (row + 1) as f64;
            for col in 0..mask.width() {
                if mask.get(col, row) {
                    let x = (col + 1) as f64;
                    m00 += 1.0;
                    m10 += x;
                    m01 += y;
                    m20 += x * x;
                    m02 += y * y;
                }
            }
        }
        if m00 == 0.0 {
            return Err(Error::EmptyMask);
        }
        let xc = m10 / m00;
        let yc = m01 / m00;
        let mu20 = m20 - xc * m10;
        let mu02 = m02 - yc * m01;
        // eta_pq = mu_pq / mu00^(1 + (p+q)/2); order 2 gives exponent 2
        let norm = m00 * m00;
        Ok(MomentSet {
            m00,
            m10,
            m01,
            m20,
            m02,
            centroid: (xc, yc),
            mu00: m00,
            mu20,
            mu02,
            eta20: mu20 / norm,
            eta02: mu02 / norm,
        })
    }
}

/// Raw moment m_pq = sum of x^p y^q over set pixels, 1-based coordinates.
pub fn raw_moment(mask: &SkinMask, p: u32, q: u32) -> f64 {
    let mut m = 0.0;
    for row in 0..mask.height() {
        let y = (row + 1) as f64;
        for col in 0..mask.width() {
            if mask.get(col, row) {
                let x = (col + 1) as f64;
                m += x.powi(p as i32) * y.powi(q as i32);
            }
        }
    }
    m
}

/// Central moment mu_pq = sum of (x - x_c)^p (y - y_c)^q over set pixels.
pub fn central_moment(mask: &SkinMask, p: u32, q: u32) -> Result<f64> {
    let m00 = raw_moment(mask, 0, 0);
    if m00 == 0.0 {
        return Err(Error::EmptyMask);
    }
    let xc = raw_moment(mask, 1, 0) / m00;
    let yc = raw_moment(mask, 0, 1) / m00;
    let mut mu = 0.0;
    for row in 0..mask.height() {
        let y = (row + 1) as f64;
        for col in 0..mask.width() {
            if mask.get(col, row) {
                let x = (col + 1) as f64;
                mu += (x - xc).powi(p as i32) * (y - yc).powi(q as i32);
            }
        }
    }
    Ok(mu)
}

/// First Hu invariant eta20 + eta02 of the mask.
pub fn moment_of_inertia(mask: &SkinMask) -> Result<f64> {
    let m = MomentSet::of_mask(mask)?;
    Ok(m.eta20 + m.eta02)
}

/// Fraction of crop pixels that are skin inside the two hand regions.
pub fn hand_fraction(mask: &SkinMask, layout: &RoiLayout) -> f64 {
    let r1 = mask.count_true_in(layout.hand_region_1);
    let r2 = mask.count_true_in(layout.hand_region_2);
    (r1 + r2) as f64 / (mask.width() * mask.height()) as f64
}

/// Feature pair for one segmented frame. An empty mask cannot carry a
/// dispersion value, so it yields (0, 0) with the flag set instead of an
/// error; such frames are segmentation failures the caller may exclude.
pub fn frame_features(mask: &SkinMask, layout: &RoiLayout) -> (FeatureVector, bool) {
    match moment_of_inertia(mask) {
        Ok(mi) => (
            FeatureVector {
                ph: hand_fraction(mask, layout),
                mi,
            },
            false,
        ),
        Err(_) => (FeatureVector { ph: 0.0, mi: 0.0 }, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roi::{layout_for_crop, Rect};
    use proptest::prelude::*;

    fn mask_with(w: usize, h: usize, set: &[(usize, usize)]) -> SkinMask {
        let mut m = SkinMask::new(w, h);
        for &(x, y) in set {
            m.set(x, y, true);
        }
        m
    }

    fn solid_block(w: usize, h: usize, r: Rect) -> SkinMask {
        let mut m = SkinMask::new(w, h);
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                m.set(x, y, true);
            }
        }
        m
    }

    #[test]
    fn raw_moments_of_single_pixel() {
        // pixel at column 2, row 4 is (x=3, y=5) in 1-based coordinates
        let m = mask_with(8, 8, &[(2, 4)]);
        assert_eq!(raw_moment(&m, 0, 0), 1.0);
        assert_eq!(raw_moment(&m, 1, 0), 3.0);
        assert_eq!(raw_moment(&m, 0, 1), 5.0);
    }

    #[test]
    fn raw_moments_of_empty_mask_are_zero() {
        let m = SkinMask::new(4, 4);
        for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)] {
            assert_eq!(raw_moment(&m, p, q), 0.0);
        }
        assert!(central_moment(&m, 2, 0).is_err());
        assert!(moment_of_inertia(&m).is_err());
    }

    #[test]
    fn raw_moments_add() {
        let m = mask_with(4, 4, &[(0, 0), (2, 0)]);
        assert_eq!(raw_moment(&m, 1, 0), 1.0 + 3.0);
    }

    #[test]
    fn central_moments_of_single_pixel_vanish() {
        let m = mask_with(6, 6, &[(3, 2)]);
        assert_eq!(central_moment(&m, 2, 0).unwrap(), 0.0);
        assert_eq!(central_moment(&m, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn central_moments_of_horizontal_pair() {
        // pixels (x=1,y=1) and (x=3,y=1): centroid x=2, mu20 = 1+1
        let m = mask_with(4, 4, &[(0, 0), (2, 0)]);
        assert_eq!(central_moment(&m, 2, 0).unwrap(), 2.0);
        assert_eq!(central_moment(&m, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn moments_are_translation_invariant_bit_exact() {
        let base = solid_block(32, 32, Rect::new(2, 3, 7, 5));
        let moved = solid_block(32, 32, Rect::new(14, 19, 7, 5));
        assert_eq!(
            moment_of_inertia(&base).unwrap(),
            moment_of_inertia(&moved).unwrap()
        );
        assert_eq!(
            central_moment(&base, 2, 0).unwrap(),
            central_moment(&moved, 2, 0).unwrap()
        );
    }

    #[test]
    fn solid_square_mi_approaches_one_sixth() {
        let m = solid_block(200, 200, Rect::new(0, 0, 200, 200));
        let mi = moment_of_inertia(&m).unwrap();
        assert!((mi - 1.0 / 6.0).abs() < 1e-3, "mi = {mi}");
    }

    #[test]
    fn mi_is_scale_invariant_up_to_discretization() {
        let small = solid_block(64, 64, Rect::new(8, 8, 30, 20));
        let big = solid_block(128, 128, Rect::new(16, 16, 60, 40));
        let a = moment_of_inertia(&small).unwrap();
        let b = moment_of_inertia(&big).unwrap();
        assert!((a - b).abs() < 1e-2, "{a} vs {b}");
    }

    #[test]
    fn moment_set_matches_naive_double_loop() {
        let mask = {
            let mut m = solid_block(40, 30, Rect::new(5, 4, 18, 11));
            // poke a few holes so the shape is not trivial
            m.set(9, 7, false);
            m.set(14, 9, false);
            m
        };
        let fast = MomentSet::of_mask(&mask).unwrap();
        let mu20 = central_moment(&mask, 2, 0).unwrap();
        let mu02 = central_moment(&mask, 0, 2).unwrap();
        assert!((fast.mu20 - mu20).abs() <= 1e-12 * mu20.abs());
        assert!((fast.mu02 - mu02).abs() <= 1e-12 * mu02.abs());
        assert_eq!(fast.mu00, fast.m00);
        assert_eq!(fast.centroid.0, fast.m10 / fast.m00);
    }

    #[test]
    fn hand_fraction_of_full_mask() {
        let layout = layout_for_crop(100, 100).unwrap();
        let full = solid_block(100, 100, Rect::new(0, 0, 100, 100));
        assert_eq!(hand_fraction(&full, &layout), 0.125);
        let empty = SkinMask::new(100, 100);
        assert_eq!(hand_fraction(&empty, &layout), 0.0);
    }

    #[test]
    fn hand_fraction_of_one_full_region() {
        let layout = layout_for_crop(100, 100).unwrap();
        let m = solid_block(100, 100, layout.hand_region_1);
        assert_eq!(hand_fraction(&m, &layout), 0.0625);
    }

    #[test]
    fn empty_mask_yields_zero_features_with_flag() {
        let layout = layout_for_crop(20, 20).unwrap();
        let (fv, empty) = frame_features(&SkinMask::new(20, 20), &layout);
        assert!(empty);
        assert_eq!(fv.ph, 0.0);
        assert_eq!(fv.mi, 0.0);
    }

    proptest! {
        #[test]
        fn hand_fraction_monotone_under_added_pixels(
            xs in proptest::collection::vec((0usize..40, 0usize..40), 1..30)
        ) {
            let layout = layout_for_crop(40, 40).unwrap();
            let mut mask = SkinMask::new(40, 40);
            let mut last = hand_fraction(&mask, &layout);
            for (x, y) in xs {
                let before = last;
                let in_hands = layout.hand_region_1.intersects(&Rect::new(x, y, 1, 1))
                    || layout.hand_region_2.intersects(&Rect::new(x, y, 1, 1));
                let was_set = mask.get(x, y);
                mask.set(x, y, true);
                last = hand_fraction(&mask, &layout);
                if was_set {
                    prop_assert_eq!(last, before);
                } else if in_hands {
                    prop_assert!(last >= before);
                } else {
                    prop_assert!(last <= before);
                }
            }
        }
    }
}
