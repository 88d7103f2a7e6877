use crate::ir::{BoundingBox, GrayMatrix, ImageRef};

use super::{ImageComparator, MetricError, SensitiveErrorConfig};

/// Intersection area over union area. Identical boxes give 1 even when
/// degenerate; distinct boxes with zero union give 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    if a == b {
        return 1.0;
    }
    let inter = a.intersection(b).map_or(0, |r| r.area());
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return 0.0;
    }
    inter as f64 / union as f64
}

fn check_dims(a: &GrayMatrix, b: &GrayMatrix) -> Result<(), MetricError> {
    if a.dims() != b.dims() {
        return Err(MetricError::DimensionMismatch {
            left: a.dims(),
            right: b.dims(),
        });
    }
    Ok(())
}

/// Mean squared pixel difference.
pub fn mse(a: &GrayMatrix, b: &GrayMatrix) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.data().len() as f64)
}

/// Whole-image structural similarity with `c1 = (k1 L)^2`, `c2 = (k2 L)^2`
/// and population (co)variances.
pub fn ssim(a: &GrayMatrix, b: &GrayMatrix, cfg: &SensitiveErrorConfig) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    let n = a.data().len() as f64;
    let mean_a = a.data().iter().sum::<f64>() / n;
    let mean_b = b.data().iter().sum::<f64>() / n;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    var_a /= n;
    var_b /= n;
    cov /= n;

    let c1 = (cfg.ssim_k1 * cfg.ssim_dynamic_range).powi(2);
    let c2 = (cfg.ssim_k2 * cfg.ssim_dynamic_range).powi(2);
    let num = (2.0 * mean_a * mean_b + c1) * (2.0 * cov + c2);
    let den = (mean_a * mean_a + mean_b * mean_b + c1) * (var_a + var_b + c2);
    Ok(num / den)
}

/// 0 when the candidate image matches the gold one under the configured
/// comparator, 1 otherwise.
pub fn image_arg_error(arg: &ImageRef, gold: &ImageRef, cfg: &SensitiveErrorConfig) -> Result<u8, MetricError> {
    let ok = match cfg.image_comparator {
        ImageComparator::Iou => {
            let (Some(a), Some(b)) = (arg.bounding_box, gold.bounding_box) else {
                return Err(MetricError::MissingImageData {
                    comparator: ImageComparator::Iou,
                    what: "bounding boxes",
                });
            };
            iou(&a, &b) > cfg.iou_threshold
        }
        comparator @ (ImageComparator::Mse | ImageComparator::Ssim) => {
            let (Some(a), Some(b)) = (&arg.pixels, &gold.pixels) else {
                return Err(MetricError::MissingImageData { comparator, what: "pixels" });
            };
            if comparator == ImageComparator::Mse {
                mse(a, b)? <= cfg.mse_threshold
            } else {
                ssim(a, b, cfg)? >= cfg.ssim_threshold
            }
        }
    };
    Ok(u8::from(!ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1).unwrap()
    }

    fn cfg(comparator: ImageComparator) -> SensitiveErrorConfig {
        SensitiveErrorConfig {
            image_comparator: comparator,
            ..Default::default()
        }
    }

    #[test]
    fn iou_cases() {
        assert_eq!(iou(&bb(0, 0, 2, 2), &bb(0, 0, 2, 2)), 1.0);
        assert_eq!(iou(&bb(0, 0, 2, 2), &bb(5, 5, 6, 6)), 0.0);
        // Intersection 1, union 4 + 4 - 1.
        assert!((iou(&bb(0, 0, 2, 2), &bb(1, 1, 3, 3)) - 1.0 / 7.0).abs() < 1e-12);
        // Touching edges share no area.
        assert_eq!(iou(&bb(0, 0, 2, 2), &bb(2, 0, 4, 2)), 0.0);
        assert_eq!(iou(&bb(1, 1, 1, 1), &bb(1, 1, 1, 1)), 1.0);
        assert_eq!(iou(&bb(1, 1, 1, 1), &bb(2, 2, 2, 2)), 0.0);
        assert_eq!(iou(&bb(0, 0, 4, 4), &bb(1, 1, 3, 3)), 0.25);
    }

    #[test]
    fn mse_cases() {
        let zeros = GrayMatrix::filled(2, 2, 0.0).unwrap();
        let ones = GrayMatrix::filled(2, 2, 1.0).unwrap();
        assert_eq!(mse(&zeros, &zeros).unwrap(), 0.0);
        assert_eq!(mse(&zeros, &ones).unwrap(), 1.0);
        let spike = GrayMatrix::from_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(mse(&spike, &zeros).unwrap(), 1.0);
        let wide = GrayMatrix::filled(1, 4, 0.0).unwrap();
        assert!(matches!(mse(&zeros, &wide), Err(MetricError::DimensionMismatch { .. })));
    }

    #[test]
    fn ssim_cases() {
        let c = SensitiveErrorConfig::default();
        let img = GrayMatrix::from_rows(&[&[10.0, 200.0], &[30.0, 90.0]]).unwrap();
        assert!((ssim(&img, &img, &c).unwrap() - 1.0).abs() < 1e-12);
        let hundred = GrayMatrix::filled(3, 3, 100.0).unwrap();
        assert!((ssim(&hundred, &hundred, &c).unwrap() - 1.0).abs() < 1e-12);

        let black = GrayMatrix::filled(4, 4, 0.0).unwrap();
        let white = GrayMatrix::filled(4, 4, 255.0).unwrap();
        let c1 = (0.01f64 * 255.0).powi(2);
        let expected = c1 / (255.0 * 255.0 + c1);
        assert!((ssim(&black, &white, &c).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 9.9991e-5).abs() < 1e-8);
    }

    #[test]
    fn image_arg_error_by_comparator() {
        let a = ImageRef::new("a.png").with_bounding_box(bb(0, 0, 2, 2));
        assert_eq!(image_arg_error(&a, &a, &cfg(ImageComparator::Iou)).unwrap(), 0);
        let b = ImageRef::new("b.png").with_bounding_box(bb(1, 1, 3, 3));
        assert_eq!(image_arg_error(&a, &b, &cfg(ImageComparator::Iou)).unwrap(), 1);

        let px = GrayMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let p = ImageRef::new("p.png").with_pixels(px.clone());
        assert_eq!(image_arg_error(&p, &p, &cfg(ImageComparator::Ssim)).unwrap(), 0);
        assert_eq!(image_arg_error(&p, &p, &cfg(ImageComparator::Mse)).unwrap(), 0);

        let far = ImageRef::new("q.png").with_pixels(GrayMatrix::filled(2, 2, 255.0).unwrap());
        assert_eq!(image_arg_error(&p, &far, &cfg(ImageComparator::Mse)).unwrap(), 1);
        assert_eq!(image_arg_error(&p, &far, &cfg(ImageComparator::Ssim)).unwrap(), 1);
    }

    #[test]
    fn image_arg_error_requires_data() {
        let bare = ImageRef::new("a.png");
        for comparator in [ImageComparator::Iou, ImageComparator::Mse, ImageComparator::Ssim] {
            assert!(matches!(
                image_arg_error(&bare, &bare, &cfg(comparator)),
                Err(MetricError::MissingImageData { .. })
            ));
        }
    }
}
