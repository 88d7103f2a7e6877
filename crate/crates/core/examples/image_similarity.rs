//! Image-argument comparison with IoU, MSE and SSIM.
//!
//! `cargo run --example image_similarity`

use ipa_eval::ir::{BoundingBox, GrayMatrix, ImageRef};
use ipa_eval::metrics::{image_arg_error, iou, mse, ssim, ImageComparator, SensitiveErrorConfig};

fn gradient(offset: f64) -> GrayMatrix {
    let data = (0..64).map(|i| ((i % 8) as f64 * 30.0 + offset).min(255.0)).collect();
    GrayMatrix::new(8, 8, data).unwrap()
}

fn main() {
    let a = BoundingBox::new(0, 0, 2, 2).unwrap();
    let b = BoundingBox::new(1, 1, 3, 3).unwrap();
    println!("IoU of overlapping boxes: {:.6}", iou(&a, &b));

    let (x, y) = (gradient(0.0), gradient(6.0));
    let cfg = SensitiveErrorConfig::default();
    println!("MSE  {:.3}", mse(&x, &y).unwrap());
    println!("SSIM {:.6}", ssim(&x, &y, &cfg).unwrap());

    let sys = ImageRef::new("sys.png").with_bounding_box(a).with_pixels(x);
    let gold = ImageRef::new("gold.png").with_bounding_box(b).with_pixels(y);
    for comparator in [ImageComparator::Iou, ImageComparator::Mse, ImageComparator::Ssim] {
        let cfg = SensitiveErrorConfig { image_comparator: comparator, ..Default::default() };
        println!("E_image_arg with {comparator}: {}", image_arg_error(&sys, &gold, &cfg).unwrap());
    }
}
