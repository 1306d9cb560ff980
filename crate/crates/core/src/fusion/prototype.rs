//! Nearest-centroid baseline on block-averaged images, so the pipeline has a
//! classifier to produce scores without any training framework.

use crate::error::{invalid, Error, Result};
use crate::repr::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct Prototypes {
    pub down: usize,
    /// One `down * down` centroid per class, values in [0, 1].
    pub centroids: Vec<Vec<f64>>,
}

/// Cell bounds `[lo, hi)` of output index `i` when pooling `n_in` onto `n_out`.
fn cell(n_in: usize, n_out: usize, i: usize) -> (usize, usize) {
    let lo = i * n_in / n_out;
    let hi = ((i + 1) * n_in).div_ceil(n_out).max(lo + 1);
    (lo.min(n_in - 1), hi.min(n_in))
}

/// Block means over a `down x down` grid, scaled to [0, 1]. Averaging rather
/// than point sampling keeps thin spectral lines visible after heavy
/// downsampling.
fn features(img: &GrayImage, down: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(down * down);
    for r in 0..down {
        let (r0, r1) = cell(img.rows(), down, r);
        for c in 0..down {
            let (c0, c1) = cell(img.cols(), down, c);
            let mut sum = 0u64;
            for rr in r0..r1 {
                sum += img.row(rr)[c0..c1].iter().map(|&v| v as u64).sum::<u64>();
            }
            out.push(sum as f64 / ((r1 - r0) * (c1 - c0)) as f64 / 255.0);
        }
    }
    Ok(out)
}

/// Per-class mean of the downsampled images. `labels[i]` is the class index of
/// `images[i]`; every class in `0..n_classes` needs at least one image.
pub fn prototype_train(images: &[GrayImage], labels: &[usize], n_classes: usize, down: usize) -> Result<Prototypes> {
    if images.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!("{} images, {} labels", images.len(), labels.len())));
    }
    if down == 0 {
        return Err(invalid("prototype side length must be positive"));
    }
    let mut sums = vec![vec![0.0; down * down]; n_classes];
    let mut counts = vec![0usize; n_classes];
    for (img, &label) in images.iter().zip(labels) {
        if label >= n_classes {
            return Err(invalid(format!("label {label} outside {n_classes} classes")));
        }
        for (s, v) in sums[label].iter_mut().zip(features(img, down)?) {
            *s += v;
        }
        counts[label] += 1;
    }
    if let Some(empty) = counts.iter().position(|&n| n == 0) {
        return Err(invalid(format!("class {empty} has no training images")));
    }
    let centroids = sums
        .into_iter()
        .zip(counts)
        .map(|(s, n)| s.into_iter().map(|v| v / n as f64).collect())
        .collect();
    Ok(Prototypes { down, centroids })
}

/// Negated L2 distance to each centroid.
pub fn prototype_score(img: &GrayImage, p: &Prototypes) -> Result<Vec<f64>> {
    let x = features(img, p.down)?;
    Ok(p.centroids
        .iter()
        .map(|c| -c.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(f: impl Fn(usize, usize) -> u8) -> GrayImage {
        GrayImage::from_fn(16, 16, f).unwrap()
    }

    #[test]
    fn single_image_classes() {
        let a = img(|r, _| if r < 8 { 255 } else { 0 });
        let b = img(|r, _| if r >= 8 { 255 } else { 0 });
        let p = prototype_train(&[a.clone(), b.clone()], &[0, 1], 2, 8).unwrap();
        assert_eq!(p.centroids[0], features(&a, 8).unwrap());
        // disjoint supports stay disjoint
        assert!(p.centroids[0].iter().zip(&p.centroids[1]).all(|(x, y)| x * y == 0.0));
        let s = prototype_score(&a, &p).unwrap();
        assert_eq!(s[0], 0.0);
        assert!(s[1] < 0.0);
    }

    #[test]
    fn duplicated_training_set() {
        let imgs = vec![img(|r, c| (r * 16 + c) as u8), img(|r, c| (r * c) as u8), img(|_, c| c as u8 * 9)];
        let p1 = prototype_train(&imgs, &[0, 0, 1], 2, 4).unwrap();
        let doubled: Vec<GrayImage> = imgs.iter().chain(&imgs).cloned().collect();
        let p2 = prototype_train(&doubled, &[0, 0, 1, 0, 0, 1], 2, 4).unwrap();
        for (a, b) in p1.centroids.iter().flatten().zip(p2.centroids.iter().flatten()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn scores_are_non_positive_and_follow_class_order() {
        let imgs = vec![img(|r, _| r as u8 * 10), img(|_, c| c as u8 * 10), img(|r, c| (r + c) as u8)];
        let p = prototype_train(&imgs, &[0, 1, 2], 3, 4).unwrap();
        let probe = img(|r, c| (r * c % 200) as u8);
        let s = prototype_score(&probe, &p).unwrap();
        assert!(s.iter().all(|&v| v <= 0.0));
        let swapped = Prototypes { down: 4, centroids: vec![p.centroids[2].clone(), p.centroids[0].clone(), p.centroids[1].clone()] };
        let t = prototype_score(&probe, &swapped).unwrap();
        assert_eq!(t, vec![s[2], s[0], s[1]]);
    }

    #[test]
    fn empty_class_rejected() {
        let a = img(|_, _| 1);
        assert!(prototype_train(&[a], &[0], 2, 4).is_err());
    }
}
