//! Image-source enumeration for planar scenes.

use super::{sort_paths, Link, PathComponent};
use crate::error::{Error, Result};
use crate::scene::EPS_GEO;
use crate::{Complex64, Vec3};

pub const MAX_IMAGE_ORDER: usize = 6;

struct Plane {
    point: Vec3,
    normal: Vec3,
}

impl Plane {
    fn offset(&self, p: &Vec3) -> f64 {
        (p - self.point).dot(&self.normal)
    }

    fn mirror(&self, p: &Vec3) -> Vec3 {
        p - self.normal * (2.0 * self.offset(p))
    }
}

/// Every valid specular path from `tx` to `rx` with at most `max_order`
/// reflections, sorted by delay. Discs and rectangles are mirrored in their
/// supporting planes; reflection points must land on the finite surface and
/// every leg must be unobstructed.
pub fn trace_images(link: &Link, tx: Vec3, rx: Vec3, max_order: usize) -> Result<Vec<PathComponent>> {
    let scene = link.scene;
    if !scene.is_planar() {
        let curved: Vec<_> = scene
            .surfaces
            .iter()
            .filter(|s| s.shape.plane().is_none())
            .map(|s| s.label.as_str())
            .collect();
        return Err(Error::UnsupportedScene(format!(
            "image-source engine needs planar surfaces; curved: {}",
            curved.join(", ")
        )));
    }
    if max_order > MAX_IMAGE_ORDER {
        return Err(Error::invalid(format!(
            "image order {max_order} exceeds {MAX_IMAGE_ORDER}"
        )));
    }
    let planes: Vec<Plane> = scene
        .surfaces
        .iter()
        .map(|s| {
            let (point, normal) = s.shape.plane().expect("checked planar");
            Plane { point, normal }
        })
        .collect();

    let mut out = Vec::new();
    let mut sequence = Vec::with_capacity(max_order);
    let mut images = vec![tx];
    enumerate(link, &planes, tx, rx, max_order, &mut sequence, &mut images, &mut out);
    sort_paths(&mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    link: &Link,
    planes: &[Plane],
    tx: Vec3,
    rx: Vec3,
    max_order: usize,
    sequence: &mut Vec<usize>,
    images: &mut Vec<Vec3>,
    out: &mut Vec<PathComponent>,
) {
    if let Some(p) = resolve(link, planes, tx, rx, sequence, images) {
        out.push(p);
    }
    if sequence.len() == max_order {
        return;
    }
    let source = *images.last().expect("tx is always present");
    for (i, plane) in planes.iter().enumerate() {
        if sequence.last() == Some(&i) || link.is_absorbing(i) {
            continue;
        }
        // an image on the back side of the plane cannot reflect off its front
        if plane.offset(&source).abs() < EPS_GEO {
            continue;
        }
        sequence.push(i);
        images.push(plane.mirror(&source));
        enumerate(link, planes, tx, rx, max_order, sequence, images, out);
        images.pop();
        sequence.pop();
    }
}

/// Back-traces one image sequence; `None` when the path is not physical.
fn resolve(
    link: &Link,
    planes: &[Plane],
    tx: Vec3,
    rx: Vec3,
    sequence: &[usize],
    images: &[Vec3],
) -> Option<PathComponent> {
    let scene = link.scene;
    let k = sequence.len();
    // points[0] = tx, points[1..=k] reflection points, points[k+1] = rx
    let mut points = vec![Vec3::zeros(); k + 2];
    points[0] = tx;
    points[k + 1] = rx;
    let mut target = rx;
    for j in (0..k).rev() {
        let plane = &planes[sequence[j]];
        let image = images[j + 1];
        let (a, b) = (plane.offset(&image), plane.offset(&target));
        // the image and the downstream point must straddle the plane
        if !(a * b < 0.0) {
            return None;
        }
        let t = a / (a - b);
        let p = image + (target - image) * t;
        if !scene.surfaces[sequence[j]].shape.contains_planar_point(&p) {
            return None;
        }
        points[j + 1] = p;
        target = p;
    }
    // reflections must happen from the same side of each plane
    for j in 0..k {
        let plane = &planes[sequence[j]];
        if plane.offset(&points[j]) * plane.offset(&points[j + 2]) <= 0.0 {
            return None;
        }
    }
    let mut length = 0.0;
    let mut dirs = Vec::with_capacity(k + 1);
    for leg in points.windows(2) {
        let d = leg[1] - leg[0];
        let len = d.norm();
        if len <= EPS_GEO {
            return None;
        }
        let dir = d / len;
        if let Some(hit) = scene.intersect_unchecked(&leg[0], &dir) {
            if hit.distance < len - EPS_GEO {
                return None;
            }
        }
        length += len;
        dirs.push(dir);
    }

    let mut reflection = Complex64::new(1.0, 0.0);
    for (j, &s) in sequence.iter().enumerate() {
        let (g, _) = link.bounce(s, &dirs[j], &planes[s].normal);
        reflection *= g;
    }
    Some(link.component(
        length,
        reflection,
        dirs[0],
        dirs[k],
        sequence.iter().map(|&s| s as u16).collect(),
    ))
}
