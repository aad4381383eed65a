use nalgebra::{DMatrix, DVector, Point3};

use super::GeometryError;

const RANK_TOL: f64 = 1e-9;

/// Least-squares algebraic sphere fit (linearized Coope formulation).
///
/// Solves for center c and radius r minimizing sum((|p-c|^2 - r^2)^2) via
/// the linear system |p|^2 = 2 c.p + (r^2 - |c|^2). Points are centered on
/// their centroid first, which keeps the system well conditioned and makes
/// the fit translation-equivariant to machine precision.
pub fn fit_sphere(points: &[Point3<f64>]) -> Result<(Point3<f64>, f64), GeometryError> {
    if points.len() < 4 {
        return Err(GeometryError::InsufficientPoints { got: points.len() });
    }
    let n = points.len();
    let centroid = points
        .iter()
        .fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.coords)
        / n as f64;

    // Coplanarity check: rank of the centered point matrix.
    let centered = DMatrix::from_fn(n, 3, |i, j| points[i].coords[j] - centroid[j]);
    let rank = centered.clone().svd(false, false).rank(RANK_TOL);
    if rank < 3 {
        return Err(GeometryError::DegenerateGeometry { rank });
    }

    let mut a = DMatrix::zeros(n, 4);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let q = points[i].coords - centroid;
        a[(i, 0)] = 2.0 * q.x;
        a[(i, 1)] = 2.0 * q.y;
        a[(i, 2)] = 2.0 * q.z;
        a[(i, 3)] = 1.0;
        b[i] = q.norm_squared();
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| GeometryError::InvalidShape(e.to_string()))?;
    let c_local = nalgebra::Vector3::new(x[0], x[1], x[2]);
    let r_sq = x[3] + c_local.norm_squared();
    Ok((
        Point3::from(centroid + c_local),
        r_sq.max(0.0).sqrt(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{UnitQuaternion, Vector3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere_points(center: Point3<f64>, r: f64) -> Vec<Point3<f64>> {
        // Six axis-aligned surface points.
        let mut out = Vec::new();
        for d in [
            Vector3::x(),
            -Vector3::x(),
            Vector3::y(),
            -Vector3::y(),
            Vector3::z(),
            -Vector3::z(),
        ] {
            out.push(center + d * r);
        }
        out
    }

    #[test]
    fn exact_fit_recovers_center_and_radius() {
        let center = Point3::new(0.01, 0.02, 0.03);
        let pts = sphere_points(center, 0.05);
        let (c, r) = fit_sphere(&pts).unwrap();
        assert_relative_eq!(c, center, epsilon = 1e-9);
        assert_relative_eq!(r, 0.05, epsilon = 1e-9);
    }

    #[test]
    fn coplanar_points_rejected_with_rank() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(0.01, 0.0, 0.0),
            Point3::new(0.0, 0.01, 0.0),
            Point3::new(0.01, 0.01, 0.0),
        ];
        match fit_sphere(&pts) {
            Err(GeometryError::DegenerateGeometry { rank }) => assert_eq!(rank, 2),
            other => panic!("expected degenerate geometry, got {other:?}"),
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(0.01, 0.0, 0.0),
            Point3::new(0.0, 0.01, 0.0),
        ];
        assert!(matches!(
            fit_sphere(&pts),
            Err(GeometryError::InsufficientPoints { got: 3 })
        ));
    }

    // Monte-Carlo oracle: uniform +-0.5 mm noise keeps the fitted radius
    // within +-1 mm of truth.
    #[test]
    fn noisy_fit_radius_within_1mm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let center = Point3::new(0.02, -0.01, 0.05);
        let r_true = 0.05;
        for _ in 0..100 {
            let mut pts = Vec::new();
            for _ in 0..12 {
                let dir = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize();
                let noise = Vector3::new(
                    rng.random_range(-5e-4..5e-4),
                    rng.random_range(-5e-4..5e-4),
                    rng.random_range(-5e-4..5e-4),
                );
                pts.push(center + dir * r_true + noise);
            }
            let (_, r) = fit_sphere(&pts).unwrap();
            assert!((r - r_true).abs() < 1e-3, "radius {r} off truth {r_true}");
        }
    }

    #[test]
    fn rigid_transform_equivariance() {
        let pts = sphere_points(Point3::new(0.01, 0.02, 0.03), 0.04);
        let (c0, r0) = fit_sphere(&pts).unwrap();
        let rot = UnitQuaternion::from_euler_angles(0.4, -1.1, 0.7);
        let shift = Vector3::new(0.3, -0.2, 0.9);
        let moved: Vec<_> = pts
            .iter()
            .map(|p| Point3::from(rot.transform_vector(&p.coords) + shift))
            .collect();
        let (c1, r1) = fit_sphere(&moved).unwrap();
        let expected = rot.transform_vector(&c0.coords) + shift;
        assert_relative_eq!(c1.coords, expected, epsilon = 1e-9);
        assert_relative_eq!(r1, r0, epsilon = 1e-9);
    }

    #[test]
    fn scale_equivariance_of_radius() {
        let pts = sphere_points(Point3::new(0.01, 0.0, -0.02), 0.03);
        let (_, r0) = fit_sphere(&pts).unwrap();
        let scaled: Vec<_> = pts.iter().map(|p| Point3::from(p.coords * 2.5)).collect();
        let (_, r1) = fit_sphere(&scaled).unwrap();
        assert_relative_eq!(r1, r0 * 2.5, max_relative = 1e-9);
    }
}
