//! Wrench-space force-closure test.
//!
//! Each friction cone is linearized into unit wrench generators; the grasp
//! is force-closure when the origin lies strictly inside the convex hull of
//! the generators. That holds exactly when (a) some strictly positive convex
//! combination of all generators sums to zero and (b) the generators span
//! the full six-dimensional wrench space. Condition (a) is a small linear
//! program solved by a dense two-phase simplex; (b) is a rank check —
//! without it, three coplanar frictionless normals that cancel would pass
//! the combination test while resisting nothing out of plane.

use nalgebra::{DMatrix, DVector, Unit, Vector3, Vector6};

use super::{GraspError, GraspMap};

/// Minimum positive combination weight for a grasp to count as closed.
pub const CLOSURE_MARGIN: f64 = 1e-9;

const RANK_TOL: f64 = 1e-9;

/// True when the three-contact grasp is force-closure under Coulomb
/// friction `mu`, testing the cone linearized into `cone_edges` generators.
pub fn force_closure(g: &GraspMap, mu: f64, cone_edges: usize) -> Result<bool, GraspError> {
    let (margin, rank) = closure_diagnostics(g, mu, cone_edges)?;
    Ok(margin >= CLOSURE_MARGIN && rank == 6)
}

/// The signed margin of the closure linear program: the largest weight
/// floor achievable by a convex combination of generators summing to the
/// zero wrench, or minus the infeasibility when none exists. Positive
/// margin alone does not imply closure; the generators must also span the
/// wrench space.
pub fn closure_margin(g: &GraspMap, mu: f64, cone_edges: usize) -> Result<f64, GraspError> {
    Ok(closure_diagnostics(g, mu, cone_edges)?.0)
}

fn closure_diagnostics(
    g: &GraspMap,
    mu: f64,
    cone_edges: usize,
) -> Result<(f64, usize), GraspError> {
    if mu < 0.0 {
        return Err(GraspError::BadMu(mu));
    }
    if cone_edges < 4 {
        return Err(GraspError::BadConeEdges(cone_edges));
    }
    let contacts: Vec<usize> = (0..3).filter(|&i| g.normals[i].norm() > 0.5).collect();
    if contacts.len() != 3 {
        return Err(GraspError::NeedThreeContacts {
            got: contacts.len(),
        });
    }

    let generators = cone_generators(g, mu, cone_edges);
    let k = generators.len();

    // Rank of the 6 x K generator matrix.
    let gen_matrix = DMatrix::from_fn(6, k, |r, c| generators[c][r]);
    let rank = gen_matrix.clone().svd(false, false).rank(RANK_TOL);

    // max eps  s.t.  sum_k lambda_k w_k = 0, sum_k lambda_k = 1,
    //                lambda_k >= eps >= 0.
    // Substituting lambda_k = x_k + eps gives a standard-form LP in
    // (x_1..x_k, eps) >= 0.
    let mut a = DMatrix::zeros(7, k + 1);
    let mut col_sum = Vector6::zeros();
    for (c, w) in generators.iter().enumerate() {
        for r in 0..6 {
            a[(r, c)] = w[r];
        }
        a[(6, c)] = 1.0;
        col_sum += w;
    }
    for r in 0..6 {
        a[(r, k)] = col_sum[r];
    }
    a[(6, k)] = k as f64;
    let mut b = DVector::zeros(7);
    b[6] = 1.0;
    let mut c = DVector::zeros(k + 1);
    c[k] = 1.0;

    let margin = match lp::simplex_max(&a, &b, &c) {
        lp::Outcome::Optimal { objective, .. } => objective,
        lp::Outcome::Infeasible { residual } => -residual,
        lp::Outcome::Unbounded => {
            // Cannot happen: eps is bounded by 1/k through the simplex row.
            f64::INFINITY
        }
    };
    Ok((margin, rank))
}

/// Unit wrench generators of the linearized friction cones: normalized
/// force direction stacked over the moment about the reference, scaled by
/// the largest arm length so both halves are comparable.
fn cone_generators(g: &GraspMap, mu: f64, cone_edges: usize) -> Vec<Vector6<f64>> {
    let arm_scale = g
        .arms
        .iter()
        .map(|a| a.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let mut out = Vec::with_capacity(3 * cone_edges);
    for i in 0..3 {
        let n = Unit::new_normalize(g.normals[i]);
        let (t1, t2) = tangent_basis(&n);
        for e in 0..cone_edges {
            let theta = 2.0 * std::f64::consts::PI * e as f64 / cone_edges as f64;
            let dir = (n.into_inner() + mu * (theta.cos() * t1 + theta.sin() * t2)).normalize();
            let moment = g.arms[i].cross(&dir) / arm_scale;
            out.push(Vector6::new(
                dir.x, dir.y, dir.z, moment.x, moment.y, moment.z,
            ));
        }
    }
    out
}

fn tangent_basis(n: &Unit<Vector3<f64>>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let t1 = n.cross(&pick).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

/// Dense two-phase tableau simplex, small enough for the closure problems
/// (seven rows, a few hundred columns). Bland's rule prevents cycling.
pub(crate) mod lp {
    use nalgebra::{DMatrix, DVector};

    const TOL: f64 = 1e-11;
    const MAX_ITERS: usize = 20_000;

    #[derive(Debug)]
    pub enum Outcome {
        Optimal {
            objective: f64,
            #[allow(dead_code)] // diagnostics and tests read the solution
            x: DVector<f64>,
        },
        Infeasible {
            residual: f64,
        },
        Unbounded,
    }

    /// Maximize `c . x` subject to `a x = b`, `x >= 0`. Requires `b >= 0`.
    pub fn simplex_max(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Outcome {
        let m = a.nrows();
        let n = a.ncols();
        assert_eq!(b.len(), m);
        assert_eq!(c.len(), n);
        debug_assert!(b.iter().all(|&v| v >= 0.0));

        // Tableau columns: n structural + m artificial + rhs.
        let mut t = DMatrix::zeros(m, n + m + 1);
        for r in 0..m {
            for col in 0..n {
                t[(r, col)] = a[(r, col)];
            }
            t[(r, n + r)] = 1.0;
            t[(r, n + m)] = b[r];
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        // Phase 1: minimize the artificial sum.
        let mut phase1 = DVector::zeros(n + m);
        for j in n..n + m {
            phase1[j] = -1.0;
        }
        if !optimize(&mut t, &mut basis, &phase1, n + m) {
            return Outcome::Unbounded; // cannot happen with bounded artificials
        }
        let residual: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= n)
            .map(|(r, _)| t[(r, n + m)])
            .sum();
        if residual > 1e-9 {
            return Outcome::Infeasible { residual };
        }
        // Pivot lingering zero-valued artificials out of the basis.
        for r in 0..m {
            if basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| t[(r, j)].abs() > TOL) {
                    pivot(&mut t, &mut basis, r, col);
                }
            }
        }

        // Phase 2: artificial columns are frozen out by limiting the
        // entering-column range to the structural variables.
        let mut full_cost = DVector::zeros(n + m);
        for j in 0..n {
            full_cost[j] = c[j];
        }
        if !optimize(&mut t, &mut basis, &full_cost, n) {
            return Outcome::Unbounded;
        }

        let mut x = DVector::zeros(n);
        for (r, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = t[(r, n + m)];
            }
        }
        Outcome::Optimal {
            objective: c.dot(&x),
            x,
        }
    }

    /// Run simplex iterations with Bland's rule; entering columns are drawn
    /// from `0..enter_limit`. Returns false on unboundedness.
    fn optimize(
        t: &mut DMatrix<f64>,
        basis: &mut [usize],
        cost: &DVector<f64>,
        enter_limit: usize,
    ) -> bool {
        let m = t.nrows();
        let rhs = t.ncols() - 1;
        for _ in 0..MAX_ITERS {
            // Reduced costs via the basis cost vector.
            let mut entering = None;
            for j in 0..enter_limit {
                if basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for r in 0..m {
                    reduced -= cost[basis[r]] * t[(r, j)];
                }
                if reduced > TOL {
                    entering = Some(j);
                    break; // Bland: first improving index
                }
            }
            let Some(col) = entering else {
                return true; // optimal
            };
            // Ratio test, Bland ties on the smallest basis variable.
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..m {
                if t[(r, col)] > TOL {
                    let ratio = t[(r, rhs)] / t[(r, col)];
                    match leaving {
                        None => leaving = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - TOL
                                || ((ratio - lratio).abs() <= TOL && basis[r] < basis[lr])
                            {
                                leaving = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false; // unbounded
            };
            pivot(t, basis, row, col);
        }
        true
    }

    fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
        let m = t.nrows();
        let cols = t.ncols();
        let p = t[(row, col)];
        for j in 0..cols {
            t[(row, j)] /= p;
        }
        for r in 0..m {
            if r != row {
                let factor = t[(r, col)];
                if factor != 0.0 {
                    for j in 0..cols {
                        t[(r, j)] -= factor * t[(row, j)];
                    }
                }
            }
        }
        basis[row] = col;
    }

}
