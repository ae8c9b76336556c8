//! Physical-element evaluation of the local bases shared by assembly,
//! field evaluation and the estimator.

use crate::basis::{bubble_gradient, bubble_hessian, bubble_value, ElementMap, ReferenceBasis};
use crate::geometry::{Mat2, Vec2};

/// The 8 local MINI velocity basis functions at barycentric point `l`,
/// ordered `2a + c` (a = 0..3 vertices, a = 3 bubble; c = component).
/// Jacobians have row = component.
pub fn mini_basis(map: &ElementMap, l: &[f64; 3]) -> ([Vec2; 8], [Mat2; 8]) {
    let s = [l[0], l[1], l[2], bubble_value(l)];
    let g = [
        map.grad_lambda[0],
        map.grad_lambda[1],
        map.grad_lambda[2],
        bubble_gradient(l, &map.grad_lambda),
    ];
    let mut vals = [Vec2::ZERO; 8];
    let mut jacs = [Mat2::ZERO; 8];
    for a in 0..4 {
        vals[2 * a] = Vec2::new(s[a], 0.0);
        vals[2 * a + 1] = Vec2::new(0.0, s[a]);
        jacs[2 * a] = Mat2([[g[a].x(), g[a].y()], [0.0, 0.0]]);
        jacs[2 * a + 1] = Mat2([[0.0, 0.0], [g[a].x(), g[a].y()]]);
    }
    (vals, jacs)
}

/// `div D(u)` of the bubble part of a MINI field with bubble coefficients
/// `c` (the linear part contributes nothing). Returned as a vector:
/// `(div D(u))_i = ½ (c_i Δb + Σ_j c_j ∂_i∂_j b)`.
pub fn mini_div_sym_grad(map: &ElementMap, l: &[f64; 3], c: Vec2) -> Vec2 {
    let h = bubble_hessian(l, &map.grad_lambda);
    let lap = h.trace();
    (Vec2::new(c.x() * lap, c.y() * lap) + h.mul_vec(c)) * 0.5
}

/// Physical BDM1 basis values and divergences with the global orientation
/// signs applied.
pub fn bdm_basis(
    map: &ElementMap,
    basis: &ReferenceBasis,
    l: &[f64; 3],
    signs: &[f64; 6],
) -> ([Vec2; 6], [f64; 6]) {
    let xr = Vec2::new(l[1], l[2]);
    let mut vals = [Vec2::ZERO; 6];
    let mut divs = [0.0; 6];
    for j in 0..6 {
        vals[j] = map.piola(basis.bdm_value(j, xr)) * signs[j];
        divs[j] = basis.bdm_divergence(j) / map.det * signs[j];
    }
    (vals, divs)
}

/// Physical Jacobians of the signed BDM1 basis (constant on the element).
pub fn bdm_jacobians(map: &ElementMap, basis: &ReferenceBasis, signs: &[f64; 6]) -> [Mat2; 6] {
    core::array::from_fn(|j| map.piola_jacobian(&basis.bdm_jacobian(j)).scale(signs[j]))
}

/// Barycentric coordinates clamped against rounding for points known to lie
/// on the element (e.g. on one of its edges).
pub fn clamp_barycentric(mut l: [f64; 3]) -> [f64; 3] {
    for v in &mut l {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s = l[0] + l[1] + l[2];
    [l[0] / s, l[1] / s, l[2] / s]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_sym_grad_matches_finite_differences() {
        let map = ElementMap::new([Vec2::new(0.1, 0.0), Vec2::new(1.0, 0.3), Vec2::new(0.2, 0.9)]);
        let c = Vec2::new(0.7, -1.3);
        let l = [0.2, 0.5, 0.3];
        let x = map.to_physical(&l);
        let fd = 1e-4;
        // D(u) of the bubble field u = c b at a physical point
        let d = |y: Vec2| {
            let lb = map.to_barycentric(y);
            let g = bubble_gradient(&lb, &map.grad_lambda);
            Mat2([[c.x() * g.x(), c.x() * g.y()], [c.y() * g.x(), c.y() * g.y()]]).sym()
        };
        let mut expect = [0.0; 2];
        for j in 0..2 {
            let mut e = Vec2::ZERO;
            e.0[j] = fd;
            let dp = d(x + e);
            let dm = d(x - e);
            for i in 0..2 {
                expect[i] += (dp.0[i][j] - dm.0[i][j]) / (2.0 * fd);
            }
        }
        let got = mini_div_sym_grad(&map, &l, c);
        assert!((got.x() - expect[0]).abs() < 1e-6);
        assert!((got.y() - expect[1]).abs() < 1e-6);
    }
}
