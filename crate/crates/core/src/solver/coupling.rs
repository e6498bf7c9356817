use nalgebra::Matrix6;

use crate::model::LinearizedModel;
use crate::C64;

/// Index of `b` in the fluctuation vector.
pub const MECH: usize = 0;
/// Index of `b^dag`.
pub const MECH_DAG: usize = 3;

/// Drift matrix of the linearized Langevin equations, ordered
/// `(b, a_R, a_L, b^dag, a_R^dag, a_L^dag)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub m: Matrix6<C64>,
}

impl CouplingMatrix {
    /// `Sigma M^* Sigma`, where `Sigma` swaps annihilation and creation blocks.
    /// Equals `M` for every physical model.
    pub fn conjugate_swapped(&self) -> Matrix6<C64> {
        let mut out = Matrix6::zeros();
        for r in 0..6 {
            for c in 0..6 {
                out[(swap(r), swap(c))] = self.m[(r, c)].conj();
            }
        }
        out
    }
}

pub(crate) fn swap(i: usize) -> usize {
    (i + 3) % 6
}

pub fn build_coupling_matrix(model: &LinearizedModel) -> CouplingMatrix {
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let gr = model.g_r;
    let gl = model.g_l;
    let b = model.beta;
    let wm = C64::from(model.omega_m);
    let det = C64::from(model.delta);
    let half_gamma = i * (model.gamma_m / 2.0);
    let kt = i * model.kappa_t();

    #[rustfmt::skip]
    let inner = Matrix6::new(
        wm - half_gamma, gr.conj(), gl.conj(), zero,            gr,       gl,
        gr,              -det - kt, b.conj(),  gr,              zero,     zero,
        gl,              b,         -det - kt, gl,              zero,     zero,
        zero,            -gr.conj(), -gl.conj(), -wm - half_gamma, -gr,   -gl,
        -gr.conj(),      zero,      zero,      -gr.conj(),      det - kt, -b,
        -gl.conj(),      zero,      zero,      -gl.conj(),      -b.conj(), det - kt,
    );
    CouplingMatrix { m: inner * i }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DeviceParams;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn reference_isolator_entries() {
        let model = LinearizedModel::red_sideband(20.0, 5.0, 1.0, 1.0, 0.0);
        let m = build_coupling_matrix(&model).m;
        assert!(close(m[(1, 1)], C64::new(2.0, 20.0)));
        assert!(close(m[(1, 0)], C64::new(0.0, 5.0)));
        assert!(close(m[(0, 0)], C64::new(0.0, 20.0)));
        assert!(close(m[(4, 4)], C64::new(2.0, -20.0)));
    }

    #[test]
    fn mechanical_diagonal_uses_half_gamma() {
        let model = LinearizedModel::red_sideband(20.0, 0.0, 1.0, 0.0, 0.4);
        let m = build_coupling_matrix(&model).m;
        assert!(close(m[(0, 0)], C64::new(0.2, 20.0)));
        assert!(close(m[(3, 3)], C64::new(0.2, -20.0)));
    }

    #[test]
    fn uncoupled_model_is_block_diagonal() {
        let params = DeviceParams::new(20.0, 1.0)
            .with_kappa_in(0.5)
            .with_gamma_m(0.1);
        let model = LinearizedModel::from_couplings(&params, 0.0, 0.0, -3.0);
        let m = build_coupling_matrix(&model).m;
        for r in 0..6 {
            for c in 0..6 {
                let mech_r = r == MECH || r == MECH_DAG;
                let mech_c = c == MECH || c == MECH_DAG;
                if mech_r != mech_c {
                    assert_eq!(m[(r, c)], C64::new(0.0, 0.0), "({r},{c})");
                }
            }
        }
    }

    #[test]
    fn complex_backscatter_placement() {
        let beta = C64::from_polar(2.0, 0.7);
        let model = LinearizedModel::red_sideband(20.0, 1.0, 1.0, 0.0, 0.0).with_beta(beta);
        let m = build_coupling_matrix(&model).m;
        let i = C64::new(0.0, 1.0);
        assert!(close(m[(2, 1)], i * beta));
        assert!(close(m[(1, 2)], i * beta.conj()));
        assert!(close(m[(4, 5)], -i * beta));
        assert!(close(m[(5, 4)], -i * beta.conj()));
    }

    #[test]
    fn conjugation_symmetry_holds_elementwise() {
        let params = DeviceParams::new(17.0, 1.0)
            .with_kappa_prime(0.4)
            .with_kappa_in(0.3)
            .with_gamma_m(0.05)
            .with_beta(C64::new(1.2, -0.8));
        let model = LinearizedModel::from_couplings(
            &params,
            C64::new(3.0, 1.0),
            C64::new(-0.4, 0.9),
            -15.0,
        );
        let cm = build_coupling_matrix(&model);
        let swapped = cm.conjugate_swapped();
        for r in 0..6 {
            for c in 0..6 {
                assert!(close(cm.m[(r, c)], swapped[(r, c)]), "({r},{c})");
            }
        }
    }
}
