use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

use jclab_core::linalg::C64;
use jclab_core::oracle::{displacement_matrix, truncation_policy};
use jclab_core::state::{coherent_fock, field_qubit_basis, joint_state};
use jclab_core::{characteristic_function, scalar_profile, FieldBlock, SystemParams};
use nalgebra::DMatrix;

/// Field block `<i|rho|j>` rebuilt in the Fock basis from the 4x4 joint state.
fn fock_block(params: &SystemParams, t: f64, n_max: usize, block: FieldBlock) -> DMatrix<C64> {
    let alpha = scalar_profile(params, t).unwrap().alpha;
    let (v1, v2) = field_qubit_basis(alpha).unwrap().to_fock(n_max).unwrap();
    let vs = [v1, v2];
    let m = joint_state(params, t).unwrap().into_matrix();
    let (i, j) = block.atom_indices();
    let mut out = DMatrix::<C64>::zeros(n_max + 1, n_max + 1);
    for a in 0..2 {
        for b in 0..2 {
            out += &vs[a] * vs[b].adjoint() * m[(2 * i + a, 2 * j + b)];
        }
    }
    out
}

/// The blocks written directly as coherent-state dyads.
fn dyad_block(params: &SystemParams, t: f64, n_max: usize, block: FieldBlock) -> DMatrix<C64> {
    let profile = scalar_profile(params, t).unwrap();
    let plus = coherent_fock(-profile.alpha, n_max).unwrap().amplitudes;
    let minus = coherent_fock(profile.alpha, n_max).unwrap().amplitudes;
    let (pop_plus, pop_minus) = params.populations();
    let c = params.initial_coherence();
    // off-diagonal blocks carry f / <alpha|-alpha> relative to a pure superposition
    let damping = profile.f_over_x();
    match block {
        FieldBlock::PlusPlus => &plus * plus.adjoint() * C64::from(pop_plus),
        FieldBlock::MinusMinus => &minus * minus.adjoint() * C64::from(pop_minus),
        FieldBlock::PlusMinus => &plus * minus.adjoint() * (c * damping),
        FieldBlock::MinusPlus => &minus * plus.adjoint() * (c.conj() * damping),
    }
}

#[test]
fn qubit_embedding_reproduces_dyads() {
    for &(g, k, theta, phi, kt) in &[
        (1.0, 1.0, FRAC_PI_2, 0.0, 1.0),
        (0.5, 1.0, FRAC_PI_4, FRAC_PI_3, 0.25),
        (2.0, 1.0, 3.0 * FRAC_PI_4, 1.0, 4.0),
        (1.3, 0.4, 1.0, 5.0, 2.5),
    ] {
        let params = SystemParams::new(g, k, theta, phi).unwrap();
        let t = kt / k;
        let n = truncation_policy(&params, t).unwrap();
        for block in FieldBlock::ALL {
            let a = fock_block(&params, t, n, block);
            let b = dyad_block(&params, t, n, block);
            let dev = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "{block:?} at {kt}: {dev:e}");
        }
    }
}

#[test]
fn characteristic_from_embedding() {
    let params = SystemParams::new(1.0, 1.0, 1.2, 0.4).unwrap();
    let t = 1.7;
    let n = truncation_policy(&params, t).unwrap();
    for beta in [C64::new(0.5, 0.5), C64::new(-1.5, 0.3), C64::new(1.0, -1.7)] {
        let d = displacement_matrix(beta, n);
        for block in FieldBlock::ALL {
            let (i, j) = block.atom_indices();
            let fock = (fock_block(&params, t, n, block) * &d).trace();
            let closed = characteristic_function(&params, t, beta, (i + 1, j + 1)).unwrap();
            assert!((fock - closed).norm() < 1e-8, "{block:?}: {fock} vs {closed}");
        }
    }
}
