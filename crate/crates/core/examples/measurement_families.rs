//! Measurement families: orthogonal rank-one POVMs, the a/b POVM, Weyl-rotated
//! and diagonal families, with input certificates.

use optinput::channels::{ab_povm_family, diagonal_measurement_family, ortho_rank1_family, weyl_rotated_family};
use optinput::numerics::{basis_vec, r};
use optinput::optimal_inputs::{measurement_input_certify, PureState};

fn main() -> optinput::Result<()> {
    let ortho = ortho_rank1_family(&[basis_vec(2, 0), basis_vec(2, 1)])?;
    let v = measurement_input_certify(&ortho, &PureState::basis_pair(2, 2, 0, 0)?)?;
    println!("ortho basis family, input |0>|0>: {}", v.relation.name());

    let ab = ab_povm_family(0.9, 0.4)?;
    let v = measurement_input_certify(&ab, &PureState::phi(2))?;
    println!("a/b POVM family, input phi_2: {}", v.relation.name());

    let rot = weyl_rotated_family(&[r(0.5), r(0.3), r(0.2)], &[0.6, 0.3, 0.1], &[0.2, 0.3, 0.5])?;
    let v = measurement_input_certify(&rot, &PureState::phi(3))?;
    println!("Weyl-rotated family, input phi_3: {}", v.relation.name());

    let diag = diagonal_measurement_family(&[0.9, 0.6, 0.3])?;
    for k in 0..3 {
        let v = measurement_input_certify(&diag, &PureState::basis_pair(3, 3, k, 0)?)?;
        println!("diagonal family, input |{}>: {}", k, v.relation.name());
    }
    Ok(())
}
