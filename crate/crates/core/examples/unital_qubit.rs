//! Every unital qubit channel: Φ₂'s output can be processed into the output
//! of any |φ_{p,V}⟩, so Φ₂ is never dominated.

use optinput::channels::{make_custom, make_gp_xi};
use optinput::comparison::dominance_check;
use optinput::numerics::random::{random_state, random_su2};
use optinput::numerics::SystemShape;
use optinput::optimal_inputs::{unital_qubit_protocol, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> optinput::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pauli = make_gp_xi(&[("a", [0.2, 0.1, 0.05]), ("b", [0.05, 0.3, 0.1])])?;
    let u = random_su2(&mut rng);
    let rotated = make_custom(&[
        ("a", pauli.members()[0].channel.kraus_ops().iter().map(|k| u.matmul(k)).collect()),
        ("b", pauli.members()[1].channel.kraus_ops().iter().map(|k| u.matmul(k)).collect()),
    ])?;
    let v = random_su2(&mut rng);
    for c in unital_qubit_protocol(&rotated, (0.8, 0.2), &v)? {
        println!("member {}: branch-assembled residual {:.2e}", c.label, c.residual);
    }
    let phi = PureState::phi(2).outputs(&rotated)?;
    for k in 0..3 {
        let psi = PureState::new(random_state(&mut rng, 4), SystemShape::pair(2, 2))?;
        let v = dominance_check(&phi, &psi.outputs(&rotated)?, None, 1e-9)?;
        println!("phi_2 vs random input {}: {}", k, v.relation.name());
    }
    Ok(())
}
