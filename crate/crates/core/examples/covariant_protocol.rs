//! Measure-and-correct protocol for a Weyl-covariant family: one output of
//! the maximally entangled input reproduces the output of any other input.

use optinput::channels::{make_gp, weyl_group_pairs};
use optinput::numerics::random::random_state;
use optinput::numerics::CMatrix;
use optinput::optimal_inputs::{group_correction_protocol, IrrepBlocks};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> optinput::Result<()> {
    let fam = make_gp(
        3,
        &[
            ("a", vec![0.5, 0.1, 0.05, 0.05, 0.1, 0.05, 0.05, 0.05, 0.05]),
            ("b", vec![0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]),
        ],
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = CMatrix::projector(&random_state(&mut rng, 9));
    let certs = group_correction_protocol(&fam, &weyl_group_pairs(3), &IrrepBlocks::single(3), &target, false)?;
    for c in &certs {
        println!("member {}: residual {:.2e}, acceptance {:.4}", c.label, c.residual, c.success_prob);
    }
    Ok(())
}
