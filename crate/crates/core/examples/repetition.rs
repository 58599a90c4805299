//! Repeated use: identical, parallel and sequential outputs, the sequential
//! certificate for a covariant family and the adaptive search.

use optinput::channels::{make_gp_xi, weyl_group_pairs, weyl_rotated_family};
use optinput::numerics::random::random_state;
use optinput::numerics::{r, SystemShape};
use optinput::optimal_inputs::{IrrepBlocks, PureState};
use optinput::repetition::{
    adaptive_vs_identical, fresh_swap_strategy, identical_matches_sequential, random_unitary_interleaver,
    repeated_output, standard_qubit_menu, AdaptivePlan, Strategy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> optinput::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fam = make_gp_xi(&[("a", [0.1, 0.15, 0.05]), ("b", [0.3, 0.1, 0.2])])?;
    let ch = &fam.members()[0].channel;

    let psi = PureState::phi(2);
    let ident = repeated_output(ch, &Strategy::identical(psi.clone(), 2)?)?;
    let (seq, layout) = fresh_swap_strategy(&psi, 2, 2)?;
    let swapped = layout.to_identical_order(&repeated_output(ch, &seq)?)?;
    println!("fresh-swap sequential vs identical: {:.1e}", swapped.max_abs_diff(&ident));

    let start = PureState::new(random_state(&mut rng, 8), SystemShape::pair(2, 4))?;
    let seq = Strategy::sequential(start, vec![random_unitary_interleaver(&mut rng, 2, 4)])?;
    for c in identical_matches_sequential(&fam, &weyl_group_pairs(2), &IrrepBlocks::single(2), &seq, false)? {
        println!("member {}: rebuilt sequential output residual {:.1e}", c.label, c.residual);
    }

    let meas = weyl_rotated_family(&[r(0.8), r(0.6)], &[0.7, 0.3], &[0.2, 0.8])?;
    let plan = AdaptivePlan::shared(vec![1, 1], standard_qubit_menu())?;
    let rep = adaptive_vs_identical(&meas, (0.4, 0.6), &plan)?;
    println!(
        "adaptive risk {:.6} vs identical risk {:.6} over {} branches",
        rep.adaptive_risk, rep.identical_risk, rep.branches
    );
    Ok(())
}
