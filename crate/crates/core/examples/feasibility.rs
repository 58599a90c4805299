//! Numerical CPTP feasibility against the overlap criterion for pure pairs.

use optinput::comparison::{alberti_uhlmann, cptp_feasible};
use optinput::numerics::random::random_state;
use optinput::numerics::{inner, CMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> optinput::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..5 {
        let (mut a, mut b) = (random_state(&mut rng, 2), random_state(&mut rng, 2));
        let (mut c, mut d) = (random_state(&mut rng, 2), random_state(&mut rng, 2));
        if k % 2 == 1 {
            std::mem::swap(&mut a, &mut c);
            std::mem::swap(&mut b, &mut d);
        }
        let overlap_src = inner(&a, &b).norm();
        let overlap_tgt = inner(&c, &d).norm();
        let rep = cptp_feasible(
            &[CMatrix::projector(&a), CMatrix::projector(&b)],
            &[CMatrix::projector(&c), CMatrix::projector(&d)],
            5000,
            1e-7,
        )?;
        println!(
            "instance {}: overlaps {:.3} -> {:.3}, criterion {}, solver {} (residual {:.1e})",
            k,
            overlap_src,
            overlap_tgt,
            alberti_uhlmann(&a, &b, &c, &d, 0.0)?,
            rep.feasible,
            rep.residual
        );
    }
    Ok(())
}
