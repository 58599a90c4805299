//! The damping pair where Φ₂ is not the best input: at s = ½ the basis input
//! |1⟩ gives a smaller trace norm than Φ₂, but it wins again for large s.

use optinput::channels::make_damp;
use optinput::comparison::{dominance_check, gap_curve, uniform_grid};
use optinput::optimal_inputs::PureState;

fn main() -> optinput::Result<()> {
    let fam = make_damp(&[("xi=1/2", 1.0, 0.5), ("xi=0", 1.0, 0.0)])?;
    let basis = PureState::basis_pair(2, 2, 1, 0)?.outputs(&fam)?;
    let phi = PureState::phi(2).outputs(&fam)?;
    let grid = uniform_grid(3.0, 7);
    let cb = gap_curve(&basis[0], &basis[1], Some(&grid))?;
    let cp = gap_curve(&phi[0], &phi[1], Some(&grid))?;
    println!("{:>6} {:>12} {:>12}", "s", "|1>", "phi_2");
    for ((s, a), b) in cb.s_values.iter().zip(&cb.norms).zip(&cp.norms) {
        println!("{:>6.3} {:>12.9} {:>12.9}", s, a, b);
    }
    let v = dominance_check(&basis, &phi, None, 1e-9)?;
    println!("|1> vs phi_2: {} (witness s = {:?}, gap = {:?})", v.relation.name(), v.witness_s, v.gap);
    Ok(())
}
