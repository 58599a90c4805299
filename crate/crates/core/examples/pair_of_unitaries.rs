//! Optimal input for distinguishing two unitaries.

use optinput::numerics::{cis, CMatrix};
use optinput::optimal_inputs::pair_unitary_optimal_input;

fn main() -> optinput::Result<()> {
    let u_plus = CMatrix::identity(3);
    let u_minus = CMatrix::diag(&[cis(0.0), cis(1.0), cis(2.5)]);
    let res = pair_unitary_optimal_input(&u_plus, &u_minus)?;
    println!("eigenphases of U+^dag U-: {:?}", res.eigenphases);
    println!("Schmidt weights: {:?}", res.weights);
    println!("minimal output overlap: {:.6}", res.min_overlap);
    Ok(())
}
