//! When does a product input match Φ₂ for qubit Pauli families?

use optinput::channels::make_gp_xi;
use optinput::entanglement::{entanglement_breaking_gp, gp_params_of, separable_suffices};

fn main() -> optinput::Result<()> {
    let cases = [
        ("collinear, x condition", [0.1, 0.1, 0.1], [0.05, 0.3, 0.3]),
        ("generic pair", [0.3, 0.1, 0.05], [0.05, 0.2, 0.25]),
        ("heavy noise", [0.3, 0.3, 0.2], [0.25, 0.25, 0.25]),
    ];
    for (name, a, b) in cases {
        let fam = make_gp_xi(&[("plus", a), ("minus", b)])?;
        let rep = separable_suffices(&fam)?;
        let eb: Vec<bool> = gp_params_of(&fam)?.iter().map(entanglement_breaking_gp).collect();
        match (&rep.axis, &rep.witness) {
            (Some(axis), _) => println!("{}: product input along {:?} suffices; EB {:?}", name, axis, eb),
            (None, Some(w)) => println!(
                "{}: entanglement helps, witness s = {:.4}, gap = {:.3e}; EB {:?}",
                name, w.s, w.gap, eb
            ),
            _ => println!("{}: undecided; EB {:?}", name, eb),
        }
    }
    Ok(())
}
