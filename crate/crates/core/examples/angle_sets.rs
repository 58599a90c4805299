//! Unit weights closing a polygon with sides x: existence, the exact triangle
//! case, sampling for larger d and the subset test between two weight vectors.

use optinput::geometry::{ang_nonempty, ang_parallel_property, ang_sample, ang_solve_triangle};

fn main() -> optinput::Result<()> {
    for x in [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [3.0, 1.0, 1.0]] {
        let sols = ang_solve_triangle(&x)?;
        println!("x = {:?}: nonempty {}, {} solution(s)", x, ang_nonempty(&x)?, sols.len());
        for s in &sols {
            println!("    omega = {:?}", s.omegas.iter().map(|w| (w.re, w.im)).collect::<Vec<_>>());
        }
    }
    let x = [1.0, 1.0, 1.0, 1.0];
    let samples = ang_sample(&x, 20, 42)?;
    let worst = samples.iter().map(|a| a.residual(&x)).fold(0.0, f64::max);
    let distinct = samples.iter().map(|a| a.distinct_values(1e-6)).max().unwrap_or(0);
    println!("d = 4 square: max closure residual {:.1e}, up to {} distinct values", worst, distinct);

    let x = [0.3, 0.25, 0.25, 0.2];
    for xp in [[0.6, 0.5, 0.5, 0.4], [0.3, 0.25, 0.2, 0.25]] {
        let rep = ang_parallel_property(&x, &xp, 100, 1, 1e-9)?;
        println!("Ang({:?}) within Ang({:?}): {}", x, xp, rep.subset_holds);
    }
    Ok(())
}
