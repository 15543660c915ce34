//! Plane rational curve counts N_d through five points, reconstructed from
//! the J-function of CP² and compared against Kontsevich's recursion.
use gwrecon::invariants::{nd_invariants, required_caps};

fn main() -> gwrecon::Result<()> {
    let dmax = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let (q, t) = required_caps(dmax);
    println!("caps: Q^{q}, t2^{t}");
    println!("{:>2} {:>10} {:>10}", "d", "N_d", "recursion");
    for r in nd_invariants(dmax, q, t)? {
        println!("{:>2} {:>10} {:>10}", r.d, r.value, r.oracle);
    }
    Ok(())
}
