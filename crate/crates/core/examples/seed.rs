//! Small J-function coefficients I_d of CP¹ and CP², read straight off the seed.
use gwrecon::seed::{seed_eval, Target};

fn main() -> gwrecon::Result<()> {
    for n in [2, 3] {
        let target = Target::Projective { n };
        let alg = target.algebra(&[], 3, 0)?;
        let spec = target.seed()?;
        println!("CP^{}:", n - 1);
        for d in 0..=3 {
            println!("  I_{d} = {}", seed_eval(&spec, &alg, d)?);
        }
    }
    Ok(())
}
