//! Big J-function of CP² along t = s·p²: match the input against the
//! seed family, then read off J(t) through Q² and s².
use gwrecon::cone_h::{input_target, match_input, monomial_basis, Family};
use gwrecon::seed::{seed_terms, Target};
use gwrecon::HSeries;

fn main() -> gwrecon::Result<()> {
    let target = Target::Projective { n: 3 };
    let alg = target.algebra(&["s"], 2, 2)?;
    let family = Family::new(&alg, seed_terms(&target.seed()?, &alg)?, monomial_basis(3))?;
    let s = HSeries::var(&alg, "s")?;
    let m = match_input(&family, &input_target(&alg, &[(0, 2, s)]))?;
    println!("matched in {} iterations", m.iterations);
    for (a, t) in m.tau.iter().enumerate() {
        println!("tau_{a} = {t}");
    }
    println!("J = {}", m.point);
    Ok(())
}
