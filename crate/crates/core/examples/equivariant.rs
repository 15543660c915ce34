//! Equivariant J-function of CP¹ and its non-equivariant limit λ → 0.
use gwrecon::cone_h::{input_target, j_function, monomial_basis, Family};
use gwrecon::seed::{seed_terms, Target};

fn main() -> gwrecon::Result<()> {
    let target = Target::Equivariant { n: 2, lambda_order: 2 };
    let alg = target.algebra(&[], 2, 0)?;
    let family = Family::new(&alg, seed_terms(&target.seed()?, &alg)?, monomial_basis(2))?;
    let j = j_function(&family, &input_target(&alg, &[]))?;
    println!("J = {j}");
    println!("J|λ=0 = {}", j.at_lambda_zero());
    Ok(())
}
