//! Mirror map of local CP¹ (total space of O(1)) at τ = 0, with λ kept as a
//! Laurent variable: t0 = -Q/λ² - 3Q²/(4λ⁵) + ..., t1 = Q²/(2λ⁶) + ...
//! The Q² term of t1 needs λ-order ≥ 6 and is absent at order 5.
use gwrecon::cone_h::{monomial_basis, Family};
use gwrecon::seed::{seed_terms, Target};
use gwrecon::smatrix::mirror_map_at;
use gwrecon::HSeries;

fn main() -> gwrecon::Result<()> {
    for lambda_order in [5, 8] {
        let target = Target::Local { n: 2, l: 1, lambda_order };
        let alg = target.algebra(&[], 2, 0)?;
        let family = Family::new(&alg, seed_terms(&target.seed()?, &alg)?, monomial_basis(2))?.with_sign(-1);
        let t = mirror_map_at(&family, &vec![HSeries::zero(&alg); 2])?;
        println!("λ-order {lambda_order}: t0 = {}, t1 = {}", t[0], t[1]);
    }
    Ok(())
}
