//! Reconstruct the S-matrix of CP¹ from the seed, check its structural
//! identities, and print the quantum product by p.
use gwrecon::cone_h::{monomial_basis, Family};
use gwrecon::seed::{seed_terms, Target};
use gwrecon::smatrix::{quantum_product, reconstruct_s, s_algebra, structural_checks, Direction};

fn main() -> gwrecon::Result<()> {
    let target = Target::Projective { n: 2 };
    let alg = s_algebra(&target, &[0, 1], 2, 2)?;
    let family = Family::new(&alg, seed_terms(&target.seed()?, &alg)?, monomial_basis(2))?.with_sign(-1);
    let r = reconstruct_s(&family)?;
    println!("mirror map: t0 = {}, t1 = {}", r.mirror[0], r.mirror[1]);
    for (i, row) in r.s.rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            println!("S[{i}][{j}] = {e}");
        }
    }
    for c in structural_checks(&r.s, Some("t0"), Some("t1"))? {
        println!("{:<12} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    let p = quantum_product(&r.s, &Direction::Divisor)?;
    println!("p• = [[{}, {}], [{}, {}]]", p.rows[0][0], p.rows[0][1], p.rows[1][0], p.rows[1][1]);
    Ok(())
}
