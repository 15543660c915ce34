//! Birkhoff factorization U = V·W of the fundamental solution of CP², and
//! its sanity checks: V·W = U, W = I + O(1/z), factoring V·W again.
use gwrecon::birkhoff::{birkhoff_factorize, check_factorization};
use gwrecon::cone_h::{monomial_basis, Family};
use gwrecon::seed::{seed_terms, Target};
use gwrecon::smatrix::{assemble_u, s_algebra};

fn main() -> gwrecon::Result<()> {
    let target = Target::Projective { n: 3 };
    let alg = s_algebra(&target, &[1, 2], 2, 2)?;
    let family = Family::new(&alg, seed_terms(&target.seed()?, &alg)?, monomial_basis(3))?.with_sign(-1);
    let u = assemble_u(&family, &family.tau_vars())?;
    let f = birkhoff_factorize(&u)?;
    println!("{} sweeps", f.sweeps);
    match check_factorization(&u, &f) {
        Ok(()) => println!("V·W = U"),
        Err(e) => println!("check failed: {e}"),
    }
    let again = birkhoff_factorize(&f.v.mul(&f.w))?;
    println!("idempotent: {}", again.v == f.v && again.w == f.w);
    println!("W[2][0] = {}", f.w.rows[2][0]);
    Ok(())
}
