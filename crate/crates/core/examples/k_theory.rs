//! Quantum K-theory of CP¹: the small J-function, a tangent direction, and
//! the Birkhoff factorization of the fundamental solution.
use gwrecon::cone_k::{eps_basis, input_target_k, j_function_k, k_birkhoff, FamilyK, KNormalization};
use gwrecon::seed::{seed_terms_k, Target};

fn main() -> gwrecon::Result<()> {
    let target = Target::ProjectiveK { n: 2 };
    let alg = target.algebra(&[], 2, 0)?;
    let family = FamilyK::new(&alg, seed_terms_k(&alg)?, eps_basis(2))?;
    println!("J(0) = {}", j_function_k(&family, &input_target_k(&alg, &[]))?);

    let alg = target.algebra(&["tau0", "tau1"], 1, 1)?;
    let family = FamilyK::new(&alg, seed_terms_k(&alg)?, eps_basis(2))?;
    for norm in [KNormalization::AtInfinity, KNormalization::AtZero] {
        let (_, f) = k_birkhoff(&family, norm)?;
        println!("{norm:?}: {} sweeps", f.sweeps);
        println!("  V[0][0] = {}", f.v.rows[0][0]);
        println!("  W[1][0] = {}", f.w.rows[1][0]);
    }
    Ok(())
}
