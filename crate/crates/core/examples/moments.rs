//! States `γ ψ_T + (1 − γ) ω_∞` and the moments of the process `j ↦ ι_j`.
//!
//! `cargo run --example moments`

use boolefock::{moment, BooleanState, FockVector, Index, Site, TestAlgebraElement, TraceClassOperator, C64};

fn main() -> boolefock::Result<()> {
    let a = TestAlgebraElement::real(0.5, 1.0, -1.0, 2.0, 3.0);

    // ψ_T for T = |e_1⟩⟨e_1| sees site 1 and nothing else
    let psi = BooleanState::normal(TraceClassOperator::pure(&FockVector::basis(Index::site(1)))?);
    for j in 1..=3 {
        println!("psi_T(iota_{j}(A)) = {}", moment(&psi, &[(Site::new(j), a)])?);
    }

    // a symmetric state only depends on the pattern of the word
    let sym = BooleanState::symmetric(0.4)?;
    let w1 = [(Site::new(1), a), (Site::new(2), a.adjoint()), (Site::new(1), a)];
    let w2 = [(Site::new(9), a), (Site::new(4), a.adjoint()), (Site::new(9), a)];
    println!("symmetric: {} vs {}", moment(&sym, &w1)?, moment(&sym, &w2)?);

    // mixtures are re-diagonalized into an eigen-decomposition
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = FockVector::from_components([(Index::Vacuum, C64::new(h, 0.0)), (Index::site(1), C64::new(h, 0.0))]);
    let t = TraceClassOperator::from_mixture(&[(0.5, plus), (0.5, FockVector::basis(Index::site(2)))])?;
    for (w, xi) in t.eigenpairs() {
        println!("weight {w:.6} vector {}", serde_json::to_string(xi)?);
    }
    let st = BooleanState::new(0.7, t)?;
    println!("state JSON: {}", serde_json::to_string(&st)?);
    println!("moment: {}", moment(&st, &w1)?);
    Ok(())
}
