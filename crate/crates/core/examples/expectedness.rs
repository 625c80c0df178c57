//! Deciding whether `ψ_T` is preserved by a conditional expectation onto the
//! tail algebra: a preserving `φ` when `e_#` is an eigenvector of `T`, an
//! explicit counterexample otherwise.
//!
//! `cargo run --example expectedness`

use boolefock::tail::vacuum_defect;
use boolefock::{
    cond_expect, counterexample_ratio, is_expected, preserving_phi, BooleanState, FockVector, Index, PhiState,
    TraceClassOperator, C64,
};

fn main() -> boolefock::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vec2 = |a: f64, b: f64| FockVector::from_components([(Index::Vacuum, C64::new(a, 0.0)), (Index::site(1), C64::new(b, 0.0))]);

    // e_# is an eigenvector: the state is preserved by F_φ with φ built from T
    let t = TraceClassOperator::new(vec![(0.4, FockVector::vacuum()), (0.6, vec2(0.0, 1.0))])?;
    let phi = preserving_phi(&t)?;
    println!("expected: {} defect {:e}", is_expected(&t), vacuum_defect(&t));
    println!("preserving phi: {}", serde_json::to_string(&phi)?);

    // (3/4, 1/4) mixture of (e_# ± e_1)/√2: ratio 2/3 for every φ
    let t = TraceClassOperator::new(vec![(0.75, vec2(h, h)), (0.25, vec2(h, -h))])?;
    let ce = counterexample_ratio(&t)?;
    println!("expected: {} defect {:.6}", is_expected(&t), vacuum_defect(&t));
    println!("ratio {:.15} from eigenpair {}", ce.ratio, ce.j0);
    let psi = BooleanState::normal(t.clone());
    let target = psi.evaluate(&ce.witness);
    let normal = PhiState::normal(TraceClassOperator::pure(&FockVector::basis(Index::site(5)))?)?;
    for phi in [PhiState::Singular, normal] {
        let got = psi.evaluate(&cond_expect(&phi, &ce.witness).to_element());
        println!("psi_T(F(X)) = {got:.12}  ratio * psi_T(X) = {:.12}", target * ce.ratio);
    }
    Ok(())
}
