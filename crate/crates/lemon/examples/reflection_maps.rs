//! The two reflections in line coordinates, their compositions and the
//! singular curves bounding their common domain.

use lemon_billiards::genmap::{self, GenMapKind, SingularCurveId};
use lemon_billiards::geometry::{LineState, Table};

fn main() -> lemon_billiards::Result<()> {
    let t = Table::new(1.6)?;
    let x = LineState::new(0.3, 0.5);
    println!("x = {x:?}, in domain: {}", genmap::in_domain(&t, &x));
    for k in [GenMapKind::L, GenMapKind::R, GenMapKind::Phi, GenMapKind::Psi, GenMapKind::Theta] {
        let (y, j) = genmap::apply_with_jacobian(&t, k, &x)?;
        println!("{k:?}: ({:+.9}, {:+.9}), det J = {:+.6}", y.d_left, y.d_right, j.det());
    }
    let back = genmap::apply_inverse(&t, GenMapKind::Theta, &genmap::apply(&t, GenMapKind::Theta, &x)?)?;
    println!("Theta^-1 Theta x - x = {:.1e}", back.dist(&x));
    for id in SingularCurveId::ALL {
        let c = genmap::singular_curve(&t, id, 200);
        println!("{:>4}: {} samples, length {:.6}", id.name(), c.len(), c.arclength());
    }
    Ok(())
}
