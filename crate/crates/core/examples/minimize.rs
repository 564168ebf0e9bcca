//! Minimizes the stability function of a plane quartic over Q_2 on the
//! standard apartment and reports how much ramification makes the minimizer
//! a vertex.

use semistable::algebra::matrix;
use semistable::building;
use semistable::descent::minimize_on_apartment;
use semistable::forms;
use semistable::lp::lattice_minimizers;
use semistable::rational::fmt_rat;
use semistable::ValuedField;

fn main() -> semistable::Result<()> {
    let k = ValuedField::padic(2)?;
    let f = forms::parse_poly(&k, 2, "x1^4 + 2*x0^3*x2 + x0*x1^2*x2 + 2*x0*x2^3")?;
    let (m, face) = minimize_on_apartment(&k, &f, &matrix::identity(&k, 3))?;
    let w: Vec<String> = face.minimizer.iter().map(fmt_rat).collect();
    println!("minimum {} at ({})", fmt_rat(&m), w.join(","));
    let step = k.value_group_step();
    let (vertices, _) = lattice_minimizers(&face, &step);
    println!("vertices over Q_2: {}", vertices.len());
    println!("required ramification: {}", building::required_ramification(&face.minimizer, &step));
    Ok(())
}
