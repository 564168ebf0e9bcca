//! Values of the stability function of a cuspidal cubic over Q_2 at a few
//! points of the standard apartment.

use semistable::algebra::matrix;
use semistable::building::{self, BuildingPoint};
use semistable::forms;
use semistable::rational::{fmt_rat, rat};
use semistable::ValuedField;

fn main() -> semistable::Result<()> {
    let k = ValuedField::padic(2)?;
    let f = forms::parse_poly(&k, 2, "x0^2*x2 - x1^3 + 2*x2^3")?;
    let points = [[rat(0, 1), rat(0, 1), rat(0, 1)], [rat(1, 2), rat(1, 3), rat(0, 1)], [rat(1, 1), rat(1, 1), rat(0, 1)]];
    for w in points {
        let p = BuildingPoint::new(matrix::identity(&k, 3), w.to_vec());
        let shown: Vec<String> = w.iter().map(fmt_rat).collect();
        println!("phi({}) = {}", shown.join(", "), fmt_rat(&building::phi(&k, &f, &p)?));
    }
    Ok(())
}
