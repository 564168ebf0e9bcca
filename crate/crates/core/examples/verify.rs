//! Checks a hand-built model of the cuspidal cubic over Q_2(π), π² = -2.

use semistable::building::parse_matrix;
use semistable::descent::verify_model;
use semistable::forms;
use semistable::rational::{fmt_rat, int};
use semistable::ValuedField;

fn main() -> semistable::Result<()> {
    let l = ValuedField::padic(2)?.extend_ramified_with_unit(2, &int(-1))?;
    let f = forms::parse_poly(&l, 2, "x0^2*x2 - x1^3 + 2*x2^3")?;
    let g = parse_matrix(&l, &[vec!["2*pi", "0", "0"], vec!["0", "pi^2", "0"], vec!["pi", "0", "1"]])?;
    let (value, verdict, fiber) = verify_model(&l, &f, &g, 2)?;
    let rf = l.residue_field();
    println!("value {}", fmt_rat(&value));
    println!("fiber {}", forms::format_form(&fiber, |c| rf.format(c)));
    println!("verdict {}", verdict.name());
    Ok(())
}
