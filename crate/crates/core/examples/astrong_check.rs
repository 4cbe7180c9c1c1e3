//! Coefficient-level check: expand a circuit and compare it with the target
//! monomials, one prime power at a time.

use symcirc::astrong::{check_astrong, target_coefficients};
use symcirc::circuit::{
    expand_coefficients, from_cover2d, CoefficientMap, VarId, VariableSpace, DEFAULT_EXPANSION_BUDGET,
};
use symcirc::cover2d::build_s2_cover;
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let m6 = factorize(6)?;

    // 3 x1x2 + 4 x2x3 + x1x3 against x1x2 + x2x3 + x1x3
    let x = |i| VarId { group: 0, index: i };
    let mut actual = CoefficientMap::new(VariableSpace::grouped(3, 1));
    actual.add(vec![x(1), x(2)], 3, &m6);
    actual.add(vec![x(2), x(3)], 4, &m6);
    actual.add(vec![x(1), x(3)], 1, &m6);
    let target = target_coefficients(3, 2, false, &m6)?;
    print!("{}", check_astrong(&actual, &target, &m6)?.to_lines());

    // the same coefficient with 2 in place of 3 is rejected
    actual.add(vec![x(1), x(2)], 5, &m6);
    print!("{}", check_astrong(&actual, &target, &m6)?.to_lines());

    let n = 10;
    let circuit = from_cover2d(&build_s2_cover(n, &m6)?);
    let expanded = expand_coefficients(&circuit, DEFAULT_EXPANSION_BUDGET)?;
    let report = check_astrong(&expanded, &target_coefficients(n, 2, true, &m6)?, &m6)?;
    print!("{}", report.to_lines());
    Ok(())
}
