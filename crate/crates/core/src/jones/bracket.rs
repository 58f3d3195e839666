//! Kauffman bracket state sum, used as an independent check of the
//! R-matrix evaluation.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::laurent::Laurent;
use crate::pd::PdCode;

use super::JonesError;

/// State sums are exponential; diagrams above this many crossings are refused.
pub const BRACKET_BUDGET: usize = 16;

/// The variable substitution `A = q^(s/4)`, fixed by the trefoil anchor.
pub const BRACKET_S: i32 = -1;

/// Laurent polynomial in `A`; the inner exponent counts whole powers of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketPoly(pub Laurent);

impl fmt::Display for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.0.terms().enumerate() {
            let sign = if c.is_negative() {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.abs();
            let coeff = if mag.is_one() && e != 0 {
                String::new()
            } else if e == 0 {
                mag.to_string()
            } else {
                format!("{mag}*")
            };
            let var = match e {
                0 => String::new(),
                1 => "A".to_string(),
                _ => format!("A^{e}"),
            };
            write!(f, "{sign}{coeff}{var}")?;
        }
        Ok(())
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

/// Normalized so that the crossingless circle has bracket 1. Smoothing
/// `X[a,b,c,d]` gives `A·⟨(a d)(b c)⟩ + A⁻¹·⟨(a b)(c d)⟩`.
pub fn kauffman_bracket(pd: &PdCode) -> Result<BracketPoly, JonesError> {
    let n = pd.n();
    if n > BRACKET_BUDGET {
        return Err(JonesError::OverBudget { n, max: BRACKET_BUDGET });
    }
    let report = pd.validate();
    if !report.is_ok() {
        return Err(crate::pd::PdError::Invalid(report).into());
    }
    if n == 0 {
        return Ok(BracketPoly(Laurent::one()));
    }
    let labels = 2 * n + 1;
    // (#A − #B, loops) → number of states
    let mut tally: HashMap<(i32, usize), u64> = HashMap::new();
    let mut parent = vec![0usize; labels];
    for mask in 0u32..(1u32 << n) {
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i;
        }
        for (i, x) in pd.crossings().iter().enumerate() {
            let [a, b, c, d] = x.0.map(|l| l as usize);
            let pairs = if mask >> i & 1 == 0 { [(a, d), (b, c)] } else { [(a, b), (c, d)] };
            for (u, v) in pairs {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
        let loops = (1..labels).filter(|&l| find(&mut parent, l) == l).count();
        let b_count = mask.count_ones() as i32;
        *tally.entry((n as i32 - 2 * b_count, loops)).or_default() += 1;
    }
    let d = Laurent::from_terms([(-1, 2), (-1, -2)]);
    let mut total = Laurent::zero();
    let mut keys: Vec<_> = tally.into_iter().collect();
    keys.sort();
    for ((a_pow, loops), count) in keys {
        let term = d.pow(loops as i32 - 1)?.scale(&BigInt::from(count), a_pow)?;
        total.add_assign_ref(&term);
    }
    Ok(BracketPoly(total))
}

/// `(−A³)^(−w)·⟨D⟩` with `A = q^(s/4)`.
pub fn jones_via_bracket(pd: &PdCode) -> Result<Laurent, JonesError> {
    let bracket = kauffman_bracket(pd)?;
    let w = pd.writhe()?;
    let sign = if w % 2 == 0 { 1 } else { -1 };
    let corrected = bracket.0.scale(&BigInt::from(sign), -3 * w)?;
    let mut out = Laurent::zero();
    for (e, c) in corrected.terms() {
        if e % 2 != 0 {
            return Err(JonesError::NonScalar);
        }
        out.add_assign_ref(&Laurent::monomial(c.clone(), BRACKET_S * e / 2));
    }
    Ok(out)
}
