//! Jones polynomial by R-matrix contraction of a Morse presentation.

mod bracket;
mod eval;
mod matrix;

use std::sync::OnceLock;

use thiserror::Error;

use crate::laurent::{Laurent, LaurentError};
use crate::morse::{pd_to_morse, MorseError, MorseEvent, MorseWord};
use crate::pd::{PdCode, PdError};

pub use bracket::{jones_via_bracket, kauffman_bracket, BracketPoly, BRACKET_BUDGET, BRACKET_S};
pub use eval::{eval_morse, StateVector, MAX_WIDTH};
pub use matrix::{standard_rmatrix, LMatrix, RMatrixSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JonesError {
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("{n} crossings exceed the state-sum budget of {max}")]
    OverBudget { n: usize, max: usize },
    #[error("Morse word width {0} exceeds the evaluator limit")]
    WidthOverflow(usize),
    #[error("evaluation did not end in a scalar")]
    NonScalar,
    #[error("normalization failed: {0}")]
    Normalization(String),
}

/// Scalars measured from the matrices that turn a raw evaluation into the
/// normalized polynomial.
#[derive(Clone, Debug)]
pub struct Normalization {
    /// Value of one closed circle.
    pub delta: Laurent,
    /// A positive kink multiplies the strand by `framing`.
    pub framing: Laurent,
    /// `R` turned a quarter equals `rho · R⁻¹`.
    pub rho: Laurent,
}

fn measure(m: &RMatrixSet) -> Result<Normalization, JonesError> {
    let fail = |what: &str| JonesError::Normalization(what.to_string());
    let id = LMatrix::identity(2);
    let delta = eval_morse(&MorseWord::new(vec![MorseEvent::cup(0), MorseEvent::cap(0)]), m)?;
    let framing = m.kink(true)?.ratio_to(&id).ok_or_else(|| fail("kink is not scalar"))?;
    let back = m.kink(false)?.ratio_to(&id).ok_or_else(|| fail("negative kink is not scalar"))?;
    if framing.checked_mul(&back)? != Laurent::one() {
        return Err(fail("kinks of opposite sign do not cancel"));
    }
    let rho = m.rotated_r()?.ratio_to(&m.r_inv).ok_or_else(|| fail("rotated R is not a multiple of R⁻¹"))?;
    framing.inverse_unit()?;
    rho.inverse_unit()?;
    Ok(Normalization { delta, framing, rho })
}

pub fn normalization() -> &'static Normalization {
    static N: OnceLock<Normalization> = OnceLock::new();
    N.get_or_init(|| measure(standard_rmatrix()).expect("standard matrices normalize"))
}

/// Turns the raw value of a Morse word for a diagram with writhe `w` into
/// the Jones polynomial. `balance` is `#R − #R⁻¹` in the word; each crossing
/// whose strands do not both run upward contributes a factor `rho`.
pub fn normalize(raw: &Laurent, writhe: i32, balance: i32) -> Result<Laurent, JonesError> {
    let n = normalization();
    let turns = writhe - balance;
    debug_assert!(turns % 2 == 0);
    let v = raw.checked_mul(&n.rho.pow(turns / 2)?)?.checked_mul(&n.framing.pow(-writhe)?)?;
    Ok(v.div_exact(&n.delta)?)
}

/// The normalized Jones polynomial (unknot = 1).
pub fn jones(pd: &PdCode) -> Result<Laurent, JonesError> {
    let word = pd_to_morse(pd)?;
    let raw = eval_morse(&word, standard_rmatrix())?;
    normalize(&raw, pd.writhe()?, word.crossing_balance())
}
