//! Slice-by-slice contraction of a Morse word.

use std::collections::HashMap;

use crate::laurent::Laurent;
use crate::morse::{EventKind, MorseWord};

use super::matrix::RMatrixSet;
use super::JonesError;

/// Widest slice the bit-packed state vector can hold.
pub const MAX_WIDTH: usize = 62;

/// Sparse vector over basis tuples of the current slice; strand `p` is bit `p`.
pub type StateVector = HashMap<u64, Laurent>;

fn accumulate(out: &mut StateVector, key: u64, v: Laurent) {
    if v.is_zero() {
        return;
    }
    match out.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            e.get_mut().add_assign_ref(&v);
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(v);
        }
    }
}

/// Evaluates the word bottom to top, starting from the empty tuple, and
/// returns the final scalar.
pub fn eval_morse(word: &MorseWord, m: &RMatrixSet) -> Result<Laurent, JonesError> {
    let widths = word.widths()?;
    word.validate()?;
    if let Some(&w) = widths.iter().max() {
        if w > MAX_WIDTH {
            return Err(JonesError::WidthOverflow(w));
        }
    }
    let mut state: StateVector = HashMap::from([(0u64, Laurent::one())]);
    for e in &word.events {
        let at = e.at as u32;
        let low_mask = (1u64 << at) - 1;
        let mut next = StateVector::with_capacity(state.len() * 2);
        for (s, v) in &state {
            let low = s & low_mask;
            match e.kind {
                EventKind::Cup => {
                    let high = (s >> at) << (at + 2);
                    for (idx, c) in m.cup.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let (x, y) = ((idx >> 1) as u64, (idx & 1) as u64);
                        let key = low | (x << at) | (y << (at + 1)) | high;
                        accumulate(&mut next, key, v.checked_mul(c)?);
                    }
                }
                EventKind::Cap => {
                    let (x, y) = ((s >> at) & 1, (s >> (at + 1)) & 1);
                    let c = &m.cap[(2 * x + y) as usize];
                    if c.is_zero() {
                        continue;
                    }
                    let key = low | ((s >> (at + 2)) << at);
                    accumulate(&mut next, key, v.checked_mul(c)?);
                }
                EventKind::CrossPos | EventKind::CrossNeg => {
                    let mat = if e.kind == EventKind::CrossPos { &m.r } else { &m.r_inv };
                    let (x, y) = ((s >> at) & 1, (s >> (at + 1)) & 1);
                    let input = (2 * x + y) as usize;
                    let rest = s & !(0b11 << at);
                    for out in 0..4 {
                        let c = mat.get(out, input);
                        if c.is_zero() {
                            continue;
                        }
                        let (ox, oy) = ((out >> 1) as u64, (out & 1) as u64);
                        let key = rest | (ox << at) | (oy << (at + 1));
                        accumulate(&mut next, key, v.checked_mul(c)?);
                    }
                }
            }
        }
        state = next;
    }
    match state.len() {
        0 => Ok(Laurent::zero()),
        1 if state.contains_key(&0) => Ok(state.remove(&0).unwrap_or_default()),
        _ => Err(JonesError::NonScalar),
    }
}
