//! The Pascal adic transformation on dyadic digit windows.
//!
//! Reading digits least significant first, the map locates the first factor
//! `10`; minimality forces the digits before it into the shape `0^m 1^k`, and
//! the rewrite
//!
//! ```text
//! 0^m 1^k 1 0 suffix   ->   1^k 0^m 0 1 suffix
//! ```
//!
//! fixes everything past position `m + k + 1`. On integer values the rewrite
//! is translation by the jump `2^m + 2^k - 1`, so the map is the
//! transfer of `x -> x + n(x)` to digit space. A window with no `10` factor
//! (the words `0^a 1^b`) leaves the image undetermined; symmetrically the
//! inverse rewrites the first `01` and is undetermined exactly on `1^a 0^b`.
//!
//! The map preserves the number of ones, and on each composition class it
//! steps through the words in combinadic rank order; [`rank_in_class`] and
//! [`unrank_in_class`] expose that order directly.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::word::{DigitWord, StepResult, Windowed};

fn require_dyadic(w: &DigitWord, context: &'static str) -> Result<(), Error> {
    if w.is_dyadic() {
        Ok(())
    } else {
        Err(Error::NonDyadic { context })
    }
}

/// Zero/one run lengths in front of the first `10` factor: the window splits
/// as `0^zeros 1^ones 1 0 suffix`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JumpExponents {
    pub zeros: usize,
    pub ones: usize,
}

impl JumpExponents {
    /// The translation distance `2^zeros + 2^ones - 1`.
    pub fn jump(&self) -> BigUint {
        (BigUint::one() << self.zeros) + (BigUint::one() << self.ones) - BigUint::one()
    }

    /// Positions `0..window()` are rewritten; the rest of the word is fixed.
    pub fn window(&self) -> usize {
        self.zeros + self.ones + 2
    }
}

/// Locates the first `10` factor. Undetermined on `0^a 1^b` windows, where
/// the factor would begin past the window edge.
pub fn jump_exponents(w: &DigitWord) -> Result<Windowed<JumpExponents>, Error> {
    require_dyadic(w, "pascal map")?;
    let digits = w.digits();
    for i in 0..digits.len().saturating_sub(1) {
        if digits[i] == 1 && digits[i + 1] == 0 {
            let ones = digits[..i].iter().filter(|&&d| d == 1).count();
            return Ok(Windowed::Determined(JumpExponents {
                zeros: i - ones,
                ones,
            }));
        }
    }
    Ok(Windowed::Undetermined)
}

/// The translation distance `n(x)` with `Px = x + n(x)`.
pub fn jump(w: &DigitWord) -> Result<Windowed<BigUint>, Error> {
    Ok(jump_exponents(w)?.map(|e| e.jump()))
}

/// One forward step of the Pascal map.
pub fn pascal_step(w: &DigitWord) -> Result<StepResult, Error> {
    let exponents = match jump_exponents(w)? {
        Windowed::Determined(e) => e,
        Windowed::Undetermined => return Ok(Windowed::Undetermined),
    };
    let (m, k) = (exponents.zeros, exponents.ones);
    let mut digits = w.digits().to_vec();
    for (i, d) in digits.iter_mut().take(exponents.window()).enumerate() {
        *d = u32::from(i < k || i == m + k + 1);
    }
    Ok(Windowed::Determined(
        DigitWord::dyadic(digits).expect("rewrite emits 0/1 digits"),
    ))
}

/// One backward step: rewrites the first `01` factor, undoing [`pascal_step`].
/// Undetermined on `1^a 0^b` windows.
pub fn pascal_inverse(w: &DigitWord) -> Result<StepResult, Error> {
    require_dyadic(w, "pascal inverse")?;
    let digits = w.digits();
    let mut split = None;
    for i in 0..digits.len().saturating_sub(1) {
        if digits[i] == 0 && digits[i + 1] == 1 {
            // no 01 before position i, so the prefix is 1^k 0^(i - k)
            let k = digits[..i].iter().filter(|&&d| d == 1).count();
            split = Some((i - k, k));
            break;
        }
    }
    let Some((m, k)) = split else {
        return Ok(Windowed::Undetermined);
    };
    let mut out = digits.to_vec();
    for (i, d) in out.iter_mut().take(m + k + 2).enumerate() {
        *d = u32::from((m..m + k).contains(&i) || i == m + k);
    }
    Ok(Windowed::Determined(
        DigitWord::dyadic(out).expect("rewrite emits 0/1 digits"),
    ))
}

/// Number of words sharing a composition class: length `len` with `zeros`
/// zero digits.
pub fn class_size(len: usize, zeros: usize) -> Result<BigUint, Error> {
    if zeros > len {
        return Err(Error::BadComposition { zeros, len });
    }
    Ok(binomial(BigUint::from(len), BigUint::from(zeros)))
}

/// Position of `w` in the forward orbit through its composition class,
/// counted from the minimal word `1^k 0^m`. Combinadic form: for one-digit
/// positions `p_1 < p_2 < ...` the rank is `sum C(p_i, i)`.
pub fn rank_in_class(w: &DigitWord) -> Result<BigUint, Error> {
    require_dyadic(w, "composition rank")?;
    let mut rank = BigUint::zero();
    let mut index = BigUint::zero();
    for (pos, &d) in w.digits().iter().enumerate() {
        if d == 1 {
            index += 1u32;
            rank += binomial(BigUint::from(pos), index.clone());
        }
    }
    Ok(rank)
}

/// Inverse of [`rank_in_class`]: the length-`len`, `zeros`-zeros word at the
/// given orbit position. Greedy combinadic decode, highest one first.
pub fn unrank_in_class(len: usize, zeros: usize, rank: &BigUint) -> Result<DigitWord, Error> {
    let size = class_size(len, zeros)?;
    if *rank >= size {
        return Err(Error::RankOutOfRange {
            rank: rank.to_string(),
            size: size.to_string(),
        });
    }
    if len == 0 {
        return Err(Error::EmptyWord);
    }
    let ones = len - zeros;
    let mut digits = vec![0u32; len];
    let mut rest = rank.clone();
    for i in (1..=ones).rev() {
        // largest position p with C(p, i) <= rest; p >= i - 1 always works
        let k = BigUint::from(i);
        let mut p = i - 1;
        let mut coeff = BigUint::zero(); // C(i - 1, i)
        loop {
            let next = binomial(BigUint::from(p + 1), k.clone());
            if next > rest {
                break;
            }
            p += 1;
            coeff = next;
        }
        digits[p] = 1;
        rest -= coeff;
    }
    debug_assert!(rest.is_zero());
    DigitWord::dyadic(digits)
}
