//! Digit words: finite windows of dyadic and mixed-radix integer expansions.
//!
//! A [`DigitWord`] holds the least-significant-first digits of a nonnegative
//! integer together with per-position radices (all 2 in the dyadic case), so
//! index 0 is the digit the odometer touches first. The odometer, `+j`
//! translation, and everything built on them act on windows with explicit
//! [`Windowed::Undetermined`] semantics: an outcome is undetermined exactly
//! when deciding it would need digits beyond the window (a carry that leaves
//! the window, a pattern that never completes).
//!
//! Cylinder measures are exact rationals end to end; floating point never
//! enters a measure computation. Randomness is confined to [`sample_word`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::Error;

/// Outcome of a window-limited operation: a determined value, or the marker
/// that the digits in view do not decide the result.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Windowed<T> {
    Determined(T),
    Undetermined,
}

impl<T> Windowed<T> {
    pub fn is_determined(&self) -> bool {
        matches!(self, Windowed::Determined(_))
    }

    pub fn determined(self) -> Option<T> {
        match self {
            Windowed::Determined(v) => Some(v),
            Windowed::Undetermined => None,
        }
    }

    pub fn as_determined(&self) -> Option<&T> {
        match self {
            Windowed::Determined(v) => Some(v),
            Windowed::Undetermined => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Windowed<U> {
        match self {
            Windowed::Determined(v) => Windowed::Determined(f(v)),
            Windowed::Undetermined => Windowed::Undetermined,
        }
    }

    /// Unwraps a determined value; panics with `msg` on `Undetermined`.
    pub fn expect_determined(self, msg: &str) -> T {
        match self {
            Windowed::Determined(v) => v,
            Windowed::Undetermined => panic!("{msg}: undetermined"),
        }
    }
}

/// Result type of single window steps.
pub type StepResult = Windowed<DigitWord>;

/// A finite window of a digit expansion, least significant digit first.
///
/// Invariants (constructor-enforced): at least one digit, every radix is at
/// least 2, and every digit is below its radix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitWord {
    digits: Vec<u32>,
    radices: Vec<u32>,
}

impl DigitWord {
    pub fn new(digits: Vec<u32>, radices: Vec<u32>) -> Result<Self, Error> {
        if digits.is_empty() {
            return Err(Error::EmptyWord);
        }
        if digits.len() != radices.len() {
            return Err(Error::LengthMismatch {
                digits: digits.len(),
                radices: radices.len(),
            });
        }
        for (index, (&digit, &radix)) in digits.iter().zip(&radices).enumerate() {
            if radix < 2 {
                return Err(Error::RadixTooSmall { index, radix });
            }
            if digit >= radix {
                return Err(Error::DigitOutOfRange {
                    index,
                    digit,
                    radix,
                });
            }
        }
        Ok(DigitWord { digits, radices })
    }

    /// Builds an all-radix-2 word from 0/1 digits.
    pub fn dyadic(digits: Vec<u32>) -> Result<Self, Error> {
        let radices = vec![2; digits.len()];
        DigitWord::new(digits, radices)
    }

    /// Parses a compact digit string such as `"0110"`, index 0 leftmost.
    pub fn dyadic_from_str(s: &str) -> Result<Self, Error> {
        let radices = vec![2; s.len()];
        Self::from_str_with_radices(s, &radices)
    }

    /// Parses either a compact digit string (`"0110"`) or a comma-separated
    /// digit list (`"1,0,2"`) against explicit radices.
    pub fn from_str_with_radices(s: &str, radices: &[u32]) -> Result<Self, Error> {
        let bad = || Error::WordParse {
            input: s.to_string(),
        };
        let digits: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|part| part.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        if digits.is_empty() {
            return Err(bad());
        }
        DigitWord::new(digits, radices.to_vec())
    }

    /// The all-zeros word on the given radices.
    pub fn zeros(radices: Vec<u32>) -> Result<Self, Error> {
        let digits = vec![0; radices.len()];
        DigitWord::new(digits, radices)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one digit by construction
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn digit(&self, i: usize) -> u32 {
        self.digits[i]
    }

    pub fn is_dyadic(&self) -> bool {
        self.radices.iter().all(|&r| r == 2)
    }

    /// Number of positions holding the digit `d`.
    pub fn count_digit(&self, d: u32) -> usize {
        self.digits.iter().filter(|&&x| x == d).count()
    }

    /// True when `prefix` matches this word position by position.
    pub fn starts_with(&self, prefix: &DigitWord) -> bool {
        prefix.len() <= self.len()
            && self.digits[..prefix.len()] == prefix.digits[..]
            && self.radices[..prefix.len()] == prefix.radices[..]
    }

    /// The integer this window expands, `Σ digit_i · Π_{j<i} radix_j`.
    pub fn value(&self) -> BigUint {
        let mut total = BigUint::zero();
        let mut place = BigUint::one();
        for (&digit, &radix) in self.digits.iter().zip(&self.radices) {
            total += digit * &place;
            place *= radix;
        }
        total
    }

    /// Number of distinct words on these radices, `Π radix_i`.
    pub fn capacity(&self) -> BigUint {
        self.radices
            .iter()
            .fold(BigUint::one(), |acc, &r| acc * BigUint::from(r))
    }
}

impl fmt::Display for DigitWord {
    /// Compact digit string when every radix fits one character, otherwise a
    /// comma-separated digit list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radices.iter().all(|&r| r <= 10) {
            for &d in &self.digits {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for DigitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        DigitWord::dyadic_from_str(s)
    }
}

/// Adds 1 with carry; undetermined when the carry would leave the window
/// (every digit maximal).
pub fn odometer_step(w: &DigitWord) -> StepResult {
    let mut digits = w.digits().to_vec();
    for i in 0..digits.len() {
        if digits[i] + 1 < w.radices()[i] {
            digits[i] += 1;
            for d in digits.iter_mut().take(i) {
                *d = 0;
            }
            let out =
                DigitWord::new(digits, w.radices().to_vec()).expect("carry preserves digit bounds");
            return Windowed::Determined(out);
        }
    }
    Windowed::Undetermined
}

/// Adds 1 modulo the window capacity: the all-maximal word wraps to zero.
pub fn odometer_step_wrapping(w: &DigitWord) -> DigitWord {
    match odometer_step(w) {
        Windowed::Determined(next) => next,
        Windowed::Undetermined => {
            DigitWord::zeros(w.radices().to_vec()).expect("radices already validated")
        }
    }
}

/// Translates by `j`: the digit expansion of `value(w) + j`, undetermined as
/// soon as the sum no longer fits the window.
pub fn add_natural(w: &DigitWord, j: &BigUint) -> StepResult {
    let total = w.value() + j;
    if total >= w.capacity() {
        return Windowed::Undetermined;
    }
    let mut digits = Vec::with_capacity(w.len());
    let mut rest = total;
    for &radix in w.radices() {
        let big_radix = BigUint::from(radix);
        let digit = (&rest % &big_radix)
            .to_u32()
            .expect("remainder below a u32 radix");
        digits.push(digit);
        rest /= big_radix;
    }
    let out = DigitWord::new(digits, w.radices().to_vec()).expect("expansion stays in bounds");
    Windowed::Determined(out)
}

/// A product measure on the digit space.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    /// Uniform digits, `Π 1/radix_i` per cylinder.
    Haar,
    /// I.i.d. biased bits on dyadic words, digit-1 probability `p`.
    Bernoulli { p: BigRational },
}

impl MeasureSpec {
    pub fn haar() -> Self {
        MeasureSpec::Haar
    }

    pub fn bernoulli(p: BigRational) -> Result<Self, Error> {
        if p <= BigRational::zero() || p >= BigRational::one() {
            return Err(Error::InvalidProbability {
                p: crate::ratio::format_ratio(&p),
            });
        }
        Ok(MeasureSpec::Bernoulli { p })
    }
}

/// Exact measure of the cylinder of all extensions of `w`.
pub fn cylinder_measure(w: &DigitWord, spec: &MeasureSpec) -> Result<BigRational, Error> {
    match spec {
        MeasureSpec::Haar => {
            let mut mass = BigRational::one();
            for &radix in w.radices() {
                mass /= BigRational::from_integer(radix.into());
            }
            Ok(mass)
        }
        MeasureSpec::Bernoulli { p } => {
            if !w.is_dyadic() {
                return Err(Error::NonDyadic {
                    context: "bernoulli cylinder measure",
                });
            }
            let ones = w.count_digit(1);
            let zeros = w.count_digit(0);
            let q = BigRational::one() - p;
            let mut mass = BigRational::one();
            for _ in 0..ones {
                mass *= p;
            }
            for _ in 0..zeros {
                mass *= &q;
            }
            Ok(mass)
        }
    }
}

/// Draws one word on the given radices. Bernoulli requires dyadic radices.
pub fn sample_word(
    spec: &MeasureSpec,
    radices: &[u32],
    rng: &mut impl Rng,
) -> Result<DigitWord, Error> {
    if radices.is_empty() {
        return Err(Error::EmptyWord);
    }
    let digits: Vec<u32> = match spec {
        MeasureSpec::Haar => radices.iter().map(|&r| rng.gen_range(0..r)).collect(),
        MeasureSpec::Bernoulli { p } => {
            if radices.iter().any(|&r| r != 2) {
                return Err(Error::NonDyadic {
                    context: "bernoulli sampling",
                });
            }
            let p = p.to_f64().expect("probability fits f64");
            radices
                .iter()
                .map(|_| if rng.gen_bool(p) { 1 } else { 0 })
                .collect()
        }
    };
    DigitWord::new(digits, radices.to_vec())
}

/// Draws one dyadic word of the given length.
pub fn sample_dyadic(
    spec: &MeasureSpec,
    len: usize,
    rng: &mut impl Rng,
) -> Result<DigitWord, Error> {
    sample_word(spec, &vec![2; len], rng)
}

/// All dyadic words of length `len` in value order. `len` must stay small
/// enough to enumerate (`len ≤ 30`).
pub fn dyadic_words(len: usize) -> impl Iterator<Item = DigitWord> {
    assert!(
        (1..=30).contains(&len),
        "window length {len} not enumerable"
    );
    (0u64..(1u64 << len)).map(move |v| {
        let digits: Vec<u32> = (0..len).map(|i| ((v >> i) & 1) as u32).collect();
        DigitWord::dyadic(digits).expect("bits are valid dyadic digits")
    })
}
