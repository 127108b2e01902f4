//! Generalized and classical induced transformations over digit windows.
//!
//! A [`TransformationSpec`] wraps a named single-step map on digit words
//! with window semantics (see [`crate::word::Windowed`]). Radix constraints
//! live inside the step function itself: a step that needs dyadic input
//! returns [`Error::NonDyadic`].
//!
//! [`generalized_induced`] forms `w -> T^{c(w)}(w)` for a ceiling function
//! `c >= 0`; with the odometer as `T` and the Pascal jump as ceiling this
//! reproduces the Pascal transformation. [`classical_induced`] is the
//! first-return map to a union of cylinders, and [`check_orbit_refinement`]
//! verifies that one map's steps stay on the forward orbits of another.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::pascal::{jump, pascal_inverse, pascal_step};
use crate::word::{
    cylinder_measure, dyadic_words, odometer_step, odometer_step_wrapping, DigitWord, MeasureSpec,
    StepResult, Windowed,
};

/// Exhaustive checks enumerate every dyadic word of the window length; this
/// bounds the blow-up.
const MAX_EXHAUSTIVE_WINDOW: usize = 16;

type StepFn = Arc<dyn Fn(&DigitWord) -> Result<StepResult, Error> + Send + Sync>;

/// A ceiling assigns each word an iteration count, window permitting.
pub type CeilingFn = Arc<dyn Fn(&DigitWord) -> Result<Windowed<BigUint>, Error> + Send + Sync>;

/// A named single-step transformation on digit windows.
#[derive(Clone)]
pub struct TransformationSpec {
    name: String,
    step: StepFn,
}

impl std::fmt::Debug for TransformationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformationSpec")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl TransformationSpec {
    pub fn new(
        name: impl Into<String>,
        step: impl Fn(&DigitWord) -> Result<StepResult, Error> + Send + Sync + 'static,
    ) -> Self {
        TransformationSpec {
            name: name.into(),
            step: Arc::new(step),
        }
    }

    /// Add-one-with-carry; undetermined once the carry leaves the window.
    pub fn odometer() -> Self {
        TransformationSpec::new("odometer", |w| Ok(odometer_step(w)))
    }

    /// Add one modulo the window capacity (the cyclic window dynamics).
    pub fn odometer_wrapping() -> Self {
        TransformationSpec::new("odometer-wrap", |w| {
            Ok(Windowed::Determined(odometer_step_wrapping(w)))
        })
    }

    pub fn pascal() -> Self {
        TransformationSpec::new("pascal", pascal_step)
    }

    pub fn pascal_inverse() -> Self {
        TransformationSpec::new("pascal-inverse", pascal_inverse)
    }

    pub fn identity() -> Self {
        TransformationSpec::new("identity", |w| Ok(Windowed::Determined(w.clone())))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, w: &DigitWord) -> Result<StepResult, Error> {
        (self.step)(w)
    }

    /// `T^n(w)`; undetermined as soon as any intermediate step is.
    pub fn iterate(&self, w: &DigitWord, n: &BigUint) -> Result<StepResult, Error> {
        let Some(mut remaining) = n.to_u64() else {
            return Err(Error::BudgetExhausted { budget: u64::MAX });
        };
        let mut current = w.clone();
        while remaining > 0 {
            match self.apply(&current)? {
                Windowed::Determined(next) => current = next,
                Windowed::Undetermined => return Ok(Windowed::Undetermined),
            }
            remaining -= 1;
        }
        Ok(Windowed::Determined(current))
    }
}

/// The transformation `w -> T^{ceiling(w)}(w)`.
pub fn generalized_induced(
    base: &TransformationSpec,
    ceiling: CeilingFn,
    name: impl Into<String>,
) -> TransformationSpec {
    let base = base.clone();
    TransformationSpec::new(name, move |w| {
        let height = match (ceiling)(w)? {
            Windowed::Determined(h) => h,
            Windowed::Undetermined => return Ok(Windowed::Undetermined),
        };
        base.iterate(w, &height)
    })
}

/// The Pascal jump as a [`CeilingFn`].
pub fn jump_ceiling() -> CeilingFn {
    Arc::new(jump)
}

/// Enumerates determined images over all dyadic words of the window length
/// and reports whether the step hits any image twice.
pub fn check_injectivity(spec: &TransformationSpec, len: usize) -> Result<bool, Error> {
    guard_window(len)?;
    let mut seen = HashSet::new();
    for word in dyadic_words(len) {
        if let Windowed::Determined(image) = spec.apply(&word)? {
            if !seen.insert(image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One starting word of a first-return computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnRecord {
    pub start: DigitWord,
    /// Landing word and return time, or undetermined when the window gives
    /// out (the map went undetermined, or no return happened within one
    /// full window capacity of steps).
    pub outcome: Windowed<(DigitWord, u64)>,
}

/// First-return map to the union of the `base` cylinders, over all dyadic
/// words of length `len` whose prefix lies in the base.
pub fn classical_induced(
    map: &TransformationSpec,
    base: &[DigitWord],
    len: usize,
) -> Result<Vec<ReturnRecord>, Error> {
    guard_window(len)?;
    validate_base(base, len)?;
    let budget = 1u64 << len;
    let in_base = |w: &DigitWord| base.iter().any(|p| w.starts_with(p));
    let mut records = Vec::new();
    for word in dyadic_words(len) {
        if !in_base(&word) {
            continue;
        }
        let mut current = word.clone();
        let mut outcome = Windowed::Undetermined;
        for time in 1..=budget {
            match map.apply(&current)? {
                Windowed::Determined(next) => {
                    current = next;
                    if in_base(&current) {
                        outcome = Windowed::Determined((current.clone(), time));
                        break;
                    }
                }
                Windowed::Undetermined => break,
            }
        }
        records.push(ReturnRecord {
            start: word,
            outcome,
        });
    }
    Ok(records)
}

/// `sum over records of return_time * cylinder_measure(start)`; exactly 1
/// for a measure-preserving window map returning to a cylinder base.
/// Undetermined if any record is.
pub fn kac_sum(
    records: &[ReturnRecord],
    spec: &MeasureSpec,
) -> Result<Windowed<BigRational>, Error> {
    let mut total = BigRational::zero();
    for record in records {
        match &record.outcome {
            Windowed::Determined((_, time)) => {
                let mass = cylinder_measure(&record.start, spec)?;
                total += mass * BigRational::from_integer((*time).into());
            }
            Windowed::Undetermined => return Ok(Windowed::Undetermined),
        }
    }
    Ok(Windowed::Determined(total))
}

/// A word whose `P`-image never showed up on its forward `T`-orbit.
#[derive(Clone, Debug)]
pub struct RefinementFailure {
    pub word: DigitWord,
    pub image: DigitWord,
}

/// Result of [`check_orbit_refinement`].
#[derive(Clone, Debug)]
pub struct RefinementReport {
    pub pass: bool,
    pub words_checked: usize,
    /// How many `T`-steps each `P`-step took, where found.
    pub j_histogram: BTreeMap<u64, usize>,
    pub counterexamples: Vec<RefinementFailure>,
}

/// Verifies that every determined `P`-step lands on the forward `T`-orbit
/// of its source within `2^len` steps, i.e. that `P`'s orbits refine `T`'s.
pub fn check_orbit_refinement(
    p: &TransformationSpec,
    t: &TransformationSpec,
    len: usize,
) -> Result<RefinementReport, Error> {
    guard_window(len)?;
    let budget = 1u64 << len;
    let mut report = RefinementReport {
        pass: true,
        words_checked: 0,
        j_histogram: BTreeMap::new(),
        counterexamples: Vec::new(),
    };
    for word in dyadic_words(len) {
        let Windowed::Determined(image) = p.apply(&word)? else {
            continue;
        };
        report.words_checked += 1;
        let mut current = word.clone();
        let mut found = None;
        for j in 0..=budget {
            if current == image {
                found = Some(j);
                break;
            }
            match t.apply(&current)? {
                Windowed::Determined(next) => current = next,
                Windowed::Undetermined => break,
            }
        }
        match found {
            Some(j) => *report.j_histogram.entry(j).or_insert(0) += 1,
            None => {
                report.pass = false;
                report
                    .counterexamples
                    .push(RefinementFailure { word, image });
            }
        }
    }
    Ok(report)
}

fn guard_window(len: usize) -> Result<(), Error> {
    if len < 1 {
        return Err(Error::WindowTooShort { len, min: 1 });
    }
    if len > MAX_EXHAUSTIVE_WINDOW {
        return Err(Error::WindowTooLong {
            len,
            max: MAX_EXHAUSTIVE_WINDOW,
        });
    }
    Ok(())
}

fn validate_base(base: &[DigitWord], len: usize) -> Result<usize, Error> {
    let Some(first) = base.first() else {
        return Err(Error::EmptyBase);
    };
    let prefix_len = first.len();
    if base.iter().any(|p| p.len() != prefix_len) {
        return Err(Error::MixedBaseLengths);
    }
    if prefix_len > len {
        return Err(Error::PrefixTooLong {
            prefix: prefix_len,
            len,
        });
    }
    Ok(prefix_len)
}
