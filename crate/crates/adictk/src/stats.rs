//! Rank statistics of the Pascal orbit order, their Monte Carlo laws, the
//! Takagi partial sums, and the truncated jump expectation.
//!
//! The rank of a word inside its composition class (see
//! [`crate::pascal::rank_in_class`]) is the orbit coordinate the limit-law
//! question is about. Nobody knows the right centering/scaling, so
//! [`monte_carlo_cdf`] defaults to the bare fraction `u = t / C(n, m)` and
//! accepts user-supplied affine ladders for hypothesis testing; it never
//! asserts convergence. Everything except the sampling itself is exact
//! rational arithmetic.

use std::collections::BTreeMap;
use std::num::NonZeroU32;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::pascal::{class_size, rank_in_class};
use crate::ratio::format_ratio;
use crate::word::{sample_dyadic, DigitWord, MeasureSpec};

/// The rank statistic of one word: length `n`, zero count `m`, orbit
/// position `t`, and the class fraction `u = t / C(n, m) ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankRecord {
    pub n: usize,
    pub m: usize,
    pub t: BigUint,
    pub u: BigRational,
}

impl RankRecord {
    pub fn from_word(w: &DigitWord) -> Result<Self, Error> {
        let t = rank_in_class(w)?;
        let m = w.count_digit(0);
        let size = class_size(w.len(), m)?;
        let u = BigRational::new(t.clone().into(), size.into());
        Ok(RankRecord {
            n: w.len(),
            m,
            t,
            u,
        })
    }
}

/// Per-length affine renormalizations `t -> (t - a) / b`.
#[derive(Clone, Debug, Default)]
pub struct NormalizationLadder {
    entries: BTreeMap<usize, (BigRational, BigRational)>,
}

impl NormalizationLadder {
    /// Builds a ladder from `(n, a_n, b_n)` rows; every `b_n` must be
    /// positive.
    pub fn new(rows: Vec<(usize, BigRational, BigRational)>) -> Result<Self, Error> {
        let mut entries = BTreeMap::new();
        for (n, a, b) in rows {
            if b <= BigRational::zero() {
                return Err(Error::DegenerateScale {
                    b: format_ratio(&b),
                });
            }
            entries.insert(n, (a, b));
        }
        Ok(NormalizationLadder { entries })
    }

    pub fn entry(&self, n: usize) -> Result<&(BigRational, BigRational), Error> {
        self.entries.get(&n).ok_or(Error::MissingLadderEntry { n })
    }
}

/// How a sampled rank is reduced to the recorded statistic.
#[derive(Clone, Debug, Default)]
pub enum Normalization {
    /// `u = t / C(n, m)` with the sample's own class size.
    #[default]
    RankFraction,
    /// `(t - a_n) / b_n` from a user ladder.
    Ladder(NormalizationLadder),
}

impl Normalization {
    fn apply(&self, record: &RankRecord) -> Result<BigRational, Error> {
        match self {
            Normalization::RankFraction => Ok(record.u.clone()),
            Normalization::Ladder(ladder) => {
                let (a, b) = ladder.entry(record.n)?;
                let t = BigRational::from_integer(record.t.clone().into());
                Ok((t - a) / b)
            }
        }
    }
}

/// An exact empirical distribution: sorted sample values, equal weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalCdf {
    values: Vec<BigRational>,
}

impl EmpiricalCdf {
    pub fn from_values(mut values: Vec<BigRational>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::ZeroSamples);
        }
        values.sort();
        Ok(EmpiricalCdf { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty samples
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Fraction of samples `<= q` (right-continuous step function).
    pub fn eval(&self, q: &BigRational) -> BigRational {
        let below = self.values.partition_point(|v| v <= q);
        BigRational::new((below as u64).into(), (self.len() as u64).into())
    }

    /// The smallest sample value whose CDF reaches `p`, for `p ∈ (0, 1]`.
    pub fn quantile(&self, p: &BigRational) -> Result<&BigRational, Error> {
        if *p <= BigRational::zero() || *p > BigRational::one() {
            return Err(Error::InvalidProbability { p: format_ratio(p) });
        }
        let scaled = p * BigRational::from_integer((self.len() as u64).into());
        let index = scaled.ceil().to_integer().to_usize().expect("p*N fits") - 1;
        Ok(&self.values[index])
    }
}

/// One Monte Carlo draw.
#[derive(Clone, Debug)]
pub struct RankSample {
    pub record: RankRecord,
    pub normalized: BigRational,
}

/// All draws for one word length, with the unconditioned law of the
/// normalized statistic and the per-zero-count laws of `u`.
#[derive(Clone, Debug)]
pub struct RankLawEstimate {
    pub n: usize,
    pub samples: Vec<RankSample>,
    pub overall: EmpiricalCdf,
    pub by_zero_count: BTreeMap<usize, EmpiricalCdf>,
}

/// Monte Carlo settings; the same seed reproduces the same draws, and each
/// ladder length samples on its own RNG stream so the per-`n` results do
/// not depend on ladder order.
#[derive(Clone, Debug)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub normalization: Normalization,
    pub seed: u64,
}

pub fn monte_carlo_cdf(
    spec: &MeasureSpec,
    n_ladder: &[usize],
    config: &MonteCarloConfig,
) -> Result<Vec<RankLawEstimate>, Error> {
    if config.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let mut estimates = Vec::with_capacity(n_ladder.len());
    for &n in n_ladder {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(n as u64);
        let mut samples = Vec::with_capacity(config.samples);
        let mut normalized_values = Vec::with_capacity(config.samples);
        let mut per_m: BTreeMap<usize, Vec<BigRational>> = BTreeMap::new();
        for _ in 0..config.samples {
            let word = sample_dyadic(spec, n, &mut rng)?;
            let record = RankRecord::from_word(&word)?;
            let normalized = config.normalization.apply(&record)?;
            normalized_values.push(normalized.clone());
            per_m.entry(record.m).or_default().push(record.u.clone());
            samples.push(RankSample { record, normalized });
        }
        let by_zero_count = per_m
            .into_iter()
            .map(|(m, values)| EmpiricalCdf::from_values(values).map(|cdf| (m, cdf)))
            .collect::<Result<_, _>>()?;
        estimates.push(RankLawEstimate {
            n,
            samples,
            overall: EmpiricalCdf::from_values(normalized_values)?,
            by_zero_count,
        });
    }
    Ok(estimates)
}

/// Distance from a rational to its nearest integer.
fn distance_to_integers(r: &BigRational) -> BigRational {
    let frac = r - r.floor();
    let complement = BigRational::one() - &frac;
    frac.min(complement)
}

/// Partial sum of `Σ 2^{-j} dist(2^j t, Z)` over `j < terms`, with the tail
/// bound `2^{1-terms}` (each omitted term is at most `2^{-j-1}`).
pub fn takagi(t: &BigRational, terms: NonZeroU32) -> Result<(BigRational, BigRational), Error> {
    if t.is_negative() || *t > BigRational::one() {
        return Err(Error::TakagiDomain { t: format_ratio(t) });
    }
    let mut total = BigRational::zero();
    let mut argument = t.clone();
    let mut weight = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    for _ in 0..terms.get() {
        total += &weight * distance_to_integers(&argument);
        argument = &argument + &argument;
        weight *= &half;
    }
    // weight is now 2^-terms; the tail is bounded by twice that
    let bound = &weight + &weight;
    Ok((total, bound))
}

/// Exact truncated expectation of the jump over a Haar window: each jump
/// pattern `0^m 1^k 1 0` contributes `(2^m + 2^k - 1) · 2^-(m+k+2)`.
pub fn truncated_jump_expectation(window: usize) -> Result<BigRational, Error> {
    if window < 2 {
        return Err(Error::WindowTooShort {
            len: window,
            min: 2,
        });
    }
    let mut total = BigRational::zero();
    for span in 0..=(window - 2) {
        let weight = BigRational::new(1.into(), (BigUint::one() << (span + 2)).into());
        for m in 0..=span {
            let jump = (BigUint::one() << m) + (BigUint::one() << (span - m)) - BigUint::one();
            total += &weight * BigRational::from_integer(jump.into());
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pascal::jump;
    use crate::word::{cylinder_measure, dyadic_words, Windowed};

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn nz(v: u32) -> NonZeroU32 {
        NonZeroU32::new(v).unwrap()
    }

    #[test]
    fn rank_records_freeze_the_chain() {
        let expected = [("1100", 0), ("1010", 1), ("0110", 2), ("0011", 5)];
        for (word, t) in expected {
            let record = RankRecord::from_word(&DigitWord::dyadic_from_str(word).unwrap()).unwrap();
            assert_eq!(record.t, BigUint::from(t as u32));
            assert_eq!(record.m, 2);
            assert_eq!(record.u, ratio(t, 6));
        }
    }

    #[test]
    fn empirical_cdf_evaluates_exactly() {
        let cdf =
            EmpiricalCdf::from_values(vec![ratio(1, 2), ratio(1, 4), ratio(3, 4), ratio(1, 4)])
                .unwrap();
        assert_eq!(cdf.eval(&ratio(0, 1)), ratio(0, 1));
        assert_eq!(cdf.eval(&ratio(1, 4)), ratio(1, 2));
        assert_eq!(cdf.eval(&ratio(2, 3)), ratio(3, 4));
        assert_eq!(cdf.eval(&ratio(1, 1)), ratio(1, 1));
        assert_eq!(cdf.quantile(&ratio(1, 2)).unwrap(), &ratio(1, 4));
        assert_eq!(cdf.quantile(&ratio(1, 1)).unwrap(), &ratio(3, 4));
        assert!(cdf.quantile(&ratio(0, 1)).is_err());
        assert!(cdf.quantile(&ratio(3, 2)).is_err());
        assert!(EmpiricalCdf::from_values(vec![]).is_err());
    }

    #[test]
    fn monte_carlo_is_reproducible_and_order_free() {
        let config = MonteCarloConfig {
            samples: 200,
            normalization: Normalization::RankFraction,
            seed: 11,
        };
        let a = monte_carlo_cdf(&MeasureSpec::Haar, &[4, 6], &config).unwrap();
        let b = monte_carlo_cdf(&MeasureSpec::Haar, &[6, 4], &config).unwrap();
        let c = monte_carlo_cdf(&MeasureSpec::Haar, &[4, 6], &config).unwrap();
        assert_eq!(a[0].overall, c[0].overall);
        assert_eq!(a[1].overall, c[1].overall);
        // ladder order does not change the per-length draws
        assert_eq!(a[0].overall, b[1].overall);
        assert_eq!(a[1].overall, b[0].overall);
    }

    #[test]
    fn monte_carlo_validates_inputs() {
        let config = MonteCarloConfig {
            samples: 0,
            normalization: Normalization::RankFraction,
            seed: 0,
        };
        assert!(matches!(
            monte_carlo_cdf(&MeasureSpec::Haar, &[4], &config),
            Err(Error::ZeroSamples)
        ));
    }

    #[test]
    fn ladder_normalization_applies_affinely() {
        let ladder = NormalizationLadder::new(vec![(4, ratio(1, 1), ratio(2, 1))]).unwrap();
        let config = MonteCarloConfig {
            samples: 50,
            normalization: Normalization::Ladder(ladder),
            seed: 3,
        };
        let estimates = monte_carlo_cdf(&MeasureSpec::Haar, &[4], &config).unwrap();
        for sample in &estimates[0].samples {
            let t = BigRational::from_integer(sample.record.t.clone().into());
            assert_eq!(sample.normalized, (t - ratio(1, 1)) / ratio(2, 1));
        }
        // a length missing from the ladder is an error
        let ladder = NormalizationLadder::new(vec![(4, ratio(0, 1), ratio(1, 1))]).unwrap();
        let config = MonteCarloConfig {
            samples: 5,
            normalization: Normalization::Ladder(ladder),
            seed: 3,
        };
        assert!(matches!(
            monte_carlo_cdf(&MeasureSpec::Haar, &[5], &config),
            Err(Error::MissingLadderEntry { n: 5 })
        ));
        assert!(matches!(
            NormalizationLadder::new(vec![(4, ratio(0, 1), ratio(0, 1))]),
            Err(Error::DegenerateScale { .. })
        ));
    }

    #[test]
    fn conditioned_law_is_uniform_on_small_classes() {
        // Haar conditioned on the class (n=4, m=2) is uniform on ranks 0..6:
        // with 20k samples each u-atom holds ~1/6 of the conditioned draws.
        let config = MonteCarloConfig {
            samples: 20_000,
            normalization: Normalization::RankFraction,
            seed: 5,
        };
        let estimates = monte_carlo_cdf(&MeasureSpec::Haar, &[4], &config).unwrap();
        let conditioned = &estimates[0].by_zero_count[&2];
        let total = conditioned.len() as f64;
        for t in 0..6i64 {
            let p_here = conditioned.eval(&ratio(t, 6)).to_f64().unwrap();
            let p_prev = if t == 0 {
                0.0
            } else {
                conditioned.eval(&ratio(t - 1, 6)).to_f64().unwrap()
            };
            let freq = p_here - p_prev;
            let sigma = ((1.0 / 6.0) * (5.0 / 6.0) / total).sqrt();
            assert!(
                (freq - 1.0 / 6.0).abs() < 5.0 * sigma,
                "atom {t}: frequency {freq}"
            );
        }
    }

    #[test]
    fn takagi_fixed_points() {
        assert_eq!(takagi(&ratio(0, 1), nz(5)).unwrap().0, BigRational::zero());
        assert_eq!(takagi(&ratio(1, 1), nz(5)).unwrap().0, BigRational::zero());
        assert_eq!(takagi(&ratio(1, 4), nz(3)).unwrap().0, ratio(1, 2));
        assert_eq!(takagi(&ratio(1, 4), nz(30)).unwrap().0, ratio(1, 2));
        assert_eq!(takagi(&ratio(1, 2), nz(2)).unwrap().0, ratio(1, 2));
        let (_, bound) = takagi(&ratio(1, 3), nz(4)).unwrap();
        assert_eq!(bound, ratio(1, 8));
        assert!(takagi(&ratio(-1, 2), nz(3)).is_err());
        assert!(takagi(&ratio(3, 2), nz(3)).is_err());
    }

    #[test]
    fn takagi_partial_sums_converge_within_their_bound() {
        for t in [ratio(1, 3), ratio(2, 7), ratio(13, 64), ratio(5, 9)] {
            let mut previous = BigRational::zero();
            for terms in 1..=20u32 {
                let (value, bound) = takagi(&t, nz(terms)).unwrap();
                assert!(value >= previous, "partial sums grow");
                let (refined, _) = takagi(&t, nz(terms + 10)).unwrap();
                assert!(&refined - &value <= bound);
                previous = value;
            }
        }
    }

    #[test]
    fn jump_expectation_small_windows() {
        assert_eq!(truncated_jump_expectation(2).unwrap(), ratio(1, 4));
        // closed form: E_L = L - 3 + (L + 3) / 2^L
        for window in 2..=20usize {
            let closed =
                ratio(window as i64 - 3, 1) + ratio(window as i64 + 3, 1) / ratio(1 << window, 1);
            assert_eq!(truncated_jump_expectation(window).unwrap(), closed);
        }
        assert!(matches!(
            truncated_jump_expectation(1),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn jump_expectation_matches_word_enumeration() {
        for window in 2..=12usize {
            let mut direct = BigRational::zero();
            for word in dyadic_words(window) {
                if let Windowed::Determined(j) = jump(&word).unwrap() {
                    direct += cylinder_measure(&word, &MeasureSpec::Haar).unwrap()
                        * BigRational::from_integer(j.into());
                }
            }
            assert_eq!(truncated_jump_expectation(window).unwrap(), direct);
        }
    }

    #[test]
    fn jump_expectation_is_strictly_increasing() {
        let mut previous = truncated_jump_expectation(2).unwrap();
        for window in 3..=24 {
            let here = truncated_jump_expectation(window).unwrap();
            assert!(here > previous, "window {window}");
            previous = here;
        }
    }
}
