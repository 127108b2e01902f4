//! The skyscraper over the Pascal map with the jump as ceiling: a σ-finite
//! quasi-odometer.
//!
//! A [`TowerPoint`] is a base word `x` together with a fiber level
//! `y ∈ {0, 1, …, n(x)}` where `n` is the Pascal jump. [`hk_step`] climbs
//! the fiber and applies the Pascal map at the top:
//!
//! ```text
//! (x, y) -> (x, y + 1)        if y < n(x)
//! (x, y) -> (Px, 0)           if y = n(x)
//! ```
//!
//! The measure puts the Haar mass of the base cylinder on every fiber point
//! (counting measure along fibers), so the total mass of a window grows
//! without bound as the window widens; [`level_measure`] and
//! [`sigma_finite_report`] quantify that divergence exactly.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::pascal::{jump, pascal_inverse, pascal_step};
use crate::word::{dyadic_words, DigitWord, Windowed};

/// A point of the tower: base word plus fiber level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerPoint {
    base: DigitWord,
    level: u64,
}

impl TowerPoint {
    /// Validates `level <= jump(base)` whenever the jump is determined; an
    /// undetermined jump constrains nothing.
    pub fn new(base: DigitWord, level: u64) -> Result<Self, Error> {
        if let Windowed::Determined(ceiling) = jump(&base)? {
            if BigUint::from(level) > ceiling {
                return Err(Error::LevelAboveCeiling {
                    level,
                    ceiling: ceiling.to_u64().unwrap_or(u64::MAX),
                });
            }
        }
        Ok(TowerPoint { base, level })
    }

    pub fn base(&self) -> &DigitWord {
        &self.base
    }

    pub fn level(&self) -> u64 {
        self.level
    }
}

impl std::fmt::Display for TowerPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.base, self.level)
    }
}

/// One step up the fiber, or the Pascal map and a drop to level 0 at the
/// ceiling. Undetermined exactly when the jump of the base is.
pub fn hk_step(pt: &TowerPoint) -> Result<Windowed<TowerPoint>, Error> {
    let ceiling = match jump(&pt.base)? {
        Windowed::Determined(n) => n,
        Windowed::Undetermined => return Ok(Windowed::Undetermined),
    };
    let level = BigUint::from(pt.level);
    if level > ceiling {
        return Err(Error::LevelAboveCeiling {
            level: pt.level,
            ceiling: ceiling.to_u64().unwrap_or(u64::MAX),
        });
    }
    if level < ceiling {
        return Ok(Windowed::Determined(TowerPoint {
            base: pt.base.clone(),
            level: pt.level + 1,
        }));
    }
    let next = pascal_step(&pt.base)?.expect_determined("jump determined implies step determined");
    Ok(Windowed::Determined(TowerPoint {
        base: next,
        level: 0,
    }))
}

/// Inverse of [`hk_step`]: down the fiber, or onto the previous base's top
/// level when already at 0.
pub fn hk_inverse(pt: &TowerPoint) -> Result<Windowed<TowerPoint>, Error> {
    if pt.level >= 1 {
        return Ok(Windowed::Determined(TowerPoint {
            base: pt.base.clone(),
            level: pt.level - 1,
        }));
    }
    let previous = match pascal_inverse(&pt.base)? {
        Windowed::Determined(prev) => prev,
        Windowed::Undetermined => return Ok(Windowed::Undetermined),
    };
    let ceiling = jump(&previous)?
        .expect_determined("a word with a pascal image has a determined jump")
        .to_u64()
        .ok_or(Error::BudgetExhausted { budget: u64::MAX })?;
    Ok(Windowed::Determined(TowerPoint {
        base: previous,
        level: ceiling,
    }))
}

/// Runs [`hk_step`] from a level-0 point until the orbit touches level 0
/// again. The landing point is `(pascal_step(base), 0)` after
/// `jump(base) + 1` steps; both facts are checked by the test suite rather
/// than assumed here.
pub fn first_return_to_base(pt: &TowerPoint) -> Result<Windowed<(TowerPoint, u64)>, Error> {
    if pt.level != 0 {
        return Err(Error::NotAtBase { level: pt.level });
    }
    let mut current = pt.clone();
    let mut steps = 0u64;
    loop {
        current = match hk_step(&current)? {
            Windowed::Determined(next) => next,
            Windowed::Undetermined => return Ok(Windowed::Undetermined),
        };
        steps += 1;
        if current.level == 0 {
            return Ok(Windowed::Determined((current, steps)));
        }
    }
}

/// A finite stretch of a tower orbit.
#[derive(Clone, Debug)]
pub struct OrbitSegment {
    /// Visited points, starting point included.
    pub points: Vec<TowerPoint>,
    /// False when the window went undetermined before `steps` were taken.
    pub complete: bool,
}

/// Iterates [`hk_step`] up to `steps` times, keeping the partial orbit when
/// determinacy runs out mid-flight.
pub fn hk_orbit(start: &TowerPoint, steps: u64) -> Result<OrbitSegment, Error> {
    let mut points = vec![start.clone()];
    let mut current = start.clone();
    for _ in 0..steps {
        match hk_step(&current)? {
            Windowed::Determined(next) => {
                points.push(next.clone());
                current = next;
            }
            Windowed::Undetermined => {
                return Ok(OrbitSegment {
                    points,
                    complete: false,
                })
            }
        }
    }
    Ok(OrbitSegment {
        points,
        complete: true,
    })
}

/// Haar mass of the level-`y` slice visible in a window of the given
/// length: the measure of the determined words whose jump is at least `y`.
/// Every jump-determining prefix `0^m 1^k 1 0` contributes `2^-(m+k+2)`.
pub fn level_measure(y: u64, window: usize) -> BigRational {
    let y = BigUint::from(y);
    let mut total = BigRational::zero();
    if window < 2 {
        return total;
    }
    for span in 0..=(window - 2) {
        let weight = BigRational::new(BigUint::one().into(), (BigUint::one() << (span + 2)).into());
        for m in 0..=span {
            let k = span - m;
            let n = (BigUint::one() << m) + (BigUint::one() << k) - BigUint::one();
            if n >= y {
                total += &weight;
            }
        }
    }
    total
}

/// Exact per-level and cumulative tower masses at one window length.
#[derive(Clone, Debug)]
pub struct SigmaFiniteReport {
    pub window: usize,
    /// `levels[y]` = [`level_measure`]`(y, window)` for `y = 0..=max_level`.
    pub levels: Vec<BigRational>,
    /// Running sums of `levels`; non-decreasing.
    pub cumulative: Vec<BigRational>,
}

pub fn sigma_finite_report(max_level: u64, window: usize) -> SigmaFiniteReport {
    let mut levels = Vec::with_capacity(max_level as usize + 1);
    let mut cumulative = Vec::with_capacity(max_level as usize + 1);
    let mut running = BigRational::zero();
    for y in 0..=max_level {
        let mass = level_measure(y, window);
        running += &mass;
        levels.push(mass);
        cumulative.push(running.clone());
    }
    SigmaFiniteReport {
        window,
        levels,
        cumulative,
    }
}

/// Total tower mass of a window: every determined base word carries
/// `jump + 1` fiber points of its cylinder mass, summed per jump pattern.
pub fn total_tower_measure(window: usize) -> BigRational {
    let mut total = BigRational::zero();
    if window < 2 {
        return total;
    }
    for span in 0..=(window - 2) {
        let weight = BigRational::new(BigUint::one().into(), (BigUint::one() << (span + 2)).into());
        for m in 0..=span {
            let fiber = (BigUint::one() << m) + (BigUint::one() << (span - m));
            total += &weight * BigRational::from_integer(fiber.into());
        }
    }
    total
}

/// Result of [`truncated_bijectivity_check`].
#[derive(Clone, Debug)]
pub struct BijectivityReport {
    pub pass: bool,
    pub points_checked: usize,
    pub failures: Vec<String>,
}

/// Exhaustively checks, over every determined tower point with a given base
/// length, that `hk_step` is injective and `hk_inverse` undoes it.
pub fn truncated_bijectivity_check(window: usize) -> Result<BijectivityReport, Error> {
    if window < 1 {
        return Err(Error::WindowTooShort {
            len: window,
            min: 1,
        });
    }
    if window > 16 {
        return Err(Error::WindowTooLong {
            len: window,
            max: 16,
        });
    }
    let mut report = BijectivityReport {
        pass: true,
        points_checked: 0,
        failures: Vec::new(),
    };
    let fail = |failures: &mut Vec<String>, message: String| {
        failures.push(message);
    };
    let mut images = std::collections::HashSet::new();
    for base in dyadic_words(window) {
        let Windowed::Determined(ceiling) = jump(&base)? else {
            continue;
        };
        let ceiling = ceiling.to_u64().expect("window jumps fit u64");
        for level in 0..=ceiling {
            let pt = TowerPoint::new(base.clone(), level)?;
            report.points_checked += 1;
            let Windowed::Determined(image) = hk_step(&pt)? else {
                fail(
                    &mut report.failures,
                    format!("{pt}: step undetermined despite determined jump"),
                );
                continue;
            };
            if !images.insert(image.clone()) {
                fail(&mut report.failures, format!("{image}: hit twice"));
            }
            match hk_inverse(&image)? {
                Windowed::Determined(back) if back == pt => {}
                other => fail(
                    &mut report.failures,
                    format!("{pt}: inverse of image gave {other:?}"),
                ),
            }
            if let Windowed::Determined(down) = hk_inverse(&pt)? {
                match hk_step(&down)? {
                    Windowed::Determined(up) if up == pt => {}
                    other => fail(
                        &mut report.failures,
                        format!("{pt}: step of inverse gave {other:?}"),
                    ),
                }
            }
        }
    }
    report.pass = report.failures.is_empty();
    Ok(report)
}

/// Largest fiber ceiling visible in the window: `2^m + 2^k - 1` maximized
/// over `m + k + 2 <= window` puts the whole span in one exponent.
pub fn max_window_ceiling(window: usize) -> u64 {
    match window {
        0 | 1 => 0,
        w if w - 2 >= 64 => u64::MAX,
        w => 1u64 << (w - 2),
    }
}
