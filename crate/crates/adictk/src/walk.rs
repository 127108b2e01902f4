//! Random walks on finitely generated groups: two-sided trajectory windows,
//! the shift, the σ-finite product measure on cylinders, and the Laplace
//! averaging operators.
//!
//! Three built-in group backends cover the cases the checks need: integer
//! lattices, free groups on reduced words, and cyclic groups. A trajectory
//! window stores points `y_n` for a contiguous index range and factorizes
//! as (increment sequence, anchor); the shift re-anchors indices instead of
//! dropping data, so shifting is lossless.
//!
//! Measures of trajectory cylinders are computed symbolically: a constraint
//! set `{s_{n_i} = a_i, y_0 ∈ F}` has mass `∏ ν(a_i) · |F|`, a number that
//! legitimately exceeds 1 because the group carries counting measure. The
//! shift moves such a cylinder to a finite disjoint union of cylinders of
//! the same total mass; [`cylinder_shift_invariance_check`] verifies that
//! identity exactly.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::Error;
use crate::ratio::format_ratio;

/// A group backend. Elements are [`GroupElem`] values of the matching
/// variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    /// `Z^dims` under addition.
    Integers { dims: usize },
    /// Free group on `rank` letters (at most 26), elements as reduced words.
    Free { rank: usize },
    /// `Z/modulus` under addition.
    Cyclic { modulus: u64 },
}

/// A group element. `Word` letters are `1..=rank` for generators and the
/// negated values for their inverses, with no adjacent cancelling pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElem {
    Vector(Vec<i64>),
    Word(Vec<i32>),
    Residue(u64),
}

impl Group {
    pub fn identity(&self) -> GroupElem {
        match self {
            Group::Integers { dims } => GroupElem::Vector(vec![0; *dims]),
            Group::Free { .. } => GroupElem::Word(Vec::new()),
            Group::Cyclic { .. } => GroupElem::Residue(0),
        }
    }

    pub fn validate(&self, e: &GroupElem) -> Result<(), Error> {
        let bad = |reason: String| Err(Error::InvalidElement { reason });
        match (self, e) {
            (Group::Integers { dims }, GroupElem::Vector(v)) => {
                if v.len() != *dims {
                    return bad(format!(
                        "vector has {} components, group needs {dims}",
                        v.len()
                    ));
                }
                Ok(())
            }
            (Group::Free { rank }, GroupElem::Word(w)) => {
                for &letter in w {
                    if letter == 0 || letter.unsigned_abs() as usize > *rank {
                        return bad(format!("letter {letter} outside rank {rank}"));
                    }
                }
                if w.windows(2).any(|pair| pair[0] == -pair[1]) {
                    return bad("word is not reduced".into());
                }
                Ok(())
            }
            (Group::Cyclic { modulus }, GroupElem::Residue(r)) => {
                if *modulus == 0 {
                    return bad("modulus must be positive".into());
                }
                if r >= modulus {
                    return bad(format!("residue {r} not below modulus {modulus}"));
                }
                Ok(())
            }
            _ => bad("element variant does not match the group backend".into()),
        }
    }

    pub fn multiply(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem, Error> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(match (a, b) {
            (GroupElem::Vector(x), GroupElem::Vector(y)) => {
                GroupElem::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupElem::Word(x), GroupElem::Word(y)) => {
                let mut out = x.clone();
                for &letter in y {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                GroupElem::Word(out)
            }
            (GroupElem::Residue(x), GroupElem::Residue(y)) => {
                let Group::Cyclic { modulus } = self else {
                    unreachable!("validated variant");
                };
                GroupElem::Residue((x + y) % modulus)
            }
            _ => unreachable!("validated variants"),
        })
    }

    pub fn inverse(&self, a: &GroupElem) -> Result<GroupElem, Error> {
        self.validate(a)?;
        Ok(match a {
            GroupElem::Vector(x) => GroupElem::Vector(x.iter().map(|p| -p).collect()),
            GroupElem::Word(x) => GroupElem::Word(x.iter().rev().map(|l| -l).collect()),
            GroupElem::Residue(x) => {
                let Group::Cyclic { modulus } = self else {
                    unreachable!("validated variant");
                };
                GroupElem::Residue(if *x == 0 { 0 } else { modulus - x })
            }
        })
    }

    /// Parses an element: comma-separated integers for lattices, a letter
    /// string (lowercase = generator, uppercase = inverse, `"e"` = identity)
    /// for free groups, an integer (reduced mod `q`) for cyclic groups.
    pub fn parse_element(&self, s: &str) -> Result<GroupElem, Error> {
        let unknown = || Error::UnknownGenerator {
            token: s.to_string(),
        };
        let elem = match self {
            Group::Integers { .. } => {
                let parts: Result<Vec<i64>, _> =
                    s.split(',').map(|p| p.trim().parse::<i64>()).collect();
                GroupElem::Vector(parts.map_err(|_| unknown())?)
            }
            Group::Free { .. } => {
                if s == "e" {
                    GroupElem::Word(Vec::new())
                } else {
                    let mut letters = Vec::with_capacity(s.len());
                    for c in s.chars() {
                        let letter = match c {
                            'a'..='z' => (c as i32) - ('a' as i32) + 1,
                            'A'..='Z' => -((c as i32) - ('A' as i32) + 1),
                            _ => return Err(unknown()),
                        };
                        letters.push(letter);
                    }
                    // parse accepts unreduced spellings and reduces them
                    let mut reduced: Vec<i32> = Vec::with_capacity(letters.len());
                    for letter in letters {
                        if reduced.last() == Some(&-letter) {
                            reduced.pop();
                        } else {
                            reduced.push(letter);
                        }
                    }
                    GroupElem::Word(reduced)
                }
            }
            Group::Cyclic { modulus } => {
                let raw: i128 = s.trim().parse().map_err(|_| unknown())?;
                let q = *modulus as i128;
                GroupElem::Residue(raw.rem_euclid(q) as u64)
            }
        };
        self.validate(&elem)?;
        Ok(elem)
    }

    pub fn format_element(&self, e: &GroupElem) -> String {
        match e {
            GroupElem::Vector(v) => v
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
            GroupElem::Word(w) => {
                if w.is_empty() {
                    "e".to_string()
                } else {
                    w.iter()
                        .map(|&l| {
                            if l > 0 {
                                (b'a' + (l - 1) as u8) as char
                            } else {
                                (b'A' + (-l - 1) as u8) as char
                            }
                        })
                        .collect()
                }
            }
            GroupElem::Residue(r) => r.to_string(),
        }
    }
}

/// A walk: a group, a finite support, and an exact step distribution.
#[derive(Clone, Debug)]
pub struct WalkSpec {
    group: Group,
    support: Vec<GroupElem>,
    nu: Vec<BigRational>,
    /// f64 shadow of the cumulative distribution, for sampling only.
    cumulative: Vec<f64>,
}

impl WalkSpec {
    pub fn new(group: Group, steps: Vec<(GroupElem, BigRational)>) -> Result<Self, Error> {
        let invalid = |reason: String| Err(Error::InvalidDistribution { reason });
        if steps.is_empty() {
            return invalid("support is empty".into());
        }
        let mut support = Vec::with_capacity(steps.len());
        let mut nu = Vec::with_capacity(steps.len());
        let mut total = BigRational::zero();
        for (elem, p) in steps {
            group.validate(&elem)?;
            if support.contains(&elem) {
                return invalid(format!(
                    "duplicate support element {}",
                    group.format_element(&elem)
                ));
            }
            if !p.is_positive() {
                return invalid(format!("weight {} is not positive", format_ratio(&p)));
            }
            total += &p;
            support.push(elem);
            nu.push(p);
        }
        if !total.is_one() {
            return invalid(format!("weights sum to {}, not 1", format_ratio(&total)));
        }
        let mut cumulative = Vec::with_capacity(nu.len());
        let mut running = 0.0;
        for p in &nu {
            running += p.to_f64().expect("probability fits f64");
            cumulative.push(running);
        }
        Ok(WalkSpec {
            group,
            support,
            nu,
            cumulative,
        })
    }

    /// The uniform measure on `{g, g^{-1} : g a standard generator}`.
    pub fn symmetric_simple(group: Group) -> Result<Self, Error> {
        let mut gens: Vec<GroupElem> = Vec::new();
        let push_unique = |e: GroupElem, gens: &mut Vec<GroupElem>| {
            if !gens.contains(&e) {
                gens.push(e);
            }
        };
        match &group {
            Group::Integers { dims } => {
                for i in 0..*dims {
                    for sign in [1i64, -1] {
                        let mut v = vec![0; *dims];
                        v[i] = sign;
                        push_unique(GroupElem::Vector(v), &mut gens);
                    }
                }
            }
            Group::Free { rank } => {
                for l in 1..=*rank as i32 {
                    push_unique(GroupElem::Word(vec![l]), &mut gens);
                    push_unique(GroupElem::Word(vec![-l]), &mut gens);
                }
            }
            Group::Cyclic { modulus } => {
                if *modulus == 0 {
                    return Err(Error::InvalidDistribution {
                        reason: "modulus must be positive".into(),
                    });
                }
                push_unique(GroupElem::Residue(1 % modulus), &mut gens);
                push_unique(GroupElem::Residue((modulus - 1) % modulus), &mut gens);
            }
        }
        let weight = BigRational::new(1.into(), (gens.len() as u64).into());
        WalkSpec::new(
            group,
            gens.into_iter().map(|g| (g, weight.clone())).collect(),
        )
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn support(&self) -> &[GroupElem] {
        &self.support
    }

    pub fn nu(&self) -> &[BigRational] {
        &self.nu
    }

    pub fn weight(&self, e: &GroupElem) -> Option<&BigRational> {
        self.support
            .iter()
            .position(|s| s == e)
            .map(|i| &self.nu[i])
    }

    /// Draws a support index with probability `nu`.
    pub fn sample_index(&self, rng: &mut impl Rng) -> usize {
        let x: f64 = rng.gen();
        self.cumulative
            .iter()
            .position(|&c| x < c)
            .unwrap_or(self.support.len() - 1)
    }
}

/// The measure `ν̄` with `ν̄(s^{-1}) = ν(s)`.
pub fn reverse_measure(spec: &WalkSpec) -> Result<WalkSpec, Error> {
    let steps = spec
        .support
        .iter()
        .zip(&spec.nu)
        .map(|(s, p)| Ok((spec.group.inverse(s)?, p.clone())))
        .collect::<Result<Vec<_>, Error>>()?;
    WalkSpec::new(spec.group.clone(), steps)
}

/// A finite two-sided window of a walk trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    start_index: i64,
    points: Vec<GroupElem>,
}

impl Trajectory {
    /// Validates that consecutive quotients `y_n^{-1} y_{n+1}` lie in the
    /// walk's support.
    pub fn new(spec: &WalkSpec, start_index: i64, points: Vec<GroupElem>) -> Result<Self, Error> {
        let invalid = |reason: String| Err(Error::InvalidTrajectory { reason });
        if points.is_empty() {
            return invalid("a trajectory window needs at least one point".into());
        }
        for p in &points {
            spec.group.validate(p)?;
        }
        for (offset, pair) in points.windows(2).enumerate() {
            let step = spec
                .group
                .multiply(&spec.group.inverse(&pair[0])?, &pair[1])?;
            if spec.weight(&step).is_none() {
                return invalid(format!(
                    "quotient at index {} lies outside the support",
                    start_index + offset as i64
                ));
            }
        }
        Ok(Trajectory {
            start_index,
            points,
        })
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.points.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one point by construction
    }

    pub fn points(&self) -> &[GroupElem] {
        &self.points
    }

    pub fn point(&self, index: i64) -> Option<&GroupElem> {
        let offset = index.checked_sub(self.start_index)?;
        usize::try_from(offset)
            .ok()
            .and_then(|o| self.points.get(o))
    }
}

/// Simulates `length` points: `y_{n+1} = y_n s_n` with i.i.d. `s_n ~ ν`,
/// anchored at index 0.
pub fn simulate_trajectory(
    spec: &WalkSpec,
    y0: GroupElem,
    length: usize,
    rng: &mut impl Rng,
) -> Result<Trajectory, Error> {
    if length == 0 {
        return Err(Error::InvalidTrajectory {
            reason: "requested an empty trajectory".into(),
        });
    }
    spec.group.validate(&y0)?;
    let mut points = Vec::with_capacity(length);
    points.push(y0);
    for _ in 1..length {
        let step = &spec.support[spec.sample_index(rng)];
        let next = spec
            .group
            .multiply(points.last().expect("nonempty"), step)?;
        points.push(next);
    }
    Trajectory::new(spec, 0, points)
}

/// Splits a trajectory into its increment sequence and the anchor point at
/// its first index. Together with the start index this is lossless.
pub fn increments_factorization(
    spec: &WalkSpec,
    t: &Trajectory,
) -> Result<(Vec<GroupElem>, GroupElem), Error> {
    let mut increments = Vec::with_capacity(t.len() - 1);
    for pair in t.points().windows(2) {
        increments.push(
            spec.group
                .multiply(&spec.group.inverse(&pair[0])?, &pair[1])?,
        );
    }
    Ok((increments, t.points()[0].clone()))
}

/// Rebuilds the trajectory `(anchor, anchor·s_0, anchor·s_0·s_1, …)`.
pub fn trajectory_from_increments(
    spec: &WalkSpec,
    start_index: i64,
    anchor: GroupElem,
    increments: &[GroupElem],
) -> Result<Trajectory, Error> {
    let mut points = Vec::with_capacity(increments.len() + 1);
    points.push(anchor);
    for s in increments {
        let next = spec.group.multiply(points.last().expect("nonempty"), s)?;
        points.push(next);
    }
    Trajectory::new(spec, start_index, points)
}

/// The shift: the new index `n` carries the old `y_{n-1}`. Pure
/// re-anchoring; no data is dropped.
pub fn shift_trajectory(t: &Trajectory) -> Trajectory {
    Trajectory {
        start_index: t.start_index + 1,
        points: t.points.clone(),
    }
}

/// A trajectory cylinder: finitely many pinned increments plus a finite set
/// of allowed anchors for `y_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    /// Time `n` -> index into the walk support: the constraint `s_n = S[i]`.
    pub increments: BTreeMap<i64, usize>,
    /// The finite set `F` with `y_0 ∈ F`; may be empty (empty cylinder).
    pub anchors: Vec<GroupElem>,
}

impl Cylinder {
    pub fn validate(&self, spec: &WalkSpec) -> Result<(), Error> {
        for (&n, &index) in &self.increments {
            if index >= spec.support().len() {
                return Err(Error::InvalidDistribution {
                    reason: format!("constraint at time {n} points outside the support"),
                });
            }
        }
        for (i, a) in self.anchors.iter().enumerate() {
            spec.group.validate(a)?;
            if self.anchors[..i].contains(a) {
                return Err(Error::InvalidElement {
                    reason: format!("duplicate anchor {}", spec.group.format_element(a)),
                });
            }
        }
        Ok(())
    }
}

/// σ-finite mass `∏ ν(s-constraints) · |F|`; exceeds 1 when the anchor set
/// is large because the group direction carries counting measure.
pub fn cylinder_mass(spec: &WalkSpec, cylinder: &Cylinder) -> Result<BigRational, Error> {
    cylinder.validate(spec)?;
    let mut mass = BigRational::from_integer((cylinder.anchors.len() as u64).into());
    for &index in cylinder.increments.values() {
        mass *= &spec.nu()[index];
    }
    Ok(mass)
}

/// Rewrites the cylinder seen one shift later as a finite disjoint union of
/// time-zero-anchored cylinders: every increment constraint moves from time
/// `n` to `n + 1`, and the anchor condition `y_1 ∈ F` becomes `y_0 ∈
/// F·s_0^{-1}`, branching over `s_0` unless the shifted constraints already
/// pin it.
pub fn shift_preimage(spec: &WalkSpec, cylinder: &Cylinder) -> Result<Vec<Cylinder>, Error> {
    cylinder.validate(spec)?;
    let shifted: BTreeMap<i64, usize> = cylinder
        .increments
        .iter()
        .map(|(&n, &i)| (n + 1, i))
        .collect();
    let translated_anchors = |step_index: usize| -> Result<Vec<GroupElem>, Error> {
        let inverse = spec.group.inverse(&spec.support()[step_index])?;
        cylinder
            .anchors
            .iter()
            .map(|f| spec.group.multiply(f, &inverse))
            .collect()
    };
    if let Some(&pinned) = shifted.get(&0) {
        return Ok(vec![Cylinder {
            increments: shifted,
            anchors: translated_anchors(pinned)?,
        }]);
    }
    let mut branches = Vec::with_capacity(spec.support().len());
    for index in 0..spec.support().len() {
        let mut increments = shifted.clone();
        increments.insert(0, index);
        branches.push(Cylinder {
            increments,
            anchors: translated_anchors(index)?,
        });
    }
    Ok(branches)
}

/// Result of [`cylinder_shift_invariance_check`].
#[derive(Clone, Debug)]
pub struct ShiftInvarianceReport {
    pub cylinder_mass: BigRational,
    pub transported_mass: BigRational,
    pub branches: usize,
    pub pass: bool,
}

/// Verifies `μ(cylinder) = μ(shifted cylinder)` by expanding the shifted
/// side into branches and summing their exact masses.
pub fn cylinder_shift_invariance_check(
    spec: &WalkSpec,
    cylinder: &Cylinder,
) -> Result<ShiftInvarianceReport, Error> {
    let original = cylinder_mass(spec, cylinder)?;
    let branches = shift_preimage(spec, cylinder)?;
    let mut transported = BigRational::zero();
    for branch in &branches {
        transported += cylinder_mass(spec, branch)?;
    }
    Ok(ShiftInvarianceReport {
        pass: original == transported,
        cylinder_mass: original,
        transported_mass: transported,
        branches: branches.len(),
    })
}

/// Which of the two mutually adjoint averaging operators to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `(L_ν f)(g) = Σ ν(s) f(g s)`.
    Forward,
    /// `(L_ν̄ f)(g) = Σ ν(s) f(g s^{-1})`.
    Backward,
}

/// A finitely supported rational function on the group.
pub type GroupFn = BTreeMap<GroupElem, BigRational>;

/// Applies the averaging operator; the support grows by one step ball.
/// Exact zeros produced by cancellation are pruned.
pub fn laplace_apply(spec: &WalkSpec, f: &GroupFn, direction: Direction) -> Result<GroupFn, Error> {
    let mut out: GroupFn = BTreeMap::new();
    for (h, value) in f {
        spec.group.validate(h)?;
        for (s, weight) in spec.support().iter().zip(spec.nu()) {
            // f(h) shows up in (Lf)(g) for the g with g·s_eff = h
            let g = match direction {
                Direction::Forward => spec.group.multiply(h, &spec.group.inverse(s)?)?,
                Direction::Backward => spec.group.multiply(h, s)?,
            };
            let entry = out.entry(g).or_insert_with(BigRational::zero);
            *entry += weight * value;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Counting-measure pairing `Σ_g f(g) h(g)`.
pub fn pairing(f: &GroupFn, h: &GroupFn) -> BigRational {
    let mut total = BigRational::zero();
    for (g, value) in f {
        if let Some(other) = h.get(g) {
            total += value * other;
        }
    }
    total
}

/// Exact check of `⟨L_ν f, h⟩ = ⟨f, L_ν̄ h⟩`.
pub fn adjointness_check(spec: &WalkSpec, f: &GroupFn, h: &GroupFn) -> Result<bool, Error> {
    let lhs = pairing(&laplace_apply(spec, f, Direction::Forward)?, h);
    let rhs = pairing(f, &laplace_apply(spec, h, Direction::Backward)?);
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn z_walk() -> WalkSpec {
        WalkSpec::symmetric_simple(Group::Integers { dims: 1 }).unwrap()
    }

    fn z_biased() -> WalkSpec {
        WalkSpec::new(
            Group::Integers { dims: 1 },
            vec![
                (GroupElem::Vector(vec![1]), ratio(2, 3)),
                (GroupElem::Vector(vec![-1]), ratio(1, 3)),
            ],
        )
        .unwrap()
    }

    fn f2_walk() -> WalkSpec {
        WalkSpec::symmetric_simple(Group::Free { rank: 2 }).unwrap()
    }

    fn all_backends() -> Vec<WalkSpec> {
        vec![
            z_walk(),
            z_biased(),
            f2_walk(),
            WalkSpec::symmetric_simple(Group::Cyclic { modulus: 7 }).unwrap(),
            WalkSpec::symmetric_simple(Group::Integers { dims: 3 }).unwrap(),
        ]
    }

    fn random_element(group: &Group, rng: &mut ChaCha12Rng) -> GroupElem {
        match group {
            Group::Integers { dims } => {
                GroupElem::Vector((0..*dims).map(|_| rng.gen_range(-5..=5)).collect())
            }
            Group::Free { rank } => {
                let len = rng.gen_range(0..6);
                let mut word: Vec<i32> = Vec::with_capacity(len);
                for _ in 0..len {
                    let letter =
                        rng.gen_range(1..=*rank as i32) * if rng.gen_bool(0.5) { 1 } else { -1 };
                    if word.last() == Some(&-letter) {
                        word.pop();
                    } else {
                        word.push(letter);
                    }
                }
                GroupElem::Word(word)
            }
            Group::Cyclic { modulus } => GroupElem::Residue(rng.gen_range(0..*modulus)),
        }
    }

    #[test]
    fn group_axioms_spot_checks() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for spec in all_backends() {
            let group = spec.group();
            let e = group.identity();
            for _ in 0..200 {
                let a = random_element(group, &mut rng);
                let b = random_element(group, &mut rng);
                let c = random_element(group, &mut rng);
                let ab_c = group
                    .multiply(&group.multiply(&a, &b).unwrap(), &c)
                    .unwrap();
                let a_bc = group
                    .multiply(&a, &group.multiply(&b, &c).unwrap())
                    .unwrap();
                assert_eq!(ab_c, a_bc, "associativity on {group:?}");
                let inv = group.inverse(&a).unwrap();
                assert_eq!(group.multiply(&a, &inv).unwrap(), e);
                assert_eq!(group.multiply(&inv, &a).unwrap(), e);
                assert_eq!(group.multiply(&a, &e).unwrap(), a);
            }
        }
    }

    #[test]
    fn element_parsing_round_trips() {
        let z3 = Group::Integers { dims: 3 };
        let v = z3.parse_element("1,-2,0").unwrap();
        assert_eq!(v, GroupElem::Vector(vec![1, -2, 0]));
        assert_eq!(z3.format_element(&v), "1,-2,0");
        assert!(z3.parse_element("1,2").is_err());

        let f2 = Group::Free { rank: 2 };
        let w = f2.parse_element("abA").unwrap();
        assert_eq!(w, GroupElem::Word(vec![1, 2, -1]));
        assert_eq!(f2.format_element(&w), "abA");
        assert_eq!(f2.parse_element("aA").unwrap(), GroupElem::Word(vec![]));
        assert_eq!(f2.format_element(&GroupElem::Word(vec![])), "e");
        assert!(f2.parse_element("ac").is_err());

        let z7 = Group::Cyclic { modulus: 7 };
        assert_eq!(z7.parse_element("-1").unwrap(), GroupElem::Residue(6));
        assert_eq!(z7.parse_element("9").unwrap(), GroupElem::Residue(2));
    }

    #[test]
    fn spec_validation() {
        let z = Group::Integers { dims: 1 };
        let plus = GroupElem::Vector(vec![1]);
        let minus = GroupElem::Vector(vec![-1]);
        assert!(matches!(
            WalkSpec::new(z.clone(), vec![]),
            Err(Error::InvalidDistribution { .. })
        ));
        assert!(matches!(
            WalkSpec::new(
                z.clone(),
                vec![(plus.clone(), ratio(1, 2)), (plus.clone(), ratio(1, 2))]
            ),
            Err(Error::InvalidDistribution { .. })
        ));
        assert!(matches!(
            WalkSpec::new(
                z.clone(),
                vec![(plus.clone(), ratio(1, 2)), (minus.clone(), ratio(1, 3))]
            ),
            Err(Error::InvalidDistribution { .. })
        ));
        assert!(matches!(
            WalkSpec::new(z, vec![(plus, ratio(3, 2)), (minus, ratio(-1, 2))]),
            Err(Error::InvalidDistribution { .. })
        ));
    }

    #[test]
    fn reverse_measure_examples() {
        let symmetric = z_walk();
        let reversed = reverse_measure(&symmetric).unwrap();
        for (s, p) in symmetric.support().iter().zip(symmetric.nu()) {
            assert_eq!(reversed.weight(s), Some(p));
        }

        let biased = z_biased();
        let reversed = reverse_measure(&biased).unwrap();
        assert_eq!(
            reversed.weight(&GroupElem::Vector(vec![1])),
            Some(&ratio(1, 3))
        );
        assert_eq!(
            reversed.weight(&GroupElem::Vector(vec![-1])),
            Some(&ratio(2, 3))
        );
        let double = reverse_measure(&reversed).unwrap();
        for (s, p) in biased.support().iter().zip(biased.nu()) {
            assert_eq!(double.weight(s), Some(p));
        }
    }

    #[test]
    fn degenerate_walk_marches_in_a_line() {
        let spec = WalkSpec::new(
            Group::Integers { dims: 1 },
            vec![(GroupElem::Vector(vec![1]), ratio(1, 1))],
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let t = simulate_trajectory(&spec, spec.group().identity(), 4, &mut rng).unwrap();
        let walked: Vec<i64> = t
            .points()
            .iter()
            .map(|p| match p {
                GroupElem::Vector(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(walked, vec![0, 1, 2, 3]);
    }

    #[test]
    fn simulation_is_deterministic_and_valid() {
        for spec in all_backends() {
            let mut a = ChaCha12Rng::seed_from_u64(9);
            let mut b = ChaCha12Rng::seed_from_u64(9);
            let ta = simulate_trajectory(&spec, spec.group().identity(), 50, &mut a).unwrap();
            let tb = simulate_trajectory(&spec, spec.group().identity(), 50, &mut b).unwrap();
            assert_eq!(ta, tb);
            // Trajectory::new re-checked the quotients already; do it once more
            let (increments, anchor) = increments_factorization(&spec, &ta).unwrap();
            for s in &increments {
                assert!(spec.weight(s).is_some());
            }
            let rebuilt =
                trajectory_from_increments(&spec, ta.start_index(), anchor, &increments).unwrap();
            assert_eq!(rebuilt, ta);
        }
    }

    #[test]
    fn free_walk_changes_word_length_by_one() {
        let spec = f2_walk();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let t = simulate_trajectory(&spec, spec.group().identity(), 300, &mut rng).unwrap();
        for pair in t.points().windows(2) {
            let (GroupElem::Word(a), GroupElem::Word(b)) = (&pair[0], &pair[1]) else {
                unreachable!()
            };
            assert_eq!((a.len() as i64 - b.len() as i64).abs(), 1);
        }
    }

    #[test]
    fn factorization_example_and_edge_case() {
        let spec = z_walk();
        let t = Trajectory::new(
            &spec,
            0,
            vec![
                GroupElem::Vector(vec![1]),
                GroupElem::Vector(vec![2]),
                GroupElem::Vector(vec![3]),
            ],
        )
        .unwrap();
        let (increments, anchor) = increments_factorization(&spec, &t).unwrap();
        assert_eq!(anchor, GroupElem::Vector(vec![1]));
        assert_eq!(
            increments,
            vec![GroupElem::Vector(vec![1]), GroupElem::Vector(vec![1])]
        );

        let single = Trajectory::new(&spec, 5, vec![GroupElem::Vector(vec![7])]).unwrap();
        let (increments, anchor) = increments_factorization(&spec, &single).unwrap();
        assert!(increments.is_empty());
        assert_eq!(anchor, GroupElem::Vector(vec![7]));
    }

    #[test]
    fn trajectory_rejects_alien_quotients() {
        let spec = z_walk();
        assert!(matches!(
            Trajectory::new(
                &spec,
                0,
                vec![GroupElem::Vector(vec![0]), GroupElem::Vector(vec![2])]
            ),
            Err(Error::InvalidTrajectory { .. })
        ));
        assert!(matches!(
            Trajectory::new(&spec, 0, vec![]),
            Err(Error::InvalidTrajectory { .. })
        ));
    }

    #[test]
    fn shift_re_anchors_without_losing_data() {
        let spec = z_walk();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let t = simulate_trajectory(&spec, spec.group().identity(), 10, &mut rng).unwrap();
        let shifted = shift_trajectory(&t);
        assert_eq!(shifted.start_index(), 1);
        assert_eq!(shifted.len(), t.len());
        // new index n carries the old y_{n-1}
        for n in shifted.start_index()..=shifted.end_index() {
            assert_eq!(shifted.point(n), t.point(n - 1));
        }
        assert_eq!(
            shift_trajectory(&shifted),
            shift_trajectory(&shift_trajectory(&t))
        );
        let (si, sa) = increments_factorization(&spec, &shifted).unwrap();
        let (ti, ta) = increments_factorization(&spec, &t).unwrap();
        assert_eq!(si, ti);
        assert_eq!(sa, ta);
    }

    #[test]
    fn worked_cylinder_example() {
        let spec = z_walk();
        let plus = spec
            .support()
            .iter()
            .position(|s| *s == GroupElem::Vector(vec![1]))
            .unwrap();
        let cylinder = Cylinder {
            increments: BTreeMap::from([(0, plus)]),
            anchors: vec![GroupElem::Vector(vec![0])],
        };
        assert_eq!(cylinder_mass(&spec, &cylinder).unwrap(), ratio(1, 2));
        let branches = shift_preimage(&spec, &cylinder).unwrap();
        assert_eq!(branches.len(), 2);
        for branch in &branches {
            // each branch pins s_0 = a and s_1 = +1 and anchors y_0 = -a
            assert_eq!(branch.increments[&1], plus);
            let a = &spec.support()[branch.increments[&0]];
            let expected = spec.group.inverse(a).unwrap();
            assert_eq!(branch.anchors, vec![expected]);
        }
        let report = cylinder_shift_invariance_check(&spec, &cylinder).unwrap();
        assert!(report.pass);
        assert_eq!(report.cylinder_mass, ratio(1, 2));
        assert_eq!(report.transported_mass, ratio(1, 2));
    }

    #[test]
    fn cylinder_edge_cases() {
        let spec = z_walk();
        let empty = Cylinder {
            increments: BTreeMap::new(),
            anchors: vec![],
        };
        let report = cylinder_shift_invariance_check(&spec, &empty).unwrap();
        assert!(report.pass);
        assert_eq!(report.cylinder_mass, ratio(0, 1));

        let two_points = Cylinder {
            increments: BTreeMap::new(),
            anchors: vec![GroupElem::Vector(vec![3]), GroupElem::Vector(vec![-4])],
        };
        let report = cylinder_shift_invariance_check(&spec, &two_points).unwrap();
        assert!(report.pass);
        assert_eq!(report.cylinder_mass, ratio(2, 1));
        assert!(report.cylinder_mass > BigRational::one());

        // a pinned s_{-1} lands on time 0 after the shift: single branch
        let pinned = Cylinder {
            increments: BTreeMap::from([(-1, 0)]),
            anchors: vec![GroupElem::Vector(vec![5])],
        };
        let branches = shift_preimage(&spec, &pinned).unwrap();
        assert_eq!(branches.len(), 1);
        let report = cylinder_shift_invariance_check(&spec, &pinned).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn laplace_averages_the_indicator() {
        let spec = z_walk();
        let f: GroupFn = BTreeMap::from([(spec.group().identity(), ratio(1, 1))]);
        let lf = laplace_apply(&spec, &f, Direction::Forward).unwrap();
        assert_eq!(lf.len(), 2);
        assert_eq!(lf[&GroupElem::Vector(vec![1])], ratio(1, 2));
        assert_eq!(lf[&GroupElem::Vector(vec![-1])], ratio(1, 2));
        assert!(!lf.contains_key(&spec.group().identity()));
    }

    #[test]
    fn laplace_preserves_constants_inside_a_ball() {
        let spec = z_walk();
        let c = ratio(7, 3);
        let f: GroupFn = (-3..=3)
            .map(|x| (GroupElem::Vector(vec![x]), c.clone()))
            .collect();
        let lf = laplace_apply(&spec, &f, Direction::Forward).unwrap();
        for x in -2..=2i64 {
            assert_eq!(lf[&GroupElem::Vector(vec![x])], c);
        }
    }

    fn random_function(spec: &WalkSpec, rng: &mut ChaCha12Rng) -> GroupFn {
        let mut f = GroupFn::new();
        for _ in 0..rng.gen_range(1..6) {
            let g = random_element(spec.group(), rng);
            let value = ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9));
            if !value.is_zero() {
                f.insert(g, value);
            }
        }
        f
    }

    #[test]
    fn laplace_is_linear_and_adjoint() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for spec in all_backends() {
            for _ in 0..60 {
                let f = random_function(&spec, &mut rng);
                let h = random_function(&spec, &mut rng);
                assert!(adjointness_check(&spec, &f, &h).unwrap());

                // linearity: L(f + h) = Lf + Lh
                let mut sum = f.clone();
                for (g, v) in &h {
                    let entry = sum.entry(g.clone()).or_insert_with(BigRational::zero);
                    *entry += v;
                }
                sum.retain(|_, v| !v.is_zero());
                let l_sum = laplace_apply(&spec, &sum, Direction::Forward).unwrap();
                let mut expected = laplace_apply(&spec, &f, Direction::Forward).unwrap();
                for (g, v) in laplace_apply(&spec, &h, Direction::Forward).unwrap() {
                    let entry = expected.entry(g).or_insert_with(BigRational::zero);
                    *entry += v;
                }
                expected.retain(|_, v| !v.is_zero());
                assert_eq!(l_sum, expected);
            }
        }
    }

    #[test]
    fn symmetric_operator_is_self_adjoint() {
        let spec = z_walk();
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        for _ in 0..50 {
            let f = random_function(&spec, &mut rng);
            let h = random_function(&spec, &mut rng);
            let lf = laplace_apply(&spec, &f, Direction::Forward).unwrap();
            let lh = laplace_apply(&spec, &h, Direction::Forward).unwrap();
            assert_eq!(pairing(&lf, &h), pairing(&f, &lh));
        }
    }

    #[test]
    fn backward_frequencies_match_the_reversed_measure() {
        // 5-sigma binomial check of the co-transition law on the biased walk
        let spec = z_biased();
        let reversed = reverse_measure(&spec).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let samples = 100_000usize;
        let mut backward_plus = 0usize;
        for _ in 0..samples {
            let t = simulate_trajectory(&spec, spec.group().identity(), 2, &mut rng).unwrap();
            // backward step from y_1: the s with y_0 = y_1 · s
            let s = spec
                .group()
                .multiply(
                    &spec.group().inverse(&t.points()[1]).unwrap(),
                    &t.points()[0],
                )
                .unwrap();
            if s == GroupElem::Vector(vec![1]) {
                backward_plus += 1;
            }
        }
        let p = reversed
            .weight(&GroupElem::Vector(vec![1]))
            .unwrap()
            .to_f64()
            .unwrap();
        let freq = backward_plus as f64 / samples as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((freq - p).abs() < 5.0 * sigma, "freq {freq} vs {p}");
    }
}
