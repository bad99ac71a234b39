//! Digit sequences with the uniform Bernoulli measure, and their cylinder
//! sets.
//!
//! A [`TwoSidedWord`] is a finite window of a bi-infinite digit sequence;
//! the shift moves every index down by one, so the digit at 0 becomes the
//! digit at -1. Windows are precision budgets like everywhere else in this
//! crate: reading an index outside the window is a hard error.
//!
//! A [`CylinderSpec`] pins finitely many indices to digits. Under the
//! uniform measure each pinned digit contributes a factor 1/p, so the
//! measure is p^-depth, exactly. Intersections either merge constraints or
//! are the distinct [`CylinderSet::Empty`] sentinel, which keeps measures
//! total without a contradiction flag inside a spec.
//!
//! The factor maps read a word as coordinates: the non-negative side spells
//! a p-adic integer, the negative side spells a base-p fraction, together a
//! point of the skew product space.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::padic::{PadicInt, Prime};
use crate::prng::CounterRng;
use crate::solenoid::{BasePFraction, SolenoidPoint};
use crate::{Error, Result};

/// A window x_{-L}..x_{R-1} of a two-sided digit sequence.
/// `neg[k]` is the digit at index -(k+1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWord")]
pub struct TwoSidedWord {
    p: Prime,
    neg: Vec<u64>,
    nonneg: Vec<u64>,
}

#[derive(Deserialize)]
struct RawWord {
    p: u64,
    neg: Vec<u64>,
    nonneg: Vec<u64>,
}

impl TryFrom<RawWord> for TwoSidedWord {
    type Error = Error;
    fn try_from(raw: RawWord) -> Result<TwoSidedWord> {
        TwoSidedWord::new(Prime::new(raw.p)?, raw.neg, raw.nonneg)
    }
}

impl TwoSidedWord {
    pub fn new(p: Prime, neg: Vec<u64>, nonneg: Vec<u64>) -> Result<TwoSidedWord> {
        for &d in neg.iter().chain(nonneg.iter()) {
            if d >= p.get() {
                return Err(Error::DigitOutOfRange { p: p.get(), digit: d });
            }
        }
        Ok(TwoSidedWord { p, neg, nonneg })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Known index range as [lo, hi).
    pub fn window(&self) -> (i64, i64) {
        (-(self.neg.len() as i64), self.nonneg.len() as i64)
    }

    pub fn digit(&self, index: i64) -> Result<u64> {
        let d = if index >= 0 {
            self.nonneg.get(index as usize)
        } else {
            self.neg.get((-index - 1) as usize)
        };
        d.copied().ok_or_else(|| {
            let (lo, hi) = self.window();
            Error::WindowExhausted { index, lo, hi }
        })
    }

    pub fn neg_digits(&self) -> &[u64] {
        &self.neg
    }

    pub fn nonneg_digits(&self) -> &[u64] {
        &self.nonneg
    }

    /// The shift: every digit moves down one index, so the new word reads
    /// digit(j) = old digit(j + 1). Consumes one known non-negative digit.
    pub fn shifted(&self) -> Result<TwoSidedWord> {
        if self.nonneg.is_empty() {
            let (lo, hi) = self.window();
            return Err(Error::WindowExhausted { index: 0, lo, hi });
        }
        let mut neg = Vec::with_capacity(self.neg.len() + 1);
        neg.push(self.nonneg[0]);
        neg.extend_from_slice(&self.neg);
        Ok(TwoSidedWord {
            p: self.p,
            neg,
            nonneg: self.nonneg[1..].to_vec(),
        })
    }

    pub fn shifted_by(&self, n: usize) -> Result<TwoSidedWord> {
        let mut w = self.clone();
        for _ in 0..n {
            w = w.shifted()?;
        }
        Ok(w)
    }
}

/// A one-sided digit sequence x_0, x_1, ...
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawOneSided")]
pub struct OneSidedWord {
    p: Prime,
    digits: Vec<u64>,
}

#[derive(Deserialize)]
struct RawOneSided {
    p: u64,
    digits: Vec<u64>,
}

impl TryFrom<RawOneSided> for OneSidedWord {
    type Error = Error;
    fn try_from(raw: RawOneSided) -> Result<OneSidedWord> {
        OneSidedWord::new(Prime::new(raw.p)?, raw.digits)
    }
}

impl OneSidedWord {
    pub fn new(p: Prime, digits: Vec<u64>) -> Result<OneSidedWord> {
        for &d in &digits {
            if d >= p.get() {
                return Err(Error::DigitOutOfRange { p: p.get(), digit: d });
            }
        }
        Ok(OneSidedWord { p, digits })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, index: usize) -> Result<u64> {
        self.digits
            .get(index)
            .copied()
            .ok_or(Error::WindowExhausted {
                index: index as i64,
                lo: 0,
                hi: self.len() as i64,
            })
    }

    /// One-sided shift: drop digit 0.
    pub fn shifted(&self) -> Result<OneSidedWord> {
        if self.digits.is_empty() {
            return Err(Error::WindowExhausted {
                index: 0,
                lo: 0,
                hi: 0,
            });
        }
        Ok(OneSidedWord {
            p: self.p,
            digits: self.digits[1..].to_vec(),
        })
    }
}

/// Finitely many pinned digits; the set of sequences agreeing with them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCylinder", into = "RawCylinder")]
pub struct CylinderSpec {
    p: Prime,
    constraints: BTreeMap<i64, u64>,
}

#[derive(Serialize, Deserialize)]
struct RawCylinder {
    p: u64,
    constraints: Vec<(i64, u64)>,
}

impl From<CylinderSpec> for RawCylinder {
    fn from(c: CylinderSpec) -> RawCylinder {
        RawCylinder {
            p: c.p.get(),
            constraints: c.constraints.into_iter().collect(),
        }
    }
}

impl TryFrom<RawCylinder> for CylinderSpec {
    type Error = Error;
    fn try_from(raw: RawCylinder) -> Result<CylinderSpec> {
        CylinderSpec::new(Prime::new(raw.p)?, raw.constraints)
    }
}

impl CylinderSpec {
    /// Build from (index, digit) pairs. The same index may repeat only with
    /// the same digit; a repeated index with different digits is a malformed
    /// spec, not an empty set.
    pub fn new(p: Prime, pairs: impl IntoIterator<Item = (i64, u64)>) -> Result<CylinderSpec> {
        let mut constraints = BTreeMap::new();
        for (index, digit) in pairs {
            if digit >= p.get() {
                return Err(Error::DigitOutOfRange { p: p.get(), digit });
            }
            if let Some(&old) = constraints.get(&index) {
                if old != digit {
                    return Err(Error::InvalidParameter(format!(
                        "index {index} pinned to both {old} and {digit}"
                    )));
                }
            }
            constraints.insert(index, digit);
        }
        Ok(CylinderSpec { p, constraints })
    }

    /// The block x_0 = digits[0], ..., x_{k-1} = digits[k-1].
    pub fn block(p: Prime, digits: &[u64]) -> Result<CylinderSpec> {
        CylinderSpec::new(p, digits.iter().copied().enumerate().map(|(i, d)| (i as i64, d)))
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.constraints.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.constraints.iter().map(|(&i, &d)| (i, d))
    }

    /// Uniform-measure mass: p^-depth, exactly.
    pub fn measure(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            BigInt::from(self.p.get()).pow(self.depth() as u32),
        )
    }

    /// Whether the word's window satisfies every constraint. Constraints
    /// outside the window are errors, not false.
    pub fn contains(&self, word: &TwoSidedWord) -> Result<bool> {
        if self.p != word.prime() {
            return Err(Error::PrimeMismatch {
                left: self.p.get(),
                right: word.prime().get(),
            });
        }
        for (index, digit) in self.pairs() {
            if word.digit(index)? != digit {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same digits pinned `offset` indices later. Signed: translating by
    /// -alpha is how a cylinder follows a word through alpha shifts.
    pub fn translated(&self, offset: i64) -> CylinderSpec {
        CylinderSpec {
            p: self.p,
            constraints: self
                .constraints
                .iter()
                .map(|(&i, &d)| (i + offset, d))
                .collect(),
        }
    }

    /// Conjunction of two specs, or the empty set on any conflicting index.
    pub fn intersect(&self, other: &CylinderSpec) -> Result<CylinderSet> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        let mut merged = self.constraints.clone();
        for (index, digit) in other.pairs() {
            match merged.get(&index) {
                Some(&d) if d != digit => return Ok(CylinderSet::Empty),
                _ => {
                    merged.insert(index, digit);
                }
            }
        }
        Ok(CylinderSet::Cylinder(CylinderSpec {
            p: self.p,
            constraints: merged,
        }))
    }
}

/// A cylinder or the empty set. The sentinel keeps measure and intersection
/// total: emptiness is a value, not a flag smuggled inside a spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderSet {
    Cylinder(CylinderSpec),
    Empty,
}

impl CylinderSet {
    pub fn measure(&self) -> BigRational {
        match self {
            CylinderSet::Cylinder(c) => c.measure(),
            CylinderSet::Empty => BigRational::zero(),
        }
    }
}

/// Read the non-negative side as a p-adic integer: digit i is the
/// coefficient of p^i. Precision equals the word length.
pub fn project_padic(word: &OneSidedWord) -> PadicInt {
    PadicInt::from_digits(word.prime(), word.digits().to_vec())
        .expect("word digits are already validated")
}

/// Read negative-side digits (index -1 first) as a fraction in [0, 1):
/// digit k is the coefficient of p^-(k+1).
pub fn project_real(p: Prime, neg_digits: &[u64]) -> Result<BasePFraction> {
    BasePFraction::new(p, neg_digits.to_vec())
}

/// Read a two-sided word as a point of the skew product space.
pub fn project_point(word: &TwoSidedWord) -> SolenoidPoint {
    let padic = PadicInt::from_digits(word.prime(), word.nonneg_digits().to_vec())
        .expect("word digits are already validated");
    let real = BasePFraction::new(word.prime(), word.neg_digits().to_vec())
        .expect("word digits are already validated");
    SolenoidPoint::new(padic, real).expect("primes agree by construction")
}

/// A uniform word on the window [-l, r): digits are drawn in ascending
/// index order from the counter generator, so the result is a pure function
/// of (seed, p, l, r).
pub fn sample_uniform_word(seed: u64, p: Prime, l: usize, r: usize) -> TwoSidedWord {
    let mut rng = CounterRng::new(seed);
    let mut ascending: Vec<u64> = (0..l + r).map(|_| rng.below(p.get())).collect();
    let nonneg = ascending.split_off(l);
    ascending.reverse(); // index -1 comes last in ascending order
    TwoSidedWord {
        p,
        neg: ascending,
        nonneg,
    }
}

/// A uniform one-sided word of the given length, digits in index order.
pub fn sample_uniform_one_sided(seed: u64, p: Prime, len: usize) -> OneSidedWord {
    let mut rng = CounterRng::new(seed);
    OneSidedWord {
        p,
        digits: (0..len).map(|_| rng.below(p.get())).collect(),
    }
}

/// The open interval (a/p^depth, (a+1)/p^depth) with a coprime to p; the
/// generating family for the real factor's measure checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicInterval {
    p: Prime,
    a: u64,
    depth: u32,
}

impl PadicInterval {
    pub fn new(p: Prime, a: u64, depth: u32) -> Result<PadicInterval> {
        let cells = (p.get() as u128).checked_pow(depth).filter(|&c| c <= u64::MAX as u128);
        let cells = match cells {
            Some(c) if depth >= 1 => c as u64,
            _ => return Err(Error::BadInterval { a, p: p.get(), depth }),
        };
        if a == 0 || a >= cells || a.is_multiple_of(p.get()) {
            return Err(Error::BadInterval { a, p: p.get(), depth });
        }
        Ok(PadicInterval { p, a, depth })
    }

    pub fn numerator(&self) -> u64 {
        self.a
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.p.get()).pow(self.depth))
    }

    /// Exact membership of the value spelled by fraction digits (index -1
    /// first). Strict interval: the left endpoint a/p^depth itself (block
    /// equal, tail all zero) is outside. Needs at least `depth` digits.
    pub fn contains_digits(&self, digits: &[u64]) -> Result<bool> {
        let depth = self.depth as usize;
        if digits.len() < depth {
            return Err(Error::WindowExhausted {
                index: depth as i64,
                lo: 0,
                hi: digits.len() as i64,
            });
        }
        let block = digits[..depth].iter().fold(0u64, |acc, &d| acc * self.p.get() + d);
        Ok(block == self.a && digits[depth..].iter().any(|&d| d != 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solenoid::skew_step;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn word_windows_and_digit_reads() {
        let w = TwoSidedWord::new(p(3), vec![2, 0], vec![1, 1, 0]).unwrap();
        assert_eq!(w.window(), (-2, 3));
        assert_eq!(w.digit(-1), Ok(2));
        assert_eq!(w.digit(-2), Ok(0));
        assert_eq!(w.digit(0), Ok(1));
        assert_eq!(w.digit(2), Ok(0));
        assert_eq!(
            w.digit(3),
            Err(Error::WindowExhausted {
                index: 3,
                lo: -2,
                hi: 3
            })
        );
        assert!(TwoSidedWord::new(p(3), vec![3], vec![]).is_err());
    }

    #[test]
    fn shift_relabels_indices() {
        let w = TwoSidedWord::new(p(3), vec![2], vec![1, 0, 2]).unwrap();
        let s = w.shifted().unwrap();
        assert_eq!(s.window(), (-2, 2));
        assert_eq!(s.digit(-1), Ok(1)); // old digit 0
        assert_eq!(s.digit(-2), Ok(2)); // old digit -1
        assert_eq!(s.digit(0), Ok(0)); // old digit 1
        // shifting past the known window fails
        let spent = s.shifted_by(2).unwrap();
        assert_eq!(spent.window(), (-4, 0));
        assert!(spent.shifted().is_err());
    }

    #[test]
    fn cylinder_construction_and_measure() {
        let c = CylinderSpec::new(p(3), [(-1, 2), (0, 1)]).unwrap();
        assert_eq!(c.depth(), 2);
        assert_eq!(c.measure(), BigRational::new(1.into(), 9.into()));
        // full space: no constraints, measure 1
        let full = CylinderSpec::new(p(3), []).unwrap();
        assert_eq!(full.measure(), BigRational::one());
        // contradictory duplicate index is malformed, not empty
        assert!(CylinderSpec::new(p(3), [(0, 1), (0, 2)]).is_err());
        assert!(CylinderSpec::new(p(3), [(0, 3)]).is_err());
    }

    #[test]
    fn cylinder_contains_checks_the_window() {
        let w = TwoSidedWord::new(p(3), vec![2], vec![1, 0]).unwrap();
        let c = CylinderSpec::new(p(3), [(-1, 2), (1, 0)]).unwrap();
        assert_eq!(c.contains(&w), Ok(true));
        let miss = CylinderSpec::new(p(3), [(0, 2)]).unwrap();
        assert_eq!(miss.contains(&w), Ok(false));
        let outside = CylinderSpec::new(p(3), [(5, 0)]).unwrap();
        assert!(outside.contains(&w).is_err());
        let other = CylinderSpec::new(p(5), [(0, 1)]).unwrap();
        assert!(other.contains(&w).is_err());
    }

    #[test]
    fn translate_moves_indices_and_composes() {
        let c = CylinderSpec::new(p(3), [(-2, 1), (-1, 0)]).unwrap();
        let t = c.translated(2);
        let pairs: Vec<_> = t.pairs().collect();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(c.translated(3).translated(-3), c);
        assert_eq!(c.translated(1).translated(1), c.translated(2));
    }

    #[test]
    fn intersection_merges_or_empties() {
        let a = CylinderSpec::new(p(3), [(0, 1)]).unwrap();
        let b = CylinderSpec::new(p(3), [(1, 2)]).unwrap();
        match a.intersect(&b).unwrap() {
            CylinderSet::Cylinder(c) => {
                assert_eq!(c.depth(), 2);
                // disjoint index sets multiply measures
                assert_eq!(c.measure(), a.measure() * b.measure());
            }
            CylinderSet::Empty => panic!("compatible specs must intersect"),
        }
        let conflict = CylinderSpec::new(p(3), [(0, 2)]).unwrap();
        assert_eq!(a.intersect(&conflict).unwrap(), CylinderSet::Empty);
        assert_eq!(a.intersect(&conflict).unwrap().measure(), BigRational::zero());
        // intersecting with itself changes nothing
        assert_eq!(
            a.intersect(&a).unwrap(),
            CylinderSet::Cylinder(a.clone())
        );
    }

    #[test]
    fn shift_alignment_identity_holds() {
        // contains(shift^alpha(w), translate(c, -alpha)) == contains(w, c)
        let w = sample_uniform_word(5, p(3), 4, 12);
        for alpha in 0..6usize {
            let shifted = w.shifted_by(alpha).unwrap();
            for seed in 0..20u64 {
                let mut rng = CounterRng::new(seed * 31 + 7);
                let lo = -(4i64);
                let hi = 12 - alpha as i64;
                let idx = lo + rng.below((hi - lo) as u64) as i64 + alpha as i64;
                let digit = rng.below(3);
                let c = CylinderSpec::new(p(3), [(idx, digit)]).unwrap();
                assert_eq!(
                    c.translated(-(alpha as i64)).contains(&shifted).unwrap(),
                    c.contains(&w).unwrap(),
                    "alpha = {alpha}, index = {idx}, digit = {digit}"
                );
            }
        }
    }

    #[test]
    fn projections_read_words_as_coordinates() {
        let y = OneSidedWord::new(p(3), vec![2, 1]).unwrap();
        assert_eq!(
            project_padic(&y),
            PadicInt::from_integer(5, p(3), 2).unwrap()
        );
        let zero = OneSidedWord::new(p(3), vec![0, 0, 0]).unwrap();
        assert!(project_padic(&zero).is_zero());
        let empty = OneSidedWord::new(p(3), vec![]).unwrap();
        assert_eq!(project_padic(&empty).precision(), 0);

        let fr = project_real(p(3), &[1]).unwrap();
        assert_eq!(fr.value(), BigRational::new(1.into(), 3.into()));

        let w = TwoSidedWord::new(p(3), vec![1], vec![2, 1]).unwrap();
        let pt = project_point(&w);
        assert_eq!(pt.padic().digits(), &[2, 1]);
        assert_eq!(pt.real().digits(), &[1]);
    }

    #[test]
    fn projection_intertwines_shift_and_skew_step() {
        for seed in 0..32u64 {
            let w = sample_uniform_word(seed, p(5), 3, 8);
            let lhs = project_point(&w.shifted().unwrap());
            let rhs = skew_step(&project_point(&w)).unwrap();
            assert_eq!(lhs, rhs, "seed = {seed}");
        }
    }

    #[test]
    fn sampling_is_reproducible_and_balanced() {
        let a = sample_uniform_word(11, p(3), 5, 5);
        let b = sample_uniform_word(11, p(3), 5, 5);
        assert_eq!(a, b);
        assert_ne!(a, sample_uniform_word(12, p(3), 5, 5));
        let mut counts = [0u64; 3];
        for seed in 0..3000u64 {
            let w = sample_uniform_one_sided(seed, p(3), 4);
            counts[w.digit(0).unwrap() as usize] += 1;
        }
        for &c in &counts {
            assert!((c as f64 - 1000.0).abs() < 5.0 * (3000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt());
        }
    }

    #[test]
    fn interval_family_is_validated() {
        assert!(PadicInterval::new(p(3), 1, 1).is_ok());
        assert!(PadicInterval::new(p(3), 2, 2).is_ok());
        // divisible numerator, zero, and out-of-range are rejected
        assert!(PadicInterval::new(p(3), 3, 2).is_err());
        assert!(PadicInterval::new(p(3), 0, 1).is_err());
        assert!(PadicInterval::new(p(3), 9, 2).is_err());
        assert!(PadicInterval::new(p(3), 1, 0).is_err());
    }

    #[test]
    fn interval_membership_is_exact_and_strict() {
        let i = PadicInterval::new(p(3), 1, 1).unwrap(); // (1/3, 2/3)
        assert_eq!(i.contains_digits(&[1, 0, 1]), Ok(true));
        assert_eq!(i.contains_digits(&[1, 2]), Ok(true));
        // exactly 1/3: left endpoint excluded
        assert_eq!(i.contains_digits(&[1, 0, 0]), Ok(false));
        assert_eq!(i.contains_digits(&[2, 0, 1]), Ok(false));
        assert_eq!(i.contains_digits(&[0, 2, 2]), Ok(false));
        assert!(i.contains_digits(&[]).is_err());
        assert_eq!(i.measure(), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn cylinder_json_uses_sorted_pairs() {
        let c = CylinderSpec::new(p(3), [(1, 0), (-2, 1)]).unwrap();
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, "{\"p\":3,\"constraints\":[[-2,1],[1,0]]}");
        let back: CylinderSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
        let w = TwoSidedWord::new(p(3), vec![0, 1], vec![2, 1]).unwrap();
        let wj = serde_json::to_string(&w).unwrap();
        assert_eq!(wj, "{\"p\":3,\"neg\":[0,1],\"nonneg\":[2,1]}");
        assert_eq!(serde_json::from_str::<TwoSidedWord>(&wj).unwrap(), w);
    }
}
