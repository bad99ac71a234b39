//! The skew product on Z_p x [0,1) and the coordinates used to observe it.
//!
//! One step pops the lowest p-adic digit t_0 and pushes it onto the real
//! coordinate: (alpha, x) -> ((alpha - t_0)/p, (x + t_0)/p). Starting from
//! (gamma, 0), n+1 steps land exactly at ((gamma - s_n)/p^{n+1}, s_n/p^{n+1})
//! where s_n is the n-th partial sum, so the real coordinate's base-p digits
//! are the reversed digit prefix of gamma; [`orbit_point`] exploits that
//! closed form and is pinned against the step map in tests.
//!
//! Real coordinates are finite base-p fractions ([`BasePFraction`]), kept as
//! exact digit vectors. Characters live on the inverse limit: the level-t
//! coordinate of a point is x + s_{t-1}(alpha) in [0, p^t), and a character
//! indexed by (m, t) evaluates to exp(2 pi i sum_j m_j coord_t(P_j) / p^t).

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::padic::{biguint_to_digits, digits_to_biguint, PadicInt, Prime};
use crate::{Error, Result};

/// How many leading digits a float conversion reads; beyond this the tail
/// is below 3^-40 ~ 8e-20, under one ulp of f64.
const F64_DIGITS: usize = 40;

/// A number in [0, 1) with a finite base-p expansion: digits[k] is the
/// coefficient of p^{-(k+1)}. Trailing zeros are significant for precision
/// tracking but not for the value; compare values with [`BasePFraction::value_eq`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFraction")]
pub struct BasePFraction {
    p: Prime,
    digits: Vec<u64>,
}

#[derive(Deserialize)]
struct RawFraction {
    p: u64,
    digits: Vec<u64>,
}

impl TryFrom<RawFraction> for BasePFraction {
    type Error = Error;
    fn try_from(raw: RawFraction) -> Result<BasePFraction> {
        BasePFraction::new(Prime::new(raw.p)?, raw.digits)
    }
}

impl BasePFraction {
    pub fn new(p: Prime, digits: Vec<u64>) -> Result<BasePFraction> {
        for &d in &digits {
            if d >= p.get() {
                return Err(Error::DigitOutOfRange { p: p.get(), digit: d });
            }
        }
        Ok(BasePFraction { p, digits })
    }

    pub fn zero(p: Prime) -> BasePFraction {
        BasePFraction { p, digits: vec![] }
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

    /// Exact value as a rational in [0, 1).
    pub fn value(&self) -> BigRational {
        let den = BigInt::from(self.p.get()).pow(self.len() as u32);
        BigRational::new(BigInt::from(self.numerator(self.len())), den)
    }

    /// Value times p^len as an integer, for a target length >= self.len().
    pub(crate) fn numerator(&self, len: usize) -> BigUint {
        debug_assert!(len >= self.len());
        let p = self.p.get();
        // little-endian in p^0..p^{len-1} is the reversed, zero-padded digit list
        let mut le = vec![0u64; len - self.len()];
        le.extend(self.digits.iter().rev());
        digits_to_biguint(&le, p)
    }

    /// Rebuild from value * p^len; inverse of [`BasePFraction::numerator`].
    pub(crate) fn from_numerator(num: &BigUint, p: Prime, len: usize) -> BasePFraction {
        let mut digits = biguint_to_digits(num, p.get(), len);
        digits.reverse();
        BasePFraction { p, digits }
    }

    pub fn to_f64(&self) -> f64 {
        let lim = self.len().min(F64_DIGITS);
        let p = self.p.get() as f64;
        let mut acc = 0.0;
        for k in (0..lim).rev() {
            acc = (acc + self.digits[k] as f64) / p;
        }
        acc
    }

    /// New leading digit: this is x -> (x + d)/p, the real half of a skew step.
    pub fn prepended(&self, d: u64) -> Result<BasePFraction> {
        if d >= self.p.get() {
            return Err(Error::DigitOutOfRange {
                p: self.p.get(),
                digit: d,
            });
        }
        let mut digits = Vec::with_capacity(self.len() + 1);
        digits.push(d);
        digits.extend_from_slice(&self.digits);
        Ok(BasePFraction { p: self.p, digits })
    }

    /// First k digits, zero-extended: the value's box address at depth k.
    pub fn leading(&self, k: usize) -> Vec<u64> {
        let mut out = vec![0u64; k];
        for (slot, &d) in out.iter_mut().zip(self.digits.iter()) {
            *slot = d;
        }
        out
    }

    /// Same value, ignoring trailing zeros.
    pub fn value_eq(&self, other: &BasePFraction) -> bool {
        if self.p != other.p {
            return false;
        }
        fn trim(d: &[u64]) -> &[u64] {
            let end = d.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
            &d[..end]
        }
        trim(&self.digits) == trim(&other.digits)
    }
}

/// A point of the skew product space: a p-adic coordinate and a real
/// coordinate in [0, 1), sharing one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct SolenoidPoint {
    padic: PadicInt,
    #[serde(rename = "real_digits", serialize_with = "ser_real")]
    real: BasePFraction,
}

fn ser_real<S: serde::Serializer>(
    real: &BasePFraction,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    real.digits().serialize(s)
}

#[derive(Deserialize)]
struct RawPoint {
    padic: PadicInt,
    real_digits: Vec<u64>,
}

impl TryFrom<RawPoint> for SolenoidPoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<SolenoidPoint> {
        let real = BasePFraction::new(raw.padic.prime(), raw.real_digits)?;
        SolenoidPoint::new(raw.padic, real)
    }
}

impl SolenoidPoint {
    pub fn new(padic: PadicInt, real: BasePFraction) -> Result<SolenoidPoint> {
        if padic.prime() != real.prime() {
            return Err(Error::PrimeMismatch {
                left: padic.prime().get(),
                right: real.prime().get(),
            });
        }
        Ok(SolenoidPoint { padic, real })
    }

    /// (alpha, 0): the canonical starting point for orbit statistics.
    pub fn from_padic(padic: PadicInt) -> SolenoidPoint {
        let real = BasePFraction::zero(padic.prime());
        SolenoidPoint { padic, real }
    }

    pub fn prime(&self) -> Prime {
        self.padic.prime()
    }

    pub fn padic(&self) -> &PadicInt {
        &self.padic
    }

    pub fn real(&self) -> &BasePFraction {
        &self.real
    }
}

/// An r-tuple of solenoid points over one prime; the state of the product
/// system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPoint {
    components: Vec<SolenoidPoint>,
}

impl ProductPoint {
    pub fn new(components: Vec<SolenoidPoint>) -> Result<ProductPoint> {
        let first = components
            .first()
            .ok_or(Error::EmptyInput("product point needs >= 1 component"))?;
        let p = first.prime();
        for c in &components {
            if c.prime() != p {
                return Err(Error::PrimeMismatch {
                    left: p.get(),
                    right: c.prime().get(),
                });
            }
        }
        Ok(ProductPoint { components })
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }

    pub fn prime(&self) -> Prime {
        self.components[0].prime()
    }

    pub fn components(&self) -> &[SolenoidPoint] {
        &self.components
    }
}

/// Maximum character level: p^t stays within exact big-integer work and
/// f64-representable angle denominators.
pub const LEVEL_CAP: u32 = 40;

/// Index (m, t) of a character on the r-fold product at level t:
/// P -> exp(2 pi i sum_j m_j coord_t(P_j) / p^t). m must be nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterIndex {
    m: Vec<i64>,
    t: u32,
}

impl CharacterIndex {
    pub fn new(m: Vec<i64>, t: u32) -> Result<CharacterIndex> {
        if m.is_empty() || m.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        if t > LEVEL_CAP {
            return Err(Error::LevelTooLarge { t, cap: LEVEL_CAP });
        }
        Ok(CharacterIndex { m, t })
    }

    pub fn m(&self) -> &[i64] {
        &self.m
    }

    pub fn level(&self) -> u32 {
        self.t
    }
}

/// A p-adic number with denominator a power of p: num / p^denom_exp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicRational {
    pub num: PadicInt,
    pub denom_exp: usize,
}

/// The level-t inverse-limit coordinate of a point: an exact value in
/// [0, p^t), split into its integer part s_{t-1}(alpha) and fractional part x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCoordinate {
    pub int_part: BigUint,
    pub frac: BasePFraction,
}

impl LevelCoordinate {
    pub fn value(&self) -> BigRational {
        BigRational::from(BigInt::from(self.int_part.clone())) + self.frac.value()
    }

    pub fn to_f64(&self) -> f64 {
        self.int_part.to_f64().unwrap_or(f64::INFINITY) + self.frac.to_f64()
    }
}

/// One skew-product step: pop digit 0 of the p-adic part, push it onto the
/// real part. Needs one known digit.
pub fn skew_step(point: &SolenoidPoint) -> Result<SolenoidPoint> {
    let t0 = point.padic().digit(0)?;
    let padic = point.padic().low_digits_dropped(1)?;
    let real = point.real().prepended(t0)?;
    Ok(SolenoidPoint { padic, real })
}

/// One base-map step: (alpha - t_0)/p, i.e. drop digit 0.
pub fn base_step(alpha: &PadicInt) -> Result<PadicInt> {
    if alpha.precision() == 0 {
        return Err(Error::PrecisionExhausted {
            wanted: 0,
            available: 0,
        });
    }
    alpha.low_digits_dropped(1)
}

/// n base-map steps at once; precision drops by n.
pub fn base_iterate(alpha: &PadicInt, n: usize) -> Result<PadicInt> {
    alpha.low_digits_dropped(n)
}

/// Where (gamma, 0) lands after n+1 skew steps, in closed form:
/// ((gamma - s_n)/p^{n+1}, s_n/p^{n+1}). The real digits are the reversed
/// prefix t_n..t_0.
pub fn orbit_point(gamma: &PadicInt, n: usize) -> Result<SolenoidPoint> {
    if n >= gamma.precision() {
        return Err(Error::PrecisionExhausted {
            wanted: n,
            available: gamma.precision(),
        });
    }
    let padic = gamma.low_digits_dropped(n + 1)?;
    let mut digits: Vec<u64> = gamma.digits()[..=n].to_vec();
    digits.reverse();
    let real = BasePFraction::new(gamma.prime(), digits)?;
    Ok(SolenoidPoint { padic, real })
}

/// The level-t coordinate x + s_{t-1}(alpha) of a point, exact in [0, p^t).
/// Level 0 is the real coordinate alone (value mod 1).
pub fn level_coordinate(point: &SolenoidPoint, t: u32) -> Result<LevelCoordinate> {
    let int_part = if t == 0 {
        BigUint::zero()
    } else {
        point.padic().partial_sum(t as usize - 1)?
    };
    Ok(LevelCoordinate {
        int_part,
        frac: point.real().clone(),
    })
}

/// Evaluate the character indexed by chi at a product point:
/// exp(2 pi i sum_j m_j coord_t(P_j) / p^t). The integer parts are summed
/// exactly and reduced mod p^t before any float enters.
pub fn character_eval(point: &ProductPoint, chi: &CharacterIndex) -> Result<Complex64> {
    if chi.m().len() != point.dims() {
        return Err(Error::DimensionMismatch {
            left: chi.m().len(),
            right: point.dims(),
        });
    }
    let t = chi.level();
    let pt = BigInt::from(point.prime().get()).pow(t);
    let mut int_sum = BigInt::zero();
    let mut frac_sum = 0.0f64;
    for (&mj, comp) in chi.m().iter().zip(point.components()) {
        let coord = level_coordinate(comp, t)?;
        int_sum += BigInt::from(coord.int_part) * mj;
        frac_sum += comp.real().to_f64() * mj as f64;
    }
    let int_mod = int_sum.mod_floor(&pt);
    let denom = pt.to_f64().expect("p^t is finite for t <= LEVEL_CAP");
    let theta = ((int_mod.to_f64().expect("reduced value is below p^t") + frac_sum) / denom)
        .rem_euclid(1.0);
    Ok(Complex64::from_polar(1.0, TAU * theta))
}

/// Combine an r-tuple into one point: padic part sum m_j alpha_j plus the
/// integer carry of sum m_j x_j, real part the fractional remainder. This is
/// the quotient-group sum realized in the fundamental domain Z_p x [0, 1);
/// the real side is computed exactly on digit vectors.
pub fn linear_combination(point: &ProductPoint, m: &[i64]) -> Result<SolenoidPoint> {
    if m.len() != point.dims() {
        return Err(Error::DimensionMismatch {
            left: m.len(),
            right: point.dims(),
        });
    }
    let p = point.prime();
    // p-adic side: sum of m_j * alpha_j at the minimum component precision
    let mut padic: Option<PadicInt> = None;
    for (&mj, comp) in m.iter().zip(point.components()) {
        let term = comp.padic().mul_int(mj);
        padic = Some(match padic {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let padic = padic.expect("product point is non-empty");

    // real side: exact sum over a common denominator p^len
    let len = point
        .components()
        .iter()
        .map(|c| c.real().len())
        .max()
        .unwrap_or(0);
    let mut total = BigInt::zero();
    for (&mj, comp) in m.iter().zip(point.components()) {
        total += BigInt::from(comp.real().numerator(len)) * mj;
    }
    let plen = BigInt::from(p.get()).pow(len as u32);
    let (carry, rem) = total.div_mod_floor(&plen);
    let real = BasePFraction::from_numerator(
        &rem.to_biguint().expect("floor remainder is non-negative"),
        p,
        len,
    );
    let carry = carry
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("carry exceeds i64".into()))?;
    Ok(SolenoidPoint {
        padic: padic.add_int(carry),
        real,
    })
}

/// Floor map for num / p^e: the integer part is the digit stream shifted
/// down e places (a p-adic integer), the remainder is the dropped digits
/// read as a fraction, s_{e-1}(num)/p^e.
pub fn floor_padic(beta: &PadicRational) -> Result<(PadicInt, BasePFraction)> {
    let e = beta.denom_exp;
    let floor = beta.num.low_digits_dropped(e)?;
    let mut rem_digits: Vec<u64> = beta.num.digits()[..e].to_vec();
    rem_digits.reverse();
    let rem = BasePFraction::new(beta.num.prime(), rem_digits)?;
    Ok((floor, rem))
}

/// All nonzero integer vectors of length `dims` with max-norm at most
/// `bound`, in ascending lexicographic order (leftmost component most
/// significant). Exactly (2 bound + 1)^dims - 1 vectors.
pub fn nonzero_vectors(dims: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1).max(0) as usize;
    let total = side.pow(dims as u32);
    let mut out = Vec::with_capacity(total.saturating_sub(1));
    let mut current = vec![-bound; dims];
    for _ in 0..total {
        if current.iter().any(|&c| c != 0) {
            out.push(current.clone());
        }
        for slot in (0..dims).rev() {
            if current[slot] < bound {
                current[slot] += 1;
                break;
            }
            current[slot] = -bound;
        }
    }
    out
}
