//! Truncated p-adic integers for an odd prime p.
//!
//! A [`PadicInt`] is a digit vector t_0..t_{N-1} with 0 <= t_i < p,
//! representing sum t_i p^i known through precision N. Precision is a hard
//! budget: reading digit N or beyond is an error, and arithmetic carries the
//! minimum precision of its operands, so a value can never silently pretend
//! to more digits than it has.
//!
//! Digits are stored one per machine word. Multiplication, inversion, and
//! Teichmueller lifting round-trip through big integers; the radix
//! conversions chunk as many digits as fit a u64 at a time, so they stay
//! cheap even at 10^5 digits.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::prng::CounterRng;
use crate::{Error, Result};

/// An odd prime >= 3, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if p >= 3 && p % 2 == 1 && is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotAPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Prime, D::Error> {
        let raw = u64::deserialize(d)?;
        Prime::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Deterministic Miller-Rabin, exact for all u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Largest k with p^k <= u64::MAX, so k digits pack into one word.
pub(crate) fn chunk_len(p: u64) -> usize {
    let mut k = 0usize;
    let mut acc: u128 = 1;
    while acc * p as u128 <= u64::MAX as u128 {
        acc *= p as u128;
        k += 1;
    }
    k
}

fn pow_u64(p: u64, k: usize) -> u64 {
    let mut acc = 1u64;
    for _ in 0..k {
        acc *= p;
    }
    acc
}

/// Value of a little-endian digit slice: sum digits[i] * p^i.
pub(crate) fn digits_to_biguint(digits: &[u64], p: u64) -> BigUint {
    let k = chunk_len(p);
    let mut acc = BigUint::zero();
    for chunk in digits.chunks(k).rev() {
        let chunk_val = chunk.iter().rev().fold(0u64, |a, &d| a * p + d);
        acc = acc * BigUint::from(pow_u64(p, chunk.len())) + chunk_val;
    }
    acc
}

/// First n base-p digits of v, little-endian (v is reduced mod p^n).
pub(crate) fn biguint_to_digits(v: &BigUint, p: u64, n: usize) -> Vec<u64> {
    let k = chunk_len(p);
    let chunk_base = BigUint::from(pow_u64(p, k));
    let mut out = Vec::with_capacity(n);
    let mut v = v.clone();
    while out.len() < n {
        if v.is_zero() {
            out.resize(n, 0);
            break;
        }
        let (q, r) = v.div_rem(&chunk_base);
        let mut r64 = r.to_u64().expect("remainder below p^k fits u64");
        for _ in 0..k {
            if out.len() == n {
                break;
            }
            out.push(r64 % p);
            r64 /= p;
        }
        v = q;
    }
    out
}

/// A p-adic integer known through finitely many digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPadic")]
pub struct PadicInt {
    p: Prime,
    digits: Vec<u64>,
}

#[derive(Deserialize)]
struct RawPadic {
    p: u64,
    digits: Vec<u64>,
}

impl TryFrom<RawPadic> for PadicInt {
    type Error = Error;
    fn try_from(raw: RawPadic) -> Result<PadicInt> {
        PadicInt::from_digits(Prime::new(raw.p)?, raw.digits)
    }
}

/// Decomposition x = p^val * unit with the unit's digit 0 nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValUnit {
    pub val: usize,
    pub unit: PadicInt,
}

impl PadicInt {
    /// Embed a non-negative integer with `precision >= 1` known digits.
    /// Values at or above p^precision are reduced mod p^precision.
    pub fn from_integer(value: u64, p: Prime, precision: usize) -> Result<PadicInt> {
        if precision == 0 {
            return Err(Error::InvalidParameter(
                "from_integer needs precision >= 1".into(),
            ));
        }
        Ok(PadicInt {
            p,
            digits: biguint_to_digits(&BigUint::from(value), p.get(), precision),
        })
    }

    /// Wrap an explicit little-endian digit vector. Empty vectors are legal
    /// and mean "no digits known" (precision 0); they arise from consuming
    /// every digit of a value, not from constructors.
    pub fn from_digits(p: Prime, digits: Vec<u64>) -> Result<PadicInt> {
        for &d in &digits {
            if d >= p.get() {
                return Err(Error::DigitOutOfRange { p: p.get(), digit: d });
            }
        }
        Ok(PadicInt { p, digits })
    }

    pub fn zero(p: Prime, precision: usize) -> PadicInt {
        PadicInt {
            p,
            digits: vec![0; precision],
        }
    }

    /// Digits drawn i.i.d. uniform on [0, p) from the counter generator.
    pub fn random(seed: u64, p: Prime, precision: usize) -> PadicInt {
        let mut rng = CounterRng::new(seed);
        let digits = (0..precision).map(|_| rng.below(p.get())).collect();
        PadicInt { p, digits }
    }

    /// The Teichmueller lift of a: the unique root of x^{p-1} = 1 congruent
    /// to a mod p, to `precision` digits.
    ///
    /// Up to 512 digits this iterates x -> x^p mod p^N to its fixed point
    /// (each pass is exact one digit deeper, so at most N passes). Beyond
    /// that the same fixed point is reached by quadratically convergent root
    /// lifting, seeded with the 512-digit iterate; the two routes agree
    /// wherever they overlap and are cross-checked in tests.
    pub fn teichmuller(a: u64, p: Prime, precision: usize) -> Result<PadicInt> {
        if a == 0 || a >= p.get() {
            return Err(Error::ResidueOutOfRange {
                a,
                max: p.get() - 1,
            });
        }
        if precision == 0 {
            return Err(Error::InvalidParameter(
                "teichmuller needs precision >= 1".into(),
            ));
        }
        const SIMPLE_MAX: usize = 512;
        let start = precision.min(SIMPLE_MAX);
        let mut x = teichmuller_fixed_point(a, p.get(), start);
        let mut have = start;
        let pb = BigUint::from(p.get());
        // Division-free lifting: carry f'(x)^{-1} along and refresh it by
        // its own Newton step, so the one gcd inversion happens at the
        // small starting precision and every level above is multiplies.
        let mut dinv = BigUint::from(0u32);
        if have < precision {
            let modulus = pb.pow(have as u32);
            let xp2 = x.modpow(&BigUint::from(p.get() - 2), &modulus);
            let fprime = (&xp2 * (p.get() - 1)) % &modulus;
            dinv = fprime
                .modinv(&modulus)
                .expect("f'(x) is a unit at a root of x^{p-1} = 1");
        }
        while have < precision {
            let next = (have * 2).min(precision);
            let modulus = pb.pow(next as u32);
            // Newton step for f(x) = x^{p-1} - 1: correct digits double,
            // since dinv inverts f'(x) mod p^have and f(x) = 0 mod p^have.
            let xp2 = x.modpow(&BigUint::from(p.get() - 2), &modulus);
            let xp1 = (&xp2 * &x) % &modulus;
            let f = (xp1 + &modulus - 1u32) % &modulus;
            let correction = f * &dinv % &modulus;
            x = (&x + &modulus - correction) % &modulus;
            have = next;
            if have < precision {
                // dinv <- dinv(2 - f'(x) dinv): correct digits double too
                let xp2 = x.modpow(&BigUint::from(p.get() - 2), &modulus);
                let fprime = (&xp2 * (p.get() - 1)) % &modulus;
                let fd = &fprime * &dinv % &modulus;
                let two = (BigUint::from(2u32) + &modulus - fd) % &modulus;
                dinv = dinv * two % &modulus;
            }
        }
        Ok(PadicInt {
            p,
            digits: biguint_to_digits(&x, p.get(), precision),
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn digit(&self, n: usize) -> Result<u64> {
        self.digits
            .get(n)
            .copied()
            .ok_or(Error::PrecisionExhausted {
                wanted: n,
                available: self.precision(),
            })
    }

    /// s_n = sum_{i<=n} t_i p^i, an ordinary integer below p^{n+1}.
    pub fn partial_sum(&self, n: usize) -> Result<BigUint> {
        if n >= self.precision() {
            return Err(Error::PrecisionExhausted {
                wanted: n,
                available: self.precision(),
            });
        }
        Ok(digits_to_biguint(&self.digits[..=n], self.p.get()))
    }

    /// s_n / p^{n+1}, the real coordinate the orbit of this value visits at
    /// step n+1; always in [0, 1).
    pub fn partial_sum_ratio(&self, n: usize) -> Result<BigRational> {
        let num = BigInt::from(self.partial_sum(n)?);
        let den = BigInt::from(self.p.get()).pow(n as u32 + 1);
        Ok(BigRational::new(num, den))
    }

    /// Value mod p^precision as a plain big integer.
    pub fn to_biguint(&self) -> BigUint {
        digits_to_biguint(&self.digits, self.p.get())
    }

    fn check_prime(&self, other: &PadicInt) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        Ok(())
    }

    /// Digit-wise sum with carry; precision is the minimum of the operands.
    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_prime(other)?;
        let n = self.precision().min(other.precision());
        let p = self.p.get();
        let mut digits = Vec::with_capacity(n);
        let mut carry = 0u64;
        for i in 0..n {
            let s = self.digits[i] + other.digits[i] + carry;
            digits.push(s % p);
            carry = s / p;
        }
        Ok(PadicInt { p: self.p, digits })
    }

    /// The p-complement: add(x, x.neg()) is zero at x's precision.
    pub fn neg(&self) -> PadicInt {
        let p = self.p.get();
        let mut digits = vec![0u64; self.precision()];
        if let Some(first) = self.digits.iter().position(|&d| d != 0) {
            digits[first] = p - self.digits[first];
            for (out, &d) in digits[first + 1..].iter_mut().zip(&self.digits[first + 1..]) {
                *out = p - 1 - d;
            }
        }
        PadicInt { p: self.p, digits }
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.add(&other.neg())
    }

    /// Product truncated to the minimum operand precision.
    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_prime(other)?;
        let n = self.precision().min(other.precision());
        let p = self.p.get();
        let a = digits_to_biguint(&self.digits[..n], p);
        let b = digits_to_biguint(&other.digits[..n], p);
        Ok(PadicInt {
            p: self.p,
            digits: biguint_to_digits(&(a * b), p, n),
        })
    }

    /// Multiply by an ordinary (possibly negative) integer.
    pub fn mul_int(&self, k: i64) -> PadicInt {
        let p = self.p.get();
        let scaled = self.to_biguint() * BigUint::from(k.unsigned_abs());
        let out = PadicInt {
            p: self.p,
            digits: biguint_to_digits(&scaled, p, self.precision()),
        };
        if k < 0 {
            out.neg()
        } else {
            out
        }
    }

    /// Add an ordinary (possibly negative) integer.
    pub fn add_int(&self, k: i64) -> PadicInt {
        let modulus = BigInt::from(self.p.get()).pow(self.precision() as u32);
        let v = (BigInt::from(self.to_biguint()) + k).mod_floor(&modulus);
        let mag = v.to_biguint().expect("mod_floor result is non-negative");
        PadicInt {
            p: self.p,
            digits: biguint_to_digits(&mag, self.p.get(), self.precision()),
        }
    }

    /// x^e at x's precision, by repeated squaring. x^0 is 1.
    pub fn pow(&self, mut e: u64) -> PadicInt {
        let mut acc = PadicInt {
            p: self.p,
            digits: biguint_to_digits(&BigUint::one(), self.p.get(), self.precision()),
        };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same prime");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same prime");
            }
        }
        acc
    }

    /// Split off the power of p: x = p^val * unit, unit's digit 0 nonzero.
    /// The unit keeps precision - val digits (those are all that are known).
    pub fn val_unit(&self) -> Result<ValUnit> {
        match self.digits.iter().position(|&d| d != 0) {
            None => Err(Error::AllDigitsZero),
            Some(v) => Ok(ValUnit {
                val: v,
                unit: PadicInt {
                    p: self.p,
                    digits: self.digits[v..].to_vec(),
                },
            }),
        }
    }

    /// Inverse of a unit mod p^precision, same precision.
    pub fn inverse_unit(&self) -> Result<PadicInt> {
        if self.precision() == 0 {
            return Err(Error::PrecisionExhausted {
                wanted: 0,
                available: 0,
            });
        }
        if self.digits[0] == 0 {
            return Err(Error::NotAUnit);
        }
        let p = self.p.get();
        let modulus = BigUint::from(p).pow(self.precision() as u32);
        let inv = self
            .to_biguint()
            .modinv(&modulus)
            .expect("digit 0 nonzero means coprime to p^N");
        Ok(PadicInt {
            p: self.p,
            digits: biguint_to_digits(&inv, p, self.precision()),
        })
    }

    /// Discard the n lowest digits (divide by p^n when they are zero, or
    /// shift the digit stream in general). Precision drops by n.
    pub(crate) fn low_digits_dropped(&self, n: usize) -> Result<PadicInt> {
        if n > self.precision() {
            return Err(Error::PrecisionExhausted {
                wanted: n,
                available: self.precision(),
            });
        }
        Ok(PadicInt {
            p: self.p,
            digits: self.digits[n..].to_vec(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<PadicInt> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.digits.len().min(16);
        write!(f, "[")?;
        for (i, d) in self.digits[..shown].iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        if self.digits.len() > shown {
            write!(f, ", ..")?;
        }
        write!(f, "] base {} ({} digits)", self.p, self.precision())
    }
}

/// Fixed point of x -> x^p mod p^n starting from a; at most n passes.
fn teichmuller_fixed_point(a: u64, p: u64, n: usize) -> BigUint {
    let modulus = BigUint::from(p).pow(n as u32);
    let pexp = BigUint::from(p);
    let mut x = BigUint::from(a) % &modulus;
    for _ in 0..=n {
        let y = x.modpow(&pexp, &modulus);
        if y == x {
            break;
        }
        x = y;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(13).is_ok());
        assert_eq!(Prime::new(2), Err(Error::NotAPrime(2)));
        assert_eq!(Prime::new(9), Err(Error::NotAPrime(9)));
        assert_eq!(Prime::new(1), Err(Error::NotAPrime(1)));
        assert!(Prime::new(1_000_003).is_ok());
    }

    #[test]
    fn from_integer_expands_digits() {
        let x = PadicInt::from_integer(5, p(3), 4).unwrap();
        assert_eq!(x.digits(), &[2, 1, 0, 0]);
        let big = PadicInt::from_integer(100, p(3), 2).unwrap();
        // 100 = 1 + 0*3 mod 9
        assert_eq!(big.digits(), &[1, 0]);
        assert!(PadicInt::from_integer(1, p(3), 0).is_err());
    }

    #[test]
    fn digit_reads_are_budgeted() {
        let x = PadicInt::from_integer(1, p(3), 2).unwrap();
        assert_eq!(x.digit(0), Ok(1));
        assert_eq!(x.digit(1), Ok(0));
        assert_eq!(
            x.digit(5),
            Err(Error::PrecisionExhausted {
                wanted: 5,
                available: 2
            })
        );
    }

    #[test]
    fn partial_sums_match_the_expansion() {
        let x = PadicInt::from_integer(5, p(3), 4).unwrap();
        assert_eq!(x.partial_sum(0).unwrap(), BigUint::from(2u32));
        assert_eq!(x.partial_sum(1).unwrap(), BigUint::from(5u32));
        assert_eq!(x.partial_sum(3).unwrap(), BigUint::from(5u32));
        assert!(x.partial_sum(4).is_err());
        let r = x.partial_sum_ratio(1).unwrap();
        assert_eq!(r, BigRational::new(5.into(), 9.into()));
    }

    #[test]
    fn add_carries_and_takes_min_precision() {
        let a = PadicInt::from_integer(2, p(3), 3).unwrap();
        let b = PadicInt::from_integer(1, p(3), 3).unwrap();
        assert_eq!(a.add(&b).unwrap().digits(), &[0, 1, 0]);
        let short = PadicInt::from_integer(1, p(3), 2).unwrap();
        assert_eq!(a.add(&short).unwrap().precision(), 2);
        let other = PadicInt::from_integer(1, p(5), 3).unwrap();
        assert_eq!(
            a.add(&other),
            Err(Error::PrimeMismatch { left: 3, right: 5 })
        );
    }

    #[test]
    fn neg_is_the_additive_inverse() {
        let a = PadicInt::from_integer(1, p(3), 3).unwrap();
        assert_eq!(a.neg().digits(), &[2, 2, 2]);
        assert!(a.add(&a.neg()).unwrap().is_zero());
        let z = PadicInt::zero(p(3), 4);
        assert_eq!(z.neg(), z);
        let x = PadicInt::from_integer(6, p(3), 4).unwrap();
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn mul_agrees_with_integer_arithmetic() {
        let a = PadicInt::from_integer(2, p(5), 3).unwrap();
        let b = PadicInt::from_integer(13, p(5), 3).unwrap();
        // 26 = 1 + 0*5 + 1*25
        assert_eq!(a.mul(&b).unwrap().digits(), &[1, 0, 1]);
        let short = PadicInt::from_integer(13, p(5), 2).unwrap();
        assert_eq!(a.mul(&short).unwrap().precision(), 2);
    }

    #[test]
    fn mul_matches_schoolbook_convolution() {
        // Independent digit-level route: plain convolution with carries.
        let prime = p(7);
        let a = PadicInt::random(11, prime, 24);
        let b = PadicInt::random(12, prime, 24);
        let mut acc = vec![0u128; 48];
        for (i, &x) in a.digits().iter().enumerate() {
            for (j, &y) in b.digits().iter().enumerate() {
                acc[i + j] += (x as u128) * (y as u128);
            }
        }
        let mut carry = 0u128;
        let mut expect = Vec::new();
        for cell in acc.iter().take(24) {
            let s = cell + carry;
            expect.push((s % 7) as u64);
            carry = s / 7;
        }
        assert_eq!(a.mul(&b).unwrap().digits(), expect.as_slice());
    }

    #[test]
    fn mul_int_and_add_int_handle_signs() {
        let a = PadicInt::from_integer(4, p(5), 3).unwrap();
        assert_eq!(a.mul_int(3).digits(), &[2, 2, 0]); // 12 = 2 + 2*5
        assert_eq!(a.mul_int(-1), a.neg());
        assert_eq!(a.mul_int(0), PadicInt::zero(p(5), 3));
        assert_eq!(a.add_int(1).digits(), &[0, 1, 0]);
        assert_eq!(a.add_int(-4), PadicInt::zero(p(5), 3));
        assert_eq!(a.add_int(-5).digits(), &[4, 4, 4]); // -1 mod 125
    }

    #[test]
    fn val_unit_splits_off_the_power_of_p() {
        let x = PadicInt::from_integer(18, p(3), 5).unwrap();
        let vu = x.val_unit().unwrap();
        assert_eq!(vu.val, 2);
        assert_eq!(vu.unit.digits(), &[2, 0, 0]);
        assert_eq!(vu.unit.precision(), 3);
        assert_eq!(
            PadicInt::zero(p(3), 4).val_unit(),
            Err(Error::AllDigitsZero)
        );
    }

    #[test]
    fn inverse_unit_matches_the_known_value() {
        let u = PadicInt::from_integer(2, p(5), 3).unwrap();
        let inv = u.inverse_unit().unwrap();
        // 63 = 3 + 2*5 + 2*25 and 2*63 = 126 = 1 mod 125
        assert_eq!(inv.digits(), &[3, 2, 2]);
        let one = u.mul(&inv).unwrap();
        assert_eq!(one.digits(), &[1, 0, 0]);
        let nonunit = PadicInt::from_integer(10, p(5), 3).unwrap();
        assert_eq!(nonunit.inverse_unit(), Err(Error::NotAUnit));
    }

    #[test]
    fn inverse_unit_round_trips_for_random_units() {
        let prime = p(13);
        for seed in 0..8 {
            let mut x = PadicInt::random(seed, prime, 50);
            if x.digit(0).unwrap() == 0 {
                x = x.add_int(1 + seed as i64 % 12);
            }
            let inv = x.inverse_unit().unwrap();
            let prod = x.mul(&inv).unwrap();
            assert_eq!(prod.digit(0).unwrap(), 1);
            assert!(prod.digits()[1..].iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn teichmuller_pins_the_known_table() {
        let t = PadicInt::teichmuller(2, p(5), 3).unwrap();
        assert_eq!(t.digits(), &[2, 1, 2]); // 57, the fixed point of x -> x^5 mod 125
        let minus_one = PadicInt::teichmuller(4, p(5), 4).unwrap();
        assert_eq!(minus_one.digits(), &[4, 4, 4, 4]);
        let one = PadicInt::teichmuller(1, p(7), 4).unwrap();
        assert_eq!(one.digits(), &[1, 0, 0, 0]);
        assert!(PadicInt::teichmuller(0, p(5), 3).is_err());
        assert!(PadicInt::teichmuller(5, p(5), 3).is_err());
    }

    #[test]
    fn teichmuller_is_a_root_of_unity_at_every_precision() {
        for &q in &[3u64, 5, 7, 11, 13] {
            let prime = p(q);
            for n in [1usize, 2, 7, 33, 64] {
                for a in 1..q {
                    let t = PadicInt::teichmuller(a, prime, n).unwrap();
                    assert_eq!(t.digit(0).unwrap(), a);
                    let power = t.pow(q - 1);
                    assert_eq!(power.digit(0).unwrap(), 1, "p={q} a={a} n={n}");
                    assert!(
                        power.digits()[1..].iter().all(|&d| d == 0),
                        "p={q} a={a} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn teichmuller_lifts_are_closed_under_multiplication() {
        let prime = p(11);
        let n = 20;
        for a in 1..11u64 {
            for b in 1..11u64 {
                let ta = PadicInt::teichmuller(a, prime, n).unwrap();
                let tb = PadicInt::teichmuller(b, prime, n).unwrap();
                let tc = PadicInt::teichmuller(a * b % 11, prime, n).unwrap();
                assert_eq!(ta.mul(&tb).unwrap(), tc, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn teichmuller_newton_ladder_agrees_with_the_fixed_point_route() {
        // 600 digits forces the Newton branch; recompute by the plain
        // x -> x^p iteration through public ops as the independent route.
        let prime = p(5);
        let n = 600;
        let fast = PadicInt::teichmuller(2, prime, n).unwrap();
        let mut slow = PadicInt::from_integer(2, prime, n).unwrap();
        loop {
            let next = slow.pow(5);
            if next == slow {
                break;
            }
            slow = next;
        }
        assert_eq!(fast, slow);
        // several doubling levels (512 -> 1024 -> 1300) stay consistent
        // with the one-level result and still square to the same root
        let tall = PadicInt::teichmuller(2, prime, 1300).unwrap();
        assert_eq!(&tall.digits()[..n], slow.digits());
        let power = tall.pow(4);
        assert_eq!(power.digit(0).unwrap(), 1);
        assert!(power.digits()[1..].iter().all(|&d| d == 0));
    }

    #[test]
    fn random_digits_are_reproducible_and_balanced() {
        let prime = p(5);
        let x = PadicInt::random(99, prime, 100_000);
        let y = PadicInt::random(99, prime, 100_000);
        assert_eq!(x, y);
        let mut counts = [0u64; 5];
        for &d in x.digits() {
            counts[d as usize] += 1;
        }
        let expect = 100_000.0 / 5.0;
        let sigma = (100_000.0_f64 * 0.2 * 0.8).sqrt();
        for (d, &c) in counts.iter().enumerate() {
            let z = (c as f64 - expect) / sigma;
            assert!(z.abs() < 5.0, "digit {d} count {c} is {z} sigma off");
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let x = PadicInt::teichmuller(3, p(7), 9).unwrap();
        let s = x.to_json();
        assert!(s.starts_with("{\"p\":7,\"digits\":["));
        assert_eq!(PadicInt::from_json(&s).unwrap(), x);
        assert!(PadicInt::from_json("{\"p\":4,\"digits\":[1]}").is_err());
        assert!(PadicInt::from_json("{\"p\":5,\"digits\":[7]}").is_err());
    }

    #[test]
    fn dropping_low_digits_shrinks_precision() {
        let x = PadicInt::from_integer(5, p(3), 4).unwrap();
        let y = x.low_digits_dropped(1).unwrap();
        assert_eq!(y.digits(), &[1, 0, 0]);
        let all = x.low_digits_dropped(4).unwrap();
        assert_eq!(all.precision(), 0);
        assert!(x.low_digits_dropped(5).is_err());
    }
}
