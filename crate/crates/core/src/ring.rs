//! Exact arithmetic in the truncated rings Z/l^n Z and in Z_l at working precision.
//!
//! The ring is fixed by a prime `l`; the uniformizer is `l` itself. A
//! [`Residue`] is an element of `Lambda_n = Z/l^n Z` held as its canonical
//! representative in `[0, l^n)`. An [`Approx`] is an element of `Z_l` known
//! modulo `l^N`; arithmetic tracks the precision `N`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("not a unit at level {level}: valuation >= {valuation}")]
    NotAUnit { level: u32, valuation: u32 },
    #[error("level must be positive")]
    ZeroLevel,
    #[error("target level {target} not in 1..={level}")]
    LevelOutOfRange { level: u32, target: u32 },
    #[error("embedding level {target} below source level {from_level}")]
    EmbedBelowSource { from_level: u32, target: u32 },
    #[error("division by pi^{shift} needs valuation >= {shift}")]
    InexactDivision { shift: u32 },
    #[error("precision underflow: lost {lost} of {have} digits")]
    PrecisionUnderflow { have: u32, lost: u32 },
}

/// The coefficient ring Z_l with uniformizer pi = l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalRing {
    prime: u64,
}

impl LocalRing {
    /// Construct the ring, rejecting composite `prime` with a deterministic
    /// Miller-Rabin check.
    pub fn new(prime: u64) -> Result<Self, RingError> {
        if is_prime_u64(prime) {
            Ok(LocalRing { prime })
        } else {
            Err(RingError::NotPrime(prime))
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn prime_big(&self) -> BigUint {
        BigUint::from(self.prime)
    }

    /// l^level.
    pub fn modulus(&self, level: u32) -> BigUint {
        self.prime_big().pow(level)
    }

    pub fn modulus_int(&self, level: u32) -> BigInt {
        BigInt::from(self.modulus(level))
    }

    /// Canonical representative of `value` in Lambda_level.
    pub fn residue<T: Into<BigInt>>(&self, level: u32, value: T) -> Residue {
        assert!(level >= 1, "level must be positive");
        let m = self.modulus_int(level);
        let mut v = value.into() % &m;
        if v.is_negative() {
            v += &m;
        }
        Residue {
            ring: *self,
            level,
            value: v.to_biguint().expect("canonical value is nonnegative"),
        }
    }

    pub fn zero(&self, level: u32) -> Residue {
        self.residue(level, 0)
    }

    pub fn one(&self, level: u32) -> Residue {
        self.residue(level, 1)
    }

    pub fn approx<T: Into<BigInt>>(&self, precision: u32, value: T) -> Approx {
        let r = self.residue(precision, value);
        Approx {
            ring: *self,
            precision,
            value: r.value,
        }
    }

    /// l-adic valuation of an integer, capped at `cap`. The flag is false
    /// exactly when `x = 0 mod l^cap`, in which case `cap` is only a floor.
    pub fn valuation_capped(&self, x: &BigInt, cap: u32) -> Valuation {
        let m = self.modulus_int(cap);
        let mut r = x % &m;
        if r.is_negative() {
            r += &m;
        }
        if r.is_zero() {
            return Valuation {
                value: cap,
                exact: false,
            };
        }
        let p = BigInt::from(self.prime);
        let mut v = 0u32;
        while (&r % &p).is_zero() {
            r /= &p;
            v += 1;
        }
        Valuation {
            value: v,
            exact: true,
        }
    }

    /// Inverse of `x` modulo l^level; `x` must be a unit.
    pub fn invert_mod(&self, x: &BigInt, level: u32) -> Result<BigUint, RingError> {
        let val = self.valuation_capped(x, level);
        if !val.exact || val.value > 0 {
            return Err(RingError::NotAUnit {
                level,
                valuation: val.value,
            });
        }
        let m = self.modulus_int(level);
        let e = x.extended_gcd(&m);
        debug_assert!(e.gcd.is_one());
        let mut inv = e.x % &m;
        if inv.is_negative() {
            inv += &m;
        }
        Ok(inv.to_biguint().expect("canonical inverse"))
    }
}

/// An l-adic valuation together with an exactness flag; inexact means the
/// stated value is only a lower bound imposed by the working modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valuation {
    pub value: u32,
    pub exact: bool,
}

/// An element of Lambda_n = Z/l^n Z in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residue {
    ring: LocalRing,
    level: u32,
    value: BigUint,
}

impl Residue {
    pub fn ring(&self) -> LocalRing {
        self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check_compatible(&self, other: &Residue) -> Result<(), RingError> {
        if self.ring.prime != other.ring.prime {
            return Err(RingError::PrimeMismatch(self.ring.prime, other.ring.prime));
        }
        if self.level != other.level {
            return Err(RingError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check_compatible(other)?;
        Ok(self
            .ring
            .residue(self.level, BigInt::from(&self.value + &other.value)))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check_compatible(other)?;
        Ok(self.ring.residue(
            self.level,
            BigInt::from(self.value.clone()) - BigInt::from(other.value.clone()),
        ))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check_compatible(other)?;
        Ok(self
            .ring
            .residue(self.level, BigInt::from(&self.value * &other.value)))
    }

    pub fn neg(&self) -> Residue {
        self.ring
            .residue(self.level, -BigInt::from(self.value.clone()))
    }

    /// Largest v <= n with l^v dividing the representative; inexact for zero.
    pub fn valuation(&self) -> Valuation {
        self.ring
            .valuation_capped(&BigInt::from(self.value.clone()), self.level)
    }

    pub fn is_unit(&self) -> bool {
        let v = self.valuation();
        v.exact && v.value == 0
    }

    /// Multiplicative inverse; errors on non-units.
    pub fn invert(&self) -> Result<Residue, RingError> {
        let inv = self
            .ring
            .invert_mod(&BigInt::from(self.value.clone()), self.level)?;
        Ok(Residue {
            ring: self.ring,
            level: self.level,
            value: inv,
        })
    }

    /// Transition map of the projective system: the image in Lambda_m, m <= n.
    pub fn reduce(&self, target: u32) -> Result<Residue, RingError> {
        if target < 1 || target > self.level {
            return Err(RingError::LevelOutOfRange {
                level: self.level,
                target,
            });
        }
        Ok(self.ring.residue(target, BigInt::from(self.value.clone())))
    }
}

/// Multiplier of the homomorphism `Lambda_n -> Lambda_j` that sends `x` to
/// `pi^(j-n) * lambda * x`. This realizes the isomorphism of `Lambda_n` with
/// `Hom(Lambda_n, Lambda_j)`; the image consists of the l^(j-n)-multiples.
pub fn cyclic_embed(lambda: &Residue, target: u32) -> Result<Residue, RingError> {
    let n = lambda.level();
    if target < n {
        return Err(RingError::EmbedBelowSource {
            from_level: n,
            target,
        });
    }
    let shift = lambda.ring().modulus(target - n);
    Ok(lambda
        .ring()
        .residue(target, BigInt::from(&shift * lambda.value())))
}

/// An element of Z_l known modulo l^precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approx {
    ring: LocalRing,
    precision: u32,
    value: BigUint,
}

impl Approx {
    pub fn ring(&self) -> LocalRing {
        self.ring
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    fn join(&self, other: &Approx) -> Result<(LocalRing, u32), RingError> {
        if self.ring.prime != other.ring.prime {
            return Err(RingError::PrimeMismatch(self.ring.prime, other.ring.prime));
        }
        Ok((self.ring, self.precision.min(other.precision)))
    }

    pub fn add(&self, other: &Approx) -> Result<Approx, RingError> {
        let (ring, prec) = self.join(other)?;
        Ok(ring.approx(prec, BigInt::from(&self.value + &other.value)))
    }

    pub fn mul(&self, other: &Approx) -> Result<Approx, RingError> {
        let (ring, prec) = self.join(other)?;
        Ok(ring.approx(prec, BigInt::from(&self.value * &other.value)))
    }

    pub fn neg(&self) -> Approx {
        self.ring
            .approx(self.precision, -BigInt::from(self.value.clone()))
    }

    /// min(v_l(value), N) with `exact = false` iff the representative is zero.
    pub fn valuation(&self) -> Valuation {
        self.ring
            .valuation_capped(&BigInt::from(self.value.clone()), self.precision)
    }

    /// Exact division by l^shift: requires valuation >= shift and lowers the
    /// precision by shift.
    pub fn divide_exact(&self, shift: u32) -> Result<Approx, RingError> {
        if shift == 0 {
            return Ok(self.clone());
        }
        if shift >= self.precision {
            return Err(RingError::PrecisionUnderflow {
                have: self.precision,
                lost: shift,
            });
        }
        let v = self.valuation();
        if v.exact && v.value < shift {
            return Err(RingError::InexactDivision { shift });
        }
        let q = &self.value / self.ring.modulus(shift);
        Ok(self.ring.approx(self.precision - shift, BigInt::from(q)))
    }

    pub fn to_residue(&self, level: u32) -> Result<Residue, RingError> {
        if level < 1 || level > self.precision {
            return Err(RingError::LevelOutOfRange {
                level: self.precision,
                target: level,
            });
        }
        Ok(self.ring.residue(level, BigInt::from(self.value.clone())))
    }
}

/// Deterministic Miller-Rabin for u64 inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let nb = BigUint::from(n);
    let one = BigUint::one();
    let minus_one = BigUint::from(n - 1);
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&BigUint::from(d), &nb);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = (&x * &x) % &nb;
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(l: u64) -> LocalRing {
        LocalRing::new(l).unwrap()
    }

    #[test]
    fn primality_gate() {
        assert!(LocalRing::new(2).is_ok());
        assert!(LocalRing::new(3).is_ok());
        assert!(LocalRing::new(5).is_ok());
        assert!(LocalRing::new(97).is_ok());
        assert_eq!(LocalRing::new(1), Err(RingError::NotPrime(1)));
        assert_eq!(LocalRing::new(4), Err(RingError::NotPrime(4)));
        assert_eq!(LocalRing::new(91), Err(RingError::NotPrime(91)));
    }

    #[test]
    fn arithmetic_examples() {
        let r3 = ring(3);
        let a = r3.residue(2, 7);
        let b = r3.residue(2, 5);
        assert_eq!(a.add(&b).unwrap(), r3.residue(2, 3));
        assert_eq!(a.mul(&b).unwrap(), r3.residue(2, 8));
        let r2 = ring(2);
        assert_eq!(r2.residue(3, 3).neg(), r2.residue(3, 5));
    }

    #[test]
    fn mismatches_are_structural_errors() {
        let a = ring(3).residue(2, 1);
        let b = ring(5).residue(2, 1);
        assert_eq!(a.add(&b), Err(RingError::PrimeMismatch(3, 5)));
        let c = ring(3).residue(3, 1);
        assert_eq!(a.add(&c), Err(RingError::LevelMismatch(2, 3)));
    }

    #[test]
    fn valuation_examples() {
        let r3 = ring(3);
        assert_eq!(
            r3.residue(3, 6).valuation(),
            Valuation {
                value: 1,
                exact: true
            }
        );
        assert_eq!(
            r3.residue(3, 0).valuation(),
            Valuation {
                value: 3,
                exact: false
            }
        );
        let r2 = ring(2);
        assert_eq!(
            r2.residue(4, 12).valuation(),
            Valuation {
                value: 2,
                exact: true
            }
        );
    }

    #[test]
    fn invert_examples() {
        let r3 = ring(3);
        // brute-force oracle: the unique y in 0..9 with 2y = 1 mod 9
        let mut expect = None;
        for y in 0u32..9 {
            if (2 * y) % 9 == 1 {
                expect = Some(y);
            }
        }
        assert_eq!(expect, Some(5));
        assert_eq!(r3.residue(2, 2).invert().unwrap(), r3.residue(2, 5));
        let r5 = ring(5);
        assert_eq!(r5.residue(1, 1).invert().unwrap(), r5.residue(1, 1));
        assert_eq!(
            r3.residue(2, 3).invert(),
            Err(RingError::NotAUnit {
                level: 2,
                valuation: 1
            })
        );
    }

    #[test]
    fn reduce_examples() {
        let r3 = ring(3);
        assert_eq!(r3.residue(2, 7).reduce(1).unwrap(), r3.residue(1, 1));
        assert_eq!(r3.residue(2, 7).reduce(2).unwrap(), r3.residue(2, 7));
        let r2 = ring(2);
        assert_eq!(r2.residue(3, 6).reduce(2).unwrap(), r2.residue(2, 2));
        assert!(r2.residue(3, 6).reduce(4).is_err());
        assert!(r2.residue(3, 6).reduce(0).is_err());
    }

    #[test]
    fn cyclic_embed_examples() {
        let r3 = ring(3);
        assert_eq!(cyclic_embed(&r3.one(1), 2).unwrap(), r3.residue(2, 3));
        assert_eq!(cyclic_embed(&r3.one(2), 2).unwrap(), r3.residue(2, 1));
        let r2 = ring(2);
        assert_eq!(cyclic_embed(&r2.one(1), 3).unwrap(), r2.residue(3, 4));
        assert!(cyclic_embed(&r2.one(3), 2).is_err());
    }

    #[test]
    fn cyclic_embed_is_injective_with_cyclic_image() {
        // image of Lambda_n in Lambda_j has exactly l^n elements
        for (l, n, j) in [(2u64, 2u32, 4u32), (3, 1, 3), (5, 2, 3)] {
            let r = ring(l);
            let mut seen = std::collections::HashSet::new();
            let count = l.pow(n);
            for x in 0..count {
                let e = cyclic_embed(&r.residue(n, x as i64), j).unwrap();
                assert!(seen.insert(e.value().clone()));
                // image is an l^(j-n)-multiple
                assert!(e.is_zero() || e.valuation().value >= j - n);
            }
            assert_eq!(seen.len() as u64, count);
        }
    }

    #[test]
    fn approx_precision_contract() {
        let r3 = ring(3);
        let a = r3.approx(4, 27 + 2);
        let b = r3.approx(2, 1);
        assert_eq!(a.add(&b).unwrap().precision(), 2);
        assert_eq!(a.mul(&b).unwrap().precision(), 2);
        // division by l^k lowers precision and requires valuation
        let c = r3.approx(4, 18);
        let d = c.divide_exact(1).unwrap();
        assert_eq!(d.precision(), 3);
        assert_eq!(d.value(), &BigUint::from(6u32));
        assert_eq!(
            r3.approx(4, 1).divide_exact(1),
            Err(RingError::InexactDivision { shift: 1 })
        );
        assert_eq!(
            r3.approx(2, 0).divide_exact(2),
            Err(RingError::PrecisionUnderflow { have: 2, lost: 2 })
        );
        // zero representative: valuation is only a floor
        assert_eq!(
            r3.approx(3, 0).valuation(),
            Valuation {
                value: 3,
                exact: false
            }
        );
    }

    proptest! {
        #[test]
        fn ring_axioms(l in prop::sample::select(vec![2u64, 3, 5]),
                       n in 1u32..=6,
                       a in 0u64..100_000,
                       b in 0u64..100_000,
                       c in 0u64..100_000) {
            let r = ring(l);
            let (x, y, z) = (r.residue(n, a as i64), r.residue(n, b as i64), r.residue(n, c as i64));
            // canonical form closure
            prop_assert!(x.add(&y).unwrap().value() < &r.modulus(n));
            prop_assert!(x.mul(&y).unwrap().value() < &r.modulus(n));
            // commutativity, associativity, distributivity
            prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
            prop_assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
            // additive inverse
            prop_assert!(x.add(&x.neg()).unwrap().is_zero());
        }

        #[test]
        fn reduce_is_functorial(l in prop::sample::select(vec![2u64, 3, 5]),
                                n in 1u32..=6,
                                a in 0u64..1_000_000) {
            let r = ring(l);
            let x = r.residue(n, a as i64);
            for m in 1..=n {
                for k in 1..=m {
                    prop_assert_eq!(
                        x.reduce(m).unwrap().reduce(k).unwrap(),
                        x.reduce(k).unwrap()
                    );
                }
            }
        }

        #[test]
        fn invert_roundtrip(l in prop::sample::select(vec![2u64, 3, 5]),
                            n in 1u32..=6,
                            a in 0u64..100_000) {
            let r = ring(l);
            let x = r.residue(n, a as i64);
            if x.is_unit() {
                let y = x.invert().unwrap();
                prop_assert_eq!(x.mul(&y).unwrap(), r.one(n));
                prop_assert_eq!(y.invert().unwrap(), x);
            }
        }
    }
}
