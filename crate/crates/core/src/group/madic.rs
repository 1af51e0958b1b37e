use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A rational `num / m^exp` in lowest terms with respect to `m`: either
/// `exp == 0` or `m` does not divide `num`. The base `m` is supplied by the
/// caller so the value stays small to hash and compare.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MAdic {
    num: BigInt,
    exp: u32,
}

impl MAdic {
    pub fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    pub fn integer(n: i64) -> Self {
        Self { num: BigInt::from(n), exp: 0 }
    }

    pub fn new(num: BigInt, exp: u32, m: u32) -> Self {
        let mut v = Self { num, exp };
        v.normalize(m);
        v
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self, m: u32) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let base = BigInt::from(m);
        while self.exp > 0 {
            let (q, r) = self.num.div_rem(&base);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.exp -= 1;
        }
    }

    /// `self * m^k` for any integer `k`.
    pub fn scale(&self, m: u32, k: i64) -> Self {
        if k >= 0 {
            let factor = BigInt::from(m).pow(k as u32);
            Self::new(&self.num * factor, self.exp, m)
        } else {
            Self::new(self.num.clone(), self.exp + (-k) as u32, m)
        }
    }

    pub fn add(&self, other: &Self, m: u32) -> Self {
        let exp = self.exp.max(other.exp);
        let base = BigInt::from(m);
        let lhs = &self.num * base.pow(exp - self.exp);
        let rhs = &other.num * base.pow(exp - other.exp);
        Self::new(lhs + rhs, exp, m)
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, exp: self.exp }
    }

    pub fn denominator(&self, m: u32) -> BigInt {
        if self.exp == 0 {
            BigInt::one()
        } else {
            BigInt::from(m).pow(self.exp)
        }
    }

    pub fn display(&self, m: u32) -> MAdicDisplay<'_> {
        MAdicDisplay { value: self, m }
    }
}

pub struct MAdicDisplay<'a> {
    value: &'a MAdic,
    m: u32,
}

impl fmt::Display for MAdicDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.exp == 0 {
            write!(f, "{}", self.value.num)
        } else {
            let sign = if self.value.num.is_negative() { "-" } else { "" };
            write!(
                f,
                "{}{}/{}",
                sign,
                self.value.num.abs(),
                self.value.denominator(self.m)
            )
        }
    }
}
