//! Exact arithmetic in the Eisenstein integers Z[w], w^2 + w + 1 = 0.
//!
//! Elements are stored in the basis {1, w}, so multiplying by a power of w
//! only permutes and negates the two components. All series coefficients in
//! the crate live here; nothing is ever rounded.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `a + b*w` with `w` a primitive cube root of unity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Eisenstein {
    pub a: BigInt,
    pub b: BigInt,
}

impl Eisenstein {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Eisenstein {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        Eisenstein {
            a: a.into(),
            b: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The primitive cube root of unity itself.
    pub fn omega() -> Self {
        Self::new(0, 1)
    }

    /// `w^n` for any integer `n`; the result only depends on `n mod 3`.
    pub fn omega_pow(n: i64) -> Self {
        match n.rem_euclid(3) {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            _ => Self::new(-1, -1),
        }
    }

    /// `w - w^2 = 1 + 2w`, the square root of -3 that every twisted
    /// combination is divided by.
    pub fn sqrt_minus_three() -> Self {
        Self::new(1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True iff the element lies in Z, i.e. `b == 0`.
    pub fn is_rational_integer(&self) -> bool {
        self.b.is_zero()
    }

    /// `N(a + bw) = a^2 - ab + b^2`, the product with the conjugate.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Image under the automorphism `w -> w^2`: `a + b w^2 = (a - b) - b w`.
    pub fn conj(&self) -> Self {
        Eisenstein {
            a: &self.a - &self.b,
            b: -&self.b,
        }
    }

    /// Multiply by `w^n` without a general multiplication.
    pub fn mul_omega_pow(&self, n: i64) -> Self {
        match n.rem_euclid(3) {
            0 => self.clone(),
            // (a + bw) w = aw + b w^2 = -b + (a - b) w
            1 => Eisenstein {
                a: -&self.b,
                b: &self.a - &self.b,
            },
            // (a + bw) w^2 = a w^2 + b = (b - a) - a w
            _ => Eisenstein {
                a: &self.b - &self.a,
                b: -&self.a,
            },
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Eisenstein {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    /// Exact quotient `self / v`.
    ///
    /// Computed as `self * conj(v) / N(v)` with a divisibility check on both
    /// components, so no rational intermediates appear.
    pub fn div_exact(&self, v: &Eisenstein) -> Result<Eisenstein> {
        let n = v.norm();
        if n.is_zero() {
            return Err(Error::InvalidArgument("division by zero in Z[w]".into()));
        }
        let t = self * &v.conj();
        let (qa, ra) = t.a.div_rem(&n);
        let (qb, rb) = t.b.div_rem(&n);
        if !ra.is_zero() || !rb.is_zero() {
            return Err(Error::NotDivisible {
                numerator: self.to_string(),
                divisor: v.to_string(),
            });
        }
        Ok(Eisenstein { a: qa, b: qb })
    }

    /// Inverse of a unit (`N = 1`), which is just its conjugate.
    pub fn unit_inverse(&self) -> Option<Eisenstein> {
        if self.is_unit() {
            Some(self.conj())
        } else {
            None
        }
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        use num_traits::ToPrimitive;
        Some((self.a.to_i64()?, self.b.to_i64()?))
    }
}

impl From<i64> for Eisenstein {
    fn from(v: i64) -> Self {
        Eisenstein::from_int(v)
    }
}

impl From<BigInt> for Eisenstein {
    fn from(v: BigInt) -> Self {
        Eisenstein::from_int(v)
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}w", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}{}w", self.a, self.b)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}

impl<'a> Add<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    fn add(self, rhs: &'a Eisenstein) -> Eisenstein {
        Eisenstein {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Add for Eisenstein {
    type Output = Eisenstein;
    fn add(self, rhs: Eisenstein) -> Eisenstein {
        Eisenstein {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl<'a> AddAssign<&'a Eisenstein> for Eisenstein {
    fn add_assign(&mut self, rhs: &'a Eisenstein) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl<'a> Sub<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    fn sub(self, rhs: &'a Eisenstein) -> Eisenstein {
        Eisenstein {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Sub for Eisenstein {
    type Output = Eisenstein;
    fn sub(self, rhs: Eisenstein) -> Eisenstein {
        Eisenstein {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl<'a> SubAssign<&'a Eisenstein> for Eisenstein {
    fn sub_assign(&mut self, rhs: &'a Eisenstein) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl<'a> Mul<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    // (a + bw)(c + dw) = ac + (ad + bc) w + bd w^2 = (ac - bd) + (ad + bc - bd) w
    fn mul(self, rhs: &'a Eisenstein) -> Eisenstein {
        let bd = &self.b * &rhs.b;
        Eisenstein {
            a: &self.a * &rhs.a - &bd,
            b: &self.a * &rhs.b + &self.b * &rhs.a - bd,
        }
    }
}

impl Mul for Eisenstein {
    type Output = Eisenstein;
    fn mul(self, rhs: Eisenstein) -> Eisenstein {
        &self * &rhs
    }
}

impl<'a> MulAssign<&'a Eisenstein> for Eisenstein {
    fn mul_assign(&mut self, rhs: &'a Eisenstein) {
        *self = &*self * rhs;
    }
}

impl Neg for Eisenstein {
    type Output = Eisenstein;
    fn neg(self) -> Eisenstein {
        Eisenstein { a: -self.a, b: -self.b }
    }
}

impl Neg for &Eisenstein {
    type Output = Eisenstein;
    fn neg(self) -> Eisenstein {
        Eisenstein {
            a: -&self.a,
            b: -&self.b,
        }
    }
}
