//! Scalars for bound evaluation: `f64`, `f32`, and a binary
//! floating-point type with configurable precision.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{Num, One, Zero};

pub const DEFAULT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arithmetic plus the transcendental functions the bounds need.
///
/// `Ctx` carries whatever a value needs at construction time; the
/// precision in bits for `HpReal`, nothing for machine floats.
pub trait Real: Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Neg<Output = Self> {
    type Ctx: Clone + fmt::Debug;

    fn from_u64(v: u64, ctx: &Self::Ctx) -> Self;
    fn log2(&self, ctx: &Self::Ctx) -> Self;
    fn exp2(&self, ctx: &Self::Ctx) -> Self;
    /// Mantissa bits.
    fn precision(ctx: &Self::Ctx) -> usize;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;

    fn from_ratio(n: u64, d: u64, ctx: &Self::Ctx) -> Self {
        Self::from_u64(n, ctx) / Self::from_u64(d, ctx)
    }
}

impl Real for f64 {
    type Ctx = ();

    fn from_u64(v: u64, _: &()) -> Self {
        v as f64
    }
    fn log2(&self, _: &()) -> Self {
        f64::log2(*self)
    }
    fn exp2(&self, _: &()) -> Self {
        f64::exp2(*self)
    }
    fn precision(_: &()) -> usize {
        53
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Real for f32 {
    type Ctx = ();

    fn from_u64(v: u64, _: &()) -> Self {
        v as f32
    }
    fn log2(&self, _: &()) -> Self {
        f32::log2(*self)
    }
    fn exp2(&self, _: &()) -> Self {
        f32::exp2(*self)
    }
    fn precision(_: &()) -> usize {
        24
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn is_finite(&self) -> bool {
        f32::is_finite(*self)
    }
}

/// A `BigFloat` together with its working precision. Binary operations
/// round to the larger precision of the operands.
#[derive(Clone)]
pub struct HpReal {
    v: BigFloat,
    p: usize,
}

impl HpReal {
    pub fn new(v: BigFloat, p: usize) -> Self {
        HpReal { v, p }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.v
    }

    pub fn precision_bits(&self) -> usize {
        self.p
    }

    pub fn parse(s: &str, p: usize) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc));
        (!v.is_nan()).then_some(HpReal { v, p })
    }
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl PartialEq for HpReal {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        self.v.partial_cmp(&o.v)
    }
}

macro_rules! hp_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for HpReal {
            type Output = HpReal;
            fn $f(self, o: HpReal) -> HpReal {
                let p = self.p.max(o.p);
                HpReal {
                    v: self.v.$f(&o.v, p, RM),
                    p,
                }
            }
        }
    };
}

hp_binop!(Add, add);
hp_binop!(Sub, sub);
hp_binop!(Mul, mul);
hp_binop!(Div, div);

impl Rem for HpReal {
    type Output = HpReal;
    fn rem(self, o: HpReal) -> HpReal {
        HpReal {
            v: self.v.rem(&o.v),
            p: self.p.max(o.p),
        }
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal { v: self.v.neg(), p: self.p }
    }
}

impl Zero for HpReal {
    fn zero() -> Self {
        HpReal::from_u64(0, &DEFAULT_PRECISION)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for HpReal {
    fn one() -> Self {
        HpReal::from_u64(1, &DEFAULT_PRECISION)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseHpError;

impl fmt::Display for ParseHpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal number")
    }
}

impl Num for HpReal {
    type FromStrRadixErr = ParseHpError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ParseHpError> {
        if radix != 10 {
            return Err(ParseHpError);
        }
        HpReal::parse(s, DEFAULT_PRECISION).ok_or(ParseHpError)
    }
}

impl Real for HpReal {
    type Ctx = usize;

    fn from_u64(v: u64, p: &usize) -> Self {
        HpReal {
            v: BigFloat::from_u64(v, *p),
            p: *p,
        }
    }

    fn log2(&self, p: &usize) -> Self {
        let v = with_consts(|cc| self.v.log2(*p, RM, cc));
        HpReal { v, p: *p }
    }

    fn exp2(&self, p: &usize) -> Self {
        let two = BigFloat::from_u8(2, *p);
        let v = with_consts(|cc| two.pow(&self.v, *p, RM, cc));
        HpReal { v, p: *p }
    }

    fn precision(p: &usize) -> usize {
        *p
    }

    fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        self.v.to_string().parse().unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hp_basics() {
        let p = 256;
        let a = HpReal::from_u64(3, &p);
        let b = HpReal::from_u64(4, &p);
        assert_eq!((a.clone() + b.clone()).to_f64(), 7.0);
        assert_eq!((b.clone() / a.clone() * a.clone()).to_f64(), 4.0);
        assert_eq!(HpReal::from_u64(1024, &p).log2(&p).to_f64(), 10.0);
        assert_eq!(HpReal::from_u64(5, &p).exp2(&p).to_f64(), 32.0);
        let tiny = (-HpReal::from_u64(100_000, &p)).exp2(&p);
        assert!(tiny > HpReal::zero());
        assert_eq!(tiny.log2(&p).to_f64(), -100_000.0);
        assert_eq!(HpReal::from_str_radix("0.5", 10).unwrap().to_f64(), 0.5);
        assert!(HpReal::from_str_radix("zz", 10).is_err());
        assert!(a < b);
    }

    #[test]
    fn machine_floats() {
        assert_eq!(<f64 as Real>::exp2(&3.0, &()), 8.0);
        assert_eq!(<f32 as Real>::log2(&8.0, &()), 3.0);
        assert_eq!(f64::from_ratio(1, 4, &()), 0.25);
    }
}
