//! Scalar abstraction shared by the matrix kernel and the holonomy builder.
//!
//! Everything downstream of [`Real`] is written once and instantiated at
//! `f32`, `f64` or [`BigReal`]. The wide type exists because long earthquake
//! paths produce generator images whose entries grow like `exp(t/2)` while the
//! traces of curves disjoint from the support stay bounded; in double
//! precision that cancellation destroys every digit.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_traits::{Num, One, Zero};

/// Real field operations needed by the hyperbolic kernel.
pub trait Real:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn cosh(&self) -> Self;
    fn sinh(&self) -> Self;
    fn acosh(&self) -> Self;
    fn abs(&self) -> Self;

    /// Machine epsilon of the representation.
    fn epsilon() -> f64;

    fn two() -> Self {
        Self::from_f64(2.0)
    }

    fn half() -> Self {
        Self::from_f64(0.5)
    }

    /// `ln |self|`, valid far outside the `f64` exponent range.
    fn ln_abs_f64(&self) -> f64 {
        self.abs().ln().to_f64()
    }
}

macro_rules! impl_real_prim {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            #[inline]
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            #[inline]
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            #[inline]
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            #[inline]
            fn cosh(&self) -> Self {
                <$t>::cosh(*self)
            }
            #[inline]
            fn sinh(&self) -> Self {
                <$t>::sinh(*self)
            }
            #[inline]
            fn acosh(&self) -> Self {
                <$t>::acosh(*self)
            }
            #[inline]
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            #[inline]
            fn epsilon() -> f64 {
                <$t>::EPSILON as f64
            }
        }
    };
}

impl_real_prim!(f32);
impl_real_prim!(f64);

const RM: RoundingMode = RoundingMode::ToEven;
const DEFAULT_BITS: usize = 256;

thread_local! {
    static WORKING_BITS: Cell<usize> = const { Cell::new(DEFAULT_BITS) };
    static CONSTS: RefCell<Option<Consts>> = const { RefCell::new(None) };
}

/// Current working precision (in bits) for [`BigReal`] on this thread.
pub fn working_precision() -> usize {
    WORKING_BITS.with(|b| b.get())
}

/// Runs `f` with the thread's [`BigReal`] working precision set to `bits`.
///
/// The previous precision is restored afterwards, also on unwind.
pub fn with_precision<R>(bits: usize, f: impl FnOnce() -> R) -> R {
    struct Restore(usize);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_BITS.with(|b| b.set(self.0));
        }
    }
    let bits = bits.max(64);
    let _restore = Restore(WORKING_BITS.with(|b| b.replace(bits)));
    f()
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| {
        let mut slot = c.borrow_mut();
        let cc = slot.get_or_insert_with(|| Consts::new().expect("constant cache allocation"));
        f(cc)
    })
}

/// Arbitrary-precision real number; arithmetic runs at the thread's working
/// precision (see [`with_precision`]).
#[derive(Clone)]
pub struct BigReal(BigFloat);

impl BigReal {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn bits() -> usize {
        working_precision()
    }
}

impl Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({:e})", self.to_f64())
    }
}

impl Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                BigReal(self.0.$m(&rhs.0, BigReal::bits(), RM))
            }
        }
    };
}

big_binop!(Add, add);
big_binop!(Sub, sub);
big_binop!(Mul, mul);
big_binop!(Div, div);

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        BigReal(self.0.rem(&rhs.0))
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(self.0.neg())
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(BigFloat::from_f64(0.0, BigReal::bits()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(BigFloat::from_f64(1.0, BigReal::bits()))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let v = with_consts(|cc| BigFloat::parse(s, astro_float::Radix::Dec, BigReal::bits(), RM, cc));
        if v.is_nan() {
            Err(format!("cannot parse {s:?}"))
        } else {
            Ok(BigReal(v))
        }
    }
}

impl Real for BigReal {
    fn from_f64(x: f64) -> Self {
        BigReal(BigFloat::from_f64(x, BigReal::bits()))
    }

    fn to_f64(&self) -> f64 {
        let x = &self.0;
        if x.is_nan() {
            return f64::NAN;
        }
        if x.is_inf_pos() {
            return f64::INFINITY;
        }
        if x.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if x.is_zero() {
            return 0.0;
        }
        let (words, _, sign, exponent, _) = x.as_raw_parts().expect("finite value");
        // Normalized mantissa; the top word carries the leading bits.
        let top = *words.last().expect("non-empty mantissa");
        let next = if words.len() > 1 { words[words.len() - 2] } else { 0 };
        let word_bits = (std::mem::size_of_val(&top) * 8) as i32;
        let mant = top as f64 + next as f64 / 2f64.powi(word_bits);
        let e = exponent as i64 - word_bits as i64;
        let mag = scale_pow2(mant, e);
        match sign {
            Sign::Neg => -mag,
            Sign::Pos => mag,
        }
    }

    fn sqrt(&self) -> Self {
        BigReal(self.0.sqrt(BigReal::bits(), RM))
    }

    fn exp(&self) -> Self {
        BigReal(with_consts(|cc| self.0.exp(BigReal::bits(), RM, cc)))
    }

    fn ln(&self) -> Self {
        BigReal(with_consts(|cc| self.0.ln(BigReal::bits(), RM, cc)))
    }

    fn cosh(&self) -> Self {
        BigReal(with_consts(|cc| self.0.cosh(BigReal::bits(), RM, cc)))
    }

    fn sinh(&self) -> Self {
        BigReal(with_consts(|cc| self.0.sinh(BigReal::bits(), RM, cc)))
    }

    fn acosh(&self) -> Self {
        BigReal(with_consts(|cc| self.0.acosh(BigReal::bits(), RM, cc)))
    }

    fn abs(&self) -> Self {
        BigReal(self.0.abs())
    }

    fn epsilon() -> f64 {
        2f64.powi(-(BigReal::bits().min(1000) as i32))
    }

    fn ln_abs_f64(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (words, _, _, exponent, _) = self.0.as_raw_parts().expect("finite value");
        let top = *words.last().expect("non-empty mantissa");
        let word_bits = (std::mem::size_of_val(&top) * 8) as i64;
        let frac = top as f64 / 2f64.powi(word_bits as i32);
        frac.ln() + exponent as f64 * std::f64::consts::LN_2
    }
}

fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_roundtrip_f64() {
        for &x in &[3.5, -1.0e-7, 12345.678, 1.0e200, -2.5e-200] {
            let b = BigReal::from_f64(x);
            assert_eq!(b.to_f64(), x);
        }
    }

    #[test]
    fn big_transcendentals_match_f64() {
        with_precision(300, || {
            let x = BigReal::from_f64(1.5);
            assert!((x.acosh().to_f64() - 1.5f64.acosh()).abs() < 1e-15);
            assert!((x.cosh().to_f64() - 1.5f64.cosh()).abs() < 1e-14);
            assert!((x.ln().to_f64() - 1.5f64.ln()).abs() < 1e-15);
            assert!((x.sqrt().to_f64() - 1.5f64.sqrt()).abs() < 1e-15);
        });
    }

    #[test]
    fn big_survives_cancellation() {
        with_precision(2000, || {
            let big = BigReal::from_f64(600.0).exp();
            let one = BigReal::one();
            let back = (big.clone() + one) - big;
            assert_eq!(back.to_f64(), 1.0);
        });
    }

    #[test]
    fn ln_abs_beyond_f64_range() {
        with_precision(512, || {
            let huge = BigReal::from_f64(3000.0).exp();
            assert!((huge.ln_abs_f64() - 3000.0).abs() < 1e-9);
        });
    }

    #[test]
    fn precision_guard_restores() {
        let before = working_precision();
        with_precision(1024, || assert_eq!(working_precision(), 1024));
        assert_eq!(working_precision(), before);
    }
}
