//! Exact complex rationals: the ground field for the whole pipeline.
//!
//! A [`Scalar`] is `re + im*i` with both parts arbitrary-precision rationals.
//! Every operation is exact; there is no floating point anywhere. Rationals
//! stay reduced with positive denominators (guaranteed by `num-rational`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    /// Real rational `num/den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// Full Gaussian rational `rn/rd + (in/id)*i`. Panics on zero denominators.
    pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Scalar::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`, an exact nonnegative rational; zero iff the scalar is zero.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// Exact division. Panics if the divisor is zero; callers certify first.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("scalar division by zero");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_part = |f: &mut fmt::Formatter<'_>, im: &BigRational| {
            if im.is_one() {
                write!(f, "i")
            } else if (-im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}i", im)
            }
        };
        if self.re.is_zero() {
            return im_part(f, &self.im);
        }
        write!(f, "{}", self.re)?;
        if self.im.is_positive() {
            write!(f, "+")?;
        }
        im_part(f, &self.im)
    }
}

// JSON form: {re_num, re_den, im_num, im_den}. Components are emitted as JSON
// integers when they fit in i64 and as decimal strings otherwise, so exactness
// survives arbitrary growth. Input accepts either form; im parts default to 0.

fn serialize_component<S: Serializer>(
    st: &mut S::SerializeStruct,
    name: &'static str,
    v: &BigInt,
) -> std::result::Result<(), S::Error>
where
    S::SerializeStruct: SerializeStruct,
{
    match i64::try_from(v) {
        Ok(small) => st.serialize_field(name, &small),
        Err(_) => st.serialize_field(name, &v.to_string()),
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Scalar", 4)?;
        serialize_component::<S>(&mut st, "re_num", self.re.numer())?;
        serialize_component::<S>(&mut st, "re_den", self.re.denom())?;
        serialize_component::<S>(&mut st, "im_num", self.im.numer())?;
        serialize_component::<S>(&mut st, "im_den", self.im.denom())?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Small(i64),
    Big(String),
}

impl RawInt {
    fn into_bigint<E: de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            RawInt::Small(v) => Ok(BigInt::from(v)),
            RawInt::Big(s) => s
                .parse::<BigInt>()
                .map_err(|_| E::custom(format!("not a decimal integer: {s:?}"))),
        }
    }
}

fn raw_zero() -> RawInt {
    RawInt::Small(0)
}

fn raw_one() -> RawInt {
    RawInt::Small(1)
}

#[derive(Deserialize)]
struct RawScalar {
    re_num: RawInt,
    #[serde(default = "raw_one")]
    re_den: RawInt,
    #[serde(default = "raw_zero")]
    im_num: RawInt,
    #[serde(default = "raw_one")]
    im_den: RawInt,
}

/// Input forms: a bare integer is accepted as shorthand for a real integer
/// scalar; the full object form spells out numerators and denominators.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalarInput {
    Int(i64),
    Full(RawScalar),
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = match RawScalarInput::deserialize(deserializer)? {
            RawScalarInput::Int(v) => return Ok(Scalar::from_int(v)),
            RawScalarInput::Full(raw) => raw,
        };
        let re_num = raw.re_num.into_bigint()?;
        let re_den = raw.re_den.into_bigint()?;
        let im_num = raw.im_num.into_bigint()?;
        let im_den = raw.im_den.into_bigint()?;
        if re_den.is_zero() || im_den.is_zero() {
            return Err(de::Error::custom("zero denominator in scalar"));
        }
        Ok(Scalar::new(
            BigRational::new(re_num, re_den),
            BigRational::new(im_num, im_den),
        ))
    }
}
