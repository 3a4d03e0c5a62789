//! Exact scalars: arbitrary-precision rationals with an optional imaginary
//! part (Gaussian rationals, `i*i = -1`). Plain rationals are the `im == 0`
//! case of the same type, so ℚ and ℚ[i] share one code path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Which coefficient field a campaign draws from.
///
/// The scalar type itself always carries an imaginary slot; `Rational` simply
/// never populates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    Rational,
    Gaussian,
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldMode::Rational => write!(f, "rational"),
            FieldMode::Gaussian => write!(f, "gaussian"),
        }
    }
}

impl FromStr for FieldMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "rational" | "q" => Ok(FieldMode::Rational),
            "gaussian" | "qi" => Ok(FieldMode::Gaussian),
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        }
    }
}

/// Exact field element `re + im*i`. Both parts are reduced fractions with a
/// positive denominator; `num_rational` maintains that canonical form after
/// every operation, so equality is plain structural equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    /// `num/den` as a real rational. Panics on a zero denominator; use the
    /// parser for untrusted input.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// `(rn/rd) + (in/id)*i`.
    pub fn gaussian(rn: i64, rd: i64, inum: i64, iden: i64) -> Self {
        assert!(rd != 0 && iden != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(rn), BigInt::from(rd)),
            im: BigRational::new(BigInt::from(inum), BigInt::from(iden)),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
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

    /// True when the imaginary part is zero, i.e. the value lies in ℚ.
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar { re: self.re.recip(), im: BigRational::zero() });
        }
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Scalar { re: &self.re / &norm, im: -(&self.im / &norm) })
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

// Lexicographic (re, im) order: used only for deterministic deduplication,
// not for any analytic meaning.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // Pure-rational products dominate every sweep; skip the Gaussian
        // cross terms when both imaginary parts are zero.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar { re: &self.re * &rhs.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)] // division is multiplication by the inverse
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
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
        Scalar { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p`, `p/q`, or `re+im*i` / `re-im*i` with each part
/// in lowest terms. Examples: `3`, `-1/2`, `0+1*i`, `1/2-3/4*i`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        let re = format_rational(&self.re);
        if self.im.is_negative() {
            write!(f, "{}-{}*i", re, format_rational(&(-self.im.clone())))
        } else {
            write!(f, "{}+{}*i", re, format_rational(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
    let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(num, den))
}

/// Accepts `p`, `p/q`, `re+im*i`, `re-im*i`, and a bare `im*i`. Signs are
/// only legal at the front of each part, so the split point between the real
/// and imaginary parts is the last interior `+`/`-`.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(head) = s.strip_suffix("*i") else {
            return Ok(Scalar { re: parse_rational(s)?, im: BigRational::zero() });
        };
        let split = head
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(idx, _)| idx)
            .last();
        match split {
            Some(idx) => {
                let re = parse_rational(&head[..idx])?;
                let sign = &head[idx..idx + 1];
                let mut im = parse_rational(&head[idx + 1..])?;
                if sign == "-" {
                    im = -im;
                }
                Ok(Scalar { re, im })
            }
            None => Ok(Scalar { re: BigRational::zero(), im: parse_rational(head)? }),
        }
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_automatic() {
        assert_eq!(Scalar::ratio(2, 4), Scalar::ratio(1, 2));
        assert_eq!(Scalar::ratio(1, -2), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::ratio(0, 7), Scalar::zero());
        assert_eq!(Scalar::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Scalar::ratio(1, -2).to_string(), "-1/2");
    }

    #[test]
    fn gaussian_product_squares_i_to_minus_one() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::from_int(-1));
        let z = Scalar::gaussian(1, 2, -3, 4);
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, Scalar::one());
    }

    #[test]
    fn display_round_trips() {
        for s in [
            Scalar::from_int(0),
            Scalar::from_int(-7),
            Scalar::ratio(22, 7),
            Scalar::gaussian(0, 1, 1, 1),
            Scalar::gaussian(1, 2, -3, 4),
            Scalar::gaussian(-1, 3, 0, 1),
        ] {
            let text = s.to_string();
            let back: Scalar = text.parse().unwrap();
            assert_eq!(back, s, "round trip of `{text}`");
        }
    }

    #[test]
    fn parser_accepts_plain_and_gaussian_forms() {
        assert_eq!("3".parse::<Scalar>().unwrap(), Scalar::from_int(3));
        assert_eq!("-4/6".parse::<Scalar>().unwrap(), Scalar::ratio(-2, 3));
        assert_eq!("0+1*i".parse::<Scalar>().unwrap(), Scalar::i());
        assert_eq!("1/2-3/4*i".parse::<Scalar>().unwrap(), Scalar::gaussian(1, 2, -3, 4));
        assert_eq!("-1/2-3*i".parse::<Scalar>().unwrap(), Scalar::gaussian(-1, 2, -3, 1));
        assert_eq!("2*i".parse::<Scalar>().unwrap(), Scalar::gaussian(0, 1, 2, 1));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_ops_agree_with_hand_values() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::ratio(1, 3);
        assert_eq!(&a + &b, Scalar::ratio(5, 6));
        assert_eq!(&a - &b, Scalar::ratio(1, 6));
        assert_eq!(&a * &b, Scalar::ratio(1, 6));
        assert_eq!(&a / &b, Scalar::ratio(3, 2));
        let z = Scalar::gaussian(1, 1, 2, 1); // 1+2i
        let w = Scalar::gaussian(3, 1, -1, 1); // 3-i
        assert_eq!(&z * &w, Scalar::gaussian(5, 1, 5, 1));
    }
}
