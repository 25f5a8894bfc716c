use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::LinalgError;

/// Exact scalar. In prime-field mode values are canonical residues in `[0, p)`.
pub type Scalar = num_rational::BigRational;

/// The coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Rationals
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "rational"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" | "rationals" | "q" | "Q" => Ok(FieldSpec::Rationals),
            _ => {
                let digits = s
                    .strip_prefix("fp:")
                    .ok_or_else(|| LinalgError::Dimension(format!("unknown field {s:?}")))?;
                let p: u64 = digits
                    .parse()
                    .map_err(|_| LinalgError::Dimension(format!("unknown field {s:?}")))?;
                FieldSpec::prime_field(p)
            }
        }
    }
}

impl FieldSpec {
    /// Prime field with validated characteristic.
    pub fn prime_field(p: u64) -> Result<Self, LinalgError> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::from_integer(BigInt::from(v)),
            FieldSpec::PrimeField(p) => {
                Scalar::from_integer(BigInt::from(v).mod_floor(&BigInt::from(*p)))
            }
        }
    }

    /// Canonical representative of `x` in this field.
    pub fn reduce(&self, x: &Scalar) -> Result<Scalar, LinalgError> {
        match self {
            FieldSpec::Rationals => Ok(x.clone()),
            FieldSpec::PrimeField(p) => Ok(Scalar::from_integer(BigInt::from(to_residue(x, *p)?))),
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        x.is_zero()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.canon(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.canon(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.canon(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.canon(-a)
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            FieldSpec::Rationals => Some(a.recip()),
            FieldSpec::PrimeField(p) => {
                let r = to_residue(a, *p).ok()?;
                Some(Scalar::from_integer(BigInt::from(inv_mod(r, *p))))
            }
        }
    }

    // Inputs are already canonical residues, so only integer reduction is needed.
    fn canon(&self, x: Scalar) -> Scalar {
        match self {
            FieldSpec::Rationals => x,
            FieldSpec::PrimeField(p) => {
                debug_assert!(x.is_integer());
                Scalar::from_integer(x.to_integer().mod_floor(&BigInt::from(*p)))
            }
        }
    }
}

/// Residue of a rational modulo `p`; errors when `p` divides the denominator.
pub(crate) fn to_residue(x: &Scalar, p: u64) -> Result<u64, LinalgError> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("residue fits");
    let den = x.denom().mod_floor(&pb).to_u64().expect("residue fits");
    if den == 0 {
        return Err(LinalgError::NotReducible {
            value: x.to_string(),
            p,
        });
    }
    Ok(mul_mod(num, inv_mod(den, p), p))
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sign of a scalar as -1, 0, 1.
pub fn signum(x: &Scalar) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(1_048_583));
        assert!(!is_prime(1_048_581));
        assert!(!is_prime(1));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert_eq!(FieldSpec::prime_field(4), Err(LinalgError::NotPrime(4)));
    }

    #[test]
    fn residues() {
        let f = FieldSpec::prime_field(7).unwrap();
        let half = Scalar::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(f.reduce(&half).unwrap(), Scalar::from_integer(BigInt::from(4)));
        let seventh = Scalar::new(BigInt::from(1), BigInt::from(7));
        assert!(matches!(
            f.reduce(&seventh),
            Err(LinalgError::NotReducible { p: 7, .. })
        ));
        assert_eq!(f.from_i64(-1), Scalar::from_integer(BigInt::from(6)));
        let three = f.from_i64(3);
        assert_eq!(f.mul(&three, &f.inv(&three).unwrap()), f.one());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["rational", "fp:1048583"] {
            let f: FieldSpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("fp:10".parse::<FieldSpec>().is_err());
        assert!("reals".parse::<FieldSpec>().is_err());
    }
}
