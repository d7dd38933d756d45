use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use super::AbelianError;

/// Integer scalar the abelian engine is generic over.
///
/// Implemented for the primitive signed integers (with every operation
/// overflow-checked) and for [`num_bigint::BigInt`], where the checks never
/// trip.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Signed
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + CheckedDiv
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + Eq
        + Ord
        + Hash
        + Signed
        + Integer
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + CheckedDiv
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

pub(crate) fn add<T: Scalar>(a: &T, b: &T) -> Result<T, AbelianError> {
    a.checked_add(b).ok_or(AbelianError::Overflow)
}

pub(crate) fn sub<T: Scalar>(a: &T, b: &T) -> Result<T, AbelianError> {
    a.checked_sub(b).ok_or(AbelianError::Overflow)
}

pub(crate) fn mul<T: Scalar>(a: &T, b: &T) -> Result<T, AbelianError> {
    a.checked_mul(b).ok_or(AbelianError::Overflow)
}

/// Truncating division; `b` must be nonzero.
pub(crate) fn div<T: Scalar>(a: &T, b: &T) -> Result<T, AbelianError> {
    a.checked_div(b).ok_or(AbelianError::Overflow)
}

pub(crate) fn neg<T: Scalar>(a: &T) -> Result<T, AbelianError> {
    T::zero().checked_sub(a).ok_or(AbelianError::Overflow)
}

/// `a + f * b`, checked.
pub(crate) fn axpy<T: Scalar>(a: &T, f: &T, b: &T) -> Result<T, AbelianError> {
    add(a, &mul(f, b)?)
}

pub(crate) fn from_i64<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("small constant fits every scalar type")
}

/// Canonical residue of `a` modulo `m`: in `0..m` for `m > 0`, unchanged for `m == 0`.
pub fn reduce_mod<T: Scalar>(a: &T, m: &T) -> T {
    if m.is_zero() {
        a.clone()
    } else {
        a.mod_floor(m)
    }
}

/// `a` is a unit modulo `m` (for `m == 0`: `a` is `±1`).
pub fn is_unit_mod<T: Scalar>(a: &T, m: &T) -> bool {
    if m.is_zero() {
        a.abs().is_one()
    } else {
        a.gcd(m).is_one()
    }
}

/// Inverse of a unit modulo `m`, as a canonical residue. For `m == 0` the
/// unit `±1` is its own inverse.
pub fn inverse_mod<T: Scalar>(a: &T, m: &T) -> Option<T> {
    if m.is_zero() {
        return a.abs().is_one().then(|| a.clone());
    }
    let ext = a.mod_floor(m).extended_gcd(m);
    ext.gcd.is_one().then(|| ext.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn checked_ops_trip_on_primitive_overflow() {
        assert_eq!(mul(&i64::MAX, &2), Err(AbelianError::Overflow));
        assert_eq!(add(&i64::MAX, &1), Err(AbelianError::Overflow));
        assert_eq!(neg(&i64::MIN), Err(AbelianError::Overflow));
        let big = BigInt::from(i64::MAX);
        assert!(mul(&big, &big).is_ok());
    }

    #[test]
    fn residues_and_units() {
        assert_eq!(reduce_mod(&-7i64, &5), 3);
        assert_eq!(reduce_mod(&-7i64, &0), -7);
        assert!(is_unit_mod(&2i64, &5));
        assert!(!is_unit_mod(&2i64, &4));
        assert!(is_unit_mod(&-1i64, &0));
        assert!(!is_unit_mod(&2i64, &0));
        assert_eq!(inverse_mod(&2i64, &5), Some(3));
        assert_eq!(inverse_mod(&2i64, &4), None);
        assert_eq!(inverse_mod(&-1i64, &0), Some(-1));
    }
}
