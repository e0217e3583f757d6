//! Serializers for exact numbers: big integers and rationals as decimal strings.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serializer;

pub fn biguint<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn ratio<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}
