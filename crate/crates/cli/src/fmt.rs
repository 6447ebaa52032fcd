//! Exact-value formatting for reports: rationals as "num/den" strings,
//! extension elements as coefficient arrays, plus rational parsing for
//! flags.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use padicl_core::exact::ext::Ext;
use padicl_core::exact::Q;

pub fn q_to_value(x: &Q) -> Value {
    if x.denom().is_one() {
        Value::String(x.numer().to_string())
    } else {
        Value::String(format!("{}/{}", x.numer(), x.denom()))
    }
}

pub fn nf_to_value(x: &Ext<Q>) -> Value {
    let coeffs: Vec<Value> = x.coeffs().iter().map(q_to_value).collect();
    json!({ "coeffs": coeffs })
}

pub fn tower_to_value(x: &Ext<Ext<Q>>) -> Value {
    let coeffs: Vec<Value> = x.coeffs().iter().map(nf_to_value).collect();
    json!({ "coeffs": coeffs })
}

/// Parse "a", "-a", or "a/b" into an exact rational.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.trim().parse::<BigInt>().map_err(|e| format!("bad integer {t:?}: {e}"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den == BigInt::from(0) {
                return Err("zero denominator".into());
            }
            Ok(Q::new(parse_int(n)?, den))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

pub fn check(name: &str, ok: bool) -> Value {
    json!({ "name": name, "ok": ok })
}
