//! Exact rational helpers. Indicator values are kept as [`Ratio`] until they
//! are reported, so algebraically equal routes give identical results.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Ratio = num_rational::BigRational;

pub fn ratio(numer: u64, denom: u64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: u64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with round-half-to-even at `decimals` places.
/// Never prints a negative zero.
pub fn format_half_even(r: &Ratio, decimals: u32) -> String {
    let scale = BigInt::from(10u32).pow(decimals);
    let scaled = r.numer() * &scale;
    let denom = r.denom().clone(); // always positive
    let (mut q, rem) = scaled.div_mod_floor(&denom);
    let twice = rem * 2;
    if twice > denom || (twice == denom && q.is_odd()) {
        q += 1;
    }
    let negative = q.is_negative();
    let digits = q.abs().to_string();
    let width = decimals as usize + 1;
    let digits = format!("{digits:0>width$}");
    let (int_part, frac_part) = digits.split_at(digits.len() - decimals as usize);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// [`format_half_even`] applied to the exact value of a finite float.
pub fn format_f64_half_even(x: f64, decimals: u32) -> Option<String> {
    Ratio::from_float(x).map(|r| format_half_even(&r, decimals))
}

/// Parses plain decimals (`12.07`, `-3`, `.5`, `1e-3`) exactly.
pub fn parse_decimal(s: &str) -> Option<Ratio> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / 10; // trailing 0 keeps the string non-empty
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if shift >= 0 {
        Ratio::from_integer(digits * ten.pow(shift as u32))
    } else {
        Ratio::new(digits, ten.pow((-shift) as u32))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Median; an even count averages the two middle values.
pub fn median(values: &mut [Ratio]) -> Option<Ratio> {
    if values.is_empty() {
        return None;
    }
    values.sort();
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2].clone()
    } else {
        (&values[n / 2 - 1] + &values[n / 2]) / BigInt::from(2)
    })
}

/// Exact sum of `count * numer / denom` terms. Terms are merged by
/// denominator first so the big-rational work scales with the number of
/// distinct denominators, not with the number of terms.
#[derive(Debug, Default, Clone)]
pub struct FractionSum {
    by_denom: std::collections::BTreeMap<u64, u128>,
}

impl FractionSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, numer: u64, denom: u64) {
        debug_assert!(denom > 0);
        *self.by_denom.entry(denom).or_default() += numer as u128;
    }

    pub fn is_empty(&self) -> bool {
        self.by_denom.is_empty()
    }

    pub fn total(&self) -> Ratio {
        let mut acc = Ratio::zero();
        for (&d, &n) in &self.by_denom {
            acc += Ratio::new(BigInt::from(n), BigInt::from(d));
        }
        acc
    }
}
