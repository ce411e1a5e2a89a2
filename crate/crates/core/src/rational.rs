//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders as `numerator/denominator`, always with an explicit denominator.
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `a/b`, plain integers and finite decimals such as `-0.0744`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let mut n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: fall back to a scaled division.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Nearest multiple of `1/denom`, ties away from zero.
pub fn round_to_denominator(x: f64, denom: &BigInt) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let exact = BigRational::from_float(x).unwrap_or_else(Rational::zero);
    let scaled = exact * BigRational::from_integer(denom.clone());
    BigRational::new(scaled.round().to_integer(), denom.clone())
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Number of injective maps from a `k`-set into an `n`-set.
pub fn falling_factorial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64)
}

pub fn abs_max<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .map(|q| q.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_notations() {
        assert_eq!(parse("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse("-4"), Some(int(-4)));
        assert_eq!(parse("-0.0223"), Some(ratio(-223, 10_000)));
        assert_eq!(parse("0.33"), Some(ratio(33, 100)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(parse("."), None);
    }

    #[test]
    fn rounding_respects_denominator() {
        let d = BigInt::from(10_000);
        assert_eq!(round_to_denominator(0.0744, &d), ratio(744, 10_000));
        assert_eq!(round_to_denominator(-0.0223, &d), ratio(-223, 10_000));
        assert_eq!(round_to_denominator(0.3, &BigInt::one()), int(0));
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(falling_factorial(4, 2), 12);
        assert_eq!(falling_factorial(5, 0), 1);
    }
}
