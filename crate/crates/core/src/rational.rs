//! Exact rational helpers shared by the lattice, solver and catalog layers.
//!
//! Every intersection number in the engine is a [`Rational`]. Table entries
//! are printed in three notations (`47`, `11/3`, `2.75`); [`Notation`]
//! remembers which one a printed value used so that regenerated tables are
//! byte-identical to the originals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// `n / d` in lowest terms. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_exact(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Least common multiple of the denominators of `xs`.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty numeric field")]
    Empty,
    #[error("malformed number {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// How a printed value was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Notation {
    Integer,
    Fraction,
    /// Decimal with the given number of fractional digits.
    Decimal(usize),
}

/// A printed table value: its exact value and the notation it was written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Printed {
    pub value: Rational,
    pub notation: Notation,
}

impl Printed {
    pub fn parse(text: &str) -> Result<Self, ParseRationalError> {
        let (value, notation) = parse_with_notation(text)?;
        Ok(Printed { value, notation })
    }

    pub fn render(&self) -> String {
        render(&self.value, self.notation)
    }
}

impl fmt::Display for Printed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    parse_with_notation(text).map(|(v, _)| v)
}

fn parse_int(text: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    text.parse::<BigInt>().map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

fn parse_with_notation(raw: &str) -> Result<(Rational, Notation), ParseRationalError> {
    let text = raw.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_int(n, text)?;
        if d.starts_with(['-', '+']) {
            return Err(ParseRationalError::Malformed(text.to_string()));
        }
        let d = parse_int(d, text)?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok((Rational::new(n, d), Notation::Fraction));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Malformed(text.to_string()));
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.strip_prefix(['-', '+']).unwrap_or(whole);
        if whole_digits.is_empty() || !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Malformed(text.to_string()));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag: BigInt =
            format!("{whole_digits}{frac}").parse().map_err(|_| ParseRationalError::Malformed(text.to_string()))?;
        let value = Rational::new(if negative { -mag } else { mag }, scale);
        return Ok((value, Notation::Decimal(frac.len())));
    }
    Ok((Rational::from_integer(parse_int(text, text)?), Notation::Integer))
}

/// Renders `x` in the requested notation, falling back to `p/q` when the
/// notation cannot represent it exactly.
pub fn render(x: &Rational, notation: Notation) -> String {
    match notation {
        Notation::Integer if x.is_integer() => x.numer().to_string(),
        Notation::Decimal(places) => render_decimal(x, places).unwrap_or_else(|| fraction(x)),
        _ => fraction(x),
    }
}

fn fraction(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Fixed-point rendering with at least `places` digits; extends the digit
/// count when the value needs more and gives up on non-terminating values.
fn render_decimal(x: &Rational, places: usize) -> Option<String> {
    let mut places = places;
    let ten = BigInt::from(10u32);
    loop {
        let scaled = x * Rational::from_integer(ten.pow(places as u32));
        if scaled.is_integer() {
            let mag = scaled.numer().abs().to_string();
            let padded = format!("{mag:0>width$}", width = places + 1);
            let (w, f) = padded.split_at(padded.len() - places);
            let sign = if x.is_negative() { "-" } else { "" };
            return Some(if places == 0 { format!("{sign}{w}") } else { format!("{sign}{w}.{f}") });
        }
        places += 1;
        if places > 40 {
            return None;
        }
    }
}

/// Plain `p/q` (or `p`) rendering, used for JSON output and diagnostics.
pub fn show(x: &Rational) -> String {
    fraction(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_printed_notations() {
        assert_eq!(parse_rational("11/3").unwrap(), ratio(11, 3));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
        assert_eq!(parse_rational("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("17/2").unwrap(), ratio(17, 2));
        assert_eq!(parse_rational("47").unwrap(), int(47));
        assert_eq!(parse_rational("7/3").unwrap(), ratio(7, 3));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(ParseRationalError::Empty));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        for bad in ["abc", "1.", ".5", "1/-2", "--1", "1/2/3", "0x10", "1e3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn render_keeps_notation() {
        for text in ["2.5", "-0.5", "0.75", "-0.25", "11/3", "-2/3", "17/2", "1383", "-1"] {
            assert_eq!(Printed::parse(text).unwrap().render(), text);
        }
        assert_eq!(render(&ratio(7, 3), Notation::Decimal(1)), "7/3");
        assert_eq!(render(&ratio(3, 8), Notation::Decimal(1)), "0.375");
        assert_eq!(render(&ratio(5, 2), Notation::Integer), "5/2");
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(sqrt_exact(&int(0)), Some(int(0)));
        assert_eq!(sqrt_exact(&int(2)), None);
        assert_eq!(sqrt_exact(&int(-4)), None);
    }
}
