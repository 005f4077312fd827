//! Exact base-b points: per-coordinate digit vectors with digitwise group
//! operations and b-adic norms.
//!
//! A point stores, for each of its `s` coordinates, the first `P` digits of
//! the base-b expansion `x = sum_j d_j b^{-j}`. Counts, norms, and interval
//! membership below are all computed on the digits; nothing here touches
//! floating point, so packing/unpacking a point through its rational value
//! is lossless at the stored precision.
//!
//! The digitwise shift `(x (+) y)_j = x_j + y_j mod b` deliberately carries
//! nothing between positions; together with the norm `b^{-k-1}` (k = leading
//! zeros) it turns each coordinate into the truncated analogue of the
//! fractional Laurent series it came from.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// s-tuple of base-b digit vectors of a common precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    base: u64,
    coords: Vec<Vec<u64>>,
}

impl Point {
    /// Validates digit ranges and equal per-coordinate precision.
    pub fn new(base: u64, coords: Vec<Vec<u64>>) -> Result<Point> {
        if base < 2 {
            return Err(Error::domain(format!("base {base} < 2")));
        }
        if coords.is_empty() {
            return Err(Error::dimension("point needs at least one coordinate"));
        }
        let prec = coords[0].len();
        for (i, c) in coords.iter().enumerate() {
            if c.len() != prec {
                return Err(Error::dimension(format!(
                    "coordinate {} has {} digits, coordinate 0 has {prec}",
                    i + 1,
                    c.len()
                )));
            }
            if let Some(&d) = c.iter().find(|&&d| d >= base) {
                return Err(Error::domain(format!(
                    "digit {d} out of range for base {base}"
                )));
            }
        }
        Ok(Point { base, coords })
    }

    pub fn origin(base: u64, s: usize, prec: usize) -> Point {
        Point { base, coords: vec![vec![0; prec]; s] }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Number of coordinates s.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Stored digits per coordinate.
    pub fn precision(&self) -> usize {
        self.coords[0].len()
    }

    /// Digits `d_1 ... d_P` of coordinate `i` (0-based coordinate).
    pub fn digits(&self, i: usize) -> &[u64] {
        &self.coords[i]
    }

    /// Keeps the first `m` digits of every coordinate, zeroing the rest;
    /// precision is preserved so shifted/truncated points stay composable.
    pub fn truncate(&self, m: usize) -> Point {
        let coords = self
            .coords
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(j, &d)| if j < m { d } else { 0 })
                    .collect()
            })
            .collect();
        Point { base: self.base, coords }
    }

    fn digitwise(&self, other: &Point, op: impl Fn(u64, u64) -> u64) -> Result<Point> {
        if self.base != other.base {
            return Err(Error::domain(format!(
                "base mismatch: {} vs {}",
                self.base, other.base
            )));
        }
        if self.dim() != other.dim() || self.precision() != other.precision() {
            return Err(Error::dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.dim(),
                self.precision(),
                other.dim(),
                other.precision()
            )));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Ok(Point { base: self.base, coords })
    }

    /// Digitwise sum mod b, no carries.
    pub fn dshift(&self, other: &Point) -> Result<Point> {
        let b = self.base;
        self.digitwise(other, |x, y| (x + y) % b)
    }

    /// Digitwise difference mod b.
    pub fn dsub(&self, other: &Point) -> Result<Point> {
        let b = self.base;
        self.digitwise(other, |x, y| (b + x - y) % b)
    }

    /// b-adic norm of one coordinate: `b^{-k-1}` with `k` leading zero
    /// digits; 0 for the all-zero vector.
    pub fn coord_norm(&self, i: usize) -> BigRational {
        match self.coords[i].iter().position(|&d| d != 0) {
            Some(k) => power_norm(self.base, (k + 1) as u32),
            None => BigRational::zero(),
        }
    }

    /// Product of the coordinate norms.
    pub fn norm(&self) -> BigRational {
        let mut acc = BigRational::one();
        for i in 0..self.dim() {
            let n = self.coord_norm(i);
            if n.is_zero() {
                return n;
            }
            acc *= n;
        }
        acc
    }

    /// Exact value of coordinate `i` as a rational with denominator `b^P`.
    pub fn value(&self, i: usize) -> BigRational {
        let num = self.value_numerator(i);
        let den = BigInt::from(self.base).pow(self.precision() as u32);
        BigRational::new(num, den)
    }

    /// Numerator of `value(i)` over the fixed denominator `b^P`.
    pub fn value_numerator(&self, i: usize) -> BigInt {
        let mut num = BigInt::zero();
        for &d in &self.coords[i] {
            num = num * self.base + d;
        }
        num
    }

    /// Digit string `d_1 d_2 ... d_P` of a coordinate, one character per
    /// digit for b <= 10 and dash-separated otherwise.
    pub fn digit_string(&self, i: usize) -> String {
        if self.base <= 10 {
            self.coords[i].iter().map(|d| (b'0' + *d as u8) as char).collect()
        } else {
            let parts: Vec<String> =
                self.coords[i].iter().map(|d| d.to_string()).collect();
            parts.join("-")
        }
    }

    /// Inverse of [`Point::digit_string`] for one coordinate.
    pub fn parse_digit_string(base: u64, s: &str) -> Result<Vec<u64>> {
        let digits: Vec<u64> = if base <= 10 {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(u64::from)
                        .ok_or_else(|| Error::validation(format!("bad digit char {c:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.split('-')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::validation(format!("bad digit token {t:?}")))
                })
                .collect::<Result<_>>()?
        };
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::validation(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        Ok(digits)
    }
}

/// `b^{-e}` as an exact rational.
pub fn power_norm(base: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(base).pow(e))
}

/// Base-b digits of n, least significant first; empty for n = 0.
pub fn digits_of(n: u64, base: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = n;
    while rest > 0 {
        out.push(rest % base);
        rest /= base;
    }
    out
}

/// Digitwise mod-b addition of two indices in `[0, b^m)`.
pub fn index_shift(n1: u64, n2: u64, base: u64, m: u32) -> Result<u64> {
    let cap = base
        .checked_pow(m)
        .ok_or_else(|| Error::domain(format!("b^m overflows: b = {base}, m = {m}")))?;
    if n1 >= cap || n2 >= cap {
        return Err(Error::domain(format!(
            "index out of range: {n1}, {n2} must lie in [0, {cap})"
        )));
    }
    let mut out = 0u64;
    let mut place = 1u64;
    let (mut a, mut b) = (n1, n2);
    for _ in 0..m {
        out += ((a % base + b % base) % base) * place;
        a /= base;
        b /= base;
        place *= base;
    }
    Ok(out)
}

/// Integer b-adic size: `b^k` for `n` in `[b^k, b^{k+1})`, and 0 for n = 0.
pub fn floor_power(n: u64, base: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut p = 1u64;
    while p <= n / base {
        p *= base;
    }
    p
}

// ======================================================================
// Tests
// ======================================================================
