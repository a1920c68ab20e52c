//! Interval numbers and the fuzzy values stored in relation cells.
//!
//! Every cell is eventually compared through a closed interval: crisp values
//! become degenerate intervals, `null` spans the whole attribute universe and
//! trapezoidal fuzzy numbers are reduced to their α-cut.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    Inverted { lower: f64, upper: f64 },
    #[error("interval bound is NaN")]
    NotANumber,
    #[error("trapezoid requires a <= b <= c <= d, got ({0}, {1}, {2}, {3})")]
    InvalidTrapezoid(f64, f64, f64, f64),
    #[error("confidence degree {0} is outside [0, 1]")]
    InvalidConfidence(f64),
    #[error("cut degree {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("trapezoidal value needs an alpha-cut to become an interval")]
    TrapezoidNeedsAlpha,
    #[error("invalid attribute domain: {0}")]
    InvalidDomain(String),
}

/// A closed interval `[lower, upper]`.
///
/// Emptiness is never encoded here; operations that may produce an empty
/// result return `Option<Interval>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self, IntervalError> {
        if lower.is_nan() || upper.is_nan() {
            return Err(IntervalError::NotANumber);
        }
        if lower > upper {
            return Err(IntervalError::Inverted { lower, upper });
        }
        Ok(Interval { lower, upper })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Interval { lower: x, upper: x }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lower, self.upper)
    }
}

/// `[max lowers, min uppers]`, or `None` when the operands are disjoint.
pub fn intersect(a: &Interval, b: &Interval) -> Option<Interval> {
    let lower = a.lower.max(b.lower);
    let upper = a.upper.min(b.upper);
    (lower <= upper).then_some(Interval { lower, upper })
}

/// Smallest interval covering both operands.
pub fn union_hull(a: &Interval, b: &Interval) -> Interval {
    Interval {
        lower: a.lower.min(b.lower),
        upper: a.upper.max(b.upper),
    }
}

/// Trapezoidal fuzzy number with support `[a, d]` and core `[b, c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, IntervalError> {
        if [a, b, c, d].iter().any(|v| v.is_nan()) {
            return Err(IntervalError::NotANumber);
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(IntervalError::InvalidTrapezoid(a, b, c, d));
        }
        Ok(Trapezoid { a, b, c, d })
    }

    pub fn points(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    /// `[a + α(b − a), d − α(d − c)]`
    pub fn cut(&self, alpha: f64) -> Interval {
        let lower = self.a + alpha * (self.b - self.a);
        let upper = self.d - alpha * (self.d - self.c);
        // b <= c keeps lower <= upper mathematically; rounding must not invert it.
        Interval {
            lower: lower.min(upper),
            upper,
        }
    }
}

/// One relation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FuzzyValue {
    Crisp(f64),
    Null,
    /// `[a, b]/p`: an interval number carrying a confidence degree `p`.
    ConfidenceInterval {
        interval: Interval,
        confidence: f64,
    },
    Trapezoid(Trapezoid),
}

impl FuzzyValue {
    /// A plain interval cell, i.e. confidence 1.
    pub fn interval(lower: f64, upper: f64) -> Result<Self, IntervalError> {
        Ok(FuzzyValue::ConfidenceInterval {
            interval: Interval::new(lower, upper)?,
            confidence: 1.0,
        })
    }

    pub fn with_confidence(interval: Interval, confidence: f64) -> Result<Self, IntervalError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(IntervalError::InvalidConfidence(confidence));
        }
        Ok(FuzzyValue::ConfidenceInterval {
            interval,
            confidence,
        })
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self, IntervalError> {
        Ok(FuzzyValue::Trapezoid(Trapezoid::new(a, b, c, d)?))
    }

    /// The widest interval the value can occupy, used for domain validation.
    /// `None` for `Null`, which always spans the domain.
    pub fn support(&self) -> Option<Interval> {
        match self {
            FuzzyValue::Crisp(x) => Some(Interval::point(*x)),
            FuzzyValue::Null => None,
            FuzzyValue::ConfidenceInterval { interval, .. } => Some(*interval),
            FuzzyValue::Trapezoid(t) => Some(Interval {
                lower: t.a,
                upper: t.d,
            }),
        }
    }
}

/// Universe bounds and scope constants of one attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeDomain {
    lower: f64,
    upper: f64,
    theta: f64,
    delta: f64,
    epsilon: f64,
}

/// Ratio between the universe scope and the size assigned to a degenerate interval.
pub const POINT_SIZE_DIVISOR: f64 = 10_000.0;

impl AttributeDomain {
    /// Domain `[lower, upper]` with θ = upper − lower.
    pub fn new(lower: f64, upper: f64) -> Result<Self, IntervalError> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(IntervalError::InvalidDomain(
                "bounds must be finite".to_string(),
            ));
        }
        if lower < 0.0 {
            return Err(IntervalError::InvalidDomain(format!(
                "lower bound {lower} is negative; domains must be non-negative"
            )));
        }
        if lower >= upper {
            return Err(IntervalError::InvalidDomain(format!(
                "lower bound {lower} must be below upper bound {upper}"
            )));
        }
        let theta = upper - lower;
        Ok(AttributeDomain {
            lower,
            upper,
            theta,
            delta: theta / POINT_SIZE_DIVISOR,
            epsilon: theta / POINT_SIZE_DIVISOR,
        })
    }

    /// Overrides θ; δ and ε follow unless ε is overridden afterwards.
    pub fn with_theta(mut self, theta: f64) -> Result<Self, IntervalError> {
        if !theta.is_finite() || theta < self.upper - self.lower {
            return Err(IntervalError::InvalidDomain(format!(
                "theta {theta} must be finite and at least the domain width {}",
                self.upper - self.lower
            )));
        }
        self.theta = theta;
        self.delta = theta / POINT_SIZE_DIVISOR;
        self.epsilon = theta / POINT_SIZE_DIVISOR;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, IntervalError> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(IntervalError::InvalidDomain(format!(
                "epsilon {epsilon} must be a positive number"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn universe(&self) -> Interval {
        Interval {
            lower: self.lower,
            upper: self.upper,
        }
    }

    pub fn admits(&self, value: &FuzzyValue) -> bool {
        value
            .support()
            .is_none_or(|support| self.universe().contains(&support))
    }
}

/// Interval form of a crisp, null or confidence-interval cell.
pub fn to_interval(
    value: &FuzzyValue,
    domain: &AttributeDomain,
) -> Result<Interval, IntervalError> {
    match value {
        FuzzyValue::Crisp(x) => Ok(Interval::point(*x)),
        FuzzyValue::Null => Ok(domain.universe()),
        FuzzyValue::ConfidenceInterval { interval, .. } => Ok(*interval),
        FuzzyValue::Trapezoid(_) => Err(IntervalError::TrapezoidNeedsAlpha),
    }
}

/// The α-cut of a cell, `None` when the cut is empty.
///
/// A confidence interval `[a, b]/p` is treated as a rectangular fuzzy set of
/// height `p`: its cut is `[a, b]` up to `α = p` and empty above.
pub fn alpha_cut(
    value: &FuzzyValue,
    alpha: f64,
    domain: &AttributeDomain,
) -> Result<Option<Interval>, IntervalError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(IntervalError::AlphaOutOfRange(alpha));
    }
    Ok(match value {
        FuzzyValue::Crisp(x) => Some(Interval::point(*x)),
        FuzzyValue::Null => Some(domain.universe()),
        FuzzyValue::ConfidenceInterval {
            interval,
            confidence,
        } => (alpha <= *confidence).then_some(*interval),
        FuzzyValue::Trapezoid(t) => Some(t.cut(alpha)),
    })
}

/// Which constant stands in for the size of a degenerate interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSize {
    Delta,
    Epsilon,
}

/// The modular (size) of an interval: 0 when empty, δ or ε for a point,
/// θ when unbounded and the length otherwise.
pub fn modular(h: Option<&Interval>, domain: &AttributeDomain, point: PointSize) -> f64 {
    match h {
        None => 0.0,
        Some(iv) if !iv.is_bounded() => domain.theta,
        Some(iv) if iv.is_point() => match point {
            PointSize::Delta => domain.delta,
            PointSize::Epsilon => domain.epsilon,
        },
        Some(iv) => (iv.upper - iv.lower).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct CellParseError {
    pub message: String,
    pub offset: usize,
}

struct CellParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> CellParser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, CellParseError> {
        Err(CellParseError {
            message: message.into(),
            offset: self.pos,
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CellParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("expected '{c}'"))
        }
    }

    fn number(&mut self) -> Result<f64, CellParseError> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        if bytes.first() == Some(&b'-') {
            len += 1;
        }
        let int_start = len;
        while bytes.get(len).is_some_and(u8::is_ascii_digit) {
            len += 1;
        }
        if len == int_start {
            return self.error("expected a number");
        }
        if bytes.get(len) == Some(&b'.') {
            len += 1;
            let frac_start = len;
            while bytes.get(len).is_some_and(u8::is_ascii_digit) {
                len += 1;
            }
            if len == frac_start {
                return self.error("expected digits after decimal point");
            }
        }
        let text = &self.rest()[..len];
        let value = text
            .parse::<f64>()
            .or_else(|_| self.error("malformed number"))?;
        self.pos += len;
        Ok(value)
    }

    fn cell(&mut self) -> Result<FuzzyValue, CellParseError> {
        self.skip_ws();
        let value = if self.rest().starts_with('[') {
            let start = self.pos;
            self.expect('[')?;
            let lower = self.number()?;
            self.expect(',')?;
            let upper = self.number()?;
            self.expect(']')?;
            let interval = Interval::new(lower, upper).map_err(|e| CellParseError {
                message: e.to_string(),
                offset: start,
            })?;
            let confidence = if self.eat('/') { self.number()? } else { 1.0 };
            FuzzyValue::with_confidence(interval, confidence).map_err(|e| CellParseError {
                message: e.to_string(),
                offset: start,
            })?
        } else if self.rest().starts_with("tz") {
            let start = self.pos;
            self.pos += 2;
            self.expect('(')?;
            let a = self.number()?;
            self.expect(',')?;
            let b = self.number()?;
            self.expect(',')?;
            let c = self.number()?;
            self.expect(',')?;
            let d = self.number()?;
            self.expect(')')?;
            FuzzyValue::trapezoid(a, b, c, d).map_err(|e| CellParseError {
                message: e.to_string(),
                offset: start,
            })?
        } else if self.rest().len() >= 4 && self.rest()[..4].eq_ignore_ascii_case("null") {
            self.pos += 4;
            FuzzyValue::Null
        } else {
            FuzzyValue::Crisp(self.number()?)
        };
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.error("unexpected trailing input");
        }
        Ok(value)
    }
}

impl FromStr for FuzzyValue {
    type Err = CellParseError;

    /// Cell grammar: `3.6`, `null`, `[1,9]`, `[1,9]/0.8`, `tz(1,2,3,4)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellParser { src: s, pos: 0 }.cell()
    }
}

impl fmt::Display for FuzzyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuzzyValue::Crisp(x) => write!(f, "{x}"),
            FuzzyValue::Null => f.write_str("null"),
            FuzzyValue::ConfidenceInterval {
                interval,
                confidence,
            } => {
                if *confidence == 1.0 {
                    write!(f, "{interval}")
                } else {
                    write!(f, "{interval}/{confidence}")
                }
            }
            FuzzyValue::Trapezoid(t) => write!(f, "tz({},{},{},{})", t.a, t.b, t.c, t.d),
        }
    }
}

impl serde::Serialize for FuzzyValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for FuzzyValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = <std::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        text.parse()
            .map_err(|e: CellParseError| serde::de::Error::custom(format!("cell {text:?}: {e}")))
    }
}

impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.lower, self.upper].serialize(serializer)
    }
}
