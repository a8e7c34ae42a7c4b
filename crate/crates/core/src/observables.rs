//! Modified local times and the quantities read off from them.
//!
//! At a coin time the walker at `x` has `ℓ(x − 1/2) = ℓ(x + 1/2)`. Removing
//! the column between the two edges and gluing the two sides gives a curve
//! `f` on the integers,
//!
//! ```text
//! f(y) = ℓ(y − 1/2)  for y ≤ x,        f(y) = ℓ(y + 1/2)  for y > x,
//! ```
//!
//! which no longer shows where the surgery took place. Outside
//! `[m₋, m₊]` it coincides with `ã(y) = −1{y odd}`.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::walk::{EdgeIndex, EdgeProfile, WalkState};
use crate::web::boundary_filling;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObservableError {
    #[error("ℓ⁻ = {ell_minus} differs from ℓ⁺ = {ell_plus}: not a coin time")]
    NotACoinTime { ell_minus: i64, ell_plus: i64 },
    #[error("malformed profile: {0}")]
    Malformed(String),
    #[error("site {x} is outside the admissible interval {interval}")]
    OutsideInterval {
        x: i64,
        interval: AdmissibleInterval,
    },
}

/// `ã(y)`: `−1` on odd sites, `0` on even ones.
#[inline]
pub fn shifted_initial(y: i64) -> i64 {
    -(y.rem_euclid(2))
}

/// A modified local time profile, stored on `[m₋, m₊]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModifiedProfile {
    m_minus: i64,
    values: Vec<i64>,
}

impl ModifiedProfile {
    /// The profile `ã` of the initial state.
    pub fn initial() -> Self {
        ModifiedProfile {
            m_minus: 0,
            values: vec![0],
        }
    }

    /// Build from the values of `f` on `[m₋, m₊]`, checking the shape
    /// constraints every modified local time satisfies.
    pub fn from_values(m_minus: i64, values: Vec<i64>) -> Result<Self, ObservableError> {
        let f = ModifiedProfile { m_minus, values };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<(), ObservableError> {
        let bad = |m: String| Err(ObservableError::Malformed(m));
        let (lo, hi) = (self.m_minus(), self.m_plus());
        if self.values.is_empty() {
            return bad("empty support".into());
        }
        if lo > 0 || hi < 0 {
            return bad(format!("support [{lo}, {hi}] does not contain the origin"));
        }
        if lo.rem_euclid(2) != 0 || hi.rem_euclid(2) != 0 {
            return bad(format!("support ends [{lo}, {hi}] must be even"));
        }
        if self.values[0] != 0 || *self.values.last().unwrap() != 0 {
            return bad("profile must vanish at both ends of its support".into());
        }
        if let Some(y) = self.sites().find(|&y| self.get(y) < 0) {
            return bad(format!("negative value at {y} inside the support"));
        }
        if let Some(w) = self
            .values
            .windows(2)
            .position(|w| (w[1] - w[0]).abs() != 1)
        {
            return bad(format!(
                "slope condition fails between {} and {}",
                lo + w as i64,
                lo + w as i64 + 1
            ));
        }
        let zeros = self.internal_zeros();
        if zeros.contains(&0) {
            return bad("the origin cannot be an internal zero".into());
        }
        if zeros.iter().any(|&z| z < 0) && zeros.iter().any(|&z| z > 0) {
            return bad("internal zeros on both sides of the origin".into());
        }
        Ok(())
    }

    pub fn m_minus(&self) -> i64 {
        self.m_minus
    }

    pub fn m_plus(&self) -> i64 {
        self.m_minus + self.values.len() as i64 - 1
    }

    /// Values on `[m₋, m₊]`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.m_minus()..=self.m_plus()
    }

    pub fn is_initial(&self) -> bool {
        self.m_minus == 0 && self.values.len() == 1
    }

    #[inline]
    pub fn get(&self, y: i64) -> i64 {
        let i = y - self.m_minus;
        if i >= 0 && (i as usize) < self.values.len() {
            self.values[i as usize]
        } else {
            shifted_initial(y)
        }
    }

    /// Zeros of `f` strictly inside `(m₋, m₊)`.
    pub fn internal_zeros(&self) -> Vec<i64> {
        let lo = self.m_minus();
        let n = self.values.len();
        self.values
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v == 0 && i > 0 && i + 1 < n)
            .map(|(i, _)| lo + i as i64)
            .collect()
    }

    /// `O(f)`.
    pub fn zero_count(&self) -> usize {
        let n = self.values.len();
        if n < 3 {
            return 0;
        }
        self.values[1..n - 1].iter().filter(|&&v| v == 0).count()
    }

    /// `𝒜(f) = Σ_y (f(y) − ã(y))`; always even.
    pub fn area(&self) -> i64 {
        self.sites()
            .zip(&self.values)
            .map(|(y, &v)| v - shifted_initial(y))
            .sum()
    }

    pub fn max_value(&self) -> i64 {
        *self.values.iter().max().unwrap()
    }

    /// Admissible interval `I(f)`.
    pub fn interval(&self) -> Result<AdmissibleInterval, ObservableError> {
        if self.is_initial() {
            return Ok(AdmissibleInterval::closed(0, 0));
        }
        let zeros = self.internal_zeros();
        let (lo, hi) = (self.m_minus(), self.m_plus());
        match (zeros.first(), zeros.last()) {
            (None, _) => Ok(AdmissibleInterval::closed(lo, hi)),
            (Some(&first), Some(&last)) if first > 0 => Ok(AdmissibleInterval {
                lo: last,
                hi,
                lo_open: true,
                hi_open: false,
            }),
            (Some(&first), Some(&last)) if last < 0 => Ok(AdmissibleInterval {
                lo,
                hi: first,
                lo_open: false,
                hi_open: true,
            }),
            _ => Err(ObservableError::Malformed(
                "internal zeros on both sides of the origin".into(),
            )),
        }
    }

    /// `(x, f(x))` rows over `[m₋ − 1, m₊ + 1]`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,f")?;
        for y in self.m_minus() - 1..=self.m_plus() + 1 {
            writeln!(out, "{y},{}", self.get(y))?;
        }
        Ok(())
    }
}

impl fmt::Display for ModifiedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f@{}:{:?}", self.m_minus, self.values)
    }
}

/// An integer interval with explicit open/closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleInterval {
    pub lo: i64,
    pub hi: i64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl AdmissibleInterval {
    pub fn closed(lo: i64, hi: i64) -> Self {
        AdmissibleInterval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    /// Smallest integer in the interval.
    pub fn first(&self) -> i64 {
        self.lo + self.lo_open as i64
    }

    /// Largest integer in the interval.
    pub fn last(&self) -> i64 {
        self.hi - self.hi_open as i64
    }

    /// Number of integers `#I`.
    pub fn len(&self) -> i64 {
        (self.last() - self.first() + 1).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.first() && x <= self.last()
    }

    /// Zero-based rank of `x` inside the interval.
    pub fn rank(&self, x: i64) -> Option<i64> {
        self.contains(x).then(|| x - self.first())
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.first()..=self.last()
    }
}

impl fmt::Display for AdmissibleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// The modified local time at a coin time of the walk.
pub fn modify(profile: &EdgeProfile, position: i64) -> Result<ModifiedProfile, ObservableError> {
    let ell_minus = profile.get(EdgeIndex::left_of(position));
    let ell_plus = profile.get(EdgeIndex::right_of(position));
    if ell_minus != ell_plus {
        return Err(ObservableError::NotACoinTime {
            ell_minus,
            ell_plus,
        });
    }
    let f = |y: i64| {
        if y <= position {
            profile.get(EdgeIndex(y - 1))
        } else {
            profile.get(EdgeIndex(y))
        }
    };
    let (wlo, whi) = profile.window();
    // beyond the stored window f agrees with ã, which hits −1 within one site
    let mut y = 0;
    while f(y) != -1 {
        y -= 1;
        if y < wlo - 2 {
            return Err(ObservableError::Malformed("left end not found".into()));
        }
    }
    let m_minus = y + 1;
    let mut y = 0;
    while f(y) != -1 {
        y += 1;
        if y > whi + 2 {
            return Err(ObservableError::Malformed("right end not found".into()));
        }
    }
    let m_plus = y - 1;
    let values = (m_minus..=m_plus).map(f).collect();
    ModifiedProfile::from_values(m_minus, values)
}

/// [`modify`] applied to a walk state.
pub fn modify_state(state: &WalkState) -> Result<ModifiedProfile, ObservableError> {
    modify(state.profile(), state.position())
}

/// `(1/2)^{(m₊ − m₋) − O(f)}` as an exact rational.
pub fn event_weight(f: &ModifiedProfile) -> BigRational {
    dyadic(event_weight_exponent(f))
}

/// Exponent `(m₊ − m₋) − O(f)` of [`event_weight`].
pub fn event_weight_exponent(f: &ModifiedProfile) -> u32 {
    ((f.m_plus() - f.m_minus()) as usize - f.zero_count()) as u32
}

/// `2^{−e}`.
pub fn dyadic(e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

/// Probability that the two web lines leaving `(x, f(x))` trace out `f`,
/// counting exactly which rectangles along them are random.
///
/// A step of either line that starts at height `≥ 1` crosses a fair-coin
/// rectangle; a step starting at height `0` (or `−1`) crosses a boundary
/// rectangle and is forced, possibly in a direction that contradicts `f`,
/// in which case the probability is zero. When `f(x) ≥ 1` this reduces to
/// [`event_weight`]; at an end of `I(f)` where `f(x) = 0` it does not.
pub fn web_event_probability(f: &ModifiedProfile, x: i64) -> BigRational {
    if (x + f.get(x)).rem_euclid(2) != 0 {
        return BigRational::zero();
    }
    let mut random_steps = 0u32;
    // backward line: point (edge y − 1, f(y)) for y ≤ x, anchors at edge y − 2
    for y in (f.m_minus()..=x).rev() {
        let h = f.get(y);
        let next = f.get(y - 1);
        if h >= 1 {
            random_steps += 1;
        } else {
            match boundary_filling(EdgeIndex(y - 2)) {
                Ok(fill) if h - fill.slope() == next => {}
                _ => return BigRational::zero(),
            }
        }
    }
    // forward line: point (edge y, f(y)) for y ≥ x
    for y in x..=f.m_plus() {
        let h = f.get(y);
        let next = f.get(y + 1);
        if h >= 1 {
            random_steps += 1;
        } else {
            match boundary_filling(EdgeIndex(y)) {
                Ok(fill) if h + fill.slope() == next => {}
                _ => return BigRational::zero(),
            }
        }
    }
    dyadic(random_steps)
}

/// Step `n(x, f) = 𝒜(f) + f(x)` and coin count `k(x, f) = 𝒜(f)/2 + f(x)` at
/// which the walk sits at `x` with modified local time `f`.
pub fn hit_time(f: &ModifiedProfile, x: i64) -> Result<(u64, u64), ObservableError> {
    let interval = f.interval()?;
    if !interval.contains(x) {
        return Err(ObservableError::OutsideInterval { x, interval });
    }
    let area = f.area();
    if area % 2 != 0 {
        return Err(ObservableError::Malformed(format!("odd area {area}")));
    }
    let h = f.get(x);
    Ok(((area + h) as u64, (area / 2 + h) as u64))
}

/// `⌈√n⌉` for `n ≥ 0`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

/// Range `[𝒜/2, 𝒜/2 + ⌈√𝒜⌉]` containing `k(x, f)` for every `x ∈ I(f)`.
pub fn k_bounds(f: &ModifiedProfile) -> (u64, u64) {
    let area = f.area() as u64;
    (area / 2, area / 2 + ceil_sqrt(area))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{ScriptedCoins, SeedSpec, StreamCoins};
    use crate::walk::run_with;

    fn f_right() -> ModifiedProfile {
        ModifiedProfile::from_values(0, vec![0, 1, 0]).unwrap()
    }

    #[test]
    fn initial_state() {
        let s = WalkState::new();
        let f = modify_state(&s).unwrap();
        assert!(f.is_initial());
        assert_eq!(f, ModifiedProfile::initial());
        assert_eq!(f.interval().unwrap(), AdmissibleInterval::closed(0, 0));
        assert_eq!(f.area(), 0);
        assert_eq!(hit_time(&f, 0).unwrap(), (0, 0));
        assert_eq!(k_bounds(&f), (0, 0));
    }

    #[test]
    fn two_step_example() {
        let (_, s) = run_with(2, &mut ScriptedCoins::new(vec![true]));
        let f = modify_state(&s).unwrap();
        assert_eq!(f, f_right());
        assert_eq!((f.m_minus(), f.m_plus(), f.zero_count()), (0, 2, 0));
        assert_eq!(f.get(-1), -1);
        assert_eq!(f.get(3), -1);
        assert_eq!(f.area(), 2);
        assert_eq!(f.interval().unwrap(), AdmissibleInterval::closed(0, 2));
        assert_eq!(event_weight(&f), dyadic(2));
        assert_eq!(hit_time(&f, 2).unwrap(), (2, 1));
        let (lo, hi) = k_bounds(&f);
        assert_eq!((lo, hi), (1, 3));
    }

    #[test]
    fn not_a_coin_time() {
        let (_, s) = run_with(1, &mut ScriptedCoins::new(vec![true]));
        assert_eq!(
            modify_state(&s),
            Err(ObservableError::NotACoinTime {
                ell_minus: 1,
                ell_plus: -1
            })
        );
    }

    #[test]
    fn interval_with_internal_zero_right() {
        // zero at 3 > 0, m₊ = 6
        let f = ModifiedProfile::from_values(-2, vec![0, 1, 2, 1, 2, 1, 0, 1, 0]).unwrap();
        assert_eq!(f.m_plus(), 6);
        assert_eq!(f.internal_zeros(), vec![4]);
        let f = ModifiedProfile::from_values(-2, vec![0, 1, 2, 1, 2, 1, 0, 1, 2, 1, 0]).unwrap();
        assert_eq!(f.m_plus(), 8);
        assert_eq!(f.internal_zeros(), vec![4]);
        let i = f.interval().unwrap();
        assert_eq!(i.to_string(), "(4, 8]");
        assert_eq!((i.first(), i.last(), i.len()), (5, 8, 4));
        assert!(hit_time(&f, 4).is_err());
        assert!(hit_time(&f, 0).is_err());
        assert!(hit_time(&f, 6).is_ok());
    }

    #[test]
    fn interval_with_internal_zero_left() {
        let f = ModifiedProfile::from_values(-6, vec![0, 1, 0, 1, 0, 1, 2, 1, 0]).unwrap();
        assert_eq!(f.internal_zeros(), vec![-4, -2]);
        assert_eq!(f.interval().unwrap().to_string(), "[-6, -4)");
        assert_eq!(f.interval().unwrap().len(), 2);
        assert_eq!(f.zero_count(), 2);
    }

    #[test]
    fn malformed_profiles() {
        // odd end
        assert!(ModifiedProfile::from_values(-1, vec![0, 1, 0]).is_err());
        // slope
        assert!(ModifiedProfile::from_values(0, vec![0, 2, 0]).is_err());
        // zeros on both sides
        assert!(ModifiedProfile::from_values(-4, vec![0, 1, 0, 1, 2, 1, 0, 1, 0]).is_err());
        // origin outside
        assert!(ModifiedProfile::from_values(2, vec![0, 1, 0]).is_err());
        // negative
        assert!(ModifiedProfile::from_values(0, vec![0, -1, 0]).is_err());
    }

    #[test]
    fn exponent_law() {
        let f = f_right();
        let g = ModifiedProfile::from_values(0, vec![0, 1, 2, 1, 0]).unwrap();
        let delta = (g.m_plus() - g.m_minus()) - (f.m_plus() - f.m_minus());
        assert_eq!(event_weight(&g), event_weight(&f) * dyadic(delta as u32));
    }

    #[test]
    fn web_probability_at_ends() {
        let f = f_right();
        assert_eq!(web_event_probability(&f, 1), dyadic(2));
        assert_eq!(web_event_probability(&f, 2), dyadic(1));
        assert_eq!(web_event_probability(&f, 0), BigRational::zero());
        let g = ModifiedProfile::from_values(-2, vec![0, 1, 0]).unwrap();
        assert_eq!(web_event_probability(&g, -2), dyadic(1));
        assert_eq!(
            web_event_probability(&ModifiedProfile::initial(), 0),
            BigRational::one()
        );
    }

    #[test]
    fn ceil_sqrt_values() {
        for n in 0..2000u64 {
            let r = ceil_sqrt(n);
            assert!(r * r >= n && (r == 0 || (r - 1) * (r - 1) < n));
        }
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        f_right().write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,f\n-1,-1\n0,0\n1,1\n2,0\n3,-1\n"
        );
    }

    #[test]
    fn trace_round_trip() {
        for seed in 0..40 {
            let mut s = WalkState::new();
            let mut c = StreamCoins::new(SeedSpec::new(seed).stream("walk"));
            for k in 0..150u64 {
                assert!(s.run_to_coin(k, &mut c, u64::MAX));
                let f = modify_state(&s).unwrap();
                let x = s.position();
                let i = f.interval().unwrap();
                assert!(i.contains(x), "seed {seed} k {k}: {x} ∉ {i}");
                assert_eq!(hit_time(&f, x).unwrap(), (s.step_count(), k));
                let (lo, hi) = k_bounds(&f);
                assert!(lo <= k && k <= hi);
                assert_eq!(f.get(0) % 2, 0);
            }
        }
    }
}
