//! The self-interacting walk driven by its edge local times.
//!
//! Edges are the half-integers `e = idx + 1/2`; the edge between sites `x`
//! and `x + 1` has index `x`. The walker at `x` compares the (shifted) local
//! times `ℓ⁻ = ℓ(x − 1/2)` and `ℓ⁺ = ℓ(x + 1/2)`, steps across the smaller
//! one, and tosses a fair coin on ties.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::rng::{CoinRequest, CoinSource, SeedSpec, StreamCoins};

/// Edge `idx + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeIndex(pub i64);

impl EdgeIndex {
    /// Edge to the left of site `x`.
    pub fn left_of(x: i64) -> Self {
        EdgeIndex(x - 1)
    }

    /// Edge to the right of site `x`.
    pub fn right_of(x: i64) -> Self {
        EdgeIndex(x)
    }

    /// Twice the half-integer coordinate, `2e = 2 idx + 1`.
    pub fn doubled(self) -> i64 {
        2 * self.0 + 1
    }
}

impl fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.doubled())
    }
}

/// Initial local time `a(e)`: `0` if `|e| − 1/2` is even, `−1` if odd.
#[inline]
pub fn initial_a(e: EdgeIndex) -> i64 {
    let m = if e.0 >= 0 { e.0 } else { -e.0 - 1 };
    -(m & 1)
}

/// Edge local times `ℓ(e) = l(e) + a(e)`, stored densely over a window of
/// edges and equal to `a(e)` outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeProfile {
    offset: i64,
    values: Vec<i64>,
}

const INITIAL_HALF_WIDTH: i64 = 32;

impl Default for EdgeProfile {
    fn default() -> Self {
        Self::new()
    }
}

impl EdgeProfile {
    /// The initial profile `a`.
    pub fn new() -> Self {
        let offset = -INITIAL_HALF_WIDTH;
        let values = (offset..INITIAL_HALF_WIDTH)
            .map(|i| initial_a(EdgeIndex(i)))
            .collect();
        EdgeProfile { offset, values }
    }

    #[inline]
    pub fn get(&self, e: EdgeIndex) -> i64 {
        let i = e.0 - self.offset;
        if i >= 0 && (i as usize) < self.values.len() {
            self.values[i as usize]
        } else {
            initial_a(e)
        }
    }

    /// Number of traversals `l(e) = ℓ(e) − a(e)`.
    pub fn traversals(&self, e: EdgeIndex) -> i64 {
        self.get(e) - initial_a(e)
    }

    /// Stored window `[lo, hi]` of edge indices. Every edge outside it
    /// carries `a(e)`.
    pub fn window(&self) -> (i64, i64) {
        (self.offset, self.offset + self.values.len() as i64 - 1)
    }

    /// Smallest window `[lo, hi]` outside of which the profile equals `a`,
    /// or `None` for the initial profile.
    pub fn support(&self) -> Option<(i64, i64)> {
        let (lo, hi) = self.window();
        let first = (lo..=hi).find(|&i| self.traversals(EdgeIndex(i)) != 0)?;
        let last = (lo..=hi)
            .rev()
            .find(|&i| self.traversals(EdgeIndex(i)) != 0)?;
        Some((first, last))
    }

    /// Make sure edges `lo..=hi` are stored.
    pub fn reserve(&mut self, lo: i64, hi: i64) {
        let (cur_lo, cur_hi) = self.window();
        if lo >= cur_lo && hi <= cur_hi {
            return;
        }
        let width = self.values.len() as i64;
        let new_lo = if lo < cur_lo {
            lo.min(cur_lo - width)
        } else {
            cur_lo
        };
        let new_hi = if hi > cur_hi {
            hi.max(cur_hi + width)
        } else {
            cur_hi
        };
        let mut values = Vec::with_capacity((new_hi - new_lo + 1) as usize);
        values.extend((new_lo..cur_lo).map(|i| initial_a(EdgeIndex(i))));
        values.extend_from_slice(&self.values);
        values.extend((cur_hi + 1..=new_hi).map(|i| initial_a(EdgeIndex(i))));
        self.offset = new_lo;
        self.values = values;
    }

    pub fn increment(&mut self, e: EdgeIndex) {
        self.reserve(e.0, e.0);
        let i = (e.0 - self.offset) as usize;
        self.values[i] += 1;
    }

    /// Position of the walker read off from the profile: the unique site
    /// `x` with `|ℓ(x + 1/2) − ℓ(x − 1/2)| ≠ 1`.
    pub fn reconstruct_position(&self) -> Option<i64> {
        let mut found = None;
        for (x, d) in self.slopes() {
            if d.abs() != 1 {
                if found.is_some() {
                    return None;
                }
                found = Some(x);
            }
        }
        found
    }

    /// `(x, ℓ(x + 1/2) − ℓ(x − 1/2))` for every site touching the window,
    /// including the two sites just outside it.
    fn slopes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (lo, hi) = self.window();
        let first = self.values[0] - initial_a(EdgeIndex(lo - 1));
        let last = initial_a(EdgeIndex(hi + 1)) - self.values[self.values.len() - 1];
        std::iter::once((lo, first))
            .chain(
                self.values
                    .windows(2)
                    .enumerate()
                    .map(move |(i, w)| (lo + 1 + i as i64, w[1] - w[0])),
            )
            .chain(std::iter::once((hi + 1, last)))
    }

    /// `(edge_idx, ℓ)` rows over the stored window.
    pub fn rows(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "edge_idx,ell")?;
        for (idx, ell) in self.rows() {
            writeln!(out, "{idx},{ell}")?;
        }
        Ok(())
    }
}

/// Result of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub right: bool,
    pub used_coin: bool,
}

/// Full state of the walk after `step` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkState {
    position: i64,
    step: u64,
    coin_count: u64,
    profile: EdgeProfile,
}

impl Default for WalkState {
    fn default() -> Self {
        Self::new()
    }
}

impl WalkState {
    pub fn new() -> Self {
        WalkState {
            position: 0,
            step: 0,
            coin_count: 0,
            profile: EdgeProfile::new(),
        }
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Number of fair coins tossed so far.
    pub fn coin_count(&self) -> u64 {
        self.coin_count
    }

    pub fn profile(&self) -> &EdgeProfile {
        &self.profile
    }

    /// `ℓ⁻ = ℓ(X − 1/2)`.
    pub fn ell_minus(&self) -> i64 {
        self.profile.get(EdgeIndex::left_of(self.position))
    }

    /// `ℓ⁺ = ℓ(X + 1/2)`.
    pub fn ell_plus(&self) -> i64 {
        self.profile.get(EdgeIndex::right_of(self.position))
    }

    /// `H = (ℓ⁺ + ℓ⁻) / 2`; the sum is always even.
    pub fn height(&self) -> i64 {
        let s = self.ell_minus() + self.ell_plus();
        debug_assert!(s % 2 == 0, "odd ℓ⁺ + ℓ⁻ = {s}");
        s / 2
    }

    /// `ℓ⁻ = ℓ⁺`: the next step consumes a coin.
    pub fn is_coin_time(&self) -> bool {
        self.ell_minus() == self.ell_plus()
    }

    /// One step of the walk.
    pub fn step<C: CoinSource>(&mut self, coins: &mut C) -> StepOutcome {
        let lm = self.ell_minus();
        let lp = self.ell_plus();
        let (right, used_coin) = match lm.cmp(&lp) {
            std::cmp::Ordering::Greater => (true, false),
            std::cmp::Ordering::Less => (false, false),
            std::cmp::Ordering::Equal => {
                let req = CoinRequest {
                    index: self.coin_count,
                    site: self.position,
                    height: lm,
                };
                self.coin_count += 1;
                (coins.toss(req), true)
            }
        };
        self.apply(right);
        StepOutcome { right, used_coin }
    }

    /// Step in the given direction if the step is a coin toss, otherwise
    /// take the forced step. Used by the exact enumeration.
    pub fn step_with(&mut self, right_on_coin: bool) -> StepOutcome {
        let lm = self.ell_minus();
        let lp = self.ell_plus();
        let (right, used_coin) = match lm.cmp(&lp) {
            std::cmp::Ordering::Greater => (true, false),
            std::cmp::Ordering::Less => (false, false),
            std::cmp::Ordering::Equal => {
                self.coin_count += 1;
                (right_on_coin, true)
            }
        };
        self.apply(right);
        StepOutcome { right, used_coin }
    }

    #[inline]
    fn apply(&mut self, right: bool) {
        if right {
            self.profile.increment(EdgeIndex::right_of(self.position));
            self.position += 1;
        } else {
            self.profile.increment(EdgeIndex::left_of(self.position));
            self.position -= 1;
        }
        self.step += 1;
    }

    /// Take forced steps until the next coin time (no-op if already at one).
    pub fn advance_to_coin_time(&mut self) {
        while !self.is_coin_time() {
            let right = self.ell_minus() > self.ell_plus();
            self.apply(right);
        }
    }

    /// Run `steps` steps without recording anything.
    pub fn advance<C: CoinSource>(&mut self, steps: u64, coins: &mut C) {
        for _ in 0..steps {
            self.step(coins);
        }
    }

    /// Run until coin time `N(k)`, i.e. the first time at which `k` coins
    /// have been tossed and a tie is pending. Returns `false` without
    /// finishing if `max_steps` total steps would be exceeded.
    ///
    /// This is the hot loop of the Monte Carlo code and works on the raw
    /// buffer.
    pub fn run_to_coin<C: CoinSource>(&mut self, k: u64, coins: &mut C, max_steps: u64) -> bool {
        assert!(k >= self.coin_count, "coin time {k} is in the past");
        if self.coin_count == k && self.is_coin_time() {
            return true;
        }
        let mut x = self.position;
        let mut n = self.step;
        let mut count = self.coin_count;
        let done = 'outer: loop {
            // keep a margin of at least one edge on both sides
            self.profile.reserve(x - 2, x + 1);
            let lo = self.profile.offset;
            let len = self.profile.values.len() as i64;
            let vals = &mut self.profile.values;
            loop {
                let i = (x - lo) as usize;
                let lm = vals[i - 1];
                let lp = vals[i];
                let right = if lm == lp {
                    if count == k {
                        break 'outer true;
                    }
                    let req = CoinRequest {
                        index: count,
                        site: x,
                        height: lm,
                    };
                    count += 1;
                    coins.toss(req)
                } else {
                    lm > lp
                };
                if n >= max_steps {
                    break 'outer false;
                }
                let r = right as usize;
                vals[i - 1 + r] += 1;
                x += 2 * r as i64 - 1;
                n += 1;
                if x - 1 <= lo || x + 1 >= lo + len {
                    break;
                }
            }
        };
        self.position = x;
        self.step = n;
        self.coin_count = count;
        done
    }

    /// Check the slope invariant of the profile: `|ℓ(e) − ℓ(e+1)| = 1` except
    /// at `e = X − 1/2` where the difference is in `{−2, 0, 2}`.
    pub fn audit(&self) -> Result<(), InvariantViolation> {
        // one pass: slope check and position reconstruction together
        let mut found = None;
        let mut ambiguous = false;
        for (x, d) in self.profile.slopes() {
            if d.abs() != 1 {
                ambiguous |= found.is_some();
                found = Some(x);
            }
            let ok = if x == self.position {
                matches!(d, -2 | 0 | 2)
            } else {
                d.abs() == 1
            };
            if !ok {
                return Err(InvariantViolation::Slope {
                    step: self.step,
                    edge: x - 1,
                    diff: -d,
                });
            }
        }
        match found {
            Some(x) if x == self.position && !ambiguous => Ok(()),
            other => Err(InvariantViolation::Reconstruction {
                step: self.step,
                expected: self.position,
                found: if ambiguous { None } else { other },
            }),
        }
    }
}

/// A broken structural invariant of a walk or a trace.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantViolation {
    #[error("step {step}: slope condition fails at edge index {edge} (difference {diff})")]
    Slope { step: u64, edge: i64, diff: i64 },
    #[error("step {step}: reconstructed position {found:?}, walker at {expected}")]
    Reconstruction {
        step: u64,
        expected: i64,
        found: Option<i64>,
    },
    #[error("coin time N({k}) = {n} with height {h} breaks k = (N(k) + H)/2")]
    CoinTimeIdentity { k: u64, n: u64, h: i64 },
    #[error("step {step}: coin consumed off a coin time, or skipped at one")]
    CoinMismatch { step: u64 },
}

/// Recorded path `(X_n, H_n)` and the coin times `N(0), N(1), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WalkTrace {
    pub positions: Vec<i64>,
    pub heights: Vec<i64>,
    /// Steps `n` at which `ℓ⁺ = ℓ⁻`, in increasing order; `coin_times[k] = N(k)`.
    pub coin_times: Vec<u64>,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub(crate) fn push(&mut self, n: u64, x: i64, h: i64, coin: bool) {
        self.positions.push(x);
        self.heights.push(h);
        if coin {
            self.coin_times.push(n);
        }
    }

    /// Check `k = (N(k) + H_{N(k)}) / 2` at every recorded coin time.
    pub fn check_coin_time_identity(&self) -> Result<(), InvariantViolation> {
        for (k, &n) in self.coin_times.iter().enumerate() {
            let h = self.heights[n as usize];
            if (n as i64 + h) != 2 * k as i64 {
                return Err(InvariantViolation::CoinTimeIdentity { k: k as u64, n, h });
            }
        }
        Ok(())
    }

    /// CSV with columns `n,X,H,is_coin_time`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,X,H,is_coin_time")?;
        let mut coins = self.coin_times.iter().peekable();
        for (n, (x, h)) in self.positions.iter().zip(&self.heights).enumerate() {
            let is_coin = coins.peek().is_some_and(|&&c| c == n as u64);
            if is_coin {
                coins.next();
            }
            writeln!(out, "{n},{x},{h},{}", is_coin as u8)?;
        }
        Ok(())
    }
}

/// Run `steps` steps from the initial state with coins from `coins`,
/// recording the trace. Returns the trace and the final state.
pub fn run_with<C: CoinSource>(steps: u64, coins: &mut C) -> (WalkTrace, WalkState) {
    let mut state = WalkState::new();
    let mut trace = WalkTrace::default();
    trace.push(0, 0, 0, true);
    for _ in 0..steps {
        state.step(coins);
        trace.push(
            state.step_count(),
            state.position(),
            state.height(),
            state.is_coin_time(),
        );
    }
    (trace, state)
}

/// Like [`run_with`] but also checks the slope invariant, the position
/// reconstruction and the coin accounting after every step.
pub fn run_audited<C: CoinSource>(
    steps: u64,
    coins: &mut C,
) -> Result<(WalkTrace, WalkState), InvariantViolation> {
    let mut state = WalkState::new();
    let mut trace = WalkTrace::default();
    trace.push(0, 0, 0, true);
    state.audit()?;
    for _ in 0..steps {
        let was_coin_time = state.is_coin_time();
        let out = state.step(coins);
        if out.used_coin != was_coin_time {
            return Err(InvariantViolation::CoinMismatch {
                step: state.step_count(),
            });
        }
        state.audit()?;
        trace.push(
            state.step_count(),
            state.position(),
            state.height(),
            state.is_coin_time(),
        );
    }
    if trace.coin_times.len() as u64 != state.coin_count() + state.is_coin_time() as u64 {
        return Err(InvariantViolation::CoinMismatch {
            step: state.step_count(),
        });
    }
    trace.check_coin_time_identity()?;
    Ok((trace, state))
}

/// Run `steps` steps with coins from the `"walk"` stream of `seed`.
pub fn run(steps: u64, seed: SeedSpec) -> WalkTrace {
    let mut coins = StreamCoins::new(seed.stream("walk"));
    run_with(steps, &mut coins).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ScriptedCoins;

    #[test]
    fn initial_condition_values() {
        assert_eq!(initial_a(EdgeIndex(0)), 0); // e = 1/2
        assert_eq!(initial_a(EdgeIndex(-1)), 0); // e = -1/2
        assert_eq!(initial_a(EdgeIndex(1)), -1); // e = 3/2
        assert_eq!(initial_a(EdgeIndex(-3)), 0); // e = -5/2
        assert_eq!(initial_a(EdgeIndex(-2)), -1); // e = -3/2
        assert_eq!(initial_a(EdgeIndex(2)), 0);
    }

    #[test]
    fn initial_condition_is_flattest() {
        for i in -50..50 {
            let d = initial_a(EdgeIndex(i)) - initial_a(EdgeIndex(i + 1));
            if i == -1 {
                assert_eq!(d, 0);
            } else {
                assert_eq!(d.abs(), 1, "edge {i}");
            }
        }
    }

    #[test]
    fn first_steps_by_hand() {
        let mut s = WalkState::new();
        assert!(s.is_coin_time());
        let mut coins = ScriptedCoins::new(vec![true]);
        let o = s.step(&mut coins);
        assert!(o.used_coin && o.right);
        assert_eq!(s.position(), 1);
        assert_eq!(s.profile().get(EdgeIndex(0)), 1);
        // ℓ⁻ = 1 > ℓ⁺ = -1: forced right
        assert_eq!((s.ell_minus(), s.ell_plus()), (1, -1));
        let o = s.step(&mut coins);
        assert!(!o.used_coin && o.right);
        assert_eq!(s.position(), 2);
        assert!(s.is_coin_time());
        assert_eq!(s.height(), 0);
        assert_eq!(s.coin_count(), 1);
        assert_eq!(coins.remaining(), 0);
    }

    #[test]
    fn zero_steps() {
        let t = run(0, SeedSpec::new(1));
        assert_eq!(t.positions, vec![0]);
        assert_eq!(t.heights, vec![0]);
        assert_eq!(t.coin_times, vec![0]);
    }

    #[test]
    fn two_steps_with_heads() {
        let (t, _) = run_with(2, &mut ScriptedCoins::new(vec![true]));
        assert_eq!(t.positions, vec![0, 1, 2]);
        assert_eq!(t.coin_times, vec![0, 2]);
    }

    #[test]
    fn run_is_deterministic() {
        assert_eq!(run(5000, SeedSpec::new(11)), run(5000, SeedSpec::new(11)));
        assert_ne!(run(5000, SeedSpec::new(11)), run(5000, SeedSpec::new(12)));
    }

    #[test]
    fn fast_path_matches_step_by_step() {
        for seed in 0..20 {
            let key = SeedSpec::new(seed).stream("walk");
            let mut a = WalkState::new();
            let mut ca = StreamCoins::new(key);
            assert!(a.run_to_coin(300, &mut ca, u64::MAX));
            let mut b = WalkState::new();
            let mut cb = StreamCoins::new(key);
            while !(b.coin_count() == 300 && b.is_coin_time()) {
                b.step(&mut cb);
            }
            assert_eq!(a.position(), b.position());
            assert_eq!(a.step_count(), b.step_count());
            for i in -400..400 {
                assert_eq!(a.profile().get(EdgeIndex(i)), b.profile().get(EdgeIndex(i)));
            }
        }
    }

    #[test]
    fn fast_path_respects_step_cap() {
        let mut s = WalkState::new();
        let mut c = StreamCoins::new(SeedSpec::new(5).stream("walk"));
        assert!(!s.run_to_coin(10_000, &mut c, 50));
        assert_eq!(s.step_count(), 50);
    }

    #[test]
    fn audited_run_passes() {
        let mut c = StreamCoins::new(SeedSpec::new(2).stream("walk"));
        run_audited(20_000, &mut c).unwrap();
    }

    #[test]
    fn audit_detects_tampering() {
        let mut s = WalkState::new();
        s.advance(100, &mut StreamCoins::new(SeedSpec::new(4).stream("walk")));
        s.profile.increment(EdgeIndex(s.position() + 3));
        assert!(s.audit().is_err());
    }

    #[test]
    fn trace_csv_shape() {
        let (t, s) = run_with(2, &mut ScriptedCoins::new(vec![false]));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,X,H,is_coin_time\n0,0,0,1\n1,-1,0,0\n2,-2,0,1\n");
        let mut buf = Vec::new();
        s.profile().write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("edge_idx,ell\n"));
    }
}
