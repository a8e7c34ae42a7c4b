//! The discrete web: coalescing forward and backward lines on the lattices
//! `F` and `B`, and the walk obtained by exploring the maze they form.
//!
//! Lattice points are `(e, h)` with `e = idx + 1/2` and `h ≥ −1`. Writing
//! `e = x − 1/2`, the point is in `F` when `x + h` is odd and in `B`
//! otherwise. Each `F` point `(x − 1/2, h)` anchors the rectangle
//! `(x − 1/2, x + 1/2) × (h − 1, h + 1)`. Rectangles with `h ≥ 1` carry a
//! fair-coin filling; rectangles in the rows `h ∈ {−1, 0}` are filled by the
//! initial line `e ↦ a(e)`.

use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::rng::{anchor_bit, StreamKey};
use crate::walk::{initial_a, EdgeIndex, WalkTrace};

/// Orientation of the two parallel lines inside a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Filling {
    Upwards,
    Downwards,
}

impl Filling {
    /// Change of height along a line crossing the rectangle left to right.
    pub fn slope(self) -> i64 {
        match self {
            Filling::Upwards => 1,
            Filling::Downwards => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Filling::Upwards => "up",
            Filling::Downwards => "down",
        }
    }
}

/// Point `(edge, h)` of the half-plane lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub edge: EdgeIndex,
    pub h: i64,
}

impl LatticePoint {
    pub fn new(edge_idx: i64, h: i64) -> Self {
        LatticePoint {
            edge: EdgeIndex(edge_idx),
            h,
        }
    }

    /// Membership in `F` (`x + h` odd for `e = x − 1/2`).
    pub fn is_forward(self) -> bool {
        (self.edge.0 + 1 + self.h).rem_euclid(2) == 1
    }

    pub fn is_backward(self) -> bool {
        !self.is_forward()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WebError {
    #[error("rectangle anchored at ({}, {}) is fixed by the initial condition", .0.edge, .0.h)]
    FixedByInitialCondition(LatticePoint),
    #[error("({}, {}) is not a rectangle anchor (not in F, or below the lattice)", .0.edge, .0.h)]
    NotAnAnchor(LatticePoint),
    #[error("no line is drawn in the boundary rectangle at e = -1/2")]
    NoLine,
    #[error("({}, {}) is not a valid starting point for this line", .0.edge, .0.h)]
    BadStart(LatticePoint),
}

/// Lazily revealed rectangle fillings.
///
/// A filling is a pure function of `(key, anchor)`; the store memoizes what
/// has been looked at so it can be dumped and counted.
#[derive(Debug, Clone)]
pub struct WebStore {
    key: StreamKey,
    revealed: HashMap<(i64, i64), Filling>,
}

impl WebStore {
    pub fn new(key: StreamKey) -> Self {
        WebStore {
            key,
            revealed: HashMap::new(),
        }
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn revealed_count(&self) -> usize {
        self.revealed.len()
    }

    /// Fair-coin filling of a random rectangle (`h ≥ 1`).
    pub fn rectangle_fill(&mut self, anchor: LatticePoint) -> Result<Filling, WebError> {
        if !anchor.is_forward() || anchor.h < -1 {
            return Err(WebError::NotAnAnchor(anchor));
        }
        if anchor.h <= 0 {
            return Err(WebError::FixedByInitialCondition(anchor));
        }
        let key = self.key;
        Ok(*self
            .revealed
            .entry((anchor.edge.0, anchor.h))
            .or_insert_with(|| {
                if anchor_bit(key, anchor.edge.0, anchor.h) {
                    Filling::Upwards
                } else {
                    Filling::Downwards
                }
            }))
    }

    /// Filling of any rectangle, including the boundary rows where it
    /// follows the initial line from `(e, a(e))` to `(e + 1, a(e + 1))`.
    pub fn filling(&mut self, anchor: LatticePoint) -> Result<Filling, WebError> {
        match self.rectangle_fill(anchor) {
            Err(WebError::FixedByInitialCondition(p)) => boundary_filling(p.edge),
            other => other,
        }
    }

    /// One step of the forward line through the `F` point `p`.
    pub fn forward_step(&mut self, p: LatticePoint) -> Result<LatticePoint, WebError> {
        let f = self.filling(p)?;
        Ok(LatticePoint::new(p.edge.0 + 1, p.h + f.slope()))
    }

    /// One step of the backward line through the `B` point `p`: the line
    /// ends at the middle-right corner of the rectangle anchored at
    /// `(e − 1, h)`.
    pub fn backward_step(&mut self, p: LatticePoint) -> Result<LatticePoint, WebError> {
        let f = self.filling(LatticePoint::new(p.edge.0 - 1, p.h))?;
        Ok(LatticePoint::new(p.edge.0 - 1, p.h - f.slope()))
    }

    /// Value at `e_to ≥ e₀` of the forward line started at the `F` point
    /// `start = (e₀, h)`.
    pub fn forward_line(&mut self, start: LatticePoint, e_to: EdgeIndex) -> Result<i64, WebError> {
        if !start.is_forward() || start.h < 0 || e_to < start.edge {
            return Err(WebError::BadStart(start));
        }
        let mut p = start;
        while p.edge < e_to {
            p = self.forward_step(p)?;
        }
        Ok(p.h)
    }

    /// Value at `e_to ≤ e₀` of the backward line started at the `B` point
    /// `start = (e₀, h)`.
    pub fn backward_line(&mut self, start: LatticePoint, e_to: EdgeIndex) -> Result<i64, WebError> {
        if !start.is_backward() || start.h < 0 || e_to > start.edge {
            return Err(WebError::BadStart(start));
        }
        let mut p = start;
        while p.edge > e_to {
            p = self.backward_step(p)?;
        }
        Ok(p.h)
    }

    /// Revealed fillings as CSV rows `x_half,h,filling`, sorted by anchor.
    /// `x_half` is written as the half-integer `idx + 1/2`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut rows: Vec<_> = self.revealed.iter().collect();
        rows.sort_unstable_by_key(|(k, _)| **k);
        writeln!(out, "x_half,h,filling")?;
        for ((idx, h), f) in rows {
            writeln!(out, "{},{h},{}", *idx as f64 + 0.5, f.as_str())?;
        }
        Ok(())
    }
}

/// Filling of the boundary rectangle in the column right of edge `e`.
pub fn boundary_filling(e: EdgeIndex) -> Result<Filling, WebError> {
    if e.0 == -1 {
        return Err(WebError::NoLine);
    }
    if initial_a(EdgeIndex(e.0 + 1)) > initial_a(e) {
        Ok(Filling::Upwards)
    } else {
        Ok(Filling::Downwards)
    }
}

/// The path `(X_n, H_n)` exploring the maze of a [`WebStore`].
///
/// Only the two local times next to the walker are kept; everything else is
/// read from the lines of the web.
#[derive(Debug, Clone)]
pub struct Explorer {
    pub store: WebStore,
    position: i64,
    ell_minus: i64,
    ell_plus: i64,
    step: u64,
}

impl Explorer {
    pub fn new(store: WebStore) -> Self {
        Explorer {
            store,
            position: 0,
            ell_minus: 0,
            ell_plus: 0,
            step: 0,
        }
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn height(&self) -> i64 {
        (self.ell_minus + self.ell_plus) / 2
    }

    pub fn ell_minus(&self) -> i64 {
        self.ell_minus
    }

    pub fn ell_plus(&self) -> i64 {
        self.ell_plus
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn is_coin_time(&self) -> bool {
        self.ell_minus == self.ell_plus
    }

    /// Rectangle revealed at the current coin time (the walker is at its
    /// bottom), if this is a coin time.
    pub fn current_rectangle(&self) -> Option<LatticePoint> {
        self.is_coin_time()
            .then(|| LatticePoint::new(self.position - 1, self.ell_minus + 1))
    }

    pub fn step(&mut self) -> Result<(), WebError> {
        let x = self.position;
        let right = if self.is_coin_time() {
            // bottom of a fresh rectangle: upwards lines send the walker right
            let anchor = LatticePoint::new(x - 1, self.ell_minus + 1);
            self.store.rectangle_fill(anchor)? == Filling::Upwards
        } else {
            // inside a revealed rectangle: follow the lines
            let anchor = LatticePoint::new(x - 1, self.height());
            self.store.filling(anchor)? == Filling::Downwards
        };
        if right {
            let next = self
                .store
                .forward_step(LatticePoint::new(x, self.ell_plus))?;
            self.ell_minus = self.ell_plus + 1;
            self.ell_plus = next.h;
            self.position += 1;
        } else {
            let next = self
                .store
                .backward_step(LatticePoint::new(x - 1, self.ell_minus))?;
            self.ell_plus = self.ell_minus + 1;
            self.ell_minus = next.h;
            self.position -= 1;
        }
        self.step += 1;
        Ok(())
    }
}

/// Explore the maze for `steps` steps from `(0, 0)`.
pub fn explore(store: WebStore, steps: u64) -> Result<(WalkTrace, Explorer), WebError> {
    let mut ex = Explorer::new(store);
    let mut trace = WalkTrace::default();
    trace.push(0, 0, 0, true);
    for _ in 0..steps {
        ex.step()?;
        trace.push(ex.step, ex.position, ex.height(), ex.is_coin_time());
    }
    Ok((trace, ex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;

    fn store(seed: u64) -> WebStore {
        WebStore::new(SeedSpec::new(seed).stream("web"))
    }

    #[test]
    fn lattice_parity() {
        // (1/2, 0): x = 1, h = 0 -> F
        assert!(LatticePoint::new(0, 0).is_forward());
        // (-1/2, 0): x = 0 -> B
        assert!(LatticePoint::new(-1, 0).is_backward());
        assert!(LatticePoint::new(-1, 1).is_forward());
        assert!(LatticePoint::new(1, -1).is_forward());
    }

    #[test]
    fn memoized_fill() {
        let mut s = store(1);
        let a = LatticePoint::new(4, 4);
        assert!(a.is_forward());
        let f1 = s.rectangle_fill(a).unwrap();
        assert_eq!(s.rectangle_fill(a).unwrap(), f1);
        assert_eq!(s.revealed_count(), 1);
    }

    #[test]
    fn boundary_rows_are_fixed() {
        let mut s = store(1);
        let a = LatticePoint::new(0, 0);
        assert_eq!(
            s.rectangle_fill(a),
            Err(WebError::FixedByInitialCondition(a))
        );
        assert_eq!(s.filling(a).unwrap(), Filling::Downwards);
        assert_eq!(
            s.rectangle_fill(LatticePoint::new(0, 1)),
            Err(WebError::NotAnAnchor(LatticePoint::new(0, 1)))
        );
        assert_eq!(boundary_filling(EdgeIndex(-1)), Err(WebError::NoLine));
        // left of the origin the initial line climbs from a(-3/2) = -1 to 0
        assert_eq!(boundary_filling(EdgeIndex(-2)).unwrap(), Filling::Upwards);
    }

    #[test]
    fn fair_fillings() {
        let mut s = store(9);
        let mut up = 0usize;
        let mut n = 0usize;
        for idx in -200..200i64 {
            for h in 1..600i64 {
                let p = LatticePoint::new(idx, h);
                if p.is_forward() {
                    n += 1;
                    up += (s.rectangle_fill(p).unwrap() == Filling::Upwards) as usize;
                }
                if n == 100_000 {
                    break;
                }
            }
        }
        let frac = up as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
    }

    #[test]
    fn line_start_value() {
        let mut s = store(2);
        let p = LatticePoint::new(3, 5);
        assert!(p.is_forward());
        assert_eq!(s.forward_line(p, EdgeIndex(3)).unwrap(), 5);
        let b = LatticePoint::new(3, 4);
        assert_eq!(s.backward_line(b, EdgeIndex(3)).unwrap(), 4);
        assert!(s.forward_line(b, EdgeIndex(5)).is_err());
    }

    #[test]
    fn forward_lines_absorb_right_and_reflect_left() {
        for seed in 0..50 {
            let mut s = store(seed);
            // right of the origin: once at 0 the line follows a
            let mut p = LatticePoint::new(2, 6);
            let mut hit = false;
            for _ in 0..400 {
                p = s.forward_step(p).unwrap();
                assert!(p.h >= -1);
                if hit {
                    assert_eq!(p.h, initial_a(p.edge));
                }
                hit |= p.h == 0;
            }
            // left of the origin the line never goes below 0
            let mut p = LatticePoint::new(-40, 2);
            while p.edge.0 < -1 {
                p = s.forward_step(p).unwrap();
                assert!(p.h >= 0);
            }
        }
    }

    #[test]
    fn explore_zero_steps() {
        let (t, _) = explore(store(0), 0).unwrap();
        assert_eq!(t.positions, vec![0]);
        assert_eq!(t.heights, vec![0]);
    }

    #[test]
    fn coin_times_sit_on_even_points() {
        let mut ex = Explorer::new(store(4));
        for _ in 0..5000 {
            if ex.is_coin_time() {
                assert_eq!((ex.position() + ex.height()).rem_euclid(2), 0);
                let r = ex.current_rectangle().unwrap();
                assert!(r.is_forward());
                assert_eq!(r.h - 1, ex.height());
            }
            ex.step().unwrap();
        }
    }

    #[test]
    fn dump_csv() {
        let (_, ex) = explore(store(3), 50).unwrap();
        let mut buf = Vec::new();
        ex.store.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x_half,h,filling\n"));
        assert_eq!(text.lines().count(), ex.store.revealed_count() + 1);
    }
}
