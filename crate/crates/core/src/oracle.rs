//! Exact law of `(X_{N(k)}, ℓ̃_{N(k)})` for small `k`, by expanding the whole
//! coin tree of the walk.
//!
//! Every leaf at depth `k` has weight `2^{−k}`, so masses are kept as
//! integer counts over `2^k` while enumerating and turned into rationals at
//! the end. Given `(x, f)` the coin count is determined (`k(x, f)`), which
//! makes the mass of `(x, f)` at its own level equal to `ℙ(E_{x,f})`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::observables::{self, ModifiedProfile, ObservableError};
use crate::walk::WalkState;

/// Largest coin budget [`enumerate`] accepts.
pub const MAX_ENUMERATION_COINS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("refusing to enumerate {requested} coins (limit {limit})")]
    Refused { requested: u32, limit: u32 },
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// One atom of an exact law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawEntry {
    pub f: ModifiedProfile,
    pub x: i64,
    pub k: u64,
    pub p: BigRational,
}

/// Law of `(X_{N(k)}, ℓ̃_{N(k)})` for every `k ≤ max_coins`.
#[derive(Debug, Clone)]
pub struct ExactLaw {
    max_coins: u32,
    /// `levels[k][(f, x)]` = number of coin sequences of length `k` ending
    /// at `(x, f)`.
    levels: Vec<BTreeMap<(ModifiedProfile, i64), u64>>,
}

type LevelMaps = Vec<HashMap<(ModifiedProfile, i64), u64>>;

fn expand(root: WalkState, root_k: u32, max_coins: u32) -> Result<LevelMaps, OracleError> {
    let mut levels: LevelMaps = vec![HashMap::new(); max_coins as usize + 1];
    let mut stack = vec![(root, root_k)];
    while let Some((state, k)) = stack.pop() {
        let f = observables::modify_state(&state)?;
        *levels[k as usize].entry((f, state.position())).or_insert(0) += 1;
        if k < max_coins {
            for right in [false, true] {
                let mut child = state.clone();
                child.step_with(right);
                child.advance_to_coin_time();
                stack.push((child, k + 1));
            }
        }
    }
    Ok(levels)
}

/// Enumerate all coin sequences of length `≤ max_coins`.
pub fn enumerate(max_coins: u32) -> Result<ExactLaw, OracleError> {
    if max_coins > MAX_ENUMERATION_COINS {
        return Err(OracleError::Refused {
            requested: max_coins,
            limit: MAX_ENUMERATION_COINS,
        });
    }
    let root = WalkState::new();
    let mut levels: Vec<BTreeMap<(ModifiedProfile, i64), u64>> =
        vec![BTreeMap::new(); max_coins as usize + 1];
    levels[0].insert((observables::modify_state(&root)?, 0), 1);
    if max_coins > 0 {
        // the two subtrees under the first coin are independent
        let branch = |right: bool| {
            let mut s = root.clone();
            s.step_with(right);
            s.advance_to_coin_time();
            expand(s, 1, max_coins)
        };
        let (left, right) = rayon::join(|| branch(false), || branch(true));
        for part in [left?, right?] {
            for (k, map) in part.into_iter().enumerate() {
                for (key, c) in map {
                    *levels[k].entry(key).or_insert(0) += c;
                }
            }
        }
    }
    Ok(ExactLaw { max_coins, levels })
}

impl ExactLaw {
    pub fn max_coins(&self) -> u32 {
        self.max_coins
    }

    /// Atoms of the law at coin count `k`, sorted by `(f, x)`.
    pub fn level(&self, k: u64) -> Vec<LawEntry> {
        self.levels[k as usize]
            .iter()
            .map(|((f, x), &c)| LawEntry {
                f: f.clone(),
                x: *x,
                k,
                p: BigRational::new(BigInt::from(c), BigInt::one() << k),
            })
            .collect()
    }

    /// Exact total mass at level `k`.
    pub fn total_mass(&self, k: u64) -> BigRational {
        let c: u64 = self.levels[k as usize].values().sum();
        BigRational::new(BigInt::from(c), BigInt::one() << k)
    }

    /// All atoms at all levels.
    pub fn entries(&self) -> Vec<LawEntry> {
        (0..=self.max_coins as u64)
            .flat_map(|k| self.level(k))
            .collect()
    }

    /// `ℙ(E_{x,f})`, the mass of `(x, f)` at its own coin count, or `None`
    /// when that count is beyond the budget.
    pub fn event_probability(&self, f: &ModifiedProfile, x: i64) -> Option<BigRational> {
        let h = f.get(x);
        if h < 0 {
            return Some(BigRational::zero());
        }
        let k = (f.area() / 2 + h) as u64;
        if k > self.max_coins as u64 {
            return None;
        }
        let c = self.levels[k as usize]
            .get(&(f.clone(), x))
            .copied()
            .unwrap_or(0);
        Some(BigRational::new(BigInt::from(c), BigInt::one() << k))
    }

    /// Every distinct profile seen at any level.
    pub fn profiles(&self) -> Vec<ModifiedProfile> {
        let mut v: Vec<_> = self
            .levels
            .iter()
            .flat_map(|m| m.keys().map(|(f, _)| f.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Whether every `x ∈ I(f)` has its coin count within the budget, so
    /// that `ℙ(E_{x,f})` is known for all of them.
    pub fn is_resolved(&self, f: &ModifiedProfile) -> bool {
        let Ok(interval) = f.interval() else {
            return false;
        };
        let top = interval.sites().map(|x| f.get(x)).max().unwrap_or(0);
        (f.area() / 2 + top) as u64 <= self.max_coins as u64
    }

    /// `ℙ(E_{x,f})` for every resolved profile and every `x ∈ I(f)`.
    pub fn event_table(&self) -> Vec<EventRow> {
        let mut rows = Vec::new();
        for f in self.profiles() {
            if !self.is_resolved(&f) {
                continue;
            }
            let interval = f.interval().expect("resolved profiles have an interval");
            for x in interval.sites() {
                let p = self.event_probability(&f, x).expect("resolved");
                rows.push(EventRow {
                    weight: observables::event_weight(&f),
                    web: observables::web_event_probability(&f, x),
                    f: f.clone(),
                    x,
                    p,
                });
            }
        }
        rows
    }

    /// Law export: one JSON object per atom with
    /// `{f, x, p_num, p_den, k}`; numerator and denominator are decimal
    /// strings.
    pub fn to_json(&self) -> serde_json::Value {
        law_json(&self.entries())
    }
}

/// Exact `ℙ(E_{x,f})` next to the closed-form weight and the web count.
#[derive(Debug, Clone)]
pub struct EventRow {
    pub f: ModifiedProfile,
    pub x: i64,
    /// From the enumeration.
    pub p: BigRational,
    /// `(1/2)^{(m₊−m₋)−O(f)}`.
    pub weight: BigRational,
    /// From [`observables::web_event_probability`].
    pub web: BigRational,
}

impl EventRow {
    /// Whether both web lines leave `(x, f(x))` from a fair-coin rectangle.
    pub fn is_interior(&self) -> bool {
        self.f.get(self.x) >= 1
    }
}

#[derive(Serialize)]
struct JsonAtom<'a> {
    f: &'a ModifiedProfile,
    x: i64,
    p_num: String,
    p_den: String,
    k: u64,
}

pub fn law_json(entries: &[LawEntry]) -> serde_json::Value {
    let atoms: Vec<_> = entries
        .iter()
        .map(|e| JsonAtom {
            f: &e.f,
            x: e.x,
            p_num: e.p.numer().to_string(),
            p_den: e.p.denom().to_string(),
            k: e.k,
        })
        .collect();
    serde_json::to_value(atoms).expect("atoms serialize")
}

pub fn write_law_json<W: Write>(entries: &[LawEntry], out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, &law_json(entries))?;
    Ok(())
}

/// `ℙ(q_A = k) = (1 − 2/A)^{k−1} (2/A)` for `k ≥ 1`, zero for `k = 0`.
pub fn geometric_pmf(a: &BigRational, k: u64) -> BigRational {
    if k == 0 {
        return BigRational::zero();
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let p = &two / a;
    let q = BigRational::one() - &p;
    num_traits::pow(q, (k - 1) as usize) * p
}

/// Exact joint law of `(x_A, γ_A)` restricted to `q_A ≤ max_coins`.
#[derive(Debug, Clone)]
pub struct GeometricLaw {
    pub a: BigRational,
    pub entries: Vec<LawEntry>,
    /// `ℙ(q_A > max_coins)`, the mass not covered by `entries`.
    pub truncation_mass: BigRational,
}

/// Combine the enumeration with an independent geometric coin count of
/// mean `A/2`.
pub fn geometric_joint(law: &ExactLaw, a: &BigRational) -> GeometricLaw {
    assert!(
        a > &BigRational::from_integer(BigInt::from(2)),
        "A must exceed 2"
    );
    let mut entries = Vec::new();
    for k in 1..=law.max_coins as u64 {
        let pk = geometric_pmf(a, k);
        for mut e in law.level(k) {
            e.p *= &pk;
            entries.push(e);
        }
    }
    let covered: BigRational = entries.iter().map(|e| e.p.clone()).sum();
    GeometricLaw {
        a: a.clone(),
        truncation_mass: BigRational::one() - covered,
        entries,
    }
}

impl GeometricLaw {
    /// `ℙ((x_A, γ_A) = (x, f))`, zero if not an atom.
    pub fn mass(&self, f: &ModifiedProfile, x: i64) -> BigRational {
        self.entries
            .iter()
            .find(|e| e.x == x && &e.f == f)
            .map(|e| e.p.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// `p(f) = (1/2)^{(m₊−m₋)−O(f)} (1 − 2/A)^{𝒜(f)/2 − 1} (2/A)`.
    pub fn reference_mass(&self, f: &ModifiedProfile) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        let p = &two / &self.a;
        let q = BigRational::one() - &p;
        let e = f.area() / 2 - 1;
        let qe = if e >= 0 {
            num_traits::pow(q, e as usize)
        } else {
            num_traits::pow(q, (-e) as usize).recip()
        };
        observables::event_weight(f) * qe * p
    }

    /// Check `(1 − 2/A)^{√𝒜(f)} ≤ ℙ((x_A, γ_A) = (x, f)) / p(f) ≤ 1`.
    ///
    /// The lower bound is tested against the exponent `⌊√𝒜⌋`, which is the
    /// same statement whenever the ratio is an integer power of
    /// `1 − 2/A`, and a stronger one otherwise.
    pub fn sandwich_holds(&self, f: &ModifiedProfile, x: i64) -> bool {
        let ratio = self.mass(f, x) / self.reference_mass(f);
        let two = BigRational::from_integer(BigInt::from(2));
        let q = BigRational::one() - &two / &self.a;
        let area = f.area() as u64;
        let s = observables::ceil_sqrt(area);
        let floor_sqrt = if s * s == area { s } else { s - 1 };
        let lower = num_traits::pow(q, floor_sqrt as usize);
        ratio <= BigRational::one() && ratio >= lower && !ratio.is_negative()
    }
}

/// Float value of an exact rational (for reports).
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_right() -> ModifiedProfile {
        ModifiedProfile::from_values(0, vec![0, 1, 0]).unwrap()
    }

    fn f_left() -> ModifiedProfile {
        ModifiedProfile::from_values(-2, vec![0, 1, 0]).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn one_coin() {
        let law = enumerate(1).unwrap();
        let l1 = law.level(1);
        assert_eq!(l1.len(), 2);
        assert_eq!(l1[0].f, f_left());
        assert_eq!(l1[0].x, -2);
        assert_eq!(l1[0].p, r(1, 2));
        assert_eq!(l1[1].f, f_right());
        assert_eq!(l1[1].x, 2);
        assert_eq!(l1[1].p, r(1, 2));
        let l0 = law.level(0);
        assert_eq!(l0.len(), 1);
        assert!(l0[0].f.is_initial());
    }

    #[test]
    fn masses_sum_to_one() {
        let law = enumerate(8).unwrap();
        for k in 0..=8 {
            assert_eq!(law.total_mass(k), BigRational::one());
        }
    }

    #[test]
    fn refuses_large_budgets() {
        assert_eq!(
            enumerate(21).unwrap_err(),
            OracleError::Refused {
                requested: 21,
                limit: 20
            }
        );
    }

    #[test]
    fn every_atom_sits_at_its_hit_time() {
        let law = enumerate(8).unwrap();
        for e in law.entries() {
            let (_, k) = observables::hit_time(&e.f, e.x).unwrap();
            assert_eq!(k, e.k);
        }
    }

    #[test]
    fn enumeration_matches_web_line_count() {
        let law = enumerate(8).unwrap();
        let rows = law.event_table();
        assert!(!rows.is_empty());
        for row in rows {
            assert_eq!(row.p, row.web, "f = {}, x = {}", row.f, row.x);
            if row.is_interior() {
                assert_eq!(row.p, row.weight, "f = {}, x = {}", row.f, row.x);
            }
        }
    }

    #[test]
    fn geometric_joint_small() {
        let law = enumerate(1).unwrap();
        let a = BigRational::from_integer(8.into());
        let g = geometric_joint(&law, &a);
        // ℙ(q = 1) = 1/4 split over the two k = 1 atoms
        assert_eq!(g.mass(&f_right(), 2), r(1, 8));
        assert_eq!(g.mass(&f_left(), -2), r(1, 8));
        assert_eq!(g.truncation_mass, r(3, 4));
    }

    #[test]
    fn truncation_mass_in_unit_interval() {
        let law = enumerate(6).unwrap();
        for a in [3, 5, 8, 100] {
            let g = geometric_joint(&law, &BigRational::from_integer(a.into()));
            assert!(g.truncation_mass >= BigRational::zero());
            assert!(g.truncation_mass <= BigRational::one());
            let q = BigRational::one() - BigRational::new(2.into(), a.into());
            assert_eq!(g.truncation_mass, num_traits::pow(q, 6));
        }
    }

    #[test]
    fn json_export() {
        let law = enumerate(1).unwrap();
        let v = law.to_json();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 3);
        assert_eq!(arr[1]["p_num"], "1");
        assert_eq!(arr[1]["p_den"], "2");
        assert_eq!(arr[1]["x"], -2);
        assert_eq!(arr[1]["f"]["m_minus"], -2);
    }
}
