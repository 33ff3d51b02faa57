//! State spaces and Latin-square combiner operations.
//!
//! All generators in this crate work over `X = {0, …, n-1}`. The counter (or
//! assisting sequence) is folded into the state through a *Latin-square
//! operation*: a binary operation that is uniquely invertible given its
//! output and either one of its inputs, i.e. every row and every column of
//! its operation table is a permutation of `X`.

use serde::Serialize;

use crate::{Error, Result};

/// Hint for how arithmetic on the space is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Plain residue arithmetic modulo `n`.
    Modular,
    /// `n` is an exact power of two; bitwise operations are meaningful.
    PowerOfTwo,
}

/// The integer range `{0, …, n-1}` together with its arithmetic flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StateSpace {
    n: u64,
    arithmetic: Arithmetic,
}

/// States are bounded so that `a + b` never overflows a `u64` before the
/// single modular reduction.
pub const MAX_STATE_SPACE: u64 = 1 << 63;

impl StateSpace {
    pub fn new(n: u64, arithmetic: Arithmetic) -> Result<Self> {
        if n == 0 || n > MAX_STATE_SPACE {
            return Err(Error::Domain(format!(
                "state space size must be in 1..=2^63, got {n}"
            )));
        }
        if arithmetic == Arithmetic::PowerOfTwo && !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "power-of-two arithmetic requires a power-of-two size, got {n}"
            )));
        }
        Ok(StateSpace { n, arithmetic })
    }

    /// Modular space of size `n`.
    pub fn modular(n: u64) -> Result<Self> {
        Self::new(n, Arithmetic::Modular)
    }

    /// Power-of-two space of size `n`.
    pub fn power_of_two(n: u64) -> Result<Self> {
        Self::new(n, Arithmetic::PowerOfTwo)
    }

    /// Picks the power-of-two flavor automatically when `n` allows it.
    pub fn auto(n: u64) -> Result<Self> {
        if n.is_power_of_two() {
            Self::power_of_two(n)
        } else {
            Self::modular(n)
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.n
    }

    pub fn check(&self, x: u64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "state {x} out of range for space of size {}",
                self.n
            )))
        }
    }
}

/// A Latin-square operation on a state space.
///
/// `AddMod`, `SubMod` and `Xor` are the group operations named in the source
/// constructions; every other Latin square of interest is reached through the
/// `Conjugated` wrapper `Z(P(a) ⋆ Q(b))` with `P`, `Q`, `Z` permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatinOp {
    /// `(a + b) mod n`
    AddMod,
    /// `(a - b) mod n`
    SubMod,
    /// Bitwise `a ⊕ b`; requires `n` to be a power of two.
    Xor,
    /// `Z(P(a) ⋆ Q(b))` for a base Latin op `⋆` and permutations `P, Q, Z`.
    Conjugated(Box<ConjugatedOp>),
}

/// Conjugation data: permutation tables plus their precomputed inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatedOp {
    base: LatinOp,
    pre_left: Vec<u64>,
    pre_right: Vec<u64>,
    post: Vec<u64>,
    pre_left_inv: Vec<u64>,
    pre_right_inv: Vec<u64>,
    post_inv: Vec<u64>,
}

pub(crate) fn is_permutation(table: &[u64]) -> bool {
    let n = table.len();
    let mut seen = vec![false; n];
    for &v in table {
        if v as usize >= n || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    true
}

/// Inverts a permutation table. For a non-permutation (only produced through
/// `conjugated_unchecked`) later writers win and missing slots stay 0.
fn invert_table(table: &[u64]) -> Vec<u64> {
    let mut inv = vec![0u64; table.len()];
    for (i, &v) in table.iter().enumerate() {
        if (v as usize) < table.len() {
            inv[v as usize] = i as u64;
        }
    }
    inv
}

/// Default sweep guard for [`LatinOp::validate`]: `n ≤ 2^12` keeps the n×n
/// table check near-instant.
pub const DEFAULT_VALIDATE_GUARD: u64 = 1 << 12;

impl LatinOp {
    /// Builds a conjugated operation `Z(P(a) ⋆ Q(b))`, validating that all
    /// three tables are permutations of the same size.
    pub fn conjugated(base: LatinOp, p: Vec<u64>, q: Vec<u64>, z: Vec<u64>) -> Result<LatinOp> {
        if p.len() != q.len() || p.len() != z.len() {
            return Err(Error::Domain(format!(
                "conjugation tables must share one length, got {}/{}/{}",
                p.len(),
                q.len(),
                z.len()
            )));
        }
        for (name, t) in [("pre_left", &p), ("pre_right", &q), ("post", &z)] {
            if !is_permutation(t) {
                return Err(Error::Domain(format!(
                    "conjugation table {name} is not a permutation"
                )));
            }
        }
        Ok(Self::conjugated_unchecked(base, p, q, z))
    }

    /// Like [`LatinOp::conjugated`] but skips the permutation checks, so that
    /// deliberately corrupted operations can be fed to [`LatinOp::validate`].
    pub fn conjugated_unchecked(base: LatinOp, p: Vec<u64>, q: Vec<u64>, z: Vec<u64>) -> LatinOp {
        let op = ConjugatedOp {
            pre_left_inv: invert_table(&p),
            pre_right_inv: invert_table(&q),
            post_inv: invert_table(&z),
            base,
            pre_left: p,
            pre_right: q,
            post: z,
        };
        LatinOp::Conjugated(Box::new(op))
    }

    /// Checks that the operation makes sense on `space` (Xor needs a
    /// power-of-two size; conjugation tables must match `n`).
    pub fn compatible(&self, space: &StateSpace) -> Result<()> {
        match self {
            LatinOp::AddMod | LatinOp::SubMod => Ok(()),
            LatinOp::Xor => {
                if space.n().is_power_of_two() {
                    Ok(())
                } else {
                    Err(Error::InvalidOp(format!(
                        "xor requires a power-of-two state space, got n={}",
                        space.n()
                    )))
                }
            }
            LatinOp::Conjugated(c) => {
                if c.pre_left.len() as u64 != space.n() {
                    return Err(Error::InvalidOp(format!(
                        "conjugation tables have length {} but n={}",
                        c.pre_left.len(),
                        space.n()
                    )));
                }
                c.base.compatible(space)
            }
        }
    }

    /// `a ⋆ b`, with both operands checked against the space.
    pub fn apply(&self, space: &StateSpace, a: u64, b: u64) -> Result<u64> {
        self.compatible(space)?;
        space.check(a)?;
        space.check(b)?;
        Ok(self.apply_raw(space.n(), a, b))
    }

    /// `a ⋆ b` without the domain checks. Callers must have validated the
    /// operands against the space once up front.
    pub(crate) fn apply_raw(&self, n: u64, a: u64, b: u64) -> u64 {
        match self {
            LatinOp::AddMod => {
                let s = a + b;
                if s >= n {
                    s - n
                } else {
                    s
                }
            }
            LatinOp::SubMod => {
                if a >= b {
                    a - b
                } else {
                    a + n - b
                }
            }
            LatinOp::Xor => a ^ b,
            LatinOp::Conjugated(c) => {
                let inner = c
                    .base
                    .apply_raw(n, c.pre_left[a as usize], c.pre_right[b as usize]);
                c.post[inner as usize]
            }
        }
    }

    /// The unique `b` with `a ⋆ b = c`.
    pub fn invert_right(&self, space: &StateSpace, a: u64, c: u64) -> Result<u64> {
        self.compatible(space)?;
        space.check(a)?;
        space.check(c)?;
        Ok(self.invert_right_raw(space.n(), a, c))
    }

    pub(crate) fn invert_right_raw(&self, n: u64, a: u64, c: u64) -> u64 {
        match self {
            LatinOp::AddMod => {
                if c >= a {
                    c - a
                } else {
                    c + n - a
                }
            }
            LatinOp::SubMod => {
                if a >= c {
                    a - c
                } else {
                    a + n - c
                }
            }
            LatinOp::Xor => a ^ c,
            LatinOp::Conjugated(conj) => {
                let inner = conj.base.invert_right_raw(
                    n,
                    conj.pre_left[a as usize],
                    conj.post_inv[c as usize],
                );
                conj.pre_right_inv[inner as usize]
            }
        }
    }

    /// The unique `a` with `a ⋆ b = c`.
    pub fn invert_left(&self, space: &StateSpace, b: u64, c: u64) -> Result<u64> {
        self.compatible(space)?;
        space.check(b)?;
        space.check(c)?;
        Ok(self.invert_left_raw(space.n(), b, c))
    }

    pub(crate) fn invert_left_raw(&self, n: u64, b: u64, c: u64) -> u64 {
        match self {
            LatinOp::AddMod => {
                if c >= b {
                    c - b
                } else {
                    c + n - b
                }
            }
            LatinOp::SubMod => {
                let s = c + b;
                if s >= n {
                    s - n
                } else {
                    s
                }
            }
            LatinOp::Xor => b ^ c,
            LatinOp::Conjugated(conj) => {
                let inner = conj.base.invert_left_raw(
                    n,
                    conj.pre_right[b as usize],
                    conj.post_inv[c as usize],
                );
                conj.pre_left_inv[inner as usize]
            }
        }
    }

    /// Exhaustively checks the Latin property: every row and every column of
    /// the n×n operation table must be a permutation of `X`.
    ///
    /// The sweep is O(n²) and refused above `guard` (default
    /// [`DEFAULT_VALIDATE_GUARD`]).
    pub fn validate(&self, space: &StateSpace, guard: Option<u64>) -> Result<LatinReport> {
        let n = space.n();
        let guard = guard.unwrap_or(DEFAULT_VALIDATE_GUARD);
        if n > guard {
            return Err(Error::Guard(format!(
                "latin validation is O(n^2); n={n} exceeds guard {guard} (pass a larger guard to override)"
            )));
        }
        if let LatinOp::Conjugated(c) = self {
            if c.pre_left.len() as u64 != n {
                return Err(Error::InvalidOp(format!(
                    "conjugation tables have length {} but n={}",
                    c.pre_left.len(),
                    n
                )));
            }
        }
        if let LatinOp::Xor = self {
            if !n.is_power_of_two() {
                return Err(Error::InvalidOp(format!(
                    "xor requires a power-of-two state space, got n={n}"
                )));
            }
        }
        let un = n as usize;
        let mut first_seen = vec![u64::MAX; un];
        // Rows: b -> a ⋆ b must be a bijection for each fixed a.
        for a in 0..n {
            first_seen.iter_mut().for_each(|s| *s = u64::MAX);
            for b in 0..n {
                let v = self.apply_raw(n, a, b) as usize;
                if v >= un {
                    return Ok(LatinReport::violation(n, LatinViolation {
                        kind: ViolationKind::OutOfRange,
                        fixed: a,
                        value: v as u64,
                        first: b,
                        second: b,
                    }));
                }
                if first_seen[v] != u64::MAX {
                    return Ok(LatinReport::violation(n, LatinViolation {
                        kind: ViolationKind::Row,
                        fixed: a,
                        value: v as u64,
                        first: first_seen[v],
                        second: b,
                    }));
                }
                first_seen[v] = b;
            }
        }
        // Columns: a -> a ⋆ b for each fixed b.
        for b in 0..n {
            first_seen.iter_mut().for_each(|s| *s = u64::MAX);
            for a in 0..n {
                let v = self.apply_raw(n, a, b) as usize;
                if v >= un {
                    return Ok(LatinReport::violation(n, LatinViolation {
                        kind: ViolationKind::OutOfRange,
                        fixed: b,
                        value: v as u64,
                        first: a,
                        second: a,
                    }));
                }
                if first_seen[v] != u64::MAX {
                    return Ok(LatinReport::violation(n, LatinViolation {
                        kind: ViolationKind::Column,
                        fixed: b,
                        value: v as u64,
                        first: first_seen[v],
                        second: a,
                    }));
                }
                first_seen[v] = a;
            }
        }
        Ok(LatinReport {
            valid: true,
            n,
            violation: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Duplicate value within a row (fixed left operand).
    Row,
    /// Duplicate value within a column (fixed right operand).
    Column,
    /// The table produced a value outside `{0, …, n-1}`.
    OutOfRange,
}

/// First violation found by [`LatinOp::validate`].
#[derive(Debug, Clone, Serialize)]
pub struct LatinViolation {
    pub kind: ViolationKind,
    /// The fixed operand of the offending row/column.
    pub fixed: u64,
    /// The duplicated (or out-of-range) value.
    pub value: u64,
    /// Varying operand at which `value` first appeared.
    pub first: u64,
    /// Varying operand at which `value` reappeared.
    pub second: u64,
}

/// Result of an exhaustive Latin-property sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LatinReport {
    pub valid: bool,
    pub n: u64,
    pub violation: Option<LatinViolation>,
}

impl LatinReport {
    fn violation(n: u64, v: LatinViolation) -> Self {
        LatinReport {
            valid: false,
            n,
            violation: Some(v),
        }
    }
}
