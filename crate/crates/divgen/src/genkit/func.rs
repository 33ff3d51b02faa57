//! Iteration functions `f: X → X` and output functions `g: X → Y`.
//!
//! Functions are either explicit tables or cheap closed forms; `KeyedMixer`
//! is an ARX-style keyed stand-in for "some pseudorandom f" in experiments.
//! It makes no pseudorandomness claim of its own.

use serde::Deserialize;

use crate::statespace::StateSpace;
use crate::{Error, Result};

/// How an iteration function is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FnBackend {
    /// Explicit tabulation, exactly `n` entries in `{0, …, n-1}`.
    Table(Vec<u64>),
    /// `f(x) = c`
    Constant(u64),
    /// `f(x) = -x mod n`
    Negation,
    /// `f(x) = (mul·x + add) mod n`
    Affine { mul: u64, add: u64 },
    /// Deterministic keyed ARX mixer reduced into the space.
    KeyedMixer { key: Vec<u8>, rounds: u32 },
}

/// An iteration function `f: X → X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    space: StateSpace,
    backend: FnBackend,
    cached_image_size: Option<u64>,
}

impl FunctionTable {
    pub fn new(space: StateSpace, backend: FnBackend) -> Result<Self> {
        match &backend {
            FnBackend::Table(t) => {
                if t.len() as u64 != space.n() {
                    return Err(Error::Domain(format!(
                        "table has {} entries but n={}",
                        t.len(),
                        space.n()
                    )));
                }
                if let Some((i, &v)) = t.iter().enumerate().find(|(_, &v)| !space.contains(v)) {
                    return Err(Error::Domain(format!(
                        "table entry {i} is {v}, outside 0..{}",
                        space.n()
                    )));
                }
            }
            FnBackend::Constant(c) => space.check(*c)?,
            FnBackend::Negation => {}
            FnBackend::Affine { mul, add } => {
                space.check(*mul)?;
                space.check(*add)?;
            }
            FnBackend::KeyedMixer { rounds, .. } => {
                if *rounds == 0 {
                    return Err(Error::Domain("mixer needs at least one round".into()));
                }
            }
        }
        Ok(FunctionTable {
            space,
            backend,
            cached_image_size: None,
        })
    }

    pub fn table(space: StateSpace, entries: Vec<u64>) -> Result<Self> {
        Self::new(space, FnBackend::Table(entries))
    }

    pub fn constant(space: StateSpace, c: u64) -> Result<Self> {
        Self::new(space, FnBackend::Constant(c))
    }

    pub fn negation(space: StateSpace) -> Self {
        FunctionTable {
            space,
            backend: FnBackend::Negation,
            cached_image_size: None,
        }
    }

    pub fn affine(space: StateSpace, mul: u64, add: u64) -> Result<Self> {
        Self::new(space, FnBackend::Affine { mul, add })
    }

    pub fn keyed_mixer(space: StateSpace, key: Vec<u8>, rounds: u32) -> Result<Self> {
        Self::new(space, FnBackend::KeyedMixer { key, rounds })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n(&self) -> u64 {
        self.space.n()
    }

    pub fn backend(&self) -> &FnBackend {
        &self.backend
    }

    /// `f(x)`. Panics if `x` is outside the space; stepping code validates
    /// seeds once and keeps every intermediate state in range.
    pub fn eval(&self, x: u64) -> u64 {
        let n = self.space.n();
        assert!(x < n, "state {x} out of range for n={n}");
        match &self.backend {
            FnBackend::Table(t) => t[x as usize],
            FnBackend::Constant(c) => *c,
            FnBackend::Negation => {
                if x == 0 {
                    0
                } else {
                    n - x
                }
            }
            FnBackend::Affine { mul, add } => {
                (((*mul as u128 * x as u128) + *add as u128) % n as u128) as u64
            }
            FnBackend::KeyedMixer { key, rounds } => mix_to_space(key, *rounds, x, n),
        }
    }

    /// Image size recorded by a previous sweep, if any.
    pub fn cached_image_size(&self) -> Option<u64> {
        self.cached_image_size
    }

    pub fn set_cached_image_size(&mut self, size: u64) {
        self.cached_image_size = Some(size);
    }

    /// Materializes the function as an explicit table of `n` entries.
    pub fn materialize(&self, guard: Option<u64>) -> Result<Vec<u64>> {
        let guard = guard.unwrap_or(1 << 24);
        let n = self.space.n();
        if n > guard {
            return Err(Error::Guard(format!(
                "materializing n={n} entries exceeds guard {guard}"
            )));
        }
        Ok(match &self.backend {
            FnBackend::Table(t) => t.clone(),
            _ => (0..n).map(|x| self.eval(x)).collect(),
        })
    }
}

/// An output function `g: X → Y` with `Y = {0, …, output_size-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFunction {
    space: StateSpace,
    output_size: u64,
    backend: OutBackend,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutBackend {
    /// `g(x) = x`, `Y = X`.
    Identity,
    /// Keep the low `bits` bits.
    Truncate { bits: u32 },
    /// Explicit table of `n` entries in `{0, …, output_size-1}`.
    Table(Vec<u64>),
    /// Keyed mixer reduced into the output space.
    KeyedMixer { key: Vec<u8>, rounds: u32 },
}

impl OutputFunction {
    pub fn identity(space: StateSpace) -> Self {
        OutputFunction {
            output_size: space.n(),
            space,
            backend: OutBackend::Identity,
        }
    }

    pub fn truncate(space: StateSpace, bits: u32) -> Result<Self> {
        if bits == 0 || bits > 63 {
            return Err(Error::Domain(format!("truncate bits must be 1..=63, got {bits}")));
        }
        Ok(OutputFunction {
            space,
            output_size: 1 << bits,
            backend: OutBackend::Truncate { bits },
        })
    }

    pub fn table(space: StateSpace, output_size: u64, entries: Vec<u64>) -> Result<Self> {
        if output_size == 0 {
            return Err(Error::Domain("output space must be nonempty".into()));
        }
        if entries.len() as u64 != space.n() {
            return Err(Error::Domain(format!(
                "output table has {} entries but n={}",
                entries.len(),
                space.n()
            )));
        }
        if let Some((i, &v)) = entries.iter().enumerate().find(|(_, &v)| v >= output_size) {
            return Err(Error::Domain(format!(
                "output table entry {i} is {v}, outside 0..{output_size}"
            )));
        }
        Ok(OutputFunction {
            space,
            output_size,
            backend: OutBackend::Table(entries),
        })
    }

    pub fn keyed_mixer(space: StateSpace, output_size: u64, key: Vec<u8>, rounds: u32) -> Result<Self> {
        if output_size == 0 {
            return Err(Error::Domain("output space must be nonempty".into()));
        }
        if rounds == 0 {
            return Err(Error::Domain("mixer needs at least one round".into()));
        }
        Ok(OutputFunction {
            space,
            output_size,
            backend: OutBackend::KeyedMixer { key, rounds },
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn output_size(&self) -> u64 {
        self.output_size
    }

    pub fn eval(&self, x: u64) -> u64 {
        assert!(x < self.space.n(), "state {x} out of range");
        match &self.backend {
            OutBackend::Identity => x,
            OutBackend::Truncate { bits } => x & ((1u64 << bits) - 1),
            OutBackend::Table(t) => t[x as usize],
            OutBackend::KeyedMixer { key, rounds } => mix_to_space(key, *rounds, x, self.output_size),
        }
    }
}

// ---------------------------------------------------------------------------
// Keyed ARX mixer
// ---------------------------------------------------------------------------

fn mixer_subkeys(key: &[u8]) -> (u64, u64) {
    // FNV-1a folds over two lanes; any fixed deterministic derivation works.
    let mut k0: u64 = 0xcbf29ce484222325;
    let mut k1: u64 = 0x9e3779b97f4a7c15;
    for (i, &b) in key.iter().enumerate() {
        k0 = (k0 ^ b as u64).wrapping_mul(0x100000001b3);
        k1 = (k1 ^ ((b as u64) << (8 * (i % 8)))).wrapping_mul(0xff51afd7ed558ccd);
    }
    (k0 | 1, k1 | 1)
}

fn mix64(mut v: u64, k0: u64, k1: u64, rounds: u32) -> u64 {
    v = v.wrapping_add(k0);
    for r in 0..rounds {
        v ^= v >> 33;
        v = v.wrapping_mul(k1 ^ (r as u64).wrapping_mul(0x9e3779b97f4a7c15));
        v = v.rotate_left(27);
        v = v.wrapping_add(k0);
    }
    v ^= v >> 29;
    v
}

fn mix_to_space(key: &[u8], rounds: u32, x: u64, size: u64) -> u64 {
    let (k0, k1) = mixer_subkeys(key);
    mix64(x, k0, k1, rounds) % size
}

/// Full-width keyed mix, used by the seed-splitting rule.
pub(crate) fn mix_raw(key: &[u8], rounds: u32, x: u64) -> u64 {
    let (k0, k1) = mixer_subkeys(key);
    mix64(x, k0, k1, rounds)
}

// ---------------------------------------------------------------------------
// Table file formats (shared with the CLI)
// ---------------------------------------------------------------------------

/// Magic prefix of the binary table format.
pub const TABLE_MAGIC: &[u8; 4] = b"FTBL";

#[derive(Deserialize)]
struct TableFile {
    n: u64,
    table: Vec<u64>,
}

/// Serializes a function as the JSON table format `{"n": N, "table": [...]}`.
pub fn table_to_json(f: &FunctionTable) -> Result<String> {
    let entries = f.materialize(None)?;
    // Emitted by hand so large tables stay on one predictable line.
    let mut s = format!("{{\"n\": {}, \"table\": [", f.n());
    for (i, v) in entries.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&v.to_string());
    }
    s.push_str("]}");
    Ok(s)
}

/// Parses the JSON table format, validating length and entry ranges.
pub fn table_from_json(text: &str) -> Result<FunctionTable> {
    let parsed: TableFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("table json: {e}")))?;
    let space = StateSpace::auto(parsed.n)
        .map_err(|e| Error::Parse(format!("table json: field `n`: {e}")))?;
    if parsed.table.len() as u64 != parsed.n {
        return Err(Error::Parse(format!(
            "table json: field `table` has {} entries but `n` is {}",
            parsed.table.len(),
            parsed.n
        )));
    }
    if let Some((i, &v)) = parsed
        .table
        .iter()
        .enumerate()
        .find(|(_, &v)| v >= parsed.n)
    {
        return Err(Error::Parse(format!(
            "table json: field `table`, entry {i} is {v}, outside 0..{}",
            parsed.n
        )));
    }
    FunctionTable::table(space, parsed.table)
}

/// Serializes a function in the binary format:
/// `"FTBL"` then `n` as u64 little-endian, then `n` u64 little-endian entries.
pub fn table_to_bytes(f: &FunctionTable) -> Result<Vec<u8>> {
    let entries = f.materialize(None)?;
    let mut out = Vec::with_capacity(12 + 8 * entries.len());
    out.extend_from_slice(TABLE_MAGIC);
    out.extend_from_slice(&f.n().to_le_bytes());
    for v in entries {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses the binary table format.
pub fn table_from_bytes(bytes: &[u8]) -> Result<FunctionTable> {
    if bytes.len() < 12 || &bytes[0..4] != TABLE_MAGIC {
        return Err(Error::Parse("table binary: missing FTBL magic".into()));
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let want = 12usize
        .checked_add((n as usize).checked_mul(8).ok_or_else(|| {
            Error::Parse(format!("table binary: n={n} too large"))
        })?)
        .ok_or_else(|| Error::Parse(format!("table binary: n={n} too large")))?;
    if bytes.len() != want {
        return Err(Error::Parse(format!(
            "table binary: expected {want} bytes for n={n}, got {}",
            bytes.len()
        )));
    }
    let mut table = Vec::with_capacity(n as usize);
    for i in 0..n as usize {
        let off = 12 + 8 * i;
        let v = u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        if v >= n {
            return Err(Error::Parse(format!(
                "table binary: entry {i} is {v}, outside 0..{n}"
            )));
        }
        table.push(v);
    }
    let space = StateSpace::auto(n).map_err(|e| Error::Parse(format!("table binary: {e}")))?;
    FunctionTable::table(space, table)
}
