//! Constructive worst cases.
//!
//! The meshed construction interleaves two families of values
//! `a_0..a_{α-1}` (in block order) and `b_0..b_{β-1}` (in cyclic order) so
//! that the counter-assisted run from `a_0` walks the α×2β meshing matrix
//!
//! ```text
//!   a_0 b_0 a_0 b_1 … a_0 b_{β-1}
//!   a_1 b_0 a_1 b_1 … a_1 b_{β-1}
//!   …
//! ```
//!
//! row by row and closes after 2αβ steps, giving total diversity exactly
//! α+β. With 2αβ = n and α = β = √(n/2) that is √(2n), matching the √n
//! lower bound up to a constant, so the bound is asymptotically tight.
//!
//! Requirements on `f` (everything mod n, or ⊕ for the xor variant):
//!
//! ```text
//!   a_i = y + 2 + 2βi   ↦  x - 2βi
//!   b_j = x + 1 + 2j    ↦  y - 2j        (j < β-1)
//!   b_{β-1} = x - 1 + 2β ↦  y + 2
//! ```
//!
//! Any `x`, `y` of equal parity keep the `a` and `b` families disjoint.
//! Every construction is simulation-checked at build time: if the meshed
//! run does not reproduce the matrix row by row and return to `a_0`, the
//! constructor reports the failure rather than returning a broken table.

use crate::genkit::{BadModeVariant, FnBackend, FunctionTable, GeneratorSpec, OutputFunction};
use crate::statespace::{LatinOp, StateSpace};
use crate::{Error, Result};

/// Which arithmetic the meshed construction is instantiated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshedVariant {
    /// `n/2` a perfect square, `α = β = √(n/2)`, counter added mod n.
    SquareAddMod,
    /// `n` an even power of two, `α = √n`, `β = √n/2`, counter added mod n.
    PowerOfTwoAddMod,
    /// Any even `n`: `α = β = ⌊√(n/2)⌋` and `f` evaluated on `x mod 2αβ`;
    /// the diversity guarantee degrades to an upper bound.
    GeneralFloorAddMod,
    /// `n` an even power of two with the counter xored in instead of added.
    PowerOfTwoXor,
}

/// A meshed adversarial function together with its defining data.
#[derive(Debug, Clone)]
pub struct MeshedConstruction {
    pub variant: MeshedVariant,
    pub n: u64,
    pub alpha: u64,
    pub beta: u64,
    pub x: u64,
    pub y: u64,
    pub a_values: Vec<u64>,
    pub b_values: Vec<u64>,
    pub f: FunctionTable,
    pub op: LatinOp,
    /// Seed from which the run traverses the meshing matrix (`a_0`).
    pub seed: u64,
    /// Orbit period from `seed`; `Some(n)` for the exact variants.
    pub expected_period: Option<u64>,
    /// `α+β` for the exact variants, `(α+β)·⌈n/2αβ⌉` for the general one.
    pub expected_total_diversity: u64,
    /// True when `expected_total_diversity` is only an upper bound.
    pub diversity_is_upper_bound: bool,
}

impl MeshedConstruction {
    /// The counter-assisted generator this construction is built to defeat.
    pub fn generator(&self) -> GeneratorSpec {
        GeneratorSpec::counter_assisted(
            self.f.clone(),
            OutputFunction::identity(*self.f.space()),
            self.op.clone(),
            0,
        )
        .expect("construction is internally consistent")
    }

    /// Row-major traversal of the meshing matrix: the state sequence the
    /// seeded run must produce, starting at `a_0`, for one full period.
    pub fn mesh_sequence(&self) -> Vec<u64> {
        let mut seq = Vec::with_capacity((2 * self.alpha * self.beta) as usize);
        for i in 0..self.alpha as usize {
            for j in 0..self.beta as usize {
                seq.push(self.a_values[i]);
                seq.push(self.b_values[j]);
            }
        }
        seq
    }
}

fn require_even(n: u64) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::Construction(format!("n must be even, got {n}")));
    }
    Ok(())
}

fn even_power_of_two_root(n: u64) -> Result<u64> {
    if !n.is_power_of_two() || n < 4 || n.trailing_zeros() % 2 != 0 {
        return Err(Error::Construction(format!(
            "n must be an even power of two (4, 16, 64, …), got {n}"
        )));
    }
    Ok(1u64 << (n.trailing_zeros() / 2))
}

/// Builds the meshed construction for `n` with parameters `x`, `y`.
///
/// `x` and `y` must have the same parity (the default `x = y = 0` always
/// works); values of `f` off the meshed points default to 0.
pub fn build_meshed(n: u64, x: u64, y: u64, variant: MeshedVariant) -> Result<MeshedConstruction> {
    let space = StateSpace::auto(n).map_err(|e| Error::Construction(e.to_string()))?;
    space.check(x).map_err(|e| Error::Construction(e.to_string()))?;
    space.check(y).map_err(|e| Error::Construction(e.to_string()))?;
    require_even(n)?;
    if x % 2 != y % 2 {
        return Err(Error::Construction(format!(
            "x and y must have the same parity, got x={x}, y={y}"
        )));
    }

    let (alpha, beta) = match variant {
        MeshedVariant::SquareAddMod => {
            let half = n / 2;
            let r = half.isqrt();
            if r * r != half {
                return Err(Error::Construction(format!(
                    "square variant needs n/2 to be a perfect square, got n/2={half}"
                )));
            }
            (r, r)
        }
        MeshedVariant::PowerOfTwoAddMod | MeshedVariant::PowerOfTwoXor => {
            let root = even_power_of_two_root(n)?;
            (root, root / 2)
        }
        MeshedVariant::GeneralFloorAddMod => {
            let r = (n / 2).isqrt();
            (r, r)
        }
    };
    debug_assert!(alpha >= 1 && beta >= 1);
    let m = 2 * alpha * beta; // modulus the meshing lives in; m = n except for the general variant
    debug_assert!(m <= n);

    let xor = variant == MeshedVariant::PowerOfTwoXor;
    let xm = x % m;
    let ym = y % m;
    let combine = |a: u64, b: u64| if xor { a ^ b } else { (a + b) % m };
    let sub = |a: u64, b: u64| if xor { a ^ b } else { (a + m - b % m) % m };

    let mut a_values = Vec::with_capacity(alpha as usize);
    let mut f_of_a = Vec::with_capacity(alpha as usize);
    for i in 0..alpha {
        a_values.push(combine(combine(ym, 2), 2 * beta * i));
        f_of_a.push(sub(xm, 2 * beta * i));
    }
    let mut b_values = Vec::with_capacity(beta as usize);
    let mut f_of_b = Vec::with_capacity(beta as usize);
    for j in 0..beta {
        b_values.push(combine(xm, 2 * j + 1));
        let fb = if j + 1 == beta {
            combine(ym, 2)
        } else if xor {
            // Solving the xor mesh equations gives y ⊕ 2 ⊕ (2j+2) here.
            ym ^ 2 ^ (2 * j + 2)
        } else {
            sub(ym, 2 * j)
        };
        f_of_b.push(fb);
    }

    // All a_i and b_j must be pairwise distinct; same parity guarantees it.
    {
        let mut seen = vec![false; m as usize];
        for &v in a_values.iter().chain(b_values.iter()) {
            if seen[v as usize] {
                return Err(Error::Construction(format!(
                    "meshed values collide at {v}; pick x and y of equal parity"
                )));
            }
            seen[v as usize] = true;
        }
    }

    // Assemble f over Z_n; off-mesh values are arbitrary and default to 0.
    // The general variant evaluates through x mod m.
    let mut base = vec![0u64; m as usize];
    for (i, &a) in a_values.iter().enumerate() {
        base[a as usize] = f_of_a[i];
    }
    for (j, &b) in b_values.iter().enumerate() {
        base[b as usize] = f_of_b[j];
    }
    let table: Vec<u64> = (0..n).map(|v| base[(v % m) as usize]).collect();
    let f = FunctionTable::table(space, table)?;

    let op = if xor { LatinOp::Xor } else { LatinOp::AddMod };
    let exact = m == n;
    let construction = MeshedConstruction {
        variant,
        n,
        alpha,
        beta,
        x,
        y,
        a_values,
        b_values,
        f,
        op,
        seed: 0, // fixed up below
        expected_period: if exact { Some(n) } else { None },
        expected_total_diversity: if exact {
            alpha + beta
        } else {
            (alpha + beta) * n.div_ceil(m)
        },
        diversity_is_upper_bound: !exact,
    };
    let construction = MeshedConstruction {
        seed: construction.a_values[0],
        ..construction
    };

    if exact {
        verify_mesh(&construction)?;
    }
    Ok(construction)
}

/// Solves the meshing equations over `⊕ i` instead of `+ i (mod n)`.
/// Power-of-two alignment makes `2βi + (j+1)` split as `2βi ⊕ (j+1)`, so the
/// same derivation goes through; the result is simulation-checked.
pub fn build_meshed_xor(n: u64, x: u64, y: u64) -> Result<MeshedConstruction> {
    build_meshed(n, x, y, MeshedVariant::PowerOfTwoXor)
}

/// Checks by direct simulation that the seeded run reproduces the meshing
/// matrix row-major and returns to `a_0` when the counter wraps.
fn verify_mesh(c: &MeshedConstruction) -> Result<()> {
    let n = c.n;
    let expect = c.mesh_sequence();
    let mut state = c.seed;
    for (pos, &want) in expect.iter().enumerate() {
        if pos > 0 {
            state = c.op.apply_raw(n, c.f.eval(state), pos as u64 % n);
        }
        if state != want {
            return Err(Error::Construction(format!(
                "meshed derivation failed for n={n} {:?}: position {pos} produced {state}, expected {want}",
                c.variant
            )));
        }
    }
    state = c.op.apply_raw(n, c.f.eval(state), (2 * c.alpha * c.beta) % n);
    if state != c.seed {
        return Err(Error::Construction(format!(
            "meshed run did not close: x_2αβ = {state}, expected seed {}",
            c.seed
        )));
    }
    Ok(())
}

/// A sequence of length ν²+1 over ν symbols with the isolated equality
/// property, from an Eulerian circuit of the complete directed graph on ν
/// vertices (self-loops included). Edges are consumed in lexicographic
/// order, so the output is deterministic.
pub fn eulerian_sequence(nu: u64) -> Result<Vec<u64>> {
    if nu == 0 {
        return Err(Error::Domain("need at least one symbol".into()));
    }
    let nu = nu as usize;
    // next[v] = smallest untraversed edge target from v.
    let mut next = vec![0usize; nu];
    let mut stack: Vec<usize> = Vec::with_capacity(nu * nu + 1);
    let mut circuit: Vec<u64> = Vec::with_capacity(nu * nu + 1);
    stack.push(0);
    while let Some(&v) = stack.last() {
        if next[v] < nu {
            let w = next[v];
            next[v] += 1;
            stack.push(w);
        } else {
            circuit.push(stack.pop().unwrap() as u64);
        }
    }
    circuit.reverse();
    debug_assert_eq!(circuit.len(), nu * nu + 1);
    Ok(circuit)
}

/// One entry of the bad-modification gallery: a counter-dependent mode with
/// its documented worst-case `f` attached and its diversity ceiling.
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub spec: GeneratorSpec,
    /// Upper bound on the total diversity from any seed, where one exists.
    pub max_total_diversity: Option<u64>,
    /// True when the mode reaches `D(k) = min(k, n)` (at the price of being
    /// cryptographically transparent).
    pub full_diversity: bool,
    pub note: &'static str,
}

/// The five deliberately bad counter combinations, by name:
/// `index`, `counter_mode_f_of_i`, `f_of_i_plus_i`, `f_of_x_plus_i`,
/// `kitchen_sink`.
pub fn gallery(name: &str, space: StateSpace) -> Result<GalleryEntry> {
    let constant0 = FunctionTable::new(space, FnBackend::Constant(0))?;
    let negation = FunctionTable::negation(space);
    let entry = match name {
        "index" => GalleryEntry {
            name: "index",
            spec: GeneratorSpec::bad_mode(BadModeVariant::Index, constant0),
            max_total_diversity: None,
            full_diversity: true,
            note: "x_i = i: maximal diversity, no cryptographic quality",
        },
        "counter_mode_f_of_i" => GalleryEntry {
            name: "counter_mode_f_of_i",
            spec: GeneratorSpec::bad_mode(BadModeVariant::FOfI, constant0),
            max_total_diversity: Some(1),
            full_diversity: false,
            note: "x_i = f(i) with constant f: every produced state equals the constant",
        },
        "f_of_i_plus_i" => GalleryEntry {
            name: "f_of_i_plus_i",
            spec: GeneratorSpec::bad_mode(BadModeVariant::FOfIPlusI, negation),
            max_total_diversity: Some(1),
            full_diversity: false,
            note: "x_i = f(i)+i with f(x) = -x: every produced state is 0",
        },
        "f_of_x_plus_i" => GalleryEntry {
            name: "f_of_x_plus_i",
            spec: GeneratorSpec::bad_mode(BadModeVariant::FOfXPlusI, constant0),
            max_total_diversity: Some(1),
            full_diversity: false,
            note: "x_i = f(x_{i-1}+i) with constant f: collapses to the constant",
        },
        "kitchen_sink" => GalleryEntry {
            name: "kitchen_sink",
            spec: GeneratorSpec::bad_mode(BadModeVariant::KitchenSink, negation),
            max_total_diversity: Some(2),
            full_diversity: false,
            note: "x_i = f(x_{i-1}+i)+i with f(x) = -x: alternates s, -s",
        },
        other => return Err(Error::UnknownGallery(other.to_string())),
    };
    Ok(entry)
}

/// All gallery names, in presentation order.
pub const GALLERY_NAMES: [&str; 5] = [
    "index",
    "counter_mode_f_of_i",
    "f_of_i_plus_i",
    "f_of_x_plus_i",
    "kitchen_sink",
];
