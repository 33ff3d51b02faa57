//! JSON configuration model and its resolution into core types.
//!
//! Generator specs may be given inline or reference table files; everything
//! the CLI writes uses the same schemas, so emitted files parse back with
//! identical semantics.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use divgen::genkit::{
    table_from_bytes, table_from_json, AssistSource, BadModeVariant, FunctionTable, GeneratorSpec,
    OutputFunction, TABLE_MAGIC,
};
use divgen::{LatinOp, StateSpace};

use crate::CliError;

/// Top-level run configuration; command-line flags override file fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub generator: Option<GeneratorConfig>,
    pub seed: Option<u64>,
    pub length: Option<usize>,
    pub format: Option<OutputFormat>,
    pub rng_seed: Option<u64>,
    pub kmax: Option<usize>,
    #[serde(default)]
    pub guards: Guards,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guards {
    /// Max n for exhaustive per-seed analyses.
    pub exhaustive_n: Option<u64>,
    /// Max materialized run length.
    pub run_length: Option<usize>,
    /// Max n for the O(n²) Latin validation sweep.
    pub validate_n: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
    RawBinary,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorConfig {
    Iterative {
        n: u64,
        f: FnConfig,
        #[serde(default)]
        g: Option<OutConfig>,
    },
    CounterMode {
        n: u64,
        s: u64,
        #[serde(default)]
        op: Option<OpConfig>,
        #[serde(default)]
        counter_start: u64,
        #[serde(default)]
        g: Option<OutConfig>,
    },
    CounterAssisted {
        n: u64,
        f: FnConfig,
        #[serde(default)]
        op: Option<OpConfig>,
        #[serde(default)]
        counter_start: u64,
        #[serde(default)]
        g: Option<OutConfig>,
    },
    SequenceAssisted {
        n: u64,
        f: FnConfig,
        assist: AssistConfig,
        #[serde(default)]
        op: Option<OpConfig>,
        #[serde(default)]
        g: Option<OutConfig>,
    },
    Cascade {
        n: u64,
        f: FnConfig,
        inner: Box<GeneratorConfig>,
        inner_seed: u64,
        #[serde(default)]
        op: Option<OpConfig>,
        #[serde(default)]
        g: Option<OutConfig>,
    },
    BadMode {
        n: u64,
        variant: BadModeName,
        f: FnConfig,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadModeName {
    Index,
    FOfI,
    FOfIPlusI,
    FOfXPlusI,
    KitchenSink,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnConfig {
    Table { entries: Vec<u64> },
    File { path: PathBuf },
    Constant { value: u64 },
    Negation,
    Affine { mul: u64, add: u64 },
    Mixer { key: String, rounds: u32 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutConfig {
    Identity,
    Truncate { bits: u32 },
    Table { output_size: u64, entries: Vec<u64> },
    Mixer { output_size: u64, key: String, rounds: u32 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OpConfig {
    Named(OpName),
    Conjugated {
        base: OpName,
        pre_left: Vec<u64>,
        pre_right: Vec<u64>,
        post: Vec<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum OpName {
    Add,
    Sub,
    Xor,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssistConfig {
    Explicit { values: Vec<u64> },
    Generator { seed: u64, generator: Box<GeneratorConfig> },
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_hex_key(key: &str) -> Result<Vec<u8>, CliError> {
    let key = key.trim();
    if key.is_empty() || key.len() % 2 != 0 {
        return Err(config_err(format!(
            "mixer key must be a non-empty even-length hex string, got {key:?}"
        )));
    }
    (0..key.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&key[i..i + 2], 16)
                .map_err(|_| config_err(format!("mixer key is not hex: {key:?}")))
        })
        .collect()
}

impl OpName {
    pub fn to_op(self) -> LatinOp {
        match self {
            OpName::Add => LatinOp::AddMod,
            OpName::Sub => LatinOp::SubMod,
            OpName::Xor => LatinOp::Xor,
        }
    }
}

impl OpConfig {
    pub fn resolve(&self) -> Result<LatinOp, CliError> {
        match self {
            OpConfig::Named(name) => Ok(name.to_op()),
            OpConfig::Conjugated {
                base,
                pre_left,
                pre_right,
                post,
            } => LatinOp::conjugated(
                base.to_op(),
                pre_left.clone(),
                pre_right.clone(),
                post.clone(),
            )
            .map_err(|e| config_err(e.to_string())),
        }
    }
}

/// Reads a table file in either the JSON or the binary format, deciding by
/// the magic bytes.
pub fn load_table_file(path: &Path) -> Result<FunctionTable, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| config_err(format!("cannot read table file {}: {e}", path.display())))?;
    let table = if bytes.starts_with(TABLE_MAGIC) {
        table_from_bytes(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| config_err(format!("{} is neither FTBL nor JSON", path.display())))?;
        table_from_json(text)
    };
    table.map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl FnConfig {
    pub fn resolve(&self, space: StateSpace) -> Result<FunctionTable, CliError> {
        let built = match self {
            FnConfig::Table { entries } => FunctionTable::table(space, entries.clone())
                .map_err(|e| config_err(format!("field `f.entries`: {e}")))?,
            FnConfig::File { path } => {
                let table = load_table_file(path)?;
                if table.n() != space.n() {
                    return Err(config_err(format!(
                        "table file {} has n={} but the generator has n={}",
                        path.display(),
                        table.n(),
                        space.n()
                    )));
                }
                table
            }
            FnConfig::Constant { value } => FunctionTable::constant(space, *value)
                .map_err(|e| config_err(format!("field `f.value`: {e}")))?,
            FnConfig::Negation => FunctionTable::negation(space),
            FnConfig::Affine { mul, add } => FunctionTable::affine(space, *mul, *add)
                .map_err(|e| config_err(format!("field `f`: {e}")))?,
            FnConfig::Mixer { key, rounds } => {
                FunctionTable::keyed_mixer(space, parse_hex_key(key)?, *rounds)
                    .map_err(|e| config_err(format!("field `f`: {e}")))?
            }
        };
        Ok(built)
    }
}

impl OutConfig {
    pub fn resolve(&self, space: StateSpace) -> Result<OutputFunction, CliError> {
        let built = match self {
            OutConfig::Identity => OutputFunction::identity(space),
            OutConfig::Truncate { bits } => OutputFunction::truncate(space, *bits)
                .map_err(|e| config_err(format!("field `g.bits`: {e}")))?,
            OutConfig::Table { output_size, entries } => {
                OutputFunction::table(space, *output_size, entries.clone())
                    .map_err(|e| config_err(format!("field `g.entries`: {e}")))?
            }
            OutConfig::Mixer { output_size, key, rounds } => {
                OutputFunction::keyed_mixer(space, *output_size, parse_hex_key(key)?, *rounds)
                    .map_err(|e| config_err(format!("field `g`: {e}")))?
            }
        };
        Ok(built)
    }
}

fn out_or_identity(g: &Option<OutConfig>, space: StateSpace) -> Result<OutputFunction, CliError> {
    match g {
        Some(cfg) => cfg.resolve(space),
        None => Ok(OutputFunction::identity(space)),
    }
}

fn op_or_add(op: &Option<OpConfig>) -> Result<LatinOp, CliError> {
    match op {
        Some(cfg) => cfg.resolve(),
        None => Ok(LatinOp::AddMod),
    }
}

impl GeneratorConfig {
    pub fn resolve(&self) -> Result<GeneratorSpec, CliError> {
        let spec = match self {
            GeneratorConfig::Iterative { n, f, g } => {
                let space = space_of(*n)?;
                GeneratorSpec::iterative(f.resolve(space)?, out_or_identity(g, space)?)
            }
            GeneratorConfig::CounterMode { n, s, op, counter_start, g } => {
                let space = space_of(*n)?;
                GeneratorSpec::counter_mode(
                    out_or_identity(g, space)?,
                    op_or_add(op)?,
                    *s,
                    *counter_start,
                )
            }
            GeneratorConfig::CounterAssisted { n, f, op, counter_start, g } => {
                let space = space_of(*n)?;
                GeneratorSpec::counter_assisted(
                    f.resolve(space)?,
                    out_or_identity(g, space)?,
                    op_or_add(op)?,
                    *counter_start,
                )
            }
            GeneratorConfig::SequenceAssisted { n, f, assist, op, g } => {
                let space = space_of(*n)?;
                let assist = match assist {
                    AssistConfig::Explicit { values } => AssistSource::Explicit(values.clone()),
                    AssistConfig::Generator { seed, generator } => AssistSource::Generator {
                        spec: Box::new(generator.resolve()?),
                        seed: *seed,
                    },
                };
                GeneratorSpec::sequence_assisted(
                    f.resolve(space)?,
                    out_or_identity(g, space)?,
                    op_or_add(op)?,
                    assist,
                )
            }
            GeneratorConfig::Cascade { n, f, inner, inner_seed, op, g } => {
                let space = space_of(*n)?;
                GeneratorSpec::cascade(
                    f.resolve(space)?,
                    out_or_identity(g, space)?,
                    op_or_add(op)?,
                    inner.resolve()?,
                    *inner_seed,
                )
            }
            GeneratorConfig::BadMode { n, variant, f } => {
                let space = space_of(*n)?;
                let variant = match variant {
                    BadModeName::Index => BadModeVariant::Index,
                    BadModeName::FOfI => BadModeVariant::FOfI,
                    BadModeName::FOfIPlusI => BadModeVariant::FOfIPlusI,
                    BadModeName::FOfXPlusI => BadModeVariant::FOfXPlusI,
                    BadModeName::KitchenSink => BadModeVariant::KitchenSink,
                };
                return Ok(GeneratorSpec::bad_mode(variant, f.resolve(space)?));
            }
        };
        spec.map_err(|e| config_err(e.to_string()))
    }
}

fn space_of(n: u64) -> Result<StateSpace, CliError> {
    StateSpace::auto(n).map_err(|e| config_err(format!("field `n`: {e}")))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| config_err(format!("config {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| config_err(format!("inline config: {e}")))
    }

    /// Parses a bare generator object as a full config.
    pub fn from_generator_json(text: &str) -> Result<Self, CliError> {
        let generator: GeneratorConfig =
            serde_json::from_str(text).map_err(|e| config_err(format!("inline spec: {e}")))?;
        Ok(RunConfig {
            generator: Some(generator),
            ..Default::default()
        })
    }
}
