//! Plain-text key/value context configuration.
//!
//! ```text
//! version = 1
//! rank = 2
//! matrix = 1 1 -1 1        # row-major
//! moduli = 0 0             # optional; 0 marks a free coordinate
//! max_depth = 24
//! enum_cap = 1000000
//! declared_pure = false
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_MAX_DEPTH: u32 = 24;
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoConfig {
    pub rank: usize,
    pub matrix: IntMatrix,
    /// One entry per coordinate; `0` is a free `Z` factor, `m > 0` is `Z/m`.
    pub moduli: Option<Vec<BigInt>>,
    pub max_depth: u32,
    pub enum_cap: usize,
    pub declared_pure: bool,
}

impl EndoConfig {
    pub fn new(matrix: IntMatrix) -> Self {
        EndoConfig {
            rank: matrix.len(),
            matrix,
            moduli: None,
            max_depth: DEFAULT_MAX_DEPTH,
            enum_cap: DEFAULT_ENUM_CAP,
            declared_pure: false,
        }
    }

    /// `x ↦ k·x` on `Z`.
    pub fn scalar(k: i64) -> Self {
        EndoConfig::new(vec![vec![BigInt::from(k)]])
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        EndoConfig::new(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn with_moduli(mut self, moduli: &[i64]) -> Self {
        self.moduli = Some(moduli.iter().map(|&m| BigInt::from(m)).collect());
        self
    }

    pub fn with_max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn with_enum_cap(mut self, cap: usize) -> Self {
        self.enum_cap = cap;
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let mut rank = None;
        let mut matrix = None;
        let mut moduli = None;
        let mut max_depth = DEFAULT_MAX_DEPTH;
        let mut enum_cap = DEFAULT_ENUM_CAP;
        let mut declared_pure = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: invalid {what}: `{value}`", lineno + 1));
            match key {
                "version" => version = Some(value.parse::<u32>().map_err(|_| bad("version"))?),
                "rank" => rank = Some(value.parse::<usize>().map_err(|_| bad("rank"))?),
                "matrix" => matrix = Some(parse_ints(value).ok_or_else(|| bad("matrix"))?),
                "moduli" => moduli = Some(parse_ints(value).ok_or_else(|| bad("moduli"))?),
                "max_depth" => max_depth = value.parse().map_err(|_| bad("max_depth"))?,
                "enum_cap" => enum_cap = value.parse().map_err(|_| bad("enum_cap"))?,
                "declared_pure" => declared_pure = value.parse().map_err(|_| bad("declared_pure"))?,
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }

        if let Some(v) = version {
            if v != CONFIG_VERSION {
                return Err(Error::Config(format!("unsupported config version {v}")));
            }
        }
        let rank = rank.ok_or_else(|| Error::Config("missing key `rank`".into()))?;
        if rank == 0 {
            return Err(Error::Config("rank must be positive".into()));
        }
        let flat = matrix.ok_or_else(|| Error::Config("missing key `matrix`".into()))?;
        if flat.len() != rank * rank {
            return Err(Error::Config(format!("matrix needs {} entries, found {}", rank * rank, flat.len())));
        }
        let matrix = flat.chunks(rank).map(|c| c.to_vec()).collect();
        if let Some(m) = &moduli {
            if m.len() != rank {
                return Err(Error::Config(format!("moduli needs {rank} entries, found {}", m.len())));
            }
            if m.iter().any(|v| v < &BigInt::from(0)) {
                return Err(Error::Config("moduli must be non-negative".into()));
            }
        }
        if max_depth == 0 {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        Ok(EndoConfig { rank, matrix, moduli, max_depth, enum_cap, declared_pure })
    }

    pub fn to_text(&self) -> String {
        let join = |xs: &mut dyn Iterator<Item = &BigInt>| xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("version = {CONFIG_VERSION}\nrank = {}\n", self.rank);
        out += &format!("matrix = {}\n", join(&mut self.matrix.iter().flatten()));
        if let Some(m) = &self.moduli {
            out += &format!("moduli = {}\n", join(&mut m.iter()));
        }
        out += &format!(
            "max_depth = {}\nenum_cap = {}\ndeclared_pure = {}\n",
            self.max_depth, self.enum_cap, self.declared_pure
        );
        out
    }
}

fn parse_ints(s: &str) -> Option<Vec<BigInt>> {
    s.split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']' || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().ok())
        .collect()
}
