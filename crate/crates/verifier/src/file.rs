//! The JSON instance format and module literals.
//!
//! ```json
//! {
//!   "ring": {"nprime": 8, "n": 4},
//!   "modules": {"M": {"gens": 1, "relations": [[2]]}, "T": {"gens": 1, "relations": []}},
//!   "maps": {"f": {"source": "T", "target": "M", "matrix": [[1]]}},
//!   "covers": [{"target": "M", "family": ["f"]}],
//!   "two_extensions": {"xi": ["a", "b", "c"]}
//! }
//! ```
//!
//! Modules and maps live over `Z/N`. Matrices are row-major with one row
//! per source generator and residues in `[0, N)`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use sqz_core::butterfly::TwoExtension;
use sqz_core::cech::Cover;
use sqz_core::linalg::Modulus;
use sqz_core::squarezero::SquareZeroPair;
use sqz_core::{FPModule, ModuleMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub nprime: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub gens: usize,
    #[serde(default)]
    pub relations: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub target: String,
    pub family: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub ring: RingSpec,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub covers: Vec<CoverSpec>,
    #[serde(default)]
    pub two_extensions: BTreeMap<String, [String; 3]>,
}

/// Problems reading user input, as opposed to verification failures.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {origin}: {source}")]
    Json {
        origin: String,
        source: serde_json::Error,
    },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("bad literal `{0}`")]
    Literal(String),
    #[error(transparent)]
    Algebra(#[from] sqz_core::Error),
}

pub type InputResult<T> = std::result::Result<T, InputError>;

/// A parsed instance file with modules and maps resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub pair: SquareZeroPair,
    pub modules: BTreeMap<String, FPModule>,
    pub maps: BTreeMap<String, ModuleMap>,
    pub covers: Vec<Cover>,
    pub two_extensions: BTreeMap<String, TwoExtension>,
}

impl ModuleSpec {
    pub fn build(&self, modulus: Modulus) -> sqz_core::Result<FPModule> {
        FPModule::from_relations(modulus, self.gens, &self.relations)
    }
}

impl InstanceFile {
    pub fn load(path: &Path) -> InputResult<Self> {
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|source| InputError::Json {
            origin: path.display().to_string(),
            source,
        })
    }

    pub fn resolve(&self) -> InputResult<Resolved> {
        let pair = SquareZeroPair::new(self.ring.nprime, self.ring.n)?;
        let zn = pair.n();
        let modules = self
            .modules
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.build(zn)?)))
            .collect::<InputResult<BTreeMap<_, _>>>()?;
        let module = |name: &str| {
            modules.get(name).cloned().ok_or_else(|| InputError::Unknown {
                kind: "module",
                name: name.into(),
            })
        };
        let mut maps = BTreeMap::new();
        for (k, v) in &self.maps {
            let f = ModuleMap::from_rows(module(&v.source)?, module(&v.target)?, &v.matrix)?;
            maps.insert(k.clone(), f);
        }
        let map = |name: &str| {
            maps.get(name).cloned().ok_or_else(|| InputError::Unknown {
                kind: "map",
                name: name.into(),
            })
        };
        let covers = self
            .covers
            .iter()
            .map(|c| {
                let family = c.family.iter().map(|f| map(f)).collect::<InputResult<Vec<_>>>()?;
                Ok(Cover::new(&module(&c.target)?, family)?)
            })
            .collect::<InputResult<Vec<_>>>()?;
        let two_extensions = self
            .two_extensions
            .iter()
            .map(|(k, [a, b, c])| Ok((k.clone(), TwoExtension::new(map(a)?, map(b)?, map(c)?)?)))
            .collect::<InputResult<BTreeMap<_, _>>>()?;
        Ok(Resolved {
            pair,
            modules,
            maps,
            covers,
            two_extensions,
        })
    }
}

fn read(path: &Path) -> InputResult<String> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A module given as a file holding `{"gens", "relations"}`, the same JSON
/// inline, or a sum of cyclic modules written `Z/2+Z/4`, `2+4` or `2,4`.
/// `0` is the zero module.
pub fn parse_module(text: &str, modulus: Modulus) -> InputResult<FPModule> {
    let t = text.trim();
    if t.starts_with('{') {
        let spec: ModuleSpec = serde_json::from_str(t).map_err(|source| InputError::Json {
            origin: "module literal".into(),
            source,
        })?;
        return Ok(spec.build(modulus)?);
    }
    if t == "0" {
        return Ok(FPModule::zero(modulus));
    }
    let parts: Option<Vec<u64>> = t
        .split(['+', ','])
        .map(|p| p.trim().trim_start_matches("Z/").parse().ok())
        .collect();
    match parts {
        Some(orders) if !orders.is_empty() => Ok(FPModule::from_orders(modulus, &orders)?),
        _ => {
            let path = Path::new(t);
            if path.exists() {
                parse_module(&read(path)?, modulus)
            } else {
                Err(InputError::Literal(t.into()))
            }
        }
    }
}

/// A matrix as a JSON array of rows, inline or in a file.
pub fn parse_matrix(text: &str) -> InputResult<Vec<Vec<u64>>> {
    let t = text.trim();
    let body = if t.starts_with('[') {
        t.to_string()
    } else {
        read(Path::new(t))?
    };
    serde_json::from_str(&body).map_err(|source| InputError::Json {
        origin: "matrix".into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn literals() {
        let a = parse_module("Z/2+Z/4", z(4)).unwrap();
        assert_eq!(a.invariant_factors(), vec![2, 4]);
        assert_eq!(parse_module("2,4", z(4)).unwrap(), a);
        let b = parse_module(r#"{"gens": 1, "relations": [[2]]}"#, z(4)).unwrap();
        assert_eq!(b.order(), 2);
        assert!(parse_module("0", z(4)).unwrap().is_zero());
        assert!(matches!(parse_module("Z/3", z(4)), Err(InputError::Algebra(_))));
        assert!(matches!(parse_module("nonsense", z(4)), Err(InputError::Literal(_))));
    }

    #[test]
    fn instance_file_round_trip() {
        let text = r#"{
            "ring": {"nprime": 8, "n": 4},
            "modules": {"M": {"gens": 1, "relations": [[2]]}, "T": {"gens": 1}},
            "maps": {"f": {"source": "T", "target": "M", "matrix": [[1]]}},
            "covers": [{"target": "M", "family": ["f"]}]
        }"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        let r = f.resolve().unwrap();
        assert_eq!(r.covers.len(), 1);
        assert_eq!(r.modules["T"].order(), 4);
        let again: InstanceFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn unknown_names_and_bad_pairs() {
        let text = r#"{"ring": {"nprime": 8, "n": 4}, "covers": [{"target": "M", "family": []}]}"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.resolve(), Err(InputError::Unknown { kind: "module", .. })));
        let bad: InstanceFile = serde_json::from_str(r#"{"ring": {"nprime": 8, "n": 2}}"#).unwrap();
        assert!(matches!(
            bad.resolve(),
            Err(InputError::Algebra(sqz_core::Error::NotSquareZero { .. }))
        ));
    }
}
