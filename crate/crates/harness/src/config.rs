//! Plain-text run configuration: `key = value` lines under `[run]` and
//! `[E1]` … `[E7]` section headers. Keys left out keep the desk-scale
//! defaults of [`ExperimentSpec::default_for`].
//!
//! ```text
//! [run]
//! seed = 20240601
//! out = results
//!
//! [E1]
//! data = random_besov
//! s = 0.5
//! ladder = 1e-2, 5e-3, 2e-3, 1e-3, 5e-4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::error::{config_error, Result};
use crate::spec::{ExperimentId, ExperimentSpec, InitialData, ViscosityLadder};

pub const DEFAULT_SEED: u64 = 20_240_601;

const DATA_KEYS: [&str; 7] = ["data", "s", "kmax", "mode", "radius", "iterations", "mollify"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    /// Frozen-constants file; the built-in one when absent.
    pub constants: Option<PathBuf>,
    sections: BTreeMap<ExperimentId, Vec<(String, String)>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            out: PathBuf::from("results"),
            threads: None,
            constants: None,
            sections: BTreeMap::new(),
        }
    }
}

fn parse_value<T: FromStr>(section: &str, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| config_error(section, key, format!("cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(section: &str, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(section, key, s))
        .collect()
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(config_error(section, key, format!("expected a boolean, got `{v}`"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text)?;
        let mut cfg = Self::default();
        for (section, props) in ini.iter() {
            let Some(name) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(config_error("", k, "keys must follow a section header"));
                }
                continue;
            };
            if name.eq_ignore_ascii_case("run") {
                for (k, v) in props.iter() {
                    match k {
                        "seed" => cfg.seed = parse_value(name, k, v)?,
                        "out" => cfg.out = PathBuf::from(v.trim()),
                        "threads" => cfg.threads = Some(parse_value(name, k, v)?),
                        "constants" => cfg.constants = Some(PathBuf::from(v.trim())),
                        _ => return Err(config_error(name, k, "unknown key")),
                    }
                }
                continue;
            }
            let id: ExperimentId = name.parse()?;
            let pairs: Vec<(String, String)> = props.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            // validate eagerly so errors surface at load time
            apply(&mut ExperimentSpec::default_for(id, cfg.seed), name, &pairs)?;
            cfg.sections.entry(id).or_default().extend(pairs);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Experiments named in the file, in order.
    pub fn configured(&self) -> Vec<ExperimentId> {
        self.sections.keys().copied().collect()
    }

    /// Fully resolved spec of one experiment.
    pub fn spec(&self, id: ExperimentId) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default_for(id, self.seed);
        spec.out = self.out.join(id.label());
        if let Some(pairs) = self.sections.get(&id) {
            apply(&mut spec, id.label(), pairs)?;
        }
        Ok(spec)
    }
}

fn parse_data(section: &str, pairs: &[(String, String)], current: &InitialData) -> Result<InitialData> {
    let get = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let num = |key: &str, default: f64| get(key).map_or(Ok(default), |v| parse_value(section, key, v));
    let mollify = get("mollify").map(|v| parse_value(section, "mollify", v)).transpose()?;
    let s_default = current.nominal_s().unwrap_or(0.5);
    Ok(match get("data") {
        None => match get("s") {
            Some(v) => current.with_s(parse_value(section, "s", v)?),
            None => current.clone(),
        },
        Some(name) => match name.trim() {
            "eigenmode" => InitialData::Eigenmode {
                mode: get("mode").map_or(Ok(3), |v| parse_value(section, "mode", v))?,
            },
            "taylor_green" => InitialData::TaylorGreen,
            "random_besov" => InitialData::RandomBesov { s: num("s", s_default)? },
            "random_band" => InitialData::RandomBand {
                s: num("s", s_default)?,
                kmax: get("kmax").map_or(Ok(8), |v| parse_value(section, "kmax", v))?,
            },
            "disk" => InitialData::Disk {
                radius: num("radius", 1.0)?,
                mollify,
            },
            "koch" => InitialData::Koch {
                iterations: get("iterations").map_or(Ok(5), |v| parse_value(section, "iterations", v))?,
                mollify,
            },
            other => return Err(config_error(section, "data", format!("unknown initial data `{other}`"))),
        },
    })
}

fn apply(spec: &mut ExperimentSpec, section: &str, pairs: &[(String, String)]) -> Result<()> {
    for (k, v) in pairs {
        let (k, v) = (k.as_str(), v.as_str());
        match k {
            _ if DATA_KEYS.contains(&k) => {}
            "n" => spec.n = parse_value(section, k, v)?,
            "dt" => spec.dt = parse_value(section, k, v)?,
            "t_end" => spec.t_end = parse_value(section, k, v)?,
            "stride" => spec.stride = parse_value(section, k, v)?,
            "ladder" => {
                spec.ladder =
                    ViscosityLadder::new(parse_list(section, k, v)?).map_err(|e| config_error(section, k, e.to_string()))?
            }
            "p" => spec.p_list = parse_list(section, k, v)?,
            "seed" => spec.seed = parse_value(section, k, v)?,
            "out" => spec.out = PathBuf::from(v.trim()),
            "guard" => spec.guard = parse_bool(section, k, v)?,
            "convergence_only" => spec.convergence_only = parse_bool(section, k, v)?,
            "s_list" => spec.s_list = parse_list(section, k, v)?,
            "deltas" => spec.deltas = parse_list(section, k, v)?,
            "horizons" => spec.horizons = parse_list(section, k, v)?,
            "corpus_size" => spec.corpus_size = parse_value(section, k, v)?,
            "pair_count" => spec.pair_count = parse_value(section, k, v)?,
            "nu" => spec.nu = parse_value(section, k, v)?,
            "realizations" => spec.realizations = parse_value(section, k, v)?,
            "fdr_realizations" => spec.fdr_realizations = parse_value(section, k, v)?,
            "flow_dt" => spec.flow_dt = parse_value(section, k, v)?,
            "eval_points" => spec.eval_points = parse_value(section, k, v)?,
            "subgrid" => spec.subgrid = parse_value(section, k, v)?,
            _ => return Err(config_error(section, k, "unknown key")),
        }
    }
    spec.data = parse_data(section, pairs, &spec.data)?;
    if spec.stride == 0 {
        return Err(config_error(section, "stride", "must be at least 1"));
    }
    if spec.p_list.iter().any(|&p| !(p >= 1.0)) {
        return Err(config_error(section, "p", "exponents must be >= 1"));
    }
    Ok(())
}
