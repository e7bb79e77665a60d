//! Textual system configuration: the shipped systems are selectable by name,
//! and edge shifts or custom gasket tables load from key = value files with
//! rationals written p/q, alphabets as comma-separated tokens, and adjacency
//! matrices as rows of 0/1.

use std::collections::BTreeMap;
use std::path::Path;

use crate::gasket::{CornerLabel, Gasket, GasketLabelTable};
use crate::shift_union::ShiftUnion;
use crate::solenoid::Solenoid;
use crate::symbolic::{EdgeShiftSpec, OneSidedShift};
use crate::system::SystemError;

pub const DEFAULT_GASKET_LEVEL: u32 = 9;

/// A constructed system ready for dispatch.
pub enum AnySystem {
    Shift(OneSidedShift),
    Union(ShiftUnion),
    Solenoid(Solenoid),
    Gasket(Box<Gasket>),
}

impl AnySystem {
    pub fn name(&self) -> &str {
        match self {
            AnySystem::Shift(s) => crate::system::System::name(s),
            AnySystem::Union(s) => crate::system::System::name(s),
            AnySystem::Solenoid(s) => crate::system::System::name(s),
            AnySystem::Gasket(s) => crate::system::System::name(s.as_ref()),
        }
    }
}

/// Run a closure generically over whichever system variant is inside.
#[macro_export]
macro_rules! with_system {
    ($any:expr, |$sys:ident| $body:expr) => {
        match $any {
            $crate::config::AnySystem::Shift($sys) => $body,
            $crate::config::AnySystem::Union($sys) => $body,
            $crate::config::AnySystem::Solenoid($sys) => $body,
            $crate::config::AnySystem::Gasket(boxed) => {
                let $sys = boxed.as_ref();
                $body
            }
        }
    };
}

/// Build a system from a selector: one of the shipped names
/// (fullshift2, goldenmean, example2, solenoid, gasket) or `config:<path>`.
pub fn system_from_selector(selector: &str) -> Result<AnySystem, SystemError> {
    match selector {
        "fullshift2" => Ok(AnySystem::Shift(OneSidedShift::full_shift_2())),
        "goldenmean" => Ok(AnySystem::Shift(OneSidedShift::golden_mean())),
        "example2" => Ok(AnySystem::Union(ShiftUnion::new())),
        "solenoid" => Ok(AnySystem::Solenoid(Solenoid::new())),
        "gasket" => Ok(AnySystem::Gasket(Box::new(Gasket::with_default_table(
            DEFAULT_GASKET_LEVEL,
        )))),
        other => {
            if let Some(path) = other.strip_prefix("config:") {
                system_from_file(Path::new(path))
            } else {
                Err(SystemError::InvalidConfig(format!(
                    "unknown system {other:?}; expected fullshift2|goldenmean|example2|solenoid|gasket or config:<path>"
                )))
            }
        }
    }
}

pub fn system_from_file(path: &Path) -> Result<AnySystem, SystemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SystemError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    system_from_config_text(&text)
}

/// Parse `key = value` lines ('#' starts a comment).
fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, SystemError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            SystemError::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn system_from_config_text(text: &str) -> Result<AnySystem, SystemError> {
    let map = parse_key_values(text)?;
    let kind = map
        .get("system")
        .ok_or_else(|| SystemError::InvalidConfig("missing `system =` line".into()))?
        .as_str();
    match kind {
        "fullshift2" | "goldenmean" | "example2" | "solenoid" => system_from_selector(kind),
        "edge-shift" => {
            let alphabet = map
                .get("alphabet")
                .ok_or_else(|| SystemError::InvalidConfig("edge-shift needs `alphabet`".into()))?;
            let symbols: Vec<u8> = alphabet
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    if tok.len() == 1 && tok.is_ascii() {
                        Ok(tok.as_bytes()[0])
                    } else {
                        Err(SystemError::InvalidConfig(format!(
                            "alphabet tokens must be single characters, got {tok:?}"
                        )))
                    }
                })
                .collect::<Result<_, _>>()?;
            let adjacency_text = map
                .get("adjacency")
                .ok_or_else(|| SystemError::InvalidConfig("edge-shift needs `adjacency`".into()))?;
            let adjacency: Vec<Vec<bool>> = adjacency_text
                .split(',')
                .map(|row| {
                    row.trim()
                        .bytes()
                        .map(|b| match b {
                            b'0' => Ok(false),
                            b'1' => Ok(true),
                            _ => Err(SystemError::InvalidConfig(format!(
                                "adjacency rows must be 0/1 strings, got {row:?}"
                            ))),
                        })
                        .collect()
                })
                .collect::<Result<_, _>>()?;
            let name = map.get("name").cloned().unwrap_or_else(|| "edge-shift".into());
            Ok(AnySystem::Shift(OneSidedShift::new(
                EdgeShiftSpec::new(symbols, adjacency)?,
                name,
            )))
        }
        "gasket" => {
            let level: u32 = map
                .get("level")
                .map(|s| s.parse().map_err(|_| SystemError::InvalidConfig("bad level".into())))
                .transpose()?
                .unwrap_or(DEFAULT_GASKET_LEVEL);
            let mut corners = [[CornerLabel::A; 3]; 6];
            let mut any_corner = false;
            for comp in 1..=6usize {
                if let Some(line) = map.get(&format!("corners.{comp}")) {
                    any_corner = true;
                    let labels: Vec<CornerLabel> = line
                        .split(',')
                        .map(|tok| {
                            CornerLabel::parse(tok).ok_or_else(|| {
                                SystemError::InvalidConfig(format!("bad corner label {tok:?}"))
                            })
                        })
                        .collect::<Result<_, _>>()?;
                    if labels.len() != 3 {
                        return Err(SystemError::InvalidConfig(format!(
                            "corners.{comp} needs exactly three labels"
                        )));
                    }
                    corners[comp - 1] = [labels[0], labels[1], labels[2]];
                } else if any_corner {
                    return Err(SystemError::InvalidConfig(format!(
                        "missing corners.{comp} (all six components need labels)"
                    )));
                }
            }
            let table = if any_corner {
                GasketLabelTable::from_corners(corners)?
            } else {
                GasketLabelTable::default()
            };
            Ok(AnySystem::Gasket(Box::new(Gasket::new(table, level)?)))
        }
        other => Err(SystemError::InvalidConfig(format!("unknown system kind {other:?}"))),
    }
}

/// Load an edge-shift adjacency from a file holding comma-separated 0/1 rows
/// (and optionally a full config); used by the conjugacy front end.
pub fn edge_shift_from_file(path: &Path) -> Result<EdgeShiftSpec, SystemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SystemError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    if text.contains('=') {
        match system_from_config_text(&text)? {
            AnySystem::Shift(s) => Ok(s.spec().clone()),
            _ => Err(SystemError::InvalidConfig(
                "config does not describe a shift of finite type".into(),
            )),
        }
    } else {
        // bare matrix rows; symbols default to 0, 1, 2, …
        let rows: Vec<&str> = text
            .split([',', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .collect();
        let n = rows.len();
        let symbols: Vec<u8> = (0..n as u8).map(|i| b'0' + i).collect();
        let adjacency: Vec<Vec<bool>> = rows
            .iter()
            .map(|row| {
                row.bytes()
                    .map(|b| match b {
                        b'0' => Ok(false),
                        b'1' => Ok(true),
                        _ => Err(SystemError::InvalidConfig(format!("bad row {row:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        EdgeShiftSpec::new(symbols, adjacency)
    }
}
