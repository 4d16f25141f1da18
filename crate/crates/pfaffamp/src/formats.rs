//! JSON state and basis files, and the compact basis syntax of the CLI.
//!
//! State file: `{"kind":"matrix","L":4,"entries":[[i,j,re,im],...]}` with
//! 0-based sites. Entries are normally strictly upper (`i < j`); a lower
//! entry fills in its partner, and listing both halves requires
//! `r_ji = -r_ij`. Unlisted entries are 0. An optional `"base"` string of
//! `0`/`1` gives a non-vacuum base configuration.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use pfaffamp_core::{Complex64, FermionConfiguration, GaussianPureState, PauliBasis, SiteAngles, SkewMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub kind: String,
    #[serde(rename = "L")]
    pub len: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
}

impl StateFile {
    pub fn from_state(state: &GaussianPureState) -> Self {
        let l = state.len();
        let r = state.r_matrix();
        let mut entries = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                let v = r.get(i, j);
                if v != Complex64::new(0.0, 0.0) {
                    entries.push((i, j, v.re, v.im));
                }
            }
        }
        let base = (!state.is_vacuum_based()).then(|| state.base_config().to_string());
        StateFile { kind: "matrix".into(), len: l, entries, base }
    }

    pub fn to_state(&self) -> Result<GaussianPureState> {
        if self.kind != "matrix" {
            return Err(CliError::Usage(format!("unknown state kind {:?}, expected \"matrix\"", self.kind)));
        }
        let l = self.len;
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(l, l);
        let mut given = vec![false; l * l];
        for &(i, j, re, im) in &self.entries {
            if i >= l || j >= l {
                return Err(pfaffamp_core::Error::IndexOutOfRange { index: i.max(j), dim: l }.into());
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(CliError::Usage(format!("entry ({i},{j}) is not finite")));
            }
            if given[i * l + j] {
                return Err(CliError::Usage(format!("entry ({i},{j}) listed twice")));
            }
            given[i * l + j] = true;
            m[(i, j)] = Complex64::new(re, im);
        }
        for i in 0..l {
            for j in 0..l {
                if given[i * l + j] && !given[j * l + i] {
                    m[(j, i)] = -m[(i, j)];
                }
            }
        }
        let r = SkewMatrix::new(m)?;
        match &self.base {
            None => Ok(GaussianPureState::new(r)),
            Some(text) => {
                let bits = text
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .enumerate()
                    .map(|(position, c)| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        found => Err(pfaffamp_core::Error::Parse { position, found }),
                    })
                    .collect::<std::result::Result<Vec<bool>, _>>()?;
                Ok(GaussianPureState::with_base(r, FermionConfiguration::new(bits))?)
            }
        }
    }
}

pub fn load_state(path: &Path) -> Result<GaussianPureState> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: StateFile = serde_json::from_str(&text)?;
    file.to_state()
}

pub fn save_state(path: &Path, state: &GaussianPureState) -> Result<()> {
    let mut text = serde_json::to_string(&StateFile::from_state(state))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `{"uniform":{"phi":..,"theta":..,"alpha":..}}` or
/// `{"per_site":[[phi,theta,alpha],...]}`, radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisFile {
    Uniform {
        phi: f64,
        theta: f64,
        #[serde(default)]
        alpha: f64,
    },
    PerSite(Vec<[f64; 3]>),
}

impl BasisFile {
    /// The basis on `len` sites, angles scaled by `unit` and reduced mod 2pi.
    pub fn to_basis(&self, len: usize, unit: f64) -> Result<PauliBasis> {
        let scale = |a: f64, b: f64, c: f64| SiteAngles::new(a * unit, b * unit, c * unit).canonical();
        match self {
            BasisFile::Uniform { phi, theta, alpha } => Ok(PauliBasis::uniform(len, scale(*phi, *theta, *alpha))),
            BasisFile::PerSite(sites) => {
                if sites.len() != len {
                    return Err(pfaffamp_core::Error::LengthMismatch { expected: len, found: sites.len() }.into());
                }
                Ok(PauliBasis::per_site(sites.iter().map(|s| scale(s[0], s[1], s[2])).collect()))
            }
        }
    }
}

fn numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: {t:?}"))))
        .collect()
}

fn triple(text: &str) -> Result<[f64; 3]> {
    match numbers(text)?.as_slice() {
        [phi, theta] => Ok([*phi, *theta, 0.0]),
        [phi, theta, alpha] => Ok([*phi, *theta, *alpha]),
        _ => Err(CliError::Usage(format!("expected phi,theta[,alpha], got {text:?}"))),
    }
}

/// Parses the `--basis` argument:
///
/// * `z`, `x`, `y`: the Pauli axes;
/// * `uniform:PHI,THETA[,ALPHA]`: one basis on every site;
/// * `per-site:P,T,A;P,T,A;...`: one triple per site;
/// * `@FILE` or a path ending in `.json`: a JSON basis file.
///
/// Numbers are radians, or degrees when `degrees` is set. Angles are reduced
/// mod 2pi.
pub fn parse_basis(spec: &str, len: usize, degrees: bool) -> Result<PauliBasis> {
    let unit = if degrees { PI / 180.0 } else { 1.0 };
    let spec = spec.trim();
    let lower = spec.to_ascii_lowercase();
    let file = spec.strip_prefix('@').or_else(|| lower.ends_with(".json").then_some(spec));
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let parsed: BasisFile = serde_json::from_str(&text)?;
        return parsed.to_basis(len, unit);
    }
    match lower.as_str() {
        "z" => return Ok(PauliBasis::uniform(len, SiteAngles::Z)),
        "x" => return Ok(PauliBasis::uniform(len, SiteAngles::X)),
        "y" => return Ok(PauliBasis::uniform(len, SiteAngles::new(FRAC_PI_2, FRAC_PI_2, 0.0))),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("uniform:") {
        let [p, t, a] = triple(rest)?;
        return BasisFile::Uniform { phi: p, theta: t, alpha: a }.to_basis(len, unit);
    }
    if let Some(rest) = spec.strip_prefix("per-site:") {
        let sites = rest.split(';').filter(|s| !s.trim().is_empty()).map(triple).collect::<Result<Vec<_>>>()?;
        return BasisFile::PerSite(sites).to_basis(len, unit);
    }
    Err(CliError::Usage(format!(
        "unrecognised basis {spec:?}; use z, x, y, uniform:PHI,THETA[,ALPHA], per-site:..., or @FILE.json"
    )))
}
