//! Prior and probe specifications: command-line keywords and JSON input files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use optiphase_core::{CMatrix, CircularPrior, DensityMatrix, ProbeState};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Value of `--prior`.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorArg {
    Diffusive,
    Uniform,
    FourierFile(PathBuf),
}

impl FromStr for PriorArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diffusive" => Ok(PriorArg::Diffusive),
            "uniform" => Ok(PriorArg::Uniform),
            _ => match s.strip_prefix("fourier-file:") {
                Some(p) if !p.is_empty() => Ok(PriorArg::FourierFile(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown prior '{s}' (expected diffusive, uniform or fourier-file:<path>)"
                )),
            },
        }
    }
}

/// Value of `--state` (and of each entry of `--states`).
#[derive(Clone, Debug, PartialEq)]
pub enum StateArg {
    Noon,
    Bw,
    Binomial,
    Flat,
    Optimal,
    File(PathBuf),
}

impl FromStr for StateArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "noon" => Ok(StateArg::Noon),
            "bw" => Ok(StateArg::Bw),
            "binomial" => Ok(StateArg::Binomial),
            "flat" => Ok(StateArg::Flat),
            "optimal" => Ok(StateArg::Optimal),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(StateArg::File(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown state '{s}' (expected noon, bw, binomial, flat, optimal or file:<path>)"
                )),
            },
        }
    }
}

impl fmt::Display for StateArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateArg::Noon => f.write_str("noon"),
            StateArg::Bw => f.write_str("bw"),
            StateArg::Binomial => f.write_str("binomial"),
            StateArg::Flat => f.write_str("flat"),
            StateArg::Optimal => f.write_str("optimal"),
            StateArg::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Contents of a `fourier-file:` prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PriorFile {
    Uniform,
    Diffusive {
        t: f64,
        #[serde(default = "default_prior_tol")]
        tol: f64,
    },
    /// `coeffs[k] = p_k` for `k >= 0`; negative orders follow by conjugation.
    Fourier {
        coeffs: Vec<Pair>,
    },
}

fn default_prior_tol() -> f64 {
    optiphase_core::prior::DEFAULT_TRUNCATION_TOL
}

/// Contents of a `file:` state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Noon {
        n: usize,
    },
    Bw {
        n: usize,
    },
    Binomial {
        n: usize,
    },
    Flat {
        n: usize,
    },
    Amplitudes {
        values: Vec<Pair>,
    },
    /// Row-major density matrix.
    Density {
        matrix: Vec<Vec<Pair>>,
    },
}

/// A probe that is either pure or mixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Probe {
    Pure(ProbeState),
    Mixed(DensityMatrix),
}

impl Probe {
    pub fn photon_number(&self) -> usize {
        match self {
            Probe::Pure(s) => s.photon_number(),
            Probe::Mixed(r) => r.photon_number(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            Probe::Pure(s) => s.to_density(),
            Probe::Mixed(r) => r.clone(),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Builds the prior named by `--prior`, `--t` and `--prior-tol`.
pub fn build_prior(arg: &PriorArg, t: Option<f64>, tol: f64) -> Result<CircularPrior> {
    match arg {
        PriorArg::Uniform => Ok(CircularPrior::uniform()),
        PriorArg::Diffusive => {
            let t = t.ok_or_else(|| CliError::Usage("--prior diffusive needs --t".into()))?;
            CircularPrior::diffusive(t, tol).map_err(CliError::Input)
        }
        PriorArg::FourierFile(path) => prior_from_file(&read_json(path)?),
    }
}

pub fn prior_from_file(spec: &PriorFile) -> Result<CircularPrior> {
    match spec {
        PriorFile::Uniform => Ok(CircularPrior::uniform()),
        PriorFile::Diffusive { t, tol } => CircularPrior::diffusive(*t, *tol).map_err(CliError::Input),
        PriorFile::Fourier { coeffs } => {
            CircularPrior::from_coefficients(coeffs.iter().copied().map(from_pair).collect()).map_err(CliError::Input)
        }
    }
}

/// Builds a fixed (non-optimized) probe. `n` is required for the named
/// families and, when given, must agree with a file state.
pub fn fixed_probe(arg: &StateArg, n: Option<usize>) -> Result<Probe> {
    let need_n = || n.ok_or_else(|| CliError::Usage(format!("--state {arg} needs --n")));
    let probe = match arg {
        StateArg::Noon => Probe::Pure(ProbeState::noon(need_n()?).map_err(CliError::Input)?),
        StateArg::Bw => Probe::Pure(ProbeState::berry_wiseman(need_n()?).map_err(CliError::Input)?),
        StateArg::Binomial => Probe::Pure(ProbeState::classical_binomial(need_n()?).map_err(CliError::Input)?),
        StateArg::Flat => Probe::Pure(ProbeState::flat(need_n()?).map_err(CliError::Input)?),
        StateArg::Optimal => return Err(CliError::Usage("'optimal' is not a fixed state".into())),
        StateArg::File(path) => probe_from_file(&read_json(path)?)?,
    };
    if let Some(n) = n {
        if probe.photon_number() != n {
            return Err(CliError::Usage(format!(
                "--n {n} disagrees with the {}-photon state from {arg}",
                probe.photon_number()
            )));
        }
    }
    Ok(probe)
}

pub fn probe_from_file(spec: &StateFile) -> Result<Probe> {
    let pure = |s: optiphase_core::Result<ProbeState>| s.map(Probe::Pure).map_err(CliError::Input);
    match spec {
        StateFile::Noon { n } => pure(ProbeState::noon(*n)),
        StateFile::Bw { n } => pure(ProbeState::berry_wiseman(*n)),
        StateFile::Binomial { n } => pure(ProbeState::classical_binomial(*n)),
        StateFile::Flat { n } => pure(ProbeState::flat(*n)),
        StateFile::Amplitudes { values } => pure(ProbeState::from_amplitudes(
            values.iter().copied().map(from_pair).collect(),
        )),
        StateFile::Density { matrix } => {
            let d = matrix.len();
            if matrix.iter().any(|row| row.len() != d) {
                return Err(CliError::Usage("density matrix must be square".into()));
            }
            let m = CMatrix::from_fn(d, d, |i, j| from_pair(matrix[i][j]));
            DensityMatrix::new(m).map(Probe::Mixed).map_err(CliError::Input)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keywords() {
        assert_eq!("uniform".parse::<PriorArg>(), Ok(PriorArg::Uniform));
        assert_eq!(
            "fourier-file:p.json".parse::<PriorArg>(),
            Ok(PriorArg::FourierFile("p.json".into()))
        );
        assert!("fourier-file:".parse::<PriorArg>().is_err());
        assert!("gauss".parse::<PriorArg>().is_err());
        for s in ["noon", "bw", "binomial", "flat", "optimal", "file:x.json"] {
            assert_eq!(s.parse::<StateArg>().unwrap().to_string(), s);
        }
        assert!("sine".parse::<StateArg>().is_err());
    }

    #[test]
    fn state_files() {
        let spec: StateFile = serde_json::from_str(r#"{"type":"amplitudes","values":[[0,0],[3,0],[0,4]]}"#).unwrap();
        let Probe::Pure(s) = probe_from_file(&spec).unwrap() else {
            panic!()
        };
        assert!((s.amplitudes()[1].re - 0.6).abs() < 1e-15);
        assert!((s.amplitudes()[2].im - 0.8).abs() < 1e-15);

        let zero: StateFile = serde_json::from_str(r#"{"type":"amplitudes","values":[[0,0],[0,0]]}"#).unwrap();
        assert_eq!(probe_from_file(&zero).unwrap_err().exit_code(), 2);

        let mixed: StateFile =
            serde_json::from_str(r#"{"type":"density","matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert!(matches!(probe_from_file(&mixed).unwrap(), Probe::Mixed(_)));

        let ragged: StateFile = serde_json::from_str(r#"{"type":"density","matrix":[[[1,0]],[]]}"#).unwrap();
        assert!(probe_from_file(&ragged).is_err());
    }

    #[test]
    fn prior_files() {
        let spec: PriorFile = serde_json::from_str(r#"{"type":"fourier","coeffs":[[1,0],[0.3,0.1]]}"#).unwrap();
        let p = prior_from_file(&spec).unwrap();
        assert_eq!(p.coefficient(-1), Complex64::new(0.3, -0.1));

        let spec: PriorFile = serde_json::from_str(r#"{"type":"diffusive","t":0.5}"#).unwrap();
        assert_eq!(prior_from_file(&spec).unwrap().diffusion_time(), Some(0.5));

        let bad: PriorFile = serde_json::from_str(r#"{"type":"fourier","coeffs":[[1,0],[0.9,0]]}"#).unwrap();
        assert_eq!(prior_from_file(&bad).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn named_states_need_n() {
        assert_eq!(fixed_probe(&StateArg::Bw, None).unwrap_err().exit_code(), 2);
        assert_eq!(fixed_probe(&StateArg::Noon, Some(0)).unwrap_err().exit_code(), 2);
        assert_eq!(fixed_probe(&StateArg::Flat, Some(3)).unwrap().photon_number(), 3);
        assert!(build_prior(&PriorArg::Diffusive, None, 1e-14).is_err());
    }
}
