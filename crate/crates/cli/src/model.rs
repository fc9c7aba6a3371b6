use std::collections::BTreeMap;
use std::path::Path;

use levy_decoherence::levy::{build_exponent, build_exponent_numeric, CharacteristicExponent, JumpWeight, LevyTriplet};
use levy_decoherence::models::{
    compound_poisson_exponent, normalize_gas_kernel, stable_exponent, stable_triplet, GasKernel, MandelParams,
    MomentumPd, StableParams, Tabulation,
};
use levy_decoherence::sampling::Process;
use levy_decoherence::spectral::QuadratureSpec;
use levy_decoherence::Error;

use crate::args::ModelArgs;
use crate::error::CliError;

/// The exponent selected by the model flags plus what else the commands need.
pub struct Model {
    pub psi: CharacteristicExponent,
    /// Rate and kick density when the process is compound Poisson.
    pub jumps: Option<(f64, MomentumPd)>,
    /// Sampler for the same process, if one exists.
    pub process: Option<Process>,
    pub hbar: f64,
}

/// Parses `k=v,k=v` into numbers.
pub fn parse_kv(spec: &str, flag: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--{flag}: expected key=value, got '{part}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{flag}: '{v}' is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn get(map: &BTreeMap<String, f64>, keys: &[&str], flag: &str) -> Result<f64, CliError> {
    keys.iter()
        .find_map(|k| map.get(*k).copied())
        .ok_or_else(|| CliError::Usage(format!("--{flag} needs {}=<value>", keys[0])))
}

fn read_table(path: &Path) -> Result<Tabulation, CliError> {
    Ok(Tabulation::from_path(path)?)
}

impl Model {
    pub fn from_args(m: &ModelArgs) -> Result<Self, CliError> {
        let hbar = m.hbar;
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")).into());
        }
        let families = [m.stable.is_some(), m.mandel.is_some(), m.gas.is_some(), m.pd.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        let triplet_files = m.lambda_sq.is_some() || m.omega_sq.is_some();
        if families > 1 || (families == 1 && (triplet_files || m.gaussian.is_some())) {
            return Err(CliError::Usage(
                "choose one of --stable, --mandel, --gas, --pd; --gaussian combines only with --lambda-sq/--omega-sq".into(),
            ));
        }

        if let Some(spec) = &m.stable {
            let kv = parse_kv(spec, "stable")?;
            let p = StableParams::new(get(&kv, &["alpha"], "stable")?, get(&kv, &["K", "k"], "stable")?, get(&kv, &["x0"], "stable")?)?;
            let psi = if m.numeric {
                build_exponent_numeric(&stable_triplet(&p, hbar)?, &QuadratureSpec::default())?
            } else {
                stable_exponent(&p)?
            };
            return Ok(Self {
                psi,
                jumps: None,
                process: Some(Process::Stable(p)),
                hbar,
            });
        }
        if let Some(spec) = &m.mandel {
            let kv = parse_kv(spec, "mandel")?;
            let p = MandelParams::with_hbar(get(&kv, &["k0"], "mandel")?, hbar)?;
            let rate = kv.get("rate").copied().unwrap_or(1.0);
            return Self::compound(rate, MomentumPd::mandel(p), hbar);
        }
        if let Some(path) = &m.gas {
            let kv = parse_kv(m.gas_params.as_deref().unwrap_or(""), "gas-params")?;
            let kernel = GasKernel::new(
                read_table(path)?,
                get(&kv, &["n"], "gas-params")?,
                get(&kv, &["M", "m"], "gas-params")?,
                kv.get("p0").copied().unwrap_or(1.0),
            )?;
            let (rate, pd) = normalize_gas_kernel(&kernel)?;
            return Self::compound(rate, pd, hbar);
        }
        if let Some(path) = &m.pd {
            let pd = MomentumPd::tabulated(read_table(path)?)?;
            return Self::compound(m.rate.unwrap_or(1.0), pd, hbar);
        }

        let (a, d) = match &m.gaussian {
            Some(spec) => {
                let kv = parse_kv(spec, "gaussian")?;
                (kv.get("a").copied().unwrap_or(0.0), get(&kv, &["D", "d"], "gaussian")?)
            }
            None => (0.0, 0.0),
        };
        if !triplet_files {
            return Ok(Self {
                psi: CharacteristicExponent::gaussian(a, d),
                jumps: None,
                process: Some(Process::Gaussian { a, d }),
                hbar,
            });
        }
        let mut triplet = LevyTriplet::gaussian(a, d).with_hbar(hbar);
        if let Some(path) = &m.lambda_sq {
            triplet = triplet.with_lambda(JumpWeight::Tabulated(read_table(path)?));
        }
        if let Some(path) = &m.omega_sq {
            triplet = triplet.with_omega(JumpWeight::Tabulated(read_table(path)?), m.q0);
        }
        Ok(Self {
            psi: build_exponent(&triplet, &QuadratureSpec::default())?,
            jumps: None,
            process: None,
            hbar,
        })
    }

    fn compound(rate: f64, pd: MomentumPd, hbar: f64) -> Result<Self, CliError> {
        Ok(Self {
            psi: compound_poisson_exponent(rate, &pd, hbar)?,
            jumps: Some((rate, pd.clone())),
            process: Some(Process::CompoundPoisson { rate, pd }),
            hbar,
        })
    }

    pub fn require_jumps(&self, what: &str) -> Result<&(f64, MomentumPd), CliError> {
        self.jumps
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("{what} needs a compound-Poisson model (--mandel, --gas or --pd)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_lists() {
        let kv = parse_kv("alpha=1.5, K=2,x0=1e-3", "stable").unwrap();
        assert_eq!(kv["alpha"], 1.5);
        assert_eq!(kv["K"], 2.0);
        assert_eq!(kv["x0"], 1e-3);
        assert!(parse_kv("alpha", "stable").is_err());
        assert!(parse_kv("alpha=one", "stable").is_err());
        assert!(parse_kv("", "stable").unwrap().is_empty());
    }

    #[test]
    fn missing_keys_name_the_flag() {
        let kv = parse_kv("k=1", "stable").unwrap();
        assert_eq!(get(&kv, &["K", "k"], "stable").unwrap(), 1.0);
        let err = get(&kv, &["x0"], "stable").unwrap_err();
        assert!(err.to_string().contains("--stable needs x0"));
    }
}
