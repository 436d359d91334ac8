//! Run configuration: JSON datum specs, scalar parsing, caps.

use serde::Deserialize;

use crate::arith::lcm;
use crate::cohomology::{abelian_cocycle_assemble, CocycleVector};
use crate::datum::{make_datum, GroupDatum};
use crate::error::{Error, Result};
use crate::groups::{build_group, Character, GroupSpec};
use crate::linalg::cyclotomic::{Cyc, CycField};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub group: RawGroup,
    pub g: RawElement,
    pub chi: RawCharacter,
    #[serde(default)]
    pub mu: Option<RawScalar>,
    /// coefficient modulus M; defaults to lcm(exp(G), o(chi(g)))
    #[serde(default)]
    pub modulus: Option<i64>,
    /// scalar samples standing in for the base field
    #[serde(default)]
    pub samples: Option<Vec<RawScalar>>,
    /// optional cocycle used by `classify` for companion analysis
    #[serde(default)]
    pub sigma: Option<RawCocycle>,
    #[serde(default)]
    pub caps: Option<RawCaps>,
}

#[derive(Deserialize)]
pub struct RawGroup {
    #[serde(default)]
    pub cyclic_factors: Option<Vec<u64>>,
    #[serde(default)]
    pub cayley_table: Option<Vec<Vec<u32>>>,
}

#[derive(Deserialize)]
pub struct RawElement {
    #[serde(default)]
    pub index: Option<u32>,
    #[serde(default)]
    pub exponents: Option<Vec<u64>>,
}

#[derive(Deserialize)]
pub struct RawCharacter {
    pub modulus: u64,
    #[serde(default)]
    pub generator_exponents: Option<Vec<u64>>,
    #[serde(default)]
    pub exponents: Option<Vec<u64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum RawScalar {
    Text(String),
    Integer(i64),
    Coeffs { modulus: u64, coeffs: Vec<String> },
}

#[derive(Deserialize)]
pub struct RawCocycle {
    #[serde(default)]
    pub carries: Option<Vec<i64>>,
    #[serde(default)]
    pub bicharacter: Option<Vec<(usize, usize, i64)>>,
    #[serde(default)]
    pub modulus: Option<i64>,
}

#[derive(Deserialize, Clone, Copy)]
pub struct RawCaps {
    #[serde(default)]
    pub kappa_dim: Option<usize>,
    #[serde(default)]
    pub brute_force_dim: Option<usize>,
}

pub struct RunConfig {
    pub datum: GroupDatum,
    pub modulus: i64,
    pub samples: Vec<Cyc>,
    pub sigma: Option<CocycleVector>,
    pub kappa_cap: usize,
}

/// Parse a scalar in the report mini-language: an integer, a rational
/// `p/q`, or a root of unity `[-]zeta[_M][^k]` (default M is the ambient
/// field modulus), or an explicit coefficient vector.
pub fn parse_scalar(raw: &RawScalar, default_modulus: u64) -> Result<Cyc> {
    match raw {
        RawScalar::Integer(n) => {
            let field = CycField::get(default_modulus.max(1));
            Ok(Cyc::from_i64(&field, *n))
        }
        RawScalar::Coeffs { modulus, coeffs } => {
            let field = CycField::get(*modulus);
            if coeffs.len() != field.phi {
                return Err(Error::Config(format!(
                    "expected {} coefficients for modulus {}",
                    field.phi, modulus
                )));
            }
            let mut c = Cyc::zero(&field);
            for (i, s) in coeffs.iter().enumerate() {
                c.coeffs[i] = parse_rational(s)?;
            }
            Ok(c)
        }
        RawScalar::Text(s) => parse_scalar_text(s, default_modulus),
    }
}

fn parse_rational(s: &str) -> Result<num::BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<num::BigInt> {
        t.parse::<num::BigInt>()
            .map_err(|_| Error::Config(format!("bad integer '{t}'")))
    };
    if let Some((p, q)) = s.split_once('/') {
        let denom = parse_int(q.trim())?;
        if denom == num::BigInt::from(0) {
            return Err(Error::Config("zero denominator".into()));
        }
        Ok(num::BigRational::new(parse_int(p.trim())?, denom))
    } else {
        Ok(num::BigRational::from(parse_int(s)?))
    }
}

fn parse_scalar_text(s: &str, default_modulus: u64) -> Result<Cyc> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let c = if let Some(rest) = body.strip_prefix("zeta") {
        let (m, rest) = match rest.strip_prefix('_') {
            Some(r) => {
                let end = r.find('^').unwrap_or(r.len());
                let m: u64 = r[..end]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad zeta modulus in '{s}'")))?;
                (m, &r[end..])
            }
            None => (default_modulus, rest),
        };
        let k: i64 = match rest.strip_prefix('^') {
            Some(e) => e
                .parse()
                .map_err(|_| Error::Config(format!("bad zeta exponent in '{s}'")))?,
            None => 1,
        };
        if m < 1 {
            return Err(Error::Config("zeta modulus must be >= 1".into()));
        }
        Cyc::root_of_unity(&CycField::get(m), k)
    } else {
        let field = CycField::get(default_modulus.max(1));
        Cyc::from_rational(&field, parse_rational(body)?)
    };
    Ok(if neg { c.neg() } else { c })
}

pub fn build_run_config(raw: &RawConfig) -> Result<RunConfig> {
    if let Some(v) = raw.schema_version {
        if v != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {v}, expected {SCHEMA_VERSION}"
            )));
        }
    }
    let group = match (&raw.group.cyclic_factors, &raw.group.cayley_table) {
        (Some(f), None) => build_group(GroupSpec::CyclicFactors(f))?,
        (None, Some(t)) => build_group(GroupSpec::CayleyTable(t))?,
        _ => {
            return Err(Error::Config(
                "group must give exactly one of cyclic_factors or cayley_table".into(),
            ))
        }
    };
    let g = match (&raw.g.index, &raw.g.exponents) {
        (Some(i), None) => {
            if *i as usize >= group.order {
                return Err(Error::Config(format!("g index {i} out of range")));
            }
            *i
        }
        (None, Some(exps)) => {
            let ab = group
                .abelian
                .as_ref()
                .ok_or_else(|| Error::Config("exponent form of g needs an abelian group".into()))?;
            if exps.len() != ab.factors.len() {
                return Err(Error::Config("wrong exponent count for g".into()));
            }
            ab.element_of(exps)
        }
        _ => {
            return Err(Error::Config(
                "g must give exactly one of index or exponents".into(),
            ))
        }
    };
    let chi = match (&raw.chi.generator_exponents, &raw.chi.exponents) {
        (Some(ge), None) => Character::from_generator_exponents(&group, raw.chi.modulus, ge)?,
        (None, Some(e)) => Character::new(&group, raw.chi.modulus, e.clone())?,
        _ => {
            return Err(Error::Config(
                "chi must give exactly one of generator_exponents or exponents".into(),
            ))
        }
    };
    let field_hint = lcm(chi.modulus, group.exponent());
    let mu = match &raw.mu {
        None => Cyc::zero(&CycField::get(chi.modulus)),
        Some(s) => parse_scalar(s, field_hint)?,
    };
    let datum = make_datum(&group, g, chi, mu)?;
    let modulus = raw.modulus.unwrap_or_else(|| datum.default_modulus());
    if modulus < 2 {
        return Err(Error::Config("modulus must be >= 2".into()));
    }
    let sample_field = lcm(modulus as u64, datum.field().modulus);
    let samples = match &raw.samples {
        None => default_samples(sample_field),
        Some(list) => list
            .iter()
            .map(|s| parse_scalar(s, sample_field))
            .collect::<Result<_>>()?,
    };
    let sigma = match &raw.sigma {
        None => None,
        Some(rc) => {
            let m = rc.modulus.unwrap_or(modulus);
            let carries = rc
                .carries
                .clone()
                .unwrap_or_else(|| vec![0; datum.group.abelian.as_ref().map_or(0, |a| a.factors.len())]);
            let bichar = rc.bicharacter.clone().unwrap_or_default();
            Some(abelian_cocycle_assemble(&datum.group, m, &carries, &bichar)?)
        }
    };
    let kappa_cap = raw
        .caps
        .as_ref()
        .and_then(|c| c.kappa_dim)
        .unwrap_or(crate::comodule::KAPPA_CAP);
    Ok(RunConfig {
        datum,
        modulus,
        samples,
        sigma,
        kappa_cap,
    })
}

/// Default scalar samples {0, 1, -1, zeta_F}.
pub fn default_samples(field_modulus: u64) -> Vec<Cyc> {
    let field = CycField::get(field_modulus.max(2));
    vec![
        Cyc::zero(&field),
        Cyc::one(&field),
        Cyc::one(&field).neg(),
        Cyc::root_of_unity(&field, 1),
    ]
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    build_run_config(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_scalars() {
        let one = parse_scalar(&RawScalar::Integer(1), 4).unwrap();
        assert!(one.is_one());
        let z = parse_scalar(&RawScalar::Text("zeta".into()), 4).unwrap();
        assert_eq!(z, Cyc::root_of_unity(&CycField::get(4), 1));
        let z8 = parse_scalar(&RawScalar::Text("-zeta_8^3".into()), 4).unwrap();
        assert_eq!(z8, Cyc::root_of_unity(&CycField::get(8), 3).neg());
        let half = parse_scalar(&RawScalar::Text("1/2".into()), 2).unwrap();
        assert_eq!(
            half,
            Cyc::from_rational(
                &CycField::get(2),
                num::BigRational::new(1.into(), 2.into())
            )
        );
        assert!(parse_scalar(&RawScalar::Text("zeta_x".into()), 4).is_err());
    }

    #[test]
    fn config_round_trip() {
        let raw: RawConfig = serde_json::from_str(
            r#"{
                "schema_version": 1,
                "group": {"cyclic_factors": [4]},
                "g": {"exponents": [1]},
                "chi": {"modulus": 4, "generator_exponents": [1]},
                "mu": "0",
                "modulus": 4,
                "samples": ["0", "1"]
            }"#,
        )
        .unwrap();
        let cfg = build_run_config(&raw).unwrap();
        assert_eq!(cfg.datum.group.order, 4);
        assert_eq!(cfg.modulus, 4);
        assert_eq!(cfg.samples.len(), 2);
    }

    #[test]
    fn bad_configs_rejected() {
        let raw: std::result::Result<RawConfig, _> = serde_json::from_str(
            r#"{"group": {"cyclic_factors": [4]}, "g": {"index": 0}}"#,
        );
        assert!(raw.is_err()); // missing chi
        let raw: RawConfig = serde_json::from_str(
            r#"{
                "group": {},
                "g": {"index": 1},
                "chi": {"modulus": 2, "generator_exponents": [1]}
            }"#,
        )
        .unwrap();
        assert!(build_run_config(&raw).is_err());
    }
}
