//! Built-in state generators, selected by `--gen <spec>`.

use qbroadcast::corpus;
use qbroadcast::objects::DensityMatrix;

use crate::statefile::StateFile;

pub const GENERATORS: &str =
    "bell | ghz | cc[:seed] | cq[:seed] | werner:<p> | random:<seed> | markov:<seed> | product-ac:<seed>";

fn seed_arg(arg: Option<&str>, default: u64) -> Result<u64, String> {
    match arg {
        None => Ok(default),
        Some(s) => s.parse().map_err(|_| format!("expected an integer seed, got {s:?}")),
    }
}

/// Builds the state named by `spec`; `seed` fills in omitted seeds.
pub fn generate(spec: &str, seed: u64) -> Result<StateFile, String> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let need = |what: &str| arg.ok_or_else(|| format!("generator {name:?} needs an argument: {name}:<{what}>"));
    let state: DensityMatrix = match name {
        "bell" => corpus::bell(),
        "ghz" => corpus::ghz(),
        "cc" => corpus::classical_classical(seed_arg(arg, seed)?, 2, 2).map_err(|e| e.to_string())?,
        "cq" => corpus::classical_on_b(seed_arg(arg, seed)?, 2, 2).map_err(|e| e.to_string())?,
        "werner" => {
            let raw = need("p")?;
            let p: f64 = raw
                .parse()
                .map_err(|_| format!("expected a number for werner:<p>, got {raw:?}"))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("werner parameter must lie in [0, 1], got {p}"));
            }
            corpus::werner(p).map_err(|e| e.to_string())?
        }
        "random" => corpus::random_bipartite(seed_arg(Some(need("seed")?), seed)?, 2, 2),
        "markov" => corpus::markov_chain(seed_arg(Some(need("seed")?), seed)?, 2, 2, 2).map_err(|e| e.to_string())?,
        "product-ac" => corpus::product_ac(seed_arg(Some(need("seed")?), seed)?),
        _ => return Err(format!("unknown generator {spec:?}; expected one of {GENERATORS}")),
    };
    Ok(StateFile::from_density(&state, Some(spec.to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_generator_yields_a_valid_state() {
        for spec in [
            "bell",
            "ghz",
            "cc",
            "cq:3",
            "werner:0.5",
            "random:7",
            "markov:1",
            "product-ac:2",
        ] {
            let f = generate(spec, 0).unwrap();
            f.to_density().unwrap();
            assert_eq!(f.label.as_deref(), Some(spec));
        }
    }

    #[test]
    fn bad_specs_are_explained() {
        assert!(generate("werner", 0).unwrap_err().contains("werner:<p>"));
        assert!(generate("werner:2", 0).unwrap_err().contains("[0, 1]"));
        assert!(generate("nope", 0).unwrap_err().contains("unknown generator"));
        assert!(generate("random:x", 0).is_err());
    }
}
