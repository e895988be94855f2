//! Lattice inputs: `--file PATH` or a `--gen` spec.
//!
//! ```text
//! boolean:N            subsets of an N-element set
//! chain:N              N-element chain
//! co-chain:N           order-convex subsets of an N-element chain
//! co-points:paper5     the built-in five-point planar configuration
//! co-points:PATH       convex-trace lattice of a point configuration file
//! subsemi:PATH         subsemilattices of a meet-semilattice file
//! enum:N               every lattice with N elements, up to isomorphism
//! enum:N:I             the I-th of those (0-based)
//! ```

use std::fs;

use anyhow::{bail, Context, Result};

use latkit::enumerate::enumerate_lattices;
use latkit::generators::{boolean, chain, co_chain, sub_meet_semilattice, MeetSemilattice};
use latkit::geometry::{co_points, PointConfiguration};
use latkit::FiniteLattice;

/// A loaded lattice with the spec it came from.
pub struct Input {
    pub name: String,
    pub lattice: FiniteLattice,
}

pub fn load(file: Option<&str>, gen: Option<&str>) -> Result<Vec<Input>> {
    match (file, gen) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let lattice = FiniteLattice::from_json_str(&text).with_context(|| format!("parsing {path}"))?;
            Ok(vec![Input {
                name: path.to_string(),
                lattice,
            }])
        }
        (None, Some(spec)) => generate(spec),
        (Some(_), Some(_)) => bail!("give either --file or --gen, not both"),
        (None, None) => bail!("an input lattice is required (--file or --gen)"),
    }
}

pub fn load_one(file: Option<&str>, gen: Option<&str>) -> Result<Input> {
    let mut inputs = load(file, gen)?;
    if inputs.len() != 1 {
        bail!("expected a single lattice, the input yields {}", inputs.len());
    }
    Ok(inputs.remove(0))
}

fn number(arg: &str, spec: &str) -> Result<usize> {
    arg.parse()
        .with_context(|| format!("`{spec}`: expected a non-negative integer, got `{arg}`"))
}

fn generate(spec: &str) -> Result<Vec<Input>> {
    let Some((kind, arg)) = spec.split_once(':') else {
        bail!("generator spec `{spec}` must be KIND:ARG");
    };
    let one = |lattice: FiniteLattice| {
        Ok(vec![Input {
            name: spec.to_string(),
            lattice,
        }])
    };
    match kind {
        "boolean" => one(boolean(number(arg, spec)?)?),
        "chain" => one(chain(number(arg, spec)?)?),
        "co-chain" => one(co_chain(number(arg, spec)?)?),
        "co-points" => {
            let config = if arg == "paper5" {
                PointConfiguration::paper5()
            } else {
                let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
                PointConfiguration::from_json_str(&text).with_context(|| format!("parsing {arg}"))?
            };
            one(co_points(&config)?)
        }
        "subsemi" => {
            let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            let p = MeetSemilattice::from_json_str(&text).with_context(|| format!("parsing {arg}"))?;
            one(sub_meet_semilattice(&p)?)
        }
        "enum" => {
            let (size, pick) = match arg.split_once(':') {
                Some((n, i)) => (number(n, spec)?, Some(number(i, spec)?)),
                None => (number(arg, spec)?, None),
            };
            let all = enumerate_lattices(size)?;
            match pick {
                Some(i) => {
                    let count = all.len();
                    let lattice = all
                        .into_iter()
                        .nth(i)
                        .with_context(|| format!("`{spec}`: only {count} lattices of size {size}"))?;
                    one(lattice)
                }
                None => Ok(all
                    .into_iter()
                    .enumerate()
                    .map(|(i, lattice)| Input {
                        name: format!("enum:{size}:{i}"),
                        lattice,
                    })
                    .collect()),
            }
        }
        other => bail!("unknown generator `{other}` in `{spec}`"),
    }
}
