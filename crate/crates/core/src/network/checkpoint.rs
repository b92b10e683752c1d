//! Plain-text model checkpoints.
//!
//! ```text
//! blpinn-checkpoint 1
//! geometry one_d | two_d_regular | two_d_irregular full_inputs=<bool>
//! components <n>
//! hidden <h>
//! epsilon <ε>
//! level_sets <k>
//! shifted axis=<a> origin=<o>                            (k lines, one per level set)
//! capped_arc radius=<r> half_width=<w> half_angle=<θ>
//! params <p>
//! <θ_0>
//! ...
//! ```
//!
//! Lines starting with `#` before the magic line are ignored.
//!
//! θ follows block order, each block as hidden weights (row-major), hidden
//! biases, output weights (row-major). Floats are written in shortest
//! round-trip form, so write → read is bitwise exact.

use std::io::{BufRead, Write};

use super::{Geometry, SolutionModel};
use crate::error::{Error, Result};
use crate::levelset::LevelSet;

const MAGIC: &str = "blpinn-checkpoint 1";

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

impl SolutionModel {
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        match self.geometry {
            Geometry::OneD => writeln!(w, "geometry one_d")?,
            Geometry::TwoDRegular => writeln!(w, "geometry two_d_regular")?,
            Geometry::TwoDIrregular { full_inputs } => {
                writeln!(w, "geometry two_d_irregular full_inputs={full_inputs}")?
            }
        }
        writeln!(w, "components {}", self.n_components)?;
        writeln!(w, "hidden {}", self.hidden)?;
        writeln!(w, "epsilon {:?}", self.epsilon)?;
        writeln!(w, "level_sets {}", self.level_sets.len())?;
        for ls in &self.level_sets {
            match ls {
                LevelSet::Shifted { axis, origin } => writeln!(w, "shifted axis={axis} origin={origin:?}")?,
                LevelSet::CappedArc {
                    radius,
                    half_width,
                    half_angle,
                } => writeln!(
                    w,
                    "capped_arc radius={radius:?} half_width={half_width:?} half_angle={half_angle:?}"
                )?,
            }
        }
        let theta = self.theta();
        writeln!(w, "params {}", theta.len())?;
        for v in theta {
            writeln!(w, "{v:?}")?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r
            .lines()
            .map(|l| l.map_err(|e| bad(e.to_string())))
            .skip_while(|l| matches!(l, Ok(s) if s.starts_with('#')));
        let mut next = move || -> Result<String> { lines.next().ok_or_else(|| bad("unexpected end of file"))? };

        if next()?.trim() != MAGIC {
            return Err(bad("missing header"));
        }
        let geometry = match next()?.trim() {
            "geometry one_d" => Geometry::OneD,
            "geometry two_d_regular" => Geometry::TwoDRegular,
            "geometry two_d_irregular full_inputs=true" => Geometry::TwoDIrregular { full_inputs: true },
            "geometry two_d_irregular full_inputs=false" => Geometry::TwoDIrregular { full_inputs: false },
            other => return Err(bad(format!("unknown geometry line `{other}`"))),
        };
        let n: usize = keyed(&next()?, "components")?;
        let hidden: usize = keyed(&next()?, "hidden")?;
        let epsilon: f64 = keyed(&next()?, "epsilon")?;
        let k: usize = keyed(&next()?, "level_sets")?;
        let mut level_sets = Vec::with_capacity(k);
        for _ in 0..k {
            level_sets.push(parse_level_set(&next()?)?);
        }
        let mut model = SolutionModel::zeros(geometry, n, hidden, level_sets, epsilon)?;
        let p: usize = keyed(&next()?, "params")?;
        if p != model.num_params() {
            return Err(bad(format!(
                "params {p} does not match architecture ({})",
                model.num_params()
            )));
        }
        let theta = (0..p)
            .map(|_| next()?.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        model.set_theta(&theta)?;
        Ok(model)
    }
}

fn keyed<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let rest = line
        .trim()
        .strip_prefix(key)
        .ok_or_else(|| bad(format!("expected `{key}`, got `{line}`")))?;
    rest.trim().parse().map_err(|_| bad(format!("bad value in `{line}`")))
}

fn parse_level_set(line: &str) -> Result<LevelSet> {
    let mut parts = line.split_whitespace();
    let kind = parts.next().ok_or_else(|| bad("empty level-set line"))?;
    let mut field = |name: &str| -> Result<f64> {
        let tok = parts.next().ok_or_else(|| bad(format!("missing `{name}`")))?;
        let v = tok
            .strip_prefix(name)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| bad(format!("expected `{name}=`, got `{tok}`")))?;
        v.parse().map_err(|_| bad(format!("bad number `{v}`")))
    };
    match kind {
        "shifted" => {
            let axis = field("axis")?;
            let origin = field("origin")?;
            Ok(LevelSet::Shifted {
                axis: axis as usize,
                origin,
            })
        }
        "capped_arc" => Ok(LevelSet::CappedArc {
            radius: field("radius")?,
            half_width: field("half_width")?,
            half_angle: field("half_angle")?,
        }),
        other => Err(bad(format!("unknown level set `{other}`"))),
    }
}
