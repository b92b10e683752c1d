//! Decomposed solution ansätze built from single-hidden-layer blocks.
//!
//! Three geometries are supported:
//!
//! * `OneD`: `u = B_r(x) + B_L(φ_L/ε) + B_R(φ_R/ε)`
//! * `TwoDRegular`: `u = B_r(x,y) + [B_rx(x,y) + B_L + B_R] ⊙ [B_ry(x,y) + B_B + B_T]`
//! * `TwoDIrregular`: `u = B_r(x,y) + B_s(x, y, φ/ε)`
//!
//! where every singular block sees only its scaled level-set input and `⊙` is
//! the componentwise product for systems. The flat parameter vector θ is the
//! concatenation of the block parameters in block order.

mod block;
mod checkpoint;

pub use block::MlpBlock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::Jet2;
use crate::error::{Error, Result};
use crate::levelset::LevelSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    OneD,
    TwoDRegular,
    /// `full_inputs` also feeds `φ/ε` to the regular block.
    TwoDIrregular {
        full_inputs: bool,
    },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::OneD => 1,
            _ => 2,
        }
    }

    pub fn level_set_count(&self) -> usize {
        match self {
            Geometry::OneD => 2,
            Geometry::TwoDRegular => 4,
            Geometry::TwoDIrregular { .. } => 1,
        }
    }

    pub fn block_names(&self) -> &'static [&'static str] {
        match self {
            Geometry::OneD => &["r", "L", "R"],
            Geometry::TwoDRegular => &["r", "rx", "ry", "L", "R", "B", "T"],
            Geometry::TwoDIrregular { .. } => &["r", "s"],
        }
    }

    fn wiring(&self) -> Vec<Vec<Feature>> {
        use Feature::{Coord, Scaled};
        match self {
            Geometry::OneD => vec![vec![Coord(0)], vec![Scaled(0)], vec![Scaled(1)]],
            Geometry::TwoDRegular => {
                let xy = vec![Coord(0), Coord(1)];
                vec![
                    xy.clone(),
                    xy.clone(),
                    xy,
                    vec![Scaled(0)],
                    vec![Scaled(1)],
                    vec![Scaled(2)],
                    vec![Scaled(3)],
                ]
            }
            Geometry::TwoDIrregular { full_inputs } => {
                let full = vec![Coord(0), Coord(1), Scaled(0)];
                let regular = if *full_inputs {
                    full.clone()
                } else {
                    vec![Coord(0), Coord(1)]
                };
                vec![regular, full]
            }
        }
    }
}

/// One block input: a raw coordinate or a level set divided by ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Feature {
    Coord(usize),
    Scaled(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitConfig {
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionModel {
    geometry: Geometry,
    n_components: usize,
    hidden: usize,
    epsilon: f64,
    level_sets: Vec<LevelSet>,
    blocks: Vec<MlpBlock>,
    wiring: Vec<Vec<Feature>>,
    offsets: Vec<usize>,
}

/// Raw block outputs at one point plus the regular/singular split.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentOutputs {
    pub blocks: Vec<(String, Vec<f64>)>,
    pub regular: Vec<f64>,
    pub singular: Vec<f64>,
    pub total: Vec<f64>,
}

pub fn build_model(
    geometry: Geometry,
    n_components: usize,
    hidden: usize,
    level_sets: Vec<LevelSet>,
    epsilon: f64,
    init: InitConfig,
) -> Result<SolutionModel> {
    let mut model = SolutionModel::zeros(geometry, n_components, hidden, level_sets, epsilon)?;
    // stream 2 keeps initialisation independent of point sampling with the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
    rng.set_stream(2);
    for b in &mut model.blocks {
        b.init_uniform(&mut rng);
    }
    Ok(model)
}

impl SolutionModel {
    /// A model with every parameter set to zero.
    pub fn zeros(
        geometry: Geometry,
        n_components: usize,
        hidden: usize,
        level_sets: Vec<LevelSet>,
        epsilon: f64,
    ) -> Result<Self> {
        if hidden == 0 || n_components == 0 {
            return Err(Error::InvalidModel(format!(
                "hidden ({hidden}) and component count ({n_components}) must be at least 1"
            )));
        }
        check_epsilon(epsilon)?;
        if level_sets.len() != geometry.level_set_count() {
            return Err(Error::InvalidModel(format!(
                "{geometry:?} needs {} level sets, got {}",
                geometry.level_set_count(),
                level_sets.len()
            )));
        }
        if let Some(ls) = level_sets.iter().find(|l| l.dim() > geometry.dim()) {
            return Err(Error::InvalidModel(format!(
                "level set {ls:?} exceeds dimension {}",
                geometry.dim()
            )));
        }
        if matches!(geometry, Geometry::TwoDIrregular { .. }) && !matches!(level_sets[0], LevelSet::CappedArc { .. }) {
            return Err(Error::InvalidModel(
                "irregular geometry needs a closed level set".into(),
            ));
        }
        let wiring = geometry.wiring();
        let blocks: Vec<MlpBlock> = geometry
            .block_names()
            .iter()
            .zip(&wiring)
            .map(|(name, inputs)| MlpBlock::zeros(*name, inputs.len(), hidden, n_components))
            .collect();
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        for b in &blocks {
            offsets.push(offsets.last().unwrap() + b.num_params());
        }
        Ok(Self {
            geometry,
            n_components,
            hidden,
            epsilon,
            level_sets,
            blocks,
            wiring,
            offsets,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn level_sets(&self) -> &[LevelSet] {
        &self.level_sets
    }

    pub fn blocks(&self) -> &[MlpBlock] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&MlpBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn block_mut(&mut self, name: &str) -> Option<&mut MlpBlock> {
        self.blocks.iter_mut().find(|b| b.name == name)
    }

    /// Range of θ indices owned by the named block.
    pub fn block_range(&self, name: &str) -> Option<std::ops::Range<usize>> {
        let i = self.blocks.iter().position(|b| b.name == name)?;
        Some(self.offsets[i]..self.offsets[i + 1])
    }

    pub fn num_params(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn theta(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.num_params());
        for b in &self.blocks {
            t.extend_from_slice(b.params());
        }
        t
    }

    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::ThetaLength {
                expected: self.num_params(),
                actual: theta.len(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter vector".into()));
        }
        for (i, b) in self.blocks.iter_mut().enumerate() {
            b.params_mut()
                .copy_from_slice(&theta[self.offsets[i]..self.offsets[i + 1]]);
        }
        Ok(())
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::PointDimension {
                expected: self.dim(),
                actual: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("point {point:?}")));
        }
        Ok(())
    }

    /// Jets of every block input along axis `dir`, or a value-only pass when
    /// `dir` is `None`.
    fn block_inputs(&self, point: &[f64], dir: Option<usize>) -> Vec<Vec<Jet2>> {
        let mut coords = [Jet2::default(); 2];
        for (a, v) in point.iter().enumerate() {
            coords[a] = Jet2::seed(*v, if dir == Some(a) { 1.0 } else { 0.0 });
        }
        let coords = &coords[..point.len()];
        let scaled: Vec<Jet2> = self.level_sets.iter().map(|ls| ls.phi(coords) / self.epsilon).collect();
        self.wiring
            .iter()
            .map(|feats| {
                feats
                    .iter()
                    .map(|f| match *f {
                        Feature::Coord(a) => coords[a],
                        Feature::Scaled(l) => scaled[l],
                    })
                    .collect()
            })
            .collect()
    }

    /// Per-direction evaluation. When `tangents` is given it receives the
    /// jets of `∂u_k/∂θ_j`, laid out `[j][k]`.
    pub(crate) fn eval_direction(
        &self,
        point: &[f64],
        dir: Option<usize>,
        tangents: Option<&mut [Jet2]>,
    ) -> Result<Vec<Jet2>> {
        let inputs = self.block_inputs(point, dir);
        let n = self.n_components;
        let nb = self.blocks.len();

        let Some(tangents) = tangents else {
            let outs = self
                .blocks
                .iter()
                .zip(&inputs)
                .map(|(b, z)| b.forward_jet(z))
                .collect::<Result<Vec<_>>>()?;
            return Ok(self.combine(&outs));
        };

        debug_assert_eq!(tangents.len(), self.num_params() * n);
        let mut outs = vec![vec![Jet2::default(); n]; nb];
        for (bi, b) in self.blocks.iter().enumerate() {
            let t = &mut tangents[self.offsets[bi] * n..self.offsets[bi + 1] * n];
            b.forward_tangents(&inputs[bi], &mut outs[bi], t)?;
        }
        let u = self.combine(&outs);

        if let Geometry::TwoDRegular = self.geometry {
            let (xg, yg) = (group_sum(&outs, &[1, 3, 4], n), group_sum(&outs, &[2, 5, 6], n));
            for bi in 1..nb {
                let other = if matches!(bi, 1 | 3 | 4) { &yg } else { &xg };
                for t in tangents[self.offsets[bi] * n..self.offsets[bi + 1] * n].chunks_exact_mut(n) {
                    for (tk, ok) in t.iter_mut().zip(other) {
                        *tk = *tk * *ok;
                    }
                }
            }
        }
        Ok(u)
    }

    fn combine(&self, outs: &[Vec<Jet2>]) -> Vec<Jet2> {
        let n = self.n_components;
        match self.geometry {
            Geometry::OneD | Geometry::TwoDIrregular { .. } => group_sum(outs, &(0..outs.len()).collect::<Vec<_>>(), n),
            Geometry::TwoDRegular => {
                let xg = group_sum(outs, &[1, 3, 4], n);
                let yg = group_sum(outs, &[2, 5, 6], n);
                (0..n).map(|k| outs[0][k] + xg[k] * yg[k]).collect()
            }
        }
    }

    pub fn forward(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point)?;
        let u: Vec<f64> = self
            .eval_direction(point, None, None)?
            .iter()
            .map(|j| j.value)
            .collect();
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("model output at {point:?}")));
        }
        Ok(u)
    }

    pub fn component_outputs(&self, point: &[f64]) -> Result<ComponentOutputs> {
        self.check_point(point)?;
        let inputs = self.block_inputs(point, None);
        let n = self.n_components;
        let mut raw = Vec::with_capacity(self.blocks.len());
        for (b, z) in self.blocks.iter().zip(&inputs) {
            let z: Vec<f64> = z.iter().map(|j| j.value).collect();
            raw.push(b.forward(&z)?);
        }
        let regular = raw[0].clone();
        let singular: Vec<f64> = match self.geometry {
            Geometry::OneD => (0..n).map(|k| raw[1][k] + raw[2][k]).collect(),
            Geometry::TwoDIrregular { .. } => raw[1].clone(),
            Geometry::TwoDRegular => (0..n)
                .map(|k| (raw[1][k] + raw[3][k] + raw[4][k]) * (raw[2][k] + raw[5][k] + raw[6][k]))
                .collect(),
        };
        let total = regular.iter().zip(&singular).map(|(r, s)| r + s).collect();
        Ok(ComponentOutputs {
            blocks: self.blocks.iter().map(|b| b.name.clone()).zip(raw).collect(),
            regular,
            singular,
            total,
        })
    }
}

fn group_sum(outs: &[Vec<Jet2>], members: &[usize], n: usize) -> Vec<Jet2> {
    (0..n)
        .map(|k| members.iter().fold(Jet2::default(), |acc, &b| acc + outs[b][k]))
        .collect()
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}
