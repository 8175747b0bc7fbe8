//! TOML experiment configuration and model construction.

use conic_lens_core::geometry::boundary::TWO_PI;
use conic_lens_core::geometry::perturbation::{
    BoundaryScalar, BoundaryTensor, CollarPerturbation, RhoCutoff,
};
use conic_lens_core::geometry::{BoundaryManifold, CapKind, InteriorPatch, MetricModel, WarpedProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for the named generator (ChaCha8) used by pseudo-random sweeps.
    pub seed: u64,
    /// Optional task name; must match the subcommand when present.
    pub task: Option<String>,
    pub metric: MetricConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub params: TaskParams,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    /// One of: exact-cone, perturbed-conic, warped, euclidean-plane.
    pub family: String,
    /// circle | sphere | torus (cone families).
    pub boundary: Option<String>,
    pub length: Option<f64>,
    pub radius: Option<f64>,
    pub lengths: Option<[f64; 2]>,
    /// Perturbed-conic data.
    pub order: Option<u32>,
    pub rho_support: Option<f64>,
    pub pert_amp: Option<f64>,
    pub pert_wave: Option<Vec<f64>>,
    pub pert_phase: Option<f64>,
    /// Warped profile data.
    pub profile: Option<String>,
    pub r1: Option<f64>,
    pub r0: Option<f64>,
    pub slope: Option<f64>,
    #[serde(default)]
    pub convex: bool,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// grid | random | explicit
    pub kind: String,
    pub count: Option<usize>,
    pub y_range: Option<[f64; 2]>,
    pub eta_range: Option<[f64; 2]>,
    /// Explicit entries as [y1, y2, eta1, eta2].
    pub entries: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Deserialize, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct TaskParams {
    pub eps0: Option<f64>,
    pub n_eps: Option<usize>,
    pub weight_k: Option<f64>,
    pub t_window: Option<f64>,
    pub rho_anchor: Option<f64>,
    pub tau_grid: Option<usize>,
    pub field_amp: Option<f64>,
    pub field_width: Option<f64>,
    pub bump_center: Option<[f64; 2]>,
    pub bump_sigma: Option<f64>,
    pub bump_amp: Option<f64>,
    /// Bump coefficient matrix entries [q11, q12, q22].
    pub bump_coeff: Option<[f64; 3]>,
    pub steps: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { rtol: 1e-12, atol: 1e-13 }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}
impl std::error::Error for ConfigError {}

fn bail<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn boundary(&self) -> Result<BoundaryManifold, ConfigError> {
        let m = &self.metric;
        match m.boundary.as_deref() {
            Some("circle") | None => {
                BoundaryManifold::circle(m.length.unwrap_or(TWO_PI)).map_err(|e| ConfigError(e.to_string()))
            }
            Some("sphere") => BoundaryManifold::sphere(m.radius.unwrap_or(1.0))
                .map_err(|e| ConfigError(e.to_string())),
            Some("torus") => BoundaryManifold::torus(m.lengths.unwrap_or([TWO_PI, TWO_PI]))
                .map_err(|e| ConfigError(e.to_string())),
            Some(other) => bail(format!("unknown boundary kind '{other}'")),
        }
    }

    pub fn model(&self) -> Result<MetricModel, ConfigError> {
        let m = &self.metric;
        match m.family.as_str() {
            "euclidean-plane" => Ok(MetricModel::euclidean_plane()),
            "exact-cone" => Ok(MetricModel::exact_cone(self.boundary()?)),
            "perturbed-conic" => {
                let b = self.boundary()?;
                let order = m.order.unwrap_or(1);
                let amp = m.pert_amp.unwrap_or(0.1);
                let phase = m.pert_phase.unwrap_or(0.0);
                let wave = m.pert_wave.clone().unwrap_or_else(|| vec![1.0]);
                let scalar = match b {
                    BoundaryManifold::Circle { .. } => {
                        BoundaryScalar::CircleTrig { terms: vec![(amp, wave[0], phase)] }
                    }
                    BoundaryManifold::Torus { .. } => BoundaryScalar::TorusTrig {
                        terms: vec![(amp, wave[0], *wave.get(1).unwrap_or(&0.0), phase)],
                    },
                    BoundaryManifold::Sphere { .. } => BoundaryScalar::SphereHarmonic {
                        v: [
                            amp * wave[0],
                            amp * *wave.get(1).unwrap_or(&0.0),
                            amp * *wave.get(2).unwrap_or(&0.0),
                        ],
                        c0: amp * 0.5,
                    },
                };
                let pert = CollarPerturbation {
                    cutoff: RhoCutoff { rho_s: m.rho_support.unwrap_or(0.25) },
                    tensor: BoundaryTensor::Conformal(scalar),
                };
                MetricModel::perturbed_conic(b, order, pert).map_err(|e| ConfigError(e.to_string()))
            }
            "warped" => {
                let kind = match m.profile.as_deref().unwrap_or("flat") {
                    "flat" => CapKind::Flat,
                    "spherical-cap" => CapKind::SphericalCap,
                    "hyperbolic-cap" => CapKind::HyperbolicCap,
                    other => return bail(format!("unknown profile kind '{other}'")),
                };
                let prof = WarpedProfile::new(
                    kind,
                    m.r1.unwrap_or(1.0),
                    m.r0.unwrap_or(4.0),
                    m.slope.unwrap_or(2.0),
                )
                .map_err(|e| ConfigError(e.to_string()))?;
                let section = match m.boundary.as_deref().unwrap_or("circle") {
                    "circle" => BoundaryManifold::circle(TWO_PI).unwrap(),
                    "sphere" => BoundaryManifold::sphere(1.0).unwrap(),
                    other => return bail(format!("warped models take circle or sphere sections, got '{other}'")),
                };
                if m.convex {
                    MetricModel::warped_convex(section, prof).map_err(|e| ConfigError(e.to_string()))
                } else {
                    MetricModel::warped(section, prof, InteriorPatch::None)
                        .map_err(|e| ConfigError(e.to_string()))
                }
            }
            other => bail(format!("unknown metric family '{other}'")),
        }
    }

    /// Entry sweep `(y, η)` resolved deterministically from the seed.
    pub fn entries(&self, model: &MetricModel) -> Result<Vec<([f64; 2], [f64; 2])>, ConfigError> {
        let d = model.boundary_dim();
        let sw = &self.sweep;
        let out: Vec<([f64; 2], [f64; 2])> = match sw.kind.as_str() {
            "explicit" => sw
                .entries
                .clone()
                .unwrap_or_default()
                .into_iter()
                .map(|e| ([e[0], e[1]], [e[2], e[3]]))
                .collect(),
            "grid" => {
                let n = sw.count.unwrap_or(16);
                let yr = sw.y_range.unwrap_or([0.0, TWO_PI]);
                let er = sw.eta_range.unwrap_or([0.5, 4.0]);
                (0..n)
                    .map(|i| {
                        let t = (i as f64 + 0.5) / n as f64;
                        let y = yr[0] + (yr[1] - yr[0]) * t;
                        let e = er[0] + (er[1] - er[0]) * t;
                        if d == 1 {
                            ([y, 0.0], [e, 0.0])
                        } else {
                            // equatorial band on spheres, diagonal on tori
                            ([std::f64::consts::FRAC_PI_2, y], [0.0, e])
                        }
                    })
                    .collect()
            }
            "random" => {
                let n = sw.count.unwrap_or(16);
                let yr = sw.y_range.unwrap_or([0.0, TWO_PI]);
                let er = sw.eta_range.unwrap_or([0.5, 4.0]);
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..n)
                    .map(|_| {
                        let y = rng.gen_range(yr[0]..yr[1]);
                        let e = rng.gen_range(er[0]..er[1]);
                        if d == 1 {
                            ([y, 0.0], [e, 0.0])
                        } else {
                            ([std::f64::consts::FRAC_PI_2, y], [0.0, e])
                        }
                    })
                    .collect()
            }
            other => return bail(format!("unknown sweep kind '{other}'")),
        };
        if out.is_empty() {
            return bail("empty sweep");
        }
        Ok(out)
    }
}
