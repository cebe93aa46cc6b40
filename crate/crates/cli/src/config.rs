//! The JSON run configuration and its resolution into library inputs.

use serde::Deserialize;
use superspin::interaction::{betas_to_alphas, preset, BetaSpec, InteractionSpec, Preset};
use superspin::lattice::{
    default_packet, IndexReading, LadderGrid, LatticeCoupling, PacketRecipe, PlaneGrid, ResidualCriteria,
};
use superspin::radial::{RadialGrid, SolveOptions};
use superspin::{build_spin_rep, Error, C64};

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub two_k: i32,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetConfig {
    Dipole { k: f64 },
    DipoleElectric { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub r_max: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlaneConfig {
    #[serde(default = "default_half_extent")]
    pub half_extent: f64,
    #[serde(default = "default_plane_n")]
    pub n: usize,
    #[serde(default = "default_levels")]
    pub refinement_levels: usize,
    /// Deformations of the potential used as negative controls.
    #[serde(default)]
    pub diag_shift: f64,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default)]
    pub index_reading: IndexReadingConfig,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum IndexReadingConfig {
    #[default]
    Contracted,
    Literal,
}

fn default_half_extent() -> f64 {
    20.0
}
fn default_plane_n() -> usize {
    128
}
fn default_levels() -> usize {
    3
}
fn default_exponent() -> f64 {
    1.0
}

impl Default for PlaneConfig {
    fn default() -> Self {
        Self {
            half_extent: default_half_extent(),
            n: default_plane_n(),
            refinement_levels: default_levels(),
            diag_shift: 0.0,
            exponent: default_exponent(),
            index_reading: IndexReadingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub center: (f64, f64),
    pub width: f64,
    #[serde(default)]
    pub momentum: (f64, f64),
    pub spin_weights: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SectorRange {
    pub two_jz_min: i32,
    pub two_jz_max: i32,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_order_min")]
    pub order_min: f64,
    #[serde(default = "default_order_max")]
    pub order_max: f64,
    #[serde(default)]
    pub max_final_relative: Option<f64>,
    #[serde(default)]
    pub continuum_guard: Option<f64>,
    #[serde(default = "default_edge_weight")]
    pub max_edge_weight: f64,
}

fn default_rel_tol() -> f64 {
    1e-3
}
fn default_order_min() -> f64 {
    1.6
}
fn default_order_max() -> f64 {
    2.4
}
fn default_edge_weight() -> f64 {
    SolveOptions::default().max_edge_weight
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            order_min: default_order_min(),
            order_max: default_order_max(),
            max_final_relative: None,
            continuum_guard: None,
            max_edge_weight: default_edge_weight(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    #[serde(default = "default_relative_spacing")]
    pub relative_spacing: f64,
    #[serde(default = "default_tail")]
    pub tail: f64,
}

fn default_relative_spacing() -> f64 {
    LadderGrid::default().relative_spacing
}
fn default_tail() -> f64 {
    LadderGrid::default().tail
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            relative_spacing: default_relative_spacing(),
            tail: default_tail(),
        }
    }
}

/// One run. Exactly one of `alphas`, `betas` or `preset` defines the
/// interaction, except that `alphas` and `betas` may be given together for a
/// consistency check in `mu-table`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub two_s: i32,
    #[serde(default)]
    pub alphas: Option<Vec<Coefficient>>,
    #[serde(default)]
    pub betas: Option<Vec<Coefficient>>,
    #[serde(default)]
    pub preset: Option<PresetConfig>,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub radial: Option<RadialConfig>,
    #[serde(default)]
    pub plane: PlaneConfig,
    #[serde(default)]
    pub packet: Option<PacketConfig>,
    #[serde(default)]
    pub sectors: Option<SectorRange>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ladder: LadderConfig,
    /// Angles (radians) for `mu-table`.
    #[serde(default)]
    pub angles: Option<Vec<f64>>,
}

fn default_mass() -> f64 {
    1.0
}

/// Errors found while turning the document into library inputs.
#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Invalid(String),
    Library(Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "malformed config: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Library(e) => write!(f, "invalid config: {e}"),
        }
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::Library(e)
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.check_scalars()?;
    Ok(cfg)
}

fn to_c64(c: &Coefficient) -> (i32, C64) {
    (c.two_k, C64::new(c.re, c.im))
}

/// Reorder labeled entries into descending-k order; every label must appear once.
fn ordered(two_s: i32, entries: &[Coefficient], what: &str) -> Result<Vec<C64>, ConfigError> {
    let dim = (two_s + 1) as usize;
    let mut out = vec![None; dim];
    for e in entries {
        let idx = (two_s - e.two_k) / 2;
        if e.two_k.abs() > two_s || (two_s - e.two_k) % 2 != 0 {
            return Err(ConfigError::Invalid(format!("{what}: two_k={} is not a label of two_s={two_s}", e.two_k)));
        }
        if out[idx as usize].replace(C64::new(e.re, e.im)).is_some() {
            return Err(ConfigError::Invalid(format!("{what}: two_k={} given twice", e.two_k)));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| ConfigError::Invalid(format!("{what}: missing two_k={}", two_s - 2 * i as i32))))
        .collect()
}

impl RunConfig {
    fn check_scalars(&self) -> Result<(), ConfigError> {
        if self.two_s < 0 {
            return Err(Error::NegativeSpin(self.two_s).into());
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(ConfigError::Invalid(format!("mass must be positive, got {}", self.mass)));
        }
        let sources = [self.alphas.is_some(), self.betas.is_some(), self.preset.is_some()];
        match sources {
            [false, false, false] => {
                return Err(ConfigError::Invalid("one of alphas, betas or preset is required".into()));
            }
            [_, _, true] if self.alphas.is_some() || self.betas.is_some() => {
                return Err(ConfigError::Invalid("preset cannot be combined with alphas or betas".into()));
            }
            _ => {}
        }
        let t = &self.tolerances;
        if !(t.rel_tol > 0.0) || !(t.order_min < t.order_max) || !(t.max_edge_weight > 0.0) {
            return Err(ConfigError::Invalid("tolerances must be positive with order_min < order_max".into()));
        }
        if let Some(r) = self.sectors {
            if r.two_jz_min > r.two_jz_max {
                return Err(ConfigError::Invalid("sectors: two_jz_min exceeds two_jz_max".into()));
            }
        }
        Ok(())
    }

    /// The interaction, validated for hermiticity.
    pub fn spec(&self) -> Result<InteractionSpec, ConfigError> {
        let spec = self.spec_unchecked()?;
        spec.validate()?;
        Ok(spec)
    }

    /// The interaction as written, possibly violating hermiticity.
    pub fn spec_unchecked(&self) -> Result<InteractionSpec, ConfigError> {
        if let Some(p) = &self.preset {
            let p = match *p {
                PresetConfig::Dipole { k } => Preset::Dipole { k },
                PresetConfig::DipoleElectric { a, b } => Preset::DipoleElectric { a, b },
            };
            return Ok(preset(p, self.two_s)?);
        }
        if let Some(a) = &self.alphas {
            return Ok(InteractionSpec::new_unchecked(self.two_s, ordered(self.two_s, a, "alphas")?)?);
        }
        let b = self.beta_spec()?.expect("checked in parse");
        Ok(betas_to_alphas(&b, &build_spin_rep(self.two_s)?)?)
    }

    pub fn beta_spec(&self) -> Result<Option<BetaSpec>, ConfigError> {
        let Some(b) = &self.betas else { return Ok(None) };
        let entries: Vec<(i32, C64)> = b.iter().map(to_c64).collect();
        Ok(Some(BetaSpec::from_labeled(self.two_s, &entries)?))
    }

    pub fn radial_grid(&self, spec: &InteractionSpec) -> Result<RadialGrid, ConfigError> {
        let cfg = self.radial.unwrap_or(RadialConfig {
            r_max: None,
            n_points: None,
        });
        let scale = spec.max_abs_alpha();
        let r_max = cfg.r_max.unwrap_or(if scale > 0.0 { 60.0 / (self.mass * scale) } else { 60.0 });
        Ok(RadialGrid::new(r_max, cfg.n_points.unwrap_or(3000))?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            continuum_guard: self.tolerances.continuum_guard,
            max_edge_weight: self.tolerances.max_edge_weight,
            ..Default::default()
        }
    }

    /// Doubled `j_z` range; defaults to `|j_z| ≤ s + 1`.
    pub fn sector_range(&self) -> (i32, i32) {
        self.sectors
            .map_or((-(self.two_s + 2), self.two_s + 2), |r| (r.two_jz_min, r.two_jz_max))
    }

    pub fn plane_grids(&self) -> Result<Vec<PlaneGrid>, ConfigError> {
        let p = &self.plane;
        if p.refinement_levels < 3 {
            return Err(Error::TooFewSpacings {
                needed: 3,
                got: p.refinement_levels,
            }
            .into());
        }
        Ok(PlaneGrid::new(p.half_extent, p.n)?.ladder(p.refinement_levels))
    }

    pub fn coupling(&self, spec: &InteractionSpec) -> LatticeCoupling {
        let reading = match self.plane.index_reading {
            IndexReadingConfig::Contracted => IndexReading::Contracted,
            IndexReadingConfig::Literal => IndexReading::Literal,
        };
        LatticeCoupling::from(spec)
            .with_diag_shift(self.plane.diag_shift)
            .with_exponent(self.plane.exponent)
            .with_reading(reading)
    }

    pub fn packet(&self) -> PacketRecipe {
        match &self.packet {
            Some(p) => PacketRecipe {
                center: p.center,
                width: p.width,
                momentum: p.momentum,
                spin_weights: p.spin_weights.iter().map(|w| C64::new(w.re, w.im)).collect(),
            },
            None => default_packet(self.plane.half_extent, self.two_s),
        }
    }

    pub fn criteria(&self) -> ResidualCriteria {
        ResidualCriteria {
            order_min: self.tolerances.order_min,
            order_max: self.tolerances.order_max,
            max_final_relative: self.tolerances.max_final_relative,
        }
    }

    pub fn ladder_grid(&self) -> LadderGrid {
        LadderGrid {
            relative_spacing: self.ladder.relative_spacing,
            tail: self.ladder.tail,
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        self.angles
            .clone()
            .unwrap_or_else(|| vec![0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2])
    }
}
