//! Run configuration: a JSON file layer overlaid by command-line flags,
//! validated into a [`Resolved`] plan before any computation.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::adaptive::{DEFAULT_NOISE_FLOOR, DEFAULT_SCAN_POINTS};
use crate::inference::{MleOptions, Window};
use crate::model::{radns_to_ghz, FieldMap, SweepTemplate, SystemParams, DEFAULT_GYROMAGNETIC_GHZ_PER_T};
use crate::squeezed::DEFAULT_TAIL_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Params,
    SweepField,
    Coherence,
    Fisher,
    MleSim,
    QslCheck,
    AdaptiveSearch,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Params => "params",
            Mode::SweepField => "sweep-field",
            Mode::Coherence => "coherence",
            Mode::Fisher => "fisher",
            Mode::MleSim => "mle-sim",
            Mode::QslCheck => "qsl-check",
            Mode::AdaptiveSearch => "adaptive-search",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every setting, all optional. A config file and the flags each form one
/// layer; flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    /// Relative squeezing values, comma separated (instead of physical parameters)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Option<Vec<f64>>,
    /// Bare Kittel frequency ω₀/2π in GHz
    #[arg(long)]
    pub omega0_ghz: Option<f64>,
    /// Anisotropy gap (2SK_z − SK_y)/2π in GHz, used with --field-t
    #[arg(long)]
    pub gap_ghz: Option<f64>,
    /// Applied field μ₀h in tesla
    #[arg(long)]
    pub field_t: Option<f64>,
    /// Pair-creation strength Ω/2π in GHz
    #[arg(long)]
    pub omega_ghz: Option<f64>,
    /// Dispersive coupling χ/2π in GHz
    #[arg(long)]
    pub chi_ghz: Option<f64>,
    /// |γ| in GHz per tesla
    #[arg(long)]
    pub gyromagnetic: Option<f64>,
    /// Post-quench frequency ω_↑/2π in GHz (direct-r modes and the adaptive truth)
    #[arg(long)]
    pub omega_up_ghz: Option<f64>,
    /// Spin budget N·S for the nonlinearity check
    #[arg(long)]
    pub ns_product: Option<f64>,
    /// Qubit dephasing time T2* in ns
    #[arg(long)]
    pub t2star_ns: Option<f64>,
    /// Largest discarded Fock-space probability mass
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Lower end of the field sweep in tesla
    #[arg(long)]
    pub field_min_t: Option<f64>,
    /// Upper end of the field sweep in tesla
    #[arg(long)]
    pub field_max_t: Option<f64>,
    /// Lower end of the phase grid φ = ω_↑t
    #[arg(long)]
    pub phi_min: Option<f64>,
    /// Upper end of the phase grid φ = ω_↑t
    #[arg(long)]
    pub phi_max: Option<f64>,
    /// Grid points, including both ends
    #[arg(long)]
    pub steps: Option<usize>,
    /// Simulated true phase for mle-sim
    #[arg(long)]
    pub phi_true: Option<f64>,
    /// Lower end of the estimation window
    #[arg(long)]
    pub window_lo: Option<f64>,
    /// Upper end of the estimation window
    #[arg(long)]
    pub window_hi: Option<f64>,
    /// Readouts per batch (mle-sim) or per stage (adaptive-search)
    #[arg(long)]
    pub shots: Option<usize>,
    /// Independent experiments in mle-sim
    #[arg(long)]
    pub batches: Option<usize>,
    /// Master seed of the random stream
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coarse likelihood grid size
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Golden-section refinement steps
    #[arg(long)]
    pub refine_iters: Option<usize>,
    /// Adaptive schedule as squeezing values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub stage_r: Option<Vec<f64>>,
    /// Adaptive schedule as applied fields in tesla, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub stage_fields_t: Option<Vec<f64>>,
    /// Lower end of the prior window for ω_↑/2π in GHz
    #[arg(long)]
    pub prior_lo_ghz: Option<f64>,
    /// Upper end of the prior window for ω_↑/2π in GHz
    #[arg(long)]
    pub prior_hi_ghz: Option<f64>,
    /// Readout times per adaptive stage
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Threshold on 2Δln L for a stage to count as localized
    #[arg(long)]
    pub noise_floor: Option<f64>,
    /// Output format; a .json --out path implies json
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),* $(,)?) => {
        ConfigLayer { $($f: $top.$f.or($base.$f)),* }
    };
}

impl ConfigLayer {
    /// `top` wins wherever it is set.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        overlay!(self, top;
            r, omega0_ghz, gap_ghz, field_t, omega_ghz, chi_ghz, gyromagnetic, omega_up_ghz,
            ns_product, t2star_ns, tail_tol, field_min_t, field_max_t, phi_min, phi_max, steps,
            phi_true, window_lo, window_hi, shots, batches, seed, grid_points, refine_iters,
            stage_r, stage_fields_t, prior_lo_ghz, prior_hi_ghz, scan_points, noise_floor, format,
        )
    }

    fn has_physical(&self) -> bool {
        self.omega0_ghz.is_some()
            || self.gap_ghz.is_some()
            || self.field_t.is_some()
            || self.omega_ghz.is_some()
            || self.chi_ghz.is_some()
    }
}

/// Reads a config layer from a JSON config file or from any output file of
/// this tool (its embedded `meta.config`).
pub fn load_layer(path: &Path) -> Result<ConfigLayer, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |msg: String| CliError::Config(vec![format!("config {}: {msg}", path.display())]);
    let json = match text.lines().find_map(|l| l.strip_prefix("# meta: ")) {
        Some(meta) => meta.to_string(),
        None => text,
    };
    let value: serde_json::Value = serde_json::from_str(&json).map_err(|e| bad(e.to_string()))?;
    let layer = match value.get("meta").or(value.get("config").map(|_| &value)) {
        Some(meta) => meta.get("config").cloned().unwrap_or_default(),
        None => value,
    };
    serde_json::from_value(layer).map_err(|e| bad(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps)
            .map(|i| self.min + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Where the squeezing comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Physics {
    /// Given `r` values and `ω_↑` in rad/ns.
    Direct { r: Vec<f64>, omega_up: f64 },
    Physical(SystemParams),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Squeezing(Vec<f64>),
    Fields { template: SweepTemplate, fields: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptivePlan {
    pub schedule: Schedule,
    pub shots: usize,
    /// rad/ns.
    pub omega_true: f64,
    pub prior_lo: f64,
    pub prior_hi: f64,
    pub scan_points: usize,
    pub noise_floor: f64,
}

/// A validated run.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub mode: Mode,
    pub format: Format,
    /// The merged layer with every default filled in; recorded in `meta`.
    pub config: ConfigLayer,
    pub seed: u64,
    pub tail_tol: f64,
    pub physics: Option<Physics>,
    pub template: Option<SweepTemplate>,
    pub grid: Option<Grid>,
    pub t2star: Option<f64>,
    pub ns_product: Option<f64>,
    pub shots: usize,
    pub batches: usize,
    pub phi_true: f64,
    pub window: Option<Window>,
    pub mle: MleOptions,
    pub adaptive: Option<AdaptivePlan>,
}

pub const DEFAULT_SWEEP_GAP_GHZ: f64 = 7.0;
pub const DEFAULT_SWEEP_COUPLING_GHZ: f64 = 0.5;
pub const DEFAULT_FIELD_MIN_T: f64 = -0.25;
pub const DEFAULT_FIELD_MAX_T: f64 = 0.3;
pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_PHI_TRUE: f64 = PI + 0.05;
pub const DEFAULT_SHOTS: usize = 1000;
pub const DEFAULT_BATCHES: usize = 200;
pub const DEFAULT_ADAPTIVE_TRUTH_GHZ: f64 = 2.8;
pub const DEFAULT_PRIOR_GHZ: (f64, f64) = (2.5, 3.1);

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// Collects every violated requirement instead of stopping at the first.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Merges defaults for `mode` into `layer` and validates it.
pub fn resolve(mode: Mode, layer: ConfigLayer) -> Result<Resolved, CliError> {
    let mut c = layer;
    let mut p = Problems::default();

    let direct = c.r.is_some();
    let physical = c.has_physical();
    let uses_physics = matches!(
        mode,
        Mode::Params | Mode::Coherence | Mode::Fisher | Mode::MleSim | Mode::QslCheck
    );
    if uses_physics {
        p.check(direct != physical, || {
            "physics: give exactly one of --r or physical parameters (--omega0-ghz or --gap-ghz/--field-t, with --omega-ghz, --chi-ghz)".into()
        });
        p.check(!(physical && c.omega_up_ghz.is_some()), || {
            "omega_up_ghz: derived from physical parameters, do not set it as well".into()
        });
    }
    if mode == Mode::Params {
        p.check(!direct, || "r: params mode needs physical parameters".into());
    }
    if mode == Mode::SweepField {
        p.check(!direct, || "r: sweep-field derives r from the field".into());
        p.check(c.omega0_ghz.is_none() && c.field_t.is_none(), || {
            "omega0_ghz/field_t: sweep-field takes --gap-ghz and a field range".into()
        });
    }
    if mode == Mode::AdaptiveSearch {
        p.check(c.stage_r.is_some() != c.stage_fields_t.is_some(), || {
            "stages: give exactly one of --stage-r or --stage-fields-t".into()
        });
        p.check(!direct && c.omega0_ghz.is_none() && c.field_t.is_none(), || {
            "physics: adaptive-search takes its squeezing from the stage schedule".into()
        });
    }

    // Defaults.
    fill(&mut c.tail_tol, DEFAULT_TAIL_TOL);
    fill(&mut c.seed, 0);
    fill(&mut c.format, Format::Csv);
    match mode {
        Mode::Params => {}
        Mode::SweepField => {
            fill(&mut c.gap_ghz, DEFAULT_SWEEP_GAP_GHZ);
            fill(&mut c.omega_ghz, DEFAULT_SWEEP_COUPLING_GHZ);
            fill(&mut c.chi_ghz, DEFAULT_SWEEP_COUPLING_GHZ);
            fill(&mut c.field_min_t, DEFAULT_FIELD_MIN_T);
            fill(&mut c.field_max_t, DEFAULT_FIELD_MAX_T);
            fill(&mut c.steps, DEFAULT_STEPS);
        }
        Mode::Coherence | Mode::Fisher => {
            fill(&mut c.phi_min, 0.0);
            fill(&mut c.phi_max, TAU);
            fill(&mut c.steps, DEFAULT_STEPS);
        }
        Mode::QslCheck => {
            fill(&mut c.phi_min, 0.0);
            fill(&mut c.phi_max, PI);
            fill(&mut c.steps, DEFAULT_STEPS);
        }
        Mode::MleSim => {
            fill(&mut c.phi_true, DEFAULT_PHI_TRUE);
            let w = Window::containing(c.phi_true.unwrap_or(DEFAULT_PHI_TRUE));
            fill(&mut c.window_lo, w.lo);
            fill(&mut c.window_hi, w.hi);
            fill(&mut c.shots, DEFAULT_SHOTS);
            fill(&mut c.batches, DEFAULT_BATCHES);
        }
        Mode::AdaptiveSearch => {
            if c.stage_fields_t.is_some() {
                fill(&mut c.gap_ghz, DEFAULT_SWEEP_GAP_GHZ);
                fill(&mut c.omega_ghz, DEFAULT_SWEEP_COUPLING_GHZ);
                fill(&mut c.chi_ghz, DEFAULT_SWEEP_COUPLING_GHZ);
            }
            fill(&mut c.omega_up_ghz, DEFAULT_ADAPTIVE_TRUTH_GHZ);
            fill(&mut c.prior_lo_ghz, DEFAULT_PRIOR_GHZ.0);
            fill(&mut c.prior_hi_ghz, DEFAULT_PRIOR_GHZ.1);
            fill(&mut c.shots, DEFAULT_SHOTS);
            fill(&mut c.scan_points, DEFAULT_SCAN_POINTS);
            fill(&mut c.noise_floor, DEFAULT_NOISE_FLOOR);
        }
    }
    if matches!(mode, Mode::MleSim | Mode::AdaptiveSearch) {
        let d = MleOptions::default();
        fill(&mut c.grid_points, d.grid_points);
        fill(&mut c.refine_iters, d.refine_iters);
    }
    if direct && uses_physics {
        fill(&mut c.omega_up_ghz, radns_to_ghz(1.0));
    }
    if physical || c.stage_fields_t.is_some() || mode == Mode::SweepField {
        fill(&mut c.gyromagnetic, DEFAULT_GYROMAGNETIC_GHZ_PER_T);
    }

    // Value checks.
    let tail_tol = c.tail_tol.unwrap_or_default();
    p.check(tail_tol > 0.0 && tail_tol < 1.0, || format!("tail_tol: must lie in (0, 1), got {tail_tol}"));
    if let Some(steps) = c.steps {
        p.check(steps >= 2, || format!("steps: must be >= 2, got {steps}"));
    }
    if let Some(rs) = &c.r {
        p.check(!rs.is_empty(), || "r: list is empty".into());
        p.check(rs.iter().all(|r| r.is_finite() && *r >= 0.0), || format!("r: values must be finite and >= 0, got {rs:?}"));
        if mode == Mode::MleSim {
            p.check(rs.len() == 1, || format!("r: mle-sim takes a single value, got {}", rs.len()));
        }
    }
    if let Some(w) = c.omega_up_ghz {
        p.check(positive(w), || format!("omega_up_ghz: must be > 0, got {w}"));
    }
    if let Some(t2) = c.t2star_ns {
        p.check(positive(t2), || format!("t2star_ns: must be > 0, got {t2}"));
    }
    if let (Some(a), Some(b)) = (c.phi_min, c.phi_max) {
        p.check(a.is_finite() && b.is_finite() && a < b, || format!("phi_min/phi_max: need phi_min < phi_max, got [{a}, {b}]"));
    }
    if mode == Mode::SweepField {
        let (a, b) = (c.field_min_t.unwrap_or_default(), c.field_max_t.unwrap_or_default());
        p.check(a.is_finite() && b.is_finite() && a < b, || {
            format!("field_min_t/field_max_t: need field_min_t < field_max_t, got [{a}, {b}]")
        });
    }
    if let Some(s) = c.shots {
        p.check(s >= 1, || "shots: must be >= 1".into());
    }
    if let Some(b) = c.batches {
        p.check(b >= crate::inference::mle::MIN_BATCHES, || {
            format!("batches: must be >= {}, got {b}", crate::inference::mle::MIN_BATCHES)
        });
    }
    if let Some(g) = c.grid_points {
        p.check(g >= crate::inference::mle::MIN_GRID_POINTS, || {
            format!("grid_points: must be >= {}, got {g}", crate::inference::mle::MIN_GRID_POINTS)
        });
    }

    let mut window = None;
    if mode == Mode::MleSim {
        let (lo, hi, phi) = (c.window_lo.unwrap_or_default(), c.window_hi.unwrap_or_default(), c.phi_true.unwrap_or_default());
        match Window::new(lo, hi) {
            Ok(w) => {
                p.check(w.contains(phi), || format!("phi_true: {phi} lies outside the window [{lo}, {hi}]"));
                window = Some(w);
            }
            Err(_) => p.0.push(format!(
                "window_lo/window_hi: [{lo}, {hi}] must lie inside one quarter period [kπ/2, (k+1)π/2]"
            )),
        }
    }

    let mut adaptive = None;
    if mode == Mode::AdaptiveSearch {
        let (lo, hi) = (c.prior_lo_ghz.unwrap_or_default(), c.prior_hi_ghz.unwrap_or_default());
        let truth = c.omega_up_ghz.unwrap_or_default();
        p.check(positive(lo) && lo < hi && hi.is_finite(), || {
            format!("prior_lo_ghz/prior_hi_ghz: need 0 < lo < hi, got [{lo}, {hi}]")
        });
        p.check(lo <= truth && truth <= hi, || format!("omega_up_ghz: truth {truth} lies outside the prior [{lo}, {hi}]"));
        let scan = c.scan_points.unwrap_or_default();
        p.check(scan >= 2, || format!("scan_points: must be >= 2, got {scan}"));
        let shots = c.shots.unwrap_or_default();
        p.check(shots >= scan, || format!("shots: need at least one shot per scan point ({scan}), got {shots}"));
        if let Some(rs) = &c.stage_r {
            p.check(!rs.is_empty(), || "stage_r: list is empty".into());
            p.check(rs.iter().all(|r| r.is_finite() && *r >= 0.0), || format!("stage_r: values must be finite and >= 0, got {rs:?}"));
        }
        if let Some(fs) = &c.stage_fields_t {
            p.check(!fs.is_empty(), || "stage_fields_t: list is empty".into());
            p.check(fs.iter().all(|f| f.is_finite()), || format!("stage_fields_t: values must be finite, got {fs:?}"));
        }
        let floor = c.noise_floor.unwrap_or_default();
        p.check(floor.is_finite() && floor >= 0.0, || format!("noise_floor: must be finite and >= 0, got {floor}"));
    }

    // Physical parameters are range-checked by the model constructors.
    let mut physics = None;
    let mut template = None;
    if uses_physics && direct && !physical {
        physics = Some(Physics::Direct {
            r: c.r.clone().unwrap_or_default(),
            omega_up: crate::model::ghz_to_radns(c.omega_up_ghz.unwrap_or(radns_to_ghz(1.0))),
        });
    }
    if uses_physics && physical && !direct {
        match physical_params(&c) {
            Ok(params) => physics = Some(Physics::Physical(params)),
            Err(mut errs) => p.0.append(&mut errs),
        }
    }
    if mode == Mode::SweepField || c.stage_fields_t.is_some() {
        match sweep_template(&c) {
            Ok(t) => template = Some(t),
            Err(mut errs) => p.0.append(&mut errs),
        }
    }
    if mode == Mode::AdaptiveSearch && p.0.is_empty() {
        let schedule = match (&c.stage_r, &c.stage_fields_t, template) {
            (Some(rs), None, _) => Schedule::Squeezing(rs.clone()),
            (None, Some(fs), Some(t)) => Schedule::Fields {
                template: t,
                fields: fs.clone(),
            },
            _ => unreachable!("schedule validated above"),
        };
        adaptive = Some(AdaptivePlan {
            schedule,
            shots: c.shots.unwrap_or_default(),
            omega_true: crate::model::ghz_to_radns(c.omega_up_ghz.unwrap_or_default()),
            prior_lo: crate::model::ghz_to_radns(c.prior_lo_ghz.unwrap_or_default()),
            prior_hi: crate::model::ghz_to_radns(c.prior_hi_ghz.unwrap_or_default()),
            scan_points: c.scan_points.unwrap_or_default(),
            noise_floor: c.noise_floor.unwrap_or_default(),
        });
    }

    if !p.0.is_empty() {
        return Err(CliError::Config(p.0));
    }

    let grid = match mode {
        Mode::SweepField => Some(Grid {
            min: c.field_min_t.unwrap_or_default(),
            max: c.field_max_t.unwrap_or_default(),
            steps: c.steps.unwrap_or_default(),
        }),
        Mode::Coherence | Mode::Fisher | Mode::QslCheck => Some(Grid {
            min: c.phi_min.unwrap_or_default(),
            max: c.phi_max.unwrap_or_default(),
            steps: c.steps.unwrap_or_default(),
        }),
        _ => None,
    };
    Ok(Resolved {
        mode,
        format: c.format.unwrap_or(Format::Csv),
        seed: c.seed.unwrap_or_default(),
        tail_tol,
        physics,
        template,
        grid,
        t2star: c.t2star_ns,
        ns_product: c.ns_product,
        shots: c.shots.unwrap_or_default(),
        batches: c.batches.unwrap_or_default(),
        phi_true: c.phi_true.unwrap_or_default(),
        window,
        mle: MleOptions {
            grid_points: c.grid_points.unwrap_or(MleOptions::default().grid_points),
            refine_iters: c.refine_iters.unwrap_or(MleOptions::default().refine_iters),
        },
        adaptive,
        config: c,
    })
}

fn physical_params(c: &ConfigLayer) -> Result<SystemParams, Vec<String>> {
    let mut p = Problems::default();
    p.check(c.omega_ghz.is_some(), || "omega_ghz: required with physical parameters".into());
    p.check(c.chi_ghz.is_some(), || "chi_ghz: required with physical parameters".into());
    let by_field = c.gap_ghz.is_some() || c.field_t.is_some();
    p.check(c.omega0_ghz.is_some() != by_field, || {
        "omega0_ghz/gap_ghz: give either --omega0-ghz or --gap-ghz with --field-t".into()
    });
    if by_field {
        p.check(c.gap_ghz.is_some() && c.field_t.is_some(), || "gap_ghz/field_t: both are required together".into());
    }
    if !p.0.is_empty() {
        return Err(p.0);
    }
    let (omega, chi) = (c.omega_ghz.unwrap_or_default(), c.chi_ghz.unwrap_or_default());
    let params = match c.omega0_ghz {
        Some(w0) => SystemParams::from_ghz(w0, omega, chi),
        None => {
            let map = FieldMap::new(c.gap_ghz.unwrap_or_default())
                .with_gyromagnetic(c.gyromagnetic.unwrap_or(DEFAULT_GYROMAGNETIC_GHZ_PER_T));
            SystemParams::from_field(&map, c.field_t.unwrap_or_default(), omega, chi)
        }
    };
    let mut params = params.map_err(|e| vec![e.to_string()])?;
    if let Some(t2) = c.t2star_ns {
        params = params.with_t2star(t2).map_err(|e| vec![e.to_string()])?;
    }
    if let Some(ns) = c.ns_product {
        params = params.with_ns_product(ns).map_err(|e| vec![e.to_string()])?;
    }
    Ok(params)
}

fn sweep_template(c: &ConfigLayer) -> Result<SweepTemplate, Vec<String>> {
    let (gap, omega, chi) = (c.gap_ghz.unwrap_or_default(), c.omega_ghz.unwrap_or_default(), c.chi_ghz.unwrap_or_default());
    let gyro = c.gyromagnetic.unwrap_or(DEFAULT_GYROMAGNETIC_GHZ_PER_T);
    let mut p = Problems::default();
    p.check(gap.is_finite(), || format!("gap_ghz: must be finite, got {gap}"));
    p.check(omega.is_finite() && omega >= 0.0, || format!("omega_ghz: must be finite and >= 0, got {omega}"));
    p.check(chi.is_finite() && chi >= 0.0, || format!("chi_ghz: must be finite and >= 0, got {chi}"));
    p.check(positive(gyro), || format!("gyromagnetic: must be > 0, got {gyro}"));
    if !p.0.is_empty() {
        return Err(p.0);
    }
    Ok(SweepTemplate {
        field_map: FieldMap::new(gap).with_gyromagnetic(gyro),
        pair_coupling_ghz: omega,
        dispersive_ghz: chi,
    })
}
