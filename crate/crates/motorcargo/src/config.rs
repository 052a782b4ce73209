//! Run configuration: TOML files with flat keys, presets and CLI overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use motorcargo_core::{ForceVelocityCurve, PhysicalParams, SpringLaw, SpringPotential};
use serde::{Deserialize, Serialize, Serializer};

pub const DEFAULT_PRESET: &str = "kinesin_invitro";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REPLICAS: usize = 64;
/// Default simulated horizon in slow time units.
pub const DEFAULT_T_BAR: f64 = 10.0;
pub const DEFAULT_TOL_QUAD: f64 = 1e-6;
/// Contour length used by `wlc` without arguments and by `custom(..)` tables (nm).
pub const DEFAULT_CONTOUR: f64 = 70.0;

pub fn preset(name: &str) -> Result<PhysicalParams> {
    match name {
        "kinesin_invitro" => Ok(PhysicalParams::kinesin_invitro()),
        other => bail!("unknown preset `{other}` (available: kinesin_invitro)"),
    }
}

/// Keys accepted in a config file. Physical keys override the preset.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,

    pub step_size: Option<f64>,
    #[serde(alias = "F_star", alias = "fstar")]
    pub stall_force: Option<f64>,
    #[serde(alias = "v")]
    pub free_velocity: Option<f64>,
    #[serde(alias = "kappa")]
    pub spring_kappa: Option<f64>,
    #[serde(alias = "sigma2")]
    pub motor_diffusion_sigma2: Option<f64>,
    #[serde(alias = "a")]
    pub cargo_radius: Option<f64>,
    #[serde(alias = "eta")]
    pub viscosity: Option<f64>,
    /// Cargo drag `gamma` (pN s/nm); sets the viscosity through Stokes' law.
    #[serde(alias = "gamma")]
    pub friction: Option<f64>,
    #[serde(alias = "theta")]
    pub trap_force: Option<f64>,
    #[serde(alias = "kBT")]
    pub kbt: Option<f64>,
    pub v_max: Option<f64>,
    pub v_min: Option<f64>,
    #[serde(alias = "N")]
    pub motor_count: Option<u32>,

    pub spring: Option<String>,
    pub curve: Option<String>,
    pub contour_length: Option<f64>,

    pub seed: Option<u64>,
    #[serde(alias = "n_replicas")]
    pub replicas: Option<usize>,
    pub dt: Option<f64>,
    /// Horizon in slow time units.
    pub t_bar: Option<f64>,
    pub burn_in: Option<f64>,
    pub tol_quad: Option<f64>,
    /// Number of replicas per simulated point whose paths are written out.
    pub dump_replicas: Option<usize>,
    #[serde(alias = "theta_grid")]
    pub theta_grid_pn: Option<Vec<f64>>,
    pub gamma_grid: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn params(&self) -> Result<PhysicalParams> {
        let mut p = preset(self.preset.as_deref().unwrap_or(DEFAULT_PRESET))?;
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut p.step_size, self.step_size);
        set(&mut p.stall_force, self.stall_force);
        set(&mut p.free_velocity, self.free_velocity);
        set(&mut p.spring_kappa, self.spring_kappa);
        set(&mut p.motor_diffusion_sigma2, self.motor_diffusion_sigma2);
        set(&mut p.cargo_radius, self.cargo_radius);
        set(&mut p.viscosity, self.viscosity);
        set(&mut p.trap_force, self.trap_force);
        set(&mut p.kbt, self.kbt);
        set(&mut p.v_max, self.v_max);
        set(&mut p.v_min, self.v_min);
        if let Some(n) = self.motor_count {
            p.motor_count = n;
        }
        if let Some(gamma) = self.friction {
            ensure!(self.viscosity.is_none(), "set either `viscosity` or `friction`, not both");
            p = p.with_friction(gamma);
        }
        p.validate()?;
        Ok(p)
    }
}

/// Tail force law named in a config.
#[derive(Debug, Clone, PartialEq)]
pub enum SpringSpec {
    Linear,
    /// `None` stiffness means the configured `spring_kappa`.
    Wlc {
        kappa: Option<f64>,
        contour: f64,
    },
    /// Table of `Phi'` on a uniform `xi` grid (CSV columns `xi,dphi`).
    Custom(PathBuf),
}

impl fmt::Display for SpringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Wlc { kappa: Some(k), contour } => write!(f, "wlc({k}, {contour})"),
            Self::Wlc { kappa: None, contour } => write!(f, "wlc(spring_kappa, {contour})"),
            Self::Custom(p) => write!(f, "custom({})", p.display()),
        }
    }
}

impl Serialize for SpringSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Splits `name(a, b)` into `name` and its trimmed arguments.
fn call_syntax(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, Vec::new())),
        Some(open) => {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| anyhow!("missing `)` in `{s}`"))?;
            let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
            Ok((s[..open].trim(), args))
        }
    }
}

fn number(s: &str) -> Result<f64> {
    s.parse().with_context(|| format!("`{s}` is not a number"))
}

impl FromStr for SpringSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_syntax(s)?;
        match (name, args.as_slice()) {
            ("linear", []) => Ok(Self::Linear),
            ("wlc", []) => Ok(Self::Wlc { kappa: None, contour: DEFAULT_CONTOUR }),
            ("wlc", [k, lc]) => Ok(Self::Wlc { kappa: Some(number(k)?), contour: number(lc)? }),
            ("custom", [file]) => Ok(Self::Custom(PathBuf::from(file.trim_matches(|c| c == '"' || c == '\'')))),
            _ => bail!("unknown spring `{s}` (expected linear, wlc(kappa, lc) or custom(file))"),
        }
    }
}

/// Force-velocity curve named in a config.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// Built from `v_max`, `v_min` and the free velocity.
    Sigmoid,
    Linear,
    /// CSV columns `f,g` on a uniform force grid covering `[0, 1]`.
    Table(PathBuf),
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sigmoid => f.write_str("sigmoid"),
            Self::Linear => f.write_str("linear"),
            Self::Table(p) => write!(f, "table({})", p.display()),
        }
    }
}

impl Serialize for CurveSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for CurveSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_syntax(s)?;
        match (name, args.as_slice()) {
            ("sigmoid", []) => Ok(Self::Sigmoid),
            ("linear", []) => Ok(Self::Linear),
            ("table", [file]) => Ok(Self::Table(PathBuf::from(file.trim_matches(|c| c == '"' || c == '\'')))),
            _ => bail!("unknown curve `{s}` (expected sigmoid, linear or table(file))"),
        }
    }
}

/// Reads two columns of a headed CSV and checks the first is uniform.
fn uniform_table(path: &Path, x: &str, y: &str) -> Result<(f64, f64, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| anyhow!("{} has no `{name}` column", path.display()))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in rdr.records() {
        let row = row?;
        xs.push(number(&row[ix])?);
        ys.push(number(&row[iy])?);
    }
    ensure!(xs.len() >= 4, "{} needs at least four rows", path.display());
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    for (k, v) in xs.iter().enumerate() {
        ensure!(
            (v - (xs[0] + k as f64 * h)).abs() <= 1e-9 * h.abs().max(1.0),
            "{}: `{x}` must be a uniform increasing grid",
            path.display()
        );
    }
    ensure!(h > 0.0, "{}: `{x}` must increase", path.display());
    Ok((xs[0], h, ys))
}

/// Resolved description of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub experiment: String,
    pub preset: String,
    pub params: PhysicalParams,
    pub spring: SpringSpec,
    pub curve: CurveSpec,
    pub contour_length: f64,
    pub theta_grid_pn: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub seed: u64,
    pub replicas: usize,
    pub dt: f64,
    pub t_bar: f64,
    pub burn_in: f64,
    pub tol_quad: f64,
    pub dump_replicas: usize,
    /// Not part of the provenance header, so reruns into another directory
    /// produce identical files.
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Relative table paths resolve against this directory.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides, applied after the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_quad: Option<f64>,
    pub replicas: Option<usize>,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let mut g: Vec<f64> = linspace(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

impl ExperimentSpec {
    /// Spec for `experiment` from an optional config file and overrides;
    /// grids default per experiment.
    pub fn resolve(experiment: &str, config: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let file = match config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let base_dir = config.and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
        Self::from_file(experiment, file, base_dir, overrides)
    }

    pub fn from_file(experiment: &str, file: ConfigFile, base_dir: PathBuf, overrides: &Overrides) -> Result<Self> {
        let params = file.params()?;
        let (theta_default, gamma_default) = default_grids(experiment)?;
        let spring = match file.spring.as_deref().unwrap_or("linear").parse()? {
            SpringSpec::Wlc { kappa: None, contour } => SpringSpec::Wlc { kappa: Some(params.spring_kappa), contour },
            other => other,
        };
        let spec = Self {
            experiment: experiment.to_string(),
            preset: file.preset.clone().unwrap_or_else(|| DEFAULT_PRESET.to_string()),
            params,
            spring,
            curve: file.curve.as_deref().unwrap_or("sigmoid").parse()?,
            contour_length: file.contour_length.unwrap_or(DEFAULT_CONTOUR),
            theta_grid_pn: file.theta_grid_pn.clone().unwrap_or(theta_default),
            gamma_grid: file.gamma_grid.clone().unwrap_or(gamma_default),
            seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            replicas: overrides.replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS),
            dt: file.dt.unwrap_or(motorcargo_core::sde::DEFAULT_DT),
            t_bar: file.t_bar.unwrap_or(DEFAULT_T_BAR),
            burn_in: file.burn_in.unwrap_or(motorcargo_core::sde::DEFAULT_BURN_IN),
            tol_quad: overrides.tol_quad.or(file.tol_quad).unwrap_or(DEFAULT_TOL_QUAD),
            dump_replicas: file.dump_replicas.unwrap_or(0),
            out_dir: overrides.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
            base_dir,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("theta_grid_pn", &self.theta_grid_pn), ("gamma_grid", &self.gamma_grid)] {
            ensure!(!grid.is_empty(), "`{name}` must not be empty");
            ensure!(grid.iter().all(|x| x.is_finite()), "`{name}` must be finite");
            ensure!(grid.windows(2).all(|w| w[0] < w[1]), "`{name}` must be strictly increasing");
        }
        ensure!(self.gamma_grid.iter().all(|g| *g > 0.0), "`gamma_grid` must be positive");
        ensure!(self.replicas >= 1, "need at least one replica");
        ensure!(self.t_bar > 0.0, "`t_bar` must be positive");
        ensure!(self.tol_quad > 0.0, "`tol_quad` must be positive");
        ensure!(self.contour_length > 0.0, "`contour_length` must be positive");
        let sim = motorcargo_core::SimConfig {
            dt: self.dt,
            burn_in: self.burn_in,
            ..motorcargo_core::SimConfig::for_epsilon(1.0)
        };
        sim.validate()?;
        let th = &self.theta_grid_pn;
        match self.experiment.as_str() {
            "fv1" => ensure!(th[0] >= -10.0 && th[th.len() - 1] <= 20.0, "fv1 trap forces must lie in [-10, 20] pN"),
            "fv2" => ensure!(th[0] <= 0.0 && th[th.len() - 1] >= 25.0, "fv2 trap forces must cover [0, 25] pN"),
            "visc-sweep" => ensure!(
                self.gamma_grid.iter().all(|g| (1e-5 * (1.0 - 1e-9)..=1e-2 * (1.0 + 1e-9)).contains(g)),
                "visc-sweep friction grid must lie in [1e-5, 1e-2] pN s/nm"
            ),
            _ => {}
        }
        Ok(())
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn spring_law(&self) -> Result<SpringLaw> {
        let kappa = self.params.spring_kappa;
        Ok(match &self.spring {
            SpringSpec::Linear => SpringLaw::linear(kappa),
            SpringSpec::Wlc { kappa: k, contour } => SpringLaw::wormlike_chain(k.unwrap_or(kappa), *contour)?,
            SpringSpec::Custom(file) => {
                let (xi0, h, dphi) = uniform_table(&self.resolve_path(file), "xi", "dphi")?;
                let lc = self.contour_length;
                SpringLaw::General {
                    potential: SpringPotential::tabulated(xi0, h, dphi)?,
                    length_scale: lc,
                    force_scale: kappa * lc,
                }
            }
        })
    }

    pub fn force_velocity(&self) -> Result<ForceVelocityCurve> {
        Ok(match &self.curve {
            CurveSpec::Sigmoid => self.params.sigmoid_curve()?,
            CurveSpec::Linear => ForceVelocityCurve::Linear,
            CurveSpec::Table(file) => {
                let (f0, h, g) = uniform_table(&self.resolve_path(file), "f", "g")?;
                ForceVelocityCurve::tabulated(f0, h, g)?
            }
        })
    }
}

/// Default `(theta grid in pN, friction grid)` for an experiment.
pub fn default_grids(experiment: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let gammas = vec![PhysicalParams::WATER_FRICTION];
    Ok(match experiment {
        "fv1" => (linspace(-10.0, 20.0, 31), gammas),
        "fv2" | "regime-panels" => {
            let g = if experiment == "regime-panels" { vec![1e-3, 1e-2] } else { gammas };
            (linspace(0.0, 25.0, 21), g)
        }
        "visc-sweep" => (vec![0.0], logspace(1e-5, 1e-2, 13)),
        "stall" | "density-dump" => (vec![0.0], gammas),
        other => bail!("unknown experiment `{other}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spring_syntax() {
        assert_eq!("linear".parse::<SpringSpec>().unwrap(), SpringSpec::Linear);
        assert_eq!(
            " wlc(0.34, 70) ".parse::<SpringSpec>().unwrap(),
            SpringSpec::Wlc { kappa: Some(0.34), contour: 70.0 }
        );
        assert_eq!("custom(tail.csv)".parse::<SpringSpec>().unwrap(), SpringSpec::Custom("tail.csv".into()));
        assert!("wlc(1)".parse::<SpringSpec>().is_err());
        assert!("hooke".parse::<SpringSpec>().is_err());
        assert!("custom(a.csv".parse::<SpringSpec>().is_err());
    }

    #[test]
    fn grids() {
        let g = logspace(1e-5, 1e-2, 13);
        assert_eq!(g.len(), 13);
        assert_eq!(g[12], 1e-2);
        assert!((g[0] - 1e-5).abs() < 1e-18);
        assert_eq!(linspace(-10.0, 20.0, 11)[5], 5.0);
    }
}
