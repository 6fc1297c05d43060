use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bubbles::{critical_exponent, critical_trace_exponent};

use super::CampaignError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Bubbles,
    Identities,
    Lemmas,
    Thresholds,
    Solve,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Constants,
        Command::Bubbles,
        Command::Identities,
        Command::Lemmas,
        Command::Thresholds,
        Command::Solve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Bubbles => "bubbles",
            Command::Identities => "identities",
            Command::Lemmas => "lemmas",
            Command::Thresholds => "thresholds",
            Command::Solve => "solve",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s.trim())
    }

    fn default_dims(self) -> Vec<usize> {
        match self {
            Command::Constants => (3..=7).collect(),
            Command::Bubbles => (3..=6).collect(),
            Command::Identities => (4..=10).collect(),
            Command::Lemmas | Command::Thresholds => (3..=5).collect(),
            Command::Solve => vec![3],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s.trim() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// An exponent given as a number or as the critical value of each dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentSpec {
    Value(f64),
    Critical,
}

impl ExponentSpec {
    pub fn resolve(self, critical: f64) -> f64 {
        match self {
            ExponentSpec::Value(v) => v,
            ExponentSpec::Critical => critical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance on fitted first-order coefficients.
    pub coeff: f64,
    /// Relative tolerance on fitted constant terms.
    pub c0: f64,
    /// Absolute tolerance on fitted powers.
    pub power: f64,
    /// Bubble PDE and boundary residuals.
    pub residual: f64,
    /// Relative tolerance of the moment identities.
    pub identity: f64,
    /// Relative tolerance of the half-space energy identities.
    pub energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            coeff: 0.05,
            c0: 1e-6,
            power: 0.02,
            residual: 1e-9,
            identity: 1e-9,
            energy: 1e-6,
        }
    }
}

/// A fully resolved campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub command: Command,
    pub dims: Vec<usize>,
    /// Volume exponents (solve grid; the subcritical `r` of the trace
    /// regime in `thresholds`).
    pub r_values: Vec<ExponentSpec>,
    /// Boundary exponents (solve grid; the subcritical `q` of the volume
    /// regime in `thresholds`).
    pub q_values: Vec<ExponentSpec>,
    /// Sign-change counts of the solve grid.
    pub nodes: Vec<usize>,
    /// Principal curvature shared by all directions of the boundary model.
    pub curvature: f64,
    pub patch_radius: f64,
    /// Radius of the solver ball and of the ball bounding gap domains.
    pub ball_radius: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    /// Scale of the threshold gaps; `None` uses 1e-3 for N = 3 and 1e-2
    /// otherwise.
    pub gap_eps: Option<f64>,
    pub mesh: usize,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
}

/// Campaign settings from one source; later layers override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigLayer {
    pub command: Option<Command>,
    pub dims: Option<Vec<usize>>,
    pub r_values: Option<Vec<ExponentSpec>>,
    pub q_values: Option<Vec<ExponentSpec>>,
    pub nodes: Option<Vec<usize>>,
    pub curvature: Option<f64>,
    pub patch_radius: Option<f64>,
    pub ball_radius: Option<f64>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub eps_points: Option<usize>,
    pub gap_eps: Option<f64>,
    pub mesh: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub coeff_tol: Option<f64>,
    pub c0_tol: Option<f64>,
    pub power_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub identity_tol: Option<f64>,
    pub energy_tol: Option<f64>,
}

fn config_err(msg: impl Into<String>) -> CampaignError {
    CampaignError::Config(msg.into())
}

/// Parses `"4..10"`, `"4..=10"`, `"3,4,5"` or mixtures such as `"3,5..7"`
/// (ranges are inclusive).
pub fn parse_dims(s: &str) -> Result<Vec<usize>, CampaignError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.trim_start_matches('=');
            let lo: usize = a
                .trim()
                .parse()
                .map_err(|_| config_err(format!("bad dimension range `{part}`")))?;
            let hi: usize = b
                .trim()
                .parse()
                .map_err(|_| config_err(format!("bad dimension range `{part}`")))?;
            if hi < lo {
                return Err(config_err(format!("empty dimension range `{part}`")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| config_err(format!("bad dimension `{part}`")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(config_err("no dimensions given"));
    }
    Ok(out)
}

/// Comma-separated exponents; `crit` stands for the critical value.
pub fn parse_exponents(s: &str) -> Result<Vec<ExponentSpec>, CampaignError> {
    let out: Result<Vec<_>, _> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| match p {
            "crit" | "critical" => Ok(ExponentSpec::Critical),
            _ => parse_float("exponent", p).map(ExponentSpec::Value),
        })
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err(config_err("empty exponent list"));
    }
    Ok(out)
}

pub fn parse_counts(s: &str) -> Result<Vec<usize>, CampaignError> {
    let out: Result<Vec<usize>, _> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| config_err(format!("bad count `{p}`")))
        })
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err(config_err("empty count list"));
    }
    Ok(out)
}

fn parse_float(key: &str, v: &str) -> Result<f64, CampaignError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| config_err(format!("`{key}` expects a number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CampaignError> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| config_err(format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

impl ConfigLayer {
    /// Reads a config file: `key = value` lines under the section headers
    /// `[campaign]`, `[boundary]`, `[eps]`, `[solve]`, `[tolerances]`.
    pub fn from_ini_str(text: &str) -> Result<ConfigLayer, CampaignError> {
        if text.trim().is_empty() {
            return Err(config_err("config file is empty"));
        }
        let ini = ini::Ini::load_from_str(text)
            .map_err(|e| config_err(format!("config parse error: {e}")))?;
        let mut layer = ConfigLayer::default();
        let mut seen = 0;
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, value) in props.iter() {
                seen += 1;
                layer.set(section, key, value)?;
            }
        }
        if seen == 0 {
            return Err(config_err("config file has no settings"));
        }
        Ok(layer)
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<(), CampaignError> {
        match (section, key) {
            ("campaign", "command") => {
                self.command = Some(
                    Command::parse(v)
                        .ok_or_else(|| config_err(format!("unknown command `{v}`")))?,
                )
            }
            ("campaign", "dims") => self.dims = Some(parse_dims(v)?),
            ("campaign", "out") => self.out_dir = Some(PathBuf::from(v.trim())),
            ("campaign", "format") => {
                self.format = Some(
                    OutputFormat::parse(v)
                        .ok_or_else(|| config_err(format!("unknown format `{v}`")))?,
                )
            }
            ("boundary", "curvature") => self.curvature = Some(parse_float(key, v)?),
            ("boundary", "patch_radius") => self.patch_radius = Some(parse_float(key, v)?),
            ("boundary", "ball_radius") => self.ball_radius = Some(parse_float(key, v)?),
            ("eps", "min") => self.eps_min = Some(parse_float(key, v)?),
            ("eps", "max") => self.eps_max = Some(parse_float(key, v)?),
            ("eps", "points") => self.eps_points = Some(parse_usize(key, v)?),
            ("eps", "gap") => self.gap_eps = Some(parse_float(key, v)?),
            ("solve", "r") => self.r_values = Some(parse_exponents(v)?),
            ("solve", "q") => self.q_values = Some(parse_exponents(v)?),
            ("solve", "nodes") => self.nodes = Some(parse_counts(v)?),
            ("solve", "mesh") => self.mesh = Some(parse_usize(key, v)?),
            ("solve", "tol") => self.tol = Some(parse_float(key, v)?),
            ("tolerances", "coeff") => self.coeff_tol = Some(parse_float(key, v)?),
            ("tolerances", "c0") => self.c0_tol = Some(parse_float(key, v)?),
            ("tolerances", "power") => self.power_tol = Some(parse_float(key, v)?),
            ("tolerances", "residual") => self.residual_tol = Some(parse_float(key, v)?),
            ("tolerances", "identity") => self.identity_tol = Some(parse_float(key, v)?),
            ("tolerances", "energy") => self.energy_tol = Some(parse_float(key, v)?),
            _ => {
                let name = if section.is_empty() {
                    key.to_string()
                } else {
                    format!("{section}.{key}")
                };
                return Err(config_err(format!("unknown config key `{name}`")));
            }
        }
        Ok(())
    }

    /// `self` with every field set in `over` replaced.
    pub fn overridden_by(self, over: ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigLayer { $($f: over.$f.or(self.$f)),* }
            };
        }
        pick!(
            command,
            dims,
            r_values,
            q_values,
            nodes,
            curvature,
            patch_radius,
            ball_radius,
            eps_min,
            eps_max,
            eps_points,
            gap_eps,
            mesh,
            tol,
            out_dir,
            format,
            coeff_tol,
            c0_tol,
            power_tol,
            residual_tol,
            identity_tol,
            energy_tol
        )
    }

    /// Fills defaults and validates.
    pub fn resolve(self) -> Result<CampaignConfig, CampaignError> {
        let command = self.command.ok_or_else(|| config_err("no command given"))?;
        let defaults = Tolerances::default();
        let cfg = CampaignConfig {
            command,
            dims: self.dims.unwrap_or_else(|| command.default_dims()),
            r_values: self.r_values.unwrap_or_default(),
            q_values: self.q_values.unwrap_or_default(),
            nodes: self.nodes.unwrap_or_else(|| vec![0]),
            curvature: self.curvature.unwrap_or(0.5),
            patch_radius: self.patch_radius.unwrap_or(0.8),
            ball_radius: self.ball_radius.unwrap_or(1.0),
            eps_min: self.eps_min.unwrap_or(1e-3),
            eps_max: self.eps_max.unwrap_or(1e-2),
            eps_points: self.eps_points.unwrap_or(8),
            gap_eps: self.gap_eps,
            mesh: self.mesh.unwrap_or(2000),
            tol: self.tol.unwrap_or(1e-8),
            out_dir: self
                .out_dir
                .unwrap_or_else(|| PathBuf::from("critbound-out")),
            format: self.format.unwrap_or(OutputFormat::Csv),
            tolerances: Tolerances {
                coeff: self.coeff_tol.unwrap_or(defaults.coeff),
                c0: self.c0_tol.unwrap_or(defaults.c0),
                power: self.power_tol.unwrap_or(defaults.power),
                residual: self.residual_tol.unwrap_or(defaults.residual),
                identity: self.identity_tol.unwrap_or(defaults.identity),
                energy: self.energy_tol.unwrap_or(defaults.energy),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl CampaignConfig {
    /// Defaults for `command`; fails for `solve`, which has no default exponents.
    pub fn for_command(command: Command) -> Result<CampaignConfig, CampaignError> {
        ConfigLayer {
            command: Some(command),
            ..ConfigLayer::default()
        }
        .resolve()
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.dims.is_empty() {
            return Err(config_err("no dimensions given"));
        }
        if let Some(d) = self.dims.iter().find(|d| **d < 3) {
            return Err(config_err(format!("dimension {d} is below 3")));
        }
        if self.command == Command::Identities {
            if let Some(d) = self.dims.iter().find(|d| **d < 4) {
                return Err(config_err(format!("identities need N >= 4, got {d}")));
            }
        }
        let positive = [
            ("curvature", self.curvature),
            ("patch_radius", self.patch_radius),
            ("ball_radius", self.ball_radius),
            ("eps min", self.eps_min),
            ("eps max", self.eps_max),
            ("tol", self.tol),
            ("coeff tolerance", self.tolerances.coeff),
            ("c0 tolerance", self.tolerances.c0),
            ("power tolerance", self.tolerances.power),
            ("residual tolerance", self.tolerances.residual),
            ("identity tolerance", self.tolerances.identity),
            ("energy tolerance", self.tolerances.energy),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(format!("`{name}` must be positive, got {v}")));
            }
        }
        if let Some(e) = self.gap_eps {
            if !(e.is_finite() && e > 0.0) {
                return Err(config_err(format!("gap eps must be positive, got {e}")));
            }
        }
        if self.eps_min >= self.eps_max {
            return Err(config_err("eps min must be below eps max"));
        }
        if self.eps_points < 4 {
            return Err(config_err("need at least 4 eps points"));
        }
        if self.mesh < 8 {
            return Err(config_err("mesh needs at least 8 cells"));
        }
        match self.command {
            Command::Solve => self.validate_solve_grid(),
            Command::Thresholds => self.validate_subcritical(),
            _ => Ok(()),
        }
    }

    fn validate_solve_grid(&self) -> Result<(), CampaignError> {
        if self.r_values.is_empty() || self.q_values.is_empty() {
            return Err(config_err("solve needs --r and --q"));
        }
        for &dim in &self.dims {
            let (rc, qc) = (critical_exponent(dim), critical_trace_exponent(dim));
            for r in &self.r_values {
                let r = r.resolve(rc);
                if !(r > 2.0 && r <= rc * (1.0 + 1e-12)) {
                    return Err(config_err(format!(
                        "r = {r} is outside (2, {rc}] for N = {dim}"
                    )));
                }
            }
            for q in &self.q_values {
                let q = q.resolve(qc);
                if !(q > 2.0 && q <= qc * (1.0 + 1e-12)) {
                    return Err(config_err(format!(
                        "q = {q} is outside (2, {qc}] for N = {dim}"
                    )));
                }
            }
        }
        if self.nodes.iter().any(|k| *k > 0) {
            let critical = self
                .r_values
                .iter()
                .chain(&self.q_values)
                .any(|e| *e == ExponentSpec::Critical);
            if critical {
                return Err(config_err("nodal states need subcritical exponents"));
            }
        }
        Ok(())
    }

    fn validate_subcritical(&self) -> Result<(), CampaignError> {
        if self.r_values.len() > 1 || self.q_values.len() > 1 {
            return Err(config_err("thresholds take at most one --r and one --q"));
        }
        for &dim in &self.dims {
            for (name, list, cap) in [
                ("r", &self.r_values, critical_exponent(dim)),
                ("q", &self.q_values, critical_trace_exponent(dim)),
            ] {
                if let Some(e) = list.first() {
                    let v = e.resolve(cap);
                    if !(v > 2.0 && v < cap) {
                        return Err(config_err(format!(
                            "subcritical {name} = {v} must lie in (2, {cap}) for N = {dim}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Scale of the threshold gaps in dimension `dim`.
    pub fn gap_eps_for(&self, dim: usize) -> f64 {
        self.gap_eps.unwrap_or(if dim == 3 { 1e-3 } else { 1e-2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_syntax() {
        assert_eq!(parse_dims("4..10").unwrap(), (4..=10).collect::<Vec<_>>());
        assert_eq!(parse_dims("4..=6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_dims("3,4, 5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_dims("3,5..6").unwrap(), vec![3, 5, 6]);
        assert!(parse_dims("").is_err());
        assert!(parse_dims("6..4").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn exponent_syntax() {
        assert_eq!(
            parse_exponents("3, crit").unwrap(),
            vec![ExponentSpec::Value(3.0), ExponentSpec::Critical]
        );
        assert!(parse_exponents("three").is_err());
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(
            ConfigLayer::from_ini_str(""),
            Err(CampaignError::Config(_))
        ));
        assert!(matches!(
            ConfigLayer::from_ini_str("  \n# only a comment\n"),
            Err(CampaignError::Config(_))
        ));
    }

    #[test]
    fn ini_round() {
        let text = "[campaign]\ncommand = solve\ndims = 3\n[solve]\nr = 3,4\nq = 3\nmesh = 500\n";
        let cfg = ConfigLayer::from_ini_str(text).unwrap().resolve().unwrap();
        assert_eq!(cfg.command, Command::Solve);
        assert_eq!(cfg.r_values.len(), 2);
        assert_eq!(cfg.mesh, 500);
        assert!(ConfigLayer::from_ini_str("[campaign]\ncomand = solve\n").is_err());
    }

    #[test]
    fn later_layers_win() {
        let file =
            ConfigLayer::from_ini_str("[campaign]\ncommand = constants\ndims = 3\n").unwrap();
        let flags = ConfigLayer {
            dims: Some(vec![4, 5]),
            ..ConfigLayer::default()
        };
        let cfg = file.overridden_by(flags).resolve().unwrap();
        assert_eq!(cfg.command, Command::Constants);
        assert_eq!(cfg.dims, vec![4, 5]);
    }

    #[test]
    fn validation() {
        let bad = |layer: ConfigLayer| layer.resolve().is_err();
        let base = |c: Command| ConfigLayer {
            command: Some(c),
            ..ConfigLayer::default()
        };
        assert!(bad(ConfigLayer::default()));
        assert!(bad(ConfigLayer {
            dims: Some(vec![3]),
            ..base(Command::Identities)
        }));
        assert!(bad(base(Command::Solve)));
        assert!(bad(ConfigLayer {
            r_values: Some(vec![ExponentSpec::Value(7.0)]),
            q_values: Some(vec![ExponentSpec::Value(3.0)]),
            ..base(Command::Solve)
        }));
        assert!(bad(ConfigLayer {
            tol: Some(-1.0),
            ..base(Command::Constants)
        }));
        assert!(bad(ConfigLayer {
            q_values: Some(vec![ExponentSpec::Critical]),
            ..base(Command::Thresholds)
        }));
        assert!(!bad(base(Command::Lemmas)));
    }
}
