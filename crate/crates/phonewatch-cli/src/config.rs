//! Run configuration: defaults, flat key=value config files, and CLI
//! flag overrides (flags win over file values).

use phonewatch_core::error::{Error, Result};
use phonewatch_core::svm::{KernelKind, KernelSpec};

/// Which classifier setup a run uses: fixed kernel parameters or a GA
/// search over one kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Fixed(KernelKind),
    Tune,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kernel: KernelChoice,
    /// Kernel family the GA tunes when `kernel` is `Tune`.
    pub ga_kernel: KernelKind,
    pub nu: f64,
    pub gamma: f64,
    pub coef0: f64,
    pub degree: f64,
    pub seg_fraction: f64,
    pub period_window: f64,
    pub period_threshold: f64,
    /// Fractions below this render green; at or above, yellow.
    pub status_green_upper: f64,
    /// Fractions at or above this render red.
    pub status_red_lower: f64,
    pub workers: usize,
    pub fps_cap: f64,
    pub seed: u64,
    pub folds: usize,
    pub ga_population: usize,
    pub ga_generations: usize,
    pub ga_crossover: f64,
    pub ga_mutation: f64,
    pub ga_tournament: usize,
    pub ga_restarts: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: KernelChoice::Fixed(KernelKind::Linear),
            ga_kernel: KernelKind::Polynomial,
            nu: 0.3,
            gamma: 1.0,
            coef0: 0.0,
            degree: 3.0,
            seg_fraction: 0.05,
            period_window: 3.0,
            period_threshold: 0.65,
            status_green_upper: 0.40,
            status_red_lower: 0.65,
            workers: 4,
            fps_cap: 6.0,
            seed: 42,
            folds: 9,
            ga_population: 20,
            ga_generations: 10_000,
            ga_crossover: 0.80,
            ga_mutation: 0.05,
            ga_tournament: 2,
            ga_restarts: 1,
        }
    }
}

impl RunConfig {
    /// The configured kernel with its parameters; errors when called on a
    /// `Tune` configuration.
    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let kind = match self.kernel {
            KernelChoice::Fixed(kind) => kind,
            KernelChoice::Tune => {
                return Err(Error::InvalidInput(
                    "kernel is set to 'tune'; run the tune command or fix the parameters"
                        .into(),
                ))
            }
        };
        Ok(spec_of(kind, self.gamma, self.coef0, self.degree))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.status_green_upper)
            || !(0.0..=1.0).contains(&self.status_red_lower)
            || self.status_green_upper >= self.status_red_lower
        {
            return Err(Error::InvalidInput(format!(
                "status boundaries must satisfy 0 <= green_upper < red_lower <= 1, \
                 got {} and {}",
                self.status_green_upper, self.status_red_lower
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        if self.fps_cap.is_nan() || self.fps_cap <= 0.0 {
            return Err(Error::InvalidInput("fps_cap must be positive".into()));
        }
        if self.period_window.is_nan() || self.period_window <= 0.0 {
            return Err(Error::InvalidInput("period_window must be positive".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` pair from a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Parse(format!("config key {key}: bad {what} {value:?}"));
        let f = |v: &str| v.parse::<f64>().map_err(|_| bad("number"));
        let u = |v: &str| v.parse::<usize>().map_err(|_| bad("count"));
        match key {
            "kernel" => {
                self.kernel = if value == "tune" {
                    KernelChoice::Tune
                } else {
                    KernelChoice::Fixed(KernelKind::parse(value)?)
                }
            }
            "ga_kernel" => self.ga_kernel = KernelKind::parse(value)?,
            "nu" => self.nu = f(value)?,
            "gamma" => self.gamma = f(value)?,
            "coef0" => self.coef0 = f(value)?,
            "degree" => self.degree = f(value)?,
            "seg_fraction" => self.seg_fraction = f(value)?,
            "period_window" => self.period_window = f(value)?,
            "period_threshold" => self.period_threshold = f(value)?,
            "status_green_upper" => self.status_green_upper = f(value)?,
            "status_red_lower" => self.status_red_lower = f(value)?,
            "workers" => self.workers = u(value)?,
            "fps_cap" => self.fps_cap = f(value)?,
            "seed" => self.seed = value.parse::<u64>().map_err(|_| bad("seed"))?,
            "folds" => self.folds = u(value)?,
            "ga_population" => self.ga_population = u(value)?,
            "ga_generations" => self.ga_generations = u(value)?,
            "ga_crossover" => self.ga_crossover = f(value)?,
            "ga_mutation" => self.ga_mutation = f(value)?,
            "ga_tournament" => self.ga_tournament = u(value)?,
            "ga_restarts" => self.ga_restarts = u(value)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a flat `key = value` config file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

pub fn spec_of(kind: KernelKind, gamma: f64, coef0: f64, degree: f64) -> KernelSpec {
    match kind {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Polynomial => KernelSpec::Polynomial {
            gamma,
            coef0,
            degree,
        },
        KernelKind::Rbf => KernelSpec::Rbf { gamma },
        KernelKind::Sigmoid => KernelSpec::Sigmoid { gamma, coef0 },
    }
}

/// Traffic-light status level for a previous-window positive fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusLevel {
    Green,
    Yellow,
    Red,
}

impl StatusLevel {
    pub fn of(fraction: f64, green_upper: f64, red_lower: f64) -> StatusLevel {
        if fraction >= red_lower {
            StatusLevel::Red
        } else if fraction >= green_upper {
            StatusLevel::Yellow
        } else {
            StatusLevel::Green
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StatusLevel::Green => "green",
            StatusLevel::Yellow => "yellow",
            StatusLevel::Red => "red",
        }
    }
}
