use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "kerrpb",
    version,
    about = "Photon blockade in a driven Kerr cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Steady-state observables as a function of the tuning parameter k.
    #[command(name = "scan-k", args_override_self = true)]
    ScanK(ScanKArgs),
    /// Steady-state photon statistics as a function of the driving strength.
    #[command(name = "scan-eps", args_override_self = true)]
    ScanEps(ScanEpsArgs),
    /// Photon-number dynamics from the vacuum (unitary when --gamma 0).
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Steady-state Wigner functions on a phase-space grid.
    #[command(args_override_self = true)]
    Wigner(WignerArgs),
    /// Squeezing spectra of the steady state.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Closed-form approximations against numerical solutions.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Comma-separated numbers; `pi`, `pi/N` and `N*pi` are accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct NumList(pub Vec<f64>);

/// `START:STOP:STEP`, inclusive of `STOP` up to rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct Range(pub Vec<f64>);

fn parse_number(tok: &str) -> Result<f64, String> {
    let t = tok.trim();
    let pi = std::f64::consts::PI;
    let value = if let Some(rest) = t.strip_prefix("pi/") {
        rest.parse::<f64>().map(|d| pi / d).ok()
    } else if t == "pi" {
        Some(pi)
    } else if let Some(front) = t.strip_suffix("*pi") {
        front.parse::<f64>().map(|m| m * pi).ok()
    } else {
        t.parse::<f64>().ok()
    };
    match value {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(format!("invalid number '{tok}'")),
    }
}

pub fn parse_list(s: &str) -> Result<NumList, String> {
    let vals = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_number)
        .collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err("empty list".into());
    }
    Ok(NumList(vals))
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected START:STOP:STEP, got '{s}'"));
    }
    let start = parse_number(parts[0])?;
    let stop = parse_number(parts[1])?;
    let step = parse_number(parts[2])?;
    if step <= 0.0 {
        return Err(format!("step must be > 0, got {step}"));
    }
    if stop < start {
        return Err(format!("empty range {start}:{stop}"));
    }
    Ok(Range(crate::phase_space::linspace_step(start, stop, step)))
}

#[derive(Args, Debug, Clone)]
pub struct Physics {
    /// Kerr nonlinearity χ (units of γ).
    #[arg(long, default_value_t = 30.0)]
    pub chi: f64,
    /// Damping constant γ.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Fock-space dimension.
    #[arg(long, default_value_t = crate::model::DEFAULT_DIM)]
    pub dim: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Key-value file with default flag values; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ScanKArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Driving strengths; each value gives a separate scan.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "5")]
    pub eps: NumList,
    /// Mean thermal photon numbers; each value gives a separate scan.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "0.01")]
    pub nth: NumList,
    /// Explicit list of k values.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, overrides_with = "k_range")]
    pub k: Option<NumList>,
    /// Range of k values [default: 0.5:4.5:0.02].
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, overrides_with = "k")]
    pub k_range: Option<Range>,
    /// Add C/(1 − 1/dim) next to the raw coherence.
    #[arg(long)]
    pub normalized_coherence: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct ScanEpsArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Resonances to scan; each value gives a separate scan.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "2,3")]
    pub k: NumList,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "0.01")]
    pub nth: NumList,
    /// Explicit list of driving strengths.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, overrides_with = "eps_range")]
    pub eps: Option<NumList>,
    /// Range of driving strengths [default: 0:16:0.02].
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, overrides_with = "eps")]
    pub eps_range: Option<Range>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Driving strength per panel (one value is shared by all panels).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "5")]
    pub eps: NumList,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "2")]
    pub k: NumList,
    #[arg(long, default_value_t = 0.01)]
    pub nth: f64,
    /// Final time; defaults to 50/χ.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of output intervals.
    #[arg(long, default_value_t = 1000)]
    pub t_points: usize,
    /// Add the closed-form truncated evolution for k = 1 or 2.
    #[arg(long)]
    pub with_approx: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct WignerArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "5")]
    pub eps: NumList,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "1,2")]
    pub k: NumList,
    #[arg(long, default_value_t = 0.01)]
    pub nth: f64,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-3:3:0.05")]
    pub x_range: Range,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-3:3:0.05")]
    pub p_range: Range,
    /// Extra Fock levels for the displacement; defaults to 2·dim.
    #[arg(long)]
    pub pad: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "5")]
    pub eps: NumList,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "1")]
    pub k: NumList,
    #[arg(long, default_value_t = 0.01)]
    pub nth: f64,
    /// Quadrature phases.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "0,pi/2")]
    pub thetas: NumList,
    #[arg(long, default_value_t = crate::correlations::DEFAULT_TAU_MAX)]
    pub tau_max: f64,
    #[arg(long, default_value_t = crate::correlations::DEFAULT_TAU_STEP)]
    pub tau_step: f64,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-100:100:0.05")]
    pub omega_range: Range,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    /// Steady-state expansion parameters γ/ε.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "0.05,0.1,0.2")]
    pub delta: NumList,
    /// Steady-state parameters ε²/(γχ).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true, default_value = "0.5,1")]
    pub d: NumList,
    /// ε/χ for the dissipation-free checks.
    #[arg(long, default_value_t = 1.0 / 6.0)]
    pub delta_unitary: f64,
    /// χ for the dissipation-free checks.
    #[arg(long, default_value_t = 30.0)]
    pub chi: f64,
    /// Fock dimension of the reference unitary evolution.
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[command(flatten)]
    pub output: Output,
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::ScanK(a) => &a.output,
            Command::ScanEps(a) => &a.output,
            Command::Evolve(a) => &a.output,
            Command::Wigner(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::Compare(a) => &a.output,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(
            parse_list("1, 2.5,3").unwrap(),
            NumList(vec![1.0, 2.5, 3.0])
        );
        let pis = parse_list("0,pi/2,pi,2*pi").unwrap().0;
        assert!((pis[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((pis[3] - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!(parse_list("").is_err());
        assert!(parse_list("1,x").is_err());
        assert_eq!(parse_range("0.5:4.5:0.02").unwrap().0.len(), 201);
        assert_eq!(parse_range("1:1:0.1").unwrap().0, vec![1.0]);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn later_flags_override_earlier_ones() {
        let cli = Cli::try_parse_from([
            "kerrpb",
            "scan-k",
            "--chi",
            "10",
            "--chi",
            "20",
            "--k-range",
            "1:2:0.5",
            "--k",
            "3",
        ])
        .unwrap();
        let Command::ScanK(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.physics.chi, 20.0);
        assert_eq!(a.k, Some(NumList(vec![3.0])));
        assert_eq!(a.k_range, None);
    }
}
