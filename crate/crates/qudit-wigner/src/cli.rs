//! The `qudit-wigner` command line: build demo states, run the protocol,
//! emit grids, outcome tables and fidelity sweeps.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad flags, specs,
//! dimensions, unreadable files), 3 on numerical validation failures (for
//! example a resource grid that is not a valid state).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::hilbert::StateVector;
use crate::io;
use crate::phase_space::PrimeDimension;
use crate::teleport::{
    gaussian_kernel, point_mass_kernel, run_teleport, uniform_kernel, NoiseModel,
    OutcomeSelection,
};
use crate::wigner::{shift_grid, to_wigner, WignerGrid};
use crate::Result;

/// Qudit teleportation in discrete phase space.
#[derive(Debug, Parser)]
#[command(name = "qudit-wigner", version, about)]
pub struct Cli {
    /// Hilbert-space dimension N (odd prime)
    #[arg(long, global = true, default_value_t = 5)]
    pub dim: u64,

    /// Seed for sampled outcomes and random states
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file (wigner) or directory (teleport, sweep)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// What to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the Wigner grid of a state and write it out
    Wigner {
        /// State descriptor: position:<k> | momentum:<l> | random:<seed> |
        /// gaussian:<sigma> | epr | mixed | file:<path>
        #[arg(long)]
        state: String,

        /// Optional cyclic translation `dq,dp` applied to the grid
        #[arg(long)]
        shift: Option<String>,
    },

    /// Run the teleportation protocol and write outcome tables
    Teleport {
        /// Input-state descriptor (single party)
        #[arg(long)]
        state: String,

        /// Resource kernel: ideal | uniform | gaussian:<sigma> | file:<path>
        #[arg(long, default_value = "ideal")]
        epr_kernel: String,

        /// Measurement filter: ideal | uniform | gaussian:<sigma> | file:<path>
        #[arg(long, default_value = "ideal")]
        filter_kernel: String,

        /// Outcome selection: exhaustive | sampled:<count>
        #[arg(long, default_value = "exhaustive")]
        outcomes: String,

        /// Also write input/joint/transformed and per-trace grids
        #[arg(long)]
        emit_grids: bool,
    },

    /// Mean teleportation fidelity over a range of resource-kernel widths
    Sweep {
        /// Input-state descriptor, or `random` to use seeded samples
        #[arg(long, default_value = "random")]
        state: String,

        /// Comma-separated, strictly increasing Gaussian widths
        #[arg(long)]
        widths: String,

        /// Number of sampled input states per width (state = random)
        #[arg(long, default_value_t = 5)]
        samples: usize,

        /// Measurement filter: ideal | uniform | gaussian:<sigma> | file:<path>
        #[arg(long, default_value = "ideal")]
        filter_kernel: String,
    },
}

/// Builds the Wigner grid of a described state.
///
/// Descriptors: `position:<k>`, `momentum:<l>`, `random:<seed>`,
/// `gaussian:<sigma>` (a periodized discrete Gaussian wave packet centered
/// at the origin), `epr` (two-party), `mixed` (maximally mixed), and
/// `file:<path>`.
pub fn build_state(dim: PrimeDimension, spec: &str) -> Result<WignerGrid> {
    let unknown = || Error::UnknownSpec(spec.to_string());
    if let Some((kind, arg)) = spec.split_once(':') {
        match kind {
            "position" => {
                let k: u64 = arg.parse().map_err(|_| unknown())?;
                to_wigner(&StateVector::position_eigenstate(dim, k).to_density())
            }
            "momentum" => {
                let l: u64 = arg.parse().map_err(|_| unknown())?;
                to_wigner(&StateVector::momentum_eigenstate(dim, l).to_density())
            }
            "random" => {
                let seed: u64 = arg.parse().map_err(|_| unknown())?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                to_wigner(&StateVector::random_pure(dim, 1, &mut rng).to_density())
            }
            "gaussian" => {
                let sigma: f64 = arg.parse().map_err(|_| unknown())?;
                if !(sigma >= 0.0) || !sigma.is_finite() {
                    return Err(unknown());
                }
                to_wigner(&discrete_gaussian_state(dim, sigma)?.to_density())
            }
            "file" => io::read_grid(Path::new(arg)),
            _ => Err(unknown()),
        }
    } else {
        match spec {
            "epr" => to_wigner(&StateVector::epr(dim).to_density()),
            "mixed" => Ok(WignerGrid::constant(dim, 1)),
            _ => Err(unknown()),
        }
    }
}

/// A normalized wave packet with amplitudes proportional to the periodized
/// Gaussian Σ_{j∈{−1,0,1}} exp(−(k+jN)²/(4σ²)), the discrete analogue of
/// the oscillator ground state. Truncating the image sum at ±1 is accurate
/// to well below 1e-12 for σ ≤ N/6. Width zero degenerates to the position
/// eigenstate at the origin.
pub fn discrete_gaussian_state(dim: PrimeDimension, sigma: f64) -> Result<StateVector> {
    if sigma == 0.0 {
        return Ok(StateVector::position_eigenstate(dim, 0));
    }
    let n = dim.size();
    let mut amplitudes: Vec<f64> = (0..n)
        .map(|k| {
            [-1i64, 0, 1]
                .iter()
                .map(|&j| {
                    let d = k as f64 + j as f64 * n as f64;
                    (-d * d / (4.0 * sigma * sigma)).exp()
                })
                .sum()
        })
        .collect();
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    StateVector::new(
        dim,
        1,
        amplitudes
            .into_iter()
            .map(|a| num_complex::Complex64::new(a, 0.0))
            .collect(),
    )
}

/// Parses a kernel descriptor into a probability kernel over (ℤ_N)².
pub fn parse_kernel(dim: PrimeDimension, spec: &str) -> Result<Vec<f64>> {
    match spec {
        "ideal" => Ok(point_mass_kernel(dim)),
        "uniform" => Ok(uniform_kernel(dim)),
        _ => {
            if let Some(arg) = spec.strip_prefix("gaussian:") {
                let sigma: f64 = arg
                    .parse()
                    .map_err(|_| Error::UnknownKernel(spec.to_string()))?;
                gaussian_kernel(dim, sigma)
            } else if let Some(path) = spec.strip_prefix("file:") {
                let grid = io::read_grid(Path::new(path))?;
                if grid.parties() != 1 || grid.dim() != dim {
                    return Err(Error::UnknownKernel(format!(
                        "{spec} (kernel file must hold a single-party grid of dimension {dim})"
                    )));
                }
                Ok(grid.values().to_vec())
            } else {
                Err(Error::UnknownKernel(spec.to_string()))
            }
        }
    }
}

fn parse_outcomes(spec: &str, seed: u64) -> Result<OutcomeSelection> {
    if spec == "exhaustive" {
        return Ok(OutcomeSelection::Exhaustive);
    }
    if let Some(arg) = spec.strip_prefix("sampled:") {
        let count: usize = arg.parse().map_err(|_| {
            Error::Parse {
                path: "--outcomes".to_string(),
                reason: format!("bad sample count `{arg}`"),
            }
        })?;
        return Ok(OutcomeSelection::Sampled { seed, count });
    }
    Err(Error::Parse {
        path: "--outcomes".to_string(),
        reason: format!("expected `exhaustive` or `sampled:<count>`, got `{spec}`"),
    })
}

fn parse_shift(dim: PrimeDimension, spec: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse {
        path: "--shift".to_string(),
        reason: format!("expected `dq,dp`, got `{spec}`"),
    };
    let (dq, dp) = spec.split_once(',').ok_or_else(bad)?;
    let dq: u64 = dq.trim().parse().map_err(|_| bad())?;
    let dp: u64 = dp.trim().parse().map_err(|_| bad())?;
    Ok((dq % dim.n(), dp % dim.n()))
}

/// Runs a parsed command. Output paths default to `wigner.grid`,
/// `teleport-out/` and `sweep-out/` next to the working directory.
pub fn execute(cli: &Cli) -> Result<()> {
    let dim = PrimeDimension::new(cli.dim)?;
    match &cli.command {
        Command::Wigner { state, shift } => {
            let mut grid = build_state(dim, state)?;
            if let Some(spec) = shift {
                if grid.parties() != 1 {
                    return Err(Error::ShapeMismatch(
                        "--shift applies to single-party grids".into(),
                    ));
                }
                let (dq, dp) = parse_shift(dim, spec)?;
                grid = shift_grid(&grid, dq, dp);
            }
            let path = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("wigner.grid"));
            io::write_grid_text(&path, &grid)?;
            let json_path = sibling_json(&path);
            io::write_grid_json(&json_path, &grid)?;
            println!(
                "wrote {} and {} ({} parties, {} values, sum {})",
                path.display(),
                json_path.display(),
                grid.parties(),
                grid.len(),
                grid.sum()
            );
            Ok(())
        }
        Command::Teleport {
            state,
            epr_kernel,
            filter_kernel,
            outcomes,
            emit_grids,
        } => {
            let input = build_state(dim, state)?;
            if input.parties() != 1 {
                return Err(Error::ShapeMismatch(
                    "teleport input must be a single-party state".into(),
                ));
            }
            let noise = NoiseModel::new(
                dim,
                parse_kernel(dim, epr_kernel)?,
                parse_kernel(dim, filter_kernel)?,
            )?;
            let selection = parse_outcomes(outcomes, cli.seed)?;
            let traces = run_teleport(&input, &noise, selection)?;

            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("teleport-out"));
            std::fs::create_dir_all(&dir)?;
            io::write_outcome_table(&dir.join("outcomes.tsv"), &traces)?;
            let summary = io::FidelitySummary::from_traces(dim, &traces);
            summary.write(&dir.join("summary.json"))?;
            if *emit_grids {
                io::write_grid_text(&dir.join("input.grid"), &input)?;
                io::write_grid_text(&dir.join("joint.grid"), &traces[0].joint)?;
                io::write_grid_text(&dir.join("transformed.grid"), &traces[0].transformed)?;
                for (i, t) in traces.iter().enumerate() {
                    let tag = format!("trace{i:03}_x{}_p{}", t.outcome.x2, t.outcome.p1);
                    io::write_grid_text(&dir.join(format!("{tag}_conditional.grid")), &t.conditional)?;
                    io::write_grid_text(&dir.join(format!("{tag}_output.grid")), &t.output)?;
                }
            }
            println!(
                "teleport N={} traces={} mean_fidelity={} min={} max={} -> {}",
                dim,
                traces.len(),
                summary.mean_fidelity,
                summary.min_fidelity,
                summary.max_fidelity,
                dir.display()
            );
            Ok(())
        }
        Command::Sweep {
            state,
            widths,
            samples,
            filter_kernel,
        } => {
            let widths: Vec<f64> = widths
                .split(',')
                .map(|w| {
                    w.trim().parse::<f64>().map_err(|_| Error::Parse {
                        path: "--widths".to_string(),
                        reason: format!("bad width `{w}`"),
                    })
                })
                .collect::<Result<_>>()?;
            if widths.is_empty() || widths.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NonMonotoneWidths);
            }
            let filter = parse_kernel(dim, filter_kernel)?;

            // sampled inputs are seeded deterministically from --seed
            let inputs: Vec<WignerGrid> = if state == "random" {
                (0..*samples)
                    .map(|i| {
                        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(i as u64));
                        to_wigner(&StateVector::random_pure(dim, 1, &mut rng).to_density())
                    })
                    .collect::<Result<_>>()?
            } else {
                vec![build_state(dim, state)?]
            };
            for input in &inputs {
                if input.parties() != 1 {
                    return Err(Error::ShapeMismatch(
                        "sweep input must be a single-party state".into(),
                    ));
                }
            }

            let mut rows = Vec::with_capacity(widths.len());
            for &width in &widths {
                let noise =
                    NoiseModel::new(dim, gaussian_kernel(dim, width)?, filter.clone())?;
                let mut total = 0.0;
                let mut count = 0usize;
                for input in &inputs {
                    for t in run_teleport(input, &noise, OutcomeSelection::Exhaustive)? {
                        total += t.fidelity;
                        count += 1;
                    }
                }
                rows.push(io::SweepRow {
                    width,
                    mean_fidelity: total / count as f64,
                });
            }

            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep-out"));
            std::fs::create_dir_all(&dir)?;
            io::write_sweep_table(&dir.join("sweep.tsv"), &rows)?;
            for r in &rows {
                println!("width={} mean_fidelity={}", r.width, r.mean_fidelity);
            }
            println!("wrote {}", dir.join("sweep.tsv").display());
            Ok(())
        }
    }
}

fn sibling_json(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// Parses the process arguments, runs the command, and maps errors to the
/// documented exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors, 0 for --help/--version
            e.exit();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dim(n: u64) -> PrimeDimension {
        PrimeDimension::new(n).unwrap()
    }

    #[test]
    fn state_specs_build() {
        let d = dim(5);
        let pos = build_state(d, "position:0").unwrap();
        assert_eq!(pos.parties(), 1);
        assert_abs_diff_eq!(pos.values()[0], 0.2, epsilon = 1e-13);
        assert_eq!(build_state(d, "epr").unwrap().parties(), 2);
        for v in build_state(d, "mixed").unwrap().values() {
            assert_abs_diff_eq!(*v, 1.0 / 25.0, epsilon = 1e-15);
        }
        assert_eq!(
            build_state(d, "random:3").unwrap().values(),
            build_state(d, "random:3").unwrap().values()
        );
    }

    #[test]
    fn unknown_specs_are_rejected() {
        let d = dim(5);
        for bad in ["thermal", "position", "position:x", "gaussian:-1", "gaussian:abc"] {
            assert!(
                matches!(build_state(d, bad), Err(Error::UnknownSpec(_))),
                "{bad} accepted"
            );
        }
    }

    #[test]
    fn narrow_gaussian_approaches_position_eigenstate() {
        let d = dim(7);
        let grid = build_state(d, "gaussian:0.05").unwrap();
        let pos = build_state(d, "position:0").unwrap();
        assert!(grid.max_abs_diff(&pos) < 1e-12);
        // width zero is the exact limit
        let zero = build_state(d, "gaussian:0").unwrap();
        assert_eq!(zero.values(), pos.values());
    }

    #[test]
    fn gaussian_state_is_peaked_at_origin() {
        let d = dim(19);
        let grid = build_state(d, "gaussian:1.5").unwrap();
        let origin = grid.values()[0];
        for (i, v) in grid.values().iter().enumerate() {
            assert!(*v <= origin + 1e-12, "value {i} exceeds the origin peak");
        }
        // shifting moves the peak, cyclically
        let shifted = shift_grid(&grid, 4, 2);
        let n = 19usize;
        let peak_idx = (2 * n + 4) as usize;
        let peak = shifted.values()[peak_idx];
        for (i, v) in shifted.values().iter().enumerate() {
            assert!(*v <= peak + 1e-12, "shifted value {i} exceeds the moved peak");
        }
    }

    #[test]
    fn kernel_specs_parse() {
        let d = dim(5);
        let ideal = parse_kernel(d, "ideal").unwrap();
        assert_eq!(ideal[0], 1.0);
        assert!(ideal[1..].iter().all(|&v| v == 0.0));
        let uniform = parse_kernel(d, "uniform").unwrap();
        assert_abs_diff_eq!(uniform[7], 1.0 / 25.0, epsilon = 1e-15);
        let gauss = parse_kernel(d, "gaussian:0.7").unwrap();
        assert_abs_diff_eq!(gauss.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            parse_kernel(d, "trapezoid"),
            Err(Error::UnknownKernel(_))
        ));
    }

    #[test]
    fn shift_and_outcome_parsers() {
        let d = dim(5);
        assert_eq!(parse_shift(d, "1,2").unwrap(), (1, 2));
        assert_eq!(parse_shift(d, "6, 7").unwrap(), (1, 2));
        assert!(parse_shift(d, "1").is_err());
        assert!(matches!(
            parse_outcomes("exhaustive", 0).unwrap(),
            OutcomeSelection::Exhaustive
        ));
        assert_eq!(
            parse_outcomes("sampled:10", 4).unwrap(),
            OutcomeSelection::Sampled { seed: 4, count: 10 }
        );
        assert!(parse_outcomes("every-other", 0).is_err());
    }
}
