use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pass_uav::harness::commands::{
    self, default_sweep_values, exit_code, parse_strategy_list, with_threads, ActivateTarget, ScenarioSource,
};
use pass_uav::harness::{Planner, StrategyParams, StrategySpec, SweepConfig, SweepVariable};
use pass_uav::Error;

#[derive(Parser)]
#[command(
    name = "pass-uav",
    version,
    about = "Route planning and antenna activation for pinching-antenna UAV delivery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a delivery tour.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Planner: hao, ga_only, nearest_neighbor or held_karp.
        #[arg(long, default_value = "hao")]
        planner: String,
    },
    /// Optimize the antennas for one UAV position.
    Activate {
        #[command(flatten)]
        common: Common,
        /// planner:activator; the planner is only used with --slot.
        #[arg(long, default_value = "hao:bnb")]
        strategy: String,
        /// UAV position as x,y,z in meters.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "slot")]
        position: Option<Vec<f64>>,
        /// Slot index of the planned cycle.
        #[arg(long)]
        slot: Option<usize>,
    },
    /// One full delivery cycle.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// planner:activator[,activator...]; the first activator drives the trace.
        #[arg(long, default_value = "hao:bnb")]
        strategy: String,
    },
    /// Sweep one variable over seeds and strategies.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// rate_threshold (rth), pa_count or node_count (nodes).
        #[arg(long, default_value = "rth")]
        var: String,
        /// Comma-separated values; defaults depend on --var.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// planner:activator, repeatable.
        #[arg(long, default_values_t = ["hao:bnb".to_string(), "hao:islr".to_string(), "hao:full".to_string(), "hao:mimo".to_string()])]
        strategy: Vec<String>,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 5)]
        runs: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; generated from --seed when absent.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rate threshold in bit/s/Hz.
    #[arg(long)]
    rth: Option<f64>,
    #[arg(long)]
    pa_count: Option<usize>,
    /// Number of delivery nodes for generated scenarios.
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    islr_kprime: Option<usize>,
    /// Radiation constant of each pinching antenna.
    #[arg(long)]
    delta: Option<f64>,
    /// Slot length in seconds.
    #[arg(long)]
    tau: Option<f64>,
}

impl Common {
    fn source(&self) -> ScenarioSource {
        ScenarioSource {
            path: self.scenario.clone(),
            seed: self.seed,
            nodes: self.nodes,
            pa_count: self.pa_count,
            rate_threshold: self.rth,
            delta: self.delta,
            slot_seconds: self.tau,
        }
    }

    fn params(&self) -> StrategyParams {
        StrategyParams {
            k_prime: self.islr_kprime,
            ..StrategyParams::default()
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Plan { common, planner } => {
            let planner: Planner = planner.parse()?;
            let planned = with_threads(common.threads, || {
                commands::plan(&common.source(), planner, &common.params(), &common.out)
            })??;
            println!("order      {:?}", planned.tour.order);
            println!("distance   {:.3} m", planned.tour.total_distance_m);
            println!("wrote      {}", common.out.display());
        }
        Command::Activate {
            common,
            strategy,
            position,
            slot,
        } => {
            let spec: StrategySpec = strategy.parse()?;
            let target = match (position, slot) {
                (Some(p), None) => match p[..] {
                    [x, y, z] => ActivateTarget::Position([x, y, z]),
                    _ => return Err(Error::InvalidConfig("--position takes x,y,z".into())),
                },
                (None, Some(index)) => ActivateTarget::Slot {
                    planner: spec.planner,
                    index,
                },
                _ => return Err(Error::InvalidConfig("give exactly one of --position or --slot".into())),
            };
            let summary = with_threads(common.threads, || {
                commands::activate(&common.source(), spec.activator, &common.params(), target)
            })??;
            println!("{summary}");
        }
        Command::Simulate { common, strategy } => {
            let (planner, activators) = parse_strategy_list(&strategy)?;
            let out = with_threads(common.threads, || {
                commands::simulate(&common.source(), planner, &activators, &common.params(), &common.out)
            })??;
            println!("distance   {:.3} m", out.tour.total_distance_m);
            println!("slots      {}", out.slot_plan.total_slots());
            for r in &out.reports {
                println!("{:<24} {:.6e} J", r.strategy_name, r.total_energy_j);
            }
            println!("wrote      {}", common.out.display());
        }
        Command::Benchmark {
            common,
            var,
            values,
            strategy,
            runs,
        } => {
            if common.scenario.is_some() {
                return Err(Error::InvalidConfig("benchmark generates its own scenarios".into()));
            }
            let variable: SweepVariable = var.parse()?;
            let values = if values.is_empty() {
                default_sweep_values(variable)
            } else {
                values
            };
            let params = common.params();
            let strategies = strategy
                .iter()
                .map(|s| {
                    let mut spec: StrategySpec = s.parse()?;
                    spec.params = params.clone();
                    Ok(spec)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let first = common.seed.unwrap_or(1);
            let cfg = SweepConfig {
                variable,
                values,
                strategies,
                seeds: (first..first + runs).collect(),
                node_count: common.nodes,
                options: common.source().options(),
            };
            let result = with_threads(common.threads, || commands::benchmark(&cfg, &common.out))??;
            for (v, value) in result.sweep_values.iter().enumerate() {
                for (s, name) in result.strategy_names.iter().enumerate() {
                    println!("{variable}={value:<6} {name:<24} {:.6e} J", result.mean_energy_j[v][s]);
                }
            }
            for f in &result.failures {
                eprintln!(
                    "failed: {variable}={} {} seed {}: {}",
                    f.value, f.strategy, f.seed, f.message
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    use super::*;

    fn run_args(args: &[&str]) -> Result<(), Error> {
        let argv = std::iter::once("pass-uav").chain(args.iter().copied());
        run(Cli::try_parse_from(argv).expect("arguments parse"))
    }

    fn out(dir: &Path) -> &str {
        dir.to_str().unwrap()
    }

    #[test]
    fn simulate_twice_with_different_threads_is_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        run_args(&["simulate", "--seed", "5", "--nodes", "6", "--out", out(&a)]).unwrap();
        run_args(&[
            "simulate",
            "--seed",
            "5",
            "--nodes",
            "6",
            "--threads",
            "3",
            "--out",
            out(&b),
        ])
        .unwrap();
        for f in ["tour.json", "slots.csv", "energy.csv", "trace_distance.csv"] {
            let (x, y) = (fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
            assert!(!x.is_empty());
            assert_eq!(x, y, "{f} differs");
        }
    }

    #[test]
    fn invalid_config_maps_to_exit_2() {
        let e = run_args(&["activate", "--delta", "1.5", "--position", "1,2,3"]).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let e = run_args(&["simulate", "--strategy", "hao:nothing"]).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let e = run_args(&["activate", "--position", "1,2"]).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let e = Cli::try_parse_from(["pass-uav", "frobnicate"]).err().unwrap();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn missing_scenario_file_is_io_error() {
        let e = run_args(&["plan", "--scenario", "/nonexistent/scenario.json"]).unwrap_err();
        assert_eq!(exit_code(&e), 1);
    }

    #[test]
    fn activate_accepts_position_or_slot() {
        run_args(&[
            "activate",
            "--seed",
            "2",
            "--nodes",
            "3",
            "--position",
            "40,3,5",
            "--strategy",
            "hao:exhaustive",
        ])
        .unwrap();
        run_args(&[
            "activate",
            "--seed",
            "2",
            "--nodes",
            "3",
            "--slot",
            "4",
            "--strategy",
            "nearest_neighbor:islr",
        ])
        .unwrap();
        run_args(&[
            "activate",
            "--seed",
            "2",
            "--nodes",
            "3",
            "--position",
            "40,3,5",
            "--strategy",
            "hao:mimo",
        ])
        .unwrap();
    }

    #[test]
    fn plan_and_benchmark_write_outputs() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = out(tmp.path());
        run_args(&[
            "plan",
            "--seed",
            "4",
            "--nodes",
            "5",
            "--planner",
            "held_karp",
            "--out",
            dir,
        ])
        .unwrap();
        let text = fs::read_to_string(tmp.path().join("tour.json")).unwrap();
        let tour: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(tour["order"].as_array().unwrap().len(), 5);
        assert_eq!(tour["waypoints_m"].as_array().unwrap().len(), 7);
        assert!(tmp.path().join("plan_trace.csv").exists());

        run_args(&[
            "benchmark",
            "--var",
            "pa_count",
            "--values",
            "4,8",
            "--strategy",
            "nearest_neighbor:bnb",
            "--runs",
            "2",
            "--nodes",
            "4",
            "--out",
            dir,
        ])
        .unwrap();
        let csv = fs::read_to_string(tmp.path().join("sweep_pa_count.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }
}
