use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use geoscale::config::splice_config_args;
use geoscale::ingest::Schema;
use geoscale::metrics::DEFAULT_CITY_THRESHOLD;
use geoscale::pipeline::{self, sidecar_path, PipelineConfig, Stage, StageError};
use geoscale::synth::SynthConfig;

#[derive(Parser)]
#[command(name = "geoscale", version, about = "Attractiveness scaling analysis for geo-tagged media and migration data")]
#[command(args_override_self = true)]
struct Cli {
    /// Worker threads (0 = all cores). Outputs never depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Flickr,
    Migration,
    Cities,
}

#[derive(Subcommand)]
enum Command {
    /// Prune a raw tab-separated export into validated records.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "0,1,2,3,4")]
        schema: Schema,
        /// `.csv` or `.bin`
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stats: PathBuf,
    },
    /// Reverse-geocode records against region polygons.
    Assign {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        pop: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Infer home countries from assigned records.
    Homes {
        #[arg(long)]
        assigned: PathBuf,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the output path with a `.json` extension.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Build an attractiveness table.
    Attract {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        assigned: Option<PathBuf>,
        #[arg(long)]
        homes: Option<PathBuf>,
        #[arg(long)]
        regions: Option<PathBuf>,
        #[arg(long)]
        pop: Option<PathBuf>,
        #[arg(long)]
        od: Option<PathBuf>,
        #[arg(long)]
        cities: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CITY_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
        /// Capital-population table in `cities` mode.
        #[arg(long)]
        out_capital: Option<PathBuf>,
    },
    /// Fit a power law and rank log-residuals.
    Fit {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        residuals: PathBuf,
    },
    /// Log-binned histogram with a fitted log-normal.
    Dist {
        #[arg(long)]
        values: PathBuf,
        /// Column to read; the last one by default.
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic table with a known exponent.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 238)]
        n_regions: usize,
        #[arg(long, default_value_t = 0.64)]
        beta: f64,
        #[arg(long, default_value_t = 2.3)]
        sigma_pop: f64,
        #[arg(long, default_value_t = 1.0)]
        noise_sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage end to end and write a manifest.
    Run {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        pop: PathBuf,
        #[arg(long)]
        od: Option<PathBuf>,
        #[arg(long)]
        cities: Option<PathBuf>,
        #[arg(long, default_value = "0,1,2,3,4")]
        schema: Schema,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = DEFAULT_CITY_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn need(value: Option<PathBuf>, flag: &str, mode: &str) -> Result<PathBuf, StageError> {
    value.ok_or_else(|| StageError::new(Stage::Config, format!("--{flag} is required in {mode} mode")))
}

fn run(command: Command) -> Result<(), StageError> {
    match command {
        Command::Ingest { input, schema, out, stats } => {
            let s = pipeline::ingest_stage(&input, schema, &out, &stats)?;
            eprintln!("kept {} of {} lines", s.kept, s.total);
        }
        Command::Assign { records, regions, pop, out } => {
            let rs = pipeline::load_region_files(&regions, pop.as_deref(), Stage::Assign)?;
            let s = pipeline::assign_stage(&records, &rs, &out)?;
            eprintln!("assigned {} of {} records", s.assigned, s.records);
        }
        Command::Homes { assigned, regions, out, stats } => {
            let rs = pipeline::load_region_files(&regions, None, Stage::Homes)?;
            let stats = stats.unwrap_or_else(|| sidecar_path(&out));
            let c = pipeline::homes_stage(&assigned, &rs, &out, &stats)?;
            eprintln!("defined home: {:.4}, foreign: {:.4}", c.defined_home_fraction, c.foreign_fraction);
        }
        Command::Attract { mode, assigned, homes, regions, pop, od, cities, threshold, out, out_capital } => match mode {
            Mode::Flickr => {
                let rs = pipeline::load_region_files(&need(regions, "regions", "flickr")?, pop.as_deref(), Stage::Attract)?;
                pipeline::attract_flickr_stage(
                    &need(assigned, "assigned", "flickr")?,
                    &need(homes, "homes", "flickr")?,
                    &rs,
                    &out,
                )?;
            }
            Mode::Migration => {
                pipeline::attract_migration_stage(&need(od, "od", "migration")?, &need(pop, "pop", "migration")?, &out)?;
            }
            Mode::Cities => {
                let capital = out_capital.unwrap_or_else(|| out.with_file_name("table_capital_population.csv"));
                pipeline::attract_cities_stage(
                    &need(cities, "cities", "cities")?,
                    &need(pop, "pop", "cities")?,
                    threshold,
                    &out,
                    &capital,
                )?;
            }
        },
        Command::Fit { table, out, residuals } => {
            let f = pipeline::fit_stage(&table, &out, &residuals)?;
            eprintln!("beta = {:.4} ({}), r2 = {:.3}, n = {}", f.beta, f.classification, f.r2, f.n);
        }
        Command::Dist { values, column, bins, out } => {
            let f = pipeline::dist_stage(&values, column.as_deref(), bins, &out)?;
            eprintln!("mu = {:.4}, sigma = {:.4}", f.mu, f.sigma);
        }
        Command::Synth { seed, n_regions, beta, sigma_pop, noise_sigma, out } => {
            let cfg = SynthConfig { seed, n_regions, beta_true: beta, sigma_pop, noise_sigma, ..SynthConfig::default() };
            pipeline::synth_stage(&cfg, &out)?;
        }
        Command::Run { .. } => unreachable!("handled in main"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match splice_config_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    if let Command::Run { records, regions, pop, od, cities, schema, bins, threshold, out_dir } = cli.command {
        let cfg = PipelineConfig {
            od,
            cities,
            schema,
            threads: cli.threads,
            bins,
            city_threshold: threshold,
            ..PipelineConfig::new(records, regions, pop, out_dir)
        };
        let report = pipeline::run_pipeline(&cfg);
        if let Some(same) = report.matches_previous {
            eprintln!("outputs {} the previous run", if same { "match" } else { "differ from" });
        }
        return match report.error {
            None => ExitCode::SUCCESS,
            Some(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    if let Err(e) = pool {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
