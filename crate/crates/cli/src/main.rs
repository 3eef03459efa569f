use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lamina::{
    parse_portrait_pair, render_lamination, render_tiling, run_invariants, turtle_trace, Angle,
    BuildError, Color, DiskStyle, LeafShape, PortraitPair, RenderError, SuiteOptions, TilingStyle, Tower, Verdict,
    DEFAULT_BUDGET,
};

use lamina::portrait::validate_with_budget;

mod report;

/// Exact circle laminations from pairs of critical portraits.
#[derive(Parser, Debug)]
#[command(name = "lamina", version)]
struct Cli {
    /// Largest level set (angles per color) any command may build.
    #[arg(long, global = true, env = "LAMINA_MAX_ANGLES", default_value_t = DEFAULT_BUDGET)]
    max_angles: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the portrait axioms; exit 1 on any violation.
    Validate {
        file: PathBuf,
        /// Deepest level searched for separation.
        #[arg(long, default_value_t = 8)]
        depth_cap: usize,
    },
    /// Build the tower to level N and run every invariant.
    Build {
        file: PathBuf,
        #[arg(short = 'n', long = "level")]
        n: usize,
        /// Deepest level for the quadratic crossing check.
        #[arg(long, default_value_t = 3)]
        brute_force_max: usize,
    },
    /// Counts, class sizes, dynamic types and stabilization depths.
    Stats {
        file: PathBuf,
        #[arg(short = 'n', long = "level")]
        n: usize,
    },
    /// List the classes at level N, or the class of one angle.
    Classes {
        file: PathBuf,
        #[arg(short = 'n', long = "level")]
        n: usize,
        #[arg(long)]
        angle: Option<Angle>,
        #[arg(long, value_enum, default_value_t = ColorArg::Both)]
        color: ColorArg,
    },
    /// Gap chains, limit sets and boundary classes of an angle.
    Boundary {
        file: PathBuf,
        #[arg(long)]
        angle: Angle,
        #[arg(short = 'n', long = "level")]
        n: usize,
        #[arg(long, value_enum, default_value_t = ColorArg::White)]
        color: ColorArg,
    },
    /// Write an SVG disk diagram or tiling.
    Render {
        file: PathBuf,
        #[arg(short = 'n', long = "level")]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Disk)]
        mode: Mode,
        /// Output path, `-` for standard output.
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = ColorArg::Both)]
        color: ColorArg,
        /// Draw leaves as chords instead of filled polygons.
        #[arg(long)]
        chords: bool,
        /// Tiling colors follow the intervals of this level.
        #[arg(long, default_value_t = 1)]
        coarse: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ColorArg {
    White,
    Black,
    Both,
}

impl ColorArg {
    fn colors(self) -> Vec<Color> {
        match self {
            ColorArg::White => vec![Color::White],
            ColorArg::Black => vec![Color::Black],
            ColorArg::Both => Color::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Disk,
    Tiling,
}

/// A diagnostic and the process exit status that goes with it.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Failure {
        let code = match e {
            BuildError::BudgetExceeded { .. } => EXIT_BUDGET,
            BuildError::Inconsistent { .. } => EXIT_VIOLATION,
            BuildError::NotBuilt { .. } => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Failure {
        match e {
            RenderError::Build(b) => b.into(),
            RenderError::Invalid(m) if m.contains("cnc") => Failure {
                code: EXIT_VIOLATION,
                message: m,
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<PortraitPair, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_portrait_pair(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn tower(pair: PortraitPair, budget: usize, n: usize) -> Result<Tower, Failure> {
    let mut t = Tower::with_budget(pair, budget)?;
    t.build_to(n)?;
    Ok(t)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let budget = cli.max_angles;
    if budget == 0 {
        return Err(Failure::usage("--max-angles must be positive"));
    }
    match cli.command {
        Command::Validate { file, depth_cap } => {
            let pair = load(&file)?;
            let r = validate_with_budget(&pair, depth_cap, budget);
            print_json(&r);
            for v in &r.violations {
                eprintln!("violation {}: {}", v.axiom, v.witness);
            }
            Ok(match r.verdict {
                Verdict::Pass => 0,
                Verdict::Fail => EXIT_VIOLATION,
                Verdict::Inconclusive => {
                    eprintln!("separation not certified within the depth cap");
                    EXIT_VIOLATION
                }
            })
        }
        Command::Build { file, n, brute_force_max } => {
            let mut t = Tower::with_budget(load(&file)?, budget)?;
            let opts = SuiteOptions {
                brute_force_max,
                ..SuiteOptions::default()
            };
            let r = run_invariants(&mut t, n, &opts)?;
            print_json(&r);
            for f in r.failures() {
                eprintln!("check {} failed at level {}: {}", f.check, f.level, f.detail);
            }
            Ok(if r.passed() { 0 } else { EXIT_VIOLATION })
        }
        Command::Stats { file, n } => {
            let mut t = tower(load(&file)?, budget, n)?;
            print_json(&report::stats(&mut t, n)?);
            Ok(0)
        }
        Command::Classes { file, n, angle, color } => {
            let t = tower(load(&file)?, budget, n)?;
            let lv = t.level_angles(n);
            let only = match &angle {
                Some(a) => Some(
                    lv.index_of(a)
                        .ok_or_else(|| Failure::usage(format!("{a} is not a level-{n} angle")))?,
                ),
                None => None,
            };
            print_json(&report::classes(&t, n, &color.colors(), only));
            Ok(0)
        }
        Command::Boundary { file, angle, n, color } => {
            let t = tower(load(&file)?, budget, n)?;
            let reports = color
                .colors()
                .into_iter()
                .map(|c| report::boundary(&t, &angle, c, n))
                .collect::<Result<Vec<_>, _>>()?;
            print_json(&reports);
            Ok(0)
        }
        Command::Render {
            file,
            n,
            mode,
            output,
            color,
            chords,
            coarse,
        } => {
            let pair = load(&file)?;
            let geometry = pair.geometry.clone();
            let t = tower(pair, budget, n)?;
            let svg = match mode {
                Mode::Disk => {
                    let style = DiskStyle {
                        leaf: if chords { LeafShape::Chord } else { LeafShape::ConvexPolygon },
                        ..DiskStyle::default()
                    };
                    render_lamination(&t, n, &color.colors(), &style)?
                }
                Mode::Tiling => {
                    let geometry =
                        geometry.ok_or_else(|| Failure::usage("tiling needs a [geometry] block in the portrait file"))?;
                    let trace = turtle_trace(&t, &geometry, n)?;
                    eprintln!("closure error {:.3e}", trace.closure_error);
                    render_tiling(
                        &trace,
                        &TilingStyle {
                            coarse_level: coarse,
                            ..TilingStyle::default()
                        },
                    )
                }
            };
            if output.as_os_str() == "-" {
                print!("{svg}");
            } else {
                std::fs::write(&output, svg).map_err(|e| Failure::usage(format!("{}: {e}", output.display())))?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
