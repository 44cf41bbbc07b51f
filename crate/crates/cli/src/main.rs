use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadmod_cli::commands::{
    circular_table, closed_grid, default_circular_thetas, default_trapezoid_heights, half_open_grid, interior_grid,
    modulus_report, mu_plot, parallelogram_grid, recip_grid, solve, trapezoid_table, SolveSettings,
};
use quadmod_cli::report::format_sig9;
use quadmod_cli::shapes::load_input;
use quadmod_cli::{svg, CliError, GridReport, EXIT_OK};

#[derive(Parser)]
#[command(name = "quadmod", version, about = "Conformal modulus of quadrilaterals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SolveArgs {
    /// Largest number of mesh vertices in the adaptive loop.
    #[arg(long, default_value_t = 200_000)]
    budget: usize,
    /// Relative residual target of the linear solver.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Polygon points per arc of circular quadrilaterals.
    #[arg(long = "arc-segments", default_value_t = 64)]
    arc_segments: usize,
}

impl From<SolveArgs> for SolveSettings {
    fn from(a: SolveArgs) -> Self {
        SolveSettings { budget: a.budget, tol: a.tol, arc_segments: a.arc_segments }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write the CSV report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Modulus of a polygon file or a built-in shape (square,
    /// rectangle:h=H, trapezoid:h=H, parallelogram:t=T,h=H, quad:x=X,y=Y,
    /// circular:theta=T,r=R).
    Modulus {
        input: String,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// f(x,y) = QM(x+iy,i,0,1) - 1/QM(y+ix,i,0,1) on a grid over (lo, hi]².
    RecipGrid {
        #[arg(long, default_value = "25x25", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long = "x-range", default_value = "0.5,3", value_parser = parse_range)]
        x_range: (f64, f64),
        #[arg(long = "y-range", default_value = "0.5,3", value_parser = parse_range)]
        y_range: (f64, f64),
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Heatmap of log10(|f| + 1e-10).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Exact and FEM moduli of parallelograms on a t × h grid, t inside
    /// (0, π/2) and h spanning the closed range.
    Parallelogram {
        #[arg(long, default_value = "32x16", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long = "h-range", default_value = "0.5,2", value_parser = parse_range)]
        h_range: (f64, f64),
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Heatmap of log10(|g_exact - g_fem| + 1e-10).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// FEM against Bowman's formula for trapezoids.
    TrapezoidTable {
        /// Comma-separated heights, default 1.1,1.2,…,2.0.
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// FEM against the exact modulus of circular quadrilaterals.
    CircularTable {
        /// Comma-separated angles, default 0.10,0.15,…,1.20.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 0.4)]
        r: f64,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// μ_a(r) on r = k/(steps+1) for each a.
    MuPlot {
        /// Comma-separated values of a in (0, 1/2].
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
        a: Vec<f64>,
        #[arg(long = "r-steps", default_value_t = 99)]
        r_steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("expected <int>x<int>, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad grid size `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad grid size `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok((a, b))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected <lo>,<hi>, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(a <= b) {
        return Err(format!("empty range {a},{b}"));
    }
    Ok((a, b))
}

fn emit(report: &GridReport, out: &OutArgs) -> Result<(), CliError> {
    match &out.out {
        Some(path) => report.write_csv(BufWriter::new(File::create(path)?)),
        None => report.write_csv(io::stdout().lock()),
    }
}

fn write_svg(path: &Option<PathBuf>, doc: impl FnOnce() -> String) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, doc())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Modulus { input, solve: sa, out } => {
            let settings = SolveSettings::from(sa);
            let q = load_input(&input, settings.arc_segments)?;
            let r = solve(&q, &settings)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "modulus            {}", format_sig9(r.modulus))?;
            writeln!(stdout, "dofs               {}", r.dofs)?;
            writeln!(stdout, "reciprocal_defect  {}", format_sig9(r.reciprocal_defect))?;
            writeln!(stdout, "energy_primal      {}", format_sig9(r.energy_primal))?;
            writeln!(stdout, "energy_dual        {}", format_sig9(r.energy_dual))?;
            writeln!(stdout, "eta_global         {}", format_sig9(r.eta_global))?;
            writeln!(stdout, "cg_iterations      {}", r.cg_iterations)?;
            if let Some(path) = &out.out {
                modulus_report(&input, &r, &settings).write_csv(BufWriter::new(File::create(path)?))?;
            }
        }
        Command::RecipGrid { grid, x_range, y_range, solve, out, svg: svg_path } => {
            let xs = half_open_grid(x_range.0, x_range.1, grid.0);
            let ys = half_open_grid(y_range.0, y_range.1, grid.1);
            let (rep, cells) = recip_grid(&xs, &ys, &solve.into())?;
            emit(&rep, &out)?;
            write_svg(&svg_path, || {
                let v: Vec<f64> = cells.iter().map(|c| (c.f.abs() + 1e-10).log10()).collect();
                svg::heatmap("log10(|f(x,y)| + 1e-10)", "x", "y", &xs, &ys, &v)
            })?;
        }
        Command::Parallelogram { grid, h_range, solve, out, svg: svg_path } => {
            let ts = interior_grid(0.0, std::f64::consts::FRAC_PI_2, grid.0);
            let hs = closed_grid(h_range.0, h_range.1, grid.1);
            let (rep, cells) = parallelogram_grid(&ts, &hs, &solve.into())?;
            emit(&rep, &out)?;
            write_svg(&svg_path, || {
                let v: Vec<f64> = cells.iter().map(|c| ((c.exact - c.fem.modulus).abs() + 1e-10).log10()).collect();
                svg::heatmap("log10(|g_exact - g_fem| + 1e-10)", "t", "h", &ts, &hs, &v)
            })?;
        }
        Command::TrapezoidTable { h, solve, out } => {
            let hs = if h.is_empty() { default_trapezoid_heights() } else { h };
            emit(&trapezoid_table(&hs, &solve.into())?.0, &out)?;
        }
        Command::CircularTable { theta, r, solve, out } => {
            let thetas = if theta.is_empty() { default_circular_thetas() } else { theta };
            emit(&circular_table(&thetas, r, &solve.into())?.0, &out)?;
        }
        Command::MuPlot { a, r_steps, out } => emit(&mu_plot(&a, r_steps)?, &out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("quadmod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
