//! `quadlab`: sample, check and measure random planar quadrangulations.
//!
//! Exit status is 0 when every requested check passes, 1 when a check fails
//! and 2 for usage or input errors. Output files are written atomically.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use quadlab_core::experiments::{
    ancestor_csv, ancestor_geodesic_stat, default_mode, emit_svg, fit_exponent, records_csv, run_ensemble, EnsembleSpec,
    PlotKind, Statistic,
};
use quadlab_core::gh::{gh_exact_small, gh_lower_bounds, MAX_EXACT_POINTS};
use quadlab_core::metric::{bfs_distances, radius_and_profile, ContourBoundChecker};
use quadlab_core::regularity::{bottleneck_scan, dumbbell, BottleneckScan, ScanSummary};
use quadlab_core::schaeffer::{forward, reverse, tree_vertex_map};
use quadlab_core::seed::derive_seed;
use quadlab_core::surface::{build_mesh, SurfaceReport};
use quadlab_core::trees::{
    contour_processes, enumerate_well_labeled, rooted_quadrangulation_count, sample_well_labeled_seeded,
    MAX_ENUMERATION_SIZE,
};
use quadlab_core::{FiniteMetricSpace, Quadrangulation, SampleMode, WellLabeledTree, FORMAT_VERSIONS};

fn long_version() -> &'static str {
    let mut text = format!("{}\nformats:", env!("CARGO_PKG_VERSION"));
    for (name, version) in FORMAT_VERSIONS {
        text.push_str(&format!("\n  {name} v{version}"));
    }
    Box::leak(text.into_boxed_str())
}

#[derive(Parser)]
#[command(name = "quadlab", version, long_version = long_version(), about = "Random planar quadrangulations lab")]
struct Cli {
    /// Master seed; every random object is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print results as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print results as CSV.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Tree,
    Map,
    Contour,
    Profile,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Map JSON.
    Map,
    /// Well-labeled tree text.
    Tree,
    /// Contour CSV `i,C,L`.
    Contour,
    /// Distance-to-root histogram CSV.
    Profile,
    /// Graph distance matrix text.
    Dist,
    /// Surface mesh text.
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Reverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum Plot {
    Loglog,
    Profile,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a uniform well-labeled tree and its quadrangulation.
    Sample {
        #[arg(long)]
        n: usize,
        /// exact-rejection or free-shift (default depends on n).
        #[arg(long)]
        mode: Option<SampleMode>,
        #[arg(long, value_enum, default_value = "map")]
        what: SampleKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count rooted quadrangulations with n faces through the bijection.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Roundtrip, label/distance and contour-bound checks.
    Verify {
        #[arg(long)]
        n: usize,
        /// Check every well-labeled tree instead of random samples.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        mode: Option<SampleMode>,
    },
    /// Glued-cube surface checks: vertex isometry, density and GH bound.
    SurfaceCheck {
        /// Map JSON; random maps of size --n when absent.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Mesh resolutions.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        m: Vec<usize>,
        /// Write the mesh of the first map at the finest resolution.
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gromov-Hausdorff distance between two distance-matrix files.
    Gh { a: PathBuf, b: PathBuf },
    /// Scan short simple cycles for bottlenecks.
    Loops {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long)]
        mode: Option<SampleMode>,
        #[arg(short = 'k', long = "max-len", default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Scan two maps of size n/2 glued along an edge.
        #[arg(long)]
        dumbbell: bool,
        /// Per-cycle JSON report.
        #[arg(long)]
        detail: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ensembles over several sizes with exponent fits.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "1024,4096,16384")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        mode: Option<SampleMode>,
        /// Ancestor/descendant distances instead of radius statistics.
        #[arg(long)]
        ancestor: bool,
        /// Fail unless the radius and diameter slopes lie in LO,HI.
        #[arg(long, value_name = "LO,HI", value_parser = parse_range)]
        slope_range: Option<(f64, f64)>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Log-log plot of mean radius.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Render a CSV as SVG.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "loglog")]
        kind: Plot,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the bijection to a file.
    Schaeffer {
        #[arg(value_enum)]
        direction: Direction,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a map or tree file to another format.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "map")]
        from: Format,
        #[arg(long, value_enum)]
        to: Format,
        /// Mesh resolution for `--to off`.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Pass,
    Fail(String),
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().expect("thread pool is configured once");
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(why)) => {
            eprintln!("check failed: {why}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        return Ok(text);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `path` through a temporary file in the same directory, or to stdout.
fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

fn read_map(path: &Path) -> Result<Quadrangulation> {
    Quadrangulation::from_json(&read_input(path)?).with_context(|| format!("parsing map {}", path.display()))
}

fn read_tree(path: &Path) -> Result<WellLabeledTree> {
    WellLabeledTree::from_text(&read_input(path)?).with_context(|| format!("parsing tree {}", path.display()))
}

fn random_map(n: usize, mode: SampleMode, seed: u64) -> Result<Quadrangulation> {
    Ok(forward(&sample_well_labeled_seeded(n, mode, seed)?)?)
}

/// Maps to work on: the input file, or `samples` random maps of size `n`.
fn maps(input: Option<&Path>, n: usize, samples: usize, mode: Option<SampleMode>, seed: u64) -> Result<Vec<(u64, Quadrangulation)>> {
    match input {
        Some(path) => Ok(vec![(seed, read_map(path)?)]),
        None => {
            if n == 0 || samples == 0 {
                bail!("--n and --samples must be positive");
            }
            let mode = mode.unwrap_or(default_mode(n));
            (0..samples as u64)
                .map(|i| {
                    let s = derive_seed(seed, n as u64, i);
                    Ok((s, random_map(n, mode, s)?))
                })
                .collect()
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Sample { n, mode, what, out } => {
            if *n == 0 {
                bail!("--n must be positive");
            }
            let t = sample_well_labeled_seeded(*n, mode.unwrap_or(default_mode(*n)), cli.seed)?;
            let text = match what {
                SampleKind::Tree => t.to_text(),
                SampleKind::Map => forward(&t)?.to_json() + "\n",
                SampleKind::Contour => contour_processes(&t).to_csv(),
                SampleKind::Profile => radius_and_profile(&forward(&t)?).to_csv(),
            };
            write_output(out.as_deref(), &text)?;
            Ok(Outcome::Pass)
        }
        Command::Enumerate { n } => enumerate(cli, *n),
        Command::Verify { n, exhaustive, samples, mode } => verify(cli, *n, *exhaustive, *samples, *mode),
        Command::SurfaceCheck { input, n, samples, m, off, out } => {
            if m.is_empty() || m.contains(&0) {
                bail!("--m needs positive resolutions");
            }
            let maps = maps(input.as_deref(), *n, *samples, None, cli.seed)?;
            let mut reports = Vec::new();
            for (_, q) in &maps {
                for &res in m {
                    reports.push(SurfaceReport::measure(q, res)?);
                }
            }
            if let Some(path) = off {
                let finest = *m.iter().max().expect("m is not empty");
                write_output(Some(path), &build_mesh(&maps[0].1, finest)?.to_off())?;
            }
            let text = if cli.json {
                let rows: Vec<_> = reports
                    .iter()
                    .map(|r| {
                        json!({"n": r.n, "m": r.m, "max_isometry_error": r.max_isometry_error,
                               "density_radius": r.density_radius, "gh_upper": r.gh_upper, "ok": r.within_bounds()})
                    })
                    .collect();
                serde_json::to_string_pretty(&rows)? + "\n"
            } else {
                let mut text = format!("{}\n", SurfaceReport::CSV_HEADER);
                for r in &reports {
                    text.push_str(&r.csv_row());
                    text.push('\n');
                }
                text
            };
            write_output(out.as_deref(), &text)?;
            let bad = reports.iter().filter(|r| !r.within_bounds()).count();
            Ok(if bad == 0 { Outcome::Pass } else { Outcome::Fail(format!("{bad} reports outside the bounds")) })
        }
        Command::Gh { a, b } => {
            let parse = |p: &PathBuf| -> Result<FiniteMetricSpace> {
                FiniteMetricSpace::from_text(&read_input(p)?).with_context(|| format!("parsing {}", p.display()))
            };
            let (sa, sb) = (parse(a)?, parse(b)?);
            let lower = gh_lower_bounds(&sa, &sb);
            let exact = if sa.size() <= MAX_EXACT_POINTS && sb.size() <= MAX_EXACT_POINTS {
                Some(gh_exact_small(&sa, &sb)?)
            } else {
                None
            };
            if cli.json {
                println!("{}", json!({"gh": exact, "lower_bound": lower, "exact": exact.is_some()}));
            } else {
                match exact {
                    Some(value) => println!("{value:?}"),
                    None => println!(">= {lower:?} (lower bound; exact search needs at most {MAX_EXACT_POINTS} points)"),
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Loops { input, n, samples, mode, max_len, delta, epsilon, dumbbell: bell, detail, out } => {
            if !(*delta >= 0.0 && *epsilon >= 0.0) {
                bail!("--delta and --epsilon must be non-negative");
            }
            let maps = if *bell {
                let half = n / 2;
                let mode = mode.unwrap_or(default_mode(half));
                (0..*samples as u64)
                    .map(|i| {
                        let s = derive_seed(cli.seed, *n as u64, i);
                        let a = random_map(half, mode, derive_seed(s, 0, 0))?;
                        let b = random_map(n - half, mode, derive_seed(s, 0, 1))?;
                        Ok((s, dumbbell(&a, &b)))
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                maps(input.as_deref(), *n, *samples, *mode, cli.seed)?
            };
            let scans: Vec<(u64, BottleneckScan)> = maps
                .iter()
                .map(|(s, q)| Ok((*s, bottleneck_scan(q, *delta, *epsilon, *max_len)?)))
                .collect::<Result<_>>()?;
            if let Some(path) = detail {
                let all: Vec<_> = scans.iter().map(|(s, scan)| json!({"seed": s, "scan": scan})).collect();
                write_output(Some(path), &(serde_json::to_string_pretty(&all)? + "\n"))?;
            }
            let text = if cli.json {
                let all: Vec<_> = scans.iter().map(|(s, scan)| json!({"seed": s, "summary": scan.summary})).collect();
                serde_json::to_string_pretty(&all)? + "\n"
            } else {
                let mut text = format!("{}\n", ScanSummary::CSV_HEADER);
                for (s, scan) in &scans {
                    text.push_str(&scan.summary.csv_row(*s));
                    text.push('\n');
                }
                text
            };
            write_output(out.as_deref(), &text)?;
            let found: usize = scans.iter().map(|(_, scan)| scan.summary.bottlenecks).sum();
            Ok(if found == 0 { Outcome::Pass } else { Outcome::Fail(format!("{found} bottleneck cycles")) })
        }
        Command::Scaling { sizes, samples, mode, ancestor, slope_range, out, svg } => {
            scaling(cli, sizes, *samples, *mode, *ancestor, *slope_range, out.as_deref(), svg.as_deref())
        }
        Command::Plot { input, kind, out } => {
            let kind = match kind {
                Plot::Loglog => PlotKind::LogLog,
                Plot::Profile => PlotKind::Profile,
            };
            write_output(out.as_deref(), &emit_svg(&read_input(input)?, kind)?)?;
            Ok(Outcome::Pass)
        }
        Command::Schaeffer { direction, input, out } => {
            let text = match direction {
                Direction::Forward => forward(&read_tree(input)?)?.to_json() + "\n",
                Direction::Reverse => reverse(&read_map(input)?)?.to_text(),
            };
            write_output(out.as_deref(), &text)?;
            Ok(Outcome::Pass)
        }
        Command::Convert { input, from, to, m, out } => {
            let (tree, map) = match from {
                Format::Map => {
                    let q = read_map(input)?;
                    (None, q)
                }
                Format::Tree => {
                    let t = read_tree(input)?;
                    let q = forward(&t)?;
                    (Some(t), q)
                }
                _ => bail!("--from must be map or tree"),
            };
            let tree = || -> Result<WellLabeledTree> {
                match &tree {
                    Some(t) => Ok(t.clone()),
                    None => Ok(reverse(&map)?),
                }
            };
            let text = match to {
                Format::Map => map.to_json() + "\n",
                Format::Tree => tree()?.to_text(),
                Format::Contour => contour_processes(&tree()?).to_csv(),
                Format::Profile => radius_and_profile(&map).to_csv(),
                Format::Dist => FiniteMetricSpace::matrix_from_quadrangulation(&map)?.to_text(),
                Format::Off => build_mesh(&map, *m)?.to_off(),
            };
            write_output(out.as_deref(), &text)?;
            Ok(Outcome::Pass)
        }
    }
}

fn enumerate(cli: &Cli, n: usize) -> Result<Outcome> {
    if n == 0 || n > MAX_ENUMERATION_SIZE {
        bail!("--n must be in 1..={MAX_ENUMERATION_SIZE}");
    }
    let mut trees = 0usize;
    let mut codes = std::collections::HashSet::new();
    for t in enumerate_well_labeled(n)? {
        trees += 1;
        codes.insert(forward(&t)?.map().rooted_code());
    }
    let expected = rooted_quadrangulation_count(n as u32);
    let count = codes.len();
    if cli.json {
        println!("{}", json!({"n": n, "trees": trees, "quadrangulations": count, "formula": expected.to_string()}));
    } else if cli.csv {
        println!("n,trees,quadrangulations,formula\n{n},{trees},{count},{expected}");
    } else {
        println!("{count}");
    }
    Ok(if count as u128 == expected && trees == count {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{count} distinct maps from {trees} trees, formula gives {expected}"))
    })
}

#[derive(Default)]
struct VerifyTally {
    objects: usize,
    roundtrip_failures: usize,
    label_failures: usize,
    bound_checks: usize,
    bound_failures: usize,
}

fn verify_one(t: &WellLabeledTree, all_pairs: bool, seed: u64, tally: &mut VerifyTally) -> Result<()> {
    let q = forward(t)?;
    tally.objects += 1;
    let back = reverse(&q)?;
    // Trees with another root label come back rooted at their first label-1 corner.
    let roundtrip = if t.root_label() == 1 {
        &back == t
    } else {
        forward(&back)?.map().rooted_code() == q.map().rooted_code()
    };
    if q.vertex_count() != t.n() + 2 || !roundtrip {
        tally.roundtrip_failures += 1;
    }
    let dist = bfs_distances(&q, q.pointed_vertex());
    let image = tree_vertex_map(t, &q);
    if image.iter().zip(t.labels()).any(|(&v, &l)| dist[v as usize] != l) {
        tally.label_failures += 1;
    }
    let pair = contour_processes(t);
    let checker = ContourBoundChecker::new(&pair, &q);
    let times = 2 * t.n();
    if all_pairs {
        for i in 0..times {
            let js: Vec<usize> = (i + 1..=times).collect();
            for c in checker.check_from(i, &js)? {
                tally.bound_checks += 1;
                tally.bound_failures += usize::from(!c.holds);
            }
        }
    } else {
        let i = (derive_seed(seed, 0, 0) % times as u64) as usize;
        let js: Vec<usize> = (1..=20).map(|k| i + 1 + (derive_seed(seed, 0, k) % (times - i) as u64) as usize).collect();
        for c in checker.check_from(i, &js)? {
            tally.bound_checks += 1;
            tally.bound_failures += usize::from(!c.holds);
        }
    }
    Ok(())
}

fn verify(cli: &Cli, n: usize, exhaustive: bool, samples: usize, mode: Option<SampleMode>) -> Result<Outcome> {
    if n == 0 {
        bail!("--n must be positive");
    }
    let mut tally = VerifyTally::default();
    if exhaustive {
        if n > MAX_ENUMERATION_SIZE {
            bail!("--exhaustive needs --n at most {MAX_ENUMERATION_SIZE}");
        }
        for t in enumerate_well_labeled(n)? {
            verify_one(&t, n <= 4, 0, &mut tally)?;
        }
    } else {
        let mode = mode.unwrap_or(default_mode(n));
        for i in 0..samples as u64 {
            let seed = derive_seed(cli.seed, n as u64, i);
            let t = sample_well_labeled_seeded(n, mode, seed)?;
            verify_one(&t, n <= 4, seed, &mut tally)?;
        }
    }
    let failures = tally.roundtrip_failures + tally.label_failures + tally.bound_failures;
    if cli.json {
        println!(
            "{}",
            json!({"n": n, "roundtrips": tally.objects, "roundtrip_failures": tally.roundtrip_failures,
                   "label_failures": tally.label_failures, "bound_checks": tally.bound_checks,
                   "bound_failures": tally.bound_failures})
        );
    } else {
        println!("roundtrips: {} ({} failed)", tally.objects, tally.roundtrip_failures);
        println!("labels equal distances: {} failed", tally.label_failures);
        println!("contour bound: {} checks ({} violated)", tally.bound_checks, tally.bound_failures);
    }
    Ok(if failures == 0 { Outcome::Pass } else { Outcome::Fail(format!("{failures} failures")) })
}

#[allow(clippy::too_many_arguments)]
fn scaling(
    cli: &Cli,
    sizes: &[usize],
    samples: usize,
    mode: Option<SampleMode>,
    ancestor: bool,
    slope_range: Option<(f64, f64)>,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<Outcome> {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let mode = mode.unwrap_or(default_mode(largest));
    if ancestor {
        let mut records = Vec::new();
        for &n in sizes {
            records.extend(ancestor_geodesic_stat(n, samples, cli.seed, mode)?);
        }
        write_output(out, &ancestor_csv(&records))?;
        return Ok(Outcome::Pass);
    }
    let spec = EnsembleSpec { sizes: sizes.to_vec(), samples_per_size: samples, seed: cli.seed, mode, diameter: true };
    let records = run_ensemble(&spec)?;
    let csv = records_csv(&records);
    let stats = [
        ("radius", Statistic::Radius),
        ("diameter_lower", Statistic::DiameterLower),
        ("max_label", Statistic::MaxLabel),
        ("max_height", Statistic::MaxHeight),
    ];
    let fits: Vec<_> = stats.iter().map(|&(name, s)| (name, fit_exponent(&records, s).ok())).collect();
    let summary = if cli.json {
        let obj: serde_json::Map<String, serde_json::Value> =
            fits.iter().map(|(name, fit)| (name.to_string(), json!(fit))).collect();
        serde_json::to_string_pretty(&obj)? + "\n"
    } else {
        let mut text = String::from("statistic,slope,intercept,stderr\n");
        for (name, fit) in &fits {
            match fit {
                Some(f) => text.push_str(&format!("{name},{},{},{}\n", f.slope, f.intercept, f.stderr)),
                None => text.push_str(&format!("{name},,,\n")),
            }
        }
        text
    };
    match out {
        Some(path) => {
            write_output(Some(path), &csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    if let Some(path) = svg {
        write_output(Some(path), &emit_svg(&csv, PlotKind::LogLog)?)?;
    }
    if let Some((lo, hi)) = slope_range {
        for (name, fit) in fits.iter().take(2) {
            match fit {
                Some(f) if (lo..=hi).contains(&f.slope) => {}
                Some(f) => return Ok(Outcome::Fail(format!("{name} slope {} outside [{lo}, {hi}]", f.slope))),
                None => return Ok(Outcome::Fail(format!("{name} slope could not be fitted"))),
            }
        }
    }
    Ok(Outcome::Pass)
}
