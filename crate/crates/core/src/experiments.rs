//! Seeded ensembles of random quadrangulations, power-law fits and plots.
//!
//! Every sample is a pure function of `(master seed, n, sample index)`, so runs
//! are reproducible regardless of thread count. Records are sorted by
//! `(n, sample)` before they are written.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{bfs_distances_in, UNREACHED};
use crate::schaeffer::{contour_vertex, forward, SchaefferError};
use crate::seed::{derive_seed, rng_from_seed};
use crate::trees::{contour_processes, sample_well_labeled, SampleMode, TreeError};

/// Smallest size accepted by the ancestor statistic.
pub const MIN_ANCESTOR_SIZE: usize = 64;

/// Sampling mode used when none is requested: rejection becomes too slow from
/// `n = 2^12` on, and free shifts give the same graph law.
pub fn default_mode(n: usize) -> SampleMode {
    if n >= 1 << 12 {
        SampleMode::FreeShift
    } else {
        SampleMode::ExactRejection
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Schaeffer(#[from] SchaefferError),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("no valid ancestor pair: {0}")]
    NoValidPair(String),
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub sizes: Vec<usize>,
    pub samples_per_size: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// Also run a double sweep for a diameter lower bound.
    pub diameter: bool,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.sizes.is_empty() {
            return Err(ExperimentError::InvalidSpec("no sizes".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::InvalidSpec("sizes must be strictly increasing".into()));
        }
        if self.sizes[0] == 0 {
            return Err(ExperimentError::InvalidSpec("sizes must be positive".into()));
        }
        if self.samples_per_size == 0 {
            return Err(ExperimentError::InvalidSpec("need at least one sample per size".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatRecord {
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    /// Largest distance from the pointed vertex.
    pub radius: u32,
    /// Double-sweep diameter lower bound, 0 when not requested.
    pub diameter_lower: u32,
    pub max_label: u32,
    /// Height of the underlying plane tree.
    pub max_height: u32,
    pub rescaled_radius: f64,
    pub rescaled_diameter: f64,
    pub rescaled_max_label: f64,
    pub rescaled_height: f64,
}

/// `(9 / (8n))^(1/4)`.
pub fn label_scale(n: usize) -> f64 {
    (9.0 / (8.0 * n as f64)).powf(0.25)
}

/// `(2n)^(-1/2)`.
pub fn height_scale(n: usize) -> f64 {
    (2.0 * n as f64).powf(-0.5)
}

pub fn measure_sample(n: usize, sample: usize, seed: u64, mode: SampleMode, diameter: bool) -> Result<StatRecord, ExperimentError> {
    let mut rng = rng_from_seed(seed);
    let t = sample_well_labeled(n, mode, &mut rng)?;
    let q = forward(&t)?;
    let adj = q.map().adjacency();
    let from_root = bfs_distances_in(adj, q.pointed_vertex());
    let (far, radius) = farthest(&from_root);
    let diameter_lower = if diameter { farthest(&bfs_distances_in(adj, far)).1 } else { 0 };
    let max_label = t.labels().iter().copied().max().unwrap_or(0);
    let pair = contour_processes(&t);
    let max_height = pair.heights.iter().copied().max().unwrap_or(0);
    let ls = label_scale(n);
    Ok(StatRecord {
        n,
        sample,
        seed,
        radius,
        diameter_lower,
        max_label,
        max_height,
        rescaled_radius: ls * radius as f64,
        rescaled_diameter: ls * diameter_lower as f64,
        rescaled_max_label: ls * max_label as f64,
        rescaled_height: height_scale(n) * max_height as f64,
    })
}

fn farthest(dist: &[u32]) -> (u32, u32) {
    let mut best = (0, 0);
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > best.1 {
            best = (v as u32, d);
        }
    }
    best
}

pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Vec<StatRecord>, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> =
        spec.sizes.iter().flat_map(|&n| (0..spec.samples_per_size).map(move |s| (n, s))).collect();
    let mut records = jobs
        .into_par_iter()
        .map(|(n, s)| measure_sample(n, s, derive_seed(spec.seed, n as u64, s as u64), spec.mode, spec.diameter))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(|r| (r.n, r.sample));
    Ok(records)
}

pub const RECORD_CSV_HEADER: &str = "n,sample,seed,radius,diameter_lower,max_label,max_height,rescaled_radius,rescaled_diameter,rescaled_max_label,rescaled_height";

pub fn records_csv(records: &[StatRecord]) -> String {
    let mut out = String::from(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.sample,
            r.seed,
            r.radius,
            r.diameter_lower,
            r.max_label,
            r.max_height,
            r.rescaled_radius,
            r.rescaled_diameter,
            r.rescaled_max_label,
            r.rescaled_height
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    Radius,
    DiameterLower,
    MaxLabel,
    MaxHeight,
}

impl Statistic {
    pub fn of(self, r: &StatRecord) -> f64 {
        match self {
            Statistic::Radius => r.radius as f64,
            Statistic::DiameterLower => r.diameter_lower as f64,
            Statistic::MaxLabel => r.max_label as f64,
            Statistic::MaxHeight => r.max_height as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

/// Mean of a statistic per size, in increasing `n`.
pub fn means_by_size(records: &[StatRecord], statistic: Statistic) -> Vec<(f64, f64)> {
    let mut groups: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in records {
        let e = groups.entry(r.n).or_default();
        e.0 += statistic.of(r);
        e.1 += 1;
    }
    groups.into_iter().map(|(n, (sum, count))| (n as f64, sum / count as f64)).collect()
}

/// Least squares fit of `log y` against `log x`.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<Fit, ExperimentError> {
    if points.len() < 3 {
        return Err(ExperimentError::DegenerateFit(format!("{} distinct sizes, need 3", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(ExperimentError::DegenerateFit("non-positive value on a log scale".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ExperimentError::DegenerateFit("all sizes equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(Fit { slope, intercept, stderr })
}

pub fn fit_exponent(records: &[StatRecord], statistic: Statistic) -> Result<Fit, ExperimentError> {
    fit_log_log(&means_by_size(records, statistic))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AncestorRecord {
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    pub i: usize,
    pub j: usize,
    pub distance: u32,
    /// `n^(-1/4) * distance`.
    pub rescaled: f64,
}

pub const ANCESTOR_CSV_HEADER: &str = "n,sample,seed,i,j,distance,rescaled";

pub fn ancestor_csv(records: &[AncestorRecord]) -> String {
    let mut out = String::from(ANCESTOR_CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(out, "{},{},{},{},{},{},{}", r.n, r.sample, r.seed, r.i, r.j, r.distance, r.rescaled)
            .expect("writing to a String");
    }
    out
}

/// End of the excursion above `heights[i]`: first later time with a smaller height.
fn excursion_ends(heights: &[u32]) -> Vec<usize> {
    let mut end = vec![heights.len(); heights.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (k, &h) in heights.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if heights[top] > h {
                end[top] = k;
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(k);
    }
    end
}

/// Checks that contour times `i < j` form an ancestor pair: `C_i < C_j`,
/// `C_i` is the minimum of `C` on `[i, j]`, and `j - i >= gap`.
pub fn check_ancestor_pair(heights: &[u32], i: usize, j: usize, gap: usize) -> Result<(), ExperimentError> {
    if i >= j || j >= heights.len() {
        return Err(ExperimentError::NoValidPair(format!("times ({i}, {j}) are not increasing and in range")));
    }
    if j - i < gap {
        return Err(ExperimentError::NoValidPair(format!("gap {} below {gap}", j - i)));
    }
    if heights[i] >= heights[j] || heights[i..=j].iter().any(|&h| h < heights[i]) {
        return Err(ExperimentError::NoValidPair(format!("x({i}) is not a strict ancestor of x({j})")));
    }
    Ok(())
}

/// One ancestor/descendant pair per sample, at contour gap at least `n/4`.
///
/// The ancestor time `i` is uniform among times whose excursion leaves room for
/// such a gap, then `j` is uniform among valid descendant times after it.
pub fn ancestor_geodesic_stat(n: usize, samples: usize, seed: u64, mode: SampleMode) -> Result<Vec<AncestorRecord>, ExperimentError> {
    if n < MIN_ANCESTOR_SIZE {
        return Err(ExperimentError::InvalidSpec(format!("n = {n} is below {MIN_ANCESTOR_SIZE}")));
    }
    (0..samples)
        .into_par_iter()
        .map(|s| ancestor_sample(n, s, derive_seed(seed, n as u64, s as u64), mode))
        .collect()
}

fn ancestor_sample(n: usize, sample: usize, seed: u64, mode: SampleMode) -> Result<AncestorRecord, ExperimentError> {
    let mut rng = rng_from_seed(seed);
    let t = sample_well_labeled(n, mode, &mut rng)?;
    let q = forward(&t)?;
    let heights = contour_processes(&t).heights;
    let gap = n.div_ceil(4);
    let ends = excursion_ends(&heights);
    // From time i + gap up to the end, two consecutive times never share a height.
    let candidates: Vec<usize> = (0..heights.len()).filter(|&i| ends[i] >= i + gap + 2).collect();
    if candidates.is_empty() {
        return Err(ExperimentError::NoValidPair("no excursion is long enough".into()));
    }
    let i = candidates[rng.random_range(0..candidates.len())];
    let j = loop {
        let j = rng.random_range(i + gap..ends[i]);
        if heights[j] > heights[i] {
            break j;
        }
    };
    check_ancestor_pair(&heights, i, j, gap)?;
    let (x, y) = (contour_vertex(&q, i), contour_vertex(&q, j));
    let distance = bfs_distances_in(q.map().adjacency(), x)[y as usize];
    Ok(AncestorRecord { n, sample, seed, i, j, distance, rescaled: distance as f64 / (n as f64).powf(0.25) })
}

/// Empirical quantile by the nearest-rank rule.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean of the value column per `n` on log-log axes, with the fitted line.
    LogLog,
    /// A `distance,count` histogram as a polyline.
    Profile,
}

impl std::str::FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loglog" => Ok(PlotKind::LogLog),
            "profile" => Ok(PlotKind::Profile),
            other => Err(format!("unknown plot kind `{other}`")),
        }
    }
}

fn parse_columns(csv_text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), ExperimentError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let malformed = |line: usize, message: String| ExperimentError::MalformedCsv { line, message };
    let headers: Vec<String> =
        reader.headers().map_err(|e| malformed(1, e.to_string()))?.iter().map(|h| h.trim().to_string()).collect();
    if headers.len() < 2 || headers.iter().all(|h| h.is_empty()) {
        return Err(malformed(1, "need a header with at least two columns".into()));
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| malformed(line, e.to_string()))?;
        let row = record
            .iter()
            .map(|field| field.trim().parse::<f64>().map_err(|_| malformed(line, format!("`{field}` is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(malformed(1, "no data rows".into()));
    }
    Ok((headers, rows))
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Self { x: span(&mut xs.clone()), y: span(&mut ys.clone()) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (vx, vy) = (self.x.0 + f * (self.x.1 - self.x.0), self.y.0 + f * (self.y.1 - self.y.0));
            let (px, py) = (self.px(vx), self.py(vy));
            let _ = writeln!(out, r#"<text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{vx:.3}</text>"#, y0 + 16.0);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{py:.1}" font-size="11" text-anchor="end">{vy:.3}</text>"#, x0 - 6.0);
        }
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{x_label}</text>"#, WIDTH / 2.0, HEIGHT - 14.0);
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a CSV as a standalone SVG document.
///
/// `LogLog` reads `n` and `radius` columns when present, otherwise the first
/// two columns, and annotates the fitted slope. `Profile` reads the first two
/// columns as `distance,count` and annotates the total mass.
pub fn emit_svg(csv_text: &str, kind: PlotKind) -> Result<String, ExperimentError> {
    let (headers, rows) = parse_columns(csv_text)?;
    let col = |name: &str, fallback: usize| headers.iter().position(|h| h == name).unwrap_or(fallback);
    let mut body = String::new();
    match kind {
        PlotKind::LogLog => {
            let (cx, cy) = (col("n", 0), col("radius", 1));
            let mut groups: std::collections::BTreeMap<u64, (f64, f64, usize)> = Default::default();
            for (idx, row) in rows.iter().enumerate() {
                let (x, y) = (row[cx], row[cy]);
                if !(x > 0.0 && y > 0.0) {
                    return Err(ExperimentError::MalformedCsv { line: idx + 2, message: "log-log values must be positive".into() });
                }
                let e = groups.entry(x.to_bits()).or_insert((x, 0.0, 0));
                e.1 += y;
                e.2 += 1;
            }
            let points: Vec<(f64, f64)> = groups.values().map(|&(x, s, c)| (x, s / c as f64)).collect();
            let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log10(), y.log10())).collect();
            let frame = Frame::new(logs.iter().map(|p| p.0), logs.iter().map(|p| p.1));
            frame.axes(&mut body, &format!("log10 {}", escape(&headers[cx])), &format!("log10 mean {}", escape(&headers[cy])));
            for &(x, y) in &logs {
                let _ = writeln!(body, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, frame.px(x), frame.py(y));
            }
            if let Ok(fit) = fit_log_log(&points) {
                let line = |x: f64| fit.intercept / std::f64::consts::LN_10 + fit.slope * x;
                let (a, b) = frame.x;
                let _ = writeln!(
                    body,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-dasharray="6 4"/>"#,
                    frame.px(a),
                    frame.py(line(a)),
                    frame.px(b),
                    frame.py(line(b))
                );
                let _ = writeln!(
                    body,
                    r#"<text x="{:.1}" y="{:.1}" font-size="14" fill="crimson">slope {:.3}</text>"#,
                    MARGIN + 12.0,
                    MARGIN - 12.0,
                    fit.slope
                );
            }
        }
        PlotKind::Profile => {
            let frame = Frame::new(rows.iter().map(|r| r[0]), rows.iter().map(|r| r[1]).chain(std::iter::once(0.0)));
            frame.axes(&mut body, &escape(&headers[0]), &escape(&headers[1]));
            let pts: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", frame.px(r[0]), frame.py(r[1]))).collect();
            let _ = writeln!(body, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, pts.join(" "));
            let mass: f64 = rows.iter().map(|r| r[1]).sum();
            let _ = writeln!(body, r#"<text x="{:.1}" y="{:.1}" font-size="14">mass {mass}</text>"#, MARGIN + 12.0, MARGIN - 12.0);
        }
    }
    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<StatRecord> {
        [16usize, 256, 4096, 65536]
            .iter()
            .map(|&n| StatRecord {
                n,
                sample: 0,
                seed: 0,
                radius: f(n as f64) as u32,
                diameter_lower: 0,
                max_label: 0,
                max_height: 0,
                rescaled_radius: 0.0,
                rescaled_diameter: 0.0,
                rescaled_max_label: 0.0,
                rescaled_height: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_exponent(&synthetic(|n| n.powf(0.25)), Statistic::Radius).unwrap();
        assert!((fit.slope - 0.25).abs() < 1e-12, "{fit:?}");
        assert!(fit.stderr < 1e-12);
        let flat = fit_exponent(&synthetic(|_| 7.0), Statistic::Radius).unwrap();
        assert!(flat.slope.abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits() {
        let two = &synthetic(|n| n)[..2];
        assert!(matches!(fit_exponent(two, Statistic::Radius), Err(ExperimentError::DegenerateFit(_))));
        assert!(matches!(fit_exponent(&synthetic(|_| 0.0), Statistic::Radius), Err(ExperimentError::DegenerateFit(_))));
    }

    #[test]
    fn small_ensemble_is_reproducible() {
        let spec = EnsembleSpec { sizes: vec![4], samples_per_size: 10, seed: 3, mode: SampleMode::ExactRejection, diameter: true };
        let a = run_ensemble(&spec).unwrap();
        assert_eq!(a.len(), 10);
        for r in &a {
            assert!(r.radius >= 1);
            assert_eq!(r.radius, r.max_label);
            assert!(r.diameter_lower >= r.radius);
            assert!(r.rescaled_radius > 0.0 && r.rescaled_radius.is_finite());
        }
        assert_eq!(records_csv(&a), records_csv(&run_ensemble(&spec).unwrap()));
    }

    #[test]
    fn spec_validation() {
        let mut spec = EnsembleSpec { sizes: vec![8, 4], samples_per_size: 1, seed: 0, mode: SampleMode::FreeShift, diameter: false };
        assert!(run_ensemble(&spec).is_err());
        spec.sizes = vec![4];
        spec.samples_per_size = 0;
        assert!(run_ensemble(&spec).is_err());
    }

    #[test]
    fn ancestor_pairs() {
        let recs = ancestor_geodesic_stat(200, 20, 5, SampleMode::FreeShift).unwrap();
        assert_eq!(recs.len(), 20);
        for r in &recs {
            assert!(r.distance > 0 && r.rescaled > 0.0);
            assert!(r.j - r.i >= 50);
        }
        assert!(matches!(check_ancestor_pair(&[0, 1, 0], 1, 1, 0), Err(ExperimentError::NoValidPair(_))));
        assert!(matches!(check_ancestor_pair(&[0, 1, 2, 1, 0], 1, 3, 0), Err(ExperimentError::NoValidPair(_))));
        assert!(check_ancestor_pair(&[0, 1, 2, 1, 0], 1, 2, 1).is_ok());
        assert!(ancestor_geodesic_stat(10, 1, 0, SampleMode::FreeShift).is_err());
    }

    #[test]
    fn excursion_ends_match_scan() {
        let h = [0, 1, 2, 1, 2, 3, 2, 1, 0, 1, 0];
        let ends = excursion_ends(&h);
        for i in 0..h.len() {
            let expected = (i + 1..h.len()).find(|&k| h[k] < h[i]).unwrap_or(h.len());
            assert_eq!(ends[i], expected);
        }
    }

    #[test]
    fn svg_outputs() {
        let mut csv = String::from("n,radius\n");
        for n in [16.0f64, 256.0, 4096.0] {
            csv.push_str(&format!("{n},{}\n", n.powf(0.25)));
        }
        let svg = emit_svg(&csv, PlotKind::LogLog).unwrap();
        assert!(svg.contains("slope 0.250"));
        assert!(svg.starts_with("<?xml"));
        assert!(matches!(emit_svg("", PlotKind::LogLog), Err(ExperimentError::MalformedCsv { .. })));
        assert!(matches!(emit_svg("n,radius\n", PlotKind::LogLog), Err(ExperimentError::MalformedCsv { .. })));
        assert!(matches!(emit_svg("n,radius\n4,x\n", PlotKind::LogLog), Err(ExperimentError::MalformedCsv { line: 2, .. })));
        let profile = emit_svg("distance,count\n0,1\n1,3\n2,2\n", PlotKind::Profile).unwrap();
        assert!(profile.contains("mass 6"));
    }

    #[test]
    fn nearest_rank_quantile() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.01), 1.0);
        assert_eq!(quantile(&v, 0.5), 50.0);
        assert_eq!(quantile(&v, 1.0), 100.0);
    }
}
