//! Command-line front end: instance generation, every algorithm as a
//! subcommand, and optional cross-checks against brute-force references.
//!
//! Results go to stdout (or `--out`); a flat `key=value` stats record goes
//! to stderr (or `--stats`). Keys starting with `time_` hold wall-clock
//! measurements; every other line depends only on inputs and flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamspace::generate::{generate, InstanceKind};
use hamspace::reduction::binary_distances;
use hamspace::sketch::threshold_count;
use hamspace::text::{parse_matrix, write_matrix};
use hamspace::{
    approx_mst, approx_mst_sigma, approx_nearest_neighbors, approx_product, apphap,
    center_clustering, diameter_clustering, distances_from_products, exact_mst, exact_product,
    gonzalez_exact, mmst_distances, output_sensitive_mst_with, product_from_distances, render,
    sigma_hamming_distance, BitMatrix, CountMatrix, Matrix, MmstOptions, SketchOptions,
    SketchParams, SpanningTree, SymbolMatrix, ThresholdSearch,
};

#[derive(Debug, Parser)]
#[command(name = "hamspace", version, about = "Exact and sketched algorithms for Hamming spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Seed for instance generation and sketch projectors.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Distance accuracy of the sketched commands.
    #[arg(long, global = true, default_value_t = 0.25)]
    pub delta: f64,

    /// Accuracy of matmul-approx, center and diameter.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub epsilon: f64,

    /// Number of clusters.
    #[arg(long, global = true, default_value_t = 2)]
    pub ell: usize,

    /// Multiplier of the sketch dimension `k_mult * ln(N+2) / delta^2`.
    #[arg(long, global = true, default_value_t = 9.0)]
    pub k_mult: f64,

    /// Locate scales by scanning upward instead of binary search.
    #[arg(long, global = true)]
    pub linear_scan: bool,

    /// Check each incremental distance update against a direct count.
    #[arg(long, global = true)]
    pub debug_asserts: bool,

    /// Compare against the brute-force reference and report errors.
    #[arg(long, global = true)]
    pub oracle: bool,

    /// Result file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Stats file (default: stderr).
    #[arg(long, global = true)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Uniform,
    Clustered,
    LowMstPath,
    PlantedDuplicates,
}

#[derive(Debug, Clone, Args)]
pub struct Pair {
    /// Matrix A (rows are points).
    pub a: PathBuf,
    /// Matrix B (columns are points); A transposed when omitted.
    pub b: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Points {
    /// Matrix whose rows are the points.
    pub points: PathBuf,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write a synthetic instance.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        sigma: u32,
        /// Planted centers of `clustered`.
        #[arg(long, default_value_t = 4)]
        centers: usize,
        /// Per-coordinate change probability of `clustered`.
        #[arg(long, default_value_t = 0.05)]
        flip: f64,
        /// Copied rows of `planted-duplicates`.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Exact distances between the rows of A and the columns of B.
    DistExact(Pair),
    /// Sketched distances (binary input).
    DistApprox(Pair),
    /// Exact 0-1 product A B.
    MatmulExact(Pair),
    /// Approximate 0-1 product A B.
    MatmulApprox(Pair),
    /// Minimum spanning tree from all pairwise distances.
    MstExact(Points),
    /// Spanning tree over sketched distances.
    MstApprox(Points),
    /// Minimum spanning tree through the output-sensitive distance product.
    MstFast(Points),
    /// Farthest-first center clustering (binary input).
    Center(Points),
    /// Partition by nearest center, reporting its diameter (binary input).
    Diameter(Points),
    /// Approximate nearest neighbour of every point (binary input).
    Nn(Points),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::DistExact(_) => "dist-exact",
            Command::DistApprox(_) => "dist-approx",
            Command::MatmulExact(_) => "matmul-exact",
            Command::MatmulApprox(_) => "matmul-approx",
            Command::MstExact(_) => "mst-exact",
            Command::MstApprox(_) => "mst-approx",
            Command::MstFast(_) => "mst-fast",
            Command::Center(_) => "center",
            Command::Diameter(_) => "diameter",
            Command::Nn(_) => "nn",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Mismatch(String),
    Oracle(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "input error: {m}"),
            CliError::Mismatch(m) => write!(f, "{m}"),
            CliError::Oracle(m) => write!(f, "oracle check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hamspace::Error> for CliError {
    fn from(e: hamspace::Error) -> Self {
        use hamspace::Error as E;
        match e {
            E::Dimension(_) | E::Alphabet { .. } => CliError::Mismatch(e.to_string()),
            E::Parse { .. } | E::Symbol { .. } | E::Io(_) => CliError::Parse(e.to_string()),
            E::Parameter(_) => CliError::Usage(e.to_string()),
            E::Inconsistent { .. } | E::Disconnected(_) => CliError::Oracle(e.to_string()),
        }
    }
}

/// Result text, stats record, and the first failed deterministic check.
#[derive(Debug, Default)]
pub struct Outcome {
    pub output: String,
    pub stats: Vec<(String, String)>,
    pub failure: Option<String>,
}

impl Outcome {
    fn stat(&mut self, key: &str, value: impl fmt::Display) {
        self.stats.push((key.to_string(), value.to_string()));
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    pub fn stats_text(&self) -> String {
        self.stats.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn check_flags(f: &Flags) -> Result<(), CliError> {
    let bad = |m: String| Err(CliError::Usage(m));
    if !(f.delta > 0.0 && f.delta < 0.5) {
        return bad(format!("--delta {} outside (0, 1/2)", f.delta));
    }
    if !(f.epsilon > 0.0 && f.epsilon < 1.5) {
        return bad(format!("--epsilon {} outside (0, 3/2)", f.epsilon));
    }
    if !(f.k_mult.is_finite() && f.k_mult > 0.0) {
        return bad(format!("--k-mult {} must be positive", f.k_mult));
    }
    Ok(())
}

fn sketch_options(f: &Flags) -> SketchOptions<f64> {
    let search = if f.linear_scan { ThresholdSearch::Linear } else { ThresholdSearch::Binary };
    SketchOptions::default().with_seed(f.seed).with_k_mult(f.k_mult).with_search(search)
}

fn read(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn binary(m: Matrix, what: &str) -> Result<BitMatrix, CliError> {
    match m {
        Matrix::Binary(b) => Ok(b),
        Matrix::Symbols(s) => Err(CliError::Mismatch(format!(
            "{what} needs a binary matrix, got alphabet size {}",
            s.sigma()
        ))),
    }
}

fn load_pair(p: &Pair) -> Result<(Matrix, Matrix), CliError> {
    let a = read(&p.a)?;
    let b = match &p.b {
        Some(path) => read(path)?,
        None => a.transpose(),
    };
    Ok((a, b))
}

fn config_stats(out: &mut Outcome, cmd: &Command, f: &Flags) {
    out.stat("command", cmd.name());
    match cmd {
        Command::Gen { kind, n, d, sigma, centers, flip, copies } => {
            out.stat("kind", kind.to_possible_value().unwrap().get_name());
            out.stat("n", n);
            out.stat("d", d);
            out.stat("sigma", sigma);
            out.stat("centers", centers);
            out.stat("flip", flip);
            out.stat("copies", copies);
        }
        Command::DistExact(p) | Command::DistApprox(p) | Command::MatmulExact(p) | Command::MatmulApprox(p) => {
            out.stat("input_a", p.a.display());
            out.stat("input_b", p.b.as_ref().map_or("transpose(a)".to_string(), |b| b.display().to_string()));
        }
        Command::MstExact(p)
        | Command::MstApprox(p)
        | Command::MstFast(p)
        | Command::Center(p)
        | Command::Diameter(p)
        | Command::Nn(p) => out.stat("input", p.points.display()),
    }
    out.stat("seed", f.seed);
    out.stat("delta", f.delta);
    out.stat("epsilon", f.epsilon);
    out.stat("ell", f.ell);
    out.stat("k_mult", f.k_mult);
    out.stat("search", if f.linear_scan { "linear" } else { "binary" });
    out.stat("debug_asserts", f.debug_asserts);
    out.stat("oracle", f.oracle);
}

fn brute_distances(a: &SymbolMatrix, b: &SymbolMatrix) -> Result<CountMatrix, CliError> {
    let bt = b.transpose();
    let mut d = CountMatrix::zeros(a.rows(), bt.rows());
    for i in 0..a.rows() {
        for j in 0..bt.rows() {
            d.set(i, j, sigma_hamming_distance(a.row(i), bt.row(j))?);
        }
    }
    Ok(d)
}

fn tree_is_valid<T: hamspace::Real>(t: &SpanningTree<T>, pts: &SymbolMatrix) -> bool {
    t.nodes == pts.rows()
        && hamspace::build_traversal(t, pts, 0).is_ok()
        && t.edges
            .iter()
            .all(|e| sigma_hamming_distance(pts.row(e.u), pts.row(e.v)).ok() == Some(e.weight))
}

/// Runs one command and returns its result text and stats record.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let f = &cli.flags;
    check_flags(f)?;
    let mut out = Outcome::default();
    config_stats(&mut out, &cli.command, f);
    let opts = sketch_options(f);

    let compute = Instant::now();
    match &cli.command {
        Command::Gen { kind, n, d, sigma, centers, flip, copies } => {
            let kind = match kind {
                Kind::Uniform => InstanceKind::Uniform,
                Kind::Clustered => InstanceKind::Clustered { centers: *centers, flip: *flip },
                Kind::LowMstPath => InstanceKind::LowMstPath,
                Kind::PlantedDuplicates => InstanceKind::PlantedDuplicates { copies: *copies },
            };
            let m = generate(kind, *n, *d, *sigma, f.seed)?;
            let m = if *sigma == 2 { Matrix::Binary(m.to_bits()?) } else { Matrix::Symbols(m) };
            out.output = write_matrix(&m);
        }

        Command::DistExact(pair) => {
            let (a, b) = load_pair(pair)?;
            let d = match (&a, &b) {
                (Matrix::Binary(x), Matrix::Binary(y)) => binary_distances(x, y)?,
                _ => distances_from_products(&a.to_symbols(), &b.to_symbols())?,
            };
            sizes(&mut out, &a, &b);
            if f.oracle {
                let brute = brute_distances(&a.to_symbols(), &b.to_symbols())?;
                let wrong = mismatches(&d, &brute);
                out.stat("oracle_mismatches", wrong);
                out.check(wrong == 0, || format!("{wrong} distances differ from the pairwise count"));
            }
            out.output = render::count_matrix(&d);
        }

        Command::DistApprox(pair) => {
            let (a, b) = load_pair(pair)?;
            sizes(&mut out, &a, &b);
            let (a, b) = (binary(a, "dist-approx")?, binary(b, "dist-approx")?);
            let params = SketchParams::with_options(f.delta, opts)?;
            let n = (a.rows() * a.cols() + a.cols() * b.cols()) as u64;
            out.stat("sketch_dim", params.sketch_dim(n));
            out.stat("levels", threshold_count(a.cols(), f.delta));
            let w = apphap(&a, &b, &params)?;
            out.stat("saturated", w.saturated_count());
            if f.oracle {
                let exact = binary_distances(&a, &b)?;
                let (mut pairs, mut violations, mut zero_wrong) = (0u64, 0u64, 0u64);
                let (mut max_err, mut sum_err) = (0.0f64, 0.0f64);
                for i in 0..w.rows() {
                    for j in 0..w.cols() {
                        let (h, v) = (exact.get(i, j) as f64, w.get(i, j));
                        if (h == 0.0) != (v == 0.0) {
                            zero_wrong += 1;
                        }
                        if h > 0.0 {
                            pairs += 1;
                            if v / (1.0 + f.delta) > h || h > (1.0 + f.delta) * v {
                                violations += 1;
                            }
                        }
                        max_err = max_err.max((v - h).abs());
                        sum_err += (v - h).abs();
                    }
                }
                out.stat("violation_rate", rate(violations, pairs));
                out.stat("violations", violations);
                out.stat("nonzero_pairs", pairs);
                out.stat("zero_detection_errors", zero_wrong);
                out.stat("max_abs_error", render::format_sig(max_err, 6));
                out.stat("mean_abs_error", render::format_sig(mean(sum_err, w.rows() * w.cols()), 6));
                out.check(zero_wrong == 0, || format!("{zero_wrong} pairs with wrong zero detection"));
            }
            out.output = render::approx_distances(&w);
        }

        Command::MatmulExact(pair) => {
            let (a, b) = load_pair(pair)?;
            sizes(&mut out, &a, &b);
            let (a, b) = (binary(a, "matmul-exact")?, binary(b, "matmul-exact")?);
            let c = exact_product(&a, &b)?;
            if f.oracle {
                let d = distances_from_products(&(&a).into(), &(&b).into())?;
                let back = product_from_distances(&a.row_counts(), &b.col_counts(), &d)?;
                let wrong = mismatches(&c, &back);
                out.stat("oracle_mismatches", wrong);
                out.check(wrong == 0, || format!("{wrong} entries differ from the distance route"));
            }
            out.output = render::count_matrix(&c);
        }

        Command::MatmulApprox(pair) => {
            let (a, b) = load_pair(pair)?;
            sizes(&mut out, &a, &b);
            let (a, b) = (binary(a, "matmul-approx")?, binary(b, "matmul-approx")?);
            let c = approx_product(&a, &b, f.epsilon, &opts)?;
            if f.oracle {
                let exact = exact_product(&a, &b)?;
                let ham = binary_distances(&a, &b)?;
                let q = a.cols() as u32;
                let (mut violations, mut exact_wrong) = (0u64, 0u64);
                let (mut max_err, mut sum_err) = (0.0f64, 0.0f64);
                for i in 0..c.rows() {
                    for j in 0..c.cols() {
                        let err = (c.get(i, j) - exact.get(i, j) as f64).abs();
                        let slack = ham.get(i, j).min(q - ham.get(i, j));
                        if err > f.epsilon * slack as f64 {
                            violations += 1;
                            if slack == 0 {
                                exact_wrong += 1;
                            }
                        }
                        max_err = max_err.max(err);
                        sum_err += err;
                    }
                }
                let cells = c.rows() * c.cols();
                out.stat("violation_rate", rate(violations, cells as u64));
                out.stat("violations", violations);
                out.stat("exact_entry_errors", exact_wrong);
                out.stat("max_entry_error", render::format_sig(max_err, 6));
                out.stat("mean_entry_error", render::format_sig(mean(sum_err, cells), 6));
                out.check(exact_wrong == 0, || format!("{exact_wrong} entries with min(ham, q-ham)=0 are not exact"));
            }
            out.output = render::approx_product(&c);
        }

        Command::MstExact(pts) => {
            let m = read(&pts.points)?;
            point_sizes(&mut out, &m);
            let s = m.to_symbols();
            let t = exact_mst(&s)?;
            if f.oracle {
                let fast = output_sensitive_mst_with::<f64>(&s, &mmst_options(f, &opts))?.0;
                let delta = fast.cost() as i64 - t.cost() as i64;
                out.stat("cost_delta", delta);
                out.check(delta == 0, || format!("output-sensitive tree cost differs by {delta}"));
            }
            out.output = render::spanning_tree(&t);
        }

        Command::MstApprox(pts) => {
            let m = read(&pts.points)?;
            point_sizes(&mut out, &m);
            let s = m.to_symbols();
            let t = match &m {
                Matrix::Binary(b) => approx_mst(b, &SketchParams::with_options(f.delta, opts)?)?,
                Matrix::Symbols(s) => {
                    out.stat("embedded_delta", 1);
                    approx_mst_sigma(s, &opts)?
                }
            };
            if f.oracle {
                let best = exact_mst(&s)?.cost();
                out.stat("exact_cost", best);
                out.stat("cost_delta", t.cost() as i64 - best as i64);
                let ratio = if best == 0 { 1.0 } else { t.cost() as f64 / best as f64 };
                out.stat("cost_ratio", render::format_sig(ratio, 6));
                let valid = tree_is_valid(&t, &s);
                out.stat("tree_valid", valid);
                out.check(valid, || "returned edges do not form a spanning tree with exact weights".into());
            }
            out.output = render::spanning_tree(&t);
        }

        Command::MstFast(pts) => {
            let m = read(&pts.points)?;
            point_sizes(&mut out, &m);
            let s = m.to_symbols();
            let (t, stats) = output_sensitive_mst_with(&s, &mmst_options(f, &opts))?;
            for (k, v) in stats.key_values() {
                out.stat(k, v);
            }
            if f.oracle {
                let best = exact_mst(&s)?.cost();
                let delta = t.cost() as i64 - best as i64;
                out.stat("cost_delta", delta);
                let d = mmst_distances(&s, &s.transpose())?;
                let wrong = mismatches(&d, &brute_distances(&s, &s.transpose())?);
                out.stat("oracle_mismatches", wrong);
                out.check(delta == 0 && wrong == 0, || {
                    format!("cost_delta={delta}, {wrong} distance mismatches")
                });
            }
            out.output = render::spanning_tree(&t);
        }

        Command::Center(pts) | Command::Diameter(pts) => {
            let m = read(&pts.points)?;
            point_sizes(&mut out, &m);
            let p = binary(m, cli.command.name())?;
            let r = if matches!(cli.command, Command::Center(_)) {
                center_clustering(&p, f.ell, f.epsilon, &opts)?
            } else {
                diameter_clustering(&p, f.ell, f.epsilon, &opts)?
            };
            if f.oracle {
                let g = gonzalez_exact::<f64>(&p, f.ell)?;
                out.stat("gonzalez_radius", g.radius_exact);
                let ratio = if g.radius_exact == 0 { 1.0 } else { r.radius_exact as f64 / g.radius_exact as f64 };
                out.stat("radius_ratio_to_gonzalez", render::format_sig(ratio, 6));
                let mut c = r.centers.clone();
                c.sort_unstable();
                c.dedup();
                out.check(c.len() == f.ell && r.centers[0] == 0, || "centers are not distinct".into());
            }
            out.output = render::clustering(&r);
        }

        Command::Nn(pts) => {
            let m = read(&pts.points)?;
            point_sizes(&mut out, &m);
            let p = binary(m, "nn")?;
            let nn = approx_nearest_neighbors(&p, &SketchParams::with_options(f.delta, opts)?)?;
            if f.oracle {
                let d = binary_distances(&p, &p.transpose())?;
                let n = p.rows();
                let (mut violations, mut zero_wrong, mut worst) = (0u64, 0u64, 1.0f64);
                for (i, &j) in nn.iter().enumerate() {
                    let best = (0..n).filter(|&k| k != i).map(|k| d.get(i, k)).min().unwrap();
                    let got = d.get(i, j);
                    if best == 0 && got != 0 {
                        zero_wrong += 1;
                    }
                    if got as f64 > (1.0 + f.delta).powi(2) * best as f64 {
                        violations += 1;
                    }
                    if best > 0 {
                        worst = worst.max(got as f64 / best as f64);
                    }
                }
                out.stat("violation_rate", rate(violations, n as u64));
                out.stat("max_ratio", render::format_sig(worst, 6));
                out.stat("zero_detection_errors", zero_wrong);
                out.check(zero_wrong == 0, || format!("{zero_wrong} points missed an identical neighbour"));
            }
            out.output = render::neighbors(&nn);
        }
    }

    out.stat("time_compute_ms", compute.elapsed().as_millis());
    out.stat("time_total_ms", started.elapsed().as_millis());
    Ok(out)
}

fn mmst_options(f: &Flags, opts: &SketchOptions<f64>) -> MmstOptions<f64> {
    MmstOptions {
        sketch: opts.clone(),
        verify_updates: f.debug_asserts,
        ..MmstOptions::default()
    }
}

fn sizes(out: &mut Outcome, a: &Matrix, b: &Matrix) {
    out.stat("p", a.rows());
    out.stat("q", a.cols());
    out.stat("r", b.cols());
    out.stat("sigma", a.sigma());
}

fn point_sizes(out: &mut Outcome, m: &Matrix) {
    out.stat("n", m.rows());
    out.stat("d", m.cols());
    out.stat("sigma", m.sigma());
}

fn mismatches(x: &CountMatrix, y: &CountMatrix) -> usize {
    x.as_slice().iter().zip(y.as_slice()).filter(|(a, b)| a != b).count()
}

fn rate(count: u64, total: u64) -> String {
    render::format_sig(if total == 0 { 0.0 } else { count as f64 / total as f64 }, 6)
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Writes the result and the stats record where the flags direct them.
pub fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    use std::io::Write;
    match &cli.flags.out {
        Some(path) => std::fs::write(path, &outcome.output)?,
        None => std::io::stdout().write_all(outcome.output.as_bytes())?,
    }
    match &cli.flags.stats {
        Some(path) => std::fs::write(path, outcome.stats_text())?,
        None => std::io::stderr().write_all(outcome.stats_text().as_bytes())?,
    }
    Ok(())
}
