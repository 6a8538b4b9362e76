//! Batch command-line tool around the barq library.
//!
//! Exit codes: 0 ok, 2 parse or usage error, 3 invariant violation,
//! 4 pipeline member failure. All commands are deterministic given their
//! flags; Monte Carlo commands require an explicit seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use barq::complex::{SplitError, Violation};
use barq::entropy::{
    barcode_entropy, positive_part_entropy, BarcodeSource, FamilyMember, Normalization,
    ScalingFamily, ThresholdRule,
};
use barq::geometry::{crofton_lines, tomograph_census, Curve, GeometryError, TrigPoly};
use barq::io::{
    crofton_tsv, entropy_counts_tsv, entropy_report_tsv, parse_barcode, parse_complex,
    parse_profile, positive_part_tsv, tomograph_tsv, write_barcode, write_complex,
    write_spectrum, ParseError,
};
use barq::spectrum::{
    complex_from_spectrum, exp_spectrum, schottky_spectrum, standard_schottky_pair,
    torus_spectrum, GapModel, Mat2, SpectrumModel,
};

mod exit_codes {
    pub const PARSE_OR_USAGE: u8 = 2;
    pub const INVARIANT: u8 = 3;
    pub const MEMBER_FAILURE: u8 = 4;
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: exit_codes::PARSE_OR_USAGE,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        CliError {
            code: exit_codes::INVARIANT,
            message: message.into(),
        }
    }

    fn member(message: impl Into<String>) -> Self {
        CliError {
            code: exit_codes::MEMBER_FAILURE,
            message: message.into(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::InvalidComplex { .. } => CliError::invariant(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<Violation> for CliError {
    fn from(e: Violation) -> Self {
        CliError::invariant(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "barq",
    about = "Barcodes of action-filtered complexes: reduction, distances, growth rates, and integral-geometry checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a filtered complex to its barcode.
    Reduce(ReduceArgs),
    /// Bottleneck distance between two barcode files.
    Distance(DistanceArgs),
    /// Growth-rate report over a family manifest.
    Entropy(EntropyArgs),
    /// Monte Carlo kinematic line integral over a plane curve.
    Crofton(CroftonArgs),
    /// Critical-point census over a perturbation family on the circle.
    Tomograph(TomographArgs),
    /// Generate a chord spectrum for a reference system.
    Spectrum(SpectrumArgs),
    /// Split a complex into its low part and quotient at a threshold.
    Split(SplitArgs),
    /// Validate a complex and check its bookkeeping identities.
    Check(CheckArgs),
}

#[derive(Args)]
struct ReduceArgs {
    /// Filtered-complex file.
    complex: PathBuf,
    /// Output barcode file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    barcode_a: PathBuf,
    barcode_b: PathBuf,
}

#[derive(Args)]
struct EntropyArgs {
    /// Family manifest file.
    #[arg(long)]
    manifest: PathBuf,
    /// Decreasing comma-separated eps grid, e.g. `1.0,0.5,0.25`.
    #[arg(long)]
    eps: String,
    /// Comma-separated schedule: truncation levels, or scales when a
    /// profile is given.
    #[arg(long)]
    schedule: Option<String>,
    /// Profile file; switches spectrum manifests to a scaling family.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Spectrum-to-complex model: `trivial` or `planted:<gap>:<seed>`.
    #[arg(long, default_value = "trivial")]
    model: String,
    /// Extra generators at action zero for spectrum manifests.
    #[arg(long, default_value_t = 0)]
    zero_action: usize,
    /// Where to write the plot-ready counts table (appended to the
    /// report after a `# counts` line if omitted).
    #[arg(long)]
    counts_out: Option<PathBuf>,
    /// Also run the positive-part comparison (complex sources only):
    /// `mid`, `fraction:<f>`, or `fixed:<tau>`.
    #[arg(long)]
    positive_part: Option<String>,
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CroftonArgs {
    /// Curve spec: `circle[:r[:segments]]`, `ellipse:a,b`,
    /// `segment:x0,y0,x1,y1`, or `file:<path>` (one `x y` pair per line).
    #[arg(long)]
    curve: String,
    #[arg(long)]
    samples: usize,
    /// Seed for the line sampler (required for reproducibility).
    #[arg(long)]
    seed: u64,
    /// Treat a `file:` curve as closed.
    #[arg(long)]
    closed: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TomographArgs {
    /// Reference function as comma-separated `sin:<k>:<amp>` /
    /// `cos:<k>:<amp>` terms, or `0`.
    #[arg(long)]
    g: String,
    #[arg(long)]
    basis_size: usize,
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    samples: usize,
    /// Seed for the coefficient sampler (required for reproducibility).
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(subcommand)]
    kind: SpectrumKind,
}

#[derive(Subcommand)]
enum SpectrumKind {
    /// Synthetic spectrum with exact exponential counting.
    Exp {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Geodesic chords between cotangent fibers of the flat torus.
    Torus {
        /// Base point, `x,y` in the unit square.
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        t_max: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Orbit distances of a free hyperbolic-isometry group.
    Schottky {
        /// Upper half-plane point `x,y`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        word_bound: usize,
        /// Semicolon-separated `a,b,c,d` matrices (standard pair if
        /// omitted).
        #[arg(long)]
        generators: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SplitArgs {
    complex: PathBuf,
    #[arg(long)]
    threshold: f64,
    #[arg(long)]
    low_out: PathBuf,
    #[arg(long)]
    quotient_out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    complex: PathBuf,
    /// Also report the long-bar count at this eps.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reduce(args) => cmd_reduce(args),
        Command::Distance(args) => cmd_distance(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Crofton(args) => cmd_crofton(args),
        Command::Tomograph(args) => cmd_tomograph(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Split(args) => cmd_split(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, content: &str) -> CliResult {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Plain decimal with `sig` significant digits, scientific outside a
/// readable exponent range, trailing zeros trimmed.
fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if exponent < -4 || exponent >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn cmd_reduce(args: ReduceArgs) -> CliResult {
    let complex = parse_complex(&read_file(&args.complex)?)?;
    let barcode = complex.reduce()?;
    emit(args.output.as_deref(), &write_barcode(&barcode))
}

fn cmd_distance(args: DistanceArgs) -> CliResult {
    let a = parse_barcode(&read_file(&args.barcode_a)?)?;
    let b = parse_barcode(&read_file(&args.barcode_b)?)?;
    println!("{}", fmt_sig(barq::distance::bottleneck(&a, &b), 12));
    Ok(())
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad {what} entry `{tok}`")))
        })
        .collect()
}

fn parse_point(text: &str, what: &str) -> CliResult<[f64; 2]> {
    let v = parse_list(text, what)?;
    if v.len() != 2 {
        return Err(CliError::usage(format!("{what} needs exactly `x,y`")));
    }
    Ok([v[0], v[1]])
}

fn parse_model(text: &str) -> CliResult<SpectrumModel> {
    if text == "trivial" {
        return Ok(SpectrumModel::Trivial);
    }
    if let Some(rest) = text.strip_prefix("planted:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() == 2 {
            let gap: f64 = parts[0]
                .parse()
                .map_err(|_| CliError::usage(format!("bad planted gap `{}`", parts[0])))?;
            let seed: u64 = parts[1]
                .parse()
                .map_err(|_| CliError::usage(format!("bad planted seed `{}`", parts[1])))?;
            return Ok(SpectrumModel::Planted {
                gap: GapModel::Constant(gap),
                seed,
            });
        }
    }
    Err(CliError::usage(format!(
        "bad model `{text}`: expected `trivial` or `planted:<gap>:<seed>`"
    )))
}

enum ManifestInput {
    Spectrum(barq::ChordSpectrum),
    Members(Vec<FamilyMember>),
}

fn load_manifest(path: &Path) -> CliResult<ManifestInput> {
    const HEADER: &str = "entropy-manifest v1";
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l == HEADER => {}
        Some((n, l)) => {
            return Err(CliError::usage(format!(
                "{}:{n}: expected `{HEADER}`, got `{l}`",
                path.display()
            )))
        }
        None => {
            return Err(CliError::member(format!(
                "manifest {} is empty",
                path.display()
            )))
        }
    }
    let mut spectrum: Option<barq::ChordSpectrum> = None;
    let mut members: Vec<FamilyMember> = Vec::new();
    for (n, line) in lines {
        let mut parts = line.split_whitespace();
        let keyword = parts.next().expect("nonempty line");
        let fail = |msg: String| CliError::usage(format!("{}:{n}: {msg}", path.display()));
        match keyword {
            "spectrum" => {
                let file = parts
                    .next()
                    .ok_or_else(|| fail("missing spectrum path".into()))?;
                let parsed = barq::io::parse_spectrum(&read_file(&base.join(file))?)
                    .map_err(|e| CliError::member(format!("member `{file}`: {e}")))?;
                spectrum = Some(parsed);
            }
            "generate" => {
                let kind = parts
                    .next()
                    .ok_or_else(|| fail("missing generator kind".into()))?;
                let rest: Vec<f64> = parts
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| fail(format!("bad number `{t}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let generated = match (kind, rest.as_slice()) {
                    ("exp", [rate, t_max]) => exp_spectrum(*rate, *t_max),
                    ("torus", [px, py, qx, qy, t_max]) => {
                        torus_spectrum([*px, *py], [*qx, *qy], *t_max)
                    }
                    _ => {
                        return Err(fail(format!(
                            "bad generate line: `generate exp <rate> <t_max>` or \
                             `generate torus <px> <py> <qx> <qy> <t_max>`, got `{kind}`"
                        )))
                    }
                }
                .map_err(|e| CliError::member(format!("generate {kind}: {e}")))?;
                spectrum = Some(generated);
            }
            "complex" | "barcode" => {
                let file = parts.next().ok_or_else(|| fail("missing path".into()))?;
                let x: f64 = parts
                    .next()
                    .ok_or_else(|| fail("missing abscissa".into()))?
                    .parse()
                    .map_err(|_| fail("bad abscissa".into()))?;
                let truncation: f64 = parts
                    .next()
                    .ok_or_else(|| fail("missing truncation".into()))?
                    .parse()
                    .map_err(|_| fail("bad truncation".into()))?;
                let content = read_file(&base.join(file))?;
                let source = if keyword == "complex" {
                    let complex = parse_complex(&content)
                        .map_err(|e| CliError::member(format!("member `{file}`: {e}")))?;
                    BarcodeSource::Complex(std::sync::Arc::new(complex))
                } else {
                    let barcode = parse_barcode(&content)
                        .map_err(|e| CliError::member(format!("member `{file}`: {e}")))?;
                    BarcodeSource::Ready(barcode)
                };
                members.push(FamilyMember {
                    label: file.to_string(),
                    x,
                    truncation,
                    source,
                });
            }
            other => return Err(fail(format!("unknown manifest keyword `{other}`"))),
        }
    }
    match (spectrum, members.is_empty()) {
        (Some(s), true) => Ok(ManifestInput::Spectrum(s)),
        (None, false) => Ok(ManifestInput::Members(members)),
        (None, true) => Err(CliError::member(format!(
            "manifest {} names no inputs",
            path.display()
        ))),
        (Some(_), false) => Err(CliError::usage(
            "manifest mixes a spectrum with explicit members",
        )),
    }
}

fn cmd_entropy(args: EntropyArgs) -> CliResult {
    let eps = parse_list(&args.eps, "eps")?;
    let model = parse_model(&args.model)?;
    let family = match load_manifest(&args.manifest)? {
        ManifestInput::Spectrum(spectrum) => {
            let schedule = parse_list(
                args.schedule
                    .as_deref()
                    .ok_or_else(|| CliError::usage("spectrum manifests need --schedule"))?,
                "schedule",
            )?;
            match &args.profile {
                Some(profile_path) => {
                    let profile = parse_profile(&read_file(profile_path)?)?;
                    ScalingFamily::profile_scaling_family(
                        &spectrum,
                        &profile,
                        &schedule,
                        model,
                        args.zero_action,
                    )
                }
                None => {
                    let complex = complex_from_spectrum(&spectrum, model, args.zero_action)
                        .map_err(|e| CliError::member(format!("spectrum member: {e}")))?;
                    ScalingFamily::complex_truncation_family(complex, &schedule)
                }
            }
        }
        ManifestInput::Members(members) => {
            ScalingFamily::from_members(members, Normalization::TruncationTime)
        }
    }
    .map_err(|e| CliError::member(e.to_string()))?;

    let mut out = String::new();
    let report = barcode_entropy(&family, &eps).map_err(|e| CliError::member(e.to_string()))?;
    out.push_str(&entropy_report_tsv(&report));
    if let Some(rule_text) = &args.positive_part {
        let rule = parse_threshold_rule(rule_text)?;
        let positive = positive_part_entropy(&family, rule, &eps, 0.02)
            .map_err(|e| CliError::member(e.to_string()))?;
        out.push_str("# positive-part\n");
        out.push_str(&positive_part_tsv(&positive));
    }
    let counts = entropy_counts_tsv(&report);
    match &args.counts_out {
        Some(path) => emit(Some(path), &counts)?,
        None => {
            out.push_str("# counts\n");
            out.push_str(&counts);
        }
    }
    emit(args.output.as_deref(), &out)
}

fn parse_threshold_rule(text: &str) -> CliResult<ThresholdRule> {
    if text == "mid" {
        return Ok(ThresholdRule::MidSmallestPositive);
    }
    if let Some(f) = text.strip_prefix("fraction:") {
        let f: f64 = f
            .parse()
            .map_err(|_| CliError::usage(format!("bad fraction `{f}`")))?;
        return Ok(ThresholdRule::FractionOfSmallestPositive(f));
    }
    if let Some(v) = text.strip_prefix("fixed:") {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::usage(format!("bad threshold `{v}`")))?;
        return Ok(ThresholdRule::Fixed(v));
    }
    Err(CliError::usage(format!(
        "bad threshold rule `{text}`: expected `mid`, `fraction:<f>`, or `fixed:<tau>`"
    )))
}

fn parse_curve(spec: &str, closed_flag: bool) -> CliResult<Curve> {
    let geometry = |e: GeometryError| CliError::invariant(e.to_string());
    if spec == "circle" {
        return Ok(Curve::circle(1.0, 2048));
    }
    if let Some(rest) = spec.strip_prefix("circle:") {
        let v = parse_list(rest, "circle")?;
        let (r, segments) = match v.as_slice() {
            [r] => (*r, 2048usize),
            [r, n] => (*r, *n as usize),
            _ => return Err(CliError::usage("circle takes `r` or `r,segments`")),
        };
        return Ok(Curve::circle(r, segments));
    }
    if let Some(rest) = spec.strip_prefix("ellipse:") {
        let v = parse_list(rest, "ellipse")?;
        let [a, b] = v.as_slice() else {
            return Err(CliError::usage("ellipse takes `a,b`"));
        };
        let pts = (0..1024)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 1024.0;
                [a * t.cos(), b * t.sin()]
            })
            .collect();
        return Curve::new(pts, true).map_err(geometry);
    }
    if let Some(rest) = spec.strip_prefix("segment:") {
        let v = parse_list(rest, "segment")?;
        let [x0, y0, x1, y1] = v.as_slice() else {
            return Err(CliError::usage("segment takes `x0,y0,x1,y1`"));
        };
        return Curve::segment([*x0, *y0], [*x1, *y1]).map_err(geometry);
    }
    if let Some(file) = spec.strip_prefix("file:") {
        let text = read_file(Path::new(file))?;
        let mut pts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            let [x, y] = nums.as_slice() else {
                return Err(CliError::usage(format!(
                    "{file}:{}: expected `x y`",
                    i + 1
                )));
            };
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("{file}:{}: bad number `{t}`", i + 1)))
            };
            pts.push([parse(x)?, parse(y)?]);
        }
        return Curve::new(pts, closed_flag).map_err(geometry);
    }
    Err(CliError::usage(format!(
        "bad curve `{spec}`: expected `circle[:r[,segments]]`, `ellipse:a,b`, \
         `segment:x0,y0,x1,y1`, or `file:<path>`"
    )))
}

fn cmd_crofton(args: CroftonArgs) -> CliResult {
    let curve = parse_curve(&args.curve, args.closed)?;
    let estimate = crofton_lines(&curve, args.samples, args.seed).map_err(|e| match e {
        GeometryError::TooFewSamples { .. } => CliError::usage(e.to_string()),
        _ => CliError::invariant(e.to_string()),
    })?;
    emit(args.output.as_deref(), &crofton_tsv(&[estimate]))
}

fn parse_trig_poly(text: &str) -> CliResult<TrigPoly> {
    if text == "0" {
        return Ok(TrigPoly::zero());
    }
    let mut poly = TrigPoly::zero();
    for term in text.split(',') {
        let parts: Vec<&str> = term.trim().split(':').collect();
        let [kind, order, amp] = parts.as_slice() else {
            return Err(CliError::usage(format!(
                "bad term `{term}`: expected `sin:<k>:<amp>` or `cos:<k>:<amp>`"
            )));
        };
        let k: usize = order
            .parse()
            .map_err(|_| CliError::usage(format!("bad order `{order}`")))?;
        let amp: f64 = amp
            .parse()
            .map_err(|_| CliError::usage(format!("bad amplitude `{amp}`")))?;
        match *kind {
            "sin" => poly.terms.push((k, 0.0, amp)),
            "cos" => poly.terms.push((k, amp, 0.0)),
            other => {
                return Err(CliError::usage(format!(
                    "bad term kind `{other}`: expected `sin` or `cos`"
                )))
            }
        }
    }
    Ok(poly)
}

fn cmd_tomograph(args: TomographArgs) -> CliResult {
    let g = parse_trig_poly(&args.g)?;
    let census = tomograph_census(&g, args.basis_size, args.radius, args.samples, args.seed)
        .map_err(|e| CliError::usage(e.to_string()))?;
    emit(args.output.as_deref(), &tomograph_tsv(&census))
}

fn cmd_spectrum(args: SpectrumArgs) -> CliResult {
    match args.kind {
        SpectrumKind::Exp { rate, t_max, output } => {
            let s = exp_spectrum(rate, t_max).map_err(|e| CliError::usage(e.to_string()))?;
            emit(output.as_deref(), &write_spectrum(&s))
        }
        SpectrumKind::Torus { p, q, t_max, output } => {
            let s = torus_spectrum(parse_point(&p, "p")?, parse_point(&q, "q")?, t_max)
                .map_err(|e| CliError::usage(e.to_string()))?;
            emit(output.as_deref(), &write_spectrum(&s))
        }
        SpectrumKind::Schottky {
            p,
            q,
            word_bound,
            generators,
            output,
        } => {
            let gens: Vec<Mat2> = match generators {
                None => standard_schottky_pair().to_vec(),
                Some(text) => text
                    .split(';')
                    .map(|m| {
                        let v = parse_list(m, "matrix")?;
                        let [a, b, c, d] = v.as_slice() else {
                            return Err(CliError::usage("matrix needs `a,b,c,d`"));
                        };
                        Ok(Mat2::new(*a, *b, *c, *d))
                    })
                    .collect::<CliResult<_>>()?,
            };
            let p = parse_point(&p, "p")?;
            let q = parse_point(&q, "q")?;
            let result = schottky_spectrum(&gens, (p[0], p[1]), (q[0], q[1]), word_bound)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let mut out = String::new();
            writeln!(out, "# complete-radius {}", result.complete_radius).expect("write");
            writeln!(out, "# flagged {}", result.flagged).expect("write");
            writeln!(out, "# words {}", result.words_enumerated).expect("write");
            out.push_str(&write_spectrum(&result.spectrum));
            emit(output.as_deref(), &out)
        }
    }
}

fn cmd_split(args: SplitArgs) -> CliResult {
    let complex = parse_complex(&read_file(&args.complex)?)?;
    let triangle = complex.split_at(args.threshold).map_err(|e| match e {
        SplitError::Invalid(v) => CliError::from(v),
        SplitError::ThresholdCollision { .. } => CliError::invariant(e.to_string()),
    })?;
    emit(Some(&args.low_out), &write_complex(&triangle.low))?;
    emit(Some(&args.quotient_out), &write_complex(&triangle.quotient))?;
    println!(
        "split at {}: {} low, {} quotient",
        args.threshold,
        triangle.low.len(),
        triangle.quotient.len()
    );
    Ok(())
}

fn cmd_check(args: CheckArgs) -> CliResult {
    let complex = parse_complex(&read_file(&args.complex)?)?;
    complex
        .endpoint_conservation_check()
        .map_err(|e| CliError::invariant(e.to_string()))?;
    let bound = barq::geometry::intersection_bound_check(&complex, args.eps)
        .map_err(|e| CliError::invariant(e.to_string()))?;
    println!(
        "ok: {} generators, {} bars ({} finite, {} infinite), {} of length >= {}",
        bound.generators,
        bound.total_bars,
        bound.finite_bars,
        bound.infinite_bars,
        bound.long_bars,
        args.eps
    );
    Ok(())
}
