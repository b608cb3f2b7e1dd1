use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};

use digitcode::a1::A1Codec;
use digitcode::a2::{A2Codec, A2SparseCodec};
use digitcode::channel::{self, ChannelConfig};
use digitcode::digit_arith::format_digits;
use digitcode::nwxli::{certified_order, parse_set, NwxliCodec};
use digitcode::oracles::{
    check_matrix_of, error_sweep, min_distance_column_search, min_weight_enumeration,
    random_message, sweep_codewords, SweepMode, SweepRecord, SweepStats, COLUMN_SEARCH_MAX_WEIGHT,
};
use digitcode::prototype::PrototypeCodec;
use digitcode::wxli::{build_family, family_table, is_kwise_independent};
use digitcode::{Codec, CodeError, DecodeOutcome, DigitVec, Role};
use rand::SeedableRng;

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(io::stdout(), $($arg)*).map_err(write_err)?
    };
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "digitcode", version, about = "Digit-indexed error-correcting codes over prime bases")]
struct Cli {
    /// More detail on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print [n,k,d]_q and the role of every position.
    Info(CodeArgs),
    /// Encode one message per line.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Decode one word per line: "<STATUS> <word> <detail>".
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Print only the recovered message for each line.
        #[arg(long)]
        extract: bool,
    },
    /// Minimum distance by column dependency search and codeword enumeration.
    Mindist {
        #[command(flatten)]
        code: CodeArgs,
        /// Largest dependency weight searched.
        #[arg(long, default_value_t = COLUMN_SEARCH_MAX_WEIGHT)]
        w_max: usize,
    },
    /// Inject every error pattern of one weight and classify the decoder.
    Sweep {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        weight: usize,
        /// Random codewords swept in addition to the zero word.
        #[arg(long, default_value_t = 10)]
        codewords: usize,
        /// Sample this many patterns per codeword instead of enumerating.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Emit a JSON document instead of key=value.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo over a symmetric channel.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Flip exactly this many symbols per trial.
        #[arg(long)]
        forced_weight: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also append the report as one JSON line to this file.
        #[arg(long)]
        append: Option<PathBuf>,
    },
    /// Show or certify an independent index family.
    Wxli {
        /// Index length of the constructed family.
        #[arg(long, conflicts_with = "set")]
        r: Option<usize>,
        /// Certify a set read from a file instead.
        #[arg(long)]
        set: Option<PathBuf>,
        /// Independence order to certify.
        #[arg(long)]
        order: Option<usize>,
        /// List every member.
        #[arg(long)]
        list: bool,
    },
    /// Family size table and the landscape of shipped codes.
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Prototype,
    A1,
    A2,
    A2sparse,
    Golay,
    Nwxli,
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Prime base (prototype only).
    #[arg(long, default_value_t = 3)]
    p: u32,
    /// Index length.
    #[arg(long)]
    r: Option<usize>,
    /// Message length; defaults to the full capacity.
    #[arg(short = 'k', long = "message-len")]
    message_len: Option<usize>,
    /// Append a global value-sum symbol (a2sparse only).
    #[arg(long)]
    global_check: bool,
    /// Index set file (nwxli only).
    #[arg(long)]
    set: Option<PathBuf>,
    /// Independence order of the set; found by search when omitted.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct IoArgs {
    /// Input file; standard input when omitted.
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Stop at the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

/// An error paired with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_USAGE, error: error.into() }
    }

    fn data(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_DATA, error: error.into() }
    }

    fn internal(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_INTERNAL, error: error.into() }
    }
}

type CmdResult = Result<(), Failure>;

/// Classifies a library error raised while building a code.
fn config_error(e: CodeError) -> Failure {
    Failure::usage(e)
}

fn io_error(e: io::Error, what: &Path) -> Failure {
    Failure::data(anyhow!(e).context(format!("cannot access {}", what.display())))
}

fn reject_flags(args: &CodeArgs, allowed: &[&str]) -> Result<(), Failure> {
    let used = [
        ("--p", args.p != 3),
        ("--r", args.r.is_some()),
        ("--message-len", args.message_len.is_some()),
        ("--global-check", args.global_check),
        ("--set", args.set.is_some()),
        ("--order", args.order.is_some()),
    ];
    match used.iter().find(|(flag, on)| *on && !allowed.contains(flag)) {
        Some((flag, _)) => Err(Failure::usage(anyhow!(
            "{flag} does not apply to family {}",
            args.family.to_possible_value().expect("no skipped variants").get_name()
        ))),
        None => Ok(()),
    }
}

fn build_codec(args: &CodeArgs) -> Result<Box<dyn Codec>, Failure> {
    let codec: Box<dyn Codec> = match args.family {
        FamilyArg::Prototype => {
            reject_flags(args, &["--p", "--r"])?;
            Box::new(PrototypeCodec::new(args.p, args.r.unwrap_or(3)).map_err(config_error)?)
        }
        FamilyArg::A1 => {
            reject_flags(args, &["--r", "--message-len"])?;
            let codec = match (args.r, args.message_len) {
                (Some(r), Some(m)) => A1Codec::new(r, m),
                (None, Some(m)) => A1Codec::for_message_len(m),
                (r, None) => {
                    let r = r.unwrap_or(3);
                    A1Codec::new(r, digitcode::a1::capacity(r))
                }
            };
            Box::new(codec.map_err(config_error)?)
        }
        FamilyArg::A2 => {
            reject_flags(args, &["--r", "--message-len"])?;
            let r = args.r.unwrap_or(4);
            let codec = match args.message_len {
                Some(m) => A2Codec::new(r, m),
                None => A2Codec::full(r),
            };
            Box::new(codec.map_err(config_error)?)
        }
        FamilyArg::A2sparse => {
            reject_flags(args, &["--r", "--message-len", "--global-check"])?;
            let r = args.r.unwrap_or(4);
            let codec = match args.message_len {
                Some(m) => A2SparseCodec::new(r, m, args.global_check),
                None => A2SparseCodec::full(r, args.global_check),
            };
            Box::new(codec.map_err(config_error)?)
        }
        FamilyArg::Golay => {
            reject_flags(args, &[])?;
            Box::new(NwxliCodec::golay())
        }
        FamilyArg::Nwxli => {
            reject_flags(args, &["--set", "--order"])?;
            let path = args
                .set
                .as_ref()
                .ok_or_else(|| Failure::usage(anyhow!("family nwxli needs --set FILE")))?;
            let set = read_set(path)?;
            let order = match args.order {
                Some(k) => k,
                None => certified_order(&set, COLUMN_SEARCH_MAX_WEIGHT + 2).map_err(Failure::data)?,
            };
            Box::new(NwxliCodec::from_set(set, order).map_err(Failure::data)?)
        }
    };
    Ok(codec)
}

fn read_set(path: &Path) -> Result<Vec<DigitVec>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(e, path))?;
    parse_set(&text).map_err(|e| Failure::data(anyhow!(e).context(format!("in {}", path.display()))))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(|e| io_error(e, p))?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(e, p))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_err(e: io::Error) -> Failure {
    Failure::data(anyhow!(e).context("cannot write output"))
}

/// Feeds each non-blank, non-comment line to `handle`. Malformed lines are
/// reported with their line number and either skipped or fatal.
fn stream_lines(
    io_args: &IoArgs,
    mut handle: impl FnMut(&str, &mut dyn Write) -> anyhow::Result<()>,
) -> CmdResult {
    let input = open_input(io_args.input.as_deref())?;
    let mut out = open_output(io_args.output.as_deref())?;
    let mut skipped = 0usize;
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Failure::data(anyhow!(e).context("cannot read input")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Err(e) = handle(line, &mut *out) {
            if e.downcast_ref::<io::Error>().is_some() {
                return Err(Failure::data(e));
            }
            let e = e.context(format!("line {}", n + 1));
            if io_args.strict {
                return Err(Failure::data(e));
            }
            eprintln!("skipped: {e:#}");
            skipped += 1;
        }
    }
    out.flush().map_err(write_err)?;
    if skipped > 0 {
        eprintln!("{skipped} malformed line(s) skipped");
    }
    Ok(())
}

fn cmd_info(args: &CodeArgs) -> CmdResult {
    let codec = build_codec(args)?;
    let spec = codec.spec();
    out!("{}", spec.params());
    out!("family={} base={} index_len={}", spec.family(), spec.base(), spec.index_len());
    let mut slot = 0;
    for pos in spec.table() {
        let role = match pos.role {
            Role::Message => "message",
            Role::Redundant => "redundant",
            Role::Special => "special",
            Role::Banished => "banished",
        };
        if pos.role == Role::Banished {
            out!("-\t{}\t{role}", pos.label);
        } else {
            out!("{slot}\t{}\t{role}", pos.label);
            slot += 1;
        }
    }
    Ok(())
}

fn cmd_encode(code: &CodeArgs, io_args: &IoArgs, verbose: u8) -> CmdResult {
    let codec = build_codec(code)?;
    if verbose > 0 {
        eprintln!("encoding with {}", codec.spec().params());
    }
    stream_lines(io_args, |line, out| {
        let message = codec.spec().parse_message(line)?;
        let word = codec.encode(&message)?;
        writeln!(out, "{word}")?;
        Ok(())
    })
}

fn cmd_decode(code: &CodeArgs, io_args: &IoArgs, extract: bool, verbose: u8) -> CmdResult {
    let codec = build_codec(code)?;
    let spec = codec.spec().clone();
    if verbose > 0 {
        eprintln!("decoding with {}", spec.params());
    }
    let mut counts = [0usize; 3];
    stream_lines(io_args, |line, out| {
        let word = codec.parse_word(line)?;
        let decoded = codec.decode(&word);
        let (status, i) = match decoded.outcome {
            DecodeOutcome::Clean => ("CLEAN", 0),
            DecodeOutcome::DetectedMultiple => ("MULTI", 2),
            _ => ("CORRECTED", 1),
        };
        counts[i] += 1;
        if extract {
            if i == 2 {
                eprintln!("warning: uncorrectable word {line}; message taken as received");
            }
            writeln!(out, "{}", format_digits(&codec.extract_message(&decoded.word)))?;
        } else {
            let detail = if decoded.outcome.corrections().is_empty() {
                "-".to_string()
            } else {
                decoded
                    .outcome
                    .corrections()
                    .iter()
                    .map(|c| format!("{}:{}", spec.label(c.slot), c.delta))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            writeln!(out, "{status} {} {detail}", decoded.word)?;
        }
        Ok(())
    })?;
    if verbose > 0 {
        eprintln!("clean={} corrected={} multi={}", counts[0], counts[1], counts[2]);
    }
    Ok(())
}

fn cmd_mindist(code: &CodeArgs, w_max: usize) -> CmdResult {
    let codec = build_codec(code)?;
    let spec = codec.spec();
    let h = check_matrix_of(spec);
    let report = min_distance_column_search(&h, w_max).map_err(Failure::usage)?;
    out!("code={}:{}", spec.family(), spec.params());
    out!("check_matrix rows={} cols={}", h.row_count(), h.col_count());
    let by_columns = report.min_distance();
    match report.witness() {
        Some(w) => {
            out!(
                "column_search w_max={w_max} min_distance={} witness={}",
                w.weight,
                format_digits(&w.codeword)
            );
        }
        None => out!("column_search w_max={w_max} none (d >= {})", report.lower_bound()),
    }
    let by_weight = match min_weight_enumeration(codec.as_ref()) {
        Ok(d) => {
            out!("enumeration min_weight={d}");
            Some(d)
        }
        Err(CodeError::BudgetExceeded(msg)) => {
            out!("enumeration skipped ({msg})");
            None
        }
        Err(e) => return Err(Failure::internal(e)),
    };
    let verdict = match (by_columns, by_weight) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::internal(anyhow!("oracles disagree: column search {a}, enumeration {b}")))
        }
        (None, Some(b)) if b <= w_max => {
            return Err(Failure::internal(anyhow!("enumeration found weight {b} missed by column search")))
        }
        (Some(d), _) | (None, Some(d)) => format!("d={d}"),
        (None, None) => format!("d>={}", report.lower_bound()),
    };
    out!("verdict {verdict} (design {})", spec.design_distance());
    Ok(())
}

fn cmd_sweep(
    code: &CodeArgs,
    weight: usize,
    codewords: usize,
    samples: Option<u64>,
    seed: u64,
    json: bool,
) -> CmdResult {
    let codec = build_codec(code)?;
    let record = match samples {
        None => sweep_codewords(codec.as_ref(), weight, codewords, seed).map_err(Failure::usage)?,
        Some(patterns) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut stats = SweepStats::default();
            let zero = vec![0; codec.spec().message_len()];
            let mut messages = vec![zero];
            messages.extend((0..codewords).map(|_| random_message(&mut rng, codec.spec())));
            for (i, m) in messages.iter().enumerate() {
                let word = codec.encode(m).map_err(Failure::internal)?;
                let mode = SweepMode::Sampled { patterns, seed: seed.wrapping_add(i as u64) };
                stats = stats.merge(error_sweep(codec.as_ref(), &word, weight, mode).map_err(Failure::usage)?);
            }
            SweepRecord {
                spec: format!("{}:{}", codec.spec().family(), codec.spec().params()),
                weight,
                codewords: messages.len(),
                stats,
            }
        }
    };
    if !record.stats.is_partition() {
        return Err(Failure::internal(anyhow!("sweep categories do not sum to trials")));
    }
    if json {
        out!("{}", serde_json::to_string_pretty(&record).map_err(Failure::internal)?);
    } else {
        out!("{record}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    code: &CodeArgs,
    epsilon: f64,
    trials: u64,
    seed: u64,
    forced_weight: Option<usize>,
    workers: Option<usize>,
    append: Option<&Path>,
) -> CmdResult {
    let codec = build_codec(code)?;
    let config = ChannelConfig { epsilon, trials, seed, forced_weight, workers };
    let report = channel::run(codec.as_ref(), &config).map_err(Failure::usage)?;
    out!("{}", serde_json::to_string_pretty(&report).map_err(Failure::internal)?);
    if let Some(path) = append {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_error(e, path))?;
        let line = serde_json::to_string(&report).map_err(Failure::internal)?;
        writeln!(file, "{line}").map_err(|e| io_error(e, path))?;
    }
    Ok(())
}

fn cmd_wxli(r: Option<usize>, set: Option<&Path>, order: Option<usize>, list: bool) -> CmdResult {
    let (members, redundant, default_order) = match (r, set) {
        (_, Some(path)) => (read_set(path)?, Vec::new(), None),
        (r, None) => {
            let family = build_family(r.unwrap_or(4)).map_err(Failure::usage)?;
            out!("r={} n={} f={}", family.r, family.n, family.f_value());
            (family.i1, family.redundant, Some(3))
        }
    };
    if !redundant.is_empty() {
        let text: Vec<String> = redundant.iter().map(ToString::to_string).collect();
        out!("redundant {}", text.join(" "));
    }
    if list {
        for v in &members {
            out!("{v}");
        }
    }
    match order.or(default_order) {
        Some(k) => {
            let report = is_kwise_independent(&members, k).map_err(Failure::usage)?;
            match report.witness {
                None => out!("order={k} independent=true"),
                Some(w) => {
                    let terms: Vec<String> = w.terms.iter().map(|(v, c)| format!("{c}*{v}")).collect();
                    out!("order={k} independent=false witness={}", terms.join("+"));
                }
            }
        }
        None => {
            let k = certified_order(&members, COLUMN_SEARCH_MAX_WEIGHT + 2).map_err(Failure::data)?;
            out!("size={} certified_order={k} distance={}", members.len(), k + 1);
        }
    }
    Ok(())
}

fn cmd_table() -> CmdResult {
    out!("r\tf\tblock\tmsg\trate");
    for row in family_table(3..=9).map_err(Failure::internal)? {
        out!("{}\t{}\t{}\t{}\t{:.3}", row.r, row.f, row.block_len, row.message_len, row.rate);
    }
    out!();
    out!("code\tparams\tbehavior");
    let landscape: Vec<(&str, Box<dyn Codec>, &str)> = vec![
        ("prototype", Box::new(PrototypeCodec::new(3, 2).map_err(Failure::internal)?), "SEC-DED"),
        ("a1", Box::new(A1Codec::new(3, 10).map_err(Failure::internal)?), "SEC-DED"),
        ("a2", Box::new(A2Codec::full(4).map_err(Failure::internal)?), "SEC-TED"),
        ("a2sparse", Box::new(A2SparseCodec::full(4, false).map_err(Failure::internal)?), "SEC-TED"),
        ("golay", Box::new(NwxliCodec::golay()), "DEC-QED"),
    ];
    for (name, codec, behavior) in landscape {
        out!("{name}\t{}\t{behavior}", codec.spec().params());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Info(code) => cmd_info(code),
        Command::Encode { code, io } => cmd_encode(code, io, cli.verbose),
        Command::Decode { code, io, extract } => cmd_decode(code, io, *extract, cli.verbose),
        Command::Mindist { code, w_max } => cmd_mindist(code, *w_max),
        Command::Sweep { code, weight, codewords, samples, seed, json } => {
            cmd_sweep(code, *weight, *codewords, *samples, *seed, *json)
        }
        Command::Simulate { code, epsilon, trials, seed, forced_weight, workers, append } => {
            cmd_simulate(code, *epsilon, *trials, *seed, *forced_weight, *workers, append.as_deref())
        }
        Command::Wxli { r, set, order, list } => cmd_wxli(*r, set.as_deref(), *order, *list),
        Command::Table => cmd_table(),
    }
}

fn is_broken_pipe(error: &anyhow::Error) -> bool {
    error
        .chain()
        .filter_map(|e| e.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| dispatch(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) if is_broken_pipe(&failure.error) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_are_checked_per_family() {
        let args = CodeArgs {
            family: FamilyArg::Golay,
            p: 3,
            r: Some(4),
            message_len: None,
            global_check: false,
            set: None,
            order: None,
        };
        assert_eq!(build_codec(&args).err().map(|f| f.code), Some(EXIT_USAGE));
        let args = CodeArgs { family: FamilyArg::A2, ..args };
        assert_eq!(build_codec(&args).ok().map(|c| c.spec().params()), Some("[22,16,4]_3".into()));
    }
}
