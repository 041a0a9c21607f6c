use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cutreal::cli::{Format, SessionError, SessionState};
use cutreal::interval::Rational;
use cutreal::syntax::{parse_expr, Expr};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Interval,
    Decimal,
}

/// Exact real arithmetic with cuts, restriction and nondeterministic choice.
#[derive(Debug, Parser)]
#[command(name = "cutreal", version)]
struct Args {
    /// Program files, executed in order before the interactive loop.
    files: Vec<PathBuf>,
    /// Target width of real results, e.g. 1/1000 or 0.001.
    #[arg(long, value_parser = parse_rational)]
    precision: Option<Rational>,
    /// Refinement budget per evaluation.
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long, value_enum, default_value = "decimal")]
    format: FormatArg,
    /// Report the sub-ranges on which existentials were proven.
    #[arg(long)]
    trace_witness: bool,
    /// Exit after the files instead of reading from standard input.
    #[arg(long)]
    no_repl: bool,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    match parse_expr(s) {
        Ok(Expr::Rat(q)) => Ok(q),
        _ => Err(format!("not a rational number: {s}")),
    }
}

#[derive(Default)]
struct Status {
    errors: bool,
}

impl Status {
    fn report(&mut self, out: &mut impl Write, lines: Vec<String>, err: Option<SessionError>) {
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        if let Some(e) = err {
            let _ = out.flush();
            eprintln!("error: {e}");
            self.errors = true;
        }
    }
}

fn repl(session: &mut SessionState, status: &mut Status, out: &mut impl Write) {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut buffer = String::new();
    let prompt = |out: &mut dyn Write, fresh: bool| {
        if interactive {
            let _ = write!(out, "{}", if fresh { "# " } else { "  " });
            let _ = out.flush();
        }
    };
    prompt(out, true);
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        buffer.push_str(&line);
        buffer.push('\n');
        if line.trim_end().ends_with(";;") {
            let (lines, err) = session.execute_source(&buffer, None);
            status.report(out, lines, err);
            buffer.clear();
        }
        prompt(out, buffer.is_empty());
    }
    if !buffer.trim().is_empty() {
        let (lines, err) = session.execute_source(&buffer, None);
        status.report(out, lines, err);
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut session = SessionState::new();
    if let Some(p) = args.precision {
        match cutreal::eval::Precision::new(p) {
            Ok(p) => session.precision = p,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if let Some(n) = args.max_steps {
        session.step_budget = n;
    }
    session.format = match args.format {
        FormatArg::Interval => Format::Interval,
        FormatArg::Decimal => Format::Decimal,
    };
    session.trace = args.trace_witness;

    let mut status = Status::default();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for file in &args.files {
        match std::fs::read_to_string(file) {
            Ok(source) => {
                let (lines, err) = session.execute_source(&source, Some(file));
                status.report(&mut out, lines, err);
            }
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", file.display());
                status.errors = true;
            }
        }
    }
    if !args.no_repl {
        repl(&mut session, &mut status, &mut out);
    }
    let _ = out.flush();
    if status.errors {
        ExitCode::from(1)
    } else if session.diverged > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
