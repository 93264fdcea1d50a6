mod args;
mod commands;
mod manifest;
mod schema;
mod svg;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use lambdaset::PrecisionConfig;

use args::{Cli, Format};
use commands::{Outcome, Payload};
use manifest::RunManifest;

const EXIT_USAGE: u8 = 1;
const EXIT_FAILED: u8 = 2;

fn render(out: &Outcome, format: Format) -> anyhow::Result<String> {
    match (&out.payload, format) {
        (Payload::Svg(s), _) => Ok(s.clone()),
        (Payload::Json(v), Format::Json) => Ok(serde_json::to_string_pretty(v)? + "\n"),
        (Payload::Json(_), Format::Csv) => {
            let t = out.table.as_ref().ok_or_else(|| {
                anyhow::anyhow!("this subcommand has no tabular form; use --format json")
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let name = cli.command.name();
    if cli.global.print_schema {
        return match schema::for_command(name) {
            Some(s) => {
                print!("{s}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("{name} emits SVG and has no JSON schema");
                ExitCode::from(EXIT_USAGE)
            }
        };
    }

    let start = Instant::now();
    let cfg = match PrecisionConfig::new(cli.global.bits, cli.global.width_log2) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = commands::run(&cli.command, &cfg).and_then(|o| {
        let text = render(&o, cli.global.format)?;
        Ok((o, text))
    });
    let (out, text) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            if schema::for_command(name).is_some() {
                eprintln!("payload schema: lambdaset {name} --print-schema; usage: lambdaset {name} --help");
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(EXIT_USAGE);
    }
    let code = if out.failed { EXIT_FAILED } else { 0 };
    if !cli.global.no_manifest {
        let m = RunManifest::new(&cli, &cfg, &text, start.elapsed(), code, out.notes);
        eprintln!("{}", m.to_json());
    }
    ExitCode::from(code)
}
