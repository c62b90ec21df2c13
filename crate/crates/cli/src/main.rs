use clap::Parser;
use tempcert_cli::config::Cli;
use tempcert_cli::report::Status;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Invalid.exit_code() } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let res = tempcert_cli::run(&cli.command);
    print!("{}", res.stdout);
    if let Some(f) = res.envelope.payload.get("failure").and_then(|v| v.as_str()) {
        eprintln!("{}: {f}", cli.command.name());
    }
    if let Some(errs) = res.envelope.payload.get("errors").and_then(|v| v.as_array()) {
        for e in errs {
            eprintln!("error: {}", e.as_str().unwrap_or_default());
        }
    }
    std::process::exit(res.exit_code);
}
