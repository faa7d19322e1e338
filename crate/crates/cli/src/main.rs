use std::process::ExitCode;

use clap::Parser;
use consult_cli::commands::{run, Cli, Command, Format};
use consult_cli::ErrorRecord;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve(args) => {
            tracing_subscriber::fmt().with_writer(std::io::stderr).init();
            tokio::runtime::Runtime::new()
                .map_err(anyhow::Error::from)
                .and_then(|rt| rt.block_on(consult_cli::service::serve(args)))
                .map(|_| String::new())
        }
        command => run(command, cli.format),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = ErrorRecord::new(&e);
            if cli.format == Some(Format::Json) {
                println!("{}", serde_json::to_string(&record).expect("error records serialize"));
            } else {
                eprintln!("error ({}): {}", record.error.kind, record.error.message);
                for f in &record.error.findings {
                    eprintln!("  {f}");
                }
            }
            ExitCode::FAILURE
        }
    }
}
