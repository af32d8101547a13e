use clap::Parser;
use ghostosc_cli::config::{Cli, Format};
use ghostosc_cli::{emit, run};

fn main() {
    let cli = Cli::parse(); // clap exits 2 on usage errors
    let output = match run::run(&cli) {
        Ok(out) => out,
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    };
    let rendered = match cli.format {
        Format::Json => emit::to_json(&output),
        Format::Csv => emit::to_csv(&output),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("config error: cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => println!("{rendered}"),
    }
}
