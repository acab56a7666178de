use clap::Parser;
use costas_cli::args::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not failures
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = costas_cli::run(cli) {
        eprintln!("costas-lab: {e}");
        std::process::exit(e.exit_code());
    }
}
