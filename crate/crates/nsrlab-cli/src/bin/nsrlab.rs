use clap::Parser;

fn main() {
    let cli = nsrlab_cli::cli::Cli::parse();
    if let Err(e) = nsrlab_cli::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
