use clap::Parser;

fn main() {
    let cli = pfaffamp::cli::Cli::parse();
    std::process::exit(pfaffamp::cli::run_and_report(cli));
}
