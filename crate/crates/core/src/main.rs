use clap::Parser;

fn main() {
    let cli = quenchsim::cli::Cli::parse();
    std::process::exit(quenchsim::cli::main_with(cli));
}
