use clap::Parser;

fn main() {
    let cli = sumint::cli::Cli::parse();
    std::process::exit(sumint::cli::run(cli));
}
