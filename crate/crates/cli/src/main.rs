fn main() {
    std::process::exit(sampboost_cli::run(std::env::args_os()));
}
