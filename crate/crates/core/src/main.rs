fn main() {
    std::process::exit(hybrid_modes::cli::run_cli(std::env::args_os()));
}
