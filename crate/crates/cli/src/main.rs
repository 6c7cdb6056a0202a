fn main() {
    std::process::exit(gonality_cli::run(std::env::args_os()));
}
