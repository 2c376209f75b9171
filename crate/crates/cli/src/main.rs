fn main() {
    std::process::exit(wallgrowth_cli::run_args(std::env::args_os()));
}
