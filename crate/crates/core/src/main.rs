fn main() {
    std::process::exit(momrep::cli::run_cli(std::env::args_os()));
}
