fn main() {
    std::process::exit(detrep::cli::main_with_args(std::env::args_os()));
}
