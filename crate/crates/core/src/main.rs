fn main() {
    std::process::exit(sdtkit::cli::main_with_args(std::env::args_os()));
}
