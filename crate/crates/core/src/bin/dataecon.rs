fn main() {
    std::process::exit(dataecon::cli::main_with_args(std::env::args_os()));
}
