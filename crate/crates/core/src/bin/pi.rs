fn main() {
    std::process::exit(pause_intensity::cli::main_with_args(std::env::args_os()));
}
