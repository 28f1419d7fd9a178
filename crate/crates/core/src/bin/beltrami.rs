fn main() {
    std::process::exit(beltrami::cli::main_with_args(std::env::args_os()));
}
