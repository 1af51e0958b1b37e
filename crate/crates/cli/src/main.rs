fn main() {
    std::process::exit(harmlab_cli::main_with_args(std::env::args_os()));
}
