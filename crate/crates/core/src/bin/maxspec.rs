fn main() {
    std::process::exit(maxspec::cli::main_with_args(std::env::args_os()));
}
