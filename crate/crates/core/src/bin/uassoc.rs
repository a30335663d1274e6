fn main() {
    std::process::exit(uassoc::cli::main_with_args(std::env::args_os()));
}
