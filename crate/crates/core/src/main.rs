fn main() {
    std::process::exit(cooccur::cli::main_with_args(std::env::args_os()));
}
