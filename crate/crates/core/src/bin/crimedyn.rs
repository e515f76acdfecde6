fn main() {
    std::process::exit(crimedyn::cli::main_with_args(std::env::args_os()));
}
