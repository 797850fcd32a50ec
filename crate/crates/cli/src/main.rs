fn main() {
    std::process::exit(evalkit_cli::run(std::env::args_os()));
}
