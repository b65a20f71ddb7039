fn main() {
    std::process::exit(pdtomo_cli::run(std::env::args_os()));
}
