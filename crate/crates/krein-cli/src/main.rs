fn main() {
    std::process::exit(krein_cli::run(std::env::args_os()));
}
