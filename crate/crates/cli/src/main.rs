fn main() {
    std::process::exit(toledo_cli::run(std::env::args_os()));
}
