fn main() {
    std::process::exit(levyfluct_cli::run(std::env::args_os()));
}
