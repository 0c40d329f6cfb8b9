fn main() {
    std::process::exit(twopiece_cli::run(std::env::args_os()));
}
