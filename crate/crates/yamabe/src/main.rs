fn main() {
    std::process::exit(yamabe::cli::run(std::env::args_os()));
}
