fn main() {
    std::process::exit(dtp::cli::run(std::env::args_os()));
}
