fn main() {
    std::process::exit(opdam::cli::run(std::env::args_os()));
}
