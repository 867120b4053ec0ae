fn main() {
    std::process::exit(manhattan::cli::run(std::env::args_os()));
}
