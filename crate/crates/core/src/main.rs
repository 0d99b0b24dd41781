fn main() {
    std::process::exit(bccompose::cli::run(std::env::args_os()));
}
