fn main() {
    std::process::exit(nlbreak::cli::run(std::env::args_os()));
}
