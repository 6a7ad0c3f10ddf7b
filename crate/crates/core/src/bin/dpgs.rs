fn main() {
    std::process::exit(dpgs::cli::run(std::env::args_os()));
}
