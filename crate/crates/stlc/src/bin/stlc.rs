fn main() {
    std::process::exit(stlc::cli::run(std::env::args_os()));
}
