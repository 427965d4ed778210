fn main() {
    std::process::exit(poncelet_core::cli::run(std::env::args_os()));
}
