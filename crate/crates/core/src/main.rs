fn main() {
    std::process::exit(normsol::cli::run(std::env::args_os()));
}
