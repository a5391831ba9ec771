fn main() {
    std::process::exit(amsem::cli::run(std::env::args_os()));
}
