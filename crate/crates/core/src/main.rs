fn main() {
    std::process::exit(oblique_vqe::cli::run(std::env::args_os()));
}
