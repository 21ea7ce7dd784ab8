fn main() {
    std::process::exit(contextual_hv::cli::run(std::env::args_os().collect()));
}
