fn main() {
    std::process::exit(isac_ckm::cli::run(std::env::args_os()));
}
