fn main() {
    std::process::exit(armpa_harness::cli::run(std::env::args_os()));
}
