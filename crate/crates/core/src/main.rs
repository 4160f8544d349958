fn main() {
    std::process::exit(conekit::cli::run_from_env());
}
