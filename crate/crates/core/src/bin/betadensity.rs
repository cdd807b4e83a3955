fn main() {
    std::process::exit(beta_density::cli::run(std::env::args_os()));
}
