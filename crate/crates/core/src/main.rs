fn main() {
    std::process::exit(dirac_ops::cli::run(std::env::args_os()));
}
