fn main() {
    std::process::exit(sw_semigroup::cli::run(std::env::args_os()));
}
