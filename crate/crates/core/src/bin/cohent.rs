fn main() {
    std::process::exit(cohent::cli::run(std::env::args_os()));
}
