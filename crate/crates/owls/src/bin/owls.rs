fn main() {
    std::process::exit(owls::cli::run(std::env::args_os()));
}
