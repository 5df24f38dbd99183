fn main() {
    std::process::exit(funcord::cli::run(std::env::args_os()));
}
