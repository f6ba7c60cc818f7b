fn main() {
    std::process::exit(wmorse::cli::run(std::env::args_os()));
}
