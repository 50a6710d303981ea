fn main() {
    std::process::exit(pcband::cli::run(std::env::args_os()));
}
