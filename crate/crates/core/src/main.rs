fn main() {
    std::process::exit(collector_lab::cli::run(std::env::args_os()));
}
