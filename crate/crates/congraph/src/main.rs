fn main() {
    std::process::exit(congraph::cli::run(std::env::args_os()));
}
