fn main() {
    std::process::exit(veralg::cli::run(std::env::args()));
}
