fn main() {
    std::process::exit(flipgraph::cli::run());
}
