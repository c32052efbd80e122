fn main() {
    std::process::exit(citekinetics::cli::run());
}
