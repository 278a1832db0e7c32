fn main() {
    std::process::exit(kerr_blockade::cli::run());
}
