fn main() {
    std::process::exit(rigor_cli::run());
}
