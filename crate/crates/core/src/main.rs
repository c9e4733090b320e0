fn main() {
    std::process::exit(groupdet::cli::run());
}
