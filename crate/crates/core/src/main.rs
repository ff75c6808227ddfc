fn main() {
    std::process::exit(ringshare::cli::main());
}
