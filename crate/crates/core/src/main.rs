fn main() {
    std::process::exit(handsign::cli::main());
}
