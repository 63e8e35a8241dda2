fn main() {
    std::process::exit(dagcollapse::cli::main());
}
