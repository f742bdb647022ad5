fn main() {
    std::process::exit(extendo::cli::main());
}
