fn main() {
    std::process::exit(gradtab::cli::main());
}
