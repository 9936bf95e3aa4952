fn main() {
    std::process::exit(padefreq::cli::main());
}
